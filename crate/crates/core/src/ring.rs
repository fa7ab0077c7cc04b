//! Ring-theoretic annotations and the characteristic case analysis.
//!
//! The library never computes with ring elements: characteristic data and
//! the per-node facts (does the prime contain p, does it contain the
//! annihilator of p, is it an associated prime) arrive as annotations, and
//! this module decides which construction case they land in.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{NodeId, SpecDiagram};
use crate::error::{Error, Result};
use crate::partition::{minimals_under, validate_minfeasible, MinfeasiblePartition};

/// Per-node ring facts. All are optional; a check that needs an absent
/// value fails with `MissingFlags` instead of guessing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingFlags {
    /// The annihilator of p is contained in this prime.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ann_p_in: Option<bool>,
    /// The prime is associated. Minimal nodes are always associated and may
    /// not be flagged otherwise; non-minimal nodes default to false.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub associated: Option<bool>,
    /// p lies in this prime.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contains_p: Option<bool>,
}

/// Characteristic data of the ambient complete local ring: its own
/// characteristic together with how the integers meet the maximal ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Characteristic {
    /// Characteristic 0 and no prime integer in the maximal ideal.
    ZeroMzZero,
    /// Characteristic 0 with the integers meeting the maximal ideal in (p).
    ZeroMzP { p: u64 },
    /// Characteristic p.
    Prime { p: u64 },
    /// Characteristic p^k with k at least 2.
    PrimePower { p: u64, k: u32 },
}

impl Characteristic {
    pub fn validate(&self) -> Result<()> {
        let check_p = |p: u64| -> Result<()> {
            if is_prime(p) {
                Ok(())
            } else {
                Err(Error::Invariant {
                    subject: "characteristic".into(),
                    rule: format!("{p} is not prime"),
                })
            }
        };
        match *self {
            Characteristic::ZeroMzZero => Ok(()),
            Characteristic::ZeroMzP { p } | Characteristic::Prime { p } => check_p(p),
            Characteristic::PrimePower { p, k } => {
                check_p(p)?;
                if k < 2 {
                    return Err(Error::Invariant {
                        subject: "characteristic".into(),
                        rule: format!("exponent k = {k} must be at least 2"),
                    });
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Characteristic::ZeroMzZero => write!(f, "characteristic 0, integers meet M in (0)"),
            Characteristic::ZeroMzP { p } => {
                write!(f, "characteristic 0, integers meet M in ({p})")
            }
            Characteristic::Prime { p } => write!(f, "characteristic {p}"),
            Characteristic::PrimePower { p, k } => write!(f, "characteristic {p}^{k}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The five construction cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemarkCase {
    I,
    II,
    III,
    IV,
    V,
}

impl fmt::Display for RemarkCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RemarkCase::I => "i",
            RemarkCase::II => "ii",
            RemarkCase::III => "iii",
            RemarkCase::IV => "iv",
            RemarkCase::V => "v",
        };
        f.write_str(s)
    }
}

/// Which cases hold, with the three sub-results of the mixed-characteristic
/// case when it was evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub satisfied: BTreeSet<RemarkCase>,
    pub iv_a: Option<bool>,
    pub iv_b: Option<bool>,
    pub iv_c: Option<bool>,
    pub warnings: Vec<String>,
}

/// Outcome of the applicability decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Some case holds; the construction goes through.
    Constructive,
    /// No case holds while both side hypotheses do: no suitable subring
    /// exists, so no precompletion realizes the prediction.
    Obstructed,
    /// A side hypothesis fails, so the necessity argument does not apply.
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Constructive => "Constructive",
            Verdict::Obstructed => "Obstructed",
            Verdict::Undetermined => "Undetermined",
        };
        f.write_str(s)
    }
}

/// Full applicability result: the verdict, the underlying case report, and
/// the two side hypotheses that the necessity direction assumes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Applicability {
    pub verdict: Verdict,
    pub report: ConditionReport,
    /// In the mixed-characteristic case with (a) and (b) holding, (c) holds.
    pub hypothesis_mixed_char: bool,
    /// In the prime-power case, the annihilator condition holds.
    pub hypothesis_prime_power: bool,
}

fn contains_p(d: &SpecDiagram, id: &NodeId) -> Result<bool> {
    d.node(id)
        .and_then(|n| n.flags.as_ref())
        .and_then(|f| f.contains_p)
        .ok_or_else(|| Error::MissingFlags {
            node: id.to_string(),
            flag: "contains_p",
        })
}

fn ann_p_in(d: &SpecDiagram, id: &NodeId) -> Result<bool> {
    d.node(id)
        .and_then(|n| n.flags.as_ref())
        .and_then(|f| f.ann_p_in)
        .ok_or_else(|| Error::MissingFlags {
            node: id.to_string(),
            flag: "ann_p_in",
        })
}

/// Associated nodes: every minimal node, plus any non-minimal node flagged
/// `associated = true`.
fn associated_nodes(d: &SpecDiagram) -> BTreeSet<NodeId> {
    let minimals = d.minimal_nodes();
    d.nodes()
        .filter(|n| {
            minimals.contains(&n.id)
                || n.flags
                    .as_ref()
                    .and_then(|f| f.associated)
                    .unwrap_or(false)
        })
        .map(|n| n.id.clone())
        .collect()
}

/// The exception slot: a subcollection consisting of one minimal node and
/// nothing else. For these the annihilator conditions are waived.
fn is_single_minimal_exception(
    d: &SpecDiagram,
    p: &MinfeasiblePartition,
    i: usize,
) -> bool {
    let minimals = d.minimal_nodes();
    let sub = p.subcollection(i);
    sub.iter().all(|id| minimals.contains(id)) && minimals_under(d, p, i).len() == 1
}

/// Evaluates the five cases against the annotations. The partition must be
/// valid; flags are demanded only where a case actually consults them.
pub fn check_remark_conditions(
    d: &SpecDiagram,
    p: &MinfeasiblePartition,
    ch: &Characteristic,
) -> Result<ConditionReport> {
    ch.validate()?;
    let validation = validate_minfeasible(d, p)?;
    if !validation.ok() {
        return Err(Error::PartitionInvalid {
            violations: validation.violations,
        });
    }

    let mut satisfied = BTreeSet::new();
    let mut warnings = Vec::new();
    let (mut iv_a, mut iv_b, mut iv_c) = (None, None, None);
    let minimals = d.minimal_nodes();

    // A lone non-minimal subcollection over a single minimal node sits in
    // the gray zone next to the waived slot; the conditions stay enforced.
    if matches!(
        ch,
        Characteristic::ZeroMzP { .. } | Characteristic::PrimePower { .. }
    ) {
        for i in 1..=p.m() {
            let sub = p.subcollection(i);
            if sub.len() == 1
                && !minimals.contains(&sub[0])
                && minimals_under(d, p, i).len() == 1
            {
                warnings.push(format!(
                    "subcollection {i} is a single non-minimal node `{}`; the annihilator conditions are enforced for it",
                    sub[0]
                ));
            }
        }
    }

    match *ch {
        Characteristic::Prime { .. } => {
            satisfied.insert(RemarkCase::I);
        }
        Characteristic::ZeroMzZero => {
            satisfied.insert(RemarkCase::II);
        }
        Characteristic::ZeroMzP { .. } => {
            let associated = associated_nodes(d);
            if associated.iter().all(|q| minimals.contains(q)) {
                warnings.push(
                    "no non-minimal node is flagged associated; conditions over associated primes are evaluated on minimal nodes only"
                        .into(),
                );
            }

            let mut case_iii = true;
            for pid in &p.c {
                if contains_p(d, pid)? {
                    case_iii = false;
                }
            }
            if case_iii {
                satisfied.insert(RemarkCase::III);
            }

            let mut a = true;
            for pid in &p.c {
                if !contains_p(d, pid)? {
                    continue;
                }
                for q in &associated {
                    if d.leq(q, pid) && !contains_p(d, q)? {
                        a = false;
                    }
                }
            }

            let mut b = true;
            for i in 1..=p.m() {
                let sub = p.subcollection(i);
                if sub.len() < 2 {
                    continue;
                }
                let first = contains_p(d, &sub[0])?;
                for pid in &sub[1..] {
                    if contains_p(d, pid)? != first {
                        b = false;
                    }
                }
            }

            let mut c = true;
            for i in 1..=p.m() {
                if is_single_minimal_exception(d, p, i) {
                    continue;
                }
                let sub = p.subcollection(i);
                for q in &associated {
                    if sub.iter().any(|pid| d.leq(q, pid)) && contains_p(d, q)? && ann_p_in(d, q)? {
                        c = false;
                    }
                }
            }

            if a && b && c {
                satisfied.insert(RemarkCase::IV);
            }
            (iv_a, iv_b, iv_c) = (Some(a), Some(b), Some(c));
        }
        Characteristic::PrimePower { .. } => {
            let mut case_v = true;
            for i in 1..=p.m() {
                if is_single_minimal_exception(d, p, i) {
                    continue;
                }
                for pid in p.subcollection(i) {
                    if ann_p_in(d, pid)? {
                        case_v = false;
                    }
                }
            }
            if case_v {
                satisfied.insert(RemarkCase::V);
            }
        }
    }

    Ok(ConditionReport {
        satisfied,
        iv_a,
        iv_b,
        iv_c,
        warnings,
    })
}

/// Decides whether the construction applies, is provably blocked, or falls
/// outside the necessity argument.
pub fn check_construction_applicability(
    d: &SpecDiagram,
    p: &MinfeasiblePartition,
    ch: &Characteristic,
) -> Result<Applicability> {
    let report = check_remark_conditions(d, p, ch)?;
    let hypothesis_mixed_char = match (ch, report.iv_a, report.iv_b) {
        (Characteristic::ZeroMzP { .. }, Some(true), Some(true)) => report.iv_c == Some(true),
        _ => true,
    };
    let hypothesis_prime_power = match ch {
        Characteristic::PrimePower { .. } => report.satisfied.contains(&RemarkCase::V),
        _ => true,
    };
    let hypotheses = hypothesis_mixed_char && hypothesis_prime_power;
    let verdict = if !report.satisfied.is_empty() && hypotheses {
        Verdict::Constructive
    } else if report.satisfied.is_empty() && hypotheses {
        Verdict::Obstructed
    } else {
        Verdict::Undetermined
    };
    Ok(Applicability {
        verdict,
        report,
        hypothesis_mixed_char,
        hypothesis_prime_power,
    })
}
