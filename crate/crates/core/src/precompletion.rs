//! The predicted spectrum of a precompletion: quotient diagrams, S-sets,
//! and formal-fiber reports.
//!
//! Collapsing each subcollection's under-set to a single minimal point and
//! leaving every other node alone yields the order structure the smaller
//! ring's spectrum must carry. In `Exact` mode all cardinalities transfer
//! unchanged; in `Countable` mode uncountable boxes drop to countable ones
//! and every cardinality outside the guaranteed bijections is downgraded
//! to an upper bound.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::card::Cardinality;
use crate::diagram::{transitive_reduction, NodeId, PrimeNode, SpecDiagram};
use crate::error::{Error, Result};
use crate::partition::{
    fiber_classes, minimals_under, over_set, under_set, validate_minfeasible,
    MinfeasiblePartition,
};
use crate::ring::{check_construction_applicability, Characteristic, Verdict};

/// Cardinality policy for the computed spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every cardinality transfers unchanged.
    Exact,
    /// Continuum drops to countable, and cardinalities without a proven
    /// bijection are marked as upper bounds.
    Countable,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Countable => "countable",
        })
    }
}

/// The exists-witness relation between classes of a node partition, with
/// the two partial-order laws that can fail for arbitrary classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientOrder {
    /// Reflexive relation on class indices: `(a, b)` when some member of
    /// class `a` sits below some member of class `b`.
    pub relation: BTreeSet<(usize, usize)>,
    pub antisymmetric: bool,
    pub transitive: bool,
}

impl QuotientOrder {
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.relation.contains(&(a, b))
    }

    /// True when the relation is a genuine partial order on the classes.
    pub fn is_partial_order(&self) -> bool {
        self.antisymmetric && self.transitive
    }
}

/// Relation on classes: `[a] <= [b]` iff some `a'` in `[a]` and `b'` in
/// `[b]` satisfy `a' <= b'`. The classes must partition the node set; the
/// result carries flags telling whether the relation is antisymmetric and
/// transitive, which arbitrary classes can break.
pub fn quotient_order(d: &SpecDiagram, classes: &[BTreeSet<NodeId>]) -> Result<QuotientOrder> {
    let mut class_of: BTreeMap<&NodeId, usize> = BTreeMap::new();
    for (k, class) in classes.iter().enumerate() {
        if class.is_empty() {
            return Err(Error::NotAPartition {
                detail: format!("class {k} is empty"),
            });
        }
        for n in class {
            if d.node(n).is_none() {
                return Err(Error::NotAPartition {
                    detail: format!("unknown node `{n}`"),
                });
            }
            if let Some(prev) = class_of.insert(n, k) {
                return Err(Error::NotAPartition {
                    detail: format!("node `{n}` appears in classes {prev} and {k}"),
                });
            }
        }
    }
    if class_of.len() != d.len() {
        let missing = d
            .ids()
            .into_iter()
            .find(|id| !class_of.contains_key(id))
            .unwrap();
        return Err(Error::NotAPartition {
            detail: format!("node `{missing}` belongs to no class"),
        });
    }

    let k = classes.len();
    let mut relation: BTreeSet<(usize, usize)> = (0..k).map(|a| (a, a)).collect();
    for (x, y) in d.closure().pairs() {
        relation.insert((class_of[x], class_of[y]));
    }
    let antisymmetric = !relation
        .iter()
        .any(|&(a, b)| a != b && relation.contains(&(b, a)));
    let mut transitive = true;
    for &(a, b) in &relation {
        for c in 0..k {
            if relation.contains(&(b, c)) && !relation.contains(&(a, c)) {
                transitive = false;
            }
        }
    }
    Ok(QuotientOrder {
        relation,
        antisymmetric,
        transitive,
    })
}

/// A computed precompletion spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecompletionDiagram {
    /// The quotient diagram, coalesced.
    pub base: SpecDiagram,
    pub mode: Mode,
    /// For each node here, the set of original nodes it absorbs.
    pub provenance: BTreeMap<NodeId, BTreeSet<NodeId>>,
    /// The fiber points in subcollection order: `(node id, i)`.
    pub min_labels: Vec<(NodeId, usize)>,
    /// Countable mode only: nodes whose cardinality is an upper bound
    /// rather than an exact count.
    pub upper_bound_cards: BTreeSet<NodeId>,
    /// Whether an applicability gate was overridden to produce this.
    pub forced: bool,
}

impl PrecompletionDiagram {
    /// The fiber point for subcollection `i` (1-based).
    pub fn q_id(&self, i: usize) -> &NodeId {
        &self.min_labels[i - 1].0
    }

    /// Original node to the node absorbing it.
    pub fn fiber_map(&self) -> BTreeMap<NodeId, NodeId> {
        let mut map = BTreeMap::new();
        for (target, sources) in &self.provenance {
            for s in sources {
                map.insert(s.clone(), target.clone());
            }
        }
        map
    }
}

/// Quotient of the diagram by a valid partition's collapse classes.
///
/// Each under-set becomes one minimal fiber point `q_i`; all other nodes
/// carry over, and order-equivalent interior nodes of the quotient merge
/// into boxes. Fails with `PartitionInvalid` when the partition does not
/// validate. No applicability gate is applied here; see
/// [`spec_a_checked`] for the gated variant.
pub fn spec_a(d: &SpecDiagram, p: &MinfeasiblePartition, mode: Mode) -> Result<PrecompletionDiagram> {
    let classes = fiber_classes(d, p)?;
    let m = classes.collapsed.len();

    let mut class_vec: Vec<BTreeSet<NodeId>> = classes.collapsed.clone();
    for id in &classes.identity {
        class_vec.push([id.clone()].into());
    }
    let qo = quotient_order(d, &class_vec)?;
    assert!(
        qo.is_partial_order(),
        "quotient by a valid partition is always a partial order"
    );

    // Fresh ids for the fiber points; `q{i}` unless an untouched node
    // already uses that name.
    let mut q_ids = Vec::new();
    for i in 1..=m {
        let mut id = NodeId(format!("q{i}"));
        while classes.identity.contains(&id) {
            id.0.push('_');
        }
        q_ids.push(id);
    }

    // Class index -> representative node id in the quotient.
    let mut rep_ids: Vec<NodeId> = q_ids.clone();
    for id in &classes.identity {
        rep_ids.push(id.clone());
    }

    let mut nodes: Vec<PrimeNode> = Vec::new();
    for (i, id) in q_ids.iter().enumerate() {
        nodes.push(PrimeNode::new(
            id.clone(),
            format!("q{}", i + 1),
            Cardinality::Finite(1),
        ));
    }
    for id in &classes.identity {
        let src = d.node(id).unwrap();
        nodes.push(PrimeNode::new(id.clone(), src.label.clone(), src.card));
    }

    let ids: BTreeSet<NodeId> = rep_ids.iter().cloned().collect();
    let mut strict = BTreeSet::new();
    for &(a, b) in &qo.relation {
        if a != b {
            strict.insert((rep_ids[a].clone(), rep_ids[b].clone()));
        }
    }
    let covers = transitive_reduction(&ids, &strict).expect("quotient order is acyclic");
    let quotient = SpecDiagram::new(
        nodes,
        covers.into_iter().collect(),
        d.max_id().clone(),
    )
    .expect("quotient of a valid partition is a valid diagram");

    let (merged, merge_map) = quotient.coalesce_with_map();

    let mut provenance: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for (k, class) in class_vec.iter().enumerate() {
        let target = merge_map[&rep_ids[k]].clone();
        provenance.entry(target).or_default().extend(class.iter().cloned());
    }
    let min_labels: Vec<(NodeId, usize)> = q_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (merge_map[id].clone(), i + 1))
        .collect();

    let (base, upper_bound_cards) = match mode {
        Mode::Exact => (merged, BTreeSet::new()),
        Mode::Countable => {
            let capped = merged
                .map_cards(|n| n.card.capped_at_countable())
                .expect("capping cardinalities preserves validity");
            let protected = s1_protected(&capped, &min_labels);
            let minimals = capped.minimal_nodes();
            let bounds = capped
                .ids()
                .into_iter()
                .filter(|id| {
                    !minimals.contains(id) && id != capped.max_id() && !protected.contains(id)
                })
                .collect();
            (capped, bounds)
        }
    };

    Ok(PrecompletionDiagram {
        base,
        mode,
        provenance,
        min_labels,
        upper_bound_cards,
        forced: false,
    })
}

/// Nodes covered by some height-one bijection: members of a minimal-upper-
/// bound set of `{q_i : i in X}` for any index set with at least two
/// elements. Their cardinalities stay exact in countable mode.
fn s1_protected(base: &SpecDiagram, min_labels: &[(NodeId, usize)]) -> BTreeSet<NodeId> {
    let m = min_labels.len();
    let mut protected = BTreeSet::new();
    if m < 2 {
        return protected;
    }
    assert!(m <= 24, "subset enumeration over {m} subcollections");
    for mask in 0u32..(1 << m) {
        if mask.count_ones() < 2 {
            continue;
        }
        let qs: BTreeSet<NodeId> = (0..m)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| min_labels[i].0.clone())
            .collect();
        protected.extend(base.minimal_upper_bounds(&qs).expect("q ids exist"));
    }
    protected
}

/// Gated variant of [`spec_a`]: requires a `Constructive` applicability
/// verdict unless `force` is set, and records an override in the result.
pub fn spec_a_checked(
    d: &SpecDiagram,
    p: &MinfeasiblePartition,
    ch: Option<&Characteristic>,
    mode: Mode,
    force: bool,
) -> Result<PrecompletionDiagram> {
    let gate_passed = match ch {
        Some(ch) => {
            let app = check_construction_applicability(d, p, ch)?;
            if app.verdict != Verdict::Constructive && !force {
                return Err(Error::NotConstructive {
                    verdict: app.verdict.to_string(),
                });
            }
            app.verdict == Verdict::Constructive
        }
        None => {
            if !force {
                return Err(Error::NotConstructive {
                    verdict: "Unknown (no characteristic given)".into(),
                });
            }
            false
        }
    };
    let mut result = spec_a(d, p, mode)?;
    result.forced = !gate_passed;
    Ok(result)
}

/// The S-sets of an index set `X`, on both sides of the collapse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SSetReport {
    #[serde(rename = "X")]
    pub x: BTreeSet<usize>,
    /// Nodes over every indexed subcollection.
    #[serde(rename = "s_T")]
    pub s_t: BTreeSet<NodeId>,
    /// Their images: quotient nodes strictly above every indexed fiber point.
    #[serde(rename = "s_A")]
    pub s_a: BTreeSet<NodeId>,
    /// Nodes minimal over some choice of one minimal node per indexed
    /// subcollection. Only computed when `X` has at least two elements.
    #[serde(rename = "s1bar_T", skip_serializing_if = "Option::is_none")]
    pub s1bar_t: Option<BTreeSet<NodeId>>,
    /// Minimal elements of the above.
    #[serde(rename = "s1_T", skip_serializing_if = "Option::is_none")]
    pub s1_t: Option<BTreeSet<NodeId>>,
    /// Quotient nodes minimal above every indexed fiber point.
    #[serde(rename = "s1_A", skip_serializing_if = "Option::is_none")]
    pub s1_a: Option<BTreeSet<NodeId>>,
    /// Prime counts behind the two height-one sets (node cardinalities
    /// summed), which the bijection makes equal.
    #[serde(rename = "s1_T_primes", skip_serializing_if = "Option::is_none")]
    pub s1_t_primes: Option<Cardinality>,
    #[serde(rename = "s1_A_primes", skip_serializing_if = "Option::is_none")]
    pub s1_a_primes: Option<Cardinality>,
}

/// Computes the S-sets for `X`. The partition must validate, `X` must be a
/// nonempty subset of `1..=m`; the height-one sets need `|X| >= 2`.
pub fn s_sets(d: &SpecDiagram, p: &MinfeasiblePartition, x: &BTreeSet<usize>) -> Result<SSetReport> {
    let report = validate_minfeasible(d, p)?;
    if !report.ok() {
        return Err(Error::PartitionInvalid {
            violations: report.violations,
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyX);
    }
    for &i in x {
        if i == 0 || i > p.m() {
            return Err(Error::XOutOfRange { index: i, m: p.m() });
        }
    }

    let mut s_t: Option<BTreeSet<NodeId>> = None;
    for &i in x {
        let over = over_set(d, p, i);
        s_t = Some(match s_t {
            None => over,
            Some(acc) => acc.intersection(&over).cloned().collect(),
        });
    }
    let s_t = s_t.unwrap();

    let pre = spec_a(d, p, Mode::Exact)?;
    let fiber = pre.fiber_map();
    let s_a: BTreeSet<NodeId> = s_t.iter().map(|n| fiber[n].clone()).collect();
    let direct: BTreeSet<NodeId> = pre
        .base
        .ids()
        .into_iter()
        .filter(|n| x.iter().all(|&i| pre.base.lt(pre.q_id(i), n)))
        .collect();
    assert_eq!(
        s_a, direct,
        "the image of the over-intersection is exactly the nodes above the fiber points"
    );

    let (s1bar_t, s1_t, s1_a, s1_t_primes, s1_a_primes) = if x.len() >= 2 {
        let mut s1bar: BTreeSet<NodeId> = BTreeSet::new();
        let choices: Vec<Vec<NodeId>> = x
            .iter()
            .map(|&i| minimals_under(d, p, i).into_iter().collect())
            .collect();
        let mut pick = vec![0usize; choices.len()];
        loop {
            let qs: BTreeSet<NodeId> = pick
                .iter()
                .zip(&choices)
                .map(|(&k, opts)| opts[k].clone())
                .collect();
            s1bar.extend(d.minimal_upper_bounds(&qs)?);
            // Advance the mixed-radix counter over all choices.
            let mut pos = 0;
            loop {
                if pos == pick.len() {
                    break;
                }
                pick[pos] += 1;
                if pick[pos] < choices[pos].len() {
                    break;
                }
                pick[pos] = 0;
                pos += 1;
            }
            if pos == pick.len() {
                break;
            }
        }
        let s1: BTreeSet<NodeId> = s1bar
            .iter()
            .filter(|n| !s1bar.iter().any(|other| d.lt(other, n)))
            .cloned()
            .collect();
        let q_set: BTreeSet<NodeId> = x.iter().map(|&i| pre.q_id(i).clone()).collect();
        let s1_a = pre.base.minimal_upper_bounds(&q_set)?;
        let t_primes = Cardinality::sum_all(s1.iter().map(|n| d.node(n).unwrap().card));
        let a_primes =
            Cardinality::sum_all(s1_a.iter().map(|n| pre.base.node(n).unwrap().card));
        (
            Some(s1bar),
            Some(s1),
            Some(s1_a),
            Some(t_primes),
            Some(a_primes),
        )
    } else {
        (None, None, None, None, None)
    };

    Ok(SSetReport {
        x: x.clone(),
        s_t,
        s_a,
        s1bar_t,
        s1_t,
        s1_a,
        s1_t_primes,
        s1_a_primes,
    })
}

/// The formal fiber of one fiber point: its class and the class's maximal
/// elements, which are exactly the subcollection's members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberReport {
    pub class: BTreeSet<NodeId>,
    pub maximal_elements: BTreeSet<NodeId>,
}

/// Reports the fiber of subcollection `i` (1-based).
pub fn fiber_report(d: &SpecDiagram, p: &MinfeasiblePartition, i: usize) -> Result<FiberReport> {
    let report = validate_minfeasible(d, p)?;
    if !report.ok() {
        return Err(Error::PartitionInvalid {
            violations: report.violations,
        });
    }
    if i == 0 || i > p.m() {
        return Err(Error::XOutOfRange { index: i, m: p.m() });
    }
    let class = under_set(d, p, i);
    let maximal_elements: BTreeSet<NodeId> = class
        .iter()
        .filter(|n| !class.iter().any(|other| d.lt(n, other)))
        .cloned()
        .collect();
    let sub: BTreeSet<NodeId> = p.subcollection(i).iter().cloned().collect();
    assert_eq!(
        maximal_elements, sub,
        "the maximal elements of an under-set are the subcollection itself"
    );
    Ok(FiberReport {
        class,
        maximal_elements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::Cardinality::{Aleph0, Continuum, Finite};
    use crate::testutil::{
        chain4, ids, split, split_partition, xyz, xyz_partition, xyzw, xyzw_partition,
    };

    fn n(id: &str) -> NodeId {
        NodeId::from(id)
    }

    fn xset(list: &[usize]) -> BTreeSet<usize> {
        list.iter().copied().collect()
    }

    #[test]
    fn quotient_of_identity_classes_is_the_original_order() {
        let d = xyz();
        let classes: Vec<BTreeSet<NodeId>> =
            d.ids().into_iter().map(|id| [id].into()).collect();
        let index: Vec<NodeId> = d.ids().into_iter().collect();
        let qo = quotient_order(&d, &classes).unwrap();
        assert!(qo.is_partial_order());
        for (a, ida) in index.iter().enumerate() {
            for (b, idb) in index.iter().enumerate() {
                assert_eq!(qo.leq(a, b), d.leq(ida, idb));
            }
        }
    }

    #[test]
    fn quotient_relates_fiber_class_to_shared_upper_node() {
        let d = xyz();
        let classes = fiber_classes(&d, &xyz_partition()).unwrap();
        let mut class_vec = classes.collapsed.clone();
        let identity: Vec<NodeId> = classes.identity.iter().cloned().collect();
        for id in &identity {
            class_vec.push([id.clone()].into());
        }
        let qo = quotient_order(&d, &class_vec).unwrap();
        let idx_of = |id: &str| 2 + identity.iter().position(|n| n.as_str() == id).unwrap();
        assert!(qo.leq(0, idx_of("xy")));
        assert!(!qo.leq(1, idx_of("xy")));
        assert!(qo.leq(0, idx_of("xz")) && qo.leq(1, idx_of("xz")));
        assert!(qo.is_partial_order());
    }

    #[test]
    fn split_shared_dot_sits_over_the_first_fiber_only() {
        let d = split();
        let classes = fiber_classes(&d, &split_partition()).unwrap();
        let mut class_vec = classes.collapsed.clone();
        let identity: Vec<NodeId> = classes.identity.iter().cloned().collect();
        for id in &identity {
            class_vec.push([id.clone()].into());
        }
        let qo = quotient_order(&d, &class_vec).unwrap();
        let s12 = 2 + identity.iter().position(|n| n.as_str() == "s12").unwrap();
        assert!(qo.leq(0, s12));
        assert!(!qo.leq(1, s12));
    }

    #[test]
    fn arbitrary_classes_can_break_antisymmetry() {
        let d = chain4();
        let classes: Vec<BTreeSet<NodeId>> = vec![
            [n("q"), n("big")].into(),
            [n("a")].into(),
            [n("m")].into(),
        ];
        let qo = quotient_order(&d, &classes).unwrap();
        assert!(!qo.antisymmetric);
        assert!(!qo.is_partial_order());
    }

    #[test]
    fn quotient_rejects_non_partitions() {
        let d = chain4();
        let overlap: Vec<BTreeSet<NodeId>> = vec![
            [n("q"), n("a")].into(),
            [n("a"), n("big"), n("m")].into(),
        ];
        assert!(matches!(
            quotient_order(&d, &overlap),
            Err(Error::NotAPartition { .. })
        ));
        let gap: Vec<BTreeSet<NodeId>> = vec![[n("q")].into()];
        assert!(matches!(
            quotient_order(&d, &gap),
            Err(Error::NotAPartition { .. })
        ));
    }

    #[test]
    fn exact_spectrum_of_the_three_component_example() {
        let d = xyz();
        let pre = spec_a(&d, &xyz_partition(), Mode::Exact).unwrap();
        assert_eq!(pre.base.ids(), ids(["bx", "bz", "m", "q1", "q2", "xz"]));
        assert_eq!(pre.base.minimal_nodes(), ids(["q1", "q2"]));
        assert_eq!(pre.base.node(&n("bx")).unwrap().card, Continuum);
        assert_eq!(pre.base.node(&n("bz")).unwrap().card, Continuum);
        assert_eq!(pre.base.node(&n("xz")).unwrap().card, Finite(2));
        let covers: Vec<(String, String)> = pre
            .base
            .covers()
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(
            covers,
            [
                ("bx", "m"),
                ("bz", "m"),
                ("q1", "bx"),
                ("q1", "xz"),
                ("q2", "bz"),
                ("q2", "xz"),
                ("xz", "m"),
            ]
            .map(|(a, b)| (a.to_string(), b.to_string()))
        );
        assert_eq!(pre.provenance[&n("q1")], ids(["x", "y"]));
        assert_eq!(pre.provenance[&n("q2")], ids(["z"]));
        assert_eq!(pre.provenance[&n("bx")], ids(["bx", "by", "xy"]));
        assert_eq!(pre.provenance[&n("xz")], ids(["xz", "yz"]));
        assert_eq!(pre.provenance[&n("m")], ids(["m"]));
        assert!(pre.upper_bound_cards.is_empty());
        assert!(!pre.forced);
    }

    #[test]
    fn countable_spectrum_downgrades_unprotected_boxes() {
        let d = xyz();
        let pre = spec_a(&d, &xyz_partition(), Mode::Countable).unwrap();
        assert_eq!(pre.base.node(&n("bx")).unwrap().card, Aleph0);
        assert_eq!(pre.base.node(&n("bz")).unwrap().card, Aleph0);
        // The shared height-one box keeps its exact finite count.
        assert_eq!(pre.base.node(&n("xz")).unwrap().card, Finite(2));
        assert_eq!(pre.upper_bound_cards, ids(["bx", "bz"]));
    }

    #[test]
    fn split_spectrum_keeps_side_boxes_and_merges_shared_primes() {
        let d = split();
        let pre = spec_a(&d, &split_partition(), Mode::Exact).unwrap();
        assert_eq!(pre.base.ids(), ids(["bp1", "bz", "m", "p1z", "q1", "q2"]));
        assert_eq!(pre.base.node(&n("bp1")).unwrap().card, Continuum);
        assert_eq!(pre.base.node(&n("bz")).unwrap().card, Continuum);
        assert_eq!(pre.base.node(&n("p1z")).unwrap().card, Finite(2));
        assert_eq!(pre.provenance[&n("bp1")], ids(["bp1", "bp2", "s12"]));
        assert_eq!(pre.provenance[&n("p1z")], ids(["p1z", "p2z"]));
        // Exactly one non-box node sits above both fiber points.
        let above_both: Vec<NodeId> = pre
            .base
            .ids()
            .into_iter()
            .filter(|nid| pre.base.lt(&n("q1"), nid) && pre.base.lt(&n("q2"), nid))
            .collect();
        assert_eq!(above_both, vec![n("m"), n("p1z")]);
    }

    #[test]
    fn fiber_points_dodge_colliding_names() {
        let d = SpecDiagram::new(
            vec![
                PrimeNode::new("q", "(q)", Finite(1)),
                PrimeNode::new("q1", "", Finite(1)),
                PrimeNode::new("m", "(M)", Finite(1)),
            ],
            vec![(n("q"), n("q1")), (n("q1"), n("m"))],
            n("m"),
        )
        .unwrap();
        let p = MinfeasiblePartition::new(vec![n("q")], vec![vec![n("q")]]);
        let pre = spec_a(&d, &p, Mode::Exact).unwrap();
        assert_eq!(pre.min_labels, vec![(n("q1_"), 1)]);
        assert_eq!(pre.base.ids(), ids(["m", "q1", "q1_"]));
        assert_eq!(pre.base.minimal_nodes(), ids(["q1_"]));
    }

    #[test]
    fn gate_blocks_without_force_and_records_overrides() {
        let mut d = xyz();
        crate::testutil::set_flags(&mut d, "x", None, Some(true), None);
        crate::testutil::set_flags(&mut d, "y", None, Some(false), None);
        let ch = Characteristic::PrimePower { p: 2, k: 2 };
        let err = spec_a_checked(&d, &xyz_partition(), Some(&ch), Mode::Exact, false).unwrap_err();
        assert!(matches!(err, Error::NotConstructive { .. }));
        let pre = spec_a_checked(&d, &xyz_partition(), Some(&ch), Mode::Exact, true).unwrap();
        assert!(pre.forced);

        let ok = spec_a_checked(
            &xyz(),
            &xyz_partition(),
            Some(&Characteristic::ZeroMzZero),
            Mode::Exact,
            false,
        )
        .unwrap();
        assert!(!ok.forced);

        assert!(matches!(
            spec_a_checked(&xyz(), &xyz_partition(), None, Mode::Exact, false),
            Err(Error::NotConstructive { .. })
        ));
    }

    #[test]
    fn s_sets_of_the_three_component_example() {
        let d = xyz();
        let report = s_sets(&d, &xyz_partition(), &xset(&[1, 2])).unwrap();
        assert_eq!(report.s_t, ids(["m", "xz", "yz"]));
        assert_eq!(report.s_a, ids(["m", "xz"]));
        assert_eq!(report.s1bar_t, Some(ids(["xz", "yz"])));
        assert_eq!(report.s1_t, Some(ids(["xz", "yz"])));
        assert_eq!(report.s1_a, Some(ids(["xz"])));
        assert_eq!(report.s1_t_primes, Some(Finite(2)));
        assert_eq!(report.s1_a_primes, Some(Finite(2)));
    }

    #[test]
    fn s_sets_of_the_split_example() {
        let d = split();
        let report = s_sets(&d, &split_partition(), &xset(&[1, 2])).unwrap();
        assert_eq!(report.s_t, ids(["m", "p1z", "p2z"]));
        assert_eq!(report.s_a, ids(["m", "p1z"]));
        assert_eq!(report.s1_t, Some(ids(["p1z", "p2z"])));
        assert_eq!(report.s1_a, Some(ids(["p1z"])));
        assert_eq!(report.s1_t_primes, Some(Finite(2)));
        assert_eq!(report.s1_a_primes, Some(Finite(2)));
    }

    #[test]
    fn s_sets_of_the_four_component_example() {
        let d = xyzw();
        let report = s_sets(&d, &xyzw_partition(), &xset(&[1, 2])).unwrap();
        assert_eq!(report.s1bar_t, Some(ids(["m", "xyw", "yzw"])));
        assert_eq!(report.s1_t, Some(ids(["xyw", "yzw"])));
        assert_eq!(report.s1_t_primes, Some(Finite(2)));
        assert_eq!(report.s1_a_primes, Some(Finite(2)));
    }

    #[test]
    fn singleton_x_skips_the_height_one_sets() {
        let d = xyz();
        let report = s_sets(&d, &xyz_partition(), &xset(&[1])).unwrap();
        assert_eq!(report.s_t, ids(["bx", "by", "m", "xy", "xz", "yz"]));
        assert_eq!(report.s1bar_t, None);
        assert_eq!(report.s1_t, None);
        assert_eq!(report.s1_a, None);
    }

    #[test]
    fn s_sets_validate_their_input() {
        let d = xyz();
        assert!(matches!(
            s_sets(&d, &xyz_partition(), &BTreeSet::new()),
            Err(Error::EmptyX)
        ));
        assert!(matches!(
            s_sets(&d, &xyz_partition(), &xset(&[1, 3])),
            Err(Error::XOutOfRange { index: 3, m: 2 })
        ));
    }

    #[test]
    fn fiber_reports_name_the_subcollection_as_maximal() {
        let d = xyz();
        let report = fiber_report(&d, &xyz_partition(), 1).unwrap();
        assert_eq!(report.class, ids(["x", "y"]));
        assert_eq!(report.maximal_elements, ids(["x", "y"]));

        let chain = chain4();
        let p = MinfeasiblePartition::new(vec![n("big")], vec![vec![n("big")]]);
        let report = fiber_report(&chain, &p, 1).unwrap();
        assert_eq!(report.class, ids(["a", "big", "q"]));
        assert_eq!(report.maximal_elements, ids(["big"]));
    }

    #[test]
    fn split_fiber_reports() {
        let d = split();
        let report = fiber_report(&d, &split_partition(), 1).unwrap();
        assert_eq!(report.class, ids(["p1", "p2"]));
        assert_eq!(report.maximal_elements, ids(["p1", "p2"]));
    }
}
