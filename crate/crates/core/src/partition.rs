//! Partitions of an antichain of non-maximal primes into subcollections,
//! and the under/over machinery built on them.
//!
//! A partition is *valid* when every minimal node lies under exactly one
//! subcollection; validity is checked, never assumed, so callers can load
//! and inspect broken partitions.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::card::Cardinality;
use crate::diagram::{NodeId, SpecDiagram};
use crate::error::{Error, Result};

/// An ordered antichain `C` of non-maximal singleton nodes split into
/// `m >= 1` disjoint nonempty subcollections covering `C`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinfeasiblePartition {
    #[serde(rename = "C")]
    pub c: Vec<NodeId>,
    pub subcollections: Vec<Vec<NodeId>>,
}

impl MinfeasiblePartition {
    pub fn new(c: Vec<NodeId>, subcollections: Vec<Vec<NodeId>>) -> Self {
        MinfeasiblePartition { c, subcollections }
    }

    /// Number of subcollections.
    pub fn m(&self) -> usize {
        self.subcollections.len()
    }

    /// Members of the `i`-th subcollection, 1-based.
    ///
    /// Panics when `i` is 0 or exceeds `m`.
    pub fn subcollection(&self, i: usize) -> &[NodeId] {
        assert!(
            (1..=self.m()).contains(&i),
            "subcollection index {i} out of range 1..={}",
            self.m()
        );
        &self.subcollections[i - 1]
    }
}

/// Outcome of validation: empty `violations` means the partition is valid.
/// Warnings flag oddities that do not by themselves reject the input.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the structural rules and the two under-coverage conditions:
/// every minimal node must lie under at least one element of `C`, and all
/// `C`-elements above one minimal node must sit in a single subcollection.
pub fn validate_minfeasible(d: &SpecDiagram, p: &MinfeasiblePartition) -> Result<ValidationReport> {
    for id in p.c.iter().chain(p.subcollections.iter().flatten()) {
        if d.node(id).is_none() {
            return Err(Error::UnknownNode {
                node: id.to_string(),
            });
        }
    }

    let mut report = ValidationReport::default();
    let mut push = |v: String| report.violations.push(v);

    let c_set: BTreeSet<&NodeId> = p.c.iter().collect();
    if c_set.len() != p.c.len() {
        let mut seen = BTreeSet::new();
        for id in &p.c {
            if !seen.insert(id) {
                push(format!("node `{id}` appears more than once in C"));
            }
        }
    }
    if p.c.is_empty() {
        push("C is empty".into());
    }
    if p.subcollections.is_empty() {
        push("no subcollections given".into());
    }
    for (k, sub) in p.subcollections.iter().enumerate() {
        if sub.is_empty() {
            push(format!("subcollection {} is empty", k + 1));
        }
    }
    let mut assigned: BTreeMap<&NodeId, usize> = BTreeMap::new();
    for (k, sub) in p.subcollections.iter().enumerate() {
        for id in sub {
            if !c_set.contains(id) {
                push(format!(
                    "node `{id}` appears in subcollection {} but not in C",
                    k + 1
                ));
            }
            if let Some(first) = assigned.insert(id, k + 1) {
                push(format!(
                    "node `{id}` appears in subcollections {first} and {}",
                    k + 1
                ));
            }
        }
    }
    for id in &p.c {
        if !assigned.contains_key(id) {
            push(format!("node `{id}` in C belongs to no subcollection"));
        }
    }

    for id in &p.c {
        let node = d.node(id).unwrap();
        if node.card != Cardinality::Finite(1) {
            push(format!("node `{id}` in C is not a singleton"));
        }
        if id == d.max_id() {
            push(format!("node `{id}` in C is the maximum node"));
        }
    }
    for a in &p.c {
        for b in &p.c {
            if a < b && d.comparable(a, b) {
                let (lo, hi) = if d.leq(a, b) { (a, b) } else { (b, a) };
                push(format!("C is not an antichain: `{lo}` <= `{hi}`"));
            }
        }
    }

    // Under-coverage of the minimal nodes.
    for q in d.minimal_nodes() {
        let mut homes = BTreeSet::new();
        for (k, sub) in p.subcollections.iter().enumerate() {
            if sub.iter().any(|p_id| d.leq(&q, p_id)) {
                homes.insert(k + 1);
            }
        }
        match homes.len() {
            0 => push(format!("minimal node `{q}` is under no element of C")),
            1 => {}
            _ => {
                let list: Vec<String> = homes.iter().map(|k| k.to_string()).collect();
                push(format!(
                    "minimal node `{q}` is under subcollections {}",
                    list.join(" and ")
                ));
            }
        }
    }

    // A non-minimal node under two subcollections implies a minimal-node
    // violation as well, but name it separately: it is the node whose
    // collapse class would be ambiguous.
    let minimals = d.minimal_nodes();
    for id in d.ids() {
        if minimals.contains(&id) {
            continue;
        }
        let homes: Vec<usize> = (1..=p.m())
            .filter(|&k| {
                p.subcollections[k - 1]
                    .iter()
                    .any(|p_id| d.leq(&id, p_id))
            })
            .collect();
        if homes.len() > 1 {
            let list: Vec<String> = homes.iter().map(|k| k.to_string()).collect();
            report.warnings.push(format!(
                "non-minimal node `{id}` lies under subcollections {}",
                list.join(" and ")
            ));
        }
    }

    Ok(report)
}

/// Nodes lying below (or equal to) some member of the `i`-th subcollection.
pub fn under_set(d: &SpecDiagram, p: &MinfeasiblePartition, i: usize) -> BTreeSet<NodeId> {
    let sub = p.subcollection(i);
    d.ids()
        .into_iter()
        .filter(|n| sub.iter().any(|p_id| d.leq(n, p_id)))
        .collect()
}

/// Nodes strictly above something under the `i`-th subcollection without
/// being under it themselves.
pub fn over_set(d: &SpecDiagram, p: &MinfeasiblePartition, i: usize) -> BTreeSet<NodeId> {
    let under = under_set(d, p, i);
    d.ids()
        .into_iter()
        .filter(|n| !under.contains(n) && under.iter().any(|u| d.lt(u, n)))
        .collect()
}

/// Minimal nodes lying under the `i`-th subcollection.
pub fn minimals_under(d: &SpecDiagram, p: &MinfeasiblePartition, i: usize) -> BTreeSet<NodeId> {
    let under = under_set(d, p, i);
    d.minimal_nodes().intersection(&under).cloned().collect()
}

/// The collapse classes induced by a valid partition: one class per
/// subcollection (its whole under-set) plus a singleton class for every
/// remaining node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberClasses {
    /// `collapsed[i]` is the under-set of subcollection `i + 1`.
    pub collapsed: Vec<BTreeSet<NodeId>>,
    /// Nodes outside every under-set; each forms its own class.
    pub identity: BTreeSet<NodeId>,
}

impl FiberClasses {
    /// Total number of classes.
    pub fn class_count(&self) -> usize {
        self.collapsed.len() + self.identity.len()
    }
}

/// Splits the node set into collapse classes. Fails with `PartitionInvalid`
/// when validation reports violations; for valid partitions the under-sets
/// are pairwise disjoint, so the result is a genuine partition of the nodes.
pub fn fiber_classes(d: &SpecDiagram, p: &MinfeasiblePartition) -> Result<FiberClasses> {
    let report = validate_minfeasible(d, p)?;
    if !report.ok() {
        return Err(Error::PartitionInvalid {
            violations: report.violations,
        });
    }
    let collapsed: Vec<BTreeSet<NodeId>> = (1..=p.m()).map(|i| under_set(d, p, i)).collect();
    let mut taken = BTreeSet::new();
    for class in &collapsed {
        for id in class {
            let fresh = taken.insert(id.clone());
            debug_assert!(fresh, "under-sets of a valid partition are disjoint");
        }
    }
    let identity = d
        .ids()
        .into_iter()
        .filter(|id| !taken.contains(id))
        .collect();
    Ok(FiberClasses {
        collapsed,
        identity,
    })
}
