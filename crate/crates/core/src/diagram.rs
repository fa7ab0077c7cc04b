//! Finite cardinality-annotated posets presented by their cover relation.
//!
//! A diagram has a unique maximum node, singleton minimal nodes, and an
//! edge set that is the transitive reduction of the order it presents.
//! Nodes with cardinality above one ("boxes") stand for families of
//! pairwise-incomparable primes that all compare identically to the rest
//! of the diagram, so every order computation can treat a box as a single
//! element.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::card::Cardinality;
use crate::error::{Error, Result};
use crate::ring::RingFlags;

/// Identifier of a diagram node. Ordered lexicographically; every listing
/// in the crate is emitted in this order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl std::borrow::Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// One element of a diagram: a prime, or a box of order-homogeneous primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeNode {
    pub id: NodeId,
    /// Display label, e.g. `(x,y)`. Boxes are usually unlabeled.
    pub label: String,
    pub card: Cardinality,
    /// Ring-theoretic annotations consumed by the characteristic checks.
    pub flags: Option<RingFlags>,
}

impl PrimeNode {
    pub fn new(id: impl Into<NodeId>, label: impl Into<String>, card: Cardinality) -> Self {
        PrimeNode {
            id: id.into(),
            label: label.into(),
            card,
            flags: None,
        }
    }

    pub fn with_flags(mut self, flags: RingFlags) -> Self {
        self.flags = Some(flags);
        self
    }
}

/// Reflexive-transitive order relation as a set of ordered id pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderRelation {
    pairs: BTreeSet<(NodeId, NodeId)>,
}

impl OrderRelation {
    pub fn leq(&self, a: &NodeId, b: &NodeId) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn pairs(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.pairs
    }
}

/// Reflexive-transitive closure of an acyclic edge set over the given nodes.
pub fn closure_of(
    nodes: &BTreeSet<NodeId>,
    edges: &BTreeSet<(NodeId, NodeId)>,
) -> Result<OrderRelation> {
    for (a, b) in edges {
        for end in [a, b] {
            if !nodes.contains(end) {
                return Err(Error::UnknownNode {
                    node: end.to_string(),
                });
            }
        }
    }
    check_acyclic(nodes, edges)?;
    let up = reachability(nodes, edges);
    let mut pairs = BTreeSet::new();
    for (a, reach) in &up {
        pairs.insert((a.clone(), a.clone()));
        for b in reach {
            pairs.insert((a.clone(), b.clone()));
        }
    }
    Ok(OrderRelation { pairs })
}

/// Transitive reduction of an acyclic edge set: drops every edge implied by
/// a longer path. Unique for DAGs.
pub fn transitive_reduction(
    nodes: &BTreeSet<NodeId>,
    edges: &BTreeSet<(NodeId, NodeId)>,
) -> Result<BTreeSet<(NodeId, NodeId)>> {
    check_acyclic(nodes, edges)?;
    let mut reduced = BTreeSet::new();
    for (a, b) in edges {
        if !has_long_path(edges, a, b) {
            reduced.insert((a.clone(), b.clone()));
        }
    }
    Ok(reduced)
}

/// Is there a path from `a` to `b` of length at least two?
fn has_long_path(edges: &BTreeSet<(NodeId, NodeId)>, a: &NodeId, b: &NodeId) -> bool {
    let mut adj: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for (u, v) in edges {
        adj.entry(u).or_default().push(v);
    }
    let mut stack: Vec<&NodeId> = Vec::new();
    let mut seen: BTreeSet<&NodeId> = BTreeSet::new();
    for (u, v) in edges {
        if u == a && v != b {
            if seen.insert(v) {
                stack.push(v);
            }
        }
    }
    // Also paths whose first step reaches `b` later via intermediates that
    // happen to equal `b` are impossible in a DAG, so seeding with the
    // non-`b` successors is enough.
    while let Some(n) = stack.pop() {
        if n == b {
            return true;
        }
        if let Some(next) = adj.get(n) {
            for v in next {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
    }
    false
}

fn check_acyclic(nodes: &BTreeSet<NodeId>, edges: &BTreeSet<(NodeId, NodeId)>) -> Result<()> {
    let mut adj: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for (u, v) in edges {
        adj.entry(u).or_default().push(v);
    }
    // 0 = unvisited, 1 = on stack, 2 = done.
    let mut state: BTreeMap<&NodeId, u8> = nodes.iter().map(|n| (n, 0u8)).collect();
    for start in nodes {
        if state[start] != 0 {
            continue;
        }
        // Iterative DFS keeping an explicit stack of (node, next-child).
        let mut stack: Vec<(&NodeId, usize)> = vec![(start, 0)];
        *state.get_mut(start).unwrap() = 1;
        while let Some((n, i)) = stack.pop() {
            let children = adj.get(n).map(|v| v.as_slice()).unwrap_or(&[]);
            if i < children.len() {
                stack.push((n, i + 1));
                let c = children[i];
                match state[c] {
                    0 => {
                        *state.get_mut(c).unwrap() = 1;
                        stack.push((c, 0));
                    }
                    1 => {
                        return Err(Error::CycleDetected {
                            node: c.to_string(),
                        })
                    }
                    _ => {}
                }
            } else {
                *state.get_mut(n).unwrap() = 2;
            }
        }
    }
    Ok(())
}

/// Strict ancestor sets: for each node, everything strictly above it.
fn reachability(
    nodes: &BTreeSet<NodeId>,
    edges: &BTreeSet<(NodeId, NodeId)>,
) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
    let mut adj: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for (u, v) in edges {
        adj.entry(u).or_default().push(v);
    }
    let mut out: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for n in nodes {
        let mut reach = BTreeSet::new();
        let mut stack: Vec<&NodeId> = adj.get(n).map(|v| v.clone()).unwrap_or_default();
        while let Some(v) = stack.pop() {
            if reach.insert(v.clone()) {
                if let Some(next) = adj.get(v) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        out.insert(n.clone(), reach);
    }
    out
}

/// A finite spectrum diagram: nodes, cover relation, distinguished maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecDiagram {
    nodes: BTreeMap<NodeId, PrimeNode>,
    covers: BTreeSet<(NodeId, NodeId)>,
    max_id: NodeId,
    order: OrderRelation,
}

impl SpecDiagram {
    /// Builds and fully validates a diagram. Rejected inputs: unknown edge
    /// endpoints, cycles, a `max_id` that is not above every node, cards of
    /// zero, boxes in minimal or maximal position, redundant cover edges,
    /// and minimal nodes flagged as non-associated.
    pub fn new(
        nodes: Vec<PrimeNode>,
        covers: Vec<(NodeId, NodeId)>,
        max_id: NodeId,
    ) -> Result<SpecDiagram> {
        let mut map = BTreeMap::new();
        for n in nodes {
            if map.insert(n.id.clone(), n).is_some() {
                let id = map.keys().last().unwrap().clone();
                return Err(Error::Invariant {
                    subject: format!("node `{id}`"),
                    rule: "duplicate node id".into(),
                });
            }
        }
        let ids: BTreeSet<NodeId> = map.keys().cloned().collect();
        if !ids.contains(&max_id) {
            return Err(Error::UnknownNode {
                node: max_id.to_string(),
            });
        }
        let covers: BTreeSet<(NodeId, NodeId)> = covers.into_iter().collect();
        let order = closure_of(&ids, &covers)?;

        for n in map.values() {
            if n.card == Cardinality::Finite(0) {
                return Err(Error::Invariant {
                    subject: format!("node `{}`", n.id),
                    rule: "cardinality must be at least 1".into(),
                });
            }
        }
        for id in &ids {
            if !order.leq(id, &max_id) {
                return Err(Error::Invariant {
                    subject: format!("node `{id}`"),
                    rule: "not below the maximum node".into(),
                });
            }
        }
        if map[&max_id].card != Cardinality::Finite(1) {
            return Err(Error::Invariant {
                subject: format!("node `{max_id}`"),
                rule: "maximum node must be a singleton".into(),
            });
        }
        let reduced = transitive_reduction(&ids, &covers)?;
        if reduced != covers {
            let extra = covers.difference(&reduced).next().unwrap();
            return Err(Error::Invariant {
                subject: format!("edge ({}, {})", extra.0, extra.1),
                rule: "cover edge implied by transitivity".into(),
            });
        }

        let d = SpecDiagram {
            nodes: map,
            covers,
            max_id,
            order,
        };
        for id in d.minimal_nodes() {
            if d.nodes[&id].card != Cardinality::Finite(1) {
                return Err(Error::Invariant {
                    subject: format!("node `{id}`"),
                    rule: "minimal node must be a singleton".into(),
                });
            }
            if let Some(flags) = &d.nodes[&id].flags {
                if flags.associated == Some(false) {
                    return Err(Error::Invariant {
                        subject: format!("node `{id}`"),
                        rule: "minimal node must be associated".into(),
                    });
                }
            }
        }
        Ok(d)
    }

    pub fn node(&self, id: &NodeId) -> Option<&PrimeNode> {
        self.nodes.get(id)
    }

    #[cfg(test)]
    pub(crate) fn set_node_flags(&mut self, id: &NodeId, flags: RingFlags) {
        self.nodes.get_mut(id).expect("node exists").flags = Some(flags);
    }

    pub fn nodes(&self) -> impl Iterator<Item = &PrimeNode> {
        self.nodes.values()
    }

    pub fn ids(&self) -> BTreeSet<NodeId> {
        self.nodes.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn covers(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.covers
    }

    pub fn max_id(&self) -> &NodeId {
        &self.max_id
    }

    /// The reflexive-transitive order presented by the cover relation.
    pub fn closure(&self) -> &OrderRelation {
        &self.order
    }

    /// `a <= b`; false when either id is absent.
    pub fn leq(&self, a: &NodeId, b: &NodeId) -> bool {
        self.order.leq(a, b)
    }

    /// `a < b`.
    pub fn lt(&self, a: &NodeId, b: &NodeId) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: &NodeId, b: &NodeId) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Nodes with nothing strictly below them.
    pub fn minimal_nodes(&self) -> BTreeSet<NodeId> {
        let above: BTreeSet<&NodeId> = self.covers.iter().map(|(_, b)| b).collect();
        self.nodes
            .keys()
            .filter(|id| !above.contains(id))
            .cloned()
            .collect()
    }

    /// All `b` with `a <= b`, including `a`.
    pub fn up_set(&self, a: &NodeId) -> BTreeSet<NodeId> {
        self.nodes
            .keys()
            .filter(|b| self.leq(a, b))
            .cloned()
            .collect()
    }

    /// All `b` with `b <= a`, including `a`.
    pub fn down_set(&self, a: &NodeId) -> BTreeSet<NodeId> {
        self.nodes
            .keys()
            .filter(|b| self.leq(b, a))
            .cloned()
            .collect()
    }

    /// Minimal elements of the common upper bounds of `s`. Nonempty for any
    /// nonempty `s`: the maximum node bounds everything.
    pub fn minimal_upper_bounds(&self, s: &BTreeSet<NodeId>) -> Result<BTreeSet<NodeId>> {
        if s.is_empty() {
            return Err(Error::Invariant {
                subject: "minimal_upper_bounds".into(),
                rule: "S must be nonempty".into(),
            });
        }
        for n in s {
            if !self.nodes.contains_key(n) {
                return Err(Error::UnknownNode {
                    node: n.to_string(),
                });
            }
        }
        let common: BTreeSet<NodeId> = self
            .nodes
            .keys()
            .filter(|b| s.iter().all(|a| self.leq(a, b)))
            .cloned()
            .collect();
        Ok(common
            .iter()
            .filter(|b| !common.iter().any(|c| self.lt(c, b)))
            .cloned()
            .collect())
    }

    /// Merges every group of interior nodes sharing identical strict up- and
    /// down-sets into one box carrying the cardinal sum. Minimal nodes and
    /// the maximum never merge. Idempotent.
    pub fn coalesce(&self) -> SpecDiagram {
        self.coalesce_with_map().0
    }

    /// Like [`coalesce`](Self::coalesce) but also returns where every node
    /// went: old id to the id of the node now holding it.
    pub fn coalesce_with_map(&self) -> (SpecDiagram, BTreeMap<NodeId, NodeId>) {
        let minimals = self.minimal_nodes();
        let mut groups: BTreeMap<(Vec<NodeId>, Vec<NodeId>), Vec<NodeId>> = BTreeMap::new();
        for id in self.nodes.keys() {
            if id == &self.max_id || minimals.contains(id) {
                continue;
            }
            let up: Vec<NodeId> = self.up_set(id).into_iter().filter(|b| b != id).collect();
            let down: Vec<NodeId> = self.down_set(id).into_iter().filter(|b| b != id).collect();
            groups.entry((up, down)).or_default().push(id.clone());
        }

        // Representative id for each node: merged groups collapse onto their
        // lexicographically first member.
        let mut rep: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        let mut merged_card: BTreeMap<NodeId, Cardinality> = BTreeMap::new();
        let mut merged_multi: BTreeSet<NodeId> = BTreeSet::new();
        for members in groups.values() {
            let first = members.iter().min().unwrap().clone();
            let total = Cardinality::sum_all(members.iter().map(|m| self.nodes[m].card));
            for m in members {
                rep.insert(m.clone(), first.clone());
            }
            merged_card.insert(first.clone(), total);
            if members.len() > 1 {
                merged_multi.insert(first.clone());
            }
        }
        for id in self.nodes.keys() {
            rep.entry(id.clone()).or_insert_with(|| id.clone());
        }

        let mut nodes = Vec::new();
        let mut emitted = BTreeSet::new();
        for (id, node) in &self.nodes {
            let r = rep[id].clone();
            if !emitted.insert(r.clone()) {
                continue;
            }
            let card = merged_card.get(&r).copied().unwrap_or(node.card);
            let src = &self.nodes[&r];
            nodes.push(PrimeNode {
                id: r.clone(),
                label: if merged_multi.contains(&r) {
                    String::new()
                } else {
                    src.label.clone()
                },
                card,
                flags: if merged_multi.contains(&r) {
                    None
                } else {
                    src.flags.clone()
                },
            });
        }

        let ids: BTreeSet<NodeId> = nodes.iter().map(|n| n.id.clone()).collect();
        let mut strict = BTreeSet::new();
        for (a, b) in self.order.pairs() {
            let (ra, rb) = (rep[a].clone(), rep[b].clone());
            if ra != rb {
                strict.insert((ra, rb));
            }
        }
        let covers = transitive_reduction(&ids, &strict).expect("merged order stays acyclic");
        let merged =
            SpecDiagram::new(nodes, covers.into_iter().collect(), rep[&self.max_id].clone())
                .expect("coalesced diagram stays valid");
        (merged, rep)
    }

    /// Rebuilds the diagram with each node's cardinality replaced by
    /// `f(node)`; the shape is untouched and revalidated.
    pub fn map_cards(&self, f: impl Fn(&PrimeNode) -> Cardinality) -> Result<SpecDiagram> {
        let nodes = self
            .nodes
            .values()
            .map(|n| PrimeNode {
                card: f(n),
                ..n.clone()
            })
            .collect();
        SpecDiagram::new(
            nodes,
            self.covers.iter().cloned().collect(),
            self.max_id.clone(),
        )
    }

    /// Replaces each box by explicit singleton copies with the box's exact
    /// comparabilities: finite boxes of size at most `box_cap` expand fully,
    /// larger and infinite boxes expand to `box_cap` copies.
    pub fn concretize(&self, box_cap: u64) -> SpecDiagram {
        let cap = box_cap.max(1);
        let mut copies: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        let existing: BTreeSet<&NodeId> = self.nodes.keys().collect();
        let mut nodes = Vec::new();
        for (id, node) in &self.nodes {
            let count = match node.card {
                Cardinality::Finite(1) => {
                    copies.insert(id.clone(), vec![id.clone()]);
                    nodes.push(node.clone());
                    continue;
                }
                Cardinality::Finite(n) => n.min(cap),
                _ => cap,
            };
            // Fresh ids: `{id}#{k}`, with extra separators if that collides.
            let mut sep = "#".to_owned();
            while (1..=count).any(|k| existing.contains(&NodeId(format!("{id}{sep}{k}")))) {
                sep.push('#');
            }
            let mut members = Vec::new();
            for k in 1..=count {
                let cid = NodeId(format!("{id}{sep}{k}"));
                nodes.push(PrimeNode {
                    id: cid.clone(),
                    label: node.label.clone(),
                    card: Cardinality::Finite(1),
                    flags: node.flags.clone(),
                });
                members.push(cid);
            }
            copies.insert(id.clone(), members);
        }
        let mut covers = Vec::new();
        for (a, b) in &self.covers {
            for ca in &copies[a] {
                for cb in &copies[b] {
                    covers.push((ca.clone(), cb.clone()));
                }
            }
        }
        let max_id = copies[&self.max_id][0].clone();
        SpecDiagram::new(nodes, covers, max_id).expect("concretized diagram stays valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::Cardinality::*;
    use crate::testutil::{ids, xyz, xyzw};

    fn n(id: &str) -> NodeId {
        NodeId::from(id)
    }

    #[test]
    fn closure_on_three_component_diagram() {
        let d = xyz();
        assert!(d.leq(&n("x"), &n("xy")));
        assert!(d.leq(&n("xy"), &n("m")));
        assert!(d.leq(&n("x"), &n("bx")));
        assert!(d.leq(&n("bx"), &n("m")));
        assert!(!d.comparable(&n("xy"), &n("bx")));
        assert!(!d.comparable(&n("x"), &n("y")));
        assert!(d.leq(&n("x"), &n("x")));
    }

    #[test]
    fn closure_of_single_node() {
        let nodes: BTreeSet<NodeId> = [n("m")].into();
        let rel = closure_of(&nodes, &BTreeSet::new()).unwrap();
        assert_eq!(rel.pairs().len(), 1);
        assert!(rel.leq(&n("m"), &n("m")));
    }

    #[test]
    fn closure_rejects_cycle() {
        let nodes: BTreeSet<NodeId> = [n("a"), n("b")].into();
        let edges: BTreeSet<_> = [(n("a"), n("b")), (n("b"), n("a"))].into();
        assert!(matches!(
            closure_of(&nodes, &edges),
            Err(Error::CycleDetected { .. })
        ));
    }

    #[test]
    fn reduction_drops_implied_edge() {
        let nodes: BTreeSet<NodeId> = [n("a"), n("b"), n("c")].into();
        let edges: BTreeSet<_> = [(n("a"), n("b")), (n("b"), n("c")), (n("a"), n("c"))].into();
        let reduced = transitive_reduction(&nodes, &edges).unwrap();
        assert_eq!(reduced, [(n("a"), n("b")), (n("b"), n("c"))].into());
    }

    #[test]
    fn reduction_keeps_reduced_set() {
        let nodes: BTreeSet<NodeId> = [n("a"), n("b"), n("c")].into();
        let edges: BTreeSet<_> = [(n("a"), n("b")), (n("b"), n("c"))].into();
        assert_eq!(transitive_reduction(&nodes, &edges).unwrap(), edges);
        let one: BTreeSet<NodeId> = [n("a")].into();
        assert!(transitive_reduction(&one, &BTreeSet::new())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn reduction_is_stable_under_closure() {
        let nodes: BTreeSet<NodeId> = [n("a"), n("b"), n("c"), n("d")].into();
        let edges: BTreeSet<_> = [
            (n("a"), n("b")),
            (n("a"), n("c")),
            (n("b"), n("d")),
            (n("c"), n("d")),
            (n("a"), n("d")),
        ]
        .into();
        let reduced = transitive_reduction(&nodes, &edges).unwrap();
        let back = closure_of(&nodes, &reduced).unwrap();
        let full = closure_of(&nodes, &edges).unwrap();
        assert_eq!(back, full);
    }

    #[test]
    fn diagram_rejects_redundant_cover() {
        let nodes = vec![
            PrimeNode::new("a", "", Finite(1)),
            PrimeNode::new("b", "", Finite(1)),
            PrimeNode::new("m", "", Finite(1)),
        ];
        let covers = vec![(n("a"), n("b")), (n("b"), n("m")), (n("a"), n("m"))];
        let err = SpecDiagram::new(nodes, covers, n("m")).unwrap_err();
        assert!(matches!(err, Error::Invariant { .. }));
    }

    #[test]
    fn diagram_requires_unique_maximum() {
        let nodes = vec![
            PrimeNode::new("a", "", Finite(1)),
            PrimeNode::new("b", "", Finite(1)),
        ];
        let err = SpecDiagram::new(nodes, vec![], n("a")).unwrap_err();
        assert!(matches!(err, Error::Invariant { .. }));
    }

    #[test]
    fn diagram_rejects_box_in_minimal_position() {
        let nodes = vec![
            PrimeNode::new("a", "", Continuum),
            PrimeNode::new("m", "", Finite(1)),
        ];
        let err = SpecDiagram::new(nodes, vec![(n("a"), n("m"))], n("m")).unwrap_err();
        assert!(matches!(err, Error::Invariant { .. }));
    }

    #[test]
    fn minimal_nodes_examples() {
        assert_eq!(xyz().minimal_nodes(), ids(["x", "y", "z"]));
        assert_eq!(xyzw().minimal_nodes(), ids(["xw", "xz", "yw", "yz"]));
        let single =
            SpecDiagram::new(vec![PrimeNode::new("m", "", Finite(1))], vec![], n("m")).unwrap();
        assert_eq!(single.minimal_nodes(), ids(["m"]));
    }

    #[test]
    fn minimal_upper_bounds_on_four_component_diagram() {
        let d = xyzw();
        assert_eq!(
            d.minimal_upper_bounds(&ids(["yz", "yw"])).unwrap(),
            ids(["yzw"])
        );
        assert_eq!(
            d.minimal_upper_bounds(&ids(["xz", "yw"])).unwrap(),
            ids(["m"])
        );
        assert_eq!(
            d.minimal_upper_bounds(&ids(["yzw"])).unwrap(),
            ids(["yzw"])
        );
    }

    #[test]
    fn upper_bound_cover_property() {
        // Everything above all of S is above some minimal upper bound.
        let d = xyzw();
        for a in d.ids() {
            for b in d.ids() {
                let s: BTreeSet<NodeId> = [a.clone(), b.clone()].into_iter().collect();
                let mubs = d.minimal_upper_bounds(&s).unwrap();
                assert!(!mubs.is_empty());
                for c in d.ids() {
                    if s.iter().all(|x| d.leq(x, &c)) {
                        assert!(mubs.iter().any(|m| d.leq(m, &c)));
                    }
                }
            }
        }
    }

    #[test]
    fn coalesce_merges_equivalent_boxes() {
        let nodes = vec![
            PrimeNode::new("q", "", Finite(1)),
            PrimeNode::new("b1", "", Finite(2)),
            PrimeNode::new("b2", "", Finite(3)),
            PrimeNode::new("m", "", Finite(1)),
        ];
        let covers = vec![
            (n("q"), n("b1")),
            (n("q"), n("b2")),
            (n("b1"), n("m")),
            (n("b2"), n("m")),
        ];
        let d = SpecDiagram::new(nodes, covers, n("m")).unwrap();
        let c = d.coalesce();
        assert_eq!(c.len(), 3);
        assert_eq!(c.node(&n("b1")).unwrap().card, Finite(5));
        assert_eq!(c.coalesce(), c);
    }

    #[test]
    fn coalesce_preserves_total_cardinality() {
        let d = xyz();
        let total = Cardinality::sum_all(d.nodes().map(|p| p.card));
        let c = d.coalesce();
        assert_eq!(Cardinality::sum_all(c.nodes().map(|p| p.card)), total);
        // This diagram has no order-equivalent interior nodes.
        assert_eq!(c, d);
    }

    #[test]
    fn concretize_expands_boxes() {
        let d = xyz();
        let c3 = d.concretize(3);
        // Each continuum box becomes three singleton copies.
        assert_eq!(c3.len(), 10 - 3 + 9);
        assert!(c3.node(&n("bx#2")).is_some());
        assert!(c3.nodes().all(|p| p.card == Finite(1)));
        let c = c3.coalesce();
        // Copies re-merge into one interior node per original box.
        assert_eq!(c.len(), d.len());
    }

    #[test]
    fn concretize_caps_finite_boxes() {
        let nodes = vec![
            PrimeNode::new("q", "", Finite(1)),
            PrimeNode::new("b", "", Finite(2)),
            PrimeNode::new("m", "", Finite(1)),
        ];
        let covers = vec![(n("q"), n("b")), (n("b"), n("m"))];
        let d = SpecDiagram::new(nodes, covers, n("m")).unwrap();
        assert_eq!(d.concretize(5).len(), 4); // Finite(2) expands fully.
        assert_eq!(d.concretize(1).len(), 3); // capped at one copy.
    }
}
