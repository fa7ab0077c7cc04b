//! Brute-force cross-checks and instance generation backing the property
//! tests.
//!
//! Everything here is deliberately independent of the main code paths: the
//! quotient relation is recomputed from down-set unions, instances come
//! from a self-contained generator with fixed constants, and small posets
//! can be enumerated exhaustively so the universally quantified statements
//! get complete coverage at small sizes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::card::Cardinality;
use crate::chains::{coheight, verify_chain_theorems, ChainVerdict};
use crate::diagram::{transitive_reduction, NodeId, PrimeNode, SpecDiagram};
use crate::error::{Error, Result};
use crate::partition::{validate_minfeasible, MinfeasiblePartition};
use crate::precompletion::{fiber_report, quotient_order, s_sets, spec_a, Mode, QuotientOrder};

/// Name of the generator algorithm, recorded in oracle output so seeds
/// can be reproduced elsewhere.
pub const PRNG_ALGORITHM: &str = "splitmix64";

/// SplitMix64 with the standard constants, implemented here so that seeds
/// mean the same thing in every environment this tool runs in.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n` (Lemire's multiply-shift with rejection).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform value in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Parameters for instance generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    /// Upper bound on node count, including the maximal node. At least 2.
    pub max_nodes: usize,
    /// Largest cardinality a box may carry.
    pub max_card: Cardinality,
    /// Probability of each candidate cover edge, in `[0, 1]`.
    pub edge_density: f64,
    /// How many randomized tries the partition search spends.
    pub partition_attempts: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            max_nodes: 10,
            max_card: Cardinality::Continuum,
            edge_density: 0.35,
            partition_attempts: 64,
        }
    }
}

/// Deterministically generates a valid diagram from the seed: nodes are
/// layered, edges point upward with the configured density, dead ends
/// attach to the maximal node, and cardinalities respect every position
/// constraint.
pub fn random_diagram(gp: &GenParams) -> SpecDiagram {
    assert!(gp.max_nodes >= 2, "diagrams need at least two nodes");
    let mut rng = SplitMix64::new(gp.seed);
    let below_max = 1 + rng.below(gp.max_nodes as u64 - 1) as usize;
    let layer_count = 1 + rng.below(3);
    let mut layer: Vec<u64> = (0..below_max).map(|_| rng.below(layer_count)).collect();
    if !layer.contains(&0) {
        layer[0] = 0;
    }

    let id = |i: usize| NodeId(format!("n{i}"));
    let max = NodeId::from("m");
    let mut edges: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for i in 0..below_max {
        for j in 0..below_max {
            if layer[i] < layer[j] && rng.chance(gp.edge_density) {
                edges.insert((id(i), id(j)));
            }
        }
    }
    for i in 0..below_max {
        if !edges.iter().any(|(a, _)| *a == id(i)) {
            edges.insert((id(i), max.clone()));
        }
    }

    let mut ids: BTreeSet<NodeId> = (0..below_max).map(id).collect();
    ids.insert(max.clone());
    let covers = transitive_reduction(&ids, &edges).expect("layered edges are acyclic");

    let with_predecessor: BTreeSet<&NodeId> = covers.iter().map(|(_, b)| b).collect();
    let palette = [
        Cardinality::Finite(1),
        Cardinality::Finite(2),
        Cardinality::Finite(3),
        Cardinality::Finite(5),
        Cardinality::Finite(9),
        Cardinality::Aleph0,
        Cardinality::Continuum,
    ];
    let allowed: Vec<Cardinality> = palette.into_iter().filter(|c| *c <= gp.max_card).collect();
    let mut nodes = Vec::new();
    for i in 0..below_max {
        let nid = id(i);
        let card = if with_predecessor.contains(&nid) {
            allowed[rng.below(allowed.len() as u64) as usize]
        } else {
            Cardinality::Finite(1)
        };
        nodes.push(PrimeNode::new(nid, "", card));
    }
    nodes.push(PrimeNode::new(max.clone(), "(M)", Cardinality::Finite(1)));

    SpecDiagram::new(nodes, covers.into_iter().collect(), max)
        .expect("generated diagrams satisfy every invariant")
}

/// Randomized search for a partition passing validation: shuffled
/// candidate antichains with random groupings, up to the configured number
/// of attempts. Returns the first hit.
pub fn random_minfeasible(d: &SpecDiagram, gp: &GenParams) -> Option<MinfeasiblePartition> {
    let mut rng = SplitMix64::new(gp.seed ^ 0xA5A5_A5A5_A5A5_A5A5);
    let candidates: Vec<NodeId> = d
        .ids()
        .into_iter()
        .filter(|n| n != d.max_id() && d.node(n).unwrap().card == Cardinality::Finite(1))
        .collect();
    if candidates.is_empty() {
        return None;
    }
    for _ in 0..gp.partition_attempts {
        let mut pool = candidates.clone();
        rng.shuffle(&mut pool);
        let target = 1 + rng.below(pool.len() as u64) as usize;
        let mut c: Vec<NodeId> = Vec::new();
        for n in pool {
            if c.len() == target {
                break;
            }
            if c.iter().all(|other| !d.comparable(other, &n)) {
                c.push(n);
            }
        }
        c.sort();
        let groups = 1 + rng.below(c.len() as u64) as usize;
        let mut assignment: Vec<usize> = c.iter().map(|_| rng.below(groups as u64) as usize).collect();
        // Renumber groups by first appearance so none is empty.
        let mut seen: Vec<usize> = Vec::new();
        for a in &mut assignment {
            match seen.iter().position(|s| s == a) {
                Some(k) => *a = k,
                None => {
                    seen.push(*a);
                    *a = seen.len() - 1;
                }
            }
        }
        let mut subcollections: Vec<Vec<NodeId>> = vec![Vec::new(); seen.len()];
        for (n, &g) in c.iter().zip(&assignment) {
            subcollections[g].push(n.clone());
        }
        let p = MinfeasiblePartition::new(c, subcollections);
        if let Ok(report) = validate_minfeasible(d, &p) {
            if report.ok() {
                return Some(p);
            }
        }
    }
    None
}

/// The quotient relation recomputed from scratch: class `b` sits below
/// class `a` exactly when the union of down-sets of `a`'s members meets
/// `b`. Shares no code with the primary computation, including the
/// law checks (antisymmetry by direct scan, transitivity by closing the
/// relation and comparing).
pub fn brute_quotient(d: &SpecDiagram, classes: &[BTreeSet<NodeId>]) -> Result<QuotientOrder> {
    let mut assigned: BTreeSet<&NodeId> = BTreeSet::new();
    let mut total = 0usize;
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
        }
        total += class.len();
        assigned.extend(class.iter());
    }
    if assigned.len() != total || assigned.len() != d.len() {
        return Err(Error::NotAPartition {
            detail: "classes overlap or miss nodes".into(),
        });
    }

    let k = classes.len();
    let down_unions: Vec<BTreeSet<NodeId>> = classes
        .iter()
        .map(|class| {
            class
                .iter()
                .flat_map(|n| d.down_set(n))
                .collect::<BTreeSet<NodeId>>()
        })
        .collect();
    let mut relation = BTreeSet::new();
    for a in 0..k {
        for b in 0..k {
            if down_unions[a].iter().any(|x| classes[b].contains(x)) {
                relation.insert((b, a));
            }
        }
    }

    let antisymmetric = (0..k)
        .all(|a| (0..k).all(|b| a == b || !(relation.contains(&(a, b)) && relation.contains(&(b, a)))));
    let mut closed = relation.clone();
    loop {
        let mut next = closed.clone();
        for &(a, b) in &closed {
            for &(c, e) in &closed {
                if b == c {
                    next.insert((a, e));
                }
            }
        }
        if next == closed {
            break;
        }
        closed = next;
    }
    let transitive = closed == relation;

    Ok(QuotientOrder {
        relation,
        antisymmetric,
        transitive,
    })
}

/// One named group of checks inside a [`PropertyReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Outcome of running every cross-check on one instance. Sections run in
/// a fixed order and stop at the first counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub passed: bool,
    pub sections: Vec<SectionResult>,
}

fn card_sum<'a>(d: &SpecDiagram, nodes: impl IntoIterator<Item = &'a NodeId>) -> Cardinality {
    Cardinality::sum_all(nodes.into_iter().map(|n| d.node(n).unwrap().card))
}

fn normalized(sum: Cardinality, mode: Mode) -> Cardinality {
    match mode {
        Mode::Exact => sum,
        Mode::Countable => sum.capped_at_countable(),
    }
}

/// Runs every cross-checkable statement on one instance: quotient
/// agreement with the brute-force relation, spectrum shape, S-set
/// surjectivity and cardinality accounting, fiber maximality, and the
/// chain checks. The first failing section carries its counterexample.
pub fn check_all(d: &SpecDiagram, p: &MinfeasiblePartition, modes: &[Mode]) -> PropertyReport {
    let mut sections = Vec::new();
    let mut failed = false;
    let run = |sections: &mut Vec<SectionResult>,
                   failed: &mut bool,
                   name: &str,
                   body: &mut dyn FnMut() -> std::result::Result<Option<String>, String>| {
        if *failed {
            return;
        }
        match body() {
            Ok(detail) => sections.push(SectionResult {
                name: name.into(),
                passed: true,
                detail,
            }),
            Err(witness) => {
                *failed = true;
                sections.push(SectionResult {
                    name: name.into(),
                    passed: false,
                    detail: Some(witness),
                });
            }
        }
    };

    run(&mut sections, &mut failed, "partition-valid", &mut || {
        let report = validate_minfeasible(d, p).map_err(|e| e.to_string())?;
        if report.ok() {
            Ok(None)
        } else {
            Err(report.violations.join("; "))
        }
    });

    run(&mut sections, &mut failed, "quotient-agreement", &mut || {
        let classes = crate::partition::fiber_classes(d, p).map_err(|e| e.to_string())?;
        let mut class_vec = classes.collapsed.clone();
        for id in &classes.identity {
            class_vec.push([id.clone()].into());
        }
        let fast = quotient_order(d, &class_vec).map_err(|e| e.to_string())?;
        let brute = brute_quotient(d, &class_vec).map_err(|e| e.to_string())?;
        if fast != brute {
            return Err(format!("relation disagreement: {fast:?} vs {brute:?}"));
        }
        Ok(None)
    });

    let m = p.m();
    for &mode in modes {
        run(
            &mut sections,
            &mut failed,
            &format!("spectrum-wellformed-{mode}"),
            &mut || {
                let pre = spec_a(d, p, mode).map_err(|e| e.to_string())?;
                let expected: BTreeSet<NodeId> =
                    (1..=m).map(|i| pre.q_id(i).clone()).collect();
                if pre.base.minimal_nodes() != expected {
                    return Err("fiber points are not exactly the minimal nodes".into());
                }
                if pre.base.coalesce() != pre.base {
                    return Err("coalescing the quotient again changed it".into());
                }
                match mode {
                    Mode::Exact => {
                        if !pre.upper_bound_cards.is_empty() {
                            return Err("exact mode tagged cardinalities as bounds".into());
                        }
                    }
                    Mode::Countable => {
                        for n in &pre.upper_bound_cards {
                            if pre.base.minimal_nodes().contains(n) || n == pre.base.max_id() {
                                return Err(format!("bound tag on endpoint node `{n}`"));
                            }
                        }
                    }
                }
                Ok(None)
            },
        );
    }

    let all_x: Vec<BTreeSet<usize>> = {
        let mut out = Vec::new();
        for mask in 1u32..(1 << m) {
            out.push((1..=m).filter(|i| mask & (1 << (i - 1)) != 0).collect());
        }
        out
    };

    run(&mut sections, &mut failed, "s-set-surjectivity", &mut || {
        let pre = spec_a(d, p, Mode::Exact).map_err(|e| e.to_string())?;
        for x in &all_x {
            let report = s_sets(d, p, x).map_err(|e| e.to_string())?;
            let t_sum = card_sum(d, &report.s_t);
            let a_sum = card_sum(&pre.base, &report.s_a);
            if t_sum != a_sum {
                return Err(format!(
                    "X={x:?}: {t_sum} primes over the subcollections but {a_sum} in the image"
                ));
            }
        }
        Ok(None)
    });

    run(&mut sections, &mut failed, "height-one-counts", &mut || {
        for &mode in modes {
            let pre = spec_a(d, p, mode).map_err(|e| e.to_string())?;
            for x in all_x.iter().filter(|x| x.len() >= 2) {
                let report = s_sets(d, p, x).map_err(|e| e.to_string())?;
                let s1_t = report.s1_t.as_ref().unwrap();
                let s1_a = report.s1_a.as_ref().unwrap();
                let t_sum = normalized(card_sum(d, s1_t), mode);
                let a_sum = card_sum(&pre.base, s1_a);
                if t_sum != a_sum {
                    return Err(format!(
                        "X={x:?} mode {mode}: height-one counts differ, {t_sum} vs {a_sum}"
                    ));
                }
            }
        }
        Ok(None)
    });

    run(&mut sections, &mut failed, "fiber-maximality", &mut || {
        for i in 1..=m {
            fiber_report(d, p, i).map_err(|e| e.to_string())?;
        }
        Ok(None)
    });

    run(&mut sections, &mut failed, "chain-preservation", &mut || {
        for a in d.ids() {
            for b in d.ids() {
                if d.leq(&a, &b)
                    && coheight(d, &a).map_err(|e| e.to_string())?
                        < coheight(d, &b).map_err(|e| e.to_string())?
                {
                    return Err(format!("coheight increases from `{a}` to `{b}`"));
                }
            }
        }
        let pre = spec_a(d, p, Mode::Exact).map_err(|e| e.to_string())?;
        let report = verify_chain_theorems(d, p, &pre).map_err(|e| e.to_string())?;
        match report.verdict {
            ChainVerdict::Verified => Ok(None),
            ChainVerdict::OutOfModel(reason) => Ok(Some(format!("screened: {reason:?}"))),
            ChainVerdict::Failed => Err(format!("chain checks failed: {:?}", report.checks)),
        }
    });

    PropertyReport {
        passed: !failed,
        sections,
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..k).collect();
    permute(&mut items, 0, &mut out);
    out
}

fn permute(items: &mut Vec<usize>, at: usize, out: &mut Vec<Vec<usize>>) {
    if at == items.len() {
        out.push(items.clone());
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, out);
        items.swap(at, i);
    }
}

/// All strict partial orders on `0..k`, one representative per
/// isomorphism class, as transitive strict relations.
fn posets_on(k: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let perms = permutations(k);
    let mut seen: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    let mut out = Vec::new();
    'subset: for mask in 0u32..(1 << pairs.len()) {
        let rel: BTreeSet<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(idx, _)| mask & (1 << idx) != 0)
            .map(|(_, &p)| p)
            .collect();
        for &(a, b) in &rel {
            for &(c, e) in &rel {
                if b == c && !rel.contains(&(a, e)) {
                    continue 'subset;
                }
            }
        }
        let canon: Vec<(usize, usize)> = perms
            .iter()
            .map(|perm| {
                let mut mapped: Vec<(usize, usize)> =
                    rel.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
                mapped.sort();
                mapped
            })
            .min()
            .unwrap();
        if seen.insert(canon.clone()) {
            out.push(canon);
        }
    }
    out
}

/// Every diagram shape with a unique maximal node and at most `max_nodes`
/// nodes, one per isomorphism class, all cardinalities 1. Adjoining a top
/// to each poset on fewer nodes produces exactly these.
pub fn exhaustive_diagrams(max_nodes: usize) -> Vec<SpecDiagram> {
    assert!((1..=7).contains(&max_nodes), "enumeration is exponential");
    let mut out = Vec::new();
    for k in 0..max_nodes {
        for rel in posets_on(k) {
            let id = |i: usize| NodeId(format!("n{i}"));
            let max = NodeId::from("m");
            let mut ids: BTreeSet<NodeId> = (0..k).map(id).collect();
            ids.insert(max.clone());
            let mut edges: BTreeSet<(NodeId, NodeId)> =
                rel.iter().map(|&(a, b)| (id(a), id(b))).collect();
            for i in 0..k {
                if !rel.iter().any(|&(a, _)| a == i) {
                    edges.insert((id(i), max.clone()));
                }
            }
            let covers = transitive_reduction(&ids, &edges).expect("strict orders are acyclic");
            let mut nodes: Vec<PrimeNode> = (0..k)
                .map(|i| PrimeNode::new(id(i), "", Cardinality::Finite(1)))
                .collect();
            nodes.push(PrimeNode::new(max.clone(), "(M)", Cardinality::Finite(1)));
            out.push(
                SpecDiagram::new(nodes, covers.into_iter().collect(), max)
                    .expect("adjoined-top posets are valid diagrams"),
            );
        }
    }
    out
}

fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut assignment = vec![0usize; k];
    grow(&mut assignment, 1, 1, &mut out);
    out
}

fn grow(assignment: &mut Vec<usize>, at: usize, groups: usize, out: &mut Vec<Vec<usize>>) {
    if at == assignment.len() {
        out.push(assignment.clone());
        return;
    }
    for g in 0..=groups {
        assignment[at] = g;
        grow(assignment, at + 1, groups.max(g + 1), out);
    }
}

/// Every partition of every candidate antichain that passes validation,
/// in deterministic order.
pub fn all_valid_partitions(d: &SpecDiagram) -> Vec<MinfeasiblePartition> {
    let candidates: Vec<NodeId> = d
        .ids()
        .into_iter()
        .filter(|n| n != d.max_id() && d.node(n).unwrap().card == Cardinality::Finite(1))
        .collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << candidates.len()) {
        let c: Vec<NodeId> = candidates
            .iter()
            .enumerate()
            .filter(|(idx, _)| mask & (1 << idx) != 0)
            .map(|(_, n)| n.clone())
            .collect();
        let antichain = c
            .iter()
            .enumerate()
            .all(|(i, a)| c.iter().skip(i + 1).all(|b| !d.comparable(a, b)));
        if !antichain {
            continue;
        }
        for assignment in set_partitions(c.len()) {
            let groups = assignment.iter().max().unwrap() + 1;
            let mut subcollections: Vec<Vec<NodeId>> = vec![Vec::new(); groups];
            for (n, &g) in c.iter().zip(&assignment) {
                subcollections[g].push(n.clone());
            }
            let p = MinfeasiblePartition::new(c.clone(), subcollections);
            if let Ok(report) = validate_minfeasible(d, &p) {
                if report.ok() {
                    out.push(p);
                }
            }
        }
    }
    out
}
