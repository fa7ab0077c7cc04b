//! JSON document format for spectrum instances and computed results.
//!
//! A document carries a diagram (`nodes`, `covers`, `max`) and optionally a
//! partition, a characteristic, free-form string metadata, and per-node
//! `"bound": "upper"` tags marking cardinalities that are upper bounds rather
//! than exact counts. Serialization is canonical: object keys appear in
//! sorted order, nodes are sorted by id, covers sort lexicographically, and
//! parsing followed by serializing reproduces the canonical bytes exactly.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::card::Cardinality;
use crate::diagram::{NodeId, PrimeNode, SpecDiagram};
use crate::error::{Error, Result};
use crate::partition::MinfeasiblePartition;
use crate::precompletion::PrecompletionDiagram;
use crate::ring::{Characteristic, RingFlags};

/// A parsed document: the diagram plus whatever optional context it carried.
///
/// Parsing enforces structural invariants (well-formed JSON, acyclicity,
/// cover irredundancy, unique maximum, cardinality rules, ids resolving) and
/// rejects violations outright. Whether a carried partition is actually
/// minfeasible is *not* decided here; that is a judgement on the instance,
/// reported by [`crate::partition::validate_minfeasible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDocument {
    pub diagram: SpecDiagram,
    pub partition: Option<MinfeasiblePartition>,
    pub characteristic: Option<Characteristic>,
    /// Free-form annotations, round-tripped verbatim.
    pub metadata: BTreeMap<String, String>,
    /// Nodes whose cardinality is an upper bound rather than exact.
    pub bounds: BTreeSet<NodeId>,
}

// Wire representations. Field declaration order is alphabetical so that
// serde_json emits sorted keys.

#[derive(Serialize, Deserialize)]
struct NodeRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<String>,
    card: Cardinality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flags: Option<RingFlags>,
    id: NodeId,
    #[serde(default)]
    label: String,
}

#[derive(Serialize, Deserialize)]
struct CharRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct DocRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    characteristic: Option<CharRepr>,
    covers: Vec<(NodeId, NodeId)>,
    max: NodeId,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
    nodes: Vec<NodeRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    partition: Option<MinfeasiblePartition>,
}

fn char_to_repr(ch: &Characteristic) -> CharRepr {
    match *ch {
        Characteristic::ZeroMzZero => CharRepr {
            k: None,
            kind: "zero_mz_zero".into(),
            p: None,
        },
        Characteristic::ZeroMzP { p } => CharRepr {
            k: None,
            kind: "zero_mz_p".into(),
            p: Some(p),
        },
        Characteristic::Prime { p } => CharRepr {
            k: None,
            kind: "prime".into(),
            p: Some(p),
        },
        Characteristic::PrimePower { p, k } => CharRepr {
            k: Some(k),
            kind: "prime_power".into(),
            p: Some(p),
        },
    }
}

fn char_from_repr(repr: &CharRepr) -> Result<Characteristic> {
    let need_p = || {
        repr.p.ok_or_else(|| Error::Invariant {
            subject: "characteristic".into(),
            rule: format!("kind {:?} requires a field \"p\"", repr.kind),
        })
    };
    let ch = match repr.kind.as_str() {
        "zero_mz_zero" => Characteristic::ZeroMzZero,
        "zero_mz_p" => Characteristic::ZeroMzP { p: need_p()? },
        "prime" => Characteristic::Prime { p: need_p()? },
        "prime_power" => Characteristic::PrimePower {
            p: need_p()?,
            k: repr.k.ok_or_else(|| Error::Invariant {
                subject: "characteristic".into(),
                rule: "kind \"prime_power\" requires a field \"k\"".into(),
            })?,
        },
        other => {
            return Err(Error::Invariant {
                subject: "characteristic".into(),
                rule: format!("unknown kind {other:?}"),
            })
        }
    };
    if !matches!(ch, Characteristic::PrimePower { .. }) && repr.k.is_some() {
        return Err(Error::Invariant {
            subject: "characteristic".into(),
            rule: format!("kind {:?} does not take a field \"k\"", repr.kind),
        });
    }
    if matches!(ch, Characteristic::ZeroMzZero) && repr.p.is_some() {
        return Err(Error::Invariant {
            subject: "characteristic".into(),
            rule: "kind \"zero_mz_zero\" does not take a field \"p\"".into(),
        });
    }
    ch.validate()?;
    Ok(ch)
}

/// Parse a JSON document, enforcing every structural invariant.
pub fn parse(text: &str) -> Result<InstanceDocument> {
    let repr: DocRepr = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let mut bounds = BTreeSet::new();
    let mut nodes = Vec::with_capacity(repr.nodes.len());
    for n in repr.nodes {
        match n.bound.as_deref() {
            None => {}
            Some("upper") => {
                bounds.insert(n.id.clone());
            }
            Some(other) => {
                return Err(Error::Invariant {
                    subject: n.id.to_string(),
                    rule: format!("unknown bound tag {other:?}; only \"upper\" is recognized"),
                })
            }
        }
        nodes.push(PrimeNode {
            id: n.id,
            label: n.label,
            card: n.card,
            flags: n.flags,
        });
    }

    let diagram = SpecDiagram::new(nodes, repr.covers, repr.max)?;

    if let Some(p) = &repr.partition {
        for id in p.c.iter().chain(p.subcollections.iter().flatten()) {
            if diagram.node(id).is_none() {
                return Err(Error::UnknownNode {
                    node: id.to_string(),
                });
            }
        }
    }

    let characteristic = match &repr.characteristic {
        Some(c) => Some(char_from_repr(c)?),
        None => None,
    };

    Ok(InstanceDocument {
        diagram,
        partition: repr.partition,
        characteristic,
        metadata: repr.metadata,
        bounds,
    })
}

/// Serialize a document to its canonical bytes (pretty-printed, sorted keys,
/// nodes in id order, trailing newline).
pub fn serialize(doc: &InstanceDocument) -> String {
    let repr = DocRepr {
        characteristic: doc.characteristic.as_ref().map(char_to_repr),
        covers: doc.diagram.covers().iter().cloned().collect(),
        max: doc.diagram.max_id().clone(),
        metadata: doc.metadata.clone(),
        nodes: doc
            .diagram
            .nodes()
            .map(|n| NodeRepr {
                bound: doc
                    .bounds
                    .contains(&n.id)
                    .then(|| "upper".to_string()),
                card: n.card,
                flags: n.flags.clone(),
                id: n.id.clone(),
                label: n.label.clone(),
            })
            .collect(),
        partition: doc.partition.clone(),
    };
    let mut out = serde_json::to_string_pretty(&repr).expect("document serialization cannot fail");
    out.push('\n');
    out
}

/// Package a computed spectrum as a document: the quotient diagram, upper
/// bound tags, and metadata recording the mode, any forced override, and —
/// under `sources.<id>` keys — which original nodes each fiber point or
/// merged node absorbed.
pub fn spectrum_document(pre: &PrecompletionDiagram) -> InstanceDocument {
    let mut metadata = BTreeMap::new();
    metadata.insert("mode".to_string(), pre.mode.to_string());
    if pre.forced {
        metadata.insert("forced".to_string(), "true".to_string());
    }
    for (id, sources) in &pre.provenance {
        if sources.len() > 1 || !sources.contains(id) {
            let joined = sources
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(",");
            metadata.insert(format!("sources.{id}"), joined);
        }
    }
    InstanceDocument {
        diagram: pre.base.clone(),
        partition: None,
        characteristic: None,
        metadata,
        bounds: pre.upper_bound_cards.clone(),
    }
}
