//! Cardinality-annotated finite posets standing for prime spectra of
//! complete local rings.
//!
//! The library models a spectrum as a finite diagram: nodes are primes or
//! boxes of order-homogeneous primes carrying a cardinality, edges are
//! cover relations, and one node is the maximal ideal. On top of that it
//! validates partitions of an antichain into subcollections, evaluates the
//! ring-characteristic case analysis, collapses each under-set to a point
//! to predict the spectrum of a precompletion, computes the S-sets shared
//! by both spectra, reports formal fibers, and checks maximal-chain
//! structure. A self-contained oracle cross-checks every operation on
//! enumerated and randomly generated instances.

pub mod card;
pub mod chains;
pub mod diagram;
pub mod doc;
pub mod error;
pub mod oracle;
pub mod partition;
pub mod precompletion;
pub mod render;
pub mod ring;

pub use card::Cardinality;
pub use chains::{
    chain_report, coheight, is_catenary, maximal_chains, verify_chain_theorems, ChainReport,
    ChainVerdict, CheckOutcome, FiberCoheight, MinimalChainSummary, OutOfModelReason,
    TheoremReport,
};
pub use diagram::{
    closure_of, transitive_reduction, NodeId, OrderRelation, PrimeNode, SpecDiagram,
};
pub use doc::{parse, serialize, spectrum_document, InstanceDocument};
pub use error::{Error, Result};
pub use oracle::{
    all_valid_partitions, brute_quotient, check_all, exhaustive_diagrams, random_diagram,
    random_minfeasible, GenParams, PropertyReport, SectionResult, SplitMix64, PRNG_ALGORITHM,
};
pub use partition::{
    fiber_classes, minimals_under, over_set, under_set, validate_minfeasible, FiberClasses,
    MinfeasiblePartition, ValidationReport,
};
pub use precompletion::{
    fiber_report, quotient_order, s_sets, spec_a, spec_a_checked, FiberReport, Mode,
    PrecompletionDiagram, QuotientOrder, SSetReport,
};
pub use render::render_dot;
pub use ring::{
    check_construction_applicability, check_remark_conditions, Applicability, Characteristic,
    ConditionReport, RemarkCase, RingFlags, Verdict,
};

#[cfg(test)]
mod fixture_gen;
