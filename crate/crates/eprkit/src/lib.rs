//! Toolkit for entailment-preserving first-order logic evaluation: an FOL
//! parser and TPTP serializer, a resolution prover with spurious-proof
//! gating, the EPR / EPR@K / EPR@K-oracle metric family, candidate scoring
//! with a margin ranking loss for learning-to-rank training, and predicate
//! arbitrariness diagnostics.

pub mod arbitrariness;
pub mod dataset;
pub mod entailment;
pub mod external;
pub mod fol;
pub mod metrics;
pub mod prover;
pub mod runner;
pub mod scoring;
pub mod store;
pub mod tptp_input;
