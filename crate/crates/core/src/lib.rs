//! Diagonalizability diagnostics for dense real matrices.
//!
//! The pipeline computes a numerical rank and a clustered spectrum, applies
//! the rank/eigenvalue necessary and sufficient conditions, and escalates to
//! algebraic-vs-geometric multiplicity comparison when those are
//! inconclusive. The [`ionet`] module applies the same test to input-output
//! expenditure-share matrices before any eigendecomposition-based shock
//! analysis.

pub mod diagnostics;
pub mod error;
pub mod fixtures;
pub mod ionet;
pub mod linalg;
pub mod matrix;
pub mod policy;
pub mod spectral;

pub use diagnostics::{
    classify_full, classify_two_step, det_check_warning, eigendecompose, necessary_check, sufficient_check,
    zero_rank_bound, Analysis, BoundReport, Eigenbasis, Evidence, Outcome, Reason, Verdict, WarningReport,
};
pub use error::{Error, Result};
pub use matrix::{CMatrix, ComplexScalar, Matrix};
pub use policy::{ResolvedTolerances, Threshold, TolerancePolicy};
pub use spectral::{EigenCluster, MultiplicityRecord, Spectrum};
