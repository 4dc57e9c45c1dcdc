//! Digital nets over prime fields, Chen–Skriganov constructions, and
//! b-adic Haar and Walsh analysis of their local discrepancy.
//!
//! Coordinates are exact b-adic rationals ([`net::BAdic`]). Digit vectors
//! are least significant first; point digits are most significant first.

pub mod cs;
pub mod error;
pub mod field;
pub mod haar;
pub mod harness;
pub mod linalg;
pub mod net;
pub mod norms;
pub mod walsh;

pub use cs::{cs_generating_matrices, cs_point_set, dual_code, CSParams, CodeSpace, CodeWord};
pub use error::{Error, Result};
pub use field::{FieldElement, Polynomial, PrimeBase};
pub use haar::{besov_quasi_norm, parseval_l2, BesovParams, HaarIndex, NormReport};
pub use net::{dual_set, generate_points, is_net, BAdic, GeneratingMatrices, NetCheck, NetFile, PointSet};
pub use norms::{coeff_bound_audit, disc_eval, scaling_table, warnock_l2, NetFamily};
