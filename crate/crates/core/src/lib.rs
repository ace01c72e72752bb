//! Complexified Iwasawa projection on the classical symmetric spaces
//! SL(n,ℝ)/SO(n) and Sp(n,ℝ)/U(n), with Monte-Carlo verifiers for the
//! complex convexity theorem and its consequences for crown domains.
//!
//! The crate is `no_std` (it needs `alloc`). IO, thread pools and report
//! serialization live in the `crown` companion crate.

#![no_std]
// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cartan;
pub mod convexity;
pub mod domains;
pub mod error;
pub mod iwasawa;
pub mod lie;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod siegel;
pub mod weyl;

pub use cartan::{CartanVector, ComplexCartan};
pub use error::{CrownError, Result};
pub use iwasawa::{CrownPoint, IwasawaFactors};
pub use lie::{build_group, CovectorIA, Family, GroupContext, GroupSpec};
pub use report::{Outcome, Probe, Status, VerificationReport, Witness};
pub use weyl::{HullVerdict, OmegaSpec, OrbitPolytope};
