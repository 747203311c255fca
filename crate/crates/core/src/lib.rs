//! Numerical verification kernels for elliptic beta integrals, integral
//! inversions and elliptic hypergeometric sums.
//!
//! The crate evaluates both sides of a family of exact identities — the
//! univariate elliptic beta integral and its A_n / C_n generalizations, a new
//! A_n beta integral, the n = 1 integral inversion and Bailey-type transform,
//! finite elliptic hypergeometric summations, and the theta-function
//! identities underlying their proofs — each side computed along an
//! independent route (torus quadrature with explicit residue corrections on
//! one side, closed-form gamma/theta products on the other), and reports the
//! discrepancy.
//!
//! Building blocks:
//!
//! * [`elliptic`] — theta, elliptic gamma, q-Pochhammer, shifted factorials;
//! * [`quad`] — trapezoidal quadrature on the n-torus and the kappa constants;
//! * [`beta`] — the beta-integral evaluators and admissible-parameter checks;
//! * [`inversion`] — inversion kernels, their factorizations and symmetries,
//!   the n = 1 inversion and Bailey pair transforms;
//! * [`series`] — finite elliptic hypergeometric sums and residue kernels;
//! * [`identities`] — pointwise theta-identity and q-difference checks;
//! * [`sample`] — deterministic admissible-parameter samplers;
//! * [`report`] — machine-readable verification records.

pub mod beta;
pub mod elliptic;
pub mod error;
pub mod identities;
pub mod inversion;
pub mod quad;
pub mod report;
pub mod sample;
pub mod series;

pub use elliptic::{Bases, TruncationPolicy, C64};
pub use error::{Error, Result};
