//! Certified evaluation of trigonometric intersection-number formulas and
//! Jacobi theta identities.
//!
//! Everything here runs in ball arithmetic: exact dyadic midpoints with
//! rigorously rounded radii, so a result is never silently wrong — it is
//! either an enclosure tight enough to certify (typically pinning down an
//! integer), or an error asking for more precision.  Quantities defined by
//! large symmetric sums are streamed in lexicographic order and reduced in
//! fixed-size blocks, which keeps results bit-identical between the parallel
//! and sequential code paths.

pub mod ball;
pub mod combin;
pub mod error;
pub(crate) mod reduce;
pub mod theta;
pub mod verlinde;

pub use ball::{
    certify_integer, exp_2pi_i_rational, pi, two_sin_pi_rational, Ball, CertifiedInteger,
    ComplexBall, Dyadic, Mag,
};
pub use error::{Error, Result};
pub use verlinde::EvalOptions;
