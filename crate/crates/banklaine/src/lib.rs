//! Numerical toolkit for Bank–Laine functions and complex oscillation.
//!
//! A Bank–Laine function is an entire function `E` with `E'(z) ∈ {-1, 1}`
//! at every zero of `E`. Every such function is the product `E = w1 w2` of
//! linearly independent normalized solutions of `w'' + A w = 0` with an
//! entire coefficient `A`, and the quotient `F = w2 / w1` is locally
//! injective with Schwarzian derivative `S(F) = 2A`. This crate provides
//! the machinery to move between these representations numerically, to
//! measure growth (order, exponent of convergence, Phragmén–Lindelöf
//! indicator), to encode the combinatorics of the relevant Speiser graphs,
//! and to evaluate the quasiconformal interpolation maps used to deform
//! such functions.
//!
//! Scalar types are generic over [`num::Real`] (implemented by `f32` and
//! `f64`); the concrete aliases [`R64`], [`C64`] cover the common case.

pub mod families;
pub mod growth;
pub mod jet;
pub mod num;
pub mod ode;
pub mod qc;
pub mod quad;
pub mod trees;

pub use jet::Jet3;
pub use num::{cx, Cx, Real};
pub use quad::{integrate_along, PathSpec, QuadError, QuadratureResult};
pub use trees::{LabeledTree, TreeError, ValidationReport};

/// Default real scalar.
pub type R64 = f64;
/// Default complex scalar.
pub type C64 = num_complex::Complex<f64>;
