//! Numerical laboratory for the two-dimensional vorticity equation
//!
//! ```text
//! ∂_t ω + u·∇ω = Δω,    u = K_BS * ω,    K_BS(x) = x^⊥ / (2π|x|²)
//! ```
//!
//! on a truncated square `[-L, L]²`, validated against the Lamb-Oseen vortex.
//! Besides the solver the crate carries the two families of diagnostics used
//! to argue that the Oseen vortex is the only solution emanating from a point
//! vortex: relative entropy / Fisher information in self-similar variables,
//! and symmetric decreasing rearrangements with the domination preorder.
//!
//! Module map:
//!
//! * [`fields`] grids, gridded fields, quadrature, rescaling
//! * [`snapshot`] the `OSN1` binary snapshot format
//! * [`oseen`] closed-form Lamb-Oseen family
//! * [`biot_savart`] free-space velocity recovery by zero-padded FFT convolution
//! * [`rearrangement`] distribution functions, rearrangements, domination
//! * [`solver`] heat / transport splitting in physical and self-similar variables
//! * [`diagnostics`] entropy functionals, inequality slacks, decay verdicts
//! * [`config`], [`scenario`] the command-line layer

pub mod biot_savart;
pub mod config;
pub mod diagnostics;
pub mod fields;
pub mod oseen;
pub mod rearrangement;
pub mod scenario;
pub mod snapshot;
pub mod solver;

mod error;
mod spectral;

pub use error::{Error, Result};
pub use fields::{GridSpec, Point, ScalarField, VectorField};
pub use oseen::Circulation;
