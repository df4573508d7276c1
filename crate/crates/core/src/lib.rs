//! Numerical probes of the collision Morse index for the α-homogeneous
//! N-body problem: central configurations, spectral criteria, McGehee-type
//! collision coordinates, second-variation witnesses and weak-force checks.

pub mod error;
pub mod io;
pub mod central;
pub mod cli;
pub mod mcgehee;
pub mod morse;
pub mod nbody;
pub mod ode;
pub mod roots;
pub mod spectral;
pub mod weak;

pub use error::{NcolError, Result};
pub use nbody::{Alpha, Configuration, MassVector, TangentVector};

/// max that keeps a NaN, so error diagnostics cannot hide one.
pub(crate) fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
