//! Direct scattering for one-dimensional Schrödinger operators whose
//! potential is steplike: asymptotic to two different (truncated)
//! almost-periodic infinite-gap backgrounds on the two half-axes.
//!
//! The crate builds the backgrounds (band edges, Dirichlet divisor flow,
//! trace-formula potential, Weyl functions and solutions), integrates the
//! perturbed equation to obtain Jost solutions, computes transmission and
//! reflection coefficients together with the discrete spectrum and norming
//! constants, assembles the Marchenko kernel from its reflection, steplike
//! and discrete parts, solves the Gel'fand-Levitan-Marchenko equation, and
//! closes the loop by reconstructing the potential and checking the
//! transformation-operator identity.

pub mod error;
pub mod numerics;

pub mod background;
pub mod bands;
pub mod spectral;
pub mod weyl;

pub mod jost;
pub mod potential;

pub mod layout;
pub mod scattering;

pub mod glm;

pub mod config;
pub mod pipeline;
pub mod problems;
pub mod report;

pub use error::{Error, Result};

/// Order-preserving parallel map (serial when the `parallel` feature is off).
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
