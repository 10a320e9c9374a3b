//! Shared numeric substrate: quadrature with inverse-square-root endpoint
//! singularities, adaptive complex-valued ODE integration, bracketed root
//! refinement, and interpolation helpers.
//!
//! Everything here is a pure function of its inputs after construction and is
//! safe to call from many threads at once.

pub mod interp;
pub mod ode;
pub mod quad;
pub mod roots;

pub use interp::{adaptive_simpson, derivative_uniform, simpson_uniform, CubicHermite, Pchip};
pub use ode::{integrate_checkpoints, integrate_ode, schrodinger_rhs, Trajectory};
pub use quad::{gauss_band_rule, QuadratureRule, SingularEnds};
pub use roots::find_root;
