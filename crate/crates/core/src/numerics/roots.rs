//! Bracketed root refinement: a secant accelerator wrapped in a bisection
//! safeguard. Deterministic for fixed inputs.

use crate::error::{Error, Result};

/// Find a root of `f` in `[a, b]`. Requires a sign change. Stops when either
/// `|f| <= tol` or the bracket width drops below `tol`.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (mut a, mut b) = bracket;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { a, b, fa, fb });
    }

    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        // Secant candidate from the bracket endpoints; fall back to the
        // midpoint when it degenerates or leaves the (shrunken) bracket.
        let mid = 0.5 * (a + b);
        let denom = fb - fa;
        let mut x = if denom != 0.0 { b - fb * (b - a) / denom } else { mid };
        let inner = 0.01 * (b - a).abs();
        if !x.is_finite() || (x - a).abs() < inner || (b - x).abs() < inner {
            x = mid;
        }
        let fx = f(x);
        if fx == 0.0 || fx.abs() <= tol && (b - a).abs() <= tol.sqrt() {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}
