//! Complex-analytic building blocks of one background: the square-root
//! bookkeeping across the band cuts, the products `Y`, `G`, `H`, and the
//! spectral weight `g` with its sign rule on the upper cut.

use crate::bands::BandStructure;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Point of evaluation: either a genuine complex energy off the spectrum, or
/// a real λ on the closed spectrum approached from one side of the cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralPoint {
    Off(Complex64),
    Upper(f64),
    Lower(f64),
}

impl SpectralPoint {
    pub fn real(x: f64) -> Self {
        SpectralPoint::Off(Complex64::new(x, 0.0))
    }

    pub fn z(&self) -> Complex64 {
        match *self {
            SpectralPoint::Off(z) => z,
            SpectralPoint::Upper(l) | SpectralPoint::Lower(l) => Complex64::new(l, 0.0),
        }
    }

    /// Sign of the infinitesimal imaginary offset used to resolve square
    /// roots of on-axis arguments: +1 above the cut, -1 below.
    pub fn im_hint(&self) -> f64 {
        match *self {
            SpectralPoint::Lower(_) => -1.0,
            SpectralPoint::Off(z) if z.im < 0.0 => -1.0,
            _ => 1.0,
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            SpectralPoint::Off(z) => SpectralPoint::Off(z.conj()),
            SpectralPoint::Upper(l) => SpectralPoint::Lower(l),
            SpectralPoint::Lower(l) => SpectralPoint::Upper(l),
        }
    }

    pub fn is_on_cut(&self) -> bool {
        matches!(self, SpectralPoint::Upper(_) | SpectralPoint::Lower(_))
    }
}

/// Principal square root with an explicit side convention on the negative
/// real axis, immune to signed-zero surprises: arguments with zero imaginary
/// part and negative real part map to `hint * i * sqrt(|w|)`.
pub fn branch_sqrt(w: Complex64, hint: f64) -> Complex64 {
    if w.im != 0.0 {
        w.sqrt()
    } else if w.re >= 0.0 {
        Complex64::new(w.re.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, hint.signum() * (-w.re).sqrt())
    }
}

/// Evaluation flags: the caller asked for a point sitting on a pole or a
/// square-root singularity of the requested object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointFlag {
    None,
    /// z coincides with a retained divisor point (gap index, 1-based).
    AtDivisor(usize),
    /// z coincides with a retained band edge (edge index).
    AtEdge(usize),
}

/// Snapshot of the Dirichlet divisor at one x: gap positions and sheet signs.
#[derive(Debug, Clone)]
pub struct DivisorState {
    /// μ_j, one per retained gap (entry j-1 is gap j); closed gaps carry the
    /// pinned edge value.
    pub mu: Vec<f64>,
    /// σ_j ∈ {-1, +1}.
    pub sigma: Vec<f64>,
}

/// The branch of √Y analytic off the spectrum, anchored so that the weight
/// `g = -G/(2 Y_half)` satisfies `Im g(λ+i0) > 0` on every band.
///
/// Built as per-factor principal roots grouped into band pairs (each pair is
/// analytic off its band) times a global sign; the grouping makes the parity
/// of factors left of z come out automatically.
pub fn y_half(bands: &BandStructure, p: SpectralPoint) -> Complex64 {
    let z = p.z();
    let hint = p.im_hint();
    let mut acc = -Complex64::ONE;
    // A closed gap contributes a plain double zero to Y; its square root is
    // the linear factor (z - E)/E with no cut attached.
    for j in bands.closed_gaps() {
        let e = bands.gap(j).0;
        acc *= (z - e) / e;
    }
    // Branch factors pair across bands of the effective structure, so each
    // pair is analytic off its band.
    let eff = bands.effective_edges();
    let pairs = (eff.len() - 1) / 2;
    for j in 0..pairs {
        acc *= branch_sqrt(z - eff[2 * j], hint) * branch_sqrt(z - eff[2 * j + 1], hint)
            / eff[2 * j + 1];
    }
    // Half-infinite band [E_{2N}, ∞): the argument is negated, so the side
    // hint flips.
    acc * branch_sqrt(eff[2 * pairs] - z, -hint)
}

/// Y(z) itself (entire expression, no branch issues).
pub fn y_full(bands: &BandStructure, z: Complex64) -> Complex64 {
    let edges = bands.edges();
    let mut acc = -(z - edges[0]);
    for j in 1..=bands.gap_count() {
        acc *= (z - edges[2 * j - 1]) * (z - edges[2 * j]) / (edges[2 * j - 1] * edges[2 * j - 1]);
    }
    acc
}

/// G(z, x) = Π_j (z - μ_j(x)) / E_{2j-1} over retained gaps.
pub fn g_product(bands: &BandStructure, div: &DivisorState, z: Complex64) -> Complex64 {
    let mut acc = Complex64::ONE;
    for j in 1..=bands.gap_count() {
        acc *= (z - div.mu[j - 1]) / bands.gap(j).0;
    }
    acc
}

/// dG/dz at z = μ_j (real since all μ are real).
fn g_prime_at_mu(bands: &BandStructure, div: &DivisorState, j: usize) -> f64 {
    let mut acc = 1.0 / bands.gap(j).0;
    for k in 1..=bands.gap_count() {
        if k == j {
            continue;
        }
        acc *= (div.mu[j - 1] - div.mu[k - 1]) / bands.gap(k).0;
    }
    acc
}

/// H(z, x) = (1/2) dG/dx via the divisor summation form:
/// `Σ_j σ_j Y_half(μ_j) / (dG/dz(μ_j) (z - μ_j))` times G, evaluated in the
/// pole-free product arrangement so that z = μ_j is harmless.
pub fn h_product(bands: &BandStructure, div: &DivisorState, z: Complex64) -> Complex64 {
    let n = bands.gap_count();
    let mut acc = Complex64::ZERO;
    for j in 1..=n {
        if bands.gap_width(j) == 0.0 {
            // Pinned divisor: dμ/dx = 0, no contribution.
            continue;
        }
        let mu_j = div.mu[j - 1];
        let yh = y_half(bands, SpectralPoint::real(mu_j));
        debug_assert!(yh.im.abs() <= 1e-10 * (1.0 + yh.re.abs()), "Y_half real in gaps");
        let a_j = div.sigma[j - 1] * yh.re / (g_prime_at_mu(bands, div, j) * bands.gap(j).0);
        let mut rest = Complex64::ONE;
        for k in 1..=n {
            if k == j {
                continue;
            }
            rest *= (z - div.mu[k - 1]) / bands.gap(k).0;
        }
        acc += a_j * rest;
    }
    acc
}

/// All three products at once, with a flag when z sits on a divisor point or
/// band edge of this background.
pub struct BandProducts {
    pub y_half: Complex64,
    pub g: Complex64,
    pub h: Complex64,
    pub flag: PointFlag,
}

pub fn band_products(bands: &BandStructure, div: &DivisorState, p: SpectralPoint) -> BandProducts {
    let z = p.z();
    let mut flag = PointFlag::None;
    if z.im == 0.0 {
        if let Some(k) = bands.edges().iter().position(|&e| e == z.re) {
            flag = PointFlag::AtEdge(k);
        }
        for (i, &mu) in div.mu.iter().enumerate() {
            if bands.gap_width(i + 1) > 0.0 && z.re == mu {
                flag = PointFlag::AtDivisor(i + 1);
            }
        }
    }
    BandProducts {
        y_half: y_half(bands, p),
        g: g_product(bands, div, z),
        h: h_product(bands, div, z),
        flag,
    }
}

/// Spectral weight `g(λ) = -G(λ, 0) / (2 Y_half(λ))` for λ on the spectrum
/// (side-tagged). At a band edge the weight blows up like `(λ-E)^(-1/2)` and
/// the flag is set with the value left infinite.
pub fn spectral_weight(bands: &BandStructure, div0: &DivisorState, p: SpectralPoint) -> (Complex64, PointFlag) {
    let yh = y_half(bands, p);
    let g = g_product(bands, div0, p.z());
    if yh == Complex64::ZERO {
        return (Complex64::new(f64::INFINITY, f64::INFINITY), flag_edge(bands, p.z().re));
    }
    (-g / (2.0 * yh), PointFlag::None)
}

fn flag_edge(bands: &BandStructure, x: f64) -> PointFlag {
    match bands.edges().iter().position(|&e| e == x) {
        Some(k) => PointFlag::AtEdge(k),
        None => PointFlag::None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bands::LevitanParams;
    use approx::assert_abs_diff_eq;

    fn free() -> BandStructure {
        BandStructure::free(0.0)
    }

    fn one_gap() -> BandStructure {
        BandStructure::new(vec![0.0, 1.0, 2.0], LevitanParams::default()).unwrap()
    }

    fn empty_div() -> DivisorState {
        DivisorState { mu: vec![], sigma: vec![] }
    }

    #[test]
    fn free_case_products_at_minus_one() {
        let b = free();
        let d = empty_div();
        let p = band_products(&b, &d, SpectralPoint::real(-1.0));
        assert_abs_diff_eq!(y_full(&b, Complex64::new(-1.0, 0.0)).re, 1.0, epsilon = 1e-15);
        // Analytic branch anchored by the upper-cut sign rule: Y_half = i√z
        // in the free case, so Y_half(-1) = -1.
        assert_abs_diff_eq!(p.y_half.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y_half.im, 0.0, epsilon = 1e-15);
        assert_eq!(p.g, Complex64::ONE);
        assert_eq!(p.h, Complex64::ZERO);
    }

    #[test]
    fn one_gap_y_at_three() {
        // Y(3) = -3·2·1/1² = -6, and Y_half² = Y.
        let b = one_gap();
        let z = Complex64::new(3.0, 0.0);
        assert_abs_diff_eq!(y_full(&b, z).re, -6.0, epsilon = 1e-13);
        let yh = y_half(&b, SpectralPoint::Upper(3.0));
        assert_abs_diff_eq!((yh * yh).re, -6.0, epsilon = 1e-13);
        assert_abs_diff_eq!((yh * yh).im, 0.0, epsilon = 1e-13);
        assert!(yh.im > 0.0, "upper-cut Y_half on the top band is +i·positive");
    }

    #[test]
    fn y_half_vanishes_at_edges() {
        let b = one_gap();
        for &e in b.edges() {
            let v = y_half(&b, SpectralPoint::real(e));
            assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn free_spectral_weight_values() {
        let b = free();
        let d = empty_div();
        let (g1, f1) = spectral_weight(&b, &d, SpectralPoint::Upper(1.0));
        assert_eq!(f1, PointFlag::None);
        assert_abs_diff_eq!(g1.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g1.im, 0.5, epsilon = 1e-15);
        let (g4, _) = spectral_weight(&b, &d, SpectralPoint::Upper(4.0));
        assert_abs_diff_eq!(g4.im, 0.25, epsilon = 1e-15);
        // Edge: singular flag.
        let (_, fe) = spectral_weight(&b, &d, SpectralPoint::Upper(0.0));
        assert_eq!(fe, PointFlag::AtEdge(0));
    }

    #[test]
    fn sign_rule_holds_on_both_bands_of_one_gap() {
        let b = one_gap();
        let d = DivisorState { mu: vec![1.5], sigma: vec![1.0] };
        for &l in &[0.1, 0.5, 0.9, 2.1, 3.0, 9.0] {
            let (g, _) = spectral_weight(&b, &d, SpectralPoint::Upper(l));
            assert!(g.im > 0.0, "Im g({l}+i0) = {} must be positive", g.im);
            // Conjugation on the two sides of the cut.
            let (gl, _) = spectral_weight(&b, &d, SpectralPoint::Lower(l));
            assert_abs_diff_eq!(gl.re, g.re, epsilon = 1e-14);
            assert_abs_diff_eq!(gl.im, -g.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn h_matches_finite_difference_of_g_along_flow_direction() {
        // H = (1/2) dG/dx is checked properly in the background tests; here
        // pin the sum form at the divisor point itself: H(μ_j, x) = σ_j Y_half(μ_j).
        let b = one_gap();
        let d = DivisorState { mu: vec![1.3], sigma: vec![-1.0] };
        let h = h_product(&b, &d, Complex64::new(1.3, 0.0));
        let yh = y_half(&b, SpectralPoint::real(1.3));
        assert_abs_diff_eq!(h.re, -yh.re, epsilon = 1e-13);
        assert_abs_diff_eq!(h.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn divisor_pole_flag_reported() {
        let b = one_gap();
        let d = DivisorState { mu: vec![1.5], sigma: vec![1.0] };
        let p = band_products(&b, &d, SpectralPoint::real(1.5));
        assert_eq!(p.flag, PointFlag::AtDivisor(1));
        let q = band_products(&b, &d, SpectralPoint::real(1.4));
        assert_eq!(q.flag, PointFlag::None);
    }

    #[test]
    fn y_half_below_ground_is_analytic_continuation() {
        // For z < E_0 the branch must continue i√z-like behavior: approaching
        // the real axis from above and below gives the same real value.
        let b = one_gap();
        for &x in &[-2.0, -0.5, -10.0] {
            let above = y_half(&b, SpectralPoint::Off(Complex64::new(x, 1e-9)));
            let below = y_half(&b, SpectralPoint::Off(Complex64::new(x, -1e-9)));
            let on = y_half(&b, SpectralPoint::real(x));
            assert!((above - on).norm() < 1e-6 * on.norm());
            assert!((below - on).norm() < 1e-6 * on.norm());
            assert_abs_diff_eq!(on.im, 0.0, epsilon = 1e-14);
        }
    }
}
