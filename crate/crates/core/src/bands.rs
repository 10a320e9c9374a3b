//! Band structure of one truncated infinite-gap background: the edge sequence
//! `E_0 < E_1 < ... < E_{2N}` together with the summability parameters of the
//! Levitan class.
//!
//! Bands are `[E_0, E_1], [E_2, E_3], ...` with the last band `[E_{2N}, ∞)`;
//! gaps are `[E_{2j-1}, E_{2j}]` for `j = 1..N`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Summability and gap-growth parameters: exponent `l > 1` for the edge sum,
/// and constants `C > 0`, `alpha > 0` for the gap growth condition
/// `E_{2n+1} - E_{2n-1} > C n^alpha`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LevitanParams {
    pub l: f64,
    pub c: f64,
    pub alpha: f64,
}

impl Default for LevitanParams {
    fn default() -> Self {
        Self { l: 1.5, c: 0.1, alpha: 1.0 }
    }
}

/// Edge sequence of one background with truncation metadata.
///
/// Bands must have positive length; a gap may close (`E_{2j-1} = E_{2j}`), in
/// which case its pair of edges acts as a plain double zero of `Y` and the
/// divisor point is pinned there.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandStructure {
    edges: Vec<f64>,
    pub levitan: LevitanParams,
}

/// Outcome of the Levitan-class checks at the current truncation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Σ_{n≤N} (E_{2n-1})^l (E_{2n} - E_{2n-1})
    pub partial_levitan_sum: f64,
    /// Smallest n with E_{2n+1} - E_{2n-1} <= C n^alpha, if any.
    pub first_gap_growth_violation: Option<usize>,
    pub retained_gaps: usize,
    pub pass: bool,
}

impl BandStructure {
    pub fn new(edges: Vec<f64>, levitan: LevitanParams) -> Result<Self> {
        if edges.is_empty() || edges.len() % 2 == 0 {
            return Err(Error::EvenEdgeCount(edges.len()));
        }
        for i in 1..edges.len() {
            // Odd index: E_{2j+1} closes a band, must be strict. Even index:
            // E_{2j} closes a gap, equality allowed (closed gap).
            let strict = i % 2 == 1;
            if edges[i] < edges[i - 1] || (strict && edges[i] == edges[i - 1]) {
                return Err(Error::NonMonotoneEdges(i));
            }
        }
        if edges[0] < 0.0 {
            return Err(Error::NegativeGroundEdge(edges[0]));
        }
        Ok(Self { edges, levitan })
    }

    /// Free background `σ = [e0, ∞)` with no gaps.
    pub fn free(e0: f64) -> Self {
        Self { edges: vec![e0], levitan: LevitanParams::default() }
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn e0(&self) -> f64 {
        self.edges[0]
    }

    /// Number of retained gaps N.
    pub fn gap_count(&self) -> usize {
        (self.edges.len() - 1) / 2
    }

    /// Closed gap `[E_{2j-1}, E_{2j}]` for `j = 1..=N` (1-based as in the
    /// edge numbering; `gap(1)` is the first gap).
    pub fn gap(&self, j: usize) -> (f64, f64) {
        (self.edges[2 * j - 1], self.edges[2 * j])
    }

    pub fn gap_width(&self, j: usize) -> f64 {
        let (a, b) = self.gap(j);
        b - a
    }

    /// Band `i` for `i = 0..=N`; band `N` is the half-infinite `[E_{2N}, ∞)`
    /// reported with `f64::INFINITY` as its right end.
    pub fn band(&self, i: usize) -> (f64, f64) {
        let n = self.gap_count();
        if i == n {
            (self.edges[2 * n], f64::INFINITY)
        } else {
            (self.edges[2 * i], self.edges[2 * i + 1])
        }
    }

    pub fn band_count(&self) -> usize {
        self.gap_count() + 1
    }

    /// Is λ inside the closed spectrum?
    pub fn on_spectrum(&self, lambda: f64) -> bool {
        if lambda < self.e0() {
            return false;
        }
        !self.in_open_gap(lambda)
    }

    /// Index of the open gap containing λ strictly, if any.
    pub fn open_gap_containing(&self, lambda: f64) -> Option<usize> {
        (1..=self.gap_count()).find(|&j| {
            let (a, b) = self.gap(j);
            lambda > a && lambda < b
        })
    }

    fn in_open_gap(&self, lambda: f64) -> bool {
        self.open_gap_containing(lambda).is_some()
    }

    /// Index of the band whose closed interval contains λ, if any.
    pub fn band_containing(&self, lambda: f64) -> Option<usize> {
        (0..self.band_count()).find(|&i| {
            let (a, b) = self.band(i);
            lambda >= a && lambda <= b
        })
    }

    pub fn is_edge(&self, lambda: f64) -> bool {
        self.edges.iter().any(|&e| e == lambda)
    }

    /// Indices (1-based) of closed gaps.
    pub fn closed_gaps(&self) -> Vec<usize> {
        (1..=self.gap_count()).filter(|&j| self.gap_width(j) == 0.0).collect()
    }

    /// Edge list with closed-gap pairs removed: the branch points of `√Y`.
    pub fn effective_edges(&self) -> Vec<f64> {
        let mut out = vec![self.edges[0]];
        for j in 1..=self.gap_count() {
            let (a, b) = self.gap(j);
            if b > a {
                out.push(a);
                out.push(b);
            }
        }
        out
    }

    /// Levitan-class validation at the current truncation: partial edge sum
    /// and the gap growth inequality for every retained n.
    pub fn validate_levitan(&self) -> ValidationReport {
        let n_gaps = self.gap_count();
        let lv = &self.levitan;
        let mut sum = 0.0;
        for j in 1..=n_gaps {
            let (a, b) = self.gap(j);
            sum += a.powf(lv.l) * (b - a);
        }
        let mut violation = None;
        for n in 1..n_gaps {
            let growth = self.edges[2 * n + 1] - self.edges[2 * n - 1];
            if growth <= lv.c * (n as f64).powf(lv.alpha) {
                violation = Some(n);
                break;
            }
        }
        ValidationReport {
            partial_levitan_sum: sum,
            first_gap_growth_violation: violation,
            retained_gaps: n_gaps,
            pass: violation.is_none() && sum.is_finite(),
        }
    }
}

/// Validate an edge list and build the structure in one step.
pub fn validate_levitan(edges: Vec<f64>, levitan: LevitanParams) -> Result<ValidationReport> {
    Ok(BandStructure::new(edges, levitan)?.validate_levitan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn free_background_passes() {
        let r = validate_levitan(vec![0.0], LevitanParams::default()).unwrap();
        assert!(r.pass);
        assert_eq!(r.retained_gaps, 0);
        assert_eq!(r.partial_levitan_sum, 0.0);
    }

    #[test]
    fn quadratic_edges_partial_sum() {
        // E_{2n-1} = n^2, E_{2n} = n^2 + 4^{-n}, n <= 8, l = 1.5, C = 1, alpha = 1.
        let mut edges = vec![0.0];
        for n in 1..=8 {
            let a = (n * n) as f64;
            edges.push(a);
            edges.push(a + 0.25_f64.powi(n as i32));
        }
        let r = validate_levitan(edges, LevitanParams { l: 1.5, c: 1.0, alpha: 1.0 }).unwrap();
        assert!(r.pass);
        // Σ n^3 4^{-n}, n = 1..8 = 106524/65536
        assert_abs_diff_eq!(r.partial_levitan_sum, 106524.0 / 65536.0, epsilon = 1e-13);
    }

    #[test]
    fn monotonicity_violation_rejected() {
        assert!(matches!(
            validate_levitan(vec![0.0, 2.0, 1.0], LevitanParams::default()),
            Err(Error::NonMonotoneEdges(2))
        ));
    }

    #[test]
    fn negative_ground_edge_rejected() {
        assert!(matches!(
            validate_levitan(vec![-1.0, 0.0, 1.0], LevitanParams::default()),
            Err(Error::NegativeGroundEdge(_))
        ));
    }

    #[test]
    fn even_count_rejected() {
        assert!(matches!(
            validate_levitan(vec![0.0, 1.0], LevitanParams::default()),
            Err(Error::EvenEdgeCount(2))
        ));
    }

    #[test]
    fn gap_growth_violation_detected() {
        // Gaps at (1,2) and (2.05, 3): E_3 - E_1 = 1.05 <= C n^alpha with C = 2.
        let r = validate_levitan(
            vec![0.0, 1.0, 2.0, 2.05, 3.0],
            LevitanParams { l: 1.5, c: 2.0, alpha: 1.0 },
        )
        .unwrap();
        assert_eq!(r.first_gap_growth_violation, Some(1));
        assert!(!r.pass);
    }

    #[test]
    fn band_and_gap_accessors() {
        let b = BandStructure::new(vec![0.0, 1.0, 2.0], LevitanParams::default()).unwrap();
        assert_eq!(b.gap_count(), 1);
        assert_eq!(b.gap(1), (1.0, 2.0));
        assert_eq!(b.band(0), (0.0, 1.0));
        assert_eq!(b.band(1), (2.0, f64::INFINITY));
        assert!(b.on_spectrum(0.5));
        assert!(b.on_spectrum(1.0));
        assert!(!b.on_spectrum(1.5));
        assert!(b.on_spectrum(2.5));
        assert!(!b.on_spectrum(-0.1));
        assert_eq!(b.open_gap_containing(1.5), Some(1));
        assert_eq!(b.band_containing(3.0), Some(1));
    }
}
