//! One almost-periodic (truncated) infinite-gap background: the Dirichlet
//! divisor, its Dubrovin flow in x, and the trace-formula potential.
//!
//! The flow is integrated in angle variables `μ_j = E_{2j-1} + Δ_j sin²(θ_j/2)`,
//! which removes the square-root stiffness at the gap edges: θ_j is strictly
//! increasing and the sheet sign is `σ_j = sign(sin θ_j)`, flipping exactly
//! when μ_j touches an edge. Trajectories are cached on a uniform x grid with
//! cubic Hermite dense output (the flow derivative is known exactly at the
//! nodes).

use crate::bands::BandStructure;
use crate::error::{Error, Result};
use crate::numerics::{integrate_checkpoints, CubicHermite};
use crate::spectral::{spectral_weight, DivisorState, SpectralPoint};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which half axis the background describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    /// +1 for the plus side, -1 for the minus side: the sign in front of
    /// `Y_half` in the Weyl function of this side.
    pub fn sign(&self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

/// One Dirichlet datum: gap index (1-based), position in the closed gap, and
/// sheet sign.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DirichletDatum {
    pub gap: usize,
    pub mu: f64,
    pub sigma: i8,
}

/// The full divisor: one datum per retained gap.
pub type Divisor = Vec<DirichletDatum>;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlowSettings {
    /// Local error tolerance of the flow integration.
    pub tol: f64,
    /// Half-width of the cached x interval.
    pub x_span: f64,
    /// Cache grid step.
    pub x_step: f64,
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self { tol: 1e-10, x_span: 20.0, x_step: 0.05 }
    }
}

/// A background operator ready for evaluation: band structure, initial
/// divisor, and the cached divisor flow.
pub struct Background {
    bands: BandStructure,
    side: Side,
    settings: FlowSettings,
    initial: DivisorState,
    /// Hermite interpolants of θ_j(x), one per open gap, over the cache grid.
    theta: Vec<CubicHermite>,
    /// 1-based indices of the open gaps, aligned with `theta`.
    open_gaps: Vec<usize>,
}

impl Background {
    /// Build the background and cache the divisor flow on
    /// `[-x_span, x_span]`. Verifies the upper-cut sign rule of the spectral
    /// weight on a probe grid before returning.
    pub fn new(bands: BandStructure, divisor: &Divisor, side: Side, settings: FlowSettings) -> Result<Self> {
        let n = bands.gap_count();
        if divisor.len() != n {
            return Err(Error::DivisorLength { got: divisor.len(), expected: n });
        }
        let mut mu0 = vec![0.0; n];
        let mut sigma0 = vec![1.0; n];
        for d in divisor {
            if d.gap == 0 || d.gap > n {
                return Err(Error::Config(format!("divisor gap index {} out of range", d.gap)));
            }
            let (a, b) = bands.gap(d.gap);
            if d.mu < a || d.mu > b {
                return Err(Error::DivisorOutsideGap { gap: d.gap, mu: d.mu, lo: a, hi: b });
            }
            mu0[d.gap - 1] = d.mu;
            sigma0[d.gap - 1] = f64::from(d.sigma.signum() as i8).max(-1.0).min(1.0);
            if d.sigma == 0 {
                sigma0[d.gap - 1] = 1.0;
            }
        }
        let initial = DivisorState { mu: mu0, sigma: sigma0 };

        let open_gaps: Vec<usize> = (1..=n).filter(|&j| bands.gap_width(j) > 0.0).collect();
        let theta0: Vec<f64> = open_gaps
            .iter()
            .map(|&j| {
                let (a, b) = bands.gap(j);
                theta_from_mu(initial.mu[j - 1], initial.sigma[j - 1], a, b)
            })
            .collect();

        let theta = cache_flow(&bands, &open_gaps, &theta0, &settings)?;
        let bg = Self { bands, side, settings, initial, theta, open_gaps };
        bg.verify_sign_rule()?;
        Ok(bg)
    }

    pub fn bands(&self) -> &BandStructure {
        &self.bands
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn settings(&self) -> FlowSettings {
        self.settings
    }

    pub fn initial_divisor(&self) -> &DivisorState {
        &self.initial
    }

    pub fn x_span(&self) -> f64 {
        self.settings.x_span
    }

    /// Divisor at x from the cached trajectories (fresh integration when x
    /// falls outside the cached span).
    pub fn divisor_at(&self, x: f64) -> DivisorState {
        let n = self.bands.gap_count();
        let mut mu = self.initial.mu.clone();
        let mut sigma = vec![1.0; n];
        if x.abs() <= self.settings.x_span {
            for (idx, &j) in self.open_gaps.iter().enumerate() {
                let th = self.theta[idx].eval(x);
                let (a, b) = self.bands.gap(j);
                mu[j - 1] = mu_from_theta(th, a, b);
                sigma[j - 1] = if th.sin() >= 0.0 { 1.0 } else { -1.0 };
            }
            return DivisorState { mu, sigma };
        }
        // Out-of-cache query: integrate from the nearest cached end.
        let x0 = self.settings.x_span.copysign(x);
        let th0: Vec<f64> = (0..self.open_gaps.len()).map(|i| self.theta[i].eval(x0)).collect();
        let traj = flow_segment(&self.bands, &self.open_gaps, &th0, x0, x, self.settings.tol, &[])
            .expect("divisor flow extension failed");
        let th = traj.states.last().unwrap();
        for (idx, &j) in self.open_gaps.iter().enumerate() {
            let (a, b) = self.bands.gap(j);
            mu[j - 1] = mu_from_theta(th[idx].re, a, b);
            sigma[j - 1] = if th[idx].re.sin() >= 0.0 { 1.0 } else { -1.0 };
        }
        DivisorState { mu, sigma }
    }

    /// Trace-formula potential `p(x) = E_0 + Σ_j (E_{2j-1} + E_{2j} - 2 μ_j(x))`.
    pub fn trace_potential(&self, x: f64) -> f64 {
        let div = self.divisor_at(x);
        trace_from_divisor(&self.bands, &div)
    }

    /// Spectral weight of this background at the initial divisor.
    pub fn weight(&self, p: SpectralPoint) -> Complex64 {
        spectral_weight(&self.bands, &self.initial, p).0
    }

    fn verify_sign_rule(&self) -> Result<()> {
        let eff = self.bands.effective_edges();
        let pairs = (eff.len() - 1) / 2;
        let mut probes = Vec::new();
        for b in 0..pairs {
            let (a, c) = (eff[2 * b], eff[2 * b + 1]);
            for t in [0.21, 0.5, 0.83] {
                probes.push(a + t * (c - a));
            }
        }
        let top = eff[2 * pairs];
        probes.extend([top + 0.37, top + 2.3, top + 17.0]);
        for l in probes {
            let (g, _) = spectral_weight(&self.bands, &self.initial, SpectralPoint::Upper(l));
            if !(g.im > 0.0) || g.re.abs() > 1e-9 * g.im.abs() {
                return Err(Error::Numeric(format!(
                    "upper-cut sign rule violated at λ = {l}: g = {g}"
                )));
            }
        }
        Ok(())
    }
}

/// Trace formula from an explicit divisor state.
pub fn trace_from_divisor(bands: &BandStructure, div: &DivisorState) -> f64 {
    let mut p = bands.e0();
    for j in 1..=bands.gap_count() {
        let (a, b) = bands.gap(j);
        p += a + b - 2.0 * div.mu[j - 1];
    }
    p
}

/// Standalone Dubrovin flow: divisor at `x_target` integrated at tolerance
/// `tol` from the initial data of `bg` (ignores the cache).
pub fn dubrovin_flow(bg: &Background, x_target: f64, tol: f64) -> Result<Divisor> {
    let theta0: Vec<f64> = bg
        .open_gaps
        .iter()
        .map(|&j| {
            let (a, b) = bg.bands.gap(j);
            theta_from_mu(bg.initial.mu[j - 1], bg.initial.sigma[j - 1], a, b)
        })
        .collect();
    let traj = flow_segment(&bg.bands, &bg.open_gaps, &theta0, 0.0, x_target, tol, &[])?;
    let th = traj.states.last().unwrap();
    let mut out = Vec::new();
    for (j, (&mu0, &s0)) in bg.initial.mu.iter().zip(&bg.initial.sigma).enumerate() {
        let gap = j + 1;
        if let Some(idx) = bg.open_gaps.iter().position(|&g| g == gap) {
            let (a, b) = bg.bands.gap(gap);
            let t = th[idx].re;
            out.push(DirichletDatum {
                gap,
                mu: mu_from_theta(t, a, b),
                sigma: if t.sin() >= 0.0 { 1 } else { -1 },
            });
        } else {
            out.push(DirichletDatum { gap, mu: mu0, sigma: if s0 >= 0.0 { 1 } else { -1 } });
        }
    }
    Ok(out)
}

fn mu_from_theta(theta: f64, a: f64, b: f64) -> f64 {
    let s = (0.5 * theta).sin();
    (a + (b - a) * s * s).clamp(a, b)
}

fn theta_from_mu(mu: f64, sigma: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let ratio = ((mu - a) / (b - a)).clamp(0.0, 1.0);
    let th = 2.0 * ratio.sqrt().asin(); // in [0, π]
    if sigma < 0.0 && th > 0.0 && th < std::f64::consts::PI {
        2.0 * std::f64::consts::PI - th
    } else {
        th
    }
}

/// dθ_j/dx for every open gap; strictly positive (the angle only advances).
fn theta_rates(bands: &BandStructure, open_gaps: &[usize], theta: &[f64], out: &mut [f64]) {
    let e0 = bands.e0();
    let mu: Vec<f64> = open_gaps
        .iter()
        .zip(theta)
        .map(|(&j, &th)| {
            let (a, b) = bands.gap(j);
            mu_from_theta(th, a, b)
        })
        .collect();
    for i in 0..open_gaps.len() {
        let mj = mu[i];
        let mut rate = 2.0 * (mj - e0).max(0.0).sqrt();
        for (k, &jk) in open_gaps.iter().enumerate() {
            if k == i {
                continue;
            }
            let (a, b) = bands.gap(jk);
            let prod = (mj - a) * (mj - b);
            rate *= prod.max(0.0).sqrt() / (mj - mu[k]).abs();
        }
        out[i] = rate;
    }
}

fn flow_segment(
    bands: &BandStructure,
    open_gaps: &[usize],
    theta0: &[f64],
    x0: f64,
    x1: f64,
    tol: f64,
    checkpoints: &[f64],
) -> Result<crate::numerics::Trajectory> {
    let dim = open_gaps.len();
    let y0: Vec<Complex64> = theta0.iter().map(|&t| Complex64::new(t, 0.0)).collect();
    let mut rate = vec![0.0; dim];
    let mut th = vec![0.0; dim];
    let rhs = |_x: f64, y: &[Complex64], dy: &mut [Complex64]| {
        for i in 0..dim {
            th[i] = y[i].re;
        }
        theta_rates(bands, open_gaps, &th, &mut rate);
        for i in 0..dim {
            dy[i] = Complex64::new(rate[i], 0.0);
        }
    };
    integrate_checkpoints(rhs, x0, x1, &y0, tol, checkpoints).map_err(|e| match e {
        Error::StepUnderflow { last_x, .. } => Error::FlowTolerance { gap: open_gaps.first().copied().unwrap_or(0), x: last_x },
        other => other,
    })
}

fn cache_flow(
    bands: &BandStructure,
    open_gaps: &[usize],
    theta0: &[f64],
    settings: &FlowSettings,
) -> Result<Vec<CubicHermite>> {
    let dim = open_gaps.len();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let steps = (settings.x_span / settings.x_step).ceil() as usize;
    let grid_pos: Vec<f64> = (0..=steps).map(|i| i as f64 * settings.x_step).collect();
    let grid_neg: Vec<f64> = (0..=steps).map(|i| -(i as f64) * settings.x_step).collect();

    let fwd = flow_segment(bands, open_gaps, theta0, 0.0, grid_pos[steps], settings.tol, &grid_pos)?;
    let bwd = flow_segment(bands, open_gaps, theta0, 0.0, grid_neg[steps], settings.tol, &grid_neg)?;

    // Assemble ascending grid: reversed backward tail + forward.
    let mut xs = Vec::with_capacity(2 * steps + 1);
    let mut thetas: Vec<Vec<f64>> = vec![Vec::with_capacity(2 * steps + 1); dim];
    for (x, state) in bwd.xs.iter().zip(&bwd.states).skip(1).rev() {
        xs.push(*x);
        for i in 0..dim {
            thetas[i].push(state[i].re);
        }
    }
    for (x, state) in fwd.xs.iter().zip(&fwd.states) {
        xs.push(*x);
        for i in 0..dim {
            thetas[i].push(state[i].re);
        }
    }

    let mut rates = vec![0.0; dim];
    let mut th = vec![0.0; dim];
    let mut node_rates: Vec<Vec<f64>> = vec![Vec::with_capacity(xs.len()); dim];
    for m in 0..xs.len() {
        for i in 0..dim {
            th[i] = thetas[i][m];
        }
        theta_rates(bands, open_gaps, &th, &mut rates);
        for i in 0..dim {
            node_rates[i].push(rates[i]);
        }
    }

    Ok((0..dim)
        .map(|i| CubicHermite::new(xs.clone(), thetas[i].clone(), node_rates[i].clone()))
        .collect())
}
