//! Exact Wasserstein and Kolmogorov distances between the scaled chain and
//! its diffusion approximation, plus staffing sweeps.
//!
//! `F_X̃` is a step function, so both distances reduce to sums over the
//! lattice cells `[x_k, x_{k+1})` on which it is constant. Inside a cell the
//! discrepancy `|c − F_Y|` is integrated through the density's segment
//! moments, splitting once at the crossing `F_Y(t) = c`.

use serde::Serialize;

use crate::ctmc::{DiscreteStationary, Region, Shift, stationary_pmf};
use crate::diffusion::{DiffusionDensity, Level};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Regime};
use crate::special::CompensatedSum;

/// `d_K(X̃, Y) = sup_x |F_X̃(x) − F_Y(x)|`.
pub fn kolmogorov_distance(pmf: &DiscreteStationary, d: &DiffusionDensity) -> f64 {
    let len = pmf.len();
    let mut best = d.cdf(pmf.x(0));
    for k in 0..len {
        let x = pmf.x(k);
        let (fy, sy) = (d.cdf(x), d.sf(x));
        // the step's level to the left and at x_k
        let before = if k == 0 { (0.0, 1.0) } else { (pmf.cdf[k - 1], pmf.sf[k - 1]) };
        let at = (pmf.cdf[k], pmf.sf[k]);
        for (c, q) in [before, at] {
            let gap = if c > 0.5 { (q - sy).abs() } else { (c - fy).abs() };
            best = best.max(gap);
        }
    }
    best
}

/// `∫_a^b |c − F_Y|` where `1 − c = q`.
fn cell_area(d: &DiffusionDensity, a: f64, b: f64, c: f64, q: f64) -> f64 {
    let upper = c > 0.5;
    // signed excess of F_Y over c, taken from whichever side is accurate
    let excess = |x: f64| if upper { q - d.sf(x) } else { d.cdf(x) - c };
    let ea = excess(a);
    let eb = excess(b);
    if eb <= 0.0 {
        -eb * (b - a) + d.segment(a, b).from_left
    } else if ea >= 0.0 {
        ea * (b - a) + d.segment(a, b).to_right
    } else {
        let level = if upper { Level::Sf(q) } else { Level::Cdf(c) };
        let t = d.inverse_cdf(level).clamp(a, b);
        d.segment(a, t).from_left + d.segment(t, b).to_right
    }
}

/// `d_W(X̃, Y) = ∫ |F_X̃ − F_Y|`.
pub fn wasserstein_distance(pmf: &DiscreteStationary, d: &DiffusionDensity) -> f64 {
    let len = pmf.len();
    let mut sum = CompensatedSum::new();
    sum.add(d.partial_below(pmf.x(0)));
    for k in 0..len - 1 {
        sum.add(cell_area(d, pmf.x(k), pmf.x(k + 1), pmf.cdf[k], pmf.sf[k]));
    }
    // the retained pmf is normalised, so F_X̃ = 1 beyond the last state
    sum.add(d.partial_above(pmf.x(len - 1)));
    sum.value()
}

/// `|E X(∞) − (x(∞) + √R E Y(∞))|` in customer units.
///
/// Flow balance `E d(X) = λ` and `E b(Y) = 0` turn both centred means into
/// multiples of one-sided moments about the kink `s = −ζ`, so no cancellation
/// between large terms occurs.
pub fn mean_error(pmf: &DiscreteStationary, d: &DiffusionDensity) -> Result<f64> {
    let m = &pmf.model;
    let s = m.switch_point();
    let ratio = m.alpha() / m.mu();
    // certifies the first-moment tail
    pmf.moment(1, Region::All, Shift::None)?;
    let (factor, chain, diffusion) = if m.zeta <= 0.0 {
        (1.0 - ratio, pmf.expect(|x| (x - s).max(0.0)), d.partial_above(s))
    } else {
        (1.0 / ratio - 1.0, pmf.expect(|x| (s - x).max(0.0)), d.partial_below(s))
    };
    Ok(m.r.sqrt() * (factor * (chain - diffusion)).abs())
}

/// Exact `m`-th moment and its diffusion error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentError {
    pub order: u32,
    pub exact_m: f64,
    pub approx_m: f64,
    pub diff_m: f64,
    /// `|ζ|^{m−1}` times `diff_m`.
    pub zeta_scaled: f64,
}

pub fn moment_error(pmf: &DiscreteStationary, d: &DiffusionDensity, m: u32) -> Result<MomentError> {
    let exact_m = pmf.signed_moment(m)?;
    let approx_m = d.signed_moment(m);
    let diff_m = (exact_m - approx_m).abs();
    let z = pmf.model.zeta.abs();
    Ok(MomentError {
        order: m,
        exact_m,
        approx_m,
        diff_m,
        zeta_scaled: z.powi(m as i32 - 1) * diff_m,
    })
}

/// Universal bound constants that hold for every Erlang-C system with `R ≥ 1`.
pub const ERLANG_C_WASSERSTEIN_CONSTANT: f64 = 205.0;
pub const ERLANG_C_KOLMOGOROV_CONSTANT: f64 = 188.0;

/// Both distances for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    pub params: ModelParams,
    pub regime: Regime,
    pub r: f64,
    pub delta: f64,
    pub zeta: f64,
    pub d_w: f64,
    pub d_k: f64,
    pub ratio_w: f64,
    pub ratio_k: f64,
    /// `205δ` for Erlang-C, absent otherwise.
    pub bound_w: Option<f64>,
    /// `188δ` for Erlang-C, absent otherwise.
    pub bound_k: Option<f64>,
    /// `sup ν`, the modulus of continuity of `F_Y`.
    pub density_sup: f64,
    /// `d_K ≤ √(2 sup ν · d_W)`.
    pub dk_dw_consistent: bool,
}

impl DistanceReport {
    /// Whether both Erlang-C bounds hold; `None` when no constant is given.
    pub fn within_bounds(&self) -> Option<bool> {
        match (self.bound_w, self.bound_k) {
            (Some(bw), Some(bk)) => Some(self.d_w <= bw && self.d_k <= bk),
            _ => None,
        }
    }
}

pub fn distance_report(pmf: &DiscreteStationary, d: &DiffusionDensity) -> DistanceReport {
    let m = pmf.model;
    let d_w = wasserstein_distance(pmf, d);
    let d_k = kolmogorov_distance(pmf, d);
    let density_sup = d.density_sup_check().sup;
    let erlang_c = m.regime == Regime::ErlangC;
    DistanceReport {
        params: m.params,
        regime: m.regime,
        r: m.r,
        delta: m.delta,
        zeta: m.zeta,
        d_w,
        d_k,
        ratio_w: d_w / m.delta,
        ratio_k: d_k / m.delta,
        bound_w: erlang_c.then_some(ERLANG_C_WASSERSTEIN_CONSTANT * m.delta),
        bound_k: erlang_c.then_some(ERLANG_C_KOLMOGOROV_CONSTANT * m.delta),
        density_sup,
        dk_dw_consistent: d_k <= (2.0 * density_sup * d_w).sqrt() * (1.0 + 1e-9) + 1e-15,
    }
}

/// Report for raw parameters.
pub fn distances(params: ModelParams, tail_tol: f64) -> Result<DistanceReport> {
    let model = params.derive();
    let pmf = stationary_pmf(params, tail_tol)?;
    let d = DiffusionDensity::new(&model)?;
    Ok(distance_report(&pmf, &d))
}

/// Staffing rule relating `n` to `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Staffing {
    /// `n = ⌈R + βR⌉`.
    Qd,
    /// `n = ⌈R + β√R⌉`.
    Qed,
    /// `n = ⌈R + β⌉`.
    Nds,
}

impl Staffing {
    pub fn servers(self, r: f64, beta: f64) -> f64 {
        match self {
            Staffing::Qd => (r + beta * r).ceil(),
            Staffing::Qed => (r + beta * r.sqrt()).ceil(),
            Staffing::Nds => (r + beta).ceil(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Staffing::Qd => "qd",
            Staffing::Qed => "qed",
            Staffing::Nds => "nds",
        }
    }
}

/// Parameter grid for [`universality_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    /// Offered loads `sizes` staffed by `rule` with `μ` fixed and `α = ratio·μ`.
    Staffed {
        rule: Staffing,
        beta: f64,
        sizes: Vec<f64>,
        mu: f64,
        alpha_over_mu: f64,
    },
    /// Explicit parameter sets.
    Grid(Vec<ModelParams>),
}

impl SweepSpec {
    /// The parameter sets the sweep visits.
    pub fn params(&self) -> Result<Vec<ModelParams>> {
        match self {
            SweepSpec::Grid(p) => Ok(p.clone()),
            SweepSpec::Staffed {
                rule,
                beta,
                sizes,
                mu,
                alpha_over_mu,
            } => {
                if !(beta.is_finite() && *beta > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "beta",
                        value: *beta,
                        reason: "staffing coefficient must be positive",
                    });
                }
                sizes
                    .iter()
                    .map(|&r| {
                        let n = rule.servers(r, *beta);
                        if !(n >= 1.0 && n.is_finite()) {
                            return Err(Error::InvalidParameter {
                                name: "sizes",
                                value: r,
                                reason: "staffing rule gives no servers",
                            });
                        }
                        if *alpha_over_mu == 0.0 && n <= r {
                            return Err(Error::Unstable { r, n: n as u64 });
                        }
                        ModelParams::new(r * mu, *mu, n as u64, alpha_over_mu * mu)
                    })
                    .collect()
            }
        }
    }
}

/// Distance reports over a sweep, ordered by `R` then `n`.
pub fn universality_sweep(spec: &SweepSpec, tail_tol: f64) -> Result<Vec<DistanceReport>> {
    let params = spec.params()?;
    let run = |p: &ModelParams| distances(*p, tail_tol);
    #[cfg(feature = "parallel")]
    let rows: Result<Vec<_>> = {
        use rayon::prelude::*;
        params.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<_>> = params.iter().map(run).collect();
    let mut rows = rows?;
    rows.sort_by(|a, b| {
        a.r.total_cmp(&b.r)
            .then(a.params.n.cmp(&b.params.n))
            .then(a.params.alpha.total_cmp(&b.params.alpha))
    });
    Ok(rows)
}

/// Largest `d_W/δ` and `d_K/δ` over a set of reports.
pub fn max_ratios(rows: &[DistanceReport]) -> (f64, f64) {
    rows.iter()
        .fold((0.0f64, 0.0f64), |(w, k), r| (w.max(r.ratio_w), k.max(r.ratio_k)))
}

/// The standard Erlang-C grid `n ∈ {2, 5, 50, 500}`, `ρ ∈ {0.5, 0.9, 0.99, 0.999}`
/// with `μ = 1`, keeping only `R ≥ 1`.
pub fn erlang_c_standard_grid() -> Vec<ModelParams> {
    let mut out = Vec::new();
    for n in [2u64, 5, 50, 500] {
        for rho in [0.5, 0.9, 0.99, 0.999] {
            let r = rho * n as f64;
            if r >= 1.0 {
                out.push(ModelParams::erlang_c(r, 1.0, n).expect("grid point is stable"));
            }
        }
    }
    out
}
