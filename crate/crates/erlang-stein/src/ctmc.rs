//! Exact stationary law of the birth-death chain on the scaled grid
//! `x_k = δ(k − x(∞))`, generator evaluation and the moment-bound suites.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Model, ModelParams, Regime};
use crate::special::{CompensatedSum, compensated_sum};

/// Largest moment order supported with plain double accumulation.
pub const MAX_MOMENT_ORDER: u32 = 20;

/// Relative perturbation a truncated tail may cause in any reported moment.
pub const MOMENT_TAIL_REL: f64 = 1e-8;

/// Truncation controls for [`stationary_pmf_with`].
#[derive(Debug, Clone, Copy)]
pub struct StationaryOptions {
    pub tail_tol: f64,
    /// Moments up to this order are certified at construction time.
    pub certify_order: u32,
    pub max_states: usize,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self {
            tail_tol: 1e-14,
            certify_order: 2,
            max_states: 100_000_000,
        }
    }
}

/// Which side of the kink `−ζ` a moment is restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    All,
    /// `x ≤ −ζ`, i.e. `k ≤ n`.
    BelowNegZeta,
    /// `x ≥ −ζ`, i.e. `k ≥ n`.
    AboveNegZeta,
}

impl Region {
    #[inline]
    fn contains(self, k: usize, n: u64) -> bool {
        match self {
            Region::All => true,
            Region::BelowNegZeta => (k as u64) <= n,
            Region::AboveNegZeta => (k as u64) >= n,
        }
    }
}

/// Optional shift applied before taking the absolute power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shift {
    None,
    PlusZeta,
}

/// Truncated stationary pmf of the chain.
#[derive(Debug, Clone)]
pub struct DiscreteStationary {
    pub model: Model,
    pub k_max: usize,
    pub log_pmf: Vec<f64>,
    pub pmf: Vec<f64>,
    /// `P(X ≤ k)`.
    pub cdf: Vec<f64>,
    /// `P(X > k)` within the truncated support.
    pub sf: Vec<f64>,
    /// Certified bound on the discarded probability mass.
    pub tail_bound: f64,
    /// Ratio `λ/d(k_max + 1)` dominating every discarded step.
    tail_ratio: f64,
}

/// Builds the stationary pmf with default options and the given tail tolerance.
pub fn stationary_pmf(params: ModelParams, tail_tol: f64) -> Result<DiscreteStationary> {
    stationary_pmf_with(
        params,
        StationaryOptions {
            tail_tol,
            ..StationaryOptions::default()
        },
    )
}

pub fn stationary_pmf_with(params: ModelParams, opts: StationaryOptions) -> Result<DiscreteStationary> {
    if !(opts.tail_tol > 0.0 && opts.tail_tol < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_tol",
            value: opts.tail_tol,
            reason: "must lie in (0, 1)",
        });
    }
    if opts.certify_order > MAX_MOMENT_ORDER {
        return Err(Error::MomentOrder {
            order: opts.certify_order,
            max: MAX_MOMENT_ORDER,
        });
    }
    let params = ModelParams::new(params.lambda, params.mu, params.n, params.alpha)?;
    let model = params.derive();
    let lambda = params.lambda;
    let ln_lambda = lambda.ln();

    let mut log_w: Vec<f64> = vec![0.0];
    let mut acc = CompensatedSum::new();
    let mut run_max = 0.0f64;
    // log Σ w_k relative to the running max, maintained incrementally
    let mut scaled_mass = 1.0f64;
    let ln_tol = opts.tail_tol.ln();
    let mut target_extra: Option<usize> = None;

    loop {
        let k = log_w.len() - 1;
        let q = lambda / model.departure_rate(k as u64 + 1);
        if target_extra.is_none() && q < 1.0 {
            let lw = log_w[k];
            let ln_z = run_max + scaled_mass.ln();
            let bound = lw + q.ln() - (-q).ln_1p() - ln_z;
            if bound < ln_tol {
                // mass is certified; now make sure moments are too
                let dist = finalize(model, &log_w, q)?;
                match dist.moment_tail_excess(opts.certify_order) {
                    None => return Ok(dist),
                    Some(_) => {
                        let extra = (log_w.len() / 2).max(64);
                        target_extra = Some(log_w.len() + extra);
                    }
                }
            }
        }
        if let Some(t) = target_extra {
            if log_w.len() >= t {
                let kk = log_w.len() - 1;
                let qq = lambda / model.departure_rate(kk as u64 + 1);
                let dist = finalize(model, &log_w, qq)?;
                match dist.moment_tail_excess(opts.certify_order) {
                    None => return Ok(dist),
                    Some(_) => {
                        let extra = (log_w.len() / 2).max(64);
                        target_extra = Some(log_w.len() + extra);
                    }
                }
            }
        }
        if log_w.len() >= opts.max_states {
            return Err(Error::TooManyStates { cap: opts.max_states });
        }
        let step = ln_lambda - model.departure_rate(k as u64 + 1).ln();
        acc.add(step);
        let next = acc.value();
        if next > run_max {
            scaled_mass = scaled_mass * (run_max - next).exp() + 1.0;
            run_max = next;
        } else {
            scaled_mass += (next - run_max).exp();
        }
        log_w.push(next);
    }
}

fn finalize(model: Model, log_w: &[f64], tail_ratio: f64) -> Result<DiscreteStationary> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ln_z = max + compensated_sum(log_w.iter().map(|&l| (l - max).exp())).ln();
    let log_pmf: Vec<f64> = log_w.iter().map(|&l| l - ln_z).collect();
    let pmf: Vec<f64> = log_pmf.iter().map(|&l| l.exp()).collect();
    let k_max = pmf.len() - 1;
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut s = CompensatedSum::new();
    for &p in &pmf {
        s.add(p);
        cdf.push(s.value());
    }
    let mut sf = vec![0.0; pmf.len()];
    let mut s = CompensatedSum::new();
    for k in (0..k_max).rev() {
        s.add(pmf[k + 1]);
        sf[k] = s.value();
    }
    let q = tail_ratio;
    let tail_bound = if q < 1.0 {
        pmf[k_max] * q / (1.0 - q)
    } else {
        f64::INFINITY
    };
    Ok(DiscreteStationary {
        model,
        k_max,
        log_pmf,
        pmf,
        cdf,
        sf,
        tail_bound,
        tail_ratio: q,
    })
}

impl DiscreteStationary {
    pub fn len(&self) -> usize {
        self.pmf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pmf.is_empty()
    }

    #[inline]
    pub fn x(&self, k: usize) -> f64 {
        self.model.scaled_state(k as u64)
    }

    /// Scaled grid points for every retained state.
    pub fn grid(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.x(k)).collect()
    }

    /// Mode of the pmf.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for k in 1..self.len() {
            if self.log_pmf[k] > self.log_pmf[best] {
                best = k;
            }
        }
        best
    }

    /// Bound on the discarded contribution to `E|X̃ + shift|^m` over `k > k_max`.
    fn moment_tail(&self, m: u32, shift: f64) -> f64 {
        let q = self.tail_ratio;
        if q >= 1.0 {
            return f64::INFINITY;
        }
        let base = (self.x(self.k_max) + shift).abs();
        let d = self.model.delta;
        let nu = self.pmf[self.k_max];
        if m == 0 {
            return nu * q / (1.0 - q);
        }
        // terms t_j = ν_K q^j (base + jδ)^m have ratios at most r for j ≥ j0
        let mf = m as f64;
        let mut j0 = 1.0f64;
        loop {
            let r = q * (1.0 + d / (base + j0 * d)).powf(mf);
            if r < 1.0 {
                let mut head = 0.0;
                let mut j = 1.0;
                while j < j0 {
                    head += q.powf(j) * (base + j * d).powf(mf);
                    j += 1.0;
                }
                let first = q.powf(j0) * (base + j0 * d).powf(mf);
                return nu * (head + first / (1.0 - r));
            }
            j0 = (j0 * 2.0).max(j0 + 1.0);
            if j0 > 1e9 {
                return f64::INFINITY;
            }
        }
    }

    /// `Some(order)` for the first order up to `max_order` whose tail is not certified.
    fn moment_tail_excess(&self, max_order: u32) -> Option<u32> {
        let mass = self.tail_bound;
        if !(mass.is_finite()) {
            return Some(0);
        }
        for m in 1..=max_order {
            let tail = self.moment_tail(m, 0.0);
            let val = self.raw_moment_unchecked(m, Region::All, 0.0);
            if !(tail <= MOMENT_TAIL_REL * val + 1e-300) {
                return Some(m);
            }
        }
        None
    }

    fn raw_moment_unchecked(&self, m: u32, region: Region, shift: f64) -> f64 {
        let n = self.model.n();
        let mut terms: Vec<f64> = (0..self.len())
            .filter(|&k| region.contains(k, n))
            .map(|k| {
                let v = (self.x(k) + shift).abs();
                self.pmf[k] * if m == 0 { 1.0 } else { v.powi(m as i32) }
            })
            .collect();
        terms.sort_by(|a, b| a.total_cmp(b));
        compensated_sum(terms)
    }

    /// `E[|g(X̃)|^m 1(region)]` with `g(x) = x` or `x + ζ`.
    pub fn moment(&self, m: u32, region: Region, shift: Shift) -> Result<f64> {
        if m > MAX_MOMENT_ORDER {
            return Err(Error::MomentOrder {
                order: m,
                max: MAX_MOMENT_ORDER,
            });
        }
        let s = match shift {
            Shift::None => 0.0,
            Shift::PlusZeta => self.model.zeta,
        };
        let val = self.raw_moment_unchecked(m, region, s);
        let tail = if region == Region::BelowNegZeta && self.k_max as u64 >= self.model.n() {
            0.0
        } else {
            self.moment_tail(m, s)
        };
        // a one-sided moment is certified on the scale of the full one
        let scale = if region == Region::All {
            val
        } else {
            val.max(self.raw_moment_unchecked(m, Region::All, s))
        };
        if !(tail <= MOMENT_TAIL_REL * scale + 1e-300) {
            return Err(Error::TruncationInsufficient {
                order: m,
                bound: if scale > 0.0 { tail / scale } else { tail },
            });
        }
        Ok(val)
    }

    /// Signed `E[X̃^m]`.
    pub fn signed_moment(&self, m: u32) -> Result<f64> {
        self.moment(m, Region::All, Shift::None)?;
        let mut terms: Vec<f64> = (0..self.len())
            .map(|k| self.pmf[k] * self.x(k).powi(m as i32))
            .collect();
        terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        Ok(compensated_sum(terms))
    }

    /// Unscaled mean `Σ k ν_k`.
    pub fn mean_count(&self) -> f64 {
        compensated_sum((0..self.len()).map(|k| k as f64 * self.pmf[k]))
    }

    /// `E f(X̃)` over the retained support.
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        compensated_sum((0..self.len()).map(|k| self.pmf[k] * f(self.x(k))))
    }

    /// `P(X ≤ n)`, the probability that no customer waits.
    pub fn idle_probability(&self) -> f64 {
        let n = self.model.n() as usize;
        if n >= self.len() {
            1.0
        } else {
            self.cdf[n]
        }
    }

    /// First and last indices whose probability is at least `floor`.
    pub fn support_window(&self, floor: f64) -> (usize, usize) {
        let lo = self.pmf.iter().position(|&p| p >= floor).unwrap_or(0);
        let hi = self.pmf.iter().rposition(|&p| p >= floor).unwrap_or(self.k_max);
        (lo, hi)
    }
}

/// `G_X̃ f(x_k)` from the one-step increments `f(x_k + δ) − f(x_k)` and `f(x_k − δ) − f(x_k)`.
#[inline]
pub fn generator_from_increments(model: &Model, k: u64, up: f64, down: f64) -> f64 {
    let d = model.departure_rate(k);
    let down_part = if d == 0.0 { 0.0 } else { d * down };
    model.lambda() * up + down_part
}

/// `G_X̃ f(x_k) = λ(f(x_k+δ) − f(x_k)) + d(k)(f(x_k−δ) − f(x_k))`.
pub fn apply_generator<F: Fn(f64) -> f64>(model: &Model, f: F, k: u64) -> f64 {
    let x = model.scaled_state(k);
    let fx = f(x);
    let up = f(x + model.delta) - fx;
    let down = if k == 0 { 0.0 } else { f(x - model.delta) - fx };
    generator_from_increments(model, k, up, down)
}

/// Residual of the Stein identity together with the tolerance it should meet.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SteinResidual {
    pub residual: f64,
    pub tolerance: f64,
}

/// `|Σ_k ν_k G_X̃ f(x_k)|` over the retained support.
pub fn stein_identity_residual<F: Fn(f64) -> f64>(dist: &DiscreteStationary, f: F) -> SteinResidual {
    let model = &dist.model;
    let mut acc = CompensatedSum::new();
    let mut scale = 0.0;
    let mut last_up = 0.0f64;
    for k in 0..dist.len() {
        let g = apply_generator(model, &f, k as u64);
        let t = dist.pmf[k] * g;
        scale += t.abs();
        acc.add(t);
        if k == dist.k_max {
            let x = dist.x(k);
            last_up = f(x + model.delta) - f(x);
        }
    }
    // the truncated sum telescopes to λ ν_K (f(x_{K+1}) − f(x_K))
    let boundary = model.lambda() * dist.pmf[dist.k_max] * last_up.abs();
    SteinResidual {
        residual: acc.value().abs(),
        tolerance: 1e-12 + 64.0 * f64::EPSILON * scale + boundary,
    }
}

/// Windowed variant driven by an increment oracle; states with `ν_k < floor`
/// are skipped.
pub fn stein_identity_residual_increments<F>(
    dist: &DiscreteStationary,
    floor: f64,
    mut increments: F,
) -> Result<SteinResidual>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let model = &dist.model;
    let (lo, hi) = dist.support_window(floor);
    let mut acc = CompensatedSum::new();
    let mut scale = 0.0;
    let mut edge = 0.0;
    for k in lo..=hi {
        let (up, down) = increments(dist.x(k))?;
        let t = dist.pmf[k] * generator_from_increments(model, k as u64, up, down);
        scale += t.abs();
        acc.add(t);
        if k == hi {
            edge += model.lambda() * dist.pmf[k] * up.abs();
        }
        if k == lo && k > 0 {
            edge += model.departure_rate(k as u64) * dist.pmf[k] * down.abs();
        }
    }
    Ok(SteinResidual {
        residual: acc.value().abs(),
        tolerance: 1e-12 + 64.0 * f64::EPSILON * scale + edge,
    })
}

/// One row of a moment-bound or gradient-bound report.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl BoundRow {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            satisfied: holds(lhs, rhs),
        }
    }
}

/// `lhs ≤ rhs` up to rounding slack; `rhs = +∞` always holds.
#[inline]
pub fn holds(lhs: f64, rhs: f64) -> bool {
    lhs.is_finite() && (rhs == f64::INFINITY || lhs <= rhs * (1.0 + 1e-9) + 1e-12)
}

/// Every moment inequality applicable to the regime of `dist`.
pub fn moment_bound_report(dist: &DiscreteStationary) -> Result<Vec<BoundRow>> {
    let m = &dist.model;
    let d = m.delta;
    let d2 = d * d;
    let z = m.zeta.abs();
    let inv_z = if z > 0.0 { 1.0 / z } else { f64::INFINITY };
    let mu = m.mu();
    let al = m.alpha();
    use Region::{AboveNegZeta as Above, BelowNegZeta as Below};
    let e = |k: u32, r: Region, s: Shift| dist.moment(k, r, s);
    let mut rows = Vec::new();
    match m.regime {
        Regime::ErlangC => {
            let sq_below = e(2, Below, Shift::None)?;
            let abs_below = e(1, Below, Shift::None)?;
            let abs_above = e(1, Above, Shift::None)?;
            let idle = e(0, Below, Shift::None)?;
            let c = 4.0 / 3.0 + 2.0 * d2 / 3.0;
            rows.push(BoundRow::new("xsquaredelta", sq_below, c));
            rows.push(BoundRow::new("xminusdelta", abs_below, c.sqrt()));
            rows.push(BoundRow::new("xminuszeta", abs_below, 2.0 * z));
            rows.push(BoundRow::new(
                "xplus",
                abs_above,
                inv_z + d2 * inv_z / 4.0 + d / 2.0,
            ));
            rows.push(BoundRow::new("idle_prob", idle, (2.0 + d) * z));
            if d <= 1.0 {
                let p_above = e(0, Above, Shift::None)?;
                rows.push(BoundRow::new("xplusbound", z * p_above, 1.75));
            }
            let idle_expect = e(1, Below, Shift::PlusZeta)?;
            rows.push(BoundRow {
                name: "idle_expect".into(),
                lhs: idle_expect,
                rhs: z,
                satisfied: (idle_expect - z).abs() <= 1e-9 * z.max(1e-300) + 1e-13,
            });
        }
        Regime::ErlangAUnder => {
            let sq_below = e(2, Below, Shift::None)?;
            let abs_below = e(1, Below, Shift::None)?;
            let abs_above = e(1, Above, Shift::None)?;
            let sh_sq_above = e(2, Above, Shift::PlusZeta)?;
            let sh_above = e(1, Above, Shift::PlusZeta)?;
            let idle = e(0, Below, Shift::None)?;
            let a_over_mu = al / mu;
            let mu_over_a = mu / al;
            let c1 = (a_over_mu * d2 + d2 + 4.0) / 3.0;
            let c2 = (mu_over_a * d2 + mu_over_a * 4.0 + d2) / 3.0;
            rows.push(BoundRow::new("mwuK1", sq_below, c1));
            rows.push(BoundRow::new("mwu1", abs_below, c1.sqrt()));
            rows.push(BoundRow::new("mwu2", abs_below, 2.0 * z + a_over_mu * c2.sqrt()));
            let fac = (mu / mu.min(al)).min(inv_z);
            rows.push(BoundRow::new(
                "mwu3",
                abs_above,
                (1.0 + d2 / 4.0 + d / 2.0 * c1.sqrt()) * fac,
            ));
            rows.push(BoundRow::new("mwuK2", sh_sq_above, c2));
            rows.push(BoundRow::new("mwu4", sh_above, c2.sqrt()));
            rows.push(BoundRow::new(
                "mwu5",
                sh_above,
                inv_z * (d2 / 4.0 * a_over_mu + d2 / 4.0 + 1.0),
            ));
            rows.push(BoundRow::new(
                "mwu6",
                idle,
                (2.0 + d) * (z + a_over_mu * c2.sqrt()),
            ));
        }
        Regime::ErlangAOver => {
            let abs_below = e(1, Below, Shift::None)?;
            let sq_above = e(2, Above, Shift::None)?;
            let abs_above = e(1, Above, Shift::None)?;
            let sh_below = e(1, Below, Shift::PlusZeta)?;
            let sh_sq_below = e(2, Below, Shift::PlusZeta)?;
            let idle = e(0, Below, Shift::None)?;
            let a_over_mu = al / mu;
            let c3 = (d2 + 4.0 * mu / al) / 3.0;
            rows.push(BoundRow::new(
                "mwo7",
                abs_below,
                ((al * d2 / 4.0 + mu) / al.min(mu)).sqrt(),
            ));
            rows.push(BoundRow::new("mwo8", abs_below, inv_z * (d2 / 4.0 + mu / al)));
            rows.push(BoundRow::new("mwo2", sq_above, c3));
            rows.push(BoundRow::new("mwo1", abs_above, c3.sqrt()));
            rows.push(BoundRow::new("mwo3", sh_below, inv_z * (d2 / 4.0 + 1.0)));
            let k1 = d2 / 4.0 * a_over_mu + 1.0;
            rows.push(BoundRow::new("mwoK1", sh_sq_below, k1));
            rows.push(BoundRow::new("mwo4", sh_below, k1.sqrt()));
            rows.push(BoundRow::new("mwo5", sh_below, a_over_mu * c3.sqrt()));
            let inv_zeta = if m.zeta > 0.0 { 1.0 / m.zeta } else { f64::INFINITY };
            rows.push(BoundRow::new(
                "mwo10",
                idle,
                (3.0 + d) * 16.0 / 2f64.sqrt() * (d2 / 4.0 + 1.0) * (inv_zeta.max(a_over_mu)).min(a_over_mu.sqrt()),
            ));
        }
    }
    Ok(rows)
}

/// `P(X(∞) ≤ n)` for each arrival rate, other primitives fixed.
pub fn idle_probability_monotone(mu: f64, n: u64, alpha: f64, lambdas: &[f64], tail_tol: f64) -> Result<Vec<f64>> {
    lambdas
        .iter()
        .map(|&lambda| {
            let params = ModelParams::new(lambda, mu, n, alpha)?;
            Ok(stationary_pmf(params, tail_tol)?.idle_probability())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(l: f64, mu: f64, n: u64, a: f64) -> DiscreteStationary {
        stationary_pmf(ModelParams::new(l, mu, n, a).unwrap(), 1e-14).unwrap()
    }

    #[test]
    fn table_mean_small_system() {
        let d = build(3.0, 1.0, 5, 0.0);
        assert!((d.mean_count() - 3.35).abs() < 0.005);
    }

    #[test]
    fn mass_is_one() {
        let d = build(4.9, 1.0, 5, 0.0);
        assert!((d.moment(0, Region::All, Shift::None).unwrap() - 1.0).abs() < 1e-12);
        assert!(d.tail_bound < 1e-14);
    }

    #[test]
    fn flow_balance() {
        let d = build(12.0, 1.0, 5, 2.0);
        let m = d.model;
        for k in 1..d.len() {
            if d.pmf[k] > 1e-300 {
                let l = m.lambda() * d.pmf[k - 1];
                let r = m.departure_rate(k as u64) * d.pmf[k];
                assert!((l / r - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn generator_kills_constants() {
        let m = Model::new(4.0, 1.0, 5, 0.0).unwrap();
        for k in 0..20 {
            assert_eq!(apply_generator(&m, |_| 3.0, k), 0.0);
        }
    }

    #[test]
    fn mode_brackets_arrival_rate() {
        let d = build(7.3, 1.0, 5, 0.7);
        let k = d.argmax() as u64;
        let m = d.model;
        assert!(m.departure_rate(k) <= m.lambda() && m.lambda() <= m.departure_rate(k + 1));
    }

    #[test]
    fn rejects_high_order() {
        let d = build(3.0, 1.0, 5, 0.0);
        assert!(matches!(
            d.moment(21, Region::All, Shift::None),
            Err(Error::MomentOrder { .. })
        ));
    }
}
