//! Stationary law of the piecewise Ornstein–Uhlenbeck diffusion.
//!
//! The density is two closed-form pieces glued at the kink `s = −ζ`. Each
//! piece is either a Gaussian shape `exp(−(x−m)²/(2σ²))` or an exponential
//! shape `exp(−θx)`. Every probability and partial moment is assembled from
//! one-sided tail integrals written as ratios to the density at the cut, so
//! nothing is formed as a difference of numbers close to one.

use serde::Serialize;

use crate::ctmc::{Region, Shift};
use crate::error::{Error, Result};
use crate::model::{Model, Regime};
use crate::quad::{QuadOptions, integrate};
use crate::special::{
    compensated_sum, gauss_tail_moment_ratios, log_mills, log1mexp, logaddexp, norm_quantile,
    norm_sf_inverse,
};

/// Shape of one density piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Gauss { mean: f64, sd: f64 },
    Expo { rate: f64 },
}

impl Shape {
    /// `ln shape(x) − ln shape(s)`.
    #[inline]
    fn rel(&self, x: f64, s: f64) -> f64 {
        match *self {
            Shape::Gauss { mean, sd } => -(x - s) * (x + s - 2.0 * mean) / (2.0 * sd * sd),
            Shape::Expo { rate } => -rate * (x - s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Integrals of `ν`, `(y − u)ν` and `(v − y)ν` over `[u, v]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SegMoments {
    pub mass: f64,
    pub from_left: f64,
    pub to_right: f64,
}

/// Level passed to the inverse CDF, either as `F` or as `1 − F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Level {
    Cdf(f64),
    Sf(f64),
}

/// Stationary density of `Y(∞)`.
#[derive(Debug, Clone, Serialize)]
pub struct DiffusionDensity {
    pub regime: Regime,
    pub mu: f64,
    pub alpha: f64,
    pub zeta: f64,
    pub switch_point: f64,
    pub left: Shape,
    pub right: Shape,
    /// `ln ν(−ζ)`.
    pub log_p: f64,
    pub log_mass_left: f64,
    pub log_mass_right: f64,
    /// Coefficient of the left piece written as `a₋·shape(x)`.
    pub log_a_minus: f64,
    pub log_a_plus: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    pub mean: f64,
}

fn gauss_log_ratio(sd: f64, z: f64) -> f64 {
    sd.ln() + log_mills(z)
}

fn binom(n: u32, k: u32) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

const QUAD_SEG: QuadOptions = QuadOptions {
    abs_tol: 1e-300,
    rel_tol: 1e-14,
    max_depth: 40,
    max_panels: 20_000,
};

/// `1 − e^{−x}(1 + x)` for `x ≥ 0`.
fn expo_g1(x: f64) -> f64 {
    if x < 0.1 {
        let mut term = x;
        let mut sum = 0.0;
        for k in 2..20 {
            term *= -x / k as f64;
            sum += term * (1 - k) as f64;
        }
        sum
    } else {
        1.0 - (-x).exp() * (1.0 + x)
    }
}

/// `x − 1 + e^{−x}` for `x ≥ 0`.
fn expo_g2(x: f64) -> f64 {
    if x < 0.1 {
        let mut term = -x;
        let mut sum = 0.0;
        for k in 2..20 {
            term *= -x / k as f64;
            sum += term;
        }
        sum
    } else {
        x - 1.0 + (-x).exp()
    }
}

impl DiffusionDensity {
    /// Density for the regime of `model`.
    pub fn new(model: &Model) -> Result<Self> {
        Self::from_parts(model.regime, model.mu(), model.alpha(), model.zeta)
    }

    /// Density from the regime, rates and `ζ` alone.
    pub fn from_parts(regime: Regime, mu: f64, alpha: f64, zeta: f64) -> Result<Self> {
        let s = -zeta;
        let (left, right) = match regime {
            Regime::ErlangC => {
                if !(zeta < 0.0) {
                    return Err(Error::Unsupported {
                        requirement: "ζ < 0 for a normalizable Erlang-C density",
                    });
                }
                (
                    Shape::Gauss { mean: 0.0, sd: 1.0 },
                    Shape::Expo { rate: -zeta },
                )
            }
            Regime::ErlangAUnder => {
                if !(alpha > 0.0 && zeta <= 0.0) {
                    return Err(Error::Unsupported {
                        requirement: "α > 0 and ζ ≤ 0 for the underloaded Erlang-A density",
                    });
                }
                (
                    Shape::Gauss { mean: 0.0, sd: 1.0 },
                    Shape::Gauss {
                        mean: -zeta + mu / alpha * zeta,
                        sd: (mu / alpha).sqrt(),
                    },
                )
            }
            Regime::ErlangAOver => {
                if !(alpha > 0.0 && zeta >= 0.0) {
                    return Err(Error::Unsupported {
                        requirement: "α > 0 and ζ ≥ 0 for the overloaded Erlang-A density",
                    });
                }
                (
                    Shape::Gauss {
                        mean: -zeta + alpha / mu * zeta,
                        sd: 1.0,
                    },
                    Shape::Gauss {
                        mean: 0.0,
                        sd: (mu / alpha).sqrt(),
                    },
                )
            }
        };
        let log_rl = match left {
            Shape::Gauss { mean, sd } => gauss_log_ratio(sd, (mean - s) / sd),
            Shape::Expo { .. } => unreachable!("left piece is always Gaussian"),
        };
        let log_rr = match right {
            Shape::Gauss { mean, sd } => gauss_log_ratio(sd, (s - mean) / sd),
            Shape::Expo { rate } => -rate.ln(),
        };
        let log_p = -logaddexp(log_rl, log_rr);
        let coef = |shape: Shape| match shape {
            Shape::Gauss { mean, sd } => log_p + (s - mean) * (s - mean) / (2.0 * sd * sd),
            Shape::Expo { rate } => log_p + rate * s,
        };
        let log_a_minus = coef(left);
        let log_a_plus = coef(right);
        let mut d = Self {
            regime,
            mu,
            alpha,
            zeta,
            switch_point: s,
            left,
            right,
            log_p,
            log_mass_left: log_p + log_rl,
            log_mass_right: log_p + log_rr,
            log_a_minus,
            log_a_plus,
            a_minus: log_a_minus.exp(),
            a_plus: log_a_plus.exp(),
            mean: 0.0,
        };
        d.mean = d.signed_moment(1);
        Ok(d)
    }

    fn shape(&self, side: Side) -> Shape {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    /// Log of the formula of piece `side` continued to all of ℝ.
    #[inline]
    fn log_piece(&self, side: Side, x: f64) -> f64 {
        self.log_p + self.shape(side).rel(x, self.switch_point)
    }

    /// `κ = ν(0)`: the constant in front of `exp(∫₀ˣ b(y)/μ dy)`.
    pub fn kappa(&self) -> f64 {
        self.pdf(0.0)
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return f64::NEG_INFINITY;
        }
        if x <= self.switch_point {
            self.log_piece(Side::Left, x)
        } else {
            self.log_piece(Side::Right, x)
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// `−(ln ν)′(x) = −b(x)/μ` at non-kink points.
    pub fn neg_log_slope(&self, x: f64) -> f64 {
        let shape = if x <= self.switch_point {
            self.left
        } else {
            self.right
        };
        match shape {
            Shape::Gauss { mean, sd } => (x - mean) / (sd * sd),
            Shape::Expo { rate } => rate,
        }
    }

    /// One-sided moments of the continued piece beyond `t`, scaled by `e^{−lref}`:
    /// `∫ |y − t|^i ν_side(y) dy` for `i = 0..=jmax`, over `y ≥ t` when
    /// `upper` and `y ≤ t` otherwise.
    fn ext_tail(&self, side: Side, t: f64, upper: bool, jmax: usize, lref: f64) -> Vec<f64> {
        let lt = self.log_piece(side, t) - lref;
        match self.shape(side) {
            Shape::Gauss { mean, sd } => {
                let z = if upper { (t - mean) / sd } else { (mean - t) / sd };
                let base = (lt + gauss_log_ratio(sd, z)).exp();
                let w = gauss_tail_moment_ratios(z, jmax);
                let mut out = Vec::with_capacity(jmax + 1);
                let mut pow = 1.0;
                for wi in w {
                    out.push(base * pow * wi);
                    pow *= sd;
                }
                out
            }
            Shape::Expo { rate } => {
                debug_assert!(upper, "exponential piece has no lower tail");
                if !upper {
                    return vec![f64::INFINITY; jmax + 1];
                }
                let base = (lt - rate.ln()).exp();
                let mut out = Vec::with_capacity(jmax + 1);
                let mut c = base;
                for i in 0..=jmax {
                    out.push(c);
                    c *= (i + 1) as f64 / rate;
                }
                out
            }
        }
    }

    /// Segment moments of one piece on one monotone flank.
    fn piece_seg(&self, side: Side, u: f64, v: f64, lref: f64) -> SegMoments {
        let width = v - u;
        if width <= 0.0 {
            return SegMoments::default();
        }
        match self.shape(side) {
            Shape::Expo { rate } => {
                let nu = (self.log_piece(side, u) - lref).exp();
                let x = rate * width;
                let r2 = rate * rate;
                SegMoments {
                    mass: nu * -(-x).exp_m1() / rate,
                    from_left: nu * expo_g1(x) / r2,
                    to_right: nu * expo_g2(x) / r2,
                }
            }
            Shape::Gauss { mean, sd } => {
                if width <= 2.0 * sd {
                    let g = |y: f64| (self.log_piece(side, y) - lref).exp();
                    SegMoments {
                        mass: integrate(g, u, v, QUAD_SEG),
                        from_left: integrate(|y| g(y) * (y - u), u, v, QUAD_SEG),
                        to_right: integrate(|y| g(y) * (v - y), u, v, QUAD_SEG),
                    }
                } else if v <= mean {
                    let lv = self.ext_tail(side, v, false, 1, lref);
                    let lu = self.ext_tail(side, u, false, 1, lref);
                    SegMoments {
                        mass: (lv[0] - lu[0]).max(0.0),
                        from_left: (width * lv[0] - lv[1] + lu[1]).max(0.0),
                        to_right: (lv[1] - lu[1] - width * lu[0]).max(0.0),
                    }
                } else {
                    let tu = self.ext_tail(side, u, true, 1, lref);
                    let tv = self.ext_tail(side, v, true, 1, lref);
                    SegMoments {
                        mass: (tu[0] - tv[0]).max(0.0),
                        from_left: (tu[1] - tv[1] - width * tv[0]).max(0.0),
                        to_right: (width * tu[0] - tu[1] + tv[1]).max(0.0),
                    }
                }
            }
        }
    }

    /// `∫_u^v {1, y − u, v − y} ν(y) dy`, scaled by `e^{−lref}`.
    pub fn segment_scaled(&self, u: f64, v: f64, lref: f64) -> SegMoments {
        if !(v > u) {
            return SegMoments::default();
        }
        let s = self.switch_point;
        let mut cuts = vec![u];
        let mut push = |c: f64| {
            if c > u && c < v {
                cuts.push(c);
            }
        };
        push(s);
        if let Shape::Gauss { mean, .. } = self.left {
            if mean < s {
                push(mean);
            }
        }
        if let Shape::Gauss { mean, .. } = self.right {
            if mean > s {
                push(mean);
            }
        }
        cuts.push(v);
        cuts.sort_by(|a, b| a.total_cmp(b));
        let mut total = SegMoments::default();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let side = if b <= s { Side::Left } else { Side::Right };
            let p = self.piece_seg(side, a, b, lref);
            total.mass += p.mass;
            total.from_left += p.from_left + (a - u) * p.mass;
            total.to_right += p.to_right + (v - b) * p.mass;
        }
        total
    }

    pub fn segment(&self, u: f64, v: f64) -> SegMoments {
        self.segment_scaled(u, v, 0.0)
    }

    /// `ln F(x)`.
    pub fn log_cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        if x == f64::INFINITY {
            return 0.0;
        }
        let s = self.switch_point;
        if x <= s {
            self.log_left_mass(x)
        } else {
            let ls = self.log_right_mass(x);
            if ls < -std::f64::consts::LN_2 {
                log1mexp(ls)
            } else {
                let lref = self.log_peak_on(s, x);
                let seg = self.segment_scaled(s, x, lref);
                logaddexp(self.log_mass_left, lref + seg.mass.ln())
            }
        }
    }

    /// `ln(1 − F(x))`.
    pub fn log_sf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return f64::NEG_INFINITY;
        }
        let s = self.switch_point;
        if x >= s {
            self.log_right_mass(x)
        } else {
            let lf = self.log_left_mass(x);
            if lf < -std::f64::consts::LN_2 {
                log1mexp(lf)
            } else {
                let lref = self.log_peak_on(x, s);
                let seg = self.segment_scaled(x, s, lref);
                logaddexp(self.log_mass_right, lref + seg.mass.ln())
            }
        }
    }

    /// Largest `ln ν` on `[u, v]`.
    fn log_peak_on(&self, u: f64, v: f64) -> f64 {
        let mut best = self.log_pdf(u).max(self.log_pdf(v));
        for shape in [self.left, self.right] {
            if let Shape::Gauss { mean, .. } = shape {
                if mean > u && mean < v {
                    best = best.max(self.log_pdf(mean));
                }
            }
        }
        best
    }

    /// `ln ∫_{−∞}^x ν` for `x ≤ s`.
    fn log_left_mass(&self, x: f64) -> f64 {
        match self.left {
            Shape::Gauss { mean, sd } => {
                self.log_piece(Side::Left, x) + gauss_log_ratio(sd, (mean - x) / sd)
            }
            Shape::Expo { .. } => unreachable!(),
        }
    }

    /// `ln ∫_x^∞ ν` for `x ≥ s`.
    fn log_right_mass(&self, x: f64) -> f64 {
        let l = self.log_piece(Side::Right, x);
        match self.right {
            Shape::Gauss { mean, sd } => l + gauss_log_ratio(sd, (x - mean) / sd),
            Shape::Expo { rate } => l - rate.ln(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let lf = self.log_cdf(x);
        if lf > -std::f64::consts::LN_2 {
            -self.log_sf(x).exp_m1()
        } else {
            lf.exp()
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        let ls = self.log_sf(x);
        if ls > -std::f64::consts::LN_2 {
            -self.log_cdf(x).exp_m1()
        } else {
            ls.exp()
        }
    }

    /// `A(x) = E(x − Y)⁺ = ∫_{−∞}^x F`, scaled by `e^{−lref}`.
    pub fn a_scaled(&self, x: f64, lref: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        let s = self.switch_point;
        if x <= s {
            self.ext_tail(Side::Left, x, false, 1, lref)[1]
        } else {
            let a_s = self.ext_tail(Side::Left, s, false, 1, lref)[1];
            let f_s = (self.log_mass_left - lref).exp();
            a_s + (x - s) * f_s + self.segment_scaled(s, x, lref).to_right
        }
    }

    /// `B(x) = E(Y − x)⁺ = ∫_x^∞ (1 − F)`, scaled by `e^{−lref}`.
    pub fn b_scaled(&self, x: f64, lref: f64) -> f64 {
        if x == f64::INFINITY {
            return 0.0;
        }
        let s = self.switch_point;
        if x >= s {
            self.ext_tail(Side::Right, x, true, 1, lref)[1]
        } else {
            let b_s = self.ext_tail(Side::Right, s, true, 1, lref)[1];
            let s_s = (self.log_mass_right - lref).exp();
            b_s + (s - x) * s_s + self.segment_scaled(x, s, lref).from_left
        }
    }

    pub fn partial_below(&self, x: f64) -> f64 {
        self.a_scaled(x, 0.0)
    }

    pub fn partial_above(&self, x: f64) -> f64 {
        self.b_scaled(x, 0.0)
    }

    /// `∫_{y<0} |y|^m ν` and `∫_{y≥0} |y|^m ν`.
    fn split_at_zero(&self, m: u32) -> (f64, f64) {
        let s = self.switch_point;
        let mu = m as usize;
        if s >= 0.0 {
            let neg = self.ext_tail(Side::Left, 0.0, false, mu, 0.0)[mu];
            let above = self.above_switch_abs(m);
            let full = self.ext_tail(Side::Left, 0.0, true, mu, 0.0)[mu];
            let beyond = self.ext_tail(Side::Left, s, true, mu, 0.0);
            let cut = compensated_sum((0..=m).map(|i| binom(m, i) * s.powi((m - i) as i32) * beyond[i as usize]));
            (neg, above + (full - cut).max(0.0))
        } else {
            let pos = self.ext_tail(Side::Right, 0.0, true, mu, 0.0)[mu];
            let below = self.below_switch_abs(m);
            let full = self.ext_tail(Side::Right, 0.0, false, mu, 0.0)[mu];
            let beyond = self.ext_tail(Side::Right, s, false, mu, 0.0);
            let a = -s;
            let cut = compensated_sum((0..=m).map(|i| binom(m, i) * a.powi((m - i) as i32) * beyond[i as usize]));
            (below + (full - cut).max(0.0), pos)
        }
    }

    /// `E[|Y|^m 1(Y ≥ s)]` when `s ≥ 0`.
    fn above_switch_abs(&self, m: u32) -> f64 {
        let s = self.switch_point;
        let t = self.ext_tail(Side::Right, s, true, m as usize, 0.0);
        compensated_sum((0..=m).map(|i| binom(m, i) * s.powi((m - i) as i32) * t[i as usize]))
    }

    /// `E[|Y|^m 1(Y ≤ s)]` when `s < 0`.
    fn below_switch_abs(&self, m: u32) -> f64 {
        let a = -self.switch_point;
        let t = self.ext_tail(Side::Left, self.switch_point, false, m as usize, 0.0);
        compensated_sum((0..=m).map(|i| binom(m, i) * a.powi((m - i) as i32) * t[i as usize]))
    }

    /// `E[Y^m]`.
    pub fn signed_moment(&self, m: u32) -> f64 {
        if m == 0 {
            return 1.0;
        }
        let (neg, pos) = self.split_at_zero(m);
        if m.is_multiple_of(2) { pos + neg } else { pos - neg }
    }

    /// `E[|g(Y)|^m 1(region)]` with `g(y) = y` or `y + ζ`; regions split at `−ζ`.
    pub fn moment(&self, m: u32, region: Region, shift: Shift) -> f64 {
        let s = self.switch_point;
        let mu = m as usize;
        if m == 0 {
            return match region {
                Region::All => 1.0,
                Region::BelowNegZeta => self.log_mass_left.exp(),
                Region::AboveNegZeta => self.log_mass_right.exp(),
            };
        }
        let (below, above) = match shift {
            Shift::PlusZeta => (
                self.ext_tail(Side::Left, s, false, mu, 0.0)[mu],
                self.ext_tail(Side::Right, s, true, mu, 0.0)[mu],
            ),
            Shift::None => {
                let (neg, pos) = self.split_at_zero(m);
                if s >= 0.0 {
                    let above = self.above_switch_abs(m);
                    (neg + (pos - above).max(0.0), above)
                } else {
                    let below = self.below_switch_abs(m);
                    (below, pos + (neg - below).max(0.0))
                }
            }
        };
        match region {
            Region::All => below + above,
            Region::BelowNegZeta => below,
            Region::AboveNegZeta => above,
        }
    }

    /// Largest density value and the bound it must respect.
    pub fn density_sup_check(&self) -> SupCheck {
        let s = self.switch_point;
        let mut sup = self.pdf(s);
        if let Shape::Gauss { mean, .. } = self.left {
            if mean <= s {
                sup = sup.max(self.pdf(mean));
            }
        }
        if let Shape::Gauss { mean, .. } = self.right {
            if mean >= s {
                sup = sup.max(self.pdf(mean));
            }
        }
        let base = (2.0 / std::f64::consts::PI).sqrt();
        let bound = match self.regime {
            Regime::ErlangAOver => base * (self.alpha / self.mu).sqrt(),
            _ => base,
        };
        SupCheck {
            sup,
            bound,
            satisfied: sup <= bound * (1.0 + 1e-12),
        }
    }

    /// Point where `F` reaches the given level.
    pub fn inverse_cdf(&self, level: Level) -> f64 {
        let s = self.switch_point;
        let lf_s = self.log_mass_left;
        let ls_s = self.log_mass_right;
        let x0 = match level {
            Level::Cdf(c) if c <= 0.0 => return f64::NEG_INFINITY,
            Level::Sf(q) if q <= 0.0 => return f64::INFINITY,
            Level::Cdf(c) if c >= 1.0 => return f64::INFINITY,
            Level::Sf(q) if q >= 1.0 => return f64::NEG_INFINITY,
            Level::Cdf(c) if c.ln() <= lf_s => self.left_inverse(c.ln()),
            Level::Sf(q) if q.ln() <= ls_s => self.right_inverse(q.ln()),
            Level::Cdf(c) => self.right_inverse((1.0 - c).ln()),
            Level::Sf(q) => self.left_inverse((1.0 - q).ln()),
        };
        let x0 = if x0.is_finite() { x0 } else { s };
        self.polish(x0, level)
    }

    fn left_inverse(&self, log_c: f64) -> f64 {
        let s = self.switch_point;
        match self.left {
            Shape::Gauss { mean, sd } => {
                // F(x) = K Φ((x−m)/σ) on the left piece
                let zs = (s - mean) / sd;
                let log_k = self.log_mass_left - crate::special::log_norm_cdf(zs);
                let p = (log_c - log_k).exp().min(1.0);
                mean + sd * norm_quantile(p)
            }
            Shape::Expo { .. } => unreachable!(),
        }
    }

    fn right_inverse(&self, log_q: f64) -> f64 {
        let s = self.switch_point;
        match self.right {
            Shape::Gauss { mean, sd } => {
                let zs = (s - mean) / sd;
                let log_k = self.log_mass_right - crate::special::log_norm_sf(zs);
                let p = (log_q - log_k).exp().min(1.0);
                mean + sd * norm_sf_inverse(p)
            }
            Shape::Expo { rate } => s + (self.log_mass_right - log_q) / rate,
        }
    }

    fn polish(&self, mut x: f64, level: Level) -> f64 {
        for _ in 0..3 {
            let nu = self.pdf(x);
            if !(nu > 0.0) {
                break;
            }
            let step = match level {
                Level::Cdf(c) => (self.cdf(x) - c) / nu,
                Level::Sf(q) => (q - self.sf(x)) / nu,
            };
            if !step.is_finite() {
                break;
            }
            x -= step;
            if step.abs() <= 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
        x
    }

    pub fn is_erlang_c(&self) -> bool {
        self.regime == Regime::ErlangC
    }
}

/// Outcome of the density-sup check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SupCheck {
    pub sup: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Density for the model's regime.
pub fn build_density(model: &Model) -> Result<DiffusionDensity> {
    DiffusionDensity::new(model)
}

/// `|ζ|^m E[Y^m]` along an Erlang-C sequence of `ζ < 0` values.
pub fn zeta_scaling_limit(mu: f64, n: u64, m: u32, zetas: &[f64]) -> Result<Vec<f64>> {
    zetas
        .iter()
        .map(|&z| {
            if !(z < 0.0) {
                return Err(Error::InvalidParameter {
                    name: "zeta",
                    value: z,
                    reason: "Erlang-C requires ζ < 0",
                });
            }
            // (R − n)/√R = ζ fixes √R for the given n
            let nf = n as f64;
            let sqrt_r = (z + (z * z + 4.0 * nf).sqrt()) / 2.0;
            let model = Model::new(sqrt_r * sqrt_r * mu, mu, n, 0.0)?;
            let d = DiffusionDensity::from_parts(Regime::ErlangC, model.mu(), 0.0, z)?;
            Ok(z.abs().powi(m as i32) * d.signed_moment(m))
        })
        .collect()
}
