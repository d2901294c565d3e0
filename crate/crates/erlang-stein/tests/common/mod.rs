//! Brute-force reference computations shared by the integration tests.
//!
//! Nothing here calls the closed forms under test: the chain law comes from
//! its own ratio recursion and the diffusion law from adaptive Simpson
//! quadrature of `exp(∫ b/μ)`.

#![allow(dead_code)]

use erlang_stein::ModelParams;

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // below the rounding floor of the panel no refinement helps
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Derived scalars recomputed from the raw rates.
#[derive(Debug, Clone, Copy)]
pub struct Scalars {
    pub lambda: f64,
    pub mu: f64,
    pub n: f64,
    pub alpha: f64,
    pub r: f64,
    pub delta: f64,
    pub x_inf: f64,
    pub zeta: f64,
}

pub fn scalars(p: ModelParams) -> Scalars {
    let r = p.lambda / p.mu;
    let n = p.n as f64;
    let x_inf = if r < n { r } else { n + (p.lambda - n * p.mu) / p.alpha };
    let delta = r.sqrt().recip();
    Scalars {
        lambda: p.lambda,
        mu: p.mu,
        n,
        alpha: p.alpha,
        r,
        delta,
        x_inf,
        zeta: delta * (x_inf - n),
    }
}

/// Chain pmf by the product of birth/death ratios, trimmed below `1e-18`
/// of the mode on both ends.
pub struct OracleChain {
    pub first: usize,
    pub pmf: Vec<f64>,
    pub sc: Scalars,
}

impl OracleChain {
    pub fn new(p: ModelParams) -> Self {
        let sc = scalars(p);
        let rate = |k: usize| {
            let k = k as f64;
            sc.mu * k.min(sc.n) + sc.alpha * (k - sc.n).max(0.0)
        };
        let mut logw = vec![0.0f64];
        let mut peak = 0.0f64;
        let mut k = 0usize;
        let (mut run, mut carry) = (0.0f64, 0.0f64);
        loop {
            k += 1;
            let v = (sc.lambda / rate(k)).ln();
            let t = run + v;
            carry += if run.abs() >= v.abs() { (run - t) + v } else { (v - t) + run };
            run = t;
            let next = run + carry;
            logw.push(next);
            peak = peak.max(next);
            let falling = sc.lambda < rate(k);
            if falling && next < peak - 45.0 {
                break;
            }
        }
        let w: Vec<f64> = logw.iter().map(|l| (l - peak).exp()).collect();
        // Neumaier summation
        let (mut total, mut carry) = (0.0f64, 0.0f64);
        for &v in &w {
            let t = total + v;
            carry += if total.abs() >= v.abs() { (total - t) + v } else { (v - t) + total };
            total = t;
        }
        let total = total + carry;
        let pmf: Vec<f64> = w.iter().map(|v| v / total).collect();
        let first = pmf.iter().position(|&q| q > 1e-18).unwrap_or(0);
        Self {
            first,
            pmf: pmf[first..].to_vec(),
            sc,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.sc.delta * ((self.first + i) as f64 - self.sc.x_inf)
    }

    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.pmf.iter().enumerate().map(|(i, q)| q * f(self.x(i))).sum()
    }
}

/// Diffusion law from its drift alone.
pub struct OracleDiffusion {
    pub sc: Scalars,
    pub lo: f64,
    pub hi: f64,
    log_norm: f64,
    tol: f64,
}

impl OracleDiffusion {
    pub fn new(p: ModelParams) -> Self {
        let sc = scalars(p);
        let mut o = Self {
            sc,
            lo: 0.0,
            hi: 0.0,
            log_norm: 0.0,
            tol: 1e-14,
        };
        // b is nonincreasing with b(0) = 0, so the log weight peaks at 0
        let peak = 0.0;
        let mut lo = -1.0;
        while o.log_weight(lo) > peak - 60.0 {
            lo *= 1.5;
        }
        let mut hi = 1.0;
        while o.log_weight(hi) > peak - 60.0 {
            hi *= 1.5;
        }
        o.lo = lo.min(-sc.zeta - 1.0);
        o.hi = hi.max(-sc.zeta + 1.0);
        o.log_norm = peak;
        let z = o.raw_integral(o.lo, o.hi, |_| 1.0);
        o.log_norm = peak + z.ln();
        o
    }

    pub fn drift(&self, x: f64) -> f64 {
        let z = self.sc.zeta;
        let y = x + z;
        ((-y).max(0.0) - (-z).max(0.0)) * self.sc.mu - (y.max(0.0) - z.max(0.0)) * self.sc.alpha
    }

    /// `∫_0^x b/μ` exactly: `b` is linear on each side of `−ζ`.
    pub fn log_weight(&self, x: f64) -> f64 {
        let s = -self.sc.zeta;
        let trap = |u: f64, v: f64| 0.5 * (v - u) * (self.drift(u) + self.drift(v));
        let integral = if (0.0 - s) * (x - s) < 0.0 {
            trap(0.0, s) + trap(s, x)
        } else {
            trap(0.0, x)
        };
        integral / self.sc.mu
    }

    pub fn pdf(&self, x: f64) -> f64 {
        (self.log_weight(x) - self.log_norm).exp()
    }

    fn raw_integral<G: Fn(f64) -> f64>(&self, a: f64, b: f64, g: G) -> f64 {
        let f = |x: f64| g(x) * (self.log_weight(x) - self.log_norm).exp();
        let s = -self.sc.zeta;
        let mut cuts = vec![a, b];
        for c in [s, 0.0] {
            if c > a && c < b {
                cuts.push(c);
            }
        }
        cuts.sort_by(f64::total_cmp);
        // unit-length panels keep the recursion well conditioned
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            let pieces = ((w[1] - w[0]).ceil() as usize).max(1);
            let h = (w[1] - w[0]) / pieces as f64;
            for i in 0..pieces {
                let u = w[0] + h * i as f64;
                let v = if i + 1 == pieces { w[1] } else { u + h };
                acc += simpson(&f, u, v, self.tol);
            }
        }
        acc
    }

    /// `∫_a^b g ν`.
    pub fn integrate<G: Fn(f64) -> f64>(&self, a: f64, b: f64, g: G) -> f64 {
        let a = a.max(self.lo);
        let b = b.min(self.hi);
        if b <= a {
            return 0.0;
        }
        self.raw_integral(a, b, g)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.integrate(self.lo, x, |_| 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.integrate(self.lo, self.hi, |x| x)
    }
}

/// `sup |F_X̃ − F_Y|` over `points` dense grid points, every lattice point and
/// every lattice left limit.
pub fn oracle_kolmogorov(chain: &OracleChain, diff: &OracleDiffusion, points: usize) -> f64 {
    let mut xs: Vec<(f64, bool)> = Vec::new();
    for i in 0..chain.pmf.len() {
        xs.push((chain.x(i), true));
    }
    let (a, b) = (diff.lo.min(chain.x(0)), diff.hi.max(chain.x(chain.pmf.len() - 1)));
    for j in 0..=points {
        xs.push((a + (b - a) * j as f64 / points as f64, false));
    }
    xs.sort_by(|u, v| u.0.total_cmp(&v.0));
    let mut f_y = diff.cdf(xs[0].0);
    let mut prev = xs[0].0;
    let mut chain_cdf = 0.0;
    let mut next_state = 0usize;
    let mut worst = 0.0f64;
    for &(x, _) in &xs {
        f_y += diff.integrate(prev, x, |_| 1.0);
        prev = x;
        // left limit excludes states at x
        let before = chain_cdf;
        while next_state < chain.pmf.len() && chain.x(next_state) <= x + 1e-12 * (1.0 + x.abs()) {
            chain_cdf += chain.pmf[next_state];
            next_state += 1;
        }
        worst = worst.max((before - f_y).abs()).max((chain_cdf - f_y).abs());
    }
    worst
}

/// `∫ |F_X̃ − F_Y|` cell by cell, bisecting for the crossing inside a cell.
pub fn oracle_wasserstein(chain: &OracleChain, diff: &OracleDiffusion) -> f64 {
    let len = chain.pmf.len();
    let x0 = chain.x(0);
    // left tail: F_X̃ = 0, ∫ F_Y = x0 F(x0) − ∫ t ν
    let f0 = diff.cdf(x0);
    let mut total = x0 * f0 - diff.integrate(diff.lo, x0, |t| t);
    let mut f_a = f0;
    let mut c = 0.0;
    for i in 0..len - 1 {
        c += chain.pmf[i];
        let a = chain.x(i);
        let b = chain.x(i + 1);
        let f_b = f_a + diff.integrate(a, b, |_| 1.0);
        // ∫_u^v (F − c) = v F(v) − u F(u) − ∫_u^v t ν − c (v − u)
        let signed = |u: f64, fu: f64, v: f64, fv: f64| v * fv - u * fu - diff.integrate(u, v, |t| t) - c * (v - u);
        if (f_a - c) * (f_b - c) >= 0.0 {
            total += signed(a, f_a, b, f_b).abs();
        } else {
            let (mut l, mut r) = (a, b);
            let mut fl = f_a;
            for _ in 0..200 {
                let m = 0.5 * (l + r);
                let fm = fl + diff.integrate(l, m, |_| 1.0);
                if (fm - c) * (f_a - c) > 0.0 {
                    l = m;
                    fl = fm;
                } else {
                    r = m;
                }
                if r - l < 1e-15 * (1.0 + l.abs()) {
                    break;
                }
            }
            let t = 0.5 * (l + r);
            let f_t = fl + diff.integrate(l, t, |_| 1.0);
            total += signed(a, f_a, t, f_t).abs() + signed(t, f_t, b, f_b).abs();
        }
        f_a = f_b;
    }
    // right tail: F_X̃ = 1, ∫ (1 − F_Y) = ∫ t ν − x_K (1 − F(x_K))
    let xk = chain.x(len - 1);
    total += diff.integrate(xk, diff.hi, |t| t) - xk * (1.0 - f_a);
    total
}
