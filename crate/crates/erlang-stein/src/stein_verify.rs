//! Taylor-expansion error decompositions of `E G_X̃ f_h − E G_Y f_h`.
//!
//! For a lattice point `x = x_k` with `b(x) = δ(λ − d(k))` and `δ²λ = μ`,
//!
//! ```text
//! G_X̃ f(x) = G_Y f(x) − (δ/2) b(x) f″(x−) + λ(ε₁(x) + ε₂(x)) − b(x) ε₂(x)/δ
//! ε₁(x) = ∫_x^{x+δ} (x + δ − y)(f″(y) − f″(x−)) dy
//! ε₂(x) = ∫_{x−δ}^x (y − x + δ)(f″(y) − f″(x−)) dy
//! ```
//!
//! where `G_Y f = b f′ + μ f″(x−)`. The Wasserstein decomposition bounds the
//! remainders through `|f‴|`; the Kolmogorov one keeps the `ε` integrals.

use serde::Serialize;

use crate::ctmc::{DiscreteStationary, generator_from_increments};
use crate::error::{Error, Result};
use crate::metrics::kolmogorov_distance;
use crate::model::Regime;
use crate::poisson::{PoissonSolution, TestFunction};
use crate::quad::{QuadOptions, integrate_with_breaks};
use crate::special::CompensatedSum;

/// Probability below which lattice states are left out of expectations.
pub const PMF_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Wasserstein,
    Kolmogorov,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub name: &'static str,
    pub value: f64,
}

/// Extra quantities of the Kolmogorov argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Straddle {
    pub a: f64,
    /// `P(a − δ < X̃ ≤ a + δ)`.
    pub probability: f64,
    /// `ω·2δ + d_K + c·9δ² + c²·8δ⁴` with `ω = sup ν` and `c = α/μ ∨ 1`.
    pub majorant: f64,
    pub d_k: f64,
    /// `½·probability + 75δ`.
    pub intermediate_bound: f64,
}

/// Remainder terms with their sum and the error they bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorDecomposition {
    pub metric: Metric,
    pub terms: Vec<Term>,
    pub total: f64,
    /// `|E h(X̃) − E h(Y)|`.
    pub lhs: f64,
    /// Mass of the states left out of the expectations.
    pub omitted_mass: f64,
    pub straddle: Option<Straddle>,
}

impl ErrorDecomposition {
    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// `lhs ≤ total` up to quadrature noise.
    pub fn is_valid(&self) -> bool {
        self.lhs <= self.total + 1e-8
    }
}

fn quad_opts(scale: f64) -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-10 * scale,
        rel_tol: 1e-10,
        ..QuadOptions::default()
    }
}

fn breaks(sol: &PoissonSolution) -> Vec<f64> {
    let mut b = vec![sol.density.switch_point];
    b.extend(sol.h.kink());
    b
}

/// Integral of `g` over `[lo, hi]` split at the kinks, failing on the first error.
fn integrate_fallible<G: Fn(f64) -> Result<f64>>(g: G, lo: f64, hi: f64, cuts: &[f64], opts: QuadOptions) -> Result<f64> {
    let mut failure = None;
    let v = integrate_with_breaks(
        |y| match g(y) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        cuts,
        opts,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

fn lhs(dist: &DiscreteStationary, sol: &PoissonSolution) -> f64 {
    (dist.expect(|x| sol.h.eval(x)) - sol.h_mean).abs()
}

fn window(dist: &DiscreteStationary) -> (usize, usize, f64) {
    let (lo, hi) = dist.support_window(PMF_FLOOR);
    let kept: CompensatedSum = dist.pmf[lo..=hi].iter().copied().collect();
    (lo, hi, (1.0 - kept.value()).max(0.0))
}

/// The four `|f‴|` terms bounding the Wasserstein error for Lipschitz `h`.
pub fn wasserstein_decomposition(dist: &DiscreteStationary, sol: &PoissonSolution) -> Result<ErrorDecomposition> {
    if !sol.h.is_lipschitz() {
        return Err(Error::Unsupported {
            requirement: "a Lipschitz test function",
        });
    }
    let m = &dist.model;
    let delta = m.delta;
    let mu = m.mu();
    let (lo, hi, omitted_mass) = window(dist);
    let cuts = breaks(sol);
    let opts = quad_opts(delta / mu);
    // the kink is a single point; it is only hit on rounding-width panels
    let abs_third = |y: f64| match sol.f_third(y) {
        Err(Error::AtKink { .. }) => Ok(0.0),
        r => r.map(f64::abs),
    };
    // J[i] = ∫ |f‴| over [x_{lo+i−1}, x_{lo+i}]
    let mut cells = Vec::with_capacity(hi - lo + 2);
    for k in lo..=hi + 1 {
        let x = dist.x(k);
        cells.push(integrate_fallible(abs_third, x - delta, x, &cuts, opts)?);
    }
    let (mut t1, mut t2, mut t3, mut t4) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    for k in lo..=hi {
        let p = dist.pmf[k];
        let x = dist.x(k);
        let b = m.drift(x);
        let back = cells[k - lo];
        let fwd = cells[k - lo + 1];
        t1.add(p * 0.5 * delta * (sol.f_second(x)? * b).abs());
        t2.add(p * 0.5 * mu * fwd);
        t3.add(p * 0.5 * mu * back);
        t4.add(p * 0.5 * delta * b.abs() * back);
    }
    let terms = vec![
        Term {
            name: "term1_drift_f2",
            value: t1.value(),
        },
        Term {
            name: "term2_forward_f3",
            value: t2.value(),
        },
        Term {
            name: "term3_backward_f3",
            value: t3.value(),
        },
        Term {
            name: "term4_drift_f3",
            value: t4.value(),
        },
    ];
    let total = terms.iter().map(|t| t.value).sum();
    Ok(ErrorDecomposition {
        metric: Metric::Wasserstein,
        terms,
        total,
        lhs: lhs(dist, sol),
        omitted_mass,
        straddle: None,
    })
}

/// `(ε₁(x), ε₂(x))` with the jump of `f″` at the kinks handled by splitting.
pub fn epsilons(sol: &PoissonSolution, x: f64, delta: f64) -> Result<(f64, f64)> {
    let cuts = breaks(sol);
    let f2x = sol.f_second(x)?;
    let opts = quad_opts(delta * delta / sol.mu());
    let e1 = integrate_fallible(
        |y| Ok((x + delta - y) * (sol.f_second(y)? - f2x)),
        x,
        x + delta,
        &cuts,
        opts,
    )?;
    let e2 = integrate_fallible(
        |y| Ok((y - x + delta) * (sol.f_second(y)? - f2x)),
        x - delta,
        x,
        &cuts,
        opts,
    )?;
    Ok((e1, e2))
}

/// The four terms bounding `|P(X̃ ≤ a) − P(Y ≤ a)|`, plus the straddle
/// probability and its majorant.
pub fn kolmogorov_decomposition(dist: &DiscreteStationary, sol: &PoissonSolution) -> Result<ErrorDecomposition> {
    let TestFunction::Indicator { a } = sol.h else {
        return Err(Error::Unsupported {
            requirement: "an indicator test function",
        });
    };
    let m = &dist.model;
    let delta = m.delta;
    let lambda = m.lambda();
    let (lo, hi, omitted_mass) = window(dist);
    let (mut t1, mut t2, mut t3, mut t4) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    for k in lo..=hi {
        let p = dist.pmf[k];
        let x = dist.x(k);
        let b = m.drift(x);
        let (e1, e2) = epsilons(sol, x, delta)?;
        t1.add(p * 0.5 * delta * (sol.f_second(x)? * b).abs());
        t2.add(p * lambda * e1.abs());
        t3.add(p * lambda * e2.abs());
        t4.add(p * (b * e2).abs() / delta);
    }
    let terms = vec![
        Term {
            name: "term1_drift_f2",
            value: t1.value(),
        },
        Term {
            name: "term2_eps1",
            value: t2.value(),
        },
        Term {
            name: "term3_eps2",
            value: t3.value(),
        },
        Term {
            name: "term4_drift_eps2",
            value: t4.value(),
        },
    ];
    let total = terms.iter().map(|t| t.value).sum();
    let straddle = straddle(dist, sol, a);
    Ok(ErrorDecomposition {
        metric: Metric::Kolmogorov,
        terms,
        total,
        lhs: lhs(dist, sol),
        omitted_mass,
        straddle: Some(straddle),
    })
}

fn straddle(dist: &DiscreteStationary, sol: &PoissonSolution, a: f64) -> Straddle {
    let m = &dist.model;
    let delta = m.delta;
    let probability: f64 = (0..dist.len())
        .filter(|&k| {
            let x = dist.x(k);
            x > a - delta && x <= a + delta
        })
        .fold(0.0, |acc, k| acc + dist.pmf[k]);
    let d = &sol.density;
    let omega = d.density_sup_check().sup;
    let d_k = kolmogorov_distance(dist, d);
    let c = match m.regime {
        Regime::ErlangC => 1.0,
        _ => (m.alpha() / m.mu()).max(1.0),
    };
    Straddle {
        a,
        probability,
        majorant: omega * 2.0 * delta + d_k + 9.0 * c * delta.powi(2) + 8.0 * c * c * delta.powi(4),
        d_k,
        intermediate_bound: 0.5 * probability + 75.0 * delta,
    }
}

/// A function with the pieces needed to expand the chain generator.
pub trait Expandable {
    /// `f(x1) − f(x0)`.
    fn increment(&self, x0: f64, x1: f64) -> Result<f64>;
    fn first(&self, x: f64) -> Result<f64>;
    /// Left second derivative.
    fn second_left(&self, x: f64) -> Result<f64>;
    /// Points where `f″` may jump or kink.
    fn breakpoints(&self) -> Vec<f64>;
}

impl Expandable for PoissonSolution {
    fn increment(&self, x0: f64, x1: f64) -> Result<f64> {
        self.f_increment(x0, x1)
    }

    fn first(&self, x: f64) -> Result<f64> {
        self.f_prime(x)
    }

    fn second_left(&self, x: f64) -> Result<f64> {
        self.f_second(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        breaks(self)
    }
}

/// `f(x) = c0 + c1 x + c2 x²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Quadratic {
    fn eval(&self, x: f64) -> f64 {
        self.c0 + x * (self.c1 + x * self.c2)
    }
}

impl Expandable for Quadratic {
    fn increment(&self, x0: f64, x1: f64) -> Result<f64> {
        Ok(self.eval(x1) - self.eval(x0))
    }

    fn first(&self, x: f64) -> Result<f64> {
        Ok(self.c1 + 2.0 * self.c2 * x)
    }

    fn second_left(&self, _x: f64) -> Result<f64> {
        Ok(2.0 * self.c2)
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Direct and reconstructed values of `G_X̃ f(x_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorAudit {
    pub k: u64,
    pub exact_gen: f64,
    pub reconstructed_gen: f64,
    pub gap: f64,
}

/// Rebuilds `G_X̃ f(x_k)` from `G_Y f(x_k)` and the expansion's corrections
/// and compares it with the generator applied to the increments of `f`.
pub fn taylor_remainder_audit<F: Expandable>(dist: &DiscreteStationary, f: &F, k: u64) -> Result<TaylorAudit> {
    let m = &dist.model;
    let delta = m.delta;
    let lambda = m.lambda();
    let mu = m.mu();
    let x = m.scaled_state(k);
    let up = f.increment(x, x + delta)?;
    let down = if k == 0 { 0.0 } else { f.increment(x, x - delta)? };
    let exact_gen = generator_from_increments(m, k, up, down);

    let b = m.drift(x);
    let f1 = f.first(x)?;
    let f2 = f.second_left(x)?;
    let cuts = f.breakpoints();
    let opts = quad_opts(delta * delta / mu);
    let e1 = integrate_fallible(
        |y| Ok((x + delta - y) * (f.second_left(y)? - f2)),
        x,
        x + delta,
        &cuts,
        opts,
    )?;
    let e2 = if k == 0 {
        0.0
    } else {
        integrate_fallible(
            |y| Ok((y - x + delta) * (f.second_left(y)? - f2)),
            x - delta,
            x,
            &cuts,
            opts,
        )?
    };
    let reconstructed_gen = if k == 0 {
        // no downward move from the empty state: G_X̃ f = λ(δf′ + δ²f″/2 + ε₁)
        lambda * (delta * f1 + 0.5 * delta * delta * f2 + e1)
    } else {
        let g_y = b * f1 + mu * f2;
        g_y - 0.5 * delta * b * f2 + lambda * (e1 + e2) - b * e2 / delta
    };
    Ok(TaylorAudit {
        k,
        exact_gen,
        reconstructed_gen,
        gap: (exact_gen - reconstructed_gen).abs(),
    })
}

/// `E[G_X̃ f(X̃)]` and `E[G_Y f(X̃)]` over the retained states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorMeans {
    pub chain: f64,
    pub diffusion: f64,
    pub omitted_mass: f64,
}

pub fn generator_means(dist: &DiscreteStationary, sol: &PoissonSolution) -> Result<GeneratorMeans> {
    let m = &dist.model;
    let delta = m.delta;
    let (lo, hi, omitted_mass) = window(dist);
    let mut chain = CompensatedSum::new();
    let mut diffusion = CompensatedSum::new();
    for k in lo..=hi {
        let p = dist.pmf[k];
        let x = dist.x(k);
        let up = sol.f_increment(x, x + delta)?;
        let down = if k == 0 { 0.0 } else { sol.f_increment(x, x - delta)? };
        chain.add(p * generator_from_increments(m, k as u64, up, down));
        let fp = sol.f_prime(x)?;
        diffusion.add(p * (m.drift(x) * fp + m.mu() * sol.f_second(x)?));
    }
    Ok(GeneratorMeans {
        chain: chain.value(),
        diffusion: diffusion.value(),
        omitted_mass,
    })
}
