//! Model primitives and the derived scalars `R`, `δ`, `ρ`, `x(∞)` and `ζ`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Raw queue primitives: arrival rate, service rate, server count and
/// abandonment rate (`alpha = 0` is the Erlang-C model).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub mu: f64,
    pub n: u64,
    pub alpha: f64,
}

/// Which closed form the diffusion density takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ErlangC,
    /// `α > 0` and `R ≤ n`; the critical load `R = n` lives here.
    ErlangAUnder,
    /// `α > 0` and `R > n`.
    ErlangAOver,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::ErlangC => "erlang_c",
            Regime::ErlangAUnder => "erlang_a_under",
            Regime::ErlangAOver => "erlang_a_over",
        }
    }
}

impl ModelParams {
    /// Validated constructor.
    pub fn new(lambda: f64, mu: f64, n: u64, alpha: f64) -> Result<Self> {
        check_positive("lambda", lambda)?;
        check_positive("mu", mu)?;
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: 0.0,
                reason: "server count must be at least 1",
            });
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "abandonment rate must be finite and nonnegative",
            });
        }
        let r = lambda / mu;
        if alpha == 0.0 && r >= n as f64 {
            return Err(Error::Unstable { r, n });
        }
        Ok(Self { lambda, mu, n, alpha })
    }

    /// Erlang-C shorthand.
    pub fn erlang_c(lambda: f64, mu: f64, n: u64) -> Result<Self> {
        Self::new(lambda, mu, n, 0.0)
    }

    /// Fixes every derived scalar.
    pub fn derive(self) -> Model {
        Model::from_params(self)
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

/// Validated parameters together with their derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Model {
    pub params: ModelParams,
    pub r: f64,
    pub delta: f64,
    pub rho: f64,
    pub x_inf: f64,
    pub zeta: f64,
    pub regime: Regime,
}

impl Model {
    pub fn from_params(params: ModelParams) -> Self {
        let ModelParams { lambda, mu, n, alpha } = params;
        let nf = n as f64;
        let r = lambda / mu;
        let delta = 1.0 / r.sqrt();
        let x_inf = if r < nf {
            r
        } else {
            nf + (lambda - nf * mu) / alpha
        };
        let zeta = delta * (x_inf - nf);
        let regime = if alpha == 0.0 {
            Regime::ErlangC
        } else if r <= nf {
            Regime::ErlangAUnder
        } else {
            Regime::ErlangAOver
        };
        Self {
            params,
            r,
            delta,
            rho: r / nf,
            x_inf,
            zeta,
            regime,
        }
    }

    /// Validates and derives in one step.
    pub fn new(lambda: f64, mu: f64, n: u64, alpha: f64) -> Result<Self> {
        Ok(ModelParams::new(lambda, mu, n, alpha)?.derive())
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.params.lambda
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.params.mu
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.params.n
    }

    /// `d(k) = μ(k ∧ n) + α(k − n)⁺`.
    #[inline]
    pub fn departure_rate(&self, k: u64) -> f64 {
        let n = self.params.n;
        if k <= n {
            self.params.mu * k as f64
        } else {
            self.params.mu * n as f64 + self.params.alpha * (k - n) as f64
        }
    }

    /// `b(x) = [(x+ζ)⁻ − ζ⁻]μ − [(x+ζ)⁺ − ζ⁺]α`.
    #[inline]
    pub fn drift(&self, x: f64) -> f64 {
        drift(self.params.mu, self.params.alpha, self.zeta, x)
    }

    /// Right derivative of the drift.
    #[inline]
    pub fn drift_slope(&self, x: f64) -> f64 {
        if x < -self.zeta {
            -self.params.mu
        } else {
            -self.params.alpha
        }
    }

    /// `x_k = δ(k − x(∞))`.
    #[inline]
    pub fn scaled_state(&self, k: u64) -> f64 {
        self.delta * (k as f64 - self.x_inf)
    }

    /// The kink of the drift, `−ζ` (state `k = n`).
    #[inline]
    pub fn switch_point(&self) -> f64 {
        -self.zeta
    }

    pub fn is_erlang_c(&self) -> bool {
        self.regime == Regime::ErlangC
    }
}

/// The drift as a function of the rates and `ζ` alone.
#[inline]
pub fn drift(mu: f64, alpha: f64, zeta: f64, x: f64) -> f64 {
    let y = x + zeta;
    let neg = |t: f64| (-t).max(0.0);
    let pos = |t: f64| t.max(0.0);
    (neg(y) - neg(zeta)) * mu - (pos(y) - pos(zeta)) * alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erlang_c_example() {
        let m = Model::new(3.0, 1.0, 5, 0.0).unwrap();
        assert_eq!(m.r, 3.0);
        assert_eq!(m.x_inf, 3.0);
        assert!((m.zeta - (3.0 - 5.0) / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.regime, Regime::ErlangC);
    }

    #[test]
    fn critical_erlang_a() {
        let m = Model::new(5.0, 1.0, 5, 1.0).unwrap();
        assert_eq!(m.x_inf, 5.0);
        assert_eq!(m.zeta, 0.0);
        assert_eq!(m.regime, Regime::ErlangAUnder);
    }

    #[test]
    fn table_zeta() {
        let m = Model::new(499.0, 1.0, 500, 0.0).unwrap();
        assert!((m.zeta.abs() - 4.48e-2).abs() < 0.005 * 4.48e-2);
    }

    #[test]
    fn departure_rates() {
        let c = Model::new(3.0, 1.0, 5, 0.0).unwrap();
        assert_eq!(c.departure_rate(0), 0.0);
        assert_eq!(c.departure_rate(7), 5.0);
        let a = Model::new(3.0, 1.0, 5, 2.0).unwrap();
        assert_eq!(a.departure_rate(7), 9.0);
    }

    #[test]
    fn scaled_state_examples() {
        let m = Model::new(4.0, 1.0, 5, 0.0).unwrap();
        assert_eq!(m.scaled_state(5), 0.5);
        assert_eq!(m.scaled_state(4), 0.0);
        assert_eq!(m.scaled_state(5), -m.zeta);
    }

    #[test]
    fn drift_pieces_erlang_c() {
        let m = Model::new(4.0, 1.0, 5, 0.0).unwrap();
        assert_eq!(m.drift(0.0), 0.0);
        assert_eq!(m.drift(2.0), m.zeta);
        assert_eq!(m.drift(-1.5), 1.5);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(Model::new(5.0, 1.0, 5, 0.0), Err(Error::Unstable { .. })));
        assert!(Model::new(0.0, 1.0, 5, 0.0).is_err());
        assert!(Model::new(1.0, -1.0, 5, 0.0).is_err());
        assert!(Model::new(1.0, 1.0, 0, 0.0).is_err());
        assert!(Model::new(1.0, 1.0, 2, -0.1).is_err());
        assert!(Model::new(f64::NAN, 1.0, 2, 0.0).is_err());
    }
}
