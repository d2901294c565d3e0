//! Gaussian tail functions, the scaled complementary error function and a
//! compensated accumulator.
//!
//! Everything here is written so that far-tail quantities are produced as
//! ratios or logarithms rather than as differences of numbers close to one.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

/// `ln(2π)/2`.
pub const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
/// `1/√(2π)`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Complementary error function.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `exp(x²)` with the square split into an exact head and tail.
fn exp_square(x: f64) -> f64 {
    let hi = x * x;
    let lo = x.mul_add(x, -hi);
    hi.exp() * (1.0 + lo)
}

/// Scaled complementary error function `exp(x²)·erfc(x)`.
///
/// Overflows to `+∞` only when the true value does (x below about −26.6).
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        let e = exp_square(x);
        if !e.is_finite() {
            return f64::INFINITY;
        }
        return 2.0 * e - erfcx(-x);
    }
    if x < 2.0 {
        return exp_square(x) * erfc(x);
    }
    if x > 1e8 {
        return 1.0 / (SQRT_PI * x);
    }
    // Continued fraction 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), modified Lentz.
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..5000 {
        let a = k as f64 * 0.5;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let step = c * d;
        f *= step;
        if (step - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (SQRT_PI * f)
}

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF `Φ(x)`, accurate in the lower tail.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal survival function `Q(x) = 1 − Φ(x)`, accurate in the upper tail.
#[inline]
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Mills ratio `Q(u)/φ(u) = ∫_u^∞ exp(−(t² − u²)/2) dt`.
pub fn mills(u: f64) -> f64 {
    (PI / 2.0).sqrt() * erfcx(u * FRAC_1_SQRT_2)
}

/// Natural log of the Mills ratio; finite for every finite `u`.
pub fn log_mills(u: f64) -> f64 {
    if u >= -1.0 {
        mills(u).ln()
    } else {
        norm_sf(u).ln() + HALF_LN_2PI + 0.5 * u * u
    }
}

/// `ln Q(u)` for all finite `u`.
pub fn log_norm_sf(u: f64) -> f64 {
    if u <= 0.0 {
        norm_sf(u).ln()
    } else {
        log_mills(u) - 0.5 * u * u - HALF_LN_2PI
    }
}

/// `ln Φ(u)` for all finite `u`.
#[inline]
pub fn log_norm_cdf(u: f64) -> f64 {
    log_norm_sf(-u)
}

/// `ln(1 − e^t)` for `t < 0`.
pub fn log1mexp(t: f64) -> f64 {
    if t > -std::f64::consts::LN_2 {
        (-t.exp_m1()).ln()
    } else {
        (-t.exp()).ln_1p()
    }
}

/// `ln(e^a + e^b)`.
pub fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Lower-tail quantile of the standard normal, `Φ⁻¹(p)` (Wichura, AS 241).
#[allow(clippy::inconsistent_digit_grouping)]
pub fn norm_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((2509.080_928_730_122_7 * r + 33_430.575_583_588_13) * r
                + 67265.770_927_008_7)
                * r
                + 45921.953_931_549_87)
                * r
                + 13_731.693_765_509_46)
                * r
                + 1971.590_950_306_551_3)
                * r
                + 133.141_667_891_784_38)
                * r
                + 3.387_132_872_796_366_5)
            / (((((((5226.495_278_852_545 * r + 28729.085_735_721_943) * r
                + 39307.895_800_092_71)
                * r
                + 21213.794_301_586_597)
                * r
                + 5394.196_021_424_751)
                * r
                + 687.187_007_492_057_9)
                * r
                + 42.313_330_701_600_91)
                * r
                + 1.0);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        (((((((7.745_450_142_783_414e-4 * r + 0.022_723_844_989_269_184) * r
            + 0.241_780_725_177_450_6)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5)
            / (((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
                + 0.015_198_666_563_616_457)
                * r
                + 0.148_103_976_427_480_08)
                * r
                + 0.689_767_334_985_1)
                * r
                + 1.676_384_830_183_803_8)
                * r
                + 2.053_191_626_637_759)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 0.001_242_660_947_388_078_4)
            * r
            + 0.026_532_189_526_576_124)
            * r
            + 0.296_560_571_828_504_9)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103)
            / (((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
                + 1.846_318_317_510_054_8e-5)
                * r
                + 7.868_691_311_456_133e-4)
                * r
                + 0.014_875_361_290_850_615)
                * r
                + 0.136_929_880_922_735_8)
                * r
                + 0.599_832_206_555_888)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Upper-tail quantile: the `u` with `Q(u) = q`, accurate for tiny `q`.
#[inline]
pub fn norm_sf_inverse(q: f64) -> f64 {
    -norm_quantile(q)
}

/// Normalized one-sided Gaussian tail moments.
///
/// With `W_j(z) = ∫_z^∞ (t − z)^j φ(t) dt`, returns `w_j = W_j(z)/W_0(z)` for
/// `j = 0..=jmax`. Forward recurrence where it is stable (`z < 1`), otherwise
/// backward ratios `r_j = j/(z + r_{j+1})`.
pub fn gauss_tail_moment_ratios(z: f64, jmax: usize) -> Vec<f64> {
    let mut w = vec![0.0; jmax + 1];
    w[0] = 1.0;
    if jmax == 0 {
        return w;
    }
    if z < 1.0 {
        w[1] = 1.0 / mills(z) - z;
        for j in 2..=jmax {
            w[j] = (j - 1) as f64 * w[j - 2] - z * w[j - 1];
        }
    } else {
        let start = (jmax as f64).sqrt() + 20.0 / z;
        let top = jmax + (start * start).ceil() as usize + 8;
        let mut r = 0.0;
        let mut ratios = vec![0.0; jmax + 1];
        for j in (1..=top).rev() {
            r = j as f64 / (z + r);
            if j <= jmax {
                ratios[j] = r;
            }
        }
        for j in 1..=jmax {
            w[j] = w[j - 1] * ratios[j];
        }
    }
    w
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of a sequence.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `√2`, re-exported for callers that build Gaussian arguments.
pub const SQRT2: f64 = SQRT_2;
