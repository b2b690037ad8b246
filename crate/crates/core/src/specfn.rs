//! Chi-distribution tail functions and the truncated-Gaussian constants used
//! by the finite-length lower bound.
//!
//! Everything here is built on the regularized incomplete gamma function:
//! for a standard Gaussian vector `Z` in `m` dimensions, `‖Z‖²` is chi-square
//! with `m` degrees of freedom, so `Pr(‖Z‖ ≥ r) = Q(m/2, r²/2)`.

use crate::error::{require, Error, Result};

const MAX_ITER: usize = 1000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Masses below this are treated as a degenerate truncation.
pub const DEGENERATE_MASS: f64 = 1e-300;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Log of the prefactor `x^a e^{-x} / Γ(a)` shared by the series and the
/// continued fraction.
fn ln_prefactor(a: f64, x: f64) -> f64 {
    a * x.ln() - x - ln_gamma(a)
}

/// Series for the lower regularized gamma `P(a, x)`, valid for `x < a + 1`.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum.ln() + ln_prefactor(a, x)).exp()
}

/// Log of the continued fraction for `Q(a, x)` (modified Lentz), valid for
/// `x ≥ a + 1`.
fn ln_gamma_q_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h.ln() + ln_prefactor(a, x)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        0.0
    } else if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        -ln_gamma_q_cf(a, x).exp_m1()
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 − P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        ln_gamma_q_cf(a, x).exp()
    }
}

/// `ln Q(a, x)`, finite even where `Q` itself underflows.
pub fn ln_gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        0.0
    } else if x < a + 1.0 {
        (-gamma_p_series(a, x)).ln_1p()
    } else {
        ln_gamma_q_cf(a, x)
    }
}

fn check_m_r(m: usize, r: f64) -> Result<()> {
    require(m >= 1, "m", m as f64, "m ≥ 1")?;
    require(r >= 0.0, "r", r, "r ≥ 0")
}

/// `ψ(m, r) = Pr(‖Z‖ ≥ r)` for a standard Gaussian `Z` in `m` dimensions.
pub fn psi(m: usize, r: f64) -> Result<f64> {
    check_m_r(m, r)?;
    Ok(gamma_q(m as f64 / 2.0, r * r / 2.0))
}

/// `ln ψ(m, r)`.
pub fn ln_psi(m: usize, r: f64) -> Result<f64> {
    check_m_r(m, r)?;
    Ok(ln_gamma_q(m as f64 / 2.0, r * r / 2.0))
}

/// `1 − ψ(m, r)`, computed without cancellation.
pub fn psi_complement(m: usize, r: f64) -> Result<f64> {
    check_m_r(m, r)?;
    Ok(gamma_p(m as f64 / 2.0, r * r / 2.0))
}

/// Chernoff bound on `ψ(m, r_p)` from the chi-square moment generating
/// function, optimized over the tilt. Requires `r_p² > m`.
pub fn psi_chernoff(m: usize, r_p: f64) -> Result<f64> {
    Ok(ln_psi_chernoff(m, r_p)?.exp())
}

/// `ln` of [`psi_chernoff`].
pub fn ln_psi_chernoff(m: usize, r_p: f64) -> Result<f64> {
    require(m >= 1, "m", m as f64, "m ≥ 1")?;
    let mf = m as f64;
    let r2 = r_p * r_p;
    require(r2 > mf, "r_p", r_p, "r_p² > m")?;
    Ok(-r2 / 2.0 + mf / 2.0 + (mf / 2.0) * (r2 / mf).ln())
}

fn inner_mass(m: usize, l: f64) -> Result<f64> {
    require(m >= 1, "m", m as f64, "m ≥ 1")?;
    require(l > 0.0 && l.is_finite(), "L", l, "L > 0")?;
    let mass = psi_complement(m, l * (m as f64).sqrt())?;
    if mass < DEGENERATE_MASS {
        return Err(Error::DegenerateL { m, l });
    }
    Ok(mass)
}

/// `c_m(L) = 1 / Pr(‖Z‖² ≤ mL²)`.
pub fn c_m(m: usize, l: f64) -> Result<f64> {
    Ok(1.0 / inner_mass(m, l)?)
}

/// `d_m(L) = Pr(‖Z_{m+2}‖² ≤ mL²) / Pr(‖Z_m‖² ≤ mL²)`, the second-moment
/// ratio of a Gaussian truncated to the ball of radius `L√m`.
pub fn d_m(m: usize, l: f64) -> Result<f64> {
    let inner = inner_mass(m, l)?;
    let outer = psi_complement(m + 2, l * (m as f64).sqrt())?;
    Ok(outer / inner)
}

// ---------------------------------------------------------------------------
// Standard normal helpers
// ---------------------------------------------------------------------------

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// `ln` of the standard normal density.
#[inline]
pub fn ln_norm_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal upper tail `Pr(N > x)`.
#[inline]
pub fn norm_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal CDF.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    norm_sf(-x)
}

/// `ln Pr(N > x)`, accurate deep into the upper tail.
pub fn ln_norm_sf(x: f64) -> f64 {
    if x < 30.0 {
        norm_sf(x).ln()
    } else {
        ln_gamma_q(0.5, 0.5 * x * x) - std::f64::consts::LN_2
    }
}

/// `Φ(b) − Φ(a)` for `a ≤ b`, evaluated on the tail that avoids cancellation.
pub fn norm_interval(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    if a >= 0.0 {
        norm_sf(a) - norm_sf(b)
    } else if b <= 0.0 {
        norm_sf(-b) - norm_sf(-a)
    } else {
        1.0 - norm_sf(-a) - norm_sf(b)
    }
}

/// `ln(Φ(b) − Φ(a))` for `a < b`, finite even when both ends lie far out in
/// the same tail.
pub fn ln_norm_interval(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    if a >= 0.0 {
        let la = ln_norm_sf(a);
        let lb = ln_norm_sf(b);
        la + ln_one_minus_exp(lb - la)
    } else if b <= 0.0 {
        let la = ln_norm_sf(-b);
        let lb = ln_norm_sf(-a);
        la + ln_one_minus_exp(lb - la)
    } else {
        norm_interval(a, b).ln()
    }
}

/// `ln(1 − e^x)` for `x ≤ 0`.
#[inline]
fn ln_one_minus_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}
