//! Deterministic cost evaluation for scalar quantization strategies.
//!
//! The first controller maps `x0` in bin `i` (`[iΔ − Δ/2, iΔ + Δ/2)`) to
//! `q_i + α(x0 − q_i)` with `q_i = iΔ`; `α = 0` is pure quantization. The
//! first-stage cost is a closed-form sum over bins. The second-stage cost
//! integrates, over the observation `y`, the posterior spread of `X1` around
//! the decoder's estimate; each bin's contribution to that posterior is a
//! truncated Gaussian and is also available in closed form.

use serde::{Deserialize, Serialize};

use crate::bounds::{linear_costs, ProblemParams};
use crate::error::{require, Error, Result};
use crate::optimize::{golden_section, log_space, multistart_log, nelder_mead};
use crate::quadrature::integrate;
use crate::specfn::{ln_norm_interval, ln_norm_pdf, ln_norm_sf, norm_sf};

/// A scalar strategy: spacing `delta`, in-bin slope `alpha`, and the source
/// standard deviation it is designed for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarStrategy {
    pub delta: f64,
    pub alpha: f64,
    pub sigma0: f64,
}

impl ScalarStrategy {
    pub fn new(delta: f64, alpha: f64, sigma0: f64) -> Result<Self> {
        require(delta > 0.0 && delta.is_finite(), "Δ", delta, "Δ > 0")?;
        require((0.0..1.0).contains(&alpha), "α", alpha, "0 ≤ α < 1")?;
        require(sigma0 > 0.0 && sigma0.is_finite(), "σ0", sigma0, "σ0 > 0")?;
        Ok(ScalarStrategy {
            delta,
            alpha,
            sigma0,
        })
    }

    pub fn pure(delta: f64, sigma0: f64) -> Result<Self> {
        ScalarStrategy::new(delta, 0.0, sigma0)
    }

    /// Largest bin index kept on each side of the origin.
    pub fn max_bin(&self) -> i64 {
        (8.0 * self.sigma0 / self.delta).ceil() as i64 + 2
    }
}

/// Second-controller estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoder {
    /// Posterior mean `E[X1 | Y = y]`.
    Mmse,
    /// Point of the support of `X1` closest to `y`.
    Mle,
    /// `c` times the MLE estimate.
    ScaledMle(f64),
}

/// Strategy families searched by [`optimize_scalar`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PureQuant,
    Slopey,
}

/// Exact stage costs with their numerical error bars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactCost {
    pub j1: f64,
    pub j2: f64,
    pub total: f64,
    pub j1_error: f64,
    pub j2_error: f64,
}

/// Moments of a standard normal restricted to `[a, b]`:
/// `(ln Pr, mean, variance)`.
fn truncated_moments(a: f64, b: f64) -> (f64, f64, f64) {
    // work on the side of the origin that keeps the ratios finite
    let flip = a + b < 0.0;
    let (a, b) = if flip { (-b, -a) } else { (a, b) };
    let ln_z = if b.is_finite() {
        ln_norm_interval(a, b)
    } else {
        ln_norm_sf(a)
    };
    let ra = (ln_norm_pdf(a) - ln_z).exp();
    let rb = if b.is_finite() {
        (ln_norm_pdf(b) - ln_z).exp()
    } else {
        0.0
    };
    let mean = ra - rb;
    let bterm = if b.is_finite() { b * rb } else { 0.0 };
    let var = (1.0 + a * ra - bterm - mean * mean).clamp(0.0, 0.25 * (b - a).powi(2));
    (ln_z, if flip { -mean } else { mean }, var)
}

/// Posterior contribution of one bin at a given observation: log weight,
/// conditional mean and conditional variance of `X1`.
#[derive(Debug, Clone, Copy)]
struct BinTerm {
    ln_w: f64,
    mean: f64,
    var: f64,
}

const LN_NEGLIGIBLE: f64 = 60.0;

/// Bin tables and constants shared by every evaluation of one strategy.
struct Model {
    s: ScalarStrategy,
    n: i64,
    ln_mass: Vec<f64>,
    // slopey constants
    tau_sd: f64,
    ln_pref: f64,
    spread: f64,
}

impl Model {
    fn new(s: ScalarStrategy) -> Self {
        let n = s.max_bin();
        let ln_mass = (-n..=n)
            .map(|i| {
                let q = i as f64 * s.delta;
                ln_norm_interval(
                    (q - s.delta / 2.0) / s.sigma0,
                    (q + s.delta / 2.0) / s.sigma0,
                )
            })
            .collect();
        let tau = 1.0 / (s.sigma0 * s.sigma0) + s.alpha * s.alpha;
        let tau_sd = 1.0 / tau.sqrt();
        Model {
            s,
            n,
            ln_mass,
            tau_sd,
            ln_pref: (tau_sd / s.sigma0).ln(),
            spread: 1.0 + s.alpha * s.alpha * s.sigma0 * s.sigma0,
        }
    }

    fn q(&self, i: i64) -> f64 {
        i as f64 * self.s.delta
    }

    fn term(&self, i: i64, y: f64) -> BinTerm {
        let q = self.q(i);
        let alpha = self.s.alpha;
        if alpha == 0.0 {
            return BinTerm {
                ln_w: self.ln_mass[(i + self.n) as usize] + ln_norm_pdf(y - q),
                mean: q,
                var: 0.0,
            };
        }
        let half = self.s.delta / 2.0;
        let c = y - (1.0 - alpha) * q;
        let sd = self.tau_sd;
        let mu0 = alpha * c * sd * sd;
        let (ln_z, mt, vt) = truncated_moments((q - half - mu0) / sd, (q + half - mu0) / sd);
        let x0_mean = mu0 + sd * mt;
        BinTerm {
            ln_w: self.ln_pref + ln_norm_pdf(0.0) - c * c / (2.0 * self.spread) + ln_z,
            mean: q + alpha * (x0_mean - q),
            var: alpha * alpha * sd * sd * vt,
        }
    }

    /// Every bin whose weight at `y` is within `e^-60` of the largest.
    /// Bin weights are log-concave in the bin index, so the search climbs
    /// to the mode and walks outward until the weights become negligible.
    fn terms(&self, y: f64, out: &mut Vec<BinTerm>) {
        out.clear();
        let s0sq = self.s.sigma0 * self.s.sigma0;
        let guess = (y * s0sq / (1.0 + s0sq) / self.s.delta).round() as i64;
        let mut i = guess.clamp(-self.n, self.n);
        let mut cur = self.term(i, y);
        loop {
            let mut moved = false;
            for step in [1, -1] {
                let j = i + step;
                if j.abs() <= self.n {
                    let t = self.term(j, y);
                    if t.ln_w > cur.ln_w {
                        i = j;
                        cur = t;
                        moved = true;
                        break;
                    }
                }
            }
            if !moved {
                break;
            }
        }
        let floor = cur.ln_w - LN_NEGLIGIBLE;
        out.push(cur);
        for step in [1, -1] {
            let mut j = i + step;
            while j.abs() <= self.n {
                let t = self.term(j, y);
                if t.ln_w < floor {
                    break;
                }
                out.push(t);
                j += step;
            }
        }
    }

    fn support_nearest(&self, y: f64) -> f64 {
        let i = (y / self.s.delta).round().clamp(-self.n as f64, self.n as f64);
        let q = i * self.s.delta;
        let half_width = self.s.alpha * self.s.delta / 2.0;
        y.clamp(q - half_width, q + half_width)
    }

    fn mmse(terms: &[BinTerm]) -> f64 {
        let top = terms.iter().map(|t| t.ln_w).fold(f64::NEG_INFINITY, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for t in terms {
            let w = (t.ln_w - top).exp();
            num += w * t.mean;
            den += w;
        }
        num / den
    }

    /// Joint density of `y` times the conditional squared error of the
    /// estimate, `Σ_i w_i(y)·(var_i + (mean_i − x̂)²)`.
    fn error_density(&self, y: f64, decoder: Decoder, buf: &mut Vec<BinTerm>) -> f64 {
        self.terms(y, buf);
        let top = buf.iter().map(|t| t.ln_w).fold(f64::NEG_INFINITY, f64::max);
        if top < -745.0 {
            return 0.0;
        }
        let est = match decoder {
            Decoder::Mmse => Model::mmse(buf),
            Decoder::Mle => self.support_nearest(y),
            Decoder::ScaledMle(c) => c * self.support_nearest(y),
        };
        let mut acc = 0.0;
        for t in buf.iter() {
            acc += (t.ln_w - top).exp() * (t.var + (t.mean - est).powi(2));
        }
        acc * top.exp()
    }
}

/// `k²·E[u₁²]` in closed form, bin by bin, with the bound on the mass
/// outside the kept bins as its error.
pub fn exact_first_stage_cost(s: &ScalarStrategy, k2: f64) -> ExactCost {
    let n = s.max_bin();
    let (d, sig) = (s.delta, s.sigma0);
    let mut sum = 0.0;
    // pair ±i so the result is symmetric to the last bit
    for i in (0..=n).rev() {
        let q = i as f64 * d;
        let (ln_z, mt, vt) = truncated_moments((q - d / 2.0) / sig, (q + d / 2.0) / sig);
        let per = ln_z.exp() * (sig * sig * vt + (sig * mt - q).powi(2));
        sum += if i == 0 { per } else { 2.0 * per };
    }
    let scale = k2 * (1.0 - s.alpha).powi(2);
    let tail = scale * (d / 2.0).powi(2) * 2.0 * norm_sf((n as f64 + 0.5) * d / sig);
    let j1 = scale * sum;
    ExactCost {
        j1,
        j2: 0.0,
        total: j1,
        j1_error: tail + 1e-15 * j1,
        j2_error: 0.0,
    }
}

/// Second-stage estimator for one strategy, reusable across observations.
pub struct ScalarEstimator {
    model: Model,
}

impl ScalarEstimator {
    pub fn new(s: ScalarStrategy) -> Self {
        ScalarEstimator {
            model: Model::new(s),
        }
    }

    pub fn estimate(&self, decoder: Decoder, y: f64) -> f64 {
        match decoder {
            Decoder::Mmse => {
                let mut buf = Vec::with_capacity(16);
                self.model.terms(y, &mut buf);
                Model::mmse(&buf)
            }
            Decoder::Mle => self.model.support_nearest(y),
            Decoder::ScaledMle(c) => c * self.model.support_nearest(y),
        }
    }
}

/// `E[X1 | Y = y]`.
pub fn mmse_estimate(s: &ScalarStrategy, y: f64) -> f64 {
    ScalarEstimator::new(*s).estimate(Decoder::Mmse, y)
}

/// Estimate produced by `decoder` at observation `y`.
pub fn decode(s: &ScalarStrategy, decoder: Decoder, y: f64) -> f64 {
    ScalarEstimator::new(*s).estimate(decoder, y)
}

/// Integration breakpoints on `[0, 8σ0 + 10]`, aligned to half-bins where
/// the estimate can jump.
fn breaks(s: &ScalarStrategy, decoder: Decoder) -> Vec<f64> {
    let y_max = 8.0 * s.sigma0 + 10.0;
    let half = s.delta / 2.0;
    // MMSE error density is smooth, so pieces only need to line up with bin
    // centres and midpoints; MLE-type decoders jump at midpoints and kink at
    // the slopey interval edges, so they keep unit-scale pieces.
    let h = match decoder {
        Decoder::Mmse => half.max(2.0),
        _ if half >= 1.0 => half / half.ceil(),
        _ => half,
    };
    let pieces = (y_max / h).ceil() as usize;
    (0..=pieces).map(|i| (i as f64 * h).min(y_max)).collect()
}

/// `E[(X1 − x̂(Y))²]` by adaptive quadrature over `y`; the integrand is even
/// so only `y ≥ 0` is integrated.
pub fn exact_second_stage_cost(s: &ScalarStrategy, decoder: Decoder) -> Result<ExactCost> {
    if let Decoder::ScaledMle(c) = decoder {
        require(c > 0.0 && c <= 1.0, "c", c, "0 < c ≤ 1")?;
    }
    let model = Model::new(*s);
    let br = breaks(s, decoder);
    let mut buf = Vec::with_capacity(64);
    let r = integrate(
        |y| model.error_density(y, decoder, &mut buf),
        &br,
        0.5e-9,
        1e-6,
        8 * br.len() + 4096,
    )?;
    let j2 = 2.0 * r.value;
    Ok(ExactCost {
        j1: 0.0,
        j2,
        total: j2,
        j1_error: 0.0,
        j2_error: 2.0 * r.error,
    })
}

/// First plus second stage cost.
pub fn exact_total_cost(s: &ScalarStrategy, k2: f64, decoder: Decoder) -> Result<ExactCost> {
    let a = exact_first_stage_cost(s, k2);
    let b = exact_second_stage_cost(s, decoder)?;
    Ok(ExactCost {
        j1: a.j1,
        j2: b.j2,
        total: a.j1 + b.j2,
        j1_error: a.j1_error,
        j2_error: b.j2_error,
    })
}

/// Scale `c ∈ (0, 1]` minimizing the scaled-MLE second-stage cost.
pub fn best_scaled_mle(s: &ScalarStrategy) -> Result<(f64, ExactCost)> {
    let f = |c: f64| {
        exact_second_stage_cost(s, Decoder::ScaledMle(c))
            .map(|r| r.j2)
            .unwrap_or(f64::INFINITY)
    };
    let m = golden_section(f, 0.05, 1.0, 1e-6);
    Ok((m.x, exact_second_stage_cost(s, Decoder::ScaledMle(m.x))?))
}

/// Result of [`optimize_scalar`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarOptimum {
    pub strategy: ScalarStrategy,
    pub cost: ExactCost,
}

/// Search effort for [`optimize_scalar_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub delta_points: usize,
    pub alpha_grid: &'static [f64],
    pub restarts: usize,
    /// Golden-section tolerance on `ln Δ`.
    pub delta_tol: f64,
}

impl SearchOptions {
    /// Lighter search for grid sweeps. The cost is flat at its minimum, so a
    /// 1e-4 tolerance on `ln Δ` moves the optimum value by about 1e-8.
    pub fn sweep() -> Self {
        SearchOptions {
            delta_points: 28,
            restarts: 2,
            delta_tol: 1e-4,
            ..SearchOptions::default()
        }
    }
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            delta_points: 48,
            alpha_grid: &[0.0, 0.01, 0.02, 0.04, 0.07, 0.1, 0.15, 0.2, 0.3, 0.45, 0.6, 0.75, 0.9],
            restarts: 3,
            delta_tol: 1e-7,
        }
    }
}

pub fn optimize_scalar(params: &ProblemParams, family: Family, decoder: Decoder) -> Result<ScalarOptimum> {
    optimize_scalar_with(params, family, decoder, SearchOptions::default())
}

/// Minimizes the exact total cost over `Δ ∈ [min(σ0/50, 1), 20σ0]` (and over
/// `α ∈ [0, 0.9]` for the slopey family): a log-spaced scan followed by
/// golden-section or Nelder–Mead refinement from the best starts.
pub fn optimize_scalar_with(
    params: &ProblemParams,
    family: Family,
    decoder: Decoder,
    opts: SearchOptions,
) -> Result<ScalarOptimum> {
    if params.m != 1 {
        return Err(Error::InvalidParameter(format!(
            "exact scalar evaluation needs m = 1, got m = {}",
            params.m
        )));
    }
    let sigma0 = params.sigma0();
    let k2 = params.k2;
    let cost = |delta: f64, alpha: f64| -> f64 {
        ScalarStrategy::new(delta, alpha, sigma0)
            .and_then(|s| exact_total_cost(&s, k2, decoder))
            .map(|c| c.total)
            .unwrap_or(f64::INFINITY)
    };
    let (lo, hi) = ((sigma0 / 50.0).min(1.0), 20.0 * sigma0);
    let grid = log_space(lo, hi, opts.delta_points.max(3));
    let pure = multistart_log(|d| cost(d, 0.0), &grid, opts.restarts, opts.delta_tol);
    let (delta, alpha) = match family {
        Family::PureQuant => (pure.x, 0.0),
        Family::Slopey => {
            let mut scan: Vec<(f64, f64, f64)> = Vec::new();
            for &a in opts.alpha_grid {
                for &d in &grid {
                    scan.push((cost(d, a), d, a));
                }
            }
            scan.push((pure.f, pure.x, 0.0));
            scan.sort_by(|x, y| x.0.total_cmp(&y.0));
            let step_u = (hi / lo).ln() / (grid.len() - 1) as f64;
            let mut best = (pure.f, pure.x, 0.0);
            let starts: Vec<(f64, f64, f64)> = scan
                .iter()
                .take(opts.restarts)
                .copied()
                .chain(std::iter::once((pure.f, pure.x, 0.0)))
                .collect();
            for (f0, d0, a0) in starts {
                if f0 < best.0 {
                    best = (f0, d0, a0);
                }
                let r = nelder_mead(
                    |x| cost(x[0].exp(), x[1]),
                    &[d0.ln(), a0],
                    &[step_u, 0.02],
                    &[lo.ln(), 0.0],
                    &[hi.ln(), 0.9],
                    1e-7,
                    1e-13,
                    600,
                );
                if r.f < best.0 {
                    best = (r.f, r.x[0].exp(), r.x[1]);
                }
            }
            (best.1, best.2)
        }
    };
    let strategy = ScalarStrategy::new(delta, alpha, sigma0)?;
    let cost = exact_total_cost(&strategy, k2, decoder)?;
    Ok(ScalarOptimum { strategy, cost })
}

/// Cheapest of the optimized exact pure quantizer (MMSE decoding) and the
/// two linear strategies, with a flag telling whether quantization won.
pub fn best_exact_scalar(params: &ProblemParams) -> Result<(f64, Option<ScalarOptimum>)> {
    let opt = optimize_scalar(params, Family::PureQuant, Decoder::Mmse)?;
    let lin = linear_costs(params);
    let linear = lin.zero_input.min(lin.zero_forcing);
    if opt.cost.total < linear {
        Ok((opt.cost.total, Some(opt)))
    } else {
        Ok((linear, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_validation() {
        assert!(ScalarStrategy::new(0.0, 0.0, 1.0).is_err());
        assert!(ScalarStrategy::new(1.0, 1.0, 1.0).is_err());
        assert!(ScalarStrategy::new(1.0, -0.1, 1.0).is_err());
        assert!(ScalarStrategy::new(1.0, 0.5, 0.0).is_err());
        assert_eq!(ScalarStrategy::pure(9.92, 500.0).unwrap().max_bin(), 406);
    }

    #[test]
    fn truncated_moments_match_closed_forms() {
        let (lz, m, v) = truncated_moments(-1.0, 1.0);
        assert!((lz.exp() - 0.682_689_492_137_085_9).abs() < 1e-15);
        assert!(m.abs() < 1e-16);
        // 1 − 2φ(1)/(Φ(1) − Φ(−1))
        assert!((v - 0.291_125_094_772_793_2).abs() < 1e-13);
        let (_, m, v) = truncated_moments(0.0, f64::INFINITY);
        assert!((m - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-14);
        assert!((v - (1.0 - 2.0 / std::f64::consts::PI)).abs() < 1e-14);
        // deep one-sided tail: mean ≈ a + 1/a
        let (_, m, v) = truncated_moments(-41.0, -40.0);
        assert!((m + 40.0 + 1.0 / 40.0).abs() < 1e-3 && v > 0.0 && v < 1e-3);
    }

    #[test]
    fn first_stage_limits() {
        let s = ScalarStrategy::pure(0.05, 5.0).unwrap();
        let j1 = exact_first_stage_cost(&s, 1.0).j1;
        let want = 0.05f64.powi(2) / 12.0;
        assert!((j1 - want).abs() / want < 1e-3);
        let s = ScalarStrategy::new(2.0, 0.999_999, 5.0).unwrap();
        assert!(exact_first_stage_cost(&s, 1.0).j1 < 1e-11);
        let s = ScalarStrategy::pure(9.92, 500.0).unwrap();
        let j1 = exact_first_stage_cost(&s, 1e-4);
        assert!((j1.j1 - 8.2e-4).abs() / 8.2e-4 < 0.05);
        assert!(j1.j1_error < 1e-12);
    }

    #[test]
    fn first_stage_single_bin() {
        // one bin swallowing the whole source: E[x0²] = σ0²
        let s = ScalarStrategy::pure(1e3, 2.0).unwrap();
        assert!((exact_first_stage_cost(&s, 1.0).j1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mmse_matches_dense_trapezoid() {
        let s = ScalarStrategy::pure(4.0, 5.0).unwrap();
        let got = mmse_estimate(&s, 2.0);
        assert!((got - 1.698_955_772_659_409_6).abs() < 1e-8, "{got}");
    }

    #[test]
    fn mmse_symmetry_and_limits() {
        for s in [
            ScalarStrategy::pure(4.0, 5.0).unwrap(),
            ScalarStrategy::new(3.0, 0.3, 2.0).unwrap(),
        ] {
            for y in [0.3, 1.7, 5.5, 12.0] {
                let a = mmse_estimate(&s, y);
                let b = mmse_estimate(&s, -y);
                assert!((a + b).abs() < 1e-12 * a.abs().max(1.0), "{a} {b}");
            }
            assert!(mmse_estimate(&s, 0.0).abs() < 1e-14);
        }
        let wide = ScalarStrategy::pure(1e4, 5.0).unwrap();
        assert!(mmse_estimate(&wide, 3.7).abs() < 1e-12);
        let fine = ScalarStrategy::pure(20.0, 1e3).unwrap();
        assert!((mmse_estimate(&fine, 200.0) - 200.0).abs() < 1e-12);
    }

    #[test]
    fn mmse_slopey_matches_direct_integral() {
        // posterior mean by direct quadrature over x0
        let s = ScalarStrategy::new(3.0, 0.4, 2.0).unwrap();
        let y = 1.3;
        let x1 = |x0: f64| {
            let q = (x0 / 3.0).round() * 3.0;
            q + 0.4 * (x0 - q)
        };
        let mut br: Vec<f64> = (-7..=7).map(|i| i as f64 * 3.0 - 1.5).collect();
        br.insert(0, -30.0);
        br.push(30.0);
        let num = integrate(
            |x| x1(x) * (ln_norm_pdf(x / 2.0) + ln_norm_pdf(y - x1(x))).exp(),
            &br,
            1e-15,
            1e-13,
            4000,
        )
        .unwrap()
        .value;
        let den = integrate(
            |x| (ln_norm_pdf(x / 2.0) + ln_norm_pdf(y - x1(x))).exp(),
            &br,
            1e-15,
            1e-13,
            4000,
        )
        .unwrap()
        .value;
        assert!((mmse_estimate(&s, y) - num / den).abs() < 1e-10);
    }

    #[test]
    fn decoders_and_support() {
        let s = ScalarStrategy::new(4.0, 0.5, 5.0).unwrap();
        assert_eq!(decode(&s, Decoder::Mle, 4.5), 4.5);
        assert_eq!(decode(&s, Decoder::Mle, 6.5), 7.0);
        assert_eq!(decode(&s, Decoder::Mle, 5.9), 5.0);
        assert_eq!(decode(&s, Decoder::ScaledMle(0.5), 6.5), 3.5);
        let p = ScalarStrategy::pure(4.0, 5.0).unwrap();
        assert_eq!(decode(&p, Decoder::Mle, 6.5), 8.0);
    }

    #[test]
    fn second_stage_limits() {
        let wide = ScalarStrategy::pure(1e4, 5.0).unwrap();
        assert!(exact_second_stage_cost(&wide, Decoder::Mmse).unwrap().j2 < 1e-12);
        // Δ → 0 approaches the linear MMSE error σ0²/(σ0²+1)
        let fine = ScalarStrategy::pure(0.02, 1.0).unwrap();
        let j2 = exact_second_stage_cost(&fine, Decoder::Mmse).unwrap().j2;
        assert!((j2 - 0.5).abs() < 1e-3, "{j2}");
    }

    #[test]
    fn benchmark_point_pieces() {
        let s = ScalarStrategy::pure(9.92, 500.0).unwrap();
        let c = exact_total_cost(&s, 1e-4, Decoder::Mle).unwrap();
        assert!((c.j2 - 6.7e-5).abs() / 6.7e-5 < 0.05, "{c:?}");
        assert!((c.total - 8.894e-4).abs() / 8.894e-4 < 0.01, "{c:?}");
        // nearest-point error is Δ whenever the noise leaves (−Δ/2, Δ/2)
        let approx = 2.0 * 9.92f64.powi(2) * norm_sf(4.96);
        assert!((c.j2 - approx).abs() / approx < 1e-3, "{c:?}");
        let mmse = exact_second_stage_cost(&s, Decoder::Mmse).unwrap();
        assert!(mmse.j2 < c.j2);
    }

    #[test]
    fn mmse_beats_mle_and_scaled() {
        for s in [
            ScalarStrategy::pure(4.0, 5.0).unwrap(),
            ScalarStrategy::new(5.0, 0.1, 3.0).unwrap(),
        ] {
            let mmse = exact_second_stage_cost(&s, Decoder::Mmse).unwrap().j2;
            let mle = exact_second_stage_cost(&s, Decoder::Mle).unwrap().j2;
            let (c, scaled) = best_scaled_mle(&s).unwrap();
            assert!(mmse <= mle && mmse <= scaled.j2, "{mmse} {mle} {c} {scaled:?}");
        }
    }

    #[test]
    fn optimize_requires_scalar() {
        let p = ProblemParams::from_k_sigma0(2, 0.2, 5.0).unwrap();
        assert!(optimize_scalar(&p, Family::PureQuant, Decoder::Mmse).is_err());
    }

    #[test]
    fn slopey_never_worse_than_pure() {
        let p = ProblemParams::from_k_sigma0(1, 0.5, 2.0).unwrap();
        let pure = optimize_scalar(&p, Family::PureQuant, Decoder::Mmse).unwrap();
        let slopey = optimize_scalar(&p, Family::Slopey, Decoder::Mmse).unwrap();
        assert!(slopey.cost.total <= pure.cost.total + 1e-9);
    }
}
