//! Closed-form upper and lower bounds on the optimal cost of
//! `W(m, k², σ0²)`, and the nested optimizers over the free parameters.
//!
//! Costs are per-dimension and normalized to unit observation-noise
//! variance. `P` always denotes the per-dimension first-stage power.

use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::optimize::{golden_section, log_space, multistart_log, nelder_mead};
use crate::specfn::{c_m, d_m, ln_psi};

/// Problem instance `W(m, k², σ0²)`; the observation noise variance is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub m: usize,
    pub k2: f64,
    pub sigma0_sq: f64,
}

impl ProblemParams {
    pub fn new(m: usize, k2: f64, sigma0_sq: f64) -> Result<Self> {
        require(m >= 1, "m", m as f64, "m ≥ 1")?;
        require(k2 > 0.0 && k2.is_finite(), "k²", k2, "k² > 0")?;
        require(
            sigma0_sq > 0.0 && sigma0_sq.is_finite(),
            "σ0²",
            sigma0_sq,
            "σ0² > 0",
        )?;
        Ok(ProblemParams { m, k2, sigma0_sq })
    }

    /// Convenience constructor from `k` and `σ0` rather than their squares.
    pub fn from_k_sigma0(m: usize, k: f64, sigma0: f64) -> Result<Self> {
        require(k > 0.0, "k", k, "k > 0")?;
        require(sigma0 > 0.0, "σ0", sigma0, "σ0 > 0")?;
        ProblemParams::new(m, k * k, sigma0 * sigma0)
    }

    pub fn k(&self) -> f64 {
        self.k2.sqrt()
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0_sq.sqrt()
    }
}

/// Which formula or strategy produced a bound value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    LatticeTight,
    LatticeLoose,
    VectorLower,
    FiniteLower,
    ZeroInput,
    ZeroForcing,
    BestUpper,
    /// Exactly evaluated scalar quantization (quadrature, MMSE decoding).
    ExactScalar,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::LatticeTight => "lattice_tight",
            Branch::LatticeLoose => "lattice_loose",
            Branch::VectorLower => "vector_lower",
            Branch::FiniteLower => "finite_lower",
            Branch::ZeroInput => "zero_input",
            Branch::ZeroForcing => "zero_forcing",
            Branch::BestUpper => "best_upper",
            Branch::ExactScalar => "exact_scalar",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A bound value with the internal variables that attain it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: f64,
    pub p_star: f64,
    pub sigma_g_sq: Option<f64>,
    pub l: Option<f64>,
    pub branch: Branch,
}

impl BoundResult {
    fn plain(value: f64, p_star: f64, branch: Branch) -> Self {
        BoundResult {
            value,
            p_star,
            sigma_g_sq: None,
            l: None,
            branch,
        }
    }
}

/// Lower bound on the optimum used when an exponent underflows.
const LN_UNDERFLOW: f64 = -700.0;

fn p_grid(params: &ProblemParams, n: usize) -> Vec<f64> {
    log_space(1e-6, (4.0 * params.sigma0_sq).max(100.0), n)
}

// ---------------------------------------------------------------------------
// Upper bounds
// ---------------------------------------------------------------------------

/// Tight lattice-quantization upper bound at power `P`:
/// `k²P + (√ψ(m+2, r_p) + √(P/ξ²)·√ψ(m, r_p))²` with `r_p² = mP/ξ²`.
pub fn upper_lattice_at_p(params: &ProblemParams, xi: f64, p: f64) -> Result<f64> {
    require(xi >= 1.0, "ξ", xi, "ξ ≥ 1")?;
    require(p > 0.0 && p.is_finite(), "P", p, "P > 0")?;
    let m = params.m;
    let r_p = (m as f64 * p).sqrt() / xi;
    let a = (0.5 * ln_psi(m + 2, r_p)?).exp();
    let b = (p.sqrt() / xi) * (0.5 * ln_psi(m, r_p)?).exp();
    Ok(params.k2 * p + (a + b).powi(2))
}

/// Loose (Chernoff-style) form of the tight bound, defined for `P > ξ²`.
pub fn upper_lattice_loose_at_p(params: &ProblemParams, xi: f64, p: f64) -> Result<f64> {
    require(xi >= 1.0, "ξ", xi, "ξ ≥ 1")?;
    require(p > xi * xi, "P", p, "P > ξ²")?;
    let m = params.m as f64;
    let s = p / (xi * xi);
    let ln_tail = -m * s / 2.0 + (m + 2.0) / 2.0 * (1.0 + s.ln());
    Ok(params.k2 * p + (1.0 + s.sqrt()).powi(2) * ln_tail.exp())
}

/// Tight upper bound minimized over `P` (log grid, then golden section
/// around the three best grid points).
pub fn upper_lattice(params: &ProblemParams, xi: f64) -> Result<BoundResult> {
    require(xi >= 1.0, "ξ", xi, "ξ ≥ 1")?;
    let grid = p_grid(params, 200);
    let f = |p: f64| upper_lattice_at_p(params, xi, p).unwrap_or(f64::INFINITY);
    let best = multistart_log(f, &grid, 3, 1e-6);
    Ok(BoundResult::plain(best.f, best.x, Branch::LatticeTight))
}

/// Loose upper bound minimized over `P > ξ²`.
pub fn upper_lattice_loose(params: &ProblemParams, xi: f64) -> Result<BoundResult> {
    require(xi >= 1.0, "ξ", xi, "ξ ≥ 1")?;
    let lo = xi * xi * (1.0 + 1e-9);
    let hi = (4.0 * params.sigma0_sq).max(100.0).max(2.0 * lo);
    let grid = log_space(lo, hi, 200);
    let f = |p: f64| upper_lattice_loose_at_p(params, xi, p).unwrap_or(f64::INFINITY);
    let best = multistart_log(f, &grid, 3, 1e-6);
    Ok(BoundResult::plain(best.f, best.x, Branch::LatticeLoose))
}

/// Costs of the two linear strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearCosts {
    /// `u₁ = 0` followed by linear estimation: `σ0²/(σ0² + 1)`.
    pub zero_input: f64,
    /// `u₁ = −x₀`: `k²σ0²`.
    pub zero_forcing: f64,
}

pub fn linear_costs(params: &ProblemParams) -> LinearCosts {
    LinearCosts {
        zero_input: params.sigma0_sq / (params.sigma0_sq + 1.0),
        zero_forcing: params.k2 * params.sigma0_sq,
    }
}

/// Best of the two linear strategies and an already computed quantization
/// bound. Ties favor the quantization bound.
pub fn best_of(quantization: BoundResult, params: &ProblemParams) -> BoundResult {
    let lin = linear_costs(params);
    let mut best = quantization;
    if lin.zero_input < best.value {
        best = BoundResult::plain(lin.zero_input, 0.0, Branch::ZeroInput);
    }
    if lin.zero_forcing < best.value {
        best = BoundResult::plain(lin.zero_forcing, params.sigma0_sq, Branch::ZeroForcing);
    }
    best
}

/// Minimum of the tight lattice bound and the two linear strategies; the
/// branch records the winner.
pub fn best_upper(params: &ProblemParams, xi: f64) -> Result<BoundResult> {
    Ok(best_of(upper_lattice(params, xi)?, params))
}

// ---------------------------------------------------------------------------
// Lower bounds
// ---------------------------------------------------------------------------

/// `κ(P, σ0²) = σ0² / (σ0² + P + 2σ0√P + 1)`.
pub fn kappa(p: f64, sigma0_sq: f64) -> f64 {
    let s0 = sigma0_sq.sqrt();
    sigma0_sq / (sigma0_sq + p + 2.0 * s0 * p.sqrt() + 1.0)
}

#[inline]
fn pos_gap_sq(kap: f64, p: f64) -> f64 {
    (kap.sqrt() - p.sqrt()).max(0.0).powi(2)
}

/// Vector lower bound on the total cost at power `P`:
/// `k²P + ((√κ − √P)⁺)²`.
pub fn lower_vector_at_p(params: &ProblemParams, p: f64) -> Result<f64> {
    require(p >= 0.0 && p.is_finite(), "P", p, "P ≥ 0")?;
    Ok(params.k2 * p + pos_gap_sq(kappa(p, params.sigma0_sq), p))
}

/// [`lower_vector_at_p`] minimized over `P ≥ 0`.
pub fn lower_vector(params: &ProblemParams) -> BoundResult {
    let f = |p: f64| lower_vector_at_p(params, p).unwrap_or(f64::INFINITY);
    let mut best = multistart_log(f, &p_grid(params, 200), 3, 1e-6);
    let at_zero = f(0.0);
    if at_zero <= best.f {
        best.x = 0.0;
        best.f = at_zero;
    }
    BoundResult::plain(best.f, best.x, Branch::VectorLower)
}

/// The truncation constants `c_m(L)` and `d_m(L)` for one `(m, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub l: f64,
    pub c: f64,
    pub d: f64,
}

impl Truncation {
    pub fn new(m: usize, l: f64) -> Result<Self> {
        Ok(Truncation {
            l,
            c: c_m(m, l)?,
            d: d_m(m, l)?,
        })
    }
}

/// `κ₂(P, σ0², σ_G², L)`, the distortion floor implied by the capacity of
/// the truncated test channel.
pub fn kappa2(m: usize, p: f64, sigma0_sq: f64, sigma_g_sq: f64, t: &Truncation) -> f64 {
    let s0 = sigma0_sq.sqrt();
    let denom = t.c.powf(2.0 / m as f64)
        * (1.0 - t.d).exp()
        * ((s0 + p.sqrt()).powi(2) + t.d * sigma_g_sq);
    sigma0_sq * sigma_g_sq / denom
}

/// `η(P, σ0², σ_G², L)`, composed in log space; returns 0 when the
/// exponent underflows.
pub fn eta(m: usize, p: f64, sigma0_sq: f64, sigma_g_sq: f64, t: &Truncation) -> f64 {
    let gap = kappa2(m, p, sigma0_sq, sigma_g_sq, t).sqrt() - p.sqrt();
    if gap <= 0.0 {
        return 0.0;
    }
    let mf = m as f64;
    let ln_eta = 0.5 * mf * sigma_g_sq.ln() - t.c.ln() - mf * t.l * t.l * (sigma_g_sq - 1.0) / 2.0
        + 2.0 * gap.ln();
    if ln_eta < LN_UNDERFLOW {
        0.0
    } else {
        ln_eta.exp()
    }
}

/// Finite-length lower bound at fixed `(P, σ_G², L)`: `k²P + η`.
pub fn lower_finite_at(params: &ProblemParams, p: f64, sigma_g_sq: f64, l: f64) -> Result<f64> {
    require(p >= 0.0 && p.is_finite(), "P", p, "P ≥ 0")?;
    require(sigma_g_sq >= 1.0, "σ_G²", sigma_g_sq, "σ_G² ≥ 1")?;
    let t = Truncation::new(params.m, l)?;
    Ok(params.k2 * p + eta(params.m, p, params.sigma0_sq, sigma_g_sq, &t))
}

/// How the truncation parameter `L` is chosen inside the sup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LChoice {
    /// Hold `L` fixed (the default is `L = 2`).
    Fixed(f64),
    /// Search `L` over `[lo, hi]` jointly with `σ_G²`.
    Search { lo: f64, hi: f64 },
}

/// Options for [`lower_finite_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteOptions {
    pub l_choice: LChoice,
    /// Number of log-spaced `P` grid points in the outer search.
    pub p_points: usize,
    /// Grid points per axis in the inner `(σ_G², L)` search.
    pub inner_points: usize,
}

impl Default for FiniteOptions {
    fn default() -> Self {
        FiniteOptions {
            l_choice: LChoice::Fixed(2.0),
            p_points: 200,
            inner_points: 32,
        }
    }
}

impl FiniteOptions {
    /// Joint search over `σ_G² ≥ 1` and `L ∈ [0.5, 8]`.
    pub fn searched_l() -> Self {
        FiniteOptions {
            l_choice: LChoice::Search { lo: 0.5, hi: 8.0 },
            ..Default::default()
        }
    }
}

/// Truncation used for the corner that reproduces the vector bound.
const CORNER_L: f64 = 64.0;

#[derive(Debug, Clone, Copy)]
struct InnerSup {
    eta: f64,
    sigma_g_sq: f64,
    l: f64,
}

struct FiniteSearch<'a> {
    params: &'a ProblemParams,
    opts: FiniteOptions,
    corner: Truncation,
    fixed: Option<Truncation>,
}

impl<'a> FiniteSearch<'a> {
    fn new(params: &'a ProblemParams, opts: FiniteOptions) -> Result<Self> {
        let fixed = match opts.l_choice {
            LChoice::Fixed(l) => {
                require(l > 0.0, "L", l, "L > 0")?;
                Some(Truncation::new(params.m, l)?)
            }
            LChoice::Search { lo, hi } => {
                require(lo > 0.0 && hi > lo, "L range", lo, "0 < lo < hi")?;
                None
            }
        };
        Ok(FiniteSearch {
            params,
            opts,
            corner: Truncation::new(params.m, CORNER_L)?,
            fixed,
        })
    }

    fn eta_at(&self, p: f64, sg2: f64, t: &Truncation) -> f64 {
        eta(self.params.m, p, self.params.sigma0_sq, sg2, t)
    }

    /// sup over `(σ_G², L)` of `η` at fixed `P`.
    fn inner(&self, p: f64) -> InnerSup {
        let m = self.params.m;
        let mut best = InnerSup {
            eta: self.eta_at(p, 1.0, &self.corner),
            sigma_g_sq: 1.0,
            l: CORNER_L,
        };
        let hi = (1.0 + 40.0 * p).ln();
        let n = self.opts.inner_points.max(2);
        let sg_grid: Vec<f64> = (0..n)
            .map(|i| (hi * i as f64 / (n - 1) as f64).exp())
            .collect();
        match (self.fixed, self.opts.l_choice) {
            (Some(t), _) => {
                let vals: Vec<f64> = sg_grid.iter().map(|&s| self.eta_at(p, s, &t)).collect();
                let (i, &v) = vals
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
                    .unwrap();
                if v > best.eta {
                    best = InnerSup {
                        eta: v,
                        sigma_g_sq: sg_grid[i],
                        l: t.l,
                    };
                }
                if v > 0.0 && hi > 0.0 {
                    let lo_u = sg_grid[i.saturating_sub(1)].ln();
                    let hi_u = sg_grid[(i + 1).min(n - 1)].ln();
                    let g = golden_section(|u| -self.eta_at(p, u.exp(), &t), lo_u, hi_u, 1e-8);
                    if -g.f > best.eta {
                        best = InnerSup {
                            eta: -g.f,
                            sigma_g_sq: g.x.exp(),
                            l: t.l,
                        };
                    }
                }
            }
            (None, LChoice::Search { lo, hi: l_hi }) => {
                let l_grid: Vec<f64> = (0..n)
                    .map(|i| lo + (l_hi - lo) * i as f64 / (n - 1) as f64)
                    .collect();
                let truncs: Vec<Option<Truncation>> =
                    l_grid.iter().map(|&l| Truncation::new(m, l).ok()).collect();
                let mut grid_best: Option<(f64, f64, f64)> = None;
                for &s in &sg_grid {
                    for t in truncs.iter().flatten() {
                        let v = self.eta_at(p, s, t);
                        if grid_best.map_or(true, |g| v > g.0) {
                            grid_best = Some((v, s, t.l));
                        }
                    }
                }
                if let Some((v, s, l)) = grid_best {
                    if v > best.eta {
                        best = InnerSup {
                            eta: v,
                            sigma_g_sq: s,
                            l,
                        };
                    }
                    if v > 0.0 {
                        let f = |x: &[f64]| {
                            Truncation::new(m, x[1])
                                .map(|t| -self.eta_at(p, x[0].exp(), &t))
                                .unwrap_or(0.0)
                        };
                        let step_u = (hi / (n - 1) as f64).max(1e-6);
                        let step_l = (l_hi - lo) / (n - 1) as f64;
                        let r = nelder_mead(
                            f,
                            &[s.ln(), l],
                            &[step_u, step_l],
                            &[0.0, lo],
                            &[hi.max(1e-12), l_hi],
                            1e-7,
                            0.0,
                            400,
                        );
                        if -r.f > best.eta {
                            best = InnerSup {
                                eta: -r.f,
                                sigma_g_sq: r.x[0].exp(),
                                l: r.x[1],
                            };
                        }
                    }
                }
            }
            (None, LChoice::Fixed(_)) => unreachable!("fixed truncation is precomputed"),
        }
        best
    }

    fn outer(&self, p: f64) -> f64 {
        self.params.k2 * p + self.inner(p).eta
    }
}

/// Finite-length lower bound with default options (`L` fixed at 2).
pub fn lower_finite(params: &ProblemParams) -> Result<BoundResult> {
    lower_finite_with(params, FiniteOptions::default())
}

/// `inf_P [k²P + sup_{σ_G², L} η]`. The `(σ_G² = 1, L = 64)` corner is always
/// evaluated, so the result is never below the optimized vector bound.
pub fn lower_finite_with(params: &ProblemParams, opts: FiniteOptions) -> Result<BoundResult> {
    let search = FiniteSearch::new(params, opts)?;
    let grid = p_grid(params, opts.p_points.max(2));
    let best = multistart_log(|p| search.outer(p), &grid, 3, 1e-6);
    let (p_star, value) = {
        let at_zero = search.outer(0.0);
        if at_zero <= best.f {
            (0.0, at_zero)
        } else {
            (best.x, best.f)
        }
    };
    let inner = search.inner(p_star);
    Ok(BoundResult {
        value,
        p_star,
        sigma_g_sq: Some(inner.sigma_g_sq),
        l: Some(inner.l),
        branch: Branch::FiniteLower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfn::psi;

    fn params(m: usize, k: f64, s0: f64) -> ProblemParams {
        ProblemParams::from_k_sigma0(m, k, s0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ProblemParams::new(0, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(1, 0.0, 1.0).is_err());
        assert!(ProblemParams::new(1, 1.0, -1.0).is_err());
        assert!(ProblemParams::from_k_sigma0(1, 0.0, 5.0).is_err());
    }

    #[test]
    fn lattice_at_p_composes_tail_values() {
        let pr = params(1, 0.2, 5.0);
        let want = 4.0 * 0.04 + (psi(3, 2.0).unwrap().sqrt() + 2.0 * psi(1, 2.0).unwrap().sqrt()).powi(2);
        let got = upper_lattice_at_p(&pr, 1.0, 4.0).unwrap();
        assert!((got - want).abs() < 1e-14);
        assert!(upper_lattice_at_p(&pr, 1.0, 0.0).is_err());
        // continuity as P → 0
        let a = upper_lattice_at_p(&pr, 1.0, 1e-12).unwrap();
        let b = upper_lattice_at_p(&pr, 1.0, 1e-10).unwrap();
        assert!((a - b).abs() < 1e-4 && a > 0.99);
    }

    #[test]
    fn loose_bound_closed_form() {
        let pr = ProblemParams::new(1, 0.04, 25.0).unwrap();
        let want = 0.08 + (1.0 + 2f64.sqrt()).powi(2) * (-1.0 + 1.5 * (1.0 + 2f64.ln())).exp();
        assert!((upper_lattice_loose_at_p(&pr, 1.0, 2.0).unwrap() - want).abs() < 1e-12);
        assert!(upper_lattice_loose_at_p(&pr, 1.0, 1.0).is_err());
        let tight = upper_lattice_at_p(&pr, 1.0, 34.0).unwrap();
        assert!(upper_lattice_loose_at_p(&pr, 1.0, 34.0).unwrap() >= tight);
        // the exponential term vanishes for large m at fixed P/ξ² = 20
        let big = ProblemParams::new(400, 0.04, 25.0).unwrap();
        let v = upper_lattice_loose_at_p(&big, 1.0, 20.0).unwrap();
        assert!((v - 0.8).abs() < 1e-12);
    }

    #[test]
    fn vector_examples() {
        let pr = params(1, 0.2, 5.0);
        assert!((lower_vector_at_p(&pr, 0.0).unwrap() - 25.0 / 26.0).abs() < 1e-15);
        assert!((kappa(0.25, 25.0) - 0.8).abs() < 1e-15);
        let want = 0.25 * 0.04 + (0.8f64.sqrt() - 0.5).powi(2);
        assert!((lower_vector_at_p(&pr, 0.25).unwrap() - want).abs() < 1e-15);
        // clamp once P ≥ κ
        assert!((lower_vector_at_p(&pr, 1.0).unwrap() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn finite_recovers_vector_in_the_limit() {
        let pr = params(1, 0.2, 5.0);
        for p in [0.0, 0.1, 0.3, 0.7] {
            let a = lower_finite_at(&pr, p, 1.0, 50.0).unwrap();
            let b = lower_vector_at_p(&pr, p).unwrap();
            assert!((a - b).abs() <= 1e-6, "P = {p}: {a} vs {b}");
        }
    }

    #[test]
    fn finite_fixed_point_oracle() {
        // compose c_1(2), d_1(2) by hand
        let (c, d): (f64, f64) = (1.047_669_226_271_444_4, 0.773_741_303_549_923_2);
        let (s0, p, sg2, l) = (5.0f64, 0.5f64, 3.0f64, 2.0f64);
        let k2v = s0 * s0 * sg2 / (c * c * (1.0 - d).exp() * ((s0 + p.sqrt()).powi(2) + d * sg2));
        let eta_v = sg2.sqrt() / c * (-(l * l) * (sg2 - 1.0) / 2.0).exp() * (k2v.sqrt() - p.sqrt()).max(0.0).powi(2);
        let pr = params(1, 0.2, 5.0);
        let got = lower_finite_at(&pr, p, sg2, l).unwrap();
        assert!((got - (0.04 * p + eta_v)).abs() < 1e-13);
    }

    #[test]
    fn kappa2_tends_to_kappa() {
        let t = Truncation::new(3, 60.0).unwrap();
        for p in [0.01, 1.0, 10.0] {
            assert!((kappa2(3, p, 7.0, 1.0, &t) - kappa(p, 7.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn benchmark_lower_bound() {
        let pr = params(1, 0.01, 500.0);
        let r = lower_finite(&pr).unwrap();
        assert!((r.value - 3.170e-4).abs() / 3.170e-4 < 0.02, "{r:?}");
        assert_eq!(r.branch, Branch::FiniteLower);
    }

    #[test]
    fn dominance_on_a_few_points() {
        for (m, xi) in [(1, 1.0), (2, 2.0 / 3f64.sqrt())] {
            for (k, s0) in [(0.2, 5.0), (0.01, 500.0), (1.0, 0.5), (0.63, 1.0), (5.0, 100.0)] {
                let pr = params(m, k, s0);
                let up = best_upper(&pr, xi).unwrap();
                let lo3 = lower_finite(&pr).unwrap();
                let lo2 = lower_vector(&pr);
                assert!(lo3.value >= lo2.value - 1e-9, "{m} {k} {s0}");
                assert!(up.value >= lo3.value, "{m} {k} {s0}: {up:?} {lo3:?}");
                let lin = linear_costs(&pr);
                assert!(lo3.value <= lin.zero_input.min(lin.zero_forcing) + 1e-9);
            }
        }
    }

    #[test]
    fn searched_l_is_at_least_fixed() {
        let pr = params(1, 0.01, 500.0);
        let fixed = lower_finite(&pr).unwrap();
        let searched = lower_finite_with(&pr, FiniteOptions::searched_l()).unwrap();
        assert!(searched.value >= fixed.value * (1.0 - 1e-6));
    }

    #[test]
    fn best_upper_branches() {
        let lin = linear_costs(&params(1, 0.2, 5.0));
        assert!((lin.zero_input - 25.0 / 26.0).abs() < 1e-15);
        assert!((lin.zero_forcing - 1.0).abs() < 1e-15);

        let r = best_upper(&params(1, 10.0, 3.0), 1.0).unwrap();
        assert_eq!(r.branch, Branch::ZeroInput);
        let r = best_upper(&params(1, 0.01, 500.0), 1.0).unwrap();
        assert_eq!(r.branch, Branch::LatticeTight);
        let pr = params(1, 0.2, 0.3);
        let r = best_upper(&pr, 1.0).unwrap();
        let t1 = upper_lattice(&pr, 1.0).unwrap().value;
        let lin = linear_costs(&pr);
        assert!(r.value <= t1.min(lin.zero_input).min(lin.zero_forcing));
    }

    #[test]
    fn lattice_bracket_at_benchmark() {
        let r = upper_lattice(&params(1, 0.01, 500.0), 1.0).unwrap();
        assert!(r.value >= 8.894e-4 && r.value <= 4.0 * 8.894e-4, "{r:?}");
    }

    #[test]
    fn lattice_profile_for_large_k_is_small_power() {
        let pr = params(2, 30.0, 5.0);
        let r = upper_lattice(&pr, 2f64.sqrt()).unwrap();
        assert!(r.p_star < 1e-3, "{r:?}");
    }
}
