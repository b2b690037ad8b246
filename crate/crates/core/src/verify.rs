//! Verification suites: each check recomputes a reference quantity and
//! compares it against its tolerance.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    best_upper, lower_vector, lower_finite, upper_lattice_at_p, upper_lattice_loose_at_p, ProblemParams,
};
use crate::error::{Error, Result};
use crate::lattice::LatticeKind;
use crate::optimize::{lin_space, log_space};
use crate::scalar_exact::{
    exact_second_stage_cost, optimize_scalar, optimize_scalar_with, Decoder, Family, ScalarStrategy,
    SearchOptions,
};
use crate::sim::{simulate, simulate_vs_bound, FirstStage, SecondStage, StrategyConfig};
use crate::specfn::{c_m, d_m, psi, psi_chernoff};
use crate::sweep::{max_ratio, run_sweep, SweepGrid, SweepMode};
use crate::FiniteOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    SpecFn,
    Bounds,
    CaseAnalysis,
    ScalarOptima,
    Benchmark,
    Simulation,
    Decoders,
    Ratios,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Benchmark,
        Suite::ScalarOptima,
        Suite::Ratios,
        Suite::CaseAnalysis,
        Suite::Bounds,
        Suite::Simulation,
        Suite::SpecFn,
        Suite::Decoders,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::SpecFn => "specfn",
            Suite::Bounds => "bounds",
            Suite::CaseAnalysis => "case-analysis",
            Suite::ScalarOptima => "scalar-optima",
            Suite::Benchmark => "benchmark",
            Suite::Simulation => "simulation",
            Suite::Decoders => "decoders",
            Suite::Ratios => "ratios",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(Suite::All)
            .chain(Suite::EACH)
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite `{s}`")))
    }
}

/// One comparison. Soft checks are reported but never fail a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub soft: bool,
    pub detail: String,
}

impl Check {
    fn hard(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            passed,
            soft: false,
            detail,
        }
    }

    fn soft(name: &str, passed: bool, detail: String) -> Self {
        Check {
            soft: true,
            ..Check::hard(name, passed, detail)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.soft)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Samples for the chi-square moment identity.
    pub mc_samples: u64,
    /// Samples per simulated configuration.
    pub sim_samples: u64,
    /// Random `(k, σ0)` draws per dimension in the case analysis.
    pub case_samples: usize,
    /// Dimensions for the case analysis; empty means `{1, 2}`.
    pub case_dims: Vec<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 2024,
            mc_samples: 10_000_000,
            sim_samples: 1_000_000,
            case_samples: 1000,
            case_dims: Vec::new(),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn default_lattice(m: usize) -> LatticeKind {
    if m == 2 {
        LatticeKind::HexagonalA2
    } else {
        LatticeKind::IntegerGrid
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    suites
        .into_iter()
        .map(|s| {
            let t = Instant::now();
            let checks = match s {
                Suite::Benchmark => benchmark()?,
                Suite::ScalarOptima => scalar_optima()?,
                Suite::Ratios => ratios()?,
                Suite::CaseAnalysis => case_analysis(opts)?,
                Suite::Bounds => dominance()?,
                Suite::Simulation => simulation(opts)?,
                Suite::SpecFn => special_functions(opts)?,
                Suite::Decoders => decoders(opts)?,
                Suite::All => unreachable!(),
            };
            Ok(SuiteReport {
                suite: s,
                checks,
                seconds: t.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------

pub fn benchmark() -> Result<Vec<Check>> {
    let t = Instant::now();
    let p = ProblemParams::from_k_sigma0(1, 0.01, 500.0)?;
    let opt = optimize_scalar(&p, Family::PureQuant, Decoder::Mle)?;
    let lower = lower_finite(&p)?;
    let secs = t.elapsed().as_secs_f64();
    let mmse = optimize_scalar(&p, Family::PureQuant, Decoder::Mmse)?;
    let c = opt.cost;
    Ok(vec![
        Check::hard(
            "benchmark total cost",
            rel(c.total, 8.894e-4) <= 0.01,
            format!("{:.6e} vs 8.894e-4", c.total),
        ),
        Check::hard(
            "benchmark spacing",
            rel(opt.strategy.delta, 9.92) <= 0.02,
            format!("Δ* = {:.4} vs 9.92", opt.strategy.delta),
        ),
        Check::hard(
            "benchmark first stage",
            rel(c.j1, 8.2e-4) <= 0.05,
            format!("{:.4e} vs 8.2e-4", c.j1),
        ),
        Check::hard(
            "benchmark second stage",
            rel(c.j2, 6.7e-5) <= 0.05,
            format!("{:.4e} vs 6.7e-5", c.j2),
        ),
        Check::hard(
            "benchmark lower bound",
            rel(lower.value, 3.170e-4) <= 0.02,
            format!(
                "{:.5e} vs 3.170e-4 (P = {:.4}, σ_G² = {:.4})",
                lower.value,
                lower.p_star,
                lower.sigma_g_sq.unwrap_or(f64::NAN)
            ),
        ),
        Check::hard("benchmark runtime", secs < 30.0, format!("{secs:.2} s")),
        Check::soft(
            "benchmark with MMSE decoding",
            mmse.cost.total <= c.total,
            format!("{:.6e} at Δ = {:.4}", mmse.cost.total, mmse.strategy.delta),
        ),
    ])
}

pub fn scalar_optima() -> Result<Vec<Check>> {
    let t = Instant::now();
    let p = ProblemParams::from_k_sigma0(1, 0.2, 5.0)?;
    let pure = optimize_scalar(&p, Family::PureQuant, Decoder::Mmse)?;
    let slopey = optimize_scalar(&p, Family::Slopey, Decoder::Mmse)?;
    let secs = t.elapsed().as_secs_f64();
    Ok(vec![
        Check::hard(
            "scalar optimum quantization",
            rel(pure.cost.total, 0.1715335) <= 5e-4,
            format!(
                "{:.7} vs 0.1715335 (rel {:.2e}, Δ = {:.4})",
                pure.cost.total,
                rel(pure.cost.total, 0.1715335),
                pure.strategy.delta
            ),
        ),
        Check::hard(
            "scalar optimum slopey",
            rel(slopey.cost.total, 0.1673654) <= 5e-4,
            format!(
                "{:.7} vs 0.1673654 (rel {:.2e}, Δ = {:.4}, α = {:.4})",
                slopey.cost.total,
                rel(slopey.cost.total, 0.1673654),
                slopey.strategy.delta,
                slopey.strategy.alpha
            ),
        ),
        Check::hard(
            "scalar optimum slopey ≤ quantization",
            slopey.cost.total <= pure.cost.total + 1e-9,
            format!("{:.7} ≤ {:.7}", slopey.cost.total, pure.cost.total),
        ),
        Check::hard("scalar optimum runtime", secs < 300.0, format!("{secs:.1} s")),
    ])
}

pub fn ratios() -> Result<Vec<Check>> {
    let t = Instant::now();
    let cases = [
        ("ratio m=1 analytic", 1, LatticeKind::IntegerGrid, SweepMode::AnalyticRatio, 17.0, true),
        ("ratio m=2 hex analytic", 2, LatticeKind::HexagonalA2, SweepMode::AnalyticRatio, 14.75, true),
        ("ratio m=1 exact scalar", 1, LatticeKind::IntegerGrid, SweepMode::ExactScalarRatio, 8.0, false),
    ];
    let mut checks = Vec::new();
    for (name, m, kind, mode, cap, inclusive) in cases {
        let grid = SweepGrid::default_for(m, kind);
        let recs = run_sweep(&grid, mode, FiniteOptions::default())?;
        let bad = recs.iter().filter(|r| !r.is_ok()).count();
        let worst = max_ratio(&recs).expect("non-empty sweep");
        let ok = if inclusive { worst.ratio <= cap } else { worst.ratio < cap };
        checks.push(Check::hard(
            name,
            ok && bad == 0,
            format!(
                "max {:.4} at k = {:.4}, σ0 = {:.4} ({}), cap {cap}, {bad} flagged points",
                worst.ratio,
                worst.k,
                worst.sigma0,
                worst.winning_branch().map(|b| b.name()).unwrap_or("-")
            ),
        ));
    }
    let secs = t.elapsed().as_secs_f64();
    checks.push(Check::hard("ratio runtime", secs < 1800.0, format!("{secs:.1} s")));
    Ok(checks)
}

/// `g(b) = 0.38b² − 1.5(1 + ln b²) − 2ln(1 + b) − ln 9`.
pub fn case_g(b: f64) -> f64 {
    0.38 * b * b - 1.5 * (1.0 + (b * b).ln()) - 2.0 * (1.0 + b).ln() - 9f64.ln()
}

pub fn case_g_prime(b: f64) -> f64 {
    0.76 * b - 3.0 / b - 2.0 / (1.0 + b)
}

/// Worst `best_upper / lower_finite` over `n` log-uniform draws of
/// `(k, σ0)` on the default sweep ranges: `(ratio, k, σ0)`.
pub fn worst_sampled_ratio(m: usize, xi: f64, n: usize, seed: u64) -> Result<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let k = 10f64.powf(rng.random_range(-2.5..1.0));
            let s = 10f64.powf(rng.random_range(-1.0..3.0));
            (k, s)
        })
        .collect();
    let ratios: Vec<Result<(f64, f64, f64)>> = draws
        .into_par_iter()
        .map(|(k, s)| {
            let p = ProblemParams::from_k_sigma0(m, k, s)?;
            Ok((best_upper(&p, xi)?.value / lower_finite(&p)?.value, k, s))
        })
        .collect();
    let mut worst = (0.0, f64::NAN, f64::NAN);
    for r in ratios {
        let r = r?;
        if r.0 > worst.0 {
            worst = r;
        }
    }
    Ok(worst)
}

pub fn case_analysis(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let b0 = 34f64.sqrt();
    let g0 = case_g(b0);
    let grid = lin_space(b0, 100.0, 10_000);
    let g_min = grid.iter().map(|&b| case_g(b)).fold(f64::INFINITY, f64::min);
    let mut checks = vec![
        Check::hard(
            "g at √34",
            (g0 - 0.09).abs() <= 0.01,
            format!("g(√34) = {g0:.4}, g'(√34) = {:.4}", case_g_prime(b0)),
        ),
        Check::hard(
            "g positive on [√34, 100]",
            g_min > 0.0,
            format!("min g = {g_min:.4} over {} points", grid.len()),
        ),
    ];
    let dims = if opts.case_dims.is_empty() {
        vec![1, 2]
    } else {
        opts.case_dims.clone()
    };
    for m in dims {
        let xi = default_lattice(m).xi(m)?;
        let (r, k, s) = worst_sampled_ratio(m, xi, opts.case_samples, opts.seed ^ m as u64)?;
        let mu = 100.0 * xi * xi;
        checks.push(Check::hard(
            &format!("sampled ratio m={m}"),
            r <= mu,
            format!("worst {r:.4} at k = {k:.4}, σ0 = {s:.4}; μ = {mu:.2}"),
        ));
    }
    Ok(checks)
}

pub fn dominance() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (m, kind) in [(1, LatticeKind::IntegerGrid), (2, LatticeKind::HexagonalA2)] {
        let grid = SweepGrid::default_for(m, kind);
        let xi = grid.xi()?;
        let rows: Vec<Result<(f64, f64, f64)>> = grid
            .points()
            .into_par_iter()
            .map(|(k, s)| {
                let p = ProblemParams::from_k_sigma0(m, k, s)?;
                Ok((best_upper(&p, xi)?.value, lower_finite(&p)?.value, lower_vector(&p).value))
            })
            .collect();
        let (mut worst3, mut worst_up, mut n) = (f64::INFINITY, f64::INFINITY, 0);
        for r in rows {
            let (up, l3, l2) = r?;
            worst3 = worst3.min(l3 - (l2 - 1e-9));
            worst_up = worst_up.min(up - l3);
            n += 1;
        }
        checks.push(Check::hard(
            &format!("finite-length ≥ vector bound (m={m})"),
            worst3 >= 0.0,
            format!("min slack {worst3:.3e} over {n} points"),
        ));
        checks.push(Check::hard(
            &format!("upper ≥ lower (m={m})"),
            worst_up >= 0.0,
            format!("min slack {worst_up:.3e} over {n} points"),
        ));
    }
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for m in [1usize, 2, 3, 4, 8, 16, 32, 64] {
        let xi = if m == 2 { 2.0 / 3f64.sqrt() } else { (m as f64).sqrt() };
        for xi in [1.0, xi] {
            let p = ProblemParams::new(m, 0.04, 25.0)?;
            for pw in log_space(xi * xi * 1.0001, 1e4, 200) {
                let loose = upper_lattice_loose_at_p(&p, xi, pw)?;
                let tight = upper_lattice_at_p(&p, xi, pw)?;
                worst = worst.min(loose - tight);
                count += 1;
            }
        }
    }
    checks.push(Check::hard(
        "loose ≥ tight upper bound",
        worst >= 0.0,
        format!("min slack {worst:.3e} over {count} points"),
    ));
    Ok(checks)
}

pub fn simulation(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let configs: [(usize, LatticeKind, f64, f64, f64); 10] = [
        (1, LatticeKind::IntegerGrid, 0.2, 5.0, 4.0),
        (1, LatticeKind::IntegerGrid, 0.2, 5.0, 1.0),
        (1, LatticeKind::IntegerGrid, 0.01, 500.0, 25.0),
        (1, LatticeKind::IntegerGrid, 0.5, 2.0, 9.0),
        (1, LatticeKind::IntegerGrid, 0.01, 50.0, 100.0),
        (2, LatticeKind::HexagonalA2, 0.2, 5.0, 4.0),
        (2, LatticeKind::HexagonalA2, 0.1, 20.0, 9.0),
        (2, LatticeKind::HexagonalA2, 0.5, 1.0, 1.0),
        (2, LatticeKind::IntegerGrid, 0.2, 5.0, 4.0),
        (2, LatticeKind::IntegerGrid, 0.05, 30.0, 16.0),
    ];
    let mut checks = Vec::new();
    for (i, (m, kind, k, s, pw)) in configs.into_iter().enumerate() {
        let p = ProblemParams::from_k_sigma0(m, k, s)?;
        let r = simulate_vs_bound(&p, kind, pw, opts.sim_samples, opts.seed + i as u64)?;
        checks.push(Check::hard(
            &format!("simulated ≤ bound m={m} {} k={k} σ0={s} P={pw}", kind.name()),
            r.passed,
            format!(
                "{:.5e} ± {:.1e} vs {:.5e}",
                r.estimate.total_mean, r.estimate.stderr, r.bound
            ),
        ));
    }
    for (m, k, s) in [(1, 0.2, 5.0), (2, 0.5, 2.0)] {
        let p = ProblemParams::from_k_sigma0(m, k, s)?;
        for (label, first, want) in [
            ("zero-input", FirstStage::ZeroInput, p.sigma0_sq / (p.sigma0_sq + 1.0)),
            ("zero-forcing", FirstStage::ZeroForcing, p.k2 * p.sigma0_sq),
        ] {
            let cfg = StrategyConfig::new(first, SecondStage::Mmse);
            let e = simulate(&p, &cfg, opts.sim_samples, opts.seed + 100)?;
            checks.push(Check::hard(
                &format!("{label} m={m} k={k} σ0={s}"),
                (e.total_mean - want).abs() <= 3.0 * e.stderr,
                format!("{:.6} ± {:.1e} vs {want:.6}", e.total_mean, e.stderr),
            ));
        }
    }
    Ok(checks)
}

/// Monte Carlo estimates of `E[‖Z‖²·1{‖Z‖ ≥ r}]` for each `r`:
/// `(mean, stderr)` pairs.
pub fn chi_tail_moment_mc(m: usize, radii: &[f64], n: u64, seed: u64) -> Vec<(f64, f64)> {
    const BLOCK: u64 = 1 << 16;
    let blocks = n.div_ceil(BLOCK);
    let sums: Vec<Vec<(f64, f64)>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = BLOCK.min(n - b * BLOCK);
            let mut acc = vec![(0.0, 0.0); radii.len()];
            for _ in 0..len {
                let mut r2 = 0.0;
                for _ in 0..m {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    r2 += z * z;
                }
                for (a, &r) in acc.iter_mut().zip(radii) {
                    if r2 >= r * r {
                        a.0 += r2;
                        a.1 += r2 * r2;
                    }
                }
            }
            acc
        })
        .collect();
    let mut tot = vec![(0.0, 0.0); radii.len()];
    for s in sums {
        for (t, v) in tot.iter_mut().zip(s) {
            t.0 += v.0;
            t.1 += v.1;
        }
    }
    let nf = n as f64;
    tot.into_iter()
        .map(|(s, s2)| {
            let mean = s / nf;
            let var = (s2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
            (mean, (var / nf).sqrt())
        })
        .collect()
}

pub fn special_functions(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    for r in lin_space(0.0, 30.0, 601) {
        let want = (-r * r / 2.0).exp();
        worst = worst.max((psi(2, r)? - want).abs() / want.max(f64::MIN_POSITIVE));
    }
    checks.push(Check::hard(
        "ψ(2, r) = exp(−r²/2)",
        worst <= 1e-13,
        format!("max relative error {worst:.2e}"),
    ));
    for m in [1usize, 2, 3, 8] {
        let sq = (m as f64).sqrt();
        let radii = [0.5 * sq, sq, sq + 1.0, sq + 2.0];
        let est = chi_tail_moment_mc(m, &radii, opts.mc_samples, opts.seed + m as u64);
        let mut worst_z = 0.0f64;
        for (&r, &(mean, se)) in radii.iter().zip(&est) {
            let want = m as f64 * psi(m + 2, r)?;
            worst_z = worst_z.max((mean - want).abs() / se);
        }
        checks.push(Check::hard(
            &format!("E[‖Z‖²·1(‖Z‖≥r)] = mψ(m+2, r), m={m}"),
            worst_z <= 4.0,
            format!("worst deviation {worst_z:.2} standard errors, n = {}", opts.mc_samples),
        ));
    }
    let (mut c_ok, mut d_ok) = (true, true);
    let (mut c_max, mut d_slack) = (0.0f64, f64::INFINITY);
    for m in 1..=64usize {
        let c = c_m(m, 2.0)?;
        let d = d_m(m, 2.0)?;
        let floor = 1.0 - (1.0 + 2.0 / m as f64) / 4.0;
        c_ok &= c <= 4.0 / 3.0;
        d_ok &= d >= floor;
        c_max = c_max.max(c);
        d_slack = d_slack.min(d - floor);
    }
    checks.push(Check::hard("c_m(2) ≤ 4/3 for m ≤ 64", c_ok, format!("max {c_max:.6}")));
    checks.push(Check::hard(
        "d_m(2) ≥ 1 − (1 + 2/m)/4 for m ≤ 64",
        d_ok,
        format!("min slack {d_slack:.3e}"),
    ));
    let mut worst = f64::INFINITY;
    for m in 1..=64usize {
        let sq = (m as f64).sqrt();
        for r in log_space(sq * 1.0001, sq + 40.0, 200) {
            let exact = psi(m, r)?;
            let bound = psi_chernoff(m, r)?;
            worst = worst.min(if exact > 0.0 { bound / exact - 1.0 } else { bound });
        }
    }
    checks.push(Check::hard(
        "Chernoff bound dominates the tail",
        worst >= -1e-12,
        format!("min relative slack {worst:.3e}"),
    ));
    Ok(checks)
}

pub fn decoders(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let scales = [0.5, 0.7, 0.8, 0.9, 0.95, 1.0];
    let mut violations = Vec::new();
    let mut worst_gap = f64::INFINITY;
    for _ in 0..20 {
        let sigma0 = 10f64.powf(rng.random_range(-0.3..1.7));
        let delta = 10f64.powf(rng.random_range(0.0..1.2));
        let s = ScalarStrategy::pure(delta, sigma0)?;
        let mmse = exact_second_stage_cost(&s, Decoder::Mmse)?.j2;
        let mut others = vec![exact_second_stage_cost(&s, Decoder::Mle)?.j2];
        for c in scales {
            others.push(exact_second_stage_cost(&s, Decoder::ScaledMle(c))?.j2);
        }
        let best_other = others.iter().copied().fold(f64::INFINITY, f64::min);
        worst_gap = worst_gap.min(best_other - mmse);
        if mmse > best_other {
            violations.push(format!("Δ = {delta:.3}, σ0 = {sigma0:.3}"));
        }
    }
    let mut checks = vec![Check::hard(
        "MMSE ≤ MLE and scaled MLE",
        violations.is_empty(),
        if violations.is_empty() {
            format!("20 configurations, min margin {worst_gap:.3e}")
        } else {
            violations.join("; ")
        },
    )];

    // slopey gain near k ≈ 0.63 on the default grid
    let grid = SweepGrid::default_for(1, LatticeKind::IntegerGrid);
    let ks: Vec<f64> = grid
        .k_log10
        .values()
        .into_iter()
        .filter(|k| (k.log10() - 0.63f64.log10()).abs() < 0.1)
        .collect();
    let sigmas: Vec<f64> = grid
        .sigma0_log10
        .values()
        .into_iter()
        .filter(|&s| (1.0 - 1e-9..=4.0).contains(&s))
        .collect();
    let opts_fast = SearchOptions {
        delta_points: 32,
        ..SearchOptions::default()
    };
    let mut best = (0.0, f64::NAN, f64::NAN);
    for &k in &ks {
        for &s in &sigmas {
            let p = ProblemParams::from_k_sigma0(1, k, s)?;
            let pure = optimize_scalar_with(&p, Family::PureQuant, Decoder::Mmse, opts_fast)?;
            let slopey = optimize_scalar_with(&p, Family::Slopey, Decoder::Mmse, opts_fast)?;
            let gain = 1.0 - slopey.cost.total / pure.cost.total;
            if gain > best.0 {
                best = (gain, k, s);
            }
        }
    }
    checks.push(Check::soft(
        "slopey gain ≥ 10% near k ≈ 0.63",
        best.0 >= 0.10,
        format!("best gain {:.1}% at k = {:.4}, σ0 = {:.4}", 100.0 * best.0, best.1, best.2),
    ));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_function_values() {
        let b = 34f64.sqrt();
        assert!((case_g(b) - 0.0912).abs() < 1e-3, "{}", case_g(b));
        assert!((case_g_prime(b) - 3.624).abs() < 1e-3);
        let h = 1e-6;
        let fd = (case_g(8.0 + h) - case_g(8.0 - h)) / (2.0 * h);
        assert!((fd - case_g_prime(8.0)).abs() < 1e-7);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in std::iter::once(Suite::All).chain(Suite::EACH) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn chi_moment_mc_is_reproducible() {
        let a = chi_tail_moment_mc(2, &[0.0, 1.0], 100_000, 4);
        let b = chi_tail_moment_mc(2, &[0.0, 1.0], 100_000, 4);
        assert_eq!(a, b);
        // r = 0 gives E‖Z‖² = m
        assert!((a[0].0 - 2.0).abs() < 4.0 * a[0].1);
    }

    #[test]
    fn reduced_special_function_suite_passes() {
        let opts = VerifyOptions {
            mc_samples: 200_000,
            ..VerifyOptions::default()
        };
        for c in special_functions(&opts).unwrap() {
            assert!(c.passed, "{c:?}");
        }
    }
}
