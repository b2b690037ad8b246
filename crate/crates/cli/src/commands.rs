use std::io::Write;

use serde::Serialize;
use serde_json::json;
use witsenhausen::bounds::{best_upper, linear_costs, lower_vector, lower_finite_with, upper_lattice, upper_lattice_loose};
use witsenhausen::scalar_exact::{
    best_scaled_mle, exact_total_cost, optimize_scalar,
};
use witsenhausen::sim::simulate;
use witsenhausen::sweep::{self, evaluate_point, max_ratio, run_sweep, LogAxis};
use witsenhausen::verify::{run_suite, Suite};
use witsenhausen::{
    Decoder, Family, FirstStage, Lattice, LatticeKind, ProblemParams, ScalarStrategy, SecondStage, StrategyConfig,
    SweepGrid, SweepMode, FiniteOptions, VerifyOptions,
};

use crate::args::*;
use crate::config::{resolve, ConfigFile, Resolved};
use crate::CliError;

fn emit(out: &Option<std::path::PathBuf>, body: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(body).and_then(|_| so.flush()).map_err(|e| CliError::Failure(e.to_string()))
        }
    }
}

fn emit_json<T: Serialize>(out: &Option<std::path::PathBuf>, value: &T) -> Result<(), CliError> {
    let mut body = serde_json::to_vec_pretty(value).map_err(|e| CliError::Failure(e.to_string()))?;
    body.push(b'\n');
    emit(out, &body)
}

fn finite_options(l_search: bool) -> FiniteOptions {
    if l_search {
        FiniteOptions::searched_l()
    } else {
        FiniteOptions::default()
    }
}

fn lattice_and_xi(r: &Resolved, m: usize) -> Result<(LatticeKind, f64), CliError> {
    let kind: LatticeKind = r.lattice.unwrap_or(LatticeArg::Grid).into();
    let xi = match r.xi {
        Some(x) => x,
        None => kind.xi(m)?,
    };
    if xi < 1.0 {
        return Err(CliError::Usage(format!("--xi must be at least 1, got {xi}")));
    }
    Ok((kind, xi))
}

pub fn bounds(a: BoundsArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(a.common.config.as_deref())?;
    let r = resolve(&a.common, &cfg);
    let m = r.m.unwrap_or(1);
    let params = ProblemParams::from_k_sigma0(m, r.require_k()?, r.require_sigma0()?)?;
    let (kind, xi) = lattice_and_xi(&r, m)?;
    let l_search = a.l_search || cfg.l_search.unwrap_or(false);
    let finite = finite_options(l_search);
    if r.format == Some(Format::Csv) {
        let rec = evaluate_point(m, xi, params.k(), params.sigma0(), SweepMode::AnalyticRatio, finite);
        let mut body = Vec::new();
        sweep::write_csv(&mut body, &[rec]).map_err(|e| CliError::Failure(e.to_string()))?;
        return emit(&r.out, &body);
    }
    let tight = upper_lattice(&params, xi)?;
    let loose = upper_lattice_loose(&params, xi)?;
    let best = best_upper(&params, xi)?;
    let vector = lower_vector(&params);
    let finite_r = lower_finite_with(&params, finite)?;
    emit_json(
        &r.out,
        &json!({
            "m": m,
            "k": params.k(),
            "sigma0": params.sigma0(),
            "lattice": kind.name(),
            "xi": xi,
            "upper_lattice": tight,
            "upper_lattice_loose": loose,
            "linear": linear_costs(&params),
            "best_upper": best,
            "lower_vector": vector,
            "lower_finite": finite_r,
            "ratio": best.value / finite_r.value,
        }),
    )
}

fn parse_axis(s: &str) -> Result<LogAxis, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("range `{s}` must be `lo,hi,n`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok(LogAxis {
        lo: parts[0].parse().map_err(|_| bad())?,
        hi: parts[1].parse().map_err(|_| bad())?,
        n: parts[2].parse().map_err(|_| bad())?,
    })
}

pub fn sweep(a: SweepArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(a.common.config.as_deref())?;
    let r = resolve(&a.common, &cfg);
    let m = r.m.unwrap_or(1);
    let kind: LatticeKind = r.lattice.unwrap_or(LatticeArg::Grid).into();
    let mut grid = SweepGrid::default_for(m, kind);
    grid.xi = r.xi;
    if let Some(s) = a.k_range.as_deref().or(cfg.k_range.as_deref()) {
        grid.k_log10 = parse_axis(s)?;
    }
    if let Some(s) = a.sigma0_range.as_deref().or(cfg.sigma0_range.as_deref()) {
        grid.sigma0_log10 = parse_axis(s)?;
    }
    let mode = match a.mode.or(cfg.mode).unwrap_or(ModeArg::Analytic) {
        ModeArg::Analytic => SweepMode::AnalyticRatio,
        ModeArg::ExactScalar => SweepMode::ExactScalarRatio,
    };
    let finite = finite_options(a.l_search || cfg.l_search.unwrap_or(false));
    let recs = run_sweep(&grid, mode, finite)?;
    match r.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut body = Vec::new();
            sweep::write_csv(&mut body, &recs).map_err(|e| CliError::Failure(e.to_string()))?;
            emit(&r.out, &body)
        }
        Format::Json => emit_json(
            &r.out,
            &json!({ "grid": grid, "mode": mode, "records": recs, "max_ratio": max_ratio(&recs) }),
        ),
    }
}

fn build_strategy(a: &SimulateArgs, cfg: &ConfigFile, r: &Resolved, m: usize) -> Result<StrategyConfig, CliError> {
    let strategy = a.strategy.or(cfg.strategy).unwrap_or(StrategyArg::Lattice);
    let delta = a.delta.or(cfg.delta);
    let power = a.power.or(cfg.power);
    let gamma1 = match strategy {
        StrategyArg::Lattice => {
            let kind: LatticeKind = r.lattice.unwrap_or(LatticeArg::Grid).into();
            let lattice = match (power, delta) {
                (Some(p), None) => Lattice::for_power(kind, m, p)?,
                (None, Some(d)) => Lattice::new(kind, m, d)?,
                (Some(_), Some(_)) => return Err(CliError::Usage("give only one of --P and --delta".into())),
                (None, None) => return Err(CliError::Usage("lattice strategy needs --P or --delta".into())),
            };
            FirstStage::LatticeQuantize(lattice)
        }
        StrategyArg::Slopey => FirstStage::Slopey {
            delta: delta.ok_or_else(|| CliError::Usage("slopey strategy needs --delta".into()))?,
            alpha: a.alpha.or(cfg.alpha).unwrap_or(0.0),
        },
        StrategyArg::ZeroInput => FirstStage::ZeroInput,
        StrategyArg::ZeroForcing => FirstStage::ZeroForcing,
    };
    let decoder = match a.decoder.or(cfg.sim_decoder()?) {
        Some(d) => d,
        None if strategy == StrategyArg::Lattice => DecoderArg::PackingSphere,
        None => DecoderArg::Mmse,
    };
    let gamma2 = match decoder {
        DecoderArg::PackingSphere => SecondStage::PackingSphere,
        DecoderArg::Nearest => SecondStage::NearestLattice,
        DecoderArg::ScaledMle => SecondStage::ScaledMle(
            a.scale
                .or(cfg.scale)
                .ok_or_else(|| CliError::Usage("scaled-mle decoder needs --scale".into()))?,
        ),
        DecoderArg::Mmse => SecondStage::Mmse,
        DecoderArg::Identity => SecondStage::Identity,
    };
    let s = StrategyConfig::new(gamma1, gamma2);
    s.validate(m)?;
    Ok(s)
}

pub fn simulate_cmd(a: SimulateArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(a.common.config.as_deref())?;
    let r = resolve(&a.common, &cfg);
    let m = r.m.unwrap_or(1);
    let params = ProblemParams::from_k_sigma0(m, r.k.unwrap_or(1.0), r.require_sigma0()?)?;
    let strategy = build_strategy(&a, &cfg, &r, m)?;
    let n = r.n.unwrap_or(1_000_000);
    let seed = r.seed.unwrap_or(0);
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let est = simulate(&params, &strategy, n, seed)?;
    let bound = match (strategy.gamma1, strategy.gamma2) {
        (FirstStage::LatticeQuantize(l), SecondStage::PackingSphere) => {
            let p = l.r_c * l.r_c / m as f64;
            let b = witsenhausen::bounds::upper_lattice_at_p(&params, l.xi, p)?;
            Some(json!({ "P": p, "xi": l.xi, "upper_lattice": b }))
        }
        _ => None,
    };
    match r.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(
            &r.out,
            &json!({
                "m": m,
                "k": params.k(),
                "sigma0": params.sigma0(),
                "strategy": strategy,
                "estimate": est,
                "analytic": bound,
            }),
        ),
        Format::Csv => {
            let body = format!(
                "j1_mean,j2_mean,total_mean,stderr,n_samples,seed\n{:e},{:e},{:e},{:e},{},{}\n",
                est.j1_mean, est.j2_mean, est.total_mean, est.stderr, est.n_samples, est.seed
            );
            emit(&r.out, body.as_bytes())
        }
    }
}

pub fn scalar_exact(a: ScalarArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(a.common.config.as_deref())?;
    let r = resolve(&a.common, &cfg);
    if let Some(m) = r.m.filter(|&m| m != 1) {
        return Err(CliError::Usage(format!("scalar-exact needs m = 1, got {m}")));
    }
    let params = ProblemParams::from_k_sigma0(1, r.require_k()?, r.require_sigma0()?)?;
    let decoder_arg = a.decoder.or(cfg.scalar_decoder()?).unwrap_or(ScalarDecoderArg::Mmse);
    let scale = a.scale.or(cfg.scale);
    let delta = a.delta.or(cfg.delta);
    let alpha = a.alpha.or(cfg.alpha);
    let (strategy, decoder, cost, optimized) = match delta {
        Some(d) => {
            let s = ScalarStrategy::new(d, alpha.unwrap_or(0.0), params.sigma0())?;
            let decoder = match (decoder_arg, scale) {
                (ScalarDecoderArg::Mmse, _) => Decoder::Mmse,
                (ScalarDecoderArg::Mle, _) => Decoder::Mle,
                (ScalarDecoderArg::ScaledMle, Some(c)) => Decoder::ScaledMle(c),
                (ScalarDecoderArg::ScaledMle, None) => Decoder::ScaledMle(best_scaled_mle(&s)?.0),
            };
            let cost = exact_total_cost(&s, params.k2, decoder)?;
            (s, decoder, cost, false)
        }
        None => {
            if alpha.is_some() {
                return Err(CliError::Usage("--alpha needs --delta; use --family slopey to optimize it".into()));
            }
            let decoder = match (decoder_arg, scale) {
                (ScalarDecoderArg::Mmse, _) => Decoder::Mmse,
                (ScalarDecoderArg::Mle, _) => Decoder::Mle,
                (ScalarDecoderArg::ScaledMle, Some(c)) => Decoder::ScaledMle(c),
                (ScalarDecoderArg::ScaledMle, None) => {
                    return Err(CliError::Usage("optimizing with scaled-mle needs --scale".into()))
                }
            };
            let family = match a.family.or(cfg.family).unwrap_or(FamilyArg::Pure) {
                FamilyArg::Pure => Family::PureQuant,
                FamilyArg::Slopey => Family::Slopey,
            };
            let opt = optimize_scalar(&params, family, decoder)?;
            (opt.strategy, decoder, opt.cost, true)
        }
    };
    match r.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(
            &r.out,
            &json!({
                "k": params.k(),
                "sigma0": params.sigma0(),
                "optimized": optimized,
                "strategy": strategy,
                "decoder": decoder,
                "cost": cost,
            }),
        ),
        Format::Csv => {
            let body = format!(
                "delta,alpha,j1,j2,total\n{:e},{:e},{:e},{:e},{:e}\n",
                strategy.delta, strategy.alpha, cost.j1, cost.j2, cost.total
            );
            emit(&r.out, body.as_bytes())
        }
    }
}

pub fn verify(a: VerifyArgs) -> Result<bool, CliError> {
    let cfg = ConfigFile::load(a.common.config.as_deref())?;
    let r = resolve(&a.common, &cfg);
    let suite = match a.suite.or(cfg.suite).unwrap_or(SuiteArg::All) {
        SuiteArg::All => Suite::All,
        SuiteArg::Specfn => Suite::SpecFn,
        SuiteArg::Bounds => Suite::Bounds,
        SuiteArg::CaseAnalysis => Suite::CaseAnalysis,
        SuiteArg::ScalarOptima => Suite::ScalarOptima,
        SuiteArg::Benchmark => Suite::Benchmark,
        SuiteArg::Simulation => Suite::Simulation,
        SuiteArg::Decoders => Suite::Decoders,
        SuiteArg::Ratios => Suite::Ratios,
    };
    let mut opts = VerifyOptions::default();
    if let Some(s) = r.seed {
        opts.seed = s;
    }
    if let Some(n) = r.n {
        opts.sim_samples = n;
    }
    if let Some(n) = a.mc_samples.or(cfg.mc_samples) {
        opts.mc_samples = n;
    }
    if let Some(m) = r.m {
        opts.case_dims = vec![m];
    }
    let reports = run_suite(suite, &opts)?;
    let mut err = std::io::stderr().lock();
    for rep in &reports {
        let _ = writeln!(err, "== {} ({:.1} s)", rep.suite.name(), rep.seconds);
        for c in &rep.checks {
            let tag = match (c.passed, c.soft) {
                (true, _) => "PASS",
                (false, true) => "WARN",
                (false, false) => "FAIL",
            };
            let _ = writeln!(err, "[{tag}] {}: {}", c.name, c.detail);
        }
    }
    let passed = reports.iter().all(|r| r.passed());
    let _ = writeln!(err, "{}", if passed { "all checks passed" } else { "some checks failed" });
    emit_json(&r.out, &json!({ "passed": passed, "suites": reports }))?;
    Ok(passed)
}
