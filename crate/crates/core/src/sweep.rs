//! Upper/lower ratio surfaces over a log-spaced `(k, σ0)` grid.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{best_of, best_upper, lower_finite_with, BoundResult, Branch, ProblemParams, FiniteOptions};
use crate::error::{Error, Result};
use crate::lattice::LatticeKind;
use crate::optimize::lin_space;
use crate::scalar_exact::{optimize_scalar_with, Decoder, Family, SearchOptions};

pub const CSV_HEADER: &str = "m,k,sigma0,upper,upper_branch,P_upper,lower,P_lower,sigmaG_sq,L,ratio,status";

/// `(log10 lo, log10 hi, points)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogAxis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl LogAxis {
    /// Grid values, rounded to 14 significant digits so that integer
    /// exponents give exact powers of ten in the output.
    pub fn values(&self) -> Vec<f64> {
        let exps = if self.n == 1 { vec![self.lo] } else { lin_space(self.lo, self.hi, self.n) };
        exps.into_iter()
            .map(|e| format!("{:.13e}", 10f64.powf(e)).parse().expect("formatted float parses"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub k_log10: LogAxis,
    pub sigma0_log10: LogAxis,
    pub m: usize,
    pub lattice: LatticeKind,
    /// Overrides the lattice's packing-covering ratio when set.
    pub xi: Option<f64>,
}

impl SweepGrid {
    /// `k ∈ 10^[−2.5, 1]`, `σ0 ∈ 10^[−1, 3]`, 41 × 41 points.
    pub fn default_for(m: usize, lattice: LatticeKind) -> Self {
        SweepGrid {
            k_log10: LogAxis { lo: -2.5, hi: 1.0, n: 41 },
            sigma0_log10: LogAxis { lo: -1.0, hi: 3.0, n: 41 },
            m,
            lattice,
            xi: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("k", self.k_log10), ("σ0", self.sigma0_log10)] {
            if a.n == 0 || !(a.lo.is_finite() && a.hi.is_finite()) || (a.n > 1 && a.lo >= a.hi) {
                return Err(Error::InvalidParameter(format!(
                    "{name} axis needs finite lo < hi, or a single point"
                )));
            }
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        self.xi().map(|_| ())
    }

    pub fn xi(&self) -> Result<f64> {
        match self.xi {
            Some(x) if x >= 1.0 => Ok(x),
            Some(x) => Err(Error::Domain {
                name: "ξ",
                value: x,
                requirement: "ξ ≥ 1",
            }),
            None => self.lattice.xi(self.m),
        }
    }

    /// Grid points in output order: `k` outer, `σ0` inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let ks = self.k_log10.values();
        let ss = self.sigma0_log10.values();
        ks.iter()
            .flat_map(|&k| ss.iter().map(move |&s| (k, s)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Best analytic upper bound over the finite-length lower bound.
    AnalyticRatio,
    /// Optimized exact scalar quantization (or a linear strategy) over the
    /// finite-length lower bound; scalar only.
    ExactScalarRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub m: usize,
    pub k: f64,
    pub sigma0: f64,
    pub upper: Option<BoundResult>,
    pub lower: Option<BoundResult>,
    pub ratio: f64,
    pub status: String,
}

impl SweepRecord {
    pub fn winning_branch(&self) -> Option<Branch> {
        self.upper.map(|u| u.branch)
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub fn evaluate_point(
    m: usize,
    xi: f64,
    k: f64,
    sigma0: f64,
    mode: SweepMode,
    finite: FiniteOptions,
) -> SweepRecord {
    let inner = || -> Result<(BoundResult, BoundResult)> {
        let params = ProblemParams::from_k_sigma0(m, k, sigma0)?;
        let upper = match mode {
            SweepMode::AnalyticRatio => best_upper(&params, xi)?,
            SweepMode::ExactScalarRatio => {
                let opt = optimize_scalar_with(&params, Family::PureQuant, Decoder::Mmse, SearchOptions::sweep())?;
                let exact = BoundResult {
                    value: opt.cost.total,
                    p_star: opt.strategy.delta.powi(2) / 4.0,
                    sigma_g_sq: None,
                    l: None,
                    branch: Branch::ExactScalar,
                };
                best_of(exact, &params)
            }
        };
        let lower = lower_finite_with(&params, finite)?;
        Ok((upper, lower))
    };
    match inner() {
        Ok((upper, lower)) => {
            let ratio = upper.value / lower.value;
            let status = if !ratio.is_finite() {
                "nonfinite_ratio"
            } else if ratio < 1.0 - 1e-9 {
                "ratio_below_one"
            } else {
                "ok"
            };
            SweepRecord {
                m,
                k,
                sigma0,
                upper: Some(upper),
                lower: Some(lower),
                ratio,
                status: status.into(),
            }
        }
        Err(e) => SweepRecord {
            m,
            k,
            sigma0,
            upper: None,
            lower: None,
            ratio: f64::NAN,
            status: format!("error: {e}").replace(',', ";"),
        },
    }
}

/// Evaluates every grid point (concurrently) and returns records in grid
/// order. Failing points are recorded with their error and never abort the
/// sweep.
pub fn run_sweep(grid: &SweepGrid, mode: SweepMode, finite: FiniteOptions) -> Result<Vec<SweepRecord>> {
    grid.validate()?;
    if mode == SweepMode::ExactScalarRatio && grid.m != 1 {
        return Err(Error::InvalidParameter(
            "exact scalar ratio sweeps need m = 1".into(),
        ));
    }
    let xi = grid.xi()?;
    Ok(grid
        .points()
        .into_par_iter()
        .map(|(k, s)| evaluate_point(grid.m, xi, k, s, mode, finite))
        .collect())
}

/// Record with the largest finite ratio; ties keep the earliest.
pub fn max_ratio(records: &[SweepRecord]) -> Option<&SweepRecord> {
    records
        .iter()
        .filter(|r| r.ratio.is_finite())
        .fold(None, |best: Option<&SweepRecord>, r| match best {
            Some(b) if b.ratio >= r.ratio => Some(b),
            _ => Some(r),
        })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn csv_row(r: &SweepRecord, status: &str) -> String {
    let (u, l) = (r.upper, r.lower);
    format!(
        "{},{:e},{:e},{},{},{},{},{},{},{},{},{}",
        r.m,
        r.k,
        r.sigma0,
        fmt_opt(u.map(|b| b.value)),
        u.map(|b| b.branch.name()).unwrap_or(""),
        fmt_opt(u.map(|b| b.p_star)),
        fmt_opt(l.map(|b| b.value)),
        fmt_opt(l.map(|b| b.p_star)),
        fmt_opt(l.and_then(|b| b.sigma_g_sq)),
        fmt_opt(l.and_then(|b| b.l)),
        if r.ratio.is_finite() { format!("{:e}", r.ratio) } else { String::new() },
        status
    )
}

/// Writes the header, one row per record, and a footer row repeating the
/// worst point with status `max_ratio`.
pub fn write_csv<W: Write>(out: &mut W, records: &[SweepRecord]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", csv_row(r, &r.status))?;
    }
    if let Some(worst) = max_ratio(records) {
        writeln!(out, "{}", csv_row(worst, "max_ratio"))?;
    }
    Ok(())
}
