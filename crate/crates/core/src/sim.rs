//! Monte Carlo estimation of stage costs for two-controller strategies.
//!
//! Samples are processed in fixed blocks. Block `b` draws from its own
//! ChaCha8 stream `(seed, b)`, and block statistics are merged in block
//! order, so results are bit-identical for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{upper_lattice_at_p, ProblemParams};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeKind};
use crate::scalar_exact::{Decoder, ScalarEstimator, ScalarStrategy};

const BLOCK: usize = 4096;

/// First controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstStage {
    /// Move `x0` to its nearest lattice point.
    LatticeQuantize(Lattice),
    /// Scalar staircase with in-bin slope `alpha`.
    Slopey { delta: f64, alpha: f64 },
    ZeroInput,
    ZeroForcing,
}

/// Second controller's estimate of `x1` from `y = x1 + z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondStage {
    /// Nearest lattice point if strictly inside the packing sphere, else `y`.
    PackingSphere,
    /// Nearest point of the support of `x1`.
    NearestLattice,
    /// `scale` times the nearest-point estimate.
    ScaledMle(f64),
    /// Conditional mean (linear for the linear strategies).
    Mmse,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub gamma1: FirstStage,
    pub gamma2: SecondStage,
}

impl StrategyConfig {
    pub fn new(gamma1: FirstStage, gamma2: SecondStage) -> Self {
        StrategyConfig { gamma1, gamma2 }
    }

    /// Checks that the pair is implemented for dimension `m`.
    pub fn validate(&self, m: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidStrategy(msg));
        match self.gamma1 {
            FirstStage::LatticeQuantize(l) if l.m != m => {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: l.m,
                })
            }
            FirstStage::Slopey { delta, alpha } => {
                if m != 1 {
                    return bad(format!("slopey quantization is scalar only (m = {m})"));
                }
                ScalarStrategy::new(delta, alpha, 1.0)?;
            }
            _ => {}
        }
        if let SecondStage::ScaledMle(c) = self.gamma2 {
            if !(c > 0.0 && c <= 1.0) {
                return bad(format!("scaled MLE needs 0 < c ≤ 1, got {c}"));
            }
        }
        use FirstStage as F;
        use SecondStage as S;
        match (self.gamma1, self.gamma2) {
            (_, S::Identity) => Ok(()),
            (F::LatticeQuantize(_), S::PackingSphere) => Ok(()),
            (_, S::PackingSphere) => bad("packing-sphere decoding needs lattice quantization".into()),
            (F::LatticeQuantize(_) | F::Slopey { .. }, S::NearestLattice | S::ScaledMle(_)) => Ok(()),
            (_, S::NearestLattice | S::ScaledMle(_)) => {
                bad("nearest-point decoding needs a quantizing first stage".into())
            }
            (F::LatticeQuantize(l), S::Mmse) => {
                if l.m == 1 {
                    Ok(())
                } else {
                    bad(format!("MMSE decoding of a lattice is scalar only (m = {})", l.m))
                }
            }
            (_, S::Mmse) => Ok(()),
        }
    }
}

/// Monte Carlo stage costs, normalized per dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub j1_mean: f64,
    pub j2_mean: f64,
    pub total_mean: f64,
    /// Standard error of the total.
    pub stderr: f64,
    pub j1_stderr: f64,
    pub j2_stderr: f64,
    /// Largest `‖u₁‖²` seen in any sample.
    pub max_u1_sq: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Extra knobs for [`simulate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Multiplies the observation noise; 0 gives noiseless observations.
    pub noise_scale: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { noise_scale: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }

    fn stderr(&self) -> f64 {
        if self.n < 2.0 {
            0.0
        } else {
            (self.m2 / (self.n - 1.0) / self.n).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockStats {
    j1: Moments,
    j2: Moments,
    total: Moments,
    max_u1_sq: f64,
}

impl BlockStats {
    fn merge(self, o: BlockStats) -> BlockStats {
        BlockStats {
            j1: self.j1.merge(o.j1),
            j2: self.j2.merge(o.j2),
            total: self.total.merge(o.total),
            max_u1_sq: self.max_u1_sq.max(o.max_u1_sq),
        }
    }
}

/// Strategy with any per-run precomputation done.
struct Runner {
    cfg: StrategyConfig,
    m: usize,
    k2: f64,
    sigma0: f64,
    scalar: Option<(ScalarEstimator, ScalarStrategy)>,
    llse: f64,
}

impl Runner {
    fn new(params: &ProblemParams, cfg: StrategyConfig) -> Self {
        let sigma0 = params.sigma0();
        let scalar = match cfg.gamma1 {
            FirstStage::Slopey { delta, alpha } => {
                let s = ScalarStrategy {
                    delta,
                    alpha,
                    sigma0,
                };
                Some((ScalarEstimator::new(s), s))
            }
            FirstStage::LatticeQuantize(l) if l.m == 1 && cfg.gamma2 == SecondStage::Mmse => {
                let s = ScalarStrategy {
                    delta: l.scale,
                    alpha: 0.0,
                    sigma0,
                };
                Some((ScalarEstimator::new(s), s))
            }
            _ => None,
        };
        Runner {
            cfg,
            m: params.m,
            k2: params.k2,
            sigma0,
            scalar,
            llse: params.sigma0_sq / (params.sigma0_sq + 1.0),
        }
    }

    fn first_stage(&self, x0: &[f64], x1: &mut [f64]) {
        match self.cfg.gamma1 {
            FirstStage::LatticeQuantize(l) => l.quantize_into(x0, x1),
            FirstStage::Slopey { delta, alpha } => {
                let q = (x0[0] / delta + 0.5).floor() * delta;
                x1[0] = q + alpha * (x0[0] - q);
            }
            FirstStage::ZeroInput => x1.copy_from_slice(x0),
            FirstStage::ZeroForcing => x1.fill(0.0),
        }
    }

    fn nearest_point(&self, y: &[f64], out: &mut [f64]) {
        match (self.cfg.gamma1, &self.scalar) {
            (FirstStage::LatticeQuantize(l), _) => l.quantize_into(y, out),
            (_, Some((est, _))) => out[0] = est.estimate(Decoder::Mle, y[0]),
            _ => unreachable!("validated strategy"),
        }
    }

    fn second_stage(&self, y: &[f64], xhat: &mut [f64]) {
        match self.cfg.gamma2 {
            SecondStage::Identity => xhat.copy_from_slice(y),
            SecondStage::PackingSphere => {
                let FirstStage::LatticeQuantize(l) = self.cfg.gamma1 else {
                    unreachable!("validated strategy")
                };
                l.quantize_into(y, xhat);
                let d2: f64 = y.iter().zip(xhat.iter()).map(|(a, b)| (a - b).powi(2)).sum();
                if d2 >= l.r_p * l.r_p {
                    xhat.copy_from_slice(y);
                }
            }
            SecondStage::NearestLattice => self.nearest_point(y, xhat),
            SecondStage::ScaledMle(c) => {
                self.nearest_point(y, xhat);
                xhat.iter_mut().for_each(|v| *v *= c);
            }
            SecondStage::Mmse => match (self.cfg.gamma1, &self.scalar) {
                (FirstStage::ZeroInput, _) => {
                    for (o, &v) in xhat.iter_mut().zip(y) {
                        *o = self.llse * v;
                    }
                }
                (FirstStage::ZeroForcing, _) => xhat.fill(0.0),
                (_, Some((est, _))) => xhat[0] = est.estimate(Decoder::Mmse, y[0]),
                _ => unreachable!("validated strategy"),
            },
        }
    }

    fn block(&self, seed: u64, block: usize, len: usize, noise: f64) -> BlockStats {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block as u64);
        let m = self.m;
        let (mut x0, mut x1, mut y, mut xhat) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        let mut st = BlockStats::default();
        let inv_m = 1.0 / m as f64;
        for _ in 0..len {
            for v in x0.iter_mut() {
                let g: f64 = StandardNormal.sample(&mut rng);
                *v = self.sigma0 * g;
            }
            self.first_stage(&x0, &mut x1);
            for (i, v) in y.iter_mut().enumerate() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v = x1[i] + noise * z;
            }
            self.second_stage(&y, &mut xhat);
            let u1_sq: f64 = x1.iter().zip(&x0).map(|(a, b)| (a - b).powi(2)).sum();
            let e_sq: f64 = x1.iter().zip(&xhat).map(|(a, b)| (a - b).powi(2)).sum();
            let j1 = self.k2 * u1_sq * inv_m;
            let j2 = e_sq * inv_m;
            st.j1.push(j1);
            st.j2.push(j2);
            st.total.push(j1 + j2);
            st.max_u1_sq = st.max_u1_sq.max(u1_sq);
        }
        st
    }
}

pub fn simulate(
    params: &ProblemParams,
    strategy: &StrategyConfig,
    n_samples: u64,
    seed: u64,
) -> Result<CostEstimate> {
    simulate_with(params, strategy, n_samples, seed, SimOptions::default())
}

/// Draws `X0 ~ N(0, σ0²I)` and `Z ~ N(0, I)`, applies both controllers and
/// returns per-dimension stage costs with standard errors.
pub fn simulate_with(
    params: &ProblemParams,
    strategy: &StrategyConfig,
    n_samples: u64,
    seed: u64,
    opts: SimOptions,
) -> Result<CostEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    strategy.validate(params.m)?;
    let runner = Runner::new(params, *strategy);
    let n = n_samples as usize;
    let blocks = n.div_ceil(BLOCK);
    let stats: Vec<BlockStats> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK.min(n - b * BLOCK);
            runner.block(seed, b, len, opts.noise_scale)
        })
        .collect();
    let all = stats
        .into_iter()
        .fold(BlockStats::default(), BlockStats::merge);
    Ok(CostEstimate {
        j1_mean: all.j1.mean,
        j2_mean: all.j2.mean,
        total_mean: all.j1.mean + all.j2.mean,
        stderr: all.total.stderr(),
        j1_stderr: all.j1.stderr(),
        j2_stderr: all.j2.stderr(),
        max_u1_sq: all.max_u1_sq,
        n_samples,
        seed,
    })
}

/// Nearest-point decoding that falls back to `y` outside the packing spheres.
pub fn packing_sphere_decode(lattice: &Lattice, y2: &[f64]) -> Result<Vec<f64>> {
    let q = lattice.quantize(y2)?;
    let d2: f64 = y2.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(if d2 < lattice.r_p * lattice.r_p {
        q
    } else {
        y2.to_vec()
    })
}

/// Simulated lattice strategy against its analytic upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VsBound {
    pub power: f64,
    pub lattice: Lattice,
    pub estimate: CostEstimate,
    pub bound: f64,
    /// `bound − (mean − 3·stderr)`; nonnegative when consistent.
    pub margin: f64,
    pub passed: bool,
}

/// Simulates lattice quantization scaled so that `r_c² = m·P`, with
/// packing-sphere decoding, and compares against the tight bound at `P`.
pub fn simulate_vs_bound(
    params: &ProblemParams,
    kind: LatticeKind,
    power: f64,
    n_samples: u64,
    seed: u64,
) -> Result<VsBound> {
    let lattice = Lattice::for_power(kind, params.m, power)?;
    let cfg = StrategyConfig::new(FirstStage::LatticeQuantize(lattice), SecondStage::PackingSphere);
    let estimate = simulate(params, &cfg, n_samples, seed)?;
    let bound = upper_lattice_at_p(params, lattice.xi, power)?;
    let margin = bound - (estimate.total_mean - 3.0 * estimate.stderr);
    Ok(VsBound {
        power,
        lattice,
        estimate,
        bound,
        margin,
        passed: margin >= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize, k: f64, s0: f64) -> ProblemParams {
        ProblemParams::from_k_sigma0(m, k, s0).unwrap()
    }

    fn grid1(delta: f64) -> Lattice {
        Lattice::new(LatticeKind::IntegerGrid, 1, delta).unwrap()
    }

    #[test]
    fn packing_sphere_examples() {
        let l = grid1(10.0);
        assert_eq!(packing_sphere_decode(&l, &[3.0]).unwrap(), vec![0.0]);
        assert_eq!(packing_sphere_decode(&l, &[5.0]).unwrap(), vec![5.0]);
        assert_eq!(packing_sphere_decode(&l, &[-12.0]).unwrap(), vec![-10.0]);
        let hex = Lattice::with_packing_radius(LatticeKind::HexagonalA2, 2, 1.0).unwrap();
        let hole = hex.deep_hole();
        assert_eq!(packing_sphere_decode(&hex, &hole).unwrap(), hole);
    }

    #[test]
    fn invalid_combinations() {
        let p1 = params(1, 0.2, 5.0);
        let p2 = params(2, 0.2, 5.0);
        let bad = [
            (p1, StrategyConfig::new(FirstStage::ZeroInput, SecondStage::PackingSphere)),
            (p1, StrategyConfig::new(FirstStage::ZeroForcing, SecondStage::NearestLattice)),
            (p2, StrategyConfig::new(FirstStage::Slopey { delta: 1.0, alpha: 0.1 }, SecondStage::Mmse)),
            (
                p2,
                StrategyConfig::new(
                    FirstStage::LatticeQuantize(Lattice::new(LatticeKind::HexagonalA2, 2, 1.0).unwrap()),
                    SecondStage::Mmse,
                ),
            ),
            (p2, StrategyConfig::new(FirstStage::LatticeQuantize(grid1(1.0)), SecondStage::Identity)),
            (p1, StrategyConfig::new(FirstStage::LatticeQuantize(grid1(1.0)), SecondStage::ScaledMle(1.5))),
        ];
        for (p, cfg) in bad {
            assert!(simulate(&p, &cfg, 10, 1).is_err(), "{cfg:?}");
        }
        let ok = StrategyConfig::new(FirstStage::ZeroInput, SecondStage::Mmse);
        assert!(simulate(&p1, &ok, 0, 1).is_err());
        assert!(simulate(&p2, &ok, 10, 1).is_ok());
    }

    #[test]
    fn linear_strategies_match_closed_forms() {
        let p = params(1, 0.2, 5.0);
        let zi = simulate(&p, &StrategyConfig::new(FirstStage::ZeroInput, SecondStage::Mmse), 200_000, 3).unwrap();
        assert!((zi.total_mean - 25.0 / 26.0).abs() <= 4.0 * zi.stderr, "{zi:?}");
        assert_eq!(zi.j1_mean, 0.0);
        let zf = simulate(&p, &StrategyConfig::new(FirstStage::ZeroForcing, SecondStage::Mmse), 200_000, 3).unwrap();
        assert_eq!(zf.j2_mean, 0.0);
        assert!((zf.total_mean - 1.0).abs() <= 4.0 * zf.stderr, "{zf:?}");
    }

    #[test]
    fn first_stage_within_covering_radius() {
        for l in [
            grid1(3.0),
            Lattice::new(LatticeKind::HexagonalA2, 2, 2.5).unwrap(),
            Lattice::new(LatticeKind::IntegerGrid, 3, 1.5).unwrap(),
        ] {
            let p = params(l.m, 0.3, 4.0);
            let cfg = StrategyConfig::new(FirstStage::LatticeQuantize(l), SecondStage::PackingSphere);
            let r = simulate(&p, &cfg, 50_000, 11).unwrap();
            assert!(r.max_u1_sq <= l.r_c * l.r_c * (1.0 + 1e-12), "{r:?} {l:?}");
        }
    }

    #[test]
    fn noiseless_packing_sphere_is_exact() {
        for l in [grid1(2.0), Lattice::new(LatticeKind::HexagonalA2, 2, 2.0).unwrap()] {
            let p = params(l.m, 0.5, 3.0);
            let cfg = StrategyConfig::new(FirstStage::LatticeQuantize(l), SecondStage::PackingSphere);
            let r = simulate_with(&p, &cfg, 20_000, 5, SimOptions { noise_scale: 0.0 }).unwrap();
            assert_eq!(r.j2_mean, 0.0);
            assert_eq!(r.j2_stderr, 0.0);
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let p = params(2, 0.2, 5.0);
        let cfg = StrategyConfig::new(
            FirstStage::LatticeQuantize(Lattice::for_power(LatticeKind::HexagonalA2, 2, 4.0).unwrap()),
            SecondStage::PackingSphere,
        );
        let a = simulate(&p, &cfg, 30_000, 9).unwrap();
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = single.install(|| simulate(&p, &cfg, 30_000, 9).unwrap());
        let quad = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let c = quad.install(|| simulate(&p, &cfg, 30_000, 9).unwrap());
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = simulate(&p, &cfg, 30_000, 10).unwrap();
        assert_ne!(a.total_mean, d.total_mean);
    }

    #[test]
    fn vs_bound_examples() {
        let p = params(1, 0.2, 5.0);
        let r = simulate_vs_bound(&p, LatticeKind::IntegerGrid, 4.0, 200_000, 1).unwrap();
        assert!(r.passed, "{r:?}");
        let p2 = params(2, 0.2, 5.0);
        let r = simulate_vs_bound(&p2, LatticeKind::HexagonalA2, 4.0, 200_000, 1).unwrap();
        assert!(r.passed, "{r:?}");
        let big = simulate_vs_bound(&params(1, 0.01, 50.0), LatticeKind::IntegerGrid, 100.0, 100_000, 1).unwrap();
        assert_eq!(big.estimate.j2_mean, 0.0);
        assert!(big.estimate.max_u1_sq <= big.lattice.r_c.powi(2));
    }

    #[test]
    fn slopey_and_scalar_mmse_run() {
        let p = params(1, 0.2, 5.0);
        let s = StrategyConfig::new(FirstStage::Slopey { delta: 6.6, alpha: 0.035 }, SecondStage::Mmse);
        let r = simulate(&p, &s, 100_000, 2).unwrap();
        assert!((r.total_mean - 0.1671).abs() < 5.0 * r.stderr, "{r:?}");
        let q = StrategyConfig::new(FirstStage::LatticeQuantize(grid1(6.54)), SecondStage::Mmse);
        let r = simulate(&p, &q, 100_000, 2).unwrap();
        assert!((r.total_mean - 0.17156).abs() < 5.0 * r.stderr, "{r:?}");
    }
}
