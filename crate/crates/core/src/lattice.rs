//! Lattice geometry: packing radius, covering radius, packing-covering ratio
//! and nearest-point quantization for the integer grid `Zᵐ` and the
//! hexagonal lattice `A₂`.
//!
//! `scale` is always the minimum distance between lattice points, so the
//! packing radius is `scale / 2` for both kinds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    /// Scaled integer grid in any dimension.
    IntegerGrid,
    /// Hexagonal lattice, dimension 2 only.
    HexagonalA2,
}

impl LatticeKind {
    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::IntegerGrid => "grid",
            LatticeKind::HexagonalA2 => "hex",
        }
    }

    /// Packing-covering ratio of this kind in dimension `m`.
    pub fn xi(self, m: usize) -> Result<f64> {
        match (self, m) {
            (_, 0) => Err(Error::UnsupportedLattice {
                kind: self.name(),
                m,
            }),
            (LatticeKind::IntegerGrid, m) => Ok((m as f64).sqrt()),
            (LatticeKind::HexagonalA2, 2) => Ok(2.0 / SQRT3),
            (LatticeKind::HexagonalA2, m) => Err(Error::UnsupportedLattice {
                kind: self.name(),
                m,
            }),
        }
    }
}

impl std::fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" | "integer-grid" => Ok(LatticeKind::IntegerGrid),
            "hex" | "hexagonal" | "hexagonal-a2" => Ok(LatticeKind::HexagonalA2),
            other => Err(Error::InvalidParameter(format!(
                "unknown lattice kind `{other}`"
            ))),
        }
    }
}

/// An immutable scaled lattice with its geometric radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub m: usize,
    pub scale: f64,
    pub r_p: f64,
    pub r_c: f64,
    pub xi: f64,
}

impl Lattice {
    /// Builds a lattice whose minimum distance is `scale`.
    pub fn new(kind: LatticeKind, m: usize, scale: f64) -> Result<Self> {
        require(scale > 0.0 && scale.is_finite(), "scale", scale, "scale > 0")?;
        let xi = kind.xi(m)?;
        let r_p = scale / 2.0;
        let r_c = match kind {
            LatticeKind::IntegerGrid => scale * (m as f64).sqrt() / 2.0,
            LatticeKind::HexagonalA2 => scale / SQRT3,
        };
        Ok(Lattice {
            kind,
            m,
            scale,
            r_p,
            r_c,
            xi,
        })
    }

    /// Lattice with `r_c² = m·P`, the scaling used by the quantization
    /// strategy at per-dimension power `P`.
    pub fn for_power(kind: LatticeKind, m: usize, power: f64) -> Result<Self> {
        require(power > 0.0, "P", power, "P > 0")?;
        let xi = kind.xi(m)?;
        let r_c = (m as f64 * power).sqrt();
        Lattice::new(kind, m, 2.0 * r_c / xi)
    }

    /// Lattice with packing radius `r_p`.
    pub fn with_packing_radius(kind: LatticeKind, m: usize, r_p: f64) -> Result<Self> {
        Lattice::new(kind, m, 2.0 * r_p)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Nearest lattice point to `x`. Ties go to the lexicographically
    /// smallest candidate.
    pub fn quantize(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.m];
        self.quantize_into(x, &mut out);
        Ok(out)
    }

    /// Allocation-free [`quantize`](Self::quantize); `x` and `out` must have
    /// length `m`.
    pub fn quantize_into(&self, x: &[f64], out: &mut [f64]) {
        match self.kind {
            LatticeKind::IntegerGrid => {
                for (o, &v) in out.iter_mut().zip(x) {
                    *o = round_half_down(v / self.scale) * self.scale;
                }
            }
            LatticeKind::HexagonalA2 => {
                let (a, b) = self.hex_nearest(x[0], x[1]);
                out[0] = a;
                out[1] = b;
            }
        }
    }

    /// A₂ is the union of two cosets of the rectangular lattice
    /// `s·Z × s√3·Z`; the nearest point is among the four rounding
    /// candidates of each coset.
    fn hex_nearest(&self, x: f64, y: f64) -> (f64, f64) {
        let tie = 1e-12 * self.scale * self.scale;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for (px, py) in self.hex_candidates(x, y) {
            let d = (x - px).powi(2) + (y - py).powi(2);
            if d < best.0 - tie || ((d - best.0).abs() <= tie && (px, py) < (best.1, best.2)) {
                best = (d, px, py);
            }
        }
        (best.1, best.2)
    }

    fn hex_candidates(&self, x: f64, y: f64) -> impl Iterator<Item = (f64, f64)> {
        let s = self.scale;
        let h = s * SQRT3;
        [(0.0, 0.0), (s / 2.0, h / 2.0)]
            .into_iter()
            .flat_map(move |(ox, oy)| {
                let u = ((x - ox) / s).floor();
                let v = ((y - oy) / h).floor();
                [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
                    .into_iter()
                    .map(move |(du, dv)| ((u + du) * s + ox, (v + dv) * h + oy))
            })
    }

    /// Candidate lattice points around `x`; every lattice point strictly
    /// within `r_p` of `x` is among them.
    pub fn neighbors(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_dim(x)?;
        let pts = match self.kind {
            LatticeKind::IntegerGrid => {
                let base: Vec<f64> = x.iter().map(|v| (v / self.scale).floor()).collect();
                (0..(1usize << self.m))
                    .map(|code| {
                        base.iter()
                            .enumerate()
                            .map(|(i, b)| (b + ((code >> i) & 1) as f64) * self.scale)
                            .collect()
                    })
                    .collect()
            }
            LatticeKind::HexagonalA2 => self
                .hex_candidates(x[0], x[1])
                .map(|(a, b)| vec![a, b])
                .collect(),
        };
        Ok(pts)
    }

    /// Uniform point in a fundamental parallelepiped of the lattice.
    fn sample_fundamental<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self.kind {
            LatticeKind::IntegerGrid => (0..self.m)
                .map(|_| rng.random::<f64>() * self.scale)
                .collect(),
            LatticeKind::HexagonalA2 => {
                let (a, b) = (rng.random::<f64>(), rng.random::<f64>());
                let s = self.scale;
                vec![a * s + b * s / 2.0, b * s * SQRT3 / 2.0]
            }
        }
    }

    /// Empirically certifies `r_c` and `r_p` with `n_probes` random probes.
    pub fn verify_radii(&self, n_probes: usize, seed: u64) -> RadiiReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_probes = n_probes.max(1);
        let mut max_dist: f64 = 0.0;
        let mut covering_ok = true;
        let mut packing_ok = true;
        let mut q = vec![0.0; self.m];
        for _ in 0..n_probes {
            let x = self.sample_fundamental(&mut rng);
            self.quantize_into(&x, &mut q);
            let d = dist(&x, &q);
            max_dist = max_dist.max(d);
            if d > self.r_c + 1e-9 {
                covering_ok = false;
            }
            let inside = self
                .neighbors(&x)
                .expect("probe has lattice dimension")
                .iter()
                .filter(|p| dist(&x, p) < self.r_p - 1e-9)
                .count();
            if inside > 1 {
                packing_ok = false;
            }
        }
        RadiiReport {
            n_probes,
            max_distance: max_dist,
            r_c: self.r_c,
            r_p: self.r_p,
            covering_ok,
            packing_ok,
        }
    }

    /// A point at distance `r_c` from the lattice.
    pub fn deep_hole(&self) -> Vec<f64> {
        match self.kind {
            LatticeKind::IntegerGrid => vec![self.scale / 2.0; self.m],
            LatticeKind::HexagonalA2 => vec![self.scale / 2.0, self.scale / (2.0 * SQRT3)],
        }
    }
}

/// Result of [`Lattice::verify_radii`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiiReport {
    pub n_probes: usize,
    /// Largest observed quantization distance, a lower estimate of `r_c`.
    pub max_distance: f64,
    pub r_c: f64,
    pub r_p: f64,
    pub covering_ok: bool,
    pub packing_ok: bool,
}

impl RadiiReport {
    pub fn passed(&self) -> bool {
        self.covering_ok && self.packing_ok
    }
}

/// Rounds to the nearest integer with exact halves going down.
#[inline]
fn round_half_down(v: f64) -> f64 {
    (v - 0.5).ceil()
}

#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}
