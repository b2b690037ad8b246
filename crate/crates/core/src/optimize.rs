//! Small derivative-free minimizers: log-spaced scans, golden-section search
//! and a box-constrained Nelder–Mead.

/// `n` points log-spaced over `[lo, hi]`, endpoints included.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` points evenly spaced over `[lo, hi]`.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Minimum of a 1-D search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Min1 {
    pub x: f64,
    pub f: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of `f` on `[a, b]` to relative tolerance
/// `rel_tol` in `x`. Endpoints are evaluated too, so a boundary minimum is
/// never lost.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Min1 {
    let (mut a, mut b) = (a.min(b), a.max(b));
    let fa0 = f(a);
    let fb0 = f(b);
    let mut best = if fa0 <= fb0 {
        Min1 { x: a, f: fa0 }
    } else {
        Min1 { x: b, f: fb0 }
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * (c.abs() + d.abs()).max(1e-300) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx < best.f {
            best = Min1 { x, f: fx };
        }
    }
    best
}

/// Scans `grid`, then refines the `n_refine` best grid minima with golden
/// section over their neighboring cells in `ln x`. Grid points must be
/// positive and increasing.
pub fn multistart_log<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], n_refine: usize, rel_tol: f64) -> Min1 {
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]).then(i.cmp(&j)));
    let mut best = Min1 {
        x: grid[order[0]],
        f: vals[order[0]],
    };
    for &i in order.iter().take(n_refine) {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(grid.len() - 1)];
        if hi <= lo {
            continue;
        }
        let m = golden_section(|t| f(t.exp()), lo.ln(), hi.ln(), rel_tol);
        if m.f < best.f {
            best = Min1 { x: m.x.exp(), f: m.f };
        }
    }
    best
}

/// Result of a Nelder–Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iters: usize,
    pub converged: bool,
}

/// Box-constrained Nelder–Mead: trial points are clamped into
/// `[lower, upper]`. Stops when the simplex's function spread falls below
/// `f_tol` and its extent below `x_tol`, or after `max_iter` iterations.
#[allow(clippy::too_many_arguments)]
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    lower: &[f64],
    upper: &[f64],
    x_tol: f64,
    f_tol: f64,
    max_iter: usize,
) -> NelderMeadResult {
    let n = x0.len();
    let clamp = |x: &mut Vec<f64>| {
        for i in 0..n {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    clamp(&mut start);
    simplex.push(start.clone());
    for i in 0..n {
        let mut v = start.clone();
        v[i] += step[i];
        if v[i] > upper[i] {
            v[i] = start[i] - step[i];
        }
        clamp(&mut v);
        simplex.push(v);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|x| f(x)).collect();

    let mut iters = 0;
    let mut converged = false;
    while iters < max_iter {
        iters += 1;
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]).then(a.cmp(&b)));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        fv = idx.iter().map(|&i| fv[i]).collect();

        let spread = (fv[n] - fv[0]).abs();
        let extent = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= f_tol && extent <= x_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = (0..n)
                .map(|j| centroid[j] + t * (simplex[n][j] - centroid[j]))
                .collect();
            clamp(&mut p);
            p
        };

        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < fv[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if fr < fv[n - 1] {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            let (xc, fc) = if fr < fv[n] {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < fv[n].min(fr) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                for i in 1..=n {
                    let mut v: Vec<f64> = (0..n)
                        .map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]))
                        .collect();
                    clamp(&mut v);
                    fv[i] = f(&v);
                    simplex[i] = v;
                }
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| fv[a].total_cmp(&fv[b]).then(a.cmp(&b)))
        .unwrap();
    NelderMeadResult {
        x: simplex[best].clone(),
        f: fv[best],
        iters,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let m = golden_section(|x| (x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-10);
        assert!((m.x - 1.3).abs() < 1e-7);
        assert!((m.f - 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_keeps_boundary_minimum() {
        let m = golden_section(|x| x, 2.0, 3.0, 1e-8);
        assert_eq!(m.x, 2.0);
    }

    #[test]
    fn multistart_escapes_local_minimum() {
        // two wells in ln x; the deeper one is near x = 100
        let f = |x: f64| {
            let t = x.ln();
            -(-(t - 0.0).powi(2)).exp() - 2.0 * (-(t - 100f64.ln()).powi(2)).exp()
        };
        let grid = log_space(1e-3, 1e4, 60);
        let m = multistart_log(f, &grid, 3, 1e-10);
        assert!((m.x - 100.0).abs() / 100.0 < 1e-6, "{m:?}");
    }

    #[test]
    fn nelder_mead_rosenbrock_in_box() {
        let r = nelder_mead(
            |v| (1.0 - v[0]).powi(2) + 100.0 * (v[1] - v[0] * v[0]).powi(2),
            &[-1.2, 1.0],
            &[0.5, 0.5],
            &[-5.0, -5.0],
            &[5.0, 5.0],
            1e-10,
            1e-16,
            5000,
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn nelder_mead_respects_bounds() {
        let r = nelder_mead(
            |v| (v[0] + 3.0).powi(2) + (v[1] - 0.5).powi(2),
            &[0.5, 0.5],
            &[0.2, 0.2],
            &[0.0, 0.0],
            &[0.9, 0.9],
            1e-10,
            1e-16,
            2000,
        );
        assert!(r.x[0].abs() < 1e-8 && (r.x[1] - 0.5).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn spaces() {
        let g = log_space(1e-6, 100.0, 200);
        assert_eq!(g.len(), 200);
        assert!((g[0] - 1e-6).abs() < 1e-20 && (g[199] - 100.0).abs() < 1e-10);
        assert_eq!(lin_space(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
