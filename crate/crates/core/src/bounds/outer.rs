//! Outer searches over the input simplex.

use crate::info::ProbVector;
use crate::tension::descent::project_simplex;

/// Inverse golden ratio.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[lo, hi]` until the bracket is narrower than
/// `width`. Returns the best point evaluated and the number of evaluations.
pub(crate) fn golden_max(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    width: f64,
) -> (f64, f64, usize) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    let mut best = if fd > fc { (d, fd) } else { (c, fc) };
    while b - a > width {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd > best.1 {
                best = (d, fd);
            }
        }
        evals += 1;
    }
    (best.0, best.1, evals)
}

/// Minimizing counterpart of [`golden_max`].
pub(crate) fn golden_min(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    width: f64,
) -> (f64, f64, usize) {
    let (x, v, n) = golden_max(|x| -f(x), lo, hi, width);
    (x, -v, n)
}

/// All points of the simplex lattice with denominator `resolution` in
/// lexicographically increasing order.
pub(crate) fn simplex_lattice(dim: usize, resolution: usize) -> Vec<ProbVector> {
    fn fill(prefix: &mut Vec<usize>, left: usize, dim: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            fill(prefix, left - k, dim, out);
            prefix.pop();
        }
    }
    let mut counts = Vec::new();
    fill(&mut Vec::with_capacity(dim), resolution, dim, &mut counts);
    counts
        .into_iter()
        .map(|c| {
            let p = c.iter().map(|&k| k as f64 / resolution as f64).collect();
            ProbVector::new(p).expect("lattice points lie on the simplex")
        })
        .collect()
}

/// Nelder-Mead maximization over the simplex, parametrized by the last
/// `dim - 1` coordinates with the first absorbing the remainder; infeasible
/// trial points are projected back onto the simplex.
pub(crate) fn nelder_mead_max(
    mut f: impl FnMut(&ProbVector) -> f64,
    start: &ProbVector,
    scale: f64,
    max_evals: usize,
    ftol: f64,
) -> (ProbVector, f64, usize) {
    let n = start.len() - 1;
    let mut sorted = Vec::new();
    let mut to_point = |y: &[f64]| -> ProbVector {
        let mut p = Vec::with_capacity(n + 1);
        p.push(1.0 - y.iter().sum::<f64>());
        p.extend_from_slice(y);
        project_simplex(&mut p, &mut sorted);
        ProbVector::new(p).expect("projected onto the simplex")
    };
    let mut evals = 0;
    let mut eval = |y: &[f64], evals: &mut usize| -> (f64, ProbVector) {
        let p = to_point(y);
        *evals += 1;
        (-f(&p), p)
    };

    let y0: Vec<f64> = start.as_slice()[1..].to_vec();
    let mut simplex: Vec<(Vec<f64>, f64, ProbVector)> = Vec::with_capacity(n + 1);
    let (v0, p0) = eval(&y0, &mut evals);
    simplex.push((y0.clone(), v0, p0));
    for i in 0..n {
        let mut y = y0.clone();
        y[i] += if y[i] + scale <= 1.0 { scale } else { -scale };
        let (v, p) = eval(&y, &mut evals);
        simplex.push((y, v, p));
    }
    let mut best = simplex
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|s| (s.2.clone(), s.1))
        .expect("non-empty simplex");

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best.1 {
            best = (simplex[0].2.clone(), simplex[0].1);
        }
        if (simplex[n].1 - simplex[0].1).abs() <= ftol {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|s| s.0[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let yr = along(-1.0);
        let (vr, pr) = eval(&yr, &mut evals);
        if vr < simplex[0].1 {
            let ye = along(-2.0);
            let (ve, pe) = eval(&ye, &mut evals);
            simplex[n] = if ve < vr { (ye, ve, pe) } else { (yr, vr, pr) };
        } else if vr < simplex[n - 1].1 {
            simplex[n] = (yr, vr, pr);
        } else {
            let t = if vr < simplex[n].1 { -0.5 } else { 0.5 };
            let yc = along(t);
            let (vc, pc) = eval(&yc, &mut evals);
            if vc < simplex[n].1.min(vr) {
                simplex[n] = (yc, vc, pc);
            } else {
                let anchor = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    let y: Vec<f64> = anchor
                        .iter()
                        .zip(&s.0)
                        .map(|(a, b)| a + 0.5 * (b - a))
                        .collect();
                    let (v, p) = eval(&y, &mut evals);
                    *s = (y, v, p);
                }
            }
        }
    }
    for s in &simplex {
        if s.1 < best.1 {
            best = (s.2.clone(), s.1);
        }
    }
    (best.0, -best.1, evals)
}
