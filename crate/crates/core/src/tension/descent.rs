//! Projected gradient descent over a product of probability simplices.
//!
//! The variable is a row-major matrix whose rows each live on a simplex. Each
//! row's gradient is divided by that row's probability mass before the step
//! (rows with zero mass never move). Steps are accepted only on strict
//! decrease; the step halves on rejection and doubles after acceptance.

const MAX_STEP: f64 = 1e4;
const MIN_STEP: f64 = 1e-20;

pub(crate) trait LocalProblem {
    /// Objective at `w`, or `None` if `w` is infeasible.
    fn value(&mut self, w: &[f64]) -> Option<f64>;
    fn gradient(&mut self, w: &[f64], grad: &mut [f64]);
}

#[derive(Debug, Clone)]
pub(crate) struct DescentOutcome {
    pub w: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Euclidean projection of `row` onto the probability simplex.
pub(crate) fn project_simplex(row: &mut [f64], sorted: &mut Vec<f64>) {
    sorted.clear();
    sorted.extend_from_slice(row);
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        cumulative += x;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    for x in row.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
    let s: f64 = row.iter().sum();
    if s > 0.0 && s != 1.0 {
        row.iter_mut().for_each(|x| *x /= s);
    }
}

pub(crate) fn descend<P: LocalProblem>(
    problem: &mut P,
    start: Vec<f64>,
    row_len: usize,
    row_mass: &[f64],
    tol: f64,
    max_iters: usize,
) -> DescentOutcome {
    let mut w = start;
    let Some(mut f) = problem.value(&w) else {
        return DescentOutcome {
            w,
            iterations: 0,
            converged: false,
        };
    };
    let mut grad = vec![0.0; w.len()];
    let mut cand = vec![0.0; w.len()];
    let mut sorted = Vec::with_capacity(row_len);
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iters {
        iterations += 1;
        problem.gradient(&w, &mut grad);
        for (r, &mass) in row_mass.iter().enumerate() {
            let g = &mut grad[r * row_len..(r + 1) * row_len];
            if mass > 0.0 {
                g.iter_mut().for_each(|x| *x /= mass);
            } else {
                g.iter_mut().for_each(|x| *x = 0.0);
            }
        }

        let mut improvement = None;
        while step >= MIN_STEP {
            for (r, &mass) in row_mass.iter().enumerate() {
                let span = r * row_len..(r + 1) * row_len;
                let out = &mut cand[span.clone()];
                if mass > 0.0 {
                    for ((c, &x), &g) in out.iter_mut().zip(&w[span.clone()]).zip(&grad[span]) {
                        *c = x - step * g;
                    }
                    project_simplex(out, &mut sorted);
                } else {
                    out.copy_from_slice(&w[span]);
                }
            }
            let moved = cand.iter().zip(&w).any(|(a, b)| (a - b).abs() > 1e-16);
            if !moved {
                break;
            }
            if let Some(fc) = problem.value(&cand) {
                if fc < f {
                    improvement = Some(f - fc);
                    f = fc;
                    std::mem::swap(&mut w, &mut cand);
                    step = (step * 2.0).min(MAX_STEP);
                    break;
                }
            }
            step *= 0.5;
        }
        match improvement {
            Some(gain) if gain >= tol => {}
            _ => {
                converged = true;
                break;
            }
        }
    }

    DescentOutcome {
        w,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_lands_on_simplex() {
        let mut sorted = Vec::new();
        let mut row = vec![0.5, 0.5, 0.5];
        project_simplex(&mut row, &mut sorted);
        assert!(row.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
        let mut row = vec![2.0, -1.0, 0.0];
        project_simplex(&mut row, &mut sorted);
        assert_eq!(row, vec![1.0, 0.0, 0.0]);
        let mut row = vec![0.2, 0.3, 0.5];
        project_simplex(&mut row, &mut sorted);
        assert!((row[0] - 0.2).abs() < 1e-15 && (row[2] - 0.5).abs() < 1e-15);
    }

    struct Quadratic {
        target: Vec<f64>,
    }

    impl LocalProblem for Quadratic {
        fn value(&mut self, w: &[f64]) -> Option<f64> {
            Some(
                w.iter()
                    .zip(&self.target)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum(),
            )
        }
        fn gradient(&mut self, w: &[f64], grad: &mut [f64]) {
            for ((g, a), b) in grad.iter_mut().zip(w).zip(&self.target) {
                *g = 2.0 * (a - b);
            }
        }
    }

    #[test]
    fn finds_projection_of_target() {
        // minimizer of ||w - t||^2 on the simplex is the projection of t
        let mut p = Quadratic {
            target: vec![0.9, 0.4, -0.2, 0.1, 0.1, 0.1],
        };
        let out = descend(&mut p, vec![1.0 / 3.0; 6], 3, &[1.0, 1.0], 1e-15, 1000);
        assert!(out.converged);
        let want = [0.75, 0.25, 0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        for (a, b) in out.w.iter().zip(want) {
            assert!((a - b).abs() < 1e-6, "{:?}", out.w);
        }
    }

    #[test]
    fn zero_mass_rows_stay_fixed() {
        let mut p = Quadratic {
            target: vec![1.0, 0.0, 1.0, 0.0],
        };
        let out = descend(&mut p, vec![0.5, 0.5, 0.2, 0.8], 2, &[1.0, 0.0], 1e-15, 100);
        assert_eq!(&out.w[2..], &[0.2, 0.8]);
        assert!((out.w[0] - 1.0).abs() < 1e-9);
    }
}
