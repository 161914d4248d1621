//! The relaxation
//!
//! ```text
//! alpha_eps(U;V) = min over I(Q;V|U) <= eps of I(U;Q|V) + I(U;V|Q)
//! ```
//!
//! Here `Q` may depend on `(U, V)` jointly, through a coupling `p(q|u,v)`.
//! Candidates are generated by (i) lifting the Markov search of
//! [`super::alpha_joint`], (ii) mixing the best candidate with `Q = V`,
//! (iii) descents on `objective + mu * leak` for a ladder of multipliers, and
//! (iv) a descent that rejects any step leaving the feasible set. Every
//! candidate is scored exactly; only feasible ones count for a given `eps`.

use std::f64::consts::LN_2;

use rayon::prelude::*;

use super::descent::{descend, LocalProblem};
use super::objective::GeneralObjective;
use super::{minimize_markov, Coupling, OptimizerOptions, TensionPoint};
use crate::error::{Error, Result};
use crate::info::{JointDist, JointDist3};
use crate::rng::task_rng;

/// Slack on the leak constraint absorbing rounding in its evaluation.
pub const LEAK_TOL: f64 = 1e-12;

const MIX_STEPS: usize = 64;
const MULTIPLIERS: [f64; 8] = [128.0, 64.0, 32.0, 16.0, 8.0, 4.0, 2.0, 1.0];

#[derive(Debug, Clone)]
struct Scored {
    /// `p(q|u,v)`, rows in cell order `u * |V| + v`.
    w: Vec<f64>,
    objective: f64,
    leak: f64,
}

struct Search<'a> {
    j: &'a JointDist,
    qcard: usize,
    f: GeneralObjective,
}

impl Search<'_> {
    fn score(&self, w: Vec<f64>) -> Scored {
        let (nu, nv, nq) = (self.j.rows(), self.j.cols(), self.qcard);
        let cells: Vec<f64> = self
            .j
            .as_slice()
            .iter()
            .enumerate()
            .flat_map(|(cell, &p)| w[cell * nq..(cell + 1) * nq].iter().map(move |&x| p * x))
            .collect();
        let t = JointDist3::new(nu, nv, nq, cells).expect("coupling rows are normalized");
        let p = TensionPoint::of(&t);
        Scored {
            w,
            objective: p.s2 + p.s3,
            leak: p.s1,
        }
    }

    fn lift(&self, c: &Coupling) -> Vec<f64> {
        let nv = self.j.cols();
        (0..self.j.rows())
            .flat_map(|u| (0..nv).flat_map(move |_| c.row(u).iter().copied()))
            .collect()
    }

    fn copy_v(&self) -> Option<Vec<f64>> {
        let (nv, nq) = (self.j.cols(), self.qcard);
        (nq >= nv).then(|| {
            let mut w = vec![0.0; self.j.as_slice().len() * nq];
            for cell in 0..self.j.as_slice().len() {
                w[cell * nq + cell % nv] = 1.0;
            }
            w
        })
    }

    fn descend_from(
        &self,
        start: Vec<f64>,
        mu: f64,
        limit: Option<f64>,
        opts: &OptimizerOptions,
    ) -> Scored {
        let mut problem = GeneralProblem {
            f: &self.f,
            mu,
            limit_nats: limit.map(|e| (e + LEAK_TOL) * LN_2),
            go: vec![0.0; start.len()],
            gl: vec![0.0; start.len()],
        };
        let out = descend(
            &mut problem,
            start,
            self.qcard,
            self.f.cell_mass(),
            opts.tol,
            opts.max_iters,
        );
        self.score(out.w)
    }
}

struct GeneralProblem<'a> {
    f: &'a GeneralObjective,
    mu: f64,
    limit_nats: Option<f64>,
    go: Vec<f64>,
    gl: Vec<f64>,
}

impl LocalProblem for GeneralProblem<'_> {
    fn value(&mut self, w: &[f64]) -> Option<f64> {
        let (objective, leak) = self.f.evaluate_nats(w);
        match self.limit_nats {
            Some(limit) if leak > limit => None,
            _ => Some(objective + self.mu * leak),
        }
    }

    fn gradient(&mut self, w: &[f64], grad: &mut [f64]) {
        self.f.gradients_nats(w, &mut self.go, &mut self.gl);
        for ((g, o), l) in grad.iter_mut().zip(&self.go).zip(&self.gl) {
            *g = o + self.mu * l;
        }
    }
}

fn best_feasible(pool: &[Scored], eps: f64) -> Option<&Scored> {
    pool.iter()
        .filter(|s| s.leak <= eps + LEAK_TOL)
        .fold(None, |best: Option<&Scored>, s| match best {
            Some(b) if b.objective <= s.objective => Some(b),
            _ => Some(s),
        })
}

/// `alpha_eps(U;V)` for a single `eps`; `eps = 0` is exactly [`super::alpha_joint`].
pub fn alpha_epsilon(
    j: &JointDist,
    eps: f64,
    qcard: usize,
    opts: &OptimizerOptions,
) -> Result<f64> {
    Ok(alpha_epsilon_path(j, &[eps], qcard, opts)?[0])
}

/// `alpha_eps(U;V)` for several `eps` at once, in input order.
///
/// The values are processed in increasing `eps` and share one candidate
/// pool, so every candidate feasible at `eps` also competes at any larger
/// `eps`; the returned sequence is therefore non-increasing in `eps`.
pub fn alpha_epsilon_path(
    j: &JointDist,
    eps_values: &[f64],
    qcard: usize,
    opts: &OptimizerOptions,
) -> Result<Vec<f64>> {
    for &eps in eps_values {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::OutOfRange {
                name: "eps",
                value: eps,
            });
        }
    }
    let markov = minimize_markov(j, qcard, 1.0, 1.0, opts)?;
    if j.rows() == 1 || j.cols() == 1 {
        return Ok(vec![0.0; eps_values.len()]);
    }

    let search = Search {
        j,
        qcard,
        f: GeneralObjective::new(j, qcard),
    };
    debug_assert_eq!(search.f.qcard(), qcard);
    let mut pool: Vec<Scored> = markov
        .candidates
        .iter()
        .map(|c| search.score(search.lift(&c.coupling)))
        .collect();
    if let Some(w) = search.copy_v() {
        pool.push(search.score(w));
    }
    let anchor = search.lift(&markov.coupling);

    let mut order: Vec<usize> = (0..eps_values.len()).collect();
    order.sort_by(|&a, &b| eps_values[a].total_cmp(&eps_values[b]));
    let mut out = vec![0.0; eps_values.len()];

    for (round, &k) in order.iter().enumerate() {
        let eps = eps_values[k];
        if eps == 0.0 {
            out[k] = markov.value;
            continue;
        }

        // mixtures of the best feasible point with Q = V
        if let Some(copy) = search.copy_v() {
            let base = best_feasible(&pool, eps).map_or(anchor.clone(), |s| s.w.clone());
            for step in 1..MIX_STEPS {
                let theta = step as f64 / MIX_STEPS as f64;
                let w = base
                    .iter()
                    .zip(&copy)
                    .map(|(a, b)| (1.0 - theta) * a + theta * b)
                    .collect();
                pool.push(search.score(w));
            }
        }

        // multiplier ladder and constrained descents run as independent tasks
        let base = best_feasible(&pool, eps).map_or(anchor.clone(), |s| s.w.clone());
        let random_starts = opts.restarts.max(2) - 2;
        let tasks = MULTIPLIERS.len() + 1 + random_starts;
        let round_opts = opts.for_task(round as u64);
        let found: Vec<Scored> = (0..tasks)
            .into_par_iter()
            .map(|t| {
                if t < MULTIPLIERS.len() {
                    search.descend_from(anchor.clone(), MULTIPLIERS[t], None, opts)
                } else if t == MULTIPLIERS.len() {
                    search.descend_from(base.clone(), 0.0, Some(eps), opts)
                } else {
                    let mut rng = task_rng(round_opts.seed, t as u64);
                    let c = Coupling::random(j.rows(), qcard, &mut rng);
                    search.descend_from(search.lift(&c), 0.0, Some(eps), opts)
                }
            })
            .collect();
        pool.extend(found);

        // a last constrained polish from the current best
        if let Some(best) = best_feasible(&pool, eps) {
            let polished = search.descend_from(best.w.clone(), 0.0, Some(eps), opts);
            pool.push(polished);
        }

        let best = best_feasible(&pool, eps).map_or(f64::INFINITY, |s| s.objective);
        out[k] = best.min(markov.value);
    }

    Ok(out)
}
