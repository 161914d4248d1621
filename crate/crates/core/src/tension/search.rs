//! Multistart minimization of `a * I(U;Q|V) + b * I(U;V|Q)` over `Q - U - V`.

use rayon::prelude::*;

use super::descent::{descend, LocalProblem};
use super::objective::{MarkovObjective, Scratch};
use super::{check_qcard, Coupling, OptimizerOptions, TensionPoint};
use crate::error::{Error, Result};
use crate::info::{conditional_entropy, extend_with_coupling, mutual_information, JointDist};
use crate::rng::task_rng;

/// Bookkeeping reported with every search result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    /// Local descents actually run.
    pub restarts: usize,
    /// Descent iterations summed over all restarts.
    pub iterations: usize,
    /// Every descent stopped on the tolerance rather than the iteration cap.
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub coupling: Coupling,
    pub s2: f64,
    pub s3: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct MarkovMin {
    /// `a * s2 + b * s3` of the winner.
    pub value: f64,
    pub coupling: Coupling,
    pub stats: SearchStats,
    /// Every evaluated end point, structured seeds first, then restarts in order.
    pub candidates: Vec<Candidate>,
}

struct MarkovProblem<'a> {
    f: &'a MarkovObjective,
    scratch: Scratch,
}

impl LocalProblem for MarkovProblem<'_> {
    fn value(&mut self, w: &[f64]) -> Option<f64> {
        Some(self.f.value_nats(w, &mut self.scratch))
    }

    fn gradient(&mut self, w: &[f64], grad: &mut [f64]) {
        self.f.gradient_nats(w, &mut self.scratch, grad);
    }
}

fn exact_point(j: &JointDist, c: &Coupling) -> (f64, f64) {
    let t = extend_with_coupling(j, c).expect("coupling built for this joint");
    let p = TensionPoint::of(&t);
    (p.s2, p.s3)
}

pub(crate) fn minimize_markov(
    j: &JointDist,
    qcard: usize,
    weight_s2: f64,
    weight_s3: f64,
    opts: &OptimizerOptions,
) -> Result<MarkovMin> {
    opts.validate()?;
    let (nu, nv) = (j.rows(), j.cols());
    check_qcard(qcard, nu, nv)?;
    for (name, w) in [("weight_s2", weight_s2), ("weight_s3", weight_s3)] {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::OutOfRange { name, value: w });
        }
    }

    if nu == 1 || nv == 1 {
        let coupling = Coupling::constant(nu, qcard);
        return Ok(MarkovMin {
            value: 0.0,
            candidates: vec![Candidate {
                coupling: coupling.clone(),
                s2: 0.0,
                s3: 0.0,
            }],
            coupling,
            stats: SearchStats {
                restarts: 0,
                iterations: 0,
                converged: true,
            },
        });
    }

    // Structured seeds are scored with the same routines the reference bound
    // uses, so the result can never exceed min(I(U;V), H(U|V)).
    let mut candidates = vec![Candidate {
        coupling: Coupling::constant(nu, qcard),
        s2: 0.0,
        s3: mutual_information(j),
    }];
    if qcard >= nu {
        candidates.push(Candidate {
            coupling: Coupling::copy(nu, qcard),
            s2: conditional_entropy(j),
            s3: 0.0,
        });
    }

    let objective = MarkovObjective::new(j, qcard, weight_s2, weight_s3);
    let starts = opts.restarts.max(2);
    let runs: Vec<(Candidate, usize, bool)> = (0..starts)
        .into_par_iter()
        .map(|index| {
            let start = match index {
                0 => Coupling::constant(nu, qcard),
                1 => Coupling::copy(nu, qcard),
                _ => Coupling::random(nu, qcard, &mut task_rng(opts.seed, index as u64)),
            };
            let mut problem = MarkovProblem {
                f: &objective,
                scratch: objective.scratch(),
            };
            let out = descend(
                &mut problem,
                start.as_slice().to_vec(),
                qcard,
                objective.row_mass(),
                opts.tol,
                opts.max_iters,
            );
            let coupling = Coupling::from_raw(nu, qcard, out.w);
            let (s2, s3) = exact_point(j, &coupling);
            (
                Candidate { coupling, s2, s3 },
                out.iterations,
                out.converged,
            )
        })
        .collect();

    let mut stats = SearchStats {
        restarts: starts,
        iterations: 0,
        converged: true,
    };
    for (candidate, iterations, converged) in runs {
        stats.iterations += iterations;
        stats.converged &= converged;
        candidates.push(candidate);
    }

    let score = |c: &Candidate| weight_s2 * c.s2 + weight_s3 * c.s3;
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        if score(c) < score(&candidates[best]) {
            best = i;
        }
    }
    Ok(MarkovMin {
        value: score(&candidates[best]),
        coupling: candidates[best].coupling.clone(),
        stats,
        candidates,
    })
}
