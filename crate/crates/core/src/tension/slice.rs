//! Lower-left frontier of `{(I(U;Q|V), I(U;V|Q)) : Q - U - V}`.
//!
//! Each `lambda` on an even grid over `[0, 1]` scalarizes the pair as
//! `lambda * s2 + (1 - lambda) * s3`. All end points found for any `lambda` go
//! into one pool and every `lambda` then picks its minimizer from the pool, so
//! the reported points are supporting points of the pool's lower convex hull.

use super::{minimize_markov, OptimizerOptions};
use crate::error::{Error, Result};
use crate::info::JointDist;

/// One frontier point with the weight that selected it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePoint {
    pub lambda: f64,
    pub s2: f64,
    pub s3: f64,
}

/// Traces the slice with `num_points` weights; output sorted by `s2`.
pub fn tension_slice(
    j: &JointDist,
    num_points: usize,
    qcard: usize,
    opts: &OptimizerOptions,
) -> Result<Vec<SlicePoint>> {
    if num_points < 2 {
        return Err(Error::OutOfRange {
            name: "num_points",
            value: num_points as f64,
        });
    }
    let lambdas: Vec<f64> = (0..num_points)
        .map(|k| k as f64 / (num_points - 1) as f64)
        .collect();

    let mut pool: Vec<(f64, f64)> = Vec::new();
    for (k, &lambda) in lambdas.iter().enumerate() {
        let found = minimize_markov(j, qcard, lambda, 1.0 - lambda, &opts.for_task(k as u64))?;
        pool.extend(found.candidates.iter().map(|c| (c.s2, c.s3)));
    }

    let mut points: Vec<SlicePoint> = lambdas
        .iter()
        .map(|&lambda| {
            let score = |p: &(f64, f64)| lambda * p.0 + (1.0 - lambda) * p.1;
            let (s2, s3) = pool
                .iter()
                .copied()
                .reduce(|best, p| {
                    let (a, b) = (score(&best), score(&p));
                    // ties go to the lexicographically lower-left point
                    if b < a || (b == a && (p.0, p.1) < (best.0, best.1)) {
                        p
                    } else {
                        best
                    }
                })
                .expect("pool holds at least the structured seeds");
            SlicePoint { lambda, s2, s3 }
        })
        .collect();
    points.sort_by(|a, b| {
        a.s2.total_cmp(&b.s2)
            .then(b.s3.total_cmp(&a.s3))
            .then(b.lambda.total_cmp(&a.lambda))
    });
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{standard_channel, ChannelKind};
    use crate::info::{compose_joint, conditional_entropy, ProbVector};
    use crate::verify::ot_correlation;

    fn quick() -> OptimizerOptions {
        OptimizerOptions {
            restarts: 6,
            ..Default::default()
        }
    }

    /// Sorted points must be non-increasing in `s3` and convex.
    fn assert_convex_frontier(points: &[SlicePoint]) {
        for w in points.windows(2) {
            assert!(w[1].s2 >= w[0].s2);
            assert!(w[1].s3 <= w[0].s3 + 1e-9, "{points:?}");
        }
        for w in points.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let cross = (b.s2 - a.s2) * (c.s3 - a.s3) - (b.s3 - a.s3) * (c.s2 - a.s2);
            assert!(cross >= -1e-9, "non-convex at {b:?}: {cross}");
        }
    }

    #[test]
    fn trivial_pairs_contain_origin() {
        let indep = JointDist::independent(&ProbVector::uniform(2), &ProbVector::uniform(3));
        let pts = tension_slice(&indep, 5, 8, &quick()).unwrap();
        assert!(pts.iter().all(|p| p.s2.abs() < 1e-12 && p.s3.abs() < 1e-12));
        let copy = JointDist::diagonal(&ProbVector::uniform(2));
        let pts = tension_slice(&copy, 5, 6, &quick()).unwrap();
        assert!(pts.iter().any(|p| p.s2.abs() < 1e-12 && p.s3.abs() < 1e-12));
    }

    #[test]
    fn z_channel_frontier() {
        let ch = standard_channel(ChannelKind::ZChannel, 0.5).unwrap();
        let j = compose_joint(&ProbVector::uniform(2), &ch).unwrap();
        let pts = tension_slice(&j, 11, 6, &quick()).unwrap();
        assert_eq!(pts.len(), 11);
        assert_convex_frontier(&pts);
        // lambda = 1 minimizes s2 alone; a constant Q reaches 0
        let end = pts.iter().find(|p| p.lambda == 1.0).unwrap();
        assert!(end.s2.abs() < 1e-3);
        // lambda = 0 minimizes s3 alone; Q = X reaches s3 = 0 with s2 = H(X|Y)
        let start = pts.iter().find(|p| p.lambda == 0.0).unwrap();
        assert!(start.s3.abs() < 1e-12);
        assert!(start.s2 <= conditional_entropy(&j) + 1e-12);
    }

    #[test]
    fn ot_frontier_sum_is_one() {
        let ot = ot_correlation(1).unwrap();
        let pts = tension_slice(&ot.joint, 5, 6, &quick()).unwrap();
        assert_convex_frontier(&pts);
        let min_sum = pts
            .iter()
            .map(|p| p.s2 + p.s3)
            .fold(f64::INFINITY, f64::min);
        assert!((min_sum - 1.0).abs() < 1e-3, "{min_sum}");
    }

    #[test]
    fn rejects_short_grid() {
        let j = JointDist::diagonal(&ProbVector::uniform(2));
        assert!(tension_slice(&j, 1, 2, &quick()).is_err());
    }
}
