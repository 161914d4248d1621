//! Executable checks of the facts the bound rests on.
//!
//! - [`ot_correlation`]: the ideal input/output joint of string OT
//! - [`lemma4_residual`], [`lemma4_appendix_check`]: the lower bound on
//!   alpha of the OT correlation, for one auxiliary at a time
//! - [`lemma1_case_check`]: subadditivity of alpha under a channel use
//! - [`brute_force_alpha`]: exhaustive lattice minimum of the alpha objective
//! - [`suites`]: seeded randomized runs of the above with reports

pub mod suites;

pub use suites::{format_report, residuals_csv, run_all, SuiteReport};

use crate::bounds::outer::simplex_lattice;
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::info::{conditional_mutual_information, extend_with_coupling, Cmi, JointDist};
use crate::tension::{check_qcard, Coupling, OptimizerOptions};
use rayon::prelude::*;

/// Largest number of lattice couplings [`brute_force_alpha`] will evaluate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e8;
/// Largest alphabet accepted by [`lemma1_case_check`].
pub const LEMMA1_MAX_ALPHABET: usize = 3;

/// The joint of `U = (S0, S1)` and `V = (K, S_K)` for uniform `m`-bit strings
/// `S0, S1` and a uniform choice bit `K`.
///
/// `U` is indexed by `s0 + 2^m s1` and `V` by `k 2^m + s_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OTCorrelation {
    pub m: usize,
    pub joint: JointDist,
}

/// Builds the OT correlation for strings of `m` bits, `1 <= m <= 3`.
pub fn ot_correlation(m: usize) -> Result<OTCorrelation> {
    if !(1..=3).contains(&m) {
        return Err(Error::OutOfRange {
            name: "m",
            value: m as f64,
        });
    }
    let n = 1usize << m;
    let (nu, nv) = (n * n, 2 * n);
    let mass = 1.0 / (2 * nu) as f64;
    let mut data = vec![0.0; nu * nv];
    for s1 in 0..n {
        for s0 in 0..n {
            let u = s0 + n * s1;
            data[u * nv + s0] += mass;
            data[u * nv + n + s1] += mass;
        }
    }
    Ok(OTCorrelation {
        m,
        joint: JointDist::new(nu, nv, data)?,
    })
}

fn check_coupling(ot: &OTCorrelation, c: &Coupling) -> Result<()> {
    if c.input_card() != ot.joint.rows() {
        return Err(Error::DimensionMismatch {
            what: "coupling rows",
            expected: ot.joint.rows(),
            got: c.input_card(),
        });
    }
    Ok(())
}

/// `I(U;V|Q) + I(U;Q|V) - m` for the auxiliary `p(q|u) = c`; never below 0
/// up to rounding.
pub fn lemma4_residual(ot: &OTCorrelation, c: &Coupling) -> Result<f64> {
    check_coupling(ot, c)?;
    let t = extend_with_coupling(&ot.joint, c)?;
    Ok(conditional_mutual_information(&t, Cmi::UvGivenQ)
        + conditional_mutual_information(&t, Cmi::UqGivenV)
        - ot.m as f64)
}

/// `2 H(V|Q) - H(U|Q) - 2` for the auxiliary `p(q|u) = c`; never below 0
/// up to rounding.
pub fn lemma4_appendix_check(ot: &OTCorrelation, c: &Coupling) -> Result<f64> {
    check_coupling(ot, c)?;
    let t = extend_with_coupling(&ot.joint, c)?;
    let h_q = t.marginal_entropy(false, false, true);
    let h_v_given_q = t.marginal_entropy(false, true, true) - h_q;
    let h_u_given_q = t.marginal_entropy(true, false, true) - h_q;
    Ok(2.0 * h_v_given_q - h_u_given_q - 2.0)
}

/// Minimum of `I(U;Q|V) + I(U;V|Q)` over every coupling whose rows lie on
/// the simplex lattice with denominator `resolution`.
///
/// Costs up to `(resolution + 1)^(|U| (qcard - 1))` evaluations; larger
/// requests than [`BRUTE_FORCE_LIMIT`] are refused. Refining the resolution
/// along a dyadic chain only adds lattice points, so the value never
/// increases.
pub fn brute_force_alpha(j: &JointDist, qcard: usize, resolution: usize) -> Result<f64> {
    check_qcard(qcard, j.rows(), j.cols())?;
    if resolution == 0 {
        return Err(Error::OutOfRange {
            name: "resolution",
            value: 0.0,
        });
    }
    let nu = j.rows();
    let cost = ((resolution + 1) as f64).powi((nu * (qcard - 1)) as i32);
    if cost > BRUTE_FORCE_LIMIT {
        return Err(Error::CostBound {
            cost,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let lattice: Vec<Vec<f64>> = simplex_lattice(qcard, resolution)
        .into_iter()
        .map(|p| p.into_vec())
        .collect();
    let eval = |idx: &[usize]| -> f64 {
        let data: Vec<f64> = idx
            .iter()
            .flat_map(|&k| lattice[k].iter().copied())
            .collect();
        let c = Coupling::from_raw(nu, qcard, data);
        let t = extend_with_coupling(j, &c).expect("dimensions checked");
        conditional_mutual_information(&t, Cmi::UqGivenV)
            + conditional_mutual_information(&t, Cmi::UvGivenQ)
    };
    // The first row's lattice index is split across tasks; the remaining
    // rows are enumerated with an odometer.
    let best = (0..lattice.len())
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; nu];
            idx[0] = first;
            let mut best = f64::INFINITY;
            loop {
                best = best.min(eval(&idx));
                let mut r = 1;
                while r < nu {
                    idx[r] += 1;
                    if idx[r] < lattice.len() {
                        break;
                    }
                    idx[r] = 0;
                    r += 1;
                }
                if r >= nu {
                    break;
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best.max(0.0))
}

/// A pair `(Ũ, Ṽ)`, a deterministic map from `Ũ` to a channel input, and
/// the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SubadditivityCase {
    pub base_joint: JointDist,
    pub xmap: Vec<usize>,
    pub ch: Channel,
}

impl SubadditivityCase {
    fn validate(&self) -> Result<()> {
        if self.xmap.len() != self.base_joint.rows() {
            return Err(Error::DimensionMismatch {
                what: "xmap length",
                expected: self.base_joint.rows(),
                got: self.xmap.len(),
            });
        }
        if let Some(&x) = self.xmap.iter().find(|&&x| x >= self.ch.input_card()) {
            return Err(Error::OutOfRange {
                name: "xmap value",
                value: x as f64,
            });
        }
        let sizes = [
            self.base_joint.rows(),
            self.base_joint.cols(),
            self.ch.input_card(),
            self.ch.output_card(),
        ];
        if let Some(&n) = sizes.iter().find(|&&n| n > LEMMA1_MAX_ALPHABET) {
            return Err(Error::OutOfRange {
                name: "alphabet size",
                value: n as f64,
            });
        }
        Ok(())
    }

    /// Joint of `U = Ũ` and `V = (Ṽ, Y)` with `Y` the channel output at
    /// input `xmap(Ũ)`; `V` is indexed by `ṽ |Y| + y`.
    pub fn combined_joint(&self) -> Result<JointDist> {
        self.validate()?;
        let (nu, nv, ny) = (
            self.base_joint.rows(),
            self.base_joint.cols(),
            self.ch.output_card(),
        );
        let mut data = vec![0.0; nu * nv * ny];
        for u in 0..nu {
            let row = self.ch.row(self.xmap[u]);
            for v in 0..nv {
                let p = self.base_joint.get(u, v);
                for (y, w) in row.iter().enumerate() {
                    data[u * nv * ny + v * ny + y] = p * w;
                }
            }
        }
        JointDist::new(nu, nv * ny, data)
    }

    /// Joint of the channel input `X = xmap(Ũ)` and output `Y`.
    pub fn channel_joint(&self) -> Result<JointDist> {
        self.validate()?;
        let (nx, ny) = (self.ch.input_card(), self.ch.output_card());
        let pu = self.base_joint.row_marginal();
        let mut data = vec![0.0; nx * ny];
        for (u, &x) in self.xmap.iter().enumerate() {
            for (y, w) in self.ch.row(x).iter().enumerate() {
                data[x * ny + y] += pu[u] * w;
            }
        }
        JointDist::new(nx, ny, data)
    }
}

/// Outcome of one subadditivity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Outcome {
    /// `alpha(U;V)` for the combined pair.
    pub lhs: f64,
    /// `alpha(Ũ;Ṽ) + alpha(X;Y)`.
    pub rhs: f64,
    pub pass: bool,
}

/// Checks `alpha(U;V) <= alpha(Ũ;Ṽ) + alpha(X;Y) + slack` with all three
/// terms from [`brute_force_alpha`] at `opts.grid_resolution`, each with an
/// auxiliary alphabet of at most `qcard`.
pub fn lemma1_case_check(
    case: &SubadditivityCase,
    qcard: usize,
    opts: &OptimizerOptions,
    slack: f64,
) -> Result<Lemma1Outcome> {
    opts.validate()?;
    let res = opts.grid_resolution;
    let combined = case.combined_joint()?;
    let xy = case.channel_joint()?;
    let bf = |j: &JointDist| brute_force_alpha(j, qcard.min(j.rows() * j.cols() + 2), res);
    let lhs = bf(&combined)?;
    let rhs = bf(&case.base_joint)? + bf(&xy)?;
    Ok(Lemma1Outcome {
        lhs,
        rhs,
        pass: lhs <= rhs + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{conditional_entropy, entropy, mutual_information, ProbVector};

    #[test]
    fn ot_correlation_shape_and_identities() {
        let ot = ot_correlation(1).unwrap();
        assert_eq!((ot.joint.rows(), ot.joint.cols()), (4, 4));
        let cells: Vec<f64> = ot
            .joint
            .as_slice()
            .iter()
            .copied()
            .filter(|&p| p > 0.0)
            .collect();
        assert_eq!(cells, vec![0.125; 8]);
        assert!((mutual_information(&ot.joint) - 1.0).abs() < 1e-12);
        for m in 1..=3 {
            let ot = ot_correlation(m).unwrap();
            assert!((entropy(&ot.joint.row_marginal()) - 2.0 * m as f64).abs() < 1e-10);
            assert!((conditional_entropy(&ot.joint.transpose()) - 1.0).abs() < 1e-10);
            assert!((mutual_information(&ot.joint) - m as f64).abs() < 1e-10);
        }
        assert!(ot_correlation(0).is_err() && ot_correlation(4).is_err());
    }

    #[test]
    fn lemma4_is_tight_for_constant_and_copy() {
        let ot = ot_correlation(1).unwrap();
        for c in [Coupling::constant(4, 1), Coupling::copy(4, 4)] {
            assert!(lemma4_residual(&ot, &c).unwrap().abs() < 1e-12);
            assert!(lemma4_appendix_check(&ot, &c).unwrap().abs() < 1e-12);
        }
        assert!(lemma4_residual(&ot, &Coupling::constant(3, 2)).is_err());
    }

    #[test]
    fn brute_force_trivial_pairs() {
        let b = ProbVector::binary(0.3).unwrap();
        let indep = JointDist::independent(&b, &ProbVector::uniform(2));
        assert!(brute_force_alpha(&indep, 2, 16).unwrap().abs() < 1e-12);
        let same = JointDist::diagonal(&ProbVector::uniform(2));
        assert!(brute_force_alpha(&same, 2, 16).unwrap().abs() < 1e-12);
    }

    #[test]
    fn brute_force_refines_monotonically() {
        let j = JointDist::from_rows(vec![vec![0.4, 0.1], vec![0.15, 0.35]]).unwrap();
        let coarse = brute_force_alpha(&j, 2, 64).unwrap();
        let fine = brute_force_alpha(&j, 2, 256).unwrap();
        assert!(fine <= coarse && coarse - fine < 5e-3, "{coarse} {fine}");
        let mut prev = f64::INFINITY;
        for res in [8, 16, 32, 64] {
            let v = brute_force_alpha(&j, 2, res).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn brute_force_refuses_oversized_requests() {
        let ot = ot_correlation(1).unwrap();
        assert!(matches!(
            brute_force_alpha(&ot.joint, 6, 64),
            Err(Error::CostBound { .. })
        ));
    }

    #[test]
    fn lemma1_with_useless_channel_reduces_to_base() {
        let base = JointDist::from_rows(vec![vec![0.4, 0.1], vec![0.15, 0.35]]).unwrap();
        let case = SubadditivityCase {
            base_joint: base.clone(),
            xmap: vec![0, 1],
            ch: Channel::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
        };
        let opts = OptimizerOptions::default();
        let out = lemma1_case_check(&case, 2, &opts, 1e-9).unwrap();
        let base_alpha = brute_force_alpha(&base, 2, opts.grid_resolution).unwrap();
        assert!((out.lhs - base_alpha).abs() < 1e-12 && out.pass, "{out:?}");
    }

    #[test]
    fn lemma1_with_independent_base() {
        let b = ProbVector::binary(0.4).unwrap();
        let case = SubadditivityCase {
            base_joint: JointDist::independent(&b, &ProbVector::uniform(2)),
            xmap: vec![0, 1],
            ch: Channel::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap(),
        };
        let out = lemma1_case_check(&case, 2, &OptimizerOptions::default(), 1e-2).unwrap();
        assert!(out.pass, "{out:?}");
    }

    #[test]
    fn lemma1_rejects_large_alphabets() {
        let case = SubadditivityCase {
            base_joint: JointDist::diagonal(&ProbVector::uniform(4)),
            xmap: vec![0, 1, 0, 1],
            ch: Channel::identity(2),
        };
        assert!(lemma1_case_check(&case, 2, &OptimizerOptions::default(), 1e-2).is_err());
    }
}
