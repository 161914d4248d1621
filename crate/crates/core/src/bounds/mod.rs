//! Channel-level bounds on the OT capacity.
//!
//! - [`new_upper_bound`]: `max over p(x) of alpha(X;Y)`
//! - [`ac13_bound`]: `max over p(x) of min(I(X;Y), H(X|Y))`
//! - [`zchannel_restricted_bound`]: the new bound with the auxiliary restricted
//!   to a one-parameter binary family, as used for the Z-channel sweep
//! - [`erasure_lower_bound_z`]: an achievable rate for the Z-channel
//! - [`source_model_bound`]: `alpha(X;Y)` for a fixed source

pub(crate) mod outer;
mod zchannel;

pub use zchannel::{
    erasure_lower_bound_z, parse_sweep_csv, write_sweep_csv, zchannel_restricted_bound,
    zchannel_sweep, SweepMode, SweepRow, SWEEP_CSV_HEADER,
};

use crate::channel::Channel;
use crate::error::Result;
use crate::info::{compose_joint, conditional_entropy, mutual_information, JointDist, ProbVector};
use crate::tension::{
    alpha_inner, alpha_joint, default_qcard, Coupling, OptimizerOptions, SearchStats,
};
use outer::{golden_max, nelder_mead_max, simplex_lattice};
use rayon::prelude::*;

/// Bracket width of the golden-section search for binary inputs.
const GOLDEN_WIDTH: f64 = 1e-6;
/// Bracket width used to refine a grid optimum of the AC13 objective.
const REFINE_WIDTH: f64 = 1e-12;
/// Evaluation budget of the Nelder-Mead polish, per input symbol.
const POLISH_EVALS_PER_DIM: usize = 200;

/// Search effort spent on a bound.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundDiagnostics {
    /// Descents started across all inner minimizations.
    pub restarts: usize,
    /// Accepted descent iterations across all inner minimizations.
    pub iterations: usize,
    /// Whether every descent met its tolerance.
    pub converged: bool,
    /// Number of input distributions evaluated by the outer search.
    pub evaluations: usize,
}

impl BoundDiagnostics {
    fn absorb(&mut self, s: &SearchStats) {
        self.restarts += s.restarts;
        self.iterations += s.iterations;
        self.converged &= s.converged;
        self.evaluations += 1;
    }
}

/// A bound in bits per channel use with the input distribution achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    pub arg_px: ProbVector,
    /// Auxiliary achieving the inner minimum at `arg_px`; absent for bounds
    /// without an auxiliary.
    pub arg_coupling: Option<Coupling>,
    pub diagnostics: BoundDiagnostics,
}

/// `max over p(x) of alpha(X;Y)` with the full auxiliary alphabet.
pub fn new_upper_bound(ch: &Channel, opts: &OptimizerOptions) -> Result<BoundResult> {
    let qcard = default_qcard(ch.input_card(), ch.output_card());
    new_upper_bound_with_qcard(ch, qcard, opts)
}

/// [`new_upper_bound`] with a caller-chosen auxiliary alphabet size (at most
/// the default).
pub fn new_upper_bound_with_qcard(
    ch: &Channel,
    qcard: usize,
    opts: &OptimizerOptions,
) -> Result<BoundResult> {
    opts.validate()?;
    let nx = ch.input_card();
    let eval = |px: &ProbVector| alpha_inner(px, ch, qcard, opts);
    let mut diag = BoundDiagnostics {
        converged: true,
        ..Default::default()
    };

    if nx == 1 {
        let px = ProbVector::point_mass(1, 0);
        let r = eval(&px)?;
        diag.absorb(&r.stats);
        return Ok(BoundResult {
            value: r.value,
            arg_px: px,
            arg_coupling: Some(r.coupling),
            diagnostics: diag,
        });
    }

    // Alpha is concave in p(x), so unimodal searches are sound.
    let mut best: Option<(ProbVector, crate::tension::AlphaResult)> = None;
    let mut polish_start = None;
    if nx > 2 {
        let grid = simplex_lattice(nx, opts.grid_resolution);
        let values: Vec<_> = grid.par_iter().map(&eval).collect::<Result<_>>()?;
        let mut start = 0;
        for (i, r) in values.iter().enumerate() {
            diag.absorb(&r.stats);
            if r.value > values[start].value {
                start = i;
            }
        }
        let r0 = values.into_iter().nth(start).expect("non-empty lattice");
        polish_start = Some(grid[start].clone());
        best = Some((grid[start].clone(), r0));
    }
    let mut failure = None;
    let mut consider = |px: ProbVector, diag: &mut BoundDiagnostics| -> f64 {
        match eval(&px) {
            Ok(r) => {
                diag.absorb(&r.stats);
                let v = r.value;
                if best.as_ref().is_none_or(|(_, b)| v > b.value) {
                    best = Some((px, r));
                }
                v
            }
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    };
    match polish_start {
        None => {
            consider(bin(0.5), &mut diag);
            golden_max(|p| consider(bin(p), &mut diag), 0.0, 1.0, GOLDEN_WIDTH);
        }
        Some(start) => {
            nelder_mead_max(
                |px| consider(px.clone(), &mut diag),
                &start,
                1.0 / opts.grid_resolution as f64,
                POLISH_EVALS_PER_DIM * nx,
                opts.tol,
            );
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let (px, r) = best.expect("at least one evaluation");
    Ok(BoundResult {
        value: r.value.max(0.0),
        arg_px: px,
        arg_coupling: Some(r.coupling),
        diagnostics: diag,
    })
}

/// `[1 - p, p]` for a search coordinate known to lie in `[0, 1]`.
fn bin(p: f64) -> ProbVector {
    ProbVector::binary(p.clamp(0.0, 1.0)).expect("clamped into [0, 1]")
}

/// `min(I(X;Y), H(X|Y))` at one input distribution.
fn ac13_objective(px: &ProbVector, ch: &Channel) -> Result<f64> {
    let j = compose_joint(px, ch)?;
    Ok(mutual_information(&j).min(conditional_entropy(&j)))
}

/// `max over p(x) of min(I(X;Y), H(X|Y))`.
pub fn ac13_bound(ch: &Channel, opts: &OptimizerOptions) -> Result<BoundResult> {
    ac13_bound_with_hints(ch, opts, &[])
}

/// [`ac13_bound`] that additionally evaluates the objective at `hints`.
///
/// Evaluating the maximizer of another bound here guarantees that the AC13
/// value is never below the other bound's objective at that point.
pub(crate) fn ac13_bound_with_hints(
    ch: &Channel,
    opts: &OptimizerOptions,
    hints: &[ProbVector],
) -> Result<BoundResult> {
    opts.validate()?;
    let nx = ch.input_card();
    let grid = simplex_lattice(nx, opts.grid_resolution);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|px| ac13_objective(px, ch))
        .collect::<Result<_>>()?;
    let mut evaluations = grid.len();
    let mut start = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[start] {
            start = i;
        }
    }
    let mut best = (grid[start].clone(), values[start]);
    let mut consider = |px: ProbVector, evaluations: &mut usize| -> f64 {
        *evaluations += 1;
        let v = ac13_objective(&px, ch).unwrap_or(f64::NEG_INFINITY);
        if v > best.1 {
            best = (px, v);
        }
        v
    };

    if nx == 2 {
        // The min of two concave functions is concave, but refine only within
        // the neighbouring grid cells so a non-unimodal profile cannot pull
        // the search away from the grid optimum.
        let p = grid[start][1];
        let h = 1.0 / opts.grid_resolution as f64;
        golden_max(
            |q| consider(bin(q), &mut evaluations),
            (p - h).max(0.0),
            (p + h).min(1.0),
            REFINE_WIDTH,
        );
    } else if nx > 2 {
        let start_px = grid[start].clone();
        nelder_mead_max(
            |px| consider(px.clone(), &mut evaluations),
            &start_px,
            1.0 / opts.grid_resolution as f64,
            POLISH_EVALS_PER_DIM * nx,
            1e-15,
        );
    }
    for px in hints {
        consider(px.clone(), &mut evaluations);
    }
    Ok(BoundResult {
        value: best.1.max(0.0),
        arg_px: best.0,
        arg_coupling: None,
        diagnostics: BoundDiagnostics {
            restarts: 0,
            iterations: 0,
            converged: true,
            evaluations,
        },
    })
}

/// `alpha(X;Y)` of a fixed source `p(x, y)`.
pub fn source_model_bound(j: &JointDist, opts: &OptimizerOptions) -> Result<BoundResult> {
    opts.validate()?;
    let r = alpha_joint(j, default_qcard(j.rows(), j.cols()), opts)?;
    let mut diagnostics = BoundDiagnostics {
        converged: true,
        ..Default::default()
    };
    diagnostics.absorb(&r.stats);
    Ok(BoundResult {
        value: r.value,
        arg_px: j.row_marginal(),
        arg_coupling: Some(r.coupling),
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{standard_channel, ChannelKind};

    fn quick() -> OptimizerOptions {
        OptimizerOptions {
            restarts: 8,
            ..Default::default()
        }
    }

    #[test]
    fn ac13_of_bec_is_min_of_erasure_and_delivery() {
        for t in [0.1, 0.3, 0.5, 0.8] {
            let r = ac13_bound(&standard_channel(ChannelKind::Bec, t).unwrap(), &quick()).unwrap();
            let expect = f64::min(t, 1.0 - t);
            assert!((r.value - expect).abs() < 1e-6, "t={t}: {}", r.value);
        }
    }

    #[test]
    fn ac13_of_identity_and_useless_channels_is_zero() {
        let r = ac13_bound(&Channel::identity(3), &quick()).unwrap();
        assert!(r.value.abs() < 1e-12);
        let same = Channel::from_rows(vec![vec![0.3, 0.7]; 3]).unwrap();
        assert!(ac13_bound(&same, &quick()).unwrap().value.abs() < 1e-9);
    }

    #[test]
    fn new_bound_is_zero_at_z_endpoints() {
        for t in [0.0, 1.0] {
            let ch = standard_channel(ChannelKind::ZChannel, t).unwrap();
            let r = new_upper_bound(&ch, &quick()).unwrap();
            assert!(r.value.abs() < 1e-6, "t={t}: {}", r.value);
        }
    }

    #[test]
    fn new_bound_on_bec_matches_sandwich() {
        let ch = standard_channel(ChannelKind::Bec, 0.3).unwrap();
        let r = new_upper_bound(&ch, &quick()).unwrap();
        assert!((r.value - 0.3).abs() < 1e-3, "{}", r.value);
        let ac = ac13_bound(&ch, &quick()).unwrap();
        assert!(r.value <= ac.value + 1e-9);
    }

    #[test]
    fn ternary_input_uses_lattice_path() {
        let ch = Channel::from_rows(vec![
            vec![0.9, 0.1, 0.0],
            vec![0.0, 0.8, 0.2],
            vec![0.1, 0.0, 0.9],
        ])
        .unwrap();
        let opts = OptimizerOptions {
            restarts: 4,
            grid_resolution: 6,
            ..Default::default()
        };
        let r = new_upper_bound(&ch, &opts).unwrap();
        let ac = ac13_bound(&ch, &opts).unwrap();
        assert!(
            r.value > 0.0 && r.value <= ac.value + 1e-9,
            "{} vs {}",
            r.value,
            ac.value
        );
        assert_eq!(r.arg_px.len(), 3);
    }

    #[test]
    fn source_bound_of_trivial_sources_is_zero() {
        let indep = JointDist::independent(
            &ProbVector::binary(0.3).unwrap(),
            &ProbVector::binary(0.6).unwrap(),
        );
        assert!(source_model_bound(&indep, &quick()).unwrap().value.abs() < 1e-9);
        let same = JointDist::diagonal(&ProbVector::uniform(2));
        assert!(source_model_bound(&same, &quick()).unwrap().value.abs() < 1e-9);
    }

    #[test]
    fn source_bound_of_erasure_source() {
        let ch = standard_channel(ChannelKind::Bec, 0.3).unwrap();
        let j = compose_joint(&ProbVector::uniform(2), &ch).unwrap();
        let r = source_model_bound(&j, &quick()).unwrap();
        assert!((r.value - 0.3).abs() < 1e-3, "{}", r.value);
    }
}
