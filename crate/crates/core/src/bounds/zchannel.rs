//! Z-channel bounds and the sweep over the crossover parameter.

use super::outer::{golden_max, golden_min};
use super::{ac13_bound_with_hints, bin, new_upper_bound, BoundDiagnostics, BoundResult};
use crate::channel::{standard_channel, ChannelKind};
use crate::error::{Error, Result};
use crate::info::{
    compose_joint, conditional_entropy, conditional_mutual_information, extend_with_coupling,
    mutual_information, Cmi, JointDist,
};
use crate::tension::{Coupling, OptimizerOptions};
use crate::textfmt::format_sig;
use rayon::prelude::*;

/// Minimum number of scan points for the restricted auxiliary parameter.
const MIN_SCAN: usize = 1024;
/// Bracket width of the local refinement around the best scan point.
const SCAN_REFINE_WIDTH: f64 = 1e-12;
/// Bracket width of the outer search over `p(x = 1)`.
const OUTER_WIDTH: f64 = 1e-6;
/// Significant digits written to sweep CSV files.
const CSV_DIGITS: usize = 9;

/// Header line of the sweep CSV.
pub const SWEEP_CSV_HEADER: &str = "t,new_upper,ac13_upper,erasure_lower";

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "t",
            value: t,
        })
    }
}

/// The binary auxiliary with `p(q=0|x=0) = a` and `p(q=0|x=1) = 0`.
fn restricted_coupling(a: f64) -> Coupling {
    let a = a.clamp(0.0, 1.0);
    Coupling::from_rows(vec![vec![a, 1.0 - a], vec![0.0, 1.0]]).expect("valid rows")
}

fn restricted_objective(j: &JointDist, a: f64) -> f64 {
    let t = extend_with_coupling(j, &restricted_coupling(a)).expect("binary input");
    conditional_mutual_information(&t, Cmi::UqGivenV)
        + conditional_mutual_information(&t, Cmi::UvGivenQ)
}

/// Minimum of the objective over the restricted family at a fixed joint,
/// with the minimizing parameter.
///
/// The endpoints `a = 0` (constant auxiliary) and `a = 1` (auxiliary equal
/// to the input) are scored through `I(X;Y)` and `H(X|Y)` directly, so the
/// result never exceeds `min(I(X;Y), H(X|Y))` computed the same way.
fn restricted_inner(j: &JointDist, scan: usize) -> (f64, f64) {
    let mi = mutual_information(j);
    let ce = conditional_entropy(j);
    let mut best = if ce < mi { (ce, 1.0) } else { (mi, 0.0) };
    let mut best_k = if best.1 == 0.0 { 0 } else { scan };
    for k in 1..scan {
        let a = k as f64 / scan as f64;
        let v = restricted_objective(j, a);
        if v < best.0 {
            best = (v, a);
            best_k = k;
        }
    }
    let h = 1.0 / scan as f64;
    let center = best_k as f64 * h;
    let (a, v, _) = golden_min(
        |a| restricted_objective(j, a),
        (center - h).max(0.0),
        (center + h).min(1.0),
        SCAN_REFINE_WIDTH,
    );
    if v < best.0 {
        best = (v, a);
    }
    (best.0.max(0.0), best.1)
}

/// The new bound for the Z-channel with the auxiliary restricted to
/// `|Q| = 2`, `p(q=0|x=0) = a`, `p(q=0|x=1) = 0`.
///
/// The inner minimum over `a` is a dense scan plus local refinement; the
/// outer maximum over `p(x)` is a golden-section search (the restricted
/// objective is a minimum of concave functions of `p(x)`).
pub fn zchannel_restricted_bound(t: f64, opts: &OptimizerOptions) -> Result<BoundResult> {
    check_t(t)?;
    opts.validate()?;
    let ch = standard_channel(ChannelKind::ZChannel, t)?;
    let scan = opts.grid_resolution.max(MIN_SCAN);
    let mut evaluations = 0;
    let mut best = (bin(0.0), 0.0, 0.0);
    let mut consider = |p: f64| -> f64 {
        evaluations += 1;
        let px = bin(p);
        let j = compose_joint(&px, &ch).expect("binary input");
        let (v, a) = restricted_inner(&j, scan);
        if v > best.1 {
            best = (px, v, a);
        }
        v
    };
    consider(0.5);
    golden_max(&mut consider, 0.0, 1.0, OUTER_WIDTH);
    let (px, value, a) = best;
    Ok(BoundResult {
        value,
        arg_px: px,
        arg_coupling: Some(restricted_coupling(a)),
        diagnostics: BoundDiagnostics {
            restarts: 0,
            iterations: 0,
            converged: true,
            evaluations,
        },
    })
}

/// Achievable OT rate of the Z-channel, `min(1 - t, t) / 2`.
pub fn erasure_lower_bound_z(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(f64::min(1.0 - t, t) / 2.0)
}

/// Which auxiliary family the sweep uses for the new bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    /// The binary one-parameter family of [`zchannel_restricted_bound`].
    #[default]
    Restricted,
    /// The full auxiliary alphabet of [`new_upper_bound`].
    Full,
}

/// Bounds on the OT capacity of the Z-channel at one crossover value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub new_upper: f64,
    pub ac13_upper: f64,
    pub erasure_lower: f64,
}

impl SweepRow {
    /// Checks that the lower bound sits below the older upper bound and the
    /// new upper bound does not exceed it.
    pub fn check(&self) -> std::result::Result<(), String> {
        if !(0.0..=1.0).contains(&self.t) {
            return Err(format!("t = {} outside [0, 1]", self.t));
        }
        if self.erasure_lower > self.ac13_upper + 1e-6 {
            return Err(format!(
                "t = {}: lower bound {} above ac13 bound {}",
                self.t, self.erasure_lower, self.ac13_upper
            ));
        }
        if self.new_upper > self.ac13_upper + 1e-9 {
            return Err(format!(
                "t = {}: new bound {} above ac13 bound {}",
                self.t, self.new_upper, self.ac13_upper
            ));
        }
        Ok(())
    }
}

fn sweep_point(t: f64, opts: &OptimizerOptions, mode: SweepMode) -> Result<SweepRow> {
    let ch = standard_channel(ChannelKind::ZChannel, t)?;
    let new = match mode {
        SweepMode::Restricted => zchannel_restricted_bound(t, opts)?,
        SweepMode::Full => new_upper_bound(&ch, opts)?,
    };
    let ac = ac13_bound_with_hints(&ch, opts, std::slice::from_ref(&new.arg_px))?;
    Ok(SweepRow {
        t,
        new_upper: new.value,
        ac13_upper: ac.value,
        erasure_lower: erasure_lower_bound_z(t)?,
    })
}

/// Computes the new, AC13 and erasure bounds of the Z-channel at each `t`,
/// in input order. Point `i` uses the seed derived from `(opts.seed, i)`.
pub fn zchannel_sweep(
    t_values: &[f64],
    opts: &OptimizerOptions,
    mode: SweepMode,
) -> Result<Vec<SweepRow>> {
    opts.validate()?;
    for &t in t_values {
        check_t(t)?;
    }
    t_values
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            sweep_point(t, &opts.for_task(i as u64), mode).map_err(|e| Error::AtPoint {
                t,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Renders sweep rows as CSV with a header line and LF line endings.
pub fn write_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields =
            [r.t, r.new_upper, r.ac13_upper, r.erasure_lower].map(|x| format_sig(x, CSV_DIGITS));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Parses a sweep CSV and checks every row's invariants.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SWEEP_CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header \"{SWEEP_CSV_HEADER}\""),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        let &[t, new_upper, ac13_upper, erasure_lower] = fields.as_slice() else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        };
        let row = SweepRow {
            t,
            new_upper,
            ac13_upper,
            erasure_lower,
        };
        row.check().map_err(|message| Error::Parse {
            line: line_no,
            message,
        })?;
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::ac13_bound;

    #[test]
    fn erasure_bound_values() {
        assert_eq!(erasure_lower_bound_z(0.5).unwrap(), 0.25);
        assert_eq!(erasure_lower_bound_z(0.0).unwrap(), 0.0);
        assert!((erasure_lower_bound_z(0.8).unwrap() - 0.1).abs() < 1e-15);
        assert!(erasure_lower_bound_z(1.5).is_err());
        assert!(erasure_lower_bound_z(f64::NAN).is_err());
    }

    #[test]
    fn restricted_bound_endpoints_are_zero() {
        let opts = OptimizerOptions::default();
        for t in [0.0, 1.0] {
            assert!(zchannel_restricted_bound(t, &opts).unwrap().value.abs() < 1e-6);
        }
        assert!(zchannel_restricted_bound(-0.1, &opts).is_err());
    }

    #[test]
    fn restricted_bound_improves_at_quarter() {
        // At t = 0.25 the restricted family gives about 0.39383 against
        // about 0.46496 for the older bound.
        let opts = OptimizerOptions::default();
        let r = zchannel_restricted_bound(0.25, &opts).unwrap();
        let ac = ac13_bound(
            &standard_channel(ChannelKind::ZChannel, 0.25).unwrap(),
            &opts,
        )
        .unwrap();
        assert!((r.value - 0.393832048).abs() < 1e-7, "{}", r.value);
        assert!((ac.value - 0.464958417).abs() < 1e-7, "{}", ac.value);
    }

    #[test]
    fn sweep_rows_follow_input_order() {
        let opts = OptimizerOptions::default();
        let ts = [1.0, 0.0, 0.3];
        let rows = zchannel_sweep(&ts, &opts, SweepMode::Restricted).unwrap();
        assert_eq!(rows.iter().map(|r| r.t).collect::<Vec<_>>(), ts);
        for r in &rows {
            r.check().unwrap();
        }
        assert_eq!(rows[0].erasure_lower, 0.0);
        assert!(rows[0].new_upper.abs() < 1e-6 && rows[0].ac13_upper.abs() < 1e-6);
        assert!(matches!(
            zchannel_sweep(&[0.2, 2.0], &opts, SweepMode::Restricted),
            Err(Error::OutOfRange { value, .. }) if value == 2.0
        ));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            SweepRow {
                t: 0.0,
                new_upper: 0.0,
                ac13_upper: 0.0,
                erasure_lower: 0.0,
            },
            SweepRow {
                t: 0.25,
                new_upper: 0.3938310123456,
                ac13_upper: 0.46495432111,
                erasure_lower: 0.125,
            },
        ];
        let text = write_sweep_csv(&rows);
        assert!(text.starts_with("t,new_upper,ac13_upper,erasure_lower\n"));
        assert!(!text.contains('\r'));
        let back = parse_sweep_csv(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].new_upper, 0.393831012);
        assert_eq!(write_sweep_csv(&back), text);
    }

    #[test]
    fn csv_rejects_violations() {
        let bad = "t,new_upper,ac13_upper,erasure_lower\n0.5,0.4,0.3,0.25\n";
        assert!(matches!(
            parse_sweep_csv(bad),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_sweep_csv("x,y\n").is_err());
        assert!(parse_sweep_csv("t,new_upper,ac13_upper,erasure_lower\n0.5,0.1\n").is_err());
    }
}
