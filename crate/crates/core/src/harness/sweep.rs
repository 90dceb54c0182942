use std::fmt::Write as _;

use rayon::prelude::*;

use super::{frame_pilot_estimates, receive_frame, require_nonempty, run_scenario, RunResult, Scenario};
use crate::config::{Axis, ValidateSettings};
use crate::estimators::{solve_lssvm, svm_interpolate_at, PilotEstimate, SvmHyper};
use crate::{Error, Result};

pub const RESULTS_HEADER: &str =
    "axis,value,estimator,ber,mse,measured_snr_db,measured_sir_db,bit_errors,n_bits,seed";

/// One swept operating point; `axis` is `None` for a plain run.
#[derive(Debug)]
pub struct SweepPoint {
    pub axis: Option<Axis>,
    pub value: f64,
    pub outcome: Result<RunResult>,
}

impl SweepPoint {
    pub fn single(outcome: Result<RunResult>) -> Self {
        Self {
            axis: None,
            value: f64::NAN,
            outcome,
        }
    }
}

/// Runs `base` once per value of `axis`.
///
/// Every point reuses the base seed, so payloads, fading and noise shapes are
/// shared across the sweep and only the noise level changes. Points fail
/// independently.
pub fn sweep(base: &Scenario, axis: Axis, values: &[f64]) -> Result<Vec<SweepPoint>> {
    require_nonempty(values, "sweep values")?;
    Ok(values
        .iter()
        .map(|&value| {
            let mut s = base.clone();
            match axis {
                Axis::SnrDb => s.noise.snr_db = value,
                Axis::SirDb => s.noise.sir_db = value,
            }
            let outcome = run_scenario(&s).map_err(|e| e.context(format!("{axis} = {value}")));
            SweepPoint {
                axis: Some(axis),
                value,
                outcome,
            }
        })
        .collect())
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

/// Results table; failed points are skipped.
pub fn results_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for p in points {
        let Ok(r) = &p.outcome else { continue };
        let (axis, value) = match p.axis {
            Some(a) => (a.as_str(), num(p.value)),
            None => ("none", String::new()),
        };
        for e in &r.estimators {
            let _ = writeln!(
                out,
                "{axis},{value},{},{},{},{},{},{},{},{}",
                e.kind,
                num(e.ber()),
                num(e.mse()),
                num(r.measured_snr_db),
                num(r.measured_sir_db),
                e.bits.errors,
                e.bits.total,
                r.seed
            );
        }
    }
    out
}

/// Held-out score of one hyperparameter triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridScore {
    pub gamma: f64,
    pub c: f64,
    pub rbf_sigma: f64,
    /// `+inf` when training failed on some symbol.
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub scores: Vec<GridScore>,
    pub best: SvmHyper,
    pub best_mse: f64,
}

/// Grid search over `(γ, C, σ)` on frame 0 of `s`.
///
/// Each symbol's even-indexed pilots train the estimator; its predictions at
/// the odd-indexed pilots are scored against their least-squares values by
/// normalised squared error, pooled over the frame. Held-out pilots past the
/// last training pilot are skipped: with no bias term the fit decays there,
/// which says nothing about how well it interpolates.
pub fn validate_grid(s: &Scenario, grid: &ValidateSettings) -> Result<ValidationReport> {
    require_nonempty(&grid.gammas, "validate.gammas")?;
    require_nonempty(&grid.cs, "validate.cs")?;
    require_nonempty(&grid.sigma_factors, "validate.sigma_factors")?;
    let base = s.hyper()?;
    let frame = receive_frame(s, 0)?;
    let pilots = frame_pilot_estimates(s, &frame)?;
    let split: Vec<(PilotEstimate, PilotEstimate)> = pilots
        .iter()
        .map(|p| {
            let train = p.select(|m| m % 2 == 0);
            let last = train.positions.last().copied().unwrap_or(0);
            let test = p.select(|m| m % 2 == 1 && p.positions[m] < last);
            (train, test)
        })
        .collect();
    if split.iter().any(|(train, test)| train.is_empty() || test.is_empty()) {
        return Err(Error::InputShape("validation needs at least two pilots per symbol".into()));
    }

    let mut triples = Vec::new();
    for &gamma in &grid.gammas {
        for &c in &grid.cs {
            for &f in &grid.sigma_factors {
                triples.push(SvmHyper {
                    gamma,
                    c,
                    rbf_sigma: f * s.ofdm.pilot_spacing as f64,
                    ..base
                });
            }
        }
    }
    let scores: Vec<GridScore> = triples
        .par_iter()
        .map(|h| GridScore {
            gamma: h.gamma,
            c: h.c,
            rbf_sigma: h.rbf_sigma,
            mse: held_out_mse(&split, h).unwrap_or(f64::INFINITY),
        })
        .collect();

    let (best_idx, best_mse) = scores
        .iter()
        .enumerate()
        .filter(|(_, g)| g.mse.is_finite())
        .min_by(|a, b| a.1.mse.total_cmp(&b.1.mse))
        .map(|(i, g)| (i, g.mse))
        .ok_or_else(|| Error::DegenerateMeasurement("no grid point could be trained".into()))?;
    Ok(ValidationReport {
        best: triples[best_idx],
        best_mse,
        scores,
    })
}

fn held_out_mse(split: &[(PilotEstimate, PilotEstimate)], h: &SvmHyper) -> Result<f64> {
    let mut err = 0.0;
    let mut energy = 0.0;
    for (train, test) in split {
        let sol = solve_lssvm(train, h)?;
        let pred = svm_interpolate_at(&sol, &train.positions, h.rbf_sigma, &test.positions)?;
        for (p, t) in pred.iter().zip(&test.values) {
            err += (p - t).norm_sqr();
            energy += t.norm_sqr();
        }
    }
    if !(energy > 0.0) {
        return Err(Error::DegenerateMeasurement("held-out pilots carry no energy".into()));
    }
    Ok(err / energy)
}

/// Rows `gamma,c,rbf_sigma,mse` in search order.
pub fn validate_grid_csv(report: &ValidationReport) -> String {
    let mut out = String::from("gamma,c,rbf_sigma,mse\n");
    for g in &report.scores {
        let _ = writeln!(out, "{},{},{},{}", num(g.gamma), num(g.c), num(g.rbf_sigma), num(g.mse));
    }
    out
}
