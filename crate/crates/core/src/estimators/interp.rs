use super::kernel::{MercerKernel, Rbf};
use super::solver::DualSolution;
use super::EstimatorKind;
use crate::{Cf64, Error, Result};

/// `Ĥ(k) = Σ_m ψ_m K(k, P_m) + b` at each of `targets`.
pub fn svm_interpolate_at(
    solution: &DualSolution,
    pilot_positions: &[usize],
    rbf_sigma: f64,
    targets: &[usize],
) -> Result<Vec<Cf64>> {
    if solution.psi.len() != pilot_positions.len() {
        return Err(Error::InputShape(format!(
            "{} multipliers for {} pilots",
            solution.psi.len(),
            pilot_positions.len()
        )));
    }
    let kernel = Rbf::new(rbf_sigma)?;
    Ok(targets
        .iter()
        .map(|&k| {
            solution
                .psi
                .iter()
                .zip(pilot_positions)
                .filter(|(p, _)| **p != Cf64::new(0.0, 0.0))
                .map(|(p, &pos)| p * kernel.eval(k as f64, pos as f64))
                .sum::<Cf64>()
                + solution.bias
        })
        .collect())
}

/// Evaluates the trained estimator on subcarriers `0..n_subcarriers`.
pub fn svm_interpolate(
    solution: &DualSolution,
    pilot_positions: &[usize],
    rbf_sigma: f64,
    n_subcarriers: usize,
) -> Result<Vec<Cf64>> {
    let all: Vec<usize> = (0..n_subcarriers).collect();
    svm_interpolate_at(solution, pilot_positions, rbf_sigma, &all)
}

/// Normalised squared error `Σ|Ĥ - H|² / Σ|H|²`.
pub fn normalized_mse(estimate: &[Cf64], truth: &[Cf64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::InputShape(format!(
            "estimate has {} subcarriers, truth has {}",
            estimate.len(),
            truth.len()
        )));
    }
    let power: f64 = truth.iter().map(|h| h.norm_sqr()).sum();
    if power == 0.0 {
        return Err(Error::DegenerateMeasurement("true channel has zero energy".into()));
    }
    let err: f64 = estimate.iter().zip(truth).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok(err / power)
}

/// A per-symbol channel estimate, optionally scored against the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub h_hat: Vec<Cf64>,
    pub method: EstimatorKind,
    pub mse: Option<f64>,
}

impl ChannelEstimate {
    pub fn new(h_hat: Vec<Cf64>, method: EstimatorKind) -> Self {
        Self { h_hat, method, mse: None }
    }

    pub fn with_truth(mut self, truth: &[Cf64]) -> Result<Self> {
        self.mse = Some(normalized_mse(&self.h_hat, truth)?);
        Ok(self)
    }

    /// Rows `k,re_hat,im_hat,re_true,im_true`.
    pub fn to_csv(&self, truth: &[Cf64]) -> Result<String> {
        if truth.len() != self.h_hat.len() {
            return Err(Error::InputShape("truth length differs from estimate".into()));
        }
        let mut out = String::from("k,re_hat,im_hat,re_true,im_true\n");
        for (k, (e, t)) in self.h_hat.iter().zip(truth).enumerate() {
            out.push_str(&format!("{k},{},{},{},{}\n", e.re, e.im, t.re, t.im));
        }
        Ok(out)
    }
}
