//! Channel estimators: least-squares at the pilots, then either linear or
//! LS-SVM (RBF kernel, ε-Huber cost) interpolation across the band.

mod huber;
mod interp;
mod kernel;
mod ls;
mod solver;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use huber::{epsilon_huber, huber_real, huber_real_derivative, zone, SvmHyper, Zone};
pub use interp::{normalized_mse, svm_interpolate, svm_interpolate_at, ChannelEstimate};
pub use kernel::{gram, rbf_gram, MercerKernel, Rbf};
pub use ls::{linear_interp_estimate, ls_pilot_estimate, PilotEstimate};
pub use solver::{
    dual_objective, dual_objective_psi, primal_objective, solve_lssvm, solve_with_gram, DualSolution,
    IterationRecord, Multipliers, SUPPORT_THRESHOLD,
};

use crate::{Cf64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    LsLinear,
    LsSvm,
    /// Equalises with the true channel; a lower bound for the others.
    Oracle,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [Self::LsLinear, Self::LsSvm, Self::Oracle];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::LsLinear => "ls-linear",
            Self::LsSvm => "ls-svm",
            Self::Oracle => "oracle",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::config(
                    "run.estimators",
                    format!("unknown estimator `{s}` (expected ls-linear, ls-svm or oracle)"),
                )
            })
    }
}

/// Estimates one symbol's channel from its pilots.
///
/// `truth` is required for [`EstimatorKind::Oracle`] and ignored otherwise.
pub fn estimate_channel(
    kind: EstimatorKind,
    pilots: &PilotEstimate,
    n_subcarriers: usize,
    hyper: &SvmHyper,
    truth: Option<&[Cf64]>,
) -> Result<ChannelEstimate> {
    let h_hat = match kind {
        EstimatorKind::LsLinear => linear_interp_estimate(pilots, n_subcarriers)?,
        EstimatorKind::LsSvm => {
            let sol = solve_lssvm(pilots, hyper)?;
            svm_interpolate(&sol, &pilots.positions, hyper.rbf_sigma, n_subcarriers)?
        }
        EstimatorKind::Oracle => truth
            .ok_or_else(|| Error::InputShape("oracle estimator needs the true channel".into()))?
            .to_vec(),
    };
    Ok(ChannelEstimate::new(h_hat, kind))
}
