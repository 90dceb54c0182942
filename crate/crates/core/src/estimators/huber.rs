//! The ε-Huber robust cost.
//!
//! Per real coordinate, with `e_c = ε + γC`:
//!
//! ```text
//! L(e) = 0                          |e| <= ε
//!        (|e| - ε)^2 / (2γ)         ε <= |e| <= e_c
//!        C (|e| - ε) - γ C^2 / 2    |e| >= e_c
//! ```
//!
//! A complex residual costs `L(Re e) + L(Im e)`. Equivalently
//! `L(e) = max_{|a| <= C} (a e - ε|a| - γ a^2 / 2)`, which is where the box
//! constraints of the dual come from.

use serde::{Deserialize, Serialize};

use crate::{Cf64, Error, Result};

/// Cost-function, kernel and solver settings of the LS-SVM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmHyper {
    pub epsilon: f64,
    pub gamma: f64,
    pub c: f64,
    pub rbf_sigma: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvmHyper {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            gamma: 0.01,
            c: 1.0,
            rbf_sigma: 12.0,
            tol: 1e-9,
            max_iter: 200,
        }
    }
}

impl SvmHyper {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("gamma", self.gamma),
            ("c", self.c),
            ("rbf_sigma", self.rbf_sigma),
            ("tol", self.tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("svm.{name}"), format!("{v} must be positive")));
            }
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config("svm.epsilon", format!("{} must be >= 0", self.epsilon)));
        }
        if self.max_iter == 0 {
            return Err(Error::config("svm.max_iter", "must be at least 1"));
        }
        Ok(())
    }

    /// Start of the linear zone, `ε + γC`.
    pub fn e_c(&self) -> f64 {
        self.epsilon + self.gamma * self.c
    }
}

/// Which branch of the cost a real residual falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Insensitive,
    Quadratic,
    Linear,
}

pub fn zone(e: f64, hyper: &SvmHyper) -> Zone {
    let a = e.abs();
    if a <= hyper.epsilon {
        Zone::Insensitive
    } else if a <= hyper.e_c() {
        Zone::Quadratic
    } else {
        Zone::Linear
    }
}

/// Cost of one real residual.
pub fn huber_real(e: f64, hyper: &SvmHyper) -> f64 {
    let excess = e.abs() - hyper.epsilon;
    match zone(e, hyper) {
        Zone::Insensitive => 0.0,
        Zone::Quadratic => excess * excess / (2.0 * hyper.gamma),
        Zone::Linear => hyper.c * excess - 0.5 * hyper.gamma * hyper.c * hyper.c,
    }
}

/// Derivative of [`huber_real`]; equals the optimal dual coefficient for `e`.
pub fn huber_real_derivative(e: f64, hyper: &SvmHyper) -> f64 {
    let excess = e.abs() - hyper.epsilon;
    let mag = match zone(e, hyper) {
        Zone::Insensitive => 0.0,
        Zone::Quadratic => excess / hyper.gamma,
        Zone::Linear => hyper.c,
    };
    mag.copysign(e)
}

pub fn epsilon_huber(residual: Cf64, hyper: &SvmHyper) -> f64 {
    huber_real(residual.re, hyper) + huber_real(residual.im, hyper)
}
