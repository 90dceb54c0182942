use nalgebra::DMatrix;

use crate::{Error, Result};

/// A positive semidefinite similarity between subcarrier indices.
pub trait MercerKernel {
    fn eval(&self, a: f64, b: f64) -> f64;
}

/// Gaussian radial basis function, width in subcarrier units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rbf {
    pub sigma: f64,
}

impl Rbf {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("RBF width {sigma} must be positive")));
        }
        Ok(Self { sigma })
    }
}

impl MercerKernel for Rbf {
    fn eval(&self, a: f64, b: f64) -> f64 {
        let d = a - b;
        (-d * d / (2.0 * self.sigma * self.sigma)).exp()
    }
}

pub fn gram<K: MercerKernel>(kernel: &K, positions: &[f64]) -> DMatrix<f64> {
    let n = positions.len();
    DMatrix::from_fn(n, n, |u, v| kernel.eval(positions[u], positions[v]))
}

/// `G(u, v) = exp(-(P_u - P_v)^2 / (2 sigma^2))`.
pub fn rbf_gram(positions: &[usize], rbf_sigma: f64) -> Result<DMatrix<f64>> {
    let k = Rbf::new(rbf_sigma)?;
    let pos: Vec<f64> = positions.iter().map(|&p| p as f64).collect();
    Ok(gram(&k, &pos))
}
