use crate::{Cf64, Error, Result};

/// Least-squares channel values at the pilot subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotEstimate {
    pub positions: Vec<usize>,
    pub values: Vec<Cf64>,
}

impl PilotEstimate {
    pub fn new(positions: Vec<usize>, values: Vec<Cf64>) -> Result<Self> {
        if positions.len() != values.len() {
            return Err(Error::InputShape(format!(
                "{} pilot positions but {} values",
                positions.len(),
                values.len()
            )));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InputShape("pilot positions must be strictly increasing".into()));
        }
        Ok(Self { positions, values })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Keeps the pilots whose index within the comb satisfies `keep`.
    pub fn select(&self, keep: impl Fn(usize) -> bool) -> Self {
        let (positions, values) = self
            .positions
            .iter()
            .zip(&self.values)
            .enumerate()
            .filter(|(m, _)| keep(*m))
            .map(|(_, (&p, &v))| (p, v))
            .unzip();
        Self { positions, values }
    }
}

/// `H^P = Y^P / X^P`, element-wise.
pub fn ls_pilot_estimate(y_pilots: &[Cf64], x_pilots: &[Cf64]) -> Result<Vec<Cf64>> {
    if y_pilots.len() != x_pilots.len() {
        return Err(Error::InputShape(format!(
            "{} received pilots but {} known pilots",
            y_pilots.len(),
            x_pilots.len()
        )));
    }
    y_pilots
        .iter()
        .zip(x_pilots)
        .enumerate()
        .map(|(index, (y, x))| {
            if x.norm_sqr() == 0.0 {
                Err(Error::SingularPilot { index })
            } else {
                Ok(y / x)
            }
        })
        .collect()
}

/// Piecewise-linear interpolation across `0..n`, held constant outside the
/// outermost pilots.
pub fn linear_interp_estimate(pilots: &PilotEstimate, n: usize) -> Result<Vec<Cf64>> {
    if pilots.len() < 2 {
        return Err(Error::InputShape(format!(
            "linear interpolation needs 2 pilots, got {}",
            pilots.len()
        )));
    }
    let pos = &pilots.positions;
    let val = &pilots.values;
    let last = pos.len() - 1;
    let mut seg = 0;
    Ok((0..n)
        .map(|k| {
            if k <= pos[0] {
                return val[0];
            }
            if k >= pos[last] {
                return val[last];
            }
            while pos[seg + 1] < k {
                seg += 1;
            }
            let t = (k - pos[seg]) as f64 / (pos[seg + 1] - pos[seg]) as f64;
            val[seg] * (1.0 - t) + val[seg + 1] * t
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cf64 {
        Cf64::new(re, im)
    }

    #[test]
    fn ls_division() {
        assert_eq!(ls_pilot_estimate(&[c(2.0, 2.0)], &[c(1.0, 1.0)]).unwrap(), vec![c(2.0, 0.0)]);
        let y = [c(0.3, -1.0), c(5.0, 2.0)];
        assert_eq!(ls_pilot_estimate(&y, &[c(1.0, 0.0); 2]).unwrap(), y.to_vec());
        let h0 = c(0.7, -0.2);
        let x = [c(0.5, 0.5), c(-0.5, 0.5), c(0.5, -0.5)];
        let y: Vec<Cf64> = x.iter().map(|x| x * h0).collect();
        for h in ls_pilot_estimate(&y, &x).unwrap() {
            assert!((h - h0).norm() < 1e-15);
        }
    }

    #[test]
    fn ls_errors() {
        assert!(matches!(
            ls_pilot_estimate(&[c(1.0, 0.0); 2], &[c(1.0, 0.0), c(0.0, 0.0)]),
            Err(Error::SingularPilot { index: 1 })
        ));
        assert!(matches!(
            ls_pilot_estimate(&[c(1.0, 0.0); 2], &[c(1.0, 0.0)]),
            Err(Error::InputShape(_))
        ));
    }

    #[test]
    fn linear_interpolation() {
        let p = PilotEstimate::new(vec![0, 6], vec![c(1.0, 0.0), c(3.0, 0.0)]).unwrap();
        let h = linear_interp_estimate(&p, 10).unwrap();
        assert_eq!(h[3], c(2.0, 0.0));
        assert_eq!(h[0], c(1.0, 0.0));
        assert_eq!(h[6], c(3.0, 0.0));
        assert_eq!(h[9], c(3.0, 0.0));

        let p = PilotEstimate::new(vec![2, 5, 9], vec![c(1.0, -1.0), c(0.0, 2.0), c(4.0, 4.0)]).unwrap();
        let h = linear_interp_estimate(&p, 12).unwrap();
        for (m, &k) in p.positions.iter().enumerate() {
            assert_eq!(h[k], p.values[m]);
        }
        assert_eq!(h[0], p.values[0]);
        assert_eq!(h[11], p.values[2]);
        assert!((h[7] - c(2.0, 3.0)).norm() < 1e-15);

        let flat = PilotEstimate::new(vec![1, 4, 7], vec![c(0.5, 0.5); 3]).unwrap();
        assert!(linear_interp_estimate(&flat, 9).unwrap().iter().all(|&v| v == c(0.5, 0.5)));
    }

    #[test]
    fn pilot_estimate_shape_checks() {
        assert!(PilotEstimate::new(vec![0, 0], vec![c(0.0, 0.0); 2]).is_err());
        assert!(PilotEstimate::new(vec![0, 1], vec![c(0.0, 0.0)]).is_err());
        let one = PilotEstimate::new(vec![3], vec![c(1.0, 0.0)]).unwrap();
        assert!(linear_interp_estimate(&one, 8).is_err());
    }
}
