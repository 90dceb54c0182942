//! Unitary OFDM modulation with cyclic prefix.
//!
//! Both directions scale by `1/sqrt(N)`, so a modulate/demodulate pair is the
//! identity and Parseval holds exactly. With this convention a static channel
//! `h` no longer than the cyclic prefix acts per subcarrier as
//! `Y(k) = X(k) H(k)` with `H(k) = sum_l h_l exp(-j 2 pi k d_l / N)`.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::{OfdmParams, TimeSignal};
use crate::{Cf64, Error, Result};

/// Cached forward/inverse FFT plans for one `(N, cp_len)` configuration.
#[derive(Clone)]
pub struct OfdmModem {
    n_fft: usize,
    cp_len: usize,
    sample_rate: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for OfdmModem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OfdmModem")
            .field("n_fft", &self.n_fft)
            .field("cp_len", &self.cp_len)
            .finish()
    }
}

impl OfdmModem {
    pub fn new(params: &OfdmParams) -> Result<Self> {
        params.validate()?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_fft: params.n_fft,
            cp_len: params.cp_len,
            sample_rate: params.sample_rate(),
            forward: planner.plan_fft_forward(params.n_fft),
            inverse: planner.plan_fft_inverse(params.n_fft),
            scale: 1.0 / (params.n_fft as f64).sqrt(),
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn symbol_len(&self) -> usize {
        self.n_fft + self.cp_len
    }

    /// IDFT of one grid row followed by the cyclic prefix; appends to `out`.
    pub fn modulate_into(&self, row: &[Cf64], out: &mut Vec<Cf64>) -> Result<()> {
        if row.len() != self.n_fft {
            return Err(Error::InputShape(format!(
                "grid row has {} subcarriers, expected {}",
                row.len(),
                self.n_fft
            )));
        }
        let mut body: Vec<Cf64> = row.iter().map(|x| x * self.scale).collect();
        self.inverse.process(&mut body);
        out.extend_from_slice(&body[self.n_fft - self.cp_len..]);
        out.extend_from_slice(&body);
        Ok(())
    }

    pub fn modulate(&self, row: &[Cf64]) -> Result<TimeSignal> {
        let mut samples = Vec::with_capacity(self.symbol_len());
        self.modulate_into(row, &mut samples)?;
        Ok(TimeSignal::new(samples, self.sample_rate))
    }

    /// Drops the cyclic prefix and applies the unitary DFT.
    pub fn demodulate(&self, samples: &[Cf64]) -> Result<Vec<Cf64>> {
        if samples.len() != self.symbol_len() {
            return Err(Error::InputShape(format!(
                "OFDM symbol has {} samples, expected {}",
                samples.len(),
                self.symbol_len()
            )));
        }
        let mut body: Vec<Cf64> = samples[self.cp_len..]
            .iter()
            .map(|x| x * self.scale)
            .collect();
        self.forward.process(&mut body);
        Ok(body)
    }
}

pub fn ofdm_modulate(grid_row: &[Cf64], params: &OfdmParams) -> Result<TimeSignal> {
    OfdmModem::new(params)?.modulate(grid_row)
}

pub fn ofdm_demodulate(signal: &TimeSignal, params: &OfdmParams) -> Result<Vec<Cf64>> {
    OfdmModem::new(params)?.demodulate(&signal.samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::f64::consts::PI;

    fn params(n: usize, cp: usize) -> OfdmParams {
        OfdmParams {
            n_fft: n,
            cp_len: cp,
            ..OfdmParams::default()
        }
    }

    fn random_row(n: usize, seed: u64) -> Vec<Cf64> {
        let mut rng = crate::rng::seeded(seed);
        (0..n)
            .map(|_| Cf64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    fn rel_err(a: &[Cf64], b: &[Cf64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn single_subcarrier_is_a_unit_modulus_tone() {
        let n = 64;
        let p = params(n, 8);
        let mut row = vec![Cf64::new(0.0, 0.0); n];
        let k0 = 5;
        row[k0] = Cf64::new(1.0, 0.0);
        let sig = ofdm_modulate(&row, &p).unwrap();
        assert_eq!(sig.samples.len(), n + 8);
        let body = &sig.samples[8..];
        for (t, x) in body.iter().enumerate() {
            let want = Cf64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * (k0 * t) as f64 / n as f64);
            assert!((x - want).norm() < 1e-14);
        }
    }

    #[test]
    fn cyclic_prefix_copies_the_tail() {
        let p = params(64, 16);
        let sig = ofdm_modulate(&random_row(64, 1), &p).unwrap();
        assert_eq!(&sig.samples[..16], &sig.samples[64..80]);
    }

    #[test]
    fn round_trip_and_parseval() {
        for &n in &[64usize, 512] {
            let p = params(n, n / 16);
            let modem = OfdmModem::new(&p).unwrap();
            for seed in 0..20 {
                let row = random_row(n, seed);
                let sig = modem.modulate(&row).unwrap();
                let e_time: f64 = sig.samples[p.cp_len..].iter().map(|x| x.norm_sqr()).sum();
                let e_freq: f64 = row.iter().map(|x| x.norm_sqr()).sum();
                assert!((e_time - e_freq).abs() / e_freq < 1e-12);
                let back = modem.demodulate(&sig.samples).unwrap();
                assert!(rel_err(&back, &row) < 1e-12);
            }
        }
    }

    #[test]
    fn delayed_impulse_channel_is_a_phase_ramp() {
        // circular-shift theorem: a delay of d <= cp samples multiplies bin k
        // by exp(-j 2 pi k d / N)
        let n = 64;
        let p = params(n, 8);
        let modem = OfdmModem::new(&p).unwrap();
        let row = random_row(n, 9);
        let tx = modem.modulate(&row).unwrap().samples;
        for d in 0..=8 {
            let mut rx = vec![Cf64::new(0.0, 0.0); tx.len()];
            rx[d..].copy_from_slice(&tx[..tx.len() - d]);
            let y = modem.demodulate(&rx).unwrap();
            let want: Vec<Cf64> = row
                .iter()
                .enumerate()
                .map(|(k, x)| x * Cf64::from_polar(1.0, -2.0 * PI * (k * d) as f64 / n as f64))
                .collect();
            assert!(rel_err(&y, &want) < 1e-10, "d = {d}");
        }
    }

    #[test]
    fn wrong_lengths_are_rejected() {
        let p = params(64, 8);
        let modem = OfdmModem::new(&p).unwrap();
        assert!(matches!(modem.modulate(&random_row(63, 0)), Err(Error::InputShape(_))));
        assert!(matches!(
            modem.demodulate(&vec![Cf64::new(0.0, 0.0); 64]),
            Err(Error::InputShape(_))
        ));
    }
}
