//! Time-varying tapped delay line with a Jakes (Clarke) Doppler spectrum.
//!
//! Each tap is a sum of `SINUSOIDS_PER_TAP` equal-power complex sinusoids.
//! Arrival angles are evenly spaced around the circle and rotated by one
//! random offset per tap; phases are independent and uniform. Even spacing
//! makes the time-averaged autocorrelation a Riemann sum of the Bessel
//! integral, so it tracks `J0(2 pi f_d tau)` closely, while the random rotation
//! and phases keep taps and seeds independent.

use std::f64::consts::TAU;

use rand::Rng;

use super::QuantizedTaps;
use crate::grid::{OfdmParams, TimeSignal};
use crate::{rng, Cf64, Error, Result};

pub const SINUSOIDS_PER_TAP: usize = 128;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Maximum Doppler shift `v f_c / c` for a speed in km/h.
pub fn doppler_from_speed(speed_kmh: f64, carrier_hz: f64) -> f64 {
    speed_kmh / 3.6 * carrier_hz / SPEED_OF_LIGHT
}

/// Per-sample complex tap gains for one continuous channel realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `taps × samples`.
    pub tap_gains: Vec<Vec<Cf64>>,
    pub tap_delays_samples: Vec<usize>,
    pub doppler_hz: f64,
    pub sample_rate: f64,
    pub seed: u64,
}

impl ChannelRealization {
    pub fn n_samples(&self) -> usize {
        self.tap_gains.first().map_or(0, Vec::len)
    }

    pub fn n_taps(&self) -> usize {
        self.tap_gains.len()
    }

    /// `H(k) = sum_l h_l(t) exp(-j 2 pi k d_l / N)` with the taps frozen at sample `t`.
    pub fn freq_response_at(&self, sample: usize, n_fft: usize) -> Result<Vec<Cf64>> {
        if sample >= self.n_samples() {
            return Err(Error::Index {
                index: sample,
                len: self.n_samples(),
            });
        }
        let mut h = vec![Cf64::new(0.0, 0.0); n_fft];
        for (gains, &d) in self.tap_gains.iter().zip(&self.tap_delays_samples) {
            let g = gains[sample];
            for (k, hk) in h.iter_mut().enumerate() {
                // k*d reduced mod N keeps the phase argument small
                let phase = -TAU * ((k * d) % n_fft) as f64 / n_fft as f64;
                *hk += g * Cf64::from_polar(1.0, phase);
            }
        }
        Ok(h)
    }
}

/// Generates `n_samples` of every tap starting at `t = 0`.
///
/// With `doppler_hz == 0` the taps are constant complex Gaussian-like draws.
pub fn gen_tap_gains(
    taps: &QuantizedTaps,
    doppler_hz: f64,
    n_samples: usize,
    sample_rate: f64,
    seed: u64,
) -> Result<ChannelRealization> {
    if !(doppler_hz >= 0.0 && doppler_hz.is_finite()) {
        return Err(Error::Domain(format!("Doppler {doppler_hz} Hz must be >= 0")));
    }
    if !(sample_rate > 0.0) {
        return Err(Error::Domain(format!("sample rate {sample_rate} must be positive")));
    }
    let mut rng = rng::seeded(seed);
    let m = SINUSOIDS_PER_TAP;
    let tap_gains = taps
        .powers
        .iter()
        .map(|&power| {
            let rotation: f64 = rng.random_range(0.0..TAU);
            let phases: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..TAU)).collect();
            let omegas: Vec<f64> = (0..m)
                .map(|i| {
                    let angle = (TAU * i as f64 + rotation) / m as f64;
                    TAU * doppler_hz * angle.cos() / sample_rate
                })
                .collect();
            sum_of_sinusoids(&omegas, &phases, (power / m as f64).sqrt(), n_samples)
        })
        .collect();
    Ok(ChannelRealization {
        tap_gains,
        tap_delays_samples: taps.delays.clone(),
        doppler_hz,
        sample_rate,
        seed,
    })
}

fn sum_of_sinusoids(omegas: &[f64], phases: &[f64], amplitude: f64, n: usize) -> Vec<Cf64> {
    // Phasor recurrence, re-anchored exactly at every block start.
    const BLOCK: usize = 1024;
    let mut out = vec![Cf64::new(0.0, 0.0); n];
    let steps: Vec<Cf64> = omegas.iter().map(|&w| Cf64::from_polar(1.0, w)).collect();
    let mut z = vec![Cf64::new(0.0, 0.0); omegas.len()];
    for (b, chunk) in out.chunks_mut(BLOCK).enumerate() {
        let n0 = (b * BLOCK) as f64;
        for ((zi, &w), &ph) in z.iter_mut().zip(omegas).zip(phases) {
            *zi = Cf64::from_polar(amplitude, w * n0 + ph);
        }
        for sample in chunk.iter_mut() {
            let mut acc = Cf64::new(0.0, 0.0);
            for (zi, st) in z.iter_mut().zip(&steps) {
                acc += *zi;
                *zi *= st;
            }
            *sample = acc;
        }
    }
    out
}

/// `y(n) = sum_l h_l(n) x(n - d_l)` with zero history before `n = 0`.
pub fn apply_channel(tx: &TimeSignal, real: &ChannelRealization) -> Result<TimeSignal> {
    if real.n_samples() < tx.len() {
        return Err(Error::InputShape(format!(
            "realization covers {} samples, signal has {}",
            real.n_samples(),
            tx.len()
        )));
    }
    let x = &tx.samples;
    let mut y = vec![Cf64::new(0.0, 0.0); x.len()];
    for (gains, &d) in real.tap_gains.iter().zip(&real.tap_delays_samples) {
        for n in d..x.len() {
            y[n] += gains[n] * x[n - d];
        }
    }
    Ok(TimeSignal::new(y, tx.sample_rate))
}

/// Sample at the centre of symbol `s`'s DFT window (after its cyclic prefix).
pub fn symbol_midpoint(params: &OfdmParams, symbol: usize) -> usize {
    symbol * params.symbol_len() + params.cp_len + params.n_fft / 2
}

/// Ground-truth frequency response of symbol `symbol_index`, taps frozen at
/// the midpoint of its DFT window.
pub fn true_freq_response(
    real: &ChannelRealization,
    symbol_index: usize,
    params: &OfdmParams,
) -> Result<Vec<Cf64>> {
    let t = symbol_midpoint(params, symbol_index);
    if t >= real.n_samples() {
        return Err(Error::Index {
            index: symbol_index,
            len: real.n_samples() / params.symbol_len(),
        });
    }
    real.freq_response_at(t, params.n_fft)
}

/// Figure-style time/frequency surface: `symbol,subcarrier,re,im` per row.
pub fn freq_response_surface_csv(real: &ChannelRealization, params: &OfdmParams) -> Result<String> {
    use std::fmt::Write as _;
    let n_symbols = real.n_samples() / params.symbol_len();
    let mut out = String::from("symbol,subcarrier,re,im\n");
    for s in 0..n_symbols {
        for (k, h) in true_freq_response(real, s, params)?.iter().enumerate() {
            let _ = writeln!(out, "{s},{k},{:.17e},{:.17e}", h.re, h.im);
        }
    }
    Ok(out)
}
