//! Additive noise calibrated against the faded signal power.
//!
//! Both generators draw their full random stream regardless of the target
//! level (the level only scales it), so runs that differ only in SNR or SIR
//! share noise shapes and impulse positions.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::db_value;
use crate::grid::TimeSignal;
use crate::{rng, Cf64, Error, Result};

/// Noise levels relative to the received useful signal power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    /// `+inf` disables AWGN.
    #[serde(with = "db_value")]
    pub snr_db: f64,
    /// `+inf` disables impulse noise. The reference is the variance of the
    /// Gaussian inside each impulse, so the unconditional impulse power is
    /// `p * signal_power / 10^(SIR/10)`.
    #[serde(with = "db_value")]
    pub sir_db: f64,
    pub impulse_prob: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            snr_db: 20.0,
            sir_db: 0.0,
            impulse_prob: 0.2,
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.impulse_prob) {
            return Err(Error::config(
                "noise.impulse_prob",
                format!("{} outside [0, 1]", self.impulse_prob),
            ));
        }
        for (key, v) in [("noise.snr_db", self.snr_db), ("noise.sir_db", self.sir_db)] {
            if v.is_nan() || v == f64::NEG_INFINITY {
                return Err(Error::config(key, format!("{v} is not a usable level")));
            }
        }
        Ok(())
    }
}

/// Noise variance for a target ratio in dB; zero for `+inf`.
pub fn noise_variance(signal_power: f64, ratio_db: f64) -> Result<f64> {
    if !(signal_power > 0.0 && signal_power.is_finite()) {
        return Err(Error::Domain(format!(
            "reference signal power {signal_power} must be positive"
        )));
    }
    if ratio_db.is_nan() || ratio_db == f64::NEG_INFINITY {
        return Err(Error::Domain(format!("ratio {ratio_db} dB is not usable")));
    }
    if ratio_db == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(signal_power / 10f64.powf(ratio_db / 10.0))
}

fn circular_gaussian<R: Rng>(rng: &mut R, std_per_axis: f64) -> Cf64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Cf64::new(re, im) * std_per_axis
}

/// Circular complex Gaussian noise with `sigma_w^2 = signal_power / 10^(SNR/10)`.
pub fn awgn_noise(len: usize, snr_db: f64, signal_power: f64, seed: u64) -> Result<Vec<Cf64>> {
    let std = (noise_variance(signal_power, snr_db)? / 2.0).sqrt();
    let mut rng = rng::seeded(seed);
    Ok((0..len).map(|_| circular_gaussian(&mut rng, std)).collect())
}

/// Bernoulli-Gaussian impulses `i(n) = v(n) lambda(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseNoise {
    pub samples: Vec<Cf64>,
    pub hits: Vec<bool>,
}

impl ImpulseNoise {
    pub fn hit_count(&self) -> usize {
        self.hits.iter().filter(|&&h| h).count()
    }
}

/// `lambda(n) ~ Bernoulli(p)`, `v(n)` circular Gaussian of variance
/// `signal_power / 10^(SIR/10)`.
pub fn impulse_noise(
    len: usize,
    sir_db: f64,
    p: f64,
    signal_power: f64,
    seed: u64,
) -> Result<ImpulseNoise> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("impulse probability {p} outside [0, 1]")));
    }
    let std = (noise_variance(signal_power, sir_db)? / 2.0).sqrt();
    let mut rng = rng::seeded(seed);
    let mut samples = Vec::with_capacity(len);
    let mut hits = Vec::with_capacity(len);
    for _ in 0..len {
        let u: f64 = rng.random();
        let v = circular_gaussian(&mut rng, std);
        let hit = u < p && std > 0.0;
        hits.push(hit);
        samples.push(if hit { v } else { Cf64::new(0.0, 0.0) });
    }
    Ok(ImpulseNoise { samples, hits })
}

fn add(signal: &TimeSignal, noise: &[Cf64]) -> TimeSignal {
    let samples = signal.samples.iter().zip(noise).map(|(x, n)| x + n).collect();
    TimeSignal::new(samples, signal.sample_rate)
}

pub fn add_awgn(signal: &TimeSignal, snr_db: f64, signal_power: f64, seed: u64) -> Result<TimeSignal> {
    if snr_db == f64::INFINITY {
        return Ok(signal.clone());
    }
    Ok(add(signal, &awgn_noise(signal.len(), snr_db, signal_power, seed)?))
}

pub fn add_impulse(
    signal: &TimeSignal,
    sir_db: f64,
    p: f64,
    signal_power: f64,
    seed: u64,
) -> Result<TimeSignal> {
    let imp = impulse_noise(signal.len(), sir_db, p, signal_power, seed)?;
    Ok(add(signal, &imp.samples))
}
