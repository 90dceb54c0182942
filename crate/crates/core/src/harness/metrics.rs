use crate::{Cf64, Error, Result};

/// Relative magnitude below which an estimated subcarrier is erased.
pub const ERASURE_THRESHOLD: f64 = 1e-12;

/// Zero-forcing equalisation `X̂ = Y / Ĥ`, erasing near-null subcarriers to 0.
pub fn equalize(y: &[Cf64], h_hat: &[Cf64]) -> Result<Vec<Cf64>> {
    if y.len() != h_hat.len() {
        return Err(Error::InputShape(format!(
            "{} received cells, {} channel values",
            y.len(),
            h_hat.len()
        )));
    }
    let max = h_hat.iter().map(|h| h.norm()).fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(Error::DegenerateEstimate);
    }
    let floor = ERASURE_THRESHOLD * max;
    Ok(y.iter()
        .zip(h_hat)
        .map(|(&y, &h)| if h.norm() < floor { Cf64::new(0.0, 0.0) } else { y / h })
        .collect())
}

/// Bit-error count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BitErrors {
    pub errors: u64,
    pub total: u64,
}

impl BitErrors {
    pub fn rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.errors as f64 / self.total as f64
        }
    }

    pub fn merge(&mut self, other: BitErrors) {
        self.errors += other.errors;
        self.total += other.total;
    }
}

pub fn ber(tx_bits: &[u8], rx_bits: &[u8]) -> Result<BitErrors> {
    if tx_bits.len() != rx_bits.len() {
        return Err(Error::InputShape(format!(
            "{} transmitted bits, {} received",
            tx_bits.len(),
            rx_bits.len()
        )));
    }
    let errors = tx_bits.iter().zip(rx_bits).filter(|(a, b)| a != b).count();
    Ok(BitErrors {
        errors: errors as u64,
        total: tx_bits.len() as u64,
    })
}

/// Running energy sums behind the measured SNR and SIR.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseTally {
    pub samples: u64,
    pub signal_energy: f64,
    pub awgn_energy: f64,
    pub impulse_energy: f64,
    pub hits: u64,
}

impl NoiseTally {
    /// Impulse hits are the nonzero samples of `impulse`.
    pub fn from_parts(clean: &[Cf64], awgn: &[Cf64], impulse: &[Cf64]) -> Result<Self> {
        if clean.len() != awgn.len() || clean.len() != impulse.len() {
            return Err(Error::InputShape(format!(
                "signal, AWGN and impulse lengths differ: {}, {}, {}",
                clean.len(),
                awgn.len(),
                impulse.len()
            )));
        }
        let energy = |x: &[Cf64]| x.iter().map(|s| s.norm_sqr()).sum::<f64>();
        Ok(Self {
            samples: clean.len() as u64,
            signal_energy: energy(clean),
            awgn_energy: energy(awgn),
            impulse_energy: energy(impulse),
            hits: impulse.iter().filter(|s| **s != Cf64::new(0.0, 0.0)).count() as u64,
        })
    }

    pub fn merge(&mut self, other: &NoiseTally) {
        self.samples += other.samples;
        self.signal_energy += other.signal_energy;
        self.awgn_energy += other.awgn_energy;
        self.impulse_energy += other.impulse_energy;
        self.hits += other.hits;
    }

    fn signal_power(&self) -> Result<f64> {
        if self.samples == 0 || !(self.signal_energy > 0.0) {
            return Err(Error::DegenerateMeasurement("useful signal has zero power".into()));
        }
        Ok(self.signal_energy / self.samples as f64)
    }

    /// `+inf` when no AWGN was added.
    pub fn snr_db(&self) -> Result<f64> {
        let p = self.signal_power()?;
        if self.awgn_energy == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(10.0 * (p / (self.awgn_energy / self.samples as f64)).log10())
    }

    /// Signal power over the variance of the impulses that occurred; `+inf`
    /// without hits.
    pub fn sir_db(&self) -> Result<f64> {
        let p = self.signal_power()?;
        if self.hits == 0 {
            return Ok(f64::INFINITY);
        }
        Ok(10.0 * (p / (self.impulse_energy / self.hits as f64)).log10())
    }

    pub fn impulse_rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.hits as f64 / self.samples as f64
        }
    }
}

/// Empirical `(SNR, SIR)` in dB of one noisy observation.
pub fn measure_snr_sir(clean: &[Cf64], awgn: &[Cf64], impulse: &[Cf64]) -> Result<(f64, f64)> {
    let t = NoiseTally::from_parts(clean, awgn, impulse)?;
    Ok((t.snr_db()?, t.sir_db()?))
}
