use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One row of a power-delay profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tap {
    pub delay_ns: f64,
    pub power_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChannelProfile {
    pub taps: Vec<Tap>,
}

const EVA: [(f64, f64); 9] = [
    (0.0, 0.0),
    (30.0, -1.5),
    (150.0, -1.4),
    (310.0, -3.6),
    (370.0, -0.6),
    (710.0, -9.1),
    (1090.0, -7.0),
    (1730.0, -12.0),
    (2510.0, -16.9),
];

/// Extended Vehicular A: nine taps, 0 to 2510 ns.
pub fn eva_profile() -> ChannelProfile {
    ChannelProfile {
        taps: EVA
            .iter()
            .map(|&(delay_ns, power_db)| Tap { delay_ns, power_db })
            .collect(),
    }
}

impl Default for ChannelProfile {
    fn default() -> Self {
        eva_profile()
    }
}

impl ChannelProfile {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::config("channel.taps", msg));
        let Some(first) = self.taps.first() else {
            return bad("profile has no taps".into());
        };
        if first.delay_ns != 0.0 {
            return bad(format!("first delay must be 0 ns, got {}", first.delay_ns));
        }
        for w in self.taps.windows(2) {
            if !(w[1].delay_ns > w[0].delay_ns) {
                return bad(format!(
                    "delays must be strictly increasing ({} then {})",
                    w[0].delay_ns, w[1].delay_ns
                ));
            }
        }
        if let Some(t) = self.taps.iter().find(|t| !(t.power_db <= 0.0)) {
            return bad(format!("relative power {} dB exceeds 0 dB", t.power_db));
        }
        Ok(())
    }
}

/// A profile discretised onto the sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedTaps {
    /// Distinct tap delays in samples, ascending.
    pub delays: Vec<usize>,
    /// Linear powers summing to one.
    pub powers: Vec<f64>,
}

impl QuantizedTaps {
    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }

    pub fn max_delay(&self) -> usize {
        self.delays.last().copied().unwrap_or(0)
    }
}

/// Rounds each delay to the nearest sample, merges coincident taps by summing
/// linear power, and normalises the total power to one.
pub fn quantize_taps(profile: &ChannelProfile, sample_rate: f64) -> Result<QuantizedTaps> {
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return Err(Error::Domain(format!("sample rate {sample_rate} must be positive")));
    }
    profile.validate()?;
    let mut delays: Vec<usize> = Vec::new();
    let mut powers: Vec<f64> = Vec::new();
    for tap in &profile.taps {
        let d = (tap.delay_ns * 1e-9 * sample_rate).round() as usize;
        let p = 10f64.powf(tap.power_db / 10.0);
        match delays.last() {
            Some(&last) if last == d => *powers.last_mut().expect("paired") += p,
            _ => {
                delays.push(d);
                powers.push(p);
            }
        }
    }
    let total: f64 = powers.iter().sum();
    powers.iter_mut().for_each(|p| *p /= total);
    Ok(QuantizedTaps { delays, powers })
}
