//! Frequency-domain frame layout and the OFDM modem.

mod ofdm;
mod qam;

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use ofdm::{ofdm_demodulate, ofdm_modulate, OfdmModem};
pub use qam::{constellation, demap_qam16, map_qam16, BITS_PER_SYMBOL, QAM16_SCALE};

use crate::{rng, Cf64, Error, Result};

/// OFDM numerology and comb-pilot layout.
///
/// Defaults follow the LTE 5 MHz downlink: 512-point DFT at 15 kHz spacing
/// (7.68 MHz sample rate), 140 symbols per 10 ms frame, a pilot every sixth
/// subcarrier, and a 36-sample cyclic prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfdmParams {
    pub n_fft: usize,
    pub cp_len: usize,
    pub delta_f_hz: f64,
    pub symbols_per_frame: usize,
    pub pilot_spacing: usize,
    pub pilot_offset: usize,
    pub bits_per_symbol: usize,
    /// Nominal channel bandwidth; informational only.
    pub bandwidth_hz: f64,
}

impl Default for OfdmParams {
    fn default() -> Self {
        Self {
            n_fft: 512,
            cp_len: 36,
            delta_f_hz: 15e3,
            symbols_per_frame: 140,
            pilot_spacing: 6,
            pilot_offset: 0,
            bits_per_symbol: BITS_PER_SYMBOL,
            bandwidth_hz: 5e6,
        }
    }
}

impl OfdmParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::config(format!("ofdm.{key}"), msg));
        if !self.n_fft.is_power_of_two() || self.n_fft < 2 {
            return bad("n_fft", format!("{} is not a power of two", self.n_fft));
        }
        if self.cp_len >= self.n_fft {
            return bad("cp_len", format!("{} must be below n_fft {}", self.cp_len, self.n_fft));
        }
        if !(self.delta_f_hz > 0.0 && self.delta_f_hz.is_finite()) {
            return bad("delta_f_hz", format!("{} must be positive", self.delta_f_hz));
        }
        if self.symbols_per_frame == 0 {
            return bad("symbols_per_frame", "must be at least 1".into());
        }
        if self.pilot_spacing == 0 {
            return bad("pilot_spacing", "must be at least 1".into());
        }
        if self.pilot_offset >= self.n_fft {
            return bad("pilot_offset", format!("{} outside [0, {})", self.pilot_offset, self.n_fft));
        }
        if self.n_pilots() < 2 {
            return bad("pilot_spacing", format!("only {} pilot(s) fit; need 2", self.n_pilots()));
        }
        if self.bits_per_symbol != BITS_PER_SYMBOL {
            return bad("bits_per_symbol", "only 16-QAM (4) is supported".into());
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return bad("bandwidth_hz", format!("{} must be positive", self.bandwidth_hz));
        }
        Ok(())
    }

    /// `N_p = floor((N - offset - 1) / spacing) + 1`.
    pub fn n_pilots(&self) -> usize {
        if self.pilot_offset >= self.n_fft || self.pilot_spacing == 0 {
            return 0;
        }
        (self.n_fft - self.pilot_offset - 1) / self.pilot_spacing + 1
    }

    pub fn pilot_positions(&self) -> Vec<usize> {
        (0..self.n_pilots())
            .map(|m| self.pilot_offset + m * self.pilot_spacing)
            .collect()
    }

    pub fn sample_rate(&self) -> f64 {
        self.n_fft as f64 * self.delta_f_hz
    }

    pub fn symbol_len(&self) -> usize {
        self.n_fft + self.cp_len
    }

    pub fn frame_len(&self) -> usize {
        self.symbol_len() * self.symbols_per_frame
    }

    pub fn data_cells_per_symbol(&self) -> usize {
        self.n_fft - self.n_pilots()
    }

    pub fn data_capacity_bits(&self) -> usize {
        self.data_cells_per_symbol() * self.symbols_per_frame * self.bits_per_symbol
    }

    /// Data subcarrier indices of one symbol, ascending.
    pub fn data_positions(&self) -> Vec<usize> {
        let pilots = self.pilot_mask_row();
        (0..self.n_fft).filter(|&k| !pilots[k]).collect()
    }

    fn pilot_mask_row(&self) -> Vec<bool> {
        let mut row = vec![false; self.n_fft];
        for k in self.pilot_positions() {
            row[k] = true;
        }
        row
    }
}

/// Complex baseband samples at a known rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pub samples: Vec<Cf64>,
    pub sample_rate: f64,
}

impl TimeSignal {
    pub fn new(samples: Vec<Cf64>, sample_rate: f64) -> Self {
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean_power(&self) -> f64 {
        mean_power(&self.samples)
    }
}

pub(crate) fn mean_power(x: &[Cf64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|s| s.norm_sqr()).sum::<f64>() / x.len() as f64
}

/// One frame of frequency-domain cells, `symbols × subcarriers`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    pub n_symbols: usize,
    pub n_subcarriers: usize,
    pub data: Vec<Cf64>,
    pub pilot_mask: Vec<bool>,
    pub payload_bits: Vec<u8>,
}

impl ResourceGrid {
    pub fn row(&self, symbol: usize) -> &[Cf64] {
        let n = self.n_subcarriers;
        &self.data[symbol * n..(symbol + 1) * n]
    }

    pub fn is_pilot(&self, symbol: usize, k: usize) -> bool {
        self.pilot_mask[symbol * self.n_subcarriers + k]
    }

    pub fn pilot_count(&self, symbol: usize) -> usize {
        (0..self.n_subcarriers).filter(|&k| self.is_pilot(symbol, k)).count()
    }

    /// Payload bits carried by `symbol`'s data cells.
    pub fn symbol_bits(&self, symbol: usize) -> &[u8] {
        let per = (self.n_subcarriers - self.pilot_count(0)) * BITS_PER_SYMBOL;
        &self.payload_bits[symbol * per..(symbol + 1) * per]
    }

    /// Writes one line per OFDM symbol, each cell as a `re,im` pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for s in 0..self.n_symbols {
            let cells: Vec<String> = self
                .row(s)
                .iter()
                .map(|c| format!("{:.17e},{:.17e}", c.re, c.im))
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Pseudo-random unit-modulus QPSK pilots, `symbols × N_p`, known to both ends.
pub fn pilot_symbols(params: &OfdmParams, seed: u64) -> Vec<Vec<Cf64>> {
    let mut rng = rng::seeded(seed);
    let a = std::f64::consts::FRAC_1_SQRT_2;
    (0..params.symbols_per_frame)
        .map(|_| {
            (0..params.n_pilots())
                .map(|_| {
                    let re = if rng.random::<bool>() { a } else { -a };
                    let im = if rng.random::<bool>() { a } else { -a };
                    Cf64::new(re, im)
                })
                .collect()
        })
        .collect()
}

/// Places pilots on the comb of every symbol and 16-QAM payload elsewhere.
///
/// Data cells are filled symbol by symbol in ascending subcarrier order.
pub fn build_frame(params: &OfdmParams, payload: &[u8], seed: u64) -> Result<ResourceGrid> {
    params.validate()?;
    let capacity = params.data_capacity_bits();
    if payload.len() != capacity {
        return Err(Error::InputShape(format!(
            "payload has {} bits, frame capacity is {capacity}",
            payload.len()
        )));
    }
    let symbols = map_qam16(payload)?;
    let pilots = pilot_symbols(params, seed);
    let mask_row = params.pilot_mask_row();
    let n = params.n_fft;
    let mut data = Vec::with_capacity(n * params.symbols_per_frame);
    let mut pilot_mask = Vec::with_capacity(n * params.symbols_per_frame);
    let mut next_data = symbols.into_iter();
    for pilot_row in &pilots {
        let mut next_pilot = pilot_row.iter();
        for &is_pilot in &mask_row {
            let cell = if is_pilot {
                *next_pilot.next().expect("pilot count")
            } else {
                next_data.next().expect("payload sized to capacity")
            };
            data.push(cell);
            pilot_mask.push(is_pilot);
        }
    }
    Ok(ResourceGrid {
        n_symbols: params.symbols_per_frame,
        n_subcarriers: n,
        data,
        pilot_mask,
        payload_bits: payload.to_vec(),
    })
}

/// Uniform random payload sized to the frame's data capacity.
pub fn random_payload(params: &OfdmParams, seed: u64) -> Vec<u8> {
    let mut rng = rng::seeded(seed);
    (0..params.data_capacity_bits())
        .map(|_| rng.random_range(0..2u8))
        .collect()
}

/// Modulates every row of `grid` and concatenates the symbols.
pub fn modulate_frame(grid: &ResourceGrid, modem: &OfdmModem) -> Result<TimeSignal> {
    let mut samples = Vec::with_capacity(grid.n_symbols * modem.symbol_len());
    for s in 0..grid.n_symbols {
        modem.modulate_into(grid.row(s), &mut samples)?;
    }
    Ok(TimeSignal::new(samples, modem.sample_rate()))
}
