//! Monte-Carlo link simulation: transmit, fade, corrupt, estimate, equalise,
//! demap, count.

mod metrics;
mod sweep;

use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use metrics::{ber, equalize, measure_snr_sir, BitErrors, NoiseTally, ERASURE_THRESHOLD};
pub use sweep::{
    results_csv, sweep, validate_grid, validate_grid_csv, GridScore, SweepPoint, ValidationReport,
    RESULTS_HEADER,
};

use crate::channel::{
    apply_channel, awgn_noise, doppler_from_speed, gen_tap_gains, impulse_noise, quantize_taps,
    true_freq_response, ChannelProfile, ChannelRealization, NoiseSpec, QuantizedTaps,
};
use crate::config::{ConfigFile, RunSettings, SvmSettings};
use crate::estimators::{estimate_channel, ls_pilot_estimate, EstimatorKind, PilotEstimate, SvmHyper};
use crate::grid::{build_frame, demap_qam16, modulate_frame, random_payload, OfdmModem, OfdmParams, ResourceGrid};
use crate::rng::{frame_seed, Stream};
use crate::{Cf64, Error, Result};

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub ofdm: OfdmParams,
    pub profile: ChannelProfile,
    pub speed_kmh: f64,
    pub carrier_hz: f64,
    pub noise: NoiseSpec,
    pub svm: SvmSettings,
    pub n_frames: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorKind>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self::from_config(&ConfigFile::default())
    }
}

impl Scenario {
    pub fn from_config(cfg: &ConfigFile) -> Self {
        Self {
            ofdm: cfg.ofdm.clone(),
            profile: cfg.channel.taps.clone(),
            speed_kmh: cfg.channel.speed_kmh,
            carrier_hz: cfg.channel.carrier_hz,
            noise: cfg.noise.clone(),
            svm: cfg.svm.clone(),
            n_frames: cfg.run.frames,
            seed: cfg.run.seed,
            estimators: cfg.run.estimators.clone(),
        }
    }

    /// Writes this scenario back into `base`, keeping its sweep and
    /// validation sections.
    pub fn to_config(&self, base: &ConfigFile) -> ConfigFile {
        let mut cfg = base.clone();
        cfg.ofdm = self.ofdm.clone();
        cfg.channel.taps = self.profile.clone();
        cfg.channel.speed_kmh = self.speed_kmh;
        cfg.channel.carrier_hz = self.carrier_hz;
        cfg.noise = self.noise.clone();
        cfg.svm = self.svm.clone();
        cfg.run = RunSettings {
            frames: self.n_frames,
            seed: self.seed,
            estimators: self.estimators.clone(),
        };
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        self.to_config(&ConfigFile::default()).validate()
    }

    /// Resolved LS-SVM hyperparameters at this scenario's SNR.
    pub fn hyper(&self) -> Result<SvmHyper> {
        self.svm.resolve(self.noise.snr_db, self.ofdm.pilot_spacing)
    }

    pub fn doppler_hz(&self) -> f64 {
        doppler_from_speed(self.speed_kmh, self.carrier_hz)
    }
}

/// Per-estimator totals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorResult {
    pub kind: EstimatorKind,
    pub bits: BitErrors,
    /// `Σ|Ĥ - H|²` over every subcarrier of every symbol.
    pub error_energy: f64,
    /// `Σ|H|²` over the same cells.
    pub truth_energy: f64,
}

impl EstimatorResult {
    fn empty(kind: EstimatorKind) -> Self {
        Self {
            kind,
            bits: BitErrors::default(),
            error_energy: 0.0,
            truth_energy: 0.0,
        }
    }

    pub fn ber(&self) -> f64 {
        self.bits.rate()
    }

    pub fn mse(&self) -> f64 {
        if self.truth_energy > 0.0 {
            self.error_energy / self.truth_energy
        } else {
            0.0
        }
    }

    fn merge(&mut self, other: &EstimatorResult) {
        self.bits.merge(other.bits);
        self.error_energy += other.error_energy;
        self.truth_energy += other.truth_energy;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub estimators: Vec<EstimatorResult>,
    pub noise: NoiseTally,
    pub measured_snr_db: f64,
    pub measured_sir_db: f64,
    pub measured_impulse_rate: f64,
    pub frames: usize,
    pub seed: u64,
    pub hyper: SvmHyper,
    pub wall_time: Duration,
}

impl RunResult {
    pub fn get(&self, kind: EstimatorKind) -> Option<&EstimatorResult> {
        self.estimators.iter().find(|e| e.kind == kind)
    }

    pub fn ber(&self, kind: EstimatorKind) -> Option<f64> {
        self.get(kind).map(EstimatorResult::ber)
    }

    /// Data symbols demapped per estimator.
    pub fn data_symbols(&self) -> u64 {
        self.estimators.first().map_or(0, |e| e.bits.total) / crate::grid::BITS_PER_SYMBOL as u64
    }
}

/// Outcome of one Monte-Carlo frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    pub estimators: Vec<EstimatorResult>,
    pub noise: NoiseTally,
}

/// The received frame before estimation, plus what the receiver may not see.
#[derive(Debug, Clone)]
pub struct ReceivedFrame {
    pub grid: ResourceGrid,
    pub channel: ChannelRealization,
    pub clean: Vec<Cf64>,
    pub rx: Vec<Cf64>,
    pub noise: NoiseTally,
}

/// Shared, per-run state.
struct Link {
    params: OfdmParams,
    modem: OfdmModem,
    taps: QuantizedTaps,
    doppler_hz: f64,
    pilots: Vec<usize>,
    data: Vec<usize>,
}

impl Link {
    fn new(s: &Scenario) -> Result<Self> {
        let modem = OfdmModem::new(&s.ofdm)?;
        Ok(Self {
            taps: quantize_taps(&s.profile, s.ofdm.sample_rate())?,
            doppler_hz: s.doppler_hz(),
            pilots: s.ofdm.pilot_positions(),
            data: s.ofdm.data_positions(),
            params: s.ofdm.clone(),
            modem,
        })
    }

    fn receive(&self, s: &Scenario, frame: usize) -> Result<ReceivedFrame> {
        let f = frame as u64;
        let payload = random_payload(&self.params, frame_seed(s.seed, f, Stream::Payload));
        let grid = build_frame(&self.params, &payload, frame_seed(s.seed, f, Stream::Pilots))?;
        let tx = modulate_frame(&grid, &self.modem)?;
        let channel = gen_tap_gains(
            &self.taps,
            self.doppler_hz,
            tx.len(),
            tx.sample_rate,
            frame_seed(s.seed, f, Stream::Fading),
        )?;
        let clean = apply_channel(&tx, &channel)?.samples;
        let power = crate::grid::mean_power(&clean);
        let impulse = impulse_noise(
            clean.len(),
            s.noise.sir_db,
            s.noise.impulse_prob,
            power,
            frame_seed(s.seed, f, Stream::Impulse),
        )?;
        let awgn = awgn_noise(clean.len(), s.noise.snr_db, power, frame_seed(s.seed, f, Stream::Awgn))?;
        let noise = NoiseTally::from_parts(&clean, &awgn, &impulse.samples)?;
        let rx = clean
            .iter()
            .zip(&impulse.samples)
            .zip(&awgn)
            .map(|((c, i), w)| c + i + w)
            .collect();
        Ok(ReceivedFrame {
            grid,
            channel,
            clean,
            rx,
            noise,
        })
    }

    /// Demodulated cells of symbol `s`.
    fn demod(&self, rx: &[Cf64], s: usize) -> Result<Vec<Cf64>> {
        let len = self.params.symbol_len();
        self.modem.demodulate(&rx[s * len..(s + 1) * len])
    }

    fn pilot_estimate(&self, grid: &ResourceGrid, y: &[Cf64], s: usize) -> Result<PilotEstimate> {
        let row = grid.row(s);
        let yp: Vec<Cf64> = self.pilots.iter().map(|&k| y[k]).collect();
        let xp: Vec<Cf64> = self.pilots.iter().map(|&k| row[k]).collect();
        PilotEstimate::new(self.pilots.clone(), ls_pilot_estimate(&yp, &xp)?)
    }

    fn symbol(
        &self,
        s: &Scenario,
        hyper: &SvmHyper,
        frame: &ReceivedFrame,
        sym: usize,
    ) -> Result<Vec<EstimatorResult>> {
        let y = self.demod(&frame.rx, sym)?;
        let truth = true_freq_response(&frame.channel, sym, &self.params)?;
        let pilots = self.pilot_estimate(&frame.grid, &y, sym)?;
        let tx_bits = frame.grid.symbol_bits(sym);
        let truth_energy: f64 = truth.iter().map(|h| h.norm_sqr()).sum();
        s.estimators
            .iter()
            .map(|&kind| {
                let est = estimate_channel(kind, &pilots, self.params.n_fft, hyper, Some(&truth))
                    .map_err(|e| e.context(format!("{kind} on symbol {sym}")))?;
                let x_hat = equalize(&y, &est.h_hat)?;
                let cells: Vec<Cf64> = self.data.iter().map(|&k| x_hat[k]).collect();
                let bits = ber(tx_bits, &demap_qam16(&cells))?;
                let error_energy = est.h_hat.iter().zip(&truth).map(|(a, b)| (a - b).norm_sqr()).sum();
                Ok(EstimatorResult {
                    kind,
                    bits,
                    error_energy,
                    truth_energy,
                })
            })
            .collect()
    }

    fn frame(&self, s: &Scenario, hyper: &SvmHyper, frame: usize) -> Result<FrameOutcome> {
        let rx = self.receive(s, frame)?;
        let per_symbol: Vec<Result<Vec<EstimatorResult>>> = (0..self.params.symbols_per_frame)
            .into_par_iter()
            .map(|sym| self.symbol(s, hyper, &rx, sym))
            .collect();
        let mut totals: Vec<EstimatorResult> = s.estimators.iter().map(|&k| EstimatorResult::empty(k)).collect();
        for sym in per_symbol {
            for (t, r) in totals.iter_mut().zip(sym?) {
                t.merge(&r);
            }
        }
        Ok(FrameOutcome {
            estimators: totals,
            noise: rx.noise,
        })
    }
}

/// Synthesises frame `frame` of `s` up to the receiver input.
pub fn receive_frame(s: &Scenario, frame: usize) -> Result<ReceivedFrame> {
    s.validate()?;
    Link::new(s)?.receive(s, frame)
}

/// Runs every frame of `s`; identical scenarios give identical results.
pub fn run_scenario(s: &Scenario) -> Result<RunResult> {
    let start = Instant::now();
    s.validate()?;
    let hyper = s.hyper()?;
    let link = Link::new(s)?;
    let frames: Vec<Result<FrameOutcome>> = (0..s.n_frames)
        .into_par_iter()
        .map(|f| link.frame(s, &hyper, f).map_err(|e| e.context(format!("frame {f}"))))
        .collect();
    let mut estimators: Vec<EstimatorResult> = s.estimators.iter().map(|&k| EstimatorResult::empty(k)).collect();
    let mut noise = NoiseTally::default();
    for f in frames {
        let f = f?;
        for (t, r) in estimators.iter_mut().zip(&f.estimators) {
            t.merge(r);
        }
        noise.merge(&f.noise);
    }
    Ok(RunResult {
        estimators,
        measured_snr_db: noise.snr_db()?,
        measured_sir_db: noise.sir_db()?,
        measured_impulse_rate: noise.impulse_rate(),
        noise,
        frames: s.n_frames,
        seed: s.seed,
        hyper,
        wall_time: start.elapsed(),
    })
}

/// LS values at the pilots of every symbol in `frame`.
pub fn frame_pilot_estimates(s: &Scenario, frame: &ReceivedFrame) -> Result<Vec<PilotEstimate>> {
    let link = Link::new(s)?;
    (0..s.ofdm.symbols_per_frame)
        .map(|sym| {
            let y = link.demod(&frame.rx, sym)?;
            link.pilot_estimate(&frame.grid, &y, sym)
        })
        .collect()
}

pub(crate) fn require_nonempty<T>(values: &[T], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InputShape(format!("{what} must not be empty")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Tap;

    fn small() -> Scenario {
        let mut s = Scenario::default();
        s.ofdm.n_fft = 64;
        s.ofdm.cp_len = 8;
        s.ofdm.symbols_per_frame = 6;
        s.ofdm.delta_f_hz = 120e3;
        s.n_frames = 2;
        s.estimators = EstimatorKind::ALL.to_vec();
        s
    }

    #[test]
    fn noiseless_static_flat_link_is_error_free() {
        let mut s = small();
        s.profile = ChannelProfile {
            taps: vec![Tap {
                delay_ns: 0.0,
                power_db: 0.0,
            }],
        };
        s.speed_kmh = 0.0;
        s.noise = NoiseSpec {
            snr_db: f64::INFINITY,
            sir_db: f64::INFINITY,
            impulse_prob: 0.2,
        };
        let r = run_scenario(&s).unwrap();
        for e in &r.estimators {
            assert_eq!(e.bits.errors, 0, "{}", e.kind);
            assert!(e.bits.total > 0);
        }
        assert_eq!(r.measured_snr_db, f64::INFINITY);
        assert_eq!(r.measured_sir_db, f64::INFINITY);
    }

    #[test]
    fn runs_are_deterministic() {
        let s = small();
        let a = run_scenario(&s).unwrap();
        let b = run_scenario(&s).unwrap();
        assert_eq!(a.estimators, b.estimators);
        assert_eq!(a.noise, b.noise);
        let mut other = s.clone();
        other.seed += 1;
        assert_ne!(run_scenario(&other).unwrap().noise, a.noise);
    }

    #[test]
    fn bits_counted_per_data_cell() {
        let s = small();
        let r = run_scenario(&s).unwrap();
        let per_frame = s.ofdm.data_capacity_bits() as u64;
        assert_eq!(r.get(EstimatorKind::LsLinear).unwrap().bits.total, 2 * per_frame);
        assert_eq!(r.get(EstimatorKind::Oracle).unwrap().mse(), 0.0);
    }

    #[test]
    fn invalid_scenarios_are_rejected() {
        let mut s = small();
        s.n_frames = 0;
        assert!(run_scenario(&s).is_err());
        let mut s = small();
        s.speed_kmh = -1.0;
        assert!(run_scenario(&s).is_err());
    }
}
