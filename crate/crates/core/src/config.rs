//! Scenario files.
//!
//! The format is TOML restricted to dotted keys under fixed sections, e.g.
//!
//! ```toml
//! ofdm.n_fft = 512
//! channel.speed_kmh = 350.0
//! noise.sir_db = "inf"
//! svm.gamma = "auto"
//! run.estimators = ["ls-linear", "ls-svm"]
//! sweep.axis = "sir_db"
//! sweep.values = [-10, 0, 10]
//! ```
//!
//! Unknown keys are rejected. Levels in dB accept a number or one of the
//! strings `"inf"` / `"-inf"`. A JSON run manifest written by the CLI is also
//! accepted in place of a scenario file.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelProfile, NoiseSpec};
use crate::estimators::{EstimatorKind, SvmHyper};
use crate::grid::OfdmParams;
use crate::{Error, Result};

/// Serde adapter for dB levels that may be infinite.
pub mod db_value {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub(crate) struct DbVisitor;

    impl<'de> Visitor<'de> for DbVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a level in dB or \"inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            super::parse_db(v).map_err(E::custom)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(DbVisitor)
    }
}

/// Like [`db_value`] for lists of levels.
pub mod db_list {
    use serde::de::{Deserializer, SeqAccess, Visitor};
    use serde::ser::{SerializeSeq, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        struct One(f64);
        impl serde::Serialize for One {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                super::db_value::serialize(&self.0, s)
            }
        }
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for &x in v {
            seq.serialize_element(&One(x))?;
        }
        seq.end()
    }

    struct One(f64);

    impl<'de> serde::Deserialize<'de> for One {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            d.deserialize_any(super::db_value::DbVisitor).map(One)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        struct ListVisitor;
        impl<'de> Visitor<'de> for ListVisitor {
            type Value = Vec<f64>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of levels in dB")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Vec<f64>, A::Error> {
                let mut out = Vec::new();
                while let Some(One(v)) = seq.next_element()? {
                    out.push(v);
                }
                Ok(out)
            }
        }
        d.deserialize_seq(ListVisitor)
    }
}

/// Parses `"20"`, `"-7.5"`, `"inf"`, `"+inf"` or `"-inf"`.
pub fn parse_db(s: &str) -> std::result::Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("`{s}` is not a level in dB")),
    }
}

/// `"auto"` ties the regularisation to the target SNR.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum GammaSetting {
    #[default]
    Auto,
    Value(f64),
}

impl Serialize for GammaSetting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Auto => s.serialize_str("auto"),
            Self::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for GammaSetting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Self::Value(v)),
            Raw::Text(t) if t == "auto" => Ok(Self::Auto),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected \"auto\" or a number, got `{t}`"
            ))),
        }
    }
}

/// Smallest regularisation the automatic rule will pick (noise-free runs).
pub const AUTO_GAMMA_FLOOR: f64 = 1e-6;

/// LS-SVM settings as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmSettings {
    pub epsilon: f64,
    pub gamma: GammaSetting,
    pub c: f64,
    /// Kernel width in subcarriers; defaults to twice the pilot spacing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rbf_sigma: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvmSettings {
    fn default() -> Self {
        let h = SvmHyper::default();
        Self {
            epsilon: h.epsilon,
            gamma: GammaSetting::Auto,
            c: h.c,
            rbf_sigma: None,
            tol: h.tol,
            max_iter: h.max_iter,
        }
    }
}

impl SvmSettings {
    /// Concrete hyperparameters for a run at `snr_db`.
    pub fn resolve(&self, snr_db: f64, pilot_spacing: usize) -> Result<SvmHyper> {
        let gamma = match self.gamma {
            GammaSetting::Value(v) => v,
            GammaSetting::Auto => 10f64.powf(-snr_db / 10.0).max(AUTO_GAMMA_FLOOR),
        };
        let hyper = SvmHyper {
            epsilon: self.epsilon,
            gamma,
            c: self.c,
            rbf_sigma: self.rbf_sigma.unwrap_or(2.0 * pilot_spacing as f64),
            tol: self.tol,
            max_iter: self.max_iter,
        };
        hyper.validate()?;
        Ok(hyper)
    }

    /// Pins every setting to `hyper`.
    pub fn fixed(hyper: &SvmHyper) -> Self {
        Self {
            epsilon: hyper.epsilon,
            gamma: GammaSetting::Value(hyper.gamma),
            c: hyper.c,
            rbf_sigma: Some(hyper.rbf_sigma),
            tol: hyper.tol,
            max_iter: hyper.max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSettings {
    pub speed_kmh: f64,
    pub carrier_hz: f64,
    pub taps: ChannelProfile,
}

impl Default for ChannelSettings {
    fn default() -> Self {
        Self {
            speed_kmh: 350.0,
            carrier_hz: 2.15e9,
            taps: ChannelProfile::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    pub frames: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorKind>,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            frames: 2,
            seed: 1,
            estimators: vec![EstimatorKind::LsLinear, EstimatorKind::LsSvm],
        }
    }
}

/// Noise level swept by the `sweep` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    SnrDb,
    SirDb,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SnrDb => "snr_db",
            Self::SirDb => "sir_db",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr_db" | "snr" => Ok(Self::SnrDb),
            "sir_db" | "sir" => Ok(Self::SirDb),
            _ => Err(Error::config("sweep.axis", format!("unknown axis `{s}` (expected snr_db or sir_db)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    pub axis: Axis,
    #[serde(with = "db_list")]
    pub values: Vec<f64>,
}

/// Search grid of the `validate` command. Kernel widths are multiples of
/// the pilot spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSettings {
    pub gammas: Vec<f64>,
    pub cs: Vec<f64>,
    pub sigma_factors: Vec<f64>,
}

impl Default for ValidateSettings {
    fn default() -> Self {
        Self {
            gammas: vec![1e-6, 1e-4, 1e-2, 1.0],
            cs: vec![0.1, 1.0, 10.0, 100.0],
            sigma_factors: vec![0.5, 1.0, 2.0, 4.0],
        }
    }
}

/// A complete scenario file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub ofdm: OfdmParams,
    pub channel: ChannelSettings,
    pub noise: NoiseSpec,
    pub svm: SvmSettings,
    pub run: RunSettings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSettings>,
    pub validate: ValidateSettings,
}

impl ConfigFile {
    pub fn validate(&self) -> Result<()> {
        self.ofdm.validate()?;
        self.channel.taps.validate()?;
        self.noise.validate()?;
        self.svm.resolve(20.0, self.ofdm.pilot_spacing)?;
        if !(self.channel.speed_kmh >= 0.0 && self.channel.speed_kmh.is_finite()) {
            return Err(Error::config("channel.speed_kmh", "must be finite and >= 0"));
        }
        if !(self.channel.carrier_hz > 0.0 && self.channel.carrier_hz.is_finite()) {
            return Err(Error::config("channel.carrier_hz", "must be positive"));
        }
        if self.run.frames == 0 {
            return Err(Error::config("run.frames", "must be at least 1"));
        }
        if self.run.estimators.is_empty() {
            return Err(Error::config("run.estimators", "select at least one estimator"));
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return Err(Error::config("sweep.values", "must not be empty"));
            }
        }
        let v = &self.validate;
        for (key, list) in [
            ("validate.gammas", &v.gammas),
            ("validate.cs", &v.cs),
            ("validate.sigma_factors", &v.sigma_factors),
        ] {
            if list.is_empty() || list.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(Error::config(key, "needs at least one positive value"));
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| deser_error(e.message()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is plain data")
    }

    /// Reads a scenario file or a run manifest (`.json`, or text starting with `{`).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        let parsed = if is_json {
            Manifest::from_json_str(&text).map(|m| m.config)
        } else {
            Self::from_toml_str(&text)
        };
        parsed.map_err(|e| e.context(format!("in {}", path.display())))
    }
}

fn deser_error(message: &str) -> Error {
    let key = message
        .split_once("unknown field `")
        .and_then(|(_, rest)| rest.split_once('`'))
        .map(|(k, _)| k.to_string());
    Error::Config {
        key,
        message: message.trim().to_string(),
    }
}

/// Everything needed to rerun a command bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub toolkit: String,
    pub version: String,
    pub command: String,
    pub config: ConfigFile,
}

impl Manifest {
    pub fn new(command: &str, config: ConfigFile) -> Self {
        Self {
            toolkit: env!("CARGO_PKG_NAME").to_string(),
            version: crate::VERSION.to_string(),
            command: command.to_string(),
            config,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest is plain data") + "\n"
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text).map_err(|e| deser_error(&e.to_string()))?;
        m.config.validate()?;
        Ok(m)
    }
}
