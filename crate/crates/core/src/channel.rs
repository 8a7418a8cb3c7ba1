//! Channel simulation and per-symbol log-APPs.
//!
//! Bits are mapped antipodally (0 → +1, 1 → −1). Log-APPs use the natural
//! logarithm and a uniform input prior; "impossible" is the
//! [`LOG_ZERO`](crate::metrics::LOG_ZERO) sentinel.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::metrics::{clamp_log, LogApp, LOG_ZERO};
use crate::{Error, Result};

/// Noise variance for a given `E_b/N_0` in dB and code rate:
/// `σ² = 1 / (2 · R · 10^(E_b/N_0 / 10))`.
pub fn ebn0_to_noise_variance(ebn0_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    Bec { erasure: f64 },
    Biawgn { noise_variance: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    /// `None` marks an erasure.
    Bec(Vec<Option<u8>>),
    Awgn(Vec<f64>),
}

impl Observation {
    pub fn len(&self) -> usize {
        match self {
            Observation::Bec(v) => v.len(),
            Observation::Awgn(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl ChannelModel {
    pub fn bec(erasure: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&erasure) {
            return Err(Error::ProbabilityOutOfRange(erasure));
        }
        Ok(ChannelModel::Bec { erasure })
    }

    pub fn biawgn(noise_variance: f64) -> Result<Self> {
        if !(noise_variance > 0.0 && noise_variance.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise variance {noise_variance} must be positive")));
        }
        Ok(ChannelModel::Biawgn { noise_variance })
    }

    pub fn biawgn_ebn0(ebn0_db: f64, rate: f64) -> Result<Self> {
        if rate.is_nan() || rate <= 0.0 {
            return Err(Error::InvalidParameter(format!("rate {rate} must be positive")));
        }
        Self::biawgn(ebn0_to_noise_variance(ebn0_db, rate))
    }

    /// `N` independent channel uses.
    pub fn transmit<R: Rng + ?Sized>(&self, x: &[u8], rng: &mut R) -> Observation {
        match *self {
            ChannelModel::Bec { erasure } => {
                Observation::Bec(x.iter().map(|&b| if rng.gen::<f64>() < erasure { None } else { Some(b) }).collect())
            }
            ChannelModel::Biawgn { noise_variance } => {
                let sigma = noise_variance.sqrt();
                Observation::Awgn(
                    x.iter()
                        .map(|&b| {
                            let noise: f64 = rng.sample(StandardNormal);
                            (1.0 - 2.0 * b as f64) + sigma * noise
                        })
                        .collect(),
                )
            }
        }
    }

    /// Per-symbol `(log P(0|y), log P(1|y))`.
    pub fn initial_log_app(&self, y: &Observation) -> Result<Vec<LogApp>> {
        match (*self, y) {
            (ChannelModel::Bec { .. }, Observation::Bec(symbols)) => Ok(symbols
                .iter()
                .map(|s| match s {
                    None => [-std::f64::consts::LN_2; 2],
                    Some(0) => [0.0, LOG_ZERO],
                    Some(_) => [LOG_ZERO, 0.0],
                })
                .collect()),
            (ChannelModel::Biawgn { noise_variance }, Observation::Awgn(values)) => Ok(values
                .iter()
                .map(|&v| {
                    let llr = 2.0 * v / noise_variance;
                    [clamp_log(-softplus(-llr)), clamp_log(-softplus(llr))]
                })
                .collect()),
            _ => Err(Error::InvalidParameter("observation does not match channel kind".into())),
        }
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Seeded single-shot transmission.
pub fn transmit(x: &[u8], channel: &ChannelModel, seed: u64) -> Observation {
    let mut rng = crate::rng::block_rng(seed, 0, 0);
    channel.transmit(x, &mut rng)
}

/// Channel as written on the command line: `bec:<epsilon>` or `awgn:<ebn0_db>`.
///
/// The AWGN form needs the code rate to become a [`ChannelModel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ChannelSpec {
    Bec { erasure: f64 },
    Awgn { ebn0_db: f64 },
}

impl ChannelSpec {
    pub fn model(&self, rate: f64) -> Result<ChannelModel> {
        match *self {
            ChannelSpec::Bec { erasure } => ChannelModel::bec(erasure),
            ChannelSpec::Awgn { ebn0_db } => ChannelModel::biawgn_ebn0(ebn0_db, rate),
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            ChannelSpec::Bec { erasure } => erasure,
            ChannelSpec::Awgn { ebn0_db } => ebn0_db,
        }
    }
}

impl FromStr for ChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("channel `{s}`: expected bec:<eps> or awgn:<ebn0_db>")))?;
        let value: f64 = value.trim().parse().map_err(|_| Error::Parse(format!("channel `{s}`: bad number")))?;
        match kind.trim() {
            "bec" => {
                ChannelModel::bec(value)?;
                Ok(ChannelSpec::Bec { erasure: value })
            }
            "awgn" => Ok(ChannelSpec::Awgn { ebn0_db: value }),
            other => Err(Error::Parse(format!("unknown channel kind `{other}`"))),
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSpec::Bec { erasure } => write!(f, "bec:{erasure}"),
            ChannelSpec::Awgn { ebn0_db } => write!(f, "awgn:{ebn0_db}"),
        }
    }
}

impl TryFrom<String> for ChannelSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ChannelSpec> for String {
    fn from(c: ChannelSpec) -> String {
        c.to_string()
    }
}
