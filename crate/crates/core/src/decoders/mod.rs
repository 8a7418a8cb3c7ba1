//! Tree-search decoders: SC, SCL(L), SCS(L, D) and SCH(L, D).
//!
//! All four walk the code tree with the metrics of [`crate::metrics`] and order
//! candidates with [`DecodingPath::search_cmp`](crate::metrics::DecodingPath::search_cmp):
//! metric descending, then length descending, then labels lexicographically
//! ascending. With that single order every decoder is deterministic, and the
//! width-1 and SCH equivalences hold bit for bit.
//!
//! Optional threshold pruning drops an `i`-length path whose metric falls
//! below `a_i − ln τ`, where `a_i` is the best metric seen at level `i` (SCL)
//! or the metric of the first `i`-length path popped (SCS, SCH). Pruning only
//! acts at information positions.

mod list;
mod ml;
mod sc;
mod stack;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::code::CodeConfig;
use crate::metrics::{LogApp, MetricMode};
use crate::{Error, Result};

pub use list::decode_scl;
pub use ml::brute_force_ml;
pub use sc::decode_sc;
pub use stack::{decode_sch, decode_scs};

/// `τ = K·(L − 1) / P_tol`. `L = 1` yields 0, which means "no pruning".
pub fn tau_from_tolerance(k: usize, width: usize, p_tol: f64) -> Result<f64> {
    if p_tol.is_nan() || p_tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("p_tol = {p_tol} must be positive")));
    }
    if width == 0 {
        return Err(Error::InvalidParameter("search width must be at least 1".into()));
    }
    Ok(k as f64 * (width - 1) as f64 / p_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Pruning {
    #[default]
    Disabled,
    /// Probability-ratio threshold `τ ≥ 1`.
    Threshold(f64),
}

impl Pruning {
    /// `τ = ∞` and `τ = 0` both disable pruning.
    pub fn from_tau(tau: f64) -> Result<Self> {
        if tau == 0.0 || tau == f64::INFINITY {
            Ok(Pruning::Disabled)
        } else if (1.0..f64::INFINITY).contains(&tau) {
            Ok(Pruning::Threshold(tau))
        } else {
            Err(Error::InvalidParameter(format!("tau = {tau} must be >= 1, 0 or inf")))
        }
    }

    /// `ln τ`, if pruning is active.
    pub fn log_margin(&self) -> Option<f64> {
        match *self {
            Pruning::Disabled => None,
            Pruning::Threshold(tau) => Some(tau.ln()),
        }
    }

    pub fn tau(&self) -> f64 {
        match *self {
            Pruning::Disabled => f64::INFINITY,
            Pruning::Threshold(tau) => tau,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Sc,
    Scl { width: usize },
    Scs { width: usize, depth: usize },
    Sch { width: usize, depth: usize },
}

impl Algorithm {
    pub fn width(&self) -> usize {
        match *self {
            Algorithm::Sc => 1,
            Algorithm::Scl { width } | Algorithm::Scs { width, .. } | Algorithm::Sch { width, .. } => width,
        }
    }

    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            Algorithm::Sc => Ok(()),
            Algorithm::Scl { width: 0 } => fail("SCL needs L >= 1".into()),
            Algorithm::Scs { width, depth } if width == 0 || depth < 2 => {
                fail(format!("SCS needs L >= 1 and D >= 2 (got L={width}, D={depth})"))
            }
            Algorithm::Sch { width, depth } if width == 0 || depth < 2 * width => {
                fail(format!("SCH needs L >= 1 and D >= 2L (got L={width}, D={depth})"))
            }
            _ => Ok(()),
        }
    }
}

/// Fully resolved decoder settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub algorithm: Algorithm,
    pub pruning: Pruning,
    pub mode: MetricMode,
}

impl DecoderConfig {
    pub fn new(algorithm: Algorithm) -> Result<Self> {
        algorithm.validate()?;
        Ok(Self { algorithm, pruning: Pruning::Disabled, mode: MetricMode::Exact })
    }

    pub fn with_pruning(mut self, pruning: Pruning) -> Self {
        self.pruning = pruning;
        self
    }

    pub fn with_mode(mut self, mode: MetricMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn decode(&self, code: &CodeConfig, apps: &[LogApp]) -> Result<DecodeOutcome> {
        self.algorithm.validate()?;
        match self.algorithm {
            Algorithm::Sc => decode_sc(code, apps, self.mode),
            Algorithm::Scl { width } => decode_scl(code, apps, width, self.pruning, self.mode),
            Algorithm::Scs { width, depth } => decode_scs(code, apps, width, depth, self.pruning, self.mode),
            Algorithm::Sch { width, depth } => decode_sch(code, apps, width, depth, self.pruning, self.mode),
        }
    }
}

/// A surviving list entry of SCL.
#[derive(Debug, Clone, PartialEq)]
pub struct ListEntry {
    pub bits: Vec<u8>,
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Estimated source block `û`, length `N`.
    pub bits: Vec<u8>,
    /// Metric of the decided path.
    pub metric: f64,
    pub metric_ops: u64,
    /// Paths discarded by threshold pruning.
    pub pruned_paths: u64,
    /// `counts[i]` = paths of length `i` expanded (popped); `counts[0]` unused.
    pub counts: Vec<u32>,
    /// Largest number of candidates held at once.
    pub peak_occupancy: usize,
    /// Final SCL list, best first. Empty for the other decoders.
    pub final_list: Vec<ListEntry>,
}

/// Pruning as written in a decoder string, before `K` is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PruningSpec {
    None,
    Tau(f64),
    Tolerance(f64),
}

/// Decoder as written on the command line, e.g. `scl:L=32,ptol=1e-5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderSpec {
    pub algorithm: Algorithm,
    pub pruning: PruningSpec,
    pub mode: MetricMode,
}

impl DecoderSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        Self { algorithm, pruning: PruningSpec::None, mode: MetricMode::Exact }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.pruning = PruningSpec::Tau(tau);
        self
    }

    pub fn with_tolerance(mut self, p_tol: f64) -> Self {
        self.pruning = PruningSpec::Tolerance(p_tol);
        self
    }

    /// Resolves `ptol` against the information length `k`.
    pub fn resolve(&self, k: usize) -> Result<DecoderConfig> {
        let pruning = match self.pruning {
            PruningSpec::None => Pruning::Disabled,
            PruningSpec::Tau(tau) => Pruning::from_tau(tau)?,
            PruningSpec::Tolerance(p) => Pruning::from_tau(tau_from_tolerance(k, self.algorithm.width(), p)?)?,
        };
        Ok(DecoderConfig::new(self.algorithm)?.with_pruning(pruning).with_mode(self.mode))
    }
}

impl FromStr for DecoderSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("decoder `{s}`: {msg}"));
        let (name, params) = match s.split_once(':') {
            Some((name, params)) => (name.trim(), params),
            None => (s.trim(), ""),
        };
        let (mut width, mut depth, mut tau, mut ptol) = (None, None, None, None);
        let mut mode = MetricMode::Exact;
        for item in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let value = value.trim();
            let number = || value.parse::<f64>().map_err(|_| bad(&format!("bad value for {key}")));
            let count = || value.parse::<usize>().map_err(|_| bad(&format!("bad value for {key}")));
            match key.trim() {
                "L" => width = Some(count()?),
                "D" => depth = Some(count()?),
                "tau" => tau = Some(number()?),
                "ptol" => ptol = Some(number()?),
                "metric" => {
                    mode = match value {
                        "exact" => MetricMode::Exact,
                        "maxlog" => MetricMode::MaxLog,
                        _ => return Err(bad("metric must be exact or maxlog")),
                    }
                }
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        let need = |v: Option<usize>, key: &str| v.ok_or_else(|| bad(&format!("missing {key}=")));
        let algorithm = match name {
            "sc" => {
                if width.is_some() || depth.is_some() {
                    return Err(bad("sc takes no L or D"));
                }
                Algorithm::Sc
            }
            "scl" => {
                if depth.is_some() {
                    return Err(bad("scl takes no D"));
                }
                Algorithm::Scl { width: need(width, "L")? }
            }
            "scs" => Algorithm::Scs { width: need(width, "L")?, depth: need(depth, "D")? },
            "sch" => Algorithm::Sch { width: need(width, "L")?, depth: need(depth, "D")? },
            other => return Err(bad(&format!("unknown algorithm `{other}`"))),
        };
        algorithm.validate()?;
        let pruning = match (tau, ptol) {
            (Some(_), Some(_)) => return Err(bad("tau and ptol are mutually exclusive")),
            (Some(t), None) => {
                Pruning::from_tau(t)?;
                PruningSpec::Tau(t)
            }
            (None, Some(p)) => {
                if p.is_nan() || p <= 0.0 {
                    return Err(bad("ptol must be positive"));
                }
                PruningSpec::Tolerance(p)
            }
            (None, None) => PruningSpec::None,
        };
        Ok(Self { algorithm, pruning, mode })
    }
}

impl fmt::Display for DecoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.algorithm {
            Algorithm::Sc => write!(f, "sc")?,
            Algorithm::Scl { width } => write!(f, "scl:L={width}")?,
            Algorithm::Scs { width, depth } => write!(f, "scs:L={width},D={depth}")?,
            Algorithm::Sch { width, depth } => write!(f, "sch:L={width},D={depth}")?,
        }
        let sep = if self.algorithm == Algorithm::Sc { ":" } else { "," };
        let mut sep = sep;
        match self.pruning {
            PruningSpec::None => {}
            PruningSpec::Tau(t) => {
                write!(f, "{sep}tau={t}")?;
                sep = ",";
            }
            PruningSpec::Tolerance(p) => {
                write!(f, "{sep}ptol={p}")?;
                sep = ",";
            }
        }
        if self.mode == MetricMode::MaxLog {
            write!(f, "{sep}metric=maxlog")?;
        }
        Ok(())
    }
}

impl Serialize for DecoderSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DecoderSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
