//! Seeded Monte-Carlo BLER and complexity sweeps.
//!
//! Each block of grid point `g` draws its information bits and channel noise
//! from the stream `(seed, g, block)`, so a sweep is a pure function of its
//! [`ExperimentSpec`] no matter how blocks are scheduled. Blocks run in batches
//! (in parallel with the `parallel` feature) and are then folded in index
//! order; a grid point stops at the first block index where the stopping rule
//! holds.
//!
//! A block is in error when the decoded information bits differ from the
//! transmitted ones.

use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelModel, ChannelSpec};
use crate::code::{encode, CodeConfig};
use crate::decoders::{Algorithm, DecoderConfig, DecoderSpec};
use crate::exec::{map_indexed, Execution};
use crate::metrics::MetricEngine;
use crate::{rng, Error, Result};

/// Stop once `min_blocks` blocks and `min_block_errors` errors have been
/// seen, or unconditionally at `max_blocks`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub min_blocks: u64,
    pub min_block_errors: u64,
    pub max_blocks: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self { min_blocks: 10_000, min_block_errors: 100, max_blocks: 1_000_000 }
    }
}

impl StoppingRule {
    /// Exactly `blocks` blocks.
    pub fn fixed(blocks: u64) -> Self {
        Self { min_blocks: blocks, min_block_errors: 0, max_blocks: blocks }
    }

    fn validate(&self) -> Result<()> {
        if self.min_blocks == 0 || self.max_blocks < self.min_blocks {
            return Err(Error::InvalidParameter(format!(
                "stopping rule needs 1 <= min_blocks <= max_blocks (got {} and {})",
                self.min_blocks, self.max_blocks
            )));
        }
        Ok(())
    }

    fn done(&self, blocks: u64, errors: u64) -> bool {
        blocks >= self.max_blocks || (blocks >= self.min_blocks && errors >= self.min_block_errors)
    }
}

/// Which channel the grid values parameterize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    /// Grid values are `E_b/N_0` in dB.
    Awgn,
    /// Grid values are erasure probabilities.
    Bec,
}

impl ChannelKind {
    pub fn at(self, value: f64) -> ChannelSpec {
        match self {
            ChannelKind::Awgn => ChannelSpec::Awgn { ebn0_db: value },
            ChannelKind::Bec => ChannelSpec::Bec { erasure: value },
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub code: CodeConfig,
    pub channel: ChannelKind,
    pub grid: Vec<f64>,
    pub decoder: DecoderSpec,
    pub stopping: StoppingRule,
    pub seed: u64,
    pub execution: Execution,
}

impl ExperimentSpec {
    pub fn new(code: CodeConfig, channel: ChannelKind, grid: Vec<f64>, decoder: DecoderSpec) -> Self {
        Self {
            code,
            channel,
            grid,
            decoder,
            stopping: StoppingRule::default(),
            seed: 0,
            execution: Execution::default(),
        }
    }

    pub fn with_stopping(mut self, stopping: StoppingRule) -> Self {
        self.stopping = stopping;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    fn validate(&self) -> Result<DecoderConfig> {
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        self.stopping.validate()?;
        for &g in &self.grid {
            self.channel.at(g).model(self.code.rate().max(f64::MIN_POSITIVE))?;
        }
        self.decoder.resolve(self.code.k())
    }
}

/// Inclusive `start:stop:step` grid, or a single value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("grid `{text}`: expected start:stop:step or a single value"));
    let parts: Vec<f64> = text.split(':').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    match parts[..] {
        [single] => Ok(vec![single]),
        [start, stop, step] if step > 0.0 && stop >= start => {
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(bad()),
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    /// `E_b/N_0` in dB, or ε for BEC sweeps.
    pub snr_db: f64,
    pub blocks: u64,
    pub block_errors: u64,
    pub bler: f64,
    /// Half-width of the Wilson 95% interval.
    pub bler_ci95: f64,
    pub avg_metric_ops: f64,
    pub avg_pruned_paths: f64,
    #[serde(rename = "ml_lower_count")]
    pub ml_error_lower_count: Option<u64>,
    pub seed: u64,
}

const Z95: f64 = 1.959963984540054;

/// Wilson score interval at 95%.
pub fn wilson_interval(errors: u64, blocks: u64) -> (f64, f64) {
    if blocks == 0 {
        return (0.0, 1.0);
    }
    let n = blocks as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

impl SimRecord {
    pub fn wilson_interval(&self) -> (f64, f64) {
        wilson_interval(self.block_errors, self.blocks)
    }

    /// Lower bound on the ML block error rate, when counted.
    pub fn ml_lower_bound(&self) -> Option<f64> {
        self.ml_error_lower_count.map(|c| c as f64 / self.blocks as f64)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockResult {
    error: bool,
    ops: u64,
    pruned: u64,
    ml_lower: bool,
}

fn simulate_block(
    code: &CodeConfig,
    channel: &ChannelModel,
    decoder: &DecoderConfig,
    seed: u64,
    grid_index: usize,
    block: u64,
    count_ml: bool,
) -> Result<BlockResult> {
    let mut rng = rng::block_rng(seed, grid_index, block);
    let info: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..2)).collect();
    let u = code.source_block(&info)?;
    let x = encode(&u, code)?;
    let y = channel.transmit(&x, &mut rng);
    let apps = channel.initial_log_app(&y)?;
    let outcome = decoder.decode(code, &apps)?;
    let error = code.info_bits(&outcome.bits) != info;
    let ml_lower = if count_ml && error {
        let transmitted = MetricEngine::new(code, &apps, decoder.mode)?.score(&u)?;
        outcome.metric > transmitted
    } else {
        false
    };
    Ok(BlockResult { error, ops: outcome.metric_ops, pruned: outcome.pruned_paths, ml_lower })
}

fn run_point(spec: &ExperimentSpec, decoder: &DecoderConfig, grid_index: usize, count_ml: bool) -> Result<SimRecord> {
    let value = spec.grid[grid_index];
    let channel = spec.channel.at(value).model(spec.code.rate().max(f64::MIN_POSITIVE))?;
    let rule = spec.stopping;
    let step = crate::exec::batch_hint(spec.execution);
    let (mut blocks, mut errors, mut ops, mut pruned, mut ml) = (0u64, 0u64, 0u64, 0u64, 0u64);
    let mut next = 0u64;
    'batches: while next < rule.max_blocks {
        let size = if next == 0 { rule.min_blocks } else { step }.min(rule.max_blocks - next);
        let results = map_indexed(next..next + size, spec.execution, |block| {
            simulate_block(&spec.code, &channel, decoder, spec.seed, grid_index, block, count_ml)
        });
        for result in results {
            let r = result?;
            blocks += 1;
            errors += u64::from(r.error);
            ops += r.ops;
            pruned += r.pruned;
            ml += u64::from(r.ml_lower);
            if rule.done(blocks, errors) {
                break 'batches;
            }
        }
        next += size;
    }
    let (lo, hi) = wilson_interval(errors, blocks);
    Ok(SimRecord {
        snr_db: value,
        blocks,
        block_errors: errors,
        bler: errors as f64 / blocks as f64,
        bler_ci95: (hi - lo) / 2.0,
        avg_metric_ops: ops as f64 / blocks as f64,
        avg_pruned_paths: pruned as f64 / blocks as f64,
        ml_error_lower_count: count_ml.then_some(ml),
        seed: spec.seed,
    })
}

/// BLER and average metric operations at every grid point.
pub fn run_bler_sweep(spec: &ExperimentSpec) -> Result<Vec<SimRecord>> {
    let decoder = spec.validate()?;
    (0..spec.grid.len()).map(|g| run_point(spec, &decoder, g, false)).collect()
}

/// Like [`run_bler_sweep`] with an SCL decoder, additionally counting blocks
/// whose (wrong) decision is strictly more likely than the transmitted block.
/// Those blocks would be ML errors as well, so the count over the number of
/// blocks lower-bounds the ML block error rate.
pub fn run_ml_bound(spec: &ExperimentSpec) -> Result<Vec<SimRecord>> {
    let decoder = spec.validate()?;
    if !matches!(decoder.algorithm, Algorithm::Scl { .. }) {
        return Err(Error::InvalidParameter("the ML lower bound needs an SCL decoder".into()));
    }
    (0..spec.grid.len()).map(|g| run_point(spec, &decoder, g, true)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("unknown format `{other}` (csv or json)"))),
        }
    }
}

pub const CSV_HEADER: [&str; 9] = [
    "snr_db",
    "blocks",
    "block_errors",
    "bler",
    "bler_ci95",
    "avg_metric_ops",
    "avg_pruned_paths",
    "ml_lower_count",
    "seed",
];

/// Everything needed to reproduce a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub code_file: Option<String>,
    pub n: usize,
    pub k: usize,
    pub construction: Option<String>,
    pub construction_param: Option<f64>,
    pub channel: ChannelKind,
    pub noise_variance: String,
    pub decoder: DecoderSpec,
    pub stopping: StoppingRule,
    pub seed: u64,
    pub ml_bound: bool,
}

impl RunMeta {
    pub fn new(spec: &ExperimentSpec, code_file: Option<String>, ml_bound: bool) -> Self {
        let construction = spec.code.construction();
        Self {
            code_file,
            n: spec.code.len(),
            k: spec.code.k(),
            construction: construction.map(|c| c.method.clone()),
            construction_param: construction.map(|c| c.channel_param),
            channel: spec.channel,
            noise_variance: match spec.channel {
                ChannelKind::Awgn => "sigma^2 = 1 / (2 * R * 10^(EbN0_dB / 10))".into(),
                ChannelKind::Bec => "n/a".into(),
            },
            decoder: spec.decoder,
            stopping: spec.stopping,
            seed: spec.seed,
            ml_bound,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonResults {
    meta: Option<RunMeta>,
    records: Vec<SimRecord>,
}

/// Writes records as CSV (with a `<path>.meta.json` sidecar when `meta` is
/// given) or as a single JSON document.
pub fn export_results(
    records: &[SimRecord],
    path: impl AsRef<Path>,
    format: Format,
    meta: Option<&RunMeta>,
) -> Result<()> {
    let path = path.as_ref();
    match format {
        Format::Csv => {
            let mut writer = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
            writer.write_record(CSV_HEADER)?;
            for record in records {
                writer.serialize(record)?;
            }
            writer.flush()?;
            if let Some(meta) = meta {
                let mut sidecar = path.as_os_str().to_owned();
                sidecar.push(".meta.json");
                std::fs::write(sidecar, serde_json::to_string_pretty(meta)? + "\n")?;
            }
        }
        Format::Json => {
            let doc = JsonResults { meta: meta.cloned(), records: records.to_vec() };
            std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
        }
    }
    Ok(())
}

/// Reads records back from a JSON results file.
pub fn read_json_results(path: impl AsRef<Path>) -> Result<Vec<SimRecord>> {
    let doc: JsonResults = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    Ok(doc.records)
}
