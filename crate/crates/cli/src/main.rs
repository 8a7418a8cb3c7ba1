use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use polar_isc::construction::{
    bhattacharyya_awgn, bhattacharyya_bec, gaussian_approx_awgn, monte_carlo_pe, select_information_set,
};
use polar_isc::sim::{self, ChannelKind, Format, RunMeta};
use polar_isc::{
    ChannelSpec, CodeConfig, DecoderSpec, Execution, ExperimentSpec, Observation, SimRecord, StoppingRule,
};
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "polar", version, about = "Polar code construction, simulation and tree-search decoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Choose an information set and write the code as JSON.
    Construct(ConstructArgs),
    /// BLER and complexity sweep.
    Simulate(SimArgs),
    /// BLER sweep with an SCL decoder plus the ML lower bound.
    Mlbound(SimArgs),
    /// Decode one observation and print the estimated source block in hex.
    Decode(DecodeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum MethodArg {
    Bhattacharyya,
    Ga,
    Mc,
}

#[derive(Args)]
struct ConstructArgs {
    /// Design channel, `bec:<epsilon>` or `awgn:<ebn0_db>`.
    #[arg(long)]
    channel: ChannelSpec,
    /// Block length exponent: N = 2^n.
    #[arg(long)]
    n: u32,
    #[arg(long, conflicts_with = "k", required_unless_present = "k")]
    rate: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// Defaults to bhattacharyya on BEC and ga on AWGN.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, default_value_t = 100_000)]
    mc_trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    /// Code file written by `construct`.
    #[arg(long)]
    code: PathBuf,
    /// `sc`, `scl:L=32`, `scs:L=32,D=1024` or `sch:L=32,D=256`, optionally
    /// with `,tau=<v>` or `,ptol=<v>`.
    #[arg(long)]
    decoder: Option<DecoderSpec>,
    /// E_b/N_0 grid in dB, `start:stop:step`.
    #[arg(long, conflicts_with = "epsilon", required_unless_present = "epsilon")]
    snr: Option<String>,
    /// BEC erasure grid, `start:stop:step`.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long, default_value_t = StoppingRule::default().min_blocks)]
    min_blocks: u64,
    #[arg(long, default_value_t = StoppingRule::default().min_block_errors)]
    min_errors: u64,
    #[arg(long, default_value_t = StoppingRule::default().max_blocks)]
    max_blocks: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to the extension of `--out`, else csv.
    #[arg(long)]
    format: Option<String>,
    /// Run blocks on one thread (results are identical either way).
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    code: PathBuf,
    /// JSON file `{"channel": "awgn:2.0", "y": [...]}`; for BEC use 0, 1 or
    /// null (erasure) entries.
    #[arg(long)]
    obs: PathBuf,
    #[arg(long, default_value = "sc")]
    decoder: DecoderSpec,
    /// Also print the metric and operation count.
    #[arg(long)]
    verbose: bool,
}

#[derive(Deserialize)]
struct ObservationFile {
    channel: ChannelSpec,
    y: Vec<Option<f64>>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Construct(args) => construct(args),
        Command::Simulate(args) => simulate(args, false),
        Command::Mlbound(args) => simulate(args, true),
        Command::Decode(args) => decode(args),
    }
}

fn construct(args: ConstructArgs) -> Result<()> {
    if args.n > 24 {
        bail!("n = {} is too large (at most 24)", args.n);
    }
    let len = 1usize << args.n;
    let k = match (args.k, args.rate) {
        (Some(k), _) => k,
        (None, Some(rate)) if (0.0..=1.0).contains(&rate) => (rate * len as f64).round() as usize,
        (None, Some(rate)) => bail!("rate {rate} outside [0, 1]"),
        (None, None) => unreachable!("clap requires --rate or --k"),
    };
    if k > len {
        bail!("K = {k} exceeds N = {len}");
    }
    let rate = k as f64 / len as f64;
    let method = args.method.unwrap_or(match args.channel {
        ChannelSpec::Bec { .. } => MethodArg::Bhattacharyya,
        ChannelSpec::Awgn { .. } => MethodArg::Ga,
    });
    // Zero-rate codes still need a finite design noise level.
    let design_rate = if k == 0 { 1.0 / len as f64 } else { rate };
    let profile = match (method, args.channel) {
        (MethodArg::Bhattacharyya, ChannelSpec::Bec { erasure }) => bhattacharyya_bec(erasure, len)?,
        (MethodArg::Bhattacharyya, ChannelSpec::Awgn { ebn0_db }) => bhattacharyya_awgn(ebn0_db, design_rate, len)?,
        (MethodArg::Ga, ChannelSpec::Awgn { ebn0_db }) => gaussian_approx_awgn(ebn0_db, design_rate, len)?,
        (MethodArg::Ga, ChannelSpec::Bec { .. }) => bail!("the Gaussian approximation needs an AWGN channel"),
        (MethodArg::Mc, channel) => {
            let model = channel.model(design_rate)?;
            monte_carlo_pe(&model, channel.param(), len, args.mc_trials, args.seed, Execution::default())?
        }
    };
    let code = select_information_set(&profile, k)?;
    let mut meta = code.construction().cloned().expect("selection records its construction");
    meta.channel = Some(args.channel.to_string());
    meta.design_rate = Some(rate);
    let code = code.with_construction(meta);
    match args.out {
        Some(path) => code.save(&path).with_context(|| format!("writing {}", path.display()))?,
        None => println!("{}", code.to_json()?),
    }
    Ok(())
}

fn output_format(args: &SimArgs) -> Result<Format> {
    let name = match &args.format {
        Some(f) => f.clone(),
        None => match args.out.extension().and_then(|e| e.to_str()) {
            Some("json") => "json".into(),
            _ => "csv".into(),
        },
    };
    Ok(name.parse()?)
}

fn simulate(args: SimArgs, ml_bound: bool) -> Result<()> {
    let code = load_code(&args.code)?;
    let (channel, grid) = match (&args.snr, &args.epsilon) {
        (Some(g), _) => (ChannelKind::Awgn, sim::parse_grid(g)?),
        (None, Some(g)) => (ChannelKind::Bec, sim::parse_grid(g)?),
        (None, None) => unreachable!("clap requires --snr or --epsilon"),
    };
    let default_decoder = if ml_bound { "scl:L=32" } else { "sc" };
    let decoder = args.decoder.unwrap_or_else(|| default_decoder.parse().expect("valid default"));
    let format = output_format(&args)?;
    let spec = ExperimentSpec::new(code, channel, grid, decoder)
        .with_stopping(StoppingRule {
            min_blocks: args.min_blocks,
            min_block_errors: args.min_errors,
            max_blocks: args.max_blocks,
        })
        .with_seed(args.seed)
        .with_execution(if args.sequential { Execution::Sequential } else { Execution::default() });
    let records = if ml_bound { sim::run_ml_bound(&spec)? } else { sim::run_bler_sweep(&spec)? };
    let meta = RunMeta::new(&spec, Some(args.code.display().to_string()), ml_bound);
    sim::export_results(&records, &args.out, format, Some(&meta))
        .with_context(|| format!("writing {}", args.out.display()))?;
    for r in &records {
        eprintln!("{}", summary(r));
    }
    Ok(())
}

fn summary(r: &SimRecord) -> String {
    let mut line = format!(
        "{:>6}  blocks {:>8}  errors {:>6}  BLER {:.3e} ± {:.1e}  ops {:.1}",
        r.snr_db, r.blocks, r.block_errors, r.bler, r.bler_ci95, r.avg_metric_ops
    );
    if let Some(ml) = r.ml_lower_bound() {
        line.push_str(&format!("  ML >= {ml:.3e}"));
    }
    line
}

fn load_code(path: &Path) -> Result<CodeConfig> {
    CodeConfig::load(path).with_context(|| format!("reading code file {}", path.display()))
}

fn decode(args: DecodeArgs) -> Result<()> {
    let code = load_code(&args.code)?;
    let text = fs::read_to_string(&args.obs).with_context(|| format!("reading {}", args.obs.display()))?;
    let obs: ObservationFile = serde_json::from_str(&text).context("parsing observation file")?;
    if obs.y.len() != code.len() {
        bail!("observation has {} symbols, the code has N = {}", obs.y.len(), code.len());
    }
    let observation = match obs.channel {
        ChannelSpec::Awgn { .. } => Observation::Awgn(
            obs.y.iter().map(|v| v.context("AWGN observations cannot contain null")).collect::<Result<_>>()?,
        ),
        ChannelSpec::Bec { .. } => Observation::Bec(
            obs.y
                .iter()
                .map(|v| match v {
                    None => Ok(None),
                    Some(b) if *b == 0.0 || *b == 1.0 => Ok(Some(*b as u8)),
                    Some(b) => bail!("BEC symbol {b} is not 0, 1 or null"),
                })
                .collect::<Result<_>>()?,
        ),
    };
    let model = obs.channel.model(code.rate().max(1.0 / code.len() as f64))?;
    let apps = model.initial_log_app(&observation)?;
    let outcome = args.decoder.resolve(code.k())?.decode(&code, &apps)?;
    println!("{}", to_hex(&outcome.bits));
    if args.verbose {
        eprintln!("metric {}  metric_ops {}", outcome.metric, outcome.metric_ops);
    }
    Ok(())
}

/// Packs bits MSB-first into bytes, zero-padding the last byte.
fn to_hex(bits: &[u8]) -> String {
    bits.chunks(8)
        .map(|chunk| {
            let byte = chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << (7 - i)));
            format!("{byte:02x}")
        })
        .collect()
}
