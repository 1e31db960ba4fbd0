use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polar_sym::channel::{awgn_theta, ChannelModel};
use polar_sym::codec::{source_decode, source_encode, ChannelCode, DecoderKind, Engine, OuterParity};
use polar_sym::construction::{construct_bec, construct_monte_carlo, ConstructionConfig, Target};
use polar_sym::{BinaryVector, CodeSpec, Theta};
use polar_harness::report::{to_csv, to_json, ResultRow};
use polar_harness::{bench_scaling, design_epsilon, simulate, BenchConfig, BenchRow, HarnessError, Mode, Result, SimConfig};

/// Polar codes under the symmetric θ = P(0) − P(1) parametrization.
///
/// Frame-error criteria used by `simulate`:
///   source         x̂ ≠ x (the decoder must rebuild the whole source block)
///   systematic     x̂ ≠ x (the transmitted channel input)
///   nonsystematic  û restricted to the unfrozen set differs from u there
#[derive(Parser, Debug)]
#[command(name = "polar", version, verbatim_doc_comment)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a frozen set and write it as a spec file.
    Construct(ConstructArgs),
    /// Encode one block.
    Encode(EncodeArgs),
    /// Decode one block.
    Decode(DecodeArgs),
    /// Monte-Carlo FER/BER measurement.
    Simulate(SimulateArgs),
    /// Decode-time scaling over n and L.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DecoderName {
    Sc,
    Scl,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeName {
    Source,
    Systematic,
    Nonsystematic,
}

impl From<ModeName> for Mode {
    fn from(m: ModeName) -> Mode {
        match m {
            ModeName::Source => Mode::Source,
            ModeName::Systematic => Mode::Systematic,
            ModeName::Nonsystematic => Mode::Nonsystematic,
        }
    }
}

#[derive(Args, Debug)]
struct DecoderArgs {
    #[arg(long, value_enum, default_value = "sc")]
    decoder: DecoderName,
    /// List size for `--decoder scl`.
    #[arg(long = "list-size", default_value_t = 8)]
    list_size: usize,
    /// Division-free ternary θ updates (priors must be −1, 0 or 1).
    #[arg(long)]
    ternary: bool,
    /// Outer CRC as WIDTH:GENERATOR, e.g. 8:0x07.
    #[arg(long)]
    crc: Option<OuterParity>,
}

impl DecoderArgs {
    fn kind(&self) -> DecoderKind {
        match self.decoder {
            DecoderName::Sc => DecoderKind::Sc { ternary: self.ternary },
            DecoderName::Scl => DecoderKind::Scl {
                list_size: self.list_size,
                ternary: self.ternary,
            },
        }
    }
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    n: usize,
    /// Fraction of unfrozen indices.
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    /// Keep instead every index with Z ≤ 2^(−2^(nβ)) (BEC only).
    #[arg(long)]
    beta: Option<f64>,
    /// bec:EPS is constructed exactly; other channels by Monte-Carlo.
    #[arg(long, default_value = "bec:0.5")]
    channel: ChannelModel,
    /// Monte-Carlo trials.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum, default_value = "nonsystematic")]
    mode: ModeName,
    /// Bits to encode: x for source mode, the payload otherwise.
    #[arg(long)]
    input: String,
    /// Frozen values u at the frozen set (channel modes; default all zero).
    #[arg(long)]
    frozen: Option<String>,
    /// Outer CRC as WIDTH:GENERATOR.
    #[arg(long)]
    crc: Option<OuterParity>,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum, default_value = "nonsystematic")]
    mode: ModeName,
    /// Comma-separated priors θ, one per symbol.
    #[arg(long, conflicts_with = "received")]
    priors: Option<String>,
    /// Channel outputs: bits for bsc, 0/1/e for bec, comma-separated reals for awgn.
    #[arg(long, requires = "channel")]
    received: Option<String>,
    #[arg(long)]
    channel: Option<ChannelModel>,
    /// Source mode: the codeword u at the frozen set.
    #[arg(long)]
    codeword: Option<String>,
    /// Source mode: CRC of x sent with the codeword.
    #[arg(long)]
    parity: Option<String>,
    /// Channel modes: frozen values (default all zero).
    #[arg(long)]
    frozen: Option<String>,
    #[command(flatten)]
    decoder: DecoderArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Spec file; otherwise a BEC construction at the channel's
    /// Bhattacharyya parameter from --n and --rate.
    #[arg(long, conflicts_with = "n")]
    spec: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    #[arg(long, default_value = "bec:0.3")]
    channel: ChannelModel,
    #[arg(long, value_enum, default_value = "nonsystematic")]
    mode: ModeName,
    #[command(flatten)]
    decoder: DecoderArgs,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fill avg_decode_us (makes the output run-dependent).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long = "n-min", default_value_t = 4)]
    n_min: usize,
    #[arg(long = "n-max", default_value_t = 12)]
    n_max: usize,
    /// Comma-separated SCL list sizes.
    #[arg(long = "list-sizes", value_delimiter = ',', default_value = "2,4,8")]
    list_sizes: Vec<usize>,
    #[arg(long, default_value = "bec:0.3")]
    channel: ChannelModel,
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    #[arg(long, default_value_t = 32)]
    frames: usize,
    #[arg(long, default_value_t = 5)]
    passes: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn config(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn parse_bits(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(config(format!("{other:?} is not a bit"))),
        })
        .collect()
}

fn format_bits(bits: impl IntoIterator<Item = u8>) -> String {
    bits.into_iter().map(|b| char::from(b'0' + b)).collect()
}

fn read_spec(path: &Path) -> Result<CodeSpec> {
    let file = File::open(path).map_err(|source| HarnessError::File {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(CodeSpec::read_from(BufReader::new(file))?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| HarnessError::File {
            path: path.to_path_buf(),
            source,
        }),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn frozen_or_zero(text: Option<&str>, spec: &CodeSpec) -> Result<Vec<u8>> {
    match text {
        Some(t) => parse_bits(t),
        None => Ok(vec![0; spec.frozen().len()]),
    }
}

fn priors_from(args: &DecodeArgs, len: usize) -> Result<Vec<Theta>> {
    let priors: Vec<Theta> = if let Some(text) = &args.priors {
        text.split(',')
            .map(|v| {
                let v: f64 = v.trim().parse().map_err(|_| config(format!("bad prior {v:?}")))?;
                Ok(Theta::new(v)?)
            })
            .collect::<Result<_>>()?
    } else if let (Some(text), Some(channel)) = (&args.received, &args.channel) {
        match *channel {
            ChannelModel::Bsc { p } => parse_bits(text)?
                .into_iter()
                .map(|y| Ok(Theta::new(if y == 0 { 1.0 - 2.0 * p } else { 2.0 * p - 1.0 })?))
                .collect::<Result<_>>()?,
            ChannelModel::Bec { .. } => text
                .chars()
                .filter(|c| !c.is_whitespace() && *c != ',')
                .map(|c| match c {
                    '0' => Ok(Theta::ONE),
                    '1' => Ok(Theta::MINUS_ONE),
                    'e' | 'E' | '?' => Ok(Theta::ZERO),
                    other => Err(config(format!("{other:?} is not a BEC output"))),
                })
                .collect::<Result<_>>()?,
            ChannelModel::BiAwgn { sigma } => text
                .split(',')
                .map(|v| {
                    let y: f64 = v.trim().parse().map_err(|_| config(format!("bad sample {v:?}")))?;
                    Ok(awgn_theta(y, sigma))
                })
                .collect::<Result<_>>()?,
        }
    } else {
        return Err(config("decode needs --priors or --received with --channel"));
    };
    if priors.len() != len {
        return Err(config(format!("expected {len} priors, got {}", priors.len())));
    }
    Ok(priors)
}

fn run_construct(a: ConstructArgs) -> Result<()> {
    let spec = match (a.channel, a.beta) {
        (ChannelModel::Bec { epsilon }, Some(beta)) => construct_bec(a.n, epsilon, Target::Threshold { beta })?,
        (ChannelModel::Bec { epsilon }, None) => construct_bec(a.n, epsilon, Target::Rate(a.rate))?,
        (_, Some(_)) => return Err(config("--beta is only available for bec channels")),
        (channel, None) => construct_monte_carlo(&ConstructionConfig {
            n: a.n,
            rate: a.rate,
            channel,
            trials: a.trials,
            seed: a.seed,
        })?,
    };
    emit(a.out.as_deref(), &spec.to_text())
}

fn run_encode(a: EncodeArgs) -> Result<()> {
    let spec = read_spec(&a.spec)?;
    let input = parse_bits(&a.input)?;
    let text = match a.mode {
        ModeName::Source => {
            let x = BinaryVector::with_depth(spec.n(), &input)?;
            let mut text = format_bits(source_encode(&spec, &x)?);
            text.push('\n');
            if let Some(crc) = a.crc {
                text.push_str(&format_bits(crc.parity_bits(&input)));
                text.push('\n');
            }
            text
        }
        mode => {
            let code = ChannelCode::new(spec.clone(), frozen_or_zero(a.frozen.as_deref(), &spec)?, a.crc)?;
            let x = if mode == ModeName::Systematic {
                code.encode_systematic(&input)?
            } else {
                code.encode_nonsystematic(&input)?
            };
            format!("{}\n", format_bits(x.iter()))
        }
    };
    emit(None, &text)
}

fn run_decode(a: DecodeArgs) -> Result<()> {
    let spec = read_spec(&a.spec)?;
    let priors = priors_from(&a, spec.block_len())?;
    let mut engine = Engine::new(&spec, a.decoder.kind())?;
    let (bits, parity_failed) = match a.mode {
        ModeName::Source => {
            let codeword = parse_bits(a.codeword.as_deref().ok_or_else(|| config("source mode needs --codeword"))?)?;
            let parity = a.parity.as_deref().map(parse_bits).transpose()?;
            let check = match (&a.decoder.crc, &parity) {
                (Some(crc), Some(s)) => Some((crc, s.as_slice())),
                (None, None) => None,
                _ => return Err(config("--crc and --parity go together")),
            };
            let d = source_decode(&mut engine, &codeword, &priors, check)?;
            (d.result.x_hat.to_vec(), d.parity_failed)
        }
        mode => {
            let code = ChannelCode::new(
                spec.clone(),
                frozen_or_zero(a.frozen.as_deref(), &spec)?,
                a.decoder.crc,
            )?;
            let (payload, d) = if mode == ModeName::Systematic {
                code.decode_systematic(&mut engine, &priors)?
            } else {
                code.decode_nonsystematic(&mut engine, &priors)?
            };
            (payload, d.parity_failed)
        }
    };
    if parity_failed {
        eprintln!("warning: no candidate satisfied the outer parity; returning the most likely one");
    }
    emit(None, &format!("{}\n", format_bits(bits)))
}

fn run_simulate(a: SimulateArgs) -> Result<()> {
    let spec = match (&a.spec, a.n) {
        (Some(path), _) => read_spec(path)?,
        (None, Some(n)) => construct_bec(n, design_epsilon(&a.channel), Target::Rate(a.rate))?,
        (None, None) => return Err(config("simulate needs --spec or --n")),
    };
    let mut cfg = SimConfig::new(spec, a.mode.into(), a.decoder.kind(), a.channel);
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.crc = a.decoder.crc;
    cfg.timing = a.timing;
    let result = simulate(&cfg)?;
    let rows = [ResultRow::new(&cfg, &result)];
    let text = if a.json {
        to_json(&rows)? + "\n"
    } else {
        to_csv(&rows)
    };
    emit(a.out.as_deref(), &text)
}

fn run_bench(a: BenchArgs) -> Result<()> {
    if a.n_min > a.n_max {
        return Err(config("--n-min exceeds --n-max"));
    }
    let cfg = BenchConfig {
        n_values: (a.n_min..=a.n_max).collect(),
        list_sizes: a.list_sizes,
        channel: a.channel,
        rate: a.rate,
        frames: a.frames,
        passes: a.passes,
        seed: a.seed,
    };
    let rows = bench_scaling(&cfg)?;
    let text = if a.json {
        serde_json::to_string_pretty(&rows)? + "\n"
    } else {
        let mut text = format!("{}\n", BenchRow::CSV_HEADER);
        for row in &rows {
            text.push_str(&row.to_csv());
            text.push('\n');
        }
        text
    };
    emit(a.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Construct(a) => run_construct(a),
        Command::Encode(a) => run_encode(a),
        Command::Decode(a) => run_decode(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Bench(a) => run_bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
