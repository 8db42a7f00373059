//! `polar-wiretap`: construct, encode, decode and run seeded experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use polar_wiretap::channels::{make_channel, ChannelSpec, DiscreteChannel};
use polar_wiretap::codec::{sc_decode, wiretap_encode, wiretap_encode_with};
use polar_wiretap::construction::WiretapCodeSpec;
use polar_wiretap::gf2::BitVector;
use polar_wiretap::rng::{label_id, StreamKey};
use polar_wiretap::sim::{self, construct_code, ExperimentConfig, ExperimentKind};
use polar_wiretap::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_SKIPPED: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "polar-wiretap",
    version,
    about = "Polar coding for binary symmetric wiretap channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Select the information, noisy and frozen sets and write one code file per blocklength.
    Construct(Common),
    /// Encode a message with a code file.
    Encode(CodecArgs),
    /// Decode received symbols with a code file.
    Decode(CodecArgs),
    /// Frame error rates of the legitimate decoder.
    Fer(Common),
    /// Equivocation, informed-decoder error and the Fano bound.
    Secrecy(Common),
    /// Exhaustive per-index mutual information and classification scan.
    Conjecture(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Blocklengths, replacing the configured list.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, env = "POLAR_WIRETAP_OUT_DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CodecArgs {
    #[command(flatten)]
    common: Common,
    /// Code file written by `construct`.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Message bits for `encode`.
    #[arg(long)]
    message: Option<String>,
    /// Noisy-set bits for `encode`; drawn from the seed when absent.
    #[arg(long)]
    b_star: Option<String>,
    /// Received symbols for `decode`, comma separated.
    #[arg(long)]
    received: Option<String>,
    /// Channel model for `decode`, e.g. `bec:0.3`, `bsc:0.1` or `noiseless`.
    #[arg(long)]
    channel: Option<String>,
}

/// Error raised for bad user input; maps to exit code 2.
#[derive(Debug)]
struct Validation(String);

impl std::fmt::Display for Validation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Validation {}

fn validation(e: Error) -> anyhow::Error {
    match e {
        Error::Io(io) => anyhow::Error::new(io),
        other => anyhow::Error::new(Validation(other.to_string())),
    }
}

fn load_config(c: &Common) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::load(path)
            .map_err(|e| Validation(format!("reading {}: {e}", path.display())))?,
        None => ExperimentConfig::default(),
    };
    if !c.n.is_empty() {
        cfg.n = c.n.clone();
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(t) = c.trials {
        cfg.trials = t;
    }
    if let Some(w) = c.workers {
        cfg.workers = w;
    }
    Ok(cfg)
}

fn output_dir(c: &Common, cfg: &ExperimentConfig) -> PathBuf {
    c.out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run_experiment(kind: ExperimentKind, c: &Common) -> anyhow::Result<u8> {
    let cfg = load_config(c)?;
    if let Some(k) = cfg.experiment.filter(|&k| k != kind) {
        return Err(validation(Error::Config(format!(
            "configuration is for the {} experiment",
            k.label()
        ))));
    }
    let report = sim::run(kind, &cfg).map_err(validation)?;
    let dir = output_dir(c, &cfg);
    let csv = dir.join(
        cfg.output
            .csv
            .clone()
            .unwrap_or_else(|| format!("{}.csv", kind.label())),
    );
    let json = dir.join(
        cfg.output
            .json
            .clone()
            .unwrap_or_else(|| format!("{}.json", kind.label())),
    );
    report.write(&csv, &json).map_err(validation)?;
    eprintln!("wrote {} and {}", csv.display(), json.display());
    for p in report
        .points
        .iter()
        .filter_map(|p| p.skipped.as_ref().map(|r| (p.n, r)))
    {
        eprintln!("skipped n = {}: {}", p.0, p.1);
    }
    for s in &report.conjecture_skipped {
        eprintln!("skipped {s}");
    }
    Ok(if report.skipped_points() > 0 {
        EXIT_SKIPPED
    } else {
        0
    })
}

fn construct(c: &Common) -> anyhow::Result<u8> {
    let mut cfg = load_config(c)?;
    if let Some(t) = c.trials {
        cfg.construction_trials = t;
    }
    let ch = cfg.validate(ExperimentKind::Fer).map_err(validation)?;
    let dir = output_dir(c, &cfg);
    std::fs::create_dir_all(&dir)?;
    let mut skipped = false;
    for &n in &cfg.n {
        let stream = StreamKey::root(cfg.seed)
            .child(label_id("construct"))
            .child(n as u64);
        match construct_code(&cfg, &ch, n, stream) {
            Ok(code) => {
                let path = dir.join(format!("code_n{n}.toml"));
                std::fs::write(&path, code.spec.to_toml().map_err(validation)?)?;
                println!(
                    "n = {n}: |A| = {}, |N| = {}, |B| = {}, union bound {:.3e} -> {}",
                    code.spec.info_set().len(),
                    code.spec.noisy_set().len(),
                    code.spec.frozen_set().len(),
                    code.union_bound(),
                    path.display()
                );
            }
            Err(e @ Error::Infeasible { .. }) => {
                eprintln!("skipped n = {n}: {e}");
                skipped = true;
            }
            Err(e) => return Err(validation(e)),
        }
    }
    Ok(if skipped { EXIT_SKIPPED } else { 0 })
}

fn read_code(a: &CodecArgs, cfg: &ExperimentConfig) -> anyhow::Result<WiretapCodeSpec> {
    let Some(path) = a
        .code
        .clone()
        .or_else(|| cfg.codec.code.as_ref().map(PathBuf::from))
    else {
        bail!(Validation(
            "no code file given (--code or [codec].code)".into()
        ));
    };
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    WiretapCodeSpec::from_toml(&text).map_err(validation)
}

fn parse_bits(s: &str) -> anyhow::Result<BitVector> {
    BitVector::parse(s).map_err(validation)
}

fn encode(a: &CodecArgs) -> anyhow::Result<u8> {
    let cfg = load_config(&a.common)?;
    let spec = read_code(a, &cfg)?;
    let Some(message) = a.message.as_ref().or(cfg.codec.message.as_ref()) else {
        bail!(Validation(
            "no message given (--message or [codec].message)".into()
        ));
    };
    let u = parse_bits(message)?;
    let cw = match a.b_star.as_ref().or(cfg.codec.b_star.as_ref()) {
        Some(b) => wiretap_encode_with(&spec, &u, &parse_bits(b)?),
        None => wiretap_encode(
            &spec,
            &u,
            &mut StreamKey::root(cfg.seed).child(label_id("encode")).rng(),
        ),
    }
    .map_err(validation)?;
    let text = format!("x = {}\nb_star = {}\n", cw.x, cw.b_star);
    emit(&a.common, "codeword.txt", &text)
}

fn parse_channel(s: &str) -> anyhow::Result<DiscreteChannel> {
    let bad = || Validation(format!("unrecognized channel '{s}'"));
    let spec = match s.split_once(':') {
        Some(("bec", p)) => ChannelSpec::Bec {
            p: p.parse().map_err(|_| bad())?,
        },
        Some(("bsc", p)) => ChannelSpec::Bsc {
            p: p.parse().map_err(|_| bad())?,
        },
        None if s == "noiseless" => ChannelSpec::Noiseless,
        _ => bail!(bad()),
    };
    make_channel(&spec).map_err(validation)
}

fn decode(a: &CodecArgs) -> anyhow::Result<u8> {
    let cfg = load_config(&a.common)?;
    let spec = read_code(a, &cfg)?;
    let channel = match (&a.channel, &cfg.legit) {
        (Some(s), _) => parse_channel(s)?,
        (None, Some(c)) => make_channel(c).map_err(validation)?,
        (None, None) => bail!(Validation("no channel given (--channel or [legit])".into())),
    };
    let Some(received) = a.received.as_ref().or(cfg.codec.received.as_ref()) else {
        bail!(Validation(
            "no received symbols given (--received or [codec].received)".into()
        ));
    };
    let y = received
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<usize>() {
            Ok(s) if s < channel.outputs() => Ok(s),
            _ => Err(Validation(format!("bad output symbol '{t}'"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let d = sc_decode(&spec, &channel, &y).map_err(validation)?;
    let text = format!(
        "u = {}\nb_star = {}\nw = {}\n",
        d.u_hat, d.b_star_hat, d.w_hat
    );
    emit(&a.common, "decoded.txt", &text)
}

/// Prints `text`, and also writes it under `--out` when one was given.
fn emit(c: &Common, name: &str, text: &str) -> anyhow::Result<u8> {
    print!("{text}");
    if let Some(dir) = &c.out {
        write_file(&dir.join(name), text)?;
    }
    Ok(0)
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Construct(c) => construct(c),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Fer(c) => run_experiment(ExperimentKind::Fer, c),
        Command::Secrecy(c) => run_experiment(ExperimentKind::Secrecy, c),
        Command::Conjecture(c) => run_experiment(ExperimentKind::Conjecture, c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<Validation>()) {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
