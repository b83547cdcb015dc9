//! `tangle3`: experiment harness for variational tangle estimation.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tangle_core::canonical::{canonicalize, CostMode};
use tangle_core::entanglement::{
    extract_canonical_coefficients, hyperdeterminant, invariants_from_canonical,
    invariants_from_state, tangle,
};
use tangle_core::experiment::{
    run_distribution, run_ghz, run_random_sweep, summarize, write_csv, write_rows,
    ExperimentConfig, OutputFormat, PostSelection, ResultRow,
};
use tangle_core::noise::{estimate_tangle, post_select, sample_shots, NoiseConfig};
use tangle_core::streams::{Purpose, StreamKey};
use tangle_core::{Error, PureState3};

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "tangle3", version, about = "Variational tangle estimation for three-qubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact tangle / concurrence samples of random states.
    Dist(Common),
    /// GHZ tangle versus noise level, fixed and optimized circuits.
    Ghz(Common),
    /// Random-state sweep: canonicalize, measure under noise, estimate.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Where to write the per-group relative-error summary
        /// (default: `<out>.summary.csv`, or stderr when writing to stdout).
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Use the full 1000-state ensemble instead of the desk-scale default.
        #[arg(long)]
        full: bool,
    },
    /// Canonicalize and estimate the tangle of a state read from a JSON file.
    Tangle {
        /// JSON array of eight `[re, im]` pairs.
        statefile: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random states (or samples for `dist`).
    #[arg(long)]
    states: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Noise levels as a comma list (`0,2,5`) or an inclusive range (`0..5`).
    #[arg(long = "t", default_value = "0..5")]
    t_values: String,
    #[arg(long = "post-select", default_value = "both")]
    post_select: String,
    #[arg(long = "cost-mode", default_value = "exact")]
    cost_mode: String,
    /// Measure the training cost through the noise model (`on`) or ideally (`off`).
    #[arg(long = "train-noise", default_value = "on")]
    train_noise: String,
    #[arg(long = "max-attempts", default_value_t = 5)]
    max_attempts: usize,
    #[arg(long)]
    threads: Option<usize>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Parse(_) => CliError::Config(e.to_string()),
            Error::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn parse_levels(text: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Config(format!("cannot parse noise levels {text:?}"));
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let hi = hi.trim_start_matches('=');
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    let mut levels: Vec<u32> = text
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    levels.sort_unstable();
    levels.dedup();
    Ok(levels)
}

fn build_config(c: &Common, default_states: usize) -> Result<(ExperimentConfig, OutputFormat), CliError> {
    let config = ExperimentConfig {
        master_seed: c.seed,
        n_states: c.states.unwrap_or(default_states),
        shots: c.shots,
        repetitions: c.reps,
        t_values: parse_levels(&c.t_values)?,
        post_selection: c.post_select.parse::<PostSelection>()?,
        cost_mode: c.cost_mode.parse::<CostMode>()?,
        max_attempts: c.max_attempts,
        train_under_noise: match c.train_noise.as_str() {
            "on" => true,
            "off" => false,
            other => return Err(CliError::Config(format!("--train-noise must be on or off, got {other:?}"))),
        },
        threads: c.threads,
        ..Default::default()
    };
    for w in config.validate()? {
        eprintln!("warning: {w}");
    }
    let format = c.format.parse::<OutputFormat>()?;
    Ok((config, format))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        None => Box::new(BufWriter::new(io::stdout().lock())),
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
    })
}

#[derive(Serialize)]
struct TangleReport {
    tau_exact: f64,
    hyperdeterminant: [f64; 2],
    invariants: [f64; 5],
    params: [f64; 9],
    final_cost: f64,
    attempts_used: usize,
    accepted: bool,
    evaluations: usize,
    canonical_state: Vec<[f64; 2]>,
    canonical_lambda: Option<[f64; 5]>,
    canonical_phi: Option<f64>,
    canonical_invariants: Option<[f64; 5]>,
    estimates: Vec<ResultRow>,
}

fn run_tangle(path: &Path, common: &Common) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let state = PureState3::from_json(&text)?;
    let (config, format) = build_config(common, 1)?;
    // a single noise level is used: the highest one requested
    let t = *config.t_values.iter().max().expect("validated non-empty");
    let noise = NoiseConfig::from_level(t)?;
    let policy = config.policy(t)?;
    let key = StreamKey::new(config.master_seed, Purpose::Canonicalization).noise_level(u64::from(t));
    let out = canonicalize(&state, &policy, &config.optimizer, &mut key.rng())?;

    let tau_exact = tangle(&state);
    let sampling = StreamKey { purpose: Purpose::Sampling, ..key };
    let mut estimates = Vec::new();
    for rep in 0..config.repetitions as u64 {
        let sk = sampling.repetition(rep);
        let raw = sample_shots(&out.canonical_state, config.shots, &noise, &mut sk.rng());
        for &ps in config.post_selection.modes() {
            let h = if ps { post_select(&raw) } else { raw };
            let (est, sigma) = estimate_tangle(&h)
                .map(|e| (e.tau_hat, e.sigma_tau))
                .unwrap_or((f64::NAN, f64::NAN));
            estimates.push(ResultRow {
                state_id: 0,
                t,
                repetition: rep,
                post_selected: ps,
                tau_exact,
                tau_estimate: est,
                sigma_tau: sigma,
                relative_error: if tau_exact > 1e-12 { (est - tau_exact) / tau_exact } else { f64::NAN },
                final_cost: out.final_cost,
                attempts_used: out.attempts_used,
                accepted: out.accepted,
                shots_kept: h.shots_kept(),
                seed: sk.seed(),
            });
        }
    }

    let mut w = open_out(common.out.as_deref())?;
    match format {
        OutputFormat::Csv => write_csv(&estimates, &mut w)?,
        OutputFormat::Json => {
            let canonical = extract_canonical_coefficients(&out.canonical_state).ok();
            let h = hyperdeterminant(&state);
            let report = TangleReport {
                tau_exact,
                hyperdeterminant: [h.re, h.im],
                invariants: invariants_from_state(&state).as_array(),
                params: out.params.wrapped().to_array(),
                final_cost: out.final_cost,
                attempts_used: out.attempts_used,
                accepted: out.accepted,
                evaluations: out.evaluations,
                canonical_state: out.canonical_state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
                canonical_lambda: canonical.map(|c| c.lambda()),
                canonical_phi: canonical.map(|c| c.phi()),
                canonical_invariants: canonical.map(|c| invariants_from_canonical(&c).as_array()),
                estimates,
            };
            serde_json::to_writer_pretty(&mut w, &report).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Dist(c) => {
            let (config, format) = build_config(&c, 100_000)?;
            let rows = run_distribution(&config)?;
            let mut w = open_out(c.out.as_deref())?;
            write_rows(&rows, format, &mut w)?;
            w.flush()?;
        }
        Command::Ghz(c) => {
            let (config, format) = build_config(&c, 1)?;
            let rows = run_ghz(&config)?;
            let mut w = open_out(c.out.as_deref())?;
            write_rows(&rows, format, &mut w)?;
            w.flush()?;
        }
        Command::Sweep { common, summary, full } => {
            let default_states = if full { 1000 } else { 200 };
            let (config, format) = build_config(&common, default_states)?;
            let rows = run_random_sweep(&config)?;
            let mut w = open_out(common.out.as_deref())?;
            write_rows(&rows, format, &mut w)?;
            w.flush()?;

            let stats = summarize(&rows);
            let summary_path = summary.or_else(|| {
                common.out.as_ref().map(|p| {
                    let mut s = p.clone().into_os_string();
                    s.push(".summary.csv");
                    PathBuf::from(s)
                })
            });
            match summary_path {
                Some(p) => {
                    let mut w = open_out(Some(&p))?;
                    write_csv(&stats, &mut w)?;
                    w.flush()?;
                }
                None => write_csv(&stats, &mut io::stderr().lock())?,
            }
        }
        Command::Tangle { statefile, common } => run_tangle(&statefile, &common)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(CliError::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_IO)
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_specs() {
        assert_eq!(parse_levels("0..5").unwrap(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(parse_levels("0..=2").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_levels("5,0,2,2").unwrap(), vec![0, 2, 5]);
        assert!(parse_levels("3..1").is_err());
        assert!(parse_levels("a,b").is_err());
    }
}
