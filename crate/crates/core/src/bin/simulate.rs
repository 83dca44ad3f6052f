use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use greenhouse_link::simharness::{run, RunConfig, Scenario, SimError};

/// Run a scenario against the simulated master/slave monitoring pair.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Cli {
    /// Scenario script.
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    duration_ms: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 9600)]
    baud: u32,
    #[arg(long, default_value_t = 0)]
    latency_ms: u64,
    #[arg(long, default_value_t = 0.0)]
    drop_prob: f64,
    #[arg(long, default_value_t = 0.0)]
    bit_error_prob: f64,
    /// Trace destination; `-` for standard output.
    #[arg(long)]
    trace: Option<String>,
    /// Write both displays to the trace every MS milliseconds.
    #[arg(long, value_name = "MS")]
    snapshot_every: Option<u64>,
    /// Start with the modules already configured and paired.
    #[arg(long)]
    skip_config: bool,
    /// Print machine-readable counters as JSON instead of the summary.
    #[arg(long)]
    report_json: bool,
}

const EXIT_EXPECTATION_FAILED: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_IO: u8 = 4;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let text = match std::fs::read_to_string(&cli.scenario) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.scenario.display());
            return ExitCode::from(EXIT_IO);
        }
    };
    let scenario = match Scenario::parse(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}: {e}", cli.scenario.display());
            return ExitCode::from(EXIT_PARSE);
        }
    };

    let cfg = RunConfig {
        duration_ms: cli.duration_ms,
        seed: cli.seed,
        baud: cli.baud,
        latency_ms: cli.latency_ms,
        drop_prob: cli.drop_prob,
        bit_error_prob: cli.bit_error_prob,
        skip_config: cli.skip_config,
        snapshot_every_ms: cli.snapshot_every,
    };

    let stdout = io::stdout();
    let mut sink: Box<dyn Write> = match cli.trace.as_deref() {
        None => Box::new(io::sink()),
        Some("-") => Box::new(stdout.lock()),
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot create trace file {path}: {e}");
                return ExitCode::from(EXIT_IO);
            }
        },
    };

    let report = match run(scenario, cfg, sink.as_mut()) {
        Ok(r) => r,
        Err(SimError::Io(e)) => {
            eprintln!("error: writing trace: {e}");
            return ExitCode::from(EXIT_IO);
        }
        Err(e @ SimError::Config(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    drop(sink);

    let mut out = io::stdout().lock();
    let printed = if cli.report_json {
        writeln!(out, "{}", report.to_json())
    } else {
        write!(out, "{}", report.summary())
    };
    if printed.and_then(|_| out.flush()).is_err() {
        return ExitCode::from(EXIT_IO);
    }

    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_EXPECTATION_FAILED)
    }
}
