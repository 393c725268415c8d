use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use fanolab::driver::{parse_cubic, run_command, Command, RunOptions, Shard};

const EXIT_COUNTEREXAMPLE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_INTERNAL: u8 = 1;

/// Lines on cubic hypersurfaces over finite fields.
#[derive(Parser, Debug)]
#[command(name = "fanolab", version)]
struct Cli {
    /// lines, classify, normal-form, higher-triple, jacobian, certificate,
    /// eckardt, section or scan
    command: Command,
    /// Cubic descriptor file
    #[arg(long)]
    input: PathBuf,
    /// Characteristic of the working field (0 for the rationals)
    #[arg(long = "char")]
    characteristic: u64,
    /// Extension degree of the working field (1 or 2)
    #[arg(long)]
    ext: u32,
    #[arg(long)]
    seed: u64,
    /// Run only block I of K, e.g. 2/4
    #[arg(long)]
    shard: Option<Shard>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random cubics drawn by `scan`
    #[arg(long, default_value_t = 100)]
    draws: usize,
    /// Append wall-clock time to the report
    #[arg(long)]
    timing: bool,
}

fn fail(code: u8, tag: &str, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("fanolab: error[{tag}]: {message}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT),
            };
        }
    };
    let text = match std::fs::read_to_string(&cli.input) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INPUT, "E_IO", format!("{}: {e}", cli.input.display())),
    };
    let descriptor = match parse_cubic(&text) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_INPUT, e.code(), format!("{}: {e}", cli.input.display())),
    };
    let options = RunOptions {
        shard: cli.shard.unwrap_or(Shard::WHOLE),
        draws: cli.draws,
        timing: cli.timing,
        ..RunOptions::new(cli.characteristic, cli.ext, cli.seed)
    };
    let report = match run_command(cli.command, &descriptor, &options) {
        Ok(r) => r,
        Err(e) if e.is_input_error() => return fail(EXIT_INPUT, e.code(), e),
        Err(e) => return fail(EXIT_INTERNAL, e.code(), e),
    };
    let rendered = report.render();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                return fail(EXIT_INPUT, "E_IO", format!("{}: {e}", path.display()));
            }
        }
        None => print!("{rendered}"),
    }
    if report.is_counterexample() {
        for p in report.problems.iter().take(10) {
            eprintln!("fanolab: counterexample: {p}");
        }
        if report.problems.len() > 10 {
            eprintln!("fanolab: ... {} more in the report", report.problems.len() - 10);
        }
        return ExitCode::from(EXIT_COUNTEREXAMPLE);
    }
    ExitCode::SUCCESS
}
