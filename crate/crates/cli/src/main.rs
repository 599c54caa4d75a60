//! `conelet` command-line front end.
//!
//! Exit codes: 0 success, 2 parameter error, 3 certification failure,
//! 4 I/O error, 1 numerical failure.

mod artifacts;
mod commands;
mod svg;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BenchArgs, CertifyArgs, DesignArgs, RoundtripArgs, TransformArgs};

#[derive(Parser, Debug)]
#[command(name = "conelet", version = conelet::VERSION, about = "Compactly supported shearlet frames: design, certification, transforms")]
struct Cli {
    /// Worker threads (0 = all cores); `CONELET_THREADS` takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Design the maximally flat filter and its decay envelope.
    Design(DesignArgs),
    /// Certify frame bounds for a sampling vector.
    Certify(CertifyArgs),
    /// Analyze an image and write the coefficient container.
    Transform(TransformArgs),
    /// Analyze and reconstruct random images; prints the relative error.
    Roundtrip(RoundtripArgs),
    /// N-term approximation benchmark on cartoon images.
    Bench(BenchArgs),
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn params(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<conelet::ConeletError> for Failure {
    fn from(e: conelet::ConeletError) -> Self {
        use conelet::ConeletError as E;
        let code = match &e {
            E::InvalidParams(_)
            | E::DegreeTooLarge { .. }
            | E::GammaOutOfRange(_)
            | E::J0TooLarge(_)
            | E::SizeMismatch(_)
            | E::ScaleOverflow(_)
            | E::CurvatureInfeasible(_) => 2,
            E::NotCertifiable(_) => 3,
            E::Io(_) | E::Format(_) | E::Json(_) => 4,
            E::FactorizationFailed(_) | E::Diverged(_) | E::NotConverged { .. } => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: 4, message: format!("I/O error: {e}") }
    }
}

fn thread_count(flag: usize) -> Result<usize, Failure> {
    match std::env::var("CONELET_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::params(format!("CONELET_THREADS must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = thread_count(cli.threads)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure { code: 1, message: format!("thread pool: {e}") })?;
    match cli.command {
        Command::Design(a) => commands::design(&a),
        Command::Certify(a) => commands::certify(&a),
        Command::Transform(a) => commands::transform(&a),
        Command::Roundtrip(a) => commands::roundtrip(&a),
        Command::Bench(a) => commands::bench(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
