//! `okb`: batch front-end for exact Okounkov-body computations.
//!
//! Exit codes: 0 success, 1 malformed input or schema violation, 2 domain
//! error (empty body where one is required, flag curve inside the base
//! locus, and similar). The tool never panics on malformed input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

mod run;
mod svg;

use run::{BodyKindArg, CommandKind, RunConfig};

#[derive(Parser)]
#[command(
    name = "okb",
    about = "Okounkov bodies, divisor polytopes and Zariski decompositions over exact rationals",
    version
)]
struct Cli {
    /// Computation to run.
    #[arg(value_enum)]
    command: CommandKind,

    /// Primary input file (fan, model, or valuation set; a fixture
    /// directory for batch xcheck).
    #[arg(long = "in")]
    input: PathBuf,

    /// Divisor file: ray coefficients for toric commands, a class vector
    /// for surface commands.
    #[arg(long)]
    divisor: Option<PathBuf>,

    /// Flag file: ray order for toric commands, curve and point for
    /// surface commands.
    #[arg(long)]
    flag: Option<PathBuf>,

    /// Orbit cone file for toric-certify.
    #[arg(long)]
    cone: Option<PathBuf>,

    /// Write the output document here as well as to stdout (the output
    /// directory in batch xcheck mode).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Render the resulting two-dimensional body to this SVG file.
    #[arg(long)]
    svg: Option<PathBuf>,

    /// Body kind for toric-body.
    #[arg(long, value_enum, default_value = "valuative")]
    kind: BodyKindArg,

    /// Worker threads for batch xcheck.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    // Argument errors are input errors (exit 1); help/version exit 0.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let config = RunConfig {
        command: cli.command,
        input: cli.input,
        divisor: cli.divisor,
        flag: cli.flag,
        cone: cli.cone,
        out: cli.out,
        svg: cli.svg,
        kind: cli.kind,
        jobs: cli.jobs,
    };
    let (code, doc) = run::run(&config);
    // Tolerate downstream consumers closing the pipe early.
    use std::io::Write;
    let stdout = std::io::stdout();
    let _ = writeln!(stdout.lock(), "{}", doc.render());
    ExitCode::from(code as u8)
}
