use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use algebroidkit_cli::{exit_code, run_task, CliError, Options, Report, Task};

/// Exact verification and cohomology for finitely presented Lie algebroids.
#[derive(Parser, Debug)]
#[command(name = "algebroidkit", version)]
struct Args {
    /// verify-algebroid, verify-morphism, pullback, descend, verify-descent,
    /// build-la-groupoid, roundtrip-f1f2, cech-cohomology, invariant-cohomology,
    /// poisson-verify, cotangent, linear-poisson or symplectic
    task: String,
    /// Input document (schema algebroidkit/1)
    input: PathBuf,
    /// Highest total degree for Čech computations
    #[arg(long)]
    max_degree: Option<usize>,
    /// Grading name: poly-form or poly
    #[arg(long)]
    grading: Option<String>,
    /// Emit the machine-readable JSON report
    #[arg(long)]
    json: bool,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: &Args) -> Result<Report, CliError> {
    let task: Task = args.task.parse()?;
    let input = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Io { path: args.input.display().to_string(), message: e.to_string() })?;
    let opts = Options { max_degree: args.max_degree, grading: args.grading.clone() };
    run_task(task, &input, &opts)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = Instant::now();
    let outcome = run(&args);
    let mut code = exit_code(&outcome);
    match &outcome {
        Ok(report) => {
            let text = if args.json { report.to_json() } else { report.to_text() };
            let written = match &args.out {
                Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                code = 2;
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    ExitCode::from(code as u8)
}
