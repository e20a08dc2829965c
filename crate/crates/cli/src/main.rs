use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use whittaker::problem::{parse_problem, run, Report, EXIT_INVALID};

/// Decide whether a configuration of points is good by running the folding
/// algorithm. Prints a JSON report on stdout.
///
/// Exit status: 0 good, 1 not good, 2 redundant, 3 invalid input.
#[derive(Parser, Debug)]
#[command(name = "whittaker", version)]
struct Args {
    /// Problem document (JSON).
    #[arg(long, conflicts_with = "stdin", required_unless_present = "stdin")]
    input: Option<PathBuf>,
    /// Read the problem document from standard input.
    #[arg(long)]
    stdin: bool,
    /// Include pairings and witnesses for every fold.
    #[arg(long)]
    trace: bool,
    /// Write the reduced convex hull of every stage to PREFIX.<stage>.dot.
    #[arg(long, value_name = "PREFIX")]
    dot: Option<String>,
    /// Search words of up to N syllables for a non-loxodromic element.
    #[arg(long, value_name = "N")]
    verify_depth: Option<usize>,
    /// Move the first point to infinity when infinity is absent.
    #[arg(long)]
    normalize_infinity: bool,
    /// Print nothing; only set the exit status.
    #[arg(long)]
    quiet: bool,
}

fn load(args: &Args) -> std::io::Result<String> {
    match &args.input {
        Some(path) => fs::read_to_string(path),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn execute(args: &Args) -> Result<Report, String> {
    let text = load(args).map_err(|e| format!("cannot read input: {e}"))?;
    let mut spec = parse_problem(&text).map_err(|e| e.to_string())?;
    let opts = &mut spec.options;
    opts.trace |= args.trace;
    opts.normalize_infinity |= args.normalize_infinity;
    if args.dot.is_some() {
        opts.dot = args.dot.clone();
    }
    if args.verify_depth.is_some() {
        opts.verify_depth = args.verify_depth;
    }
    let report = run(&spec).map_err(|e| e.to_string())?;
    if let (Some(prefix), Some(trees)) = (&spec.options.dot, &report.trees) {
        for t in trees {
            let path = format!("{prefix}.{}.dot", t.stage);
            fs::write(&path, &t.dot).map_err(|e| format!("cannot write {path}: {e}"))?;
        }
    }
    Ok(report)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(report) => {
            if !args.quiet {
                println!("{}", report.to_json());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(msg) => {
            if !args.quiet {
                eprintln!("error: {msg}");
            }
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
