//! Command-line front end: generate the named state families, analyze sets
//! against the certification suite, and print product-state tables.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use entangle_cert_core::certify::{qces_analysis, run_report, Check, ReportOptions};
use entangle_cert_core::family::{make_family, Family, FamilyParams};
use entangle_cert_core::io;
use entangle_cert_core::{GaussianRational, StateSet};

const EXIT_RUNTIME_ERROR: u8 = 3;
const EXIT_USAGE_ERROR: u8 = 4;

#[derive(Parser)]
#[command(
    name = "entangle-cert",
    about = "Exact certification of entanglement structure and nonlocality for multipartite state sets",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named state family as a canonical JSON document.
    Generate(GenerateArgs),
    /// Run certification checks against a state set.
    Analyze(AnalyzeArgs),
    /// Print the univariate generator, its roots, the embedded product-state
    /// coordinates, and their Gram matrix.
    Tables(TablesArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Family name: basis, set-s, set-sz, set-s0, ubb, omega, tau, kappa.
    #[arg(long)]
    family: String,
    /// First construction parameter (exact scalar, e.g. -2 or 1+i).
    #[arg(long)]
    a1: Option<String>,
    /// Second construction parameter.
    #[arg(long)]
    b1: Option<String>,
    /// Parameter of the one-parameter family.
    #[arg(long)]
    z: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// State-set JSON document.
    input: Option<PathBuf>,
    /// Generate this family instead of reading a file.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    a1: Option<String>,
    #[arg(long)]
    b1: Option<String>,
    #[arg(long)]
    z: Option<String>,
    /// Comma-separated checks: orthogonality, strong-nonlocality, ces, ges,
    /// qces, ubb, split, stability, distill, opm.
    #[arg(long, required = true)]
    check: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Pinned state index for stability (defaults to the last state).
    #[arg(long)]
    pin: Option<usize>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// State-set JSON document.
    input: Option<PathBuf>,
    /// Generate this family instead of reading a file.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    a1: Option<String>,
    #[arg(long)]
    b1: Option<String>,
    #[arg(long)]
    z: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep exit code 2 reserved for inconclusive verdicts
            let is_usage_error = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if is_usage_error { EXIT_USAGE_ERROR } else { 0 });
        }
    };
    match cli.command {
        Command::Generate(args) => run_generate(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Tables(args) => run_tables(args),
    }
    .unwrap_or_else(|(code, msg)| {
        eprintln!("error: {msg}");
        ExitCode::from(code)
    })
}

type CmdResult = Result<ExitCode, (u8, String)>;

fn parse_scalar(
    name: &str,
    value: &Option<String>,
) -> Result<Option<GaussianRational>, (u8, String)> {
    match value {
        None => Ok(None),
        Some(s) => GaussianRational::from_str(s)
            .map(Some)
            .map_err(|e| (EXIT_USAGE_ERROR, format!("--{name}: {e}"))),
    }
}

fn build_family(
    family: &str,
    a1: &Option<String>,
    b1: &Option<String>,
    z: &Option<String>,
) -> Result<StateSet, (u8, String)> {
    let family = Family::parse(family).map_err(|e| (EXIT_USAGE_ERROR, e.to_string()))?;
    let params = FamilyParams {
        a1: parse_scalar("a1", a1)?,
        b1: parse_scalar("b1", b1)?,
        z: parse_scalar("z", z)?,
    };
    make_family(family, &params).map_err(|e| (EXIT_RUNTIME_ERROR, e.to_string()))
}

fn load_input(
    input: &Option<PathBuf>,
    family: &Option<String>,
    a1: &Option<String>,
    b1: &Option<String>,
    z: &Option<String>,
) -> Result<StateSet, (u8, String)> {
    match (input, family) {
        (Some(_), Some(_)) | (None, None) => Err((
            EXIT_USAGE_ERROR,
            "provide exactly one of an input path or --family".into(),
        )),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| (EXIT_RUNTIME_ERROR, format!("{}: {e}", path.display())))?;
            io::read_json(&text).map_err(|e| (EXIT_RUNTIME_ERROR, e.to_string()))
        }
        (None, Some(f)) => build_family(f, a1, b1, z),
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), (u8, String)> {
    match out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(path) => std::fs::write(path, body)
            .map_err(|e| (EXIT_RUNTIME_ERROR, format!("{}: {e}", path.display()))),
    }
}

fn run_generate(args: GenerateArgs) -> CmdResult {
    let set = build_family(&args.family, &args.a1, &args.b1, &args.z)?;
    emit(&args.out, &io::write_json(&set))?;
    Ok(ExitCode::SUCCESS)
}

fn thread_cap() -> usize {
    std::env::var("ENTANGLE_CERT_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or(4)
}

fn run_analyze(args: AnalyzeArgs) -> CmdResult {
    let set = load_input(&args.input, &args.family, &args.a1, &args.b1, &args.z)?;
    let checks: Vec<Check> = args
        .check
        .split(',')
        .map(|c| Check::from_str(c.trim()).map_err(|e| (EXIT_USAGE_ERROR, e.to_string())))
        .collect::<Result<_, _>>()?;
    let opts = ReportOptions {
        pin: args.pin,
        threads: thread_cap(),
    };
    let report = run_report(&set, &checks, &opts);
    let body = match args.format {
        Format::Text => io::render_report_text(&report),
        Format::Json => io::render_report_json(&report),
    };
    emit(&args.out, &body)?;
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn run_tables(args: TablesArgs) -> CmdResult {
    let set = load_input(&args.input, &args.family, &args.a1, &args.b1, &args.z)?;
    let analysis = qces_analysis(&set).map_err(|e| (EXIT_RUNTIME_ERROR, e.to_string()))?;
    let body = match args.format {
        Format::Text => io::render_tables_text(&set, &analysis),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&serde_json::json!({
                "set": set.name(),
                "index": analysis.index,
                "generator": analysis.elimination.as_ref().map(|e| e.generator.to_string()),
                "roots": analysis.roots.iter().map(|r| io::fmt_c64(*r)).collect::<Vec<_>>(),
                "solutions": analysis.solutions.iter().map(|s| {
                    s.coordinates.iter().map(|c| io::fmt_c64(*c)).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
                "gram_all_nonzero": analysis.gram.as_ref().map(|g| g.all_offdiagonal_nonzero),
            }))
            .expect("serializable tables");
            s.push('\n');
            s
        }
    };
    emit(&args.out, &body)?;
    Ok(ExitCode::SUCCESS)
}
