//! Command-line front end: analyze, simulate, verify, bound, compare.
//!
//! Exit codes: 0 success, 1 usage, 2 parse error, 3 precondition failed,
//! 4 verification failed.

mod walkfile;

use clap::{Parser, Subcommand, ValueEnum};
use pastwalk_core::bound::{
    solve_feasibility, BoundParams, Certificate, Feasibility, PRINTED_CERT_SLACK,
};
use pastwalk_core::constants::{compute_b, Mode};
use pastwalk_core::mc::{simulate, write_survival_csv, SimResult};
use pastwalk_core::search::{certified_survival, evolve, AnalysisReport, SearchConfig, Verdict};
use pastwalk_core::walk::WalkSpec;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Certified,
    ExponentOnly,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Certified => Mode::Certified,
            ModeArg::ExponentOnly => Mode::ExponentOnly,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pastwalk",
    about = "Termination analyzer for polynomial random walks",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    /// Master seed for the search and the simulator.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Error-constant mode for analysis.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Generation budget for the parameter search.
    #[arg(long, global = true)]
    generations: Option<usize>,
    /// Emit machine-readable JSON (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Render reports as human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prove termination: run the parameter search and emit an analysis report.
    Analyze {
        walk_file: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Search configuration as a JSON document.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Estimate stopping-time statistics by direct simulation.
    Simulate {
        walk_file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
        /// Write the JSON result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the survival curve as CSV (header `n,survival,stderr`).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-check a certificate; exits 0 iff the bound set is inductive.
    Verify { certificate: PathBuf },
    /// One-shot feasibility solve at explicit parameters.
    Bound {
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 1e-8)]
        c0: f64,
        #[arg(long = "C1", default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1e-8)]
        delta1: f64,
        /// Anchor count; anchors run 0, s/(g-1), ..., s.
        #[arg(long, default_value_t = 200)]
        g: usize,
        /// Anchor span.
        #[arg(long, default_value_t = 5.0)]
        s: f64,
        /// Tail anchor (must exceed the span).
        #[arg(long, default_value_t = 6.5)]
        c: f64,
    },
    /// Analyze and simulate, then cross-check the certified bound against
    /// the empirical curve.
    Compare {
        walk_file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not usage errors
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> CliError {
    CliError {
        code,
        message: message.into(),
    }
}

fn load_walk(path: &Path) -> Result<WalkSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
    let doc = walkfile::parse_document(&text)
        .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    walkfile::parse_walk(&doc).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn search_config(cli: &Cli, config_path: Option<&Path>) -> Result<SearchConfig, CliError> {
    let mut config = match config_path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", p.display())))?
        }
        None => SearchConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(mode) = cli.mode {
        config.mode = mode.into();
    }
    if let Some(generations) = cli.generations {
        config.generations = generations;
    }
    Ok(config)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Analyze {
            walk_file,
            out,
            config,
        } => {
            let walk = load_walk(walk_file)?;
            let config = search_config(&cli, config.as_deref())?;
            let report =
                evolve(&walk, &config).map_err(|e| fail(EXIT_PRECONDITION, e.to_string()))?;
            let text = if cli.pretty {
                pretty_report(&report)
            } else {
                serde_json::to_string_pretty(&report).expect("report serializes")
            };
            emit(out.as_deref(), &text)?;
            Ok(match report.verdict {
                Verdict::PreconditionFailed => EXIT_PRECONDITION,
                _ => 0,
            })
        }
        Command::Simulate {
            walk_file,
            samples,
            cap,
            out,
            csv,
        } => {
            let walk = load_walk(walk_file)?;
            let result = simulate(&walk, *samples, *cap, cli.seed.unwrap_or(0));
            if let Some(csv_path) = csv {
                let file = std::fs::File::create(csv_path).map_err(|e| {
                    fail(EXIT_USAGE, format!("cannot write {}: {e}", csv_path.display()))
                })?;
                write_survival_csv(&result, std::io::BufWriter::new(file))
                    .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            }
            let text = if cli.pretty {
                pretty_sim(&result)
            } else {
                serde_json::to_string_pretty(&result).expect("result serializes")
            };
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Verify { certificate } => {
            let text = std::fs::read_to_string(certificate).map_err(|e| {
                fail(EXIT_USAGE, format!("cannot read {}: {e}", certificate.display()))
            })?;
            let cert: Certificate = serde_json::from_str(&text)
                .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", certificate.display())))?;
            match cert.verify(PRINTED_CERT_SLACK) {
                Ok(()) => {
                    println!("inductive");
                    Ok(0)
                }
                Err(e) => {
                    eprintln!("verification failed: {e}");
                    Ok(EXIT_VERIFICATION)
                }
            }
        }
        Command::Bound {
            epsilon,
            d,
            c0,
            c1,
            delta1,
            g,
            s,
            c,
        } => {
            let b_const =
                compute_b(*epsilon, *d, *c1).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            let params = BoundParams {
                epsilon: *epsilon,
                d: *d,
                c0: *c0,
                c1: *c1,
                delta1: *delta1,
                b_const,
            };
            let g = (*g).max(2);
            let anchors: Vec<f64> = (0..g).map(|i| s * i as f64 / (g - 1) as f64).collect();
            match solve_feasibility(&params, &anchors, &[*c]) {
                Feasibility::Feasible(set) => {
                    let cert = Certificate::new(set, params);
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&cert).expect("certificate serializes")
                    );
                    Ok(0)
                }
                _ => {
                    println!("INFEASIBLE");
                    Ok(0)
                }
            }
        }
        Command::Compare {
            walk_file,
            samples,
            cap,
        } => {
            let walk = load_walk(walk_file)?;
            let config = search_config(&cli, None)?;
            let report =
                evolve(&walk, &config).map_err(|e| fail(EXIT_PRECONDITION, e.to_string()))?;
            if report.verdict == Verdict::PreconditionFailed {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                println!("{text}");
                return Ok(EXIT_PRECONDITION);
            }
            let sim = simulate(&walk, *samples, *cap, cli.seed.unwrap_or(0));
            let mut worst_margin = f64::INFINITY;
            let mut violations = 0usize;
            for pt in &sim.survival {
                let certified = certified_survival(report.exponent, report.b_factor, pt.n);
                let margin = certified - (pt.survival - 3.0 * pt.stderr);
                if margin < 0.0 {
                    violations += 1;
                }
                worst_margin = worst_margin.min(margin);
            }
            let explicit_ok = report.explicit_bound.map(|eb| eb >= sim.stop_times.mean);
            let sound = violations == 0 && explicit_ok != Some(false);
            let joint = json!({
                "analysis": report,
                "simulation": sim,
                "soundness": {
                    "survival_dominated": violations == 0,
                    "violations": violations,
                    "worst_margin": worst_margin,
                    "explicit_bound_exceeds_mean": explicit_ok,
                },
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&joint).expect("joint report serializes")
            );
            Ok(if sound { 0 } else { EXIT_VERIFICATION })
        }
    }
}

fn pretty_report(r: &AnalysisReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("verdict          {:?}\n", r.verdict));
    out.push_str(&format!("exponent m       {:.6}\n", r.exponent));
    out.push_str(&format!("factor B         {:.6e}\n", r.b_factor));
    out.push_str(&format!("window growth k  {:.6}\n", r.k));
    out.push_str(&format!(
        "params           n0 = {}, d = {:.6}, eps = {:.6}\n",
        r.params.n0, r.params.d, r.params.epsilon
    ));
    match r.explicit_bound {
        Some(eb) => out.push_str(&format!("E(T) bound       {eb:.3}\n")),
        None => out.push_str("E(T) bound       (not computed)\n"),
    }
    out.push_str(&format!(
        "finite moments   E(T^N) < inf for N <= {}\n",
        r.finite_moments
    ));
    out.push_str(&format!(
        "certificate      {}\n",
        if r.certificate.is_some() {
            "present (re-verified)"
        } else {
            "none"
        }
    ));
    out
}

fn pretty_sim(r: &SimResult) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "samples {}  cap {}  censored {}\n",
        r.samples, r.cap, r.censored
    ));
    out.push_str(&format!(
        "stopping time  mean {:.4}  var {:.4}  p10 {}  p50 {}  p90 {}\n",
        r.stop_times.mean,
        r.stop_times.variance,
        r.stop_times.p10,
        r.stop_times.p50,
        r.stop_times.p90
    ));
    out.push_str("survival (n, P(T>=n), stderr):\n");
    for pt in &r.survival {
        if pt.survival == 0.0 {
            break;
        }
        out.push_str(&format!(
            "  {:>9}  {:.6}  {:.6}\n",
            pt.n, pt.survival, pt.stderr
        ));
    }
    out
}
