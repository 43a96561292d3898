use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bestprox::certify::CertReport;
use bestprox::corpus::{corpus, corpus_case, run_case, CaseFile};
use bestprox::solver::{solve_first_kind, solve_second_kind, ContractionKind, Problem};
use bestprox::Error;

/// `println!` that exits quietly when the reader closes the pipe.
macro_rules! emit {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("stdout: {e}");
        }
    }};
}

#[derive(Parser)]
#[command(name = "bestprox", version, about = "Best proximity points of proximal contractions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Gap-equality tolerance (analysis and solver).
    #[arg(long)]
    eps: Option<f64>,
    /// Iteration cap for the solver.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Samples per parameter for proximal sets and certificates.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Gap, attainment and proximal-set samples.
    Analyze {
        /// Case file path or built-in case name.
        case: String,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Certificates for every hypothesis and set property.
    Certify {
        case: String,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Proximal iteration from each start point of the case.
    Solve {
        case: String,
        #[command(flatten)]
        opts: Overrides,
        /// Write the first run's trace (CSV for `.csv`, JSON otherwise).
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Full pipeline with expected-block assertions; exits 1 on a failed assertion.
    Run {
        case: String,
        #[command(flatten)]
        opts: Overrides,
        /// Directory for the report JSON (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Built-in corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Names of the built-in cases.
    List,
    /// Run every built-in case.
    Run {
        /// Directory for per-case report JSON files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write every built-in case as a case file.
    Export { dir: PathBuf },
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Json(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load_case(arg: &str, opts: &Overrides) -> Result<CaseFile, Failure> {
    let path = Path::new(arg);
    let mut case = if path.exists() {
        let text = std::fs::read_to_string(path).map_err(Error::from)?;
        CaseFile::from_json(&text).map_err(|e| Failure {
            code: 2,
            message: format!("{}: {e}", path.display()),
        })?
    } else {
        corpus_case(arg).ok_or_else(|| Failure {
            code: 2,
            message: format!("`{arg}` is neither a file nor a built-in case"),
        })?
    };
    if let Some(eps) = opts.eps {
        case.analysis.eps_eq = eps;
        case.solve.eps_eq = eps;
        case.solve.eps_stop = case.solve.eps_stop.min(eps);
    }
    if let Some(n) = opts.max_iter {
        case.solve.max_iter = n;
    }
    if let Some(n) = opts.samples {
        case.analysis.density = n;
    }
    case.validate().map_err(|e| Failure {
        code: 2,
        message: e.to_string(),
    })?;
    Ok(case)
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialisable")
}

fn cert_row(c: &CertReport) -> String {
    let alpha = c.alpha_estimate.map_or("-".to_string(), |a| format!("{a:.6}"));
    let witness = c
        .witness
        .as_ref()
        .map_or("-".to_string(), |w| serde_json::to_string(w).expect("serialisable"));
    format!(
        "{:<30} {:<13} {:>10}  {}",
        c.property,
        format!("{:?}", c.verdict).to_lowercase(),
        alpha,
        witness
    )
}

fn write_report(out: Option<&Path>, name: &str, text: &str) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(Error::from)?;
            std::fs::write(dir.join(format!("{name}.json")), format!("{text}\n")).map_err(Error::from)?;
        }
        None => emit!("{text}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Analyze { case, opts } => {
            let case = load_case(&case, &opts)?;
            let prox = bestprox::proximal_sets(&case.space, &case.a, &case.b, &case.analysis)?;
            emit!("{}", json(&prox));
        }
        Command::Certify { case, opts } => {
            let case = load_case(&case, &opts)?;
            let run = run_case(&case)?;
            emit!("{:<30} {:<13} {:>10}  witness", "property", "verdict", "constant");
            for c in &run.report.certs {
                emit!("{}", cert_row(c));
            }
        }
        Command::Solve {
            case,
            opts,
            trace_out,
        } => {
            let case = load_case(&case, &opts)?;
            let problem = Problem::new(
                case.space.clone(),
                case.a.clone(),
                case.b.clone(),
                case.map_t.clone(),
                case.map_g.clone(),
                &case.analysis,
            )?;
            let cfg = case.solve.config();
            let mut first_trace = None;
            for start in &case.solve.starts {
                let out = match case.solve.kind {
                    ContractionKind::First => solve_first_kind(&problem, start, &cfg),
                    ContractionKind::Second => solve_second_kind(&problem, start, &cfg),
                }?;
                emit!(
                    "start {}  x* {}  iters {}  alpha_observed {:.6}",
                    start,
                    out.x_star,
                    out.trace.steps.len(),
                    out.trace.alpha_observed
                );
                first_trace.get_or_insert(out.trace);
            }
            if let (Some(path), Some(trace)) = (trace_out, first_trace) {
                trace.export(&path)?;
            }
        }
        Command::Run {
            case,
            opts,
            out,
            trace_out,
        } => {
            let case = load_case(&case, &opts)?;
            let run = run_case(&case)?;
            write_report(out.as_deref(), &case.name, &run.report.to_json())?;
            if let (Some(path), Some(trace)) = (trace_out, run.traces.first()) {
                trace.export(&path)?;
            }
            for a in run.report.assertions.iter().filter(|a| !a.passed) {
                eprintln!("assertion failed: {} ({})", a.name, a.detail);
            }
            if !run.report.passed {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Corpus { action } => match action {
            CorpusAction::List => {
                for c in corpus() {
                    emit!("{:<24} {}", c.name, c.description.unwrap_or_default());
                }
            }
            CorpusAction::Run { out } => {
                let mut cases = corpus();
                cases.sort_by(|a, b| a.name.cmp(&b.name));
                let mut all_passed = true;
                for case in &cases {
                    let report = run_case(case)?.report;
                    let failed = report.assertions.iter().filter(|a| !a.passed).count();
                    all_passed &= report.passed;
                    emit!(
                        "{:<24} {:<4} gap {:<20} attained {:<5} assertions {}/{}",
                        report.case,
                        if report.passed { "ok" } else { "FAIL" },
                        report.gap,
                        report.attained,
                        report.assertions.len() - failed,
                        report.assertions.len()
                    );
                    if let Some(dir) = &out {
                        write_report(Some(dir), &report.case, &report.to_json())?;
                    }
                }
                if !all_passed {
                    return Ok(ExitCode::from(1));
                }
            }
            CorpusAction::Export { dir } => {
                std::fs::create_dir_all(&dir).map_err(Error::from)?;
                for case in corpus() {
                    let path = dir.join(format!("{}.json", case.name));
                    std::fs::write(&path, format!("{}\n", case.to_json())).map_err(Error::from)?;
                    emit!("{}", path.display());
                }
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
