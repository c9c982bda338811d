//! The `fvx` command-line tool.
//!
//! Exit codes: 0 optimal or verified, 1 usage or input error, 2 infeasible
//! (or every point forbidden when compiling), 3 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{FvxError, Result};
use crate::lpformat::{parse_lp, write_lp};
use crate::problem::{Method, Problem, ProblemFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fvx", version, about = "Optimization over polytope vertices with forbidden points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimize the objective over the allowed vertices.
    Solve { file: PathBuf },
    /// List the k best allowed vertices.
    Kbest {
        file: PathBuf,
        #[arg(short)]
        k: Option<usize>,
    },
    /// Pick distinct vertices, one per slot, at minimum total cost.
    Alldiff { file: PathBuf },
    /// Write an extended formulation of the allowed hull as an LP file.
    Compile {
        file: PathBuf,
        #[arg(long)]
        method: Option<Method>,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Check an LP file (or a freshly compiled problem) against brute force.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        method: Option<Method>,
    },
    /// Print every allowed vertex, sorted.
    Enumerate { file: PathBuf },
}

struct Outcome {
    code: i32,
    stdout: String,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| FvxError::field("file", format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<(ProblemFile, Problem)> {
    let file = ProblemFile::parse(&read(path)?)?;
    let problem = file.resolve()?;
    Ok((file, problem))
}

fn status_code(optimal: bool) -> i32 {
    if optimal {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Solve { file } => {
            let (_, problem) = load_problem(&file)?;
            let report = problem.solve()?;
            Ok(Outcome {
                code: status_code(report.status == "optimal"),
                stdout: json(&report),
            })
        }
        Command::Kbest { file, k } => {
            let (_, problem) = load_problem(&file)?;
            let report = problem.kbest(problem.k(k)?)?;
            Ok(Outcome {
                code: status_code(!report.vertices.is_empty()),
                stdout: json(&report),
            })
        }
        Command::Alldiff { file } => {
            let (_, problem) = load_problem(&file)?;
            let report = problem.alldiff()?;
            Ok(Outcome {
                code: status_code(report.status == "optimal"),
                stdout: json(&report),
            })
        }
        Command::Compile { file, method, o } => {
            let (spec, problem) = load_problem(&file)?;
            let method = method.unwrap_or_else(|| problem.default_method());
            let system = problem.compile(method)?;
            let text = write_lp(&system, Some(&spec.to_json()));
            match o {
                None => Ok(Outcome {
                    code: EXIT_OK,
                    stdout: text,
                }),
                Some(path) => {
                    std::fs::write(&path, text)
                        .map_err(|e| FvxError::field("o", format!("{}: {e}", path.display())))?;
                    Ok(Outcome {
                        code: EXIT_OK,
                        stdout: json(&system.meta),
                    })
                }
            }
        }
        Command::Verify {
            file,
            trials,
            seed,
            method,
        } => {
            let text = read(&file)?;
            let (problem, system) = if text.trim_start().starts_with('{') {
                let problem = ProblemFile::parse(&text)?.resolve()?;
                let method = method.unwrap_or_else(|| problem.default_method());
                let system = problem.compile(method)?;
                (problem, system)
            } else {
                if method.is_some() {
                    return Err(FvxError::field("method", "--method applies to problem files only"));
                }
                let lp = parse_lp(&text)?;
                let embedded = lp
                    .problem
                    .ok_or_else(|| FvxError::field("problem", "the LP file carries no problem line"))?;
                (Problem::parse(&embedded)?, lp.system)
            };
            let report = problem.verify(&system, trials, seed)?;
            Ok(Outcome {
                code: if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED },
                stdout: json(&report),
            })
        }
        Command::Enumerate { file } => {
            let (_, problem) = load_problem(&file)?;
            let mut stdout = String::new();
            for line in problem.enumerate()? {
                stdout.push_str(&line);
                stdout.push('\n');
            }
            Ok(Outcome { code: EXIT_OK, stdout })
        }
    }
}

/// Runs the tool on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_ERROR;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.stdout.as_bytes());
            outcome.code
        }
        Err(FvxError::AllForbidden) => {
            let _ = writeln!(err, "error: {}", FvxError::AllForbidden);
            EXIT_INFEASIBLE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
