//! Command-line front end: canonicalize closures, decide equivalence, emit
//! and verify certificates, run the identity suite, search for rewrite
//! traces, and sweep randomized properties.
//!
//! Word arguments are inline grammar text, or `@path` to read the word from
//! a file. Exit codes: 0 success (equivalent, valid, found); 1 negative
//! answer or violation; 2 refused non-classical input; 64 usage; 65 parse,
//! data, or file errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use fused_core::{
    bfs_equivalent, canonical_form, check_certificate, closure_components, derive_m_moves,
    fused_equivalent, linking_matrix, run_suite, sweep, BraidWord, Budget, Certificate, Error,
    Level, LinkingMatrix, Permutation,
};

#[derive(Parser)]
#[command(
    name = "fused",
    version,
    about = "Classify braid closures up to fused isotopy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form of a classical word's closure
    Canon {
        /// Braid word, or @path to a file containing one
        word: String,
    },
    /// Decide whether two classical closures are equivalent
    Equiv {
        left: String,
        right: String,
    },
    /// Print closure invariants of any word, classical or not
    Invariants {
        word: String,
    },
    /// Reduce to canonical form and emit the step certificate
    Reduce {
        word: String,
        /// Write the certificate to this file instead of standard output
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Revalidate a certificate file
    VerifyCert {
        path: PathBuf,
    },
    /// Run the identity suite over all instances up to a strand bound
    Lemmas {
        #[arg(long, default_value_t = 4)]
        max_strands: u32,
        /// Also search for elementary derivations of the derived moves
        #[arg(long)]
        derive_m: bool,
        /// State budget for the derivation searches
        #[arg(long, default_value_t = 200_000)]
        max_states: usize,
    },
    /// Search for an elementary trace connecting two words
    Bfs {
        left: String,
        right: String,
        #[arg(long)]
        max_states: Option<usize>,
        #[arg(long)]
        max_length: Option<usize>,
        /// Search closures rather than words on both ends
        #[arg(long)]
        closure: bool,
    },
    /// Run the seeded randomized property sweep
    RandomTest {
        #[arg(long, default_value_t = 2026)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iterations: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match &e {
            Error::NonClassicalInput { position } => Failure {
                code: 2,
                message: format!(
                    "virtual crossing at letter {position}: the classification is guaranteed \
                     only for classical words, so this input is refused rather than answered"
                ),
            },
            Error::Parse { .. } => Failure {
                code: 65,
                message: e.to_string(),
            },
            _ => Failure {
                code: 1,
                message: e.to_string(),
            },
        }
    }
}

fn data_failure(message: String) -> Failure {
    Failure { code: 65, message }
}

fn read_word(arg: &str) -> Result<BraidWord, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| data_failure(format!("{path}: {e}")))?,
        None => arg.to_string(),
    };
    text.trim().parse().map_err(Failure::from)
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialize")
    );
}

#[derive(Serialize)]
struct InvariantsOut {
    word: BraidWord,
    strands: u32,
    classical: bool,
    pure: bool,
    components: usize,
    permutation: Vec<u32>,
    /// Linking matrix; absent for non-classical words.
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<LinkingMatrix>,
}

#[derive(Serialize)]
struct VerifyOut {
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdicts: Option<Vec<fused_core::StepVerdict>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

#[derive(Serialize)]
struct LemmasOut {
    report: fused_core::SuiteReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivations: Option<Vec<fused_core::DeriveOutcome>>,
}

#[derive(Serialize)]
struct ReduceOut {
    canonical: fused_core::CanonicalForm,
    certificate: Certificate,
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Canon { word } => {
            let word = read_word(&word)?;
            let (form, _) = canonical_form(&word)?;
            print_json(&form);
            Ok(ExitCode::SUCCESS)
        }
        Command::Equiv { left, right } => {
            let left = read_word(&left)?;
            let right = read_word(&right)?;
            if fused_equivalent(&left, &right)? {
                println!("equivalent");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("inequivalent");
                Ok(ExitCode::from(1))
            }
        }
        Command::Invariants { word } => {
            let word = read_word(&word)?;
            let permutation = Permutation::of_word(&word);
            let classical = word.first_virtual_position().is_none();
            let lambda = if classical {
                Some(linking_matrix(&word).map_err(Failure::from)?.1)
            } else {
                None
            };
            let out = InvariantsOut {
                strands: word.strands(),
                classical,
                pure: permutation.is_identity(),
                components: closure_components(&word).count(),
                permutation: permutation.images(),
                lambda,
                word,
            };
            print_json(&out);
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce { word, certificate } => {
            let word = read_word(&word)?;
            let (form, cert) = canonical_form(&word)?;
            match certificate {
                Some(path) => {
                    let text = serde_json::to_string_pretty(&cert).expect("reports serialize");
                    fs::write(&path, text)
                        .map_err(|e| data_failure(format!("{}: {e}", path.display())))?;
                    print_json(&form);
                }
                None => print_json(&ReduceOut {
                    canonical: form,
                    certificate: cert,
                }),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyCert { path } => {
            let text = fs::read_to_string(&path)
                .map_err(|e| data_failure(format!("{}: {e}", path.display())))?;
            let cert: Certificate = serde_json::from_str(&text)
                .map_err(|e| data_failure(format!("{}: {e}", path.display())))?;
            match check_certificate(&cert) {
                Ok(report) => {
                    print_json(&VerifyOut {
                        valid: true,
                        steps: Some(report.steps),
                        verdicts: Some(report.verdicts),
                        step: None,
                        reason: None,
                    });
                    Ok(ExitCode::SUCCESS)
                }
                Err(Error::CertificateInvalid { step, reason }) => {
                    print_json(&VerifyOut {
                        valid: false,
                        steps: None,
                        verdicts: None,
                        step: Some(step),
                        reason: Some(reason),
                    });
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(Failure::from(e)),
            }
        }
        Command::Lemmas {
            max_strands,
            derive_m,
            max_states,
        } => {
            let report = run_suite(max_strands);
            let derivations = if derive_m {
                Some(derive_m_moves(max_states)?)
            } else {
                None
            };
            let passed = report.passed()
                && derivations
                    .iter()
                    .flatten()
                    .all(|outcome| outcome.trace.is_some());
            print_json(&LemmasOut {
                report,
                derivations,
            });
            Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Bfs {
            left,
            right,
            max_states,
            max_length,
            closure,
        } => {
            let left = read_word(&left)?;
            let right = read_word(&right)?;
            let level = if closure { Level::Closure } else { Level::Word };
            let mut budget = Budget::default();
            if let Some(states) = max_states {
                budget.max_states = states;
            }
            budget.max_length = max_length;
            match bfs_equivalent(&left, &right, level, &budget)? {
                Some(trace) => {
                    print_json(&trace);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("not found");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::RandomTest { seed, iterations } => {
            let report = sweep(seed, iterations);
            print_json(&report);
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
