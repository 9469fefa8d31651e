//! Command-line front end: check consistency, compile to an artifact,
//! answer queries, and run the model oracle.
//!
//! Exit codes: 0 success (including any query answer), 1 a negative verdict
//! (inconsistent / no model / not a model), 2 usage or input errors,
//! 3 conflicting evidence in a query.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use empdb::compiler::{compile, CompiledProgram};
use empdb::consistency::{assemble_system, check_consistency};
use empdb::oracle::search_models;
use empdb::query::{answer, Query};
use empdb::render::{
    model_literals, render_answer_human, render_answer_json, render_check_human,
    render_check_json,
};
use empdb::syntax::{
    parse_artifact, parse_interpretation, parse_program, parse_query, render_artifact,
    render_interpretation,
};
use empdb::{Error, Mode};

#[derive(Parser)]
#[command(
    name = "empdb",
    version,
    about = "Deductive databases with statistical probability intervals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Per-predicate population bounds from each ground model.
    Paper,
    /// Per-signature bounds; every constant must fit the rules.
    Strict,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Paper => Mode::Paper,
            ModeArg::Strict => Mode::Strict,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether any finite interpretation satisfies the program.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        /// Print the linear system of every examined ground model.
        #[arg(long)]
        dump_constraints: bool,
        /// Emit the verdict as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Chain the empirical clauses to a fixpoint and save the result.
    Compile {
        file: PathBuf,
        /// Where to write the compiled artifact.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Answer "Formula(constant)" from a program or compiled artifact.
    Query {
        file: PathBuf,
        /// The question, e.g. "~White(clyde)".
        query: String,
        /// Emit the answer as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Definition-level model tools for cross-checking the engine.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Look for a model of the program over bounded domains.
    Search {
        file: PathBuf,
        /// Largest domain size to try.
        #[arg(long)]
        max_domain: usize,
    },
    /// Test whether an interpretation file satisfies the program.
    Check {
        file: PathBuf,
        interpretation: PathBuf,
    },
}

struct Failure {
    message: String,
    code: u8,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        let code = match err {
            Error::EmptyIntersection(_) => 3,
            _ => 2,
        };
        Failure {
            message: err.to_string(),
            code,
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|err| Failure {
        message: format!("cannot read {}: {err}", path.display()),
        code: 2,
    })
}

/// Artifacts announce themselves; anything else is program source.
fn load_compiled(path: &Path) -> Result<CompiledProgram, Failure> {
    let text = read_file(path)?;
    if text.lines().any(|l| l.trim() == "%% program") {
        Ok(parse_artifact(&text)?)
    } else {
        Ok(compile(&parse_program(&text)?)?)
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Check {
            file,
            mode,
            dump_constraints,
            json,
        } => {
            let program = parse_program(&read_file(&file)?)?;
            let mode = Mode::from(mode);
            let report = check_consistency(&program, mode)?;
            if dump_constraints {
                for (i, entry) in report.trace.iter().enumerate() {
                    let literals = model_literals(&entry.model, &program.predicates);
                    let described = if literals.is_empty() {
                        "(empty ground side)".to_string()
                    } else {
                        literals.join(" ")
                    };
                    println!("; ground model {}: {}", i + 1, described);
                    print!(
                        "{}",
                        assemble_system(&program, &entry.model, mode)
                            .render(&program.predicates)
                    );
                }
            }
            if json {
                println!("{}", render_check_json(&report, &program.predicates));
            } else {
                print!("{}", render_check_human(&report, &program.predicates));
            }
            Ok(ExitCode::from(if report.consistent { 0 } else { 1 }))
        }

        Command::Compile { file, output } => {
            let program = parse_program(&read_file(&file)?)?;
            let compiled = compile(&program)?;
            fs::write(&output, render_artifact(&compiled)).map_err(|err| Failure {
                message: format!("cannot write {}: {err}", output.display()),
                code: 2,
            })?;
            let mut sizes = compiled.iteration_sizes.iter();
            if let Some(start) = sizes.next() {
                println!("start: {start} clauses");
            }
            for (i, n) in sizes.enumerate() {
                println!("iteration {}: {n} clauses", i + 1);
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Query { file, query, json } => {
            let compiled = load_compiled(&file)?;
            let preds = &compiled.source.predicates;
            let (property, subject) = parse_query(&query, preds)?;
            let ans = answer(
                &compiled,
                &Query {
                    subject,
                    property,
                },
            )?;
            if json {
                println!("{}", render_answer_json(&ans, preds));
            } else {
                print!("{}", render_answer_human(&ans, preds));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Oracle { command } => match command {
            OracleCommand::Search { file, max_domain } => {
                let program = parse_program(&read_file(&file)?)?;
                match search_models(&program, max_domain)? {
                    Some(interp) => {
                        print!("{}", render_interpretation(&interp, &program.predicates));
                        Ok(ExitCode::SUCCESS)
                    }
                    None => {
                        println!("no model up to domain {max_domain}");
                        Ok(ExitCode::from(1))
                    }
                }
            }
            OracleCommand::Check {
                file,
                interpretation,
            } => {
                let program = parse_program(&read_file(&file)?)?;
                let interp =
                    parse_interpretation(&read_file(&interpretation)?, &program.predicates)?;
                if interp.is_model(&program)? {
                    println!("model");
                    Ok(ExitCode::SUCCESS)
                } else {
                    println!("not-a-model");
                    Ok(ExitCode::from(1))
                }
            }
        },
    }
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`empdb check ... | head`) the way other
    // line-oriented tools do, instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
