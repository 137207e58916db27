//! `tcsm`: check, compose, regionize and verify timed concurrent state
//! machines stored in the line-oriented model format.
//!
//! Exit codes: 0 on success or when the property holds, 1 when a violation
//! or trap is found, 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use tcsm_core::dot::{rcsm_to_dot, reachability_to_dot};
use tcsm_core::model::{serialize_rcsm, serialize_tcsm, Model};
use tcsm_core::rcsm::DEFAULT_REGION_BUDGET;
use tcsm_core::{check_safety, parse_model, ModelFile, RState, RcsmAutomaton, StateId, TcsmAutomaton};

#[derive(Parser)]
#[command(name = "tcsm", version, about = "Timed concurrent state machine toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check well-formedness, timed transition-completeness and zero-time traps.
    Check {
        file: PathBuf,
        /// Treat warnings as violations.
        #[arg(long)]
        strict: bool,
    },
    /// Write the product of all timed automata in FILE.
    Product {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write the region automaton of FILE (of the product if it holds several).
    Regionize {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REGION_BUDGET)]
        max_regions: usize,
    },
    /// Write the product of two region automata.
    Rproduct {
        first: PathBuf,
        second: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REGION_BUDGET)]
        max_regions: usize,
    },
    /// Decide whether a state is reachable; exits 0 if it is, 1 if not.
    Reach {
        file: PathBuf,
        /// State name or tuple, optionally with an `@descriptor` suffix.
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = DEFAULT_REGION_BUDGET)]
        max_regions: usize,
    },
    /// Compose a system with a testing automaton and search for error states.
    Verify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Error state of the testing automaton; may be repeated.
        #[arg(long = "error", required = true)]
        errors: Vec<String>,
        /// Write the witness here instead of standard output.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_REGION_BUDGET)]
        max_regions: usize,
    },
    /// Export the state graph of FILE in Graphviz format.
    Dot {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Fill region states containing this component state in red.
        #[arg(long)]
        error: Option<String>,
        #[arg(long, default_value_t = DEFAULT_REGION_BUDGET)]
        max_regions: usize,
    },
}

fn load(path: &Path) -> Result<ModelFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = parse_model(&text).with_context(|| format!("{}", path.display()))?;
    if file.automata.is_empty() {
        bail!("{}: no automaton declared", path.display());
    }
    Ok(file)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// The region automaton of a file: the single automaton, or the product of
/// all of them.
fn region_system(path: &Path, budget: usize) -> Result<RcsmAutomaton> {
    let file = load(path)?;
    let parts = file
        .automata
        .iter()
        .map(|m| match m {
            Model::Timed(a) => RcsmAutomaton::build_with_budget(a, budget),
            Model::Region(a) => Ok(a.clone()),
        })
        .collect::<tcsm_core::Result<Vec<_>>>()
        .with_context(|| format!("{}", path.display()))?;
    if parts.len() == 1 {
        return Ok(parts.into_iter().next().expect("one part"));
    }
    RcsmAutomaton::product_with_budget(&parts, budget).with_context(|| format!("{}", path.display()))
}

fn check(path: &Path, strict: bool) -> Result<ExitCode> {
    let file = load(path)?;
    let mut violations = 0;
    let mut warnings = 0;
    let mut parts = Vec::new();
    for m in &file.automata {
        let r = match m {
            Model::Timed(a) => {
                for v in a.check_timed_complete()? {
                    violations += 1;
                    let witness: Vec<&str> = v.witness.iter().map(|s| s.name()).collect();
                    println!(
                        "{}: incomplete at {}@{} under inputs {{{}}}",
                        a.name(),
                        v.state,
                        v.region,
                        witness.join(",")
                    );
                }
                let r = RcsmAutomaton::build(a)?;
                for s in a.states() {
                    if !r.rstates().iter().any(|rs| rs.state == *s) {
                        warnings += 1;
                        println!("{}: warning: state {s} is unreachable", a.name());
                    }
                }
                r
            }
            Model::Region(a) => a.clone(),
        };
        for trap in r.zero_time_traps() {
            violations += 1;
            println!("{}: zero-time trap {}", r.name(), format_trap(&trap));
        }
        parts.push(r);
    }
    if parts.len() > 1 && violations == 0 {
        let product = RcsmAutomaton::product(&parts)?;
        for trap in product.zero_time_traps() {
            violations += 1;
            println!("{}: zero-time trap {}", product.name(), format_trap(&trap));
        }
    }
    if violations > 0 || (strict && warnings > 0) {
        return Ok(ExitCode::from(1));
    }
    println!("ok: {} automata, {warnings} warnings", file.automata.len());
    Ok(ExitCode::SUCCESS)
}

fn format_trap(trap: &[RState]) -> String {
    let names: Vec<String> = trap.iter().map(|rs| format!("[{rs}]")).collect();
    names.join(" ")
}

/// Matches `name` against a region state: the whole tuple, with or without
/// the region descriptor.
fn matches_state(rs: &RState, name: &str) -> bool {
    match name.split_once('@') {
        Some(_) => rs.to_string() == name,
        None => rs.state.to_string() == name,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { file, strict } => check(&file, strict),
        Command::Product { file, output } => {
            let machines: Vec<TcsmAutomaton> = load(&file)?.timed()?;
            let product = TcsmAutomaton::product(&machines)?;
            write(&output, &serialize_tcsm(&product))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Regionize {
            file,
            output,
            max_regions,
        } => {
            let r = region_system(&file, max_regions)?;
            write(&output, &serialize_rcsm(&r))?;
            println!(
                "{} region states, {} transitions",
                r.rstates().len(),
                r.transitions().count()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Rproduct {
            first,
            second,
            output,
            max_regions,
        } => {
            let parts = [
                region_system(&first, max_regions)?,
                region_system(&second, max_regions)?,
            ];
            let r = RcsmAutomaton::product_with_budget(&parts, max_regions)?;
            write(&output, &serialize_rcsm(&r))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reach {
            file,
            state,
            max_regions,
        } => {
            let r = region_system(&file, max_regions)?;
            let (path, explored) = r.shortest_path(|rs| matches_state(rs, &state));
            match path {
                Some(steps) => {
                    let end = steps.last().map_or(r.init(), |t| &t.target);
                    println!("reachable: {end} in {} steps ({explored} explored)", steps.len());
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("unreachable: {state} ({explored} explored)");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Verify {
            system,
            test,
            errors,
            witness,
            max_regions,
        } => {
            let sys = region_system(&system, max_regions)?;
            let tester = region_system(&test, max_regions)?;
            let errors = errors
                .iter()
                .map(|e| e.parse::<StateId>())
                .collect::<tcsm_core::Result<Vec<_>>>()?;
            let verdict = check_safety(&sys, &tester, &errors)?;
            match verdict.witness {
                None => {
                    println!(
                        "holds: error states unreachable ({} region states)",
                        verdict.explored
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Some(w) => {
                    println!(
                        "violated: error state reached in {} steps ({} region states)",
                        w.len(),
                        verdict.explored
                    );
                    match witness {
                        Some(path) => write(&path, &w.to_string())?,
                        None => print!("{w}"),
                    }
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Dot {
            file,
            output,
            error,
            max_regions,
        } => {
            let model = load(&file)?;
            let untimed = model
                .automata
                .iter()
                .all(|m| matches!(m, Model::Timed(a) if a.clocks().is_empty()));
            let hit = |s: &StateId| error.as_deref().is_some_and(|e| s.components().any(|c| c == e));
            let text = if untimed {
                let machines: Vec<_> = model
                    .timed()?
                    .iter()
                    .map(|a| a.to_csm().expect("clockless"))
                    .collect();
                let product = tcsm_core::CsmAutomaton::product(&machines)?;
                reachability_to_dot(&product.reachability_graph()?, hit)
            } else {
                let r = region_system(&file, max_regions)?;
                rcsm_to_dot(&r, |rs| hit(&rs.state))
            };
            write(&output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
