//! `chorcheck`: parse, run and model-check Global Calculus choreographies.
//!
//! Exit status: 0 when the question asked has a positive answer (formula
//! holds, PCP solution found, file already formatted), 1 for a negative
//! answer, 2 for usage, parse and input errors, 3 when `--timeout` expires.

mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{mpsc, Arc};
use std::time::Duration;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use chorcheck_core::ast::{ActionLabel, Choreography};
use chorcheck_core::checker::{Checker, Verdict};
use chorcheck_core::pcp::{encode_pcp, search_observed, PcpInstance};
use chorcheck_core::semantics::{explore, normal_form, step, Configuration, TraceEntry};
use chorcheck_core::syntax::{parse_document, print_document, print_formula, Declaration, Document};

use input::StateArgs;
use output::{Format, Palette};

#[derive(Parser)]
#[command(name = "chorcheck", version, about = "Model checking for choreographies in the Global Calculus")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Give up after this many seconds (exit status 3).
    #[arg(long, value_name = "SECONDS", global = true)]
    timeout: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a choreography satisfies global-logic formulae.
    Check {
        /// Choreography document (`.gc`).
        file: PathBuf,
        /// Formula document (`.gl`); defaults to the formulae in FILE.
        #[arg(long, value_name = "FILE", conflicts_with = "formula_text")]
        formula: Option<PathBuf>,
        /// A formula given inline.
        #[arg(long, value_name = "FORMULA")]
        formula_text: Option<String>,
        /// Which choreography of FILE to check.
        #[arg(long, value_name = "NAME")]
        chor: Option<String>,
        /// Which formula to check; all of them when omitted.
        #[arg(long, value_name = "NAME")]
        name: Option<String>,
        #[command(flatten)]
        state: StateArgs,
        /// Print a derivation for every formula that holds.
        #[arg(long)]
        witness: bool,
    },
    /// Run a choreography and print its trace.
    Simulate {
        file: PathBuf,
        #[arg(long, value_name = "NAME")]
        chor: Option<String>,
        #[command(flatten)]
        state: StateArgs,
        /// Maximum number of steps (required for recursive choreographies).
        #[arg(long, value_name = "STEPS")]
        budget: Option<usize>,
        /// Print every reachable configuration instead of a single run.
        #[arg(long)]
        all: bool,
        /// Pick enabled transitions at random from this seed instead of
        /// always taking the first one.
        #[arg(long, conflicts_with = "all")]
        seed: Option<u64>,
    },
    /// Search the PCP encoding for a configuration where both words agree.
    Pcp {
        /// Pairs `s1:t1,s2:t2,...` over {0, 1}.
        #[arg(long, value_name = "PAIRS")]
        pairs: String,
        /// Maximum number of transitions explored from the start.
        #[arg(long, default_value_t = 30)]
        depth: usize,
        /// Also print the generated choreography document.
        #[arg(long)]
        show_encoding: bool,
    },
    /// Pretty-print a `.gc`/`.gl` document. Comments are not preserved.
    Fmt {
        file: PathBuf,
        /// Only report whether FILE is already formatted.
        #[arg(long)]
        check: bool,
    },
}

/// What a finished command hands back: its output and exit status.
struct Report {
    stdout: String,
    status: u8,
}

enum Outcome {
    Done(Result<Report>),
    TimedOut { progress: u64 },
}

/// Runs `work` on its own thread (with a generous stack, since terms and
/// formulae are processed recursively) and waits at most `timeout`.
fn run_bounded<F>(timeout: Option<f64>, progress: Arc<AtomicU64>, cancel: Arc<AtomicBool>, work: F) -> Outcome
where
    F: FnOnce() -> Result<Report> + Send + 'static,
{
    let (tx, rx) = mpsc::channel();
    let spawned = std::thread::Builder::new().stack_size(512 << 20).spawn(move || {
        let _ = tx.send(work());
    });
    if let Err(e) = spawned {
        return Outcome::Done(Err(e.into()));
    }
    let received = match timeout {
        None => rx.recv().map_err(|_| None),
        Some(secs) => rx.recv_timeout(Duration::from_secs_f64(secs.max(0.0))).map_err(|e| match e {
            mpsc::RecvTimeoutError::Timeout => Some(()),
            mpsc::RecvTimeoutError::Disconnected => None,
        }),
    };
    match received {
        Ok(r) => Outcome::Done(r),
        Err(Some(())) => {
            cancel.store(true, Ordering::Relaxed);
            Outcome::TimedOut {
                progress: progress.load(Ordering::Relaxed),
            }
        }
        Err(None) => Outcome::Done(Err(anyhow::anyhow!("internal error: the worker thread panicked"))),
    }
}

#[derive(Serialize)]
struct CheckResult {
    formula: String,
    text: String,
    #[serde(flatten)]
    verdict: Verdict,
}

#[derive(Serialize)]
struct CheckReport {
    choreography: String,
    results: Vec<CheckResult>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    file: PathBuf,
    formula: Option<PathBuf>,
    formula_text: Option<String>,
    chor: Option<String>,
    name: Option<String>,
    state: StateArgs,
    witness: bool,
    format: Format,
    palette: Palette,
    progress: Arc<AtomicU64>,
    cancel: Arc<AtomicBool>,
) -> Result<Report> {
    let model = input::load_model(&file, chor.as_deref(), &state)?;
    let formulas = input::load_formulas(
        &model.doc,
        &file,
        formula.as_deref(),
        formula_text.as_deref(),
        name.as_deref(),
    )?;
    let mut checker = Checker::new().with_progress(progress).with_cancel(cancel);
    let mut results = Vec::new();
    let mut decided = 0;
    for (fname, f) in formulas {
        let mut verdict = if witness {
            checker.prove(&model.config, &f)?
        } else {
            checker.entails(&model.config, &f)?
        };
        // The checker counts across queries; report each formula's share.
        (decided, verdict.judgments) = (verdict.judgments, verdict.judgments - decided);
        results.push(CheckResult {
            formula: fname,
            text: print_formula(&f),
            verdict,
        });
    }
    let all_hold = results.iter().all(|r| r.verdict.holds);
    let report = CheckReport {
        choreography: model.name,
        results,
    };
    let stdout = match format {
        Format::Json => output::json(&report),
        Format::Text => {
            let mut out = String::new();
            for r in &report.results {
                let verdict = if r.verdict.holds {
                    palette.good("holds")
                } else {
                    palette.bad("fails")
                };
                out.push_str(&format!(
                    "{}: {verdict} on {} ({} judgment{})\n",
                    r.formula,
                    report.choreography,
                    r.verdict.judgments,
                    if r.verdict.judgments == 1 { "" } else { "s" }
                ));
                if let Some(p) = &r.verdict.witness {
                    output::proof_tree(p, 1, &mut out);
                }
            }
            out
        }
    };
    Ok(Report {
        stdout,
        status: if all_hold { 0 } else { 1 },
    })
}

#[derive(Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum RunEnd {
    Terminated,
    Stuck,
    BudgetExhausted,
}

#[derive(Serialize)]
struct RunReport {
    choreography: String,
    outcome: RunEnd,
    steps: usize,
    trace: Vec<TraceEntry>,
    #[serde(rename = "final")]
    last: Configuration,
}

#[derive(Serialize)]
struct Edge {
    source: usize,
    label: ActionLabel,
    target: usize,
}

#[derive(Serialize)]
struct GraphReport {
    choreography: String,
    nodes: Vec<Configuration>,
    edges: Vec<Edge>,
    truncated: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    file: PathBuf,
    chor: Option<String>,
    state: StateArgs,
    budget: Option<usize>,
    all: bool,
    seed: Option<u64>,
    format: Format,
    palette: Palette,
    progress: Arc<AtomicU64>,
) -> Result<Report> {
    let model = input::load_model(&file, chor.as_deref(), &state)?;
    if budget.is_none() {
        if let Some(x) = model.config.chor.first_recursion() {
            bail!("`{}` is recursive (`rec {x}`); give a step bound with --budget", model.name);
        }
    }
    if all {
        let ex = explore(&model.config, budget, &Default::default())?;
        progress.store(ex.nodes.len() as u64, Ordering::Relaxed);
        let report = GraphReport {
            choreography: model.name,
            nodes: ex.nodes,
            edges: ex
                .edges
                .into_iter()
                .map(|(source, label, target)| Edge { source, label, target })
                .collect(),
            truncated: ex.truncated,
        };
        let stdout = match format {
            Format::Json => output::json(&report),
            Format::Text => {
                let mut out = format!(
                    "{}: {} configurations, {} transitions{}\n",
                    report.choreography,
                    report.nodes.len(),
                    report.edges.len(),
                    if report.truncated {
                        palette.note(" (truncated by the budget)")
                    } else {
                        String::new()
                    }
                );
                for (i, n) in report.nodes.iter().enumerate() {
                    out.push_str(&format!("  [{i}] {}\n", output::config_line(n)));
                }
                for e in &report.edges {
                    out.push_str(&format!(
                        "  [{}] --{}--> [{}]\n",
                        e.source,
                        chorcheck_core::syntax::print_label(&e.label),
                        e.target
                    ));
                }
                out
            }
        };
        return Ok(Report { stdout, status: 0 });
    }

    let mut rng = seed.map(StdRng::seed_from_u64);
    let mut cur = model.config.clone();
    let mut trace = Vec::new();
    let outcome = loop {
        let mut ts = step(&cur);
        if ts.is_empty() {
            break if normal_form(&cur.chor) == Choreography::Inaction {
                RunEnd::Terminated
            } else {
                RunEnd::Stuck
            };
        }
        if budget.is_some_and(|b| trace.len() >= b) {
            break RunEnd::BudgetExhausted;
        }
        let pick = rng.as_mut().map_or(0, |r| r.gen_range(0..ts.len()));
        let t = ts.swap_remove(pick);
        trace.push(TraceEntry::between(&cur.state, &t));
        progress.store(trace.len() as u64, Ordering::Relaxed);
        cur = t.target;
    };
    let report = RunReport {
        choreography: model.name,
        outcome,
        steps: trace.len(),
        trace,
        last: cur,
    };
    let stdout = match format {
        Format::Json => output::json(&report),
        Format::Text => {
            let mut out = String::new();
            for (i, e) in report.trace.iter().enumerate() {
                out.push_str(&output::trace_line(i, e));
                out.push('\n');
            }
            let n = report.steps;
            out.push_str(&match report.outcome {
                RunEnd::Terminated => format!("{} after {n} steps\n", palette.good("terminated")),
                RunEnd::Stuck => format!(
                    "{} after {n} steps in {}\n",
                    palette.bad("stuck"),
                    output::config_line(&report.last)
                ),
                RunEnd::BudgetExhausted => format!("{} after {n} steps\n", palette.note("budget exhausted")),
            });
            out
        }
    };
    Ok(Report { stdout, status: 0 })
}

#[derive(Serialize)]
struct PcpSolutionReport {
    sequence: Vec<usize>,
    str1: String,
    str2: String,
    depth: usize,
    /// False when the goal holds between the two replies of a round, so the
    /// index sequence does not solve the instance.
    solves: bool,
    trace: Vec<TraceEntry>,
}

#[derive(Serialize)]
struct PcpReport {
    instance: String,
    bound: usize,
    explored: usize,
    solution: Option<PcpSolutionReport>,
}

fn cmd_pcp(
    pairs: String,
    depth: usize,
    show_encoding: bool,
    format: Format,
    palette: Palette,
    progress: Arc<AtomicU64>,
) -> Result<Report> {
    let inst = PcpInstance::parse(&pairs)?;
    let search = search_observed(&inst, depth, &progress);
    let report = PcpReport {
        instance: inst.to_string(),
        bound: depth,
        explored: search.explored,
        solution: search.solution.map(|s| PcpSolutionReport {
            solves: s.solves(&inst),
            sequence: s.sequence,
            str1: s.str1,
            str2: s.str2,
            depth: s.depth,
            trace: s.trace,
        }),
    };
    let status = if report.solution.is_some() { 0 } else { 1 };
    let stdout = match format {
        Format::Json => output::json(&report),
        Format::Text => {
            let mut out = String::new();
            if show_encoding {
                let cfg = encode_pcp(&inst);
                let doc = Document {
                    declarations: vec![Declaration::State(cfg.state), Declaration::Chor("pcp".into(), cfg.chor)],
                };
                out.push_str(&format!("// PCP instance {inst}\n{}\n", print_document(&doc)));
            }
            match &report.solution {
                None => out.push_str(&format!("{} (bound {depth})\n", palette.bad("NO SOLUTION FOUND"))),
                Some(s) => {
                    out.push_str(&format!("{} sequence {:?}\n", palette.good("SOLUTION"), s.sequence));
                    out.push_str(&format!("  str1@A = {:?}, str2@A = {:?} after {} steps\n", s.str1, s.str2, s.depth));
                    if !s.solves {
                        out.push_str(&format!(
                            "  {}\n",
                            palette.note(&format!(
                                "note: the goal holds between the two replies of a round; {:?} does not solve the instance",
                                s.sequence
                            ))
                        ));
                    }
                    for (i, e) in s.trace.iter().enumerate() {
                        out.push_str(&output::trace_line(i, e));
                        out.push('\n');
                    }
                }
            }
            out.push_str(&format!("explored {} configurations\n", report.explored));
            out
        }
    };
    Ok(Report { stdout, status })
}

#[derive(Serialize)]
struct FmtReport {
    file: PathBuf,
    formatted: String,
    changed: bool,
}

fn cmd_fmt(file: PathBuf, check: bool, format: Format) -> Result<Report> {
    let text = std::fs::read_to_string(&file).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", file.display()))?;
    let doc = parse_document(&text, Some(&file))?;
    let formatted = print_document(&doc);
    let changed = formatted != text;
    let status = if check && changed { 1 } else { 0 };
    let stdout = match (format, check) {
        (Format::Json, _) => output::json(&FmtReport {
            file,
            formatted,
            changed,
        }),
        (Format::Text, true) if changed => format!("{} is not formatted\n", file.display()),
        (Format::Text, true) => String::new(),
        (Format::Text, false) => formatted,
    };
    Ok(Report { stdout, status })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let palette = Palette::from_env(format);
    let progress = Arc::new(AtomicU64::new(0));
    let cancel = Arc::new(AtomicBool::new(false));
    let unit = match &cli.command {
        Command::Check { .. } => "judgments decided",
        Command::Simulate { all: true, .. } => "configurations explored",
        Command::Simulate { .. } => "steps taken",
        Command::Pcp { .. } => "configurations explored",
        Command::Fmt { .. } => "documents formatted",
    };
    let (p, c) = (progress.clone(), cancel.clone());
    let work = move || -> Result<Report> {
        match cli.command {
            Command::Check {
                file,
                formula,
                formula_text,
                chor,
                name,
                state,
                witness,
            } => cmd_check(file, formula, formula_text, chor, name, state, witness, format, palette, p, c),
            Command::Simulate {
                file,
                chor,
                state,
                budget,
                all,
                seed,
            } => cmd_simulate(file, chor, state, budget, all, seed, format, palette, p),
            Command::Pcp {
                pairs,
                depth,
                show_encoding,
            } => cmd_pcp(pairs, depth, show_encoding, format, palette, p),
            Command::Fmt { file, check } => cmd_fmt(file, check, format),
        }
    };
    match run_bounded(cli.timeout, progress, cancel, work) {
        Outcome::Done(Ok(r)) => {
            print!("{}", r.stdout);
            ExitCode::from(r.status)
        }
        Outcome::Done(Err(e)) => {
            eprintln!("{} {e:#}", Palette::from_env(Format::Text).bad("error:"));
            ExitCode::from(2)
        }
        Outcome::TimedOut { progress } => {
            eprintln!(
                "{} no answer within {}s ({progress} {unit} so far)",
                Palette::from_env(Format::Text).bad("timeout:"),
                cli.timeout.unwrap_or_default()
            );
            ExitCode::from(3)
        }
    }
}
