//! Command-line front end for the boxlogic toolkit.
//!
//! Exit codes: 0 = success / verified, 1 = checked and failed (rejected
//! derivation, report violation, unprovable goal, uncertified play),
//! 2 = usage or parse error.

mod output;

use anyhow::{anyhow, Context, Result};
use boxlogic::derivation::{check_derivation, Derivation};
use boxlogic::filter::{build_closure, consistency_report, stabilize};
use boxlogic::formula::{parse, Formula, Mover};
use boxlogic::game::{certify_play, extract_defender_strategy, play, Arena, PlayResult, Strategy};
use boxlogic::interp::{
    consistency_transfer, consistency_transfer_auto, weak_interpret, weak_interpret_auto,
    TheoryPair,
};
use boxlogic::random::{random_strategy, rng};
use boxlogic::sequent::{check_tree, prove, LogicVariant, ProofTree, ProveResult, Sequent};
use boxlogic::theory::{parse_theory_file, Theory, Variant};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "boxlogic",
    version,
    about = "Provability-logic toolkit: derivation checking, consistency filters, sequent proving, and the box-insertion game"
)]
struct Cli {
    /// Write the main JSON output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Render human-readable tables instead of JSON where available.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Standard,
    Strengthened,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Standard => Variant::Standard,
            VariantArg::Strengthened => Variant::Strengthened,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LogicArg {
    Minimal,
    Intuitionistic,
    Classical,
}

impl From<LogicArg> for LogicVariant {
    fn from(v: LogicArg) -> LogicVariant {
        match v {
            LogicArg::Minimal => LogicVariant::Minimal,
            LogicArg::Intuitionistic => LogicVariant::Intuitionistic,
            LogicArg::Classical => LogicVariant::Classical,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and echo its normalized rendering.
    Parse { formula: String },
    /// Theory-level operations.
    #[command(subcommand)]
    Theory(TheoryCmd),
    /// Derivation-level operations.
    #[command(subcommand)]
    Derive(DeriveCmd),
    /// Trace the rejection sets over a closure and run the consistency
    /// checks.
    Filter(FilterArgs),
    /// Decide a sequent in a G1 calculus.
    Prove(ProveArgs),
    /// Box-insertion game operations.
    #[command(subcommand)]
    Game(GameCmd),
    /// Weak-interpretation pipeline.
    #[command(subcommand)]
    Interp(InterpCmd),
}

#[derive(Subcommand)]
enum TheoryCmd {
    /// Validate guardedness and indexing of a theory file.
    Check {
        #[arg(long)]
        theory: PathBuf,
        /// Override the variant declared in the file.
        #[arg(long)]
        variant: Option<VariantArg>,
    },
}

#[derive(Subcommand)]
enum DeriveCmd {
    /// Check a derivation file against a theory.
    Check {
        derivation: PathBuf,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        variant: Option<VariantArg>,
    },
}

#[derive(Args)]
struct FilterArgs {
    #[arg(long)]
    theory: PathBuf,
    /// Comma-separated seed formulas.
    #[arg(long)]
    seeds: String,
    #[arg(long)]
    variant: Option<VariantArg>,
    #[arg(long)]
    max_stages: Option<usize>,
}

#[derive(Args)]
struct ProveArgs {
    goal: String,
    #[arg(long, value_enum, default_value = "minimal")]
    logic: LogicArg,
    /// Antecedent formulas (repeatable).
    #[arg(long = "hyp")]
    hypotheses: Vec<String>,
}

#[derive(Subcommand)]
enum GameCmd {
    /// Play the game on a formula with the given strategies.
    Play(PlayArgs),
    /// Prove a formula, extract the defender strategy, and print it.
    Extract {
        subject: String,
        #[arg(long, value_enum, default_value = "minimal")]
        logic: LogicArg,
    },
    /// Certify a play result file.
    Certify {
        result: PathBuf,
        #[arg(long, value_enum, default_value = "minimal")]
        logic: LogicArg,
        /// Budget for the bounded-prover fallback when the play carries
        /// no certificate.
        #[arg(long)]
        budget: Option<u32>,
    },
}

#[derive(Args)]
struct PlayArgs {
    subject: String,
    /// Defender strategy file (JSON).
    #[arg(long, conflicts_with_all = ["defender_const", "extract_defender"])]
    defender: Option<PathBuf>,
    /// Constant defender strategy.
    #[arg(long)]
    defender_const: Option<u32>,
    /// Prove the subject and play the extracted defender strategy,
    /// attaching its certificate.
    #[arg(long)]
    extract_defender: bool,
    #[arg(long, value_enum, default_value = "minimal")]
    logic: LogicArg,
    /// Attacker strategy file (JSON).
    #[arg(long, conflicts_with_all = ["attacker_const", "attacker_random"])]
    attacker: Option<PathBuf>,
    /// Constant attacker strategy.
    #[arg(long)]
    attacker_const: Option<u32>,
    /// Seeded random attacker strategy.
    #[arg(long)]
    attacker_random: bool,
    /// Seed for randomized strategies.
    #[arg(long, default_value = "0")]
    seed: u64,
}

#[derive(Subcommand)]
enum InterpCmd {
    /// Lift a theorem of the stripped theory through the game.
    Run {
        #[arg(long)]
        t2: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(long, value_enum, default_value = "minimal")]
        logic: LogicArg,
        /// Optional sequent proof of `conj(stripped) => goal` (JSON);
        /// proved internally when absent.
        #[arg(long)]
        proof: Option<PathBuf>,
    },
    /// Transfer inconsistency of the stripped theory into the boxed one.
    Transfer {
        #[arg(long)]
        t2: PathBuf,
        #[arg(long, value_enum, default_value = "minimal")]
        logic: LogicArg,
        #[arg(long)]
        proof: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

struct Out {
    path: Option<PathBuf>,
    pretty: bool,
}

impl Out {
    fn emit(&self, value: &serde_json::Value) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.emit_text(&text)
    }

    fn emit_text(&self, text: &str) -> Result<()> {
        match &self.path {
            Some(path) => std::fs::write(path, text.to_string() + "\n")
                .with_context(|| format!("writing {}", path.display()))?,
            None => {
                use std::io::Write;
                let mut stdout = std::io::stdout().lock();
                // a closed pipe on the consumer side is not our error
                if let Err(e) = writeln!(stdout, "{text}") {
                    if e.kind() != std::io::ErrorKind::BrokenPipe {
                        return Err(e.into());
                    }
                }
            }
        }
        Ok(())
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let out = Out {
        path: cli.output.clone(),
        pretty: cli.pretty,
    };
    match &cli.command {
        Command::Parse { formula } => {
            let parsed = parse(formula).map_err(|e| anyhow!("{e}"))?;
            out.emit_text(&parsed.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Theory(TheoryCmd::Check { theory, variant }) => {
            let theory = load_theory(theory, *variant)?;
            let violations = theory.validate();
            if violations.is_empty() {
                out.emit(&json!({
                    "ok": true,
                    "variant": theory.variant,
                    "variables": theory.variable_count(),
                    "hash": theory.hash(),
                }))?;
                Ok(ExitCode::SUCCESS)
            } else {
                let reasons: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                out.emit(&json!({"ok": false, "violations": reasons}))?;
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Derive(DeriveCmd::Check {
            derivation,
            theory,
            variant,
        }) => {
            let theory = match theory {
                Some(path) => load_theory(path, *variant)?,
                None => Theory::empty(variant.map(Into::into).unwrap_or_default()),
            };
            let derivation = load_derivation(derivation)?;
            match check_derivation(&theory, &derivation) {
                Ok(()) => {
                    out.emit(&json!({
                        "ok": true,
                        "lines": derivation.lines.len(),
                        "premises": derivation.premises,
                        "conclusion": derivation.conclusion(),
                    }))?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    out.emit(&json!({
                        "ok": false,
                        "line": e.line,
                        "reason": e.failure.to_string(),
                    }))?;
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::Filter(args) => run_filter(args, &out),
        Command::Prove(args) => run_prove(args, &out),
        Command::Game(cmd) => run_game(cmd, &out),
        Command::Interp(cmd) => run_interp(cmd, &out),
    }
}

fn load_theory(path: &PathBuf, variant: Option<VariantArg>) -> Result<Theory> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut theory = parse_theory_file(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    if let Some(v) = variant {
        theory.variant = v.into();
    }
    Ok(theory)
}

fn load_derivation(path: &PathBuf) -> Result<Derivation> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_axioms(path: &PathBuf) -> Result<Vec<Formula>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut axioms = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let formula = parse(line).map_err(|e| anyhow!("{}:{}: {e}", path.display(), lineno + 1))?;
        axioms.push(formula);
    }
    Ok(axioms)
}

fn run_filter(args: &FilterArgs, out: &Out) -> Result<ExitCode> {
    let theory = load_theory(&args.theory, args.variant)?;
    let violations = theory.validate();
    if !violations.is_empty() {
        let reasons: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        out.emit(&json!({"ok": false, "violations": reasons}))?;
        return Ok(ExitCode::FAILURE);
    }
    let mut seeds = Vec::new();
    for part in args.seeds.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        seeds.push(parse(part).map_err(|e| anyhow!("seed `{part}`: {e}"))?);
    }
    let closure = build_closure(&theory, &seeds).map_err(|e| anyhow!("{e}"))?;
    let max_stages = args
        .max_stages
        .unwrap_or_else(|| closure.default_max_stages());
    let trace = match stabilize(&theory, &closure, max_stages) {
        Ok(t) => t,
        Err(e) => {
            out.emit(&json!({"ok": false, "reason": e.to_string()}))?;
            return Ok(ExitCode::FAILURE);
        }
    };
    let report = consistency_report(&theory, &closure, &trace).map_err(|e| anyhow!("{e}"))?;
    if out.pretty {
        out.emit_text(&output::pretty_report(&report))?;
    } else {
        out.emit(&serde_json::to_value(&report)?)?;
    }
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run_prove(args: &ProveArgs, out: &Out) -> Result<ExitCode> {
    let goal = parse(&args.goal).map_err(|e| anyhow!("goal: {e}"))?;
    let mut antecedent = Vec::new();
    for h in &args.hypotheses {
        antecedent.push(parse(h).map_err(|e| anyhow!("hypothesis `{h}`: {e}"))?);
    }
    let sequent = Sequent::new(antecedent, vec![goal]);
    let logic: LogicVariant = args.logic.into();
    match prove(&sequent, logic).map_err(|e| anyhow!("{e}"))? {
        ProveResult::Proved(tree) => {
            check_tree(&tree, logic).map_err(|e| anyhow!("internal: produced tree fails: {e}"))?;
            if out.pretty {
                out.emit_text(&output::pretty_tree(&tree))?;
            } else {
                out.emit(&json!({
                    "ok": true,
                    "verdict": "provable",
                    "logic": logic,
                    "tree": tree,
                }))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        ProveResult::Unprovable => {
            out.emit(&json!({
                "ok": false,
                "verdict": "unprovable",
                "logic": logic,
                "sequent": sequent,
            }))?;
            Ok(ExitCode::FAILURE)
        }
    }
}

// Accepts a bare proof tree or the wrapper emitted by `prove`.
fn load_tree(path: &PathBuf) -> Result<ProofTree> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(tree) = serde_json::from_str::<ProofTree>(&text) {
        return Ok(tree);
    }
    #[derive(serde::Deserialize)]
    struct Wrapper {
        tree: ProofTree,
    }
    let w: Wrapper = serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}: not a proof tree file: {e}", path.display()))?;
    Ok(w.tree)
}

// Accepts a bare strategy or the wrapper emitted by `game extract`.
fn load_strategy(path: &PathBuf) -> Result<Strategy> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(s) = serde_json::from_str::<Strategy>(&text) {
        return Ok(s);
    }
    #[derive(serde::Deserialize)]
    struct Wrapper {
        strategy: Strategy,
    }
    let w: Wrapper = serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}: not a strategy file: {e}", path.display()))?;
    Ok(w.strategy)
}

fn run_game(cmd: &GameCmd, out: &Out) -> Result<ExitCode> {
    match cmd {
        GameCmd::Play(args) => {
            let subject = parse(&args.subject).map_err(|e| anyhow!("subject: {e}"))?;
            let arena = Arena::for_formula(&subject);
            let mut seed_rng = rng(args.seed);

            let attacker = if let Some(path) = &args.attacker {
                load_strategy(path)?
            } else if args.attacker_random {
                random_strategy(&mut seed_rng, &arena, Mover::Attacker, 3)
            } else {
                Strategy::constant(&arena, Mover::Attacker, args.attacker_const.unwrap_or(0))
            };

            let result: PlayResult = if args.extract_defender {
                let logic: LogicVariant = args.logic.into();
                let proved = boxlogic::sequent::prove_formula(&subject, logic)
                    .map_err(|e| anyhow!("{e}"))?;
                let ProveResult::Proved(tree) = proved else {
                    out.emit(&json!({
                        "ok": false,
                        "reason": format!("`{subject}` is not provable in {logic} logic"),
                    }))?;
                    return Ok(ExitCode::FAILURE);
                };
                let extracted = match extract_defender_strategy(&tree, logic) {
                    Ok(e) => e,
                    Err(e) => {
                        out.emit(&json!({"ok": false, "reason": e.to_string()}))?;
                        return Ok(ExitCode::FAILURE);
                    }
                };
                match extracted.play_against(&attacker) {
                    Ok(r) => r,
                    Err(e) => {
                        out.emit(&json!({"ok": false, "reason": e.to_string()}))?;
                        return Ok(ExitCode::FAILURE);
                    }
                }
            } else {
                let defender = if let Some(path) = &args.defender {
                    load_strategy(path)?
                } else {
                    Strategy::constant(&arena, Mover::Defender, args.defender_const.unwrap_or(0))
                };
                match play(&arena, &defender, &attacker) {
                    Ok(r) => r,
                    Err(e) => {
                        out.emit(&json!({"ok": false, "reason": e.to_string()}))?;
                        return Ok(ExitCode::FAILURE);
                    }
                }
            };
            if out.pretty {
                out.emit_text(&output::pretty_play(&arena, &result))?;
            } else {
                out.emit(&serde_json::to_value(&result)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        GameCmd::Extract { subject, logic } => {
            let subject = parse(subject).map_err(|e| anyhow!("subject: {e}"))?;
            let logic: LogicVariant = (*logic).into();
            let proved =
                boxlogic::sequent::prove_formula(&subject, logic).map_err(|e| anyhow!("{e}"))?;
            let ProveResult::Proved(tree) = proved else {
                out.emit(&json!({
                    "ok": false,
                    "reason": format!("`{subject}` is not provable in {logic} logic"),
                }))?;
                return Ok(ExitCode::FAILURE);
            };
            match extract_defender_strategy(&tree, logic) {
                Ok(extracted) => {
                    if out.pretty {
                        out.emit_text(&output::pretty_arena(
                            &extracted.arena,
                            &extracted.strategy,
                        ))?;
                    } else {
                        out.emit(&json!({
                            "ok": true,
                            "subject": subject,
                            "logic": logic,
                            "arena": extracted.arena,
                            "strategy": extracted.strategy,
                        }))?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    out.emit(&json!({"ok": false, "reason": e.to_string()}))?;
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        GameCmd::Certify {
            result,
            logic,
            budget,
        } => {
            let text = std::fs::read_to_string(result)
                .with_context(|| format!("reading {}", result.display()))?;
            let result: PlayResult =
                serde_json::from_str(&text).map_err(|e| anyhow!("play result: {e}"))?;
            let logic: LogicVariant = (*logic).into();
            let certified = match certify_play(&result, logic, *budget) {
                Ok(b) => b,
                Err(e) => {
                    out.emit(&json!({"ok": false, "reason": e.to_string()}))?;
                    return Ok(ExitCode::FAILURE);
                }
            };
            let method = if result.certificate.is_some() {
                "certificate"
            } else {
                "bounded-search"
            };
            out.emit(&json!({
                "ok": certified,
                "method": method,
                "boxed": result.boxed,
            }))?;
            Ok(if certified {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn run_interp(cmd: &InterpCmd, out: &Out) -> Result<ExitCode> {
    let (t2, goal, logic, proof, transfer) = match cmd {
        InterpCmd::Run {
            t2,
            goal,
            logic,
            proof,
        } => (
            t2,
            Some(parse(goal).map_err(|e| anyhow!("goal: {e}"))?),
            (*logic).into(),
            proof,
            false,
        ),
        InterpCmd::Transfer { t2, logic, proof } => (t2, None, (*logic).into(), proof, true),
    };
    let axioms = load_axioms(t2)?;
    let pair = match TheoryPair::new(axioms) {
        Ok(p) => p,
        Err(e) => {
            out.emit(&json!({"ok": false, "reason": e.to_string()}))?;
            return Ok(ExitCode::FAILURE);
        }
    };
    let d1: Option<ProofTree> = match proof {
        Some(path) => Some(load_tree(path)?),
        None => None,
    };
    let goal = goal.unwrap_or(Formula::Bottom);
    let run = match (&d1, transfer) {
        (Some(tree), false) => weak_interpret(&pair, &goal, tree, logic),
        (Some(tree), true) => consistency_transfer(&pair, tree, logic),
        (None, false) => weak_interpret_auto(&pair, &goal, logic),
        (None, true) => consistency_transfer_auto(&pair, logic),
    };
    match run {
        Ok(result) => {
            // re-check the emitted derivation before reporting success
            let variant = logic.certificate_variant().expect("non-classical");
            check_derivation(&Theory::empty(variant), &result.derivation)
                .map_err(|e| anyhow!("internal: produced derivation fails: {e}"))?;
            out.emit(&serde_json::to_value(&result)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            out.emit(&json!({"ok": false, "reason": e.to_string()}))?;
            Ok(ExitCode::FAILURE)
        }
    }
}
