//! The `dmbl` command line.
//!
//! Exit codes: 0 success, 1 refuted or failed suite, 2 parse or input
//! error, 3 inconclusive (world guard), 4 degenerate distribution where a
//! strictly positive one is required.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use dmbl_core::dump::{dump, load};
use dmbl_core::formula::{parse, parse_unchecked, sorted_atoms, Formula};
use dmbl_core::model::{Case, ModelConfig, ModelState, Schedule, DEFAULT_MAX_WORLDS};
use dmbl_core::prob::{epsilon_prob, load_distribution, prob, DistKind, Distribution};
use dmbl_core::{check_independence, evaluate, fmt_rational, verdict, AtomContext, ModelError, Verdict};

use crate::report::ScenarioReport;
use crate::{appendix_f, suites};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "dmbl", version, about = "Exact conditional-logic model builder and probability extension")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Atom count, or a comma-separated list of names. Defaults to the
    /// formula's atoms in alphabetical order.
    #[arg(long, global = true)]
    pub atoms: Option<String>,
    /// `query` (process what a formula needs) or `faithful` (task list).
    #[arg(long, global = true, default_value = "query")]
    pub schedule: Schedule,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_WORLDS)]
    pub max_worlds: usize,
    /// Distribution file (`atoms: ...` or `worlds: ...` then weights).
    #[arg(long, global = true)]
    pub dist: Option<PathBuf>,
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verdict of a formula in the constructed model.
    Check {
        formula: String,
        /// Write the model reached by the evaluation.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Exact probability of a formula under `--dist`.
    Prob {
        formula: String,
        /// Smooth the distribution and take the limit (zero weights allowed).
        #[arg(long)]
        epsilon: bool,
    },
    /// Whether `psi` is independent of `phi` in the model.
    Indep { psi: String, phi: String },
    /// Search for an instance separating `P(((B|A)|C))` from `P((B|C /\ A))`.
    LewisDemo,
    /// Reproduce the three-world worked example.
    AppendixF {
        /// Write the stage-1 model.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Check a previously dumped model instead of building one.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// Run the invariant, schema and probability suites.
    Regress {
        /// Conditional depth of the formula pools.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Evaluate formulas and write the resulting model.
    Dump {
        formulas: Vec<String>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Load a dumped model and print its statistics.
    Load { path: PathBuf },
}

/// A failure that maps directly to an exit code.
struct Exit {
    code: i32,
    message: String,
}

impl Exit {
    fn input(message: impl Into<String>) -> Self {
        Exit { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<ModelError> for Exit {
    fn from(e: ModelError) -> Self {
        let code = match e {
            ModelError::Guard { .. } | ModelError::StepCap(_) => EXIT_INCONCLUSIVE,
            ModelError::Degenerate => EXIT_DEGENERATE,
            _ => EXIT_INPUT,
        };
        Exit { code, message: e.to_string() }
    }
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            if e.code == EXIT_INCONCLUSIVE {
                let _ = writeln!(out, "Inconclusive ({})", e.message);
            }
            let _ = writeln!(err, "dmbl: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Exit> {
    match &cli.command {
        Command::Check { formula, dump } => cmd_check(cli, formula, dump.as_deref(), out),
        Command::Prob { formula, epsilon } => cmd_prob(cli, formula, *epsilon, out),
        Command::Indep { psi, phi } => cmd_indep(cli, psi, phi, out),
        Command::LewisDemo => cmd_lewis(cli, out),
        Command::AppendixF { dump, from } => cmd_appendix_f(cli, dump.as_deref(), from.as_deref(), out),
        Command::Regress { depth } => cmd_regress(cli, *depth, out),
        Command::Dump { formulas, out: path } => cmd_dump(cli, formulas, path, out),
        Command::Load { path } => cmd_load(cli, path, out),
    }
}

fn emit(cli: &Cli, report: &ScenarioReport, out: &mut dyn Write) -> Result<(), Exit> {
    let text = if cli.json { report.to_json() + "\n" } else { report.to_text() };
    out.write_all(text.as_bytes()).map_err(|e| Exit::input(e.to_string()))
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit::input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Exit> {
    fs::write(path, text).map_err(|e| Exit::input(format!("{}: {e}", path.display())))
}

fn load_dist(cli: &Cli) -> Result<Option<Distribution>, Exit> {
    match &cli.dist {
        None => Ok(None),
        Some(p) => load_distribution(&read(p)?).map(Some).map_err(|e| Exit::input(format!("{}: {e}", p.display()))),
    }
}

fn context_from_flag(flag: &str) -> Result<AtomContext, Exit> {
    if let Ok(n) = flag.trim().parse::<usize>() {
        return AtomContext::standard(n).map_err(|e| Exit::input(e.to_string()));
    }
    let names: Vec<&str> = flag.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    AtomContext::new(&names).map_err(|e| Exit::input(e.to_string()))
}

/// Builds the model for a query: stage 0 comes from `--dist` when given,
/// else from `--atoms`, else from the formulas' atoms.
fn query_model(cli: &Cli, texts: &[&str], dist: Option<&Distribution>) -> Result<(ModelState, Vec<Formula>), Exit> {
    let cfg = ModelConfig { schedule: cli.schedule, max_worlds: cli.max_worlds };
    let mut state = match dist.map(|d| &d.kind) {
        Some(DistKind::Worlds(labels)) => {
            let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
            ModelState::generalized(&labels, None, cfg)?
        }
        Some(DistKind::Atoms(names)) => ModelState::new(AtomContext::new(names)?, cfg)?,
        None => {
            let ctx = match &cli.atoms {
                Some(flag) => context_from_flag(flag)?,
                None => {
                    let parsed: Vec<Formula> = texts
                        .iter()
                        .map(|t| parse_unchecked(t).map_err(|e| Exit::input(e.to_string())))
                        .collect::<Result<_, _>>()?;
                    let mut names = sorted_atoms(parsed.iter());
                    if names.is_empty() {
                        names.push("p".into());
                    }
                    AtomContext::new(&names)?
                }
            };
            ModelState::new(ctx, cfg)?
        }
    };
    if let (Some(flag), Some(_)) = (&cli.atoms, dist) {
        let wanted = context_from_flag(flag)?;
        if wanted.names() != state.context().names() {
            return Err(Exit::input("--atoms disagrees with the distribution file"));
        }
    }
    let formulas = texts
        .iter()
        .map(|t| parse(t, state.context()).map_err(|e| Exit::input(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    state.clear_cache();
    Ok((state, formulas))
}

fn cmd_check(cli: &Cli, text: &str, dump_path: Option<&Path>, out: &mut dyn Write) -> Result<i32, Exit> {
    let dist = load_dist(cli)?;
    let (mut m, f) = query_model(cli, &[text], dist.as_ref())?;
    let v = verdict(&mut m, &f[0])?;
    let mut r = ScenarioReport::new("check");
    r.verdict = v.name().to_string();
    r.see_worlds(m.peak_worlds());
    r.set_value("formula", text.trim());
    r.set_value("stage", m.stage().to_string());
    let code = match &v {
        Verdict::Proved => EXIT_OK,
        Verdict::ValidInModel => {
            r.set_value("note", "holds in the constructed model; completeness is not claimed for modal formulas");
            EXIT_OK
        }
        Verdict::Refuted { witness } => {
            r.witness = Some(witness.clone());
            EXIT_REFUTED
        }
        Verdict::Inconclusive { reason } => {
            r.set_value("reason", reason.clone());
            EXIT_INCONCLUSIVE
        }
    };
    if let Some(p) = dump_path {
        if let Some(d) = &dist {
            if d.strictly_positive() {
                m.attach_measure(d)?;
            }
        }
        write_file(p, &dump(&m, dist.as_ref()))?;
    }
    if cli.json {
        emit(cli, &r, out)?;
    } else {
        let mut line = v.to_string();
        if let Verdict::ValidInModel = v {
            line.push_str(" (sound in the model; modal completeness is not claimed)");
        }
        writeln!(out, "{line}").map_err(|e| Exit::input(e.to_string()))?;
    }
    Ok(code)
}

fn cmd_prob(cli: &Cli, text: &str, epsilon: bool, out: &mut dyn Write) -> Result<i32, Exit> {
    let dist = load_dist(cli)?.ok_or_else(|| Exit::input("prob needs --dist"))?;
    let (mut m, f) = query_model(cli, &[text], Some(&dist))?;
    let value = if epsilon {
        m.attach_smoothed(&dist)?;
        epsilon_prob(&mut m, &f[0])?
    } else {
        if !dist.strictly_positive() {
            return Err(Exit {
                code: EXIT_DEGENERATE,
                message: "distribution has zero-weight worlds; rerun with --epsilon".into(),
            });
        }
        m.attach_measure(&dist)?;
        prob(&mut m, &f[0])?
    };
    let mut r = ScenarioReport::new("prob");
    r.verdict = "ok".into();
    r.see_worlds(m.peak_worlds());
    r.set_value("formula", text.trim());
    r.set_value("probability", fmt_rational(&value));
    if cli.json {
        emit(cli, &r, out)?;
    } else {
        writeln!(out, "{}", fmt_rational(&value)).map_err(|e| Exit::input(e.to_string()))?;
    }
    Ok(EXIT_OK)
}

fn cmd_indep(cli: &Cli, psi: &str, phi: &str, out: &mut dyn Write) -> Result<i32, Exit> {
    let dist = load_dist(cli)?;
    let (mut m, f) = query_model(cli, &[psi, phi], dist.as_ref())?;
    let held = check_independence(&mut m, &f[0], &f[1])?;
    let mut r = ScenarioReport::new("indep");
    r.verdict = if held { "independent" } else { "dependent" }.into();
    r.see_worlds(m.peak_worlds());
    r.set_value("psi", psi.trim());
    r.set_value("phi", phi.trim());
    if cli.json {
        emit(cli, &r, out)?;
    } else {
        writeln!(out, "{}", r.verdict).map_err(|e| Exit::input(e.to_string()))?;
    }
    Ok(EXIT_OK)
}

fn suite_exit(r: &ScenarioReport) -> i32 {
    if r.passed() {
        EXIT_OK
    } else {
        EXIT_REFUTED
    }
}

fn cmd_lewis(cli: &Cli, out: &mut dyn Write) -> Result<i32, Exit> {
    let dist = load_dist(cli)?;
    let r = suites::lewis_demo(dist.as_ref(), cli.seed, cli.max_worlds.min(20_000))?;
    emit(cli, &r, out)?;
    Ok(suite_exit(&r))
}

fn cmd_appendix_f(cli: &Cli, dump_path: Option<&Path>, from: Option<&Path>, out: &mut dyn Write) -> Result<i32, Exit> {
    let m = match from {
        Some(p) => load(&read(p)?).map_err(|e| Exit::input(format!("{}: {e}", p.display())))?.0,
        None => appendix_f::build(),
    };
    if let Some(p) = dump_path {
        write_file(p, &dump(&m, Some(&appendix_f::distribution())))?;
    }
    let r = appendix_f::check(&m);
    emit(cli, &r, out)?;
    Ok(suite_exit(&r))
}

fn cmd_regress(cli: &Cli, depth: usize, out: &mut dyn Write) -> Result<i32, Exit> {
    let atoms = match &cli.atoms {
        None => 2,
        Some(flag) => flag.trim().parse::<usize>().map_err(|_| Exit::input("regress takes --atoms N"))?,
    };
    if atoms == 0 || atoms > 3 {
        return Err(Exit::input("regress supports 1 to 3 atoms"));
    }
    let cfg = suites::RegressConfig { atoms, depth, seed: cli.seed, max_worlds: cli.max_worlds };
    let r = suites::regress(&cfg);
    emit(cli, &r, out)?;
    Ok(suite_exit(&r))
}

fn stats(m: &ModelState, r: &mut ScenarioReport) {
    r.see_worlds(m.peak_worlds());
    r.set_value("stage", m.stage().to_string());
    r.set_value("worlds", m.world_count().to_string());
    r.set_value("steps", m.records().len().to_string());
    let revisits = m.records().iter().filter(|x| x.case != Case::Fresh).count();
    r.set_value("revisits", revisits.to_string());
    r.set_value("schedule", m.config().schedule.to_string());
    r.set_value("atoms", m.context().names().join(" "));
    let measure = match m.measure_ref() {
        None => "none",
        Some(a) if a.is_exact() => "exact",
        Some(_) => "smoothed",
    };
    r.set_value("measure", measure);
}

fn cmd_dump(cli: &Cli, texts: &[String], path: &Path, out: &mut dyn Write) -> Result<i32, Exit> {
    let dist = load_dist(cli)?;
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let (mut m, formulas) = query_model(cli, &refs, dist.as_ref())?;
    if let Some(d) = &dist {
        if d.strictly_positive() {
            m.attach_measure(d)?;
        } else {
            m.attach_smoothed(d)?;
        }
    }
    for f in &formulas {
        evaluate(&mut m, f)?;
    }
    write_file(path, &dump(&m, dist.as_ref()))?;
    let mut r = ScenarioReport::new("dump");
    stats(&m, &mut r);
    emit(cli, &r, out)?;
    Ok(EXIT_OK)
}

fn cmd_load(cli: &Cli, path: &Path, out: &mut dyn Write) -> Result<i32, Exit> {
    let (m, _) = load(&read(path)?).map_err(|e| Exit::input(format!("{}: {e}", path.display())))?;
    let mut r = ScenarioReport::new("load");
    stats(&m, &mut r);
    emit(cli, &r, out)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> (i32, String) {
        let cli = Cli::try_parse_from(std::iter::once("dmbl").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&cli, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn check_exit_codes() {
        assert_eq!(go(&["check", "(q|p) -> (p -> q)"]).0, EXIT_OK);
        let (code, text) = go(&["check", "(q|p) <-> q"]);
        assert_eq!(code, EXIT_REFUTED);
        assert!(text.starts_with("Refuted at ("), "{text}");
        assert_eq!(go(&["check", "box p -> p"]).0, EXIT_OK);
        assert_eq!(go(&["check", "q | p"]).0, EXIT_INPUT);
    }

    #[test]
    fn atoms_flag_forms() {
        assert_eq!(go(&["--atoms", "2", "check", "p -> p"]).0, EXIT_OK);
        assert_eq!(go(&["--atoms", "p,q,r", "check", "r -> r"]).0, EXIT_OK);
        assert_eq!(go(&["--atoms", "1", "check", "q"]).0, EXIT_INPUT);
    }

    #[test]
    fn guard_is_inconclusive() {
        let (code, text) = go(&["--max-worlds", "10", "check", "((q|p)|(p|q))"]);
        assert_eq!(code, EXIT_INCONCLUSIVE);
        assert!(text.starts_with("Inconclusive"), "{text}");
    }
}
