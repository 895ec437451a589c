//! Axiom and theorem schemata, instantiated over formula pools and checked
//! against freshly built models.
//!
//! A schema is a formula template whose `{phi}`, `{psi}` and `{eta}` slots
//! are replaced by pool formulas. Must-hold schemata fail the suite when an
//! instance is not valid in the model; the others are only reported.

use dmbl_core::formula::{parse_unchecked, render, Formula};
use dmbl_core::model::{ModelConfig, ModelState};
use dmbl_core::{verdict, AtomContext, Verdict};

use crate::pools;
use crate::report::ScenarioReport;

pub struct Schema {
    pub name: &'static str,
    pub template: &'static str,
    pub must_hold: bool,
}

const fn must(name: &'static str, template: &'static str) -> Schema {
    Schema { name, template, must_hold: true }
}

const fn reported(name: &'static str, template: &'static str) -> Schema {
    Schema { name, template, must_hold: false }
}

pub const SCHEMATA: &[Schema] = &[
    must("b1", "box ({phi} -> {psi}) -> (box ~{phi} \\/ box ({psi} | {phi}))"),
    must("b2", "({psi} -> {eta} | {phi}) -> (({psi} | {phi}) -> ({eta} | {phi}))"),
    must("b3", "({psi} | {phi}) -> ({phi} -> {psi})"),
    must("b4", "~(~{psi} | {phi}) <-> ({psi} | {phi})"),
    must("b5.weak.A", "indep({psi}, ~{phi}) <-> indep({psi}, {phi})"),
    must("b5.weak.B", "box ({psi} <-> {eta}) -> box (({phi} | {psi}) <-> ({phi} | {eta}))"),
    must("m2", "box ({phi} -> {psi}) -> (box {phi} -> box {psi})"),
    must("m3", "box {phi} -> {phi}"),
    must("full-universe", "box {phi} -> indep({psi}, {phi})"),
    must("full-universe.top", "({psi} | top) <-> {psi}"),
    must("empty-universe", "box ~{phi} -> indep({psi}, {phi})"),
    must("empty-universe.bot", "({psi} | bot) <-> {psi}"),
    must(
        "left-equivalences",
        "box ({psi} <-> {eta}) -> (box ~{phi} \\/ box (({psi} | {phi}) <-> ({eta} | {phi})))",
    ),
    must("left-equivalences.corollary", "box ({psi} <-> {eta}) -> box (({psi} | {phi}) <-> ({eta} | {phi}))"),
    must("classical.not", "(~{psi} | {phi}) <-> ~({psi} | {phi})"),
    must("classical.and", "({psi} /\\ {eta} | {phi}) <-> ({psi} | {phi}) /\\ ({eta} | {phi})"),
    must("classical.or", "({psi} \\/ {eta} | {phi}) <-> ({psi} | {phi}) \\/ ({eta} | {phi})"),
    must("classical.implies", "({psi} -> {eta} | {phi}) <-> (({psi} | {phi}) -> ({eta} | {phi}))"),
    must("sure-consequent", "box {psi} -> box ({psi} | {phi})"),
    must("sure-consequent.top", "(top | {phi}) <-> top"),
    must("sure-consequent.bot", "(bot | {phi}) <-> bot"),
    must("inference", "({psi} | {phi}) /\\ {phi} <-> {phi} /\\ {psi}"),
    must("introspection", "box ~{phi} \\/ box ({phi} | {phi})"),
    must("inter-independence", "indep(({psi} | {phi}), {phi})"),
    must("independence-invariance.not", "indep({psi}, {phi}) -> indep(~{psi}, {phi})"),
    must("independence-invariance.and", "indep({psi}, {phi}) /\\ indep({eta}, {phi}) -> indep({psi} /\\ {eta}, {phi})"),
    must(
        "independence-invariance.equiv",
        "box ({psi} <-> {eta}) -> (indep({psi}, {phi}) <-> indep({eta}, {phi}))",
    ),
    must("narcissistic-independence", "indep({phi}, {phi}) -> (box ~{phi} \\/ box {phi})"),
    must("independence-and-proof", "indep({psi}, {phi}) -> (box ({phi} \\/ {psi}) -> (box {phi} \\/ box {psi}))"),
    must(
        "independence-and-regularity",
        "indep({phi}, {eta}) /\\ indep({psi}, {eta}) -> (box ({phi} /\\ {eta} -> {psi} /\\ {eta}) -> (box ~{eta} \\/ box ({phi} -> {psi})))",
    ),
    reported("right-equivalences", "box ({psi} <-> {eta}) -> box (({phi} | {psi}) <-> ({phi} | {eta}))"),
    reported("reduction", "({phi} | ({psi} | {phi})) <-> {phi}"),
    reported(
        "markov",
        "indep(({eta} | {psi}), {phi}) /\\ dia ({phi} /\\ {psi}) -> box (({eta} | {psi}) <-> ({eta} | {phi} /\\ {psi}))",
    ),
    reported("double-proposition.independence", "indep(({eta} | {phi} /\\ {psi}), ({psi} | {phi}))"),
    reported("double-proposition.product", "({eta} | {phi} /\\ {psi}) /\\ ({psi} | {phi}) <-> ({psi} /\\ {eta} | {phi})"),
];

impl Schema {
    pub fn arity(&self) -> usize {
        ["{phi}", "{psi}", "{eta}"].iter().filter(|s| self.template.contains(*s)).count()
    }

    /// The instance with `args` bound to phi, psi, eta in that order
    /// (unused slots are skipped).
    pub fn instantiate(&self, args: &[Formula]) -> Formula {
        let mut text = self.template.to_string();
        let mut next = args.iter();
        for slot in ["{phi}", "{psi}", "{eta}"] {
            if text.contains(slot) {
                let arg = next.next().expect("one argument per slot");
                text = text.replace(slot, &format!("({})", render(arg)));
            }
        }
        parse_unchecked(&text).expect("templates are well formed")
    }
}

/// Bounds for the schema suite.
#[derive(Debug, Clone)]
pub struct SchemaConfig {
    pub atoms: usize,
    pub depth: usize,
    pub max_worlds: usize,
}

fn tuples(pool: &[Formula], arity: usize) -> Vec<Vec<Formula>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                pool.iter().map(move |f| {
                    let mut t = t.clone();
                    t.push(f.clone());
                    t
                })
            })
            .collect();
    }
    out
}

fn fresh(ctx: &AtomContext, max_worlds: usize) -> ModelState {
    ModelState::new(ctx.clone(), ModelConfig { max_worlds, ..ModelConfig::default() }).expect("small context")
}

/// Runs every schema over the pools, plus the necessitation rule m1.
pub fn run(cfg: &SchemaConfig) -> ScenarioReport {
    let ctx = AtomContext::standard(cfg.atoms).expect("atom count is positive");
    let names = ctx.names().to_vec();
    let full = pools::formulas(&names, cfg.depth);
    let compact = pools::compact(&names, cfg.depth);
    let mut report = ScenarioReport::new("schemata");
    report.set_value("pool", full.len().to_string());
    report.set_value("pool.compact", compact.len().to_string());

    for schema in SCHEMATA {
        let arity = schema.arity();
        let pool = if arity >= 3 { &compact } else { &full };
        for args in tuples(pool, arity) {
            let instance = schema.instantiate(&args);
            let mut m = fresh(&ctx, cfg.max_worlds);
            let v = verdict(&mut m, &instance).expect("pool atoms are declared");
            report.see_worlds(m.peak_worlds());
            record(&mut report, schema.name, schema.must_hold, &instance, &v);
        }
    }

    // m1: validity of a formula carries over to its necessitation.
    for phi in &full {
        let mut m = fresh(&ctx, cfg.max_worlds);
        let v = verdict(&mut m, phi).expect("pool atoms are declared");
        if !v.holds() {
            continue;
        }
        let boxed = Formula::boxed(phi.clone());
        let mut m = fresh(&ctx, cfg.max_worlds);
        let bv = verdict(&mut m, &boxed).expect("pool atoms are declared");
        report.see_worlds(m.peak_worlds());
        record(&mut report, "m1", true, &boxed, &bv);
    }
    report.finish()
}

fn record(report: &mut ScenarioReport, name: &str, must_hold: bool, instance: &Formula, v: &Verdict) {
    match v {
        Verdict::Inconclusive { reason } => report.inconclusive(name, must_hold, reason),
        _ => {
            let held = v.holds();
            let detail = || format!("{} : {}", render(instance), v);
            if must_hold {
                report.check(name, held, detail);
            } else {
                report.report(name, held, detail);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arities_and_instantiation() {
        let b3 = SCHEMATA.iter().find(|s| s.name == "b3").unwrap();
        assert_eq!(b3.arity(), 2);
        let inst = b3.instantiate(&[Formula::atom("p"), Formula::atom("q")]);
        assert_eq!(render(&inst), "(q | p) -> p -> q");
        let reg = SCHEMATA.iter().find(|s| s.name == "independence-and-regularity").unwrap();
        assert_eq!(reg.arity(), 3);
    }

    #[test]
    fn every_template_parses() {
        let args = [Formula::atom("p"), Formula::atom("q"), Formula::Top];
        for s in SCHEMATA {
            let f = s.instantiate(&args[..s.arity()]);
            assert!(!f.atoms().is_empty() || s.arity() == 0, "{}", s.name);
        }
    }

    #[test]
    fn one_atom_suite_passes() {
        let r = run(&SchemaConfig { atoms: 1, depth: 1, max_worlds: 20_000 });
        assert!(r.passed(), "{:?}", r.failures());
    }
}
