//! Randomized invariant runs, probability identity suites and the Lewis
//! demonstration. Every suite is deterministic in its seed.

use dmbl_core::algebra::valuation_holds;
use dmbl_core::audit::{audit, random_subset, AuditReport};
use dmbl_core::formula::{render, Formula};
use dmbl_core::model::{ModelConfig, ModelState, Schedule};
use dmbl_core::prob::{bayes_check, epsilon_prob, fundamental_identity, measure, prob, DistKind, Distribution};
use dmbl_core::{check_independence, fmt_rational, verdict, AtomContext, ModelError, Rational, StageSet, Verdict};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pools;
use crate::report::ScenarioReport;

/// Outcome of a model computation that may hit the world guard.
enum Run<T> {
    Done(T),
    Guard(String),
    Error(String),
}

fn run<T>(r: Result<T, ModelError>) -> Run<T> {
    match r {
        Ok(v) => Run::Done(v),
        Err(e @ (ModelError::Guard { .. } | ModelError::StepCap(_))) => Run::Guard(e.to_string()),
        Err(e) => Run::Error(e.to_string()),
    }
}

fn model(ctx: &AtomContext, schedule: Schedule, max_worlds: usize) -> ModelState {
    ModelState::new(ctx.clone(), ModelConfig { schedule, max_worlds }).expect("context fits the guard")
}

fn atoms_kind(ctx: &AtomContext) -> DistKind {
    DistKind::Atoms(ctx.names().to_vec())
}

fn absorb(report: &mut ScenarioReport, audit: &AuditReport) {
    for (name, n) in &audit.passed {
        for _ in 0..*n {
            report.check(name, true, String::new);
        }
    }
    for failure in &audit.failures {
        let name = failure.split(':').next().unwrap_or("audit");
        report.check(name, false, || failure.clone());
    }
}

fn random_base(m: &ModelState, rng: &mut ChaCha8Rng) -> StageSet {
    // Earlier bases come back often so that revisits are exercised.
    if !m.records().is_empty() && rng.gen_bool(0.5) {
        let k = rng.gen_range(0..m.records().len());
        let b = m.forward_to_current(&m.records()[k].pi_gamma);
        return if rng.gen_bool(0.5) { b } else { b.complement() };
    }
    let n = m.world_count();
    loop {
        let s = if rng.gen_bool(0.6) {
            StageSet::singleton(m.stage(), n, rng.gen_range(0..n))
        } else {
            random_subset(rng, m.stage(), n)
        };
        if !s.is_trivial() {
            return s;
        }
    }
}

/// Construction invariants on `runs` seeded runs per schedule, each of up
/// to `steps` processing steps on 1 or `max_atoms` atoms, audited after
/// every step.
pub fn construction_runs(max_atoms: usize, runs: u64, steps: usize, seed: u64, max_worlds: usize) -> ScenarioReport {
    let mut report = ScenarioReport::new("construction");
    let mut revisits = 0usize;
    for schedule in [Schedule::Query, Schedule::Faithful] {
        for i in 0..runs {
            let run_seed = seed.wrapping_mul(1_000_003).wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
            let atoms = 1 + (i as usize) % max_atoms.max(1);
            let ctx = AtomContext::standard(atoms).expect("positive atom count");
            let mut m = model(&ctx, schedule, max_worlds);
            for _ in 0..steps {
                let step = match schedule {
                    Schedule::Query => {
                        let b = random_base(&m, &mut rng);
                        m.process_base(&b).map(|r| r.case)
                    }
                    Schedule::Faithful => m.faithful_step().map(|r| r.case),
                };
                match step {
                    Ok(case) => revisits += usize::from(case != dmbl_core::Case::Fresh),
                    Err(ModelError::Guard { .. }) => break,
                    Err(e) => {
                        report.check("construction", false, || format!("{schedule} run {run_seed}: {e}"));
                        break;
                    }
                }
                report.see_worlds(m.world_count());
                match audit(&m, &mut rng, 6) {
                    Ok(a) => absorb(&mut report, &a),
                    Err(e) => report.check("audit", false, || format!("{schedule} run {run_seed}: {e}")),
                }
            }
        }
    }
    report.set_value("runs", (2 * runs).to_string());
    report.set_value("revisits", revisits.to_string());
    report.finish()
}

/// Truth of a classical formula at a valuation world.
pub fn classical_truth(f: &Formula, ctx: &AtomContext, world: usize) -> bool {
    let t = |g: &Formula| classical_truth(g, ctx, world);
    match f {
        Formula::Atom(a) => valuation_holds(ctx.len(), world, ctx.index_of(a).expect("declared atom")),
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Not(a) => !t(a),
        Formula::And(a, b) => t(a) && t(b),
        Formula::Or(a, b) => t(a) || t(b),
        Formula::Implies(a, b) => !t(a) || t(b),
        Formula::Iff(a, b) => t(a) == t(b),
        other => panic!("not classical: {}", render(other)),
    }
}

/// Sampled classical formulas: `Proved` exactly for truth-table tautologies.
pub fn classical_completeness(atoms: usize, depth: usize, samples: usize, seed: u64) -> ScenarioReport {
    let ctx = AtomContext::standard(atoms).expect("positive atom count");
    let names = ctx.names().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ScenarioReport::new("classical-completeness");
    let mut tautologies = 0;
    for _ in 0..samples {
        let f = pools::random_classical(&mut rng, &names, depth);
        let valid = (0..1usize << atoms).all(|w| classical_truth(&f, &ctx, w));
        tautologies += usize::from(valid);
        let mut m = model(&ctx, Schedule::Query, 1 << atoms);
        let v = verdict(&mut m, &f).expect("classical formulas need no construction");
        let agrees = match v {
            Verdict::Proved => valid,
            Verdict::Refuted { .. } => !valid,
            _ => false,
        };
        report.check("proved_iff_tautology", agrees, || format!("{} : {v}", render(&f)));
    }
    report.set_value("samples", samples.to_string());
    report.set_value("tautologies", tautologies.to_string());
    report.finish()
}

/// After conditioning on a few bases, the extended probability of classical
/// formulas equals their classical probability.
pub fn non_distortion(atoms: usize, dists: usize, formulas: usize, seed: u64, max_worlds: usize) -> ScenarioReport {
    let ctx = AtomContext::standard(atoms).expect("positive atom count");
    let names = ctx.names().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ScenarioReport::new("non-distortion");
    let advance: Vec<Formula> = names
        .windows(2)
        .map(|w| Formula::cond(Formula::atom(&w[1]), Formula::atom(&w[0])))
        .collect();
    for _ in 0..dists {
        let d = pools::random_distribution(&mut rng, atoms_kind(&ctx), false);
        let mut m = model(&ctx, Schedule::Query, max_worlds);
        m.attach_measure(&d).expect("strictly positive");
        for a in &advance {
            if let Run::Guard(_) = run(prob(&mut m, a)) {
                break;
            }
        }
        report.see_worlds(m.peak_worlds());
        for _ in 0..formulas {
            let f = pools::random_classical(&mut rng, &names, 4);
            let expect: Rational =
                (0..1usize << atoms).filter(|&w| classical_truth(&f, &ctx, w)).map(|w| d.weights[w].clone()).sum();
            match run(prob(&mut m, &f)) {
                Run::Done(v) => report.check("classical_probability", v == expect, || {
                    format!("{}: {} vs {}", render(&f), fmt_rational(&v), fmt_rational(&expect))
                }),
                Run::Guard(g) => report.inconclusive("classical_probability", true, &g),
                Run::Error(e) => report.check("classical_probability", false, || e),
            }
        }
    }
    report.finish()
}

/// Bayes identity, additivity, multiplicativity on independent pairs and
/// the step identities, over random strictly positive distributions.
pub fn probability_identities(
    ctx: &AtomContext,
    pool: &[Formula],
    dists: usize,
    seed: u64,
    max_worlds: usize,
) -> ScenarioReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ScenarioReport::new("probability");
    let mut nested = 0usize;
    let mut independent = 0usize;
    for _ in 0..dists {
        let d = pools::random_distribution(&mut rng, atoms_kind(ctx), false);
        for phi in pool {
            for psi in pool {
                let mut m = model(ctx, Schedule::Query, max_worlds);
                m.attach_measure(&d).expect("strictly positive");
                pair_checks(&mut m, psi, phi, &mut report, &mut nested, &mut independent);
                step_identities(&mut m, &mut rng, &mut report);
                report.see_worlds(m.peak_worlds());
            }
        }
    }
    report.set_value("bayes.nested", nested.to_string());
    report.set_value("independent_pairs", independent.to_string());
    report.finish()
}

fn pair_checks(
    m: &mut ModelState,
    psi: &Formula,
    phi: &Formula,
    report: &mut ScenarioReport,
    nested: &mut usize,
    independent: &mut usize,
) {
    let show = || format!("psi={} phi={}", render(psi), render(phi));
    match run(bayes_check(m, psi, phi)) {
        Run::Done(b) => {
            report.check("bayes", b.equal, || {
                format!("{}: {}·{} vs {}", show(), fmt_rational(&b.conditional), fmt_rational(&b.antecedent), fmt_rational(&b.joint))
            });
            if b.equal && psi.cond_depth() > 0 && phi.cond_depth() > 0 {
                *nested += 1;
                report.check("bayes.nested", true, String::new);
            }
        }
        Run::Guard(g) => return report.inconclusive("bayes", true, &g),
        Run::Error(e) => return report.check("bayes", false, || format!("{}: {e}", show())),
    }
    let values = (|| -> Result<[Rational; 4], ModelError> {
        Ok([
            prob(m, phi)?,
            prob(m, psi)?,
            prob(m, &Formula::and(phi.clone(), psi.clone()))?,
            prob(m, &Formula::or(phi.clone(), psi.clone()))?,
        ])
    })();
    let [pp, ps, pand, por] = match run(values) {
        Run::Done(v) => v,
        Run::Guard(g) => return report.inconclusive("additivity", true, &g),
        Run::Error(e) => return report.check("additivity", false, || e),
    };
    report.check("additivity", &pand + &por == &pp + &ps, show);
    report.check("bounds", [&pp, &ps, &pand, &por].iter().all(|v| !v.is_negative() && **v <= Rational::one()), show);
    match run(check_independence(m, psi, phi)) {
        Run::Done(true) => {
            // masses computed before are conserved by later steps
            *independent += 1;
            report.check("multiplicativity", pand == &pp * &ps, show);
        }
        Run::Done(false) => {}
        Run::Guard(g) => report.inconclusive("multiplicativity", true, &g),
        Run::Error(e) => report.check("multiplicativity", false, || e),
    }
}

/// Fundamental identity on every processed base, the block ratio identity
/// on every step and conservation of mass under forwarding.
fn step_identities(m: &mut ModelState, rng: &mut ChaCha8Rng, report: &mut ScenarioReport) {
    let bases: Vec<StageSet> = m.records().iter().map(|r| m.forward_to_current(&r.pi_gamma)).collect();
    for a in bases {
        for side in [a.clone(), a.complement()] {
            for _ in 0..4 {
                let b = random_subset(rng, m.stage(), m.world_count());
                match run(fundamental_identity(m, &b, &side)) {
                    Run::Done(held) => report.check("fundamental_identity", held, || format!("stage {}", m.stage())),
                    Run::Guard(g) => report.inconclusive("fundamental_identity", true, &g),
                    Run::Error(e) => report.check("fundamental_identity", false, || e),
                }
            }
        }
    }
    for rec in m.records() {
        let mass = |s: &StageSet| measure(m, s).expect("measure attached");
        let pb = mass(&rec.base);
        let pnb = mass(&rec.base.complement());
        for blk in &rec.blocks {
            report.check("block_ratio", mass(&blk.pi) * &pnb == mass(&blk.gamma) * &pb, || {
                format!("step {}", rec.step)
            });
        }
    }
    for stage in 0..m.stage() {
        let s = random_subset(rng, stage, m.stage_len(stage));
        let fwd = m.forward_to_current(&s);
        let held = measure(m, &s).ok() == measure(m, &fwd).ok();
        report.check("conservation", held, || format!("stage {stage}"));
    }
    report.check("total_mass", measure(m, &m.full()).ok() == Some(Rational::one()), || "Ω".into());
}

/// Smoothed probabilities: equal to the exact ones on strictly positive
/// distributions, and a probability on degenerate ones.
pub fn epsilon_consistency(
    ctx: &AtomContext,
    pool: &[Formula],
    positive: usize,
    degenerate: usize,
    seed: u64,
    max_worlds: usize,
) -> ScenarioReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ScenarioReport::new("epsilon");
    for i in 0..positive + degenerate {
        let is_degenerate = i >= positive;
        let d = pools::random_distribution(&mut rng, atoms_kind(ctx), is_degenerate);
        let mut smooth = model(ctx, Schedule::Query, max_worlds);
        smooth.attach_smoothed(&d).expect("matching distribution");
        let mut exact = model(ctx, Schedule::Query, max_worlds);
        if !is_degenerate {
            exact.attach_measure(&d).expect("strictly positive");
        }
        let mut limits = Vec::new();
        for f in pool {
            let v = match run(epsilon_prob(&mut smooth, f)) {
                Run::Done(v) => v,
                Run::Guard(g) => {
                    report.inconclusive("epsilon", true, &g);
                    limits.push(None);
                    continue;
                }
                Run::Error(e) => {
                    report.check("epsilon", false, || format!("{}: {e}", render(f)));
                    limits.push(None);
                    continue;
                }
            };
            if is_degenerate {
                report.check("epsilon.in_unit_interval", !v.is_negative() && v <= Rational::one(), || render(f));
            } else {
                match run(prob(&mut exact, f)) {
                    Run::Done(p) => report.check("epsilon.equals_exact", p == v, || {
                        format!("{}: {} vs {}", render(f), fmt_rational(&v), fmt_rational(&p))
                    }),
                    Run::Guard(g) => report.inconclusive("epsilon.equals_exact", true, &g),
                    Run::Error(e) => report.check("epsilon.equals_exact", false, || e),
                }
            }
            limits.push(Some(v));
        }
        if is_degenerate {
            degenerate_axioms(&mut smooth, pool, &mut report);
        }
        report.see_worlds(smooth.peak_worlds().max(exact.peak_worlds()));
    }
    report.finish()
}

fn degenerate_axioms(m: &mut ModelState, pool: &[Formula], report: &mut ScenarioReport) {
    let mut lim = |f: &Formula| run(epsilon_prob(m, f));
    match (lim(&Formula::Top), lim(&Formula::Bot)) {
        (Run::Done(t), Run::Done(b)) => {
            report.check("epsilon.finiteness", t == Rational::one(), || fmt_rational(&t));
            report.check("epsilon.coherence", b.is_zero(), || fmt_rational(&b));
        }
        _ => report.check("epsilon.constants", false, || "top/bot failed".into()),
    }
    for (i, a) in pool.iter().enumerate() {
        let b = &pool[(i * 5 + 1) % pool.len()];
        let parts = [a.clone(), b.clone(), Formula::and(a.clone(), b.clone()), Formula::or(a.clone(), b.clone())];
        let vals: Vec<Run<Rational>> = parts.iter().map(&mut lim).collect();
        if let [Run::Done(pa), Run::Done(pb), Run::Done(pand), Run::Done(por)] = &vals[..] {
            report.check("epsilon.additivity", pand + por == pa + pb, || format!("{} / {}", render(a), render(b)));
        } else {
            report.inconclusive("epsilon.additivity", true, "guard");
        }
    }
}

/// One tested instance of the Lewis comparison.
#[derive(Debug, Clone)]
pub struct LewisWitness {
    pub antecedent: Formula,
    pub consequent: Formula,
    pub context: Formula,
    /// `P(((B|A)|C))`.
    pub nested: Rational,
    /// `P((B|C ∧ A))`.
    pub flattened: Rational,
}

/// Searches `(A, B, C)` over the classical pool for which the probability of
/// `((B|A)|C)` differs from that of `(B|C ∧ A)`, on `dist` or on a searched
/// distribution. Every instance also checks the Bayes identity on both
/// sides, and every pair of the depth-one pool is Bayes-checked on the
/// distribution that produced the witness.
pub fn lewis_demo(dist: Option<&Distribution>, seed: u64, max_worlds: usize) -> Result<ScenarioReport, ModelError> {
    let candidates: Vec<Distribution> = match dist {
        Some(d) if !d.strictly_positive() => return Err(ModelError::Degenerate),
        Some(d) => vec![d.clone()],
        None => {
            let kind = DistKind::Atoms(vec!["p".into(), "q".into()]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = vec![Distribution::uniform(kind.clone())];
            v.extend((0..4).map(|_| pools::random_distribution(&mut rng, kind.clone(), false)));
            v
        }
    };
    let mut report = ScenarioReport::new("lewis-demo");
    for d in &candidates {
        let ctx = match &d.kind {
            DistKind::Atoms(a) | DistKind::Worlds(a) => AtomContext::new(a)?,
        };
        let generalized = matches!(d.kind, DistKind::Worlds(_));
        let fresh = || -> Result<ModelState, ModelError> {
            let cfg = ModelConfig { schedule: Schedule::Query, max_worlds };
            let mut m = if generalized {
                let labels: Vec<&str> = ctx.names().iter().map(String::as_str).collect();
                ModelState::generalized(&labels, None, cfg)?
            } else {
                ModelState::new(ctx.clone(), cfg)?
            };
            m.attach_measure(d)?;
            Ok(m)
        };
        let classical = pools::classical(ctx.names());
        let mut witnesses: Vec<LewisWitness> = Vec::new();
        for a in &classical {
            for b in &classical {
                for c in &classical {
                    let mut m = fresh()?;
                    let ca = Formula::and(c.clone(), a.clone());
                    if prob(&mut m, &ca)?.is_zero() {
                        continue;
                    }
                    let inner = Formula::cond(b.clone(), a.clone());
                    let nested_f = Formula::cond(inner.clone(), c.clone());
                    let outcome = (|| -> Result<_, ModelError> {
                        let nested = prob(&mut m, &nested_f)?;
                        let outer = bayes_check(&mut m, &inner, c)?;
                        let flat = bayes_check(&mut m, b, &ca)?;
                        Ok((nested, outer, flat))
                    })();
                    report.see_worlds(m.peak_worlds());
                    let (nested, outer, flat) = match run(outcome) {
                        Run::Done(v) => v,
                        Run::Guard(g) => {
                            report.inconclusive("lewis.instance", true, &g);
                            continue;
                        }
                        Run::Error(e) => return Err(ModelError::Internal(e)),
                    };
                    let show = || format!("A={} B={} C={}", render(a), render(b), render(c));
                    report.check("bayes.nested_side", outer.equal, show);
                    report.check("bayes.flattened_side", flat.equal, show);
                    report.check("lewis.instance", true, String::new);
                    if nested != flat.conditional {
                        witnesses.push(LewisWitness {
                            antecedent: a.clone(),
                            consequent: b.clone(),
                            context: c.clone(),
                            nested,
                            flattened: flat.conditional,
                        });
                    }
                }
            }
        }
        if let Some(w) = witnesses.first() {
            let pool = pools::formulas(ctx.names(), 1);
            for phi in &pool {
                for psi in &pool {
                    let mut m = fresh()?;
                    match run(bayes_check(&mut m, psi, phi)) {
                        Run::Done(b) => report.check("bayes.pairs", b.equal, || format!("{} | {}", render(psi), render(phi))),
                        Run::Guard(g) => report.inconclusive("bayes.pairs", true, &g),
                        Run::Error(e) => return Err(ModelError::Internal(e)),
                    }
                    report.see_worlds(m.peak_worlds());
                }
            }
            report.witness = Some(format!(
                "A = {}, B = {}, C = {}: P(((B|A)|C)) = {} but P((B|C /\\ A)) = {}",
                render(&w.antecedent),
                render(&w.consequent),
                render(&w.context),
                fmt_rational(&w.nested),
                fmt_rational(&w.flattened)
            ));
            report.set_value("distribution", d.to_text().trim_end().replace('\n', "; "));
            report.set_value("witness.A", render(&w.antecedent));
            report.set_value("witness.B", render(&w.consequent));
            report.set_value("witness.C", render(&w.context));
            report.set_value("witness.nested", fmt_rational(&w.nested));
            report.set_value("witness.flattened", fmt_rational(&w.flattened));
            report.set_value("witnesses", witnesses.len().to_string());
            report.check("lewis.witness_found", true, String::new);
            return Ok(report.finish());
        }
    }
    report.check("lewis.witness_found", false, || "no instance separates the two values".into());
    Ok(report.finish())
}

/// Everything at once, for `regress`.
#[derive(Debug, Clone)]
pub struct RegressConfig {
    pub atoms: usize,
    pub depth: usize,
    pub seed: u64,
    pub max_worlds: usize,
}

pub fn regress(cfg: &RegressConfig) -> ScenarioReport {
    let ctx = AtomContext::standard(cfg.atoms).expect("positive atom count");
    let mut report = ScenarioReport::new("regress");
    report.set_value("atoms", cfg.atoms.to_string());
    report.set_value("depth", cfg.depth.to_string());
    report.set_value("seed", cfg.seed.to_string());
    report.merge(construction_runs(cfg.atoms, 20, 5, cfg.seed, cfg.max_worlds.min(5000)));
    report.merge(crate::schemata::run(&crate::schemata::SchemaConfig {
        atoms: cfg.atoms,
        depth: cfg.depth,
        max_worlds: cfg.max_worlds,
    }));
    // The step identities probe random bases on top of every pair, so a
    // smaller guard keeps this part quick.
    let pool = pools::formulas(ctx.names(), cfg.depth.min(1));
    let small = cfg.max_worlds.min(50_000);
    report.merge(probability_identities(&ctx, &pool, 3, cfg.seed, small));
    report.merge(epsilon_consistency(&ctx, &pool, 3, 3, cfg.seed, small));
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_table_matches_bit_order() {
        let ctx = AtomContext::standard(2).unwrap();
        // world 0 makes every atom true
        assert!(classical_truth(&Formula::atom("p"), &ctx, 0));
        assert!(classical_truth(&Formula::atom("q"), &ctx, 2));
        assert!(!classical_truth(&Formula::atom("p"), &ctx, 2));
    }

    #[test]
    fn lewis_demo_finds_a_witness_on_uniform() {
        let d = Distribution::uniform(DistKind::Atoms(vec!["p".into(), "q".into()]));
        let r = lewis_demo(Some(&d), 0, 20_000).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.witness.is_some());
    }

    #[test]
    fn lewis_demo_refuses_degenerate() {
        let d = load(&["p", "q"], &[0, 1, 1, 2]);
        assert_eq!(lewis_demo(Some(&d), 0, 1000).unwrap_err(), ModelError::Degenerate);
    }

    fn load(atoms: &[&str], w: &[i64]) -> Distribution {
        let total: i64 = w.iter().sum();
        Distribution::new(
            DistKind::Atoms(atoms.iter().map(|s| s.to_string()).collect()),
            w.iter().map(|x| Rational::new((*x).into(), total.into())).collect(),
        )
        .unwrap()
    }
}
