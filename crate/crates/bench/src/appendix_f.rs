//! The three-world worked example: one faithful step from `{a, b, c}` with
//! weights 1/5, 3/10, 1/2, compared value by value.

use dmbl_core::model::{Case, ModelConfig, ModelState, Schedule};
use dmbl_core::prob::{measure, DistKind, Distribution};
use dmbl_core::ratfn::rational;
use dmbl_core::{fmt_rational, StageSet};

use crate::report::ScenarioReport;

pub const LABELS: [&str; 3] = ["a", "b", "c"];

pub fn distribution() -> Distribution {
    let kind = DistKind::Worlds(LABELS.iter().map(|s| s.to_string()).collect());
    Distribution::new(kind, vec![rational(1, 5), rational(3, 10), rational(1, 2)]).expect("weights sum to one")
}

fn initial(worlds: &[usize]) -> StageSet {
    StageSet::from_indices(0, 3, worlds.iter().copied())
}

/// `{a,b}, c, {b,c}, a, {c,a}, b`.
pub fn initial_tasks() -> Vec<StageSet> {
    vec![initial(&[0, 1]), initial(&[2]), initial(&[1, 2]), initial(&[0]), initial(&[0, 2]), initial(&[1])]
}

/// The stage-1 model with its measure attached.
pub fn build() -> ModelState {
    let cfg = ModelConfig { schedule: Schedule::Faithful, ..ModelConfig::default() };
    let mut m = ModelState::generalized(&LABELS, Some(initial_tasks()), cfg).expect("valid example");
    m.attach_measure(&distribution()).expect("strictly positive");
    m.faithful_step().expect("one step fits");
    m
}

fn world(m: &ModelState, label: &str) -> Option<usize> {
    (0..m.world_count()).find(|&w| m.world_label(m.stage(), w) == label)
}

/// Current-stage set from nested labels; `None` if a label is missing.
fn set_of(m: &ModelState, labels: &[&str]) -> Option<StageSet> {
    let worlds: Option<Vec<usize>> = labels.iter().map(|l| world(m, l)).collect();
    Some(StageSet::from_indices(m.stage(), m.world_count(), worlds?))
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}

fn labels_of(m: &ModelState, s: &StageSet) -> String {
    format!("{{{}}}", m.set_labels(s).join(","))
}

/// Compares every listed value of the example against `m`, which must be
/// the model after the first step (built here or reloaded from a dump).
pub fn check(m: &ModelState) -> ScenarioReport {
    let mut r = ScenarioReport::new("appendix-f");
    r.see_worlds(m.peak_worlds());
    r.check("stage", m.stage() == 1 && m.records().len() == 1, || format!("model is at stage {}", m.stage()));
    if m.stage() != 1 || m.records().is_empty() {
        return r.finish();
    }

    let omega1 = sorted(m.set_labels(&m.full()));
    r.check("omega1", omega1 == ["(a,c)", "(b,c)", "(c,a)", "(c,b)"], || omega1.join(","));

    let rec = &m.records()[0];
    let b0 = initial(&[0, 1]);
    let blocks_ok = rec.case == Case::Fresh
        && rec.base == b0
        && rec.blocks.len() == 1
        && rec.blocks[0].pi == b0
        && rec.blocks[0].gamma == initial(&[2]);
    r.check("case1.pi_gamma", blocks_ok, || format!("{:?}", rec.case));

    for (w, expect) in [(0, vec!["(a,c)"]), (1, vec!["(b,c)"]), (2, vec!["(c,a)", "(c,b)"])] {
        let img = m.forward_to_current(&initial(&[w]));
        let got = sorted(m.set_labels(&img));
        r.check(&format!("mu0({})", LABELS[w]), got == expect, || got.join(","));
    }

    let a_img = m.forward_to_current(&b0);
    let c_img = a_img.complement();
    let f_cases: [(&str, Vec<&str>, &StageSet, Vec<&str>); 5] = [
        ("f1(a,{a,b})", vec!["(a,c)"], &a_img, vec!["(a,c)", "(c,a)"]),
        ("f1(b,{a,b})", vec!["(b,c)"], &a_img, vec!["(b,c)", "(c,b)"]),
        ("f1((c,a),c)", vec!["(c,a)"], &c_img, vec!["(a,c)", "(c,a)"]),
        ("f1((c,b),c)", vec!["(c,b)"], &c_img, vec!["(b,c)", "(c,b)"]),
        ("f1(c,c)", vec!["(c,a)", "(c,b)"], &c_img, vec!["(a,c)", "(b,c)", "(c,a)", "(c,b)"]),
    ];
    for (name, b, a, expect) in f_cases {
        let got = set_of(m, &b).and_then(|b| m.lookup_f(&b, a).ok());
        let expect = set_of(m, &expect);
        r.check(name, got.is_some() && got == expect, || {
            got.map(|g| labels_of(m, &g)).unwrap_or_else(|| "undefined".into())
        });
    }

    let masses = [("(a,c)", rational(1, 5)), ("(b,c)", rational(3, 10)), ("(c,a)", rational(1, 5)), ("(c,b)", rational(3, 10))];
    let has_measure = measure(m, &m.full()).is_ok();
    r.check("measure.attached", has_measure, || "no measure in model".into());
    if has_measure {
        for (label, expect) in masses {
            let got = set_of(m, &[label]).and_then(|s| measure(m, &s).ok());
            if let Some(v) = &got {
                r.set_value(&format!("P1{label}"), fmt_rational(v));
            }
            r.check(&format!("P1{label}"), got.as_ref() == Some(&expect), || format!("{got:?}"));
        }
        identity_checks(m, &a_img, &mut r);
    }

    task_list_checks(m, &mut r);
    r.finish()
}

/// `P1(f1(B,A)) P1(A) = P1(A ∩ B)` for `A ∈ {b0, ∼b0}` and all sixteen `B`.
fn identity_checks(m: &ModelState, base: &StageSet, r: &mut ScenarioReport) {
    let n = m.world_count();
    for a in [base.clone(), base.complement()] {
        let pa = measure(m, &a).expect("measure attached");
        for mask in 0u32..1 << n {
            let b = StageSet::from_indices(m.stage(), n, (0..n).filter(|i| mask >> i & 1 == 1));
            let held = match m.lookup_f(&b, &a) {
                Ok(f) => measure(m, &f).expect("attached") * &pa == measure(m, &a.intersection(&b)).expect("attached"),
                Err(_) => false,
            };
            r.check("identity.P1(f1(B,A))P1(A)=P1(A∩B)", held, || format!("A={} B={}", labels_of(m, &a), labels_of(m, &b)));
        }
    }
}

/// `Λ1 = {b,c}, a, {c,a}, b, (new sets), {a,b}, c`.
fn task_list_checks(m: &ModelState, r: &mut ScenarioReport) {
    if m.tasks().is_none() {
        r.check("lambda1", false, || "model has no task list".into());
        return;
    }
    let slots = m.task_slots(64);
    let fwd = |w: &[usize]| m.forward_to_current(&initial(w));
    let head = [fwd(&[1, 2]), fwd(&[0]), fwd(&[0, 2]), fwd(&[1])];
    let tail = [fwd(&[0, 1]), fwd(&[2])];
    r.set_value("lambda1.slots", slots.len().to_string());
    r.check("lambda1.size", slots.len() == 14, || format!("{} slots", slots.len()));
    if slots.len() != 14 {
        return;
    }
    r.check("lambda1.head", slots[..4] == head, || "forwarded old slots out of order".into());
    r.check("lambda1.tail", slots[12..] == tail, || "last slots are not the processed pair".into());
    let middle = &slots[4..12];
    let fresh = middle.iter().all(|s| m.pullback_to(s, 0).is_none());
    let paired = middle.chunks(2).all(|p| p[0] == p[1].complement());
    r.check("lambda1.new_sets", fresh && paired, || "middle slots are not the new complement pairs".into());
}
