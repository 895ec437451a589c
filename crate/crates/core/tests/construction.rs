use dmbl_core::audit::{audit, random_subset, uniqueness_holds};
use dmbl_core::model::{Case, ModelConfig, ModelState, Schedule};
use dmbl_core::{AtomContext, ModelError, StageSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_base(m: &ModelState, rng: &mut ChaCha8Rng) -> StageSet {
    // Mix fresh small bases with earlier bases carried forward, so that
    // revisits happen often.
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

#[test]
fn query_runs_keep_every_invariant() {
    let mut revisits = 0;
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms = if seed % 2 == 0 { 1 } else { 2 };
        let cfg = ModelConfig { schedule: Schedule::Query, max_worlds: 3000 };
        let mut m = ModelState::new(AtomContext::standard(atoms).unwrap(), cfg).unwrap();
        for _ in 0..5 {
            let b = random_base(&m, &mut rng);
            match m.process_base(&b) {
                Ok(rec) => {
                    if matches!(rec.case, Case::Revisit { .. }) {
                        revisits += 1;
                    }
                }
                Err(ModelError::Guard { .. }) => break,
                Err(e) => panic!("seed {seed}: {e}"),
            }
            let rep = audit(&m, &mut rng, 6).unwrap();
            assert!(rep.ok(), "seed {seed}: {:?}", rep.failures);
        }
    }
    assert!(revisits > 10, "only {revisits} revisits");
}

#[test]
fn faithful_runs_keep_every_invariant() {
    for seed in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms = 1 + (seed % 2) as usize;
        let cfg = ModelConfig { schedule: Schedule::Faithful, max_worlds: 3000 };
        let mut m = ModelState::new(AtomContext::standard(atoms).unwrap(), cfg).unwrap();
        for _ in 0..5 {
            match m.faithful_step() {
                Ok(_) => {}
                Err(ModelError::Guard { .. }) => break,
                Err(e) => panic!("{e}"),
            }
            let rep = audit(&m, &mut rng, 6).unwrap();
            assert!(rep.ok(), "seed {seed}: {:?}", rep.failures);
        }
    }
}

#[test]
fn one_atom_faithful_list_after_first_step() {
    let cfg = ModelConfig { schedule: Schedule::Faithful, ..ModelConfig::default() };
    let mut m = ModelState::new(AtomContext::standard(1).unwrap(), cfg).unwrap();
    let hp = m.atom_set("p").unwrap();
    m.faithful_step().unwrap();
    let slots = m.task_slots(10);
    assert_eq!(slots, vec![m.forward_to_current(&hp), m.forward_to_current(&hp.complement())]);
    // The image of the base comes back as a revisit.
    assert_eq!(m.faithful_step().unwrap().case, Case::Revisit { previous: 0 });
}

#[test]
fn faithful_step_on_empty_list_fails() {
    let mut m = ModelState::new(AtomContext::standard(1).unwrap(), ModelConfig::default()).unwrap();
    assert_eq!(m.faithful_step().unwrap_err(), ModelError::EmptyTaskList);
}

#[test]
fn conditional_is_the_unique_fixed_extension() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut m = ModelState::new(AtomContext::standard(1).unwrap(), ModelConfig::default()).unwrap();
    for _ in 0..3 {
        let b = random_base(&m, &mut rng);
        m.process_base(&b).unwrap();
        if m.world_count() > 16 {
            break;
        }
    }
    let k = m.records().len() - 1;
    let a = m.forward_to_current(&m.records()[k].pi_gamma);
    for _ in 0..4 {
        let b = random_subset(&mut rng, m.stage(), m.world_count());
        assert!(uniqueness_holds(&m, &b, &a).unwrap());
        assert!(uniqueness_holds(&m, &b, &a.complement()).unwrap());
    }
}
