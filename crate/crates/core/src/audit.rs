//! Executable invariants of the construction, checked on a live model.

use std::collections::BTreeMap;

use rand::Rng;

use crate::algebra::{swap_image, StageSet};
use crate::error::ModelError;
use crate::model::{Case, ModelState};

/// Stages up to this size have every set of the defining stage enumerated.
const EXHAUSTIVE_LIMIT: usize = 10;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    /// Number of passing instances per property.
    pub passed: BTreeMap<&'static str, usize>,
    pub failures: Vec<String>,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, name: &'static str, holds: bool, detail: impl FnOnce() -> String) {
        if holds {
            *self.passed.entry(name).or_insert(0) += 1;
        } else {
            self.failures.push(format!("{name}: {}", detail()));
        }
    }

    pub fn merge(&mut self, other: AuditReport) {
        for (k, v) in other.passed {
            *self.passed.entry(k).or_insert(0) += v;
        }
        self.failures.extend(other.failures);
    }

    pub fn total_passed(&self) -> usize {
        self.passed.values().sum()
    }
}

pub fn random_subset<R: Rng + ?Sized>(rng: &mut R, stage: usize, len: usize) -> StageSet {
    StageSet::from_indices(stage, len, (0..len).filter(|_| rng.gen_bool(0.5)))
}

/// Every subset of a small stage, or `samples` random ones.
fn domain_sets<R: Rng + ?Sized>(state: &ModelState, stage: usize, rng: &mut R, samples: usize) -> Vec<StageSet> {
    let len = state.stage_len(stage);
    if len <= EXHAUSTIVE_LIMIT {
        (0u64..1 << len)
            .map(|mask| StageSet::from_indices(stage, len, (0..len).filter(|i| mask >> i & 1 == 1)))
            .collect()
    } else {
        let mut out: Vec<StageSet> = (0..len.min(samples)).map(|w| StageSet::singleton(stage, len, w)).collect();
        out.extend((0..samples).map(|_| random_subset(rng, stage, len)));
        out.push(StageSet::empty(stage, len));
        out.push(StageSet::full(stage, len));
        out
    }
}

/// Structural checks of every step plus the conditional-function properties
/// at the current stage.
pub fn audit<R: Rng + ?Sized>(state: &ModelState, rng: &mut R, samples: usize) -> Result<AuditReport, ModelError> {
    let mut rep = AuditReport::default();
    for k in 0..state.records().len() {
        audit_step(state, k, rng, samples, &mut rep)?;
    }
    audit_current(state, rng, samples, &mut rep)?;
    Ok(rep)
}

fn audit_step<R: Rng + ?Sized>(
    state: &ModelState,
    k: usize,
    rng: &mut R,
    samples: usize,
    rep: &mut AuditReport,
) -> Result<(), ModelError> {
    let rec = &state.records()[k];
    let base = &rec.base;
    let not_base = base.complement();
    let mut pi_union = StageSet::empty(k, base.universe());
    let mut gamma_union = pi_union.clone();
    let mut disjoint = true;
    let mut size: usize = 0;
    for blk in &rec.blocks {
        disjoint &= blk.pi.is_disjoint(&pi_union) && blk.gamma.is_disjoint(&gamma_union);
        disjoint &= blk.pi.is_subset(base) && blk.gamma.is_subset(&not_base);
        pi_union = pi_union.union(&blk.pi);
        gamma_union = gamma_union.union(&blk.gamma);
        size += 2 * blk.pi.count() * blk.gamma.count();
    }
    rep.check("partition.pi_covers_base", pi_union == *base, || format!("step {k}"));
    rep.check("partition.gamma_covers_complement", gamma_union == not_base, || format!("step {k}"));
    rep.check("partition.disjoint", disjoint, || format!("step {k}"));
    rep.check("size_law", size == state.stage_len(k + 1), || {
        format!("step {k}: {} worlds, blocks give {size}", state.stage_len(k + 1))
    });

    let fwd = state.forward_record(k);
    let mut seen = vec![false; state.stage_len(k + 1)];
    let mut images_disjoint = true;
    for img in &fwd.images {
        for &w in img {
            images_disjoint &= !std::mem::replace(&mut seen[w as usize], true);
        }
    }
    rep.check("forward.images_partition", images_disjoint && seen.iter().all(|s| *s), || format!("step {k}"));
    let table = state.table(k + 1);
    rep.check("forward.base_image", fwd.forward(base)? == rec.pi_gamma, || format!("step {k}"));
    rep.check("swap.base_to_complement", swap_image(table, &rec.pi_gamma)? == rec.gamma_pi, || format!("step {k}"));

    let len = state.stage_len(k);
    for _ in 0..samples.min(16) {
        let a = random_subset(rng, k, len);
        let b = random_subset(rng, k, len);
        let (fa, fb) = (fwd.forward(&a)?, fwd.forward(&b)?);
        rep.check("forward.meet", fwd.forward(&a.intersection(&b))? == fa.intersection(&fb), || format!("step {k}"));
        rep.check("forward.complement", fwd.forward(&a.complement())? == fa.complement(), || format!("step {k}"));
        rep.check("forward.injective", (fa == fb) == (a == b), || format!("step {k}"));
    }

    if let Case::Revisit { previous } = rec.case {
        let prev = &state.records()[previous];
        for c in domain_sets(state, previous + 1, rng, samples) {
            for positive in [true, false] {
                let old = prev.conditional(state.table(previous + 1), &c, positive)?;
                let old_fwd = state.forward_to(&old, k + 1);
                let c_fwd = state.forward_to(&c, k + 1);
                let new = rec.conditional(table, &c_fwd, positive)?;
                rep.check("reprocessing_consistency", old_fwd == new, || {
                    format!("step {k} revisiting step {previous}")
                });
            }
        }
    }
    Ok(())
}

fn audit_current<R: Rng + ?Sized>(
    state: &ModelState,
    rng: &mut R,
    samples: usize,
    rep: &mut AuditReport,
) -> Result<(), ModelError> {
    let mut bases: Vec<StageSet> = Vec::new();
    for k in 0..state.records().len() {
        let a = state.forward_to_current(&state.records()[k].pi_gamma);
        if !bases.contains(&a) {
            bases.push(a);
        }
    }
    let full = state.full();
    for a in bases {
        let not_a = a.complement();
        let (k, _) = state.latest_record_for(&a).expect("processed base");
        let domain: Vec<StageSet> = domain_sets(state, k + 1, rng, samples)
            .into_iter()
            .map(|s| state.forward_to_current(&s))
            .collect();
        for side in [&a, &not_a] {
            let other = side.complement();
            let f = |b: &StageSet| state.lookup_f(b, side);
            for (i, b) in domain.iter().enumerate() {
                let fb = f(b)?;
                rep.check("meet_law", side.intersection(&fb) == side.intersection(b), || format!("{b:?}"));
                rep.check("complement_law", f(&b.complement())? == fb.complement(), || format!("{b:?}"));
                let sup = b.union(side);
                rep.check("superset_law", f(&sup)? == full, || format!("{sup:?}"));
                let c = &domain[(i * 7 + 3) % domain.len()];
                let fc = f(c)?;
                rep.check("union_law", f(&b.union(c))? == fb.union(&fc), || format!("{b:?} {c:?}"));
                rep.check("intersection_law", f(&b.intersection(c))? == fb.intersection(&fc), || {
                    format!("{b:?} {c:?}")
                });
                rep.check("idempotence.same", f(&fb)? == fb, || format!("{b:?}"));
                rep.check("idempotence.opposite", state.lookup_f(&fb, &other)? == fb, || format!("{b:?}"));
                if fb == *b {
                    rep.check("weak_symmetry", state.lookup_f(b, &other)? == *b, || format!("{b:?}"));
                }
            }
        }
    }
    Ok(())
}

/// For nonempty `A`, `f(B, A)` is the only `X` with `X ∩ A = B ∩ A` and
/// `f(X, A) = X`. Brute force over every current-stage set.
pub fn uniqueness_holds(state: &ModelState, b: &StageSet, a: &StageSet) -> Result<bool, ModelError> {
    let n = state.world_count();
    assert!(n <= 20, "brute force over 2^{n} sets");
    let target = state.lookup_f(b, a)?;
    let ba = b.intersection(a);
    for mask in 0u64..1 << n {
        let x = StageSet::from_indices(state.stage(), n, (0..n).filter(|i| mask >> i & 1 == 1));
        if x.intersection(a) != ba {
            continue;
        }
        let fixed = match state.lookup_f(&x, a) {
            Ok(fx) => fx == x,
            Err(ModelError::Undefined) => false,
            Err(e) => return Err(e),
        };
        if fixed != (x == target) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::AtomContext;
    use crate::model::ModelConfig;
    use rand::SeedableRng;

    #[test]
    fn one_atom_two_steps() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut m = ModelState::new(AtomContext::new(&["p"]).unwrap(), ModelConfig::default()).unwrap();
        let hp = m.atom_set("p").unwrap();
        m.process_base(&hp).unwrap();
        let hp = m.atom_set("p").unwrap();
        m.process_base(&hp.complement()).unwrap();
        assert_eq!(m.records()[1].case, Case::Revisit { previous: 0 });
        let rep = audit(&m, &mut rng, 8).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
        assert!(rep.passed["reprocessing_consistency"] > 0);
        assert!(rep.passed["weak_symmetry"] > 0);
    }

    #[test]
    fn uniqueness_on_a_small_stage() {
        let mut m = ModelState::new(AtomContext::new(&["p", "q"]).unwrap(), ModelConfig::default()).unwrap();
        let hp = m.atom_set("p").unwrap();
        m.process_base(&hp).unwrap();
        let hp = m.atom_set("p").unwrap();
        let hq = m.atom_set("q").unwrap();
        assert!(uniqueness_holds(&m, &hq, &hp).unwrap());
        assert!(uniqueness_holds(&m, &hq, &hp.complement()).unwrap());
    }
}
