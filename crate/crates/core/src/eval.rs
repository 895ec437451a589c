//! Set semantics of formulas in the model, with `□` read over the total
//! accessibility relation, and the verdicts built on it.

use std::fmt;

use crate::algebra::StageSet;
use crate::error::ModelError;
use crate::formula::{desugar, Formula};
use crate::model::{ModelState, Schedule, FAITHFUL_STEP_CAP};

/// Value of `f` at the current stage. Sugar is expanded first.
pub fn evaluate(state: &mut ModelState, f: &Formula) -> Result<StageSet, ModelError> {
    let core = desugar(f, state.context());
    let s = eval_core(state, &core)?;
    Ok(state.forward_to_current(&s))
}

fn eval_core(state: &mut ModelState, f: &Formula) -> Result<StageSet, ModelError> {
    if let Some(s) = state.cached(f) {
        return Ok(s);
    }
    let value = match f {
        Formula::Atom(name) => state.atom_set(name)?,
        Formula::Not(a) => eval_core(state, a)?.complement(),
        Formula::Implies(a, b) => {
            let va = eval_core(state, a)?;
            let vb = eval_core(state, b)?;
            let va = state.forward_to_current(&va);
            va.complement().union(&vb)
        }
        Formula::Box(a) => {
            let va = eval_core(state, a)?;
            if va.is_full() {
                state.full()
            } else {
                state.empty()
            }
        }
        Formula::Cond(consequent, antecedent) => {
            let a = eval_core(state, antecedent)?;
            let b = eval_core(state, consequent)?;
            conditional(state, &b, &a)?
        }
        other => return eval_core(state, &desugar(other, state.context())),
    };
    state.remember(f, &value);
    Ok(value)
}

/// `f(B, A)`, advancing the construction until it is defined.
pub fn conditional(state: &mut ModelState, b: &StageSet, a: &StageSet) -> Result<StageSet, ModelError> {
    let mut a = state.forward_to_current(a);
    let mut b = state.forward_to_current(b);
    match state.lookup_f(&b, &a) {
        Ok(v) => return Ok(v),
        Err(ModelError::Undefined) => {}
        Err(e) => return Err(e),
    }
    match state.config().schedule {
        Schedule::Query => {
            state.process_base(&a)?;
            a = state.forward_to_current(&a);
            b = state.forward_to_current(&b);
            state.lookup_f(&b, &a).map_err(|e| match e {
                ModelError::Undefined => ModelError::Internal("conditional undefined right after processing".into()),
                e => e,
            })
        }
        Schedule::Faithful => {
            for _ in 0..FAITHFUL_STEP_CAP {
                state.faithful_step()?;
                a = state.forward_to_current(&a);
                b = state.forward_to_current(&b);
                match state.lookup_f(&b, &a) {
                    Ok(v) => return Ok(v),
                    Err(ModelError::Undefined) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(ModelError::StepCap(FAITHFUL_STEP_CAP))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Modal-free and true at every world.
    Proved,
    /// True at every world of the model but mentions `□`.
    ValidInModel,
    /// False at `witness`, given as a nested pair label.
    Refuted { witness: String },
    /// The world guard stopped the construction.
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Proved => "Proved",
            Verdict::ValidInModel => "ValidInModel",
            Verdict::Refuted { .. } => "Refuted",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Proved | Verdict::ValidInModel)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Refuted { witness } => write!(f, "Refuted at {witness}"),
            Verdict::Inconclusive { reason } => write!(f, "Inconclusive ({reason})"),
            v => f.write_str(v.name()),
        }
    }
}

/// Guard trips and step caps become `Inconclusive`; other errors propagate.
pub fn verdict(state: &mut ModelState, f: &Formula) -> Result<Verdict, ModelError> {
    let h = match evaluate(state, f) {
        Ok(h) => h,
        Err(e @ (ModelError::Guard { .. } | ModelError::StepCap(_))) => {
            return Ok(Verdict::Inconclusive { reason: e.to_string() })
        }
        Err(e) => return Err(e),
    };
    Ok(if let Some(w) = h.complement().first() {
        Verdict::Refuted { witness: state.world_label(h.stage(), w) }
    } else if desugar(f, state.context()).is_modal_free() {
        Verdict::Proved
    } else {
        Verdict::ValidInModel
    })
}

/// Whether `f(H(psi), H(phi)) = H(psi)`.
pub fn check_independence(state: &mut ModelState, psi: &Formula, phi: &Formula) -> Result<bool, ModelError> {
    let a = evaluate(state, phi)?;
    let b = evaluate(state, psi)?;
    let f = conditional(state, &b, &a)?;
    Ok(f == state.forward_to_current(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, AtomContext};
    use crate::model::ModelConfig;

    fn model2() -> ModelState {
        ModelState::new(AtomContext::new(&["p", "q"]).unwrap(), ModelConfig::default()).unwrap()
    }

    fn v(m: &mut ModelState, s: &str) -> Verdict {
        let f = parse(s, m.context()).unwrap();
        verdict(m, &f).unwrap()
    }

    #[test]
    fn classical_and_axiom_examples() {
        let mut m = model2();
        assert_eq!(v(&mut m, "(p /\\ q) -> p"), Verdict::Proved);
        assert_eq!(v(&mut m, "(q | p) -> (p -> q)"), Verdict::Proved);
        assert_eq!(v(&mut m, "~(q | p) <-> (~q | p)"), Verdict::Proved);
        assert_eq!(v(&mut m, "box p -> p"), Verdict::ValidInModel);
    }

    #[test]
    fn atoms_are_not_independent() {
        let mut m = model2();
        assert!(matches!(v(&mut m, "(q | p) <-> q"), Verdict::Refuted { .. }));
        let mut m = model2();
        let q = parse("q", m.context()).unwrap();
        let p = parse("p", m.context()).unwrap();
        assert!(!check_independence(&mut m, &q, &p).unwrap());
    }

    #[test]
    fn independence_examples() {
        let mut m = model2();
        let ctx = m.context().clone();
        let f = |s: &str| parse(s, &ctx).unwrap();
        assert!(check_independence(&mut m, &f("p"), &f("top")).unwrap());
        assert!(check_independence(&mut m, &f("(q | p)"), &f("p")).unwrap());
        assert!(!check_independence(&mut m, &f("p"), &f("p")).unwrap());
    }

    #[test]
    fn guard_becomes_inconclusive() {
        let cfg = ModelConfig { max_worlds: 6, ..ModelConfig::default() };
        let mut m = ModelState::new(AtomContext::new(&["p", "q"]).unwrap(), cfg).unwrap();
        assert!(matches!(v(&mut m, "(q | p) -> q"), Verdict::Inconclusive { .. }));
    }
}
