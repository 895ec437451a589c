//! Formula pools and random distributions shared by the suites.

use dmbl_core::formula::{parse_unchecked, Formula};
use dmbl_core::prob::{DistKind, Distribution};
use dmbl_core::Rational;
use rand::Rng;

fn f(text: &str) -> Formula {
    parse_unchecked(text).expect("pool formulas are well formed")
}

/// Classical formulas over the first one or two atoms of `atoms`.
pub fn classical(atoms: &[String]) -> Vec<Formula> {
    let p = &atoms[0];
    let mut out = vec![f(p), f(&format!("~{p}"))];
    if let Some(q) = atoms.get(1) {
        out.extend([
            f(q),
            f(&format!("{p} /\\ {q}")),
            f(&format!("{p} \\/ {q}")),
            f(&format!("{p} <-> {q}")),
            f(&format!("~{p} /\\ {q}")),
        ]);
    }
    out.extend([Formula::Top, Formula::Bot]);
    out
}

/// Conditionals of depth exactly `depth` built over the classical pool.
fn conditionals(atoms: &[String], depth: usize) -> Vec<Formula> {
    let p = f(&atoms[0]);
    let q = atoms.get(1).map(|q| f(q)).unwrap_or_else(|| Formula::not(p.clone()));
    if depth == 1 {
        let mut out = vec![Formula::cond(q.clone(), p.clone()), Formula::cond(p.clone(), q.clone())];
        if atoms.len() > 1 {
            out.push(Formula::cond(q.clone(), Formula::not(p.clone())));
            out.push(Formula::cond(Formula::and(p.clone(), q.clone()), Formula::or(p.clone(), q.clone())));
        } else {
            out.push(Formula::cond(p.clone(), p.clone()));
        }
        return out;
    }
    let inner = conditionals(atoms, depth - 1);
    let lead = inner[0].clone();
    vec![
        Formula::cond(lead.clone(), q.clone()),
        Formula::cond(p.clone(), lead.clone()),
        Formula::cond(lead, inner[1].clone()),
    ]
}

/// Classical formulas plus conditionals of every depth up to `max_depth`.
pub fn formulas(atoms: &[String], max_depth: usize) -> Vec<Formula> {
    let mut out = classical(atoms);
    for d in 1..=max_depth {
        out.extend(conditionals(atoms, d));
    }
    out
}

/// A smaller pool for schemata with three variables: contingent classical
/// formulas, the constants, and the first conditional of each depth.
pub fn compact(atoms: &[String], max_depth: usize) -> Vec<Formula> {
    let mut out: Vec<Formula> = classical(atoms).into_iter().take(3).collect();
    out.extend([Formula::Top, Formula::Bot]);
    for d in 1..=max_depth {
        out.extend(conditionals(atoms, d).into_iter().take(if d == 1 { 2 } else { 1 }));
    }
    out
}

/// Classical formulas over `atoms` of depth at most `depth`, sampled.
pub fn random_classical<R: Rng + ?Sized>(rng: &mut R, atoms: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..atoms.len() + 2) {
            i if i < atoms.len() => Formula::atom(&atoms[i]),
            i if i == atoms.len() => Formula::Top,
            _ => Formula::Bot,
        };
    }
    let a = random_classical(rng, atoms, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_classical(rng, atoms, depth - 1)),
        2 => Formula::or(a, random_classical(rng, atoms, depth - 1)),
        3 => Formula::implies(a, random_classical(rng, atoms, depth - 1)),
        _ => Formula::iff(a, random_classical(rng, atoms, depth - 1)),
    }
}

/// Random rational weights `k/total` with `k` in `1..=12`, or with some
/// entries zero when `degenerate` (at least one zero, at least one positive).
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, kind: DistKind, degenerate: bool) -> Distribution {
    let n = Distribution::uniform(kind.clone()).weights.len();
    let mut raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=12)).collect();
    if degenerate {
        let zero = rng.gen_range(0..n);
        for (i, w) in raw.iter_mut().enumerate() {
            if i == zero || (i != (zero + 1) % n && rng.gen_bool(0.3)) {
                *w = 0;
            }
        }
    }
    let total: i64 = raw.iter().sum();
    let weights = raw.into_iter().map(|w| Rational::new(w.into(), total.into())).collect();
    Distribution::new(kind, weights).expect("weights sum to one")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two() -> Vec<String> {
        vec!["p".into(), "q".into()]
    }

    #[test]
    fn pool_depths_are_bounded() {
        let pool = formulas(&two(), 2);
        assert!(pool.iter().all(|x| x.cond_depth() <= 2));
        assert!(pool.iter().any(|x| x.cond_depth() == 2));
        assert!(compact(&two(), 2).len() < pool.len());
    }

    #[test]
    fn distributions_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for degenerate in [false, true] {
            let d = random_distribution(&mut rng, DistKind::Atoms(two()), degenerate);
            assert_eq!(d.strictly_positive(), !degenerate);
            assert_eq!(d.weights.iter().sum::<Rational>(), Rational::from_integer(1.into()));
        }
    }
}
