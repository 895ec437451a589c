use dmbl_core::algebra::{ForwardRecord, StageSet, WorldTable};
use dmbl_core::formula::{desugar, parse, render, AtomContext, Formula};
use dmbl_core::model::{ModelConfig, ModelState};
use dmbl_core::prob::{measure, prob, Distribution, DistKind};
use dmbl_core::ratfn::{limit_at_zero, Poly, Rational, RationalFn};
use num_bigint::BigInt;
use proptest::prelude::*;

fn ctx() -> AtomContext {
    AtomContext::new(&["p", "q"]).unwrap()
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::atom("p")),
        Just(Formula::atom("q")),
        Just(Formula::Top),
        Just(Formula::Bot),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::boxed),
            inner.clone().prop_map(Formula::dia),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::cond(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::indep(a, b)),
        ]
    })
}

fn classical() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![Just(Formula::atom("p")), Just(Formula::atom("q"))];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
        ]
    })
}

fn weights() -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(1i64..20, 4).prop_map(|v| {
        let total: i64 = v.iter().sum();
        v.into_iter().map(|x| Rational::new(BigInt::from(x), BigInt::from(total))).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn render_then_parse_is_identity(f in formula()) {
        let text = render(&f);
        let back = parse(&text, &ctx()).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(desugar(&back, &ctx()), desugar(&f, &ctx()));
    }

    #[test]
    fn desugar_is_idempotent_and_core(f in formula()) {
        let once = desugar(&f, &ctx());
        prop_assert!(once.is_core());
        prop_assert_eq!(desugar(&once, &ctx()), once);
    }

    #[test]
    fn forward_is_an_injective_boolean_morphism(
        pairs in proptest::collection::btree_set((0u32..5, 0u32..5), 1..12),
        a in proptest::collection::vec(any::<bool>(), 5),
        b in proptest::collection::vec(any::<bool>(), 5),
    ) {
        // close the pair set under swapping and keep it irreflexive
        let mut all: Vec<(u32, u32)> = Vec::new();
        for (x, y) in pairs {
            if x != y {
                for p in [(x, y), (y, x)] {
                    if !all.contains(&p) { all.push(p); }
                }
            }
        }
        prop_assume!(!all.is_empty());
        let table = WorldTable::from_pairs(&all).unwrap();
        let rec = ForwardRecord::from_table(0, 5, &table);
        let covered: Vec<usize> = (0..5).filter(|w| !rec.images[*w].is_empty()).collect();
        let sa = StageSet::from_indices(0, 5, covered.iter().copied().filter(|w| a[*w]));
        let sb = StageSet::from_indices(0, 5, covered.iter().copied().filter(|w| b[*w]));
        let fa = rec.forward(&sa).unwrap();
        let fb = rec.forward(&sb).unwrap();
        prop_assert_eq!(rec.forward(&sa.intersection(&sb)).unwrap(), fa.intersection(&fb));
        prop_assert_eq!(rec.forward(&sa.union(&sb)).unwrap(), fa.union(&fb));
        prop_assert_eq!(fa == fb, sa == sb);
        prop_assert_eq!(rec.pullback(&fa), Some(sa));
    }

    #[test]
    fn probability_axioms_hold_for_extended_measure(w in weights(), a in formula(), b in formula()) {
        let cfg = ModelConfig { max_worlds: 4000, ..ModelConfig::default() };
        let mut m = ModelState::new(ctx(), cfg).unwrap();
        let d = Distribution::new(DistKind::Atoms(vec!["p".into(), "q".into()]), w).unwrap();
        m.attach_measure(&d).unwrap();
        let pa = prob(&mut m, &a);
        let pb = prob(&mut m, &b);
        let pand = prob(&mut m, &Formula::and(a.clone(), b.clone()));
        let por = prob(&mut m, &Formula::or(a.clone(), b.clone()));
        if let (Ok(pa), Ok(pb), Ok(pand), Ok(por)) = (pa, pb, pand, por) {
            prop_assert_eq!(&pand + &por, &pa + &pb);
            prop_assert_eq!(prob(&mut m, &Formula::Top).unwrap(), Rational::from_integer(1.into()));
            prop_assert_eq!(prob(&mut m, &Formula::Bot).unwrap(), Rational::from_integer(0.into()));
            let full = m.full();
            prop_assert_eq!(measure(&m, &full).unwrap(), Rational::from_integer(1.into()));
        }
    }

    #[test]
    fn classical_probability_is_not_distorted(w in weights(), f in classical()) {
        let mut m = ModelState::new(ctx(), ModelConfig::default()).unwrap();
        let d = Distribution::new(DistKind::Atoms(vec!["p".into(), "q".into()]), w.clone()).unwrap();
        m.attach_measure(&d).unwrap();
        // advance the model first so the value is read at a later stage
        prob(&mut m, &parse("(q | p)", &ctx()).unwrap()).unwrap();
        let got = prob(&mut m, &f).unwrap();
        let mut expected = Rational::from_integer(0.into());
        for (world, weight) in w.iter().enumerate() {
            if truth(&f, world) { expected += weight; }
        }
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn limit_matches_value_at_zero_when_defined(c in proptest::collection::vec(-5i64..6, 1..4), d in proptest::collection::vec(-5i64..6, 1..4)) {
        let poly = |v: &[i64]| Poly::new(v.iter().map(|x| Rational::from_integer((*x).into())).collect());
        let (num, den) = (poly(&c), poly(&d));
        prop_assume!(!den.is_zero());
        let r = RationalFn::new(num, den.clone()).unwrap();
        let zero = Rational::from_integer(0.into());
        if let Some(v) = r.eval(&zero) {
            prop_assert_eq!(limit_at_zero(&r).unwrap(), v);
        }
    }
}

fn truth(f: &Formula, world: usize) -> bool {
    match f {
        Formula::Atom(n) => {
            let j = if n == "p" { 0 } else { 1 };
            (world >> (1 - j)) & 1 == 0
        }
        Formula::Not(a) => !truth(a, world),
        Formula::And(a, b) => truth(a, world) && truth(b, world),
        Formula::Or(a, b) => truth(a, world) || truth(b, world),
        _ => unreachable!(),
    }
}
