use num_rational::BigRational;
use proptest::prelude::*;

use crlab::algebra::{poly_normalize, rat, to_raw, GaussianRational, Param, RawExpr, SymbolTable};
use crlab::closed_form::HPoint;
use crlab::jets::{canonicalize_letters, is_canonical, IndexLetter};
use crlab::numeric::{taylor_eval, RealPoint};
use crlab::quadrature::{gauge4_exact, Dilation};
use crlab::syntax::{parse_config, parse_expression, parse_rational, Func, Node, Var};

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-50i64..=50, 1i64..=12).prop_map(|(a, b)| rat(a, b))
}

fn gauss() -> impl Strategy<Value = GaussianRational> {
    (small_rat(), small_rat()).prop_map(|(a, b)| GaussianRational::new(a, b))
}

fn raw_expr() -> impl Strategy<Value = RawExpr> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["x", "y", "z"]).prop_map(RawExpr::sym),
        gauss().prop_map(RawExpr::Scalar),
        prop::sample::select(Param::ALL.to_vec()).prop_map(RawExpr::Param),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(RawExpr::Add),
            prop::collection::vec(inner.clone(), 1..3).prop_map(RawExpr::Mul),
            inner.clone().prop_map(|e| RawExpr::Neg(Box::new(e))),
            (inner, 0u32..3).prop_map(|(e, k)| RawExpr::pow(e, k)),
        ]
    })
}

fn table() -> SymbolTable {
    let mut t = SymbolTable::new();
    for s in ["x", "y", "z"] {
        t.symbol(s);
    }
    t
}

/// A different tree with the same value: commuted, with a cancelling pair added.
fn rewrite(e: &RawExpr, noise: &RawExpr) -> RawExpr {
    let shuffled = match e {
        RawExpr::Add(v) => RawExpr::Add(v.iter().rev().cloned().collect()),
        RawExpr::Mul(v) => RawExpr::Mul(v.iter().rev().cloned().collect()),
        other => other.clone(),
    };
    RawExpr::Add(vec![noise.clone(), shuffled, RawExpr::Neg(Box::new(noise.clone()))])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn gaussian_rational_ring_axioms(a in gauss(), b in gauss(), c in gauss()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &a) + &b, b.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), GaussianRational::one());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn normalization_is_idempotent(e in raw_expr()) {
        let t = table();
        let once = poly_normalize(&e, &t).unwrap();
        let twice = poly_normalize(&to_raw(&once, &t).unwrap(), &t).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn canonical_equality_is_a_congruence(e1 in raw_expr(), e3 in raw_expr(), noise in raw_expr()) {
        let t = table();
        let (e2, e4) = (rewrite(&e1, &noise), rewrite(&e3, &noise));
        let norm = |e: &RawExpr| poly_normalize(e, &t).unwrap();
        prop_assert_eq!(norm(&e1), norm(&e2));
        prop_assert_eq!(norm(&e3), norm(&e4));
        let sum = |a: &RawExpr, b: &RawExpr| RawExpr::Add(vec![a.clone(), b.clone()]);
        let prod = |a: &RawExpr, b: &RawExpr| RawExpr::Mul(vec![a.clone(), b.clone()]);
        prop_assert_eq!(norm(&sum(&e1, &e3)), norm(&sum(&e2, &e4)));
        prop_assert_eq!(norm(&prod(&e1, &e3)), norm(&prod(&e2, &e4)));
    }

    #[test]
    fn canonicalized_words_are_canonical(word in prop::collection::vec(prop::sample::select(IndexLetter::all(3)), 1..=4)) {
        let out = canonicalize_letters(&word);
        for w in out.keys() {
            prop_assert!(is_canonical(w));
            prop_assert!(w.len() <= word.len());
        }
        if is_canonical(&word) {
            prop_assert_eq!(out.len(), 1);
            prop_assert!(out.values().next().unwrap().is_one());
        }
    }

    #[test]
    fn gauge_is_homogeneous(z in prop::collection::vec(gauss(), 1..=3), t in small_rat(), s in small_rat()) {
        let p = HPoint { z, t };
        let q = Dilation { s: s.clone() }.apply(&p);
        let s4 = &s * &s * &s * &s;
        prop_assert_eq!(gauge4_exact(&q), s4 * gauge4_exact(&p));
    }

    #[test]
    fn rationals_round_trip(r in small_rat()) {
        prop_assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn printed_expressions_parse_back(e in node()) {
        let printed = e.to_string();
        let again = parse_expression(&printed).unwrap();
        prop_assert_eq!(again.to_string(), printed);
        let p = RealPoint::new(&[0.3, -0.2], &[0.1, 0.4], 0.25);
        let a = taylor_eval(&e, &p).map(|v| v.value());
        let b = taylor_eval(&again, &p).map(|v| v.value());
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0) || !a.is_finite()),
            (a, b) => prop_assert_eq!(a.is_ok(), b.is_ok()),
        }
    }

    #[test]
    fn parsers_do_not_panic(s in "\\PC{0,40}") {
        let _ = parse_expression(&s);
        let _ = parse_config(&s);
        let _ = parse_rational(&s);
        let _ = crlab::syntax::parse_point(&s, 2);
    }
}

fn node() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        prop::sample::select(vec![Var::X(1), Var::Y(1), Var::X(2), Var::Y(2), Var::T]).prop_map(Node::var),
        (-9i64..=9, 1i64..=4).prop_map(|(a, b)| Node::num(rat(a, b))),
        Just(Node::I),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(|a| -a),
            (inner.clone(), -2i64..=3).prop_map(|(a, k)| Node::Pow(Box::new(a), k)),
            (prop::sample::select(vec![Func::Exp, Func::Abs2]), inner).prop_map(|(f, a)| Node::call(f, a)),
        ]
    })
}
