use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use kenmotsu::kernel::{q, EvalMode, ExprContext, ScalarExpr};

#[derive(Clone, Debug)]
enum Tree {
    Int(i64),
    Var(usize),
    Exp(i64, i64),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    /// Division by `1 + b²`, which has no real poles.
    Div(Box<Tree>, Box<Tree>),
}

fn tree() -> impl Strategy<Value = Tree> {
    let leaf = prop_oneof![(-3i64..=3).prop_map(Tree::Int), (0usize..2).prop_map(Tree::Var), (-2i64..=2, -1i64..=1).prop_map(|(a, b)| Tree::Exp(a, b))];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Add(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Sub(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Mul(a.into(), b.into())),
            (inner.clone(), inner).prop_map(|(a, b)| Tree::Div(a.into(), b.into())),
        ]
    })
}

fn build(t: &Tree) -> ScalarExpr {
    match t {
        Tree::Int(k) => ScalarExpr::integer(2, *k),
        Tree::Var(i) => ScalarExpr::coordinate(2, *i),
        Tree::Exp(a, b) => ScalarExpr::exponential(&[Rational64::from_integer(*a), Rational64::from_integer(*b)]),
        Tree::Add(a, b) => &build(a) + &build(b),
        Tree::Sub(a, b) => &build(a) - &build(b),
        Tree::Mul(a, b) => &build(a) * &build(b),
        Tree::Div(a, b) => {
            let d = build(b);
            build(a).checked_div(&(&ScalarExpr::one(2) + &(&d * &d))).unwrap()
        }
    }
}

fn ctx() -> ExprContext {
    ExprContext::new(&["x", "y"]).unwrap()
}

fn point() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((1000i64..=2000).prop_map(|k| q(k, 1000)), 2)
}

const APPROX: EvalMode = EvalMode::Approximate { digits: 40 };

fn rel_err(a: &BigRational, b: &BigRational) -> BigRational {
    let scale = a.abs().max(BigRational::from_integer(BigInt::from(1)));
    (a - b).abs() / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printing_then_parsing_is_identity(t in tree()) {
        let c = ctx();
        let e = build(&t);
        let text = e.display(&c).to_string();
        let back = c.parse(&text).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(back.display(&c).to_string(), text);
    }

    #[test]
    fn ring_laws(a in tree(), b in tree(), c in tree()) {
        let (a, b, c) = (build(&a), build(&b), build(&c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn division_round_trips(a in tree(), b in tree()) {
        let (a, b) = (build(&a), build(&b));
        let d = &ScalarExpr::one(2) + &(&b * &b);
        prop_assert_eq!((&a * &d).checked_div(&d).unwrap(), a);
    }

    #[test]
    fn mixed_partials_commute(t in tree()) {
        let e = build(&t);
        prop_assert_eq!(e.derivative(0).derivative(1), e.derivative(1).derivative(0));
    }

    #[test]
    fn derivative_matches_central_difference(t in tree(), p in point(), axis in 0usize..2) {
        let e = build(&t);
        let exact = e.derivative(axis).evaluate(&p, APPROX).unwrap();
        for h in [q(1, 1000), q(1, 10_000)] {
            let mut plus = p.clone();
            plus[axis] += &h;
            let mut minus = p.clone();
            minus[axis] -= &h;
            let fd = (e.evaluate(&plus, APPROX).unwrap() - e.evaluate(&minus, APPROX).unwrap()) / (&h * q(2, 1));
            let err = rel_err(&exact, &fd);
            // scale by the size of the function too; central differences lose to large third derivatives
            let size = e.evaluate(&p, APPROX).unwrap().abs().max(q(1, 1));
            prop_assert!(err / size <= q(1, 10_000), "h = {}", h);
        }
    }

    #[test]
    fn zero_test_is_sound(t in tree(), u in tree()) {
        let (a, b) = (build(&t), build(&u));
        let e = &(&a * &b) - &(&b * &a);
        prop_assert!(e.is_zero());
        let f = &a - &b;
        if f.is_zero() {
            for k in 0..20 {
                let p = vec![q(1000 + 37 * k, 1000), q(1500 + 23 * k, 1000)];
                prop_assert!(f.evaluate(&p, APPROX).unwrap().is_zero());
            }
        }
    }
}
