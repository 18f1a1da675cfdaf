mod common;

use proptest::prelude::*;

use kenmotsu::tensor::{
    directional_derivative, lie_bracket, lie_derivative, lower_index, raise_index, Chart, MetricField, TensorField,
};

use common::{all_fixtures, m5, random_form, random_polynomial, random_polynomial_field, rng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn jacobi_identity(seed in any::<u64>()) {
        let chart = Chart::from_coordinates(&["x", "y", "z"]).unwrap();
        let mut r = rng(seed);
        let (x, y, z) = (random_polynomial_field(&chart, &mut r), random_polynomial_field(&chart, &mut r), random_polynomial_field(&chart, &mut r));
        let cyc = |a: &TensorField, b: &TensorField, c: &TensorField| lie_bracket(a, &lie_bracket(b, c).unwrap()).unwrap();
        let sum = cyc(&x, &y, &z).add(&cyc(&y, &z, &x)).unwrap().add(&cyc(&z, &x, &y)).unwrap();
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn lie_derivative_of_bracket_is_commutator(seed in any::<u64>()) {
        let chart = Chart::from_coordinates(&["x", "y", "z"]).unwrap();
        let mut r = rng(seed);
        let (x, y) = (random_polynomial_field(&chart, &mut r), random_polynomial_field(&chart, &mut r));
        let t = random_form(&chart, &mut r);
        let lhs = lie_derivative(&t, &lie_bracket(&x, &y).unwrap()).unwrap();
        let xy = lie_derivative(&lie_derivative(&t, &y).unwrap(), &x).unwrap();
        let yx = lie_derivative(&lie_derivative(&t, &x).unwrap(), &y).unwrap();
        prop_assert_eq!(lhs, xy.sub(&yx).unwrap());
    }

    #[test]
    fn scalar_lie_derivative_is_directional(seed in any::<u64>()) {
        let geo = m5();
        let chart = geo.chart();
        let mut r = rng(seed);
        let (f, x) = (random_polynomial(chart, &mut r), random_polynomial_field(chart, &mut r));
        let lf = lie_derivative(&TensorField::scalar(chart, f.clone()), &x).unwrap();
        let df = directional_derivative(&f, &x).unwrap();
        let manual = (0..5).fold(chart.zero(), |acc, i| &acc + &(x.get(&[i]) * &f.derivative(i)));
        prop_assert_eq!(lf.as_scalar().unwrap(), &df);
        prop_assert_eq!(df, manual);
    }

    #[test]
    fn lie_derivative_is_leibniz(seed in any::<u64>()) {
        let chart = Chart::from_coordinates(&["x", "y"]).unwrap();
        let mut r = rng(seed);
        let (f, x, y) = (random_polynomial(&chart, &mut r), random_polynomial_field(&chart, &mut r), random_polynomial_field(&chart, &mut r));
        let lhs = lie_derivative(&y.scale(&f), &x).unwrap();
        let rhs = y.scale(&directional_derivative(&f, &x).unwrap()).add(&lie_derivative(&y, &x).unwrap().scale(&f)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn raising_then_lowering_is_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        for (_, geo) in all_fixtures() {
            let g: &MetricField = geo.structure.metric();
            let w = random_form(geo.chart(), &mut r);
            let up = raise_index(&w, 0, g).unwrap();
            prop_assert_eq!(lower_index(&up, 0, g).unwrap(), w);
        }
    }
}

#[test]
fn metric_inverse_is_exact_on_fixtures() {
    for (name, geo) in all_fixtures() {
        let g = geo.structure.metric();
        let n = geo.chart().dimension();
        for i in 0..n {
            for j in 0..n {
                let s = (0..n).fold(geo.chart().zero(), |acc, k| &acc + &(g.inverse_component(i, k) * g.component(k, j)));
                let want = geo.chart().constant(i64::from(i == j));
                assert_eq!(s, want, "{name} ({i}, {j})");
            }
        }
    }
}

#[test]
fn raising_eta_gives_xi() {
    for (name, geo) in all_fixtures() {
        let s = &geo.structure;
        assert_eq!(&raise_index(s.eta(), 0, s.metric()).unwrap(), s.xi(), "{name}");
    }
}
