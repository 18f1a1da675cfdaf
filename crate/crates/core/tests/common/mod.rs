#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kenmotsu::contact::{build_warped_kenmotsu, builtin_example_m5, flat_rotation_r3, Geometry, KahlerFactor};
use kenmotsu::kernel::ScalarExpr;
use kenmotsu::tensor::{Chart, TensorField};

pub fn m5() -> Geometry {
    Geometry::new(builtin_example_m5().1).unwrap()
}

pub fn warped(n: usize) -> Geometry {
    Geometry::new(build_warped_kenmotsu(&KahlerFactor::flat(n), &BigRational::one()).unwrap().1).unwrap()
}

/// The built-in fixtures plus the flat rotation structure.
pub fn all_fixtures() -> Vec<(&'static str, Geometry)> {
    vec![
        ("m5_example", m5()),
        ("warped_flat_n1", warped(1)),
        ("warped_flat_n2", warped(2)),
        ("flat_rotation_r3", Geometry::new(flat_rotation_r3().1).unwrap()),
    ]
}

pub fn int(chart: &Arc<Chart>, k: i64) -> ScalarExpr {
    chart.constant(k)
}

/// A vector field whose components are random integer polynomials of degree
/// at most two in the coordinates.
pub fn random_polynomial_field(chart: &Arc<Chart>, rng: &mut ChaCha8Rng) -> TensorField {
    let n = chart.dimension();
    let comps = (0..n)
        .map(|_| {
            let mut acc = int(chart, rng.random_range(-3..=3));
            for i in 0..n {
                let xi = ScalarExpr::coordinate(n, i);
                acc = &acc + &xi.scale(&BigRational::from_integer(BigInt::from(rng.random_range(-2..=2))));
                for j in i..n {
                    if rng.random_bool(0.3) {
                        let xj = ScalarExpr::coordinate(n, j);
                        acc = &acc + &(&xi * &xj).scale(&BigRational::from_integer(BigInt::from(rng.random_range(-2..=2))));
                    }
                }
            }
            acc
        })
        .collect();
    TensorField::vector(chart, comps).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random integer polynomial of degree at most two.
pub fn random_polynomial(chart: &Arc<Chart>, rng: &mut ChaCha8Rng) -> ScalarExpr {
    random_polynomial_field(chart, rng).components()[0].clone()
}

/// A `(0,2)` tensor with random polynomial components.
pub fn random_form(chart: &Arc<Chart>, rng: &mut ChaCha8Rng) -> TensorField {
    let n = chart.dimension();
    let comps = (0..n * n).map(|_| random_polynomial(chart, rng)).collect();
    TensorField::new(chart, 0, 2, comps).unwrap()
}
