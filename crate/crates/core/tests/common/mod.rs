#![allow(dead_code)]

use proptest::prelude::*;
use squarebit::geometry::{Rational, Scalar};
use squarebit::models::TwoCoordState;

pub type Q = Rational;

/// Rationals in [0, 1] with denominator at most 12.
pub fn unit_rational() -> impl Strategy<Value = Q> {
    (1i64..=12).prop_flat_map(|d| (0..=d).prop_map(move |n| Q::from_ratio(n, d)))
}

pub fn state() -> impl Strategy<Value = TwoCoordState<Q>> {
    (unit_rational(), unit_rational()).prop_map(|(p, q)| TwoCoordState::new(p, q).unwrap())
}

/// Convex weights from raw nonnegative integers (at least one positive).
pub fn weights(n: usize) -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::vec(0i64..=20, n)
        .prop_filter("not all zero", |v| v.iter().any(|&x| x > 0))
        .prop_map(|v| {
            let total: i64 = v.iter().sum();
            v.into_iter().map(|x| Q::from_ratio(x, total)).collect()
        })
}
