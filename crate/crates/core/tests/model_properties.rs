mod common;

use common::{state, Q};
use proptest::prelude::*;
use squarebit::geometry::{Float, Scalar};
use squarebit::models::{build_evengon, fold_to_first_quadrant, minimal_tensor, square, Model};

fn effects_in_unit_interval<S: Scalar>(m: &Model<S>) {
    for w in m.vertices() {
        assert!(m.unit_effect().eval(w).unwrap().approx_eq(&S::one()));
        for e in m.effects() {
            let x = e.eval(w).unwrap();
            assert!(!x.is_negative() && x.le_tol(&S::one()), "{} on {w} gives {x}", e.label);
        }
        for meas in m.measurements() {
            let total = meas.effects.iter().fold(S::zero(), |a, e| a + e.eval(w).unwrap());
            assert!(total.approx_eq(&S::one()));
        }
    }
}

#[test]
fn effects_are_probabilities_on_every_polygon() {
    effects_in_unit_interval(&square::<Q>());
    for k in 2..=8 {
        effects_in_unit_interval(&build_evengon::<Float>(k).unwrap());
    }
}

#[test]
fn central_symmetry() {
    for k in 2..=8 {
        let m = build_evengon::<Float>(k).unwrap();
        for i in 1..=k {
            let (a, b) = (m.omega(i), m.omega(i + k));
            assert!((a[0] + b[0]).is_zero() && (a[1] + b[1]).is_zero(), "k = {k}, i = {i}");
        }
    }
    let sq = square::<Q>();
    for i in 1..=2 {
        assert_eq!(sq.omega(i).slice().scale(&-Q::one()), sq.omega(i + 2).slice());
    }
}

#[test]
fn tensor_vertex_counts_multiply() {
    let sq = square::<Q>();
    assert_eq!(minimal_tensor(&[sq.clone(), sq.clone()]).unwrap().vertices().len(), 16);
    assert_eq!(minimal_tensor(&[sq.clone(), sq.clone(), sq]).unwrap().vertices().len(), 64);
    let hex = build_evengon::<Float>(3).unwrap();
    let sqf = build_evengon::<Float>(2).unwrap();
    let composite = minimal_tensor(&[hex, sqf]).unwrap();
    assert_eq!(composite.vertices().len(), 24);
    assert_eq!(composite.dimension(), 9);
}

proptest! {
    #[test]
    fn folding_keeps_the_radii(s in state()) {
        let (f, t) = fold_to_first_quadrant(&s);
        let (a, b) = s.radii();
        let (fa, fb) = f.radii();
        let mut before = [a, b];
        let mut after = [fa, fb];
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
        prop_assert!(f.p >= Q::half() && f.q >= Q::half());
        prop_assert_eq!(t.apply(&s.vector()).unwrap(), f.vector());
    }
}
