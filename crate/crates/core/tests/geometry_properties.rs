mod common;

use common::{weights, Q};
use proptest::prelude::*;
use squarebit::geometry::{
    enumerate_vertices, hull_member, HalfSpace, HullMembership, LinearConstraint, LinearProgram, Polytope, Scalar, Vector,
};

/// A box `|xᵢ| ≤ bᵢ` in R³ cut by up to three extra half-spaces that keep the
/// origin strictly inside.
fn hrep() -> impl Strategy<Value = Vec<HalfSpace<Q>>> {
    let bounds = proptest::collection::vec(1i64..=4, 3);
    let cuts = proptest::collection::vec((proptest::collection::vec(-3i64..=3, 3), 1i64..=6), 0..=3);
    (bounds, cuts).prop_map(|(bounds, cuts)| {
        let mut hs = Vec::new();
        for (i, b) in bounds.iter().enumerate() {
            for sign in [1, -1] {
                let mut n = [0; 3];
                n[i] = sign;
                hs.push(HalfSpace::new(Vector::from_i64s(&n), Q::from_i64(*b)).unwrap());
            }
        }
        for (n, off) in cuts {
            if n.iter().any(|&c| c != 0) {
                hs.push(HalfSpace::new(Vector::from_i64s(&n), Q::from_i64(off)).unwrap());
            }
        }
        hs
    })
}

fn satisfies(hs: &[HalfSpace<Q>], x: &Vector<Q>) -> bool {
    hs.iter().all(|h| h.contains(x).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_round_trip(hs in hrep(), w in weights(4), probe in proptest::collection::vec(-4i64..=4, 3)) {
        let poly = Polytope::from_halfspaces(hs.clone(), 3).unwrap();
        let vs = enumerate_vertices(&poly, 3).unwrap();
        prop_assert!(vs.len() >= 4);
        for v in &vs {
            prop_assert!(satisfies(&hs, v));
        }

        // Convex combinations of found vertices satisfy every inequality.
        let picks: Vec<Vector<Q>> = (0..4).map(|i| vs[(i * 7) % vs.len()].clone()).collect();
        let inner = Vector::combination(&w, &picks).unwrap();
        prop_assert!(satisfies(&hs, &inner));

        // Integer points satisfying the H-rep are in the hull of the V-rep.
        let x = Vector::from_i64s(&probe);
        let verdict = hull_member(&x, &vs).unwrap();
        prop_assert_eq!(verdict.is_inside(), satisfies(&hs, &x));
    }

    #[test]
    fn enumeration_ignores_input_order(hs in hrep(), rot in 0usize..16) {
        let base = enumerate_vertices(&Polytope::from_halfspaces(hs.clone(), 3).unwrap(), 3).unwrap();
        let mut shuffled = hs.clone();
        let n = shuffled.len();
        shuffled.rotate_left(rot % n);
        shuffled.reverse();
        let again = enumerate_vertices(&Polytope::from_halfspaces(shuffled, 3).unwrap(), 3).unwrap();
        prop_assert_eq!(base, again);
    }

    #[test]
    fn hull_verdicts_carry_valid_witnesses(
        pts in proptest::collection::vec(proptest::collection::vec(-5i64..=5, 2), 1..6),
        probe in proptest::collection::vec(-6i64..=6, 2),
    ) {
        let vs: Vec<Vector<Q>> = pts.iter().map(|p| Vector::from_i64s(p)).collect();
        let x = Vector::from_i64s(&probe);
        match hull_member(&x, &vs).unwrap() {
            HullMembership::Inside { weights } => {
                prop_assert!(weights.iter().all(|w| !w.is_negative()));
                prop_assert_eq!(weights.iter().fold(Q::zero(), |a, w| a + w), Q::one());
                prop_assert_eq!(Vector::combination(&weights, &vs).unwrap(), x);
            }
            HullMembership::Outside { functional, threshold, gap } => {
                prop_assert!(gap.is_positive());
                prop_assert_eq!(functional.dot(&x).unwrap(), threshold.clone() + &gap);
                for v in &vs {
                    prop_assert!(functional.dot(v).unwrap() <= threshold);
                }
            }
        }
    }

    #[test]
    fn exact_lp_is_reproducible(hs in hrep(), c in proptest::collection::vec(-5i64..=5, 3)) {
        let mut lp = LinearProgram::<Q>::new(3);
        for h in &hs {
            lp.push(LinearConstraint::from_halfspace(h));
        }
        lp.maximize(c.iter().map(|&x| Q::from_i64(x)).collect());
        let first = lp.solve().unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        let second = pool.install(|| lp.solve().unwrap());
        prop_assert_eq!(first, second);
    }
}

#[test]
fn parallel_enumeration_is_deterministic() {
    let hs: Vec<HalfSpace<Q>> = [[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]]
        .iter()
        .flat_map(|n| {
            let v = Vector::from_i64s(n);
            [HalfSpace::new(v.clone(), Q::one()).unwrap(), HalfSpace::new(v.scale(&-Q::one()), Q::one()).unwrap()]
        })
        .collect();
    let poly = Polytope::from_halfspaces(hs, 3).unwrap();
    let runs: Vec<_> = [1, 2, 4]
        .iter()
        .map(|&t| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
            pool.install(|| enumerate_vertices(&poly, 3).unwrap())
        })
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(runs[0].len(), 6);
}
