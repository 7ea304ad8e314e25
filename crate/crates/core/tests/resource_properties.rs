mod common;

use std::sync::OnceLock;

use common::{state, weights, Q};
use proptest::prelude::*;
use squarebit::channels::{bisto_vertices, reversibles, Channel};
use squarebit::geometry::Scalar;
use squarebit::models::{square, TwoCoordState};
use squarebit::resource::{
    convertible, majorization_vector, majorizes, reachable_vertices, s_tot, s_vn, s_vn_nondecreasing,
    ConvertibilityOracle, Operations, ProbVector,
};

const OPS: [Operations; 2] = [Operations::BiSto, Operations::RaRe];

fn oracle(ops: Operations) -> &'static ConvertibilityOracle<Q> {
    static BISTO: OnceLock<ConvertibilityOracle<Q>> = OnceLock::new();
    static RARE: OnceLock<ConvertibilityOracle<Q>> = OnceLock::new();
    let cell = if ops == Operations::BiSto { &BISTO } else { &RARE };
    cell.get_or_init(|| ConvertibilityOracle::new(ops).unwrap())
}

fn shannon(p: &[Q]) -> f64 {
    p.iter().map(|x| x.to_f64()).filter(|&x| x > 0.0).map(|x| -x * x.log2()).sum()
}

fn image(s: &TwoCoordState<Q>, t: &Channel<Q>) -> TwoCoordState<Q> {
    TwoCoordState::from_vector(&t.apply(&s.vector()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn criteria_match_the_oracle(a in state(), b in state()) {
        for ops in OPS {
            prop_assert_eq!(convertible(&a, &b, ops), oracle(ops).convertible(&a, &b).unwrap(), "{:?}", ops);
        }
    }

    #[test]
    fn convertibility_is_a_preorder(a in state(), b in state(), c in state()) {
        for ops in OPS {
            prop_assert!(convertible(&a, &a, ops));
            if convertible(&a, &b, ops) && convertible(&b, &c, ops) {
                prop_assert!(convertible(&a, &c, ops));
            }
        }
    }

    #[test]
    fn monotones_never_decrease(s in state(), wb in weights(16), wr in weights(8)) {
        let sq = square::<Q>();
        let to = image(&s, &Channel::mix(&wb, &bisto_vertices(&sq).unwrap()).unwrap());
        prop_assert!(s_vn_nondecreasing(&s, &to));
        prop_assert!(s_vn(&to) >= s_vn(&s) - 1e-12);

        let to = image(&s, &Channel::mix(&wr, &reversibles(&sq).unwrap()).unwrap());
        prop_assert!(s_vn_nondecreasing(&s, &to));
        prop_assert!(s_tot(&to) >= s_tot(&s) - 1e-12);
        prop_assert!(convertible(&s, &to, Operations::RaRe));
        prop_assert!(majorizes(&majorization_vector(&s), &majorization_vector(&to)).unwrap());
    }

    #[test]
    fn majorization_follows_rare_convertibility(a in state(), b in state()) {
        if convertible(&a, &b, Operations::RaRe) {
            prop_assert!(majorizes(&majorization_vector(&a), &majorization_vector(&b)).unwrap());
        }
    }

    #[test]
    fn shannon_entropy_is_schur_concave(x in weights(4), y in weights(4)) {
        let (px, py) = (ProbVector::new(x.clone()).unwrap(), ProbVector::new(y.clone()).unwrap());
        if majorizes(&px, &py).unwrap() {
            prop_assert!(shannon(&x) <= shannon(&y) + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reachable_sets_are_tight(s in state()) {
        for ops in OPS {
            let vs = reachable_vertices(&s, ops);
            prop_assert!(!vs.is_empty());
            for v in &vs {
                let target = TwoCoordState::from_vector(v).unwrap();
                prop_assert!(oracle(ops).convertible(&s, &target).unwrap());
                // Pushing a vertex radially outward leaves the reachable set.
                let pushed = v.slice().scale(&Q::from_ratio(21, 20)).lift();
                if !v.slice().is_zero() && pushed.coords()[..2].iter().all(|c| c.abs() <= Q::one()) {
                    let out = TwoCoordState::from_vector(&pushed).unwrap();
                    prop_assert!(!oracle(ops).convertible(&s, &out).unwrap());
                    prop_assert!(!convertible(&s, &out, ops));
                }
            }
        }
    }
}
