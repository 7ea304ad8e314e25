//! Square-bit state convertibility under bistochastic and random-reversible
//! channels, majorization, and the two entropic monotones.
//!
//! Every state is first folded into the quadrant `p, q ≥ ½`. With
//! `η = max(p, q)` and `δ = min(p, q)` of the folded state:
//!
//! * BiSto: ω → ω′ iff `η′ ≤ η`;
//! * RaRe: ω → ω′ iff `η′ ≤ η` and `η′ + δ′ ≤ η + δ`.

use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::channels::{bisto_vertices, reversibles, Channel};
use crate::error::{Error, Result};
use crate::geometry::{hull_member, polytope::canonical_dedup, scalar_serde, Rational, Scalar, Vector};
use crate::models::{fold_to_first_quadrant, square, TwoCoordState};

/// Channel families for convertibility questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operations {
    BiSto,
    RaRe,
}

impl FromStr for Operations {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bisto" => Ok(Operations::BiSto),
            "rare" => Ok(Operations::RaRe),
            other => Err(Error::Parse(format!("unknown operation set '{other}' (expected bisto or rare)"))),
        }
    }
}

impl Operations {
    pub fn name(self) -> &'static str {
        match self {
            Operations::BiSto => "bisto",
            Operations::RaRe => "rare",
        }
    }
}

/// `(η, δ)` of the folded state.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct FoldedPair<S: Scalar> {
    #[serde(with = "scalar_serde")]
    pub eta: S,
    #[serde(with = "scalar_serde")]
    pub delta: S,
}

impl<S: Scalar> FoldedPair<S> {
    pub fn of(state: &TwoCoordState<S>) -> Self {
        let (f, _) = fold_to_first_quadrant(state);
        if f.p.cmp_tol(&f.q).is_ge() {
            FoldedPair { eta: f.p, delta: f.q }
        } else {
            FoldedPair { eta: f.q, delta: f.p }
        }
    }
}

/// Nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct ProbVector<S: Scalar>(#[serde(with = "scalar_serde::vec")] Vec<S>);

impl<S: Scalar> ProbVector<S> {
    pub fn new(entries: Vec<S>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidProbabilityVector("empty".into()));
        }
        if let Some(x) = entries.iter().find(|x| x.is_negative()) {
            return Err(Error::InvalidProbabilityVector(format!("negative entry {x}")));
        }
        let total = entries.iter().fold(S::zero(), |acc, x| acc + x);
        if !total.approx_eq(&S::one()) {
            return Err(Error::InvalidProbabilityVector(format!("entries sum to {total}")));
        }
        Ok(ProbVector(entries))
    }

    pub fn entries(&self) -> &[S] {
        &self.0
    }

    fn sorted_desc(&self) -> Vec<S> {
        let mut v = self.0.clone();
        v.sort_by(|a, b| b.canonical_cmp(a));
        v
    }
}

/// `x ≻ y`: every prefix sum of sorted-descending `x` is at least that of `y`.
pub fn majorizes<S: Scalar>(x: &ProbVector<S>, y: &ProbVector<S>) -> Result<bool> {
    if x.0.len() != y.0.len() {
        return Err(Error::LengthMismatch { left: x.0.len(), right: y.0.len() });
    }
    let (xs, ys) = (x.sorted_desc(), y.sorted_desc());
    let (mut sx, mut sy) = (S::zero(), S::zero());
    for (a, b) in xs.iter().zip(&ys) {
        sx += a;
        sy += b;
        if sx.cmp_tol(&sy).is_lt() {
            return Ok(false);
        }
    }
    Ok(sx.approx_eq(&sy))
}

/// `½(η, δ, 1−δ, 1−η)`.
pub fn majorization_vector<S: Scalar>(state: &TwoCoordState<S>) -> ProbVector<S> {
    let FoldedPair { eta, delta } = FoldedPair::of(state);
    let h = S::half();
    let entries = vec![
        eta.clone() * &h,
        delta.clone() * &h,
        (S::one() - &delta) * &h,
        (S::one() - &eta) * &h,
    ];
    ProbVector(entries)
}

pub fn convertible_bisto<S: Scalar>(from: &TwoCoordState<S>, to: &TwoCoordState<S>) -> bool {
    let (a, b) = (FoldedPair::of(from), FoldedPair::of(to));
    b.eta.le_tol(&a.eta)
}

pub fn convertible_rare<S: Scalar>(from: &TwoCoordState<S>, to: &TwoCoordState<S>) -> bool {
    let (a, b) = (FoldedPair::of(from), FoldedPair::of(to));
    b.eta.le_tol(&a.eta) && (b.eta + &b.delta).le_tol(&(a.eta + &a.delta))
}

pub fn convertible<S: Scalar>(from: &TwoCoordState<S>, to: &TwoCoordState<S>, ops: Operations) -> bool {
    match ops {
        Operations::BiSto => convertible_bisto(from, to),
        Operations::RaRe => convertible_rare(from, to),
    }
}

/// Extreme points of the states reachable from `state`, as `(2p−1, 2q−1, 1)`
/// vectors, duplicates removed.
///
/// BiSto gives the square with corners `(±(2η−1), ±(2η−1))`. RaRe gives the
/// eight images of the folded state under the symmetries of the square, in the
/// order (p,q), (q,p), (q,1−p), (p,1−q), (1−p,1−q), (1−q,1−p), (1−q,p), (1−p,q).
pub fn reachable_vertices<S: Scalar>(state: &TwoCoordState<S>, ops: Operations) -> Vec<Vector<S>> {
    let (f, _) = fold_to_first_quadrant(state);
    let one = S::one;
    let pq: Vec<(S, S)> = match ops {
        Operations::BiSto => {
            let eta = FoldedPair::of(state).eta;
            let lo = one() - &eta;
            vec![(eta.clone(), eta.clone()), (lo.clone(), eta.clone()), (eta, lo.clone()), (lo.clone(), lo)]
        }
        Operations::RaRe => {
            let (p, q) = (f.p.clone(), f.q.clone());
            let (np, nq) = (one() - &p, one() - &q);
            vec![
                (p.clone(), q.clone()),
                (q.clone(), p.clone()),
                (q.clone(), np.clone()),
                (p.clone(), nq.clone()),
                (np.clone(), nq.clone()),
                (nq.clone(), np.clone()),
                (nq, p),
                (np, q),
            ]
        }
    };
    let mut out: Vec<Vector<S>> = Vec::with_capacity(pq.len());
    for (p, q) in pq {
        let v = TwoCoordState { p, q }.vector();
        if !out.iter().any(|w| w.approx_eq(&v)) {
            out.push(v);
        }
    }
    out
}

/// Brute-force convertibility: is `to` a convex combination of the images of
/// `from` under the extreme channels of the set? Channel vertices are computed
/// once and reused.
#[derive(Debug, Clone)]
pub struct ConvertibilityOracle<S: Scalar> {
    ops: Operations,
    channels: Vec<Channel<S>>,
}

impl<S: Scalar> ConvertibilityOracle<S> {
    pub fn new(ops: Operations) -> Result<Self> {
        let sq = square::<S>();
        let channels = match ops {
            Operations::BiSto => bisto_vertices(&sq)?,
            Operations::RaRe => reversibles(&sq)?,
        };
        Ok(ConvertibilityOracle { ops, channels })
    }

    pub fn operations(&self) -> Operations {
        self.ops
    }

    pub fn channels(&self) -> &[Channel<S>] {
        &self.channels
    }

    pub fn convertible(&self, from: &TwoCoordState<S>, to: &TwoCoordState<S>) -> Result<bool> {
        let w = from.vector();
        let images = self.channels.iter().map(|t| t.apply(&w)).collect::<Result<Vec<_>>>()?;
        Ok(hull_member(&to.vector(), &canonical_dedup(images))?.is_inside())
    }
}

pub fn convertible_oracle<S: Scalar>(from: &TwoCoordState<S>, to: &TwoCoordState<S>, ops: Operations) -> Result<bool> {
    ConvertibilityOracle::new(ops)?.convertible(from, to)
}

/// Binary entropy in bits, with `0·log 0 = 0`.
pub fn binary_entropy<S: Scalar>(x: &S) -> Result<f64> {
    if x.is_negative() || x.cmp_tol(&S::one()).is_gt() {
        return Err(Error::Domain(format!("binary entropy needs x in [0, 1], got {x}")));
    }
    let v = x.to_f64().clamp(0.0, 1.0);
    // Evaluate on the smaller of x and 1−x so H(x) and H(1−x) agree bit for bit.
    let (a, b) = if v <= 0.5 { (v, 1.0 - v) } else { (1.0 - v, v) };
    let term = |t: f64| if t <= 0.0 { 0.0 } else { -t * t.log2() };
    Ok(term(a) + term(b))
}

/// `H(η)`.
pub fn s_vn<S: Scalar>(state: &TwoCoordState<S>) -> f64 {
    binary_entropy(&FoldedPair::of(state).eta).expect("η lies in [½, 1]")
}

/// `H(p) + H(q)`.
pub fn s_tot<S: Scalar>(state: &TwoCoordState<S>) -> f64 {
    let h = |x: &S| binary_entropy(x).expect("state coordinates lie in [0, 1]");
    h(&state.p) + h(&state.q)
}

/// `s_vn(to) ≥ s_vn(from)`, decided without logarithms: H is decreasing on
/// [½, 1], so this is `η(to) ≤ η(from)`.
pub fn s_vn_nondecreasing<S: Scalar>(from: &TwoCoordState<S>, to: &TwoCoordState<S>) -> bool {
    FoldedPair::of(to).eta.le_tol(&FoldedPair::of(from).eta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct EntropyReport<S: Scalar> {
    #[serde(with = "scalar_serde")]
    pub p: S,
    #[serde(with = "scalar_serde")]
    pub q: S,
    pub s_vn: f64,
    pub s_tot: f64,
}

pub fn entropy_report<S: Scalar>(state: &TwoCoordState<S>) -> EntropyReport<S> {
    EntropyReport { p: state.p.clone(), q: state.q.clone(), s_vn: s_vn(state), s_tot: s_tot(state) }
}

/// Folded grid `p, q ∈ {½, ½ + 1/(2n), …, 1}`, row-major in p.
pub fn folded_grid<S: Scalar>(n: i64) -> Vec<TwoCoordState<S>> {
    let vals: Vec<S> = (0..=n).map(|i| S::from_ratio(n + i, 2 * n)).collect();
    vals.iter()
        .flat_map(|p| vals.iter().map(move |q| TwoCoordState { p: p.clone(), q: q.clone() }))
        .collect()
}

/// Random state with coordinates `a/d`, `d ≤ max_den`, anywhere in the square.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, max_den: i64) -> TwoCoordState<Rational> {
    let mut coord = || {
        let d = rng.gen_range(1..=max_den);
        Rational::from_ratio(rng.gen_range(0..=d), d)
    };
    TwoCoordState { p: coord(), q: coord() }
}

/// Random convex weights `wᵢ = aᵢ / Σa`, `aᵢ ∈ 0..=100`, not all zero.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Rational> {
    loop {
        let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=100)).collect();
        let total: i64 = raw.iter().sum();
        if total > 0 {
            return raw.into_iter().map(|a| Rational::from_ratio(a, total)).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Rational;

    fn st(p: (i64, i64), q: (i64, i64)) -> TwoCoordState<Q> {
        TwoCoordState::new(Q::from_ratio(p.0, p.1), Q::from_ratio(q.0, q.1)).unwrap()
    }

    fn pv(x: &[(i64, i64)]) -> ProbVector<Q> {
        ProbVector::new(x.iter().map(|&(a, b)| Q::from_ratio(a, b)).collect()).unwrap()
    }

    #[test]
    fn majorization_examples() {
        assert!(majorizes(&pv(&[(1, 1), (0, 1)]), &pv(&[(1, 2), (1, 2)])).unwrap());
        assert!(majorizes(&pv(&[(1, 2), (1, 2)]), &pv(&[(1, 2), (1, 2)])).unwrap());
        let a = pv(&[(1, 2), (1, 4), (1, 4)]);
        let b = pv(&[(2, 5), (2, 5), (1, 5)]);
        assert!(!majorizes(&a, &b).unwrap());
        assert!(!majorizes(&b, &a).unwrap());
        assert!(majorizes(&a, &pv(&[(1, 2), (1, 2)])).is_err());
        assert!(ProbVector::new(vec![Q::half()]).is_err());
    }

    #[test]
    fn convertibility_examples() {
        let corner = st((1, 1), (1, 1));
        assert!(convertible_bisto(&corner, &TwoCoordState::mixed()));
        let (a, b) = (st((9, 10), (3, 5)), st((4, 5), (4, 5)));
        assert!(convertible_bisto(&a, &b));
        assert!(!convertible_rare(&a, &b));
        assert!(convertible_oracle(&a, &b, Operations::BiSto).unwrap());
        assert!(!convertible_oracle(&a, &b, Operations::RaRe).unwrap());
        assert!(!convertible_bisto(&st((7, 10), (3, 5)), &st((4, 5), (1, 2))));
        assert!(convertible_rare(&st((9, 10), (7, 10)), &st((4, 5), (7, 10))));
        assert!(convertible_rare(&a, &a));
        assert!(convertible_oracle(&a, &a, Operations::RaRe).unwrap());
    }

    #[test]
    fn reachable_examples() {
        let v = reachable_vertices(&st((1, 2), (4, 5)), Operations::BiSto);
        let r = Q::from_ratio(3, 5);
        assert_eq!(v.len(), 4);
        assert!(v.contains(&Vector::new(vec![r.clone(), r.clone(), Q::one()])));
        assert!(v.contains(&Vector::new(vec![-r.clone(), -r, Q::one()])));
        assert_eq!(reachable_vertices(&st((3, 4), (3, 4)), Operations::RaRe).len(), 4);
        assert_eq!(reachable_vertices(&st((3, 4), (9, 10)), Operations::RaRe).len(), 8);
        assert_eq!(reachable_vertices(&TwoCoordState::<Q>::mixed(), Operations::RaRe).len(), 1);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(&Q::half()).unwrap(), 1.0);
        assert_eq!(binary_entropy(&Q::zero()).unwrap(), 0.0);
        assert_eq!(binary_entropy(&Q::one()).unwrap(), 0.0);
        let h = binary_entropy(&Q::from_ratio(1, 4)).unwrap();
        assert!((h - (2.0 - 0.75 * 3f64.log2())).abs() < 1e-15);
        assert!(binary_entropy(&Q::from_i64(2)).is_err());
        let s = st((3, 4), (1, 2));
        assert_eq!(s_vn(&s), h);
        assert_eq!(s_tot(&s), h + 1.0);
        assert_eq!(s_vn(&st((1, 1), (1, 1))), 0.0);
        assert_eq!(s_tot(&TwoCoordState::<Q>::mixed()), 2.0);
    }

    #[test]
    fn grid_shape() {
        let g = folded_grid::<Q>(20);
        assert_eq!(g.len(), 441);
        assert_eq!(g[1].q, Q::from_ratio(21, 40));
    }
}
