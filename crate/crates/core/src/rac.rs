//! The 2↦1 random access code played on a square-bit supplied by a referee,
//! with the sender restricted to a set of channels.
//!
//! The sender encodes a two-bit message `x₀x₁` by applying a channel to the
//! referee's state; the receiver, asked for bit `y`, measures `M₁₃ = {e₁, e₃}`
//! (for `y = 0`) or `M₂₄ = {e₂, e₄}` (for `y = 1`) and reads outcome `i` as the
//! bit value `i`. The score of a (message, question) pair is the probability of
//! a correct guess; the bias is `2·score − 1`.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{is_admissible, Channel, ChannelSet, Gamma};
use crate::error::{Error, Result};
use crate::geometry::{hull_member, scalar_serde, LinearConstraint, LinearProgram, LpOutcome, Scalar, Vector};
use crate::models::{fold_to_first_quadrant, square, Measurement, Model, TwoCoordState};

/// Worst-case bias of a one-bit classical message: random guessing on one bit.
pub const CLASSICAL_BIAS: f64 = 0.0;
/// Worst-case success probability of a one-bit classical message.
pub const CLASSICAL_PROBABILITY: f64 = 0.5;
/// Optimal worst-case success probability with a qubit, ½(1 + 1/√2). Reference
/// value only.
pub const QUBIT_PROBABILITY: f64 = 0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2);

/// Messages in order 00, 01, 10, 11.
pub const MESSAGES: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

#[derive(Debug, Clone)]
pub struct RacInstance<S: Scalar> {
    pub state: TwoCoordState<S>,
    pub set: ChannelSet<S>,
    /// Decoding measurement for question `y`; outcome `i` means bit value `i`.
    pub decoding: [Measurement<S>; 2],
}

impl<S: Scalar> RacInstance<S> {
    /// Instance with the default `M₁₃` / `M₂₄` decoding.
    pub fn new(state: TwoCoordState<S>, set: ChannelSet<S>) -> Self {
        let sq = square::<S>();
        let decoding = [
            sq.measurement("M13").expect("square has M13").clone(),
            sq.measurement("M24").expect("square has M24").clone(),
        ];
        RacInstance { state, set, decoding }
    }

    pub fn with_decoding(mut self, decoding: [Measurement<S>; 2]) -> Result<Self> {
        for m in &decoding {
            if m.len() != 2 {
                return Err(Error::InvalidMeasurement(format!("{} must have two outcomes", m.label)));
            }
            if m.effects.iter().any(|e| e.functional.dim() != 3) {
                return Err(Error::InvalidMeasurement(format!("{} is not a square-bit measurement", m.label)));
            }
        }
        self.decoding = decoding;
        Ok(self)
    }

    fn score(&self, message: usize, question: usize, encoded: &Vector<S>) -> Result<S> {
        let (x0, x1) = MESSAGES[message];
        let bit = if question == 0 { x0 } else { x1 };
        self.decoding[question].effects[bit].eval(encoded)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct RacOutcome<S: Scalar> {
    #[serde(with = "scalar_serde")]
    pub bias: S,
    #[serde(with = "scalar_serde")]
    pub probability: S,
    pub encodings: Vec<Channel<S>>,
    pub encoded_states: Vec<Vector<S>>,
    /// Index `2·message + question`.
    #[serde(with = "scalar_serde::vec")]
    pub per_message_scores: Vec<S>,
}

fn outcome<S: Scalar>(inst: &RacInstance<S>, encodings: Vec<Channel<S>>) -> Result<RacOutcome<S>> {
    let omega = inst.state.vector();
    let encoded_states: Vec<Vector<S>> = encodings.iter().map(|t| t.apply(&omega)).collect::<Result<_>>()?;
    let mut scores = Vec::with_capacity(8);
    for (x, w) in encoded_states.iter().enumerate() {
        for y in 0..2 {
            scores.push(inst.score(x, y, w)?);
        }
    }
    let worst = scores.iter().cloned().reduce(S::min_of).expect("eight scores");
    let bias = S::from_i64(2) * &worst - S::one();
    Ok(RacOutcome { bias, probability: worst, encodings, encoded_states, per_message_scores: scores })
}

/// Scores a given strategy after checking each encoding lies in the instance's
/// channel set.
pub fn evaluate_strategy<S: Scalar>(inst: &RacInstance<S>, encodings: &[Channel<S>]) -> Result<RacOutcome<S>> {
    if encodings.len() != 4 {
        return Err(Error::LengthMismatch { left: 4, right: encodings.len() });
    }
    let sq = square::<S>();
    let vertices = inst.set.vertices(&sq)?;
    let points: Vec<Vector<S>> = vertices.iter().map(|c| c.to_point()).collect();
    for (i, t) in encodings.iter().enumerate() {
        let inside = match inst.set {
            ChannelSet::Full => is_admissible(t, &sq)?,
            _ => hull_member(&t.to_point(), &points)?.is_inside(),
        };
        if !inside {
            return Err(Error::EncodingOutsideSet { index: i });
        }
    }
    outcome(inst, encodings.to_vec())
}

fn half_mix<S: Scalar>(a: (Gamma, Gamma), b: (Gamma, Gamma)) -> Channel<S> {
    Channel::mix(&[S::half(), S::half()], &[Channel::from_gammas(a.0, a.1), Channel::from_gammas(b.0, b.1)])
        .expect("two channels, weights sum to one")
}

/// Even mixtures of two reversibles per message, preceded by folding; the
/// folded state `(x, y)` is sent to `(±α, ±α)` with `α = (x + y)/2`.
pub fn canonical_rare_encodings<S: Scalar>(state: &TwoCoordState<S>) -> Vec<Channel<S>> {
    use Gamma::*;
    let (_, fold) = fold_to_first_quadrant(state);
    let base = [
        half_mix((G1Plus, G2Plus), (G2Plus, G1Plus)),
        half_mix((G2Minus, G1Plus), (G1Minus, G2Plus)),
        half_mix((G2Plus, G1Minus), (G1Plus, G2Minus)),
        half_mix((G1Minus, G2Minus), (G2Minus, G1Minus)),
    ];
    base.iter().map(|t| t.compose(&fold).expect("3×3")).collect()
}

/// Collapse onto the diagonal along the larger coordinate, then rotate into
/// each quadrant; the folded state is sent to `(±β, ±β)`, `β = max(x, y)`.
pub fn canonical_bisto_encodings<S: Scalar>(state: &TwoCoordState<S>) -> Vec<Channel<S>> {
    use Gamma::*;
    let (folded, fold) = fold_to_first_quadrant(state);
    let v = folded.vector();
    let collapse = if v[1].cmp_tol(&v[0]).is_ge() {
        Channel::from_gammas(G2Plus, G2Plus)
    } else {
        Channel::from_gammas(G1Plus, G1Plus)
    };
    let pre = collapse.compose(&fold).expect("3×3");
    [(G1Plus, G2Plus), (G2Minus, G1Plus), (G2Plus, G1Minus), (G1Minus, G2Minus)]
        .iter()
        .map(|&(a, b)| Channel::from_gammas(a, b).compose(&pre).expect("3×3"))
        .collect()
}

/// Score terms touched by each message; they are pairwise disjoint, which is
/// what lets every message be optimized on its own.
fn message_terms(message: usize) -> [usize; 2] {
    [2 * message, 2 * message + 1]
}

/// Optimal worst-case bias over the instance's channel set. Each message is an
/// LP: maximize `t` subject to both recentred scores being at least `t`, over
/// convex mixtures of the set's extreme channels.
pub fn optimal_bias<S: Scalar>(inst: &RacInstance<S>) -> Result<RacOutcome<S>> {
    let terms: Vec<usize> = (0..4).flat_map(message_terms).collect();
    assert!(terms.iter().enumerate().all(|(i, &t)| t == i), "message terms must partition the scores");

    let sq: Model<S> = square();
    let vertices = inst.set.vertices(&sq)?;
    let omega = inst.state.vector();
    let images: Vec<Vector<S>> = vertices.iter().map(|t| t.apply(&omega)).collect::<Result<_>>()?;
    let n = vertices.len();
    let two = S::from_i64(2);

    let mut encodings = Vec::with_capacity(4);
    let mut best = Vec::with_capacity(4);
    for x in 0..4 {
        // Variables: λ₁..λₙ ≥ 0, then t free.
        let mut lp = LinearProgram::nonnegative(n + 1);
        lp.nonneg[n] = false;
        let mut norm = vec![S::one(); n + 1];
        norm[n] = S::zero();
        lp.push(LinearConstraint::eq(norm, S::one()));
        for y in 0..2 {
            let mut coeffs = images
                .iter()
                .map(|w| Ok(two.clone() * &inst.score(x, y, w)? - S::one()))
                .collect::<Result<Vec<S>>>()?;
            coeffs.push(-S::one());
            lp.push(LinearConstraint::ge(coeffs, S::zero()));
        }
        let mut obj = vec![S::zero(); n + 1];
        obj[n] = S::one();
        lp.maximize(obj);
        match lp.solve()? {
            LpOutcome::Optimal { point, value } => {
                encodings.push(Channel::mix(&point[..n], &vertices)?);
                best.push(value);
            }
            other => return Err(Error::Consistency(format!("message LP ended as {other:?}"))),
        }
    }
    let out = outcome(inst, encodings)?;
    let min_t = best.into_iter().reduce(S::min_of).expect("four messages");
    if !out.bias.approx_eq(&min_t) {
        return Err(Error::Consistency(format!("optimal mixtures score {} but LPs report {min_t}", out.bias)));
    }
    Ok(out)
}

/// ½(|2p−1| + |2q−1|).
pub fn rare_bias_formula<S: Scalar>(state: &TwoCoordState<S>) -> S {
    let (a, b) = state.radii();
    (a + &b) * &S::half()
}

/// max(|2p−1|, |2q−1|).
pub fn bisto_bias_formula<S: Scalar>(state: &TwoCoordState<S>) -> S {
    let (a, b) = state.radii();
    S::max_of(a, b)
}

/// The probability reading of a bias, `(1 + bias)/2`.
pub fn probability_of_bias<S: Scalar>(bias: &S) -> S {
    (S::one() + bias) * &S::half()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct SweepRow<S: Scalar> {
    #[serde(with = "scalar_serde")]
    pub p: S,
    #[serde(with = "scalar_serde")]
    pub q: S,
    #[serde(with = "scalar_serde")]
    pub bias_rare: S,
    #[serde(with = "scalar_serde")]
    pub bias_bisto: S,
}

/// Optimal RaRe and BiSto biases at each state, in input order.
pub fn sweep<S: Scalar>(states: &[TwoCoordState<S>]) -> Result<Vec<SweepRow<S>>> {
    states
        .par_iter()
        .map(|s| {
            let rare = optimal_bias(&RacInstance::new(s.clone(), ChannelSet::RaRe))?;
            let bisto = optimal_bias(&RacInstance::new(s.clone(), ChannelSet::BiSto))?;
            Ok(SweepRow { p: s.p.clone(), q: s.q.clone(), bias_rare: rare.bias, bias_bisto: bisto.bias })
        })
        .collect()
}

/// The identity channel alone, as an explicit set.
pub fn identity_only<S: Scalar>() -> ChannelSet<S> {
    ChannelSet::Explicit(vec![Channel::identity(3)])
}
