//! Single-system polygon models, their minimal tensor products, and the named
//! states used throughout.
//!
//! The square-bit keeps its customary labels: ω₁ = (1,1,1), ω₂ = (1,−1,1),
//! ω₃ = (−1,−1,1), ω₄ = (−1,1,1), i.e. clockwise from the top-right corner.
//! Larger polygons use ωᵢ = (cos πi/k, sin πi/k, 1), counter-clockwise.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channels::{Channel, Gamma};
use crate::error::{Error, Result};
use crate::geometry::{scalar_serde, HalfSpace, Mode, Polytope, Scalar, Vector};

/// Linear functional on states.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct Effect<S: Scalar> {
    pub label: String,
    pub functional: Vector<S>,
}

impl<S: Scalar> Effect<S> {
    pub fn new(label: impl Into<String>, functional: Vector<S>) -> Self {
        Effect { label: label.into(), functional }
    }

    pub fn eval(&self, state: &Vector<S>) -> Result<S> {
        self.functional.dot(state)
    }

    /// `e ⊗ f` on the Kronecker basis.
    pub fn kron(&self, other: &Effect<S>) -> Effect<S> {
        Effect::new(format!("{}⊗{}", self.label, other.label), self.functional.kron(&other.functional))
    }
}

/// The unit effect in dimension `dim`: `(0, …, 0, 1)`.
pub fn unit_functional<S: Scalar>(dim: usize) -> Vector<S> {
    Vector::unit(dim, dim - 1)
}

/// Effects summing to the unit effect.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct Measurement<S: Scalar> {
    pub label: String,
    pub effects: Vec<Effect<S>>,
}

impl<S: Scalar> Measurement<S> {
    pub fn new(label: impl Into<String>, effects: Vec<Effect<S>>) -> Result<Self> {
        let label = label.into();
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidMeasurement(format!("{label}: no effects")))?;
        let dim = first.functional.dim();
        let mut sum = Vector::zeros(dim);
        for e in &effects {
            sum = sum.add(&e.functional)?;
        }
        if !sum.approx_eq(&unit_functional(dim)) {
            return Err(Error::InvalidMeasurement(format!("{label}: effects sum to {sum}, not the unit effect")));
        }
        Ok(Measurement { label, effects })
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

/// Square-bit state `(p, 1−p | q, 1−q)`; `p` is read along x and `q` along y,
/// so the vector is `(2p−1, 2q−1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TwoCoordState<S: Scalar> {
    #[serde(with = "scalar_serde")]
    pub p: S,
    #[serde(with = "scalar_serde")]
    pub q: S,
}

impl<S: Scalar> TwoCoordState<S> {
    pub fn new(p: S, q: S) -> Result<Self> {
        for (name, v) in [("p", &p), ("q", &q)] {
            if v.is_negative() || v.cmp_tol(&S::one()).is_gt() {
                return Err(Error::InvalidState(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(TwoCoordState { p, q })
    }

    pub fn mixed() -> Self {
        TwoCoordState { p: S::half(), q: S::half() }
    }

    pub fn vector(&self) -> Vector<S> {
        let two = S::from_i64(2);
        Vector::new(vec![two.clone() * &self.p - S::one(), two * &self.q - S::one(), S::one()])
    }

    /// Inverse of [`vector`](Self::vector); the input must be a normalized square-bit state.
    pub fn from_vector(v: &Vector<S>) -> Result<Self> {
        if v.dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: v.dim() });
        }
        if !v[2].approx_eq(&S::one()) {
            return Err(Error::InvalidState(format!("{v} is not normalized")));
        }
        Self::new((v[0].clone() + S::one()) * &S::half(), (v[1].clone() + S::one()) * &S::half())
    }

    /// `(|2p−1|, |2q−1|)`.
    pub fn radii(&self) -> (S, S) {
        let v = self.vector();
        (v[0].abs(), v[1].abs())
    }
}

impl<S: Scalar> fmt::Display for TwoCoordState<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, q={})", self.p, self.q)
    }
}

/// JSON model descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelDescriptor {
    Evengon { k: usize },
    Composite { factors: Vec<ModelDescriptor> },
}

impl ModelDescriptor {
    pub fn square() -> Self {
        ModelDescriptor::Evengon { k: 2 }
    }

    pub fn build<S: Scalar>(&self) -> Result<Model<S>> {
        match self {
            ModelDescriptor::Evengon { k } => build_evengon(*k),
            ModelDescriptor::Composite { factors } => {
                let models = factors.iter().map(|f| f.build()).collect::<Result<Vec<_>>>()?;
                minimal_tensor(&models)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Model<S: Scalar> {
    descriptor: ModelDescriptor,
    vertices: Vec<Vector<S>>,
    polytope: Polytope<S>,
    effects: Vec<Effect<S>>,
    measurements: Vec<Measurement<S>>,
    unit: Effect<S>,
    facets: Vec<HalfSpace<S>>,
}

impl<S: Scalar> Model<S> {
    pub fn descriptor(&self) -> &ModelDescriptor {
        &self.descriptor
    }

    /// `Some(k)` for a single polygon system.
    pub fn k(&self) -> Option<usize> {
        match self.descriptor {
            ModelDescriptor::Evengon { k } => Some(k),
            ModelDescriptor::Composite { .. } => None,
        }
    }

    pub fn is_single(&self) -> bool {
        self.k().is_some()
    }

    pub fn is_square(&self) -> bool {
        self.k() == Some(2)
    }

    pub fn dimension(&self) -> usize {
        self.unit.functional.dim()
    }

    /// State vertices in label order (index `i` holds ω_{i+1}).
    pub fn vertices(&self) -> &[Vector<S>] {
        &self.vertices
    }

    /// ωᵢ with the 1-based label.
    pub fn omega(&self, label: usize) -> &Vector<S> {
        &self.vertices[label - 1]
    }

    /// Index of the state vertex equal to `v`.
    pub fn vertex_index(&self, v: &Vector<S>) -> Option<usize> {
        self.vertices.iter().position(|w| w.approx_eq(v))
    }

    pub fn polytope(&self) -> &Polytope<S> {
        &self.polytope
    }

    /// Edge inequalities `n · (x, y) ≤ 1` of a single polygon, in vertex order;
    /// empty for composites.
    pub fn facets(&self) -> &[HalfSpace<S>] {
        &self.facets
    }

    pub fn effects(&self) -> &[Effect<S>] {
        &self.effects
    }

    pub fn effect(&self, label: &str) -> Option<&Effect<S>> {
        self.effects.iter().find(|e| e.label == label)
    }

    pub fn measurements(&self) -> &[Measurement<S>] {
        &self.measurements
    }

    pub fn measurement(&self, label: &str) -> Option<&Measurement<S>> {
        self.measurements.iter().find(|m| m.label == label)
    }

    pub fn unit_effect(&self) -> &Effect<S> {
        &self.unit
    }

    /// The completely mixed state: `(0, 0, 1)`, or its tensor powers.
    pub fn mixed_state(&self) -> Vector<S> {
        unit_functional(self.dimension())
    }

    /// Whether a normalized vector lies in the state space.
    pub fn contains(&self, state: &Vector<S>) -> Result<bool> {
        self.polytope.contains(state)
    }
}

fn square_vertices<S: Scalar>() -> Vec<Vector<S>> {
    [[1, 1], [1, -1], [-1, -1], [-1, 1]]
        .iter()
        .map(|c| Vector::from_i64s(&[c[0], c[1], 1]))
        .collect()
}

fn half_vec<S: Scalar>(c: [i64; 3]) -> Vector<S> {
    Vector::from_i64s(&c).scale(&S::half())
}

fn square_effects<S: Scalar>() -> Vec<Effect<S>> {
    vec![
        Effect::new("e0", Vector::zeros(3)),
        Effect::new("e1", half_vec([0, 1, 1])),
        Effect::new("e2", half_vec([1, 0, 1])),
        Effect::new("e3", half_vec([0, -1, 1])),
        Effect::new("e4", half_vec([-1, 0, 1])),
        Effect::new("e5", Vector::from_i64s(&[0, 0, 1])),
    ]
}

/// Vertex list of the regular 2k-gon.
pub fn evengon_vertices<S: Scalar>(k: usize) -> Result<Vec<Vector<S>>> {
    if k < 2 {
        return Err(Error::InvalidEvengon(k));
    }
    if k == 2 {
        return Ok(square_vertices());
    }
    if S::MODE == Mode::Exact {
        return Err(Error::InexactCoordinates(k));
    }
    Ok((1..=2 * k)
        .map(|i| {
            let theta = std::f64::consts::PI * i as f64 / k as f64;
            let c = |x: f64| S::from_f64(x).expect("float mode");
            Vector::new(vec![c(theta.cos()), c(theta.sin()), S::one()])
        })
        .collect())
}

/// Edge of the polygon through consecutive vertices, as `n · (x, y, ·) ≤ 1`.
fn edge<S: Scalar>(a: &Vector<S>, b: &Vector<S>) -> HalfSpace<S> {
    // Normal perpendicular to b − a, oriented away from the centre.
    let mut nx = b[1].clone() - &a[1];
    let mut ny = a[0].clone() - &b[0];
    let mut off = nx.clone() * &a[0] + ny.clone() * &a[1];
    if off.is_negative() {
        nx = -nx;
        ny = -ny;
        off = -off;
    }
    HalfSpace { normal: Vector::new(vec![nx / &off, ny / &off, S::zero()]), offset: S::one() }
}

/// Effect vanishing on an edge and equal to 1 on the opposite edge.
pub fn facet_effect<S: Scalar>(label: impl Into<String>, h: &HalfSpace<S>) -> Effect<S> {
    let n = &h.normal;
    Effect::new(label, Vector::new(vec![-n[0].clone(), -n[1].clone(), S::one()]).scale(&S::half()))
}

/// The regular 2k-gon model; `k = 2` is the square-bit.
pub fn build_evengon<S: Scalar>(k: usize) -> Result<Model<S>> {
    let vertices = evengon_vertices::<S>(k)?;
    let n = vertices.len();
    let facets: Vec<HalfSpace<S>> = (0..n).map(|i| edge(&vertices[i], &vertices[(i + 1) % n])).collect();

    let mut hs = facets.clone();
    hs.push(HalfSpace::new(Vector::from_i64s(&[0, 0, 1]), S::one())?);
    hs.push(HalfSpace::new(Vector::from_i64s(&[0, 0, -1]), -S::one())?);
    let polytope = Polytope::from_both(vertices.clone(), hs)?;

    let unit = Effect::new("u", unit_functional(3));
    let (effects, measurements) = if k == 2 {
        let e = square_effects::<S>();
        let m13 = Measurement::new("M13", vec![e[1].clone(), e[3].clone()])?;
        let m24 = Measurement::new("M24", vec![e[2].clone(), e[4].clone()])?;
        (e, vec![m13, m24])
    } else {
        let mut e = vec![Effect::new("0", Vector::zeros(3))];
        e.extend(facets.iter().enumerate().map(|(i, h)| facet_effect(format!("f{}", i + 1), h)));
        e.push(unit.clone());
        // Opposite edges have opposite normals, so their effects complement.
        let ms = (1..=k)
            .map(|i| Measurement::new(format!("M{}_{}", i, i + k), vec![e[i].clone(), e[i + k].clone()]))
            .collect::<Result<Vec<_>>>()?;
        (e, ms)
    };

    let model = Model {
        descriptor: ModelDescriptor::Evengon { k },
        vertices,
        polytope,
        effects,
        measurements,
        unit,
        facets,
    };
    check_effect_ranges(&model)?;
    Ok(model)
}

/// The square-bit.
pub fn square<S: Scalar>() -> Model<S> {
    build_evengon(2).expect("the square is always constructible")
}

fn check_effect_ranges<S: Scalar>(m: &Model<S>) -> Result<()> {
    for e in m.effects.iter().chain(std::iter::once(&m.unit)) {
        for v in &m.vertices {
            let x = e.eval(v)?;
            if x.is_negative() || x.cmp_tol(&S::one()).is_gt() {
                return Err(Error::Consistency(format!("effect {} gives {x} on {v}", e.label)));
            }
        }
    }
    for v in &m.vertices {
        if !m.unit.eval(v)?.approx_eq(&S::one()) {
            return Err(Error::Consistency(format!("unit effect is not 1 on {v}")));
        }
    }
    Ok(())
}

/// Minimal tensor product: the hull of all products of factor vertices, with
/// product effects. A single factor is returned unchanged.
pub fn minimal_tensor<S: Scalar>(models: &[Model<S>]) -> Result<Model<S>> {
    let (first, rest) = models.split_first().ok_or(Error::EmptyFactors)?;
    if models.iter().any(|m| !m.is_single()) {
        return Err(Error::NotSingleSystem);
    }
    if rest.is_empty() {
        return Ok(first.clone());
    }
    let mut vertices = first.vertices.clone();
    let mut effects = first.effects.clone();
    let mut unit = first.unit.clone();
    let mut measurements = first.measurements.clone();
    for m in rest {
        vertices = vertices.iter().flat_map(|a| m.vertices.iter().map(move |b| a.kron(b))).collect();
        effects = effects.iter().flat_map(|a| m.effects.iter().map(move |b| a.kron(b))).collect();
        unit = unit.kron(&m.unit);
        measurements = measurements
            .iter()
            .flat_map(|a| {
                m.measurements.iter().map(move |b| {
                    let es = a.effects.iter().flat_map(|x| b.effects.iter().map(move |y| x.kron(y))).collect();
                    Measurement { label: format!("{}⊗{}", a.label, b.label), effects: es }
                })
            })
            .collect();
    }
    let polytope = Polytope::from_vertices(vertices.clone())?;
    Ok(Model {
        descriptor: ModelDescriptor::Composite { factors: models.iter().map(|m| m.descriptor.clone()).collect() },
        vertices,
        polytope,
        effects,
        measurements,
        unit,
        facets: Vec::new(),
    })
}

/// ½(ω₁⊗ω₂ − ω₂⊗ω₂ + ω₂⊗ω₃ + ω₃⊗ω₁) on two square-bits.
pub fn pr_entangled_state<S: Scalar>() -> Vector<S> {
    let w = square_vertices::<S>();
    let terms = [(0, 1, 1), (1, 1, -1), (1, 2, 1), (2, 0, 1)];
    let mut acc = Vector::zeros(9);
    for (a, b, sign) in terms {
        let t = w[a].kron(&w[b]).scale(&S::from_ratio(sign, 2));
        acc = acc.add(&t).expect("equal dimensions");
    }
    acc
}

/// Contracts the unit effect on one factor of a bipartite vector of dimension
/// `left · right`, keeping the other.
pub fn marginal<S: Scalar>(state: &Vector<S>, left: usize, right: usize, keep_left: bool) -> Result<Vector<S>> {
    if state.dim() != left * right {
        return Err(Error::DimensionMismatch { expected: left * right, found: state.dim() });
    }
    let coords = if keep_left {
        (0..left).map(|a| state[a * right + right - 1].clone()).collect()
    } else {
        (0..right).map(|b| state[(left - 1) * right + b].clone()).collect()
    };
    Ok(Vector::new(coords))
}

/// Brings a square-bit state into the quadrant `p, q ≥ ½` with a reflection.
/// Returns the folded state and the reversible channel applied.
pub fn fold_to_first_quadrant<S: Scalar>(state: &TwoCoordState<S>) -> (TwoCoordState<S>, Channel<S>) {
    let half = S::half();
    let flip_x = state.p.cmp_tol(&half).is_lt();
    let flip_y = state.q.cmp_tol(&half).is_lt();
    let r = if flip_x { Gamma::G1Minus } else { Gamma::G1Plus };
    let s = if flip_y { Gamma::G2Minus } else { Gamma::G2Plus };
    let p = if flip_x { S::one() - &state.p } else { state.p.clone() };
    let q = if flip_y { S::one() - &state.q } else { state.q.clone() };
    (TwoCoordState { p, q }, Channel::from_gammas(r, s))
}
