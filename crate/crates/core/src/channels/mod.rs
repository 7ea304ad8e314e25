//! Normalization-preserving linear maps between states.
//!
//! A single-system channel is written `[r, s]`: its first two rows, with the
//! last row fixed to `(0, 0, 1)`. The six extreme row vectors are the γ's:
//! γ₁^± = (±1, 0, 0), γ₂^± = (0, ±1, 0), γ₃^± = (0, 0, ±1).

mod certificate;
mod polytope;

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use certificate::{
    collision_certificate, evengon_collapse_map, measure_prepare_channel, CollisionCertificate,
};
pub use polytope::{
    birkhoff_gap, bisto_vertices, channel_hrep, classify, enumerate_extreme_channels,
    enumerate_extreme_channels_capped, in_bisto, in_rare, is_admissible, is_extreme, is_measure_prepare,
    reversibles, ChannelClass, ChannelSet, GapEntry, DEFAULT_ENUMERATION_CAP,
};

use crate::error::{Error, Result};
use crate::geometry::{Matrix, Scalar, Vector};
use crate::models::square;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gamma {
    G1Plus,
    G1Minus,
    G2Plus,
    G2Minus,
    G3Plus,
    G3Minus,
}

impl Gamma {
    /// Table order: γ₁⁺, γ₁⁻, γ₂⁺, γ₂⁻, γ₃⁺, γ₃⁻.
    pub const ALL: [Gamma; 6] =
        [Gamma::G1Plus, Gamma::G1Minus, Gamma::G2Plus, Gamma::G2Minus, Gamma::G3Plus, Gamma::G3Minus];

    pub fn axis(self) -> usize {
        match self {
            Gamma::G1Plus | Gamma::G1Minus => 1,
            Gamma::G2Plus | Gamma::G2Minus => 2,
            Gamma::G3Plus | Gamma::G3Minus => 3,
        }
    }

    pub fn is_plus(self) -> bool {
        matches!(self, Gamma::G1Plus | Gamma::G2Plus | Gamma::G3Plus)
    }

    pub fn vector<S: Scalar>(self) -> Vector<S> {
        let mut c = vec![S::zero(); 3];
        c[self.axis() - 1] = S::from_i64(if self.is_plus() { 1 } else { -1 });
        Vector::new(c)
    }

    pub fn from_vector<S: Scalar>(v: &Vector<S>) -> Option<Gamma> {
        Gamma::ALL.into_iter().find(|g| g.vector::<S>().approx_eq(v))
    }

    /// `γ1+` style name.
    pub fn name(self) -> String {
        format!("γ{}{}", self.axis(), if self.is_plus() { '+' } else { '-' })
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Gamma {
    type Err = Error;

    /// Accepts `g1+`, `γ1+`, `gamma1-`, with `-` or `−` for minus.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let rest = t
            .strip_prefix("gamma")
            .or_else(|| t.strip_prefix('γ'))
            .or_else(|| t.strip_prefix('g'))
            .ok_or_else(|| Error::Parse(format!("'{s}' is not a γ name")))?;
        let mut chars = rest.chars();
        let axis = chars.next().and_then(|c| c.to_digit(10));
        let sign = chars.next();
        if chars.next().is_some() {
            return Err(Error::Parse(format!("'{s}' is not a γ name")));
        }
        let plus = match sign {
            Some('+') => true,
            Some('-') | Some('−') => false,
            _ => return Err(Error::Parse(format!("'{s}' lacks a sign"))),
        };
        match (axis, plus) {
            (Some(1), true) => Ok(Gamma::G1Plus),
            (Some(1), false) => Ok(Gamma::G1Minus),
            (Some(2), true) => Ok(Gamma::G2Plus),
            (Some(2), false) => Ok(Gamma::G2Minus),
            (Some(3), true) => Ok(Gamma::G3Plus),
            (Some(3), false) => Ok(Gamma::G3Minus),
            _ => Err(Error::Parse(format!("'{s}' has no axis 1, 2 or 3"))),
        }
    }
}

/// Square matrix with last row `(0, …, 0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel<S: Scalar> {
    matrix: Matrix<S>,
}

impl<S: Scalar> Channel<S> {
    pub fn from_matrix(matrix: Matrix<S>) -> Result<Self> {
        let d = matrix.rows();
        if d == 0 || matrix.cols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: matrix.cols() });
        }
        for j in 0..d {
            let want = if j == d - 1 { S::one() } else { S::zero() };
            if !matrix.get(d - 1, j).approx_eq(&want) {
                return Err(Error::NotNormalizationPreserving);
            }
        }
        Ok(Channel { matrix })
    }

    /// `[r, s]` on a single system.
    pub fn from_rs(r: Vector<S>, s: Vector<S>) -> Result<Self> {
        for v in [&r, &s] {
            if v.dim() != 3 {
                return Err(Error::DimensionMismatch { expected: 3, found: v.dim() });
            }
        }
        let rows = vec![r.into_coords(), s.into_coords(), vec![S::zero(), S::zero(), S::one()]];
        Ok(Channel { matrix: Matrix::from_rows(rows)? })
    }

    pub fn from_gammas(r: Gamma, s: Gamma) -> Self {
        Self::from_rs(r.vector(), s.vector()).expect("γ vectors are 3-dimensional")
    }

    pub fn identity(dim: usize) -> Self {
        Channel { matrix: Matrix::identity(dim) }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_single(&self) -> bool {
        self.dim() == 3
    }

    pub fn r(&self) -> Option<Vector<S>> {
        self.is_single().then(|| Vector::new(self.matrix.row(0).to_vec()))
    }

    pub fn s(&self) -> Option<Vector<S>> {
        self.is_single().then(|| Vector::new(self.matrix.row(1).to_vec()))
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.approx_eq(&Matrix::identity(self.dim()))
    }

    pub fn apply(&self, state: &Vector<S>) -> Result<Vector<S>> {
        self.matrix.mul_vec(state)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Channel<S>) -> Result<Channel<S>> {
        Ok(Channel { matrix: self.matrix.mul(&inner.matrix)? })
    }

    pub fn kron(&self, other: &Channel<S>) -> Channel<S> {
        Channel { matrix: self.matrix.kron(&other.matrix) }
    }

    /// The free entries (all rows but the last) flattened row-major; `(r, s)` in R⁶
    /// for a single system.
    pub fn to_point(&self) -> Vector<S> {
        let d = self.dim();
        Vector::new(self.matrix.entries()[..d * (d - 1)].to_vec())
    }

    pub fn from_point(point: &Vector<S>, dim: usize) -> Result<Self> {
        if point.dim() != dim * (dim - 1) {
            return Err(Error::DimensionMismatch { expected: dim * (dim - 1), found: point.dim() });
        }
        let mut rows: Vec<Vec<S>> = point.coords().chunks(dim).map(|c| c.to_vec()).collect();
        let mut last = vec![S::zero(); dim];
        last[dim - 1] = S::one();
        rows.push(last);
        Ok(Channel { matrix: Matrix::from_rows(rows)? })
    }

    /// Σ wᵢ Tᵢ.
    pub fn mix(weights: &[S], channels: &[Channel<S>]) -> Result<Channel<S>> {
        let first = channels.first().ok_or(Error::EmptyChannelSet)?;
        let points: Vec<Vector<S>> = channels.iter().map(|c| c.to_point()).collect();
        let p = Vector::combination(weights, &points)?;
        let total = weights.iter().fold(S::zero(), |acc, w| acc + w);
        if !total.approx_eq(&S::one()) {
            return Err(Error::Domain(format!("mixture weights sum to {total}")));
        }
        Self::from_point(&p, first.dim())
    }

    /// `[γa, γb]` if both rows are γ vectors.
    pub fn gammas(&self) -> Option<(Gamma, Gamma)> {
        Some((Gamma::from_vector(&self.r()?)?, Gamma::from_vector(&self.s()?)?))
    }

    /// `[γ1+,γ2-]` style name for γ-pair channels.
    pub fn name(&self) -> Option<String> {
        self.gammas().map(|(a, b)| format!("[{a},{b}]"))
    }

    /// The corner-diagram symbol `_{BL}^{TL}□^{TR}_{BR}`: each corner of the
    /// square lists the labels of the states mapped onto it. `None` unless the
    /// channel sends every square corner to a corner.
    pub fn table_symbol(&self) -> Option<String> {
        if !self.is_single() {
            return None;
        }
        let sq = square::<S>();
        let mut corners: [String; 4] = Default::default();
        for (i, w) in sq.vertices().iter().enumerate() {
            let img = self.apply(w).ok()?;
            let c = sq.vertex_index(&img)?;
            corners[c].push_str(&(i + 1).to_string());
        }
        // Corner order: ω₁ top-right, ω₂ bottom-right, ω₃ bottom-left, ω₄ top-left.
        Some(format!("_{{{}}}^{{{}}}□^{{{}}}_{{{}}}", corners[2], corners[3], corners[0], corners[1]))
    }

    /// Parses `[g1+,g2-]` / `[γ1+,γ2−]`.
    pub fn parse_name(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("channel name '{s}' must look like [g1+,g2+]")))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("channel name '{s}' needs exactly two γ entries")));
        }
        Ok(Self::from_gammas(parts[0].parse()?, parts[1].parse()?))
    }

    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.to_point().canonical_cmp(&other.to_point())
    }
}

impl<S: Scalar> fmt::Display for Channel<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.name() {
            return f.write_str(&n);
        }
        match (self.r(), self.s()) {
            (Some(r), Some(s)) => write!(f, "[{r}, {s}]"),
            _ => write!(f, "{:?}", self.matrix),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
#[serde(bound = "")]
enum ChannelJson<S: Scalar> {
    Rs {
        #[serde(with = "crate::geometry::scalar_serde::vec")]
        r: Vec<S>,
        #[serde(with = "crate::geometry::scalar_serde::vec")]
        s: Vec<S>,
    },
    Full { matrix: Vec<Vector<S>> },
}

impl<S: Scalar> Serialize for Channel<S> {
    fn serialize<Se: Serializer>(&self, serializer: Se) -> std::result::Result<Se::Ok, Se::Error> {
        let json = match (self.r(), self.s()) {
            (Some(r), Some(s)) => ChannelJson::Rs { r: r.into_coords(), s: s.into_coords() },
            _ => ChannelJson::Full {
                matrix: self.matrix.row_vectors().into_iter().map(Vector::new).collect(),
            },
        };
        json.serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Channel<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let res = match ChannelJson::<S>::deserialize(deserializer)? {
            ChannelJson::Rs { r, s } => Channel::from_rs(Vector::new(r), Vector::new(s)),
            ChannelJson::Full { matrix } => Matrix::from_rows(matrix.into_iter().map(|v| v.into_coords()).collect())
                .and_then(Channel::from_matrix),
        };
        res.map_err(D::Error::custom)
    }
}

/// `T(ω)`.
pub fn apply<S: Scalar>(t: &Channel<S>, state: &Vector<S>) -> Result<Vector<S>> {
    t.apply(state)
}

/// Kronecker product of the parts, first factor slowest.
pub fn tensor_channel<S: Scalar>(parts: &[Channel<S>]) -> Result<Channel<S>> {
    let (first, rest) = parts.split_first().ok_or(Error::EmptyFactors)?;
    Ok(rest.iter().fold(first.clone(), |acc, p| acc.kron(p)))
}

/// All 36 γ-pair channels in table order: row γ for `r`, column γ for `s`.
pub fn gamma_pairs<S: Scalar>() -> Vec<Channel<S>> {
    Gamma::ALL
        .iter()
        .flat_map(|&a| Gamma::ALL.iter().map(move |&b| Channel::from_gammas(a, b)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rational;
    use crate::models::{minimal_tensor, pr_entangled_state};

    type Q = Rational;

    fn ch(s: &str) -> Channel<Q> {
        Channel::parse_name(s).unwrap()
    }

    #[test]
    fn name_grammar() {
        assert_eq!(ch("[g1+,g2+]"), Channel::identity(3));
        assert_eq!(ch("[γ2+, γ1−]"), ch("[g2+,g1-]"));
        assert!(Channel::<Q>::parse_name("[g4+,g1+]").is_err());
        assert!(Channel::<Q>::parse_name("g1+,g1+").is_err());
        assert_eq!(ch("[g1-,g3+]").name().unwrap(), "[γ1-,γ3+]");
    }

    #[test]
    fn apply_examples() {
        let sq = square::<Q>();
        assert_eq!(ch("[g1+,g1+]").apply(sq.omega(2)).unwrap(), *sq.omega(1));
        assert_eq!(ch("[g2+,g1-]").apply(sq.omega(1)).unwrap(), *sq.omega(2));
        assert!(ch("[g1+,g1+]").apply(&Vector::zeros(2)).is_err());
    }

    #[test]
    fn symbols_of_worked_examples() {
        assert_eq!(ch("[g1+,g2+]").table_symbol().unwrap(), "_{3}^{4}□^{1}_{2}");
        assert_eq!(ch("[g2+,g1-]").table_symbol().unwrap(), "_{2}^{3}□^{4}_{1}");
        let r = Channel::<Q>::from_rs(Vector::from_i64s(&[0, 0, 0]), Vector::from_i64s(&[0, 0, 0])).unwrap();
        assert_eq!(r.table_symbol(), None);
    }

    #[test]
    fn normalization_row_enforced() {
        let m = Matrix::from_rows(vec![
            vec![Q::from_i64(1), Q::from_i64(0), Q::from_i64(0)],
            vec![Q::from_i64(0), Q::from_i64(1), Q::from_i64(0)],
            vec![Q::from_i64(0), Q::from_i64(1), Q::from_i64(1)],
        ])
        .unwrap();
        assert_eq!(Channel::from_matrix(m), Err(Error::NotNormalizationPreserving));
    }

    #[test]
    fn json_round_trip() {
        let t = ch("[g2-,g1+]");
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"r":["0","-1","0"],"s":["1","0","0"]}"#);
        let back: Channel<Q> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let big = tensor_channel(&[t.clone(), t]).unwrap();
        let back: Channel<Q> = serde_json::from_str(&serde_json::to_string(&big).unwrap()).unwrap();
        assert_eq!(back, big);
    }

    #[test]
    fn tensor_examples() {
        let sq = square::<Q>();
        let t = ch("[g1+,g1+]");
        let id = Channel::identity(3);
        let ti = tensor_channel(&[t.clone(), id]).unwrap();
        let w12 = sq.omega(1).kron(sq.omega(2));
        assert_eq!(ti.apply(&w12).unwrap(), t.apply(sq.omega(1)).unwrap().kron(sq.omega(2)));

        let expected = sq
            .omega(1)
            .kron(sq.omega(3))
            .add(&sq.omega(3).kron(sq.omega(1)))
            .unwrap()
            .scale(&Q::half());
        assert_eq!(ti.apply(&pr_entangled_state()).unwrap(), expected);

        let tt = tensor_channel(&[t.clone(), t]).unwrap();
        assert_eq!(tt.apply(&sq.omega(2).kron(sq.omega(2))).unwrap(), sq.omega(1).kron(sq.omega(1)));
        assert!(tensor_channel::<Q>(&[]).is_err());
        let _ = minimal_tensor(&[sq.clone(), sq]).unwrap();
    }
}
