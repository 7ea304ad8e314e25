//! The channel polytope of a polygon model and its reversible and
//! bistochastic sub-polytopes.

use serde::Serialize;

use super::Channel;
use crate::error::{Error, Result};
use crate::geometry::{
    enumerate_vertices, hull_member, is_vertex, polytope::canonical_dedup, scalar_serde, solve_affine_map,
    HalfSpace, HullMembership, LinearConstraint, LinearProgram, LpOutcome, Polytope, Scalar, Vector,
};
use crate::models::{facet_effect, Model};

/// Full extreme-channel enumeration is refused above this k unless overridden.
pub const DEFAULT_ENUMERATION_CAP: usize = 4;

fn require_single<S: Scalar>(m: &Model<S>) -> Result<usize> {
    m.k().ok_or(Error::NotSingleSystem)
}

/// Inequalities `f(T ωᵢ) ≤ 1` for every edge `f` and vertex `ωᵢ`, in the
/// coordinates `(r₁, r₂, r₃, s₁, s₂, s₃)`.
pub fn channel_hrep<S: Scalar>(m: &Model<S>) -> Result<Vec<HalfSpace<S>>> {
    require_single(m)?;
    let mut out = Vec::new();
    for f in m.facets() {
        for w in m.vertices() {
            let coords: Vec<S> = w
                .coords()
                .iter()
                .map(|c| f.normal[0].clone() * c)
                .chain(w.coords().iter().map(|c| f.normal[1].clone() * c))
                .collect();
            out.push(HalfSpace::new(Vector::new(coords), f.offset.clone())?);
        }
    }
    Ok(out)
}

/// Every vertex image lies in the state polygon.
pub fn is_admissible<S: Scalar>(t: &Channel<S>, m: &Model<S>) -> Result<bool> {
    require_single(m)?;
    if t.dim() != m.dimension() {
        return Err(Error::DimensionMismatch { expected: m.dimension(), found: t.dim() });
    }
    for w in m.vertices() {
        let img = t.apply(w)?;
        for f in m.facets() {
            if !f.contains(&img)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Extreme channels with the default cap on k.
pub fn enumerate_extreme_channels<S: Scalar>(m: &Model<S>) -> Result<Vec<Channel<S>>> {
    enumerate_extreme_channels_capped(m, Some(DEFAULT_ENUMERATION_CAP))
}

/// Extreme channels by facet-subset enumeration in R⁶, in lexicographic order.
/// `cap = None` lifts the limit on k.
pub fn enumerate_extreme_channels_capped<S: Scalar>(m: &Model<S>, cap: Option<usize>) -> Result<Vec<Channel<S>>> {
    let k = require_single(m)?;
    if let Some(cap) = cap {
        if k > cap {
            return Err(Error::EnumerationCap { k, cap });
        }
    }
    let poly = Polytope::from_halfspaces(channel_hrep(m)?, 6)?;
    enumerate_vertices(&poly, 6)?.iter().map(|p| Channel::from_point(p, 3)).collect()
}

/// Vertex test by rank of the tight inequalities.
pub fn is_extreme<S: Scalar>(t: &Channel<S>, m: &Model<S>) -> Result<bool> {
    is_vertex(&channel_hrep(m)?, &t.to_point())
}

/// The 4k dihedral symmetries of the polygon, in lexicographic order.
pub fn reversibles<S: Scalar>(m: &Model<S>) -> Result<Vec<Channel<S>>> {
    let k = require_single(m)?;
    let n = 2 * k;
    let vs = m.vertices();
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        for reflect in [false, true] {
            let pairs: Vec<_> = (0..n)
                .map(|i| {
                    let target = if reflect { (j + n - i) % n } else { (i + j) % n };
                    (vs[i].clone(), vs[target].clone())
                })
                .collect();
            out.push(Channel::from_matrix(solve_affine_map(&pairs)?)?);
        }
    }
    let points = canonical_dedup(out.iter().map(|c| c.to_point()).collect());
    points.iter().map(|p| Channel::from_point(p, 3)).collect()
}

/// Extreme points of the bistochastic channels: the channel polytope cut by
/// `r₃ = s₃ = 0`, enumerated in R⁴.
pub fn bisto_vertices<S: Scalar>(m: &Model<S>) -> Result<Vec<Channel<S>>> {
    let hs: Vec<HalfSpace<S>> = channel_hrep(m)?
        .into_iter()
        .map(|h| {
            let c = h.normal.coords();
            let n = Vector::new(vec![c[0].clone(), c[1].clone(), c[3].clone(), c[4].clone()]);
            HalfSpace::new(n, h.offset)
        })
        .collect::<Result<_>>()?;
    let poly = Polytope::from_halfspaces(hs, 4)?;
    enumerate_vertices(&poly, 4)?
        .iter()
        .map(|p| {
            let z = S::zero();
            let full = vec![p[0].clone(), p[1].clone(), z.clone(), p[2].clone(), p[3].clone(), z];
            Channel::from_point(&Vector::new(full), 3)
        })
        .collect()
}

fn hull_of<S: Scalar>(t: &Channel<S>, set: &[Channel<S>]) -> Result<HullMembership<S>> {
    let points: Vec<Vector<S>> = set.iter().map(|c| c.to_point()).collect();
    hull_member(&t.to_point(), &points)
}

/// Membership in the convex hull of the reversible channels. Weights are
/// indexed like [`reversibles`].
pub fn in_rare<S: Scalar>(t: &Channel<S>, m: &Model<S>) -> Result<HullMembership<S>> {
    hull_of(t, &reversibles(m)?)
}

/// Membership in the bistochastic channel polytope. Weights are indexed like
/// [`bisto_vertices`].
pub fn in_bisto<S: Scalar>(t: &Channel<S>, m: &Model<S>) -> Result<HullMembership<S>> {
    hull_of(t, &bisto_vertices(m)?)
}

/// A bistochastic extreme channel outside the reversible hull, with the
/// functional separating it.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct GapEntry<S: Scalar> {
    pub channel: Channel<S>,
    #[serde(rename = "separating_functional")]
    pub functional: Vector<S>,
    #[serde(with = "scalar_serde")]
    pub threshold: S,
    #[serde(with = "scalar_serde")]
    pub gap: S,
}

/// Every bistochastic vertex not in the reversible hull.
pub fn birkhoff_gap<S: Scalar>(m: &Model<S>) -> Result<Vec<GapEntry<S>>> {
    let rare = reversibles(m)?;
    let mut out = Vec::new();
    for t in bisto_vertices(m)? {
        if let HullMembership::Outside { functional, threshold, gap } = hull_of(&t, &rare)? {
            out.push(GapEntry { channel: t, functional, threshold, gap });
        }
    }
    Ok(out)
}

/// Whether `T = Σ c_ij ωᵢ f_jᵀ` with `c ≥ 0`, the `f_j` being the edge effects:
/// a measurement of edge effects followed by preparation of mixtures of
/// vertices.
pub fn is_measure_prepare<S: Scalar>(t: &Channel<S>, m: &Model<S>) -> Result<bool> {
    require_single(m)?;
    let effects: Vec<Vector<S>> = m.facets().iter().map(|h| facet_effect("f", h).functional).collect();
    let mut gens = Vec::new();
    for w in m.vertices() {
        for f in &effects {
            gens.push((w, f));
        }
    }
    let mut lp = LinearProgram::nonnegative(gens.len());
    for a in 0..3 {
        for b in 0..3 {
            let coeffs = gens.iter().map(|(w, f)| w[a].clone() * &f[b]).collect();
            lp.push(LinearConstraint::eq(coeffs, t.matrix().get(a, b).clone()));
        }
    }
    Ok(matches!(lp.solve()?, LpOutcome::Optimal { .. }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChannelClass {
    pub admissible: bool,
    pub reversible: bool,
    pub bistochastic: bool,
    pub extreme: bool,
    pub measure_and_prepare: bool,
}

/// Classifies an admissible channel.
pub fn classify<S: Scalar>(t: &Channel<S>, m: &Model<S>) -> Result<ChannelClass> {
    if !is_admissible(t, m)? {
        return Err(Error::Inadmissible);
    }
    let mut hit = vec![false; m.vertices().len()];
    for w in m.vertices() {
        if let Some(i) = m.vertex_index(&t.apply(w)?) {
            hit[i] = true;
        }
    }
    let reversible = hit.iter().all(|&h| h);
    let mixed = m.mixed_state();
    Ok(ChannelClass {
        admissible: true,
        reversible,
        bistochastic: t.apply(&mixed)?.approx_eq(&mixed),
        extreme: is_extreme(t, m)?,
        measure_and_prepare: is_measure_prepare(t, m)?,
    })
}

/// Channel sets used by the random access code and convertibility tests.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSet<S: Scalar> {
    RaRe,
    BiSto,
    Full,
    Explicit(Vec<Channel<S>>),
}

impl<S: Scalar> ChannelSet<S> {
    pub fn named(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "rare" => Ok(ChannelSet::RaRe),
            "bisto" => Ok(ChannelSet::BiSto),
            "full" | "all" => Ok(ChannelSet::Full),
            other => Err(Error::Parse(format!("unknown channel set '{other}' (expected rare, bisto or full)"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChannelSet::RaRe => "rare",
            ChannelSet::BiSto => "bisto",
            ChannelSet::Full => "full",
            ChannelSet::Explicit(_) => "explicit",
        }
    }

    /// Extreme points of the set on `m`.
    pub fn vertices(&self, m: &Model<S>) -> Result<Vec<Channel<S>>> {
        let vs = match self {
            ChannelSet::RaRe => reversibles(m)?,
            ChannelSet::BiSto => bisto_vertices(m)?,
            ChannelSet::Full => enumerate_extreme_channels(m)?,
            ChannelSet::Explicit(v) => v.clone(),
        };
        if vs.is_empty() {
            return Err(Error::EmptyChannelSet);
        }
        Ok(vs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::gamma_pairs;
    use crate::geometry::{Float, Rational};
    use crate::models::{build_evengon, square};

    type Q = Rational;

    fn ch(s: &str) -> Channel<Q> {
        Channel::parse_name(s).unwrap()
    }

    #[test]
    fn square_hrep_has_sixteen_rows() {
        assert_eq!(channel_hrep(&square::<Q>()).unwrap().len(), 16);
    }

    #[test]
    fn admissibility_examples() {
        let sq = square::<Q>();
        assert!(is_admissible(&ch("[g1+,g2+]"), &sq).unwrap());
        let bad = Channel::from_rs(Vector::from_i64s(&[2, 0, 0]), Vector::from_i64s(&[0, 1, 0])).unwrap();
        assert!(!is_admissible(&bad, &sq).unwrap());
        assert!(gamma_pairs::<Q>().iter().all(|t| is_admissible(t, &sq).unwrap()));
        assert_eq!(classify(&bad, &sq), Err(Error::Inadmissible));
    }

    #[test]
    fn square_reversibles_are_the_mixed_axis_pairs() {
        let sq = square::<Q>();
        let rev = reversibles(&sq).unwrap();
        assert_eq!(rev.len(), 8);
        for t in &rev {
            let (a, b) = t.gammas().unwrap();
            assert!(a.axis() != b.axis() && a.axis() <= 2 && b.axis() <= 2, "{t}");
        }
    }

    #[test]
    fn classify_examples() {
        let sq = square::<Q>();
        let c = classify(&ch("[g1+,g1+]"), &sq).unwrap();
        assert!(c.bistochastic && c.extreme && !c.reversible && c.measure_and_prepare);
        let c = classify(&ch("[g2+,g1-]"), &sq).unwrap();
        assert!(c.reversible && c.bistochastic && c.extreme && !c.measure_and_prepare);
        let c = classify(&ch("[g3+,g3+]"), &sq).unwrap();
        assert!(!c.bistochastic && c.extreme && c.measure_and_prepare);
        let mixed = Channel::mix(&[Q::half(), Q::half()], &[ch("[g1+,g2+]"), ch("[g1-,g2-]")]).unwrap();
        assert!(!classify(&mixed, &sq).unwrap().extreme);
    }

    #[test]
    fn rare_membership_examples() {
        let sq = square::<Q>();
        let id = ch("[g1+,g2+]");
        let rot = ch("[g1-,g2-]");
        let mixed = Channel::mix(&[Q::half(), Q::half()], &[id.clone(), rot.clone()]).unwrap();
        let rev = reversibles(&sq).unwrap();
        match in_rare(&mixed, &sq).unwrap() {
            HullMembership::Inside { weights } => {
                assert_eq!(weights.iter().fold(Q::zero(), |a, w| a + w), Q::one());
                assert_eq!(Channel::mix(&weights, &rev).unwrap(), mixed);
            }
            other => panic!("{other:?}"),
        }
        for name in ["[g1+,g1+]", "[g2+,g2+]"] {
            match in_rare(&ch(name), &sq).unwrap() {
                HullMembership::Outside { gap, .. } => assert!(gap.is_positive()),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn bisto_membership_examples() {
        let sq = square::<Q>();
        assert!(in_bisto(&ch("[g1+,g1+]"), &sq).unwrap().is_inside());
        assert!(in_bisto(&ch("[g1+,g2+]"), &sq).unwrap().is_inside());
        assert!(!in_bisto(&ch("[g3+,g3+]"), &sq).unwrap().is_inside());
    }

    #[test]
    fn enumeration_cap() {
        let m = build_evengon::<Float>(5).unwrap();
        assert_eq!(enumerate_extreme_channels(&m).unwrap_err(), Error::EnumerationCap { k: 5, cap: 4 });
    }

    #[test]
    fn hexagon_reversibles_and_gap() {
        let m = build_evengon::<Float>(3).unwrap();
        assert_eq!(reversibles(&m).unwrap().len(), 12);
        assert!(!birkhoff_gap(&m).unwrap().is_empty());
    }

    #[test]
    fn set_names() {
        assert_eq!(ChannelSet::<Q>::named("RaRe").unwrap(), ChannelSet::RaRe);
        assert!(ChannelSet::<Q>::named("nope").is_err());
        assert_eq!(ChannelSet::<Q>::Explicit(vec![]).vertices(&square()), Err(Error::EmptyChannelSet));
    }
}
