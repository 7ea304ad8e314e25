//! Polytopes in vertex and half-space form, hull membership and vertex
//! enumeration by facet-subset intersection.

use std::cmp::Ordering;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::linalg::{solve_augmented, Vector};
use super::lp::{LinearConstraint, LinearProgram, LpOutcome};
use super::scalar::{scalar_serde, Scalar};
use crate::error::{Error, Result};

/// `normal · x ≤ offset`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct HalfSpace<S: Scalar> {
    pub normal: Vector<S>,
    #[serde(with = "scalar_serde")]
    pub offset: S,
}

impl<S: Scalar> HalfSpace<S> {
    pub fn new(normal: Vector<S>, offset: S) -> Result<Self> {
        if normal.coords().iter().all(|c| c.is_zero()) {
            return Err(Error::MalformedConstraint("half-space normal is zero".into()));
        }
        Ok(HalfSpace { normal, offset })
    }

    /// Slack `offset - normal · x`; nonnegative iff `x` satisfies the inequality.
    pub fn slack(&self, x: &Vector<S>) -> Result<S> {
        Ok(self.offset.clone() - self.normal.dot(x)?)
    }

    pub fn contains(&self, x: &Vector<S>) -> Result<bool> {
        Ok(!self.slack(x)?.is_negative())
    }

    pub fn is_tight(&self, x: &Vector<S>) -> Result<bool> {
        Ok(self.slack(x)?.is_zero())
    }
}

/// A polytope with at least one of its two representations.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct Polytope<S: Scalar> {
    dim: usize,
    vertices: Option<Vec<Vector<S>>>,
    halfspaces: Option<Vec<HalfSpace<S>>>,
}

impl<S: Scalar> Polytope<S> {
    /// V-rep; duplicates are removed and the list is put in lexicographic order.
    pub fn from_vertices(vertices: Vec<Vector<S>>) -> Result<Self> {
        let dim = vertices.first().ok_or(Error::EmptyVertexList)?.dim();
        check_dims(vertices.iter().map(|v| v.dim()), dim)?;
        Ok(Polytope { dim, vertices: Some(canonical_dedup(vertices)), halfspaces: None })
    }

    pub fn from_halfspaces(halfspaces: Vec<HalfSpace<S>>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::MalformedConstraint("dimension must be at least 1".into()));
        }
        check_dims(halfspaces.iter().map(|h| h.normal.dim()), dim)?;
        Ok(Polytope { dim, vertices: None, halfspaces: Some(halfspaces) })
    }

    /// Both representations; they are checked against each other.
    pub fn from_both(vertices: Vec<Vector<S>>, halfspaces: Vec<HalfSpace<S>>) -> Result<Self> {
        let mut p = Self::from_vertices(vertices)?;
        check_dims(halfspaces.iter().map(|h| h.normal.dim()), p.dim)?;
        p.halfspaces = Some(halfspaces);
        p.check_consistency()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> Option<&[Vector<S>]> {
        self.vertices.as_deref()
    }

    pub fn halfspaces(&self) -> Option<&[HalfSpace<S>]> {
        self.halfspaces.as_deref()
    }

    /// Fills in the V-rep from the H-rep when missing.
    pub fn with_vertices(mut self) -> Result<Self> {
        if self.vertices.is_none() {
            self.vertices = Some(enumerate_vertices(&self, self.dim)?);
        }
        Ok(self)
    }

    /// Membership via the H-rep if present, otherwise via a hull LP.
    pub fn contains(&self, x: &Vector<S>) -> Result<bool> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        if let Some(hs) = &self.halfspaces {
            for h in hs {
                if !h.contains(x)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let vs = self.vertices.as_ref().expect("one representation is always present");
        Ok(hull_member(x, vs)?.is_inside())
    }

    /// Every vertex satisfies every half-space, and every half-space is tight at
    /// enough affinely independent vertices to span a facet.
    pub fn check_consistency(&self) -> Result<()> {
        let (Some(vs), Some(hs)) = (&self.vertices, &self.halfspaces) else {
            return Ok(());
        };
        let hull_dim = affine_rank(vs);
        for (i, h) in hs.iter().enumerate() {
            let mut tight = Vec::new();
            for v in vs {
                let slack = h.slack(v)?;
                if slack.is_negative() {
                    return Err(Error::Consistency(format!("vertex {v} violates half-space {i}")));
                }
                if slack.is_zero() {
                    tight.push(v.clone());
                }
            }
            if tight.is_empty() || affine_rank(&tight) + 1 < hull_dim {
                return Err(Error::Consistency(format!("half-space {i} does not support a facet")));
            }
        }
        Ok(())
    }
}

fn check_dims(dims: impl Iterator<Item = usize>, dim: usize) -> Result<()> {
    for d in dims {
        if d != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: d });
        }
    }
    Ok(())
}

/// Dimension of the affine hull of a point set.
fn affine_rank<S: Scalar>(points: &[Vector<S>]) -> usize {
    let Some(base) = points.first() else { return 0 };
    let mut rows: Vec<Vec<S>> = points[1..]
        .iter()
        .map(|p| p.sub(base).expect("equal dimensions").into_coords())
        .collect();
    if rows.is_empty() {
        return 0;
    }
    super::linalg::row_reduce(&mut rows, base.dim())
}

/// Sorts lexicographically and removes duplicates (within tolerance in float mode).
pub fn canonical_dedup<S: Scalar>(mut points: Vec<Vector<S>>) -> Vec<Vector<S>> {
    points.sort_by(|a, b| a.canonical_cmp(b));
    let mut out: Vec<Vector<S>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| q.approx_eq(&p)) {
            out.push(p);
        }
    }
    out
}

/// Result of [`hull_member`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
#[serde(bound = "")]
pub enum HullMembership<S: Scalar> {
    Inside {
        #[serde(with = "scalar_serde::vec")]
        weights: Vec<S>,
    },
    /// `functional · point = threshold + gap`, `functional · v ≤ threshold` for all vertices.
    Outside {
        functional: Vector<S>,
        #[serde(with = "scalar_serde")]
        threshold: S,
        #[serde(with = "scalar_serde")]
        gap: S,
    },
}

impl<S: Scalar> HullMembership<S> {
    pub fn is_inside(&self) -> bool {
        matches!(self, HullMembership::Inside { .. })
    }

    pub fn weights(&self) -> Option<&[S]> {
        match self {
            HullMembership::Inside { weights } => Some(weights),
            HullMembership::Outside { .. } => None,
        }
    }
}

/// Decides `point ∈ conv(vertices)`, returning convex weights or a strictly
/// separating functional.
pub fn hull_member<S: Scalar>(point: &Vector<S>, vertices: &[Vector<S>]) -> Result<HullMembership<S>> {
    let first = vertices.first().ok_or(Error::EmptyVertexList)?;
    let dim = point.dim();
    check_dims(vertices.iter().map(|v| v.dim()), dim)?;
    if first.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: first.dim() });
    }

    let n = vertices.len();
    let mut lp = LinearProgram::nonnegative(n);
    for i in 0..dim {
        lp.push(LinearConstraint::eq(vertices.iter().map(|v| v[i].clone()).collect(), point[i].clone()));
    }
    lp.push(LinearConstraint::eq(vec![S::one(); n], S::one()));

    match lp.solve()? {
        LpOutcome::Optimal { point: weights, .. } => Ok(HullMembership::Inside { weights }),
        LpOutcome::Infeasible(cert) => {
            // yᵀA ≥ 0 column-wise gives g·v + t ≥ 0 for every vertex, and yᵀb < 0
            // gives g·p + t < 0. Negating g separates.
            let y = cert.multipliers;
            let t = y[dim].clone();
            let functional = Vector::new(y[..dim].iter().map(|c| -c.clone()).collect());
            let gap = functional.dot(point)? - &t;
            Ok(HullMembership::Outside { functional, threshold: t, gap })
        }
        LpOutcome::Unbounded => unreachable!("no objective"),
    }
}

/// Extreme points of an H-rep polytope by intersecting every `dim`-subset of
/// facet hyperplanes and keeping the solutions that satisfy all inequalities.
///
/// Output is deduplicated and in lexicographic order.
pub fn enumerate_vertices<S: Scalar>(poly: &Polytope<S>, dim: usize) -> Result<Vec<Vector<S>>> {
    let hs = poly
        .halfspaces()
        .ok_or_else(|| Error::MalformedConstraint("vertex enumeration needs an H-rep".into()))?;
    if dim == 0 {
        return Err(Error::MalformedConstraint("dimension must be at least 1".into()));
    }
    check_dims(hs.iter().map(|h| h.normal.dim()), dim)?;
    if hs.len() < dim {
        return Err(Error::MalformedConstraint(format!("{} half-spaces cannot pin a point in dimension {dim}", hs.len())));
    }

    // Boundedness: every coordinate must be bounded in both directions.
    let constraints: Vec<_> = hs.iter().map(LinearConstraint::from_halfspace).collect();
    for i in 0..dim {
        for sign in [1, -1] {
            let mut lp = LinearProgram::new(dim);
            lp.constraints = constraints.clone();
            let mut obj = vec![S::zero(); dim];
            obj[i] = S::from_i64(sign);
            lp.maximize(obj);
            match lp.solve()? {
                LpOutcome::Unbounded => return Err(Error::Unbounded { coordinate: i }),
                LpOutcome::Infeasible(_) => return Ok(Vec::new()),
                LpOutcome::Optimal { .. } => {}
            }
        }
    }

    // Fan out over the first two facet indices; each task walks the rest.
    let m = hs.len();
    let heads: Vec<(usize, usize)> = if dim >= 2 {
        (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect()
    } else {
        (0..m).map(|a| (a, a)).collect()
    };
    let found: Vec<Vec<Vector<S>>> = heads
        .par_iter()
        .map(|&(a, b)| {
            let mut local: Vec<Vector<S>> = Vec::new();
            let prefix: Vec<usize> = if dim >= 2 { vec![a, b] } else { vec![a] };
            let start = prefix[prefix.len() - 1] + 1;
            let rest = dim - prefix.len();
            for tail in (start..m).combinations(rest) {
                let subset: Vec<usize> = prefix.iter().copied().chain(tail).collect();
                if let Some(x) = intersect(hs, &subset, dim) {
                    if hs.iter().all(|h| h.contains(&x).expect("dimension checked"))
                        && !local.iter().any(|q| q.approx_eq(&x))
                    {
                        local.push(x);
                    }
                }
            }
            local
        })
        .collect();
    Ok(canonical_dedup(found.into_iter().flatten().collect()))
}

fn intersect<S: Scalar>(hs: &[HalfSpace<S>], subset: &[usize], dim: usize) -> Option<Vector<S>> {
    let mut aug: Vec<Vec<S>> = subset
        .iter()
        .map(|&i| {
            let mut row = hs[i].normal.coords().to_vec();
            row.push(hs[i].offset.clone());
            row
        })
        .collect();
    solve_augmented(&mut aug, dim).map(Vector::new)
}

/// Indices of half-spaces tight at `x`.
pub fn tight_set<S: Scalar>(hs: &[HalfSpace<S>], x: &Vector<S>) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, h) in hs.iter().enumerate() {
        if h.is_tight(x)? {
            out.push(i);
        }
    }
    Ok(out)
}

/// `x` is a vertex of the H-rep polytope iff it is feasible and its tight
/// normals span the whole space.
pub fn is_vertex<S: Scalar>(hs: &[HalfSpace<S>], x: &Vector<S>) -> Result<bool> {
    for h in hs {
        if !h.contains(x)? {
            return Ok(false);
        }
    }
    let mut rows: Vec<Vec<S>> =
        tight_set(hs, x)?.into_iter().map(|i| hs[i].normal.coords().to_vec()).collect();
    Ok(super::linalg::row_reduce(&mut rows, x.dim()) == x.dim())
}

/// Lexicographic comparison helper for sorting vertex lists.
pub fn lex_cmp<S: Scalar>(a: &Vector<S>, b: &Vector<S>) -> Ordering {
    a.canonical_cmp(b)
}
