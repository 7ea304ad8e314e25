//! Scalars, linear algebra, linear programming and polytopes.

pub mod affine;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod scalar;

pub use affine::solve_affine_map;
pub use linalg::{Matrix, Vector};
pub use lp::{lp_feasible, FarkasCertificate, Feasibility, LinearConstraint, LinearProgram, LpOutcome, Relation};
pub use polytope::{enumerate_vertices, hull_member, is_vertex, HalfSpace, HullMembership, Polytope};
pub use scalar::{parse_rational, scalar_serde, Float, Mode, Rational, Scalar, DEFAULT_TOLERANCE};
