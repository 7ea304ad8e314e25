//! Normalization-preserving linear maps fixed by source/image pairs.

use super::linalg::{row_reduce, Matrix, Vector};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// The unique linear map with last row `(0, …, 0, 1)` sending each source to
/// its image. Extra pairs beyond a basis are checked, not used.
pub fn solve_affine_map<S: Scalar>(pairs: &[(Vector<S>, Vector<S>)]) -> Result<Matrix<S>> {
    let d = pairs.first().ok_or(Error::UnderDetermined)?.0.dim();
    for (src, img) in pairs {
        for v in [src, img] {
            if v.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
            }
        }
    }

    // Greedily pick a basis among the sources.
    let mut basis: Vec<usize> = Vec::new();
    for (i, (src, _)) in pairs.iter().enumerate() {
        let mut rows: Vec<Vec<S>> = basis.iter().map(|&j| pairs[j].0.coords().to_vec()).collect();
        rows.push(src.coords().to_vec());
        if row_reduce(&mut rows, d) == basis.len() + 1 {
            basis.push(i);
            if basis.len() == d {
                break;
            }
        }
    }
    if basis.len() < d {
        return Err(Error::UnderDetermined);
    }

    let sources = Matrix::from_rows(basis.iter().map(|&j| pairs[j].0.coords().to_vec()).collect())?;
    let mut rows = Vec::with_capacity(d);
    for out in 0..d - 1 {
        let rhs: Vec<S> = basis.iter().map(|&j| pairs[j].1[out].clone()).collect();
        rows.push(sources.solve(&rhs).ok_or(Error::UnderDetermined)?);
    }
    let mut last = vec![S::zero(); d];
    last[d - 1] = S::one();
    rows.push(last);
    let map = Matrix::from_rows(rows)?;

    for (i, (src, img)) in pairs.iter().enumerate() {
        if !map.mul_vec(src)?.approx_eq(img) {
            return Err(Error::InconsistentPair { index: i });
        }
    }
    Ok(map)
}
