//! Linear subspaces of `R^n` stored through orthonormal column bases.
//!
//! Intersections and equality go through principal angles: the singular
//! values of `Aᵀ B` for orthonormal bases `A`, `B` are the cosines of the
//! angles between the two subspaces.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::forms::{BilinearFormMatrix, Tolerance};
use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Orthonormal basis of the numerical column space of `raw`.
    pub fn canonicalize(raw: &DMatrix<f64>, tol: &Tolerance) -> Subspace {
        Subspace {
            basis: linalg::column_space(raw, tol),
        }
    }

    /// The zero subspace of `R^n`.
    pub fn zero(ambient_dim: usize) -> Subspace {
        Subspace {
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    /// Span of the listed coordinate vectors.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Subspace {
        let mut basis = DMatrix::zeros(ambient_dim, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            basis[(i, j)] = 1.0;
        }
        Subspace { basis }
    }

    /// Wraps a basis that is already orthonormal. Only for internal
    /// constructions where orthonormality holds by construction.
    pub(crate) fn from_orthonormal(basis: DMatrix<f64>) -> Subspace {
        Subspace { basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projector `B Bᵀ`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Image under a linear map of the ambient space.
    pub fn transform(&self, map: &DMatrix<f64>, tol: &Tolerance) -> Result<Subspace> {
        check_ambient(map.ncols(), self.ambient_dim())?;
        Ok(Subspace::canonicalize(&(map * &self.basis), tol))
    }
}

fn check_ambient(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Cosines of the principal angles, descending.
fn principal_cosines(a: &Subspace, b: &Subspace) -> Vec<f64> {
    let c = a.basis.transpose() * &b.basis;
    linalg::singular_values(&c)
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect()
}

/// Principal angles between `a` and `b` in radians, ascending. There are
/// `min(dim a, dim b)` of them.
pub fn principal_angles(a: &Subspace, b: &Subspace) -> Result<Vec<f64>> {
    check_ambient(a.ambient_dim(), b.ambient_dim())?;
    Ok(principal_cosines(a, b).into_iter().map(f64::acos).collect())
}

/// Largest principal angle; zero when either subspace is zero.
pub fn max_principal_angle(a: &Subspace, b: &Subspace) -> Result<f64> {
    Ok(principal_angles(a, b)?.into_iter().fold(0.0, f64::max))
}

/// Vectors common to both subspaces: the principal directions whose cosine
/// exceeds `1 − rel_eps`.
pub fn intersect(a: &Subspace, b: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    check_ambient(a.ambient_dim(), b.ambient_dim())?;
    let n = a.ambient_dim();
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(Subspace::zero(n));
    }
    let c = a.basis.transpose() * &b.basis;
    let svd = linalg::thin_svd(&c);
    let u = svd.u;
    let threshold = 1.0 - tol.rel_eps;
    let keep: Vec<usize> = svd
        .s
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > threshold)
        .map(|(i, _)| i)
        .collect();
    let mut dirs = DMatrix::zeros(a.dim(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        dirs.set_column(j, &u.column(i));
    }
    let vectors = &a.basis * dirs;
    Ok(Subspace::canonicalize(&vectors, tol))
}

/// Equal dimensions and every principal angle below `arccos(1 − rel_eps)`.
pub fn subspace_equal(a: &Subspace, b: &Subspace, tol: &Tolerance) -> bool {
    if a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim() {
        return false;
    }
    let threshold = 1.0 - tol.rel_eps;
    principal_cosines(a, b).iter().all(|&c| c > threshold)
}

/// Span of the union of both bases.
pub fn sum(a: &Subspace, b: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    check_ambient(a.ambient_dim(), b.ambient_dim())?;
    let mut joined = DMatrix::zeros(a.ambient_dim(), a.dim() + b.dim());
    joined.columns_mut(0, a.dim()).copy_from(&a.basis);
    joined.columns_mut(a.dim(), b.dim()).copy_from(&b.basis);
    Ok(Subspace::canonicalize(&joined, tol))
}

/// `{x : φ(x, v) = 0 for all v in a}`, the kernel of `(M·B)ᵀ`.
pub fn orthogonal_complement_wrt(
    form: &BilinearFormMatrix,
    a: &Subspace,
    tol: &Tolerance,
) -> Result<Subspace> {
    check_ambient(form.dim(), a.ambient_dim())?;
    let constraints = (form.entries() * &a.basis).transpose();
    if constraints.nrows() == 0 {
        return Ok(Subspace::coordinate(
            a.ambient_dim(),
            &(0..a.ambient_dim()).collect::<Vec<_>>(),
        ));
    }
    Ok(Subspace::from_orthonormal(linalg::null_space(
        &constraints,
        tol,
    )))
}
