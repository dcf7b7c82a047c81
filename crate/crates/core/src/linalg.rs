//! Small dense helpers shared by the rest of the crate.

use faer::Mat;
use nalgebra::DMatrix;

use crate::forms::Tolerance;

// Decompositions go through faer: the Golub–Kahan SVD of nalgebra 0.35
// returns wrong factors for some well-conditioned 3×3 inputs.

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin singular value decomposition `m = U·diag(s)·Vᵀ`, `s` descending.
pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn thin_svd(m: &DMatrix<f64>) -> Svd {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Svd {
            u: DMatrix::zeros(r, 0),
            s: Vec::new(),
            v: DMatrix::zeros(c, 0),
        };
    }
    let svd = to_faer(m).thin_svd().expect("svd of a finite matrix");
    let s = svd.S().column_vector().iter().copied().collect();
    Svd {
        u: from_faer(svd.U()),
        s,
        v: from_faer(svd.V()),
    }
}

/// Singular values in descending order; empty for degenerate shapes.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m)
        .singular_values()
        .expect("svd of a finite matrix")
}

/// Eigenvalues of `(m + mᵀ)/2`, ascending.
pub(crate) fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let sym = (m + m.transpose()) * 0.5;
    to_faer(&sym)
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("eigenvalues of a finite symmetric matrix")
}

fn band_of(s: &[f64], tol: &Tolerance) -> f64 {
    tol.band(s.iter().cloned().fold(0.0_f64, f64::max))
}

pub(crate) fn numerical_rank(m: &DMatrix<f64>, tol: &Tolerance) -> usize {
    let sv = singular_values(m);
    let band = band_of(&sv, tol);
    sv.iter().filter(|&&s| s > band).count()
}

fn select_columns(m: &DMatrix<f64>, keep: impl Iterator<Item = usize>) -> DMatrix<f64> {
    let cols: Vec<_> = keep.map(|i| m.column(i)).collect();
    if cols.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    DMatrix::from_columns(&cols)
}

/// Orthonormal basis of the numerical column space of `m`.
pub(crate) fn column_space(m: &DMatrix<f64>, tol: &Tolerance) -> DMatrix<f64> {
    let svd = thin_svd(m);
    let band = band_of(&svd.s, tol);
    select_columns(&svd.u, (0..svd.s.len()).filter(|&i| svd.s[i] > band))
}

/// Orthonormal basis of the numerical kernel of `m` (as a map from `R^ncols`).
pub(crate) fn null_space(m: &DMatrix<f64>, tol: &Tolerance) -> DMatrix<f64> {
    let n = m.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let svd = to_faer(m).svd().expect("svd of a finite matrix");
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let v = from_faer(svd.V());
    let band = band_of(&s, tol);
    select_columns(&v, (0..n).filter(|&i| i >= s.len() || s[i] <= band))
}

/// Least-squares coordinates of `target` in the column frame `frame`.
pub(crate) fn solve_least_squares(frame: &DMatrix<f64>, target: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = thin_svd(frame);
    let mut coords = svd.u.transpose() * target;
    for (i, &s) in svd.s.iter().enumerate() {
        let inv = if s > 0.0 { 1.0 / s } else { 0.0 };
        coords.row_mut(i).scale_mut(inv);
    }
    &svd.v * coords
}

pub(crate) fn block_diagonal(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}
