//! Real bilinear forms carrying an explicit symmetry sign.
//!
//! A form is stored as its Gram matrix `M` together with a sign `ε` such that
//! `Mᵀ = ε·M`. Symmetric forms (`ε = +1`) have a signature; skew forms
//! (`ε = −1`) are symplectic when nondegenerate.

use std::fmt;
use std::ops::Add;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// Symmetry sign of a bilinear form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

/// Numerical thresholds used for every rank, symmetry and angle decision.
///
/// A quantity is treated as zero when it falls below
/// `max(rel_eps * scale, abs_eps)`, where `scale` is the natural magnitude of
/// the object under test (largest eigenvalue, largest singular value, ...).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel_eps: f64,
    pub abs_eps: f64,
}

impl Tolerance {
    pub const DEFAULT_REL: f64 = 1e-10;
    pub const DEFAULT_ABS: f64 = 1e-12;

    pub fn new(rel_eps: f64, abs_eps: f64) -> Result<Self> {
        if !(rel_eps > 0.0) || !rel_eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rel_eps must be positive, got {rel_eps}"
            )));
        }
        if !(abs_eps >= 0.0) || !abs_eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "abs_eps must be non-negative, got {abs_eps}"
            )));
        }
        Ok(Tolerance { rel_eps, abs_eps })
    }

    /// Zero band for a quantity of magnitude `scale`.
    pub fn band(&self, scale: f64) -> f64 {
        (self.rel_eps * scale).max(self.abs_eps)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_eps: Self::DEFAULT_REL,
            abs_eps: Self::DEFAULT_ABS,
        }
    }
}

/// Eigenvalue counts of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Signature {
    pub positives: usize,
    pub negatives: usize,
    pub zeros: usize,
}

impl Signature {
    pub fn new(positives: usize, negatives: usize, zeros: usize) -> Self {
        Signature {
            positives,
            negatives,
            zeros,
        }
    }

    pub fn dim(&self) -> usize {
        self.positives + self.negatives + self.zeros
    }

    pub fn rank(&self) -> usize {
        self.positives + self.negatives
    }

    /// `positives − negatives`.
    pub fn index(&self) -> i64 {
        self.positives as i64 - self.negatives as i64
    }
}

impl Add for Signature {
    type Output = Signature;

    fn add(self, rhs: Signature) -> Signature {
        Signature {
            positives: self.positives + rhs.positives,
            negatives: self.negatives + rhs.negatives,
            zeros: self.zeros + rhs.zeros,
        }
    }
}

/// Gram matrix of a bilinear form `φ(x, y) = xᵀ M y` with `Mᵀ = ε·M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearFormMatrix {
    epsilon: Sign,
    entries: DMatrix<f64>,
}

impl BilinearFormMatrix {
    /// Validates shape and `ε`-symmetry of `entries`.
    pub fn new(entries: DMatrix<f64>, epsilon: Sign, tol: &Tolerance) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::NonSquare { rows, cols });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        let residual = linalg::max_abs(&(entries.transpose() - &entries * epsilon.value()));
        if residual > tol.band(linalg::max_abs(&entries)) {
            return Err(Error::SymmetryViolation { residual });
        }
        Ok(BilinearFormMatrix { epsilon, entries })
    }

    pub fn identity(n: usize) -> Self {
        BilinearFormMatrix {
            epsilon: Sign::Plus,
            entries: DMatrix::identity(n, n),
        }
    }

    pub fn epsilon(&self) -> Sign {
        self.epsilon
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `φ(x, y)` for coordinate columns `x`, `y`.
    pub fn eval(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
        x.transpose() * &self.entries * y
    }

    pub fn scaled(&self, factor: f64) -> Self {
        BilinearFormMatrix {
            epsilon: self.epsilon,
            entries: &self.entries * factor,
        }
    }

    /// The pulled back form `Pᵀ M P`.
    pub fn congruent(&self, p: &DMatrix<f64>) -> Result<Self> {
        if p.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.nrows(),
            });
        }
        let mut entries = p.transpose() * &self.entries * p;
        // Re-impose exact ε-symmetry lost to rounding.
        let eps = self.epsilon.value();
        entries = (&entries + entries.transpose() * eps) * 0.5;
        Ok(BilinearFormMatrix {
            epsilon: self.epsilon,
            entries,
        })
    }
}

/// Counts eigenvalues of the symmetrized Gram matrix above, below and inside
/// the zero band `max(rel_eps·ρ, abs_eps)` where `ρ` is the spectral radius.
pub fn signature(form: &BilinearFormMatrix, tol: &Tolerance) -> Result<Signature> {
    if form.epsilon != Sign::Plus {
        return Err(Error::SkewSignature);
    }
    Ok(symmetric_signature(form.entries(), tol))
}

pub(crate) fn symmetric_signature(m: &DMatrix<f64>, tol: &Tolerance) -> Signature {
    let n = m.nrows();
    if n == 0 {
        return Signature::default();
    }
    let eig = linalg::symmetric_eigenvalues(m);
    let radius = eig.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let band = tol.band(radius);
    let mut sig = Signature::default();
    for &lambda in eig.iter() {
        if lambda > band {
            sig.positives += 1;
        } else if lambda < -band {
            sig.negatives += 1;
        } else {
            sig.zeros += 1;
        }
    }
    sig
}

/// True iff the numerical rank equals the dimension.
pub fn is_nondegenerate(form: &BilinearFormMatrix, tol: &Tolerance) -> bool {
    linalg::numerical_rank(form.entries(), tol) == form.dim()
}

/// The `2k×2k` form `[[0, I], [ε·I, 0]]`.
pub fn hyperbolic_form(k: usize, epsilon: Sign) -> BilinearFormMatrix {
    let mut entries = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        entries[(i, k + i)] = 1.0;
        entries[(k + i, i)] = epsilon.value();
    }
    BilinearFormMatrix { epsilon, entries }
}

/// Block-diagonal sum of two forms with the same sign.
pub fn direct_sum(f1: &BilinearFormMatrix, f2: &BilinearFormMatrix) -> Result<BilinearFormMatrix> {
    if f1.epsilon != f2.epsilon {
        return Err(Error::EpsilonMismatch);
    }
    Ok(BilinearFormMatrix {
        epsilon: f1.epsilon,
        entries: linalg::block_diagonal(&f1.entries, &f2.entries),
    })
}
