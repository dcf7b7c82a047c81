#![allow(dead_code)]

use std::sync::Arc;

use lagtrans_core::forms::{BilinearFormMatrix, Sign, Tolerance};
use lagtrans_core::phase_space::{
    graph_lagrangian, standard_space, EpsSpace, GraphMap, Lagrangian,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn tol() -> Tolerance {
    Tolerance::default()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut impl Rng, rows: usize, cols: usize, bound: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-bound..bound))
}

pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    uniform(rng, n, n, 1.0).qr().q()
}

/// Symmetric matrix with entries in `[-bound, bound]`.
pub fn random_symmetric(rng: &mut impl Rng, n: usize, bound: f64) -> DMatrix<f64> {
    let a = uniform(rng, n, n, bound);
    (&a + a.transpose()) * 0.5
}

/// `Q·diag(d)·Qᵀ` with `|d_i| ∈ [e^{-1.5}, e^{1.5}]` and random signs.
pub fn conditioned_symmetric(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let d: Vec<f64> = (0..n)
        .map(|_| {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            sign * rng.random_range(-1.5..1.5f64).exp()
        })
        .collect();
    with_spectrum(rng, &d)
}

/// Symmetric matrix with the given eigenvalues in a random orthonormal basis.
pub fn with_spectrum(rng: &mut impl Rng, eigenvalues: &[f64]) -> DMatrix<f64> {
    let n = eigenvalues.len();
    let q = random_orthogonal(rng, n);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(eigenvalues));
    let s = &q * d * q.transpose();
    (&s + s.transpose()) * 0.5
}

/// Symmetric matrix of corank `nullity` (exact zero eigenvalues).
pub fn singular_symmetric(rng: &mut impl Rng, n: usize, nullity: usize) -> DMatrix<f64> {
    let d: Vec<f64> = (0..n)
        .map(|i| {
            if i < nullity {
                0.0
            } else {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                sign * rng.random_range(-1.0..1.0f64).exp()
            }
        })
        .collect();
    with_spectrum(rng, &d)
}

pub fn sym(g: DMatrix<f64>) -> GraphMap {
    GraphMap::symmetric(g, &tol()).unwrap()
}

/// A mildly conditioned linear symplectomorphism of the standard space:
/// `diag(A, A⁻ᵀ)·[[I, S], [0, I]]·[[I, 0], [T, I]]` with `S`, `T` symmetric.
pub fn random_symplectic(rng: &mut impl Rng, k: usize) -> DMatrix<f64> {
    let scales: Vec<f64> = (0..k)
        .map(|_| rng.random_range(-0.5..0.5f64).exp())
        .collect();
    let a = random_orthogonal(rng, k)
        * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&scales))
        * random_orthogonal(rng, k);
    let a_inv_t = a.clone().try_inverse().unwrap().transpose();
    let mut d = DMatrix::zeros(2 * k, 2 * k);
    d.view_mut((0, 0), (k, k)).copy_from(&a);
    d.view_mut((k, k), (k, k)).copy_from(&a_inv_t);
    let mut upper = DMatrix::identity(2 * k, 2 * k);
    upper
        .view_mut((0, k), (k, k))
        .copy_from(&random_symmetric(rng, k, 0.5));
    let mut lower = DMatrix::identity(2 * k, 2 * k);
    lower
        .view_mut((k, 0), (k, k))
        .copy_from(&random_symmetric(rng, k, 0.5));
    d * upper * lower
}

/// Real form `[[A, −B], [B, A]]` of a random unitary `A + iB`.
pub fn random_unitary(rng: &mut impl Rng, k: usize) -> DMatrix<f64> {
    let z = DMatrix::from_fn(k, k, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let u = z.qr().q();
    let mut r = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            r[(i, j)] = u[(i, j)].re;
            r[(k + i, k + j)] = u[(i, j)].re;
            r[(i, k + j)] = -u[(i, j)].im;
            r[(k + i, j)] = u[(i, j)].im;
        }
    }
    r
}

/// A random non-standard symplectic space together with a symplectic
/// isomorphism `P` from the standard space onto it.
pub fn random_space(rng: &mut impl Rng, k: usize) -> (Arc<EpsSpace>, DMatrix<f64>) {
    let p = random_symplectic(rng, k) * random_orthogonal_permutation(rng, k);
    let p_inv = p.clone().try_inverse().unwrap();
    let h = EpsSpace::standard(k, Sign::Minus);
    let m = p_inv.transpose() * h.form().entries() * &p_inv;
    let m = (&m - m.transpose()) * 0.5;
    let form = BilinearFormMatrix::new(m, Sign::Minus, &tol()).unwrap();
    (Arc::new(EpsSpace::new(form, &tol()).unwrap()), p)
}

/// A symplectic permutation of the two factors: swaps `(a_i, α_i)` to
/// `(α_i, −a_i)` for a random set of indices.
fn random_orthogonal_permutation(rng: &mut impl Rng, k: usize) -> DMatrix<f64> {
    let mut r = DMatrix::identity(2 * k, 2 * k);
    for i in 0..k {
        if rng.random_bool(0.5) {
            r[(i, i)] = 0.0;
            r[(k + i, k + i)] = 0.0;
            r[(i, k + i)] = 1.0;
            r[(k + i, i)] = -1.0;
        }
    }
    r
}

/// Graph lagrangians of the standard space for the given symmetric maps.
pub fn graphs(k: usize, gs: &[DMatrix<f64>]) -> (Arc<EpsSpace>, Vec<Lagrangian>) {
    let std = standard_space(k, Sign::Minus).unwrap();
    let ls = gs
        .iter()
        .map(|g| graph_lagrangian(&std.space, &sym(g.clone()), &tol()).unwrap())
        .collect();
    (std.space, ls)
}

/// Carries lagrangians of the standard space into `target` through `p`,
/// scrambling each frame by a random invertible change of basis.
pub fn transport(
    rng: &mut impl Rng,
    target: &Arc<EpsSpace>,
    p: &DMatrix<f64>,
    ls: &[Lagrangian],
) -> Vec<Lagrangian> {
    ls.iter()
        .map(|l| {
            let k = l.dim();
            let change = random_orthogonal(rng, k)
                * DMatrix::from_diagonal(&nalgebra::DVector::from_fn(k, |_, _| {
                    rng.random_range(-0.5..0.5f64).exp()
                }));
            Lagrangian::from_frame(target, p * l.frame() * change, &tol()).unwrap()
        })
        .collect()
}
