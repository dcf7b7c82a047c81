//! The Leray–Kashiwara form of a lagrangian triple.
//!
//! On `F = L₁ ⊕ L₂ ⊕ L₃` the quadratic form
//! `q(x) = φ(x₁, x₂) + φ(x₂, x₃) + φ(x₃, x₁)` polarizes to the symmetric form
//!
//! ```text
//! Ψ(x, y) = φ(x₁,y₂) + φ(y₁,x₂) + φ(x₂,y₃) + φ(y₂,x₃) + φ(x₃,y₁) + φ(y₃,x₁)
//! ```
//!
//! with `Ψ(x, x) = 2·q(x)`. In the frames `B₁, B₂, B₃` of the three
//! lagrangians and with `Φᵢⱼ = Bᵢᵀ M Bⱼ` its matrix is
//!
//! ```text
//! [[ 0,    Φ₁₂,  Φ₃₁ᵀ],
//!  [ Φ₁₂ᵀ, 0,    Φ₂₃ ],
//!  [ Φ₃₁,  Φ₂₃ᵀ, 0   ]]
//! ```
//!
//! `Ψ` is nondegenerate exactly when the triple is pairwise transversal. Its
//! signature is the triple index, and `(rank Ψ − 2n', signature Ψ)` is the
//! class of `[Ψ] − H(L₁)`.
//!
//! Note: the printed alternating-sign version of the polarization vanishes
//! on the diagonal; the all-plus version above is the one whose restriction to
//! `E₃ = {x₁ + x₂ = x₃}` is `−2⟨u, g·v⟩`.

use std::ops::Add;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::forms::{self, BilinearFormMatrix, Sign, Signature, Tolerance};
use crate::linalg;
use crate::phase_space::{self, are_transversal, EpsSpace, GraphMap, Lagrangian};
use crate::subspace::{self, Subspace};

/// Gram matrix of `Ψ` on `L₁ ⊕ L₂ ⊕ L₃`, in the lagrangians' frames.
#[derive(Debug, Clone, PartialEq)]
pub struct KashiwaraForm {
    pub matrix: BilinearFormMatrix,
    pub block_dim: usize,
}

impl KashiwaraForm {
    pub fn entries(&self) -> &DMatrix<f64> {
        self.matrix.entries()
    }

    pub fn signature(&self, tol: &Tolerance) -> Signature {
        forms::symmetric_signature(self.matrix.entries(), tol)
    }

    /// Diagonal `n'×n'` block of slot `i` (0-based).
    pub fn diagonal_block(&self, i: usize) -> DMatrix<f64> {
        let k = self.block_dim;
        self.entries().view((i * k, i * k), (k, k)).into_owned()
    }
}

fn check_triple(space: &EpsSpace, ls: [&Lagrangian; 3]) -> Result<()> {
    if space.epsilon() != Sign::Minus {
        return Err(Error::EpsilonMismatch);
    }
    if ls.iter().any(|l| l.space().as_ref() != space) {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

pub fn kashiwara_bilinear(
    space: &EpsSpace,
    l1: &Lagrangian,
    l2: &Lagrangian,
    l3: &Lagrangian,
) -> Result<KashiwaraForm> {
    check_triple(space, [l1, l2, l3])?;
    let k = space.nprime();
    let form = space.form();
    let phi12 = form.eval(l1.frame(), l2.frame());
    let phi23 = form.eval(l2.frame(), l3.frame());
    let phi31 = form.eval(l3.frame(), l1.frame());

    let mut psi = DMatrix::zeros(3 * k, 3 * k);
    let mut put = |row: usize, col: usize, block: &DMatrix<f64>| {
        psi.view_mut((row * k, col * k), (k, k)).copy_from(block);
    };
    put(0, 1, &phi12);
    put(1, 0, &phi12.transpose());
    put(1, 2, &phi23);
    put(2, 1, &phi23.transpose());
    put(2, 0, &phi31);
    put(0, 2, &phi31.transpose());

    Ok(KashiwaraForm {
        matrix: BilinearFormMatrix::new(psi, Sign::Plus, &Tolerance::default())?,
        block_dim: k,
    })
}

/// Kernel vector of `Ψ` built from a common direction of two lagrangians.
#[derive(Debug, Clone, PartialEq)]
pub struct RadicalWitness {
    /// Coordinates on `L₁ ⊕ L₂ ⊕ L₃`.
    pub vector: DMatrix<f64>,
    /// 1-based slots of the intersecting pair.
    pub pair: (usize, usize),
    /// Unit vector of the ambient space lying in both lagrangians.
    pub carrier: DMatrix<f64>,
    /// `‖Ψ·w‖ / ‖w‖`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransversalityCriterion {
    /// Transversality of the pairs (1,2), (1,3), (2,3).
    pub pairs: [bool; 3],
    pub pairwise_transversal: bool,
    pub form_nondegenerate: bool,
    pub witness: Option<RadicalWitness>,
}

impl TransversalityCriterion {
    /// The two independent criteria agree.
    pub fn is_consistent(&self) -> bool {
        self.pairwise_transversal == self.form_nondegenerate
    }
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Decides transversality twice: through pairwise intersections and through
/// the numerical rank of `Ψ`. When a pair `(i, j)` meets in `y ≠ 0`, the
/// witness carries the coordinates of `y` in slots `i` and `j` and zero in
/// the third slot.
pub fn transversality_criterion(
    space: &EpsSpace,
    l1: &Lagrangian,
    l2: &Lagrangian,
    l3: &Lagrangian,
    tol: &Tolerance,
) -> Result<TransversalityCriterion> {
    let psi = kashiwara_bilinear(space, l1, l2, l3)?;
    let ls = [l1, l2, l3];
    let k = space.nprime();

    let mut pairs = [true; 3];
    let mut witness = None;
    for (slot, &(i, j)) in PAIRS.iter().enumerate() {
        let common = subspace::intersect(ls[i].subspace(), ls[j].subspace(), tol)?;
        if common.dim() == 0 {
            continue;
        }
        pairs[slot] = false;
        if witness.is_none() {
            let carrier = common.basis().columns(0, 1).into_owned();
            let mut vector = DMatrix::zeros(3 * k, 1);
            for &s in &[i, j] {
                let coords = linalg::solve_least_squares(ls[s].frame(), &carrier);
                vector.view_mut((s * k, 0), (k, 1)).copy_from(&coords);
            }
            let residual = (psi.entries() * &vector).norm() / vector.norm();
            witness = Some(RadicalWitness {
                vector,
                pair: (i + 1, j + 1),
                carrier,
                residual,
            });
        }
    }

    Ok(TransversalityCriterion {
        pairs,
        pairwise_transversal: pairs.iter().all(|&p| p),
        form_nondegenerate: forms::is_nondegenerate(&psi.matrix, tol),
        witness,
    })
}

/// Signature of `Ψ`, zero eigenvalues excluded. For degenerate triples this
/// is the signature of the form induced on the quotient by the radical.
pub fn triple_index(
    space: &EpsSpace,
    l1: &Lagrangian,
    l2: &Lagrangian,
    l3: &Lagrangian,
    tol: &Tolerance,
) -> Result<i64> {
    Ok(kashiwara_bilinear(space, l1, l2, l3)?
        .signature(tol)
        .index())
}

/// Residuals of the orthogonal splitting `F = H(L₁) ⊥ E₃` for the normalized
/// triple `(L₁, L₂, L₃) = (L, L*, graph g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingReport {
    pub nprime: usize,
    /// `Ψ` on `{(x₁, x₂, 0)}` against the hyperbolic form `[[0, I], [I, 0]]`.
    pub hyperbolic_residual: f64,
    /// `Ψ(H(L₁), E₃)`, which must vanish.
    pub orthogonality_residual: f64,
    /// The `Ψ`-orthogonal of `H(L₁)` coincides with `E₃`.
    pub complement_matches: bool,
    /// `Ψ|E₃ + 2g`.
    pub restriction_residual: f64,
    pub restricted_form: DMatrix<f64>,
    pub psi_signature: Signature,
    pub graph_signature: Signature,
}

impl SplittingReport {
    pub fn max_residual(&self) -> f64 {
        self.hyperbolic_residual
            .max(self.orthogonality_residual)
            .max(self.restriction_residual)
    }
}

/// Checks the splitting for the triple `(L, L*, graph g)` of the standard
/// symplectic space. `E₃ = {(x₁, x₂, x₃) : x₁ + x₂ = x₃}` is parametrized by
/// `u ↦ (u, g·u, u)` in the frames `[I; 0]`, `[0; I]`, `[I; g]`. Residuals
/// are relative to `max(1, max |Ψ|)`.
pub fn verify_splitting(nprime: usize, g: &GraphMap, tol: &Tolerance) -> Result<SplittingReport> {
    if g.epsilon() != Sign::Minus {
        return Err(Error::EpsilonMismatch);
    }
    if g.nprime() != nprime {
        return Err(Error::DimensionMismatch {
            expected: nprime,
            found: g.nprime(),
        });
    }
    if !g.is_invertible(tol) {
        return Err(Error::NotInvertible);
    }
    let std = phase_space::standard_space(nprime, Sign::Minus)?;
    let graph = phase_space::graph_lagrangian(&std.space, g, tol)?;
    let psi = kashiwara_bilinear(&std.space, &std.l_factor, &std.lstar_factor, &graph)?;
    let m = psi.entries();
    let k = nprime;
    let scale = linalg::max_abs(m).max(1.0);

    let hyperbolic = forms::hyperbolic_form(k, Sign::Plus);
    let hyperbolic_residual =
        linalg::max_abs(&(m.view((0, 0), (2 * k, 2 * k)) - hyperbolic.entries())) / scale;

    let mut e3 = DMatrix::zeros(3 * k, k);
    e3.view_mut((0, 0), (k, k)).fill_with_identity();
    e3.view_mut((k, 0), (k, k)).copy_from(g.entries());
    e3.view_mut((2 * k, 0), (k, k)).fill_with_identity();
    let psi_e3 = m * &e3;
    let orthogonality_residual = linalg::max_abs(&psi_e3.rows(0, 2 * k).into_owned()) / scale;

    let h_slots = Subspace::coordinate(3 * k, &(0..2 * k).collect::<Vec<_>>());
    let complement = subspace::orthogonal_complement_wrt(&psi.matrix, &h_slots, tol)?;
    let complement_matches =
        subspace::subspace_equal(&complement, &Subspace::canonicalize(&e3, tol), tol);

    let restricted_form = e3.transpose() * &psi_e3;
    let restriction_residual = linalg::max_abs(&(&restricted_form + g.entries() * 2.0)) / scale;

    Ok(SplittingReport {
        nprime,
        hyperbolic_residual,
        orthogonality_residual,
        complement_matches,
        restriction_residual,
        restricted_form,
        psi_signature: psi.signature(tol),
        graph_signature: g.signature(tol)?,
    })
}

/// Fiber-scale class of `[Ψ] − H(L₁)`: rank and signature of `Ψ` minus those
/// of the hyperbolic form on `L₁ ⊕ L₁*` (rank `2n'`, signature 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LKClass {
    pub rank_delta: i64,
    pub signature: i64,
}

impl Add for LKClass {
    type Output = LKClass;

    fn add(self, rhs: LKClass) -> LKClass {
        LKClass {
            rank_delta: self.rank_delta + rhs.rank_delta,
            signature: self.signature + rhs.signature,
        }
    }
}

pub fn lk_invariant(
    space: &EpsSpace,
    l1: &Lagrangian,
    l2: &Lagrangian,
    l3: &Lagrangian,
    tol: &Tolerance,
) -> Result<LKClass> {
    let criterion = transversality_criterion(space, l1, l2, l3, tol)?;
    if !criterion.pairwise_transversal || !criterion.form_nondegenerate {
        return Err(Error::NotTransversalTriple);
    }
    let sig = kashiwara_bilinear(space, l1, l2, l3)?.signature(tol);
    Ok(LKClass {
        rank_delta: sig.rank() as i64 - 2 * space.nprime() as i64,
        signature: sig.index(),
    })
}

/// Pairwise transversality of a list of lagrangians.
pub fn all_pairwise_transversal(ls: &[&Lagrangian], tol: &Tolerance) -> Result<bool> {
    for (i, a) in ls.iter().enumerate() {
        for b in &ls[i + 1..] {
            if !are_transversal(a, b, tol)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
