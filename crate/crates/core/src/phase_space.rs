//! ε-hermitian spaces and their lagrangian subspaces.
//!
//! The standard space of rank `n'` has coordinates `(a, α) ∈ R^{n'} ⊕ R^{n'}`
//! and Gram matrix `[[0, I], [ε·I, 0]]`, so that
//! `φ((a, α), (b, β)) = ⟨a, β⟩ + ε⟨α, b⟩`. Its two coordinate factors are
//! lagrangian, and the graph `{(u, g·u)}` of `g : R^{n'} → R^{n'}` is
//! lagrangian exactly when `gᵀ = −ε·g`.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::forms::{self, BilinearFormMatrix, Sign, Tolerance};
use crate::linalg;
use crate::subspace::{self, Subspace};

/// A real vector space with a nondegenerate ε-symmetric form.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsSpace {
    form: BilinearFormMatrix,
    standard: bool,
}

impl EpsSpace {
    pub fn new(form: BilinearFormMatrix, tol: &Tolerance) -> Result<Self> {
        let dim = form.dim();
        if !dim.is_multiple_of(2) {
            return Err(Error::OddDimension(dim));
        }
        if !forms::is_nondegenerate(&form, tol) {
            return Err(Error::DegenerateForm);
        }
        let hyperbolic = forms::hyperbolic_form(dim / 2, form.epsilon());
        let standard = linalg::max_abs(&(form.entries() - hyperbolic.entries()))
            <= tol.band(linalg::max_abs(form.entries()));
        Ok(EpsSpace { form, standard })
    }

    /// The hyperbolic space `H(R^{n'})` in standard coordinates.
    pub fn standard(nprime: usize, epsilon: Sign) -> Self {
        EpsSpace {
            form: forms::hyperbolic_form(nprime, epsilon),
            standard: true,
        }
    }

    pub fn form(&self) -> &BilinearFormMatrix {
        &self.form
    }

    pub fn epsilon(&self) -> Sign {
        self.form.epsilon()
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    /// Half the dimension: the dimension of every lagrangian.
    pub fn nprime(&self) -> usize {
        self.form.dim() / 2
    }

    /// Whether the Gram matrix is the standard hyperbolic one.
    pub fn is_standard(&self) -> bool {
        self.standard
    }

    pub fn direct_sum(&self, other: &EpsSpace) -> Result<EpsSpace> {
        let form = forms::direct_sum(&self.form, &other.form)?;
        let hyperbolic = forms::hyperbolic_form(form.dim() / 2, form.epsilon());
        let standard = form.entries() == hyperbolic.entries();
        Ok(EpsSpace { form, standard })
    }

    /// A basis `P = [e₁ … e_{n'}, f₁ … f_{n'}]` with `Pᵀ M P` equal to the
    /// standard hyperbolic matrix, built by symplectic Gram–Schmidt with
    /// pivoting on the coordinate vectors. Returns the identity for the
    /// standard space. Only defined for skew forms.
    pub fn symplectic_frame(&self) -> Result<DMatrix<f64>> {
        if self.epsilon() != Sign::Minus {
            return Err(Error::EpsilonMismatch);
        }
        let n = self.dim();
        let k = self.nprime();
        if self.standard {
            return Ok(DMatrix::identity(n, n));
        }
        let m = self.form.entries();
        let omega = |x: &DMatrix<f64>, y: &DMatrix<f64>| (x.transpose() * m * y)[(0, 0)];
        let mut pool: Vec<DMatrix<f64>> = (0..n)
            .map(|i| {
                let mut v = DMatrix::zeros(n, 1);
                v[(i, 0)] = 1.0;
                v
            })
            .collect();
        let mut frame = DMatrix::zeros(n, n);
        for j in 0..k {
            let mut best = (0, 1, 0.0_f64);
            for a in 0..pool.len() {
                for b in (a + 1)..pool.len() {
                    let w = omega(&pool[a], &pool[b]).abs();
                    if w > best.2 {
                        best = (a, b, w);
                    }
                }
            }
            let (a, b, w) = best;
            if w == 0.0 {
                return Err(Error::DegenerateForm);
            }
            let e = pool[a].clone();
            let f = &pool[b] / omega(&e, &pool[b]);
            pool.remove(b);
            pool.remove(a);
            for v in pool.iter_mut() {
                let along_f = omega(v, &f);
                let along_e = omega(v, &e);
                *v = &*v - &e * along_f + &f * along_e;
            }
            frame.set_column(j, &e.column(0));
            frame.set_column(k + j, &f.column(0));
        }
        Ok(frame)
    }

    /// `P⁻¹` for a frame with `Pᵀ M P = H`, using `P⁻¹ = Hᵀ Pᵀ M`.
    pub(crate) fn frame_inverse(&self, frame: &DMatrix<f64>) -> DMatrix<f64> {
        let h = forms::hyperbolic_form(self.nprime(), self.epsilon());
        h.entries().transpose() * frame.transpose() * self.form.entries()
    }
}

/// A validated lagrangian subspace of an [`EpsSpace`].
///
/// Besides the orthonormal basis, the lagrangian keeps the spanning frame it
/// was built from (user input, `[I; g]` for graphs, ...). Leray–Kashiwara
/// matrices are assembled in that frame.
#[derive(Debug, Clone)]
pub struct Lagrangian {
    space: Arc<EpsSpace>,
    subspace: Subspace,
    frame: DMatrix<f64>,
    residual: f64,
}

impl Lagrangian {
    /// Builds a lagrangian from `n'` spanning columns.
    pub fn from_frame(space: &Arc<EpsSpace>, frame: DMatrix<f64>, tol: &Tolerance) -> Result<Self> {
        if frame.nrows() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: frame.nrows(),
            });
        }
        if frame.ncols() != space.nprime() {
            return Err(Error::WrongDimension {
                expected: space.nprime(),
                found: frame.ncols(),
            });
        }
        if frame.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite basis entry".into()));
        }
        let subspace = Subspace::canonicalize(&frame, tol);
        let mut lag = validate_lagrangian(space, &subspace, tol)?;
        lag.frame = frame;
        Ok(lag)
    }

    pub fn space(&self) -> &Arc<EpsSpace> {
        &self.space
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    /// Spanning frame used for coordinates on the lagrangian.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// Orthonormal basis.
    pub fn basis(&self) -> &DMatrix<f64> {
        self.subspace.basis()
    }

    /// `max |Bᵀ M B|` over the orthonormal basis.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn same_space(&self, other: &Lagrangian) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || self.space == other.space
    }

    pub fn equals(&self, other: &Lagrangian, tol: &Tolerance) -> bool {
        subspace::subspace_equal(&self.subspace, &other.subspace, tol)
    }

    /// Image under a linear map into `target`, revalidated there.
    pub fn map_into(
        &self,
        target: &Arc<EpsSpace>,
        map: &DMatrix<f64>,
        tol: &Tolerance,
    ) -> Result<Lagrangian> {
        if map.ncols() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: map.ncols(),
            });
        }
        Lagrangian::from_frame(target, map * &self.frame, tol)
    }

    /// `self ⊕ other` inside `target = self.space ⊕ other.space`.
    pub fn direct_sum(
        &self,
        other: &Lagrangian,
        target: &Arc<EpsSpace>,
        tol: &Tolerance,
    ) -> Result<Lagrangian> {
        let frame = linalg::block_diagonal(&self.frame, &other.frame);
        Lagrangian::from_frame(target, frame, tol)
    }
}

fn isotropy_residual(form: &BilinearFormMatrix, basis: &DMatrix<f64>) -> f64 {
    linalg::max_abs(&form.eval(basis, basis))
}

/// Checks that `candidate` has dimension `n'` and is isotropic.
pub fn validate_lagrangian(
    space: &Arc<EpsSpace>,
    candidate: &Subspace,
    tol: &Tolerance,
) -> Result<Lagrangian> {
    if candidate.ambient_dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: candidate.ambient_dim(),
        });
    }
    if candidate.dim() != space.nprime() {
        return Err(Error::WrongDimension {
            expected: space.nprime(),
            found: candidate.dim(),
        });
    }
    let residual = isotropy_residual(space.form(), candidate.basis());
    if residual > tol.band(linalg::max_abs(space.form().entries())) {
        return Err(Error::NotIsotropic { residual });
    }
    Ok(Lagrangian {
        space: Arc::clone(space),
        subspace: candidate.clone(),
        frame: candidate.basis().clone(),
        residual,
    })
}

pub fn are_transversal(l1: &Lagrangian, l2: &Lagrangian, tol: &Tolerance) -> Result<bool> {
    if !l1.same_space(l2) {
        return Err(Error::SpaceMismatch);
    }
    Ok(subspace::intersect(l1.subspace(), l2.subspace(), tol)?.dim() == 0)
}

/// The standard space together with its factors `L = span(a)` and
/// `L* = span(α)`.
#[derive(Debug, Clone)]
pub struct StandardSpace {
    pub space: Arc<EpsSpace>,
    pub l_factor: Lagrangian,
    pub lstar_factor: Lagrangian,
}

pub fn standard_space(nprime: usize, epsilon: Sign) -> Result<StandardSpace> {
    if nprime == 0 {
        return Err(Error::InvalidParameter("nprime must be at least 1".into()));
    }
    let space = Arc::new(EpsSpace::standard(nprime, epsilon));
    let (l_factor, lstar_factor) = factors(&space);
    Ok(StandardSpace {
        space,
        l_factor,
        lstar_factor,
    })
}

fn factor_frame(nprime: usize, second: bool) -> DMatrix<f64> {
    let mut frame = DMatrix::zeros(2 * nprime, nprime);
    let offset = if second { nprime } else { 0 };
    for i in 0..nprime {
        frame[(offset + i, i)] = 1.0;
    }
    frame
}

/// The two coordinate factors of a standard space.
pub(crate) fn factors(space: &Arc<EpsSpace>) -> (Lagrangian, Lagrangian) {
    let k = space.nprime();
    let make = |second: bool| {
        let frame = factor_frame(k, second);
        Lagrangian {
            space: Arc::clone(space),
            subspace: Subspace::from_orthonormal(frame.clone()),
            frame,
            residual: 0.0,
        }
    };
    (make(false), make(true))
}

/// A map `g : L → L*` whose graph is lagrangian in the standard space of
/// sign `ε`, i.e. `gᵀ = −ε·g`: symmetric for symplectic spaces, skew for
/// symmetric ones.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMap {
    entries: DMatrix<f64>,
    epsilon: Sign,
}

impl GraphMap {
    pub fn new(entries: DMatrix<f64>, epsilon: Sign, tol: &Tolerance) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::NonSquare { rows, cols });
        }
        let residual = linalg::max_abs(&(entries.transpose() + &entries * epsilon.value()));
        if residual > tol.band(linalg::max_abs(&entries)) {
            return Err(Error::SymmetryViolation { residual });
        }
        Ok(GraphMap { entries, epsilon })
    }

    /// Symmetric map, for symplectic spaces.
    pub fn symmetric(entries: DMatrix<f64>, tol: &Tolerance) -> Result<Self> {
        GraphMap::new(entries, Sign::Minus, tol)
    }

    /// Skew map, for symmetric spaces.
    pub fn skew(entries: DMatrix<f64>, tol: &Tolerance) -> Result<Self> {
        GraphMap::new(entries, Sign::Plus, tol)
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Sign of the space the graph lives in.
    pub fn epsilon(&self) -> Sign {
        self.epsilon
    }

    pub fn nprime(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_invertible(&self, tol: &Tolerance) -> bool {
        linalg::numerical_rank(&self.entries, tol) == self.nprime()
    }

    /// Signature of a symmetric graph map.
    pub fn signature(&self, tol: &Tolerance) -> Result<forms::Signature> {
        if self.epsilon != Sign::Minus {
            return Err(Error::SkewSignature);
        }
        Ok(forms::symmetric_signature(&self.entries, tol))
    }
}

/// `{(u, g·u)}` in the standard space, with frame `[I; g]`.
pub fn graph_lagrangian(
    space: &Arc<EpsSpace>,
    g: &GraphMap,
    tol: &Tolerance,
) -> Result<Lagrangian> {
    if !space.is_standard() {
        return Err(Error::NotStandardSpace);
    }
    if g.epsilon() != space.epsilon() {
        return Err(Error::EpsilonMismatch);
    }
    let k = space.nprime();
    if g.nprime() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: g.nprime(),
        });
    }
    let mut frame = DMatrix::zeros(2 * k, k);
    frame.view_mut((0, 0), (k, k)).fill_with_identity();
    frame.view_mut((k, 0), (k, k)).copy_from(g.entries());
    Lagrangian::from_frame(space, frame, tol)
}

/// The unique `g` with `l3 = graph(g)`.
pub fn extract_graph_map(
    space: &Arc<EpsSpace>,
    l3: &Lagrangian,
    tol: &Tolerance,
) -> Result<GraphMap> {
    if !space.is_standard() {
        return Err(Error::NotStandardSpace);
    }
    if l3.space().as_ref() != space.as_ref() {
        return Err(Error::SpaceMismatch);
    }
    let (_, lstar) = factors(space);
    if subspace::intersect(l3.subspace(), lstar.subspace(), tol)?.dim() != 0 {
        return Err(Error::NotTransversalToLstar);
    }
    let k = space.nprime();
    let basis = l3.basis();
    let top = basis.rows(0, k).into_owned();
    let bottom = basis.rows(k, k).into_owned();
    if linalg::numerical_rank(&top, tol) < k {
        return Err(Error::NotTransversalToLstar);
    }
    // g·X = Y  ⇔  Xᵀ gᵀ = Yᵀ
    let g_t = linalg::solve_least_squares(&top.transpose(), &bottom.transpose());
    let g = g_t.transpose();
    // Project onto exact (−ε)-symmetry.
    let eps = space.epsilon().value();
    let g = (&g - g.transpose() * eps) * 0.5;
    GraphMap::new(g, space.epsilon(), tol)
}

/// Which factor of the added hyperbolic summand a lagrangian is extended by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HyperbolicSummand {
    Factor,
    DualFactor,
}

/// Stabilization `E → E ⊕ H(R^k)`, extending every lagrangian by the first
/// factor `R^k` of the hyperbolic summand.
pub fn stabilize(
    space: &Arc<EpsSpace>,
    lagrangians: &[Lagrangian],
    rank: usize,
    tol: &Tolerance,
) -> Result<(Arc<EpsSpace>, Vec<Lagrangian>)> {
    let tagged: Vec<_> = lagrangians
        .iter()
        .map(|l| (l.clone(), HyperbolicSummand::Factor))
        .collect();
    stabilize_with(space, &tagged, rank, tol)
}

/// Stabilization with an explicit summand choice per lagrangian.
pub fn stabilize_with(
    space: &Arc<EpsSpace>,
    lagrangians: &[(Lagrangian, HyperbolicSummand)],
    rank: usize,
    tol: &Tolerance,
) -> Result<(Arc<EpsSpace>, Vec<Lagrangian>)> {
    let hyperbolic = standard_space(rank, space.epsilon())?;
    let target = Arc::new(space.direct_sum(&hyperbolic.space)?);
    let mut out = Vec::with_capacity(lagrangians.len());
    for (l, summand) in lagrangians {
        if l.space().as_ref() != space.as_ref() {
            return Err(Error::SpaceMismatch);
        }
        let extra = match summand {
            HyperbolicSummand::Factor => &hyperbolic.l_factor,
            HyperbolicSummand::DualFactor => &hyperbolic.lstar_factor,
        };
        out.push(l.direct_sum(extra, &target, tol)?);
    }
    Ok((target, out))
}

/// A change of basis `P` from the standard space onto a space carrying a
/// transversal pair, with `Pᵀ M P = [[0, I], [ε·I, 0]]`.
///
/// The first `n'` columns span `l1` and the last `n'` span `l2`, so `P`
/// carries `L` onto `l1` and `L*` onto `l2`.
#[derive(Debug, Clone)]
pub struct DarbouxFrame {
    pub space: Arc<EpsSpace>,
    pub standard: Arc<EpsSpace>,
    pub matrix: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    /// `max |Pᵀ M P − H|`.
    pub residual: f64,
}

impl DarbouxFrame {
    /// Expresses a lagrangian of the original space in standard coordinates.
    pub fn pull_back(&self, l: &Lagrangian, tol: &Tolerance) -> Result<Lagrangian> {
        if l.space().as_ref() != self.space.as_ref() {
            return Err(Error::SpaceMismatch);
        }
        l.map_into(&self.standard, &self.inverse, tol)
    }

    /// Maps a lagrangian of the standard space back into the original space.
    pub fn push_forward(&self, l: &Lagrangian, tol: &Tolerance) -> Result<Lagrangian> {
        if l.space().as_ref() != self.standard.as_ref() {
            return Err(Error::SpaceMismatch);
        }
        l.map_into(&self.space, &self.matrix, tol)
    }
}

/// Normalizes a transversal pair to the standard pair `(L, L*)`.
///
/// Takes the orthonormal basis `A` of `l1`, any basis `B` of `l2`, and sets
/// `P = [A, B·(Aᵀ M B)⁻¹]`.
pub fn darboux_pair_normalization(
    space: &Arc<EpsSpace>,
    l1: &Lagrangian,
    l2: &Lagrangian,
    tol: &Tolerance,
) -> Result<DarbouxFrame> {
    if l1.space().as_ref() != space.as_ref() || l2.space().as_ref() != space.as_ref() {
        return Err(Error::SpaceMismatch);
    }
    if !are_transversal(l1, l2, tol)? {
        return Err(Error::NotTransversal);
    }
    let k = space.nprime();
    let a = l1.basis();
    let b = l2.basis();
    let pairing = space.form().eval(a, b);
    let dual = pairing.try_inverse().ok_or(Error::NotTransversal)?;
    let mut p = DMatrix::zeros(2 * k, 2 * k);
    p.columns_mut(0, k).copy_from(a);
    p.columns_mut(k, k).copy_from(&(b * dual));

    let standard = Arc::new(EpsSpace::standard(k, space.epsilon()));
    let h = forms::hyperbolic_form(k, space.epsilon());
    let residual = linalg::max_abs(&(space.form().eval(&p, &p) - h.entries()));
    let inverse = space.frame_inverse(&p);
    Ok(DarbouxFrame {
        space: Arc::clone(space),
        standard,
        matrix: p,
        inverse,
        residual,
    })
}

/// The real form of multiplication by `e^{iθ}` on `C^{n'}` in coordinates
/// `(a, α) ↔ a + iα`: `[[cos θ·I, −sin θ·I], [sin θ·I, cos θ·I]]`. It is
/// orthogonal and preserves the standard symplectic form.
pub fn complex_rotation(nprime: usize, theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    let mut r = DMatrix::zeros(2 * nprime, 2 * nprime);
    for i in 0..nprime {
        r[(i, i)] = c;
        r[(nprime + i, nprime + i)] = c;
        r[(i, nprime + i)] = -s;
        r[(nprime + i, i)] = s;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn col(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(v.len(), 1, v)
    }

    #[test]
    fn standard_spaces() {
        let s = standard_space(1, Sign::Minus).unwrap();
        assert_eq!(
            s.space.form().entries(),
            &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
        );
        assert!(s.l_factor.equals(
            &Lagrangian::from_frame(&s.space, col(&[1.0, 0.0]), &tol()).unwrap(),
            &tol()
        ));
        let s = standard_space(2, Sign::Plus).unwrap();
        assert_eq!(
            forms::signature(s.space.form(), &tol()).unwrap(),
            forms::Signature::new(2, 2, 0)
        );
        for k in 1..=6 {
            for eps in [Sign::Plus, Sign::Minus] {
                let s = standard_space(k, eps).unwrap();
                assert!(are_transversal(&s.l_factor, &s.lstar_factor, &tol()).unwrap());
            }
        }
        assert!(standard_space(0, Sign::Minus).is_err());
    }

    #[test]
    fn validation_examples() {
        let s = standard_space(1, Sign::Minus).unwrap();
        assert!(Lagrangian::from_frame(&s.space, col(&[1.0, 1.0]), &tol()).is_ok());

        let s = standard_space(2, Sign::Plus).unwrap();
        let e12 = Subspace::coordinate(4, &[0, 1]);
        assert!(validate_lagrangian(&s.space, &e12, &tol()).is_ok());
        let e13 = Subspace::coordinate(4, &[0, 2]);
        assert!(matches!(
            validate_lagrangian(&s.space, &e13, &tol()),
            Err(Error::NotIsotropic { .. })
        ));
        let e1 = Subspace::coordinate(4, &[0]);
        assert_eq!(
            validate_lagrangian(&s.space, &e1, &tol()).unwrap_err(),
            Error::WrongDimension {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn transversality_examples() {
        let s = standard_space(1, Sign::Minus).unwrap();
        assert!(are_transversal(&s.l_factor, &s.lstar_factor, &tol()).unwrap());
        assert!(!are_transversal(&s.l_factor, &s.l_factor, &tol()).unwrap());
        let diag = Lagrangian::from_frame(&s.space, col(&[1.0, 1.0]), &tol()).unwrap();
        assert!(are_transversal(&s.l_factor, &diag, &tol()).unwrap());
        let other = standard_space(1, Sign::Plus).unwrap();
        assert_eq!(
            are_transversal(&s.l_factor, &other.l_factor, &tol()),
            Err(Error::SpaceMismatch)
        );
    }

    #[test]
    fn graph_examples() {
        let s = standard_space(1, Sign::Minus).unwrap();
        let zero = GraphMap::symmetric(DMatrix::zeros(1, 1), &tol()).unwrap();
        let l = graph_lagrangian(&s.space, &zero, &tol()).unwrap();
        assert!(l.equals(&s.l_factor, &tol()));

        let one = GraphMap::symmetric(DMatrix::from_element(1, 1, 1.0), &tol()).unwrap();
        let l = graph_lagrangian(&s.space, &one, &tol()).unwrap();
        assert!(are_transversal(&l, &s.l_factor, &tol()).unwrap());
        assert!(are_transversal(&l, &s.lstar_factor, &tol()).unwrap());

        // A 1x1 skew map is zero, so its graph is the first factor.
        let s = standard_space(1, Sign::Plus).unwrap();
        let zero = GraphMap::skew(DMatrix::zeros(1, 1), &tol()).unwrap();
        let l = graph_lagrangian(&s.space, &zero, &tol()).unwrap();
        assert!(!are_transversal(&l, &s.l_factor, &tol()).unwrap());
        assert!(GraphMap::skew(DMatrix::from_element(1, 1, 1.0), &tol()).is_err());
    }

    #[test]
    fn graph_requires_symmetry() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(
            GraphMap::symmetric(m, &tol()),
            Err(Error::SymmetryViolation { .. })
        ));
    }

    #[test]
    fn extraction_examples() {
        let s = standard_space(1, Sign::Minus).unwrap();
        let l = Lagrangian::from_frame(&s.space, col(&[1.0, 2.0]), &tol()).unwrap();
        let g = extract_graph_map(&s.space, &l, &tol()).unwrap();
        assert!((g.entries()[(0, 0)] - 2.0).abs() < 1e-14);
        assert_eq!(
            extract_graph_map(&s.space, &s.lstar_factor, &tol()).unwrap_err(),
            Error::NotTransversalToLstar
        );
    }

    #[test]
    fn stabilization_examples() {
        let s = standard_space(1, Sign::Minus).unwrap();
        let (big, ls) = stabilize(&s.space, std::slice::from_ref(&s.l_factor), 1, &tol()).unwrap();
        assert_eq!(big.dim(), 4);
        assert_eq!(ls[0].dim(), 2);
        assert!(ls[0].residual() < 1e-12);

        let (_, ls) = stabilize_with(
            &s.space,
            &[
                (s.l_factor.clone(), HyperbolicSummand::Factor),
                (s.lstar_factor.clone(), HyperbolicSummand::DualFactor),
            ],
            1,
            &tol(),
        )
        .unwrap();
        assert!(are_transversal(&ls[0], &ls[1], &tol()).unwrap());

        // Extending both by the same factor creates a common direction.
        let (_, ls) = stabilize(
            &s.space,
            &[s.l_factor.clone(), s.lstar_factor.clone()],
            1,
            &tol(),
        )
        .unwrap();
        assert!(!are_transversal(&ls[0], &ls[1], &tol()).unwrap());
    }

    #[test]
    fn darboux_of_standard_pair_is_a_signed_permutation() {
        let s = standard_space(1, Sign::Minus).unwrap();
        let frame =
            darboux_pair_normalization(&s.space, &s.lstar_factor, &s.l_factor, &tol()).unwrap();
        assert_eq!(frame.residual, 0.0);
        for x in frame.matrix.iter() {
            assert!(*x == 0.0 || x.abs() == 1.0);
        }
    }

    #[test]
    fn darboux_of_diagonal_pair() {
        let s = standard_space(1, Sign::Minus).unwrap();
        let l1 = Lagrangian::from_frame(&s.space, col(&[1.0, 1.0]), &tol()).unwrap();
        let l2 = Lagrangian::from_frame(&s.space, col(&[1.0, -1.0]), &tol()).unwrap();
        let frame = darboux_pair_normalization(&s.space, &l1, &l2, &tol()).unwrap();
        assert!(frame.residual < 1e-10);
        let back = frame.pull_back(&l1, &tol()).unwrap();
        let (l, lstar) = factors(&frame.standard);
        assert!(back.equals(&l, &tol()));
        assert!(frame.pull_back(&l2, &tol()).unwrap().equals(&lstar, &tol()));
        assert_eq!(
            darboux_pair_normalization(&s.space, &l1, &l1, &tol()).unwrap_err(),
            Error::NotTransversal
        );
    }

    #[test]
    fn symplectic_frame_of_scrambled_form() {
        let p = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 2.0, 0.0, 1.0, 0.0, 1.0, 3.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 2.0,
            ],
        );
        let h = forms::hyperbolic_form(2, Sign::Minus);
        let form = h.congruent(&p).unwrap();
        let space = EpsSpace::new(form, &tol()).unwrap();
        assert!(!space.is_standard());
        let frame = space.symplectic_frame().unwrap();
        let back = space.form().eval(&frame, &frame);
        assert!(linalg::max_abs(&(back - h.entries())) < 1e-12);
        let inv = space.frame_inverse(&frame);
        assert!((inv * &frame - DMatrix::<f64>::identity(4, 4)).norm() < 1e-12);
    }
}
