//! Explicit homotopies that bring lagrangians into mutually transversal
//! position.
//!
//! In the standard space every lagrangian transversal to `L*` is a graph
//! `{(u, g·u)}`, so deforming lagrangians amounts to deforming graph maps.
//! The paths here are linear in `g` and sampled uniformly in `t ∈ [0, 1]`:
//!
//! * symmetric `g` (symplectic case): `g(t) = (1 − t)·g + t·n·I`. The identity
//!   is a metric on `L`, and `n·I − p·I` is invertible for `n ≠ p`, so the
//!   endpoints are pairwise transversal and transversal to both factors;
//! * skew `g` (symmetric case): same with `I` replaced by the standard skew
//!   form `Ω₀`, after doubling `L` when its rank is odd.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::forms::{Sign, Tolerance};
use crate::phase_space::{
    self, are_transversal, complex_rotation, graph_lagrangian, EpsSpace, GraphMap, Lagrangian,
};
use crate::subspace;

/// Largest principal angle allowed between consecutive samples.
pub const CONTINUITY_LIMIT: f64 = FRAC_PI_4;

/// Number of candidate angles scanned by [`make_transversal_pair`].
pub const ROTATION_CANDIDATES: usize = 64;

#[derive(Debug, Clone)]
pub struct PathSample {
    pub t: f64,
    pub lagrangian: Lagrangian,
}

/// A sampled one-parameter family of lagrangians over `t ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct LagrangianPath {
    space: Arc<EpsSpace>,
    samples: Vec<PathSample>,
}

impl LagrangianPath {
    /// Checks the parameter grid, the common space and the continuity guard.
    pub fn new(samples: Vec<PathSample>) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::InvalidParameter("path has no samples".into()));
        };
        let space = Arc::clone(first.lagrangian.space());
        if first.t != 0.0 || samples.last().map(|s| s.t) != Some(1.0) {
            return Err(Error::InvalidParameter(
                "path parameters must run from 0 to 1".into(),
            ));
        }
        for (i, pair) in samples.windows(2).enumerate() {
            if !(pair[1].t > pair[0].t) {
                return Err(Error::InvalidParameter(format!(
                    "path parameters not increasing at sample {}",
                    i + 1
                )));
            }
            if !pair[1].lagrangian.same_space(&pair[0].lagrangian) {
                return Err(Error::SpaceMismatch);
            }
            let angle = subspace::max_principal_angle(
                pair[0].lagrangian.subspace(),
                pair[1].lagrangian.subspace(),
            )?;
            if angle >= CONTINUITY_LIMIT {
                return Err(Error::SamplingTooCoarse {
                    step: i,
                    increment: angle,
                    limit: CONTINUITY_LIMIT,
                });
            }
        }
        Ok(LagrangianPath { space, samples })
    }

    pub fn space(&self) -> &Arc<EpsSpace> {
        &self.space
    }

    pub fn samples(&self) -> &[PathSample] {
        &self.samples
    }

    pub fn start(&self) -> &Lagrangian {
        &self.samples[0].lagrangian
    }

    pub fn end(&self) -> &Lagrangian {
        &self.samples[self.samples.len() - 1].lagrangian
    }

    /// Largest isotropy residual over all samples.
    pub fn max_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.lagrangian.residual())
            .fold(0.0, f64::max)
    }

    /// Image of every sample under a linear map into `target`.
    pub fn map_into(
        &self,
        target: &Arc<EpsSpace>,
        map: &DMatrix<f64>,
        tol: &Tolerance,
    ) -> Result<LagrangianPath> {
        let samples = self
            .samples
            .iter()
            .map(|s| {
                Ok(PathSample {
                    t: s.t,
                    lagrangian: s.lagrangian.map_into(target, map, tol)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LagrangianPath::new(samples)
    }
}

/// `steps` uniformly spaced parameters from 0 to 1 inclusive.
pub fn sample_times(steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { 1.0 } else { i as f64 / last })
        .collect())
}

/// Graphs of `(1 − t)·start + t·target` in the standard space.
pub fn linear_graph_path(
    space: &Arc<EpsSpace>,
    start: &GraphMap,
    target: &GraphMap,
    steps: usize,
    tol: &Tolerance,
) -> Result<LagrangianPath> {
    if start.epsilon() != target.epsilon() {
        return Err(Error::EpsilonMismatch);
    }
    let samples = sample_times(steps)?
        .into_iter()
        .map(|t| {
            let g = start.entries() * (1.0 - t) + target.entries() * t;
            let g = GraphMap::new(g, start.epsilon(), tol)?;
            Ok(PathSample {
                t,
                lagrangian: graph_lagrangian(space, &g, tol)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LagrangianPath::new(samples)
}

fn check_graph(g: &GraphMap, nprime: usize, epsilon: Sign) -> Result<()> {
    if g.epsilon() != epsilon {
        return Err(Error::EpsilonMismatch);
    }
    if g.nprime() != nprime {
        return Err(Error::DimensionMismatch {
            expected: nprime,
            found: g.nprime(),
        });
    }
    Ok(())
}

/// Deforms `graph(g)` to `graph(I)`, which is transversal to both factors of
/// the standard symplectic space.
pub fn deform_third_to_transversal(
    nprime: usize,
    g: &GraphMap,
    steps: usize,
    tol: &Tolerance,
) -> Result<LagrangianPath> {
    check_graph(g, nprime, Sign::Minus)?;
    let space = phase_space::standard_space(nprime, Sign::Minus)?.space;
    let target = GraphMap::symmetric(DMatrix::identity(nprime, nprime), tol)?;
    linear_graph_path(&space, g, &target, steps, tol)
}

/// Deforms the graphs of `gs = [g₃, g₄, …]` so that `g_n` ends at `n·I`.
///
/// All paths share one standard space. Their endpoints are pairwise
/// transversal and transversal to both factors.
pub fn deform_family_to_mutually_transversal(
    nprime: usize,
    gs: &[GraphMap],
    steps: usize,
    tol: &Tolerance,
) -> Result<Vec<LagrangianPath>> {
    let space = phase_space::standard_space(nprime, Sign::Minus)?.space;
    gs.iter()
        .enumerate()
        .map(|(k, g)| {
            check_graph(g, nprime, Sign::Minus)?;
            let scale = (k + 3) as f64;
            let target = GraphMap::symmetric(DMatrix::identity(nprime, nprime) * scale, tol)?;
            linear_graph_path(&space, g, &target, steps, tol)
        })
        .collect()
}

/// Whether the symmetric-case deformation had to double the rank first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilizationReport {
    pub stabilized: bool,
    pub original_nprime: usize,
    pub effective_nprime: usize,
}

#[derive(Debug, Clone)]
pub struct SymmetricDeformation {
    pub report: StabilizationReport,
    pub space: Arc<EpsSpace>,
    pub paths: Vec<LagrangianPath>,
}

/// The invertible skew matrix `[[0, I], [−I, 0]]` of even size `m`.
pub fn standard_skew(m: usize) -> DMatrix<f64> {
    let h = m / 2;
    let mut omega = DMatrix::zeros(m, m);
    for i in 0..h {
        omega[(i, h + i)] = 1.0;
        omega[(h + i, i)] = -1.0;
    }
    omega
}

/// Embeds a graph map `g` of `H(L)` into `H(L ⊕ L)` as `diag(g, 0)`.
///
/// This is the graph of `graph(g) ⊕ L` after reordering the coordinates of
/// `H(L) ⊕ H(L)` as `(a, b, α, β)`; the factors `L ⊕ L` and `L* ⊕ L*` become
/// the factors of the doubled standard space.
pub fn double_graph_map(g: &GraphMap, tol: &Tolerance) -> Result<GraphMap> {
    let k = g.nprime();
    let mut doubled = DMatrix::zeros(2 * k, 2 * k);
    doubled.view_mut((0, 0), (k, k)).copy_from(g.entries());
    GraphMap::new(doubled, g.epsilon(), tol)
}

/// Symmetric-form analogue of [`deform_family_to_mutually_transversal`]:
/// skew `g_n` is deformed to `n·Ω₀`, doubling the rank first when it is odd
/// since odd-dimensional skew maps are never invertible.
pub fn deform_family_symmetric(
    nprime: usize,
    gs: &[GraphMap],
    steps: usize,
    tol: &Tolerance,
) -> Result<SymmetricDeformation> {
    for g in gs {
        check_graph(g, nprime, Sign::Plus)?;
    }
    let stabilized = nprime % 2 == 1;
    let effective = if stabilized { 2 * nprime } else { nprime };
    let maps: Vec<GraphMap> = if stabilized {
        gs.iter()
            .map(|g| double_graph_map(g, tol))
            .collect::<Result<_>>()?
    } else {
        gs.to_vec()
    };
    let space = phase_space::standard_space(effective, Sign::Plus)?.space;
    let omega = standard_skew(effective);
    let paths = maps
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let target = GraphMap::skew(&omega * (k + 3) as f64, tol)?;
            linear_graph_path(&space, g, &target, steps, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SymmetricDeformation {
        report: StabilizationReport {
            stabilized,
            original_nprime: nprime,
            effective_nprime: effective,
        },
        space,
        paths,
    })
}

fn smallest_principal_angle(a: &Lagrangian, b: &Lagrangian) -> Result<f64> {
    Ok(subspace::principal_angles(a.subspace(), b.subspace())?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// Moves `l2` off `l1` by the unitary rotation `e^{iθ}` of a compatible
/// complex structure.
///
/// If the pair is already transversal the path is constant. Otherwise the
/// angle is the grid point `θ_j = j·π/64` maximizing the smallest principal
/// angle to `l1`, and the path samples `e^{i·t·θ}·l2`.
pub fn make_transversal_pair(
    space: &Arc<EpsSpace>,
    l1: &Lagrangian,
    l2: &Lagrangian,
    steps: usize,
    tol: &Tolerance,
) -> Result<LagrangianPath> {
    if space.epsilon() != Sign::Minus {
        return Err(Error::EpsilonMismatch);
    }
    if l1.space().as_ref() != space.as_ref() || l2.space().as_ref() != space.as_ref() {
        return Err(Error::SpaceMismatch);
    }
    let times = sample_times(steps)?;
    if are_transversal(l1, l2, tol)? {
        let samples = times
            .into_iter()
            .map(|t| PathSample {
                t,
                lagrangian: l2.clone(),
            })
            .collect();
        return LagrangianPath::new(samples);
    }

    let frame = space.symplectic_frame()?;
    let inverse = space.frame_inverse(&frame);
    let nprime = space.nprime();
    let rotate = |theta: f64| -> Result<Lagrangian> {
        let map = &frame * complex_rotation(nprime, theta) * &inverse;
        l2.map_into(space, &map, tol)
    };

    let mut best = (0.0, f64::NEG_INFINITY);
    for j in 0..ROTATION_CANDIDATES {
        let theta = j as f64 * PI / ROTATION_CANDIDATES as f64;
        let angle = smallest_principal_angle(l1, &rotate(theta)?)?;
        if angle > best.1 {
            best = (theta, angle);
        }
    }
    let theta = best.0;
    let samples = times
        .into_iter()
        .map(|t| {
            Ok(PathSample {
                t,
                lagrangian: rotate(t * theta)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LagrangianPath::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{factors, stabilize_with, standard_space, HyperbolicSummand};
    use crate::subspace::Subspace;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn sym(n: usize, data: &[f64]) -> GraphMap {
        GraphMap::symmetric(DMatrix::from_row_slice(n, n, data), &tol()).unwrap()
    }

    #[test]
    fn zero_map_deforms_to_diagonal() {
        let path = deform_third_to_transversal(1, &sym(1, &[0.0]), 5, &tol()).unwrap();
        let (l, lstar) = factors(path.space());
        assert!(path.start().equals(&l, &tol()));
        for s in path.samples() {
            let expected =
                Subspace::canonicalize(&DMatrix::from_column_slice(2, 1, &[1.0, s.t]), &tol());
            assert!(subspace::subspace_equal(
                s.lagrangian.subspace(),
                &expected,
                &tol()
            ));
        }
        assert!(are_transversal(path.end(), &l, &tol()).unwrap());
        assert!(are_transversal(path.end(), &lstar, &tol()).unwrap());
    }

    #[test]
    fn five_deforms_along_five_minus_four_t() {
        let path = deform_third_to_transversal(1, &sym(1, &[5.0]), 9, &tol()).unwrap();
        for s in path.samples() {
            let g = phase_space::extract_graph_map(path.space(), &s.lagrangian, &tol()).unwrap();
            assert!((g.entries()[(0, 0)] - (5.0 - 4.0 * s.t)).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_start_passes_through_singular_map() {
        let path =
            deform_third_to_transversal(2, &sym(2, &[1.0, 0.0, 0.0, -1.0]), 5, &tol()).unwrap();
        let (l, lstar) = factors(path.space());
        let middle = &path.samples()[2];
        assert_eq!(middle.t, 0.5);
        assert!(!are_transversal(&middle.lagrangian, &l, &tol()).unwrap());
        assert!(path.max_residual() < 1e-12);
        assert!(are_transversal(path.end(), &l, &tol()).unwrap());
        assert!(are_transversal(path.end(), &lstar, &tol()).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(deform_third_to_transversal(1, &sym(1, &[0.0]), 1, &tol()).is_err());
        let skew = GraphMap::skew(DMatrix::zeros(1, 1), &tol()).unwrap();
        assert_eq!(
            deform_third_to_transversal(1, &skew, 4, &tol()).unwrap_err(),
            Error::EpsilonMismatch
        );
    }

    #[test]
    fn coarse_sampling_is_caught() {
        let err = deform_third_to_transversal(1, &sym(1, &[-100.0]), 2, &tol()).unwrap_err();
        assert_eq!(err.name(), "SamplingTooCoarse");
    }

    #[test]
    fn family_targets_scaled_identities() {
        let paths =
            deform_family_to_mutually_transversal(1, &[sym(1, &[0.0]), sym(1, &[0.0])], 9, &tol())
                .unwrap();
        for (path, n) in paths.iter().zip([3.0, 4.0]) {
            let g = phase_space::extract_graph_map(path.space(), path.end(), &tol()).unwrap();
            assert!((g.entries()[(0, 0)] - n).abs() < 1e-12);
        }
        assert!(are_transversal(paths[0].end(), paths[1].end(), &tol()).unwrap());
    }

    #[test]
    fn single_family_member_matches_third_deformation_up_to_scale() {
        let g = sym(2, &[2.0, 1.0, 1.0, -1.0]);
        let family =
            deform_family_to_mutually_transversal(2, std::slice::from_ref(&g), 17, &tol()).unwrap();
        let third = deform_third_to_transversal(2, &g, 17, &tol()).unwrap();
        assert!(family[0].start().equals(third.start(), &tol()));
        let end =
            phase_space::extract_graph_map(family[0].space(), family[0].end(), &tol()).unwrap();
        assert!((end.entries() - DMatrix::<f64>::identity(2, 2) * 3.0).norm() < 1e-12);
    }

    #[test]
    fn symmetric_case_stabilizes_odd_rank() {
        let zero = GraphMap::skew(DMatrix::zeros(1, 1), &tol()).unwrap();
        let out = deform_family_symmetric(1, &[zero], 9, &tol()).unwrap();
        assert!(out.report.stabilized);
        assert_eq!(out.report.effective_nprime, 2);
        let (l, lstar) = factors(&out.space);
        let end = out.paths[0].end();
        assert!(are_transversal(end, &l, &tol()).unwrap());
        assert!(are_transversal(end, &lstar, &tol()).unwrap());
        let g = phase_space::extract_graph_map(&out.space, end, &tol()).unwrap();
        assert!((g.entries() - standard_skew(2) * 3.0).norm() < 1e-12);
    }

    #[test]
    fn symmetric_case_even_rank() {
        let g = GraphMap::skew(standard_skew(2), &tol()).unwrap();
        let out = deform_family_symmetric(2, &[g.clone(), g], 9, &tol()).unwrap();
        assert!(!out.report.stabilized);
        let (l, _) = factors(&out.space);
        assert!(are_transversal(out.paths[0].end(), &l, &tol()).unwrap());
        assert!(are_transversal(out.paths[0].end(), out.paths[1].end(), &tol()).unwrap());
    }

    #[test]
    fn doubling_matches_stabilization() {
        let tol = tol();
        let s = standard_space(1, Sign::Plus).unwrap();
        let g = GraphMap::skew(DMatrix::zeros(1, 1), &tol).unwrap();
        let graph = graph_lagrangian(&s.space, &g, &tol).unwrap();
        let (_, stabilized) = stabilize_with(
            &s.space,
            &[
                (graph, HyperbolicSummand::Factor),
                (s.lstar_factor.clone(), HyperbolicSummand::DualFactor),
            ],
            1,
            &tol,
        )
        .unwrap();
        // (a, α, b, β) -> (a, b, α, β)
        let mut perm = DMatrix::zeros(4, 4);
        for (to, from) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            perm[(to, from)] = 1.0;
        }
        let doubled = standard_space(2, Sign::Plus).unwrap();
        let expected =
            graph_lagrangian(&doubled.space, &double_graph_map(&g, &tol).unwrap(), &tol).unwrap();
        let moved = stabilized[0].map_into(&doubled.space, &perm, &tol).unwrap();
        assert!(moved.equals(&expected, &tol));
        let moved = stabilized[1].map_into(&doubled.space, &perm, &tol).unwrap();
        assert!(moved.equals(&doubled.lstar_factor, &tol));
    }

    #[test]
    fn quarter_rotation_separates_equal_lines() {
        let s = standard_space(1, Sign::Minus).unwrap();
        let path = make_transversal_pair(&s.space, &s.l_factor, &s.l_factor, 9, &tol()).unwrap();
        assert!(path.start().equals(&s.l_factor, &tol()));
        assert!(path.end().equals(&s.lstar_factor, &tol()));
    }

    #[test]
    fn transversal_pair_gives_constant_path() {
        let s = standard_space(1, Sign::Minus).unwrap();
        let diag = Lagrangian::from_frame(
            &s.space,
            DMatrix::from_column_slice(2, 1, &[1.0, 1.0]),
            &tol(),
        )
        .unwrap();
        let path = make_transversal_pair(&s.space, &s.l_factor, &diag, 4, &tol()).unwrap();
        assert!(path
            .samples()
            .iter()
            .all(|x| x.lagrangian.equals(&diag, &tol())));
    }

    #[test]
    fn sample_grid() {
        assert_eq!(sample_times(3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(sample_times(1).is_err());
    }
}
