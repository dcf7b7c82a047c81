//! Sampled loops of lagrangians and their Maslov index.
//!
//! In standard symplectic coordinates an orthonormal basis `[X; Y]` of a
//! lagrangian gives a unitary matrix `W = X + iY`, determined up to a real
//! orthogonal factor. `det(W)²` is therefore a well defined point of the unit
//! circle, and the Maslov index of a closed loop is the winding number of
//! that point. With this convention the half-turn
//! `θ ↦ span(cos πθ·e₁ + sin πθ·e₂)` has index `+1`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::deformation::CONTINUITY_LIMIT;
use crate::error::{Error, Result};
use crate::forms::{Sign, Tolerance};
use crate::linalg;
use crate::phase_space::{complex_rotation, EpsSpace, Lagrangian};
use crate::subspace::{self, Subspace};

/// Largest admissible phase increment of `det(W)²` between samples.
pub const PHASE_STEP_LIMIT: f64 = FRAC_PI_2;

/// A closed, sampled loop of lagrangians in a symplectic space.
#[derive(Debug, Clone)]
pub struct LagrangianLoop {
    space: Arc<EpsSpace>,
    thetas: Vec<f64>,
    lagrangians: Vec<Lagrangian>,
}

impl LagrangianLoop {
    pub fn new(
        space: &Arc<EpsSpace>,
        thetas: Vec<f64>,
        lagrangians: Vec<Lagrangian>,
        tol: &Tolerance,
    ) -> Result<Self> {
        if space.epsilon() != Sign::Minus {
            return Err(Error::EpsilonMismatch);
        }
        if thetas.len() != lagrangians.len() {
            return Err(Error::DimensionMismatch {
                expected: lagrangians.len(),
                found: thetas.len(),
            });
        }
        if lagrangians.len() < 2 {
            return Err(Error::InvalidParameter(
                "a loop needs at least two samples".into(),
            ));
        }
        if thetas.iter().any(|t| !(0.0..=1.0).contains(t))
            || thetas.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::InvalidParameter(
                "loop parameters must be strictly increasing in [0, 1]".into(),
            ));
        }
        if lagrangians
            .iter()
            .any(|l| l.space().as_ref() != space.as_ref())
        {
            return Err(Error::SpaceMismatch);
        }
        for (i, pair) in lagrangians.windows(2).enumerate() {
            let angle = subspace::max_principal_angle(pair[0].subspace(), pair[1].subspace())?;
            if angle >= CONTINUITY_LIMIT {
                return Err(Error::SamplingTooCoarse {
                    step: i,
                    increment: angle,
                    limit: CONTINUITY_LIMIT,
                });
            }
        }
        if !lagrangians[0].equals(&lagrangians[lagrangians.len() - 1], tol) {
            return Err(Error::NotClosed);
        }
        Ok(LagrangianLoop {
            space: Arc::clone(space),
            thetas,
            lagrangians,
        })
    }

    /// Loop with uniformly spaced parameters.
    pub fn uniform(
        space: &Arc<EpsSpace>,
        lagrangians: Vec<Lagrangian>,
        tol: &Tolerance,
    ) -> Result<Self> {
        let last = lagrangians.len().saturating_sub(1).max(1) as f64;
        let thetas = (0..lagrangians.len()).map(|i| i as f64 / last).collect();
        LagrangianLoop::new(space, thetas, lagrangians, tol)
    }

    /// `θ ↦ e^{i·π·half_turns·θ}·start` in the standard space, sampled at
    /// `samples` uniform parameters.
    pub fn rotation(
        start: &Lagrangian,
        half_turns: i32,
        samples: usize,
        tol: &Tolerance,
    ) -> Result<Self> {
        let space = start.space();
        if !space.is_standard() {
            return Err(Error::NotStandardSpace);
        }
        if samples < 2 {
            return Err(Error::InvalidParameter(
                "a loop needs at least two samples".into(),
            ));
        }
        let last = (samples - 1) as f64;
        let lagrangians = (0..samples)
            .map(|i| {
                let angle = PI * half_turns as f64 * i as f64 / last;
                start.map_into(space, &complex_rotation(space.nprime(), angle), tol)
            })
            .collect::<Result<Vec<_>>>()?;
        LagrangianLoop::uniform(space, lagrangians, tol)
    }

    pub fn space(&self) -> &Arc<EpsSpace> {
        &self.space
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn lagrangians(&self) -> &[Lagrangian] {
        &self.lagrangians
    }

    pub fn len(&self) -> usize {
        self.lagrangians.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lagrangians.is_empty()
    }

    /// The same loop traversed backwards.
    pub fn reversed(&self, tol: &Tolerance) -> Result<Self> {
        let (lo, hi) = (self.thetas[0], self.thetas[self.thetas.len() - 1]);
        let thetas = self.thetas.iter().rev().map(|t| lo + hi - t).collect();
        let lagrangians = self.lagrangians.iter().rev().cloned().collect();
        LagrangianLoop::new(&self.space, thetas, lagrangians, tol)
    }

    /// The same loop started at sample `k`.
    pub fn rotate_start(&self, k: usize, tol: &Tolerance) -> Result<Self> {
        let base = &self.lagrangians[..self.lagrangians.len() - 1];
        let k = k % base.len();
        let mut lagrangians: Vec<Lagrangian> =
            base[k..].iter().chain(base[..k].iter()).cloned().collect();
        lagrangians.push(base[k].clone());
        LagrangianLoop::uniform(&self.space, lagrangians, tol)
    }

    /// Orthonormal bases of every sample in standard symplectic coordinates.
    fn standard_bases(&self, tol: &Tolerance) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>)> {
        let frame = self.space.symplectic_frame()?;
        let inverse = self.space.frame_inverse(&frame);
        let bases = self
            .lagrangians
            .iter()
            .map(|l| {
                Subspace::canonicalize(&(&inverse * l.basis()), tol)
                    .basis()
                    .clone()
            })
            .collect();
        Ok((frame, bases))
    }
}

/// `det(X + iY)²` normalized to the unit circle.
fn squared_det_phase(basis: &DMatrix<f64>) -> Complex64 {
    let k = basis.ncols();
    let w = DMatrix::from_fn(k, k, |i, j| {
        Complex64::new(basis[(i, j)], basis[(k + i, j)])
    });
    let d = w.determinant();
    let d2 = d * d;
    d2 / d2.norm()
}

/// Phase increments of `det(W)²` between consecutive samples, in `(−π, π]`.
pub fn phase_increments(lp: &LagrangianLoop, tol: &Tolerance) -> Result<Vec<f64>> {
    let (_, bases) = lp.standard_bases(tol)?;
    let phases: Vec<Complex64> = bases.iter().map(squared_det_phase).collect();
    Ok(phases
        .windows(2)
        .map(|w| (w[1] * w[0].conj()).arg())
        .collect())
}

/// Winding number of `det(W)²` along the loop.
///
/// Fails with `SamplingTooCoarse` when some increment reaches `π/2`, where
/// the winding can no longer be read off reliably.
pub fn loop_maslov_index(lp: &LagrangianLoop, tol: &Tolerance) -> Result<i64> {
    let increments = phase_increments(lp, tol)?;
    for (step, &inc) in increments.iter().enumerate() {
        if inc.abs() >= PHASE_STEP_LIMIT {
            return Err(Error::SamplingTooCoarse {
                step,
                increment: inc.abs(),
                limit: PHASE_STEP_LIMIT,
            });
        }
    }
    let turns = increments.iter().sum::<f64>() / (2.0 * PI);
    let index = turns.round();
    if (turns - index).abs() > 0.25 {
        return Err(Error::NotClosed);
    }
    Ok(index as i64)
}

/// Runs `a` then `b` on `[0, ½]` and `[½, 1]`.
pub fn concatenate(
    a: &LagrangianLoop,
    b: &LagrangianLoop,
    tol: &Tolerance,
) -> Result<LagrangianLoop> {
    if a.space.as_ref() != b.space.as_ref() {
        return Err(Error::SpaceMismatch);
    }
    if !a.lagrangians[a.len() - 1].equals(&b.lagrangians[0], tol) {
        return Err(Error::EndpointMismatch);
    }
    let rescale = |lp: &LagrangianLoop, offset: f64| {
        let lo = lp.thetas[0];
        let span = lp.thetas[lp.len() - 1] - lo;
        lp.thetas
            .iter()
            .map(move |t| offset + 0.5 * (t - lo) / span)
            .collect::<Vec<_>>()
    };
    let mut thetas = rescale(a, 0.0);
    thetas.extend(rescale(b, 0.5).into_iter().skip(1));
    let mut lagrangians = a.lagrangians.clone();
    lagrangians.extend(b.lagrangians.iter().skip(1).cloned());
    LagrangianLoop::new(&a.space, thetas, lagrangians, tol)
}

/// Inserts `factor − 1` samples between consecutive samples.
///
/// The inserted points lie on the rotation carrying one sample onto the next
/// through their principal angles (the Grassmannian geodesic), computed in
/// standard symplectic coordinates. That rotation commutes with the complex
/// structure on the pair, so every inserted sample is again lagrangian.
pub fn refine(lp: &LagrangianLoop, factor: usize, tol: &Tolerance) -> Result<LagrangianLoop> {
    if factor < 2 {
        return Err(Error::InvalidParameter(format!(
            "refinement factor must be at least 2, got {factor}"
        )));
    }
    let (frame, bases) = lp.standard_bases(tol)?;
    let mut thetas = Vec::with_capacity((lp.len() - 1) * factor + 1);
    let mut lagrangians = Vec::with_capacity(thetas.capacity());
    for i in 0..lp.len() - 1 {
        let (a, b) = (&bases[i], &bases[i + 1]);
        let svd = linalg::thin_svd(&(a.transpose() * b));
        let a_aligned = a * &svd.u;
        let b_aligned = b * &svd.v;
        let angles: Vec<f64> = svd.s.iter().map(|c| c.clamp(-1.0, 1.0).acos()).collect();

        thetas.push(lp.thetas[i]);
        lagrangians.push(lp.lagrangians[i].clone());
        for step in 1..factor {
            let s = step as f64 / factor as f64;
            let mut y = a_aligned.clone();
            for (j, &angle) in angles.iter().enumerate() {
                let sin = angle.sin();
                if sin <= f64::EPSILON {
                    continue;
                }
                let a_j = a_aligned.column(j);
                let g_j = (b_aligned.column(j) - a_j * angle.cos()) / sin;
                let col = a_j * (s * angle).cos() + g_j * (s * angle).sin();
                y.set_column(j, &col);
            }
            thetas.push(lp.thetas[i] + s * (lp.thetas[i + 1] - lp.thetas[i]));
            lagrangians.push(Lagrangian::from_frame(lp.space(), &frame * y, tol)?);
        }
    }
    thetas.push(lp.thetas[lp.len() - 1]);
    lagrangians.push(lp.lagrangians[lp.len() - 1].clone());
    LagrangianLoop::new(&lp.space, thetas, lagrangians, tol)
}
