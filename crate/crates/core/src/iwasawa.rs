//! Real Iwasawa decomposition and its holomorphic extension to G·exp(iΩ)·K_ℂ.
//!
//! Everything runs through the leading-minor calculus of M = z·zᵀ: since
//! k·kᵀ = 1 on K_ℂ, M = n·a²·nᵀ and the unpivoted LDLᵀ of M returns n and
//! a². The logarithm of a² is continued from the real, positive branch at
//! the start of a path t ↦ g·exp(itX) by unwrapping pivot-ratio arguments.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::cartan::{CartanVector, ComplexCartan};
use crate::error::{CrownError, Result};
use crate::lie::{Family, GroupContext};
use crate::linalg::{self, CMat, RMat, C64};
use crate::weyl::{self, OmegaSpec};

/// Pivot floor relative to ‖M‖_F below which a minor counts as degenerate.
pub const PIVOT_FLOOR: f64 = 1e-13;
pub const DEFAULT_STEPS: usize = 16;
pub const MAX_SUBDIVISIONS: usize = 1 << 14;
/// Group-membership tolerance for inputs.
pub const GROUP_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-10;

/// The factors (n, log a, k) of z = n·exp(log a)·k.
#[derive(Debug, Clone)]
pub struct IwasawaFactors {
    pub n_part: CMat,
    pub log_a: ComplexCartan,
    pub k_part: CMat,
    pub path_steps: usize,
    /// Largest argument change of any pivot ratio over one accepted step.
    pub max_arg_step: f64,
    /// log a along the whole frame diagonal (2n entries for Sp).
    pub log_diag: Vec<C64>,
}

impl IwasawaFactors {
    pub fn a_part(&self) -> CMat {
        CMat::from_diagonal(&DVector::from_vec(
            self.log_diag.iter().map(|l| l.exp()).collect(),
        ))
    }

    pub fn reconstruct(&self) -> CMat {
        &self.n_part * self.a_part() * &self.k_part
    }

    /// Deviation from the structural constraints on log a: the trace for SL
    /// and the inverse pairing of frame weights for Sp. A nonzero value
    /// means the logarithm slipped a branch somewhere.
    pub fn branch_residual(&self, ctx: &GroupContext) -> f64 {
        match ctx.spec.family {
            Family::SpecialLinear => self.log_diag.iter().sum::<C64>().norm(),
            Family::Symplectic => {
                let m = self.log_diag.len();
                (0..m / 2)
                    .map(|p| (self.log_diag[p] + self.log_diag[m - 1 - p]).norm())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Max |k·kᵀ − 1|_F.
    pub fn k_orthogonality_residual(&self) -> f64 {
        let m = self.k_part.nrows();
        linalg::fro(&(&self.k_part * self.k_part.transpose() - CMat::identity(m, m)))
    }
}

/// b(z) = n(z)·a(z), lower-triangular with diagonal exp(log a).
pub fn triangular_part(factors: &IwasawaFactors) -> CMat {
    &factors.n_part * factors.a_part()
}

/// A point z = base_g·exp(iX) of the crown, with X ∈ ω.
#[derive(Debug, Clone)]
pub struct CrownPoint {
    pub z: CMat,
    pub base_g: RMat,
    pub direction_x: CartanVector,
    pub omega: OmegaSpec,
}

impl CrownPoint {
    pub fn new(
        ctx: &GroupContext,
        base_g: RMat,
        direction_x: CartanVector,
        omega: OmegaSpec,
    ) -> Self {
        let z = linalg::to_complex(&base_g) * ctx.exp_cartan(&direction_x.to_complex_imag());
        Self {
            z,
            base_g,
            direction_x,
            omega,
        }
    }
}

/// Leading-minor ratios Δ_j/Δ_{j−1} of a complex symmetric matrix.
pub fn minor_ratios(m: &CMat) -> Result<Vec<C64>> {
    let residual = linalg::symmetry_residual(m);
    if !(residual <= SYMMETRY_TOL) {
        return Err(CrownError::NotSymmetric { residual });
    }
    Ok(linalg::ldl_symmetric(m, PIVOT_FLOOR)?.pivots)
}

fn finish(
    ctx: &GroupContext,
    z: &CMat,
    l: CMat,
    log_pivots: &[C64],
    path_steps: usize,
    max_arg_step: f64,
) -> Result<IwasawaFactors> {
    let log_diag: Vec<C64> = log_pivots.iter().map(|l| l * 0.5).collect();
    let b = &l
        * CMat::from_diagonal(&DVector::from_vec(
            log_diag.iter().map(|v| v.exp()).collect(),
        ));
    let k_part = linalg::solve_lower(&b, z)?;
    Ok(IwasawaFactors {
        n_part: l,
        log_a: ComplexCartan::new(ctx.coords_of_diag(&log_diag)),
        k_part,
        path_steps,
        max_arg_step,
        log_diag,
    })
}

/// Iwasawa factors of a real group element via LDLᵀ of g·gᵀ.
pub fn decompose_real(ctx: &GroupContext, g: &RMat) -> Result<IwasawaFactors> {
    let gc = linalg::to_complex(g);
    ctx.check_in_group(&gc, GROUP_TOL)?;
    let ldl = real_anchor(&(&gc * gc.transpose()))?;
    finish(ctx, &gc, ldl.0, &ldl.1, 0, 0.0)
}

/// LDLᵀ of a real positive-definite matrix with real logarithms of the pivots.
fn real_anchor(m: &CMat) -> Result<(CMat, Vec<C64>)> {
    let ldl = linalg::ldl_symmetric(m, 0.0).map_err(|e| match e {
        CrownError::PivotBreakdown { index, magnitude } => CrownError::NumericalBreakdown {
            index,
            pivot: magnitude,
        },
        other => other,
    })?;
    let mut logs = Vec::with_capacity(ldl.pivots.len());
    for (j, p) in ldl.pivots.iter().enumerate() {
        if !(p.re > 0.0) {
            return Err(CrownError::NumericalBreakdown {
                index: j + 1,
                pivot: p.re,
            });
        }
        logs.push(C64::new(p.re.ln(), 0.0));
    }
    Ok((ldl.l, logs))
}

/// Factors of z = g·exp(iX), continuing log a along t ↦ g·exp(itX).
pub fn project_complex(
    ctx: &GroupContext,
    g: &RMat,
    x: &CartanVector,
    steps_hint: usize,
) -> Result<IwasawaFactors> {
    project_along(ctx, g, core::slice::from_ref(x), None, steps_hint)
}

/// Factors of z = left·exp(iY_end)·right, continuing log a along the
/// piecewise-linear path 0 → waypoints[0] → waypoints[1] → … in Ω.
///
/// `right` must lie in K; it never changes a(z) but is carried into k.
pub fn project_along(
    ctx: &GroupContext,
    left: &RMat,
    waypoints: &[CartanVector],
    right: Option<&RMat>,
    steps_hint: usize,
) -> Result<IwasawaFactors> {
    let left_c = linalg::to_complex(left);
    ctx.check_in_group(&left_c, GROUP_TOL)?;
    for w in waypoints {
        if w.len() != ctx.coord_len() {
            return Err(CrownError::DimensionMismatch {
                expected: ctx.coord_len(),
                got: w.len(),
            });
        }
        let margin = weyl::omega_margin(ctx, &OmegaSpec::full(), w);
        if !(margin > 0.0) {
            return Err(CrownError::OmegaViolation { margin });
        }
    }
    let right_c = right.map(linalg::to_complex);
    let point = |y: &CartanVector| -> CMat {
        let z = &left_c * ctx.exp_cartan(&y.to_complex_imag());
        match &right_c {
            Some(r) => z * r,
            None => z,
        }
    };
    let pivots_at = |y: &CartanVector, s: f64| -> Result<(CMat, linalg::Ldl)> {
        let z = point(y);
        let m = &z * z.transpose();
        let ldl = linalg::ldl_symmetric(&m, PIVOT_FLOOR).map_err(|e| match e {
            CrownError::PivotBreakdown { index, .. } => CrownError::BranchBreakdown { index, t: s },
            other => other,
        })?;
        Ok((z, ldl))
    };

    let origin = CartanVector::zeros(ctx.coord_len());
    let z0 = point(&origin);
    let (l0, mut logs) = real_anchor(&(&z0 * z0.transpose()))?;
    let mut last_pivots: Vec<C64> = logs.iter().map(|l| l.exp()).collect();
    let mut last = (z0, l0);
    let steps = steps_hint.max(1);
    let mut path_steps = 0usize;
    let mut subdivisions = 0usize;
    let mut max_arg_step = 0.0f64;

    let mut prev = origin;
    for (leg, target) in waypoints.iter().enumerate() {
        let at = |t: f64| &(&prev * (1.0 - t)) + &(target * t);
        let mut t_cur = 0.0;
        for step in 1..=steps {
            let mut pending = vec![step as f64 / steps as f64];
            while let Some(&t_next) = pending.last() {
                let (z, ldl) = pivots_at(&at(t_next), leg as f64 + t_next)?;
                let mut worst = 0.0f64;
                let ratios: Vec<C64> = ldl
                    .pivots
                    .iter()
                    .zip(&last_pivots)
                    .map(|(new, old)| {
                        let r = new / old;
                        worst = worst.max(linalg::arg(r).abs());
                        r
                    })
                    .collect();
                if worst >= FRAC_PI_2 {
                    if subdivisions >= MAX_SUBDIVISIONS {
                        let index = ratios
                            .iter()
                            .position(|r| linalg::arg(*r).abs() >= FRAC_PI_2)
                            .map_or(1, |p| p + 1);
                        return Err(CrownError::BranchBreakdown {
                            index,
                            t: leg as f64 + t_next,
                        });
                    }
                    subdivisions += 1;
                    pending.push(0.5 * (t_cur + t_next));
                    continue;
                }
                for (l, r) in logs.iter_mut().zip(&ratios) {
                    *l += r.ln();
                }
                max_arg_step = max_arg_step.max(worst);
                last_pivots = ldl.pivots;
                last = (z, ldl.l);
                path_steps += 1;
                t_cur = t_next;
                pending.pop();
            }
        }
        prev = target.clone();
    }
    let (z, l) = last;
    finish(ctx, &z, l, &logs, path_steps, max_arg_step)
}
