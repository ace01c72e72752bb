//! Crown domains Ξ(ω) = G·exp(iω)·K_ℂ/K_ℂ and horospherical tubes
//! T(k,ω) = k·N_ℂ·A·exp(iω)·K_ℂ/K_ℂ, tested through a(·).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::cartan::{CartanVector, ComplexCartan};
use crate::convexity::{sample_base, SamplingMode, RECONSTRUCTION_TOL};
use crate::error::{CrownError, Result};
use crate::iwasawa::{self, CrownPoint, DEFAULT_STEPS};
use crate::lie::GroupContext;
use crate::linalg::{self, RMat};
use crate::report::{Check, Metric, Outcome, Probe, ReportHeader, Status, Tally, Witness};
use crate::sampling::{self, Stream};
use crate::weyl::{self, OmegaSpec};

/// Membership tolerance for base points of tubes (k·kᵀ = 1).
pub const K_TOL: f64 = 1e-10;
/// Slice witnesses a(exp(iY)) = exp(iY) must hold to this accuracy.
pub const SLICE_TOL: f64 = 1e-12;
pub const DEFAULT_BOUNDARY_STEPS: usize = 12;

#[derive(Debug, Clone)]
pub struct TubeSpec {
    pub base_k: RMat,
    pub omega: OmegaSpec,
}

impl TubeSpec {
    pub fn new(ctx: &GroupContext, base_k: RMat, omega: OmegaSpec) -> Result<Self> {
        let dim = ctx.ambient_size;
        let residual = linalg::fro_real(&(&base_k * base_k.transpose() - RMat::identity(dim, dim)));
        if base_k.nrows() != dim || !(residual <= K_TOL) {
            return Err(CrownError::NotInGroup { residual });
        }
        ctx.check_in_group(&linalg::to_complex(&base_k), K_TOL)?;
        Ok(Self { base_k, omega })
    }

    pub fn identity(ctx: &GroupContext, omega: OmegaSpec) -> Self {
        let dim = ctx.ambient_size;
        Self {
            base_k: RMat::identity(dim, dim),
            omega,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TubeVerdict {
    pub inside: bool,
    pub margin: f64,
    pub log_a: ComplexCartan,
}

/// Crown point `index` of a seeded run: z = k·exp(S)·exp(iX), X ∈ ω.
pub fn sample_xi_one(
    ctx: &GroupContext,
    omega: &OmegaSpec,
    seed: u64,
    index: u64,
) -> Result<CrownPoint> {
    let g = sample_base(ctx, SamplingMode::FullG, seed, index);
    let x = weyl::sample_omega_one(
        ctx,
        omega,
        &mut sampling::substream(seed, Stream::Omega, index),
    )?;
    Ok(CrownPoint::new(ctx, g, x, *omega))
}

pub fn sample_xi(
    ctx: &GroupContext,
    omega: &OmegaSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<CrownPoint>> {
    if count == 0 {
        return Err(CrownError::InvalidArgument(
            "count must be at least 1".to_string(),
        ));
    }
    (0..count as u64)
        .map(|i| sample_xi_one(ctx, omega, seed, i))
        .collect()
}

/// Membership of z in T(k,ω): with w = k⁻¹z, Im log a(w) ∈ ω.
pub fn tube_contains(
    ctx: &GroupContext,
    tube: &TubeSpec,
    z: &CrownPoint,
    tol: f64,
) -> Result<TubeVerdict> {
    tube_contains_with(ctx, tube, z, None, None, tol)
}

/// As [`tube_contains`], with an optional intermediate waypoint for the
/// continuation path and an optional right factor r ∈ K (z·r represents the
/// same point of Ξ).
pub fn tube_contains_with(
    ctx: &GroupContext,
    tube: &TubeSpec,
    z: &CrownPoint,
    waypoint: Option<&CartanVector>,
    right: Option<&RMat>,
    tol: f64,
) -> Result<TubeVerdict> {
    let left = tube.base_k.transpose() * &z.base_g;
    let mut waypoints = Vec::with_capacity(2);
    if let Some(w) = waypoint {
        waypoints.push(w.clone());
    }
    waypoints.push(z.direction_x.clone());
    let f = iwasawa::project_along(ctx, &left, &waypoints, right, DEFAULT_STEPS)?;
    let margin = weyl::omega_margin(ctx, &tube.omega, &f.log_a.im());
    Ok(TubeVerdict {
        inside: margin > -tol,
        margin,
        log_a: f.log_a,
    })
}

/// Every sampled crown point lies in every sampled tube. Tube 0 is
/// T(1,ω); the rest have Haar-random base points. Sample index
/// `zi·k_count + ki` pairs crown point `zi` with tube `ki`.
pub struct TubeProbe<'a> {
    pub ctx: &'a GroupContext,
    pub omega: OmegaSpec,
    pub z_count: u64,
    pub k_count: u64,
    pub seed: u64,
    pub tol: f64,
}

impl TubeProbe<'_> {
    pub fn tube(&self, ki: u64) -> TubeSpec {
        if ki == 0 {
            TubeSpec::identity(self.ctx, self.omega)
        } else {
            let k = sampling::haar_k(
                self.ctx,
                &mut sampling::substream(self.seed, Stream::Tube, ki),
            );
            TubeSpec {
                base_k: k,
                omega: self.omega,
            }
        }
    }
}

impl Probe for TubeProbe<'_> {
    fn header(&self) -> ReportHeader {
        ReportHeader::new("tubes", self.ctx.spec, Some(self.omega), self.seed)
            .tol("membership", self.tol)
            .tol("z_count", self.z_count as f64)
            .tol("k_count", self.k_count as f64)
            .tol("pivot_floor", iwasawa::PIVOT_FLOOR)
    }

    fn samples(&self) -> u64 {
        self.z_count * self.k_count
    }

    fn sample(&self, index: u64) -> Outcome {
        let (zi, ki) = (index / self.k_count, index % self.k_count);
        let witness = Witness::new(index)
            .with("z_index", crate::report::WitnessValue::Integer(zi))
            .with("tube_index", crate::report::WitnessValue::Integer(ki));
        let z = match sample_xi_one(self.ctx, &self.omega, self.seed, zi) {
            Ok(z) => z,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let tube = self.tube(ki);
        let witness = witness
            .with("g", &z.base_g)
            .with("x", &z.direction_x)
            .with("tube_k", &tube.base_k);
        match tube_contains(self.ctx, &tube, &z, self.tol) {
            Ok(v) => {
                let witness = witness.with("log_a", &v.log_a);
                let status = if v.inside {
                    Status::Pass
                } else {
                    Status::Violation
                };
                Outcome::new(status, Some(v.margin), witness)
            }
            Err(e) => Outcome::indeterminate(witness, e),
        }
    }
}

/// a(Ξ(ω)) = A·exp(iω): containment on sampled crown points, and the
/// slice witnesses exp(iY), Y ∈ ω, for the reverse inclusion.
pub struct ImageProbe<'a> {
    pub ctx: &'a GroupContext,
    pub omega: OmegaSpec,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
}

impl Probe for ImageProbe<'_> {
    fn header(&self) -> ReportHeader {
        ReportHeader::new("image", self.ctx.spec, Some(self.omega), self.seed)
            .tol("membership", self.tol)
            .tol("slice", SLICE_TOL)
            .tol("reconstruction", RECONSTRUCTION_TOL)
    }

    fn samples(&self) -> u64 {
        self.samples
    }

    fn sample(&self, index: u64) -> Outcome {
        let ctx = self.ctx;
        let witness = Witness::new(index);
        let z = match sample_xi_one(ctx, &self.omega, self.seed, index) {
            Ok(z) => z,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let witness = witness.with("g", &z.base_g).with("x", &z.direction_x);
        let f = match iwasawa::project_complex(ctx, &z.base_g, &z.direction_x, DEFAULT_STEPS) {
            Ok(f) => f,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let margin = weyl::omega_margin(ctx, &self.omega, &f.log_a.im());
        let reconstruction = linalg::rel_residual(&f.reconstruct(), &z.z);

        let y = match weyl::sample_omega_one(
            ctx,
            &self.omega,
            &mut sampling::substream(self.seed, Stream::Cartan, index),
        ) {
            Ok(y) => y,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let dim = ctx.ambient_size;
        let slice_error =
            match iwasawa::project_complex(ctx, &RMat::identity(dim, dim), &y, DEFAULT_STEPS) {
                Ok(fy) => fy.log_a.max_abs_diff(&y.to_complex_imag()),
                Err(e) => return Outcome::indeterminate(witness, e),
            };
        let witness = witness
            .with("log_a", &f.log_a)
            .with("slice_y", &y)
            .with("slice_error", slice_error);
        let mut outcome = Outcome::from_margin(margin, self.tol, witness);
        if slice_error > SLICE_TOL || weyl::omega_margin(ctx, &self.omega, &y) <= 0.0 {
            outcome.status = Status::Violation;
        }
        outcome
            .metric("max_slice_error", Metric::Max(slice_error))
            .metric("max_reconstruction_residual", Metric::Max(reconstruction))
    }

    fn checks(&self, tally: &Tally) -> BTreeMap<String, Check> {
        let mut c = BTreeMap::new();
        if let Some(Metric::Max(r)) = tally.metrics.get("max_reconstruction_residual") {
            c.insert(
                "reconstruction".to_string(),
                Check::new(*r, "<=", RECONSTRUCTION_TOL),
            );
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryStep {
    pub step: usize,
    /// omega_margin of the input direction X_n.
    pub input_distance: f64,
    /// omega_margin of Im log a(g·exp(iX_n)).
    pub output_distance: f64,
}

/// The boundary point of ω on the ray through `x`.
pub fn boundary_point(
    ctx: &GroupContext,
    omega: &OmegaSpec,
    x: &CartanVector,
) -> Result<CartanVector> {
    let roots = ctx.root_datum.max_abs_root(x);
    if !(roots > 0.0) {
        return Err(CrownError::InvalidArgument(
            "direction must not vanish on every root".to_string(),
        ));
    }
    let half_pi = core::f64::consts::FRAC_PI_2;
    let t = match *omega {
        OmegaSpec::Scaled { c } => c * half_pi / roots,
        OmegaSpec::BallCap { radius } => (half_pi / roots).min(radius / x.norm()),
    };
    Ok(x * t)
}

/// X_n = (1 − 2⁻ⁿ)·X₀ for n = 1..=steps, with X₀ ∈ ∂ω on the ray through `x`.
pub fn boundary_path(
    ctx: &GroupContext,
    omega: &OmegaSpec,
    x: &CartanVector,
    steps: usize,
) -> Result<Vec<CartanVector>> {
    let x0 = boundary_point(ctx, omega, x)?;
    let mut scale = 1.0;
    Ok((1..=steps)
        .map(|_| {
            scale *= 0.5;
            &x0 * (1.0 - scale)
        })
        .collect())
}

/// Distances to ∂ω of Im log a(g·exp(iX_n)) along a path X_n → ∂ω.
pub fn boundary_probe(
    ctx: &GroupContext,
    omega: &OmegaSpec,
    g: &RMat,
    x_path: &[CartanVector],
) -> Result<Vec<BoundaryStep>> {
    x_path
        .iter()
        .enumerate()
        .map(|(step, x)| {
            let input_distance = weyl::omega_margin(ctx, omega, x);
            if !(input_distance > 0.0) {
                return Err(CrownError::OmegaViolation {
                    margin: input_distance,
                });
            }
            let f = iwasawa::project_complex(ctx, g, x, DEFAULT_STEPS)?;
            Ok(BoundaryStep {
                step,
                input_distance,
                output_distance: weyl::omega_margin(ctx, omega, &f.log_a.im()),
            })
        })
        .collect()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = alloc::vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation (average ranks for ties); NaN for constant input.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va * vb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::build_group;

    #[test]
    fn identity_tube_reduces_to_omega_margin() {
        let ctx = build_group("sl:3".parse().unwrap()).unwrap();
        let omega = OmegaSpec::scaled(0.8).unwrap();
        let x = CartanVector::new(alloc::vec![0.3, 0.1, -0.4]);
        let z = CrownPoint::new(&ctx, RMat::identity(3, 3), x.clone(), omega);
        let v = tube_contains(&ctx, &TubeSpec::identity(&ctx, omega), &z, 1e-9).unwrap();
        assert!((v.margin - weyl::omega_margin(&ctx, &omega, &x)).abs() < 1e-14);
        assert!(v.inside);
        // X ∈ Ω but outside 0.4·Ω
        let small = OmegaSpec::scaled(0.4).unwrap();
        let v = tube_contains(&ctx, &TubeSpec::identity(&ctx, small), &z, 1e-9).unwrap();
        assert!(!v.inside);
    }

    #[test]
    fn boundary_probe_identity_is_exact() {
        let ctx = build_group("sl:2".parse().unwrap()).unwrap();
        let omega = OmegaSpec::scaled(0.8).unwrap();
        let path =
            boundary_path(&ctx, &omega, &CartanVector::new(alloc::vec![1.0, -1.0]), 12).unwrap();
        let steps = boundary_probe(&ctx, &omega, &RMat::identity(2, 2), &path).unwrap();
        for s in &steps {
            assert!((s.input_distance - s.output_distance).abs() < 1e-14);
        }
        assert!(steps.last().unwrap().input_distance < 1e-3);
    }

    #[test]
    fn spearman_examples() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 4.0, 9.0, 100.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tube_base_must_be_orthogonal() {
        let ctx = build_group("sl:2".parse().unwrap()).unwrap();
        let bad = RMat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        assert!(TubeSpec::new(&ctx, bad, OmegaSpec::full()).is_err());
    }
}
