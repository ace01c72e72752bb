//! The Siegel upper half-space S⁺ = Sym(n,ℝ) + i·Sym⁺(n,ℝ), its leading
//! minors Δ_j and ratios χ_j = Δ_j/Δ_{j−1}, and a value-level comparison
//! with the crown projection of Sp(n,ℝ).

use alloc::string::ToString;
use alloc::vec::Vec;

use num_complex::ComplexFloat;

use crate::cartan::CartanVector;
use crate::convexity::{sample_base, SamplingMode};
use crate::error::{CrownError, Result};
use crate::iwasawa::{self, DEFAULT_STEPS};
use crate::lie::{build_group, Family, GroupContext, GroupSpec};
use crate::linalg::{self, CMat, RMat, C64, I};
use crate::report::{Metric, Outcome, Probe, ReportHeader, Status, Witness, WitnessValue};
use crate::sampling::{self, Stream};
use crate::weyl::{self, OmegaSpec};

pub const SYMMETRY_TOL: f64 = 1e-10;
/// Positive-definiteness floor added to Im z in direct sampling.
pub const DIRECT_EPSILON: f64 = 1e-3;
/// Normalized |Δ_j| must stay above this.
pub const MINOR_FLOOR: f64 = 1e-12;
/// Agreement of crown and Siegel values for Im log a.
pub const CROSS_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    pub z: CMat,
}

impl SiegelPoint {
    /// Validates zᵀ = z and Im z ≻ 0; the stored matrix is symmetrized.
    pub fn new(z: CMat) -> Result<Self> {
        let residual = linalg::symmetry_residual(&z);
        if !(residual <= SYMMETRY_TOL) {
            return Err(CrownError::NotSymmetric { residual });
        }
        let z = (&z + z.transpose()) * C64::new(0.5, 0.0);
        let min_eig = linalg::imag_part(&z).symmetric_eigen().eigenvalues.min();
        if !(min_eig > 0.0) {
            return Err(CrownError::InvalidArgument(
                "imaginary part is not positive definite".to_string(),
            ));
        }
        Ok(Self { z })
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn min_imag_eigenvalue(&self) -> f64 {
        linalg::imag_part(&self.z)
            .symmetric_eigen()
            .eigenvalues
            .min()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// The fixed worked point [[i, ½], [½, i]] ⊕ i·1.
    Anchor,
    /// x + i(LLᵀ + ε·1) with Gaussian x, L.
    Direct,
    /// g·(i·1) for a bounded random g ∈ Sp(n,ℝ).
    Orbit,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Anchor => "anchor",
            Strategy::Direct => "direct",
            Strategy::Orbit => "orbit",
        }
    }
}

/// g·w = (Aw + B)(Cw + D)⁻¹ for g = [[A, B], [C, D]] in the standard
/// realization (symplectic form [[0, 1], [−1, 0]]).
pub fn fractional_action(g: &RMat, w: &CMat) -> Result<CMat> {
    let n = w.nrows();
    if g.nrows() != 2 * n || g.ncols() != 2 * n {
        return Err(CrownError::DimensionMismatch {
            expected: 2 * n,
            got: g.nrows(),
        });
    }
    let block =
        |r: usize, c: usize| linalg::to_complex(&g.view((r * n, c * n), (n, n)).into_owned());
    let num = block(0, 0) * w + block(0, 1);
    let den = block(1, 0) * w + block(1, 1);
    Ok(num * linalg::inverse(&den)?)
}

pub fn anchor_point(n: usize) -> SiegelPoint {
    let mut z = CMat::identity(n, n) * I;
    if n >= 2 {
        z[(0, 1)] = C64::new(0.5, 0.0);
        z[(1, 0)] = C64::new(0.5, 0.0);
    }
    SiegelPoint { z }
}

fn symplectic_context(n: usize) -> Result<GroupContext> {
    build_group(GroupSpec::new(Family::Symplectic, n)?)
}

/// Sample `index`: 0 is the anchor, then direct and orbit points alternate.
pub fn sample_siegel_one(
    ctx: &GroupContext,
    seed: u64,
    index: u64,
) -> Result<(SiegelPoint, Strategy)> {
    let n = ctx.spec.n;
    if index == 0 {
        return Ok((anchor_point(n), Strategy::Anchor));
    }
    let mut rng = sampling::substream(seed, Stream::Siegel, index);
    if index % 2 == 1 {
        let x = RMat::from_fn(n, n, |_, _| sampling::gaussian(&mut rng));
        let l = RMat::from_fn(n, n, |_, _| sampling::gaussian(&mut rng));
        let re = (&x + x.transpose()) * 0.5;
        let im = &l * l.transpose() + RMat::identity(n, n) * DIRECT_EPSILON;
        let z = CMat::from_fn(n, n, |i, j| C64::new(re[(i, j)], im[(i, j)]));
        Ok((SiegelPoint::new(z)?, Strategy::Direct))
    } else {
        let g = ctx.to_standard(&sampling::random_group_element(
            ctx,
            &mut rng,
            crate::convexity::FULL_G_RADIUS,
        ));
        let z = fractional_action(&g, &(CMat::identity(n, n) * I))?;
        Ok((SiegelPoint::new(z)?, Strategy::Orbit))
    }
}

pub fn sample_siegel(n: usize, count: usize, seed: u64) -> Result<Vec<(SiegelPoint, Strategy)>> {
    let ctx = symplectic_context(n)?;
    (0..count as u64)
        .map(|i| sample_siegel_one(&ctx, seed, i))
        .collect()
}

/// χ_j(z) = Δ_j(z)/Δ_{j−1}(z), j = 1..n.
pub fn chi(z: &SiegelPoint) -> Result<Vec<C64>> {
    iwasawa::minor_ratios(&z.z)
}

/// |Δ_j| divided by the product of the row norms of the leading j×j block
/// (Hadamard's bound, so the values lie in [0, 1]).
pub fn normalized_minors(z: &CMat, ratios: &[C64]) -> Vec<f64> {
    let mut delta = C64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(ratios.len());
    for (j, r) in ratios.iter().enumerate() {
        delta *= r;
        let mut bound = 1.0;
        for i in 0..=j {
            bound *= (0..=j).map(|c| z[(i, c)].norm_sqr()).sum::<f64>().sqrt();
        }
        out.push(delta.abs() / bound);
    }
    out
}

/// Im χ_j > 0 and Δ_j ≠ 0 on sampled points of S⁺.
pub struct SiegelProbe {
    pub ctx: GroupContext,
    pub samples: u64,
    pub seed: u64,
}

impl SiegelProbe {
    pub fn new(n: usize, samples: u64, seed: u64) -> Result<Self> {
        Ok(Self {
            ctx: symplectic_context(n)?,
            samples,
            seed,
        })
    }
}

impl Probe for SiegelProbe {
    fn header(&self) -> ReportHeader {
        ReportHeader::new("siegel", self.ctx.spec, None, self.seed)
            .tol("minor_floor", MINOR_FLOOR)
            .tol("direct_epsilon", DIRECT_EPSILON)
            .tol("symmetry", SYMMETRY_TOL)
    }

    fn samples(&self) -> u64 {
        self.samples
    }

    fn sample(&self, index: u64) -> Outcome {
        let witness = Witness::new(index);
        let (point, strategy) = match sample_siegel_one(&self.ctx, self.seed, index) {
            Ok(p) => p,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let witness = witness
            .with("strategy", WitnessValue::Text(strategy.name().to_string()))
            .with("z", &point.z);
        let ratios = match chi(&point) {
            Ok(r) => r,
            // a vanishing minor on S⁺ is a finding, not an indeterminate sample
            Err(e) => {
                let mut o = Outcome::new(Status::Violation, Some(f64::NEG_INFINITY), witness);
                o.error = Some(e.to_string());
                return o.metric("pivot_breakdowns", Metric::Count(1));
            }
        };
        let min_im = ratios.iter().map(|c| c.im).fold(f64::INFINITY, f64::min);
        let min_delta = normalized_minors(&point.z, &ratios)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let witness = witness.with(
            "chi",
            WitnessValue::Complex(ratios.iter().map(|c| [c.re, c.im]).collect()),
        );
        let status = if min_im > 0.0 && min_delta > MINOR_FLOOR {
            Status::Pass
        } else {
            Status::Violation
        };
        Outcome::new(status, Some(min_im), witness)
            .metric("min_im_chi", Metric::Min(min_im))
            .metric("min_normalized_minor", Metric::Min(min_delta))
            .metric("pivot_breakdowns", Metric::Count(0))
            .metric(
                match strategy {
                    Strategy::Anchor => "samples_anchor",
                    Strategy::Direct => "samples_direct",
                    Strategy::Orbit => "samples_orbit",
                },
                Metric::Count(1),
            )
    }
}

/// Im log a(g·exp(iX)) through the Siegel realization: with
/// w_± = g·(±i·e^{2iX}) and Q = (w₊ − w₋)/(2i), Im log a_j = ½·arg χ_j(Q).
pub fn crown_via_siegel(ctx: &GroupContext, g: &RMat, x: &CartanVector) -> Result<CartanVector> {
    if ctx.spec.family != Family::Symplectic {
        return Err(CrownError::UnsupportedFamily(ctx.spec.to_string()));
    }
    let n = ctx.spec.n;
    let g_std = ctx.to_standard(g);
    let e2ix = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        x.coords.iter().map(|&t| C64::new(0.0, 2.0 * t).exp()),
    ));
    let w_plus = fractional_action(&g_std, &(&e2ix * I))?;
    let w_minus = fractional_action(&g_std, &(&e2ix * -I))?;
    let q = (w_plus - w_minus) * C64::new(0.0, -0.5);
    let ratios = iwasawa::minor_ratios(&q)?;
    Ok(CartanVector::new(
        ratios.iter().map(|r| 0.5 * linalg::arg(*r)).collect(),
    ))
}

/// Compares Im log a from the crown projection with the Siegel-side values
/// and their Ω verdicts.
pub struct CrossCheckProbe<'a> {
    pub ctx: &'a GroupContext,
    pub samples: u64,
    pub seed: u64,
}

impl Probe for CrossCheckProbe<'_> {
    fn header(&self) -> ReportHeader {
        ReportHeader::new(
            "siegel:cross-check",
            self.ctx.spec,
            Some(OmegaSpec::full()),
            self.seed,
        )
        .tol("value_agreement", CROSS_CHECK_TOL)
        .tol("pivot_floor", iwasawa::PIVOT_FLOOR)
    }

    fn samples(&self) -> u64 {
        self.samples
    }

    fn sample(&self, index: u64) -> Outcome {
        let ctx = self.ctx;
        let witness = Witness::new(index);
        let (g, x) = if index == 0 {
            let dim = ctx.ambient_size;
            (
                RMat::identity(dim, dim),
                CartanVector::zeros(ctx.coord_len()),
            )
        } else {
            let g = sample_base(ctx, SamplingMode::FullG, self.seed, index);
            match weyl::sample_omega_one(
                ctx,
                &OmegaSpec::full(),
                &mut sampling::substream(self.seed, Stream::Omega, index),
            ) {
                Ok(x) => (g, x),
                Err(e) => return Outcome::indeterminate(witness, e),
            }
        };
        let witness = witness.with("g", &g).with("x", &x);
        let crown = match iwasawa::project_complex(ctx, &g, &x, DEFAULT_STEPS) {
            Ok(f) => f.log_a.im(),
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let siegel = match crown_via_siegel(ctx, &g, &x) {
            Ok(v) => v,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let full = OmegaSpec::full();
        let crown_margin = weyl::omega_margin(ctx, &full, &crown);
        let siegel_margin = weyl::omega_margin(ctx, &full, &siegel);
        let diff = crown.max_abs_diff(&siegel);
        let agree = (crown_margin > 0.0) == (siegel_margin > 0.0);
        let witness = witness.with("crown", &crown).with("siegel", &siegel);
        let status = if agree && diff <= CROSS_CHECK_TOL {
            Status::Pass
        } else {
            Status::Violation
        };
        Outcome::new(status, Some(crown_margin.min(siegel_margin)), witness)
            .metric("max_value_difference", Metric::Max(diff))
            .metric("verdict_disagreements", Metric::Count(!agree as u64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_examples() {
        let z = SiegelPoint::new(CMat::identity(3, 3) * I).unwrap();
        assert!(chi(&z).unwrap().iter().all(|c| (*c - I).norm() == 0.0));
        let r = chi(&anchor_point(2)).unwrap();
        assert!((r[0] - I).norm() < 1e-12 && (r[1] - C64::new(0.0, 1.25)).norm() < 1e-12);
        let d = nalgebra::DVector::from_vec(alloc::vec![C64::new(1.0, 2.0), C64::new(-3.0, 0.5)]);
        let r = chi(&SiegelPoint::new(CMat::from_diagonal(&d)).unwrap()).unwrap();
        assert_eq!(r, alloc::vec![d[0], d[1]]);
    }

    #[test]
    fn identity_fixes_i() {
        let w = CMat::identity(2, 2) * I;
        let z = fractional_action(&RMat::identity(4, 4), &w).unwrap();
        assert!(linalg::fro(&(z - w)) < 1e-15);
    }

    #[test]
    fn rejects_non_siegel_input() {
        assert!(SiegelPoint::new(CMat::identity(2, 2)).is_err());
        let asym = CMat::from_row_slice(2, 2, &[I, C64::new(1.0, 0.0), C64::new(0.0, 0.0), I]);
        assert!(matches!(
            SiegelPoint::new(asym),
            Err(CrownError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn cross_check_diagonal_case() {
        let ctx = symplectic_context(2).unwrap();
        let x = CartanVector::new(alloc::vec![0.3, -0.2]);
        let v = crown_via_siegel(&ctx, &RMat::identity(4, 4), &x).unwrap();
        assert!(v.max_abs_diff(&x) < 1e-14);
    }
}
