//! The functions f_a(k) = log a(k·a) and f_{a,λ} = λ∘f_a on K, their
//! gradients, gradient ascent to critical points, and the Monte-Carlo
//! verifiers for real (Kostant) and complex convexity.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::cartan::{CartanVector, ComplexCartan};
use crate::error::{CrownError, Result};
use crate::iwasawa::{self, IwasawaFactors, DEFAULT_STEPS};
use crate::lie::{h_lambda, CovectorIA, GroupContext};
use crate::linalg::{self, CMat, RMat};
use crate::report::{Check, Metric, Outcome, Probe, ReportHeader, Status, Tally, Witness};
use crate::sampling::{self, SampleRng, Stream};
use crate::weyl::{self, OmegaSpec, HULL_TOL, REJECTION_BUDGET};

/// Directions and covectors count as regular when every |α| exceeds this.
pub const REGULARITY_FLOOR: f64 = 1e-3;
/// Branch residual above which f_{a,λ} is rejected as non-real.
pub const REALNESS_ERROR: f64 = 1e-8;
/// Branch residual above which a sample is flagged (but still evaluated).
pub const REALNESS_MONITOR: f64 = 1e-10;
pub const FD_STEP: f64 = 1e-5;
pub const ARMIJO: f64 = 0.1;
pub const SHRINK: f64 = 0.5;
pub const INITIAL_STEP: f64 = 1.0;
pub const MIN_TRIAL_STEP: f64 = 1e-4;
pub const MAX_TRIAL_STEP: f64 = 1e4;
pub const DEFAULT_ASCENT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 2000;
/// ‖T‖² below this multiple of |f| cannot be resolved by the line search.
pub const STATIONARY_EPS: f64 = 1e-13;
/// ‖S‖_F bound for g = k·exp(S) in full-G sampling.
pub const FULL_G_RADIUS: f64 = 1.5;
/// Half-width of the box in 𝔞 for real-convexity directions.
pub const KOSTANT_BOX: f64 = 1.0;
pub const VERTEX_TOL: f64 = 1e-10;
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Minimum Frobenius distance of probe samples from N_K(𝔞).
pub const NORMALIZER_SEPARATION: f64 = 1e-1;
/// Engineering floor for max |Im n| away from the normalizer.
pub const IM_N_FLOOR: f64 = 1e-10;
pub const GRADIENT_MEDIAN_TOL: f64 = 1e-7;
pub const GRADIENT_MAX_TOL: f64 = 1e-5;
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-10;
pub const CRITICAL_GAP_TOL: f64 = 1e-6;
pub const MIN_CONVERGENCE_RATE: f64 = 0.95;

/// One gradient-ascent run of f_{a,λ} on K.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalRun {
    pub start_k: RMat,
    pub end_k: RMat,
    /// f_{a,λ} after each accepted step, starting with f(start_k).
    pub f_values: Vec<f64>,
    pub grad_norm_final: f64,
    /// max over the Weyl group of λ(i·wX).
    pub matched_weyl_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl CriticalRun {
    pub fn final_value(&self) -> f64 {
        *self.f_values.last().unwrap_or(&f64::NAN)
    }

    pub fn gap(&self) -> f64 {
        (self.final_value() - self.matched_weyl_value).abs()
    }
}

/// The real base point k·exp(Re a) of the path used for f_a(k).
fn base_point(ctx: &GroupContext, a_point: &ComplexCartan, k: &RMat) -> RMat {
    let a_real = linalg::real_part(&ctx.exp_cartan(&a_point.re().to_complex_real()));
    k * a_real
}

/// Iwasawa factors of k·exp(a_point), continued from k·exp(Re a_point).
pub fn f_a_factors(
    ctx: &GroupContext,
    a_point: &ComplexCartan,
    k: &RMat,
) -> Result<IwasawaFactors> {
    iwasawa::project_complex(
        ctx,
        &base_point(ctx, a_point, k),
        &a_point.im(),
        DEFAULT_STEPS,
    )
}

/// f_a(k) = log a(k·exp(a_point)).
pub fn f_a(ctx: &GroupContext, a_point: &ComplexCartan, k: &RMat) -> Result<ComplexCartan> {
    Ok(f_a_factors(ctx, a_point, k)?.log_a)
}

/// λ applied to already computed factors. λ only sees the imaginary part
/// of log a, so the "non-real" part of the value is the branch residual.
pub fn lambda_of(ctx: &GroupContext, factors: &IwasawaFactors, lam: &CovectorIA) -> Result<f64> {
    let residual = factors.branch_residual(ctx);
    if !(residual <= REALNESS_ERROR) {
        return Err(CrownError::NonRealValue(residual));
    }
    Ok(lam.evaluate(ctx, &factors.log_a))
}

/// f_{a,λ}(k) = λ(f_a(k)).
pub fn f_a_lambda(
    ctx: &GroupContext,
    a_point: &ComplexCartan,
    k: &RMat,
    lam: &CovectorIA,
) -> Result<f64> {
    lambda_of(ctx, &f_a_factors(ctx, a_point, k)?, lam)
}

/// Riemannian gradient T ∈ 𝔨 of k ↦ f_{a,λ}(k) for ⟨X,Y⟩ = −κ_ℝ(X,Y),
/// from d/dt f(exp(tX)k) = κ_ℝ(X, Ad(n(ka))H_λ).
pub fn gradient_from_factors(
    ctx: &GroupContext,
    factors: &IwasawaFactors,
    lam: &CovectorIA,
) -> Result<RMat> {
    let n = &factors.n_part;
    let w = n * h_lambda(ctx, lam) * linalg::inverse(n)?;
    let re_w = linalg::real_part(&w);
    Ok((re_w.transpose() - re_w) * 0.5)
}

pub fn grad_f(
    ctx: &GroupContext,
    a_point: &ComplexCartan,
    k: &RMat,
    lam: &CovectorIA,
) -> Result<RMat> {
    gradient_from_factors(ctx, &f_a_factors(ctx, a_point, k)?, lam)
}

/// ⟨X, Y⟩ = −κ_ℝ(X, Y) on 𝔨.
pub fn k_metric(ctx: &GroupContext, x: &RMat, y: &RMat) -> f64 {
    -ctx.killing_r(&linalg::to_complex(x), &linalg::to_complex(y))
}

pub fn k_norm(ctx: &GroupContext, t: &RMat) -> f64 {
    (2.0 * ctx.killing_scale).sqrt() * linalg::fro_real(t)
}

/// Directional derivative along X ∈ 𝔨 through λ(p_𝔞(Ad(b(ka))⁻¹X)).
pub fn directional_via_projection(
    ctx: &GroupContext,
    factors: &IwasawaFactors,
    lam: &CovectorIA,
    x: &RMat,
) -> Result<f64> {
    let b = iwasawa::triangular_part(factors);
    let y = linalg::inverse(&b)? * linalg::to_complex(x) * &b;
    Ok(lam.evaluate(ctx, &ctx.project_a(&y)))
}

/// λ(i·wX) for every Weyl element, in the order of `ctx.weyl`.
pub fn weyl_values(ctx: &GroupContext, x: &CartanVector, lam: &CovectorIA) -> Vec<f64> {
    ctx.weyl
        .iter()
        .map(|w| lam.evaluate_imag(ctx, &w.action.apply(x)))
        .collect()
}

pub fn max_weyl_value(ctx: &GroupContext, x: &CartanVector, lam: &CovectorIA) -> f64 {
    weyl_values(ctx, x, lam)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Gradient ascent k ← exp(ηT)·k with Armijo backtracking.
///
/// The first trial step is `INITIAL_STEP`; later ones are Barzilai–Borwein
/// estimates, so `f_values` stays nondecreasing.
pub fn ascend_critical(
    ctx: &GroupContext,
    a_point: &ComplexCartan,
    k0: &RMat,
    lam: &CovectorIA,
    max_iter: usize,
    tol: f64,
) -> Result<CriticalRun> {
    let eval = |k: &RMat| -> Result<(f64, IwasawaFactors)> {
        let f = f_a_factors(ctx, a_point, k)?;
        Ok((lambda_of(ctx, &f, lam)?, f))
    };
    let mut k = k0.clone();
    let (mut f, mut factors) = eval(&k)?;
    let mut run = CriticalRun {
        start_k: k0.clone(),
        end_k: k0.clone(),
        f_values: alloc::vec![f],
        grad_norm_final: f64::NAN,
        matched_weyl_value: max_weyl_value(ctx, &a_point.im(), lam),
        iterations: 0,
        converged: false,
    };
    let mut previous: Option<(RMat, RMat)> = None;
    loop {
        let t = gradient_from_factors(ctx, &factors, lam)?;
        let gn = k_norm(ctx, &t);
        run.grad_norm_final = gn;
        run.end_k = k.clone();
        if gn < tol {
            run.converged = true;
            return Ok(run);
        }
        if run.iterations >= max_iter {
            return Err(CrownError::NoConvergence(Box::new(run)));
        }
        // Barzilai–Borwein trial step from the last accepted move; plain
        // backtracking from a unit step stalls on nearly tied Weyl values.
        let mut eta = match &previous {
            Some((s, y)) => {
                let sy = -k_metric(ctx, s, y);
                if sy > 0.0 {
                    (k_metric(ctx, s, s) / sy).clamp(MIN_TRIAL_STEP, MAX_TRIAL_STEP)
                } else {
                    INITIAL_STEP
                }
            }
            None => INITIAL_STEP,
        };
        let accepted = loop {
            let candidate = linalg::skew_exp(&(&t * eta)) * &k;
            if let Ok((fc, fac)) = eval(&candidate) {
                if fc >= f + ARMIJO * eta * gn * gn {
                    break Some((candidate, fc, fac));
                }
            }
            eta *= SHRINK;
            if eta < 1e-20 {
                break None;
            }
        };
        match accepted {
            Some((kc, fc, fac)) => {
                let t_next = gradient_from_factors(ctx, &fac, lam)?;
                previous = Some((&t * eta, &t_next - &t));
                k = kc;
                f = fc;
                factors = fac;
                run.f_values.push(f);
                run.iterations += 1;
            }
            // no measurable ascent left: stationary at working precision
            None if gn * gn <= STATIONARY_EPS * f.abs().max(1.0) => {
                run.converged = true;
                return Ok(run);
            }
            None => return Err(CrownError::NoConvergence(Box::new(run))),
        }
    }
}

/// A regular λ strictly separating Y from conv(W·X):
/// λ(iY) > max_w λ(i·wX).
pub fn separating_functional(
    ctx: &GroupContext,
    x: &CartanVector,
    y: &CartanVector,
) -> Result<CovectorIA> {
    if weyl::hull_contains(ctx, x, y, HULL_TOL).inside {
        return Err(CrownError::InsideHull);
    }
    let proj = weyl::project_onto_hull(ctx, x, y);
    let mu = y - &proj;
    let mu_norm = mu.norm();
    let orbit = weyl::weyl_orbit(ctx, x);
    let support = |v: &CartanVector| {
        orbit
            .iter()
            .map(|p| p.dot(v))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let gap = mu.dot(y) - support(&mu);

    let n = ctx.coord_len();
    let r = CartanVector::new(match ctx.spec.family {
        crate::lie::Family::SpecialLinear => (0..n)
            .map(|i| (n as f64 - 1.0 - 2.0 * i as f64) / 2.0)
            .collect(),
        crate::lie::Family::Symplectic => (0..n).map(|i| (n - i) as f64).collect(),
    });
    let roots = &ctx.root_datum;
    let r_scale = roots.max_abs_root(&r);
    let mut delta = 1e-3 * mu_norm;
    let r_reach = r.dot(y).abs() + orbit.iter().map(|p| p.dot(&r).abs()).fold(0.0, f64::max);
    if r_reach > 0.0 {
        delta = delta.min(0.5 * gap / r_reach);
    }
    for idx in 0..roots.roots.len() {
        let v = roots.eval(idx, &mu).abs();
        if v > 1e-14 * mu_norm {
            delta = delta.min(0.5 * v / r_scale);
        }
    }
    let perturbed = &mu + &(&r * delta);
    // λ(iY) = −2c·tr(Y·M), so M = −μ' turns the gap into λ(iY) − max λ(i·wX)
    Ok(CovectorIA::new(&perturbed * -1.0))
}

fn regular_omega(
    ctx: &GroupContext,
    omega: &OmegaSpec,
    rng: &mut SampleRng,
) -> Result<CartanVector> {
    for _ in 0..REJECTION_BUDGET {
        let x = weyl::sample_omega_one(ctx, omega, rng)?;
        if ctx.root_datum.min_abs_root(&x) > REGULARITY_FLOOR {
            return Ok(x);
        }
    }
    Err(CrownError::RejectionStall {
        rate: 1.0 / REJECTION_BUDGET as f64,
    })
}

/// A Gaussian regular covector.
pub fn random_regular_covector(ctx: &GroupContext, rng: &mut SampleRng) -> Result<CovectorIA> {
    for _ in 0..REJECTION_BUDGET {
        let m = ctx.normalize_coords(CartanVector::new(
            (0..ctx.coord_len())
                .map(|_| sampling::gaussian(rng))
                .collect(),
        ));
        let lam = CovectorIA::new(m);
        if lam.is_regular(ctx, REGULARITY_FLOOR) {
            return Ok(lam);
        }
    }
    Err(CrownError::RejectionStall {
        rate: 1.0 / REJECTION_BUDGET as f64,
    })
}

fn factor_metrics(outcome: Outcome, ctx: &GroupContext, z: &CMat, f: &IwasawaFactors) -> Outcome {
    let branch = f.branch_residual(ctx);
    outcome
        .metric(
            "max_reconstruction_residual",
            Metric::Max(linalg::rel_residual(&f.reconstruct(), z)),
        )
        .metric(
            "max_k_orthogonality_residual",
            Metric::Max(f.k_orthogonality_residual()),
        )
        .metric("max_branch_residual", Metric::Max(branch))
        .metric(
            "branch_residual_flags",
            Metric::Count((branch > REALNESS_MONITOR) as u64),
        )
        .metric("max_path_steps", Metric::Max(f.path_steps as f64))
        .metric("max_arg_step", Metric::Max(f.max_arg_step))
}

fn reconstruction_check(tally: &Tally) -> BTreeMap<alloc::string::String, Check> {
    let mut checks = BTreeMap::new();
    if let Some(Metric::Max(r)) = tally.metrics.get("max_reconstruction_residual") {
        checks.insert(
            "reconstruction".to_string(),
            Check::new(*r, "<=", RECONSTRUCTION_TOL),
        );
    }
    checks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// g = k Haar-random in K.
    K,
    /// g = k·exp(S) with S ∈ 𝔭, ‖S‖_F ≤ 1.5.
    FullG,
}

/// Base point of sample `index` in the given mode.
pub fn sample_base(ctx: &GroupContext, mode: SamplingMode, seed: u64, index: u64) -> RMat {
    let k = sampling::haar_k(ctx, &mut sampling::substream(seed, Stream::Haar, index));
    match mode {
        SamplingMode::K => k,
        SamplingMode::FullG => {
            let s = sampling::random_p(
                ctx,
                &mut sampling::substream(seed, Stream::Algebra, index),
                FULL_G_RADIUS,
            );
            k * linalg::sym_exp(&s)
        }
    }
}

/// Checks Im log a(g·exp(iX)) ∈ conv(W·X) for sampled g and X ∈ ω.
pub struct ComplexConvexityProbe<'a> {
    pub ctx: &'a GroupContext,
    pub omega: OmegaSpec,
    pub mode: SamplingMode,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
}

impl Probe for ComplexConvexityProbe<'_> {
    fn header(&self) -> ReportHeader {
        let command = match self.mode {
            SamplingMode::K => "verify-convexity:k",
            SamplingMode::FullG => "verify-convexity:full-g",
        };
        ReportHeader::new(command, self.ctx.spec, Some(self.omega), self.seed)
            .tol("hull", self.tol)
            .tol("reconstruction", RECONSTRUCTION_TOL)
            .tol("branch_monitor", REALNESS_MONITOR)
            .tol("full_g_radius", FULL_G_RADIUS)
            .tol("pivot_floor", iwasawa::PIVOT_FLOOR)
    }

    fn samples(&self) -> u64 {
        self.samples
    }

    fn sample(&self, index: u64) -> Outcome {
        let ctx = self.ctx;
        let g = sample_base(ctx, self.mode, self.seed, index);
        let mut witness = Witness::new(index).with("g", &g);
        let x = match weyl::sample_omega_one(
            ctx,
            &self.omega,
            &mut sampling::substream(self.seed, Stream::Omega, index),
        ) {
            Ok(x) => x,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        witness.set("x", &x);
        let f = match iwasawa::project_complex(ctx, &g, &x, DEFAULT_STEPS) {
            Ok(f) => f,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let y = f.log_a.im();
        witness.set("y", &y);
        witness.set("log_a", &f.log_a);
        let verdict = weyl::hull_contains(ctx, &x, &y, self.tol);
        let status = if verdict.inside {
            Status::Pass
        } else {
            Status::Violation
        };
        let z = linalg::to_complex(&g) * ctx.exp_cartan(&x.to_complex_imag());
        factor_metrics(
            Outcome::new(status, Some(verdict.margin), witness),
            ctx,
            &z,
            &f,
        )
    }

    fn checks(&self, tally: &Tally) -> BTreeMap<alloc::string::String, Check> {
        reconstruction_check(tally)
    }
}

/// Real convexity: log a(k·exp X) ∈ conv(W·X), and every vertex wX is
/// attained at the Weyl representative of w.
pub struct KostantProbe<'a> {
    pub ctx: &'a GroupContext,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
}

impl Probe for KostantProbe<'_> {
    fn header(&self) -> ReportHeader {
        ReportHeader::new("verify-kostant", self.ctx.spec, None, self.seed)
            .tol("hull", self.tol)
            .tol("vertex", VERTEX_TOL)
            .tol("reconstruction", RECONSTRUCTION_TOL)
            .tol("box_half_width", KOSTANT_BOX)
    }

    fn samples(&self) -> u64 {
        self.samples
    }

    fn sample(&self, index: u64) -> Outcome {
        let ctx = self.ctx;
        let k = sampling::haar_k(
            ctx,
            &mut sampling::substream(self.seed, Stream::Haar, index),
        );
        let x = sampling::random_cartan_box(
            ctx,
            &mut sampling::substream(self.seed, Stream::Cartan, index),
            KOSTANT_BOX,
        );
        let mut witness = Witness::new(index).with("k", &k).with("x", &x);
        let ax = linalg::real_part(&ctx.exp_cartan(&x.to_complex_real()));
        let g = &k * &ax;
        let f = match iwasawa::decompose_real(ctx, &g) {
            Ok(f) => f,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let y = f.log_a.re();
        witness.set("log_a", &y);
        let verdict = weyl::hull_contains(ctx, &x, &y, self.tol);

        let mut vertex_error = 0.0f64;
        let mut attained = 0u64;
        for w in &ctx.weyl {
            match iwasawa::decompose_real(ctx, &(&w.representative * &ax)) {
                Ok(fw) => {
                    let err = fw.log_a.max_abs_diff(&w.action.apply(&x).to_complex_real());
                    vertex_error = vertex_error.max(err);
                    attained += (err <= VERTEX_TOL) as u64;
                }
                Err(_) => vertex_error = f64::INFINITY,
            }
        }
        witness.set("vertex_error", vertex_error);
        let status = if verdict.inside && vertex_error <= VERTEX_TOL {
            Status::Pass
        } else {
            Status::Violation
        };
        let z = linalg::to_complex(&g);
        factor_metrics(
            Outcome::new(status, Some(verdict.margin), witness),
            ctx,
            &z,
            &f,
        )
        .metric("max_vertex_error", Metric::Max(vertex_error))
        .metric("vertices_attained", Metric::Count(attained))
    }

    fn checks(&self, tally: &Tally) -> BTreeMap<alloc::string::String, Check> {
        let mut c = reconstruction_check(tally);
        if let Some(Metric::Max(v)) = tally.metrics.get("max_vertex_error") {
            c.insert(
                "vertex_attainment".to_string(),
                Check::new(*v, "<=", VERTEX_TOL),
            );
        }
        c
    }
}

/// Inputs of one gradient configuration.
pub struct GradientConfig {
    pub k: RMat,
    pub x: CartanVector,
    pub lam: CovectorIA,
    pub direction: RMat,
}

pub fn gradient_config(ctx: &GroupContext, seed: u64, index: u64) -> Result<GradientConfig> {
    let k = sampling::haar_k(ctx, &mut sampling::substream(seed, Stream::Haar, index));
    let x = regular_omega(
        ctx,
        &OmegaSpec::full(),
        &mut sampling::substream(seed, Stream::Omega, index),
    )?;
    let lam =
        random_regular_covector(ctx, &mut sampling::substream(seed, Stream::Covector, index))?;
    let mut direction = sampling::random_k_direction(
        ctx,
        &mut sampling::substream(seed, Stream::Direction, index),
    );
    let norm = linalg::fro_real(&direction);
    if norm > 0.0 {
        direction /= norm;
    }
    Ok(GradientConfig {
        k,
        x,
        lam,
        direction,
    })
}

/// Analytic gradient against central differences and against the
/// projection route.
pub struct GradientProbe<'a> {
    pub ctx: &'a GroupContext,
    pub samples: u64,
    pub seed: u64,
}

impl Probe for GradientProbe<'_> {
    fn header(&self) -> ReportHeader {
        ReportHeader::new(
            "gradient-check",
            self.ctx.spec,
            Some(OmegaSpec::full()),
            self.seed,
        )
        .tol("fd_step", FD_STEP)
        .tol("fd_median", GRADIENT_MEDIAN_TOL)
        .tol("fd_max", GRADIENT_MAX_TOL)
        .tol("route_agreement", ROUTE_AGREEMENT_TOL)
        .tol("regularity", REGULARITY_FLOOR)
    }

    fn samples(&self) -> u64 {
        self.samples
    }

    fn sample(&self, index: u64) -> Outcome {
        let ctx = self.ctx;
        let witness = Witness::new(index);
        let cfg = match gradient_config(ctx, self.seed, index) {
            Ok(c) => c,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let witness = witness
            .with("k", &cfg.k)
            .with("x", &cfg.x)
            .with("lambda_m", &cfg.lam.m_coords)
            .with("direction", &cfg.direction);
        let a_point = cfg.x.to_complex_imag();
        let result = (|| -> Result<(f64, f64, f64)> {
            let factors = f_a_factors(ctx, &a_point, &cfg.k)?;
            let t = gradient_from_factors(ctx, &factors, &cfg.lam)?;
            let analytic = k_metric(ctx, &cfg.direction, &t);
            let projected = directional_via_projection(ctx, &factors, &cfg.lam, &cfg.direction)?;
            let shifted = |h: f64| {
                f_a_lambda(
                    ctx,
                    &a_point,
                    &(linalg::skew_exp(&(&cfg.direction * h)) * &cfg.k),
                    &cfg.lam,
                )
            };
            let fd = (shifted(FD_STEP)? - shifted(-FD_STEP)?) / (2.0 * FD_STEP);
            Ok((analytic, projected, fd))
        })();
        let (analytic, projected, fd) = match result {
            Ok(v) => v,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let fd_err = (analytic - fd).abs() / (1.0 + analytic.abs());
        let route = (analytic - projected).abs();
        let witness = witness
            .with("analytic", analytic)
            .with("finite_difference", fd)
            .with("projection_route", projected);
        let status = if fd_err <= GRADIENT_MAX_TOL && route <= ROUTE_AGREEMENT_TOL {
            Status::Pass
        } else {
            Status::Violation
        };
        Outcome::new(status, Some(-fd_err), witness)
            .metric("fd_relative_error", Metric::Values(alloc::vec![fd_err]))
            .metric("max_route_disagreement", Metric::Max(route))
    }

    fn checks(&self, tally: &Tally) -> BTreeMap<alloc::string::String, Check> {
        let mut c = BTreeMap::new();
        if let Some(m) = tally.metrics.get("fd_relative_error") {
            if let crate::report::MetricSummary::Distribution { median, max, .. } =
                crate::report::summarize(m)
            {
                c.insert(
                    "fd_median".to_string(),
                    Check::new(median, "<", GRADIENT_MEDIAN_TOL),
                );
                c.insert("fd_max".to_string(), Check::new(max, "<", GRADIENT_MAX_TOL));
            }
        }
        if let Some(Metric::Max(r)) = tally.metrics.get("max_route_disagreement") {
            c.insert(
                "route_agreement".to_string(),
                Check::new(*r, "<=", ROUTE_AGREEMENT_TOL),
            );
        }
        c
    }
}

/// Gradient ascent from random starts; converged maxima must match the
/// largest Weyl value.
pub struct CriticalPointsProbe<'a> {
    pub ctx: &'a GroupContext,
    pub samples: u64,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Probe for CriticalPointsProbe<'_> {
    fn header(&self) -> ReportHeader {
        ReportHeader::new(
            "critical-points",
            self.ctx.spec,
            Some(OmegaSpec::full()),
            self.seed,
        )
        .tol("gradient_norm", self.tol)
        .tol("max_iter", self.max_iter as f64)
        .tol("gap", CRITICAL_GAP_TOL)
        .tol("armijo", ARMIJO)
        .tol("shrink", SHRINK)
        .tol("initial_step", INITIAL_STEP)
        .tol("regularity", REGULARITY_FLOOR)
        .tol("min_convergence_rate", MIN_CONVERGENCE_RATE)
    }

    fn samples(&self) -> u64 {
        self.samples
    }

    fn sample(&self, index: u64) -> Outcome {
        let ctx = self.ctx;
        let witness = Witness::new(index);
        let cfg = match gradient_config(ctx, self.seed, index) {
            Ok(c) => c,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let witness = witness
            .with("start_k", &cfg.k)
            .with("x", &cfg.x)
            .with("lambda_m", &cfg.lam.m_coords);
        let run = match ascend_critical(
            ctx,
            &cfg.x.to_complex_imag(),
            &cfg.k,
            &cfg.lam,
            self.max_iter,
            self.tol,
        ) {
            Ok(run) => run,
            Err(CrownError::NoConvergence(run)) => *run,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let witness = witness
            .with("end_k", &run.end_k)
            .with("final_value", run.final_value())
            .with("weyl_max", run.matched_weyl_value)
            .with(
                "iterations",
                crate::report::WitnessValue::Integer(run.iterations as u64),
            )
            .with("grad_norm_final", run.grad_norm_final);
        let monotone = run.f_values.windows(2).all(|w| w[1] >= w[0]);
        let base = if run.converged {
            let gap = run.gap();
            let mut o = Outcome::from_margin(-gap, CRITICAL_GAP_TOL, witness);
            if !monotone {
                o.status = Status::Violation;
            }
            o.metric("max_gap", Metric::Max(gap))
        } else {
            Outcome::new(Status::Pass, None, witness)
        };
        base.metric("converged", Metric::Count(run.converged as u64))
            .metric("not_converged", Metric::Count(!run.converged as u64))
            .metric("max_iterations", Metric::Max(run.iterations as f64))
    }

    fn checks(&self, tally: &Tally) -> BTreeMap<alloc::string::String, Check> {
        let mut c = BTreeMap::new();
        let converged = match tally.metrics.get("converged") {
            Some(Metric::Count(n)) => *n,
            _ => 0,
        };
        let rate = converged as f64 / self.samples.max(1) as f64;
        c.insert(
            "convergence_rate".to_string(),
            Check::new(rate, ">=", MIN_CONVERGENCE_RATE),
        );
        c
    }
}

/// Contrapositive probe: away from N_K(𝔞), n(k·exp(iX)) is not real.
pub struct NonRealUnipotentProbe<'a> {
    pub ctx: &'a GroupContext,
    /// Fixed regular direction; `None` draws a regular X per sample.
    pub x: Option<CartanVector>,
    pub samples: u64,
    pub seed: u64,
}

/// Haar sample of K at distance > `NORMALIZER_SEPARATION` from N_K(𝔞).
pub fn far_from_normalizer(ctx: &GroupContext, rng: &mut SampleRng) -> Result<RMat> {
    for _ in 0..REJECTION_BUDGET {
        let k = sampling::haar_k(ctx, rng);
        if ctx.normalizer_distance(&k) > NORMALIZER_SEPARATION {
            return Ok(k);
        }
    }
    Err(CrownError::RejectionStall {
        rate: 1.0 / REJECTION_BUDGET as f64,
    })
}

pub fn max_imag_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

impl Probe for NonRealUnipotentProbe<'_> {
    fn header(&self) -> ReportHeader {
        ReportHeader::new("lemma24", self.ctx.spec, Some(OmegaSpec::full()), self.seed)
            .tol("im_n_floor", IM_N_FLOOR)
            .tol("normalizer_separation", NORMALIZER_SEPARATION)
            .tol("regularity", REGULARITY_FLOOR)
    }

    fn samples(&self) -> u64 {
        self.samples
    }

    fn sample(&self, index: u64) -> Outcome {
        let ctx = self.ctx;
        let witness = Witness::new(index);
        let x = match &self.x {
            Some(x) => x.clone(),
            None => match regular_omega(
                ctx,
                &OmegaSpec::full(),
                &mut sampling::substream(self.seed, Stream::Omega, index),
            ) {
                Ok(x) => x,
                Err(e) => return Outcome::indeterminate(witness, e),
            },
        };
        let k = match far_from_normalizer(
            ctx,
            &mut sampling::substream(self.seed, Stream::Haar, index),
        ) {
            Ok(k) => k,
            Err(e) => return Outcome::indeterminate(witness, e),
        };
        let witness = witness.with("k", &k).with("x", &x);
        match iwasawa::project_complex(ctx, &k, &x, DEFAULT_STEPS) {
            Ok(f) => {
                let im_n = max_imag_entry(&f.n_part);
                let witness = witness.with("n_part", &f.n_part).with("max_im_n", im_n);
                Outcome::from_margin(im_n - IM_N_FLOOR, 0.0, witness)
                    .metric("min_im_n", Metric::Min(im_n))
            }
            Err(e) => Outcome::indeterminate(witness, e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::build_group;

    #[test]
    fn identity_and_weyl_points() {
        let ctx = build_group("sl:3".parse().unwrap()).unwrap();
        let x = CartanVector::new(alloc::vec![0.3, 0.05, -0.35]);
        let a = x.to_complex_imag();
        let id = RMat::identity(3, 3);
        assert!(f_a(&ctx, &a, &id).unwrap().max_abs_diff(&a) < 1e-14);
        let lam = CovectorIA::new(CartanVector::new(alloc::vec![1.0, -0.2, -0.8]));
        for (w, value) in ctx.weyl.iter().zip(weyl_values(&ctx, &x, &lam)) {
            let f = f_a_lambda(&ctx, &a, &w.representative, &lam).unwrap();
            assert!((f - value).abs() < 1e-10);
            let t = grad_f(&ctx, &a, &w.representative, &lam).unwrap();
            assert!(k_norm(&ctx, &t) < 1e-10);
        }
    }

    #[test]
    fn zero_point_gives_zero() {
        let ctx = build_group("sp:2".parse().unwrap()).unwrap();
        let k = sampling::haar_k(&ctx, &mut sampling::substream(3, Stream::Haar, 0));
        let lam = CovectorIA::new(CartanVector::new(alloc::vec![0.7, -0.4]));
        let f = f_a_lambda(&ctx, &CartanVector::zeros(2).to_complex_imag(), &k, &lam).unwrap();
        assert!(f.abs() < 1e-14);
    }

    #[test]
    fn sl2_ascent_reaches_vertex_max() {
        let ctx = build_group("sl:2".parse().unwrap()).unwrap();
        let x = CartanVector::new(alloc::vec![0.3, -0.3]);
        let lam = CovectorIA::new(CartanVector::new(alloc::vec![0.5, -0.5]));
        let th: f64 = 1.0;
        let k0 = RMat::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
        let run = ascend_critical(
            &ctx,
            &x.to_complex_imag(),
            &k0,
            &lam,
            DEFAULT_MAX_ITER,
            DEFAULT_ASCENT_TOL,
        )
        .unwrap();
        let expected = lam
            .evaluate_imag(&ctx, &x)
            .max(lam.evaluate_imag(&ctx, &(&x * -1.0)));
        assert!((run.final_value() - expected).abs() < 1e-6);
        assert!(run.f_values.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn separating_functional_rank_one() {
        let ctx = build_group("sl:2".parse().unwrap()).unwrap();
        let x = CartanVector::new(alloc::vec![0.3, -0.3]);
        let y = CartanVector::new(alloc::vec![0.4, -0.4]);
        let lam = separating_functional(&ctx, &x, &y).unwrap();
        assert!(lam.is_regular(&ctx, 0.0));
        let top = max_weyl_value(&ctx, &x, &lam);
        assert!(lam.evaluate_imag(&ctx, &y) > top);
        assert!(matches!(
            separating_functional(&ctx, &y, &x),
            Err(CrownError::InsideHull)
        ));
    }
}
