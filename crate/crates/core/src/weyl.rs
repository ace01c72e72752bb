//! Weyl group orbits, the polytope Ω and its W-invariant subdomains ω,
//! and exact membership tests for conv(W·X).
//!
//! Membership uses the classical majorization description of Weyl orbit
//! hulls: for type A, Y ∈ conv(S_n·X) iff the descending rearrangement of Y
//! is majorized by that of X; for type C, iff |Y| sorted descending is weakly
//! submajorized by |X| sorted descending.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;
use core::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::cartan::CartanVector;
use crate::error::{CrownError, Result};
use crate::lie::{permutations, Family, GroupContext};
use crate::sampling::{self, SampleRng, Stream};

/// Default boundary tolerance for hull membership.
pub const HULL_TOL: f64 = 1e-9;
/// Tolerance used to merge coincident orbit points.
pub const ORBIT_DEDUP_TOL: f64 = 1e-12;
/// Attempts after which a sampler with no acceptance is declared stalled.
pub const REJECTION_BUDGET: usize = 10_000;

/// An open, convex, W-invariant ω ⊆ Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(into = "String", try_from = "String"))]
pub enum OmegaSpec {
    /// ω = c·Ω, c ∈ (0, 1].
    Scaled { c: f64 },
    /// ω = {‖X‖ < ρ} ∩ Ω.
    BallCap { radius: f64 },
}

impl OmegaSpec {
    pub fn full() -> Self {
        OmegaSpec::Scaled { c: 1.0 }
    }

    pub fn scaled(c: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(CrownError::InvalidOmega(format!(
                "scale must lie in (0, 1], got {c}"
            )));
        }
        Ok(OmegaSpec::Scaled { c })
    }

    pub fn ball(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(CrownError::InvalidOmega(format!(
                "radius must be positive, got {radius}"
            )));
        }
        Ok(OmegaSpec::BallCap { radius })
    }
}

impl fmt::Display for OmegaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaSpec::Scaled { c } => write!(f, "scale:{c}"),
            OmegaSpec::BallCap { radius } => write!(f, "ball:{radius}"),
        }
    }
}

impl FromStr for OmegaSpec {
    type Err = CrownError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s.split_once(':').ok_or_else(|| {
            CrownError::InvalidOmega(format!("expected scale:<c> or ball:<rho>, got `{s}`"))
        })?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| CrownError::InvalidOmega(format!("bad number in `{s}`")))?;
        match kind.trim() {
            "scale" => Self::scaled(v),
            "ball" => Self::ball(v),
            other => Err(CrownError::InvalidOmega(format!(
                "unknown omega shape `{other}`"
            ))),
        }
    }
}

impl From<OmegaSpec> for String {
    fn from(o: OmegaSpec) -> String {
        o.to_string()
    }
}

impl TryFrom<String> for OmegaSpec {
    type Error = CrownError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Signed margin of `x` in ω: positive iff x ∈ ω.
pub fn omega_margin(ctx: &GroupContext, spec: &OmegaSpec, x: &CartanVector) -> f64 {
    let roots = ctx.root_datum.max_abs_root(x);
    match *spec {
        OmegaSpec::Scaled { c } => c * FRAC_PI_2 - roots,
        OmegaSpec::BallCap { radius } => (FRAC_PI_2 - roots).min(radius - x.norm()),
    }
}

fn signed_images(ctx: &GroupContext, x: &CartanVector) -> Vec<CartanVector> {
    let n = x.len();
    let perms = permutations(n);
    let masks: usize = match ctx.spec.family {
        Family::SpecialLinear => 1,
        Family::Symplectic => 1 << n,
    };
    let mut out = Vec::with_capacity(perms.len() * masks);
    for p in &perms {
        for mask in 0..masks {
            out.push(CartanVector::new(
                p.iter()
                    .enumerate()
                    .map(|(i, &j)| {
                        if mask >> i & 1 == 1 {
                            -x.coords[j]
                        } else {
                            x.coords[j]
                        }
                    })
                    .collect(),
            ));
        }
    }
    out
}

/// The full orbit W·x without duplicates.
pub fn weyl_orbit(ctx: &GroupContext, x: &CartanVector) -> Vec<CartanVector> {
    let mut orbit: Vec<CartanVector> = Vec::new();
    for y in signed_images(ctx, x) {
        if !orbit.iter().any(|o| o.max_abs_diff(&y) <= ORBIT_DEDUP_TOL) {
            orbit.push(y);
        }
    }
    orbit
}

/// Canonical chamber representative: descending (type A) or |·|-descending (type C).
pub fn dominant_rep(ctx: &GroupContext, x: &CartanVector) -> CartanVector {
    let mut c: Vec<f64> = match ctx.spec.family {
        Family::SpecialLinear => x.coords.clone(),
        Family::Symplectic => x.coords.iter().map(|v| v.abs()).collect(),
    };
    c.sort_by(|a, b| b.total_cmp(a));
    CartanVector::new(c)
}

/// Outcome of a hull-membership query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullVerdict {
    pub inside: bool,
    /// Minimum slack over the prefix-sum constraints; negative when outside.
    pub margin: f64,
}

/// Is `y ∈ conv(W·x)`? Ties at exactly `tol` count as inside.
pub fn hull_contains(
    ctx: &GroupContext,
    x: &CartanVector,
    y: &CartanVector,
    tol: f64,
) -> HullVerdict {
    let xd = dominant_rep(ctx, x);
    let yd = dominant_rep(ctx, y);
    let len = xd.len();
    let constraints = match ctx.spec.family {
        Family::SpecialLinear => len - 1,
        Family::Symplectic => len,
    };
    let (mut px, mut py) = (0.0, 0.0);
    let mut margin = f64::INFINITY;
    for k in 0..constraints {
        px += xd.coords[k];
        py += yd.coords[k];
        margin = margin.min(px - py);
    }
    let mut inside = margin >= -tol;
    if ctx.spec.family == Family::SpecialLinear {
        let total = (xd.sum() - yd.sum()).abs();
        if total > tol {
            inside = false;
            margin = margin.min(-total);
        }
    }
    HullVerdict { inside, margin }
}

/// conv(W·X), remembered through its dominant representative.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPolytope {
    pub source: CartanVector,
    pub dominant: CartanVector,
}

impl OrbitPolytope {
    pub fn new(ctx: &GroupContext, source: CartanVector) -> Self {
        let dominant = dominant_rep(ctx, &source);
        Self { source, dominant }
    }

    pub fn vertices(&self, ctx: &GroupContext) -> Vec<CartanVector> {
        weyl_orbit(ctx, &self.source)
    }

    pub fn contains(&self, ctx: &GroupContext, y: &CartanVector, tol: f64) -> HullVerdict {
        hull_contains(ctx, &self.dominant, y, tol)
    }

    /// max over the polytope of ⟨mu, ·⟩, evaluated over the explicit vertices.
    pub fn support(&self, ctx: &GroupContext, mu: &CartanVector) -> f64 {
        self.vertices(ctx)
            .iter()
            .map(|v| v.dot(mu))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// One uniform sample of ω by rejection from its bounding box.
pub fn sample_omega_one(
    ctx: &GroupContext,
    spec: &OmegaSpec,
    rng: &mut SampleRng,
) -> Result<CartanVector> {
    let n = ctx.coord_len();
    let root_box = match ctx.spec.family {
        Family::SpecialLinear => (n as f64 - 1.0) / n as f64,
        Family::Symplectic => 0.5,
    };
    let half = match *spec {
        OmegaSpec::Scaled { c } => root_box * c * FRAC_PI_2,
        OmegaSpec::BallCap { radius } => (root_box * FRAC_PI_2).min(radius),
    };
    for _ in 0..REJECTION_BUDGET {
        let mut x: Vec<f64> = match ctx.spec.family {
            // uniform on the traceless hyperplane through its first n−1 coordinates
            Family::SpecialLinear => (0..n - 1)
                .map(|_| sampling::uniform(rng, -half, half))
                .collect(),
            Family::Symplectic => (0..n)
                .map(|_| sampling::uniform(rng, -half, half))
                .collect(),
        };
        if ctx.spec.family == Family::SpecialLinear {
            let s: f64 = x.iter().sum();
            x.push(-s);
        }
        let x = CartanVector::new(x);
        if omega_margin(ctx, spec, &x) > 0.0 {
            return Ok(x);
        }
    }
    Err(CrownError::RejectionStall {
        rate: 1.0 / REJECTION_BUDGET as f64,
    })
}

/// `count` i.i.d. samples of ω; sample `i` comes from substream (seed, i).
pub fn sample_omega(
    ctx: &GroupContext,
    spec: &OmegaSpec,
    seed: u64,
    count: usize,
) -> Result<Vec<CartanVector>> {
    if count == 0 {
        return Err(CrownError::InvalidArgument(
            "count must be at least 1".to_string(),
        ));
    }
    (0..count)
        .map(|i| {
            sample_omega_one(
                ctx,
                spec,
                &mut sampling::substream(seed, Stream::Omega, i as u64),
            )
        })
        .collect()
}

/// Minimum-norm point of conv(points) (Wolfe's algorithm). Returns the point.
pub fn min_norm_point(points: &[Vec<f64>]) -> Vec<f64> {
    let dim = points.first().map_or(0, |p| p.len());
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let combo = |idx: &[usize], w: &[f64]| {
        let mut out = vec![0.0; dim];
        for (&i, &wi) in idx.iter().zip(w) {
            for (o, p) in out.iter_mut().zip(&points[i]) {
                *o += wi * p;
            }
        }
        out
    };
    let scale = points
        .iter()
        .map(|p| dot(p, p))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let eps = 1e-12;

    let start = (0..points.len())
        .min_by(|&a, &b| dot(&points[a], &points[a]).total_cmp(&dot(&points[b], &points[b])))
        .unwrap_or(0);
    let mut set = vec![start];
    let mut w = vec![1.0];
    let mut x = points[start].clone();

    for _ in 0..10 * points.len() + 10 {
        let xx = dot(&x, &x);
        let j = (0..points.len())
            .min_by(|&a, &b| dot(&x, &points[a]).total_cmp(&dot(&x, &points[b])))
            .unwrap_or(0);
        if xx - dot(&x, &points[j]) <= eps * scale || set.contains(&j) {
            break;
        }
        set.push(j);
        w.push(0.0);
        loop {
            let v = affine_min_norm(points, &set);
            if v.iter().all(|&vi| vi > eps) {
                w = v;
                x = combo(&set, &w);
                break;
            }
            let mut theta = 1.0f64;
            for (wi, vi) in w.iter().zip(&v) {
                if *vi <= eps && wi - vi > 0.0 {
                    theta = theta.min(wi / (wi - vi));
                }
            }
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi = theta * vi + (1.0 - theta) * *wi;
            }
            let mut keep_set = Vec::new();
            let mut keep_w = Vec::new();
            for (&i, &wi) in set.iter().zip(&w) {
                if wi > eps {
                    keep_set.push(i);
                    keep_w.push(wi);
                }
            }
            if keep_set.is_empty() {
                keep_set.push(set[0]);
                keep_w.push(1.0);
            }
            let total: f64 = keep_w.iter().sum();
            set = keep_set;
            w = keep_w.into_iter().map(|wi| wi / total).collect();
        }
    }
    x
}

/// Affine minimizer of ‖Σ vᵢ pᵢ‖ subject to Σ vᵢ = 1.
fn affine_min_norm(points: &[Vec<f64>], set: &[usize]) -> Vec<f64> {
    let m = set.len();
    let mut kkt = DMatrix::<f64>::zeros(m + 1, m + 1);
    for (a, &i) in set.iter().enumerate() {
        for (b, &j) in set.iter().enumerate() {
            kkt[(a, b)] = points[i].iter().zip(&points[j]).map(|(x, y)| x * y).sum();
        }
        kkt[(a, m)] = 1.0;
        kkt[(m, a)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(m + 1);
    rhs[m] = 1.0;
    match kkt.lu().solve(&rhs) {
        Some(sol) => sol.rows(0, m).iter().copied().collect(),
        None => vec![1.0 / m as f64; m],
    }
}

/// Euclidean projection of `y` onto conv(W·x).
pub fn project_onto_hull(ctx: &GroupContext, x: &CartanVector, y: &CartanVector) -> CartanVector {
    let shifted: Vec<Vec<f64>> = weyl_orbit(ctx, x).iter().map(|v| (v - y).coords).collect();
    let m = min_norm_point(&shifted);
    &CartanVector::new(m) + y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::build_group;

    fn ctx(s: &str) -> GroupContext {
        build_group(s.parse().unwrap()).unwrap()
    }

    fn v(c: &[f64]) -> CartanVector {
        CartanVector::new(c.to_vec())
    }

    #[test]
    fn orbit_sizes() {
        let a2 = ctx("sl:3");
        assert_eq!(weyl_orbit(&a2, &v(&[0.0, 0.0, 0.0])).len(), 1);
        assert_eq!(weyl_orbit(&a2, &v(&[0.3, 0.0, -0.3])).len(), 6);
        let c2 = ctx("sp:2");
        assert_eq!(weyl_orbit(&c2, &v(&[0.5, 0.5])).len(), 4);
        assert_eq!(weyl_orbit(&c2, &v(&[0.5, 0.2])).len(), 8);
    }

    #[test]
    fn dominant_examples() {
        assert_eq!(
            dominant_rep(&ctx("sl:3"), &v(&[-0.3, 0.3, 0.0])),
            v(&[0.3, 0.0, -0.3])
        );
        assert_eq!(dominant_rep(&ctx("sp:2"), &v(&[-0.5, 0.2])), v(&[0.5, 0.2]));
    }

    #[test]
    fn hull_examples() {
        let a2 = ctx("sl:3");
        let x = v(&[0.3, 0.0, -0.3]);
        assert!(hull_contains(&a2, &x, &v(&[0.25, 0.05, -0.3]), HULL_TOL).inside);
        let out = hull_contains(&a2, &x, &v(&[0.4, -0.1, -0.3]), HULL_TOL);
        assert!(!out.inside);
        assert!((out.margin + 0.1).abs() < 1e-12);
        let c2 = ctx("sp:2");
        let x = v(&[0.5, 0.2]);
        assert!(hull_contains(&c2, &x, &v(&[0.4, 0.1]), HULL_TOL).inside);
        let out = hull_contains(&c2, &x, &v(&[0.6, 0.0]), HULL_TOL);
        assert!(!out.inside);
        assert!((out.margin + 0.1).abs() < 1e-12);
    }

    #[test]
    fn orbit_points_are_inside() {
        let c2 = ctx("sp:2");
        let x = v(&[0.5, 0.2]);
        for w in weyl_orbit(&c2, &x) {
            assert!(hull_contains(&c2, &x, &w, HULL_TOL).inside);
        }
    }

    #[test]
    fn omega_margin_examples() {
        let a1 = ctx("sl:2");
        let full = OmegaSpec::full();
        assert!((omega_margin(&a1, &full, &v(&[0.0, 0.0])) - FRAC_PI_2).abs() < 1e-15);
        assert!(
            (omega_margin(&a1, &OmegaSpec::scaled(0.5).unwrap(), &v(&[0.0, 0.0]))
                - 0.5 * FRAC_PI_2)
                .abs()
                < 1e-15
        );
        assert!((omega_margin(&a1, &full, &v(&[0.2, -0.2])) - (FRAC_PI_2 - 0.4)).abs() < 1e-15);
        let c2 = ctx("sp:2");
        assert!((omega_margin(&c2, &full, &v(&[0.5, 0.2])) - (FRAC_PI_2 - 1.0)).abs() < 1e-15);
        let ball = OmegaSpec::ball(0.3).unwrap();
        assert!((omega_margin(&c2, &ball, &v(&[0.0, 0.1])) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn omega_spec_parsing() {
        assert_eq!(
            "scale:0.8".parse::<OmegaSpec>().unwrap(),
            OmegaSpec::Scaled { c: 0.8 }
        );
        assert_eq!(
            "ball:0.5".parse::<OmegaSpec>().unwrap(),
            OmegaSpec::BallCap { radius: 0.5 }
        );
        assert!("scale:1.5".parse::<OmegaSpec>().is_err());
        assert!("ball:-1".parse::<OmegaSpec>().is_err());
        assert!("cube:1".parse::<OmegaSpec>().is_err());
        assert_eq!(OmegaSpec::Scaled { c: 0.8 }.to_string(), "scale:0.8");
    }

    #[test]
    fn samples_lie_in_omega_and_repeat() {
        for (g, o) in [
            ("sl:3", "scale:1.0"),
            ("sp:2", "ball:0.4"),
            ("sl:4", "scale:0.5"),
        ] {
            let c = ctx(g);
            let spec: OmegaSpec = o.parse().unwrap();
            let a = sample_omega(&c, &spec, 11, 200).unwrap();
            assert!(a.iter().all(|x| omega_margin(&c, &spec, x) > 0.0));
            assert_eq!(a, sample_omega(&c, &spec, 11, 200).unwrap());
        }
        assert!(sample_omega(&ctx("sl:2"), &OmegaSpec::full(), 1, 0).is_err());
    }

    #[test]
    fn min_norm_point_of_segment() {
        let p = min_norm_point(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12);
        let q = min_norm_point(&[vec![-1.0, 2.0], vec![1.0, 2.0], vec![0.0, 3.0]]);
        assert!(q[0].abs() < 1e-12 && (q[1] - 2.0).abs() < 1e-12);
    }
}
