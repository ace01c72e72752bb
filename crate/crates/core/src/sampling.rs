//! Seeded random sources: per-sample substreams, Haar measure on K and
//! bounded group elements.

use alloc::vec::Vec;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cartan::CartanVector;
use crate::lie::{Family, GroupContext};
use crate::linalg::{self, CMat, RMat, C64};

pub type SampleRng = ChaCha8Rng;

/// Independent stream families; a sample's generator is keyed by
/// (run seed, stream, sample index).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Omega = 1,
    Haar = 2,
    Algebra = 3,
    Tube = 4,
    Siegel = 5,
    Covector = 6,
    Cartan = 7,
    Direction = 8,
}

pub fn substream(seed: u64, stream: Stream, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 48) | (index & ((1 << 48) - 1)));
    rng
}

pub fn gaussian(rng: &mut SampleRng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn uniform(rng: &mut SampleRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Haar-distributed element of K (SO(n), or U(n) embedded in Sp(n,ℝ)).
pub fn haar_k(ctx: &GroupContext, rng: &mut SampleRng) -> RMat {
    let n = ctx.spec.n;
    match ctx.spec.family {
        Family::SpecialLinear => {
            let g = RMat::from_fn(n, n, |_, _| gaussian(rng));
            let qr = g.qr();
            let (mut q, r) = (qr.q(), qr.r());
            for j in 0..n {
                if r[(j, j)] < 0.0 {
                    q.column_mut(j).neg_mut();
                }
            }
            if q.determinant() < 0.0 {
                q.column_mut(0).neg_mut();
            }
            q
        }
        Family::Symplectic => {
            let g = CMat::from_fn(n, n, |_, _| C64::new(gaussian(rng), gaussian(rng)));
            let qr = g.qr();
            let (mut q, r) = (qr.q(), qr.r());
            for j in 0..n {
                let d = r[(j, j)];
                let phase = if d.norm() > 0.0 {
                    d / d.norm()
                } else {
                    C64::new(1.0, 0.0)
                };
                for i in 0..n {
                    q[(i, j)] *= phase;
                }
            }
            ctx.unitary_to_k(&q)
        }
    }
}

/// Symmetric elements of 𝔤: 𝔭 = 𝔞 ⊕ {E + Eᵀ : E ∈ 𝔫}.
pub fn basis_p(ctx: &GroupContext) -> Vec<RMat> {
    ctx.basis_a
        .iter()
        .cloned()
        .chain(ctx.basis_n.iter().map(|e| e + e.transpose()))
        .collect()
}

/// Random S ∈ 𝔭 with Gaussian direction and ‖S‖_F uniform in [0, max_norm].
pub fn random_p(ctx: &GroupContext, rng: &mut SampleRng, max_norm: f64) -> RMat {
    let dim = ctx.ambient_size;
    let mut s = RMat::zeros(dim, dim);
    for b in basis_p(ctx) {
        s += b * gaussian(rng);
    }
    let norm = linalg::fro_real(&s);
    let radius = uniform(rng, 0.0, max_norm);
    if norm > 0.0 {
        s *= radius / norm;
    }
    s
}

/// g = k·exp(S) with k Haar in K and S ∈ 𝔭, ‖S‖ ≤ max_norm.
pub fn random_group_element(ctx: &GroupContext, rng: &mut SampleRng, max_norm: f64) -> RMat {
    let k = haar_k(ctx, rng);
    let s = random_p(ctx, rng, max_norm);
    k * linalg::sym_exp(&s)
}

/// Uniform point in a box of half-width `half_width`, projected to 𝔞.
pub fn random_cartan_box(ctx: &GroupContext, rng: &mut SampleRng, half_width: f64) -> CartanVector {
    let x: Vec<f64> = (0..ctx.coord_len())
        .map(|_| uniform(rng, -half_width, half_width))
        .collect();
    ctx.normalize_coords(CartanVector::new(x))
}

/// Random element of 𝔨 with standard Gaussian coefficients on `basis_k`.
pub fn random_k_direction(ctx: &GroupContext, rng: &mut SampleRng) -> RMat {
    let dim = ctx.ambient_size;
    let mut t = RMat::zeros(dim, dim);
    for b in &ctx.basis_k {
        t += b * gaussian(rng);
    }
    t
}

pub fn diag(values: Vec<f64>) -> RMat {
    RMat::from_diagonal(&DVector::from_vec(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::build_group;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let a: f64 = substream(7, Stream::Haar, 3).random();
        let b: f64 = substream(7, Stream::Haar, 3).random();
        let c: f64 = substream(7, Stream::Haar, 4).random();
        let d: f64 = substream(7, Stream::Omega, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn haar_samples_lie_in_k() {
        for spec in ["sl:3", "sp:2"] {
            let ctx = build_group(spec.parse().unwrap()).unwrap();
            let mut rng = substream(1, Stream::Haar, 0);
            for _ in 0..20 {
                let k = haar_k(&ctx, &mut rng);
                let dim = ctx.ambient_size;
                assert!(linalg::fro_real(&(&k * k.transpose() - RMat::identity(dim, dim))) < 1e-12);
                ctx.check_in_group(&linalg::to_complex(&k), 1e-12).unwrap();
            }
        }
    }

    #[test]
    fn group_elements_lie_in_g() {
        for spec in ["sl:2", "sl:3", "sp:2", "sp:3"] {
            let ctx = build_group(spec.parse().unwrap()).unwrap();
            let mut rng = substream(2, Stream::Algebra, 0);
            for _ in 0..20 {
                let g = random_group_element(&ctx, &mut rng, 1.5);
                ctx.check_in_group(&linalg::to_complex(&g), 1e-10).unwrap();
            }
        }
    }
}
