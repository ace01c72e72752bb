//! Concrete matrix realizations of SL(n,ℝ) and Sp(n,ℝ).
//!
//! Both families are realized in a frame where the Iwasawa 𝔫 is strictly
//! lower-triangular, 𝔞 is diagonal and 𝔨 is skew-symmetric, so that the
//! Cartan involution is θ(g) = (gᵀ)⁻¹ for every group handled here.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::{DMatrix, DVector, Scalar};
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::cartan::{CartanVector, ComplexCartan};
use crate::error::{CrownError, Result};
use crate::linalg::{self, CMat, RMat, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    SpecialLinear,
    Symplectic,
}

/// A classical group: `sl:<n>` is SL(n,ℝ), `sp:<n>` is Sp(n,ℝ) ⊂ GL(2n,ℝ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(into = "String", try_from = "String"))]
pub struct GroupSpec {
    pub family: Family,
    pub n: usize,
}

impl GroupSpec {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        let min = match family {
            Family::SpecialLinear => 2,
            Family::Symplectic => 1,
        };
        if n < min {
            return Err(CrownError::InvalidSpec(format!(
                "{} requires n >= {min}, got {n}",
                family.prefix()
            )));
        }
        Ok(Self { family, n })
    }

    pub fn special_linear(n: usize) -> Result<Self> {
        Self::new(Family::SpecialLinear, n)
    }

    pub fn symplectic(n: usize) -> Result<Self> {
        Self::new(Family::Symplectic, n)
    }

    pub fn ambient_size(&self) -> usize {
        match self.family {
            Family::SpecialLinear => self.n,
            Family::Symplectic => 2 * self.n,
        }
    }
}

impl Family {
    fn prefix(self) -> &'static str {
        match self {
            Family::SpecialLinear => "sl",
            Family::Symplectic => "sp",
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family.prefix(), self.n)
    }
}

impl FromStr for GroupSpec {
    type Err = CrownError;

    fn from_str(s: &str) -> Result<Self> {
        let (family, n) = s
            .split_once(':')
            .ok_or_else(|| CrownError::InvalidSpec(format!("expected <family>:<n>, got `{s}`")))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| CrownError::InvalidSpec(format!("bad size in `{s}`")))?;
        match family.trim() {
            "sl" => Self::new(Family::SpecialLinear, n),
            "sp" => Self::new(Family::Symplectic, n),
            other => Err(CrownError::UnsupportedFamily(other.to_string())),
        }
    }
}

impl From<GroupSpec> for String {
    fn from(g: GroupSpec) -> String {
        g.to_string()
    }
}

impl TryFrom<String> for GroupSpec {
    type Error = CrownError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// `(w·X)_i = ±X_{perm[i]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub negate: Vec<bool>,
}

impl SignedPermutation {
    pub fn apply(&self, x: &CartanVector) -> CartanVector {
        CartanVector::new(
            self.perm
                .iter()
                .zip(&self.negate)
                .map(|(&j, &neg)| if neg { -x.coords[j] } else { x.coords[j] })
                .collect(),
        )
    }

    pub fn to_matrix(&self) -> RMat {
        let n = self.perm.len();
        let mut m = RMat::zeros(n, n);
        for (i, (&j, &neg)) in self.perm.iter().zip(&self.negate).enumerate() {
            m[(i, j)] = if neg { -1.0 } else { 1.0 };
        }
        m
    }
}

/// Restricted root system in 𝔞-coordinates.
#[derive(Debug, Clone)]
pub struct RootDatum {
    pub rank: usize,
    pub roots: Vec<Vec<f64>>,
    pub positive_roots: Vec<usize>,
    pub simple_roots: Vec<usize>,
    pub multiplicities: Vec<u32>,
    pub weyl_generators: Vec<SignedPermutation>,
}

impl RootDatum {
    pub fn eval(&self, root: usize, x: &CartanVector) -> f64 {
        self.roots[root]
            .iter()
            .zip(&x.coords)
            .filter(|(c, _)| **c != 0.0)
            .map(|(c, v)| c * v)
            .sum()
    }

    /// min over α ∈ Σ of |α(x)|.
    pub fn min_abs_root(&self, x: &CartanVector) -> f64 {
        (0..self.roots.len())
            .map(|r| self.eval(r, x).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_root(&self, x: &CartanVector) -> f64 {
        (0..self.roots.len())
            .map(|r| self.eval(r, x).abs())
            .fold(0.0, f64::max)
    }
}

/// A Weyl group element with an explicit representative in N_K(𝔞).
#[derive(Debug, Clone)]
pub struct WeylElement {
    pub action: SignedPermutation,
    pub representative: RMat,
}

/// One classical group realized concretely. Immutable once built.
#[derive(Debug, Clone)]
pub struct GroupContext {
    pub spec: GroupSpec,
    pub ambient_size: usize,
    /// `frame[p]` is the standard-basis index placed at frame position `p`.
    pub frame: Vec<usize>,
    pub basis_a: Vec<RMat>,
    pub basis_n: Vec<RMat>,
    pub basis_k: Vec<RMat>,
    /// Root index (into `root_datum.roots`) of each `basis_n` element.
    pub basis_n_roots: Vec<usize>,
    pub root_datum: RootDatum,
    pub killing_scale: f64,
    pub weyl: Vec<WeylElement>,
    /// All of N_K(𝔞) (finite for split groups: signed permutation matrices).
    pub normalizer: Vec<RMat>,
}

/// Lexicographically ordered permutations of `0..n`.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                rec(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn permutation_sign(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn unit(n: usize, i: usize, j: usize) -> RMat {
    let mut m = RMat::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

fn reindex<T: Scalar + Copy>(m: &DMatrix<T>, map: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |p, q| m[(map[p], map[q])])
}

fn inverse_map(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (p, &s) in map.iter().enumerate() {
        inv[s] = p;
    }
    inv
}

/// Builds the concrete realization of `spec`.
pub fn build_group(spec: GroupSpec) -> Result<GroupContext> {
    let spec = GroupSpec::new(spec.family, spec.n)?;
    let n = spec.n;
    let dim = spec.ambient_size();
    let frame: Vec<usize> = match spec.family {
        Family::SpecialLinear => (0..n).collect(),
        Family::Symplectic => (0..dim)
            .map(|p| if p < n { 2 * n - 1 - p } else { p - n })
            .collect(),
    };

    let roots: Vec<Vec<f64>> = match spec.family {
        Family::SpecialLinear => {
            let mut r = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let mut c = vec![0.0; n];
                        c[i] = 1.0;
                        c[j] = -1.0;
                        r.push(c);
                    }
                }
            }
            r
        }
        Family::Symplectic => {
            let mut r = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let mut c = vec![0.0; n];
                        c[i] = 1.0;
                        c[j] = -1.0;
                        r.push(c);
                    }
                }
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    for s in [1.0, -1.0] {
                        let mut c = vec![0.0; n];
                        c[i] = s;
                        c[j] = s;
                        r.push(c);
                    }
                }
            }
            for i in 0..n {
                for s in [2.0, -2.0] {
                    let mut c = vec![0.0; n];
                    c[i] = s;
                    r.push(c);
                }
            }
            r
        }
    };

    // Root vectors in the standard basis, then moved into the frame.
    let std_root_vectors: Vec<RMat> = match spec.family {
        Family::SpecialLinear => {
            let mut v = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        v.push(unit(n, i, j));
                    }
                }
            }
            v
        }
        Family::Symplectic => {
            let mut v = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        v.push(unit(dim, i, j) - unit(dim, n + j, n + i));
                    }
                }
            }
            for i in 0..n {
                for j in i..n {
                    v.push(unit(dim, i, n + j) + unit(dim, j, n + i));
                    v.push(unit(dim, n + i, j) + unit(dim, n + j, i));
                }
            }
            v
        }
    };
    let frame_vectors: Vec<RMat> = std_root_vectors
        .iter()
        .map(|m| reindex(m, &frame))
        .collect();

    let mut partial = GroupContext {
        spec,
        ambient_size: dim,
        frame,
        basis_a: Vec::new(),
        basis_n: Vec::new(),
        basis_k: Vec::new(),
        basis_n_roots: Vec::new(),
        root_datum: RootDatum {
            rank: 0,
            roots,
            positive_roots: Vec::new(),
            simple_roots: Vec::new(),
            multiplicities: Vec::new(),
            weyl_generators: Vec::new(),
        },
        killing_scale: match spec.family {
            Family::SpecialLinear => 2.0 * n as f64,
            Family::Symplectic => 2.0 * n as f64 + 2.0,
        },
        weyl: Vec::new(),
        normalizer: Vec::new(),
    };

    partial.basis_a = match spec.family {
        Family::SpecialLinear => (0..n - 1)
            .map(|i| unit(n, i, i) - unit(n, i + 1, i + 1))
            .collect(),
        Family::Symplectic => (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                partial.cartan_matrix(&CartanVector::new(e))
            })
            .collect(),
    };

    for v in frame_vectors {
        let lower = v
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .all(|(idx, _)| idx % dim > idx / dim);
        if !lower {
            continue;
        }
        let root = partial.root_of(&v).ok_or_else(|| {
            CrownError::InvalidSpec(String::from("root vector without matching root"))
        })?;
        partial.basis_k.push(&v - v.transpose());
        partial.basis_n.push(v);
        partial.basis_n_roots.push(root);
    }

    let rd = &mut partial.root_datum;
    rd.positive_roots = partial.basis_n_roots.clone();
    rd.positive_roots.sort_unstable();
    rd.multiplicities = vec![1; rd.roots.len()];
    let positive: Vec<&Vec<f64>> = rd.positive_roots.iter().map(|&r| &rd.roots[r]).collect();
    rd.simple_roots = rd
        .positive_roots
        .iter()
        .copied()
        .filter(|&r| {
            let alpha = &rd.roots[r];
            !positive.iter().any(|b| {
                positive.iter().any(|c| {
                    alpha
                        .iter()
                        .zip(b.iter())
                        .zip(c.iter())
                        .all(|((a, b), c)| *a == b + c)
                })
            })
        })
        .collect();
    rd.rank = rd.simple_roots.len();
    rd.weyl_generators = rd
        .simple_roots
        .iter()
        .map(|&r| reflection(&rd.roots[r]))
        .collect();

    partial.weyl = weyl_representatives(&partial);
    partial.normalizer = normalizer_elements(&partial);
    Ok(partial)
}

fn reflection(alpha: &[f64]) -> SignedPermutation {
    let n = alpha.len();
    let aa: f64 = alpha.iter().map(|a| a * a).sum();
    let mut perm = vec![0; n];
    let mut negate = vec![false; n];
    // image of e_j is a signed unit vector ±e_i; record (w·X)_i = ±X_j
    for j in 0..n {
        let coeff = 2.0 * alpha[j] / aa;
        let image: Vec<f64> = (0..n)
            .map(|i| if i == j { 1.0 } else { 0.0 } - coeff * alpha[i])
            .collect();
        let i = image.iter().position(|v| v.abs() > 0.5).unwrap_or(j);
        perm[i] = j;
        negate[i] = image[i] < 0.0;
    }
    SignedPermutation { perm, negate }
}

fn weyl_representatives(ctx: &GroupContext) -> Vec<WeylElement> {
    let n = ctx.spec.n;
    let mut reps = Vec::new();
    match ctx.spec.family {
        Family::SpecialLinear => {
            for p in permutations(n) {
                let mut m = RMat::zeros(n, n);
                for (j, &pj) in p.iter().enumerate() {
                    m[(pj, j)] = 1.0;
                }
                if permutation_sign(&p) < 0.0 {
                    for j in 0..n {
                        m[(0, j)] = -m[(0, j)];
                    }
                }
                reps.push(m);
            }
        }
        Family::Symplectic => {
            for p in permutations(n) {
                for mask in 0..(1usize << n) {
                    let phases: Vec<C64> = (0..n)
                        .map(|j| {
                            if mask >> j & 1 == 1 {
                                I
                            } else {
                                C64::new(1.0, 0.0)
                            }
                        })
                        .collect();
                    reps.push(ctx.unitary_to_k(&unitary_from(&p, &phases)));
                }
            }
        }
    }
    reps.into_iter()
        .map(|k| WeylElement {
            action: ctx.adjoint_action(&k),
            representative: k,
        })
        .collect()
}

fn unitary_from(perm: &[usize], phases: &[C64]) -> CMat {
    let n = perm.len();
    let mut u = CMat::zeros(n, n);
    for (j, &pj) in perm.iter().enumerate() {
        u[(pj, j)] = phases[j];
    }
    u
}

fn normalizer_elements(ctx: &GroupContext) -> Vec<RMat> {
    let n = ctx.spec.n;
    let mut out = Vec::new();
    match ctx.spec.family {
        Family::SpecialLinear => {
            for p in permutations(n) {
                let sign = permutation_sign(&p);
                for mask in 0..(1usize << n) {
                    let parity = if mask.count_ones() % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    if sign * parity < 0.0 {
                        continue;
                    }
                    let mut m = RMat::zeros(n, n);
                    for (j, &pj) in p.iter().enumerate() {
                        m[(pj, j)] = if mask >> j & 1 == 1 { -1.0 } else { 1.0 };
                    }
                    out.push(m);
                }
            }
        }
        Family::Symplectic => {
            let units = [
                C64::new(1.0, 0.0),
                I,
                C64::new(-1.0, 0.0),
                C64::new(0.0, -1.0),
            ];
            for p in permutations(n) {
                for code in 0..4usize.pow(n as u32) {
                    let phases: Vec<C64> = (0..n)
                        .map(|j| units[code / 4usize.pow(j as u32) % 4])
                        .collect();
                    out.push(ctx.unitary_to_k(&unitary_from(&p, &phases)));
                }
            }
        }
    }
    out
}

/// The three components of Z = Z_𝔫 + Z_𝔞 + Z_𝔨.
#[derive(Debug, Clone)]
pub struct AlgebraSplit {
    pub n: CMat,
    pub a: CMat,
    pub k: CMat,
}

impl GroupContext {
    pub fn rank(&self) -> usize {
        self.root_datum.rank
    }

    /// Number of 𝔞-coordinates (`n` for both families).
    pub fn coord_len(&self) -> usize {
        self.spec.n
    }

    pub fn dim_g(&self) -> usize {
        self.basis_n.len() + self.basis_a.len() + self.basis_k.len()
    }

    pub fn weyl_order(&self) -> usize {
        self.weyl.len()
    }

    /// Diagonal of the frame matrix representing `x ∈ 𝔞`.
    pub fn diag_of<T: Copy + core::ops::Neg<Output = T>>(&self, x: &[T]) -> Vec<T> {
        let n = self.spec.n;
        match self.spec.family {
            Family::SpecialLinear => x.to_vec(),
            Family::Symplectic => (0..2 * n)
                .map(|p| if p < n { -x[n - 1 - p] } else { x[p - n] })
                .collect(),
        }
    }

    /// Inverse of [`diag_of`](Self::diag_of); for Sp the upper half is ignored.
    pub fn coords_of_diag<T: Copy>(&self, d: &[T]) -> Vec<T> {
        let n = self.spec.n;
        match self.spec.family {
            Family::SpecialLinear => d.to_vec(),
            Family::Symplectic => d[n..2 * n].to_vec(),
        }
    }

    pub fn cartan_matrix(&self, x: &CartanVector) -> RMat {
        RMat::from_diagonal(&DVector::from_vec(self.diag_of(&x.coords)))
    }

    pub fn cartan_matrix_c(&self, z: &ComplexCartan) -> CMat {
        CMat::from_diagonal(&DVector::from_vec(self.diag_of(&z.coords)))
    }

    /// exp(X) for X ∈ 𝔞_ℂ.
    pub fn exp_cartan(&self, z: &ComplexCartan) -> CMat {
        let d: Vec<C64> = self
            .diag_of(&z.coords)
            .into_iter()
            .map(|w| w.exp())
            .collect();
        CMat::from_diagonal(&DVector::from_vec(d))
    }

    /// tr(diag(x)·diag(y)) on the defining representation.
    pub fn trace_pairing(&self, x: &CartanVector, y: &CartanVector) -> f64 {
        let w = match self.spec.family {
            Family::SpecialLinear => 1.0,
            Family::Symplectic => 2.0,
        };
        w * x.dot(y)
    }

    /// Projects a vector of length `n` onto the traceless hyperplane (type A);
    /// identity for type C.
    pub fn normalize_coords(&self, mut x: CartanVector) -> CartanVector {
        if self.spec.family == Family::SpecialLinear {
            let mean = x.sum() / x.len() as f64;
            for c in &mut x.coords {
                *c -= mean;
            }
        }
        x
    }

    /// Frame matrix → standard-basis matrix.
    pub fn to_standard<T: Scalar + Copy>(&self, m: &DMatrix<T>) -> DMatrix<T> {
        reindex(m, &inverse_map(&self.frame))
    }

    /// Standard-basis matrix → frame matrix.
    pub fn to_frame<T: Scalar + Copy>(&self, m: &DMatrix<T>) -> DMatrix<T> {
        reindex(m, &self.frame)
    }

    /// The symplectic form in the frame (None for SL).
    pub fn symplectic_form(&self) -> Option<RMat> {
        if self.spec.family != Family::Symplectic {
            return None;
        }
        let n = self.spec.n;
        let mut j = RMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = 1.0;
            j[(n + i, i)] = -1.0;
        }
        Some(self.to_frame(&j))
    }

    /// Embeds U = A + iB ∈ U(n) as [[A, −B], [B, A]] ∈ K ⊂ Sp(n,ℝ), in the frame.
    pub fn unitary_to_k(&self, u: &CMat) -> RMat {
        let n = u.nrows();
        let mut m = RMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = u[(i, j)].re;
                m[(i, n + j)] = -u[(i, j)].im;
                m[(n + i, j)] = u[(i, j)].im;
                m[(n + i, n + j)] = u[(i, j)].re;
            }
        }
        self.to_frame(&m)
    }

    /// Residual of the group membership test, relative to the entry scale.
    pub fn group_residual(&self, g: &CMat) -> f64 {
        match self.spec.family {
            Family::SpecialLinear => {
                let det = g.clone().determinant();
                let scale = linalg::fro(g).max(1.0).powi(self.ambient_size as i32);
                (det - C64::new(1.0, 0.0)).norm() / scale
            }
            Family::Symplectic => {
                let j = linalg::to_complex(&self.symplectic_form().unwrap_or_default());
                let scale = linalg::fro(g).max(1.0).powi(2);
                linalg::fro(&(g.transpose() * &j * g - &j)) / scale
            }
        }
    }

    pub fn check_in_group(&self, g: &CMat, tol: f64) -> Result<()> {
        if g.nrows() != self.ambient_size || g.ncols() != self.ambient_size {
            return Err(CrownError::DimensionMismatch {
                expected: self.ambient_size,
                got: g.nrows(),
            });
        }
        let residual = self.group_residual(g);
        if !(residual <= tol) {
            return Err(CrownError::NotInGroup { residual });
        }
        Ok(())
    }

    /// Distance of `k` to the finite group N_K(𝔞) (Frobenius).
    pub fn normalizer_distance(&self, k: &RMat) -> f64 {
        self.normalizer
            .iter()
            .map(|m| linalg::fro_real(&(k - m)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Signed permutation induced on 𝔞-coordinates by Ad(k), k ∈ N_K(𝔞).
    pub fn adjoint_action(&self, k: &RMat) -> SignedPermutation {
        let n = self.coord_len();
        let mut perm = vec![0; n];
        let mut negate = vec![false; n];
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let h = self.cartan_matrix(&CartanVector::new(e));
            let img = k * h * k.transpose();
            let d: Vec<f64> = (0..self.ambient_size).map(|p| img[(p, p)]).collect();
            let c = self.coords_of_diag(&d);
            let i = c.iter().position(|v| v.abs() > 0.5).unwrap_or(j);
            perm[i] = j;
            negate[i] = c[i] < 0.0;
        }
        SignedPermutation { perm, negate }
    }

    /// Ad(g)X = gXg⁻¹ for X ∈ 𝔞, read back as coordinates (only meaningful
    /// when the result is diagonal).
    pub fn adjoint_cartan(&self, k: &RMat, x: &CartanVector) -> CartanVector {
        let img = k * self.cartan_matrix(x) * k.transpose();
        let d: Vec<f64> = (0..self.ambient_size).map(|p| img[(p, p)]).collect();
        CartanVector::new(self.coords_of_diag(&d))
    }

    /// Root of a single root vector `v` (None if `v` is not one).
    fn root_of(&self, v: &RMat) -> Option<usize> {
        let dim = self.ambient_size;
        let (idx, _) = v.iter().enumerate().find(|(_, x)| **x != 0.0)?;
        let (p, q) = (idx % dim, idx / dim);
        let n = self.coord_len();
        let weight: Vec<f64> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                let d = self.diag_of(&e);
                d[p] - d[q]
            })
            .collect();
        self.root_datum.roots.iter().position(|r| r == &weight)
    }

    /// The holomorphic Cartan involution θ(g) = (gᵀ)⁻¹.
    pub fn cartan_involution(&self, g: &CMat) -> Result<CMat> {
        linalg::inverse(&g.transpose())
    }

    /// θ on the Lie algebra: X ↦ −Xᵀ.
    pub fn theta_algebra(&self, x: &CMat) -> CMat {
        -x.transpose()
    }

    /// κ_ℂ(X, Y) = c·tr(XY).
    pub fn killing(&self, x: &CMat, y: &CMat) -> C64 {
        linalg::trace(&(x * y)) * self.killing_scale
    }

    /// κ_ℝ(Z, W) = 2·Re κ_ℂ(Z, W), the Killing form of 𝔤_ℂ viewed as a real algebra.
    pub fn killing_r(&self, z: &CMat, w: &CMat) -> f64 {
        2.0 * self.killing(z, w).re
    }

    /// Splits Z ∈ 𝔤_ℂ along 𝔫_ℂ ⊕ 𝔞_ℂ ⊕ 𝔨_ℂ.
    pub fn split(&self, z: &CMat) -> AlgebraSplit {
        let upper = z.upper_triangle() - CMat::from_diagonal(&z.diagonal());
        let lower = z.lower_triangle() - CMat::from_diagonal(&z.diagonal());
        let a = CMat::from_diagonal(&z.diagonal());
        let k = &upper - upper.transpose();
        let n = lower + upper.transpose();
        AlgebraSplit { n, a, k }
    }

    /// p_{𝔞_ℂ}: the 𝔞_ℂ-component of Z along 𝔨_ℂ + 𝔫_ℂ.
    pub fn project_a(&self, z: &CMat) -> ComplexCartan {
        let d: Vec<C64> = z.diagonal().iter().copied().collect();
        ComplexCartan::new(self.coords_of_diag(&d))
    }
}

/// λ ∈ i𝔞*_ℝ, stored through M ∈ 𝔞 with H_λ = iM.
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorIA {
    pub m_coords: CartanVector,
}

impl CovectorIA {
    pub fn new(m_coords: CartanVector) -> Self {
        Self { m_coords }
    }

    pub fn is_regular(&self, ctx: &GroupContext, floor: f64) -> bool {
        ctx.root_datum.min_abs_root(&self.m_coords) > floor
    }

    /// λ(Z) = κ_ℝ(Z, iM) = −2c·tr(Im Z · M) for Z ∈ 𝔞_ℂ.
    pub fn evaluate(&self, ctx: &GroupContext, z: &ComplexCartan) -> f64 {
        self.evaluate_imag(ctx, &z.im())
    }

    /// λ(iY) for Y ∈ 𝔞.
    pub fn evaluate_imag(&self, ctx: &GroupContext, y: &CartanVector) -> f64 {
        -2.0 * ctx.killing_scale * ctx.trace_pairing(y, &self.m_coords)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.m_coords + &other.m_coords)
    }
}

/// Solves κ_ℝ(X, H_λ) = λ(X) for H_λ ∈ i𝔞 through the Gram system on `basis_a`.
pub fn h_lambda(ctx: &GroupContext, lam: &CovectorIA) -> CMat {
    let r = ctx.basis_a.len();
    let gram = RMat::from_fn(r, r, |i, j| {
        -2.0 * ctx.killing_scale * (&ctx.basis_a[i] * &ctx.basis_a[j]).trace()
    });
    let rhs = DVector::from_fn(r, |i, _| {
        let d: Vec<f64> = (0..ctx.ambient_size)
            .map(|p| ctx.basis_a[i][(p, p)])
            .collect();
        let y = CartanVector::new(ctx.coords_of_diag(&d));
        lam.evaluate_imag(ctx, &y)
    });
    let coeffs = gram.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(r));
    let mut h = CMat::zeros(ctx.ambient_size, ctx.ambient_size);
    for (c, b) in coeffs.iter().zip(&ctx.basis_a) {
        h += linalg::to_complex(b) * (I * *c);
    }
    h
}
