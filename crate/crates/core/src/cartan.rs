//! Coordinates on the Cartan subspace 𝔞 and its complexification.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::linalg::C64;

/// A point of 𝔞 in the coordinates of a [`GroupContext`](crate::lie::GroupContext).
///
/// Type A uses the `n` diagonal entries (traceless); type C uses the `n`
/// entries `x` of `diag(x, -x)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct CartanVector {
    pub coords: Vec<f64>,
}

impl CartanVector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            coords: alloc::vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Euclidean norm, summed in sorted order so that it is bit-identical
    /// on every signed permutation of the coordinates.
    pub fn norm(&self) -> f64 {
        let mut sq: Vec<f64> = self.coords.iter().map(|x| x * x).collect();
        sq.sort_by(|a, b| a.total_cmp(b));
        sq.iter().sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.coords.iter().sum()
    }

    pub fn to_complex_imag(&self) -> ComplexCartan {
        ComplexCartan {
            coords: self.coords.iter().map(|&x| C64::new(0.0, x)).collect(),
        }
    }

    pub fn to_complex_real(&self) -> ComplexCartan {
        ComplexCartan {
            coords: self.coords.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }
}

impl From<Vec<f64>> for CartanVector {
    fn from(coords: Vec<f64>) -> Self {
        Self { coords }
    }
}

impl Add for &CartanVector {
    type Output = CartanVector;
    fn add(self, rhs: Self) -> CartanVector {
        CartanVector::new(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &CartanVector {
    type Output = CartanVector;
    fn sub(self, rhs: Self) -> CartanVector {
        CartanVector::new(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Mul<f64> for &CartanVector {
    type Output = CartanVector;
    fn mul(self, rhs: f64) -> CartanVector {
        CartanVector::new(self.coords.iter().map(|a| a * rhs).collect())
    }
}

/// A point of 𝔞_ℂ = 𝔞 + i𝔞 in the same coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexCartan {
    pub coords: Vec<C64>,
}

impl ComplexCartan {
    pub fn new(coords: Vec<C64>) -> Self {
        Self { coords }
    }

    pub fn from_parts(re: &CartanVector, im: &CartanVector) -> Self {
        Self {
            coords: re
                .coords
                .iter()
                .zip(&im.coords)
                .map(|(&a, &b)| C64::new(a, b))
                .collect(),
        }
    }

    pub fn re(&self) -> CartanVector {
        CartanVector::new(self.coords.iter().map(|z| z.re).collect())
    }

    pub fn im(&self) -> CartanVector {
        CartanVector::new(self.coords.iter().map(|z| z.im).collect())
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for ComplexCartan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for z in &self.coords {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}
