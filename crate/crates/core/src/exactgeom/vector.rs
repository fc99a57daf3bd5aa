//! Fixed-length rational coordinate vectors.

use num_bigint::BigInt;
use num_traits::Zero;

use super::rational::Rational;
use crate::error::{Error, Result};

/// A point or direction with exact rational coordinates. The length is fixed
/// at creation and equals the ambient dimension it lives in.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QVector {
    coords: Vec<Rational>,
}

impl QVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        QVector { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        QVector {
            coords: vec![Rational::zero(); dim],
        }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        QVector {
            coords: coords
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn coord(&self, index: usize) -> &Rational {
        &self.coords[index]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn dot(&self, other: &QVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Pairing with an integer normal vector.
    pub fn dot_int(&self, normal: &[BigInt]) -> Rational {
        debug_assert_eq!(self.dim(), normal.len());
        self.coords
            .iter()
            .zip(normal)
            .map(|(a, b)| a * Rational::from_integer(b.clone()))
            .sum()
    }

    pub fn add(&self, other: &QVector) -> QVector {
        debug_assert_eq!(self.dim(), other.dim());
        QVector::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &QVector) -> QVector {
        debug_assert_eq!(self.dim(), other.dim());
        QVector::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, factor: &Rational) -> QVector {
        QVector::new(self.coords.iter().map(|c| c * factor).collect())
    }

    pub fn norm_sq(&self) -> Rational {
        self.dot(self)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for QVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", super::rational::format_rational(c))?;
        }
        write!(f, ")")
    }
}
