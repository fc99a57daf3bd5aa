//! Exact rational scalars and square-root values.
//!
//! All kernel arithmetic is `BigRational`: numerators and denominators are
//! arbitrary-precision integers kept in lowest terms with positive
//! denominator (the `Ratio` constructor enforces both).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for small rational constants.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for small integer constants as rationals.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Parses "p/q", "p", or "-p/q" into a rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::InvalidArgument(format!("malformed rational `{text}`"));
    let mut parts = text.splitn(2, '/');
    let num: BigInt = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    match parts.next() {
        None => Ok(Rational::from_integer(num)),
        Some(den) => {
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Canonical text form: "p" for integers, "p/q" otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn denominator_lcm(values: &[Rational]) -> BigInt {
    let mut acc = BigInt::one();
    for v in values {
        acc = acc.lcm(v.denom());
    }
    acc
}

/// Divides a nonzero integer vector by the gcd of its entries, keeping signs.
pub fn primitive_part(vector: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for v in vector {
        g = g.gcd(v);
    }
    if g.is_zero() || g.is_one() {
        return vector.to_vec();
    }
    vector.iter().map(|v| v / &g).collect()
}

/// Clears denominators of a rational vector, returning a primitive integer
/// vector pointing the same way.
pub fn integerize(vector: &[Rational]) -> Vec<BigInt> {
    let lcm = denominator_lcm(vector);
    let ints: Vec<BigInt> = vector
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    primitive_part(&ints)
}

/// A nonnegative value of the form `coeff * sqrt(radicand)` with exact
/// rational `coeff >= 0` and `radicand >= 0`.
///
/// Euclidean volumes of polytopes whose affine hull is not aligned with the
/// coordinate axes, and Hausdorff distances, land in this class. Comparisons
/// go through the squared value, which is rational, so ordering and equality
/// stay exact.
#[derive(Clone, Debug)]
pub struct QuadraticValue {
    coeff: Rational,
    radicand: Rational,
}

impl QuadraticValue {
    pub fn zero() -> Self {
        QuadraticValue {
            coeff: Rational::zero(),
            radicand: Rational::one(),
        }
    }

    pub fn from_rational(value: Rational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::InvalidArgument(
                "quadratic values represent nonnegative quantities".into(),
            ));
        }
        Ok(QuadraticValue {
            coeff: value,
            radicand: Rational::one(),
        })
    }

    pub fn sqrt_of(radicand: Rational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::InvalidArgument(
                "square root of a negative rational requested".into(),
            ));
        }
        Ok(QuadraticValue {
            coeff: Rational::one(),
            radicand,
        })
    }

    pub fn product(coeff: Rational, radicand: Rational) -> Result<Self> {
        if coeff.is_negative() || radicand.is_negative() {
            return Err(Error::InvalidArgument(
                "quadratic values represent nonnegative quantities".into(),
            ));
        }
        Ok(QuadraticValue { coeff, radicand })
    }

    /// The exact square of the value; always rational.
    pub fn squared(&self) -> Rational {
        &self.coeff * &self.coeff * &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero() || self.radicand.is_zero()
    }

    /// Recovers the exact rational value when the square is a perfect square.
    pub fn to_rational(&self) -> Option<Rational> {
        let sq = self.squared();
        if sq.is_zero() {
            return Some(Rational::zero());
        }
        let num = exact_sqrt(sq.numer())?;
        let den = exact_sqrt(sq.denom())?;
        Some(Rational::new(num, den))
    }
}

impl PartialEq for QuadraticValue {
    fn eq(&self, other: &Self) -> bool {
        self.squared() == other.squared()
    }
}

impl Eq for QuadraticValue {}

impl PartialOrd for QuadraticValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.squared().cmp(&other.squared())
    }
}

impl std::fmt::Display for QuadraticValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.to_rational() {
            Some(r) => write!(f, "{}", format_rational(&r)),
            None => write!(
                f,
                "{}*sqrt({})",
                format_rational(&self.coeff),
                format_rational(&self.radicand)
            ),
        }
    }
}

fn exact_sqrt(value: &BigInt) -> Option<BigInt> {
    if value.is_negative() {
        return None;
    }
    let root = value.sqrt();
    if &root * &root == *value {
        Some(root)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["3/4", "-7/2", "5", "0", "-12"] {
            let r = parse_rational(text).unwrap();
            assert_eq!(format_rational(&r), text);
        }
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn integerize_clears_denominators() {
        let v = vec![rat(1, 2), rat(-1, 3), rat_int(1)];
        let ints = integerize(&v);
        assert_eq!(ints, vec![BigInt::from(3), BigInt::from(-2), BigInt::from(6)]);
    }

    #[test]
    fn quadratic_value_ordering_and_sqrt() {
        let two = QuadraticValue::sqrt_of(rat_int(2)).unwrap();
        let three_halves = QuadraticValue::from_rational(rat(3, 2)).unwrap();
        assert!(two < three_halves); // 2 < 9/4
        assert_eq!(two.to_rational(), None);
        let four = QuadraticValue::sqrt_of(rat_int(4)).unwrap();
        assert_eq!(four.to_rational(), Some(rat_int(2)));
        assert_eq!(
            QuadraticValue::product(rat(1, 3), rat_int(9)).unwrap().to_rational(),
            Some(rat_int(1))
        );
    }
}
