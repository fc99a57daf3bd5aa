//! Okounkov bodies from raw graded valuation data.
//!
//! Given pairs `(m, nu)` of a grading level and an integer valuation vector,
//! the level-normalized points `nu / m` span a truncated approximation of the
//! slice of the closed cone generated by the data. The truncation level is
//! recorded rather than hidden: downstream comparisons against closed-form
//! bodies always use containment plus a distance bound, never equality.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::body::{BodyKind, ConvexBody, Exactness};
use crate::error::{Error, Result};
use crate::exactgeom::{QuadraticValue, QVector, Rational, RationalPolytope};

/// A finite set of (level, valuation-vector) pairs. Duplicates are dropped
/// silently; vectors are nonnegative integers of the ambient length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedValuationSet {
    ambient_dim: usize,
    entries: BTreeSet<(u32, Vec<BigInt>)>,
}

impl GradedValuationSet {
    pub fn new(ambient_dim: usize, entries: Vec<(u32, Vec<BigInt>)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (level, vector) in entries {
            if level == 0 {
                return Err(Error::InvalidArgument(
                    "valuation levels must be positive".into(),
                ));
            }
            if vector.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: vector.len(),
                });
            }
            if vector.iter().any(|v| v.is_negative()) {
                return Err(Error::InvalidArgument(
                    "valuation vectors must be nonnegative".into(),
                ));
            }
            set.insert((level, vector));
        }
        Ok(GradedValuationSet {
            ambient_dim,
            entries: set,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = &(u32, Vec<BigInt>)> {
        self.entries.iter()
    }

    pub fn max_level(&self) -> u32 {
        self.entries.iter().map(|(m, _)| *m).max().unwrap_or(0)
    }

    /// The subset with level at most `cap`.
    pub fn truncated_at(&self, cap: u32) -> GradedValuationSet {
        GradedValuationSet {
            ambient_dim: self.ambient_dim,
            entries: self
                .entries
                .iter()
                .filter(|(m, _)| *m <= cap)
                .cloned()
                .collect(),
        }
    }

    /// Union with additional entries.
    pub fn extended(&self, more: &GradedValuationSet) -> GradedValuationSet {
        let mut entries = self.entries.clone();
        entries.extend(more.entries.iter().cloned());
        GradedValuationSet {
            ambient_dim: self.ambient_dim,
            entries,
        }
    }
}

/// Hull of the level-normalized valuation points `nu / m`: the truncated
/// body of the data, tagged with the highest level present.
pub fn body_from_valuations(data: &GradedValuationSet) -> Result<ConvexBody> {
    let n = data.ambient_dim();
    if data.is_empty() {
        return Ok(ConvexBody::new(
            RationalPolytope::empty(n),
            BodyKind::Raw,
            Exactness::Truncated(0),
            "semigroup",
        ));
    }
    let points: Vec<QVector> = data
        .entries()
        .map(|(m, nu)| {
            let level = Rational::from_integer(BigInt::from(*m));
            QVector::new(
                nu.iter()
                    .map(|v| Rational::from_integer(v.clone()) / level.clone())
                    .collect(),
            )
        })
        .collect();
    let polytope = RationalPolytope::convex_hull(n, &points)?;
    Ok(ConvexBody::new(
        polytope,
        BodyKind::Raw,
        Exactness::Truncated(data.max_level()),
        "semigroup",
    ))
}

/// Body of the `m`-th multiple scaled back: polytope shrunk by `1/m` with
/// metadata preserved.
pub fn scale_body(body: &ConvexBody, m: u32) -> Result<ConvexBody> {
    if m == 0 {
        return Err(Error::InvalidArgument("scale level must be positive".into()));
    }
    let factor = Rational::new(BigInt::from(1), BigInt::from(m));
    Ok(ConvexBody::new(
        body.polytope.scale(&factor)?,
        body.kind,
        body.exactness,
        body.flag_label.clone(),
    ))
}

/// Convergence diagnostics: for each level present, the exact Hausdorff
/// distance between the body truncated at that level and the body at the
/// maximum level. The sequence is nonincreasing and ends at zero.
pub fn truncation_report(data: &GradedValuationSet) -> Result<Vec<(u32, QuadraticValue)>> {
    if data.is_empty() {
        return Err(Error::InvalidArgument(
            "truncation report requires nonempty data".into(),
        ));
    }
    let levels: BTreeSet<u32> = data.entries().map(|(m, _)| *m).collect();
    let full = body_from_valuations(data)?;
    let mut report = Vec::new();
    for level in levels {
        let partial = body_from_valuations(&data.truncated_at(level))?;
        let distance = if partial.is_empty() {
            // No data at or below this level; skip rather than invent a value.
            continue;
        } else {
            full.polytope.hausdorff_distance(&partial.polytope)?
        };
        report.push((level, distance));
    }
    Ok(report)
}
