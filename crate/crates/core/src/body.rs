//! The shared convex-body value: a rational polytope tagged with how it was
//! produced and whether it is exact or a finite-level truncation.

use crate::exactgeom::RationalPolytope;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BodyKind {
    Valuative,
    Limiting,
    Restricted,
    Raw,
}

impl BodyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BodyKind::Valuative => "valuative",
            BodyKind::Limiting => "limiting",
            BodyKind::Restricted => "restricted",
            BodyKind::Raw => "raw",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    /// Hull of valuation data up to the given grading level.
    Truncated(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexBody {
    pub polytope: RationalPolytope,
    pub kind: BodyKind,
    pub exactness: Exactness,
    pub flag_label: String,
}

impl ConvexBody {
    pub fn new(
        polytope: RationalPolytope,
        kind: BodyKind,
        exactness: Exactness,
        flag_label: impl Into<String>,
    ) -> Self {
        ConvexBody {
            polytope,
            kind,
            exactness,
            flag_label: flag_label.into(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.polytope.is_empty()
    }
}
