//! JSON schemas for every value that crosses a file boundary: polytopes,
//! fans, divisors, flags, orbit cones, valuation sets, surface models and
//! bodies. Rationals serialize as integers when they fit, "p/q" strings
//! otherwise; deserialization accepts both.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::body::{BodyKind, ConvexBody, Exactness};
use crate::error::{Error, Result};
use crate::exactgeom::{
    format_rational, parse_rational, Halfspace, HalfspaceSystem, QVector, Rational,
    RationalPolytope,
};
use crate::semigroup::GradedValuationSet;
use crate::surface::{
    Curve, DivisorClass, EffectiveGenerator, FlagCurve, FlagPoint, PiecewiseLinearFn, SurfaceBody,
    SurfaceFlag, SurfaceModel,
};
use crate::toric::{Fan, InvariantFlag, OrbitCone, TorusDivisor};

/// Wire form of a rational number: a JSON integer when it fits in i64 and
/// is integral, otherwise a string "p" or "p/q".
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum JsonRat {
    Int(i64),
    Text(String),
}

impl JsonRat {
    pub fn from_rational(value: &Rational) -> Self {
        if value.denom().is_one() {
            if let Ok(small) = i64::try_from(value.numer().clone()) {
                return JsonRat::Int(small);
            }
        }
        JsonRat::Text(format_rational(value))
    }

    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            JsonRat::Int(v) => Ok(Rational::from_integer(BigInt::from(*v))),
            JsonRat::Text(s) => parse_rational(s).map_err(|e| Error::Schema(e.to_string())),
        }
    }
}

fn rat_vec(values: &[Rational]) -> Vec<JsonRat> {
    values.iter().map(JsonRat::from_rational).collect()
}

fn parse_rat_vec(values: &[JsonRat]) -> Result<Vec<Rational>> {
    values.iter().map(|v| v.to_rational()).collect()
}

/// Wire form of an integer: i64 when possible, decimal string otherwise.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum JsonInt {
    Int(i64),
    Text(String),
}

impl JsonInt {
    pub fn from_bigint(value: &BigInt) -> Self {
        match i64::try_from(value.clone()) {
            Ok(v) => JsonInt::Int(v),
            Err(_) => JsonInt::Text(value.to_string()),
        }
    }

    pub fn to_bigint(&self) -> Result<BigInt> {
        match self {
            JsonInt::Int(v) => Ok(BigInt::from(*v)),
            JsonInt::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Schema(format!("malformed integer `{s}`"))),
        }
    }
}

fn int_vec(values: &[BigInt]) -> Vec<JsonInt> {
    values.iter().map(JsonInt::from_bigint).collect()
}

fn parse_int_vec(values: &[JsonInt]) -> Result<Vec<BigInt>> {
    values.iter().map(|v| v.to_bigint()).collect()
}

// ---------------------------------------------------------------------------
// Polytopes and bodies
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HalfspaceDoc {
    pub normal: Vec<JsonInt>,
    pub bound: JsonRat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeDoc {
    pub ambient_dim: usize,
    pub empty: bool,
    pub vertices: Vec<Vec<JsonRat>>,
    pub halfspaces: Vec<HalfspaceDoc>,
}

impl PolytopeDoc {
    pub fn from_polytope(p: &RationalPolytope) -> Self {
        PolytopeDoc {
            ambient_dim: p.ambient_dim(),
            empty: p.is_empty(),
            vertices: p.vertices().iter().map(|v| rat_vec(v.coords())).collect(),
            halfspaces: p
                .halfspaces()
                .rows()
                .iter()
                .map(|hs| HalfspaceDoc {
                    normal: int_vec(&hs.normal),
                    bound: JsonRat::from_rational(&hs.bound),
                })
                .collect(),
        }
    }

    pub fn to_polytope(&self) -> Result<RationalPolytope> {
        if self.empty {
            return Ok(RationalPolytope::empty(self.ambient_dim));
        }
        let vertices: Vec<QVector> = self
            .vertices
            .iter()
            .map(|v| parse_rat_vec(v).map(QVector::new))
            .collect::<Result<_>>()?;
        // The vertex list is authoritative; the rebuilt polytope re-derives
        // the canonical halfspaces, which keeps parsed bodies consistent.
        let rebuilt = RationalPolytope::convex_hull(self.ambient_dim, &vertices)?;
        if !self.halfspaces.is_empty() {
            let rows: Vec<Halfspace> = self
                .halfspaces
                .iter()
                .map(|h| Halfspace::new(parse_int_vec(&h.normal)?, h.bound.to_rational()?))
                .collect::<Result<_>>()?;
            let system = HalfspaceSystem::new(self.ambient_dim, rows)?;
            for v in rebuilt.vertices() {
                if !system.contains(v) {
                    return Err(Error::Schema(
                        "vertex data contradicts the halfspace data".into(),
                    ));
                }
            }
        }
        Ok(rebuilt)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BodyDoc {
    pub polytope: PolytopeDoc,
    pub kind: String,
    pub exactness: String,
    pub flag_label: String,
}

impl BodyDoc {
    pub fn from_body(body: &ConvexBody) -> Self {
        BodyDoc {
            polytope: PolytopeDoc::from_polytope(&body.polytope),
            kind: body.kind.as_str().into(),
            exactness: match body.exactness {
                Exactness::Exact => "exact".into(),
                Exactness::Truncated(level) => format!("truncated:{level}"),
            },
            flag_label: body.flag_label.clone(),
        }
    }

    pub fn to_body(&self) -> Result<ConvexBody> {
        let kind = match self.kind.as_str() {
            "valuative" => BodyKind::Valuative,
            "limiting" => BodyKind::Limiting,
            "restricted" => BodyKind::Restricted,
            "raw" => BodyKind::Raw,
            other => return Err(Error::Schema(format!("unknown body kind `{other}`"))),
        };
        let exactness = if self.exactness == "exact" {
            Exactness::Exact
        } else if let Some(level) = self.exactness.strip_prefix("truncated:") {
            Exactness::Truncated(
                level
                    .parse()
                    .map_err(|_| Error::Schema("malformed truncation level".into()))?,
            )
        } else {
            return Err(Error::Schema(format!(
                "unknown exactness `{}`",
                self.exactness
            )));
        };
        Ok(ConvexBody::new(
            self.polytope.to_polytope()?,
            kind,
            exactness,
            self.flag_label.clone(),
        ))
    }
}

// ---------------------------------------------------------------------------
// Toric inputs
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FanDoc {
    pub dim: usize,
    pub rays: Vec<Vec<JsonInt>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl FanDoc {
    pub fn from_fan(fan: &Fan) -> Self {
        FanDoc {
            dim: fan.dim(),
            rays: fan.rays().iter().map(|r| int_vec(r)).collect(),
            max_cones: fan.max_cones().to_vec(),
        }
    }

    pub fn to_fan(&self) -> Result<Fan> {
        let rays: Vec<Vec<BigInt>> = self
            .rays
            .iter()
            .map(|r| parse_int_vec(r))
            .collect::<Result<_>>()?;
        Fan::new(self.dim, rays, self.max_cones.clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivisorDoc {
    pub coeffs: BTreeMap<String, JsonRat>,
}

impl DivisorDoc {
    pub fn from_divisor(divisor: &TorusDivisor) -> Self {
        DivisorDoc {
            coeffs: divisor
                .coeffs()
                .iter()
                .map(|(i, a)| (i.to_string(), JsonRat::from_rational(a)))
                .collect(),
        }
    }

    pub fn to_divisor(&self) -> Result<TorusDivisor> {
        let mut coeffs = BTreeMap::new();
        for (key, value) in &self.coeffs {
            let index: usize = key
                .parse()
                .map_err(|_| Error::Schema(format!("malformed ray index `{key}`")))?;
            coeffs.insert(index, value.to_rational()?);
        }
        Ok(TorusDivisor::new(coeffs))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlagDoc {
    pub ray_order: Vec<usize>,
}

impl FlagDoc {
    pub fn to_flag(&self) -> InvariantFlag {
        InvariantFlag::new(self.ray_order.clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitConeDoc {
    pub ray_indices: Vec<usize>,
}

impl OrbitConeDoc {
    pub fn from_cone(cone: &OrbitCone) -> Self {
        OrbitConeDoc {
            ray_indices: cone.ray_indices.clone(),
        }
    }

    pub fn to_cone(&self) -> OrbitCone {
        OrbitCone::new(self.ray_indices.clone())
    }
}

// ---------------------------------------------------------------------------
// Valuation data
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValuationEntryDoc {
    pub level: u32,
    pub vector: Vec<JsonInt>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValuationSetDoc {
    pub ambient_dim: usize,
    pub entries: Vec<ValuationEntryDoc>,
}

impl ValuationSetDoc {
    pub fn from_set(set: &GradedValuationSet) -> Self {
        ValuationSetDoc {
            ambient_dim: set.ambient_dim(),
            entries: set
                .entries()
                .map(|(level, vector)| ValuationEntryDoc {
                    level: *level,
                    vector: int_vec(vector),
                })
                .collect(),
        }
    }

    pub fn to_set(&self) -> Result<GradedValuationSet> {
        let entries: Vec<(u32, Vec<BigInt>)> = self
            .entries
            .iter()
            .map(|e| Ok((e.level, parse_int_vec(&e.vector)?)))
            .collect::<Result<_>>()?;
        GradedValuationSet::new(self.ambient_dim, entries)
    }
}

// ---------------------------------------------------------------------------
// Surface models and flags
// ---------------------------------------------------------------------------

/// Effective generator: either a bare coordinate vector or a named entry
/// that may be declared irreducible (so it can carry a flag).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorDoc {
    Plain(Vec<JsonRat>),
    Named {
        class: Vec<JsonRat>,
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        irreducible: bool,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveDoc {
    pub class: Vec<JsonRat>,
    pub name: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelDoc {
    pub rank: usize,
    pub form: Vec<Vec<JsonRat>>,
    pub eff_generators: Vec<GeneratorDoc>,
    pub curves: Vec<CurveDoc>,
    pub ample_witness: Vec<JsonRat>,
}

impl ModelDoc {
    pub fn from_model(model: &SurfaceModel) -> Self {
        ModelDoc {
            rank: model.rank(),
            form: model.form().iter().map(|row| rat_vec(row)).collect(),
            eff_generators: model
                .eff_generators()
                .iter()
                .map(|g| GeneratorDoc::Named {
                    class: rat_vec(g.class.coords.coords()),
                    name: g.name.clone(),
                    irreducible: g.irreducible,
                })
                .collect(),
            curves: model
                .curves()
                .iter()
                .map(|c| CurveDoc {
                    class: rat_vec(c.class.coords.coords()),
                    name: c.name.clone(),
                })
                .collect(),
            ample_witness: rat_vec(model.ample_witness().coords.coords()),
        }
    }

    pub fn to_model(&self) -> Result<SurfaceModel> {
        let eff_generators: Vec<EffectiveGenerator> = self
            .eff_generators
            .iter()
            .map(|g| {
                Ok(match g {
                    GeneratorDoc::Plain(coords) => EffectiveGenerator {
                        class: DivisorClass::new(QVector::new(parse_rat_vec(coords)?)),
                        name: None,
                        irreducible: false,
                    },
                    GeneratorDoc::Named {
                        class,
                        name,
                        irreducible,
                    } => EffectiveGenerator {
                        class: DivisorClass::new(QVector::new(parse_rat_vec(class)?)),
                        name: name.clone(),
                        irreducible: *irreducible,
                    },
                })
            })
            .collect::<Result<_>>()?;
        let curves: Vec<Curve> = self
            .curves
            .iter()
            .map(|c| {
                Ok(Curve {
                    class: DivisorClass::new(QVector::new(parse_rat_vec(&c.class)?)),
                    name: c.name.clone(),
                })
            })
            .collect::<Result<_>>()?;
        let form: Vec<Vec<Rational>> = self
            .form
            .iter()
            .map(|row| parse_rat_vec(row))
            .collect::<Result<_>>()?;
        SurfaceModel::new(
            self.rank,
            form,
            eff_generators,
            curves,
            DivisorClass::new(QVector::new(parse_rat_vec(&self.ample_witness)?)),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassDoc {
    pub coords: Vec<JsonRat>,
}

impl ClassDoc {
    pub fn from_class(class: &DivisorClass) -> Self {
        ClassDoc {
            coords: rat_vec(class.coords.coords()),
        }
    }

    pub fn to_class(&self) -> Result<DivisorClass> {
        Ok(DivisorClass::new(QVector::new(parse_rat_vec(
            &self.coords,
        )?)))
    }
}

/// Flag curve on the wire: a curve or generator name, or an explicit class.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FlagCurveDoc {
    Name(String),
    Class { class: Vec<JsonRat> },
}

/// Flag point on the wire: the literal "general" or an incidence table
/// keyed by curve name.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FlagPointDoc {
    General(String),
    Incidence { incidence: BTreeMap<String, u32> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceFlagDoc {
    pub curve: FlagCurveDoc,
    pub point: FlagPointDoc,
}

impl SurfaceFlagDoc {
    pub fn to_flag(&self, model: &SurfaceModel) -> Result<SurfaceFlag> {
        let curve = match &self.curve {
            FlagCurveDoc::Name(name) => {
                if let Some(i) = model.curve_by_name(name) {
                    FlagCurve::Curve(i)
                } else if let Some(i) = model.generator_by_name(name) {
                    FlagCurve::Generator(i)
                } else {
                    return Err(Error::Schema(format!(
                        "flag curve `{name}` is not a curve or generator name"
                    )));
                }
            }
            FlagCurveDoc::Class { class } => {
                FlagCurve::Class(DivisorClass::new(QVector::new(parse_rat_vec(class)?)))
            }
        };
        let point = match &self.point {
            FlagPointDoc::General(text) => {
                if text != "general" {
                    return Err(Error::Schema(format!(
                        "flag point must be \"general\" or an incidence table, got `{text}`"
                    )));
                }
                FlagPoint::General
            }
            FlagPointDoc::Incidence { incidence } => {
                let mut table = BTreeMap::new();
                for (name, mult) in incidence {
                    let index = model.curve_by_name(name).ok_or_else(|| {
                        Error::Schema(format!("incidence references unknown curve `{name}`"))
                    })?;
                    table.insert(index, *mult);
                }
                FlagPoint::Incidence(table)
            }
        };
        Ok(SurfaceFlag { curve, point })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PiecewiseLinearDoc {
    pub breakpoints: Vec<JsonRat>,
    pub values: Vec<JsonRat>,
}

impl PiecewiseLinearDoc {
    pub fn from_fn(f: &PiecewiseLinearFn) -> Self {
        PiecewiseLinearDoc {
            breakpoints: rat_vec(f.breakpoints()),
            values: rat_vec(f.values()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceBodyDoc {
    pub body: BodyDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<PiecewiseLinearDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<PiecewiseLinearDoc>,
    pub negative_multiplicity: JsonRat,
    pub threshold: JsonRat,
    pub diagnostics: Vec<String>,
}

impl SurfaceBodyDoc {
    pub fn from_surface_body(out: &SurfaceBody) -> Self {
        SurfaceBodyDoc {
            body: BodyDoc::from_body(&out.body),
            alpha: out.alpha.as_ref().map(PiecewiseLinearDoc::from_fn),
            beta: out.beta.as_ref().map(PiecewiseLinearDoc::from_fn),
            negative_multiplicity: JsonRat::from_rational(&out.negative_multiplicity),
            threshold: JsonRat::from_rational(&out.threshold),
            diagnostics: out.diagnostics.clone(),
        }
    }
}

/// Parses a JSON document from text with schema errors mapped into the
/// crate error type.
pub fn from_json_str<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
}

/// Canonical serialization: two-space indentation, keys in struct order.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Json(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::{rat, rat_int};

    #[test]
    fn polytope_round_trip() {
        let p = RationalPolytope::convex_hull(
            2,
            &[
                QVector::from_ints(&[0, 0]),
                QVector::from_ints(&[1, 0]),
                QVector::new(vec![rat(1, 2), rat(3, 2)]),
            ],
        )
        .unwrap();
        let doc = PolytopeDoc::from_polytope(&p);
        let text = to_json_string(&doc).unwrap();
        let parsed: PolytopeDoc = from_json_str(&text).unwrap();
        assert_eq!(parsed.to_polytope().unwrap(), p);
        let empty = RationalPolytope::empty(3);
        let doc = PolytopeDoc::from_polytope(&empty);
        assert!(doc.to_polytope().unwrap().is_empty());
    }

    #[test]
    fn divisor_round_trip() {
        let d = TorusDivisor::from_pairs(&[(0, rat(1, 2)), (3, rat_int(-2))]);
        let doc = DivisorDoc::from_divisor(&d);
        let text = to_json_string(&doc).unwrap();
        let parsed: DivisorDoc = from_json_str(&text).unwrap();
        assert_eq!(parsed.to_divisor().unwrap(), d);
    }

    #[test]
    fn rational_wire_forms() {
        assert_eq!(
            JsonRat::from_rational(&rat_int(5)),
            JsonRat::Int(5)
        );
        assert_eq!(
            JsonRat::from_rational(&rat(1, 2)),
            JsonRat::Text("1/2".into())
        );
        let parsed: JsonRat = from_json_str("\"-7/3\"").unwrap();
        assert_eq!(parsed.to_rational().unwrap(), rat(-7, 3));
        let parsed: JsonRat = from_json_str("4").unwrap();
        assert_eq!(parsed.to_rational().unwrap(), rat_int(4));
    }
}
