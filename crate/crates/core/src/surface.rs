//! Abstract surface models with finitely generated effective cones:
//! Zariski decompositions, pseudoeffective thresholds, asymptotic orders,
//! two-step-flag limiting bodies via an exact chamber walk, and the volume
//! probes that reconstruct intersection numbers from body data.
//!
//! A model is a numerical lattice with an intersection form of signature
//! (1, rank-1), generators of the effective cone, and the finitely many
//! irreducible negative curves available to negative parts. Everything
//! reduces to exact rational linear algebra and small linear programs.
// Index-based loops mirror the matrix algebra; clearer than iterator chains here.
#![allow(clippy::needless_range_loop)]
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::body::{BodyKind, ConvexBody, Exactness};
use crate::error::{Error, Result};
use crate::exactgeom::{linalg, lp, QVector, Rational, RationalPolytope};

/// A numerical divisor class in the fixed basis of the model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DivisorClass {
    pub coords: QVector,
}

impl DivisorClass {
    pub fn new(coords: QVector) -> Self {
        DivisorClass { coords }
    }

    pub fn from_ints(vals: &[i64]) -> Self {
        DivisorClass {
            coords: QVector::from_ints(vals),
        }
    }

    pub fn rank(&self) -> usize {
        self.coords.dim()
    }

    pub fn scaled(&self, factor: &Rational) -> DivisorClass {
        DivisorClass {
            coords: self.coords.scale(factor),
        }
    }

    pub fn plus(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass {
            coords: self.coords.add(&other.coords),
        }
    }

    pub fn minus(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass {
            coords: self.coords.sub(&other.coords),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }
}

/// Extremal ray of the pseudoeffective cone, optionally named and flagged
/// irreducible so it can serve as a flag curve.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveGenerator {
    pub class: DivisorClass,
    pub name: Option<String>,
    pub irreducible: bool,
}

/// An irreducible curve with negative self-intersection, available to
/// negative parts of decompositions.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub class: DivisorClass,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceModel {
    rank: usize,
    form: Vec<Vec<Rational>>,
    eff_generators: Vec<EffectiveGenerator>,
    curves: Vec<Curve>,
    ample_witness: DivisorClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelReport {
    pub signature_ok: bool,
    pub ample_ok: bool,
    pub negative_generators_listed: bool,
    pub curves_negative: bool,
    pub issues: Vec<String>,
}

impl ModelReport {
    pub fn is_valid(&self) -> bool {
        self.signature_ok
            && self.ample_ok
            && self.negative_generators_listed
            && self.curves_negative
    }
}

/// The decomposition `D = P + N`: nef positive part, and the negative part
/// as positive coefficients on support curves whose Gram matrix is negative
/// definite.
#[derive(Clone, Debug, PartialEq)]
pub struct ZariskiPair {
    pub positive: DivisorClass,
    pub negative_support: Vec<(usize, Rational)>,
}

impl ZariskiPair {
    /// Coefficient of the given curve in the negative part (0 if absent).
    pub fn coefficient(&self, curve_index: usize) -> Rational {
        self.negative_support
            .iter()
            .find(|(i, _)| *i == curve_index)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn negative_class(&self, model: &SurfaceModel) -> DivisorClass {
        let mut acc = QVector::zeros(model.rank);
        for (i, c) in &self.negative_support {
            acc = acc.add(&model.curves[*i].class.coords.scale(c));
        }
        DivisorClass::new(acc)
    }
}

/// Flag curve reference: a listed negative curve, an irreducible effective
/// generator, or a general member of an arbitrary class (irreducibility
/// asserted by the caller).
#[derive(Clone, Debug, PartialEq)]
pub enum FlagCurve {
    Curve(usize),
    Generator(usize),
    Class(DivisorClass),
}

/// Flag point: general (missing every special point), or an explicit table
/// of local intersection multiplicities of the model curves with the flag
/// curve at the point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlagPoint {
    General,
    Incidence(BTreeMap<usize, u32>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceFlag {
    pub curve: FlagCurve,
    pub point: FlagPoint,
}

impl SurfaceFlag {
    pub fn general(curve: FlagCurve) -> Self {
        SurfaceFlag {
            curve,
            point: FlagPoint::General,
        }
    }
}

/// Piecewise linear function on `[breakpoints.first(), breakpoints.last()]`
/// by interpolation between consecutive breakpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinearFn {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

impl PiecewiseLinearFn {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidArgument(
                "piecewise linear data must be nonempty and aligned".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(PiecewiseLinearFn {
            breakpoints,
            values,
        })
    }

    /// A constant function on a single point.
    pub fn single(t: Rational, value: Rational) -> Self {
        PiecewiseLinearFn {
            breakpoints: vec![t],
            values: vec![value],
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        let first = self.breakpoints.first().expect("nonempty");
        let last = self.breakpoints.last().expect("nonempty");
        if t < first || t > last {
            return Err(Error::InvalidArgument(format!(
                "argument {t} outside the function domain"
            )));
        }
        for k in 0..self.breakpoints.len().saturating_sub(1) {
            let (t0, t1) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
            if t >= t0 && t <= t1 {
                let lambda = (t - t0) / (t1 - t0);
                return Ok(&self.values[k] + lambda * (&self.values[k + 1] - &self.values[k]));
            }
        }
        Ok(self.values.last().expect("nonempty").clone())
    }
}

/// The limiting body of a class with respect to a two-step flag, together
/// with its boundary functions and walk diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceBody {
    pub body: ConvexBody,
    pub alpha: Option<PiecewiseLinearFn>,
    pub beta: Option<PiecewiseLinearFn>,
    /// Multiplicity of the flag curve in the negative part of the class.
    pub negative_multiplicity: Rational,
    /// Pseudoeffective threshold along the flag curve.
    pub threshold: Rational,
    pub diagnostics: Vec<String>,
}

impl SurfaceModel {
    pub fn new(
        rank: usize,
        form: Vec<Vec<Rational>>,
        eff_generators: Vec<EffectiveGenerator>,
        curves: Vec<Curve>,
        ample_witness: DivisorClass,
    ) -> Result<Self> {
        if form.len() != rank || form.iter().any(|r| r.len() != rank) {
            return Err(Error::InvalidModel(format!(
                "intersection form must be {rank} x {rank}"
            )));
        }
        for i in 0..rank {
            for j in 0..rank {
                if form[i][j] != form[j][i] {
                    return Err(Error::InvalidModel(
                        "intersection form must be symmetric".into(),
                    ));
                }
            }
        }
        for g in &eff_generators {
            if g.class.rank() != rank {
                return Err(Error::InvalidModel(
                    "effective generator has wrong coordinate length".into(),
                ));
            }
        }
        for c in &curves {
            if c.class.rank() != rank {
                return Err(Error::InvalidModel(format!(
                    "curve {} has wrong coordinate length",
                    c.name
                )));
            }
        }
        let mut names: Vec<&str> = curves.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != curves.len() {
            return Err(Error::InvalidModel("duplicate curve names".into()));
        }
        if ample_witness.rank() != rank {
            return Err(Error::InvalidModel(
                "ample witness has wrong coordinate length".into(),
            ));
        }
        if eff_generators.is_empty() {
            return Err(Error::InvalidModel(
                "model needs at least one effective generator".into(),
            ));
        }
        Ok(SurfaceModel {
            rank,
            form,
            eff_generators,
            curves,
            ample_witness,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn eff_generators(&self) -> &[EffectiveGenerator] {
        &self.eff_generators
    }

    pub fn ample_witness(&self) -> &DivisorClass {
        &self.ample_witness
    }

    pub fn form(&self) -> &[Vec<Rational>] {
        &self.form
    }

    /// Intersection pairing of two classes.
    pub fn pair(&self, a: &DivisorClass, b: &DivisorClass) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                if !self.form[i][j].is_zero() {
                    acc += a.coords.coord(i) * &self.form[i][j] * b.coords.coord(j);
                }
            }
        }
        acc
    }

    pub fn curve_by_name(&self, name: &str) -> Option<usize> {
        self.curves.iter().position(|c| c.name == name)
    }

    pub fn generator_by_name(&self, name: &str) -> Option<usize> {
        self.eff_generators
            .iter()
            .position(|g| g.name.as_deref() == Some(name))
    }

    /// Index of the listed curve with exactly this class, if any.
    pub fn curve_by_class(&self, class: &DivisorClass) -> Option<usize> {
        self.curves.iter().position(|c| &c.class == class)
    }

    /// Checks all model invariants and reports failures.
    pub fn validate(&self) -> ModelReport {
        let mut issues = Vec::new();
        let (pos, neg, zero) = linalg::signature(&self.form);
        let signature_ok = pos == 1 && zero == 0 && neg == self.rank.saturating_sub(1);
        if !signature_ok {
            issues.push(format!(
                "intersection form has signature (+{pos}, -{neg}, 0:{zero}), expected (1, {}, 0)",
                self.rank - 1
            ));
        }
        let mut ample_ok = true;
        for g in &self.eff_generators {
            let p = self.pair(&self.ample_witness, &g.class);
            if !p.is_positive() {
                ample_ok = false;
                issues.push(format!(
                    "ample witness pairs nonpositively ({p}) with an effective generator"
                ));
            }
        }
        let mut negative_generators_listed = true;
        for g in &self.eff_generators {
            let self_int = self.pair(&g.class, &g.class);
            if self_int.is_negative() && self.curve_by_class(&g.class).is_none() {
                negative_generators_listed = false;
                issues.push(format!(
                    "effective generator with self-intersection {self_int} is missing from the curve list"
                ));
            }
        }
        let mut curves_negative = true;
        for c in &self.curves {
            let self_int = self.pair(&c.class, &c.class);
            if !self_int.is_negative() {
                curves_negative = false;
                issues.push(format!(
                    "curve {} has self-intersection {self_int}, expected negative",
                    c.name
                ));
            }
        }
        ModelReport {
            signature_ok,
            ample_ok,
            negative_generators_listed,
            curves_negative,
            issues,
        }
    }

    pub fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidModel(report.issues.join("; ")))
        }
    }

    fn generator_columns(&self) -> Vec<Vec<Rational>> {
        self.eff_generators
            .iter()
            .map(|g| g.class.coords.coords().to_vec())
            .collect()
    }

    /// Resolves a flag curve reference to its class, the index of the
    /// listed curve sharing that class (if any), and a label.
    pub fn resolve_flag_curve(
        &self,
        flag: &FlagCurve,
    ) -> Result<(DivisorClass, Option<usize>, String)> {
        match flag {
            FlagCurve::Curve(i) => {
                let curve = self
                    .curves
                    .get(*i)
                    .ok_or_else(|| Error::InvalidArgument(format!("curve index {i} out of range")))?;
                Ok((curve.class.clone(), Some(*i), curve.name.clone()))
            }
            FlagCurve::Generator(i) => {
                let g = self.eff_generators.get(*i).ok_or_else(|| {
                    Error::InvalidArgument(format!("generator index {i} out of range"))
                })?;
                if !g.irreducible {
                    return Err(Error::InvalidArgument(
                        "flag curve generator is not declared irreducible".into(),
                    ));
                }
                let label = g.name.clone().unwrap_or_else(|| format!("generator{i}"));
                Ok((g.class.clone(), self.curve_by_class(&g.class), label))
            }
            FlagCurve::Class(class) => {
                if class.rank() != self.rank {
                    return Err(Error::DimensionMismatch {
                        expected: self.rank,
                        got: class.rank(),
                    });
                }
                Ok((class.clone(), self.curve_by_class(class), "class".into()))
            }
        }
    }
}

/// Exact membership of the class in the cone spanned by the effective
/// generators.
pub fn is_pseudoeffective(model: &SurfaceModel, class: &DivisorClass) -> Result<bool> {
    model.require_valid()?;
    if class.rank() != model.rank {
        return Err(Error::DimensionMismatch {
            expected: model.rank,
            got: class.rank(),
        });
    }
    Ok(lp::nonneg_combination(&model.generator_columns(), class.coords.coords()).is_some())
}

fn gram_matrix(model: &SurfaceModel, support: &[usize]) -> Vec<Vec<Rational>> {
    support
        .iter()
        .map(|&i| {
            support
                .iter()
                .map(|&j| model.pair(&model.curves[i].class, &model.curves[j].class))
                .collect()
        })
        .collect()
}

fn is_negative_definite(gram: &[Vec<Rational>]) -> bool {
    let k = gram.len();
    for j in 1..=k {
        let minor: Vec<Vec<Rational>> = (0..j)
            .map(|r| (0..j).map(|c| gram[r][c].clone()).collect())
            .collect();
        let det = linalg::determinant(&minor);
        let expect_positive = j % 2 == 0;
        if det.is_zero() || det.is_positive() != expect_positive {
            return false;
        }
    }
    true
}

/// Solves for the negative part on a fixed support: `N . C_j = D . C_j`.
fn solve_support(
    model: &SurfaceModel,
    class: &DivisorClass,
    support: &[usize],
) -> Result<Vec<Rational>> {
    if support.is_empty() {
        return Ok(Vec::new());
    }
    let gram = gram_matrix(model, support);
    if !is_negative_definite(&gram) {
        return Err(Error::ModelInconsistent(format!(
            "support {support:?} has a Gram matrix that is not negative definite"
        )));
    }
    let rhs: Vec<Rational> = support
        .iter()
        .map(|&i| model.pair(class, &model.curves[i].class))
        .collect();
    linalg::solve(&gram, &rhs)
        .ok_or_else(|| Error::ModelInconsistent("degenerate Gram system".into()))
}

/// The Zariski decomposition `D = P + N` of a pseudoeffective class:
/// iteratively enlarge the support with every curve the candidate positive
/// part still pairs negatively with, re-solving the Gram system.
pub fn zariski_decompose(model: &SurfaceModel, class: &DivisorClass) -> Result<ZariskiPair> {
    model.require_valid()?;
    if !is_pseudoeffective(model, class)? {
        return Err(Error::NotPseudoeffective);
    }
    let mut support: Vec<usize> = (0..model.curves.len())
        .filter(|&i| model.pair(class, &model.curves[i].class).is_negative())
        .collect();
    loop {
        let coeffs = solve_support(model, class, &support)?;
        if coeffs.iter().any(|c| c.is_negative()) {
            return Err(Error::ModelInconsistent(
                "negative part solved with a negative coefficient; curve list incomplete".into(),
            ));
        }
        let mut negative = QVector::zeros(model.rank);
        for (&i, c) in support.iter().zip(&coeffs) {
            negative = negative.add(&model.curves[i].class.coords.scale(c));
        }
        let positive = DivisorClass::new(class.coords.sub(&negative));
        let offender = (0..model.curves.len()).find(|i| {
            !support.contains(i) && model.pair(&positive, &model.curves[*i].class).is_negative()
        });
        match offender {
            Some(i) => {
                support.push(i);
                support.sort_unstable();
            }
            None => {
                let final_support: Vec<(usize, Rational)> = support
                    .iter()
                    .zip(&coeffs)
                    .filter(|(_, c)| c.is_positive())
                    .map(|(&i, c)| (i, c.clone()))
                    .collect();
                let pair = ZariskiPair {
                    positive,
                    negative_support: final_support,
                };
                verify_pair(model, class, &pair)?;
                return Ok(pair);
            }
        }
    }
}

/// Postcondition check: nef positive part, orthogonality on the support,
/// negative definite support Gram matrix, positive coefficients, exact
/// recomposition.
fn verify_pair(model: &SurfaceModel, class: &DivisorClass, pair: &ZariskiPair) -> Result<()> {
    let recomposed = pair.positive.plus(&pair.negative_class(model));
    if recomposed != *class {
        return Err(Error::ModelInconsistent(
            "positive and negative parts do not sum to the class".into(),
        ));
    }
    for curve in model.curves() {
        if model.pair(&pair.positive, &curve.class).is_negative() {
            return Err(Error::ModelInconsistent(format!(
                "positive part pairs negatively with curve {}",
                curve.name
            )));
        }
    }
    for g in model.eff_generators() {
        if model.pair(&pair.positive, &g.class).is_negative() {
            return Err(Error::ModelInconsistent(
                "positive part pairs negatively with an effective generator".into(),
            ));
        }
    }
    for (i, c) in &pair.negative_support {
        if !c.is_positive() {
            return Err(Error::ModelInconsistent(
                "negative part carries a nonpositive coefficient".into(),
            ));
        }
        if !model.pair(&pair.positive, &model.curves[*i].class).is_zero() {
            return Err(Error::ModelInconsistent(
                "positive part is not orthogonal to the support".into(),
            ));
        }
    }
    let support: Vec<usize> = pair.negative_support.iter().map(|(i, _)| *i).collect();
    if !support.is_empty() && !is_negative_definite(&gram_matrix(model, &support)) {
        return Err(Error::ModelInconsistent(
            "support Gram matrix is not negative definite".into(),
        ));
    }
    Ok(())
}

/// Asymptotic vanishing order along a listed curve: its coefficient in the
/// negative part; positive exactly when the curve lies in the restricted
/// base locus of the class.
pub fn asymptotic_order(
    model: &SurfaceModel,
    class: &DivisorClass,
    curve_index: usize,
) -> Result<Rational> {
    if curve_index >= model.curves.len() {
        return Err(Error::InvalidArgument(format!(
            "curve index {curve_index} out of range"
        )));
    }
    Ok(zariski_decompose(model, class)?.coefficient(curve_index))
}

/// The pseudoeffective threshold `max {s >= 0 : D - s C pseudoeffective}`.
pub fn mu_threshold(
    model: &SurfaceModel,
    class: &DivisorClass,
    curve: &DivisorClass,
) -> Result<Rational> {
    model.require_valid()?;
    if !is_pseudoeffective(model, class)? {
        return Err(Error::NotPseudoeffective);
    }
    if curve.is_zero() {
        return Err(Error::InvalidArgument(
            "threshold direction must be a nonzero class".into(),
        ));
    }
    match lp::max_scalar_in_cone(
        &model.generator_columns(),
        curve.coords.coords(),
        class.coords.coords(),
    ) {
        lp::ScalarMax::Value(s) => Ok(s),
        lp::ScalarMax::Infeasible => Err(Error::NotPseudoeffective),
        lp::ScalarMax::Unbounded => Err(Error::InvalidArgument(
            "threshold is unbounded; the effective cone is not pointed".into(),
        )),
    }
}

/// Linear data of the negative part on one chamber: coefficients
/// `c_j(t) = value_j + (t - t0) * slope_j` on the given support.
struct ChamberData {
    support: Vec<usize>,
    values: Vec<Rational>,
    slopes: Vec<Rational>,
}

/// The support of the negative part of `D - t C` valid on an interval just
/// right of `t0`, grown from the decomposition at `t0` by following the
/// one-sided derivatives.
fn chamber_right_of(
    model: &SurfaceModel,
    class: &DivisorClass,
    curve: &DivisorClass,
    t0: &Rational,
) -> Result<ChamberData> {
    let at_t0 = DivisorClass::new(class.coords.sub(&curve.coords.scale(t0)));
    let pair0 = zariski_decompose(model, &at_t0)?;
    let mut support: Vec<usize> = pair0.negative_support.iter().map(|(i, _)| *i).collect();
    for _round in 0..(4 * model.curves.len() + 4) {
        let values = solve_support(model, &at_t0, &support)?;
        let slopes = if support.is_empty() {
            Vec::new()
        } else {
            let gram = gram_matrix(model, &support);
            let rhs: Vec<Rational> = support
                .iter()
                .map(|&i| -model.pair(curve, &model.curves[i].class))
                .collect();
            linalg::solve(&gram, &rhs)
                .ok_or_else(|| Error::ModelInconsistent("degenerate Gram system".into()))?
        };
        // A support member at zero with negative slope would go negative:
        // it leaves the support on the right.
        if let Some(pos) =
            (0..support.len()).find(|&k| values[k].is_zero() && slopes[k].is_negative())
        {
            support.remove(pos);
            continue;
        }
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::ModelInconsistent(
                "chamber walk produced a negative coefficient".into(),
            ));
        }
        // Pairings of the candidate positive part with off-support curves;
        // a tight pairing with negative slope pulls the curve in.
        let mut entered = None;
        for k in 0..model.curves.len() {
            if support.contains(&k) {
                continue;
            }
            let ck = &model.curves[k].class;
            let mut value = model.pair(&at_t0, ck);
            let mut slope = -model.pair(curve, ck);
            for ((&j, v), s) in support.iter().zip(&values).zip(&slopes) {
                let pairing = model.pair(&model.curves[j].class, ck);
                value -= v * pairing.clone();
                slope -= s * pairing;
            }
            if value.is_negative() {
                return Err(Error::ModelInconsistent(
                    "positive part pairs negatively at a chamber base point".into(),
                ));
            }
            if value.is_zero() && slope.is_negative() {
                entered = Some(k);
                break;
            }
        }
        match entered {
            Some(k) => {
                support.push(k);
                support.sort_unstable();
            }
            None => {
                return Ok(ChamberData {
                    support,
                    values,
                    slopes,
                })
            }
        }
    }
    Err(Error::ModelInconsistent(
        "chamber walk failed to stabilize a support".into(),
    ))
}

/// Exact breakpoints of the decomposition of `D - t C` on `[start, stop]`:
/// a chamber ends where a negative-part coefficient or a positive-part
/// pairing hits zero.
fn walk_breakpoints(
    model: &SurfaceModel,
    class: &DivisorClass,
    curve: &DivisorClass,
    start: &Rational,
    stop: &Rational,
) -> Result<Vec<Rational>> {
    let mut points = vec![start.clone()];
    let mut t_cur = start.clone();
    let mut guard = 0usize;
    while &t_cur < stop {
        guard += 1;
        if guard > 16 * (model.curves.len() + 2) {
            return Err(Error::ModelInconsistent(
                "chamber walk exceeded the breakpoint budget".into(),
            ));
        }
        let chamber = chamber_right_of(model, class, curve, &t_cur)?;
        let mut t_next = stop.clone();
        for k in 0..chamber.support.len() {
            if chamber.slopes[k].is_negative() {
                let root = &t_cur - &chamber.values[k] / &chamber.slopes[k];
                if root > t_cur && root < t_next {
                    t_next = root;
                }
            }
        }
        let at_t0 = DivisorClass::new(class.coords.sub(&curve.coords.scale(&t_cur)));
        for k in 0..model.curves.len() {
            if chamber.support.contains(&k) {
                continue;
            }
            let ck = &model.curves[k].class;
            let mut value = model.pair(&at_t0, ck);
            let mut slope = -model.pair(curve, ck);
            for ((&j, v), s) in chamber
                .support
                .iter()
                .zip(&chamber.values)
                .zip(&chamber.slopes)
            {
                let pairing = model.pair(&model.curves[j].class, ck);
                value -= v * pairing.clone();
                slope -= s * pairing;
            }
            if slope.is_negative() && value.is_positive() {
                let root = &t_cur + -value / slope;
                if root > t_cur && root < t_next {
                    t_next = root;
                }
            }
        }
        points.push(t_next.clone());
        t_cur = t_next;
    }
    Ok(points)
}

/// The limiting body of a pseudoeffective class with respect to the flag
/// `(curve, point)`: the region between the two boundary functions read off
/// the decompositions of `D - t C`.
pub fn limiting_body(
    model: &SurfaceModel,
    class: &DivisorClass,
    flag: &SurfaceFlag,
) -> Result<SurfaceBody> {
    model.require_valid()?;
    let (curve_class, curve_index, label) = model.resolve_flag_curve(&flag.curve)?;
    if let FlagPoint::Incidence(table) = &flag.point {
        for (&i, &mult) in table {
            if i >= model.curves.len() {
                return Err(Error::InvalidArgument(format!(
                    "incidence references missing curve {i}"
                )));
            }
            if Some(i) == curve_index {
                return Err(Error::InvalidArgument(
                    "incidence table must not reference the flag curve itself".into(),
                ));
            }
            let pairing = model.pair(&curve_class, &model.curves[i].class);
            if pairing.is_zero() && mult > 0 {
                return Err(Error::InvalidArgument(format!(
                    "curve {} is disjoint from the flag curve; its incidence must be 0",
                    model.curves[i].name
                )));
            }
        }
    }
    if !is_pseudoeffective(model, class)? {
        return Ok(SurfaceBody {
            body: ConvexBody::new(
                RationalPolytope::empty(2),
                BodyKind::Limiting,
                Exactness::Exact,
                format!("surface-flag[{label}]"),
            ),
            alpha: None,
            beta: None,
            negative_multiplicity: Rational::zero(),
            threshold: Rational::zero(),
            diagnostics: vec!["class is not pseudoeffective; the body is empty".into()],
        });
    }

    let decomposition = zariski_decompose(model, class)?;
    let a = match curve_index {
        Some(i) => decomposition.coefficient(i),
        None => Rational::zero(),
    };
    let mu = mu_threshold(model, class, &curve_class)?;
    if a > mu {
        return Err(Error::ModelInconsistent(
            "negative multiplicity exceeds the pseudoeffective threshold".into(),
        ));
    }

    let mut diagnostics = Vec::new();
    let breakpoints = if a == mu {
        vec![a.clone()]
    } else {
        walk_breakpoints(model, class, &curve_class, &a, &mu)?
    };

    // Boundary values from the exact decomposition at each breakpoint;
    // linearity inside each chamber is confirmed at midpoints below.
    let mut alphas = Vec::with_capacity(breakpoints.len());
    let mut betas = Vec::with_capacity(breakpoints.len());
    let mut flag_component_seen = false;
    let mut eval_at = |t: &Rational| -> Result<(Rational, Rational)> {
        let d_t = DivisorClass::new(class.coords.sub(&curve_class.coords.scale(t)));
        let pair_t = zariski_decompose(model, &d_t)?;
        let mut alpha = Rational::zero();
        if let FlagPoint::Incidence(table) = &flag.point {
            for (i, coeff) in &pair_t.negative_support {
                if Some(*i) == curve_index {
                    continue;
                }
                if let Some(&mult) = table.get(i) {
                    alpha += coeff * Rational::from_integer(BigInt::from(mult));
                }
            }
        }
        if let Some(i) = curve_index {
            if pair_t.coefficient(i).is_positive() {
                flag_component_seen = true;
            }
        }
        let beta = &alpha + model.pair(&curve_class, &pair_t.positive);
        Ok((alpha, beta))
    };
    for t in &breakpoints {
        let (alpha, beta) = eval_at(t)?;
        if beta < alpha {
            return Err(Error::ModelInconsistent(
                "upper boundary dips below the lower boundary".into(),
            ));
        }
        alphas.push(alpha);
        betas.push(beta);
    }
    let half = crate::exactgeom::rat(1, 2);
    for k in 0..breakpoints.len().saturating_sub(1) {
        let mid = (&breakpoints[k] + &breakpoints[k + 1]) * half.clone();
        let (alpha, beta) = eval_at(&mid)?;
        let alpha_lin = (&alphas[k] + &alphas[k + 1]) * half.clone();
        let beta_lin = (&betas[k] + &betas[k + 1]) * half.clone();
        if alpha != alpha_lin || beta != beta_lin {
            return Err(Error::ModelInconsistent(
                "boundary function is not linear across a chamber".into(),
            ));
        }
    }
    if flag_component_seen {
        diagnostics.push(
            "negative part acquires a component along the flag curve inside the walk; \
             its coefficient is excluded from the lower boundary"
                .into(),
        );
    }

    let mut corners = Vec::with_capacity(2 * breakpoints.len());
    for (k, t) in breakpoints.iter().enumerate() {
        corners.push(QVector::new(vec![t.clone(), alphas[k].clone()]));
        corners.push(QVector::new(vec![t.clone(), betas[k].clone()]));
    }
    let polygon = RationalPolytope::convex_hull(2, &corners)?;
    // Convexity of the region: every sampled boundary point must lie on the
    // hull boundary.
    for corner in &corners {
        let on_boundary = polygon
            .halfspaces()
            .rows()
            .iter()
            .any(|hs| hs.is_tight_at(corner));
        if !polygon.contains(corner) || !on_boundary {
            return Err(Error::ModelInconsistent(
                "boundary breakpoint falls inside the hull; the region is not convex".into(),
            ));
        }
    }

    let alpha = if breakpoints.len() == 1 {
        Some(PiecewiseLinearFn::single(
            breakpoints[0].clone(),
            alphas[0].clone(),
        ))
    } else {
        Some(PiecewiseLinearFn::new(breakpoints.clone(), alphas)?)
    };
    let beta = if breakpoints.len() == 1 {
        Some(PiecewiseLinearFn::single(
            breakpoints[0].clone(),
            betas[0].clone(),
        ))
    } else {
        Some(PiecewiseLinearFn::new(breakpoints.clone(), betas)?)
    };
    Ok(SurfaceBody {
        body: ConvexBody::new(
            polygon,
            BodyKind::Limiting,
            Exactness::Exact,
            format!("surface-flag[{label}]"),
        ),
        alpha,
        beta,
        negative_multiplicity: a,
        threshold: mu,
        diagnostics,
    })
}

/// Augmented restricted volume along a curve not inside the restricted
/// base locus of the class: `C . D - C . N`.
pub fn restricted_vol_plus(
    model: &SurfaceModel,
    class: &DivisorClass,
    curve: &DivisorClass,
) -> Result<Rational> {
    model.require_valid()?;
    if !is_pseudoeffective(model, class)? {
        return Err(Error::NotPseudoeffective);
    }
    let decomposition = zariski_decompose(model, class)?;
    if let Some(i) = model.curve_by_class(curve) {
        if decomposition.coefficient(i).is_positive() {
            return Err(Error::FlagCurveInBaseLocus);
        }
    }
    let n = decomposition.negative_class(model);
    Ok(model.pair(curve, class) - model.pair(curve, &n))
}

/// Reconstructs the pairing vector of the class against the flag curves
/// purely from body data: the fiber length of the limiting body over its
/// left edge recovers the augmented restricted volume, and the asymptotic
/// orders recover the correction along the negative part.
pub fn jow_probe(
    model: &SurfaceModel,
    class: &DivisorClass,
    flags: &[DivisorClass],
) -> Result<Vec<Rational>> {
    model.require_valid()?;
    let rows: Vec<Vec<Rational>> = flags.iter().map(|f| f.coords.coords().to_vec()).collect();
    if linalg::rank(&rows) < model.rank {
        return Err(Error::InvalidArgument(
            "probe flags do not span the dual space".into(),
        ));
    }
    if !is_pseudoeffective(model, class)? {
        return Err(Error::NotPseudoeffective);
    }
    let decomposition = zariski_decompose(model, class)?;
    let mut probes = Vec::with_capacity(flags.len());
    for flag_class in flags {
        if let Some(i) = model.curve_by_class(flag_class) {
            if decomposition.coefficient(i).is_positive() {
                return Err(Error::FlagCurveInBaseLocus);
            }
        }
        let body = limiting_body(
            model,
            class,
            &SurfaceFlag::general(FlagCurve::Class(flag_class.clone())),
        )?;
        let (alpha, beta) = match (&body.alpha, &body.beta) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::ModelInconsistent(
                    "probe body has no boundary data".into(),
                ))
            }
        };
        let left = body.negative_multiplicity.clone();
        let fiber = beta.eval(&left)? - alpha.eval(&left)?;
        let mut correction = Rational::zero();
        for (i, coeff) in &decomposition.negative_support {
            correction += coeff * model.pair(flag_class, &model.curves[*i].class);
        }
        probes.push(fiber + correction);
    }
    Ok(probes)
}
