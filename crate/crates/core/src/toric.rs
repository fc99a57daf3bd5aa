//! Smooth complete toric varieties: divisor polytopes, Okounkov bodies with
//! respect to torus-invariant flags, Iitaka data, asymptotic base loci,
//! restricted volumes, and certification of Nakayama / positive-volume
//! subvarieties.
//!
//! All invariants are read off the divisor polytope `P_D = {u : <u, v_ray>
//! >= -a_ray}` with exact rational arithmetic. The body of a divisor with
//! respect to an invariant flag is the affine unimodular image of `P_D`
//! under `u -> (<u, v_i> + a_i)_i` over the flag rays in order; the graded
//! valuation oracle in `semigroup` provides the independent cross-check.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::body::{BodyKind, ConvexBody, Exactness};
use crate::error::{Error, Result};
use crate::exactgeom::{
    linalg, lp, Halfspace, HalfspaceSystem, QVector, Rational, RationalPolytope,
};

/// A complete simplicial fan given by primitive ray generators and maximal
/// cones as ray index sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<BigInt>>,
    max_cones: Vec<Vec<usize>>,
}

/// Validation outcome; all three properties must hold before the other
/// operations are meaningful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanReport {
    pub smooth: bool,
    pub complete: bool,
    pub faces_compatible: bool,
    pub issues: Vec<String>,
}

impl FanReport {
    pub fn is_valid(&self) -> bool {
        self.smooth && self.complete && self.faces_compatible
    }
}

/// T-divisor as a coefficient per ray (absent entries are zero).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TorusDivisor {
    coeffs: BTreeMap<usize, Rational>,
}

impl TorusDivisor {
    pub fn new(coeffs: BTreeMap<usize, Rational>) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        TorusDivisor { coeffs }
    }

    pub fn from_pairs(pairs: &[(usize, Rational)]) -> Self {
        Self::new(pairs.iter().cloned().collect())
    }

    pub fn zero() -> Self {
        TorusDivisor::default()
    }

    pub fn coeff(&self, ray: usize) -> Rational {
        self.coeffs.get(&ray).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, Rational> {
        &self.coeffs
    }

    /// Coefficient vector aligned with the fan's rays.
    pub fn coeff_vector(&self, fan: &Fan) -> Vec<Rational> {
        (0..fan.ray_count()).map(|i| self.coeff(i)).collect()
    }

    pub fn scaled(&self, factor: &Rational) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.iter().map(|(&i, a)| (i, a * factor)).collect())
    }

    pub fn plus(&self, other: &TorusDivisor) -> TorusDivisor {
        let mut coeffs = self.coeffs.clone();
        for (&i, a) in &other.coeffs {
            let entry = coeffs.entry(i).or_insert_with(Rational::zero);
            *entry += a.clone();
        }
        TorusDivisor::new(coeffs)
    }

    /// Adds the principal divisor of the character `u`: shifts each
    /// coefficient by `<u, v_ray>`.
    pub fn plus_character(&self, fan: &Fan, u: &[BigInt]) -> TorusDivisor {
        let mut coeffs = self.coeffs.clone();
        for (i, ray) in fan.rays.iter().enumerate() {
            let pairing: BigInt = ray.iter().zip(u).map(|(a, b)| a * b).sum();
            if !pairing.is_zero() {
                let entry = coeffs.entry(i).or_insert_with(Rational::zero);
                *entry += Rational::from_integer(pairing);
            }
        }
        TorusDivisor::new(coeffs)
    }
}

/// Admissible torus-invariant flag: an ordering of the rays of one maximal
/// cone. The i-th flag subvariety is the orbit closure of the cone spanned
/// by the first i rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantFlag {
    pub ray_order: Vec<usize>,
}

impl InvariantFlag {
    pub fn new(ray_order: Vec<usize>) -> Self {
        InvariantFlag { ray_order }
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.ray_order.iter().map(|i| i.to_string()).collect();
        format!("toric-flag[{}]", parts.join(","))
    }
}

/// A cone of the fan, indexing the invariant subvariety V(tau); the empty
/// index set denotes the whole variety.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OrbitCone {
    pub ray_indices: Vec<usize>,
}

impl OrbitCone {
    pub fn new(mut ray_indices: Vec<usize>) -> Self {
        ray_indices.sort_unstable();
        ray_indices.dedup();
        OrbitCone { ray_indices }
    }

    pub fn whole_variety() -> Self {
        OrbitCone {
            ray_indices: Vec::new(),
        }
    }

    pub fn is_whole_variety(&self) -> bool {
        self.ray_indices.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IitakaDim {
    NegativeInfinity,
    Dim(usize),
}

/// Asymptotic base loci, reported as the fan cones whose orbit closures lie
/// in each locus, together with the perturbation certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseLociReport {
    pub stable: Vec<OrbitCone>,
    pub restricted: Vec<OrbitCone>,
    pub augmented: Vec<OrbitCone>,
    /// Rays whose divisors are the divisorial components of the restricted
    /// base locus.
    pub restricted_divisorial: Vec<usize>,
    /// Final epsilon of the halving schedule for the restricted locus.
    pub restricted_epsilon: Rational,
    /// Final epsilon of the halving schedule for the augmented locus.
    pub augmented_epsilon: Rational,
}

/// Outcome of a subvariety certification with exact witness data.
#[derive(Clone, Debug, PartialEq)]
pub struct Certification {
    pub holds: bool,
    pub reason: String,
    pub witness_vectors: Vec<QVector>,
}

impl Fan {
    pub fn new(dim: usize, rays: Vec<Vec<BigInt>>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        for ray in &rays {
            if ray.len() != dim {
                return Err(Error::InvalidFan(format!(
                    "ray has {} coordinates, fan dimension is {dim}",
                    ray.len()
                )));
            }
            if ray.iter().all(|v| v.is_zero()) {
                return Err(Error::InvalidFan("zero ray generator".into()));
            }
        }
        let mut seen = BTreeSet::new();
        for ray in &rays {
            if !seen.insert(ray.clone()) {
                return Err(Error::InvalidFan(format!("duplicate ray generator {ray:?}")));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for cone in max_cones {
            let mut sorted = cone;
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != dim {
                return Err(Error::InvalidFan(format!(
                    "maximal cone {sorted:?} does not have {dim} distinct rays"
                )));
            }
            if sorted.iter().any(|&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!(
                    "maximal cone {sorted:?} references a missing ray"
                )));
            }
            cones.push(sorted);
        }
        cones.sort();
        cones.dedup();
        Ok(Fan {
            dim,
            rays,
            max_cones: cones,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn ray(&self, index: usize) -> &[BigInt] {
        &self.rays[index]
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    fn ray_matrix(&self, indices: &[usize]) -> Vec<Vec<Rational>> {
        indices
            .iter()
            .map(|&i| {
                self.rays[i]
                    .iter()
                    .map(|v| Rational::from_integer(v.clone()))
                    .collect()
            })
            .collect()
    }

    /// All cones of the fan as sorted ray index sets, including the zero
    /// cone (empty set). Valid because the fan is simplicial.
    pub fn all_cones(&self) -> Vec<OrbitCone> {
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        for cone in &self.max_cones {
            let k = cone.len();
            for mask in 0..(1u32 << k) {
                let subset: Vec<usize> = (0..k)
                    .filter(|&j| mask & (1 << j) != 0)
                    .map(|j| cone[j])
                    .collect();
                out.insert(subset);
            }
        }
        out.into_iter().map(OrbitCone::new).collect()
    }

    pub fn is_cone(&self, cone: &OrbitCone) -> bool {
        self.max_cones
            .iter()
            .any(|max| cone.ray_indices.iter().all(|i| max.contains(i)))
    }

    /// Structural validation: smoothness, completeness, proper face
    /// intersections.
    pub fn validate(&self) -> FanReport {
        let mut issues = Vec::new();
        let n = self.dim;

        for ray in &self.rays {
            let prim = crate::exactgeom::primitive_part(ray);
            if &prim != ray {
                issues.push(format!("ray {ray:?} is not primitive"));
            }
        }

        let mut smooth = true;
        for cone in &self.max_cones {
            let det = linalg::determinant(&self.ray_matrix(cone));
            if det.abs() != Rational::from_integer(BigInt::from(1)) {
                smooth = false;
                issues.push(format!(
                    "maximal cone {cone:?} has ray determinant {det}, not a lattice basis"
                ));
            }
        }

        let mut faces_compatible = true;
        for i in 0..self.max_cones.len() {
            for j in i + 1..self.max_cones.len() {
                let a = &self.max_cones[i];
                let b = &self.max_cones[j];
                let common: Vec<usize> = a.iter().filter(|r| b.contains(r)).copied().collect();
                let only_a = self.ray_matrix(
                    &a.iter()
                        .filter(|r| !common.contains(r))
                        .copied()
                        .collect::<Vec<_>>(),
                );
                let only_b = self.ray_matrix(
                    &b.iter()
                        .filter(|r| !common.contains(r))
                        .copied()
                        .collect::<Vec<_>>(),
                );
                let zero = self.ray_matrix(&common);
                if lp::separating_vector(n, &only_a, &zero, &only_b).is_none() {
                    faces_compatible = false;
                    issues.push(format!(
                        "cones {a:?} and {b:?} do not intersect in a common face"
                    ));
                }
            }
        }

        let mut complete = !self.max_cones.is_empty();
        if self.max_cones.is_empty() {
            issues.push("fan has no maximal cones".into());
        }
        // Every ridge must lie in exactly two maximal cones on opposite
        // sides, and the ridge adjacency graph must be connected.
        let mut adjacency = vec![BTreeSet::new(); self.max_cones.len()];
        'ridges: for (ci, cone) in self.max_cones.iter().enumerate() {
            for drop in cone {
                let ridge: Vec<usize> = cone.iter().filter(|r| *r != drop).copied().collect();
                let holders: Vec<usize> = self
                    .max_cones
                    .iter()
                    .enumerate()
                    .filter(|(_, other)| ridge.iter().all(|r| other.contains(r)))
                    .map(|(k, _)| k)
                    .collect();
                if holders.len() != 2 {
                    complete = false;
                    issues.push(format!(
                        "ridge {ridge:?} lies in {} maximal cones, expected 2",
                        holders.len()
                    ));
                    continue 'ridges;
                }
                let kernel = linalg::kernel(&self.ray_matrix(&ridge));
                if kernel.len() != 1 {
                    complete = false;
                    issues.push(format!("ridge {ridge:?} is degenerate"));
                    continue 'ridges;
                }
                let w = &kernel[0];
                let side = |cone_idx: usize| -> Rational {
                    let other = &self.max_cones[cone_idx];
                    let extra = other
                        .iter()
                        .find(|r| !ridge.contains(r))
                        .expect("maximal cone exceeds its ridge");
                    self.rays[*extra]
                        .iter()
                        .zip(w)
                        .map(|(a, b)| Rational::from_integer(a.clone()) * b)
                        .sum()
                };
                let s0 = side(holders[0]);
                let s1 = side(holders[1]);
                if s0.is_zero() || s1.is_zero() || (s0.is_positive() == s1.is_positive()) {
                    complete = false;
                    issues.push(format!(
                        "maximal cones around ridge {ridge:?} do not lie on opposite sides"
                    ));
                }
                adjacency[ci].insert(holders[0] + holders[1] - ci);
            }
        }
        if complete && !self.max_cones.is_empty() {
            let mut seen = vec![false; self.max_cones.len()];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(top) = stack.pop() {
                for &next in &adjacency[top] {
                    if !seen[next] {
                        seen[next] = true;
                        stack.push(next);
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                complete = false;
                issues.push("fan support is disconnected".into());
            }
        }

        FanReport {
            smooth,
            complete,
            faces_compatible,
            issues,
        }
    }

    pub fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidFan(report.issues.join("; ")))
        }
    }

    pub fn require_flag(&self, flag: &InvariantFlag) -> Result<()> {
        let mut sorted = flag.ray_order.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.dim || !self.max_cones.contains(&sorted) {
            return Err(Error::InvalidArgument(format!(
                "flag rays {:?} do not span a maximal cone",
                flag.ray_order
            )));
        }
        Ok(())
    }

    pub fn require_cone(&self, cone: &OrbitCone) -> Result<()> {
        if !self.is_cone(cone) {
            return Err(Error::InvalidArgument(format!(
                "ray set {:?} is not a cone of the fan",
                cone.ray_indices
            )));
        }
        Ok(())
    }
}

/// The divisor polytope `P_D = {u : <u, v_ray> >= -a_ray}`.
pub fn divisor_polytope(fan: &Fan, divisor: &TorusDivisor) -> Result<RationalPolytope> {
    fan.require_valid()?;
    let rows: Vec<Halfspace> = fan
        .rays
        .iter()
        .enumerate()
        .map(|(i, ray)| Halfspace::new(ray.clone(), -divisor.coeff(i)))
        .collect::<Result<_>>()?;
    let system = HalfspaceSystem::new(fan.dim, rows)?;
    RationalPolytope::intersect_halfspaces(&system)
}

/// Iitaka dimension: the dimension of the divisor polytope, `-infinity`
/// when it is empty. On these varieties the numerical Iitaka dimension
/// agrees, so the same value is reported for both.
pub fn iitaka_dim(fan: &Fan, divisor: &TorusDivisor) -> Result<IitakaDim> {
    let p = divisor_polytope(fan, divisor)?;
    Ok(match p.affine_dim() {
        None => IitakaDim::NegativeInfinity,
        Some(d) => IitakaDim::Dim(d),
    })
}

/// Membership of the divisor class in the cone spanned by the ray divisor
/// classes, via an exact feasibility solve.
pub fn is_pseudoeffective(fan: &Fan, divisor: &TorusDivisor) -> Result<bool> {
    fan.require_valid()?;
    // a_ray + <u, v_ray> = lambda_ray with lambda >= 0 and u free.
    let r = fan.ray_count();
    let n = fan.dim;
    let nvars = r + 2 * n;
    let mut a = Vec::with_capacity(r);
    let mut b = Vec::with_capacity(r);
    for (i, ray) in fan.rays.iter().enumerate() {
        let mut row = vec![Rational::zero(); nvars];
        row[i] = Rational::from_integer(BigInt::from(1));
        for (k, coord) in ray.iter().enumerate() {
            row[r + k] = -Rational::from_integer(coord.clone());
            row[r + n + k] = Rational::from_integer(coord.clone());
        }
        a.push(row);
        b.push(divisor.coeff(i));
    }
    let c = vec![Rational::zero(); nvars];
    let feasible = matches!(lp::simplex_min(&a, &b, &c), lp::LpOutcome::Optimal { .. });
    Ok(feasible)
}

/// The Okounkov body of the divisor with respect to an invariant flag,
/// valuative or limiting. Both kinds coincide on these varieties and are
/// the affine unimodular image of the divisor polytope under the flag
/// pairing map.
pub fn okounkov_body(
    fan: &Fan,
    divisor: &TorusDivisor,
    flag: &InvariantFlag,
    kind: BodyKind,
) -> Result<ConvexBody> {
    fan.require_valid()?;
    fan.require_flag(flag)?;
    if !matches!(kind, BodyKind::Valuative | BodyKind::Limiting) {
        return Err(Error::InvalidArgument(
            "toric bodies are valuative or limiting".into(),
        ));
    }
    let p = divisor_polytope(fan, divisor)?;
    if p.is_empty() {
        // Empty polytope: no effective multiple and (equivalently here) no
        // pseudoeffective class, so either kind of body is empty.
        debug_assert!(!is_pseudoeffective(fan, divisor)?);
        return Ok(ConvexBody::new(
            RationalPolytope::empty(fan.dim),
            kind,
            Exactness::Exact,
            flag.label(),
        ));
    }
    let linear: Vec<Vec<Rational>> = flag
        .ray_order
        .iter()
        .map(|&i| {
            fan.rays[i]
                .iter()
                .map(|v| Rational::from_integer(v.clone()))
                .collect()
        })
        .collect();
    let shift = QVector::new(flag.ray_order.iter().map(|&i| divisor.coeff(i)).collect());
    let image = p.affine_image(&linear, &shift)?;
    Ok(ConvexBody::new(image, kind, Exactness::Exact, flag.label()))
}

/// Number of global sections of `m * divisor`: the lattice point count of
/// the polytope of the multiple. The multiple must be an integral divisor.
pub fn sections_count(fan: &Fan, divisor: &TorusDivisor, m: u32) -> Result<usize> {
    if m == 0 {
        return Err(Error::InvalidArgument("multiple must be positive".into()));
    }
    let factor = Rational::from_integer(BigInt::from(m));
    let scaled = divisor.scaled(&factor);
    for (i, a) in scaled.coeffs() {
        if !a.is_integer() {
            return Err(Error::InvalidArgument(format!(
                "coefficient {a} of ray {i} is not integral at level {m}"
            )));
        }
    }
    let p = divisor_polytope(fan, &scaled)?;
    Ok(p.lattice_points().len())
}

fn face_is_nonempty(
    p: &RationalPolytope,
    fan: &Fan,
    divisor: &TorusDivisor,
    cone: &OrbitCone,
) -> bool {
    if p.is_empty() {
        return false;
    }
    if cone.is_whole_variety() {
        return true;
    }
    p.vertices().iter().any(|v| {
        cone.ray_indices.iter().all(|&i| {
            let pairing = v.dot_int(fan.ray(i));
            pairing == -divisor.coeff(i)
        })
    })
}

/// Stable base locus membership for every fan cone: the orbit closure lies
/// in the locus exactly when its face of the divisor polytope is empty.
fn stable_locus(
    fan: &Fan,
    divisor: &TorusDivisor,
    cones: &[OrbitCone],
) -> Result<BTreeSet<OrbitCone>> {
    let p = divisor_polytope(fan, divisor)?;
    Ok(cones
        .iter()
        .filter(|cone| !face_is_nonempty(&p, fan, divisor, cone))
        .cloned()
        .collect())
}

/// Stable, restricted and augmented base loci.
///
/// The restricted locus is the stabilized value of the stable locus of
/// `D + eps * A` and the augmented one of `D - eps * A`, for `A` the sum of
/// all ray divisors, with eps halved from 1 until three consecutive rounds
/// agree and the pattern is confirmed at an interval midpoint.
pub fn base_loci(fan: &Fan, divisor: &TorusDivisor) -> Result<BaseLociReport> {
    fan.require_valid()?;
    let cones = fan.all_cones();
    let stable = stable_locus(fan, divisor, &cones)?;

    let perturbed = |eps: &Rational, sign: i64| -> Result<BTreeSet<OrbitCone>> {
        let shift = TorusDivisor::from_pairs(
            &(0..fan.ray_count())
                .map(|i| (i, eps * Rational::from_integer(BigInt::from(sign))))
                .collect::<Vec<_>>(),
        );
        stable_locus(fan, &divisor.plus(&shift), &cones)
    };

    let stabilize = |sign: i64| -> Result<(BTreeSet<OrbitCone>, Rational)> {
        let mut eps = Rational::from_integer(BigInt::from(1));
        let half = crate::exactgeom::rat(1, 2);
        let mut history: Vec<(Rational, BTreeSet<OrbitCone>)> = Vec::new();
        for _ in 0..40 {
            let pattern = perturbed(&eps, sign)?;
            history.push((eps.clone(), pattern));
            let len = history.len();
            if len >= 3 {
                let (e0, p0) = &history[len - 3];
                let (_, p1) = &history[len - 2];
                let (e2, p2) = &history[len - 1];
                if p0 == p1 && p1 == p2 {
                    // Chamber certificate: the pattern must also hold at a
                    // midpoint of the final interval.
                    let mid = (e0 + e2) * half.clone();
                    if perturbed(&mid, sign)? == *p2 {
                        return Ok((p2.clone(), e2.clone()));
                    }
                }
            }
            eps *= half.clone();
        }
        Err(Error::InvalidArgument(
            "base locus perturbation did not stabilize within 40 halvings".into(),
        ))
    };

    let (restricted, restricted_epsilon) = stabilize(1)?;
    let (augmented, augmented_epsilon) = stabilize(-1)?;
    let restricted_divisorial: Vec<usize> = (0..fan.ray_count())
        .filter(|&i| restricted.contains(&OrbitCone::new(vec![i])))
        .collect();
    Ok(BaseLociReport {
        stable: stable.into_iter().collect(),
        restricted: restricted.into_iter().collect(),
        augmented: augmented.into_iter().collect(),
        restricted_divisorial,
        restricted_epsilon,
        augmented_epsilon,
    })
}

/// Shadow of the divisor polytope in the character sublattice orthogonal to
/// the cone, expressed in a lattice basis. The projection kills the span of
/// the cone's rays.
fn shadow_polytope(fan: &Fan, p: &RationalPolytope, cone: &OrbitCone) -> Result<RationalPolytope> {
    let n = fan.dim;
    let k = cone.ray_indices.len();
    if k == 0 {
        return Ok(p.clone());
    }
    if p.is_empty() {
        return Ok(RationalPolytope::empty(n - k));
    }
    // Lattice basis of {u : <u, v_ray> = 0 for rays of the cone}.
    let rows: Vec<Vec<BigInt>> = cone
        .ray_indices
        .iter()
        .map(|&i| fan.rays[i].clone())
        .collect();
    let lattice = linalg::integer_kernel(&rows, n);
    debug_assert_eq!(lattice.len(), n - k);
    // Solve v = B x + V_tau y per vertex; the shadow coordinate is x.
    let mut columns: Vec<Vec<Rational>> = Vec::with_capacity(n);
    for basis_vec in &lattice {
        columns.push(
            basis_vec
                .iter()
                .map(|v| Rational::from_integer(v.clone()))
                .collect(),
        );
    }
    for &i in &cone.ray_indices {
        columns.push(
            fan.rays[i]
                .iter()
                .map(|v| Rational::from_integer(v.clone()))
                .collect(),
        );
    }
    let solve_matrix: Vec<Vec<Rational>> = (0..n)
        .map(|row| columns.iter().map(|col| col[row].clone()).collect())
        .collect();
    let inverse = linalg::invert(&solve_matrix).ok_or_else(|| {
        Error::InvalidArgument("cone rays do not complement the orthogonal sublattice".into())
    })?;
    let images: Vec<QVector> = p
        .vertices()
        .iter()
        .map(|v| {
            QVector::new(
                (0..n - k)
                    .map(|j| (0..n).map(|c| &inverse[j][c] * v.coord(c)).sum())
                    .collect(),
            )
        })
        .collect();
    RationalPolytope::convex_hull(n - k, &images)
}

/// Restricted volume along the invariant subvariety of the cone: the
/// euclidean volume of the shadow of the divisor polytope inside the
/// orthogonal character lattice, with value 0 when the shadow has smaller
/// dimension than the subvariety. Requires the subvariety to avoid the
/// restricted base locus.
pub fn restricted_volume(fan: &Fan, divisor: &TorusDivisor, cone: &OrbitCone) -> Result<Rational> {
    fan.require_valid()?;
    fan.require_cone(cone)?;
    let loci = base_loci(fan, divisor)?;
    if loci.restricted.contains(cone) {
        return Err(Error::InsideRestrictedBaseLocus);
    }
    let p = divisor_polytope(fan, divisor)?;
    let shadow = shadow_polytope(fan, &p, cone)?;
    let subvariety_dim = fan.dim - cone.ray_indices.len();
    match shadow.affine_dim() {
        None => Ok(Rational::zero()),
        Some(d) if d < subvariety_dim => Ok(Rational::zero()),
        Some(_) => shadow.volume(),
    }
}

/// Certifies the Nakayama property: the subvariety dimension equals the
/// Iitaka dimension and the whole divisor polytope saturates the cone's
/// inequalities, so no section of any multiple vanishes along the
/// subvariety. The witness is an affine-hull basis on success, or a vertex
/// with positive slack on failure.
pub fn is_nakayama(fan: &Fan, divisor: &TorusDivisor, cone: &OrbitCone) -> Result<Certification> {
    fan.require_valid()?;
    fan.require_cone(cone)?;
    let p = divisor_polytope(fan, divisor)?;
    let Some(kappa) = p.affine_dim() else {
        return Err(Error::InvalidArgument(
            "Nakayama certification requires nonnegative Iitaka dimension".into(),
        ));
    };
    let subvariety_dim = fan.dim - cone.ray_indices.len();
    if subvariety_dim != kappa {
        return Ok(Certification {
            holds: false,
            reason: format!(
                "subvariety dimension {subvariety_dim} differs from Iitaka dimension {kappa}"
            ),
            witness_vectors: Vec::new(),
        });
    }
    for v in p.vertices() {
        for &i in &cone.ray_indices {
            let slack = v.dot_int(fan.ray(i)) + divisor.coeff(i);
            if !slack.is_zero() {
                return Ok(Certification {
                    holds: false,
                    reason: format!(
                        "vertex {v} has slack {slack} on ray {i}; some section vanishes along the subvariety"
                    ),
                    witness_vectors: vec![v.clone()],
                });
            }
        }
    }
    let base = &p.vertices()[0];
    let mut witness = vec![base.clone()];
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    for v in &p.vertices()[1..] {
        let diff = v.sub(base);
        let mut candidate = basis.clone();
        candidate.push(diff.coords().to_vec());
        if linalg::rank(&candidate) == candidate.len() {
            basis = candidate;
            witness.push(diff);
        }
    }
    Ok(Certification {
        holds: true,
        reason: "divisor polytope saturates the cone; restriction maps are injective".into(),
        witness_vectors: witness,
    })
}

/// Certifies the positive-volume property: matching dimension, not inside
/// the restricted base locus, and a full-dimensional shadow.
pub fn is_positive_volume(
    fan: &Fan,
    divisor: &TorusDivisor,
    cone: &OrbitCone,
) -> Result<Certification> {
    fan.require_valid()?;
    fan.require_cone(cone)?;
    if !is_pseudoeffective(fan, divisor)? {
        return Err(Error::NotPseudoeffective);
    }
    let p = divisor_polytope(fan, divisor)?;
    let kappa = p
        .affine_dim()
        .expect("pseudoeffective divisors have nonempty polytopes here");
    let subvariety_dim = fan.dim - cone.ray_indices.len();
    if subvariety_dim != kappa {
        return Ok(Certification {
            holds: false,
            reason: format!(
                "subvariety dimension {subvariety_dim} differs from numerical Iitaka dimension {kappa}"
            ),
            witness_vectors: Vec::new(),
        });
    }
    let loci = base_loci(fan, divisor)?;
    if loci.restricted.contains(cone) {
        return Ok(Certification {
            holds: false,
            reason: "subvariety lies inside the restricted base locus".into(),
            witness_vectors: Vec::new(),
        });
    }
    let shadow = shadow_polytope(fan, &p, cone)?;
    if shadow.affine_dim() != Some(subvariety_dim) {
        return Ok(Certification {
            holds: false,
            reason: "projected polytope is not full-dimensional in the orthogonal lattice".into(),
            witness_vectors: shadow.vertices().to_vec(),
        });
    }
    Ok(Certification {
        holds: true,
        reason: format!(
            "projected polytope has positive volume {}",
            crate::exactgeom::format_rational(&shadow.volume()?)
        ),
        witness_vectors: shadow.vertices().to_vec(),
    })
}

/// Constructs some ample divisor by solving for a strictly convex support
/// function; used when deriving surface models from two-dimensional fans.
pub fn ample_divisor(fan: &Fan) -> Result<TorusDivisor> {
    fan.require_valid()?;
    let r = fan.ray_count();
    let n = fan.dim;
    let k = fan.max_cones.len();
    // Variables: a (r, free), u_sigma (n per cone, free), surplus per strict
    // row. Rows: <u_sigma, v> + a_v = 0 for v in sigma, and >= 1 otherwise.
    let strict_rows: usize = k * (r - n);
    let free = r + k * n;
    let nvars = 2 * free + strict_rows;
    let mut a_mat = Vec::new();
    let mut b_vec = Vec::new();
    let mut surplus = 0;
    for (ci, cone) in fan.max_cones.iter().enumerate() {
        for (ri, ray) in fan.rays.iter().enumerate() {
            let mut row = vec![Rational::zero(); nvars];
            row[ri] = Rational::from_integer(BigInt::from(1));
            row[free + ri] = -Rational::from_integer(BigInt::from(1));
            for (c, coord) in ray.iter().enumerate() {
                let idx = r + ci * n + c;
                row[idx] = Rational::from_integer(coord.clone());
                row[free + idx] = -Rational::from_integer(coord.clone());
            }
            if cone.contains(&ri) {
                b_vec.push(Rational::zero());
            } else {
                row[2 * free + surplus] = -Rational::from_integer(BigInt::from(1));
                surplus += 1;
                b_vec.push(Rational::from_integer(BigInt::from(1)));
            }
            a_mat.push(row);
        }
    }
    debug_assert_eq!(surplus, strict_rows);
    let c = vec![Rational::zero(); nvars];
    match lp::simplex_min(&a_mat, &b_vec, &c) {
        lp::LpOutcome::Optimal { solution, .. } => {
            let coeffs: Vec<(usize, Rational)> = (0..r)
                .map(|i| (i, &solution[i] - &solution[free + i]))
                .collect();
            Ok(TorusDivisor::from_pairs(&coeffs))
        }
        _ => Err(Error::InvalidFan(
            "no strictly convex support function; fan is not projective".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::{rat, rat_int};

    fn ray(vals: &[i64]) -> Vec<BigInt> {
        vals.iter().map(|&v| BigInt::from(v)).collect()
    }

    fn projective_plane() -> Fan {
        Fan::new(
            2,
            vec![ray(&[1, 0]), ray(&[0, 1]), ray(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap()
    }

    // Blow-up of the plane at two torus-fixed points. Ray 2 spans the
    // exceptional curve over the point of cone {0,1}; ray 4 the one over
    // the point of cone {0,3}.
    fn two_point_blowup() -> Fan {
        Fan::new(
            2,
            vec![
                ray(&[1, 0]),
                ray(&[0, 1]),
                ray(&[1, 1]),
                ray(&[-1, -1]),
                ray(&[0, -1]),
            ],
            vec![vec![0, 2], vec![1, 2], vec![1, 3], vec![3, 4], vec![0, 4]],
        )
        .unwrap()
    }

    // The divisor L - E1 + E2 on the two-point blow-up, in ray divisors
    // -D_2 + D_3 + 2 D_4.
    fn blowup_divisor() -> TorusDivisor {
        TorusDivisor::from_pairs(&[(2, rat_int(-1)), (3, rat_int(1)), (4, rat_int(2))])
    }

    #[test]
    fn validation_examples() {
        let plane = projective_plane();
        let report = plane.validate();
        assert!(report.is_valid(), "issues: {:?}", report.issues);

        let incomplete = Fan::new(
            2,
            vec![ray(&[1, 0]), ray(&[0, 1]), ray(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        let report = incomplete.validate();
        assert!(!report.complete);
        assert!(report.smooth);

        let singular = Fan::new(
            2,
            vec![ray(&[1, 0]), ray(&[1, 2]), ray(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        assert!(!singular.validate().smooth);
    }

    #[test]
    fn plane_polytopes() {
        let plane = projective_plane();
        let h = TorusDivisor::from_pairs(&[(2, rat_int(1))]);
        let p = divisor_polytope(&plane, &h).unwrap();
        assert_eq!(
            p.vertices(),
            &[
                QVector::from_ints(&[0, 0]),
                QVector::from_ints(&[0, 1]),
                QVector::from_ints(&[1, 0])
            ]
        );
        let zero = divisor_polytope(&plane, &TorusDivisor::zero()).unwrap();
        assert_eq!(zero.affine_dim(), Some(0));
        let neg = divisor_polytope(&plane, &TorusDivisor::from_pairs(&[(2, rat_int(-1))])).unwrap();
        assert!(neg.is_empty());
    }

    #[test]
    fn iitaka_dimensions() {
        let plane = projective_plane();
        let h = TorusDivisor::from_pairs(&[(2, rat_int(1))]);
        assert_eq!(iitaka_dim(&plane, &h).unwrap(), IitakaDim::Dim(2));
        assert_eq!(
            iitaka_dim(&plane, &TorusDivisor::zero()).unwrap(),
            IitakaDim::Dim(0)
        );
        let blowup = two_point_blowup();
        assert_eq!(
            iitaka_dim(&blowup, &blowup_divisor()).unwrap(),
            IitakaDim::Dim(1)
        );
        assert_eq!(
            iitaka_dim(&plane, &TorusDivisor::from_pairs(&[(2, rat_int(-1))])).unwrap(),
            IitakaDim::NegativeInfinity
        );
    }

    #[test]
    fn pseudoeffectivity_matches_polytope() {
        let blowup = two_point_blowup();
        assert!(is_pseudoeffective(&blowup, &blowup_divisor()).unwrap());
        let anti = TorusDivisor::from_pairs(&[(3, rat_int(-1))]);
        assert!(!is_pseudoeffective(&blowup, &anti).unwrap());
        assert!(is_pseudoeffective(&blowup, &TorusDivisor::zero()).unwrap());
    }

    #[test]
    fn plane_body_is_the_simplex() {
        let plane = projective_plane();
        let h = TorusDivisor::from_pairs(&[(2, rat_int(1))]);
        let flag = InvariantFlag::new(vec![0, 1]);
        let body = okounkov_body(&plane, &h, &flag, BodyKind::Valuative).unwrap();
        assert_eq!(
            body.polytope.vertices(),
            &[
                QVector::from_ints(&[0, 0]),
                QVector::from_ints(&[0, 1]),
                QVector::from_ints(&[1, 0])
            ]
        );
        let zero_body =
            okounkov_body(&plane, &TorusDivisor::zero(), &flag, BodyKind::Limiting).unwrap();
        assert_eq!(zero_body.polytope.vertices(), &[QVector::from_ints(&[0, 0])]);
    }

    #[test]
    fn blowup_body_depends_on_flag_point() {
        let fan = two_point_blowup();
        let d = blowup_divisor();
        // Flag along the restricted-base-locus curve (ray 4), completed by
        // the fixed point of cone {3, 4}: the shifted horizontal segment.
        let flag = InvariantFlag::new(vec![4, 3]);
        let body = okounkov_body(&fan, &d, &flag, BodyKind::Limiting).unwrap();
        assert_eq!(
            body.polytope.vertices(),
            &[QVector::from_ints(&[1, 0]), QVector::from_ints(&[2, 0])]
        );
        assert_eq!(body.polytope.volume().unwrap(), rat_int(1));
        // Same curve, special fixed point of cone {0, 4}: the segment tilts.
        let tilted =
            okounkov_body(&fan, &d, &InvariantFlag::new(vec![4, 0]), BodyKind::Limiting).unwrap();
        assert_eq!(
            tilted.polytope.vertices(),
            &[QVector::from_ints(&[1, 0]), QVector::from_ints(&[2, 1])]
        );
        // Flag through the saturating curve of ray 2: leading coordinate 0.
        let zeros =
            okounkov_body(&fan, &d, &InvariantFlag::new(vec![2, 0]), BodyKind::Valuative).unwrap();
        assert_eq!(
            zeros.polytope.vertices(),
            &[QVector::from_ints(&[0, 0]), QVector::from_ints(&[0, 1])]
        );
    }

    #[test]
    fn section_counts() {
        let plane = projective_plane();
        let h = TorusDivisor::from_pairs(&[(2, rat_int(1))]);
        assert_eq!(sections_count(&plane, &h, 2).unwrap(), 6);
        assert_eq!(sections_count(&plane, &TorusDivisor::zero(), 7).unwrap(), 1);
        let neg = TorusDivisor::from_pairs(&[(2, rat_int(-1))]);
        assert_eq!(sections_count(&plane, &neg, 3).unwrap(), 0);
        let half = TorusDivisor::from_pairs(&[(2, rat(1, 2))]);
        assert!(sections_count(&plane, &half, 3).is_err());
        assert_eq!(sections_count(&plane, &half, 4).unwrap(), 6);
    }

    #[test]
    fn base_loci_examples() {
        let plane = projective_plane();
        let ample = TorusDivisor::from_pairs(&[(2, rat_int(1))]);
        let report = base_loci(&plane, &ample).unwrap();
        assert!(report.stable.is_empty());
        assert!(report.restricted.is_empty());
        assert!(report.augmented.is_empty());

        let blowup = two_point_blowup();
        let report = base_loci(&blowup, &blowup_divisor()).unwrap();
        assert_eq!(report.restricted_divisorial, vec![4]);
        assert!(report.restricted.contains(&OrbitCone::new(vec![4])));
        assert!(!report.restricted.contains(&OrbitCone::new(vec![2])));

        let zero_report = base_loci(&plane, &TorusDivisor::zero()).unwrap();
        assert!(zero_report.stable.is_empty());
        assert!(zero_report.restricted.is_empty());
        // Every orbit closure, the variety included, sits inside the
        // augmented locus of the zero class.
        assert_eq!(zero_report.augmented.len(), plane.all_cones().len());
    }

    #[test]
    fn restricted_volumes() {
        let plane = projective_plane();
        let h = TorusDivisor::from_pairs(&[(2, rat_int(1))]);
        let line = OrbitCone::new(vec![0]);
        assert_eq!(restricted_volume(&plane, &h, &line).unwrap(), rat_int(1));
        assert_eq!(
            restricted_volume(&plane, &h, &OrbitCone::whole_variety()).unwrap(),
            rat(1, 2)
        );
        let blowup = two_point_blowup();
        let d = blowup_divisor();
        assert_eq!(
            restricted_volume(&blowup, &d, &OrbitCone::new(vec![2])).unwrap(),
            rat_int(1)
        );
        assert!(matches!(
            restricted_volume(&blowup, &d, &OrbitCone::new(vec![4])),
            Err(Error::InsideRestrictedBaseLocus)
        ));
    }

    #[test]
    fn nakayama_certification() {
        let plane = projective_plane();
        let h = TorusDivisor::from_pairs(&[(2, rat_int(1))]);
        assert!(is_nakayama(&plane, &h, &OrbitCone::whole_variety())
            .unwrap()
            .holds);

        let blowup = two_point_blowup();
        let d = blowup_divisor();
        // Fixed point: dimension 0 mismatches Iitaka dimension 1.
        let point = OrbitCone::new(vec![3, 4]);
        assert!(!is_nakayama(&blowup, &d, &point).unwrap().holds);
        // The exceptional curve of ray 2 saturates the polytope.
        assert!(is_nakayama(&blowup, &d, &OrbitCone::new(vec![2]))
            .unwrap()
            .holds);
        // The curve of ray 0 has the right dimension but sections drop off
        // its face.
        assert!(!is_nakayama(&blowup, &d, &OrbitCone::new(vec![0]))
            .unwrap()
            .holds);
    }

    #[test]
    fn positive_volume_certification() {
        let plane = projective_plane();
        let h = TorusDivisor::from_pairs(&[(2, rat_int(1))]);
        assert!(is_positive_volume(&plane, &h, &OrbitCone::whole_variety())
            .unwrap()
            .holds);
        let blowup = two_point_blowup();
        let d = blowup_divisor();
        assert!(!is_positive_volume(&blowup, &d, &OrbitCone::new(vec![4]))
            .unwrap()
            .holds);
        assert!(is_positive_volume(&blowup, &d, &OrbitCone::new(vec![2]))
            .unwrap()
            .holds);
        assert!(matches!(
            is_positive_volume(
                &blowup,
                &TorusDivisor::from_pairs(&[(3, rat_int(-1))]),
                &OrbitCone::new(vec![2])
            ),
            Err(Error::NotPseudoeffective)
        ));
    }

    #[test]
    fn ample_construction() {
        for fan in [projective_plane(), two_point_blowup()] {
            let ample = ample_divisor(&fan).unwrap();
            let report = base_loci(&fan, &ample).unwrap();
            assert!(report.augmented.is_empty());
            let p = divisor_polytope(&fan, &ample).unwrap();
            assert_eq!(p.affine_dim(), Some(fan.dim()));
        }
    }

    #[test]
    fn section_counts_survive_the_flag_map() {
        let fan = two_point_blowup();
        let d = blowup_divisor();
        let flag = InvariantFlag::new(vec![4, 3]);
        for m in 1..=6u32 {
            let counted = sections_count(&fan, &d, m).unwrap();
            let scaled = d.scaled(&rat_int(m as i64));
            let body_m = okounkov_body(&fan, &scaled, &flag, BodyKind::Valuative).unwrap();
            assert_eq!(counted, body_m.polytope.lattice_points().len(), "level {m}");
        }
    }

    #[test]
    fn homogeneity_and_linear_equivalence() {
        let fan = two_point_blowup();
        let d = blowup_divisor();
        let flag = InvariantFlag::new(vec![4, 3]);
        let body = okounkov_body(&fan, &d, &flag, BodyKind::Valuative).unwrap();
        for m in [2i64, 3, 5] {
            let scaled = d.scaled(&rat_int(m));
            let body_m = okounkov_body(&fan, &scaled, &flag, BodyKind::Valuative).unwrap();
            let shrunk = body_m.polytope.scale(&rat(1, m)).unwrap();
            assert_eq!(shrunk, body.polytope, "homogeneity at m = {m}");
        }
        for u in [[1i64, 0], [0, 1], [-2, 3], [5, 5]] {
            let shifted = d.plus_character(&fan, &ray(&u));
            let body_u = okounkov_body(&fan, &shifted, &flag, BodyKind::Valuative).unwrap();
            assert_eq!(body_u.polytope, body.polytope, "invariance under {u:?}");
        }
    }
}
