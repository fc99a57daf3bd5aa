//! Bounded rational polytopes with synchronized vertex and halfspace
//! descriptions.
//!
//! Every polytope built here carries both representations in canonical form:
//! vertices sorted lexicographically, facet rows with primitive integer
//! normals, affine-hull equalities stored as opposing row pairs, and the
//! empty polytope as a distinguished value.
// Index-based loops mirror the matrix algebra; clearer than iterator chains here.
#![allow(clippy::needless_range_loop)]
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::dd;
use super::linalg;
use super::lp;
use super::rational::{integerize, QuadraticValue, Rational};
use super::vector::QVector;
use crate::error::{Error, Result};

/// One inequality `<u, normal> >= bound` with a primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<BigInt>,
    pub bound: Rational,
}

impl Halfspace {
    /// Normalizes the normal to a primitive integer vector, rescaling the
    /// bound to keep the halfspace unchanged.
    pub fn new(normal: Vec<BigInt>, bound: Rational) -> Result<Self> {
        if normal.iter().all(|v| v.is_zero()) {
            return Err(Error::InvalidArgument(
                "halfspace normal must be nonzero".into(),
            ));
        }
        let mut g = BigInt::zero();
        for v in &normal {
            g = num_integer::Integer::gcd(&g, v);
        }
        if g.is_one() {
            return Ok(Halfspace { normal, bound });
        }
        let scaled: Vec<BigInt> = normal.iter().map(|v| v / &g).collect();
        let bound = bound / Rational::from_integer(g);
        Ok(Halfspace {
            normal: scaled,
            bound,
        })
    }

    pub fn from_rational_row(normal: &[Rational], bound: &Rational) -> Result<Self> {
        let int_normal = integerize(normal);
        // integerize scales by a positive rational; recover it from any
        // nonzero coordinate and apply to the bound.
        let k = normal
            .iter()
            .position(|v| !v.is_zero())
            .ok_or_else(|| Error::InvalidArgument("halfspace normal must be nonzero".into()))?;
        let factor = Rational::from_integer(int_normal[k].clone()) / normal[k].clone();
        Halfspace::new(int_normal, bound * factor)
    }

    pub fn evaluate(&self, point: &QVector) -> Rational {
        point.dot_int(&self.normal) - &self.bound
    }

    pub fn contains(&self, point: &QVector) -> bool {
        !self.evaluate(point).is_negative()
    }

    pub fn is_tight_at(&self, point: &QVector) -> bool {
        self.evaluate(point).is_zero()
    }
}

/// A finite list of halfspaces cutting out `{u : <u, normal_i> >= bound_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfspaceSystem {
    ambient_dim: usize,
    rows: Vec<Halfspace>,
}

impl HalfspaceSystem {
    pub fn new(ambient_dim: usize, rows: Vec<Halfspace>) -> Result<Self> {
        for row in &rows {
            if row.normal.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: row.normal.len(),
                });
            }
        }
        let mut sorted = rows;
        sorted.sort();
        sorted.dedup();
        Ok(HalfspaceSystem {
            ambient_dim,
            rows: sorted,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rows(&self) -> &[Halfspace] {
        &self.rows
    }

    pub fn contains(&self, point: &QVector) -> bool {
        self.rows.iter().all(|r| r.contains(point))
    }
}

/// Dual-representation bounded polytope over the rationals.
#[derive(Clone, Debug)]
pub struct RationalPolytope {
    ambient_dim: usize,
    vertices: Vec<QVector>,
    halfspaces: HalfspaceSystem,
    empty: bool,
}

impl PartialEq for RationalPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.empty == other.empty
            && self.vertices == other.vertices
    }
}

impl Eq for RationalPolytope {}

impl RationalPolytope {
    pub fn empty(ambient_dim: usize) -> Self {
        RationalPolytope {
            ambient_dim,
            vertices: Vec::new(),
            halfspaces: HalfspaceSystem {
                ambient_dim,
                rows: Vec::new(),
            },
            empty: true,
        }
    }

    /// Convex hull of a point set; the canonical empty polytope on empty
    /// input.
    pub fn convex_hull(ambient_dim: usize, points: &[QVector]) -> Result<Self> {
        for p in points {
            p.check_dim(ambient_dim)?;
        }
        let distinct: BTreeSet<QVector> = points.iter().cloned().collect();
        let verts: Vec<QVector> = distinct.into_iter().collect();
        if verts.is_empty() {
            return Ok(RationalPolytope::empty(ambient_dim));
        }
        if ambient_dim == 0 {
            return Ok(RationalPolytope {
                ambient_dim,
                vertices: vec![QVector::new(Vec::new())],
                halfspaces: HalfspaceSystem {
                    ambient_dim,
                    rows: Vec::new(),
                },
                empty: false,
            });
        }
        Self::hull_of_distinct(ambient_dim, verts)
    }

    /// Intersection of halfspaces; errors on an unbounded region.
    pub fn intersect_halfspaces(system: &HalfspaceSystem) -> Result<Self> {
        let n = system.ambient_dim;
        if n == 0 {
            return Ok(RationalPolytope {
                ambient_dim: 0,
                vertices: vec![QVector::new(Vec::new())],
                halfspaces: HalfspaceSystem {
                    ambient_dim: 0,
                    rows: Vec::new(),
                },
                empty: false,
            });
        }
        if system.rows.is_empty() {
            return Err(Error::Unbounded);
        }
        // A normal matrix of deficient rank means the region is invariant
        // under translation: nonempty implies unbounded.
        let normal_rows: Vec<Vec<Rational>> = system
            .rows
            .iter()
            .map(|r| {
                r.normal
                    .iter()
                    .map(|v| Rational::from_integer(v.clone()))
                    .collect()
            })
            .collect();
        if linalg::rank(&normal_rows) < n {
            let feasible = region_is_feasible(system);
            return if feasible {
                Err(Error::Unbounded)
            } else {
                Ok(RationalPolytope::empty(n))
            };
        }
        // Homogenize: rays of {(u, t) : <u, a_i> - b_i t >= 0, t >= 0}.
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(system.rows.len() + 1);
        for r in &system.rows {
            let mut q: Vec<Rational> = r
                .normal
                .iter()
                .map(|v| Rational::from_integer(v.clone()))
                .collect();
            q.push(-r.bound.clone());
            rows.push(integerize(&q));
        }
        let mut t_row = vec![BigInt::zero(); n];
        t_row.push(BigInt::one());
        rows.push(t_row);
        let rays = dd::extreme_rays(n + 1, &rows)?;
        let mut verts = Vec::new();
        let mut recession = false;
        for ray in rays {
            if ray[n].is_zero() {
                recession = true;
            } else {
                let t = Rational::from_integer(ray[n].clone());
                verts.push(QVector::new(
                    ray[..n]
                        .iter()
                        .map(|v| Rational::from_integer(v.clone()) / t.clone())
                        .collect(),
                ));
            }
        }
        if verts.is_empty() {
            return Ok(RationalPolytope::empty(n));
        }
        if recession {
            return Err(Error::Unbounded);
        }
        Self::convex_hull(n, &verts)
    }

    /// Core hull construction on a deduplicated nonempty point set.
    fn hull_of_distinct(n: usize, points: Vec<QVector>) -> Result<Self> {
        let base = &points[0];
        let diffs: Vec<Vec<Rational>> = points[1..]
            .iter()
            .map(|p| p.sub(base).coords().to_vec())
            .collect();

        // Affine-hull equalities: kernel vectors of the difference rows.
        let mut rows: Vec<Halfspace> = Vec::new();
        let complement = if diffs.is_empty() {
            (0..n)
                .map(|j| {
                    let mut w = vec![Rational::zero(); n];
                    w[j] = Rational::one();
                    w
                })
                .collect()
        } else {
            linalg::kernel(&diffs)
        };
        for w in &complement {
            let value: Rational = w
                .iter()
                .zip(base.coords())
                .map(|(a, b)| a * b)
                .sum();
            rows.push(Halfspace::from_rational_row(w, &value)?);
            let neg: Vec<Rational> = w.iter().map(|v| -v.clone()).collect();
            rows.push(Halfspace::from_rational_row(&neg, &(-value))?);
        }

        // Pick an affine basis among the difference vectors.
        let mut basis: Vec<Vec<Rational>> = Vec::new();
        for d in &diffs {
            let mut candidate = basis.clone();
            candidate.push(d.clone());
            if linalg::rank(&candidate) == candidate.len() {
                basis = candidate;
            }
        }
        let d = basis.len();
        if d == 0 {
            // Single point.
            return Ok(RationalPolytope {
                ambient_dim: n,
                vertices: points,
                halfspaces: HalfspaceSystem::new(n, rows)?,
                empty: false,
            });
        }

        // Coordinates within the affine hull: x = B_I^{-1} (p - base)_I for a
        // pivot coordinate set I.
        let pivots = pivot_columns(&basis);
        let b_sub: Vec<Vec<Rational>> = pivots
            .iter()
            .map(|&i| basis.iter().map(|row| row[i].clone()).collect())
            .collect();
        let b_inv = linalg::invert(&b_sub).expect("pivot submatrix is invertible");
        let coords_of = |p: &QVector| -> Vec<Rational> {
            let rel = p.sub(base);
            let rhs: Vec<Rational> = pivots.iter().map(|&i| rel.coord(i).clone()).collect();
            (0..d)
                .map(|j| {
                    (0..d)
                        .map(|k| &b_inv[j][k] * &rhs[k])
                        .sum()
                })
                .collect()
        };
        let local: Vec<Vec<Rational>> = points.iter().map(&coords_of).collect();

        // Facets of the full-dimensional hull in local coordinates are the
        // extreme rays of the dual cone of the lifted points.
        let mut dual_rows = Vec::with_capacity(local.len());
        for u in &local {
            let mut q = u.clone();
            q.push(Rational::one());
            dual_rows.push(integerize(&q));
        }
        let facet_rays = dd::extreme_rays(d + 1, &dual_rows)?;

        // Pull each local facet back to ambient coordinates.
        // Local inequality: <y, x> >= -s where x_j = sum_k binv[j][k] (p - base)_{pivots[k]}.
        let mut facet_normals_local: Vec<Vec<BigInt>> = Vec::new();
        for ray in &facet_rays {
            let y = &ray[..d];
            debug_assert!(
                !y.iter().all(|v| v.is_zero()),
                "trivial inequality cannot be extreme for a bounded hull"
            );
            let s = Rational::from_integer(ray[d].clone());
            let mut ambient = vec![Rational::zero(); n];
            for (k, &i) in pivots.iter().enumerate() {
                let coeff: Rational = (0..d)
                    .map(|j| Rational::from_integer(y[j].clone()) * &b_inv[j][k])
                    .sum();
                ambient[i] = coeff;
            }
            let offset: Rational = ambient
                .iter()
                .zip(base.coords())
                .map(|(a, b)| a * b)
                .sum();
            rows.push(Halfspace::from_rational_row(&ambient, &(offset - s))?);
            facet_normals_local.push(y.to_vec());
        }

        // A point is a vertex exactly when its tight facet normals span the
        // local space.
        let mut verts = Vec::new();
        for (p, u) in points.iter().zip(&local) {
            let tight: Vec<Vec<Rational>> = facet_rays
                .iter()
                .filter(|ray| {
                    let value: Rational = ray[..d]
                        .iter()
                        .zip(u)
                        .map(|(a, b)| Rational::from_integer(a.clone()) * b)
                        .sum::<Rational>()
                        + Rational::from_integer(ray[d].clone());
                    value.is_zero()
                })
                .map(|ray| {
                    ray[..d]
                        .iter()
                        .map(|v| Rational::from_integer(v.clone()))
                        .collect()
                })
                .collect();
            if linalg::rank(&tight) == d {
                verts.push(p.clone());
            }
        }
        verts.sort();
        Ok(RationalPolytope {
            ambient_dim: n,
            vertices: verts,
            halfspaces: HalfspaceSystem::new(n, rows)?,
            empty: false,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn vertices(&self) -> &[QVector] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &HalfspaceSystem {
        &self.halfspaces
    }

    /// Dimension of the affine hull; `None` for the empty polytope.
    pub fn affine_dim(&self) -> Option<usize> {
        if self.empty {
            return None;
        }
        let base = &self.vertices[0];
        let diffs: Vec<Vec<Rational>> = self.vertices[1..]
            .iter()
            .map(|p| p.sub(base).coords().to_vec())
            .collect();
        Some(linalg::rank(&diffs))
    }

    pub fn contains(&self, point: &QVector) -> bool {
        !self.empty && point.dim() == self.ambient_dim && self.halfspaces.contains(point)
    }

    /// Set containment: every vertex of `other` lies in `self`.
    pub fn contains_polytope(&self, other: &RationalPolytope) -> bool {
        if other.empty {
            return true;
        }
        if self.empty || self.ambient_dim != other.ambient_dim {
            return false;
        }
        other.vertices.iter().all(|v| self.contains(v))
    }

    /// Image under `u -> linear * u + shift` for invertible `linear`; both
    /// representations are transformed, so facet combinatorics survive.
    pub fn affine_image(&self, linear: &[Vec<Rational>], shift: &QVector) -> Result<Self> {
        let n = self.ambient_dim;
        if linear.len() != n || shift.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: linear.len().max(shift.dim()),
            });
        }
        if self.empty {
            return Ok(RationalPolytope::empty(n));
        }
        let inv = linalg::invert(linear)
            .ok_or_else(|| Error::InvalidArgument("affine image requires an invertible map".into()))?;
        let verts: Vec<QVector> = self
            .vertices
            .iter()
            .map(|v| {
                let mapped: Vec<Rational> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| &linear[i][j] * v.coord(j))
                            .sum::<Rational>()
                            + shift.coord(i).clone()
                    })
                    .collect();
                QVector::new(mapped)
            })
            .collect();
        let mut rows = Vec::new();
        for hs in self.halfspaces.rows() {
            // <u, a> >= b with u = inv (y - shift): normal' = inv^T a.
            let normal_q: Vec<Rational> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            &inv[j][i] * Rational::from_integer(hs.normal[j].clone())
                        })
                        .sum()
                })
                .collect();
            let offset: Rational = normal_q
                .iter()
                .zip(shift.coords())
                .map(|(a, b)| a * b)
                .sum();
            rows.push(Halfspace::from_rational_row(
                &normal_q,
                &(hs.bound.clone() + offset),
            )?);
        }
        let mut verts = verts;
        verts.sort();
        Ok(RationalPolytope {
            ambient_dim: n,
            vertices: verts,
            halfspaces: HalfspaceSystem::new(n, rows)?,
            empty: false,
        })
    }

    /// Dilation by a positive rational factor.
    pub fn scale(&self, factor: &Rational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidArgument(
                "scale factor must be positive".into(),
            ));
        }
        if self.empty {
            return Ok(self.clone());
        }
        let verts: Vec<QVector> = self.vertices.iter().map(|v| v.scale(factor)).collect();
        let rows: Vec<Halfspace> = self
            .halfspaces
            .rows()
            .iter()
            .map(|hs| Halfspace {
                normal: hs.normal.clone(),
                bound: &hs.bound * factor,
            })
            .collect();
        Ok(RationalPolytope {
            ambient_dim: self.ambient_dim,
            vertices: verts,
            halfspaces: HalfspaceSystem::new(self.ambient_dim, rows)
                .expect("scaled rows remain valid"),
            empty: false,
        })
    }

    pub fn translate(&self, shift: &QVector) -> Result<Self> {
        shift.check_dim(self.ambient_dim)?;
        if self.empty {
            return Ok(self.clone());
        }
        let verts: Vec<QVector> = self.vertices.iter().map(|v| v.add(shift)).collect();
        let rows: Vec<Halfspace> = self
            .halfspaces
            .rows()
            .iter()
            .map(|hs| Halfspace {
                normal: hs.normal.clone(),
                bound: &hs.bound + shift.dot_int(&hs.normal),
            })
            .collect();
        Ok(RationalPolytope {
            ambient_dim: self.ambient_dim,
            vertices: verts,
            halfspaces: HalfspaceSystem::new(self.ambient_dim, rows)
                .expect("translated rows remain valid"),
            empty: false,
        })
    }

    /// Image under an integer linear map given by `map` rows (target dim =
    /// number of rows). Hull of the mapped vertices.
    pub fn project(&self, map: &[Vec<BigInt>]) -> Result<Self> {
        let k = map.len();
        for row in map {
            if row.len() != self.ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.ambient_dim,
                    got: row.len(),
                });
            }
        }
        if self.empty {
            return Ok(RationalPolytope::empty(k));
        }
        let images: Vec<QVector> = self
            .vertices
            .iter()
            .map(|v| QVector::new(map.iter().map(|row| v.dot_int(row)).collect()))
            .collect();
        Self::convex_hull(k, &images)
    }

    /// Exact euclidean volume inside the affine hull; dimension-0 bodies
    /// have volume 1 by convention.
    pub fn euclidean_volume(&self) -> Result<QuadraticValue> {
        if self.empty {
            return Err(Error::EmptyBody);
        }
        let base = &self.vertices[0];
        let diffs: Vec<Vec<Rational>> = self.vertices[1..]
            .iter()
            .map(|p| p.sub(base).coords().to_vec())
            .collect();
        let mut basis: Vec<Vec<Rational>> = Vec::new();
        for dvec in &diffs {
            let mut candidate = basis.clone();
            candidate.push(dvec.clone());
            if linalg::rank(&candidate) == candidate.len() {
                basis = candidate;
            }
        }
        let d = basis.len();
        if d == 0 {
            return QuadraticValue::from_rational(Rational::one());
        }
        // Support of the direction space: if it spans exactly d coordinate
        // axes, restriction to those coordinates is an isometry of the hull.
        let support: BTreeSet<usize> = basis
            .iter()
            .flat_map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(i, _)| i)
            })
            .collect();
        if support.len() == d {
            let axes: Vec<usize> = support.into_iter().collect();
            let local: Vec<Vec<Rational>> = self
                .vertices
                .iter()
                .map(|v| axes.iter().map(|&i| v.coord(i).clone()).collect())
                .collect();
            let vol = volume_full_dim(&local, d)?;
            return QuadraticValue::from_rational(vol);
        }
        // General position: lattice coordinates with a Gram correction.
        let int_rows: Vec<Vec<BigInt>> = linalg::kernel(&basis)
            .iter()
            .map(|w| integerize(w))
            .collect();
        let lattice = linalg::integer_kernel(&int_rows, self.ambient_dim);
        debug_assert_eq!(lattice.len(), d);
        let b_cols: Vec<Vec<Rational>> = (0..self.ambient_dim)
            .map(|i| {
                lattice
                    .iter()
                    .map(|col| Rational::from_integer(col[i].clone()))
                    .collect()
            })
            .collect();
        let local: Vec<Vec<Rational>> = self
            .vertices
            .iter()
            .map(|v| {
                linalg::solve(&b_cols, v.sub(base).coords())
                    .expect("vertices lie in the affine hull")
            })
            .collect();
        let vol = volume_full_dim(&local, d)?;
        let mut gram = vec![vec![Rational::zero(); d]; d];
        for i in 0..d {
            for j in 0..d {
                gram[i][j] = lattice[i]
                    .iter()
                    .zip(&lattice[j])
                    .map(|(a, b)| Rational::from_integer(a * b))
                    .sum();
            }
        }
        QuadraticValue::product(vol, linalg::determinant(&gram))
    }

    /// Euclidean volume as an exact rational; errors when the value is
    /// genuinely irrational.
    pub fn volume(&self) -> Result<Rational> {
        let qv = self.euclidean_volume()?;
        qv.to_rational()
            .ok_or_else(|| Error::IrrationalVolume(qv.to_string()))
    }

    /// All integer points of the polytope in lexicographic order.
    pub fn lattice_points(&self) -> Vec<Vec<BigInt>> {
        if self.empty {
            return Vec::new();
        }
        let n = self.ambient_dim;
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for j in 0..n {
            let min = self
                .vertices
                .iter()
                .map(|v| v.coord(j))
                .min()
                .expect("nonempty");
            let max = self
                .vertices
                .iter()
                .map(|v| v.coord(j))
                .max()
                .expect("nonempty");
            lo.push(min.ceil().to_integer());
            hi.push(max.floor().to_integer());
        }
        let mut out = Vec::new();
        let mut current: Vec<BigInt> = lo.clone();
        if (0..n).any(|j| lo[j] > hi[j]) {
            return out;
        }
        loop {
            let candidate = QVector::new(
                current
                    .iter()
                    .map(|v| Rational::from_integer(v.clone()))
                    .collect(),
            );
            if self.halfspaces.contains(&candidate) {
                out.push(current.clone());
            }
            // Odometer increment, last coordinate fastest.
            let mut j = n;
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if current[j] < hi[j] {
                    current[j] += 1;
                    current[(j + 1)..n].clone_from_slice(&lo[(j + 1)..n]);
                    break;
                }
            }
        }
    }

    /// Exact Hausdorff distance between two nonempty polytopes.
    pub fn hausdorff_distance(&self, other: &RationalPolytope) -> Result<QuadraticValue> {
        if self.empty || other.empty {
            return Err(Error::EmptyBody);
        }
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: other.ambient_dim,
            });
        }
        let mut max_sq = Rational::zero();
        for v in &self.vertices {
            let d = other.distance_sq(v);
            if d > max_sq {
                max_sq = d;
            }
        }
        for v in &other.vertices {
            let d = self.distance_sq(v);
            if d > max_sq {
                max_sq = d;
            }
        }
        QuadraticValue::sqrt_of(max_sq)
    }

    /// Squared euclidean distance from a point to the polytope (0 inside).
    pub fn distance_sq(&self, point: &QVector) -> Rational {
        assert!(!self.empty, "distance to the empty polytope is undefined");
        if self.contains(point) {
            return Rational::zero();
        }
        let mut best: Option<Rational> = None;
        for face in self.faces() {
            let verts: Vec<&QVector> = face.iter().map(|&i| &self.vertices[i]).collect();
            let foot = project_to_affine_hull(point, &verts);
            if !self.contains(&foot) {
                continue;
            }
            let dsq = point.sub(&foot).norm_sq();
            if best.as_ref().is_none_or(|b| dsq < *b) {
                best = Some(dsq);
            }
        }
        best.expect("vertex faces always produce a candidate")
    }

    /// Faces as vertex-index sets: the facet incidences closed under
    /// intersection, plus the polytope itself. Singleton faces (vertices)
    /// appear through the closure.
    fn faces(&self) -> Vec<Vec<usize>> {
        let nv = self.vertices.len();
        let full: Vec<usize> = (0..nv).collect();
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        sets.insert(full);
        for hs in self.halfspaces.rows() {
            let tight: Vec<usize> = (0..nv)
                .filter(|&i| hs.is_tight_at(&self.vertices[i]))
                .collect();
            if !tight.is_empty() {
                sets.insert(tight);
            }
        }
        loop {
            let mut fresh = Vec::new();
            let list: Vec<&Vec<usize>> = sets.iter().collect();
            for i in 0..list.len() {
                for j in i + 1..list.len() {
                    let meet: Vec<usize> = list[i]
                        .iter()
                        .filter(|v| list[j].contains(v))
                        .copied()
                        .collect();
                    if !meet.is_empty() && !sets.contains(&meet) {
                        fresh.push(meet);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            sets.extend(fresh);
        }
        // Ensure every vertex appears as a face even in degenerate cases.
        for i in 0..nv {
            sets.insert(vec![i]);
        }
        sets.into_iter().collect()
    }

    /// Consistency check between the two representations. Test utility.
    pub fn verify_double_description(&self) -> Result<()> {
        if self.empty {
            if !self.vertices.is_empty() || !self.halfspaces.rows().is_empty() {
                return Err(Error::InvalidArgument(
                    "empty polytope must carry no data".into(),
                ));
            }
            return Ok(());
        }
        for v in &self.vertices {
            if !self.halfspaces.contains(v) {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} violates a halfspace"
                )));
            }
        }
        let rebuilt = RationalPolytope::convex_hull(self.ambient_dim, &self.vertices)?;
        if rebuilt.vertices != self.vertices {
            return Err(Error::InvalidArgument(
                "vertex list is not minimal".into(),
            ));
        }
        if self.ambient_dim > 0 {
            let from_rows = RationalPolytope::intersect_halfspaces(&self.halfspaces)?;
            if from_rows.vertices != self.vertices {
                return Err(Error::InvalidArgument(
                    "halfspaces and vertices describe different sets".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Checks nonemptiness of a halfspace region via exact LP (used only in the
/// rank-deficient branch where vertex enumeration does not apply).
fn region_is_feasible(system: &HalfspaceSystem) -> bool {
    // Find u with <u, a_i> - s_i = b_i, s_i >= 0, u free.
    let n = system.ambient_dim;
    let rows = system.rows();
    let m = rows.len();
    let nvars = 2 * n + m;
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for (i, hs) in rows.iter().enumerate() {
        let mut row = vec![Rational::zero(); nvars];
        for (k, coeff) in hs.normal.iter().enumerate() {
            row[k] = Rational::from_integer(coeff.clone());
            row[n + k] = -Rational::from_integer(coeff.clone());
        }
        row[2 * n + i] = -Rational::one();
        a.push(row);
        b.push(hs.bound.clone());
    }
    let c = vec![Rational::zero(); nvars];
    matches!(lp::simplex_min(&a, &b, &c), lp::LpOutcome::Optimal { .. })
}

/// Pivot columns of a full-row-rank matrix (greedy, deterministic).
fn pivot_columns(rows: &[Vec<Rational>]) -> Vec<usize> {
    let d = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    let mut picked: Vec<usize> = Vec::new();
    for col in 0..n {
        if picked.len() == d {
            break;
        }
        let mut candidate = picked.clone();
        candidate.push(col);
        let sub: Vec<Vec<Rational>> = candidate
            .iter()
            .map(|&c| rows.iter().map(|r| r[c].clone()).collect())
            .collect();
        if linalg::rank(&sub) == candidate.len() {
            picked = candidate;
        }
    }
    assert_eq!(picked.len(), d, "matrix must have full row rank");
    picked
}

/// Nearest point to `point` on the affine hull of `verts` (exact least
/// squares through the normal equations).
fn project_to_affine_hull(point: &QVector, verts: &[&QVector]) -> QVector {
    let base = verts[0];
    let mut basis: Vec<QVector> = Vec::new();
    for v in &verts[1..] {
        let diff = v.sub(base);
        let mut rows: Vec<Vec<Rational>> = basis.iter().map(|b| b.coords().to_vec()).collect();
        rows.push(diff.coords().to_vec());
        if linalg::rank(&rows) == basis.len() + 1 {
            basis.push(diff);
        }
    }
    if basis.is_empty() {
        return base.clone();
    }
    let k = basis.len();
    let rel = point.sub(base);
    let gram: Vec<Vec<Rational>> = (0..k)
        .map(|i| (0..k).map(|j| basis[i].dot(&basis[j])).collect())
        .collect();
    let rhs: Vec<Rational> = (0..k).map(|i| basis[i].dot(&rel)).collect();
    let x = linalg::solve(&gram, &rhs).expect("gram matrix of independent vectors is invertible");
    let mut foot = base.clone();
    for (coeff, dir) in x.iter().zip(&basis) {
        foot = foot.add(&dir.scale(coeff));
    }
    foot
}

/// Volume of a full-dimensional polytope given by points in `R^d`, computed
/// by a fan triangulation from the lexicographically least vertex.
fn volume_full_dim(points: &[Vec<Rational>], d: usize) -> Result<Rational> {
    let tris = triangulation(points, d)?;
    let mut total = Rational::zero();
    let mut dfact = Rational::one();
    for i in 2..=d {
        dfact *= Rational::from_integer(BigInt::from(i));
    }
    for simplex in tris {
        let p0 = &points[simplex[0]];
        let mat: Vec<Vec<Rational>> = simplex[1..]
            .iter()
            .map(|&i| {
                points[i]
                    .iter()
                    .zip(p0)
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        let det = linalg::determinant(&mat);
        total += det.abs() / dfact.clone();
    }
    Ok(total)
}

/// Simplicial fan decomposition of a full-dimensional point set in `R^d`.
/// Returns index lists of size `d + 1` into `points`.
pub(crate) fn triangulation(points: &[Vec<Rational>], d: usize) -> Result<Vec<Vec<usize>>> {
    assert!(d >= 1);
    if d == 1 {
        let min = points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(i, _)| i)
            .expect("nonempty");
        let max = points
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1))
            .map(|(i, _)| i)
            .expect("nonempty");
        if points[min] == points[max] {
            return Err(Error::InvalidArgument(
                "degenerate segment in triangulation".into(),
            ));
        }
        return Ok(vec![vec![min, max]]);
    }
    // Facets from the dual cone of the lifted points.
    let mut dual_rows = Vec::with_capacity(points.len());
    for u in points {
        let mut q = u.clone();
        q.push(Rational::one());
        dual_rows.push(integerize(&q));
    }
    let facets = dd::extreme_rays(d + 1, &dual_rows)?;
    let apex = points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty");
    let mut out = Vec::new();
    for facet in &facets {
        let value_at = |u: &[Rational]| -> Rational {
            facet[..d]
                .iter()
                .zip(u)
                .map(|(a, b)| Rational::from_integer(a.clone()) * b)
                .sum::<Rational>()
                + Rational::from_integer(facet[d].clone())
        };
        if value_at(&points[apex]).is_zero() {
            continue;
        }
        let incident: Vec<usize> = (0..points.len())
            .filter(|&i| value_at(&points[i]).is_zero())
            .collect();
        // Local coordinates on the facet for the recursive call.
        let base = &points[incident[0]];
        let diffs: Vec<Vec<Rational>> = incident[1..]
            .iter()
            .map(|&i| {
                points[i]
                    .iter()
                    .zip(base)
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        let mut basis: Vec<Vec<Rational>> = Vec::new();
        for dv in &diffs {
            let mut candidate = basis.clone();
            candidate.push(dv.clone());
            if linalg::rank(&candidate) == candidate.len() {
                basis = candidate;
            }
        }
        debug_assert_eq!(basis.len(), d - 1, "facet must be (d-1)-dimensional");
        let pivots = pivot_columns(&basis);
        let b_sub: Vec<Vec<Rational>> = pivots
            .iter()
            .map(|&i| basis.iter().map(|row| row[i].clone()).collect())
            .collect();
        let b_inv = linalg::invert(&b_sub).expect("pivot submatrix invertible");
        let local: Vec<Vec<Rational>> = incident
            .iter()
            .map(|&i| {
                let rel: Vec<Rational> = points[i]
                    .iter()
                    .zip(base)
                    .map(|(a, b)| a - b)
                    .collect();
                (0..d - 1)
                    .map(|j| {
                        (0..d - 1)
                            .map(|k| &b_inv[j][k] * &rel[pivots[k]])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        for sub in triangulation(&local, d - 1)? {
            let mut simplex: Vec<usize> = sub.into_iter().map(|i| incident[i]).collect();
            simplex.push(apex);
            out.push(simplex);
        }
    }
    Ok(out)
}
