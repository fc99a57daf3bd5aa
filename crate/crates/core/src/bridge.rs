//! Derives an abstract surface model from a two-dimensional fan, so the
//! polytope pipeline and the decomposition pipeline can be run against each
//! other on the same inputs.
//!
//! The numerical group is the ray-divisor lattice modulo the character
//! relations; the intersection form comes from the cyclic ray structure
//! (adjacent invariant curves meet once, self-intersections from the wheel
//! relation between consecutive rays).

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::{linalg, QVector, Rational};
use crate::surface::{
    Curve, DivisorClass, EffectiveGenerator, FlagCurve, FlagPoint, SurfaceFlag, SurfaceModel,
};
use crate::toric::{ample_divisor, Fan, InvariantFlag, TorusDivisor};

/// A surface model derived from a fan, with the data to translate divisors
/// and flags between the two pipelines.
#[derive(Clone, Debug)]
pub struct ToricSurfaceBridge {
    pub model: SurfaceModel,
    /// Class of each ray divisor in the model basis.
    pub ray_classes: Vec<DivisorClass>,
    /// Index of the model curve for each ray with negative self-intersection.
    pub ray_curve_index: Vec<Option<usize>>,
}

impl ToricSurfaceBridge {
    /// Class vector of a T-divisor in the model basis.
    pub fn divisor_class(&self, fan: &Fan, divisor: &TorusDivisor) -> DivisorClass {
        let rank = self.model.rank();
        let mut acc = QVector::zeros(rank);
        for i in 0..fan.ray_count() {
            let a = divisor.coeff(i);
            if !a.is_zero() {
                acc = acc.add(&self.ray_classes[i].coords.scale(&a));
            }
        }
        DivisorClass::new(acc)
    }

    /// Translates an invariant flag: the flag curve is the first ray's
    /// divisor, and the flag point is the fixed point shared with the
    /// second ray, recorded through the incidence table when any negative
    /// curve passes through it.
    pub fn surface_flag(&self, flag: &InvariantFlag) -> Result<SurfaceFlag> {
        if flag.ray_order.len() != 2 {
            return Err(Error::InvalidArgument(
                "surface flags need exactly two rays".into(),
            ));
        }
        let first = flag.ray_order[0];
        let second = flag.ray_order[1];
        let curve = match self.ray_curve_index[first] {
            Some(i) => FlagCurve::Curve(i),
            None => FlagCurve::Class(self.ray_classes[first].clone()),
        };
        let mut table = std::collections::BTreeMap::new();
        if let Some(i) = self.ray_curve_index[second] {
            table.insert(i, 1u32);
        }
        Ok(SurfaceFlag {
            curve,
            point: FlagPoint::Incidence(table),
        })
    }
}

/// Exact counterclockwise comparison of nonzero integer plane vectors by
/// angle from the positive x-axis.
fn angle_cmp(a: &[BigInt], b: &[BigInt]) -> Ordering {
    let half = |v: &[BigInt]| -> u8 {
        // 0 for the upper half plane including the positive x-axis, 1 below.
        if v[1].is_positive() || (v[1].is_zero() && v[0].is_positive()) {
            0
        } else {
            1
        }
    };
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    // Same half plane: sort by cross product.
    let cross = &a[0] * &b[1] - &a[1] * &b[0];
    if cross.is_positive() {
        Ordering::Less
    } else if cross.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

/// Builds the surface model of a smooth complete two-dimensional fan.
pub fn surface_model_of_fan(fan: &Fan) -> Result<ToricSurfaceBridge> {
    fan.require_valid()?;
    if fan.dim() != 2 {
        return Err(Error::InvalidArgument(
            "surface models require a two-dimensional fan".into(),
        ));
    }
    let r = fan.ray_count();

    // Cyclic counterclockwise ray order; consecutive rays must span cones.
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| angle_cmp(fan.ray(i), fan.ray(j)));
    for k in 0..r {
        let a = order[k];
        let b = order[(k + 1) % r];
        let mut cone = vec![a, b];
        cone.sort_unstable();
        if !fan.max_cones().contains(&cone) {
            return Err(Error::InvalidFan(format!(
                "consecutive rays {a} and {b} do not span a maximal cone"
            )));
        }
    }

    // Intersection numbers of the ray divisors: adjacent curves meet once;
    // the self-intersection of D_i is read from v_{i-1} + v_{i+1} = b v_i.
    let det = |a: &[BigInt], b: &[BigInt]| -> BigInt { &a[0] * &b[1] - &a[1] * &b[0] };
    let mut pairing = vec![vec![Rational::zero(); r]; r];
    for k in 0..r {
        let prev = order[(k + r - 1) % r];
        let cur = order[k];
        let next = order[(k + 1) % r];
        let b = det(fan.ray(prev), fan.ray(next));
        pairing[cur][cur] = -Rational::from_integer(b);
        pairing[cur][next] = Rational::one();
        pairing[next][cur] = Rational::one();
    }

    // Numerical group: Z^rays modulo the two character relations. With
    // W = R * U column-reduced and unit pivots, the change of coordinates
    // x -> U^T x sends the relation lattice onto the two pivot coordinate
    // axes, so the remaining coordinates of U^T x are the class of x.
    let relations: Vec<Vec<BigInt>> = (0..2)
        .map(|c| (0..r).map(|i| fan.ray(i)[c].clone()).collect())
        .collect();
    let (u, reduced) = linalg::column_reduce(&relations, r);
    let j1 = reduced[0]
        .iter()
        .position(|v| !v.is_zero())
        .ok_or_else(|| Error::InvalidFan("character relations do not have rank two".into()))?;
    let j2 = reduced[1]
        .iter()
        .enumerate()
        .find(|(j, v)| *j != j1 && !v.is_zero())
        .map(|(j, _)| j)
        .ok_or_else(|| Error::InvalidFan("character relations do not have rank two".into()))?;
    if !reduced[0][j1].abs().is_one() || !reduced[1][j2].abs().is_one() {
        return Err(Error::InvalidFan(
            "character relations are not saturated".into(),
        ));
    }
    let pivot_cols = [j1, j2];
    let free_cols: Vec<usize> = (0..r).filter(|j| !pivot_cols.contains(j)).collect();
    let rank = r - 2;
    let class_of = |vector: &[Rational]| -> DivisorClass {
        DivisorClass::new(QVector::new(
            free_cols
                .iter()
                .map(|&j| {
                    (0..r)
                        .map(|i| Rational::from_integer(u[i][j].clone()) * &vector[i])
                        .sum::<Rational>()
                })
                .collect(),
        ))
    };
    // Sections of the quotient: class basis vector k lifts to the divisor
    // vector given by row free_cols[k] of U^{-1}.
    let u_rat: Vec<Vec<Rational>> = u
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| Rational::from_integer(v.clone()))
                .collect()
        })
        .collect();
    let u_inv = linalg::invert(&u_rat)
        .ok_or_else(|| Error::InvalidFan("column transform is singular".into()))?;

    let ray_classes: Vec<DivisorClass> = (0..r)
        .map(|i| {
            let mut e = vec![Rational::zero(); r];
            e[i] = Rational::one();
            class_of(&e)
        })
        .collect();

    // Intersection form on the class basis, evaluated on the lifts.
    let mut form = vec![vec![Rational::zero(); rank]; rank];
    let basis_divisors: Vec<Vec<Rational>> = free_cols
        .iter()
        .map(|&j| u_inv[j].clone())
        .collect();
    for a in 0..rank {
        for b in 0..rank {
            let mut acc = Rational::zero();
            for i in 0..r {
                for jj in 0..r {
                    if !pairing[i][jj].is_zero() {
                        acc += &basis_divisors[a][i] * &pairing[i][jj] * &basis_divisors[b][jj];
                    }
                }
            }
            form[a][b] = acc;
        }
    }

    let mut curves = Vec::new();
    let mut ray_curve_index = vec![None; r];
    for i in 0..r {
        if pairing[i][i].is_negative() {
            ray_curve_index[i] = Some(curves.len());
            curves.push(Curve {
                class: ray_classes[i].clone(),
                name: format!("D{i}"),
            });
        }
    }
    let eff_generators: Vec<EffectiveGenerator> = (0..r)
        .map(|i| EffectiveGenerator {
            class: ray_classes[i].clone(),
            name: Some(format!("D{i}")),
            irreducible: true,
        })
        .collect();
    let ample = ample_divisor(fan)?;
    let ample_vector: Vec<Rational> = (0..r).map(|i| ample.coeff(i)).collect();
    let ample_witness = class_of(&ample_vector);

    let model = SurfaceModel::new(rank, form, eff_generators, curves, ample_witness)?;
    model.require_valid()?;
    Ok(ToricSurfaceBridge {
        model,
        ray_classes,
        ray_curve_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::BodyKind;
    use crate::exactgeom::rat_int;
    use crate::surface;
    use crate::toric;

    fn ray(vals: &[i64]) -> Vec<BigInt> {
        vals.iter().map(|&v| BigInt::from(v)).collect()
    }

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

    #[test]
    fn blowup_model_matches_known_intersection_numbers() {
        let fan = two_point_blowup();
        let bridge = surface_model_of_fan(&fan).unwrap();
        assert_eq!(bridge.model.rank(), 3);
        assert!(bridge.model.validate().is_valid());
        // Ray self-intersections: the two exceptional curves and the strict
        // transform have square -1, the other two rays square 0.
        let sq = |i: usize| {
            bridge
                .model
                .pair(&bridge.ray_classes[i], &bridge.ray_classes[i])
        };
        assert_eq!(sq(0), rat_int(-1));
        assert_eq!(sq(1), rat_int(0));
        assert_eq!(sq(2), rat_int(-1));
        assert_eq!(sq(3), rat_int(0));
        assert_eq!(sq(4), rat_int(-1));
        // Adjacent rays meet once, distant ones not at all.
        let pair = |i: usize, j: usize| {
            bridge
                .model
                .pair(&bridge.ray_classes[i], &bridge.ray_classes[j])
        };
        assert_eq!(pair(0, 2), rat_int(1));
        assert_eq!(pair(0, 4), rat_int(1));
        assert_eq!(pair(0, 3), rat_int(0));
        assert_eq!(pair(2, 4), rat_int(0));
    }

    #[test]
    fn bodies_agree_across_the_bridge() {
        let fan = two_point_blowup();
        let bridge = surface_model_of_fan(&fan).unwrap();
        let divisor = TorusDivisor::from_pairs(&[
            (2, rat_int(-1)),
            (3, rat_int(1)),
            (4, rat_int(2)),
        ]);
        let class = bridge.divisor_class(&fan, &divisor);
        for cone in fan.max_cones() {
            for flag_rays in [vec![cone[0], cone[1]], vec![cone[1], cone[0]]] {
                let flag = InvariantFlag::new(flag_rays);
                let toric_body =
                    toric::okounkov_body(&fan, &divisor, &flag, BodyKind::Limiting).unwrap();
                let sflag = bridge.surface_flag(&flag).unwrap();
                let surf = surface::limiting_body(&bridge.model, &class, &sflag).unwrap();
                assert_eq!(
                    surf.body.polytope, toric_body.polytope,
                    "flag {:?}",
                    flag.ray_order
                );
            }
        }
    }
}
