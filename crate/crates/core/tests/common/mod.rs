//! Shared fixtures for the integration suites: the standard fans, surface
//! models, divisor corpora, and the graded-valuation oracle extractor.

#![allow(dead_code)]

use num_bigint::BigInt;

use okb_core::exactgeom::{rat, rat_int, Rational};
use okb_core::semigroup::GradedValuationSet;
use okb_core::surface::{Curve, DivisorClass, EffectiveGenerator, SurfaceModel};
use okb_core::toric::{Fan, InvariantFlag, TorusDivisor};

pub fn ray(vals: &[i64]) -> Vec<BigInt> {
    vals.iter().map(|&v| BigInt::from(v)).collect()
}

pub fn divisor(pairs: &[(usize, i64)]) -> TorusDivisor {
    TorusDivisor::from_pairs(
        &pairs
            .iter()
            .map(|&(i, v)| (i, rat_int(v)))
            .collect::<Vec<_>>(),
    )
}

pub fn divisor_rat(pairs: &[(usize, i64, i64)]) -> TorusDivisor {
    TorusDivisor::from_pairs(
        &pairs
            .iter()
            .map(|&(i, n, d)| (i, rat(n, d)))
            .collect::<Vec<_>>(),
    )
}

/// The projective plane: rays x, y, -x-y.
pub fn fan_p2() -> Fan {
    Fan::new(
        2,
        vec![ray(&[1, 0]), ray(&[0, 1]), ray(&[-1, -1])],
        vec![vec![0, 1], vec![1, 2], vec![0, 2]],
    )
    .unwrap()
}

/// Degree-one Hirzebruch surface (one-point blow-up of the plane); ray 3 is
/// the exceptional curve, ray 2 the pullback hyperplane.
pub fn fan_f1() -> Fan {
    Fan::new(
        2,
        vec![ray(&[1, 0]), ray(&[0, 1]), ray(&[-1, -1]), ray(&[1, 1])],
        vec![vec![0, 3], vec![1, 3], vec![1, 2], vec![0, 2]],
    )
    .unwrap()
}

/// Two-point blow-up of the plane; rays 2 and 4 are the exceptional curves,
/// ray 0 the strict transform of the line through both points.
pub fn fan_bl2() -> Fan {
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

/// Degree-two Hirzebruch surface: carries a curve of self-intersection -2
/// and hyperplanes meeting at half-integral points.
pub fn fan_f2() -> Fan {
    Fan::new(
        2,
        vec![ray(&[1, 0]), ray(&[0, 1]), ray(&[-1, 2]), ray(&[0, -1])],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
    )
    .unwrap()
}

/// Projective three-space.
pub fn fan_p3() -> Fan {
    Fan::new(
        3,
        vec![
            ray(&[1, 0, 0]),
            ray(&[0, 1, 0]),
            ray(&[0, 0, 1]),
            ray(&[-1, -1, -1]),
        ],
        vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
    )
    .unwrap()
}

/// The product of a line and a plane: rays 0,1 from the line factor.
pub fn fan_p1p2() -> Fan {
    Fan::new(
        3,
        vec![
            ray(&[1, 0, 0]),
            ray(&[-1, 0, 0]),
            ray(&[0, 1, 0]),
            ray(&[0, 0, 1]),
            ray(&[0, -1, -1]),
        ],
        vec![
            vec![0, 2, 3],
            vec![0, 3, 4],
            vec![0, 2, 4],
            vec![1, 2, 3],
            vec![1, 3, 4],
            vec![1, 2, 4],
        ],
    )
    .unwrap()
}

/// Blow-up of three-space at a fixed point; ray 4 is the exceptional
/// divisor, ray 3 the pullback hyperplane class representative.
pub fn fan_blp3() -> Fan {
    Fan::new(
        3,
        vec![
            ray(&[1, 0, 0]),
            ray(&[0, 1, 0]),
            ray(&[0, 0, 1]),
            ray(&[-1, -1, -1]),
            ray(&[1, 1, 1]),
        ],
        vec![
            vec![0, 1, 4],
            vec![0, 2, 4],
            vec![1, 2, 4],
            vec![0, 1, 3],
            vec![0, 2, 3],
            vec![1, 2, 3],
        ],
    )
    .unwrap()
}

fn named(class: DivisorClass, name: &str) -> Curve {
    Curve {
        class,
        name: name.into(),
    }
}

fn generator(class: DivisorClass, name: &str) -> EffectiveGenerator {
    EffectiveGenerator {
        class,
        name: Some(name.into()),
        irreducible: true,
    }
}

fn rform(entries: &[&[i64]]) -> Vec<Vec<Rational>> {
    entries
        .iter()
        .map(|row| row.iter().map(|&v| rat_int(v)).collect())
        .collect()
}

/// Two-point blow-up of the plane as an abstract model: basis (L, E1, E2).
pub fn model_dp7() -> SurfaceModel {
    SurfaceModel::new(
        3,
        rform(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]]),
        vec![
            generator(DivisorClass::from_ints(&[0, 1, 0]), "E1"),
            generator(DivisorClass::from_ints(&[0, 0, 1]), "E2"),
            generator(DivisorClass::from_ints(&[1, -1, -1]), "C"),
        ],
        vec![
            named(DivisorClass::from_ints(&[0, 1, 0]), "E1"),
            named(DivisorClass::from_ints(&[0, 0, 1]), "E2"),
            named(DivisorClass::from_ints(&[1, -1, -1]), "C"),
        ],
        DivisorClass::from_ints(&[3, -1, -1]),
    )
    .unwrap()
}

/// Ruled surface over an elliptic base with no negative curves: basis
/// (H, F), hyperbolic intersection form.
pub fn model_ruled() -> SurfaceModel {
    SurfaceModel::new(
        2,
        rform(&[&[0, 1], &[1, 0]]),
        vec![
            generator(DivisorClass::from_ints(&[1, 0]), "H"),
            generator(DivisorClass::from_ints(&[0, 1]), "F"),
        ],
        vec![],
        DivisorClass::from_ints(&[1, 1]),
    )
    .unwrap()
}

/// Rank-one model of the plane.
pub fn model_plane() -> SurfaceModel {
    SurfaceModel::new(
        1,
        rform(&[&[1]]),
        vec![generator(DivisorClass::from_ints(&[1]), "L")],
        vec![],
        DivisorClass::from_ints(&[1]),
    )
    .unwrap()
}

/// The effective non-big divisor on the two-point blow-up used throughout:
/// pullback line minus the first exceptional curve plus the second.
pub fn bl2_divisor() -> TorusDivisor {
    divisor(&[(2, -1), (3, 1), (4, 2)])
}

/// Graded valuation data of a divisor with respect to an invariant flag:
/// for every usable level, the flag valuations of a monomial section basis,
/// read from the lattice points of the polytope of the multiple.
pub fn oracle_valuations(
    fan: &Fan,
    div: &TorusDivisor,
    flag: &InvariantFlag,
    max_level: u32,
) -> GradedValuationSet {
    let mut entries = Vec::new();
    for m in 1..=max_level {
        let factor = rat_int(m as i64);
        let scaled = div.scaled(&factor);
        if scaled.coeffs().values().any(|a| !a.is_integer()) {
            continue;
        }
        let polytope = okb_core::toric::divisor_polytope(fan, &scaled).unwrap();
        for point in polytope.lattice_points() {
            let vector: Vec<BigInt> = flag
                .ray_order
                .iter()
                .map(|&i| {
                    let pairing: BigInt = fan
                        .ray(i)
                        .iter()
                        .zip(&point)
                        .map(|(a, b)| a * b)
                        .sum();
                    let shift = scaled.coeff(i);
                    assert!(shift.is_integer());
                    pairing + shift.to_integer()
                })
                .collect();
            entries.push((m, vector));
        }
    }
    GradedValuationSet::new(fan.dim(), entries).unwrap()
}
