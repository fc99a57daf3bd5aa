//! Exact rational convex geometry: hulls, halfspace systems, projections,
//! volumes, lattice points, distances, and the LP / double-description
//! machinery behind them.

pub mod dd;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod rational;
pub mod vector;

pub use polytope::{Halfspace, HalfspaceSystem, RationalPolytope};
pub use rational::{
    denominator_lcm, format_rational, integerize, parse_rational, primitive_part, rat, rat_int,
    QuadraticValue, Rational,
};
pub use vector::QVector;

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(vals: &[i64]) -> QVector {
        QVector::from_ints(vals)
    }

    fn qr(vals: &[(i64, i64)]) -> QVector {
        QVector::new(vals.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    fn hs(normal: &[i64], bound: (i64, i64)) -> Halfspace {
        Halfspace::new(
            normal.iter().map(|&v| BigInt::from(v)).collect(),
            rat(bound.0, bound.1),
        )
        .unwrap()
    }

    #[test]
    fn hull_absorbs_interior_points() {
        let pts = vec![
            q(&[0, 0]),
            q(&[1, 0]),
            q(&[0, 1]),
            q(&[1, 1]),
            qr(&[(1, 2), (1, 2)]),
        ];
        let p = RationalPolytope::convex_hull(2, &pts).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.affine_dim(), Some(2));
        p.verify_double_description().unwrap();
    }

    #[test]
    fn hull_of_single_point() {
        let p = RationalPolytope::convex_hull(2, &[q(&[3, -2])]).unwrap();
        assert_eq!(p.vertices().len(), 1);
        assert_eq!(p.affine_dim(), Some(0));
        assert!(p.contains(&q(&[3, -2])));
        assert!(!p.contains(&q(&[3, -1])));
        p.verify_double_description().unwrap();
    }

    #[test]
    fn hull_of_segment_on_axis() {
        let p = RationalPolytope::convex_hull(2, &[q(&[1, 0]), q(&[2, 0])]).unwrap();
        assert_eq!(p.affine_dim(), Some(1));
        assert_eq!(p.volume().unwrap(), rat_int(1));
        assert!(p.contains(&qr(&[(3, 2), (0, 1)])));
        assert!(!p.contains(&qr(&[(3, 2), (1, 2)])));
        p.verify_double_description().unwrap();
    }

    #[test]
    fn hull_mixed_dimension_errors() {
        let err = RationalPolytope::convex_hull(2, &[q(&[1, 0]), q(&[1, 0, 0])]);
        assert!(matches!(
            err,
            Err(crate::error::Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn halfspace_intersection_simplex() {
        let system = HalfspaceSystem::new(
            2,
            vec![hs(&[1, 0], (0, 1)), hs(&[0, 1], (0, 1)), hs(&[-1, -1], (-1, 1))],
        )
        .unwrap();
        let p = RationalPolytope::intersect_halfspaces(&system).unwrap();
        assert_eq!(
            p.vertices(),
            &[q(&[0, 0]), q(&[0, 1]), q(&[1, 0])]
        );
        assert_eq!(p.volume().unwrap(), rat(1, 2));
        p.verify_double_description().unwrap();
    }

    #[test]
    fn halfspace_intersection_empty() {
        let system =
            HalfspaceSystem::new(1, vec![hs(&[1], (1, 1)), hs(&[-1], (0, 1))]).unwrap();
        let p = RationalPolytope::intersect_halfspaces(&system).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.affine_dim(), None);
    }

    #[test]
    fn halfspace_intersection_segment() {
        // x >= 0, -x >= 0, y >= 0, -y >= -1: the segment {0} x [0, 1].
        let system = HalfspaceSystem::new(
            2,
            vec![
                hs(&[1, 0], (0, 1)),
                hs(&[-1, 0], (0, 1)),
                hs(&[0, 1], (0, 1)),
                hs(&[0, -1], (-1, 1)),
            ],
        )
        .unwrap();
        let p = RationalPolytope::intersect_halfspaces(&system).unwrap();
        assert_eq!(p.vertices(), &[q(&[0, 0]), q(&[0, 1])]);
        assert_eq!(p.volume().unwrap(), rat_int(1));
    }

    #[test]
    fn halfspace_intersection_unbounded() {
        let system = HalfspaceSystem::new(2, vec![hs(&[1, 0], (0, 1)), hs(&[0, 1], (0, 1))])
            .unwrap();
        assert!(matches!(
            RationalPolytope::intersect_halfspaces(&system),
            Err(crate::error::Error::Unbounded)
        ));
        // Rank-deficient but feasible: a strip.
        let strip = HalfspaceSystem::new(
            2,
            vec![hs(&[1, 0], (0, 1)), hs(&[-1, 0], (-1, 1))],
        )
        .unwrap();
        assert!(matches!(
            RationalPolytope::intersect_halfspaces(&strip),
            Err(crate::error::Error::Unbounded)
        ));
        // Rank-deficient and infeasible: empty.
        let void = HalfspaceSystem::new(
            2,
            vec![hs(&[1, 0], (1, 1)), hs(&[-1, 0], (0, 1))],
        )
        .unwrap();
        let p = RationalPolytope::intersect_halfspaces(&void).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn volume_conventions() {
        let point = RationalPolytope::convex_hull(3, &[q(&[1, 2, 3])]).unwrap();
        assert_eq!(point.volume().unwrap(), rat_int(1));
        let seg = RationalPolytope::convex_hull(2, &[q(&[1, 0]), q(&[2, 0])]).unwrap();
        assert_eq!(seg.volume().unwrap(), rat_int(1));
        let tri =
            RationalPolytope::convex_hull(2, &[q(&[0, 0]), q(&[1, 0]), q(&[0, 1])]).unwrap();
        assert_eq!(tri.volume().unwrap(), rat(1, 2));
        let empty = RationalPolytope::empty(2);
        assert!(matches!(
            empty.volume(),
            Err(crate::error::Error::EmptyBody)
        ));
    }

    #[test]
    fn diagonal_segment_volume_is_irrational() {
        let seg = RationalPolytope::convex_hull(2, &[q(&[0, 0]), q(&[1, 1])]).unwrap();
        let qv = seg.euclidean_volume().unwrap();
        assert_eq!(qv.squared(), rat_int(2));
        assert!(seg.volume().is_err());
        // A 3-4-5 segment has irrational-looking data but exact length 5.
        let pyth = RationalPolytope::convex_hull(2, &[q(&[0, 0]), q(&[3, 4])]).unwrap();
        assert_eq!(pyth.volume().unwrap(), rat_int(5));
    }

    #[test]
    fn projection_examples() {
        let square = RationalPolytope::convex_hull(
            2,
            &[q(&[0, 0]), q(&[1, 0]), q(&[0, 1]), q(&[1, 1])],
        )
        .unwrap();
        let seg = square.project(&[vec![BigInt::from(1), BigInt::from(0)]]).unwrap();
        assert_eq!(seg.vertices(), &[q(&[0]), q(&[1])]);
        let simplex = RationalPolytope::convex_hull(
            2,
            &[q(&[0, 0]), q(&[2, 0]), q(&[0, 2])],
        )
        .unwrap();
        let shadow = simplex
            .project(&[vec![BigInt::from(1), BigInt::from(0)]])
            .unwrap();
        assert_eq!(shadow.vertices(), &[q(&[0]), q(&[2])]);
        let empty = RationalPolytope::empty(2);
        assert!(empty
            .project(&[vec![BigInt::from(1), BigInt::from(0)]])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn lattice_point_examples() {
        let square = RationalPolytope::convex_hull(
            2,
            &[q(&[0, 0]), q(&[1, 0]), q(&[0, 1]), q(&[1, 1])],
        )
        .unwrap();
        assert_eq!(square.lattice_points().len(), 4);
        let simplex = RationalPolytope::convex_hull(
            2,
            &[q(&[0, 0]), q(&[2, 0]), q(&[0, 2])],
        )
        .unwrap();
        assert_eq!(simplex.lattice_points().len(), 6);
        assert!(RationalPolytope::empty(2).lattice_points().is_empty());
    }

    #[test]
    fn hausdorff_between_nested_simplices() {
        let outer = RationalPolytope::convex_hull(
            2,
            &[q(&[0, 0]), q(&[1, 0]), q(&[0, 1])],
        )
        .unwrap();
        let inner = RationalPolytope::convex_hull(
            2,
            &[q(&[0, 0]), qr(&[(1, 2), (0, 1)]), qr(&[(0, 1), (1, 2)])],
        )
        .unwrap();
        let d = outer.hausdorff_distance(&inner).unwrap();
        // Farthest point of the outer simplex is (1,0) (or (0,1)) whose
        // distance to the inner one is 1/2.
        assert_eq!(d.squared(), rat(1, 4));
        assert_eq!(d.to_rational(), Some(rat(1, 2)));
        let same = outer.hausdorff_distance(&outer).unwrap();
        assert!(same.is_zero());
    }

    #[test]
    fn three_dimensional_cube_volume() {
        let mut pts = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    pts.push(q(&[x, y, z]));
                }
            }
        }
        let cube = RationalPolytope::convex_hull(3, &pts).unwrap();
        assert_eq!(cube.vertices().len(), 8);
        assert_eq!(cube.volume().unwrap(), rat_int(1));
        assert_eq!(cube.lattice_points().len(), 8);
        cube.verify_double_description().unwrap();
    }

    #[test]
    fn scaling_volume_law() {
        let simplex = RationalPolytope::convex_hull(
            3,
            &[q(&[0, 0, 0]), q(&[1, 0, 0]), q(&[0, 1, 0]), q(&[0, 0, 1])],
        )
        .unwrap();
        let v = simplex.volume().unwrap();
        for m in [2i64, 3, 5] {
            let scaled = simplex.scale(&rat(1, m)).unwrap();
            let expected = &v / rat_int(m * m * m);
            assert_eq!(scaled.volume().unwrap(), expected);
        }
    }
}
