//! Randomized sweep over all fixture fans: random rational divisors pushed
//! through the whole pipeline, with structural consistency checks on every
//! intermediate object and exact cross-pipeline comparison on the surfaces.
mod common;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use okb_core::body::BodyKind;
use okb_core::bridge::surface_model_of_fan;
use okb_core::exactgeom::rat;
use okb_core::surface::limiting_body;
use okb_core::toric::*;

#[test]
fn randomized_pipeline_stress() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let fans = vec![
        ("p2", fan_p2()),
        ("f1", fan_f1()),
        ("bl2", fan_bl2()),
        ("f2", fan_f2()),
        ("p3", fan_p3()),
        ("p1p2", fan_p1p2()),
        ("blp3", fan_blp3()),
    ];
    let mut bodies = 0usize;
    for (name, fan) in &fans {
        let link = if fan.dim() == 2 { Some(surface_model_of_fan(fan).unwrap()) } else { None };
        for trial in 0..20 {
            // Random rational divisor, possibly non-effective / non-psef.
            let pairs: Vec<(usize, okb_core::Rational)> = (0..fan.ray_count())
                .map(|i| (i, rat(rng.gen_range(-4i64..=6), rng.gen_range(1i64..=3))))
                .collect();
            let d = TorusDivisor::from_pairs(&pairs);
            let p = divisor_polytope(fan, &d).unwrap();
            let psef = is_pseudoeffective(fan, &d).unwrap();
            assert_eq!(psef, !p.is_empty(), "{name}#{trial}: psef iff nonempty polytope");
            if p.is_empty() { continue; }
            p.verify_double_description().unwrap();
            let kappa = match iitaka_dim(fan, &d).unwrap() {
                IitakaDim::Dim(k) => k,
                IitakaDim::NegativeInfinity => unreachable!(),
            };
            assert_eq!(p.affine_dim(), Some(kappa));
            // every flag: body well-formed, dim = kappa, nonneg orthant
            for cone in fan.max_cones() {
                let flag = InvariantFlag::new(cone.clone());
                let body = okounkov_body(fan, &d, &flag, BodyKind::Valuative).unwrap();
                assert_eq!(body.polytope.affine_dim(), Some(kappa), "{name}#{trial}");
                for v in body.polytope.vertices() {
                    for c in v.coords() {
                        assert!(*c >= rat(0,1), "{name}#{trial}: body left the nonnegative orthant: {v}");
                    }
                }
                body.polytope.verify_double_description().unwrap();
                bodies += 1;
                if let Some(link) = &link {
                    let class = link.divisor_class(fan, &d);
                    let sflag = link.surface_flag(&flag).unwrap();
                    let out = limiting_body(&link.model, &class, &sflag).unwrap();
                    assert_eq!(out.body.polytope, body.polytope, "{name}#{trial} flag {:?}", flag.ray_order);
                }
            }
            // base loci sanity: restricted subset of stable subset of augmented
            let loci = base_loci(fan, &d).unwrap();
            for cone in &loci.restricted {
                assert!(loci.stable.contains(cone), "{name}#{trial}: restricted not in stable");
            }
            for cone in &loci.stable {
                assert!(loci.augmented.contains(cone), "{name}#{trial}: stable not in augmented");
            }
        }
    }
    println!("stress: {bodies} bodies checked");
}
