//! Randomized invariants across modules.

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use momentum_lab::geomcone::{cone_is_full, cone_membership, cones_equal, convex_hull, dual_cone, Cone};
use momentum_lab::iwasawa::log_a_projection;
use momentum_lab::kostant::weyl_orbit;
use momentum_lab::leaf::Leaf;
use momentum_lab::liecore::{make_family, weyl_group, FamilyId};
use momentum_lab::localmodel::random_model;
use momentum_lab::numkit::mat_exp;
use momentum_lab::sampling::{compact_element, group_element, nilpotent_element, stream_rng};

fn family_id() -> impl Strategy<Value = FamilyId> {
    (0..FamilyId::ALL.len()).prop_map(|i| FamilyId::ALL[i])
}

fn cone_gens(d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, d), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_a_is_left_n_right_k_invariant(id in family_id(), seed in any::<u64>()) {
        let fam = make_family(id).unwrap();
        let rng = &mut stream_rng(seed, 0);
        let g = group_element(&fam, 2.0, rng);
        let base = log_a_projection(&fam, &g).unwrap();
        let moved = &(&nilpotent_element(&fam, rng) * &g) * &compact_element(&fam, rng);
        let other = log_a_projection(&fam, &moved).unwrap();
        for (a, b) in base.iter().zip(&other) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn kostant_image_stays_in_the_orbit_hull(id in family_id(), seed in any::<u64>(), scale in 0.1f64..1.5) {
        let fam = make_family(id).unwrap();
        let y: Vec<f64> = [0.8, -0.3, 0.45][..fam.rank()].iter().map(|v| v * scale).collect();
        let hull = convex_hull(&weyl_orbit(&fam, &y)).unwrap();
        let ey = mat_exp(&fam.a_from_coords(&y));
        for i in 0..8 {
            let k = compact_element(&fam, &mut stream_rng(seed, i));
            let p = log_a_projection(&fam, &(&k * &ey)).unwrap();
            prop_assert!(hull.violation(&p) <= 1e-9);
        }
    }

    #[test]
    fn weyl_orbit_is_invariant(id in family_id(), a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
        let fam = make_family(id).unwrap();
        let y = [a, b, c][..fam.rank()].to_vec();
        let orbit = weyl_orbit(&fam, &y);
        let w = weyl_group(&fam);
        for i in 0..w.order() {
            for p in &orbit {
                let q = w.act(i, p);
                prop_assert!(orbit.iter().any(|o| o.iter().zip(&q).all(|(s, t)| (s - t).abs() <= 1e-9)));
            }
        }
    }

    #[test]
    fn bidual_recovers_the_cone(g2 in cone_gens(2), g3 in cone_gens(3)) {
        for (d, g) in [(2, g2), (3, g3)] {
            let c = Cone::new(d, g).unwrap();
            let dd = dual_cone(&dual_cone(&c).unwrap()).unwrap();
            prop_assert!(cones_equal(&c, &dd).unwrap());
            let units = (0..d).all(|i| [1.0, -1.0].iter().all(|s| {
                let mut e = vec![0.0; d];
                e[i] = *s;
                cone_membership(&e, &c).unwrap()
            }));
            prop_assert_eq!(cone_is_full(&c).unwrap(), units);
        }
    }

    #[test]
    fn hull_is_idempotent(pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 3..40)) {
        let h = convex_hull(&pts).unwrap();
        let h2 = convex_hull(&h.vertices).unwrap();
        prop_assert_eq!(h.vertices.len(), h2.vertices.len());
        for p in &pts {
            prop_assert!(h.violation(p) <= 1e-9);
        }
    }

    #[test]
    fn psi_map_is_nonnegative_and_rotation_invariant(seed in any::<u64>(), theta in 0.0f64..6.3) {
        let rng = &mut stream_rng(seed, 0);
        let m = random_model(rng);
        let x: Vec<f64> = (0..m.k).map(|i| 0.05 * (i as f64 + 1.0)).collect();
        let q: Vec<f64> = (0..m.n_pairs).map(|j| 0.1 - 0.04 * j as f64).collect();
        let p: Vec<f64> = (0..m.n_pairs).map(|j| 0.02 * j as f64).collect();
        let psi = m.psi_map(&x, &q).unwrap();
        prop_assert!(psi[m.k..].iter().all(|&v| v >= 0.0));
        let (s, c) = theta.sin_cos();
        let qr: Vec<f64> = q.iter().zip(&p).map(|(a, b)| c * a - s * b).collect();
        let pr: Vec<f64> = q.iter().zip(&p).map(|(a, b)| s * a + c * b).collect();
        let one = m.model_momentum(&x, &q, &p).unwrap();
        let two = m.model_momentum(&x, &qr, &pr).unwrap();
        for (a, b) in one.iter().zip(&two) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn leaf_form_is_antisymmetric(seed in any::<u64>(), a in 0.1f64..1.0) {
        let leaf = Leaf::new(FamilyId::SlC(2), &[a]).unwrap();
        let pt = leaf.sample_m(seed, 0).unwrap();
        let basis = leaf.fam_c.algebra_basis();
        for x in basis.iter().take(3) {
            for y in basis.iter().take(3) {
                let xy = leaf.symplectic_form(&pt, x, y).unwrap();
                let yx = leaf.symplectic_form(&pt, y, x).unwrap();
                prop_assert!((xy + yx).abs() <= 1e-12);
            }
        }
    }
}
