use chemdyn::crn::{canonical_crn, crn_to_cds, fuse, Crn};
use chemdyn::lce::{lce_qr, LceOptions};
use chemdyn::polysys::{apply_affine, AffineMap, Poly, PolySystem};
use chemdyn::rational::{q, qi, to_f64};
use chemdyn::sim::{find_equilibria, NewtonOptions};
use proptest::prelude::*;

fn arb_poly(n: usize, max_deg: u32) -> impl Strategy<Value = Poly> {
    let term = (-20i64..=20, 1i64..=4, proptest::collection::vec(0..=max_deg, n));
    proptest::collection::vec(term, 0..6).prop_map(move |ts| {
        Poly::from_terms(
            n,
            ts.into_iter()
                .filter(|(_, _, e)| e.iter().sum::<u32>() <= max_deg)
                .map(|(c, d, e)| (q(c, d), e)),
        )
        .unwrap()
    })
}

fn arb_system(n: usize) -> impl Strategy<Value = PolySystem> {
    proptest::collection::vec(arb_poly(n, 2), n)
        .prop_map(move |eqs| PolySystem::new(PolySystem::default_vars(n), eqs).unwrap())
}

/// Drop every non-chemical monomial.
fn chemical_part(s: &PolySystem) -> PolySystem {
    s.map_eqs(|i, p| {
        Poly::from_terms(
            p.nvars(),
            p.terms()
                .filter(|(e, c)| c.numer() > &0.into() || e.0[i] > 0)
                .map(|(e, c)| (c.clone(), e.0.clone())),
        )
        .unwrap()
    })
}

fn arb_map(n: usize) -> impl Strategy<Value = AffineMap> {
    (
        Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n),
        proptest::collection::vec((1i64..6, 1i64..4), n),
        proptest::collection::vec(-10i64..10, n),
    )
        .prop_map(|(perm, signs, scales, shift)| {
            AffineMap::new(perm, signs, scales.into_iter().map(|(a, b)| q(a, b)).collect(), shift.into_iter().map(qi).collect())
                .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn system_file_round_trip(s in arb_system(3)) {
        prop_assert_eq!(PolySystem::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn transformed_vector_field_follows_the_chain_rule(
        s in arb_system(3),
        m in arb_map(3),
        x in proptest::collection::vec(-3.0f64..3.0, 3),
    ) {
        let t = apply_affine(&s, &m).unwrap();
        let y = m.apply_point(&x).unwrap();
        let lhs = t.evaluate(&y).unwrap();
        let f = s.evaluate(&x).unwrap();
        let l = m.linear_f64();
        for i in 0..3 {
            let rhs: f64 = (0..3).map(|j| l[i][j] * f[j]).sum();
            let scale = rhs.abs().max(lhs[i].abs()).max(1.0);
            prop_assert!((lhs[i] - rhs).abs() <= 1e-9 * scale, "{} vs {}", lhs[i], rhs);
        }
    }

    #[test]
    fn complexity_survives_reflections(s in arb_system(3), i in 0usize..3) {
        let r = apply_affine(&s, &AffineMap::reflection(3, i)).unwrap();
        prop_assert_eq!(r.complexity(), s.complexity());
    }

    #[test]
    fn networks_round_trip(s in arb_system(3)) {
        let c = chemical_part(&s);
        let canon = canonical_crn(&c).unwrap();
        prop_assert_eq!(crn_to_cds(&canon).unwrap(), c.clone());
        prop_assert_eq!(crn_to_cds(&fuse(&canon).unwrap()).unwrap(), c);
    }

    #[test]
    fn rendered_networks_parse_back(s in arb_system(3)) {
        let c = canonical_crn(&chemical_part(&s)).unwrap();
        let species: Vec<&str> = c.species.iter().map(String::as_str).collect();
        let back = Crn::parse(&c.render(), &species).unwrap();
        prop_assert_eq!(back.reactions, c.reactions);
    }

    #[test]
    fn non_chemical_systems_have_no_network(s in arb_system(3)) {
        prop_assert_eq!(canonical_crn(&s).is_ok(), s.is_chemical().0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exponents_are_sorted_and_exact_averages(
        a in proptest::collection::vec(-20i64..20, 4),
        tau in 0.1f64..1.0,
    ) {
        // a stable-ish 2-D linear system
        let s = PolySystem::new(
            vec!["x".into(), "y".into()],
            vec![
                Poly::from_terms(2, [(q(a[0], 10) - qi(3), vec![1, 0]), (q(a[1], 10), vec![0, 1])]).unwrap(),
                Poly::from_terms(2, [(q(a[2], 10), vec![1, 0]), (q(a[3], 10) - qi(3), vec![0, 1])]).unwrap(),
            ],
        )
        .unwrap();
        let l = lce_qr(&s, &[1.0, 0.5], 5.0, tau, &LceOptions::default()).unwrap();
        for ((t, lam), logs) in l.times.iter().zip(&l.lambdas).zip(&l.accumulated_logs) {
            prop_assert!(lam[0] >= lam[1]);
            prop_assert!(lam.iter().all(|v| v.is_finite()));
            for (v, g) in lam.iter().zip(logs) {
                prop_assert_eq!(*v, g / t);
            }
        }
        // the sum of exponents of a linear flow is the trace
        let trace = to_f64(&(q(a[0], 10) + q(a[3], 10) - qi(6)));
        prop_assert!((l.last().unwrap().iter().sum::<f64>() - trace).abs() < 1e-6);
    }

    #[test]
    fn equilibria_have_small_residuals(
        c in proptest::collection::vec(-3i64..=3, 6),
    ) {
        let s = PolySystem::parse(
            &["x", "y"],
            &[
                &format!("{} + {} x - y^2", c[0], c[1]),
                &format!("{} - x*y + {} y + {} x^2", c[2], c[3], c[4]),
            ],
        )
        .unwrap();
        for e in find_equilibria(&s, &[(-10.0, 10.0), (-10.0, 10.0)], &NewtonOptions::default()) {
            prop_assert!(e.residual < 1e-10, "{:?}", e);
            prop_assert_eq!(e.jacobian_eigenvalues.len(), 2);
        }
    }
}

#[test]
fn rational_coefficients_stay_exact() {
    let s = PolySystem::parse(&["x"], &["1/3 x - 1/7"]).unwrap();
    let m = AffineMap::new(vec![0], vec![1], vec![q(7, 3)], vec![q(1, 11)]).unwrap();
    let back = apply_affine(&apply_affine(&s, &m).unwrap(), &m.inverse()).unwrap();
    assert_eq!(back, s);
    assert_eq!(apply_affine(&s, &m).unwrap().coeff(0, &[0]), q(-148, 1617));
}
