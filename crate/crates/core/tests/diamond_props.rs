use proptest::prelude::*;
use wavrel_core::diamond::{
    bulk_action, diamond_isotropy, diamond_l, diamond_omega, diamond_perp_certificate, hj_action, hj_boundary, DiamondField,
    PerpClass,
};

fn boxes() -> impl Strategy<Value = ([f64; 2], [f64; 2])> {
    (-1.0f64..0.5, 0.2f64..2.0, -1.0f64..0.5, 0.2f64..2.0).prop_map(|(a, la, b, lb)| ([a, a + la], [b, b + lb]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn vertex_formula_matches_edges_and_bulk(
        (sp, sm) in boxes(),
        c in prop::array::uniform4(-2.0f64..2.0),
        k in 0.5f64..3.0,
    ) {
        let f = move |s: f64| c[0] * s + c[1] * (k * s).sin();
        let df = move |s: f64| c[0] + c[1] * k * (k * s).cos();
        let g = move |s: f64| c[2] * s * s + c[3] * (k * s).cos();
        let dg = move |s: f64| 2.0 * c[2] * s - c[3] * k * (k * s).sin();
        let u = diamond_l(sp, sm, f, g, 97).unwrap();
        let hj = hj_action(&u).unwrap();
        prop_assert!((hj_boundary(&u) - hj).abs() < 1e-10);
        prop_assert!((bulk_action(sp, sm, df, dg, 8) - hj).abs() < 1e-10);
    }

    #[test]
    fn l_is_isotropic_and_recognized(
        (sp, sm) in boxes(),
        c in prop::array::uniform4(-2.0f64..2.0),
    ) {
        let fields: Vec<DiamondField> = (0..4)
            .map(|j| {
                let a = c[j];
                diamond_l(sp, sm, move |s| a * s + (s * (j + 1) as f64).sin(), move |s| (a * s).cos() + s * s, 65).unwrap()
            })
            .collect();
        prop_assert!(diamond_isotropy(&fields).unwrap() < 1e-10);
        for u in &fields {
            let is_l = matches!(diamond_perp_certificate(u, 4).unwrap(), PerpClass::InL { .. });
            prop_assert!(is_l);
        }
    }

    #[test]
    fn non_l_fields_have_a_witness((sp, sm) in boxes(), a in 0.5f64..2.0) {
        let psi = DiamondField::sample(sp, sm, 65, |x, y| a * (x - sp[0]) * (y - sm[0])).unwrap();
        match diamond_perp_certificate(&psi, 6).unwrap() {
            PerpClass::NotInPerp { witness, omega } => {
                prop_assert!(omega.abs() > 1e-6);
                prop_assert!((diamond_omega(&witness, &psi).unwrap() - omega).abs() < 1e-12);
            }
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }
}
