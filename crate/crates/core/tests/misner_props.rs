use proptest::prelude::*;
use wavrel_core::misner::{misner_l, misner_orth_residual, misner_symplectic, piece_defect, MisnerPiece};
use wavrel_core::num::{Trig, TAU};

fn trig() -> impl Strategy<Value = Trig> {
    (prop::collection::vec(-1.0f64..1.0, 5), prop::collection::vec(-1.0f64..1.0, 5)).prop_map(|(mut a, mut b)| {
        b[0] = 0.0;
        a.truncate(5);
        b.truncate(5);
        Trig::from_coefficients(a, b, TAU)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn l_is_orthogonal_and_isotropic(g1 in trig(), g2 in trig()) {
        let u = misner_l(&g1, 256).unwrap();
        let w = misner_l(&g2, 256).unwrap();
        prop_assert!(misner_orth_residual(&u) < 1e-10);
        prop_assert!(misner_symplectic(&u, &w).unwrap().abs() < 1e-10);
    }
}

#[test]
fn halves_lose_two_per_fourier_degree() {
    for k in 0..=4 {
        for piece in [MisnerPiece::Lower, MisnerPiece::Upper] {
            let d = piece_defect(piece, k).unwrap();
            assert_eq!(d.defect, 2 * k, "{piece:?} K={k}");
            assert!(d.isotropy < 1e-12);
        }
    }
}
