use proptest::prelude::*;
use wavrel_core::fields::BoundaryField;
use wavrel_core::geometry::{Domain, ParamCurve};
use wavrel_core::num::TAU;
use wavrel_core::symplectic::{conformal_push, omega, ConformalMap};

fn blob() -> Domain {
    Domain::minkowski(vec![ParamCurve::fourier(vec![0.0, 1.2, 0.1, 0.0, 0.15], vec![0.0, 0.0, 0.9, 0.1], TAU)], 0).unwrap()
}

fn field(d: &Domain, c: [f64; 6]) -> BoundaryField {
    BoundaryField::sample(d, 256, move |p| {
        let t = p.t;
        (c[0] * t.cos() + c[1] * (2.0 * t).sin() + c[2] * (3.0 * t).cos(), c[3] + c[4] * t.sin() + c[5] * (2.0 * t).cos())
    })
}

fn coeffs() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-1.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn antisymmetric_and_bilinear(a in coeffs(), b in coeffs(), c in coeffs(), s in -2.0f64..2.0) {
        let d = blob();
        let (u, v, w) = (field(&d, a), field(&d, b), field(&d, c));
        let uv = omega(&d, &u, &v).unwrap();
        prop_assert!((uv + omega(&d, &v, &u).unwrap()).abs() < 1e-12);
        prop_assert!(omega(&d, &u, &u).unwrap().abs() < 1e-12);
        let lhs = omega(&d, &u.combine(s, &v, 1.0).unwrap(), &w).unwrap();
        let rhs = s * omega(&d, &u, &w).unwrap() + omega(&d, &v, &w).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn composed_conformal_maps_preserve_omega(
        a in coeffs(),
        b in coeffs(),
        dx in -2.0f64..2.0,
        dy in -2.0f64..2.0,
        rapidity in -0.8f64..0.8,
        lambda in 0.3f64..3.0,
    ) {
        let d = blob();
        let (u, v) = (field(&d, a), field(&d, b));
        let before = omega(&d, &u, &v).unwrap();
        let mut state = (d.clone(), u, v);
        for map in [
            ConformalMap::Boost { rapidity },
            ConformalMap::Scaling { lambda },
            ConformalMap::Translation { dx, dy },
        ] {
            let (d2, u2) = conformal_push(&map, &state.0, &state.1).unwrap();
            let (_, v2) = conformal_push(&map, &state.0, &state.2).unwrap();
            state = (d2, u2, v2);
        }
        let after = omega(&state.0, &state.1, &state.2).unwrap();
        prop_assert!((after - before).abs() < 1e-7 * (1.0 + before.abs()));
    }
}

#[test]
fn rotations_are_rejected() {
    let (c, s) = (0.3f64.cos(), 0.3f64.sin());
    let map = ConformalMap::General(wavrel_core::geometry::Affine { m: [[c, -s], [s, c]], b: [0.0, 0.0] });
    let d = Domain::disk(1.0);
    let u = BoundaryField::zeros(&d, 256);
    assert!(conformal_push(&map, &d, &u).is_err());
}
