use proptest::prelude::*;
use wavrel_core::geometry::{light_points_with, Domain, LightConfig, NormalChoice, ParamCurve};
use wavrel_core::num::wrap_centered;

fn wobbly(a: f64, b: f64, w: f64) -> Domain {
    Domain::minkowski(vec![ParamCurve::fourier(vec![0.0, a, 0.0, w, 0.0], vec![0.0, 0.0, b, 0.0, 0.5 * w], std::f64::consts::TAU)], 0)
        .expect("valid curve")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn light_points_are_roots_and_stable(a in 0.8f64..2.5, b in 0.8f64..2.5, w in -0.08f64..0.08) {
        let d = wobbly(a, b, w);
        let fine = light_points_with(&d, &LightConfig::default()).unwrap();
        let coarse = light_points_with(&d, &LightConfig { grid: 2048, ..LightConfig::default() }).unwrap();
        prop_assert_eq!(fine.len(), coarse.len());
        for (p, q) in fine.iter().zip(&coarse) {
            prop_assert_eq!(p.sign, q.sign);
            prop_assert!(wrap_centered(p.t - q.t, d.period(0)).abs() < 10.0 * 1e-12 * d.period(0) + 1e-12);
            let f = d.frame(p.component, p.t).unwrap();
            prop_assert!(f.cos2.abs() < 1e-10);
            prop_assert!(p.kappa.abs() > 1e-6);
        }
    }

    #[test]
    fn normal_rescaling_law(a in 0.8f64..2.5, b in 0.8f64..2.5, t in 0.0f64..6.28, s in 0.3f64..3.0) {
        let d = Domain::ellipse(a, b);
        let f = d.frame(0, t).unwrap();
        prop_assume!(f.cos2.abs() > 1e-3);
        let n = f.normal();
        let base = d.boundary_data(0, t, NormalChoice::Euclidean).unwrap();
        let scaled = d.boundary_data(0, t, NormalChoice::Custom([s * n[0], s * n[1]])).unwrap();
        prop_assert!((scaled.gamma - base.gamma / (s * s)).abs() < 1e-12 * (1.0 + base.gamma.abs()));
        prop_assert!((scaled.u - base.u / s).abs() < 1e-12 * (1.0 + base.u.abs()));
        prop_assert!((scaled.mu - base.mu * s).abs() < 1e-12 * (1.0 + base.mu.abs()));
    }

    #[test]
    fn euclidean_triple_matches_angle(a in 0.8f64..2.5, b in 0.8f64..2.5, t in 0.0f64..6.28) {
        let d = Domain::ellipse(a, b);
        let f = d.frame(0, t).unwrap();
        let bd = d.boundary_data(0, t, NormalChoice::Euclidean).unwrap();
        prop_assert!((bd.gamma - f.cos2).abs() < 1e-12);
        prop_assert!((bd.u + f.sin2 / f.v).abs() < 1e-12);
        prop_assert!((bd.mu - f.v).abs() < 1e-12);
    }
}
