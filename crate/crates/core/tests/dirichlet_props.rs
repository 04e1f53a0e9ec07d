use std::sync::OnceLock;

use proptest::prelude::*;
use wavrel_core::dirichlet::{dirichlet_existence_obstruction, orbit};
use wavrel_core::fields::{make_l_field, Involutions};
use wavrel_core::geometry::{light_cone, Domain};
use wavrel_core::num::TAU;
use wavrel_core::symplectic::ConformalMap;
use wavrel_core::BoundaryPoint;

fn disk() -> &'static (Domain, Involutions) {
    static D: OnceLock<(Domain, Involutions)> = OnceLock::new();
    D.get_or_init(|| {
        let d = Domain::disk(1.0);
        let invs = Involutions::new(&d).unwrap();
        (d, invs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn disk_l_fields_satisfy_the_four_point_identity(
        a in prop::array::uniform3(-1.0f64..1.0),
        b in prop::array::uniform3(-1.0f64..1.0),
        t in 0.0f64..TAU,
    ) {
        let (d, invs) = disk();
        let f = |p: BoundaryPoint| {
            let s = light_cone(d.position(p)).0;
            a[0] * s + a[1] * (2.0 * s).cos() + a[2] * s * s * s
        };
        let g = |p: BoundaryPoint| {
            let s = light_cone(d.position(p)).1;
            b[0] * s.exp() + b[1] * (3.0 * s).sin() + b[2] * s * s
        };
        let u = make_l_field(invs, f, g, 256).unwrap();
        let p = BoundaryPoint::new(0, t);
        prop_assume!(invs.minus.distance_to_exceptional(p) > 1e-3 && invs.plus.distance_to_exceptional(p) > 1e-3);
        prop_assert!(dirichlet_existence_obstruction(invs, &u, p, 2).unwrap().abs() < 1e-8);
    }
}

#[test]
fn orbit_period_survives_conformal_maps() {
    let (_, invs) = disk();
    let start = BoundaryPoint::new(0, 0.3);
    let base = orbit(invs, start, 200).unwrap();
    assert_eq!(base.period, Some(2));
    for map in [ConformalMap::Boost { rapidity: 0.5 }, ConformalMap::Scaling { lambda: 2.0 }, ConformalMap::Translation { dx: 1.0, dy: -0.5 }] {
        let d2 = Domain::disk(1.0).mapped(&map.affine()).unwrap();
        let invs2 = Involutions::new(&d2).unwrap();
        let r = orbit(&invs2, start, 200).unwrap();
        assert_eq!(r.period, base.period, "{map:?}");
        let (x, y) = (r.rotation_number.unwrap(), base.rotation_number.unwrap());
        assert!((x - y).abs() < 1e-9, "{map:?}: {x} vs {y}");
    }
}
