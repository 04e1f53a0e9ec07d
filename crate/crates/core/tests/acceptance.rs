//! Acceptance criteria 1–8, one PASS/FAIL line each. Runs as a plain binary
//! (`harness = false`) so the lines show up in `cargo test` output.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wavrel_core::characteristics::{annulus_involution, disk_involution, ring_point, InvolutionMap};
use wavrel_core::diamond::{bulk_action, diamond_l, hj_action, hj_boundary};
use wavrel_core::dirichlet::{dirichlet_existence_obstruction, dirichlet_kernel_field, Arc};
use wavrel_core::fields::{make_l_field, BoundaryField, Involutions};
use wavrel_core::geometry::{light_cone, Domain, ParamCurve};
use wavrel_core::hamiltonian::{
    annulus_member, c0_residuals, c_xi_membership, circle_omega, flow_composition_check, ham_vector,
    hamiltonian_h, reduced_flow_neg, CircleField, MemberCoefficients,
};
use wavrel_core::misner::{l_basis, misner_defect, misner_orth_residual, null_survey};
use wavrel_core::num::{grid, wrap_centered, TAU};
use wavrel_core::symplectic::{
    annulus_bubbles, conformal_push, isotropy_residual, omega, polynomial_l_basis, truncated_reduction,
    ConformalMap,
};
use wavrel_core::{BoundaryPoint, Error, Sign};

struct Outcome {
    pass: bool,
    detail: String,
    /// Set when the criterion cannot hold as written; the run still succeeds.
    known: Option<&'static str>,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail, known: None }
}

fn four_holes() -> Domain {
    Domain::minkowski(
        vec![
            ParamCurve::circle(2.0, [0.0, 0.0]),
            ParamCurve::circle(0.7, [-0.95, 0.35]).reversed(),
            ParamCurve::circle(0.7, [0.95, -0.35]).reversed(),
            ParamCurve::circle(0.5, [0.0, -1.25]).reversed(),
        ],
        0,
    )
    .expect("four-component domain")
}

fn blob() -> Domain {
    Domain::minkowski(vec![ParamCurve::fourier(vec![0.0, 1.2, 0.1, 0.0, 0.15], vec![0.0, 0.0, 0.9, 0.1], TAU)], 0)
        .expect("blob")
}

fn boosted_disk() -> Domain {
    Domain::disk(1.0).mapped(&ConformalMap::Boost { rapidity: 0.5 }.affine()).expect("boosted disk")
}

/// Tracer against the closed forms at 512 points per component, both signs.
fn criterion_1() -> Result<Outcome, Error> {
    let m = 512;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let disk = Domain::disk(1.0);
    let annulus = Domain::annulus(1.0, 2.0);
    for sign in [Sign::Minus, Sign::Plus] {
        let map = InvolutionMap::new(&disk, sign)?;
        for t in grid(TAU, m) {
            let p = BoundaryPoint::new(0, t);
            if map.distance_to_exceptional(p) < 1e-9 {
                continue;
            }
            let q = map.apply(p)?;
            worst = worst.max(wrap_centered(q.t - disk_involution(sign, t), TAU).abs());
            checked += 1;
        }
        let map = InvolutionMap::new(&annulus, sign)?;
        for c in 0..2 {
            for t in grid(TAU, m) {
                let p = BoundaryPoint::new(c, t);
                if map.distance_to_exceptional(p) < 1e-9 {
                    continue;
                }
                let q = ring_point(map.apply(p)?);
                let oracle = annulus_involution(1.0, 2.0, sign, ring_point(p))?;
                let err = if q.ring == oracle.ring { wrap_centered(q.angle - oracle.angle, TAU).abs() } else { f64::INFINITY };
                worst = worst.max(err);
                checked += 1;
            }
        }
    }
    Ok(outcome(worst < 1e-8, format!("{checked} points, max angle error {worst:.2e} (tol 1e-8)")))
}

/// Normalized `|ω|` over a `K = 16` basis of `L` on four domains.
fn criterion_2() -> Result<Outcome, Error> {
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, d) in [("disk", Domain::disk(1.0)), ("annulus", Domain::annulus(1.0, 2.0)), ("boosted disk", boosted_disk()), ("blob", blob())] {
        let invs = Involutions::new(&d)?;
        let mut basis = polynomial_l_basis(&invs, 16, 512)?;
        if name == "annulus" {
            basis.extend(annulus_bubbles(&invs, 1.0, 4, 512)?);
        }
        let r = isotropy_residual(&d, &basis)?;
        worst = worst.max(r);
        parts.push(format!("{name} {r:.1e}"));
    }
    Ok(outcome(worst < 1e-7, format!("max normalized |ω|: {} (tol 1e-7)", parts.join(", "))))
}

/// Truncated defects, stable in `K` and `M`.
fn criterion_3() -> Result<Outcome, Error> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, d, expect) in [("disk", Domain::disk(1.0), 0), ("annulus", Domain::annulus(1.0, 2.0), 2), ("4-component", four_holes(), 6)] {
        let mut seen = Vec::new();
        for k in [8, 12] {
            for m in [1024, 2048] {
                let r = truncated_reduction(&d, k, m)?;
                ok &= r.defect == expect && r.lagrangian_defect == 0 && r.cross_check == expect;
                seen.push(r.defect);
            }
        }
        parts.push(format!("{name} {seen:?}"));
    }
    Ok(outcome(ok, format!("defects over (K, M) in {{8,12}}x{{1024,2048}}: {} (expect 0, 2, 6)", parts.join(", "))))
}

/// Vertex action against bulk quadrature.
fn criterion_4() -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut boundary_gap: f64 = 0.0;
    for _ in 0..50 {
        let sp = [rng.gen_range(-1.0..0.0), rng.gen_range(0.2..1.5)];
        let sm = [rng.gen_range(-1.0..0.0), rng.gen_range(0.2..1.5)];
        let (a, b, c) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.5..3.0));
        let (p, q, r) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.5..3.0));
        let f = move |s: f64| a * s + b * (c * s).sin();
        let df = move |s: f64| a + b * c * (c * s).cos();
        let g = move |s: f64| p * s * s + q * (r * s).cos();
        let dg = move |s: f64| 2.0 * p * s - q * r * (r * s).sin();
        let u = diamond_l(sp, sm, f, g, 129)?;
        let hj = hj_action(&u)?;
        let bulk = bulk_action(sp, sm, df, dg, 8);
        worst = worst.max((hj - bulk).abs());
        boundary_gap = boundary_gap.max((hj_boundary(&u) - hj).abs());
    }
    let unit = [0.0, 1.0];
    let ex = hj_action(&diamond_l(unit, unit, |s| s, |s| s, 65)?)?;
    let ex_bulk = bulk_action(unit, unit, |_| 1.0, |_| 1.0, 2);
    let pass = worst < 1e-10 && (ex + 1.0).abs() < 1e-14 && (ex_bulk + 1.0).abs() < 1e-12;
    Ok(outcome(pass, format!(
            "50 random (f, g): max |HJ - bulk| {worst:.1e} (tol 1e-10), edge-rule gap {boundary_gap:.1e}; \
             unit diamond f=g=id: HJ {ex}, bulk {ex_bulk:.15}"
        )))
}

/// The disk identity, the obstruction example and the trace-free kernel field.
fn criterion_5() -> Result<Outcome, Error> {
    let d = Domain::disk(1.0);
    let invs = Involutions::new(&d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let b: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let cone = |p: BoundaryPoint| light_cone(d.position(p));
        let f = |p: BoundaryPoint| {
            let s = cone(p).0;
            a[0] * s + a[1] * s * s + a[2] * (2.0 * s).sin() + a[3] * s.exp()
        };
        let g = |p: BoundaryPoint| {
            let s = cone(p).1;
            b[0] * s + b[1] * s * s * s + b[2] * (3.0 * s).cos() + b[3] / (2.0 + s)
        };
        let u = make_l_field(&invs, f, g, 256)?;
        let mut p = BoundaryPoint::new(0, rng.gen_range(0.0..TAU));
        while invs.minus.distance_to_exceptional(p) < 1e-3 || invs.plus.distance_to_exceptional(p) < 1e-3 {
            p.t += 0.01;
        }
        worst = worst.max(dirichlet_existence_obstruction(&invs, &u, p, 2)?.abs());
    }
    let p = BoundaryPoint::new(0, 0.3);
    let cos1 = BoundaryField::sample(&d, 256, |q| (q.t.cos(), 0.0));
    let cos2 = BoundaryField::sample(&d, 256, |q| ((2.0 * q.t).cos(), 0.0));
    let ob1 = dirichlet_existence_obstruction(&invs, &cos1, p, 2)?;
    let ob2 = dirichlet_existence_obstruction(&invs, &cos2, p, 2)?;
    let kernel = dirichlet_kernel_field(&invs, Arc { component: 0, a: 0.1, b: 0.4 }, 2, 512)?;
    let trace_free = kernel.phi.iter().flatten().all(|v| v.abs() < 1e-12);
    let normal = kernel.max_abs();
    let mut with_l = polynomial_l_basis(&invs, 16, 512)?;
    with_l.push(kernel);
    let membership = isotropy_residual(&d, &with_l)?;
    let rest = worst < 1e-8 && ob2.abs() >= 0.1 && trace_free && normal > 0.1 && membership < 1e-7;
    let detail = format!(
        "identity max {worst:.1e} over 100 fields (tol 1e-8); obstruction cos θ = {ob1:.1e}, cos 2θ = {ob2:.4}; \
         kernel field φ ≡ 0, sup|φ_n| = {normal:.3}, |ω| against K=16 basis {membership:.1e}"
    );
    Ok(Outcome {
        pass: rest && ob1.abs() >= 0.1,
        detail,
        known: (rest && ob1.abs() < 0.1)
            .then_some("cos θ is the trace of the solution x, so its obstruction vanishes identically; cos 2θ exhibits the obstruction instead"),
    })
}

/// The Hamiltonian suite.
fn criterion_6() -> Result<Outcome, Error> {
    let h = hamiltonian_h(&CircleField::sample(256, |t| (0.0, t.cos()))?);
    let c = 0.7;
    let hv = ham_vector(&CircleField::sample(256, |_| (0.0, c))?)?;
    let hv_err = hv.phi.iter().map(|v| (v - c).abs()).chain(hv.phi_n.iter().map(|v| (v - 2.0 * c).abs())).fold(0.0, f64::max);
    let r_bad = c0_residuals(&CircleField::sample(256, |t| (t.cos(), 0.0))?);
    let r_good = c0_residuals(&CircleField::sample(256, |t| (t.sin(), t.sin()))?);
    let c0_ok = r_bad.iter().all(|r| (r - 0.5f64.sqrt()).abs() < 1e-12) && r_good.iter().all(|r| *r < 1e-12);

    let xi = 2f64.ln();
    let outer = CircleField::linear_solution(512, SQRT_2, 0.0, 1.0)?;
    let exact = CircleField::linear_solution(512, SQRT_2, 0.0, 0.5)?;
    let flow_err = reduced_flow_neg(&outer, xi)?.distance(&exact)?;

    let k1 = MemberCoefficients { global: [0.4, -0.3, 0.5, 0.2], side: [0.8, -0.6] };
    let k2 = MemberCoefficients { global: [-0.2, 0.6, 0.1, -0.5], side: [-0.4, 0.9] };
    let (u1, _) = annulus_member(0.7, 512, &k1)?;
    let (u2, _) = annulus_member(0.7, 512, &k2)?;
    let before = circle_omega(&u1, &u2)?;
    let after = circle_omega(&reduced_flow_neg(&u1, 0.7)?, &reduced_flow_neg(&u2, 0.7)?)?;
    let pullback = (after - before).abs();
    let compose = flow_composition_check(0.3, 0.4, &[u1.clone(), u2, outer.clone()])?;
    let member = c_xi_membership(&u1, 0.7)?.max();

    let pass = (h - FRAC_PI_4).abs() < 1e-8
        && hv_err < 1e-8
        && c0_ok
        && flow_err < 1e-6
        && pullback < 1e-7
        && compose < 1e-6;
    Ok(outcome(
        pass,
        format!(
            "H(0,cos) - π/4 = {:.1e}; Ȟ(0,c) error {hv_err:.1e}; C₀ residuals (cos,0) {:.6}, (sin,sin) {:.1e}; \
             F(-ln 2) error {flow_err:.1e}; ω-pullback {pullback:.1e}; composition (0.3,0.4) {compose:.1e} \
             (membership {member:.1e})",
            h - FRAC_PI_4,
            r_bad[0],
            r_good.iter().fold(0.0f64, |m, r| m.max(*r)),
        ),
    ))
}

/// The Misner certificate against the annulus.
fn criterion_7() -> Result<Outcome, Error> {
    let orth = l_basis(8, 256)?.iter().map(misner_orth_residual).fold(0.0, f64::max);
    let mut defects = Vec::new();
    let mut growth = true;
    for k in 0..=8 {
        let d = misner_defect(k)?;
        growth &= d.defect == 2 * (2 * k + 1) && d.orth_matches == Some(true);
        defects.push(d.defect);
    }
    let annulus = Domain::annulus(1.0, 2.0);
    let mut ann = Vec::new();
    for k in [4, 6, 8] {
        ann.push(truncated_reduction(&annulus, k, 1024)?.defect);
    }
    let survey = null_survey(64)?;
    let pass = orth < 1e-10 && growth && ann.iter().all(|&d| d == 2) && survey.matches_expectation();
    Ok(outcome(
        pass,
        format!(
            "orth residual on L {orth:.1e}; defect K=0..8 {defects:?}; annulus K=4,6,8 {ann:?}; \
             ∂₋ asymptotic {}/{}, ∂₊ hit {}/{}",
            survey.minus_asymptotic, survey.samples, survey.plus_hit, survey.samples
        ),
    ))
}

/// Pairwise `ω` under conformal maps.
fn criterion_8() -> Result<Outcome, Error> {
    let d = blob();
    let m = 512;
    let family: Vec<BoundaryField> = (0..10)
        .map(|j| {
            let k = (j / 2 + 1) as f64;
            let shift = 0.37 * j as f64;
            BoundaryField::sample(&d, m, move |p| {
                let t = p.t;
                if j % 2 == 0 {
                    ((k * t + shift).cos(), 0.5 * (t - shift).sin())
                } else {
                    (0.3 * (k * t).sin() + (t + shift).cos(), (k * t - shift).cos())
                }
            })
        })
        .collect();
    let base: Vec<f64> = pairs(&d, &family)?;
    let scale = base.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, map) in [
        ("translation", ConformalMap::Translation { dx: 0.4, dy: -1.3 }),
        ("scaling 2", ConformalMap::Scaling { lambda: 2.0 }),
        ("boost 0.5", ConformalMap::Boost { rapidity: 0.5 }),
    ] {
        let mut pushed = Vec::new();
        let mut dom = None;
        for u in &family {
            let (pd, pu) = conformal_push(&map, &d, u)?;
            dom = Some(pd);
            pushed.push(pu);
        }
        let after = pairs(dom.as_ref().expect("nonempty family"), &pushed)?;
        let err = base.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        worst = worst.max(err);
        parts.push(format!("{name} {err:.1e}"));
    }
    Ok(outcome(worst < 1e-7, format!("45 pairings, relative change: {} (tol 1e-7)", parts.join(", "))))
}

fn pairs(d: &Domain, family: &[BoundaryField]) -> Result<Vec<f64>, Error> {
    let mut out = Vec::new();
    for i in 0..family.len() {
        for j in (i + 1)..family.len() {
            out.push(omega(d, &family[i], &family[j])?);
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome, Error>); 8] = [
        ("involution oracles (disk, annulus)", criterion_1),
        ("isotropy of L (surrogate for Lagrangianity)", criterion_2),
        ("defect dimensions 0 / 2 / 6 (surrogate)", criterion_3),
        ("diamond exactness", criterion_4),
        ("Dirichlet on the disk", criterion_5),
        ("Hamiltonian suite", criterion_6),
        ("Misner certificate (surrogate)", criterion_7),
        ("conformal invariance of ω", criterion_8),
    ];
    let total = Instant::now();
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, line) = match run() {
            Ok(o) => {
                if !o.pass && o.known.is_none() {
                    unexpected += 1;
                }
                let note = o.known.map(|k| format!(" [known: {k}]")).unwrap_or_default();
                (if o.pass { "PASS" } else { "FAIL" }, format!("{}{}", o.detail, note))
            }
            Err(e) => {
                unexpected += 1;
                ("FAIL", format!("error: {e}"))
            }
        };
        println!("{tag} criterion {}: {name}: {line} ({:.1} s)", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance finished in {:.1} s", total.elapsed().as_secs_f64());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
