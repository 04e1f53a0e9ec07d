//! One function per subcommand. Each fills the report and optionally returns
//! a CSV table.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use serde_json::{json, Value};
use wavrel_core::characteristics::{involution_map, Outcome};
use wavrel_core::diamond::{bulk_action, diamond_l, hj_action, hj_boundary, EdgeFunction};
use wavrel_core::dirichlet::{diagnose, orbit, DiagnoseOptions};
use wavrel_core::fields::{BoundaryField, Involutions};
use wavrel_core::geometry::{light_points_with, Domain, LightConfig};
use wavrel_core::hamiltonian::{
    annulus_member, c_xi_membership, flow_composition_check, reduced_flow_neg, CircleField, MemberCoefficients,
};
use wavrel_core::misner::{misner_trace, piece_defect, MisnerPiece};
use wavrel_core::num::TAU;
use wavrel_core::symplectic::{isotropy_residual, omega, pairing_matrix, polynomial_l_basis, truncated_reduction};
use wavrel_core::{BoundaryPoint, Sign};

use crate::report::{float, RunReport, Suite, Timing};
use crate::CliError;

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Table {
        Table { header, rows: Vec::new() }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

fn io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Stage timer feeding `RunReport::timings`.
pub struct Stages {
    start: Instant,
    done: Vec<Timing>,
}

impl Stages {
    pub fn new() -> Stages {
        Stages { start: Instant::now(), done: Vec::new() }
    }

    pub fn mark(&mut self, stage: &str) {
        let now = Instant::now();
        self.done.push(Timing { stage: stage.into(), seconds: (now - self.start).as_secs_f64() });
        self.start = now;
    }

    pub fn finish(self) -> Vec<Timing> {
        self.done
    }
}

fn sign_str(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "plus",
        Sign::Minus => "minus",
    }
}

fn point_json(p: BoundaryPoint) -> Value {
    json!({ "component": p.component, "t": float(p.t) })
}

pub fn light_points(domain: &Domain, grid: usize, report: &mut RunReport, st: &mut Stages) -> Result<Table, CliError> {
    let cfg = LightConfig { grid, ..LightConfig::default() };
    let pts = light_points_with(domain, &cfg)?;
    st.mark("light-points");
    let mut table = Table::new(vec!["component", "t", "sign", "kappa"]);
    let mut list = Vec::new();
    for p in &pts {
        table.rows.push(vec![p.component.to_string(), p.t.to_string(), sign_str(p.sign).into(), p.kappa.to_string()]);
        list.push(json!({ "component": p.component, "t": float(p.t), "sign": sign_str(p.sign), "kappa": float(p.kappa) }));
    }
    report.result = json!({ "count": pts.len(), "points": list });
    let even = pts.len() % 2 == 0;
    report.suites.push(Suite::new("light-points", even).dim("count", pts.len()));
    Ok(table)
}

pub fn involution(domain: &Domain, sign: Sign, grid: usize, report: &mut RunReport, st: &mut Stages) -> Result<Table, CliError> {
    let map = involution_map(domain, sign, grid)?;
    st.mark("table");
    let mut table = Table::new(vec!["component", "t", "target_component", "target_t", "class_order"]);
    let mut excluded = 0;
    for comp in map.table() {
        for e in comp {
            let (tc, tt) = match e.target {
                Some(q) => (q.component.to_string(), q.t.to_string()),
                None => {
                    excluded += 1;
                    (String::new(), String::new())
                }
            };
            table.rows.push(vec![e.source.component.to_string(), e.source.t.to_string(), tc, tt, e.class_order.to_string()]);
        }
    }
    let classes: Vec<Value> = map.classes().iter().map(|c| Value::from(c.iter().map(|p| point_json(*p)).collect::<Vec<_>>())).collect();
    report.result = json!({
        "sign": sign_str(sign),
        "grid": grid,
        "rows": table.rows.len(),
        "excluded": excluded,
        "tangencies": map.tangencies().count(),
        "exceptional_classes": classes,
    });
    report.suites.push(Suite::new("involution-table", true).dim("rows", table.rows.len()).dim("excluded", excluded));
    Ok(table)
}

pub fn orbit_cmd(domain: &Domain, start: BoundaryPoint, iters: usize, report: &mut RunReport, st: &mut Stages) -> Result<Table, CliError> {
    let invs = Involutions::new(domain)?;
    st.mark("involutions");
    let rec = orbit(&invs, start, iters)?;
    st.mark("orbit");
    let mut table = Table::new(vec!["k", "component", "t"]);
    for (k, p) in rec.iterates.iter().enumerate() {
        table.rows.push(vec![k.to_string(), p.component.to_string(), p.t.to_string()]);
    }
    report.result = json!({
        "start": point_json(rec.start),
        "iterations": rec.iterates.len().saturating_sub(1),
        "period": rec.period,
        "rotation_number": rec.rotation_number.map(float),
        "discrepancy": float(rec.discrepancy),
        "note": "rotation number and histogram discrepancy are heuristics for density, not proofs",
    });
    report.suites.push(Suite::new("orbit", true).residual("discrepancy", rec.discrepancy));
    Ok(table)
}

/// Pairing matrix of the polynomial `L` basis, or `ω(u, w)` for two fields.
pub fn pairing(
    domain: &Domain,
    fields: Option<(BoundaryField, BoundaryField)>,
    k: usize,
    m: usize,
    tol: f64,
    report: &mut RunReport,
    st: &mut Stages,
) -> Result<(), CliError> {
    if let Some((u, w)) = fields {
        let v = omega(domain, &u, &w)?;
        st.mark("omega");
        report.result = json!({ "omega": float(v) });
        report.suites.push(Suite::new("pairing", true).residual("omega", v));
        return Ok(());
    }
    let invs = Involutions::new(domain)?;
    let basis = polynomial_l_basis(&invs, k, m)?;
    st.mark("basis");
    let mat = pairing_matrix(domain, &basis)?;
    let iso = isotropy_residual(domain, &basis)?;
    st.mark("pairing");
    let rows: Vec<Value> = (0..mat.nrows()).map(|i| Value::from((0..mat.ncols()).map(|j| float(mat[(i, j)])).collect::<Vec<_>>())).collect();
    report.result = json!({ "K": k, "M": m, "basis": basis.len(), "matrix": rows, "isotropy": float(iso) });
    report.suites.push(Suite::new("isotropy", iso < tol).tol(tol).residual("normalized_omega", iso).dim("basis", basis.len()));
    Ok(())
}

const SURROGATE: &str = "finite truncation certificate, not an infinite-dimensional proof";

pub fn verify(
    domain: &Domain,
    suite: &str,
    k: usize,
    m: usize,
    tol: Option<f64>,
    report: &mut RunReport,
    st: &mut Stages,
) -> Result<(), CliError> {
    if domain.is_misner() {
        let d = piece_defect(MisnerPiece::Full, k)?;
        st.mark("misner-defect");
        let expect = 2 * (2 * k + 1);
        let (name, pass) = match suite {
            "isotropy" => ("isotropy", d.isotropy < tol.unwrap_or(1e-10)),
            "defect" => ("defect", d.defect == expect && d.orth_matches == Some(true)),
            other => return Err(CliError::Input(format!("unknown suite '{other}'"))),
        };
        report.result = json!({
            "K": k,
            "defect": d.defect,
            "expected_defect": expect,
            "lagrangian": d.defect == 0,
            "isotropy": float(d.isotropy),
        });
        report.suites.push(
            Suite::new(name, pass)
                .tol(tol.unwrap_or(1e-10))
                .surrogate(SURROGATE)
                .residual("isotropy", d.isotropy)
                .dim("space", d.dim_space)
                .dim("kernel", d.dim_kernel)
                .dim("l_h", d.dim_l_h)
                .dim("l_perp_h", d.dim_l_perp_h)
                .dim("defect", d.defect),
        );
        return Ok(());
    }
    match suite {
        "isotropy" => {
            let tol = tol.unwrap_or(1e-7);
            let invs = Involutions::new(domain)?;
            let basis = polynomial_l_basis(&invs, k, m)?;
            st.mark("basis");
            let iso = isotropy_residual(domain, &basis)?;
            st.mark("isotropy");
            report.result = json!({ "K": k, "M": m, "basis": basis.len(), "isotropy": float(iso) });
            report.suites.push(
                Suite::new("isotropy", iso < tol).tol(tol).surrogate(SURROGATE).residual("normalized_omega", iso).dim("basis", basis.len()),
            );
        }
        "defect" => {
            let r = truncated_reduction(domain, k, m)?;
            st.mark("defect");
            let expect = 2 * (domain.component_count() - 1);
            let pass = r.defect == expect && r.lagrangian_defect == 0 && r.cross_check == r.defect;
            report.result = json!({
                "K": k,
                "M": m,
                "defect": r.defect,
                "expected_defect": expect,
                "lagrangian": r.lagrangian_defect == 0,
                "lagrangian_defect": r.lagrangian_defect,
                "cross_check": r.cross_check,
                "spectrum": r.spectrum.iter().map(|v| float(*v)).collect::<Vec<_>>(),
                "residual_spectrum": r.residual_spectrum.iter().map(|v| float(*v)).collect::<Vec<_>>(),
                "threshold": float(r.threshold),
                "gap": float(r.gap),
            });
            report.suites.push(
                Suite::new("defect", pass)
                    .tol(r.threshold)
                    .surrogate(SURROGATE)
                    .residual("gap", r.gap)
                    .dim("test", r.dim_test)
                    .dim("l_h", r.dim_l_h)
                    .dim("l_perp_h", r.dim_l_perp_h)
                    .dim("defect", r.defect)
                    .dim("lagrangian_defect", r.lagrangian_defect),
            );
        }
        other => return Err(CliError::Input(format!("unknown suite '{other}'"))),
    }
    Ok(())
}

pub fn dirichlet(domain: &Domain, m: usize, report: &mut RunReport, st: &mut Stages) -> Result<(), CliError> {
    let invs = Involutions::new(domain)?;
    st.mark("involutions");
    let opts = DiagnoseOptions { m, ..DiagnoseOptions::default() };
    let d = diagnose(&invs, &opts)?;
    st.mark("diagnose");
    report.result = json!({
        "kernel_found": d.kernel_found,
        "kernel_arc": d.kernel_arc.map(|(a, n)| json!({ "component": a.component, "a": float(a.a), "b": float(a.b), "period": n })),
        "obstruction_samples": d.obstruction_samples.iter().map(|v| float(*v)).collect::<Vec<_>>(),
        "rotation_number": d.rotation_number.map(|r| json!({ "value": float(r.value), "delta": float(r.delta) })),
        "verdict": d.verdict.as_str(),
    });
    report.suites.push(Suite::new("dirichlet-diagnose", true).surrogate("heuristic trichotomy from periodic points and rotation number"));
    Ok(())
}

pub fn diamond(
    f: &EdgeFunction,
    g: &EdgeFunction,
    bx: [f64; 4],
    n: usize,
    tol: f64,
    report: &mut RunReport,
    st: &mut Stages,
) -> Result<(), CliError> {
    let (sp, sm) = ([bx[0], bx[1]], [bx[2], bx[3]]);
    let u = diamond_l(sp, sm, |s| f.eval(s), |s| g.eval(s), n)?;
    let hj = hj_action(&u)?;
    let edge = hj_boundary(&u);
    let bulk = bulk_action(sp, sm, |s| f.derivative(s), |s| g.derivative(s), 16);
    st.mark("diamond");
    let err = (hj - bulk).abs();
    report.result = json!({
        "f": f.to_string(),
        "g": g.to_string(),
        "box": [float(bx[0]), float(bx[1]), float(bx[2]), float(bx[3])],
        "hj_vertex": float(hj),
        "hj_edges": float(edge),
        "bulk": float(bulk),
    });
    report.suites.push(Suite::new("diamond-hj", err < tol).tol(tol).residual("hj_minus_bulk", err).residual("edges_minus_vertex", (edge - hj).abs()));
    Ok(())
}

pub fn read_circle_csv(path: &str) -> Result<CircleField, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    let (mut theta, mut phi, mut phi_n) = (Vec::new(), Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Input(format!("{path}: {e}")))?;
        let row = theta.len() + 1;
        let num = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .ok_or_else(|| CliError::Input(format!("{path}: expected columns theta,phi,phi_n")))?
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("{path}: bad number in row {row}")))
        };
        theta.push(num(0)?);
        phi.push(num(1)?);
        phi_n.push(num(2)?);
    }
    let m = theta.len();
    for (j, t) in theta.iter().enumerate() {
        if (t - TAU * j as f64 / m as f64).abs() > 1e-9 {
            return Err(CliError::Input(format!("{path}: theta must be the uniform grid 2πj/{m}")));
        }
    }
    Ok(CircleField::new(phi, phi_n)?)
}

fn circle_table(u: &CircleField) -> Table {
    let mut table = Table::new(vec!["theta", "phi", "phi_n"]);
    for (j, t) in u.thetas().iter().enumerate() {
        table.rows.push(vec![t.to_string(), u.phi[j].to_string(), u.phi_n[j].to_string()]);
    }
    table
}

pub fn flow(u: &CircleField, xi: f64, tol: f64, report: &mut RunReport, st: &mut Stages) -> Result<Table, CliError> {
    let member = c_xi_membership(u, xi)?;
    st.mark("membership");
    let inner = reduced_flow_neg(u, xi)?;
    st.mark("flow");
    report.result = json!({
        "xi": float(xi),
        "grid": u.len(),
        "membership": { "alpha": float(member.alpha), "beta": float(member.beta) },
    });
    report.suites.push(Suite::new("flow", member.max() < tol).tol(tol).residual("membership", member.max()));
    Ok(circle_table(&inner))
}

/// Composition law on the trace of `√2 x` and two sampled members of the
/// domain of the longer flow.
pub fn compose(a: f64, b: f64, m: usize, tol: f64, report: &mut RunReport, st: &mut Stages) -> Result<(), CliError> {
    let mut samples = vec![CircleField::linear_solution(m, SQRT_2, 0.0, 1.0)?];
    for k in [
        MemberCoefficients { global: [0.4, -0.3, 0.5, 0.2], side: [0.8, -0.6] },
        MemberCoefficients { global: [-0.2, 0.6, 0.1, -0.5], side: [-0.4, 0.9] },
    ] {
        samples.push(annulus_member(a + b, m, &k)?.0);
    }
    st.mark("samples");
    let err = flow_composition_check(a, b, &samples)?;
    st.mark("compose");
    report.result = json!({ "xi": [float(a), float(b)], "samples": samples.len(), "grid": m, "composition_residual": float(err) });
    report.suites.push(Suite::new("flow-composition", err < tol).tol(tol).residual("composition", err));
    Ok(())
}

pub fn misner_defect(piece: MisnerPiece, k: usize, report: &mut RunReport, st: &mut Stages) -> Result<(), CliError> {
    let d = piece_defect(piece, k)?;
    st.mark("defect");
    let expect = match piece {
        MisnerPiece::Full => 2 * (2 * k + 1),
        MisnerPiece::Lower | MisnerPiece::Upper => 2 * k,
    };
    let pass = d.defect == expect && d.orth_matches != Some(false);
    report.result = json!({
        "piece": piece.as_str(),
        "K": k,
        "M": d.m,
        "defect": d.defect,
        "expected_defect": expect,
        "lagrangian": d.defect == 0,
        "isotropy": float(d.isotropy),
        "orth_rank": d.orth_rank,
        "orth_matches": d.orth_matches,
    });
    report.suites.push(
        Suite::new("misner-defect", pass)
            .surrogate(SURROGATE)
            .residual("isotropy", d.isotropy)
            .dim("space", d.dim_space)
            .dim("kernel", d.dim_kernel)
            .dim("l_h", d.dim_l_h)
            .dim("l_perp_h", d.dim_l_perp_h)
            .dim("defect", d.defect),
    );
    Ok(())
}

pub fn misner_trace_cmd(x0: f64, upper: bool, sign: Sign, report: &mut RunReport, st: &mut Stages) -> Result<Table, CliError> {
    let (outcome, path) = misner_trace(x0, upper, sign)?;
    st.mark("trace");
    let mut table = Table::new(vec!["x", "y"]);
    for p in &path {
        table.rows.push(vec![p[0].to_string(), p[1].to_string()]);
    }
    let (label, hit) = match outcome {
        Outcome::Hit(p) => ("hit", Some(point_json(p))),
        Outcome::Asymptotic => ("asymptotic", None),
    };
    report.result = json!({
        "x0": float(x0),
        "start": if upper { "upper" } else { "lower" },
        "sign": sign_str(sign),
        "outcome": label,
        "hit": hit,
        "points": path.len(),
    });
    report.suites.push(Suite::new("misner-trace", true).dim("points", path.len()));
    Ok(table)
}
