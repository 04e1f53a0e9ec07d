//! The boundary pairing `ω`, isotropy residuals, truncated defect
//! certificates, period maps and affine conformal transport.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::characteristics::InvolutionMap;
use crate::fields::{
    holonomy_field, holonomy_forms, make_l_field, BoundaryField, HolonomyForm, Involutions, OneFormPair,
};
use crate::geometry::{light_cone, Affine, Domain, Frame};
use crate::num::{grid, normalize_columns, null_space, rank, svd, TAU};
use crate::{BoundaryPoint, Error, Result, Sign};

/// `v cos 2θ φ_n − sin 2θ ∂_tφ`: the flux density paired against `ψ`.
fn flux(frame: &Frame, phi_n: f64, dphi: f64) -> f64 {
    frame.v * frame.cos2 * phi_n - frame.sin2 * dphi
}

/// `ω(u, w) = Σ_c ∮ (v cos 2θ φ_n − sin 2θ ∂_tφ) ψ − (v cos 2θ ψ_n − sin 2θ ∂_tψ) φ dt`.
pub fn omega(domain: &Domain, u: &BoundaryField, w: &BoundaryField) -> Result<f64> {
    if !u.same_grid(w) || u.components() != domain.component_count() {
        return Err(Error::GridMismatch);
    }
    let mut total = 0.0;
    for c in 0..u.components() {
        let m = u.len(c);
        let (du, dw) = (u.derivative(domain, c), w.derivative(domain, c));
        let mut s = 0.0;
        for (j, t) in grid(domain.period(c), m).into_iter().enumerate() {
            let f = domain.frame(c, t)?;
            s += flux(&f, u.phi_n[c][j], du[j]) * w.phi[c][j] - flux(&f, w.phi_n[c][j], dw[j]) * u.phi[c][j];
        }
        total += s * domain.period(c) / m as f64;
    }
    Ok(total)
}

/// `(Σ_c ∮ φ² + (∂_tφ)² + v²φ_n² dt)^{1/2}`.
pub fn field_norm(domain: &Domain, u: &BoundaryField) -> Result<f64> {
    let mut total = 0.0;
    for c in 0..u.components() {
        let m = u.len(c);
        let du = u.derivative(domain, c);
        let mut s = 0.0;
        for (j, t) in grid(domain.period(c), m).into_iter().enumerate() {
            let v = domain.frame(c, t)?.v;
            s += u.phi[c][j].powi(2) + du[j].powi(2) + (v * u.phi_n[c][j]).powi(2);
        }
        total += s * domain.period(c) / m as f64;
    }
    Ok(total.sqrt())
}

/// Antisymmetric matrix `ω(b_i, b_j)`.
pub fn pairing_matrix(domain: &Domain, basis: &[BoundaryField]) -> Result<DMatrix<f64>> {
    let (x, y, _) = flux_matrices(domain, basis)?;
    Ok(antisym(&x, &y))
}

/// Stacked `(flux·h, φ)` samples, one column per field.
fn flux_matrices(domain: &Domain, basis: &[BoundaryField]) -> Result<(DMatrix<f64>, DMatrix<f64>, Vec<f64>)> {
    let Some(first) = basis.first() else {
        return Ok((DMatrix::zeros(0, 0), DMatrix::zeros(0, 0), Vec::new()));
    };
    if basis.iter().any(|b| !b.same_grid(first)) || first.components() != domain.component_count() {
        return Err(Error::GridMismatch);
    }
    let rows: usize = (0..first.components()).map(|c| first.len(c)).sum();
    let mut x = DMatrix::zeros(rows, basis.len());
    let mut y = DMatrix::zeros(rows, basis.len());
    let mut weights = Vec::with_capacity(rows);
    let mut frames = Vec::with_capacity(rows);
    for c in 0..first.components() {
        let m = first.len(c);
        for t in grid(domain.period(c), m) {
            frames.push(domain.frame(c, t)?);
            weights.push(domain.period(c) / m as f64);
        }
    }
    for (k, b) in basis.iter().enumerate() {
        let mut r = 0;
        for c in 0..b.components() {
            let d = b.derivative(domain, c);
            for j in 0..b.len(c) {
                x[(r, k)] = weights[r] * flux(&frames[r], b.phi_n[c][j], d[j]);
                y[(r, k)] = b.phi[c][j];
                r += 1;
            }
        }
    }
    Ok((x, y, weights))
}

fn antisym(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    let a = x.transpose() * y;
    &a - a.transpose()
}

/// `max |ω(b_i, b_j)| / (‖b_i‖ ‖b_j‖)`.
pub fn isotropy_residual(domain: &Domain, basis: &[BoundaryField]) -> Result<f64> {
    let w = pairing_matrix(domain, basis)?;
    let norms: Vec<f64> = basis.iter().map(|b| field_norm(domain, b)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let d = norms[i] * norms[j];
            if d > 0.0 {
                worst = worst.max(w[(i, j)].abs() / d);
            }
        }
    }
    Ok(worst)
}

/// Period vectors `(∮_{γ_i} α, ∮_{γ_i} β)`.
pub fn periods(domain: &Domain, pair: &OneFormPair) -> (Vec<f64>, Vec<f64>) {
    pair.periods(domain)
}

/// Chebyshev polynomial `T_k(x)`.
pub fn chebyshev(k: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if k == 0 {
        return 1.0;
    }
    for _ in 1..k {
        let c = 2.0 * x * b - a;
        a = b;
        b = c;
    }
    b
}

/// Half-width of the light-cone coordinates over the boundary.
fn cone_scale(domain: &Domain) -> f64 {
    let mut r: f64 = 0.0;
    for c in 0..domain.component_count() {
        for t in grid(domain.period(c), 256) {
            let (sp, sm) = light_cone(domain.position(BoundaryPoint::new(c, t)));
            r = r.max(sp.abs()).max(sm.abs());
        }
    }
    1.05 * r
}

/// Traces of the global solutions `T_k(σ₊/R)` (`0 ≤ k ≤ K`) and `T_k(σ₋/R)`
/// (`1 ≤ k ≤ K`).
pub fn polynomial_l_basis(invs: &Involutions, k_max: usize, m: usize) -> Result<Vec<BoundaryField>> {
    let domain = invs.domain();
    let r = cone_scale(domain);
    let sig = |p: BoundaryPoint| light_cone(domain.position(p));
    let mut out = Vec::new();
    for k in 0..=k_max {
        out.push(make_l_field(invs, |p| chebyshev(k, sig(p).0 / r), |_| 0.0, m)?);
        if k > 0 {
            out.push(make_l_field(invs, |_| 0.0, |p| chebyshev(k, sig(p).1 / r), m)?);
        }
    }
    Ok(out)
}

/// Solutions of the wave equation on a centered annulus that are not
/// restrictions of global ones: `b(σ₊)·[σ₋ > 0]` and `b(σ₋)·[σ₊ > 0]` with a
/// bump `b` supported where the characteristic lines cross the hole.
pub fn annulus_bubbles(invs: &Involutions, r1: f64, count: usize, m: usize) -> Result<Vec<BoundaryField>> {
    let domain = invs.domain();
    let reach = core::f64::consts::SQRT_2 * r1;
    let mut out = Vec::new();
    for j in 0..count {
        let center = reach * (-0.5 + (j as f64 + 0.5) / count as f64);
        let width = 0.45 * reach;
        let bump = move |s: f64| -> f64 {
            let z = (s - center) / width;
            if z.abs() >= 1.0 {
                0.0
            } else {
                (1.0 - z * z).powi(8)
            }
        };
        let sig = |p: BoundaryPoint| light_cone(domain.position(p));
        out.push(make_l_field(invs, |p| {
            let (sp, sm) = sig(p);
            if sm > 0.0 { bump(sp) } else { 0.0 }
        }, |_| 0.0, m)?);
        out.push(make_l_field(invs, |_| 0.0, |p| {
            let (sp, sm) = sig(p);
            if sp > 0.0 { bump(sm) } else { 0.0 }
        }, m)?);
    }
    Ok(out)
}

/// Outcome of the truncated rank computation.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport {
    pub k: usize,
    pub m: usize,
    /// Dimension of the truncated test space.
    pub dim_test: usize,
    /// `dim L_h` for the single-valued part (`L^glob`): the radical of `ω` on
    /// the invariant subspace.
    pub dim_l_h: usize,
    /// `dim L⊥_h`: the subspace cut out by the invariance conditions on
    /// `(α, β)`.
    pub dim_l_perp_h: usize,
    /// `dim L⊥_h − dim L_h`.
    pub defect: usize,
    /// The same quotient with the holonomy elements added to `L_h`.
    pub lagrangian_defect: usize,
    /// Independent count: `rank σ + dim ker ρ − 1` on the invariant subspace.
    pub cross_check: usize,
    /// Singular values of `ω` on the invariant subspace.
    pub spectrum: Vec<f64>,
    /// Singular values of the invariance operator.
    pub residual_spectrum: Vec<f64>,
    pub threshold: f64,
    /// Smallest ratio between a retained and the next discarded singular
    /// value, over both rank decisions.
    pub gap: f64,
}

pub const RANK_TOL: f64 = 1e-8;

/// Trigonometric test function `e_j` (`1, cos t, sin t, cos 2t, …`) and its
/// derivative.
fn mode(j: usize, period: f64, t: f64) -> (f64, f64) {
    if j == 0 {
        return (1.0, 0.0);
    }
    let k = ((j + 1) / 2) as f64;
    let w = TAU / period * k;
    let (s, c) = (w * t).sin_cos();
    if j % 2 == 1 {
        (c, -w * s)
    } else {
        (s, w * c)
    }
}

#[derive(Clone, Copy)]
enum Column {
    Phi { comp: usize, mode: usize },
    Normal { comp: usize, mode: usize },
    Holonomy(usize),
}

fn spectral_gap(values: &[f64], r: usize) -> f64 {
    if r == 0 || r >= values.len() {
        return f64::INFINITY;
    }
    if values[r] == 0.0 {
        f64::INFINITY
    } else {
        values[r - 1] / values[r]
    }
}

/// `α` and `β` of a test column at a boundary point.
fn column_forms(
    col: Column,
    domain: &Domain,
    invs: &Involutions,
    holonomy: &[HolonomyForm],
    p: BoundaryPoint,
    frame: &Frame,
) -> Result<(f64, f64)> {
    let period = domain.period(p.component);
    Ok(match col {
        Column::Phi { comp, mode: j } if comp == p.component => {
            let (_, d) = mode(j, period, p.t);
            (0.5 * (1.0 - frame.sin2) * d, 0.5 * (1.0 + frame.sin2) * d)
        }
        Column::Normal { comp, mode: j } if comp == p.component => {
            let (v, _) = mode(j, period, p.t);
            (0.5 * frame.cos2 * v, -0.5 * frame.cos2 * v)
        }
        Column::Holonomy(i) => holonomy[i].eval(invs, p, true)?,
        _ => (0.0, 0.0),
    })
}

/// Rows `√h (α(p) − α(E₋p)E₋'(p))` and the `β` analogue, and the direct
/// samples of `α`, `β` at the same nodes.
fn invariance_rows(
    invs: &Involutions,
    holonomy: &[HolonomyForm],
    cols: &[Column],
    per: usize,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let domain = invs.domain();
    let n = cols.len();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rho_rows: Vec<Vec<f64>> = Vec::new();
    for sign in [Sign::Minus, Sign::Plus] {
        let map = invs.get(sign);
        let weight = |c: usize| (domain.period(c) / per as f64).sqrt();
        for (p, q, dq) in residual_nodes(map, per)? {
            let fp = domain.frame(p.component, p.t)?;
            let fq = domain.frame(q.component, q.t)?;
            let mut row = Vec::with_capacity(n);
            let mut direct = Vec::with_capacity(n);
            for &col in cols {
                let (ap, bp) = column_forms(col, domain, invs, holonomy, p, &fp)?;
                let (aq, bq) = column_forms(col, domain, invs, holonomy, q, &fq)?;
                let (x, y) = if sign == Sign::Minus { (ap, aq) } else { (bp, bq) };
                row.push(weight(p.component) * (x - y * dq));
                direct.push(ap);
                direct.push(bp);
            }
            rows.push(row);
            let (a, b): (Vec<f64>, Vec<f64>) = direct.chunks(2).map(|c| (c[0], c[1])).unzip();
            rho_rows.push(a);
            rho_rows.push(b);
        }
    }
    Ok((rows, rho_rows))
}

/// Sample points `(p, E p, E'(p))` away from the exceptional set.
fn residual_nodes(map: &InvolutionMap, per_component: usize) -> Result<Vec<(BoundaryPoint, BoundaryPoint, f64)>> {
    let domain = map.domain();
    let mut out = Vec::new();
    for c in 0..domain.component_count() {
        let period = domain.period(c);
        for j in 0..per_component {
            let p = BoundaryPoint::new(c, period * (j as f64 + 0.31) / per_component as f64);
            if map.distance_to_exceptional(p) < 1e-3 * period {
                continue;
            }
            let (q, dq) = match map.apply_with_derivative(p) {
                Ok(r) => r,
                Err(Error::StartOnLightPoint) => continue,
                Err(e) => return Err(e),
            };
            if map.distance_to_exceptional(q) < 1e-3 * domain.period(q.component) {
                continue;
            }
            out.push((p, q, dq));
        }
    }
    Ok(out)
}

/// Truncated certificate for the evolution relation: inside the span of
/// Fourier modes of degree `≤ K` in `φ` and in `v φ_n` on every component,
/// plus the holonomy elements, find the subspace where `α` is
/// `E₋`-invariant and `β` is `E₊`-invariant, and measure `ω` on it.
pub fn truncated_reduction(domain: &Domain, k: usize, m: usize) -> Result<DefectReport> {
    let invs = Involutions::new(domain)?;
    truncated_reduction_with(&invs, k, m)
}

pub fn truncated_reduction_with(invs: &Involutions, k: usize, m: usize) -> Result<DefectReport> {
    let domain = invs.domain();
    let n_comp = domain.component_count();
    let modes = 2 * k + 1;
    let holonomy = holonomy_forms(invs)?;
    let mut cols = Vec::new();
    for comp in 0..n_comp {
        for j in 0..modes {
            cols.push(Column::Phi { comp, mode: j });
        }
        for j in 0..modes {
            cols.push(Column::Normal { comp, mode: j });
        }
    }
    for i in 0..holonomy.len() {
        cols.push(Column::Holonomy(i));
    }
    let n = cols.len();

    let per = 8 * modes + 32;
    let (rows, rho_rows) = invariance_rows(invs, &holonomy, &cols, per)?;
    let mut a = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    // Columns at rounding level are invariant test elements; scaling them up
    // would turn noise into constraints.
    let biggest = a.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    for mut c in a.column_iter_mut() {
        if c.norm() < 1e-11 * biggest {
            c.fill(0.0);
        }
    }
    // Zero columns keep unit scale.
    let scale: Vec<f64> = normalize_columns(&mut a).into_iter().map(|s| if s > 0.0 { s } else { 1.0 }).collect();
    let (null, residual_spectrum) = null_space(&a, RANK_TOL);
    let r_a = rank(&residual_spectrum, RANK_TOL);
    // Back to coefficients of the unnormalized columns.
    let mut p_basis = null.clone();
    for (i, s) in scale.iter().enumerate() {
        for j in 0..p_basis.ncols() {
            p_basis[(i, j)] /= s;
        }
    }
    let dim_p = p_basis.ncols();

    // ω on the test space.
    let fields = column_fields(domain, invs, &holonomy, &cols, m)?;
    let big_omega = pairing_matrix(domain, &fields)?;
    let gram = p_basis.transpose() * &big_omega * &p_basis;
    let gram_svd = svd(&gram);
    let top = gram_svd.values.first().copied().unwrap_or(0.0);
    let omega_scale = svd(&big_omega).values.first().copied().unwrap_or(0.0);
    // The radical threshold is relative to ω on the full test space so that
    // an isotropic invariant subspace reports rank zero.
    let tau = RANK_TOL * omega_scale.max(top);
    let r_g = gram_svd.values.iter().filter(|&&s| s > tau).count();
    let radical = gram_svd.v.columns(r_g, dim_p - r_g).into_owned();

    // Add the holonomy directions to the radical and measure again.
    let mut l_cols: Vec<nalgebra::DVector<f64>> = radical.column_iter().map(|c| c.into_owned()).collect();
    for (i, col) in cols.iter().enumerate() {
        if let Column::Holonomy(_) = col {
            let mut e = nalgebra::DVector::zeros(n);
            e[i] = 1.0;
            // Coordinates in the null basis (orthonormal in scaled space).
            let scaled = e.component_mul(&nalgebra::DVector::from_vec(scale.clone()));
            l_cols.push(null.transpose() * scaled);
        }
    }
    let l_mat = if l_cols.is_empty() { DMatrix::zeros(dim_p, 0) } else { DMatrix::from_columns(&l_cols) };
    let l_rank = rank(&svd(&l_mat).values, RANK_TOL);
    let coupling = l_mat.transpose() * &gram;
    let c_rank = if coupling.nrows() == 0 {
        0
    } else {
        svd(&coupling).values.iter().filter(|&&s| s > tau).count()
    };
    let perp_full = dim_p - c_rank;
    let lagrangian_defect = perp_full.saturating_sub(l_rank);

    // Cross-check through periods and the kernel of ρ.
    let rho_mat = DMatrix::from_fn(rho_rows.len(), n, |i, j| rho_rows[i][j]) * &p_basis;
    let rho_rank = rank(&svd(&rho_mat).values, RANK_TOL);
    let ker_rho = dim_p - rho_rank;
    let mut sigma = DMatrix::zeros(2 * n_comp, n);
    for (j, f) in fields.iter().enumerate() {
        let pair = crate::fields::rho(domain, f)?;
        let (pa, pb) = pair.periods(domain);
        for c in 0..n_comp {
            sigma[(c, j)] = pa[c];
            sigma[(n_comp + c, j)] = pb[c];
        }
    }
    let sigma_p = sigma * &p_basis;
    // Periods are at most `T·max|α|`; compare against that scale.
    let longest = (0..n_comp).map(|c| domain.period(c)).fold(0.0, f64::max);
    let rho_top = svd(&rho_mat).values.first().copied().unwrap_or(0.0);
    let sigma_rank = svd(&sigma_p).values.iter().filter(|&&v| v > 1e-7 * longest * rho_top).count();
    let cross_check = (sigma_rank + ker_rho).saturating_sub(1);

    let gap = spectral_gap(&residual_spectrum, r_a).min(if r_g < gram_svd.values.len() {
        spectral_gap(&gram_svd.values, r_g)
    } else {
        f64::INFINITY
    });
    Ok(DefectReport {
        k,
        m,
        dim_test: n,
        dim_l_h: dim_p - r_g,
        dim_l_perp_h: dim_p,
        defect: r_g,
        lagrangian_defect,
        cross_check,
        spectrum: gram_svd.values,
        residual_spectrum,
        threshold: RANK_TOL,
        gap,
    })
}

fn column_fields(
    domain: &Domain,
    invs: &Involutions,
    holonomy: &[HolonomyForm],
    cols: &[Column],
    m: usize,
) -> Result<Vec<BoundaryField>> {
    let n_comp = domain.component_count();
    let speeds: Vec<Vec<f64>> = (0..n_comp)
        .map(|c| grid(domain.period(c), m).into_iter().map(|t| domain.frame(c, t).map(|f| f.v)).collect())
        .collect::<Result<_>>()?;
    let mut hol_fields = Vec::new();
    for h in holonomy {
        hol_fields.push(holonomy_field(invs, h, m)?);
    }
    let mut out = Vec::with_capacity(cols.len());
    for &col in cols {
        let field = match col {
            Column::Phi { comp, mode: j } => {
                let mut phi = vec![vec![0.0; m]; n_comp];
                let mut dphi = vec![vec![0.0; m]; n_comp];
                for (i, t) in grid(domain.period(comp), m).into_iter().enumerate() {
                    let (v, d) = mode(j, domain.period(comp), t);
                    phi[comp][i] = v;
                    dphi[comp][i] = d;
                }
                BoundaryField::new(phi, vec![vec![0.0; m]; n_comp])?.with_derivative(dphi)?
            }
            Column::Normal { comp, mode: j } => {
                let mut phi_n = vec![vec![0.0; m]; n_comp];
                for (i, t) in grid(domain.period(comp), m).into_iter().enumerate() {
                    phi_n[comp][i] = mode(j, domain.period(comp), t).0 / speeds[comp][i];
                }
                BoundaryField::new(vec![vec![0.0; m]; n_comp], phi_n)?.with_derivative(vec![vec![0.0; m]; n_comp])?
            }
            Column::Holonomy(i) => hol_fields[i].clone(),
        };
        out.push(field);
    }
    Ok(out)
}

/// Affine conformal maps of the Minkowski plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConformalMap {
    Translation { dx: f64, dy: f64 },
    /// Lorentz boost of the given rapidity.
    Boost { rapidity: f64 },
    Scaling { lambda: f64 },
    General(Affine),
}

impl ConformalMap {
    pub fn affine(&self) -> Affine {
        match *self {
            ConformalMap::Translation { dx, dy } => Affine { m: [[1.0, 0.0], [0.0, 1.0]], b: [dx, dy] },
            ConformalMap::Boost { rapidity } => {
                let (c, s) = (rapidity.cosh(), rapidity.sinh());
                Affine { m: [[c, s], [s, c]], b: [0.0, 0.0] }
            }
            ConformalMap::Scaling { lambda } => Affine { m: [[lambda, 0.0], [0.0, lambda]], b: [0.0, 0.0] },
            ConformalMap::General(a) => a,
        }
    }

    /// `Lᵀ η L = c η` with `c > 0`, and orientation preserved.
    pub fn validate(&self) -> Result<Affine> {
        let a = self.affine();
        let m = a.m;
        let g00 = m[0][0] * m[0][0] - m[1][0] * m[1][0];
        let g11 = m[0][1] * m[0][1] - m[1][1] * m[1][1];
        let g01 = m[0][0] * m[0][1] - m[1][0] * m[1][1];
        let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).powi(2).max(1e-300);
        if !(g00 > 0.0) || (g00 + g11).abs() > 1e-12 * scale || g01.abs() > 1e-12 * scale || a.det() <= 0.0 {
            return Err(Error::NonConformal);
        }
        Ok(a)
    }
}

/// Push a domain and a field forward. `φ` is transported by composition and
/// `φ_n` is recomputed along the new Euclidean normal from the transported
/// gradient.
pub fn conformal_push(map: &ConformalMap, domain: &Domain, u: &BoundaryField) -> Result<(Domain, BoundaryField)> {
    let a = map.validate()?;
    let pushed = domain.mapped(&a)?;
    let m = a.m;
    let det = a.det();
    // Inverse transpose of the linear part.
    let it = [[m[1][1] / det, -m[1][0] / det], [-m[0][1] / det, m[0][0] / det]];
    let mut phi_n = Vec::new();
    for c in 0..u.components() {
        let d = u.derivative(domain, c);
        let mut row = Vec::with_capacity(u.len(c));
        for (j, t) in grid(domain.period(c), u.len(c)).into_iter().enumerate() {
            let f = domain.frame(c, t)?;
            let n = f.normal();
            let tan = f.tangent;
            let v2 = f.v * f.v;
            let grad = [
                u.phi_n[c][j] * n[0] + d[j] * tan[0] / v2,
                u.phi_n[c][j] * n[1] + d[j] * tan[1] / v2,
            ];
            let new_grad = [it[0][0] * grad[0] + it[0][1] * grad[1], it[1][0] * grad[0] + it[1][1] * grad[1]];
            let nf = pushed.frame(c, t)?;
            let nn = nf.normal();
            row.push(new_grad[0] * nn[0] + new_grad[1] * nn[1]);
        }
        phi_n.push(row);
    }
    let mut out = BoundaryField::new(u.phi.clone(), phi_n)?;
    if u.has_exact_derivative() {
        out = out.with_derivative((0..u.components()).map(|c| u.derivative(domain, c)).collect())?;
    }
    Ok((pushed, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_cross_pairing() {
        let d = Domain::disk(1.0);
        let u = BoundaryField::sample(&d, 256, |p| (p.t.cos(), 0.0));
        let w = BoundaryField::sample(&d, 256, |p| (0.0, p.t.cos()));
        let v = omega(&d, &u, &w).unwrap();
        assert!((v + core::f64::consts::FRAC_PI_2).abs() < 1e-12, "{}", v);
        assert!(omega(&d, &u, &u).unwrap().abs() < 1e-14);
    }

    #[test]
    fn disk_basis_is_isotropic() {
        let d = Domain::disk(1.0);
        let invs = Involutions::new(&d).unwrap();
        let basis = polynomial_l_basis(&invs, 8, 256).unwrap();
        assert!(isotropy_residual(&d, &basis).unwrap() < 1e-8);
    }

    #[test]
    fn conformal_checks() {
        assert!(ConformalMap::General(Affine { m: [[1.0, 0.0], [0.0, 2.0]], b: [0.0, 0.0] }).validate().is_err());
        assert!(ConformalMap::Boost { rapidity: 0.5 }.validate().is_ok());
        let d = Domain::disk(1.0);
        let u = BoundaryField::sample(&d, 128, |p| (p.t.sin(), p.t.cos()));
        let (d2, u2) = conformal_push(&ConformalMap::Translation { dx: 0.0, dy: 0.0 }, &d, &u).unwrap();
        for t in grid(TAU, 16) {
            let p = BoundaryPoint::new(0, t);
            assert!(crate::geometry::norm(crate::geometry::sub(d2.position(p), d.position(p))) < 1e-15);
        }
        assert!(u2.combine(1.0, &u, -1.0).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn disk_defect_zero() {
        let r = truncated_reduction(&Domain::disk(1.0), 4, 256).unwrap();
        assert_eq!(r.defect, 0, "{:?}", r);
        assert_eq!(r.lagrangian_defect, 0);
        assert_eq!(r.cross_check, 0);
        // 2K + 1 polynomial solutions of degree ≤ K, plus one of degree K + 1
        // that vanishes on the unit circle (x² + y² − 1 for K = 1).
        assert_eq!(r.dim_l_h, 10);
    }

    #[test]
    fn annulus_defect_two() {
        let r = truncated_reduction(&Domain::annulus(1.0, 2.0), 6, 512).unwrap();
        assert_eq!(r.defect, 2, "{:?}", r);
        assert_eq!(r.lagrangian_defect, 0);
        assert_eq!(r.cross_check, 2);
        assert!(r.gap > 1e4);
    }
}
