//! Boundary fields `(φ, φ_n)`, the characteristic 1-forms `(α, β)`, elements
//! of the evolution relation, interior reconstruction and holonomy forms.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::characteristics::{InvolutionMap, Tracer};
use crate::geometry::{light_points, norm, null_direction, sub, Domain, LightPoint, Vec2};
use crate::num::{gauss_legendre, grid, periodic_integral, wrap_centered, Trig, Window};
use crate::{BoundaryPoint, Error, Result, Sign};

/// `(φ, φ_n)` sampled on uniform grids, one per component. `φ_n` is the
/// derivative along the outward Euclidean unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryField {
    pub phi: Vec<Vec<f64>>,
    pub phi_n: Vec<Vec<f64>>,
    /// Exact `∂_t φ` when known; otherwise it is obtained spectrally.
    dphi: Option<Vec<Vec<f64>>>,
}

impl BoundaryField {
    pub fn new(phi: Vec<Vec<f64>>, phi_n: Vec<Vec<f64>>) -> Result<BoundaryField> {
        if phi.len() != phi_n.len() || phi.iter().zip(&phi_n).any(|(a, b)| a.len() != b.len() || a.is_empty()) {
            return Err(Error::GridMismatch);
        }
        Ok(BoundaryField { phi, phi_n, dphi: None })
    }

    pub fn zeros(domain: &Domain, m: usize) -> BoundaryField {
        let z = vec![vec![0.0; m]; domain.component_count()];
        BoundaryField { phi: z.clone(), phi_n: z, dphi: None }
    }

    /// Sample `p ↦ (φ, φ_n)` on `m` points per component.
    pub fn sample<F: Fn(BoundaryPoint) -> (f64, f64)>(domain: &Domain, m: usize, f: F) -> BoundaryField {
        let mut phi = Vec::new();
        let mut phi_n = Vec::new();
        for c in 0..domain.component_count() {
            let (a, b): (Vec<f64>, Vec<f64>) =
                grid(domain.period(c), m).into_iter().map(|t| f(BoundaryPoint::new(c, t))).unzip();
            phi.push(a);
            phi_n.push(b);
        }
        BoundaryField { phi, phi_n, dphi: None }
    }

    pub fn with_derivative(mut self, dphi: Vec<Vec<f64>>) -> Result<BoundaryField> {
        if dphi.len() != self.phi.len() || dphi.iter().zip(&self.phi).any(|(a, b)| a.len() != b.len()) {
            return Err(Error::GridMismatch);
        }
        self.dphi = Some(dphi);
        Ok(self)
    }

    pub fn components(&self) -> usize {
        self.phi.len()
    }

    pub fn len(&self, c: usize) -> usize {
        self.phi[c].len()
    }

    pub fn same_grid(&self, other: &BoundaryField) -> bool {
        self.phi.len() == other.phi.len() && self.phi.iter().zip(&other.phi).all(|(a, b)| a.len() == b.len())
    }

    /// `∂_t φ` on component `c`.
    pub fn derivative(&self, domain: &Domain, c: usize) -> Vec<f64> {
        match &self.dphi {
            Some(d) => d[c].clone(),
            None => Trig::from_samples(&self.phi[c], domain.period(c)).derivative_samples(self.phi[c].len()),
        }
    }

    pub fn has_exact_derivative(&self) -> bool {
        self.dphi.is_some()
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &BoundaryField, b: f64) -> Result<BoundaryField> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let mix = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            x.iter().zip(y).map(|(u, v)| u.iter().zip(v).map(|(p, q)| a * p + b * q).collect()).collect()
        };
        let dphi = match (&self.dphi, &other.dphi) {
            (Some(x), Some(y)) => Some(mix(x, y)),
            _ => None,
        };
        Ok(BoundaryField { phi: mix(&self.phi, &other.phi), phi_n: mix(&self.phi_n, &other.phi_n), dphi })
    }

    pub fn scaled(&self, a: f64) -> BoundaryField {
        let sc = |x: &Vec<Vec<f64>>| -> Vec<Vec<f64>> { x.iter().map(|u| u.iter().map(|p| a * p).collect()).collect() };
        BoundaryField { phi: sc(&self.phi), phi_n: sc(&self.phi_n), dphi: self.dphi.as_ref().map(sc) }
    }

    /// Largest absolute sample over both channels.
    pub fn max_abs(&self) -> f64 {
        self.phi.iter().chain(&self.phi_n).flatten().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

/// `(α, β)` as densities against `dt`, one grid per component.
#[derive(Clone, Debug, PartialEq)]
pub struct OneFormPair {
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
}

impl OneFormPair {
    pub fn zeros(domain: &Domain, m: usize) -> OneFormPair {
        let z = vec![vec![0.0; m]; domain.component_count()];
        OneFormPair { alpha: z.clone(), beta: z }
    }

    /// Periods `(∮ α, ∮ β)` around each component.
    pub fn periods(&self, domain: &Domain) -> (Vec<f64>, Vec<f64>) {
        let per = |x: &Vec<Vec<f64>>| -> Vec<f64> {
            x.iter().enumerate().map(|(c, v)| periodic_integral(v, domain.period(c))).collect()
        };
        (per(&self.alpha), per(&self.beta))
    }
}

/// Both involutions of a domain, sharing one tracer.
#[derive(Clone, Debug)]
pub struct Involutions {
    pub minus: InvolutionMap,
    pub plus: InvolutionMap,
}

impl Involutions {
    pub fn new(domain: &Domain) -> Result<Involutions> {
        let tracer = Tracer::new(domain);
        Ok(Involutions {
            minus: InvolutionMap::with_tracer(tracer.clone(), Sign::Minus)?,
            plus: InvolutionMap::with_tracer(tracer, Sign::Plus)?,
        })
    }

    pub fn get(&self, sign: Sign) -> &InvolutionMap {
        match sign {
            Sign::Minus => &self.minus,
            Sign::Plus => &self.plus,
        }
    }

    pub fn domain(&self) -> &Domain {
        self.minus.domain()
    }

    pub fn tracer(&self) -> &Tracer {
        self.minus.tracer()
    }
}

/// `½(h + h∘E)` on `m` points per component. Inside the exclusion zone of a
/// tangency the two one-sided values are averaged.
pub fn project_invariant<H: Fn(BoundaryPoint) -> f64>(map: &InvolutionMap, h: H, m: usize) -> Result<Vec<Vec<f64>>> {
    let domain = map.domain();
    let mut out = Vec::new();
    for c in 0..domain.component_count() {
        let period = domain.period(c);
        let mut row = Vec::with_capacity(m);
        for t in grid(period, m) {
            let p = BoundaryPoint::new(c, t);
            let sym = |p: BoundaryPoint| -> Result<f64> { Ok(0.5 * (h(p) + h(map.apply(p)?))) };
            let v = match sym(p) {
                Ok(v) => v,
                Err(Error::StartOnLightPoint) => {
                    let d = 2.0 * crate::characteristics::EXCLUSION * period;
                    0.5 * (sym(BoundaryPoint::new(c, t - d))? + sym(BoundaryPoint::new(c, t + d))?)
                }
                Err(e) => return Err(e),
            };
            row.push(v);
        }
        out.push(row);
    }
    Ok(out)
}

/// Largest `|h(E p) − h(p)|` relative to `max(1, max|h|)`, sampled away from
/// the exceptional set.
pub fn invariance_residual<H: Fn(BoundaryPoint) -> f64>(map: &InvolutionMap, h: H, samples: usize) -> Result<f64> {
    let domain = map.domain();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for c in 0..domain.component_count() {
        let period = domain.period(c);
        for j in 0..samples {
            let p = BoundaryPoint::new(c, period * (j as f64 + 0.37) / samples as f64);
            if map.distance_to_exceptional(p) < 1e-3 * period {
                continue;
            }
            let hp = h(p);
            scale = scale.max(hp.abs());
            worst = worst.max((h(map.apply(p)?) - hp).abs());
        }
    }
    Ok(worst / scale)
}

/// `(ẋ+ẏ, ẏ−ẋ)` and the speed at `t`.
fn cone_speeds(domain: &Domain, c: usize, t: f64) -> ([f64; 2], f64) {
    let d = domain.curve(c).jet(t).d1;
    ([d[0] + d[1], d[1] - d[0]], d[0].hypot(d[1]))
}

/// Window (relative to the period) inside which the light-point quotient is
/// evaluated through divided differences.
const LIGHT_WINDOW: f64 = 1e-3;
const LIGHT_CORE: f64 = 1e-6;
/// Largest allowed singular residue `|α(t_L)|` relative to `max|α|`.
pub const LIGHT_TOL: f64 = 1e-6;
/// Residues below this are rounding noise of an identically vanishing form.
const LIGHT_FLOOR: f64 = 1e-12;

/// `A(t) = a(t)/s(t)` where `s` vanishes simply at `t_l` and `a` should too.
fn light_quotient(a: &Trig, da: &Trig, dda: &Trig, s: impl Fn(f64) -> (f64, f64, f64), t: f64, t_l: f64, period: f64) -> f64 {
    let delta = wrap_centered(t - t_l, period);
    let (s_t, _, _) = s(t);
    if delta.abs() >= LIGHT_WINDOW * period {
        return a.eval(t) / s_t;
    }
    let (s_l, ds_l, dds_l) = s(t_l);
    if delta.abs() < LIGHT_CORE * period {
        let num = da.eval(t_l) + 0.5 * dda.eval(t_l) * delta;
        let den = ds_l + 0.5 * dds_l * delta;
        return num / den;
    }
    (a.eval(t) - a.eval(t_l)) / (s_t - s_l)
}

/// `φ_n = (q·α/p − p·β/q)/v` with `p = ẋ+ẏ`, `q = ẏ−ẋ`: the same as
/// `−(1/v)(cot(θ−π/4)α + cot(θ+π/4)β)`, with the quotients at light points
/// resolved by their limits.
pub fn normal_from_forms(domain: &Domain, c: usize, lights: &[LightPoint], alpha: &Trig, beta: &Trig, m: usize) -> Result<Vec<f64>> {
    let period = domain.period(c);
    let ders = [
        (alpha.derivative_trig(), alpha.derivative_trig().derivative_trig()),
        (beta.derivative_trig(), beta.derivative_trig().derivative_trig()),
    ];
    let forms = [alpha, beta];
    let samples = grid(period, m);
    let mut scale = [0.0f64; 2];
    for (k, f) in forms.iter().enumerate() {
        scale[k] = samples.iter().fold(0.0f64, |acc, &t| acc.max(f.eval(t).abs()));
    }
    let ours: Vec<&LightPoint> = lights.iter().filter(|l| l.component == c).collect();
    for l in &ours {
        let k = if l.sign == Sign::Minus { 0 } else { 1 };
        let residue = forms[k].eval(l.t).abs();
        let gap = residue / scale[k].max(f64::MIN_POSITIVE);
        if residue > LIGHT_FLOOR && gap > LIGHT_TOL {
            return Err(Error::LightLimitDisagreement { component: c, t: l.t, gap });
        }
    }
    // Cone speed (k = 0: ẋ+ẏ, k = 1: ẏ−ẋ) with its first two derivatives;
    // the second by a central difference of the acceleration.
    let speed = |k: usize| {
        move |t: f64| -> (f64, f64, f64) {
            let pick = |v: [f64; 2]| if k == 0 { v[0] + v[1] } else { v[1] - v[0] };
            let j = domain.curve(c).jet(t);
            let h = 1e-4 * period;
            let ahead = pick(domain.curve(c).jet(t + h).d2);
            let behind = pick(domain.curve(c).jet(t - h).d2);
            (pick(j.d1), pick(j.d2), (ahead - behind) / (2.0 * h))
        }
    };
    let mut out = Vec::with_capacity(m);
    for &t in &samples {
        let (ps, v) = cone_speeds(domain, c, t);
        let mut quot = [0.0; 2];
        for k in 0..2 {
            let sign = if k == 0 { Sign::Minus } else { Sign::Plus };
            let near = ours
                .iter()
                .filter(|l| l.sign == sign)
                .min_by(|a, b| {
                    let da = wrap_centered(a.t - t, period).abs();
                    let db = wrap_centered(b.t - t, period).abs();
                    da.partial_cmp(&db).unwrap_or(core::cmp::Ordering::Equal)
                })
                .map(|l| l.t);
            quot[k] = match near {
                Some(t_l) => light_quotient(forms[k], &ders[k].0, &ders[k].1, speed(k), t, t_l, period),
                None => forms[k].eval(t) / ps[k],
            };
        }
        out.push((ps[1] * quot[0] - ps[0] * quot[1]) / v);
    }
    Ok(out)
}

fn light_points_or_none(domain: &Domain) -> Result<Vec<LightPoint>> {
    if domain.is_misner() {
        return Err(Error::InvalidInput("boundary fields need a plane domain".into()));
    }
    light_points(domain)
}

/// The element of `L` generated by an `E₋`-invariant `f` and an
/// `E₊`-invariant `g`: `φ = f + g` with the normal derivative of the solution
/// `F(σ₊) + G(σ₋)`.
pub fn make_l_field<F, G>(invs: &Involutions, f: F, g: G, m: usize) -> Result<BoundaryField>
where
    F: Fn(BoundaryPoint) -> f64,
    G: Fn(BoundaryPoint) -> f64,
{
    for (map, h) in [(&invs.minus, &f as &dyn Fn(BoundaryPoint) -> f64), (&invs.plus, &g as &dyn Fn(BoundaryPoint) -> f64)] {
        let r = invariance_residual(map, h, 64)?;
        if r > 1e-6 {
            return Err(Error::NotInvariant { residual: r });
        }
    }
    let domain = invs.domain();
    let lights = light_points_or_none(domain)?;
    let mut phi = Vec::new();
    let mut phi_n = Vec::new();
    let mut dphi = Vec::new();
    for c in 0..domain.component_count() {
        let period = domain.period(c);
        let ts = grid(period, m);
        let fs: Vec<f64> = ts.iter().map(|&t| f(BoundaryPoint::new(c, t))).collect();
        let gs: Vec<f64> = ts.iter().map(|&t| g(BoundaryPoint::new(c, t))).collect();
        let alpha = Trig::from_samples(&fs, period).derivative_trig();
        let beta = Trig::from_samples(&gs, period).derivative_trig();
        phi_n.push(normal_from_forms(domain, c, &lights, &alpha, &beta, m)?);
        phi.push(fs.iter().zip(&gs).map(|(a, b)| a + b).collect());
        dphi.push(ts.iter().map(|&t| alpha.eval(t) + beta.eval(t)).collect());
    }
    BoundaryField::new(phi, phi_n)?.with_derivative(dphi)
}

/// `α = ½((1 − sin 2θ)∂_tφ + v cos 2θ φ_n)`, `β = ½((1 + sin 2θ)∂_tφ − v cos 2θ φ_n)`.
pub fn rho(domain: &Domain, u: &BoundaryField) -> Result<OneFormPair> {
    if u.components() != domain.component_count() {
        return Err(Error::GridMismatch);
    }
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for c in 0..u.components() {
        let m = u.len(c);
        let dphi = u.derivative(domain, c);
        let mut a = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        for (j, t) in grid(domain.period(c), m).into_iter().enumerate() {
            let f = domain.frame(c, t)?;
            let normal = f.v * f.cos2 * u.phi_n[c][j];
            a.push(0.5 * ((1.0 - f.sin2) * dphi[j] + normal));
            b.push(0.5 * ((1.0 + f.sin2) * dphi[j] - normal));
        }
        alpha.push(a);
        beta.push(b);
    }
    Ok(OneFormPair { alpha, beta })
}

/// Invert [`rho`]: `φ` integrates `α + β` from the anchor value at `t = 0`.
pub fn rho_inverse(domain: &Domain, pair: &OneFormPair, anchors: &[f64]) -> Result<BoundaryField> {
    rho_inverse_with(domain, pair, anchors, 1e-8)
}

/// Exactness is checked to `tol` relative to `∮|α + β|`; the mean, if any, is
/// dropped.
fn rho_inverse_with(domain: &Domain, pair: &OneFormPair, anchors: &[f64], tol: f64) -> Result<BoundaryField> {
    let n = domain.component_count();
    if pair.alpha.len() != n || pair.beta.len() != n || anchors.len() != n {
        return Err(Error::GridMismatch);
    }
    let lights = light_points_or_none(domain)?;
    let mut phi = Vec::new();
    let mut phi_n = Vec::new();
    let mut dphi = Vec::new();
    for c in 0..n {
        let period = domain.period(c);
        let m = pair.alpha[c].len();
        if pair.beta[c].len() != m {
            return Err(Error::GridMismatch);
        }
        let sum: Vec<f64> = pair.alpha[c].iter().zip(&pair.beta[c]).map(|(a, b)| a + b).collect();
        let total = periodic_integral(&sum, period);
        let mass = periodic_integral(&sum.iter().map(|v| v.abs()).collect::<Vec<_>>(), period);
        if total.abs() > tol * mass.max(1.0) {
            return Err(Error::NonExact { component: c, period: total });
        }
        let (prim, _) = Trig::from_samples(&sum, period).antiderivative();
        phi.push(prim.samples(m).into_iter().map(|v| v + anchors[c]).collect());
        let alpha = Trig::from_samples(&pair.alpha[c], period);
        let beta = Trig::from_samples(&pair.beta[c], period);
        phi_n.push(normal_from_forms(domain, c, &lights, &alpha, &beta, m)?);
        dphi.push(sum);
    }
    BoundaryField::new(phi, phi_n)?.with_derivative(dphi)
}

/// Pointwise access to `(α, β)` densities at any boundary point.
pub trait FormEval {
    fn forms(&self, p: BoundaryPoint) -> Result<(f64, f64)>;
}

/// Spectral interpolation of a sampled [`OneFormPair`].
#[derive(Clone, Debug)]
pub struct SampledForms {
    alpha: Vec<Trig>,
    beta: Vec<Trig>,
}

impl SampledForms {
    pub fn new(domain: &Domain, pair: &OneFormPair) -> SampledForms {
        let mk = |x: &Vec<Vec<f64>>| -> Vec<Trig> {
            x.iter().enumerate().map(|(c, v)| Trig::from_samples(v, domain.period(c))).collect()
        };
        SampledForms { alpha: mk(&pair.alpha), beta: mk(&pair.beta) }
    }
}

impl FormEval for SampledForms {
    fn forms(&self, p: BoundaryPoint) -> Result<(f64, f64)> {
        Ok((self.alpha[p.component].eval(p.t), self.beta[p.component].eval(p.t)))
    }
}

/// `dφ = A₋ dσ₊ + A₊ dσ₋` at an interior point, where `A₋ = α/(ẋ+ẏ)` at an
/// endpoint of the `∂₋` chord through the point and `A₊ = β/(ẏ−ẋ)` at an
/// endpoint of the `∂₊` chord.
pub fn interior_gradient(tracer: &Tracer, forms: &dyn FormEval, z: Vec2) -> Result<(f64, f64)> {
    let domain = tracer.domain();
    let mut out = [0.0; 2];
    for (k, sign) in [Sign::Minus, Sign::Plus].into_iter().enumerate() {
        let d = null_direction(sign);
        let mut best: Option<(f64, f64)> = None;
        for dir in [1.0, -1.0] {
            let (q, _) = tracer
                .first_hit(z, [dir * d[0], dir * d[1]], None)
                .ok_or(Error::PathFailure(format!("no chord through ({}, {})", z[0], z[1])))?;
            let tan = domain.curve(q.component).jet(q.t).d1;
            let speed = if sign == Sign::Minus { tan[0] + tan[1] } else { tan[1] - tan[0] };
            let (a, b) = forms.forms(q)?;
            let val = if sign == Sign::Minus { a } else { b };
            if best.map_or(true, |(s, _)| speed.abs() > s) {
                best = Some((speed.abs(), val / speed));
            }
        }
        out[k] = best.map(|(_, v)| v).unwrap_or(0.0);
    }
    Ok((out[0], out[1]))
}

fn segment_inside(tracer: &Tracer, a: Vec2, b: Vec2) -> bool {
    (1..64).all(|j| {
        let s = j as f64 / 64.0;
        tracer.contains([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])])
    })
}

/// Integrate `dφ` along a polyline starting at `base`.
pub fn integrate_path(tracer: &Tracer, forms: &dyn FormEval, path: &[Vec2]) -> Result<f64> {
    let (x, w) = gauss_legendre(10);
    let mut total = 0.0;
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let e = sub(b, a);
        let (ds_plus, ds_minus) = (e[0] + e[1], e[1] - e[0]);
        let panels = 8usize.max((128.0 * norm(e) / tracer.domain().diameter()).ceil() as usize);
        for p in 0..panels {
            for (xi, wi) in x.iter().zip(&w) {
                let s = (p as f64 + 0.5 * (xi + 1.0)) / panels as f64;
                let z = [a[0] + s * e[0], a[1] + s * e[1]];
                let (am, ap) = interior_gradient(tracer, forms, z)?;
                total += 0.5 * wi / panels as f64 * (am * ds_plus + ap * ds_minus);
            }
        }
    }
    Ok(total)
}

fn detour(tracer: &Tracer, a: Vec2, b: Vec2, skip: Option<f64>) -> Option<Vec<Vec2>> {
    let e = sub(b, a);
    let perp = [-e[1], e[0]];
    for off in [0.15, -0.15, 0.3, -0.3, 0.6, -0.6, 1.0, -1.0] {
        if skip == Some(off) {
            continue;
        }
        let m = [a[0] + 0.5 * e[0] + off * perp[0], a[1] + 0.5 * e[1] + off * perp[1]];
        if tracer.contains(m) && segment_inside(tracer, a, m) && segment_inside(tracer, m, b) {
            return Some(vec![a, m, b]);
        }
    }
    None
}

fn path_offset(path: &[Vec2]) -> Option<f64> {
    if path.len() != 3 {
        return None;
    }
    let e = sub(path[2], path[0]);
    let m = [path[0][0] + 0.5 * e[0], path[0][1] + 0.5 * e[1]];
    let d = sub(path[1], m);
    Some((d[0] * -e[1] + d[1] * e[0]) / (e[0] * e[0] + e[1] * e[1]))
}

/// `φ(ζ) = φ(ζ₀) + ∫ dφ` from a boundary point with known value to an
/// interior point, checked on a second path.
pub fn interior_value(tracer: &Tracer, forms: &dyn FormEval, base: BoundaryPoint, base_value: f64, target: Vec2) -> Result<f64> {
    let a = tracer.domain().position(base);
    let first = if segment_inside(tracer, a, target) {
        vec![a, target]
    } else {
        detour(tracer, a, target, None).ok_or(Error::PathFailure("no interior path to the target".into()))?
    };
    let second = detour(tracer, a, target, path_offset(&first))
        .ok_or(Error::PathFailure("no second path to the target".into()))?;
    let v1 = base_value + integrate_path(tracer, forms, &first)?;
    let v2 = base_value + integrate_path(tracer, forms, &second)?;
    if (v1 - v2).abs() > 1e-7 * v1.abs().max(1.0) {
        return Err(Error::PathFailure(format!("path dependence {:e}", (v1 - v2).abs())));
    }
    Ok(v1)
}

/// Holonomy element for a hole: `κ = ψ + E₋*ψ` and `λ = −(χ + E₊*χ)`, with
/// bumps `ψ = χ` of unit mass on an arc of the hole whose `E±` images both lie
/// on `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyForm {
    pub hole: usize,
    pub target: usize,
    pub window: Window,
}

pub struct HolonomyEval<'a> {
    pub form: &'a HolonomyForm,
    pub invs: &'a Involutions,
    /// Include the `λ` part in `β`.
    pub with_lambda: bool,
}

impl HolonomyForm {
    fn pulled(&self, map: &InvolutionMap, p: BoundaryPoint) -> Result<f64> {
        let mut v = 0.0;
        if p.component == self.hole && self.window.contains(p.t) {
            v += self.window.density(p.t);
        }
        if p.component == self.target {
            let (q, dq) = match map.apply_with_derivative(p) {
                Ok(r) => r,
                Err(Error::StartOnLightPoint) => return Ok(v),
                Err(e) => return Err(e),
            };
            if q.component == self.hole && self.window.contains(q.t) {
                v += self.window.density(q.t) * dq;
            }
        }
        Ok(v)
    }

    pub fn eval(&self, invs: &Involutions, p: BoundaryPoint, with_lambda: bool) -> Result<(f64, f64)> {
        let a = self.pulled(&invs.minus, p)?;
        let b = if with_lambda { -self.pulled(&invs.plus, p)? } else { 0.0 };
        Ok((a, b))
    }

    pub fn sample(&self, invs: &Involutions, m: usize, with_lambda: bool) -> Result<OneFormPair> {
        let domain = invs.domain();
        let mut pair = OneFormPair::zeros(domain, m);
        for c in 0..domain.component_count() {
            for (j, t) in grid(domain.period(c), m).into_iter().enumerate() {
                let (a, b) = self.eval(invs, BoundaryPoint::new(c, t), with_lambda)?;
                pair.alpha[c][j] = a;
                pair.beta[c][j] = b;
            }
        }
        Ok(pair)
    }
}

impl FormEval for HolonomyEval<'_> {
    fn forms(&self, p: BoundaryPoint) -> Result<(f64, f64)> {
        self.form.eval(self.invs, p, self.with_lambda)
    }
}

/// Choose, for every hole, a bump arc whose images under both involutions lie
/// on one other component (the outer one when possible).
pub fn holonomy_forms(invs: &Involutions) -> Result<Vec<HolonomyForm>> {
    let domain = invs.domain();
    let outer = domain.outer();
    let mut out = Vec::new();
    let scan = 512;
    for hole in (0..domain.component_count()).filter(|&c| c != outer) {
        let period = domain.period(hole);
        let mut labels = Vec::with_capacity(scan);
        for j in 0..scan {
            let p = BoundaryPoint::new(hole, period * j as f64 / scan as f64);
            let margin = 0.01 * period;
            if invs.minus.distance_to_exceptional(p) < margin || invs.plus.distance_to_exceptional(p) < margin {
                labels.push(None);
                continue;
            }
            let a = invs.minus.apply(p).ok().map(|q| q.component);
            let b = invs.plus.apply(p).ok().map(|q| q.component);
            labels.push(match (a, b) {
                (Some(x), Some(y)) if x == y && x != hole => Some(x),
                _ => None,
            });
        }
        let mut best: Option<(usize, usize, usize)> = None; // (target, start, len)
        for j in 0..scan {
            let Some(target) = labels[j] else { continue };
            if labels[(j + scan - 1) % scan] == Some(target) && labels.iter().any(|l| *l != Some(target)) {
                continue;
            }
            let mut len = 0;
            while len < scan && labels[(j + len) % scan] == Some(target) {
                len += 1;
            }
            let better = match best {
                None => true,
                Some((bt, _, bl)) => (target == outer, len) > (bt == outer, bl),
            };
            if better {
                best = Some((target, j, len));
            }
        }
        let (target, start, len) = best.ok_or(Error::OrderingUnsatisfiable { component: hole })?;
        let run = period * len as f64 / scan as f64;
        let center = period * (start as f64 + 0.5 * (len as f64 - 1.0)) / scan as f64;
        let width = (0.25 * period).min(0.6 * run);
        out.push(HolonomyForm { hole, target, window: Window::new(center, width, period) });
    }
    Ok(out)
}

/// The pairs `(κ_i, 0)`, one per hole.
pub fn holonomy_basis(invs: &Involutions, m: usize) -> Result<Vec<OneFormPair>> {
    holonomy_forms(invs)?.iter().map(|h| h.sample(invs, m, false)).collect()
}

/// Chords from already anchored components to the others, two per
/// component, kept away from the exceptional sets.
fn anchor_chords(invs: &Involutions, anchored: &[bool]) -> Vec<(usize, [(BoundaryPoint, BoundaryPoint); 2])> {
    let domain = invs.domain();
    let mut found: Vec<Vec<(f64, BoundaryPoint, BoundaryPoint)>> = vec![Vec::new(); domain.component_count()];
    for c in (0..domain.component_count()).filter(|&c| anchored[c]) {
        let period = domain.period(c);
        for j in 0..128 {
            let p = BoundaryPoint::new(c, period * (j as f64 + 0.37) / 128.0);
            for map in [&invs.minus, &invs.plus] {
                let Ok(q) = map.apply(p) else { continue };
                if anchored[q.component] {
                    continue;
                }
                let margin = (map.distance_to_exceptional(p) / period)
                    .min(map.distance_to_exceptional(q) / domain.period(q.component));
                found[q.component].push((margin, p, q));
            }
        }
    }
    let mut out = Vec::new();
    for (c, mut list) in found.into_iter().enumerate() {
        if list.len() < 2 {
            continue;
        }
        list.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
        out.push((c, [(list[0].1, list[0].2), (list[1].1, list[1].2)]));
    }
    out
}

/// The element of `L` whose forms are `(κ, λ)`. Anchors on the holes come
/// from integrating `dφ` along characteristic chords, which stay inside the
/// domain, starting from the outer component.
pub fn holonomy_field(invs: &Involutions, form: &HolonomyForm, m: usize) -> Result<BoundaryField> {
    let domain = invs.domain();
    let n = domain.component_count();
    let pair = form.sample(invs, m, true)?;
    let eval = HolonomyEval { form, invs, with_lambda: true };
    let mut anchors = vec![0.0; n];
    // Pulled-back bumps can be narrow on the target, so the trapezoid periods
    // are only good to quadrature accuracy there.
    let provisional = rho_inverse_with(domain, &pair, &anchors, HOLONOMY_EXACTNESS)?;
    let mut anchored = vec![false; n];
    anchored[domain.outer()] = true;
    while anchored.iter().any(|a| !a) {
        let chords = anchor_chords(invs, &anchored);
        if chords.is_empty() {
            return Err(Error::PathFailure("no chord reaches the remaining components".into()));
        }
        for (c, pair_of) in chords {
            let mut values = [0.0; 2];
            for (k, (p, q)) in pair_of.into_iter().enumerate() {
                let start = field_value(domain, &provisional, p) + anchors[p.component];
                let rise = integrate_path(invs.tracer(), &eval, &[domain.position(p), domain.position(q)])?;
                values[k] = start + rise - field_value(domain, &provisional, q);
            }
            if (values[0] - values[1]).abs() > 1e-7 * values[0].abs().max(1.0) {
                return Err(Error::PathFailure(format!("chord anchors disagree by {:e}", (values[0] - values[1]).abs())));
            }
            anchors[c] = 0.5 * (values[0] + values[1]);
            anchored[c] = true;
        }
    }
    rho_inverse_with(domain, &pair, &anchors, HOLONOMY_EXACTNESS)
}

const HOLONOMY_EXACTNESS: f64 = 1e-6;

/// Interpolated `φ` at a boundary point.
pub fn field_value(domain: &Domain, u: &BoundaryField, p: BoundaryPoint) -> f64 {
    Trig::from_samples(&u.phi[p.component], domain.period(p.component)).eval(p.t)
}
