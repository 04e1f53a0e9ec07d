//! Boundary curves, domains and metrics; frames, light-like points and the
//! boundary data `(Γ, u, μ)` induced by a transversal vector field.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::num::{bisect, wrap, TAU};
use crate::{BoundaryPoint, Error, Result, Sign};

pub type Vec2 = [f64; 2];

pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

/// Light-cone coordinates `(σ₊, σ₋) = (y + x, y − x)`.
pub fn light_cone(p: Vec2) -> (f64, f64) {
    (p[1] + p[0], p[1] - p[0])
}

/// Null direction `½(∂_y ± ∂_x)` as a plane vector.
pub fn null_direction(sign: Sign) -> Vec2 {
    match sign {
        Sign::Plus => [0.5, 0.5],
        Sign::Minus => [-0.5, 0.5],
    }
}

/// Shapes a boundary component can take.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Circle { r: f64, center: Vec2 },
    Ellipse { a: f64, b: f64, center: Vec2 },
    /// `x(t) = cx[0] + Σ_k cx[2k−1] cos(kωt) + cx[2k] sin(kωt)`, `ω = 2π/period`,
    /// and the same for `y`.
    Fourier { cx: Vec<f64>, cy: Vec<f64>, period: f64 },
    /// Four null edges `a → b → c → d` in light-cone coordinates, `t ∈ [0, 4)`.
    Diamond { sp: [f64; 2], sm: [f64; 2] },
}

/// Affine map `p ↦ m·p + b` applied after the base shape.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub m: [[f64; 2]; 2],
    pub b: Vec2,
}

impl Affine {
    pub fn apply(&self, p: Vec2) -> Vec2 {
        let v = self.apply_linear(p);
        [v[0] + self.b[0], v[1] + self.b[1]]
    }

    pub fn apply_linear(&self, v: Vec2) -> Vec2 {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Affine) -> Affine {
        let a = &self.m;
        let b = &inner.m;
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        Affine { m, b: self.apply(inner.b) }
    }
}

/// Position with first and second parameter derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub p: Vec2,
    pub d1: Vec2,
    pub d2: Vec2,
}

/// Local frame data at a boundary parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub position: Vec2,
    pub tangent: Vec2,
    /// Angle of the outward normal, reduced to `[0, π)`.
    pub theta: f64,
    /// Speed `|ṙ|`.
    pub v: f64,
    /// Signed curvature of the curve as parametrized.
    pub kappa: f64,
    pub cos2: f64,
    pub sin2: f64,
}

impl Frame {
    /// Euclidean unit normal to the right of the tangent (outward for the
    /// boundary orientation of the domain).
    pub fn normal(&self) -> Vec2 {
        [self.tangent[1] / self.v, -self.tangent[0] / self.v]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamCurve {
    shape: Shape,
    reversed: bool,
    map: Option<Affine>,
}

impl ParamCurve {
    pub fn new(shape: Shape) -> ParamCurve {
        ParamCurve { shape, reversed: false, map: None }
    }

    pub fn circle(r: f64, center: Vec2) -> ParamCurve {
        ParamCurve::new(Shape::Circle { r, center })
    }

    pub fn ellipse(a: f64, b: f64) -> ParamCurve {
        ParamCurve::new(Shape::Ellipse { a, b, center: [0.0, 0.0] })
    }

    pub fn fourier(cx: Vec<f64>, cy: Vec<f64>, period: f64) -> ParamCurve {
        ParamCurve::new(Shape::Fourier { cx, cy, period })
    }

    pub fn diamond(sp: [f64; 2], sm: [f64; 2]) -> ParamCurve {
        ParamCurve::new(Shape::Diamond { sp, sm })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn affine(&self) -> Option<&Affine> {
        self.map.as_ref()
    }

    pub fn reversed(mut self) -> ParamCurve {
        self.reversed = !self.reversed;
        self
    }

    /// The curve pushed forward by an affine map.
    pub fn mapped(&self, map: &Affine) -> ParamCurve {
        let composed = match &self.map {
            Some(inner) => map.compose(inner),
            None => *map,
        };
        ParamCurve { shape: self.shape.clone(), reversed: self.reversed, map: Some(composed) }
    }

    pub fn period(&self) -> f64 {
        match &self.shape {
            Shape::Circle { .. } | Shape::Ellipse { .. } => TAU,
            Shape::Fourier { period, .. } => *period,
            Shape::Diamond { .. } => 4.0,
        }
    }

    fn base_jet(&self, t: f64) -> Jet {
        match &self.shape {
            Shape::Circle { r, center } => {
                let (s, c) = t.sin_cos();
                Jet {
                    p: [center[0] + r * c, center[1] + r * s],
                    d1: [-r * s, r * c],
                    d2: [-r * c, -r * s],
                }
            }
            Shape::Ellipse { a, b, center } => {
                let (s, c) = t.sin_cos();
                Jet {
                    p: [center[0] + a * c, center[1] + b * s],
                    d1: [-a * s, b * c],
                    d2: [-a * c, -b * s],
                }
            }
            Shape::Fourier { cx, cy, period } => {
                let w = TAU / period;
                let (x, dx, ddx) = fourier_series(cx, w, t);
                let (y, dy, ddy) = fourier_series(cy, w, t);
                Jet { p: [x, y], d1: [dx, dy], d2: [ddx, ddy] }
            }
            Shape::Diamond { sp, sm } => {
                let verts = diamond_vertices(*sp, *sm);
                let tt = wrap(t, 4.0);
                let k = (tt.floor() as usize).min(3);
                let s = tt - k as f64;
                let a = verts[k];
                let b = verts[(k + 1) % 4];
                let d = sub(b, a);
                Jet { p: [a[0] + s * d[0], a[1] + s * d[1]], d1: d, d2: [0.0, 0.0] }
            }
        }
    }

    pub fn jet(&self, t: f64) -> Jet {
        let mut j = if self.reversed {
            let b = self.base_jet(-t);
            Jet { p: b.p, d1: [-b.d1[0], -b.d1[1]], d2: b.d2 }
        } else {
            self.base_jet(t)
        };
        if let Some(map) = &self.map {
            j = Jet { p: map.apply(j.p), d1: map.apply_linear(j.d1), d2: map.apply_linear(j.d2) };
        }
        j
    }

    pub fn position(&self, t: f64) -> Vec2 {
        self.jet(t).p
    }

    pub fn frame(&self, t: f64) -> Result<Frame> {
        let j = self.jet(t);
        let v = norm(j.d1);
        if !(v > 1e-12) {
            return Err(Error::IrregularPoint { component: 0, t });
        }
        Ok(frame_from_jet(&j))
    }

    /// `cos 2θ`, whose zeros are the light-like points.
    pub fn light_function(&self, t: f64) -> f64 {
        let d = self.jet(t).d1;
        (d[1] * d[1] - d[0] * d[0]) / (d[0] * d[0] + d[1] * d[1])
    }

    /// Polygon through `n` uniform parameter samples.
    pub fn polygon(&self, n: usize) -> Vec<Vec2> {
        let period = self.period();
        (0..n).map(|j| self.position(period * j as f64 / n as f64)).collect()
    }

    pub fn signed_area(&self, n: usize) -> f64 {
        let poly = self.polygon(n);
        let mut a = 0.0;
        for j in 0..n {
            a += cross(poly[j], poly[(j + 1) % n]);
        }
        0.5 * a
    }
}

pub fn frame_from_jet(j: &Jet) -> Frame {
    let d = j.d1;
    let v2 = dot(d, d);
    let v = v2.sqrt();
    let mut theta = d[1].atan2(d[0]) + 0.5 * PI;
    theta = wrap(theta, PI);
    let kappa = cross(d, j.d2) / (v2 * v);
    Frame {
        position: j.p,
        tangent: d,
        theta,
        v,
        kappa,
        cos2: (d[1] * d[1] - d[0] * d[0]) / v2,
        sin2: -2.0 * d[0] * d[1] / v2,
    }
}

fn fourier_series(c: &[f64], w: f64, t: f64) -> (f64, f64, f64) {
    let mut v = c.first().copied().unwrap_or(0.0);
    let mut d = 0.0;
    let mut dd = 0.0;
    let mut k = 1;
    while 2 * k - 1 < c.len() {
        let a = c[2 * k - 1];
        let b = c.get(2 * k).copied().unwrap_or(0.0);
        let kw = k as f64 * w;
        let (s, co) = (kw * t).sin_cos();
        v += a * co + b * s;
        d += kw * (-a * s + b * co);
        dd += -kw * kw * (a * co + b * s);
        k += 1;
    }
    (v, d, dd)
}

/// Vertices `a, b, c, d` of a null diamond in plane coordinates.
pub fn diamond_vertices(sp: [f64; 2], sm: [f64; 2]) -> [Vec2; 4] {
    let p = |s_plus: f64, s_minus: f64| [0.5 * (s_plus - s_minus), 0.5 * (s_plus + s_minus)];
    [p(sp[0], sm[0]), p(sp[1], sm[0]), p(sp[1], sm[1]), p(sp[0], sm[1])]
}

/// Lorentzian metric on the plane chart.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    /// `dx² − dy²`.
    Minkowski,
    /// `Ω(x, y)·(dx² − dy²)`, with `Ω = Σ poly[i][j] xⁱ yʲ`.
    Conformal { poly: Vec<Vec<f64>> },
    /// `dx dy − y dx²` on the cylinder `x ∈ S¹, y ∈ [−1, 1]`.
    Misner,
}

impl Metric {
    pub fn conformal_factor(&self, p: Vec2) -> f64 {
        match self {
            Metric::Conformal { poly } => {
                let mut s = 0.0;
                let mut xi = 1.0;
                for row in poly {
                    let mut yj = 1.0;
                    for c in row {
                        s += c * xi * yj;
                        yj *= p[1];
                    }
                    xi *= p[0];
                }
                s
            }
            _ => 1.0,
        }
    }

    /// Components `[[g_xx, g_xy], [g_xy, g_yy]]`.
    pub fn tensor(&self, p: Vec2) -> [[f64; 2]; 2] {
        match self {
            Metric::Minkowski => [[1.0, 0.0], [0.0, -1.0]],
            Metric::Conformal { .. } => {
                let w = self.conformal_factor(p);
                [[w, 0.0], [0.0, -w]]
            }
            Metric::Misner => [[-p[1], 0.5], [0.5, 0.0]],
        }
    }

    pub fn is_lorentzian_at(&self, p: Vec2) -> bool {
        let g = self.tensor(p);
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let positive_factor = match self {
            Metric::Conformal { .. } => self.conformal_factor(p) > 0.0,
            _ => true,
        };
        det < 0.0 && positive_factor
    }

    /// True when null directions are the Minkowski ones.
    pub fn is_flat_cone(&self) -> bool {
        !matches!(self, Metric::Misner)
    }
}

/// The geometric triple induced on the boundary by a transversal field:
/// `Γ = g⁻¹(n*, n*)`, the tangential field `u` as a coefficient of `∂_t`, and
/// the density `μ = ι_n vol` against `dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryData {
    pub gamma: f64,
    pub u: f64,
    pub mu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormalChoice {
    /// Outward Euclidean unit normal.
    Euclidean,
    /// A given transversal vector at the point.
    Custom(Vec2),
}

/// Boundary data for the transversal `normal` at a point with tangent `tangent`.
pub fn boundary_data_at(metric: &Metric, point: Vec2, tangent: Vec2, normal: Vec2) -> Result<BoundaryData> {
    let denom = cross(tangent, normal);
    let scale = norm(tangent) * norm(normal);
    if !(denom.abs() > 1e-12 * scale) {
        return Err(Error::NormalTangent);
    }
    // n* annihilates the tangent and pairs to one with the normal.
    let nstar = [-tangent[1] / denom, tangent[0] / denom];
    let g = metric.tensor(point);
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let ginv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
    let raised = [
        ginv[0][0] * nstar[0] + ginv[0][1] * nstar[1],
        ginv[1][0] * nstar[0] + ginv[1][1] * nstar[1],
    ];
    let gamma = dot(raised, nstar);
    let uvec = [raised[0] - gamma * normal[0], raised[1] - gamma * normal[1]];
    let u = dot(uvec, tangent) / dot(tangent, tangent);
    let mu = det.abs().sqrt() * cross(normal, tangent);
    Ok(BoundaryData { gamma, u, mu })
}

/// A compact domain: oriented boundary components and a metric.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    curves: Vec<ParamCurve>,
    outer: usize,
    metric: Metric,
    diameter: f64,
}

const VALIDATION_SAMPLES: usize = 512;

impl Domain {
    /// Validate and orient a domain. The outer component is made
    /// counterclockwise and holes clockwise.
    pub fn new(curves: Vec<ParamCurve>, outer: usize, metric: Metric) -> Result<Domain> {
        if matches!(metric, Metric::Misner) {
            return Ok(Domain::misner());
        }
        if curves.is_empty() || outer >= curves.len() {
            return Err(Error::InvalidInput(format!(
                "outer index {} out of range for {} curves",
                outer,
                curves.len()
            )));
        }
        let mut oriented = Vec::with_capacity(curves.len());
        for (i, c) in curves.into_iter().enumerate() {
            if !(c.period() > 0.0) {
                return Err(Error::InvalidInput(format!("curve {} has non-positive period", i)));
            }
            let area = c.signed_area(VALIDATION_SAMPLES);
            if area == 0.0 || !area.is_finite() {
                return Err(Error::InvalidInput(format!("curve {} encloses no area", i)));
            }
            let want_ccw = i == outer;
            oriented.push(if (area > 0.0) == want_ccw { c } else { c.reversed() });
        }
        for (i, c) in oriented.iter().enumerate() {
            let period = c.period();
            for j in 0..VALIDATION_SAMPLES {
                let t = period * j as f64 / VALIDATION_SAMPLES as f64;
                if norm(c.jet(t).d1) <= 1e-12 {
                    return Err(Error::IrregularPoint { component: i, t });
                }
            }
        }
        let polys: Vec<Vec<Vec2>> = oriented.iter().map(|c| c.polygon(VALIDATION_SAMPLES)).collect();
        check_simple(&polys, &oriented)?;
        let (lo, hi) = bounding_box(&polys);
        for a in 0..=16 {
            for b in 0..=16 {
                let p = [
                    lo[0] + (hi[0] - lo[0]) * a as f64 / 16.0,
                    lo[1] + (hi[1] - lo[1]) * b as f64 / 16.0,
                ];
                if !metric.is_lorentzian_at(p) {
                    return Err(Error::MetricNotLorentzian { x: p[0], y: p[1] });
                }
            }
        }
        let diameter = norm(sub(hi, lo));
        Ok(Domain { curves: oriented, outer, metric, diameter })
    }

    pub fn minkowski(curves: Vec<ParamCurve>, outer: usize) -> Result<Domain> {
        Domain::new(curves, outer, Metric::Minkowski)
    }

    pub fn disk(r: f64) -> Domain {
        Domain::minkowski(alloc::vec![ParamCurve::circle(r, [0.0, 0.0])], 0).expect("valid disk")
    }

    /// Centered annulus; component 0 is the outer circle (parameter = polar
    /// angle), component 1 the inner circle (clockwise, parameter = −angle).
    pub fn annulus(r1: f64, r2: f64) -> Domain {
        Domain::minkowski(
            alloc::vec![ParamCurve::circle(r2, [0.0, 0.0]), ParamCurve::circle(r1, [0.0, 0.0])],
            0,
        )
        .expect("valid annulus")
    }

    pub fn ellipse(a: f64, b: f64) -> Domain {
        Domain::minkowski(alloc::vec![ParamCurve::ellipse(a, b)], 0).expect("valid ellipse")
    }

    /// The Misner cylinder; components 0 (`y = −1`) and 1 (`y = +1`), both
    /// parametrized by `x ∈ [0, 2π)`.
    pub fn misner() -> Domain {
        Domain { curves: Vec::new(), outer: 1, metric: Metric::Misner, diameter: TAU }
    }

    pub fn is_misner(&self) -> bool {
        matches!(self.metric, Metric::Misner)
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn curves(&self) -> &[ParamCurve] {
        &self.curves
    }

    pub fn curve(&self, c: usize) -> &ParamCurve {
        &self.curves[c]
    }

    pub fn outer(&self) -> usize {
        self.outer
    }

    pub fn component_count(&self) -> usize {
        if self.is_misner() {
            2
        } else {
            self.curves.len()
        }
    }

    pub fn period(&self, c: usize) -> f64 {
        if self.is_misner() {
            TAU
        } else {
            self.curves[c].period()
        }
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn position(&self, p: BoundaryPoint) -> Vec2 {
        if self.is_misner() {
            [wrap(p.t, TAU), if p.component == 0 { -1.0 } else { 1.0 }]
        } else {
            self.curves[p.component].position(p.t)
        }
    }

    pub fn frame(&self, c: usize, t: f64) -> Result<Frame> {
        if self.is_misner() {
            return Err(Error::InvalidInput("frames are not defined on the Misner cylinder".into()));
        }
        self.curves[c].frame(t).map_err(|e| match e {
            Error::IrregularPoint { t, .. } => Error::IrregularPoint { component: c, t },
            other => other,
        })
    }

    /// Boundary data at `(c, t)`. On the Misner cylinder the tangent is `∂_x`
    /// on both components.
    pub fn boundary_data(&self, c: usize, t: f64, normal: NormalChoice) -> Result<BoundaryData> {
        let (point, tangent, euclid) = if self.is_misner() {
            let y = if c == 0 { -1.0 } else { 1.0 };
            ([wrap(t, TAU), y], [1.0, 0.0], [0.0, y])
        } else {
            let f = self.frame(c, t)?;
            (f.position, f.tangent, f.normal())
        };
        let n = match normal {
            NormalChoice::Euclidean => euclid,
            NormalChoice::Custom(n) => n,
        };
        boundary_data_at(&self.metric, point, tangent, n)
    }

    /// Image of the domain under an affine map (curves pushed forward).
    pub fn mapped(&self, map: &Affine) -> Result<Domain> {
        let curves = self.curves.iter().map(|c| c.mapped(map)).collect();
        let mut d = Domain::new(curves, self.outer, self.metric.clone())?;
        // Orientation-preserving maps keep the original parametrizations.
        for (new, old) in d.curves.iter_mut().zip(&self.curves) {
            if new.reversed != old.reversed {
                *new = old.mapped(map);
            }
        }
        Ok(d)
    }
}

fn bounding_box(polys: &[Vec<Vec2>]) -> (Vec2, Vec2) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in polys.iter().flatten() {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

fn segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = cross(sub(b, a), sub(c, a));
    let d2 = cross(sub(b, a), sub(d, a));
    let d3 = cross(sub(d, c), sub(a, c));
    let d4 = cross(sub(d, c), sub(b, c));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn check_simple(polys: &[Vec<Vec2>], curves: &[ParamCurve]) -> Result<()> {
    let n = VALIDATION_SAMPLES;
    for (ci, pa) in polys.iter().enumerate() {
        for (cj, pb) in polys.iter().enumerate().skip(ci) {
            for i in 0..n {
                let (a, b) = (pa[i], pa[(i + 1) % n]);
                let start = if ci == cj { i + 2 } else { 0 };
                for j in start..n {
                    if ci == cj && (j + 1) % n == i {
                        continue;
                    }
                    if segments_cross(a, b, pb[j], pb[(j + 1) % n]) {
                        let t = curves[ci].period() * i as f64 / n as f64;
                        return Err(Error::SelfIntersecting { component: ci, t });
                    }
                }
            }
        }
    }
    Ok(())
}

/// A light-like boundary point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LightPoint {
    pub component: usize,
    pub t: f64,
    /// `Plus` for `I₊` (`θ = 3π/4`), `Minus` for `I₋` (`θ = π/4`).
    pub sign: Sign,
    /// Curvature with the boundary orientation; positive where the domain is
    /// locally convex.
    pub kappa: f64,
}

impl LightPoint {
    pub fn point(&self) -> BoundaryPoint {
        BoundaryPoint::new(self.component, self.t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LightConfig {
    pub grid: usize,
    pub kappa_min: f64,
    /// Root tolerance relative to the period.
    pub t_tol: f64,
}

impl Default for LightConfig {
    fn default() -> Self {
        LightConfig { grid: 4096, kappa_min: 1e-6, t_tol: 1e-12 }
    }
}

pub fn light_points(domain: &Domain) -> Result<Vec<LightPoint>> {
    light_points_with(domain, &LightConfig::default())
}

/// Roots of `cos 2θ` on every component, classified into `I₊` and `I₋`.
pub fn light_points_with(domain: &Domain, cfg: &LightConfig) -> Result<Vec<LightPoint>> {
    if !domain.metric().is_flat_cone() {
        return Err(Error::InvalidInput(
            "light points need Minkowski null directions".into(),
        ));
    }
    let mut out = Vec::new();
    for (c, curve) in domain.curves().iter().enumerate() {
        let period = curve.period();
        let n = cfg.grid;
        let h = period / n as f64;
        let ts: Vec<f64> = (0..n).map(|j| h * j as f64).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| curve.light_function(t)).collect();
        let flat = 1e-10;
        let mut roots: Vec<f64> = Vec::new();
        for j in 0..n {
            let (v0, v1) = (vals[j], vals[(j + 1) % n]);
            if v0.abs() < flat && v1.abs() < flat {
                return Err(Error::AssumptionB { component: c, t: ts[j] });
            }
            if v0 == 0.0 {
                roots.push(ts[j]);
                continue;
            }
            if v0 * v1 < 0.0 {
                let r = bisect(|t| curve.light_function(t), ts[j], ts[j] + h, v0.signum(), cfg.t_tol * period);
                roots.push(wrap(r, period));
                continue;
            }
            // A touching zero without a sign change means a double root.
            let vp = vals[(j + n - 1) % n];
            if v0.abs() < 1e-9 && v0.abs() <= vp.abs() && v0.abs() <= v1.abs() {
                return Err(Error::AssumptionC { component: c, t: ts[j], kappa: 0.0 });
            }
        }
        for t in roots {
            let f = domain.frame(c, t)?;
            if f.kappa.abs() <= cfg.kappa_min {
                return Err(Error::AssumptionC { component: c, t, kappa: f.kappa });
            }
            let sign = if f.sin2 > 0.0 { Sign::Minus } else { Sign::Plus };
            out.push(LightPoint { component: c, t, sign, kappa: f.kappa });
        }
    }
    Ok(out)
}

/// Normal angle of a light point of the given sign.
pub fn light_angle(sign: Sign) -> f64 {
    match sign {
        Sign::Minus => FRAC_PI_4,
        Sign::Plus => 3.0 * FRAC_PI_4,
    }
}
