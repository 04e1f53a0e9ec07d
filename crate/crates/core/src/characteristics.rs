//! Null characteristics, the boundary involutions `E±`, their exceptional
//! sets and equivalence classes, and closed forms for disks and annuli.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{cross, dot, light_points, norm, null_direction, sub, Domain, Jet, LightPoint, Vec2};
use crate::num::{bisect, wrap, wrap_centered, TAU};
use crate::{BoundaryPoint, Error, Result, Sign};

/// How a traced characteristic ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Outcome {
    Hit(BoundaryPoint),
    /// Spirals towards a closed null curve without reaching the boundary.
    Asymptotic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HitResult {
    pub outcome: Outcome,
    pub path: Vec<Vec2>,
}

impl HitResult {
    pub fn target(&self) -> Option<BoundaryPoint> {
        match self.outcome {
            Outcome::Hit(p) => Some(p),
            Outcome::Asymptotic => None,
        }
    }
}

pub const DEFAULT_BRACKETS: usize = 1024;

/// Ray/boundary intersection engine with cached bracketing samples.
#[derive(Clone, Debug)]
pub struct Tracer {
    domain: Domain,
    samples: usize,
    cache: Vec<Vec<Vec2>>,
    s_eps: f64,
}

struct Node {
    t: f64,
    left: f64,
    right: f64,
}

impl Tracer {
    pub fn new(domain: &Domain) -> Tracer {
        Tracer::with_samples(domain, DEFAULT_BRACKETS)
    }

    pub fn with_samples(domain: &Domain, samples: usize) -> Tracer {
        let cache = domain.curves().iter().map(|c| c.polygon(samples)).collect();
        Tracer { domain: domain.clone(), samples, cache, s_eps: 1e-9 * domain.diameter() }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// All transversal crossings of the line `p0 + s·d` with the boundary,
    /// as `(point, s)`. The boundary point `skip` (the ray origin) is excluded.
    pub fn crossings(&self, p0: Vec2, d: Vec2, skip: Option<BoundaryPoint>) -> Vec<(BoundaryPoint, f64)> {
        let mut out = Vec::new();
        let dd = dot(d, d);
        for (c, curve) in self.domain.curves().iter().enumerate() {
            let period = curve.period();
            let n = self.samples;
            let h = |t: f64| cross(sub(curve.position(t), p0), d);
            let mut nodes: Vec<Node> = Vec::with_capacity(n + 1);
            match skip.filter(|s| s.component == c) {
                Some(start) => {
                    // Grid anchored at the ray origin, whose two copies carry
                    // the one-sided signs.
                    let jet = curve.jet(start.t);
                    let (before, after) = origin_signs(&jet, d);
                    nodes.push(Node { t: start.t, left: after, right: after });
                    for j in 1..n {
                        let t = start.t + period * j as f64 / n as f64;
                        let v = nudge(h(t));
                        nodes.push(Node { t, left: v, right: v });
                    }
                    nodes.push(Node { t: start.t + period, left: before, right: before });
                }
                None => {
                    for j in 0..=n {
                        let t = period * j as f64 / n as f64;
                        let v = nudge(cross(sub(self.cache[c][j % n], p0), d));
                        nodes.push(Node { t, left: v, right: v });
                    }
                }
            }
            for w in nodes.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                if a.right * b.left < 0.0 {
                    let t = bisect(&h, a.t, b.t, a.right.signum(), 0.0);
                    let p = curve.position(t);
                    let s = dot(sub(p, p0), d) / dd;
                    out.push((BoundaryPoint::new(c, wrap(t, period)), s));
                }
            }
        }
        out
    }

    /// Even-odd test against the sampled boundary polygons.
    pub fn contains(&self, p: Vec2) -> bool {
        let mut inside = false;
        for poly in &self.cache {
            let n = poly.len();
            for j in 0..n {
                let (a, b) = (poly[j], poly[(j + 1) % n]);
                if (a[1] > p[1]) != (b[1] > p[1]) {
                    let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                    if x > p[0] {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }

    /// Nearest crossing with ray parameter `s > s_eps`.
    pub fn first_hit(&self, p0: Vec2, d: Vec2, skip: Option<BoundaryPoint>) -> Option<(BoundaryPoint, f64)> {
        self.crossings(p0, d, skip)
            .into_iter()
            .filter(|(_, s)| *s > self.s_eps)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal))
    }

    /// Inward null direction of the given sign at a boundary point.
    pub fn inward(&self, start: BoundaryPoint, sign: Sign) -> Result<Vec2> {
        let f = self.domain.frame(start.component, start.t)?;
        let n = f.normal();
        let mut d = null_direction(sign);
        let c = dot(d, n) / norm(d);
        if c.abs() < 1e-12 {
            return Err(Error::StartOnLightPoint);
        }
        if c > 0.0 {
            d = [-d[0], -d[1]];
        }
        Ok(d)
    }

    /// Other endpoint of the `sign`-characteristic chord through `start`.
    pub fn chord(&self, start: BoundaryPoint, sign: Sign) -> Result<BoundaryPoint> {
        if self.domain.is_misner() {
            return misner_chord(start, sign);
        }
        let d = self.inward(start, sign)?;
        let p0 = self.domain.position(start);
        self.first_hit(p0, d, Some(start))
            .map(|(q, _)| q)
            .ok_or(Error::NoIntersection { x: p0[0], y: p0[1] })
    }

    pub fn trace(&self, start: BoundaryPoint, sign: Sign) -> Result<HitResult> {
        if self.domain.is_misner() {
            return Ok(misner_trace(start, sign));
        }
        let q = self.chord(start, sign)?;
        Ok(HitResult {
            outcome: Outcome::Hit(q),
            path: vec![self.domain.position(start), self.domain.position(q)],
        })
    }
}

/// Signs of the crossing function on either side of the ray origin. At a
/// tangency the function has a double zero and keeps the sign of its second
/// derivative.
fn nudge(v: f64) -> f64 {
    if v == 0.0 {
        f64::MIN_POSITIVE
    } else {
        v
    }
}

fn origin_signs(jet: &Jet, d: Vec2) -> (f64, f64) {
    let slope = cross(jet.d1, d);
    if slope.abs() < 1e-8 * norm(jet.d1) * norm(d) {
        let bend = cross(jet.d2, d);
        return (bend, bend);
    }
    (-slope, slope)
}

/// Follow the `sign`-characteristic from a boundary point.
pub fn trace_null(domain: &Domain, start: BoundaryPoint, sign: Sign) -> Result<HitResult> {
    if domain.is_misner() {
        return Ok(misner_trace(start, sign));
    }
    Tracer::new(domain).trace(start, sign)
}

fn misner_chord(start: BoundaryPoint, sign: Sign) -> Result<BoundaryPoint> {
    match sign {
        Sign::Plus => Ok(BoundaryPoint::new(1 - start.component.min(1), wrap(start.t, TAU))),
        Sign::Minus => Err(Error::InvolutionUndefined),
    }
}

/// On the cylinder `∂₊` is vertical; `∂₋` obeys `dx/dy = 1/y` and winds
/// towards the closed null curve `y = 0`.
fn misner_trace(start: BoundaryPoint, sign: Sign) -> HitResult {
    let y0 = if start.component == 0 { -1.0 } else { 1.0 };
    let x0 = start.t;
    match sign {
        Sign::Plus => HitResult {
            outcome: Outcome::Hit(BoundaryPoint::new(1 - start.component.min(1), wrap(x0, TAU))),
            path: vec![[x0, y0], [x0, -y0]],
        },
        Sign::Minus => {
            let slope = |y: f64| 1.0 / y;
            let (mut x, mut y) = (x0, y0);
            let dir = -y0.signum();
            let mut path = vec![[x, y]];
            loop {
                if y.abs() < 1e-8 && slope(y).abs() > 1e6 {
                    return HitResult { outcome: Outcome::Asymptotic, path };
                }
                let h = dir * (0.01f64).min(0.05 * y.abs());
                let k1 = slope(y);
                let k2 = slope(y + 0.5 * h);
                let k4 = slope(y + h);
                x += h * (k1 + 4.0 * k2 + k4) / 6.0;
                y += h;
                path.push([x, y]);
                if y.abs() >= 1.0 {
                    let c = if y > 0.0 { 1 } else { 0 };
                    return HitResult { outcome: Outcome::Hit(BoundaryPoint::new(c, wrap(x, TAU))), path };
                }
            }
        }
    }
}

/// Sampled table entry of an involution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableEntry {
    pub source: BoundaryPoint,
    /// `None` inside the exclusion zone around a tangency.
    pub target: Option<BoundaryPoint>,
    pub class_order: usize,
}

/// Exclusion radius around tangency points, relative to the period.
pub const EXCLUSION: f64 = 1e-6;
pub const MAX_CLASS: usize = 64;

/// The involution `E±` with its exceptional classes.
#[derive(Clone, Debug)]
pub struct InvolutionMap {
    sign: Sign,
    tracer: Tracer,
    light: Vec<LightPoint>,
    classes: Vec<Vec<BoundaryPoint>>,
    table: Vec<Vec<TableEntry>>,
}

impl InvolutionMap {
    /// Tracer and exceptional classes, without a sampled table.
    pub fn new(domain: &Domain, sign: Sign) -> Result<InvolutionMap> {
        InvolutionMap::with_tracer(Tracer::new(domain), sign)
    }

    pub fn with_tracer(tracer: Tracer, sign: Sign) -> Result<InvolutionMap> {
        let domain = tracer.domain().clone();
        if domain.is_misner() {
            if sign == Sign::Minus {
                return Err(Error::InvolutionUndefined);
            }
            return Ok(InvolutionMap { sign, tracer, light: Vec::new(), classes: Vec::new(), table: Vec::new() });
        }
        let light = light_points(&domain)?;
        let mut map = InvolutionMap { sign, tracer, light, classes: Vec::new(), table: Vec::new() };
        map.classes = map.exceptional_classes()?;
        Ok(map)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn domain(&self) -> &Domain {
        self.tracer.domain()
    }

    pub fn tracer(&self) -> &Tracer {
        &self.tracer
    }

    pub fn light_points(&self) -> &[LightPoint] {
        &self.light
    }

    /// Light points where the `sign` characteristic is tangent.
    pub fn tangencies(&self) -> impl Iterator<Item = &LightPoint> {
        let s = self.sign;
        self.light.iter().filter(move |l| l.sign == s)
    }

    /// Equivalence classes of order other than two.
    pub fn classes(&self) -> &[Vec<BoundaryPoint>] {
        &self.classes
    }

    /// `I′`: members of all classes of order 1 or at least 3.
    pub fn exceptional(&self) -> Vec<BoundaryPoint> {
        self.classes.iter().flatten().copied().collect()
    }

    /// Parameter distance from `p` to the exceptional set (infinite when empty
    /// or on another component).
    pub fn distance_to_exceptional(&self, p: BoundaryPoint) -> f64 {
        let period = self.domain().period(p.component);
        self.classes
            .iter()
            .flatten()
            .filter(|q| q.component == p.component)
            .map(|q| wrap_centered(q.t - p.t, period).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn apply(&self, p: BoundaryPoint) -> Result<BoundaryPoint> {
        self.tracer.chord(p, self.sign)
    }

    /// `dE/dt` at `p` given its image `q`, from conservation of the light-cone
    /// coordinate along the chord.
    pub fn derivative_at(&self, p: BoundaryPoint, q: BoundaryPoint) -> f64 {
        let domain = self.domain();
        if domain.is_misner() {
            return 1.0;
        }
        let a = domain.curve(p.component).jet(p.t).d1;
        let b = domain.curve(q.component).jet(q.t).d1;
        match self.sign {
            Sign::Minus => (a[0] + a[1]) / (b[0] + b[1]),
            Sign::Plus => (a[1] - a[0]) / (b[1] - b[0]),
        }
    }

    pub fn apply_with_derivative(&self, p: BoundaryPoint) -> Result<(BoundaryPoint, f64)> {
        let q = self.apply(p)?;
        Ok((q, self.derivative_at(p, q)))
    }

    fn exceptional_classes(&self) -> Result<Vec<Vec<BoundaryPoint>>> {
        let domain = self.domain();
        let tol = 1e-9 * domain.diameter();
        let mut classes: Vec<Vec<BoundaryPoint>> = Vec::new();
        let tangencies: Vec<LightPoint> = self.tangencies().copied().collect();
        for lp in &tangencies {
            let p = lp.point();
            if classes.iter().flatten().any(|q| same_point(domain, *q, p)) {
                continue;
            }
            if lp.kappa > 0.0 {
                classes.push(vec![p]);
                continue;
            }
            let p0 = domain.position(p);
            let d = null_direction(self.sign);
            let mut members: Vec<(f64, BoundaryPoint)> = vec![(0.0, p)];
            for dir in [1.0, -1.0] {
                let dv = [dir * d[0], dir * d[1]];
                let (q, s) = self
                    .tracer
                    .first_hit(p0, dv, Some(p))
                    .ok_or(Error::NoIntersection { x: p0[0], y: p0[1] })?;
                members.push((dir * s, q));
            }
            let (lo, hi) = (members[2].0, members[1].0);
            let dd = dot(d, d);
            for other in &tangencies {
                if other.kappa > 0.0 || same_point(domain, other.point(), p) {
                    continue;
                }
                let r = sub(domain.position(other.point()), p0);
                if cross(r, d).abs() / norm(d) < tol {
                    let s = dot(r, d) / dd;
                    if s > lo && s < hi {
                        members.push((s, other.point()));
                    }
                }
            }
            if members.len() > MAX_CLASS {
                return Err(Error::ClassTooLarge { bound: MAX_CLASS });
            }
            members.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
            classes.push(members.into_iter().map(|(_, q)| q).collect());
        }
        Ok(classes)
    }

    /// The equivalence class of `p`: an exceptional class when `p` belongs to
    /// one, else `{p, E p}`.
    pub fn class_of(&self, p: BoundaryPoint) -> Result<Vec<BoundaryPoint>> {
        let domain = self.domain();
        for class in &self.classes {
            if class.iter().any(|q| same_point(domain, *q, p)) {
                return Ok(class.clone());
            }
        }
        Ok(vec![p, self.apply(p)?])
    }

    /// Sample the map on `grid` uniform parameters per component.
    pub fn build_table(&mut self, grid: usize) -> Result<()> {
        let domain = self.domain().clone();
        let mut table = Vec::with_capacity(domain.component_count());
        for c in 0..domain.component_count() {
            let period = domain.period(c);
            let mut rows = Vec::with_capacity(grid);
            for j in 0..grid {
                let p = BoundaryPoint::new(c, period * j as f64 / grid as f64);
                let near = self
                    .tangencies()
                    .filter(|l| l.component == c)
                    .any(|l| wrap_centered(l.t - p.t, period).abs() < EXCLUSION * period);
                let (target, class_order) = if near {
                    let order = self.class_of(nearest_tangency(self, p).unwrap_or(p))?.len();
                    (None, order)
                } else {
                    (Some(self.apply(p)?), 2)
                };
                rows.push(TableEntry { source: p, target, class_order });
            }
            table.push(rows);
        }
        self.table = table;
        Ok(())
    }

    pub fn table(&self) -> &[Vec<TableEntry>] {
        &self.table
    }
}

fn nearest_tangency(map: &InvolutionMap, p: BoundaryPoint) -> Option<BoundaryPoint> {
    let period = map.domain().period(p.component);
    map.tangencies()
        .filter(|l| l.component == p.component)
        .min_by(|a, b| {
            let da = wrap_centered(a.t - p.t, period).abs();
            let db = wrap_centered(b.t - p.t, period).abs();
            da.partial_cmp(&db).unwrap_or(core::cmp::Ordering::Equal)
        })
        .map(|l| l.point())
}

fn same_point(domain: &Domain, a: BoundaryPoint, b: BoundaryPoint) -> bool {
    a.component == b.component
        && wrap_centered(a.t - b.t, domain.period(a.component)).abs() < 1e-9 * domain.period(a.component)
}

/// Sampled involution with its exceptional classes.
pub fn involution_map(domain: &Domain, sign: Sign, grid: usize) -> Result<InvolutionMap> {
    let mut map = InvolutionMap::new(domain, sign)?;
    map.build_table(grid)?;
    Ok(map)
}

pub fn equivalence_class(domain: &Domain, sign: Sign, p: BoundaryPoint) -> Result<Vec<BoundaryPoint>> {
    InvolutionMap::new(domain, sign)?.class_of(p)
}

/// Closed form on a centered disk (parameter = polar angle).
pub fn disk_involution(sign: Sign, theta: f64) -> f64 {
    match sign {
        Sign::Minus => wrap(FRAC_PI_2 - theta, TAU),
        Sign::Plus => wrap(-FRAC_PI_2 - theta, TAU),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ring {
    Inner,
    Outer,
}

/// Point on a centered annulus labelled by ring and polar angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingPoint {
    pub ring: Ring,
    pub angle: f64,
}

/// Offset of the light-cone coordinate preserved by `E±`: `−π/4` for `E₋`
/// (which keeps `σ₊ ∝ cos(θ − π/4)`), `+π/4` for `E₊`.
fn ring_shift(sign: Sign) -> f64 {
    match sign {
        Sign::Minus => -FRAC_PI_4,
        Sign::Plus => FRAC_PI_4,
    }
}

/// Whether an outer point's chord misses the hole.
pub fn annulus_outer_arc(r1: f64, r2: f64, sign: Sign, angle: f64) -> bool {
    (angle + ring_shift(sign)).cos().abs() > r1 / r2
}

/// The closed forms on the annulus `r1 < r < r2`. From the inner circle the
/// `arccos` branch is fixed by `ε = sign(wrap(θ ∓ π/4))`: the chord leaves the
/// hole on the side it started from.
pub fn annulus_involution(r1: f64, r2: f64, sign: Sign, p: RingPoint) -> Result<RingPoint> {
    let shift = ring_shift(sign);
    let base = -shift;
    let rel = wrap_centered(p.angle + shift, TAU);
    let eps = if rel >= 0.0 { 1.0 } else { -1.0 };
    match p.ring {
        Ring::Inner => {
            let phi = base + eps * ((r1 / r2) * rel.cos()).acos();
            Ok(RingPoint { ring: Ring::Outer, angle: wrap(phi, TAU) })
        }
        Ring::Outer if annulus_outer_arc(r1, r2, sign, p.angle) => {
            annulus_outer_outer(r1, r2, sign, p.angle).map(|a| RingPoint { ring: Ring::Outer, angle: a })
        }
        Ring::Outer => {
            let theta = base + eps * ((r2 / r1) * rel.cos()).acos();
            Ok(RingPoint { ring: Ring::Inner, angle: wrap(theta, TAU) })
        }
    }
}

/// Outer-to-outer branch: `θ ↔ π/2 − θ` for `E₋`, `θ ↔ −π/2 − θ` for `E₊`,
/// valid on the arcs of half-width `arccos(r1/r2)`.
pub fn annulus_outer_outer(r1: f64, r2: f64, sign: Sign, angle: f64) -> Result<f64> {
    if !annulus_outer_arc(r1, r2, sign, angle) {
        return Err(Error::OutsideArc);
    }
    Ok(disk_involution(sign, angle))
}

/// Translate between [`Domain::annulus`] parameters and ring labels.
pub fn ring_point(p: BoundaryPoint) -> RingPoint {
    match p.component {
        0 => RingPoint { ring: Ring::Outer, angle: wrap(p.t, TAU) },
        _ => RingPoint { ring: Ring::Inner, angle: wrap(-p.t, TAU) },
    }
}

pub fn ring_to_boundary(p: RingPoint) -> BoundaryPoint {
    match p.ring {
        Ring::Outer => BoundaryPoint::new(0, wrap(p.angle, TAU)),
        Ring::Inner => BoundaryPoint::new(1, wrap(-p.angle, TAU)),
    }
}

/// Result of checking the branch rule against the tracer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchCalibration {
    pub samples: usize,
    /// Samples where the rule's branch is the closer of the two to the tracer.
    pub agreements: usize,
    pub max_error: f64,
}

/// Compare the `arccos` branch rule on the inner circle with the tracer.
pub fn calibrate_annulus_branches(r1: f64, r2: f64, sign: Sign, samples: usize) -> Result<BranchCalibration> {
    let domain = Domain::annulus(r1, r2);
    let tracer = Tracer::new(&domain);
    let shift = ring_shift(sign);
    let mut agreements = 0;
    let mut used = 0;
    let mut max_error: f64 = 0.0;
    for j in 0..samples {
        let angle = TAU * (j as f64 + 0.5) / samples as f64;
        let rel = wrap_centered(angle + shift, TAU);
        if rel.abs() < 1e-6 || (rel.abs() - core::f64::consts::PI).abs() < 1e-6 {
            continue;
        }
        used += 1;
        let hit = ring_point(tracer.chord(ring_to_boundary(RingPoint { ring: Ring::Inner, angle }), sign)?);
        let oracle = annulus_involution(r1, r2, sign, RingPoint { ring: Ring::Inner, angle })?;
        let other = wrap(-2.0 * shift - oracle.angle, TAU);
        let err = wrap_centered(hit.angle - oracle.angle, TAU).abs();
        let err_other = wrap_centered(hit.angle - other, TAU).abs();
        if hit.ring == Ring::Outer && err <= err_other {
            agreements += 1;
        }
        max_error = max_error.max(err);
    }
    Ok(BranchCalibration { samples: used, agreements, max_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ParamCurve;

    #[test]
    fn disk_chord_matches_closed_form() {
        let d = Domain::disk(1.0);
        let r = trace_null(&d, BoundaryPoint::new(0, 0.0), Sign::Minus).unwrap();
        let q = r.target().unwrap();
        assert!((q.t - FRAC_PI_2).abs() < 1e-12, "{:?}", q);
        let tr = Tracer::new(&d);
        for &t in &[0.3, 1.0, 2.5, 4.0, 5.9] {
            for s in [Sign::Plus, Sign::Minus] {
                let q = tr.chord(BoundaryPoint::new(0, t), s).unwrap();
                assert!(wrap_centered(q.t - disk_involution(s, t), TAU).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn start_on_light_point_rejected() {
        let d = Domain::disk(1.0);
        let r = trace_null(&d, BoundaryPoint::new(0, FRAC_PI_4), Sign::Minus);
        assert_eq!(r, Err(Error::StartOnLightPoint));
    }

    #[test]
    fn misner_traces() {
        let d = Domain::misner();
        let up = trace_null(&d, BoundaryPoint::new(0, 0.7), Sign::Plus).unwrap();
        assert_eq!(up.target(), Some(BoundaryPoint::new(1, 0.7)));
        for c in 0..2 {
            let r = trace_null(&d, BoundaryPoint::new(c, 0.7), Sign::Minus).unwrap();
            assert_eq!(r.outcome, Outcome::Asymptotic);
            // x = x0 + ln|y| along the curve.
            let last = r.path.last().unwrap();
            assert!((last[0] - (0.7 + last[1].abs().ln())).abs() < 1e-6);
        }
        assert!(matches!(InvolutionMap::new(&d, Sign::Minus), Err(Error::InvolutionUndefined)));
    }

    #[test]
    fn annulus_classes() {
        let d = Domain::annulus(1.0, 2.0);
        let out = equivalence_class(&d, Sign::Plus, BoundaryPoint::new(0, TAU - FRAC_PI_4)).unwrap();
        assert_eq!(out.len(), 1);
        let inner = ring_to_boundary(RingPoint { ring: Ring::Inner, angle: -FRAC_PI_4 });
        let class = equivalence_class(&d, Sign::Plus, inner).unwrap();
        assert_eq!(class.len(), 3, "{:?}", class);
        let third = core::f64::consts::FRAC_PI_3;
        let mut outer: Vec<f64> = class.iter().filter(|p| p.component == 0).map(|p| p.t).collect();
        outer.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expect = [wrap(-FRAC_PI_4 - third, TAU), wrap(-FRAC_PI_4 + third, TAU)];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in outer.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-9, "{} vs {} in {:?}", a, b, class);
        }
    }

    #[test]
    fn annulus_oracle_agrees_with_tracer() {
        let (r1, r2) = (1.0, 2.0);
        let d = Domain::annulus(r1, r2);
        let tr = Tracer::new(&d);
        for s in [Sign::Plus, Sign::Minus] {
            for c in 0..2 {
                for j in 0..64 {
                    let p = BoundaryPoint::new(c, TAU * (j as f64 + 0.37) / 64.0);
                    let q = tr.chord(p, s).unwrap();
                    let o = ring_to_boundary(annulus_involution(r1, r2, s, ring_point(p)).unwrap());
                    assert_eq!(q.component, o.component);
                    assert!(wrap_centered(q.t - o.t, TAU).abs() < 1e-9);
                }
            }
            let cal = calibrate_annulus_branches(r1, r2, s, 128).unwrap();
            assert_eq!(cal.agreements, cal.samples);
        }
    }

    #[test]
    fn outer_outer_outside_arc() {
        assert_eq!(annulus_outer_outer(1.0, 2.0, Sign::Plus, FRAC_PI_4), Err(Error::OutsideArc));
    }

    #[test]
    fn involution_reverses_orientation() {
        let d = Domain::minkowski(
            vec![ParamCurve::fourier(vec![0.0, 1.2, 0.1, 0.0, 0.15], vec![0.0, 0.0, 0.9, 0.1], TAU)],
            0,
        )
        .unwrap();
        for s in [Sign::Plus, Sign::Minus] {
            let map = InvolutionMap::new(&d, s).unwrap();
            for j in 0..40 {
                let p = BoundaryPoint::new(0, TAU * (j as f64 + 0.5) / 40.0);
                if map.distance_to_exceptional(p) < 1e-3 {
                    continue;
                }
                let (q, dq) = map.apply_with_derivative(p).unwrap();
                assert!(dq < 0.0);
                let back = map.apply(q).unwrap();
                assert!(wrap_centered(back.t - p.t, TAU).abs() < 1e-10);
            }
        }
    }
}
