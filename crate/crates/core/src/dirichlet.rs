//! Dirichlet diagnostics from the dynamics of `P = E₊∘E₋` on the boundary:
//! orbits, rotation numbers, the periodic-orbit obstruction to existence and
//! kernel elements with vanishing trace.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::characteristics::InvolutionMap;
use crate::fields::{field_value, make_l_field, BoundaryField, Involutions};
use crate::geometry::light_points;
use crate::num::{bisect, grid, smooth_bump, wrap, wrap_centered};
use crate::{BoundaryPoint, Error, Result, Sign};

/// Period detection tolerance relative to the component period.
pub const ORBIT_TOL: f64 = 1e-9;
const HISTOGRAM_BINS: usize = 64;

/// `E(p)`, with light points fixed.
fn apply_or_fix(map: &InvolutionMap, p: BoundaryPoint) -> Result<BoundaryPoint> {
    match map.apply(p) {
        Err(Error::StartOnLightPoint) => Ok(p),
        other => other,
    }
}

/// `P(p) = E₊(E₋(p))`.
pub fn joint_map(invs: &Involutions, p: BoundaryPoint) -> Result<BoundaryPoint> {
    invs.plus.apply(invs.minus.apply(p)?)
}

fn joint_power(invs: &Involutions, mut p: BoundaryPoint, n: usize) -> Result<BoundaryPoint> {
    for _ in 0..n {
        p = joint_map(invs, p)?;
    }
    Ok(p)
}

fn same_point(invs: &Involutions, a: BoundaryPoint, b: BoundaryPoint) -> f64 {
    if a.component != b.component {
        return f64::INFINITY;
    }
    let period = invs.domain().period(a.component);
    wrap_centered(a.t - b.t, period).abs() / period
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord {
    pub start: BoundaryPoint,
    /// `x_0 = start, x_1 = P x_0, …, x_n`.
    pub iterates: Vec<BoundaryPoint>,
    /// Smallest `k ≥ 1` with `x_k = x_0` within [`ORBIT_TOL`].
    pub period: Option<usize>,
    /// Birkhoff average of the lifted displacement (mod 1), when the orbit
    /// stays on the start component.
    pub rotation_number: Option<f64>,
    /// `max_b |n_b/n − 1/64|` over a 64-bin histogram of the start component.
    pub discrepancy: f64,
}

pub fn orbit(invs: &Involutions, start: BoundaryPoint, n_iter: usize) -> Result<OrbitRecord> {
    let mut iterates = Vec::with_capacity(n_iter + 1);
    iterates.push(start);
    let mut p = start;
    for k in 1..=n_iter {
        p = match joint_map(invs, p) {
            Ok(q) => q,
            Err(Error::StartOnLightPoint) => return Err(Error::OrbitHitsExceptional { iterate: k - 1 }),
            Err(e) => return Err(e),
        };
        iterates.push(p);
    }
    let period = (1..iterates.len()).find(|&k| same_point(invs, iterates[k], start) < ORBIT_TOL);
    let c = start.component;
    let single = iterates.iter().all(|q| q.component == c);
    let rotation_number = if single {
        let lift = DisplacementLift::new(invs, c)?;
        Some(lift.average(&iterates))
    } else {
        None
    };
    let t_period = invs.domain().period(c);
    let mut bins = vec![0usize; HISTOGRAM_BINS];
    let mut count = 0usize;
    for q in iterates.iter().filter(|q| q.component == c) {
        let b = ((wrap(q.t, t_period) / t_period) * HISTOGRAM_BINS as f64) as usize;
        bins[b.min(HISTOGRAM_BINS - 1)] += 1;
        count += 1;
    }
    let discrepancy = bins
        .iter()
        .map(|&b| (b as f64 / count.max(1) as f64 - 1.0 / HISTOGRAM_BINS as f64).abs())
        .fold(0.0, f64::max);
    Ok(OrbitRecord { start, iterates, period, rotation_number, discrepancy })
}

/// Continuous branch of `P(t) − t` on a component, tabulated.
struct DisplacementLift {
    period: f64,
    table: Vec<f64>,
}

impl DisplacementLift {
    const SAMPLES: usize = 2048;

    fn new(invs: &Involutions, c: usize) -> Result<DisplacementLift> {
        let period = invs.domain().period(c);
        let mut table: Vec<Option<f64>> = Vec::with_capacity(Self::SAMPLES);
        for t in grid(period, Self::SAMPLES) {
            let q = match joint_map(invs, BoundaryPoint::new(c, t)) {
                Ok(q) => q,
                Err(Error::StartOnLightPoint) => {
                    table.push(None);
                    continue;
                }
                Err(e) => return Err(e),
            };
            if q.component != c {
                return Err(Error::LeavesComponent);
            }
            table.push(Some(q.t - t));
        }
        let mut prev: Option<f64> = None;
        let mut out = Vec::with_capacity(table.len());
        for raw in &table {
            let v = match (raw, prev) {
                (Some(r), None) => wrap(*r, period),
                (Some(r), Some(pv)) => pv + wrap_centered(r - pv, period),
                (None, Some(pv)) => pv,
                (None, None) => 0.0,
            };
            if raw.is_some() {
                prev = Some(v);
            }
            out.push(v);
        }
        Ok(DisplacementLift { period, table: out })
    }

    fn branch(&self, t: f64, raw: f64) -> f64 {
        let j = ((wrap(t, self.period) / self.period) * Self::SAMPLES as f64).round() as usize % Self::SAMPLES;
        let guess = self.table[j];
        guess + wrap_centered(raw - guess, self.period)
    }

    /// Mean lifted displacement over consecutive iterates, in turns, mod 1.
    fn average(&self, iterates: &[BoundaryPoint]) -> f64 {
        if iterates.len() < 2 {
            return 0.0;
        }
        let total: f64 = iterates.windows(2).map(|w| self.branch(w[0].t, w[1].t - w[0].t)).sum();
        wrap(total / ((iterates.len() - 1) as f64 * self.period), 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationEstimate {
    pub value: f64,
    /// `|ρ_n − ρ_{n/2}|` on the circle of turns.
    pub delta: f64,
}

impl RotationEstimate {
    pub fn converged(&self, tol: f64) -> bool {
        self.delta < tol
    }
}

/// Rotation number of `P` restricted to one component, from an orbit of the
/// least exceptional sample point.
pub fn rotation_number(invs: &Involutions, component: usize, n_iter: usize) -> Result<RotationEstimate> {
    let period = invs.domain().period(component);
    let lift = DisplacementLift::new(invs, component)?;
    let start = (0..16)
        .map(|j| BoundaryPoint::new(component, period * (j as f64 + 0.137) / 16.0))
        .max_by(|a, b| {
            let da = invs.minus.distance_to_exceptional(*a).min(invs.plus.distance_to_exceptional(*a));
            let db = invs.minus.distance_to_exceptional(*b).min(invs.plus.distance_to_exceptional(*b));
            da.partial_cmp(&db).unwrap_or(core::cmp::Ordering::Equal)
        })
        .unwrap_or(BoundaryPoint::new(component, 0.0));
    let mut iterates = Vec::with_capacity(n_iter + 1);
    let mut p = start;
    iterates.push(p);
    for k in 0..n_iter {
        p = match joint_map(invs, p) {
            Ok(q) => q,
            Err(Error::StartOnLightPoint) => return Err(Error::OrbitHitsExceptional { iterate: k }),
            Err(e) => return Err(e),
        };
        if p.component != component {
            return Err(Error::LeavesComponent);
        }
        iterates.push(p);
    }
    let full = lift.average(&iterates);
    let half = lift.average(&iterates[..n_iter / 2 + 1]);
    Ok(RotationEstimate { value: full, delta: wrap_centered(full - half, 1.0).abs() })
}

/// `Σ_{i<n} φ(Pⁱp) − φ(E₋Pⁱp)`, which vanishes on traces of solutions
/// whenever `Pⁿp = p`.
pub fn dirichlet_existence_obstruction(invs: &Involutions, field: &BoundaryField, p: BoundaryPoint, n: usize) -> Result<f64> {
    let back = joint_power(invs, p, n)?;
    let residual = same_point(invs, back, p);
    if !(residual < ORBIT_TOL) {
        return Err(Error::PeriodPrecondition { residual });
    }
    let domain = invs.domain();
    let mut total = 0.0;
    let mut q = p;
    for _ in 0..n {
        total += field_value(domain, field, q) - field_value(domain, field, apply_or_fix(&invs.minus, q)?);
        q = joint_map(invs, q)?;
    }
    Ok(total)
}

/// An arc `(a, b)` of one component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub component: usize,
    pub a: f64,
    pub b: f64,
}

impl Arc {
    fn bump(&self, period: f64, t: f64) -> f64 {
        let center = 0.5 * (self.a + self.b);
        let half = 0.5 * (self.b - self.a);
        smooth_bump(wrap_centered(t - center, period) / half)
    }
}

/// `f = Σ_{i<n} ψ∘(E₋E₊)ⁱ + ψ∘(E₋E₊)ⁱ∘E₋` for a bump `ψ` on the arc: invariant
/// under both involutions when every point of the arc has period `n`.
pub fn kernel_function(invs: &Involutions, arc: Arc, n: usize, p: BoundaryPoint) -> Result<f64> {
    let period = invs.domain().period(arc.component);
    let psi = |q: BoundaryPoint| if q.component == arc.component { arc.bump(period, q.t) } else { 0.0 };
    let step = |q: BoundaryPoint| -> Result<BoundaryPoint> { apply_or_fix(&invs.minus, apply_or_fix(&invs.plus, q)?) };
    let mut total = 0.0;
    let mut x = p;
    let mut y = apply_or_fix(&invs.minus, p)?;
    for _ in 0..n {
        total += psi(x) + psi(y);
        x = step(x)?;
        y = step(y)?;
    }
    Ok(total)
}

/// The trace-free element `(0, φ_n)` of `L` built from [`kernel_function`].
pub fn dirichlet_kernel_field(invs: &Involutions, arc: Arc, n: usize, m: usize) -> Result<BoundaryField> {
    let domain = invs.domain();
    let period = domain.period(arc.component);
    if !(arc.b > arc.a) || arc.b - arc.a >= period || arc.component >= domain.component_count() {
        return Err(Error::InvalidInput("arc must be a proper interval of one component".into()));
    }
    for l in light_points(domain)? {
        if l.component == arc.component && arc.bump(period, l.t) > 0.0 {
            return Err(Error::InvalidInput("arc contains a light point".into()));
        }
    }
    for j in 0..=16 {
        let p = BoundaryPoint::new(arc.component, arc.a + (arc.b - arc.a) * j as f64 / 16.0);
        let back = match joint_power(invs, p, n) {
            Ok(q) => q,
            Err(Error::StartOnLightPoint) => return Err(Error::NoPeriodicArc),
            Err(e) => return Err(e),
        };
        if !(same_point(invs, back, p) < ORBIT_TOL) {
            return Err(Error::NoPeriodicArc);
        }
    }
    // The values are exact pointwise; errors in tracing surface in the
    // invariance check inside `make_l_field`.
    let f = |p: BoundaryPoint| kernel_function(invs, arc, n, p).unwrap_or(f64::NAN);
    let field = make_l_field(invs, f, |p| -f(p), m)?;
    if field.phi_n.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NoPeriodicArc);
    }
    Ok(field)
}

/// Longest arc of `component` on which `Pⁿ = id`, from a scan of `samples`
/// points, shrunk by one sample at each end.
pub fn periodic_arc(invs: &Involutions, component: usize, n: usize, samples: usize) -> Result<Option<Arc>> {
    let period = invs.domain().period(component);
    let h = period / samples as f64;
    let mut flags = Vec::with_capacity(samples);
    for t in grid(period, samples) {
        let p = BoundaryPoint::new(component, t);
        let ok = match joint_power(invs, p, n) {
            Ok(q) => same_point(invs, q, p) < ORBIT_TOL,
            Err(Error::StartOnLightPoint) => false,
            Err(e) => return Err(e),
        };
        flags.push(ok);
    }
    let lights: Vec<f64> = light_points(invs.domain())?
        .into_iter()
        .filter(|l| l.component == component)
        .map(|l| l.t)
        .collect();
    let mut best: Option<(usize, usize)> = None;
    for j in 0..samples {
        if !flags[j] || (flags[(j + samples - 1) % samples] && flags.iter().any(|f| !f)) {
            continue;
        }
        let mut len = 0;
        while len < samples && flags[(j + len) % samples] {
            len += 1;
        }
        if best.map_or(true, |(_, l)| len > l) {
            best = Some((j, len));
        }
    }
    let Some((start, len)) = best else { return Ok(None) };
    if len < 4 {
        return Ok(None);
    }
    // Stay clear of light points: take the largest light-free sub-interval.
    let mut a = start as f64 * h + h;
    let mut b = (start + len - 1) as f64 * h - h;
    let mut cuts: Vec<f64> = lights
        .iter()
        .map(|&t| a + wrap(t - a, period))
        .filter(|&t| t > a && t < b)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    if !cuts.is_empty() {
        let mut edges = vec![a];
        edges.extend(cuts.iter().copied());
        edges.push(b);
        let (lo, hi) = edges
            .windows(2)
            .map(|w| (w[0], w[1]))
            .max_by(|x, y| (x.1 - x.0).partial_cmp(&(y.1 - y.0)).unwrap_or(core::cmp::Ordering::Equal))
            .unwrap_or((a, b));
        let margin = 0.02 * period;
        a = if cuts.contains(&lo) { lo + margin } else { lo };
        b = if cuts.contains(&hi) { hi - margin } else { hi };
    }
    // Keep the arc a proper sub-interval so the bump is supported inside.
    let width = (b - a).min(0.45 * period);
    if width <= 2.0 * h {
        return Ok(None);
    }
    let mid = 0.5 * (a + b);
    Ok(Some(Arc { component, a: mid - 0.5 * width, b: mid + 0.5 * width }))
}

/// Points with `Pⁿp = p` found from sign changes of the wrapped
/// displacement on a sample grid.
pub fn periodic_points(invs: &Involutions, component: usize, n: usize, samples: usize, limit: usize) -> Result<Vec<BoundaryPoint>> {
    let period = invs.domain().period(component);
    let disp = |t: f64| -> Option<f64> {
        let p = BoundaryPoint::new(component, t);
        match joint_power(invs, p, n) {
            Ok(q) if q.component == component => Some(wrap_centered(q.t - t, period)),
            _ => None,
        }
    };
    let ts = grid(period, samples);
    let vals: Vec<Option<f64>> = ts.iter().map(|&t| disp(t)).collect();
    let mut out = Vec::new();
    for j in 0..samples {
        let (Some(u), Some(w)) = (vals[j], vals[(j + 1) % samples]) else { continue };
        if u.abs() > 0.25 * period || w.abs() > 0.25 * period {
            continue;
        }
        let t0 = ts[j];
        let t1 = t0 + period / samples as f64;
        let root = if u == 0.0 {
            t0
        } else if u * w < 0.0 {
            bisect(|t| disp(t).unwrap_or(0.0), t0, t1, u.signum(), 1e-14 * period)
        } else {
            continue;
        };
        let p = BoundaryPoint::new(component, wrap(root, period));
        if let Ok(q) = joint_power(invs, p, n) {
            if same_point(invs, q, p) < ORBIT_TOL && !out.iter().any(|o: &BoundaryPoint| same_point(invs, *o, p) < 1e-6) {
                out.push(p);
            }
        }
        if out.len() >= limit {
            break;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    NoUniqueness,
    NoExistence,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::NoUniqueness => "no-uniqueness",
            Verdict::NoExistence => "no-existence",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnosis {
    pub kernel_found: bool,
    /// Arc and period used for the kernel element.
    pub kernel_arc: Option<(Arc, usize)>,
    /// Largest obstruction over a few trigonometric test traces, one entry
    /// per periodic point found.
    pub obstruction_samples: Vec<f64>,
    pub rotation_number: Option<RotationEstimate>,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnoseOptions {
    pub max_period: usize,
    pub samples: usize,
    pub rotation_iters: usize,
    pub m: usize,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        DiagnoseOptions { max_period: 8, samples: 256, rotation_iters: 20_000, m: 512 }
    }
}

/// Heuristic trichotomy on the outer component. Uniqueness is never
/// claimed: without periodic structure the verdict is inconclusive.
pub fn diagnose(invs: &Involutions, opts: &DiagnoseOptions) -> Result<Diagnosis> {
    let domain = invs.domain();
    let c = domain.outer();
    let period = domain.period(c);
    let mut kernel_arc = None;
    for n in 1..=opts.max_period {
        if let Some(arc) = periodic_arc(invs, c, n, opts.samples)? {
            if dirichlet_kernel_field(invs, arc, n, opts.m).is_ok() {
                kernel_arc = Some((arc, n));
                break;
            }
        }
    }
    let mut obstruction_samples = Vec::new();
    let tests: Vec<BoundaryField> = (1..=3)
        .flat_map(|k| {
            let w = crate::num::TAU / period * k as f64;
            [
                BoundaryField::sample(domain, opts.m, move |p| if p.component == c { ((w * p.t).cos(), 0.0) } else { (0.0, 0.0) }),
                BoundaryField::sample(domain, opts.m, move |p| if p.component == c { ((w * p.t).sin(), 0.0) } else { (0.0, 0.0) }),
            ]
        })
        .collect();
    for n in 1..=opts.max_period {
        for p in periodic_points(invs, c, n, opts.samples, 2)? {
            let mut worst: f64 = 0.0;
            for f in &tests {
                if let Ok(v) = dirichlet_existence_obstruction(invs, f, p, n) {
                    worst = worst.max(v.abs());
                }
            }
            obstruction_samples.push(worst);
        }
        if obstruction_samples.len() >= 4 {
            break;
        }
    }
    let rotation_number = rotation_number(invs, c, opts.rotation_iters).ok();
    let verdict = if kernel_arc.is_some() {
        Verdict::NoUniqueness
    } else if obstruction_samples.iter().any(|&v| v > 1e-6) {
        Verdict::NoExistence
    } else {
        Verdict::Inconclusive
    };
    Ok(Diagnosis { kernel_found: kernel_arc.is_some(), kernel_arc, obstruction_samples, rotation_number, verdict })
}

/// `(E₋ p, E₊ p)` for reporting.
pub fn involution_pair(invs: &Involutions, p: BoundaryPoint) -> Result<(BoundaryPoint, BoundaryPoint)> {
    Ok((apply_or_fix(invs.get(Sign::Minus), p)?, apply_or_fix(invs.get(Sign::Plus), p)?))
}
