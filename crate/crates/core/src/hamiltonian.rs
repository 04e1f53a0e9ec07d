//! Radial Hamiltonian picture on circles centered at the origin.
//!
//! Polar coordinates `x = e^ξ cos θ`, `y = e^ξ sin θ`. On every circle the
//! transversal channel is `φ_n = ∂_ξ φ`, so rescaling between circles acts as
//! the identity on `(φ, φ_n)`. In terms of the light-cone coordinates a
//! solution `F(σ₊) + G(σ₋)` has `φ_n = F′σ₊ + G′σ₋` and
//! `∂_θφ = −F′σ₋ + G′σ₊`; the reduced flow transports `F′` and `G′` along
//! characteristic chords.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

#[allow(unused_imports)]
use num_traits::Float;

use crate::characteristics::{annulus_involution, Ring, RingPoint};
use crate::fields::{make_l_field, BoundaryField, Involutions};
use crate::geometry::Domain;
use crate::num::{grid, periodic_integral, Trig, TAU};
use crate::{BoundaryPoint, Error, Result, Sign};

/// Smallest grid accepted by [`CircleField::new`].
pub const MIN_GRID: usize = 256;
/// Largest `|∂_θφ_n − ∂_θφ|` at a light angle accepted by [`ham_vector`].
pub const C0_TOL: f64 = 1e-6;
/// Largest invariance residual accepted by [`reduced_flow_neg`].
pub const MEMBERSHIP_TOL: f64 = 1e-6;

/// `π/4, 3π/4, 5π/4, 7π/4`: the zeros of `cos 2θ`.
pub const LIGHT_ANGLES: [f64; 4] = [FRAC_PI_4, 3.0 * FRAC_PI_4, 5.0 * FRAC_PI_4, 7.0 * FRAC_PI_4];

/// `(φ, φ_n)` on the uniform grid `θ_j = 2πj/M`, with `φ_n = ∂_ξφ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleField {
    pub phi: Vec<f64>,
    pub phi_n: Vec<f64>,
}

impl CircleField {
    pub fn new(phi: Vec<f64>, phi_n: Vec<f64>) -> Result<CircleField> {
        if phi.len() != phi_n.len() {
            return Err(Error::GridMismatch);
        }
        if phi.len() < MIN_GRID {
            return Err(Error::InvalidInput(alloc::format!("circle grid needs at least {MIN_GRID} points")));
        }
        Ok(CircleField { phi, phi_n })
    }

    pub fn sample<F: Fn(f64) -> (f64, f64)>(m: usize, f: F) -> Result<CircleField> {
        let (phi, phi_n) = grid(TAU, m).into_iter().map(f).unzip();
        CircleField::new(phi, phi_n)
    }

    /// Trace of the linear solution `a·x + b·y` on the circle of radius `r`.
    pub fn linear_solution(m: usize, a: f64, b: f64, r: f64) -> Result<CircleField> {
        CircleField::sample(m, |t| {
            let v = r * (a * t.cos() + b * t.sin());
            (v, v)
        })
    }

    /// Read one ring of a field on [`Domain::annulus`] (or the disk, as the
    /// outer ring). The Euclidean outward normal derivative becomes `∂_ξ`, and
    /// the clockwise inner parametrization is turned back into polar angle.
    pub fn from_annulus(u: &BoundaryField, ring: Ring, radius: f64) -> Result<CircleField> {
        match ring {
            Ring::Outer => {
                CircleField::new(u.phi[0].clone(), u.phi_n[0].iter().map(|v| radius * v).collect())
            }
            Ring::Inner => {
                if u.components() < 2 {
                    return Err(Error::GridMismatch);
                }
                let m = u.len(1);
                let idx = |j: usize| (m - j) % m;
                CircleField::new(
                    (0..m).map(|j| u.phi[1][idx(j)]).collect(),
                    (0..m).map(|j| -radius * u.phi_n[1][idx(j)]).collect(),
                )
            }
        }
    }

    /// Channels laid out as the given ring of [`Domain::annulus`] expects.
    pub fn to_annulus(&self, ring: Ring, radius: f64) -> (Vec<f64>, Vec<f64>) {
        let m = self.len();
        match ring {
            Ring::Outer => (self.phi.clone(), self.phi_n.iter().map(|v| v / radius).collect()),
            Ring::Inner => {
                let idx = |j: usize| (m - j) % m;
                (
                    (0..m).map(|j| self.phi[idx(j)]).collect(),
                    (0..m).map(|j| -self.phi_n[idx(j)] / radius).collect(),
                )
            }
        }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn thetas(&self) -> Vec<f64> {
        grid(TAU, self.len())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &CircleField, b: f64) -> Result<CircleField> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch);
        }
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        Ok(CircleField { phi: mix(&self.phi, &other.phi), phi_n: mix(&self.phi_n, &other.phi_n) })
    }

    pub fn scaled(&self, a: f64) -> CircleField {
        CircleField {
            phi: self.phi.iter().map(|v| a * v).collect(),
            phi_n: self.phi_n.iter().map(|v| a * v).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.phi.iter().chain(&self.phi_n).fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Sup-norm distance over both channels.
    pub fn distance(&self, other: &CircleField) -> Result<f64> {
        Ok(self.combine(1.0, other, -1.0)?.max_abs())
    }

    fn trigs(&self) -> (Trig, Trig) {
        (Trig::from_samples(&self.phi, TAU), Trig::from_samples(&self.phi_n, TAU))
    }

    pub fn dphi(&self) -> Vec<f64> {
        Trig::from_samples(&self.phi, TAU).derivative_samples(self.len())
    }
}

/// `H = ½∮ cos 2θ (φ_n² + (∂_θφ)²) dθ`.
pub fn hamiltonian_h(u: &CircleField) -> f64 {
    let dphi = u.dphi();
    let dens: Vec<f64> = u
        .thetas()
        .iter()
        .zip(u.phi_n.iter().zip(&dphi))
        .map(|(t, (n, d))| (2.0 * t).cos() * (n * n + d * d))
        .collect();
    0.5 * periodic_integral(&dens, TAU)
}

/// `p = cos 2θ φ_n − sin 2θ ∂_θφ`, the momentum conjugate to `φ`.
pub fn momentum(u: &CircleField) -> Vec<f64> {
    let dphi = u.dphi();
    u.thetas()
        .iter()
        .enumerate()
        .map(|(j, t)| (2.0 * t).cos() * u.phi_n[j] - (2.0 * t).sin() * dphi[j])
        .collect()
}

/// `ω(u, w) = ∮ (p_u φ_w − p_w φ_u) dθ`, normalized so that `ι_Ȟ ω = −δH`.
pub fn circle_omega(u: &CircleField, w: &CircleField) -> Result<f64> {
    if u.len() != w.len() {
        return Err(Error::GridMismatch);
    }
    let (pu, pw) = (momentum(u), momentum(w));
    let dens: Vec<f64> = (0..u.len()).map(|j| pu[j] * w.phi[j] - pw[j] * u.phi[j]).collect();
    Ok(periodic_integral(&dens, TAU))
}

/// Densities of `(α, β)` against `dθ`:
/// `α = ½(cos 2θ φ_n + (1 − sin 2θ)∂_θφ)`, `β = ½(−cos 2θ φ_n + (1 + sin 2θ)∂_θφ)`.
pub fn circle_forms(u: &CircleField) -> (Vec<f64>, Vec<f64>) {
    let dphi = u.dphi();
    let mut alpha = Vec::with_capacity(u.len());
    let mut beta = Vec::with_capacity(u.len());
    for (j, t) in u.thetas().into_iter().enumerate() {
        let (s, c) = (2.0 * t).sin_cos();
        alpha.push(0.5 * (c * u.phi_n[j] + (1.0 - s) * dphi[j]));
        beta.push(0.5 * (-c * u.phi_n[j] + (1.0 + s) * dphi[j]));
    }
    (alpha, beta)
}

/// `|∂_θφ_n − ∂_θφ|` at the four light angles.
pub fn c0_residuals(u: &CircleField) -> [f64; 4] {
    let (tp, tn) = u.trigs();
    LIGHT_ANGLES.map(|t| (tn.derivative(t) - tp.derivative(t)).abs())
}

/// Ȟ. The second channel is `2φ_n + ∂²_θφ + 2 sin 2θ·D/cos 2θ` with
/// `D = ∂_θφ_n − ∂_θφ`; the quotient takes its limit at the light angles.
pub fn ham_vector(u: &CircleField) -> Result<CircleField> {
    let r = c0_residuals(u).into_iter().fold(0.0, f64::max);
    if r > C0_TOL {
        return Err(Error::C0Violation { residual: r });
    }
    Ok(ham_vector_unchecked(u))
}

fn ham_vector_unchecked(u: &CircleField) -> CircleField {
    let (tp, tn) = u.trigs();
    let dp = tp.derivative_trig();
    let ddp = dp.derivative_trig();
    let dn = tn.derivative_trig();
    let big_d = |t: f64| dn.eval(t) - dp.eval(t);
    let big_d1 = |t: f64| dn.derivative(t) - dp.derivative(t);
    // Remove the (small) light-angle values of D with a smooth interpolant in
    // span{1, sin 2θ, sin θ + cos θ, cos θ − sin θ} so the quotient is regular.
    let d = LIGHT_ANGLES.map(big_d);
    let a = 0.25 * (d[0] + d[1] + d[2] + d[3]);
    let b = 0.25 * (d[0] - d[1] + d[2] - d[3]);
    let c = (d[0] - d[2]) / (2.0 * SQRT_2);
    let e = (d[3] - d[1]) / (2.0 * SQRT_2);
    let corr = |t: f64| {
        let (s, co) = t.sin_cos();
        a + b * (2.0 * t).sin() + c * (s + co) + e * (co - s)
    };
    let corr1 = |t: f64| {
        let (s, co) = t.sin_cos();
        2.0 * b * (2.0 * t).cos() + c * (co - s) - e * (s + co)
    };
    let m = u.len();
    let mut out = Vec::with_capacity(m);
    for t in grid(TAU, m) {
        let nearest = LIGHT_ANGLES
            .iter()
            .copied()
            .min_by(|x, y| {
                let dx = crate::num::wrap_centered(t - x, TAU).abs();
                let dy = crate::num::wrap_centered(t - y, TAU).abs();
                dx.partial_cmp(&dy).unwrap_or(core::cmp::Ordering::Equal)
            })
            .unwrap_or(FRAC_PI_4);
        let delta = crate::num::wrap_centered(t - nearest, TAU);
        let s_l = (2.0 * nearest).sin();
        let q = if delta.abs() < 1e-6 {
            (big_d1(nearest) - corr1(nearest)) / (-2.0 * s_l)
        } else {
            (big_d(t) - corr(t)) / (-s_l * (2.0 * delta).sin())
        };
        out.push(2.0 * tn.eval(t) + ddp.eval(t) + 2.0 * (2.0 * t).sin() * q);
    }
    CircleField { phi: u.phi_n.clone(), phi_n: out }
}

/// One level of the constraint chain: `Ȟᵏu` tested against the light-angle
/// condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintLevel {
    pub level: usize,
    pub residuals: [f64; 4],
    /// `max(1, sup|∂_θφ|, sup|∂_θφ_n|)` of `Ȟᵏu`; the test is relative to it.
    pub scale: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintDiagnostic {
    pub k_max: usize,
    /// Levels in order; the list stops at the first failure.
    pub levels: Vec<ConstraintLevel>,
}

impl ConstraintDiagnostic {
    /// Deepest level `k` with `u ∈ C_k`.
    pub fn deepest_passed(&self) -> Option<usize> {
        self.levels.iter().take_while(|l| l.pass).last().map(|l| l.level)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.levels.iter().find(|l| !l.pass).map(|l| l.level)
    }
}

/// Fourier coefficients below this fraction of the largest are dropped
/// between levels of the chain. Every level differentiates twice, so rounding
/// noise in the top modes would otherwise grow by about `(M/2)²` per level.
pub const CHAIN_NOISE_FLOOR: f64 = 1e-12;

fn denoised(u: &CircleField) -> CircleField {
    let clean = |v: &[f64]| -> Vec<f64> {
        let tr = Trig::from_samples(v, TAU);
        let (a, b) = tr.coefficients();
        let top = a.iter().chain(b).fold(0.0f64, |m, c| m.max(c.abs()));
        let cut = |c: &f64| if c.abs() <= CHAIN_NOISE_FLOOR * top { 0.0 } else { *c };
        Trig::from_coefficients(a.iter().map(cut).collect(), b.iter().map(cut).collect(), TAU).samples(v.len())
    };
    CircleField { phi: clean(&u.phi), phi_n: clean(&u.phi_n) }
}

/// `C_k = {u ∈ C_{k−1} : Ȟu ∈ C_{k−1}}`, i.e. `Ȟʲu ∈ C₀` for `j ≤ k`.
pub fn constraint_chain(u: &CircleField, k_max: usize) -> ConstraintDiagnostic {
    let mut levels = Vec::new();
    let mut cur = u.clone();
    for level in 0..=k_max {
        let residuals = c0_residuals(&cur);
        let (tp, tn) = cur.trigs();
        let m = cur.len();
        let scale = tp
            .derivative_samples(m)
            .into_iter()
            .chain(tn.derivative_samples(m))
            .fold(1.0, |acc: f64, v| acc.max(v.abs()));
        let pass = residuals.iter().all(|r| r.is_finite() && *r <= C0_TOL * scale);
        levels.push(ConstraintLevel { level, residuals, scale, pass });
        if !pass || level == k_max {
            break;
        }
        cur = denoised(&ham_vector_unchecked(&cur));
    }
    ConstraintDiagnostic { k_max, levels }
}

/// Largest `|α(Ȟu) + ∂_θ(cot(θ − π/4)α(u))|` and the `β` analogue with
/// `cot(θ + π/4)`, over grid points farther than `exclusion` from every light
/// angle. The right-hand side is differentiated by central differences.
pub fn form_action_residual(u: &CircleField, exclusion: f64) -> Result<f64> {
    let hu = ham_vector(u)?;
    let (a_u, b_u) = circle_forms(u);
    let (a_h, b_h) = circle_forms(&hu);
    let ta = Trig::from_samples(&a_u, TAU);
    let tb = Trig::from_samples(&b_u, TAU);
    let h = 1e-4;
    let ga = |t: f64| ta.eval(t) / (t - FRAC_PI_4).tan();
    let gb = |t: f64| tb.eval(t) / (t + FRAC_PI_4).tan();
    let mut worst: f64 = 0.0;
    for (j, t) in hu.thetas().into_iter().enumerate() {
        if LIGHT_ANGLES.iter().any(|l| crate::num::wrap_centered(t - l, TAU).abs() < exclusion) {
            continue;
        }
        let ra = -(ga(t + h) - ga(t - h)) / (2.0 * h);
        let rb = -(gb(t + h) - gb(t - h)) / (2.0 * h);
        worst = worst.max((a_h[j] - ra).abs()).max((b_h[j] - rb).abs());
    }
    Ok(worst)
}

/// Invariance residuals for membership in `C(−ξ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CxiResidual {
    /// `sup |α(θ) + α(π/2 − θ)|` on `U₋(ξ)`.
    pub alpha: f64,
    /// `sup |β(θ) + β(−π/2 − θ)|` on `U₊(ξ)`.
    pub beta: f64,
}

impl CxiResidual {
    pub fn max(&self) -> f64 {
        self.alpha.max(self.beta)
    }
}

/// Half-width `θ₀ = arccos(e^{−ξ})` of the arcs where chords miss the hole.
pub fn arc_half_width(xi: f64) -> f64 {
    (-xi).exp().acos()
}

const ARC_SAMPLES: usize = 129;

/// `E∓`-invariance of `α` on `U₋(ξ)` (arcs centered at `π/4`, `−3π/4`) and of
/// `β` on `U₊(ξ)` (centered at `−π/4`, `3π/4`). As 1-forms on the circle,
/// invariance under an orientation-reversing involution flips the density's
/// sign.
pub fn c_xi_membership(u: &CircleField, xi: f64) -> Result<CxiResidual> {
    if !(xi > 0.0) {
        return Err(Error::InvalidInput("flow time must be positive".into()));
    }
    let theta0 = arc_half_width(xi);
    let (a, b) = circle_forms(u);
    let ta = Trig::from_samples(&a, TAU);
    let tb = Trig::from_samples(&b, TAU);
    let sweep = |tr: &Trig, centers: [f64; 2], mirror: f64| -> f64 {
        let mut worst: f64 = 0.0;
        for c in centers {
            for i in 0..ARC_SAMPLES {
                let s = (2 * i + 1) as f64 / ARC_SAMPLES as f64 - 1.0;
                let t = c + theta0 * s;
                worst = worst.max((tr.eval(t) + tr.eval(mirror - t)).abs());
            }
        }
        worst
    };
    Ok(CxiResidual {
        alpha: sweep(&ta, [FRAC_PI_4, -3.0 * FRAC_PI_4], FRAC_PI_2),
        beta: sweep(&tb, [-FRAC_PI_4, 3.0 * FRAC_PI_4], -FRAC_PI_2),
    })
}

/// `F′(σ₊)` and `G′(σ₋)` on the unit circle from `(φ, φ_n)`.
fn cone_derivatives(u: &CircleField) -> (Trig, Trig) {
    let dphi = u.dphi();
    let mut a = Vec::with_capacity(u.len());
    let mut b = Vec::with_capacity(u.len());
    for (j, t) in u.thetas().into_iter().enumerate() {
        let (s, c) = t.sin_cos();
        let (sp, sm) = (s + c, s - c);
        a.push(0.5 * (u.phi_n[j] * sp - dphi[j] * sm));
        b.push(0.5 * (u.phi_n[j] * sm + dphi[j] * sp));
    }
    (Trig::from_samples(&a, TAU), Trig::from_samples(&b, TAU))
}

/// `F_{−ξ}`: outer data on the unit circle to inner data on `r = e^{−ξ}` for
/// the annulus between them, read back on the unit circle through the
/// identity `(φ, φ_n) ↦ (φ, φ_n)`.
///
/// `F′` at an inner point is carried from the outer end of its `∂₋` chord and
/// `G′` from the outer end of its `∂₊` chord. The additive constant comes from
/// the ray `θ = π/4`, itself a `∂₊` characteristic:
/// `φ_in(π/4) = φ(π/4) + ∫_{π/4}^{π/4+θ₀} α`.
pub fn reduced_flow_neg(u: &CircleField, xi: f64) -> Result<CircleField> {
    let res = c_xi_membership(u, xi)?.max();
    if res > MEMBERSHIP_TOL {
        return Err(Error::MembershipFails { residual: res });
    }
    let r1 = (-xi).exp();
    let m = u.len();
    let (ta, tb) = cone_derivatives(u);
    let mut phi_n = Vec::with_capacity(m);
    let mut dphi = Vec::with_capacity(m);
    for t in grid(TAU, m) {
        let q = RingPoint { ring: Ring::Inner, angle: t };
        let pm = annulus_involution(r1, 1.0, Sign::Minus, q)?;
        let pp = annulus_involution(r1, 1.0, Sign::Plus, q)?;
        if pm.ring != Ring::Outer || pp.ring != Ring::Outer {
            return Err(Error::PathFailure("inner chord does not reach the outer circle".into()));
        }
        let (fa, gb) = (ta.eval(pm.angle), tb.eval(pp.angle));
        let (s, c) = t.sin_cos();
        let (sp, sm) = (r1 * (s + c), r1 * (s - c));
        phi_n.push(fa * sp + gb * sm);
        dphi.push(-fa * sm + gb * sp);
    }
    let total = periodic_integral(&dphi, TAU);
    let mass = periodic_integral(&dphi.iter().map(|v| v.abs()).collect::<Vec<_>>(), TAU);
    if total.abs() > 1e-8 * mass.max(1.0) {
        return Err(Error::NonExact { component: 1, period: total });
    }
    let (prim, _) = Trig::from_samples(&dphi, TAU).antiderivative();
    let (alpha, _) = circle_forms(u);
    let (a_prim, a_mean) = Trig::from_samples(&alpha, TAU).antiderivative();
    let theta0 = arc_half_width(xi);
    let along = a_prim.eval(FRAC_PI_4 + theta0) - a_prim.eval(FRAC_PI_4) + a_mean * theta0;
    let anchor = Trig::from_samples(&u.phi, TAU).eval(FRAC_PI_4) + along;
    let base = prim.eval(FRAC_PI_4);
    let phi = prim.samples(m).into_iter().map(|v| v - base + anchor).collect();
    CircleField::new(phi, phi_n)
}

/// Largest distance between `F_{−ξ′}∘F_{−ξ}` (through the intermediate
/// circle) and `F_{−ξ−ξ′}` over the samples. Both sides land in the target
/// phase space, where nothing is quotiented out.
pub fn flow_composition_check(xi: f64, xi2: f64, samples: &[CircleField]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for u in samples {
        let step = |v: &CircleField, s: f64| if s == 0.0 { Ok(v.clone()) } else { reduced_flow_neg(v, s) };
        let direct = step(u, xi + xi2)?;
        let composed = step(&step(u, xi)?, xi2)?;
        worst = worst.max(direct.distance(&composed)?);
    }
    Ok(worst)
}

/// Relative error of the Richardson extrapolation of `(u − F_{−h}(u))/h`
/// from `h₁` and `h₂ = h₁/2` against `Ȟu`.
pub fn flow_derivative_error(u: &CircleField, h1: f64) -> Result<f64> {
    let quotient = |h: f64| -> Result<CircleField> { u.combine(1.0, &reduced_flow_neg(u, h)?, -1.0).map(|d| d.scaled(1.0 / h)) };
    let extrapolated = quotient(0.5 * h1)?.combine(2.0, &quotient(h1)?, -1.0)?;
    let hu = ham_vector(u)?;
    Ok(extrapolated.distance(&hu)? / hu.max_abs().max(f64::MIN_POSITIVE))
}

/// Coefficients of a member of `C(−ξ)` built on the annulus `e^{−ξ} ≤ r ≤ 1`.
/// `f = g₀ sin σ₊ + g₁ σ₊²/2 + s₀ b(σ₊) sign σ₋` and
/// `g = g₂ cos σ₋ + g₃ σ₋ + s₁ b(σ₋) sign σ₊`, where `b` is supported on the
/// chords that cross the hole, so each side of the hole may carry its own
/// value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemberCoefficients {
    pub global: [f64; 4],
    pub side: [f64; 2],
}

fn side_bump(s: f64, w: f64) -> f64 {
    let z = s / w;
    if z.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - z * z).powi(8)
    }
}

/// Outer and inner traces (on unit-circle grids) of the element of `L` for
/// the annulus `e^{−ξ} ≤ r ≤ 1` with the given coefficients.
pub fn annulus_member(xi: f64, m: usize, k: &MemberCoefficients) -> Result<(CircleField, CircleField)> {
    if !(xi > 0.0) {
        return Err(Error::InvalidInput("flow time must be positive".into()));
    }
    let r1 = (-xi).exp();
    let domain = Domain::annulus(r1, 1.0);
    let invs = Involutions::new(&domain)?;
    let w = 0.9 * SQRT_2 * r1;
    let cone = |p: BoundaryPoint| {
        let [x, y] = domain.position(p);
        (x + y, y - x)
    };
    let sgn = |v: f64| if v >= 0.0 { 1.0 } else { -1.0 };
    let f = |p: BoundaryPoint| {
        let (sp, sm) = cone(p);
        k.global[0] * sp.sin() + 0.5 * k.global[1] * sp * sp + k.side[0] * side_bump(sp, w) * sgn(sm)
    };
    let g = |p: BoundaryPoint| {
        let (sp, sm) = cone(p);
        k.global[2] * sm.cos() + k.global[3] * sm + k.side[1] * side_bump(sm, w) * sgn(sp)
    };
    let u = make_l_field(&invs, f, g, m)?;
    Ok((CircleField::from_annulus(&u, Ring::Outer, 1.0)?, CircleField::from_annulus(&u, Ring::Inner, r1)?))
}

/// Order of contact of the kernel profiles with zero.
const KERNEL_ORDER: i32 = 12;

/// Sampled elements of `C(−ξ)^⊥ = ker F_{−ξ}`: `F(σ₊) + G(σ₋)` with `F`, `G`
/// vanishing to high order at `±√2 e^{−ξ}` and zero between, so `α` and `β`
/// vanish off `U∓(ξ)` and the anchor `φ(π/4) + ∫α` is zero.
pub fn kernel_basis(xi: f64, m: usize, count: usize) -> Result<Vec<CircleField>> {
    let a = SQRT_2 * (-xi).exp();
    let span = SQRT_2 - a;
    // Profile s^n on s = (σ − a)/span > 0, with its σ-derivative.
    let flat = move |sigma: f64| -> (f64, f64) {
        let s = (sigma - a) / span;
        if s <= 0.0 {
            (0.0, 0.0)
        } else {
            (s.powi(KERNEL_ORDER), KERNEL_ORDER as f64 * s.powi(KERNEL_ORDER - 1) / span)
        }
    };
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let power = (k / 4) as i32;
        let variant = k % 4;
        let profile = move |sigma: f64| -> (f64, f64) {
            let mirror = if variant % 2 == 0 { 1.0 } else { -1.0 };
            let (e, de) = flat(mirror * sigma);
            let p = sigma.powi(power);
            let dp = if power == 0 { 0.0 } else { power as f64 * sigma.powi(power - 1) };
            (e * p, mirror * de * p + e * dp)
        };
        out.push(CircleField::sample(m, |t| {
            let (s, c) = t.sin_cos();
            let (sp, sm) = (s + c, s - c);
            if variant < 2 {
                let (v, dv) = profile(sp);
                (v, dv * sp)
            } else {
                let (v, dv) = profile(sm);
                (v, dv * sm)
            }
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn field(m: usize, f: impl Fn(f64) -> (f64, f64)) -> CircleField {
        CircleField::sample(m, f).unwrap()
    }

    #[test]
    fn hamiltonian_values() {
        assert!(hamiltonian_h(&field(256, |_| (2.5, 0.0))).abs() < 1e-12);
        assert!((hamiltonian_h(&field(256, |t| (0.0, t.cos()))) - PI / 4.0).abs() < 1e-12);
        assert!((hamiltonian_h(&field(256, |t| (t.cos(), 0.0))) + PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn small_grid_rejected() {
        assert!(CircleField::sample(64, |_| (0.0, 0.0)).is_err());
    }

    #[test]
    fn vector_field_examples() {
        let c = 0.7;
        let h = ham_vector(&field(256, |_| (0.0, c))).unwrap();
        assert!(h.phi.iter().all(|v| (v - c).abs() < 1e-12));
        assert!(h.phi_n.iter().all(|v| (v - 2.0 * c).abs() < 1e-10));

        let s = field(256, |t| (t.sin(), t.sin()));
        assert!(ham_vector(&s).unwrap().max_abs().is_finite());

        let bad = field(256, |t| (t.cos(), 0.0));
        let r = c0_residuals(&bad);
        assert!((r[0] - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(ham_vector(&bad), Err(Error::C0Violation { .. })));
    }

    #[test]
    fn global_solution_is_fixed_by_the_vector_field() {
        let u = CircleField::linear_solution(256, SQRT_2, 0.0, 1.0).unwrap();
        let h = ham_vector(&u).unwrap();
        assert!(h.distance(&u).unwrap() < 1e-10);
        let d = constraint_chain(&u, 6);
        assert_eq!(d.deepest_passed(), Some(6));
        assert_eq!(constraint_chain(&field(256, |t| (t.cos(), 0.0)), 6).first_failure(), Some(0));
    }

    #[test]
    fn forms_transform_as_stated() {
        let u = field(512, |t| (0.3 * t.sin() + 0.1 * (2.0 * t).cos(), 0.3 * t.sin() + 0.1 * (2.0 * t).cos() + 0.2));
        assert!(form_action_residual(&u, 0.1).unwrap() < 1e-5);
    }

    #[test]
    fn linear_solution_flows_to_its_inner_trace() {
        let u = CircleField::linear_solution(256, SQRT_2, 0.0, 1.0).unwrap();
        let xi = 2.0f64.ln();
        assert!(c_xi_membership(&u, xi).unwrap().max() < 1e-8);
        let inner = reduced_flow_neg(&u, xi).unwrap();
        let exact = CircleField::linear_solution(256, SQRT_2, 0.0, 0.5).unwrap();
        assert!(inner.distance(&exact).unwrap() < 1e-10);
    }

    #[test]
    fn kernel_flows_to_zero() {
        let xi = 0.5;
        for v in kernel_basis(xi, 512, 8).unwrap() {
            assert!(c_xi_membership(&v, xi).unwrap().max() < 1e-9);
            let w = reduced_flow_neg(&v, xi).unwrap();
            assert!(w.max_abs() < 1e-9 * v.max_abs().max(1.0), "{}", w.max_abs());
        }
    }

    #[test]
    fn member_flows_to_its_inner_trace() {
        let k = MemberCoefficients { global: [0.4, -0.3, 0.5, 0.2], side: [0.8, -0.6] };
        let xi = 0.4;
        let (outer, inner) = annulus_member(xi, 512, &k).unwrap();
        assert!(c_xi_membership(&outer, xi).unwrap().max() < 1e-8);
        let flowed = reduced_flow_neg(&outer, xi).unwrap();
        let d = flowed.distance(&inner).unwrap();
        assert!(d < 1e-6, "{d}");
    }
}
