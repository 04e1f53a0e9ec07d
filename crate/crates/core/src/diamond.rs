//! The light-like diamond `σ₊⁰ ≤ σ₊ ≤ σ₊¹, σ₋⁰ ≤ σ₋ ≤ σ₋¹`, handled in
//! characteristic coordinates.
//!
//! Vertices are `a = (σ₊⁰, σ₋⁰)`, `b = (σ₊¹, σ₋⁰)`, `c = (σ₊¹, σ₋¹)`,
//! `d = (σ₊⁰, σ₋¹)`; the boundary runs `a → b → c → d → a`, counterclockwise
//! in `(x, y)`, with `ε = +1` on `ab` and `dc` (parallel to `∂₊`) and `−1` on
//! `bc` and `ad`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::num::gauss_legendre;
use crate::{Error, Result};

/// Edge functions of the diamond: `ab`, `dc` over `σ₊`, `ad`, `bc` over `σ₋`,
/// each on a uniform grid including both endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct DiamondField {
    pub sp: [f64; 2],
    pub sm: [f64; 2],
    pub ab: Vec<f64>,
    pub dc: Vec<f64>,
    pub ad: Vec<f64>,
    pub bc: Vec<f64>,
}

pub const MIN_NODES: usize = 65;

/// `(φ_a, φ_b, φ_c, φ_d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertices {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl DiamondField {
    pub fn new(sp: [f64; 2], sm: [f64; 2], ab: Vec<f64>, dc: Vec<f64>, ad: Vec<f64>, bc: Vec<f64>) -> Result<DiamondField> {
        if !(sp[1] > sp[0]) || !(sm[1] > sm[0]) {
            return Err(Error::InvalidInput("diamond box must have positive extent".into()));
        }
        if ab.len() != dc.len() || ad.len() != bc.len() || ab.len() < MIN_NODES || ad.len() < MIN_NODES {
            return Err(Error::GridMismatch);
        }
        let n = ab.len() - 1;
        let k = ad.len() - 1;
        let joined = ab[0] == ad[0] && ab[n] == bc[0] && dc[n] == bc[k] && dc[0] == ad[k];
        if !joined {
            return Err(Error::InvalidInput("edge functions disagree at a vertex".into()));
        }
        Ok(DiamondField { sp, sm, ab, dc, ad, bc })
    }

    /// Samples a function of `(σ₊, σ₋)` on the four edges.
    pub fn sample<F: Fn(f64, f64) -> f64>(sp: [f64; 2], sm: [f64; 2], n: usize, phi: F) -> Result<DiamondField> {
        let nodes = n.max(MIN_NODES);
        let xs = nodes_on(sp, nodes);
        let ys = nodes_on(sm, nodes);
        DiamondField::new(
            sp,
            sm,
            xs.iter().map(|&s| phi(s, sm[0])).collect(),
            xs.iter().map(|&s| phi(s, sm[1])).collect(),
            ys.iter().map(|&s| phi(sp[0], s)).collect(),
            ys.iter().map(|&s| phi(sp[1], s)).collect(),
        )
    }

    pub fn vertices(&self) -> Vertices {
        Vertices { a: self.ab[0], b: self.bc[0], c: self.bc[self.bc.len() - 1], d: self.ad[self.ad.len() - 1] }
    }

    pub fn same_grid(&self, other: &DiamondField) -> bool {
        self.sp == other.sp && self.sm == other.sm && self.ab.len() == other.ab.len() && self.ad.len() == other.ad.len()
    }

    pub fn combine(&self, a: f64, other: &DiamondField, b: f64) -> Result<DiamondField> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| a * u + b * v).collect::<Vec<_>>();
        Ok(DiamondField {
            sp: self.sp,
            sm: self.sm,
            ab: mix(&self.ab, &other.ab),
            dc: mix(&self.dc, &other.dc),
            ad: mix(&self.ad, &other.ad),
            bc: mix(&self.bc, &other.bc),
        })
    }

    /// `(Σ_edges ∫ φ² + (φ')²)^{1/2}` on the grids.
    pub fn norm(&self) -> f64 {
        let edge = |v: &[f64], span: [f64; 2]| {
            let h = (span[1] - span[0]) / (v.len() - 1) as f64;
            let vals: f64 = v.iter().map(|x| x * x).sum::<f64>() * h;
            let slopes: f64 = v.windows(2).map(|w| ((w[1] - w[0]) / h).powi(2)).sum::<f64>() * h;
            vals + slopes
        };
        (edge(&self.ab, self.sp) + edge(&self.dc, self.sp) + edge(&self.ad, self.sm) + edge(&self.bc, self.sm)).sqrt()
    }
}

fn nodes_on(span: [f64; 2], nodes: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (0..nodes).map(|j| span[0] + (span[1] - span[0]) * j as f64 / (nodes - 1) as f64).collect();
    // Vertices are shared between edges and compared exactly.
    out[nodes - 1] = span[1];
    out
}

/// `∫ dφ·ψ` over one edge in increasing parameter, by the midpoint-product
/// rule `Σ (φ_{j+1} − φ_j)(ψ_j + ψ_{j+1})/2`: exact for `ψ` constant, and
/// `∫dφ·ψ + ∫dψ·φ = [φψ]` holds exactly.
fn edge_pairing(phi: &[f64], psi: &[f64]) -> f64 {
    phi.windows(2).zip(psi.windows(2)).map(|(p, q)| (p[1] - p[0]) * 0.5 * (q[0] + q[1])).sum()
}

/// `∮ ε dφ·ψ` along `a → b → c → d → a`.
fn signed_boundary(u: &DiamondField, w: &DiamondField) -> f64 {
    edge_pairing(&u.ab, &w.ab) - edge_pairing(&u.bc, &w.bc) - edge_pairing(&u.dc, &w.dc) + edge_pairing(&u.ad, &w.ad)
}

/// `ω(φ, ψ) = 2∮ε dφ·ψ + 2(φ_aψ_a − φ_bψ_b + φ_cψ_c − φ_dψ_d)`.
pub fn diamond_omega(u: &DiamondField, w: &DiamondField) -> Result<f64> {
    if !u.same_grid(w) {
        return Err(Error::GridMismatch);
    }
    let (p, q) = (u.vertices(), w.vertices());
    Ok(2.0 * signed_boundary(u, w) + 2.0 * (p.a * q.a - p.b * q.b + p.c * q.c - p.d * q.d))
}

/// Functions accepted for `f` and `g`.
#[derive(Clone, Debug, PartialEq)]
pub enum EdgeFunction {
    Id,
    Const(f64),
    /// `sin(k s)`.
    Sin(f64),
    /// `Σ c_j s^j`.
    Poly(Vec<f64>),
}

impl EdgeFunction {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            EdgeFunction::Id => s,
            EdgeFunction::Const(c) => *c,
            EdgeFunction::Sin(k) => (k * s).sin(),
            EdgeFunction::Poly(c) => c.iter().rev().fold(0.0, |acc, &x| acc * s + x),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            EdgeFunction::Id => 1.0,
            EdgeFunction::Const(_) => 0.0,
            EdgeFunction::Sin(k) => k * (k * s).cos(),
            EdgeFunction::Poly(c) => c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (j, &x)| acc * s + j as f64 * x),
        }
    }
}

impl FromStr for EdgeFunction {
    type Err = Error;

    fn from_str(text: &str) -> Result<EdgeFunction> {
        let bad = || Error::InvalidInput(alloc::format!("unknown function '{}'", text));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        match text.split_once(':') {
            None if text.trim() == "id" => Ok(EdgeFunction::Id),
            Some(("const", v)) => Ok(EdgeFunction::Const(num(v)?)),
            Some(("sin", v)) => Ok(EdgeFunction::Sin(num(v)?)),
            Some(("poly", v)) => Ok(EdgeFunction::Poly(v.split(',').map(num).collect::<Result<_>>()?)),
            _ => Err(bad()),
        }
    }
}

impl core::fmt::Display for EdgeFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EdgeFunction::Id => write!(f, "id"),
            EdgeFunction::Const(c) => write!(f, "const:{}", c),
            EdgeFunction::Sin(k) => write!(f, "sin:{}", k),
            EdgeFunction::Poly(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
        }
    }
}

/// Edge restrictions of `f(σ₊) + g(σ₋)`.
pub fn diamond_l<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(sp: [f64; 2], sm: [f64; 2], f: F, g: G, n: usize) -> Result<DiamondField> {
    DiamondField::sample(sp, sm, n, |a, b| f(a) + g(b))
}

/// Largest deviation of `ab − dc` and `ad − bc` from constants.
pub fn decomposition_residual(u: &DiamondField) -> f64 {
    let spread = |x: &[f64], y: &[f64]| {
        let d: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
        let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    spread(&u.ab, &u.dc).max(spread(&u.ad, &u.bc))
}

pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// `½(−φ_a² + φ_b² − φ_c² + φ_d²)` on `L`.
pub fn hj_action(u: &DiamondField) -> Result<f64> {
    let r = decomposition_residual(u);
    let scale = u.ab.iter().chain(&u.ad).fold(1.0f64, |s, v| s.max(v.abs()));
    if r > MEMBERSHIP_TOL * scale {
        return Err(Error::NotInL { residual: r });
    }
    let v = u.vertices();
    Ok(0.5 * (-v.a * v.a + v.b * v.b - v.c * v.c + v.d * v.d))
}

/// `½∮ε φ dφ` by the edge rule.
pub fn hj_boundary(u: &DiamondField) -> f64 {
    0.5 * signed_boundary(u, u)
}

/// `½∫_D ((∂_xφ)² − (∂_yφ)²) dx dy` for `φ = f(σ₊) + g(σ₋)`, by tensor
/// Gauss–Legendre in `(σ₊, σ₋)` with `dx dy = ½ dσ₊ dσ₋`.
pub fn bulk_action<F, G>(sp: [f64; 2], sm: [f64; 2], df: F, dg: G, panels: usize) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let (x, w) = gauss_legendre(12);
    let nodes = |span: [f64; 2]| -> Vec<(f64, f64)> {
        let h = (span[1] - span[0]) / panels as f64;
        let mut out = Vec::with_capacity(panels * x.len());
        for p in 0..panels {
            for (xi, wi) in x.iter().zip(&w) {
                out.push((span[0] + h * (p as f64 + 0.5 * (xi + 1.0)), 0.5 * h * wi));
            }
        }
        out
    };
    let (ps, ms) = (nodes(sp), nodes(sm));
    let mut total = 0.0;
    for &(a, wa) in &ps {
        let fa = df(a);
        for &(b, wb) in &ms {
            let gb = dg(b);
            // ∂_x = ∂₊ − ∂₋ and ∂_y = ∂₊ + ∂₋ in terms of σ-derivatives.
            let (phi_x, phi_y) = (fa - gb, fa + gb);
            total += wa * wb * 0.5 * (phi_x * phi_x - phi_y * phi_y) * 0.5;
        }
    }
    total
}

/// Outcome of the coisotropy test.
#[derive(Clone, Debug, PartialEq)]
pub enum PerpClass {
    /// `ψ = f_ψ(σ₊) + g_ψ(σ₋)` with the recovered edge samples.
    InL { f: Vec<f64>, g: Vec<f64> },
    /// An element of `L` pairing nontrivially with `ψ`.
    NotInPerp { witness: DiamondField, omega: f64 },
    /// Neither criterion met within the probe family.
    Inconclusive { residual: f64 },
}

/// Tests `ψ^{ab} − ψ^{dc}` and `ψ^{ad} − ψ^{bc}` for constancy. When they are
/// not constant, searches `L` elements with `f' = cos(kπ s)` or
/// `g' = cos(kπ s)` (`1 ≤ k ≤ K`, zero total change) for a witness.
pub fn diamond_perp_certificate(w: &DiamondField, k_max: usize) -> Result<PerpClass> {
    let residual = decomposition_residual(w);
    if residual < 1e-8 {
        let f = w.ab.iter().map(|v| v - w.ab[0]).collect();
        return Ok(PerpClass::InL { f, g: w.ad.clone() });
    }
    let (sp, sm) = (w.sp, w.sm);
    let n = w.ab.len().max(w.ad.len());
    let mut best: Option<(DiamondField, f64)> = None;
    for k in 1..=k_max.max(1) {
        let kk = k as f64 * core::f64::consts::PI;
        let lp = sp[1] - sp[0];
        let lm = sm[1] - sm[0];
        let fk = move |s: f64| lp / kk * (kk * (s - sp[0]) / lp).sin();
        let gk = move |s: f64| lm / kk * (kk * (s - sm[0]) / lm).sin();
        for cand in [
            DiamondField::sample(sp, sm, n, |a, _| fk(a))?,
            DiamondField::sample(sp, sm, n, |_, b| gk(b))?,
        ] {
            if !cand.same_grid(w) {
                return Err(Error::GridMismatch);
            }
            let v = diamond_omega(&cand, w)?;
            if best.as_ref().map_or(true, |(_, b)| v.abs() > b.abs()) {
                best = Some((cand, v));
            }
        }
    }
    match best {
        Some((witness, omega)) if omega.abs() > 1e-6 => Ok(PerpClass::NotInPerp { witness, omega }),
        _ => Ok(PerpClass::Inconclusive { residual }),
    }
}

/// `max |ω(b_i, b_j)| / (‖b_i‖ ‖b_j‖)`.
pub fn diamond_isotropy(basis: &[DiamondField]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for u in basis {
        for w in basis {
            let d = u.norm() * w.norm();
            if d > 0.0 {
                worst = worst.max(diamond_omega(u, w)?.abs() / d);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: [f64; 2] = [0.0, 1.0];

    #[test]
    fn unit_vertices_and_action() {
        let u = diamond_l(UNIT, UNIT, |s| s, |s| s, 64).unwrap();
        assert_eq!(u.vertices(), Vertices { a: 0.0, b: 1.0, c: 2.0, d: 1.0 });
        assert_eq!(hj_action(&u).unwrap(), -1.0);
        assert!((hj_boundary(&u) + 1.0).abs() < 1e-13);
        assert!((bulk_action(UNIT, UNIT, |_| 1.0, |_| 1.0, 2) + 1.0).abs() < 1e-14);
        let v = diamond_l(UNIT, UNIT, |s| s, |_| 0.0, 64).unwrap();
        assert_eq!(hj_action(&v).unwrap(), 0.0);
    }

    #[test]
    fn constant_pairing() {
        let c = DiamondField::sample(UNIT, UNIT, 64, |_, _| 1.0).unwrap();
        // ψ_a = 1, the other vertices 0.
        let psi = DiamondField::sample(UNIT, UNIT, 64, |a, b| (1.0 - a) * (1.0 - b)).unwrap();
        assert!((diamond_omega(&c, &psi).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(diamond_omega(&psi, &psi).unwrap(), 0.0);
    }

    #[test]
    fn isotropy_of_l() {
        let u = diamond_l(UNIT, UNIT, |s| s, |_| 0.0, 64).unwrap();
        let w = diamond_l(UNIT, UNIT, |_| 0.0, |s| s, 64).unwrap();
        assert!(diamond_omega(&u, &w).unwrap().abs() < 1e-14);
        let f = diamond_l(UNIT, [-0.5, 2.0], |s| (3.0 * s).sin(), |s| s * s * s, 80).unwrap();
        let g = diamond_l(UNIT, [-0.5, 2.0], |s| s.exp(), |s| (2.0 * s).cos(), 80).unwrap();
        assert!(diamond_isotropy(&[u.clone(), w]).unwrap() < 1e-14);
        assert!(diamond_omega(&f, &g).unwrap().abs() < 1e-12);
    }

    #[test]
    fn perp_certificate() {
        let u = diamond_l(UNIT, UNIT, |s| s * s, |s| s.sin(), 64).unwrap();
        match diamond_perp_certificate(&u, 4).unwrap() {
            PerpClass::InL { f, .. } => assert!((f[64] - 1.0).abs() < 1e-14),
            other => panic!("{:?}", other),
        }
        let pi = core::f64::consts::PI;
        let w = DiamondField::sample(UNIT, UNIT, 64, |a, b| if b == 0.0 { (pi * a).sin() } else { 0.0 }).unwrap();
        match diamond_perp_certificate(&w, 4).unwrap() {
            PerpClass::NotInPerp { omega, .. } => assert!(omega.abs() > 1e-6),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn parse_functions() {
        assert_eq!("id".parse::<EdgeFunction>().unwrap(), EdgeFunction::Id);
        assert_eq!("poly:1,0,2".parse::<EdgeFunction>().unwrap().eval(2.0), 9.0);
        assert_eq!("poly:1,0,2".parse::<EdgeFunction>().unwrap().derivative(2.0), 8.0);
        assert!("cos:1".parse::<EdgeFunction>().is_err());
    }
}
