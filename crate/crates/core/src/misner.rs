//! The Misner cylinder `S¹ × [−1, 1]` with metric `dx dy − y dx²`, and its
//! halves `S¹ × [−1, 0]` and `S¹ × [0, 1]`.
//!
//! Boundary data are four channels `(φ^a, φ_n^a, φ^b, φ_n^b)` on uniform
//! grids in `x`, for the lower (`a`) and upper (`b`) boundary circle. The
//! transversal field is `2∂_y − ∂_x` on the lower circle and `2∂_y + ∂_x` on
//! the upper one. On the null circle `y = 0` the boundary form only sees
//! `φ`: it is `±∮ δφ ∧ δ∂_xφ`, so `φ_n` there is in the kernel of `ω`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::characteristics::{trace_null, Outcome};
use crate::geometry::Domain;
use crate::num::{grid, periodic_integral, rank, svd, Trig, TAU};
use crate::{BoundaryPoint, Error, Result, Sign};

pub const MIN_GRID: usize = 256;
/// Relative singular-value threshold for the rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Which piece of the cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MisnerPiece {
    /// `S¹ × [−1, 1]`.
    Full,
    /// `S¹ × [−1, 0]`: the upper boundary is the closed null curve.
    Lower,
    /// `S¹ × [0, 1]`: the lower boundary is the closed null curve.
    Upper,
}

impl MisnerPiece {
    pub fn as_str(self) -> &'static str {
        match self {
            MisnerPiece::Full => "full",
            MisnerPiece::Lower => "lower",
            MisnerPiece::Upper => "upper",
        }
    }
}

impl core::str::FromStr for MisnerPiece {
    type Err = Error;

    fn from_str(s: &str) -> Result<MisnerPiece> {
        match s {
            "full" => Ok(MisnerPiece::Full),
            "lower" => Ok(MisnerPiece::Lower),
            "upper" => Ok(MisnerPiece::Upper),
            _ => Err(Error::InvalidInput(alloc::format!("unknown cylinder piece {s:?}"))),
        }
    }
}

/// `(φ^in, φ_n^in, φ^out, φ_n^out)` on a shared grid.
#[derive(Clone, Debug, PartialEq)]
pub struct MisnerField {
    pub phi_in: Vec<f64>,
    pub phi_n_in: Vec<f64>,
    pub phi_out: Vec<f64>,
    pub phi_n_out: Vec<f64>,
}

impl MisnerField {
    pub fn new(phi_in: Vec<f64>, phi_n_in: Vec<f64>, phi_out: Vec<f64>, phi_n_out: Vec<f64>) -> Result<MisnerField> {
        let m = phi_in.len();
        if phi_n_in.len() != m || phi_out.len() != m || phi_n_out.len() != m {
            return Err(Error::GridMismatch);
        }
        if m < MIN_GRID {
            return Err(Error::InvalidInput(alloc::format!("cylinder grid needs at least {MIN_GRID} points")));
        }
        Ok(MisnerField { phi_in, phi_n_in, phi_out, phi_n_out })
    }

    pub fn sample<F: Fn(f64) -> [f64; 4]>(m: usize, f: F) -> Result<MisnerField> {
        let mut ch = [Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m)];
        for x in grid(TAU, m) {
            for (c, v) in f(x).into_iter().enumerate() {
                ch[c].push(v);
            }
        }
        let [a, b, c, d] = ch;
        MisnerField::new(a, b, c, d)
    }

    pub fn len(&self) -> usize {
        self.phi_in.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi_in.is_empty()
    }

    pub fn channels(&self) -> [&[f64]; 4] {
        [&self.phi_in, &self.phi_n_in, &self.phi_out, &self.phi_n_out]
    }
}

fn derivative(v: &[f64]) -> Vec<f64> {
    Trig::from_samples(v, TAU).derivative_samples(v.len())
}

/// `(g, −g′, g, g′)`: boundary values of the solutions `φ = g(x)`.
pub fn misner_l(g: &Trig, m: usize) -> Result<MisnerField> {
    MisnerField::sample(m, |x| {
        let (v, d) = g.eval_with_derivative(x);
        [v, -d, v, d]
    })
}

/// Same as [`misner_l`] for a function given pointwise with its derivative.
pub fn misner_l_with<F: Fn(f64) -> (f64, f64)>(g: F, m: usize) -> Result<MisnerField> {
    MisnerField::sample(m, |x| {
        let (v, d) = g(x);
        [v, -d, v, d]
    })
}

/// `sup |∂_xφ^in − φ_n^in − ∂_xφ^out − φ_n^out|`.
pub fn misner_orth_residual(u: &MisnerField) -> f64 {
    let (di, dout) = (derivative(&u.phi_in), derivative(&u.phi_out));
    (0..u.len()).fold(0.0, |m: f64, j| m.max((di[j] - u.phi_n_in[j] - dout[j] - u.phi_n_out[j]).abs()))
}

/// `ω(u, w) = ∮ (φ^in ψ_n^in − ψ^in φ_n^in + φ^out ψ_n^out − ψ^out φ_n^out) dx`
/// on the full cylinder.
pub fn misner_symplectic(u: &MisnerField, w: &MisnerField) -> Result<f64> {
    piece_symplectic(MisnerPiece::Full, u, w)
}

/// The boundary form of a piece. A null boundary circle contributes
/// `±∮ (φ ∂_xψ − ψ ∂_xφ) dx`, with the sign of its orientation.
pub fn piece_symplectic(piece: MisnerPiece, u: &MisnerField, w: &MisnerField) -> Result<f64> {
    if u.len() != w.len() {
        return Err(Error::GridMismatch);
    }
    let pair = |a: &[f64], an: &[f64], b: &[f64], bn: &[f64]| -> f64 {
        let d: Vec<f64> = (0..a.len()).map(|j| a[j] * bn[j] - b[j] * an[j]).collect();
        periodic_integral(&d, TAU)
    };
    let null = |a: &[f64], b: &[f64]| -> f64 { pair(a, &derivative(a), b, &derivative(b)) };
    let lower = match piece {
        MisnerPiece::Upper => -null(&u.phi_in, &w.phi_in),
        _ => pair(&u.phi_in, &u.phi_n_in, &w.phi_in, &w.phi_n_in),
    };
    let upper = match piece {
        MisnerPiece::Lower => null(&u.phi_out, &w.phi_out),
        _ => pair(&u.phi_out, &u.phi_n_out, &w.phi_out, &w.phi_n_out),
    };
    Ok(lower + upper)
}

/// Basis function `e_j` of the truncation (`1, cos x, sin x, cos 2x, …`) with
/// its derivative.
fn mode(j: usize, x: f64) -> (f64, f64) {
    if j == 0 {
        return (1.0, 0.0);
    }
    let k = ((j + 1) / 2) as f64;
    let (s, c) = (k * x).sin_cos();
    if j % 2 == 1 {
        (c, -k * s)
    } else {
        (s, k * c)
    }
}

/// Finite-truncation certificate for `L^glob` on a piece of the cylinder.
#[derive(Clone, Debug, PartialEq)]
pub struct MisnerDefect {
    pub piece: MisnerPiece,
    pub k: usize,
    pub m: usize,
    /// `4(2K + 1)`.
    pub dim_space: usize,
    /// Dimension of the kernel of `ω` on the truncation (nonzero only when a
    /// boundary circle is null).
    pub dim_kernel: usize,
    /// Dimension of the image of `L_h` modulo the kernel.
    pub dim_l_h: usize,
    /// Dimension of `L⊥_h` modulo the kernel.
    pub dim_l_perp_h: usize,
    pub defect: usize,
    /// `max |ω(l_i, l_j)|` over the normalized `L_h` basis.
    pub isotropy: f64,
    /// Rank of the orthogonality functional (full cylinder only).
    pub orth_rank: Option<usize>,
    /// Whether `L⊥_h` and the kernel of the orthogonality functional
    /// coincide (full cylinder only).
    pub orth_matches: Option<bool>,
}

impl MisnerDefect {
    pub fn is_lagrangian(&self) -> bool {
        self.defect == 0
    }
}

/// Defect of `L^glob` within the Fourier truncation of degree `K` on every
/// channel.
pub fn misner_defect(k: usize) -> Result<MisnerDefect> {
    piece_defect(MisnerPiece::Full, k)
}

pub fn piece_defect(piece: MisnerPiece, k: usize) -> Result<MisnerDefect> {
    let modes = 2 * k + 1;
    let n = 4 * modes;
    let m = MIN_GRID.max(8 * modes);
    // Basis fields: channel c, mode j.
    let basis: Vec<MisnerField> = (0..n)
        .map(|i| {
            let (c, j) = (i / modes, i % modes);
            MisnerField::sample(m, |x| {
                let mut v = [0.0; 4];
                v[c] = mode(j, x).0;
                v
            })
        })
        .collect::<Result<_>>()?;
    let mut omega = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let w = piece_symplectic(piece, &basis[i], &basis[j])?;
            omega[(i, j)] = w;
            omega[(j, i)] = -w;
        }
    }
    // L_h in coefficients: φ = e_j, and ∓∂_x e_j in the normal channels.
    let mut l = DMatrix::zeros(n, modes);
    for j in 0..modes {
        l[(j, j)] = 1.0;
        l[(2 * modes + j, j)] = 1.0;
        if j > 0 {
            let kk = ((j + 1) / 2) as f64;
            let (partner, coeff) = if j % 2 == 1 { (j + 1, -kk) } else { (j - 1, kk) };
            l[(modes + partner, j)] = -coeff;
            l[(3 * modes + partner, j)] = coeff;
        }
    }
    let om_svd = svd(&omega);
    let om_rank = rank(&om_svd.values, RANK_TOL);
    let dim_kernel = n - om_rank;
    let kernel = om_svd.v.columns(om_rank, dim_kernel).into_owned();

    let mut joined = DMatrix::zeros(n, modes + dim_kernel);
    joined.view_mut((0, 0), (n, modes)).copy_from(&l);
    joined.view_mut((0, modes), (n, dim_kernel)).copy_from(&kernel);
    let joined_rank = if joined.ncols() == 0 { 0 } else { rank(&svd(&joined).values, RANK_TOL) };
    let dim_l_h = joined_rank - dim_kernel;

    let pairing = l.transpose() * &omega;
    let pairing_rank = rank(&svd(&pairing).values, RANK_TOL);
    let dim_l_perp_h = n - pairing_rank - dim_kernel;

    let gram = l.transpose() * &omega * &l;
    let lnorm = l.column_iter().map(|c| c.norm_squared()).fold(0.0, f64::max);
    let isotropy = gram.amax() / lnorm.max(f64::MIN_POSITIVE);

    let (orth_rank, orth_matches) = if piece == MisnerPiece::Full {
        let orth = orth_matrix(modes);
        let r = rank(&svd(&orth).values, RANK_TOL);
        let mut stacked = DMatrix::zeros(2 * modes, n);
        stacked.view_mut((0, 0), (modes, n)).copy_from(&pairing);
        stacked.view_mut((modes, 0), (modes, n)).copy_from(&orth);
        let rs = rank(&svd(&stacked).values, RANK_TOL);
        (Some(r), Some(rs == r && rs == pairing_rank))
    } else {
        (None, None)
    };

    Ok(MisnerDefect {
        piece,
        k,
        m,
        dim_space: n,
        dim_kernel,
        dim_l_h,
        dim_l_perp_h,
        defect: dim_l_perp_h.saturating_sub(dim_l_h),
        isotropy,
        orth_rank,
        orth_matches,
    })
}

/// The functional `∂_xφ^in − φ_n^in − ∂_xφ^out − φ_n^out` as a matrix from
/// coefficients to output modes.
fn orth_matrix(modes: usize) -> DMatrix<f64> {
    let n = 4 * modes;
    let mut o = DMatrix::zeros(modes, n);
    for j in 0..modes {
        o[(j, modes + j)] = -1.0;
        o[(j, 3 * modes + j)] = -1.0;
        if j > 0 {
            let kk = ((j + 1) / 2) as f64;
            // ∂_x cos kx = −k sin kx, ∂_x sin kx = k cos kx.
            let (target, coeff) = if j % 2 == 1 { (j + 1, -kk) } else { (j - 1, kk) };
            o[(target, j)] += coeff;
            o[(target, 2 * modes + j)] -= coeff;
        }
    }
    o
}

/// Outcome counts of null curves started on both boundary circles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NullSurvey {
    pub samples: usize,
    pub minus_hit: usize,
    pub minus_asymptotic: usize,
    pub plus_hit: usize,
    pub plus_asymptotic: usize,
}

impl NullSurvey {
    /// Every `∂₋` curve is asymptotic and every `∂₊` curve hits.
    pub fn matches_expectation(&self) -> bool {
        self.minus_asymptotic == self.samples && self.plus_hit == self.samples
    }
}

/// Trace `∂±` curves from `count` points on each boundary circle.
pub fn null_survey(count: usize) -> Result<NullSurvey> {
    let domain = Domain::misner();
    let mut s = NullSurvey { samples: 0, minus_hit: 0, minus_asymptotic: 0, plus_hit: 0, plus_asymptotic: 0 };
    for c in 0..2 {
        for x in grid(TAU, count) {
            let p = BoundaryPoint::new(c, x + 0.1);
            s.samples += 1;
            match trace_null(&domain, p, Sign::Minus)?.outcome {
                Outcome::Hit(_) => s.minus_hit += 1,
                Outcome::Asymptotic => s.minus_asymptotic += 1,
            }
            match trace_null(&domain, p, Sign::Plus)?.outcome {
                Outcome::Hit(_) => s.plus_hit += 1,
                Outcome::Asymptotic => s.plus_asymptotic += 1,
            }
        }
    }
    Ok(s)
}

/// Polyline of the null curve from `(x₀, y₀)` on a boundary circle.
pub fn misner_trace(x0: f64, upper: bool, sign: Sign) -> Result<(Outcome, Vec<[f64; 2]>)> {
    let r = trace_null(&Domain::misner(), BoundaryPoint::new(usize::from(upper), x0), sign)?;
    Ok((r.outcome, r.path))
}

/// `(g, −g′, g, g′)` samples for every basis mode up to degree `k`.
pub fn l_basis(k: usize, m: usize) -> Result<Vec<MisnerField>> {
    (0..2 * k + 1).map(|j| misner_l_with(|x| mode(j, x), m)).collect()
}
