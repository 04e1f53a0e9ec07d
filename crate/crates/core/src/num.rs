//! Small numerical kernels shared by the geometric modules: periodic
//! trigonometric interpolation, root bracketing, Gauss-Legendre rules,
//! local monotone cubics, bump profiles and SVD helpers.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

pub const TAU: f64 = 2.0 * PI;

/// Reduce `x` into `[0, period)`.
pub fn wrap(x: f64, period: f64) -> f64 {
    let r = x % period;
    let r = if r < 0.0 { r + period } else { r };
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Reduce `x` into `(-period/2, period/2]`.
pub fn wrap_centered(x: f64, period: f64) -> f64 {
    let r = wrap(x, period);
    if r > 0.5 * period {
        r - period
    } else {
        r
    }
}

/// Uniform grid `t_j = j·period/m`.
pub fn grid(period: f64, m: usize) -> Vec<f64> {
    (0..m).map(|j| period * j as f64 / m as f64).collect()
}

/// Real trigonometric interpolant of samples on a uniform periodic grid.
///
/// `f(t) = a_0 + Σ_k a_k cos(kωt) + b_k sin(kωt)`, `ω = 2π/period`. For even
/// sample counts the Nyquist term carries only a cosine.
#[derive(Clone, Debug)]
pub struct Trig {
    period: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Trig {
    pub fn from_samples(values: &[f64], period: f64) -> Trig {
        let m = values.len();
        assert!(m > 0, "empty sample set");
        let half = m / 2;
        let (cos_tab, sin_tab) = twiddles(m);
        let mut a = vec![0.0; half + 1];
        let mut b = vec![0.0; half + 1];
        for k in 0..=half {
            let mut sa = 0.0;
            let mut sb = 0.0;
            let mut idx = 0usize;
            for &v in values {
                sa += v * cos_tab[idx];
                sb += v * sin_tab[idx];
                idx += k;
                if idx >= m {
                    idx -= m;
                }
            }
            let nyquist = m % 2 == 0 && k == half;
            let scale = if k == 0 || nyquist { 1.0 } else { 2.0 } / m as f64;
            a[k] = sa * scale;
            b[k] = if k == 0 || nyquist { 0.0 } else { sb * scale };
        }
        Trig { period, a, b }
    }

    /// Build from explicit coefficients (`b[0]` is ignored).
    pub fn from_coefficients(a: Vec<f64>, b: Vec<f64>, period: f64) -> Trig {
        assert_eq!(a.len(), b.len());
        Trig { period, a, b }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn degree(&self) -> usize {
        self.a.len() - 1
    }

    pub fn mean(&self) -> f64 {
        self.a[0]
    }

    pub fn coefficients(&self) -> (&[f64], &[f64]) {
        (&self.a, &self.b)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_with_derivative(t).0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.eval_with_derivative(t).1
    }

    pub fn eval_with_derivative(&self, t: f64) -> (f64, f64) {
        let w = TAU / self.period;
        let x = w * t;
        let (s1, c1) = x.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        let mut val = self.a[0];
        let mut der = 0.0;
        for k in 1..self.a.len() {
            let cn = c * c1 - s * s1;
            let sn = s * c1 + c * s1;
            c = cn;
            s = sn;
            let kw = k as f64 * w;
            val += self.a[k] * c + self.b[k] * s;
            der += kw * (self.b[k] * c - self.a[k] * s);
        }
        (val, der)
    }

    /// The derivative as a trigonometric polynomial.
    pub fn derivative_trig(&self) -> Trig {
        let w = TAU / self.period;
        let n = self.a.len();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        for k in 1..n {
            let kw = k as f64 * w;
            a[k] = kw * self.b[k];
            b[k] = -kw * self.a[k];
        }
        Trig { period: self.period, a, b }
    }

    /// Samples of the interpolant on an `m`-point grid.
    pub fn samples(&self, m: usize) -> Vec<f64> {
        grid(self.period, m).into_iter().map(|t| self.eval(t)).collect()
    }

    pub fn derivative_samples(&self, m: usize) -> Vec<f64> {
        grid(self.period, m)
            .into_iter()
            .map(|t| self.derivative(t))
            .collect()
    }

    /// Periodic antiderivative of the mean-free part, itself normalized to
    /// vanish at `t = 0`. The dropped mean is returned alongside.
    pub fn antiderivative(&self) -> (Trig, f64) {
        let w = TAU / self.period;
        let n = self.a.len();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        for k in 1..n {
            let kw = k as f64 * w;
            a[k] = -self.b[k] / kw;
            b[k] = self.a[k] / kw;
        }
        let at_zero: f64 = a.iter().sum();
        a[0] = -at_zero;
        (Trig { period: self.period, a, b }, self.a[0])
    }
}

fn twiddles(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut c = Vec::with_capacity(m);
    let mut s = Vec::with_capacity(m);
    for j in 0..m {
        let (sj, cj) = (TAU * j as f64 / m as f64).sin_cos();
        c.push(cj);
        s.push(sj);
    }
    (c, s)
}

/// Spectral derivative of uniform periodic samples.
pub fn spectral_derivative(values: &[f64], period: f64) -> Vec<f64> {
    Trig::from_samples(values, period).derivative_samples(values.len())
}

/// Trapezoid (equivalently: rectangle) rule on a uniform periodic grid.
pub fn periodic_integral(values: &[f64], period: f64) -> f64 {
    values.iter().sum::<f64>() * period / values.len() as f64
}

/// Bisection on a bracket whose endpoint signs are supplied by the caller.
/// `sign_a` is the sign of `f` just inside `a`; the sign at `b` is assumed to
/// be opposite.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, sign_a: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sign_a {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (xi, wi) in x.iter().zip(&w) {
            sum += wi * f(lo + 0.5 * h * (xi + 1.0));
        }
    }
    0.5 * h * sum
}

/// Value and slope of the monotone (Fritsch-Carlson) cubic through four
/// nodes, evaluated on the middle interval `[xs[1], xs[2]]`.
pub fn pchip4(xs: [f64; 4], ys: [f64; 4], x: f64) -> (f64, f64) {
    let h: [f64; 3] = [xs[1] - xs[0], xs[2] - xs[1], xs[3] - xs[2]];
    let d: [f64; 3] = [
        (ys[1] - ys[0]) / h[0],
        (ys[2] - ys[1]) / h[1],
        (ys[3] - ys[2]) / h[2],
    ];
    let slope = |k: usize| -> f64 {
        let (dl, dr, hl, hr) = (d[k - 1], d[k], h[k - 1], h[k]);
        if dl * dr <= 0.0 {
            0.0
        } else {
            let w1 = 2.0 * hr + hl;
            let w2 = hr + 2.0 * hl;
            (w1 + w2) / (w1 / dl + w2 / dr)
        }
    };
    let (m1, m2) = (slope(1), slope(2));
    let hh = h[1];
    let s = (x - xs[1]) / hh;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let y = h00 * ys[1] + h10 * hh * m1 + h01 * ys[2] + h11 * hh * m2;
    let dy = ((6.0 * s2 - 6.0 * s) * ys[1]
        + (3.0 * s2 - 4.0 * s + 1.0) * hh * m1
        + (-6.0 * s2 + 6.0 * s) * ys[2]
        + (3.0 * s2 - 2.0 * s) * hh * m2)
        / hh;
    (y, dy)
}

/// Neville evaluation of the interpolating polynomial through `(xs, ys)`.
pub fn poly_interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut p: Vec<f64> = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            p[i] = ((x - xs[i + level]) * p[i] + (xs[i] - x) * p[i + 1]) / (xs[i] - xs[i + level]);
        }
    }
    p[0]
}

const BUMP_POWER: i32 = 6;
/// `1 / B(7, 7)`, so that the density integrates to one on `[0, 1]`.
const BUMP_NORM: f64 = 12012.0;

/// Unit-mass bump density on `[0, 1]`, `C⁵` at the ends.
pub fn bump_density(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        BUMP_NORM * (s * (1.0 - s)).powi(BUMP_POWER)
    }
}

pub fn bump_density_slope(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        let q = s * (1.0 - s);
        BUMP_NORM * BUMP_POWER as f64 * q.powi(BUMP_POWER - 1) * (1.0 - 2.0 * s)
    }
}

/// Antiderivative of [`bump_density`], rising from 0 to 1.
pub fn bump_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        // Integrate the polynomial exactly: Σ_k C(6,k)(-1)^k s^{7+k}/(7+k).
        let mut acc = 0.0;
        let mut binom = 1.0;
        for k in 0..=6 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * s.powi(7 + k) / (7 + k) as f64;
            binom = binom * (6 - k) as f64 / (k + 1) as f64;
        }
        BUMP_NORM * acc
    }
}

/// `exp(1 − 1/(1 − z²))` on `|z| < 1`, zero outside: peak one, smooth.
pub fn smooth_bump(z: f64) -> f64 {
    if z.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - z * z)).exp()
    }
}

/// A bump window on a periodic parameter line: support `[center − width/2,
/// center + width/2]`, unit integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub center: f64,
    pub width: f64,
    pub period: f64,
}

impl Window {
    pub fn new(center: f64, width: f64, period: f64) -> Window {
        Window { center, width, period }
    }

    fn local(&self, t: f64) -> f64 {
        (wrap_centered(t - self.center, self.period) + 0.5 * self.width) / self.width
    }

    pub fn contains(&self, t: f64) -> bool {
        let s = self.local(t);
        s > 0.0 && s < 1.0
    }

    /// Unit-mass density.
    pub fn density(&self, t: f64) -> f64 {
        bump_density(self.local(t)) / self.width
    }

    pub fn density_slope(&self, t: f64) -> f64 {
        bump_density_slope(self.local(t)) / (self.width * self.width)
    }

    /// Peak-one bump function and its derivative.
    pub fn profile(&self, t: f64) -> (f64, f64) {
        let s = self.local(t);
        let peak = bump_density(0.5);
        (
            bump_density(s) / peak,
            bump_density_slope(s) / (peak * self.width),
        )
    }
}

/// Singular values (descending) and right singular vectors of a matrix.
pub struct Svd {
    pub values: Vec<f64>,
    /// Columns are right singular vectors, ordered like `values`; padded to a
    /// full basis of the column space.
    pub v: DMatrix<f64>,
}

pub fn svd(mat: &DMatrix<f64>) -> Svd {
    let (m, n) = mat.shape();
    let padded;
    let work = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(mat);
        padded = p;
        &padded
    } else {
        mat
    };
    let dec = work.clone().svd(false, true);
    let vt = dec.v_t.expect("requested V");
    let sv = dec.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(core::cmp::Ordering::Equal));
    let values: Vec<f64> = order.iter().map(|&i| sv[i]).collect();
    let mut v = DMatrix::zeros(n, order.len());
    for (c, &i) in order.iter().enumerate() {
        for r in 0..n {
            v[(r, c)] = vt[(i, r)];
        }
    }
    Svd { values, v }
}

/// Numerical rank with threshold `rel·σ_max`.
pub fn rank(values: &[f64], rel: f64) -> usize {
    let top = values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > rel * top).count()
}

/// Orthonormal basis of the numerical null space (columns), plus the spectrum.
pub fn null_space(mat: &DMatrix<f64>, rel: f64) -> (DMatrix<f64>, Vec<f64>) {
    let n = mat.ncols();
    if mat.nrows() == 0 || n == 0 {
        return (DMatrix::identity(n, n), Vec::new());
    }
    let dec = svd(mat);
    let r = rank(&dec.values, rel);
    let basis = dec.v.columns(r, n - r).into_owned();
    (basis, dec.values)
}

/// Scale the columns of `mat` to unit Euclidean norm; zero columns are left.
pub fn normalize_columns(mat: &mut DMatrix<f64>) -> Vec<f64> {
    let mut norms = Vec::with_capacity(mat.ncols());
    for mut c in mat.column_iter_mut() {
        let nrm = c.norm();
        if nrm > 0.0 {
            c /= nrm;
        }
        norms.push(nrm);
    }
    norms
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_roundtrip_and_derivative() {
        let m = 64;
        let period = 3.0;
        let w = TAU / period;
        let f = |t: f64| 0.5 + (2.0 * w * t).cos() - 0.3 * (5.0 * w * t).sin();
        let df = |t: f64| -2.0 * w * (2.0 * w * t).sin() - 1.5 * w * (5.0 * w * t).cos();
        let vals: Vec<f64> = grid(period, m).iter().map(|&t| f(t)).collect();
        let tr = Trig::from_samples(&vals, period);
        for &t in &[0.1, 0.77, 2.9] {
            let (v, d) = tr.eval_with_derivative(t);
            assert!((v - f(t)).abs() < 1e-12);
            assert!((d - df(t)).abs() < 1e-11);
        }
        assert!((tr.mean() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn antiderivative_matches() {
        let period = TAU;
        let vals: Vec<f64> = grid(period, 32).iter().map(|&t| 1.0 + t.cos()).collect();
        let (anti, mean) = Trig::from_samples(&vals, period).antiderivative();
        assert!((mean - 1.0).abs() < 1e-14);
        assert!((anti.eval(1.0) - 1f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn bump_mass_and_step() {
        let mass = integrate(bump_density, 0.0, 1.0, 8, 16);
        assert!((mass - 1.0).abs() < 1e-13);
        assert!((bump_step(0.5) - 0.5).abs() < 1e-13);
        assert!((bump_step(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pchip_reproduces_lines() {
        let (y, dy) = pchip4([0.0, 1.0, 2.0, 3.0], [1.0, 3.0, 5.0, 7.0], 1.4);
        assert!((y - 3.8).abs() < 1e-14 && (dy - 2.0).abs() < 1e-14);
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let (basis, values) = null_space(&m, 1e-10);
        assert_eq!(basis.ncols(), 2);
        assert!((&m * &basis).norm() < 1e-12);
        assert!(values[0] > 1.0);
    }

    #[test]
    fn wrap_ranges() {
        assert!((wrap(-0.5, 2.0) - 1.5).abs() < 1e-15);
        assert!((wrap_centered(1.9, 2.0) + 0.1).abs() < 1e-15);
    }
}
