//! Fields, spectra, and derivative operators on the periodic unit torus.
//!
//! A [`Field`] holds `n x n` real samples of a function on `[0,1)^2`, with
//! sample `(i, j)` at `x = (i/n, j/n)` and row-major storage. Its
//! [`Spectrum`] holds complex Fourier coefficients `c_k` indexed by integer
//! wavenumbers `k` in `{-n/2, ..., n/2 - 1}^2`, with
//! `f(x) = sum_k c_k exp(2 pi i k.x)`.
//!
//! All derivatives are spectral: multiply by `2 pi i k` and zero the Nyquist
//! mode `k = -n/2` along the differentiated axis (it carries no usable phase
//! information on a real grid). Integrals over the torus are grid means, the
//! trapezoid rule on a periodic uniform grid. Reductions use a fixed pairwise
//! tree so every norm is reproducible bit-for-bit regardless of threading.

pub(crate) mod fft;
pub mod reduce;

use std::f64::consts::TAU;
use std::ops::{Add, Index, Mul, Sub};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;

use reduce::{max_by, pairwise_sum_by};

/// Smallest supported grid edge; grids must be even and at least this large.
pub const MIN_GRID: usize = 8;

fn check_n(n: usize) {
    assert!(
        n >= MIN_GRID && n % 2 == 0,
        "grid edge must be even and >= {MIN_GRID}, got {n}"
    );
}

/// Coordinate axis of the torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// First coordinate; varies with the row index `i`.
    X1,
    /// Second coordinate; varies with the column index `j`.
    X2,
}

// ---------------------------------------------------------------------------
// Field
// ---------------------------------------------------------------------------

/// Real scalar samples on the `n x n` periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    n: usize,
    data: Vec<f64>,
}

impl Field {
    /// Zero field.
    pub fn zeros(n: usize) -> Self {
        check_n(n);
        Field {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Constant field.
    pub fn constant(n: usize, value: f64) -> Self {
        check_n(n);
        Field {
            n,
            data: vec![value; n * n],
        }
    }

    /// Sample `f(x1, x2)` at the grid points.
    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        check_n(n);
        let h = 1.0 / n as f64;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let x1 = i as f64 * h;
            for j in 0..n {
                data.push(f(x1, j as f64 * h));
            }
        }
        Field { n, data }
    }

    /// Wrap raw row-major samples.
    pub fn from_data(n: usize, data: Vec<f64>) -> Self {
        check_n(n);
        assert_eq!(data.len(), n * n, "sample count must be n^2");
        Field { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing `1/n`.
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Pointwise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Pointwise combination with another field.
    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        assert_eq!(self.n, other.n, "grid size mismatch");
        Field {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Mean over the torus; equals the integral because the cell area is
    /// `1/n^2` (trapezoid quadrature on a periodic grid).
    pub fn mean(&self) -> f64 {
        pairwise_sum_by(self.data.len(), |i| self.data[i]) / (self.data.len() as f64)
    }

    /// `L^p` norm with respect to the torus measure. `p` must be `>= 1`;
    /// `f64::INFINITY` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "lp_norm requires p >= 1, got {p}");
        if p.is_infinite() {
            return max_by(self.data.len(), |i| self.data[i].abs());
        }
        let mean_pow =
            pairwise_sum_by(self.data.len(), |i| pow_abs(self.data[i], p)) / (self.data.len() as f64);
        mean_pow.powf(1.0 / p)
    }

    pub fn min_value(&self) -> f64 {
        -max_by(self.data.len(), |i| -self.data[i])
    }

    pub fn max_value(&self) -> f64 {
        max_by(self.data.len(), |i| self.data[i])
    }

    /// True if every sample is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Forward spectral transform.
    pub fn transform(&self) -> Spectrum {
        Spectrum {
            n: self.n,
            data: fft::forward_single(&self.data, self.n),
        }
    }

    /// Forward transforms of two fields sharing one complex FFT.
    pub fn transform_pair(f: &Field, g: &Field) -> (Spectrum, Spectrum) {
        assert_eq!(f.n, g.n, "grid size mismatch");
        let (a, b) = fft::forward_pair(&f.data, &g.data, f.n);
        (Spectrum { n: f.n, data: a }, Spectrum { n: f.n, data: b })
    }

    /// Spectral gradient.
    pub fn grad(&self) -> VecField {
        let s = self.transform();
        let d1 = s.derivative(Axis::X1);
        let d2 = s.derivative(Axis::X2);
        let (x1, x2) = Spectrum::inverse_pair(&d1, &d2);
        VecField { x1, x2 }
    }

    /// Spectral Laplacian. Matches `div(grad(f))` exactly: the multiplier
    /// treats the Nyquist wavenumber along each axis as zero.
    pub fn laplacian(&self) -> Field {
        let mut s = self.transform();
        let n = s.n;
        for i in 0..n {
            let k1 = deriv_wavenumber(i, n);
            for j in 0..n {
                let k2 = deriv_wavenumber(j, n);
                let m = -TAU * TAU * (k1 * k1 + k2 * k2);
                s.data[i * n + j] *= m;
            }
        }
        s.inverse()
    }

    /// Zero-mean random field band-limited to `|k1|, |k2| <= kmax`,
    /// normalized to unit `L^2` norm. Deterministic in `seed`.
    pub fn random_band_limited(n: usize, kmax: usize, seed: u64) -> Field {
        check_n(n);
        assert!(kmax >= 1 && kmax < n / 2, "need 1 <= kmax < n/2");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = Spectrum::zeros(n);
        let km = kmax as i64;
        // Fill one half-plane and mirror, so the field is exactly real.
        for k1 in -km..=km {
            for k2 in -km..=km {
                if (k1, k2) <= (0, 0) {
                    continue;
                }
                let re = rng.gen_range(-1.0..1.0);
                let im = rng.gen_range(-1.0..1.0);
                s.set_coeff(k1, k2, Complex::new(re, im));
                s.set_coeff(-k1, -k2, Complex::new(re, -im));
            }
        }
        let norm = s.parseval().sqrt();
        for c in &mut s.data {
            *c /= norm;
        }
        s.inverse()
    }
}

/// `|x|^p` with a fast path for integer exponents.
pub(crate) fn pow_abs(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p.fract() == 0.0 && p.abs() <= 256.0 {
        a.powi(p as i32)
    } else {
        a.powf(p)
    }
}

impl Index<(usize, usize)> for Field {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Field {
            type Output = Field;
            fn $method(self, rhs: &Field) -> Field {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
    };
}

field_binop!(Add, add, +);
field_binop!(Sub, sub, -);
field_binop!(Mul, mul, *);

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.map(|x| x * rhs)
    }
}

// ---------------------------------------------------------------------------
// VecField
// ---------------------------------------------------------------------------

/// Vector field with components along the two axes.
#[derive(Clone, Debug, PartialEq)]
pub struct VecField {
    pub x1: Field,
    pub x2: Field,
}

impl VecField {
    pub fn zeros(n: usize) -> Self {
        VecField {
            x1: Field::zeros(n),
            x2: Field::zeros(n),
        }
    }

    pub fn from_fns(n: usize, f1: impl Fn(f64, f64) -> f64, f2: impl Fn(f64, f64) -> f64) -> Self {
        VecField {
            x1: Field::from_fn(n, f1),
            x2: Field::from_fn(n, f2),
        }
    }

    pub fn new(x1: Field, x2: Field) -> Self {
        assert_eq!(x1.n, x2.n, "grid size mismatch");
        VecField { x1, x2 }
    }

    pub fn n(&self) -> usize {
        self.x1.n
    }

    /// Spectral divergence `d1 v1 + d2 v2`.
    pub fn div(&self) -> Field {
        let (s1, s2) = Field::transform_pair(&self.x1, &self.x2);
        div_spectrum(&s1, &s2).inverse()
    }

    /// Spectral curl (scalar in 2D): `d1 v2 - d2 v1`.
    pub fn curl(&self) -> Field {
        let (s1, s2) = Field::transform_pair(&self.x1, &self.x2);
        curl_spectrum(&s1, &s2).inverse()
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Field {
        self.x1.zip_with(&self.x2, |a, b| a.hypot(b))
    }

    /// `L^2` norm of the vector field: `sqrt(int |v|^2)`.
    pub fn l2_norm(&self) -> f64 {
        let a = &self.x1.data;
        let b = &self.x2.data;
        let s = pairwise_sum_by(a.len(), |i| a[i] * a[i] + b[i] * b[i]);
        (s / a.len() as f64).sqrt()
    }

    pub fn map_each(&self, f: impl Fn(f64) -> f64 + Copy) -> VecField {
        VecField {
            x1: self.x1.map(f),
            x2: self.x2.map(f),
        }
    }
}

impl Add for &VecField {
    type Output = VecField;
    fn add(self, rhs: &VecField) -> VecField {
        VecField {
            x1: &self.x1 + &rhs.x1,
            x2: &self.x2 + &rhs.x2,
        }
    }
}

impl Sub for &VecField {
    type Output = VecField;
    fn sub(self, rhs: &VecField) -> VecField {
        VecField {
            x1: &self.x1 - &rhs.x1,
            x2: &self.x2 - &rhs.x2,
        }
    }
}

/// Divergence in spectral space.
pub(crate) fn div_spectrum(s1: &Spectrum, s2: &Spectrum) -> Spectrum {
    let n = s1.n;
    let mut out = Spectrum::zeros(n);
    for i in 0..n {
        let k1 = deriv_wavenumber(i, n);
        for j in 0..n {
            let k2 = deriv_wavenumber(j, n);
            let a = s1.data[i * n + j];
            let b = s2.data[i * n + j];
            // i k . v, scaled by 2 pi
            out.data[i * n + j] = Complex::new(
                -TAU * (k1 * a.im + k2 * b.im),
                TAU * (k1 * a.re + k2 * b.re),
            );
        }
    }
    out
}

/// Curl in spectral space.
pub(crate) fn curl_spectrum(s1: &Spectrum, s2: &Spectrum) -> Spectrum {
    let n = s1.n;
    let mut out = Spectrum::zeros(n);
    for i in 0..n {
        let k1 = deriv_wavenumber(i, n);
        for j in 0..n {
            let k2 = deriv_wavenumber(j, n);
            let a = s1.data[i * n + j];
            let b = s2.data[i * n + j];
            out.data[i * n + j] = Complex::new(
                -TAU * (k1 * b.im - k2 * a.im),
                TAU * (k1 * b.re - k2 * a.re),
            );
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

/// Complex Fourier coefficients on the `n x n` wavenumber lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    n: usize,
    data: Vec<Complex<f64>>,
}

/// Signed wavenumber for a storage index.
#[inline]
pub(crate) fn signed_wavenumber(idx: usize, n: usize) -> i64 {
    if idx < n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

/// Wavenumber used by derivative multipliers: the Nyquist index maps to zero.
#[inline]
pub(crate) fn deriv_wavenumber(idx: usize, n: usize) -> f64 {
    if idx == n / 2 {
        0.0
    } else {
        signed_wavenumber(idx, n) as f64
    }
}

impl Spectrum {
    pub fn zeros(n: usize) -> Self {
        check_n(n);
        Spectrum {
            n,
            data: vec![Complex::default(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn data(&self) -> &[Complex<f64>] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex<f64>] {
        &mut self.data
    }

    fn idx(&self, k1: i64, k2: i64) -> usize {
        let n = self.n as i64;
        debug_assert!(k1 >= -n / 2 && k1 < n / 2 && k2 >= -n / 2 && k2 < n / 2);
        let i = k1.rem_euclid(n) as usize;
        let j = k2.rem_euclid(n) as usize;
        i * self.n + j
    }

    /// Coefficient for signed wavenumbers `k1, k2` in `[-n/2, n/2)`.
    pub fn coeff(&self, k1: i64, k2: i64) -> Complex<f64> {
        self.data[self.idx(k1, k2)]
    }

    pub fn set_coeff(&mut self, k1: i64, k2: i64, c: Complex<f64>) {
        let idx = self.idx(k1, k2);
        self.data[idx] = c;
    }

    /// Inverse transform to a real field.
    pub fn inverse(&self) -> Field {
        Field {
            n: self.n,
            data: fft::inverse_single(&self.data, self.n),
        }
    }

    /// Inverse transforms of two spectra sharing one complex FFT.
    pub fn inverse_pair(a: &Spectrum, b: &Spectrum) -> (Field, Field) {
        assert_eq!(a.n, b.n, "grid size mismatch");
        let (f, g) = fft::inverse_pair(&a.data, &b.data, a.n);
        (Field { n: a.n, data: f }, Field { n: a.n, data: g })
    }

    /// Spectral derivative along an axis: multiply by `2 pi i k`, with the
    /// Nyquist mode zeroed.
    pub fn derivative(&self, axis: Axis) -> Spectrum {
        let n = self.n;
        let mut out = Spectrum::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let k = match axis {
                    Axis::X1 => deriv_wavenumber(i, n),
                    Axis::X2 => deriv_wavenumber(j, n),
                };
                let c = self.data[i * n + j];
                out.data[i * n + j] = Complex::new(-TAU * k * c.im, TAU * k * c.re);
            }
        }
        out
    }

    /// Sum of squared coefficient magnitudes; equals `lp_norm(f, 2)^2` of the
    /// originating field (Parseval).
    pub fn parseval(&self) -> f64 {
        pairwise_sum_by(self.data.len(), |i| self.data[i].norm_sqr())
    }

    /// Largest deviation from Hermitian symmetry `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            let mi = (n - i) % n;
            for j in 0..n {
                let mj = (n - j) % n;
                let z = self.data[i * n + j];
                let zm = self.data[mi * n + mj];
                let d = (z - zm.conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Zero all modes with `max(|k1|, |k2|) > n/3` (the 2/3 dealiasing rule).
    pub fn dealias(&mut self) {
        let n = self.n;
        let kcut = (n / 3) as i64;
        for i in 0..n {
            let k1 = signed_wavenumber(i, n).abs();
            for j in 0..n {
                let k2 = signed_wavenumber(j, n).abs();
                if k1 > kcut || k2 > kcut {
                    self.data[i * n + j] = Complex::default();
                }
            }
        }
    }

    /// Evaluate the trigonometric interpolant at an arbitrary point.
    /// Assumes a Hermitian spectrum (real field) and returns the real part.
    pub fn eval_at(&self, x1: f64, x2: f64) -> f64 {
        let n = self.n;
        let mut w1 = Vec::with_capacity(n);
        let mut w2 = Vec::with_capacity(n);
        for idx in 0..n {
            let k = signed_wavenumber(idx, n) as f64;
            let (s1, c1) = (TAU * k * x1).sin_cos();
            w1.push(Complex::new(c1, s1));
            let (s2, c2) = (TAU * k * x2).sin_cos();
            w2.push(Complex::new(c2, s2));
        }
        let mut total = Complex::new(0.0, 0.0);
        for i in 0..n {
            let mut row = Complex::new(0.0, 0.0);
            let base = i * n;
            for j in 0..n {
                row += self.data[base + j] * w2[j];
            }
            total += row * w1[i];
        }
        total.re
    }
}
