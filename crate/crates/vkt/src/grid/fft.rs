//! 2D complex FFT plumbing on the periodic unit torus.
//!
//! Transforms are built from 1D plans (rows, transpose, rows, transpose).
//! Real fields are moved through the complex transform two at a time: packing
//! `f + i g` and splitting the result by Hermitian reflection halves the
//! transform count in the time-stepping hot loop. The reflection split also
//! makes the returned spectra of real fields Hermitian *exactly* (bitwise),
//! not merely to rounding accuracy.
//!
//! Conventions: `forward` produces coefficients `c_k` with
//! `f(x) = sum_k c_k exp(2*pi*i k.x)`, i.e. the forward transform carries the
//! `1/n^2` normalization and `inverse` carries none.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::parallel;

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plan_cache() -> &'static Mutex<HashMap<usize, PlanPair>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plans(n: usize) -> PlanPair {
    let mut cache = plan_cache().lock().expect("fft plan cache poisoned");
    let (f, i) = cache.entry(n).or_insert_with(|| {
        let mut planner = FftPlanner::new();
        (
            planner.plan_fft(n, FftDirection::Forward),
            planner.plan_fft(n, FftDirection::Inverse),
        )
    });
    (f.clone(), i.clone())
}

thread_local! {
    static TRANSPOSE_SCRATCH: RefCell<Vec<Complex<f64>>> = const { RefCell::new(Vec::new()) };
}

fn fft_rows(buf: &mut [Complex<f64>], n: usize, plan: &Arc<dyn Fft<f64>>) {
    // Each row transform is independent; any chunking gives identical bits.
    if parallel::workers() <= 1 {
        let mut scratch = vec![Complex::default(); plan.get_inplace_scratch_len()];
        for row in buf.chunks_exact_mut(n) {
            plan.process_with_scratch(row, &mut scratch);
        }
    } else {
        let rows_per_task = 8.max(n / (4 * parallel::workers()));
        parallel::for_each_chunk(buf, n * rows_per_task, |_, chunk| {
            let mut scratch = vec![Complex::default(); plan.get_inplace_scratch_len()];
            for row in chunk.chunks_exact_mut(n) {
                plan.process_with_scratch(row, &mut scratch);
            }
        });
    }
}

fn transpose(src: &[Complex<f64>], dst: &mut [Complex<f64>], n: usize) {
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        let imax = (ib + B).min(n);
        for jb in (0..n).step_by(B) {
            let jmax = (jb + B).min(n);
            for i in ib..imax {
                for j in jb..jmax {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

/// In-place unnormalized 2D transform in the given direction.
fn fft2d(buf: &mut [Complex<f64>], n: usize, dir: FftDirection) {
    debug_assert_eq!(buf.len(), n * n);
    let (fwd, inv) = plans(n);
    let plan = match dir {
        FftDirection::Forward => fwd,
        FftDirection::Inverse => inv,
    };
    TRANSPOSE_SCRATCH.with(|cell| {
        let mut tmp = cell.borrow_mut();
        tmp.resize(n * n, Complex::default());
        fft_rows(buf, n, &plan);
        transpose(buf, &mut tmp, n);
        fft_rows(&mut tmp, n, &plan);
        transpose(&tmp, buf, n);
    });
}

/// Forward transforms of two real fields through one complex FFT.
#[allow(clippy::type_complexity)]
pub(crate) fn forward_pair(
    f: &[f64],
    g: &[f64],
    n: usize,
) -> (Vec<Complex<f64>>, Vec<Complex<f64>>) {
    debug_assert_eq!(f.len(), n * n);
    debug_assert_eq!(g.len(), n * n);
    let mut buf: Vec<Complex<f64>> = f
        .iter()
        .zip(g.iter())
        .map(|(&re, &im)| Complex::new(re, im))
        .collect();
    fft2d(&mut buf, n, FftDirection::Forward);
    split_packed(&buf, n)
}

/// Forward transform of a single real field. Routed through the packed path
/// so the result is exactly Hermitian.
pub(crate) fn forward_single(f: &[f64], n: usize) -> Vec<Complex<f64>> {
    debug_assert_eq!(f.len(), n * n);
    let mut buf: Vec<Complex<f64>> = f.iter().map(|&re| Complex::new(re, 0.0)).collect();
    fft2d(&mut buf, n, FftDirection::Forward);
    let scale = 1.0 / (n * n) as f64;
    let mut out = vec![Complex::default(); n * n];
    for i in 0..n {
        let mi = (n - i) % n;
        for j in 0..n {
            let mj = (n - j) % n;
            let z = buf[i * n + j];
            let zm = buf[mi * n + mj];
            // Hermitian part of the raw transform, exactly symmetric.
            out[i * n + j] = Complex::new((z.re + zm.re) * 0.5, (z.im - zm.im) * 0.5) * scale;
        }
    }
    out
}

/// Split the packed transform of `f + i g` into the spectra of `f` and `g`.
#[allow(clippy::type_complexity)]
fn split_packed(buf: &[Complex<f64>], n: usize) -> (Vec<Complex<f64>>, Vec<Complex<f64>>) {
    let scale = 1.0 / (n * n) as f64;
    let mut a = vec![Complex::default(); n * n];
    let mut b = vec![Complex::default(); n * n];
    for i in 0..n {
        let mi = (n - i) % n;
        for j in 0..n {
            let mj = (n - j) % n;
            let z = buf[i * n + j];
            let zm = buf[mi * n + mj];
            // a(k) = (z(k) + conj(z(-k))) / 2,  b(k) = (z(k) - conj(z(-k))) / (2i)
            a[i * n + j] = Complex::new((z.re + zm.re) * 0.5, (z.im - zm.im) * 0.5) * scale;
            b[i * n + j] = Complex::new((z.im + zm.im) * 0.5, (zm.re - z.re) * 0.5) * scale;
        }
    }
    (a, b)
}

/// Inverse transforms of two Hermitian spectra through one complex FFT.
pub(crate) fn inverse_pair(
    a: &[Complex<f64>],
    b: &[Complex<f64>],
    n: usize,
) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n * n);
    let mut buf: Vec<Complex<f64>> = a
        .iter()
        .zip(b.iter())
        .map(|(&x, &y)| Complex::new(x.re - y.im, x.im + y.re)) // x + i y
        .collect();
    fft2d(&mut buf, n, FftDirection::Inverse);
    let mut f = Vec::with_capacity(n * n);
    let mut g = Vec::with_capacity(n * n);
    for z in &buf {
        f.push(z.re);
        g.push(z.im);
    }
    (f, g)
}

/// Inverse transform of a single Hermitian spectrum (real part of the
/// complex inverse; the imaginary part of a Hermitian spectrum's inverse is
/// zero up to rounding and is discarded).
pub(crate) fn inverse_single(a: &[Complex<f64>], n: usize) -> Vec<f64> {
    debug_assert_eq!(a.len(), n * n);
    let mut buf = a.to_vec();
    fft2d(&mut buf, n, FftDirection::Inverse);
    buf.iter().map(|z| z.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_fields(n: usize) -> (Vec<f64>, Vec<f64>) {
        let f: Vec<f64> = (0..n * n)
            .map(|i| ((i * 2654435761) % 1000) as f64 / 500.0 - 1.0)
            .collect();
        let g: Vec<f64> = (0..n * n)
            .map(|i| ((i * 40503 + 7) % 1000) as f64 / 250.0 - 2.0)
            .collect();
        (f, g)
    }

    #[test]
    fn packed_pair_matches_single_transforms() {
        let n = 32;
        let (f, g) = sample_fields(n);
        let (a, b) = forward_pair(&f, &g, n);
        let a1 = forward_single(&f, n);
        let b1 = forward_single(&g, n);
        let err = a
            .iter()
            .zip(&a1)
            .chain(b.iter().zip(&b1))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-13, "packed/single mismatch {err:.3e}");
    }

    #[test]
    fn round_trip_pair() {
        let n = 64;
        let (f, g) = sample_fields(n);
        let (a, b) = forward_pair(&f, &g, n);
        let (f2, g2) = inverse_pair(&a, &b, n);
        let err = f
            .iter()
            .zip(&f2)
            .chain(g.iter().zip(&g2))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-12, "round trip error {err:.3e}");
    }

    #[test]
    fn forward_is_exactly_hermitian() {
        let n = 24;
        let (f, _) = sample_fields(n);
        let a = forward_single(&f, n);
        for i in 0..n {
            let mi = (n - i) % n;
            for j in 0..n {
                let mj = (n - j) % n;
                let z = a[i * n + j];
                let zm = a[mi * n + mj];
                assert_eq!(z.re, zm.re);
                assert_eq!(z.im, -zm.im);
            }
        }
    }

    /// Direct O(n^4) discrete Fourier sum, used as an independent oracle.
    fn dft_oracle(f: &[f64], n: usize) -> Vec<Complex<f64>> {
        let mut out = vec![Complex::default(); n * n];
        let tau = std::f64::consts::TAU;
        for ki in 0..n {
            for kj in 0..n {
                let mut acc = Complex::default();
                for i in 0..n {
                    for j in 0..n {
                        let phase = -tau * ((ki * i + kj * j) as f64) / n as f64;
                        acc += f[i * n + j] * Complex::new(phase.cos(), phase.sin());
                    }
                }
                out[ki * n + kj] = acc / (n * n) as f64;
            }
        }
        out
    }

    #[test]
    fn matches_direct_dft_summation() {
        let n = 16;
        let (f, _) = sample_fields(n);
        let fast = forward_single(&f, n);
        let slow = dft_oracle(&f, n);
        let err = fast
            .iter()
            .zip(&slow)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-12, "FFT vs direct DFT mismatch {err:.3e}");
    }
}
