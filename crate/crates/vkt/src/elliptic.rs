//! Periodic elliptic solves: spectral Poisson inversion and a conjugate
//! gradient solver for the variable-coefficient Lame operator
//! `L_rho u = mu lap u + grad((mu + lam(rho)) div u)`.
//!
//! Derivatives follow the grid conventions: the Nyquist wavenumber is
//! treated as zero, so the four modes `(0,0)`, `(n/2,0)`, `(0,n/2)`,
//! `(n/2,n/2)` lie in the null space of every symbol here. Poisson inversion
//! and the Lame solve both project them (and the mean) out of the data,
//! which is exact for band-limited right-hand sides and the correct
//! least-squares treatment otherwise.

use crate::error::{Error, Result};
use crate::grid::reduce::pairwise_sum_by;
use crate::grid::{deriv_wavenumber, div_spectrum, Axis, Field, Spectrum, VecField};
use crate::model::{bulk_viscosity, Params};
use std::f64::consts::TAU;

/// Zero the mean and the three Nyquist null-symbol modes of a spectrum.
fn project_null_modes(spec: &mut Spectrum) {
    let n = spec.n();
    let half = n / 2;
    for (i, j) in [(0, 0), (half, 0), (0, half), (half, half)] {
        spec.data_mut()[i * n + j] = num_zero();
    }
}

fn num_zero() -> rustfft::num_complex::Complex<f64> {
    rustfft::num_complex::Complex::new(0.0, 0.0)
}

/// Divide a spectrum by the Laplacian symbol `-4 pi^2 |k|^2`, zeroing the
/// null-symbol modes.
fn poisson_spectrum(spec: &mut Spectrum) {
    let n = spec.n();
    for i in 0..n {
        let k1 = deriv_wavenumber(i, n);
        for j in 0..n {
            let k2 = deriv_wavenumber(j, n);
            let k2sum = k1 * k1 + k2 * k2;
            let c = &mut spec.data_mut()[i * n + j];
            if k2sum == 0.0 {
                *c = num_zero();
            } else {
                *c /= -TAU * TAU * k2sum;
            }
        }
    }
}

/// Solve `lap phi = f` on the torus; `phi` has zero mean. Errors if `f` has
/// a mean larger than `1e-10 * max(1, |f|_inf)` — such data is incompatible
/// with periodicity.
pub fn poisson(f: &Field) -> Result<Field> {
    let mean = f.mean();
    let tol = 1e-10 * f.lp_norm(f64::INFINITY).max(1.0);
    if mean.abs() > tol {
        return Err(Error::NonZeroMean { mean, tol });
    }
    let mut spec = f.transform();
    poisson_spectrum(&mut spec);
    Ok(spec.inverse())
}

/// Potential `xi` of the mass flux: `lap xi = div m`, zero mean.
///
/// The divergence is formed spectrally, so the compatibility condition holds
/// exactly and no mean check is needed.
pub fn xi_field(m: &VecField) -> Field {
    let (m1h, m2h) = Field::transform_pair(&m.x1, &m.x2);
    let mut spec = div_spectrum(&m1h, &m2h);
    poisson_spectrum(&mut spec);
    spec.inverse()
}

/// Potential `eta` of the momentum flux: `lap eta = div div (m (x) u)`,
/// zero mean. `m (x) u` is the tensor with entries `m_i u_j`; with
/// `m = rho u` it is symmetric.
pub fn eta_field(m: &VecField, u: &VecField) -> Field {
    let n = m.n();
    let t11 = m.x1.zip_with(&u.x1, |a, b| a * b);
    let t12 = m.x1.zip_with(&u.x2, |a, b| a * b);
    let t22 = m.x2.zip_with(&u.x2, |a, b| a * b);
    let (t11h, t12h) = Field::transform_pair(&t11, &t12);
    let t22h = t22.transform();

    // div div T has symbol -4 pi^2 (k1^2 T11 + 2 k1 k2 T12 + k2^2 T22);
    // dividing by the Laplacian symbol leaves a bounded multiplier.
    let mut spec = Spectrum::zeros(n);
    for i in 0..n {
        let k1 = deriv_wavenumber(i, n);
        for j in 0..n {
            let k2 = deriv_wavenumber(j, n);
            let k2sum = k1 * k1 + k2 * k2;
            let idx = i * n + j;
            if k2sum == 0.0 {
                continue;
            }
            let num = k1 * k1 * t11h.data()[idx]
                + 2.0 * k1 * k2 * t12h.data()[idx]
                + k2 * k2 * t22h.data()[idx];
            spec.data_mut()[idx] = num / k2sum;
        }
    }
    spec.inverse()
}

/// Apply the Lame operator `L u = mu lap u + grad((mu + lam) div u)` with a
/// precomputed bulk-viscosity field.
pub fn lame_apply(u: &VecField, lam: &Field, mu: f64) -> VecField {
    let n = u.n();
    let (u1h, u2h) = Field::transform_pair(&u.x1, &u.x2);

    let mut lap1 = Spectrum::zeros(n);
    let mut lap2 = Spectrum::zeros(n);
    for i in 0..n {
        let k1 = deriv_wavenumber(i, n);
        for j in 0..n {
            let k2 = deriv_wavenumber(j, n);
            let sym = -TAU * TAU * (k1 * k1 + k2 * k2);
            let idx = i * n + j;
            lap1.data_mut()[idx] = sym * u1h.data()[idx];
            lap2.data_mut()[idx] = sym * u2h.data()[idx];
        }
    }
    let (lap1, lap2) = Spectrum::inverse_pair(&lap1, &lap2);
    let divu = div_spectrum(&u1h, &u2h).inverse();
    let w = lam.zip_with(&divu, |l, d| (mu + l) * d);
    let wh = w.transform();
    let (g1, g2) = Spectrum::inverse_pair(&wh.derivative(Axis::X1), &wh.derivative(Axis::X2));

    let combine = |lap: &Field, g: &Field| {
        let mut out = Field::zeros(n);
        let (o, ls, gs) = (out.as_mut_slice(), lap.as_slice(), g.as_slice());
        for i in 0..o.len() {
            o[i] = mu * ls[i] + gs[i];
        }
        out
    };
    VecField {
        x1: combine(&lap1, &g1),
        x2: combine(&lap2, &g2),
    }
}

/// Options for [`lame_solve`].
#[derive(Clone, Copy, Debug)]
pub struct LameConfig {
    /// Relative residual target in the joint L2 norm.
    pub rtol: f64,
    /// Iteration cap before reporting failure.
    pub max_iters: usize,
}

impl Default for LameConfig {
    fn default() -> Self {
        LameConfig {
            rtol: 1e-10,
            max_iters: 500,
        }
    }
}

/// Exact inverse of the constant-coefficient operator
/// `-(mu lap + (mu + lam_bar) grad div)` used as the CG preconditioner.
///
/// In Fourier space the symbol acts as `(2 mu + lam_bar) 4 pi^2 |k|^2` on the
/// longitudinal part and `mu 4 pi^2 |k|^2` on the transverse part.
fn precondition(r: &VecField, mu: f64, lam_bar: f64) -> VecField {
    let n = r.n();
    let (r1h, r2h) = Field::transform_pair(&r.x1, &r.x2);
    let mut z1 = Spectrum::zeros(n);
    let mut z2 = Spectrum::zeros(n);
    let long_coeff = (2.0 * mu + lam_bar) * TAU * TAU;
    let trans_coeff = mu * TAU * TAU;
    for i in 0..n {
        let k1 = deriv_wavenumber(i, n);
        for j in 0..n {
            let k2 = deriv_wavenumber(j, n);
            let k2sum = k1 * k1 + k2 * k2;
            if k2sum == 0.0 {
                continue;
            }
            let idx = i * n + j;
            let v1 = r1h.data()[idx];
            let v2 = r2h.data()[idx];
            let kdotv = (k1 * v1 + k2 * v2) / k2sum;
            let (l1, l2) = (k1 * kdotv, k2 * kdotv);
            let (t1, t2) = (v1 - l1, v2 - l2);
            z1.data_mut()[idx] = l1 / (long_coeff * k2sum) + t1 / (trans_coeff * k2sum);
            z2.data_mut()[idx] = l2 / (long_coeff * k2sum) + t2 / (trans_coeff * k2sum);
        }
    }
    let (z1, z2) = Spectrum::inverse_pair(&z1, &z2);
    VecField { x1: z1, x2: z2 }
}

/// Joint inner product `<a, b> = sum over both components / n^2`.
fn vdot(a: &VecField, b: &VecField) -> f64 {
    let len = a.x1.as_slice().len();
    let (a1, a2) = (a.x1.as_slice(), a.x2.as_slice());
    let (b1, b2) = (b.x1.as_slice(), b.x2.as_slice());
    let s1 = pairwise_sum_by(len, |i| a1[i] * b1[i]);
    let s2 = pairwise_sum_by(len, |i| a2[i] * b2[i]);
    (s1 + s2) / len as f64
}

fn axpy(y: &mut VecField, alpha: f64, x: &VecField) {
    for (ys, xs) in [(&mut y.x1, &x.x1), (&mut y.x2, &x.x2)] {
        let (ys, xs) = (ys.as_mut_slice(), xs.as_slice());
        for i in 0..ys.len() {
            ys[i] += alpha * xs[i];
        }
    }
}

/// `p <- z + beta p`.
fn xpay(p: &mut VecField, beta: f64, z: &VecField) {
    for (ps, zs) in [(&mut p.x1, &z.x1), (&mut p.x2, &z.x2)] {
        let (ps, zs) = (ps.as_mut_slice(), zs.as_slice());
        for i in 0..ps.len() {
            ps[i] = zs[i] + beta * ps[i];
        }
    }
}

/// Solve `L_rho u = f` for the velocity field, pinning the component means
/// of `u` to `mean_u` (the operator annihilates constants, so means are free
/// parameters).
///
/// `f` must have component means below `1e-10 * max(1, |f|_inf)`; larger
/// means are incompatible with the periodic problem. The solve runs
/// preconditioned conjugate gradients on the positive-definite operator
/// `-L_rho`; the returned field is the iterate with the smallest relative
/// residual seen, so tightening `rtol` never worsens the answer.
pub fn lame_solve(
    rho: &Field,
    f: &VecField,
    mean_u: (f64, f64),
    params: &Params,
    cfg: &LameConfig,
) -> Result<VecField> {
    let n = rho.n();
    let min_rho = rho.min_value();
    if min_rho < 0.0 {
        return Err(Error::NonPositiveDensity { min: min_rho });
    }

    let f_scale = f.x1.lp_norm(f64::INFINITY).max(f.x2.lp_norm(f64::INFINITY));
    let tol = 1e-10 * f_scale.max(1.0);
    for (component, mean) in [(1usize, f.x1.mean()), (2usize, f.x2.mean())] {
        if mean.abs() > tol {
            return Err(Error::MeanIncompatible { component, mean, tol });
        }
    }

    // Project the data onto the solvable subspace and negate: b = -P f.
    let (mut f1h, mut f2h) = Field::transform_pair(&f.x1, &f.x2);
    project_null_modes(&mut f1h);
    project_null_modes(&mut f2h);
    let (pf1, pf2) = Spectrum::inverse_pair(&f1h, &f2h);
    let b = VecField {
        x1: pf1.map(|v| -v),
        x2: pf2.map(|v| -v),
    };

    let pin_means = |mut u: VecField| -> VecField {
        let (d1, d2) = (mean_u.0 - u.x1.mean(), mean_u.1 - u.x2.mean());
        for v in u.x1.as_mut_slice() {
            *v += d1;
        }
        for v in u.x2.as_mut_slice() {
            *v += d2;
        }
        u
    };

    let b_norm = b.l2_norm();
    if b_norm == 0.0 {
        return Ok(pin_means(VecField::zeros(n)));
    }

    let lam = bulk_viscosity(rho, params);
    let lam_bar = lam.mean();
    let mu = params.mu;

    let mut u = VecField::zeros(n);
    let mut r = b.clone();
    let mut z = precondition(&r, mu, lam_bar);
    let mut p = z.clone();
    let mut rz = vdot(&r, &z);
    let mut best = (u.clone(), 1.0f64);

    for iter in 1..=cfg.max_iters {
        let ap = {
            let lu = lame_apply(&p, &lam, mu);
            VecField {
                x1: lu.x1.map(|v| -v),
                x2: lu.x2.map(|v| -v),
            }
        };
        let pap = vdot(&p, &ap);
        if !(pap.is_finite() && pap > 0.0) {
            return Err(Error::NoConvergence {
                iterations: iter,
                residual: best.1,
                target: cfg.rtol,
            });
        }
        let alpha = rz / pap;
        axpy(&mut u, alpha, &p);
        axpy(&mut r, -alpha, &ap);
        let rel = r.l2_norm() / b_norm;
        if rel < best.1 {
            best = (u.clone(), rel);
        }
        if rel <= cfg.rtol {
            return Ok(pin_means(best.0));
        }
        z = precondition(&r, mu, lam_bar);
        let rz_new = vdot(&r, &z);
        xpay(&mut p, rz_new / rz, &z);
        rz = rz_new;
    }
    if best.1 <= cfg.rtol {
        return Ok(pin_means(best.0));
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iters,
        residual: best.1,
        target: cfg.rtol,
    })
}
