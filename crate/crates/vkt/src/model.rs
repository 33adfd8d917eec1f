//! Physical parameters, state, constitutive laws, and the semi-discrete
//! right-hand side of the compressible system in conservative variables.
//!
//! The momentum operator is `L_rho u = mu lap u + grad((mu + lam(rho)) div u)`
//! with shear viscosity `mu` constant and bulk viscosity `lam(rho) = rho^beta`.
//! Pressure is `P(rho) = A rho^gamma`. Two derived scalar fields reformulate
//! the dynamics:
//!
//! * effective viscous flux `F = (2 mu + lam(rho)) div u - P(rho)`
//! * vorticity `omega = d1 u2 - d2 u1`
//!
//! and the density-weighted acceleration pair
//!
//! * `rho H = mu d1 omega + d2 F`,  `rho L = -mu d2 omega + d1 F`
//!
//! satisfies `u_t + (u . grad) u = (L, H)`, which is how the material
//! acceleration is reconstructed without time differencing.

use crate::error::{Error, Result};
use crate::grid::{curl_spectrum, deriv_wavenumber, div_spectrum, pow_abs, Axis, Field, Spectrum, VecField};
use std::f64::consts::TAU;

/// Physical parameters of the system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    /// Shear viscosity `mu > 0`.
    pub mu: f64,
    /// Bulk viscosity exponent `beta` in `lam(rho) = rho^beta`.
    pub beta: f64,
    /// Adiabatic exponent `gamma > 1`.
    pub gamma: f64,
    /// Pressure constant `A > 0`.
    pub a: f64,
}

impl Params {
    pub fn new(mu: f64, beta: f64, gamma: f64, a: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive, got {beta}"
            )));
        }
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be greater than 1, got {gamma}"
            )));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!("A must be positive, got {a}")));
        }
        Ok(Params { mu, beta, gamma, a })
    }

    /// Warnings for parameter choices outside the global-regularity regime.
    /// They are accepted for experimentation but flagged at configuration
    /// time.
    pub fn hypothesis_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.beta <= 3.0 {
            w.push(format!(
                "beta = {} is at or below 3; global regularity of large solutions is only \
                 guaranteed for beta > 3",
                self.beta
            ));
        }
        w
    }
}

impl Default for Params {
    /// `mu = 1, beta = 4, gamma = 2, A = 1`.
    fn default() -> Self {
        Params {
            mu: 1.0,
            beta: 4.0,
            gamma: 2.0,
            a: 1.0,
        }
    }
}

/// Thresholds guarding divisions by density near vacuum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VacuumPolicy {
    /// Floor used in any division by density.
    pub eps_div: f64,
    /// Below this density a point is treated as vacuum: velocity and other
    /// per-mass quantities are zeroed there.
    pub eps_vac: f64,
}

impl Default for VacuumPolicy {
    fn default() -> Self {
        VacuumPolicy {
            eps_div: 1e-8,
            eps_vac: 1e-7,
        }
    }
}

/// Conservative state `(rho, m = rho u)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub rho: Field,
    pub m: VecField,
}

/// Largest admissible negative density sample in externally constructed
/// states (spectral interpolation may overshoot zero by rounding).
pub const NEGATIVE_DENSITY_TOL: f64 = 1e-10;

impl State {
    /// Validated construction: finite samples, positive total mass, and no
    /// density sample below `-NEGATIVE_DENSITY_TOL`.
    pub fn new(t: f64, rho: Field, m: VecField) -> Result<Self> {
        if rho.n() != m.n() {
            return Err(Error::InvalidParameter("state grid sizes disagree".into()));
        }
        if !t.is_finite() || !rho.is_finite() || !m.x1.is_finite() || !m.x2.is_finite() {
            return Err(Error::InvalidParameter("state contains non-finite samples".into()));
        }
        let min = rho.min_value();
        if min < -NEGATIVE_DENSITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "density has negative samples (min = {min:.3e})"
            )));
        }
        if rho.mean() <= 0.0 {
            return Err(Error::InvalidParameter("total mass must be positive".into()));
        }
        Ok(State { t, rho, m })
    }

    /// Build from primitive variables; `m = rho u` pointwise.
    pub fn from_primitives(t: f64, rho: Field, u: &VecField) -> Result<Self> {
        let m = VecField {
            x1: rho.zip_with(&u.x1, |r, v| r * v),
            x2: rho.zip_with(&u.x2, |r, v| r * v),
        };
        State::new(t, rho, m)
    }

    /// Unvalidated construction for integrator internals.
    pub(crate) fn raw(t: f64, rho: Field, m: VecField) -> Self {
        State { t, rho, m }
    }

    pub fn n(&self) -> usize {
        self.rho.n()
    }
}

/// Pressure `P(rho) = A max(rho, 0)^gamma`.
pub fn pressure(rho: &Field, params: &Params) -> Field {
    let (a, g) = (params.a, params.gamma);
    rho.map(|r| a * pow_abs(r.max(0.0), g))
}

/// Bulk viscosity `lam(rho) = max(rho, 0)^beta`.
pub fn bulk_viscosity(rho: &Field, params: &Params) -> Field {
    let b = params.beta;
    rho.map(|r| pow_abs(r.max(0.0), b))
}

/// Largest sound speed `sqrt(gamma P'(rho)) = sqrt(gamma A rho^(gamma-1))`
/// over the grid.
pub fn max_sound_speed(rho: &Field, params: &Params) -> f64 {
    let rmax = rho.max_value().max(0.0);
    (params.gamma * params.a * pow_abs(rmax, params.gamma - 1.0)).sqrt()
}

/// Velocity `u = m / rho` with the vacuum policy applied: division is floored
/// at `eps_div` and samples with `rho < eps_vac` are zeroed.
pub fn velocity(state: &State, policy: &VacuumPolicy) -> VecField {
    let f = |m: f64, r: f64| {
        if r < policy.eps_vac {
            0.0
        } else {
            m / r.max(policy.eps_div)
        }
    };
    VecField {
        x1: state.m.x1.zip_with(&state.rho, f),
        x2: state.m.x2.zip_with(&state.rho, f),
    }
}

/// Effective viscous flux `F = (2 mu + lam(rho)) div u - P(rho)`.
pub fn effective_flux(state: &State, params: &Params, policy: &VacuumPolicy) -> Field {
    let u = velocity(state, policy);
    let divu = u.div();
    let lam = bulk_viscosity(&state.rho, params);
    let p = pressure(&state.rho, params);
    let two_mu = 2.0 * params.mu;
    let visc = lam.zip_with(&divu, |l, d| (two_mu + l) * d);
    &visc - &p
}

/// Vorticity `omega = d1 u2 - d2 u1` of the policy-regularized velocity.
pub fn vorticity(state: &State, policy: &VacuumPolicy) -> Field {
    velocity(state, policy).curl()
}

/// The acceleration fields `H`, `L` and their density-weighted forms.
///
/// `rho H = mu d1 omega + d2 F` and `rho L = -mu d2 omega + d1 F`; the
/// unweighted fields divide by density under the vacuum policy.
#[derive(Clone, Debug)]
pub struct HlFields {
    pub h: Field,
    pub l: Field,
    pub rho_h: Field,
    pub rho_l: Field,
}

/// Compute `H`, `L`, `rho H`, `rho L` spectrally from the state.
pub fn hl_fields(state: &State, params: &Params, policy: &VacuumPolicy) -> HlFields {
    let u = velocity(state, policy);
    let (u1h, u2h) = Field::transform_pair(&u.x1, &u.x2);
    let (divu, omega) = Spectrum::inverse_pair(&div_spectrum(&u1h, &u2h), &curl_spectrum(&u1h, &u2h));
    let lam = bulk_viscosity(&state.rho, params);
    let p = pressure(&state.rho, params);
    let two_mu = 2.0 * params.mu;
    let flux = lam.zip_with(&divu, |l, d| (two_mu + l) * d);
    let flux = &flux - &p;

    let (fh, wh) = Field::transform_pair(&flux, &omega);
    let f1 = fh.derivative(Axis::X1);
    let f2 = fh.derivative(Axis::X2);
    let w1 = wh.derivative(Axis::X1);
    let w2 = wh.derivative(Axis::X2);

    let mu = params.mu;
    let mut rho_h_spec = Spectrum::zeros(state.n());
    let mut rho_l_spec = Spectrum::zeros(state.n());
    for (i, (out_h, out_l)) in rho_h_spec
        .data_mut()
        .iter_mut()
        .zip(rho_l_spec.data_mut().iter_mut())
        .enumerate()
    {
        *out_h = mu * w1.data()[i] + f2.data()[i];
        *out_l = -mu * w2.data()[i] + f1.data()[i];
    }
    let (rho_h, rho_l) = Spectrum::inverse_pair(&rho_h_spec, &rho_l_spec);

    let divide = |num: &Field| {
        num.zip_with(&state.rho, |v, r| {
            if r < policy.eps_vac {
                0.0
            } else {
                v / r.max(policy.eps_div)
            }
        })
    };
    HlFields {
        h: divide(&rho_h),
        l: divide(&rho_l),
        rho_h,
        rho_l,
    }
}

/// Material-acceleration reconstruction of `u_t`:
/// `u_t = (L, H) - (u . grad) u`, zeroed on vacuum samples.
pub fn ut_field(state: &State, params: &Params, policy: &VacuumPolicy) -> VecField {
    let hl = hl_fields(state, params, policy);
    let u = velocity(state, policy);
    let (u1h, u2h) = Field::transform_pair(&u.x1, &u.x2);
    let (d1u1, d2u1) = Spectrum::inverse_pair(&u1h.derivative(Axis::X1), &u1h.derivative(Axis::X2));
    let (d1u2, d2u2) = Spectrum::inverse_pair(&u2h.derivative(Axis::X1), &u2h.derivative(Axis::X2));
    let adv = |da: &Field, db: &Field| -> Field {
        let mut out = Field::zeros(state.n());
        let (o, u1s, u2s, das, dbs) = (
            out.as_mut_slice(),
            u.x1.as_slice(),
            u.x2.as_slice(),
            da.as_slice(),
            db.as_slice(),
        );
        for i in 0..o.len() {
            o[i] = u1s[i] * das[i] + u2s[i] * dbs[i];
        }
        out
    };
    let a1 = adv(&d1u1, &d2u1);
    let a2 = adv(&d1u2, &d2u2);
    let vac = |f: &Field| {
        f.zip_with(&state.rho, |v, r| if r < policy.eps_vac { 0.0 } else { v })
    };
    VecField {
        x1: vac(&(&hl.l - &a1)),
        x2: vac(&(&hl.h - &a2)),
    }
}

/// Semi-discrete time derivative of the conservative state.
#[derive(Clone, Debug)]
pub struct Rhs {
    pub drho: Field,
    pub dmom: VecField,
}

/// Assemble the right-hand side
///
/// ```text
/// drho = -div m
/// dmom = -div(m (x) u) + mu lap u + grad((mu + lam(rho)) div u - P(rho))
/// ```
///
/// pseudo-spectrally: derivatives in spectral space, products on the grid.
/// With `dealias` set, product spectra are truncated by the 2/3 rule before
/// differentiation. Errors with [`Error::BlowUp`]-adjacent NaN detection if
/// the result is not finite.
pub fn rhs(state: &State, params: &Params, policy: &VacuumPolicy, dealias: bool) -> Result<Rhs> {
    let n = state.n();
    if !finite_probe(state.rho.as_slice())
        || !finite_probe(state.m.x1.as_slice())
        || !finite_probe(state.m.x2.as_slice())
    {
        return Err(Error::BlowUp {
            step: 0,
            time: state.t,
            reason: "non-finite state".into(),
        });
    }
    let u = velocity(state, policy);

    let (m1h, m2h) = Field::transform_pair(&state.m.x1, &state.m.x2);
    let (u1h, u2h) = Field::transform_pair(&u.x1, &u.x2);

    let divu_spec = div_spectrum(&u1h, &u2h);
    let mut neg_divm = div_spectrum(&m1h, &m2h);
    for c in neg_divm.data_mut() {
        *c = -*c;
    }
    let (divu, drho) = Spectrum::inverse_pair(&divu_spec, &neg_divm);

    // w = (mu + lam) div u - P  combines both gradient-form momentum terms.
    let lam = bulk_viscosity(&state.rho, params);
    let p = pressure(&state.rho, params);
    let mu = params.mu;
    let w = {
        let mut w = Field::zeros(n);
        let (ws, ls, ds, ps) = (w.as_mut_slice(), lam.as_slice(), divu.as_slice(), p.as_slice());
        for i in 0..ws.len() {
            ws[i] = (mu + ls[i]) * ds[i] - ps[i];
        }
        w
    };

    // Momentum flux products; m (x) u is symmetric because m = rho u.
    let a = state.m.x1.zip_with(&u.x1, |x, y| x * y);
    let b = state.m.x1.zip_with(&u.x2, |x, y| x * y);
    let c = state.m.x2.zip_with(&u.x2, |x, y| x * y);

    let (mut ah, mut bh) = Field::transform_pair(&a, &b);
    let (mut ch, mut wh) = Field::transform_pair(&c, &w);
    if dealias {
        ah.dealias();
        bh.dealias();
        ch.dealias();
        wh.dealias();
    }

    let mut dm1 = Spectrum::zeros(n);
    let mut dm2 = Spectrum::zeros(n);
    {
        let (ah, bh, ch, wh) = (ah.data(), bh.data(), ch.data(), wh.data());
        let (u1h, u2h) = (u1h.data(), u2h.data());
        let (dm1, dm2) = (dm1.data_mut(), dm2.data_mut());
        for i in 0..n {
            let k1 = deriv_wavenumber(i, n);
            let base = i * n;
            for j in 0..n {
                let k2 = deriv_wavenumber(j, n);
                let idx = base + j;
                let visc = -TAU * TAU * (k1 * k1 + k2 * k2) * mu;
                // -i 2 pi (k1 a + k2 b) + visc u1 + i 2 pi k1 w
                dm1[idx].re = TAU * (k1 * ah[idx].im + k2 * bh[idx].im)
                    + visc * u1h[idx].re
                    - TAU * k1 * wh[idx].im;
                dm1[idx].im = -TAU * (k1 * ah[idx].re + k2 * bh[idx].re)
                    + visc * u1h[idx].im
                    + TAU * k1 * wh[idx].re;
                dm2[idx].re = TAU * (k1 * bh[idx].im + k2 * ch[idx].im)
                    + visc * u2h[idx].re
                    - TAU * k2 * wh[idx].im;
                dm2[idx].im = -TAU * (k1 * bh[idx].re + k2 * ch[idx].re)
                    + visc * u2h[idx].im
                    + TAU * k2 * wh[idx].re;
            }
        }
    }
    let (dm1, dm2) = Spectrum::inverse_pair(&dm1, &dm2);

    if !finite_probe(drho.as_slice()) || !finite_probe(dm1.as_slice()) || !finite_probe(dm2.as_slice())
    {
        return Err(Error::BlowUp {
            step: 0,
            time: state.t,
            reason: "non-finite right-hand side".into(),
        });
    }
    Ok(Rhs {
        drho,
        dmom: VecField { x1: dm1, x2: dm2 },
    })
}

/// Cheap full-slice finiteness probe: `x * 0` is zero for finite `x` and NaN
/// for infinities/NaNs, so the accumulator is NaN exactly when a non-finite
/// sample exists.
fn finite_probe(data: &[f64]) -> bool {
    data.iter().fold(0.0f64, |acc, &x| acc + x * 0.0).is_finite()
}
