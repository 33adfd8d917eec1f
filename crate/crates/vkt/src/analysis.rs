//! Diagnostic functionals: conserved quantities, energy balance, the
//! rotation/compression functionals built from the effective viscous flux and
//! acceleration fields, density-norm scaling scans, and sharp-constant
//! interpolation-inequality checks.

use crate::elliptic;
use crate::error::{Error, Result};
use crate::grid::{pow_abs, Field, VecField};
use crate::model::{self, Params, State, VacuumPolicy};

/// One diagnostics row. `norm_ratios` follows the configured k list; the
/// `energy_balance` column is filled after a run from the full row series.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagRow {
    pub t: f64,
    pub mass: f64,
    pub mom1: f64,
    pub mom2: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub energy_balance: f64,
    pub z2: f64,
    pub y2: f64,
    pub psi2: f64,
    pub rho_max: f64,
    pub rho_min: f64,
    pub f_m: f64,
    pub norm_ratios: Vec<f64>,
    pub rho_ut_norm: f64,
}

/// Total mass and momentum `(∫rho, (∫m1, ∫m2))`.
pub fn conserved(state: &State) -> (f64, (f64, f64)) {
    (
        state.rho.mean(),
        (state.m.x1.mean(), state.m.x2.mean()),
    )
}

/// Total energy `∫ (1/2 rho |u|^2 + A rho^gamma / (gamma - 1))`. Kinetic
/// energy is read as `|m|^2 / rho` under the vacuum policy.
pub fn energy(state: &State, params: &Params, policy: &VacuumPolicy) -> f64 {
    let n = state.n();
    let mut out = Field::zeros(n);
    let cp = params.a / (params.gamma - 1.0);
    {
        let o = out.as_mut_slice();
        let r = state.rho.as_slice();
        let m1 = state.m.x1.as_slice();
        let m2 = state.m.x2.as_slice();
        for i in 0..o.len() {
            let kin = if r[i] < policy.eps_vac {
                0.0
            } else {
                0.5 * (m1[i] * m1[i] + m2[i] * m2[i]) / r[i].max(policy.eps_div)
            };
            o[i] = kin + cp * pow_abs(r[i].max(0.0), params.gamma);
        }
    }
    out.mean()
}

/// Viscous dissipation rate `∫ (mu w^2 + (2mu + lam(rho)) (div u)^2)` with
/// `w` the vorticity.
pub fn dissipation(state: &State, params: &Params, policy: &VacuumPolicy) -> f64 {
    let u = model::velocity(state, policy);
    let w = u.curl();
    let divu = u.div();
    let lam = model::bulk_viscosity(&state.rho, params);
    let mut out = Field::zeros(state.n());
    {
        let o = out.as_mut_slice();
        let (ws, ds, ls) = (w.as_slice(), divu.as_slice(), lam.as_slice());
        for i in 0..o.len() {
            o[i] = params.mu * ws[i] * ws[i] + (2.0 * params.mu + ls[i]) * ds[i] * ds[i];
        }
    }
    out.mean()
}

/// Rotation/compression functional `Z^2 = ∫ (mu w^2 + F^2 / (2mu + lam))`
/// built from the effective viscous flux `F`.
pub fn z_functional(state: &State, params: &Params, policy: &VacuumPolicy) -> f64 {
    let u = model::velocity(state, policy);
    let w = u.curl();
    let f = model::effective_flux(state, params, policy);
    let lam = model::bulk_viscosity(&state.rho, params);
    let mut out = Field::zeros(state.n());
    {
        let o = out.as_mut_slice();
        let (ws, fs, ls) = (w.as_slice(), f.as_slice(), lam.as_slice());
        for i in 0..o.len() {
            o[i] = params.mu * ws[i] * ws[i] + fs[i] * fs[i] / (2.0 * params.mu + ls[i]);
        }
    }
    out.mean()
}

/// Acceleration functional `Y^2 = ∫ ((rho H)^2 + (rho L)^2) / rho`, restricted
/// to samples with density above the vacuum cut.
pub fn y_functional(state: &State, params: &Params, policy: &VacuumPolicy) -> f64 {
    let hl = model::hl_fields(state, params, policy);
    let mut out = Field::zeros(state.n());
    {
        let o = out.as_mut_slice();
        let (rh, rl, r) = (
            hl.rho_h.as_slice(),
            hl.rho_l.as_slice(),
            state.rho.as_slice(),
        );
        for i in 0..o.len() {
            if r[i] >= policy.eps_vac {
                o[i] = (rh[i] * rh[i] + rl[i] * rl[i]) / r[i].max(policy.eps_div);
            }
        }
    }
    out.mean()
}

/// Cross-derivative functional
/// `psi^2 = ∫ (mu (H_x1 - L_x2)^2 + (2mu + lam) (H_x2 + L_x1)^2)` of the
/// acceleration fields.
pub fn psi_functional(state: &State, params: &Params, policy: &VacuumPolicy) -> f64 {
    let hl = model::hl_fields(state, params, policy);
    let (hh, lh) = Field::transform_pair(&hl.h, &hl.l);
    let (h1, h2) = crate::grid::Spectrum::inverse_pair(
        &hh.derivative(crate::grid::Axis::X1),
        &hh.derivative(crate::grid::Axis::X2),
    );
    let (l1, l2) = crate::grid::Spectrum::inverse_pair(
        &lh.derivative(crate::grid::Axis::X1),
        &lh.derivative(crate::grid::Axis::X2),
    );
    let lam = model::bulk_viscosity(&state.rho, params);
    let mut out = Field::zeros(state.n());
    {
        let o = out.as_mut_slice();
        let (h1s, h2s, l1s, l2s, ls) = (
            h1.as_slice(),
            h2.as_slice(),
            l1.as_slice(),
            l2.as_slice(),
            lam.as_slice(),
        );
        for i in 0..o.len() {
            let a = h1s[i] - l2s[i];
            let b = h2s[i] + l1s[i];
            o[i] = params.mu * a * a + (2.0 * params.mu + ls[i]) * b * b;
        }
    }
    out.mean()
}

/// Weighted positive-part moment
/// `f_m = (∫ rho [(xi + theta(rho))_+]^(2m))^(1/2m)` with `Δxi = div m`;
/// `theta` enters only where density exceeds the vacuum cut.
pub fn f_functional(state: &State, params: &Params, policy: &VacuumPolicy, m: usize) -> Result<f64> {
    if m < 1 {
        return Err(Error::ExponentOutOfRange {
            check: "f_functional",
            detail: format!("moment order m must be >= 1, got {m}"),
        });
    }
    let xi = elliptic::xi_field(&state.m);
    let mut out = Field::zeros(state.n());
    {
        let o = out.as_mut_slice();
        let (xs, rs) = (xi.as_slice(), state.rho.as_slice());
        let p = 2 * m as i32;
        for i in 0..o.len() {
            if rs[i] >= policy.eps_vac {
                let v = xs[i] + crate::lagrangian::theta_scalar(rs[i], params);
                if v > 0.0 {
                    o[i] = rs[i] * v.powi(p);
                }
            }
        }
    }
    Ok(out.mean().powf(1.0 / (2.0 * m as f64)))
}

/// Weighted acceleration norm `(∫ rho |u_t + u·grad u|^2)^(1/2)`.
pub fn rho_ut_norm(state: &State, params: &Params, policy: &VacuumPolicy) -> f64 {
    let ut = model::ut_field(state, params, policy);
    let mut out = Field::zeros(state.n());
    {
        let o = out.as_mut_slice();
        let (r, a, b) = (state.rho.as_slice(), ut.x1.as_slice(), ut.x2.as_slice());
        for i in 0..o.len() {
            o[i] = r[i].max(0.0) * (a[i] * a[i] + b[i] * b[i]);
        }
    }
    out.mean().sqrt()
}

/// One row of a density-norm scaling scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormScanRow {
    pub k: f64,
    pub norm: f64,
    /// `norm * k^(-2/(beta-1))`; bounded ratios indicate the upper-norm
    /// growth stays within the scaling the bulk-viscosity exponent allows.
    pub ratio: f64,
}

/// Scan `‖rho‖_k` over the given orders, reporting the compensated ratio
/// `‖rho‖_k k^(-2/(beta-1))`. Requires `beta > 1`.
pub fn density_norm_scan(rho: &Field, params: &Params, ks: &[f64]) -> Result<Vec<NormScanRow>> {
    if params.beta <= 1.0 {
        return Err(Error::ExponentOutOfRange {
            check: "density_norm_scan",
            detail: format!("scaling exponent needs beta > 1, got {}", params.beta),
        });
    }
    let e = -2.0 / (params.beta - 1.0);
    Ok(ks
        .iter()
        .map(|&k| {
            let norm = rho.lp_norm(k);
            NormScanRow {
                k,
                norm,
                ratio: norm * k.powf(e),
            }
        })
        .collect())
}

/// Residual of the vorticity transport identity
/// `w_t + u·grad w + w div u = ∂_x1 H - ∂_x2 L` in L2, with the time
/// derivative taken as the centered difference of the two states and spatial
/// terms evaluated on their arithmetic average.
pub fn vorticity_transport_residual(
    prev: &State,
    next: &State,
    params: &Params,
    policy: &VacuumPolicy,
) -> Result<f64> {
    let dt = next.t - prev.t;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "states must be time-ordered, got dt = {dt}"
        )));
    }
    let n = prev.n();
    let mid = {
        let avg = |a: &Field, b: &Field| a.zip_with(b, |x, y| 0.5 * (x + y));
        State::raw(
            0.5 * (prev.t + next.t),
            avg(&prev.rho, &next.rho),
            VecField {
                x1: avg(&prev.m.x1, &next.m.x1),
                x2: avg(&prev.m.x2, &next.m.x2),
            },
        )
    };
    let w_prev = model::vorticity(prev, policy);
    let w_next = model::vorticity(next, policy);
    let u = model::velocity(&mid, policy);
    let w = u.curl();
    let gw = w.grad();
    let divu = u.div();
    let hl = model::hl_fields(&mid, params, policy);
    let (hh, lh) = Field::transform_pair(&hl.h, &hl.l);
    let (h1, l2) = crate::grid::Spectrum::inverse_pair(
        &hh.derivative(crate::grid::Axis::X1),
        &lh.derivative(crate::grid::Axis::X2),
    );
    let mut resid = Field::zeros(n);
    {
        let o = resid.as_mut_slice();
        let (wp, wn) = (w_prev.as_slice(), w_next.as_slice());
        let (u1, u2) = (u.x1.as_slice(), u.x2.as_slice());
        let (g1, g2) = (gw.x1.as_slice(), gw.x2.as_slice());
        let (ws, ds) = (w.as_slice(), divu.as_slice());
        let (h1s, l2s) = (h1.as_slice(), l2.as_slice());
        for i in 0..o.len() {
            let wt = (wn[i] - wp[i]) / dt;
            o[i] = wt + u1[i] * g1[i] + u2[i] * g2[i] + ws[i] * ds[i] - (h1s[i] - l2s[i]);
        }
    }
    Ok(resid.lp_norm(2.0))
}

/// Energy-balance residual series: `E(t_j) + ∫_0^{t_j} D - E(0)` with the
/// dissipation integral accumulated by local cubic quadrature (two-point
/// Gauss on the interpolating polynomial through up to four nearest rows),
/// giving a fourth-order-in-cadence residual that isolates the integrator's
/// own error.
pub fn energy_balance(rows: &[DiagRow]) -> Vec<f64> {
    let mut out = vec![0.0; rows.len()];
    if rows.len() < 2 {
        return out;
    }
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let ds: Vec<f64> = rows.iter().map(|r| r.dissipation).collect();
    let mut cum = 0.0;
    for j in 1..rows.len() {
        cum += interval_integral(&ts, &ds, j);
        out[j] = rows[j].energy + cum - rows[0].energy;
    }
    out
}

/// Integral of the sampled function over `[ts[j-1], ts[j]]` by two-point
/// Gauss applied to the Newton-form interpolant through the (up to four)
/// nearest nodes.
fn interval_integral(ts: &[f64], fs: &[f64], j: usize) -> f64 {
    let n = ts.len();
    let s = n.min(4);
    let lo = (j as isize - 2).clamp(0, (n - s) as isize) as usize;
    let t = &ts[lo..lo + s];
    let mut c: Vec<f64> = fs[lo..lo + s].to_vec();
    for k in 1..s {
        for i in (k..s).rev() {
            c[i] = (c[i] - c[i - 1]) / (t[i] - t[i - k]);
        }
    }
    let eval = |x: f64| {
        let mut p = c[s - 1];
        for i in (0..s - 1).rev() {
            p = p * (x - t[i]) + c[i];
        }
        p
    };
    let (a, b) = (ts[j - 1], ts[j]);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let g = half / 3f64.sqrt();
    half * (eval(mid - g) + eval(mid + g))
}

/// Which interpolation inequality to evaluate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InequalityKind {
    /// `‖h‖_q <= C ‖h‖_r^(1-alpha) ‖grad h‖_m^alpha` for mean-zero `h`,
    /// `alpha = (1/r - 1/q) / (1/r - 1/m + 1/2)`.
    GagliardoNirenberg { q: f64, m: f64, r: f64 },
    /// `‖h‖_(2m/(2-m)) <= C (2-m)^(-1/2) ‖grad h‖_m` for `1 <= m < 2`.
    Poincare { m: f64 },
    /// `‖h‖_(2m) <= C (‖h‖_1 + m^(1/2) ‖h‖_(2(1-eps))^s ‖grad h‖_(2m/(m+eta))^(1-s))`
    /// with `s = (1-eps)(1-eta) / (m - eta(1-eps))`, for `m >= 2`,
    /// `0 < eta <= 1`, `0 <= eps <= 1/2`.
    MomentInterpolation { m: f64, eta: f64, eps: f64 },
}

/// Measured sides of an inequality check; `ratio = lhs / rhs_without_c` is
/// an empirical lower bound on the admissible constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs_without_c: f64,
    pub ratio: f64,
}

/// Evaluate both sides of the chosen inequality on a mean-zero field.
pub fn inequality_check(kind: &InequalityKind, h: &Field) -> Result<InequalityReport> {
    let scale = h.lp_norm(f64::INFINITY).max(1.0);
    let mean = h.mean();
    if mean.abs() > 1e-10 * scale {
        return Err(Error::NonZeroMean {
            mean,
            tol: 1e-10 * scale,
        });
    }
    let grad_mag = h.grad().magnitude();
    let (lhs, rhs) = match *kind {
        InequalityKind::GagliardoNirenberg { q, m, r } => {
            if q < 1.0 || r < 1.0 || m < 1.0 {
                return Err(Error::ExponentOutOfRange {
                    check: "gagliardo_nirenberg",
                    detail: format!("need q, m, r >= 1, got q = {q}, m = {m}, r = {r}"),
                });
            }
            let num = 1.0 / r - 1.0 / q;
            let den = 1.0 / r - 1.0 / m + 0.5;
            let alpha = if den.abs() < 1e-14 {
                if num.abs() < 1e-14 {
                    0.0
                } else {
                    return Err(Error::ExponentOutOfRange {
                        check: "gagliardo_nirenberg",
                        detail: format!("degenerate exponents q = {q}, m = {m}, r = {r}"),
                    });
                }
            } else {
                num / den
            };
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::ExponentOutOfRange {
                    check: "gagliardo_nirenberg",
                    detail: format!(
                        "interpolation weight {alpha:.4} outside [0, 1] for q = {q}, m = {m}, r = {r}"
                    ),
                });
            }
            (
                h.lp_norm(q),
                h.lp_norm(r).powf(1.0 - alpha) * grad_mag.lp_norm(m).powf(alpha),
            )
        }
        InequalityKind::Poincare { m } => {
            if !(1.0..2.0).contains(&m) {
                return Err(Error::ExponentOutOfRange {
                    check: "poincare",
                    detail: format!("need 1 <= m < 2, got m = {m}"),
                });
            }
            (
                h.lp_norm(2.0 * m / (2.0 - m)),
                (2.0 - m).powf(-0.5) * grad_mag.lp_norm(m),
            )
        }
        InequalityKind::MomentInterpolation { m, eta, eps } => {
            if m < 2.0 || !(eta > 0.0 && eta <= 1.0) || !(0.0..=0.5).contains(&eps) {
                return Err(Error::ExponentOutOfRange {
                    check: "moment_interpolation",
                    detail: format!(
                        "need m >= 2, 0 < eta <= 1, 0 <= eps <= 1/2, got m = {m}, eta = {eta}, eps = {eps}"
                    ),
                });
            }
            let s = (1.0 - eps) * (1.0 - eta) / (m - eta * (1.0 - eps));
            let rhs = h.lp_norm(1.0)
                + m.sqrt()
                    * h.lp_norm(2.0 * (1.0 - eps)).powf(s)
                    * grad_mag.lp_norm(2.0 * m / (m + eta)).powf(1.0 - s);
            (h.lp_norm(2.0 * m), rhs)
        }
    };
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(InequalityReport {
        lhs,
        rhs_without_c: rhs,
        ratio,
    })
}

/// Assemble one diagnostics row (`energy_balance` is filled post-run).
pub fn diag_row(
    state: &State,
    params: &Params,
    policy: &VacuumPolicy,
    norm_ks: &[f64],
    f_m_order: usize,
) -> DiagRow {
    let (mass, (mom1, mom2)) = conserved(state);
    let norm_ratios = if params.beta > 1.0 {
        density_norm_scan(&state.rho, params, norm_ks)
            .expect("beta > 1 checked")
            .into_iter()
            .map(|r| r.ratio)
            .collect()
    } else {
        norm_ks.iter().map(|&k| state.rho.lp_norm(k)).collect()
    };
    DiagRow {
        t: state.t,
        mass,
        mom1,
        mom2,
        energy: energy(state, params, policy),
        dissipation: dissipation(state, params, policy),
        energy_balance: 0.0,
        z2: z_functional(state, params, policy),
        y2: y_functional(state, params, policy),
        psi2: psi_functional(state, params, policy),
        rho_max: state.rho.max_value(),
        rho_min: state.rho.min_value(),
        f_m: f_functional(state, params, policy, f_m_order).unwrap_or(f64::NAN),
        norm_ratios,
        rho_ut_norm: rho_ut_norm(state, params, policy),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn uniform_rest(n: usize) -> State {
        State::from_primitives(0.0, Field::constant(n, 1.0), &VecField::zeros(n)).unwrap()
    }

    #[test]
    fn energy_of_simple_states() {
        let params = Params::default();
        let policy = VacuumPolicy::default();
        let s = uniform_rest(64);
        assert!((energy(&s, &params, &policy) - 1.0).abs() < 1e-14);

        // rho = 2, u = 0, gamma = 3, A = 0.5: E = 0.5 * 8 / 2 = 2.
        let p2 = Params::new(1.0, 4.0, 3.0, 0.5).unwrap();
        let s2 =
            State::from_primitives(0.0, Field::constant(64, 2.0), &VecField::zeros(64)).unwrap();
        assert!((energy(&s2, &p2, &policy) - 2.0).abs() < 1e-13);

        // Kinetic part: rho = 1, u = (sin, 0): 1/2 * 1/2 = 1/4 on top of 1.
        let u = VecField::from_fns(64, |x1, _| (TAU * x1).sin(), |_, _| 0.0);
        let s3 = State::from_primitives(0.0, Field::constant(64, 1.0), &u).unwrap();
        assert!((energy(&s3, &params, &policy) - 1.25).abs() < 1e-13);
    }

    #[test]
    fn dissipation_of_pure_shear() {
        // u = (sin(2 pi x2), 0): w = -2 pi cos, div u = 0, mu = 1 -> 2 pi^2.
        let n = 64;
        let u = VecField::from_fns(n, |_, x2| (TAU * x2).sin(), |_, _| 0.0);
        let s = State::from_primitives(0.0, Field::constant(n, 1.0), &u).unwrap();
        let d = dissipation(&s, &Params::default(), &VacuumPolicy::default());
        assert!((d - 2.0 * PI * PI).abs() < 1e-10, "d = {d}");
    }

    #[test]
    fn z_functional_at_uniform_rest() {
        // F = -P = -1, lam = 1: Z^2 = 1 / (2 mu + 1) = 1/3.
        let z = z_functional(&uniform_rest(32), &Params::default(), &VacuumPolicy::default());
        assert!((z - 1.0 / 3.0).abs() < 1e-12, "z = {z}");
    }

    #[test]
    fn y_functional_matches_manufactured_solution() {
        // rho = 1, u = (sin(2 pi x2), sin(2 pi x1)): div u = 0 so F = -1,
        // rho H = mu w_x1 = -4 pi^2 sin(2 pi x1), rho L = -4 pi^2 sin(2 pi x2)
        // giving Y^2 = 16 pi^4.
        let n = 64;
        let u = VecField::from_fns(n, |_, x2| (TAU * x2).sin(), |x1, _| (TAU * x1).sin());
        let s = State::from_primitives(0.0, Field::constant(n, 1.0), &u).unwrap();
        let y = y_functional(&s, &Params::default(), &VacuumPolicy::default());
        let expect = 16.0 * PI.powi(4);
        assert!((y - expect).abs() < 1e-9 * expect, "y = {y}, expect {expect}");
    }

    #[test]
    fn psi_functional_matches_manufactured_solution() {
        let n = 64;
        let params = Params::default();
        let policy = VacuumPolicy::default();
        let u = VecField::from_fns(n, |x1, _| (TAU * x1).sin(), |_, x2| (TAU * x2).sin());
        let s = State::from_primitives(0.0, Field::constant(n, 1.0), &u).unwrap();
        let psi = psi_functional(&s, &params, &policy);

        // For u = (sin(2 pi x1), sin(2 pi x2)) at rho = 1: w = 0,
        // F = 3 * 2 pi (cos(2 pi x1) + cos(2 pi x2)) - 1, so
        // H = -12 pi^2 sin(2 pi x2), L = -12 pi^2 sin(2 pi x1);
        // H_x1 - L_x2 = 0, H_x2 + L_x1 = -24 pi^3 (cos(2 pi x1) + cos(2 pi x2)),
        // psi^2 = 3 * (24 pi^3)^2 * (1/2 + 1/2) = 1728 pi^6.
        let expect = 3.0 * 576.0 * PI.powi(6);
        assert!(
            (psi - expect).abs() < 1e-9 * expect,
            "psi = {psi}, expect {expect}"
        );
    }

    #[test]
    fn f_functional_matches_positive_part_moment() {
        // rho = 1 (theta = 0), m = grad(cos(2 pi x1)): xi = cos(2 pi x1),
        // f_2 = (∫ (cos_+)^4)^(1/4) = (3/16)^(1/4).
        let n = 128;
        let u = VecField::from_fns(n, |x1, _| -TAU * (TAU * x1).sin(), |_, _| 0.0);
        let s = State::from_primitives(0.0, Field::constant(n, 1.0), &u).unwrap();
        let f = f_functional(&s, &Params::default(), &VacuumPolicy::default(), 2).unwrap();
        let expect = (3.0f64 / 16.0).powf(0.25);
        assert!((f - expect).abs() < 1e-6, "f = {f}, expect {expect}");
        assert!(f_functional(&s, &Params::default(), &VacuumPolicy::default(), 0).is_err());
    }

    #[test]
    fn rho_ut_norm_of_pressure_relaxation() {
        // rho = 1 + 0.1 cos(2 pi x1), u = 0: only L = -P_x1 / rho acts, so
        // ∫ rho |u_t|^2 = ∫ (P_x1)^2 / rho = 0.08 pi^2 for P = rho^2.
        let n = 64;
        let rho = Field::from_fn(n, |x1, _| 1.0 + 0.1 * (TAU * x1).cos());
        let s = State::from_primitives(0.0, rho, &VecField::zeros(n)).unwrap();
        let v = rho_ut_norm(&s, &Params::default(), &VacuumPolicy::default());
        let expect = (0.08f64).sqrt() * PI;
        assert!((v - expect).abs() < 1e-10, "v = {v}, expect {expect}");
        assert!(
            rho_ut_norm(&uniform_rest(32), &Params::default(), &VacuumPolicy::default()) < 1e-12
        );
    }

    #[test]
    fn norm_scan_ratios_compensate_growth() {
        let n = 64;
        let rho = Field::from_fn(n, |x1, x2| 1.0 + 0.5 * (TAU * x1).cos() * (TAU * x2).cos());
        let params = Params::default();
        let rows = density_norm_scan(&rho, &params, &[2.0, 4.0, 8.0]).unwrap();
        // beta = 4: exponent -2/3; norms increase in k, ratios decrease.
        assert!(rows[0].norm <= rows[1].norm && rows[1].norm <= rows[2].norm);
        assert!(rows[0].ratio > rows[1].ratio && rows[1].ratio > rows[2].ratio);
        let expect = rows[1].norm * 4.0f64.powf(-2.0 / 3.0);
        assert!((rows[1].ratio - expect).abs() < 1e-14);

        let bad = Params::new(1.0, 1.0, 2.0, 1.0).unwrap();
        assert!(matches!(
            density_norm_scan(&rho, &bad, &[2.0]),
            Err(Error::ExponentOutOfRange { .. })
        ));
    }

    #[test]
    fn energy_balance_quadrature_is_fourth_order() {
        // Synthetic rows with E(t) = sin t, D(t) = -cos t satisfy the balance
        // identity exactly; the residual is pure quadrature error and must
        // shrink 16x when the cadence halves.
        let make = |steps: usize| -> Vec<DiagRow> {
            (0..=steps)
                .map(|i| {
                    let t = i as f64 / steps as f64;
                    let mut row = blank_row(t);
                    row.energy = t.sin();
                    row.dissipation = -t.cos();
                    row
                })
                .collect()
        };
        let coarse = energy_balance(&make(16));
        let fine = energy_balance(&make(32));
        let err = |v: &[f64]| v.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let ratio = err(&coarse) / err(&fine);
        assert!(
            (12.0..=20.0).contains(&ratio),
            "refinement ratio {ratio:.2}"
        );
        // Degenerate lengths must not panic.
        assert_eq!(energy_balance(&[blank_row(0.0)]), vec![0.0]);
        assert_eq!(energy_balance(&[]), Vec::<f64>::new());
    }

    fn blank_row(t: f64) -> DiagRow {
        DiagRow {
            t,
            mass: 0.0,
            mom1: 0.0,
            mom2: 0.0,
            energy: 0.0,
            dissipation: 0.0,
            energy_balance: 0.0,
            z2: 0.0,
            y2: 0.0,
            psi2: 0.0,
            rho_max: 0.0,
            rho_min: 0.0,
            f_m: 0.0,
            norm_ratios: Vec::new(),
            rho_ut_norm: 0.0,
        }
    }

    #[test]
    fn vorticity_transport_residual_shrinks_with_dt() {
        use crate::dynamics::step;
        let n = 32;
        let params = Params::new(0.01, 4.0, 2.0, 1.0).unwrap();
        let policy = VacuumPolicy::default();
        let rho = Field::from_fn(n, |x1, x2| 0.8 + 0.2 * (TAU * x1).cos() * (TAU * x2).sin());
        let u = VecField::from_fns(
            n,
            |_, x2| 0.3 * (TAU * x2).sin(),
            |x1, _| 0.2 * (TAU * x1).sin(),
        );
        let s0 = State::from_primitives(0.0, rho, &u).unwrap();
        let resid_at = |dt: f64| {
            let s1 = step(&s0, dt, &params, &policy, false).unwrap();
            let s2 = step(&s1, dt, &params, &policy, false).unwrap();
            vorticity_transport_residual(&s0, &s2, &params, &policy).unwrap()
        };
        let r1 = resid_at(2e-4);
        let r2 = resid_at(1e-4);
        let ratio = r1 / r2;
        assert!(r1 < 1e-2, "residual too large: {r1:.3e}");
        assert!(
            (3.2..=4.8).contains(&ratio),
            "centered-difference order off: ratio {ratio:.2}"
        );
        assert!(vorticity_transport_residual(&s0, &s0, &params, &policy).is_err());
    }

    #[test]
    fn inequality_frozen_ratios() {
        let n = 256;
        let h = Field::from_fn(n, |x1, _| (TAU * x1).sin());

        // Gagliardo-Nirenberg q=4, m=r=2 on sin(2 pi x1): lhs = (3/8)^(1/4),
        // rhs = sqrt(pi), ratio 0.44150.
        let gn = inequality_check(
            &InequalityKind::GagliardoNirenberg {
                q: 4.0,
                m: 2.0,
                r: 2.0,
            },
            &h,
        )
        .unwrap();
        assert!((gn.lhs - (3.0f64 / 8.0).powf(0.25)).abs() < 1e-10);
        assert!((gn.rhs_without_c - PI.sqrt()).abs() < 1e-10);
        assert!((gn.ratio - 0.44150).abs() < 1e-5, "gn ratio {}", gn.ratio);

        // Poincare m=1: lhs = ‖h‖_2 = sqrt(1/2), rhs = ∫|grad h| = 4,
        // ratio 0.17678.
        // |grad h| = 2 pi |cos| has kinks, so its rect-rule integral carries
        // an O(n^-2) error (~2e-4 at n = 256).
        let p = inequality_check(&InequalityKind::Poincare { m: 1.0 }, &h).unwrap();
        assert!((p.rhs_without_c - 4.0).abs() < 5e-4);
        assert!((p.ratio - 0.17678).abs() < 1e-5, "poincare ratio {}", p.ratio);

        // Moment interpolation is finite and positive on the same field.
        let mi = inequality_check(
            &InequalityKind::MomentInterpolation {
                m: 4.0,
                eta: 0.5,
                eps: 0.25,
            },
            &h,
        )
        .unwrap();
        assert!(mi.ratio.is_finite() && mi.ratio > 0.0);
    }

    #[test]
    fn inequality_validation_and_edge_cases() {
        let n = 32;
        let h = Field::from_fn(n, |x1, _| (TAU * x1).sin());
        // Out-of-range exponents.
        assert!(matches!(
            inequality_check(&InequalityKind::Poincare { m: 2.0 }, &h),
            Err(Error::ExponentOutOfRange { .. })
        ));
        assert!(matches!(
            inequality_check(
                &InequalityKind::GagliardoNirenberg {
                    q: 1.5,
                    m: 2.0,
                    r: 2.0
                },
                &h
            ),
            Err(Error::ExponentOutOfRange { .. })
        ));
        assert!(matches!(
            inequality_check(
                &InequalityKind::MomentInterpolation {
                    m: 1.0,
                    eta: 0.5,
                    eps: 0.25
                },
                &h
            ),
            Err(Error::ExponentOutOfRange { .. })
        ));
        // Mean-zero precondition.
        assert!(matches!(
            inequality_check(
                &InequalityKind::Poincare { m: 1.0 },
                &Field::constant(n, 1.0)
            ),
            Err(Error::NonZeroMean { .. })
        ));
        // Zero field reports ratio 0.
        let z = inequality_check(&InequalityKind::Poincare { m: 1.5 }, &Field::zeros(n)).unwrap();
        assert_eq!(z.ratio, 0.0);
    }

    #[test]
    fn diag_row_is_complete_and_finite() {
        let n = 32;
        let rho = Field::from_fn(n, |x1, x2| 1.0 + 0.3 * (TAU * x1).cos() * (TAU * x2).cos());
        let u = VecField::from_fns(n, |_, x2| 0.1 * (TAU * x2).sin(), |x1, _| 0.1 * (TAU * x1).sin());
        let s = State::from_primitives(0.25, rho, &u).unwrap();
        let row = diag_row(
            &s,
            &Params::default(),
            &VacuumPolicy::default(),
            &[2.0, 4.0],
            2,
        );
        assert_eq!(row.t, 0.25);
        assert_eq!(row.norm_ratios.len(), 2);
        for v in [
            row.mass,
            row.mom1,
            row.mom2,
            row.energy,
            row.dissipation,
            row.z2,
            row.y2,
            row.psi2,
            row.rho_max,
            row.rho_min,
            row.f_m,
            row.rho_ut_norm,
        ] {
            assert!(v.is_finite());
        }
    }
}
