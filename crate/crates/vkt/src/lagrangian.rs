//! Backward particle tracing through stored velocity history and the
//! pointwise log-density identity it feeds: along a path X(tau),
//! `d/dtau [2 mu ln rho + rho^beta / beta] = -(P + F)`, so the accumulated
//! combination must vanish up to integration error.

use crate::dynamics::{Frame, RunRecord};
use crate::error::{Error, Result};
use crate::grid::{Field, Spectrum};
use crate::model::{Params, VacuumPolicy};

/// Pointwise `theta(rho) = 2 mu ln rho + (rho^beta - 1) / beta`.
pub(crate) fn theta_scalar(rho: f64, params: &Params) -> f64 {
    2.0 * params.mu * rho.ln() + (crate::grid::pow_abs(rho, params.beta) - 1.0) / params.beta
}

/// Apply `theta` to a strictly positive density field.
pub fn theta(rho: &Field, params: &Params) -> Result<Field> {
    let min = rho.min_value();
    if min <= 0.0 {
        return Err(Error::NonPositiveDensity { min });
    }
    Ok(rho.map(|r| theta_scalar(r, params)))
}

struct TracerFrame {
    t: f64,
    u1: Spectrum,
    u2: Spectrum,
}

/// Precomputed spectral velocity history for tracing several paths through
/// the same run.
pub struct PathTracer {
    frames: Vec<TracerFrame>,
}

impl PathTracer {
    pub fn new(frames: &[Frame]) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::InvalidParameter(
                "history is empty; run with frame_every > 0".into(),
            ));
        }
        for w in frames.windows(2) {
            if w[1].t <= w[0].t {
                return Err(Error::InvalidParameter(format!(
                    "history times must increase, got {} then {}",
                    w[0].t, w[1].t
                )));
            }
        }
        Ok(PathTracer {
            frames: frames
                .iter()
                .map(|f| {
                    let (u1, u2) = Field::transform_pair(&f.u.x1, &f.u.x2);
                    TracerFrame { t: f.t, u1, u2 }
                })
                .collect(),
        })
    }

    fn span(&self) -> (f64, f64) {
        (self.frames[0].t, self.frames[self.frames.len() - 1].t)
    }

    /// Velocity at (tau, x): spectral in space, linear interpolation in time.
    fn velocity_at(&self, tau: f64, x: (f64, f64)) -> (f64, f64) {
        let fs = &self.frames;
        let i = match fs.partition_point(|f| f.t <= tau) {
            0 => 0,
            p => (p - 1).min(fs.len().saturating_sub(2).max(0)),
        };
        if fs.len() == 1 || tau <= fs[i].t {
            let f = &fs[i];
            return (f.u1.eval_at(x.0, x.1), f.u2.eval_at(x.0, x.1));
        }
        let (a, b) = (&fs[i], &fs[i + 1]);
        let w = ((tau - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
        let va = (a.u1.eval_at(x.0, x.1), a.u2.eval_at(x.0, x.1));
        if w == 0.0 {
            return va;
        }
        let vb = (b.u1.eval_at(x.0, x.1), b.u2.eval_at(x.0, x.1));
        ((1.0 - w) * va.0 + w * vb.0, (1.0 - w) * va.1 + w * vb.1)
    }

    /// Trace the path arriving at `x` at time `t` back to the start of the
    /// stored history. Returns `(tau, X(tau))` nodes in increasing time; the
    /// last node is `(t, x)`.
    pub fn trace(&self, t: f64, x: (f64, f64)) -> Result<Vec<(f64, (f64, f64))>> {
        let (t0, t1) = self.span();
        if t < t0 - 1e-12 || t > t1 + 1e-12 {
            return Err(Error::HistoryGap { t, t0, t1 });
        }
        let mut taus: Vec<f64> = self
            .frames
            .iter()
            .map(|f| f.t)
            .filter(|&ft| ft < t - 1e-12)
            .collect();
        taus.push(t);

        let mut nodes = Vec::with_capacity(taus.len());
        let mut pos = (x.0.rem_euclid(1.0), x.1.rem_euclid(1.0));
        nodes.push((t, pos));
        // Backward RK4 from each node time to the previous one.
        for i in (1..taus.len()).rev() {
            let (ta, tb) = (taus[i], taus[i - 1]);
            let h = tb - ta;
            let k1 = self.velocity_at(ta, pos);
            let p2 = (pos.0 + 0.5 * h * k1.0, pos.1 + 0.5 * h * k1.1);
            let k2 = self.velocity_at(ta + 0.5 * h, p2);
            let p3 = (pos.0 + 0.5 * h * k2.0, pos.1 + 0.5 * h * k2.1);
            let k3 = self.velocity_at(ta + 0.5 * h, p3);
            let p4 = (pos.0 + h * k3.0, pos.1 + h * k3.1);
            let k4 = self.velocity_at(tb, p4);
            pos = (
                (pos.0 + h / 6.0 * (k1.0 + 2.0 * (k2.0 + k3.0) + k4.0)).rem_euclid(1.0),
                (pos.1 + h / 6.0 * (k1.1 + 2.0 * (k2.1 + k3.1) + k4.1)).rem_euclid(1.0),
            );
            nodes.push((tb, pos));
        }
        nodes.reverse();
        Ok(nodes)
    }
}

/// One-call backward trace through raw history frames.
pub fn trace_path(frames: &[Frame], t: f64, x: (f64, f64)) -> Result<Vec<(f64, (f64, f64))>> {
    PathTracer::new(frames)?.trace(t, x)
}

/// Residual of the log-density identity at `(t, x)`:
/// `2 mu ln(rho(t,x)/rho(0,X0)) + (rho^beta(t,x) - rho^beta(0,X0))/beta
///  + ∫_0^t (P + F)(tau, X(tau)) dtau`, the path integral taken by trapezoid
/// over the stored frame times. Both path endpoints must sit above the
/// vacuum cut.
pub fn log_density_residual(
    record: &RunRecord,
    t: f64,
    x: (f64, f64),
    params: &Params,
    policy: &VacuumPolicy,
) -> Result<f64> {
    let tracer = PathTracer::new(&record.frames)?;
    let nodes = tracer.trace(t, x)?;

    // Spectra of density and effective flux per frame, for off-grid reads.
    let sampled: Vec<(f64, Spectrum, Spectrum)> = record
        .frames
        .iter()
        .map(|f| {
            let (r, fl) = Field::transform_pair(&f.rho, &f.flux);
            (f.t, r, fl)
        })
        .collect();
    let eval = |tau: f64, p: (f64, f64)| -> (f64, f64) {
        let i = match sampled.partition_point(|s| s.0 <= tau) {
            0 => 0,
            q => (q - 1).min(sampled.len().saturating_sub(2).max(0)),
        };
        if sampled.len() == 1 || tau <= sampled[i].0 {
            let s = &sampled[i];
            return (s.1.eval_at(p.0, p.1), s.2.eval_at(p.0, p.1));
        }
        let (a, b) = (&sampled[i], &sampled[i + 1]);
        let w = ((tau - a.0) / (b.0 - a.0)).clamp(0.0, 1.0);
        (
            (1.0 - w) * a.1.eval_at(p.0, p.1) + w * b.1.eval_at(p.0, p.1),
            (1.0 - w) * a.2.eval_at(p.0, p.1) + w * b.2.eval_at(p.0, p.1),
        )
    };

    // Integrand P + F at every path node; vacuum check at the endpoints.
    let mut g = Vec::with_capacity(nodes.len());
    let mut rho_ends = (0.0, 0.0);
    for (k, &(tau, p)) in nodes.iter().enumerate() {
        let (rho, flux) = eval(tau, p);
        if (k == 0 || k == nodes.len() - 1) && rho <= policy.eps_vac {
            return Err(Error::VacuumOnPath { tau, rho });
        }
        if k == 0 {
            rho_ends.0 = rho;
        }
        if k == nodes.len() - 1 {
            rho_ends.1 = rho;
        }
        g.push((tau, crate::grid::pow_abs(rho.max(0.0), params.gamma) * params.a + flux));
    }
    let mut integral = 0.0;
    for w in g.windows(2) {
        integral += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
    }
    let (rho0, rho_t) = rho_ends;
    Ok(2.0 * params.mu * (rho_t / rho0).ln()
        + (crate::grid::pow_abs(rho_t, params.beta) - crate::grid::pow_abs(rho0, params.beta))
            / params.beta
        + integral)
}
