//! Explicit RK4 time integration of the conservative system with stability
//! control, diagnostics cadence, and velocity-history capture for particle
//! tracing.

use crate::analysis::{self, DiagRow};
use crate::error::{Error, Result};
use crate::grid::{Field, VecField};
use crate::model::{self, Params, Rhs, State, VacuumPolicy};

/// Time-step selection: fixed `dt`, or a CFL fraction of [`stable_dt`]
/// evaluated on the initial state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStep {
    Dt(f64),
    Cfl(f64),
}

/// Full description of one integration run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub time_step: TimeStep,
    pub t_end: f64,
    /// Steps between stored snapshot states; 0 disables snapshots.
    pub snapshot_every: usize,
    /// Steps between diagnostics rows; 0 records only the first and last.
    pub diag_every: usize,
    /// Steps between stored history frames (velocity, density, flux) for
    /// path tracing; 0 disables history.
    pub frame_every: usize,
    pub dealias: bool,
    pub policy: VacuumPolicy,
    pub params: Params,
    /// Norm orders k for the density-norm ratio columns.
    pub norm_ks: Vec<f64>,
    /// Moment order m for the weighted positive-part functional column.
    pub f_m: usize,
}

impl RunConfig {
    pub fn new(n: usize, time_step: TimeStep, t_end: f64, params: Params) -> Self {
        RunConfig {
            n,
            time_step,
            t_end,
            snapshot_every: 0,
            diag_every: 1,
            frame_every: 0,
            dealias: false,
            policy: VacuumPolicy::default(),
            params,
            norm_ks: vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            f_m: 2,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be nonnegative, got {}",
                self.t_end
            )));
        }
        match self.time_step {
            TimeStep::Dt(dt) if !(dt.is_finite() && dt > 0.0) => Err(Error::InvalidParameter(
                format!("dt must be positive, got {dt}"),
            )),
            TimeStep::Cfl(c) if !(c.is_finite() && c > 0.0 && c <= 1.0) => Err(
                Error::InvalidParameter(format!("cfl must lie in (0, 1], got {c}")),
            ),
            _ => Ok(()),
        }
    }
}

/// One stored history frame: velocity for path tracing plus the density and
/// effective viscous flux needed by the log-density identity.
#[derive(Clone, Debug)]
pub struct Frame {
    pub t: f64,
    pub u: VecField,
    pub rho: Field,
    pub flux: Field,
}

/// Blow-up report embedded in a [`RunRecord`] when a run aborts.
#[derive(Clone, Debug)]
pub struct BlowUpInfo {
    pub step: usize,
    pub time: f64,
    pub reason: String,
}

/// Everything a run produces: diagnostics rows, history frames, snapshot
/// states, and the final (or last good) state.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub rows: Vec<DiagRow>,
    pub frames: Vec<Frame>,
    /// (step index, state) pairs at the snapshot cadence.
    pub snapshots: Vec<(usize, State)>,
    pub final_state: State,
    pub steps: usize,
    /// Present when the run aborted early.
    pub blow_up: Option<BlowUpInfo>,
}

/// Largest stable time step `cfl * min(h/(max|u| + c_max), h^2/(2(2mu +
/// lam_max)))` combining the advective/acoustic and diffusive explicit
/// limits; `h = 1/n`, `c = sqrt(gamma A rho^(gamma-1))`. Velocity is read
/// through the default vacuum policy.
pub fn stable_dt(state: &State, params: &Params, cfl: f64) -> f64 {
    let policy = VacuumPolicy::default();
    let h = 1.0 / state.n() as f64;
    let u = model::velocity(state, &policy);
    let umax = u.magnitude().max_value();
    let cmax = model::max_sound_speed(&state.rho, params);
    let lam_max = model::bulk_viscosity(&state.rho, params).max_value();
    let advective = h / (umax + cmax).max(1e-300);
    let diffusive = h * h / (2.0 * (2.0 * params.mu + lam_max));
    cfl * advective.min(diffusive)
}

fn axpy_state(base: &State, c: f64, k: &Rhs) -> State {
    let n = base.n();
    let mut rho = Field::zeros(n);
    let mut m1 = Field::zeros(n);
    let mut m2 = Field::zeros(n);
    let len = n * n;
    let (rs, m1s, m2s) = (rho.as_mut_slice(), m1.as_mut_slice(), m2.as_mut_slice());
    let (br, b1, b2) = (
        base.rho.as_slice(),
        base.m.x1.as_slice(),
        base.m.x2.as_slice(),
    );
    let (kr, k1, k2) = (
        k.drho.as_slice(),
        k.dmom.x1.as_slice(),
        k.dmom.x2.as_slice(),
    );
    for i in 0..len {
        rs[i] = br[i] + c * kr[i];
        m1s[i] = b1[i] + c * k1[i];
        m2s[i] = b2[i] + c * k2[i];
    }
    State::raw(base.t, rho, VecField { x1: m1, x2: m2 })
}

/// One classical RK4 step. Detects blow-up (non-finite fields or density
/// dropping below `-1e-6 * max rho`).
pub fn step(
    state: &State,
    dt: f64,
    params: &Params,
    policy: &VacuumPolicy,
    dealias: bool,
) -> Result<State> {
    let k1 = model::rhs(state, params, policy, dealias)?;
    let s2 = axpy_state(state, 0.5 * dt, &k1);
    let k2 = model::rhs(&s2, params, policy, dealias)?;
    let s3 = axpy_state(state, 0.5 * dt, &k2);
    let k3 = model::rhs(&s3, params, policy, dealias)?;
    let s4 = axpy_state(state, dt, &k3);
    let k4 = model::rhs(&s4, params, policy, dealias)?;

    let n = state.n();
    let len = n * n;
    let mut rho = Field::zeros(n);
    let mut m1 = Field::zeros(n);
    let mut m2 = Field::zeros(n);
    {
        let (rs, m1s, m2s) = (rho.as_mut_slice(), m1.as_mut_slice(), m2.as_mut_slice());
        let c = dt / 6.0;
        let base = (
            state.rho.as_slice(),
            state.m.x1.as_slice(),
            state.m.x2.as_slice(),
        );
        let grab = |k: &Rhs| {
            (
                k.drho.as_slice().to_owned(),
                k.dmom.x1.as_slice().to_owned(),
                k.dmom.x2.as_slice().to_owned(),
            )
        };
        // Avoid four separate passes: combine stage slopes in one loop.
        let (a1, b1v, c1) = grab(&k1);
        let (a2, b2v, c2) = grab(&k2);
        let (a3, b3v, c3) = grab(&k3);
        let (a4, b4v, c4) = grab(&k4);
        for i in 0..len {
            rs[i] = base.0[i] + c * (a1[i] + 2.0 * (a2[i] + a3[i]) + a4[i]);
            m1s[i] = base.1[i] + c * (b1v[i] + 2.0 * (b2v[i] + b3v[i]) + b4v[i]);
            m2s[i] = base.2[i] + c * (c1[i] + 2.0 * (c2[i] + c3[i]) + c4[i]);
        }
    }
    let next = State {
        t: state.t + dt,
        rho,
        m: VecField { x1: m1, x2: m2 },
    };

    let min = next.rho.min_value();
    let max = next.rho.max_value();
    if !min.is_finite() || !max.is_finite() {
        return Err(Error::BlowUp {
            step: 0,
            time: next.t,
            reason: "non-finite density".into(),
        });
    }
    if min < -1e-6 * max.max(1e-300) {
        return Err(Error::BlowUp {
            step: 0,
            time: next.t,
            reason: format!("density fell to {min:.3e} (max {max:.3e})"),
        });
    }
    Ok(next)
}

fn make_frame(state: &State, config: &RunConfig) -> Frame {
    Frame {
        t: state.t,
        u: model::velocity(state, &config.policy),
        rho: state.rho.clone(),
        flux: model::effective_flux(state, &config.params, &config.policy),
    }
}

fn diag_row(state: &State, config: &RunConfig) -> DiagRow {
    analysis::diag_row(
        state,
        &config.params,
        &config.policy,
        &config.norm_ks,
        config.f_m,
    )
}

/// Run the integrator, collecting what it can even on blow-up: the record
/// always holds the rows, frames, and snapshots accumulated so far plus the
/// last good state; `blow_up` is set if the run aborted.
pub fn run_collect(config: &RunConfig, init: &State) -> Result<(RunRecord, Option<Error>)> {
    config.validate()?;
    if init.n() != config.n {
        return Err(Error::InvalidParameter(format!(
            "initial state grid {} does not match configured n = {}",
            init.n(),
            config.n
        )));
    }
    let dt = match config.time_step {
        TimeStep::Dt(v) => v,
        TimeStep::Cfl(c) => stable_dt(init, &config.params, c),
    };

    let mut rows = vec![diag_row(init, config)];
    let mut frames = Vec::new();
    if config.frame_every > 0 {
        frames.push(make_frame(init, config));
    }
    let mut snapshots = Vec::new();
    if config.snapshot_every > 0 {
        snapshots.push((0, init.clone()));
    }

    // Exact landing on t_end: uniform steps, with the final step shortened
    // when t_end is not an integer multiple of dt.
    let total_steps = if config.t_end == 0.0 {
        0
    } else {
        (config.t_end / dt - 1e-9).floor() as usize + 1
    };

    let mut state = init.clone();
    let mut failure = None;
    let mut steps_done = 0;
    for k in 1..=total_steps {
        let dt_k = if k == total_steps {
            config.t_end - state.t
        } else {
            dt
        };
        match step(&state, dt_k, &config.params, &config.policy, config.dealias) {
            Ok(next) => state = next,
            Err(Error::BlowUp { time, reason, .. }) => {
                failure = Some(Error::BlowUp {
                    step: k,
                    time,
                    reason,
                });
                break;
            }
            Err(other) => return Err(other),
        }
        steps_done = k;
        let last = k == total_steps;
        if (config.diag_every > 0 && k % config.diag_every == 0) || last {
            rows.push(diag_row(&state, config));
        }
        if config.frame_every > 0 && (k % config.frame_every == 0 || last) {
            frames.push(make_frame(&state, config));
        }
        if config.snapshot_every > 0 && (k % config.snapshot_every == 0 || last) {
            snapshots.push((k, state.clone()));
        }
    }

    let balance = analysis::energy_balance(&rows);
    for (row, b) in rows.iter_mut().zip(balance) {
        row.energy_balance = b;
    }

    let blow_up = failure.as_ref().map(|e| match e {
        Error::BlowUp { step, time, reason } => BlowUpInfo {
            step: *step,
            time: *time,
            reason: reason.clone(),
        },
        _ => unreachable!(),
    });
    let record = RunRecord {
        rows,
        frames,
        snapshots,
        final_state: state,
        steps: steps_done,
        blow_up,
    };
    Ok((record, failure))
}

/// Run to completion; a blow-up is returned as an error (the partial record
/// is available through [`run_collect`]).
pub fn run(config: &RunConfig, init: &State) -> Result<RunRecord> {
    let (record, failure) = run_collect(config, init)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(record),
    }
}
