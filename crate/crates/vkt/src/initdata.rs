//! Initial data: named presets, the delta-regularization lifting density and
//! pressure off vacuum, and the compatibility-condition solve that produces
//! an initial velocity from a forcing profile.

use crate::elliptic::{self, LameConfig};
use crate::error::{Error, Result};
use crate::grid::{pow_abs, Field, VecField};
use crate::model::{self, Params, State};
use serde::Deserialize;
use std::f64::consts::TAU;

/// Tunable preset parameters; every field has a sensible default so JSON
/// configs may set any subset.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PresetArgs {
    /// Background density (uniform, acoustic, rotating-bump).
    pub rho_bar: f64,
    /// Density modulation amplitude (acoustic: absolute; rotating-bump:
    /// relative to `rho_bar`).
    pub amplitude: f64,
    /// Acoustic wavenumber along x1.
    pub mode: u32,
    /// Amplitude of a divergence-free velocity admixture.
    pub swirl: f64,
    /// Peak density of the vacuum bump.
    pub height: f64,
    /// Radius of the vacuum bump (< 1/2).
    pub radius: f64,
    /// Bump center.
    pub center: [f64; 2],
    /// Regularization shift applied to density and pressure.
    pub delta: f64,
}

impl Default for PresetArgs {
    fn default() -> Self {
        PresetArgs {
            rho_bar: 1.0,
            amplitude: 0.05,
            mode: 1,
            swirl: 0.0,
            height: 0.75,
            radius: 0.35,
            center: [0.5, 0.5],
            delta: 0.01,
        }
    }
}

/// How the initial velocity is specified: directly, or through a forcing
/// profile `g` via the compatibility condition
/// `mu Δu + grad((mu + lam) div u) = grad P0 + sqrt(rho0) g`.
#[derive(Clone, Debug)]
pub enum InitSpec {
    Velocity(VecField),
    Forcing(VecField),
}

/// A preset's raw (unregularized) data.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub rho0: Field,
    pub spec: InitSpec,
    pub mean_u0: (f64, f64),
}

/// Build one of the named presets: `uniform`, `acoustic`, `vacuum-bump`,
/// `rotating-bump`.
pub fn preset(name: &str, n: usize, params: &Params, args: &PresetArgs) -> Result<InitialData> {
    match name {
        "uniform" => {
            require(args.rho_bar > 0.0, "uniform needs rho_bar > 0")?;
            Ok(InitialData {
                rho0: Field::constant(n, args.rho_bar),
                spec: InitSpec::Velocity(VecField::zeros(n)),
                mean_u0: (0.0, 0.0),
            })
        }
        "acoustic" => {
            require(
                args.rho_bar - args.amplitude.abs() > 0.0,
                "acoustic needs rho_bar > |amplitude|",
            )?;
            let (a, k) = (args.amplitude, args.mode as f64);
            let c0 = (params.gamma * params.a * pow_abs(args.rho_bar, params.gamma - 1.0)).sqrt();
            let rho0 = Field::from_fn(n, |x1, _| args.rho_bar + a * (TAU * k * x1).cos());
            // Right-moving linear acoustic profile plus an optional
            // divergence-free swirl that seeds vorticity.
            let s = args.swirl;
            let u = VecField::from_fns(
                n,
                move |x1, x2| {
                    a * c0 / args.rho_bar * (TAU * k * x1).cos() - s * (TAU * x2).sin()
                },
                move |x1, _| s * (TAU * x1).sin(),
            );
            Ok(InitialData {
                rho0,
                spec: InitSpec::Velocity(u),
                mean_u0: (0.0, 0.0),
            })
        }
        "vacuum-bump" => {
            require(args.height > 0.0, "vacuum-bump needs height > 0")?;
            require(
                args.radius > 0.0 && args.radius < 0.5,
                "vacuum-bump needs 0 < radius < 1/2",
            )?;
            let (h, rr, c) = (args.height, args.radius, args.center);
            let rho0 = Field::from_fn(n, move |x1, x2| {
                let d1 = torus_dist(x1, c[0]);
                let d2 = torus_dist(x2, c[1]);
                let s2 = (d1 * d1 + d2 * d2) / (rr * rr);
                if s2 < 1.0 {
                    h * (1.0 - s2).powi(3)
                } else {
                    0.0
                }
            });
            Ok(InitialData {
                rho0,
                spec: InitSpec::Forcing(VecField::zeros(n)),
                mean_u0: (0.0, 0.0),
            })
        }
        "rotating-bump" => {
            require(args.rho_bar > 0.0, "rotating-bump needs rho_bar > 0")?;
            require(
                args.amplitude.abs() < 1.0,
                "rotating-bump needs |amplitude| < 1",
            )?;
            let (rb, a, s) = (args.rho_bar, args.amplitude, args.swirl);
            let rho0 =
                Field::from_fn(n, move |x1, x2| rb * (1.0 + a * (TAU * x1).cos() * (TAU * x2).cos()));
            // u = s * grad^perp(sin(2 pi x1) sin(2 pi x2)) / (2 pi): solenoidal.
            let u = VecField::from_fns(
                n,
                move |x1, x2| -s * (TAU * x1).sin() * (TAU * x2).cos(),
                move |x1, x2| s * (TAU * x1).cos() * (TAU * x2).sin(),
            );
            Ok(InitialData {
                rho0,
                spec: InitSpec::Velocity(u),
                mean_u0: (0.0, 0.0),
            })
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}

fn torus_dist(x: f64, c: f64) -> f64 {
    let d = (x - c).abs() % 1.0;
    d.min(1.0 - d)
}

/// Shifted data `(rho0 + delta, P(rho0) + delta)`: density lifted off vacuum
/// with the pressure shifted by the same constant so its gradient is
/// unchanged.
pub fn regularize(rho0: &Field, delta: f64, params: &Params) -> (Field, Field) {
    (
        rho0.map(|r| r + delta),
        model::pressure(rho0, params).map(|p| p + delta),
    )
}

/// Solve the compatibility condition for the initial velocity:
/// `mu Δu + grad((mu + lam(rho0d)) div u) = grad p0d + sqrt(rho0) g`
/// with prescribed mean velocity. The forcing must satisfy
/// `∫ sqrt(rho0) g = 0` componentwise (the operator's range excludes
/// constants); the density under the square root is the unregularized one.
pub fn velocity_from_compat(
    rho0d: &Field,
    p0d: &Field,
    rho0: &Field,
    g: &VecField,
    mean_u0: (f64, f64),
    params: &Params,
    cfg: &LameConfig,
) -> Result<VecField> {
    let n = rho0d.n();
    let sqrt_rho = rho0.map(|r| r.max(0.0).sqrt());
    let wg = VecField {
        x1: sqrt_rho.zip_with(&g.x1, |s, v| s * v),
        x2: sqrt_rho.zip_with(&g.x2, |s, v| s * v),
    };
    for (component, comp) in [(0usize, &wg.x1), (1, &wg.x2)] {
        let mean = comp.mean();
        let tol = 1e-10 * comp.lp_norm(f64::INFINITY).max(1.0);
        if mean.abs() > tol {
            return Err(Error::MeanIncompatible {
                component,
                mean,
                tol,
            });
        }
    }
    let gp = p0d.grad();
    let f = VecField {
        x1: gp.x1.zip_with(&wg.x1, |a, b| a + b),
        x2: gp.x2.zip_with(&wg.x2, |a, b| a + b),
    };
    debug_assert_eq!(f.n(), n);
    elliptic::lame_solve(rho0d, &f, mean_u0, params, cfg)
}

/// L2 residual of the compatibility condition for given data:
/// `‖mu Δu0 + grad((mu + lam(rho0)) div u0) - grad P0 - sqrt(rho0) g‖_2`.
pub fn compat_residual(
    rho0: &Field,
    u0: &VecField,
    p0: &Field,
    g: &VecField,
    params: &Params,
) -> f64 {
    let lam = model::bulk_viscosity(rho0, params);
    let lhs = elliptic::lame_apply(u0, &lam, params.mu);
    let gp = p0.grad();
    let sqrt_rho = rho0.map(|r| r.max(0.0).sqrt());
    let r1 = lhs
        .x1
        .zip_with(&gp.x1, |a, b| a - b)
        .zip_with(&sqrt_rho.zip_with(&g.x1, |s, v| s * v), |a, b| a - b);
    let r2 = lhs
        .x2
        .zip_with(&gp.x2, |a, b| a - b)
        .zip_with(&sqrt_rho.zip_with(&g.x2, |s, v| s * v), |a, b| a - b);
    VecField { x1: r1, x2: r2 }.l2_norm()
}

/// Regularize a preset's data with the given shift and produce the initial
/// state, solving the compatibility condition when the preset specifies a
/// forcing profile.
pub fn realize(
    data: &InitialData,
    delta: f64,
    params: &Params,
    cfg: &LameConfig,
) -> Result<State> {
    let (rho0d, p0d) = regularize(&data.rho0, delta, params);
    let u = match &data.spec {
        InitSpec::Velocity(u) => u.clone(),
        InitSpec::Forcing(g) => {
            velocity_from_compat(&rho0d, &p0d, &data.rho0, g, data.mean_u0, params, cfg)?
        }
    };
    State::from_primitives(0.0, rho0d, &u)
}
