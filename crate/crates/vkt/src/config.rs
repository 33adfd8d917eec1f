//! JSON run configuration. Every section and field is optional; an empty
//! document yields the defaults (uniform preset, 128^2 grid, CFL 0.25).
//! Schema violations are reported with the path to the offending field.

use crate::dynamics::{RunConfig, TimeStep};
use crate::error::{Error, Result};
use crate::initdata::PresetArgs;
use crate::model::{Params, VacuumPolicy};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GridSection {
    n: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { n: 128 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TimeSection {
    dt: Option<f64>,
    cfl: Option<f64>,
    t_end: f64,
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection {
            dt: None,
            cfl: None,
            t_end: 0.1,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PhysicsSection {
    mu: f64,
    beta: f64,
    gamma: f64,
    #[serde(rename = "A")]
    a: f64,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        PhysicsSection {
            mu: 1.0,
            beta: 4.0,
            gamma: 2.0,
            a: 1.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct PresetSection {
    name: Option<String>,
    args: PresetArgs,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct OutputSection {
    dir: PathBuf,
    snapshot_every: usize,
    diag_every: usize,
    frame_every: usize,
    norm_ks: Vec<f64>,
    f_m: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            snapshot_every: 0,
            diag_every: 1,
            frame_every: 0,
            norm_ks: vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            f_m: 2,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PolicySection {
    eps_div: f64,
    eps_vac: f64,
}

impl Default for PolicySection {
    fn default() -> Self {
        let p = VacuumPolicy::default();
        PolicySection {
            eps_div: p.eps_div,
            eps_vac: p.eps_vac,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    grid: GridSection,
    time: TimeSection,
    physics: PhysicsSection,
    preset: PresetSection,
    output: OutputSection,
    policy: PolicySection,
    dealias: bool,
}

/// A validated configuration, ready to drive a run.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub run: RunConfig,
    pub preset_name: String,
    pub preset_args: PresetArgs,
    pub out_dir: PathBuf,
    /// Non-fatal hypothesis notes (e.g. bulk-viscosity exponent below the
    /// globally supported range).
    pub warnings: Vec<String>,
}

/// Parse and validate a JSON configuration document.
pub fn from_json(text: &str) -> Result<LoadedConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: FileConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Config(if path == "." {
            format!("{}", e.into_inner())
        } else {
            format!("at '{path}': {}", e.into_inner())
        })
    })?;
    validate(file)
}

/// Load a configuration from a file path.
pub fn from_file(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)?;
    from_json(&text)
}

fn validate(file: FileConfig) -> Result<LoadedConfig> {
    let n = file.grid.n;
    if n < 8 || n % 2 != 0 {
        return Err(Error::Config(format!(
            "grid.n must be even and at least 8, got {n}"
        )));
    }
    let params = Params::new(
        file.physics.mu,
        file.physics.beta,
        file.physics.gamma,
        file.physics.a,
    )?;
    let warnings = params.hypothesis_warnings();

    let time_step = match (file.time.dt, file.time.cfl) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "set only one of time.dt and time.cfl".into(),
            ))
        }
        (Some(dt), None) => TimeStep::Dt(dt),
        (None, Some(c)) => TimeStep::Cfl(c),
        (None, None) => TimeStep::Cfl(0.25),
    };
    if !(file.time.t_end.is_finite() && file.time.t_end >= 0.0) {
        return Err(Error::Config(format!(
            "time.t_end must be nonnegative, got {}",
            file.time.t_end
        )));
    }
    if !(file.policy.eps_div > 0.0 && file.policy.eps_vac > 0.0) {
        return Err(Error::Config(
            "policy.eps_div and policy.eps_vac must be positive".into(),
        ));
    }
    if file.output.f_m < 1 {
        return Err(Error::Config("output.f_m must be at least 1".into()));
    }
    if file.output.norm_ks.iter().any(|&k| !(k >= 1.0)) {
        return Err(Error::Config(
            "output.norm_ks entries must be at least 1".into(),
        ));
    }

    let run = RunConfig {
        n,
        time_step,
        t_end: file.time.t_end,
        snapshot_every: file.output.snapshot_every,
        diag_every: file.output.diag_every,
        frame_every: file.output.frame_every,
        dealias: file.dealias,
        policy: VacuumPolicy {
            eps_div: file.policy.eps_div,
            eps_vac: file.policy.eps_vac,
        },
        params,
        norm_ks: file.output.norm_ks,
        f_m: file.output.f_m,
    };
    Ok(LoadedConfig {
        run,
        preset_name: file.preset.name.unwrap_or_else(|| "uniform".into()),
        preset_args: file.preset.args,
        out_dir: file.output.dir,
        warnings,
    })
}
