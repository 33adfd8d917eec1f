//! Uniform rest is an exact fixed point of the discretization: advance a
//! constant-density, zero-velocity state and watch nothing move.
//!
//! ```sh
//! cargo run --example equilibrium
//! ```

use vkt::dynamics::{self, RunConfig, TimeStep};
use vkt::elliptic::LameConfig;
use vkt::initdata::{self, PresetArgs};
use vkt::Params;

fn main() -> vkt::Result<()> {
    let n = 64;
    let params = Params::new(1.0, 4.0, 2.0, 1.0)?;
    let data = initdata::preset("uniform", n, &params, &PresetArgs::default())?;
    let init = initdata::realize(&data, 0.0, &params, &LameConfig::default())?;

    let dt = dynamics::stable_dt(&init, &params, 0.5);
    let steps = 500;
    let cfg = RunConfig::new(n, TimeStep::Dt(dt), steps as f64 * dt, params);
    let record = dynamics::run(&cfg, &init)?;

    let f = &record.final_state;
    let drho = f
        .rho
        .as_slice()
        .iter()
        .zip(init.rho.as_slice())
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    let dm = f
        .m
        .magnitude()
        .as_slice()
        .iter()
        .fold(0.0f64, |a, &x| a.max(x));

    println!("uniform preset, n = {n}, {steps} RK4 steps at dt = {dt:.3e}");
    println!("max |rho - rho0| = {drho:.3e}");
    println!("max |momentum|   = {dm:.3e}");
    println!(
        "mass drift       = {:.3e}",
        (record.rows.last().unwrap().mass - record.rows[0].mass).abs()
    );
    Ok(())
}
