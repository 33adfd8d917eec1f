//! A damped sound wave and its energy ledger: total energy plus accumulated
//! dissipation should stay pinned at the initial energy.
//!
//! ```sh
//! cargo run --example acoustic_energy
//! ```

use vkt::dynamics::{self, RunConfig, TimeStep};
use vkt::elliptic::LameConfig;
use vkt::initdata::{self, PresetArgs};
use vkt::Params;

fn main() -> vkt::Result<()> {
    let n = 64;
    let params = Params::new(1e-3, 4.0, 2.0, 1.0)?;
    let args = PresetArgs {
        rho_bar: 0.15,
        amplitude: 0.015,
        mode: 4,
        ..PresetArgs::default()
    };
    let data = initdata::preset("acoustic", n, &params, &args)?;
    let init = initdata::realize(&data, 0.0, &params, &LameConfig::default())?;

    let t_end = 0.2;
    let mut cfg = RunConfig::new(n, TimeStep::Dt(t_end / 400.0), t_end, params);
    cfg.diag_every = 1;
    let record = dynamics::run(&cfg, &init)?;

    println!("acoustic preset, n = {n}, T = {t_end}, {} steps", record.steps);
    println!();
    println!("{:>6}  {:>12}  {:>12}  {:>13}", "t", "energy", "dissip", "balance");
    for row in record.rows.iter().step_by(50) {
        println!(
            "{:6.3}  {:12.6e}  {:12.6e}  {:13.3e}",
            row.t, row.energy, row.dissipation, row.energy_balance
        );
    }
    let e0 = record.rows[0].energy;
    let worst = record
        .rows
        .iter()
        .fold(0.0f64, |a, r| a.max(r.energy_balance.abs()));
    println!();
    println!("max |E(t) + cumulative dissipation - E(0)| / E(0) = {:.3e}", worst / e0);
    Ok(())
}
