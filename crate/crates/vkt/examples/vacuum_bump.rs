//! A compactly supported density bump surrounded by vacuum, lifted by the
//! δ-regularization and released: the bump spreads, the density stays
//! bounded, and the compensated Lebesgue-norm ratios barely move.  Writes a
//! before/after pair of density heatmaps.
//!
//! ```sh
//! cargo run --example vacuum_bump
//! ```

use vkt::dynamics::{self, RunConfig, TimeStep};
use vkt::elliptic::LameConfig;
use vkt::initdata::{self, PresetArgs};
use vkt::{analysis, model, Params};

fn main() -> vkt::Result<()> {
    let n = 64;
    let params = Params::new(0.003, 4.0, 2.0, 1.0)?;
    for w in params.hypothesis_warnings() {
        println!("note: {w}");
    }
    let args = PresetArgs {
        height: 0.35,
        radius: 0.35,
        delta: 0.06,
        ..PresetArgs::default()
    };
    let data = initdata::preset("vacuum-bump", n, &params, &args)?;
    let zeros = data
        .rho0
        .as_slice()
        .iter()
        .filter(|&&r| r == 0.0)
        .count();
    println!(
        "raw bump: {} of {} cells exactly at vacuum; regularized floor δ = {}",
        zeros,
        n * n,
        args.delta
    );
    let init = initdata::realize(&data, args.delta, &params, &LameConfig::default())?;

    // Keep the explicit step under the worst-cell diffusivity (2μ+λ)/ρ.
    let lam = model::bulk_viscosity(&init.rho, &params);
    let nu = init
        .rho
        .as_slice()
        .iter()
        .zip(lam.as_slice())
        .fold(0.0f64, |a, (r, l)| a.max((2.0 * params.mu + l) / r));
    let dt = 0.7 * 2.785 / (nu * 2.0 * (std::f64::consts::PI * n as f64).powi(2));

    let mut cfg = RunConfig::new(n, TimeStep::Dt(dt), 0.3, params);
    cfg.diag_every = 100;
    cfg.dealias = true;
    let record = dynamics::run(&cfg, &init)?;

    let first = &record.rows[0];
    let last = record.rows.last().unwrap();
    println!("T = 0.3 in {} steps at dt = {dt:.2e}", record.steps);
    println!(
        "rho range: [{:.4}, {:.4}] -> [{:.4}, {:.4}]",
        first.rho_min, first.rho_max, last.rho_min, last.rho_max
    );

    println!();
    println!("{:>4}  {:>12}  {:>12}", "k", "ratio t=0", "ratio t=T");
    let scan0 = analysis::density_norm_scan(&init.rho, &cfg.params, &cfg.norm_ks)?;
    let scan1 = analysis::density_norm_scan(&record.final_state.rho, &cfg.params, &cfg.norm_ks)?;
    for (a, b) in scan0.iter().zip(&scan1) {
        println!("{:4}  {:12.6}  {:12.6}", a.k, a.ratio, b.ratio);
    }

    let dir = std::env::temp_dir().join("vkt-vacuum-bump");
    std::fs::create_dir_all(&dir)?;
    let range = (0.0, first.rho_max);
    vkt::io::emit_heatmap(&init.rho, &dir.join("rho_initial.pgm"), range)?;
    vkt::io::emit_heatmap(&record.final_state.rho, &dir.join("rho_final.pgm"), range)?;
    println!();
    println!("heatmaps written to {}", dir.display());
    Ok(())
}
