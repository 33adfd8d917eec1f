//! Command-line front end: run a configured simulation, check initial data,
//! trace particle paths, scan density norms, or exercise the inequality
//! checks. Failures print a machine-readable JSON record and exit nonzero.

use clap::{Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use vkt::analysis::{inequality_check, InequalityKind};
use vkt::config::{self, LoadedConfig};
use vkt::dynamics::{run_collect, RunRecord};
use vkt::elliptic::LameConfig;
use vkt::initdata::{self, InitSpec};
use vkt::lagrangian;
use vkt::{analysis, io, Error, Field, State};

#[derive(Parser)]
#[command(name = "vkt", about = "Pseudo-spectral compressible flow simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the configured run; write diagnostics CSV, snapshots, and a
    /// final density heatmap into the output directory.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Build the configured initial data and report the compatibility
    /// residual and basic density statistics.
    InitCheck {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-run with history enabled and report the log-density identity
    /// residual along backward particle paths from quasi-random points.
    Trace {
        #[arg(long)]
        config: PathBuf,
        /// Number of probe points.
        #[arg(long, default_value_t = 8)]
        points: usize,
        /// Trace arrival time (defaults to t_end).
        #[arg(long)]
        t: Option<f64>,
    },
    /// Report density norms and compensated ratios for the configured
    /// initial data.
    ScanNorms {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate the interpolation inequalities on an ensemble of random
    /// band-limited fields and report ratio ranges.
    CheckInequalities {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", failure_record(&e));
            ExitCode::FAILURE
        }
    }
}

fn failure_record(e: &Error) -> String {
    let kind = match e {
        Error::NonZeroMean { .. } => "non_zero_mean",
        Error::NonPositiveDensity { .. } => "non_positive_density",
        Error::NoConvergence { .. } => "no_convergence",
        Error::MeanIncompatible { .. } => "mean_incompatible",
        Error::UnknownPreset(_) => "unknown_preset",
        Error::BlowUp { .. } => "blow_up",
        Error::HistoryGap { .. } => "history_gap",
        Error::VacuumOnPath { .. } => "vacuum_on_path",
        Error::ExponentOutOfRange { .. } => "exponent_out_of_range",
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::Config(_) => "config",
        Error::BadFormat(_) => "bad_format",
        Error::Io(_) => "io",
    };
    json!({"status": "error", "kind": kind, "detail": e.to_string()}).to_string()
}

fn build_state(cfg: &LoadedConfig) -> vkt::Result<State> {
    let data = initdata::preset(
        &cfg.preset_name,
        cfg.run.n,
        &cfg.run.params,
        &cfg.preset_args,
    )?;
    initdata::realize(
        &data,
        cfg.preset_args.delta,
        &cfg.run.params,
        &LameConfig::default(),
    )
}

fn write_outputs(cfg: &LoadedConfig, record: &RunRecord) -> vkt::Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    io::write_diagnostics(
        &record.rows,
        &cfg.run.norm_ks,
        cfg.run.f_m,
        &cfg.out_dir.join("diagnostics.csv"),
    )?;
    for (step, state) in &record.snapshots {
        io::write_snapshot(state, &cfg.out_dir.join(format!("snap_{step:08}.vkt2")))?;
    }
    io::write_snapshot(&record.final_state, &cfg.out_dir.join("final.vkt2"))?;
    let rho = &record.final_state.rho;
    let (lo, hi) = (rho.min_value(), rho.max_value());
    let range = if hi > lo { (lo, hi) } else { (lo, lo + 1.0) };
    io::emit_heatmap(rho, &cfg.out_dir.join("rho_final.pgm"), range)?;
    Ok(())
}

fn dispatch(cmd: Cmd) -> vkt::Result<ExitCode> {
    match cmd {
        Cmd::Run { config } => {
            let cfg = config::from_file(&config)?;
            let init = build_state(&cfg)?;
            let (record, failure) = run_collect(&cfg.run, &init)?;
            write_outputs(&cfg, &record)?;
            match failure {
                None => {
                    let last = record.rows.last().expect("at least one row");
                    println!(
                        "{}",
                        json!({
                            "status": "ok",
                            "steps": record.steps,
                            "t_end": record.final_state.t,
                            "rows": record.rows.len(),
                            "mass": last.mass,
                            "energy": last.energy,
                            "out_dir": cfg.out_dir,
                            "warnings": cfg.warnings,
                        })
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Some(e) => {
                    // Partial outputs (including the last good snapshot in
                    // final.vkt2) are already on disk.
                    eprintln!("{}", failure_record(&e));
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Cmd::InitCheck { config } => {
            let cfg = config::from_file(&config)?;
            let data = initdata::preset(
                &cfg.preset_name,
                cfg.run.n,
                &cfg.run.params,
                &cfg.preset_args,
            )?;
            let (rho0d, p0d) =
                initdata::regularize(&data.rho0, cfg.preset_args.delta, &cfg.run.params);
            let (u, velocity_given) = match &data.spec {
                InitSpec::Velocity(u) => (u.clone(), true),
                InitSpec::Forcing(g) => (
                    initdata::velocity_from_compat(
                        &rho0d,
                        &p0d,
                        &data.rho0,
                        g,
                        data.mean_u0,
                        &cfg.run.params,
                        &LameConfig::default(),
                    )?,
                    false,
                ),
            };
            let g = match &data.spec {
                InitSpec::Forcing(g) => g.clone(),
                InitSpec::Velocity(_) => vkt::VecField::zeros(cfg.run.n),
            };
            let residual = initdata::compat_residual(&rho0d, &u, &p0d, &g, &cfg.run.params);
            let scale = p0d.grad().l2_norm().max(1e-300);
            println!(
                "{}",
                json!({
                    "status": "ok",
                    "velocity_given": velocity_given,
                    "compat_residual": residual,
                    "compat_residual_rel": residual / scale,
                    "mass": rho0d.mean(),
                    "rho_min": rho0d.min_value(),
                    "rho_max": rho0d.max_value(),
                    "warnings": cfg.warnings,
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Trace { config, points, t } => {
            let cfg = config::from_file(&config)?;
            let mut run_cfg = cfg.run.clone();
            if run_cfg.frame_every == 0 {
                run_cfg.frame_every = run_cfg.diag_every.max(1);
            }
            let init = build_state(&cfg)?;
            let record = vkt::dynamics::run(&run_cfg, &init)?;
            let t = t.unwrap_or(record.final_state.t);
            let mut reports = Vec::new();
            let mut max_resid = 0.0f64;
            for k in 0..points {
                // Low-discrepancy probe points.
                let x = (
                    (0.5 + 0.754877666246693 * k as f64).fract(),
                    (0.5 + 0.569840290998053 * k as f64).fract(),
                );
                match lagrangian::log_density_residual(
                    &record,
                    t,
                    x,
                    &run_cfg.params,
                    &run_cfg.policy,
                ) {
                    Ok(r) => {
                        max_resid = max_resid.max(r.abs());
                        reports.push(json!({"x": [x.0, x.1], "residual": r}));
                    }
                    Err(e) => reports.push(json!({"x": [x.0, x.1], "skipped": e.to_string()})),
                }
            }
            println!(
                "{}",
                json!({
                    "status": "ok",
                    "t": t,
                    "points": reports,
                    "max_residual": max_resid,
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ScanNorms { config } => {
            let cfg = config::from_file(&config)?;
            let init = build_state(&cfg)?;
            let rows = analysis::density_norm_scan(&init.rho, &cfg.run.params, &cfg.run.norm_ks)?;
            let out: Vec<_> = rows
                .iter()
                .map(|r| json!({"k": r.k, "norm": r.norm, "ratio": r.ratio}))
                .collect();
            println!("{}", json!({"status": "ok", "scan": out}));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CheckInequalities { count, seed, grid } => {
            let kinds = [
                ("gagliardo_nirenberg", InequalityKind::GagliardoNirenberg { q: 4.0, m: 2.0, r: 2.0 }),
                ("poincare", InequalityKind::Poincare { m: 1.5 }),
                ("moment_m2", InequalityKind::MomentInterpolation { m: 2.0, eta: 0.5, eps: 0.25 }),
                ("moment_m4", InequalityKind::MomentInterpolation { m: 4.0, eta: 0.5, eps: 0.25 }),
                ("moment_m8", InequalityKind::MomentInterpolation { m: 8.0, eta: 0.5, eps: 0.25 }),
                ("moment_m16", InequalityKind::MomentInterpolation { m: 16.0, eta: 0.5, eps: 0.25 }),
            ];
            let mut all_finite = true;
            let mut summary = Vec::new();
            let mut ranges = vec![(f64::INFINITY, 0.0f64); kinds.len()];
            for i in 0..count {
                let h = Field::random_band_limited(grid, grid / 4, seed.wrapping_add(i as u64));
                for (j, (_, kind)) in kinds.iter().enumerate() {
                    let rep = inequality_check(kind, &h)?;
                    if !rep.ratio.is_finite() {
                        all_finite = false;
                    }
                    ranges[j].0 = ranges[j].0.min(rep.ratio);
                    ranges[j].1 = ranges[j].1.max(rep.ratio);
                }
            }
            for ((name, _), (lo, hi)) in kinds.iter().zip(&ranges) {
                summary.push(json!({"kind": name, "min_ratio": lo, "max_ratio": hi}));
            }
            println!(
                "{}",
                json!({
                    "status": if all_finite { "ok" } else { "error" },
                    "fields": count,
                    "grid": grid,
                    "ratios": summary,
                })
            );
            Ok(if all_finite {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
