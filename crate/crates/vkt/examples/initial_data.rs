//! Constructing a velocity for vacuum initial data: solve the degenerate
//! elliptic compatibility system against the regularized pressure gradient
//! and verify that u₀^δ converges linearly in δ.
//!
//! ```sh
//! cargo run --example initial_data
//! ```

use vkt::elliptic::LameConfig;
use vkt::initdata::{self, PresetArgs};
use vkt::{Params, VecField};

fn main() -> vkt::Result<()> {
    let n = 64;
    let params = Params::new(0.05, 4.0, 2.0, 1.0)?;
    let data = initdata::preset("vacuum-bump", n, &params, &PresetArgs::default())?;
    let g = VecField::zeros(n);
    let cfg = LameConfig {
        rtol: 1e-11,
        max_iters: 500,
    };

    println!("vacuum-bump compatibility sweep, n = {n}");
    println!();
    println!("{:>8}  {:>12}  {:>12}  {:>10}", "delta", "resid (rel)", "|u - prev|", "ratio");
    let mut prev: Option<VecField> = None;
    let mut last_dist: Option<f64> = None;
    for &delta in &[0.02, 0.01, 0.005, 0.0025] {
        let (rho_d, p_d) = initdata::regularize(&data.rho0, delta, &params);
        let u = initdata::velocity_from_compat(
            &rho_d,
            &p_d,
            &data.rho0,
            &g,
            (0.0, 0.0),
            &params,
            &cfg,
        )?;
        let rel = initdata::compat_residual(&rho_d, &u, &p_d, &g, &params) / p_d.grad().l2_norm();
        match &prev {
            None => println!("{delta:8}  {rel:12.3e}  {:>12}  {:>10}", "-", "-"),
            Some(p) => {
                let dist = ((&u.x1 - &p.x1).lp_norm(2.0).powi(2)
                    + (&u.x2 - &p.x2).lp_norm(2.0).powi(2))
                .sqrt();
                match last_dist {
                    None => println!("{delta:8}  {rel:12.3e}  {dist:12.3e}  {:>10}", "-"),
                    Some(d) => println!("{delta:8}  {rel:12.3e}  {dist:12.3e}  {:10.4}", dist / d),
                }
                last_dist = Some(dist);
            }
        }
        prev = Some(u);
    }
    println!();
    println!("ratios near 0.5 confirm |u0^delta - u0| = O(delta)");
    Ok(())
}
