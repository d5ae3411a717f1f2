//! Exact Frank-Wolfe on a quadratic over a point hull, against the `O(1/t)` bound.
//!
//! `cargo run --release --example frank_wolfe`

use fwmips::fw::{fw_exact, FwConfig, Quadratic};
use fwmips::instances::quadratic_instance;

fn main() -> fwmips::Result<()> {
    let inst = quadratic_instance(200, 50, 0);
    let cfg = FwConfig {
        epsilon: 1e-4,
        max_iters: Some(2000),
        ..FwConfig::default()
    };
    let out = fw_exact(&Quadratic::new(inst.mu.clone()), &inst.points, &cfg)?;
    let d = inst.points.diameter_bound();
    for rec in out.trace.records.iter().filter(|r| [1, 10, 100, 1000].contains(&r.t)) {
        println!(
            "t = {:4}  h_t = {:.3e}  bound 2D²/(t+1) = {:.3e}",
            rec.t,
            rec.objective,
            2.0 * d * d / (rec.t as f64 + 1.0)
        );
    }
    out.point.verify(&inst.points)?;
    let support = out.point.weights.iter().filter(|&&w| w > 1e-3).count();
    println!(
        "final value {:.3e}, {support} vertices carry weight > 1e-3",
        out.trace.final_objective
    );
    Ok(())
}
