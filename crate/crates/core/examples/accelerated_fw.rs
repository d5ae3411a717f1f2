//! Accelerated Frank-Wolfe on the quadratic family with each oracle.
//!
//! `cargo run --release --example accelerated_fw -- [oracle] [seeds]`

use fwmips::fw::{fw_accelerated, FwConfig, OracleKind, Quadratic};
use fwmips::instances::quadratic_instance;

fn main() -> fwmips::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("lsh_jl");
    let seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let oracle = match which {
        "exact" => OracleKind::Exact,
        "aipe" => OracleKind::aipe_default(),
        _ => OracleKind::lsh_jl_default(),
    };
    for seed in 0..seeds {
        let inst = quadratic_instance(200, 50, seed);
        let cfg = FwConfig {
            epsilon: 1e-3,
            c: 0.9,
            oracle: oracle.clone(),
            seed,
            ..FwConfig::default()
        };
        let out = fw_accelerated(&Quadratic::new(inst.mu.clone()), &inst.points, &cfg)?;
        let t = &out.trace;
        println!(
            "seed {seed}: gap {:.2e} iters {} fails {} reason {:?} hit-rate {:.2} prep {:.2}s solve {:.2}s macs {:.2e}",
            t.final_objective,
            t.iterations(),
            t.fail_events.len(),
            t.reason,
            t.hit_rate(),
            t.preprocess_secs,
            t.solve_secs,
            t.counters.total_macs() as f64
        );
    }
    Ok(())
}
