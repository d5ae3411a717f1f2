//! Hyperplane LSH answering `(c, τ)`-MaxIP on a planted instance.
//!
//! `cargo run --release --example lsh_maxip`

use fwmips::instances::planted_maxip;
use fwmips::lsh::{LshIndex, LshParams};

fn main() -> fwmips::Result<()> {
    let (n, d, c, tau) = (1000, 32, 0.9, 0.9);
    let mut found = 0;
    let mut verified = 0;
    for trial in 0..100 {
        let inst = planted_maxip(n, d, 0.9, 0.3, trial);
        let params = LshParams::for_maxip(n, c, tau, trial)?;
        let idx = LshIndex::build(inst.points.clone(), params)?;
        let ans = idx.query_maxip(&inst.query, c, tau)?;
        verified += ans.counters.candidates_verified;
        if ans.index == Some(inst.planted) {
            found += 1;
        }
    }
    let p = LshParams::for_maxip(n, c, tau, 0)?;
    println!(
        "K = {} bits, L = {} tables, budget {}",
        p.k_bits, p.l_tables, p.probe_budget
    );
    println!(
        "recall {found}/100, {:.1} candidates verified per query",
        verified as f64 / 100.0
    );
    Ok(())
}
