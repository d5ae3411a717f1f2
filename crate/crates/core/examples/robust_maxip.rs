//! The sketched LSH index answering a sequence of adaptively chosen queries,
//! each one built from the previous answer.
//!
//! `cargo run --release --example robust_maxip`

use fwmips::geometry::PointSet;
use fwmips::instances::unit_vector;
use fwmips::linalg::{dot, norm};
use fwmips::lsh_jl::{LshJlIndex, RobustMaxipParams};
use fwmips::rng::StreamRng;

fn main() -> fwmips::Result<()> {
    let (n, d) = (300, 32);
    let mut rng = StreamRng::new(3, 0);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| unit_vector(&mut rng, d)).collect();
    let pts = PointSet::from_rows(&rows)?;
    let params = RobustMaxipParams {
        c: 0.8,
        tau: 0.8,
        ..RobustMaxipParams::default()
    };
    let idx = LshJlIndex::build_robust(pts.clone(), params, 9)?;
    println!(
        "s = {}, k_JL = {}, kappa = {}, l = {}, {} KiB",
        idx.ensemble().sketch_dim(),
        idx.ensemble().len(),
        idx.kappa(),
        idx.samples_per_query(),
        idx.size_bytes() / 1024
    );
    let mut q = pts.point(0).to_vec();
    for step in 0..10 {
        let ans = idx.query_max_robust(&q, &mut rng)?;
        match ans.index {
            Some(i) => {
                println!(
                    "query {step}: vertex {i} ip {:.3} ({} verified)",
                    ans.value, ans.counters.candidates_verified
                );
                // Steer the next query away from the answer.
                let x = pts.point(i);
                let ip = dot(&q, x);
                let mut next: Vec<f64> = q.iter().zip(x).map(|(a, b)| a - 0.5 * ip * b).collect();
                next.iter_mut()
                    .zip(unit_vector(&mut rng, d))
                    .for_each(|(a, b)| *a += 0.3 * b);
                let nn = norm(&next);
                q = next.into_iter().map(|v| v / nn).collect();
            }
            None => println!("query {step}: miss"),
        }
    }
    Ok(())
}
