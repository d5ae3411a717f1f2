//! Adaptive inner-product estimation: estimates, the envelope, an insert, a
//! delete, and the estimate dump.
//!
//! `cargo run --release --example aipe`

use fwmips::aipe::{envelope_holds, write_estimates_csv, AipeIndex};
use fwmips::geometry::PointSet;
use fwmips::instances::unit_vector;
use fwmips::linalg::dot;
use fwmips::rng::StreamRng;

fn main() -> fwmips::Result<()> {
    let (n, d, eps) = (500, 64, 0.1);
    let mut rng = StreamRng::new(4, 0);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| unit_vector(&mut rng, d)).collect();
    let mut idx = AipeIndex::init(PointSet::from_rows(&rows)?, eps, 0.01, 17)?;
    println!(
        "pool {} matrices, {} per query, sketch dim {}",
        idx.ade().pool_size(),
        idx.ade().subset_size(),
        idx.ade().sketch_dim()
    );
    let q = unit_vector(&mut rng, d);
    let est = idx.query(&q, &mut rng)?;
    let held = est
        .entries
        .iter()
        .filter(|e| envelope_holds(e.w, dot(&rows[e.index], &q), eps))
        .count();
    println!("envelope holds for {held}/{} points", est.entries.len());

    let planted = idx.insert(&q)?;
    let (best, _) = idx.query_max(&q, &mut rng)?;
    println!(
        "inserted the query as {planted}; query_max returns {} at distance {:.3}",
        best.index, best.distance
    );
    idx.delete(planted)?;
    println!("after delete: {} live of {}", idx.live_count(), idx.len());

    let path = std::env::temp_dir().join("aipe_estimates.csv");
    write_estimates_csv(&path, &est.entries)?;
    println!("estimates written to {}", path.display());
    Ok(())
}
