//! Plans a JL ensemble, projects a point set, and reports how many matrices
//! preserve distances to a query.
//!
//! `cargo run --release --example jl_sketch`

use fwmips::geometry::PointSet;
use fwmips::instances::unit_vector;
use fwmips::linalg::dist;
use fwmips::rng::StreamRng;
use fwmips::sketch::SketchEnsemble;

fn main() -> fwmips::Result<()> {
    let (n, d, eps) = (200, 50, 0.3);
    let mut rng = StreamRng::new(5, 0);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| unit_vector(&mut rng, d)).collect();
    let pts = PointSet::from_rows(&rows)?;
    let ens = SketchEnsemble::build(n, d, eps, 0.1, 11, Some(64))?;
    println!("{} matrices of shape {}x{}", ens.len(), ens.sketch_dim(), d);

    let q = unit_vector(&mut rng, d);
    let m = ens.matrix(0);
    let ratios: Vec<f64> = pts
        .iter()
        .map(|v| dist(&m.apply(&q), &m.apply(v)).powi(2) / dist(&q, v).powi(2))
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    println!("matrix 0: squared-distance ratio in [{lo:.3}, {hi:.3}]");
    println!("good fraction   {:.3}", ens.good_fraction(&q, &pts, eps)?);
    println!("strict fraction {:.3}", ens.strict_good_fraction(&q, &pts, eps)?);
    // Only the seeds are persisted; the matrices are regenerated from them.
    let meta = serde_json::to_string(&ens.meta())?;
    println!("persisted metadata: {} bytes", meta.len());
    Ok(())
}
