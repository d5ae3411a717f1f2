//! Lifts a direction search onto the unit sphere and checks the identity
//! `⟨φ(a), ψ(b)⟩ · C = ⟨b - a, -∇f(a)⟩` on a random instance.
//!
//! `cargo run --release --example transforms`

use fwmips::geometry::{PointSet, TransformPair};
use fwmips::instances::gaussian_vector;
use fwmips::linalg::{dot, sub};
use fwmips::rng::StreamRng;

fn main() -> fwmips::Result<()> {
    let mut rng = StreamRng::new(1, 0);
    let rows: Vec<Vec<f64>> = (0..100).map(|_| gaussian_vector(&mut rng, 8, 1.0)).collect();
    let pts = PointSet::from_rows(&rows)?;
    let a = pts.centroid();
    let g = gaussian_vector(&mut rng, 8, 1.0);

    let pair = TransformPair::new(10.0 * (1.0 + pts.max_radius()), TransformPair::data_radius_for(&pts))?;
    let q = pair.query(&g, &a)?;
    let lifted = pair.data_set(&pts)?;

    let mut worst = 0.0f64;
    let mut best = (0, f64::NEG_INFINITY);
    for (i, b) in pts.iter().enumerate() {
        let direct = -dot(&sub(b, &a), &g);
        let via = dot(&q, lifted.point(i)) * pair.scale();
        worst = worst.max((direct - via).abs());
        if via > best.1 {
            best = (i, via);
        }
    }
    println!("lifted dim {} scale C = {:.3}", q.len(), pair.scale());
    println!("max |identity error| = {worst:.2e}");
    println!("best direction: vertex {} with <b - a, -g> = {:.4}", best.0, best.1);
    Ok(())
}
