//! Seeded synthetic instances.

use crate::geometry::PointSet;
use crate::linalg::{dot, norm};
use crate::rng::StreamRng;

pub fn gaussian_vector(rng: &mut StreamRng, d: usize, sd: f64) -> Vec<f64> {
    (0..d).map(|_| rng.normal() * sd).collect()
}

pub fn unit_vector(rng: &mut StreamRng, d: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vector(rng, d, 1.0);
        let nv = norm(&v);
        if nv > 0.0 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

/// Unit vector with inner product exactly `ip` against the unit vector `q`.
pub fn unit_at_ip(rng: &mut StreamRng, q: &[f64], ip: f64) -> Vec<f64> {
    loop {
        let u = unit_vector(rng, q.len());
        let p = dot(&u, q);
        let perp: Vec<f64> = u.iter().zip(q).map(|(a, b)| a - p * b).collect();
        let np = norm(&perp);
        if np > 1e-8 {
            let s = (1.0 - ip * ip).max(0.0).sqrt();
            return q.iter().zip(&perp).map(|(a, b)| ip * a + s * b / np).collect();
        }
    }
}

/// `½‖w - μ‖²` over `n` points drawn from `N(0, I/d)`, with `μ` the centroid
/// of three distinct random vertices, so the optimum value is 0.
#[derive(Clone, Debug)]
pub struct QuadraticInstance {
    pub points: PointSet,
    pub mu: Vec<f64>,
    pub support: [usize; 3],
}

pub fn quadratic_instance(n: usize, d: usize, seed: u64) -> QuadraticInstance {
    assert!(n >= 3, "need at least three vertices");
    let mut rng = StreamRng::new(seed, 0);
    let sd = 1.0 / (d as f64).sqrt();
    let rows: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vector(&mut rng, d, sd)).collect();
    let points = PointSet::from_rows(&rows).expect("finite rows");
    let pick = rng.sample_distinct(n, 3);
    let support = [pick[0], pick[1], pick[2]];
    let mut mu = vec![0.0; d];
    for &i in &support {
        crate::linalg::axpy(1.0 / 3.0, points.point(i), &mut mu);
    }
    QuadraticInstance { points, mu, support }
}

/// Unit points where `planted` has inner product `ip` with `query` and every
/// other point has inner product drawn uniformly from `[-rest_max, rest_max]`.
#[derive(Clone, Debug)]
pub struct PlantedMaxip {
    pub points: PointSet,
    pub query: Vec<f64>,
    pub planted: usize,
}

pub fn planted_maxip(n: usize, d: usize, ip: f64, rest_max: f64, seed: u64) -> PlantedMaxip {
    let mut rng = StreamRng::new(seed, 1);
    let query = unit_vector(&mut rng, d);
    let planted = rng.below(n as u64) as usize;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let target = if i == planted {
                ip
            } else {
                rest_max * (2.0 * rng.uniform() - 1.0)
            };
            unit_at_ip(&mut rng, &query, target)
        })
        .collect();
    PlantedMaxip {
        points: PointSet::from_rows(&rows).expect("finite rows"),
        query,
        planted,
    }
}
