//! Adaptive inner product estimation on the unit sphere.
//!
//! Distances are estimated by an ensemble of Gaussian sketches: each query
//! draws a fresh random odd-sized subset of the pool and takes, for every
//! stored point, the median over the subset of `‖S_j x_i - S_j q‖`. Inner
//! products follow from `w_i = 1 - d_i²/2`.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{defaults, Calibration};
use crate::counters::Counters;
use crate::error::{check_dim, Error, Result};
use crate::geometry::PointSet;
use crate::linalg::sq_dist;
use crate::lsh::check_unit;
use crate::rng::StreamRng;
use crate::sketch::SketchEnsemble;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AipeParams {
    pub epsilon: f64,
    pub delta: f64,
    /// Number of queries the pool is sized for.
    #[serde(default)]
    pub expected_queries: Option<usize>,
    #[serde(default)]
    pub pool_override: Option<usize>,
    #[serde(default)]
    pub subset_override: Option<usize>,
    #[serde(default)]
    pub sketch_dim_override: Option<usize>,
}

impl AipeParams {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            expected_queries: None,
            pool_override: None,
            subset_override: None,
            sketch_dim_override: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("epsilon", self.epsilon), ("delta", self.delta)] {
            if !(v > 0.0 && v <= 0.1) {
                return Err(Error::config(format!("AIPE {name} must lie in (0, 0.1], got {v}")));
            }
        }
        if self.pool_override == Some(0) || self.subset_override == Some(0) {
            return Err(Error::config("AIPE pool and subset sizes must be positive"));
        }
        Ok(())
    }
}

fn odd_at_least(x: f64, min: usize) -> usize {
    let v = (x.ceil() as usize).max(min);
    if v.is_multiple_of(2) {
        v + 1
    } else {
        v
    }
}

/// `k_ADE = max(3, odd(ceil(c_k · ln((n + T)/δ))))`
pub fn plan_pool_size(n: usize, queries: usize, delta: f64, cal: &Calibration) -> usize {
    odd_at_least(cal.c_k * ((n + queries) as f64 / delta).ln(), 3)
}

/// `m = odd(ceil(c_q · ln(n·T/δ)))`, at most the pool size.
pub fn plan_subset_size(n: usize, queries: usize, delta: f64, pool: usize, cal: &Calibration) -> usize {
    let m = odd_at_least(cal.c_q * ((n * queries) as f64 / delta).ln(), 1);
    if m <= pool {
        m
    } else if pool % 2 == 1 {
        pool
    } else {
        pool - 1
    }
}

/// The definition's two-sided envelope `(1+ε)⟨x,q⟩ - ε ≤ w ≤ (1-ε)⟨x,q⟩ + ε`.
pub fn envelope_holds(w: f64, ip: f64, epsilon: f64) -> bool {
    let slack = 1e-12;
    w >= (1.0 + epsilon) * ip - epsilon - slack && w <= (1.0 - epsilon) * ip + epsilon + slack
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub index: usize,
    pub distance: f64,
    pub w: f64,
}

#[derive(Clone, Debug)]
pub struct Estimates {
    pub entries: Vec<Estimate>,
    /// Pool indices used for this query.
    pub subset: Vec<usize>,
    pub counters: Counters,
}

/// Sketch pool plus the sketched points and their liveness.
#[derive(Clone, Debug)]
pub struct AdeStore {
    ensemble: SketchEnsemble,
    /// One row-major `n × s` table per pool matrix.
    tables: Vec<Vec<f64>>,
    live: Vec<bool>,
    subset: usize,
    epsilon: f64,
    delta: f64,
}

impl AdeStore {
    pub fn pool_size(&self) -> usize {
        self.ensemble.len()
    }

    pub fn subset_size(&self) -> usize {
        self.subset
    }

    pub fn sketch_dim(&self) -> usize {
        self.ensemble.sketch_dim()
    }

    pub fn ensemble(&self) -> &SketchEnsemble {
        &self.ensemble
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn sketch_row(&self, j: usize, i: usize) -> &[f64] {
        let s = self.sketch_dim();
        &self.tables[j][i * s..(i + 1) * s]
    }
}

#[derive(Clone, Debug)]
pub struct AipeIndex {
    ade: AdeStore,
    points: PointSet,
}

impl AipeIndex {
    pub fn init(points: PointSet, epsilon: f64, delta: f64, seed: u64) -> Result<Self> {
        Self::init_with(points, &AipeParams::new(epsilon, delta), seed, defaults())
    }

    pub fn init_with(points: PointSet, params: &AipeParams, seed: u64, cal: &Calibration) -> Result<Self> {
        params.validate()?;
        for p in points.iter() {
            check_unit(p)?;
        }
        let n = points.len();
        let queries = params.expected_queries.unwrap_or(cal.ade_queries);
        let pool = params
            .pool_override
            .unwrap_or_else(|| plan_pool_size(n, queries, params.delta, cal));
        let subset = params
            .subset_override
            .unwrap_or_else(|| plan_subset_size(n, queries, params.delta, pool, cal))
            .min(pool);
        let ensemble = SketchEnsemble::build_with(
            n,
            points.dim(),
            params.epsilon,
            params.delta,
            seed,
            Some(pool),
            params.sketch_dim_override,
            cal,
        )?;
        let tables = ensemble.matrices().par_iter().map(|m| m.apply_flat(&points)).collect();
        let ade = AdeStore {
            ensemble,
            tables,
            live: vec![true; n],
            subset,
            epsilon: params.epsilon,
            delta: params.delta,
        };
        Ok(Self { ade, points })
    }

    pub fn ade(&self) -> &AdeStore {
        &self.ade
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    /// Total number of ids ever issued.
    pub fn len(&self) -> usize {
        self.ade.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live_count() == 0
    }

    pub fn live_count(&self) -> usize {
        self.ade.live.iter().filter(|&&l| l).count()
    }

    pub fn is_live(&self, i: usize) -> bool {
        self.ade.live.get(i).copied().unwrap_or(false)
    }

    /// Appends `z` under a fresh id.
    pub fn insert(&mut self, z: &[f64]) -> Result<usize> {
        check_dim(self.points.dim(), z.len())?;
        check_unit(z)?;
        let id = self.points.push(z)?;
        for (m, table) in self.ade.ensemble.matrices().iter().zip(self.ade.tables.iter_mut()) {
            table.extend(m.apply(z));
        }
        self.ade.live.push(true);
        Ok(id)
    }

    pub fn delete(&mut self, i: usize) -> Result<()> {
        match self.ade.live.get_mut(i) {
            Some(l) if *l => {
                *l = false;
                Ok(())
            }
            _ => Err(Error::Index(i)),
        }
    }

    /// Estimates for every live point under a fresh matrix subset.
    pub fn query(&self, q: &[f64], rng: &mut StreamRng) -> Result<Estimates> {
        check_dim(self.points.dim(), q.len())?;
        check_unit(q)?;
        let subset = rng.sample_distinct(self.ade.pool_size(), self.ade.subset);
        let s = self.ade.sketch_dim();
        let sketched: Vec<Vec<f64>> = subset.iter().map(|&j| self.ade.ensemble.matrix(j).apply(q)).collect();
        let live: Vec<usize> = (0..self.len()).filter(|&i| self.ade.live[i]).collect();
        let entries: Vec<Estimate> = live
            .par_iter()
            .map(|&i| {
                let mut ds: Vec<f64> = subset
                    .iter()
                    .zip(&sketched)
                    .map(|(&j, sq)| sq_dist(self.ade.sketch_row(j, i), sq).sqrt())
                    .collect();
                let mid = ds.len() / 2;
                let (_, &mut d, _) = ds.select_nth_unstable_by(mid, f64::total_cmp);
                Estimate {
                    index: i,
                    distance: d,
                    w: 1.0 - d * d / 2.0,
                }
            })
            .collect();
        let m = subset.len() as u64;
        let counters = Counters {
            sketch_macs: m * (s * self.points.dim()) as u64,
            estimate_macs: m * s as u64 * live.len() as u64,
            ..Counters::default()
        };
        Ok(Estimates {
            entries,
            subset,
            counters,
        })
    }

    /// Live point with the smallest estimated distance; ties go to the smallest id.
    pub fn query_max(&self, q: &[f64], rng: &mut StreamRng) -> Result<(Estimate, Counters)> {
        if self.is_empty() {
            return Err(Error::EmptyIndex);
        }
        let est = self.query(q, rng)?;
        let best = est
            .entries
            .iter()
            .copied()
            .reduce(|a, b| if b.distance < a.distance { b } else { a })
            .expect("at least one live point");
        Ok((best, est.counters))
    }
}

/// Writes `index,distance,w` rows.
pub fn write_estimates_csv(path: &Path, est: &[Estimate]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let io = |e: csv::Error| Error::format(path, e.to_string());
    w.write_record(["index", "distance", "w"]).map_err(io)?;
    for e in est {
        w.write_record([e.index.to_string(), format!("{:e}", e.distance), format!("{:e}", e.w)])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
