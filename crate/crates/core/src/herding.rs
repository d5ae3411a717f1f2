//! Kernel herding as Frank-Wolfe on `½‖w - μ‖²` over the mapped points.
//!
//! The classical recursion `w ← w + μ - Φ(x)` from `w_0 = μ` picks `x`
//! maximizing `⟨w, Φ(x)⟩`. After `t` picks `w_t = (t+1)μ - Σ Φ(x_i)`.
//! Frank-Wolfe from the origin with `η_t = 1/(t+1)`, `t ≥ 1`, has iterate
//! `Σ Φ(x_i)/(t+1)`, so its search direction `μ - w` is `w_t/(t+1)` and the
//! two visit the same argmax sequence.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::counters::Counters;
use crate::error::{check_dim, Error, Result};
use crate::fw::{fw_accelerated, Convergence, FwConfig, FwOutput, FwTrace, IterRecord, OracleKind, Outcome, Quadratic};
use crate::geometry::{check_finite, PointSet};
use crate::linalg::{argmax, axpy, dist, dot, sq_dist, sub};
use crate::pointset_io::read_any;
use crate::rng::StreamRng;

/// A linearized kernel `Φ: ℝ^d → ℝ^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureMap {
    Identity,
    /// `sqrt(2/k) · cos(Wx + b)` with `W ~ N(0, I/σ²)` and `b ~ U[0, 2π)`.
    /// A missing bandwidth is the median pairwise distance of the data.
    RandomFourier {
        bandwidth: Option<f64>,
        feature_dim: usize,
        seed: u64,
    },
    /// `x ⊗ x`, the feature map of the kernel `⟨x, y⟩²`.
    Degree2Tensor,
}

impl Default for FeatureMap {
    fn default() -> Self {
        FeatureMap::RandomFourier {
            bandwidth: None,
            feature_dim: 64,
            seed: 0,
        }
    }
}

impl FeatureMap {
    pub fn output_dim(&self, d: usize) -> usize {
        match self {
            FeatureMap::Identity => d,
            FeatureMap::RandomFourier { feature_dim, .. } => *feature_dim,
            FeatureMap::Degree2Tensor => d * d,
        }
    }

    /// Maps every row of `raw`.
    pub fn apply(&self, raw: &PointSet) -> Result<PointSet> {
        match self {
            FeatureMap::Identity => Ok(raw.clone()),
            FeatureMap::Degree2Tensor => raw.map(|x| x.iter().flat_map(|a| x.iter().map(move |b| a * b)).collect()),
            FeatureMap::RandomFourier {
                bandwidth,
                feature_dim,
                seed,
            } => {
                if *feature_dim == 0 {
                    return Err(Error::config("feature_dim must be positive"));
                }
                let sigma = match bandwidth {
                    Some(b) if *b > 0.0 && b.is_finite() => *b,
                    Some(b) => return Err(Error::config(format!("bandwidth must be positive, got {b}"))),
                    None => median_pairwise_distance(raw),
                };
                let sigma = if sigma > 0.0 { sigma } else { 1.0 };
                let d = raw.dim();
                let mut rng = StreamRng::new(*seed, 0);
                let mut w = vec![0.0; feature_dim * d];
                rng.fill_normal(&mut w);
                w.iter_mut().for_each(|x| *x /= sigma);
                let b: Vec<f64> = (0..*feature_dim)
                    .map(|_| 2.0 * std::f64::consts::PI * rng.uniform())
                    .collect();
                let amp = (2.0 / *feature_dim as f64).sqrt();
                raw.map(|x| {
                    (0..*feature_dim)
                        .map(|j| amp * (dot(&w[j * d..(j + 1) * d], x) + b[j]).cos())
                        .collect()
                })
            }
        }
    }
}

/// Median over pairs among the first 1000 points.
pub fn median_pairwise_distance(set: &PointSet) -> f64 {
    let m = set.len().min(1000);
    let mut ds = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            ds.push(dist(set.point(i), set.point(j)));
        }
    }
    if ds.is_empty() {
        return 0.0;
    }
    ds.sort_by(f64::total_cmp);
    let h = ds.len() / 2;
    if ds.len() % 2 == 1 {
        ds[h]
    } else {
        0.5 * (ds[h - 1] + ds[h])
    }
}

#[derive(Clone, Debug)]
pub struct HerdingInstance {
    pub raw: PointSet,
    pub mapped: PointSet,
    pub weights: Vec<f64>,
    pub mu: Vec<f64>,
}

impl HerdingInstance {
    /// `weights` defaults to uniform.
    pub fn new(raw: PointSet, map: &FeatureMap, weights: Option<Vec<f64>>) -> Result<Self> {
        let mapped = map.apply(&raw)?;
        Self::from_mapped(raw, mapped, weights)
    }

    pub fn from_mapped(raw: PointSet, mapped: PointSet, weights: Option<Vec<f64>>) -> Result<Self> {
        let n = mapped.len();
        if n == 0 {
            return Err(Error::EmptyIndex);
        }
        let weights = weights.unwrap_or_else(|| vec![1.0 / n as f64; n]);
        check_dim(n, weights.len())?;
        if let Some(i) = weights.iter().position(|&p| !(p >= 0.0)) {
            return Err(Error::config(format!("weight {i} is negative or NaN")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!("weights sum to {total}")));
        }
        let mu = mapped.weighted_mean(&weights)?;
        Ok(Self {
            raw,
            mapped,
            weights,
            mu,
        })
    }

    /// Replaces the target mean, for targets off the hull.
    pub fn with_mu(mut self, mu: Vec<f64>) -> Result<Self> {
        check_dim(self.mapped.dim(), mu.len())?;
        check_finite(&mu)?;
        self.mu = mu;
        Ok(self)
    }

    pub fn objective(&self) -> Quadratic {
        Quadratic::new(self.mu.clone())
    }
}

/// `(½‖w - μ‖², w - μ)`
pub fn herding_objective(w: &[f64], mu: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dim(mu.len(), w.len())?;
    Ok((0.5 * sq_dist(w, mu), sub(w, mu)))
}

/// Selected indices, `‖mean_t - μ‖` after each selection, and a trace whose
/// objective column is `½‖mean_t - μ‖²` before step `t`.
#[derive(Clone, Debug)]
pub struct ClassicHerding {
    pub samples: Vec<usize>,
    pub errors: Vec<f64>,
    pub weights: Vec<f64>,
    pub trace: FwTrace,
}

/// `w_{t+1} = w_t + μ - Φ(x_{t+1})` from `w_0 = μ`, with `x_{t+1}` the exact
/// argmax of `⟨w_t, Φ(x)⟩` (ties to the smallest index).
pub fn herding_classic(inst: &HerdingInstance, steps: usize) -> Result<ClassicHerding> {
    if steps == 0 {
        return Err(Error::config("herding needs at least one step"));
    }
    let started = Instant::now();
    let pts = &inst.mapped;
    let k = pts.dim();
    let mut w = inst.mu.clone();
    let mut sum = vec![0.0; k];
    let mut samples = Vec::with_capacity(steps);
    let mut errors = Vec::with_capacity(steps);
    let mut records = Vec::with_capacity(steps);
    let mut counters = Counters::default();
    let mut scores = vec![0.0; pts.len()];
    for t in 0..steps {
        for (s, x) in scores.iter_mut().zip(pts.iter()) {
            *s = dot(&w, x);
        }
        counters.inner_product_macs += (pts.len() * k) as u64;
        let (i, _) = argmax(scores.iter().copied()).ok_or(Error::EmptyIndex)?;
        let before = if t == 0 {
            f64::NAN
        } else {
            0.5 * sq_dist(&sum.iter().map(|s| s / t as f64).collect::<Vec<_>>(), &inst.mu)
        };
        axpy(1.0, pts.point(i), &mut sum);
        axpy(1.0, &inst.mu, &mut w);
        axpy(-1.0, pts.point(i), &mut w);
        let mean: Vec<f64> = sum.iter().map(|s| s / (t + 1) as f64).collect();
        errors.push(dist(&mean, &inst.mu));
        samples.push(i);
        records.push(IterRecord {
            t,
            eta: 1.0 / (t + 1) as f64,
            r: f64::NAN,
            outcome: Outcome::Exact,
            objective: before,
            gap_surrogate: f64::NAN,
            vertex: i,
            lifted_ip: scores[i],
            scale: 1.0,
            counters: Counters {
                inner_product_macs: (pts.len() * k) as u64,
                ..Counters::default()
            },
        });
    }
    let mut weights = vec![0.0; pts.len()];
    for &i in &samples {
        weights[i] += 1.0 / steps as f64;
    }
    let final_objective = 0.5 * errors.last().map_or(0.0, |e| e * e);
    let trace = FwTrace {
        records,
        fail_events: Vec::new(),
        reason: Convergence::IterationBudget,
        budget: steps,
        final_objective,
        counters,
        preprocess_secs: 0.0,
        solve_secs: started.elapsed().as_secs_f64(),
    };
    Ok(ClassicHerding {
        samples,
        errors,
        weights,
        trace,
    })
}

/// Frank-Wolfe on `½‖w - μ‖²` from the origin with `η_t = 1/(t+1)` for
/// `t = 1, 2, …` and an exact direction scan; returns the visited vertices.
pub fn herding_as_frank_wolfe(inst: &HerdingInstance, steps: usize) -> Result<Vec<usize>> {
    let pts = &inst.mapped;
    let mut w = vec![0.0; pts.dim()];
    let mut visited = Vec::with_capacity(steps);
    let mut scores = vec![0.0; pts.len()];
    for t in 1..=steps {
        let (_, g) = herding_objective(&w, &inst.mu)?;
        for (s, x) in scores.iter_mut().zip(pts.iter()) {
            *s = -dot(&g, x);
        }
        let (i, _) = argmax(scores.iter().copied()).ok_or(Error::EmptyIndex)?;
        let eta = 1.0 / (t + 1) as f64;
        for (v, x) in w.iter_mut().zip(pts.point(i)) {
            *v = (1.0 - eta) * *v + eta * x;
        }
        visited.push(i);
    }
    Ok(visited)
}

/// Accelerated Frank-Wolfe on the herding objective with `β = 1`.
pub fn herding_accelerated(inst: &HerdingInstance, cfg: &FwConfig) -> Result<FwOutput> {
    if matches!(cfg.oracle, OracleKind::Exact) {
        return Err(Error::config(
            "accelerated herding needs a sketched oracle (lsh_jl or aipe)",
        ));
    }
    let cfg = FwConfig {
        beta: 1.0,
        ..cfg.clone()
    };
    fw_accelerated(&inst.objective(), &inst.mapped, &cfg)
}

/// Least-squares slope of `ln e_t` against `ln t` over `t ∈ [from, to]`,
/// with `errors[0]` the error at `t = 1`. Zero errors are skipped.
pub fn loglog_slope(errors: &[f64], from: usize, to: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = (from.max(1)..=to.min(errors.len()))
        .filter(|&t| errors[t - 1] > 0.0 && errors[t - 1].is_finite())
        .map(|t| ((t as f64).ln(), errors[t - 1].ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// A herding instance on disk: a point file, a feature map, and an optional
/// file holding the weights `P` as one number per line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HerdingSpec {
    pub data: PathBuf,
    #[serde(default)]
    pub feature_map: FeatureMap,
    #[serde(default)]
    pub weights: Option<PathBuf>,
}

impl HerdingSpec {
    /// Relative paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<HerdingInstance> {
        let raw = read_any(&base.join(&self.data))?;
        let weights = match &self.weights {
            None => None,
            Some(p) => {
                let path = base.join(p);
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let parsed: std::result::Result<Vec<f64>, _> = text.split_whitespace().map(str::parse::<f64>).collect();
                Some(parsed.map_err(|e| Error::format(&path, e.to_string()))?)
            }
        };
        HerdingInstance::new(raw, &self.feature_map, weights)
    }
}
