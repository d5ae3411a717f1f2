//! Gaussian Johnson-Lindenstrauss sketches and the multi-matrix ensemble.

use serde::{Deserialize, Serialize};

use crate::calibration::{defaults, Calibration};
use crate::error::{check_dim, Error, Result};
use crate::geometry::PointSet;
use crate::linalg::{dot, norm, sq_norm};
use crate::rng::{derive_seed, StreamRng};

/// Additive slack in the distance-preservation test.
pub const ALPHA: f64 = 1e-9;

/// An `s × d` matrix with i.i.d. `N(0, 1/s)` entries, regenerated from its seed.
#[derive(Clone, Debug, PartialEq)]
pub struct JlMatrix {
    rows: usize,
    cols: usize,
    seed: u64,
    entries: Vec<f64>,
}

impl JlMatrix {
    pub fn generate(rows: usize, cols: usize, seed: u64) -> Self {
        let mut rng = StreamRng::new(seed, 0);
        let scale = 1.0 / (rows as f64).sqrt();
        let entries = (0..rows * cols).map(|_| rng.normal() * scale).collect();
        Self {
            rows,
            cols,
            seed,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.entries)
    }

    /// The hypothesis `‖S‖_F ≤ d` of the robust-JL argument.
    pub fn exceeds_frobenius_bound(&self) -> bool {
        self.frobenius_norm() > self.cols as f64
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.apply_into(x, &mut out);
        out
    }

    /// Row-major `n × s` table of `S x_j` for every point.
    pub fn apply_flat(&self, pts: &PointSet) -> Vec<f64> {
        let mut out = vec![0.0; pts.len() * self.rows];
        for (x, o) in pts.iter().zip(out.chunks_exact_mut(self.rows)) {
            self.apply_into(x, o);
        }
        out
    }
}

/// `s = ceil(c_s · ε⁻² · ln(n/δ))`
pub fn plan_sketch_dim(n: usize, epsilon: f64, delta: f64, cal: &Calibration) -> usize {
    ((cal.c_s * (n as f64 / delta).ln() / (epsilon * epsilon)).ceil() as usize).max(1)
}

/// `k = min(ceil((d + ln(1/δ)) · ln(n·d)), cap)`
pub fn plan_ensemble_size(n: usize, d: usize, delta: f64, cal: &Calibration) -> usize {
    let raw = ((d as f64 + (1.0 / delta).ln()) * ((n * d) as f64).ln()).ceil();
    (raw.max(1.0) as usize).min(cal.jl_k_cap)
}

/// `l = ceil(c_l · ln(n/δ))`
pub fn plan_sample_count(n: usize, delta: f64, cal: &Calibration) -> usize {
    ((cal.c_l * (n as f64 / delta).ln()).ceil() as usize).max(1)
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// Serializable description from which an ensemble is regenerated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMeta {
    pub s: usize,
    pub d: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct SketchEnsemble {
    s: usize,
    d: usize,
    epsilon: f64,
    delta: f64,
    matrices: Vec<JlMatrix>,
}

impl SketchEnsemble {
    /// Plans `s` and `k_JL` from `(n, d, ε, δ)` and draws the matrices.
    pub fn build(n: usize, d: usize, epsilon: f64, delta: f64, seed: u64, k_override: Option<usize>) -> Result<Self> {
        Self::build_with(n, d, epsilon, delta, seed, k_override, None, defaults())
    }

    /// As [`build`](Self::build) with explicit sketch dimension and constants.
    #[allow(clippy::too_many_arguments)]
    pub fn build_with(
        n: usize,
        d: usize,
        epsilon: f64,
        delta: f64,
        seed: u64,
        k_override: Option<usize>,
        s_override: Option<usize>,
        cal: &Calibration,
    ) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::config("n and d must be positive"));
        }
        check_unit_interval("epsilon", epsilon)?;
        check_unit_interval("delta", delta)?;
        let k = k_override.unwrap_or_else(|| plan_ensemble_size(n, d, delta, cal));
        let s = s_override.unwrap_or_else(|| plan_sketch_dim(n, epsilon, delta, cal));
        if k == 0 || s == 0 {
            return Err(Error::config("ensemble size and sketch dimension must be positive"));
        }
        let seeds = (0..k as u64).map(|i| derive_seed(seed, i)).collect();
        Ok(Self::from_meta(&EnsembleMeta {
            s,
            d,
            epsilon,
            delta,
            seeds,
        }))
    }

    pub fn from_meta(meta: &EnsembleMeta) -> Self {
        let matrices = meta
            .seeds
            .iter()
            .map(|&sd| JlMatrix::generate(meta.s, meta.d, sd))
            .collect();
        Self {
            s: meta.s,
            d: meta.d,
            epsilon: meta.epsilon,
            delta: meta.delta,
            matrices,
        }
    }

    pub fn meta(&self) -> EnsembleMeta {
        EnsembleMeta {
            s: self.s,
            d: self.d,
            epsilon: self.epsilon,
            delta: self.delta,
            seeds: self.matrices.iter().map(|m| m.seed).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn sketch_dim(&self) -> usize {
        self.s
    }

    pub fn input_dim(&self) -> usize {
        self.d
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn matrix(&self, i: usize) -> &JlMatrix {
        &self.matrices[i]
    }

    pub fn matrices(&self) -> &[JlMatrix] {
        &self.matrices
    }

    /// One sketched point set per matrix.
    pub fn project_batch(&self, pts: &PointSet) -> Result<Vec<PointSet>> {
        check_dim(self.d, pts.dim())?;
        self.matrices
            .iter()
            .map(|m| PointSet::from_flat(self.s, m.apply_flat(pts)))
            .collect()
    }

    /// `l` matrix indices drawn uniformly with replacement.
    pub fn sample_matrices(&self, l: usize, rng: &mut StreamRng) -> Result<Vec<usize>> {
        if self.matrices.is_empty() {
            return Err(Error::config("ensemble is empty"));
        }
        Ok((0..l).map(|_| rng.below(self.matrices.len() as u64) as usize).collect())
    }

    fn preserved(&self, m: &JlMatrix, q: &[f64], v: &[f64], epsilon: f64, buf: &mut [f64]) -> bool {
        let diff: Vec<f64> = q.iter().zip(v).map(|(a, b)| a - b).collect();
        let exact = sq_norm(&diff);
        m.apply_into(&diff, buf);
        let est = sq_norm(buf);
        est >= (1.0 - epsilon) * exact - ALPHA && est <= (1.0 + epsilon) * exact + ALPHA
    }

    /// Smallest, over the points `v`, of the fraction of matrices with
    /// `‖S(q - v)‖² ∈ (1 ± ε)‖q - v‖² + α`.
    pub fn good_fraction(&self, q: &[f64], pts: &PointSet, epsilon: f64) -> Result<f64> {
        check_dim(self.d, q.len())?;
        check_dim(self.d, pts.dim())?;
        let mut counts = vec![0usize; pts.len()];
        let mut buf = vec![0.0; self.s];
        for m in &self.matrices {
            for (c, v) in counts.iter_mut().zip(pts.iter()) {
                if self.preserved(m, q, v, epsilon, &mut buf) {
                    *c += 1;
                }
            }
        }
        let min = counts.iter().copied().min().unwrap_or(self.len());
        Ok(min as f64 / self.len() as f64)
    }

    /// Fraction of matrices preserving every distance from `q` at once.
    pub fn strict_good_fraction(&self, q: &[f64], pts: &PointSet, epsilon: f64) -> Result<f64> {
        check_dim(self.d, q.len())?;
        check_dim(self.d, pts.dim())?;
        let mut buf = vec![0.0; self.s];
        let good = self
            .matrices
            .iter()
            .filter(|m| pts.iter().all(|v| self.preserved(m, q, v, epsilon, &mut buf)))
            .count();
        Ok(good as f64 / self.len() as f64)
    }
}
