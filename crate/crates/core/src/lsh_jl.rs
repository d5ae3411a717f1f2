//! Adaptive-query-robust MaxIP: `k_JL` Gaussian sketches, `κ` LSH indexes
//! per sketch, and per-query random sketch sampling with grid quantization.
//!
//! Data are sketched and re-lifted onto the unit sphere of `ℝ^{s+2}` before
//! hashing. A query samples `l` sketches with replacement, rounds its sketch
//! to a `λ/√s` grid, and walks the `κ` indexes of each sampled sketch.
//! Every candidate is checked against the exact inner product in the
//! original space.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{defaults, Calibration};
use crate::counters::{Answer, Counters};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{transform_unit_data, transform_unit_query, PointSet};
use crate::linalg::{dot, norm};
use crate::lsh::{check_unit, default_bits, default_probe_budget, maxip_to_ann_params, plan_tables, HashTables};
use crate::rng::{derive_seed, StreamRng};
use crate::sketch::{plan_sample_count, SketchEnsemble};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RobustMaxipParams {
    pub epsilon: f64,
    pub delta: f64,
    pub c: f64,
    pub tau: f64,
    pub lambda: f64,
    pub alpha: f64,
    /// Constant in `λ̃ = C_λ̃ · √((1-cτ)/(1-τ)) · (λ + α)`.
    pub c_lambda_tilde: f64,
    pub kappa: Option<usize>,
    pub l: Option<usize>,
    pub k_jl: Option<usize>,
    pub sketch_dim: Option<usize>,
    pub k_bits: Option<usize>,
    pub l_tables: Option<usize>,
    pub probe_budget: Option<usize>,
}

impl Default for RobustMaxipParams {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            delta: 0.1,
            c: 0.9,
            tau: 0.9,
            lambda: 0.01,
            alpha: 1e-9,
            c_lambda_tilde: 4.0,
            kappa: None,
            l: None,
            k_jl: None,
            sketch_dim: None,
            k_bits: None,
            l_tables: None,
            probe_budget: None,
        }
    }
}

impl RobustMaxipParams {
    pub fn validate(&self) -> Result<()> {
        maxip_to_ann_params(self.c, self.tau)?;
        if !(self.lambda > 0.0) || !(self.alpha >= 0.0) || !(self.c_lambda_tilde >= 0.0) {
            return Err(Error::config(
                "lambda must be positive; alpha and C_lambda_tilde nonnegative",
            ));
        }
        if [
            self.kappa,
            self.l,
            self.k_jl,
            self.sketch_dim,
            self.k_bits,
            self.l_tables,
        ]
        .contains(&Some(0))
        {
            return Err(Error::config("robust MaxIP sizes must be positive"));
        }
        Ok(())
    }

    /// `λ̃ = C_λ̃ · √((1-cτ)/(1-τ)) · (λ + α)`
    pub fn lambda_tilde(&self) -> f64 {
        self.c_lambda_tilde * ((1.0 - self.c * self.tau) / (1.0 - self.tau)).sqrt() * (self.lambda + self.alpha)
    }

    /// Acceptance threshold `(1-ε)cτ - λ̃` of a robust query.
    pub fn threshold(&self) -> f64 {
        (1.0 - self.epsilon) * self.c * self.tau - self.lambda_tilde()
    }
}

/// `κ = min(ceil(s · ln(n·s/(λ·δ))), cap)`
pub fn plan_kappa(n: usize, s: usize, lambda: f64, delta: f64, cap: usize) -> usize {
    let raw = (s as f64 * ((n * s) as f64 / (lambda * delta)).ln()).ceil();
    (raw.max(1.0) as usize).min(cap)
}

/// Rounds every coordinate to the nearest multiple of `λ/√dim`.
pub fn quantize_query(q: &[f64], lambda: f64) -> Vec<f64> {
    let step = lambda / (q.len() as f64).sqrt();
    q.iter().map(|x| (x / step).round() * step).collect()
}

/// Lifts a sketched query onto the sphere at its own radius.
fn lift_query(v: &[f64]) -> Vec<f64> {
    let r = norm(v);
    let radius = if r > 0.0 { r } else { 1.0 };
    transform_unit_query(v, radius).expect("radius covers the vector")
}

#[derive(Clone, Debug)]
pub struct LshJlIndex {
    params: RobustMaxipParams,
    ensemble: SketchEnsemble,
    /// `k_JL · κ` indexes; entry `i·κ + j` is copy `j` over sketch `i`.
    sub_indexes: Vec<HashTables>,
    data_radii: Vec<f64>,
    points: PointSet,
    kappa: usize,
    l: usize,
    k_bits: usize,
    l_tables: usize,
    probe_budget: usize,
    seed: u64,
}

impl LshJlIndex {
    pub fn build_robust(points: PointSet, params: RobustMaxipParams, seed: u64) -> Result<Self> {
        Self::build_with(points, params, seed, defaults())
    }

    pub fn build_with(points: PointSet, params: RobustMaxipParams, seed: u64, cal: &Calibration) -> Result<Self> {
        params.validate()?;
        for p in points.iter() {
            check_unit(p)?;
        }
        let n = points.len();
        let ensemble = SketchEnsemble::build_with(
            n,
            points.dim(),
            params.epsilon,
            params.delta,
            seed,
            params.k_jl,
            params.sketch_dim,
            cal,
        )?;
        let s = ensemble.sketch_dim();
        let kappa = params
            .kappa
            .unwrap_or_else(|| plan_kappa(n, s, params.lambda, params.delta, cal.kappa_cap));
        let l = params.l.unwrap_or_else(|| plan_sample_count(n, params.delta, cal));
        let k_bits = params.k_bits.unwrap_or_else(|| default_bits(n));
        let l_tables = params.l_tables.unwrap_or_else(|| plan_tables(k_bits, params.tau, cal));
        let probe_budget = params
            .probe_budget
            .unwrap_or_else(|| default_probe_budget(n, k_bits, l_tables));

        let built: Vec<(f64, Vec<HashTables>)> = ensemble
            .matrices()
            .par_iter()
            .enumerate()
            .map(|(i, m)| {
                let sketched = m.apply_flat(&points);
                let radius = sketched.chunks_exact(s).map(norm).fold(0.0, f64::max);
                let radius = if radius > 0.0 { radius } else { 1.0 };
                let mut lifted = Vec::with_capacity(n * (s + 2));
                for y in sketched.chunks_exact(s) {
                    lifted.extend(transform_unit_data(y, radius).expect("radius is the maximum norm"));
                }
                let tables = (0..kappa)
                    .map(|j| HashTables::build(&lifted, s + 2, k_bits, l_tables, sub_seed(seed, i, j, kappa)))
                    .collect();
                (radius, tables)
            })
            .collect();
        let mut data_radii = Vec::with_capacity(built.len());
        let mut sub_indexes = Vec::with_capacity(built.len() * kappa);
        for (r, t) in built {
            data_radii.push(r);
            sub_indexes.extend(t);
        }
        Ok(Self {
            params,
            ensemble,
            sub_indexes,
            data_radii,
            points,
            kappa,
            l,
            k_bits,
            l_tables,
            probe_budget,
            seed,
        })
    }

    pub fn params(&self) -> &RobustMaxipParams {
        &self.params
    }

    pub fn ensemble(&self) -> &SketchEnsemble {
        &self.ensemble
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn samples_per_query(&self) -> usize {
        self.l
    }

    pub fn bits(&self) -> usize {
        self.k_bits
    }

    pub fn tables_per_index(&self) -> usize {
        self.l_tables
    }

    pub fn probe_budget(&self) -> usize {
        self.probe_budget
    }

    pub fn data_radius(&self, sketch: usize) -> f64 {
        self.data_radii[sketch]
    }

    /// Seed of the hash tables of copy `j` over sketch `i`.
    pub fn sub_index_seed(&self, i: usize, j: usize) -> u64 {
        sub_seed(self.seed, i, j, self.kappa)
    }

    pub fn sub_index(&self, i: usize, j: usize) -> &HashTables {
        &self.sub_indexes[i * self.kappa + j]
    }

    /// Heap bytes held by all sub-indexes.
    pub fn size_bytes(&self) -> usize {
        self.sub_indexes.iter().map(HashTables::size_bytes).sum()
    }

    /// Sketch `i` of `q`, quantized and lifted onto the sphere of `ℝ^{s+2}`.
    pub fn lifted_query(&self, i: usize, q: &[f64]) -> Vec<f64> {
        lift_query(&quantize_query(&self.ensemble.matrix(i).apply(q), self.params.lambda))
    }

    fn walk(
        &self,
        q: &[f64],
        rng: &mut StreamRng,
        budget: usize,
        mut accept: impl FnMut(usize) -> bool,
    ) -> Result<(Option<usize>, Counters)> {
        check_dim(self.points.dim(), q.len())?;
        check_unit(q)?;
        let mut counters = Counters::default();
        let mut seen = vec![false; self.points.len()];
        let s = self.ensemble.sketch_dim();
        for i in self.ensemble.sample_matrices(self.l, rng)? {
            let lifted = self.lifted_query(i, q);
            counters.sketch_macs += (s * q.len()) as u64;
            counters.sketches_sampled += 1;
            for j in 0..self.kappa {
                counters.sub_indexes_probed += 1;
                let found = self
                    .sub_index(i, j)
                    .scan(&lifted, budget, &mut seen, &mut counters, &mut accept);
                if found.is_some() {
                    return Ok((found, counters));
                }
            }
        }
        Ok((None, counters))
    }

    /// First candidate whose exact inner product with `q` reaches `threshold`.
    pub fn probe(&self, q: &[f64], threshold: f64, rng: &mut StreamRng) -> Result<Answer> {
        let mut value = f64::NAN;
        let (found, mut counters) = self.walk(q, rng, self.probe_budget, |i| {
            let ip = dot(q, self.points.point(i));
            value = ip;
            ip >= threshold
        })?;
        counters.inner_product_macs += counters.candidates_verified * q.len() as u64;
        Ok(match found {
            Some(i) => Answer::hit(i, value, counters),
            None => Answer::miss(counters),
        })
    }

    /// Robust `(c, τ, λ̃)`-MaxIP query at threshold `(1-ε)cτ - λ̃`.
    pub fn query_max_robust(&self, q: &[f64], rng: &mut StreamRng) -> Result<Answer> {
        self.probe(q, self.params.threshold(), rng)
    }

    /// Distinct candidates in probe order, without a budget or threshold.
    pub fn candidate_stream(&self, q: &[f64], rng: &mut StreamRng, max: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        self.walk(q, rng, usize::MAX, |i| {
            out.push(i);
            out.len() >= max
        })?;
        Ok(out)
    }
}

fn sub_seed(seed: u64, i: usize, j: usize, kappa: usize) -> u64 {
    derive_seed(derive_seed(seed, u64::MAX), (i * kappa + j) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsh::{LshIndex, LshParams};

    fn unit(rng: &mut StreamRng, d: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        let nv = norm(&v);
        v.into_iter().map(|x| x / nv).collect()
    }

    fn small_params() -> RobustMaxipParams {
        RobustMaxipParams {
            k_jl: Some(8),
            kappa: Some(2),
            ..RobustMaxipParams::default()
        }
    }

    #[test]
    fn threshold_formula() {
        let p = RobustMaxipParams::default();
        let lt = 4.0 * (0.19f64 / 0.1).sqrt() * (0.01 + 1e-9);
        assert!((p.lambda_tilde() - lt).abs() < 1e-15);
        assert!((p.threshold() - (0.5 * 0.81 - lt)).abs() < 1e-15);
        assert_eq!(plan_kappa(200, 26, 0.01, 0.1, 16), 16);
        assert_eq!(plan_kappa(1, 1, 1.0, 0.5, 16), 1);
    }

    #[test]
    fn quantization() {
        let mut rng = StreamRng::new(1, 0);
        for _ in 0..1000 {
            let q: Vec<f64> = (0..10).map(|_| rng.normal()).collect();
            let qq = quantize_query(&q, 0.05);
            assert!(crate::linalg::dist(&q, &qq) <= 0.025 + 1e-15);
            assert_eq!(quantize_query(&qq, 0.05), qq);
        }
        let q = [0.1, -0.2, 0.05];
        let coarse = 2.0 * 0.2 * 3f64.sqrt() * 1.01;
        assert!(quantize_query(&q, coarse).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn self_query_and_verification() {
        let mut rng = StreamRng::new(2, 0);
        let rows: Vec<Vec<f64>> = (0..100).map(|_| unit(&mut rng, 12)).collect();
        let idx = LshJlIndex::build_robust(PointSet::from_rows(&rows).unwrap(), small_params(), 4).unwrap();
        let mut qrng = StreamRng::new(3, 0);
        let a = idx.query_max_robust(&rows[17], &mut qrng).unwrap();
        let i = a.index.expect("self query");
        assert!(dot(&rows[17], &rows[i]) >= idx.params().threshold());
        assert!(idx.probe(&rows[17], 1.5, &mut qrng).unwrap().index.is_none());
        assert!(matches!(idx.probe(&[1.0; 12], 0.0, &mut qrng), Err(Error::Norm { .. })));
    }

    #[test]
    fn size_scales_with_sub_index_count() {
        let mut rng = StreamRng::new(5, 0);
        let rows: Vec<Vec<f64>> = (0..64).map(|_| unit(&mut rng, 8)).collect();
        let idx = LshJlIndex::build_robust(PointSet::from_rows(&rows).unwrap(), small_params(), 1).unwrap();
        let one = idx.sub_index(0, 0).size_bytes() as f64;
        let total = idx.size_bytes() as f64;
        let expect = one * (idx.ensemble().len() * idx.kappa()) as f64;
        assert!((total - expect).abs() <= 0.1 * expect);
    }

    #[test]
    fn degenerate_configuration_matches_plain_lsh() {
        let mut rng = StreamRng::new(6, 0);
        let d = 10;
        let rows: Vec<Vec<f64>> = (0..80).map(|_| unit(&mut rng, d)).collect();
        let pts = PointSet::from_rows(&rows).unwrap();
        let params = RobustMaxipParams {
            k_jl: Some(1),
            kappa: Some(1),
            l: Some(1),
            lambda: 1e-12,
            sketch_dim: Some(d),
            epsilon: 0.05,
            ..RobustMaxipParams::default()
        };
        let idx = LshJlIndex::build_robust(pts.clone(), params, 8).unwrap();
        let m = idx.ensemble().matrix(0);
        let r = idx.data_radius(0);
        let lifted: Vec<Vec<f64>> = rows
            .iter()
            .map(|x| transform_unit_data(&m.apply(x), r).unwrap())
            .collect();
        let plain = LshIndex::build(
            PointSet::from_rows(&lifted).unwrap(),
            LshParams {
                k_bits: idx.bits(),
                l_tables: idx.tables_per_index(),
                c_bar: 1.5,
                r: 0.5,
                seed: idx.sub_index_seed(0, 0),
                probe_budget: usize::MAX,
            },
        )
        .unwrap();
        for t in 0..20 {
            let q = unit(&mut rng, d);
            let lq = lift_query(&quantize_query(&m.apply(&q), 1e-12));
            let mut qrng = StreamRng::new(t, 0);
            assert_eq!(
                idx.candidate_stream(&q, &mut qrng, usize::MAX).unwrap(),
                plain.candidate_stream(&lq, usize::MAX)
            );
        }
    }

    #[test]
    fn quantization_stability() {
        let mut rng = StreamRng::new(7, 0);
        let rows: Vec<Vec<f64>> = (0..60).map(|_| unit(&mut rng, 8)).collect();
        let idx = LshJlIndex::build_robust(PointSet::from_rows(&rows).unwrap(), small_params(), 2).unwrap();
        let mut checked = 0;
        for t in 0..30 {
            let q1 = unit(&mut rng, 8);
            let noise: Vec<f64> = (0..8).map(|_| rng.normal() * 1e-7).collect();
            let q2: Vec<f64> = q1.iter().zip(&noise).map(|(a, b)| a + b).collect();
            let n2 = norm(&q2);
            let q2: Vec<f64> = q2.iter().map(|x| x / n2).collect();
            let same_grid = idx.ensemble().matrices().iter().all(|m| {
                quantize_query(&m.apply(&q1), idx.params().lambda) == quantize_query(&m.apply(&q2), idx.params().lambda)
            });
            if same_grid {
                checked += 1;
                let a = idx
                    .candidate_stream(&q1, &mut StreamRng::new(t, 1), usize::MAX)
                    .unwrap();
                let b = idx
                    .candidate_stream(&q2, &mut StreamRng::new(t, 1), usize::MAX)
                    .unwrap();
                assert_eq!(a, b);
            }
        }
        assert!(checked >= 20);
    }
}
