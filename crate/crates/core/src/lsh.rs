//! Random-hyperplane (sign) LSH over unit vectors.
//!
//! Each of the `L` tables concatenates `K` sign bits. A query walks the
//! buckets it lands in, table by table, and checks every candidate exactly,
//! so an answer is never a false positive; only recall is random.

use rayon::prelude::*;

use crate::calibration::{defaults, Calibration};
use crate::counters::{Answer, Counters};
use crate::error::{check_dim, Error, Result};
use crate::geometry::PointSet;
use crate::linalg::{dist, dot, norm};
use crate::rng::{derive_seed, StreamRng};

pub const UNIT_TOLERANCE: f64 = 1e-6;

/// Which of the two LSH trade-offs to report `ρ` for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoRegime {
    /// `ρ = 1/(2c̄² - 1)`
    FastQuery,
    /// `ρ = 2/c̄² - 1/c̄⁴`
    FastPreprocess,
}

pub fn plan_rho(c_bar: f64, regime: RhoRegime) -> Result<f64> {
    if !(c_bar > 1.0) {
        return Err(Error::config(format!("c_bar must exceed 1, got {c_bar}")));
    }
    let c2 = c_bar * c_bar;
    Ok(match regime {
        RhoRegime::FastQuery => 1.0 / (2.0 * c2 - 1.0),
        RhoRegime::FastPreprocess => 2.0 / c2 - 1.0 / (c2 * c2),
    })
}

/// Maps a `(c, τ)`-MaxIP instance on the sphere to `(c̄, r)`-ANN via
/// `‖a - b‖² = 2 - 2⟨a, b⟩`.
pub fn maxip_to_ann_params(c: f64, tau: f64) -> Result<(f64, f64)> {
    if !(c > 0.0 && c < 1.0 && tau > 0.0 && tau < 1.0) {
        return Err(Error::config(format!("need 0 < c, tau < 1, got c = {c}, tau = {tau}")));
    }
    let r = (2.0 - 2.0 * tau).sqrt();
    let c_bar = ((1.0 - c * tau) / (1.0 - tau)).sqrt();
    Ok((c_bar, r))
}

/// Probability that one random hyperplane does not separate two vectors
/// with cosine similarity `cos`.
pub fn collision_probability(cos: f64) -> f64 {
    1.0 - cos.clamp(-1.0, 1.0).acos() / std::f64::consts::PI
}

/// `K = ceil(log₂ n)`, kept in `1..=32`.
pub fn default_bits(n: usize) -> usize {
    let bits = usize::BITS - n.saturating_sub(1).leading_zeros();
    (bits as usize).clamp(1, 32)
}

/// `L = ceil(c_lsh · ln 10 / p(τ)^K)`: enough tables for recall 0.9 at
/// similarity `τ` when `c_lsh = 1`.
pub fn plan_tables(k_bits: usize, tau: f64, cal: &Calibration) -> usize {
    let p = collision_probability(tau).powi(k_bits as i32);
    ((cal.c_lsh * 10f64.ln() / p).ceil() as usize).max(1)
}

/// `4 · L · max(1, n / 2^K)`
pub fn default_probe_budget(n: usize, k_bits: usize, l_tables: usize) -> usize {
    let per_bucket = (n as f64 / (k_bits as f64).exp2()).max(1.0);
    (4.0 * l_tables as f64 * per_bucket).ceil() as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct LshParams {
    pub k_bits: usize,
    pub l_tables: usize,
    pub c_bar: f64,
    pub r: f64,
    pub seed: u64,
    pub probe_budget: usize,
}

impl LshParams {
    /// Planned parameters for `(c, τ)`-MaxIP over `n` points.
    pub fn for_maxip(n: usize, c: f64, tau: f64, seed: u64) -> Result<Self> {
        Self::for_maxip_with(n, c, tau, seed, defaults())
    }

    pub fn for_maxip_with(n: usize, c: f64, tau: f64, seed: u64, cal: &Calibration) -> Result<Self> {
        let (c_bar, r) = maxip_to_ann_params(c, tau)?;
        let k_bits = default_bits(n);
        let l_tables = plan_tables(k_bits, tau, cal);
        Ok(Self {
            k_bits,
            l_tables,
            c_bar,
            r,
            seed,
            probe_budget: default_probe_budget(n, k_bits, l_tables),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_bits == 0 || self.k_bits > 32 {
            return Err(Error::config(format!("K must lie in 1..=32, got {}", self.k_bits)));
        }
        if self.l_tables == 0 {
            return Err(Error::config("L must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Table {
    /// Sorted bucket keys, one entry per stored point.
    keys: Vec<u32>,
    /// Point index for each entry of `keys`.
    members: Vec<u32>,
}

impl Table {
    fn bucket(&self, key: u32) -> &[u32] {
        let lo = self.keys.partition_point(|&k| k < key);
        let hi = self.keys.partition_point(|&k| k <= key);
        &self.members[lo..hi]
    }
}

/// The hash tables alone, over a flat row-major set of unit vectors.
#[derive(Clone, Debug)]
pub struct HashTables {
    dim: usize,
    k_bits: usize,
    /// Hyperplanes per table, stored coordinate-major: entry `j·K + b` is
    /// coordinate `j` of plane `b`.
    planes: Vec<f64>,
    tables: Vec<Table>,
}

impl HashTables {
    pub fn build(flat: &[f64], dim: usize, k_bits: usize, l_tables: usize, seed: u64) -> Self {
        let n = flat.len() / dim;
        let tables: Vec<(Vec<f64>, Table)> = (0..l_tables as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = StreamRng::new(derive_seed(seed, t), 0);
                let mut rows = vec![0.0; k_bits * dim];
                rng.fill_normal(&mut rows);
                let mut planes = vec![0.0; k_bits * dim];
                for (b, row) in rows.chunks_exact(dim).enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        planes[j * k_bits + b] = v;
                    }
                }
                // `key << 32 | index` sorts by key, then by index.
                let mut entries: Vec<u64> = flat
                    .chunks_exact(dim)
                    .enumerate()
                    .map(|(i, x)| (hash_with(&planes, k_bits, x) as u64) << 32 | i as u64)
                    .collect();
                entries.sort_unstable();
                let keys = entries.iter().map(|&e| (e >> 32) as u32).collect();
                let members = entries.iter().map(|&e| e as u32).collect();
                (planes, Table { keys, members })
            })
            .collect();
        debug_assert!(tables.iter().all(|(_, t)| t.keys.len() == n));
        let mut planes = Vec::with_capacity(l_tables * k_bits * dim);
        let mut out = Vec::with_capacity(l_tables);
        for (p, t) in tables {
            planes.extend_from_slice(&p);
            out.push(t);
        }
        Self {
            dim,
            k_bits,
            planes,
            tables: out,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_tables(&self) -> usize {
        self.tables.len()
    }

    pub fn key(&self, table: usize, x: &[f64]) -> u32 {
        let span = self.k_bits * self.dim;
        hash_with(&self.planes[table * span..(table + 1) * span], self.k_bits, x)
    }

    pub fn bucket(&self, table: usize, key: u32) -> &[u32] {
        self.tables[table].bucket(key)
    }

    /// Heap bytes held by planes and tables.
    pub fn size_bytes(&self) -> usize {
        let entries: usize = self.tables.iter().map(|t| t.keys.len() + t.members.len()).sum();
        self.planes.len() * 8 + entries * 4
    }

    /// Walks buckets table by table, skipping points already in `seen`,
    /// until `accept` returns true or `budget` candidates have been tried.
    pub fn scan(
        &self,
        q: &[f64],
        budget: usize,
        seen: &mut [bool],
        counters: &mut Counters,
        accept: impl FnMut(usize) -> bool,
    ) -> Option<usize> {
        self.scan_prefix(q, self.tables.len(), budget, seen, counters, accept)
    }

    /// As [`scan`](Self::scan) over the first `tables` tables only.
    pub fn scan_prefix(
        &self,
        q: &[f64],
        tables: usize,
        budget: usize,
        seen: &mut [bool],
        counters: &mut Counters,
        mut accept: impl FnMut(usize) -> bool,
    ) -> Option<usize> {
        let mut tried = 0usize;
        for t in 0..tables.min(self.tables.len()) {
            if tried >= budget {
                break;
            }
            let key = self.key(t, q);
            counters.hash_macs += (self.k_bits * self.dim) as u64;
            counters.tables_probed += 1;
            for &m in self.bucket(t, key) {
                let i = m as usize;
                if seen[i] {
                    continue;
                }
                if tried >= budget {
                    return None;
                }
                seen[i] = true;
                tried += 1;
                counters.candidates_verified += 1;
                if accept(i) {
                    return Some(i);
                }
            }
        }
        None
    }
}

fn hash_with(planes: &[f64], k_bits: usize, x: &[f64]) -> u32 {
    // Fixed widths let the accumulators live in registers.
    match k_bits {
        8 => hash_fixed::<8>(planes, x),
        9 => hash_fixed::<9>(planes, x),
        10 => hash_fixed::<10>(planes, x),
        11 => hash_fixed::<11>(planes, x),
        12 => hash_fixed::<12>(planes, x),
        _ => {
            let mut acc = [0.0f64; 32];
            let acc = &mut acc[..k_bits];
            for (&xj, col) in x.iter().zip(planes.chunks_exact(k_bits)) {
                for (a, &p) in acc.iter_mut().zip(col) {
                    *a += xj * p;
                }
            }
            sign_bits(acc)
        }
    }
}

fn hash_fixed<const K: usize>(planes: &[f64], x: &[f64]) -> u32 {
    let mut acc = [0.0f64; K];
    for (&xj, col) in x.iter().zip(planes.chunks_exact(K)) {
        let col: &[f64; K] = col.try_into().expect("chunk of width K");
        for b in 0..K {
            acc[b] += xj * col[b];
        }
    }
    sign_bits(&acc)
}

fn sign_bits(acc: &[f64]) -> u32 {
    acc.iter()
        .enumerate()
        .fold(0u32, |key, (b, &v)| if v >= 0.0 { key | 1 << b } else { key })
}

pub(crate) fn check_unit(v: &[f64]) -> Result<()> {
    let nv = norm(v);
    if (nv - 1.0).abs() > UNIT_TOLERANCE {
        Err(Error::Norm { norm: nv })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LshIndex {
    params: LshParams,
    tables: HashTables,
    points: PointSet,
}

impl LshIndex {
    pub fn build(points: PointSet, params: LshParams) -> Result<Self> {
        params.validate()?;
        for p in points.iter() {
            check_unit(p)?;
        }
        let tables = HashTables::build(
            points.as_flat(),
            points.dim(),
            params.k_bits,
            params.l_tables,
            params.seed,
        );
        Ok(Self { params, tables, points })
    }

    pub fn params(&self) -> &LshParams {
        &self.params
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn tables(&self) -> &HashTables {
        &self.tables
    }

    fn probe(&self, q: &[f64], accept: impl Fn(&[f64]) -> Option<f64>) -> Result<Answer> {
        check_dim(self.points.dim(), q.len())?;
        check_unit(q)?;
        let mut seen = vec![false; self.points.len()];
        let mut counters = Counters::default();
        let mut value = f64::NAN;
        let found = self
            .tables
            .scan(
                q,
                self.params.probe_budget,
                &mut seen,
                &mut counters,
                |i| match accept(self.points.point(i)) {
                    Some(v) => {
                        value = v;
                        true
                    }
                    None => false,
                },
            );
        counters.inner_product_macs += counters.candidates_verified * self.points.dim() as u64;
        Ok(match found {
            Some(i) => Answer::hit(i, value, counters),
            None => Answer::miss(counters),
        })
    }

    /// First candidate within `c̄ · r` of `q`; the answer's value is the distance.
    pub fn query_ann(&self, q: &[f64], r: f64) -> Result<Answer> {
        let limit = self.params.c_bar * r;
        self.probe(q, |y| {
            let d = dist(q, y);
            (d <= limit).then_some(d)
        })
    }

    /// First candidate with `⟨q, y⟩ ≥ c·τ`; the answer's value is that inner product.
    pub fn query_maxip(&self, q: &[f64], c: f64, tau: f64) -> Result<Answer> {
        maxip_to_ann_params(c, tau)?;
        let threshold = c * tau;
        self.probe(q, |y| {
            let ip = dot(q, y);
            (ip >= threshold).then_some(ip)
        })
    }

    /// Distinct candidates in probe order, ignoring the budget.
    pub fn candidate_stream(&self, q: &[f64], max: usize) -> Vec<usize> {
        let mut seen = vec![false; self.points.len()];
        let mut out = Vec::new();
        let mut counters = Counters::default();
        self.tables.scan(q, max, &mut seen, &mut counters, |i| {
            out.push(i);
            false
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(rng: &mut StreamRng, d: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        let nv = norm(&v);
        v.into_iter().map(|x| x / nv).collect()
    }

    /// Unit vector with inner product exactly `ip` against unit `q`.
    fn at_ip(rng: &mut StreamRng, q: &[f64], ip: f64) -> Vec<f64> {
        let u = unit(rng, q.len());
        let proj = dot(&u, q);
        let mut perp: Vec<f64> = u.iter().zip(q).map(|(a, b)| a - proj * b).collect();
        let np = norm(&perp);
        perp.iter_mut().for_each(|x| *x /= np);
        q.iter()
            .zip(&perp)
            .map(|(a, b)| ip * a + (1.0 - ip * ip).sqrt() * b)
            .collect()
    }

    #[test]
    fn rho_formulas() {
        let s2 = 2f64.sqrt();
        assert!((plan_rho(s2, RhoRegime::FastPreprocess).unwrap() - 0.75).abs() < 1e-12);
        assert!((plan_rho(s2, RhoRegime::FastQuery).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(plan_rho(1e6, RhoRegime::FastQuery).unwrap() < 1e-11);
        assert!(plan_rho(1e6, RhoRegime::FastPreprocess).unwrap() < 1e-11);
        assert!(plan_rho(1.0, RhoRegime::FastQuery).is_err());
    }

    #[test]
    fn maxip_reduction() {
        let (c_bar, r) = maxip_to_ann_params(0.5, 0.5).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
        assert!((c_bar - 1.5f64.sqrt()).abs() < 1e-15);
        let (c_bar, _) = maxip_to_ann_params(1.0 - 1e-12, 0.7).unwrap();
        assert!(c_bar - 1.0 < 1e-6);
        assert!(maxip_to_ann_params(1.0, 0.5).is_err());
        assert!(maxip_to_ann_params(0.5, 0.0).is_err());
    }

    #[test]
    fn bits_and_budget() {
        assert_eq!(default_bits(1), 1);
        assert_eq!(default_bits(2), 1);
        assert_eq!(default_bits(200), 8);
        assert_eq!(default_bits(256), 8);
        assert_eq!(default_bits(257), 9);
        assert_eq!(default_probe_budget(200, 8, 10), 40);
        assert_eq!(default_probe_budget(2000, 8, 10), 313);
    }

    #[test]
    fn single_point_index() {
        let mut rng = StreamRng::new(1, 0);
        let x = unit(&mut rng, 5);
        let params = LshParams {
            k_bits: 3,
            l_tables: 4,
            c_bar: 1.5,
            r: 0.5,
            seed: 2,
            probe_budget: 10,
        };
        let idx = LshIndex::build(PointSet::from_rows(std::slice::from_ref(&x)).unwrap(), params).unwrap();
        for t in 0..4 {
            assert_eq!(idx.tables().bucket(t, idx.tables().key(t, &x)), &[0]);
        }
        let ans = idx.query_ann(&x, 1e-6).unwrap();
        assert_eq!(ans.index, Some(0));
        assert_eq!(idx.query_maxip(&x, 0.9, 0.9).unwrap().index, Some(0));
    }

    #[test]
    fn rejects_non_unit_points() {
        let params = LshParams {
            k_bits: 1,
            l_tables: 1,
            c_bar: 2.0,
            r: 0.1,
            seed: 0,
            probe_budget: 1,
        };
        let pts = PointSet::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(matches!(LshIndex::build(pts, params), Err(Error::Norm { .. })));
    }

    #[test]
    fn antipodal_points_split() {
        let mut rng = StreamRng::new(2, 0);
        let x = unit(&mut rng, 6);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let pts = PointSet::from_rows(&[x.clone(), neg]).unwrap();
        for seed in 0..100 {
            let params = LshParams {
                k_bits: 1,
                l_tables: 1,
                c_bar: 2.0,
                r: 0.1,
                seed,
                probe_budget: 2,
            };
            let idx = LshIndex::build(pts.clone(), params).unwrap();
            let t = idx.tables();
            assert_ne!(t.key(0, pts.point(0)), t.key(0, pts.point(1)));
        }
    }

    #[test]
    fn orthogonal_query_with_tiny_radius_misses() {
        let pts = PointSet::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let params = LshParams {
            k_bits: 1,
            l_tables: 8,
            c_bar: 1.5,
            r: 1e-3,
            seed: 4,
            probe_budget: 100,
        };
        let idx = LshIndex::build(pts, params).unwrap();
        assert_eq!(idx.query_ann(&[0.0, 0.0, 1.0], 1e-3).unwrap().index, None);
        assert_eq!(idx.query_maxip(&[0.0, 0.0, 1.0], 0.9, 0.9).unwrap().index, None);
    }

    #[test]
    fn planted_recall_at_half_distance() {
        // Distance 0.5 on the sphere is inner product 0.875.
        let mut hits = 0;
        for trial in 0..100u64 {
            let mut rng = StreamRng::new(100 + trial, 0);
            let q = unit(&mut rng, 16);
            let mut rows = vec![at_ip(&mut rng, &q, 0.875)];
            rows.extend((0..200).map(|_| unit(&mut rng, 16)));
            let params = LshParams {
                k_bits: 12,
                l_tables: 32,
                c_bar: 1.5,
                r: 0.5,
                seed: trial,
                probe_budget: 10_000,
            };
            let idx = LshIndex::build(PointSet::from_rows(&rows).unwrap(), params).unwrap();
            if idx.candidate_stream(&q, usize::MAX).contains(&0) {
                hits += 1;
            }
        }
        assert!(hits >= 95, "{hits}");
    }

    #[test]
    fn more_tables_never_shrink_candidates() {
        let mut rng = StreamRng::new(3, 0);
        let rows: Vec<Vec<f64>> = (0..300).map(|_| unit(&mut rng, 10)).collect();
        let pts = PointSet::from_rows(&rows).unwrap();
        let q = unit(&mut rng, 10);
        let mk = |l| {
            let params = LshParams {
                k_bits: 6,
                l_tables: l,
                c_bar: 1.5,
                r: 0.5,
                seed: 77,
                probe_budget: 1,
            };
            let mut c = LshIndex::build(pts.clone(), params)
                .unwrap()
                .candidate_stream(&q, usize::MAX);
            c.sort_unstable();
            c
        };
        let small = mk(4);
        let big = mk(9);
        assert!(small.iter().all(|i| big.binary_search(i).is_ok()));
    }

    #[test]
    fn answers_are_verified() {
        let mut rng = StreamRng::new(5, 0);
        let rows: Vec<Vec<f64>> = (0..500).map(|_| unit(&mut rng, 8)).collect();
        let idx = LshIndex::build(
            PointSet::from_rows(&rows).unwrap(),
            LshParams::for_maxip(500, 0.5, 0.6, 1).unwrap(),
        )
        .unwrap();
        for _ in 0..50 {
            let q = unit(&mut rng, 8);
            let a = idx.query_maxip(&q, 0.5, 0.6).unwrap();
            if let Some(i) = a.index {
                assert!(dot(&q, idx.points().point(i)) >= 0.3);
                assert_eq!(a.value, dot(&q, idx.points().point(i)));
            }
            assert!(a.counters.candidates_verified <= idx.params().probe_budget as u64);
        }
    }
}
