//! Pilot sweeps that fix the planner constants in `calibration.json`.
//!
//! Every sweep is seeded, so rerunning with the same [`PilotConfig`]
//! reproduces the committed file.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::aipe::{envelope_holds, AipeIndex, AipeParams};
use crate::calibration::{defaults, Calibration};
use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::geometry::{PointSet, TransformPair};
use crate::instances::{planted_maxip, quadratic_instance, unit_vector};
use crate::linalg::{dot, sq_norm};
use crate::lsh::{collision_probability, default_bits, default_probe_budget, HashTables};
use crate::lsh_jl::{LshJlIndex, RobustMaxipParams};
use crate::rng::{derive_seed, StreamRng};
use crate::sketch::{JlMatrix, SketchEnsemble};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PilotConfig {
    pub seed: u64,
    pub jl: JlPilot,
    pub lsh: LshPilot,
    pub lsh_jl: LshJlPilot,
    pub aipe: AipePilot,
}

impl Default for PilotConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            jl: JlPilot::default(),
            lsh: LshPilot::default(),
            lsh_jl: LshJlPilot::default(),
            aipe: AipePilot::default(),
        }
    }
}

/// Smallest `s` such that `|‖Sx‖² - 1| ≤ ε` for at least `1 - δ` of random unit `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JlPilot {
    pub n: usize,
    pub d: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub matrices: usize,
    pub step: usize,
    pub max_s: usize,
}

impl Default for JlPilot {
    fn default() -> Self {
        Self {
            n: 500,
            d: 64,
            epsilon: 0.2,
            delta: 0.05,
            matrices: 8,
            step: 8,
            max_s: 2048,
        }
    }
}

/// Smallest `L` at `K = ceil(log₂ n)` reaching `target` recall on planted instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LshPilot {
    pub n: usize,
    pub d: usize,
    pub c: f64,
    pub tau: f64,
    pub planted_ip: f64,
    pub rest_max: f64,
    pub queries: usize,
    pub target: f64,
    pub max_l: usize,
}

impl Default for LshPilot {
    fn default() -> Self {
        Self {
            n: 1000,
            d: 32,
            c: 0.9,
            tau: 0.9,
            planted_ip: 0.9,
            rest_max: 0.3,
            queries: 100,
            target: 0.95,
            max_l: 96,
        }
    }
}

/// Smallest `l` whose candidate union leaves at most `δ/n` of the points
/// unvisited, for Frank-Wolfe queries on a lifted quadratic instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LshJlPilot {
    pub n: usize,
    pub d: usize,
    pub queries: usize,
    pub max_l: usize,
}

impl Default for LshJlPilot {
    fn default() -> Self {
        Self {
            n: 200,
            d: 50,
            queries: 50,
            max_l: 64,
        }
    }
}

/// Smallest odd subset `m`, with a pool of `3m` matrices, such that the
/// envelope holds for every point in at least `target` of fresh queries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AipePilot {
    pub n: usize,
    pub d: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub queries: usize,
    pub target: f64,
    pub max_m: usize,
}

impl Default for AipePilot {
    fn default() -> Self {
        Self {
            n: 500,
            d: 64,
            epsilon: 0.1,
            delta: 0.01,
            queries: 100,
            target: 0.99,
            max_m: 31,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: usize,
    pub score: f64,
}

fn unreachable(what: &str, history: &[SweepPoint]) -> Error {
    let best = history.iter().map(|p| p.score).fold(f64::NAN, f64::max);
    Error::Calibration(format!(
        "{what}: target not met; best score {best} over {} settings",
        history.len()
    ))
}

/// Returns `(s_min, c_s, history)`.
pub fn calibrate_jl(p: &JlPilot, seed: u64) -> Result<(usize, f64, Vec<SweepPoint>)> {
    let mut rng = StreamRng::new(seed, 10);
    let xs: Vec<Vec<f64>> = (0..p.n).map(|_| unit_vector(&mut rng, p.d)).collect();
    let mut history = Vec::new();
    let mut s = p.step;
    while s <= p.max_s {
        let mut good = 0usize;
        for k in 0..p.matrices {
            let m = JlMatrix::generate(s, p.d, derive_seed(seed, (s * 1000 + k) as u64));
            good += xs
                .iter()
                .filter(|x| (sq_norm(&m.apply(x)) - 1.0).abs() <= p.epsilon)
                .count();
        }
        let frac = good as f64 / (p.n * p.matrices) as f64;
        history.push(SweepPoint { value: s, score: frac });
        if frac >= 1.0 - p.delta {
            let c_s = s as f64 * p.epsilon * p.epsilon / (p.n as f64 / p.delta).ln();
            return Ok((s, c_s, history));
        }
        s += p.step;
    }
    Err(unreachable("JL sketch dimension", &history))
}

/// Returns `(L_min, c_lsh, history)`.
pub fn calibrate_lsh(p: &LshPilot, seed: u64) -> Result<(usize, f64, Vec<SweepPoint>)> {
    let k_bits = default_bits(p.n);
    let threshold = p.c * p.tau;
    // For each query: the number of tables needed before the planted point
    // is accepted, under the budget that each table count implies.
    let mut hits_at = vec![0usize; p.max_l + 1];
    for trial in 0..p.queries {
        let inst = planted_maxip(
            p.n,
            p.d,
            p.planted_ip,
            p.rest_max,
            derive_seed(seed, 100 + trial as u64),
        );
        let tables = HashTables::build(
            inst.points.as_flat(),
            p.d,
            k_bits,
            p.max_l,
            derive_seed(seed, trial as u64),
        );
        for (l, hits) in hits_at.iter_mut().enumerate().skip(1) {
            let mut seen = vec![false; p.n];
            let mut counters = Counters::default();
            let budget = default_probe_budget(p.n, k_bits, l);
            let found = tables.scan_prefix(&inst.query, l, budget, &mut seen, &mut counters, |i| {
                dot(&inst.query, inst.points.point(i)) >= threshold
            });
            if found.is_some() {
                *hits += 1;
            }
        }
    }
    let mut history = Vec::new();
    for (l, &h) in hits_at.iter().enumerate().skip(1) {
        let recall = h as f64 / p.queries as f64;
        history.push(SweepPoint {
            value: l,
            score: recall,
        });
        if recall >= p.target {
            let c_lsh = l as f64 * collision_probability(p.tau).powi(k_bits as i32) / 10f64.ln();
            return Ok((l, c_lsh, history));
        }
    }
    Err(unreachable("LSH table count", &history))
}

/// Random interior point and the lifted Frank-Wolfe query it induces.
fn fw_query(inst: &crate::instances::QuadraticInstance, pair: &TransformPair, rng: &mut StreamRng) -> Vec<f64> {
    let n = inst.points.len();
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.uniform()).ln()).collect();
    let total: f64 = raw.iter().sum();
    let w = inst
        .points
        .weighted_mean(&raw.iter().map(|x| x / total).collect::<Vec<_>>())
        .unwrap();
    let g: Vec<f64> = w.iter().zip(&inst.mu).map(|(a, b)| a - b).collect();
    pair.query(&g, &w).expect("radius covers the query")
}

/// Returns `(l_min, c_l, history)`.
pub fn calibrate_lsh_jl(p: &LshJlPilot, seed: u64, cal: &Calibration) -> Result<(usize, f64, Vec<SweepPoint>)> {
    let inst = quadratic_instance(p.n, p.d, seed);
    let g_bound = inst
        .points
        .iter()
        .map(|x| crate::linalg::dist(x, &inst.mu))
        .fold(0.0, f64::max);
    let pair = TransformPair::new(
        (1.0 + inst.points.max_radius()) * g_bound,
        TransformPair::data_radius_for(&inst.points),
    )?;
    let data = pair.data_set(&inst.points)?;
    let params = RobustMaxipParams::default();
    let idx = LshJlIndex::build_with(data, params.clone(), derive_seed(seed, 1), cal)?;
    let n = p.n;
    let mut uncovered_at = vec![0usize; p.max_l + 1];
    let mut qrng = StreamRng::new(seed, 11);
    for t in 0..p.queries {
        let q = fw_query(&inst, &pair, &mut qrng);
        let mut seen = vec![false; n];
        let mut counters = Counters::default();
        let mut srng = StreamRng::new(derive_seed(seed, 2), t as u64);
        let samples = idx.ensemble().sample_matrices(p.max_l, &mut srng)?;
        for (step, &i) in samples.iter().enumerate() {
            let lq = idx.lifted_query(i, &q);
            for j in 0..idx.kappa() {
                idx.sub_index(i, j)
                    .scan(&lq, idx.probe_budget(), &mut seen, &mut counters, |_| false);
            }
            uncovered_at[step + 1] += seen.iter().filter(|&&s| !s).count();
        }
    }
    let target = params.delta / n as f64;
    let mut history = Vec::new();
    for (l, &u) in uncovered_at.iter().enumerate().skip(1) {
        let frac = u as f64 / (n * p.queries) as f64;
        history.push(SweepPoint {
            value: l,
            score: 1.0 - frac,
        });
        if frac <= target {
            return Ok((l, l as f64 / (n as f64 / params.delta).ln(), history));
        }
    }
    Err(unreachable("LSH-JL sample count", &history))
}

/// Returns `(m_min, c_q, c_k, history)`.
pub fn calibrate_aipe(p: &AipePilot, seed: u64, cal: &Calibration) -> Result<(usize, f64, f64, Vec<SweepPoint>)> {
    let mut rng = StreamRng::new(seed, 12);
    let rows: Vec<Vec<f64>> = (0..p.n).map(|_| unit_vector(&mut rng, p.d)).collect();
    let pts = PointSet::from_rows(&rows)?;
    let queries: Vec<Vec<f64>> = (0..p.queries).map(|_| unit_vector(&mut rng, p.d)).collect();
    let exact: Vec<Vec<f64>> = queries
        .iter()
        .map(|q| rows.iter().map(|x| dot(x, q)).collect())
        .collect();
    let t = cal.ade_queries;
    let mut history = Vec::new();
    let mut m = 1;
    while m <= p.max_m {
        let params = AipeParams {
            pool_override: Some(3 * m),
            subset_override: Some(m),
            ..AipeParams::new(p.epsilon, p.delta)
        };
        let idx = AipeIndex::init_with(pts.clone(), &params, derive_seed(seed, m as u64), cal)?;
        let mut ok = 0usize;
        for (k, (q, ips)) in queries.iter().zip(&exact).enumerate() {
            let mut qr = StreamRng::new(derive_seed(seed, 3), k as u64);
            let est = idx.query(q, &mut qr)?;
            if est.entries.iter().all(|e| envelope_holds(e.w, ips[e.index], p.epsilon)) {
                ok += 1;
            }
        }
        let rate = ok as f64 / p.queries as f64;
        history.push(SweepPoint { value: m, score: rate });
        if rate >= p.target {
            let c_q = m as f64 / ((p.n * t) as f64 / p.delta).ln();
            let c_k = (3 * m) as f64 / ((p.n + t) as f64 / p.delta).ln();
            return Ok((m, c_q, c_k, history));
        }
        m += 2;
    }
    Err(unreachable("AIPE subset size", &history))
}

/// Runs every sweep in dependency order and returns the new constants.
pub fn run_pilot(p: &PilotConfig) -> Result<Calibration> {
    let base = defaults();
    let (s_min, c_s, jl_hist) = calibrate_jl(&p.jl, derive_seed(p.seed, 1))?;
    let (l_min, c_lsh, lsh_hist) = calibrate_lsh(&p.lsh, derive_seed(p.seed, 2))?;
    let staged = Calibration {
        c_s,
        c_lsh,
        ..base.clone()
    };
    let (samples, c_l, jl_lsh_hist) = calibrate_lsh_jl(&p.lsh_jl, derive_seed(p.seed, 3), &staged)?;
    let staged = Calibration { c_l, ..staged };
    let (m, c_q, c_k, aipe_hist) = calibrate_aipe(&p.aipe, derive_seed(p.seed, 4), &staged)?;
    let last = |h: &[SweepPoint]| h.last().map(|x| x.score).unwrap_or(f64::NAN);
    let reference = json!({
        "jl": { "pilot": p.jl, "s_min": s_min, "fraction": last(&jl_hist) },
        "lsh": {
            "pilot": p.lsh,
            "k_bits": default_bits(p.lsh.n),
            "l_tables": l_min,
            "probe_budget": default_probe_budget(p.lsh.n, default_bits(p.lsh.n), l_min),
            "recall": last(&lsh_hist),
        },
        "lsh_jl": { "pilot": p.lsh_jl, "samples": samples, "covered": last(&jl_lsh_hist) },
        "aipe": {
            "pilot": p.aipe,
            "subset": m,
            "pool": 3 * m,
            "sketch_dim": SketchEnsemble::build_with(p.aipe.n, p.aipe.d, p.aipe.epsilon, p.aipe.delta, 0, Some(1), None, &staged)?.sketch_dim(),
            "success": last(&aipe_hist),
        },
    });
    let cal = Calibration {
        c_q,
        c_k,
        reference,
        ..staged
    };
    cal.validate()?;
    Ok(cal)
}
