//! Direction oracles over the lifted vertex set `ψ(S)`.
//!
//! A search receives the unit query `φ(w_t)` and a threshold and returns a
//! vertex whose exact lifted inner product reaches the threshold, or a miss.

use serde::{Deserialize, Serialize};

use crate::aipe::{AipeIndex, AipeParams};
use crate::calibration::defaults;
use crate::counters::{Answer, Counters};
use crate::error::Result;
use crate::geometry::PointSet;
use crate::linalg::{argmax, dot};
use crate::lsh_jl::{LshJlIndex, RobustMaxipParams};
use crate::rng::StreamRng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleKind {
    Exact,
    LshJl(RobustMaxipParams),
    Aipe(AipeOracleParams),
}

impl OracleKind {
    pub fn name(&self) -> &'static str {
        match self {
            OracleKind::Exact => "exact",
            OracleKind::LshJl(_) => "lsh_jl",
            OracleKind::Aipe(_) => "aipe",
        }
    }

    pub fn lsh_jl_default() -> Self {
        OracleKind::LshJl(RobustMaxipParams::default())
    }

    pub fn aipe_default() -> Self {
        OracleKind::Aipe(AipeOracleParams::default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AipeOracleParams {
    #[serde(flatten)]
    pub params: AipeParams,
    /// Cap on exact checks per search, taken in order of estimated
    /// distance; all live points when absent.
    #[serde(default)]
    pub verify_budget: Option<usize>,
}

impl Default for AipeOracleParams {
    fn default() -> Self {
        Self {
            params: AipeParams::new(0.1, 0.01),
            verify_budget: None,
        }
    }
}

pub trait DirectionOracle {
    /// A vertex with exact `⟨q, ψ(s)⟩ ≥ threshold`, if the oracle finds one.
    fn search(&self, q: &[f64], threshold: f64, rng: &mut StreamRng) -> Result<Answer>;
}

/// Full scan over the lifted vertices; the argmax wins, ties to the smallest index.
pub struct ExactOracle {
    data: PointSet,
}

impl ExactOracle {
    pub fn new(data: PointSet) -> Self {
        Self { data }
    }

    pub fn best(&self, q: &[f64]) -> Answer {
        let (i, v) = argmax(self.data.iter().map(|y| dot(q, y))).expect("non-empty vertex set");
        let n = self.data.len() as u64;
        let counters = Counters {
            inner_product_macs: n * self.data.dim() as u64,
            candidates_verified: n,
            ..Counters::default()
        };
        Answer::hit(i, v, counters)
    }
}

impl DirectionOracle for ExactOracle {
    fn search(&self, q: &[f64], threshold: f64, _rng: &mut StreamRng) -> Result<Answer> {
        let best = self.best(q);
        Ok(if best.value >= threshold {
            best
        } else {
            Answer::miss(best.counters)
        })
    }
}

pub struct LshJlOracle {
    index: LshJlIndex,
}

impl LshJlOracle {
    pub fn build(data: PointSet, params: RobustMaxipParams, seed: u64) -> Result<Self> {
        Ok(Self {
            index: LshJlIndex::build_robust(data, params, seed)?,
        })
    }

    pub fn index(&self) -> &LshJlIndex {
        &self.index
    }
}

impl DirectionOracle for LshJlOracle {
    fn search(&self, q: &[f64], threshold: f64, rng: &mut StreamRng) -> Result<Answer> {
        self.index.probe(q, threshold, rng)
    }
}

/// Walks the estimates from nearest to farthest and returns the first
/// vertex whose exact lifted inner product reaches the threshold.
pub struct AipeOracle {
    index: AipeIndex,
    verify_budget: Option<usize>,
}

impl AipeOracle {
    pub fn build(data: PointSet, params: &AipeOracleParams, seed: u64) -> Result<Self> {
        Ok(Self {
            index: AipeIndex::init_with(data, &params.params, seed, defaults())?,
            verify_budget: params.verify_budget,
        })
    }

    pub fn index(&self) -> &AipeIndex {
        &self.index
    }
}

impl DirectionOracle for AipeOracle {
    fn search(&self, q: &[f64], threshold: f64, rng: &mut StreamRng) -> Result<Answer> {
        let est = self.index.query(q, rng)?;
        let mut order = est.entries;
        let mut counters = est.counters;
        order.sort_unstable_by(|a, b| a.distance.total_cmp(&b.distance).then(a.index.cmp(&b.index)));
        let budget = self.verify_budget.unwrap_or(order.len());
        let pts = self.index.points();
        for e in order.iter().take(budget) {
            let ip = dot(q, pts.point(e.index));
            counters.candidates_verified += 1;
            counters.inner_product_macs += q.len() as u64;
            if ip >= threshold {
                return Ok(Answer::hit(e.index, ip, counters));
            }
        }
        Ok(Answer::miss(counters))
    }
}

pub fn build_oracle(kind: &OracleKind, data: PointSet, seed: u64) -> Result<Box<dyn DirectionOracle>> {
    Ok(match kind {
        OracleKind::Exact => Box::new(ExactOracle::new(data)),
        OracleKind::LshJl(p) => Box::new(LshJlOracle::build(data, p.clone(), seed)?),
        OracleKind::Aipe(p) => Box::new(AipeOracle::build(data, p, seed)?),
    })
}
