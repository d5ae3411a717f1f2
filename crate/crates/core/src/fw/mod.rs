//! Frank-Wolfe over the convex hull of a finite vertex set.
//!
//! [`fw_exact`] is the textbook method with an exact direction scan.
//! [`fw_accelerated`] replaces the scan by a threshold query against a
//! sketched MaxIP oracle on the lifted vertices and keeps a guess `r` of the
//! best lifted inner product: a miss halves `r` (without advancing `t`), and
//! a miss at `r ≤ ε/C` ends the run.

mod objective;
mod oracle;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use objective::{FnObjective, Objective, Quadratic};
pub use oracle::{build_oracle, AipeOracle, AipeOracleParams, DirectionOracle, ExactOracle, LshJlOracle, OracleKind};

use crate::counters::{Answer, Counters};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{check_finite, check_hull_weights, transform_direct_query, PointSet, TransformPair};
use crate::linalg::{dot, norm, sub};
use crate::rng::{derive_seed, StreamRng};

/// Starting iterate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Uniform weights.
    #[default]
    Centroid,
    /// A vertex drawn from the run seed.
    RandomVertex,
    /// A fixed vertex.
    Vertex(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FwConfig {
    pub epsilon: f64,
    pub c: f64,
    pub beta: f64,
    /// Hull diameter bound; the point set's own bound when absent.
    pub d_max: Option<f64>,
    pub max_iters: Option<usize>,
    pub oracle: OracleKind,
    pub r_init: f64,
    pub seed: u64,
    pub max_r_halvings: u32,
    pub init: Init,
    /// Constant in the iteration budget `T = ceil(C_T · β · D² / (c² ε))`.
    pub c_t: f64,
    /// On a miss, consult an exact scan before halving `r` (debugging only).
    pub fallback_exact: bool,
}

impl Default for FwConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            c: 0.9,
            beta: 1.0,
            d_max: None,
            max_iters: None,
            oracle: OracleKind::Exact,
            r_init: 1.0,
            seed: 0,
            max_r_halvings: 64,
            init: Init::Centroid,
            c_t: 2.0,
            fallback_exact: false,
        }
    }
}

impl FwConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.c > 0.0 && self.c <= 1.0) {
            return Err(Error::config(format!("c must lie in (0, 1], got {}", self.c)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::config(format!("beta must be positive, got {}", self.beta)));
        }
        if let Some(d) = self.d_max {
            if !(d > 0.0) {
                return Err(Error::config(format!("d_max must be positive, got {d}")));
            }
        }
        if !(self.r_init > 0.0) || !(self.c_t > 0.0) {
            return Err(Error::config("r_init and c_t must be positive"));
        }
        Ok(())
    }

    /// `min(max_iters, ceil(C_T · β · D² / (c² ε)))`
    pub fn iteration_budget(&self, d_max: f64) -> usize {
        let planned = (self.c_t * self.beta * d_max * d_max / (self.c * self.c * self.epsilon)).ceil();
        let planned = if planned.is_finite() {
            planned.max(1.0) as usize
        } else {
            usize::MAX
        };
        self.max_iters.map_or(planned, |m| m.min(planned))
    }
}

/// `η_t = 2 / (c (t + 2))`
pub fn step_size(c: f64, t: usize) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::config(format!("c must lie in (0, 1], got {c}")));
    }
    Ok(2.0 / (c * (t as f64 + 2.0)))
}

/// `⟨∇f(w), w - s⟩`
pub fn duality_gap(grad: &[f64], w: &[f64], s_star: &[f64]) -> Result<f64> {
    check_dim(grad.len(), w.len())?;
    check_dim(grad.len(), s_star.len())?;
    Ok(dot(grad, &sub(w, s_star)))
}

/// A convex combination of the vertices with its value cached.
#[derive(Clone, Debug, PartialEq)]
pub struct HullPoint {
    pub weights: Vec<f64>,
    pub value: Vec<f64>,
}

impl HullPoint {
    pub fn vertex(pts: &PointSet, i: usize) -> Self {
        let mut weights = vec![0.0; pts.len()];
        weights[i] = 1.0;
        Self {
            weights,
            value: pts.point(i).to_vec(),
        }
    }

    pub fn centroid(pts: &PointSet) -> Self {
        Self {
            weights: vec![1.0 / pts.len() as f64; pts.len()],
            value: pts.centroid(),
        }
    }

    /// `w ← (1 - η) w + η s_i`
    pub fn step_toward(&mut self, pts: &PointSet, i: usize, eta: f64) {
        for w in self.weights.iter_mut() {
            *w *= 1.0 - eta;
        }
        self.weights[i] += eta;
        for (v, x) in self.value.iter_mut().zip(pts.point(i)) {
            *v = (1.0 - eta) * *v + eta * x;
        }
    }

    /// Re-checks the weights and the cached value.
    pub fn verify(&self, pts: &PointSet) -> Result<()> {
        check_hull_weights(pts, &self.value, &self.weights)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Hit,
    Fail,
    Exact,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Hit => "hit",
            Outcome::Fail => "fail",
            Outcome::Exact => "exact",
        }
    }
}

/// One step `w_t → w_{t+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub t: usize,
    pub eta: f64,
    pub r: f64,
    pub outcome: Outcome,
    /// `f(w_t)`
    pub objective: f64,
    /// `⟨∇f(w_t), w_t - s_t⟩`
    pub gap_surrogate: f64,
    pub vertex: usize,
    /// Verified lifted inner product `⟨φ(w_t), ψ(s_t)⟩`.
    pub lifted_ip: f64,
    /// Scale `C = D_x D_y` in force at this step.
    pub scale: f64,
    /// Operations spent by the successful query.
    pub counters: Counters,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailEvent {
    pub t: usize,
    pub r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    /// A miss at `r ≤ ε / C`.
    Threshold,
    IterationBudget,
    ZeroGradient,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FwTrace {
    pub records: Vec<IterRecord>,
    pub fail_events: Vec<FailEvent>,
    pub reason: Convergence,
    pub budget: usize,
    pub final_objective: f64,
    pub counters: Counters,
    pub preprocess_secs: f64,
    pub solve_secs: f64,
}

impl FwTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn hit_rate(&self) -> f64 {
        let queries = self.records.len() + self.fail_events.len();
        if queries == 0 {
            return 1.0;
        }
        self.records.iter().filter(|r| r.outcome != Outcome::Fail).count() as f64 / queries as f64
    }

    /// Rows `t,eta,r,outcome,gap_surrogate,objective`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,eta,r,outcome,gap_surrogate,objective\n");
        for rec in &self.records {
            out.push_str(&format!(
                "{},{:e},{:e},{},{:e},{:e}\n",
                rec.t,
                rec.eta,
                rec.r,
                rec.outcome.as_str(),
                rec.gap_surrogate,
                rec.objective
            ));
        }
        for f in &self.fail_events {
            out.push_str(&format!("{},,{:e},fail,,\n", f.t, f.r));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct FwOutput {
    pub point: HullPoint,
    pub trace: FwTrace,
}

fn initial_point(pts: &PointSet, cfg: &FwConfig) -> Result<HullPoint> {
    Ok(match cfg.init {
        Init::Centroid => HullPoint::centroid(pts),
        Init::RandomVertex => {
            let mut rng = StreamRng::new(derive_seed(cfg.seed, 3), 0);
            HullPoint::vertex(pts, rng.below(pts.len() as u64) as usize)
        }
        Init::Vertex(i) if i < pts.len() => HullPoint::vertex(pts, i),
        Init::Vertex(i) => return Err(Error::Index(i)),
    })
}

/// Everything the loop needs about the lifted geometry.
struct Lifting {
    data_radius: f64,
    query_radius: f64,
}

impl Lifting {
    fn new(obj: &dyn Objective, pts: &PointSet, w0: &[f64]) -> Result<Self> {
        let data_radius = TransformPair::data_radius_for(pts);
        let g = match obj.gradient_norm_bound(pts) {
            Some(g) => g,
            None => 2.0 * norm(&obj.gradient(w0)),
        };
        let g = if g > 0.0 && g.is_finite() { g } else { 1.0 };
        Ok(Self {
            data_radius,
            query_radius: (1.0 + pts.max_radius()) * g,
        })
    }

    fn scale(&self) -> f64 {
        self.query_radius * self.data_radius
    }

    fn pair(&self) -> TransformPair {
        TransformPair {
            query_radius: self.query_radius,
            data_radius: self.data_radius,
        }
    }

    /// Doubles `D_x` until it covers `phi0`; returns the factor by which `C` grew.
    fn cover(&mut self, phi0: &[f64]) -> f64 {
        let need = norm(phi0);
        let mut factor = 1.0;
        while need > self.query_radius {
            self.query_radius *= 2.0;
            factor *= 2.0;
        }
        factor
    }
}

fn gradient_checked(obj: &dyn Objective, w: &[f64]) -> Result<Vec<f64>> {
    let g = obj.gradient(w);
    check_dim(w.len(), g.len())?;
    check_finite(&g)?;
    Ok(g)
}

fn lifted_data(pts: &PointSet, lift: &Lifting) -> Result<PointSet> {
    lift.pair().data_set(pts)
}

/// Exact Frank-Wolfe with `η_t = 2/(t+2)`.
pub fn fw_exact(obj: &dyn Objective, pts: &PointSet, cfg: &FwConfig) -> Result<FwOutput> {
    let cfg = FwConfig {
        c: 1.0,
        oracle: OracleKind::Exact,
        ..cfg.clone()
    };
    cfg.validate()?;
    let started = Instant::now();
    let mut point = initial_point(pts, &cfg)?;
    let mut lift = Lifting::new(obj, pts, &point.value)?;
    let oracle = ExactOracle::new(lifted_data(pts, &lift)?);
    let preprocess_secs = started.elapsed().as_secs_f64();
    let budget = cfg.iteration_budget(cfg.d_max.unwrap_or(pts.diameter_bound()));

    let started = Instant::now();
    let mut records = Vec::new();
    let mut counters = Counters::default();
    let mut reason = Convergence::IterationBudget;
    for t in 0..budget {
        let g = gradient_checked(obj, &point.value)?;
        if g.iter().all(|&x| x == 0.0) {
            reason = Convergence::ZeroGradient;
            break;
        }
        let phi0 = transform_direct_query(&g, &point.value)?;
        lift.cover(&phi0);
        let q = crate::geometry::transform_unit_query(&phi0, lift.query_radius)?;
        let ans = oracle.best(&q);
        counters += ans.counters;
        let i = ans.index.expect("exact scan always answers");
        let eta = step_size(1.0, t)?.min(1.0);
        records.push(IterRecord {
            t,
            eta,
            r: f64::NAN,
            outcome: Outcome::Exact,
            objective: obj.value(&point.value),
            gap_surrogate: duality_gap(&g, &point.value, pts.point(i))?,
            vertex: i,
            lifted_ip: ans.value,
            scale: lift.scale(),
            counters: ans.counters,
        });
        point.step_toward(pts, i, eta);
    }
    let trace = FwTrace {
        records,
        fail_events: Vec::new(),
        reason,
        budget,
        final_objective: obj.value(&point.value),
        counters,
        preprocess_secs,
        solve_secs: started.elapsed().as_secs_f64(),
    };
    Ok(FwOutput { point, trace })
}

/// Frank-Wolfe driven by threshold queries to the configured oracle.
pub fn fw_accelerated(obj: &dyn Objective, pts: &PointSet, cfg: &FwConfig) -> Result<FwOutput> {
    cfg.validate()?;
    let started = Instant::now();
    let mut point = initial_point(pts, cfg)?;
    let mut lift = Lifting::new(obj, pts, &point.value)?;
    let data = lifted_data(pts, &lift)?;
    let exact = cfg.fallback_exact.then(|| ExactOracle::new(data.clone()));
    let oracle = build_oracle(&cfg.oracle, data, derive_seed(cfg.seed, 2))?;
    let preprocess_secs = started.elapsed().as_secs_f64();
    let budget = cfg.iteration_budget(cfg.d_max.unwrap_or(pts.diameter_bound()));

    let started = Instant::now();
    let mut rng = StreamRng::new(derive_seed(cfg.seed, 1), 0);
    let mut records = Vec::new();
    let mut fail_events = Vec::new();
    let mut counters = Counters::default();
    let mut r = cfg.r_init;
    let mut halvings = 0u32;
    let mut t = 0usize;
    let mut reason = Convergence::IterationBudget;
    'outer: while t < budget {
        let g = gradient_checked(obj, &point.value)?;
        if g.iter().all(|&x| x == 0.0) {
            reason = Convergence::ZeroGradient;
            break;
        }
        let phi0 = transform_direct_query(&g, &point.value)?;
        r /= lift.cover(&phi0);
        let q = crate::geometry::transform_unit_query(&phi0, lift.query_radius)?;
        loop {
            let threshold = cfg.c * r;
            let mut ans = oracle.search(&q, threshold, &mut rng)?;
            counters += ans.counters;
            let mut outcome = Outcome::Hit;
            if ans.index.is_none() {
                if let Some(ex) = &exact {
                    let best: Answer = ex.search(&q, threshold, &mut rng)?;
                    counters += best.counters;
                    if best.index.is_some() {
                        ans = best;
                        outcome = Outcome::Exact;
                    }
                }
            }
            match ans.index {
                Some(i) => {
                    let eta = step_size(cfg.c, t)?.min(1.0);
                    records.push(IterRecord {
                        t,
                        eta,
                        r,
                        outcome,
                        objective: obj.value(&point.value),
                        gap_surrogate: duality_gap(&g, &point.value, pts.point(i))?,
                        vertex: i,
                        lifted_ip: ans.value,
                        scale: lift.scale(),
                        counters: ans.counters,
                    });
                    point.step_toward(pts, i, eta);
                    halvings = 0;
                    t += 1;
                    break;
                }
                None => {
                    fail_events.push(FailEvent { t, r });
                    if r <= cfg.epsilon / lift.scale() {
                        reason = Convergence::Threshold;
                        break 'outer;
                    }
                    r /= 2.0;
                    halvings += 1;
                    if halvings > cfg.max_r_halvings {
                        return Err(Error::Stall {
                            iteration: t,
                            halvings,
                            r,
                        });
                    }
                }
            }
        }
    }
    let trace = FwTrace {
        records,
        fail_events,
        reason,
        budget,
        final_objective: obj.value(&point.value),
        counters,
        preprocess_secs,
        solve_secs: started.elapsed().as_secs_f64(),
    };
    Ok(FwOutput { point, trace })
}

#[cfg(test)]
mod tests;
