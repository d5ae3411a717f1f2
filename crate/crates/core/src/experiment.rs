//! The generate → run → report pipeline behind the `fwmips` binary.
//!
//! Layout of an output directory:
//!
//! ```text
//! manifest.json              spec echo plus per-seed instance metadata
//! instances/seed-<s>.fwps    vertices (raw data for herding)
//! instances/seed-<s>.json    herding instance spec
//! planted/seed-<s>.fwps      planted MaxIP points; query in the manifest
//! runs/<oracle>-seed-<s>.csv trace
//! runs/<oracle>-seed-<s>.json per-run summary
//! report.json                aggregate
//! report.md, summary.csv     written by `report`
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibrate::{run_pilot, PilotConfig};
use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::fw::{fw_accelerated, fw_exact, FwConfig, FwOutput, Init, OracleKind, Quadratic};
use crate::geometry::PointSet;
use crate::herding::{herding_accelerated, loglog_slope, FeatureMap, HerdingSpec};
use crate::instances::{gaussian_vector, planted_maxip, quadratic_instance};
use crate::linalg::dot;
use crate::lsh_jl::RobustMaxipParams;
use crate::pointset_io::{read_fwps, write_fwps};
use crate::rng::{derive_seed, StreamRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    FwQuadratic,
    Herding,
}

/// An oracle given by name (`"exact"`, `"lsh_jl"`, `"aipe"`) or in full.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OracleChoice {
    Name(String),
    Full(OracleKind),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

fn default_k() -> usize {
    64
}

fn default_c() -> f64 {
    0.9
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("fwmips-out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub n: usize,
    pub d: usize,
    /// Feature dimension of the herding scenario.
    #[serde(default = "default_k")]
    pub k: usize,
    pub epsilon: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_c")]
    pub tau: f64,
    pub oracle: OneOrMany<OracleChoice>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub fallback_exact: bool,
    /// Planted inner product of the MaxIP instance written by `generate`.
    #[serde(default)]
    pub planted_ip: Option<f64>,
}

impl ExperimentSpec {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: Self = serde_json::from_str(&text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("seeds must be nonempty"));
        }
        if self.n < 3 || self.d == 0 || self.k == 0 {
            return Err(Error::config("need n ≥ 3 and positive d, k"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::config("epsilon must be positive"));
        }
        if !(self.c > 0.0 && self.c <= 1.0) || !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::config("c and tau must lie in (0, 1]"));
        }
        if let Some(ip) = self.planted_ip {
            if !(ip.abs() <= 1.0) {
                return Err(Error::config("planted_ip must lie in [-1, 1]"));
            }
        }
        let oracles = self.oracles()?;
        let mut names: Vec<&str> = oracles.iter().map(|o| o.name()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("each oracle kind may appear once"));
        }
        Ok(())
    }

    /// The oracle list with names resolved; `c` and `tau` feed the LSH-JL planner.
    pub fn oracles(&self) -> Result<Vec<OracleKind>> {
        self.oracle
            .to_vec()
            .into_iter()
            .map(|o| match o {
                OracleChoice::Full(k) => Ok(k),
                OracleChoice::Name(s) => match s.as_str() {
                    "exact" => Ok(OracleKind::Exact),
                    "lsh_jl" => Ok(OracleKind::LshJl(RobustMaxipParams {
                        c: self.c,
                        tau: self.tau,
                        ..RobustMaxipParams::default()
                    })),
                    "aipe" => Ok(OracleKind::aipe_default()),
                    other => Err(Error::config(format!("unknown oracle {other:?}"))),
                },
            })
            .collect()
    }

    pub fn fw_config(&self, oracle: &OracleKind, seed: u64) -> FwConfig {
        FwConfig {
            epsilon: self.epsilon,
            c: self.c,
            oracle: oracle.clone(),
            seed,
            max_iters: self.max_iters,
            fallback_exact: self.fallback_exact,
            init: match self.scenario {
                Scenario::FwQuadratic => Init::Centroid,
                // The uniform-weight centroid is the target itself.
                Scenario::Herding => Init::RandomVertex,
            },
            ..FwConfig::default()
        }
    }
}

/// Worker pool capped by `FWMIPS_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("FWMIPS_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("FWMIPS_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Error::config("FWMIPS_THREADS must be positive"));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::config(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedInstance {
    pub seed: u64,
    pub points: PathBuf,
    /// Quadratic target; absent for herding, whose target follows from the data.
    pub mu: Option<Vec<f64>>,
    pub support: Option<[usize; 3]>,
    pub herding_spec: Option<PathBuf>,
    pub planted: PlantedRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedRecord {
    pub points: PathBuf,
    pub query: Vec<f64>,
    pub index: usize,
    pub ip: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: ExperimentSpec,
    pub instances: Vec<SeedInstance>,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Writes every seed's instance and the manifest under `spec.output_dir`.
pub fn cmd_generate(spec: &ExperimentSpec) -> Result<Manifest> {
    spec.validate()?;
    let out = &spec.output_dir;
    create_dir(&out.join("instances"))?;
    create_dir(&out.join("planted"))?;
    let mut instances = Vec::with_capacity(spec.seeds.len());
    for &seed in &spec.seeds {
        let rel = PathBuf::from(format!("instances/seed-{seed}.fwps"));
        let mut rec = SeedInstance {
            seed,
            points: rel.clone(),
            mu: None,
            support: None,
            herding_spec: None,
            planted: write_planted(spec, seed)?,
        };
        match spec.scenario {
            Scenario::FwQuadratic => {
                let inst = quadratic_instance(spec.n, spec.d, seed);
                write_fwps(&out.join(&rel), &inst.points)?;
                rec.mu = Some(inst.mu);
                rec.support = Some(inst.support);
            }
            Scenario::Herding => {
                let mut rng = StreamRng::new(seed, 0);
                let rows: Vec<Vec<f64>> = (0..spec.n).map(|_| gaussian_vector(&mut rng, spec.d, 1.0)).collect();
                write_fwps(&out.join(&rel), &PointSet::from_rows(&rows)?)?;
                let hs = HerdingSpec {
                    data: PathBuf::from(format!("seed-{seed}.fwps")),
                    feature_map: FeatureMap::RandomFourier {
                        bandwidth: None,
                        feature_dim: spec.k,
                        seed: derive_seed(seed, 7),
                    },
                    weights: None,
                };
                let hrel = PathBuf::from(format!("instances/seed-{seed}.json"));
                write_json(&out.join(&hrel), &hs)?;
                rec.herding_spec = Some(hrel);
            }
        }
        instances.push(rec);
    }
    let manifest = Manifest {
        spec: spec.clone(),
        instances,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

fn write_planted(spec: &ExperimentSpec, seed: u64) -> Result<PlantedRecord> {
    let ip = spec.planted_ip.unwrap_or(0.9);
    let p = planted_maxip(spec.n, spec.d, ip, 0.3, derive_seed(seed, 5));
    let rel = PathBuf::from(format!("planted/seed-{seed}.fwps"));
    write_fwps(&spec.output_dir.join(&rel), &p.points)?;
    Ok(PlantedRecord {
        points: rel,
        query: p.query,
        index: p.planted,
        ip,
    })
}

/// Reloads a planted instance and checks the published inner product.
pub fn load_planted(out: &Path, rec: &PlantedRecord) -> Result<PointSet> {
    let pts = read_fwps(&out.join(&rec.points))?;
    let got = dot(pts.point(rec.index), &rec.query);
    if (got - rec.ip).abs() > 1e-9 {
        return Err(Error::format(
            out.join(&rec.points),
            format!("planted inner product {got}, expected {}", rec.ip),
        ));
    }
    Ok(pts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub oracle: String,
    pub seed: u64,
    pub error: Option<String>,
    pub preprocess_secs: f64,
    pub mean_iter_secs: f64,
    pub iterations: usize,
    pub final_gap: f64,
    pub hit_rate: f64,
    pub reason: Option<String>,
    pub counters: Counters,
    pub macs_per_iter: f64,
    /// Log-log slope of the objective gap over `t ≥ 10`.
    pub slope: Option<f64>,
    pub trace: Option<PathBuf>,
}

impl RunEntry {
    fn failed(oracle: &str, seed: u64, e: &Error) -> Self {
        Self {
            oracle: oracle.to_string(),
            seed,
            error: Some(e.to_string()),
            preprocess_secs: 0.0,
            mean_iter_secs: 0.0,
            iterations: 0,
            final_gap: f64::NAN,
            hit_rate: 0.0,
            reason: None,
            counters: Counters::default(),
            macs_per_iter: 0.0,
            slope: None,
            trace: None,
        }
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub spec: ExperimentSpec,
    pub runs: Vec<RunEntry>,
}

impl RunReport {
    /// 0 if any run succeeded, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.runs.iter().any(RunEntry::ok) {
            0
        } else {
            1
        }
    }
}

/// Slope of `ln f(w_t)` against `ln t` from `t = 10` on; `f* = 0` in both scenarios.
pub fn gap_slope(out: &FwOutput) -> Option<f64> {
    let mut gaps: Vec<f64> = out.trace.records.iter().map(|r| r.objective).collect();
    gaps.push(out.trace.final_objective);
    // `gaps[t]` is the value before step `t`; index so that entry `t-1` is `t`.
    let shifted: Vec<f64> = gaps.into_iter().skip(1).collect();
    loglog_slope(&shifted, 10, shifted.len())
}

fn run_one(spec: &ExperimentSpec, inst: &SeedInstance, oracle: &OracleKind) -> Result<FwOutput> {
    let out = &spec.output_dir;
    let cfg = spec.fw_config(oracle, inst.seed);
    match spec.scenario {
        Scenario::FwQuadratic => {
            let pts = read_fwps(&out.join(&inst.points))?;
            let mu = inst
                .mu
                .clone()
                .ok_or_else(|| Error::config("manifest lacks the quadratic target"))?;
            let obj = Quadratic::new(mu);
            match oracle {
                OracleKind::Exact => fw_exact(&obj, &pts, &cfg),
                _ => fw_accelerated(&obj, &pts, &cfg),
            }
        }
        Scenario::Herding => {
            let rel = inst
                .herding_spec
                .as_ref()
                .ok_or_else(|| Error::config("manifest lacks the herding spec"))?;
            let path = out.join(rel);
            let hs: HerdingSpec = read_json(&path)?;
            let h = hs.load(path.parent().unwrap_or(out))?;
            match oracle {
                OracleKind::Exact => fw_exact(&h.objective(), &h.mapped, &FwConfig { beta: 1.0, ..cfg }),
                _ => herding_accelerated(&h, &cfg),
            }
        }
    }
}

fn summarize(spec: &ExperimentSpec, inst: &SeedInstance, oracle: &OracleKind, res: Result<FwOutput>) -> RunEntry {
    let name = oracle.name();
    let out = match res {
        Ok(o) => o,
        Err(e) => return RunEntry::failed(name, inst.seed, &e),
    };
    let tr = &out.trace;
    let iters = tr.iterations();
    let rel = PathBuf::from(format!("runs/{name}-seed-{}.csv", inst.seed));
    if let Err(e) = std::fs::write(spec.output_dir.join(&rel), tr.to_csv()) {
        return RunEntry::failed(name, inst.seed, &Error::io(spec.output_dir.join(&rel), e));
    }
    RunEntry {
        oracle: name.to_string(),
        seed: inst.seed,
        error: None,
        preprocess_secs: tr.preprocess_secs,
        mean_iter_secs: if iters > 0 { tr.solve_secs / iters as f64 } else { 0.0 },
        iterations: iters,
        final_gap: tr.final_objective,
        hit_rate: tr.hit_rate(),
        reason: Some(format!("{:?}", tr.reason)),
        counters: tr.counters,
        macs_per_iter: if iters > 0 {
            tr.counters.total_macs() as f64 / iters as f64
        } else {
            0.0
        },
        slope: matches!(oracle, OracleKind::Exact).then(|| gap_slope(&out)).flatten(),
        trace: Some(rel),
    }
}

/// Runs every oracle on every seed. Solver errors become per-run entries.
pub fn cmd_run(spec: &ExperimentSpec) -> Result<RunReport> {
    spec.validate()?;
    let out = &spec.output_dir;
    let manifest_path = out.join("manifest.json");
    if !manifest_path.exists() {
        return Err(Error::config(format!(
            "{} not found; run `generate` first",
            manifest_path.display()
        )));
    }
    let manifest: Manifest = read_json(&manifest_path)?;
    let by_seed: BTreeMap<u64, &SeedInstance> = manifest.instances.iter().map(|i| (i.seed, i)).collect();
    let instances: Vec<&SeedInstance> = spec
        .seeds
        .iter()
        .map(|s| {
            by_seed
                .get(s)
                .copied()
                .ok_or_else(|| Error::config(format!("seed {s} missing from manifest")))
        })
        .collect::<Result<_>>()?;
    let oracles = spec.oracles()?;
    create_dir(&out.join("runs"))?;
    let jobs: Vec<(&OracleKind, &SeedInstance)> = oracles
        .iter()
        .flat_map(|o| instances.iter().map(move |&i| (o, i)))
        .collect();
    let pool = thread_pool()?;
    let runs: Vec<RunEntry> = pool.install(|| {
        jobs.par_iter()
            .map(|&(o, i)| summarize(spec, i, o, run_one(spec, i, o)))
            .collect()
    });
    for r in runs.iter().filter(|r| r.ok()) {
        write_json(&out.join(format!("runs/{}-seed-{}.json", r.oracle, r.seed)), r)?;
    }
    let report = RunReport {
        spec: spec.clone(),
        runs,
    };
    write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

/// Pilot settings plus where to write `calibration.json`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CalibrateSpec {
    #[serde(flatten)]
    pub pilot: PilotConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

pub fn cmd_calibrate(spec: &CalibrateSpec) -> Result<PathBuf> {
    let cal = run_pilot(&spec.pilot)?;
    let dir = spec.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    create_dir(&dir)?;
    let path = dir.join("calibration.json");
    write_json(&path, &cal)?;
    Ok(path)
}

/// One row per oracle, averaged over its successful seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub oracle: String,
    pub seeds_ok: usize,
    pub seeds_total: usize,
    pub preprocess_secs: f64,
    pub mean_iter_secs: f64,
    pub iterations: f64,
    pub final_gap: f64,
    pub hit_rate: f64,
    pub macs_per_iter: f64,
    pub slope: Option<f64>,
}

pub fn summarize_runs(runs: &[RunEntry]) -> Vec<ReportRow> {
    let mut order: Vec<&str> = Vec::new();
    for r in runs {
        if !order.contains(&r.oracle.as_str()) {
            order.push(&r.oracle);
        }
    }
    order
        .into_iter()
        .map(|name| {
            let all: Vec<&RunEntry> = runs.iter().filter(|r| r.oracle == name).collect();
            let ok: Vec<&RunEntry> = all.iter().copied().filter(|r| r.ok()).collect();
            let mean = |f: &dyn Fn(&RunEntry) -> f64| {
                if ok.is_empty() {
                    f64::NAN
                } else {
                    ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
                }
            };
            let slopes: Vec<f64> = ok.iter().filter_map(|r| r.slope).collect();
            ReportRow {
                oracle: name.to_string(),
                seeds_ok: ok.len(),
                seeds_total: all.len(),
                preprocess_secs: mean(&|r| r.preprocess_secs),
                mean_iter_secs: mean(&|r| r.mean_iter_secs),
                iterations: mean(&|r| r.iterations as f64),
                final_gap: mean(&|r| r.final_gap),
                hit_rate: mean(&|r| r.hit_rate),
                macs_per_iter: mean(&|r| r.macs_per_iter),
                slope: (!slopes.is_empty()).then(|| slopes.iter().sum::<f64>() / slopes.len() as f64),
            }
        })
        .collect()
}

pub fn render_markdown(rows: &[ReportRow]) -> String {
    let mut s = String::from(
        "| oracle | seeds ok | preprocess (s) | per-iter (s) | iterations | final gap | hit rate | MACs/iter | slope |\n\
         |---|---|---|---|---|---|---|---|---|\n",
    );
    for r in rows {
        s.push_str(&format!(
            "| {} | {}/{} | {:.3} | {:.2e} | {:.1} | {:.3e} | {:.3} | {:.0} | {} |\n",
            r.oracle,
            r.seeds_ok,
            r.seeds_total,
            r.preprocess_secs,
            r.mean_iter_secs,
            r.iterations,
            r.final_gap,
            r.hit_rate,
            r.macs_per_iter,
            r.slope.map_or("".to_string(), |x| format!("{x:.3}")),
        ));
    }
    s
}

/// Run directories to summarize: either `{"runs": [...]}` or an experiment spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportSpec {
    Dirs { runs: Vec<PathBuf> },
    Experiment(Box<ExperimentSpec>),
}

impl ReportSpec {
    pub fn dirs(&self) -> Vec<PathBuf> {
        match self {
            ReportSpec::Dirs { runs } => runs.clone(),
            ReportSpec::Experiment(e) => vec![e.output_dir.clone()],
        }
    }
}

/// Writes `report.md` and `summary.csv` into `out` and returns the rows.
pub fn cmd_report(spec: &ReportSpec, out: &Path) -> Result<Vec<ReportRow>> {
    let dirs = spec.dirs();
    let missing: Vec<String> = dirs
        .iter()
        .map(|d| d.join("report.json"))
        .filter(|p| !p.exists())
        .map(|p| p.display().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::config(format!("missing run reports: {}", missing.join(", "))));
    }
    let mut runs = Vec::new();
    for d in &dirs {
        let rep: RunReport = read_json(&d.join("report.json"))?;
        runs.extend(rep.runs);
    }
    let rows = summarize_runs(&runs);
    create_dir(out)?;
    let md = out.join("report.md");
    std::fs::write(&md, render_markdown(&rows)).map_err(|e| Error::io(&md, e))?;
    let path = out.join("summary.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| Error::format(&path, e.to_string()))?;
    for r in &rows {
        w.serialize(r).map_err(|e| Error::format(&path, e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(dir: &Path, oracle: &str) -> ExperimentSpec {
        serde_json::from_value(serde_json::json!({
            "scenario": "fw_quadratic",
            "n": 10, "d": 4, "epsilon": 1e-2,
            "oracle": oracle, "seeds": [7],
            "output_dir": dir,
        }))
        .unwrap()
    }

    #[test]
    fn oracle_names_resolve() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = spec(dir.path(), "lsh_jl");
        s.tau = 0.8;
        match &s.oracles().unwrap()[0] {
            OracleKind::LshJl(p) => assert_eq!(p.tau, 0.8),
            other => panic!("{other:?}"),
        }
        s.oracle = OneOrMany::One(OracleChoice::Name("brute".into()));
        assert!(matches!(s.validate(), Err(Error::Config(_))));
        s.oracle = OneOrMany::Many(vec![
            OracleChoice::Name("exact".into()),
            OracleChoice::Full(OracleKind::Exact),
        ]);
        assert!(s.validate().is_err());
    }

    #[test]
    fn full_oracle_objects_parse() {
        let v = serde_json::json!([{"kind": "aipe", "epsilon": 0.1, "delta": 0.01}, "exact"]);
        let o: OneOrMany<OracleChoice> = serde_json::from_value(v).unwrap();
        assert_eq!(o.to_vec().len(), 2);
    }

    #[test]
    fn empty_seeds_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = spec(dir.path(), "exact");
        s.seeds.clear();
        assert!(matches!(cmd_generate(&s), Err(Error::Config(_))));
    }

    #[test]
    fn run_without_generate_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(cmd_run(&spec(dir.path(), "exact")), Err(Error::Config(_))));
    }

    #[test]
    fn report_lists_missing_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let rs = ReportSpec::Dirs {
            runs: vec![dir.path().join("a"), dir.path().join("b")],
        };
        let err = cmd_report(&rs, dir.path()).unwrap_err().to_string();
        assert!(err.contains("a/report.json") && err.contains("b/report.json"), "{err}");
    }

    #[test]
    fn markdown_has_a_row_per_oracle() {
        let mk = |o: &str, seed| RunEntry {
            slope: Some(-1.0),
            ..RunEntry::failed(o, seed, &Error::EmptyIndex)
        };
        let mut a = mk("exact", 1);
        a.error = None;
        let rows = summarize_runs(&[a, mk("aipe", 1), mk("exact", 2)]);
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].seeds_ok, rows[0].seeds_total), (1, 2));
        assert_eq!(render_markdown(&rows).lines().count(), 4);
    }
}
