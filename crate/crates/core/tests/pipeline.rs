//! The CLI pipeline end to end on small instances.

use std::path::Path;

use fwmips::experiment::{cmd_generate, cmd_report, cmd_run, load_planted, ExperimentSpec, ReportSpec};
use fwmips::linalg::dot;

fn spec(dir: &Path, scenario: &str, oracle: serde_json::Value, n: usize, d: usize) -> ExperimentSpec {
    serde_json::from_value(serde_json::json!({
        "scenario": scenario,
        "n": n, "d": d, "k": 16, "epsilon": 1e-2,
        "oracle": oracle, "seeds": [7, 8],
        "output_dir": dir,
    }))
    .unwrap()
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn generate_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let sa = ExperimentSpec {
        seeds: vec![7],
        ..spec(a.path(), "fw_quadratic", "exact".into(), 10, 4)
    };
    let sb = ExperimentSpec {
        output_dir: b.path().to_path_buf(),
        ..sa.clone()
    };
    cmd_generate(&sa).unwrap();
    cmd_generate(&sb).unwrap();
    for f in ["instances/seed-7.fwps", "planted/seed-7.fwps"] {
        assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{f}");
    }
}

#[test]
fn planted_instance_publishes_its_query() {
    let dir = tempfile::tempdir().unwrap();
    let m = cmd_generate(&spec(dir.path(), "fw_quadratic", "exact".into(), 50, 8)).unwrap();
    for inst in &m.instances {
        let pts = load_planted(dir.path(), &inst.planted).unwrap();
        let ip = dot(pts.point(inst.planted.index), &inst.planted.query);
        assert!((ip - 0.9).abs() < 1e-9);
        for (i, x) in pts.iter().enumerate() {
            if i != inst.planted.index {
                assert!(dot(x, &inst.planted.query) <= 0.3 + 1e-9);
            }
        }
    }
}

#[test]
fn herding_manifest_uses_uniform_weights() {
    let dir = tempfile::tempdir().unwrap();
    let m = cmd_generate(&spec(dir.path(), "herding", "lsh_jl".into(), 30, 3)).unwrap();
    let rel = m.instances[0].herding_spec.clone().unwrap();
    let text = std::fs::read_to_string(dir.path().join(&rel)).unwrap();
    let hs: fwmips::herding::HerdingSpec = serde_json::from_str(&text).unwrap();
    assert!(hs.weights.is_none());
    let inst = hs.load(&dir.path().join("instances")).unwrap();
    assert!(inst.weights.iter().all(|&p| (p - 1.0 / 30.0).abs() < 1e-15));
    assert_eq!(inst.mapped.dim(), 16);
}

#[test]
fn exact_counts_every_vertex_and_lsh_jl_counts_fewer() {
    let dir = tempfile::tempdir().unwrap();
    let (n, d) = (300, 16);
    let s = spec(dir.path(), "fw_quadratic", serde_json::json!(["exact", "lsh_jl"]), n, d);
    cmd_generate(&s).unwrap();
    let report = cmd_run(&s).unwrap();
    assert_eq!(report.exit_code(), 0);
    assert_eq!(report.runs.len(), 4);
    for r in &report.runs {
        assert!(r.ok(), "{:?}", r.error);
        let per_iter = r.counters.inner_product_macs as f64 / r.iterations as f64;
        if r.oracle == "exact" {
            assert_eq!(per_iter, (n * (d + 3)) as f64);
        } else {
            assert!(per_iter < (n * (d + 3)) as f64, "{per_iter}");
        }
    }
}

#[test]
fn reruns_reproduce_traces_and_reports_have_one_row_per_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let s = spec(
        dir.path(),
        "fw_quadratic",
        serde_json::json!(["exact", "lsh_jl", "aipe"]),
        60,
        8,
    );
    cmd_generate(&s).unwrap();
    cmd_run(&s).unwrap();
    let first: Vec<Vec<u8>> = ["exact", "lsh_jl", "aipe"]
        .iter()
        .map(|o| read(&dir.path().join(format!("runs/{o}-seed-7.csv"))))
        .collect();
    cmd_run(&s).unwrap();
    for (o, bytes) in ["exact", "lsh_jl", "aipe"].iter().zip(&first) {
        assert_eq!(&read(&dir.path().join(format!("runs/{o}-seed-7.csv"))), bytes, "{o}");
    }
    let rows = cmd_report(&ReportSpec::Experiment(Box::new(s.clone())), dir.path()).unwrap();
    assert_eq!(rows.len(), 3);
    let md = std::fs::read_to_string(dir.path().join("report.md")).unwrap();
    assert_eq!(md.lines().count(), 5);
    assert!(dir.path().join("summary.csv").exists());
    let exact = rows.iter().find(|r| r.oracle == "exact").unwrap();
    assert!(exact.slope.unwrap() < -0.85);

    let single = ExperimentSpec {
        oracle: serde_json::from_value(serde_json::json!("exact")).unwrap(),
        seeds: vec![7],
        ..s
    };
    let out = tempfile::tempdir().unwrap();
    let mut one = single.clone();
    one.output_dir = out.path().to_path_buf();
    cmd_generate(&one).unwrap();
    cmd_run(&one).unwrap();
    assert_eq!(
        cmd_report(&ReportSpec::Experiment(Box::new(one)), out.path())
            .unwrap()
            .len(),
        1
    );
}

#[test]
fn all_seeds_failing_gives_exit_code_one() {
    let dir = tempfile::tempdir().unwrap();
    // AIPE accepts ε only up to 0.1, so every seed errors at build time.
    let oracle = serde_json::json!({"kind": "aipe", "epsilon": 0.5, "delta": 0.01});
    let s = spec(dir.path(), "fw_quadratic", oracle, 20, 4);
    cmd_generate(&s).unwrap();
    let report = cmd_run(&s).unwrap();
    assert_eq!(report.exit_code(), 1);
    assert!(report.runs.iter().all(|r| r.error.is_some()));
}
