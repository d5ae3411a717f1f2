//! generate → run → report in a temporary directory, as the CLI does it.
//!
//! `cargo run --release --example experiment_pipeline`

use fwmips::experiment::{cmd_generate, cmd_report, cmd_run, ExperimentSpec, ReportSpec};

fn main() -> fwmips::Result<()> {
    let dir = std::env::temp_dir().join("fwmips-pipeline");
    let spec: ExperimentSpec = serde_json::from_value(serde_json::json!({
        "scenario": "fw_quadratic",
        "n": 100, "d": 20, "epsilon": 1e-3,
        "oracle": ["exact", "lsh_jl", "aipe"],
        "seeds": [1, 2],
        "output_dir": dir,
    }))?;
    let manifest = cmd_generate(&spec)?;
    println!("{} instances under {}", manifest.instances.len(), dir.display());
    let report = cmd_run(&spec)?;
    println!("{} runs, exit code {}", report.runs.len(), report.exit_code());
    cmd_report(&ReportSpec::Experiment(Box::new(spec)), &dir)?;
    print!(
        "{}",
        std::fs::read_to_string(dir.join("report.md")).map_err(|e| fwmips::Error::io(dir.join("report.md"), e))?
    );
    Ok(())
}
