use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fwmips::experiment::{cmd_calibrate, cmd_generate, cmd_report, cmd_run, CalibrateSpec, ExperimentSpec, ReportSpec};
use fwmips::Error;

#[derive(Parser)]
#[command(name = "fwmips", about = "Frank-Wolfe over point hulls with sketched MaxIP oracles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// JSON spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Output directory, overriding the spec.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Consult an exact scan whenever the oracle misses.
    #[arg(long)]
    fallback_exact: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write instances and a manifest.
    Generate(Common),
    /// Rerun the pilot sweeps and write calibration.json.
    Calibrate(Common),
    /// Run every oracle on every seed.
    Run(Common),
    /// Summarize run directories as markdown and CSV.
    Report(Common),
}

fn load_experiment(c: &Common) -> fwmips::Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::from_path(&c.spec)?;
    if let Some(out) = &c.out {
        spec.output_dir = out.clone();
    }
    spec.fallback_exact |= c.fallback_exact;
    Ok(spec)
}

fn read_spec<T: for<'de> serde::Deserialize<'de>>(c: &Common) -> fwmips::Result<T> {
    let text = std::fs::read_to_string(&c.spec).map_err(|e| Error::io(&c.spec, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Generate(c) => load_experiment(c).and_then(|s| cmd_generate(&s)).map(|m| {
            println!(
                "wrote {} instances to {}",
                m.instances.len(),
                m.spec.output_dir.display()
            );
            0
        }),
        Cmd::Run(c) => load_experiment(c).and_then(|s| cmd_run(&s)).map(|r| {
            for e in &r.runs {
                match &e.error {
                    None => println!(
                        "{} seed {}: gap {:.3e} after {} iterations",
                        e.oracle, e.seed, e.final_gap, e.iterations
                    ),
                    Some(msg) => println!("{} seed {}: error: {msg}", e.oracle, e.seed),
                }
            }
            r.exit_code()
        }),
        Cmd::Calibrate(c) => read_spec::<CalibrateSpec>(c).and_then(|mut s| {
            if c.out.is_some() {
                s.output_dir = c.out.clone();
            }
            let path = cmd_calibrate(&s)?;
            println!("wrote {}", path.display());
            Ok(0)
        }),
        Cmd::Report(c) => read_spec::<ReportSpec>(c).and_then(|s| {
            let out = c.out.clone().unwrap_or_else(|| s.dirs()[0].clone());
            let rows = cmd_report(&s, &out)?;
            print!("{}", fwmips::experiment::render_markdown(&rows));
            Ok(0)
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("fwmips: {e}");
            ExitCode::from(2)
        }
    }
}
