//! Reruns the pilot sweeps and prints the resulting calibration file.
//!
//! `cargo run --release --example calibrate > calibration.json`

use fwmips::calibrate::{run_pilot, PilotConfig};

fn main() -> fwmips::Result<()> {
    let cal = run_pilot(&PilotConfig::default())?;
    println!("{}", serde_json::to_string_pretty(&cal)?);
    Ok(())
}
