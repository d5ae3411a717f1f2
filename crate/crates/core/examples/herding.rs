//! Kernel herding with random Fourier features: the classical recursion and
//! its accelerated Frank-Wolfe counterpart.
//!
//! `cargo run --release --example herding`

use fwmips::fw::{FwConfig, Init, OracleKind};
use fwmips::geometry::PointSet;
use fwmips::herding::{herding_accelerated, herding_classic, loglog_slope, FeatureMap, HerdingInstance};
use fwmips::instances::gaussian_vector;
use fwmips::rng::StreamRng;

fn main() -> fwmips::Result<()> {
    let mut rng = StreamRng::new(2, 0);
    let rows: Vec<Vec<f64>> = (0..300).map(|_| gaussian_vector(&mut rng, 5, 1.0)).collect();
    let map = FeatureMap::RandomFourier {
        bandwidth: None,
        feature_dim: 64,
        seed: 1,
    };
    let inst = HerdingInstance::new(PointSet::from_rows(&rows)?, &map, None)?;

    let classic = herding_classic(&inst, 1000)?;
    for t in [1, 10, 100, 1000] {
        println!("classic t = {t:4}  ‖mean - μ‖ = {:.3e}", classic.errors[t - 1]);
    }
    println!(
        "log-log slope on [10, 1000]: {:.3}",
        loglog_slope(&classic.errors, 10, 1000).unwrap_or(f64::NAN)
    );

    let cfg = FwConfig {
        epsilon: 1e-3,
        oracle: OracleKind::lsh_jl_default(),
        init: Init::RandomVertex,
        ..FwConfig::default()
    };
    let out = herding_accelerated(&inst, &cfg)?;
    println!(
        "accelerated: ½‖w - μ‖² = {:.3e} after {} iterations ({:?})",
        out.trace.final_objective,
        out.trace.iterations(),
        out.trace.reason
    );
    Ok(())
}
