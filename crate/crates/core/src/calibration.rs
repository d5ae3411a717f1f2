//! Planner constants.
//!
//! The committed values live in `calibration.json` next to the crate
//! manifest and are produced by `fwmips calibrate` (see [`crate::experiment`]).

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Sketch dimension: `s = ceil(c_s · ε⁻² · ln(n/δ))`.
    pub c_s: f64,
    /// Sketches sampled per robust query: `l = ceil(c_l · ln(n/δ))`.
    pub c_l: f64,
    /// LSH tables: `L = ceil(c_lsh · ln(10) / p(τ)^K)`.
    pub c_lsh: f64,
    /// ADE pool size: `k_ADE = odd(ceil(c_k · ln((n + T)/δ)))`.
    pub c_k: f64,
    /// ADE per-query subset: `m = odd(ceil(c_q · ln(n·T/δ)))`.
    pub c_q: f64,
    pub jl_k_cap: usize,
    pub kappa_cap: usize,
    /// Expected number of ADE queries used when sizing the pool.
    pub ade_queries: usize,
    #[serde(default)]
    pub reference: serde_json::Value,
}

impl Calibration {
    pub fn from_json(text: &str) -> Result<Self> {
        let cal: Calibration = serde_json::from_str(text)?;
        cal.validate()?;
        Ok(cal)
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("c_s", self.c_s),
            ("c_l", self.c_l),
            ("c_lsh", self.c_lsh),
            ("c_k", self.c_k),
            ("c_q", self.c_q),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("calibration constant {name} = {v}")));
            }
        }
        if self.jl_k_cap == 0 || self.kappa_cap == 0 || self.ade_queries == 0 {
            return Err(Error::config("calibration caps must be positive"));
        }
        Ok(())
    }
}

/// The committed constants.
pub fn defaults() -> &'static Calibration {
    static CAL: OnceLock<Calibration> = OnceLock::new();
    CAL.get_or_init(|| {
        Calibration::from_json(include_str!("../calibration.json")).expect("committed calibration.json is valid")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn committed_file_parses() {
        let cal = defaults();
        assert_eq!(cal.jl_k_cap, 256);
        assert_eq!(cal.kappa_cap, 16);
        assert!(cal.c_s > 0.3 && cal.c_s < 3.0);
    }

    #[test]
    fn rejects_bad_constants() {
        let mut cal = defaults().clone();
        cal.c_q = 0.0;
        assert!(cal.validate().is_err());
    }
}
