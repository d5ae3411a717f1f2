use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// Operation counts for one query or one run, incremented at call sites.
///
/// The `_macs` fields count multiply-accumulates; the rest count events.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Exact inner products against stored vectors (verification and scans).
    pub inner_product_macs: u64,
    /// Applying sketch matrices to queries.
    pub sketch_macs: u64,
    /// Hyperplane evaluations for LSH keys.
    pub hash_macs: u64,
    /// Distance computations between sketched vectors.
    pub estimate_macs: u64,
    pub candidates_verified: u64,
    pub tables_probed: u64,
    pub sketches_sampled: u64,
    pub sub_indexes_probed: u64,
}

impl Counters {
    /// All multiply-accumulates spent by the query.
    pub fn total_macs(&self) -> u64 {
        self.inner_product_macs + self.sketch_macs + self.hash_macs + self.estimate_macs
    }
}

impl AddAssign for Counters {
    fn add_assign(&mut self, o: Self) {
        self.inner_product_macs += o.inner_product_macs;
        self.sketch_macs += o.sketch_macs;
        self.hash_macs += o.hash_macs;
        self.estimate_macs += o.estimate_macs;
        self.candidates_verified += o.candidates_verified;
        self.tables_probed += o.tables_probed;
        self.sketches_sampled += o.sketches_sampled;
        self.sub_indexes_probed += o.sub_indexes_probed;
    }
}

impl Add for Counters {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}

/// Result of one oracle query: the chosen index (if any), the exact value
/// that was verified for it, and what the query cost.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Answer {
    pub index: Option<usize>,
    pub value: f64,
    pub counters: Counters,
}

impl Answer {
    pub fn miss(counters: Counters) -> Self {
        Self {
            index: None,
            value: f64::NAN,
            counters,
        }
    }

    pub fn hit(index: usize, value: f64, counters: Counters) -> Self {
        Self {
            index: Some(index),
            value,
            counters,
        }
    }
}
