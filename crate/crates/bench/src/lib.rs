//! Shared fixtures for the criterion benches.

use qdilab::adders::{self, Architecture};
use qdilab::vectors::{self, Vector};
use qdilab::{AdderSpec, Netlist, Protocol};

pub const SEED: u64 = 11;

/// The 32-bit adders benchmarked: one per architecture, early full adders.
pub fn adders32() -> Vec<(String, Netlist)> {
    Architecture::ALL
        .into_iter()
        .map(|a| {
            let spec = match a {
                Architecture::HybridBclarcRca => AdderSpec::hybrid_bclarc(32, 8, Protocol::Rtz),
                a => AdderSpec::new(a, 32, Protocol::Rtz),
            };
            (spec.summary(), adders::generate(&spec).expect("bench spec is valid"))
        })
        .collect()
}

pub fn workload(count: usize) -> Vec<Vector> {
    vectors::random(32, count, SEED)
}
