//! Shared instance builders for the benchmark targets.

use ncreal::compression::Compression;
use ncreal::harness::instances::dithered_ramp;
use ncreal::{Probe, Sequence};

/// A representative compression workload: a dithered ramp squeezed along
/// the squares probe.
pub fn standard_compression(seed: u64) -> Compression {
    Compression::new(dithered_ramp(seed), 3, Probe::squares(), 1 << 16)
}

/// The ramp the workload compresses, for baselines.
pub fn standard_input(seed: u64) -> Sequence {
    dithered_ramp(seed)
}
