use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Probe counts needed for a full accuracy study versus MONITOR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeCost {
    pub frames: usize,
    pub negatives: usize,
    /// `R·M` frame/interference combinations.
    pub accuracy_probes: usize,
    /// `R + 1 + M`: frames, one positive prime, `M` negative primes.
    pub monitor_probes: usize,
    pub ratio: f64,
}

pub fn probe_cost(frames: usize, negatives: usize) -> Result<ProbeCost> {
    if frames == 0 || negatives == 0 {
        return Err(Error::InvalidArgument(
            "frames and negatives must both be at least 1".into(),
        ));
    }
    let accuracy_probes = frames * negatives;
    let monitor_probes = frames + 1 + negatives;
    Ok(ProbeCost {
        frames,
        negatives,
        accuracy_probes,
        monitor_probes,
        ratio: accuracy_probes as f64 / monitor_probes as f64,
    })
}
