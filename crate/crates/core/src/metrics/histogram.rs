use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorHistogram {
    pub bin_width: f64,
    /// Counts for `[k·w, (k+1)·w)`; the last bin is closed on the right.
    pub counts: Vec<usize>,
    pub solid_threshold: f64,
    /// Share of probabilities strictly above `solid_threshold`.
    pub solid_fraction: f64,
    pub n: usize,
}

impl AnchorHistogram {
    pub fn bin_edges(&self, k: usize) -> (f64, f64) {
        (k as f64 * self.bin_width, (k + 1) as f64 * self.bin_width)
    }
}

pub fn anchor_histogram(
    probs: &[f64],
    bin_width: f64,
    solid_threshold: f64,
) -> Result<AnchorHistogram> {
    if !(bin_width > 0.0 && bin_width <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "bin width {bin_width} outside (0, 1]"
        )));
    }
    let bins = (1.0 / bin_width).round() as usize;
    if (bins as f64 * bin_width - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "bin width {bin_width} does not divide 1 evenly"
        )));
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )));
    }

    let mut counts = vec![0usize; bins];
    for &p in probs {
        let mut k = ((p / bin_width).floor() as usize).min(bins - 1);
        // Settle floating-point edge cases against the literal bin bounds.
        while k + 1 < bins && p >= (k + 1) as f64 * bin_width {
            k += 1;
        }
        while k > 0 && p < k as f64 * bin_width {
            k -= 1;
        }
        counts[k] += 1;
    }
    let solid = probs.iter().filter(|&&p| p > solid_threshold).count();
    let solid_fraction = if probs.is_empty() {
        0.0
    } else {
        solid as f64 / probs.len() as f64
    };
    Ok(AnchorHistogram {
        bin_width,
        counts,
        solid_threshold,
        solid_fraction,
        n: probs.len(),
    })
}
