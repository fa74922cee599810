use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Weights of PFD², IRD² and PFD·IRD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alphas {
    pub pfd: f64,
    pub ird: f64,
    pub interaction: f64,
}

impl Default for Alphas {
    /// Equal contributions of 0.33 each, not renormalized.
    fn default() -> Self {
        Self::new(0.33, 0.33, 0.33)
    }
}

impl Alphas {
    pub const fn new(pfd: f64, ird: f64, interaction: f64) -> Self {
        Self {
            pfd,
            ird,
            interaction,
        }
    }

    pub fn sum(&self) -> f64 {
        self.pfd + self.ird + self.interaction
    }

    /// Scaled to sum to one.
    pub fn renormalized(&self) -> Result<Self> {
        self.validate()?;
        let s = self.sum();
        if s == 0.0 {
            return Err(Error::InvalidArgument("alphas sum to zero".into()));
        }
        Ok(Self::new(self.pfd / s, self.ird / s, self.interaction / s))
    }

    pub fn validate(&self) -> Result<()> {
        for a in [self.pfd, self.ird, self.interaction] {
            if !(a.is_finite() && a >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "alphas must be finite and non-negative, got {self:?}"
                )));
            }
        }
        Ok(())
    }
}

impl FromStr for Alphas {
    type Err = Error;

    /// `"a1,a2,a3"`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("alphas {s:?}: {e}")))?;
        let [a, b, c] = parts[..] else {
            return Err(Error::InvalidArgument(format!(
                "alphas {s:?}: expected three comma-separated numbers"
            )));
        };
        let alphas = Alphas::new(a, b, c);
        alphas.validate()?;
        Ok(alphas)
    }
}

/// Per-triplet inputs of the score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripletTerm {
    pub pfd: f64,
    pub ird: f64,
    pub primary_mean_prob: f64,
}

/// `sqrt(α1·pfd² + α2·ird² + α3·pfd·ird)`
pub fn numerator_term(pfd: f64, ird: f64, alphas: Alphas) -> f64 {
    (alphas.pfd * pfd * pfd + alphas.ird * ird * ird + alphas.interaction * pfd * ird).sqrt()
}

/// Summed numerator terms over summed primary-anchor probabilities. Terms
/// are accumulated in slice order.
pub fn compute_monitor(terms: &[TripletTerm], alphas: Alphas) -> Result<f64> {
    alphas.validate()?;
    if terms.is_empty() {
        return Err(Error::EmptyInput("no scored triplets".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for t in terms {
        num += numerator_term(t.pfd, t.ird, alphas);
        den += t.primary_mean_prob;
    }
    if den <= 0.0 {
        return Err(Error::Degenerate(
            "primary anchor probabilities sum to zero".into(),
        ));
    }
    Ok(num / den)
}
