use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Teacher-forced per-subword probabilities of an anchor string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenProbs {
    pub tokens: Vec<String>,
    pub probs: Vec<f64>,
}

impl TokenProbs {
    pub fn new(tokens: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        let tp = Self { tokens, probs };
        tp.validate()?;
        Ok(tp)
    }

    /// Single-token helper, mostly for tests and examples.
    pub fn single(token: &str, prob: f64) -> Result<Self> {
        Self::new(vec![token.to_string()], vec![prob])
    }

    pub fn validate(&self) -> Result<()> {
        if self.tokens.is_empty() {
            return Err(Error::InvalidTokenProbs("no tokens".into()));
        }
        if self.tokens.len() != self.probs.len() {
            return Err(Error::InvalidTokenProbs(format!(
                "{} tokens but {} probabilities",
                self.tokens.len(),
                self.probs.len()
            )));
        }
        if let Some(p) = self.probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidTokenProbs(format!(
                "probability {p} outside [0, 1]"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Per-token mean probability.
    pub fn mean(&self) -> f64 {
        self.probs.iter().sum::<f64>() / self.probs.len() as f64
    }
}

/// Mean absolute per-token probability difference. Both sides must carry the
/// same token sequence.
pub fn token_distance(a: &TokenProbs, b: &TokenProbs) -> Result<f64> {
    if a.tokens != b.tokens {
        return Err(Error::TokenMismatch {
            context: "token_distance".into(),
            left: a.tokens.clone(),
            right: b.tokens.clone(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidTokenProbs("no tokens".into()));
    }
    let sum: f64 = a
        .probs
        .iter()
        .zip(&b.probs)
        .map(|(x, y)| (x - y).abs())
        .sum();
    Ok(sum / a.len() as f64)
}
