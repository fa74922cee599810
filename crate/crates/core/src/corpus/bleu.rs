//! Sentence-level BLEU used to keep paraphrased prompt frames diverse.
//!
//! Tokens come from [`crate::text::bleu_tokens`]. Modified n-gram precisions
//! for n = 1..=N are combined with uniform weights. Precisions for n ≥ 2 use
//! add-one smoothing (numerator and denominator each +1); the unigram
//! precision is left unsmoothed, so sentences without a shared token score 0.
//! The brevity penalty is `exp(1 - r/c)` when the candidate is not longer
//! than the reference.

use std::collections::HashMap;

use crate::text::bleu_tokens;
use crate::{Error, Result};

pub const DEFAULT_MAX_NGRAM: usize = 4;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// BLEU of `candidate` against a single `reference`, in `[0, 1]`.
pub fn sentence_bleu(candidate: &str, reference: &str, max_ngram: usize) -> Result<f64> {
    if max_ngram == 0 {
        return Err(Error::InvalidArgument(
            "max_ngram must be at least 1".into(),
        ));
    }
    let cand = bleu_tokens(candidate);
    let refr = bleu_tokens(reference);
    if cand.is_empty() {
        return Err(Error::EmptyText(candidate.to_string()));
    }
    if refr.is_empty() {
        return Err(Error::EmptyText(reference.to_string()));
    }

    let mut log_sum = 0.0;
    for n in 1..=max_ngram {
        let cand_counts = ngram_counts(&cand, n);
        let ref_counts = ngram_counts(&refr, n);
        let total: usize = cand_counts.values().sum();
        let clipped: usize = cand_counts
            .iter()
            .map(|(gram, &c)| c.min(ref_counts.get(gram).copied().unwrap_or(0)))
            .sum();
        let (num, den) = if n == 1 {
            (clipped, total)
        } else {
            (clipped + 1, total + 1)
        };
        if num == 0 {
            return Ok(0.0);
        }
        log_sum += (num as f64 / den as f64).ln();
    }

    let c = cand.len() as f64;
    let r = refr.len() as f64;
    let brevity = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    Ok(brevity * (log_sum / max_ngram as f64).exp())
}
