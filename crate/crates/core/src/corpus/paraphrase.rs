use super::bleu::{sentence_bleu, DEFAULT_MAX_NGRAM};
use crate::{Error, Result};

/// Which already-kept prompts a candidate is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiversityScope {
    /// Against the base and every accepted candidate.
    #[default]
    Pairwise,
    /// Against the base only.
    BaseOnly,
}

/// Greedy diversity filter with pairwise scope. See [`filter_paraphrases_with`].
pub fn filter_paraphrases(
    base: &str,
    candidates: &[String],
    threshold: f64,
) -> Result<Vec<String>> {
    filter_paraphrases_with(base, candidates, threshold, DiversityScope::Pairwise)
}

/// Walks `candidates` in order and keeps a candidate when its BLEU against
/// every kept prompt (the base first) is below `threshold` in both
/// directions.
pub fn filter_paraphrases_with(
    base: &str,
    candidates: &[String],
    threshold: f64,
    scope: DiversityScope,
) -> Result<Vec<String>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, 1], got {threshold}"
        )));
    }
    if base.trim().is_empty() {
        return Err(Error::EmptyText(base.to_string()));
    }

    let mut accepted: Vec<String> = Vec::new();
    'outer: for cand in candidates {
        let kept = std::iter::once(base).chain(
            accepted
                .iter()
                .map(String::as_str)
                .filter(|_| scope == DiversityScope::Pairwise),
        );
        for other in kept {
            if sentence_bleu(cand, other, DEFAULT_MAX_NGRAM)? >= threshold
                || sentence_bleu(other, cand, DEFAULT_MAX_NGRAM)? >= threshold
            {
                continue 'outer;
            }
        }
        accepted.push(cand.clone());
    }
    Ok(accepted)
}
