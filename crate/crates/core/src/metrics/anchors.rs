use super::exact_match::exact_match;
use super::results::ProbeResult;
use super::token_probs::{token_distance, TokenProbs};
use crate::{Error, Result};

/// The positively primed result chosen as reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryAnchor {
    /// Position of the chosen result in the fallback order.
    pub index: usize,
    pub answer: String,
    pub token_probs: TokenProbs,
}

/// Primary anchor with its foreign anchors for one triplet.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    pub triplet_id: String,
    pub primary: TokenProbs,
    pub framed: Vec<TokenProbs>,
    pub negatives: Vec<TokenProbs>,
    pub primary_mean_prob: f64,
}

impl AnchorSet {
    pub fn new(
        triplet_id: &str,
        primary: TokenProbs,
        framed: Vec<TokenProbs>,
        negatives: Vec<TokenProbs>,
    ) -> Result<Self> {
        for other in framed.iter().chain(&negatives) {
            if other.tokens != primary.tokens {
                return Err(Error::TokenMismatch {
                    context: format!("anchors of triplet {triplet_id}"),
                    left: primary.tokens.clone(),
                    right: other.tokens.clone(),
                });
            }
        }
        Ok(Self {
            triplet_id: triplet_id.to_string(),
            primary_mean_prob: primary.mean(),
            primary,
            framed,
            negatives,
        })
    }
}

/// First positively primed result whose top-1 answer exact-matches the gold
/// object (or an alias). `Ok(None)` means the triplet is excluded.
pub fn select_primary_anchor(
    gold: &str,
    aliases: &[String],
    pos_primed_results: &[&ProbeResult],
) -> Result<Option<PrimaryAnchor>> {
    if pos_primed_results.is_empty() {
        return Err(Error::Mismatch(format!(
            "no positively primed results for gold object {gold:?}"
        )));
    }
    Ok(pos_primed_results
        .iter()
        .enumerate()
        .find(|(_, r)| exact_match(&r.top1_text, gold, aliases))
        .map(|(index, r)| PrimaryAnchor {
            index,
            answer: r.top1_text.clone(),
            token_probs: r.anchor_token_probs.clone(),
        }))
}

fn mean_distance(primary: &TokenProbs, others: &[TokenProbs]) -> Result<f64> {
    let mut sum = 0.0;
    for o in others {
        sum += token_distance(primary, o)?;
    }
    Ok(sum / others.len() as f64)
}

/// Prompt-framing degree: mean token distance to the framed anchors.
pub fn compute_pfd(anchors: &AnchorSet) -> Result<f64> {
    if anchors.framed.is_empty() {
        return Err(Error::EmptyInput(format!(
            "triplet {} has no framed anchors",
            anchors.triplet_id
        )));
    }
    mean_distance(&anchors.primary, &anchors.framed)
}

/// Interference-relevance degree: mean token distance to the negatively
/// primed anchors.
pub fn compute_ird(anchors: &AnchorSet) -> Result<f64> {
    if anchors.negatives.is_empty() {
        return Err(Error::EmptyInput(format!(
            "triplet {} has no negatively primed anchors",
            anchors.triplet_id
        )));
    }
    mean_distance(&anchors.primary, &anchors.negatives)
}
