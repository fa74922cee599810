//! A deterministic stand-in for a language-model backend.
//!
//! Probabilities follow a multiplicative-decay model driven by a per-triplet
//! knowledge table, so every downstream metric has a closed form:
//!
//! | probe kind      | gold probability                 |
//! |-----------------|----------------------------------|
//! | QA_BASE         | `p`                              |
//! | QA_FRAME j      | `p · f^j`, clamped to `[0, 1]`   |
//! | QA_POS_PRIMED   | `min(1, p · b)`                  |
//! | QA_NEG_PRIMED   | `p · (1 − q)`                    |
//! | WP, FC_POS/NEG  | `p`                              |
//!
//! The gold object is split into `token_split` subword pieces and every piece
//! carries the probe's gold probability, so per-token means equal it exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{admissible_objects, ProbeKind, ProbeRecord};
use crate::metrics::{ProbeResult, TokenProbs};
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Probabilities above this make a known fact surface as the top-1 answer.
pub const TOP1_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knowledge {
    pub known: bool,
    pub base_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockProfile {
    pub model_id: String,
    #[serde(default)]
    pub knowledge: BTreeMap<String, Knowledge>,
    /// Used for triplets missing from `knowledge`.
    #[serde(default)]
    pub default: Option<Knowledge>,
    pub framing_sensitivity: f64,
    pub prime_boost: f64,
    pub prime_susceptibility: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub token_split: usize,
}

fn one() -> usize {
    1
}

impl MockProfile {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| {
            Err(Error::InvalidArgument(format!(
                "profile {}: {m}",
                self.model_id
            )))
        };
        if !(self.framing_sensitivity.is_finite() && self.framing_sensitivity >= 0.0) {
            return bad(format!(
                "framing_sensitivity {} must be >= 0",
                self.framing_sensitivity
            ));
        }
        if !(self.prime_boost.is_finite() && self.prime_boost >= 1.0) {
            return bad(format!("prime_boost {} must be >= 1", self.prime_boost));
        }
        if !(0.0..=1.0).contains(&self.prime_susceptibility) {
            return bad(format!(
                "prime_susceptibility {} outside [0, 1]",
                self.prime_susceptibility
            ));
        }
        if self.token_split == 0 {
            return bad("token_split must be at least 1".into());
        }
        for (id, k) in self
            .knowledge
            .iter()
            .map(|(id, k)| (id.as_str(), k))
            .chain(self.default.iter().map(|k| ("<default>", k)))
        {
            if !(0.0..=1.0).contains(&k.base_prob) {
                return bad(format!("base_prob {} of {id} outside [0, 1]", k.base_prob));
            }
        }
        Ok(())
    }

    fn knowledge_for(&self, triplet_id: &str) -> Result<Knowledge> {
        self.knowledge
            .get(triplet_id)
            .copied()
            .or(self.default)
            .ok_or_else(|| {
                Error::Mismatch(format!(
                    "profile {} has no knowledge entry for triplet {triplet_id} and no default",
                    self.model_id
                ))
            })
    }

    /// Gold-answer probability of `probe` under this profile.
    pub fn gold_prob(&self, probe: &ProbeRecord) -> Result<f64> {
        let p = self.knowledge_for(&probe.triplet_id)?.base_prob;
        let v = match probe.kind {
            ProbeKind::QaFrame => p * self.framing_sensitivity.powi(probe.frame_index as i32),
            ProbeKind::QaPosPrimed => p * self.prime_boost,
            ProbeKind::QaNegPrimed => p * (1.0 - self.prime_susceptibility),
            ProbeKind::QaBase | ProbeKind::Wp | ProbeKind::FcPos | ProbeKind::FcNeg => p,
        };
        Ok(v.clamp(0.0, 1.0))
    }
}

pub fn parse_profile(text: &str) -> Result<MockProfile> {
    let profile: MockProfile = toml::from_str(text)?;
    profile.validate()?;
    Ok(profile)
}

pub fn read_profile(path: &Path) -> Result<MockProfile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_profile(&text)
}

/// Split `s` into `k` contiguous character chunks of near-equal length.
/// Trailing chunks are empty when `s` has fewer than `k` characters.
pub fn split_tokens(s: &str, k: usize) -> Vec<String> {
    let chars: Vec<char> = s.chars().collect();
    let n = chars.len();
    (0..k)
        .map(|i| chars[(i * n / k)..((i + 1) * n / k)].iter().collect())
        .collect()
}

/// Run the mock backend over every probe.
pub fn mock_score(probes: &[ProbeRecord], profile: &MockProfile) -> Result<Vec<ProbeResult>> {
    profile.validate()?;

    let mut objects: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for p in probes {
        objects
            .entry(&p.relation_id)
            .or_default()
            .insert(&p.gold_object);
    }

    let mut out = Vec::with_capacity(probes.len());
    for probe in probes {
        let knowledge = profile.knowledge_for(&probe.triplet_id)?;
        let prob = profile.gold_prob(probe)?;
        let correct = knowledge.known && prob > TOP1_THRESHOLD;

        let (expected, _) = probe.expected_answer();
        let top1 = if correct {
            expected.to_string()
        } else {
            match probe.kind {
                ProbeKind::FcPos => "False".to_string(),
                ProbeKind::FcNeg => "True".to_string(),
                _ => {
                    let pool = admissible_objects(
                        &probe.gold_object,
                        &probe.gold_aliases,
                        objects[probe.relation_id.as_str()].iter().copied(),
                    );
                    if pool.is_empty() {
                        "<unknown>".to_string()
                    } else {
                        let mut rng = SplitMix64::keyed(profile.seed, &probe.probe_id);
                        pool[rng.below(pool.len())].to_string()
                    }
                }
            }
        };

        let tokens = split_tokens(&probe.gold_object, profile.token_split);
        let probs = vec![prob; tokens.len()];
        out.push(ProbeResult::new(
            &probe.probe_id,
            &profile.model_id,
            &top1,
            TokenProbs::new(tokens, probs)?,
        ));
    }
    out.sort_by(|a, b| a.probe_id.cmp(&b.probe_id));
    Ok(out)
}
