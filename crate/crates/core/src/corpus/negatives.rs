use std::collections::{BTreeMap, HashSet};

use super::triplet::FactTriplet;
use crate::rng::SplitMix64;
use crate::text::normalize_answer;
use crate::{Error, Result};

/// Draws `m` interference entities for `triplet` from the objects of its
/// relation.
///
/// Admissible entities are the distinct pool objects whose normalized form
/// differs from the gold object and from every alias (objects that normalize
/// identically collapse to the lexicographically smallest spelling). They are
/// sorted, shuffled with Fisher–Yates on the `(seed, triplet_id)` stream of
/// [`SplitMix64::keyed`], and the first `m` are returned.
pub fn sample_negatives(
    triplet: &FactTriplet,
    relation_pool: &[FactTriplet],
    m: usize,
    seed: u64,
) -> Result<Vec<String>> {
    if m == 0 {
        return Ok(Vec::new());
    }
    if let Some(other) = relation_pool
        .iter()
        .find(|t| t.relation_id != triplet.relation_id)
    {
        return Err(Error::InvalidArgument(format!(
            "pool triplet {} has relation {}, expected {}",
            other.triplet_id, other.relation_id, triplet.relation_id
        )));
    }
    sample_from_objects(
        triplet,
        relation_pool.iter().map(|t| t.object.as_str()),
        m,
        seed,
    )
}

/// Sorted distinct objects that fail exact match against the gold object and
/// every alias. Spellings that normalize identically collapse to the
/// lexicographically smallest one.
pub(crate) fn admissible_objects<'a>(
    gold: &str,
    aliases: &[String],
    objects: impl IntoIterator<Item = &'a str>,
) -> Vec<&'a str> {
    let excluded: HashSet<String> = std::iter::once(gold)
        .chain(aliases.iter().map(String::as_str))
        .map(normalize_answer)
        .collect();

    let mut admissible: BTreeMap<String, &str> = BTreeMap::new();
    for obj in objects {
        let key = normalize_answer(obj);
        if key.is_empty() || excluded.contains(&key) {
            continue;
        }
        admissible
            .entry(key)
            .and_modify(|cur| {
                if obj < *cur {
                    *cur = obj
                }
            })
            .or_insert(obj);
    }
    let mut pool: Vec<&str> = admissible.into_values().collect();
    pool.sort_unstable();
    pool
}

pub(crate) fn sample_from_objects<'a>(
    triplet: &FactTriplet,
    objects: impl IntoIterator<Item = &'a str>,
    m: usize,
    seed: u64,
) -> Result<Vec<String>> {
    let mut pool = admissible_objects(&triplet.object, &triplet.object_aliases, objects);
    if pool.len() < m {
        return Err(Error::InsufficientNegatives {
            relation: triplet.relation_id.clone(),
            required: m,
            available: pool.len(),
        });
    }
    SplitMix64::keyed(seed, &triplet.triplet_id).shuffle(&mut pool);
    Ok(pool.into_iter().take(m).map(str::to_string).collect())
}
