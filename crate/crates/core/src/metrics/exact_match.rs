use crate::text::normalize_answer;

/// Normalized equality against the gold answer or any alias.
pub fn exact_match(prediction: &str, gold: &str, aliases: &[String]) -> bool {
    let pred = normalize_answer(prediction);
    std::iter::once(gold)
        .chain(aliases.iter().map(String::as_str))
        .any(|g| normalize_answer(g) == pred)
}
