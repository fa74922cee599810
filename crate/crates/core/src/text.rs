//! String normalization shared by exact matching and BLEU tokenization.

/// Answer normalization for exact match: trim, collapse internal whitespace,
/// lowercase, strip trailing `.`, `,`, `!`, `?`.
pub fn normalize_answer(s: &str) -> String {
    let collapsed = s.split_whitespace().collect::<Vec<_>>().join(" ");
    let lowered = collapsed.to_lowercase();
    lowered
        .trim_end_matches(['.', ',', '!', '?'])
        .trim_end()
        .to_string()
}

/// Lowercase, replace every character other than alphanumerics and `_` with a
/// space and split on whitespace. Slot markers such as `[X]` therefore become the token `x`.
pub fn bleu_tokens(s: &str) -> Vec<String> {
    s.to_lowercase()
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '_' {
                c
            } else {
                ' '
            }
        })
        .collect::<String>()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}
