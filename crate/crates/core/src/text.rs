//! Term normalisation shared by the keyword index and the query pipeline.

/// Normalises a keyword or query fragment.
///
/// Lowercases, turns every character that is neither alphanumeric nor a hyphen into a
/// separator, collapses runs of whitespace and trims. Works on any script, so Vietnamese
/// text with diacritics keeps its letters.
pub fn normalize_term(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for ch in raw.chars() {
        if ch.is_alphanumeric() || ch == '-' {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.extend(ch.to_lowercase());
        } else {
            pending_space = true;
        }
    }
    out
}

/// Splits normalised text into its words.
pub fn words(raw: &str) -> Vec<String> {
    normalize_term(raw)
        .split(' ')
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}
