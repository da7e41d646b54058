//! String normalization used for title and author-name comparison.

use unicode_normalization::UnicodeNormalization;

/// Removes combining diacritical marks (U+0300..U+036F) after canonical
/// decomposition, then recomposes. Marks outside that block, such as the
/// Japanese voicing marks, are kept.
pub fn strip_diacritics(s: &str) -> String {
    s.nfd()
        .filter(|c| !('\u{0300}'..='\u{036f}').contains(c))
        .nfc()
        .collect()
}

pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Title key for exact matching: casefolded, diacritics and punctuation
/// stripped, whitespace collapsed.
pub fn normalize_title(title: &str) -> String {
    let folded = strip_diacritics(&title.to_lowercase());
    let spaced: String = folded
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    collapse_whitespace(&spaced)
}
