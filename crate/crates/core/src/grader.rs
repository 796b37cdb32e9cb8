//! Final-answer extraction from model generations and numeric correctness
//! against a gold answer. This is the primitive the reward function, the
//! difficulty tagger, and the split builders all share.

use serde::{Deserialize, Serialize};

use crate::langscript::{is_bengali_digit, profile_text, transliterate_digits};

/// Relative tolerance for numeric equality. Exact integers (the common case
/// after filtering) are unaffected; decimals survive formatting noise.
pub const DEFAULT_REL_TOL: f64 = 1e-4;

pub const ANSWER_OPEN: &str = "<answer>";
pub const ANSWER_CLOSE: &str = "</answer>";

/// Result of scanning a generation for its final answer.
///
/// `format_ok` is true iff the generation contains exactly one well-nested
/// `<answer>...</answer>` pair and no stray tags. When the format check
/// fails, no span or value is extracted, so a format failure always implies
/// zero correctness downstream.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Extraction {
    /// Text between the answer tags, when exactly one pair was found.
    pub raw_span: Option<String>,
    /// The span parsed as a decimal, after digit transliteration and
    /// separator stripping.
    pub value: Option<f64>,
    /// True when the span used Bengali digits or is majority-Bengali.
    pub bengali_answer: bool,
    pub format_ok: bool,
    /// Byte range of the whole `<answer>...</answer>` pair in the input.
    pub tag_bounds: Option<(usize, usize)>,
}

/// Scans `generation` for answer tags. Total: never fails, including on
/// unbalanced or repeated tags (those simply yield `format_ok = false`).
pub fn extract(generation: &str) -> Extraction {
    let opens: Vec<usize> = generation
        .match_indices(ANSWER_OPEN)
        .map(|(i, _)| i)
        .collect();
    let closes: Vec<usize> = generation
        .match_indices(ANSWER_CLOSE)
        .map(|(i, _)| i)
        .collect();

    let format_ok = opens.len() == 1 && closes.len() == 1 && opens[0] < closes[0];
    if !format_ok {
        return Extraction::default();
    }

    let span_start = opens[0] + ANSWER_OPEN.len();
    let span_end = closes[0];
    let raw = &generation[span_start..span_end];

    let bengali_answer =
        raw.chars().any(is_bengali_digit) || profile_text(raw).bengali_ratio >= 0.5;

    Extraction {
        raw_span: Some(raw.to_string()),
        value: parse_decimal(raw),
        bengali_answer,
        format_ok: true,
        tag_bounds: Some((opens[0], closes[0] + ANSWER_CLOSE.len())),
    }
}

/// `|value - gold| <= rel_tol * max(1, |gold|)`.
pub fn is_correct(value: f64, gold: f64, rel_tol: f64) -> bool {
    if !value.is_finite() || !gold.is_finite() {
        return false;
    }
    (value - gold).abs() <= rel_tol * gold.abs().max(1.0)
}

/// Parses a plain decimal: optional sign, digits, optional fractional part.
/// Bengali digits are transliterated and ASCII thousands separators stripped
/// first. Fractions (`3/4`), exponents, and anything else are rejected.
pub fn parse_decimal(s: &str) -> Option<f64> {
    let cleaned = clean_numeric(s)?;
    let value: f64 = cleaned.parse().ok()?;
    value.is_finite().then_some(value)
}

/// Canonical form of a decimal string: ASCII digits, no separators, no
/// leading zeros, no trailing fractional zeros, `-0` collapsed to `0`.
pub fn normalize_decimal(s: &str) -> Option<String> {
    let cleaned = clean_numeric(s)?;
    let (sign, rest) = match cleaned.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, cleaned.strip_prefix('+').unwrap_or(&cleaned)),
    };
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((i, f)) => (i, f),
        None => (rest, ""),
    };
    let int_trimmed = int_part.trim_start_matches('0');
    let int_canon = if int_trimmed.is_empty() {
        "0"
    } else {
        int_trimmed
    };
    let frac_canon = frac_part.trim_end_matches('0');

    let mut out = String::new();
    if sign && !(int_canon == "0" && frac_canon.is_empty()) {
        out.push('-');
    }
    out.push_str(int_canon);
    if !frac_canon.is_empty() {
        out.push('.');
        out.push_str(frac_canon);
    }
    Some(out)
}

/// Transliterates, strips separators, trims, and validates the decimal
/// grammar. Returns the cleaned ASCII string when it is a valid decimal.
fn clean_numeric(s: &str) -> Option<String> {
    let transliterated = transliterate_digits(s);
    let cleaned: String = transliterated
        .trim()
        .chars()
        .filter(|&c| c != ',')
        .collect();

    let bytes = cleaned.as_bytes();
    let mut i = 0;
    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i == int_start {
        return None;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == frac_start {
            return None;
        }
    }
    (i == bytes.len()).then_some(cleaned)
}
