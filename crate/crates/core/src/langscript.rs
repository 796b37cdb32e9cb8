//! Unicode-script metrics: Bengali character ratios, word counts, and
//! Bengali-digit transliteration.
//!
//! A code point counts as Bengali iff it lies in the Bengali Unicode block
//! `U+0980..=U+09FF`. Whitespace (Unicode whitespace property) is excluded
//! from the ratio denominator. Counting is per code point, not per grapheme
//! cluster.

use serde::{Deserialize, Serialize};

/// First code point of the Bengali Unicode block.
pub const BENGALI_BLOCK_START: u32 = 0x0980;
/// Last code point of the Bengali Unicode block.
pub const BENGALI_BLOCK_END: u32 = 0x09FF;

const BENGALI_DIGIT_ZERO: u32 = 0x09e6; // '০'
const BENGALI_DIGIT_NINE: u32 = 0x09ef; // '৯'

/// Character-level script statistics for one text.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScriptProfile {
    pub bengali_chars: u64,
    /// Non-whitespace, non-Bengali code points (Latin letters, ASCII digits,
    /// math symbols, ...). These count in the ratio denominator.
    pub other_chars: u64,
    pub whitespace_chars: u64,
    /// `bengali / (bengali + other)`, or 0.0 with `empty` set when the
    /// denominator is zero.
    pub bengali_ratio: f64,
    /// Whitespace-separated tokens.
    pub word_count: u64,
    pub empty: bool,
}

pub fn is_bengali(c: char) -> bool {
    (BENGALI_BLOCK_START..=BENGALI_BLOCK_END).contains(&(c as u32))
}

pub fn is_bengali_digit(c: char) -> bool {
    (BENGALI_DIGIT_ZERO..=BENGALI_DIGIT_NINE).contains(&(c as u32))
}

/// Counts every code point of `text` and derives the Bengali ratio.
pub fn profile_text(text: &str) -> ScriptProfile {
    let mut profile = ScriptProfile::default();
    for c in text.chars() {
        if c.is_whitespace() {
            profile.whitespace_chars += 1;
        } else if is_bengali(c) {
            profile.bengali_chars += 1;
        } else {
            profile.other_chars += 1;
        }
    }
    profile.word_count = text.split_whitespace().count() as u64;
    let denom = profile.bengali_chars + profile.other_chars;
    if denom == 0 {
        profile.empty = true;
    } else {
        profile.bengali_ratio = profile.bengali_chars as f64 / denom as f64;
    }
    profile
}

/// Replaces each Bengali digit (`০`..`৯`) with its ASCII counterpart, leaving
/// every other code point unchanged. Idempotent and length-preserving in code
/// points.
pub fn transliterate_digits(text: &str) -> String {
    text.chars()
        .map(|c| {
            if is_bengali_digit(c) {
                char::from(b'0' + (c as u32 - BENGALI_DIGIT_ZERO) as u8)
            } else {
                c
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_80_percent() {
        // 800 Bengali + 200 English/numeric characters, whitespace ignored.
        let mut text = String::new();
        for i in 0..800 {
            text.push('ক');
            if i % 40 == 0 {
                text.push(' ');
            }
        }
        for i in 0..200 {
            text.push(if i % 2 == 0 { 'a' } else { '7' });
        }
        let p = profile_text(&text);
        assert_eq!(p.bengali_chars, 800);
        assert_eq!(p.other_chars, 200);
        assert_eq!(p.bengali_ratio, 0.80);
        assert!(!p.empty);
    }

    #[test]
    fn empty_text_is_flagged() {
        let p = profile_text("");
        assert!(p.empty);
        assert_eq!(p.bengali_ratio, 0.0);
        assert_eq!(p.word_count, 0);
    }

    #[test]
    fn whitespace_only_is_flagged_empty() {
        let p = profile_text(" \t\n");
        assert!(p.empty);
        assert_eq!(p.whitespace_chars, 3);
    }

    #[test]
    fn counts_words_by_whitespace_tokens() {
        let p = profile_text("রাম ৫ টি আম কিনল");
        assert_eq!(p.word_count, 5);
        assert_eq!(p.bengali_ratio, 1.0);
    }

    #[test]
    fn transliterates_bengali_digits() {
        assert_eq!(transliterate_digits("৪২"), "42");
        assert_eq!(transliterate_digits("42"), "42");
        assert_eq!(transliterate_digits("উত্তর ৩.৫ টাকা"), "উত্তর 3.5 টাকা");
    }

    #[test]
    fn transliteration_is_idempotent() {
        let s = "মোট ১২৩টি আম, 45 bagels";
        let once = transliterate_digits(s);
        assert_eq!(transliterate_digits(&once), once);
        assert_eq!(s.chars().count(), once.chars().count());
    }

    #[test]
    fn block_boundaries() {
        assert!(is_bengali('\u{0980}'));
        assert!(is_bengali('\u{09FF}'));
        assert!(!is_bengali('\u{097F}'));
        assert!(!is_bengali('\u{0A00}'));
        // The danda used in Bengali prose sits in the Devanagari block.
        assert!(!is_bengali('।'));
    }
}
