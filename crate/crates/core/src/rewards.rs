//! The verifiable reward function: format + correctness + Bengali reasoning.
//!
//! For one generation against one gold answer:
//! - `format` is 1 iff exactly one well-nested answer-tag pair exists;
//! - `correctness` is 0 for a missing or wrong value, 1 for a correct value,
//!   2 for a correct value given in Bengali;
//! - `bengali` is 1 iff the reasoning span (the generation with the answer
//!   tags and their contents removed) is at least `bengali_min` Bengali.
//!
//! A format failure blocks extraction, so it forces correctness to 0. The
//! total is the component sum and lies in [0, 4].

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::grader::{extract, is_correct, DEFAULT_REL_TOL};
use crate::langscript::profile_text;

/// Minimum Bengali ratio of the reasoning span for the language reward.
pub const DEFAULT_BENGALI_MIN: f64 = 0.80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub format: u8,
    pub correctness: u8,
    pub bengali: u8,
    pub total: u8,
}

impl RewardBreakdown {
    fn new(format: u8, correctness: u8, bengali: u8) -> Self {
        RewardBreakdown {
            format,
            correctness,
            bengali,
            total: format + correctness + bengali,
        }
    }
}

/// The generation with the answer-tag pair and its contents removed; the
/// whole generation when no well-formed pair exists. Model think-tag
/// contents, when present, stay in the span.
pub fn reasoning_span(generation: &str) -> Cow<'_, str> {
    match extract(generation).tag_bounds {
        Some((start, end)) => {
            let mut s = String::with_capacity(generation.len() - (end - start));
            s.push_str(&generation[..start]);
            s.push_str(&generation[end..]);
            Cow::Owned(s)
        }
        None => Cow::Borrowed(generation),
    }
}

/// Scores one generation against a gold answer.
pub fn score(generation: &str, gold: f64, bengali_min: f64) -> RewardBreakdown {
    let ext = extract(generation);

    let format = u8::from(ext.format_ok);

    let correct = ext
        .value
        .is_some_and(|v| is_correct(v, gold, DEFAULT_REL_TOL));
    let correctness = match (correct, ext.bengali_answer) {
        (false, _) => 0,
        (true, false) => 1,
        (true, true) => 2,
    };

    let reasoning = reasoning_span(generation);
    let profile = profile_text(&reasoning);
    let bengali = u8::from(!profile.empty && profile.bengali_ratio >= bengali_min);

    RewardBreakdown::new(format, correctness, bengali)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BN_REASONING: &str = "রামের পাঁচটি আম ছিল দুটি খেয়ে ফেলার পরে তার তিনটি আম রইল তাই উত্তর হলো";

    #[test]
    fn perfect_generation_scores_four() {
        let generation = format!("{BN_REASONING} <answer>৪২</answer>");
        let b = score(&generation, 42.0, DEFAULT_BENGALI_MIN);
        assert_eq!((b.format, b.correctness, b.bengali), (1, 2, 1));
        assert_eq!(b.total, 4);
    }

    #[test]
    fn empty_generation_scores_zero() {
        let b = score("", 42.0, DEFAULT_BENGALI_MIN);
        assert_eq!((b.format, b.correctness, b.bengali, b.total), (0, 0, 0, 0));
    }

    #[test]
    fn bare_correct_number_without_tags_scores_zero() {
        let b = score(
            "We compute 6 times 7 and the answer is 42",
            42.0,
            DEFAULT_BENGALI_MIN,
        );
        assert_eq!((b.format, b.correctness, b.bengali, b.total), (0, 0, 0, 0));
    }

    #[test]
    fn wrong_answer_with_bengali_reasoning_scores_two() {
        let generation = format!("{BN_REASONING} <answer>7</answer>");
        let b = score(&generation, 42.0, DEFAULT_BENGALI_MIN);
        assert_eq!((b.format, b.correctness, b.bengali), (1, 0, 1));
        assert_eq!(b.total, 2);
    }

    #[test]
    fn ascii_answer_earns_one_correctness_point() {
        let generation = format!("{BN_REASONING} <answer>42</answer>");
        let b = score(&generation, 42.0, DEFAULT_BENGALI_MIN);
        assert_eq!((b.format, b.correctness, b.bengali), (1, 1, 1));
        assert_eq!(b.total, 3);
    }

    #[test]
    fn english_reasoning_misses_language_reward() {
        let generation = "first multiply then divide <answer>৪২</answer>";
        let b = score(generation, 42.0, DEFAULT_BENGALI_MIN);
        assert_eq!((b.format, b.correctness, b.bengali), (1, 2, 0));
        assert_eq!(b.total, 3);
    }

    #[test]
    fn answer_span_is_excluded_from_reasoning() {
        // The span is ASCII; reasoning alone is pure Bengali and must still
        // earn the language reward.
        let generation = format!("{BN_REASONING}<answer>1234567890123456789012345</answer>");
        let b = score(
            &generation,
            1234567890123456789012345.0,
            DEFAULT_BENGALI_MIN,
        );
        assert_eq!(b.bengali, 1);
    }

    #[test]
    fn unformatted_bengali_reasoning_still_earns_language_point() {
        let b = score(BN_REASONING, 42.0, DEFAULT_BENGALI_MIN);
        assert_eq!((b.format, b.correctness, b.bengali), (0, 0, 1));
        assert_eq!(b.total, 1);
    }

    #[test]
    fn reasoning_span_strips_tag_pair() {
        let generation = "আগে <answer>42</answer> পরে";
        assert_eq!(reasoning_span(generation), "আগে  পরে");
        assert_eq!(reasoning_span("no tags"), "no tags");
    }
}
