//! Rule-based record filtering: keep only verifiable, Bengali, free-form
//! problems.
//!
//! A record survives iff, checked in this order:
//! (a) its answer parses as a finite decimal,
//! (b) its problem text is at least `min_bengali` Bengali by character ratio,
//! (c) it does not look like a multiple-choice question.
//!
//! Drop reasons are mutually exclusive: a record is counted under the first
//! rule it fails.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusRecord;
use crate::error::{Error, Result};
use crate::grader::parse_decimal;
use crate::langscript::profile_text;

/// Minimum Bengali character ratio a problem must reach to be kept.
pub const DEFAULT_MIN_BENGALI: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FilterReport {
    pub kept: u64,
    pub dropped_non_numeric: u64,
    pub dropped_low_bengali: u64,
    pub dropped_mcq: u64,
}

impl FilterReport {
    pub fn input_total(&self) -> u64 {
        self.kept + self.dropped_non_numeric + self.dropped_low_bengali + self.dropped_mcq
    }

    pub fn merge(&mut self, other: &FilterReport) {
        self.kept += other.kept;
        self.dropped_non_numeric += other.dropped_non_numeric;
        self.dropped_low_bengali += other.dropped_low_bengali;
        self.dropped_mcq += other.dropped_mcq;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    NonNumeric,
    LowBengali,
    Mcq,
}

/// Why `record` would be dropped, or `None` if it is kept. Stateless per
/// record.
pub fn classify(record: &CorpusRecord, min_bengali: f64) -> Option<DropReason> {
    if parse_decimal(&record.answer).is_none() {
        return Some(DropReason::NonNumeric);
    }
    if profile_text(&record.problem).bengali_ratio < min_bengali {
        return Some(DropReason::LowBengali);
    }
    if is_mcq(&record.problem) {
        return Some(DropReason::Mcq);
    }
    None
}

/// Filters `records`, returning the kept records in input order and the
/// per-rule drop counts.
pub fn apply_rules(
    records: Vec<CorpusRecord>,
    min_bengali: f64,
) -> Result<(Vec<CorpusRecord>, FilterReport)> {
    if !(0.0..=1.0).contains(&min_bengali) {
        return Err(Error::InvalidParam(format!(
            "min_bengali must be in [0, 1], got {min_bengali}"
        )));
    }
    let classified: Vec<(CorpusRecord, Option<DropReason>)> = records
        .into_par_iter()
        .map(|record| {
            let reason = classify(&record, min_bengali);
            (record, reason)
        })
        .collect();

    let mut report = FilterReport::default();
    let mut kept = Vec::new();
    for (record, reason) in classified {
        match reason {
            None => {
                report.kept += 1;
                kept.push(record);
            }
            Some(DropReason::NonNumeric) => report.dropped_non_numeric += 1,
            Some(DropReason::LowBengali) => report.dropped_low_bengali += 1,
            Some(DropReason::Mcq) => report.dropped_mcq += 1,
        }
    }
    Ok((kept, report))
}

const MCQ_DELIMITERS: [char; 4] = [')', '.', ':', '।'];

fn is_mcq_marker_letter(c: char) -> Option<char> {
    match c {
        'ক' | 'খ' | 'গ' | 'ঘ' => Some(c),
        'A'..='D' => Some(c.to_ascii_lowercase()),
        'a'..='d' => Some(c),
        _ => None,
    }
}

/// Conservative multiple-choice detector: the text must contain at least
/// three *distinct* option markers — a Bengali option letter (ক খ গ ঘ) or
/// Latin A–D — each at a line start, after whitespace, or after `(`, and
/// each immediately followed by a delimiter (`)`, `.`, `:`, `।`).
/// Prefers false negatives over discarding word problems.
pub fn is_mcq(problem: &str) -> bool {
    let chars: Vec<char> = problem.chars().collect();
    let mut markers = std::collections::BTreeSet::new();
    for (i, &c) in chars.iter().enumerate() {
        let Some(letter) = is_mcq_marker_letter(c) else {
            continue;
        };
        let prev_ok = i == 0 || chars[i - 1].is_whitespace() || chars[i - 1] == '(';
        let next_ok = chars
            .get(i + 1)
            .is_some_and(|&n| MCQ_DELIMITERS.contains(&n));
        if prev_ok && next_ok {
            markers.insert(letter);
        }
    }
    markers.len() >= 3
}
