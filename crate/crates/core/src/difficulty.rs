//! Pass@k-style difficulty tagging from evaluator rollouts.
//!
//! An external model generates `k` independent solutions per problem (k = 32
//! by default); the number that grade correct is the fine difficulty signal.
//! A problem its evaluator never solved is dropped. The four coarse buckets
//! split `[1, k]` into equal quartiles, hardest first: at k = 32 these are
//! Olympiad `[1,8]`, Hard `[9,16]`, Medium `[17,24]`, Easy `[25,32]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusRecord;
use crate::error::{Error, Result};
use crate::grader::{self, DEFAULT_REL_TOL};

/// Default rollout count per problem.
pub const DEFAULT_K: u32 = 32;

/// Coarse difficulty bucket, ordered easiest to hardest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bucket {
    Easy,
    Medium,
    Hard,
    Olympiad,
}

impl std::fmt::Display for Bucket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Bucket::Easy => "easy",
            Bucket::Medium => "medium",
            Bucket::Hard => "hard",
            Bucket::Olympiad => "olympiad",
        };
        f.write_str(name)
    }
}

/// Fine correctness count plus its coarse bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifficultyTag {
    pub correct_count: u32,
    pub bucket: Bucket,
}

/// Per-problem list of k model generations, produced externally and graded
/// here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutRecord {
    pub problem_id: String,
    pub generations: Vec<String>,
}

/// A corpus record joined with its fine difficulty count.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedRecord {
    pub record: CorpusRecord,
    pub correct_count: u32,
}

impl TaggedRecord {
    /// Reads the count from the record's meta; `None` when untagged.
    pub fn from_record(record: CorpusRecord) -> Option<Self> {
        let correct_count = record.correct_count()?;
        Some(TaggedRecord {
            record,
            correct_count,
        })
    }

    /// Folds the count back into the record's meta for serialization.
    pub fn into_record(self) -> CorpusRecord {
        let count = self.correct_count;
        self.record.with_correct_count(count)
    }

    pub fn id(&self) -> &str {
        &self.record.id
    }
}

/// Counts the generations in `rollout` whose extracted answer is correct
/// against `gold`. A rollout with other than `expected_k` generations is an
/// error unless `allow_partial` is set.
pub fn grade_rollouts(
    rollout: &RolloutRecord,
    gold: f64,
    expected_k: u32,
    allow_partial: bool,
) -> Result<u32> {
    if !allow_partial && rollout.generations.len() != expected_k as usize {
        return Err(Error::RolloutSize {
            problem_id: rollout.problem_id.clone(),
            expected: expected_k as usize,
            found: rollout.generations.len(),
        });
    }
    let correct = rollout
        .generations
        .par_iter()
        .filter(|generation| {
            grader::extract(generation)
                .value
                .is_some_and(|v| grader::is_correct(v, gold, DEFAULT_REL_TOL))
        })
        .count();
    Ok(correct as u32)
}

/// Maps a correct count to its difficulty tag. Count 0 means the problem is
/// dropped (`None`). `k` must be positive and divisible by 4.
pub fn tag(correct_count: u32, k: u32) -> Result<Option<DifficultyTag>> {
    if k == 0 || k % 4 != 0 {
        return Err(Error::InvalidParam(format!(
            "k must be positive and divisible by 4, got {k}"
        )));
    }
    if correct_count > k {
        return Err(Error::CountOutOfRange {
            count: correct_count,
            k,
        });
    }
    if correct_count == 0 {
        return Ok(None);
    }
    let width = k / 4;
    let bucket = match (correct_count - 1) / width {
        0 => Bucket::Olympiad,
        1 => Bucket::Hard,
        2 => Bucket::Medium,
        _ => Bucket::Easy,
    };
    Ok(Some(DifficultyTag {
        correct_count,
        bucket,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rollout(problem_id: &str, generations: Vec<String>) -> RolloutRecord {
        RolloutRecord {
            problem_id: problem_id.to_string(),
            generations,
        }
    }

    #[test]
    fn boundary_counts_map_to_buckets() {
        let cases = [
            (1, Bucket::Olympiad),
            (8, Bucket::Olympiad),
            (9, Bucket::Hard),
            (16, Bucket::Hard),
            (17, Bucket::Medium),
            (24, Bucket::Medium),
            (25, Bucket::Easy),
            (32, Bucket::Easy),
        ];
        for (count, expected) in cases {
            let t = tag(count, 32).unwrap().unwrap();
            assert_eq!(t.bucket, expected, "count {count}");
            assert_eq!(t.correct_count, count);
        }
    }

    #[test]
    fn zero_count_drops_the_record() {
        assert_eq!(tag(0, 32).unwrap(), None);
    }

    #[test]
    fn out_of_range_count_is_an_error() {
        assert!(tag(33, 32).is_err());
        assert!(tag(1, 30).is_err());
        assert!(tag(0, 0).is_err());
    }

    #[test]
    fn generalizes_to_other_k() {
        assert_eq!(tag(1, 8).unwrap().unwrap().bucket, Bucket::Olympiad);
        assert_eq!(tag(2, 8).unwrap().unwrap().bucket, Bucket::Olympiad);
        assert_eq!(tag(3, 8).unwrap().unwrap().bucket, Bucket::Hard);
        assert_eq!(tag(8, 8).unwrap().unwrap().bucket, Bucket::Easy);
    }

    #[test]
    fn grades_planted_rollouts() {
        let mut generations =
            vec!["ভুল উত্তর <answer>৯৯৯</answer>".to_string(); 32];
        for slot in [1, 4, 7, 10, 20, 25, 31] {
            generations[slot] = "যুক্তি <answer>৪২</answer>".to_string();
        }
        let r = rollout("p1", generations);
        assert_eq!(grade_rollouts(&r, 42.0, 32, false).unwrap(), 7);
    }

    #[test]
    fn all_or_none_correct() {
        let all = rollout("p1", vec!["<answer>5</answer>".to_string(); 32]);
        assert_eq!(grade_rollouts(&all, 5.0, 32, false).unwrap(), 32);
        let none = rollout("p2", vec!["no tags here".to_string(); 32]);
        assert_eq!(grade_rollouts(&none, 5.0, 32, false).unwrap(), 0);
    }

    #[test]
    fn wrong_k_errors_unless_partial_allowed() {
        let r = rollout("p1", vec!["<answer>5</answer>".to_string(); 3]);
        assert!(grade_rollouts(&r, 5.0, 32, false).is_err());
        assert_eq!(grade_rollouts(&r, 5.0, 32, true).unwrap(), 3);
    }

    #[test]
    fn grading_is_permutation_invariant() {
        let mut generations: Vec<String> = (0..32)
            .map(|i| format!("<answer>{}</answer>", if i % 3 == 0 { 7 } else { 8 }))
            .collect();
        let before = grade_rollouts(&rollout("p", generations.clone()), 7.0, 32, false).unwrap();
        generations.reverse();
        generations.swap(0, 15);
        let after = grade_rollouts(&rollout("p", generations), 7.0, 32, false).unwrap();
        assert_eq!(before, after);
    }
}
