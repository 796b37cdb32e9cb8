//! Split construction: a fine-grained balanced RLVR split, an SFT split from
//! the remainder, and a dev candidate set validated by multi-model majority
//! voting.
//!
//! Dev candidates are sampled per fine difficulty count (30 each by default).
//! The RLVR split then takes the same number of records from every populated
//! fine count — the minimum availability — so its per-count distribution is
//! exactly uniform. Whatever remains and carries a chain-of-thought solution
//! becomes the SFT split.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::difficulty::TaggedRecord;
use crate::error::{Error, Result};
use crate::grader::{is_correct, DEFAULT_REL_TOL};
use crate::hash64::derive_seed;

/// Dev-set draw per fine difficulty count.
pub const DEFAULT_DEV_PER_BUCKET: usize = 30;

/// Number of independent generations each model produces per problem.
pub const VOTES_PER_MODEL: usize = 3;
/// Number of models whose consensus must be correct for a dev problem.
pub const MODELS_REQUIRED: usize = 3;

// Stream tags so dev and RLVR sampling never share a generator.
const CTX_DEV: u64 = 1;
const CTX_RLVR: u64 = 2;

/// One model's three independent answers for one problem. `None` marks a
/// generation whose answer could not be extracted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub problem_id: String,
    pub model_id: String,
    pub answers: Vec<Option<f64>>,
}

/// Ids per split plus the RLVR per-fine-count distribution.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SplitManifest {
    pub rlvr_ids: Vec<String>,
    pub sft_ids: Vec<String>,
    pub dev_ids: Vec<String>,
    pub per_fine_count: BTreeMap<u32, u64>,
}

fn group_by_count(tagged: &[TaggedRecord]) -> BTreeMap<u32, Vec<usize>> {
    let mut buckets: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (idx, t) in tagged.iter().enumerate() {
        buckets.entry(t.correct_count).or_default().push(idx);
    }
    buckets
}

/// Draws `amount` indices from `pool` without replacement, deterministically
/// for a given seed, returning them in input order.
fn sample_in_order(pool: &[usize], amount: usize, seed: u64) -> Vec<usize> {
    if amount >= pool.len() {
        return pool.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = rand::seq::index::sample(&mut rng, pool.len(), amount).into_vec();
    picks.sort_unstable();
    picks.into_iter().map(|i| pool[i]).collect()
}

/// Samples `per_bucket` records from every fine count, deterministically.
/// Buckets with fewer records contribute everything they have, with a
/// warning. Returns dev candidate ids (grouped by count, input order within
/// a count) and the warnings.
pub fn build_dev(
    tagged: &[TaggedRecord],
    per_bucket: usize,
    seed: u64,
) -> (Vec<String>, Vec<String>) {
    let buckets = group_by_count(tagged);
    let mut ids = Vec::new();
    let mut warnings = Vec::new();
    for (&count, pool) in &buckets {
        if pool.len() < per_bucket {
            warnings.push(format!(
                "fine count {count}: only {} records available, wanted {per_bucket}; taking all",
                pool.len()
            ));
        }
        let bucket_seed = derive_seed(seed, &[CTX_DEV, count as u64]);
        for idx in sample_in_order(pool, per_bucket, bucket_seed) {
            ids.push(tagged[idx].id().to_string());
        }
    }
    (ids, warnings)
}

/// Majority vote for one problem: each model's consensus is any answer that
/// appears (under the grader's numeric equivalence) in at least two of its
/// three generations; the problem is kept iff all three models reach a
/// consensus that is correct against `gold`.
pub fn majority_filter(verdicts: &[VerdictRecord], gold: f64) -> Result<bool> {
    if verdicts.len() != MODELS_REQUIRED {
        let problem_id = verdicts
            .first()
            .map(|v| v.problem_id.clone())
            .unwrap_or_default();
        return Err(Error::VerdictShape {
            problem_id,
            reason: format!(
                "expected verdicts from {MODELS_REQUIRED} models, found {}",
                verdicts.len()
            ),
        });
    }
    for v in verdicts {
        if v.answers.len() != VOTES_PER_MODEL {
            return Err(Error::VerdictShape {
                problem_id: v.problem_id.clone(),
                reason: format!(
                    "model {}: expected {VOTES_PER_MODEL} answers, found {}",
                    v.model_id,
                    v.answers.len()
                ),
            });
        }
    }
    Ok(verdicts.iter().all(|v| model_consensus_correct(v, gold)))
}

fn model_consensus_correct(verdict: &VerdictRecord, gold: f64) -> bool {
    verdict.answers.iter().flatten().any(|&candidate| {
        let support = verdict
            .answers
            .iter()
            .flatten()
            .filter(|&&a| is_correct(a, candidate, DEFAULT_REL_TOL))
            .count();
        support >= 2 && is_correct(candidate, gold, DEFAULT_REL_TOL)
    })
}

/// Builds the RLVR and SFT id sets from tagged records with dev ids already
/// removed. RLVR takes the minimum bucket size from every populated fine
/// count; SFT is the remainder that has a chain-of-thought solution. The
/// manifest's `dev_ids` is left empty for the caller to fill.
pub fn build_rlvr_and_sft(tagged: &[TaggedRecord], seed: u64) -> (SplitManifest, Vec<String>) {
    let buckets = group_by_count(tagged);
    let mut warnings = Vec::new();

    let populated: BTreeMap<u32, &Vec<usize>> =
        buckets.iter().map(|(&c, pool)| (c, pool)).collect();
    if let Some(max_count) = populated.keys().max() {
        for c in 1..=*max_count {
            if !populated.contains_key(&c) {
                warnings.push(format!(
                    "fine count {c} has no records; balancing over populated counts only"
                ));
            }
        }
    }

    let quota = populated.values().map(|pool| pool.len()).min().unwrap_or(0);

    let mut in_rlvr = vec![false; tagged.len()];
    let mut per_fine_count = BTreeMap::new();
    let mut rlvr_ids = Vec::new();
    for (&count, pool) in &populated {
        let bucket_seed = derive_seed(seed, &[CTX_RLVR, count as u64]);
        let picked = sample_in_order(pool, quota, bucket_seed);
        per_fine_count.insert(count, picked.len() as u64);
        for idx in picked {
            in_rlvr[idx] = true;
            rlvr_ids.push(tagged[idx].id().to_string());
        }
    }

    let sft_ids: Vec<String> = tagged
        .iter()
        .enumerate()
        .filter(|(idx, t)| !in_rlvr[*idx] && t.record.solution_cot.is_some())
        .map(|(_, t)| t.id().to_string())
        .collect();

    (
        SplitManifest {
            rlvr_ids,
            sft_ids,
            dev_ids: Vec::new(),
            per_fine_count,
        },
        warnings,
    )
}
