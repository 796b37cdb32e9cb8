//! Curriculum-based dataset shuffling.
//!
//! Records are grouped by fine difficulty count and emitted as one block per
//! populated count, easiest primary first (count 32 down to 1). With B
//! populated buckets and a primary bucket of size `n_d`, each block holds
//!
//! ```text
//! q = round((1 - primary_frac) * n_d / (B - 1))   per other bucket
//! p = n_d - (B - 1) * q                           from the primary bucket
//! ```
//!
//! so every block has exactly `n_d` items (at the default 60/40 split and
//! a uniform 229-per-bucket input: p = 136, 31 * 3 = 93 others, block 229).
//! Primary items are the first `p` of the bucket in input order; other
//! buckets contribute a rotating slice (offset advances by `q` per block) so
//! successive blocks draw different filler records. Each block is then
//! shuffled with the seeded generator and the blocks are concatenated.
//!
//! A record can appear once as primary material and repeatedly as filler in
//! other blocks; consumers treat the emitted order as epoch semantics.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hash64::derive_seed;

/// Fraction of each block drawn from its primary bucket.
pub const DEFAULT_PRIMARY_FRAC: f64 = 0.6;

const CTX_CURRICULUM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurriculumBlock {
    /// Fine count of the block's primary bucket.
    pub primary_count: u32,
    /// Shuffled record ids making up the block.
    pub ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurriculumPlan {
    /// Blocks ordered easiest primary first (count descending).
    pub blocks: Vec<CurriculumBlock>,
    pub seed: u64,
}

/// Builds the curriculum plan for `items` (record id, fine count ≥ 1).
/// Returns the plan plus warnings about non-uniform or short buckets.
pub fn plan(
    items: &[(String, u32)],
    primary_frac: f64,
    seed: u64,
) -> Result<(CurriculumPlan, Vec<String>)> {
    if !(primary_frac > 0.0 && primary_frac < 1.0) {
        return Err(Error::InvalidParam(format!(
            "primary_frac must be in (0, 1), got {primary_frac}"
        )));
    }
    if let Some((id, _)) = items.iter().find(|(_, count)| *count == 0) {
        return Err(Error::InvalidParam(format!(
            "record {id} has fine count 0; untagged or dropped records cannot be scheduled"
        )));
    }

    // Group ids by count, descending count = easiest primary first.
    let mut buckets: Vec<(u32, Vec<&str>)> = Vec::new();
    for (id, count) in items {
        match buckets.iter_mut().find(|(c, _)| c == count) {
            Some((_, ids)) => ids.push(id),
            None => buckets.push((*count, vec![id])),
        }
    }
    buckets.sort_by_key(|(count, _)| std::cmp::Reverse(*count));

    let mut warnings = Vec::new();
    let sizes: Vec<usize> = buckets.iter().map(|(_, ids)| ids.len()).collect();
    if sizes.windows(2).any(|w| w[0] != w[1]) {
        warnings.push(format!(
            "bucket sizes are not uniform (min {}, max {}); using per-bucket sizes",
            sizes.iter().min().unwrap(),
            sizes.iter().max().unwrap()
        ));
    }

    let bucket_count = buckets.len();
    let mut blocks = Vec::with_capacity(bucket_count);

    for (block_idx, (primary_count, primary_ids)) in buckets.iter().enumerate() {
        let n_d = primary_ids.len();
        let mut ids: Vec<String>;

        if bucket_count == 1 {
            ids = primary_ids.iter().map(|s| s.to_string()).collect();
        } else {
            let others = bucket_count - 1;
            let q = ((1.0 - primary_frac) * n_d as f64 / others as f64).round() as usize;
            let p = n_d.saturating_sub(others * q);
            if p == 0 && n_d > 0 {
                warnings.push(format!(
                    "block for count {primary_count}: other-bucket quota {q} x {others} \
                     consumes the whole block; no primary draw left"
                ));
            }

            ids = primary_ids.iter().take(p).map(|s| s.to_string()).collect();
            for (other_count, other_ids) in &buckets {
                if other_count == primary_count {
                    continue;
                }
                let available = other_ids.len();
                if available < q {
                    warnings.push(format!(
                        "block for count {primary_count}: bucket {other_count} has only \
                         {available} records, wanted {q}; taking all"
                    ));
                }
                let take = q.min(available);
                let offset = if available == 0 {
                    0
                } else {
                    (block_idx * q) % available
                };
                for t in 0..take {
                    ids.push(other_ids[(offset + t) % available].to_string());
                }
            }
        }

        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(seed, &[CTX_CURRICULUM, *primary_count as u64]));
        ids.shuffle(&mut rng);
        blocks.push(CurriculumBlock {
            primary_count: *primary_count,
            ids,
        });
    }

    Ok((CurriculumPlan { blocks, seed }, warnings))
}

/// Concatenates the block id lists into the final training order.
pub fn emit_order(plan: &CurriculumPlan) -> Vec<String> {
    plan.blocks
        .iter()
        .flat_map(|block| block.ids.iter().cloned())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn uniform_items(
        per_bucket: usize,
        counts: std::ops::RangeInclusive<u32>,
    ) -> Vec<(String, u32)> {
        let mut items = Vec::new();
        for count in counts {
            for i in 0..per_bucket {
                items.push((format!("c{count}_{i}"), count));
            }
        }
        items
    }

    #[test]
    fn production_scale_arithmetic() {
        // 229 records in each of 32 buckets: 136 primary + 31 * 3 others.
        let items = uniform_items(229, 1..=32);
        let (plan, warnings) = plan(&items, 0.6, 42).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(plan.blocks.len(), 32);
        for (idx, block) in plan.blocks.iter().enumerate() {
            assert_eq!(block.primary_count, 32 - idx as u32);
            assert_eq!(block.ids.len(), 229);
            let primary = block
                .ids
                .iter()
                .filter(|id| id.starts_with(&format!("c{}_", block.primary_count)))
                .count();
            assert_eq!(primary, 136);
        }
    }

    #[test]
    fn small_example_arithmetic() {
        // n_d = 10, B = 4: q = round(0.4 * 10 / 3) = 1, p = 7.
        let items = uniform_items(10, 1..=4);
        let (plan, _) = plan(&items, 0.6, 1).unwrap();
        for block in &plan.blocks {
            assert_eq!(block.ids.len(), 10);
            let mut by_bucket: HashMap<u32, usize> = HashMap::new();
            for id in &block.ids {
                let count: u32 = id[1..id.find('_').unwrap()].parse().unwrap();
                *by_bucket.entry(count).or_default() += 1;
            }
            assert_eq!(by_bucket[&block.primary_count], 7);
            for (&count, &n) in &by_bucket {
                if count != block.primary_count {
                    assert_eq!(n, 1);
                }
            }
        }
    }

    #[test]
    fn single_bucket_is_a_plain_shuffle() {
        let items = uniform_items(12, 5..=5);
        let (plan, _) = plan(&items, 0.6, 9).unwrap();
        assert_eq!(plan.blocks.len(), 1);
        assert_eq!(plan.blocks[0].ids.len(), 12);
        let mut sorted = plan.blocks[0].ids.clone();
        sorted.sort();
        let mut expected: Vec<String> = items.iter().map(|(id, _)| id.clone()).collect();
        expected.sort();
        assert_eq!(sorted, expected);
    }

    #[test]
    fn blocks_run_easiest_primary_first() {
        let items = uniform_items(6, 1..=8);
        let (plan, _) = plan(&items, 0.6, 3).unwrap();
        let counts: Vec<u32> = plan.blocks.iter().map(|b| b.primary_count).collect();
        assert_eq!(counts, vec![8, 7, 6, 5, 4, 3, 2, 1]);
    }

    #[test]
    fn emit_order_concatenates_blocks() {
        let items = uniform_items(3, 1..=2);
        let (plan, _) = plan(&items, 0.6, 5).unwrap();
        let order = emit_order(&plan);
        let expected: usize = plan.blocks.iter().map(|b| b.ids.len()).sum();
        assert_eq!(order.len(), expected);
        // The easy-primary block comes first in the emitted order.
        assert_eq!(&order[..plan.blocks[0].ids.len()], &plan.blocks[0].ids[..]);
    }

    #[test]
    fn same_seed_reproduces_the_order() {
        let items = uniform_items(20, 1..=6);
        let (plan_a, _) = plan(&items, 0.6, 77).unwrap();
        let (plan_b, _) = plan(&items, 0.6, 77).unwrap();
        let (plan_c, _) = plan(&items, 0.6, 78).unwrap();
        assert_eq!(emit_order(&plan_a), emit_order(&plan_b));
        assert_ne!(emit_order(&plan_a), emit_order(&plan_c));
    }

    #[test]
    fn rotating_slice_varies_filler_across_blocks() {
        let items = uniform_items(10, 1..=4);
        let (plan, _) = plan(&items, 0.6, 13).unwrap();
        // Bucket 1 fills blocks for counts 4, 3, and 2 (block indices 0..3)
        // with q = 1 each; the rotation offset differs per block, so the
        // drawn filler ids differ.
        let filler_from_bucket1: Vec<Vec<&String>> = plan
            .blocks
            .iter()
            .filter(|b| b.primary_count != 1)
            .map(|b| b.ids.iter().filter(|id| id.starts_with("c1_")).collect())
            .collect();
        assert!(filler_from_bucket1.iter().all(|f| f.len() == 1));
        assert_ne!(filler_from_bucket1[0], filler_from_bucket1[1]);
    }

    #[test]
    fn short_other_bucket_is_taken_whole_with_warning() {
        let mut items = uniform_items(10, 1..=4);
        items.retain(|(id, _)| !(id.starts_with("c2_") && id.as_str() > "c2_0"));
        let (_, warnings) = plan(&items, 0.6, 1).unwrap();
        assert!(warnings.iter().any(|w| w.contains("not uniform")));
    }

    #[test]
    fn count_zero_is_rejected() {
        let items = vec![("a".to_string(), 0u32)];
        assert!(plan(&items, 0.6, 1).is_err());
    }

    #[test]
    fn invalid_primary_frac_is_rejected() {
        assert!(plan(&[], 0.0, 1).is_err());
        assert!(plan(&[], 1.0, 1).is_err());
    }
}
