//! Corpus curation and curriculum-RLVR tooling for Bengali math data.
//!
//! The pipeline runs filter → dedup → decontaminate → difficulty-tag →
//! split, with a verifiable reward function for grading model generations, a
//! curriculum shuffler that orders RLVR training data easy-to-hard, and a
//! desk-scale simulator of the cold-start behavior of group-relative reward
//! training.
//!
//! See each module for details:
//! - [`corpus`]: record model, line-delimited I/O, corpus statistics
//! - [`langscript`]: Bengali-block ratios and digit transliteration
//! - [`filter`]: rule-based record filtering
//! - [`dedup`]: fuzzy and MinHash deduplication, decontamination
//! - [`grader`]: answer extraction and numeric correctness
//! - [`rewards`]: format/correctness/Bengali reward function
//! - [`difficulty`]: pass@k-style difficulty tagging
//! - [`splits`]: RLVR/SFT/dev split construction and majority voting
//! - [`curriculum`]: curriculum-based dataset shuffling
//! - [`simulate`]: cold-start simulator
//! - [`synth`]: deterministic fixture generators for tests and benchmarks

pub mod corpus;
pub mod curriculum;
pub mod dedup;
pub mod difficulty;
pub mod error;
pub mod filter;
pub mod grader;
mod hash64;
pub mod jsonl;
pub mod langscript;
pub mod rewards;
pub mod simulate;
pub mod splits;
pub mod synth;

pub use corpus::{compute_stats, compute_stats_k, read_records, CorpusRecord, CorpusStats, Source};
pub use curriculum::{emit_order, plan, CurriculumPlan};
pub use dedup::{
    decontaminate, fuzzy_dedup, minhash_dedup, minhash_signature, DedupReport, MinHashSignature,
};
pub use difficulty::{grade_rollouts, tag, Bucket, DifficultyTag, RolloutRecord, TaggedRecord};
pub use error::{Error, Result};
pub use filter::{apply_rules, FilterReport};
pub use grader::{extract, is_correct, Extraction};
pub use langscript::{profile_text, transliterate_digits, ScriptProfile};
pub use rewards::{score, RewardBreakdown};
pub use simulate::{compare, run, CompareSummary, SimConfig, SimResult};
pub use splits::{build_dev, build_rlvr_and_sft, majority_filter, SplitManifest, VerdictRecord};
