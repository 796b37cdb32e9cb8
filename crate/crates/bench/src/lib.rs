//! Fixture builders shared by the benchmarks. The interesting code lives in
//! `benches/pipeline.rs`; run it with `cargo bench -p bnmath-bench`.

use bnmath_core::corpus::CorpusRecord;
use bnmath_core::synth;

/// A dedup-shaped corpus: `n` records, one in ten a near-copy of an earlier
/// record.
pub fn corpus_with_duplicates(n: usize, seed: u64) -> Vec<CorpusRecord> {
    let originals = n - n / 10;
    let mut records = synth::corpus(originals, seed);
    let mut rng = synth::rng(seed ^ 0xD0D0);
    for i in 0..n / 10 {
        let source = records[i * 7 % originals].clone();
        let mut copy = source.clone();
        copy.id = format!("copy{i:04}");
        copy.problem = synth::perturb_chars(&mut rng, &source.problem, 0.05);
        records.push(copy);
    }
    records
}

/// Uniform tagged items for curriculum planning: `per_count` ids in each of
/// the 32 fine buckets.
pub fn curriculum_items(per_count: usize, seed: u64) -> Vec<(String, u32)> {
    synth::tagged_uniform(per_count, 32, seed)
        .into_iter()
        .map(|t| (t.record.id, t.correct_count))
        .collect()
}
