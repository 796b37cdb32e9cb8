//! Two-stage deduplication and benchmark decontamination.
//!
//! Stage one is fuzzy matching: candidate pairs are generated by character
//! 3-gram overlap, then confirmed with exact normalized Levenshtein
//! similarity (`1 - edit_distance / max_len`). Stage two is MinHash: 200
//! seeded hash functions over character 3-shingles, with LSH banding
//! (20 bands x 10 rows) for candidate generation; the removal decision is
//! always made on the full 200-slot estimate, so banding affects recall only.
//! Decontamination compares every training record against every benchmark
//! record on the full estimate.
//!
//! All similarity is computed on normalized problem text: NFC, lowercased
//! Latin ranges, punctuation stripped, whitespace runs collapsed.
//!
//! Within a duplicate cluster the record earliest in input order survives,
//! and identical inputs and seeds reproduce byte-identical reports.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusRecord;
use crate::error::{Error, Result};
use crate::hash64::{fnv1a, mix};

/// Number of hash functions in a MinHash signature.
pub const SIGNATURE_LEN: usize = 200;
/// Character shingle width for both blocking and MinHash.
pub const SHINGLE_SIZE: usize = 3;
/// Normalized-Levenshtein similarity at or above which fuzzy dedup removes.
pub const DEFAULT_FUZZY_THRESHOLD: f64 = 0.70;
/// Estimated-Jaccard threshold for MinHash dedup and decontamination.
pub const DEFAULT_MINHASH_THRESHOLD: f64 = 0.50;
/// Master seed for the MinHash hash family.
pub const DEFAULT_SEED: u64 = 0xda7a_5eed;

const LSH_BANDS: usize = 20;
const LSH_ROWS: usize = 10;
const _: () = assert!(SIGNATURE_LEN == LSH_BANDS * LSH_ROWS);

/// How fuzzy similarity is confirmed after 3-gram blocking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FuzzyMode {
    /// Normalized Levenshtein similarity over normalized text.
    #[default]
    Levenshtein,
    /// Exact Jaccard over the 3-gram sets.
    Jaccard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DedupStage {
    Fuzzy,
    Minhash,
    Contamination,
}

/// One removal: the surviving record, the removed record, and the similarity
/// that triggered it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupPair {
    pub kept_id: String,
    pub removed_id: String,
    pub similarity: f64,
    pub stage: DedupStage,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DedupReport {
    pub kept: u64,
    pub removed_fuzzy: u64,
    pub removed_minhash: u64,
    pub removed_contaminated: u64,
    /// Every removed id appears in exactly one pair.
    pub pairs: Vec<DedupPair>,
}

impl DedupReport {
    pub fn removed_total(&self) -> u64 {
        self.removed_fuzzy + self.removed_minhash + self.removed_contaminated
    }

    /// Combines the report of a stage with the report of a later stage run
    /// on its survivors.
    pub fn chain(mut self, next: DedupReport) -> DedupReport {
        self.kept = next.kept;
        self.removed_fuzzy += next.removed_fuzzy;
        self.removed_minhash += next.removed_minhash;
        self.removed_contaminated += next.removed_contaminated;
        self.pairs.extend(next.pairs);
        self
    }
}

/// Normalizes text for similarity comparison: NFC, Latin-range lowercasing,
/// punctuation stripped, whitespace runs collapsed to single spaces, ends
/// trimmed.
pub fn normalize_text(text: &str) -> String {
    let nfc = icu_normalizer::ComposingNormalizerBorrowed::new_nfc().normalize(text);
    let mut out = String::with_capacity(nfc.len());
    let mut pending_space = false;
    for c in nfc.chars() {
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        if is_stripped_punct(c) {
            continue;
        }
        if pending_space {
            if !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
        }
        if (c as u32) < 0x250 {
            // Latin ranges end at U+024F; lowercase only those.
            out.extend(c.to_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

fn is_stripped_punct(c: char) -> bool {
    if c.is_ascii_punctuation() {
        return true;
    }
    let cp = c as u32;
    // General Punctuation block (spaces in it are handled as whitespace
    // first), dandas, and common Latin-1 punctuation.
    (0x2000..=0x206f).contains(&cp)
        || cp == 0x0964
        || cp == 0x0965
        || matches!(cp, 0x00a1 | 0x00ab | 0x00b7 | 0x00bb | 0x00bf)
}

/// Plain edit distance over code points, two-row DP.
pub fn levenshtein(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            curr[j + 1] = (curr[j] + 1).min(prev[j + 1] + 1).min(prev[j] + cost);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// `1 - edit_distance / max_len`; 1.0 when both are empty.
pub fn normalized_similarity(a: &[char], b: &[char]) -> f64 {
    let max_len = a.len().max(b.len());
    if max_len == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / max_len as f64
}

/// Hashed character 3-grams of `chars`, sorted and deduplicated. Texts
/// shorter than the shingle width contribute one whole-text shingle.
fn gram_set(chars: &[char]) -> Vec<u64> {
    let mut grams: Vec<u64> = if chars.len() < SHINGLE_SIZE {
        vec![hash_shingle(chars)]
    } else {
        chars.windows(SHINGLE_SIZE).map(hash_shingle).collect()
    };
    grams.sort_unstable();
    grams.dedup();
    grams
}

fn hash_shingle(chars: &[char]) -> u64 {
    let mut buf = [0u8; 4];
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &c in chars {
        for &b in c.encode_utf8(&mut buf).as_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Exact Jaccard over two sorted, deduplicated gram lists.
pub(crate) fn jaccard_sorted(a: &[u64], b: &[u64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let (mut i, mut j, mut inter) = (0usize, 0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Fixed-length MinHash sketch of a text's 3-shingle set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinHashSignature {
    hashes: Vec<u64>,
}

impl MinHashSignature {
    pub fn slots(&self) -> &[u64] {
        &self.hashes
    }

    pub fn shingle_size(&self) -> usize {
        SHINGLE_SIZE
    }

    /// Matching-slot fraction; unbiased estimate of shingle-set Jaccard.
    pub fn estimate_similarity(&self, other: &MinHashSignature) -> f64 {
        let matches = self
            .hashes
            .iter()
            .zip(&other.hashes)
            .filter(|(a, b)| a == b)
            .count();
        matches as f64 / SIGNATURE_LEN as f64
    }

    fn band_keys(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.hashes
            .chunks(LSH_ROWS)
            .enumerate()
            .map(|(band, rows)| {
                let mut bytes = Vec::with_capacity(LSH_ROWS * 8);
                for slot in rows {
                    bytes.extend_from_slice(&slot.to_le_bytes());
                }
                (band, fnv1a(&bytes))
            })
    }
}

/// The seeded hash family behind MinHash signatures. All 200 per-slot hash
/// functions derive from one master seed, so signatures are deterministic
/// across runs and platforms.
#[derive(Debug, Clone)]
pub struct MinHasher {
    seeds: Vec<u64>,
}

impl MinHasher {
    pub fn new(master_seed: u64) -> Self {
        let mut seeds = Vec::with_capacity(SIGNATURE_LEN);
        let mut state = master_seed;
        for _ in 0..SIGNATURE_LEN {
            state = mix(state);
            seeds.push(state);
        }
        MinHasher { seeds }
    }

    /// Signature of `text` after normalization.
    pub fn signature(&self, text: &str) -> MinHashSignature {
        let chars: Vec<char> = normalize_text(text).chars().collect();
        let grams = gram_set(&chars);
        let mut mins = vec![u64::MAX; SIGNATURE_LEN];
        for &gram in &grams {
            for (slot, &seed) in self.seeds.iter().enumerate() {
                let h = mix(gram ^ seed);
                if h < mins[slot] {
                    mins[slot] = h;
                }
            }
        }
        MinHashSignature { hashes: mins }
    }
}

/// Computes the MinHash signature of `text` under the default hash family.
pub fn minhash_signature(text: &str) -> MinHashSignature {
    MinHasher::new(DEFAULT_SEED).signature(text)
}

fn check_threshold(threshold: f64) -> Result<()> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "threshold must be in (0, 1], got {threshold}"
        )));
    }
    Ok(())
}

/// Removes near duplicates by 3-gram blocking plus per-pair confirmation.
/// Returns survivors in input order and the removal report.
pub fn fuzzy_dedup(
    records: Vec<CorpusRecord>,
    threshold: f64,
    mode: FuzzyMode,
) -> Result<(Vec<CorpusRecord>, DedupReport)> {
    check_threshold(threshold)?;

    let chars: Vec<Vec<char>> = records
        .par_iter()
        .map(|r| normalize_text(&r.problem).chars().collect())
        .collect();
    let grams: Vec<Vec<u64>> = chars.par_iter().map(|c| gram_set(c)).collect();

    let mut gram_index: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut candidate_stamp = vec![usize::MAX; records.len()];
    let mut keep = vec![true; records.len()];
    let mut report = DedupReport::default();

    for i in 0..records.len() {
        let mut candidates: Vec<usize> = Vec::new();
        for gram in &grams[i] {
            if let Some(entries) = gram_index.get(gram) {
                for &j in entries {
                    if candidate_stamp[j] != i {
                        candidate_stamp[j] = i;
                        candidates.push(j);
                    }
                }
            }
        }
        candidates.sort_unstable();

        let mut best: Option<(f64, usize)> = None;
        for j in candidates {
            let sim = match mode {
                FuzzyMode::Levenshtein => {
                    // Provable upper bound: edit distance >= length difference.
                    let max_len = chars[i].len().max(chars[j].len());
                    if max_len > 0 {
                        let diff = chars[i].len().abs_diff(chars[j].len());
                        let upper_bound = 1.0 - diff as f64 / max_len as f64;
                        if upper_bound < threshold {
                            continue;
                        }
                    }
                    normalized_similarity(&chars[i], &chars[j])
                }
                FuzzyMode::Jaccard => jaccard_sorted(&grams[i], &grams[j]),
            };
            if sim >= threshold && best.is_none_or(|(s, _)| sim > s) {
                best = Some((sim, j));
            }
        }

        match best {
            Some((sim, j)) => {
                keep[i] = false;
                report.removed_fuzzy += 1;
                report.pairs.push(DedupPair {
                    kept_id: records[j].id.clone(),
                    removed_id: records[i].id.clone(),
                    similarity: sim,
                    stage: DedupStage::Fuzzy,
                });
            }
            None => {
                for &gram in &grams[i] {
                    gram_index.entry(gram).or_default().push(i);
                }
            }
        }
    }

    Ok(finish(records, keep, report))
}

/// Removes records whose estimated similarity to an earlier-kept record
/// reaches `threshold`. Candidates come from LSH banding; the decision is
/// made on the full signature estimate.
pub fn minhash_dedup(
    records: Vec<CorpusRecord>,
    threshold: f64,
    seed: u64,
) -> Result<(Vec<CorpusRecord>, DedupReport)> {
    check_threshold(threshold)?;
    let hasher = MinHasher::new(seed);
    let signatures: Vec<MinHashSignature> = records
        .par_iter()
        .map(|r| hasher.signature(&r.problem))
        .collect();

    let mut band_index: HashMap<(usize, u64), Vec<usize>> = HashMap::new();
    let mut candidate_stamp = vec![usize::MAX; records.len()];
    let mut keep = vec![true; records.len()];
    let mut report = DedupReport::default();

    for i in 0..records.len() {
        let mut candidates: Vec<usize> = Vec::new();
        for key in signatures[i].band_keys() {
            if let Some(entries) = band_index.get(&key) {
                for &j in entries {
                    if candidate_stamp[j] != i {
                        candidate_stamp[j] = i;
                        candidates.push(j);
                    }
                }
            }
        }
        candidates.sort_unstable();

        let mut best: Option<(f64, usize)> = None;
        for j in candidates {
            let sim = signatures[i].estimate_similarity(&signatures[j]);
            if sim >= threshold && best.is_none_or(|(s, _)| sim > s) {
                best = Some((sim, j));
            }
        }

        match best {
            Some((sim, j)) => {
                keep[i] = false;
                report.removed_minhash += 1;
                report.pairs.push(DedupPair {
                    kept_id: records[j].id.clone(),
                    removed_id: records[i].id.clone(),
                    similarity: sim,
                    stage: DedupStage::Minhash,
                });
            }
            None => {
                for key in signatures[i].band_keys() {
                    band_index.entry(key).or_default().push(i);
                }
            }
        }
    }

    Ok(finish(records, keep, report))
}

/// Removes training records whose estimated similarity to any benchmark
/// problem exceeds `threshold`. The benchmark is never modified. Every
/// training record is compared against every benchmark signature.
pub fn decontaminate(
    records: Vec<CorpusRecord>,
    benchmark: &[CorpusRecord],
    threshold: f64,
    seed: u64,
) -> Result<(Vec<CorpusRecord>, DedupReport)> {
    check_threshold(threshold)?;
    if benchmark.is_empty() {
        return Err(Error::EmptyBenchmark);
    }
    let hasher = MinHasher::new(seed);
    let bench_sigs: Vec<MinHashSignature> = benchmark
        .par_iter()
        .map(|r| hasher.signature(&r.problem))
        .collect();

    let hits: Vec<Option<(f64, usize)>> = records
        .par_iter()
        .map(|record| {
            let sig = hasher.signature(&record.problem);
            let mut best: Option<(f64, usize)> = None;
            for (j, bench_sig) in bench_sigs.iter().enumerate() {
                let sim = sig.estimate_similarity(bench_sig);
                if sim > threshold && best.is_none_or(|(s, _)| sim > s) {
                    best = Some((sim, j));
                }
            }
            best
        })
        .collect();

    let mut keep = vec![true; records.len()];
    let mut report = DedupReport::default();
    for (i, hit) in hits.iter().enumerate() {
        if let Some((sim, j)) = hit {
            keep[i] = false;
            report.removed_contaminated += 1;
            report.pairs.push(DedupPair {
                kept_id: benchmark[*j].id.clone(),
                removed_id: records[i].id.clone(),
                similarity: *sim,
                stage: DedupStage::Contamination,
            });
        }
    }

    Ok(finish(records, keep, report))
}

fn finish(
    records: Vec<CorpusRecord>,
    keep: Vec<bool>,
    mut report: DedupReport,
) -> (Vec<CorpusRecord>, DedupReport) {
    let survivors: Vec<CorpusRecord> = records
        .into_iter()
        .zip(&keep)
        .filter_map(|(r, &k)| k.then_some(r))
        .collect();
    report.kept = survivors.len() as u64;
    (survivors, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Source;
    use std::collections::BTreeMap;

    fn record(id: &str, problem: &str) -> CorpusRecord {
        CorpusRecord {
            id: id.to_string(),
            problem: problem.to_string(),
            solution_cot: None,
            answer: "1".to_string(),
            source: Source::Other,
            meta: BTreeMap::new(),
        }
    }

    #[test]
    fn normalization_rules() {
        assert_eq!(normalize_text("  Hello,   World!  "), "hello world");
        assert_eq!(normalize_text("রাম।\tকলা"), "রাম কলা");
        assert_eq!(normalize_text("A—B"), "ab");
        assert_eq!(normalize_text(""), "");
    }

    #[test]
    fn levenshtein_basics() {
        let a: Vec<char> = "kitten".chars().collect();
        let b: Vec<char> = "sitting".chars().collect();
        assert_eq!(levenshtein(&a, &b), 3);
        assert_eq!(levenshtein(&a, &a), 0);
        assert_eq!(levenshtein(&[], &b), 7);
    }

    #[test]
    fn identical_pair_removes_second() {
        let text = "রামের কাছে পাঁচটি আম আছে";
        let (kept, report) = fuzzy_dedup(
            vec![record("a", text), record("b", text)],
            DEFAULT_FUZZY_THRESHOLD,
            FuzzyMode::Levenshtein,
        )
        .unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].id, "a");
        assert_eq!(report.pairs.len(), 1);
        assert_eq!(report.pairs[0].kept_id, "a");
        assert_eq!(report.pairs[0].removed_id, "b");
        assert_eq!(report.pairs[0].similarity, 1.0);
    }

    #[test]
    fn dissimilar_pair_is_kept() {
        let (kept, report) = fuzzy_dedup(
            vec![
                record("a", "রামের কাছে পাঁচটি আম আছে"),
                record("b", "নদীর ধারে বকুল ফুল ফোটে"),
            ],
            DEFAULT_FUZZY_THRESHOLD,
            FuzzyMode::Levenshtein,
        )
        .unwrap();
        assert_eq!(kept.len(), 2);
        assert!(report.pairs.is_empty());
    }

    #[test]
    fn identical_signatures_for_identical_text() {
        let a = minhash_signature("রামের কাছে পাঁচটি আম আছে");
        let b = minhash_signature("রামের কাছে পাঁচটি আম আছে");
        assert_eq!(a, b);
        assert_eq!(a.estimate_similarity(&b), 1.0);
        assert_eq!(a.slots().len(), SIGNATURE_LEN);
    }

    #[test]
    fn disjoint_alphabet_texts_estimate_near_zero() {
        let a = minhash_signature("the quick brown fox jumps over the lazy dog");
        let b = minhash_signature("রাম সীতা নদী পাখি ফুল গাছ মাছ ভাত জল দুধ");
        assert!(a.estimate_similarity(&b) <= 0.05);
    }

    #[test]
    fn short_text_uses_whole_text_shingle() {
        let a = minhash_signature("ab");
        let b = minhash_signature("ab");
        assert_eq!(a.estimate_similarity(&b), 1.0);
        let c = minhash_signature("cd");
        assert!(a.estimate_similarity(&c) < 1.0);
    }

    #[test]
    fn minhash_dedup_removes_identical_pair() {
        let text = "রামের কাছে পাঁচটি আম আছে এবং সে দুটি খেয়ে ফেলল";
        let (kept, report) = minhash_dedup(
            vec![record("a", text), record("b", text), record("c", "ভিন্ন কথা")],
            DEFAULT_MINHASH_THRESHOLD,
            DEFAULT_SEED,
        )
        .unwrap();
        assert_eq!(kept.len(), 2);
        assert_eq!(report.removed_minhash, 1);
        assert_eq!(report.pairs[0].removed_id, "b");
    }

    #[test]
    fn decontaminate_removes_byte_equal_record() {
        let bench = vec![record("bench1", "রামের কাছে পাঁচটি আম আছে")];
        let train = vec![
            record("t1", "রামের কাছে পাঁচটি আম আছে"),
            record("t2", "সীতার কাছে দুটি বই আছে আর কলম নেই"),
        ];
        let (kept, report) =
            decontaminate(train, &bench, DEFAULT_MINHASH_THRESHOLD, DEFAULT_SEED).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].id, "t2");
        assert_eq!(report.removed_contaminated, 1);
        assert_eq!(report.pairs[0].kept_id, "bench1");
    }

    #[test]
    fn empty_benchmark_is_an_error() {
        let err = decontaminate(
            vec![record("t1", "x")],
            &[],
            DEFAULT_MINHASH_THRESHOLD,
            DEFAULT_SEED,
        );
        assert!(matches!(err, Err(Error::EmptyBenchmark)));
    }

    #[test]
    fn thresholds_are_validated() {
        assert!(fuzzy_dedup(vec![], 0.0, FuzzyMode::Levenshtein).is_err());
        assert!(minhash_dedup(vec![], 1.5, DEFAULT_SEED).is_err());
    }

    #[test]
    fn reports_are_deterministic_across_runs() {
        let records: Vec<CorpusRecord> = (0..20)
            .map(|i| record(&format!("r{i}"), &format!("সমস্যা নম্বর {} কত হবে", i % 7)))
            .collect();
        let run = |input: Vec<CorpusRecord>| {
            let (survivors, r1) =
                fuzzy_dedup(input, DEFAULT_FUZZY_THRESHOLD, FuzzyMode::Levenshtein).unwrap();
            let (survivors, r2) =
                minhash_dedup(survivors, DEFAULT_MINHASH_THRESHOLD, DEFAULT_SEED).unwrap();
            (survivors, r1.chain(r2))
        };
        let (kept_a, report_a) = run(records.clone());
        let (kept_b, report_b) = run(records);
        assert_eq!(kept_a, kept_b);
        assert_eq!(
            serde_json::to_string(&report_a).unwrap(),
            serde_json::to_string(&report_b).unwrap()
        );
        assert_eq!(report_a.kept + report_a.removed_total(), 20);
    }

    #[test]
    fn jaccard_mode_confirms_with_gram_sets() {
        let (kept, _) = fuzzy_dedup(
            vec![
                record("a", "রামের কাছে পাঁচটি আম আছে"),
                record("b", "রামের কাছে পাঁচটি আম আছে"),
            ],
            0.7,
            FuzzyMode::Jaccard,
        )
        .unwrap();
        assert_eq!(kept.len(), 1);
    }
}
