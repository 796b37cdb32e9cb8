//! Deterministic synthetic-corpus generators.
//!
//! Used by the test suites and benchmarks to build Bengali fixture corpora
//! with known structure: planted near-duplicates, benchmark paraphrases, and
//! uniform difficulty distributions. Problems are word sequences drawn from
//! a small Bengali vocabulary, so script ratios and shingle statistics
//! behave like real corpus text.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CorpusRecord, Source};
use crate::difficulty::TaggedRecord;

/// Bengali word stock; every code point lies in the Bengali block, so a
/// generated problem has ratio 1.0.
pub const VOCAB: &[&str] = &[
    "রাম",
    "সীতা",
    "আম",
    "বই",
    "কলম",
    "ঘর",
    "নদী",
    "পাখি",
    "ফুল",
    "গাছ",
    "মাছ",
    "ভাত",
    "জল",
    "দুধ",
    "চা",
    "হাত",
    "মা",
    "বাবা",
    "ভাই",
    "বোন",
    "বাজার",
    "টাকা",
    "সংখ্যা",
    "যোগ",
    "বিয়োগ",
    "গুণ",
    "ভাগ",
    "সমান",
    "মোট",
    "প্রতি",
    "দিন",
    "রাত",
    "সপ্তাহ",
    "মাস",
    "বছর",
    "কত",
    "কয়টি",
    "ছিল",
    "আছে",
    "হবে",
    "করে",
    "কিনে",
    "বিক্রি",
    "খেলা",
    "লাল",
    "নীল",
    "বড়",
    "ছোট",
    "নতুন",
    "পুরনো",
    "স্কুল",
    "ছাত্র",
    "শিক্ষক",
    "বন্ধু",
    "গ্রাম",
    "শহর",
    "পথ",
    "মাঠ",
    "ঝুড়ি",
    "বাক্স",
    "আপেল",
    "কমলা",
    "কলা",
    "লিচু",
    "পেয়ারা",
    "আনারস",
    "তরমুজ",
    "খাতা",
    "চাল",
    "ডাল",
    "তেল",
    "লবণ",
    "চিনি",
    "গরু",
    "ছাগল",
    "হাঁস",
    "মুরগি",
    "ডিম",
    "দাম",
    "ওজন",
];

const SOURCES: [Source; 6] = [
    Source::Numina,
    Source::Somadhan,
    Source::Mcot,
    Source::Bdmo,
    Source::S1k,
    Source::Other,
];

/// Noun suffixes mixed onto vocabulary words for token variety.
const SUFFIXES: [&str; 5] = ["টি", "রা", "ের", "তে", "গুলো"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A problem text of `words` random tokens: vocabulary words, optionally
/// suffixed, mixed with Bengali-digit numbers. Token variety keeps unrelated
/// generated problems dissimilar under shingle measures.
pub fn problem_text(rng: &mut ChaCha8Rng, words: usize) -> String {
    let digits: Vec<char> = "০১২৩৪৫৬৭৮৯".chars().collect();
    (0..words)
        .map(|_| {
            if rng.random::<f64>() < 0.2 {
                let len = rng.random_range(1..=4);
                (0..len).map(|_| digits[rng.random_range(0..10)]).collect()
            } else {
                let word = *VOCAB.choose(rng).expect("vocab is non-empty");
                if rng.random::<f64>() < 0.3 {
                    format!("{word}{}", SUFFIXES[rng.random_range(0..SUFFIXES.len())])
                } else {
                    word.to_string()
                }
            }
        })
        .collect::<Vec<String>>()
        .join(" ")
}

pub fn record(id: &str, problem: &str, answer: &str, source: Source) -> CorpusRecord {
    CorpusRecord {
        id: id.to_string(),
        problem: problem.to_string(),
        solution_cot: None,
        answer: answer.to_string(),
        source,
        meta: BTreeMap::new(),
    }
}

/// `n` unrelated records with random problems of 12..=20 words.
pub fn corpus(n: usize, seed: u64) -> Vec<CorpusRecord> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let words = r.random_range(12..=20);
            let text = problem_text(&mut r, words);
            let answer = r.random_range(1..10_000).to_string();
            record(
                &format!("p{i:05}"),
                &text,
                &answer,
                SOURCES[i % SOURCES.len()],
            )
        })
        .collect()
}

/// Rewrites roughly `frac` of the non-space characters of `text` to random
/// vocabulary characters, leaving length unchanged. Used to plant
/// near-duplicates with a bounded edit budget.
pub fn perturb_chars(rng: &mut ChaCha8Rng, text: &str, frac: f64) -> String {
    let letters: Vec<char> = VOCAB.concat().chars().collect();
    text.chars()
        .map(|c| {
            if !c.is_whitespace() && rng.random::<f64>() < frac {
                *letters.choose(rng).expect("letters is non-empty")
            } else {
                c
            }
        })
        .collect()
}

/// A tagged corpus with exactly `per_count` records for every fine count in
/// `1..=k`. Every other record carries a chain-of-thought solution.
pub fn tagged_uniform(per_count: usize, k: u32, seed: u64) -> Vec<TaggedRecord> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(per_count * k as usize);
    for count in 1..=k {
        for i in 0..per_count {
            let words = r.random_range(10..=16);
            let mut rec = record(
                &format!("c{count:02}_{i:04}"),
                &problem_text(&mut r, words),
                &r.random_range(1..1000).to_string(),
                SOURCES[i % SOURCES.len()],
            );
            if i % 2 == 0 {
                rec.solution_cot = Some(problem_text(&mut r, 8));
            }
            out.push(TaggedRecord {
                record: rec,
                correct_count: count,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langscript::profile_text;

    #[test]
    fn generated_problems_are_pure_bengali() {
        let mut r = rng(1);
        for _ in 0..50 {
            let text = problem_text(&mut r, 15);
            assert_eq!(profile_text(&text).bengali_ratio, 1.0);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(corpus(10, 3), corpus(10, 3));
        assert_ne!(corpus(10, 3), corpus(10, 4));
    }

    #[test]
    fn perturbation_preserves_length() {
        let mut r = rng(5);
        let text = problem_text(&mut r, 15);
        let edited = perturb_chars(&mut r, &text, 0.1);
        assert_eq!(text.chars().count(), edited.chars().count());
    }
}
