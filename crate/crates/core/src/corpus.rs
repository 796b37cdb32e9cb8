//! Canonical record model, streaming line-delimited I/O, and corpus
//! statistics.
//!
//! The on-disk format is UTF-8 JSON lines, one record per line:
//!
//! ```text
//! {"id":"p00001","problem":"...","solution_cot":"...","answer":"42","source":"numina","meta":{...}}
//! ```
//!
//! `solution_cot` and `meta` are optional. `id` must be non-empty and unique
//! within a file. `answer` is a decimal string; whether it parses is enforced
//! by the filter stage, not by the reader, so raw scraped corpora can be
//! ingested as-is. Difficulty tags ride along in `meta` under
//! [`META_CORRECT_COUNT`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Lines, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::difficulty::{tag, Bucket, DEFAULT_K};
use crate::error::{Error, Result};
use crate::langscript::profile_text;

/// Meta key carrying a record's fine difficulty count (number of correct
/// evaluator rollouts), written by the difficulty tagger.
pub const META_CORRECT_COUNT: &str = "correct_count";

/// Origin tag for a record: one of the five retained source corpora, or
/// `other` for anything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Numina,
    Somadhan,
    Mcot,
    Bdmo,
    S1k,
    Other,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Source::Numina => "numina",
            Source::Somadhan => "somadhan",
            Source::Mcot => "mcot",
            Source::Bdmo => "bdmo",
            Source::S1k => "s1k",
            Source::Other => "other",
        };
        f.write_str(name)
    }
}

/// One math problem: problem text, optional chain-of-thought solution, a
/// verifiable decimal answer, and a source tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub problem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution_cot: Option<String>,
    pub answer: String,
    pub source: Source,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

impl CorpusRecord {
    /// Fine difficulty count from `meta`, when the record has been tagged.
    pub fn correct_count(&self) -> Option<u32> {
        self.meta.get(META_CORRECT_COUNT)?.parse().ok()
    }

    pub fn with_correct_count(mut self, count: u32) -> Self {
        self.meta
            .insert(META_CORRECT_COUNT.to_string(), count.to_string());
        self
    }
}

/// What to do with lines that fail to parse or violate record invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MalformedPolicy {
    /// Skip the line and report it (default: scraped corpora contain junk).
    #[default]
    Skip,
    /// Abort on the first malformed line.
    Abort,
}

/// Streaming reader over a line-delimited record file.
///
/// Yields records in file order. Malformed lines (bad JSON, empty id,
/// duplicate id) surface as [`Error::MalformedLine`] carrying the 1-based
/// line number; the caller decides whether to skip or abort. I/O failures
/// surface as [`Error::Io`]. Multiple concurrent readers over one file are
/// safe; each reader owns its handle.
pub struct RecordReader<R: BufRead> {
    lines: Lines<R>,
    line_no: usize,
    seen_ids: HashSet<String>,
    path: std::path::PathBuf,
}

impl RecordReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(RecordReader {
            lines: BufReader::new(file).lines(),
            line_no: 0,
            seen_ids: HashSet::new(),
            path: path.to_path_buf(),
        })
    }
}

impl<R: BufRead> RecordReader<R> {
    pub fn new(reader: R) -> Self {
        RecordReader {
            lines: reader.lines(),
            line_no: 0,
            seen_ids: HashSet::new(),
            path: "<memory>".into(),
        }
    }

    fn parse_line(&mut self, line: &str) -> Result<CorpusRecord> {
        let record: CorpusRecord =
            serde_json::from_str(line).map_err(|e| Error::MalformedLine {
                line: self.line_no,
                reason: e.to_string(),
            })?;
        if record.id.is_empty() {
            return Err(Error::MalformedLine {
                line: self.line_no,
                reason: "empty id".to_string(),
            });
        }
        if !self.seen_ids.insert(record.id.clone()) {
            return Err(Error::MalformedLine {
                line: self.line_no,
                reason: format!("duplicate id {:?}", record.id),
            });
        }
        Ok(record)
    }
}

impl<R: BufRead> Iterator for RecordReader<R> {
    type Item = Result<CorpusRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(Error::io(&self.path, e))),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            return Some(self.parse_line(&line));
        }
    }
}

/// Opens a streaming reader over `path`.
pub fn read_records(path: impl AsRef<Path>) -> Result<RecordReader<BufReader<File>>> {
    RecordReader::open(path)
}

/// Reads a whole file under `policy`, returning the records plus the
/// malformed-line reports collected along the way (empty under `Abort`,
/// which instead fails on the first bad line).
pub fn read_all(
    path: impl AsRef<Path>,
    policy: MalformedPolicy,
) -> Result<(Vec<CorpusRecord>, Vec<Error>)> {
    let mut records = Vec::new();
    let mut issues = Vec::new();
    for item in read_records(path)? {
        match item {
            Ok(record) => records.push(record),
            Err(e @ Error::MalformedLine { .. }) => match policy {
                MalformedPolicy::Skip => issues.push(e),
                MalformedPolicy::Abort => return Err(e),
            },
            Err(e) => return Err(e),
        }
    }
    Ok((records, issues))
}

pub fn write_records<'a>(
    path: impl AsRef<Path>,
    records: impl IntoIterator<Item = &'a CorpusRecord>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_records_to(&mut w, records).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_records_to<'a, W: Write>(
    w: &mut W,
    records: impl IntoIterator<Item = &'a CorpusRecord>,
) -> Result<()> {
    for record in records {
        let line = serde_json::to_string(record).expect("record serialization is infallible");
        writeln!(w, "{line}").map_err(|e| Error::io("<writer>", e))?;
    }
    Ok(())
}

/// Corpus-level counts: totals, per-source, per-coarse-bucket (for tagged
/// records), and a 10-bin histogram of problem-text Bengali ratios.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total: u64,
    pub per_source: BTreeMap<Source, u64>,
    /// Counts by coarse difficulty bucket; only tagged records appear here.
    pub per_bucket: BTreeMap<Bucket, u64>,
    pub bengali_ratio_histogram: [u64; 10],
}

impl CorpusStats {
    pub fn record(&mut self, record: &CorpusRecord, k: u32) {
        self.total += 1;
        *self.per_source.entry(record.source).or_insert(0) += 1;
        if let Some(count) = record.correct_count() {
            if let Ok(Some(t)) = tag(count, k) {
                *self.per_bucket.entry(t.bucket).or_insert(0) += 1;
            }
        }
        let ratio = profile_text(&record.problem).bengali_ratio;
        let bin = ((ratio * 10.0) as usize).min(9);
        self.bengali_ratio_histogram[bin] += 1;
    }

    /// Associative, commutative merge of partial stats from sharded scans.
    pub fn merge(&mut self, other: &CorpusStats) {
        self.total += other.total;
        for (source, n) in &other.per_source {
            *self.per_source.entry(*source).or_insert(0) += n;
        }
        for (bucket, n) in &other.per_bucket {
            *self.per_bucket.entry(*bucket).or_insert(0) += n;
        }
        for (bin, n) in other.bengali_ratio_histogram.iter().enumerate() {
            self.bengali_ratio_histogram[bin] += n;
        }
    }
}

/// Computes stats over `records` at the default k, sharding across threads
/// and merging. Order-invariant and deterministic.
pub fn compute_stats(records: &[CorpusRecord]) -> CorpusStats {
    compute_stats_k(records, DEFAULT_K)
}

/// [`compute_stats`] with an explicit rollout count for bucketing.
pub fn compute_stats_k(records: &[CorpusRecord], k: u32) -> CorpusStats {
    records
        .par_iter()
        .fold(CorpusStats::default, |mut stats, record| {
            stats.record(record, k);
            stats
        })
        .reduce(CorpusStats::default, |mut a, b| {
            a.merge(&b);
            a
        })
}
