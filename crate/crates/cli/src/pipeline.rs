//! End-to-end pipeline: filter → dedup → decontaminate → tag-difficulty →
//! split → shuffle-curriculum → stats, each stage writing its output and
//! report into the output directory. Any stage failure aborts with the stage
//! named. Given the same inputs and seed, reruns are byte-identical.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use bnmath_core::corpus::{self, CorpusRecord};
use bnmath_core::curriculum;
use bnmath_core::dedup::{self, FuzzyMode};
use bnmath_core::difficulty::{self, RolloutRecord, TaggedRecord};
use bnmath_core::grader;
use bnmath_core::jsonl;
use bnmath_core::splits::{self, VerdictRecord};

use crate::args::PipelineArgs;
use crate::commands::{CliError, Result};

fn default_min_bengali() -> f64 {
    bnmath_core::filter::DEFAULT_MIN_BENGALI
}
fn default_fuzzy_threshold() -> f64 {
    dedup::DEFAULT_FUZZY_THRESHOLD
}
fn default_minhash_threshold() -> f64 {
    dedup::DEFAULT_MINHASH_THRESHOLD
}
fn default_k() -> u32 {
    difficulty::DEFAULT_K
}
fn default_dev_per_bucket() -> usize {
    splits::DEFAULT_DEV_PER_BUCKET
}
fn default_primary_frac() -> f64 {
    curriculum::DEFAULT_PRIMARY_FRAC
}
fn default_bengali_min() -> f64 {
    bnmath_core::rewards::DEFAULT_BENGALI_MIN
}
fn default_seed() -> u64 {
    dedup::DEFAULT_SEED
}

/// Per-stage thresholds and seeds plus input/output paths. Defaults match
/// the documented pipeline constants; a config file sets fields and command
/// line flags win over both.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub min_bengali: f64,
    pub fuzzy_threshold: f64,
    pub fuzzy_mode: FuzzyMode,
    pub minhash_threshold: f64,
    pub decontamination_threshold: f64,
    pub k: u32,
    pub dev_per_bucket: usize,
    pub primary_frac: f64,
    pub bengali_min: f64,
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub benchmark: Option<PathBuf>,
    pub rollouts: Option<PathBuf>,
    pub verdicts: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            min_bengali: default_min_bengali(),
            fuzzy_threshold: default_fuzzy_threshold(),
            fuzzy_mode: FuzzyMode::Levenshtein,
            minhash_threshold: default_minhash_threshold(),
            decontamination_threshold: default_minhash_threshold(),
            k: default_k(),
            dev_per_bucket: default_dev_per_bucket(),
            primary_frac: default_primary_frac(),
            bengali_min: default_bengali_min(),
            seed: default_seed(),
            input: None,
            benchmark: None,
            rollouts: None,
            verdicts: None,
            out_dir: None,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn apply_overrides(&mut self, args: &PipelineArgs, seed_flag: Option<u64>) {
        if let Some(v) = &args.input {
            self.input = Some(v.clone());
        }
        if let Some(v) = &args.out_dir {
            self.out_dir = Some(v.clone());
        }
        if let Some(v) = &args.benchmark {
            self.benchmark = Some(v.clone());
        }
        if let Some(v) = &args.rollouts {
            self.rollouts = Some(v.clone());
        }
        if let Some(v) = &args.verdicts {
            self.verdicts = Some(v.clone());
        }
        if let Some(v) = args.min_bengali {
            self.min_bengali = v;
        }
        if let Some(v) = args.fuzzy_threshold {
            self.fuzzy_threshold = v;
        }
        if let Some(v) = args.minhash_threshold {
            self.minhash_threshold = v;
        }
        if let Some(v) = args.decontamination_threshold {
            self.decontamination_threshold = v;
        }
        if let Some(v) = args.k {
            self.k = v;
        }
        if let Some(v) = args.dev_per_bucket {
            self.dev_per_bucket = v;
        }
        if let Some(v) = args.primary_frac {
            self.primary_frac = v;
        }
        if let Some(v) = args.bengali_min {
            self.bengali_min = v;
        }
        if let Some(v) = args.fuzzy_mode {
            self.fuzzy_mode = v.into();
        }
        if let Some(v) = seed_flag {
            self.seed = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_unit = |name: &str, v: f64| -> Result<()> {
            if !(0.0..=1.0).contains(&v) {
                return Err(CliError::Usage(format!(
                    "{name} must be in [0, 1], got {v}"
                )));
            }
            Ok(())
        };
        check_unit("min_bengali", self.min_bengali)?;
        check_unit("bengali_min", self.bengali_min)?;
        for (name, v) in [
            ("fuzzy_threshold", self.fuzzy_threshold),
            ("minhash_threshold", self.minhash_threshold),
            ("decontamination_threshold", self.decontamination_threshold),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(CliError::Usage(format!(
                    "{name} must be in (0, 1], got {v}"
                )));
            }
        }
        if !(self.primary_frac > 0.0 && self.primary_frac < 1.0) {
            return Err(CliError::Usage(format!(
                "primary_frac must be in (0, 1), got {}",
                self.primary_frac
            )));
        }
        if self.k == 0 || self.k % 4 != 0 {
            return Err(CliError::Usage(format!(
                "k must be positive and divisible by 4, got {}",
                self.k
            )));
        }
        Ok(())
    }
}

fn stage<T>(name: &str, result: std::result::Result<T, CliError>) -> Result<T> {
    result.map_err(|e| match e {
        CliError::Io(msg) => CliError::Io(format!("stage {name}: {msg}")),
        other => CliError::Stage(format!("stage {name}: {other}")),
    })
}

fn write_json<T: Serialize>(out_dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = out_dir.join(name);
    let rendered = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Stage(format!("serializing {name}: {e}")))?;
    std::fs::write(&path, rendered + "\n")
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn stage_core<T>(name: &str, result: bnmath_core::Result<T>) -> Result<T> {
    stage(name, result.map_err(CliError::from))
}

pub fn run_pipeline(config: &PipelineConfig, strict: bool) -> Result<()> {
    config.validate()?;
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("pipeline needs an input corpus (--in)".into()))?;
    let out_dir = config
        .out_dir
        .as_ref()
        .ok_or_else(|| CliError::Usage("pipeline needs an output directory (--out-dir)".into()))?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;

    // filter
    let policy = if strict {
        corpus::MalformedPolicy::Abort
    } else {
        corpus::MalformedPolicy::Skip
    };
    let (records, issues) = stage_core("read", corpus::read_all(input, policy))?;
    for issue in &issues {
        eprintln!("warning: {}: {issue}", input.display());
    }
    eprintln!("pipeline: read {} records", records.len());

    let (records, filter_report) = stage_core(
        "filter",
        bnmath_core::filter::apply_rules(records, config.min_bengali),
    )?;
    stage(
        "filter",
        corpus::write_records(out_dir.join("filtered.jsonl"), &records).map_err(CliError::from),
    )?;
    write_json(out_dir, "filter_report.json", &filter_report)?;
    eprintln!("pipeline: filter kept {}", filter_report.kept);

    // dedup (fuzzy, then minhash on survivors)
    let (records, fuzzy_report) = stage_core(
        "dedup",
        dedup::fuzzy_dedup(records, config.fuzzy_threshold, config.fuzzy_mode),
    )?;
    let (records, minhash_report) = stage_core(
        "dedup",
        dedup::minhash_dedup(records, config.minhash_threshold, config.seed),
    )?;
    let dedup_report = fuzzy_report.chain(minhash_report);
    stage(
        "dedup",
        corpus::write_records(out_dir.join("deduped.jsonl"), &records).map_err(CliError::from),
    )?;
    write_json(out_dir, "dedup_report.json", &dedup_report)?;
    eprintln!("pipeline: dedup kept {}", dedup_report.kept);

    // decontaminate
    let records = match &config.benchmark {
        Some(bench_path) => {
            let (benchmark, bench_issues) =
                stage_core("decontaminate", corpus::read_all(bench_path, policy))?;
            for issue in &bench_issues {
                eprintln!("warning: {}: {issue}", bench_path.display());
            }
            let (records, report) = stage_core(
                "decontaminate",
                dedup::decontaminate(
                    records,
                    &benchmark,
                    config.decontamination_threshold,
                    config.seed,
                ),
            )?;
            stage(
                "decontaminate",
                corpus::write_records(out_dir.join("decontaminated.jsonl"), &records)
                    .map_err(CliError::from),
            )?;
            write_json(out_dir, "decontamination_report.json", &report)?;
            eprintln!("pipeline: decontaminate kept {}", report.kept);
            records
        }
        None => records,
    };

    // tag-difficulty
    let tagged: Option<Vec<TaggedRecord>> = match &config.rollouts {
        Some(rollout_path) => {
            let rollouts: Vec<RolloutRecord> =
                stage_core("tag-difficulty", jsonl::read_all(rollout_path))?;
            let by_id: HashMap<&str, &RolloutRecord> = rollouts
                .iter()
                .map(|r| (r.problem_id.as_str(), r))
                .collect();
            let mut tagged = Vec::new();
            let mut dropped_zero = 0u64;
            let mut missing = 0u64;
            let mut per_bucket: std::collections::BTreeMap<difficulty::Bucket, u64> =
                Default::default();
            for record in &records {
                let Some(rollout) = by_id.get(record.id.as_str()) else {
                    missing += 1;
                    continue;
                };
                let gold = stage(
                    "tag-difficulty",
                    grader::parse_decimal(&record.answer).ok_or_else(|| {
                        CliError::Stage(format!("record {}: answer is not a decimal", record.id))
                    }),
                )?;
                let count = stage_core(
                    "tag-difficulty",
                    difficulty::grade_rollouts(rollout, gold, config.k, false),
                )?;
                match stage_core("tag-difficulty", difficulty::tag(count, config.k))? {
                    Some(t) => {
                        *per_bucket.entry(t.bucket).or_insert(0) += 1;
                        tagged.push(TaggedRecord {
                            record: record.clone(),
                            correct_count: count,
                        });
                    }
                    None => dropped_zero += 1,
                }
            }
            let tagged_records: Vec<CorpusRecord> =
                tagged.iter().map(|t| t.clone().into_record()).collect();
            stage(
                "tag-difficulty",
                corpus::write_records(out_dir.join("tagged.jsonl"), &tagged_records)
                    .map_err(CliError::from),
            )?;
            #[derive(Serialize)]
            struct Report {
                input: u64,
                tagged: u64,
                dropped_zero_correct: u64,
                missing_rollouts: u64,
                per_bucket: std::collections::BTreeMap<difficulty::Bucket, u64>,
            }
            write_json(
                out_dir,
                "difficulty_report.json",
                &Report {
                    input: records.len() as u64,
                    tagged: tagged.len() as u64,
                    dropped_zero_correct: dropped_zero,
                    missing_rollouts: missing,
                    per_bucket,
                },
            )?;
            eprintln!("pipeline: tagged {}", tagged.len());
            Some(tagged)
        }
        None => None,
    };

    // split + curriculum need tags
    if let Some(tagged) = &tagged {
        let (candidates, warnings) = splits::build_dev(tagged, config.dev_per_bucket, config.seed);
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        let dev_ids = match &config.verdicts {
            Some(verdict_path) => {
                let verdicts: Vec<VerdictRecord> =
                    stage_core("split", jsonl::read_all(verdict_path))?;
                let mut by_problem: HashMap<&str, Vec<VerdictRecord>> = HashMap::new();
                for v in &verdicts {
                    by_problem
                        .entry(v.problem_id.as_str())
                        .or_default()
                        .push(v.clone());
                }
                let by_record: HashMap<&str, &TaggedRecord> =
                    tagged.iter().map(|t| (t.id(), t)).collect();
                let mut kept = Vec::new();
                for id in &candidates {
                    let Some(problem_verdicts) = by_problem.get(id.as_str()) else {
                        eprintln!("warning: dev candidate {id} has no verdicts; dropped");
                        continue;
                    };
                    let record = &by_record[id.as_str()].record;
                    let gold = stage(
                        "split",
                        grader::parse_decimal(&record.answer).ok_or_else(|| {
                            CliError::Stage(format!("record {id}: answer is not a decimal"))
                        }),
                    )?;
                    if stage_core("split", splits::majority_filter(problem_verdicts, gold))? {
                        kept.push(id.clone());
                    }
                }
                kept
            }
            None => candidates,
        };

        let remaining: Vec<TaggedRecord> = tagged
            .iter()
            .filter(|t| !dev_ids.contains(&t.id().to_string()))
            .cloned()
            .collect();
        let (mut manifest, warnings) = splits::build_rlvr_and_sft(&remaining, config.seed);
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        manifest.dev_ids = dev_ids;
        write_json(out_dir, "manifest.json", &manifest)?;

        let by_id: HashMap<&str, &TaggedRecord> = tagged.iter().map(|t| (t.id(), t)).collect();
        for (ids, name) in [
            (&manifest.rlvr_ids, "rlvr.jsonl"),
            (&manifest.sft_ids, "sft.jsonl"),
            (&manifest.dev_ids, "dev.jsonl"),
        ] {
            let records: Vec<CorpusRecord> = ids
                .iter()
                .map(|id| by_id[id.as_str()].clone().into_record())
                .collect();
            stage(
                "split",
                corpus::write_records(out_dir.join(name), &records).map_err(CliError::from),
            )?;
        }
        eprintln!(
            "pipeline: split rlvr {} / sft {} / dev {}",
            manifest.rlvr_ids.len(),
            manifest.sft_ids.len(),
            manifest.dev_ids.len()
        );

        // curriculum over the RLVR split
        if !manifest.rlvr_ids.is_empty() {
            let items: Vec<(String, u32)> = manifest
                .rlvr_ids
                .iter()
                .map(|id| (id.clone(), by_id[id.as_str()].correct_count))
                .collect();
            let (plan, warnings) = stage_core(
                "shuffle-curriculum",
                curriculum::plan(&items, config.primary_frac, config.seed),
            )?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let order = curriculum::emit_order(&plan);
            let order_path = out_dir.join("curriculum_order.txt");
            let file = File::create(&order_path)
                .map_err(|e| CliError::Io(format!("{}: {e}", order_path.display())))?;
            let mut w = BufWriter::new(file);
            for id in &order {
                writeln!(w, "{id}")
                    .map_err(|e| CliError::Io(format!("{}: {e}", order_path.display())))?;
            }
            w.flush()
                .map_err(|e| CliError::Io(format!("{}: {e}", order_path.display())))?;
            write_json(out_dir, "curriculum_plan.json", &plan)?;
            eprintln!("pipeline: curriculum order of {} entries", order.len());
        }
    }

    // stats over the final filtered corpus (tagged when available)
    let final_records: Vec<CorpusRecord> = match &tagged {
        Some(tagged) => tagged.iter().map(|t| t.clone().into_record()).collect(),
        None => records,
    };
    let stats = corpus::compute_stats_k(&final_records, config.k);
    write_json(out_dir, "stats.json", &stats)?;
    Ok(())
}
