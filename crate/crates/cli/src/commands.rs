use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use bnmath_core::corpus::{self, CorpusRecord, MalformedPolicy};
use bnmath_core::curriculum;
use bnmath_core::dedup;
use bnmath_core::difficulty::{self, RolloutRecord, TaggedRecord};
use bnmath_core::error::Error as CoreError;
use bnmath_core::grader;
use bnmath_core::jsonl;
use bnmath_core::rewards;
use bnmath_core::simulate::{self, SimConfig};
use bnmath_core::splits::{self, VerdictRecord};

use crate::args::*;

/// Process exit codes: 0 ok, 1 usage/config, 2 I/O, 3 stage failure.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Stage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Stage(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Io(msg) | CliError::Stage(msg) => f.write_str(msg),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Io { .. } => CliError::Io(e.to_string()),
            CoreError::InvalidParam(_) => CliError::Usage(e.to_string()),
            other => CliError::Stage(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn policy(strict: bool) -> MalformedPolicy {
    if strict {
        MalformedPolicy::Abort
    } else {
        MalformedPolicy::Skip
    }
}

fn load_corpus(path: &Path, strict: bool) -> Result<Vec<CorpusRecord>> {
    let (records, issues) = corpus::read_all(path, policy(strict))?;
    for issue in &issues {
        eprintln!("warning: {}: {issue}", path.display());
    }
    Ok(records)
}

fn load_tagged(path: &Path, strict: bool) -> Result<Vec<TaggedRecord>> {
    let records = load_corpus(path, strict)?;
    records
        .into_iter()
        .map(|record| {
            let id = record.id.clone();
            TaggedRecord::from_record(record).ok_or_else(|| {
                CliError::Stage(format!(
                    "record {id} has no correct_count tag; run tag-difficulty first"
                ))
            })
        })
        .collect()
}

fn gold_answer(record: &CorpusRecord) -> Result<f64> {
    grader::parse_decimal(&record.answer).ok_or_else(|| {
        CliError::Stage(format!(
            "record {}: answer {:?} is not a decimal",
            record.id, record.answer
        ))
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let rendered = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Stage(format!("serializing report: {e}")))?;
    std::fs::write(path, rendered + "\n")
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn out_writer(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let file =
                File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

pub fn stats(args: &StatsArgs, strict: bool) -> Result<()> {
    let records = load_corpus(&args.input, strict)?;
    let stats = corpus::compute_stats_k(&records, args.k);
    let mut w = out_writer(args.out.as_ref())?;
    let rendered = serde_json::to_string_pretty(&stats)
        .map_err(|e| CliError::Stage(format!("serializing stats: {e}")))?;
    writeln!(w, "{rendered}").map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

pub fn filter(args: &FilterArgs, strict: bool) -> Result<()> {
    let records = load_corpus(&args.input, strict)?;
    let (kept, report) = bnmath_core::filter::apply_rules(records, args.min_bengali)?;
    corpus::write_records(&args.out, &kept)?;
    write_json(&args.report, &report)
}

pub fn dedup(args: &DedupArgs, seed: u64, strict: bool) -> Result<()> {
    let records = load_corpus(&args.input, strict)?;
    let mut fuzzy_threshold = args.fuzzy_threshold;
    let mut minhash_threshold = args.minhash_threshold;
    if let Some(t) = args.threshold {
        match args.stage {
            DedupStageArg::Fuzzy => fuzzy_threshold = t,
            DedupStageArg::Minhash => minhash_threshold = t,
            DedupStageArg::Both => {
                return Err(CliError::Usage(
                    "--threshold is ambiguous with --stage both; \
                     use --fuzzy-threshold / --minhash-threshold"
                        .to_string(),
                ))
            }
        }
    }

    let (kept, report) = match args.stage {
        DedupStageArg::Fuzzy => {
            dedup::fuzzy_dedup(records, fuzzy_threshold, args.fuzzy_mode.into())?
        }
        DedupStageArg::Minhash => dedup::minhash_dedup(records, minhash_threshold, seed)?,
        DedupStageArg::Both => {
            let (survivors, fuzzy_report) =
                dedup::fuzzy_dedup(records, fuzzy_threshold, args.fuzzy_mode.into())?;
            let (survivors, minhash_report) =
                dedup::minhash_dedup(survivors, minhash_threshold, seed)?;
            (survivors, fuzzy_report.chain(minhash_report))
        }
    };
    corpus::write_records(&args.out, &kept)?;
    write_json(&args.report, &report)
}

pub fn decontaminate(args: &DecontaminateArgs, seed: u64, strict: bool) -> Result<()> {
    let records = load_corpus(&args.input, strict)?;
    let benchmark = load_corpus(&args.benchmark, strict)?;
    let (kept, report) = dedup::decontaminate(records, &benchmark, args.threshold, seed)?;
    corpus::write_records(&args.out, &kept)?;
    write_json(&args.report, &report)
}

#[derive(Debug, Serialize)]
struct GradedGeneration {
    value: Option<f64>,
    correct: bool,
}

#[derive(Debug, Serialize)]
struct GradedProblem {
    problem_id: String,
    correct_count: u32,
    results: Vec<GradedGeneration>,
}

fn load_rollouts(path: &Path) -> Result<Vec<RolloutRecord>> {
    Ok(jsonl::read_all(path)?)
}

pub fn grade(args: &GradeArgs, strict: bool) -> Result<()> {
    let records = load_corpus(&args.corpus, strict)?;
    let by_id: HashMap<&str, &CorpusRecord> = records.iter().map(|r| (r.id.as_str(), r)).collect();
    let rollouts = load_rollouts(&args.rollouts)?;

    let mut w = out_writer(args.out.as_ref())?;
    for rollout in &rollouts {
        let Some(record) = by_id.get(rollout.problem_id.as_str()) else {
            eprintln!(
                "warning: rollout {} has no corpus record",
                rollout.problem_id
            );
            continue;
        };
        let gold = gold_answer(record)?;
        let correct_count = difficulty::grade_rollouts(rollout, gold, args.k, args.allow_partial)?;
        let results: Vec<GradedGeneration> = rollout
            .generations
            .iter()
            .map(|generation| {
                let value = grader::extract(generation).value;
                GradedGeneration {
                    value,
                    correct: value
                        .is_some_and(|v| grader::is_correct(v, gold, grader::DEFAULT_REL_TOL)),
                }
            })
            .collect();
        let line = serde_json::to_string(&GradedProblem {
            problem_id: rollout.problem_id.clone(),
            correct_count,
            results,
        })
        .map_err(|e| CliError::Stage(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

#[derive(Debug, Default, Serialize)]
struct DifficultyReport {
    input: u64,
    tagged: u64,
    dropped_zero_correct: u64,
    missing_rollouts: u64,
    per_bucket: std::collections::BTreeMap<difficulty::Bucket, u64>,
}

pub fn tag_difficulty(args: &TagDifficultyArgs, strict: bool) -> Result<()> {
    let records = load_corpus(&args.corpus, strict)?;
    let rollouts = load_rollouts(&args.rollouts)?;
    let by_id: HashMap<&str, &RolloutRecord> = rollouts
        .iter()
        .map(|r| (r.problem_id.as_str(), r))
        .collect();

    let mut report = DifficultyReport {
        input: records.len() as u64,
        ..DifficultyReport::default()
    };
    let mut tagged = Vec::new();
    for record in records {
        let Some(rollout) = by_id.get(record.id.as_str()) else {
            if strict {
                return Err(CliError::Stage(format!(
                    "record {} has no rollout entry",
                    record.id
                )));
            }
            eprintln!(
                "warning: record {} has no rollout entry; dropped",
                record.id
            );
            report.missing_rollouts += 1;
            continue;
        };
        let gold = gold_answer(&record)?;
        let count = difficulty::grade_rollouts(rollout, gold, args.k, args.allow_partial)?;
        match difficulty::tag(count, args.k)? {
            Some(t) => {
                report.tagged += 1;
                *report.per_bucket.entry(t.bucket).or_insert(0) += 1;
                tagged.push(record.with_correct_count(count));
            }
            None => report.dropped_zero_correct += 1,
        }
    }
    corpus::write_records(&args.out, &tagged)?;
    write_json(&args.report, &report)
}

pub fn split(args: &SplitArgs, seed: u64, strict: bool) -> Result<()> {
    let tagged = load_tagged(&args.input, strict)?;

    let (candidates, warnings) = splits::build_dev(&tagged, args.dev_per_bucket, seed);
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let dev_ids: Vec<String> = match &args.verdicts {
        Some(path) => {
            let verdicts: Vec<VerdictRecord> = jsonl::read_all(path)?;
            let mut by_problem: HashMap<&str, Vec<&VerdictRecord>> = HashMap::new();
            for v in &verdicts {
                by_problem.entry(v.problem_id.as_str()).or_default().push(v);
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
                let owned: Vec<VerdictRecord> =
                    problem_verdicts.iter().map(|&v| v.clone()).collect();
                if splits::majority_filter(&owned, gold_answer(record)?)? {
                    kept.push(id.clone());
                }
            }
            kept
        }
        None => {
            eprintln!("warning: no --verdicts given; dev set is unfiltered candidates");
            candidates
        }
    };

    let remaining: Vec<TaggedRecord> = tagged
        .iter()
        .filter(|t| !dev_ids.contains(&t.id().to_string()))
        .cloned()
        .collect();
    let (mut manifest, warnings) = splits::build_rlvr_and_sft(&remaining, seed);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    manifest.dev_ids = dev_ids;

    write_json(&args.manifest, &manifest)?;

    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let by_id: HashMap<&str, &TaggedRecord> = tagged.iter().map(|t| (t.id(), t)).collect();
        let materialize = |ids: &[String], name: &str| -> Result<()> {
            let records: Vec<CorpusRecord> = ids
                .iter()
                .map(|id| by_id[id.as_str()].clone().into_record())
                .collect();
            corpus::write_records(dir.join(name), &records)?;
            Ok(())
        };
        materialize(&manifest.rlvr_ids, "rlvr.jsonl")?;
        materialize(&manifest.sft_ids, "sft.jsonl")?;
        materialize(&manifest.dev_ids, "dev.jsonl")?;
    }
    Ok(())
}

pub fn shuffle_curriculum(args: &ShuffleCurriculumArgs, seed: u64, strict: bool) -> Result<()> {
    let tagged = load_tagged(&args.input, strict)?;
    let items: Vec<(String, u32)> = tagged
        .iter()
        .map(|t| (t.id().to_string(), t.correct_count))
        .collect();
    let (plan, warnings) = curriculum::plan(&items, args.primary_frac, seed)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let order = curriculum::emit_order(&plan);
    let file = File::create(&args.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    let mut w = BufWriter::new(file);
    for id in &order {
        writeln!(w, "{id}").map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;

    if let Some(plan_path) = &args.plan {
        write_json(plan_path, &plan)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ScoredGeneration<'a> {
    problem_id: &'a str,
    index: usize,
    format: u8,
    correctness: u8,
    bengali: u8,
    total: u8,
}

pub fn score(args: &ScoreArgs, strict: bool) -> Result<()> {
    let records = load_corpus(&args.gold, strict)?;
    let by_id: HashMap<&str, &CorpusRecord> = records.iter().map(|r| (r.id.as_str(), r)).collect();
    let generations: Vec<RolloutRecord> = jsonl::read_all(&args.generations)?;

    let mut w = out_writer(args.out.as_ref())?;
    for batch in &generations {
        let Some(record) = by_id.get(batch.problem_id.as_str()) else {
            eprintln!(
                "warning: generations for unknown problem {}",
                batch.problem_id
            );
            continue;
        };
        let gold = gold_answer(record)?;
        for (index, generation) in batch.generations.iter().enumerate() {
            let b = rewards::score(generation, gold, args.bengali_min);
            let line = serde_json::to_string(&ScoredGeneration {
                problem_id: &batch.problem_id,
                index,
                format: b.format,
                correctness: b.correctness,
                bengali: b.bengali,
                total: b.total,
            })
            .map_err(|e| CliError::Stage(e.to_string()))?;
            writeln!(w, "{line}").map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

fn read_order(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut ids = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let trimmed = line.trim();
        if !trimmed.is_empty() {
            ids.push(trimmed.to_string());
        }
    }
    Ok(ids)
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    steps: usize,
    zero_signal_frac_overall: f64,
    steps_to_target: Option<usize>,
    final_skill: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<simulate::CompareSummary>,
}

pub fn simulate_cmd(args: &SimulateArgs, seed: u64, strict: bool) -> Result<()> {
    let tagged = load_tagged(&args.corpus, strict)?;
    let counts_by_id: HashMap<&str, u32> =
        tagged.iter().map(|t| (t.id(), t.correct_count)).collect();
    let order_ids = read_order(&args.order)?;
    let order: Vec<u32> = order_ids
        .iter()
        .map(|id| {
            counts_by_id
                .get(id.as_str())
                .copied()
                .ok_or_else(|| CliError::Stage(format!("order id {id} is not in the corpus")))
        })
        .collect::<Result<_>>()?;

    let cfg = SimConfig {
        group_size: args.group_size,
        skill0: args.skill0,
        learn_rate: args.learn_rate,
        steps: args.steps,
        seed,
        solve_slope: args.slope,
        solve_bias: args.bias,
        target_skill: args.target_skill,
        window: args.window,
    };

    let result = simulate::run(&order, &cfg)?;
    let comparison = match args.compare {
        Some(CompareArg::Random) => {
            let baseline = simulate::random_order(&order, seed);
            Some(simulate::compare(&baseline, &order, &cfg, args.trials)?)
        }
        None => None,
    };

    if let Some(csv_path) = &args.csv {
        let file = File::create(csv_path)
            .map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
        let mut w = BufWriter::new(file);
        writeln!(
            w,
            "window,zero_signal_frac,all_fail_frac,all_pass_frac,skill"
        )
        .map_err(|e| CliError::Io(e.to_string()))?;
        for (i, zero) in result.zero_signal_frac_by_window.iter().enumerate() {
            let skill_idx = ((i + 1) * cfg.window).min(result.skill_trajectory.len()) - 1;
            writeln!(
                w,
                "{i},{zero},{},{},{}",
                result.all_fail_frac_by_window[i],
                result.all_pass_frac_by_window[i],
                result.skill_trajectory[skill_idx],
            )
            .map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }

    let total_steps = result.zero_signal_steps.len();
    let report = SimulateReport {
        steps: total_steps,
        zero_signal_frac_overall: result.zero_signal_steps.iter().filter(|&&b| b).count() as f64
            / total_steps.max(1) as f64,
        steps_to_target: result.steps_to_target,
        final_skill: *result.skill_trajectory.last().unwrap_or(&cfg.skill0),
        comparison,
    };
    let mut w = out_writer(args.report.as_ref())?;
    let rendered =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Stage(e.to_string()))?;
    writeln!(w, "{rendered}").map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}
