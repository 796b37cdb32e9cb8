use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bnmath_core::dedup::DEFAULT_SEED;

/// Corpus curation and curriculum-RLVR toolkit for Bengali math data.
#[derive(Debug, Parser)]
#[command(name = "bnmath", version, about)]
pub struct Cli {
    /// Master seed for every seeded draw (sampling, shuffling, MinHash).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Worker threads; 0 picks the machine default. Results are identical
    /// for any worker count.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// Abort on the first malformed input line instead of skipping it.
    #[arg(long, global = true)]
    pub strict: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corpus statistics: totals, sources, difficulty buckets, script ratios.
    Stats(StatsArgs),
    /// Rule-based filtering: numeric answers, Bengali ratio, no MCQs.
    Filter(FilterArgs),
    /// Fuzzy and/or MinHash near-duplicate removal.
    Dedup(DedupArgs),
    /// Remove training records too similar to benchmark problems.
    Decontaminate(DecontaminateArgs),
    /// Grade rollout files against gold answers.
    Grade(GradeArgs),
    /// Tag records with fine difficulty counts from graded rollouts.
    TagDifficulty(TagDifficultyArgs),
    /// Build dev, RLVR, and SFT splits.
    Split(SplitArgs),
    /// Emit a curriculum-ordered id sequence for RLVR training.
    ShuffleCurriculum(ShuffleCurriculumArgs),
    /// Score generations with the verifiable reward function.
    Score(ScoreArgs),
    /// Run the cold-start simulator over a training order.
    Simulate(SimulateArgs),
    /// Run every stage end to end.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Input corpus (JSON lines).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Report file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rollout count behind the difficulty tags, for coarse bucketing.
    #[arg(long, default_value_t = bnmath_core::difficulty::DEFAULT_K)]
    pub k: u32,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    /// Minimum Bengali character ratio of the problem text.
    #[arg(long, default_value_t = bnmath_core::filter::DEFAULT_MIN_BENGALI)]
    pub min_bengali: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DedupStageArg {
    Fuzzy,
    Minhash,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FuzzyModeArg {
    /// 3-gram blocking confirmed by normalized Levenshtein similarity.
    Levenshtein,
    /// 3-gram blocking confirmed by exact 3-gram Jaccard.
    Jaccard,
}

impl From<FuzzyModeArg> for bnmath_core::dedup::FuzzyMode {
    fn from(arg: FuzzyModeArg) -> Self {
        match arg {
            FuzzyModeArg::Levenshtein => bnmath_core::dedup::FuzzyMode::Levenshtein,
            FuzzyModeArg::Jaccard => bnmath_core::dedup::FuzzyMode::Jaccard,
        }
    }
}

#[derive(Debug, Args)]
pub struct DedupArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, value_enum, default_value_t = DedupStageArg::Both)]
    pub stage: DedupStageArg,
    /// Threshold for the selected stage; invalid with --stage both.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = bnmath_core::dedup::DEFAULT_FUZZY_THRESHOLD)]
    pub fuzzy_threshold: f64,
    #[arg(long, default_value_t = bnmath_core::dedup::DEFAULT_MINHASH_THRESHOLD)]
    pub minhash_threshold: f64,
    #[arg(long, value_enum, default_value_t = FuzzyModeArg::Levenshtein)]
    pub fuzzy_mode: FuzzyModeArg,
}

#[derive(Debug, Args)]
pub struct DecontaminateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Benchmark corpus to decontaminate against (never modified).
    #[arg(long)]
    pub benchmark: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value_t = bnmath_core::dedup::DEFAULT_MINHASH_THRESHOLD)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct GradeArgs {
    /// Rollout file: one {problem_id, generations[]} object per line.
    #[arg(long)]
    pub rollouts: PathBuf,
    /// Corpus supplying gold answers by id.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Per-problem grading output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = bnmath_core::difficulty::DEFAULT_K)]
    pub k: u32,
    /// Accept rollouts with fewer than k generations.
    #[arg(long)]
    pub allow_partial: bool,
}

#[derive(Debug, Args)]
pub struct TagDifficultyArgs {
    #[arg(long)]
    pub rollouts: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Tagged corpus output (records the evaluator never solved are dropped).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value_t = bnmath_core::difficulty::DEFAULT_K)]
    pub k: u32,
    #[arg(long)]
    pub allow_partial: bool,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Tagged corpus (every record carries a correct_count).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Split manifest output (JSON).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Verdict file for dev LLM-filtering; skipped when omitted.
    #[arg(long)]
    pub verdicts: Option<PathBuf>,
    /// Also materialize rlvr.jsonl, sft.jsonl, and dev.jsonl here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = bnmath_core::splits::DEFAULT_DEV_PER_BUCKET)]
    pub dev_per_bucket: usize,
}

#[derive(Debug, Args)]
pub struct ShuffleCurriculumArgs {
    /// Tagged corpus to schedule (typically the RLVR split).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Order file: one record id per line.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional block-structure manifest (JSON).
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long, default_value_t = bnmath_core::curriculum::DEFAULT_PRIMARY_FRAC)]
    pub primary_frac: f64,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Corpus supplying gold answers by id.
    #[arg(long)]
    pub gold: PathBuf,
    /// Generations file: one {problem_id, generations[]} object per line.
    #[arg(long)]
    pub generations: PathBuf,
    /// One reward breakdown per (problem, generation); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = bnmath_core::rewards::DEFAULT_BENGALI_MIN)]
    pub bengali_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareArg {
    Random,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Order file: one record id per line.
    #[arg(long)]
    pub order: PathBuf,
    /// Tagged corpus resolving each id to its fine difficulty count.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Also run a baseline ordering and report the paired comparison.
    #[arg(long, value_enum)]
    pub compare: Option<CompareArg>,
    #[arg(long, default_value_t = bnmath_core::simulate::DEFAULT_GROUP_SIZE)]
    pub group_size: u32,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Problems consumed per run; 0 means the whole order.
    #[arg(long, default_value_t = 0)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub skill0: f64,
    #[arg(long, default_value_t = 0.0015)]
    pub learn_rate: f64,
    #[arg(long, default_value_t = 0.8)]
    pub target_skill: f64,
    /// Slope of the logistic solve model.
    #[arg(long, default_value_t = 16.0)]
    pub slope: f64,
    /// Bias of the logistic solve model.
    #[arg(long, default_value_t = 0.0)]
    pub bias: f64,
    #[arg(long, default_value_t = 50)]
    pub window: usize,
    /// Summary report file; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Windowed time-series CSV of a single run over the given order.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Pipeline config file (JSON); flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub benchmark: Option<PathBuf>,
    #[arg(long)]
    pub rollouts: Option<PathBuf>,
    #[arg(long)]
    pub verdicts: Option<PathBuf>,
    #[arg(long)]
    pub min_bengali: Option<f64>,
    #[arg(long)]
    pub fuzzy_threshold: Option<f64>,
    #[arg(long)]
    pub minhash_threshold: Option<f64>,
    #[arg(long)]
    pub decontamination_threshold: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub dev_per_bucket: Option<usize>,
    #[arg(long)]
    pub primary_frac: Option<f64>,
    #[arg(long)]
    pub bengali_min: Option<f64>,
    #[arg(long, value_enum)]
    pub fuzzy_mode: Option<FuzzyModeArg>,
}
