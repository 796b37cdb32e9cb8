//! Desk-scale cold-start simulator.
//!
//! A synthetic learner consumes a training order one problem at a time. For
//! each problem it draws a group of G Bernoulli rollouts whose success
//! probability follows a logistic solve model,
//! `sigma(a * (skill - difficulty) + b)`, with `difficulty = (33 - c) / 32`
//! for fine count `c`. A group whose outcomes are all equal — all wrong or
//! all right — carries no group-relative learning signal and leaves the
//! skill unchanged; that is the cold-start mechanism. Mixed groups update
//! the skill by `learn_rate` times the group's mean absolute advantage,
//! `2 * sqrt(m/G * (1 - m/G))` for `m` successes.
//!
//! [`compare`] runs the same record set under a random and a curriculum
//! order across seeded trials and reports early zero-signal rates and
//! steps-to-target-skill for each.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hash64::derive_seed;

pub const DEFAULT_GROUP_SIZE: u32 = 8;

const CTX_TRIAL: u64 = 5;
const CTX_RANDOM_ORDER: u64 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Rollout group size G.
    pub group_size: u32,
    /// Initial learner skill.
    pub skill0: f64,
    pub learn_rate: f64,
    /// Number of problems consumed; 0 means the whole order.
    pub steps: usize,
    pub seed: u64,
    /// Slope `a` of the logistic solve model.
    pub solve_slope: f64,
    /// Bias `b` of the logistic solve model.
    pub solve_bias: f64,
    /// Skill level at which `steps_to_target` fires.
    pub target_skill: f64,
    /// Steps per window in the reported time series.
    pub window: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        // A low-skill learner on the 32-count difficulty scale. The solve
        // model is steep enough that items far from the learner's frontier
        // carry no signal, and the learning rate is matched to a
        // curriculum-paced difficulty ramp.
        SimConfig {
            group_size: DEFAULT_GROUP_SIZE,
            skill0: 0.05,
            learn_rate: 0.0015,
            steps: 0,
            seed: crate::dedup::DEFAULT_SEED,
            solve_slope: 16.0,
            solve_bias: 0.0,
            target_skill: 0.8,
            window: 50,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.group_size < 2 {
            return Err(Error::InvalidParam(format!(
                "group_size must be at least 2, got {}",
                self.group_size
            )));
        }
        if self.window == 0 {
            return Err(Error::InvalidParam("window must be positive".into()));
        }
        if !self.learn_rate.is_finite() || self.learn_rate < 0.0 {
            return Err(Error::InvalidParam(format!(
                "learn_rate must be non-negative, got {}",
                self.learn_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SimResult {
    /// Fraction of groups per window with all-equal rewards (either way).
    pub zero_signal_frac_by_window: Vec<f64>,
    /// All-wrong groups per window: the cold-start case.
    pub all_fail_frac_by_window: Vec<f64>,
    /// All-right groups per window: zero advantage from the other side.
    pub all_pass_frac_by_window: Vec<f64>,
    /// Skill after each step.
    pub skill_trajectory: Vec<f64>,
    /// First step (1-based) at which skill reached the target, if ever.
    pub steps_to_target: Option<usize>,
    /// Per-step zero-signal flags; the windowed series above aggregate this.
    #[serde(skip)]
    pub zero_signal_steps: Vec<bool>,
}

/// Difficulty of a fine count: 1 maps to 1.0 (hardest), 32 to 1/32.
pub fn difficulty_of(count: u32) -> f64 {
    (33.0 - count as f64) / 32.0
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Probability that a rollout group of size G carries no learning signal
/// when each rollout succeeds independently with probability `p`.
pub fn closed_form_zero_signal(p: f64, group_size: u32) -> f64 {
    p.powi(group_size as i32) + (1.0 - p).powi(group_size as i32)
}

/// Runs the learner over `order` (fine counts in training order).
pub fn run(order: &[u32], cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    if order.is_empty() {
        return Err(Error::InvalidParam("order is empty".into()));
    }
    let steps = if cfg.steps == 0 {
        order.len()
    } else {
        cfg.steps.min(order.len())
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut skill = cfg.skill0;
    let mut result = SimResult::default();
    let mut all_fail_steps: Vec<bool> = Vec::with_capacity(steps);
    let mut all_pass_steps: Vec<bool> = Vec::with_capacity(steps);

    for (step, &count) in order.iter().take(steps).enumerate() {
        let p = sigmoid(cfg.solve_slope * (skill - difficulty_of(count)) + cfg.solve_bias);
        let successes = (0..cfg.group_size)
            .filter(|_| rng.random::<f64>() < p)
            .count() as u32;

        let all_fail = successes == 0;
        let all_pass = successes == cfg.group_size;
        if !(all_fail || all_pass) {
            let p_hat = successes as f64 / cfg.group_size as f64;
            skill += cfg.learn_rate * 2.0 * (p_hat * (1.0 - p_hat)).sqrt();
        }

        all_fail_steps.push(all_fail);
        all_pass_steps.push(all_pass);
        result.zero_signal_steps.push(all_fail || all_pass);
        result.skill_trajectory.push(skill);
        if result.steps_to_target.is_none() && skill >= cfg.target_skill {
            result.steps_to_target = Some(step + 1);
        }
    }

    let frac = |flags: &[bool]| {
        flags
            .chunks(cfg.window)
            .map(|w| w.iter().filter(|&&b| b).count() as f64 / w.len() as f64)
            .collect::<Vec<f64>>()
    };
    result.zero_signal_frac_by_window = frac(&result.zero_signal_steps);
    result.all_fail_frac_by_window = frac(&all_fail_steps);
    result.all_pass_frac_by_window = frac(&all_pass_steps);
    Ok(result)
}

/// Mean zero-signal rate over the first 10% of steps.
pub fn early_zero_signal_frac(result: &SimResult) -> f64 {
    let n = result.zero_signal_steps.len();
    if n == 0 {
        return 0.0;
    }
    let early = (n / 10).max(1);
    result.zero_signal_steps[..early]
        .iter()
        .filter(|&&b| b)
        .count() as f64
        / early as f64
}

/// Paired summary of random-order vs curriculum-order runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub trials: usize,
    pub random_early_zero_signal_mean: f64,
    pub curriculum_early_zero_signal_mean: f64,
    /// Trials where the curriculum's early zero-signal rate was strictly
    /// lower than the random order's.
    pub curriculum_lower_early: usize,
    /// Trials where curriculum steps-to-target was at most the random
    /// order's (an unreached target counts as worse than any reached one).
    pub curriculum_steps_leq: usize,
    pub random_target_reached: usize,
    pub curriculum_target_reached: usize,
    pub random_mean_steps_to_target: Option<f64>,
    pub curriculum_mean_steps_to_target: Option<f64>,
}

/// Runs `trials` paired simulations of the same record set under both
/// orders. Trial i uses a seed derived from `cfg.seed` and i, identical for
/// both orders.
pub fn compare(
    random_order: &[u32],
    curriculum_order: &[u32],
    cfg: &SimConfig,
    trials: usize,
) -> Result<CompareSummary> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParam("trials must be positive".into()));
    }

    let mut summary = CompareSummary {
        trials,
        random_early_zero_signal_mean: 0.0,
        curriculum_early_zero_signal_mean: 0.0,
        curriculum_lower_early: 0,
        curriculum_steps_leq: 0,
        random_target_reached: 0,
        curriculum_target_reached: 0,
        random_mean_steps_to_target: None,
        curriculum_mean_steps_to_target: None,
    };
    let mut random_steps_sum = 0usize;
    let mut curriculum_steps_sum = 0usize;

    for trial in 0..trials {
        let mut trial_cfg = *cfg;
        trial_cfg.seed = derive_seed(cfg.seed, &[CTX_TRIAL, trial as u64]);
        let random_result = run(random_order, &trial_cfg)?;
        let curriculum_result = run(curriculum_order, &trial_cfg)?;

        let random_early = early_zero_signal_frac(&random_result);
        let curriculum_early = early_zero_signal_frac(&curriculum_result);
        summary.random_early_zero_signal_mean += random_early;
        summary.curriculum_early_zero_signal_mean += curriculum_early;
        if curriculum_early < random_early {
            summary.curriculum_lower_early += 1;
        }

        match (
            curriculum_result.steps_to_target,
            random_result.steps_to_target,
        ) {
            (Some(c), Some(r)) if c <= r => summary.curriculum_steps_leq += 1,
            (Some(_), None) | (None, None) => summary.curriculum_steps_leq += 1,
            _ => {}
        }
        if let Some(r) = random_result.steps_to_target {
            summary.random_target_reached += 1;
            random_steps_sum += r;
        }
        if let Some(c) = curriculum_result.steps_to_target {
            summary.curriculum_target_reached += 1;
            curriculum_steps_sum += c;
        }
    }

    summary.random_early_zero_signal_mean /= trials as f64;
    summary.curriculum_early_zero_signal_mean /= trials as f64;
    if summary.random_target_reached > 0 {
        summary.random_mean_steps_to_target =
            Some(random_steps_sum as f64 / summary.random_target_reached as f64);
    }
    if summary.curriculum_target_reached > 0 {
        summary.curriculum_mean_steps_to_target =
            Some(curriculum_steps_sum as f64 / summary.curriculum_target_reached as f64);
    }
    Ok(summary)
}

/// A seeded uniform shuffle of `order`, for the `compare` baseline.
pub fn random_order(order: &[u32], seed: u64) -> Vec<u32> {
    use rand::seq::SliceRandom;
    let mut shuffled = order.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[CTX_RANDOM_ORDER]));
    shuffled.shuffle(&mut rng);
    shuffled
}
