//! Shared fixture builders for the CLI integration and acceptance suites.

// Each test target compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

pub fn bnmath() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bnmath"))
}

pub fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub const CLEAN_PROBLEMS: [&str; 9] = [
    "রামের কাছে পাঁচটি আম আছে সে দুটি খেয়ে ফেলল তার কয়টি আম রইল",
    "সীতার ঝুড়িতে নয়টি কমলা ছিল সে তিনটি বন্ধুকে দিল কয়টি বাকি আছে",
    "একটি ঝুড়িতে বারোটি ডিম আছে চারটি ভেঙে গেল কয়টি ডিম অক্ষত রইল",
    "দোকানে ছয়টি কলম ছিল দুইটি বিক্রি হয়ে গেল কয়টি কলম পড়ে রইল",
    "মাঠে আটটি গরু চরছে তিনটি ঘরে ফিরে গেল মাঠে কয়টি গরু রইল",
    "নদীর ধারে সাতটি পাখি বসে ছিল দুটি উড়ে গেল কয়টি পাখি বসে রইল",
    "বাগানে দশটি ফুল ফুটেছে মালী চারটি তুলে নিল বাগানে কয়টি ফুল রইল",
    "বাক্সে পনেরোটি লিচু ছিল পাঁচটি খাওয়া হলো বাক্সে কয়টি লিচু রইল",
    "গ্রামের পুকুরে এগারোটি হাঁস সাঁতার কাটে ছয়টি ডাঙায় উঠে এল পুকুরে কয়টি রইল",
];

pub fn record(id: &str, problem: &str, answer: &str, cot: bool) -> Value {
    let mut obj = json!({
        "id": id,
        "problem": problem,
        "answer": answer,
        "source": "numina",
    });
    if cot {
        obj["solution_cot"] = json!("ধাপে ধাপে হিসাব করা হলো");
    }
    obj
}

pub fn write_jsonl(path: &Path, lines: &[Value]) {
    fs::write(
        path,
        lines
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("\n")
            + "\n",
    )
    .unwrap();
}

/// A 14-record corpus with one planted failure per filter rule, one fuzzy
/// near-duplicate, one benchmark leak, and rollouts giving fine counts
/// 4,4,3,3,2,2,1,1 for k01..k08 plus 0 for k09 at k = 4.
///
/// Stage-by-stage expectations: filter keeps 11; fuzzy dedup removes dup1;
/// decontamination removes leak1; tagging drops k09 and keeps 8; a
/// 1-per-bucket dev draw takes 4 ids, all validated by the verdicts; the
/// remaining 4 form a uniform RLVR split and SFT is empty.
pub fn write_fixture(dir: &Path) -> (PathBuf, PathBuf, PathBuf, PathBuf) {
    let corpus_path = dir.join("corpus.jsonl");
    let bench_path = dir.join("benchmark.jsonl");
    let rollouts_path = dir.join("rollouts.jsonl");
    let verdicts_path = dir.join("verdicts.jsonl");

    let mcq = format!("{} ক) ২ খ) ৩ গ) ৫ ঘ) ৭", CLEAN_PROBLEMS[0].repeat(10));
    let dup1 = format!("{} আর", CLEAN_PROBLEMS[0]);
    let leak = CLEAN_PROBLEMS[8];

    let mut lines: Vec<Value> = Vec::new();
    for (i, problem) in CLEAN_PROBLEMS.iter().take(8).enumerate() {
        lines.push(record(&format!("k{:02}", i + 1), problem, "৩", i % 2 == 0));
    }
    lines.push(record(
        "k09",
        "শহরের পথে চোদ্দটি নতুন বাতি জ্বলে উঠল পুরনো দুটি নিভে গেল কয়টি বাতি জ্বলছে",
        "১২",
        true,
    ));
    lines.push(record("bad1", CLEAN_PROBLEMS[1], "অজানা মান", false));
    lines.push(record(
        "bad2",
        "How many mangoes are left after eating two of five?",
        "3",
        false,
    ));
    lines.push(record("bad3", &mcq, "2", false));
    lines.push(record("dup1", &dup1, "৩", false));
    lines.push(record("leak1", leak, "৫", false));
    write_jsonl(&corpus_path, &lines);

    write_jsonl(
        &bench_path,
        &[
            record("b1", leak, "৫", false),
            record(
                "b2",
                "সম্পূর্ণ ভিন্ন একটি মানদণ্ড সমস্যা যার সাথে কিছু মেলে না",
                "7",
                false,
            ),
        ],
    );

    let counts = [4, 4, 3, 3, 2, 2, 1, 1, 0usize];
    let rollout_lines: Vec<Value> = counts
        .iter()
        .enumerate()
        .map(|(i, &correct)| {
            let generations: Vec<String> = (0..4)
                .map(|g| {
                    if g < correct {
                        "হিসাব করে পাই <answer>৩</answer>".to_string()
                    } else {
                        "ভুল পথে গিয়ে <answer>৯৯</answer>".to_string()
                    }
                })
                .collect();
            json!({"problem_id": format!("k{:02}", i + 1), "generations": generations})
        })
        .collect();
    write_jsonl(&rollouts_path, &rollout_lines);

    let mut verdict_lines = Vec::new();
    for i in 0..8 {
        for model in ["m1", "m2", "m3"] {
            verdict_lines.push(json!({
                "problem_id": format!("k{:02}", i + 1),
                "model_id": model,
                "answers": [3.0, 3.0, 99.0],
            }));
        }
    }
    write_jsonl(&verdicts_path, &verdict_lines);

    (corpus_path, bench_path, rollouts_path, verdicts_path)
}

pub fn run_pipeline(fixture: &Path, out_dir: &Path, extra: &[&str]) {
    let mut cmd = bnmath();
    cmd.args([
        "pipeline",
        "--in",
        fixture.join("corpus.jsonl").to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--benchmark",
        fixture.join("benchmark.jsonl").to_str().unwrap(),
        "--rollouts",
        fixture.join("rollouts.jsonl").to_str().unwrap(),
        "--verdicts",
        fixture.join("verdicts.jsonl").to_str().unwrap(),
        "--k",
        "4",
        "--dev-per-bucket",
        "1",
    ]);
    cmd.args(extra);
    run_ok(&mut cmd);
}
