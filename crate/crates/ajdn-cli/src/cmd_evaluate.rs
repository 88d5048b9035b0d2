//! `ajdn evaluate`: score a detection output against simulated ground truth.

use std::path::PathBuf;

use ajdn_core::detector::JumpRecord;
use ajdn_core::evaluate::{score_run, RunScore};
use serde::Serialize;

use crate::fail::CliResult;
use crate::io::{self, TruthFile};

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    /// jumps.json written by `ajdn detect`.
    #[arg(long, value_name = "FILE")]
    pub jumps: PathBuf,

    /// truth.json written by `ajdn simulate`.
    #[arg(long, value_name = "FILE")]
    pub truth: PathBuf,

    /// Matching margin as a time fraction; overrides the per-jump default.
    #[arg(long)]
    pub margin: Option<f64>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct EvaluateReport {
    n: usize,
    p: usize,
    seed: u64,
    margin_override: Option<f64>,
    score: RunScore,
}

pub fn run(args: &EvaluateArgs) -> CliResult<()> {
    let records: Vec<JumpRecord> = io::read_json(&args.jumps)?;
    let truth: TruthFile = io::read_json(&args.truth)?;
    let score = score_run(&records, &truth.jumps, truth.n, truth.p, args.margin)?;
    let report = EvaluateReport {
        n: truth.n,
        p: truth.p,
        seed: truth.seed,
        margin_override: args.margin,
        score,
    };
    io::emit_json(&report, args.out.as_deref())
}
