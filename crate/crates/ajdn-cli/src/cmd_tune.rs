//! `ajdn tune`: report size-based defaults, the data-driven block fraction,
//! and (given candidates) the penalized-fit comparison.

use std::path::PathBuf;

use ajdn_core::tuning::{self, BicSelection, BlockSelection, HyperParams, RuleOfThumb};
use serde::{Deserialize, Serialize};

use crate::cmd_detect::header_mode;
use crate::fail::{usage, CliResult};
use crate::io;
use crate::params::{DEFAULT_ALPHA, DEFAULT_K0, DEFAULT_SEED};

#[derive(Debug, clap::Args)]
pub struct TuneArgs {
    /// Input CSV: one row per time point, one column per dimension.
    #[arg(long, short = 'i', value_name = "FILE")]
    pub input: PathBuf,

    /// Force the first CSV row to be read as a header.
    #[arg(long)]
    pub header: bool,

    /// Force the first CSV row to be read as data.
    #[arg(long, conflicts_with = "header")]
    pub no_header: bool,

    /// Seed for the pilot detection behind the block-fraction pick (and the
    /// candidate comparison, when one runs).
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// TOML file with [[candidate]] tables (s_min, s_max, s_prime); when
    /// given, each candidate is scored by penalized fit.
    #[arg(long, value_name = "FILE")]
    pub candidates: Option<PathBuf>,

    /// Level for the candidate comparison's detection runs.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,

    /// Bootstrap replicates for the candidate comparison's detection runs.
    #[arg(long, default_value_t = DEFAULT_K0)]
    pub k0: usize,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateList {
    candidate: Vec<HyperParams>,
}

#[derive(Debug, Serialize)]
struct TuneReport {
    n: usize,
    p: usize,
    seed: u64,
    rule_of_thumb: RuleOfThumb,
    block_selection: BlockSelection,
    bic: Option<BicSelection>,
}

pub fn run(args: &TuneArgs) -> CliResult<()> {
    let panel = io::read_panel_csv(&args.input, header_mode(args.header, args.no_header))?;
    let rot = tuning::rule_of_thumb(panel.n(), panel.p())?;
    let block = tuning::select_s_prime(&panel, args.seed)?;
    let bic = match &args.candidates {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read candidates {}: {e}", path.display())))?;
            let list: CandidateList = toml::from_str(&text)
                .map_err(|e| usage(format!("candidates {}: {e}", path.display())))?;
            if list.candidate.is_empty() {
                return Err(usage(format!("{}: no [[candidate]] tables", path.display())));
            }
            Some(tuning::penalized_bic(
                &panel,
                &list.candidate,
                args.alpha,
                args.k0,
                args.seed,
            )?)
        }
        None => None,
    };
    let report = TuneReport {
        n: panel.n(),
        p: panel.p(),
        seed: args.seed,
        rule_of_thumb: rot,
        block_selection: block,
        bic,
    };
    io::emit_json(&report, args.out.as_deref())
}
