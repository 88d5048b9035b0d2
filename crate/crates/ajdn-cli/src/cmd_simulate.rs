//! `ajdn simulate`: write a synthetic panel CSV plus its ground truth.

use std::path::PathBuf;

use ajdn_core::simulate::{DgpSpec, Process, Scenario, ScenarioKind};

use crate::fail::{data, usage, CliResult};
use crate::io::{self, ScenarioInfo, TruthFile};

/// Error-process families, from easiest to hardest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProcessArg {
    /// Independent standard normals.
    Iid,
    /// Independent AR(1) noise, coefficient 0.25.
    Gs,
    /// Cross-correlated moving-average noise whose level doubles halfway.
    Ps,
    /// Autoregressive noise with a smoothly drifting coefficient.
    Ls,
    /// The drifting autoregression with its level doubled on the middle
    /// third.
    Pls,
}

impl ProcessArg {
    pub fn to_process(self) -> Process {
        match self {
            ProcessArg::Iid => Process::Iid,
            ProcessArg::Gs => Process::StationaryAr,
            ProcessArg::Ps => Process::RegimeVma,
            ProcessArg::Ls => Process::DriftingVar,
            ProcessArg::Pls => Process::RegimeDriftingVar,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProcessArg::Iid => "iid",
            ProcessArg::Gs => "gs",
            ProcessArg::Ps => "ps",
            ProcessArg::Ls => "ls",
            ProcessArg::Pls => "pls",
        }
    }
}

/// Jump layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScenarioArg {
    /// Two jump times, each shared by a block of dimensions.
    Shared,
    /// Single-dimension jumps spread evenly over the middle of the span.
    Scattered,
}

impl ScenarioArg {
    pub fn to_kind(self) -> ScenarioKind {
        match self {
            ScenarioArg::Shared => ScenarioKind::SharedTimes,
            ScenarioArg::Scattered => ScenarioKind::ScatteredTimes,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScenarioArg::Shared => "shared",
            ScenarioArg::Scattered => "scattered",
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    /// Error process.
    #[arg(long, value_enum)]
    pub process: ProcessArg,

    /// Time points.
    #[arg(long)]
    pub n: usize,

    /// Dimensions.
    #[arg(long)]
    pub p: usize,

    /// Add a smooth trend whose slope tracks the local noise level.
    #[arg(long)]
    pub trend: bool,

    /// Plant jumps with this layout (needs --gamma and --delta).
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,

    /// Fraction of dimensions hit by jumps, in (0, 1].
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Jump size in local standard deviations.
    #[arg(long)]
    pub delta: Option<f64>,

    /// Generation seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Output directory (created if missing); receives panel.csv and
    /// truth.json.
    #[arg(long, short = 'o', value_name = "DIR", default_value = "ajdn-sim")]
    pub out_dir: PathBuf,
}

/// Combines the three scenario flags, insisting they arrive together.
pub fn build_scenario(
    kind: Option<ScenarioArg>,
    gamma: Option<f64>,
    delta: Option<f64>,
) -> CliResult<Option<Scenario>> {
    match kind {
        Some(kind) => {
            let gamma = gamma.ok_or_else(|| usage("--scenario needs --gamma"))?;
            let delta = delta.ok_or_else(|| usage("--scenario needs --delta"))?;
            Ok(Some(Scenario {
                kind: kind.to_kind(),
                gamma,
                delta,
            }))
        }
        None => {
            if gamma.is_some() || delta.is_some() {
                return Err(usage("--gamma/--delta need --scenario"));
            }
            Ok(None)
        }
    }
}

pub fn build_spec(args: &SimulateArgs) -> CliResult<(DgpSpec, Option<ScenarioInfo>)> {
    let scenario = build_scenario(args.scenario, args.gamma, args.delta)?;
    let info = args.scenario.zip(scenario).map(|(arg, sc)| ScenarioInfo {
        kind: arg.name().to_string(),
        gamma: sc.gamma,
        delta: sc.delta,
    });
    Ok((
        DgpSpec {
            process: args.process.to_process(),
            trend: args.trend,
            n: args.n,
            p: args.p,
            scenario,
            seed: args.seed,
        },
        info,
    ))
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let (spec, info) = build_spec(args)?;
    let (panel, truth) = ajdn_core::simulate::generate(&spec)?;
    let planted = truth.len();
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| data(format!("cannot create {}: {e}", args.out_dir.display())))?;
    io::write_panel_csv(&args.out_dir.join("panel.csv"), &panel)?;
    io::write_json(
        &args.out_dir.join("truth.json"),
        &TruthFile {
            n: args.n,
            p: args.p,
            seed: args.seed,
            process: args.process.name().to_string(),
            trend: args.trend,
            scenario: info,
            jumps: truth,
        },
    )?;
    println!(
        "wrote {} x {} panel ({planted} planted jump(s)) to {}",
        args.n,
        args.p,
        args.out_dir.display()
    );
    Ok(())
}
