//! Detection-parameter resolution shared by `detect` and `bench`.
//!
//! Each knob is resolved independently with the precedence
//! command-line flag > config file > built-in default. The scale window
//! defaults to the size-based rule, the grid size to its size-based
//! formula, and the block fraction to the data-driven selection run on the
//! panel at hand.

use std::path::{Path, PathBuf};

use ajdn_core::detector::{DetectorConfig, RefineSettings};
use ajdn_core::scales::{default_grid_size, ScaleGrid};
use ajdn_core::tuning::{rule_of_thumb, select_s_prime};
use ajdn_core::TimeSeriesPanel;
use serde::Deserialize;

use crate::fail::{usage, CliResult};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_K0: usize = 500;
pub const DEFAULT_SEED: u64 = 1;

/// Flags shared by the commands that run detection.
#[derive(Debug, Clone, clap::Args)]
pub struct ParamFlags {
    /// TOML file with any of: alpha, k0, seed, s_min, s_max, s_prime,
    /// grid_size, exclusion_widen, refine, window_shrink, narrow_halfwidth.
    /// Flags override file entries.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Family-wise error level in (0, 1) [default: 0.05]
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Bootstrap replicates [default: 500]
    #[arg(long)]
    pub k0: Option<usize>,

    /// Seed for the bootstrap multiplier streams [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,

    /// Smallest scale, as a fraction of the series length
    /// [default: size-based rule]
    #[arg(long = "s-min")]
    pub s_min: Option<f64>,

    /// Largest scale, as a fraction of the series length
    /// [default: size-based rule]
    #[arg(long = "s-max")]
    pub s_max: Option<f64>,

    /// Block fraction for the bootstrap's difference panel
    /// [default: selected from the data]
    #[arg(long = "s-prime")]
    pub s_prime: Option<f64>,

    /// Scales per dimension [default: size-based rule]
    #[arg(long = "grid-size")]
    pub grid_size: Option<usize>,

    /// Widens each exclusion half-width by this relative amount
    /// [default: 0.01]
    #[arg(long = "exclusion-widen")]
    pub exclusion_widen: Option<f64>,

    /// Skip the second-stage localization pass
    #[arg(long = "no-refine")]
    pub no_refine: bool,
}

/// Config-file counterpart of [`ParamFlags`]. Unknown keys are rejected so
/// typos fail loudly.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub alpha: Option<f64>,
    pub k0: Option<usize>,
    pub seed: Option<u64>,
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub s_prime: Option<f64>,
    pub grid_size: Option<usize>,
    pub exclusion_widen: Option<f64>,
    pub refine: Option<bool>,
    pub window_shrink: Option<f64>,
    pub narrow_halfwidth: Option<f64>,
}

pub fn load_config(path: &Path) -> CliResult<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
}

/// Where the resolved block fraction came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SPrimeSource {
    Flag,
    Config,
    Selected,
}

/// Fully resolved detection parameters for one panel.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub grid: ScaleGrid,
    pub cfg: DetectorConfig,
    pub s_min: f64,
    pub s_max: f64,
    pub grid_size: usize,
    pub s_prime_source: SPrimeSource,
    /// Block length in samples behind the selected fraction, when the
    /// data-driven selection ran.
    pub block_len: Option<usize>,
}

/// Resolves every parameter against `panel`. `seed_override` replaces the
/// resolved seed (used by `bench` to vary seeds per run while keeping flag
/// and file precedence for everything else).
pub fn resolve(
    panel: &TimeSeriesPanel,
    flags: &ParamFlags,
    file: &ConfigFile,
    seed_override: Option<u64>,
) -> CliResult<Resolved> {
    let n = panel.n();
    let p = panel.p();

    let alpha = flags.alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA);
    let k0 = flags.k0.or(file.k0).unwrap_or(DEFAULT_K0);
    let seed = seed_override.or(flags.seed).or(file.seed).unwrap_or(DEFAULT_SEED);
    let exclusion_widen = flags
        .exclusion_widen
        .or(file.exclusion_widen)
        .unwrap_or(0.01);

    // Scale window: fill whichever bound is missing from the size-based rule.
    let (s_min, s_max) = match (flags.s_min.or(file.s_min), flags.s_max.or(file.s_max)) {
        (Some(lo), Some(hi)) => (lo, hi),
        (lo, hi) => {
            let rot = rule_of_thumb(n, p)?;
            (lo.unwrap_or(rot.s_min), hi.unwrap_or(rot.s_max))
        }
    };
    let grid_size = flags
        .grid_size
        .or(file.grid_size)
        .unwrap_or_else(|| default_grid_size(n, p));
    let grid = ScaleGrid::shared(s_min, s_max, grid_size, p)?;

    let refine = if flags.no_refine || file.refine == Some(false) {
        None
    } else {
        let defaults = RefineSettings::default();
        Some(RefineSettings {
            window_shrink: file.window_shrink.unwrap_or(defaults.window_shrink),
            narrow_halfwidth: file.narrow_halfwidth.or(defaults.narrow_halfwidth),
        })
    };

    let (s_prime, s_prime_source, block_len) = if let Some(v) = flags.s_prime {
        (v, SPrimeSource::Flag, None)
    } else if let Some(v) = file.s_prime {
        (v, SPrimeSource::Config, None)
    } else {
        let sel = select_s_prime(panel, seed)?;
        (sel.s_prime, SPrimeSource::Selected, Some(sel.block_len))
    };

    Ok(Resolved {
        grid,
        cfg: DetectorConfig {
            alpha,
            k0,
            seed,
            s_prime,
            exclusion_widen,
            refine,
        },
        s_min,
        s_max,
        grid_size,
        s_prime_source,
        block_len,
    })
}
