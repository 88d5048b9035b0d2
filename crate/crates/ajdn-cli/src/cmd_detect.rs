//! `ajdn detect`: run the full pipeline on a CSV panel.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ajdn_core::detector::{Detection, StatisticField};
use ajdn_core::filter::{JumpPassFilter, KernelBank};
use ajdn_core::scales::ScaleGrid;
use ajdn_core::variance::LocalVarianceField;
use ajdn_core::TimeSeriesPanel;

use crate::fail::{data, usage, CliResult};
use crate::io::{self, HeaderMode};
use crate::params::{self, ConfigFile, ParamFlags, Resolved, SPrimeSource};

#[derive(Debug, clap::Args)]
pub struct DetectArgs {
    /// Input CSV: one row per time point, one column per dimension.
    #[arg(long, short = 'i', value_name = "FILE")]
    pub input: PathBuf,

    /// Output directory (created if missing); receives jumps.json and
    /// summary.txt.
    #[arg(long, short = 'o', value_name = "DIR", default_value = "ajdn-out")]
    pub out_dir: PathBuf,

    /// Force the first CSV row to be read as a header.
    #[arg(long)]
    pub header: bool,

    /// Force the first CSV row to be read as data.
    #[arg(long, conflicts_with = "header")]
    pub no_header: bool,

    #[command(flatten)]
    pub params: ParamFlags,

    /// Also write the per-dimension scan statistics to this CSV.
    #[arg(long, value_name = "FILE")]
    pub dump_field: Option<PathBuf>,

    /// Also write the local standard-deviation field to this CSV.
    #[arg(long, value_name = "FILE")]
    pub dump_variance: Option<PathBuf>,
}

pub fn header_mode(header: bool, no_header: bool) -> HeaderMode {
    if header {
        HeaderMode::Yes
    } else if no_header {
        HeaderMode::No
    } else {
        HeaderMode::Auto
    }
}

pub fn run(args: &DetectArgs) -> CliResult<()> {
    let panel = io::read_panel_csv(&args.input, header_mode(args.header, args.no_header))?;
    let file = match &args.params.config {
        Some(path) => params::load_config(path)?,
        None => ConfigFile::default(),
    };
    let resolved = params::resolve(&panel, &args.params, &file, None)?;

    let filter = JumpPassFilter::default();
    let detection = ajdn_core::detector::detect_jumps(&panel, &resolved.grid, &filter, &resolved.cfg)?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| data(format!("cannot create {}: {e}", args.out_dir.display())))?;
    io::write_json(&args.out_dir.join("jumps.json"), &detection.records)?;
    write_summary(
        &args.out_dir.join("summary.txt"),
        &args.input,
        &panel,
        &resolved,
        &detection,
    )?;

    if args.dump_field.is_some() || args.dump_variance.is_some() {
        dump_fields(
            &panel,
            &resolved.grid,
            &filter,
            args.dump_field.as_deref(),
            args.dump_variance.as_deref(),
        )?;
    }

    println!(
        "{} jump(s) detected; results in {}",
        detection.records.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn write_summary(
    path: &Path,
    input: &Path,
    panel: &TimeSeriesPanel,
    resolved: &Resolved,
    detection: &Detection,
) -> CliResult<()> {
    let file = File::create(path)
        .map_err(|e| data(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    let cfg = &resolved.cfg;
    writeln!(w, "ajdn detect")?;
    writeln!(w, "input: {}", input.display())?;
    writeln!(w, "n: {}  p: {}", panel.n(), panel.p())?;
    writeln!(w, "alpha: {}  k0: {}  seed: {}", cfg.alpha, cfg.k0, cfg.seed)?;
    writeln!(
        w,
        "scales: {:.6} .. {:.6}  ({} per dimension)",
        resolved.s_min, resolved.s_max, resolved.grid_size
    )?;
    let origin = match resolved.s_prime_source {
        SPrimeSource::Flag => "flag".to_string(),
        SPrimeSource::Config => "config".to_string(),
        SPrimeSource::Selected => match resolved.block_len {
            Some(m) => format!("selected from data, block length {m}"),
            None => "selected from data".to_string(),
        },
    };
    writeln!(w, "block fraction s': {:.6}  ({origin})", cfg.s_prime)?;
    writeln!(w, "refine: {}", if cfg.refine.is_some() { "on" } else { "off" })?;
    writeln!(w, "initial critical value: {:.6}", detection.initial_critical_value)?;
    writeln!(w, "jumps detected: {}", detection.records.len())?;
    if !detection.records.is_empty() {
        writeln!(
            w,
            "{:>4} {:>5} {:>7} {:>9} {:>9} {:>11} {:>11}",
            "iter", "dim", "index", "time", "refined", "statistic", "threshold"
        )?;
        for rec in &detection.records {
            let refined = match rec.refined_time {
                Some(t) => format!("{t:.6}"),
                None => "-".to_string(),
            };
            writeln!(
                w,
                "{:>4} {:>5} {:>7} {:>9.6} {:>9} {:>11.4} {:>11.4}",
                rec.iteration, rec.dimension, rec.index, rec.time, refined, rec.statistic,
                rec.critical_value
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Recomputes the scan-statistic and local-sd fields (cheap next to the
/// bootstrap) and writes whichever dumps were requested.
fn dump_fields(
    panel: &TimeSeriesPanel,
    grid: &ScaleGrid,
    filter: &JumpPassFilter,
    field_path: Option<&Path>,
    variance_path: Option<&Path>,
) -> CliResult<()> {
    let variance = LocalVarianceField::precompute(panel, grid)?;
    if let Some(path) = variance_path {
        let file = File::create(path)
            .map_err(|e| data(format!("cannot create {}: {e}", path.display())))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(["dimension", "index", "time", "sigma"])?;
        let n = panel.n() as f64;
        for r in 0..panel.p() {
            let (lo, hi) = variance.range(r);
            for i in lo..=hi {
                let sigma = variance.sigma(r, i).ok_or_else(|| {
                    usage(format!("variance undefined at dimension {r}, index {i}"))
                })?;
                w.write_record([
                    r.to_string(),
                    i.to_string(),
                    (((i + 1) as f64) / n).to_string(),
                    sigma.to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    if let Some(path) = field_path {
        let kernels = KernelBank::new(filter, panel.n(), &grid.unique_scales())?;
        let field = StatisticField::compute(panel, grid, &kernels, &variance)?;
        let file = File::create(path)
            .map_err(|e| data(format!("cannot create {}: {e}", path.display())))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(["dimension", "index", "time", "statistic", "scale"])?;
        let n = panel.n() as f64;
        for r in 0..panel.p() {
            let (lo, hi) = variance.range(r);
            for i in lo..=hi {
                let (g, si) = match (field.g(r, i), field.scale_index(r, i)) {
                    (Some(g), Some(si)) => (g, si),
                    _ => continue,
                };
                w.write_record([
                    r.to_string(),
                    i.to_string(),
                    (((i + 1) as f64) / n).to_string(),
                    g.to_string(),
                    grid.dim(r).scales[si].to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    Ok(())
}
