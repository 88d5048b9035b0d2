//! `ajdn filter-check`: validate the jump-pass filter's defining properties.

use ajdn_core::filter::JumpPassFilter;
use ajdn_core::validate::Severity;

use crate::fail::{CliResult, Failure};
use crate::io;

#[derive(Debug, clap::Args)]
pub struct FilterArgs {
    /// Quadrature points for the moment integrals.
    #[arg(long, default_value_t = 10_000)]
    pub points: usize,

    /// Comma-separated polynomial coefficients replacing the built-in
    /// filter; the sign-antisymmetric extension is implied.
    #[arg(long, value_name = "C1,C2,...")]
    pub coeffs: Option<String>,

    /// Polynomial order the replacement filter must annihilate.
    #[arg(long, requires = "coeffs", default_value_t = 2)]
    pub order: usize,

    /// Print the report as JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

pub fn run(args: &FilterArgs) -> CliResult<()> {
    let filter = match &args.coeffs {
        Some(text) => {
            let coeffs: Result<Vec<f64>, _> =
                text.split(',').map(|c| c.trim().parse::<f64>()).collect();
            let coeffs = coeffs.map_err(|e| {
                Failure::Usage(format!("cannot parse --coeffs {text:?}: {e}"))
            })?;
            JumpPassFilter::from_coeffs(coeffs, args.order)?
        }
        None => JumpPassFilter::default(),
    };
    let report = filter.validate(args.points)?;
    if args.json {
        io::emit_json(&report, None)?;
    } else {
        for check in &report.checks {
            let severity = match check.severity {
                Severity::Required => "required",
                Severity::Advisory => "advisory",
            };
            println!(
                "{:<28} value {:>13.6e}  tolerance {:>9.1e}  {:<8} {}",
                check.name,
                check.value,
                check.tolerance,
                severity,
                if check.passed { "PASS" } else { "FAIL" }
            );
        }
    }
    if report.passed() {
        Ok(())
    } else {
        let failed = report
            .failures()
            .filter(|c| c.severity == Severity::Required)
            .count();
        Err(Failure::Degenerate(format!(
            "filter failed {failed} required check(s)"
        )))
    }
}
