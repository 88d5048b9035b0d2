//! Scoring detections against simulated ground truth.
//!
//! A detection matches a true jump when it is in the same dimension and
//! within that jump's time margin; matching is greedy in deviation. A run is
//! perfect when every true jump is matched and nothing is left over. The
//! localization error is averaged per run over matched pairs, then across
//! runs that matched at least once.

use alloc::format;
use alloc::vec::Vec;

use crate::detector::JumpRecord;
use crate::error::{argument, Error};
use crate::math;

/// A planted jump.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrueJump {
    /// 0-based dimension.
    pub dimension: usize,
    /// 0-based index of the last pre-jump sample.
    pub index: usize,
    /// Fractional jump time (the last pre-jump sample's time).
    pub time: f64,
    /// Signal-to-noise ratio of the jump (size in local-sd units).
    pub snr: f64,
    /// Absolute jump size added to the series.
    pub magnitude: f64,
}

/// Matching margin as a time fraction: `ln(n) * ln(p) / (2 n snr^2)`.
/// Tighter for larger panels and stronger jumps.
pub fn margin_fraction(n: usize, p: usize, snr: f64) -> Result<f64, Error> {
    if n < 2 || p < 1 {
        return Err(argument("margin needs n >= 2 and p >= 1"));
    }
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(argument(format!("signal-to-noise ratio {snr} must be positive")));
    }
    Ok(math::ln(n as f64) * math::ln(p as f64) / (2.0 * n as f64 * snr * snr))
}

/// Outcome of scoring one run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunScore {
    /// Detections counted once per distinct time (same-time detections in
    /// several dimensions collapse).
    pub distinct_detections: usize,
    /// True jumps that were matched.
    pub matched: usize,
    /// True jumps planted.
    pub truth_count: usize,
    /// Detections left unmatched.
    pub false_positives: usize,
    /// Every truth matched and no false positives.
    pub perfect: bool,
    /// Mean |detected - true| over matched pairs, in samples; `None` when
    /// nothing matched.
    pub mad_samples: Option<f64>,
}

/// Scores one run. Each detection's best available time (refined when
/// present) is compared against each true jump of the same dimension; pairs
/// within the margin are matched greedily by deviation. `margin_override`
/// (a time fraction) replaces the per-jump margin; otherwise each jump uses
/// its own signal-to-noise ratio.
pub fn score_run(
    records: &[JumpRecord],
    truth: &[TrueJump],
    n: usize,
    p: usize,
    margin_override: Option<f64>,
) -> Result<RunScore, Error> {
    if let Some(m) = margin_override {
        if !(m >= 0.0) || !m.is_finite() {
            return Err(argument(format!("margin override {m} must be nonnegative")));
        }
    }
    // Candidate pairs (deviation, truth, record) within margin, same dim.
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (ti, t) in truth.iter().enumerate() {
        let margin = match margin_override {
            Some(m) => m,
            None => margin_fraction(n, p, t.snr)?,
        };
        for (ri, rec) in records.iter().enumerate() {
            if rec.dimension != t.dimension {
                continue;
            }
            let dev = math::abs(rec.best_time() - t.time);
            if dev <= margin {
                pairs.push((dev, ti, ri));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut truth_used = alloc::vec![false; truth.len()];
    let mut rec_used = alloc::vec![false; records.len()];
    let mut matched = 0usize;
    let mut dev_sum = 0.0;
    for (dev, ti, ri) in pairs {
        if truth_used[ti] || rec_used[ri] {
            continue;
        }
        truth_used[ti] = true;
        rec_used[ri] = true;
        matched += 1;
        dev_sum += dev * n as f64;
    }
    let mut indices: Vec<usize> = records.iter().map(JumpRecord::best_index).collect();
    indices.sort_unstable();
    indices.dedup();
    let false_positives = rec_used.iter().filter(|&&u| !u).count();
    Ok(RunScore {
        distinct_detections: indices.len(),
        matched,
        truth_count: truth.len(),
        false_positives,
        perfect: matched == truth.len() && false_positives == 0,
        mad_samples: (matched > 0).then(|| dev_sum / matched as f64),
    })
}

/// Metrics aggregated over Monte Carlo runs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvaluationResult {
    pub runs: usize,
    /// Mean number of distinct detected times per run.
    pub avg_detections: f64,
    /// Fraction of perfect runs.
    pub perfect_rate: f64,
    /// Mean per-run localization error in samples, over runs that matched at
    /// least one jump; `None` when no run matched.
    pub mad_samples: Option<f64>,
    /// Fraction of runs with at least one detection (the rejection rate on
    /// jump-free panels).
    pub rejection_rate: f64,
}

/// Combines per-run scores.
pub fn aggregate(scores: &[RunScore]) -> Result<EvaluationResult, Error> {
    if scores.is_empty() {
        return Err(argument("no runs to aggregate"));
    }
    let runs = scores.len();
    let avg_detections =
        scores.iter().map(|s| s.distinct_detections as f64).sum::<f64>() / runs as f64;
    let perfect_rate = scores.iter().filter(|s| s.perfect).count() as f64 / runs as f64;
    let rejection_rate =
        scores.iter().filter(|s| s.distinct_detections > 0).count() as f64 / runs as f64;
    let mads: Vec<f64> = scores.iter().filter_map(|s| s.mad_samples).collect();
    let mad_samples = if mads.is_empty() {
        None
    } else {
        Some(mads.iter().sum::<f64>() / mads.len() as f64)
    };
    Ok(EvaluationResult {
        runs,
        avg_detections,
        perfect_rate,
        mad_samples,
        rejection_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn record(dimension: usize, index: usize, n: usize) -> JumpRecord {
        JumpRecord {
            dimension,
            index,
            time: (index + 1) as f64 / n as f64,
            scale: 0.1,
            statistic: 5.0,
            critical_value: 3.0,
            iteration: 1,
            refined_index: None,
            refined_time: None,
        }
    }

    fn jump(dimension: usize, index: usize, n: usize, snr: f64) -> TrueJump {
        TrueJump {
            dimension,
            index,
            time: (index + 1) as f64 / n as f64,
            snr,
            magnitude: snr,
        }
    }

    #[test]
    fn margin_frozen_value() {
        // ln(1000) * ln(20) / (2 * 1000 * 25)
        let m = margin_fraction(1000, 20, 5.0).unwrap();
        assert!((m - 4.1387e-4).abs() < 1e-7, "margin {m}");
        assert!(margin_fraction(1000, 20, 0.0).is_err());
        assert!(margin_fraction(1, 20, 5.0).is_err());
    }

    #[test]
    fn exact_match_is_perfect() {
        let n = 1000;
        let truth = vec![jump(0, 499, n, 5.0)];
        let recs = vec![record(0, 499, n)];
        let s = score_run(&recs, &truth, n, 20, None).unwrap();
        assert!(s.perfect);
        assert_eq!(s.matched, 1);
        assert_eq!(s.false_positives, 0);
        assert_eq!(s.distinct_detections, 1);
        assert_eq!(s.mad_samples, Some(0.0));
    }

    #[test]
    fn margin_excludes_distant_detection() {
        let n = 1000;
        let truth = vec![jump(0, 499, n, 5.0)];
        // Off by two samples: outside the sub-sample margin at snr 5.
        let recs = vec![record(0, 501, n)];
        let s = score_run(&recs, &truth, n, 20, None).unwrap();
        assert_eq!(s.matched, 0);
        assert_eq!(s.false_positives, 1);
        assert!(!s.perfect);
        assert_eq!(s.mad_samples, None);
        // A generous override admits it.
        let s = score_run(&recs, &truth, n, 20, Some(0.01)).unwrap();
        assert_eq!(s.matched, 1);
        assert!((s.mad_samples.unwrap() - 2.0).abs() < 1e-9);
        assert!(s.perfect);
    }

    #[test]
    fn same_time_across_dimensions_collapses_in_count() {
        let n = 400;
        let truth = vec![jump(0, 99, n, 4.0), jump(1, 99, n, 4.0)];
        let recs = vec![record(0, 99, n), record(1, 99, n)];
        let s = score_run(&recs, &truth, n, 10, None).unwrap();
        assert_eq!(s.matched, 2);
        assert_eq!(s.distinct_detections, 1);
        assert!(s.perfect);
    }

    #[test]
    fn wrong_dimension_never_matches() {
        let n = 400;
        let truth = vec![jump(0, 99, n, 4.0)];
        let recs = vec![record(1, 99, n)];
        let s = score_run(&recs, &truth, n, 10, Some(0.5)).unwrap();
        assert_eq!(s.matched, 0);
        assert_eq!(s.false_positives, 1);
    }

    #[test]
    fn greedy_matching_prefers_nearest() {
        let n = 1000;
        let truth = vec![jump(0, 499, n, 1.0)];
        let recs = vec![record(0, 503, n), record(0, 500, n)];
        let s = score_run(&recs, &truth, n, 10, Some(0.02)).unwrap();
        assert_eq!(s.matched, 1);
        assert_eq!(s.false_positives, 1);
        assert!((s.mad_samples.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn refined_time_wins_when_present() {
        let n = 1000;
        let truth = vec![jump(0, 499, n, 5.0)];
        let mut rec = record(0, 502, n);
        rec.refined_index = Some(499);
        rec.refined_time = Some(500.0 / 1000.0);
        let s = score_run(&[rec], &truth, n, 20, None).unwrap();
        assert!(s.perfect);
        assert_eq!(s.mad_samples, Some(0.0));
    }

    #[test]
    fn aggregation() {
        let mk = |distinct, matched, truth_count, fp, mad: Option<f64>| RunScore {
            distinct_detections: distinct,
            matched,
            truth_count,
            false_positives: fp,
            perfect: matched == truth_count && fp == 0,
            mad_samples: mad,
        };
        let scores = vec![
            mk(2, 2, 2, 0, Some(0.5)),
            mk(1, 1, 2, 0, Some(1.5)),
            mk(0, 0, 2, 0, None),
            mk(3, 2, 2, 1, Some(1.0)),
        ];
        let agg = aggregate(&scores).unwrap();
        assert_eq!(agg.runs, 4);
        assert!((agg.avg_detections - 1.5).abs() < 1e-12);
        assert!((agg.perfect_rate - 0.25).abs() < 1e-12);
        assert!((agg.mad_samples.unwrap() - 1.0).abs() < 1e-12);
        assert!((agg.rejection_rate - 0.75).abs() < 1e-12);
        assert!(aggregate(&[]).is_err());
    }
}
