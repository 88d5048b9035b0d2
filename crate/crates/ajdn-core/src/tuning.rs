//! Data-driven hyperparameters: size-based defaults for the scale window,
//! a block-length pick for the difference panel driven by long-run-variance
//! ratios on a jump-free stretch, and a penalized goodness-of-fit score for
//! comparing full candidate configurations.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::detector::{detect_jumps, DetectorConfig};
use crate::error::{argument, degenerate, Error};
use crate::filter::JumpPassFilter;
use crate::math;
use crate::panel::TimeSeriesPanel;
use crate::scales::{default_grid_size, ScaleGrid};

/// Size-based defaults derived from (n, p) alone.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RuleOfThumb {
    /// Smallest scale of the default ladder.
    pub s_min: f64,
    /// Largest scale of the default ladder.
    pub s_max: f64,
    /// Upper bound for the block fraction of the difference panel.
    pub s_prime_max: f64,
    /// Acceptance threshold for the variance-ratio block-length rule.
    pub target_ratio: f64,
}

/// Scale-window and block-fraction defaults:
/// `s_min = n^(-1/3) ln(pn)^2 / 120`, `s_max = n^(-1/6) ln(pn) / 27`
/// (capped at 1/2), `s_prime_max = n^(-2/3)`, and a ratio target
/// `1 + 17 / (20 ln n)` that loosens slowly with n.
pub fn rule_of_thumb(n: usize, p: usize) -> Result<RuleOfThumb, Error> {
    if n < 8 || p == 0 {
        return Err(argument(format!("need n >= 8 and p >= 1, got n = {n}, p = {p}")));
    }
    let nf = n as f64;
    let ln_pn = math::ln(nf * p as f64);
    let s_min = math::powf(nf, -1.0 / 3.0) * ln_pn * ln_pn / 120.0;
    let s_max = (math::powf(nf, -1.0 / 6.0) * ln_pn / 27.0).min(0.5);
    if !(s_min < s_max) || nf * s_min < 2.0 {
        return Err(degenerate(format!(
            "no usable default scale window at n = {n}, p = {p}; choose scales explicitly"
        )));
    }
    Ok(RuleOfThumb {
        s_min,
        s_max,
        s_prime_max: math::powf(nf, -2.0 / 3.0),
        target_ratio: 1.0 + 17.0 / (20.0 * math::ln(nf)),
    })
}

/// Centered sample autocovariances at lags `0..=max_lag`, each with
/// divisor `len` (not `len - lag`).
pub fn autocovariances(y: &[f64], max_lag: usize) -> Result<Vec<f64>, Error> {
    let l = y.len();
    if l < 2 {
        return Err(argument("autocovariances need at least 2 observations"));
    }
    if max_lag >= l {
        return Err(argument(format!(
            "max lag {max_lag} must be below the series length {l}"
        )));
    }
    let mean = y.iter().sum::<f64>() / l as f64;
    let c: Vec<f64> = y.iter().map(|v| v - mean).collect();
    Ok((0..=max_lag)
        .map(|k| c[..l - k].iter().zip(&c[k..]).map(|(a, b)| a * b).sum::<f64>() / l as f64)
        .collect())
}

/// Variance of the mean of `m` consecutive observations, times `m`:
/// `acvf[0] + 2 * sum_(k<m) (1 - k/m) * acvf[k]`. Grows toward the
/// long-run variance as `m` does.
pub fn block_variance(acvf: &[f64], m: usize) -> f64 {
    let mut v = acvf[0];
    for k in 1..m.min(acvf.len()) {
        v += 2.0 * (1.0 - k as f64 / m as f64) * acvf[k];
    }
    v
}

/// Long-run variance estimate (plain sum over every provided lag) divided
/// by [`block_variance`] at `m`. Decays toward 1 as `m` grows for
/// short-memory data; non-positive estimates yield +inf so the caller
/// never accepts them.
pub fn lrv_ratio(acvf: &[f64], m: usize) -> f64 {
    let lrv = acvf[0] + 2.0 * acvf[1..].iter().sum::<f64>();
    let block = block_variance(acvf, m);
    if !(lrv > 0.0) || !(block > 0.0) {
        return f64::INFINITY;
    }
    lrv / block
}

/// Smallest 1-based block length whose ratio is at or below `target`;
/// falls back to the largest length probed.
pub fn select_block_length(ratios: &[f64], target: f64) -> usize {
    for (k, &r) in ratios.iter().enumerate() {
        if r <= target {
            return k + 1;
        }
    }
    ratios.len().max(1)
}

/// Outcome of the data-driven block-fraction pick.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockSelection {
    /// The selected block fraction, `block_len / n`.
    pub s_prime: f64,
    /// The selected block length in samples.
    pub block_len: usize,
    /// Inclusive index range of the jump-free stretch used.
    pub segment: (usize, usize),
    /// Averaged variance ratios for block lengths `1..=ratios.len()`.
    pub ratios: Vec<f64>,
    /// The threshold the selected ratio had to meet.
    pub target_ratio: f64,
}

/// Picks the block fraction for the difference panel. A cheap pilot pass
/// (two-scale ladder, level 0.2, 100 replicates) flags likely jumps; the
/// longest stretch clear of them — padded by the largest scale on each
/// side — supplies autocovariances, averaged across dimensions after
/// per-dimension normalization. The result is the smallest block length
/// whose variance ratio meets the size-based target.
pub fn select_s_prime(panel: &TimeSeriesPanel, seed: u64) -> Result<BlockSelection, Error> {
    let n = panel.n();
    let p = panel.p();
    let rot = rule_of_thumb(n, p)?;
    let m_max = (math::round(n as f64 * rot.s_prime_max) as usize).max(1);

    let grid = ScaleGrid::shared(rot.s_min, rot.s_max, 2, p)?;
    let pilot = DetectorConfig {
        alpha: 0.2,
        k0: 100,
        seed,
        s_prime: (m_max as f64 / n as f64).min(rot.s_min),
        exclusion_widen: 0.01,
        refine: None,
    };
    let detection = detect_jumps(panel, &grid, &JumpPassFilter::default(), &pilot)?;

    let pad = math::ceil(n as f64 * rot.s_max) as usize;
    let mut hits: Vec<usize> = detection.records.iter().map(|rec| rec.best_index()).collect();
    hits.sort_unstable();
    let mut best: Option<(usize, usize)> = None;
    let mut consider = |lo: usize, hi: usize| {
        if hi >= lo && best.map_or(true, |(bl, bh)| hi - lo > bh - bl) {
            best = Some((lo, hi));
        }
    };
    let mut start = 0usize;
    for &h in &hits {
        let blocked_lo = h.saturating_sub(pad);
        let blocked_hi = (h + pad).min(n - 1);
        if blocked_lo > start {
            consider(start, blocked_lo - 1);
        }
        start = start.max(blocked_hi + 1);
    }
    if start <= n - 1 {
        consider(start, n - 1);
    }
    let (lo, hi) = best.ok_or_else(|| {
        degenerate("the pilot pass left no jump-free stretch to measure dependence on")
    })?;
    let seg_len = hi - lo + 1;
    if seg_len < 2 * m_max {
        return Err(degenerate(format!(
            "longest jump-free stretch has {seg_len} samples; need at least {}",
            2 * m_max
        )));
    }

    // Average normalized autocovariances across dimensions; ratios are
    // scale-free, so normalizing first keeps noisy dimensions from
    // dominating quiet ones.
    let mut avg = vec![0.0; m_max + 1];
    let mut kept = 0usize;
    for r in 0..p {
        let acvf = autocovariances(&panel.dim(r)[lo..=hi], m_max)?;
        if !(acvf[0] > 0.0) {
            continue;
        }
        for (a, v) in avg.iter_mut().zip(&acvf) {
            *a += v / acvf[0];
        }
        kept += 1;
    }
    if kept == 0 {
        return Err(degenerate("every dimension is flat on the jump-free stretch"));
    }
    for a in &mut avg {
        *a /= kept as f64;
    }

    let ratios: Vec<f64> = (1..=m_max).map(|m| lrv_ratio(&avg, m)).collect();
    let block_len = select_block_length(&ratios, rot.target_ratio);
    Ok(BlockSelection {
        s_prime: block_len as f64 / n as f64,
        block_len,
        segment: (lo, hi),
        ratios,
        target_ratio: rot.target_ratio,
    })
}

/// One full candidate configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HyperParams {
    pub s_min: f64,
    pub s_max: f64,
    pub s_prime: f64,
}

/// Penalized fit of one candidate; `gm` is `None` when detection failed
/// under that candidate.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CandidateScore {
    pub params: HyperParams,
    pub gm: Option<f64>,
    pub jump_count: usize,
}

/// Outcome of the candidate comparison.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BicSelection {
    /// Position of the winner in `scores`.
    pub best: usize,
    pub scores: Vec<CandidateScore>,
}

impl BicSelection {
    pub fn best_params(&self) -> &HyperParams {
        &self.scores[self.best].params
    }

    pub fn best_gm(&self) -> f64 {
        self.scores[self.best].gm.unwrap_or(f64::INFINITY)
    }
}

/// Residual-based penalized score: over dimensions,
/// `n ln(sse/n) + jumps * ln n`. Lower is better; each retained jump must
/// pay for itself in fit.
pub fn gm_score(n: usize, sse_by_dim: &[f64], jumps_by_dim: &[usize]) -> f64 {
    let nf = n as f64;
    let ln_n = math::ln(nf);
    sse_by_dim
        .iter()
        .zip(jumps_by_dim)
        .map(|(&sse, &m)| nf * math::ln((sse / nf).max(f64::MIN_POSITIVE)) + m as f64 * ln_n)
        .sum()
}

/// Runs detection under every candidate, scores each by [`gm_score`] with
/// residuals taken around a smooth fit between detected jumps, and returns
/// the lowest score. Ties prefer the smaller block fraction, then the
/// smaller scale window; candidates whose detection fails are skipped.
pub fn penalized_bic(
    panel: &TimeSeriesPanel,
    candidates: &[HyperParams],
    alpha: f64,
    k0: usize,
    seed: u64,
) -> Result<BicSelection, Error> {
    if candidates.is_empty() {
        return Err(argument("need at least one candidate"));
    }
    let n = panel.n();
    let p = panel.p();
    let delta = default_grid_size(n, p);
    let mut scores = Vec::with_capacity(candidates.len());
    let mut best: Option<(usize, (f64, f64, f64))> = None;
    for (ci, cand) in candidates.iter().enumerate() {
        let run = ScaleGrid::shared(cand.s_min, cand.s_max, delta, p).and_then(|grid| {
            let cfg = DetectorConfig {
                s_prime: cand.s_prime,
                ..DetectorConfig::new(alpha, k0, seed, cand.s_prime)
            };
            detect_jumps(panel, &grid, &JumpPassFilter::default(), &cfg)
        });
        match run {
            Ok(detection) => {
                let mut sse = vec![0.0; p];
                for r in 0..p {
                    let mut cuts: Vec<usize> = detection
                        .records
                        .iter()
                        .filter(|rec| rec.dimension == r)
                        .map(|rec| rec.best_index())
                        .collect();
                    cuts.sort_unstable();
                    cuts.dedup();
                    let y = panel.dim(r);
                    let mut start = 0usize;
                    for &cut in cuts.iter().chain(core::iter::once(&(n - 1))) {
                        let stop = (cut + 1).min(n);
                        if stop > start {
                            let seg = &y[start..stop];
                            let fit = smooth_fit(seg);
                            sse[r] += seg
                                .iter()
                                .zip(&fit)
                                .map(|(v, f)| (v - f) * (v - f))
                                .sum::<f64>();
                        }
                        start = stop;
                    }
                }
                let counts: Vec<usize> = (0..p)
                    .map(|r| detection.records.iter().filter(|rec| rec.dimension == r).count())
                    .collect();
                let gm = gm_score(n, &sse, &counts);
                let key = (gm, cand.s_prime, cand.s_min + cand.s_max);
                if best.map_or(true, |(_, bk)| key < bk) {
                    best = Some((ci, key));
                }
                scores.push(CandidateScore {
                    params: *cand,
                    gm: Some(gm),
                    jump_count: detection.records.len(),
                });
            }
            Err(_) => scores.push(CandidateScore {
                params: *cand,
                gm: None,
                jump_count: 0,
            }),
        }
    }
    match best {
        Some((ci, _)) => Ok(BicSelection { best: ci, scores }),
        None => Err(degenerate("every candidate configuration failed")),
    }
}

/// Smooth one segment: local-linear regression with a parabolic-bump
/// weight and a plug-in bandwidth from a quartic pilot fit. Segments
/// shorter than 8 samples fall back to a straight least-squares line.
pub fn smooth_fit(y: &[f64]) -> Vec<f64> {
    let l = y.len();
    if l < 8 {
        return fit_line(y);
    }
    // Work on [-1, 1] for conditioning; bandwidths convert back at the end.
    let x = |i: usize| 2.0 * i as f64 / (l - 1) as f64 - 1.0;
    let coef = match quartic_fit(y, &x) {
        Some(c) => c,
        None => return fit_line(y),
    };
    let mut rss = 0.0;
    let mut curve2 = 0.0;
    for (i, &v) in y.iter().enumerate() {
        let xi = x(i);
        let fit = coef[0] + xi * (coef[1] + xi * (coef[2] + xi * (coef[3] + xi * coef[4])));
        rss += (v - fit) * (v - fit);
        let second = 2.0 * coef[2] + 6.0 * coef[3] * xi + 12.0 * coef[4] * xi * xi;
        curve2 += second * second;
    }
    let sigma2 = rss / (l - 5) as f64;
    // Plug-in bandwidth: (15 sigma^2 (b - a) / sum m''^2)^(1/5), here with
    // b - a = 2, then mapped from [-1, 1] units to sample units.
    let h_norm = math::powf(15.0 * sigma2 * 2.0 / curve2, 0.2);
    let mut h = h_norm * (l - 1) as f64 / 2.0;
    if !h.is_finite() {
        h = (l - 1) as f64;
    }
    h = h.clamp(4.0, (l - 1) as f64);

    let reach = math::ceil(h) as usize;
    (0..l)
        .map(|i0| {
            let lo = i0.saturating_sub(reach);
            let hi = (i0 + reach).min(l - 1);
            let (mut sw, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for j in lo..=hi {
                let dx = j as f64 - i0 as f64;
                let u = dx / h;
                if u.abs() >= 1.0 {
                    continue;
                }
                let w = 0.75 * (1.0 - u * u);
                sw += w;
                sx += w * dx;
                sxx += w * dx * dx;
                sy += w * y[j];
                sxy += w * dx * y[j];
            }
            let denom = sw * sxx - sx * sx;
            if denom.abs() > 1e-12 * (sw * sxx).abs().max(1e-300) {
                (sxx * sy - sx * sxy) / denom
            } else {
                sy / sw
            }
        })
        .collect()
}

/// Ordinary least-squares line (or the data itself when a line is
/// underdetermined).
fn fit_line(y: &[f64]) -> Vec<f64> {
    let l = y.len();
    if l < 3 {
        return y.to_vec();
    }
    let xm = (l - 1) as f64 / 2.0;
    let ym = y.iter().sum::<f64>() / l as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &v) in y.iter().enumerate() {
        let dx = i as f64 - xm;
        num += dx * (v - ym);
        den += dx * dx;
    }
    let slope = num / den;
    (0..l).map(|i| ym + slope * (i as f64 - xm)).collect()
}

/// Degree-4 polynomial least squares via normal equations; `None` when the
/// system is singular.
fn quartic_fit(y: &[f64], x: &impl Fn(usize) -> f64) -> Option<[f64; 5]> {
    let mut pow_sums = [0.0f64; 9];
    let mut rhs = [0.0f64; 5];
    for (i, &v) in y.iter().enumerate() {
        let xi = x(i);
        let mut xp = 1.0;
        for (k, slot) in pow_sums.iter_mut().enumerate() {
            *slot += xp;
            if k < 5 {
                rhs[k] += xp * v;
            }
            xp *= xi;
        }
    }
    let mut a = [[0.0f64; 6]; 5];
    for (j, row) in a.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().take(5).enumerate() {
            *cell = pow_sums[j + k];
        }
        row[5] = rhs[j];
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..5 {
        let pivot = (col..5).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..5 {
            let f = a[row][col] / a[col][col];
            for k in col..6 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut coef = [0.0f64; 5];
    for col in (0..5).rev() {
        let mut v = a[col][5];
        for k in col + 1..5 {
            v -= a[col][k] * coef[k];
        }
        coef[col] = v / a[col][col];
    }
    Some(coef)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{generate_errors, Process};

    #[test]
    fn rule_of_thumb_frozen_values() {
        let a = rule_of_thumb(500, 10).unwrap();
        assert!((a.s_min - 0.0761649).abs() < 1e-6, "{}", a.s_min);
        assert!((a.s_max - 0.1119707).abs() < 1e-6, "{}", a.s_max);
        assert!((a.s_prime_max - 0.0158740).abs() < 1e-6, "{}", a.s_prime_max);
        assert!((a.target_ratio - 1.1367744).abs() < 1e-6, "{}", a.target_ratio);

        let b = rule_of_thumb(1000, 20).unwrap();
        assert!((b.s_min - 0.0817326).abs() < 1e-6, "{}", b.s_min);
        assert!((b.s_max - 0.1159907).abs() < 1e-6, "{}", b.s_max);
        assert!((b.s_prime_max - 0.01).abs() < 1e-6, "{}", b.s_prime_max);
        assert!((b.target_ratio - 1.1230504).abs() < 1e-6, "{}", b.target_ratio);
    }

    #[test]
    fn rule_of_thumb_degenerate_sizes() {
        assert!(matches!(rule_of_thumb(8, 1), Err(Error::Degenerate(_))));
        assert!(matches!(rule_of_thumb(50, 1000), Err(Error::Degenerate(_))));
        assert!(rule_of_thumb(4, 1).is_err());
    }

    #[test]
    fn autocovariances_small_case() {
        let g = autocovariances(&[1.0, 2.0, 3.0, 4.0], 3).unwrap();
        let want = [1.25, 0.3125, -0.375, -0.5625];
        for (a, b) in g.iter().zip(&want) {
            assert!((a - b).abs() < 1e-15, "{g:?}");
        }
        assert!(autocovariances(&[1.0], 0).is_err());
        assert!(autocovariances(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn block_variance_and_ratio_identities() {
        let acvf = [2.0, 0.5, 0.25];
        assert!((block_variance(&acvf, 1) - 2.0).abs() < 1e-15);
        assert!((block_variance(&acvf, 2) - 2.5).abs() < 1e-15);
        assert!((block_variance(&acvf, 3) - (2.0 + 2.0 * (2.0 / 3.0 * 0.5 + 0.25 / 3.0))).abs() < 1e-15);
        assert!((lrv_ratio(&acvf, 2) - 1.4).abs() < 1e-15);
        assert_eq!(lrv_ratio(&[1.0, -2.0], 1), f64::INFINITY);
    }

    #[test]
    fn select_block_length_rule() {
        assert_eq!(select_block_length(&[1.5, 1.2, 1.05, 1.01], 1.1), 3);
        assert_eq!(select_block_length(&[1.5, 1.4], 1.1), 2);
        assert_eq!(select_block_length(&[1.05], 1.1), 1);
    }

    #[test]
    fn ratios_match_autoregressive_theory() {
        // AR(1) with coefficient 1/4: long-run variance 16/9; ratios below
        // computed from its geometric autocovariances.
        let y = generate_errors(Process::StationaryAr, 200_000, 1, 3).unwrap();
        let acvf = autocovariances(y.dim(0), 10).unwrap();
        let want = [
            1.6666667, 1.3333333, 1.2121212, 1.1531532, 1.1192786, 1.0975322, 1.0824693,
            1.0714278, 1.0629911, 1.0563333,
        ];
        for (m, w) in want.iter().enumerate() {
            let got = lrv_ratio(&acvf, m + 1);
            assert!(
                (got / w - 1.0).abs() < 0.05,
                "block length {}: {got} vs {w}",
                m + 1
            );
        }
    }

    #[test]
    fn ratios_near_one_for_independent_noise() {
        let y = generate_errors(Process::Iid, 100_000, 1, 9).unwrap();
        let acvf = autocovariances(y.dim(0), 8).unwrap();
        for m in 1..=6 {
            let got = lrv_ratio(&acvf, m);
            assert!((got - 1.0).abs() < 0.05, "block length {m}: {got}");
        }
    }

    #[test]
    fn block_pick_on_dependent_panel() {
        let panel = generate_errors(Process::StationaryAr, 1000, 20, 21).unwrap();
        let sel = select_s_prime(&panel, 7).unwrap();
        assert!(
            (4..=6).contains(&sel.block_len),
            "selected {} with ratios {:?}",
            sel.block_len,
            sel.ratios
        );
        assert!((sel.s_prime - sel.block_len as f64 / 1000.0).abs() < 1e-15);
        assert_eq!(sel.ratios.len(), 10);
    }

    #[test]
    fn block_pick_on_independent_panel() {
        let panel = generate_errors(Process::Iid, 1000, 10, 4).unwrap();
        let sel = select_s_prime(&panel, 11).unwrap();
        assert!(sel.block_len <= 2, "selected {}", sel.block_len);
    }

    #[test]
    fn quiet_segment_avoids_planted_jump() {
        let mut panel = generate_errors(Process::Iid, 600, 4, 5).unwrap();
        for v in &mut panel.dim_mut(0)[300..] {
            *v += 10.0;
        }
        let sel = select_s_prime(&panel, 2).unwrap();
        let (lo, hi) = sel.segment;
        assert!(!(lo..=hi).contains(&299), "segment ({lo}, {hi}) straddles the jump");
        assert!(hi - lo + 1 >= 100, "segment ({lo}, {hi}) too short");
    }

    #[test]
    fn gm_score_arithmetic() {
        let got = gm_score(100, &[100.0, 200.0], &[1, 3]);
        let ln100 = math::ln(100.0);
        let want = 100.0 * math::ln(1.0) + ln100 + 100.0 * math::ln(2.0) + 3.0 * ln100;
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        // A jump must buy an SSE drop of at least a factor exp(-ln n / n).
        assert!(gm_score(100, &[100.0], &[1]) > gm_score(100, &[100.0], &[0]));
    }

    #[test]
    fn smooth_fit_tracks_polynomials() {
        let l = 400;
        let quad: Vec<f64> = (0..l)
            .map(|i| 2.0 + 0.5 * i as f64 - 0.001 * (i as f64) * (i as f64))
            .collect();
        let fit = smooth_fit(&quad);
        let sse: f64 = quad.iter().zip(&fit).map(|(a, b)| (a - b) * (a - b)).sum();
        assert!(sse / l as f64 <= 1e-4, "mean squared error {}", sse / l as f64);

        let line: Vec<f64> = (0..l).map(|i| 3.0 - 0.25 * i as f64).collect();
        let fit = smooth_fit(&line);
        let sse: f64 = line.iter().zip(&fit).map(|(a, b)| (a - b) * (a - b)).sum();
        assert!(sse / l as f64 <= 1e-12, "mean squared error {}", sse / l as f64);

        let short = [1.0, 2.0, 3.5, 3.0, 5.0];
        let fit = smooth_fit(&short);
        let straight = fit_line(&short);
        assert_eq!(fit, straight);
    }

    #[test]
    fn penalized_score_prefers_working_candidate() {
        let mut panel = generate_errors(Process::Iid, 600, 3, 11).unwrap();
        for v in &mut panel.dim_mut(0)[300..] {
            *v += 6.0;
        }
        let good = HyperParams {
            s_min: 0.06,
            s_max: 0.1,
            s_prime: 0.005,
        };
        let bad = HyperParams {
            s_min: 0.01,
            s_max: 0.02,
            s_prime: 0.05, // exceeds its own s_min: detection must fail
        };
        let sel = penalized_bic(&panel, &[bad, good], 0.1, 150, 9).unwrap();
        assert_eq!(sel.best, 1);
        assert!(sel.scores[0].gm.is_none());
        assert!(sel.scores[1].gm.is_some());
        assert!(sel.scores[1].jump_count >= 1);
        assert_eq!(sel.best_params(), &good);
        assert!(penalized_bic(&panel, &[], 0.1, 150, 9).is_err());
        assert!(matches!(
            penalized_bic(&panel, &[bad], 0.1, 150, 9),
            Err(Error::Degenerate(_))
        ));
    }
}
