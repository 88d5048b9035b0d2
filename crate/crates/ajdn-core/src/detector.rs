//! Iterative multiscale detection.
//!
//! The studentized scan statistic is computed once per (dimension, center)
//! with its maximizing scale. Detection then alternates: take the masked
//! argmax, compare against the bootstrap threshold for the current mask,
//! record the jump, and blank an exclusion window around it in that
//! dimension only. Statistics never change across iterations — only the
//! admissible set and the threshold do.

use alloc::format;
use alloc::vec::Vec;

use crate::bootstrap::{build_upsilon, run_bootstrap, BootstrapContext};
use crate::error::{argument, Error};
use crate::filter::{JumpPassFilter, KernelBank};
use crate::math;
use crate::panel::TimeSeriesPanel;
use crate::refine::{cusum_window, refine_jump};
use crate::scales::{admissible_range, ScaleGrid};
use crate::variance::LocalVarianceField;

/// Per-dimension sets of admissible window centers, kept as sorted disjoint
/// inclusive index intervals. Starts as one interval per dimension and only
/// ever shrinks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleMask {
    dims: Vec<Vec<(usize, usize)>>,
}

impl AdmissibleMask {
    /// Full admissible range of every dimension at its largest scale.
    pub fn initial(grid: &ScaleGrid, n: usize) -> Self {
        let dims = (0..grid.p())
            .map(|r| {
                let (lo, hi) = admissible_range(n, grid.dim(r).s_max);
                if lo <= hi {
                    alloc::vec![(lo, hi)]
                } else {
                    Vec::new()
                }
            })
            .collect();
        Self { dims }
    }

    pub fn p(&self) -> usize {
        self.dims.len()
    }

    pub fn dim_intervals(&self, r: usize) -> &[(usize, usize)] {
        &self.dims[r]
    }

    /// Removes the inclusive index interval `[lo, hi]` from dimension `r`.
    pub fn exclude(&mut self, r: usize, lo: usize, hi: usize) {
        if hi < lo {
            return;
        }
        let mut out = Vec::with_capacity(self.dims[r].len() + 1);
        for &(a, b) in &self.dims[r] {
            if b < lo || a > hi {
                out.push((a, b));
                continue;
            }
            if a < lo {
                out.push((a, lo - 1));
            }
            if b > hi {
                out.push((hi + 1, b));
            }
        }
        self.dims[r] = out;
    }

    pub fn dim_is_empty(&self, r: usize) -> bool {
        self.dims[r].is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.iter().all(Vec::is_empty)
    }

    /// Number of admissible centers in dimension `r`.
    pub fn dim_len(&self, r: usize) -> usize {
        self.dims[r].iter().map(|&(a, b)| b - a + 1).sum()
    }

    pub fn contains(&self, r: usize, i: usize) -> bool {
        self.dims[r].iter().any(|&(a, b)| (a..=b).contains(&i))
    }

    pub fn dim_equal(&self, other: &Self, r: usize) -> bool {
        self.dims[r] == other.dims[r]
    }

    /// True when dimension `r` of `self` is contained in that of `other`.
    pub fn dim_is_subset(&self, other: &Self, r: usize) -> bool {
        let cover = &other.dims[r];
        let mut j = 0;
        for &(a, b) in &self.dims[r] {
            while j < cover.len() && cover[j].1 < a {
                j += 1;
            }
            if j == cover.len() || cover[j].0 > a || b > cover[j].1 {
                return false;
            }
        }
        true
    }
}

/// The scan statistic of every admissible (dimension, center): the maximum
/// over that dimension's scales of |contrast| / local sigma, together with
/// the maximizing scale.
#[derive(Debug, Clone)]
pub struct StatisticField {
    dims: Vec<DimStats>,
}

#[derive(Debug, Clone)]
struct DimStats {
    lo: usize,
    g: Vec<f64>,
    scale_idx: Vec<u16>,
}

/// One argmax of the masked field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub dimension: usize,
    pub index: usize,
    pub statistic: f64,
    pub scale_index: usize,
}

impl StatisticField {
    /// Computes the field over the defined range of the variance estimate
    /// (which equals the initial admissible range).
    pub fn compute(
        panel: &TimeSeriesPanel,
        grid: &ScaleGrid,
        kernels: &KernelBank,
        variance: &LocalVarianceField,
    ) -> Result<Self, Error> {
        if grid.p() != panel.p() {
            return Err(argument(format!(
                "grid covers {} dimensions but panel has {}",
                grid.p(),
                panel.p()
            )));
        }
        let mut dims = Vec::with_capacity(panel.p());
        for r in 0..panel.p() {
            let (lo, hi) = variance.range(r);
            let y = panel.dim(r);
            let len = hi - lo + 1;
            let mut g = alloc::vec![f64::NEG_INFINITY; len];
            let mut scale_idx = alloc::vec![0u16; len];
            for (si, &s) in grid.dim(r).scales.iter().enumerate() {
                let kernel = kernels
                    .get(s)
                    .ok_or_else(|| argument(format!("scale {s} missing from kernel bank")))?;
                for i in lo..=hi {
                    let h = kernel.contrast(y, i);
                    let sigma = variance
                        .sigma(r, i)
                        .expect("variance defined on its own range");
                    let v = math::abs(h) / sigma;
                    if v > g[i - lo] {
                        g[i - lo] = v;
                        scale_idx[i - lo] = si as u16;
                    }
                }
            }
            dims.push(DimStats { lo, g, scale_idx });
        }
        Ok(Self { dims })
    }

    /// Statistic at (r, i), if inside the computed range.
    pub fn g(&self, r: usize, i: usize) -> Option<f64> {
        let d = &self.dims[r];
        i.checked_sub(d.lo).and_then(|k| d.g.get(k).copied())
    }

    /// Index (into the dimension's scale ladder) of the maximizing scale.
    pub fn scale_index(&self, r: usize, i: usize) -> Option<usize> {
        let d = &self.dims[r];
        i.checked_sub(d.lo)
            .and_then(|k| d.scale_idx.get(k).map(|&v| v as usize))
    }

    /// Masked argmax; ties broken by earlier time, then smaller scale, then
    /// lower dimension. `None` when the mask is empty.
    pub fn argmax(&self, mask: &AdmissibleMask) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        for (r, d) in self.dims.iter().enumerate() {
            for &(a, b) in mask.dim_intervals(r) {
                for i in a..=b {
                    let k = i - d.lo;
                    let cand = Candidate {
                        dimension: r,
                        index: i,
                        statistic: d.g[k],
                        scale_index: d.scale_idx[k] as usize,
                    };
                    let better = match &best {
                        None => true,
                        Some(cur) => {
                            cand.statistic > cur.statistic
                                || (cand.statistic == cur.statistic
                                    && (cand.index, cand.scale_index, cand.dimension)
                                        < (cur.index, cur.scale_index, cur.dimension))
                        }
                    };
                    if better {
                        best = Some(cand);
                    }
                }
            }
        }
        best
    }
}

/// Second-stage settings; see [`crate::refine`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineSettings {
    /// Shrink factor of the wide window, in (-1, 0]: its half-width is
    /// (2 + shrink) times the narrow one.
    pub window_shrink: f64,
    /// Narrow half-width as a time fraction; default half the smallest scale.
    pub narrow_halfwidth: Option<f64>,
}

impl Default for RefineSettings {
    fn default() -> Self {
        Self {
            window_shrink: -0.5,
            narrow_halfwidth: None,
        }
    }
}

/// Detection parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    /// Family-wise error level in (0, 1).
    pub alpha: f64,
    /// Bootstrap replicates.
    pub k0: usize,
    /// Seed for the multiplier streams.
    pub seed: u64,
    /// Block fraction of the difference panel; must not exceed the smallest
    /// grid scale.
    pub s_prime: f64,
    /// Widens each exclusion half-width to (1 + widen) * s_max of the
    /// detected dimension.
    pub exclusion_widen: f64,
    /// Second-stage localization; `None` disables it.
    pub refine: Option<RefineSettings>,
}

impl DetectorConfig {
    pub fn new(alpha: f64, k0: usize, seed: u64, s_prime: f64) -> Self {
        Self {
            alpha,
            k0,
            seed,
            s_prime,
            exclusion_widen: 0.01,
            refine: Some(RefineSettings::default()),
        }
    }
}

/// One detected jump.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JumpRecord {
    /// 0-based dimension.
    pub dimension: usize,
    /// 0-based sample index of the detected time.
    pub index: usize,
    /// Fractional time (index + 1) / n.
    pub time: f64,
    /// Scale at which the statistic peaked.
    pub scale: f64,
    /// The studentized scan statistic.
    pub statistic: f64,
    /// Threshold it beat (for the mask state at that iteration).
    pub critical_value: f64,
    /// 1-based detection order.
    pub iteration: usize,
    /// Second-stage index, when refinement ran.
    pub refined_index: Option<usize>,
    /// Second-stage fractional time, when refinement ran.
    pub refined_time: Option<f64>,
}

impl JumpRecord {
    /// The best available fractional time: refined if present.
    pub fn best_time(&self) -> f64 {
        self.refined_time.unwrap_or(self.time)
    }

    /// The best available sample index: refined if present.
    pub fn best_index(&self) -> usize {
        self.refined_index.unwrap_or(self.index)
    }
}

/// Full outcome of a detection run.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Records in detection order.
    pub records: Vec<JumpRecord>,
    /// Threshold of the first iteration (full admissible set).
    pub initial_critical_value: f64,
}

/// Runs the full first stage (and, unless disabled, the second stage) on a
/// panel. See [`DetectorConfig`] for the knobs.
pub fn detect_jumps(
    panel: &TimeSeriesPanel,
    grid: &ScaleGrid,
    filter: &JumpPassFilter,
    cfg: &DetectorConfig,
) -> Result<Detection, Error> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(argument(format!("alpha {} outside (0, 1)", cfg.alpha)));
    }
    if cfg.k0 == 0 {
        return Err(argument("bootstrap needs at least one replicate"));
    }
    if !(cfg.exclusion_widen >= 0.0) {
        return Err(argument("exclusion widening must be nonnegative"));
    }
    let min_scale = grid.min_s_min();
    if !(cfg.s_prime > 0.0 && cfg.s_prime <= min_scale) {
        return Err(argument(format!(
            "block fraction {} must lie in (0, {min_scale}] (the smallest scale)",
            cfg.s_prime
        )));
    }
    let n = panel.n();
    let variance = LocalVarianceField::precompute(panel, grid)?;
    let kernels = KernelBank::new(filter, n, &grid.unique_scales())?;
    let upsilon = build_upsilon(panel, cfg.s_prime)?;
    let ctx = BootstrapContext {
        upsilon: &upsilon,
        variance: &variance,
        grid,
        kernels: &kernels,
    };
    let field = StatisticField::compute(panel, grid, &kernels, &variance)?;
    let mut mask = AdmissibleMask::initial(grid, n);
    let mut state = run_bootstrap(&ctx, &mask, cfg.k0, cfg.seed)?;

    let mut records = Vec::new();
    let mut initial_crit = None;
    while let Some(cand) = field.argmax(&mask) {
        let crit = state.critical_value(&ctx, &mask, cfg.alpha)?;
        if initial_crit.is_none() {
            initial_crit = Some(crit);
        }
        if !(cand.statistic >= crit) {
            break;
        }
        let r = cand.dimension;
        let scale = grid.dim(r).scales[cand.scale_index];
        let time = (cand.index + 1) as f64 / n as f64;
        records.push(JumpRecord {
            dimension: r,
            index: cand.index,
            time,
            scale,
            statistic: cand.statistic,
            critical_value: crit,
            iteration: records.len() + 1,
            refined_index: None,
            refined_time: None,
        });
        let w = (1.0 + cfg.exclusion_widen) * grid.dim(r).s_max;
        let (lo, hi) = time_interval_to_indices(n, time - w, time + w);
        mask.exclude(r, lo, hi);
    }

    let initial_critical_value = match initial_crit {
        Some(c) => c,
        // Empty admissible set from the start: no threshold was ever formed.
        None => state.critical_value(&ctx, &mask, cfg.alpha)?,
    };

    if let Some(refine) = &cfg.refine {
        let z = refine.narrow_halfwidth.unwrap_or(min_scale / 2.0);
        for rec in &mut records {
            let window = cusum_window(n, rec.time, z, refine.window_shrink)?;
            let (idx, t) = refine_jump(panel, rec.dimension, &window)?;
            rec.refined_index = Some(idx);
            rec.refined_time = Some(t);
        }
    }

    Ok(Detection {
        records,
        initial_critical_value,
    })
}

/// 0-based sample indices whose times (index+1)/n fall in `[t_lo, t_hi]`,
/// clamped to the series.
pub(crate) fn time_interval_to_indices(n: usize, t_lo: f64, t_hi: f64) -> (usize, usize) {
    let nf = n as f64;
    let lo = math::ceil(nf * t_lo - 1.0).max(0.0) as usize;
    let hi_f = math::floor(nf * t_hi - 1.0);
    let hi = if hi_f < 0.0 { 0 } else { (hi_f as usize).min(n - 1) };
    (lo.min(n - 1), hi)
}
