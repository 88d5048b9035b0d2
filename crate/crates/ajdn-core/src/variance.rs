//! Local two-sided variance estimation.
//!
//! The noise level at a candidate time is estimated from two windows that
//! flank the point but keep their distance: samples between `s_min` and
//! `s_max` away on each side. Each window is centered at its own mean, so a
//! single jump between the windows does not inflate the estimate, and smooth
//! trend variation contributes only O(s_max^2).

use alloc::format;
use alloc::vec::Vec;

use crate::error::{argument, degenerate, Error};
use crate::math;
use crate::panel::TimeSeriesPanel;
use crate::scales::{admissible_range, ScaleGrid};

/// Floor below which a pooled sum of squares counts as numerically zero,
/// relative to the mean square of the raw window values.
const DEGENERACY_REL: f64 = 1e-24;

/// Pooled local variance of dimension `r` at 0-based center `i`, from the
/// two windows `[i - n*s_max, i - n*s_min]` and `[i + n*s_min, i + n*s_max]`
/// (indices rounded inward). Both windows must be nonempty and inside the
/// series.
pub fn local_variance(
    panel: &TimeSeriesPanel,
    r: usize,
    i: usize,
    s_min: f64,
    s_max: f64,
) -> Result<f64, Error> {
    if r >= panel.p() {
        return Err(argument(format!("dimension {r} out of range (p = {})", panel.p())));
    }
    check_bounds(s_min, s_max)?;
    let n = panel.n();
    let nf = n as f64;
    let y = panel.dim(r);
    let (la, lb) = window(i as f64 - nf * s_max, i as f64 - nf * s_min);
    let (ra, rb) = window(i as f64 + nf * s_min, i as f64 + nf * s_max);
    let fits = |a: i64, b: i64| a <= b && a >= 0 && (b as usize) < n;
    if !fits(la, lb) || !fits(ra, rb) {
        return Err(argument(format!(
            "variance windows at index {i} are empty or leave the series \
             (left [{la}, {lb}], right [{ra}, {rb}], n = {n})"
        )));
    }
    let (ss_l, msq_l, k_l) = window_ss(&y[la as usize..=lb as usize]);
    let (ss_r, msq_r, k_r) = window_ss(&y[ra as usize..=rb as usize]);
    let pooled = (ss_l + ss_r) / (k_l + k_r) as f64;
    let msq = (msq_l + msq_r) / (k_l + k_r) as f64;
    if degenerate_ss(pooled, msq) {
        return Err(degenerate(format!(
            "zero local variance at dimension {r}, index {i}"
        )));
    }
    Ok(pooled)
}

/// Precomputed local variances for every admissible center of every
/// dimension, using that dimension's scale bounds.
#[derive(Debug, Clone)]
pub struct LocalVarianceField {
    dims: Vec<DimField>,
}

#[derive(Debug, Clone)]
struct DimField {
    lo: usize,
    hi: usize,
    sigma2: Vec<f64>,
    sigma: Vec<f64>,
}

impl LocalVarianceField {
    /// Computes the field over the admissible range of each dimension via
    /// prefix sums; O(n) per dimension after centering. Fails on the first
    /// degenerate or malformed window, identifying where.
    pub fn precompute(panel: &TimeSeriesPanel, grid: &ScaleGrid) -> Result<Self, Error> {
        if grid.p() != panel.p() {
            return Err(argument(format!(
                "grid covers {} dimensions but panel has {}",
                grid.p(),
                panel.p()
            )));
        }
        let n = panel.n();
        let nf = n as f64;
        let mut dims = Vec::with_capacity(panel.p());
        for r in 0..panel.p() {
            let d = grid.dim(r);
            check_bounds(d.s_min, d.s_max)?;
            let (lo, hi) = admissible_range(n, d.s_max);
            if lo > hi {
                return Err(argument(format!(
                    "no admissible centers in dimension {r} (n = {n}, s_max = {})",
                    d.s_max
                )));
            }
            let y = panel.dim(r);
            // Center on the dimension mean before squaring: deviations are
            // unchanged, but the prefix-sum difference S2 - S1^2/k no longer
            // cancels catastrophically when the series sits far from zero.
            let mean = y.iter().sum::<f64>() / nf;
            let mut p1 = Vec::with_capacity(n + 1);
            let mut p2 = Vec::with_capacity(n + 1);
            let mut q2 = Vec::with_capacity(n + 1);
            let (mut a1, mut a2, mut aq) = (0.0, 0.0, 0.0);
            p1.push(0.0);
            p2.push(0.0);
            q2.push(0.0);
            for &v in y {
                let z = v - mean;
                a1 += z;
                a2 += z * z;
                aq += v * v;
                p1.push(a1);
                p2.push(a2);
                q2.push(aq);
            }
            let span = |a: usize, b: usize, p: &[f64]| p[b + 1] - p[a];
            let mut sigma2 = Vec::with_capacity(hi - lo + 1);
            let mut sigma = Vec::with_capacity(hi - lo + 1);
            for i in lo..=hi {
                let (la, lb) = window(i as f64 - nf * d.s_max, i as f64 - nf * d.s_min);
                let (ra, rb) = window(i as f64 + nf * d.s_min, i as f64 + nf * d.s_max);
                let fits = |a: i64, b: i64| a <= b && a >= 0 && (b as usize) < n;
                if !fits(la, lb) || !fits(ra, rb) {
                    return Err(argument(format!(
                        "variance windows at dimension {r}, index {i} are empty or leave \
                         the series"
                    )));
                }
                let (la, lb, ra, rb) = (la as usize, lb as usize, ra as usize, rb as usize);
                let k = (lb - la + 1 + rb - ra + 1) as f64;
                let ss = |a: usize, b: usize| {
                    let s1 = span(a, b, &p1);
                    span(a, b, &p2) - s1 * s1 / (b - a + 1) as f64
                };
                let pooled = (ss(la, lb) + ss(ra, rb)) / k;
                let msq = (span(la, lb, &q2) + span(ra, rb, &q2)) / k;
                if degenerate_ss(pooled, msq) {
                    return Err(degenerate(format!(
                        "zero local variance at dimension {r}, index {i}"
                    )));
                }
                sigma2.push(pooled);
                sigma.push(math::sqrt(pooled));
            }
            dims.push(DimField {
                lo,
                hi,
                sigma2,
                sigma,
            });
        }
        Ok(Self { dims })
    }

    /// Defined 0-based center range of dimension `r`.
    pub fn range(&self, r: usize) -> (usize, usize) {
        (self.dims[r].lo, self.dims[r].hi)
    }

    /// σ² at center `i`, if inside the defined range.
    pub fn sigma2(&self, r: usize, i: usize) -> Option<f64> {
        let d = &self.dims[r];
        (d.lo..=d.hi).contains(&i).then(|| d.sigma2[i - d.lo])
    }

    /// σ at center `i`, if inside the defined range.
    #[inline]
    pub fn sigma(&self, r: usize, i: usize) -> Option<f64> {
        let d = &self.dims[r];
        (d.lo..=d.hi).contains(&i).then(|| d.sigma[i - d.lo])
    }
}

fn check_bounds(s_min: f64, s_max: f64) -> Result<(), Error> {
    if !(s_min > 0.0 && s_min < s_max && s_max <= 0.5) {
        return Err(argument(format!(
            "variance window bounds ({s_min}, {s_max}) must satisfy 0 < s_min < s_max <= 1/2"
        )));
    }
    Ok(())
}

/// Inclusive integer window [ceil(lo), floor(hi)].
fn window(lo: f64, hi: f64) -> (i64, i64) {
    (math::ceil(lo) as i64, math::floor(hi) as i64)
}

/// (centered sum of squares, raw sum of squares, count) of one window.
fn window_ss(w: &[f64]) -> (f64, f64, usize) {
    let k = w.len();
    let mean = w.iter().sum::<f64>() / k as f64;
    let mut ss = 0.0;
    let mut msq = 0.0;
    for &v in w {
        let d = v - mean;
        ss += d * d;
        msq += v * v;
    }
    (ss, msq, k)
}

fn degenerate_ss(pooled: f64, msq: f64) -> bool {
    !(pooled > DEGENERACY_REL * msq.max(f64::MIN_POSITIVE))
}
