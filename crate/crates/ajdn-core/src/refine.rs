//! Second-stage localization by a local CUSUM contrast.
//!
//! After a jump is detected near some time, two nested windows are placed
//! around the first-stage estimate. The CUSUM contrast over the wide window
//! is maximized across the narrow one; the argmax needs no scale or noise
//! normalization and converges at the parametric rate, so it sharpens the
//! multiscale estimate.

use alloc::format;

use crate::detector::time_interval_to_indices;
use crate::error::{argument, Error};
use crate::math;
use crate::panel::TimeSeriesPanel;

/// Nested index windows for the CUSUM pass: the contrast uses all samples in
/// `wide`, the argmax is searched over `narrow`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CusumWindow {
    /// 0-based inclusive [l, u].
    pub wide: (usize, usize),
    /// 0-based inclusive subrange of `wide`.
    pub narrow: (usize, usize),
}

/// Windows around a first-stage estimate `t_hat` (fractional time): narrow
/// half-width `z` and wide half-width `(2 + shrink) * z`, with
/// `shrink` in (-1, 0]. Both are clamped to the series; the wide window must
/// keep at least 3 samples.
pub fn cusum_window(
    n: usize,
    t_hat: f64,
    z: f64,
    shrink: f64,
) -> Result<CusumWindow, Error> {
    if n == 0 {
        return Err(argument("series length must be positive"));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(argument(format!("narrow half-width {z} must be positive")));
    }
    if !(shrink > -1.0 && shrink <= 0.0) {
        return Err(argument(format!("window shrink {shrink} outside (-1, 0]")));
    }
    if !(t_hat > 0.0 && t_hat <= 1.0) {
        return Err(argument(format!("estimate {t_hat} outside (0, 1]")));
    }
    let wz = (2.0 + shrink) * z;
    let wide = time_interval_to_indices(n, t_hat - wz, t_hat + wz);
    let narrow = time_interval_to_indices(n, t_hat - z, t_hat + z);
    if wide.0 > wide.1 || wide.1 - wide.0 + 1 < 3 {
        return Err(argument(format!(
            "wide window holds under 3 samples around {t_hat} (n = {n}, z = {z})"
        )));
    }
    if narrow.0 > narrow.1 {
        return Err(argument(format!(
            "narrow window around {t_hat} is empty (n = {n}, z = {z})"
        )));
    }
    let narrow = (narrow.0.max(wide.0), narrow.1.min(wide.1));
    Ok(CusumWindow { wide, narrow })
}

/// Maximizes the absolute CUSUM contrast of dimension `r` over the narrow
/// window: at split `t`, the head sum minus its pro-rata share of the window
/// total. Returns the 0-based argmax index and its fractional time; exact
/// ties go to the earliest index.
pub fn refine_jump(
    panel: &TimeSeriesPanel,
    r: usize,
    window: &CusumWindow,
) -> Result<(usize, f64), Error> {
    if r >= panel.p() {
        return Err(argument(format!("dimension {r} out of range (p = {})", panel.p())));
    }
    let n = panel.n();
    let (l, u) = window.wide;
    let (a, b) = window.narrow;
    if u >= n || b > u || a < l {
        return Err(argument("refinement window leaves the series"));
    }
    let y = panel.dim(r);
    let total: f64 = y[l..=u].iter().sum();
    let count = (u - l + 1) as f64;
    let mut head = 0.0;
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = a;
    for t in l..=b {
        head += y[t];
        if t < a {
            continue;
        }
        let v = head - ((t - l + 1) as f64 / count) * total;
        let av = math::abs(v);
        if av > best {
            best = av;
            best_idx = t;
        }
    }
    Ok((best_idx, (best_idx + 1) as f64 / n as f64))
}
