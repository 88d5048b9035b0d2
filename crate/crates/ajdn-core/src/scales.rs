//! Sparse dyadic grids of detection scales.
//!
//! Scales are window half-widths as fractions of the series length. Each
//! dimension scans a geometric ladder from its smallest to its largest scale;
//! the ladder is uniform in log2, so the number of points grows only
//! polylogarithmically with the problem size.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{argument, Error};
use crate::math;
use crate::validate::{Severity, ValidationReport};

/// Geometric ladder of `delta_n` scales from `s_min` to `s_max` inclusive,
/// uniform in log2. Requires `0 < s_min < s_max <= 1/2` and `delta_n >= 2`.
pub fn build_scales(s_min: f64, s_max: f64, delta_n: usize) -> Result<Vec<f64>, Error> {
    if !(s_min > 0.0 && s_min < s_max && s_max <= 0.5) {
        return Err(argument(format!(
            "scale bounds ({s_min}, {s_max}) must satisfy 0 < s_min < s_max <= 1/2"
        )));
    }
    if delta_n < 2 {
        return Err(argument("scale grid needs at least 2 points"));
    }
    let g_lo = math::log2(s_min);
    let g_hi = math::log2(s_max);
    let step = (g_hi - g_lo) / (delta_n - 1) as f64;
    let mut scales = Vec::with_capacity(delta_n);
    scales.push(s_min);
    for i in 1..delta_n - 1 {
        scales.push(math::exp2(g_lo + i as f64 * step));
    }
    scales.push(s_max);
    Ok(scales)
}

/// Default grid size for a problem of n observations in p dimensions:
/// `c * (ln n)^(1+epsilon) * (ln(p*n))^(5/2)`, rounded and clamped into
/// `[2, cap]`. The unclamped value grows fast, so `cap` is what binds at
/// practical sizes; pass an explicit grid size to override.
pub fn delta_n_default(n: usize, p: usize, c: f64, epsilon: f64, cap: usize) -> usize {
    let ln_n = math::ln(n as f64);
    let ln_pn = math::ln((p * n) as f64);
    let raw = c * math::powf(ln_n, 1.0 + epsilon) * math::powf(ln_pn, 2.5);
    let rounded = math::round(raw).max(0.0) as usize;
    rounded.clamp(2, cap.max(2))
}

/// Default constants for [`delta_n_default`].
pub const GRID_SIZE_SCALE: f64 = 1e-4;
pub const GRID_SIZE_EXPONENT: f64 = 0.51;
pub const GRID_SIZE_CAP: usize = 40;

/// [`delta_n_default`] evaluated at the default constants.
pub fn default_grid_size(n: usize, p: usize) -> usize {
    delta_n_default(n, p, GRID_SIZE_SCALE, GRID_SIZE_EXPONENT, GRID_SIZE_CAP)
}

/// Scale ladder of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DimScales {
    pub s_min: f64,
    pub s_max: f64,
    pub scales: Vec<f64>,
}

/// Per-dimension scale ladders sharing one grid size.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    dims: Vec<DimScales>,
    delta_n: usize,
}

impl ScaleGrid {
    /// The same ladder for every one of `p` dimensions.
    pub fn shared(s_min: f64, s_max: f64, delta_n: usize, p: usize) -> Result<Self, Error> {
        if p == 0 {
            return Err(argument("grid needs at least one dimension"));
        }
        let scales = build_scales(s_min, s_max, delta_n)?;
        let dim = DimScales {
            s_min,
            s_max,
            scales,
        };
        Ok(Self {
            dims: alloc::vec![dim; p],
            delta_n,
        })
    }

    /// One ladder per dimension from explicit `(s_min, s_max)` bounds.
    pub fn per_dimension(bounds: &[(f64, f64)], delta_n: usize) -> Result<Self, Error> {
        if bounds.is_empty() {
            return Err(argument("grid needs at least one dimension"));
        }
        let mut dims = Vec::with_capacity(bounds.len());
        for &(lo, hi) in bounds {
            dims.push(DimScales {
                s_min: lo,
                s_max: hi,
                scales: build_scales(lo, hi, delta_n)?,
            });
        }
        Ok(Self { dims, delta_n })
    }

    pub fn p(&self) -> usize {
        self.dims.len()
    }

    pub fn delta_n(&self) -> usize {
        self.delta_n
    }

    pub fn dim(&self, r: usize) -> &DimScales {
        &self.dims[r]
    }

    /// All distinct scales across dimensions (deduplicated on exact value),
    /// the set a kernel bank must cover.
    pub fn unique_scales(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for d in &self.dims {
            for &s in &d.scales {
                if !out.iter().any(|&x| x.to_bits() == s.to_bits()) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Smallest `s_min` over dimensions.
    pub fn min_s_min(&self) -> f64 {
        self.dims.iter().map(|d| d.s_min).fold(f64::INFINITY, f64::min)
    }

    /// Reorders the per-dimension ladders: new dimension `r` takes the ladder
    /// of old dimension `perm[r]`.
    pub fn permute_dims(&self, perm: &[usize]) -> Result<Self, Error> {
        if perm.len() != self.dims.len() {
            return Err(argument("permutation length must equal p"));
        }
        let mut dims = Vec::with_capacity(perm.len());
        for &r in perm {
            if r >= self.dims.len() {
                return Err(argument(format!("permutation entry {r} out of range")));
            }
            dims.push(self.dims[r].clone());
        }
        Ok(Self {
            dims,
            delta_n: self.delta_n,
        })
    }

    /// Sanity checks of the grid against a concrete series length: every
    /// window must span at least one sample, the variance windows between
    /// `s_min` and `s_max` should hold a few points, and the admissible time
    /// range must be nonempty.
    pub fn validate(&self, n: usize) -> ValidationReport {
        let mut report = ValidationReport::default();
        let nf = n as f64;
        for (r, d) in self.dims.iter().enumerate() {
            let min_window = nf * d.s_min;
            report.push(
                format!("dim{r}_min_window_samples"),
                min_window,
                1.0,
                Severity::Required,
                min_window >= 1.0,
            );
            let gap = nf * (d.s_max - d.s_min);
            report.push(
                format!("dim{r}_variance_window_samples"),
                gap,
                4.0,
                Severity::Advisory,
                gap >= 4.0,
            );
            let (lo, hi) = admissible_range(n, d.s_max);
            report.push(
                format!("dim{r}_admissible_times"),
                if hi >= lo { (hi - lo + 1) as f64 } else { 0.0 },
                1.0,
                Severity::Required,
                hi >= lo,
            );
        }
        report
    }
}

/// 0-based inclusive index range of admissible window centers for largest
/// scale `s_max`: sample times in `(s_max, 1 - s_max]`. Every filter window
/// at a scale up to `s_max` fits entirely inside the series on this range.
pub fn admissible_range(n: usize, s_max: f64) -> (usize, usize) {
    let nf = n as f64;
    let lo = math::floor(nf * s_max) as usize;
    let hi_f = math::floor(nf * (1.0 - s_max)) - 1.0;
    let hi = if hi_f < 0.0 { 0 } else { hi_f as usize };
    (lo, hi.min(n.saturating_sub(1)))
}
