//! Block-difference panel and multiplier bootstrap for the detection
//! threshold.
//!
//! The raw series is compressed into normalized differences of adjacent
//! blocks; multiplying those by iid standard normals and re-running the
//! filter scan yields draws from (an asymptotic surrogate of) the null
//! distribution of the scan maximum, jointly over dimensions, scales, and
//! admissible times. The threshold is an upper order statistic of the
//! per-replicate maxima.
//!
//! Memory stays at one maximum per (replicate, dimension): when the
//! admissible set of one dimension shrinks after a detection, only that
//! dimension's column is recomputed, with the multiplier stream replayed
//! from its per-replicate seed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::detector::AdmissibleMask;
use crate::error::{argument, Error};
use crate::filter::KernelBank;
use crate::math;
use crate::panel::TimeSeriesPanel;
use crate::rng::NormalSource;
use crate::scales::ScaleGrid;
use crate::variance::LocalVarianceField;

/// Normalized adjacent-block differences of a panel.
///
/// At center `i` (0-based), the value is
/// `(sum of the m samples before i - sum of the m samples from i on) / sqrt(2m)`,
/// defined where both blocks fit; zero outside. `m` is the block length in
/// samples.
#[derive(Debug, Clone)]
pub struct UpsilonPanel {
    values: Vec<f64>,
    n: usize,
    p: usize,
    block_len: usize,
    s_prime: f64,
    valid: (usize, usize),
}

/// Builds the block-difference panel with block length `round(n * s_prime)`,
/// clamped into `[1, n/2]`. Both blocks must fit somewhere: requires `n >= 3`.
pub fn build_upsilon(panel: &TimeSeriesPanel, s_prime: f64) -> Result<UpsilonPanel, Error> {
    if !(s_prime > 0.0) || !s_prime.is_finite() {
        return Err(argument(format!("block fraction {s_prime} must be positive")));
    }
    let n = panel.n();
    let p = panel.p();
    let m = (math::round(n as f64 * s_prime) as usize).clamp(1, n / 2);
    if m == 0 || m > (n - 1) / 2 {
        return Err(argument(format!(
            "block length {m} leaves no valid centers at n = {n}"
        )));
    }
    let norm = 1.0 / math::sqrt(2.0 * m as f64);
    let (lo, hi) = (m, n - m);
    let mut values = vec![0.0; n * p];
    for r in 0..p {
        let y = panel.dim(r);
        let out = &mut values[r * n..(r + 1) * n];
        // Prefix sums: block sums become two subtractions per center.
        let mut prefix = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &v in y {
            acc += v;
            prefix.push(acc);
        }
        for i in lo..=hi {
            let left = prefix[i] - prefix[i - m];
            let right = prefix[i + m] - prefix[i];
            out[i] = (left - right) * norm;
        }
    }
    Ok(UpsilonPanel {
        values,
        n,
        p,
        block_len: m,
        s_prime,
        valid: (lo, hi),
    })
}

impl UpsilonPanel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Block length in samples.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn s_prime(&self) -> f64 {
        self.s_prime
    }

    /// 0-based inclusive range of centers where both blocks fit.
    pub fn valid(&self) -> (usize, usize) {
        self.valid
    }

    /// Full series of dimension `r` (zeros outside the valid range).
    pub fn dim(&self, r: usize) -> &[f64] {
        &self.values[r * self.n..(r + 1) * self.n]
    }
}

/// Shared read-only inputs of the bootstrap scan.
#[derive(Clone, Copy)]
pub struct BootstrapContext<'a> {
    pub upsilon: &'a UpsilonPanel,
    pub variance: &'a LocalVarianceField,
    pub grid: &'a ScaleGrid,
    pub kernels: &'a KernelBank,
}

/// Per-replicate, per-dimension scan maxima plus the mask they were taken
/// over. `NEG_INFINITY` marks a dimension whose admissible set is empty.
#[derive(Debug, Clone)]
pub struct BootstrapState {
    k0: usize,
    seed: u64,
    /// Row-major: `dim_max[l * p + r]`.
    dim_max: Vec<f64>,
    mask: AdmissibleMask,
}

/// Runs `k0` multiplier replicates over the masked admissible set and keeps
/// one maximum per (replicate, dimension). The multipliers of replicate `l`
/// come from substream `l + 1` of `seed` and are shared by all dimensions
/// within that replicate.
pub fn run_bootstrap(
    ctx: &BootstrapContext<'_>,
    mask: &AdmissibleMask,
    k0: usize,
    seed: u64,
) -> Result<BootstrapState, Error> {
    if k0 == 0 {
        return Err(argument("bootstrap needs at least one replicate"));
    }
    check_shapes(ctx, mask)?;
    let p = ctx.upsilon.p();
    let n = ctx.upsilon.n();
    let mut dim_max = vec![f64::NEG_INFINITY; k0 * p];
    let mut z = vec![0.0; n];
    let mut product = vec![0.0; n];
    for l in 0..k0 {
        fill_multipliers(seed, l, &mut z);
        let row = &mut dim_max[l * p..(l + 1) * p];
        for r in 0..p {
            row[r] = dim_scan_max(ctx, mask, r, &z, &mut product);
        }
    }
    Ok(BootstrapState {
        k0,
        seed,
        dim_max,
        mask: mask.clone(),
    })
}

impl BootstrapState {
    pub fn k0(&self) -> usize {
        self.k0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The threshold exceeded by a fraction `alpha` of replicate maxima,
    /// refreshed for `mask` first. The new mask may only shrink the stored
    /// one; dimensions whose admissible set changed are rescanned with their
    /// multiplier streams replayed.
    pub fn critical_value(
        &mut self,
        ctx: &BootstrapContext<'_>,
        mask: &AdmissibleMask,
        alpha: f64,
    ) -> Result<f64, Error> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(argument(format!("alpha {alpha} outside (0, 1)")));
        }
        check_shapes(ctx, mask)?;
        let p = ctx.upsilon.p();
        let n = ctx.upsilon.n();
        let changed: Vec<usize> = (0..p).filter(|&r| !mask.dim_equal(&self.mask, r)).collect();
        for &r in &changed {
            if !mask.dim_is_subset(&self.mask, r) {
                return Err(argument(format!(
                    "admissible set of dimension {r} may only shrink"
                )));
            }
        }
        if !changed.is_empty() {
            let mut z = vec![0.0; n];
            let mut product = vec![0.0; n];
            for l in 0..self.k0 {
                fill_multipliers(self.seed, l, &mut z);
                for &r in &changed {
                    self.dim_max[l * p + r] = dim_scan_max(ctx, mask, r, &z, &mut product);
                }
            }
            self.mask = mask.clone();
        }
        let mut maxima: Vec<f64> = self
            .dim_max
            .chunks_exact(p)
            .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        if maxima.iter().any(|m| !m.is_finite()) {
            return Err(argument(
                "admissible set is empty in every dimension; no threshold exists",
            ));
        }
        Ok(upper_order_statistic(&mut maxima, alpha))
    }
}

/// Replicate contrasts at one fixed (dimension, center, scale): the scan
/// value before taking maxima, one per replicate. Uses the same multiplier
/// substreams as [`run_bootstrap`], so the distribution being probed is
/// exactly the one inside the state.
pub fn replicate_contrasts(
    ctx: &BootstrapContext<'_>,
    r: usize,
    center: usize,
    scale: f64,
    k0: usize,
    seed: u64,
) -> Result<Vec<f64>, Error> {
    let n = ctx.upsilon.n();
    if r >= ctx.upsilon.p() {
        return Err(argument(format!("dimension {r} out of range")));
    }
    let kernel = ctx
        .kernels
        .get(scale)
        .ok_or_else(|| argument(format!("scale {scale} not in kernel bank")))?;
    if center < kernel.half || center + kernel.half >= n {
        return Err(argument(format!(
            "window at center {center} leaves the series"
        )));
    }
    let upsilon = ctx.upsilon.dim(r);
    let mut z = vec![0.0; n];
    let mut product = vec![0.0; n];
    let mut out = Vec::with_capacity(k0);
    for l in 0..k0 {
        fill_multipliers(seed, l, &mut z);
        for k in 0..n {
            product[k] = upsilon[k] * z[k];
        }
        out.push(kernel.contrast(&product, center));
    }
    Ok(out)
}

/// k-th largest with k = ceil((1 - alpha) * len): the empirical upper-alpha
/// quantile. Reorders `values`.
pub(crate) fn upper_order_statistic(values: &mut [f64], alpha: f64) -> f64 {
    debug_assert!(!values.is_empty());
    values.sort_unstable_by(f64::total_cmp);
    let k0 = values.len();
    let k = math::ceil((1.0 - alpha) * k0 as f64) as usize;
    values[k.clamp(1, k0) - 1]
}

fn check_shapes(ctx: &BootstrapContext<'_>, mask: &AdmissibleMask) -> Result<(), Error> {
    let p = ctx.upsilon.p();
    if ctx.grid.p() != p || mask.p() != p {
        return Err(argument(format!(
            "dimension mismatch: differences {p}, grid {}, mask {}",
            ctx.grid.p(),
            mask.p()
        )));
    }
    Ok(())
}

/// Multipliers of replicate `l`: standard normals from substream `l + 1`.
fn fill_multipliers(seed: u64, l: usize, z: &mut [f64]) {
    let mut src = NormalSource::from_stream(seed, l as u64 + 1);
    for v in z.iter_mut() {
        *v = src.next();
    }
}

/// Maximum studentized bootstrap contrast of dimension `r` over its scales
/// and masked centers, for one replicate's multipliers.
fn dim_scan_max(
    ctx: &BootstrapContext<'_>,
    mask: &AdmissibleMask,
    r: usize,
    z: &[f64],
    product: &mut [f64],
) -> f64 {
    let upsilon = ctx.upsilon.dim(r);
    for (out, (u, m)) in product.iter_mut().zip(upsilon.iter().zip(z)) {
        *out = u * m;
    }
    let mut best = f64::NEG_INFINITY;
    for &s in &ctx.grid.dim(r).scales {
        let kernel = ctx.kernels.get(s).expect("grid scale missing from bank");
        for &(a, b) in mask.dim_intervals(r) {
            for i in a..=b {
                let h = kernel.contrast(product, i);
                let sigma = ctx
                    .variance
                    .sigma(r, i)
                    .expect("variance undefined on admissible center");
                let g = math::abs(h) / sigma;
                if g > best {
                    best = g;
                }
            }
        }
    }
    best
}
