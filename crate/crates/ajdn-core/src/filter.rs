//! The jump-pass filter and its evaluation against a panel.
//!
//! The filter is an odd, compactly supported kernel: convolving it with a
//! series annihilates constants and slopes (two vanishing moments) while
//! responding to a step with its full mass. Scanned across times and scales
//! it turns each candidate location into a local contrast whose size, after
//! studentizing, is comparable across dimensions.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{argument, Error};
use crate::panel::TimeSeriesPanel;
use crate::validate::{Severity, ValidationReport};

/// Default polynomial coefficients on |x|^1..|x|^6; the kernel is this
/// polynomial times sign(x), zero outside [-1, 1]. The coefficients solve a
/// small linear system: unit integral on [0, 1], vanishing first and second
/// moments on [-1, 1], a transfer function peaking at the origin, and
/// (near-)vanishing at |x| = 1.
const DEFAULT_COEFFS: [f64; 6] = [
    112.0,
    -933.3333,
    3188.8889,
    -5320.0,
    4246.6667,
    -1294.2222,
];

/// An odd kernel `W` supported on [-1, 1] with a prescribed number of
/// vanishing moments.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPassFilter {
    /// Coefficients on |x|^1, |x|^2, ..., multiplied by sign(x).
    coeffs: Vec<f64>,
    /// Number of vanishing moments the filter is built to have (u = 1..=order).
    order: usize,
}

impl Default for JumpPassFilter {
    fn default() -> Self {
        Self {
            coeffs: DEFAULT_COEFFS.to_vec(),
            order: 2,
        }
    }
}

impl JumpPassFilter {
    /// A filter from custom coefficients on |x|^1..|x|^deg (times sign(x)).
    /// `order` is the number of moments `validate` will require to vanish.
    pub fn from_coeffs(coeffs: Vec<f64>, order: usize) -> Result<Self, Error> {
        if coeffs.is_empty() {
            return Err(argument("filter needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(argument("filter coefficients must be finite"));
        }
        Ok(Self { coeffs, order })
    }

    /// Number of vanishing moments (u = 1..=order).
    pub fn order(&self) -> usize {
        self.order
    }

    /// Evaluates W at `x`; zero outside [-1, 1].
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let a = crate::math::abs(x);
        if a > 1.0 {
            return 0.0;
        }
        // Horner in |x|, then one more factor of |x| so the lowest term is
        // |x|^1; the sign restores oddness.
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * a + c;
        }
        let mag = acc * a;
        if x < 0.0 {
            -mag
        } else {
            mag
        }
    }

    /// ∫ x^u W(x) dx over [-1, 1] (or [0, 1] for `u = 0`, where the target is
    /// a unit integral), by composite Simpson with `points` subintervals.
    pub fn moment(&self, u: u32, points: usize) -> f64 {
        let (lo, hi) = if u == 0 { (0.0, 1.0) } else { (-1.0, 1.0) };
        let n = points.max(2) & !1; // Simpson needs an even count
        let h = (hi - lo) / n as f64;
        let g = |x: f64| pow_int(x, u) * self.eval(x);
        let mut acc = g(lo) + g(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * g(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    /// Checks the filter's defining properties by quadrature and returns one
    /// named entry per check. Fails only on malformed arguments; inspect
    /// [`ValidationReport::passed`] for the verdict.
    ///
    /// Checked: unit integral on [0, 1]; vanishing moments u = 1..=order
    /// (tolerance 1e-3 for odd u, 1e-6 for even u, which oddness makes
    /// exact); oddness on a grid; the cumulative integral peaking at the
    /// origin; and continuity at the support edge (advisory).
    pub fn validate(&self, quadrature_points: usize) -> Result<ValidationReport, Error> {
        if quadrature_points < 100 {
            return Err(argument("validation needs at least 100 quadrature points"));
        }
        let n = quadrature_points & !1;
        let mut report = ValidationReport::default();

        let unit = self.moment(0, n);
        report.push("unit_integral", unit, 1e-3, Severity::Required, (unit - 1.0).abs() <= 1e-3);

        for u in 1..=self.order as u32 {
            let m = self.moment(u, n);
            let tol = if u % 2 == 1 { 1e-3 } else { 1e-6 };
            report.push(
                format!("vanishing_moment_u{u}"),
                m,
                tol,
                Severity::Required,
                m.abs() <= tol,
            );
        }

        let mut odd_dev: f64 = 0.0;
        for i in 0..=n {
            let x = i as f64 / n as f64;
            odd_dev = odd_dev.max((self.eval(x) + self.eval(-x)).abs());
        }
        report.push("oddness", odd_dev, 1e-12, Severity::Required, odd_dev <= 1e-12);

        // Cumulative integral F(x) = ∫_{-1}^x W on the quadrature grid (the
        // filter's step response, up to sign); |F| must peak at the origin.
        let h = 2.0 / n as f64;
        let mut cum = 0.0;
        let mut best = (0.0f64, -1.0f64);
        let mut prev = self.eval(-1.0);
        for i in 1..=n {
            let x = -1.0 + i as f64 * h;
            let fx = self.eval(x);
            cum += 0.5 * h * (prev + fx);
            prev = fx;
            if cum.abs() > best.0 {
                best = (cum.abs(), x);
            }
        }
        report.push(
            "step_response_peak_location",
            best.1,
            h,
            Severity::Required,
            best.1.abs() <= h + 1e-12,
        );

        let edge = self.eval(1.0).abs();
        report.push("edge_continuity", edge, 1e-3, Severity::Advisory, edge <= 1e-3);

        Ok(report)
    }

    /// Filter weights for sample offsets d = -h..=h at scale `s` on a series
    /// of length `n`, where h = floor(n*s): entry `d + h` is W(d / (n*s)).
    pub fn weights(&self, n: usize, s: f64) -> Result<Vec<f64>, Error> {
        check_scale(n, s)?;
        let ns = n as f64 * s;
        let half = ns as usize; // floor; ns >= 1 checked above
        let mut w = Vec::with_capacity(2 * half + 1);
        for d in -(half as i64)..=half as i64 {
            w.push(self.eval(d as f64 / ns));
        }
        Ok(w)
    }

    /// The filtered contrast at 0-based center `i` of dimension `r`:
    /// (n s)^{-1/2} Σ_d W(d/(n s)) y[i+d]. The full window must fit inside
    /// the series.
    pub fn compute_h(
        &self,
        panel: &TimeSeriesPanel,
        r: usize,
        i: usize,
        s: f64,
    ) -> Result<f64, Error> {
        let n = panel.n();
        check_scale(n, s)?;
        if r >= panel.p() {
            return Err(argument(format!("dimension {r} out of range (p = {})", panel.p())));
        }
        let ns = n as f64 * s;
        let half = ns as usize;
        if i < half || i + half >= n {
            return Err(argument(format!(
                "window of half-width {half} at index {i} leaves the series (n = {n})"
            )));
        }
        let y = panel.dim(r);
        let mut acc = 0.0;
        for d in -(half as i64)..=half as i64 {
            acc += self.eval(d as f64 / ns) * y[(i as i64 + d) as usize];
        }
        Ok(acc / crate::math::sqrt(ns))
    }
}

fn check_scale(n: usize, s: f64) -> Result<(), Error> {
    if n == 0 {
        return Err(argument("series length must be positive"));
    }
    if !(s > 0.0 && s <= 0.5) || !s.is_finite() {
        return Err(argument(format!("scale {s} outside (0, 0.5]")));
    }
    if n as f64 * s < 1.0 {
        return Err(argument(format!("scale {s} spans less than one sample at n = {n}")));
    }
    Ok(())
}

fn pow_int(x: f64, u: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..u {
        acc *= x;
    }
    acc
}

/// Precomputed filter weights for every distinct scale in play, shared across
/// dimensions and bootstrap replicates. On the equispaced grid the weights
/// depend only on the offset d = k - i, so one vector per scale serves every
/// center.
#[derive(Debug, Clone)]
pub struct KernelBank {
    entries: Vec<Kernel>,
}

/// Weights and normalizer for one scale.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub scale: f64,
    /// Window half-width in samples, floor(n*s).
    pub half: usize,
    /// Weights for offsets -half..=half.
    pub weights: Vec<f64>,
    /// (n*s)^{-1/2}.
    pub norm: f64,
}

impl Kernel {
    /// Normalized contrast at `center`; the window must fit in `x`.
    #[inline]
    pub fn contrast(&self, x: &[f64], center: usize) -> f64 {
        debug_assert!(center >= self.half && center + self.half < x.len());
        let lo = center - self.half;
        let window = &x[lo..=center + self.half];
        let mut acc = 0.0;
        for (w, v) in self.weights.iter().zip(window) {
            acc += w * v;
        }
        acc * self.norm
    }
}

impl KernelBank {
    /// Builds one kernel per distinct scale (deduplicated on exact value).
    pub fn new(filter: &JumpPassFilter, n: usize, scales: &[f64]) -> Result<Self, Error> {
        let mut entries: Vec<Kernel> = Vec::new();
        for &s in scales {
            if entries.iter().any(|k| k.scale.to_bits() == s.to_bits()) {
                continue;
            }
            let weights = filter.weights(n, s)?;
            let ns = n as f64 * s;
            entries.push(Kernel {
                scale: s,
                half: ns as usize,
                weights,
                norm: 1.0 / crate::math::sqrt(ns),
            });
        }
        Ok(Self { entries })
    }

    pub fn get(&self, scale: f64) -> Option<&Kernel> {
        self.entries
            .iter()
            .find(|k| k.scale.to_bits() == scale.to_bits())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Kernel> {
        self.entries.iter()
    }
}
