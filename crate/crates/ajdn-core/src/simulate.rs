//! Synthetic panels: error processes of graded difficulty, smooth trends
//! whose slope tracks the local noise level, and planted jump scenarios
//! sized in local-sd units.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{argument, Error};
use crate::evaluate::TrueJump;
use crate::math;
use crate::panel::TimeSeriesPanel;
use crate::rng::{uniform, NormalSource};
use crate::scales::ScaleGrid;
use crate::tuning::rule_of_thumb;
use crate::variance::LocalVarianceField;

/// Error-process families, ordered by how much structure they add.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Process {
    /// Independent standard normals.
    Iid,
    /// Independent AR(1) with coefficient 0.25 per dimension.
    StationaryAr,
    /// VMA(3) with equicorrelated uniform innovations whose standard
    /// deviation doubles on the second half.
    RegimeVma,
    /// VAR(1) whose coefficient matrix is modulated by a sinusoid envelope;
    /// centered-binomial innovations with geometric cross-correlation.
    DriftingVar,
    /// The drifting VAR with innovation amplitude doubled on the middle
    /// third.
    RegimeDriftingVar,
}

/// Jump layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Two jump times (1/4 and 3/4) each shared by a block of dimensions.
    SharedTimes,
    /// Single-dimension jumps spread evenly over [0.2, 0.8].
    ScatteredTimes,
}

/// A jump scenario: `gamma` controls how many dimensions are hit, `delta`
/// the jump size in local-sd units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub gamma: f64,
    pub delta: f64,
}

/// Everything needed to generate one synthetic panel.
#[derive(Debug, Clone, PartialEq)]
pub struct DgpSpec {
    pub process: Process,
    /// Add a smooth mean whose increments are scaled by the local sd.
    pub trend: bool,
    pub n: usize,
    pub p: usize,
    pub scenario: Option<Scenario>,
    pub seed: u64,
}

/// Steps discarded before recursive processes start recording.
const BURN_IN: usize = 200;

/// Generates the panel and its planted jumps.
pub fn generate(spec: &DgpSpec) -> Result<(TimeSeriesPanel, Vec<TrueJump>), Error> {
    let errors = generate_errors(spec.process, spec.n, spec.p, spec.seed)?;
    let mut panel = errors.clone();
    if spec.trend {
        let curves = trend_curves(&errors)?;
        for r in 0..spec.p {
            for (v, c) in panel.dim_mut(r).iter_mut().zip(&curves[r]) {
                *v += c;
            }
        }
    }
    let truth = match &spec.scenario {
        Some(sc) => apply_scenario(&mut panel, &errors, sc)?,
        None => Vec::new(),
    };
    Ok((panel, truth))
}

/// Generates the error panel alone.
pub fn generate_errors(
    process: Process,
    n: usize,
    p: usize,
    seed: u64,
) -> Result<TimeSeriesPanel, Error> {
    if n < 8 || p == 0 {
        return Err(argument(format!("need n >= 8 and p >= 1, got n = {n}, p = {p}")));
    }
    let dims = match process {
        Process::Iid => iid_errors(n, p, seed),
        Process::StationaryAr => stationary_ar_errors(n, p, seed),
        Process::RegimeVma => regime_vma_errors(n, p, seed)?,
        Process::DriftingVar => drifting_var_errors(n, p, seed, false),
        Process::RegimeDriftingVar => drifting_var_errors(n, p, seed, true),
    };
    TimeSeriesPanel::from_dims(dims)
}

fn iid_errors(n: usize, p: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..p)
        .map(|r| {
            let mut src = NormalSource::from_stream(seed, r as u64 + 1);
            (0..n).map(|_| src.next()).collect()
        })
        .collect()
}

fn stationary_ar_errors(n: usize, p: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..p)
        .map(|r| {
            let mut src = NormalSource::from_stream(seed, r as u64 + 1);
            let mut x = 0.0;
            for _ in 0..BURN_IN {
                x = 0.25 * x + src.next();
            }
            (0..n)
                .map(|_| {
                    x = 0.25 * x + src.next();
                    x
                })
                .collect()
        })
        .collect()
}

fn regime_vma_errors(n: usize, p: usize, seed: u64) -> Result<Vec<Vec<f64>>, Error> {
    let root = equicorrelation_root(p, 0.5)?;
    let mut rng = crate::rng::stream(seed, 1);
    let mut draw_eta = |one_based: i64| -> Vec<f64> {
        // Uniform innovations on [-sqrt(3), sqrt(3)] (unit variance), mixed
        // by the correlation root; sd doubles on the second half.
        let u: Vec<f64> = (0..p)
            .map(|_| (2.0 * uniform(&mut rng) - 1.0) * math::sqrt(3.0))
            .collect();
        let mut eta = apply_lower(&root, p, &u);
        if one_based > (n / 2) as i64 {
            for v in &mut eta {
                *v *= 2.0;
            }
        }
        eta
    };
    // Ring of the last four innovation vectors; the pre-roll draws carry
    // non-positive indices so they use the first-half scale.
    let mut ring: Vec<Vec<f64>> = Vec::with_capacity(4);
    for k in -2i64..=0 {
        ring.push(draw_eta(k));
    }
    let mut dims = vec![Vec::with_capacity(n); p];
    for i in 0..n {
        let eta = draw_eta(i as i64 + 1);
        ring.push(eta);
        if ring.len() > 4 {
            ring.remove(0);
        }
        let cur = &ring[ring.len() - 1];
        let lag1 = &ring[ring.len() - 2];
        let lag3 = &ring[0];
        for r in 0..p {
            dims[r].push(cur[r] + 0.5 * lag1[r] + 0.5 * lag3[r]);
        }
    }
    Ok(dims)
}

fn drifting_var_errors(n: usize, p: usize, seed: u64, regime_amplitude: bool) -> Vec<Vec<f64>> {
    let mut rng = crate::rng::stream(seed, 1);
    let binom = BinomialTable::new(10, 0.3);
    let third = math::ceil(n as f64 / 3.0) as usize;
    let amplitude = |i: usize| -> f64 {
        if !regime_amplitude {
            return 1.0;
        }
        // 1-based regimes: [1, t], (t, 2t], then back to 1.
        let one = i + 1;
        if one > third && one <= 2 * third {
            2.0
        } else {
            1.0
        }
    };
    let envelope = |i: i64| -> f64 {
        let t = if i <= 0 { 0.0 } else { i as f64 / n as f64 };
        (math::sin(2.0 * core::f64::consts::PI * t) + 1.0) / 2.0
    };
    let mut eta = vec![0.0; p];
    let mut q = vec![0.0; p];
    let mut state = vec![0.0; p];
    let mut next_state = vec![0.0; p];
    let mut step = |state: &mut Vec<f64>,
                    next: &mut Vec<f64>,
                    rng: &mut rand_chacha::ChaCha8Rng,
                    i: i64,
                    amp: f64| {
        for v in q.iter_mut() {
            *v = binom.draw(rng) - 3.0;
        }
        kms_apply(0.5, &q, &mut eta);
        let e = envelope(i);
        for j in 0..p {
            // Coefficient rows: 0.25 on the diagonal and the reversed
            // diagonal (one entry when they coincide).
            let k = p - 1 - j;
            let mut coupled = 0.25 * state[j];
            if k != j {
                coupled += 0.25 * state[k];
            }
            next[j] = e * coupled + amp * eta[j];
        }
        core::mem::swap(state, next);
    };
    for b in 0..BURN_IN {
        step(&mut state, &mut next_state, &mut rng, -(BURN_IN as i64) + b as i64, 1.0);
    }
    let mut dims = vec![Vec::with_capacity(n); p];
    for i in 0..n {
        step(&mut state, &mut next_state, &mut rng, i as i64 + 1, amplitude(i));
        for r in 0..p {
            dims[r].push(state[r]);
        }
    }
    dims
}

/// Inverse-CDF sampler for Binomial(trials, prob).
struct BinomialTable {
    cdf: Vec<f64>,
}

impl BinomialTable {
    fn new(trials: usize, prob: f64) -> Self {
        let mut pmf = Vec::with_capacity(trials + 1);
        // Multiplicative recurrence over k keeps everything in closed form.
        let mut v = math::powf(1.0 - prob, trials as f64);
        for k in 0..=trials {
            pmf.push(v);
            v *= ((trials - k) as f64 / (k + 1) as f64) * (prob / (1.0 - prob));
        }
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cdf }
    }

    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
        let u = uniform(rng);
        match self.cdf.iter().position(|&c| u < c) {
            Some(k) => k as f64,
            None => (self.cdf.len() - 1) as f64,
        }
    }
}

/// y = L q for the lower Cholesky factor of the geometric correlation matrix
/// rho^|j-k|, applied in O(p) via its two-term recurrence.
fn kms_apply(rho: f64, q: &[f64], out: &mut [f64]) {
    let s = math::sqrt(1.0 - rho * rho);
    let mut w = 0.0;
    for (j, (&v, o)) in q.iter().zip(out.iter_mut()).enumerate() {
        w = if j == 0 { v } else { rho * w + s * v };
        *o = w;
    }
}

/// Lower Cholesky factor (row-major, dense) of the equicorrelation matrix
/// with unit diagonal and off-diagonal `rho`.
fn equicorrelation_root(p: usize, rho: f64) -> Result<Vec<f64>, Error> {
    let mut a = vec![0.0; p * p];
    for j in 0..p {
        for k in 0..p {
            a[j * p + k] = if j == k { 1.0 } else { rho };
        }
    }
    cholesky_in_place(&mut a, p)?;
    Ok(a)
}

/// In-place lower Cholesky of a symmetric positive definite matrix.
fn cholesky_in_place(a: &mut [f64], p: usize) -> Result<(), Error> {
    for j in 0..p {
        for k in 0..=j {
            let mut sum = a[j * p + k];
            for m in 0..k {
                sum -= a[j * p + m] * a[k * p + m];
            }
            if j == k {
                if sum <= 0.0 {
                    return Err(argument("matrix is not positive definite"));
                }
                a[j * p + j] = math::sqrt(sum);
            } else {
                a[j * p + k] = sum / a[k * p + k];
            }
        }
        for k in j + 1..p {
            a[j * p + k] = 0.0;
        }
    }
    Ok(())
}

fn apply_lower(l: &[f64], p: usize, x: &[f64]) -> Vec<f64> {
    (0..p)
        .map(|j| (0..=j).map(|k| l[j * p + k] * x[k]).sum())
        .collect()
}

/// Smooth per-dimension mean curves: phase-shifted sinusoids whose
/// increments are rescaled by the local sd of the error panel, so trend
/// variation is everywhere proportionate to the noise.
pub fn trend_curves(errors: &TimeSeriesPanel) -> Result<Vec<Vec<f64>>, Error> {
    let n = errors.n();
    let p = errors.p();
    let sd = local_sd_profile(errors)?;
    let tau = 2.0 * core::f64::consts::PI;
    let mut out = Vec::with_capacity(p);
    for r in 0..p {
        let unscaled =
            |i: usize| math::sin(tau * (i + 1) as f64 / n as f64 + tau * (r + 1) as f64 / p as f64);
        let mut curve = Vec::with_capacity(n);
        let mut b = unscaled(0);
        curve.push(b);
        for i in 1..n {
            b += sd[r](i) * (unscaled(i) - unscaled(i - 1));
            curve.push(b);
        }
        out.push(curve);
    }
    Ok(out)
}

/// Plants the scenario's jumps into `panel`, sizing each at `delta` times
/// the local sd of the error panel at the jump time. Placement is fully
/// determined by (kind, gamma, p, n).
pub fn apply_scenario(
    panel: &mut TimeSeriesPanel,
    errors: &TimeSeriesPanel,
    sc: &Scenario,
) -> Result<Vec<TrueJump>, Error> {
    if !(sc.gamma > 0.0 && sc.gamma <= 1.0) {
        return Err(argument(format!("gamma {} outside (0, 1]", sc.gamma)));
    }
    if !(sc.delta > 0.0) || !sc.delta.is_finite() {
        return Err(argument(format!("delta {} must be positive", sc.delta)));
    }
    if panel.n() != errors.n() || panel.p() != errors.p() {
        return Err(argument("panel and error panel shapes differ"));
    }
    let n = panel.n();
    let p = panel.p();
    // (dimension, jump time) pairs.
    let placements: Vec<(usize, f64)> = match sc.kind {
        ScenarioKind::SharedTimes => {
            let q = math::ceil(sc.gamma * p as f64 / 2.0) as usize;
            let mut v: Vec<(usize, f64)> = (0..q.min(p)).map(|r| (r, 0.25)).collect();
            v.extend((q..(2 * q).min(p)).map(|r| (r, 0.75)));
            v
        }
        ScenarioKind::ScatteredTimes => {
            let m = math::ceil(sc.gamma * p as f64) as usize;
            (0..m.min(p))
                .map(|k| {
                    let t = if m == 1 {
                        0.5
                    } else {
                        0.2 + 0.6 * k as f64 / (m - 1) as f64
                    };
                    (k, t)
                })
                .collect()
        }
    };
    let sd = local_sd_profile(errors)?;
    let mut truth = Vec::with_capacity(placements.len());
    for (r, t) in placements {
        // Snap to the grid: the last pre-jump sample has time q/n.
        let q = math::round(n as f64 * t) as usize;
        if q == 0 || q >= n {
            return Err(argument(format!("jump time {t} has no pre/post samples at n = {n}")));
        }
        let index = q - 1;
        let magnitude = sc.delta * sd[r](index);
        for v in &mut panel.dim_mut(r)[q..] {
            *v += magnitude;
        }
        truth.push(TrueJump {
            dimension: r,
            index,
            time: q as f64 / n as f64,
            snr: sc.delta,
            magnitude,
        });
    }
    Ok(truth)
}

/// Per-dimension local sd lookups over the whole series: the two-sided
/// estimator on its admissible range, clamped to the nearest defined center
/// outside it. Window bounds come from the data-size defaults.
fn local_sd_profile(
    errors: &TimeSeriesPanel,
) -> Result<Vec<impl Fn(usize) -> f64 + '_>, Error> {
    let rot = rule_of_thumb(errors.n(), errors.p())?;
    let grid = ScaleGrid::shared(rot.s_min, rot.s_max, 2, errors.p())?;
    let field = LocalVarianceField::precompute(errors, &grid)?;
    Ok((0..errors.p())
        .map(|r| {
            let (lo, hi) = field.range(r);
            let values: Vec<f64> = (lo..=hi).map(|i| field.sigma(r, i).unwrap()).collect();
            move |i: usize| values[i.clamp(lo, hi) - lo]
        })
        .collect())
}
