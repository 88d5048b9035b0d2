//! In-memory representation of an n x p panel of observations.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{data, Error};

/// A panel of `p` dimensions observed at `n` equispaced times.
///
/// Sample `i` (0-based) of dimension `r` sits at fractional time `(i+1)/n`,
/// so the last observation is at time 1. Storage is dimension-major: each
/// dimension is a contiguous `&[f64]` of length `n`, which is the access
/// pattern of every algorithm in this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPanel {
    data: Vec<f64>,
    n: usize,
    p: usize,
}

impl TimeSeriesPanel {
    /// Builds a panel from per-dimension series. All series must share the
    /// same nonzero length and contain only finite values.
    pub fn from_dims(dims: Vec<Vec<f64>>) -> Result<Self, Error> {
        let p = dims.len();
        if p == 0 {
            return Err(data("panel has no dimensions"));
        }
        let n = dims[0].len();
        if n == 0 {
            return Err(data("panel has no observations"));
        }
        let mut store = Vec::with_capacity(n * p);
        for (r, dim) in dims.iter().enumerate() {
            if dim.len() != n {
                return Err(data(format!(
                    "dimension {r} has length {} but dimension 0 has length {n}",
                    dim.len()
                )));
            }
            for (i, &v) in dim.iter().enumerate() {
                if !v.is_finite() {
                    return Err(data(format!(
                        "non-finite value at dimension {r}, index {i}"
                    )));
                }
            }
            store.extend_from_slice(dim);
        }
        Ok(Self {
            data: store,
            n,
            p,
        })
    }

    /// Builds a panel from a row-major buffer: `buf[i * p + r]` is sample `i`
    /// of dimension `r`, matching a CSV laid out as one row per time point.
    pub fn from_row_major(n: usize, p: usize, buf: &[f64]) -> Result<Self, Error> {
        if n == 0 || p == 0 {
            return Err(data("panel must have n >= 1 and p >= 1"));
        }
        if buf.len() != n * p {
            return Err(data(format!(
                "buffer has {} values, expected n*p = {}",
                buf.len(),
                n * p
            )));
        }
        let mut dims = Vec::with_capacity(p);
        for r in 0..p {
            dims.push((0..n).map(|i| buf[i * p + r]).collect());
        }
        Self::from_dims(dims)
    }

    /// Number of time points.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of dimensions.
    pub fn p(&self) -> usize {
        self.p
    }

    /// The full series of dimension `r`.
    pub fn dim(&self, r: usize) -> &[f64] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    /// Sample `i` of dimension `r`.
    pub fn value(&self, r: usize, i: usize) -> f64 {
        self.data[r * self.n + i]
    }

    /// Returns a panel whose dimensions are reordered so that new dimension
    /// `r` is old dimension `perm[r]`.
    pub fn permute_dims(&self, perm: &[usize]) -> Result<Self, Error> {
        if perm.len() != self.p {
            return Err(data("permutation length must equal p"));
        }
        let mut dims = Vec::with_capacity(self.p);
        for &r in perm {
            if r >= self.p {
                return Err(data(format!("permutation entry {r} out of range")));
            }
            dims.push(self.dim(r).to_vec());
        }
        Self::from_dims(dims)
    }

    pub(crate) fn dim_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.n..(r + 1) * self.n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn layout_roundtrip() {
        let panel =
            TimeSeriesPanel::from_row_major(3, 2, &[1.0, 10.0, 2.0, 20.0, 3.0, 30.0]).unwrap();
        assert_eq!(panel.n(), 3);
        assert_eq!(panel.p(), 2);
        assert_eq!(panel.dim(0), &[1.0, 2.0, 3.0]);
        assert_eq!(panel.dim(1), &[10.0, 20.0, 30.0]);
        assert_eq!(panel.value(1, 2), 30.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(TimeSeriesPanel::from_dims(vec![]).is_err());
        assert!(TimeSeriesPanel::from_dims(vec![vec![]]).is_err());
        assert!(TimeSeriesPanel::from_dims(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(TimeSeriesPanel::from_dims(vec![vec![f64::NAN]]).is_err());
        assert!(TimeSeriesPanel::from_dims(vec![vec![f64::INFINITY]]).is_err());
    }

    #[test]
    fn permutation_reorders() {
        let panel = TimeSeriesPanel::from_dims(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let swapped = panel.permute_dims(&[1, 0]).unwrap();
        assert_eq!(swapped.dim(0), &[3.0, 4.0]);
        assert_eq!(swapped.dim(1), &[1.0, 2.0]);
        assert!(panel.permute_dims(&[0]).is_err());
        assert!(panel.permute_dims(&[0, 2]).is_err());
    }
}
