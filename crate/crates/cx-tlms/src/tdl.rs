//! Tapped delay line of tensor outputs.
//!
//! Each tap keeps the index vector it was evaluated at, a snapshot of
//! the factor rows selected at that time, and the cached tensor output.
//! The snapshots matter: tensor updates reference the rows as they were
//! when the tap entered the line, not the current factors.

use std::collections::VecDeque;

use crate::mat::Mat;
use crate::scalar::Scalar;
use crate::tensor::IndexVector;

/// One delay-line record.
#[derive(Debug, Clone, PartialEq)]
pub struct Tap<T> {
    /// 1-based index vector the tensor was evaluated at.
    pub idx: IndexVector,
    /// Snapshot of `A_m(i_m, :)` for every mode, each of length `rank`.
    pub rows: Vec<Vec<T>>,
    /// Cached tensor output for this tap.
    pub z: T,
}

impl<T: Scalar> Tap<T> {
    /// Zero-padding tap used before the line has seen real samples; its
    /// all-zero rows contribute nothing to predictions or updates.
    fn padding(order: usize, rank: usize) -> Self {
        Self {
            idx: IndexVector::new(vec![1; order]),
            rows: vec![vec![T::ZERO; rank]; order],
            z: T::ZERO,
        }
    }
}

/// Fixed-depth delay line, newest tap first.
#[derive(Debug, Clone, PartialEq)]
pub struct Tdl<T> {
    taps: VecDeque<Tap<T>>,
    depth: usize,
}

impl<T: Scalar> Tdl<T> {
    /// Create a line of `depth` zero-padding taps.
    pub fn new(depth: usize, order: usize, rank: usize) -> Self {
        let taps = (0..depth).map(|_| Tap::padding(order, rank)).collect();
        Self { taps, depth }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Insert the newest tap and evict the oldest.
    pub fn push(&mut self, tap: Tap<T>) {
        self.taps.push_front(tap);
        self.taps.truncate(self.depth);
    }

    /// Taps ordered newest first; always exactly `depth` entries.
    pub fn taps(&self) -> impl Iterator<Item = &Tap<T>> {
        self.taps.iter()
    }

    pub fn tap(&self, p: usize) -> &Tap<T> {
        &self.taps[p]
    }

    /// Cached tensor outputs, newest first.
    pub fn z_vector(&self) -> Vec<T> {
        self.taps.iter().map(|t| t.z).collect()
    }

    /// Index vectors, newest first.
    pub fn index_history(&self) -> Vec<IndexVector> {
        self.taps.iter().map(|t| t.idx.clone()).collect()
    }

    pub fn is_all_finite(&self) -> bool {
        self.taps
            .iter()
            .all(|t| t.z.is_finite_scalar() && t.rows.iter().flatten().all(|v| v.is_finite_scalar()))
    }
}

/// Snapshot the rows of `factors` selected by `idx`.
pub(crate) fn snapshot_rows<T: Scalar>(factors: &[Mat<T>], idx: &IndexVector) -> Vec<Vec<T>> {
    factors
        .iter()
        .enumerate()
        .map(|(m, f)| f.row(idx.zero_based(m)).to_vec())
        .collect()
}
