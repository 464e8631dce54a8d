//! Low-rank CPD lookup tensors.
//!
//! An order-`M` tensor of rank `R` is stored as `M` factor matrices
//! `A_m` of shape `I_m x R`; the entry at index `(i_1, ..., i_M)` is
//! `sum_r prod_m A_m(i_m, r)`. Entries are never materialized during
//! filtering — the estimators only ever evaluate single indices and
//! rank-sized row products. Tensor indices are 1-based throughout the
//! public API (`1 <= i_m <= I_m`); matrix storage is 0-based.

use rand::Rng;

use crate::complexity::FlopTally;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Scalar;

/// Bin mapper from a real sample to a 1-based tensor index.
///
/// The raw bin is `floor(x / delta_x) + n_bins / 2`; values outside
/// `[1, n_bins]` saturate at the boundary bins so that outliers keep the
/// lookup well-defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretizer {
    delta_x: f64,
    n_bins: usize,
}

impl Discretizer {
    pub fn new(delta_x: f64, n_bins: usize) -> Result<Self> {
        if !delta_x.is_finite() || delta_x <= 0.0 {
            return Err(Error::Config(format!(
                "discretization interval must be positive, got {delta_x}"
            )));
        }
        if n_bins == 0 || !n_bins.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "bin count must be a positive even number, got {n_bins}"
            )));
        }
        Ok(Self { delta_x, n_bins })
    }

    pub fn delta_x(&self) -> f64 {
        self.delta_x
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    /// Map a sample to its 1-based bin, saturating at the edges.
    ///
    /// `floor` rounds toward negative infinity, so negative samples bin
    /// correctly; zero lands on bin `n_bins / 2`.
    pub fn discretize(&self, x: f64) -> Result<usize> {
        if !x.is_finite() {
            return Err(Error::NonFinite {
                context: "discretizer input",
            });
        }
        let raw = (x / self.delta_x).floor() + (self.n_bins / 2) as f64;
        let clamped = raw.max(1.0).min(self.n_bins as f64);
        Ok(clamped as usize)
    }
}

/// 1-based multi-index into an order-`M` tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexVector(Vec<usize>);

impl IndexVector {
    pub fn new(indices: Vec<usize>) -> Self {
        Self(indices)
    }

    /// Convenience constructor for the order-2 tensors used by the
    /// complex architectures (one mode per signal component).
    pub fn from_pair(i1: usize, i2: usize) -> Self {
        Self(vec![i1, i2])
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// 0-based component for internal matrix indexing.
    #[inline]
    pub(crate) fn zero_based(&self, mode: usize) -> usize {
        self.0[mode] - 1
    }
}

impl From<Vec<usize>> for IndexVector {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// Rank-`R` CPD representation of an order-`M` lookup tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct CpdTensor<T> {
    factors: Vec<Mat<T>>,
}

impl<T: Scalar> CpdTensor<T> {
    /// Wrap factor matrices; all must share the same column count (the
    /// rank) and have at least one row.
    pub fn new(factors: Vec<Mat<T>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Config("tensor needs at least one mode".into()));
        }
        let rank = factors[0].cols();
        if rank == 0 {
            return Err(Error::Config("tensor rank must be positive".into()));
        }
        for (m, f) in factors.iter().enumerate() {
            if f.cols() != rank {
                return Err(Error::Dimension {
                    expected: rank,
                    got: f.cols(),
                });
            }
            if f.rows() == 0 {
                return Err(Error::Config(format!("mode {} has zero size", m + 1)));
            }
        }
        Ok(Self { factors })
    }

    /// Factors drawn i.i.d. uniform on `[0.9, 1.1]`; for complex fields
    /// both real and imaginary parts are drawn from that interval.
    /// Near-one entries keep the rank-1 products non-degenerate.
    pub fn random_uniform(dims: &[usize], rank: usize, rng: &mut impl Rng) -> Result<Self> {
        let factors = dims
            .iter()
            .map(|&dim| {
                let mut m = Mat::zeros(dim, rank);
                for v in m.as_mut_slice() {
                    *v = T::random_near_one(rng);
                }
                m
            })
            .collect();
        Self::new(factors)
    }

    pub fn zeros(dims: &[usize], rank: usize) -> Result<Self> {
        Self::new(dims.iter().map(|&d| Mat::zeros(d, rank)).collect())
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn rank(&self) -> usize {
        self.factors[0].cols()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(Mat::rows).collect()
    }

    pub fn factor(&self, mode: usize) -> &Mat<T> {
        &self.factors[mode]
    }

    pub fn factor_mut(&mut self, mode: usize) -> &mut Mat<T> {
        &mut self.factors[mode]
    }

    pub fn factors(&self) -> &[Mat<T>] {
        &self.factors
    }

    pub fn is_all_finite(&self) -> bool {
        self.factors.iter().all(Mat::is_all_finite)
    }

    pub(crate) fn check_index(&self, idx: &IndexVector) -> Result<()> {
        if idx.order() != self.order() {
            return Err(Error::Dimension {
                expected: self.order(),
                got: idx.order(),
            });
        }
        for (m, (&i, f)) in idx.indices().iter().zip(&self.factors).enumerate() {
            if i == 0 || i > f.rows() {
                return Err(Error::IndexOutOfBounds {
                    mode: m + 1,
                    index: i,
                    size: f.rows(),
                });
            }
        }
        Ok(())
    }

    /// Evaluate the tensor entry at `idx`: `sum_r prod_m A_m(i_m, r)`.
    pub fn eval(&self, idx: &IndexVector) -> Result<T> {
        self.check_index(idx)?;
        Ok(self.eval_tallied(idx, &mut crate::complexity::NoTally))
    }

    /// Bounds-unchecked evaluation with operation tallying; callers
    /// guarantee the index is valid.
    pub(crate) fn eval_tallied<C: FlopTally>(&self, idx: &IndexVector, tally: &mut C) -> T {
        let rank = self.rank();
        let mut acc = T::ZERO;
        for r in 0..rank {
            let mut term = self.factors[0].get(idx.zero_based(0), r);
            for (m, f) in self.factors.iter().enumerate().skip(1) {
                term = term * f.get(idx.zero_based(m), r);
                tally.mul::<T>(1);
            }
            if r == 0 {
                acc = term;
            } else {
                acc += term;
                tally.acc::<T>(1);
            }
        }
        acc
    }

    /// Element-wise product of the rows selected by `idx` over all modes
    /// except `m_prime` (1-based). For order-2 tensors this is just the
    /// remaining row.
    pub fn hadamard_excluding(&self, idx: &IndexVector, m_prime: usize) -> Result<Vec<T>> {
        self.check_index(idx)?;
        if m_prime == 0 || m_prime > self.order() {
            return Err(Error::InvalidMode {
                mode: m_prime,
                order: self.order(),
            });
        }
        let rows: Vec<&[T]> = (0..self.order())
            .filter(|&m| m != m_prime - 1)
            .map(|m| self.factors[m].row(idx.zero_based(m)))
            .collect();
        Ok(hadamard_rows(&rows, self.rank()))
    }

    /// Materialize every entry into a dense array. Guarded against
    /// accidental huge allocations; intended for oracles and tests.
    pub fn dense_materialize(&self) -> Result<DenseTensor<T>> {
        const MAX_ELEMENTS: usize = 1_000_000;
        let dims = self.dims();
        let elements = dims.iter().try_fold(1usize, |acc, &d| {
            acc.checked_mul(d).filter(|&n| n <= MAX_ELEMENTS)
        });
        let Some(elements) = elements else {
            return Err(Error::Capacity {
                elements: usize::MAX,
                limit: MAX_ELEMENTS,
            });
        };

        let mut data = vec![T::ZERO; elements];
        let mut idx = vec![1usize; dims.len()];
        for slot in data.iter_mut() {
            let iv = IndexVector::new(idx.clone());
            *slot = self.eval_tallied(&iv, &mut crate::complexity::NoTally);
            // odometer increment, last mode fastest
            for m in (0..dims.len()).rev() {
                if idx[m] < dims[m] {
                    idx[m] += 1;
                    break;
                }
                idx[m] = 1;
            }
        }
        Ok(DenseTensor { dims, data })
    }
}

/// Element-wise product of row slices, each of length `rank`.
pub(crate) fn hadamard_rows<T: Scalar>(rows: &[&[T]], rank: usize) -> Vec<T> {
    let mut out = vec![T::ONE; rank];
    for row in rows {
        for (o, &v) in out.iter_mut().zip(row.iter()) {
            *o = *o * v;
        }
    }
    out
}

/// Dense M-way array produced by [`CpdTensor::dense_materialize`];
/// indexed with the same 1-based convention, last mode fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<T> {
    dims: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> DenseTensor<T> {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn at(&self, idx: &IndexVector) -> T {
        assert_eq!(idx.order(), self.dims.len(), "index order mismatch");
        let mut flat = 0usize;
        for (m, &i) in idx.indices().iter().enumerate() {
            assert!(i >= 1 && i <= self.dims[m], "index out of bounds");
            flat = flat * self.dims[m] + (i - 1);
        }
        self.data[flat]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rank1_2x2() -> CpdTensor<f64> {
        // A_1 = [2; 3], A_2 = [5; 7]
        CpdTensor::new(vec![
            Mat::from_rows(&[vec![2.0], vec![3.0]]),
            Mat::from_rows(&[vec![5.0], vec![7.0]]),
        ])
        .unwrap()
    }

    #[test]
    fn discretize_zero_maps_to_half_bins() {
        let d = Discretizer::new(0.1, 32).unwrap();
        assert_eq!(d.discretize(0.0).unwrap(), 16);
    }

    #[test]
    fn discretize_floors_toward_negative_infinity() {
        // floor(-0.05 / 0.1) = floor(-0.5) = -1, so bin 15.
        let d = Discretizer::new(0.1, 32).unwrap();
        assert_eq!(d.discretize(-0.05).unwrap(), 15);
    }

    #[test]
    fn discretize_clamps_outliers() {
        let d = Discretizer::new(0.1, 32).unwrap();
        // raw bin would be 116
        assert_eq!(d.discretize(10.0).unwrap(), 32);
        assert_eq!(d.discretize(-50.0).unwrap(), 1);
    }

    #[test]
    fn discretize_rejects_non_finite() {
        let d = Discretizer::new(0.1, 32).unwrap();
        assert!(d.discretize(f64::NAN).is_err());
        assert!(d.discretize(f64::INFINITY).is_err());
    }

    #[test]
    fn discretize_monotone_then_bounded() {
        let d = Discretizer::new(0.25, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let a = rng.gen_range(-20.0..20.0);
            let b = rng.gen_range(-20.0..20.0);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let bl = d.discretize(lo).unwrap();
            let bh = d.discretize(hi).unwrap();
            assert!(bl <= bh, "non-monotone at {lo} vs {hi}");
            assert!((1..=32).contains(&bl) && (1..=32).contains(&bh));
        }
    }

    #[test]
    fn eval_rank1_outer_product() {
        let t = rank1_2x2();
        let v = t.eval(&IndexVector::from_pair(1, 2)).unwrap();
        assert_eq!(v, 2.0 * 7.0);
    }

    #[test]
    fn eval_rank2_sums_terms() {
        // A_1 row 1 = [1, 2], A_2 row 1 = [3, 4] -> 1*3 + 2*4 = 11
        let t = CpdTensor::new(vec![
            Mat::from_rows(&[vec![1.0, 2.0]]),
            Mat::from_rows(&[vec![3.0, 4.0]]),
        ])
        .unwrap();
        assert_eq!(t.eval(&IndexVector::from_pair(1, 1)).unwrap(), 11.0);
    }

    #[test]
    fn eval_zero_factor_annihilates() {
        let t = CpdTensor::new(vec![
            Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]),
            Mat::<f64>::zeros(3, 2),
        ])
        .unwrap();
        for i in 1..=2 {
            for j in 1..=3 {
                assert_eq!(t.eval(&IndexVector::from_pair(i, j)).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn eval_rejects_out_of_bounds() {
        let t = rank1_2x2();
        assert!(t.eval(&IndexVector::from_pair(0, 1)).is_err());
        assert!(t.eval(&IndexVector::from_pair(1, 3)).is_err());
        assert!(t.eval(&IndexVector::new(vec![1])).is_err());
    }

    #[test]
    fn eval_is_multilinear_in_each_used_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let t = CpdTensor::<f64>::random_uniform(&[4, 5, 3], 3, &mut rng).unwrap();
            let idx = IndexVector::new(vec![
                rng.gen_range(1..=4),
                rng.gen_range(1..=5),
                rng.gen_range(1..=3),
            ]);
            let base = t.eval(&idx).unwrap();
            let c: f64 = rng.gen_range(-3.0..3.0);
            let mode = rng.gen_range(0..3);
            let mut scaled = t.clone();
            for v in scaled.factor_mut(mode).row_mut(idx.zero_based(mode)) {
                *v *= c;
            }
            let got = scaled.eval(&idx).unwrap();
            assert!(
                (got - c * base).abs() <= 1e-12 * (c * base).abs().max(1.0),
                "multilinearity violated: {got} vs {}",
                c * base
            );
        }
    }

    #[test]
    fn hadamard_excluding_order2_is_remaining_row() {
        let t = CpdTensor::new(vec![
            Mat::from_rows(&[vec![9.0, 9.0]]),
            Mat::from_rows(&[vec![4.0, -1.5]]),
        ])
        .unwrap();
        let h = t
            .hadamard_excluding(&IndexVector::from_pair(1, 1), 1)
            .unwrap();
        assert_eq!(h, vec![4.0, -1.5]);
    }

    #[test]
    fn hadamard_excluding_order3_elementwise() {
        // exclude mode 2: [1,2] .* [3,4] = [3,8]
        let t = CpdTensor::new(vec![
            Mat::from_rows(&[vec![1.0, 2.0]]),
            Mat::from_rows(&[vec![5.0, 6.0]]),
            Mat::from_rows(&[vec![3.0, 4.0]]),
        ])
        .unwrap();
        let h = t
            .hadamard_excluding(&IndexVector::new(vec![1, 1, 1]), 2)
            .unwrap();
        assert_eq!(h, vec![3.0, 8.0]);
    }

    #[test]
    fn hadamard_excluding_rejects_bad_mode() {
        let t = rank1_2x2();
        assert!(t
            .hadamard_excluding(&IndexVector::from_pair(1, 1), 0)
            .is_err());
        assert!(t
            .hadamard_excluding(&IndexVector::from_pair(1, 1), 3)
            .is_err());
    }

    #[test]
    fn hadamard_dot_identity_reproduces_eval() {
        // eval == dot(A_{m'}(i_{m'},:), hadamard_excluding) for all modes
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let t = CpdTensor::<Complex64>::random_uniform(&[3, 4, 2], 3, &mut rng).unwrap();
            let idx = IndexVector::new(vec![
                rng.gen_range(1..=3),
                rng.gen_range(1..=4),
                rng.gen_range(1..=2),
            ]);
            let full = t.eval(&idx).unwrap();
            for m_prime in 1..=3 {
                let h = t.hadamard_excluding(&idx, m_prime).unwrap();
                let row = t.factor(m_prime - 1).row(idx.zero_based(m_prime - 1));
                let dot: Complex64 = row.iter().zip(&h).map(|(&a, &b)| a * b).sum();
                assert!(
                    (dot - full).norm() <= 1e-12 * full.norm().max(1.0),
                    "identity failed for mode {m_prime}"
                );
            }
        }
    }

    #[test]
    fn dense_matches_hand_rank1() {
        let t = rank1_2x2();
        let d = t.dense_materialize().unwrap();
        // outer product of [2,3] and [5,7]
        assert_eq!(d.at(&IndexVector::from_pair(1, 1)), 10.0);
        assert_eq!(d.at(&IndexVector::from_pair(1, 2)), 14.0);
        assert_eq!(d.at(&IndexVector::from_pair(2, 1)), 15.0);
        assert_eq!(d.at(&IndexVector::from_pair(2, 2)), 21.0);
    }

    #[test]
    fn dense_zero_tensor_is_zero() {
        let t = CpdTensor::<f64>::zeros(&[2, 3], 2).unwrap();
        let d = t.dense_materialize().unwrap();
        assert!(d.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dense_agrees_with_eval_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let t = CpdTensor::<f64>::random_uniform(&[3, 4, 2], 2, &mut rng).unwrap();
        let d = t.dense_materialize().unwrap();
        for i1 in 1..=3 {
            for i2 in 1..=4 {
                for i3 in 1..=2 {
                    let idx = IndexVector::new(vec![i1, i2, i3]);
                    let a = d.at(&idx);
                    let b = t.eval(&idx).unwrap();
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn dense_capacity_guard_trips() {
        let t = CpdTensor::<f64>::zeros(&[1024, 1024, 2], 1).unwrap();
        assert!(matches!(
            t.dense_materialize(),
            Err(Error::Capacity { .. })
        ));
    }
}
