//! Per-sample operation counts: closed-form estimates and an
//! instrumented counting mode.
//!
//! The closed forms give multiplication/addition/division counts for the
//! estimation (forward) and update (backward) steps of each architecture
//! as functions of the filter order `P`, tensor rank `R`, tensor order
//! `M` and mode size `I_m`. The counting mode tallies the arithmetic
//! events actually executed by a forward pass and converts them with the
//! same accounting the closed forms use, so the formulas' structure can
//! be checked against running code.
//!
//! Accounting conventions behind the forward counts:
//! - a complex multiplication costs 4 real multiplications plus 2 real
//!   additions; a real multiplication costs 1;
//! - accumulation into a running real sum costs 1 addition, into a
//!   complex sum 2 additions in the two-tensor architecture and 4 in the
//!   fully complex model (the convention its closed forms are built on);
//! - error subtraction and discretization are not charged.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arch::{ArchKind, Ctlms, Tlms2r, Ttlms};
use crate::error::Result;
use crate::scalar::Scalar;

/// Sink for arithmetic events inside tensor evaluations and dot
/// products. The no-op implementation compiles away in regular use.
pub trait FlopTally {
    fn mul<T: Scalar>(&mut self, n: u64);
    fn acc<T: Scalar>(&mut self, n: u64);
}

/// Zero-cost tally used by the ordinary (non-counting) code paths.
pub struct NoTally;

impl FlopTally for NoTally {
    #[inline(always)]
    fn mul<T: Scalar>(&mut self, _n: u64) {}
    #[inline(always)]
    fn acc<T: Scalar>(&mut self, _n: u64) {}
}

/// Raw arithmetic events recorded during one instrumented forward pass.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct ForwardEvents {
    pub real_mul: u64,
    pub real_acc: u64,
    pub cplx_mul: u64,
    pub cplx_acc: u64,
}

impl ForwardEvents {
    pub fn merge(self, other: ForwardEvents) -> ForwardEvents {
        ForwardEvents {
            real_mul: self.real_mul + other.real_mul,
            real_acc: self.real_acc + other.real_acc,
            cplx_mul: self.cplx_mul + other.cplx_mul,
            cplx_acc: self.cplx_acc + other.cplx_acc,
        }
    }

    /// Convert events to real-operation counts under the accounting
    /// convention of the given architecture's closed forms.
    pub fn into_counts(self, kind: ArchKind) -> FlopCounts {
        let cplx_acc_adds = match kind {
            ArchKind::Tlms2r | ArchKind::Ttlms => 2,
            ArchKind::Ctlms => 4,
        };
        FlopCounts {
            mult: self.real_mul + 4 * self.cplx_mul,
            add: self.real_acc + 2 * self.cplx_mul + cplx_acc_adds * self.cplx_acc,
            div: 0,
        }
    }
}

impl FlopTally for ForwardEvents {
    #[inline(always)]
    fn mul<T: Scalar>(&mut self, n: u64) {
        if T::IS_COMPLEX {
            self.cplx_mul += n;
        } else {
            self.real_mul += n;
        }
    }

    #[inline(always)]
    fn acc<T: Scalar>(&mut self, n: u64) {
        if T::IS_COMPLEX {
            self.cplx_acc += n;
        } else {
            self.real_acc += n;
        }
    }
}

/// Real multiplication/addition/division counts for one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlopCounts {
    pub mult: u64,
    pub add: u64,
    pub div: u64,
}

/// Forward (estimation) and backward (update) counts per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArchComplexity {
    pub forward: FlopCounts,
    pub backward: FlopCounts,
}

/// Evaluate the closed-form per-sample operation counts.
///
/// `i_dim` is the common mode size `I_m` (all modes equal).
pub fn complexity_estimate(kind: ArchKind, p: u64, r: u64, m: u64, i_dim: u64) -> ArchComplexity {
    let (p, r, m, i) = (p as i64, r as i64, m as i64, i_dim as i64);
    let (fwd, back) = match kind {
        ArchKind::Tlms2r => (
            (2 * p + 2 * r * (m - 1), 2 * p + 2 * r - 4, 0),
            (
                2 * m * r * (p * (m - 1) + i) + 4 * p * (m + 1) + 2,
                4 * p + 2 * m * r * i * (p + 1),
                2 + 2 * m,
            ),
        ),
        ArchKind::Ttlms => (
            (4 * p + 2 * r * (m - 1), 4 * p + 2 * r - 4, 0),
            (
                2 * m * r * (p * (m - 1) + i) + 4 * p * (m + 2) + 4,
                12 * p + 2 * m * r * i * (p + 1) + 2,
                1 + 2 * m,
            ),
        ),
        ArchKind::Ctlms => (
            (4 * p + 4 * r * (m - 1), 6 * p + 2 * r * (m + 1) - 8, 0),
            (
                4 * m * r * (p * (m - 1) + i) + 8 * p * (m + 1) + 4,
                2 * m * r * (p * (m - 1) + 2 * i * (p + 1)) + 4 * p * (m + 1) + 2,
                1 + m,
            ),
        ),
    };
    let counts = |(mult, add, div): (i64, i64, i64)| FlopCounts {
        mult: mult.max(0) as u64,
        add: add.max(0) as u64,
        div: div.max(0) as u64,
    };
    ArchComplexity {
        forward: counts(fwd),
        backward: counts(back),
    }
}

/// Run one instrumented forward pass per sample on a freshly built
/// filter and report the per-sample counts. All samples of an
/// architecture execute the same arithmetic, which the caller can rely
/// on; this function asserts it over `samples` steps.
pub fn measure_forward(
    kind: ArchKind,
    p: usize,
    rank: usize,
    n_bins: usize,
    samples: usize,
    seed: u64,
) -> Result<FlopCounts> {
    let delta_x = 4.0 / n_bins as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut step_events = Vec::with_capacity(samples);

    macro_rules! drive {
        ($filter:expr) => {{
            let mut filter = $filter;
            for _ in 0..samples.max(1) {
                let x = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
                step_events.push(filter.forward_counted(x)?);
            }
        }};
    }

    match kind {
        ArchKind::Tlms2r => drive!(Tlms2r::new(
            p, rank, n_bins, delta_x, 0.009, 0.009, 1e-12, seed
        )?),
        ArchKind::Ttlms => drive!(Ttlms::new(
            p, rank, n_bins, delta_x, 0.009, 0.005, 1e-12, seed
        )?),
        ArchKind::Ctlms => drive!(Ctlms::new(
            p, rank, n_bins, delta_x, 0.075, 0.009, 1e-12, seed
        )?),
    }

    let first = step_events[0];
    debug_assert!(
        step_events.iter().all(|e| *e == first),
        "forward event counts varied between samples"
    );
    Ok(first.into_counts(kind))
}
