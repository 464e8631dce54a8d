//! Dual-pipeline estimator: one real baseline per signal path.
//!
//! The complex input is split into its real composite, discretized once,
//! and the shared index vector drives two fully independent [`RealTlms`]
//! pipelines — the real path learns `Re{y}`, the imaginary path
//! `Im{y}`. The trajectory is bit-identical to running the two baselines
//! by hand on the shared index stream.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{c2r_split, ensure_finite_complex, ArchKind, PathLabel, RealTlms, StateMatrix, StepOutput};
use crate::complexity::ForwardEvents;
use crate::error::{Error, Result};
use crate::lms::LmsState;
use crate::tensor::{CpdTensor, Discretizer, IndexVector};

#[derive(Debug, Clone)]
pub struct Tlms2r {
    re_path: RealTlms,
    im_path: RealTlms,
    disc: Discretizer,
}

impl Tlms2r {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        filter_order: usize,
        rank: usize,
        n_bins: usize,
        delta_x: f64,
        mu_tensor: f64,
        mu_lms: f64,
        epsilon: f64,
        seed: u64,
    ) -> Result<Self> {
        let disc = Discretizer::new(delta_x, n_bins)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = [n_bins, n_bins];
        let make_path = |rng: &mut ChaCha8Rng| -> Result<RealTlms> {
            let tensor = CpdTensor::random_uniform(&dims, rank, rng)?;
            let lms = LmsState::new(filter_order, mu_lms, epsilon)?;
            RealTlms::from_parts(tensor, lms, mu_tensor, epsilon)
        };
        let re_path = make_path(&mut rng)?;
        let im_path = make_path(&mut rng)?;
        Self::from_parts(re_path, im_path, disc)
    }

    /// Assemble from two explicit baseline pipelines sharing a
    /// discretizer; tensor mode sizes must match the bin count.
    pub fn from_parts(re_path: RealTlms, im_path: RealTlms, disc: Discretizer) -> Result<Self> {
        for path in [&re_path, &im_path] {
            if path.tensor().order() != 2 {
                return Err(Error::Config(
                    "dual-path estimator requires order-2 tensors".into(),
                ));
            }
            if path.tensor().dims().iter().any(|&d| d != disc.n_bins()) {
                return Err(Error::Config(
                    "tensor mode sizes must equal the discretizer bin count".into(),
                ));
            }
        }
        Ok(Self {
            re_path,
            im_path,
            disc,
        })
    }

    pub fn kind(&self) -> ArchKind {
        ArchKind::Tlms2r
    }

    pub fn re_path(&self) -> &RealTlms {
        &self.re_path
    }

    pub fn im_path(&self) -> &RealTlms {
        &self.im_path
    }

    pub fn discretizer(&self) -> &Discretizer {
        &self.disc
    }

    fn index_of(&self, x: Complex64) -> Result<IndexVector> {
        let [re, im] = c2r_split(x);
        Ok(IndexVector::from_pair(
            self.disc.discretize(re)?,
            self.disc.discretize(im)?,
        ))
    }

    pub fn step(&mut self, x: Complex64, y: Complex64) -> Result<StepOutput> {
        ensure_finite_complex(x, "input sample")?;
        ensure_finite_complex(y, "desired sample")?;
        let idx = self.index_of(x)?;
        let out_re = self.re_path.step(&idx, y.re)?;
        let out_im = self.im_path.step(&idx, y.im)?;
        let estimate = Complex64::new(out_re.estimate, out_im.estimate);
        let mut modes = out_re.modes;
        modes.extend(out_im.modes.into_iter().map(|mut d| {
            d.path = PathLabel::Imag;
            d
        }));
        Ok(StepOutput {
            estimate,
            error: y - estimate,
            modes,
        })
    }

    /// Forward both paths without adapting, tallying arithmetic events.
    pub fn forward_counted(&mut self, x: Complex64) -> Result<ForwardEvents> {
        ensure_finite_complex(x, "input sample")?;
        let idx = self.index_of(x)?;
        let mut events = ForwardEvents::default();
        self.re_path.forward_tallied(&idx, &mut events)?;
        self.im_path.forward_tallied(&idx, &mut events)?;
        Ok(events)
    }

    pub fn is_all_finite(&self) -> bool {
        self.re_path.is_all_finite() && self.im_path.is_all_finite()
    }

    pub fn state_matrices(&self) -> Vec<StateMatrix> {
        let mut out = self.re_path.state_matrices_with_prefix("re_");
        out.extend(self.im_path.state_matrices_with_prefix("im_"));
        out
    }
}
