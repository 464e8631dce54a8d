//! Monte-Carlo execution: independent seeded runs, shared signals per
//! run across architectures, aggregation, stability accounting.

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::output;
use crate::arch::{AnyArch, ArchKind, Ctlms, StateMatrix, Tlms2r, Ttlms};
use crate::error::{Error, Result};
use crate::scenario::{
    db_floored, derive_seed, gen_colored_noise, simulate_target, synth_duplexer, ScenarioConfig,
};

/// Per-architecture series of one run.
#[derive(Debug, Clone)]
pub struct ArchSeries {
    pub kind: ArchKind,
    /// `|d_n - y_hat_n|^2` per sample.
    pub sq_err: Vec<f64>,
    /// Mean of the final 10% of squared errors, in dB.
    pub final_mse_db: f64,
    /// Samples whose predicted contraction factor left `(0, 1)` while
    /// the S-matrix was nonzero. Zero for a healthy run.
    pub stability_violations: u64,
}

/// Full signal streams of one run, retained on request.
#[derive(Debug, Clone)]
pub struct RunSignals {
    pub desired: Vec<Complex64>,
    pub estimates: Vec<(ArchKind, Vec<Complex64>)>,
}

/// Outcome of one Monte-Carlo run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub run_index: usize,
    pub duplexer_seed: u64,
    pub series: Vec<ArchSeries>,
    pub signals: Option<RunSignals>,
    /// Final filter states (only collected when state dumps were
    /// requested for this run).
    pub state_dumps: Option<Vec<(ArchKind, Vec<StateMatrix>)>>,
}

/// Aggregated experiment outcome.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// Run-averaged squared error per architecture (linear domain).
    pub mse_linear: Vec<(ArchKind, Vec<f64>)>,
    /// Per-run summaries `(run, arch, final_mse_db)`.
    pub per_run_final: Vec<(usize, ArchKind, f64)>,
    /// Total stability violations over all runs and architectures.
    pub stability_violations: u64,
    /// Per-run results, in run order.
    pub runs: Vec<RunResult>,
}

impl ExperimentResult {
    /// Run-averaged MSE curve in dB for one architecture.
    pub fn mse_db(&self, kind: ArchKind) -> Option<Vec<f64>> {
        self.mse_linear
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, lin)| lin.iter().map(|&v| db_floored(v)).collect())
    }

    /// Mean of the final 10% of the aggregated linear MSE, in dB.
    pub fn steady_state_db(&self, kind: ArchKind) -> Option<f64> {
        self.mse_linear.iter().find(|(k, _)| *k == kind).map(|(_, lin)| {
            let tail = (lin.len() / 10).max(1);
            let mean = lin[lin.len() - tail..].iter().sum::<f64>() / tail as f64;
            db_floored(mean)
        })
    }
}

fn build_arch(kind: ArchKind, cfg: &ScenarioConfig, seed: u64) -> Result<AnyArch> {
    let (p, r, nb, dx, eps) = (
        cfg.filter_order,
        cfg.rank,
        cfg.n_bins,
        cfg.delta_x,
        cfg.epsilon,
    );
    let mu_t = cfg.mu_tensor.get(kind);
    let mu_l = cfg.mu_lms.get(kind);
    Ok(match kind {
        ArchKind::Tlms2r => AnyArch::Tlms2r(Tlms2r::new(p, r, nb, dx, mu_t, mu_l, eps, seed)?),
        ArchKind::Ttlms => AnyArch::Ttlms(Ttlms::new(p, r, nb, dx, mu_t, mu_l, eps, seed)?),
        ArchKind::Ctlms => AnyArch::Ctlms(Ctlms::new(p, r, nb, dx, mu_t, mu_l, eps, seed)?),
    })
}

/// Execute one run: fresh duplexer, excitation and noise seeds, all
/// selected architectures driven over the same `(x, y)` streams and
/// scored against the noiseless `d`.
pub fn run_single(
    cfg: &ScenarioConfig,
    archs: &[ArchKind],
    run_index: usize,
    keep_signals: bool,
    want_states: bool,
) -> Result<RunResult> {
    let l = run_index as u64;
    let duplexer_seed = derive_seed(cfg.master_seed, "duplexer", l);
    let excitation_seed = derive_seed(cfg.master_seed, "excitation", l);
    let noise_seed = derive_seed(cfg.master_seed, "noise", l);

    let x = gen_colored_noise(cfg.ar_coeff, cfg.n_samples, excitation_seed)?;
    let duplexer = synth_duplexer(cfg.filter_order, duplexer_seed)?;
    let (d, y) = simulate_target(&x, &duplexer, cfg.snr_db, noise_seed);

    let mut series = Vec::with_capacity(archs.len());
    let mut estimates: Vec<(ArchKind, Vec<Complex64>)> = Vec::new();
    let mut state_dumps: Vec<(ArchKind, Vec<StateMatrix>)> = Vec::new();

    for &kind in archs {
        let init_seed = derive_seed(cfg.master_seed, kind.name(), l);
        let mut filter = build_arch(kind, cfg, init_seed)?;
        let mut sq_err = Vec::with_capacity(cfg.n_samples);
        let mut est = if keep_signals {
            Vec::with_capacity(cfg.n_samples)
        } else {
            Vec::new()
        };
        let mut violations = 0u64;

        for n in 0..cfg.n_samples {
            let out = filter.step(x[n], y[n]).map_err(|_| Error::NumericAbort {
                arch: kind.name().into(),
                run: run_index,
                sample: n,
            })?;
            let err_ok = out.error.re.is_finite() && out.error.im.is_finite();
            let diag_ok = out.modes.iter().all(|m| m.is_finite());
            if !err_ok || !diag_ok {
                return Err(Error::NumericAbort {
                    arch: kind.name().into(),
                    run: run_index,
                    sample: n,
                });
            }
            for m in &out.modes {
                if m.s_frob_sq > 0.0 && m.contraction_factor() >= 1.0 {
                    violations += 1;
                }
            }
            sq_err.push((d[n] - out.estimate).norm_sqr());
            if keep_signals {
                est.push(out.estimate);
            }
        }

        if !filter.is_all_finite() {
            return Err(Error::NumericAbort {
                arch: kind.name().into(),
                run: run_index,
                sample: cfg.n_samples,
            });
        }
        if want_states {
            state_dumps.push((kind, filter.state_matrices()));
        }
        let tail = (cfg.n_samples / 10).max(1);
        let final_mse =
            sq_err[cfg.n_samples - tail..].iter().sum::<f64>() / tail as f64;
        series.push(ArchSeries {
            kind,
            sq_err,
            final_mse_db: db_floored(final_mse),
            stability_violations: violations,
        });
        if keep_signals {
            estimates.push((kind, est));
        }
    }

    Ok(RunResult {
        run_index,
        duplexer_seed,
        series,
        signals: keep_signals.then_some(RunSignals {
            desired: d,
            estimates,
        }),
        state_dumps: (want_states && !state_dumps.is_empty()).then_some(state_dumps),
    })
}

/// Execute all runs (in parallel when allowed) and aggregate, without
/// touching the filesystem.
pub fn run_all(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let scenario = &cfg.scenario;
    let indices: Vec<usize> = (0..scenario.n_runs).collect();

    let execute = || -> Result<Vec<RunResult>> {
        indices
            .par_iter()
            .map(|&l| {
                run_single(
                    scenario,
                    &cfg.architectures,
                    l,
                    cfg.keep_signals,
                    cfg.dump_state && l == 0,
                )
            })
            .collect()
    };

    let runs = if cfg.jobs == 0 {
        execute()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
        pool.install(execute)?
    };

    // sequential aggregation in run order keeps output byte-stable
    let n = scenario.n_samples;
    let l = scenario.n_runs as f64;
    let mut mse_linear: Vec<(ArchKind, Vec<f64>)> = cfg
        .architectures
        .iter()
        .map(|&k| (k, vec![0.0; n]))
        .collect();
    let mut per_run_final = Vec::with_capacity(runs.len() * cfg.architectures.len());
    let mut violations = 0u64;
    for run in &runs {
        for s in &run.series {
            let slot = mse_linear
                .iter_mut()
                .find(|(k, _)| *k == s.kind)
                .expect("selected architecture");
            for (acc, &v) in slot.1.iter_mut().zip(&s.sq_err) {
                *acc += v / l;
            }
            per_run_final.push((run.run_index, s.kind, s.final_mse_db));
            violations += s.stability_violations;
        }
    }

    Ok(ExperimentResult {
        mse_linear,
        per_run_final,
        stability_violations: violations,
        runs,
    })
}

/// Run the experiment and write `curves.csv`, `summary.csv` and any
/// requested state dumps into the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let result = run_all(cfg)?;
    std::fs::create_dir_all(&cfg.out_dir)?;

    let curves: Vec<(ArchKind, Vec<f64>)> = cfg
        .architectures
        .iter()
        .map(|&k| {
            let db = result.mse_db(k).expect("curve for selected arch");
            (k, crate::scenario::moving_average(&db, cfg.smoothing_window))
        })
        .collect();
    output::write_curves_csv(&cfg.out_dir.join("curves.csv"), &curves)?;
    output::write_summary_csv(&cfg.out_dir.join("summary.csv"), &result.per_run_final)?;

    if cfg.dump_state {
        let state_dir = cfg.out_dir.join("state");
        std::fs::create_dir_all(&state_dir)?;
        for run in &result.runs {
            if let Some(dumps) = &run.state_dumps {
                for (kind, mats) in dumps {
                    for mat in mats {
                        let path = state_dir.join(format!("{}_{}.csv", kind.name(), mat.name));
                        output::write_state_dump(&path, mat)?;
                    }
                }
            }
        }
    }
    Ok(result)
}
