//! Benchmark CLI: Monte-Carlo experiments, complexity reports and
//! gradient checks for the tensor-assisted adaptive estimators.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cx_tlms::arch::ArchKind;
use cx_tlms::bench::{
    run_experiment, write_gnuplot_script, ExperimentConfig,
};
use cx_tlms::complexity::{complexity_estimate, measure_forward, FlopCounts};
use cx_tlms::error::Error;
use cx_tlms::oracle::{gradcheck_suite, CheckArch};

const SEED_ENV: &str = "CX_TLMS_SEED";

#[derive(Parser)]
#[command(
    name = "cx-tlms",
    version,
    about = "Complex-valued adaptive system identification benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte-Carlo identification experiment and emit CSV
    /// learning curves.
    Run(RunArgs),
    /// Print per-sample operation counts for all architectures.
    Complexity(ComplexityArgs),
    /// Verify every tensor update rule against finite differences.
    Gradcheck(GradcheckArgs),
    /// Emit a gnuplot script that plots curves.csv.
    PlotScript(PlotScriptArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArchChoice {
    Tlms2r,
    Ttlms,
    Ctlms,
    All,
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value config file; command-line flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed (fallback: the CX_TLMS_SEED environment variable).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for parallel runs (default: all cores).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Architecture selection; repeatable.
    #[arg(long, value_enum, value_name = "ARCH")]
    arch: Vec<ArchChoice>,
    /// Output directory for CSV files.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Dump factor matrices and weights of the first run's final state.
    #[arg(long)]
    dump_state: bool,
    /// Samples per run.
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    /// Number of Monte-Carlo runs.
    #[arg(long, value_name = "L")]
    runs: Option<usize>,
    /// SNR of the desired signal over the observation noise in dB
    /// ("inf" disables the noise).
    #[arg(long, value_name = "DB")]
    snr: Option<f64>,
    /// Moving-average window for the emitted curves (0 = raw).
    #[arg(long, value_name = "N")]
    smooth: Option<usize>,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Filter order P.
    #[arg(long, default_value_t = 16)]
    p: u64,
    /// Tensor rank R.
    #[arg(long, default_value_t = 10)]
    r: u64,
    /// Tensor order M.
    #[arg(long, default_value_t = 2)]
    m: u64,
    /// Mode size I_m.
    #[arg(long, default_value_t = 32)]
    i: u64,
    /// Also run instrumented forward passes and print measured counts.
    #[arg(long)]
    counted: bool,
}

#[derive(Args)]
struct GradcheckArgs {
    /// Random states per architecture.
    #[arg(long, default_value_t = 100)]
    cases: usize,
    /// Seed for state generation.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PlotScriptArgs {
    /// Directory holding curves.csv; plot.gp is written next to it.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Complexity(args) => cmd_complexity(args),
        Command::Gradcheck(args) => cmd_gradcheck(args),
        Command::PlotScript(args) => cmd_plot_script(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NumericAbort { .. } => 2,
        Error::Io(_) => 3,
        _ => 1,
    }
}

fn seed_from_env() -> Option<u64> {
    std::env::var(SEED_ENV).ok().and_then(|v| v.parse().ok())
}

fn resolve_archs(choices: &[ArchChoice]) -> Vec<ArchKind> {
    if choices.is_empty() || choices.contains(&ArchChoice::All) {
        return ArchKind::ALL.to_vec();
    }
    let mut out = Vec::new();
    for c in choices {
        let kind = match c {
            ArchChoice::Tlms2r => ArchKind::Tlms2r,
            ArchChoice::Ttlms => ArchKind::Ttlms,
            ArchChoice::Ctlms => ArchKind::Ctlms,
            ArchChoice::All => unreachable!(),
        };
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    out
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_ini_file(path)?,
        None => ExperimentConfig::default(),
    };

    // flags override the file; the environment seed fills in when no
    // --seed was given
    if let Some(seed) = args.seed.or_else(seed_from_env) {
        cfg.scenario.master_seed = seed;
    }
    if let Some(jobs) = args.jobs {
        cfg.jobs = jobs;
    }
    if !args.arch.is_empty() {
        cfg.architectures = resolve_archs(&args.arch);
    }
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    if args.dump_state {
        cfg.dump_state = true;
    }
    if let Some(n) = args.samples {
        cfg.scenario.n_samples = n;
    }
    if let Some(l) = args.runs {
        cfg.scenario.n_runs = l;
    }
    if let Some(snr) = args.snr {
        cfg.scenario.snr_db = snr;
    }
    if let Some(w) = args.smooth {
        cfg.smoothing_window = w;
    }

    let result = run_experiment(&cfg)?;
    println!(
        "wrote {} and {}",
        cfg.out_dir.join("curves.csv").display(),
        cfg.out_dir.join("summary.csv").display()
    );
    for &kind in &cfg.architectures {
        let ss = result.steady_state_db(kind).unwrap_or(f64::NAN);
        println!("{kind}: steady-state MSE {ss:.2} dB");
    }
    if result.stability_violations > 0 {
        println!(
            "warning: {} stability-bound violations",
            result.stability_violations
        );
    }
    Ok(())
}

fn print_counts(label: &str, c: FlopCounts) {
    println!("  {label:<28} mult {:>8}  add {:>8}  div {:>4}", c.mult, c.add, c.div);
}

fn cmd_complexity(args: ComplexityArgs) -> Result<(), Error> {
    println!(
        "per-sample operation counts at P={}, R={}, M={}, I_m={}",
        args.p, args.r, args.m, args.i
    );
    for kind in ArchKind::ALL {
        let est = complexity_estimate(kind, args.p, args.r, args.m, args.i);
        println!("{kind}:");
        print_counts("forward (closed form)", est.forward);
        print_counts("backward (closed form)", est.backward);
        if args.counted {
            if args.m != 2 {
                return Err(Error::Config(
                    "counting mode drives the order-2 architectures".into(),
                ));
            }
            let n_bins = if args.i.is_multiple_of(2) {
                args.i
            } else {
                args.i + 1
            } as usize;
            let measured = measure_forward(
                kind,
                args.p as usize,
                args.r as usize,
                n_bins,
                4,
                seed_from_env().unwrap_or(1),
            )?;
            print_counts("forward (instrumented)", measured);
            let matches = measured == est.forward;
            println!(
                "  instrumented forward {} the closed form",
                if matches { "matches" } else { "DIFFERS FROM" }
            );
        }
    }
    Ok(())
}

fn cmd_gradcheck(args: GradcheckArgs) -> Result<(), Error> {
    let seed = args.seed.or_else(seed_from_env).unwrap_or(1);
    let tolerance = 1e-6;
    let mut failed = false;
    for arch in CheckArch::ALL {
        let report = gradcheck_suite(arch, args.cases, seed)?;
        let ok = report.max_rel_error <= tolerance;
        failed |= !ok;
        println!(
            "{}: {} cases, max relative error {:.3e} (h = {:.1e}) [{}]",
            arch.name(),
            args.cases,
            report.max_rel_error,
            report.step_h,
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            println!(
                "  worst matrix {} entry {:?}",
                report.worst_matrix, report.worst_entry
            );
        }
    }
    if failed {
        return Err(Error::NumericAbort {
            arch: "gradcheck".into(),
            run: 0,
            sample: 0,
        });
    }
    Ok(())
}

fn cmd_plot_script(args: PlotScriptArgs) -> Result<(), Error> {
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("plot.gp");
    write_gnuplot_script(&path, &ArchKind::ALL)?;
    println!("wrote {}", path.display());
    Ok(())
}
