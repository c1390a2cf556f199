use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use latcub::kernel::load_kernel_spec;
use latcub::Result;
use latcub_cli::config::{OnedSettings, PdeUqSettings, Profile, RawConfig, Wce2dSettings};
use latcub_cli::runs::{
    run_oned_study, run_pde_uq_study, run_wce, run_wce2d_study, run_weights, PointRequest,
    StudyOutputs,
};

#[derive(Parser)]
#[command(
    name = "latcub",
    version,
    about = "Kernel cubature studies on rank-1 lattice point sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StudyArgs {
    /// Plain-text `key = value` experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for tables and plot data.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Run-size preset; individual keys in --config still win.
    #[arg(long, value_enum, default_value_t = Profile::Ci)]
    profile: Profile,
}

#[derive(Args)]
struct PointArgs {
    /// Generating-vector file (defaults to the embedded 100-dimensional
    /// vector).
    #[arg(long)]
    gv: Option<PathBuf>,
    /// Number of lattice points.
    #[arg(long)]
    n: u64,
    /// Random shift drawn from this seed (omit for the unshifted lattice).
    #[arg(long)]
    shift_seed: Option<u64>,
    /// Apply the tent transform after shifting.
    #[arg(long)]
    tent: bool,
}

#[derive(Subcommand)]
enum Command {
    /// One-dimensional rate-doubling study with closed-form oracles.
    Oned(StudyArgs),
    /// Worst-case errors of shifted tent-transformed 2D lattice rules.
    Wce2d {
        #[command(flatten)]
        study: StudyArgs,
        /// Generating-vector file (defaults to the embedded 2D vector).
        #[arg(long)]
        gv: Option<PathBuf>,
    },
    /// Parametric diffusion uncertainty study.
    PdeUq {
        #[command(flatten)]
        study: StudyArgs,
        /// Generating-vector file (defaults to the embedded 100-dimensional
        /// vector).
        #[arg(long)]
        gv: Option<PathBuf>,
    },
    /// Solve optimal cubature weights for a kernel spec and dump them.
    Weights {
        /// Kernel description file.
        #[arg(long)]
        kernel: PathBuf,
        #[command(flatten)]
        points: PointArgs,
        /// Weights output path; `.bin` selects the binary dump format.
        #[arg(long)]
        out: PathBuf,
        /// Optional Gram-matrix binary dump.
        #[arg(long)]
        gram: Option<PathBuf>,
    },
    /// One-shot worst-case-error evaluation.
    Wce {
        /// Kernel description file.
        #[arg(long)]
        kernel: PathBuf,
        #[command(flatten)]
        points: PointArgs,
        /// Evaluate these stored weights instead of solving for the optimum.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

fn load_raw(config: Option<&PathBuf>) -> Result<RawConfig> {
    match config {
        Some(path) => RawConfig::load(path),
        None => Ok(RawConfig::default()),
    }
}

fn report_outputs(out: &StudyOutputs) {
    for line in &out.summary {
        println!("{line}");
    }
    for file in &out.files {
        println!("wrote {}", file.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Oned(study) => {
            let raw = load_raw(study.config.as_ref())?;
            let settings = OnedSettings::resolve(study.profile, raw, study.seed)?;
            report_outputs(&run_oned_study(&settings, &study.out)?);
        }
        Command::Wce2d { study, gv } => {
            let raw = load_raw(study.config.as_ref())?;
            let settings = Wce2dSettings::resolve(study.profile, raw, study.seed)?;
            report_outputs(&run_wce2d_study(&settings, gv.as_deref(), &study.out)?);
        }
        Command::PdeUq { study, gv } => {
            let raw = load_raw(study.config.as_ref())?;
            let settings = PdeUqSettings::resolve(study.profile, raw, study.seed)?;
            report_outputs(&run_pde_uq_study(&settings, gv.as_deref(), &study.out)?);
        }
        Command::Weights {
            kernel,
            points,
            out,
            gram,
        } => {
            let spec = load_kernel_spec(&kernel)?;
            let req = PointRequest {
                gv_path: points.gv.as_deref(),
                n: points.n,
                s: spec.dimension(),
                shift_seed: points.shift_seed,
                tent: points.tent,
            };
            let outcome = run_weights(&spec, &req, &out, gram.as_deref())?;
            println!("n {}", outcome.n);
            println!("wce_optimal {:.16e}", outcome.wce_optimal);
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
        }
        Command::Wce {
            kernel,
            points,
            weights,
        } => {
            let spec = load_kernel_spec(&kernel)?;
            let req = PointRequest {
                gv_path: points.gv.as_deref(),
                n: points.n,
                s: spec.dimension(),
                shift_seed: points.shift_seed,
                tent: points.tent,
            };
            let outcome = run_wce(&spec, &req, weights.as_deref())?;
            println!("n {}", outcome.n);
            println!("wce_equal {:.16e}", outcome.wce_equal);
            if let Some(v) = outcome.wce_optimal {
                println!("wce_optimal {v:.16e}");
            }
            if let Some(v) = outcome.wce_at_weights {
                println!("wce_at_weights {v:.16e}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
