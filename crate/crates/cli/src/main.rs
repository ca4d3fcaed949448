use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cylspec::plot::render_svg;
use cylspec::{run_study, RunOptions, StudyConfig, StudyKind};

/// Finite-element eigenvalue studies on expanding cylinders.
#[derive(Parser, Debug)]
#[command(name = "cylspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// μ₁ and the coupling indicator on the cross-section, over mesh refinements.
    CrossSection(StudyArgs),
    /// Truncated half-strip values Z_L for chosen directions (and slabs for m = 2).
    Reduced(StudyArgs),
    /// Z^ν over the unit sphere of directions.
    Sweep(StudyArgs),
    /// Lowest eigenvalues on Ω_ℓ for each scale.
    Full(StudyArgs),
    /// λ_ℓ against ℓ together with μ₁ and the sweep minimum.
    Convergence(StudyArgs),
    /// Eigenfunction mass over sub-cylinders.
    Decay(StudyArgs),
    /// Rayleigh quotients of boundary-concentrated test functions.
    UpperBound(StudyArgs),
    /// All-Dirichlet eigenvalues against ℓ.
    DirichletBracket(StudyArgs),
}

#[derive(Args, Debug)]
struct StudyArgs {
    /// Study configuration (TOML).
    config: PathBuf,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solver seed (overrides solver.seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Target mesh size (overrides mesh.target_h).
    #[arg(long)]
    target_h: Option<f64>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
    /// Worker threads.
    #[arg(long, env = "CYLSPEC_JOBS")]
    jobs: Option<usize>,
    /// Record failed cells as NaN rows instead of stopping.
    #[arg(long)]
    keep_going: bool,
    /// Also write meshes and matrices of full-cylinder solves.
    #[arg(long)]
    dump_mesh: bool,
}

impl Command {
    fn split(self) -> (StudyKind, StudyArgs) {
        match self {
            Command::CrossSection(a) => (StudyKind::CrossSection, a),
            Command::Reduced(a) => (StudyKind::Reduced, a),
            Command::Sweep(a) => (StudyKind::Sweep, a),
            Command::Full(a) => (StudyKind::Full, a),
            Command::Convergence(a) => (StudyKind::Convergence, a),
            Command::Decay(a) => (StudyKind::Decay, a),
            Command::UpperBound(a) => (StudyKind::UpperBound, a),
            Command::DirichletBracket(a) => (StudyKind::DirichletBracket, a),
        }
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

fn write_outputs(dir: &Path, record: &cylspec::StudyRecord) -> std::io::Result<Option<String>> {
    fs::create_dir_all(dir)?;
    record.write_csv(fs::File::create(dir.join("results.csv"))?)?;
    record.write_json(fs::File::create(dir.join("results.json"))?)?;
    match render_svg(record) {
        Ok(svg) => {
            fs::write(dir.join("plot.svg"), svg)?;
            Ok(None)
        }
        Err(e) => Ok(Some(e.to_string())),
    }
}

fn main() -> ExitCode {
    let (kind, args) = Cli::parse().command.split();
    let mut cfg = match StudyConfig::load(&args.config) {
        Ok((c, _)) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(s) = args.seed {
        cfg.solver.seed = s;
    }
    if let Some(h) = args.target_h {
        cfg.mesh.target_h = h;
    }
    if args.quiet {
        cfg.output.quiet = true;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("cylspec-out"));
    let opts = RunOptions {
        keep_going: args.keep_going,
        dump_dir: args.dump_mesh.then(|| out.join("dumps")),
        jobs: args.jobs,
    };
    let outcome = match run_study(&cfg, kind, &opts) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match write_outputs(&out, &outcome.record) {
        Ok(Some(plot_err)) => eprintln!("warning: no plot written: {plot_err}"),
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: cannot write results to {}: {e}", out.display());
            return ExitCode::from(EXIT_SOLVER);
        }
    }
    let failed = outcome.record.any_failed();
    if failed {
        eprintln!("{}", outcome.summary);
    } else if !cfg.output.quiet {
        println!("{}", outcome.summary);
        println!("results written to {}", out.display());
    }
    if failed {
        ExitCode::from(EXIT_SOLVER)
    } else {
        ExitCode::SUCCESS
    }
}
