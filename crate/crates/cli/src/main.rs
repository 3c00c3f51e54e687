//! `cmc-index`: generate zoo surfaces, analyze meshes, compute harmonic
//! bases and index estimates, and run the verification suite.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0  | success; for `index`/`report` the bound holds or does not apply, for `verify` every check passed |
//! | 1  | `index`/`report`: bound violated; `verify`: a check failed |
//! | 2  | command-line usage error |
//! | 10 | parse error (mesh file or JSON) |
//! | 11 | non-manifold mesh |
//! | 12 | non-orientable mesh |
//! | 13 | mesh has boundary where a closed one is required |
//! | 14 | disconnected mesh |
//! | 15 | degenerate face |
//! | 16 | zero normal |
//! | 17 | non-unit vector |
//! | 18 | normal not tangent to the sphere |
//! | 19 | singular lattice |
//! | 20 | parameter out of domain |
//! | 21 | too few neighbour directions for fitting |
//! | 22 | harmonic kernel dimension mismatch |
//! | 23 | field not harmonic |
//! | 24 | solver failure |
//! | 25 | shifted operator not positive definite |
//! | 26 | cut-off not compactly supported |
//! | 27 | unknown generator |
//! | 28 | bad parameter or invalid config |
//! | 29 | I/O error |

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cmc_index::{Error, Result};

use commands::{Verdict, GENERATORS};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "cmc-index", version, about = "Index estimates for the Gauss map of CMC surfaces")]
struct Cli {
    /// JSON config file; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a zoo surface and write it as a JSON mesh.
    Zoo {
        /// One of: sphere_r3, geodesic_sphere_s3, flat_torus_s3,
        /// flat_torus_t3, clifford_torus, cylinder_r3, perturbed_sphere_r3.
        name: Option<String>,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Topology, curvature and residual summary of a surface.
    Analyze(RunConfig),
    /// L2-orthonormal basis of harmonic 1-forms.
    Harmonic(RunConfig),
    /// Index estimate on the harmonic span, optionally with the full spectrum.
    Index(RunConfig),
    /// Invariant suite over the analytic zoo; prints a pass/fail matrix.
    Verify(RunConfig),
    /// Analysis and index report in one document.
    Report(RunConfig),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 10,
        Error::NonManifold(_) => 11,
        Error::NonOrientable => 12,
        Error::HasBoundary(_) => 13,
        Error::Disconnected(_) => 14,
        Error::DegenerateFace { .. } => 15,
        Error::ZeroNormal(_) => 16,
        Error::NotUnit(_) => 17,
        Error::NotTangent(_) => 18,
        Error::SingularLattice => 19,
        Error::Domain(_) => 20,
        Error::InsufficientNeighbors { .. } => 21,
        Error::KernelDimensionMismatch { .. } => 22,
        Error::NotHarmonic(_) => 23,
        Error::SolverFailure(_) => 24,
        Error::NotDefinite(_) => 25,
        Error::NotCompactlySupported(_) => 26,
        Error::UnknownGenerator(_) => 27,
        Error::BadParameter(_) => 28,
        Error::Io(_) => 29,
    }
}

fn run(cli: Cli) -> Result<Verdict> {
    let (name, flags, mut positional) = match cli.command {
        Command::Zoo { name, run } => ("zoo", run, name),
        Command::Analyze(r) => ("analyze", r, None),
        Command::Harmonic(r) => ("harmonic", r, None),
        Command::Index(r) => ("index", r, None),
        Command::Verify(r) => ("verify", r, None),
        Command::Report(r) => ("report", r, None),
    };
    let file = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let mut cfg = flags.over(file).with_command(name)?;
    if let Some(g) = positional.take() {
        cfg.generator = Some(g);
    }
    cfg.validate()?;
    if let Some(g) = &cfg.generator {
        if !GENERATORS.contains(&g.as_str()) {
            return Err(Error::UnknownGenerator(g.clone()));
        }
    }
    match cfg.threads {
        Some(1) => faer::set_global_parallelism(faer::Par::Seq),
        Some(n) => faer::set_global_parallelism(faer::Par::rayon(n)),
        None => {}
    }
    match name {
        "zoo" => commands::zoo(&cfg),
        "analyze" => commands::analyze(&cfg),
        "harmonic" => commands::harmonic(&cfg),
        "index" => commands::index(&cfg),
        "verify" => commands::verify(&cfg),
        _ => commands::report(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
