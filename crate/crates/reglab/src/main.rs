use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reglab::harness::{parse_spec, run, ExperimentKind, HarnessError};

/// Seeded experiment runner for regular-graph eigenvector statistics.
///
/// Each subcommand runs one experiment kind described by a key=value
/// config file and writes CSV/JSON/SVG artifacts plus a manifest.json
/// into the output directory. Artifacts are byte-identical for a given
/// config regardless of --workers. LAB_DENSE_LIMIT overrides the dense
/// eigensolver cutoff.
#[derive(Parser)]
#[command(name = "reglab", version, about, verbatim_doc_comment)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key=value experiment config
    #[arg(long)]
    config: PathBuf,
    /// worker threads (0 = all cores)
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// output directory (created if absent)
    #[arg(long)]
    output: PathBuf,
    /// override the config's seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw graphs and record their edge lists
    Sample(Common),
    /// Top of the spectrum per graph: lambda2, lambda3, degeneracy
    Spectrum(Common),
    /// Overlap ensemble with KS / cumulant / discrepancy statistics
    Clt(Common),
    /// Resolvent quadratic-form scan over an (N, d) grid
    Locallaw(Common),
    /// GOE coupling error profiles and their argmin distribution
    Interpolate(Common),
    /// Per-edge switching derivatives of the overlap
    Malliavin(Common),
    /// KS-vs-N scaling fits across cells
    Scaling(Common),
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Sample(_) => ExperimentKind::Sample,
            Command::Spectrum(_) => ExperimentKind::Spectrum,
            Command::Clt(_) => ExperimentKind::Clt,
            Command::Locallaw(_) => ExperimentKind::Locallaw,
            Command::Interpolate(_) => ExperimentKind::Interpolate,
            Command::Malliavin(_) => ExperimentKind::Malliavin,
            Command::Scaling(_) => ExperimentKind::Scaling,
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Sample(c)
            | Command::Spectrum(c)
            | Command::Clt(c)
            | Command::Locallaw(c)
            | Command::Interpolate(c)
            | Command::Malliavin(c)
            | Command::Scaling(c) => c,
        }
    }
}

fn execute(cli: &Cli) -> Result<(), HarnessError> {
    let kind = cli.command.kind();
    let common = cli.command.common();
    let text = std::fs::read_to_string(&common.config)?;
    let mut spec = parse_spec(&text)?;
    if spec.experiment != kind {
        return Err(HarnessError::Validation(format!(
            "config declares experiment={} but the {} subcommand was invoked",
            spec.experiment, kind
        )));
    }
    if let Some(seed) = common.seed {
        spec.base_seed = seed;
    }
    let manifest = run(&spec, common.workers, &common.output)?;
    println!(
        "{} n={:?} d={:?} M={} seed={} -> {} files in {}",
        kind,
        spec.n_list,
        spec.d_list,
        spec.m,
        spec.base_seed,
        manifest.files.len(),
        common.output.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let kind = match err.exit_code() {
                2 => "validation",
                3 => "numeric",
                _ => "io",
            };
            eprintln!("error: kind={kind} {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
