//! `covpom`: build covariant observables from JSON inputs, run their check
//! suites and write JSON reports.
//!
//! Exit status is 0 when every check passes, 1 when some check fails and 2
//! on unusable input.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use covpom::posmom::Kind;

use commands::{Context, Outcome};
use input::parse_pair;

#[derive(Parser)]
#[command(name = "covpom", version, about = "Covariant positive operator measures: build, evaluate, verify")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Number of grid points for continuous-variable commands.
    #[arg(long, global = true, default_value_t = 4096)]
    grid_n: usize,
    /// Half-width L of the position window [−L, L).
    #[arg(long, global = true, default_value_t = 20.0)]
    window: f64,
    /// Overrides the command's default tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Gauss–Legendre order per panel for phase-space integrals.
    #[arg(long, global = true, default_value_t = 16)]
    quad_order: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Arcs {
    /// Number of equal arcs.
    #[arg(long, conflicts_with = "edges")]
    arcs: Option<usize>,
    /// Arc endpoints from 0 to 2π, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    edges: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical phase observable on C^d.
    Phase {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        arcs: Arcs,
        /// Write the POM as JSON.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Canonical phase-difference observable on C^d ⊗ C^d.
    PhaseDiff {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        arcs: Arcs,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Covariant POM of a finite abelian group from {group, subgroup, rep, isometries?}.
    AbelianPom {
        #[arg(long)]
        spec: PathBuf,
        /// Auxiliary dimension for seeded random isometries.
        #[arg(long, default_value_t = 2)]
        aux_dim: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Smeared position and momentum observables.
    #[command(subcommand)]
    Smeared(SmearedCommand),
    /// Covariant phase-space observables on the grid.
    #[command(subcommand)]
    Phasespace(PhasespaceCommand),
    /// Weyl-covariant POM on Z_d × Z_d.
    FiniteWeyl {
        #[arg(long)]
        d: usize,
        /// Density operator JSON; a seeded random state when absent.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Verification suites on existing artifacts.
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Position,
    Momentum,
}

#[derive(Subcommand)]
enum SmearedCommand {
    /// Limit of resolution of E_ρ.
    Gamma {
        #[arg(long)]
        measure: PathBuf,
        /// Write the (alpha, window_max) profile.
        #[arg(long)]
        profile_csv: Option<PathBuf>,
    },
    /// Sharpness of E_ρ by its three characterisations.
    Sharpness {
        #[arg(long)]
        measure: PathBuf,
    },
    /// Outcome probabilities of consecutive cells in a grid state.
    Distribution {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value = "position")]
        kind: KindArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        edges: Vec<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PhasespaceCommand {
    /// Materialise a grid state as explicit JSON.
    State {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Position and momentum margins of G_T.
    Margins {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        rho_out: Option<PathBuf>,
        #[arg(long)]
        nu_out: Option<PathBuf>,
    },
    /// Sampled density h(q, p) of G_T in a probe state (ground state by default).
    Density {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        probe: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        stride: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// G_T of a rectangle, compressed to the first Hermite functions.
    Effect {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        q: (f64, f64),
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        p: (f64, f64),
        #[arg(long, default_value_t = 12)]
        basis: usize,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Hermiticity, positivity and normalisation of a POM.
    Pom {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Variance product of the margins of G_T in a state S.
    Uncertainty {
        /// The state S.
        #[arg(long)]
        state: PathBuf,
        /// The state T whose margins form the pair.
        #[arg(long)]
        pairs_from: PathBuf,
    },
    /// Product of the limits of resolution of the margins of G_T.
    Resolution {
        #[arg(long)]
        pairs_from: PathBuf,
    },
}

fn run(command: &Command, ctx: &Context) -> Outcome {
    match command {
        Command::Phase { d, arcs, emit } => commands::phase(ctx, *d, arcs.arcs, arcs.edges.clone(), emit),
        Command::PhaseDiff { d, arcs, emit } => commands::phase_diff(ctx, *d, arcs.arcs, arcs.edges.clone(), emit),
        Command::AbelianPom { spec, aux_dim, emit } => commands::abelian_pom(ctx, spec, *aux_dim, emit),
        Command::FiniteWeyl { d, state, emit } => commands::finite_weyl(ctx, *d, state, emit),
        Command::Smeared(c) => match c {
            SmearedCommand::Gamma { measure, profile_csv } => commands::smeared_gamma(ctx, measure, profile_csv),
            SmearedCommand::Sharpness { measure } => commands::smeared_sharpness(ctx, measure),
            SmearedCommand::Distribution { measure, state, kind, edges, csv } => {
                let kind = match kind {
                    KindArg::Position => Kind::Position,
                    KindArg::Momentum => Kind::Momentum,
                };
                commands::smeared_distribution(ctx, measure, state, kind, edges, csv)
            }
        },
        Command::Phasespace(c) => match c {
            PhasespaceCommand::State { state, emit } => commands::phasespace_state(ctx, state, emit),
            PhasespaceCommand::Margins { state, rho_out, nu_out } => {
                commands::phasespace_margins(ctx, state, rho_out, nu_out)
            }
            PhasespaceCommand::Density { state, probe, stride, csv } => {
                commands::phasespace_density(ctx, state, probe, *stride, csv)
            }
            PhasespaceCommand::Effect { state, q, p, basis } => commands::phasespace_effect(ctx, state, *q, *p, *basis),
        },
        Command::Check(c) => match c {
            CheckCommand::Pom { input } => commands::check_pom(ctx, input),
            CheckCommand::Uncertainty { state, pairs_from } => commands::check_uncertainty(ctx, state, pairs_from),
            CheckCommand::Resolution { pairs_from } => commands::check_resolution(ctx, pairs_from),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let ctx = Context { grid_n: g.grid_n, window: g.window, tol: g.tol, quad_order: g.quad_order, seed: g.seed };
    let report = match run(&cli.command, &ctx) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = report.write(g.out.as_deref()) {
        eprintln!("error: writing report to {}: {e}", input::display(&g.out));
        return ExitCode::from(2);
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("check failed: {} = {:e} (bound {:?}, witness {})", c.name, c.value, c.bound, c.witness);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
