//! Command-line front end: kernel catalog, closed-form verification,
//! 2-cycle search, uniqueness checks, positivity-threshold search, and
//! kernel export.
//!
//! Exit codes are a stable contract: 0 success/affirmed, 1 verification
//! failed, 2 build/config error, 3 inconclusive, 4 not found.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Resolved, EXIT_BUILD_ERROR};
use config::{pick, resolve_out, FileConfig};
use treegibbs::grid::Scheme;

#[derive(Parser)]
#[command(
    name = "treegibbs",
    version,
    about = "Period-2 boundary laws of spin models on Cayley trees: kernel catalog, \
             Hammerstein 2-cycle verification and search"
)]
struct Cli {
    /// JSON config file; one document per run, command-line flags override
    /// its keys, unknown keys are rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for reports (default: $TREEGIBBS_OUT, then ".").
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default, Clone)]
struct KernelFlags {
    /// Kernel family: k2_family | k3_family | k_ge4_family |
    /// four_cycle_family | generic_xi.
    #[arg(long)]
    family: Option<String>,

    /// Root order for k2_family.
    #[arg(long)]
    n: Option<u32>,

    /// Branching order (tree order).
    #[arg(short, long)]
    k: Option<u32>,

    /// Builtin interaction for generic_xi: zero | product | random_symmetric.
    #[arg(long)]
    xi: Option<String>,

    /// Seed of the random_symmetric interaction.
    #[arg(long)]
    xi_seed: Option<u64>,

    /// CSV matrix of interaction values (same layout as exported kernels).
    #[arg(long)]
    xi_file: Option<PathBuf>,

    /// Exported kernel matrix CSV; evaluation is restricted to its nodes.
    #[arg(long)]
    kernel_file: Option<PathBuf>,

    /// Interaction strength J (nonzero).
    #[arg(long)]
    j: Option<f64>,

    /// Inverse temperature beta (positive).
    #[arg(long)]
    beta: Option<f64>,

    /// Quadrature node count.
    #[arg(long)]
    nodes: Option<usize>,

    /// Quadrature scheme: gauss_legendre | gauss_legendre_split |
    /// composite_simpson (default: the family's preferred scheme).
    #[arg(long)]
    scheme: Option<String>,
}

#[derive(Args, Default, Clone)]
struct SolverFlags {
    /// Random seed for start generation.
    #[arg(long)]
    seed: Option<u64>,

    /// Number of random positive starts.
    #[arg(long)]
    starts: Option<usize>,

    /// Convergence threshold on the successive sup-distance.
    #[arg(long)]
    tol: Option<f64>,

    /// Iteration budget per start.
    #[arg(long)]
    max_iterations: Option<usize>,

    /// Damping factor in (0, 1].
    #[arg(long)]
    damping: Option<f64>,

    /// Pair-identification radius in sup distance.
    #[arg(long)]
    dedup_radius: Option<f64>,

    /// Relative noise of the perturbed catalog starts.
    #[arg(long)]
    perturbation: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// List the kernel families and the guarantee each realizes.
    Catalog,
    /// Verify a catalog family's closed-form pairs by residuals at two
    /// resolutions.
    Verify {
        #[command(flatten)]
        kernel: KernelFlags,
        /// Residual bound for exit code 0 (default 1e-6).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Multistart search for period-2 pairs of a kernel.
    Solve {
        #[command(flatten)]
        kernel: KernelFlags,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Evaluate the uniqueness condition (M/m)^k - (m/M)^k < 1/k.
    Uniq {
        #[command(flatten)]
        kernel: KernelFlags,
    },
    /// Smallest branching order at which the moment-matched kernel is
    /// positive on the dense grid.
    K0 {
        #[arg(long = "k-max")]
        k_max: Option<u32>,
    },
    /// Export a kernel matrix as CSV with a JSON metadata sidecar.
    ExportKernel {
        #[command(flatten)]
        kernel: KernelFlags,
    },
}

fn resolve(
    cli_out: &Option<PathBuf>,
    file: &FileConfig,
    kernel: &KernelFlags,
    solver: &SolverFlags,
    tol: Option<f64>,
) -> Result<Resolved, String> {
    let scheme = match pick(&kernel.scheme, &file.scheme) {
        Some(s) => Some(s.parse::<Scheme>()?),
        None => None,
    };
    Ok(Resolved {
        family: pick(&kernel.family, &file.family),
        n: pick(&kernel.n, &file.n),
        k: pick(&kernel.k, &file.k),
        xi: pick(&kernel.xi, &file.xi),
        xi_seed: pick(&kernel.xi_seed, &file.xi_seed).unwrap_or(0),
        xi_file: pick(&kernel.xi_file, &file.xi_file),
        kernel_file: pick(&kernel.kernel_file, &file.kernel_file),
        j: pick(&kernel.j, &file.j).unwrap_or(1.0),
        beta: pick(&kernel.beta, &file.beta).unwrap_or(1.0),
        nodes: pick(&kernel.nodes, &file.nodes).unwrap_or(200),
        scheme,
        seed: pick(&solver.seed, &file.seed).unwrap_or(0),
        starts: pick(&solver.starts, &file.starts).unwrap_or(8),
        tol: tol.or(solver.tol).or(file.tol),
        max_iterations: pick(&solver.max_iterations, &file.max_iterations),
        damping: pick(&solver.damping, &file.damping),
        dedup_radius: pick(&solver.dedup_radius, &file.dedup_radius),
        perturbation: pick(&solver.perturbation, &file.perturbation),
        k_max: file.k_max,
        out: resolve_out(cli_out, &file.out),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => match FileConfig::load(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_BUILD_ERROR as u8);
            }
        },
        None => FileConfig::default(),
    };

    let run = |kernel: &KernelFlags, solver: &SolverFlags, tol: Option<f64>| {
        resolve(&cli.out, &file, kernel, solver, tol)
    };
    let none_kernel = KernelFlags::default();
    let none_solver = SolverFlags::default();

    let code = match &cli.command {
        Command::Catalog => commands::cmd_catalog(),
        Command::Verify { kernel, tol } => match run(kernel, &none_solver, *tol) {
            Ok(r) => commands::cmd_verify(&r),
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_BUILD_ERROR
            }
        },
        Command::Solve { kernel, solver } => match run(kernel, solver, None) {
            Ok(r) => commands::cmd_solve(&r),
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_BUILD_ERROR
            }
        },
        Command::Uniq { kernel } => match run(kernel, &none_solver, None) {
            Ok(r) => commands::cmd_uniq(&r),
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_BUILD_ERROR
            }
        },
        Command::K0 { k_max } => match run(&none_kernel, &none_solver, None) {
            Ok(mut r) => {
                r.k_max = k_max.or(r.k_max);
                commands::cmd_k0(&r)
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_BUILD_ERROR
            }
        },
        Command::ExportKernel { kernel } => match run(kernel, &none_solver, None) {
            Ok(r) => commands::cmd_export_kernel(&r),
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_BUILD_ERROR
            }
        },
    };
    ExitCode::from(code as u8)
}
