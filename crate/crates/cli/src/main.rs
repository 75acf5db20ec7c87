//! `domarnet` — equilibrium prices, Domar aggregation, synergy, viability,
//! and singularity-frontier grids for CES production networks.
//!
//! Scalar and vector reports are printed as JSON on stdout; grids stream CSV.
//! Exit codes: 0 success, 1 input error, 2 domain singularity or
//! inapplicability (never a crash).

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use domarnet::{
    cost_shares, domar_aggregate, eigen_bounds, grid_scan, labor_coefficients,
    reduce_to_two_sector, reference_viability, singularity_frontier, solve, synergy_gap,
    viability_check, BoundClassification, Elasticity, Error, Method, NetworkOptions,
    PredictedSign, ProductionNetwork, ShockVector, SolutionStatus, SolveOptions, Verdict,
    ViabilityReport,
};

#[derive(Parser)]
#[command(
    name = "domarnet",
    version,
    about = "CES production-network equilibrium, Domar aggregation, and singularity diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve equilibrium prices for a network under productivity shocks.
    Solve(SolveArgs),
    /// Aggregate output growth (log real GDP) under shocks.
    Domar(DomarArgs),
    /// Joint-versus-individual aggregate outputs for two shocks.
    Synergy(SynergyArgs),
    /// Viability diagnostics for the reference or shocked network.
    Viability(ViabilityArgs),
    /// Exact reduction of the network onto two sectors.
    Reduce(ReduceArgs),
    /// CSV grid of the two-sector nonsingularity determinant.
    Grid(GridArgs),
}

#[derive(Args)]
struct NetArgs {
    /// Path to the network JSON file (keys n, A, alpha0, kappa; A[i][j] is
    /// input i into sector j).
    #[arg(long)]
    net: String,
    /// Reject zero intermediate shares instead of accepting them.
    #[arg(long)]
    strict_shares: bool,
}

#[derive(Args)]
struct SolverArgs {
    /// Elasticity of substitution.
    #[arg(long)]
    sigma: f64,
    /// Comma-separated productivity levels (defaults to all ones; `e` is
    /// accepted as Euler's number).
    #[arg(long)]
    z: Option<String>,
    /// Per-sector overrides SECTOR=VALUE on top of --z (1-based sector).
    #[arg(long = "set-z", value_name = "SECTOR=VALUE")]
    set_z: Vec<String>,
    /// Solution method for the nonneutral regime.
    #[arg(long, value_parser = ["direct", "fixed-point"], default_value = "direct")]
    method: String,
    #[arg(long)]
    fp_tol: Option<f64>,
    #[arg(long)]
    fp_max_iter: Option<usize>,
    #[arg(long)]
    fp_divergence_threshold: Option<f64>,
    /// Absolute determinant cutoff for the singular verdict (defaults to a
    /// relative guard).
    #[arg(long)]
    det_tol: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    net: NetArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Also report equilibrium cost shares and labor coefficients.
    #[arg(long)]
    shares: bool,
}

#[derive(Args)]
struct DomarArgs {
    #[command(flatten)]
    net: NetArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SynergyArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long)]
    sigma: f64,
    /// First shock vector (comma-separated).
    #[arg(long)]
    za: String,
    /// Second shock vector (comma-separated).
    #[arg(long)]
    zb: String,
}

#[derive(Args)]
struct ViabilityArgs {
    #[command(flatten)]
    net: NetArgs,
    /// Elasticity of substitution (required with --shock).
    #[arg(long)]
    sigma: Option<f64>,
    /// Shock vector; tests the transformed network A<zeta> instead of the
    /// reference network.
    #[arg(long)]
    shock: Option<String>,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    net: NetArgs,
    /// The two sectors to keep, 1-based, e.g. `--sectors 1,3`.
    #[arg(long)]
    sectors: String,
}

#[derive(Args)]
struct GridArgs {
    /// Product of the cross shares a21 * a12.
    #[arg(long)]
    alpha_prod: f64,
    #[arg(long)]
    sigma: f64,
    /// z1 axis as LO,HI.
    #[arg(long, default_value = "0.01,3.0")]
    z1_range: String,
    /// z2 axis as LO,HI.
    #[arg(long, default_value = "0.01,3.0")]
    z2_range: String,
    /// Cells per axis.
    #[arg(long, default_value_t = 200)]
    resolution: usize,
}

const EXIT_INPUT: u8 = 1;
const EXIT_DOMAIN: u8 = 2;

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("DOMARNET_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Domar(args) => cmd_domar(args),
        Command::Synergy(args) => cmd_synergy(args),
        Command::Viability(args) => cmd_viability(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Grid(args) => cmd_grid(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Domain outcomes (singular networks, neutral-regime inapplicability) exit
/// with 2; everything else is an input error.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NeutralRegime
        | Error::SingularNetwork { .. }
        | Error::SingularSynergySolve { .. }
        | Error::SingularAtStep { .. }
        | Error::NonConvergence { .. }
        | Error::SingularSolution
        | Error::SubmatrixSingular => EXIT_DOMAIN,
        _ => EXIT_INPUT,
    }
}

fn load_network(args: &NetArgs) -> Result<ProductionNetwork, Error> {
    ProductionNetwork::from_path(
        &args.net,
        NetworkOptions {
            require_strict_positivity: args.strict_shares,
        },
    )
}

/// Parses a comma-separated vector; the token `e` means Euler's number.
fn parse_vector(flag: &str, text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            if tok == "e" {
                Ok(std::f64::consts::E)
            } else {
                tok.parse::<f64>()
                    .map_err(|_| format!("--{flag}: cannot parse `{tok}` as a number"))
            }
        })
        .collect()
}

fn parse_shocks(solver: &SolverArgs, n: usize) -> Result<ShockVector, String> {
    let mut z = match &solver.z {
        Some(text) => {
            let v = parse_vector("z", text)?;
            if v.len() != n {
                return Err(format!("--z has {} entries, network has {n} sectors", v.len()));
            }
            v
        }
        None => vec![1.0; n],
    };
    for spec in &solver.set_z {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| format!("--set-z `{spec}`: expected SECTOR=VALUE"))?;
        let sector: usize = k
            .trim()
            .parse()
            .map_err(|_| format!("--set-z `{spec}`: bad sector index"))?;
        if sector == 0 || sector > n {
            return Err(format!("--set-z `{spec}`: sector must be in 1..={n}"));
        }
        let value: f64 = if v.trim() == "e" {
            std::f64::consts::E
        } else {
            v.trim()
                .parse()
                .map_err(|_| format!("--set-z `{spec}`: bad value"))?
        };
        z[sector - 1] = value;
    }
    ShockVector::new(z).map_err(|e| e.to_string())
}

fn solve_options(solver: &SolverArgs) -> SolveOptions {
    let mut opts = SolveOptions::default();
    if solver.method == "fixed-point" {
        opts.method = Method::FixedPoint;
    }
    if let Some(v) = solver.fp_tol {
        opts.fp_tol = v;
    }
    if let Some(v) = solver.fp_max_iter {
        opts.fp_max_iter = v;
    }
    if let Some(v) = solver.fp_divergence_threshold {
        opts.fp_divergence_threshold = v;
    }
    opts.det_singular_tol = solver.det_tol.or(opts.det_singular_tol);
    opts
}

fn input_error(message: String) -> Result<u8, Error> {
    eprintln!("error: {message}");
    Ok(EXIT_INPUT)
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization cannot fail")
    );
}

fn status_str(status: SolutionStatus) -> &'static str {
    match status {
        SolutionStatus::Finite => "finite",
        SolutionStatus::Singular => "singular",
        SolutionStatus::NumericallyIll => "numerically_ill",
    }
}

#[derive(Serialize)]
struct SolveReport {
    status: &'static str,
    p: Option<Vec<f64>>,
    log_p: Option<Vec<f64>>,
    pi: Option<Vec<f64>>,
    determinant: Option<f64>,
    residual: Option<f64>,
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost_shares: Option<SharesReport>,
}

#[derive(Serialize)]
struct SharesReport {
    /// s[i][j]: share of input i in sector j's unit cost at equilibrium.
    s: Vec<Vec<f64>>,
    labor_row: Vec<f64>,
    labor_coefficients: Vec<f64>,
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Error> {
    let net = load_network(&args.net)?;
    let sigma = Elasticity::new(args.solver.sigma)?;
    let z = match parse_shocks(&args.solver, net.n()) {
        Ok(z) => z,
        Err(msg) => return input_error(msg),
    };
    let opts = solve_options(&args.solver);
    let solution = solve(&net, &z, &sigma, &opts)?;

    let shares = if args.shares && solution.status != SolutionStatus::Singular {
        let cs = cost_shares(&net, &z, &sigma, &solution)?;
        let m0 = labor_coefficients(&net, &z, &sigma, &solution)?;
        Some(SharesReport {
            s: (0..net.n())
                .map(|i| (0..net.n()).map(|j| cs.s[(i, j)]).collect())
                .collect(),
            labor_row: cs.labor.iter().copied().collect(),
            labor_coefficients: m0.iter().copied().collect(),
        })
    } else {
        None
    };

    let report = SolveReport {
        status: status_str(solution.status),
        p: solution.p.as_ref().map(|v| v.iter().copied().collect()),
        log_p: solution.log_p.as_ref().map(|v| v.iter().copied().collect()),
        pi: solution.pi.as_ref().map(|v| v.iter().copied().collect()),
        determinant: solution.diagnostics.determinant,
        residual: solution.diagnostics.residual,
        iterations: solution.diagnostics.iterations,
        cost_shares: shares,
    };
    print_json(&report);
    Ok(if solution.status == SolutionStatus::Singular {
        EXIT_DOMAIN
    } else {
        0
    })
}

#[derive(Serialize)]
struct DomarReport {
    log_v: f64,
    log_p: Vec<f64>,
    weights: Option<Vec<f64>>,
}

fn cmd_domar(args: DomarArgs) -> Result<u8, Error> {
    let net = load_network(&args.net)?;
    let sigma = Elasticity::new(args.solver.sigma)?;
    let z = match parse_shocks(&args.solver, net.n()) {
        Ok(z) => z,
        Err(msg) => return input_error(msg),
    };
    let opts = solve_options(&args.solver);
    let result = domar_aggregate(&net, &z, &sigma, &opts)?;
    print_json(&DomarReport {
        log_v: result.log_v,
        log_p: result.log_p.iter().copied().collect(),
        weights: result.weights.map(|w| w.iter().copied().collect()),
    });
    Ok(0)
}

#[derive(Serialize)]
struct SynergyJson {
    log_v_joint: f64,
    log_v_a: f64,
    log_v_b: f64,
    gap: f64,
    predicted_sign: &'static str,
    same_direction: bool,
    disjoint: bool,
}

fn cmd_synergy(args: SynergyArgs) -> Result<u8, Error> {
    let net = load_network(&args.net)?;
    let sigma = Elasticity::new(args.sigma)?;
    let za = match parse_vector("za", &args.za) {
        Ok(v) => v,
        Err(msg) => return input_error(msg),
    };
    let zb = match parse_vector("zb", &args.zb) {
        Ok(v) => v,
        Err(msg) => return input_error(msg),
    };
    let z_a = ShockVector::new(za)?;
    let z_b = ShockVector::new(zb)?;
    let report = synergy_gap(&net, &z_a, &z_b, &sigma, &SolveOptions::default())?;
    print_json(&SynergyJson {
        log_v_joint: report.log_v_joint,
        log_v_a: report.log_v_a,
        log_v_b: report.log_v_b,
        gap: report.gap,
        predicted_sign: match report.predicted_sign {
            PredictedSign::Negative => "negative",
            PredictedSign::Zero => "zero",
            PredictedSign::Positive => "positive",
            PredictedSign::NotApplicable => "not_applicable",
        },
        same_direction: report.same_direction,
        disjoint: report.disjoint,
    });
    Ok(0)
}

#[derive(Serialize)]
struct ViabilityJson {
    tested: &'static str,
    determinant: f64,
    principal_minors: Vec<f64>,
    spectral_radius: f64,
    /// Eigenvalues as [re, im] pairs.
    eigenvalues: Vec<[f64; 2]>,
    neumann_converged: bool,
    neumann_norm: f64,
    inverse_positive: bool,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigen_bounds: Option<BoundsJson>,
}

#[derive(Serialize)]
struct BoundsJson {
    zeta_max: f64,
    zeta_min: f64,
    bound_low: f64,
    bound_high: f64,
    classification: &'static str,
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Viable => "viable",
        Verdict::NonViable => "non_viable",
        Verdict::Indeterminate => "indeterminate",
    }
}

fn viability_json(tested: &'static str, report: &ViabilityReport) -> ViabilityJson {
    ViabilityJson {
        tested,
        determinant: report.determinant,
        principal_minors: report.principal_minors.clone(),
        spectral_radius: report.spectral_radius,
        eigenvalues: report.eigenvalues.iter().map(|l| [l.re, l.im]).collect(),
        neumann_converged: report.neumann_converged,
        neumann_norm: report.neumann_norm,
        inverse_positive: report.inverse_positive,
        verdict: verdict_str(report.verdict),
        eigen_bounds: None,
    }
}

fn cmd_viability(args: ViabilityArgs) -> Result<u8, Error> {
    let net = load_network(&args.net)?;
    match &args.shock {
        None => {
            let report = reference_viability(&net);
            print_json(&viability_json("reference network A", &report));
            Ok(0)
        }
        Some(shock) => {
            let sigma = match args.sigma {
                Some(s) => Elasticity::new(s)?,
                None => return input_error("--shock requires --sigma".into()),
            };
            let zv = match parse_vector("shock", shock) {
                Ok(v) => v,
                Err(msg) => return input_error(msg),
            };
            let z = ShockVector::new(zv)?;
            if z.len() != net.n() {
                return input_error(format!(
                    "--shock has {} entries, network has {} sectors",
                    z.len(),
                    net.n()
                ));
            }
            let zeta = z.transcendent(&sigma)?;
            let transformed = net.transformed(&zeta);
            let report = viability_check(&transformed)?;
            let mut json = viability_json("transformed network A<zeta>", &report);
            json.eigen_bounds = match eigen_bounds(&net, &z, &sigma) {
                Ok(b) => Some(BoundsJson {
                    zeta_max: b.zeta_max,
                    zeta_min: b.zeta_min,
                    bound_low: b.bound_low,
                    bound_high: b.bound_high,
                    classification: match b.classification {
                        BoundClassification::GuaranteedViable => "guaranteed_viable",
                        BoundClassification::GuaranteedNonViable => "guaranteed_non_viable",
                        BoundClassification::Indeterminate => "indeterminate",
                    },
                }),
                Err(Error::DefectiveNetwork { .. }) => None,
                Err(e) => return Err(e),
            };
            print_json(&json);
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct ReduceJson {
    /// 1-based indices of the kept sectors.
    sectors: [usize; 2],
    hat_alpha0: [f64; 2],
    hat_a: [[f64; 2]; 2],
    hat_column_sums: [f64; 2],
    tilde_alpha0: [f64; 2],
    tilde_cross: [f64; 2],
}

fn cmd_reduce(args: ReduceArgs) -> Result<u8, Error> {
    let net = load_network(&args.net)?;
    let parts: Vec<&str> = args.sectors.split(',').collect();
    let parsed: Option<(usize, usize)> = match parts.as_slice() {
        [a, b] => a
            .trim()
            .parse::<usize>()
            .ok()
            .zip(b.trim().parse::<usize>().ok()),
        _ => None,
    };
    let (i, j) = match parsed {
        Some((i, j)) if i >= 1 && j >= 1 => (i, j),
        _ => return input_error("--sectors expects two 1-based indices like `1,3`".into()),
    };
    let reduced = reduce_to_two_sector(&net, i - 1, j - 1)?;
    print_json(&ReduceJson {
        sectors: [i, j],
        hat_alpha0: reduced.hat_alpha0,
        hat_a: reduced.hat_a,
        hat_column_sums: reduced.hat_column_sums(),
        tilde_alpha0: reduced.tilde_alpha0,
        tilde_cross: reduced.tilde_cross,
    });
    Ok(0)
}

fn parse_range(flag: &str, text: &str) -> Result<(f64, f64), String> {
    let v = parse_vector(flag, text)?;
    if v.len() != 2 || !(v[0] > 0.0) || !(v[1] > v[0]) {
        return Err(format!("--{flag} expects LO,HI with 0 < LO < HI"));
    }
    Ok((v[0], v[1]))
}

fn cmd_grid(args: GridArgs) -> Result<u8, Error> {
    if !(args.alpha_prod > 0.0 && args.alpha_prod < 1.0) {
        return input_error("--alpha-prod must lie strictly between 0 and 1".into());
    }
    if args.resolution < 2 {
        return input_error("--resolution must be at least 2".into());
    }
    let sigma = Elasticity::new(args.sigma)?;
    let z1_range = match parse_range("z1-range", &args.z1_range) {
        Ok(r) => r,
        Err(msg) => return input_error(msg),
    };
    let z2_range = match parse_range("z2-range", &args.z2_range) {
        Ok(r) => r,
        Err(msg) => return input_error(msg),
    };
    let frontier = singularity_frontier(args.alpha_prod, &sigma)?;
    let grid = grid_scan(args.alpha_prod, &sigma, z1_range, z2_range, args.resolution)?;

    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    writeln!(out, "z1,z2,D,sign")?;
    let res = grid.resolution();
    for (iz2, &z2) in grid.z2.iter().enumerate() {
        for (iz1, &z1) in grid.z1.iter().enumerate() {
            let idx = iz2 * res + iz1;
            writeln!(out, "{},{},{},{}", z1, z2, grid.d[idx], grid.sign[idx])?;
        }
    }
    out.flush()?;
    // companion summary on the diagnostics channel, keeping stdout pure CSV
    eprintln!("frontier_product = {frontier}");
    Ok(0)
}
