//! `perk`: command-line driver for building, checking, and running
//! paired-explicit Runge-Kutta schemes.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use perk_core::butcher::{
    build_p2_family, build_p4_family, build_p4_tableau, AbscissaeChoice, ButcherTableau,
    PerkFamily,
};
use perk_core::integrator::{
    build_fully_discrete, conservation_error, integrate, kahan_weighted_sum, IntegrationStats,
    PartitionedSystem,
};
use perk_core::linalg::spectral_radius;
use perk_core::optimizer::{
    optimality_report, optimize_timestep, Coefficients, OptimizationProblem, Parametrization,
};
use perk_core::problems::{
    advection_fv_system, refined_center_mesh, lotka_volterra_invariant, lotka_volterra_system,
    sine_ic, Mesh1D,
};
use perk_core::spectra::{circulant_upwind_spectrum, operator_spectrum, Spectrum};
use perk_core::stabpoly::amplification_factor;
use perk_tools::formats::{
    deserialize_family, deserialize_tableau_unchecked, format_f64, format_list,
    load_matrix, load_spectrum, load_vector, lv_reference_cached, save_spectrum,
    serialize_family, sniff_format,
};
use perk_tools::ToolsError;

/// Residual threshold for the `check` subcommand's exit status.
const CHECK_TOL: f64 = 1e-12;

#[derive(Parser)]
#[command(name = "perk", version, about = "Paired-explicit Runge-Kutta toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or inspect an eigenvalue spectrum.
    Spectrum(SpectrumArgs),
    /// Maximize the stable timestep for one stability polynomial.
    Optimize(OptimizeArgs),
    /// Tabulate dt_free, dt_perk, and their ratio per polynomial degree.
    OptimalityReport(OptimalityArgs),
    /// Build and serialize a scheme family optimized per partition level.
    BuildFamily(BuildFamilyArgs),
    /// Report order-condition, row-sum, and coupling residuals of a tableau
    /// or family file; exits nonzero if any residual exceeds 1e-12.
    Check(CheckArgs),
    /// Internal amplification factors on a scaled spectrum.
    Amplification(AmplificationArgs),
    /// Integrate a named problem and report the final state, work, and
    /// conservation error.
    Integrate(IntegrateArgs),
    /// Assemble the one-step propagator and report its spectral radius.
    StabilityMatrix(StabilityMatrixArgs),
    /// Convergence study: errors and observed orders over a timestep list.
    Converge(ConvergeArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    /// Upwind circulant spectrum: number of cells and cell size.
    #[arg(long, num_args = 2, value_names = ["N", "DX"], conflicts_with_all = ["matrix", "input"])]
    circulant: Option<Vec<String>>,
    /// Eigenvalues of a dense matrix file (comma-separated rows).
    #[arg(long, conflicts_with = "input")]
    matrix: Option<PathBuf>,
    /// Existing spectrum file to validate/normalize.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ParamArg {
    Monomial,
    Perk,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    spectrum: PathBuf,
    /// Polynomial degree E.
    #[arg(long)]
    degree: usize,
    /// Order of accuracy p.
    #[arg(long)]
    order: usize,
    #[arg(long, value_enum, default_value = "monomial")]
    parametrization: ParamArg,
    /// Relative bisection tolerance on the optimal timestep.
    #[arg(long, default_value_t = 1e-4)]
    bisect_tol: f64,
    /// Feasibility tolerance on max |P|.
    #[arg(long, default_value_t = 1e-9)]
    feas_tol: f64,
    /// Output file for the key-value report; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimalityArgs {
    #[arg(long)]
    spectrum: PathBuf,
    /// Comma-separated polynomial degrees (each >= 6).
    #[arg(long, value_delimiter = ',')]
    degrees: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildFamilyArgs {
    /// Order of accuracy (2 or 4).
    #[arg(long)]
    order: usize,
    /// Stage evaluations per member, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    evals: Vec<usize>,
    /// One spectrum file per member (the member's partition level).
    #[arg(long, value_delimiter = ',')]
    spectra: Vec<PathBuf>,
    /// Shared stage count for order 2 (default: max of --evals).
    #[arg(long)]
    stages: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Also report each member's optimized timestep on its spectrum.
    #[arg(long, default_value_t = false)]
    report_dt: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Tableau or family file (dispatched on its `format` key).
    file: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AbscissaeArg {
    Constant,
    Linear,
}

#[derive(Args)]
struct AmplificationArgs {
    /// Family file: reports one amplification factor per member.
    #[arg(long, conflicts_with_all = ["degree", "gamma"])]
    family: Option<PathBuf>,
    /// Build a fourth-order tableau of this degree instead.
    #[arg(long, requires = "gamma")]
    degree: Option<usize>,
    /// Free subdiagonal products for --degree (comma-separated, may be empty).
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    gamma: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "constant")]
    abscissae: AbscissaeArg,
    #[arg(long)]
    spectrum: PathBuf,
    /// Timestep scaling the spectrum.
    #[arg(long)]
    dt: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    /// Upwind advection of a sine profile on the built-in non-uniform mesh.
    AdvectionRefinedMesh,
    /// The two-population predator-prey system from (1, 2).
    LotkaVolterra,
    /// Linear system from a matrix file (--matrix, --levels, --ic).
    LinearFile,
}

#[derive(Args)]
struct IntegrateArgs {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    dt: f64,
    #[arg(long)]
    tf: f64,
    /// Matrix file for --problem linear-file.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Partition level per component for --problem linear-file.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// Initial state file for --problem linear-file.
    #[arg(long)]
    ic: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StabilityMatrixArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    dt: f64,
    /// Matrix file; the built-in non-uniform advection mesh when omitted.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// Write the assembled propagator as comma-separated rows.
    #[arg(long)]
    out_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Only the predator-prey problem has a built-in reference solution.
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long)]
    family: PathBuf,
    /// Comma-separated timesteps, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    dts: Vec<f64>,
    #[arg(long, default_value_t = 5.0)]
    tf: f64,
    /// Cache file for the reference solution.
    #[arg(long)]
    reference_cache: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::OptimalityReport(a) => cmd_optimality(a),
        Command::BuildFamily(a) => cmd_build_family(a),
        Command::Check(a) => cmd_check(a),
        Command::Amplification(a) => cmd_amplification(a),
        Command::Integrate(a) => cmd_integrate(a),
        Command::StabilityMatrix(a) => cmd_stability_matrix(a),
        Command::Converge(a) => cmd_converge(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Writes to `out` when given, else prints to stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<(), ToolsError> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| ToolsError::Io { path: p.display().to_string(), source: e }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<(), ToolsError> {
    let s: Spectrum = if let Some(vals) = a.circulant {
        let n: usize = vals[0]
            .parse()
            .map_err(|_| ToolsError::Validation(format!("bad cell count '{}'", vals[0])))?;
        let dx: f64 = vals[1]
            .parse()
            .map_err(|_| ToolsError::Validation(format!("bad cell size '{}'", vals[1])))?;
        if n == 0 || !(dx > 0.0) {
            return Err(ToolsError::Validation(format!("need N >= 1 and DX > 0, got {n}, {dx}")));
        }
        circulant_upwind_spectrum(n, dx)
    } else if let Some(path) = a.matrix {
        let m = load_matrix(&path)?;
        let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("matrix").to_string();
        operator_spectrum(&m, &label)?
    } else if let Some(path) = a.input {
        load_spectrum(&path)?
    } else {
        return Err(ToolsError::Validation(
            "one of --circulant, --matrix, --in is required".into(),
        ));
    };
    match a.out {
        Some(p) => save_spectrum(&s, &p),
        None => {
            let mut text = format!("# spectrum: {}\n", s.label());
            for z in s.points() {
                text.push_str(&format!("{},{}\n", format_f64(z.re), format_f64(z.im)));
            }
            emit(None, &text)
        }
    }
}

fn param_from_arg(p: ParamArg) -> Parametrization {
    match p {
        ParamArg::Monomial => Parametrization::Monomial,
        ParamArg::Perk => Parametrization::PerkConstrained,
    }
}

fn optimize_report(
    spectrum: Spectrum,
    degree: usize,
    order: usize,
    parametrization: Parametrization,
    bisect_tol: f64,
    feas_tol: f64,
) -> Result<String, ToolsError> {
    let mut problem = OptimizationProblem::new(spectrum, degree, order, parametrization)?;
    if !(bisect_tol > 0.0) || !(feas_tol >= 0.0) {
        return Err(ToolsError::Validation(format!(
            "tolerances must be positive, got bisect {bisect_tol}, feasibility {feas_tol}"
        )));
    }
    problem.bisect_rel_tol = bisect_tol;
    problem.feas_tol = feas_tol;
    let r = optimize_timestep(&problem)?;
    let mut out = String::new();
    out.push_str("format = optimize-report\n");
    out.push_str(&format!("spectrum = {}\n", problem.spectrum.label()));
    out.push_str(&format!("degree = {degree}\n"));
    out.push_str(&format!("order = {order}\n"));
    out.push_str(&format!(
        "parametrization = {}\n",
        match parametrization {
            Parametrization::Monomial => "monomial",
            Parametrization::PerkConstrained => "perk",
        }
    ));
    out.push_str(&format!("dt-opt = {}\n", format_f64(r.dt_opt)));
    out.push_str(&format!("max-modulus = {}\n", format_f64(r.max_modulus)));
    out.push_str(&format!("bisect-iterations = {}\n", r.bisect_iterations));
    out.push_str(&format!("inner-iterations = {}\n", r.inner_iterations));
    match &r.coefficients {
        Coefficients::Monomial(m) => {
            out.push_str(&format!("alpha = {}\n", format_list(m.alpha())));
        }
        Coefficients::Perk(p) => {
            out.push_str(&format!("gamma = {}\n", format_list(p.gamma())));
            out.push_str(&format!("alpha = {}\n", format_list(&p.alpha())));
        }
    }
    Ok(out)
}

fn cmd_optimize(a: OptimizeArgs) -> Result<(), ToolsError> {
    let s = load_spectrum(&a.spectrum)?;
    let report = optimize_report(
        s,
        a.degree,
        a.order,
        param_from_arg(a.parametrization),
        a.bisect_tol,
        a.feas_tol,
    )?;
    emit(a.out.as_deref(), &report)
}

fn cmd_optimality(a: OptimalityArgs) -> Result<(), ToolsError> {
    let s = load_spectrum(&a.spectrum)?;
    if a.degrees.is_empty() {
        return Err(ToolsError::Validation("--degrees must not be empty".into()));
    }
    let rows = optimality_report(&s, &a.degrees)?;
    let mut out = String::from("e,dt_free,dt_perk,ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.degree_e,
            format_f64(r.dt_free),
            format_f64(r.dt_perk),
            format_f64(r.ratio)
        ));
    }
    emit(a.out.as_deref(), &out)
}

fn cmd_build_family(a: BuildFamilyArgs) -> Result<(), ToolsError> {
    if a.evals.is_empty() || a.evals.len() != a.spectra.len() {
        return Err(ToolsError::Validation(format!(
            "{} member degrees but {} spectra; need one spectrum per member",
            a.evals.len(),
            a.spectra.len()
        )));
    }
    let spectra: Vec<Spectrum> =
        a.spectra.iter().map(|p| load_spectrum(p)).collect::<Result<_, _>>()?;
    let mut dts = Vec::with_capacity(a.evals.len());
    let family: PerkFamily = match a.order {
        4 => {
            let mut gammas = Vec::with_capacity(a.evals.len());
            for (&e, s) in a.evals.iter().zip(&spectra) {
                let problem = OptimizationProblem::new(
                    s.clone(),
                    e,
                    4,
                    Parametrization::PerkConstrained,
                )?;
                let r = optimize_timestep(&problem)?;
                dts.push(r.dt_opt);
                match r.coefficients {
                    Coefficients::Perk(p) => gammas.push(p.gamma().to_vec()),
                    Coefficients::Monomial(_) => unreachable!(),
                }
            }
            build_p4_family(&a.evals, &gammas)?
        }
        2 => {
            let s_shared = a.stages.unwrap_or_else(|| *a.evals.iter().max().unwrap());
            let mut polys = Vec::with_capacity(a.evals.len());
            for (&e, s) in a.evals.iter().zip(&spectra) {
                let problem =
                    OptimizationProblem::new(s.clone(), e, 2, Parametrization::Monomial)?;
                let r = optimize_timestep(&problem)?;
                dts.push(r.dt_opt);
                polys.push(r.coefficients.to_monomial());
            }
            build_p2_family(s_shared, &polys)?
        }
        other => {
            return Err(ToolsError::Validation(format!(
                "--order must be 2 or 4, got {other}"
            )));
        }
    };
    serialize_family(&family, &a.out)?;
    if a.report_dt {
        let mut report = String::from("e,dt_opt\n");
        for (&e, &dt) in a.evals.iter().zip(&dts) {
            report.push_str(&format!("{e},{}\n", format_f64(dt)));
        }
        emit(None, &report)?;
    }
    Ok(())
}

fn check_family(f: &PerkFamily) -> (String, f64) {
    let mut out = String::new();
    let mut worst = 0.0_f64;
    for (r, dev) in f.internal_consistency().iter().enumerate() {
        out.push_str(&format!(
            "member-{}-row-sum-deviation = {}\n",
            f.members()[r].evals_e(),
            format_f64(*dev)
        ));
        worst = worst.max(*dev);
    }
    for res in f.order_residuals() {
        out.push_str(&format!("{} = {}\n", res.label, format_f64(res.residual)));
        worst = worst.max(res.residual.abs());
    }
    (out, worst)
}

fn cmd_check(a: CheckArgs) -> Result<(), ToolsError> {
    let fmt = sniff_format(&a.file)?;
    let (mut out, worst) = match fmt.as_str() {
        "tableau" => {
            let t = deserialize_tableau_unchecked(&a.file)?;
            let f = PerkFamily::single(&t);
            check_family(&f)
        }
        "family" => {
            let f = deserialize_family(&a.file)?;
            check_family(&f)
        }
        other => {
            return Err(ToolsError::Validation(format!(
                "cannot check a '{other}' file"
            )));
        }
    };
    out.push_str(&format!("max-residual = {}\n", format_f64(worst)));
    emit(None, &out)?;
    if worst > CHECK_TOL {
        return Err(ToolsError::ResidualExceeded {
            what: format!("{}", a.file.display()),
            residual: worst,
            threshold: CHECK_TOL,
        });
    }
    Ok(())
}

fn cmd_amplification(a: AmplificationArgs) -> Result<(), ToolsError> {
    let s = load_spectrum(&a.spectrum)?;
    if !(a.dt > 0.0) {
        return Err(ToolsError::Validation(format!("--dt must be positive, got {}", a.dt)));
    }
    let tableaus: Vec<ButcherTableau> = if let Some(path) = &a.family {
        let f = deserialize_family(path)?;
        (0..f.num_members()).map(|r| f.member_tableau(r)).collect()
    } else if let Some(e) = a.degree {
        let gamma = a.gamma.unwrap_or_default();
        let choice = match a.abscissae {
            AbscissaeArg::Constant => AbscissaeChoice::Constant,
            AbscissaeArg::Linear => AbscissaeChoice::LinearIncreasing,
        };
        vec![build_p4_tableau(e, &gamma, choice)?]
    } else {
        return Err(ToolsError::Validation(
            "either --family or --degree/--gamma is required".into(),
        ));
    };
    let mut out = String::from("e,amplification\n");
    for t in &tableaus {
        out.push_str(&format!(
            "{},{}\n",
            t.evals_e(),
            format_f64(amplification_factor(t, &s, a.dt))
        ));
    }
    emit(a.out.as_deref(), &out)
}

/// The built-in non-uniform advection setup: mesh, level map, system.
fn refined_mesh_system(num_levels: usize) -> Result<(Mesh1D, PartitionedSystem), ToolsError> {
    let (mesh, levels) = refined_center_mesh();
    let levels = if num_levels == 1 { vec![1; mesh.n_cells()] } else { levels };
    if num_levels > 2 {
        return Err(ToolsError::Validation(format!(
            "the built-in mesh has 2 partition levels; family has {num_levels} members"
        )));
    }
    let sys = advection_fv_system(&mesh, 1.0, levels, num_levels)?;
    Ok((mesh, sys))
}

fn linear_file_system(
    matrix: Option<&Path>,
    levels: Option<&[usize]>,
    num_levels: usize,
) -> Result<PartitionedSystem, ToolsError> {
    let path = matrix.ok_or_else(|| ToolsError::Validation("--matrix is required".into()))?;
    let m = load_matrix(path)?;
    let n = m.rows();
    let levels = match levels {
        Some(l) => l.to_vec(),
        None => vec![1; n],
    };
    if levels.len() != n {
        return Err(ToolsError::Validation(format!(
            "{} levels for a {n}-row matrix",
            levels.len()
        )));
    }
    let mut masks = vec![perk_core::linalg::DenseMatrix::zeros(n, n); num_levels];
    for (i, &r) in levels.iter().enumerate() {
        if r == 0 || r > num_levels {
            return Err(ToolsError::Validation(format!("component {i} level {r}")));
        }
        masks[r - 1].set(i, i, 1.0);
    }
    let m2 = m.clone();
    let lv = levels.clone();
    let rhs = Box::new(move |_t: f64, u: &[f64], active: &[bool], dudt: &mut [f64]| {
        for i in 0..u.len() {
            if active[lv[i] - 1] {
                dudt[i] = (0..u.len()).map(|j| m2.get(i, j) * u[j]).sum();
            }
        }
    });
    Ok(PartitionedSystem::new(
        num_levels,
        levels,
        rhs,
        Some(perk_core::integrator::LinearData { lambda: m, masks }),
    )?)
}

fn stats_lines(stats: &IntegrationStats) -> String {
    let mut out = format!("steps = {}\n", stats.steps);
    for (r, &n) in stats.rhs_evals.iter().enumerate() {
        out.push_str(&format!("rhs-evals-level-{} = {n}\n", r + 1));
    }
    out.push_str(&format!("rhs-evals-total = {}\n", stats.total_rhs_evals()));
    out
}

fn cmd_integrate(a: IntegrateArgs) -> Result<(), ToolsError> {
    let family = deserialize_family(&a.family)?;
    if !(a.dt > 0.0) {
        return Err(ToolsError::Validation(format!("--dt must be positive, got {}", a.dt)));
    }
    let r = family.num_members();
    let mut out = String::from("format = integrate-report\n");
    match a.problem {
        ProblemArg::AdvectionRefinedMesh => {
            let (mesh, sys) = refined_mesh_system(r)?;
            let u0 = sine_ic(&mesh);
            let (uf, stats) = integrate(&family, &sys, &u0, 0.0, a.tf, a.dt)?;
            let w = mesh.cell_sizes();
            out.push_str(&stats_lines(&stats));
            let mass0 = kahan_weighted_sum(&u0, &w);
            out.push_str(&format!("mass-initial = {}\n", format_f64(mass0)));
            out.push_str(&format!(
                "mass-drift = {}\n",
                format_f64(conservation_error(&u0, &uf, &w))
            ));
            out.push_str(&format!("state = {}\n", format_list(&uf)));
        }
        ProblemArg::LotkaVolterra => {
            let sys = lotka_volterra_system();
            if r > 2 {
                return Err(ToolsError::Validation(format!(
                    "the predator-prey system has 2 levels; family has {r} members"
                )));
            }
            let sys = if r == 1 {
                // collapse both populations onto the single member
                PartitionedSystem::new(
                    1,
                    vec![1, 1],
                    Box::new(|_t, s: &[f64], active: &[bool], d: &mut [f64]| {
                        if active[0] {
                            d[0] = s[0] * (1.0 - s[1]);
                            d[1] = s[1] * (s[0] - 1.0);
                        }
                    }),
                    None,
                )?
            } else {
                sys
            };
            let u0 = [1.0, 2.0];
            let (uf, stats) = integrate(&family, &sys, &u0, 0.0, a.tf, a.dt)?;
            out.push_str(&stats_lines(&stats));
            out.push_str(&format!("state = {}\n", format_list(&uf)));
            let drift =
                (lotka_volterra_invariant(uf[0], uf[1]) - lotka_volterra_invariant(1.0, 2.0)).abs();
            out.push_str(&format!("invariant-drift = {}\n", format_f64(drift)));
        }
        ProblemArg::LinearFile => {
            let sys = linear_file_system(a.matrix.as_deref(), a.levels.as_deref(), r)?;
            let ic_path = a
                .ic
                .ok_or_else(|| ToolsError::Validation("--ic is required".into()))?;
            let u0 = load_vector(&ic_path)?;
            if u0.len() != sys.dim() {
                return Err(ToolsError::Validation(format!(
                    "initial state has {} entries for a {}-dimensional system",
                    u0.len(),
                    sys.dim()
                )));
            }
            let (uf, stats) = integrate(&family, &sys, &u0, 0.0, a.tf, a.dt)?;
            out.push_str(&stats_lines(&stats));
            out.push_str(&format!("state = {}\n", format_list(&uf)));
        }
    }
    emit(a.out.as_deref(), &out)
}

fn cmd_stability_matrix(a: StabilityMatrixArgs) -> Result<(), ToolsError> {
    let family = deserialize_family(&a.family)?;
    if !(a.dt > 0.0) {
        return Err(ToolsError::Validation(format!("--dt must be positive, got {}", a.dt)));
    }
    let r = family.num_members();
    let sys = match &a.matrix {
        Some(_) => linear_file_system(a.matrix.as_deref(), a.levels.as_deref(), r)?,
        None => refined_mesh_system(r)?.1,
    };
    let d = build_fully_discrete(&family, &sys, a.dt)?;
    let rho = spectral_radius(&d)?;
    println!("spectral-radius = {}", format_f64(rho));
    if let Some(p) = &a.out_matrix {
        let mut text = String::new();
        for i in 0..d.rows() {
            let row: Vec<f64> = (0..d.cols()).map(|j| d.get(i, j)).collect();
            text.push_str(&format_list(&row));
            text.push('\n');
        }
        std::fs::write(p, text)
            .map_err(|e| ToolsError::Io { path: p.display().to_string(), source: e })?;
    }
    Ok(())
}

fn cmd_converge(a: ConvergeArgs) -> Result<(), ToolsError> {
    if a.problem != ProblemArg::LotkaVolterra {
        return Err(ToolsError::Validation(
            "convergence studies support --problem lotka-volterra only".into(),
        ));
    }
    let family = deserialize_family(&a.family)?;
    if family.num_members() > 2 {
        return Err(ToolsError::Validation(
            "the predator-prey system has 2 levels".into(),
        ));
    }
    let reference = match &a.reference_cache {
        Some(p) => lv_reference_cached(p, a.tf, (1.0, 2.0))?,
        None => perk_core::problems::lv_reference(a.tf, (1.0, 2.0))?,
    };
    let u_ref = [reference.0, reference.1];
    let sys = lotka_volterra_system();
    let single;
    let sys = if family.num_members() == 1 {
        single = PartitionedSystem::new(
            1,
            vec![1, 1],
            Box::new(|_t, s: &[f64], active: &[bool], d: &mut [f64]| {
                if active[0] {
                    d[0] = s[0] * (1.0 - s[1]);
                    d[1] = s[1] * (s[0] - 1.0);
                }
            }),
            None,
        )?;
        &single
    } else {
        &sys
    };
    let rows = perk_core::harness::eoc_study(&a.dts, |dt| {
        let (uf, _) = integrate(&family, sys, &[1.0, 2.0], 0.0, a.tf, dt)
            .map_err(|e| perk_core::harness::HarnessError::Run(e.to_string()))?;
        Ok(perk_core::harness::error_norms(&uf, &u_ref, &[1.0, 1.0]))
    })
    .map_err(|e| ToolsError::Validation(e.to_string()))?;
    let mut out = String::from("dt,error_l1,error_linf,eoc_l1,eoc_linf\n");
    for r in rows {
        let fmt_opt = |o: Option<f64>| o.map(|v| format_f64(v)).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_f64(r.dt),
            format_f64(r.error_l1),
            format_f64(r.error_linf),
            fmt_opt(r.eoc_l1),
            fmt_opt(r.eoc_linf)
        ));
    }
    emit(a.out.as_deref(), &out)
}
