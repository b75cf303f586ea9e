use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qipm::bench::{tomography_sweep, SweepSpec, DEFAULT_DELTAS, DEFAULT_DIMS, DEFAULT_TRIALS};
use qipm::format::{read_instance, write_instance, Instance};
use qipm::instance::{
    generate_maxcut_sdp, generate_random_lp, generate_random_sdp, WeightedGraph,
};
use qipm::ipm::{run, run_lp, GammaRegime, Mode, RunConfig, Termination};
use qipm::matspace::central_path_distance;
use qipm::report::{summarize_lp, summarize_sdp, to_csv, write_run_artifacts};
use qipm::verify::{run_identity_suite, VerifyOptions};
use qipm::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_MAX_ITERS: u8 = 3;
const EXIT_AUDIT: u8 = 4;
const EXIT_VERIFY: u8 = 5;

/// Path-following SDP/LP solver with a simulated quantum Newton step.
///
/// Every flag can also be set through an environment variable named
/// QIPM_<FLAG> (upper case, dashes as underscores), e.g. QIPM_EPS=1e-4.
#[derive(Parser, Debug)]
#[command(name = "qipm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random SDP, random LP or MAXCUT instance file.
    Generate(GenerateArgs),
    /// Solve an instance file (SDP or LP) and write trace.csv, ledger.csv, summary.json.
    Solve(SolveArgs),
    /// Solve an LP instance file with the dedicated LP path.
    SolveLp(SolveArgs),
    /// Sweep tomography accuracy over a (d, delta) grid.
    TomoBench(TomoArgs),
    /// Run the randomised identity battery.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("kind").required(true).args(["sdp", "lp", "maxcut"])))]
struct GenerateArgs {
    /// Random SDP with a seed pair on the central path.
    #[arg(long)]
    sdp: bool,
    /// Random LP with a seed pair on the central path.
    #[arg(long)]
    lp: bool,
    /// MAXCUT relaxation of the graph in --graph.
    #[arg(long, requires = "graph")]
    maxcut: bool,
    /// Edge list, one "u v [w]" per line.
    #[arg(long, requires = "maxcut")]
    graph: Option<PathBuf>,
    #[arg(short = 'n', long, env = "QIPM_N", conflicts_with = "maxcut")]
    n: Option<usize>,
    #[arg(short = 'm', long, env = "QIPM_M", conflicts_with = "maxcut")]
    m: Option<usize>,
    #[arg(long, env = "QIPM_SEED", default_value_t = 0)]
    seed: u64,
    /// Output file.
    #[arg(short = 'o', long, env = "QIPM_OUTPUT")]
    output: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Qsim,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GammaArg {
    Abs,
    Rel,
}

#[derive(Args, Debug)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, env = "QIPM_MODE", default_value = "exact")]
    mode: ModeArg,
    #[arg(long, env = "QIPM_EPS", default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, env = "QIPM_XI", default_value_t = 0.01)]
    xi: f64,
    #[arg(long, env = "QIPM_ETA", default_value_t = 0.1)]
    eta: f64,
    #[arg(long, env = "QIPM_CHI", default_value_t = 0.1)]
    chi: f64,
    #[arg(long, value_enum, env = "QIPM_GAMMA", default_value = "abs")]
    gamma: GammaArg,
    /// Root seed for tomography and norm-estimate noise.
    #[arg(long, env = "QIPM_SEED", default_value_t = 0)]
    seed: u64,
    /// Fail with exit code 4 as soon as a step guarantee is violated.
    #[arg(long, env = "QIPM_AUDIT")]
    audit: bool,
    #[arg(long, env = "QIPM_MAX_ITERS", default_value_t = 100_000)]
    max_iters: usize,
    /// Skip the per-iteration mu/kappa diagnostics (the cost ledger stays empty).
    #[arg(long, env = "QIPM_NO_DIAGNOSTICS")]
    no_diagnostics: bool,
    /// Gaussian model of tomography instead of shot sampling (qsim only).
    #[arg(long, env = "QIPM_FAST_TOMOGRAPHY")]
    fast_tomography: bool,
    #[arg(long, env = "QIPM_OUT", default_value = "qipm-out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TomoArgs {
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DIMS.to_vec())]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DELTAS.to_vec())]
    deltas: Vec<f64>,
    #[arg(long, env = "QIPM_TRIALS", default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, env = "QIPM_SEED", default_value_t = 0)]
    seed: u64,
    /// Gaussian model of tomography instead of shot sampling.
    #[arg(long, env = "QIPM_FAST_TOMOGRAPHY")]
    fast_tomography: bool,
    #[arg(long, env = "QIPM_OUT", default_value = "qipm-out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_values_t = VerifyOptions::default().dims)]
    dims: Vec<usize>,
    #[arg(long, env = "QIPM_TRIALS", default_value_t = VerifyOptions::default().trials)]
    trials: usize,
    #[arg(long, env = "QIPM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::DimensionMismatch(_) | Error::EmptyGraph => EXIT_USAGE,
        Error::AuditFailure { .. } => EXIT_AUDIT,
        _ => EXIT_FAILURE,
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn cmd_generate(a: &GenerateArgs) -> Result<u8, Error> {
    let dims = || match (a.n, a.m) {
        (Some(n), Some(m)) => Ok((n, m)),
        _ => Err(usage("--sdp and --lp need both -n and -m")),
    };
    let inst = if a.sdp {
        let (n, m) = dims()?;
        Instance::Sdp(generate_random_sdp(n, m, a.seed)?)
    } else if a.lp {
        let (n, m) = dims()?;
        Instance::Lp(generate_random_lp(n, m, a.seed)?)
    } else {
        let path = a.graph.as_ref().expect("clap enforces --graph");
        let graph = WeightedGraph::parse(&std::fs::read_to_string(path)?)?;
        Instance::Sdp(generate_maxcut_sdp(&graph)?)
    };
    std::fs::write(&a.output, write_instance(&inst))?;
    match &inst {
        Instance::Sdp(s) => {
            let (_, s0, y0) = s.seed_pair().expect("generated instances carry seeds");
            let nu = s0.dot(&y0) / s.n() as f64;
            println!("wrote SDP n={} m={} to {}", s.n(), s.m(), a.output.display());
            println!("  lambda_min(S0) = {:.6e}", s0.min_eigenvalue());
            println!("  lambda_min(Y0) = {:.6e}", y0.min_eigenvalue());
            println!("  dual residual  = {:.3e}", s.dual_violation(&y0));
            println!("  nu0 = {:.6e}, d(S0,Y0,nu0) = {:.3e}", nu, central_path_distance(&s0, &y0, nu)?);
        }
        Instance::Lp(l) => {
            let (_, s0, y0) = l.seed_pair().expect("generated instances carry seeds");
            println!("wrote LP n={} m={} to {}", l.n(), l.m(), a.output.display());
            println!("  min(s0) = {:.6e}", s0.min());
            println!("  min(y0) = {:.6e}", y0.min());
            println!("  dual residual = {:.3e}", l.dual_violation(&y0));
        }
    }
    Ok(0)
}

fn run_config(a: &SolveArgs) -> Result<RunConfig, Error> {
    let mode = match a.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Qsim => Mode::QuantumSim,
    };
    if a.fast_tomography && mode != Mode::QuantumSim {
        return Err(usage("--fast-tomography only applies to --mode qsim"));
    }
    let mut cfg = RunConfig {
        mode,
        eps: a.eps,
        xi: a.xi,
        eta: a.eta,
        chi: a.chi,
        gamma: match a.gamma {
            GammaArg::Abs => GammaRegime::Absolute,
            GammaArg::Rel => GammaRegime::Relative,
        },
        max_iters: a.max_iters,
        audit: a.audit,
        diagnostics: !a.no_diagnostics,
        ..RunConfig::default()
    };
    cfg.noise.rng_seed = a.seed;
    cfg.noise.fast_mode = a.fast_tomography;
    cfg.validate()?;
    Ok(cfg)
}

fn finish_solve(out: &Path, termination: Termination, gap: f64, eps: f64) -> u8 {
    println!("artifacts in {}", out.display());
    match termination {
        Termination::Converged => {
            println!("converged: Tr(SY) = {gap:.6e} <= {eps:e}");
            0
        }
        Termination::MaxItersExceeded => {
            println!("stopped at the iteration limit: Tr(SY) = {gap:.6e}");
            EXIT_MAX_ITERS
        }
    }
}

fn cmd_solve(a: &SolveArgs, lp_only: bool) -> Result<u8, Error> {
    let cfg = run_config(a)?;
    match read_instance(&a.instance)? {
        Instance::Sdp(_) if lp_only => Err(usage(format!("{} is not an LP instance", a.instance.display()))),
        Instance::Sdp(inst) => {
            let res = run(&inst, &cfg)?;
            let summary = summarize_sdp(&inst, &cfg, &res);
            write_run_artifacts(&a.out, &res.trace, &res.ledger, &summary)?;
            println!("{} iterations (planned {})", res.trace.len(), res.planned_iterations);
            Ok(finish_solve(&a.out, res.termination, res.final_gap(), cfg.eps))
        }
        Instance::Lp(lp) => {
            let res = run_lp(&lp, &cfg)?;
            let summary = summarize_lp(&lp, &cfg, &res);
            write_run_artifacts(&a.out, &res.trace, &res.ledger, &summary)?;
            println!("{} iterations (planned {})", res.trace.len(), res.planned_iterations);
            Ok(finish_solve(&a.out, res.termination, res.final_gap(), cfg.eps))
        }
    }
}

fn cmd_tomo_bench(a: &TomoArgs) -> Result<u8, Error> {
    let mut spec = SweepSpec {
        dims: a.dims.clone(),
        deltas: a.deltas.clone(),
        trials: a.trials,
        seed: a.seed,
        ..SweepSpec::default()
    };
    spec.noise.fast_mode = a.fast_tomography;
    let res = tomography_sweep(&spec)?;
    std::fs::create_dir_all(&a.out)?;
    std::fs::write(a.out.join("report.csv"), to_csv(&res.cells)?)?;
    std::fs::write(a.out.join("trials.csv"), to_csv(&res.trials)?)?;
    for c in &res.cells {
        println!(
            "{} d={:<4} delta={:<5} N={:<10} success={:.4} (need >= {:.4}) median_err={:.4e} p90_err={:.4e}",
            if c.meets_bound { "ok  " } else { "LOW " },
            c.d,
            c.delta,
            c.n_shots,
            c.success_rate,
            c.required_rate,
            c.err_median,
            c.err_p90
        );
    }
    println!("report in {}", a.out.join("report.csv").display());
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8, Error> {
    if a.dims.iter().any(|&n| n == 0 || n > 12) || a.trials == 0 {
        return Err(usage("verify needs dimensions in 1..=12 and at least one trial"));
    }
    let report = run_identity_suite(&VerifyOptions {
        dims: a.dims.clone(),
        trials: a.trials,
        seed: a.seed,
        inject_fault: a.inject_fault,
    })?;
    print!("{}", report.render());
    Ok(if report.all_passed() { 0 } else { EXIT_VERIFY })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("QIPM_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a, false),
        Command::SolveLp(a) => cmd_solve(a, true),
        Command::TomoBench(a) => cmd_tomo_bench(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
