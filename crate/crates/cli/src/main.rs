//! `fraclap`: solve the fractional Laplacian model problems and run
//! parameter studies from the command line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fraclap::error::Error;
use fraclap::fem::assemble_stiffness;
use fraclap::mesh::io::write_mesh;
use fraclap::parallel::Execution;
use fraclap::reference::{ModelProblem, ProblemKind};
use fraclap::report::{ExperimentReport, LinePlot, ReportRow, Sweep};
use fraclap::solver::{self, parse_key_values, FracOperator, SolveConfig};

#[derive(Parser)]
#[command(name = "fraclap", version, about = "Finite element solver for the integral fractional Laplacian")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve on (-1, 1) and print one report row
    Solve1d(SolveArgs),
    /// Solve on the unit disk and print one report row
    Solve2d(SolveArgs),
    /// Error and rate table over refinement levels
    Convergence(StudyArgs),
    /// Error against the quadrature spacing k
    Kstudy(StudyArgs),
    /// Error against the truncation parameter M
    Mstudy(StudyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Nonsmooth,
    Smooth,
}

impl From<Problem> for ProblemKind {
    fn from(p: Problem) -> Self {
        match p {
            Problem::Nonsmooth => ProblemKind::Nonsmooth,
            Problem::Smooth => ProblemKind::Smooth,
        }
    }
}

#[derive(Args, Clone)]
struct Common {
    /// key=value file; flags given on the command line take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fractional order in (0, 1)
    #[arg(long)]
    s: Option<f64>,
    /// 1D: h = 2^-level; 2D: refinements of the coarse disk
    #[arg(long)]
    h_level: Option<u32>,
    /// Quadrature spacing
    #[arg(long)]
    k: Option<f64>,
    /// Truncation parameter
    #[arg(long = "M")]
    m: Option<f64>,
    /// Analyticity band half-width of the quadrature
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    problem: Option<Problem>,
    /// projected | exact-rl
    #[arg(long)]
    rhs: Option<String>,
    /// Outer CG relative tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Run the node loops on one thread
    #[arg(long)]
    sequential: bool,
    /// Plain CG for the outer system
    #[arg(long)]
    no_precondition: bool,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Write the truncated mesh for node scale t = 1
    #[arg(long)]
    export_mesh: Option<PathBuf>,
    /// Write the stiffness matrix of the physical-domain mesh
    #[arg(long)]
    export_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    #[command(flatten)]
    common: Common,
    /// 1 or 2
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Levels as `a..b` (inclusive) or a comma separated list
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    k_min: Option<f64>,
    #[arg(long)]
    k_max: Option<f64>,
    #[arg(long)]
    m_min: Option<f64>,
    #[arg(long)]
    m_max: Option<f64>,
    /// Number of sweep points
    #[arg(long, default_value_t = 8)]
    count: usize,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Solver(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Mesh(_) => Failure::Usage(e.into()),
            _ => Failure::Solver(e.into()),
        }
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn build_config(c: &Common, dim: usize) -> Result<(SolveConfig, ProblemKind), Failure> {
    let mut cfg = SolveConfig { dim, level: if dim == 1 { 6 } else { 3 }, ..Default::default() };
    let mut problem = ProblemKind::Nonsmooth;
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
        for (key, value) in parse_key_values(&text)? {
            match key.as_str() {
                "problem" => {
                    problem = Problem::from_str(&value, true).map_err(|e| usage(anyhow!("config: {e}")))?.into();
                }
                _ => cfg.set(&key, &value)?,
            }
        }
    }
    let flags: [(&str, Option<String>); 9] = [
        ("s", c.s.map(|v| v.to_string())),
        ("level", c.h_level.map(|v| v.to_string())),
        ("k", c.k.map(|v| v.to_string())),
        ("M", c.m.map(|v| v.to_string())),
        ("d", c.d.map(|v| v.to_string())),
        ("delta", c.delta.map(|v| v.to_string())),
        ("rhs", c.rhs.clone()),
        ("tol", c.tol.map(|v| v.to_string())),
        ("max_iter", c.max_iter.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    if let Some(p) = c.problem {
        problem = p.into();
    }
    if c.sequential {
        cfg.execution = Execution::Sequential;
    }
    if c.no_precondition {
        cfg.precondition = false;
    }
    cfg.dim = dim;
    cfg.validate()?;
    Ok((cfg, problem))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).with_context(|| format!("creating {}", path.display())).map_err(Failure::Solver)
}

fn emit(report: &ExperimentReport, c: &Common, title: &str) -> Result<(), Failure> {
    match &c.out {
        Some(path) => report.write_csv(create(path)?)?,
        None => report.write_csv(io::stdout().lock())?,
    }
    if let Some(path) = &c.svg {
        report.write_svg(create(path)?, title)?;
    }
    Ok(())
}

fn parse_levels(spec: &str) -> anyhow::Result<Vec<u32>> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once("..") {
        let (a, b): (u32, u32) = (a.trim().parse()?, b.trim_start_matches('=').trim().parse()?);
        if b < a {
            return Err(anyhow!("empty level range {spec}"));
        }
        return Ok((a..=b).collect());
    }
    spec.split(',').map(|x| x.trim().parse::<u32>().map_err(|e| anyhow!("bad level `{x}`: {e}"))).collect()
}

fn solve_cmd(args: &SolveArgs, dim: usize) -> Result<(), Failure> {
    let (cfg, kind) = build_config(&args.common, dim)?;
    let out = solver::solve(&cfg, kind)?;
    let mut report = ExperimentReport::new(Sweep::Refinement);
    report.meta("dim", dim);
    report.meta("s", cfg.s);
    report.meta("k", cfg.k);
    report.meta("M", cfg.m);
    report.meta("cg_residual", format!("{:.3e}", out.stats.residual));
    report.rows.push(ReportRow {
        level: cfg.level,
        h: out.h,
        dofs: out.dofs,
        l2_error: out.l2_error,
        rate: None,
        cg_iters: out.stats.iterations,
        seconds: out.seconds,
        k: cfg.k,
        m: cfg.m,
    });
    match &args.common.out {
        Some(path) => report.write_csv(create(path)?)?,
        None => report.write_csv(io::stdout().lock())?,
    }
    if args.common.svg.is_some() || args.export_mesh.is_some() || args.export_matrix.is_some() {
        let op = FracOperator::build(&SolveConfig { n_minus: Some(0), n_plus: Some(0), ..cfg.clone() })?;
        if let Some(path) = &args.common.svg {
            // pointwise error at the unknowns against |x|
            let problem = ModelProblem::new(kind, dim, cfg.s)?;
            let mut pts: Vec<(f64, f64)> = op
                .mesh
                .dof_vertices()
                .iter()
                .zip(&out.coeffs)
                .map(|(&v, u)| {
                    let x = op.mesh.vertices[v];
                    let r = if dim == 1 { x[0] } else { x[0].hypot(x[1]) };
                    (r, (u - problem.u_exact(x)).abs())
                })
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let xlabel = if dim == 1 { "x" } else { "|x|" };
            let plot = LinePlot { title: "pointwise error", xlabel, ylabel: "|u_h - u|", log_x: false, series: vec![pts] };
            create(path)?.write_all(plot.render().as_bytes()).map_err(|e| Failure::Solver(e.into()))?;
        }
        if let Some(path) = &args.export_mesh {
            write_mesh(&op.extension_mesh(1.0)?, create(path)?)?;
        }
        if let Some(path) = &args.export_matrix {
            assemble_stiffness(&op.mesh).write_coordinate(create(path)?)?;
        }
    }
    Ok(())
}

fn study_cmd(args: &StudyArgs, sweep: Sweep) -> Result<(), Failure> {
    if args.dim != 1 && args.dim != 2 {
        return Err(usage(anyhow!("--dim must be 1 or 2")));
    }
    let (cfg, kind) = build_config(&args.common, args.dim)?;
    let count = args.count.max(2);
    let (report, title) = match sweep {
        Sweep::Refinement => {
            let levels = match &args.levels {
                Some(l) => parse_levels(l).map_err(usage)?,
                None => (cfg.level.saturating_sub(3).max(1)..=cfg.level).collect(),
            };
            (solver::convergence_study(&cfg, &levels, kind)?, "L2 error against h")
        }
        Sweep::K => {
            let (lo, hi) = (args.k_min.unwrap_or(0.2), args.k_max.unwrap_or(1.6));
            if !(lo > 0.0 && hi >= lo) {
                return Err(usage(anyhow!("need 0 < k-min <= k-max")));
            }
            // decreasing k, geometric spacing
            let ks: Vec<f64> = (0..count).map(|i| hi * (lo / hi).powf(i as f64 / (count - 1) as f64)).collect();
            (solver::k_study(&cfg, &ks, kind)?, "L2 error against 1/k")
        }
        Sweep::M => {
            let (lo, hi) = (args.m_min.unwrap_or(0.5), args.m_max.unwrap_or(8.0));
            if !(lo > 0.0 && hi >= lo) {
                return Err(usage(anyhow!("need 0 < m-min <= m-max")));
            }
            let ms: Vec<f64> = (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect();
            (solver::m_study(&cfg, &ms, kind)?, "L2 error against M")
        }
    };
    emit(&report, &args.common, title)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve1d(a) => solve_cmd(a, 1),
        Command::Solve2d(a) => solve_cmd(a, 2),
        Command::Convergence(a) => study_cmd(a, Sweep::Refinement),
        Command::Kstudy(a) => study_cmd(a, Sweep::K),
        Command::Mstudy(a) => study_cmd(a, Sweep::M),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver failure: {e:#}");
            ExitCode::from(3)
        }
    }
}
