use std::time::Instant;

use super::{FracOperator, RhsMode, SolveConfig};
use crate::error::{domain, Result};
use crate::fem::{assemble_load, assemble_pair, l2_error};
use crate::linalg::{cg, DstPreconditioner, SolveStats};
use crate::parallel::Execution;
use crate::reference::{rl_load_1d, ModelProblem, ProblemKind};
use crate::report::{fit_log_linear, ExperimentReport, ReportRow, Sweep};

/// Result of one outer solve.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// Values at the unknowns of the physical-domain mesh.
    pub coeffs: Vec<f64>,
    pub stats: SolveStats,
    pub l2_error: f64,
    /// Vertices of a graded truncated mesh.
    pub dofs: usize,
    pub h: f64,
    /// Wall time of operator construction and outer solve.
    pub seconds: f64,
}

/// Load vector on the unknowns of `op.mesh`.
pub fn load_vector(op: &FracOperator, cfg: &SolveConfig, problem: &ModelProblem) -> Result<Vec<f64>> {
    match cfg.rhs {
        RhsMode::Projected => assemble_load(&op.mesh, &|x| problem.rhs(x), cfg.load_order),
        RhsMode::ExactRl => {
            if op.dim() != 1 || problem.kind != ProblemKind::Smooth {
                return domain("exact-rl is only available for the 1D smooth problem");
            }
            if (cfg.s - 0.5).abs() < 1e-12 {
                return domain("exact-rl invalid at s=0.5");
            }
            rl_load_1d(&op.mesh, cfg.s)
        }
    }
}

/// Solves the model problem with an operator that has already been built.
pub fn solve_with(op: &FracOperator, cfg: &SolveConfig, problem: &ModelProblem) -> Result<(Vec<f64>, SolveStats)> {
    let b = load_vector(op, cfg, problem)?;
    let apply = |u: &[f64]| op.apply(u);
    if !cfg.precondition {
        return cg(&apply, &b, None, cfg.tol, cfg.max_iter);
    }
    if op.dim() == 1 {
        let dst = DstPreconditioner::new(op.n(), cfg.s)?;
        cg(&apply, &b, Some(&|r: &[f64]| dst.apply(r)), cfg.tol, cfg.max_iter)
    } else {
        let (m, a) = assemble_pair(&op.mesh, Execution::Sequential);
        let inv: Vec<f64> =
            m.diagonal().iter().zip(a.diagonal()).map(|(mq, aq)| 1.0 / (mq.powf(1.0 - cfg.s) * aq.powf(cfg.s))).collect();
        cg(&apply, &b, Some(&|r: &[f64]| r.iter().zip(&inv).map(|(x, d)| x * d).collect()), cfg.tol, cfg.max_iter)
    }
}

/// Builds the operator, solves and measures the `L2(D)` error.
pub fn solve(cfg: &SolveConfig, kind: ProblemKind) -> Result<SolveOutcome> {
    let start = Instant::now();
    let problem = ModelProblem::new(kind, cfg.dim, cfg.s)?;
    if cfg.rhs == RhsMode::ExactRl && (cfg.s - 0.5).abs() < 1e-12 {
        return domain("exact-rl invalid at s=0.5");
    }
    cfg.validate()?;
    let op = FracOperator::build(cfg)?;
    let (coeffs, stats) = solve_with(&op, cfg, &problem)?;
    let err = l2_error(&op.mesh, &coeffs, &|x| problem.u_exact(x), cfg.error_order)?;
    let h = if cfg.dim == 1 { cfg.h() } else { op.mesh.quality().max_size };
    Ok(SolveOutcome { coeffs, stats, l2_error: err, dofs: op.extension_vertices()?, h, seconds: start.elapsed().as_secs_f64() })
}

fn row(cfg: &SolveConfig, out: &SolveOutcome) -> ReportRow {
    ReportRow {
        level: cfg.level,
        h: out.h,
        dofs: out.dofs,
        l2_error: out.l2_error,
        rate: None,
        cg_iters: out.stats.iterations,
        seconds: out.seconds,
        k: cfg.k,
        m: cfg.m,
    }
}

fn describe(cfg: &SolveConfig, kind: ProblemKind, report: &mut ExperimentReport) {
    let problem = match kind {
        ProblemKind::Nonsmooth => "nonsmooth",
        ProblemKind::Smooth => "smooth",
    };
    report.meta("dim", cfg.dim);
    report.meta("problem", problem);
    report.meta("s", cfg.s);
    report.meta("k", cfg.k);
    report.meta("M", cfg.m);
    report.meta("d", cfg.d);
    report.meta("delta", cfg.delta());
    report.meta("rhs", if cfg.rhs == RhsMode::ExactRl { "exact-rl" } else { "projected" });
}

/// Solves on each level with fixed `k` and `M`.
pub fn convergence_study(cfg: &SolveConfig, levels: &[u32], kind: ProblemKind) -> Result<ExperimentReport> {
    if levels.len() < 2 {
        return domain("a convergence study needs at least two levels");
    }
    let mut report = ExperimentReport::new(Sweep::Refinement);
    describe(cfg, kind, &mut report);
    for &level in levels {
        let c = SolveConfig { level, ..cfg.clone() };
        report.rows.push(row(&c, &solve(&c, kind)?));
    }
    report.compute_rates();
    Ok(report)
}

/// Leading rows whose error stays above `factor` times the final error,
/// i.e. the points before the error levels off.
fn pre_plateau(errors: &[f64], factor: f64) -> usize {
    let floor = errors.last().copied().unwrap_or(0.0);
    errors.iter().take_while(|&&e| e > factor * floor).count()
}

/// Plateau detection threshold relative to the most accurate run.
pub const PLATEAU_FACTOR: f64 = 1.5;

fn sweep(cfg: &SolveConfig, kind: ProblemKind, sweep: Sweep, values: &[f64]) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(sweep);
    describe(cfg, kind, &mut report);
    let mut xs = Vec::new();
    for &v in values {
        let c = match sweep {
            Sweep::K => SolveConfig { k: v, ..cfg.clone() },
            _ => SolveConfig { m: v, ..cfg.clone() },
        };
        report.rows.push(row(&c, &solve(&c, kind)?));
        xs.push(if sweep == Sweep::K { 1.0 / v } else { v });
    }
    let errors: Vec<f64> = report.rows.iter().map(|r| r.l2_error).collect();
    let n = pre_plateau(&errors, PLATEAU_FACTOR);
    if let Some((slope, r2)) = fit_log_linear(&xs[..n], &errors[..n]) {
        report.footer.push(("exp_rate".into(), format!("{:.6}", -slope)));
        report.footer.push(("r2".into(), format!("{r2:.6}")));
    } else {
        report.footer.push(("exp_rate".into(), "nan".into()));
        report.footer.push(("r2".into(), "nan".into()));
    }
    report.footer.push(("fit_points".into(), n.to_string()));
    report.footer.push(("plateau".into(), format!("{:.6e}", errors.last().copied().unwrap_or(f64::NAN))));
    Ok(report)
}

/// Error against the quadrature spacing, ordered as given (use decreasing
/// `k`). The footer holds the fitted decay rate in `1/k` over the rows
/// before the plateau.
pub fn k_study(cfg: &SolveConfig, ks: &[f64], kind: ProblemKind) -> Result<ExperimentReport> {
    sweep(cfg, kind, Sweep::K, ks)
}

/// Error against the truncation parameter (use increasing `M`).
pub fn m_study(cfg: &SolveConfig, ms: &[f64], kind: ProblemKind) -> Result<ExperimentReport> {
    sweep(cfg, kind, Sweep::M, ms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_detection() {
        assert_eq!(pre_plateau(&[1e-1, 1e-2, 1e-3, 1.1e-4, 1e-4], 1.5), 3);
        assert_eq!(pre_plateau(&[], 1.5), 0);
    }

    #[test]
    fn exact_rl_rejected_at_half() {
        let cfg = SolveConfig { s: 0.5, rhs: RhsMode::ExactRl, level: 3, ..Default::default() };
        let err = solve(&cfg, ProblemKind::Smooth).unwrap_err();
        assert!(err.to_string().contains("exact-rl invalid at s=0.5"));
    }

    #[test]
    fn nonsmooth_1d_center_value() {
        let cfg = SolveConfig { s: 0.5, level: 7, k: 0.3, m: 6.0, ..Default::default() };
        let out = solve(&cfg, ProblemKind::Nonsmooth).unwrap();
        let n = out.coeffs.len();
        assert!((out.coeffs[n / 2] - 1.0).abs() < 3e-2, "{}", out.coeffs[n / 2]);
        assert!(out.l2_error < 2e-2);
    }
}
