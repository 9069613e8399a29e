//! Acceptance suite. Runs every criterion at its pinned tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any of them fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use statrs::function::gamma::gamma;

use fraclap::fem::{quad_matrices, segment_matrices};
use fraclap::linalg::dst::dst_apply;
use fraclap::mesh::NestingMap;
use fraclap::quadrature::Rule;
use fraclap::reference::{rl_stiffness_1d, ProblemKind};
use fraclap::report::ExperimentReport;
use fraclap::solver::{self, FracOperator, RhsMode, SolveConfig};
use fraclap::specfun::{hyp2f1, Hyp2F1Params};

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, lines: vec![] }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines.push(format!("    [{}] {line}", if ok { "ok" } else { "!!" }));
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    (a / b).max(b / a)
}

fn footer(r: &ExperimentReport, key: &str) -> f64 {
    r.footer.iter().find(|(k, _)| k == key).and_then(|(_, v)| v.parse().ok()).unwrap_or(f64::NAN)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// 1D smooth problem with the exact Riemann–Liouville load
fn c1() -> fraclap::error::Result<Outcome> {
    let table: [(f64, [f64; 6], [f64; 5]); 3] = [
        (0.3, [4.51e-4, 1.42e-4, 4.25e-5, 1.34e-5, 4.43e-6, 1.50e-6], [1.58, 1.63, 1.66, 1.59, 1.56]),
        (0.4, [3.47e-4, 1.02e-4, 3.31e-5, 1.14e-5, 4.06e-6, 1.46e-6], [1.77, 1.62, 1.54, 1.49, 1.48]),
        (0.7, [9.27e-4, 4.16e-4, 1.80e-4, 7.66e-5, 3.21e-5, 1.33e-5], [1.16, 1.21, 1.23, 1.25, 1.27]),
    ];
    let mut out = Outcome::new();
    for (s, errs, rates) in table {
        let cfg = SolveConfig { s, k: 0.2, m: 6.0, rhs: RhsMode::ExactRl, ..Default::default() };
        let report = solver::convergence_study(&cfg, &[4, 5, 6, 7, 8, 9], ProblemKind::Smooth)?;
        for (i, row) in report.rows.iter().enumerate() {
            let r = ratio(row.l2_error, errs[i]);
            let mut line = format!("s={s} h=1/{}: error {:.3e} (ref {:.2e}, x{r:.2})", 1 << row.level, row.l2_error, errs[i]);
            let mut ok = r <= 1.5;
            if let Some(rate) = row.rate {
                let dr = (rate - rates[i - 1]).abs();
                ok &= dr <= 0.15;
                line += &format!(", rate {rate:.3} (ref {:.2}, diff {dr:.3})", rates[i - 1]);
            }
            out.check(ok, line);
        }
    }
    Ok(out)
}

// 2D disk, f = 1, levels with 345 .. 21569 unknowns
fn c2() -> fraclap::error::Result<Outcome> {
    let table: [(f64, [f64; 4], f64); 3] = [
        (0.3, [2.69e-1, 1.59e-1, 9.56e-2, 5.71e-2], 0.745),
        (0.5, [1.63e-1, 9.07e-2, 5.05e-2, 2.78e-2], 0.863),
        (0.7, [1.03e-1, 5.55e-2, 2.95e-2, 1.54e-2], 0.937),
    ];
    let dofs = [345, 1361, 5409, 21569];
    let mut out = Outcome::new();
    for (s, errs, rate) in table {
        let cfg = SolveConfig { dim: 2, s, k: 0.25, m: 4.0, ..Default::default() };
        let report = solver::convergence_study(&cfg, &[2, 3, 4, 5], ProblemKind::Nonsmooth)?;
        for (i, row) in report.rows.iter().enumerate() {
            let r = ratio(row.l2_error, errs[i]);
            out.check(
                r <= 1.5 && row.dofs == dofs[i],
                format!("s={s} dofs={}: error {:.3e} (ref {:.2e}, x{r:.2})", row.dofs, row.l2_error, errs[i]),
            );
        }
        let last = report.rows.last().and_then(|r| r.rate).unwrap_or(f64::NAN);
        out.check((last - rate).abs() <= 0.1, format!("s={s}: final rate {last:.3} (ref {rate})"));
    }
    Ok(out)
}

// quadrature and truncation decay down to the spatial plateau
fn c3() -> fraclap::error::Result<Outcome> {
    let mut out = Outcome::new();
    let base = SolveConfig { s: 0.5, level: 12, ..Default::default() };
    let ks = [2.0, 1.6, 1.3, 1.1, 0.9, 0.75, 0.6, 0.5, 0.4, 0.3, 0.2];
    let kr = solver::k_study(&SolveConfig { m: 12.0, ..base.clone() }, &ks, ProblemKind::Nonsmooth)?;
    let ms = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0];
    let mr = solver::m_study(&SolveConfig { k: 0.2, ..base }, &ms, ProblemKind::Nonsmooth)?;
    for (name, r) in [("k-sweep", &kr), ("M-sweep", &mr)] {
        let (r2, pts, rate) = (footer(r, "r2"), footer(r, "fit_points"), footer(r, "exp_rate"));
        out.check(r2 >= 0.98 && pts >= 3.0, format!("{name}: R^2 {r2:.4} over {pts} pre-plateau points, slope {rate:.3}"));
    }
    let (pk, pm) = (footer(&kr, "plateau"), footer(&mr, "plateau"));
    let gap = (pk - pm).abs() / pk.max(pm);
    out.check(gap <= 0.05, format!("plateaus {pk:.4e} and {pm:.4e} differ by {:.2}%", 100.0 * gap));
    Ok(out)
}

fn assembled(cfg: &SolveConfig) -> fraclap::error::Result<Vec<Vec<f64>>> {
    let op = FracOperator::build(cfg)?;
    let n = op.n();
    (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            op.apply(&e)
        })
        .collect()
}

fn rl_gap(s: f64, k: f64, m: f64) -> fraclap::error::Result<f64> {
    let cfg = SolveConfig { s, k, m, level: 3, ..Default::default() };
    let b = assembled(&cfg)?;
    let op = FracOperator::build(&SolveConfig { n_minus: Some(0), n_plus: Some(0), ..cfg })?;
    let a = rl_stiffness_1d(&op.mesh, s)?.to_dense();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a.iter().flatten().zip(b.iter().flatten()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Ok(diff / scale)
}

// assembled operator against the closed-form Riemann–Liouville stiffness
fn c4() -> fraclap::error::Result<Outcome> {
    let mut out = Outcome::new();
    for s in [0.3, 0.7] {
        let base = rl_gap(s, 0.15, 8.0)?;
        let half_k = rl_gap(s, 0.075, 8.0)?;
        let more_m = rl_gap(s, 0.15, 10.0)?;
        out.check(base <= 2e-2, format!("s={s}: gap {base:.5e} at k=0.15, M=8 (limit 2e-2)"));
        out.check(half_k < base, format!("s={s}: gap {half_k:.9e} at k=0.075 (must drop below {base:.9e})"));
        out.check(more_m < base, format!("s={s}: gap {more_m:.9e} at M=10 (must drop below {base:.9e})"));
    }
    Ok(out)
}

// structural properties
fn c5() -> fraclap::error::Result<Outcome> {
    let mut out = Outcome::new();
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);

    for cfg in [
        SolveConfig { s: 0.3, level: 6, ..Default::default() },
        SolveConfig { dim: 2, s: 0.7, level: 2, ..Default::default() },
    ] {
        let op = FracOperator::build(&cfg)?;
        let n = op.n();
        let mut sym = 0.0f64;
        let mut min_energy = f64::INFINITY;
        for _ in 0..20 {
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (bu, bv) = (op.apply(&u)?, op.apply(&v)?);
            let (uu, vv) = (dot(&u, &bu), dot(&v, &bv));
            sym = sym.max((dot(&v, &bu) - dot(&u, &bv)).abs() / (uu * vv).sqrt());
            min_energy = min_energy.min(uu / dot(&u, &u)).min(vv / dot(&v, &v));
        }
        out.check(sym <= 1e-10, format!("dim={} symmetry defect {sym:.2e} over 20 pairs", cfg.dim));
        out.check(min_energy > 0.0, format!("dim={} smallest Rayleigh quotient {min_energy:.3e} over 40 vectors", cfg.dim));
    }

    let mut inv = 0.0f64;
    for n in [7, 63, 255, 1000] {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w = dst_apply(&dst_apply(&v));
        inv = inv.max(v.iter().zip(&w).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())));
    }
    out.check(inv <= 1e-12, format!("DST involution defect {inv:.2e}"));

    let mut elem = 0.0f64;
    for len in [0.125, 0.3, 2.0] {
        let (m, a) = segment_matrices(len);
        for i in 0..2 {
            for j in 0..2 {
                let same = i == j;
                let (me, ae) = if same { (len / 3.0, 1.0 / len) } else { (len / 6.0, -1.0 / len) };
                elem = elem.max((m[i][j] - me).abs()).max((a[i][j] - ae).abs());
            }
        }
    }
    let rule = Rule::legendre(2)?;
    let corners = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
    for (wx, wy, ox, oy) in [(1.0, 1.0, 0.0, 0.0), (0.5, 0.25, 1.0, -2.0), (0.1, 0.3, -0.4, 0.7)] {
        let x = corners.map(|c| [ox + 0.5 * (1.0 + c[0]) * wx, oy + 0.5 * (1.0 + c[1]) * wy]);
        let (m, a) = quad_matrices(&x, &rule);
        let m1 = |same: bool| if same { 1.0 / 3.0 } else { 1.0 / 6.0 };
        let k1 = |same: bool| if same { 1.0 } else { -1.0 };
        for i in 0..4 {
            for j in 0..4 {
                let (sx, sy) = (corners[i][0] == corners[j][0], corners[i][1] == corners[j][1]);
                let me = wx * wy * m1(sx) * m1(sy);
                let ae = wy / wx * k1(sx) * m1(sy) + wx / wy * m1(sx) * k1(sy);
                elem = elem.max((m[i][j] - me).abs()).max((a[i][j] - ae).abs());
            }
        }
    }
    out.check(elem <= 1e-13, format!("element matrices deviate from closed forms by {elem:.2e}"));

    let mut round_trip = true;
    let mut checked = 0;
    for cfg in [SolveConfig { level: 5, ..Default::default() }, SolveConfig { dim: 2, level: 2, ..Default::default() }] {
        let op = FracOperator::build(&SolveConfig { n_minus: Some(0), n_plus: Some(0), ..cfg })?;
        for t in [0.01, 0.5, 1.0, 3.0, 1e4] {
            let ext = op.extension_mesh(t)?;
            let map = NestingMap::build(&op.mesh, &ext)?;
            let v: Vec<f64> = (0..op.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let e = map.extend(&v);
            round_trip &= map.restrict(&e) == v;
            round_trip &= e.iter().filter(|x| **x != 0.0).count() == v.iter().filter(|x| **x != 0.0).count();
            checked += 1;
        }
    }
    out.check(round_trip, format!("nesting extend/restrict identity on {checked} extension meshes"));

    // limit z -> 1 extracted from values at z < 1 with the known w^(1-2s) correction
    let mut hyp = 0.0f64;
    for d in [1.0, 2.0] {
        for s in [0.1, 0.2, 0.3, 0.4, 0.45] {
            let (a, b, c) = (d / 2.0 + s, s - 1.0, d / 2.0);
            let expo = c - a - b;
            let gauss = gamma(c) * gamma(expo) / (gamma(c - a) * gamma(c - b));
            let z1 = 1.0 - 1e-13;
            let w1 = 1.0 - z1;
            let z2 = 1.0 - w1 / 4.0;
            let w2 = 1.0 - z2;
            let (f1, f2) = (hyp2f1(Hyp2F1Params { a, b, c, z: z1 })?, hyp2f1(Hyp2F1Params { a, b, c, z: z2 })?);
            let q = (w2 / w1).powf(expo);
            let limit = (f2 - q * f1) / (1.0 - q);
            hyp = hyp.max((limit - gauss).abs() / gauss.abs());
        }
    }
    out.check(hyp <= 1e-8, format!("2F1 limit at z=1 vs Gauss formula, relative gap {hyp:.2e}"));
    Ok(out)
}

// DST preconditioner against plain CG
fn c6() -> fraclap::error::Result<Outcome> {
    let mut out = Outcome::new();
    let iters = |level: u32, precondition: bool| -> fraclap::error::Result<usize> {
        let cfg = SolveConfig { s: 0.5, level, precondition, max_iter: 20000, ..Default::default() };
        Ok(solver::solve(&cfg, ProblemKind::Nonsmooth)?.stats.iterations)
    };
    let (p8, p11) = (iters(8, true)?, iters(11, true)?);
    let (u8, u11) = (iters(8, false)?, iters(11, false)?);
    out.check(p11 as f64 <= 1.2 * p8 as f64, format!("DST: {p8} iterations at h=1/256, {p11} at h=1/2048"));
    out.check(u11 >= 2 * u8, format!("plain CG: {u8} iterations at h=1/256, {u11} at h=1/2048"));
    Ok(out)
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> fraclap::error::Result<Outcome>); 6] = [
        ("C1", "1D smooth solution with exact load, errors x1.5 and rates +-0.15", c1),
        ("C2", "2D disk f=1, errors x1.5 and final rates +-0.1", c2),
        ("C3", "exponential decay in 1/k and M, R^2 >= 0.98, plateaus within 5%", c3),
        ("C4", "gap to Riemann-Liouville stiffness <= 2e-2 and decreasing", c4),
        ("C5", "operator and building-block properties", c5),
        ("C6", "DST growth <= 20%, plain CG at least doubles", c6),
    ];
    let mut failed = 0;
    for (id, title, run) in criteria {
        let start = Instant::now();
        let (pass, lines) = match run() {
            Ok(o) => (o.pass, o.lines),
            Err(e) => (false, vec![format!("    error: {e}")]),
        };
        println!("{} {id} {title} ({:.1} s)", if pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        for l in lines {
            println!("{l}");
        }
        failed += usize::from(!pass);
    }
    println!("acceptance: {} passed, {failed} failed", 6 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
