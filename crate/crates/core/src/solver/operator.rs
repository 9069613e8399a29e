use std::sync::Arc;

use rand::{Rng, SeedableRng};

use super::ring::{angular_index, graded_points, interval_sigma, segment_excess, uniform_points, RingLayers};
use crate::error::{domain, Error, Result};
use crate::fem::{assemble_pair, assemble_pair_with, SparseMatrix};
use crate::linalg::ordering::{adjacency, nested_dissection};
use crate::linalg::{CholeskyFactor, SymbolicCholesky, TridiagFactor};
use crate::mesh::{coarse_disk_mesh, coarse_unit_disk, graded_extension_1d, uniform_extension_1d, uniform_interval_mesh, Mesh, NestingMap};
use crate::parallel::{self, Execution};
use crate::sinc::{QuadratureNode, QuadratureScheme};
use crate::truncation::TruncationSpec;

use super::SolveConfig;

const NODE_CHUNK: usize = 4;

/// How the truncated meshes are generated from the configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Geometry {
    Interval { h: f64 },
    Disk { level: u32, half_width: f64 },
}

/// Discrete integral fractional Laplacian on the physical domain:
/// `B U = sum_j w_j R M_j (exp(y_j) M_j + A_j)^{-1} A_j E U`.
pub struct FracOperator {
    pub scheme: QuadratureScheme,
    pub truncation: TruncationSpec,
    /// Mesh of the physical domain; its unknowns are the unknowns of `B`.
    pub mesh: Mesh,
    exec: Execution,
    geometry: Geometry,
    backend: Backend,
}

enum Backend {
    Interval(IntervalBackend),
    Disk(DiskBackend),
}

/// Cached data of one quadrature node.
struct NodeSystem<F> {
    weight: f64,
    shift: f64,
    factor: F,
}

impl<F> NodeSystem<F> {
    /// `M (shift M + A)^{-1} A w`, evaluated as `M w - shift M K^{-1} M w` for
    /// small shifts, where `K` is nearly singular but `shift K^{-1}` is not.
    fn contribution(&self, w: &[f64], mass: impl Fn(&[f64]) -> Vec<f64>, stiffness: impl Fn(&[f64]) -> Vec<f64>, solve: impl Fn(&F, &mut [f64])) -> Vec<f64> {
        if self.shift < 1.0 {
            let mw = mass(w);
            let mut z = mw.clone();
            solve(&self.factor, &mut z);
            let mz = mass(&z);
            mw.iter().zip(mz).map(|(a, b)| a - self.shift * b).collect()
        } else {
            let mut z = stiffness(w);
            solve(&self.factor, &mut z);
            mass(&z)
        }
    }
}

struct IntervalBackend {
    cells: usize,
    h: f64,
    nodes: Vec<NodeSystem<TridiagFactor>>,
}

struct DiskBackend {
    interior: usize,
    mass: SparseMatrix,
    stiffness: SparseMatrix,
    nodes: Vec<NodeSystem<CholeskyFactor>>,
}

fn inner_error(node: &QuadratureNode) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::InnerSolve { node: node.j, source: Box::new(e) }
}

impl FracOperator {
    /// Builds the operator and factors every shifted problem.
    pub fn build(cfg: &SolveConfig) -> Result<Self> {
        cfg.validate()?;
        let scheme = cfg.scheme()?;
        let truncation = TruncationSpec::new(cfg.m)?;
        let (geometry, mesh) = match cfg.dim {
            1 => (Geometry::Interval { h: cfg.h() }, uniform_interval_mesh(cfg.h())?),
            _ => {
                let mesh = coarse_unit_disk(cfg.half_width)?.refine_times(cfg.level as usize)?;
                (Geometry::Disk { level: cfg.level, half_width: cfg.half_width }, mesh)
            }
        };
        let backend = match geometry {
            Geometry::Interval { h } => Backend::Interval(IntervalBackend::build(&scheme, &truncation, h, cfg.execution)?),
            Geometry::Disk { level, .. } => Backend::Disk(DiskBackend::build(&scheme, &truncation, &mesh, level, cfg.execution)?),
        };
        let op = Self { scheme, truncation, mesh, exec: cfg.execution, geometry, backend };
        if cfg!(debug_assertions) {
            op.check_symmetric_positive()?;
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    pub fn n(&self) -> usize {
        self.mesh.n_dofs()
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    /// Same operator with another execution policy for `apply`.
    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    /// Number of distinct truncated meshes: one per node with `t > 1`, plus a
    /// single shared mesh for all nodes with `t <= 1`.
    pub fn distinct_meshes(&self) -> usize {
        let graded = self.scheme.nodes.iter().filter(|n| n.t > 1.0).count();
        graded + usize::from(graded < self.scheme.len())
    }

    /// Bytes held by the cached factorizations.
    pub fn factor_bytes(&self) -> usize {
        match &self.backend {
            Backend::Interval(b) => b.nodes.len() * 2 * b.cells * std::mem::size_of::<f64>(),
            Backend::Disk(b) => b.nodes.iter().map(|n| n.factor.value_bytes()).sum(),
        }
    }

    /// Vertices of the truncated mesh used for node scale `t`.
    pub fn extension_mesh(&self, t: f64) -> Result<Mesh> {
        let m = self.truncation.m;
        let gamma = self.truncation.dilation_factor(t)?;
        match self.geometry {
            Geometry::Interval { .. } if t > 1.0 => graded_extension_1d(&self.mesh, m, gamma),
            Geometry::Interval { .. } => uniform_extension_1d(&self.mesh, gamma),
            Geometry::Disk { level, half_width } => {
                coarse_disk_mesh(gamma, m.ceil() as usize, half_width)?.refine_times(level as usize)
            }
        }
    }

    /// Number of vertices of a graded truncated mesh. All nodes with `t > 1`
    /// share this count.
    pub fn extension_vertices(&self) -> Result<usize> {
        Ok(self.extension_mesh(2.0)?.n_vertices())
    }

    /// `B u`.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.n() {
            return domain(format!("expected a vector of length {}, got {}", self.n(), u.len()));
        }
        let nodes = &self.scheme.nodes;
        let idx: Vec<usize> = (0..nodes.len()).collect();
        Ok(match &self.backend {
            Backend::Interval(b) => {
                parallel::sum_vectors(self.exec, &idx, self.n(), NODE_CHUNK, |&j, acc| b.accumulate(j, u, acc))
            }
            Backend::Disk(b) => parallel::sum_vectors(self.exec, &idx, self.n(), NODE_CHUNK, |&j, acc| b.accumulate(j, u, acc)),
        })
    }

    /// `B u` computed by assembling and factoring every truncated problem on
    /// its full mesh. Slow; used to validate the condensed backends.
    pub fn apply_direct(&self, u: &[f64]) -> Result<Vec<f64>> {
        let contributions = parallel::map(self.exec, &self.scheme.nodes, |node| -> Result<Vec<f64>> {
            let ext = self.extension_mesh(node.t)?;
            let map = NestingMap::build(&self.mesh, &ext)?;
            let (m, a) = assemble_pair(&ext, Execution::Sequential);
            let shift = node.y.exp();
            let k = m.with_values(shifted(&m, &a, shift));
            let f = CholeskyFactor::factor(&k).map_err(inner_error(node))?;
            let z = f.solve(&a.matvec(&map.extend(u)));
            let w = self.scheme.weight(node);
            Ok(map.restrict(&m.matvec(&z)).into_iter().map(|v| w * v).collect())
        });
        let mut out = vec![0.0; self.n()];
        for c in contributions {
            for (o, v) in out.iter_mut().zip(c?) {
                *o += v;
            }
        }
        Ok(out)
    }

    fn check_symmetric_positive(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Ok(());
        }
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (bx, by) = (self.apply(&x)?, self.apply(&y)?);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let (xby, ybx, xbx) = (dot(&x, &by), dot(&y, &bx), dot(&x, &bx));
        let scale = dot(&bx, &bx).sqrt() * dot(&y, &y).sqrt();
        if (xby - ybx).abs() > 1e-9 * scale {
            return Err(Error::NotSpd(format!("operator not symmetric: x'By = {xby:e}, y'Bx = {ybx:e}")));
        }
        if !(xbx > 0.0) {
            return Err(Error::NotSpd(format!("operator not positive: x'Bx = {xbx:e}")));
        }
        Ok(())
    }
}

/// Values of `shift * m + a`; both come from the same assembly and share a pattern.
fn shifted(m: &SparseMatrix, a: &SparseMatrix, shift: f64) -> Vec<f64> {
    m.values().iter().zip(a.values()).map(|(x, y)| shift * x + y).collect()
}

impl IntervalBackend {
    fn build(scheme: &QuadratureScheme, trunc: &TruncationSpec, h: f64, exec: Execution) -> Result<Self> {
        let cells = (2.0 / h).round() as usize;
        let nodes = parallel::map(exec, &scheme.nodes, |node| -> Result<NodeSystem<TridiagFactor>> {
            let shift = node.y.exp();
            let gamma = trunc.dilation_factor(node.t)?;
            let points = if node.t > 1.0 { graded_points(h, trunc.m, gamma) } else { uniform_points(h, gamma) };
            let sigma = interval_sigma(&points, shift);
            let ex = segment_excess(h, shift);
            let mut excess = vec![2.0 * ex; cells + 1];
            excess[0] = ex + sigma;
            excess[cells] = ex + sigma;
            let ko = shift * h / 6.0 - 1.0 / h;
            let factor = TridiagFactor::from_excess(&excess, &vec![ko; cells]).map_err(inner_error(node))?;
            Ok(NodeSystem { weight: scheme.weight(node), shift, factor })
        });
        Ok(Self { cells, h, nodes: nodes.into_iter().collect::<Result<_>>()? })
    }

    fn accumulate(&self, j: usize, u: &[f64], acc: &mut [f64]) {
        let node = &self.nodes[j];
        let n = self.cells;
        let h = self.h;
        let mut w = vec![0.0; n + 1];
        w[1..n].copy_from_slice(u);
        let at = |x: &[f64], v: usize, d: isize| {
            let i = v as isize + d;
            if i < 0 || i > n as isize {
                0.0
            } else {
                x[i as usize]
            }
        };
        let edges = |v: usize| {
            let left = if v > 0 { 1.0 } else { 0.0 };
            let right = if v < n { 1.0 } else { 0.0 };
            (left, right)
        };
        let mass = |x: &[f64]| {
            (0..=n)
                .map(|v| {
                    let (l, r) = edges(v);
                    h * (2.0 * (l + r) * x[v] + l * at(x, v, -1) + r * at(x, v, 1)) / 6.0
                })
                .collect::<Vec<f64>>()
        };
        let stiffness = |x: &[f64]| {
            (0..=n)
                .map(|v| {
                    let (l, r) = edges(v);
                    ((l + r) * x[v] - l * at(x, v, -1) - r * at(x, v, 1)) / h
                })
                .collect::<Vec<f64>>()
        };
        let out = node.contribution(&w, mass, stiffness, |f, z| f.solve_in_place(z));
        for v in 1..n {
            acc[v - 1] += node.weight * out[v];
        }
    }
}

impl DiskBackend {
    fn build(scheme: &QuadratureScheme, trunc: &TruncationSpec, mesh: &Mesh, level: u32, exec: Execution) -> Result<Self> {
        let m = 4usize << level;
        let layers = (trunc.m.ceil() as usize) << level;
        let interior = mesh.n_dofs();
        // closed-domain numbering: interior unknowns first, then the boundary by angle
        let mut numbering: Vec<Option<usize>> = mesh.dof_map().to_vec();
        let mut boundary_seen = vec![false; m];
        for v in 0..mesh.n_vertices() {
            if mesh.dirichlet[v] {
                let p = angular_index(mesh.vertices[v], m);
                if boundary_seen[p] {
                    return Err(Error::Mesh(format!("two boundary vertices share angular index {p}")));
                }
                boundary_seen[p] = true;
                numbering[v] = Some(interior + p);
            }
        }
        if boundary_seen.iter().any(|b| !b) {
            return Err(Error::Mesh(format!("domain boundary does not have {m} vertices")));
        }
        let n = interior + m;
        let (mass, stiffness) = assemble_pair_with(mesh, &numbering, n, |_| true, exec);
        let dense_b: Vec<(usize, usize, f64)> =
            (0..m).flat_map(|p| (0..m).map(move |q| (interior + p, interior + q, 0.0))).collect();
        let block = SparseMatrix::from_triplets(n, &dense_b, true);
        let pattern = SparseMatrix::union_pattern(n, &[&mass, &stiffness, &block]);

        let mut points = vec![[0.0; 2]; n];
        for v in 0..mesh.n_vertices() {
            if let Some(i) = numbering[v] {
                points[i] = mesh.vertices[v];
            }
        }
        let adj = adjacency(&SparseMatrix::union_pattern(n, &[&mass, &stiffness]));
        let mut perm = nested_dissection(&points, &adj, &(0..interior).collect::<Vec<_>>());
        perm.extend(interior..n);
        let symbolic = Arc::new(SymbolicCholesky::new(&pattern, perm)?);

        let mv = mass.values_on(&pattern)?;
        let av = stiffness.values_on(&pattern)?;
        // position of each boundary pair in the pattern's value array
        let mut slots = vec![0usize; m * m];
        let (rp, ci) = (pattern.row_ptr(), pattern.col_idx());
        for p in 0..m {
            let r = interior + p;
            for k in rp[r]..rp[r + 1] {
                if ci[k] >= interior {
                    slots[p * m + ci[k] - interior] = k;
                }
            }
        }
        let nodes = parallel::map(exec, &scheme.nodes, |node| -> Result<NodeSystem<CholeskyFactor>> {
            let shift = node.y.exp();
            let gamma = trunc.dilation_factor(node.t)?;
            let row = RingLayers::new(gamma, layers, m).circulant_row(shift);
            let mut values: Vec<f64> = mv.iter().zip(&av).map(|(x, y)| shift * x + y).collect();
            for p in 0..m {
                for q in 0..m {
                    values[slots[p * m + q]] += row[(q + m - p) % m];
                }
            }
            let factor = CholeskyFactor::new(symbolic.clone(), &values).map_err(inner_error(node))?;
            Ok(NodeSystem { weight: scheme.weight(node), shift, factor })
        });
        Ok(Self { interior, mass, stiffness, nodes: nodes.into_iter().collect::<Result<_>>()? })
    }

    fn accumulate(&self, j: usize, u: &[f64], acc: &mut [f64]) {
        let node = &self.nodes[j];
        let mut w = u.to_vec();
        w.resize(self.mass.n(), 0.0);
        let out = node.contribution(
            &w,
            |x| self.mass.matvec(x),
            |x| self.stiffness.matvec(x),
            |f, z| f.solve_in_place(z, &mut Vec::new()),
        );
        for (a, v) in acc.iter_mut().zip(&out[..self.interior]) {
            *a += node.weight * v;
        }
    }
}
