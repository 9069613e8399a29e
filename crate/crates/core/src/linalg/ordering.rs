//! Fill-reducing orderings. Every ordering is returned as `perm[new] = old`.

use std::collections::VecDeque;

use crate::fem::SparseMatrix;

const LEAF: usize = 48;

/// Adjacency lists (without self loops) of a structurally symmetric matrix.
pub fn adjacency(a: &SparseMatrix) -> Vec<Vec<usize>> {
    (0..a.n()).map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect()).collect()
}

/// Inverse permutation.
pub fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

/// Geometric nested dissection of the vertices `nodes` of a graph with
/// coordinates `points`.
///
/// Each step splits at the median of the wider coordinate, moves the vertices
/// of one half that touch the other half into a separator, orders both halves
/// recursively and puts the separator last.
pub fn nested_dissection(points: &[[f64; 2]], adj: &[Vec<usize>], nodes: &[usize]) -> Vec<usize> {
    let mut mark = vec![u32::MAX; points.len()];
    let mut out = Vec::with_capacity(nodes.len());
    dissect(points, adj, nodes.to_vec(), &mut mark, 0, &mut out);
    out
}

fn dissect(points: &[[f64; 2]], adj: &[Vec<usize>], mut nodes: Vec<usize>, mark: &mut [u32], depth: u32, out: &mut Vec<usize>) {
    if nodes.len() <= LEAF {
        out.extend(nodes);
        return;
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for &v in &nodes {
        for d in 0..2 {
            lo[d] = lo[d].min(points[v][d]);
            hi[d] = hi[d].max(points[v][d]);
        }
    }
    let axis = usize::from(hi[1] - lo[1] > hi[0] - lo[0]);
    nodes.sort_by(|&a, &b| points[a][axis].total_cmp(&points[b][axis]).then(a.cmp(&b)));
    let half = nodes.len() / 2;
    let tag = 2 * depth + 1;
    for &v in &nodes[half..] {
        mark[v] = tag;
    }
    let mut left = Vec::with_capacity(half);
    let mut sep = Vec::new();
    for &v in &nodes[..half] {
        if adj[v].iter().any(|&w| mark[w] == tag) {
            sep.push(v);
        } else {
            left.push(v);
        }
    }
    let right: Vec<usize> = nodes[half..].to_vec();
    for &v in &nodes {
        mark[v] = u32::MAX;
    }
    dissect(points, adj, left, mark, depth + 1, out);
    dissect(points, adj, right, mark, depth + 1, out);
    out.extend(sep);
}

/// Reverse Cuthill–McKee ordering, for matrices without coordinates.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (adj[v].len(), v));
    for &start in &by_degree {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !seen[w]).collect();
            next.sort_by_key(|&w| (adj[w].len(), w));
            for w in next {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}
