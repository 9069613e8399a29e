//! Plain-text mesh format: `v x [y]` per vertex, then `c i0 i1 [i2 i3] flag`
//! per cell, where `flag` is 1 for cells of the physical domain. Vertices
//! carrying a Dirichlet condition are listed as `b i`.

use std::io::{BufRead, Write};

use super::{Cells, Mesh};
use crate::error::{Error, Result};

pub fn write_mesh<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    let two_d = mesh.dim() == 2;
    for p in &mesh.vertices {
        if two_d {
            writeln!(w, "v {:.17e} {:.17e}", p[0], p[1])?;
        } else {
            writeln!(w, "v {:.17e}", p[0])?;
        }
    }
    for i in 0..mesh.n_cells() {
        let vs: Vec<String> = mesh.cells.vertices(i).iter().map(|v| v.to_string()).collect();
        writeln!(w, "c {} {}", vs.join(" "), u8::from(mesh.in_domain[i]))?;
    }
    for (i, _) in mesh.dirichlet.iter().enumerate().filter(|(_, &d)| d) {
        writeln!(w, "b {i}")?;
    }
    Ok(())
}

pub fn read_mesh<R: BufRead>(r: R) -> Result<Mesh> {
    let mut vertices = Vec::new();
    let mut segs = Vec::new();
    let mut quads = Vec::new();
    let mut in_domain = Vec::new();
    let mut bnd = Vec::new();
    let bad = |n: usize, l: &str| Error::Mesh(format!("line {n}: cannot parse `{l}`"));
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let mut it = line.split_whitespace();
        let tag = it.next();
        let rest: Vec<&str> = it.collect();
        match tag {
            None => continue,
            Some("v") => {
                let xs: Vec<f64> = rest.iter().map(|t| t.parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad(n + 1, &line))?;
                match xs.as_slice() {
                    [x] => vertices.push([*x, 0.0]),
                    [x, y] => vertices.push([*x, *y]),
                    _ => return Err(bad(n + 1, &line)),
                }
            }
            Some("c") => {
                let is: Vec<usize> = rest.iter().map(|t| t.parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad(n + 1, &line))?;
                match is.as_slice() {
                    [a, b, f] => {
                        segs.push([*a, *b]);
                        in_domain.push(*f == 1);
                    }
                    [a, b, c, d, f] => {
                        quads.push([*a, *b, *c, *d]);
                        in_domain.push(*f == 1);
                    }
                    _ => return Err(bad(n + 1, &line)),
                }
            }
            Some("b") => bnd.push(rest.first().and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| bad(n + 1, &line))?),
            Some(_) => return Err(bad(n + 1, &line)),
        }
    }
    let cells = match (segs.is_empty(), quads.is_empty()) {
        (false, true) => Cells::Segments(segs),
        (true, false) => Cells::Quads(quads),
        _ => return Err(Error::Mesh("mesh file must contain cells of exactly one kind".into())),
    };
    let mut dirichlet = vec![false; vertices.len()];
    for b in bnd {
        *dirichlet.get_mut(b).ok_or_else(|| Error::Mesh(format!("boundary vertex {b} out of range")))? = true;
    }
    Mesh::new(vertices, cells, dirichlet, in_domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{coarse_disk_mesh, graded_extension_1d, uniform_interval_mesh, DEFAULT_HALF_WIDTH};

    #[test]
    fn round_trips() {
        let base = uniform_interval_mesh(0.5).unwrap();
        let meshes = [
            graded_extension_1d(&base, 2.0, 4.0).unwrap(),
            coarse_disk_mesh(6.0, 4, DEFAULT_HALF_WIDTH).unwrap().refine().unwrap(),
        ];
        for m in meshes {
            let mut buf = Vec::new();
            write_mesh(&m, &mut buf).unwrap();
            let back = read_mesh(buf.as_slice()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn format_lines() {
        let m = uniform_interval_mesh(1.0).unwrap();
        let mut buf = Vec::new();
        write_mesh(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("v -1"));
        assert!(text.contains("c 0 1 1\n"));
        assert!(read_mesh("x 1 2\n".as_bytes()).is_err());
    }
}
