//! Lattice polyhedral decompositions of a polytope in dimension one or two.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::DegenerationError;

/// A face of the decomposition, as the sorted indices of its vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    pub dim: usize,
    pub vertices: Vec<usize>,
}

impl Face {
    /// Whether `self ⊆ other`, valid for faces of a face-to-face
    /// decomposition.
    pub fn is_subface_of(&self, other: &Face) -> bool {
        self.vertices
            .iter()
            .all(|v| other.vertices.binary_search(v).is_ok())
    }
}

/// A polytope with a face-to-face decomposition into lattice polytopes and
/// a value of `ψ` at every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyDecomposition {
    dim: usize,
    vertices: Vec<Vec<i64>>,
    /// maximal cells; in two dimensions the vertices are in counter-clockwise
    /// order
    cells: Vec<Vec<usize>>,
    psi: Vec<BigRational>,
    /// codimension-one faces shared by two cells
    interior: Vec<(Vec<usize>, usize, usize)>,
}

fn cross(o: &[i64], a: &[i64], b: &[i64]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

/// Strict convex hull (no collinear points), counter-clockwise, as indices
/// into `pts`.
fn hull(pts: &[Vec<i64>], idx: &[usize]) -> Vec<usize> {
    let mut order = idx.to_vec();
    order.sort_by(|&a, &b| pts[a].cmp(&pts[b]));
    order.dedup_by(|a, b| pts[*a] == pts[*b]);
    if order.len() < 3 {
        return order;
    }
    let mut h: Vec<usize> = Vec::with_capacity(2 * order.len());
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &p in iter {
            while h.len() >= start + 2
                && cross(&pts[h[h.len() - 2]], &pts[h[h.len() - 1]], &pts[p]) <= 0
            {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
    }
    h
}

fn twice_area(pts: &[Vec<i64>], cyc: &[usize]) -> i128 {
    (1..cyc.len().saturating_sub(1))
        .map(|k| cross(&pts[cyc[0]], &pts[cyc[k]], &pts[cyc[k + 1]]))
        .sum()
}

impl PolyDecomposition {
    /// Validates that the cells are full-dimensional lattice polytopes given
    /// by their vertices and that they tile the convex hull of all vertices
    /// face to face.
    pub fn new(
        vertices: Vec<Vec<i64>>,
        cells: Vec<Vec<usize>>,
        psi: Vec<BigRational>,
    ) -> Result<Self, DegenerationError> {
        let dim = vertices
            .first()
            .map(|v| v.len())
            .ok_or_else(|| DegenerationError::NotCovering("no vertices".into()))?;
        if !(1..=2).contains(&dim) {
            return Err(DegenerationError::UnsupportedDimension(dim));
        }
        for (index, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(DegenerationError::BadVertex {
                    index,
                    msg: format!("{} coordinates, expected {dim}", v.len()),
                });
            }
            if vertices[..index].contains(v) {
                return Err(DegenerationError::BadVertex {
                    index,
                    msg: format!("duplicate of an earlier vertex {v:?}"),
                });
            }
        }
        if psi.len() < vertices.len() {
            return Err(DegenerationError::MissingPsi(psi.len()));
        }
        if cells.is_empty() {
            return Err(DegenerationError::NotCovering("no cells".into()));
        }
        let mut used = vec![false; vertices.len()];
        for (cell, c) in cells.iter().enumerate() {
            for (k, &i) in c.iter().enumerate() {
                if i >= vertices.len() {
                    return Err(DegenerationError::BadCell {
                        cell,
                        msg: format!("vertex index {i} out of range"),
                    });
                }
                if c[..k].contains(&i) {
                    return Err(DegenerationError::BadCell {
                        cell,
                        msg: format!("vertex {i} listed twice"),
                    });
                }
                used[i] = true;
            }
        }
        if let Some(index) = used.iter().position(|u| !u) {
            return Err(DegenerationError::BadVertex {
                index,
                msg: "not a vertex of any cell".into(),
            });
        }
        let (cells, interior) = if dim == 1 {
            Self::check_1d(&vertices, cells)?
        } else {
            Self::check_2d(&vertices, cells)?
        };
        Ok(PolyDecomposition {
            dim,
            vertices,
            cells,
            psi,
            interior,
        })
    }

    fn check_1d(
        pts: &[Vec<i64>],
        cells: Vec<Vec<usize>>,
    ) -> Result<(Vec<Vec<usize>>, Vec<(Vec<usize>, usize, usize)>), DegenerationError> {
        let mut sorted = Vec::with_capacity(cells.len());
        for (cell, mut c) in cells.into_iter().enumerate() {
            if c.len() != 2 {
                return Err(DegenerationError::BadCell {
                    cell,
                    msg: format!("an interval needs 2 vertices, got {}", c.len()),
                });
            }
            c.sort_by_key(|&i| pts[i][0]);
            sorted.push(c);
        }
        let lo = pts.iter().map(|p| p[0]).min().unwrap_or(0);
        let hi = pts.iter().map(|p| p[0]).max().unwrap_or(0);
        let total: i64 = sorted.iter().map(|c| pts[c[1]][0] - pts[c[0]][0]).sum();
        if total != hi - lo {
            return Err(DegenerationError::NotCovering(format!(
                "cell lengths sum to {total}, polytope has length {}",
                hi - lo
            )));
        }
        let mut interior = Vec::new();
        for v in 0..pts.len() {
            let left: Vec<usize> = (0..sorted.len()).filter(|&c| sorted[c][1] == v).collect();
            let right: Vec<usize> = (0..sorted.len()).filter(|&c| sorted[c][0] == v).collect();
            let boundary = pts[v][0] == lo || pts[v][0] == hi;
            let ok = if boundary {
                left.len() + right.len() == 1
            } else {
                left.len() == 1 && right.len() == 1
            };
            if !ok {
                return Err(DegenerationError::NotCovering(format!(
                    "point {:?} is an end of {} cells on the left and {} on the right",
                    pts[v],
                    left.len(),
                    right.len()
                )));
            }
            if !boundary {
                interior.push((vec![v], left[0], right[0]));
            }
        }
        Ok((sorted, interior))
    }

    fn check_2d(
        pts: &[Vec<i64>],
        cells: Vec<Vec<usize>>,
    ) -> Result<(Vec<Vec<usize>>, Vec<(Vec<usize>, usize, usize)>), DegenerationError> {
        let mut cyc = Vec::with_capacity(cells.len());
        let mut area = 0i128;
        for (cell, c) in cells.into_iter().enumerate() {
            let h = hull(pts, &c);
            if h.len() != c.len() || h.len() < 3 {
                return Err(DegenerationError::BadCell {
                    cell,
                    msg: "vertices are not in strictly convex position".into(),
                });
            }
            area += twice_area(pts, &h);
            cyc.push(h);
        }
        let all: Vec<usize> = (0..pts.len()).collect();
        let outer = hull(pts, &all);
        let outer_area = twice_area(pts, &outer);
        if area != outer_area {
            return Err(DegenerationError::NotCovering(format!(
                "cell areas sum to {}/2, polytope has area {}/2",
                area, outer_area
            )));
        }
        // directed edges per undirected edge
        let mut edges: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (cell, h) in cyc.iter().enumerate() {
            for k in 0..h.len() {
                let (a, b) = (h[k], h[(k + 1) % h.len()]);
                edges
                    .entry((a.min(b), a.max(b)))
                    .or_default()
                    .push((cell, a < b));
            }
        }
        let on_boundary = |a: usize, b: usize| {
            let s: Vec<i128> = pts.iter().map(|p| cross(&pts[a], &pts[b], p)).collect();
            s.iter().all(|&x| x >= 0) || s.iter().all(|&x| x <= 0)
        };
        let mut interior = Vec::new();
        for ((a, b), users) in &edges {
            let bad = |msg: String| {
                DegenerationError::NotCovering(format!("edge {:?}-{:?}: {msg}", pts[*a], pts[*b]))
            };
            if on_boundary(*a, *b) {
                if users.len() != 1 {
                    return Err(bad(format!("boundary edge used by {} cells", users.len())));
                }
            } else {
                if users.len() != 2 || users[0].1 == users[1].1 {
                    return Err(bad(format!(
                        "interior edge needs one cell on each side, found {}",
                        users.len()
                    )));
                }
                interior.push((vec![*a, *b], users[0].0, users[1].0));
            }
        }
        Ok((cyc, interior))
    }

    /// Reads the fixture format with sections `[polytope]` (one vertex per
    /// row), `[cells]` (vertex indices of each maximal cell, one cell per
    /// row) and `[psi]` (`index = value` rows, values integers or `p/q`).
    /// Text after `#` is ignored.
    pub fn parse(text: &str) -> Result<Self, DegenerationError> {
        #[derive(PartialEq)]
        enum Sec {
            None,
            Polytope,
            Cells,
            Psi,
        }
        let mut sec = Sec::None;
        let mut vertices = Vec::new();
        let mut cells = Vec::new();
        let mut psi: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| DegenerationError::Parse { line, msg };
            match body {
                "[polytope]" => sec = Sec::Polytope,
                "[cells]" => sec = Sec::Cells,
                "[psi]" => sec = Sec::Psi,
                _ if body.starts_with('[') => return Err(err(format!("unknown section {body}"))),
                _ => match sec {
                    Sec::None => return Err(err("data before the first section".into())),
                    Sec::Polytope => vertices.push(
                        body.split_whitespace()
                            .map(|s| s.parse::<i64>().map_err(|e| err(format!("{s:?}: {e}"))))
                            .collect::<Result<Vec<_>, _>>()?,
                    ),
                    Sec::Cells => cells.push(
                        body.split_whitespace()
                            .map(|s| s.parse::<usize>().map_err(|e| err(format!("{s:?}: {e}"))))
                            .collect::<Result<Vec<_>, _>>()?,
                    ),
                    Sec::Psi => {
                        let (k, v) = body
                            .split_once('=')
                            .ok_or_else(|| err("expected `index = value`".into()))?;
                        let k: usize = k.trim().parse().map_err(|e| err(format!("{k:?}: {e}")))?;
                        let v = parse_rational(v.trim()).map_err(err)?;
                        if psi.insert(k, v).is_some() {
                            return Err(err(format!("psi given twice for vertex {k}")));
                        }
                    }
                },
            }
        }
        let n = vertices.len();
        let mut values = Vec::with_capacity(n);
        for k in 0..n {
            values.push(psi.remove(&k).ok_or(DegenerationError::MissingPsi(k))?);
        }
        if let Some((&k, _)) = psi.iter().next() {
            return Err(DegenerationError::BadVertex {
                index: k,
                msg: "psi given for a vertex that does not exist".into(),
            });
        }
        Self::new(vertices, cells, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    /// Maximal cells by vertex index.
    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn psi(&self) -> &[BigRational] {
        &self.psi
    }

    /// Codimension-one faces shared by two maximal cells, with those cells.
    pub fn interior_facets(&self) -> &[(Vec<usize>, usize, usize)] {
        &self.interior
    }

    /// Every face of every cell, sorted by dimension then vertices.
    pub fn faces(&self) -> Vec<Face> {
        let mut out = Vec::new();
        for c in &self.cells {
            let mut v = c.clone();
            v.sort_unstable();
            out.push(Face {
                dim: self.dim,
                vertices: v,
            });
            if self.dim == 2 {
                for k in 0..c.len() {
                    let (a, b) = (c[k], c[(k + 1) % c.len()]);
                    out.push(Face {
                        dim: 1,
                        vertices: vec![a.min(b), a.max(b)],
                    });
                }
            }
            for &a in c {
                out.push(Face {
                    dim: 0,
                    vertices: vec![a],
                });
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Adds the integral affine function `x ↦ ⟨w, x⟩ + c` to `ψ`.
    pub fn sheared(&self, w: &[i64], c: &BigRational) -> Self {
        let mut out = self.clone();
        for (v, p) in out.vertices.iter().zip(out.psi.iter_mut()) {
            let lin: i64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
            *p = &*p + BigRational::from_integer(BigInt::from(lin)) + c;
        }
        out
    }
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|e| format!("{s:?}: {e}"))?;
    let d: BigInt = d.parse().map_err(|e| format!("{s:?}: {e}"))?;
    if d == BigInt::from(0) {
        return Err(format!("{s:?}: zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = include_str!("../../fixtures/square_diagonal.txt");
    const TWO: &str = include_str!("../../fixtures/two_by_two.txt");

    #[test]
    fn parses_fixtures() {
        let d = PolyDecomposition::parse(SQUARE).unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(d.cells().len(), 2);
        assert_eq!(d.interior_facets().len(), 1);
        assert_eq!(d.interior_facets()[0].0, vec![1, 2]);
        let d = PolyDecomposition::parse(TWO).unwrap();
        assert_eq!(d.interior_facets().len(), 3);
        // 3 cells, 3 + 3 + 4 boundary... 4 + 4 + 4 edges minus 3 shared
        let f = d.faces();
        assert_eq!(f.iter().filter(|f| f.dim == 2).count(), 3);
        assert_eq!(f.iter().filter(|f| f.dim == 1).count(), 9);
        assert_eq!(f.iter().filter(|f| f.dim == 0).count(), 7);
    }

    #[test]
    fn rejects_gaps_and_overlaps() {
        // missing the second triangle
        let gap = "[polytope]\n0 0\n1 0\n0 1\n1 1\n[cells]\n0 1 2\n[psi]\n0=0\n1=0\n2=0\n3=0\n";
        assert!(matches!(
            PolyDecomposition::parse(gap),
            Err(DegenerationError::BadVertex { index: 3, .. })
        ));
        let gap =
            "[polytope]\n0 0\n1 0\n0 1\n1 1\n[cells]\n0 1 2\n0 1 3\n[psi]\n0=0\n1=0\n2=0\n3=0\n";
        assert!(matches!(
            PolyDecomposition::parse(gap),
            Err(DegenerationError::NotCovering(_))
        ));
        // T-junction: big triangle against two small ones
        let t = "[polytope]\n0 0\n2 0\n0 2\n1 1\n2 2\n[cells]\n0 1 2\n1 4 3\n3 4 2\n[psi]\n0=0\n1=0\n2=0\n3=0\n4=0\n";
        assert!(matches!(
            PolyDecomposition::parse(t),
            Err(DegenerationError::NotCovering(_))
        ));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            PolyDecomposition::parse("0 0\n"),
            Err(DegenerationError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            PolyDecomposition::parse("[polytope]\n0 0 0\n[cells]\n0\n[psi]\n0=0\n"),
            Err(DegenerationError::UnsupportedDimension(3))
        ));
        assert!(matches!(
            PolyDecomposition::parse(
                "[polytope]\n0 0\n1 0\n0 1\n[cells]\n0 1 2\n[psi]\n0=0\n1=0\n"
            ),
            Err(DegenerationError::MissingPsi(2))
        ));
        // collinear listed vertex
        let c = "[polytope]\n0 0\n1 0\n2 0\n0 1\n[cells]\n0 1 2 3\n[psi]\n0=0\n1=0\n2=0\n3=0\n";
        assert!(matches!(
            PolyDecomposition::parse(c),
            Err(DegenerationError::BadCell { cell: 0, .. })
        ));
        assert_eq!(
            parse_rational("-3/6").unwrap(),
            BigRational::new((-1).into(), 2.into())
        );
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn one_dimensional() {
        let d = PolyDecomposition::parse(include_str!("../../fixtures/interval.txt")).unwrap();
        assert_eq!(d.interior_facets(), &[(vec![1], 0, 1)]);
        let bad = "[polytope]\n0\n1\n2\n[cells]\n0 2\n0 1\n[psi]\n0=0\n1=0\n2=0\n";
        assert!(PolyDecomposition::parse(bad).is_err());
    }
}
