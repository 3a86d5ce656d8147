//! The dual intersection complex and the checks of its duality with the
//! stratification of the central fibre.

use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::toric::{cell_polytope, CellPolytope};

use super::{DegenerationData, DegenerationError};

#[derive(Debug, Clone, PartialEq)]
pub struct DualCell {
    /// Components meeting along the stratum.
    pub components: Vec<usize>,
    pub dim: usize,
    pub polytope: CellPolytope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualComplex {
    /// Complex dimension of the fibres.
    pub n: usize,
    /// Cells sorted by dimension, then by component set.
    pub cells: Vec<DualCell>,
    /// Pairs `(a, b)` of component sets with cell `a` a proper face of `b`.
    pub faces: Vec<(Vec<usize>, Vec<usize>)>,
}

impl DualComplex {
    /// Number of cells of each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let top = self.cells.iter().map(|c| c.dim).max().map_or(0, |d| d + 1);
        let mut f = vec![0; top];
        for c in &self.cells {
            f[c.dim] += 1;
        }
        f
    }

    /// Canonical text form: cells with dimensions and vertices, then the
    /// face relations as index pairs.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(s, "dimension {}", self.n);
        let _ = writeln!(s, "f-vector {}", join(&self.f_vector()));
        let _ = writeln!(s, "cells {}", self.cells.len());
        for (i, c) in self.cells.iter().enumerate() {
            let verts: Vec<String> = c
                .polytope
                .vertices
                .iter()
                .map(|v| {
                    format!(
                        "({})",
                        v.iter()
                            .map(BigInt::to_string)
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                })
                .collect();
            let _ = writeln!(
                s,
                "cell {i} dim {} components {} vertices {}",
                c.dim,
                join(&c.components),
                verts.join(" ")
            );
        }
        let _ = writeln!(s, "faces {}", self.faces.len());
        let index = |k: &[usize]| self.cells.iter().position(|c| c.components == k);
        for (a, b) in &self.faces {
            match (index(a), index(b)) {
                (Some(i), Some(j)) => {
                    let _ = writeln!(s, "{i} < {j}");
                }
                _ => {
                    let _ = writeln!(s, "[{}] < [{}]", join(a), join(b));
                }
            }
        }
        s
    }
}

/// One cell per stratum, realised as the height-one slice of its local cone.
pub fn dual_complex(d: &DegenerationData) -> Result<DualComplex, DegenerationError> {
    let mut cells = d
        .strata()
        .iter()
        .map(|s| {
            let polytope = cell_polytope(&s.cone, &s.gorenstein)?;
            Ok(DualCell {
                components: s.components.clone(),
                dim: polytope.dim(),
                polytope,
            })
        })
        .collect::<Result<Vec<_>, DegenerationError>>()?;
    cells.sort_by(|a, b| (a.dim, &a.components).cmp(&(b.dim, &b.components)));
    let mut faces = Vec::new();
    for a in &cells {
        for b in &cells {
            if a.components.len() < b.components.len()
                && a.components.iter().all(|x| b.components.contains(x))
            {
                faces.push((a.components.clone(), b.components.clone()));
            }
        }
    }
    Ok(DualComplex {
        n: d.dim(),
        cells,
        faces,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A stratum with no cell.
    MissingCell {
        components: Vec<usize>,
    },
    /// A cell with no stratum.
    UnmatchedCell {
        components: Vec<usize>,
    },
    DuplicateCell {
        components: Vec<usize>,
    },
    /// `cell_dim + stratum_dim ≠ n`.
    DimensionLaw {
        components: Vec<usize>,
        cell_dim: usize,
        stratum_dim: usize,
        n: usize,
    },
    /// Declared dimension differs from that of the realising polytope.
    Realization {
        components: Vec<usize>,
        declared: usize,
        actual: usize,
    },
    /// Face relation between cells does not reverse stratum containment.
    FaceOrder {
        a: Vec<usize>,
        b: Vec<usize>,
        cell_face: bool,
        stratum_contains: bool,
    },
    /// The declared face list differs from the geometric one.
    FaceList {
        a: Vec<usize>,
        b: Vec<usize>,
        declared: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DualityReport {
    pub violations: Vec<Violation>,
    /// Ordered pairs of cells compared for the face order.
    pub pairs_checked: usize,
}

impl DualityReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

fn is_geometric_face(a: &CellPolytope, b: &CellPolytope) -> bool {
    // faces of a simplex are exactly the subsets of its vertices
    a.vertices.len() < b.vertices.len() && a.vertices.iter().all(|v| b.vertices.contains(v))
}

/// Checks the bijection with strata, the dimension law and the
/// order-reversing face correspondence, pairwise over all cells.
pub fn verify_duality(dc: &DualComplex, d: &DegenerationData) -> DualityReport {
    let mut report = DualityReport::default();
    let v = &mut report.violations;
    let n = d.dim();
    for s in d.strata() {
        if !dc.cells.iter().any(|c| c.components == s.components) {
            v.push(Violation::MissingCell {
                components: s.components.clone(),
            });
        }
    }
    let mut matched = Vec::new();
    for (i, c) in dc.cells.iter().enumerate() {
        if dc.cells[..i].iter().any(|o| o.components == c.components) {
            v.push(Violation::DuplicateCell {
                components: c.components.clone(),
            });
            continue;
        }
        let Some(s) = d.strata().iter().find(|s| s.components == c.components) else {
            v.push(Violation::UnmatchedCell {
                components: c.components.clone(),
            });
            continue;
        };
        if c.dim != c.polytope.dim() {
            v.push(Violation::Realization {
                components: c.components.clone(),
                declared: c.dim,
                actual: c.polytope.dim(),
            });
        }
        if c.dim + s.dim() != n {
            v.push(Violation::DimensionLaw {
                components: c.components.clone(),
                cell_dim: c.dim,
                stratum_dim: s.dim(),
                n,
            });
        }
        matched.push((c, s));
    }
    for (ca, sa) in &matched {
        for (cb, sb) in &matched {
            if ca.components == cb.components {
                continue;
            }
            report.pairs_checked += 1;
            let cell_face = is_geometric_face(&ca.polytope, &cb.polytope);
            // closure of X_a contains X_b iff face_b ⊆ face_a
            let stratum_contains = sb.face.is_subface_of(&sa.face);
            if cell_face != stratum_contains {
                v.push(Violation::FaceOrder {
                    a: ca.components.clone(),
                    b: cb.components.clone(),
                    cell_face,
                    stratum_contains,
                });
            }
            let declared = dc
                .faces
                .iter()
                .any(|(x, y)| *x == ca.components && *y == cb.components);
            if declared != cell_face {
                v.push(Violation::FaceList {
                    a: ca.components.clone(),
                    b: cb.components.clone(),
                    declared,
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::{mumford_degeneration, PolyDecomposition};
    use num_rational::BigRational;

    fn load(s: &str) -> (DegenerationData, DualComplex) {
        let d = mumford_degeneration(&PolyDecomposition::parse(s).unwrap()).unwrap();
        let dc = dual_complex(&d).unwrap();
        (d, dc)
    }

    const SQUARE: &str = include_str!("../../fixtures/square_diagonal.txt");

    #[test]
    fn square_is_a_segment() {
        let (d, dc) = load(SQUARE);
        assert_eq!(dc.f_vector(), vec![2, 1]);
        let edge = dc.cells.iter().find(|c| c.dim == 1).unwrap();
        assert_eq!(edge.components, vec![0, 1]);
        assert_eq!(dc.faces.len(), 2);
        let r = verify_duality(&dc, &d);
        assert!(r.pass(), "{:?}", r.violations);
        assert_eq!(r.pairs_checked, 6);
    }

    #[test]
    fn trivial_is_a_point() {
        let (d, dc) = load(include_str!("../../fixtures/trivial.txt"));
        assert_eq!(dc.f_vector(), vec![1]);
        assert!(verify_duality(&dc, &d).pass());
    }

    #[test]
    fn two_by_two_is_a_triangle() {
        let (d, dc) = load(include_str!("../../fixtures/two_by_two.txt"));
        assert_eq!(dc.f_vector(), vec![3, 3, 1]);
        assert!(verify_duality(&dc, &d).pass());
        let tri = dc.cells.iter().find(|c| c.dim == 2).unwrap();
        assert_eq!(tri.polytope.normalized_volume, BigInt::from(1));
    }

    #[test]
    fn interval_is_a_segment() {
        let (d, dc) = load(include_str!("../../fixtures/interval.txt"));
        assert_eq!(dc.f_vector(), vec![2, 1]);
        assert!(verify_duality(&dc, &d).pass());
    }

    #[test]
    fn tampering_is_detected() {
        let (d, dc) = load(SQUARE);
        let mut gone = dc.clone();
        gone.cells.retain(|c| c.dim != 1);
        gone.faces.clear();
        let r = verify_duality(&gone, &d);
        assert!(r.violations.contains(&Violation::MissingCell {
            components: vec![0, 1]
        }));

        let mut wrong = dc.clone();
        wrong.cells.iter_mut().find(|c| c.dim == 1).unwrap().dim = 2;
        let r = verify_duality(&wrong, &d);
        assert!(r.violations.contains(&Violation::DimensionLaw {
            components: vec![0, 1],
            cell_dim: 2,
            stratum_dim: 1,
            n: 2
        }));

        let mut extra = dc.clone();
        extra.faces.push((vec![0], vec![1]));
        assert!(!verify_duality(&extra, &d).pass());
    }

    #[test]
    fn affine_shift_keeps_combinatorics() {
        let pd = PolyDecomposition::parse(include_str!("../../fixtures/two_by_two.txt")).unwrap();
        let shifted = pd.sheared(&[3, -2], &BigRational::from_integer(5.into()));
        let a = dual_complex(&mumford_degeneration(&pd).unwrap()).unwrap();
        let b = dual_complex(&mumford_degeneration(&shifted).unwrap()).unwrap();
        assert_eq!(a.faces, b.faces);
        assert_eq!(a.f_vector(), b.f_vector());
        assert_ne!(a.cells[0].polytope.vertices, b.cells[0].polytope.vertices);
    }

    #[test]
    fn text_is_canonical() {
        let (_, dc) = load(SQUARE);
        let t = dc.to_text();
        assert!(t.starts_with("dimension 2\nf-vector 2 1\ncells 3\n"));
        assert!(t.ends_with("faces 2\n0 < 2\n1 < 2\n"));
    }
}
