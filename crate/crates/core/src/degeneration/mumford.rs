//! The Mumford degeneration attached to `(P, decomposition, ψ)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::toric::{exact, gorenstein_covector, Cone, Covector, Lattice, ToricError};

use super::{DegenerationError, Face, PolyDecomposition};

/// The lower facet of the lifted polyhedron over a maximal cell, where
/// `ψ(v) = ⟨slope, v⟩ + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerFacet {
    pub cell: usize,
    pub slope: Vec<BigInt>,
    pub offset: BigRational,
}

impl LowerFacet {
    /// Primitive inner normal `(-slope, 1)`.
    pub fn normal(&self) -> Vec<BigInt> {
        let mut n: Vec<BigInt> = self.slope.iter().map(|m| -m).collect();
        n.push(BigInt::one());
        n
    }

    fn eval(&self, v: &[i64]) -> BigRational {
        self.slope
            .iter()
            .zip(v)
            .fold(self.offset.clone(), |a, (m, x)| {
                a + BigRational::from_integer(m * BigInt::from(*x))
            })
    }
}

/// A nonempty intersection of components of the central fibre.
#[derive(Debug, Clone, PartialEq)]
pub struct Stratum {
    /// Maximal cells whose components contain the stratum.
    pub components: Vec<usize>,
    /// The face of the decomposition cut out by those cells.
    pub face: Face,
    /// Transverse local cone, spanned by the normals of the lower facets.
    pub cone: Cone,
    pub gorenstein: Covector,
}

impl Stratum {
    /// Complex dimension of the stratum.
    pub fn dim(&self) -> usize {
        self.face.dim
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegenerationData {
    decomposition: PolyDecomposition,
    facets: Vec<LowerFacet>,
    strata: Vec<Stratum>,
}

impl DegenerationData {
    pub fn dim(&self) -> usize {
        self.decomposition.dim()
    }

    pub fn decomposition(&self) -> &PolyDecomposition {
        &self.decomposition
    }

    /// Lower facets of the lifted polyhedron, one per component.
    pub fn facets(&self) -> &[LowerFacet] {
        &self.facets
    }

    pub fn components(&self) -> usize {
        self.facets.len()
    }

    /// Strata sorted by their component sets.
    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    /// Vertices `(v, ψ(v))` of the lifted polyhedron.
    pub fn lifted_vertices(&self) -> Vec<(Vec<i64>, BigRational)> {
        self.decomposition
            .vertices()
            .iter()
            .cloned()
            .zip(self.decomposition.psi().iter().cloned())
            .collect()
    }
}

fn affine_fit(pd: &PolyDecomposition, cell: usize) -> Result<LowerFacet, DegenerationError> {
    let n = pd.dim();
    let vs = &pd.cells()[cell];
    let pts = pd.vertices();
    // cells are strictly convex, so their first n + 1 vertices are affinely
    // independent
    let a: Vec<Vec<BigRational>> = vs[..=n]
        .iter()
        .map(|&i| {
            let mut row: Vec<BigRational> = pts[i]
                .iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect();
            row.push(BigRational::one());
            row
        })
        .collect();
    let inv = exact::inverse(&a).ok_or(DegenerationError::NotAffineOnCell { cell })?;
    let sol: Vec<BigRational> = (0..=n)
        .map(|r| {
            (0..=n).fold(BigRational::zero(), |acc, k| {
                acc + &inv[r][k] * &pd.psi()[vs[k]]
            })
        })
        .collect();
    if sol[..n].iter().any(|m| !m.is_integer()) {
        return Err(DegenerationError::NonIntegralSlope {
            cell,
            slope: format!(
                "({})",
                sol[..n]
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        });
    }
    let f = LowerFacet {
        cell,
        slope: sol[..n].iter().map(|m| m.to_integer()).collect(),
        offset: sol[n].clone(),
    };
    if vs.iter().any(|&i| f.eval(&pts[i]) != pd.psi()[i]) {
        return Err(DegenerationError::NotAffineOnCell { cell });
    }
    Ok(f)
}

/// Validates `ψ`, builds the lifted polyhedron and enumerates the strata of
/// the central fibre with their local cones.
pub fn mumford_degeneration(pd: &PolyDecomposition) -> Result<DegenerationData, DegenerationError> {
    let facets = (0..pd.cells().len())
        .map(|c| affine_fit(pd, c))
        .collect::<Result<Vec<_>, _>>()?;
    let pts = pd.vertices();
    for (facet, a, b) in pd.interior_facets() {
        for (lo, hi) in [(*a, *b), (*b, *a)] {
            let strict = pd.cells()[hi]
                .iter()
                .filter(|v| !facet.contains(v))
                .all(|&v| facets[lo].eval(&pts[v]) < pd.psi()[v]);
            if !strict {
                return Err(DegenerationError::NonConvexPsi {
                    facet: facet.clone(),
                    cells: (*a.min(b), *a.max(b)),
                });
            }
        }
    }
    let cell_faces: Vec<Face> = pd
        .cells()
        .iter()
        .map(|c| {
            let mut v = c.clone();
            v.sort_unstable();
            Face {
                dim: pd.dim(),
                vertices: v,
            }
        })
        .collect();
    let lattice = Lattice::new(pd.dim() + 1)?;
    let mut strata = Vec::new();
    for face in pd.faces() {
        let comps: Vec<usize> = (0..cell_faces.len())
            .filter(|&c| face.is_subface_of(&cell_faces[c]))
            .collect();
        let common: Vec<usize> = face
            .vertices
            .iter()
            .copied()
            .chain(
                cell_faces[comps[0]]
                    .vertices
                    .iter()
                    .copied()
                    .filter(|v| comps.iter().all(|&c| cell_faces[c].vertices.contains(v))),
            )
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        if common != face.vertices {
            continue;
        }
        let rays = comps.iter().map(|&c| facets[c].normal()).collect();
        let cone = match Cone::new(lattice, rays) {
            Ok(c) => c,
            Err(ToricError::NonSimplicial) => {
                return Err(DegenerationError::NonSimplicialStratum {
                    face: face.vertices.clone(),
                })
            }
            Err(e) => return Err(e.into()),
        };
        let gorenstein =
            gorenstein_covector(&cone).map_err(|e| DegenerationError::NotGorensteinLocally {
                face: face.vertices.clone(),
                reason: e.to_string(),
            })?;
        debug_assert!(cone.rays().iter().all(|r| gorenstein.pair(r).is_one()));
        strata.push(Stratum {
            components: comps,
            face,
            cone,
            gorenstein,
        });
    }
    strata.sort_by(|a, b| a.components.cmp(&b.components));
    Ok(DegenerationData {
        decomposition: pd.clone(),
        facets,
        strata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> DegenerationData {
        mumford_degeneration(&PolyDecomposition::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn square_diagonal() {
        let d = load(include_str!("../../fixtures/square_diagonal.txt"));
        assert_eq!(d.components(), 2);
        let s: Vec<(Vec<usize>, usize)> = d
            .strata()
            .iter()
            .map(|s| (s.components.clone(), s.dim()))
            .collect();
        assert_eq!(s, vec![(vec![0], 2), (vec![0, 1], 1), (vec![1], 2)]);
        assert_eq!(d.facets()[1].slope, vec![BigInt::from(1), BigInt::from(1)]);
        assert_eq!(d.facets()[1].offset, BigRational::from_integer((-1).into()));
    }

    #[test]
    fn trivial_and_two_by_two() {
        let d = load(include_str!("../../fixtures/trivial.txt"));
        assert_eq!(d.components(), 1);
        assert_eq!(d.strata().len(), 1);
        let d = load(include_str!("../../fixtures/two_by_two.txt"));
        let mut by_dim = [0usize; 3];
        for s in d.strata() {
            by_dim[s.dim()] += 1;
        }
        assert_eq!(by_dim, [1, 3, 3]);
        let deepest = d.strata().iter().find(|s| s.dim() == 0).unwrap();
        assert_eq!(deepest.components, vec![0, 1, 2]);
        assert_eq!(
            d.decomposition().vertices()[deepest.face.vertices[0]],
            vec![0, 0]
        );
    }

    #[test]
    fn psi_errors() {
        let base = "[polytope]\n0 0\n1 0\n0 1\n1 1\n[cells]\n0 1 2\n1 3 2\n[psi]\n0=0\n1=0\n2=0\n";
        let run = |v: &str| {
            mumford_degeneration(&PolyDecomposition::parse(&format!("{base}3={v}\n")).unwrap())
        };
        assert!(matches!(
            run("-1"),
            Err(DegenerationError::NonConvexPsi { .. })
        ));
        assert!(matches!(
            run("0"),
            Err(DegenerationError::NonConvexPsi { .. })
        ));
        assert!(matches!(
            run("1/2"),
            Err(DegenerationError::NonIntegralSlope { cell: 1, .. })
        ));
        assert!(run("3").is_ok());
        let sq = "[polytope]\n0 0\n1 0\n1 1\n0 1\n[cells]\n0 1 2 3\n[psi]\n0=0\n1=0\n2=0\n3=1\n";
        assert_eq!(
            mumford_degeneration(&PolyDecomposition::parse(sq).unwrap()),
            Err(DegenerationError::NotAffineOnCell { cell: 0 })
        );
    }

    #[test]
    fn four_cells_at_a_vertex_are_not_simplicial() {
        // psi = max(0, x) + max(0, y) on [-1,1]^2
        let text = "[polytope]\n-1 -1\n0 -1\n1 -1\n-1 0\n0 0\n1 0\n-1 1\n0 1\n1 1\n\
                    [cells]\n0 1 4 3\n1 2 5 4\n3 4 7 6\n4 5 8 7\n\
                    [psi]\n0=0\n1=0\n2=1\n3=0\n4=0\n5=1\n6=1\n7=1\n8=2\n";
        assert_eq!(
            mumford_degeneration(&PolyDecomposition::parse(text).unwrap()),
            Err(DegenerationError::NonSimplicialStratum { face: vec![4] })
        );
    }
}
