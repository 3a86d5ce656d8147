use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::domain::SimplexDomain;
use super::exact;
use super::ToricError;

/// The lattice `N ≅ ℤ^rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    rank: usize,
}

impl Lattice {
    pub fn new(rank: usize) -> Result<Self, ToricError> {
        if rank == 0 {
            return Err(ToricError::ZeroRank);
        }
        Ok(Lattice { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// A simplicial rational cone given by primitive ray generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    lattice: Lattice,
    rays: Vec<Vec<BigInt>>,
}

impl Cone {
    /// Builds a cone, dividing each ray by the gcd of its entries.
    ///
    /// Rejects zero rays and linearly dependent ray sets. Cones of lower
    /// dimension than the lattice are accepted here; operations that need a
    /// full-dimensional cone check that themselves.
    pub fn new(lattice: Lattice, rays: Vec<Vec<BigInt>>) -> Result<Self, ToricError> {
        if rays.is_empty() {
            return Err(ToricError::NoRays);
        }
        let mut prim = Vec::with_capacity(rays.len());
        for (index, r) in rays.into_iter().enumerate() {
            if r.len() != lattice.rank() {
                return Err(ToricError::ArityMismatch {
                    index,
                    got: r.len(),
                    rank: lattice.rank(),
                });
            }
            let g = exact::gcd_all(&r);
            if g.is_zero() {
                return Err(ToricError::ZeroRay(index));
            }
            prim.push(r.into_iter().map(|x| x / &g).collect::<Vec<_>>());
        }
        if prim.len() > lattice.rank() || exact::rank(&prim) < prim.len() {
            return Err(ToricError::NonSimplicial);
        }
        Ok(Cone {
            lattice,
            rays: prim,
        })
    }

    /// Convenience constructor from machine integers; the lattice rank is
    /// taken from the first ray.
    pub fn from_i64(rays: &[Vec<i64>]) -> Result<Self, ToricError> {
        let rank = rays.first().map(|r| r.len()).ok_or(ToricError::NoRays)?;
        let lattice = Lattice::new(rank)?;
        Cone::new(
            lattice,
            rays.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// Parses one ray per line as whitespace-separated integers. Text after
    /// `#` is ignored, as are blank lines.
    pub fn parse(text: &str) -> Result<Self, ToricError> {
        let mut rays: Vec<Vec<BigInt>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<BigInt>().map_err(|e| ToricError::Parse {
                        line: i + 1,
                        msg: format!("{tok:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(first) = rays.first() {
                if first.len() != row.len() {
                    return Err(ToricError::Parse {
                        line: i + 1,
                        msg: format!("expected {} entries, found {}", first.len(), row.len()),
                    });
                }
            }
            rays.push(row);
        }
        let rank = rays.first().map(|r| r.len()).ok_or(ToricError::NoRays)?;
        Cone::new(Lattice::new(rank)?, rays)
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.rays.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.rays.len() == self.lattice.rank()
    }

    /// Ray set in a canonical (lexicographically sorted) order.
    pub fn sorted_rays(&self) -> Vec<Vec<BigInt>> {
        let mut r = self.rays.clone();
        r.sort();
        r
    }

    /// Whether `v` lies in the closed cone.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        let rows: Vec<Vec<BigRational>> = (0..self.lattice.rank())
            .map(|i| {
                self.rays
                    .iter()
                    .map(|r| BigRational::from_integer(r[i].clone()))
                    .collect()
            })
            .collect();
        match exact::solve_particular(&rows, &exact::to_rat(v)) {
            Some(c) => {
                // the solution is unique because rays are independent; check
                // it actually reproduces v (the system may be inconsistent)
                let back: Vec<BigRational> = (0..self.lattice.rank())
                    .map(|i| {
                        self.rays
                            .iter()
                            .zip(&c)
                            .fold(BigRational::zero(), |a, (r, ci)| {
                                a + ci * BigRational::from_integer(r[i].clone())
                            })
                    })
                    .collect();
                back == exact::to_rat(v) && c.iter().all(|x| !x.is_negative())
            }
            None => false,
        }
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .rays
            .iter()
            .map(|r| {
                let e: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("({})", e.join(","))
            })
            .collect();
        write!(f, "cone[{}]", parts.join(" "))
    }
}

/// A rational covector in `M_ℚ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Covector {
    entries: Vec<BigRational>,
}

impl Covector {
    pub fn new(entries: Vec<BigRational>) -> Self {
        Covector { entries }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        Covector {
            entries: entries
                .iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    pub fn pair(&self, v: &[BigInt]) -> BigRational {
        exact::dot(&self.entries, v)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

impl fmt::Display for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", e.join(","))
    }
}

/// Dual cone `{u : ⟨u,v⟩ ≥ 0 for all v in c}` of a full-dimensional
/// simplicial cone, with primitive generators.
///
/// Its rays are the primitive multiples of the columns of `V⁻¹`, where `V`
/// has the rays of `c` as rows.
pub fn dual_cone(c: &Cone) -> Result<Cone, ToricError> {
    if !c.is_full_dimensional() {
        return Err(ToricError::NotFullDimensional {
            span: c.dim(),
            rank: c.lattice.rank(),
        });
    }
    let v: Vec<Vec<BigRational>> = c.rays.iter().map(|r| exact::to_rat(r)).collect();
    let inv = exact::inverse(&v).ok_or(ToricError::NonSimplicial)?;
    let n = c.dim();
    let rays = (0..n)
        .map(|j| {
            let col: Vec<BigRational> = (0..n).map(|i| inv[i][j].clone()).collect();
            exact::primitive_from_rat(&col).ok_or(ToricError::NonSimplicial)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Cone::new(c.lattice, rays)
}

/// The covector `u` with `⟨u, v_j⟩ = 1` for every ray generator.
///
/// When the solution inside the rational span of the rays is integral it is
/// returned. For a cone of lower dimension than the lattice, `u` is only
/// determined modulo the annihilator of the rays, so an integral
/// representative is searched in the whole class via a Hermite reduction.
pub fn gorenstein_covector(c: &Cone) -> Result<Covector, ToricError> {
    let k = c.dim();
    let d = c.lattice.rank();
    let v: Vec<Vec<BigRational>> = c.rays.iter().map(|r| exact::to_rat(r)).collect();
    let ones = vec![BigRational::one(); k];

    // u = Vᵀ (V Vᵀ)⁻¹ 1 lies in the span of the rays
    let gram: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    v[i].iter()
                        .zip(&v[j])
                        .fold(BigRational::zero(), |a, (x, y)| a + x * y)
                })
                .collect()
        })
        .collect();
    let gi = exact::inverse(&gram).ok_or(ToricError::NonSimplicial)?;
    let y: Vec<BigRational> = (0..k)
        .map(|i| gi[i].iter().fold(BigRational::zero(), |a, x| a + x))
        .collect();
    let u_span: Vec<BigRational> = (0..d)
        .map(|a| (0..k).fold(BigRational::zero(), |acc, i| acc + &y[i] * &v[i][a]))
        .collect();
    let candidate = Covector::new(u_span);
    if candidate.is_integral() {
        return Ok(candidate);
    }
    if k == d {
        return Err(ToricError::NotGorenstein(candidate.to_string()));
    }

    // V U = [H | 0] with U unimodular and H lower triangular (k x k)
    let (u_cols, piv) = exact::integer_kernel(&c.rays, d);
    debug_assert_eq!(piv, k);
    let h: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let s = c.rays[i]
                        .iter()
                        .zip(&u_cols[j])
                        .fold(BigInt::zero(), |a, (x, y)| a + x * y);
                    BigRational::from_integer(s)
                })
                .collect()
        })
        .collect();
    let hy = exact::solve_particular(&h, &ones).ok_or(ToricError::NonSimplicial)?;
    if !hy.iter().all(|x| x.is_integer()) {
        return Err(ToricError::NotGorenstein(candidate.to_string()));
    }
    let u: Vec<BigRational> = (0..d)
        .map(|a| {
            (0..k).fold(BigRational::zero(), |acc, j| {
                acc + &hy[j] * BigRational::from_integer(u_cols[j][a].clone())
            })
        })
        .collect();
    Ok(Covector::new(u))
}

/// The open simplex `{v ∈ Int(c) : ⟨v,u⟩ = 1}` together with its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPolytope {
    pub domain: SimplexDomain,
    /// Vertices of the closed slice: the ray generators, which pair to 1
    /// with `u`.
    pub vertices: Vec<Vec<BigInt>>,
    /// Normalized lattice volume of the closed slice (lattice length for a
    /// segment, 1 for a point).
    pub normalized_volume: BigInt,
}

impl CellPolytope {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }
}

/// The slice of `c` at height one for `u`, in coordinates `x_1..x_s` with
/// `x_0 = 1 - Σ x_j` eliminated; the ray `v_j` sits at the `j`-th vertex of
/// the standard simplex.
pub fn cell_polytope(c: &Cone, u: &Covector) -> Result<CellPolytope, ToricError> {
    if u.entries.len() != c.lattice.rank() {
        return Err(ToricError::ArityMismatch {
            index: 0,
            got: u.entries.len(),
            rank: c.lattice.rank(),
        });
    }
    for r in &c.rays {
        let p = u.pair(r);
        if !p.is_one() {
            return Err(ToricError::NotGorenstein(format!(
                "{u} pairs to {p} with ray {r:?}"
            )));
        }
    }
    let edges: Vec<Vec<BigInt>> = c.rays[1..]
        .iter()
        .map(|r| r.iter().zip(&c.rays[0]).map(|(a, b)| a - b).collect())
        .collect();
    let normalized_volume = exact::abs_int(&exact::maximal_minor_gcd(&edges));
    Ok(CellPolytope {
        domain: SimplexDomain::new(c.dim() - 1, 0.0)?,
        vertices: c.rays.clone(),
        normalized_volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn dual_of_orthant_is_orthant() {
        let c = Cone::from_i64(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(dual_cone(&c).unwrap().sorted_rays(), c.sorted_rays());
    }

    #[test]
    fn dual_of_skew_cone() {
        let c = Cone::from_i64(&[vec![1, 0], vec![1, 2]]).unwrap();
        let d = dual_cone(&c).unwrap();
        assert_eq!(d.sorted_rays(), vec![ints(&[0, 1]), ints(&[2, -1])]);
        assert_eq!(dual_cone(&d).unwrap().sorted_rays(), c.sorted_rays());
    }

    #[test]
    fn dual_needs_full_dimension() {
        let c = Cone::from_i64(&[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert!(matches!(
            dual_cone(&c),
            Err(ToricError::NotFullDimensional { span: 2, rank: 3 })
        ));
    }

    #[test]
    fn dependent_rays_rejected() {
        assert_eq!(
            Cone::from_i64(&[vec![1, 1], vec![2, 2]]),
            Err(ToricError::NonSimplicial)
        );
        assert_eq!(
            Cone::from_i64(&[vec![1, 0], vec![0, 1], vec![1, 1]]),
            Err(ToricError::NonSimplicial)
        );
    }

    #[test]
    fn rays_made_primitive() {
        let c = Cone::from_i64(&[vec![2, 4], vec![0, 3]]).unwrap();
        assert_eq!(c.rays(), &[ints(&[1, 2]), ints(&[0, 1])]);
    }

    #[test]
    fn gorenstein_examples() {
        let std3 = Cone::from_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(
            gorenstein_covector(&std3).unwrap(),
            Covector::from_i64(&[1, 1, 1])
        );
        let c = Cone::from_i64(&[vec![1, 0], vec![1, 2]]).unwrap();
        assert_eq!(
            gorenstein_covector(&c).unwrap(),
            Covector::from_i64(&[1, 0])
        );
        let bad = Cone::from_i64(&[vec![2, 1], vec![1, 2]]).unwrap();
        assert!(matches!(
            gorenstein_covector(&bad),
            Err(ToricError::NotGorenstein(_))
        ));
    }

    #[test]
    fn gorenstein_in_lower_dimension() {
        // span solution is (1/2, 1/2, 0)-like but an integral one exists
        let c = Cone::from_i64(&[vec![1, 1, 0]]).unwrap();
        let u = gorenstein_covector(&c).unwrap();
        assert!(u.is_integral());
        assert!(u.pair(&c.rays()[0]).is_one());

        let c = Cone::from_i64(&[vec![0, 1, 1], vec![-1, 0, 1]]).unwrap();
        let u = gorenstein_covector(&c).unwrap();
        assert!(u.is_integral());
        for r in c.rays() {
            assert!(u.pair(r).is_one());
        }

        // (2,0,1),(0,2,1) with a third coordinate: u=(0,0,1) works
        let c = Cone::from_i64(&[vec![2, 0, 1], vec![0, 2, 1]]).unwrap();
        let u = gorenstein_covector(&c).unwrap();
        for r in c.rays() {
            assert!(u.pair(r).is_one());
        }

        // rays (2,0),(0,2) inside a rank-3 lattice with zero last entry:
        // every u has ⟨u,(2,0,0)⟩ even
        let c = Cone::from_i64(&[vec![1, 0, 0], vec![1, 2, 0]]).unwrap();
        assert!(gorenstein_covector(&c).is_ok());
        let c = Cone::from_i64(&[vec![2, 1, 0], vec![1, 2, 0]]).unwrap();
        assert!(gorenstein_covector(&c).is_err());
    }

    #[test]
    fn cell_polytope_examples() {
        let std3 = Cone::from_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let u = gorenstein_covector(&std3).unwrap();
        let p = cell_polytope(&std3, &u).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.domain.margin(), 0.0);
        assert_eq!(p.normalized_volume, BigInt::from(1));

        let c = Cone::from_i64(&[vec![1, 0], vec![1, 2]]).unwrap();
        let u = gorenstein_covector(&c).unwrap();
        let p = cell_polytope(&c, &u).unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.normalized_volume, BigInt::from(2));

        let c = Cone::from_i64(&[vec![1]]).unwrap();
        let u = gorenstein_covector(&c).unwrap();
        assert_eq!(u, Covector::from_i64(&[1]));
        assert_eq!(cell_polytope(&c, &u).unwrap().dim(), 0);
    }

    #[test]
    fn cell_polytope_rejects_wrong_covector() {
        let c = Cone::from_i64(&[vec![1, 0], vec![1, 2]]).unwrap();
        assert!(cell_polytope(&c, &Covector::from_i64(&[0, 1])).is_err());
    }

    #[test]
    fn parse_fixture() {
        let c = Cone::parse("# a cone\n1 0\n\n1 2 # second\n").unwrap();
        assert_eq!(c.rays(), &[ints(&[1, 0]), ints(&[1, 2])]);
        assert!(Cone::parse("1 0\n1\n").is_err());
        assert!(Cone::parse("1 x\n").is_err());
        assert!(Cone::parse("# nothing\n").is_err());
    }

    #[test]
    fn containment() {
        let c = Cone::from_i64(&[vec![1, 0], vec![1, 2]]).unwrap();
        assert!(c.contains(&ints(&[2, 1])));
        assert!(!c.contains(&ints(&[0, 1])));
        let c = Cone::from_i64(&[vec![1, 0, 0]]).unwrap();
        assert!(!c.contains(&ints(&[1, 1, 0])));
    }
}
