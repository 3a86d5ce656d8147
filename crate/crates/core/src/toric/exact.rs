//! Exact linear algebra over `BigInt` / `BigRational`.
//!
//! Everything here is small-dimensional (rank of a cone lattice), so plain
//! Gaussian elimination over the rationals is fast enough and never rounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) fn to_rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect()
}

pub(crate) fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Clears denominators and divides by the content, giving a primitive
/// integer vector on the same ray. Returns `None` for the zero vector.
pub(crate) fn primitive_from_rat(v: &[BigRational]) -> Option<Vec<BigInt>> {
    let lcm = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = gcd_all(&ints);
    if g.is_zero() {
        return None;
    }
    Some(ints.into_iter().map(|x| x / &g).collect())
}

/// Row echelon form in place; returns the pivot columns.
fn echelon(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.iter().map(|r| to_rat(r)).collect();
    echelon(&mut m).len()
}

/// Inverse of a square rational matrix, `None` if singular.
pub(crate) fn inverse(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    let piv = echelon(&mut aug);
    if piv.len() < n || piv.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// One rational solution of `A x = b` for a full-row-rank `A`.
pub(crate) fn solve_particular(
    a: &[Vec<BigRational>],
    b: &[BigRational],
) -> Option<Vec<BigRational>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let piv = echelon(&mut aug);
    if piv.contains(&cols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, &c) in piv.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Column-style Hermite reduction of an integer matrix `Z` (m x d).
///
/// Returns a unimodular `U` (d x d, stored column-major as a list of
/// columns) and the number `r` of pivot columns, such that the columns
/// `U[r..]` form a Z-basis of the integer kernel `{w in Z^d : Z w = 0}`.
pub(crate) fn integer_kernel(z: &[Vec<BigInt>], d: usize) -> (Vec<Vec<BigInt>>, usize) {
    let mut a: Vec<Vec<BigInt>> = z.to_vec();
    // columns of U
    let mut u: Vec<Vec<BigInt>> = (0..d)
        .map(|j| {
            (0..d)
                .map(|i| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let col_op = |a: &mut Vec<Vec<BigInt>>,
                  u: &mut Vec<Vec<BigInt>>,
                  i: usize,
                  j: usize,
                  (p, q, r, s): (BigInt, BigInt, BigInt, BigInt)| {
        // (col_i, col_j) <- (p col_i + q col_j, r col_i + s col_j)
        for row in a.iter_mut() {
            let (x, y) = (row[i].clone(), row[j].clone());
            row[i] = &p * &x + &q * &y;
            row[j] = &r * &x + &s * &y;
        }
        let (ci, cj) = (u[i].clone(), u[j].clone());
        u[i] = ci.iter().zip(&cj).map(|(x, y)| &p * x + &q * y).collect();
        u[j] = ci.iter().zip(&cj).map(|(x, y)| &r * x + &s * y).collect();
    };
    let mut pivot = 0;
    for row in 0..a.len() {
        if pivot == d {
            break;
        }
        for j in (pivot + 1)..d {
            if a[row][j].is_zero() {
                continue;
            }
            let (x, y) = (a[row][pivot].clone(), a[row][j].clone());
            let e = x.extended_gcd(&y);
            let g = e.gcd.clone();
            // [p q; r s] has determinant 1
            let op = (e.x.clone(), e.y.clone(), -(&y / &g), &x / &g);
            col_op(&mut a, &mut u, pivot, j, op);
        }
        if !a[row][pivot].is_zero() {
            pivot += 1;
        }
    }
    (u, pivot)
}

/// `gcd` of all maximal minors of a `k x d` integer matrix with `k <= d`.
/// Equals the index of the lattice spanned by the rows inside its
/// saturation; zero when the rows are dependent.
pub(crate) fn maximal_minor_gcd(rows: &[Vec<BigInt>]) -> BigInt {
    let k = rows.len();
    if k == 0 {
        return BigInt::one();
    }
    let d = rows[0].len();
    let mut g = BigInt::zero();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let sub: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| {
                idx.iter()
                    .map(|&c| BigRational::from_integer(r[c].clone()))
                    .collect()
            })
            .collect();
        g = g.gcd(&det(&sub).to_integer());
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return g;
            }
            i -= 1;
            if idx[i] < d - k + i {
                idx[i] += 1;
                for j in (i + 1)..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub(crate) fn det(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d = &d * &m[c][c];
        for i in (c + 1)..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                let pr = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(pr.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    d
}

pub(crate) fn dot(u: &[BigRational], v: &[BigInt]) -> BigRational {
    u.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| {
        acc + a * BigRational::from_integer(b.clone())
    })
}

pub(crate) fn abs_int(x: &BigInt) -> BigInt {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn kernel_of_single_row() {
        // x + 2y + 3z = 0
        let (u, r) = integer_kernel(&[ints(&[1, 2, 3])], 3);
        assert_eq!(r, 1);
        for w in &u[r..] {
            let s: BigInt = w[0].clone() + BigInt::from(2) * &w[1] + BigInt::from(3) * &w[2];
            assert!(s.is_zero());
        }
        // basis columns must be unimodular as a whole
        let m: Vec<Vec<BigRational>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| BigRational::from_integer(u[j][i].clone()))
                    .collect()
            })
            .collect();
        assert_eq!(det(&m).abs(), BigRational::one());
    }

    #[test]
    fn minor_gcd_segment() {
        assert_eq!(maximal_minor_gcd(&[ints(&[0, 2])]), BigInt::from(2));
        assert_eq!(
            maximal_minor_gcd(&[ints(&[1, 0]), ints(&[0, 1])]),
            BigInt::from(1)
        );
        assert_eq!(
            maximal_minor_gcd(&[ints(&[2, 1]), ints(&[1, 2])]),
            BigInt::from(3)
        );
    }
}
