//! Corner loci of tropical functions.
//!
//! For one or two variables and at most [`EXACT_TERM_LIMIT`] terms the locus
//! is assembled exactly: every pair of terms defines a hyperplane on which
//! they tie, and the inequalities against the remaining terms cut out the
//! part where that tie is minimal. Otherwise the locus is found by walking
//! grid edges and bisecting wherever the minimizing term changes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{Region, TropicalError, TropicalFunction, TIE_TOL};

/// Largest support handled combinatorially.
pub const EXACT_TERM_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PieceKind {
    Point,
    Segment,
    Ray,
    Line,
}

/// A cell of the corner locus: `origin + s · direction` for `s` in `[0, length]`
/// (segments), `[0, ∞)` (rays) or `ℝ` (lines); a single point has no
/// direction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LocusPiece {
    pub kind: PieceKind,
    pub origin: Vec<BigRational>,
    pub direction: Vec<BigInt>,
    pub length: Option<BigRational>,
    /// Terms attaining the minimum on the relative interior.
    pub terms: Vec<usize>,
}

impl LocusPiece {
    pub fn origin_f64(&self) -> Vec<f64> {
        self.origin.iter().map(rat_f64).collect()
    }

    fn at(&self, s: f64) -> Vec<f64> {
        self.origin
            .iter()
            .zip(&self.direction)
            .map(|(o, d)| rat_f64(o) + s * d.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Parameter range of the piece inside `region`, if any.
    fn clip(&self, region: &Region) -> Option<(f64, f64)> {
        let (mut a, mut b) = match self.kind {
            PieceKind::Point => return region.contains(&self.origin_f64()).then_some((0.0, 0.0)),
            PieceKind::Segment => (0.0, rat_f64(self.length.as_ref()?)),
            PieceKind::Ray => (0.0, f64::INFINITY),
            PieceKind::Line => (f64::NEG_INFINITY, f64::INFINITY),
        };
        for k in 0..region.dim() {
            let o = rat_f64(&self.origin[k]);
            let d = self.direction[k].to_f64().unwrap_or(f64::NAN);
            let (lo, hi) = (region.lo()[k], region.hi()[k]);
            if d == 0.0 {
                if o < lo || o > hi {
                    return None;
                }
                continue;
            }
            let (s0, s1) = ((lo - o) / d, (hi - o) / d);
            a = a.max(s0.min(s1));
            b = b.min(s0.max(s1));
        }
        (a <= b).then_some((a, b))
    }

    /// Points of the piece inside `region`, spaced at most `spacing` apart
    /// and including both ends of the clipped range.
    pub fn sample(&self, region: &Region, spacing: f64) -> Vec<Vec<f64>> {
        let Some((a, b)) = self.clip(region) else {
            return Vec::new();
        };
        if self.kind == PieceKind::Point {
            return vec![self.origin_f64()];
        }
        let norm = self
            .direction
            .iter()
            .map(|d| d.to_f64().unwrap_or(f64::NAN).powi(2))
            .sum::<f64>()
            .sqrt();
        let m = (((b - a) * norm / spacing).ceil() as usize).max(1);
        (0..=m)
            .map(|i| {
                let s = if i == m {
                    b
                } else {
                    a + (b - a) * i as f64 / m as f64
                };
                self.at(s)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornerLocus {
    /// Maximal cells: points in one variable, segments, rays and lines in two.
    /// Empty when the sampling fallback was used.
    pub pieces: Vec<LocusPiece>,
    /// Points where three or more terms tie (two variables only).
    pub vertices: Vec<LocusPiece>,
    /// Sampled locus inside the region, sorted lexicographically.
    pub points: Vec<Vec<f64>>,
    /// Whether `pieces` and `vertices` were computed exactly.
    pub exact: bool,
}

fn rat_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

fn rat(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// The corner locus of `f` with pieces clipped and sampled in `region` at
/// spacing `extent / resolution`.
pub fn corner_locus(
    f: &TropicalFunction,
    region: &Region,
    resolution: usize,
) -> Result<CornerLocus, TropicalError> {
    let n = f.nvars();
    if region.dim() != n {
        return Err(TropicalError::RegionMismatch {
            region: region.dim(),
            points: n,
        });
    }
    if resolution == 0 {
        return Err(TropicalError::BadRegion(
            "resolution must be positive".into(),
        ));
    }
    let spacing = region.extent() / resolution as f64;
    let exact = n <= 2 && f.forms().len() <= EXACT_TERM_LIMIT;
    let (pieces, vertices) = match (exact, n) {
        (true, 1) => (points_1d(f), Vec::new()),
        (true, _) => (cells_2d(f), vertices_2d(f)),
        _ => (Vec::new(), Vec::new()),
    };
    let mut points: Vec<Vec<f64>> = if exact {
        pieces
            .iter()
            .chain(&vertices)
            .flat_map(|p| p.sample(region, spacing))
            .collect()
    } else {
        sampled(f, region, resolution)
    };
    points.sort_by(|a, b| lex(a, b));
    points.dedup();
    Ok(CornerLocus {
        pieces,
        vertices,
        points,
        exact,
    })
}

fn point_piece(f: &TropicalFunction, x: Vec<BigRational>, need: &[usize]) -> Option<LocusPiece> {
    let (_, arg) = f.evaluate_exact(&x);
    need.iter().all(|k| arg.contains(k)).then(|| LocusPiece {
        kind: PieceKind::Point,
        origin: x,
        direction: Vec::new(),
        length: None,
        terms: arg,
    })
}

fn points_1d(f: &TropicalFunction) -> Vec<LocusPiece> {
    let forms = f.forms();
    let mut out = BTreeMap::new();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            let du = forms[i].slope[0] - forms[j].slope[0];
            let x = BigRational::new(int(forms[j].val - forms[i].val), int(du));
            if let Some(p) = point_piece(f, vec![x.clone()], &[i, j]) {
                out.insert(x, p);
            }
        }
    }
    out.into_values().collect()
}

fn vertices_2d(f: &TropicalFunction) -> Vec<LocusPiece> {
    let forms = f.forms();
    let m = forms.len();
    let mut out = BTreeMap::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let r1 = [
                    forms[i].slope[0] - forms[j].slope[0],
                    forms[i].slope[1] - forms[j].slope[1],
                ];
                let r2 = [
                    forms[i].slope[0] - forms[k].slope[0],
                    forms[i].slope[1] - forms[k].slope[1],
                ];
                let det = r1[0] as i128 * r2[1] as i128 - r1[1] as i128 * r2[0] as i128;
                if det == 0 {
                    continue;
                }
                let b1 = forms[j].val as i128 - forms[i].val as i128;
                let b2 = forms[k].val as i128 - forms[i].val as i128;
                let x = BigRational::new(
                    BigInt::from(b1 * r2[1] as i128 - b2 * r1[1] as i128),
                    BigInt::from(det),
                );
                let y = BigRational::new(
                    BigInt::from(r1[0] as i128 * b2 - r2[0] as i128 * b1),
                    BigInt::from(det),
                );
                let pt = vec![x, y];
                if let Some(p) = point_piece(f, pt.clone(), &[i, j, k]) {
                    out.insert(pt, p);
                }
            }
        }
    }
    out.into_values().collect()
}

fn cells_2d(f: &TropicalFunction) -> Vec<LocusPiece> {
    let forms = f.forms();
    let m = forms.len();
    let mut out: BTreeMap<
        (
            PieceKind,
            Vec<BigRational>,
            Vec<BigInt>,
            Option<BigRational>,
        ),
        Vec<usize>,
    > = BTreeMap::new();
    for i in 0..m {
        for j in i + 1..m {
            // tie line a·x = c with a primitive and sign-normalised
            let mut a = [
                int(forms[i].slope[0] - forms[j].slope[0]),
                int(forms[i].slope[1] - forms[j].slope[1]),
            ];
            let g = a[0].gcd(&a[1]);
            let mut sign = if a[0].is_zero() {
                a[1].signum()
            } else {
                a[0].signum()
            };
            sign *= &g;
            a = [&a[0] / &sign, &a[1] / &sign];
            let c = BigRational::new(int(forms[j].val - forms[i].val), sign);
            let p0 = if a[1].is_zero() {
                vec![&c / rat(a[0].clone()), BigRational::zero()]
            } else {
                vec![BigRational::zero(), &c / rat(a[1].clone())]
            };
            let d = vec![-a[1].clone(), a[0].clone()];
            let mut lo: Option<BigRational> = None;
            let mut hi: Option<BigRational> = None;
            let mut terms = vec![i, j];
            let mut empty = false;
            for (k, fk) in forms.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                // fk - fi ≥ 0 along p0 + s d  ⇔  alpha s ≥ beta
                let du = [
                    int(fk.slope[0] - forms[i].slope[0]),
                    int(fk.slope[1] - forms[i].slope[1]),
                ];
                let alpha = rat(&du[0] * &d[0] + &du[1] * &d[1]);
                let beta = rat(int(forms[i].val - fk.val))
                    - (&p0[0] * rat(du[0].clone()) + &p0[1] * rat(du[1].clone()));
                if alpha.is_zero() {
                    if beta.is_positive() {
                        empty = true;
                        break;
                    }
                    if beta.is_zero() {
                        terms.push(k);
                    }
                } else {
                    let s = &beta / &alpha;
                    if alpha.is_positive() {
                        if lo.as_ref().is_none_or(|l| s > *l) {
                            lo = Some(s);
                        }
                    } else if hi.as_ref().is_none_or(|h| s < *h) {
                        hi = Some(s);
                    }
                }
            }
            if empty {
                continue;
            }
            let shift = |s: &BigRational| -> Vec<BigRational> {
                p0.iter()
                    .zip(&d)
                    .map(|(p, di)| p + s * rat(di.clone()))
                    .collect()
            };
            let key = match (lo, hi) {
                (None, None) => (PieceKind::Line, p0.clone(), d.clone(), None),
                (Some(l), None) => (PieceKind::Ray, shift(&l), d.clone(), None),
                (None, Some(h)) => (
                    PieceKind::Ray,
                    shift(&h),
                    d.iter().map(|x| -x).collect(),
                    None,
                ),
                (Some(l), Some(h)) => {
                    if l >= h {
                        continue;
                    }
                    (PieceKind::Segment, shift(&l), d.clone(), Some(&h - &l))
                }
            };
            let entry = out.entry(key).or_default();
            entry.extend(terms);
            entry.sort_unstable();
            entry.dedup();
        }
    }
    out.into_iter()
        .map(|((kind, origin, direction, length), terms)| LocusPiece {
            kind,
            origin,
            direction,
            length,
            terms,
        })
        .collect()
}

fn strict_argmin(f: &TropicalFunction, x: &[f64]) -> usize {
    let mut best = 0;
    let mut bv = f64::INFINITY;
    for (k, form) in f.forms().iter().enumerate() {
        let v = form.eval(x);
        if v < bv {
            bv = v;
            best = k;
        }
    }
    best
}

/// Tie points on the segment `p → q` whose ends are minimised by `a` and `b`.
fn bisect(
    f: &TropicalFunction,
    p: &[f64],
    q: &[f64],
    a: usize,
    b: usize,
    depth: usize,
    out: &mut Vec<Vec<f64>>,
) {
    if a == b || depth > 64 {
        return;
    }
    let (fa, fb) = (&f.forms()[a], &f.forms()[b]);
    let gp = fa.eval(p) - fb.eval(p);
    let gq = fa.eval(q) - fb.eval(q);
    if gp == gq {
        return;
    }
    let s = (gp / (gp - gq)).clamp(0.0, 1.0);
    let r: Vec<f64> = p.iter().zip(q).map(|(x, y)| x + s * (y - x)).collect();
    let (_, arg) = f.evaluate(&r, TIE_TOL);
    if arg.contains(&a) && arg.contains(&b) {
        out.push(r);
        return;
    }
    let c = strict_argmin(f, &r);
    bisect(f, p, &r, a, c, depth + 1, out);
    bisect(f, &r, q, c, b, depth + 1, out);
}

fn sampled(f: &TropicalFunction, region: &Region, resolution: usize) -> Vec<Vec<f64>> {
    let n = f.nvars();
    let per = resolution + 1;
    let total = per.pow(n as u32);
    let node = |mut idx: usize| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let i = idx % per;
            idx /= per;
            x[k] =
                region.lo()[k] + (region.hi()[k] - region.lo()[k]) * i as f64 / resolution as f64;
        }
        x
    };
    let mut out = Vec::new();
    for idx in 0..total {
        let p = node(idx);
        let a = strict_argmin(f, &p);
        let mut stride = 1;
        for _ in 0..n {
            if (idx / stride) % per + 1 < per {
                let q = node(idx + stride);
                let b = strict_argmin(f, &q);
                bisect(f, &p, &q, a, b, 0, &mut out);
            }
            stride *= per;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tropical::{tropicalize, TropicalPolynomial};

    fn line() -> TropicalFunction {
        tropicalize(
            &TropicalPolynomial::from_real(&[
                (&[0, 0], 1.0, 0),
                (&[1, 0], 1.0, 0),
                (&[0, 1], 1.0, 0),
            ])
            .unwrap(),
        )
    }

    fn r(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn tropical_line_has_three_rays() {
        let region = Region::cube(2, 2.0).unwrap();
        let loc = corner_locus(&line(), &region, 100).unwrap();
        assert!(loc.exact);
        assert_eq!(loc.pieces.len(), 3);
        assert!(loc.pieces.iter().all(|p| p.kind == PieceKind::Ray));
        assert!(loc.pieces.iter().all(|p| p.origin == vec![r(0), r(0)]));
        let mut dirs: Vec<Vec<i64>> = loc
            .pieces
            .iter()
            .map(|p| p.direction.iter().map(|d| d.to_i64().unwrap()).collect())
            .collect();
        dirs.sort();
        assert_eq!(dirs, vec![vec![-1, -1], vec![0, 1], vec![1, 0]]);
        assert_eq!(loc.vertices.len(), 1);
        assert_eq!(loc.vertices[0].origin, vec![r(0), r(0)]);
        assert_eq!(loc.vertices[0].terms, vec![0, 1, 2]);
        let f = line();
        for p in &loc.points {
            assert!(region.contains(p));
            assert!(f.evaluate(p, TIE_TOL).1.len() >= 2, "{p:?}");
        }
        // 2 + 2 + 2√2 of locus at spacing 0.04
        assert!(loc.points.len() > 150);
    }

    #[test]
    fn single_term_is_empty() {
        let f = tropicalize(&TropicalPolynomial::from_real(&[(&[1, 2], 3.0, 1)]).unwrap());
        let loc = corner_locus(&f, &Region::cube(2, 1.0).unwrap(), 10).unwrap();
        assert!(loc.pieces.is_empty() && loc.vertices.is_empty() && loc.points.is_empty());
    }

    #[test]
    fn one_variable_points() {
        let f = tropicalize(
            &TropicalPolynomial::from_real(&[(&[0], 1.0, 0), (&[1], 1.0, 0), (&[2], 1.0, 3)])
                .unwrap(),
        );
        // min{0, x, 3 + 2x}: ties at x = 0 and x = -3
        let loc = corner_locus(&f, &Region::cube(1, 5.0).unwrap(), 10).unwrap();
        let xs: Vec<f64> = loc.points.iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![-3.0, 0.0]);
        assert_eq!(loc.pieces.len(), 2);
    }

    #[test]
    fn bounded_segment() {
        // 1 + z1 + z2 + t z1 z2: two vertices joined by a segment
        let f = tropicalize(
            &TropicalPolynomial::from_real(&[
                (&[0, 0], 1.0, 0),
                (&[1, 0], 1.0, 0),
                (&[0, 1], 1.0, 0),
                (&[1, 1], 1.0, 1),
            ])
            .unwrap(),
        );
        let loc = corner_locus(&f, &Region::cube(2, 3.0).unwrap(), 60).unwrap();
        let segs: Vec<&LocusPiece> = loc
            .pieces
            .iter()
            .filter(|p| p.kind == PieceKind::Segment)
            .collect();
        assert_eq!(segs.len(), 1);
        assert_eq!(loc.pieces.len(), 5);
        assert_eq!(loc.vertices.len(), 2);
        for p in &loc.points {
            assert!(f.evaluate(p, TIE_TOL).1.len() >= 2);
        }
    }

    #[test]
    fn sampling_fallback_agrees() {
        let f = line();
        let region = Region::cube(2, 2.0).unwrap();
        let pts = sampled(&f, &region, 40);
        assert!(!pts.is_empty());
        for p in &pts {
            assert!(f.evaluate(p, TIE_TOL).1.len() >= 2);
        }
        // every exact sample is near the fallback set
        let exact = corner_locus(&f, &region, 40).unwrap().points;
        for e in &exact {
            let d = pts
                .iter()
                .map(|p| ((p[0] - e[0]).powi(2) + (p[1] - e[1]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(d < 0.1 + 1e-12, "{e:?} {d}");
        }
    }

    #[test]
    fn collinear_ties_merge() {
        // 1, z1, z1^2 with zero valuations all tie on x1 = 0
        let f = tropicalize(
            &TropicalPolynomial::from_real(&[
                (&[0, 0], 1.0, 0),
                (&[1, 0], 1.0, 0),
                (&[2, 0], 1.0, 0),
            ])
            .unwrap(),
        );
        let loc = corner_locus(&f, &Region::cube(2, 1.0).unwrap(), 10).unwrap();
        assert_eq!(loc.pieces.len(), 1);
        assert_eq!(loc.pieces[0].kind, PieceKind::Line);
        assert_eq!(loc.pieces[0].terms, vec![0, 1, 2]);
    }
}
