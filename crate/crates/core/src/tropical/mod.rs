//! Tropicalization of Laurent polynomials with `t`-adic valuations, their
//! corner loci, and sampled amoebas under the logarithm map.
//!
//! A polynomial `p = Σ b_u t^{υ(u)} z^u` tropicalizes to the concave
//! piecewise-linear function `f(x) = min_u {υ(u) + ⟨x, u⟩}`. The
//! non-Archimedean amoeba is the corner locus of `f`, the set where the
//! minimum is attained at least twice, and it is the Hausdorff limit of
//! `Log_t(V(p))` as real `t → 0`.

mod amoeba;
mod hausdorff;
mod locus;

pub use amoeba::{
    amoeba_sample, amoeba_sample_with, AmoebaSampling, PointCloud, DEGREE_CAP, WITNESS_TOL,
};
pub use hausdorff::{
    convergence_curve, convergence_curve_with, hausdorff_distance, hausdorff_distance_with,
    CurveRow,
};
pub use locus::{corner_locus, CornerLocus, LocusPiece, PieceKind, EXACT_TERM_LIMIT};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use thiserror::Error;

/// Tolerance for deciding floating-point ties between affine forms.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TropicalError {
    #[error("polynomial has no terms")]
    EmptyPolynomial,
    #[error("term {index} has {got} exponents, expected {expected}")]
    ArityMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("exponent {0:?} appears more than once")]
    DuplicateExponent(Vec<i64>),
    #[error("term {0} has a zero or non-finite coefficient")]
    BadCoefficient(usize),
    #[error("polynomial needs at least one variable")]
    NoVariables,
    #[error("operation supports {supported} variables, polynomial has {got}")]
    UnsupportedArity { supported: &'static str, got: usize },
    #[error("t must lie in (0, 1), got {0}")]
    BadT(f64),
    #[error("invalid region: {0}")]
    BadRegion(String),
    #[error("region has {region} axes, points have {points}")]
    RegionMismatch { region: usize, points: usize },
    #[error("specialized polynomial has no roots in (C*) for any sample")]
    EmptyVariety,
    #[error("root solve failed at sample {sample:?}: {reason}")]
    RootSolveFailure { sample: Vec<f64>, reason: String },
    #[error("set is empty after clipping to the region")]
    EmptyAfterClip,
    #[error("t values must be strictly decreasing in (0, 1)")]
    NotDecreasing,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// One term `b t^{val} z^{exponent}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub exponent: Vec<i64>,
    pub coeff: Complex64,
    pub val: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TropicalPolynomial {
    nvars: usize,
    terms: Vec<Term>,
}

impl TropicalPolynomial {
    pub fn new(terms: Vec<Term>) -> Result<Self, TropicalError> {
        let first = terms.first().ok_or(TropicalError::EmptyPolynomial)?;
        let nvars = first.exponent.len();
        if nvars == 0 {
            return Err(TropicalError::NoVariables);
        }
        for (index, t) in terms.iter().enumerate() {
            if t.exponent.len() != nvars {
                return Err(TropicalError::ArityMismatch {
                    index,
                    expected: nvars,
                    got: t.exponent.len(),
                });
            }
            if !(t.coeff.norm() > 0.0 && t.coeff.norm().is_finite()) {
                return Err(TropicalError::BadCoefficient(index));
            }
        }
        let mut seen: Vec<&Vec<i64>> = terms.iter().map(|t| &t.exponent).collect();
        seen.sort();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(TropicalError::DuplicateExponent(w[0].clone()));
        }
        Ok(TropicalPolynomial { nvars, terms })
    }

    /// Real coefficients, one `(exponent, val)` pair per term.
    pub fn from_real(terms: &[(&[i64], f64, i64)]) -> Result<Self, TropicalError> {
        Self::new(
            terms
                .iter()
                .map(|&(e, c, val)| Term {
                    exponent: e.to_vec(),
                    coeff: Complex64::new(c, 0.0),
                    val,
                })
                .collect(),
        )
    }

    /// Parses one term per line, `c_re c_im val e1 … ek`. Blank lines and
    /// text after `#` are ignored.
    pub fn parse(text: &str) -> Result<Self, TropicalError> {
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let tok: Vec<&str> = body.split_whitespace().collect();
            if tok.len() < 4 {
                return Err(TropicalError::Parse {
                    line,
                    msg: format!("expected `c_re c_im val e1 ...`, got {} fields", tok.len()),
                });
            }
            let num = |s: &str| {
                s.parse::<f64>().map_err(|e| TropicalError::Parse {
                    line,
                    msg: format!("{s:?}: {e}"),
                })
            };
            let int = |s: &str| {
                s.parse::<i64>().map_err(|e| TropicalError::Parse {
                    line,
                    msg: format!("{s:?}: {e}"),
                })
            };
            terms.push(Term {
                coeff: Complex64::new(num(tok[0])?, num(tok[1])?),
                val: int(tok[2])?,
                exponent: tok[3..].iter().map(|s| int(s)).collect::<Result<_, _>>()?,
            });
        }
        Self::new(terms)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The product `z^w · p`.
    pub fn shifted(&self, w: &[i64]) -> Result<Self, TropicalError> {
        if w.len() != self.nvars {
            return Err(TropicalError::ArityMismatch {
                index: 0,
                expected: self.nvars,
                got: w.len(),
            });
        }
        Self::new(
            self.terms
                .iter()
                .map(|t| Term {
                    exponent: t.exponent.iter().zip(w).map(|(a, b)| a + b).collect(),
                    ..t.clone()
                })
                .collect(),
        )
    }

    /// `p` with every valuation raised by `c`.
    pub fn revalued(&self, c: i64) -> Self {
        TropicalPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    val: t.val + c,
                    ..t.clone()
                })
                .collect(),
        }
    }

    /// Each term evaluated at `z` with `t = t_abs`.
    pub(crate) fn term_values(&self, z: &[Complex64], t_abs: f64) -> Vec<Complex64> {
        let lt = t_abs.ln();
        self.terms
            .iter()
            .map(|t| {
                let mut v = t.coeff * (t.val as f64 * lt).exp();
                for (zi, &e) in z.iter().zip(&t.exponent) {
                    v *= zi.powi(e as i32);
                }
                v
            })
            .collect()
    }
}

/// An affine form `x ↦ val + ⟨slope, x⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineForm {
    pub val: i64,
    pub slope: Vec<i64>,
}

impl AffineForm {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.val as f64
            + self
                .slope
                .iter()
                .zip(x)
                .map(|(&u, v)| u as f64 * v)
                .sum::<f64>()
    }

    pub fn eval_exact(&self, x: &[BigRational]) -> BigRational {
        let mut acc = BigRational::from_integer(BigInt::from(self.val));
        for (&u, v) in self.slope.iter().zip(x) {
            acc += v * BigRational::from_integer(BigInt::from(u));
        }
        acc
    }
}

/// `x ↦ min_k forms[k](x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalFunction {
    nvars: usize,
    forms: Vec<AffineForm>,
}

impl TropicalFunction {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn forms(&self) -> &[AffineForm] {
        &self.forms
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.forms
            .iter()
            .map(|f| f.eval(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// The minimum at `x` and the terms attaining it within `tol`.
    pub fn evaluate(&self, x: &[f64], tol: f64) -> (f64, Vec<usize>) {
        let vals: Vec<f64> = self.forms.iter().map(|f| f.eval(x)).collect();
        let m = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let arg = (0..vals.len()).filter(|&k| vals[k] <= m + tol).collect();
        (m, arg)
    }

    pub fn evaluate_exact(&self, x: &[BigRational]) -> (BigRational, Vec<usize>) {
        let vals: Vec<BigRational> = self.forms.iter().map(|f| f.eval_exact(x)).collect();
        let m = vals.iter().min().cloned().expect("at least one term");
        let arg = (0..vals.len()).filter(|&k| vals[k] == m).collect();
        (m, arg)
    }
}

pub fn tropicalize(p: &TropicalPolynomial) -> TropicalFunction {
    TropicalFunction {
        nvars: p.nvars,
        forms: p
            .terms
            .iter()
            .map(|t| AffineForm {
                val: t.val,
                slope: t.exponent.clone(),
            })
            .collect(),
    }
}

/// An axis-aligned closed box.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, TropicalError> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(TropicalError::BadRegion(format!(
                "{} lower and {} upper bounds",
                lo.len(),
                hi.len()
            )));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(TropicalError::BadRegion(format!("interval [{a}, {b}]")));
            }
        }
        Ok(Region { lo, hi })
    }

    /// The square `[-r, r]^n`.
    pub fn cube(n: usize, r: f64) -> Result<Self, TropicalError> {
        Self::new(vec![-r; n], vec![r; n])
    }

    /// Parses `lo1,hi1,lo2,hi2,…`.
    pub fn parse(s: &str) -> Result<Self, TropicalError> {
        let v: Vec<f64> = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| TropicalError::BadRegion(format!("{x:?}: {e}")))
            })
            .collect::<Result<_, _>>()?;
        if v.len() % 2 != 0 {
            return Err(TropicalError::BadRegion(format!(
                "expected lo,hi pairs, got {} numbers",
                v.len()
            )));
        }
        Self::new(
            v.iter().step_by(2).copied().collect(),
            v.iter().skip(1).step_by(2).copied().collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    /// Longest side.
    pub fn extent(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn line() -> TropicalPolynomial {
        TropicalPolynomial::from_real(&[(&[0, 0], 1.0, 0), (&[1, 0], 1.0, 0), (&[0, 1], 1.0, 0)])
            .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = tropicalize(&line());
        assert_eq!(f.evaluate(&[1.0, 2.0], TIE_TOL), (0.0, vec![0]));
        assert_eq!(f.evaluate(&[-1.0, -2.0], TIE_TOL), (-2.0, vec![2]));
        let p = TropicalPolynomial::from_real(&[
            (&[0, 0], 1.0, 0),
            (&[1, 0], 1.0, 0),
            (&[0, 1], 1.0, 0),
            (&[1, 1], 1.0, 1),
        ])
        .unwrap();
        assert_eq!(
            tropicalize(&p).evaluate(&[-3.0, -3.0], TIE_TOL),
            (-5.0, vec![3])
        );
    }

    #[test]
    fn parse_and_validate() {
        let p =
            TropicalPolynomial::parse("# line\n1 0 0  0 0\n1 0 0 1 0\n\n1 0 0 0 1 # z2\n").unwrap();
        assert_eq!(p, line());
        assert!(matches!(
            TropicalPolynomial::parse("1 0 0 1\n1 0 0 1"),
            Err(TropicalError::DuplicateExponent(_))
        ));
        assert!(matches!(
            TropicalPolynomial::parse("1 0 0 1\n1 0 0 1 2"),
            Err(TropicalError::ArityMismatch { .. })
        ));
        assert!(matches!(
            TropicalPolynomial::parse("0 0 0 1"),
            Err(TropicalError::BadCoefficient(0))
        ));
        assert!(matches!(
            TropicalPolynomial::parse("1 0 x 1"),
            Err(TropicalError::Parse { line: 1, .. })
        ));
        assert_eq!(
            TropicalPolynomial::parse("# nothing\n"),
            Err(TropicalError::EmptyPolynomial)
        );
    }

    #[test]
    fn region_parse() {
        let r = Region::parse("-2,2,-1,3").unwrap();
        assert_eq!(r.lo(), &[-2.0, -1.0]);
        assert_eq!(r.hi(), &[2.0, 3.0]);
        assert!(r.contains(&[2.0, -1.0]));
        assert!(!r.contains(&[2.1, 0.0]));
        assert!(Region::parse("1,0").is_err());
        assert!(Region::parse("0,1,2").is_err());
    }
}
