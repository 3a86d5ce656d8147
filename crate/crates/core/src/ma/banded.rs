//! Banded LU factorisation with partial pivoting.
//!
//! Row `r` is stored as a dense window over columns `r - kl ..= r + ku + kl`;
//! the extra `kl` upper diagonals hold fill-in produced by row exchanges.

#[derive(Debug, Clone)]
pub(crate) struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    w: usize,
    ab: Vec<f64>,
    piv: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Singular(pub usize);

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let w = 2 * kl + ku + 1;
        Banded {
            n,
            kl,
            ku,
            w,
            ab: vec![0.0; n * w],
            piv: Vec::new(),
        }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> usize {
        debug_assert!(c + self.kl >= r && c <= r + self.ku + self.kl);
        r * self.w + (c + self.kl - r)
    }

    /// Adds `v` to entry `(r, c)`, which must lie inside the band.
    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        assert!(
            c + self.kl >= r && c <= r + self.ku,
            "entry ({r},{c}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let i = self.at(r, c);
        self.ab[i] += v;
    }

    /// In-place factorisation `P A = L U`.
    pub fn factor(&mut self) -> Result<(), Singular> {
        let n = self.n;
        self.piv = vec![0; n];
        let mut scale = 0.0f64;
        for x in &self.ab {
            scale = scale.max(x.abs());
        }
        for i in 0..n {
            let last_row = (i + self.kl).min(n - 1);
            let last_col = (i + self.ku + self.kl).min(n - 1);
            let mut p = i;
            let mut best = self.ab[self.at(i, i)].abs();
            for r in (i + 1)..=last_row {
                let v = self.ab[self.at(r, i)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= scale * 1e-300 || best == 0.0 {
                return Err(Singular(i));
            }
            self.piv[i] = p;
            if p != i {
                for c in i..=last_col {
                    let (a, b) = (self.at(i, c), self.at(p, c));
                    self.ab.swap(a, b);
                }
            }
            let d = self.ab[self.at(i, i)];
            for r in (i + 1)..=last_row {
                let ri = self.at(r, i);
                let f = self.ab[ri] / d;
                if f == 0.0 {
                    continue;
                }
                self.ab[ri] = f;
                for c in (i + 1)..=last_col {
                    let src = self.ab[self.at(i, c)];
                    if src != 0.0 {
                        let dst = self.at(r, c);
                        self.ab[dst] -= f * src;
                    }
                }
            }
        }
        Ok(())
    }

    /// Solves `A x = b` after [`Banded::factor`].
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let p = self.piv[i];
            if p != i {
                b.swap(i, p);
            }
            let bi = b[i];
            if bi != 0.0 {
                for r in (i + 1)..=(i + self.kl).min(n - 1) {
                    b[r] -= self.ab[self.at(r, i)] * bi;
                }
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for c in (i + 1)..=(i + self.ku + self.kl).min(n - 1) {
                acc -= self.ab[self.at(i, c)] * b[c];
            }
            b[i] = acc / self.ab[self.at(i, i)];
        }
    }
}
