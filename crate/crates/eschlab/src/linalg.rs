//! Banded direct solver used by the implicit time step and the profile BVP.
//!
//! LAPACK-style band storage: entry (i, j) of an n x n matrix with `kl`
//! sub-diagonals and `ku` super-diagonals lives at band row `kl + ku + i - j`
//! of column j. The extra `kl` rows on top hold fill-in from partial pivoting,
//! so the widened upper bandwidth during factorisation is `kl + ku`.

#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    lda: usize,
    /// Flat storage, column-major: `2*kl + ku + 1` band rows per column.
    ab: Vec<f64>,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum LinalgError {
    #[error("singular banded system: zero pivot in column {0}")]
    SingularPivot(usize),
    #[error("iterative solve did not converge: residual {residual:.3e} after {iters} iterations")]
    NoConvergence { residual: f64, iters: usize },
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let lda = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            lda,
            ab: vec![0.0; lda * n],
        }
    }

    /// Index into the widened band: valid for j - (kl+ku) <= i <= j + kl.
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i + self.kl + self.ku >= j && j + self.kl >= i);
        j * self.lda + (self.kl + self.ku + i - j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + self.ku < j || j + self.kl < i {
            0.0
        } else {
            self.ab[self.idx(i, j)]
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn reset(&mut self) {
        self.ab.fill(0.0);
    }

    /// Matrix-vector product (uses only the declared band).
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let j0 = i.saturating_sub(self.kl);
            let j1 = (i + self.ku).min(n - 1);
            let mut s = 0.0;
            for j in j0..=j1 {
                s += self.get(i, j) * x[j];
            }
            y[i] = s;
        }
    }

    /// LU factorisation with partial pivoting, consuming the matrix.
    pub fn factor(mut self) -> Result<BandedLu, LinalgError> {
        let n = self.n;
        let kl = self.kl;
        let kv = self.kl + self.ku;
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let i_max = (j + kl).min(n - 1);
            let mut p = j;
            let mut pmax = self.ab[self.idx(j, j)].abs();
            for i in (j + 1)..=i_max {
                let v = self.ab[self.idx(i, j)].abs();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax == 0.0 {
                return Err(LinalgError::SingularPivot(j));
            }
            ipiv[j] = p;
            let j_last = (j + kv).min(n - 1);
            if p != j {
                for c in j..=j_last {
                    let a = self.idx(j, c);
                    let b = self.idx(p, c);
                    self.ab.swap(a, b);
                }
            }
            let piv = self.ab[self.idx(j, j)];
            for i in (j + 1)..=i_max {
                let li = self.idx(i, j);
                let l = self.ab[li] / piv;
                self.ab[li] = l;
                if l != 0.0 {
                    for c in (j + 1)..=j_last {
                        let a = self.ab[self.idx(j, c)];
                        let bi = self.idx(i, c);
                        self.ab[bi] -= l * a;
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            kv,
            lda: self.lda,
            ab: self.ab,
            ipiv,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    kv: usize,
    lda: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    /// Entry of the packed factors; valid for j - kv <= i <= j + kl.
    #[inline]
    fn entry(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i + self.kv >= j && j + self.kl >= i);
        self.ab[j * self.lda + (self.kv + i) - j]
    }

    /// Solve `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if bj != 0.0 {
                let i_max = (j + self.kl).min(n - 1);
                for i in (j + 1)..=i_max {
                    b[i] -= self.entry(i, j) * bj;
                }
            }
        }
        for j in (0..n).rev() {
            let xj = b[j] / self.entry(j, j);
            b[j] = xj;
            if xj != 0.0 {
                let i_min = j.saturating_sub(self.kv);
                for i in i_min..j {
                    b[i] -= self.entry(i, j) * xj;
                }
            }
        }
    }
}
