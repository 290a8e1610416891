use super::{reverse_cuthill_mckee, CsrMatrix, SparseError};

/// LU factorisation with partial pivoting of a reordered band matrix.
///
/// The matrix is permuted symmetrically by reverse Cuthill-McKee, then
/// factored in row-wise band storage. Each row keeps the columns
/// `[i - kl, i + kl + ku]`, which is wide enough to absorb the fill caused
/// by row interchanges.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    /// Multipliers of column `k` at `lower[k * kl ..]`, kept contiguous for
    /// the forward sweep.
    lower: Vec<f64>,
    pivots: Vec<usize>,
    /// `perm[new] = old`.
    perm: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self, SparseError> {
        let (n, m) = a.shape();
        if n != m {
            return Err(SparseError::NotSquare(n, m));
        }
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let (mut kl, mut ku) = (0usize, 0usize);
        let mut scale = 0.0f64;
        for (i, j, v) in a.iter() {
            let (pi, pj) = (inv[i], inv[j]);
            if pj < pi {
                kl = kl.max(pi - pj);
            } else {
                ku = ku.max(pj - pi);
            }
            scale = scale.max(v.abs());
        }
        let width = 2 * kl + ku + 1;
        let mut lu = BandedLu {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
            lower: vec![0.0; n * kl],
            pivots: vec![0; n],
            perm,
        };
        for (i, j, v) in a.iter() {
            let (pi, pj) = (inv[i], inv[j]);
            *lu.at_mut(pi, pj) += v;
        }
        lu.eliminate(scale)?;
        Ok(lu)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Lower and upper bandwidth of the reordered matrix.
    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        let k = self.idx(i, j);
        &mut self.data[k]
    }

    fn eliminate(&mut self, scale: f64) -> Result<(), SparseError> {
        let n = self.n;
        let tiny = scale * f64::EPSILON * (n.max(1) as f64);
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let last_col = (k + self.kl + self.ku).min(n - 1);
            let mut p = k;
            let mut best = self.at(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.at(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tiny || best == 0.0 {
                return Err(SparseError::Singular(k));
            }
            self.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.at(k, k);
            for i in k + 1..=last_row {
                let l = self.at(i, k) / pivot;
                *self.at_mut(i, k) = l;
                self.lower[k * self.kl + (i - k - 1)] = l;
                if l == 0.0 {
                    continue;
                }
                let (ri, rk) = (self.idx(i, k + 1), self.idx(k, k + 1));
                let len = last_col - k;
                for t in 0..len {
                    let u = self.data[rk + t];
                    self.data[ri + t] -= l * u;
                }
            }
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut b: Vec<f64> = self.perm.iter().map(|&old| rhs[old]).collect();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                let last = (k + self.kl).min(n - 1);
                let col = &self.lower[k * self.kl..k * self.kl + (last - k)];
                for (bi, l) in b[k + 1..=last].iter_mut().zip(col) {
                    *bi -= l * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let last = (i + self.kl + self.ku).min(n - 1);
            let row = &self.data[self.idx(i, i)..=self.idx(i, last)];
            let s: f64 = row[1..].iter().zip(&b[i + 1..=last]).map(|(a, x)| a * x).sum();
            b[i] = (b[i] - s) / row[0];
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = b[new];
        }
        x
    }
}
