use std::io::{self, Write};

use super::SparseError;

/// Compressed sparse row matrix with sorted column indices per row.
///
/// Explicit zeros are allowed; they keep assembled stencils aligned with
/// neighbour tables.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, offsets: vec![0; nrows + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        CsrMatrix { nrows: n, ncols: n, offsets: (0..=n).collect(), cols: (0..n).collect(), vals: d.to_vec() }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self, SparseError> {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(SparseError::IndexOutOfBounds { row: r, col: c, nrows, ncols });
            }
            if !v.is_finite() {
                return Err(SparseError::NonFinite { row: r, col: c });
            }
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut entries = vec![(0usize, 0.0f64); triplets.len()];
        for &(r, c, v) in triplets {
            entries[fill[r]] = (c, v);
            fill[r] += 1;
        }
        let mut offsets = Vec::with_capacity(nrows + 1);
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        offsets.push(0);
        for r in 0..nrows {
            let row = &mut entries[counts[r]..counts[r + 1]];
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = 0.0;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                cols.push(c);
                vals.push(v);
            }
            offsets.push(cols.len());
        }
        Ok(CsrMatrix { nrows, ncols, offsets, cols, vals })
    }

    /// Builds a matrix row by row from already-sorted, duplicate-free rows.
    pub(crate) fn from_sorted_rows(
        nrows: usize,
        ncols: usize,
        offsets: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(offsets.len(), nrows + 1);
        debug_assert!(cols.iter().all(|&c| c < ncols));
        CsrMatrix { nrows, ncols, offsets, cols, vals }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    /// Number of stored entries, explicit zeros included.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Percentage of structurally empty positions, `100 (1 - nnz / (rows cols))`.
    pub fn sparsity_percent(&self) -> f64 {
        let total = (self.nrows * self.ncols) as f64;
        if total == 0.0 {
            return 0.0;
        }
        100.0 * (1.0 - self.nnz() as f64 / total)
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.offsets[i], self.offsets[i + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn row_mut(&mut self, i: usize) -> (&[usize], &mut [f64]) {
        let (a, b) = (self.offsets[i], self.offsets[i + 1]);
        (&self.cols[a..b], &mut self.vals[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j, x))
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, SparseError> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<(), SparseError> {
        if x.len() != self.ncols || y.len() != self.nrows {
            return Err(SparseError::DimensionMismatch {
                expected: (self.nrows, self.ncols),
                found: (y.len(), x.len()),
            });
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut s = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                s += v * x[c];
            }
            *yi = s;
        }
        Ok(())
    }

    /// `y += a A x`.
    pub fn matvec_add(&self, a: f64, x: &[f64], y: &mut [f64]) -> Result<(), SparseError> {
        if x.len() != self.ncols || y.len() != self.nrows {
            return Err(SparseError::DimensionMismatch {
                expected: (self.nrows, self.ncols),
                found: (y.len(), x.len()),
            });
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut s = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                s += v * x[c];
            }
            *yi += a * s;
        }
        Ok(())
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.cols {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut fill = counts.clone();
        let mut cols = vec![0usize; self.nnz()];
        let mut vals = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                cols[fill[j]] = i;
                vals[fill[j]] = x;
                fill[j] += 1;
            }
        }
        CsrMatrix { nrows: self.ncols, ncols: self.nrows, offsets: counts, cols, vals }
    }

    /// Sparse product `self * other`. The pattern is the full structural
    /// product; cancellations are kept as explicit zeros.
    pub fn matmul(&self, other: &CsrMatrix) -> Result<CsrMatrix, SparseError> {
        if self.ncols != other.nrows {
            return Err(SparseError::DimensionMismatch {
                expected: (self.ncols, self.ncols),
                found: (other.nrows, other.ncols),
            });
        }
        let mut offsets = Vec::with_capacity(self.nrows + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut acc = vec![0.0; other.ncols];
        let mut mark = vec![usize::MAX; other.ncols];
        let mut touched = Vec::new();
        offsets.push(0);
        for i in 0..self.nrows {
            touched.clear();
            let (ac, av) = self.row(i);
            for (&k, &a) in ac.iter().zip(av) {
                let (bc, bv) = other.row(k);
                for (&j, &b) in bc.iter().zip(bv) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                cols.push(j);
                vals.push(acc[j]);
            }
            offsets.push(cols.len());
        }
        Ok(CsrMatrix { nrows: self.nrows, ncols: other.ncols, offsets, cols, vals })
    }

    /// `a * self + b * other` over the union pattern.
    pub fn add_scaled(&self, a: f64, other: &CsrMatrix, b: f64) -> Result<CsrMatrix, SparseError> {
        if self.shape() != other.shape() {
            return Err(SparseError::DimensionMismatch { expected: self.shape(), found: other.shape() });
        }
        let mut offsets = Vec::with_capacity(self.nrows + 1);
        let mut cols = Vec::with_capacity(self.nnz() + other.nnz());
        let mut vals = Vec::with_capacity(self.nnz() + other.nnz());
        offsets.push(0);
        for i in 0..self.nrows {
            let (c1, v1) = self.row(i);
            let (c2, v2) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < c1.len() || q < c2.len() {
                let j1 = c1.get(p).copied().unwrap_or(usize::MAX);
                let j2 = c2.get(q).copied().unwrap_or(usize::MAX);
                if j1 == j2 {
                    cols.push(j1);
                    vals.push(a * v1[p] + b * v2[q]);
                    p += 1;
                    q += 1;
                } else if j1 < j2 {
                    cols.push(j1);
                    vals.push(a * v1[p]);
                    p += 1;
                } else {
                    cols.push(j2);
                    vals.push(b * v2[q]);
                    q += 1;
                }
            }
            offsets.push(cols.len());
        }
        Ok(CsrMatrix { nrows: self.nrows, ncols: self.ncols, offsets, cols, vals })
    }

    pub fn scale(&self, a: f64) -> CsrMatrix {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= a);
        m
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[f64]) -> Result<CsrMatrix, SparseError> {
        if d.len() != self.nrows {
            return Err(SparseError::DimensionMismatch { expected: self.shape(), found: (d.len(), self.ncols) });
        }
        let mut m = self.clone();
        for i in 0..m.nrows {
            let (a, b) = (m.offsets[i], m.offsets[i + 1]);
            m.vals[a..b].iter_mut().for_each(|v| *v *= d[i]);
        }
        Ok(m)
    }

    /// `self * diag(d)`.
    pub fn scale_cols(&self, d: &[f64]) -> Result<CsrMatrix, SparseError> {
        if d.len() != self.ncols {
            return Err(SparseError::DimensionMismatch { expected: self.shape(), found: (self.nrows, d.len()) });
        }
        let mut m = self.clone();
        for (c, v) in m.cols.iter().zip(m.vals.iter_mut()) {
            *v *= d[*c];
        }
        Ok(m)
    }

    /// Keeps only the rows and columns selected by the given index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut map = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            map[c] = k;
        }
        let mut offsets = vec![0];
        let mut out_c = Vec::new();
        let mut out_v = Vec::new();
        for &r in rows {
            let (c, v) = self.row(r);
            let mut row: Vec<(usize, f64)> =
                c.iter().zip(v).filter(|(j, _)| map[**j] != usize::MAX).map(|(j, x)| (map[*j], *x)).collect();
            row.sort_by_key(|e| e.0);
            for (j, x) in row {
                out_c.push(j);
                out_v.push(x);
            }
            offsets.push(out_c.len());
        }
        CsrMatrix { nrows: rows.len(), ncols: cols.len(), offsets, cols: out_c, vals: out_v }
    }

    /// Row-major dense copy. Intended for small matrices and tests.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.iter() {
            d[i][j] += v;
        }
        d
    }

    /// Maximum number of stored entries below/above the diagonal.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut lo, mut up) = (0, 0);
        for (i, j, _) in self.iter() {
            if j < i {
                lo = lo.max(i - j);
            } else {
                up = up.max(j - i);
            }
        }
        (lo, up)
    }

    /// Writes one `i j value` line per stored entry, 0-based indices,
    /// values with 17 significant digits.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (i, j, v) in self.iter() {
            writeln!(w, "{i} {j} {v:.16e}")?;
        }
        Ok(())
    }
}
