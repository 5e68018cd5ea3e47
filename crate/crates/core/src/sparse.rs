//! Minimal compressed-row sparse matrices sized for desk-scale direct solves.

use std::io::Write;

use crate::error::Result;

/// Compressed row storage; columns sorted and unique within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_offsets: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            row_offsets: vec![0; nrows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c];
            }
            y[i] = acc;
        }
        y
    }

    /// y = A^T x
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                y[*c] += v * x[i];
            }
        }
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut b = TripletBuilder::new(self.ncols, self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                b.add(*c, i, *v);
            }
        }
        b.build()
    }

    /// x^T A y
    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.mul_vec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                m[(i, *c)] = *v;
            }
        }
        m
    }

    pub fn from_dense(m: &nalgebra::DMatrix<f64>, drop_tol: f64) -> CsrMatrix {
        let mut b = TripletBuilder::new(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)].abs() > drop_tol {
                    b.add(i, j, m[(i, j)]);
                }
            }
        }
        b.build()
    }

    /// Restriction to a subset of rows and columns (kept in the given order).
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_of = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            col_of[c] = k;
        }
        let mut b = TripletBuilder::new(rows.len(), cols.len());
        for (ri, &r) in rows.iter().enumerate() {
            let (cs, vs) = self.row(r);
            for (c, v) in cs.iter().zip(vs) {
                if col_of[*c] != usize::MAX {
                    b.add(ri, col_of[*c], *v);
                }
            }
        }
        b.build()
    }

    /// Max relative asymmetry |A - A^T| / |A|_inf over the sparsity pattern.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.norm_inf().max(1e-300);
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(*c, i)).abs());
            }
        }
        worst / scale
    }

    /// Write in Matrix Market coordinate format.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:.16e}", i + 1, c + 1, v)?;
            }
        }
        Ok(())
    }
}

/// Accumulates (row, col, value) triplets, summing duplicates on build.
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletBuilder {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    pub fn build(mut self) -> CsrMatrix {
        self.entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_offsets = Vec::with_capacity(self.nrows + 1);
        let mut col_indices: Vec<usize> = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        row_offsets.push(0);
        let mut current_row = 0usize;
        for (i, j, v) in self.entries {
            while current_row < i {
                row_offsets.push(col_indices.len());
                current_row += 1;
            }
            // duplicates are adjacent after sorting
            if col_indices.len() > *row_offsets.last().unwrap()
                && *col_indices.last().unwrap() == j
            {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(j);
                values.push(v);
            }
        }
        while current_row < self.nrows {
            row_offsets.push(col_indices.len());
            current_row += 1;
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_offsets,
            col_indices,
            values,
        }
    }
}

/// Assemble a block matrix [[A, B^T], [B, 0]].
pub fn saddle_point_matrix(a: &CsrMatrix, b: &CsrMatrix) -> CsrMatrix {
    assert_eq!(a.nrows, a.ncols);
    assert_eq!(b.ncols, a.ncols);
    let n = a.nrows;
    let m = b.nrows;
    let mut out = TripletBuilder::new(n + m, n + m);
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (c, v) in cols.iter().zip(vals) {
            out.add(i, *c, *v);
        }
    }
    for i in 0..m {
        let (cols, vals) = b.row(i);
        for (c, v) in cols.iter().zip(vals) {
            out.add(n + i, *c, *v);
            out.add(*c, n + i, *v);
        }
    }
    out.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplet_merge_and_sort() {
        let mut b = TripletBuilder::new(3, 3);
        b.add(2, 1, 1.0);
        b.add(0, 2, 3.0);
        b.add(0, 0, 1.0);
        b.add(0, 0, 1.5);
        b.add(2, 1, -1.0);
        let m = b.build();
        assert_eq!(m.get(0, 0), 2.5);
        assert_eq!(m.get(0, 2), 3.0);
        assert_eq!(m.get(2, 1), 0.0);
        assert_eq!(m.get(1, 1), 0.0);
        // sorted unique columns per row
        for i in 0..3 {
            let (cols, _) = m.row(i);
            for w in cols.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn empty_rows_have_consistent_offsets() {
        let mut b = TripletBuilder::new(4, 4);
        b.add(2, 2, 5.0);
        let m = b.build();
        assert_eq!(m.row_offsets, vec![0, 0, 0, 1, 1]);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0, 1.0]), vec![0.0, 0.0, 5.0, 0.0]);
    }

    #[test]
    fn transpose_roundtrip() {
        let mut b = TripletBuilder::new(2, 3);
        b.add(0, 1, 2.0);
        b.add(1, 0, -1.0);
        b.add(1, 2, 4.0);
        let m = b.build();
        let mt = m.transpose();
        assert_eq!(mt.get(1, 0), 2.0);
        assert_eq!(mt.get(0, 1), -1.0);
        assert_eq!(mt.get(2, 1), 4.0);
        assert_eq!(mt.transpose(), m);
    }

    #[test]
    fn matrix_market_header() {
        let m = CsrMatrix::identity(2);
        let mut out = Vec::new();
        m.write_matrix_market(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n"));
        assert!(text.contains("2 2 2"));
    }

    #[test]
    fn saddle_layout() {
        let a = CsrMatrix::identity(2);
        let mut bb = TripletBuilder::new(1, 2);
        bb.add(0, 0, 3.0);
        bb.add(0, 1, 4.0);
        let b = bb.build();
        let s = saddle_point_matrix(&a, &b);
        assert_eq!(s.nrows, 3);
        assert_eq!(s.get(2, 0), 3.0);
        assert_eq!(s.get(0, 2), 3.0);
        assert_eq!(s.get(2, 2), 0.0);
        assert!(s.asymmetry() < 1e-15);
    }
}
