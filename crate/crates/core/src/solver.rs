//! Direct factorization of the saddle point matrix and dense symmetric
//! generalized eigenvalue utilities.
//!
//! Problem sizes here are desk scale (a few thousand unknowns), so the sparse
//! operator is factorized through a dense row-pivoted LU; robustness on the
//! indefinite saddle point matrix matters more than asymptotic cost. One
//! factorization serves every time step since the operator is
//! time-independent.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Relative pivot threshold: a pivot below this multiple of the largest row
/// norm is treated as a structural singularity.
const PIVOT_RTOL: f64 = 1e-14;

pub struct Factorization {
    lu: nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
}

/// Row-pivoted LU of a square sparse matrix.
pub fn factorize(matrix: &CsrMatrix) -> Result<Factorization> {
    if matrix.nrows != matrix.ncols {
        return Err(Error::DimensionMismatch {
            expected: matrix.nrows,
            got: matrix.ncols,
        });
    }
    let n = matrix.nrows;
    let scale = matrix.norm_inf();
    let lu = nalgebra::linalg::LU::new(matrix.to_dense());
    let u = lu.u();
    for k in 0..n {
        let pivot = u[(k, k)].abs();
        if !(pivot > PIVOT_RTOL * scale) {
            return Err(Error::Singular { col: k, pivot });
        }
    }
    Ok(Factorization { lu, n })
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.len(),
            });
        }
        let b = DVector::from_column_slice(rhs);
        let x = self
            .lu
            .solve(&b)
            .ok_or(Error::Singular { col: 0, pivot: 0.0 })?;
        Ok(x.as_slice().to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Smallest,
    Largest,
}

fn cholesky_of(b: &CsrMatrix, what: &str) -> Result<nalgebra::linalg::Cholesky<f64, nalgebra::Dyn>> {
    nalgebra::linalg::Cholesky::new(b.to_dense())
        .ok_or_else(|| Error::NotSpd(what.to_string()))
}

/// All eigenvalues of the pencil A x = theta B x with A symmetric and B SPD,
/// sorted ascending, along with the eigenvectors (columns).
pub fn gen_eig_spectrum(a: &CsrMatrix, b: &CsrMatrix) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if a.nrows != b.nrows || a.ncols != b.ncols || a.nrows != a.ncols {
        return Err(Error::DimensionMismatch {
            expected: a.nrows,
            got: b.nrows,
        });
    }
    let chol = cholesky_of(b, "right-hand matrix of the eigenproblem")?;
    let l = chol.l();
    // C = L^-1 A L^-T, symmetrized against roundoff
    let ad = a.to_dense();
    let mut c = l.clone().solve_lower_triangular(&ad).ok_or_else(|| {
        Error::NotSpd("triangular solve failed in eigen transform".into())
    })?;
    c.transpose_mut();
    let mut c = l.solve_lower_triangular(&c).ok_or_else(|| {
        Error::NotSpd("triangular solve failed in eigen transform".into())
    })?;
    let ct = c.transpose();
    c = 0.5 * (&c + &ct);
    let eig = nalgebra::linalg::SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    // map eigenvectors back: x = L^-T y
    let n = a.nrows;
    let mut vectors = DMatrix::zeros(n, n);
    let lt = l.transpose();
    for (k, &i) in order.iter().enumerate() {
        let y = eig.eigenvectors.column(i).clone_owned();
        let x = lt
            .solve_upper_triangular(&y)
            .ok_or_else(|| Error::NotSpd("triangular solve failed in back map".into()))?;
        vectors.set_column(k, &x);
    }
    Ok((values, vectors))
}

/// Extreme eigenpair of A x = theta B x (A symmetric, B SPD). The returned
/// pair satisfies ||A x - theta B x|| <= 1e-8 ||A||_inf with ||x|| = 1.
pub fn gen_eig_extreme(
    a: &CsrMatrix,
    b: &CsrMatrix,
    which: Extreme,
) -> Result<(f64, Vec<f64>)> {
    let (values, vectors) = gen_eig_spectrum(a, b)?;
    let k = match which {
        Extreme::Smallest => 0,
        Extreme::Largest => values.len() - 1,
    };
    let theta = values[k];
    let mut x = vectors.column(k).clone_owned();
    x /= x.norm();
    let r = a.to_dense() * &x - theta * (b.to_dense() * &x);
    let tol = 1e-8 * a.norm_inf().max(1.0);
    if r.norm() > tol {
        return Err(Error::NotSpd(format!(
            "eigen residual {:.3e} exceeds {:.3e}",
            r.norm(),
            tol
        )));
    }
    Ok((theta, x.as_slice().to_vec()))
}
