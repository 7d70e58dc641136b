//! Group-level reference computations in a faithful matrix realization.
//!
//! These routines never touch the series or chart solvers; they work with
//! matrix exponentials, principal logarithms and QR factorizations only, so
//! they can certify the algebra-level code.

use nalgebra::{DMatrix, DVector};

use crate::algebra::AlgebraVector;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

/// Linearly independent matrices `M_i` realizing a basis of the algebra.
#[derive(Debug, Clone)]
pub struct MatrixRealization<T: Real> {
    matrices: Vec<DMatrix<T>>,
    // Least-squares left inverse of the vectorization map x ↦ Σ x_i M_i.
    pinv: DMatrix<T>,
    stacked: DMatrix<T>,
}

impl<T: Real> MatrixRealization<T> {
    pub fn new(matrices: Vec<DMatrix<T>>) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::InvalidArgument("empty matrix realization".into()));
        };
        let (r, c) = first.shape();
        if r != c {
            return Err(Error::InvalidArgument("realization matrices must be square".into()));
        }
        let mut stacked = DMatrix::zeros(r * c, matrices.len());
        for (i, m) in matrices.iter().enumerate() {
            if m.shape() != (r, c) {
                return Err(Error::InvalidArgument("realization matrices differ in shape".into()));
            }
            stacked.column_mut(i).copy_from_slice(m.as_slice());
        }
        let gram = stacked.transpose() * &stacked;
        let cond = linalg::cond2(&gram);
        if !(cond.as_f64() < 1e14) {
            return Err(Error::NumericFailure {
                message: "realization matrices are linearly dependent (not faithful)".into(),
                condition: cond.as_f64(),
            });
        }
        let pinv = linalg::inverse(&gram)? * stacked.transpose();
        Ok(MatrixRealization { matrices, pinv, stacked })
    }

    pub fn matrix_dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[DMatrix<T>] {
        &self.matrices
    }

    pub fn push_forward(&self, x: &AlgebraVector<T>) -> DMatrix<T> {
        let n = self.matrix_dim();
        let v = &self.stacked * x.coords();
        DMatrix::from_column_slice(n, n, v.as_slice())
    }

    /// Coordinates of the best approximation of `m` in the span, and the
    /// Frobenius distance from `m` to that span.
    pub fn pull_back(&self, m: &DMatrix<T>) -> (AlgebraVector<T>, T) {
        let flat = DVector::from_column_slice(m.as_slice());
        let coords = &self.pinv * &flat;
        let resid = (&self.stacked * &coords - flat).norm();
        (AlgebraVector::from_dvector(coords), resid)
    }
}

/// Principal square root by the Denman–Beavers iteration.
pub fn sqrtm<T: Real>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<T>::identity(n, n);
    for _ in 0..100 {
        let yi = linalg::inverse(&y)?;
        let zi = linalg::inverse(&z)?;
        let half = T::lit(0.5);
        let y_next = (&y + zi) * half;
        let z_next = (&z + yi) * half;
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta <= T::default_epsilon() * T::lit(4.0) * y.norm() {
            return Ok(y);
        }
    }
    Err(Error::NumericFailure {
        message: "Denman–Beavers square root did not converge".into(),
        condition: linalg::cond2(a).as_f64(),
    })
}

/// Principal matrix logarithm by inverse scaling and squaring: take square
/// roots until the argument is near the identity, then sum the series of
/// `2 atanh((A − I)(A + I)^{-1})`.
pub fn logm<T: Real>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = a.nrows();
    let ident = DMatrix::<T>::identity(n, n);
    let mut x = a.clone();
    let mut roots = 0u32;
    while linalg::norm1(&(&x - &ident)).as_f64() > 0.25 {
        x = sqrtm(&x)?;
        roots += 1;
        if roots > 60 {
            return Err(Error::NumericFailure {
                message: "matrix logarithm: argument does not approach the identity".into(),
                condition: linalg::cond2(a).as_f64(),
            });
        }
    }
    let c = (&x - &ident) * linalg::inverse(&(&x + &ident))?;
    let c2 = &c * &c;
    let mut power = c.clone();
    let mut sum = c;
    for k in 1..200 {
        power = &power * &c2;
        let term = &power / T::from_usize_lossy(2 * k + 1);
        let tn = term.norm();
        sum += term;
        if tn <= T::default_epsilon() * sum.norm() * T::lit(1e-2) || tn == T::zero() {
            break;
        }
    }
    Ok(sum * T::lit(2f64.powi(roots as i32 + 1)))
}

/// `log(e^X e^Y)` pulled back to algebra coordinates.
pub fn bch_reference<T: Real>(
    real: &MatrixRealization<T>,
    x: &AlgebraVector<T>,
    y: &AlgebraVector<T>,
) -> Result<(AlgebraVector<T>, T)> {
    product_log_reference(real, &[x.clone(), y.clone()])
}

/// `log(e^{X_1} ⋯ e^{X_n})` pulled back to algebra coordinates, with the
/// distance of the logarithm from the realized span.
pub fn product_log_reference<T: Real>(
    real: &MatrixRealization<T>,
    xs: &[AlgebraVector<T>],
) -> Result<(AlgebraVector<T>, T)> {
    let n = real.matrix_dim();
    let mut g = DMatrix::<T>::identity(n, n);
    for x in xs {
        g *= linalg::expm(&real.push_forward(x));
    }
    let l = logm(&g)?;
    Ok(real.pull_back(&l))
}

/// Group-level splitting `G = K A N` of a matrix with positive determinant:
/// QR with `R` normalized to a positive diagonal, then `R = A N` with `A`
/// diagonal and `N` unipotent upper triangular.
pub fn iwasawa_split<T: Real>(m: &DMatrix<T>) -> Result<[DMatrix<T>; 3]> {
    let n = m.nrows();
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..n {
        if r[(i, i)] < T::zero() {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    let (a, nil) = diagonal_unipotent_split(&r)?;
    Ok([q, a, nil])
}

/// `R = D N` for upper-triangular `R` with positive diagonal.
pub fn diagonal_unipotent_split<T: Real>(r: &DMatrix<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let n = r.nrows();
    let mut d = DMatrix::<T>::zeros(n, n);
    let mut nil = r.clone();
    for i in 0..n {
        let di = r[(i, i)];
        if !(di > T::zero()) {
            return Err(Error::Precondition(format!("diagonal entry {i} is not positive")));
        }
        d[(i, i)] = di;
        for j in 0..n {
            nil[(i, j)] /= di;
        }
    }
    Ok((d, nil))
}

/// Factor logarithms for a group-level splitting, pulled back to coordinates.
pub fn split_logs<T: Real>(
    real: &MatrixRealization<T>,
    factors: &[DMatrix<T>],
) -> Result<Vec<(AlgebraVector<T>, T)>> {
    factors
        .iter()
        .map(|f| logm(f).map(|l| real.pull_back(&l)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_inverts_exp() {
        let a = DMatrix::from_row_slice(3, 3, &[0.1, -0.7, 0.3, 0.5, 0.2, -0.4, -0.2, 0.9, -0.3]);
        let l = logm(&linalg::expm(&a)).unwrap();
        assert!((l - a).amax() < 1e-13);
    }

    #[test]
    fn log_of_rotation() {
        let t = 2.5f64;
        let r = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        let l = logm(&r).unwrap();
        assert!((l[(1, 0)] - t).abs() < 1e-13);
        assert!(l[(0, 0)].abs() < 1e-13);
    }

    #[test]
    fn sqrt_squares_back() {
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 0.0, 9.0]);
        let s = sqrtm(&a).unwrap();
        assert!((&s * &s - a).amax() < 1e-13);
    }

    #[test]
    fn iwasawa_recombines() {
        let m = linalg::expm(&DMatrix::<f64>::from_row_slice(2, 2, &[0.1, 0.2, -0.05, -0.1]));
        let [k, a, n] = iwasawa_split(&m).unwrap();
        assert!((&k * &a * &n - &m).amax() < 1e-14);
        assert!((k.transpose() * &k - DMatrix::identity(2, 2)).amax() < 1e-14);
        assert_eq!(n[(1, 0)], 0.0);
        assert!((n[(0, 0)] - 1.0).abs() < 1e-15 && (n[(1, 1)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pull_back_reports_off_span_distance() {
        let real = MatrixRealization::new(vec![DMatrix::<f64>::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])]).unwrap();
        let (c, r) = real.pull_back(&DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -2.0]));
        assert!((c.coords()[0] - 2.0).abs() < 1e-15 && r < 1e-15);
        let (_, r) = real.pull_back(&DMatrix::identity(2, 2));
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }
}
