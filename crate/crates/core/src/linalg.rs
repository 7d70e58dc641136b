//! Dense matrix helpers: the scaling-and-squaring exponential, norms and
//! small linear solves.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

// Padé numerator coefficients b_0..b_m (Higham 2005) for degrees 3, 5, 7, 9, 13.
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// 1-norm thresholds below which the degree-m approximant is used unscaled.
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068),
];
const THETA13: f64 = 5.371920351148152;

/// Maximum absolute column sum.
pub fn norm1<T: Real>(a: &DMatrix<T>) -> T {
    a.column_iter()
        .map(|c| c.iter().fold(T::zero(), |s, &v| s + v.abs()))
        .fold(T::zero(), |m, v| m.max(v))
}

/// Induced 2-norm (largest singular value).
pub fn norm2<T: Real>(a: &DMatrix<T>) -> T {
    if a.is_empty() {
        return T::zero();
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(T::zero(), |m, &v| m.max(v))
}

/// 2-norm condition number; infinite for singular input.
pub fn cond2<T: Real>(a: &DMatrix<T>) -> T {
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(T::zero(), |m, &v| m.max(v));
    let min = sv.iter().fold(T::max_value().unwrap(), |m, &v| m.min(v));
    if min <= T::zero() {
        T::max_value().unwrap()
    } else {
        max / min
    }
}

pub fn commutator<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a * b - b * a
}

/// Solve `a x = b`, failing with the condition number when `a` is singular.
pub fn solve<T: Real>(a: &DMatrix<T>, b: &DVector<T>) -> Result<DVector<T>> {
    let cond = cond2(a);
    if !(cond.as_f64() < 1e14) {
        return Err(Error::NumericFailure {
            message: "linear system is singular to working precision".into(),
            condition: cond.as_f64(),
        });
    }
    a.clone().lu().solve(b).ok_or_else(|| Error::NumericFailure {
        message: "LU solve failed".into(),
        condition: cond.as_f64(),
    })
}

pub fn inverse<T: Real>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    a.clone().try_inverse().ok_or_else(|| Error::NumericFailure {
        message: "matrix is not invertible".into(),
        condition: cond2(a).as_f64(),
    })
}

fn pade_terms<T: Real>(
    a: &DMatrix<T>,
    powers: &[DMatrix<T>],
    b: &[f64],
) -> (DMatrix<T>, DMatrix<T>) {
    // powers[k] = A^{2k}, powers[0] = I
    let n = a.nrows();
    let mut u = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        v += p * T::lit(b[2 * k]);
        if 2 * k + 1 < b.len() {
            u += p * T::lit(b[2 * k + 1]);
        }
    }
    (a * u, v)
}

/// Matrix exponential by scaling and squaring with a Padé kernel of
/// degree 3..13 chosen from the 1-norm.
pub fn expm<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return a.clone();
    }
    let ident = DMatrix::<T>::identity(n, n);
    let nrm = norm1(a).as_f64();
    if nrm == 0.0 {
        return ident;
    }
    let a2 = a * a;

    for &(m, theta) in THETA.iter() {
        if nrm <= theta {
            let mut powers = vec![ident.clone(), a2.clone()];
            while powers.len() < m / 2 + 1 {
                let next = powers.last().unwrap() * &a2;
                powers.push(next);
            }
            let b: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let (u, v) = pade_terms(a, &powers, b);
            return pade_solve(&u, &v);
        }
    }

    let s = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scale = T::lit(2f64.powi(-s));
    let a = a * scale;
    let a2 = &a2 * (scale * scale);
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b: Vec<T> = PADE13.iter().map(|&c| T::lit(c)).collect();
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = &a
        * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &ident * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &ident * b[0];
    let mut r = pade_solve(&u, &v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn pade_solve<T: Real>(u: &DMatrix<T>, v: &DMatrix<T>) -> DMatrix<T> {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular inside its threshold")
}
