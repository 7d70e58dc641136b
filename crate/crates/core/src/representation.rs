//! Matrix representations `α : g → gl(H)` with `H = R^{dim_H}`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::algebra::{AlgebraVector, LieAlgebra};
use crate::diff::{self, Stencil};
use crate::error::{Error, Result};
use crate::linalg;
use crate::logderiv::{log_derivative, SmoothPath};
use crate::quadrature::QuadratureRule;
use crate::report::{CheckRecord, VerificationReport};
use crate::scalar::Real;

pub const HOMOMORPHISM_TOLERANCE: f64 = 1e-10;
pub const SKEW_TOLERANCE: f64 = 1e-12;

/// Note attached to every representation report.
pub const FINITE_DIMENSION_NOTE: &str =
    "A1 (essential skew-adjointness) and A2 (invariant domain): trivially satisfied (finite dimension)";

/// A bounded operator on `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real>(DMatrix<T>);

impl<T: Real> Operator<T> {
    pub fn from_matrix(m: DMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidArgument(format!("operator must be square, got {}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        Ok(Operator(m))
    }

    pub fn identity(n: usize) -> Self {
        Operator(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.0
    }

    pub fn apply(&self, v: &DVector<T>) -> DVector<T> {
        &self.0 * v
    }

    pub fn compose(&self, other: &Operator<T>) -> Operator<T> {
        Operator(&self.0 * &other.0)
    }

    pub fn transpose(&self) -> Operator<T> {
        Operator(self.0.transpose())
    }

    pub fn norm2(&self) -> T {
        linalg::norm2(&self.0)
    }

    /// Operator 2-norm of the difference.
    pub fn distance(&self, other: &Operator<T>) -> T {
        linalg::norm2(&(&self.0 - &other.0))
    }

    /// `‖UᵀU − I‖₂`.
    pub fn orthogonality_defect(&self) -> T {
        let n = self.dim();
        linalg::norm2(&(self.0.transpose() * &self.0 - DMatrix::identity(n, n)))
    }
}

#[derive(Debug, Clone)]
pub struct Representation<T: Real> {
    name: String,
    algebra: LieAlgebra<T>,
    dim_h: usize,
    matrices: Vec<DMatrix<T>>,
    skew: bool,
}

impl<T: Real> Representation<T> {
    /// Build and validate; fails with the located violation.
    pub fn new(
        name: impl Into<String>,
        algebra: &LieAlgebra<T>,
        matrices: Vec<DMatrix<T>>,
        skew: bool,
    ) -> Result<Self> {
        let rep = Self::new_unchecked(name, algebra, matrices, skew)?;
        let report = rep.validate();
        if let Some(bad) = report.failures().next() {
            return Err(Error::InvalidRepresentation(format!(
                "{}: {} residual {:e} exceeds {:e}{}",
                rep.name,
                bad.check_name,
                bad.residual,
                bad.tolerance,
                bad.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
            )));
        }
        Ok(rep)
    }

    /// Shape checks only. Used for deliberately broken fixtures.
    pub fn new_unchecked(
        name: impl Into<String>,
        algebra: &LieAlgebra<T>,
        matrices: Vec<DMatrix<T>>,
        skew: bool,
    ) -> Result<Self> {
        let name = name.into();
        if matrices.len() != algebra.dim() {
            return Err(Error::InvalidRepresentation(format!(
                "{name}: {} matrices for an algebra of dimension {}",
                matrices.len(),
                algebra.dim()
            )));
        }
        let dim_h = matrices.first().map(|m| m.nrows()).unwrap_or(0);
        if dim_h == 0 {
            return Err(Error::InvalidRepresentation(format!("{name}: dim_H must be positive")));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.nrows() != dim_h || m.ncols() != dim_h {
                return Err(Error::InvalidRepresentation(format!(
                    "{name}: matrix {i} is {}x{}, expected {dim_h}x{dim_h}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidRepresentation(format!("{name}: matrix {i} has non-finite entries")));
            }
        }
        Ok(Representation {
            name,
            algebra: algebra.clone(),
            dim_h,
            matrices,
            skew,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> &LieAlgebra<T> {
        &self.algebra
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn matrices(&self) -> &[DMatrix<T>] {
        &self.matrices
    }

    pub fn is_skew(&self) -> bool {
        self.skew
    }

    /// Homomorphism residual per basis pair (max abs entry) and, when
    /// claimed, skew-symmetry.
    pub fn validate(&self) -> VerificationReport {
        let d = self.algebra.dim();
        let mut report = VerificationReport::new(format!("representation {}", self.name));
        let mut worst = (0.0f64, None);
        for i in 0..d {
            for j in (i + 1)..d {
                let r = self.basis_homomorphism_defect(i, j);
                if r > worst.0 || (!r.is_finite() && worst.1.is_none()) {
                    worst = (r, Some((i, j)));
                }
            }
        }
        let mut rec = CheckRecord::new("rep.homomorphism", worst.0, HOMOMORPHISM_TOLERANCE)
            .with_samples(d * d.saturating_sub(1) / 2);
        if let (false, Some((i, j))) = (rec.pass, worst.1) {
            let names = self.algebra.basis_names();
            rec = rec.with_detail(format!(
                "bracket of ({}, {}) = ({i}, {j}) not preserved",
                names[i], names[j]
            ));
        }
        report.push(rec);
        if self.skew {
            let (r, at) = self
                .matrices
                .iter()
                .enumerate()
                .map(|(i, m)| ((m + m.transpose()).amax().as_f64(), i))
                .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
            let mut rec = CheckRecord::new("rep.skew", r, SKEW_TOLERANCE).with_samples(d);
            if !rec.pass {
                rec = rec.with_detail(format!("image of {} is not skew-symmetric", self.algebra.basis_names()[at]));
            }
            report.push(rec);
        }
        report.notes.push(FINITE_DIMENSION_NOTE.into());
        report.finalize();
        report
    }

    fn basis_homomorphism_defect(&self, i: usize, j: usize) -> f64 {
        let mut image = DMatrix::zeros(self.dim_h, self.dim_h);
        for (k, m) in self.matrices.iter().enumerate() {
            let c = self.algebra.constant(i, j, k);
            if c != T::zero() {
                image += m * c;
            }
        }
        (image - linalg::commutator(&self.matrices[i], &self.matrices[j]))
            .amax()
            .as_f64()
    }

    fn check_vector(&self, v: &DVector<T>) -> Result<()> {
        if v.len() != self.dim_h {
            return Err(Error::dims(self.dim_h, v.len()));
        }
        Ok(())
    }

    /// `α(x) = Σ x_i α(e_i)`.
    pub fn apply(&self, x: &AlgebraVector<T>) -> Result<Operator<T>> {
        self.algebra.check_member(x)?;
        let mut out = DMatrix::zeros(self.dim_h, self.dim_h);
        for (c, m) in x.coords().iter().zip(&self.matrices) {
            if *c != T::zero() {
                out += m * *c;
            }
        }
        Ok(Operator(out))
    }

    /// `e^{α(x)}`.
    pub fn exp_op(&self, x: &AlgebraVector<T>) -> Result<Operator<T>> {
        Ok(Operator(linalg::expm(self.apply(x)?.matrix())))
    }

    /// `‖α([x, y]) − [α(x), α(y)]‖₂`.
    pub fn homomorphism_residual(&self, x: &AlgebraVector<T>, y: &AlgebraVector<T>) -> Result<T> {
        let lhs = self.apply(&self.algebra.bracket(x, y)?)?;
        let (ax, ay) = (self.apply(x)?, self.apply(y)?);
        Ok(linalg::norm2(&(lhs.0 - linalg::commutator(&ax.0, &ay.0))))
    }

    /// `‖e^{α(x)} α(y) e^{−α(x)} − α(e^{ad x} y)‖₂`.
    pub fn commutation_residual(&self, x: &AlgebraVector<T>, y: &AlgebraVector<T>) -> Result<T> {
        let lhs = self.exp_op(x)?.compose(&self.apply(y)?).compose(&self.exp_op(&-x)?);
        let rhs = self.apply(&self.algebra.exp_ad(x)?.apply(y))?;
        Ok(lhs.distance(&rhs))
    }

    /// Largest deviation of `F(s) = e^{(1−s)α(x)} α(e^{s ad x} y) e^{(s−1)α(x)} v`
    /// from `F(0)` over the grid.
    pub fn constancy_residual(
        &self,
        x: &AlgebraVector<T>,
        y: &AlgebraVector<T>,
        grid: &[T],
        v: &DVector<T>,
    ) -> Result<T> {
        self.check_vector(v)?;
        let f = |s: T| -> Result<DVector<T>> {
            let a = self.exp_op(&x.scale(T::one() - s))?;
            let b = self.apply(&self.algebra.exp_ad(&x.scale(s))?.apply(y))?;
            let c = self.exp_op(&x.scale(s - T::one()))?;
            Ok(a.apply(&b.apply(&c.apply(v))))
        };
        let f0 = f(T::zero())?;
        let mut worst = T::zero();
        for &s in grid {
            worst = worst.max((f(s)? - &f0).norm());
        }
        Ok(worst)
    }

    /// `‖e^{tB}v − e^{tA}v − ∫₀ᵗ e^{sB}(B−A)e^{(t−s)A}v ds‖` with `A = α(x)`,
    /// `B = α(y)`.
    pub fn duhamel_residual(
        &self,
        x: &AlgebraVector<T>,
        y: &AlgebraVector<T>,
        t: T,
        v: &DVector<T>,
        q: &QuadratureRule<T>,
    ) -> Result<T> {
        self.check_vector(v)?;
        let a = self.apply(x)?.0;
        let b = self.apply(y)?.0;
        let diff = &b - &a;
        let mut integral = DVector::zeros(self.dim_h);
        for (u, w) in q.iter() {
            let s = u * t;
            let inner = linalg::expm(&(&a * (t - s))) * v;
            integral += linalg::expm(&(&b * s)) * (&diff * inner) * (w * t);
        }
        let lhs = linalg::expm(&(&b * t)) * v - linalg::expm(&(&a * t)) * v;
        Ok((lhs - integral).norm())
    }

    /// `|⟨−e^{α(x)}α(y)v, w⟩ − ⟨e^{α(x)}v, α(e^{ad x}y)w⟩|`; skew only.
    pub fn fsss_pairing_residual(
        &self,
        x: &AlgebraVector<T>,
        y: &AlgebraVector<T>,
        v: &DVector<T>,
        w: &DVector<T>,
    ) -> Result<T> {
        if !self.skew {
            return Err(Error::Precondition(format!(
                "pairing identity needs a skew-symmetric representation; {} is not",
                self.name
            )));
        }
        self.check_vector(v)?;
        self.check_vector(w)?;
        let ex = self.exp_op(x)?;
        let lhs = -ex.apply(&self.apply(y)?.apply(v)).dot(w);
        let rhs = ex.apply(v).dot(&self.apply(&self.algebra.exp_ad(x)?.apply(y))?.apply(w));
        Ok((lhs - rhs).abs())
    }

    /// `‖d/dt e^{α(p(t))}v − α(δ(p)_t) e^{α(p(t))}v‖` with the derivative
    /// taken by the given stencil.
    pub fn derpath_residual(
        &self,
        p: &SmoothPath<T>,
        t: T,
        v: &DVector<T>,
        q: &QuadratureRule<T>,
        stencil: Stencil<T>,
    ) -> Result<T> {
        self.check_vector(v)?;
        let d = diff::derivative(|s| Ok(self.exp_op(&p.value(s))?.apply(v)), t, stencil, p.interval())?;
        let delta = log_derivative(&self.algebra, p, t, q)?;
        let rhs = self.apply(&delta)?.apply(&self.exp_op(&p.value(t))?.apply(v));
        Ok((d.value - rhs).norm())
    }
}

/// Real form `[[Re, −Im], [Im, Re]]` of a complex matrix.
pub fn realify(m: &DMatrix<Complex<f64>>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * m.ncols());
    for i in 0..n {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + m.ncols())] = -z.im;
            out[(i + n, j)] = z.im;
            out[(i + n, j + m.ncols())] = z.re;
        }
    }
    out
}

/// `−iJ_k` for the spin-`j` angular momentum operators in the `|j, m⟩`
/// basis (`m = j, j−1, …, −j`), with `j = two_j / 2`.
pub fn spin_generators(two_j: usize) -> [DMatrix<Complex<f64>>; 3] {
    let n = two_j + 1;
    let j = two_j as f64 / 2.0;
    let m = |a: usize| j - a as f64;
    let mut jp = DMatrix::<Complex<f64>>::zeros(n, n);
    for a in 1..n {
        // J₊|m⟩ = √(j(j+1) − m(m+1)) |m+1⟩, and |m+1⟩ sits at index a−1.
        let mm = m(a);
        jp[(a - 1, a)] = Complex::new((j * (j + 1.0) - mm * (mm + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let half = Complex::new(0.5, 0.0);
    let jx = (&jp + &jm) * half;
    let jy = (&jp - &jm) * Complex::new(0.0, -0.5);
    let jz = DMatrix::from_fn(n, n, |a, b| if a == b { Complex::new(m(a), 0.0) } else { Complex::new(0.0, 0.0) });
    let mi = Complex::new(0.0, -1.0);
    [jx * mi, jy * mi, jz * mi]
}

/// Real orthogonal spin-`j` irrep of so(3) for integer `j` (`dim_H = 2j+1`),
/// images of the basis with `[e_i, e_j] = ε_ijk e_k`.
pub fn spin_irrep_real(j: usize) -> Result<Vec<DMatrix<f64>>> {
    let n = 2 * j + 1;
    let idx = |mm: i64| (j as i64 - mm) as usize;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // Columns: real combinations of |m⟩ and |−m⟩.
    let mut u = DMatrix::<Complex<f64>>::zeros(n, n);
    u[(idx(0), 0)] = Complex::new(1.0, 0.0);
    for mm in 1..=j as i64 {
        let sign = if mm % 2 == 0 { 1.0 } else { -1.0 };
        let c = 2 * mm as usize - 1;
        u[(idx(-mm), c)] = Complex::new(r, 0.0);
        u[(idx(mm), c)] = Complex::new(sign * r, 0.0);
        u[(idx(-mm), c + 1)] = Complex::new(0.0, r);
        u[(idx(mm), c + 1)] = Complex::new(0.0, -sign * r);
    }
    let ut = u.adjoint();
    let mut out = Vec::with_capacity(3);
    for g in spin_generators(2 * j) {
        let m = &ut * g * &u;
        let imag = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if imag > 1e-12 {
            return Err(Error::NumericFailure {
                message: format!("spin-{j} generator is not real in the chosen basis"),
                condition: imag,
            });
        }
        out.push(m.map(|z| z.re));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::StructureConstant;

    fn so3() -> LieAlgebra<f64> {
        let c = |i, j, k| StructureConstant { i, j, k, value: 1.0 };
        LieAlgebra::new("so3", vec!["e1".into(), "e2".into(), "e3".into()], &[c(0, 1, 2), c(1, 2, 0), c(2, 0, 1)])
            .unwrap()
    }

    fn defining() -> Vec<DMatrix<f64>> {
        // (L_k)_{ij} = −ε_{kij}
        (0..3)
            .map(|k| {
                DMatrix::from_fn(3, 3, |i, j| {
                    let e = |a: usize, b: usize, c: usize| -> f64 {
                        match (a, b, c) {
                            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
                            _ => 0.0,
                        }
                    };
                    -e(k, i, j)
                })
            })
            .collect()
    }

    fn v(xs: &[f64]) -> AlgebraVector<f64> {
        AlgebraVector::from_slice(xs)
    }

    #[test]
    fn defining_rep_is_valid() {
        let g = so3();
        let rep = Representation::new("defining", &g, defining(), true).unwrap();
        assert!(rep.validate().all_pass());
        assert_eq!(rep.apply(&g.zero()).unwrap().norm2(), 0.0);
        let l1 = rep.apply(&g.basis_vector(0)).unwrap();
        assert_eq!(l1.matrix(), &defining()[0]);
    }

    #[test]
    fn rotation_by_pi() {
        let g = so3();
        let rep = Representation::new("defining", &g, defining(), true).unwrap();
        let u = rep.exp_op(&v(&[0.0, 0.0, std::f64::consts::PI])).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((u.matrix() - expected).amax() < 1e-14);
        let x = v(&[0.3, -1.1, 0.4]);
        let back = rep.exp_op(&x).unwrap().compose(&rep.exp_op(&-&x).unwrap());
        assert!(back.distance(&Operator::identity(3)) <= 1e-12);
        assert!(rep.exp_op(&x).unwrap().orthogonality_defect() <= 1e-11);
    }

    #[test]
    fn spin_irreps_are_homomorphisms() {
        let g = so3();
        for j in 1..=3 {
            let ms = spin_irrep_real(j).unwrap();
            assert_eq!(ms[0].nrows(), 2 * j + 1);
            let rep = Representation::new(format!("spin{j}"), &g, ms, true).unwrap();
            let r = rep.validate().record("rep.homomorphism").unwrap().residual;
            assert!(r <= 1e-10, "spin {j}: {r}");
        }
    }

    #[test]
    fn spin_one_matches_defining_up_to_conjugation() {
        // Casimir Σ α(e_i)² = −j(j+1) I in every irrep.
        for j in 1..=3 {
            let ms = spin_irrep_real(j).unwrap();
            let cas = ms.iter().fold(DMatrix::zeros(2 * j + 1, 2 * j + 1), |acc, m| acc + m * m);
            let n = 2 * j + 1;
            let expected = DMatrix::<f64>::identity(n, n) * -((j * (j + 1)) as f64);
            assert!((cas - expected).amax() < 1e-12);
        }
    }

    #[test]
    fn realified_spin_half() {
        let g = so3();
        let ms: Vec<_> = spin_generators(1).iter().map(realify).collect();
        let rep = Representation::new("spin1/2", &g, ms, true).unwrap();
        assert_eq!(rep.dim_h(), 4);
    }

    #[test]
    fn identity_residuals() {
        let g = so3();
        let rep = Representation::new("spin2", &g, spin_irrep_real(2).unwrap(), true).unwrap();
        let x = v(&[0.5, -0.3, 0.6]);
        let y = v(&[-0.2, 0.7, 0.1]);
        let e0 = DVector::from_fn(5, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let w = DVector::from_fn(5, |i, _| (i as f64 + 1.0) / 10.0);
        let q = QuadratureRule::default();
        assert!(rep.commutation_residual(&x, &y).unwrap() <= 1e-9);
        assert_eq!(rep.commutation_residual(&g.zero(), &y).unwrap(), 0.0);
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        assert!(rep.constancy_residual(&x, &y, &grid, &e0).unwrap() <= 1e-9);
        assert_eq!(rep.constancy_residual(&x, &y, &[0.0], &e0).unwrap(), 0.0);
        assert!(rep.duhamel_residual(&x, &y, 1.0, &e0, &q).unwrap() <= 1e-9);
        assert_eq!(rep.duhamel_residual(&x, &x, 1.0, &e0, &q).unwrap(), 0.0);
        assert!(rep.fsss_pairing_residual(&x, &y, &e0, &w).unwrap() <= 1e-10);
        assert!(rep.homomorphism_residual(&x, &y).unwrap() <= 1e-10);
    }

    #[test]
    fn derpath_straight_and_curved() {
        let g = so3();
        let rep = Representation::new("defining", &g, defining(), true).unwrap();
        let v0 = DVector::from_vec(vec![0.6, 0.0, 0.8]);
        let q = QuadratureRule::default();
        let p = SmoothPath::polynomial(vec![g.zero(), v(&[0.4, 0.0, 0.0]), v(&[0.0, 0.0, 0.2])], (0.0, 1.0)).unwrap();
        let r = rep.derpath_residual(&p, 0.5, &v0, &q, Stencil::richardson(1e-4)).unwrap();
        assert!(r <= 1e-7, "{r}");
        let coarse = rep.derpath_residual(&p, 0.5, &v0, &q, Stencil::central(0.02)).unwrap();
        let fine = rep.derpath_residual(&p, 0.5, &v0, &q, Stencil::central(0.01)).unwrap();
        assert!((coarse / fine - 4.0).abs() < 0.2, "{}", coarse / fine);
    }

    #[test]
    fn broken_fixture_fails_validation() {
        let g = so3();
        let mut ms = defining();
        ms[0][(1, 2)] += 1e-3;
        assert!(matches!(Representation::new("broken", &g, ms.clone(), false), Err(Error::InvalidRepresentation(_))));
        let rep = Representation::new_unchecked("broken", &g, ms, false).unwrap();
        assert!(!rep.validate().all_pass());
        assert!(rep.commutation_residual(&v(&[0.4, 0.0, 0.0]), &v(&[0.0, 0.4, 0.0])).unwrap() >= 1e-5);
    }

    #[test]
    fn pairing_requires_skew() {
        let g = so3();
        let rep = Representation::new("defining", &g, defining(), false).unwrap();
        let e = DVector::from_element(3, 1.0);
        assert!(matches!(
            rep.fsss_pairing_residual(&g.zero(), &g.zero(), &e, &e),
            Err(Error::Precondition(_))
        ));
    }
}
