//! Right logarithmic derivatives `δ(γ)_t = ∫₀¹ e^{s ad γ(t)} γ'(t) ds`.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{AlgebraVector, LieAlgebra};
use crate::bch::{bch, bch_differential_at_zero_right, BchConfig};
use crate::diff::{self, Stencil};
use crate::error::{Error, Result};
use crate::factorization::{component_derivative, FactorizedPath};
use crate::quadrature::QuadratureRule;
use crate::scalar::Real;

type PathFn<T> = Arc<dyn Fn(T) -> AlgebraVector<T> + Send + Sync>;

/// Default finite-difference step for paths without an analytic derivative.
pub const PATH_STEP: f64 = 1e-5;

/// A smooth path `γ : [t₀, t₁] → g`.
#[derive(Clone)]
pub struct SmoothPath<T: Real> {
    value: PathFn<T>,
    derivative: Option<PathFn<T>>,
    interval: (T, T),
    stencil: Stencil<T>,
}

impl<T: Real> fmt::Debug for SmoothPath<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothPath")
            .field("interval", &self.interval)
            .field("analytic_derivative", &self.derivative.is_some())
            .field("stencil", &self.stencil)
            .finish()
    }
}

impl<T: Real> SmoothPath<T> {
    pub fn new<F>(value: F, interval: (T, T)) -> Result<Self>
    where
        F: Fn(T) -> AlgebraVector<T> + Send + Sync + 'static,
    {
        if !(interval.0 < interval.1) {
            return Err(Error::InvalidArgument(format!(
                "empty path interval [{}, {}]",
                interval.0, interval.1
            )));
        }
        Ok(SmoothPath {
            value: Arc::new(value),
            derivative: None,
            interval,
            stencil: Stencil::richardson(T::lit(PATH_STEP)),
        })
    }

    pub fn with_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(T) -> AlgebraVector<T> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    /// Finite-difference scheme used when no analytic derivative is set.
    pub fn with_stencil(mut self, stencil: Stencil<T>) -> Self {
        self.stencil = stencil;
        self
    }

    /// Drop the analytic derivative, forcing finite differences.
    pub fn numerical(mut self) -> Self {
        self.derivative = None;
        self
    }

    /// `t ↦ t·x` on `[0, 1]`.
    pub fn straight_line(x: AlgebraVector<T>) -> Self {
        Self::polynomial(vec![AlgebraVector::zeros(x.dim()), x], (T::zero(), T::one())).expect("unit interval")
    }

    pub fn constant(x: AlgebraVector<T>) -> Self {
        Self::polynomial(vec![x], (T::zero(), T::one())).expect("unit interval")
    }

    /// `t ↦ Σ_k t^k c_k`, with its analytic derivative.
    pub fn polynomial(coeffs: Vec<AlgebraVector<T>>, interval: (T, T)) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::InvalidArgument("polynomial path needs a coefficient".into()));
        };
        let dim = first.dim();
        if let Some(bad) = coeffs.iter().find(|c| c.dim() != dim) {
            return Err(Error::dims(dim, bad.dim()));
        }
        let coeffs = Arc::new(coeffs);
        let c2 = Arc::clone(&coeffs);
        let path = Self::new(
            move |t| {
                let mut acc = AlgebraVector::zeros(dim);
                for c in coeffs.iter().rev() {
                    acc = acc.scale(t) + c.clone();
                }
                acc
            },
            interval,
        )?;
        Ok(path.with_derivative(move |t| {
            let mut acc = AlgebraVector::zeros(dim);
            for (k, c) in c2.iter().enumerate().skip(1).rev() {
                acc = acc.scale(t) + c.scale(T::from_usize_lossy(k));
            }
            acc
        }))
    }

    /// `γ ∘ φ` for a map `φ` of the new interval into this one.
    pub fn reparametrized<F, D>(&self, phi: F, dphi: D, interval: (T, T)) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
        D: Fn(T) -> T + Send + Sync + 'static,
    {
        let inner = self.clone();
        let phi = Arc::new(phi);
        let p2 = Arc::clone(&phi);
        let path = Self::new(move |t| inner.value(phi(t)), interval)?;
        let inner = self.clone();
        Ok(path.with_derivative(move |t| {
            let s = p2(t);
            inner.derivative(s).map(|d| d.scale(dphi(t))).unwrap_or_else(|_| nan_vector(inner.value(s).dim()))
        }))
    }

    pub fn interval(&self) -> (T, T) {
        self.interval
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn contains(&self, t: T) -> bool {
        t >= self.interval.0 && t <= self.interval.1
    }

    pub fn value(&self, t: T) -> AlgebraVector<T> {
        (self.value)(t)
    }

    /// `γ'(t)`: analytic if supplied, otherwise by finite differences.
    pub fn derivative(&self, t: T) -> Result<AlgebraVector<T>> {
        self.in_interval(t)?;
        match &self.derivative {
            Some(d) => Ok(d(t)),
            None => self.numerical_derivative(t, self.stencil),
        }
    }

    pub fn numerical_derivative(&self, t: T, stencil: Stencil<T>) -> Result<AlgebraVector<T>> {
        let d = diff::derivative(|s| Ok(self.value(s).into_inner()), t, stencil, self.interval)?;
        Ok(AlgebraVector::from_dvector(d.value))
    }

    /// Largest mismatch between the analytic derivative and finite
    /// differences on `points` uniform probe points; zero without one.
    pub fn derivative_mismatch(&self, points: usize) -> Result<T> {
        if self.derivative.is_none() {
            return Ok(T::zero());
        }
        let (lo, hi) = self.interval;
        let mut worst = T::zero();
        for i in 0..points.max(2) {
            let t = lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(points.max(2) - 1);
            let fd = self.numerical_derivative(t, self.stencil)?;
            worst = worst.max(fd.distance(&self.derivative(t)?));
        }
        Ok(worst)
    }

    fn in_interval(&self, t: T) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "t = {t} outside [{}, {}]",
                self.interval.0, self.interval.1
            )))
        }
    }
}

fn nan_vector<T: Real>(dim: usize) -> AlgebraVector<T> {
    AlgebraVector::from_vec(vec![T::lit(f64::NAN); dim])
}

/// `∫₀¹ e^{s ad x} v ds` by quadrature.
pub fn integrated_exp_ad<T: Real>(
    alg: &LieAlgebra<T>,
    x: &AlgebraVector<T>,
    v: &AlgebraVector<T>,
    q: &QuadratureRule<T>,
) -> Result<AlgebraVector<T>> {
    alg.check_member(v)?;
    let mut acc = alg.zero();
    for (s, w) in q.iter() {
        acc += &alg.exp_ad(&x.scale(s))?.apply(v).scale(w);
    }
    Ok(acc)
}

/// `δ(γ)_t` by the integral formula.
pub fn log_derivative<T: Real>(
    alg: &LieAlgebra<T>,
    p: &SmoothPath<T>,
    t: T,
    q: &QuadratureRule<T>,
) -> Result<AlgebraVector<T>> {
    let dp = p.derivative(t)?;
    integrated_exp_ad(alg, &p.value(t), &dp, q)
}

/// `δ(γ)_t = Dρ_{γ(t)}(0)^{-1} γ'(t)`.
pub fn log_derivative_by_definition<T: Real>(
    alg: &LieAlgebra<T>,
    p: &SmoothPath<T>,
    t: T,
    cfg: &BchConfig<T>,
) -> Result<AlgebraVector<T>> {
    let dp = p.derivative(t)?;
    alg.check_member(&dp)?;
    let d = bch_differential_at_zero_right(alg, &p.value(t), cfg)?;
    let v = crate::linalg::solve(d.matrix(), dp.coords())?;
    Ok(AlgebraVector::from_dvector(v))
}

/// The pointwise product path `t ↦ a(t) * b(t)`, always differentiated
/// numerically.
pub fn product_path<T: Real>(
    alg: &LieAlgebra<T>,
    a: &SmoothPath<T>,
    b: &SmoothPath<T>,
    cfg: &BchConfig<T>,
) -> Result<SmoothPath<T>> {
    let lo = a.interval.0.max(b.interval.0);
    let hi = a.interval.1.min(b.interval.1);
    let (a, b, alg, cfg) = (a.clone(), b.clone(), alg.clone(), *cfg);
    let dim = alg.dim();
    Ok(SmoothPath::new(
        move |t| {
            bch(&alg, &a.value(t), &b.value(t), &cfg)
                .map(|p| p.value)
                .unwrap_or_else(|_| nan_vector(dim))
        },
        (lo, hi),
    )?)
}

/// `‖δ(a*b)_t − δ(a)_t − e^{ad a(t)} δ(b)_t‖`.
pub fn product_rule_residual<T: Real>(
    alg: &LieAlgebra<T>,
    a: &SmoothPath<T>,
    b: &SmoothPath<T>,
    t: T,
    q: &QuadratureRule<T>,
    cfg: &BchConfig<T>,
) -> Result<T> {
    let ab = product_path(alg, a, b, cfg)?;
    let lhs = log_derivative(alg, &ab, t, q)?;
    let da = log_derivative(alg, a, t, q)?;
    let db = log_derivative(alg, b, t, q)?;
    let rhs = da + alg.exp_ad(&a.value(t))?.apply(&db);
    let r = lhs.distance(&rhs);
    if !r.is_finite() {
        return Err(Error::NumericFailure {
            message: "product path evaluation failed".into(),
            condition: f64::INFINITY,
        });
    }
    Ok(r)
}

/// `‖x − Σ_j e^{ad x_1(t)} ⋯ e^{ad x_{j−1}(t)} δ(x_j)_t‖` along a
/// factorized path of `(tx) * y`, with the path's default derivative step.
pub fn structural_identity_residual<T: Real>(path: &FactorizedPath<T>, t: T, q: &QuadratureRule<T>) -> Result<T> {
    structural_identity_residual_with(path, t, q, |j| component_derivative(path, t, j).map(|d| d.value))
}

/// As [`structural_identity_residual`] with the component derivatives from
/// an explicit stencil.
pub fn structural_identity_residual_at_step<T: Real>(
    path: &FactorizedPath<T>,
    t: T,
    q: &QuadratureRule<T>,
    stencil: Stencil<T>,
) -> Result<T> {
    structural_identity_residual_with(path, t, q, |j| path.component_derivative_with(t, j, stencil).map(|d| d.value))
}

fn structural_identity_residual_with<T: Real, D>(
    path: &FactorizedPath<T>,
    t: T,
    q: &QuadratureRule<T>,
    mut derivative: D,
) -> Result<T>
where
    D: FnMut(usize) -> Result<nalgebra::DVector<T>>,
{
    let alg = path.algebra();
    let comps = path.components(t)?;
    let mut sum = alg.zero();
    let mut prefix = crate::algebra::LinearMap::identity(alg.dim());
    for (j, xj) in comps.iter().enumerate() {
        let dxj = AlgebraVector::from_dvector(derivative(j)?);
        let delta = integrated_exp_ad(alg, xj, &dxj, q)?;
        sum += &prefix.apply(&delta);
        prefix = prefix.compose(&alg.exp_ad(xj)?);
    }
    Ok(path.direction().distance(&sum))
}
