//! The local group representation `π(z) = e^{α(z_1)} ⋯ e^{α(z_n)}`.

use nalgebra::DVector;

use crate::algebra::{AlgebraVector, Decomposition};
use crate::bch::{bch, BchConfig};
use crate::diff::{self, Stencil};
use crate::error::{Error, Result};
use crate::factorization::{factorize, factorize_from, ChartPoint, NewtonConfig};
use crate::representation::{Operator, Representation};
use crate::scalar::Real;

/// Default Richardson step for the derivative checks.
pub const DERIVATIVE_STEP: f64 = 1e-4;

/// Radii probed when estimating the chart radius.
const PROBE_STEP: f64 = 0.05;
const PROBE_MAX: usize = 40;

#[derive(Debug, Clone)]
pub struct LocalRepresentation<T: Real> {
    rep: Representation<T>,
    dec: Decomposition<T>,
    bch_cfg: BchConfig<T>,
    newton: NewtonConfig<T>,
    stencil: Stencil<T>,
    chart_radius: T,
}

impl<T: Real> LocalRepresentation<T> {
    /// Requires a representation and decomposition that pass validation.
    pub fn new(
        rep: Representation<T>,
        dec: Decomposition<T>,
        bch_cfg: BchConfig<T>,
        newton: NewtonConfig<T>,
    ) -> Result<Self> {
        let report = rep.validate();
        if let Some(bad) = report.failures().next() {
            return Err(Error::InvalidRepresentation(format!(
                "{}: {} residual {:e}",
                rep.name(),
                bad.check_name,
                bad.residual
            )));
        }
        if let Some(bad) = dec.validate().failures().next() {
            return Err(Error::Precondition(format!("decomposition {}: {} failed", dec.name(), bad.check_name)));
        }
        Self::new_unchecked(rep, dec, bch_cfg, newton)
    }

    /// Skips validation of the representation, e.g. for negative controls.
    pub fn new_unchecked(
        rep: Representation<T>,
        dec: Decomposition<T>,
        bch_cfg: BchConfig<T>,
        newton: NewtonConfig<T>,
    ) -> Result<Self> {
        if dec.dim() != rep.algebra().dim() {
            return Err(Error::dims(rep.algebra().dim(), dec.dim()));
        }
        bch_cfg.validate()?;
        let mut lr = LocalRepresentation {
            rep,
            dec,
            bch_cfg,
            newton,
            stencil: Stencil::richardson(T::lit(DERIVATIVE_STEP)),
            chart_radius: T::zero(),
        };
        lr.chart_radius = lr.probe_chart_radius();
        Ok(lr)
    }

    pub fn with_stencil(mut self, stencil: Stencil<T>) -> Self {
        self.stencil = stencil;
        self
    }

    /// Largest probed radius `r` such that factorization succeeds at every
    /// `±r e_i` and every smaller probe radius.
    fn probe_chart_radius(&self) -> T {
        let alg = self.rep.algebra();
        let mut radius = T::zero();
        for k in 1..=PROBE_MAX {
            let r = T::lit(PROBE_STEP) * T::from_usize_lossy(k);
            let ok = (0..alg.dim()).all(|i| {
                [r, -r].iter().all(|&s| self.chart_point(&alg.basis_vector(i).scale(s)).is_ok())
            });
            if !ok {
                break;
            }
            radius = r;
        }
        radius
    }

    pub fn representation(&self) -> &Representation<T> {
        &self.rep
    }

    pub fn decomposition(&self) -> &Decomposition<T> {
        &self.dec
    }

    pub fn bch_config(&self) -> &BchConfig<T> {
        &self.bch_cfg
    }

    pub fn newton_config(&self) -> &NewtonConfig<T> {
        &self.newton
    }

    pub fn stencil(&self) -> Stencil<T> {
        self.stencil
    }

    /// Empirical chart radius along coordinate axes.
    pub fn chart_radius(&self) -> T {
        self.chart_radius
    }

    pub fn chart_point(&self, z: &AlgebraVector<T>) -> Result<ChartPoint<T>> {
        factorize(self.rep.algebra(), &self.dec, z, &self.bch_cfg, &self.newton)
    }

    /// `e^{α(z_1)} ⋯ e^{α(z_n)}` for a solved chart point.
    pub fn pi_at(&self, point: &ChartPoint<T>) -> Result<Operator<T>> {
        let mut out = Operator::identity(self.rep.dim_h());
        for c in &point.components {
            out = out.compose(&self.rep.exp_op(c)?);
        }
        Ok(out)
    }

    pub fn pi(&self, z: &AlgebraVector<T>) -> Result<Operator<T>> {
        self.pi_at(&self.chart_point(z)?)
    }

    fn product(&self, x: &AlgebraVector<T>, y: &AlgebraVector<T>) -> Result<AlgebraVector<T>> {
        Ok(bch(self.rep.algebra(), x, y, &self.bch_cfg)?.value)
    }

    /// `‖π(x * y) − π(x)π(y)‖₂`.
    pub fn multiplicativity_residual(&self, x: &AlgebraVector<T>, y: &AlgebraVector<T>) -> Result<T> {
        let lhs = self.pi(&self.product(x, y)?)?;
        let rhs = self.pi(x)?.compose(&self.pi(y)?);
        Ok(lhs.distance(&rhs))
    }

    fn check_vector(&self, v: &DVector<T>) -> Result<()> {
        if v.len() != self.rep.dim_h() {
            return Err(Error::dims(self.rep.dim_h(), v.len()));
        }
        Ok(())
    }

    /// `γ(t) = π((tx) * y) v`.
    pub fn orbit(&self, x: &AlgebraVector<T>, y: &AlgebraVector<T>, t: T, v: &DVector<T>) -> Result<DVector<T>> {
        Ok(self.pi_at(&self.orbit_point(x, y, t, None)?)?.apply(v))
    }

    /// Chart point of `(tx) * y`, optionally warm-started.
    fn orbit_point(
        &self,
        x: &AlgebraVector<T>,
        y: &AlgebraVector<T>,
        t: T,
        near: Option<&ChartPoint<T>>,
    ) -> Result<ChartPoint<T>> {
        let z = self.product(&x.scale(t), y)?;
        match near {
            None => self.chart_point(&z),
            Some(p) => factorize_from(self.rep.algebra(), &self.dec, &z, p, &self.bch_cfg, &self.newton),
        }
        .map_err(|e| e.at_t(t.as_f64()))
    }

    /// Largest `‖γ'(t) − α(x)γ(t)‖` over the grid, `γ'` by finite
    /// differences.
    pub fn ode_residual(&self, x: &AlgebraVector<T>, y: &AlgebraVector<T>, v: &DVector<T>, grid: &[T]) -> Result<T> {
        self.ode_residual_with(x, y, v, grid, self.stencil)
    }

    pub fn ode_residual_with(
        &self,
        x: &AlgebraVector<T>,
        y: &AlgebraVector<T>,
        v: &DVector<T>,
        grid: &[T],
        stencil: Stencil<T>,
    ) -> Result<T> {
        self.check_vector(v)?;
        let ax = self.rep.apply(x)?;
        let mut worst = T::zero();
        for &t in grid {
            let here = self.orbit_point(x, y, t, None)?;
            let d = diff::derivative(
                |s| Ok(self.pi_at(&self.orbit_point(x, y, s, Some(&here))?)?.apply(v)),
                t,
                stencil,
                (T::zero(), T::one()),
            )?;
            let r = (d.value - ax.apply(&self.pi_at(&here)?.apply(v))).norm();
            worst = worst.max(r);
        }
        Ok(worst)
    }

    /// Largest `‖π((tx) * y)v − e^{tα(x)}π(y)v‖` over the grid.
    pub fn uniqueness_check(&self, x: &AlgebraVector<T>, y: &AlgebraVector<T>, v: &DVector<T>, grid: &[T]) -> Result<T> {
        self.check_vector(v)?;
        let start = self.pi(y)?.apply(v);
        let mut worst = T::zero();
        for &t in grid {
            let flow = self.rep.exp_op(&x.scale(t))?.apply(&start);
            worst = worst.max((self.orbit(x, y, t, v)? - flow).norm());
        }
        Ok(worst)
    }

    /// `‖d/dt|₀ π(tx)v − α(x)v‖`.
    pub fn derived_rep_residual(&self, x: &AlgebraVector<T>, v: &DVector<T>) -> Result<T> {
        self.check_vector(v)?;
        let d = diff::derivative(
            |t| Ok(self.pi(&x.scale(t))?.apply(v)),
            T::zero(),
            self.stencil,
            (-T::one(), T::one()),
        )?;
        Ok((d.value - self.rep.apply(x)?.apply(v)).norm())
    }

    /// `‖π(z)ᵀπ(z) − I‖₂`; skew representations only.
    pub fn unitarity_residual(&self, z: &AlgebraVector<T>) -> Result<T> {
        if !self.rep.is_skew() {
            return Err(Error::Precondition(format!("{} is not skew-symmetric", self.rep.name())));
        }
        Ok(self.pi(z)?.orthogonality_defect())
    }

    /// `‖π(z) − π'(z)‖₂` where `π'` uses the blocks in the given order.
    pub fn order_independence_residual(&self, z: &AlgebraVector<T>, order: &[usize]) -> Result<T> {
        let other = LocalRepresentation {
            dec: self.dec.permuted(order)?,
            ..self.clone()
        };
        Ok(self.pi(z)?.distance(&other.pi(z)?))
    }

    /// `‖π(z₁) − π(z₂)‖ / ‖z₁ − z₂‖`.
    pub fn lipschitz_ratio(&self, z1: &AlgebraVector<T>, z2: &AlgebraVector<T>) -> Result<T> {
        let d = z1.distance(z2);
        if d == T::zero() {
            return Ok(T::zero());
        }
        Ok(self.pi(z1)?.distance(&self.pi(z2)?) / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{LieAlgebra, StructureConstant};
    use crate::representation::spin_irrep_real;

    fn so3() -> LieAlgebra<f64> {
        let c = |i, j, k| StructureConstant { i, j, k, value: 1.0 };
        LieAlgebra::new("so3", vec!["e1".into(), "e2".into(), "e3".into()], &[c(0, 1, 2), c(1, 2, 0), c(2, 0, 1)])
            .unwrap()
    }

    fn local(j: usize, dec: Decomposition<f64>) -> LocalRepresentation<f64> {
        let g = so3();
        let rep = Representation::new(format!("spin{j}"), &g, spin_irrep_real(j).unwrap(), true).unwrap();
        LocalRepresentation::new(rep, dec, BchConfig::default(), NewtonConfig::default()).unwrap()
    }

    fn euler() -> Decomposition<f64> {
        Decomposition::from_basis_indices("euler", 3, &[&[0], &[1], &[2]]).unwrap()
    }

    fn v(xs: &[f64]) -> AlgebraVector<f64> {
        AlgebraVector::from_slice(xs)
    }

    fn grid() -> Vec<f64> {
        (0..=20).map(|i| i as f64 / 20.0).collect()
    }

    #[test]
    fn pi_basics() {
        let lr = local(1, euler());
        assert!(lr.pi(&v(&[0.0; 3])).unwrap().distance(&Operator::identity(3)) == 0.0);
        let z = v(&[0.3, 0.0, 0.0]);
        assert!(lr.pi(&z).unwrap().distance(&lr.representation().exp_op(&z).unwrap()) < 1e-15);
        let trivial = local(1, Decomposition::trivial(3));
        let z = v(&[0.2, -0.1, 0.3]);
        assert!(trivial.pi(&z).unwrap().distance(&lr.representation().exp_op(&z).unwrap()) < 1e-15);
        assert!(lr.chart_radius() >= 0.3, "{}", lr.chart_radius());
    }

    #[test]
    fn multiplicativity_and_inverse() {
        let lr = local(2, euler());
        let (x, y) = (v(&[0.1, 0.0, 0.0]), v(&[0.0, 0.1, 0.0]));
        assert!(lr.multiplicativity_residual(&x, &y).unwrap() <= 1e-9);
        assert!(lr.multiplicativity_residual(&x, &v(&[0.0; 3])).unwrap() <= 1e-12);
        let z = v(&[0.1, -0.05, 0.08]);
        assert!(lr.multiplicativity_residual(&z, &-&z).unwrap() <= 1e-10);
        assert!(lr.unitarity_residual(&z).unwrap() <= 1e-10);
        assert!(lr.order_independence_residual(&z, &[2, 0, 1]).unwrap() <= 1e-8);
    }

    #[test]
    fn flow_checks() {
        let lr = local(1, euler());
        let (x, y) = (v(&[0.0, 0.2, 0.0]), v(&[0.0, 0.0, 0.1]));
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert!(lr.uniqueness_check(&x, &y, &e1, &grid()).unwrap() <= 1e-8);
        assert!(lr.ode_residual(&x, &y, &e1, &grid()).unwrap() <= 1e-6);
        assert_eq!(lr.ode_residual(&v(&[0.0; 3]), &y, &e1, &grid()).unwrap(), 0.0);
        assert!(lr.derived_rep_residual(&v(&[0.05, 0.06, -0.03]), &e1).unwrap() <= 1e-7);
    }

    #[test]
    fn chart_failure_is_reported_with_t() {
        let lr = local(1, euler());
        let err = lr.orbit(&v(&[3.0, 2.5, 0.0]), &v(&[0.0; 3]), 1.0, &DVector::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::ChartOutOfRange { t: Some(_), .. }), "{err}");
    }
}
