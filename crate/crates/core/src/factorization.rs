//! Chart factorization `z = x_1 * x_2 * … * x_n` with `x_j ∈ a_j`.
//!
//! The map `(x_1, …, x_n) ↦ x_1 * … * x_n` has the identity as differential
//! at the origin (under block concatenation), so the block projection of `z`
//! is a second-order accurate starting point for Newton's method.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{AlgebraVector, Decomposition, LieAlgebra};
use crate::bch::{bch, bch_multi, BchConfig};
use crate::diff::{self, Derivative, Stencil};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig<T> {
    pub max_iter: usize,
    /// Converged once `‖F‖` is at most this.
    pub residual_tolerance: T,
    /// ...or once a step is at most this and `‖F‖ ≤ accept_residual`.
    pub step_tolerance: T,
    pub accept_residual: T,
    /// Forward-difference step for the Jacobian.
    pub jacobian_step: T,
    pub max_halvings: usize,
    /// Iterates with a component of norm above this have left the chart.
    pub component_limit: T,
}

impl<T: Real> Default for NewtonConfig<T> {
    fn default() -> Self {
        NewtonConfig {
            max_iter: 50,
            residual_tolerance: T::lit(1e-12),
            step_tolerance: T::lit(1e-13),
            accept_residual: T::lit(1e-11),
            jacobian_step: T::lit(1e-7),
            max_halvings: 8,
            component_limit: T::lit(std::f64::consts::LN_2),
        }
    }
}

/// Solution of the chart equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint<T: Real> {
    /// `components[j]` lies in block `j`.
    pub components: Vec<AlgebraVector<T>>,
    /// Concatenated block coordinates of the components.
    pub coords: DVector<T>,
    /// `‖bch_multi(components) − target‖`.
    pub residual: T,
    pub iterations: usize,
}

impl<T: Real> ChartPoint<T> {
    /// Euclidean distance between concatenated block coordinates.
    pub fn distance(&self, other: &ChartPoint<T>) -> T {
        (&self.coords - &other.coords).norm()
    }
}

struct ChartProblem<'a, T: Real> {
    alg: &'a LieAlgebra<T>,
    dec: &'a Decomposition<T>,
    target: &'a AlgebraVector<T>,
    bch_cfg: &'a BchConfig<T>,
    cfg: &'a NewtonConfig<T>,
}

impl<T: Real> ChartProblem<'_, T> {
    fn in_range(&self, coords: &DVector<T>) -> bool {
        self.dec
            .components_from_coords(coords)
            .iter()
            .all(|c| c.norm() <= self.cfg.component_limit)
    }

    fn defect(&self, coords: &DVector<T>) -> Result<DVector<T>> {
        let comps = self.dec.components_from_coords(coords);
        let prod = bch_multi(self.alg, &comps, self.bch_cfg)?;
        Ok(prod.value.into_inner() - self.target.coords())
    }

    fn out_of_range(reason: impl Into<String>, residual: T, iterations: usize, coords: &DVector<T>) -> Error {
        Error::ChartOutOfRange {
            t: None,
            reason: reason.into(),
            residual: residual.as_f64(),
            iterations,
            last_iterate: coords.iter().map(|v| v.as_f64()).collect(),
        }
    }

    fn jacobian(&self, coords: &DVector<T>, f0: &DVector<T>) -> Result<DMatrix<T>> {
        let n = coords.len();
        let mut jac = DMatrix::zeros(n, n);
        for i in 0..n {
            let h = self.cfg.jacobian_step * T::one().max(coords[i].abs());
            let mut shifted = coords.clone();
            shifted[i] += h;
            let col = (self.defect(&shifted)? - f0) / h;
            jac.set_column(i, &col);
        }
        Ok(jac)
    }

    fn point(&self, coords: DVector<T>, residual: T, iterations: usize) -> ChartPoint<T> {
        ChartPoint {
            components: self.dec.components_from_coords(&coords),
            coords,
            residual,
            iterations,
        }
    }

    fn solve(&self, start: DVector<T>) -> Result<ChartPoint<T>> {
        let cfg = self.cfg;
        let mut coords = start;
        if !self.in_range(&coords) {
            return Err(Self::out_of_range("initial guess outside the chart", T::lit(f64::NAN), 0, &coords));
        }
        let mut f = self.defect(&coords)?;
        let mut r = f.norm();
        // The Jacobian is reused while the residual contracts fast (chord
        // steps) and rebuilt otherwise.
        let mut jac: Option<DMatrix<T>> = None;
        let mut contraction = T::one();
        for it in 0..cfg.max_iter {
            if r <= cfg.residual_tolerance {
                return Ok(self.point(coords, r, it));
            }
            let fresh = jac.is_none() || contraction > T::lit(0.1);
            if fresh {
                jac = Some(self.jacobian(&coords, &f)?);
            }
            let step = linalg::solve(jac.as_ref().expect("set above"), &(-&f))
                .map_err(|e| Self::out_of_range(format!("singular chart Jacobian: {e}"), r, it, &coords))?;
            let mut lambda = T::one();
            let mut accepted = None;
            for _ in 0..=cfg.max_halvings {
                let trial = &coords + &step * lambda;
                if self.in_range(&trial) {
                    let ft = self.defect(&trial)?;
                    let rt = ft.norm();
                    if rt < r {
                        accepted = Some((trial, ft, rt));
                        break;
                    }
                }
                lambda *= T::lit(0.5);
            }
            let Some((trial, ft, rt)) = accepted else {
                if !fresh {
                    contraction = T::one();
                    continue;
                }
                if r <= cfg.accept_residual {
                    return Ok(self.point(coords, r, it));
                }
                let reason = if self.in_range(&(&coords + &step)) {
                    "damped Newton step failed to reduce the residual"
                } else {
                    "Newton step leaves the chart"
                };
                return Err(Self::out_of_range(reason, r, it, &coords));
            };
            let moved = (&trial - &coords).norm();
            contraction = rt / r;
            coords = trial;
            f = ft;
            r = rt;
            if moved <= cfg.step_tolerance && r <= cfg.accept_residual {
                return Ok(self.point(coords, r, it + 1));
            }
        }
        if r <= cfg.residual_tolerance {
            return Ok(self.point(coords, r, cfg.max_iter));
        }
        Err(Self::out_of_range("Newton did not converge", r, cfg.max_iter, &coords))
    }
}

fn check<T: Real>(alg: &LieAlgebra<T>, dec: &Decomposition<T>, z: &AlgebraVector<T>) -> Result<()> {
    alg.check_member(z)?;
    if dec.dim() != alg.dim() {
        return Err(Error::dims(alg.dim(), dec.dim()));
    }
    if !z.is_finite() {
        return Err(Error::InvalidArgument("non-finite chart target".into()));
    }
    Ok(())
}

/// Solve `bch_multi(x_1, …, x_n) = z`, starting from the block projection of `z`.
pub fn factorize<T: Real>(
    alg: &LieAlgebra<T>,
    dec: &Decomposition<T>,
    z: &AlgebraVector<T>,
    bch_cfg: &BchConfig<T>,
    cfg: &NewtonConfig<T>,
) -> Result<ChartPoint<T>> {
    check(alg, dec, z)?;
    let start = dec.block_coords(z)?;
    ChartProblem { alg, dec, target: z, bch_cfg, cfg }.solve(start)
}

/// As [`factorize`], warm-started from a nearby solution.
pub fn factorize_from<T: Real>(
    alg: &LieAlgebra<T>,
    dec: &Decomposition<T>,
    z: &AlgebraVector<T>,
    near: &ChartPoint<T>,
    bch_cfg: &BchConfig<T>,
    cfg: &NewtonConfig<T>,
) -> Result<ChartPoint<T>> {
    check(alg, dec, z)?;
    if near.coords.len() != alg.dim() {
        return Err(Error::dims(alg.dim(), near.coords.len()));
    }
    ChartProblem { alg, dec, target: z, bch_cfg, cfg }.solve(near.coords.clone())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig<T> {
    /// Initial uniform grid size on `[0, 1]`.
    pub grid_points: usize,
    /// Consecutive stored samples may differ by at most this much.
    pub max_gap: T,
    /// Finite-difference step for component derivatives.
    pub derivative_step: T,
}

impl<T: Real> Default for PathConfig<T> {
    fn default() -> Self {
        PathConfig {
            grid_points: 21,
            max_gap: T::lit(0.05),
            derivative_step: T::lit(1e-5),
        }
    }
}

/// The factorization `(tx) * y = x_1(t) * … * x_n(t)` for `t ∈ [0, 1]`.
///
/// Construction solves on a grid with warm starts, refining until adjacent
/// samples are within `max_gap`. The stored grid is never mutated afterwards;
/// off-grid samples are solved on demand from the nearest grid point, so the
/// path can be shared across threads.
#[derive(Debug, Clone)]
pub struct FactorizedPath<T: Real> {
    alg: LieAlgebra<T>,
    dec: Decomposition<T>,
    x: AlgebraVector<T>,
    y: AlgebraVector<T>,
    bch_cfg: BchConfig<T>,
    newton: NewtonConfig<T>,
    cfg: PathConfig<T>,
    grid: Vec<(T, ChartPoint<T>)>,
}

const MAX_REFINEMENTS: usize = 12;

/// Build the factorized path of `t ↦ (tx) * y`.
pub fn factorize_path<T: Real>(
    alg: &LieAlgebra<T>,
    dec: &Decomposition<T>,
    x: &AlgebraVector<T>,
    y: &AlgebraVector<T>,
    bch_cfg: &BchConfig<T>,
    newton: &NewtonConfig<T>,
    cfg: &PathConfig<T>,
) -> Result<FactorizedPath<T>> {
    alg.check_member(x)?;
    alg.check_member(y)?;
    if cfg.grid_points < 2 {
        return Err(Error::InvalidArgument("path grid needs at least two points".into()));
    }
    let target = |t: T| bch(alg, &x.scale(t), y, bch_cfg).map(|p| p.value);
    let start = factorize(alg, dec, y, bch_cfg, newton).map_err(|e| e.at_t(0.0))?;
    let mut grid = vec![(T::zero(), start)];
    let n = cfg.grid_points - 1;
    for i in 1..=n {
        let t_next = T::from_usize_lossy(i) / T::from_usize_lossy(n);
        // Refine (t_prev, t_next] by bisection until the gap criterion holds.
        let mut pending = vec![t_next];
        let mut depth = 0;
        while let Some(t) = pending.pop() {
            let (t_prev, prev) = grid.last().cloned().unwrap();
            let pt = factorize_from(alg, dec, &target(t)?, &prev, bch_cfg, newton).map_err(|e| e.at_t(t.as_f64()))?;
            if pt.distance(&prev) > cfg.max_gap && depth < MAX_REFINEMENTS {
                depth += 1;
                pending.push(t);
                pending.push((t_prev + t) * T::lit(0.5));
                continue;
            }
            grid.push((t, pt));
        }
    }
    Ok(FactorizedPath {
        alg: alg.clone(),
        dec: dec.clone(),
        x: x.clone(),
        y: y.clone(),
        bch_cfg: *bch_cfg,
        newton: *newton,
        cfg: *cfg,
        grid,
    })
}

impl<T: Real> FactorizedPath<T> {
    pub fn interval(&self) -> (T, T) {
        (T::zero(), T::one())
    }

    pub fn decomposition(&self) -> &Decomposition<T> {
        &self.dec
    }

    pub fn algebra(&self) -> &LieAlgebra<T> {
        &self.alg
    }

    pub fn direction(&self) -> &AlgebraVector<T> {
        &self.x
    }

    pub fn base(&self) -> &AlgebraVector<T> {
        &self.y
    }

    pub fn derivative_step(&self) -> T {
        self.cfg.derivative_step
    }

    /// Stored grid samples `(t, point)` in increasing `t`.
    pub fn grid(&self) -> &[(T, ChartPoint<T>)] {
        &self.grid
    }

    /// `(tx) * y` itself.
    pub fn target(&self, t: T) -> Result<AlgebraVector<T>> {
        Ok(bch(&self.alg, &self.x.scale(t), &self.y, &self.bch_cfg)?.value)
    }

    /// Factorization of `(tx) * y`.
    pub fn sample(&self, t: T) -> Result<ChartPoint<T>> {
        let (lo, hi) = self.interval();
        if !(t >= lo && t <= hi) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
        }
        let nearest = self
            .grid
            .iter()
            .min_by(|a, b| {
                (a.0 - t)
                    .abs()
                    .partial_cmp(&(b.0 - t).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("grid is never empty");
        if nearest.0 == t {
            return Ok(nearest.1.clone());
        }
        factorize_from(&self.alg, &self.dec, &self.target(t)?, &nearest.1, &self.bch_cfg, &self.newton)
            .map_err(|e| e.at_t(t.as_f64()))
    }

    /// Components `x_j(t)` at `t`.
    pub fn components(&self, t: T) -> Result<Vec<AlgebraVector<T>>> {
        Ok(self.sample(t)?.components)
    }

    /// `x_j'(t)` by differences of the factorization, with the given stencil.
    pub fn component_derivative_with(&self, t: T, j: usize, stencil: Stencil<T>) -> Result<Derivative<T>> {
        if j >= self.dec.n_blocks() {
            return Err(Error::InvalidArgument(format!("block index {j} out of range")));
        }
        diff::derivative(
            |s| Ok(self.sample(s)?.components[j].clone().into_inner()),
            t,
            stencil,
            self.interval(),
        )
    }
}

/// `x_j'(t)`: Richardson-extrapolated central differences at the path's
/// derivative step and half of it (one-sided at the endpoints).
pub fn component_derivative<T: Real>(path: &FactorizedPath<T>, t: T, j: usize) -> Result<Derivative<T>> {
    path.component_derivative_with(t, j, Stencil::richardson(path.derivative_step()))
}
