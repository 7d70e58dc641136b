//! Finite-difference derivatives of vector-valued functions of one variable.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Difference step and whether to Richardson-extrapolate from `h` and `h/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil<T> {
    pub step: T,
    pub richardson: bool,
}

impl<T: Real> Stencil<T> {
    pub fn richardson(step: T) -> Self {
        Stencil { step, richardson: true }
    }

    pub fn central(step: T) -> Self {
        Stencil { step, richardson: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivative<T: Real> {
    pub value: DVector<T>,
    /// Distance between the reported value and the finer raw difference.
    pub error_estimate: T,
    pub step: T,
}

/// Second-order difference at step `h`; central when `[t − h, t + h]` fits
/// in `interval`, otherwise the one-sided three-point formula.
fn second_order<T, F>(f: &mut F, t: T, h: T, interval: (T, T)) -> Result<DVector<T>>
where
    T: Real,
    F: FnMut(T) -> Result<DVector<T>>,
{
    let (lo, hi) = interval;
    let two = T::lit(2.0);
    if t - h >= lo && t + h <= hi {
        Ok((f(t + h)? - f(t - h)?) / (two * h))
    } else if t + two * h <= hi {
        let f0 = f(t)?;
        Ok((f(t + h)? * T::lit(4.0) - f0 * T::lit(3.0) - f(t + two * h)?) / (two * h))
    } else if t - two * h >= lo {
        let f0 = f(t)?;
        Ok((f0 * T::lit(3.0) - f(t - h)? * T::lit(4.0) + f(t - two * h)?) / (two * h))
    } else {
        Err(Error::InvalidArgument(format!(
            "difference step {h} does not fit the interval [{lo}, {hi}]"
        )))
    }
}

/// Derivative of `f` at `t` restricted to `interval`.
pub fn derivative<T, F>(mut f: F, t: T, stencil: Stencil<T>, interval: (T, T)) -> Result<Derivative<T>>
where
    T: Real,
    F: FnMut(T) -> Result<DVector<T>>,
{
    if !(t >= interval.0 && t <= interval.1) {
        return Err(Error::InvalidArgument(format!(
            "t = {t} outside [{}, {}]",
            interval.0, interval.1
        )));
    }
    let h = stencil.step;
    let coarse = second_order(&mut f, t, h, interval)?;
    let fine = second_order(&mut f, t, h * T::lit(0.5), interval)?;
    if stencil.richardson {
        let value = (&fine * T::lit(4.0) - &coarse) / T::lit(3.0);
        let error_estimate = (&value - &fine).norm();
        Ok(Derivative { value, error_estimate, step: h })
    } else {
        let error_estimate = (&coarse - &fine).norm() / T::lit(3.0);
        Ok(Derivative { value: coarse, error_estimate, step: h })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trig(t: f64) -> Result<DVector<f64>> {
        Ok(DVector::from_vec(vec![t.sin(), (2.0 * t).exp()]))
    }

    fn exact(t: f64) -> DVector<f64> {
        DVector::from_vec(vec![t.cos(), 2.0 * (2.0 * t).exp()])
    }

    #[test]
    fn richardson_beats_central() {
        let t = 0.3;
        let c = derivative(trig, t, Stencil::central(1e-2), (0.0, 1.0)).unwrap();
        let r = derivative(trig, t, Stencil::richardson(1e-2), (0.0, 1.0)).unwrap();
        let ec = (&c.value - exact(t)).norm();
        let er = (&r.value - exact(t)).norm();
        assert!(ec > 1e-5 && er < 1e-8, "{ec} {er}");
    }

    #[test]
    fn central_error_is_quadratic() {
        let t = 0.4;
        let e = |h| (derivative(trig, t, Stencil::central(h), (0.0, 1.0)).unwrap().value - exact(t)).norm();
        let ratio = e(2e-2) / e(1e-2);
        assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn one_sided_at_endpoints() {
        for t in [0.0, 1.0] {
            let d = derivative(trig, t, Stencil::richardson(1e-3), (0.0, 1.0)).unwrap();
            let e = (&d.value - exact(t)).norm();
            assert!(e < 1e-7, "t = {t}: {e}");
        }
        assert!(derivative(trig, 1.5, Stencil::richardson(1e-3), (0.0, 1.0)).is_err());
    }
}
