//! Local group multiplication `x * y = log(e^x e^y)` through the Dynkin
//! series, truncated by order.
//!
//! The series is evaluated in its explicit commutator form
//!
//! ```text
//! x * y = Σ_m 1/m Σ_n (−1)^{n−1}/n Σ [x^{r1} y^{s1} … x^{rn} y^{sn}] / Π r_i! s_i!
//! ```
//!
//! with right-nested brackets. Since a right-nested bracket of a word is the
//! product of `ad` of all but its last letter applied to that letter, the sum
//! over words is regrouped block by block: every inner block `x^r y^s`
//! contributes the operator `ad_x^r ad_y^s / (r! s!)` and only the last block
//! acts on a vector. This keeps the cost polynomial in the order. The plain
//! word-by-word expansion is kept in [`words`] as a cross-check.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::{AlgebraVector, LieAlgebra, LinearMap};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

/// Largest truncation order accepted by [`BchConfig`].
pub const MAX_ORDER: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BchConfig<T> {
    /// Hard cap on the series order (≥ 1).
    pub max_order: usize,
    /// Stop once the ℓ² norms of two consecutive orders fall below this.
    pub term_tolerance: T,
    /// Radius of the ball modelling the convergence neighbourhood, per operand.
    pub domain_radius: T,
}

impl<T: Real> Default for BchConfig<T> {
    fn default() -> Self {
        BchConfig {
            max_order: 12,
            term_tolerance: T::lit(1e-14),
            domain_radius: T::lit(std::f64::consts::LN_2 / 2.0),
        }
    }
}

impl<T: Real> BchConfig<T> {
    pub fn with_max_order(mut self, order: usize) -> Self {
        self.max_order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_order == 0 || self.max_order > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "max_order must lie in 1..={MAX_ORDER}, got {}",
                self.max_order
            )));
        }
        if !(self.term_tolerance > T::zero()) || !(self.domain_radius > T::zero()) {
            return Err(Error::InvalidArgument("BCH tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Emitted when operands leave the ball where convergence is guaranteed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainWarning {
    pub norm_sum: f64,
    pub limit: f64,
}

/// Result of a truncated series evaluation with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct BchProduct<T: Real> {
    pub value: AlgebraVector<T>,
    /// Highest order included.
    pub order: usize,
    /// ℓ² norm of the last included order.
    pub last_term_norm: T,
    pub warning: Option<DomainWarning>,
}

fn inv_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut fact = BigInt::one();
        let mut out = vec![1.0];
        for r in 1..=MAX_ORDER {
            fact *= r;
            out.push(BigRational::new(BigInt::one(), fact.clone()).to_f64().unwrap());
        }
        out
    })
}

/// `(−1)^{n−1} / (n m)` as a correctly rounded float.
fn sign_weight(n: usize, m: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut out = vec![0.0; (MAX_ORDER + 1) * (MAX_ORDER + 1)];
        for a in 1..=MAX_ORDER {
            for b in 1..=MAX_ORDER {
                let num = if a % 2 == 1 { 1 } else { -1 };
                out[a * (MAX_ORDER + 1) + b] = BigRational::new(BigInt::from(num), BigInt::from(a * b))
                    .to_f64()
                    .unwrap();
            }
        }
        out
    });
    table[n * (MAX_ORDER + 1) + m]
}

fn check_inputs<T: Real>(alg: &LieAlgebra<T>, xs: &[&AlgebraVector<T>], cfg: &BchConfig<T>) -> Result<()> {
    cfg.validate()?;
    for x in xs {
        alg.check_member(x)?;
        if !x.is_finite() {
            return Err(Error::InvalidArgument("non-finite BCH operand".into()));
        }
    }
    Ok(())
}

/// Truncated Dynkin series for `x * y`.
///
/// Leaving the convergence ball `‖x‖ + ‖y‖ < 2·domain_radius` does not abort
/// the computation; it is reported through [`BchProduct::warning`].
pub fn bch<T: Real>(
    alg: &LieAlgebra<T>,
    x: &AlgebraVector<T>,
    y: &AlgebraVector<T>,
    cfg: &BchConfig<T>,
) -> Result<BchProduct<T>> {
    check_inputs(alg, &[x, y], cfg)?;
    let norm_sum = x.norm() + y.norm();
    let limit = cfg.domain_radius * T::lit(2.0);
    let warning = (norm_sum >= limit).then(|| DomainWarning {
        norm_sum: norm_sum.as_f64(),
        limit: limit.as_f64(),
    });
    let (value, order, last) = dynkin_blocks(alg, x.coords(), y.coords(), cfg);
    Ok(BchProduct {
        value: AlgebraVector::from_dvector(value),
        order,
        last_term_norm: last,
        warning,
    })
}

// Column-major n×n kernels on flat slices; the matrices here are tiny and
// allocation dominated the nalgebra versions.
fn mat_mul_acc<T: Real>(n: usize, c: T, a: &[T], b: &[T], out: &mut [T]) {
    for j in 0..n {
        for l in 0..n {
            let blj = b[l + j * n] * c;
            if blj == T::zero() {
                continue;
            }
            for i in 0..n {
                out[i + j * n] += a[i + l * n] * blj;
            }
        }
    }
}

fn mat_vec_acc<T: Real>(n: usize, c: T, a: &[T], v: &[T], out: &mut [T]) {
    for (l, &vl) in v.iter().enumerate() {
        let s = vl * c;
        if s == T::zero() {
            continue;
        }
        for i in 0..n {
            out[i] += a[i + l * n] * s;
        }
    }
}

fn dynkin_blocks<T: Real>(
    alg: &LieAlgebra<T>,
    x: &DVector<T>,
    y: &DVector<T>,
    cfg: &BchConfig<T>,
) -> (DVector<T>, usize, T) {
    let n = x.len();
    let nn = n * n;
    let ax = alg.adjoint_matrix(x);
    let ay = alg.adjoint_matrix(y);
    let (ax, ay) = (ax.as_slice(), ay.as_slice());
    let inv_fact = inv_factorials();
    let max = cfg.max_order;
    let stride = max + 1;

    let mut identity = vec![T::zero(); nn];
    for i in 0..n {
        identity[i * (n + 1)] = T::one();
    }
    // Raw powers ad_x^r, ad_y^s, flat and indexed by exponent.
    let mut pow_x = vec![T::zero(); stride * nn];
    let mut pow_y = vec![T::zero(); stride * nn];
    pow_x[..nn].copy_from_slice(&identity);
    pow_y[..nn].copy_from_slice(&identity);
    // inner[d] = Σ_{r+s=d} ad_x^r ad_y^s / (r! s!)
    let mut inner = vec![T::zero(); stride * nn];
    // w[k][d]: sum over words of degree d split into k blocks, last block applied.
    let mut w = vec![T::zero(); stride * stride * n];
    let widx = |k: usize, d: usize| (k * stride + d) * n;
    let mut sum = DVector::<T>::zeros(n);
    let mut term = vec![T::zero(); n];
    let mut last = T::zero();
    let xs = x.as_slice();
    let ys = y.as_slice();

    for d in 1..=max {
        let (done, rest) = pow_x.split_at_mut(d * nn);
        mat_mul_acc(n, T::one(), &done[(d - 1) * nn..], ax, &mut rest[..nn]);
        let (done, rest) = pow_y.split_at_mut(d * nn);
        mat_mul_acc(n, T::one(), &done[(d - 1) * nn..], ay, &mut rest[..nn]);
        {
            let p = &mut inner[d * nn..(d + 1) * nn];
            for r in 0..=d {
                let c = T::lit(inv_fact[r] * inv_fact[d - r]);
                mat_mul_acc(n, c, &pow_x[r * nn..(r + 1) * nn], &pow_y[(d - r) * nn..(d - r + 1) * nn], p);
            }
        }

        // Last block x^{d−1} y (or the single letter x when d = 1).
        {
            let at = widx(1, d);
            let q = &mut w[at..at + n];
            mat_vec_acc(n, T::lit(inv_fact[d - 1]), &pow_x[(d - 1) * nn..d * nn], ys, q);
            if d == 1 {
                for (qi, &xi) in q.iter_mut().zip(xs) {
                    *qi += xi;
                }
            }
        }
        for k in 2..=d {
            let mut acc = vec![T::zero(); n];
            for dp in (k - 1)..d {
                let src = widx(k - 1, dp);
                mat_vec_acc(n, T::one(), &inner[(d - dp) * nn..(d - dp + 1) * nn], &w[src..src + n], &mut acc);
            }
            let at = widx(k, d);
            w[at..at + n].copy_from_slice(&acc);
        }

        term.iter_mut().for_each(|t| *t = T::zero());
        for k in 1..=d {
            let c = T::lit(sign_weight(k, d));
            let at = widx(k, d);
            for (t, &v) in term.iter_mut().zip(&w[at..at + n]) {
                *t += v * c;
            }
        }
        let previous = last;
        last = term.iter().fold(T::zero(), |a, &v| a + v * v).sqrt();
        for (s, &t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
        // Single orders can vanish by symmetry (orthogonal so(3) pairs kill
        // order 4), so two consecutive small orders are required.
        if last < cfg.term_tolerance && (d == 1 || previous < cfg.term_tolerance) {
            return (sum, d, last);
        }
    }
    (sum, max, last)
}

/// Left fold `((x_1 * x_2) * x_3) * …`.
pub fn bch_multi<T: Real>(
    alg: &LieAlgebra<T>,
    xs: &[AlgebraVector<T>],
    cfg: &BchConfig<T>,
) -> Result<BchProduct<T>> {
    let Some((first, rest)) = xs.split_first() else {
        return Err(Error::InvalidArgument("bch_multi needs at least one operand".into()));
    };
    check_inputs(alg, &[first], cfg)?;
    let mut acc = BchProduct {
        value: first.clone(),
        order: 1,
        last_term_norm: T::zero(),
        warning: None,
    };
    for x in rest {
        let step = bch(alg, &acc.value, x, cfg)?;
        acc = BchProduct {
            value: step.value,
            order: acc.order.max(step.order),
            last_term_norm: step.last_term_norm,
            warning: acc.warning.or(step.warning),
        };
    }
    Ok(acc)
}

/// Coefficients `k_m` of the linear part of `(εy) * x` in `ε`:
/// `d/dε (εy) * x = Σ_m k_m (ad x)^{m−1} y`. Read off the Dynkin word
/// coefficients of `x^{m−1} y` and `x^{m−2} y x` with `y` the first operand.
pub fn right_differential_coefficients() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        use words::Letter::{X, Y};
        let mut out = Vec::with_capacity(MAX_ORDER + 1);
        out.push(0.0);
        for m in 1..=MAX_ORDER {
            // First operand is the letter X here, the base point is Y.
            let mut last_x = vec![Y; m - 1];
            last_x.push(X);
            let mut k = words::dynkin_word_coefficient(&last_x);
            if m >= 2 {
                let mut penult = vec![Y; m - 2];
                penult.push(X);
                penult.push(Y);
                k -= words::dynkin_word_coefficient(&penult);
            }
            out.push(k.to_f64().unwrap());
        }
        out
    })
}

/// Differential at 0 of right translation `y ↦ y * x`, i.e. the matrix of
/// `y ↦ d/dε|₀ (εy) * x`, truncated at `cfg.max_order`.
pub fn bch_differential_at_zero_right<T: Real>(
    alg: &LieAlgebra<T>,
    x: &AlgebraVector<T>,
    cfg: &BchConfig<T>,
) -> Result<LinearMap<T>> {
    check_inputs(alg, &[x], cfg)?;
    let dim = alg.dim();
    let ad = alg.adjoint_matrix(x.coords());
    let coeffs = right_differential_coefficients();
    let mut power = DMatrix::<T>::identity(dim, dim);
    let mut out = DMatrix::<T>::zeros(dim, dim);
    for &k in coeffs.iter().take(cfg.max_order + 1).skip(1) {
        out += &power * T::lit(k);
        power = &power * &ad;
    }
    let cond = linalg::cond2(&out);
    if !(cond.as_f64() < 1e12) {
        return Err(Error::NumericFailure {
            message: "right-translation differential is singular (outside the injectivity radius)".into(),
            condition: cond.as_f64(),
        });
    }
    LinearMap::from_matrix(out)
}

/// Word-by-word Dynkin expansion with exact rational coefficients.
///
/// Exponential in the order; intended for cross-checking the block
/// evaluation at low orders.
pub mod words {
    use super::*;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Letter {
        X,
        Y,
    }

    fn factorial(n: usize) -> BigInt {
        (1..=n).fold(BigInt::one(), |a, k| a * k)
    }

    /// Coefficient of the right-nested bracket of `word` in `x * y`:
    /// `1/m` times the coefficient of the word in `log(e^x e^y)`.
    pub fn dynkin_word_coefficient(word: &[Letter]) -> BigRational {
        let m = word.len();
        if m == 0 {
            return BigRational::zero();
        }
        // g[i][n]: Σ over splittings of word[..i] into n blocks x^r y^s of Π 1/(r! s!)
        let mut g = vec![vec![BigRational::zero(); m + 1]; m + 1];
        g[0][0] = BigRational::one();
        for end in 1..=m {
            for start in 0..end {
                let block = &word[start..end];
                // A block is x^r y^s: no x after a y.
                let r = block.iter().take_while(|&&l| l == Letter::X).count();
                if block[r..].contains(&Letter::X) {
                    continue;
                }
                let s = block.len() - r;
                let weight = BigRational::new(BigInt::one(), factorial(r) * factorial(s));
                for n in 0..=start {
                    if g[start][n].is_zero() {
                        continue;
                    }
                    let add = &g[start][n] * &weight;
                    g[end][n + 1] += add;
                }
            }
        }
        let mut total = BigRational::zero();
        for (n, gn) in g[m].iter().enumerate().skip(1) {
            let sign = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            total += gn * BigRational::new(sign, BigInt::from(n));
        }
        total / BigRational::from_integer(BigInt::from(m))
    }

    /// Right-nested bracket `[w_1, [w_2, … [w_{m−1}, w_m]]]`.
    pub fn nested_bracket<T: Real>(
        alg: &LieAlgebra<T>,
        word: &[Letter],
        x: &AlgebraVector<T>,
        y: &AlgebraVector<T>,
    ) -> Result<AlgebraVector<T>> {
        let pick = |l: Letter| if l == Letter::X { x } else { y };
        let (last, rest) = word
            .split_last()
            .ok_or_else(|| Error::InvalidArgument("empty word".into()))?;
        let mut acc = pick(*last).clone();
        for &l in rest.iter().rev() {
            acc = alg.bracket(pick(l), &acc)?;
        }
        Ok(acc)
    }

    /// All words of each length up to `order`, summed with their coefficients.
    pub fn bch_by_words<T: Real>(
        alg: &LieAlgebra<T>,
        x: &AlgebraVector<T>,
        y: &AlgebraVector<T>,
        order: usize,
    ) -> Result<AlgebraVector<T>> {
        if order > 16 {
            return Err(Error::InvalidArgument("word expansion is limited to order 16".into()));
        }
        let mut sum = alg.zero();
        for m in 1..=order {
            for bits in 0u32..(1 << m) {
                let word: Vec<Letter> = (0..m)
                    .map(|i| if bits >> (m - 1 - i) & 1 == 0 { Letter::X } else { Letter::Y })
                    .collect();
                let c = dynkin_word_coefficient(&word);
                if c.is_zero() {
                    continue;
                }
                let v = nested_bracket(alg, &word, x, y)?;
                sum += &v.scale(T::lit(c.to_f64().unwrap()));
            }
        }
        Ok(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::words::{bch_by_words, dynkin_word_coefficient, Letter};
    use super::*;
    use crate::algebra::StructureConstant;
    use crate::oracle::{bch_reference, product_log_reference, MatrixRealization};

    fn so3() -> LieAlgebra<f64> {
        let c = |i, j, k| StructureConstant { i, j, k, value: 1.0 };
        LieAlgebra::new("so3", vec!["e1".into(), "e2".into(), "e3".into()], &[c(0, 1, 2), c(1, 2, 0), c(2, 0, 1)])
            .unwrap()
    }

    fn so3_matrices() -> MatrixRealization<f64> {
        let gens = (0..3)
            .map(|k| {
                let mut m = DMatrix::zeros(3, 3);
                let (a, b) = ((k + 1) % 3, (k + 2) % 3);
                m[(b, a)] = 1.0;
                m[(a, b)] = -1.0;
                m
            })
            .collect();
        MatrixRealization::new(gens).unwrap()
    }

    fn heisenberg() -> LieAlgebra<f64> {
        LieAlgebra::new(
            "h3",
            vec!["p".into(), "q".into(), "z".into()],
            &[StructureConstant { i: 0, j: 1, k: 2, value: 1.0 }],
        )
        .unwrap()
    }

    fn v(xs: &[f64]) -> AlgebraVector<f64> {
        AlgebraVector::from_slice(xs)
    }

    #[test]
    fn low_order_word_coefficients() {
        use Letter::{X, Y};
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(dynkin_word_coefficient(&[X]), r(1, 1));
        assert_eq!(dynkin_word_coefficient(&[X, Y]), r(1, 4));
        assert_eq!(dynkin_word_coefficient(&[Y, X]), r(-1, 4));
        // Order 3: x*y ∋ [x,[x,y]]/12 − [y,[x,y]]/12; the bracket sum over
        // words XXY, XYX, YXY, YYX must reproduce those coefficients.
        let c = |w: &[Letter]| dynkin_word_coefficient(w);
        let xxy = c(&[X, X, Y]) - c(&[X, Y, X]);
        let yxy = c(&[Y, X, Y]) - c(&[Y, Y, X]);
        assert_eq!(xxy, r(1, 12));
        assert_eq!(yxy, r(-1, 12));
    }

    #[test]
    fn block_evaluation_matches_word_expansion() {
        let g = so3();
        let x = v(&[0.3, -0.1, 0.2]);
        let y = v(&[-0.2, 0.25, 0.1]);
        for order in 1..=9 {
            let cfg = BchConfig::default().with_max_order(order);
            let cfg = BchConfig { term_tolerance: 0.0f64.max(1e-300), ..cfg };
            let fast = bch(&g, &x, &y, &cfg).unwrap().value;
            let slow = bch_by_words(&g, &x, &y, order).unwrap();
            assert!(fast.distance(&slow) < 1e-15, "order {order}");
        }
    }

    #[test]
    fn abelian_reduces_to_sum() {
        let g = LieAlgebra::<f64>::abelian("a", 4).unwrap();
        let x = v(&[1.0, 2.0, -3.0, 0.5]);
        let y = v(&[0.1, 0.2, 0.3, 0.4]);
        let p = bch(&g, &x, &y, &BchConfig::default()).unwrap();
        assert_eq!(p.value, x.clone() + y);
        assert!(p.warning.is_some());
    }

    #[test]
    fn heisenberg_is_exact() {
        let g = heisenberg();
        let (a, b) = (0.7, -0.4);
        let p = bch(&g, &v(&[a, 0.0, 0.0]), &v(&[0.0, b, 0.0]), &BchConfig::default()).unwrap();
        assert!(p.value.distance(&v(&[a, b, a * b / 2.0])) < 1e-15);
        assert_eq!(p.order, 4);
    }

    #[test]
    fn so3_pair_against_matrix_log() {
        let g = so3();
        let x = v(&[0.3, 0.0, 0.0]);
        let y = v(&[0.0, 0.2, 0.0]);
        let got = bch(&g, &x, &y, &BchConfig::default()).unwrap().value;
        let (want, off_span) = bch_reference(&so3_matrices(), &x, &y).unwrap();
        assert!(off_span < 1e-13);
        assert!(got.distance(&want) < 1e-10, "{}", got.distance(&want));
    }

    #[test]
    fn so3_triple_against_matrix_log() {
        let g = so3();
        let xs = [v(&[0.2, 0.0, 0.0]), v(&[0.0, 0.2, 0.0]), v(&[0.0, 0.0, 0.2])];
        let got = bch_multi(&g, &xs, &BchConfig::default()).unwrap().value;
        let (want, _) = product_log_reference(&so3_matrices(), &xs).unwrap();
        assert!(got.distance(&want) < 1e-9);
        let single = bch_multi(&g, &xs[..1], &BchConfig::default()).unwrap().value;
        assert_eq!(single, xs[0]);
        let padded = bch_multi(&g, &[xs[0].clone(), g.zero(), g.zero()], &BchConfig::default()).unwrap();
        assert_eq!(padded.value, xs[0]);
    }

    #[test]
    fn inverse_pair_cancels() {
        let g = so3();
        let x = v(&[0.31, -0.22, 0.17]);
        let p = bch(&g, &x, &-&x, &BchConfig::default()).unwrap();
        assert!(p.value.norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let g = so3();
        let nan = v(&[f64::NAN, 0.0, 0.0]);
        assert!(matches!(bch(&g, &nan, &g.zero(), &BchConfig::default()), Err(Error::InvalidArgument(_))));
        assert!(bch(&g, &v(&[1.0]), &g.zero(), &BchConfig::default()).is_err());
        let cfg = BchConfig::<f64>::default().with_max_order(0);
        assert!(bch(&g, &g.zero(), &g.zero(), &cfg).is_err());
        assert!(bch_multi(&g, &[], &BchConfig::default()).is_err());
    }

    fn bernoulli(n: usize) -> Vec<BigRational> {
        // B_0..B_n with B_1 = −1/2 via Σ_{k<m+1} C(m+1,k) B_k = 0.
        let mut b = vec![BigRational::one()];
        for m in 1..=n {
            let mut s = BigRational::zero();
            let mut binom = BigInt::one();
            for (k, bk) in b.iter().enumerate() {
                s += BigRational::from_integer(binom.clone()) * bk;
                binom = binom * (m + 1 - k) / (k + 1);
            }
            b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b
    }

    #[test]
    fn right_differential_series_is_bernoulli() {
        // d/dε (εy)*x = (ad x / (e^{ad x} − 1)) y = Σ B_k/k! (ad x)^k y
        let b = bernoulli(20);
        let coeffs = right_differential_coefficients();
        let mut fact = 1.0f64;
        for k in 0..20 {
            if k > 0 {
                fact *= k as f64;
            }
            let want = b[k].to_f64().unwrap() / fact;
            assert!((coeffs[k + 1] - want).abs() < 1e-18, "k = {k}");
        }
    }

    #[test]
    fn right_differential_fixes_base_point_and_matches_differences() {
        let g = so3();
        let cfg = BchConfig::default();
        assert_eq!(bch_differential_at_zero_right(&g, &g.zero(), &cfg).unwrap(), LinearMap::identity(3));
        let x = v(&[0.0, 0.0, 0.4]);
        let d = bch_differential_at_zero_right(&g, &x, &cfg).unwrap();
        assert!(d.apply(&x).distance(&x) < 1e-15);
        let y = v(&[0.3, -0.5, 0.2]);
        let f = |e: f64| bch(&g, &y.scale(e), &x, &cfg).unwrap().value;
        let mut errs = Vec::new();
        for h in [1e-2, 5e-3] {
            let fd = (f(h) - f(-h)).scale(1.0 / (2.0 * h));
            errs.push(fd.distance(&d.apply(&y)));
        }
        assert!(errs[0] < 1e-4);
        let ratio = errs[0] / errs[1];
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn single_precision_instantiation() {
        let g: LieAlgebra<f32> = so3().cast();
        let x = AlgebraVector::from_slice(&[0.3f32, 0.0, 0.0]);
        let y = AlgebraVector::from_slice(&[0.0f32, 0.2, 0.0]);
        let cfg = BchConfig::<f32> { term_tolerance: 1e-7, ..Default::default() };
        let p = bch(&g, &x, &y, &cfg).unwrap().value;
        // first orders: x + y + [x,y]/2 with [e1,e2] = e3
        assert!((p.coords()[2] - 0.03).abs() < 1e-3);
    }
}
