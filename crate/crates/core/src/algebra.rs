//! Structure-constant model of a finite-dimensional real Lie algebra.
//!
//! Elements are coordinate vectors in a fixed basis and the norm is the
//! ℓ² norm of those coordinates; induced operator norms are 2-norms.

use std::collections::HashSet;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::report::{CheckRecord, VerificationReport};
use crate::scalar::Real;

/// Per-coordinate tolerance for antisymmetry and the Jacobi identity.
pub const STRUCTURE_TOLERANCE: f64 = 1e-12;

/// Element of a Lie algebra, as coordinates in the algebra's basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraVector<T: Real>(DVector<T>);

impl<T: Real> AlgebraVector<T> {
    pub fn zeros(dim: usize) -> Self {
        AlgebraVector(DVector::zeros(dim))
    }

    /// The `i`-th basis element.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = T::one();
        AlgebraVector(v)
    }

    pub fn from_slice(coords: &[T]) -> Self {
        AlgebraVector(DVector::from_column_slice(coords))
    }

    pub fn from_vec(coords: Vec<T>) -> Self {
        AlgebraVector(DVector::from_vec(coords))
    }

    pub fn from_dvector(coords: DVector<T>) -> Self {
        AlgebraVector(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &DVector<T> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<T> {
        self.0
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.0.iter().copied().collect()
    }

    pub fn norm(&self) -> T {
        self.0.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, s: T) -> Self {
        AlgebraVector(&self.0 * s)
    }

    pub fn distance(&self, other: &Self) -> T {
        (&self.0 - &other.0).norm()
    }
}

impl<T: Real> Add for AlgebraVector<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        AlgebraVector(self.0 + rhs.0)
    }
}

impl<'a, T: Real> Add<&'a AlgebraVector<T>> for &'a AlgebraVector<T> {
    type Output = AlgebraVector<T>;
    fn add(self, rhs: Self) -> AlgebraVector<T> {
        AlgebraVector(&self.0 + &rhs.0)
    }
}

impl<T: Real> AddAssign<&AlgebraVector<T>> for AlgebraVector<T> {
    fn add_assign(&mut self, rhs: &AlgebraVector<T>) {
        self.0 += &rhs.0;
    }
}

impl<T: Real> Sub for AlgebraVector<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        AlgebraVector(self.0 - rhs.0)
    }
}

impl<'a, T: Real> Sub<&'a AlgebraVector<T>> for &'a AlgebraVector<T> {
    type Output = AlgebraVector<T>;
    fn sub(self, rhs: Self) -> AlgebraVector<T> {
        AlgebraVector(&self.0 - &rhs.0)
    }
}

impl<T: Real> Neg for AlgebraVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        AlgebraVector(-self.0)
    }
}

impl<T: Real> Neg for &AlgebraVector<T> {
    type Output = AlgebraVector<T>;
    fn neg(self) -> AlgebraVector<T> {
        AlgebraVector(-&self.0)
    }
}

impl<T: Real> Mul<T> for AlgebraVector<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        AlgebraVector(self.0 * s)
    }
}

impl<T: Real> Mul<T> for &AlgebraVector<T> {
    type Output = AlgebraVector<T>;
    fn mul(self, s: T) -> AlgebraVector<T> {
        AlgebraVector(&self.0 * s)
    }
}

/// Linear endomorphism of the algebra (ad x, e^{ad x}, chart differentials).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap<T: Real>(DMatrix<T>);

impl<T: Real> LinearMap<T> {
    pub fn identity(dim: usize) -> Self {
        LinearMap(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        LinearMap(DMatrix::zeros(dim, dim))
    }

    pub fn from_matrix(m: DMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidArgument(format!(
                "linear map must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(LinearMap(m))
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

    pub fn apply(&self, x: &AlgebraVector<T>) -> AlgebraVector<T> {
        AlgebraVector(&self.0 * x.coords())
    }

    pub fn compose(&self, other: &LinearMap<T>) -> LinearMap<T> {
        LinearMap(&self.0 * &other.0)
    }

    pub fn trace(&self) -> T {
        self.0.trace()
    }

    pub fn norm2(&self) -> T {
        linalg::norm2(&self.0)
    }

    pub fn inverse(&self) -> Result<LinearMap<T>> {
        linalg::inverse(&self.0).map(LinearMap)
    }
}

/// Coordinate `k` of the bracket `[e_i, e_j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureConstant<T> {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: T,
}

/// Finite-dimensional real Lie algebra given by structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra<T: Real> {
    name: String,
    basis: Vec<String>,
    // table[(i * dim + j) * dim + k] = coordinate k of [e_i, e_j]
    table: Vec<T>,
}

impl<T: Real> LieAlgebra<T> {
    /// Build and validate; fails if antisymmetry or Jacobi is violated.
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        constants: &[StructureConstant<T>],
    ) -> Result<Self> {
        let alg = Self::new_unvalidated(name, basis, constants)?;
        let report = alg.validate();
        if !report.all_pass() {
            let why: Vec<String> = report
                .failures()
                .map(|r| {
                    format!(
                        "{}: residual {:e}{}",
                        r.check_name,
                        r.residual,
                        r.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
                    )
                })
                .collect();
            return Err(Error::InvalidAlgebra(format!("{}: {}", alg.name, why.join("; "))));
        }
        Ok(alg)
    }

    /// Build without checking the Lie axioms. Entries `(i, j, k, v)` set
    /// coordinate `k` of `[e_i, e_j]`; the mirror `[e_j, e_i]` is filled with
    /// `-v` unless it is given explicitly.
    pub fn new_unvalidated(
        name: impl Into<String>,
        basis: Vec<String>,
        constants: &[StructureConstant<T>],
    ) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("algebra dimension must be positive".into()));
        }
        let mut table = vec![T::zero(); dim * dim * dim];
        let mut explicit = HashSet::new();
        for c in constants {
            if c.i >= dim || c.j >= dim || c.k >= dim {
                return Err(Error::InvalidArgument(format!(
                    "structure constant index ({}, {}, {}) out of range for dim {dim}",
                    c.i, c.j, c.k
                )));
            }
            if !c.value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite structure constant at ({}, {}, {})",
                    c.i, c.j, c.k
                )));
            }
            explicit.insert((c.i, c.j, c.k));
        }
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for c in constants {
            table[idx(c.i, c.j, c.k)] += c.value;
            if c.i != c.j && !explicit.contains(&(c.j, c.i, c.k)) {
                table[idx(c.j, c.i, c.k)] -= c.value;
            }
        }
        Ok(LieAlgebra {
            name: name.into(),
            basis,
            table,
        })
    }

    /// Abelian algebra of the given dimension with basis `e0, e1, ...`.
    pub fn abelian(name: impl Into<String>, dim: usize) -> Result<Self> {
        let basis = (0..dim).map(|i| format!("e{i}")).collect();
        Self::new(name, basis, &[])
    }

    /// Structure constants read off from a linearly independent family of
    /// matrices closed under commutators.
    pub fn from_matrix_basis(
        name: impl Into<String>,
        basis: Vec<String>,
        matrices: &[DMatrix<T>],
    ) -> Result<Self> {
        let dim = matrices.len();
        if dim != basis.len() {
            return Err(Error::dims(basis.len(), dim));
        }
        let realization = crate::oracle::MatrixRealization::new(matrices.to_vec())?;
        let mut constants = Vec::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let comm = linalg::commutator(&matrices[i], &matrices[j]);
                let (coords, resid) = realization.pull_back(&comm);
                if resid.as_f64() > 1e-10 {
                    return Err(Error::InvalidAlgebra(format!(
                        "commutator of basis matrices {i} and {j} leaves their span (residual {:e})",
                        resid.as_f64()
                    )));
                }
                for (k, &v) in coords.coords().iter().enumerate() {
                    // Commutators of integer matrices round to exact constants.
                    let r = v.round();
                    let v = if (v - r).abs() < T::lit(1e-12) { r } else { v };
                    if v != T::zero() {
                        constants.push(StructureConstant { i, j, k, value: v });
                    }
                }
            }
        }
        Self::new(name, basis, &constants)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == name)
    }

    /// Coordinate `k` of `[e_i, e_j]`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> T {
        let d = self.dim();
        self.table[(i * d + j) * d + k]
    }

    /// Nonzero constants with `i < j`, ordered by `(i, j, k)`.
    pub fn structure_constants(&self) -> Vec<StructureConstant<T>> {
        let d = self.dim();
        let mut out = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                for k in 0..d {
                    let value = self.constant(i, j, k);
                    if value != T::zero() {
                        out.push(StructureConstant { i, j, k, value });
                    }
                }
            }
        }
        out
    }

    pub fn zero(&self) -> AlgebraVector<T> {
        AlgebraVector::zeros(self.dim())
    }

    pub fn basis_vector(&self, i: usize) -> AlgebraVector<T> {
        AlgebraVector::basis(self.dim(), i)
    }

    /// Linear combination `Σ coeffs[i] e_i`.
    pub fn element(&self, coeffs: &[T]) -> Result<AlgebraVector<T>> {
        if coeffs.len() != self.dim() {
            return Err(Error::dims(self.dim(), coeffs.len()));
        }
        Ok(AlgebraVector::from_slice(coeffs))
    }

    pub fn check_member(&self, x: &AlgebraVector<T>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::dims(self.dim(), x.dim()));
        }
        Ok(())
    }

    pub fn bracket(&self, x: &AlgebraVector<T>, y: &AlgebraVector<T>) -> Result<AlgebraVector<T>> {
        self.check_member(x)?;
        self.check_member(y)?;
        let d = self.dim();
        let mut out = DVector::zeros(d);
        for i in 0..d {
            let xi = x.coords()[i];
            if xi == T::zero() {
                continue;
            }
            for j in 0..d {
                let s = xi * y.coords()[j];
                if s == T::zero() {
                    continue;
                }
                let base = (i * d + j) * d;
                for k in 0..d {
                    out[k] += s * self.table[base + k];
                }
            }
        }
        Ok(AlgebraVector(out))
    }

    /// Matrix of `ad x = [x, ·]`; column `j` is `[x, e_j]`.
    pub fn adjoint(&self, x: &AlgebraVector<T>) -> Result<LinearMap<T>> {
        self.check_member(x)?;
        Ok(LinearMap(self.adjoint_matrix(x.coords())))
    }

    pub(crate) fn adjoint_matrix(&self, x: &DVector<T>) -> DMatrix<T> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            let xi = x[i];
            if xi == T::zero() {
                continue;
            }
            for j in 0..d {
                let base = (i * d + j) * d;
                for k in 0..d {
                    m[(k, j)] += xi * self.table[base + k];
                }
            }
        }
        m
    }

    /// `e^{ad x}`, by scaling and squaring.
    pub fn exp_ad(&self, x: &AlgebraVector<T>) -> Result<LinearMap<T>> {
        self.check_member(x)?;
        Ok(LinearMap(linalg::expm(&self.adjoint_matrix(x.coords()))))
    }

    /// Antisymmetry and Jacobi residuals, per coordinate, against
    /// [`STRUCTURE_TOLERANCE`]. Never fails; violations are located in the
    /// record detail.
    pub fn validate(&self) -> VerificationReport {
        let d = self.dim();
        let tol = STRUCTURE_TOLERANCE;
        let mut report = VerificationReport::new(format!("algebra {}", self.name));

        let mut worst = (0.0f64, None);
        for i in 0..d {
            for j in i..d {
                for k in 0..d {
                    let r = (self.constant(i, j, k) + self.constant(j, i, k)).abs().as_f64();
                    if r > worst.0 || (r.is_nan() && worst.1.is_none()) {
                        worst = (r, Some((i, j, k)));
                    }
                }
            }
        }
        let mut rec = CheckRecord::new("algebra.antisymmetry", worst.0, tol).with_samples(d * d * d);
        if let (false, Some((i, j, k))) = (rec.pass, worst.1) {
            rec = rec.with_detail(format!(
                "[{0},{1}] + [{1},{0}] has coordinate {2} = {3:e}",
                self.basis[i], self.basis[j], self.basis[k], worst.0
            ));
        }
        report.push(rec);

        let mut worst = (0.0f64, None);
        let mut triples = 0;
        for i in 0..d {
            for j in (i + 1)..d {
                for k in (j + 1)..d {
                    triples += 1;
                    for l in 0..d {
                        let mut s = T::zero();
                        for m in 0..d {
                            s += self.constant(j, k, m) * self.constant(i, m, l)
                                + self.constant(k, i, m) * self.constant(j, m, l)
                                + self.constant(i, j, m) * self.constant(k, m, l);
                        }
                        let r = s.abs().as_f64();
                        if r > worst.0 {
                            worst = (r, Some((i, j, k, l)));
                        }
                    }
                }
            }
        }
        let mut rec = CheckRecord::new("algebra.jacobi", worst.0, tol).with_samples(triples);
        if let (false, Some((i, j, k, l))) = (rec.pass, worst.1) {
            rec = rec.with_detail(format!(
                "Jacobi violated for triple ({}, {}, {}) = ({i}, {j}, {k}), coordinate {} off by {:e}",
                self.basis[i], self.basis[j], self.basis[k], self.basis[l], worst.0
            ));
        }
        report.push(rec);
        report
    }

    /// Convert every constant to another scalar type.
    pub fn cast<U: Real>(&self) -> LieAlgebra<U> {
        LieAlgebra {
            name: self.name.clone(),
            basis: self.basis.clone(),
            table: self.table.iter().map(|&v| U::lit(v.as_f64())).collect(),
        }
    }
}

/// Ordered direct-sum decomposition `g = a_1 ⊕ … ⊕ a_n`.
#[derive(Debug, Clone)]
pub struct Decomposition<T: Real> {
    name: String,
    blocks: Vec<DMatrix<T>>,
    offsets: Vec<usize>,
    basis: DMatrix<T>,
    inverse: DMatrix<T>,
    projectors: Vec<DMatrix<T>>,
    condition: T,
}

/// Tolerance on the partition-of-identity and mutual-annihilation checks.
pub const PROJECTOR_TOLERANCE: f64 = 1e-10;

impl<T: Real> Decomposition<T> {
    /// `blocks[j]` holds the spanning columns of `a_j` (shape `dim × dim a_j`).
    pub fn new(name: impl Into<String>, blocks: Vec<DMatrix<T>>) -> Result<Self> {
        let name = name.into();
        let Some(first) = blocks.first() else {
            return Err(Error::Precondition(format!("decomposition {name} has no blocks")));
        };
        let dim = first.nrows();
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut total = 0;
        for (j, b) in blocks.iter().enumerate() {
            if b.nrows() != dim {
                return Err(Error::dims(dim, b.nrows()));
            }
            if b.ncols() == 0 {
                return Err(Error::Precondition(format!("block {j} of {name} is empty")));
            }
            offsets.push(total);
            total += b.ncols();
        }
        offsets.push(total);
        if total != dim {
            return Err(Error::Precondition(format!(
                "blocks of {name} have {total} columns in total, algebra dimension is {dim}"
            )));
        }
        let mut basis = DMatrix::zeros(dim, dim);
        for (j, b) in blocks.iter().enumerate() {
            basis.columns_mut(offsets[j], b.ncols()).copy_from(b);
        }
        let condition = linalg::cond2(&basis);
        if !(condition.as_f64() < 1e12) {
            return Err(Error::Precondition(format!(
                "blocks of {name} do not form a direct sum (condition number {:e})",
                condition.as_f64()
            )));
        }
        let inverse = linalg::inverse(&basis)?;
        let projectors = blocks
            .iter()
            .enumerate()
            .map(|(j, b)| b * inverse.rows(offsets[j], b.ncols()))
            .collect();
        let dec = Decomposition {
            name,
            blocks,
            offsets,
            basis,
            inverse,
            projectors,
            condition,
        };
        let report = dec.validate();
        if !report.all_pass() {
            return Err(Error::Precondition(format!(
                "projectors of {} fail validation: {:?}",
                dec.name,
                report.failures().map(|r| r.check_name.clone()).collect::<Vec<_>>()
            )));
        }
        Ok(dec)
    }

    /// Single block spanning the whole algebra.
    pub fn trivial(dim: usize) -> Self {
        Self::new("trivial", vec![DMatrix::identity(dim, dim)]).expect("identity is a valid basis")
    }

    /// Blocks spanned by subsets of the standard basis.
    pub fn from_basis_indices(name: impl Into<String>, dim: usize, groups: &[&[usize]]) -> Result<Self> {
        let blocks = groups
            .iter()
            .map(|g| {
                let mut b = DMatrix::zeros(dim, g.len());
                for (c, &i) in g.iter().enumerate() {
                    if i >= dim {
                        return Err(Error::InvalidArgument(format!("basis index {i} out of range")));
                    }
                    b[(i, c)] = T::one();
                }
                Ok(b)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, blocks)
    }

    /// Same subspaces in a different order; `order[k]` is the old index of new block `k`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_blocks()];
        for &o in order {
            if o >= seen.len() || std::mem::replace(&mut seen[o], true) {
                return Err(Error::InvalidArgument(format!("{order:?} is not a permutation")));
            }
        }
        if order.len() != seen.len() {
            return Err(Error::InvalidArgument(format!("{order:?} is not a permutation")));
        }
        let tag: Vec<String> = order.iter().map(|o| o.to_string()).collect();
        Self::new(
            format!("{}[{}]", self.name, tag.join(",")),
            order.iter().map(|&o| self.blocks[o].clone()).collect(),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, j: usize) -> &DMatrix<T> {
        &self.blocks[j]
    }

    pub fn blocks(&self) -> &[DMatrix<T>] {
        &self.blocks
    }

    pub fn block_dim(&self, j: usize) -> usize {
        self.blocks[j].ncols()
    }

    pub fn block_offset(&self, j: usize) -> usize {
        self.offsets[j]
    }

    pub fn projector(&self, j: usize) -> &DMatrix<T> {
        &self.projectors[j]
    }

    /// 2-norm condition number of the concatenated block basis.
    pub fn condition_number(&self) -> T {
        self.condition
    }

    /// Coordinates of `x` in the concatenated block basis.
    pub fn block_coords(&self, x: &AlgebraVector<T>) -> Result<DVector<T>> {
        if x.dim() != self.dim() {
            return Err(Error::dims(self.dim(), x.dim()));
        }
        Ok(&self.inverse * x.coords())
    }

    /// Components `x_j = B_j c_j` from concatenated block coordinates.
    pub fn components_from_coords(&self, coords: &DVector<T>) -> Vec<AlgebraVector<T>> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(j, b)| AlgebraVector(b * coords.rows(self.offsets[j], b.ncols())))
            .collect()
    }

    /// Components of `x` along each block; they sum to `x`.
    pub fn project(&self, x: &AlgebraVector<T>) -> Result<Vec<AlgebraVector<T>>> {
        if x.dim() != self.dim() {
            return Err(Error::dims(self.dim(), x.dim()));
        }
        Ok(self
            .projectors
            .iter()
            .map(|p| AlgebraVector(p * x.coords()))
            .collect())
    }

    /// Distance of `x` from the span of block `j`.
    pub fn block_residual(&self, j: usize, x: &AlgebraVector<T>) -> T {
        (x.coords() - &self.projectors[j] * x.coords()).norm()
    }

    pub fn validate(&self) -> VerificationReport {
        let dim = self.dim();
        let mut report = VerificationReport::new(format!("decomposition {}", self.name));
        let mut sum = DMatrix::<T>::zeros(dim, dim);
        for p in &self.projectors {
            sum += p;
        }
        let partition = (sum - DMatrix::identity(dim, dim)).amax().as_f64();
        report.push(CheckRecord::new("decomposition.partition_of_identity", partition, PROJECTOR_TOLERANCE));
        let mut cross = 0.0f64;
        for (j, pj) in self.projectors.iter().enumerate() {
            for (k, pk) in self.projectors.iter().enumerate() {
                if j != k {
                    cross = cross.max((pj * pk).amax().as_f64());
                }
            }
        }
        report.push(CheckRecord::new("decomposition.mutual_annihilation", cross, PROJECTOR_TOLERANCE));
        report.witnesses.insert("condition_number".into(), self.condition.as_f64());
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn so3() -> LieAlgebra<f64> {
        let c = |i, j, k| StructureConstant { i, j, k, value: 1.0 };
        LieAlgebra::new(
            "so3",
            vec!["e1".into(), "e2".into(), "e3".into()],
            &[c(0, 1, 2), c(1, 2, 0), c(2, 0, 1)],
        )
        .unwrap()
    }

    fn v(xs: &[f64]) -> AlgebraVector<f64> {
        AlgebraVector::from_slice(xs)
    }

    #[test]
    fn mirror_entries_filled() {
        let g = so3();
        assert_eq!(g.constant(1, 0, 2), -1.0);
        assert_eq!(g.constant(0, 2, 1), -1.0);
        assert_eq!(g.structure_constants().len(), 3);
    }

    #[test]
    fn so3_brackets_against_rotation_generators() {
        // L_k (v) = e_k × v as 3x3 matrices; [L_i, L_j] = ε_ijk L_k.
        let gens: Vec<DMatrix<f64>> = (0..3)
            .map(|k| {
                let mut m = DMatrix::zeros(3, 3);
                let (a, b) = ((k + 1) % 3, (k + 2) % 3);
                m[(b, a)] = 1.0;
                m[(a, b)] = -1.0;
                m
            })
            .collect();
        let g = so3();
        for i in 0..3 {
            for j in 0..3 {
                let comm = linalg::commutator(&gens[i], &gens[j]);
                let br = g.bracket(&g.basis_vector(i), &g.basis_vector(j)).unwrap();
                let mut from_matrices = DMatrix::zeros(3, 3);
                for k in 0..3 {
                    from_matrices += &gens[k] * br.coords()[k];
                }
                assert!((comm - from_matrices).amax() < 1e-15);
            }
        }
        assert_eq!(
            g.bracket(&g.basis_vector(0), &g.basis_vector(1)).unwrap(),
            g.basis_vector(2)
        );
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let g = so3();
        assert!(matches!(
            g.bracket(&v(&[1.0, 0.0]), &v(&[1.0, 0.0, 0.0])),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn adjoint_of_e3_is_plane_rotation() {
        let g = so3();
        let ad = g.adjoint(&g.basis_vector(2)).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(ad.matrix(), &want);
        assert_eq!(g.adjoint(&g.zero()).unwrap(), LinearMap::zeros(3));
    }

    #[test]
    fn exp_ad_inverse_pair() {
        let g = so3();
        let x = v(&[0.3, -1.2, 0.8]);
        let prod = g.exp_ad(&x).unwrap().compose(&g.exp_ad(&-&x).unwrap());
        assert!((prod.matrix() - DMatrix::identity(3, 3)).amax() < 1e-12);
        assert_eq!(g.exp_ad(&g.zero()).unwrap(), LinearMap::identity(3));
    }

    #[test]
    fn perturbed_constant_is_located() {
        let mut cs = so3().structure_constants();
        cs.push(StructureConstant { i: 0, j: 1, k: 0, value: 1e-6 });
        let g = LieAlgebra::new_unvalidated("bad", vec!["a".into(), "b".into(), "c".into()], &cs).unwrap();
        let rep = g.validate();
        let jac = rep.record("algebra.jacobi").unwrap();
        assert!(!jac.pass);
        assert!((jac.residual - 1e-6).abs() < 1e-12);
        assert!(jac.detail.as_ref().unwrap().contains("(a, b, c)"));
        assert!(LieAlgebra::new("bad", vec!["a".into(), "b".into(), "c".into()], &cs).is_err());
    }

    #[test]
    fn conflicting_explicit_entries_break_antisymmetry() {
        let cs = [
            StructureConstant { i: 0, j: 1, k: 1, value: 1.0 },
            StructureConstant { i: 1, j: 0, k: 1, value: 1.0 },
        ];
        let g = LieAlgebra::new_unvalidated("bad", vec!["a".into(), "b".into()], &cs).unwrap();
        let rep = g.validate();
        assert!(!rep.record("algebra.antisymmetry").unwrap().pass);
    }

    #[test]
    fn abelian_validates() {
        let g = LieAlgebra::<f64>::abelian("ab", 4).unwrap();
        assert!(g.validate().all_pass());
        assert_eq!(g.bracket(&v(&[1.0, 2.0, 3.0, 4.0]), &v(&[4.0, 3.0, 2.0, 1.0])).unwrap(), g.zero());
    }

    #[test]
    fn decomposition_projects() {
        let d = Decomposition::<f64>::from_basis_indices("d", 3, &[&[0], &[1, 2]]).unwrap();
        let parts = d.project(&v(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(parts[0], v(&[1.0, 0.0, 0.0]));
        assert_eq!(parts[1], v(&[0.0, 2.0, 3.0]));
        assert!((d.condition_number() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dependent_blocks_rejected() {
        let b = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
        assert!(matches!(
            Decomposition::<f64>::new("bad", vec![b.clone(), b]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn permutation_must_be_bijective() {
        let d = Decomposition::<f64>::from_basis_indices("d", 3, &[&[0], &[1], &[2]]).unwrap();
        assert!(d.permuted(&[0, 0, 1]).is_err());
        let p = d.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.block(0), d.block(2));
    }
}
