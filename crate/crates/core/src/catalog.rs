//! Built-in fixtures. Every claimed property is re-validated on load.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{AlgebraVector, Decomposition, LieAlgebra, StructureConstant};
use crate::error::{Error, Result};
use crate::oracle::{self, MatrixRealization};
use crate::representation::{realify, spin_generators, spin_irrep_real, Representation};

/// Group-level splitting that independently computes the factorization
/// for one decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupOracle {
    /// `e^Z = K A N` by QR with positive `R` diagonal.
    Iwasawa,
    /// `e^Z = D N` for upper-triangular `Z`.
    DiagonalUnipotent,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub algebra: LieAlgebra<f64>,
    pub decompositions: Vec<Decomposition<f64>>,
    pub representations: Vec<Representation<f64>>,
    /// Faithful matrix realization for log/exp reference computations.
    pub realization: Option<MatrixRealization<f64>>,
    /// Decomposition name and the oracle that solves it at group level.
    pub group_oracle: Option<(String, GroupOracle)>,
    pub notes: String,
}

impl CatalogEntry {
    pub fn decomposition(&self, name: &str) -> Option<&Decomposition<f64>> {
        self.decompositions.iter().find(|d| d.name() == name)
    }

    pub fn representation(&self, name: &str) -> Option<&Representation<f64>> {
        self.representations.iter().find(|r| r.name() == name)
    }

    /// Components of the chart factorization of `z` computed at group level,
    /// if this entry has an oracle for `decomposition`. Also returns the
    /// largest distance of a logarithm from the realized span.
    pub fn oracle_components(&self, decomposition: &str, z: &AlgebraVector<f64>) -> Option<Result<(Vec<AlgebraVector<f64>>, f64)>> {
        let (dec_name, kind) = self.group_oracle.as_ref()?;
        if dec_name != decomposition {
            return None;
        }
        let real = self.realization.as_ref()?;
        Some((|| {
            let g = crate::linalg::expm(&real.push_forward(z));
            let factors: Vec<DMatrix<f64>> = match kind {
                GroupOracle::Iwasawa => oracle::iwasawa_split(&g)?.to_vec(),
                GroupOracle::DiagonalUnipotent => {
                    let (d, n) = oracle::diagonal_unipotent_split(&g)?;
                    vec![d, n]
                }
            };
            let logs = oracle::split_logs(real, &factors)?;
            let off_span = logs.iter().map(|(_, r)| *r).fold(0.0, f64::max);
            Ok((logs.into_iter().map(|(c, _)| c).collect(), off_span))
        })())
    }

    /// Re-validate algebra, decompositions and representations.
    pub fn validate(&self) -> Result<()> {
        let report = self.algebra.validate();
        if let Some(bad) = report.failures().next() {
            return Err(Error::InvalidAlgebra(format!("catalog entry {}: {} failed", self.name, bad.check_name)));
        }
        for d in &self.decompositions {
            if let Some(bad) = d.validate().failures().next() {
                return Err(Error::Precondition(format!(
                    "catalog entry {}: decomposition {}: {} failed",
                    self.name,
                    d.name(),
                    bad.check_name
                )));
            }
        }
        for r in &self.representations {
            if let Some(bad) = r.validate().failures().next() {
                return Err(Error::InvalidRepresentation(format!(
                    "catalog entry {}: representation {}: {} residual {:e}{}",
                    self.name,
                    r.name(),
                    bad.check_name,
                    bad.residual,
                    bad.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
                )));
            }
        }
        Ok(())
    }
}

fn names(ns: &[&str]) -> Vec<String> {
    ns.iter().map(|s| s.to_string()).collect()
}

fn mat(n: usize, entries: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i, j)] = v;
    }
    m
}

fn columns(dim: usize, cols: &[&[f64]]) -> DMatrix<f64> {
    DMatrix::from_columns(&cols.iter().map(|c| DVector::from_column_slice(&c[..dim])).collect::<Vec<_>>())
}

fn so3_algebra(name: &str, basis: &[&str]) -> Result<LieAlgebra<f64>> {
    let c = |i, j, k| StructureConstant { i, j, k, value: 1.0 };
    LieAlgebra::new(name, names(basis), &[c(0, 1, 2), c(1, 2, 0), c(2, 0, 1)])
}

/// `(L_k)_{ij} = −ε_{kij}`: rotation generators with `[L_i, L_j] = ε_ijk L_k`.
pub fn so3_defining() -> Vec<DMatrix<f64>> {
    (0..3)
        .map(|k| {
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            mat(3, &[(b, a, 1.0), (a, b, -1.0)])
        })
        .collect()
}

fn so3() -> Result<CatalogEntry> {
    let alg = so3_algebra("so3", &["e1", "e2", "e3"])?;
    let decompositions = vec![
        Decomposition::from_basis_indices("euler", 3, &[&[0], &[1], &[2]])?,
        Decomposition::from_basis_indices("axis-plane", 3, &[&[0], &[1, 2]])?,
    ];
    let representations = vec![
        Representation::new("defining", &alg, so3_defining(), true)?,
        Representation::new("spin2", &alg, spin_irrep_real(2)?, true)?,
    ];
    Ok(CatalogEntry {
        name: "so3".into(),
        algebra: alg,
        decompositions,
        representations,
        realization: Some(MatrixRealization::new(so3_defining())?),
        group_oracle: None,
        notes: "rotation algebra, [e_i, e_j] = ε_ijk e_k; spin-2 irrep realized over R via real spherical harmonics"
            .into(),
    })
}

fn su2_realified() -> Result<CatalogEntry> {
    let alg = so3_algebra("su2-realified", &["u1", "u2", "u3"])?;
    let half: Vec<DMatrix<f64>> = spin_generators(1).iter().map(realify).collect();
    Ok(CatalogEntry {
        name: "su2-realified".into(),
        decompositions: vec![
            Decomposition::from_basis_indices("u12-u3", 3, &[&[0, 1], &[2]])?,
            Decomposition::from_basis_indices("euler", 3, &[&[0], &[1], &[2]])?,
        ],
        representations: vec![Representation::new("spin-half-realified", &alg, half.clone(), true)?],
        realization: Some(MatrixRealization::new(half)?),
        algebra: alg,
        group_oracle: None,
        notes: "su(2) with u_k = −(i/2)σ_k realified to 4x4 real skew matrices".into(),
    })
}

fn heisenberg3() -> Result<CatalogEntry> {
    let alg = LieAlgebra::new(
        "heisenberg3",
        names(&["p", "q", "z"]),
        &[StructureConstant { i: 0, j: 1, k: 2, value: 1.0 }],
    )?;
    let upper = vec![mat(3, &[(0, 1, 1.0)]), mat(3, &[(1, 2, 1.0)]), mat(3, &[(0, 2, 1.0)])];
    let quotient = vec![
        mat(4, &[(1, 0, 1.0), (0, 1, -1.0)]),
        mat(4, &[(3, 2, 1.0), (2, 3, -1.0)]),
        mat(4, &[]),
    ];
    Ok(CatalogEntry {
        name: "heisenberg3".into(),
        decompositions: vec![Decomposition::from_basis_indices("p-qz", 3, &[&[0], &[1, 2]])?],
        representations: vec![
            Representation::new("upper-triangular", &alg, upper.clone(), false)?,
            Representation::new("skew-quotient", &alg, quotient, true)?,
        ],
        realization: Some(MatrixRealization::new(upper)?),
        algebra: alg,
        group_oracle: None,
        notes: "nilpotent, [p, q] = z; skew-quotient factors through the abelian quotient by the center".into(),
    })
}

fn sl2() -> Result<CatalogEntry> {
    let defining = vec![
        mat(2, &[(0, 1, 1.0)]),
        mat(2, &[(1, 0, 1.0)]),
        mat(2, &[(0, 0, 1.0), (1, 1, -1.0)]),
    ];
    let alg = LieAlgebra::from_matrix_basis("sl2", names(&["e", "f", "h"]), &defining)?;
    // K = span(e − f), A = span(h), N = span(e)
    let iwasawa = Decomposition::new(
        "iwasawa",
        vec![
            columns(3, &[&[1.0, -1.0, 0.0]]),
            columns(3, &[&[0.0, 0.0, 1.0]]),
            columns(3, &[&[1.0, 0.0, 0.0]]),
        ],
    )?;
    Ok(CatalogEntry {
        name: "sl2".into(),
        decompositions: vec![iwasawa],
        representations: vec![Representation::new("defining", &alg, defining.clone(), false)?],
        realization: Some(MatrixRealization::new(defining)?),
        algebra: alg,
        group_oracle: Some(("iwasawa".into(), GroupOracle::Iwasawa)),
        notes: "[h, e] = 2e, [h, f] = −2f, [e, f] = h; Iwasawa blocks so(2) ⊕ diagonal ⊕ upper nilpotent".into(),
    })
}

fn upper_triangular3() -> Result<CatalogEntry> {
    let unit = |i, j| mat(3, &[(i, j, 1.0)]);
    let defining = vec![unit(0, 0), unit(1, 1), unit(2, 2), unit(0, 1), unit(0, 2), unit(1, 2)];
    let alg = LieAlgebra::from_matrix_basis(
        "upper-triangular-3",
        names(&["E11", "E22", "E33", "E12", "E13", "E23"]),
        &defining,
    )?;
    Ok(CatalogEntry {
        name: "upper-triangular-3".into(),
        decompositions: vec![Decomposition::from_basis_indices("diag-strict", 6, &[&[0, 1, 2], &[3, 4, 5]])?],
        representations: vec![Representation::new("defining", &alg, defining.clone(), false)?],
        realization: Some(MatrixRealization::new(defining)?),
        algebra: alg,
        group_oracle: Some(("diag-strict".into(), GroupOracle::DiagonalUnipotent)),
        notes: "solvable; diagonal ⊕ strictly upper triangular".into(),
    })
}

fn abelian4() -> Result<CatalogEntry> {
    let alg = LieAlgebra::abelian("abelian-4", 4)?;
    let diagonal: Vec<DMatrix<f64>> = (0..4).map(|i| mat(4, &[(i, i, 1.0)])).collect();
    let j1 = [(1, 0, 1.0), (0, 1, -1.0)];
    let j2 = [(3, 2, 1.0), (2, 3, -1.0)];
    let rotations = vec![mat(4, &j1), mat(4, &j2), mat(4, &[j1, j2].concat()), mat(4, &[])];
    Ok(CatalogEntry {
        name: "abelian-4".into(),
        decompositions: vec![
            Decomposition::from_basis_indices("coordinates", 4, &[&[0], &[1], &[2], &[3]])?,
            Decomposition::from_basis_indices("pairs", 4, &[&[0, 1], &[2, 3]])?,
        ],
        representations: vec![
            Representation::new("diagonal", &alg, diagonal.clone(), false)?,
            Representation::new("rotations", &alg, rotations, true)?,
        ],
        realization: Some(MatrixRealization::new(diagonal)?),
        algebra: alg,
        group_oracle: None,
        notes: "degenerate control: every bracket vanishes".into(),
    })
}

/// Name of the deliberately invalid fixture.
pub const BROKEN_FIXTURE: &str = "so3-broken";

/// so(3) whose defining representation has one entry perturbed by `1e-3`.
/// Not part of [`load_catalog`]; it exists to show that checks fail.
pub fn broken_fixture() -> Result<CatalogEntry> {
    let alg = so3_algebra(BROKEN_FIXTURE, &["e1", "e2", "e3"])?;
    let mut ms = so3_defining();
    ms[0][(1, 2)] += 1e-3;
    Ok(CatalogEntry {
        name: BROKEN_FIXTURE.into(),
        decompositions: vec![Decomposition::from_basis_indices("euler", 3, &[&[0], &[1], &[2]])?],
        representations: vec![Representation::new_unchecked("perturbed", &alg, ms, false)?],
        realization: Some(MatrixRealization::new(so3_defining())?),
        algebra: alg,
        group_oracle: None,
        notes: "negative control: α(e1) entry (1, 2) shifted by 1e-3".into(),
    })
}

/// All valid fixtures, each re-validated.
pub fn load_catalog() -> Result<Vec<CatalogEntry>> {
    let entries = vec![so3()?, su2_realified()?, heisenberg3()?, sl2()?, upper_triangular3()?, abelian4()?];
    for e in &entries {
        e.validate()?;
    }
    Ok(entries)
}

/// Look up a fixture by name, including the broken one.
pub fn find_entry(name: &str) -> Result<CatalogEntry> {
    if name == BROKEN_FIXTURE {
        return broken_fixture();
    }
    load_catalog()?
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("no catalog entry named \"{name}\"")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bch::{bch, BchConfig};
    use crate::factorization::{factorize, NewtonConfig};

    #[test]
    fn catalog_loads() {
        let cat = load_catalog().unwrap();
        let names: Vec<_> = cat.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["so3", "su2-realified", "heisenberg3", "sl2", "upper-triangular-3", "abelian-4"]);
        for e in &cat {
            assert!(!e.representations.is_empty() && !e.decompositions.is_empty());
        }
    }

    #[test]
    fn sl2_constants() {
        let e = find_entry("sl2").unwrap();
        let g = &e.algebra;
        assert_eq!(g.constant(2, 0, 0), 2.0);
        assert_eq!(g.constant(2, 1, 1), -2.0);
        assert_eq!(g.constant(0, 1, 2), 1.0);
        let rep = e.representation("defining").unwrap();
        let r = rep.commutation_residual(&g.element(&[0.8, -0.5, 1.1]).unwrap(), &g.element(&[0.3, 1.2, -0.7]).unwrap());
        assert!(r.unwrap() <= 1e-9);
    }

    #[test]
    fn sl2_iwasawa_oracle_matches_newton() {
        let e = find_entry("sl2").unwrap();
        let dec = e.decomposition("iwasawa").unwrap();
        let z = e.algebra.element(&[0.08, -0.05, 0.1]).unwrap();
        let p = factorize(&e.algebra, dec, &z, &BchConfig::default(), &NewtonConfig::default()).unwrap();
        let (comps, off) = e.oracle_components("iwasawa", &z).unwrap().unwrap();
        assert!(off < 1e-12);
        for (a, b) in p.components.iter().zip(&comps) {
            assert!(a.distance(b) <= 1e-9, "{a:?} {b:?}");
        }
    }

    #[test]
    fn triangular_oracle_matches_newton() {
        let e = find_entry("upper-triangular-3").unwrap();
        let dec = e.decomposition("diag-strict").unwrap();
        let z = e.algebra.element(&[0.05, -0.03, 0.02, 0.07, -0.04, 0.06]).unwrap();
        let p = factorize(&e.algebra, dec, &z, &BchConfig::default(), &NewtonConfig::default()).unwrap();
        let (comps, _) = e.oracle_components("diag-strict", &z).unwrap().unwrap();
        for (a, b) in p.components.iter().zip(&comps) {
            assert!(a.distance(b) <= 1e-9);
        }
    }

    #[test]
    fn abelian_bch_is_addition() {
        let e = find_entry("abelian-4").unwrap();
        let x = e.algebra.element(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let y = e.algebra.element(&[-0.4, 0.1, 0.0, 0.2]).unwrap();
        assert_eq!(bch(&e.algebra, &x, &y, &BchConfig::default()).unwrap().value, &x + &y);
    }

    #[test]
    fn broken_fixture_is_invalid() {
        let e = broken_fixture().unwrap();
        assert!(e.validate().is_err());
        assert!(load_catalog().unwrap().iter().all(|c| c.name != BROKEN_FIXTURE));
    }
}
