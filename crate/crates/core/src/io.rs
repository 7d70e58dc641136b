//! JSON definition files for algebras and representations.
//!
//! Algebra file:
//! `{ "name"?, "dim", "basis": [..], "brackets": [[i, j, k, value], ..], "decomposition"?: [[column, ..], ..] }`
//! where each decomposition block is a list of column vectors of length
//! `dim`. Representation file:
//! `{ "name"?, "algebra", "dim_H", "matrices": [[row-major entries], ..], "skew" }`.
//!
//! Floats are written in shortest round-trip form, so export followed by
//! import reproduces every `f64` exactly.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{Decomposition, LieAlgebra, StructureConstant};
use crate::error::{Error, Result};
use crate::representation::Representation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub basis: Vec<String>,
    pub brackets: Vec<(usize, usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition_name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub algebra: String,
    #[serde(rename = "dim_H")]
    pub dim_h: usize,
    pub matrices: Vec<Vec<f64>>,
    pub skew: bool,
}

fn invalid(msg: String) -> Error {
    Error::InvalidArgument(msg)
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The algebra, without checking the Lie axioms (see
    /// [`LieAlgebra::validate`]), and its decomposition (trivial if absent).
    pub fn build(&self) -> Result<(LieAlgebra<f64>, Decomposition<f64>)> {
        if self.basis.len() != self.dim {
            return Err(invalid(format!("\"basis\" has {} names, \"dim\" is {}", self.basis.len(), self.dim)));
        }
        let mut constants = Vec::with_capacity(self.brackets.len());
        for (n, &(i, j, k, value)) in self.brackets.iter().enumerate() {
            if i >= self.dim || j >= self.dim || k >= self.dim {
                return Err(invalid(format!("brackets[{n}] = [{i}, {j}, {k}, {value}]: index out of range")));
            }
            if i == j && value != 0.0 {
                return Err(invalid(format!("brackets[{n}]: [e{i}, e{i}] must vanish")));
            }
            constants.push(StructureConstant { i, j, k, value });
        }
        let alg = LieAlgebra::new_unvalidated(self.name.clone().unwrap_or_else(|| "algebra".into()), self.basis.clone(), &constants)?;
        let dec = match &self.decomposition {
            None => Decomposition::trivial(self.dim),
            Some(blocks) => {
                let mut mats = Vec::with_capacity(blocks.len());
                for (b, cols) in blocks.iter().enumerate() {
                    if let Some((c, col)) = cols.iter().enumerate().find(|(_, col)| col.len() != self.dim) {
                        return Err(invalid(format!(
                            "decomposition[{b}][{c}] has length {}, expected {}",
                            col.len(),
                            self.dim
                        )));
                    }
                    let flat: Vec<f64> = cols.iter().flatten().copied().collect();
                    mats.push(DMatrix::from_column_slice(self.dim, cols.len(), &flat));
                }
                Decomposition::new(self.decomposition_name.clone().unwrap_or_else(|| "file".into()), mats)?
            }
        };
        Ok((alg, dec))
    }

    pub fn from_algebra(alg: &LieAlgebra<f64>, dec: Option<&Decomposition<f64>>) -> Self {
        AlgebraFile {
            name: Some(alg.name().to_string()),
            dim: alg.dim(),
            basis: alg.basis_names().to_vec(),
            brackets: alg.structure_constants().iter().map(|c| (c.i, c.j, c.k, c.value)).collect(),
            decomposition: dec.map(|d| {
                d.blocks()
                    .iter()
                    .map(|b| b.column_iter().map(|c| c.iter().copied().collect()).collect())
                    .collect()
            }),
            decomposition_name: dec.map(|d| d.name().to_string()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra files serialize")
    }
}

impl RepresentationFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The representation on `alg`, shape-checked but not validated.
    pub fn build(&self, alg: &LieAlgebra<f64>) -> Result<Representation<f64>> {
        if self.algebra != alg.name() {
            return Err(invalid(format!(
                "representation refers to algebra \"{}\", loaded algebra is \"{}\"",
                self.algebra,
                alg.name()
            )));
        }
        let n = self.dim_h;
        let mut mats = Vec::with_capacity(self.matrices.len());
        for (i, m) in self.matrices.iter().enumerate() {
            if m.len() != n * n {
                return Err(invalid(format!("matrices[{i}] has {} entries, expected {}", m.len(), n * n)));
            }
            mats.push(DMatrix::from_row_slice(n, n, m));
        }
        Representation::new_unchecked(self.name.clone().unwrap_or_else(|| "file".into()), alg, mats, self.skew)
    }

    pub fn from_representation(rep: &Representation<f64>) -> Self {
        RepresentationFile {
            name: Some(rep.name().to_string()),
            algebra: rep.algebra().name().to_string(),
            dim_h: rep.dim_h(),
            matrices: rep
                .matrices()
                .iter()
                .map(|m| m.transpose().as_slice().to_vec())
                .collect(),
            skew: rep.is_skew(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("representation files serialize")
    }
}
