//! JSON file formats for graphs, weights and results.
//!
//! Complex scalars are `[re, im]` pairs and matrices are row-major nested
//! arrays. Parsing is strict: unknown fields are rejected.

use serde::{Deserialize, Serialize};

use crate::cstar::{Block, S0Algebra};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use crate::subspace::{NcGraph, OperatorSubspace};
use crate::theta::ThetaResult;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0_blocks: Option<Vec<Block>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_adjacency: Option<Vec<Vec<u8>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightFile {
    pub dim: usize,
    pub matrix: JsonMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualJson {
    pub t: Option<JsonMatrix>,
    pub rho: Option<JsonMatrix>,
}

/// Serialized form of a [`ThetaResult`]; field order is fixed.
#[derive(Debug, Clone, Serialize)]
pub struct ResultJson {
    pub value: f64,
    pub gap: f64,
    pub form: String,
    pub primal: Option<JsonMatrix>,
    pub dual: Option<DualJson>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn matrix_from_json(m: &JsonMatrix, dim: usize, what: &str) -> Result<CMat> {
    if m.len() != dim {
        return Err(Error::Parse(format!("{what}: expected {dim} rows, found {}", m.len())));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Parse(format!("{what}: row {i} has {} entries, expected {dim}", row.len())));
        }
        if let Some(j) = row.iter().position(|z| !z[0].is_finite() || !z[1].is_finite()) {
            return Err(Error::Parse(format!("{what}: entry ({i}, {j}) is not finite")));
        }
    }
    Ok(CMat::from_fn(dim, dim, |i, j| c(m[i][j][0], m[i][j][1])))
}

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "graph file")
    }

    /// Build and validate the graph. Without `s0_blocks` the algebra is
    /// `C I`, except for classical graphs where it is the diagonal algebra.
    pub fn to_graph(&self) -> Result<NcGraph> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Parse("graph file: dim must be positive".into()));
        }
        let s0 = self.s0_blocks.clone().map(S0Algebra::new).transpose()?;
        match (&self.basis, &self.classical_adjacency) {
            (Some(_), Some(_)) => Err(Error::Parse(
                "graph file: basis and classical_adjacency are mutually exclusive".into(),
            )),
            (None, None) => Err(Error::Parse("graph file: one of basis or classical_adjacency is required".into())),
            (Some(basis), None) => {
                let mats = basis
                    .iter()
                    .enumerate()
                    .map(|(k, m)| matrix_from_json(m, n, &format!("graph file: basis[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                let s0 = s0.unwrap_or_else(|| S0Algebra::scalars(n));
                NcGraph::new(OperatorSubspace::span(&mats, n)?, Some(s0))
            }
            (None, Some(adj)) => {
                if adj.len() != n {
                    return Err(Error::Parse(format!(
                        "graph file: classical_adjacency has {} rows, expected {n}",
                        adj.len()
                    )));
                }
                let mut rows = Vec::with_capacity(n);
                for (i, row) in adj.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::Parse(format!("graph file: classical_adjacency row {i} has wrong length")));
                    }
                    if row.iter().any(|&x| x > 1) {
                        return Err(Error::Parse(format!("graph file: classical_adjacency row {i} is not 0/1")));
                    }
                    rows.push(row.iter().map(|&x| x == 1).collect::<Vec<bool>>());
                }
                let g = NcGraph::from_classical_graph(&rows)?;
                match s0 {
                    Some(s0) => g.with_s0(Some(s0)),
                    None => Ok(g),
                }
            }
        }
    }

    /// The adjacency of a classical graph file, if it is one.
    pub fn adjacency(&self) -> Option<Vec<Vec<bool>>> {
        self.classical_adjacency
            .as_ref()
            .map(|a| a.iter().map(|r| r.iter().map(|&x| x == 1).collect()).collect())
    }
}

impl WeightFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "weight file")
    }

    pub fn matrix(&self) -> Result<CMat> {
        matrix_from_json(&self.matrix, self.dim, "weight file: matrix")
    }

    pub fn from_matrix(m: &CMat) -> Self {
        Self { dim: m.nrows(), matrix: matrix_to_json(m) }
    }
}

impl From<&ThetaResult> for ResultJson {
    fn from(r: &ThetaResult) -> Self {
        let dual = (r.dual_t.is_some() || r.dual_rho.is_some()).then(|| DualJson {
            t: r.dual_t.as_ref().map(matrix_to_json),
            rho: r.dual_rho.as_ref().map(matrix_to_json),
        });
        Self {
            value: r.value,
            gap: r.gap,
            form: r.form.name().to_string(),
            primal: r.primal.as_ref().map(matrix_to_json),
            dual,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields() {
        let err = GraphFile::parse(r#"{"dim": 2, "basis": [], "colour": 1}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn basis_and_adjacency_are_exclusive() {
        let g = GraphFile::parse(r#"{"dim": 1, "basis": [[[[1,0]]]], "classical_adjacency": [[0]]}"#).unwrap();
        assert!(g.to_graph().is_err());
    }

    #[test]
    fn weight_round_trip() {
        let m = CMat::from_fn(2, 2, |i, j| c(i as f64, j as f64));
        let f = WeightFile::from_matrix(&m);
        let back = WeightFile::parse(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back.matrix().unwrap(), m);
    }

    #[test]
    fn ragged_matrix_is_an_error() {
        let f = WeightFile::parse(r#"{"dim": 2, "matrix": [[[1,0],[0,0]],[[0,0]]]}"#).unwrap();
        assert!(f.matrix().unwrap_err().to_string().contains("row 1"));
    }
}
