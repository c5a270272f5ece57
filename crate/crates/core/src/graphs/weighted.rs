use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldValue};

/// A target graph `H`: nonzero vertex weights `alpha` and a total edge-weight
/// matrix `beta`, symmetric when undirected.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeightedGraph {
    spec: FieldSpec,
    directed: bool,
    alpha: Vec<FieldValue>,
    beta: Vec<Vec<FieldValue>>,
}

impl WeightedGraph {
    pub fn new(
        spec: FieldSpec,
        directed: bool,
        alpha: Vec<FieldValue>,
        beta: Vec<Vec<FieldValue>>,
    ) -> Result<Self> {
        let m = alpha.len();
        if beta.len() != m || beta.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidGraph(format!("beta must be {m}x{m}")));
        }
        for v in alpha.iter().chain(beta.iter().flatten()) {
            if v.spec() != spec {
                return Err(Error::SpecMismatch(spec.to_string(), v.spec().to_string()));
            }
        }
        if let Some(i) = alpha.iter().position(FieldValue::is_zero) {
            return Err(Error::InvalidGraph(format!(
                "vertex {} has weight zero",
                i + 1
            )));
        }
        if !directed {
            for i in 0..m {
                for j in 0..i {
                    if beta[i][j] != beta[j][i] {
                        return Err(Error::InvalidGraph(format!(
                            "undirected graph has asymmetric beta at ({}, {})",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(WeightedGraph {
            spec,
            directed,
            alpha,
            beta,
        })
    }

    /// Builds a graph from integer weights mapped into `spec`.
    pub fn from_ints(
        spec: FieldSpec,
        directed: bool,
        alpha: &[i64],
        beta: &[Vec<i64>],
    ) -> Result<Self> {
        let alpha = alpha.iter().map(|&a| spec.from_i64(a)).collect();
        let beta = beta
            .iter()
            .map(|row| row.iter().map(|&b| spec.from_i64(b)).collect())
            .collect();
        WeightedGraph::new(spec, directed, alpha, beta)
    }

    /// All vertex weights 1, weight 1 on the listed edges and 0 elsewhere.
    pub fn unweighted(
        spec: FieldSpec,
        directed: bool,
        m: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let mut beta = vec![vec![0i64; m]; m];
        for &(u, v) in edges {
            if u >= m || v >= m {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range")));
            }
            beta[u][v] = 1;
            if !directed {
                beta[v][u] = 1;
            }
        }
        WeightedGraph::from_ints(spec, directed, &vec![1; m], &beta)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of vertices `m`.
    pub fn order(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self, i: usize) -> &FieldValue {
        &self.alpha[i]
    }

    pub fn beta(&self, i: usize, j: usize) -> &FieldValue {
        &self.beta[i][j]
    }

    pub fn alphas(&self) -> &[FieldValue] {
        &self.alpha
    }

    pub fn beta_rows(&self) -> &[Vec<FieldValue>] {
        &self.beta
    }

    /// The image `P(H)` under the vertex renaming `i ↦ perm[i]`, so that `perm`
    /// is an isomorphism from `self` to the result.
    pub fn permuted(&self, perm: &[usize]) -> Result<WeightedGraph> {
        let m = self.order();
        let mut seen = vec![false; m];
        if perm.len() != m
            || perm
                .iter()
                .any(|&p| p >= m || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidSpec(
                "not a permutation of the vertex set".into(),
            ));
        }
        let mut alpha = vec![self.spec.zero(); m];
        let mut beta = vec![vec![self.spec.zero(); m]; m];
        for i in 0..m {
            alpha[perm[i]] = self.alpha[i].clone();
            for j in 0..m {
                beta[perm[i]][perm[j]] = self.beta[i][j].clone();
            }
        }
        Ok(WeightedGraph {
            spec: self.spec,
            directed: self.directed,
            alpha,
            beta,
        })
    }

    /// The subgraph induced on `keep`, in the given order.
    pub fn induced(&self, keep: &[usize]) -> WeightedGraph {
        WeightedGraph {
            spec: self.spec,
            directed: self.directed,
            alpha: keep.iter().map(|&i| self.alpha[i].clone()).collect(),
            beta: keep
                .iter()
                .map(|&i| keep.iter().map(|&j| self.beta[i][j].clone()).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> WeightedGraphJson {
        WeightedGraphJson {
            field: self.spec,
            directed: self.directed,
            alpha: self.alpha.iter().map(|v| v.to_string()).collect(),
            beta: self
                .beta
                .iter()
                .map(|row| row.iter().map(|v| v.to_string()).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &WeightedGraphJson) -> Result<Self> {
        let spec = json.field;
        let alpha = json
            .alpha
            .iter()
            .map(|s| spec.parse(s))
            .collect::<Result<_>>()?;
        let beta = json
            .beta
            .iter()
            .map(|row| row.iter().map(|s| spec.parse(s)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        WeightedGraph::new(spec, json.directed, alpha, beta)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: WeightedGraphJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        WeightedGraph::from_json(&json)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("graph serialization is infallible")
    }
}

/// Wire format of a [`WeightedGraph`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedGraphJson {
    pub field: FieldSpec,
    pub directed: bool,
    pub alpha: Vec<String>,
    pub beta: Vec<Vec<String>>,
}
