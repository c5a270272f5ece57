use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A loopless multigraph whose first `k` vertices carry labels `1..=k`.
///
/// Edge keys are `(from, to)` when directed and `(min, max)` when undirected;
/// stored multiplicities are always positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LabeledGraph {
    directed: bool,
    k: usize,
    n: usize,
    edges: BTreeMap<(usize, usize), u64>,
}

impl LabeledGraph {
    /// Builds a graph with labeled vertices `0..k`; repeated edges accumulate.
    pub fn new<I>(directed: bool, k: usize, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        if k > n {
            return Err(Error::InvalidGraph(format!(
                "{k} labels but only {n} vertices"
            )));
        }
        let mut g = LabeledGraph {
            directed,
            k,
            n,
            edges: BTreeMap::new(),
        };
        for (u, v, mult) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) out of range",
                    u + 1,
                    v + 1
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {}", u + 1)));
            }
            if mult == 0 {
                return Err(Error::InvalidGraph(
                    "edge multiplicity must be positive".into(),
                ));
            }
            *g.edges.entry(g.key(u, v)).or_insert(0) += mult;
        }
        Ok(g)
    }

    /// Builds a graph whose label `i + 1` sits on vertex `labels[i]`, renumbering
    /// so that labeled vertices come first and free vertices keep their order.
    pub fn with_labels<I>(directed: bool, n: usize, labels: &[usize], edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        let mut position = vec![usize::MAX; n];
        for (i, &v) in labels.iter().enumerate() {
            if v >= n {
                return Err(Error::InvalidGraph(format!(
                    "label {} on missing vertex {}",
                    i + 1,
                    v + 1
                )));
            }
            if position[v] != usize::MAX {
                return Err(Error::InvalidGraph(format!(
                    "vertex {} carries two labels",
                    v + 1
                )));
            }
            position[v] = i;
        }
        let mut next = labels.len();
        for p in position.iter_mut().filter(|p| **p == usize::MAX) {
            *p = next;
            next += 1;
        }
        let edges: Vec<_> = edges.into_iter().collect();
        for &(u, v, _) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) out of range",
                    u + 1,
                    v + 1
                )));
            }
        }
        LabeledGraph::new(
            directed,
            labels.len(),
            n,
            edges
                .into_iter()
                .map(|(u, v, m)| (position[u], position[v], m)),
        )
    }

    /// `U_k`: `k` labeled vertices and nothing else.
    pub fn unit(k: usize, directed: bool) -> Self {
        LabeledGraph {
            directed,
            k,
            n: k,
            edges: BTreeMap::new(),
        }
    }

    fn key(&self, u: usize, v: usize) -> (usize, usize) {
        if self.directed || u < v {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of labels.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn free_count(&self) -> usize {
        self.n - self.k
    }

    /// Edges as `(u, v, multiplicity)` in key order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.edges.iter().map(|(&(u, v), &m)| (u, v, m))
    }

    pub fn edge_count(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        self.edges.get(&self.key(u, v)).copied().unwrap_or(0)
    }

    /// The product in `PLG[k]`: disjoint union with same-label vertices identified.
    /// Free vertices of `self` come first, then those of `other`.
    pub fn glue(&self, other: &LabeledGraph) -> Result<LabeledGraph> {
        if self.k != other.k {
            return Err(Error::LabelCountMismatch(self.k, other.k));
        }
        if self.directed != other.directed {
            return Err(Error::DirectednessMismatch);
        }
        let shift = self.n - self.k;
        let map = |v: usize| if v < other.k { v } else { v + shift };
        let mut g = self.clone();
        g.n = self.n + other.n - other.k;
        for (u, v, m) in other.edges() {
            let key = g.key(map(u), map(v));
            *g.edges.entry(key).or_insert(0) += m;
        }
        Ok(g)
    }

    /// The `h`-fold product of `self` with itself; `U_k` when `h = 0`.
    pub fn power(&self, h: u64) -> Result<LabeledGraph> {
        let mut acc = LabeledGraph::unit(self.k, self.directed);
        for _ in 0..h {
            acc = acc.glue(self)?;
        }
        Ok(acc)
    }

    /// Membership in `PLG^simp[k]`.
    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|(&(u, v), &m)| {
            m == 1
                && !(u < self.k && v < self.k)
                && !(self.directed && self.edges.contains_key(&(v, u)))
        })
    }

    /// Forgets labels `keep+1..=k`; those vertices become free.
    pub fn unlabel(&self, keep: usize) -> Result<LabeledGraph> {
        if keep > self.k {
            return Err(Error::LabelCountMismatch(keep, self.k));
        }
        let mut g = self.clone();
        g.k = keep;
        Ok(g)
    }

    /// The same graph with label set `[k]` permuted: label `i` moves to `perm[i]`.
    pub fn relabel_labels(&self, perm: &[usize]) -> Result<LabeledGraph> {
        if perm.len() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                found: perm.len(),
            });
        }
        let map = |v: usize| if v < self.k { perm[v] } else { v };
        LabeledGraph::new(
            self.directed,
            self.k,
            self.n,
            self.edges().map(|(u, v, m)| (map(u), map(v), m)),
        )
    }

    /// A byte string equal for two graphs iff they are isomorphic by a
    /// bijection fixing every label.
    pub fn canonical_form(&self) -> Vec<u8> {
        super::canonical::canonical_form(self)
    }

    pub fn to_json(&self) -> LabeledGraphJson {
        LabeledGraphJson {
            directed: self.directed,
            k: self.k,
            n: self.n,
            labels: (1..=self.k).collect(),
            edges: self.edges().map(|(u, v, m)| (u + 1, v + 1, m)).collect(),
        }
    }

    pub fn from_json(json: &LabeledGraphJson) -> Result<Self> {
        if json.labels.len() != json.k {
            return Err(Error::InvalidGraph(format!(
                "k = {} but {} labels listed",
                json.k,
                json.labels.len()
            )));
        }
        let one_based = |v: usize| {
            v.checked_sub(1)
                .ok_or_else(|| Error::InvalidGraph("vertices are numbered from 1".into()))
        };
        let labels = json
            .labels
            .iter()
            .map(|&v| one_based(v))
            .collect::<Result<Vec<_>>>()?;
        let edges = json
            .edges
            .iter()
            .map(|&(u, v, m)| Ok((one_based(u)?, one_based(v)?, m)))
            .collect::<Result<Vec<_>>>()?;
        LabeledGraph::with_labels(json.directed, json.n, &labels, edges)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: LabeledGraphJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        LabeledGraph::from_json(&json)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("graph serialization is infallible")
    }
}

/// Wire format of a [`LabeledGraph`]; vertices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledGraphJson {
    pub directed: bool,
    pub k: usize,
    pub n: usize,
    pub labels: Vec<usize>,
    pub edges: Vec<(usize, usize, u64)>,
}

impl Serialize for LabeledGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}
