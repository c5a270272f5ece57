//! Graphs `H_{n,ℓ_1,…,ℓ_n}` over `GF(p)` on which pinned hom values cannot
//! tell `u_1` from `u_2`, although no automorphism maps one to the other.
//!
//! Vertex layout: `U = {0,…,n−1}` first, then the blocks `V_1, …, V_n` of
//! sizes `ℓ_i·p` in order. Edges form a clique on `U` and a clique on each
//! `{u_i} ∪ V_i`; all weights are one. Every automorphism fixes `U`
//! pointwise, and a hom pinned into `U` equals the same hom in the clique on
//! `U` because maps leaving `U` come in orbits of size divisible by `p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Limits;
use crate::field::{is_prime, FieldSpec, FieldValue};
use crate::graphs::{simple_graphs_up_to, LabelMap, LabeledGraph, WeightedGraph};
use crate::hom::hom_partial_with;
use crate::isomorphism::{
    enumerate_automorphisms, enumerate_isomorphisms, find_pinned_isomorphism, same_type,
};
use crate::witness::{find_witness, WitnessOptions, WitnessSource};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub p: u64,
    pub n: usize,
    pub ells: Vec<u64>,
}

impl CounterexampleSpec {
    pub fn new(p: u64, n: usize, ells: Vec<u64>) -> Result<Self> {
        let spec = CounterexampleSpec { p, n, ells };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::InvalidSpec(format!("p = {} is not prime", self.p)));
        }
        if self.n < 2 {
            return Err(Error::InvalidSpec("n must be at least 2".into()));
        }
        if self.ells.len() != self.n {
            return Err(Error::InvalidSpec(format!(
                "{} block sizes given for n = {}",
                self.ells.len(),
                self.n
            )));
        }
        if self.ells.last() == Some(&0) || self.ells.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidSpec(
                "block sizes must be strictly decreasing and positive".into(),
            ));
        }
        Ok(())
    }

    /// `n + p·Σℓ_i`.
    pub fn vertex_count(&self) -> Result<usize> {
        let blocks = self
            .ells
            .iter()
            .try_fold(0u64, |acc, &l| {
                l.checked_mul(self.p).and_then(|b| acc.checked_add(b))
            })
            .and_then(|b| usize::try_from(b).ok())
            .and_then(|b| b.checked_add(self.n));
        blocks.ok_or_else(|| Error::InvalidSpec("graph too large".into()))
    }

    /// Vertex indices of `V_i` (0-based `i`).
    pub fn block(&self, i: usize) -> std::ops::Range<usize> {
        let start = self.n
            + self.ells[..i]
                .iter()
                .map(|&l| (l * self.p) as usize)
                .sum::<usize>();
        start..start + (self.ells[i] * self.p) as usize
    }

    /// The same `n` and `p` with `ℓ_1` raised by one; still strictly decreasing.
    pub fn shifted(&self) -> CounterexampleSpec {
        let mut ells = self.ells.clone();
        ells[0] += 1;
        CounterexampleSpec {
            p: self.p,
            n: self.n,
            ells,
        }
    }
}

/// `H_{n,ℓ_1,…,ℓ_n}` over `GF(p)`.
pub fn build_counterexample(spec: &CounterexampleSpec) -> Result<WeightedGraph> {
    build_counterexample_over(spec, FieldSpec::prime(spec.p)?)
}

/// The same graph with unit weights in an arbitrary field.
pub fn build_counterexample_over(
    spec: &CounterexampleSpec,
    field: FieldSpec,
) -> Result<WeightedGraph> {
    spec.validate()?;
    let total = spec.vertex_count()?;
    let mut edges = Vec::new();
    for a in 0..spec.n {
        for b in (a + 1)..spec.n {
            edges.push((a, b));
        }
    }
    for i in 0..spec.n {
        let clique: Vec<usize> = std::iter::once(i).chain(spec.block(i)).collect();
        for (x, &a) in clique.iter().enumerate() {
            for &b in &clique[x + 1..] {
                edges.push((a, b));
            }
        }
    }
    WeightedGraph::unweighted(field, false, total, &edges)
}

/// The unweighted clique on `U`.
pub fn clique_on_u(spec: &CounterexampleSpec, field: FieldSpec) -> Result<WeightedGraph> {
    let edges: Vec<(usize, usize)> = (0..spec.n)
        .flat_map(|a| ((a + 1)..spec.n).map(move |b| (a, b)))
        .collect();
    WeightedGraph::unweighted(field, false, spec.n, &edges)
}

/// Whether `hom_φ(G,H) = hom_φ(G,K_U)` for a pinning `φ` into `U`.
pub fn verify_collapse(
    spec: &CounterexampleSpec,
    h: &WeightedGraph,
    g: &LabeledGraph,
    phi: &LabelMap,
    limits: &Limits,
) -> Result<bool> {
    phi.check_range(spec.n)?;
    let k_u = clique_on_u(spec, h.spec())?;
    Ok(hom_partial_with(g, h, phi, limits)? == hom_partial_with(g, &k_u, phi, limits)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AutomorphismCensus {
    pub count: usize,
    pub fix_u_pointwise: bool,
    pub preserve_blocks: bool,
}

/// Automorphisms of `H_{n,ℓ}` and whether each fixes `U` and maps every `V_i` to itself.
pub fn automorphism_census(
    spec: &CounterexampleSpec,
    h: &WeightedGraph,
    limits: &Limits,
) -> Result<AutomorphismCensus> {
    let auts = enumerate_automorphisms(h, limits)?;
    let fix_u_pointwise = auts
        .iter()
        .all(|s| (0..spec.n).all(|u| s.forward()[u] == u));
    let preserve_blocks = auts.iter().all(|s| {
        (0..spec.n).all(|i| {
            spec.block(i)
                .all(|v| spec.block(i).contains(&s.forward()[v]))
        })
    });
    Ok(AutomorphismCensus {
        count: auts.len(),
        fix_u_pointwise,
        preserve_blocks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ControlResult {
    pub field: FieldSpec,
    pub separated: bool,
    pub witness: Option<LabeledGraph>,
    pub lhs: Option<FieldValue>,
    pub rhs: Option<FieldValue>,
    pub witness_source: Option<WitnessSource>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub spec: CounterexampleSpec,
    /// Present in the unlabeled case: the second graph compared against the first.
    pub other_spec: Option<CounterexampleSpec>,
    pub k: usize,
    pub field: FieldSpec,
    pub vertices: usize,
    pub other_vertices: Option<usize>,
    pub automorphisms: AutomorphismCensus,
    /// 1-based pinnings; empty when `k = 0`.
    pub phi: Vec<usize>,
    pub psi: Vec<usize>,
    pub same_type: bool,
    /// Unlabeled-vertex bound of the exhaustive simple-graph enumeration.
    pub max_free: usize,
    pub graphs_checked: usize,
    /// Both sides agree on every enumerated graph.
    pub hom_equal_on_all: bool,
    /// Both sides equal their value in the clique on `U` on every enumerated graph.
    pub collapse_on_all: bool,
    pub first_disagreement: Option<LabeledGraph>,
    /// A pinned isomorphism (`k ≥ 1`) or any isomorphism (`k = 0`) exists.
    pub isomorphism_exists: bool,
    /// Hom-equal on every enumerated graph, yet not isomorphic.
    pub violation: bool,
    /// The same construction over the rationals.
    pub control: ControlResult,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ViolationOptions {
    pub max_free: usize,
    pub control_max_free: usize,
}

impl Default for ViolationOptions {
    fn default() -> Self {
        ViolationOptions {
            max_free: 4,
            control_max_free: 4,
        }
    }
}

fn one_based(phi: &LabelMap) -> Vec<usize> {
    phi.targets().iter().map(|v| v + 1).collect()
}

fn control(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    phi: &LabelMap,
    psi: &LabelMap,
    max_free: usize,
    limits: &Limits,
) -> Result<ControlResult> {
    let options = WitnessOptions {
        max_free,
        use_q_family: false,
        ..WitnessOptions::default()
    };
    let w = find_witness(h, h2, phi, psi, &options, limits)?;
    Ok(ControlResult {
        field: h.spec(),
        separated: w.is_some(),
        witness_source: w.as_ref().map(|w| w.source),
        lhs: w.as_ref().map(|w| w.lhs.clone()),
        rhs: w.as_ref().map(|w| w.rhs.clone()),
        witness: w.map(|w| w.graph),
    })
}

/// With `k ≥ 1`: pins every label at `u_1` versus `u_2` in the same graph.
/// With `k = 0`: compares `H_{n,ℓ}` with `H_{n,ℓ'}` where `ℓ'` raises `ℓ_1` by one.
/// Hom equality is checked on every simple graph with at most
/// `options.max_free` unlabeled vertices; beyond that bound the report is evidence only.
pub fn demonstrate_violation(
    spec: &CounterexampleSpec,
    k: usize,
    options: &ViolationOptions,
    limits: &Limits,
) -> Result<ViolationReport> {
    spec.validate()?;
    let field = FieldSpec::prime(spec.p)?;
    let h = build_counterexample(spec)?;
    let automorphisms = automorphism_census(spec, &h, limits)?;
    let (other, h2) = if k == 0 {
        let o = spec.shifted();
        let g = build_counterexample(&o)?;
        (Some(o), g)
    } else {
        (None, h.clone())
    };
    let phi = LabelMap::constant(k, 0);
    let psi = LabelMap::constant(k, 1);
    let graphs = simple_graphs_up_to(k, options.max_free, false)?;
    let k_u = clique_on_u(spec, field)?;
    let values = limits.exec.try_map(&graphs, |g| -> Result<(bool, bool)> {
        let a = hom_partial_with(g, &h, &phi, limits)?;
        let b = hom_partial_with(g, &h2, &psi, limits)?;
        let c = hom_partial_with(g, &k_u, &phi, limits)?;
        let d = hom_partial_with(g, &k_u, &psi, limits)?;
        Ok((a == b, a == c && b == d))
    })?;
    let first_disagreement = values.iter().position(|v| !v.0).map(|i| graphs[i].clone());
    let hom_equal_on_all = first_disagreement.is_none();
    let collapse_on_all = values.iter().all(|v| v.1);
    let isomorphism_exists = if k == 0 {
        !enumerate_isomorphisms(&h, &h2, limits)?.is_empty()
    } else {
        find_pinned_isomorphism(&h, &h2, &phi, &psi, limits)?.is_some()
    };
    let q = FieldSpec::rationals();
    let hq = build_counterexample_over(spec, q)?;
    let h2q = match &other {
        Some(o) => build_counterexample_over(o, q)?,
        None => hq.clone(),
    };
    let control = control(&hq, &h2q, &phi, &psi, options.control_max_free, limits)?;
    Ok(ViolationReport {
        spec: spec.clone(),
        other_vertices: other.as_ref().map(|o| o.vertex_count()).transpose()?,
        other_spec: other,
        k,
        field,
        vertices: h.order(),
        automorphisms,
        same_type: same_type(&phi, &psi),
        phi: one_based(&phi),
        psi: one_based(&psi),
        max_free: options.max_free,
        graphs_checked: graphs.len(),
        hom_equal_on_all,
        collapse_on_all,
        first_disagreement,
        isomorphism_exists,
        violation: hom_equal_on_all && !isomorphism_exists,
        control,
        note: format!(
            "hom equality verified exhaustively for simple graphs with at most {} unlabeled vertices; larger graphs are not enumerated",
            options.max_free
        ),
    })
}
