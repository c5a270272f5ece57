//! Explicit separating graphs.
//!
//! `G_κ` is `U_k` plus one free vertex `v` joined to label `i` by an edge
//! `v → u_i` (`Down`) or `u_i → v` (`Up`). `G_{λ,τ}` has two free vertices
//! `v → v'` with stars given by `λ` around `v` and `τ` around `v'`. In
//! undirected mode both arrows become plain edges.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Limits;
use crate::field::FieldValue;
use crate::graphs::{all_maps, map_count, simple_graphs, LabelMap, LabeledGraph, WeightedGraph};
use crate::hom::{alpha_product, hom_partial_with};
use crate::isomorphism::{
    enumerate_automorphisms, enumerate_isomorphisms, recover_isomorphism, IsoCertificate,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Arrow {
    Down,
    Up,
    None,
}

/// One arrow per label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ArrowWord(pub Vec<Arrow>);

impl ArrowWord {
    pub fn blank(k: usize) -> Self {
        ArrowWord(vec![Arrow::None; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All words over `{Down, Up, None}` (or `{Down, None}` when `undirected`)
    /// in odometer order.
    pub fn all(k: usize, undirected: bool) -> Vec<ArrowWord> {
        let symbols: &[Arrow] = if undirected {
            &[Arrow::None, Arrow::Down]
        } else {
            &[Arrow::None, Arrow::Down, Arrow::Up]
        };
        all_maps(k, symbols.len())
            .map(|m| ArrowWord(m.targets().iter().map(|&i| symbols[i]).collect()))
            .collect()
    }
}

/// Pairs `(k_i, ℓ_i)` of Down and Up counts per block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExponentProfile(pub Vec<(u64, u64)>);

impl ExponentProfile {
    /// Flattened as `(k_1, ℓ_1, k_2, ℓ_2, ...)`.
    pub fn from_flat(flat: &[u64]) -> Self {
        ExponentProfile(flat.chunks(2).map(|c| (c[0], c[1])).collect())
    }

    /// Within block `i` the first `k_i` positions become `Down` and the next
    /// `ℓ_i` become `Up`; every other label gets `None`.
    pub fn word(&self, blocks: &[Vec<usize>], k: usize) -> ArrowWord {
        let mut w = ArrowWord::blank(k);
        for (block, &(down, up)) in blocks.iter().zip(&self.0) {
            for (pos, &t) in block.iter().enumerate() {
                let pos = pos as u64;
                if pos < down {
                    w.0[t] = Arrow::Down;
                } else if pos < down + up {
                    w.0[t] = Arrow::Up;
                }
            }
        }
        w
    }
}

fn star_edges(word: &ArrowWord, centre: usize) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
    word.0.iter().enumerate().filter_map(move |(i, a)| match a {
        Arrow::Down => Some((centre, i, 1)),
        Arrow::Up => Some((i, centre, 1)),
        Arrow::None => None,
    })
}

pub fn build_g_kappa(kappa: &ArrowWord, directed: bool) -> LabeledGraph {
    let k = kappa.len();
    LabeledGraph::new(directed, k, k + 1, star_edges(kappa, k)).expect("star graphs are valid")
}

pub fn build_g_lambda_tau(
    lambda: &ArrowWord,
    tau: &ArrowWord,
    directed: bool,
) -> Result<LabeledGraph> {
    let k = lambda.len();
    if tau.len() != k {
        return Err(Error::LabelCountMismatch(k, tau.len()));
    }
    let edges = star_edges(lambda, k)
        .chain(star_edges(tau, k + 1))
        .chain([(k, k + 1, 1)]);
    LabeledGraph::new(directed, k, k + 2, edges)
}

/// `Σ_i α_i ∏_{Down t} β(i, φ(t)) ∏_{Up t} β(φ(t), i)`, which equals `hom_φ(G_κ, H)`.
pub fn g_kappa_value(h: &WeightedGraph, phi: &LabelMap, kappa: &ArrowWord) -> FieldValue {
    let mut total = h.spec().zero();
    for i in 0..h.order() {
        total += h.alpha(i) * &star_value(h, phi, kappa, i);
    }
    total
}

/// `Σ_{i,j} α_i α_j β(i,j) star_λ(i) star_τ(j)`, which equals `hom_φ(G_{λ,τ}, H)`.
pub fn g_lambda_tau_value(
    h: &WeightedGraph,
    phi: &LabelMap,
    lambda: &ArrowWord,
    tau: &ArrowWord,
) -> FieldValue {
    let m = h.order();
    let left: Vec<FieldValue> = (0..m)
        .map(|i| h.alpha(i) * &star_value(h, phi, lambda, i))
        .collect();
    let right: Vec<FieldValue> = (0..m)
        .map(|j| h.alpha(j) * &star_value(h, phi, tau, j))
        .collect();
    let mut total = h.spec().zero();
    for i in 0..m {
        if left[i].is_zero() {
            continue;
        }
        for j in 0..m {
            total += &left[i] * &(h.beta(i, j) * &right[j]);
        }
    }
    total
}

fn star_value(h: &WeightedGraph, phi: &LabelMap, word: &ArrowWord, i: usize) -> FieldValue {
    let mut acc = h.spec().one();
    for (t, a) in word.0.iter().enumerate() {
        match a {
            Arrow::Down => acc *= h.beta(i, phi.get(t)),
            Arrow::Up => acc *= h.beta(phi.get(t), i),
            Arrow::None => {}
        }
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Every profile with entries in `0..2m`, in odometer order (`(2m)^{2m}` of them).
pub fn exponent_profiles(m: usize) -> impl Iterator<Item = ExponentProfile> {
    all_maps(2 * m, 2 * m).map(|e| {
        ExponentProfile::from_flat(&e.targets().iter().map(|&x| x as u64).collect::<Vec<_>>())
    })
}

/// The family `R`: one word per exponent profile over the blocks `J_1..J_m`.
pub fn build_family_r(
    blocks: &[Vec<usize>],
    k: usize,
    m: usize,
) -> Result<Vec<(ExponentProfile, ArrowWord)>> {
    for (i, b) in blocks.iter().enumerate() {
        if b.len() < 4 * m {
            return Err(Error::BlockTooSmall {
                block: i,
                size: b.len(),
                needed: 4 * m,
            });
        }
    }
    Ok(exponent_profiles(m)
        .map(|p| {
            let w = p.word(blocks, k);
            (p, w)
        })
        .collect())
}

/// The least `ℓ ≥ k` and an extension `η` of `φ` with every fibre of size at
/// least `4m²`; extra labels list the missing copies of each vertex in order.
pub fn extend_map(phi: &LabelMap, h: &WeightedGraph) -> (usize, LabelMap) {
    let m = h.order();
    let threshold = 4 * m * m;
    let sizes = phi.fibre_sizes(m);
    let mut targets = phi.targets().to_vec();
    for (u, &size) in sizes.iter().enumerate() {
        targets.extend(std::iter::repeat_n(u, threshold.saturating_sub(size)));
    }
    (targets.len(), LabelMap::new(targets))
}

/// Graphs separating `η` from every map extending `φ` outside its `Aut(H)`
/// orbit, and from every map into `H'` extending `ψ` outside its `Isom(H,H')`
/// image; deduplicated by canonical form.
pub fn build_separating_set(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    phi: &LabelMap,
    psi: &LabelMap,
    eta: &LabelMap,
    limits: &Limits,
) -> Result<Vec<LabeledGraph>> {
    let k = phi.k();
    let ell = eta.k();
    if !phi.is_prefix_of(eta) {
        return Err(Error::PreconditionViolated("eta must extend phi".into()));
    }
    let count = map_count(ell - k, h.order()).saturating_add(map_count(ell - k, h2.order()));
    if count > limits.map_enumeration as u128 {
        return Err(Error::budget(
            "separating-set map enumeration",
            count,
            limits.map_enumeration,
        ));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |g: LabeledGraph| {
        if seen.insert(g.canonical_form()) {
            out.push(g);
        }
    };

    let orbit: HashSet<LabelMap> = enumerate_automorphisms(h, limits)?
        .iter()
        .map(|s| eta.compose(s.forward()))
        .collect();
    for tail in all_maps(ell - k, h.order()) {
        let mu = LabelMap::new(
            phi.targets()
                .iter()
                .chain(tail.targets())
                .copied()
                .collect(),
        );
        if orbit.contains(&mu) {
            continue;
        }
        match recover_isomorphism(h, h, eta, &mu, limits)? {
            IsoCertificate::NonIso { witness, .. } => push(witness),
            IsoCertificate::Iso { .. } => {
                return Err(Error::SeparationFailure(format!(
                    "eta and {:?} in H",
                    mu.targets()
                )))
            }
        }
    }

    let image: HashSet<LabelMap> = enumerate_isomorphisms(h, h2, limits)?
        .iter()
        .map(|s| eta.compose(s.forward()))
        .collect();
    for tail in all_maps(ell - k, h2.order()) {
        let nu = LabelMap::new(
            psi.targets()
                .iter()
                .chain(tail.targets())
                .copied()
                .collect(),
        );
        if image.contains(&nu) {
            continue;
        }
        match recover_isomorphism(h, h2, eta, &nu, limits)? {
            IsoCertificate::NonIso { witness, .. } => push(witness),
            IsoCertificate::Iso { .. } => {
                return Err(Error::SeparationFailure(format!(
                    "eta in H and {:?} in H'",
                    nu.targets()
                )))
            }
        }
    }
    Ok(out)
}

/// The projected products `π_[k](∏_{G∈S} G^{h_G})` with `0 ≤ h_G < 2m^ℓ`,
/// kept in factored form.
#[derive(Clone, Debug)]
pub struct QFamily {
    pub separating: Vec<LabeledGraph>,
    pub k: usize,
    pub ell: usize,
    /// Exclusive bound on each exponent.
    pub exponent_bound: u64,
    pub directed: bool,
}

impl QFamily {
    pub fn new(
        separating: Vec<LabeledGraph>,
        k: usize,
        ell: usize,
        m: usize,
        directed: bool,
    ) -> Self {
        let bound = (m as u64)
            .checked_pow(ell as u32)
            .and_then(|x| x.checked_mul(2))
            .unwrap_or(u64::MAX);
        QFamily {
            separating,
            k,
            ell,
            exponent_bound: bound,
            directed,
        }
    }

    /// Exponent vectors in odometer order (first coordinate fastest).
    pub fn exponents(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let n = self.separating.len();
        let bound = self.exponent_bound;
        let mut current = if bound == 0 && n > 0 {
            None
        } else {
            Some(vec![0u64; n])
        };
        std::iter::from_fn(move || {
            let out = current.clone()?;
            let next = current.as_mut().expect("present");
            let mut i = 0;
            loop {
                if i == n {
                    current = None;
                    break;
                }
                next[i] += 1;
                if next[i] < bound {
                    break;
                }
                next[i] = 0;
                i += 1;
            }
            Some(out)
        })
    }

    /// `π_[k](∏ G^{h_G})` as an explicit graph.
    pub fn materialize(&self, exponents: &[u64]) -> Result<LabeledGraph> {
        let mut acc = LabeledGraph::unit(self.ell, self.directed);
        for (g, &e) in self.separating.iter().zip(exponents) {
            acc = acc.glue(&g.power(e)?)?;
        }
        acc.unlabel(self.k)
    }

    /// Precomputes `hom_μ(G, H)` for every `μ` extending `phi` and every `G ∈ S`.
    pub fn evaluator(
        &self,
        h: &WeightedGraph,
        phi: &LabelMap,
        limits: &Limits,
    ) -> Result<ProjectedEvaluator> {
        let extra = self.ell - self.k;
        let count = map_count(extra, h.order());
        if count > limits.map_enumeration as u128 {
            return Err(Error::budget(
                "projected evaluation",
                count,
                limits.map_enumeration,
            ));
        }
        let mut terms = Vec::new();
        for tail in all_maps(extra, h.order()) {
            let weight = alpha_product(h, &tail);
            let mu = LabelMap::new(
                phi.targets()
                    .iter()
                    .chain(tail.targets())
                    .copied()
                    .collect(),
            );
            let homs = self
                .separating
                .iter()
                .map(|g| hom_partial_with(g, h, &mu, limits))
                .collect::<Result<Vec<_>>>()?;
            terms.push((weight, homs));
        }
        Ok(ProjectedEvaluator {
            zero: h.spec().zero(),
            terms,
        })
    }
}

/// Evaluates `hom_φ(π_[k](G_h̄), H) = Σ_μ ∏_{t>k} α_{μ(t)} ∏_G hom_μ(G,H)^{h_G}`.
#[derive(Clone, Debug)]
pub struct ProjectedEvaluator {
    zero: FieldValue,
    terms: Vec<(FieldValue, Vec<FieldValue>)>,
}

impl ProjectedEvaluator {
    pub fn value(&self, exponents: &[u64]) -> FieldValue {
        let mut total = self.zero.clone();
        for (w, homs) in &self.terms {
            let mut term = w.clone();
            for (v, &e) in homs.iter().zip(exponents) {
                if e > 0 {
                    term *= &v.pow(e);
                }
            }
            total += term;
        }
        total
    }
}

/// The finite family for the pair `(H, φ)`, `(H', ψ)`.
pub fn q_family(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    phi: &LabelMap,
    psi: &LabelMap,
    limits: &Limits,
) -> Result<QFamily> {
    let (ell, eta) = extend_map(phi, h);
    let separating = build_separating_set(h, h2, phi, psi, &eta, limits)?;
    Ok(QFamily::new(
        separating,
        phi.k(),
        ell,
        h.order(),
        h.is_directed(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessSource {
    KappaFamily,
    LambdaTauFamily,
    Enumeration,
    QFamily,
}

/// A simple graph on which the two pinned hom values differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub graph: LabeledGraph,
    pub lhs: FieldValue,
    pub rhs: FieldValue,
    pub source: WitnessSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessOptions {
    /// Largest number of unlabeled vertices in enumerated graphs.
    pub max_free: usize,
    /// Largest family size (`3^k` words, `9^k` pairs) tried before enumeration.
    pub family_cap: u64,
    pub use_q_family: bool,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            max_free: 4,
            family_cap: 20_000,
            use_q_family: true,
        }
    }
}

/// Searches the star families, then simple graphs by unlabeled-vertex count,
/// then (if enabled and affordable) the projected products. `Ok(None)` means
/// nothing separates within the bounds.
pub fn find_witness(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    phi: &LabelMap,
    psi: &LabelMap,
    options: &WitnessOptions,
    limits: &Limits,
) -> Result<Option<Witness>> {
    if h.is_directed() != h2.is_directed() {
        return Err(Error::DirectednessMismatch);
    }
    if h.spec() != h2.spec() {
        return Err(Error::SpecMismatch(
            h.spec().to_string(),
            h2.spec().to_string(),
        ));
    }
    if phi.k() != psi.k() {
        return Err(Error::ArityMismatch {
            expected: phi.k(),
            found: psi.k(),
        });
    }
    phi.check_range(h.order())?;
    psi.check_range(h2.order())?;
    let k = phi.k();
    let directed = h.is_directed();
    let confirm = |g: LabeledGraph, source| -> Result<Option<Witness>> {
        let lhs = hom_partial_with(&g, h, phi, limits)?;
        let rhs = hom_partial_with(&g, h2, psi, limits)?;
        if lhs == rhs {
            return Err(Error::InvariantViolated(
                "closed-form family value disagrees with enumeration".into(),
            ));
        }
        Ok(Some(Witness {
            graph: g,
            lhs,
            rhs,
            source,
        }))
    };

    let words_count = if directed { 3u128 } else { 2 }
        .checked_pow(k as u32)
        .unwrap_or(u128::MAX);
    if words_count <= options.family_cap as u128 {
        let words = ArrowWord::all(k, !directed);
        for w in &words {
            if g_kappa_value(h, phi, w) != g_kappa_value(h2, psi, w) {
                return confirm(build_g_kappa(w, directed), WitnessSource::KappaFamily);
            }
        }
        if words_count.saturating_mul(words_count) <= options.family_cap as u128 {
            for l in &words {
                for t in &words {
                    if g_lambda_tau_value(h, phi, l, t) != g_lambda_tau_value(h2, psi, l, t) {
                        return confirm(
                            build_g_lambda_tau(l, t, directed)?,
                            WitnessSource::LambdaTauFamily,
                        );
                    }
                }
            }
        }
    }

    for free in 1..=options.max_free {
        let tier = match simple_graphs(k, free, directed) {
            Ok(t) => t,
            Err(e) if e.is_budget() => break,
            Err(e) => return Err(e),
        };
        for g in tier.iter() {
            let lhs = hom_partial_with(g, h, phi, limits)?;
            let rhs = hom_partial_with(g, h2, psi, limits)?;
            if lhs != rhs {
                return Ok(Some(Witness {
                    graph: g.clone(),
                    lhs,
                    rhs,
                    source: WitnessSource::Enumeration,
                }));
            }
        }
    }

    if options.use_q_family && crate::twin::is_twin_free(h) && h.order() >= h2.order() {
        let family = match q_family(h, h2, phi, psi, limits) {
            Ok(f) => f,
            Err(e) if e.is_budget() => return Ok(None),
            Err(e) => return Err(e),
        };
        let (left, right) = match (
            family.evaluator(h, phi, limits),
            family.evaluator(h2, psi, limits),
        ) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e), _) | (_, Err(e)) if e.is_budget() => return Ok(None),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        for (visited, exps) in family.exponents().enumerate() {
            if visited as u64 >= limits.map_enumeration {
                break;
            }
            if left.value(&exps) != right.value(&exps) {
                let total: u64 = exps
                    .iter()
                    .zip(&family.separating)
                    .map(|(e, g)| e * g.n() as u64)
                    .sum();
                if total > limits.map_enumeration {
                    return Ok(None);
                }
                return confirm(family.materialize(&exps)?, WitnessSource::QFamily);
            }
        }
    }
    Ok(None)
}
