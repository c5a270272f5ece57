//! Isomorphisms of weighted graphs: a backtracking oracle, constructive
//! recovery from a highly surjective pinning, and pinned decision procedures.
//!
//! Recovery never evaluates the exponentially large star families one graph
//! at a time. Each family equality is a moment system over the tuples
//! `y_i = (β_ij, β_ji)_j`, and all of its moments vanish exactly when every
//! tuple class has zero coefficient sum. When some class sum is nonzero the
//! moment finder returns an exponent profile inside the family range, and the
//! corresponding family graph is the witness.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::Limits;
use crate::field::FieldValue;
use crate::graphs::{LabelMap, LabeledGraph, WeightedGraph};
use crate::hom::hom_partial_with;
use crate::twin::{contract_with_map, is_twin_free, twin_partition};
use crate::vandermonde::MomentSystem;
use crate::witness::{
    build_g_kappa, build_g_lambda_tau, extend_map, find_witness, Arrow, ExponentProfile, Witness,
    WitnessOptions,
};

/// A vertex map `V(H) → V(H')`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexBijection(Vec<usize>);

impl VertexBijection {
    pub fn new(forward: Vec<usize>) -> Self {
        VertexBijection(forward)
    }

    pub fn identity(m: usize) -> Self {
        VertexBijection((0..m).collect())
    }

    pub fn forward(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> VertexBijection {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        VertexBijection(inv)
    }

    /// Whether `self` is a weight-preserving bijection from `h` onto `h2`.
    pub fn is_isomorphism(&self, h: &WeightedGraph, h2: &WeightedGraph) -> bool {
        let m = h.order();
        if m != h2.order() || self.0.len() != m {
            return false;
        }
        let mut seen = vec![false; m];
        for &j in &self.0 {
            if j >= m || std::mem::replace(&mut seen[j], true) {
                return false;
            }
        }
        (0..m).all(|i| {
            h.alpha(i) == h2.alpha(self.0[i])
                && (0..m).all(|j| h.beta(i, j) == h2.beta(self.0[i], self.0[j]))
        })
    }
}

/// Either an isomorphism `σ` with `ψ = σ∘φ`, or a simple graph whose pinned
/// hom values differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoCertificate {
    Iso {
        sigma: VertexBijection,
    },
    NonIso {
        witness: LabeledGraph,
        lhs: FieldValue,
        rhs: FieldValue,
    },
}

impl IsoCertificate {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoCertificate::Iso { .. })
    }

    fn from_witness(w: Witness) -> Self {
        IsoCertificate::NonIso {
            witness: w.graph,
            lhs: w.lhs,
            rhs: w.rhs,
        }
    }

    fn swapped(self) -> Self {
        match self {
            IsoCertificate::Iso { sigma } => IsoCertificate::Iso {
                sigma: sigma.inverse(),
            },
            IsoCertificate::NonIso { witness, lhs, rhs } => IsoCertificate::NonIso {
                witness,
                lhs: rhs,
                rhs: lhs,
            },
        }
    }
}

impl Serialize for IsoCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            IsoCertificate::Iso { sigma } => {
                let mut st = s.serialize_struct("IsoCertificate", 2)?;
                st.serialize_field("verdict", "iso")?;
                st.serialize_field("sigma", &sigma.0.iter().map(|v| v + 1).collect::<Vec<_>>())?;
                st.end()
            }
            IsoCertificate::NonIso { witness, lhs, rhs } => {
                let mut st = s.serialize_struct("IsoCertificate", 4)?;
                st.serialize_field("verdict", "noniso")?;
                st.serialize_field("witness", witness)?;
                st.serialize_field("lhs", lhs)?;
                st.serialize_field("rhs", rhs)?;
                st.end()
            }
        }
    }
}

/// Backtracking over vertex images in index order; `fixed[i]` forces `σ(i)`.
/// Results come out in lexicographic order of `σ`; at most `max_results` are kept.
fn search_isomorphisms(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    fixed: &[Option<usize>],
    max_results: usize,
    limits: &Limits,
) -> Result<Vec<VertexBijection>> {
    let m = h.order();
    if m != h2.order() || h.is_directed() != h2.is_directed() || h.spec() != h2.spec() {
        return Ok(Vec::new());
    }
    if m > limits.oracle_vertices {
        return Err(Error::budget(
            "isomorphism oracle vertices",
            m as u128,
            limits.oracle_vertices as u64,
        ));
    }
    struct State<'a> {
        h: &'a WeightedGraph,
        h2: &'a WeightedGraph,
        fixed: &'a [Option<usize>],
        sigma: Vec<usize>,
        used: Vec<bool>,
        out: Vec<VertexBijection>,
        max: usize,
    }
    fn go(st: &mut State, i: usize) {
        let m = st.h.order();
        if st.out.len() >= st.max {
            return;
        }
        if i == m {
            st.out.push(VertexBijection(st.sigma.clone()));
            return;
        }
        let candidates: Vec<usize> = match st.fixed[i] {
            Some(j) => vec![j],
            None => (0..m).collect(),
        };
        for j in candidates {
            if st.used[j] || st.h.alpha(i) != st.h2.alpha(j) || st.h.beta(i, i) != st.h2.beta(j, j)
            {
                continue;
            }
            let consistent = (0..i).all(|p| {
                let q = st.sigma[p];
                st.h.beta(i, p) == st.h2.beta(j, q) && st.h.beta(p, i) == st.h2.beta(q, j)
            });
            if !consistent {
                continue;
            }
            st.used[j] = true;
            st.sigma.push(j);
            go(st, i + 1);
            st.sigma.pop();
            st.used[j] = false;
        }
    }
    let mut st = State {
        h,
        h2,
        fixed,
        sigma: Vec::with_capacity(m),
        used: vec![false; m],
        out: Vec::new(),
        max: max_results,
    };
    go(&mut st, 0);
    Ok(st.out)
}

/// All weight-preserving bijections `H → H'`; empty when the orders differ.
pub fn enumerate_isomorphisms(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    limits: &Limits,
) -> Result<Vec<VertexBijection>> {
    search_isomorphisms(h, h2, &vec![None; h.order()], usize::MAX, limits)
}

/// `Aut(H)`, identity first.
pub fn enumerate_automorphisms(h: &WeightedGraph, limits: &Limits) -> Result<Vec<VertexBijection>> {
    enumerate_isomorphisms(h, h, limits)
}

/// Some isomorphism `σ` with `ψ = σ∘φ`, by exhaustive search.
pub fn find_pinned_isomorphism(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    phi: &LabelMap,
    psi: &LabelMap,
    limits: &Limits,
) -> Result<Option<VertexBijection>> {
    if h.order() != h2.order() {
        return Ok(None);
    }
    let mut fixed = vec![None; h.order()];
    for (&a, &b) in phi.targets().iter().zip(psi.targets()) {
        match fixed[a] {
            Some(x) if x != b => return Ok(None),
            _ => fixed[a] = Some(b),
        }
    }
    Ok(search_isomorphisms(h, h2, &fixed, 1, limits)?.pop())
}

/// `φ(i) = φ(j) ⟺ ψ(i) = ψ(j)` for all labels.
pub fn same_type(phi: &LabelMap, psi: &LabelMap) -> bool {
    let k = phi.k();
    k == psi.k()
        && (0..k).all(|i| (0..k).all(|j| (phi.get(i) == phi.get(j)) == (psi.get(i) == psi.get(j))))
}

/// Where recovery stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Failure {
    /// A star graph over the blocks has unequal values.
    Stars(Vec<u64>),
    /// Same, with the extra label `t` carrying `arrow`.
    ExtraLabel {
        t: usize,
        arrow: Arrow,
        exponents: Vec<u64>,
    },
    /// A two-centre graph over the blocks has unequal values.
    Pairs(Vec<u64>),
}

struct Blocks {
    /// `J_i`: first `4m` positions of `φ^{-1}(i)` on which `ψ` takes its most frequent value.
    blocks: Vec<Vec<usize>>,
    /// `s(i)`: that value.
    s: Vec<usize>,
}

fn choose_blocks(phi: &LabelMap, psi: &LabelMap, m: usize, m2: usize) -> Blocks {
    let mut fibres = vec![Vec::new(); m];
    for (t, &i) in phi.targets().iter().enumerate() {
        fibres[i].push(t);
    }
    let mut blocks = Vec::with_capacity(m);
    let mut s = Vec::with_capacity(m);
    for fibre in fibres {
        let mut counts = vec![0usize; m2];
        for &t in &fibre {
            counts[psi.get(t)] += 1;
        }
        let best = (0..m2)
            .max_by_key(|&v| (counts[v], std::cmp::Reverse(v)))
            .expect("m' >= 1");
        blocks.push(
            fibre
                .into_iter()
                .filter(|&t| psi.get(t) == best)
                .take(4 * m)
                .collect(),
        );
        s.push(best);
    }
    Blocks { blocks, s }
}

/// Runs the recovery steps without building witnesses. Failures carry
/// exponents only when `exponents` is set; otherwise they are empty.
fn recover_core(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    phi: &LabelMap,
    psi: &LabelMap,
    exponents: bool,
) -> Result<(Blocks, std::result::Result<VertexBijection, Failure>)> {
    let m = h.order();
    let m2 = h2.order();
    let spec = h.spec();
    let blocks = choose_blocks(phi, psi, m, m2);
    let s = &blocks.s;

    let y: Vec<Vec<FieldValue>> = (0..m)
        .map(|i| {
            (0..m)
                .flat_map(|j| [h.beta(i, j).clone(), h.beta(j, i).clone()])
                .collect()
        })
        .collect();
    let y2: Vec<Vec<FieldValue>> = (0..m2)
        .map(|q| {
            (0..m)
                .flat_map(|j| [h2.beta(q, s[j]).clone(), h2.beta(s[j], q).clone()])
                .collect()
        })
        .collect();
    let nonzero = |sys: &MomentSystem| {
        if exponents {
            sys.find_nonzero_moment()
        } else {
            (!sys.all_class_sums_zero()).then(Vec::new)
        }
    };
    let signed = |lhs: Vec<FieldValue>, rhs: Vec<FieldValue>| -> Vec<FieldValue> {
        lhs.into_iter().chain(rhs.into_iter().map(|v| -v)).collect()
    };

    // Stars over the blocks.
    let mut system = MomentSystem::new(
        spec,
        signed(h.alphas().to_vec(), h2.alphas().to_vec()),
        y.iter().chain(&y2).cloned().collect(),
    )?;
    if let Some(e) = nonzero(&system) {
        return Ok((blocks, Err(Failure::Stars(e))));
    }

    // Each class holds one vertex of H and a nonempty set N_i of vertices of H'.
    let mut sigma = Vec::with_capacity(m);
    for yi in &y {
        let mut matches = (0..m2).filter(|&q| y2[q] == *yi);
        match (matches.next(), matches.next()) {
            (Some(q), None) => sigma.push(q),
            _ => {
                let count = (0..m2).filter(|&q| y2[q] == *yi).count();
                return Err(Error::InvariantViolated(format!(
                    "class of a vertex of H has {count} partners"
                )));
            }
        }
    }
    if m != m2 || (0..m).any(|i| h.alpha(i) != h2.alpha(sigma[i])) {
        return Err(Error::InvariantViolated(
            "vanishing class sums without a weight-preserving matching".into(),
        ));
    }

    // Labels outside the blocks; one check per (φ(t), ψ(t)).
    let mut in_block = vec![false; phi.k()];
    for &t in blocks.blocks.iter().flatten() {
        in_block[t] = true;
    }
    let mut checked = vec![false; m * m2];
    for t in 0..phi.k() {
        let (w, target) = (phi.get(t), psi.get(t));
        if in_block[t] || checked[w * m2 + target] {
            continue;
        }
        system.set_coefficients(signed(
            (0..m).map(|i| h.alpha(i) * h.beta(i, w)).collect(),
            (0..m2).map(|q| h2.alpha(q) * h2.beta(q, target)).collect(),
        ))?;
        if let Some(e) = nonzero(&system) {
            return Ok((
                blocks,
                Err(Failure::ExtraLabel {
                    t,
                    arrow: Arrow::Down,
                    exponents: e,
                }),
            ));
        }
        system.set_coefficients(signed(
            (0..m).map(|i| h.alpha(i) * h.beta(w, i)).collect(),
            (0..m2).map(|q| h2.alpha(q) * h2.beta(target, q)).collect(),
        ))?;
        if let Some(e) = nonzero(&system) {
            return Ok((
                blocks,
                Err(Failure::ExtraLabel {
                    t,
                    arrow: Arrow::Up,
                    exponents: e,
                }),
            ));
        }
        if target != s[w] {
            return Err(Error::InvariantViolated(
                "extra label equalities hold but the pinned image moved".into(),
            ));
        }
        checked[w * m2 + target] = true;
    }

    // Two-centre graphs over the blocks.
    let mut coeffs = Vec::with_capacity(m * m + m2 * m2);
    let mut pair_tuples = Vec::with_capacity(m * m + m2 * m2);
    let pair = |a: &[FieldValue], b: &[FieldValue]| -> Vec<FieldValue> {
        let mut t = Vec::with_capacity(a.len() + b.len());
        t.extend_from_slice(a);
        t.extend_from_slice(b);
        t
    };
    for i in 0..m {
        for j in 0..m {
            coeffs.push(h.alpha(i) * h.alpha(j) * h.beta(i, j));
            pair_tuples.push(pair(&y[i], &y[j]));
        }
    }
    for p in 0..m2 {
        for q in 0..m2 {
            coeffs.push(-(h2.alpha(p) * h2.alpha(q) * h2.beta(p, q)));
            pair_tuples.push(pair(&y2[p], &y2[q]));
        }
    }
    if let Some(e) = nonzero(&MomentSystem::new(spec, coeffs, pair_tuples)?) {
        return Ok((blocks, Err(Failure::Pairs(e))));
    }

    let sigma = VertexBijection(sigma);
    if sigma.0 != *s || !sigma.is_isomorphism(h, h2) || phi.compose(&sigma.0) != *psi {
        return Err(Error::InvariantViolated(
            "all family equalities hold but the recovered map is not a pinned isomorphism".into(),
        ));
    }
    Ok((blocks, Ok(sigma)))
}

fn check_recovery_preconditions(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    phi: &LabelMap,
    psi: &LabelMap,
) -> Result<()> {
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
    if h.order() < h2.order() {
        return Err(Error::PreconditionViolated(
            "recovery needs |V(H)| >= |V(H')|".into(),
        ));
    }
    if !is_twin_free(h) {
        return Err(Error::PreconditionViolated("H must be twin-free".into()));
    }
    let m = h.order();
    if let Some(u) = phi.fibre_sizes(m).iter().position(|&c| c < 4 * m * m) {
        return Err(Error::PreconditionViolated(format!(
            "vertex {} has fewer than {} preimages; extend the pinning first",
            u + 1,
            4 * m * m
        )));
    }
    Ok(())
}

/// Recovers the isomorphism `σ` with `ψ = σ∘φ` from a pinning `φ` whose
/// fibres all have size at least `4m²`, or returns the first family graph
/// whose two hom values differ.
pub fn recover_isomorphism(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    phi: &LabelMap,
    psi: &LabelMap,
    limits: &Limits,
) -> Result<IsoCertificate> {
    check_recovery_preconditions(h, h2, phi, psi)?;
    let k = phi.k();
    if h.order() == 0 {
        return Ok(IsoCertificate::Iso {
            sigma: VertexBijection(Vec::new()),
        });
    }
    let directed = h.is_directed();
    let (blocks, outcome) = recover_core(h, h2, phi, psi, true)?;
    let failure = match outcome {
        Ok(sigma) => return Ok(IsoCertificate::Iso { sigma }),
        Err(f) => f,
    };
    let witness = match failure {
        Failure::Stars(e) => build_g_kappa(
            &ExponentProfile::from_flat(&e).word(&blocks.blocks, k),
            directed,
        ),
        Failure::ExtraLabel {
            t,
            arrow,
            exponents,
        } => {
            let mut w = ExponentProfile::from_flat(&exponents).word(&blocks.blocks, k);
            w.0[t] = arrow;
            build_g_kappa(&w, directed)
        }
        Failure::Pairs(e) => {
            let half = e.len() / 2;
            let lambda = ExponentProfile::from_flat(&e[..half]).word(&blocks.blocks, k);
            let tau = ExponentProfile::from_flat(&e[half..]).word(&blocks.blocks, k);
            build_g_lambda_tau(&lambda, &tau, directed)?
        }
    };
    let lhs = hom_partial_with(&witness, h, phi, limits)?;
    let rhs = hom_partial_with(&witness, h2, psi, limits)?;
    if lhs == rhs {
        return Err(Error::InvariantViolated(
            "family graph from a nonzero moment does not separate".into(),
        ));
    }
    Ok(IsoCertificate::NonIso { witness, lhs, rhs })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Oracle,
    Constructive,
    Both,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Mode::Oracle),
            "constructive" => Ok(Mode::Constructive),
            "both" => Ok(Mode::Both),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// Enumerates bijections `s: [m] → [m]` with `s(φ(x)) = ψ(x)` for every label,
/// extends the pinning so every fibre reaches `4m²`, and runs recovery with
/// `ν = ψ` on `[k]` and `s∘η` beyond. Recovery can only succeed with
/// `s = σ` bijective, so no other candidates are needed.
fn constructive_verdict(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    phi: &LabelMap,
    psi: &LabelMap,
    limits: &Limits,
) -> Result<Option<VertexBijection>> {
    let m = h.order();
    if m == 0 {
        return Ok(Some(VertexBijection(Vec::new())));
    }
    if m != h2.order() {
        return Ok(None);
    }
    let mut fixed = vec![None; m];
    for (&a, &b) in phi.targets().iter().zip(psi.targets()) {
        match fixed[a] {
            Some(x) if x != b => return Ok(None),
            _ => fixed[a] = Some(b),
        }
    }
    let (_, eta) = extend_map(phi, h);
    let mut candidates = Vec::new();
    permutations_with(
        &fixed,
        &mut vec![false; m],
        &mut Vec::new(),
        &mut candidates,
        limits.map_enumeration,
    )?;
    for s in candidates {
        let nu: Vec<usize> = psi
            .targets()
            .iter()
            .copied()
            .chain(eta.targets()[phi.k()..].iter().map(|&u| s[u]))
            .collect();
        if let (_, Ok(sigma)) = recover_core(h, h2, &eta, &LabelMap::new(nu), false)? {
            if phi.compose(sigma.forward()) != *psi {
                return Err(Error::InvariantViolated(
                    "recovered isomorphism does not respect the pins".into(),
                ));
            }
            return Ok(Some(sigma));
        }
    }
    Ok(None)
}

fn permutations_with(
    fixed: &[Option<usize>],
    used: &mut Vec<bool>,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: u64,
) -> Result<()> {
    let i = current.len();
    if i == fixed.len() {
        if out.len() as u64 >= cap {
            return Err(Error::budget(
                "candidate pinned bijections",
                out.len() as u128 + 1,
                cap,
            ));
        }
        out.push(current.clone());
        return Ok(());
    }
    let options: Vec<usize> = match fixed[i] {
        Some(j) => vec![j],
        None => (0..fixed.len())
            .filter(|&j| !fixed.contains(&Some(j)))
            .collect(),
    };
    for j in options {
        if used[j] {
            continue;
        }
        used[j] = true;
        current.push(j);
        permutations_with(fixed, used, current, out, cap)?;
        current.pop();
        used[j] = false;
    }
    Ok(())
}

/// Decides whether some isomorphism `σ: H → H'` satisfies `ψ = σ∘φ`.
///
/// The graphs are swapped first when `|V(H)| < |V(H')|`. Constructive mode
/// needs the larger graph to be twin-free. A negative verdict carries a simple
/// witness from [`find_witness`]; if none is found within its bounds the
/// result is [`Error::WitnessNotFound`].
pub fn decide_pinned_iso(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    phi: &LabelMap,
    psi: &LabelMap,
    mode: Mode,
    limits: &Limits,
) -> Result<IsoCertificate> {
    decide_pinned_iso_with(h, h2, phi, psi, mode, &WitnessOptions::default(), limits)
}

pub fn decide_pinned_iso_with(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    phi: &LabelMap,
    psi: &LabelMap,
    mode: Mode,
    options: &WitnessOptions,
    limits: &Limits,
) -> Result<IsoCertificate> {
    if h.order() < h2.order() {
        return Ok(decide_pinned_iso_with(h2, h, psi, phi, mode, options, limits)?.swapped());
    }
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
    if mode != Mode::Oracle && !is_twin_free(h) {
        return Err(Error::PreconditionViolated(
            "constructive mode needs a twin-free graph; contract it first".into(),
        ));
    }
    let verdict = match mode {
        Mode::Oracle => find_pinned_isomorphism(h, h2, phi, psi, limits)?,
        Mode::Constructive => constructive_verdict(h, h2, phi, psi, limits)?,
        Mode::Both => {
            let oracle = find_pinned_isomorphism(h, h2, phi, psi, limits)?;
            let constructive = constructive_verdict(h, h2, phi, psi, limits)?;
            if oracle.is_some() != constructive.is_some() {
                return Err(Error::Disagreement(format!(
                    "oracle says {}, constructive says {}",
                    if oracle.is_some() { "iso" } else { "noniso" },
                    if constructive.is_some() {
                        "iso"
                    } else {
                        "noniso"
                    }
                )));
            }
            constructive
        }
    };
    match verdict {
        Some(sigma) => Ok(IsoCertificate::Iso { sigma }),
        None => find_witness(h, h2, phi, psi, options, limits)?
            .map(IsoCertificate::from_witness)
            .ok_or(Error::WitnessNotFound),
    }
}

/// Result of deciding isomorphism after twin contraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractedVerdict {
    /// Twin classes of each input graph (0-based vertex lists).
    pub classes_a: Vec<Vec<usize>>,
    pub classes_b: Vec<Vec<usize>>,
    /// Certificate between the two contractions.
    pub certificate: IsoCertificate,
    /// For an isomorphism, the twin class of `b` matched to each class of `a`
    /// that survived contraction.
    pub class_matching: Option<Vec<(usize, usize)>>,
}

/// Contracts both graphs and decides isomorphism of the contractions; on
/// success reports which twin classes correspond. Classes are matched as
/// wholes and no representative inside a class is singled out.
pub fn decide_after_contraction(
    h: &WeightedGraph,
    h2: &WeightedGraph,
    mode: Mode,
    limits: &Limits,
) -> Result<ContractedVerdict> {
    let (c1, map1) = contract_with_map(h);
    let (c2, map2) = contract_with_map(h2);
    let classes_a = twin_partition(h).classes;
    let classes_b = twin_partition(h2).classes;
    let certificate = decide_pinned_iso(
        &c1,
        &c2,
        &LabelMap::empty(),
        &LabelMap::empty(),
        mode,
        limits,
    )?;
    let class_matching = match &certificate {
        IsoCertificate::Iso { sigma } => {
            let class_in = |classes: &[Vec<usize>], map: &[Option<usize>], contracted: usize| {
                classes
                    .iter()
                    .position(|c| map[c[0]] == Some(contracted))
                    .expect("surviving class")
            };
            Some(
                (0..c1.order())
                    .map(|x| {
                        (
                            class_in(&classes_a, &map1, x),
                            class_in(&classes_b, &map2, sigma.forward()[x]),
                        )
                    })
                    .collect(),
            )
        }
        IsoCertificate::NonIso { .. } => None,
    };
    Ok(ContractedVerdict {
        classes_a,
        classes_b,
        certificate,
        class_matching,
    })
}

/// The lexicographically least `(α, β)` string over all vertex orders;
/// equal for two graphs iff they are isomorphic.
pub fn canonical_weighted_key(h: &WeightedGraph, limits: &Limits) -> Result<Vec<String>> {
    let m = h.order();
    if m > limits.oracle_vertices {
        return Err(Error::budget(
            "weighted canonical key",
            m as u128,
            limits.oracle_vertices as u64,
        ));
    }
    let mut best: Option<Vec<String>> = None;
    let mut all = Vec::new();
    permutations_with(
        &vec![None; m],
        &mut vec![false; m],
        &mut Vec::new(),
        &mut all,
        u64::MAX,
    )?;
    for order in all {
        let mut key = vec![h.is_directed().to_string(), h.spec().to_string()];
        key.extend(order.iter().map(|&i| h.alpha(i).to_string()));
        for &i in &order {
            for &j in &order {
                key.push(h.beta(i, j).to_string());
            }
        }
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    Ok(best.unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::graphs::all_maps;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    /// A path with a loop at one end; twin-free with trivial automorphism group.
    fn path3() -> WeightedGraph {
        WeightedGraph::from_ints(
            q(),
            false,
            &[1, 2, 1],
            &[vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 0]],
        )
        .unwrap()
    }

    #[test]
    fn oracle_examples() {
        let l = Limits::default();
        let distinct = WeightedGraph::from_ints(
            q(),
            false,
            &[1, 2, 3],
            &[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        )
        .unwrap();
        assert_eq!(
            enumerate_automorphisms(&distinct, &l).unwrap(),
            vec![VertexBijection::identity(3)]
        );
        let k2 = WeightedGraph::unweighted(q(), false, 2, &[(0, 1)]).unwrap();
        assert_eq!(enumerate_automorphisms(&k2, &l).unwrap().len(), 2);
        assert_eq!(enumerate_automorphisms(&path3(), &l).unwrap().len(), 1);
        let sym = WeightedGraph::unweighted(q(), false, 3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(enumerate_automorphisms(&sym, &l).unwrap().len(), 2);
        let p = [2, 0, 1];
        let hp = distinct.permuted(&p).unwrap();
        assert!(enumerate_isomorphisms(&distinct, &hp, &l)
            .unwrap()
            .contains(&VertexBijection::new(p.to_vec())));
        assert!(enumerate_isomorphisms(&distinct, &k2, &l)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn same_type_examples() {
        let a = LabelMap::new(vec![0, 0]);
        assert!(same_type(&a, &a));
        assert!(same_type(&a, &LabelMap::new(vec![1, 1])));
        assert!(!same_type(&a, &LabelMap::new(vec![0, 1])));
    }

    #[test]
    fn recovery_identity_and_permutation() {
        let l = Limits::default();
        let h = WeightedGraph::from_ints(
            q(),
            true,
            &[1, -1, 2],
            &[vec![0, 1, 2], vec![1, 1, -1], vec![2, 0, 0]],
        )
        .unwrap();
        let (_, eta) = extend_map(&LabelMap::empty(), &h);
        assert_eq!(
            recover_isomorphism(&h, &h, &eta, &eta, &l).unwrap(),
            IsoCertificate::Iso {
                sigma: VertexBijection::identity(3)
            }
        );
        let p = vec![1, 2, 0];
        let hp = h.permuted(&p).unwrap();
        let cert = recover_isomorphism(&h, &hp, &eta, &eta.compose(&p), &l).unwrap();
        assert_eq!(
            cert,
            IsoCertificate::Iso {
                sigma: VertexBijection::new(p)
            }
        );
        let empty = WeightedGraph::from_ints(q(), false, &[], &[]).unwrap();
        assert!(
            recover_isomorphism(&empty, &empty, &LabelMap::empty(), &LabelMap::empty(), &l)
                .unwrap()
                .is_iso()
        );
    }

    #[test]
    fn recovery_witnesses_separate() {
        let l = Limits::default();
        let h = WeightedGraph::from_ints(
            q(),
            true,
            &[1, -1, 2],
            &[vec![0, 1, 2], vec![1, 1, -1], vec![2, 0, 0]],
        )
        .unwrap();
        let (_, eta) = extend_map(&LabelMap::empty(), &h);
        // Every non-automorphic relabelling of the pins is rejected with a separating graph.
        let mut seen_kinds = 0;
        for tail in [vec![1usize, 0, 2], vec![0, 0, 1], vec![2, 2, 2]] {
            let mu = eta.compose(&tail);
            match recover_isomorphism(&h, &h, &eta, &mu, &l).unwrap() {
                IsoCertificate::NonIso { witness, lhs, rhs } => {
                    assert!(witness.is_simple());
                    assert_ne!(lhs, rhs);
                    seen_kinds += 1;
                }
                IsoCertificate::Iso { .. } => panic!("non-automorphism accepted"),
            }
        }
        assert_eq!(seen_kinds, 3);
        // A single moved pin outside the blocks.
        let mut moved = eta.targets().to_vec();
        let last = moved.len() - 1;
        moved[last] = (moved[last] + 1) % 3;
        assert!(
            !recover_isomorphism(&h, &h, &eta, &LabelMap::new(moved), &l)
                .unwrap()
                .is_iso()
        );
    }

    #[test]
    fn recovery_preconditions() {
        let l = Limits::default();
        let h = path3();
        let short = LabelMap::new(vec![0, 1, 2]);
        assert!(matches!(
            recover_isomorphism(&h, &h, &short, &short, &l),
            Err(Error::PreconditionViolated(_))
        ));
        let twins =
            WeightedGraph::from_ints(q(), false, &[1, 1], &[vec![0, 0], vec![0, 0]]).unwrap();
        let (_, eta) = extend_map(&LabelMap::empty(), &twins);
        assert!(matches!(
            recover_isomorphism(&twins, &twins, &eta, &eta, &l),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn pinned_decisions_agree_with_the_oracle() {
        let l = Limits::default();
        let h = path3();
        let other = WeightedGraph::from_ints(
            q(),
            false,
            &[2, 1, 1],
            &[vec![0, 1, 1], vec![1, 1, 0], vec![1, 0, 0]],
        )
        .unwrap();
        for h2 in [h.permuted(&[1, 2, 0]).unwrap(), other] {
            for k in 0..=2 {
                for phi in all_maps(k, 3) {
                    for psi in all_maps(k, 3) {
                        let cert = decide_pinned_iso(&h, &h2, &phi, &psi, Mode::Both, &l).unwrap();
                        match &cert {
                            IsoCertificate::Iso { sigma } => {
                                assert!(sigma.is_isomorphism(&h, &h2));
                                assert_eq!(phi.compose(sigma.forward()), psi);
                            }
                            IsoCertificate::NonIso { witness, lhs, rhs } => {
                                assert!(witness.is_simple());
                                assert_eq!(hom_partial_with(witness, &h, &phi, &l).unwrap(), *lhs);
                                assert_eq!(hom_partial_with(witness, &h2, &psi, &l).unwrap(), *rhs);
                                assert_ne!(lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn swapping_inverts_the_certificate() {
        let l = Limits::default();
        let small = WeightedGraph::from_ints(q(), false, &[1], &[vec![1]]).unwrap();
        let big = path3();
        let cert = decide_pinned_iso(
            &small,
            &big,
            &LabelMap::empty(),
            &LabelMap::empty(),
            Mode::Both,
            &l,
        )
        .unwrap();
        let IsoCertificate::NonIso { witness, lhs, rhs } = cert else {
            panic!("orders differ")
        };
        assert_eq!(
            hom_partial_with(&witness, &small, &LabelMap::empty(), &l).unwrap(),
            lhs
        );
        assert_eq!(
            hom_partial_with(&witness, &big, &LabelMap::empty(), &l).unwrap(),
            rhs
        );
        let p = vec![2, 0, 1];
        let hp = big.permuted(&p).unwrap();
        let cert = decide_pinned_iso(
            &big,
            &hp,
            &LabelMap::new(vec![1]),
            &LabelMap::new(vec![0]),
            Mode::Constructive,
            &l,
        )
        .unwrap();
        let IsoCertificate::Iso { sigma } = cert else {
            panic!("isomorphic")
        };
        assert!(sigma.is_isomorphism(&big, &hp));
        assert_eq!(sigma.forward()[1], 0);
    }

    #[test]
    fn certificate_json() {
        let iso = IsoCertificate::Iso {
            sigma: VertexBijection::new(vec![1, 0]),
        };
        assert_eq!(
            serde_json::to_string(&iso).unwrap(),
            r#"{"verdict":"iso","sigma":[2,1]}"#
        );
        let g = LabeledGraph::new(false, 0, 1, []).unwrap();
        let non = IsoCertificate::NonIso {
            witness: g,
            lhs: q().from_i64(2),
            rhs: q().parse("1/2").unwrap(),
        };
        assert_eq!(
            serde_json::to_string(&non).unwrap(),
            r#"{"verdict":"noniso","witness":{"directed":false,"k":0,"n":1,"labels":[],"edges":[]},"lhs":"2","rhs":"1/2"}"#
        );
    }

    #[test]
    fn contraction_path_reports_class_matching() {
        let l = Limits::default();
        // Two twins of weight 1 versus one vertex of weight 2, each joined to a hub.
        let a = WeightedGraph::from_ints(
            q(),
            false,
            &[1, 1, 3],
            &[vec![0, 0, 1], vec![0, 0, 1], vec![1, 1, 0]],
        )
        .unwrap();
        let b = WeightedGraph::from_ints(q(), false, &[3, 2], &[vec![0, 1], vec![1, 0]]).unwrap();
        let v = decide_after_contraction(&a, &b, Mode::Both, &l).unwrap();
        assert!(v.certificate.is_iso());
        assert_eq!(v.class_matching.unwrap(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn canonical_key_identifies_isomorphic_graphs() {
        let l = Limits::default();
        let h = WeightedGraph::from_ints(
            q(),
            true,
            &[1, -1, 2],
            &[vec![0, 1, 2], vec![1, 1, -1], vec![2, 0, 0]],
        )
        .unwrap();
        let hp = h.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(
            canonical_weighted_key(&h, &l).unwrap(),
            canonical_weighted_key(&hp, &l).unwrap()
        );
        assert_ne!(
            canonical_weighted_key(&h, &l).unwrap(),
            canonical_weighted_key(&path3(), &l).unwrap()
        );
    }
}
