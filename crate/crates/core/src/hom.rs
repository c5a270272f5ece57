//! Exact homomorphism sums `hom(G, H)` and partial sums `hom_ψ(G, H)`.
//!
//! Pinned vertices contribute no vertex weight. Free vertices are split into
//! connected components of the free-free edge graph; each component is
//! enumerated depth-first in vertex-index order with incremental partial
//! products and zero pruning, and the component sums are multiplied.

use crate::error::{Error, Result};
use crate::exec::{Exec, Limits};
use crate::field::FieldValue;
use crate::graphs::{all_maps, map_count, LabelMap, LabeledGraph, WeightedGraph};

/// Value type of homomorphism sums; it lives in the field of `H`.
pub type HomValue = FieldValue;

/// Component sizes at or above which `Exec::Parallel` splits the first vertex.
const PARALLEL_MIN_LEAVES: u128 = 1 << 12;

pub fn hom(g: &LabeledGraph, h: &WeightedGraph) -> Result<HomValue> {
    hom_with(g, h, &Limits::default())
}

/// `hom(G, H)`; labels of `G` are ignored.
pub fn hom_with(g: &LabeledGraph, h: &WeightedGraph, limits: &Limits) -> Result<HomValue> {
    check_directed(g, h)?;
    evaluate(g, h, &[], limits)
}

pub fn hom_partial(g: &LabeledGraph, h: &WeightedGraph, psi: &LabelMap) -> Result<HomValue> {
    hom_partial_with(g, h, psi, &Limits::default())
}

/// `hom_ψ(G, H)`: the sum over maps extending `ψ`, without the weights of the
/// labeled vertices.
pub fn hom_partial_with(
    g: &LabeledGraph,
    h: &WeightedGraph,
    psi: &LabelMap,
    limits: &Limits,
) -> Result<HomValue> {
    check_directed(g, h)?;
    if psi.k() != g.k() {
        return Err(Error::ArityMismatch {
            expected: g.k(),
            found: psi.k(),
        });
    }
    psi.check_range(h.order())?;
    evaluate(g, h, psi.targets(), limits)
}

/// `α_ψ = ∏_i α(ψ(i))`.
pub fn alpha_product(h: &WeightedGraph, psi: &LabelMap) -> FieldValue {
    let mut acc = h.spec().one();
    for &t in psi.targets() {
        acc *= h.alpha(t);
    }
    acc
}

/// Whether `hom(G,H) = Σ_ψ α_ψ hom_ψ(G,H)` holds exactly.
pub fn hom_decomposition_check(g: &LabeledGraph, h: &WeightedGraph) -> Result<bool> {
    let limits = Limits::default();
    let whole = hom_with(g, h, &limits)?;
    let mut total = h.spec().zero();
    for psi in all_maps(g.k(), h.order()) {
        total += alpha_product(h, &psi) * hom_partial_with(g, h, &psi, &limits)?;
    }
    Ok(whole == total)
}

/// `∏_i hom_ψ(G_i, H)^{h_i}` without building the product graph.
pub fn hom_power_product(
    gs: &[LabeledGraph],
    hs: &[u64],
    h: &WeightedGraph,
    psi: &LabelMap,
) -> Result<HomValue> {
    if gs.len() != hs.len() {
        return Err(Error::ArityMismatch {
            expected: gs.len(),
            found: hs.len(),
        });
    }
    let limits = Limits::default();
    let mut acc = h.spec().one();
    for (g, &e) in gs.iter().zip(hs) {
        if e > 0 {
            acc *= &hom_partial_with(g, h, psi, &limits)?.pow(e);
        }
    }
    Ok(acc)
}

fn check_directed(g: &LabeledGraph, h: &WeightedGraph) -> Result<()> {
    if g.is_directed() != h.is_directed() {
        return Err(Error::DirectednessMismatch);
    }
    Ok(())
}

/// Free vertices of one component, with edges to earlier members and the
/// per-target weight `α_t · ∏ (edges to pinned vertices)`.
struct Component<'a> {
    h: &'a WeightedGraph,
    unary: Vec<Vec<FieldValue>>,
    /// For member `i`: `(j < i, mult i→j, mult j→i)`.
    back: Vec<Vec<(usize, u64, u64)>>,
}

impl Component<'_> {
    fn sum_from(&self, level: usize, assign: &mut [usize]) -> FieldValue {
        let h = self.h;
        let mut acc = h.spec().zero();
        for t in 0..h.order() {
            let unary = &self.unary[level][t];
            if unary.is_zero() {
                continue;
            }
            let mut f = unary.clone();
            for &(j, out, inn) in &self.back[level] {
                let s = assign[j];
                if out > 0 {
                    f = edge_factor(&f, h.beta(t, s), out);
                }
                if inn > 0 && !f.is_zero() {
                    f = edge_factor(&f, h.beta(s, t), inn);
                }
                if f.is_zero() {
                    break;
                }
            }
            if f.is_zero() {
                continue;
            }
            if level + 1 == self.unary.len() {
                acc += f;
            } else {
                assign[level] = t;
                acc += f * self.sum_from(level + 1, assign);
            }
        }
        acc
    }

    fn total(&self, exec: Exec) -> FieldValue {
        let size = self.unary.len();
        let leaves = map_count(size, self.h.order());
        if exec == Exec::Parallel && size > 1 && leaves >= PARALLEL_MIN_LEAVES {
            let parts = exec.map_range(self.h.order(), |t| {
                let unary = &self.unary[0][t];
                if unary.is_zero() {
                    return self.h.spec().zero();
                }
                let mut assign = vec![0; size];
                assign[0] = t;
                unary * &self.sum_from(1, &mut assign)
            });
            crate::field::sum(self.h.spec(), &parts)
        } else {
            self.sum_from(0, &mut vec![0; size])
        }
    }
}

fn edge_factor(f: &FieldValue, beta: &FieldValue, mult: u64) -> FieldValue {
    if mult == 1 {
        f * beta
    } else {
        f * &beta.pow(mult)
    }
}

fn evaluate(
    g: &LabeledGraph,
    h: &WeightedGraph,
    pinned: &[usize],
    limits: &Limits,
) -> Result<FieldValue> {
    let spec = h.spec();
    let m = h.order();
    let p = pinned.len();
    let n = g.n();
    let free = n - p;

    let mut constant = spec.one();
    // Directed multiplicities between free vertices, and pinned-edge lists per free vertex.
    let mut free_adj: Vec<Vec<(usize, u64, u64)>> = vec![Vec::new(); free];
    let mut to_pinned: Vec<Vec<(usize, u64, u64)>> = vec![Vec::new(); free];
    for (u, v, mult) in g.edges() {
        match (u < p, v < p) {
            (true, true) => constant *= &h.beta(pinned[u], pinned[v]).pow(mult),
            (false, true) => to_pinned[u - p].push((pinned[v], mult, 0)),
            (true, false) => to_pinned[v - p].push((pinned[u], 0, mult)),
            (false, false) => {
                let (a, b) = (u - p, v - p);
                free_adj[a].push((b, mult, 0));
                free_adj[b].push((a, 0, mult));
            }
        }
    }
    if constant.is_zero() {
        return Ok(constant);
    }

    let components = components(&free_adj);
    let mut cost: u128 = 0;
    for comp in &components {
        let edges: usize = comp
            .iter()
            .map(|&v| free_adj[v].len() + to_pinned[v].len())
            .sum();
        cost = cost.saturating_add(
            map_count(comp.len(), m).saturating_mul(comp.len() as u128 + edges as u128),
        );
    }
    if cost > limits.hom_ops as u128 {
        return Err(Error::budget(
            "homomorphism enumeration",
            cost,
            limits.hom_ops,
        ));
    }

    let mut result = constant;
    for comp in components {
        let mut level_of = vec![usize::MAX; free];
        for (i, &v) in comp.iter().enumerate() {
            level_of[v] = i;
        }
        let unary = comp
            .iter()
            .map(|&v| {
                (0..m)
                    .map(|t| {
                        let mut w = h.alpha(t).clone();
                        for &(s, out, inn) in &to_pinned[v] {
                            if out > 0 {
                                w = edge_factor(&w, h.beta(t, s), out);
                            }
                            if inn > 0 {
                                w = edge_factor(&w, h.beta(s, t), inn);
                            }
                        }
                        w
                    })
                    .collect()
            })
            .collect();
        let back = comp
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut b: Vec<(usize, u64, u64)> = Vec::new();
                for &(u, out, inn) in &free_adj[v] {
                    let j = level_of[u];
                    if j < i {
                        match b.iter_mut().find(|e| e.0 == j) {
                            Some(e) => {
                                e.1 += out;
                                e.2 += inn;
                            }
                            None => b.push((j, out, inn)),
                        }
                    }
                }
                b
            })
            .collect();
        let total = Component { h, unary, back }.total(limits.exec);
        if total.is_zero() {
            return Ok(total);
        }
        result *= &total;
    }
    Ok(result)
}

/// Connected components of the free-vertex graph, each sorted by index, ordered by minimum.
fn components(adj: &[Vec<(usize, u64, u64)>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut i = 0;
        while i < comp.len() {
            for &(u, _, _) in &adj[comp[i]] {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}
