//! Seeded generators for field values, target graphs and pattern graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{FieldSpec, FieldValue};
use crate::graphs::{LabelMap, LabeledGraph, WeightedGraph};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational `a/b` with `|a| ≤ 6`, `1 ≤ b ≤ 4`, or a uniform residue.
pub fn field_value(rng: &mut TestRng, spec: FieldSpec) -> FieldValue {
    if spec.is_rationals() {
        let num = rng.gen_range(-6i64..=6);
        let den = rng.gen_range(1i64..=4);
        spec.from_i64(num)
            .try_div(&spec.from_i64(den))
            .expect("nonzero denominator")
    } else {
        spec.from_i64(rng.gen_range(0..spec.characteristic() as i64))
    }
}

pub fn nonzero_field_value(rng: &mut TestRng, spec: FieldSpec) -> FieldValue {
    loop {
        let v = field_value(rng, spec);
        if !v.is_zero() {
            return v;
        }
    }
}

/// Weights drawn from `palette`; vertex weights that are zero in the field are redrawn.
pub fn weighted_graph(
    rng: &mut TestRng,
    spec: FieldSpec,
    m: usize,
    directed: bool,
    palette: &[i64],
) -> WeightedGraph {
    let nonzero: Vec<i64> = palette
        .iter()
        .copied()
        .filter(|&v| !spec.from_i64(v).is_zero())
        .collect();
    let alpha: Vec<FieldValue> = (0..m)
        .map(|_| spec.from_i64(*nonzero.choose(rng).expect("palette has a nonzero value")))
        .collect();
    let mut beta = vec![vec![spec.zero(); m]; m];
    for i in 0..m {
        for j in 0..m {
            if directed || j >= i {
                let v = spec.from_i64(*palette.choose(rng).expect("nonempty palette"));
                beta[i][j] = v.clone();
                if !directed {
                    beta[j][i] = v;
                }
            }
        }
    }
    WeightedGraph::new(spec, directed, alpha, beta).expect("valid by construction")
}

/// Arbitrary field weights (vertex weights nonzero).
pub fn generic_weighted_graph(
    rng: &mut TestRng,
    spec: FieldSpec,
    m: usize,
    directed: bool,
) -> WeightedGraph {
    let alpha: Vec<FieldValue> = (0..m).map(|_| nonzero_field_value(rng, spec)).collect();
    let mut beta = vec![vec![spec.zero(); m]; m];
    for i in 0..m {
        for j in 0..m {
            if directed || j >= i {
                let v = field_value(rng, spec);
                beta[i][j] = v.clone();
                if !directed {
                    beta[j][i] = v;
                }
            }
        }
    }
    WeightedGraph::new(spec, directed, alpha, beta).expect("valid by construction")
}

/// A multigraph with `k` labels and `n ≥ k` vertices; each vertex pair carries
/// an edge with probability one half and multiplicity up to `max_mult`.
pub fn labeled_graph(
    rng: &mut TestRng,
    k: usize,
    n: usize,
    directed: bool,
    max_mult: u64,
) -> LabeledGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v || (!directed && v < u) {
                continue;
            }
            if rng.gen_bool(0.5) {
                edges.push((u, v, rng.gen_range(1..=max_mult)));
            }
        }
    }
    LabeledGraph::new(directed, k, n, edges).expect("valid by construction")
}

pub fn label_map(rng: &mut TestRng, k: usize, m: usize) -> LabelMap {
    LabelMap::new((0..k).map(|_| rng.gen_range(0..m)).collect())
}

pub fn permutation(rng: &mut TestRng, m: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..m).collect();
    p.shuffle(rng);
    p
}
