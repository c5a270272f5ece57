//! Twin classes and the twin contraction `H̃`.
//!
//! Vertices `i` and `j` are twins when `β(i,ℓ) = β(j,ℓ)` and `β(ℓ,i) = β(ℓ,j)`
//! for every `ℓ`; vertex weights play no role. Contraction keeps one vertex per
//! class carrying the class weight sum and drops classes whose sum is zero.

use std::collections::HashMap;

use serde::Serialize;

use crate::field::{self, FieldValue};
use crate::graphs::WeightedGraph;

/// Classes are sorted internally and ordered by their smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwinPartition {
    pub classes: Vec<Vec<usize>>,
}

impl TwinPartition {
    /// The class index of every vertex.
    pub fn class_of(&self) -> Vec<usize> {
        let m = self.classes.iter().map(Vec::len).sum();
        let mut out = vec![0; m];
        for (c, class) in self.classes.iter().enumerate() {
            for &v in class {
                out[v] = c;
            }
        }
        out
    }
}

pub fn twin_partition(h: &WeightedGraph) -> TwinPartition {
    let m = h.order();
    let mut index: HashMap<(Vec<&FieldValue>, Vec<&FieldValue>), usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        let row: Vec<_> = (0..m).map(|l| h.beta(i, l)).collect();
        let col: Vec<_> = (0..m).map(|l| h.beta(l, i)).collect();
        let next = classes.len();
        let c = *index.entry((row, col)).or_insert(next);
        if c == next {
            classes.push(Vec::new());
        }
        classes[c].push(i);
    }
    TwinPartition { classes }
}

pub fn is_twin_free(h: &WeightedGraph) -> bool {
    twin_partition(h).classes.len() == h.order()
}

/// `H̃`, together with the contracted index of every original vertex
/// (`None` when its class was removed for having zero weight sum).
pub fn contract_with_map(h: &WeightedGraph) -> (WeightedGraph, Vec<Option<usize>>) {
    let partition = twin_partition(h);
    let mut keep = Vec::new();
    let mut weights = Vec::new();
    let mut image = vec![None; h.order()];
    for class in &partition.classes {
        let w = field::sum(h.spec(), class.iter().map(|&v| h.alpha(v)));
        if w.is_zero() {
            continue;
        }
        for &v in class {
            image[v] = Some(keep.len());
        }
        keep.push(class[0]);
        weights.push(w);
    }
    let induced = h.induced(&keep);
    let beta = induced.beta_rows().to_vec();
    let contracted = WeightedGraph::new(h.spec(), h.is_directed(), weights, beta)
        .expect("class sums are nonzero and induced weights keep symmetry");
    (contracted, image)
}

pub fn contract(h: &WeightedGraph) -> WeightedGraph {
    contract_with_map(h).0
}
