//! Target graphs `H`, labeled pattern graphs `G`, and label maps.

mod canonical;
mod catalog;
mod labeled;
mod weighted;

use serde::Serialize;

pub use catalog::{simple_graphs, simple_graphs_up_to};
pub use labeled::{LabeledGraph, LabeledGraphJson};
pub use weighted::{WeightedGraph, WeightedGraphJson};

use crate::error::{Error, Result};

/// Module-level convenience for [`LabeledGraph::glue`].
pub fn glue(g1: &LabeledGraph, g2: &LabeledGraph) -> Result<LabeledGraph> {
    g1.glue(g2)
}

/// A map `[k] → V(H)`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LabelMap(Vec<usize>);

impl LabelMap {
    pub fn new(targets: Vec<usize>) -> Self {
        LabelMap(targets)
    }

    /// The unique map out of `[0]`.
    pub fn empty() -> Self {
        LabelMap(Vec::new())
    }

    /// The map sending every label in `[k]` to `v`.
    pub fn constant(k: usize, v: usize) -> Self {
        LabelMap(vec![v; k])
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn targets(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    /// Fails unless every target is a vertex of a graph with `m` vertices.
    pub fn check_range(&self, m: usize) -> Result<()> {
        match self.0.iter().find(|&&t| t >= m) {
            Some(&t) => Err(Error::InvalidSpec(format!(
                "label target {} outside a {m}-vertex graph",
                t + 1
            ))),
            None => Ok(()),
        }
    }

    /// `f ∘ self`.
    pub fn compose(&self, f: &[usize]) -> LabelMap {
        LabelMap(self.0.iter().map(|&t| f[t]).collect())
    }

    /// `|self^{-1}(v)|` for every `v < m`.
    pub fn fibre_sizes(&self, m: usize) -> Vec<usize> {
        let mut sizes = vec![0; m];
        for &t in &self.0 {
            sizes[t] += 1;
        }
        sizes
    }

    /// Whether `other` restricted to `[self.k()]` equals `self`.
    pub fn is_prefix_of(&self, other: &LabelMap) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Parses `"i:v,..."` with 1-based labels and vertices; every label in
    /// `1..=n` must occur exactly once.
    pub fn parse_pins(s: &str) -> Result<LabelMap> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(LabelMap::empty());
        }
        let mut pairs = Vec::new();
        for part in s.split(',') {
            let (i, v) = part.split_once(':').ok_or_else(|| {
                Error::Parse(format!("pin {part:?} is not of the form label:vertex"))
            })?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&x| x >= 1)
                    .ok_or_else(|| Error::Parse(format!("{x:?} is not a positive integer")))
            };
            pairs.push((parse(i)? - 1, parse(v)? - 1));
        }
        let mut targets = vec![usize::MAX; pairs.len()];
        for (i, v) in pairs {
            if i >= targets.len() || targets[i] != usize::MAX {
                return Err(Error::Parse(format!(
                    "labels must be exactly 1..={}",
                    targets.len()
                )));
            }
            targets[i] = v;
        }
        Ok(LabelMap(targets))
    }
}

/// Every map `[k] → [m]` in lexicographic order (last label varies fastest).
pub fn all_maps(k: usize, m: usize) -> impl Iterator<Item = LabelMap> {
    let total = map_count(k, m);
    let mut current = if total == 0 {
        None
    } else {
        Some(vec![0usize; k])
    };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = current.as_mut().expect("present");
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < m {
                break;
            }
            next[i] = 0;
        }
        Some(LabelMap(out))
    })
}

/// `m^k`, saturating.
pub fn map_count(k: usize, m: usize) -> u128 {
    (m as u128).checked_pow(k as u32).unwrap_or(u128::MAX)
}

impl From<Vec<usize>> for LabelMap {
    fn from(v: Vec<usize>) -> Self {
        LabelMap(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pins() {
        assert_eq!(
            LabelMap::parse_pins("2:3, 1:1").unwrap(),
            LabelMap::new(vec![0, 2])
        );
        assert_eq!(LabelMap::parse_pins("").unwrap(), LabelMap::empty());
        assert!(LabelMap::parse_pins("1:1,1:2").is_err());
        assert!(LabelMap::parse_pins("1:1,3:2").is_err());
        assert!(LabelMap::parse_pins("0:1").is_err());
        assert!(LabelMap::parse_pins("1-1").is_err());
    }

    #[test]
    fn map_enumeration() {
        let maps: Vec<_> = all_maps(2, 2).map(|m| m.targets().to_vec()).collect();
        assert_eq!(maps, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(all_maps(0, 0).count(), 1);
        assert_eq!(all_maps(2, 0).count(), 0);
        assert_eq!(all_maps(3, 3).count() as u128, map_count(3, 3));
    }

    #[test]
    fn fibres_and_composition() {
        let phi = LabelMap::new(vec![0, 2, 2]);
        assert_eq!(phi.fibre_sizes(3), vec![1, 0, 2]);
        assert_eq!(phi.compose(&[1, 2, 0]), LabelMap::new(vec![1, 0, 0]));
        assert!(phi.check_range(3).is_ok());
        assert!(phi.check_range(2).is_err());
        assert!(LabelMap::new(vec![0]).is_prefix_of(&phi));
    }
}
