use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use super::LabeledGraph;
use crate::error::{Error, Result};

/// Largest number of raw edge assignments scanned for one catalog tier.
const RAW_LIMIT: u128 = 1 << 21;

type Key = (usize, usize, bool);

fn cache() -> &'static Mutex<HashMap<Key, Arc<Vec<LabeledGraph>>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<LabeledGraph>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// One representative per isomorphism class of simple `k`-labeled graphs with
/// exactly `free` unlabeled vertices, in first-occurrence order of a fixed
/// enumeration. Results are cached per `(k, free, directed)`.
pub fn simple_graphs(k: usize, free: usize, directed: bool) -> Result<Arc<Vec<LabeledGraph>>> {
    if let Some(hit) = cache()
        .lock()
        .expect("catalog lock")
        .get(&(k, free, directed))
    {
        return Ok(hit.clone());
    }
    let built = Arc::new(enumerate(k, free, directed)?);
    cache()
        .lock()
        .expect("catalog lock")
        .insert((k, free, directed), built.clone());
    Ok(built)
}

/// All tiers `0..=max_free` concatenated in tier order.
pub fn simple_graphs_up_to(k: usize, max_free: usize, directed: bool) -> Result<Vec<LabeledGraph>> {
    let mut out = Vec::new();
    for t in 0..=max_free {
        out.extend(simple_graphs(k, t, directed)?.iter().cloned());
    }
    Ok(out)
}

fn enumerate(k: usize, free: usize, directed: bool) -> Result<Vec<LabeledGraph>> {
    let n = k + free;
    // Every slot is one vertex pair that may carry an edge; no slot joins two labels.
    let mut slots: Vec<(usize, usize)> = Vec::new();
    for v in k..n {
        for u in 0..v {
            slots.push((u, v));
        }
    }
    let radix: u128 = if directed { 3 } else { 2 };
    let raw = radix.checked_pow(slots.len() as u32).unwrap_or(u128::MAX);
    if raw > RAW_LIMIT {
        return Err(Error::Budget {
            what: "simple graph catalog",
            needed: raw,
            limit: RAW_LIMIT,
        });
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut digits = vec![0u8; slots.len()];
    loop {
        let edges = slots
            .iter()
            .zip(&digits)
            .filter(|(_, &d)| d > 0)
            .map(|(&(u, v), &d)| if d == 1 { (u, v, 1) } else { (v, u, 1) });
        let g = LabeledGraph::new(directed, k, n, edges).expect("catalog edges are valid");
        if seen.insert(g.canonical_form()) {
            out.push(g);
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(out);
            }
            digits[i] += 1;
            if (digits[i] as u128) < radix {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}
