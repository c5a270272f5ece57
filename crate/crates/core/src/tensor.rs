//! Truncated connection matrices `N(k,H)`, `M(k,H)` and tensors `T(k,n,H)`,
//! exact ranks, orbit counts of `Aut(H)` on `V(H)^k`, and the rank and
//! column-space theorems checked on finite truncations.
//!
//! Rows of `N` are all maps `[k] → V(H)` in lexicographic order, so row `r`
//! is the tuple whose base-`m` digits (most significant first) spell `r`.
//! Entries of `M` and `T` come from the decomposition
//! `f_H(G_1⋯G_n) = Σ_φ α_φ ∏_r hom_φ(G_r, H)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Limits;
use crate::field::{FieldSpec, FieldValue};
use crate::graphs::{all_maps, map_count, simple_graphs, LabelMap, LabeledGraph, WeightedGraph};
use crate::hom::{alpha_product, hom_partial_with};
use crate::isomorphism::enumerate_automorphisms;
use crate::witness::{find_witness, WitnessOptions};

/// Rows indexed by label maps, columns by `k`-labeled graphs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedConnectionMatrix {
    pub k: usize,
    pub rows: Vec<LabelMap>,
    pub columns: Vec<LabeledGraph>,
    pub entries: Vec<Vec<FieldValue>>,
}

impl TruncatedConnectionMatrix {
    pub fn column(&self, c: usize) -> Vec<FieldValue> {
        self.entries.iter().map(|row| row[c].clone()).collect()
    }
}

/// `|columns|^n` entries in row-major order over column-index tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectionTensor {
    pub k: usize,
    pub n: usize,
    pub columns: Vec<LabeledGraph>,
    pub entries: Vec<FieldValue>,
}

impl ConnectionTensor {
    pub fn entry(&self, tuple: &[usize]) -> &FieldValue {
        let c = self.columns.len();
        &self.entries[tuple.iter().fold(0, |acc, &t| acc * c + t)]
    }

    /// Rows indexed by the first coordinate, columns by the remaining `n − 1`.
    pub fn mode1_unfolding(&self) -> Vec<Vec<FieldValue>> {
        if self.n == 0 {
            return vec![self.entries.clone()];
        }
        let c = self.columns.len();
        if c == 0 {
            return Vec::new();
        }
        let width = self.entries.len() / c;
        self.entries
            .chunks(width)
            .map(<[FieldValue]>::to_vec)
            .collect()
    }
}

fn check_entries(what: &'static str, count: u128, limits: &Limits) -> Result<()> {
    if count > limits.tensor_entries as u128 {
        return Err(Error::budget(what, count, limits.tensor_entries));
    }
    Ok(())
}

/// The truncation of `N(k,H)` to `columns`.
pub fn build_n(
    h: &WeightedGraph,
    k: usize,
    columns: &[LabeledGraph],
    limits: &Limits,
) -> Result<TruncatedConnectionMatrix> {
    if let Some(g) = columns.iter().find(|g| g.k() != k) {
        return Err(Error::ArityMismatch {
            expected: k,
            found: g.k(),
        });
    }
    let rows_count = map_count(k, h.order());
    check_entries(
        "connection matrix entries",
        rows_count.saturating_mul(columns.len() as u128),
        limits,
    )?;
    let rows: Vec<LabelMap> = all_maps(k, h.order()).collect();
    let entries = limits.exec.try_map(&rows, |phi| {
        columns
            .iter()
            .map(|g| hom_partial_with(g, h, phi, limits))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(TruncatedConnectionMatrix {
        k,
        rows,
        columns: columns.to_vec(),
        entries,
    })
}

/// `M` restricted to the columns of `n`: entry `(i,j)` is `f_H(G_i G_j)`.
pub fn build_m_from_n(
    h: &WeightedGraph,
    n: &TruncatedConnectionMatrix,
    limits: &Limits,
) -> Result<Vec<Vec<FieldValue>>> {
    let c = n.columns.len();
    check_entries(
        "connection matrix entries",
        (c as u128) * (c as u128),
        limits,
    )?;
    let weights: Vec<FieldValue> = n.rows.iter().map(|phi| alpha_product(h, phi)).collect();
    let spec = h.spec();
    Ok(limits.exec.map_range(c, |i| {
        (0..c)
            .map(|j| {
                let mut total = spec.zero();
                for (w, row) in weights.iter().zip(&n.entries) {
                    total += w * &row[i] * &row[j];
                }
                total
            })
            .collect()
    }))
}

pub fn build_m(
    h: &WeightedGraph,
    k: usize,
    columns: &[LabeledGraph],
    limits: &Limits,
) -> Result<Vec<Vec<FieldValue>>> {
    build_m_from_n(h, &build_n(h, k, columns, limits)?, limits)
}

/// The truncation of `T(k,n,H)` to `columns^n`.
pub fn build_t(
    h: &WeightedGraph,
    k: usize,
    n: usize,
    columns: &[LabeledGraph],
    limits: &Limits,
) -> Result<ConnectionTensor> {
    let c = columns.len();
    let count = (c as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    check_entries("connection tensor entries", count, limits)?;
    let nm = build_n(h, k, columns, limits)?;
    let weights: Vec<FieldValue> = nm.rows.iter().map(|phi| alpha_product(h, phi)).collect();
    let spec = h.spec();
    let entries = limits.exec.map_range(count as usize, |flat| {
        let mut tuple = vec![0usize; n];
        let mut rest = flat;
        for slot in tuple.iter_mut().rev() {
            *slot = rest % c;
            rest /= c;
        }
        let mut total = spec.zero();
        for (w, row) in weights.iter().zip(&nm.entries) {
            let mut term = w.clone();
            for &t in &tuple {
                if term.is_zero() {
                    break;
                }
                term *= &row[t];
            }
            total += term;
        }
        total
    });
    Ok(ConnectionTensor {
        k,
        n,
        columns: columns.to_vec(),
        entries,
    })
}

/// Row-echelon basis built one vector at a time.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    /// `(pivot, vector)` with the pivot entry equal to one.
    rows: Vec<(usize, Vec<FieldValue>)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        EchelonBasis { rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent of the basis; returns whether it was.
    pub fn insert(&mut self, v: &[FieldValue]) -> bool {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = &*x - &(&f * r);
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero pivot");
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        self.rows.push((p, v));
        true
    }
}

impl Default for EchelonBasis {
    fn default() -> Self {
        EchelonBasis::new()
    }
}

/// Exact rank by Gaussian elimination.
pub fn rank(matrix: &[Vec<FieldValue>]) -> usize {
    independent_rows(matrix).len()
}

/// Indices of the rows kept by greedy elimination in order; they form a basis of the row space.
pub fn independent_rows(matrix: &[Vec<FieldValue>]) -> Vec<usize> {
    let mut basis = EchelonBasis::new();
    matrix
        .iter()
        .enumerate()
        .filter(|(_, row)| basis.insert(row))
        .map(|(i, _)| i)
        .collect()
}

fn transpose(matrix: &[Vec<FieldValue>]) -> Vec<Vec<FieldValue>> {
    let cols = matrix.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| matrix.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Orbit of every tuple in `V(H)^k` (row order of `N`) under `Aut(H)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orbits {
    pub count: usize,
    /// Orbit index of each tuple, numbered by first occurrence.
    pub orbit_of: Vec<usize>,
}

pub fn orbits(h: &WeightedGraph, k: usize, limits: &Limits) -> Result<Orbits> {
    let m = h.order();
    let total = map_count(k, m);
    if total > limits.map_enumeration as u128 {
        return Err(Error::budget(
            "k-tuples for orbit counting",
            total,
            limits.map_enumeration,
        ));
    }
    let total = total as usize;
    let auts = enumerate_automorphisms(h, limits)?;
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (idx, phi) in all_maps(k, m).enumerate() {
        for sigma in &auts {
            let image = phi
                .targets()
                .iter()
                .fold(0usize, |acc, &v| acc * m + sigma.forward()[v]);
            let (a, b) = (find(&mut parent, idx), find(&mut parent, image));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut label = vec![usize::MAX; total];
    let mut orbit_of = Vec::with_capacity(total);
    let mut count = 0;
    for x in 0..total {
        let r = find(&mut parent, x);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        orbit_of.push(label[r]);
    }
    Ok(Orbits { count, orbit_of })
}

/// `orb_k(H)`.
pub fn orbit_count(h: &WeightedGraph, k: usize, limits: &Limits) -> Result<usize> {
    Ok(orbits(h, k, limits)?.count)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankOptions {
    /// Largest unlabeled-vertex count among simple column graphs.
    pub max_free: usize,
    /// Tensor order used for the unfolding check.
    pub tensor_order: usize,
    /// Rounds of pairwise glue products in the family tier.
    pub product_rounds: usize,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            max_free: 3,
            tensor_order: 3,
            product_rounds: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TierRecord {
    /// `"simple:<free>"` or `"family"`.
    pub tier: String,
    pub columns_added: usize,
    pub rank_n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub k: usize,
    pub m: usize,
    pub characteristic: u64,
    pub orbit_count: usize,
    /// `m^k`.
    pub bound: u128,
    pub rank_n: usize,
    pub rank_m: usize,
    pub tensor_order: usize,
    pub rank_t_unfolding: usize,
    /// Rows of the final `N` coincide exactly when their tuples share an orbit.
    pub row_classes_match_orbits: bool,
    /// The last tier added no rank and the rank equals the orbit count.
    pub stabilized: bool,
    pub tiers: Vec<TierRecord>,
    pub columns: Vec<LabeledGraph>,
    /// Characteristic 0: `rank N = rank M = orb_k` and the unfolding rank equals `rank M`.
    /// Characteristic `p`: `rank M ≤ rank N ≤ orb_k`.
    /// Both: every rank is at most `m^k`.
    pub holds: bool,
}

/// Columns grown in tiers with an incremental basis for `N`.
struct ColumnGrowth<'a> {
    h: &'a WeightedGraph,
    k: usize,
    rows: Vec<LabelMap>,
    limits: &'a Limits,
    columns: Vec<LabeledGraph>,
    values: Vec<Vec<FieldValue>>,
    basis: EchelonBasis,
    pivots: Vec<usize>,
}

impl<'a> ColumnGrowth<'a> {
    fn new(h: &'a WeightedGraph, k: usize, limits: &'a Limits) -> Result<Self> {
        let rows_count = map_count(k, h.order());
        check_entries("connection matrix rows", rows_count, limits)?;
        Ok(ColumnGrowth {
            h,
            k,
            rows: all_maps(k, h.order()).collect(),
            limits,
            columns: Vec::new(),
            values: Vec::new(),
            basis: EchelonBasis::new(),
            pivots: Vec::new(),
        })
    }

    fn add(&mut self, graphs: &[LabeledGraph]) -> Result<usize> {
        let total = (self.columns.len() + graphs.len()) as u128 * self.rows.len() as u128;
        check_entries("connection matrix entries", total, self.limits)?;
        let (h, rows, limits) = (self.h, &self.rows, self.limits);
        let cols = limits.exec.try_map(graphs, |g| {
            rows.iter()
                .map(|phi| hom_partial_with(g, h, phi, limits))
                .collect::<Result<Vec<_>>>()
        })?;
        let before = self.basis.rank();
        for (g, col) in graphs.iter().zip(cols) {
            if self.basis.insert(&col) {
                self.pivots.push(self.columns.len());
            }
            self.columns.push(g.clone());
            self.values.push(col);
        }
        Ok(self.basis.rank() - before)
    }

    fn rank(&self) -> usize {
        self.basis.rank()
    }

    /// Row `r` of the current truncation.
    fn row(&self, r: usize) -> Vec<&FieldValue> {
        self.values.iter().map(|c| &c[r]).collect()
    }

    fn matrix(&self) -> TruncatedConnectionMatrix {
        TruncatedConnectionMatrix {
            k: self.k,
            rows: self.rows.clone(),
            columns: self.columns.clone(),
            entries: transpose(&self.values),
        }
    }

    fn pivot_matrix(&self) -> TruncatedConnectionMatrix {
        let cols: Vec<Vec<FieldValue>> = self
            .pivots
            .iter()
            .map(|&p| self.values[p].clone())
            .collect();
        TruncatedConnectionMatrix {
            k: self.k,
            rows: self.rows.clone(),
            columns: self
                .pivots
                .iter()
                .map(|&p| self.columns[p].clone())
                .collect(),
            entries: if cols.is_empty() {
                vec![Vec::new(); self.rows.len()]
            } else {
                transpose(&cols)
            },
        }
    }

    /// Separating witnesses for equal rows in different orbits, then glue
    /// products of pivot columns until the rank stops growing.
    fn family_tier(&mut self, orbits: &Orbits, product_rounds: usize) -> Result<usize> {
        let before = self.rank();
        let mut extra = Vec::new();
        let mut seen_pairs = std::collections::HashSet::new();
        for a in 0..self.rows.len() {
            for b in (a + 1)..self.rows.len() {
                let pair = (orbits.orbit_of[a], orbits.orbit_of[b]);
                if pair.0 == pair.1 || !seen_pairs.insert(pair) || self.row(a) != self.row(b) {
                    continue;
                }
                let w = find_witness(
                    self.h,
                    self.h,
                    &self.rows[a],
                    &self.rows[b],
                    &WitnessOptions::default(),
                    self.limits,
                )?;
                if let Some(w) = w {
                    extra.push(w.graph);
                }
            }
        }
        self.add(&extra)?;
        for _ in 0..product_rounds {
            let piv: Vec<LabeledGraph> = self
                .pivots
                .iter()
                .map(|&p| self.columns[p].clone())
                .collect();
            let mut products = Vec::new();
            for i in 0..piv.len() {
                for j in i..piv.len() {
                    products.push(piv[i].glue(&piv[j])?);
                }
            }
            if self.add(&products)? == 0 {
                break;
            }
        }
        Ok(self.rank() - before)
    }
}

/// Checks `rank N = rank M = orb_k(H)` (characteristic 0, `H` twin-free) or
/// the chain `rank M ≤ rank N ≤ orb_k(H)` (characteristic `p`) on a column
/// truncation grown by unlabeled-vertex count.
pub fn verify_rank_theorem(
    h: &WeightedGraph,
    k: usize,
    options: &RankOptions,
    limits: &Limits,
) -> Result<RankReport> {
    let orbits = orbits(h, k, limits)?;
    let orb = orbits.count;
    let char0 = h.spec().is_rationals();
    let mut growth = ColumnGrowth::new(h, k, limits)?;
    let mut tiers = Vec::new();
    let mut stabilized = false;
    for free in 0..=options.max_free {
        let graphs = simple_graphs(k, free, h.is_directed())?;
        let added = growth.add(&graphs)?;
        tiers.push(TierRecord {
            tier: format!("simple:{free}"),
            columns_added: graphs.len(),
            rank_n: growth.rank(),
        });
        if free > 0 && added == 0 && growth.rank() == orb {
            stabilized = true;
            break;
        }
    }
    if !stabilized && char0 {
        for _ in 0..3 {
            let before = growth.columns.len();
            let added = growth.family_tier(&orbits, options.product_rounds)?;
            tiers.push(TierRecord {
                tier: "family".into(),
                columns_added: growth.columns.len() - before,
                rank_n: growth.rank(),
            });
            if added == 0 {
                stabilized = growth.rank() == orb;
                break;
            }
        }
    }
    let rank_n = growth.rank();
    let pivot = growth.pivot_matrix();
    let rank_m = rank(&build_m_from_n(h, &pivot, limits)?);
    let tensor = build_t(h, k, options.tensor_order, &pivot.columns, limits)?;
    let rank_t = rank(&tensor.mode1_unfolding());
    let full = growth.matrix();
    let row_classes_match_orbits = (0..full.rows.len()).all(|a| {
        (0..full.rows.len()).all(|b| {
            (full.entries[a] == full.entries[b]) == (orbits.orbit_of[a] == orbits.orbit_of[b])
        })
    });
    let bound = map_count(k, h.order());
    let within_bound = [rank_n, rank_m, rank_t].iter().all(|&r| r as u128 <= bound);
    let holds = within_bound
        && if char0 {
            rank_n == orb && rank_m == orb && rank_t == rank_m
        } else {
            rank_m <= rank_n && rank_n <= orb
        };
    Ok(RankReport {
        k,
        m: h.order(),
        characteristic: h.spec().characteristic(),
        orbit_count: orb,
        bound,
        rank_n,
        rank_m,
        tensor_order: options.tensor_order,
        rank_t_unfolding: rank_t,
        row_classes_match_orbits,
        stabilized,
        tiers,
        columns: full.columns,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnSpaceReport {
    pub k: usize,
    pub orbit_count: usize,
    /// Every column is constant on each orbit of `Aut(H)` on `V(H)^k`.
    pub columns_invariant: bool,
    /// Dimension of the span of the simple columns.
    pub span_dimension: usize,
    /// Dimension after adjoining all orbit indicator vectors.
    pub span_with_indicators: usize,
    pub columns: Vec<LabeledGraph>,
    /// The simple columns span exactly the `Aut(H)`-invariant vectors.
    pub holds: bool,
}

/// Every column of `N` lies in the `Aut(H)`-invariant subspace of `F^{V(H)^k}`,
/// and the simple columns span all of it. Columns come from the rank theorem's growth.
pub fn verify_column_space(
    h: &WeightedGraph,
    k: usize,
    options: &RankOptions,
    limits: &Limits,
) -> Result<ColumnSpaceReport> {
    let report = verify_rank_theorem(h, k, options, limits)?;
    verify_column_space_on(h, k, report.columns, limits)
}

/// The column-space check on a given column set.
pub fn verify_column_space_on(
    h: &WeightedGraph,
    k: usize,
    columns: Vec<LabeledGraph>,
    limits: &Limits,
) -> Result<ColumnSpaceReport> {
    let orbits = orbits(h, k, limits)?;
    let n = build_n(h, k, &columns, limits)?;
    let columns_invariant = (0..n.columns.len()).all(|c| {
        let mut value: Vec<Option<&FieldValue>> = vec![None; orbits.count];
        n.entries
            .iter()
            .zip(&orbits.orbit_of)
            .all(|(row, &o)| match value[o] {
                Some(v) => *v == row[c],
                None => {
                    value[o] = Some(&row[c]);
                    true
                }
            })
    });
    let spec: FieldSpec = h.spec();
    let mut basis = EchelonBasis::new();
    for c in 0..n.columns.len() {
        basis.insert(&n.column(c));
    }
    let span_dimension = basis.rank();
    for o in 0..orbits.count {
        let indicator: Vec<FieldValue> = orbits
            .orbit_of
            .iter()
            .map(|&x| if x == o { spec.one() } else { spec.zero() })
            .collect();
        basis.insert(&indicator);
    }
    let span_with_indicators = basis.rank();
    let all_simple = columns.iter().all(LabeledGraph::is_simple);
    let holds = columns_invariant
        && all_simple
        && span_dimension == orbits.count
        && span_with_indicators == orbits.count;
    Ok(ColumnSpaceReport {
        k,
        orbit_count: orbits.count,
        columns_invariant,
        span_dimension,
        span_with_indicators,
        columns,
        holds,
    })
}
