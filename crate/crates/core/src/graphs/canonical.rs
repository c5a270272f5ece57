//! Brute-force canonical labeling of small labeled multigraphs.
//!
//! Labeled vertices keep their positions. Free vertices are sorted by an
//! isomorphism-invariant key, and only orderings that respect the resulting
//! cells are tried; the lexicographically least adjacency code wins.

use super::LabeledGraph;

type Invariant = (u64, u64, Vec<(u64, u64)>, Vec<(u64, u64)>);

fn adjacency(g: &LabeledGraph) -> Vec<Vec<u64>> {
    let n = g.n();
    let mut a = vec![vec![0u64; n]; n];
    for (u, v, m) in g.edges() {
        a[u][v] += m;
        if !g.is_directed() {
            a[v][u] += m;
        }
    }
    a
}

fn invariant(a: &[Vec<u64>], k: usize, v: usize) -> Invariant {
    let n = a.len();
    let out: u64 = a[v].iter().sum();
    let inn: u64 = (0..n).map(|u| a[u][v]).sum();
    let labels = (0..k).map(|l| (a[v][l], a[l][v])).collect();
    let mut neighbours: Vec<(u64, u64)> = (k..n)
        .filter(|&u| u != v && (a[v][u] > 0 || a[u][v] > 0))
        .map(|u| (a[v][u], a[u][v]))
        .collect();
    neighbours.sort_unstable();
    (out, inn, labels, neighbours)
}

fn code(a: &[Vec<u64>], order: &[usize], directed: bool) -> Vec<u64> {
    let n = order.len();
    let mut c = Vec::with_capacity(n * n);
    for i in 0..n {
        let js = if directed { 0..n } else { i + 1..n };
        for j in js {
            if i != j {
                c.push(a[order[i]][order[j]]);
            }
        }
    }
    c
}

struct Search<'a> {
    a: &'a [Vec<u64>],
    directed: bool,
    cells: Vec<Vec<usize>>,
    order: Vec<usize>,
    best: Option<Vec<u64>>,
}

impl Search<'_> {
    fn run(&mut self, cell: usize) {
        if cell == self.cells.len() {
            let c = code(self.a, &self.order, self.directed);
            if self.best.as_ref().is_none_or(|b| c < *b) {
                self.best = Some(c);
            }
            return;
        }
        let members = self.cells[cell].clone();
        let start = self.order.len();
        self.permute(cell, &members, &mut vec![false; members.len()], start);
    }

    fn permute(&mut self, cell: usize, members: &[usize], used: &mut Vec<bool>, start: usize) {
        if self.order.len() == start + members.len() {
            self.run(cell + 1);
            return;
        }
        for i in 0..members.len() {
            if !used[i] {
                used[i] = true;
                self.order.push(members[i]);
                self.permute(cell, members, used, start);
                self.order.pop();
                used[i] = false;
            }
        }
    }
}

pub(super) fn canonical_form(g: &LabeledGraph) -> Vec<u8> {
    let a = adjacency(g);
    let k = g.k();
    let mut free: Vec<(Invariant, usize)> = (k..g.n()).map(|v| (invariant(&a, k, v), v)).collect();
    free.sort();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for (i, (inv, v)) in free.iter().enumerate() {
        if i > 0 && free[i - 1].0 == *inv {
            cells.last_mut().expect("nonempty").push(*v);
        } else {
            cells.push(vec![*v]);
        }
    }
    let mut search = Search {
        a: &a,
        directed: g.is_directed(),
        cells,
        order: (0..k).collect(),
        best: None,
    };
    search.run(0);
    let best = search.best.expect("at least one ordering");

    let mut bytes = Vec::with_capacity(9 + 8 * best.len());
    bytes.push(g.is_directed() as u8);
    bytes.extend_from_slice(&(k as u32).to_be_bytes());
    bytes.extend_from_slice(&(g.n() as u32).to_be_bytes());
    for x in best {
        bytes.extend_from_slice(&x.to_be_bytes());
    }
    bytes
}
