use rand::Rng;

use super::LoopPolicy;
use crate::census::{class_index, triad_code, TRIAD_CLASS_COUNT};
use crate::graph::{Adjacency, DirectedGraph, GraphBuilder};

/// A proposed double-edge swap: edges at `i` and `j` of the swappable list,
/// `(a→b, c→d) ⇒ (a→d, c→b)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Swap {
    i: usize,
    j: usize,
    a: usize,
    b: usize,
    c: usize,
    d: usize,
}

/// Mutable adjacency used during rewiring and annealing.
pub(crate) struct SwapGraph {
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    loops: Vec<bool>,
    /// Edges eligible for swapping.
    edges: Vec<(usize, usize)>,
    policy: LoopPolicy,
}

fn insert_sorted(list: &mut Vec<usize>, x: usize) {
    if let Err(pos) = list.binary_search(&x) {
        list.insert(pos, x);
    }
}

fn remove_sorted(list: &mut Vec<usize>, x: usize) {
    if let Ok(pos) = list.binary_search(&x) {
        list.remove(pos);
    }
}

impl SwapGraph {
    pub(crate) fn from_graph(g: &DirectedGraph, policy: LoopPolicy) -> Self {
        let n = g.node_count();
        let edges = g
            .edges()
            .filter(|&(u, v)| u != v || policy == LoopPolicy::Mobile)
            .collect();
        SwapGraph {
            out_adj: (0..n).map(|u| g.out_neighbors(u).to_vec()).collect(),
            in_adj: (0..n).map(|u| g.in_neighbors(u).to_vec()).collect(),
            loops: (0..n).map(|u| g.has_self_loop(u)).collect(),
            edges,
            policy,
        }
    }

    pub(crate) fn swappable_edges(&self) -> usize {
        self.edges.len()
    }

    /// Rebuilds a [`DirectedGraph`] carrying `template`'s node names.
    pub(crate) fn to_graph(&self, template: &DirectedGraph) -> DirectedGraph {
        let mut b = GraphBuilder::with_nodes(template.names().iter().cloned());
        for u in 0..self.out_adj.len() {
            if self.loops[u] {
                b.add_edge_by_index(u, u);
            }
            for &v in &self.out_adj[u] {
                b.add_edge_by_index(u, v);
            }
        }
        b.build()
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            self.loops[u] = true;
        } else {
            insert_sorted(&mut self.out_adj[u], v);
            insert_sorted(&mut self.in_adj[v], u);
        }
    }

    fn remove_edge(&mut self, u: usize, v: usize) {
        if u == v {
            self.loops[u] = false;
        } else {
            remove_sorted(&mut self.out_adj[u], v);
            remove_sorted(&mut self.in_adj[v], u);
        }
    }

    /// Draws a random valid swap, or `None` if the draw is rejected.
    pub(crate) fn propose<R: Rng>(&self, rng: &mut R) -> Option<Swap> {
        let m = self.edges.len();
        if m < 2 {
            return None;
        }
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i == j {
            return None;
        }
        let (a, b) = self.edges[i];
        let (c, d) = self.edges[j];
        if a == c || b == d {
            return None;
        }
        if self.policy == LoopPolicy::Frozen && (a == d || c == b) {
            return None;
        }
        if self.has_edge(a, d) || self.has_edge(c, b) {
            return None;
        }
        Some(Swap { i, j, a, b, c, d })
    }

    pub(crate) fn apply(&mut self, s: Swap) {
        self.remove_edge(s.a, s.b);
        self.remove_edge(s.c, s.d);
        self.add_edge(s.a, s.d);
        self.add_edge(s.c, s.b);
        self.edges[s.i] = (s.a, s.d);
        self.edges[s.j] = (s.c, s.b);
    }

    pub(crate) fn undo(&mut self, s: Swap) {
        self.remove_edge(s.a, s.d);
        self.remove_edge(s.c, s.b);
        self.add_edge(s.a, s.b);
        self.add_edge(s.c, s.d);
        self.edges[s.i] = (s.a, s.b);
        self.edges[s.j] = (s.c, s.d);
    }

    pub(crate) fn mix<R: Rng>(&mut self, attempts: usize, rng: &mut R) {
        for _ in 0..attempts {
            if let Some(s) = self.propose(rng) {
                self.apply(s);
            }
        }
    }

    pub(crate) fn edge_snapshot(&self) -> Vec<(usize, usize)> {
        self.edges.clone()
    }

    /// Resets the graph to a previous [`SwapGraph::edge_snapshot`].
    pub(crate) fn restore(&mut self, snapshot: &[(usize, usize)]) {
        if snapshot == self.edges.as_slice() {
            return;
        }
        for list in self.out_adj.iter_mut().chain(self.in_adj.iter_mut()) {
            list.clear();
        }
        if self.policy == LoopPolicy::Mobile {
            self.loops.iter_mut().for_each(|l| *l = false);
        }
        for &(u, v) in snapshot {
            if u == v {
                self.loops[u] = true;
            } else {
                self.out_adj[u].push(v);
                self.in_adj[v].push(u);
            }
        }
        for list in self.out_adj.iter_mut().chain(self.in_adj.iter_mut()) {
            list.sort_unstable();
        }
        self.edges = snapshot.to_vec();
    }

    fn dyad_bits(&self, x: usize, y: usize) -> u8 {
        ((self.has_edge(x, y) as u8) * XY) | ((self.has_edge(y, x) as u8) * YX)
    }

    /// Histogram of third nodes `w ∉ skip` by their 4-bit relation to
    /// `(x, y)`, found by merging the four sorted neighbor lists. Entry 0
    /// collects the nodes adjacent to neither.
    fn third_node_patterns(&self, x: usize, y: usize, skip: &[usize; 4], hist: &mut [u32; 64]) {
        let lists = [
            (&self.out_adj[x][..], XW),
            (&self.in_adj[x][..], WX),
            (&self.out_adj[y][..], YW),
            (&self.in_adj[y][..], WY),
        ];
        let mut pos = [0usize; 4];
        let mut adjacent = 0u32;
        loop {
            let mut w = usize::MAX;
            for (k, (list, _)) in lists.iter().enumerate() {
                if let Some(&v) = list.get(pos[k]) {
                    w = w.min(v);
                }
            }
            if w == usize::MAX {
                break;
            }
            let mut bits = 0u8;
            for (k, (list, bit)) in lists.iter().enumerate() {
                if list.get(pos[k]) == Some(&w) {
                    bits |= bit;
                    pos[k] += 1;
                }
            }
            if !skip.contains(&w) {
                hist[bits as usize] += 1;
                adjacent += 1;
            }
        }
        hist[0] = (self.out_adj.len() - skip.len()) as u32 - adjacent;
    }

    /// Applies a frozen-loop swap and writes the resulting change of the
    /// triad census into `delta`.
    ///
    /// The four triads inside `{a, b, c, d}` are recounted directly. Every
    /// other changed triad holds exactly one rewired pair and an outside node
    /// whose links to that pair are untouched by the swap, so those are
    /// counted by link pattern.
    pub(crate) fn apply_with_census_delta(&mut self, s: Swap, delta: &mut [i64; TRIAD_CLASS_COUNT]) {
        debug_assert!(self.policy == LoopPolicy::Frozen);
        *delta = [0; TRIAD_CLASS_COUNT];
        let touched = [s.a, s.b, s.c, s.d];
        let pairs = [(s.a, s.b), (s.c, s.d), (s.a, s.d), (s.c, s.b)];
        let inner = [[s.a, s.b, s.c], [s.a, s.b, s.d], [s.a, s.c, s.d], [s.b, s.c, s.d]];
        let mut hist = [[0u32; 64]; 4];
        let mut before = [0u8; 4];
        for (k, &(x, y)) in pairs.iter().enumerate() {
            before[k] = self.dyad_bits(x, y);
            self.third_node_patterns(x, y, &touched, &mut hist[k]);
        }
        for &[x, y, z] in &inner {
            delta[class_index(triad_code(self, x, y, z))] -= 1;
        }
        self.apply(s);
        for &[x, y, z] in &inner {
            delta[class_index(triad_code(self, x, y, z))] += 1;
        }
        for (k, &(x, y)) in pairs.iter().enumerate() {
            let after = self.dyad_bits(x, y);
            for &p in &THIRD_PATTERNS {
                let h = hist[k][p as usize] as i64;
                if h != 0 {
                    delta[class_index(before[k] | p)] -= h;
                    delta[class_index(after | p)] += h;
                }
            }
        }
    }
}

// Triad code bits with positions (x, y, w) = (0, 1, 2).
const XY: u8 = 1 << 0;
const XW: u8 = 1 << 1;
const YX: u8 = 1 << 2;
const YW: u8 = 1 << 3;
const WX: u8 = 1 << 4;
const WY: u8 = 1 << 5;

const THIRD_PATTERNS: [u8; 16] = {
    let mut out = [0u8; 16];
    let mut i = 0;
    while i < 16 {
        let b = i as u8;
        out[i] = ((b & 1) * XW) | (((b >> 1) & 1) * WX) | (((b >> 2) & 1) * YW) | (((b >> 3) & 1) * WY);
        i += 1;
    }
    out
};

impl Adjacency for SwapGraph {
    fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out_adj[u]
    }

    fn in_neighbors(&self, u: usize) -> &[usize] {
        &self.in_adj[u]
    }

    fn has_self_loop(&self, u: usize) -> bool {
        self.loops[u]
    }
}
