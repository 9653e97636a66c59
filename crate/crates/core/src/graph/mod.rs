//! Directed graph model, edge-list IO and random-walk downsampling.

mod downsample;
mod io;

use std::collections::HashMap;

use serde::Serialize;

pub use downsample::{
    downsample, validate_downsample, DownsampleConfig, DownsampleResult, ValidationConfig,
    ValidationReport,
};
pub use io::{load_edge_list, parse_edge_list, write_edge_list, LoadReport, ParseOptions};

/// Read access to a directed graph with dense `0..n` node indices.
///
/// Neighbor slices are sorted and never contain the node itself; self-loops
/// are reported separately through [`Adjacency::has_self_loop`].
pub trait Adjacency {
    fn node_count(&self) -> usize;
    fn out_neighbors(&self, u: usize) -> &[usize];
    fn in_neighbors(&self, u: usize) -> &[usize];
    fn has_self_loop(&self, u: usize) -> bool;

    fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v {
            self.has_self_loop(u)
        } else {
            self.out_neighbors(u).binary_search(&v).is_ok()
        }
    }

    /// Union of in- and out-neighbors, sorted, without `u`.
    fn undirected_neighbors(&self, u: usize) -> Vec<usize> {
        merge_sorted(self.out_neighbors(u), self.in_neighbors(u))
    }
}

pub(crate) fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Immutable directed graph over opaque string node identifiers.
///
/// Edges have set semantics. Self-loops are allowed and count towards both
/// the in- and out-degree of their node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    self_loops: Vec<bool>,
    edge_count: usize,
}

impl DirectedGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    /// Graph on nodes named `"0"..n` with the given index edges.
    ///
    /// Duplicate edges collapse. Panics if an endpoint is `>= n`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut b = GraphBuilder::with_nodes((0..n).map(|i| i.to_string()));
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            b.add_edge_by_index(u, v);
        }
        b.build()
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn name(&self, u: usize) -> &str {
        &self.names[u]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn self_loop_count(&self) -> usize {
        self.self_loops.iter().filter(|&&l| l).count()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_adj[u].len() + usize::from(self.self_loops[u])
    }

    pub fn in_degree(&self, u: usize) -> usize {
        self.in_adj[u].len() + usize::from(self.self_loops[u])
    }

    /// All edges in `(source, target)` index order, self-loops included.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            let mut row: Vec<usize> = self.out_adj[u].clone();
            if self.self_loops[u] {
                let pos = row.binary_search(&u).unwrap_err();
                row.insert(pos, u);
            }
            row.into_iter().map(move |v| (u, v))
        })
    }

    /// Subgraph induced by `nodes` (indices into `self`), keeping node names.
    /// Node order follows `nodes` after removing duplicates.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> DirectedGraph {
        let mut b = GraphBuilder::default();
        let mut local = HashMap::with_capacity(nodes.len());
        for &u in nodes {
            local.entry(u).or_insert_with(|| b.add_node(&self.names[u]));
        }
        for (&u, &lu) in &local {
            if self.self_loops[u] {
                b.add_edge_by_index(lu, lu);
            }
            for &v in &self.out_adj[u] {
                if let Some(&lv) = local.get(&v) {
                    b.add_edge_by_index(lu, lv);
                }
            }
        }
        b.build()
    }

    /// Copy of the graph with nodes renamed by `perm[old] = new` index.
    /// Names move with their node.
    pub fn permuted(&self, perm: &[usize]) -> DirectedGraph {
        let n = self.node_count();
        assert_eq!(perm.len(), n);
        let mut names = vec![String::new(); n];
        for (old, &new) in perm.iter().enumerate() {
            names[new] = self.names[old].clone();
        }
        let mut b = GraphBuilder::with_nodes(names);
        for (u, v) in self.edges() {
            b.add_edge_by_index(perm[u], perm[v]);
        }
        b.build()
    }
}

impl Adjacency for DirectedGraph {
    fn node_count(&self) -> usize {
        self.names.len()
    }

    fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out_adj[u]
    }

    fn in_neighbors(&self, u: usize) -> &[usize] {
        &self.in_adj[u]
    }

    fn has_self_loop(&self, u: usize) -> bool {
        self.self_loops[u]
    }
}

/// Incremental constructor for [`DirectedGraph`].
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
}

impl GraphBuilder {
    pub fn with_nodes<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        let mut b = Self::default();
        for n in names {
            b.add_node(n);
        }
        b
    }

    /// Registers a node (idempotent) and returns its index.
    pub fn add_node(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        i
    }

    pub fn add_edge(&mut self, source: impl Into<String>, target: impl Into<String>) {
        let u = self.add_node(source);
        let v = self.add_node(target);
        self.edges.push((u, v));
    }

    pub fn add_edge_by_index(&mut self, u: usize, v: usize) {
        debug_assert!(u < self.names.len() && v < self.names.len());
        self.edges.push((u, v));
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn build(self) -> DirectedGraph {
        let n = self.names.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut self_loops = vec![false; n];
        for (u, v) in self.edges {
            if u == v {
                self_loops[u] = true;
            } else {
                out_adj[u].push(v);
                in_adj[v].push(u);
            }
        }
        let mut edge_count = self_loops.iter().filter(|&&l| l).count();
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        edge_count += out_adj.iter().map(Vec::len).sum::<usize>();
        DirectedGraph {
            names: self.names,
            index: self.index,
            out_adj,
            in_adj,
            self_loops,
            edge_count,
        }
    }
}

/// Per-node in- and out-degrees, indexed like the graph's nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeSequences {
    pub in_degree: Vec<usize>,
    pub out_degree: Vec<usize>,
}

impl DegreeSequences {
    pub fn total(&self, u: usize) -> usize {
        self.in_degree[u] + self.out_degree[u]
    }
}

pub fn degree_sequences(g: &DirectedGraph) -> DegreeSequences {
    let n = g.node_count();
    DegreeSequences {
        in_degree: (0..n).map(|u| g.in_degree(u)).collect(),
        out_degree: (0..n).map(|u| g.out_degree(u)).collect(),
    }
}
