//! Motif combinations (shared nodes) and interactions (linking edges).
//!
//! A combination merges two motifs by identifying positions of `A` with
//! positions of `B`; its core topology is the union of both edge sets, valid
//! only if each motif stays an induced subgraph. Extensions add edges between
//! nodes that never sit in the same motif, i.e. between `A`-only and
//! `B`-only nodes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize, Serializer};

use crate::census::MotifClass;
use crate::error::{Error, Result};
use crate::graph::{Adjacency, DirectedGraph};

/// Largest motif size accepted for enumeration.
pub const MAX_MOTIF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Activation,
    #[serde(rename = "-")]
    Repression,
}

impl Sign {
    fn code(self) -> u8 {
        match self {
            Sign::Activation => 2,
            Sign::Repression => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedEdge {
    pub from: usize,
    pub to: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
}

fn edge_code(sign: Option<Sign>) -> u8 {
    sign.map_or(1, Sign::code)
}

/// A small motif pattern over positions `0..size`, optionally signed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Motif {
    pub name: String,
    pub size: usize,
    pub edges: Vec<SignedEdge>,
}

impl Motif {
    pub fn new(name: impl Into<String>, size: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if size == 0 || size > MAX_MOTIF_SIZE {
            return Err(Error::UnsupportedMotifSize(size));
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u >= size || v >= size {
                return Err(Error::InvalidArgument(format!("edge {u}->{v} outside a {size}-node motif")));
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidArgument(format!("duplicate edge {u}->{v}")));
            }
        }
        Ok(Motif {
            name: name.into(),
            size,
            edges: edges.iter().map(|&(from, to)| SignedEdge { from, to, sign: None }).collect(),
        })
    }

    /// Attaches one sign per edge, in edge order.
    pub fn with_signs(mut self, signs: &[Sign]) -> Result<Self> {
        if signs.len() != self.edges.len() {
            return Err(Error::InvalidArgument(format!(
                "{} signs given for {} edges",
                signs.len(),
                self.edges.len()
            )));
        }
        for (e, &s) in self.edges.iter_mut().zip(signs) {
            e.sign = Some(s);
        }
        Ok(self)
    }

    pub fn from_class(class: MotifClass) -> Self {
        Motif::new(class.name(), class.size(), &class.canonical_edges()).expect("census classes are valid motifs")
    }

    pub fn self_loop() -> Self {
        Motif::from_class(MotifClass::SELF_LOOP)
    }

    /// Two-node mutual feedback `0 ⇄ 1`.
    pub fn mutual() -> Self {
        Motif::new("MUTUAL", 2, &[(0, 1), (1, 0)]).expect("valid")
    }

    pub fn ffl() -> Self {
        Motif::from_class(MotifClass::ffl())
    }

    fn matrix(&self) -> Vec<u8> {
        let n = self.size;
        let mut m = vec![0u8; n * n];
        for e in &self.edges {
            m[e.from * n + e.to] = edge_code(e.sign);
        }
        m
    }

    fn code(&self, u: usize, v: usize) -> u8 {
        self.edges
            .iter()
            .find(|e| e.from == u && e.to == v)
            .map_or(0, |e| edge_code(e.sign))
    }

    fn canonical_key(&self) -> Vec<u8> {
        canonical_key(self.size, &self.matrix(), &vec![0; self.size])
    }

    /// Position permutations preserving the edge pattern and signs.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        automorphisms(self.size, &self.matrix(), &vec![0; self.size])
    }

    /// Same pattern up to relabeling, signs included.
    pub fn is_isomorphic(&self, other: &Motif) -> bool {
        self.size == other.size && self.canonical_key() == other.canonical_key()
    }
}

impl FromStr for Motif {
    type Err = Error;

    /// Accepts `MUTUAL` (aliases `DYAD`, `FEEDBACK`) and every census class name.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "MUTUAL" | "DYAD" | "FEEDBACK" | "MUTUAL_DYAD" => Ok(Motif::mutual()),
            _ => MotifClass::from_str(s).map(Motif::from_class),
        }
    }
}

impl fmt::Display for Motif {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Lexicographically smallest (colors, adjacency) over all relabelings.
fn canonical_key(n: usize, adj: &[u8], colors: &[u8]) -> Vec<u8> {
    let mut best: Option<Vec<u8>> = None;
    for p in (0..n).permutations(n) {
        let mut key = Vec::with_capacity(n + n * n);
        key.extend(p.iter().map(|&u| colors[u]));
        for &u in &p {
            key.extend(p.iter().map(|&v| adj[u * n + v]));
        }
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    best.unwrap_or_default()
}

/// Permutations `σ` (node `u` goes to `σ[u]`) preserving adjacency and colors.
fn automorphisms(n: usize, adj: &[u8], colors: &[u8]) -> Vec<Vec<usize>> {
    (0..n)
        .permutations(n)
        .filter(|s| {
            (0..n).all(|u| colors[s[u]] == colors[u] && (0..n).all(|v| adj[s[u] * n + s[v]] == adj[u * n + v]))
        })
        .collect()
}

/// `min(n_a, n_b) − 1`.
pub fn max_shared_nodes(n_a: usize, n_b: usize) -> usize {
    n_a.min(n_b).saturating_sub(1)
}

/// Admissible numbers of shared nodes. A single-node motif paired with a
/// larger one attaches to exactly one node.
pub fn shared_node_range(n_a: usize, n_b: usize) -> std::ops::RangeInclusive<usize> {
    let max = max_shared_nodes(n_a, n_b);
    if max == 0 && n_a.min(n_b) == 1 && n_a.max(n_b) > 1 {
        1..=1
    } else {
        1..=max
    }
}

fn serialize_biguint<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InteractionCount {
    pub directed: bool,
    /// Labeled linkages, the empty one included.
    #[serde(serialize_with = "serialize_biguint")]
    pub labeled: BigUint,
    /// Labeled linkages with at least one edge.
    #[serde(serialize_with = "serialize_biguint")]
    pub non_empty: BigUint,
}

/// `2^(2·n_a·n_b)` labeled linkages for directed networks, `2^(n_a·n_b)` for
/// undirected ones.
pub fn count_interaction_topologies(n_a: usize, n_b: usize, directed: bool) -> InteractionCount {
    let bits = n_a * n_b * if directed { 2 } else { 1 };
    let labeled = BigUint::from(1u32) << bits;
    let non_empty = &labeled - 1u32;
    InteractionCount {
        directed,
        labeled,
        non_empty,
    }
}

/// Non-empty directed linkages of `a` and `b` that stay distinct under the
/// motifs' own symmetries (and under exchanging `a` and `b` when they are
/// isomorphic), counted with Burnside's lemma.
pub fn unique_interaction_count(a: &Motif, b: &Motif) -> BigUint {
    let (na, nb) = (a.size, b.size);
    let n = na + nb;
    let mut group: Vec<Vec<usize>> = Vec::new();
    for sa in a.automorphisms() {
        for sb in b.automorphisms() {
            let mut p: Vec<usize> = sa.clone();
            p.extend(sb.iter().map(|&j| na + j));
            group.push(p);
        }
    }
    if a.is_isomorphic(b) {
        let isos = |x: &Motif, y: &Motif| -> Vec<Vec<usize>> {
            (0..x.size)
                .permutations(x.size)
                .filter(|p| (0..x.size).all(|u| (0..x.size).all(|v| y.code(p[u], p[v]) == x.code(u, v))))
                .collect()
        };
        for ab in isos(a, b) {
            for ba in isos(b, a) {
                let mut p: Vec<usize> = ab.iter().map(|&j| na + j).collect();
                p.extend(ba.iter().copied());
                group.push(p);
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..na)
        .flat_map(|i| (na..n).flat_map(move |j| [(i, j), (j, i)]))
        .collect();
    let index = |u: usize, v: usize| pairs.iter().position(|&p| p == (u, v)).expect("linking pair");
    let mut total = BigUint::from(0u32);
    for g in &group {
        let mut seen = vec![false; pairs.len()];
        let mut cycles = 0;
        for start in 0..pairs.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                let (u, v) = pairs[k];
                k = index(g[u], g[v]);
            }
        }
        total += BigUint::from(1u32) << cycles;
    }
    total / BigUint::from(group.len()) - 1u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NodeOrigin {
    /// Position in motif A, if the node belongs to it.
    pub a: Option<usize>,
    pub b: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeOrigin {
    A,
    B,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreEdge {
    pub from: usize,
    pub to: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
    pub origin: EdgeOrigin,
}

/// Core topology of a combination `A{i…}*B{j…}`. Merged nodes `0..n_a` are
/// A's positions; B's unshared positions follow in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CombinationTopology {
    pub notation: String,
    #[serde(serialize_with = "serialize_motif_name")]
    pub motif_a: Motif,
    #[serde(serialize_with = "serialize_motif_name")]
    pub motif_b: Motif,
    /// `(position in A, position in B)` pairs, sorted by A position.
    pub sharing: Vec<(usize, usize)>,
    pub nodes: Vec<NodeOrigin>,
    pub edges: Vec<CoreEdge>,
}

fn serialize_motif_name<S: Serializer>(m: &Motif, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&m.name)
}

impl CombinationTopology {
    /// Merges `a` and `b` along `sharing`. Fails if the map is not injective
    /// or either motif would stop being an induced subgraph (self-loops
    /// aside, which belong to their own class).
    pub fn new(a: &Motif, b: &Motif, sharing: &[(usize, usize)]) -> Result<Self> {
        let mut sharing = sharing.to_vec();
        sharing.sort_unstable();
        let a_pos: BTreeSet<usize> = sharing.iter().map(|s| s.0).collect();
        let b_pos: BTreeSet<usize> = sharing.iter().map(|s| s.1).collect();
        if a_pos.len() != sharing.len() || b_pos.len() != sharing.len() {
            return Err(Error::InvalidArgument("sharing map must be injective".into()));
        }
        if sharing.iter().any(|&(i, j)| i >= a.size || j >= b.size) {
            return Err(Error::InvalidArgument("sharing position outside a motif".into()));
        }
        if sharing.is_empty() {
            return Err(Error::InvalidArgument("a combination shares at least one node".into()));
        }
        for &(i1, j1) in &sharing {
            for &(i2, j2) in &sharing {
                if i1 == i2 {
                    continue;
                }
                let (ca, cb) = (a.code(i1, i2), b.code(j1, j2));
                if ca != cb && !(ca >= 1 && cb >= 1 && (ca == 1 || cb == 1)) {
                    return Err(Error::InvalidArgument(format!(
                        "sharing {sharing:?} breaks the induced pattern of {} or {}",
                        a.name, b.name
                    )));
                }
            }
        }
        let mut nodes: Vec<NodeOrigin> = (0..a.size).map(|i| NodeOrigin { a: Some(i), b: None }).collect();
        let mut b_to_merged = vec![usize::MAX; b.size];
        for &(i, j) in &sharing {
            nodes[i].b = Some(j);
            b_to_merged[j] = i;
        }
        for (j, slot) in b_to_merged.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = nodes.len();
                nodes.push(NodeOrigin { a: None, b: Some(j) });
            }
        }
        let mut edges: Vec<CoreEdge> = a
            .edges
            .iter()
            .map(|e| CoreEdge {
                from: e.from,
                to: e.to,
                sign: e.sign,
                origin: EdgeOrigin::A,
            })
            .collect();
        for e in &b.edges {
            let (from, to) = (b_to_merged[e.from], b_to_merged[e.to]);
            if let Some(existing) = edges.iter_mut().find(|x| x.from == from && x.to == to) {
                existing.origin = EdgeOrigin::Both;
                existing.sign = existing.sign.or(e.sign);
            } else {
                edges.push(CoreEdge {
                    from,
                    to,
                    sign: e.sign,
                    origin: EdgeOrigin::B,
                });
            }
        }
        edges.sort_by_key(|e| (e.from, e.to));
        let list = |xs: &mut dyn Iterator<Item = usize>| xs.map(|x| x.to_string()).join(",");
        let notation = format!(
            "{}{{{}}}*{}{{{}}}",
            a.name,
            list(&mut sharing.iter().map(|s| s.0)),
            b.name,
            list(&mut sharing.iter().map(|s| s.1))
        );
        Ok(CombinationTopology {
            notation,
            motif_a: a.clone(),
            motif_b: b.clone(),
            sharing,
            nodes,
            edges,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn shared_count(&self) -> usize {
        self.sharing.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.iter().any(|e| e.from == u && e.to == v)
    }

    fn matrix(&self) -> Vec<u8> {
        let n = self.node_count();
        let mut m = vec![0u8; n * n];
        for e in &self.edges {
            m[e.from * n + e.to] = edge_code(e.sign);
        }
        m
    }

    /// 0 for A-only, 1 for shared, 2 for B-only nodes.
    fn side_colors(&self) -> Vec<u8> {
        self.nodes
            .iter()
            .map(|o| match (o.a, o.b) {
                (Some(_), None) => 0,
                (Some(_), Some(_)) => 1,
                _ => 2,
            })
            .collect()
    }

    fn same_motifs(&self) -> bool {
        self.motif_a.is_isomorphic(&self.motif_b)
    }

    /// Whether `u` and `v` both belong to A or both belong to B.
    pub fn co_resident(&self, u: usize, v: usize) -> bool {
        let (x, y) = (self.nodes[u], self.nodes[v]);
        (x.a.is_some() && y.a.is_some()) || (x.b.is_some() && y.b.is_some())
    }

    /// Ordered pairs open to extension edges, sorted.
    pub fn eligible_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.node_count();
        (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && !self.co_resident(u, v))
            .collect()
    }

    /// Isomorphism-class key of the merged digraph; the A/B assignment is
    /// kept unless both motifs are the same pattern.
    pub fn canonical_key(&self) -> Vec<u8> {
        let colors = if self.same_motifs() {
            vec![0; self.node_count()]
        } else {
            self.side_colors()
        };
        canonical_key(self.node_count(), &self.matrix(), &colors)
    }

    /// Node permutations preserving the core and mapping A's node set onto
    /// itself (or onto B's, when the two motifs are the same pattern).
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let adj = self.matrix();
        let colors = self.side_colors();
        let same = self.same_motifs();
        (0..n)
            .permutations(n)
            .filter(|s| (0..n).all(|u| (0..n).all(|v| adj[s[u] * n + s[v]] == adj[u * n + v])))
            .filter(|s| {
                (0..n).all(|u| colors[s[u]] == colors[u]) || (same && (0..n).all(|u| colors[s[u]] == 2 - colors[u]))
            })
            .collect()
    }
}

/// All non-isomorphic core topologies of `a` and `b`, in order of first
/// discovery (fewer shared nodes first).
pub fn enumerate_core_combinations(a: &Motif, b: &Motif) -> Result<Vec<CombinationTopology>> {
    let range = shared_node_range(a.size, b.size);
    if range.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} and {} cannot share nodes without merging a whole motif",
            a.name, b.name
        )));
    }
    let mut keys = BTreeSet::new();
    let mut out = Vec::new();
    for k in range {
        for a_positions in (0..a.size).combinations(k) {
            for b_positions in (0..b.size).permutations(k) {
                let sharing: Vec<(usize, usize)> = a_positions.iter().copied().zip(b_positions).collect();
                let Ok(core) = CombinationTopology::new(a, b, &sharing) else { continue };
                if keys.insert(core.canonical_key()) {
                    out.push(core);
                }
            }
        }
    }
    Ok(out)
}

/// Largest number of eligible pairs for which extensions are listed.
pub const MAX_EXTENSION_PAIRS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Extension {
    /// Bit `k` set means eligible pair `k` carries an added edge.
    pub mask: u64,
    pub added: Vec<(usize, usize)>,
}

fn masked_pairs(pairs: &[(usize, usize)], mask: u64) -> Vec<(usize, usize)> {
    pairs
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, &p)| p)
        .collect()
}

fn check_extension_size(core: &CombinationTopology) -> Result<Vec<(usize, usize)>> {
    let pairs = core.eligible_pairs();
    if pairs.len() > MAX_EXTENSION_PAIRS {
        return Err(Error::InvalidArgument(format!(
            "{} eligible pairs exceed the enumeration limit of {MAX_EXTENSION_PAIRS}",
            pairs.len()
        )));
    }
    Ok(pairs)
}

/// Every subset of eligible extension edges, the empty one (the core) first.
pub fn enumerate_extensions(core: &CombinationTopology) -> Result<Vec<Extension>> {
    let pairs = check_extension_size(core)?;
    Ok((0..1u64 << pairs.len())
        .map(|mask| Extension {
            mask,
            added: masked_pairs(&pairs, mask),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionClass {
    pub representative: u64,
    pub added: Vec<(usize, usize)>,
    pub members: Vec<u64>,
    pub count: u64,
}

/// Extensions grouped into classes that the core's automorphisms map onto
/// each other; counts start at zero.
pub fn extension_classes(core: &CombinationTopology) -> Result<Vec<ExtensionClass>> {
    let pairs = check_extension_size(core)?;
    let (_, class_of) = mask_classes(core, &pairs);
    let mut classes: Vec<ExtensionClass> = Vec::new();
    for (mask, &rep) in class_of.iter().enumerate() {
        match classes.iter_mut().find(|c| c.representative == rep) {
            Some(c) => c.members.push(mask as u64),
            None => classes.push(ExtensionClass {
                representative: rep,
                added: masked_pairs(&pairs, rep),
                members: vec![mask as u64],
                count: 0,
            }),
        }
    }
    Ok(classes)
}

/// Core automorphisms and, per mask, the smallest mask in its orbit.
fn mask_classes(core: &CombinationTopology, pairs: &[(usize, usize)]) -> (Vec<Vec<usize>>, Vec<u64>) {
    let autos = core.automorphisms();
    let moved: Vec<Vec<usize>> = autos
        .iter()
        .map(|s| {
            pairs
                .iter()
                .map(|&(u, v)| pairs.iter().position(|&p| p == (s[u], s[v])).expect("eligible pairs are preserved"))
                .collect()
        })
        .collect();
    let class_of = (0..1u64 << pairs.len())
        .map(|mask| {
            moved
                .iter()
                .map(|m| {
                    m.iter()
                        .enumerate()
                        .fold(0u64, |acc, (k, &src)| acc | ((mask >> src & 1) << k))
                })
                .min()
                .unwrap_or(mask)
        })
        .collect();
    (autos, class_of)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionHistogram {
    pub core: String,
    pub eligible_pairs: Vec<(usize, usize)>,
    pub classes: Vec<ExtensionClass>,
    /// Occurrences of the two motifs joined as in the core.
    pub total: u64,
}

/// Assignment order in which every node after the first is linked by a core
/// edge to an earlier one when the core is connected.
fn search_order(core: &CombinationTopology) -> Vec<(usize, Option<usize>)> {
    let n = core.node_count();
    let mut order: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .find_map(|v| {
                order
                    .iter()
                    .find(|&&(u, _)| core.has_edge(u, v) || core.has_edge(v, u))
                    .map(|&(u, _)| (v, Some(u)))
            })
            .unwrap_or_else(|| ((0..n).find(|&v| !placed[v]).expect("unplaced node"), None));
        placed[next.0] = true;
        order.push(next);
    }
    order
}

/// Classifies every occurrence of the core in `g` (both motifs induced on
/// their positions, joined as in the core) by the extension edges present,
/// counting each occurrence once regardless of core symmetries.
pub fn count_extension_frequencies(g: &DirectedGraph, core: &CombinationTopology) -> Result<ExtensionHistogram> {
    let pairs = check_extension_size(core)?;
    let n = core.node_count();
    let (autos, class_of) = mask_classes(core, &pairs);
    let mut classes = extension_classes(core)?;
    let order = search_order(core);
    let loops: Vec<bool> = (0..n).map(|u| core.has_edge(u, u)).collect();
    let mut image = vec![usize::MAX; n];
    let mut counts = vec![0u64; 1 << pairs.len()];
    let mut total = 0u64;

    struct Search<'a> {
        g: &'a DirectedGraph,
        core: &'a CombinationTopology,
        order: &'a [(usize, Option<usize>)],
        loops: &'a [bool],
        pairs: &'a [(usize, usize)],
        autos: &'a [Vec<usize>],
    }

    impl Search<'_> {
        fn fits(&self, image: &[usize], depth: usize, x: usize) -> bool {
            let (k, _) = self.order[depth];
            if self.loops[k] && !self.g.has_self_loop(x) {
                return false;
            }
            self.order[..depth].iter().all(|&(j, _)| {
                let y = image[j];
                y != x
                    && (!self.core.co_resident(j, k)
                        || (self.g.has_edge(y, x) == self.core.has_edge(j, k)
                            && self.g.has_edge(x, y) == self.core.has_edge(k, j)))
            })
        }

        /// True when no symmetric relabeling of this occurrence is smaller.
        fn is_canonical(&self, image: &[usize]) -> bool {
            self.autos.iter().all(|s| {
                let relabeled = (0..image.len()).map(|u| image[s[u]]);
                relabeled.cmp(image.iter().copied()) != std::cmp::Ordering::Less
            })
        }

        fn run(&self, image: &mut Vec<usize>, depth: usize, visit: &mut dyn FnMut(&[usize])) {
            if depth == self.order.len() {
                if self.is_canonical(image) {
                    visit(image);
                }
                return;
            }
            let (k, anchor) = self.order[depth];
            let candidates: Vec<usize> = match anchor {
                Some(a) => self.g.undirected_neighbors(image[a]),
                None => (0..self.g.node_count()).collect(),
            };
            for x in candidates {
                if self.fits(image, depth, x) {
                    image[k] = x;
                    self.run(image, depth + 1, visit);
                    image[k] = usize::MAX;
                }
            }
        }
    }

    let search = Search {
        g,
        core,
        order: &order,
        loops: &loops,
        pairs: &pairs,
        autos: &autos,
    };
    search.run(&mut image, 0, &mut |img: &[usize]| {
        let mask = search
            .pairs
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &(u, v))| acc | ((g.has_edge(img[u], img[v]) as u64) << k));
        counts[mask as usize] += 1;
        total += 1;
    });
    for c in &mut classes {
        c.count = c.members.iter().map(|&m| counts[m as usize]).sum();
        debug_assert!(c.members.iter().all(|&m| class_of[m as usize] == c.representative));
    }
    Ok(ExtensionHistogram {
        core: core.notation.clone(),
        eligible_pairs: pairs,
        classes,
        total,
    })
}
