//! 3-node pattern codes, canonical classes and automorphism orbits.
//!
//! A triad pattern on positions `0, 1, 2` is a 6-bit code with one bit per
//! ordered off-diagonal pair, in the order of [`PAIRS`]. The canonical code
//! of a pattern is the minimum code over all six relabelings.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Bit `i` of a triad code is the edge `PAIRS[i].0 -> PAIRS[i].1`.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

pub const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Number of isomorphism classes of simple 3-node digraphs.
pub const TRIAD_CLASS_COUNT: usize = 16;

pub(crate) fn pair_bit(u: usize, v: usize) -> u8 {
    let idx = PAIRS.iter().position(|&p| p == (u, v)).expect("off-diagonal pair");
    1 << idx
}

/// Code of the pattern after moving position `i` to `perm[i]`.
pub fn permute_code(code: u8, perm: &[usize; 3]) -> u8 {
    let mut out = 0;
    for (bit, &(u, v)) in PAIRS.iter().enumerate() {
        if code & (1 << bit) != 0 {
            out |= pair_bit(perm[u], perm[v]);
        }
    }
    out
}

pub fn code_from_edges(edges: &[(usize, usize)]) -> u8 {
    edges.iter().fold(0, |acc, &(u, v)| acc | pair_bit(u, v))
}

pub fn edges_of_code(code: u8) -> Vec<(usize, usize)> {
    PAIRS
        .iter()
        .enumerate()
        .filter(|(bit, _)| code & (1 << bit) != 0)
        .map(|(_, &p)| p)
        .collect()
}

/// Weak connectivity of a 3-node pattern.
pub fn code_is_connected(code: u8) -> bool {
    let mut und = [[false; 3]; 3];
    for (u, v) in edges_of_code(code) {
        und[u][v] = true;
        und[v][u] = true;
    }
    let linked = |a: usize, b: usize| und[a][b];
    // Connected iff at least two of the three unordered pairs are linked.
    [linked(0, 1), linked(0, 2), linked(1, 2)]
        .iter()
        .filter(|&&x| x)
        .count()
        >= 2
}

struct ClassInfo {
    canonical: u8,
    man: &'static str,
    alias: Option<&'static str>,
    connected: bool,
}

struct Tables {
    classes: Vec<ClassInfo>,
    /// code -> class index
    class_of: [u8; 64],
    /// code -> permutation mapping the pattern's positions onto the canonical form
    to_canonical: [[usize; 3]; 64],
}

/// MAN label, common name and representative edges of each class.
type NamedClass = (&'static str, Option<&'static str>, &'static [(usize, usize)]);

const NAMED: [NamedClass; TRIAD_CLASS_COUNT] = [
    ("003", None, &[]),
    ("012", None, &[(0, 1)]),
    ("102", None, &[(0, 1), (1, 0)]),
    ("021D", Some("REGULATING_V"), &[(0, 1), (0, 2)]),
    ("021U", Some("REGULATED_V"), &[(1, 0), (2, 0)]),
    ("021C", Some("CHAIN"), &[(0, 1), (1, 2)]),
    ("111D", None, &[(0, 1), (1, 0), (2, 0)]),
    ("111U", None, &[(0, 1), (1, 0), (0, 2)]),
    ("030T", Some("FFL"), &[(0, 1), (0, 2), (1, 2)]),
    ("030C", Some("LOOP3"), &[(0, 1), (1, 2), (2, 0)]),
    ("201", None, &[(0, 1), (1, 0), (0, 2), (2, 0)]),
    ("120D", None, &[(1, 0), (1, 2), (0, 2), (2, 0)]),
    ("120U", None, &[(0, 1), (2, 1), (0, 2), (2, 0)]),
    ("120C", None, &[(0, 1), (1, 2), (0, 2), (2, 0)]),
    ("210", Some("DOUBLE_MUTUAL"), &[(0, 1), (1, 2), (2, 1), (0, 2), (2, 0)]),
    ("300", None, &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]),
];

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let canonical_of = |code: u8| PERMUTATIONS.iter().map(|p| permute_code(code, p)).min().unwrap();
        let mut classes: Vec<ClassInfo> = NAMED
            .iter()
            .map(|&(man, alias, edges)| {
                let canonical = canonical_of(code_from_edges(edges));
                ClassInfo {
                    canonical,
                    man,
                    alias,
                    connected: code_is_connected(canonical),
                }
            })
            .collect();
        classes.sort_by_key(|c| c.canonical);
        let mut class_of = [0u8; 64];
        let mut to_canonical = [[0usize; 3]; 64];
        for code in 0u8..64 {
            let canon = canonical_of(code);
            let idx = classes
                .iter()
                .position(|c| c.canonical == canon)
                .expect("every triad code belongs to a named class");
            class_of[code as usize] = idx as u8;
            to_canonical[code as usize] = *PERMUTATIONS
                .iter()
                .find(|p| permute_code(code, p) == canon)
                .unwrap();
        }
        Tables {
            classes,
            class_of,
            to_canonical,
        }
    })
}

/// Index (`0..16`) of the isomorphism class of a triad code.
#[inline]
pub fn class_index(code: u8) -> usize {
    tables().class_of[code as usize] as usize
}

/// Permutation sending the positions of `code` onto the canonical form.
#[inline]
pub fn canonical_permutation(code: u8) -> [usize; 3] {
    tables().to_canonical[code as usize]
}

/// Isomorphism class of a network motif: the self-loop (size 1) or a 3-node
/// pattern identified by its canonical code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MotifClass {
    size: u8,
    code: u8,
}

impl MotifClass {
    pub const SELF_LOOP: MotifClass = MotifClass { size: 1, code: 0 };

    /// Class of an arbitrary 3-node pattern (bits ordered as [`PAIRS`]).
    pub fn from_triad_code(code: u8) -> MotifClass {
        assert!(code < 64, "triad codes are 6-bit");
        MotifClass {
            size: 3,
            code: tables().classes[class_index(code)].canonical,
        }
    }

    /// Class by its position in the sorted list of the 16 triad classes.
    pub fn triad(index: usize) -> MotifClass {
        MotifClass {
            size: 3,
            code: tables().classes[index].canonical,
        }
    }

    /// All 16 triad classes in canonical-code order.
    pub fn all_triads() -> Vec<MotifClass> {
        (0..TRIAD_CLASS_COUNT).map(MotifClass::triad).collect()
    }

    /// The 13 weakly connected triad classes.
    pub fn connected_triads() -> Vec<MotifClass> {
        Self::all_triads().into_iter().filter(|c| c.is_connected()).collect()
    }

    pub fn ffl() -> MotifClass {
        "FFL".parse().unwrap()
    }

    pub fn size(&self) -> usize {
        self.size as usize
    }

    /// Canonical code; 0 for the self-loop class.
    pub fn canonical_code(&self) -> u8 {
        self.code
    }

    pub fn is_self_loop(&self) -> bool {
        self.size == 1
    }

    pub fn is_connected(&self) -> bool {
        self.is_self_loop() || tables().classes[self.triad_index()].connected
    }

    /// Index among the 16 triad classes. Panics for the self-loop class.
    pub fn triad_index(&self) -> usize {
        assert!(!self.is_self_loop(), "self-loop class has no triad index");
        class_index(self.code)
    }

    /// MAN label (`030T`, `021C`, ...) or `SL`.
    pub fn label(&self) -> &'static str {
        if self.is_self_loop() {
            "SL"
        } else {
            tables().classes[self.triad_index()].man
        }
    }

    /// Common name where one exists (`FFL`, `LOOP3`, ...), else the MAN label.
    pub fn name(&self) -> &'static str {
        if self.is_self_loop() {
            return "SL";
        }
        let info = &tables().classes[self.triad_index()];
        info.alias.unwrap_or(info.man)
    }

    /// Edges of the canonical form; `[(0, 0)]` for the self-loop.
    pub fn canonical_edges(&self) -> Vec<(usize, usize)> {
        if self.is_self_loop() {
            vec![(0, 0)]
        } else {
            edges_of_code(self.code)
        }
    }

    /// Automorphisms of the canonical form, as position permutations.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        if self.is_self_loop() {
            return vec![vec![0]];
        }
        PERMUTATIONS
            .iter()
            .filter(|p| permute_code(self.code, p) == self.code)
            .map(|p| p.to_vec())
            .collect()
    }
}

impl fmt::Display for MotifClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MotifClass {
    type Err = Error;

    /// Accepts `SL`, MAN labels and the aliases `FFL`, `LOOP3`, `CHAIN`,
    /// `REGULATING_V`, `REGULATED_V`, `DOUBLE_MUTUAL`, `FBL` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let mut key = s.trim().to_ascii_uppercase().replace('-', "_");
        if key == "FBL" || key == "FEEDBACK_LOOP" {
            key = "LOOP3".into();
        }
        if key == "SL" || key == "SELF_LOOP" {
            return Ok(MotifClass::SELF_LOOP);
        }
        let t = tables();
        t.classes
            .iter()
            .position(|c| c.man == key || c.alias == Some(key.as_str()))
            .map(MotifClass::triad)
            .ok_or_else(|| Error::UnknownMotif(s.to_string()))
    }
}

impl Serialize for MotifClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Class of an arbitrary off-diagonal 3×3 adjacency pattern; the diagonal is ignored.
pub fn canonical_class(adjacency: &[[bool; 3]; 3]) -> MotifClass {
    let mut code = 0;
    for (bit, &(u, v)) in PAIRS.iter().enumerate() {
        if adjacency[u][v] {
            code |= 1 << bit;
        }
    }
    MotifClass::from_triad_code(code)
}

/// A group of motif positions that automorphisms map onto each other.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleOrbit {
    pub motif_class: MotifClass,
    pub orbit_index: usize,
    pub member_positions: Vec<usize>,
}

impl RoleOrbit {
    /// Short role name, e.g. `FFL:intermediate` or `021C:o1i1`.
    pub fn label(&self) -> String {
        format!("{}:{}", self.motif_class.name(), self.role_name())
    }

    pub fn role_name(&self) -> String {
        if self.motif_class.is_self_loop() {
            return "node".into();
        }
        let p = self.member_positions[0];
        let edges = self.motif_class.canonical_edges();
        let out = edges.iter().filter(|e| e.0 == p).count();
        let inn = edges.iter().filter(|e| e.1 == p).count();
        if self.motif_class == MotifClass::ffl() {
            return match (out, inn) {
                (2, 0) => "input",
                (1, 1) => "intermediate",
                _ => "output",
            }
            .into();
        }
        format!("o{out}i{inn}")
    }
}

impl Serialize for RoleOrbit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("RoleOrbit", 4)?;
        s.serialize_field("class", &self.motif_class)?;
        s.serialize_field("class_code", &self.motif_class.canonical_code())?;
        s.serialize_field("orbit", &self.orbit_index)?;
        s.serialize_field("role", &self.role_name())?;
        s.end()
    }
}

/// Orbits of the automorphism group of the class's canonical form, ordered by
/// their smallest position.
pub fn role_orbits(class: MotifClass) -> Vec<RoleOrbit> {
    let n = class.size();
    let autos = class.automorphisms();
    let mut orbit_of = vec![usize::MAX; n];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for p in 0..n {
        if orbit_of[p] != usize::MAX {
            continue;
        }
        let mut members: Vec<usize> = autos.iter().map(|a| a[p]).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            orbit_of[m] = orbits.len();
        }
        orbits.push(members);
    }
    orbits
        .into_iter()
        .enumerate()
        .map(|(i, member_positions)| RoleOrbit {
            motif_class: class,
            orbit_index: i,
            member_positions,
        })
        .collect()
}
