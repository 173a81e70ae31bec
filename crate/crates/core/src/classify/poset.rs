//! Integration posets: element storage, Hasse covers, JSON and DOT output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::groups::{Int, Lattice};

/// One enumerated integration: a family of subgroup lattices keyed by slot
/// name (`v:<id>`, `e:<id>`, `h:<id>` for graph classifications, `K+`/`K`/...
/// for the local ones), plus derived data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Integration {
    pub key: String,
    /// Subgroup lattices in the ambient coordinates of their slot's group.
    pub subgroups: BTreeMap<String, LatticeData>,
    pub hausdorff: bool,
    /// Source-fiber fundamental groups per degeneracy component.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub source_fibers: BTreeMap<String, LatticeData>,
    /// Restriction subgroups K_{ji} per (component, side).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub restrictions: BTreeMap<String, LatticeData>,
}

/// Serializable HNF matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeData {
    pub hnf: Vec<Vec<Int>>,
}

impl LatticeData {
    pub fn from_lattice(l: &Lattice) -> Self {
        LatticeData {
            hnf: l.basis().to_vec(),
        }
    }

    pub fn to_lattice(&self, n: usize) -> Lattice {
        Lattice::from_generators(n, &self.hnf)
    }
}

pub fn lattice_key(rows: &[Vec<Int>]) -> String {
    let rows: Vec<String> = rows
        .iter()
        .map(|r| {
            let xs: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            format!("[{}]", xs.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

/// Key an element by the concatenated canonical forms of its slots.
pub fn element_key(subgroups: &BTreeMap<String, LatticeData>) -> String {
    subgroups
        .iter()
        .map(|(slot, l)| format!("{slot}={}", lattice_key(&l.hnf)))
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PosetMode {
    Logtan,
    LogsympHausdorff,
    LogtanOr,
    LogtanNonor,
    LogsympOr,
    LogsympNonor,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegrationPoset {
    pub mode: PosetMode,
    pub bound: u64,
    /// FNV-1a digest of the canonical input description, used to match a
    /// poset back to the graph that produced it.
    pub provenance: String,
    pub elements: Vec<Integration>,
    /// Hasse covers as index pairs `(a, b)` with `a` covered by `b`.
    pub covers: Vec<(usize, usize)>,
    pub minimum: Option<usize>,
    pub maximum: Option<usize>,
}

impl IntegrationPoset {
    /// Componentwise inclusion of subgroup families (the slots must agree).
    pub fn le(a: &Integration, b: &Integration) -> bool {
        debug_assert_eq!(a.subgroups.len(), b.subgroups.len());
        a.subgroups.iter().all(|(slot, la)| {
            let lb = &b.subgroups[slot];
            let n = la.hnf.first().map(|r| r.len()).unwrap_or(0);
            let n = n.max(lb.hnf.first().map(|r| r.len()).unwrap_or(0));
            la.to_lattice(n).is_sublattice_of(&lb.to_lattice(n))
        })
    }

    /// Assemble a poset from elements: sorts by key, computes Hasse covers by
    /// transitive reduction, and locates minimum and maximum when they exist.
    pub fn assemble(
        mode: PosetMode,
        bound: u64,
        provenance: String,
        mut elements: Vec<Integration>,
    ) -> Self {
        elements.sort_by(|a, b| a.key.cmp(&b.key));
        elements.dedup_by(|a, b| a.key == b.key);
        let n = elements.len();
        let mut le = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                le[i][j] = i == j || Self::le(&elements[i], &elements[j]);
            }
        }
        let covers = hasse_from_le(&le);
        let minimum = (0..n).find(|&i| (0..n).all(|j| le[i][j]));
        let maximum = (0..n).find(|&i| (0..n).all(|j| le[j][i]));
        IntegrationPoset {
            mode,
            bound,
            provenance,
            elements,
            covers,
            minimum,
            maximum,
        }
    }

    /// Stable DOT rendering of the Hasse diagram, nodes named by element keys.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for e in &self.elements {
            let shape = if e.hausdorff { "box" } else { "ellipse" };
            out.push_str(&format!("  \"{}\" [shape={}];\n", e.key, shape));
        }
        for &(a, b) in &self.covers {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                self.elements[a].key, self.elements[b].key
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Transitive reduction of a finite partial order given as an `le` matrix:
/// covers are pairs a < b with nothing strictly between.
pub fn hasse_from_le(le: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let n = le.len();
    let lt = |i: usize, j: usize| i != j && le[i][j] && !le[j][i];
    let mut covers = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)) {
                covers.push((a, b));
            }
        }
    }
    covers.sort();
    covers
}

/// Transitive reduction from an explicit order predicate on a slice.
pub fn poset_hasse<T, F: Fn(&T, &T) -> bool>(elements: &[T], le: F) -> Vec<(usize, usize)> {
    let n = elements.len();
    let mut mat = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            mat[i][j] = i == j || le(&elements[i], &elements[j]);
        }
    }
    hasse_from_le(&mat)
}

/// Tiny FNV-1a digest for provenance strings; not cryptographic, just stable.
pub fn fnv1a(data: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in data.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}
