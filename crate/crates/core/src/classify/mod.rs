//! Graphs of groups and the combinatorial classification of integrations.
//!
//! A [`GraphOfGroups`] carries the fundamental-group data of a manifold with
//! degeneracy hypersurface: vertex groups for the open components, edge
//! groups for two-sided components (with homomorphisms δ into the adjacent
//! vertex groups), half-edge groups for one-sided components (with the
//! index-2 kernel of the first Stiefel–Whitney class and δ defined on that
//! kernel), and optional leaf data (π₁ of a symplectic leaf with its
//! inclusion ι) required in log symplectic mode.
//!
//! [`classify_logtan`] enumerates normal-subgroup families (K_i, K_j)
//! satisfying the edge conditions K_j ⊆ δ⁻¹(K_i) on each side (taken inside
//! ker w₁ for half-edges), bounded by subgroup index. Hausdorff elements are
//! the equality cases. [`classify_logsymp_hausdorff`] enumerates vertex
//! families whose leaf restrictions agree across each edge; half-edges impose
//! no condition.

pub mod local;
pub mod mtcheck;
pub mod poset;

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{FgGroup, GroupError, Int, Lattice, Presentation};

pub use local::{classify_local, LocalCase, LocalData};
pub use mtcheck::{verify_integration_mt, MtCandidate, MtVerificationReport};
pub use poset::{
    fnv1a, hasse_from_le, poset_hasse, Integration, IntegrationPoset, LatticeData, PosetMode,
};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("graph validation failed: {0:?}")]
    InvalidGraph(Vec<String>),
    #[error("graph contains mapping-torus groups; use the verification entry points (verify-mt)")]
    MappingTorusPresent,
    #[error("log symplectic classification requires leaf data on every edge and half-edge")]
    MissingLeaf,
    #[error("poset provenance does not match this graph/mode")]
    ProvenanceMismatch,
    #[error("not an integration of this graph: {0}")]
    NonIntegration(String),
    #[error("unknown component id {0}")]
    UnknownComponent(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A homomorphism slot in the JSON schema: an explicit matrix (rows = images
/// of source generators), or one of the named maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HomSpec {
    Named(NamedHom),
    Matrix { matrix: Vec<Vec<Int>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedHom {
    /// Identity; requires identical source and target groups.
    Identity,
    /// Canonical fiber inclusion ℤⁿ ↪ ℤ ⋉ ℤⁿ (mapping-torus leaves only).
    Fiber,
}

impl HomSpec {
    pub fn matrix(m: Vec<Vec<Int>>) -> Self {
        HomSpec::Matrix { matrix: m }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub group: FgGroup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Leaf {
    pub group: FgGroup,
    pub iota: HomSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Edge {
    pub id: String,
    /// The two incident vertices; equal ids make the edge a loop, in which
    /// case the two δ homomorphisms are still independent.
    pub endpoints: (String, String),
    pub group: FgGroup,
    pub delta_left: HomSpec,
    pub delta_right: HomSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<Leaf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HalfEdge {
    pub id: String,
    pub vertex: String,
    pub group: FgGroup,
    /// HNF lattice of ker w₁ inside the half-edge group (index 2).
    pub w: Vec<Vec<Int>>,
    /// δ from ker w₁ (in the coordinates of its HNF basis rows) to the vertex
    /// group.
    pub delta: HomSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<Leaf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphOfGroups {
    #[serde(default)]
    pub vertices: Vec<Vertex>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub half_edges: Vec<HalfEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphMode {
    Logtan,
    LogsympHausdorff,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

impl GraphOfGroups {
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization")
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    fn has_mapping_torus(&self) -> bool {
        self.vertices.iter().any(|v| !v.group.is_abelian())
            || self.edges.iter().any(|e| !e.group.is_abelian())
            || self.half_edges.iter().any(|h| !h.group.is_abelian())
    }
}

/// Report-style validation of the graph invariants for the given mode.
pub fn validate_graph(g: &GraphOfGroups, mode: GraphMode) -> ValidationReport {
    let mut violations = Vec::new();
    let mut ids = std::collections::HashSet::new();
    for v in &g.vertices {
        if !ids.insert(format!("v:{}", v.id)) {
            violations.push(format!("duplicate vertex id {}", v.id));
        }
        if let Err(e) = v.group.validate() {
            violations.push(format!("vertex {}: {e}", v.id));
        }
    }
    for e in &g.edges {
        if !ids.insert(format!("e:{}", e.id)) {
            violations.push(format!("duplicate edge id {}", e.id));
        }
        for end in [&e.endpoints.0, &e.endpoints.1] {
            if g.vertex(end).is_none() {
                violations.push(format!("edge {}: unknown endpoint {end}", e.id));
            }
        }
        if mode == GraphMode::LogsympHausdorff && e.leaf.is_none() {
            violations.push(format!("edge {}: missing leaf data (iota)", e.id));
        }
    }
    for h in &g.half_edges {
        if !ids.insert(format!("h:{}", h.id)) {
            violations.push(format!("duplicate half-edge id {}", h.id));
        }
        if g.vertex(&h.vertex).is_none() {
            violations.push(format!("half-edge {}: unknown vertex {}", h.id, h.vertex));
        }
        if mode == GraphMode::LogsympHausdorff && h.leaf.is_none() {
            violations.push(format!("half-edge {}: missing leaf data (iota)", h.id));
        }
        if h.group.is_abelian() {
            match h.group.presentation() {
                Ok(pres) => {
                    let w = Lattice::from_generators(pres.n, &h.w);
                    if !pres.relations.is_sublattice_of(&w) {
                        violations.push(format!(
                            "half-edge {}: ker w1 lattice does not contain the relations",
                            h.id
                        ));
                    } else if w.index_in_ambient() != Some(2) {
                        violations.push(format!(
                            "half-edge {}: ker w1 must have index 2, got {:?}",
                            h.id,
                            w.index_in_ambient()
                        ));
                    }
                }
                Err(e) => violations.push(format!("half-edge {}: {e}", h.id)),
            }
        }
    }
    // resolve all homomorphisms (dimension/torsion checks)
    if !g.has_mapping_torus() {
        if let Err(e) = ResolvedGraph::resolve(g, mode == GraphMode::LogsympHausdorff) {
            match e {
                ClassifyError::InvalidGraph(vs) => violations.extend(vs),
                other => violations.push(other.to_string()),
            }
        }
    }
    ValidationReport {
        valid: violations.is_empty(),
        violations,
    }
}

/// A resolved homomorphism at the lattice level: `matrix` rows are images of
/// the source presentation's generators in the target presentation.
#[derive(Debug, Clone)]
pub(crate) struct LatticeHom {
    pub matrix: Vec<Vec<Int>>,
    pub source: Presentation,
    pub target: Presentation,
}

impl LatticeHom {
    fn validate(&self, context: &str) -> Result<(), ClassifyError> {
        if self.matrix.len() != self.source.n {
            return Err(ClassifyError::InvalidGraph(vec![format!(
                "{context}: matrix has {} rows, expected {}",
                self.matrix.len(),
                self.source.n
            )]));
        }
        for row in &self.matrix {
            if row.len() != self.target.n {
                return Err(ClassifyError::InvalidGraph(vec![format!(
                    "{context}: matrix row has {} columns, expected {}",
                    row.len(),
                    self.target.n
                )]));
            }
        }
        for rel in self.source.relations.basis() {
            let img = crate::groups::apply_matrix(rel, &self.matrix, self.target.n);
            if !self.target.relations.contains_vector(&img) {
                return Err(ClassifyError::InvalidGraph(vec![format!(
                    "{context}: source relation {rel:?} does not map into target relations"
                )]));
            }
        }
        Ok(())
    }

    /// Exact preimage of a subgroup lattice of the target (contains the
    /// source relations).
    pub fn preimage(&self, target_subgroup: &Lattice) -> Lattice {
        let pre = Lattice::preimage(&self.matrix, self.target.n, target_subgroup);
        pre.sum(&self.source.relations)
    }

    /// Pushforward of a subgroup lattice of the source (contains the target
    /// relations).
    pub fn image(&self, source_subgroup: &Lattice) -> Lattice {
        source_subgroup
            .image(&self.matrix, self.target.n)
            .sum(&self.target.relations)
    }

    /// Kernel, as a subgroup lattice of the source.
    pub fn kernel(&self) -> Lattice {
        self.preimage(&self.target.relations)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ResolvedEdge {
    pub left: usize,
    pub right: usize,
    pub pres: Presentation,
    pub delta_left: LatticeHom,
    pub delta_right: LatticeHom,
    pub leaf: Option<LatticeHom>, // iota: leaf presentation -> edge presentation
}

#[derive(Debug, Clone)]
pub(crate) struct ResolvedHalfEdge {
    pub vertex: usize,
    pub ambient: Presentation,
    /// ker w₁ as a lattice in the ambient coordinates.
    pub w_lattice: Lattice,
    /// ker w₁ as a group in the coordinates of its own HNF basis rows.
    pub w_pres: Presentation,
    /// Basis rows of the W lattice (maps W coordinates to ambient ones).
    pub basis: Vec<Vec<Int>>,
    /// δ from W coordinates to the vertex presentation.
    pub delta: LatticeHom,
    pub leaf: Option<LatticeHom>, // iota: leaf presentation -> ambient edge group
}

impl ResolvedHalfEdge {
    /// Convert a subgroup lattice given in W coordinates to ambient
    /// coordinates.
    pub fn w_to_ambient(&self, l: &Lattice) -> Lattice {
        l.image(&self.basis, self.ambient.n)
            .sum(&self.ambient.relations)
    }

    /// Convert an ambient-coordinates sublattice of W into W coordinates.
    pub fn ambient_to_w(&self, l: &Lattice) -> Result<Lattice, ClassifyError> {
        let mut rows = Vec::new();
        for v in l.basis() {
            let x = Lattice::solve_in_span(&self.basis, self.ambient.n, v).ok_or_else(|| {
                ClassifyError::NonIntegration(format!(
                    "half-edge subgroup generator {v:?} is not inside ker w1"
                ))
            })?;
            rows.push(x);
        }
        rows.extend(self.w_pres.relations.basis().iter().cloned());
        Ok(Lattice::from_generators(self.w_pres.n, &rows))
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ResolvedGraph {
    pub vertex_ids: Vec<String>,
    pub vertex_pres: Vec<Presentation>,
    pub edge_ids: Vec<String>,
    pub edges: Vec<ResolvedEdge>,
    pub half_edge_ids: Vec<String>,
    pub half_edges: Vec<ResolvedHalfEdge>,
}

fn resolve_hom(
    spec: &HomSpec,
    source: &Presentation,
    target: &Presentation,
    context: &str,
) -> Result<LatticeHom, ClassifyError> {
    let matrix = match spec {
        HomSpec::Matrix { matrix } => matrix.clone(),
        HomSpec::Named(NamedHom::Identity) => {
            if source != target {
                return Err(ClassifyError::InvalidGraph(vec![format!(
                    "{context}: identity requires identical source and target groups"
                )]));
            }
            (0..source.n)
                .map(|i| (0..source.n).map(|j| Int::from(i == j)).collect())
                .collect()
        }
        HomSpec::Named(NamedHom::Fiber) => {
            return Err(ClassifyError::InvalidGraph(vec![format!(
                "{context}: 'fiber' is only meaningful for mapping-torus leaves"
            )]));
        }
    };
    let hom = LatticeHom {
        matrix,
        source: source.clone(),
        target: target.clone(),
    };
    hom.validate(context)?;
    Ok(hom)
}

impl ResolvedGraph {
    pub fn resolve(g: &GraphOfGroups, need_leaf: bool) -> Result<Self, ClassifyError> {
        if g.has_mapping_torus() {
            return Err(ClassifyError::MappingTorusPresent);
        }
        let vertex_ids: Vec<String> = g.vertices.iter().map(|v| v.id.clone()).collect();
        let vertex_pres: Vec<Presentation> = g
            .vertices
            .iter()
            .map(|v| v.group.presentation().map_err(ClassifyError::from))
            .collect::<Result<_, _>>()?;
        let vid = |id: &str| -> Result<usize, ClassifyError> {
            vertex_ids
                .iter()
                .position(|v| v == id)
                .ok_or_else(|| ClassifyError::InvalidGraph(vec![format!("unknown vertex {id}")]))
        };
        let mut edges = Vec::new();
        for e in &g.edges {
            let left = vid(&e.endpoints.0)?;
            let right = vid(&e.endpoints.1)?;
            let pres = e.group.presentation()?;
            let delta_left = resolve_hom(
                &e.delta_left,
                &pres,
                &vertex_pres[left],
                &format!("edge {} deltaLeft", e.id),
            )?;
            let delta_right = resolve_hom(
                &e.delta_right,
                &pres,
                &vertex_pres[right],
                &format!("edge {} deltaRight", e.id),
            )?;
            let leaf = match &e.leaf {
                Some(l) => {
                    let lp = l.group.presentation()?;
                    Some(resolve_hom(
                        &l.iota,
                        &lp,
                        &pres,
                        &format!("edge {} iota", e.id),
                    )?)
                }
                None if need_leaf => return Err(ClassifyError::MissingLeaf),
                None => None,
            };
            edges.push(ResolvedEdge {
                left,
                right,
                pres,
                delta_left,
                delta_right,
                leaf,
            });
        }
        let mut half_edges = Vec::new();
        for h in &g.half_edges {
            let vertex = vid(&h.vertex)?;
            let ambient = h.group.presentation()?;
            let w_lattice = Lattice::from_generators(ambient.n, &h.w);
            if !ambient.relations.is_sublattice_of(&w_lattice) {
                return Err(ClassifyError::InvalidGraph(vec![format!(
                    "half-edge {}: ker w1 lattice must contain the relations",
                    h.id
                )]));
            }
            if w_lattice.index_in_ambient() != Some(2) {
                return Err(ClassifyError::InvalidGraph(vec![format!(
                    "half-edge {}: ker w1 must have index 2, got {:?}",
                    h.id,
                    w_lattice.index_in_ambient()
                )]));
            }
            let basis = w_lattice.basis().to_vec();
            let mut rel_rows = Vec::new();
            for rel in ambient.relations.basis() {
                let x = Lattice::solve_in_span(&basis, ambient.n, rel).ok_or_else(|| {
                    ClassifyError::Internal("relations not inside ker w1".into())
                })?;
                rel_rows.push(x);
            }
            let w_pres = Presentation {
                n: basis.len(),
                relations: Lattice::from_generators(basis.len(), &rel_rows),
            };
            let delta = resolve_hom(
                &h.delta,
                &w_pres,
                &vertex_pres[vertex],
                &format!("half-edge {} delta", h.id),
            )?;
            let leaf = match &h.leaf {
                Some(l) => {
                    let lp = l.group.presentation()?;
                    Some(resolve_hom(
                        &l.iota,
                        &lp,
                        &ambient,
                        &format!("half-edge {} iota", h.id),
                    )?)
                }
                None if need_leaf => return Err(ClassifyError::MissingLeaf),
                None => None,
            };
            half_edges.push(ResolvedHalfEdge {
                vertex,
                ambient,
                w_lattice,
                w_pres,
                basis,
                delta,
                leaf,
            });
        }
        Ok(ResolvedGraph {
            vertex_ids,
            vertex_pres,
            edge_ids: g.edges.iter().map(|e| e.id.clone()).collect(),
            edges,
            half_edge_ids: g.half_edges.iter().map(|h| h.id.clone()).collect(),
            half_edges,
        })
    }
}

fn provenance(g: &GraphOfGroups, mode: PosetMode, bound: u64) -> String {
    fnv1a(&format!("{mode:?}|{bound}|{}", g.canonical_json()))
}

/// Shared element-construction helper for the log tangent classification.
fn logtan_element(
    rg: &ResolvedGraph,
    vchoice: &[&Lattice],
    echoice: &[&Lattice],
    hchoice: &[&Lattice], // in W coordinates
) -> Integration {
    let mut subgroups = BTreeMap::new();
    let mut source_fibers = BTreeMap::new();
    let mut restrictions = BTreeMap::new();
    let mut hausdorff = true;
    for (i, l) in vchoice.iter().enumerate() {
        subgroups.insert(
            format!("v:{}", rg.vertex_ids[i]),
            LatticeData::from_lattice(l),
        );
    }
    for (j, e) in rg.edges.iter().enumerate() {
        let kj = echoice[j];
        let pre_l = e.delta_left.preimage(vchoice[e.left]);
        let pre_r = e.delta_right.preimage(vchoice[e.right]);
        hausdorff &= kj == &pre_l && kj == &pre_r;
        subgroups.insert(
            format!("e:{}", rg.edge_ids[j]),
            LatticeData::from_lattice(kj),
        );
        source_fibers.insert(
            format!("e:{}", rg.edge_ids[j]),
            LatticeData::from_lattice(kj),
        );
        restrictions.insert(
            format!("e:{}:left", rg.edge_ids[j]),
            LatticeData::from_lattice(&pre_l),
        );
        restrictions.insert(
            format!("e:{}:right", rg.edge_ids[j]),
            LatticeData::from_lattice(&pre_r),
        );
    }
    for (j, h) in rg.half_edges.iter().enumerate() {
        let kw = hchoice[j];
        let pre = h.delta.preimage(vchoice[h.vertex]);
        hausdorff &= kw == &pre;
        let ambient_k = h.w_to_ambient(kw);
        subgroups.insert(
            format!("h:{}", rg.half_edge_ids[j]),
            LatticeData::from_lattice(&ambient_k),
        );
        source_fibers.insert(
            format!("h:{}", rg.half_edge_ids[j]),
            LatticeData::from_lattice(&ambient_k),
        );
        restrictions.insert(
            format!("h:{}", rg.half_edge_ids[j]),
            LatticeData::from_lattice(&h.w_to_ambient(&pre)),
        );
    }
    let key = poset::element_key(&subgroups);
    Integration {
        key,
        subgroups,
        hausdorff,
        source_fibers,
        restrictions,
    }
}

/// Enumerate all integrations of the log tangent algebroid encoded by `g`,
/// drawing subgroups from the bounded enumeration universe (index ≤ `bound`
/// plus the trivial subgroup).
pub fn classify_logtan(g: &GraphOfGroups, bound: u64) -> Result<IntegrationPoset, ClassifyError> {
    if g.has_mapping_torus() {
        return Err(ClassifyError::MappingTorusPresent);
    }
    let report = validate_graph(g, GraphMode::Logtan);
    if !report.valid {
        return Err(ClassifyError::InvalidGraph(report.violations));
    }
    let rg = ResolvedGraph::resolve(g, false)?;
    let v_universe: Vec<Vec<Lattice>> = rg
        .vertex_pres
        .iter()
        .map(|p| p.enumerate_subgroups(bound, true))
        .collect();
    let e_universe: Vec<Vec<Lattice>> = rg
        .edges
        .iter()
        .map(|e| e.pres.enumerate_subgroups(bound, true))
        .collect();
    let h_universe: Vec<Vec<Lattice>> = rg
        .half_edges
        .iter()
        .map(|h| h.w_pres.enumerate_subgroups(bound, true))
        .collect();

    let mut elements = Vec::new();
    let v_sizes: Vec<usize> = v_universe.iter().map(Vec::len).collect();
    for vidx in v_sizes.iter().map(|&s| 0..s).multi_cartesian_product() {
        let vchoice: Vec<&Lattice> = vidx
            .iter()
            .enumerate()
            .map(|(i, &k)| &v_universe[i][k])
            .collect();
        // admissible edge/half-edge subgroups for this vertex family
        let e_pre: Vec<(Lattice, Lattice)> = rg
            .edges
            .iter()
            .map(|e| {
                (
                    e.delta_left.preimage(vchoice[e.left]),
                    e.delta_right.preimage(vchoice[e.right]),
                )
            })
            .collect();
        let h_pre: Vec<Lattice> = rg
            .half_edges
            .iter()
            .map(|h| h.delta.preimage(vchoice[h.vertex]))
            .collect();
        let e_admissible: Vec<Vec<&Lattice>> = e_universe
            .iter()
            .zip(&e_pre)
            .map(|(universe, (pl, pr))| {
                universe
                    .iter()
                    .filter(|k| k.is_sublattice_of(pl) && k.is_sublattice_of(pr))
                    .collect()
            })
            .collect();
        let h_admissible: Vec<Vec<&Lattice>> = h_universe
            .iter()
            .zip(&h_pre)
            .map(|(universe, p)| {
                universe.iter().filter(|k| k.is_sublattice_of(p)).collect()
            })
            .collect();
        let e_sizes: Vec<usize> = e_admissible.iter().map(Vec::len).collect();
        let h_sizes: Vec<usize> = h_admissible.iter().map(Vec::len).collect();
        let mut sizes = e_sizes.clone();
        sizes.extend(h_sizes.iter().copied());
        for mixed in sizes.iter().map(|&s| 0..s).multi_cartesian_product() {
            let echoice: Vec<&Lattice> = (0..rg.edges.len())
                .map(|j| e_admissible[j][mixed[j]])
                .collect();
            let hchoice: Vec<&Lattice> = (0..rg.half_edges.len())
                .map(|j| h_admissible[j][mixed[rg.edges.len() + j]])
                .collect();
            elements.push(logtan_element(&rg, &vchoice, &echoice, &hchoice));
        }
    }
    let poset = IntegrationPoset::assemble(
        PosetMode::Logtan,
        bound,
        provenance(g, PosetMode::Logtan, bound),
        elements,
    );
    audit_logtan(&rg, &poset)?;
    Ok(poset)
}

/// Self-audit: re-verify every emitted element against the raw subset
/// conditions, and every Hausdorff flag against the equality predicate.
fn audit_logtan(rg: &ResolvedGraph, poset: &IntegrationPoset) -> Result<(), ClassifyError> {
    for el in &poset.elements {
        let vlat: Vec<Lattice> = rg
            .vertex_ids
            .iter()
            .zip(&rg.vertex_pres)
            .map(|(id, p)| el.subgroups[&format!("v:{id}")].to_lattice(p.n))
            .collect();
        let mut hausdorff = true;
        for (j, e) in rg.edges.iter().enumerate() {
            let kj = el.subgroups[&format!("e:{}", rg.edge_ids[j])].to_lattice(e.pres.n);
            let pl = e.delta_left.preimage(&vlat[e.left]);
            let pr = e.delta_right.preimage(&vlat[e.right]);
            if !(kj.is_sublattice_of(&pl) && kj.is_sublattice_of(&pr)) {
                return Err(ClassifyError::Internal(format!(
                    "audit failed: element {} violates edge condition {}",
                    el.key, rg.edge_ids[j]
                )));
            }
            hausdorff &= kj == pl && kj == pr;
        }
        for (j, h) in rg.half_edges.iter().enumerate() {
            let ka = el.subgroups[&format!("h:{}", rg.half_edge_ids[j])].to_lattice(h.ambient.n);
            if !ka.is_sublattice_of(&h.w_lattice) {
                return Err(ClassifyError::Internal(format!(
                    "audit failed: element {} half-edge subgroup not inside ker w1",
                    el.key
                )));
            }
            let kw = h.ambient_to_w(&ka)?;
            let pre = h.delta.preimage(&vlat[h.vertex]);
            if !kw.is_sublattice_of(&pre) {
                return Err(ClassifyError::Internal(format!(
                    "audit failed: element {} violates half-edge condition {}",
                    el.key, rg.half_edge_ids[j]
                )));
            }
            hausdorff &= kw == pre;
        }
        if hausdorff != el.hausdorff {
            return Err(ClassifyError::Internal(format!(
                "audit failed: element {} hausdorff flag mismatch",
                el.key
            )));
        }
    }
    Ok(())
}

/// Re-validate an emitted poset against its graph: provenance, the raw
/// subset/equality conditions of every element, and the Hasse covers.
pub fn revalidate(g: &GraphOfGroups, poset: &IntegrationPoset) -> Result<(), ClassifyError> {
    match poset.mode {
        PosetMode::Logtan => {
            if poset.provenance != provenance(g, PosetMode::Logtan, poset.bound) {
                return Err(ClassifyError::ProvenanceMismatch);
            }
            let rg = ResolvedGraph::resolve(g, false)?;
            audit_logtan(&rg, poset)?;
        }
        PosetMode::LogsympHausdorff => {
            if poset.provenance != provenance(g, PosetMode::LogsympHausdorff, poset.bound) {
                return Err(ClassifyError::ProvenanceMismatch);
            }
            let rg = ResolvedGraph::resolve(g, true)?;
            for el in &poset.elements {
                for (j, e) in rg.edges.iter().enumerate() {
                    let iota = e.leaf.as_ref().ok_or(ClassifyError::MissingLeaf)?;
                    let kl = el.subgroups[&format!("v:{}", rg.vertex_ids[e.left])]
                        .to_lattice(rg.vertex_pres[e.left].n);
                    let kr = el.subgroups[&format!("v:{}", rg.vertex_ids[e.right])]
                        .to_lattice(rg.vertex_pres[e.right].n);
                    if iota.preimage(&e.delta_left.preimage(&kl))
                        != iota.preimage(&e.delta_right.preimage(&kr))
                    {
                        return Err(ClassifyError::Internal(format!(
                            "audit failed: element {} violates the leaf condition on edge {}",
                            el.key, rg.edge_ids[j]
                        )));
                    }
                }
            }
        }
        _ => {
            // local posets carry their conditions in their construction; the
            // provenance digest is the only load-time check
        }
    }
    // covers must be the transitive reduction of componentwise inclusion
    let recomputed = IntegrationPoset::assemble(
        poset.mode,
        poset.bound,
        poset.provenance.clone(),
        poset.elements.clone(),
    );
    if recomputed.covers != poset.covers {
        return Err(ClassifyError::Internal(
            "audit failed: covers are not the transitive reduction".into(),
        ));
    }
    Ok(())
}

/// Keep only the Hausdorff elements of a log tangent poset, re-assembling the
/// Hasse diagram on the sub-poset. The equality conditions are re-checked by
/// the audit pass; normality of half-edge subgroups in their ambient group is
/// automatic here since all groups in enumeration mode are abelian.
pub fn hausdorff_filter_logtan(
    p: &IntegrationPoset,
    g: &GraphOfGroups,
) -> Result<IntegrationPoset, ClassifyError> {
    if p.mode != PosetMode::Logtan || p.provenance != provenance(g, PosetMode::Logtan, p.bound) {
        return Err(ClassifyError::ProvenanceMismatch);
    }
    let rg = ResolvedGraph::resolve(g, false)?;
    let elements: Vec<Integration> = p
        .elements
        .iter()
        .filter(|e| e.hausdorff)
        .cloned()
        .collect();
    let filtered = IntegrationPoset::assemble(
        PosetMode::Logtan,
        p.bound,
        p.provenance.clone(),
        elements,
    );
    audit_logtan(&rg, &filtered)?;
    Ok(filtered)
}

/// Enumerate the Hausdorff log symplectic integrations: vertex families whose
/// leaf restrictions agree across every edge. Half-edges impose no condition.
pub fn classify_logsymp_hausdorff(
    g: &GraphOfGroups,
    bound: u64,
) -> Result<IntegrationPoset, ClassifyError> {
    if g.has_mapping_torus() {
        return Err(ClassifyError::MappingTorusPresent);
    }
    let report = validate_graph(g, GraphMode::LogsympHausdorff);
    if !report.valid {
        return Err(ClassifyError::InvalidGraph(report.violations));
    }
    let rg = ResolvedGraph::resolve(g, true)?;
    let v_universe: Vec<Vec<Lattice>> = rg
        .vertex_pres
        .iter()
        .map(|p| p.enumerate_subgroups(bound, true))
        .collect();
    let mut elements = Vec::new();
    let sizes: Vec<usize> = v_universe.iter().map(Vec::len).collect();
    'tuple: for vidx in sizes.iter().map(|&s| 0..s).multi_cartesian_product() {
        let vchoice: Vec<&Lattice> = vidx
            .iter()
            .enumerate()
            .map(|(i, &k)| &v_universe[i][k])
            .collect();
        let mut source_fibers = BTreeMap::new();
        let mut restrictions = BTreeMap::new();
        for (j, e) in rg.edges.iter().enumerate() {
            let iota = e.leaf.as_ref().expect("leaf checked by validation");
            let pre_l = e.delta_left.preimage(vchoice[e.left]);
            let pre_r = e.delta_right.preimage(vchoice[e.right]);
            let leaf_l = iota.preimage(&pre_l);
            let leaf_r = iota.preimage(&pre_r);
            if leaf_l != leaf_r {
                continue 'tuple;
            }
            source_fibers.insert(
                format!("e:{}", rg.edge_ids[j]),
                LatticeData::from_lattice(&leaf_l),
            );
            restrictions.insert(
                format!("e:{}:left", rg.edge_ids[j]),
                LatticeData::from_lattice(&pre_l),
            );
            restrictions.insert(
                format!("e:{}:right", rg.edge_ids[j]),
                LatticeData::from_lattice(&pre_r),
            );
        }
        for (j, h) in rg.half_edges.iter().enumerate() {
            let iota = h.leaf.as_ref().expect("leaf checked by validation");
            let pre_w = h.delta.preimage(vchoice[h.vertex]);
            let pre_ambient = h.w_to_ambient(&pre_w);
            let leaf = iota.preimage(&pre_ambient);
            source_fibers.insert(
                format!("h:{}", rg.half_edge_ids[j]),
                LatticeData::from_lattice(&leaf),
            );
            restrictions.insert(
                format!("h:{}", rg.half_edge_ids[j]),
                LatticeData::from_lattice(&pre_ambient),
            );
        }
        let mut subgroups = BTreeMap::new();
        for (i, l) in vchoice.iter().enumerate() {
            subgroups.insert(
                format!("v:{}", rg.vertex_ids[i]),
                LatticeData::from_lattice(l),
            );
        }
        let key = poset::element_key(&subgroups);
        elements.push(Integration {
            key,
            subgroups,
            hausdorff: true,
            source_fibers,
            restrictions,
        });
    }
    let poset = IntegrationPoset::assemble(
        PosetMode::LogsympHausdorff,
        bound,
        provenance(g, PosetMode::LogsympHausdorff, bound),
        elements,
    );
    Ok(poset)
}

/// Fundamental group of the source fiber over the component `id` for the
/// given integration.
///
/// Log tangent mode returns the edge/half-edge subgroup itself (in the
/// component group's ambient coordinates); log symplectic mode returns the
/// leaf restriction ι⁻¹δ⁻¹K_i, computed from both sides on an edge with an
/// equality assertion.
pub fn source_fiber_group(
    g: &GraphOfGroups,
    integration: &Integration,
    mode: PosetMode,
    component: &str,
) -> Result<LatticeData, ClassifyError> {
    let rg = ResolvedGraph::resolve(g, mode == PosetMode::LogsympHausdorff)?;
    match mode {
        PosetMode::Logtan => {
            let slot_e = format!("e:{component}");
            let slot_h = format!("h:{component}");
            integration
                .subgroups
                .get(&slot_e)
                .or_else(|| integration.subgroups.get(&slot_h))
                .cloned()
                .ok_or_else(|| ClassifyError::UnknownComponent(component.to_string()))
        }
        PosetMode::LogsympHausdorff => {
            if let Some(j) = rg.edge_ids.iter().position(|e| e == component) {
                let e = &rg.edges[j];
                let iota = e.leaf.as_ref().ok_or(ClassifyError::MissingLeaf)?;
                let kl = integration.subgroups[&format!("v:{}", rg.vertex_ids[e.left])]
                    .to_lattice(rg.vertex_pres[e.left].n);
                let kr = integration.subgroups[&format!("v:{}", rg.vertex_ids[e.right])]
                    .to_lattice(rg.vertex_pres[e.right].n);
                let leaf_l = iota.preimage(&e.delta_left.preimage(&kl));
                let leaf_r = iota.preimage(&e.delta_right.preimage(&kr));
                if leaf_l != leaf_r {
                    return Err(ClassifyError::NonIntegration(format!(
                        "leaf restrictions disagree across edge {component}"
                    )));
                }
                Ok(LatticeData::from_lattice(&leaf_l))
            } else if let Some(j) = rg.half_edge_ids.iter().position(|h| h == component) {
                let h = &rg.half_edges[j];
                let iota = h.leaf.as_ref().ok_or(ClassifyError::MissingLeaf)?;
                let ki = integration.subgroups[&format!("v:{}", rg.vertex_ids[h.vertex])]
                    .to_lattice(rg.vertex_pres[h.vertex].n);
                let pre_ambient = h.w_to_ambient(&h.delta.preimage(&ki));
                Ok(LatticeData::from_lattice(&iota.preimage(&pre_ambient)))
            } else {
                Err(ClassifyError::UnknownComponent(component.to_string()))
            }
        }
        other => Err(ClassifyError::Internal(format!(
            "source_fiber_group is not defined for mode {other:?}"
        ))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SscWitness {
    pub component: String,
    pub side: String,
    pub generator: Vec<Int>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SscReport {
    pub hausdorff_ssc: bool,
    pub witnesses: Vec<SscWitness>,
}

/// Decide whether the source-simply-connected integration is Hausdorff: for
/// every edge/half-edge and attached vertex, the kernel of δ∘ι (restricted to
/// ker w₁ on half-edges) must be trivial. Witnesses are generators of a
/// nontrivial kernel.
pub fn ssc_hausdorff_check(g: &GraphOfGroups) -> Result<SscReport, ClassifyError> {
    if g.has_mapping_torus() {
        return mtcheck::ssc_check_mt(g);
    }
    let rg = ResolvedGraph::resolve(g, true)?;
    let mut witnesses = Vec::new();
    for (j, e) in rg.edges.iter().enumerate() {
        let iota = e.leaf.as_ref().ok_or(ClassifyError::MissingLeaf)?;
        for (side, delta) in [("left", &e.delta_left), ("right", &e.delta_right)] {
            let kernel = iota.preimage(&delta.kernel());
            for v in kernel.basis() {
                if !iota.source.relations.contains_vector(v) {
                    witnesses.push(SscWitness {
                        component: rg.edge_ids[j].clone(),
                        side: side.to_string(),
                        generator: v.clone(),
                    });
                }
            }
        }
    }
    for (j, h) in rg.half_edges.iter().enumerate() {
        let iota = h.leaf.as_ref().ok_or(ClassifyError::MissingLeaf)?;
        let kernel_w = h.delta.kernel();
        let kernel = iota.preimage(&h.w_to_ambient(&kernel_w));
        // restrict to classes landing inside ker w1
        let in_w = iota.preimage(&h.w_lattice);
        let restricted = kernel.intersect(&in_w).sum(&iota.source.relations);
        for v in restricted.basis() {
            if !iota.source.relations.contains_vector(v) {
                witnesses.push(SscWitness {
                    component: rg.half_edge_ids[j].clone(),
                    side: "half".to_string(),
                    generator: v.clone(),
                });
            }
        }
    }
    Ok(SscReport {
        hausdorff_ssc: witnesses.is_empty(),
        witnesses,
    })
}

#[cfg(test)]
mod tests;
