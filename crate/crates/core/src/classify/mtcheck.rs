//! Verification mode for graphs with mapping-torus groups.
//!
//! Enumeration over mapping-torus subgroups is out of scope; instead a
//! candidate family (one split subgroup per vertex) is verified against the
//! Hausdorff gluing condition: across each edge the fiber-lattice
//! restrictions of the two incident subgroups must agree.

use serde::{Deserialize, Serialize};

use super::poset::LatticeData;
use super::{ClassifyError, GraphOfGroups, HomSpec, NamedHom, SscReport};
use crate::groups::{self, FgGroup, Int};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MtCandidate {
    pub vertex: String,
    pub m: Int,
    #[serde(default)]
    pub w: Vec<Int>,
    pub lambda: Vec<Vec<Int>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MtNormalityEntry {
    pub vertex: String,
    pub normal: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed_predicates: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MtEdgeComparison {
    pub edge: String,
    pub left_vertex: String,
    pub right_vertex: String,
    pub left_fiber: LatticeData,
    pub right_fiber: LatticeData,
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MtVerificationReport {
    pub accepted: bool,
    pub normality: Vec<MtNormalityEntry>,
    pub edge_comparisons: Vec<MtEdgeComparison>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

/// Validate the restricted mapping-torus graph shape: every vertex carries
/// the same mapping-torus group, edges use identity δ on both sides, leaves
/// are the canonical fiber inclusion, and there are no half-edges.
fn validate_mt_graph(g: &GraphOfGroups) -> Result<FgGroup, Vec<String>> {
    let mut violations = Vec::new();
    let Some(first) = g.vertices.first() else {
        return Err(vec!["graph has no vertices".into()]);
    };
    let FgGroup::MappingTorus { n, .. } = &first.group else {
        return Err(vec![
            "verification mode requires mapping-torus vertex groups".into()
        ]);
    };
    for v in &g.vertices {
        if v.group != first.group {
            violations.push(format!(
                "vertex {}: all mapping-torus vertex groups must coincide",
                v.id
            ));
        }
    }
    for e in &g.edges {
        if e.group != first.group {
            violations.push(format!("edge {}: group must equal the vertex group", e.id));
        }
        for (name, d) in [("deltaLeft", &e.delta_left), ("deltaRight", &e.delta_right)] {
            if *d != HomSpec::Named(NamedHom::Identity) {
                violations.push(format!(
                    "edge {}: {name} must be \"identity\" in verification mode",
                    e.id
                ));
            }
        }
        match &e.leaf {
            Some(leaf) => {
                if leaf.iota != HomSpec::Named(NamedHom::Fiber) {
                    violations.push(format!("edge {}: iota must be \"fiber\"", e.id));
                }
                if leaf.group != FgGroup::free(*n) {
                    violations.push(format!(
                        "edge {}: leaf group must be free abelian of rank {n}",
                        e.id
                    ));
                }
            }
            None => violations.push(format!("edge {}: missing leaf data", e.id)),
        }
        for end in [&e.endpoints.0, &e.endpoints.1] {
            if g.vertex(end).is_none() {
                violations.push(format!("edge {}: unknown endpoint {end}", e.id));
            }
        }
    }
    if !g.half_edges.is_empty() {
        violations.push("half-edges are not supported in mapping-torus verification mode".into());
    }
    if violations.is_empty() {
        Ok(first.group.clone())
    } else {
        Err(violations)
    }
}

/// Verify a candidate family of split mapping-torus subgroups against the
/// Hausdorff condition of the classification: normality of every candidate,
/// and equality of fiber-lattice restrictions across every edge.
pub fn verify_integration_mt(
    g: &GraphOfGroups,
    candidates: &[MtCandidate],
) -> Result<MtVerificationReport, ClassifyError> {
    let group = match validate_mt_graph(g) {
        Ok(gp) => gp,
        Err(violations) => return Err(ClassifyError::InvalidGraph(violations)),
    };
    let mut violations = Vec::new();
    let mut subgroups = std::collections::BTreeMap::new();
    for v in &g.vertices {
        let Some(c) = candidates.iter().find(|c| c.vertex == v.id) else {
            violations.push(format!("no candidate subgroup for vertex {}", v.id));
            continue;
        };
        match groups::mt_subgroup(&group, c.m, &c.w, &c.lambda) {
            Ok(h) => {
                subgroups.insert(v.id.clone(), h);
            }
            Err(e) => violations.push(format!("vertex {}: {e}", v.id)),
        }
    }
    if !violations.is_empty() {
        return Err(ClassifyError::InvalidGraph(violations));
    }
    let mut normality = Vec::new();
    let mut all_normal = true;
    for (vertex, h) in &subgroups {
        let (normal, failed_predicates) = groups::mt::normality_report(h)?;
        all_normal &= normal;
        normality.push(MtNormalityEntry {
            vertex: vertex.clone(),
            normal,
            failed_predicates,
        });
    }
    let mut edge_comparisons = Vec::new();
    let mut all_equal = true;
    for e in &g.edges {
        let left = &subgroups[&e.endpoints.0];
        let right = &subgroups[&e.endpoints.1];
        let lf = groups::mt_fiber(left)?;
        let rf = groups::mt_fiber(right)?;
        let equal = lf.lattice() == rf.lattice();
        all_equal &= equal;
        edge_comparisons.push(MtEdgeComparison {
            edge: e.id.clone(),
            left_vertex: e.endpoints.0.clone(),
            right_vertex: e.endpoints.1.clone(),
            left_fiber: LatticeData::from_lattice(lf.lattice()),
            right_fiber: LatticeData::from_lattice(rf.lattice()),
            equal,
        });
    }
    Ok(MtVerificationReport {
        accepted: all_normal && all_equal,
        normality,
        edge_comparisons,
        violations: vec![],
    })
}

/// ssc Hausdorff check for the mapping-torus graph shape: δ is the identity
/// and ι the injective fiber inclusion, so the kernel of δ∘ι is computed to
/// be trivial once the graph validates.
pub(crate) fn ssc_check_mt(g: &GraphOfGroups) -> Result<SscReport, ClassifyError> {
    validate_mt_graph(g).map_err(ClassifyError::InvalidGraph)?;
    // ker(identity ∘ fiber-inclusion) = ker(v ↦ (0, v)) = 0
    Ok(SscReport {
        hausdorff_ssc: true,
        witnesses: vec![],
    })
}
