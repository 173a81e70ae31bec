//! Local classifications in a tubular neighbourhood of a single degeneracy
//! component, in the four normal-form cases:
//!
//! - `logtan-or`: triples (K⁺, K, K⁻) with K ⊆ r₊K⁺ and K ⊆ r₋K⁻;
//!   Hausdorff elements are the triples with K = r₊K⁺ = r₋K⁻.
//! - `logtan-nonor`: pairs (K′, K) with K ⊆ rK′; Hausdorff when equal.
//! - `logsymp-or` (Hausdorff only): pairs (K⁺, K⁻) with
//!   ι⁻¹(r₊K⁺) = ι⁻¹(r₋K⁻).
//! - `logsymp-nonor` (Hausdorff only): a single K′ with no constraint.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::poset::{element_key, fnv1a, Integration, IntegrationPoset, LatticeData, PosetMode};
use super::{ClassifyError, LatticeHom};
use crate::groups::{FgGroup, Int, Lattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalCase {
    LogtanOr,
    LogtanNonor,
    LogsympOr,
    LogsympNonor,
}

/// Input data for a local classification. Field use depends on the case; see
/// the module docs. `r*` homomorphisms map the punctured-side groups into the
/// degeneracy group, `iota` maps the leaf group into the degeneracy group.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalData {
    pub case: LocalCase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_group: Option<FgGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_plus: Option<FgGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_minus: Option<FgGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_plus: Option<Vec<Vec<Int>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_minus: Option<Vec<Vec<Int>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<FgGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iota: Option<Vec<Vec<Int>>>,
    /// ker w₁ lattice inside the degeneracy group (non-orientable cases,
    /// optional consistency datum: the image of r must land inside it).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Vec<Int>>>,
    pub bound: u64,
}

fn require<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T, ClassifyError> {
    field.as_ref().ok_or_else(|| {
        ClassifyError::InvalidGraph(vec![format!("local data is missing field {name}")])
    })
}

fn hom(
    matrix: &[Vec<Int>],
    source: &FgGroup,
    target: &FgGroup,
    context: &str,
) -> Result<LatticeHom, ClassifyError> {
    let h = LatticeHom {
        matrix: matrix.to_vec(),
        source: source.presentation()?,
        target: target.presentation()?,
    };
    h.validate(context)?;
    Ok(h)
}

pub fn classify_local(data: &LocalData) -> Result<IntegrationPoset, ClassifyError> {
    let provenance = fnv1a(&format!(
        "local|{}",
        serde_json::to_string(data).expect("local data serialization")
    ));
    let bound = data.bound;
    match data.case {
        LocalCase::LogtanOr => {
            let d = require(&data.d_group, "dGroup")?;
            let sp = require(&data.side_plus, "sidePlus")?;
            let sm = require(&data.side_minus, "sideMinus")?;
            let rp = hom(require(&data.r_plus, "rPlus")?, sp, d, "rPlus")?;
            let rm = hom(require(&data.r_minus, "rMinus")?, sm, d, "rMinus")?;
            let up = sp.presentation()?.enumerate_subgroups(bound, true);
            let ud = d.presentation()?.enumerate_subgroups(bound, true);
            let um = sm.presentation()?.enumerate_subgroups(bound, true);
            let mut elements = Vec::new();
            for (kp, k, km) in [&up, &ud, &um]
                .iter()
                .map(|u| u.iter())
                .multi_cartesian_product()
                .map(|v| (v[0], v[1], v[2]))
            {
                let img_p = rp.image(kp);
                let img_m = rm.image(km);
                if !(k.is_sublattice_of(&img_p) && k.is_sublattice_of(&img_m)) {
                    continue;
                }
                let hausdorff = *k == img_p && *k == img_m;
                elements.push(local_element(
                    &[("K+", kp), ("K", k), ("K-", km)],
                    hausdorff,
                    &[("D", k)],
                    &[("D:plus", &img_p), ("D:minus", &img_m)],
                ));
            }
            Ok(IntegrationPoset::assemble(
                PosetMode::LogtanOr,
                bound,
                provenance,
                elements,
            ))
        }
        LocalCase::LogtanNonor => {
            let d = require(&data.d_group, "dGroup")?;
            let s = require(&data.side_plus, "side")?;
            let r = hom(require(&data.r_plus, "r")?, s, d, "r")?;
            if let Some(w) = &data.w {
                let dp = d.presentation()?;
                let w_lattice = Lattice::from_generators(dp.n, w);
                let full = s.presentation()?.full_subgroup();
                if !r.image(&full).is_sublattice_of(&w_lattice) {
                    return Err(ClassifyError::InvalidGraph(vec![
                        "image of r does not lie inside ker w1".into(),
                    ]));
                }
            }
            let us = s.presentation()?.enumerate_subgroups(bound, true);
            let ud = d.presentation()?.enumerate_subgroups(bound, true);
            let mut elements = Vec::new();
            for (kp, k) in us.iter().cartesian_product(ud.iter()) {
                let img = r.image(kp);
                if !k.is_sublattice_of(&img) {
                    continue;
                }
                let hausdorff = *k == img;
                elements.push(local_element(
                    &[("K'", kp), ("K", k)],
                    hausdorff,
                    &[("D", k)],
                    &[("D:side", &img)],
                ));
            }
            Ok(IntegrationPoset::assemble(
                PosetMode::LogtanNonor,
                bound,
                provenance,
                elements,
            ))
        }
        LocalCase::LogsympOr => {
            let d = require(&data.d_group, "dGroup")?;
            let sp = require(&data.side_plus, "sidePlus")?;
            let sm = require(&data.side_minus, "sideMinus")?;
            let rp = hom(require(&data.r_plus, "rPlus")?, sp, d, "rPlus")?;
            let rm = hom(require(&data.r_minus, "rMinus")?, sm, d, "rMinus")?;
            let leaf = require(&data.leaf, "leaf")?;
            let iota = hom(require(&data.iota, "iota")?, leaf, d, "iota")?;
            let up = sp.presentation()?.enumerate_subgroups(bound, true);
            let um = sm.presentation()?.enumerate_subgroups(bound, true);
            let mut elements = Vec::new();
            for (kp, km) in up.iter().cartesian_product(um.iter()) {
                let leaf_p = iota.preimage(&rp.image(kp));
                let leaf_m = iota.preimage(&rm.image(km));
                if leaf_p != leaf_m {
                    continue;
                }
                elements.push(local_element(
                    &[("K+", kp), ("K-", km)],
                    true,
                    &[("D", &leaf_p)],
                    &[("D:plus", &rp.image(kp)), ("D:minus", &rm.image(km))],
                ));
            }
            Ok(IntegrationPoset::assemble(
                PosetMode::LogsympOr,
                bound,
                provenance,
                elements,
            ))
        }
        LocalCase::LogsympNonor => {
            let s = require(&data.side_plus, "side")?;
            let us = s.presentation()?.enumerate_subgroups(bound, true);
            let fiber_data = match (&data.d_group, &data.r_plus, &data.leaf, &data.iota) {
                (Some(d), Some(rm), Some(leaf), Some(im)) => {
                    Some((hom(rm, s, d, "r")?, hom(im, leaf, d, "iota")?))
                }
                _ => None,
            };
            let mut elements = Vec::new();
            for kp in &us {
                let fibers: Vec<(&str, Lattice)> = match &fiber_data {
                    Some((r, iota)) => vec![("D", iota.preimage(&r.image(kp)))],
                    None => vec![],
                };
                let fiber_refs: Vec<(&str, &Lattice)> =
                    fibers.iter().map(|(s, l)| (*s, l)).collect();
                elements.push(local_element(&[("K'", kp)], true, &fiber_refs, &[]));
            }
            Ok(IntegrationPoset::assemble(
                PosetMode::LogsympNonor,
                bound,
                provenance,
                elements,
            ))
        }
    }
}

fn local_element(
    slots: &[(&str, &Lattice)],
    hausdorff: bool,
    fibers: &[(&str, &Lattice)],
    restrictions: &[(&str, &Lattice)],
) -> Integration {
    let subgroups: BTreeMap<String, LatticeData> = slots
        .iter()
        .map(|(name, l)| (name.to_string(), LatticeData::from_lattice(l)))
        .collect();
    let source_fibers = fibers
        .iter()
        .map(|(name, l)| (name.to_string(), LatticeData::from_lattice(l)))
        .collect();
    let restrictions = restrictions
        .iter()
        .map(|(name, l)| (name.to_string(), LatticeData::from_lattice(l)))
        .collect();
    Integration {
        key: element_key(&subgroups),
        subgroups,
        hausdorff,
        source_fibers,
        restrictions,
    }
}
