//! Degeneracy-graph extraction for polynomial Poisson surfaces.
//!
//! The zero set of the Pfaffian is located by exact sign evaluation on an
//! antipodally symmetric sphere mesh (projective mode) or a plane grid
//! (affine mode). Same-sign triangle components become regions, mixed-sign
//! components become curves; in projective mode components are identified
//! under the antipodal involution and a curve is two-sided exactly when its
//! spherical lift is disconnected. The result is the skeleton graph whose
//! vertices index regions, edges the two-sided curves, and half-edges the
//! one-sided ones.

mod mesh;
mod period;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{rational_to_f64, transversality_sample_check, Poly};
pub use mesh::{plane_mesh, sphere_mesh, vertex_signs, Mesh, UnionFind};
pub use period::{
    agm, hypergeometric_series_half_half_one, modular_period_elliptic, modular_period_flow,
    modular_period_series, FlowOutcome,
};

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("projective mode requires a homogeneous polynomial in 3 variables")]
    NotHomogeneous,
    #[error("affine mode requires a polynomial in 2 variables, got {0}")]
    NotAPlaneCurve(usize),
    #[error("resolution {0} too small, need at least {1}")]
    ResolutionTooSmall(usize, usize),
    #[error("transversality heuristic flagged {0} sample points; refine the input or the box")]
    TransversalityFailed(usize),
    #[error("curve component touches {0} regions; refinement needed")]
    RefinementNeeded(usize),
    #[error("one-sided curve with sides in different regions; refinement needed")]
    SidesDisagree,
    #[error("decomposition is not stable under refinement: {0:?} vs {1:?}")]
    Unstable((usize, usize), (usize, usize)),
    #[error("parameter {0} outside (0, 1)")]
    ParameterOutOfRange(f64),
    #[error("hypergeometric series did not converge at t = {0}")]
    SeriesDidNotConverge(f64),
    #[error("could not project the seed onto the level set")]
    SeedProjectionFailed,
    #[error("modular field vanishes at the seed")]
    StationarySeed,
    #[error("unknown curve id {0}")]
    UnknownCurve(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceMode {
    Rp2Homogeneous,
    R2Affine,
}

/// Input description for the surface analysis.
#[derive(Debug, Clone)]
pub struct SurfaceModel {
    pub mode: SurfaceMode,
    pub f: Poly,
    /// Subdivision depth (projective) or log2 of the grid cell count per
    /// axis (affine).
    pub resolution: usize,
    /// Half-width of the working box in affine mode.
    pub box_half_width: i64,
}

impl SurfaceModel {
    pub fn validate(&self) -> Result<(), SurfaceError> {
        match self.mode {
            SurfaceMode::Rp2Homogeneous => {
                if self.f.nvars() != 3 {
                    return Err(SurfaceError::NotHomogeneous);
                }
                let deg = self.f.total_degree();
                for (e, _) in self.f.terms() {
                    if e.iter().sum::<u32>() != deg {
                        return Err(SurfaceError::NotHomogeneous);
                    }
                }
                if self.resolution < 3 {
                    return Err(SurfaceError::ResolutionTooSmall(self.resolution, 3));
                }
            }
            SurfaceMode::R2Affine => {
                if self.f.nvars() != 2 {
                    return Err(SurfaceError::NotAPlaneCurve(self.f.nvars()));
                }
                if self.resolution < 2 {
                    return Err(SurfaceError::ResolutionTooSmall(self.resolution, 2));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionInfo {
    pub id: String,
    /// Sign of a representative spherical lift (affine: of the region).
    pub sign: i8,
    /// Number of spherical lift components (projective mode: 1 or 2).
    pub lift_components: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CurveInfo {
    pub id: String,
    pub orientable: bool,
    pub adjacent_regions: Vec<String>,
    /// Affine-chart point near the curve, usable as a flow seed.
    pub seed: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilityCertificate {
    pub coarse_resolution: usize,
    pub fine_resolution: usize,
    pub coarse_counts: (usize, usize),
    pub fine_counts: (usize, usize),
    pub stable: bool,
}

#[derive(Debug, Clone)]
pub struct MeshDecomposition {
    pub mode: SurfaceMode,
    pub resolution: usize,
    pub regions: Vec<RegionInfo>,
    pub curves: Vec<CurveInfo>,
    pub perturbed_vertices: Vec<usize>,
    pub stability: StabilityCertificate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkeletonEdge {
    pub id: String,
    pub endpoints: (String, String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkeletonHalfEdge {
    pub id: String,
    pub vertex: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SkeletonGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<SkeletonEdge>,
    pub half_edges: Vec<SkeletonHalfEdge>,
}

/// Raw per-resolution decomposition, before the stability comparison.
struct RawDecomposition {
    regions: Vec<RegionInfo>,
    curves: Vec<CurveInfo>,
    perturbed: Vec<usize>,
}

fn decompose_once(model: &SurfaceModel, resolution: usize) -> Result<RawDecomposition, SurfaceError> {
    let projective = model.mode == SurfaceMode::Rp2Homogeneous;
    let f_affine = if projective {
        dehomogenize(&model.f)
    } else {
        model.f.clone()
    };
    let mesh = if projective {
        sphere_mesh(resolution)
    } else {
        plane_mesh(1 << resolution, model.box_half_width)
    };
    let degree = projective.then(|| model.f.total_degree());
    let (signs, perturbed) = vertex_signs(&model.f, &mesh, degree);
    // triangle classification: Some(sign) for same-sign, None for mixed
    let classes: Vec<Option<i8>> = mesh
        .triangles
        .iter()
        .map(|t| {
            let s = [signs[t[0]], signs[t[1]], signs[t[2]]];
            if s[0] == s[1] && s[1] == s[2] {
                Some(s[0])
            } else {
                None
            }
        })
        .collect();
    let mut uf = UnionFind::new(mesh.triangles.len());
    for (t, neighbors) in mesh.neighbors.iter().enumerate() {
        for &u in neighbors {
            if classes[t] == classes[u] {
                uf.union(t, u);
            }
        }
    }
    let roots: Vec<usize> = (0..mesh.triangles.len()).map(|t| uf.find(t)).collect();
    let mut region_roots = BTreeSet::new();
    let mut curve_roots = BTreeSet::new();
    for (t, class) in classes.iter().enumerate() {
        match class {
            Some(_) => region_roots.insert(roots[t]),
            None => curve_roots.insert(roots[t]),
        };
    }
    // adjacency: curve component -> adjacent region components
    let mut curve_adjacent: BTreeMap<usize, BTreeSet<usize>> = curve_roots
        .iter()
        .map(|&r| (r, BTreeSet::new()))
        .collect();
    for (t, neighbors) in mesh.neighbors.iter().enumerate() {
        if classes[t].is_none() {
            for &u in neighbors {
                if classes[u].is_some() {
                    curve_adjacent.get_mut(&roots[t]).unwrap().insert(roots[u]);
                }
            }
        }
    }
    for adj in curve_adjacent.values() {
        if adj.len() != 2 {
            return Err(SurfaceError::RefinementNeeded(adj.len()));
        }
    }
    // quotient classes under the antipodal involution (projective mode)
    let component_class: BTreeMap<usize, usize> = if projective {
        let tau = mesh.antipodal_triangle.as_ref().expect("sphere mesh");
        region_roots
            .iter()
            .chain(curve_roots.iter())
            .map(|&r| (r, r.min(roots[tau[r]])))
            .collect()
    } else {
        region_roots
            .iter()
            .chain(curve_roots.iter())
            .map(|&r| (r, r))
            .collect()
    };
    let mut region_classes: Vec<usize> = region_roots
        .iter()
        .map(|r| component_class[r])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    region_classes.sort_unstable();
    let region_id: BTreeMap<usize, String> = region_classes
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, format!("v{i}")))
        .collect();
    let regions: Vec<RegionInfo> = region_classes
        .iter()
        .map(|&class| {
            let lifts: Vec<usize> = region_roots
                .iter()
                .filter(|&&r| component_class[&r] == class)
                .copied()
                .collect();
            let sample_sign = classes[lifts[0]].unwrap_or(0);
            RegionInfo {
                id: region_id[&class].clone(),
                sign: sample_sign,
                lift_components: lifts.len(),
            }
        })
        .collect();
    let curve_classes: Vec<usize> = curve_roots
        .iter()
        .map(|r| component_class[r])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut curves = Vec::new();
    for (i, &class) in curve_classes.iter().enumerate() {
        let lifts: Vec<usize> = curve_roots
            .iter()
            .filter(|&&r| component_class[&r] == class)
            .copied()
            .collect();
        let orientable = if projective { lifts.len() == 2 } else { true };
        let representative = lifts[0];
        let adj: Vec<usize> = curve_adjacent[&representative].iter().copied().collect();
        let adjacent_regions: Vec<String> = if orientable || !projective {
            adj.iter().map(|r| region_id[&component_class[r]].clone()).collect()
        } else {
            let ids: BTreeSet<String> = adj
                .iter()
                .map(|r| region_id[&component_class[r]].clone())
                .collect();
            if ids.len() != 1 {
                return Err(SurfaceError::SidesDisagree);
            }
            ids.into_iter().collect()
        };
        let seed = curve_seed(&mesh, &roots, &classes, &signs, representative, &f_affine, projective);
        curves.push(CurveInfo {
            id: format!("c{i}"),
            orientable,
            adjacent_regions,
            seed,
        });
    }
    Ok(RawDecomposition {
        regions,
        curves,
        perturbed,
    })
}

/// Affine-chart point on the curve, from the sign-change edge of the mixed
/// triangle farthest from the line at infinity: linear interpolation of f
/// along the edge lands within one cell of the zero set, so the Newton
/// projection used by the flow stays on this component.
fn curve_seed(
    mesh: &Mesh,
    roots: &[usize],
    classes: &[Option<i8>],
    signs: &[i8],
    component: usize,
    f_affine: &Poly,
    projective: bool,
) -> Option<[f64; 2]> {
    let chart = |v: usize| -> Option<(f64, [f64; 2])> {
        let coords: Vec<f64> = mesh.vertices[v].iter().map(rational_to_f64).collect();
        if projective {
            let norm = (coords[0] * coords[0] + coords[1] * coords[1] + coords[2] * coords[2])
                .sqrt();
            let zfrac = (coords[2] / norm).abs();
            if zfrac < 1e-9 {
                return None;
            }
            Some((zfrac, [coords[0] / coords[2], coords[1] / coords[2]]))
        } else {
            Some((1.0, [coords[0], coords[1]]))
        }
    };
    let mut best: Option<(f64, [f64; 2])> = None;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if classes[t].is_some() || roots[t] != component {
            continue;
        }
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if signs[a] == signs[b] {
                continue;
            }
            let (Some((za, pa)), Some((zb, pb))) = (chart(a), chart(b)) else {
                continue;
            };
            let score = za.min(zb);
            if best.as_ref().map(|(s, _)| score > *s).unwrap_or(true) {
                let fa = f_affine.eval_f64(&pa);
                let fb = f_affine.eval_f64(&pb);
                let tau = if (fa - fb).abs() > 1e-300 {
                    (fa / (fa - fb)).clamp(0.0, 1.0)
                } else {
                    0.5
                };
                let seed = [pa[0] + tau * (pb[0] - pa[0]), pa[1] + tau * (pb[1] - pa[1])];
                best = Some((score, seed));
            }
        }
    }
    best.map(|(_, p)| p)
}

/// Run the sampled transversality precondition for the model.
fn transversality_gate(model: &SurfaceModel) -> Result<(), SurfaceError> {
    match model.mode {
        SurfaceMode::R2Affine => {
            let r = model.box_half_width as f64;
            let report = transversality_sample_check(&model.f, &[-r, -r], &[r, r], 101)
                .expect("valid grid");
            if !report.ok {
                return Err(SurfaceError::TransversalityFailed(report.warnings.len()));
            }
        }
        SurfaceMode::Rp2Homogeneous => {
            // sample on the unit sphere at a fixed fine depth: the local
            // Hessian thresholds need cells finer than the smallest feature
            let depth = model.resolution.max(5);
            let mesh = sphere_mesh(depth);
            let grad = model.f.gradient();
            let hessian: Vec<Vec<Poly>> = grad.iter().map(|g| g.gradient()).collect();
            let cell = std::f64::consts::FRAC_PI_2 / (1 << depth) as f64;
            let mut flagged = 0usize;
            for v in &mesh.vertices {
                let p: Vec<f64> = v.iter().map(rational_to_f64).collect();
                let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                let p: Vec<f64> = p.iter().map(|x| x / norm).collect();
                let h: f64 = hessian
                    .iter()
                    .flat_map(|r| r.iter())
                    .map(|e| e.eval_f64(&p).powi(2))
                    .sum::<f64>()
                    .sqrt()
                    .max(1e-9);
                let value = model.f.eval_f64(&p);
                let gnorm = grad
                    .iter()
                    .map(|g| g.eval_f64(&p).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if value.abs() <= h * cell * cell && gnorm <= h * cell {
                    flagged += 1;
                }
            }
            if flagged > 0 {
                return Err(SurfaceError::TransversalityFailed(flagged));
            }
        }
    }
    Ok(())
}

/// Decompose the surface at the model resolution, certifying stability
/// against one extra refinement step.
pub fn decompose(model: &SurfaceModel) -> Result<MeshDecomposition, SurfaceError> {
    model.validate()?;
    transversality_gate(model)?;
    let coarse = decompose_once(model, model.resolution)?;
    let fine = decompose_once(model, model.resolution + 1)?;
    let coarse_counts = (coarse.regions.len(), coarse.curves.len());
    let fine_counts = (fine.regions.len(), fine.curves.len());
    let mut coarse_flags: Vec<bool> = coarse.curves.iter().map(|c| c.orientable).collect();
    let mut fine_flags: Vec<bool> = fine.curves.iter().map(|c| c.orientable).collect();
    coarse_flags.sort_unstable();
    fine_flags.sort_unstable();
    if coarse_counts != fine_counts || coarse_flags != fine_flags {
        return Err(SurfaceError::Unstable(coarse_counts, fine_counts));
    }
    Ok(MeshDecomposition {
        mode: model.mode,
        resolution: model.resolution,
        regions: coarse.regions,
        curves: coarse.curves,
        perturbed_vertices: coarse.perturbed,
        stability: StabilityCertificate {
            coarse_resolution: model.resolution,
            fine_resolution: model.resolution + 1,
            coarse_counts,
            fine_counts,
            stable: true,
        },
    })
}

/// Normal-bundle orientability of a curve: two-sided curves become edges,
/// one-sided ones half-edges. Affine-chart curves are always two-sided.
pub fn orientability(d: &MeshDecomposition, curve_id: &str) -> Result<bool, SurfaceError> {
    d.curves
        .iter()
        .find(|c| c.id == curve_id)
        .map(|c| c.orientable)
        .ok_or_else(|| SurfaceError::UnknownCurve(curve_id.to_string()))
}

/// Skeleton graph of the decomposition.
pub fn extract_graph(d: &MeshDecomposition) -> SkeletonGraph {
    let vertices: Vec<String> = d.regions.iter().map(|r| r.id.clone()).collect();
    let mut edges = Vec::new();
    let mut half_edges = Vec::new();
    for c in &d.curves {
        if c.orientable {
            let a = c.adjacent_regions[0].clone();
            let b = c
                .adjacent_regions
                .get(1)
                .cloned()
                .unwrap_or_else(|| a.clone());
            edges.push(SkeletonEdge {
                id: c.id.clone(),
                endpoints: (a, b),
            });
        } else {
            half_edges.push(SkeletonHalfEdge {
                id: c.id.clone(),
                vertex: c.adjacent_regions[0].clone(),
            });
        }
    }
    SkeletonGraph {
        vertices,
        edges,
        half_edges,
    }
}

/// Wavefront-style dump of the working mesh (debugging aid): vertex
/// positions normalized to the unit sphere in projective mode.
pub fn mesh_obj(model: &SurfaceModel) -> Result<String, SurfaceError> {
    model.validate()?;
    let mesh = match model.mode {
        SurfaceMode::Rp2Homogeneous => sphere_mesh(model.resolution),
        SurfaceMode::R2Affine => plane_mesh(1 << model.resolution, model.box_half_width),
    };
    let mut out = String::new();
    for v in &mesh.vertices {
        let p: Vec<f64> = v.iter().map(rational_to_f64).collect();
        match model.mode {
            SurfaceMode::Rp2Homogeneous => {
                let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                out.push_str(&format!(
                    "v {} {} {}\n",
                    p[0] / norm,
                    p[1] / norm,
                    p[2] / norm
                ));
            }
            SurfaceMode::R2Affine => {
                out.push_str(&format!("v {} {} 0\n", p[0], p[1]));
            }
        }
    }
    for t in &mesh.triangles {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    Ok(out)
}

/// Homogenize a 2-variable polynomial to 3 variables at its total degree.
pub fn homogenize(f: &Poly) -> Poly {
    assert_eq!(f.nvars(), 2);
    let deg = f.total_degree();
    let mut out = Poly::zero(3);
    for (e, c) in f.terms() {
        let z = deg - e[0] - e[1];
        out = out.add(&Poly::monomial(3, vec![e[0], e[1], z], c.clone()));
    }
    out
}

/// Restrict a homogeneous 3-variable polynomial to the affine chart z = 1.
pub fn dehomogenize(f: &Poly) -> Poly {
    assert_eq!(f.nvars(), 3);
    let mut out = Poly::zero(2);
    for (e, c) in f.terms() {
        out = out.add(&Poly::monomial(2, vec![e[0], e[1]], c.clone()));
    }
    out
}

/// The full analysis report emitted by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurfaceReport {
    pub mode: SurfaceMode,
    pub resolution: usize,
    pub regions: Vec<RegionInfo>,
    pub curves: Vec<CurveReport>,
    pub graph: SkeletonGraph,
    pub stability: StabilityCertificate,
    pub perturbed_vertex_count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveReport {
    pub id: String,
    pub orientable: bool,
    /// Modular period when the flow closes up in the affine chart.
    pub period: Option<f64>,
}

/// Run the whole pipeline: decompose, extract the graph, and compute the
/// modular period of every curve whose flow closes up in the affine chart.
pub fn analyze(model: &SurfaceModel) -> Result<SurfaceReport, SurfaceError> {
    let d = decompose(model)?;
    let graph = extract_graph(&d);
    let affine = match model.mode {
        SurfaceMode::Rp2Homogeneous => dehomogenize(&model.f),
        SurfaceMode::R2Affine => model.f.clone(),
    };
    let mut curves = Vec::new();
    for c in &d.curves {
        let period = match c.seed {
            Some(seed) => match modular_period_flow(&affine, seed) {
                Ok(FlowOutcome::Period(t)) => Some(t),
                Ok(FlowOutcome::NonCompact) => None,
                Err(_) => None,
            },
            None => None,
        };
        curves.push(CurveReport {
            id: c.id.clone(),
            orientable: c.orientable,
            period,
        });
    }
    Ok(SurfaceReport {
        mode: model.mode,
        resolution: model.resolution,
        regions: d.regions.clone(),
        curves,
        graph,
        stability: d.stability.clone(),
        perturbed_vertex_count: d.perturbed_vertices.len(),
    })
}
