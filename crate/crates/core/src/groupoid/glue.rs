//! Gluing chart groupoids over an orbit cover.
//!
//! Arrows of the glued groupoid are chart-tagged coordinate vectors;
//! structure maps dispatch to a chart containing the arguments, mapping
//! through the overlap transitions when the two factors of a composition
//! live in different charts. The orbit-cover property guarantees composable
//! pairs share a chart; a pair with no common chart is reported as a
//! violation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::checks::CheckReport;
use super::models::Model;
use super::GroupoidError;

/// Chart-level operations; `Model` charts and the scaling-action chart of
/// the circle example both implement it.
pub trait AtlasChart {
    fn name(&self) -> &str;
    fn object_dim(&self) -> usize;
    fn source(&self, g: &[f64]) -> Vec<f64>;
    fn target(&self, g: &[f64]) -> Vec<f64>;
    fn compose(&self, g: &[f64], h: &[f64]) -> Vec<f64>;
    fn identity(&self, x: &[f64]) -> Vec<f64>;
    fn inverse(&self, g: &[f64]) -> Vec<f64>;
    fn sample_arrow(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
    fn sample_composable(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>);
    /// Rewrite the source coordinates of an arrow so it starts at `x`.
    fn with_source(&self, g: &[f64], x: &[f64]) -> Vec<f64>;
}

impl AtlasChart for Model {
    fn name(&self) -> &str {
        match self {
            Model::Pair { .. } => "pair",
            Model::LogPair { .. } => "log_pair",
            Model::SympPair2d => "symp_pair_2d",
            Model::SscLogtanLocal { .. } => "ssc_logtan_local",
            Model::CorruptedLogPair { .. } => "corrupted_log_pair",
        }
    }
    fn object_dim(&self) -> usize {
        Model::object_dim(self)
    }
    fn source(&self, g: &[f64]) -> Vec<f64> {
        Model::source(self, g)
    }
    fn target(&self, g: &[f64]) -> Vec<f64> {
        Model::target(self, g)
    }
    fn compose(&self, g: &[f64], h: &[f64]) -> Vec<f64> {
        Model::compose(self, g, h)
    }
    fn identity(&self, x: &[f64]) -> Vec<f64> {
        Model::identity(self, x)
    }
    fn inverse(&self, g: &[f64]) -> Vec<f64> {
        Model::inverse(self, g)
    }
    fn sample_arrow(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        Model::sample_arrow(self, rng)
    }
    fn sample_composable(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
        Model::sample_composable(self, rng)
    }
    fn with_source(&self, g: &[f64], x: &[f64]) -> Vec<f64> {
        let mut g = g.to_vec();
        match self {
            Model::Pair { n } => {
                for i in 0..*n {
                    g[n + i] = x[i];
                }
            }
            Model::LogPair { n } | Model::SscLogtanLocal { n } | Model::CorruptedLogPair { n } => {
                g[1] = x[0];
                for i in 0..(n - 1) {
                    g[2 + i] = x[1 + i];
                }
            }
            Model::SympPair2d => {
                g[2] = x[0];
                g[3] = x[1];
            }
        }
        g
    }
}

/// The action groupoid ℝ ⋉ ℝ of the scaling flow: arrows (t, x) with
/// s = x, t = eᵗx.
pub struct ScalingAction;

impl AtlasChart for ScalingAction {
    fn name(&self) -> &str {
        "scaling_action"
    }
    fn object_dim(&self) -> usize {
        1
    }
    fn source(&self, g: &[f64]) -> Vec<f64> {
        vec![g[1]]
    }
    fn target(&self, g: &[f64]) -> Vec<f64> {
        vec![g[0].exp() * g[1]]
    }
    fn compose(&self, g: &[f64], h: &[f64]) -> Vec<f64> {
        vec![g[0] + h[0], g[1]]
    }
    fn identity(&self, x: &[f64]) -> Vec<f64> {
        vec![0.0, x[0]]
    }
    fn inverse(&self, g: &[f64]) -> Vec<f64> {
        vec![-g[0], g[0].exp() * g[1]]
    }
    fn sample_arrow(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        vec![rng.gen_range(-1.5..1.5), rng.gen_range(-2.0..2.0)]
    }
    fn sample_composable(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
        let g = self.sample_arrow(rng);
        let h = vec![rng.gen_range(-1.5..1.5), self.target(&g)[0]];
        (g, h)
    }
    fn with_source(&self, g: &[f64], x: &[f64]) -> Vec<f64> {
        vec![g[0], x[0]]
    }
}

type ArrowFn = Box<dyn Fn(&[f64]) -> Vec<f64>>;
type PredFn = Box<dyn Fn(&[f64]) -> bool>;

/// A groupoid isomorphism between overlap restrictions of two charts.
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub arrow_in_overlap: PredFn,
    pub map_arrow: ArrowFn,
    pub map_object: ArrowFn,
}

/// An arrow of the glued groupoid.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedArrow {
    pub chart: usize,
    pub coords: Vec<f64>,
}

pub struct GluedAtlas {
    pub charts: Vec<Box<dyn AtlasChart>>,
    pub transitions: Vec<Transition>,
}

impl GluedAtlas {
    /// Sample-check every transition: it must intertwine source, target,
    /// identity and composition on the overlap.
    pub fn validate_transitions(
        &self,
        samples: usize,
        seed: u64,
        tol: f64,
    ) -> Result<(), GroupoidError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for tr in &self.transitions {
            let from = &self.charts[tr.from];
            let to = &self.charts[tr.to];
            let mut checked = 0usize;
            let mut attempts = 0usize;
            while checked < samples && attempts < samples * 50 {
                attempts += 1;
                let (g, h) = from.sample_composable(&mut rng);
                let m = from.compose(&g, &h);
                if !(tr.arrow_in_overlap)(&g)
                    || !(tr.arrow_in_overlap)(&h)
                    || !(tr.arrow_in_overlap)(&m)
                {
                    continue;
                }
                checked += 1;
                let fg = (tr.map_arrow)(&g);
                let fh = (tr.map_arrow)(&h);
                let residual = [
                    diff(&to.source(&fg), &(tr.map_object)(&from.source(&g))),
                    diff(&to.target(&fg), &(tr.map_object)(&from.target(&g))),
                    diff(&to.compose(&fg, &fh), &(tr.map_arrow)(&m)),
                    diff(
                        &(tr.map_arrow)(&from.identity(&from.source(&g))),
                        &to.identity(&(tr.map_object)(&from.source(&g))),
                    ),
                ]
                .into_iter()
                .fold(0.0, f64::max);
                if residual > tol {
                    return Err(GroupoidError::TransitionNotIsomorphism {
                        from: from.name().to_string(),
                        to: to.name().to_string(),
                        residual,
                    });
                }
            }
            if checked == 0 {
                return Err(GroupoidError::EmptyOverlap {
                    from: from.name().to_string(),
                    to: to.name().to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn source(&self, g: &GluedArrow) -> Vec<f64> {
        self.charts[g.chart].source(&g.coords)
    }

    pub fn target(&self, g: &GluedArrow) -> Vec<f64> {
        self.charts[g.chart].target(&g.coords)
    }

    pub fn inverse(&self, g: &GluedArrow) -> GluedArrow {
        GluedArrow {
            chart: g.chart,
            coords: self.charts[g.chart].inverse(&g.coords),
        }
    }

    pub fn identity(&self, chart: usize, x: &[f64]) -> GluedArrow {
        GluedArrow {
            chart,
            coords: self.charts[chart].identity(x),
        }
    }

    /// Map an arrow into another chart when a transition covers it.
    pub fn to_chart(&self, g: &GluedArrow, chart: usize) -> Option<GluedArrow> {
        if g.chart == chart {
            return Some(g.clone());
        }
        for tr in &self.transitions {
            if tr.from == g.chart && tr.to == chart && (tr.arrow_in_overlap)(&g.coords) {
                return Some(GluedArrow {
                    chart,
                    coords: (tr.map_arrow)(&g.coords),
                });
            }
        }
        None
    }

    /// Find a chart containing both arrows and return their coordinates
    /// there. The orbit-cover property guarantees success for genuinely
    /// composable pairs.
    pub fn resolve_pair(
        &self,
        g: &GluedArrow,
        h: &GluedArrow,
    ) -> Result<(usize, Vec<f64>, Vec<f64>), GroupoidError> {
        for chart in 0..self.charts.len() {
            if let (Some(gc), Some(hc)) = (self.to_chart(g, chart), self.to_chart(h, chart)) {
                return Ok((chart, gc.coords, hc.coords));
            }
        }
        Err(GroupoidError::OrbitCoverViolation)
    }

    /// Compose by dispatching to a chart containing both arrows.
    pub fn compose(&self, g: &GluedArrow, h: &GluedArrow) -> Result<GluedArrow, GroupoidError> {
        let (chart, gc, hc) = self.resolve_pair(g, h)?;
        Ok(GluedArrow {
            chart,
            coords: self.charts[chart].compose(&gc, &hc),
        })
    }

    /// Axioms at sampled arrows, exercising cross-chart dispatch when the
    /// transitions allow it. All comparisons happen inside the chart the
    /// composition was dispatched to.
    pub fn check_axioms(&self, samples: usize, seed: u64, tol: f64) -> CheckReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut max_residual = 0.0f64;
        let mut failure = None;
        for i in 0..samples {
            let chart = i % self.charts.len();
            let ops = &self.charts[chart];
            let (g, h) = ops.sample_composable(&mut rng);
            let g = GluedArrow { chart, coords: g };
            let mut h = GluedArrow { chart, coords: h };
            // push h into another chart when possible to exercise dispatch
            if i % 3 == 0 {
                for other in 0..self.charts.len() {
                    if other != chart {
                        if let Some(hc) = self.to_chart(&h, other) {
                            h = hc;
                            break;
                        }
                    }
                }
            }
            let Ok((c, gc, hc)) = self.resolve_pair(&g, &h) else {
                failure = Some("orbit cover violation".to_string());
                max_residual = f64::INFINITY;
                break;
            };
            let ops_c = &self.charts[c];
            let m = ops_c.compose(&gc, &hc);
            max_residual = max_residual.max(diff(&ops_c.source(&m), &ops_c.source(&gc)));
            max_residual = max_residual.max(diff(&ops_c.target(&m), &ops_c.target(&hc)));
            // unit and inverse laws inside the resolved chart
            let id_s = ops_c.identity(&ops_c.source(&gc));
            max_residual = max_residual.max(diff(&ops_c.compose(&id_s, &gc), &gc));
            let inv = ops_c.inverse(&gc);
            max_residual = max_residual.max(diff(&ops_c.compose(&gc, &inv), &id_s));
            // associativity with a continuation in the same chart
            let (g2, k) = ops_c.sample_composable(&mut rng);
            let _ = g2;
            // re-anchor k at t(m)
            let tm = ops_c.target(&m);
            let k = ops_c.with_source(&k, &tm);
            let a1 = ops_c.compose(&ops_c.compose(&gc, &hc), &k);
            let a2 = ops_c.compose(&gc, &ops_c.compose(&hc, &k));
            max_residual = max_residual.max(diff(&a1, &a2));
        }
        CheckReport {
            name: "axioms".into(),
            pass: failure.is_none() && max_residual <= tol,
            max_residual,
            samples,
            failure,
        }
    }
}



fn diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// The circle example: the scaling action groupoid over the chart containing
/// the fixed point, glued to the pair groupoid of the complementary chart
/// via (t, x) ↦ (e⁻ᵗ x⁻¹, x⁻¹) over x ≠ 0.
pub fn glued_circle(corrupt_transition: bool) -> Result<GluedAtlas, GroupoidError> {
    let map_forward: ArrowFn = if corrupt_transition {
        Box::new(|g: &[f64]| vec![1.0 / g[1], 1.0 / g[1]])
    } else {
        Box::new(|g: &[f64]| vec![(-g[0]).exp() / g[1], 1.0 / g[1]])
    };
    let atlas = GluedAtlas {
        charts: vec![Box::new(ScalingAction), Box::new(Model::Pair { n: 1 })],
        transitions: vec![
            Transition {
                from: 0,
                to: 1,
                arrow_in_overlap: Box::new(|g: &[f64]| g[1].abs() > 1e-3),
                map_arrow: map_forward,
                map_object: Box::new(|x: &[f64]| vec![1.0 / x[0]]),
            },
            Transition {
                from: 1,
                to: 0,
                // same-sign nonzero pairs form the overlap restriction
                arrow_in_overlap: Box::new(|g: &[f64]| {
                    g[0].abs() > 1e-3 && g[1].abs() > 1e-3 && g[0] * g[1] > 0.0
                }),
                map_arrow: Box::new(|g: &[f64]| vec![(g[1] / g[0]).ln(), 1.0 / g[1]]),
                map_object: Box::new(|x: &[f64]| vec![1.0 / x[0]]),
            },
        ],
    };
    atlas.validate_transitions(256, 7, 1e-8)?;
    Ok(atlas)
}

/// A single-chart atlas behaves identically to its chart.
pub fn single_chart(model: Model) -> GluedAtlas {
    GluedAtlas {
        charts: vec![Box::new(model)],
        transitions: vec![],
    }
}
