//! Closed-form chart models of the pair, log pair and symplectic pair
//! groupoids, with sampled verification of the groupoid axioms, anchor
//! frames, multiplicative symplectic forms, blow-down morphism chains, and
//! gluing over orbit covers.

mod checks;
mod form;
mod glue;
mod models;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{
    chart_transform, Poly, PolyFrame, PolyMultivector, RationalChartChange, RationalFn,
};

pub use checks::{
    anchor_frame_check, blowdown_check, check_groupoid_axioms, jacobian, multiplicativity_check,
    CheckReport, PoissonSide,
};
pub use form::{derive_symplectic_form, invert_antisymmetric4, TwoForm};
pub use glue::{glued_circle, single_chart, AtlasChart, GluedArrow, GluedAtlas, ScalingAction, Transition};
pub use models::{Model, ModelKind};

#[derive(Debug, Error)]
pub enum GroupoidError {
    #[error("unknown model kind {0:?}")]
    UnknownKind(String),
    #[error("check {0:?} is not applicable to model {1:?}")]
    CheckNotApplicable(String, String),
    #[error("derived form is not smooth across the degeneracy locus: component {component} keeps denominator {denominator}")]
    FormNotSmooth { component: String, denominator: String },
    #[error("transition {from} -> {to} fails to be a groupoid isomorphism (residual {residual:.3e})")]
    TransitionNotIsomorphism {
        from: String,
        to: String,
        residual: f64,
    },
    #[error("no overlap samples found for transition {from} -> {to}")]
    EmptyOverlap { from: String, to: String },
    #[error("composable pair has no common chart: orbit cover violation")]
    OrbitCoverViolation,
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
}

/// The expected anchor frame of a built-in model over its object chart.
pub fn expected_anchor_frame(model: &Model) -> Option<PolyFrame> {
    let vf = |n: usize, comps: Vec<(usize, Poly)>| {
        let mut v = PolyMultivector::zero(n, 1);
        for (i, p) in comps {
            v.set(&[i], p);
        }
        v
    };
    match model {
        Model::Pair { n } => {
            let fields = (0..*n).map(|i| vf(*n, vec![(i, Poly::one(*n))])).collect();
            Some(PolyFrame::new(fields, 0).expect("frame"))
        }
        Model::LogPair { n } | Model::SscLogtanLocal { n } => {
            let mut fields = vec![vf(*n, vec![(0, Poly::var(*n, 0))])];
            for i in 1..*n {
                fields.push(vf(*n, vec![(i, Poly::one(*n))]));
            }
            Some(PolyFrame::new(fields, 0).expect("frame"))
        }
        Model::SympPair2d => {
            let x = Poly::var(2, 0);
            Some(
                PolyFrame::new(
                    vec![vf(2, vec![(0, x.clone())]), vf(2, vec![(1, x)])],
                    0,
                )
                .expect("frame"),
            )
        }
        Model::CorruptedLogPair { .. } => None,
    }
}

/// −π × π on the pair-groupoid chart (x_t, y_t, x_s, y_s) over (ℝ², x∂x∧∂y),
/// scaled by the global convention sign ε.
pub fn pair_bivector(epsilon: f64) -> PolyMultivector {
    let sign = if epsilon >= 0.0 { 1 } else { -1 };
    let mut b = PolyMultivector::zero(4, 2);
    b.set(&[0, 1], Poly::var(4, 0).scale(&num_rational::BigRational::from_integer((-sign).into())));
    b.set(&[2, 3], Poly::var(4, 2).scale(&num_rational::BigRational::from_integer(sign.into())));
    b
}

/// The chart change from log pair coordinates (λ, x, y, y′) to pair
/// coordinates (x_t, y_t, x_s, y_s) = (λx, y′, x, y).
pub fn logpair_to_pair_chart() -> RationalChartChange {
    let (l, x, y, yp) = (
        Poly::var(4, 0),
        Poly::var(4, 1),
        Poly::var(4, 2),
        Poly::var(4, 3),
    );
    let (xt, _yt, xs, ys) = (
        Poly::var(4, 0),
        Poly::var(4, 1),
        Poly::var(4, 2),
        Poly::var(4, 3),
    );
    RationalChartChange::new(
        vec![l.mul(&x), yp, x, y],
        vec![
            RationalFn::new(xt, xs.clone()),
            RationalFn::from_poly(xs),
            RationalFn::from_poly(ys),
            RationalFn::from_poly(Poly::var(4, 1)),
        ],
        "blow-down chart of the log pair groupoid",
    )
    .expect("chart is consistent")
}

/// The log symplectic bivector carried by the log pair chart: the lift of
/// ε·(−π×π) through the blow-down, computed by the tensor law. The result
/// is polynomial, which is itself a liftability check.
pub fn logpair_bivector(epsilon: f64) -> Result<PolyMultivector, GroupoidError> {
    Ok(chart_transform(&pair_bivector(epsilon), &logpair_to_pair_chart())?)
}

/// The blow-down maps of the built-in chain.
pub fn blowdown_symp_to_logpair(g: &[f64]) -> Vec<f64> {
    vec![g[0], g[2], g[3], g[3] + g[1] * g[2]]
}

pub fn blowdown_logpair_to_pair(g: &[f64]) -> Vec<f64> {
    vec![g[0] * g[1], g[3], g[1], g[2]]
}

/// Determine the convention sign ε in {x∘s, y∘s}_{ω⁻¹} = ε·(x∘s), sampling
/// across the chart; errors if the ratio is not a consistent sign.
pub fn poisson_convention_sign(omega: &TwoForm) -> Result<f64, GroupoidError> {
    let model = Model::SympPair2d;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
    let mut epsilon: Option<f64> = None;
    for _ in 0..64 {
        let g = model.sample_arrow(&mut rng);
        let x_s = g[2];
        if x_s.abs() < 1e-3 {
            continue;
        }
        let pi = invert_antisymmetric4(&omega.eval(&g));
        // {x∘s, y∘s} = Π(dx_s, dy_s): source coordinates are slots 2, 3
        let bracket = pi[2][3];
        let ratio = bracket / x_s;
        let sign = if ratio > 0.0 { 1.0 } else { -1.0 };
        if (ratio.abs() - 1.0).abs() > 1e-8 {
            return Err(GroupoidError::CheckNotApplicable(
                format!("poisson convention: ratio {ratio} is not ±1"),
                "symp_pair_2d".into(),
            ));
        }
        match epsilon {
            None => epsilon = Some(sign),
            Some(e) if e != sign => {
                return Err(GroupoidError::CheckNotApplicable(
                    "poisson convention: inconsistent sign".into(),
                    "symp_pair_2d".into(),
                ))
            }
            _ => {}
        }
    }
    epsilon.ok_or_else(|| {
        GroupoidError::CheckNotApplicable("poisson convention: no valid samples".into(), "symp_pair_2d".into())
    })
}

/// CLI-facing verification request.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelVerifyRequest {
    pub kind: String,
    pub checks: Vec<String>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_samples() -> usize {
    10_000
}

fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelVerifyReport {
    pub kind: String,
    pub pass: bool,
    pub results: BTreeMap<String, CheckReport>,
}

/// Dispatch the requested checks against a built-in model.
pub fn verify_model(req: &ModelVerifyRequest) -> Result<ModelVerifyReport, GroupoidError> {
    let model = match req.kind.as_str() {
        "pair" => Some(Model::Pair { n: 2 }),
        "log_pair" => Some(Model::LogPair { n: 2 }),
        "symp_pair_2d" => Some(Model::SympPair2d),
        "ssc_logtan_local" => Some(Model::SscLogtanLocal { n: 2 }),
        "glued_circle" => None,
        other => return Err(GroupoidError::UnknownKind(other.to_string())),
    };
    let mut results = BTreeMap::new();
    for check in &req.checks {
        let report = match (check.as_str(), &model) {
            ("axioms", Some(m)) => check_groupoid_axioms(m, req.samples, req.seed, req.tol),
            ("axioms", None) => {
                let atlas = glued_circle(false)?;
                atlas.check_axioms(req.samples, req.seed, req.tol)
            }
            ("anchor", Some(m)) => {
                let frame = expected_anchor_frame(m).ok_or_else(|| {
                    GroupoidError::CheckNotApplicable(check.clone(), req.kind.clone())
                })?;
                anchor_frame_check(m, &frame, req.samples.min(500), req.seed, req.tol.max(1e-7))
            }
            ("multiplicative", Some(m @ Model::SympPair2d)) => {
                let omega = derive_symplectic_form()?;
                multiplicativity_check(m, &omega, req.samples, req.seed, req.tol)?
            }
            ("blowdown", Some(Model::SympPair2d)) => {
                let omega = derive_symplectic_form()?;
                let epsilon = poisson_convention_sign(&omega)?;
                let sigma = logpair_bivector(epsilon)?;
                let mut r = blowdown_check(
                    &Model::SympPair2d,
                    &Model::LogPair { n: 2 },
                    &blowdown_symp_to_logpair,
                    Some((&PoissonSide::Form(omega), &sigma)),
                    req.samples,
                    req.seed,
                    req.tol,
                );
                let r2 = blowdown_check(
                    &Model::LogPair { n: 2 },
                    &Model::Pair { n: 2 },
                    &blowdown_logpair_to_pair,
                    Some((&PoissonSide::Bivector(sigma.clone()), &pair_bivector(epsilon))),
                    req.samples,
                    req.seed,
                    req.tol,
                );
                r.max_residual = r.max_residual.max(r2.max_residual);
                r.pass = r.pass && r2.pass;
                r
            }
            ("blowdown", Some(Model::LogPair { n: 2 })) => blowdown_check(
                &Model::LogPair { n: 2 },
                &Model::Pair { n: 2 },
                &blowdown_logpair_to_pair,
                None,
                req.samples,
                req.seed,
                req.tol,
            ),
            _ => {
                return Err(GroupoidError::CheckNotApplicable(
                    check.clone(),
                    req.kind.clone(),
                ))
            }
        };
        results.insert(check.clone(), report);
    }
    Ok(ModelVerifyReport {
        kind: req.kind.clone(),
        pass: results.values().all(|r| r.pass),
        results,
    })
}

#[cfg(test)]
mod tests;
