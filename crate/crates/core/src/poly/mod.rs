//! Exact-rational polynomial multivector calculus: Schouten bracket,
//! Pfaffian, modular vector field, blow-up chart transforms, elementary
//! modification of algebroid frames, and degeneracy/transversality checks.
//!
//! All identities are computed exactly over ℚ; floating point appears only
//! in the sampled transversality heuristic.

mod frame;
mod multivector;
mod ratfn;
mod ring;
mod transverse;

use thiserror::Error;

pub use frame::{
    elementary_modification, involutivity_check, modify_slots, rank_over_function_field,
    Involutivity, PolyFrame,
};
pub use multivector::{
    chart_transform, modular_vector_field, pfaffian, schouten_bracket, ComponentJson,
    MultivectorJson, PolyMultivector, RationalChartChange,
};
pub use ratfn::RationalFn;
pub use ring::{poly_from_terms, rational_to_f64, Poly, PolyJson, TermJson};
pub use transverse::{
    degenerate_transverse_check, transversality_sample_check, TransversalityReport,
    TransversalityWarning, TransverseReport,
};

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("variable count mismatch: expected {expected}, got {got}")]
    VariableMismatch { expected: usize, got: usize },
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("Pfaffian requires an even variable count, got {0}")]
    OddVariableCount(usize),
    #[error("zero polynomial has no vanishing order")]
    ZeroPolynomial,
    #[error("not liftable on this chart: denominator {denominator} does not clear")]
    NotLiftable { denominator: String },
    #[error("invalid chart change: {0}")]
    BadChart(String),
    #[error("unparsable rational coefficient {0:?}")]
    BadCoefficient(String),
    #[error("frame must contain at least one field")]
    EmptyFrame,
    #[error("frame fields are linearly dependent over the function field")]
    DependentFrame,
    #[error("slot {slot} out of range for frame of length {len}")]
    SlotOutOfRange { slot: usize, len: usize },
    #[error("degree bound {bound} too small, need at least {needed} (inconclusive)")]
    DegreeBoundTooSmall { bound: u32, needed: u32 },
    #[error("subspace is not Poisson for this bivector: component {component} does not vanish on it")]
    NotPoissonSubmanifold { component: String },
    #[error("grid must have at least 2 points per axis, got {0}")]
    GridTooSmall(usize),
}

/// The two standard charts of the blow-up of ℝ² at the origin, plus the
/// identity chart, as [`RationalChartChange`] values on variables (x, y).
pub mod blowup_charts {
    use super::multivector::RationalChartChange;
    use super::ratfn::RationalFn;
    use super::ring::Poly;

    /// Chart with (x, y) = (u, uv): the exceptional divisor is {u = 0}.
    pub fn chart_u() -> RationalChartChange {
        let u = Poly::var(2, 0);
        let v = Poly::var(2, 1);
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        RationalChartChange::new(
            vec![u.clone(), u.mul(&v)],
            vec![
                RationalFn::from_poly(x.clone()),
                RationalFn::new(y, x),
            ],
            "blow-up chart (x,y) = (u, uv)",
        )
        .expect("chart is consistent")
    }

    /// Chart with (x, y) = (zw, w): the exceptional divisor is {w = 0}.
    pub fn chart_w() -> RationalChartChange {
        let z = Poly::var(2, 0);
        let w = Poly::var(2, 1);
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        RationalChartChange::new(
            vec![z.mul(&w), w.clone()],
            vec![
                RationalFn::new(x, y.clone()),
                RationalFn::from_poly(y),
            ],
            "blow-up chart (x,y) = (zw, w)",
        )
        .expect("chart is consistent")
    }
}
