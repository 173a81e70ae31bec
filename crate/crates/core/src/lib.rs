//! Combinatorial and numeric machinery for log symplectic geometry at desk scale.
//!
//! The crate is organized around five subsystems:
//!
//! - [`groups`]: exact arithmetic for finitely generated abelian groups and
//!   restricted mapping-torus groups, with Hermite-normal-form subgroup
//!   lattices as the single canonical representation.
//! - [`classify`]: graphs of groups and the enumeration of log tangent and
//!   Hausdorff log symplectic integrations as posets of normal-subgroup
//!   families, plus the local (tubular neighbourhood) classifications.
//! - [`poly`]: exact-rational polynomial multivector calculus — Schouten
//!   bracket, Pfaffian, modular vector field, blow-up chart transforms,
//!   frame modifications and involutivity certificates.
//! - [`surface`]: extraction of the degeneracy graph of a polynomial Poisson
//!   surface from a sign-mesh on the sphere or plane, normal-bundle
//!   orientability via antipodal lifts, and modular periods by AGM and by
//!   first-return time of the modular flow.
//! - [`groupoid`]: closed-form chart models of the pair, log pair and
//!   symplectic pair groupoids with sampled axiom, anchor, multiplicativity
//!   and blow-down checks.

pub mod classify;
pub mod groupoid;
pub mod groups;
pub mod poly;
pub mod surface;
