//! Closed-form coordinate models of the built-in Lie groupoids.
//!
//! Composition direction is fixed once for the whole crate: m(g, h) is
//! defined when t(g) = s(h) ("g then h"), so s(m) = s(g) and t(m) = t(h).

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Pair,
    LogPair,
    SympPair2d,
    SscLogtanLocal,
}

/// A chart groupoid model with closed-form structure maps.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// Pair groupoid of ℝⁿ: arrows (x_t, x_s), source x_s, target x_t.
    Pair { n: usize },
    /// Log pair groupoid chart for D = {x₁ = 0} in ℝⁿ: arrows
    /// (λ, x₁, y⃗, y⃗′) with λ > 0, s = (x₁, y⃗), t = (λx₁, y⃗′).
    LogPair { n: usize },
    /// Symplectic pair groupoid chart over (ℝ², x∂x∧∂y): arrows (λ, μ, x, y)
    /// with λ > 0, s = (x, y), t = (λx, y + μx).
    SympPair2d,
    /// The local ssc integration of the log tangent algebroid presented as
    /// the action groupoid Hol⁰(N) ⋉ N over a trivialized chart; its
    /// structure maps coincide with the log pair chart.
    SscLogtanLocal { n: usize },
    /// Negative control: log pair chart with the corrupted multiplication
    /// λλ′ → λ + λ′.
    CorruptedLogPair { n: usize },
}

impl Model {
    pub fn make(kind: ModelKind, n: usize) -> Model {
        match kind {
            ModelKind::Pair => Model::Pair { n },
            ModelKind::LogPair => Model::LogPair { n },
            ModelKind::SympPair2d => Model::SympPair2d,
            ModelKind::SscLogtanLocal => Model::SscLogtanLocal { n },
        }
    }

    pub fn object_dim(&self) -> usize {
        match self {
            Model::Pair { n } => *n,
            Model::LogPair { n } | Model::SscLogtanLocal { n } | Model::CorruptedLogPair { n } => {
                *n
            }
            Model::SympPair2d => 2,
        }
    }

    pub fn arrow_dim(&self) -> usize {
        2 * self.object_dim()
    }

    pub fn arrow_valid(&self, g: &[f64]) -> bool {
        match self {
            Model::Pair { n } => g.len() == 2 * n,
            Model::LogPair { n } | Model::SscLogtanLocal { n } | Model::CorruptedLogPair { n } => {
                g.len() == 2 * n && g[0] > 0.0
            }
            Model::SympPair2d => g.len() == 4 && g[0] > 0.0,
        }
    }

    pub fn source(&self, g: &[f64]) -> Vec<f64> {
        match self {
            Model::Pair { n } => g[*n..].to_vec(),
            Model::LogPair { n } | Model::SscLogtanLocal { n } | Model::CorruptedLogPair { n } => {
                let mut s = vec![g[1]];
                s.extend_from_slice(&g[2..2 + (n - 1)]);
                s
            }
            Model::SympPair2d => vec![g[2], g[3]],
        }
    }

    pub fn target(&self, g: &[f64]) -> Vec<f64> {
        match self {
            Model::Pair { n } => g[..*n].to_vec(),
            Model::LogPair { n } | Model::SscLogtanLocal { n } | Model::CorruptedLogPair { n } => {
                let mut t = vec![g[0] * g[1]];
                t.extend_from_slice(&g[2 + (n - 1)..]);
                t
            }
            Model::SympPair2d => vec![g[0] * g[2], g[3] + g[1] * g[2]],
        }
    }

    /// m(g, h) for t(g) = s(h).
    pub fn compose(&self, g: &[f64], h: &[f64]) -> Vec<f64> {
        match self {
            Model::Pair { n } => {
                let mut m = h[..*n].to_vec();
                m.extend_from_slice(&g[*n..]);
                m
            }
            Model::LogPair { n } | Model::SscLogtanLocal { n } => {
                let mut m = vec![g[0] * h[0], g[1]];
                m.extend_from_slice(&g[2..2 + (n - 1)]);
                m.extend_from_slice(&h[2 + (n - 1)..]);
                m
            }
            Model::CorruptedLogPair { n } => {
                let mut m = vec![g[0] + h[0], g[1]];
                m.extend_from_slice(&g[2..2 + (n - 1)]);
                m.extend_from_slice(&h[2 + (n - 1)..]);
                m
            }
            Model::SympPair2d => {
                vec![g[0] * h[0], g[1] + g[0] * h[1], g[2], g[3]]
            }
        }
    }

    pub fn identity(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Model::Pair { .. } => {
                let mut g = x.to_vec();
                g.extend_from_slice(x);
                g
            }
            Model::LogPair { .. } | Model::SscLogtanLocal { .. } | Model::CorruptedLogPair { .. } => {
                let mut g = vec![1.0, x[0]];
                g.extend_from_slice(&x[1..]);
                g.extend_from_slice(&x[1..]);
                g
            }
            Model::SympPair2d => vec![1.0, 0.0, x[0], x[1]],
        }
    }

    pub fn inverse(&self, g: &[f64]) -> Vec<f64> {
        match self {
            Model::Pair { n } => {
                let mut inv = g[*n..].to_vec();
                inv.extend_from_slice(&g[..*n]);
                inv
            }
            Model::LogPair { n } | Model::SscLogtanLocal { n } | Model::CorruptedLogPair { n } => {
                let mut inv = vec![1.0 / g[0], g[0] * g[1]];
                inv.extend_from_slice(&g[2 + (n - 1)..]);
                inv.extend_from_slice(&g[2..2 + (n - 1)]);
                inv
            }
            Model::SympPair2d => vec![
                1.0 / g[0],
                -g[1] / g[0],
                g[0] * g[2],
                g[3] + g[1] * g[2],
            ],
        }
    }

    pub fn sample_object(&self, rng: &mut impl Rng) -> Vec<f64> {
        (0..self.object_dim())
            .map(|_| rng.gen_range(-2.0..2.0))
            .collect()
    }

    pub fn sample_arrow(&self, rng: &mut impl Rng) -> Vec<f64> {
        match self {
            Model::Pair { n } => (0..2 * n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            Model::LogPair { .. }
            | Model::SscLogtanLocal { .. }
            | Model::CorruptedLogPair { .. }
            | Model::SympPair2d => {
                let mut g = vec![rng.gen_range(-1.2f64..1.2).exp()];
                for _ in 1..self.arrow_dim() {
                    g.push(rng.gen_range(-2.0..2.0));
                }
                g
            }
        }
    }

    /// A composable pair (g, h) with t(g) = s(h): h is sampled in its free
    /// coordinates with the constrained ones filled from t(g).
    pub fn sample_composable(&self, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
        let g = self.sample_arrow(rng);
        let t = self.target(&g);
        let h = match self {
            Model::Pair { n } => {
                let mut h: Vec<f64> = (0..*n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                h.extend_from_slice(&t);
                h
            }
            Model::LogPair { n } | Model::SscLogtanLocal { n } | Model::CorruptedLogPair { n } => {
                let mut h = vec![rng.gen_range(-1.2f64..1.2).exp(), t[0]];
                h.extend_from_slice(&t[1..]);
                for _ in 0..(n - 1) {
                    h.push(rng.gen_range(-2.0..2.0));
                }
                h
            }
            Model::SympPair2d => vec![
                rng.gen_range(-1.2f64..1.2).exp(),
                rng.gen_range(-2.0..2.0),
                t[0],
                t[1],
            ],
        };
        (g, h)
    }
}
