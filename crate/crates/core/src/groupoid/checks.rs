//! Sampled verification of groupoid structure: axioms, anchor frames via the
//! Lie functor, multiplicativity of 2-forms, and blow-down morphisms with
//! Poisson compatibility.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::poly::{PolyFrame, PolyMultivector};

use super::form::{invert_antisymmetric4, TwoForm};
use super::models::Model;
use super::GroupoidError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub max_residual: f64,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl CheckReport {
    fn new(name: &str, samples: usize, max_residual: f64, tol: f64) -> Self {
        CheckReport {
            name: name.to_string(),
            pass: max_residual <= tol,
            max_residual,
            samples,
            failure: None,
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Evaluate the groupoid axioms at `samples` seeded pseudo-random draws:
/// unit laws, inverse laws, associativity and source/target compatibility.
pub fn check_groupoid_axioms(model: &Model, samples: usize, seed: u64, tol: f64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual = 0.0f64;
    for _ in 0..samples {
        let x = model.sample_object(&mut rng);
        let idx = model.identity(&x);
        max_residual = max_residual.max(max_abs_diff(&model.source(&idx), &x));
        max_residual = max_residual.max(max_abs_diff(&model.target(&idx), &x));

        let (g, h) = model.sample_composable(&mut rng);
        let m = model.compose(&g, &h);
        max_residual = max_residual.max(max_abs_diff(&model.source(&m), &model.source(&g)));
        max_residual = max_residual.max(max_abs_diff(&model.target(&m), &model.target(&h)));
        // unit laws
        let left = model.compose(&model.identity(&model.source(&g)), &g);
        max_residual = max_residual.max(max_abs_diff(&left, &g));
        let right = model.compose(&g, &model.identity(&model.target(&g)));
        max_residual = max_residual.max(max_abs_diff(&right, &g));
        // inverse laws
        let inv = model.inverse(&g);
        let to_id = model.compose(&g, &inv);
        max_residual = max_residual.max(max_abs_diff(&to_id, &model.identity(&model.source(&g))));
        let from_id = model.compose(&inv, &g);
        max_residual =
            max_residual.max(max_abs_diff(&from_id, &model.identity(&model.target(&g))));
        // associativity with a third arrow from t(h)
        let t_h = model.target(&h);
        let (_, k) = {
            // a fresh arrow starting at t(h): reuse the composable sampler on
            // an arrow whose target is t(h)
            let idt = model.identity(&t_h);
            model_sample_continuation(model, &idt, &mut rng)
        };
        let a1 = model.compose(&model.compose(&g, &h), &k);
        let a2 = model.compose(&g, &model.compose(&h, &k));
        max_residual = max_residual.max(max_abs_diff(&a1, &a2));
    }
    CheckReport::new("axioms", samples, max_residual, tol)
}

/// An arrow starting at t(g), drawn with the same free coordinates as the
/// composable sampler.
fn model_sample_continuation(
    model: &Model,
    g: &[f64],
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, Vec<f64>) {
    // sample_composable draws (a, b) with free coordinates of b random and
    // constrained ones from t(a); we reuse it by composing with identity
    let (_, mut b) = model.sample_composable(rng);
    let t = model.target(g);
    match model {
        Model::Pair { n } => {
            for i in 0..*n {
                b[n + i] = t[i];
            }
        }
        Model::LogPair { n } | Model::SscLogtanLocal { n } | Model::CorruptedLogPair { n } => {
            b[1] = t[0];
            for i in 0..(n - 1) {
                b[2 + i] = t[1 + i];
            }
        }
        Model::SympPair2d => {
            b[2] = t[0];
            b[3] = t[1];
        }
    }
    (g.to_vec(), b)
}

/// Central-difference Jacobian of a map ℝⁿ → ℝᵐ.
pub fn jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, p: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = p.len();
    let m = f(p).len();
    let mut j = vec![vec![0.0; n]; m];
    for c in 0..n {
        let mut pp = p.to_vec();
        let mut pm = p.to_vec();
        pp[c] += h;
        pm[c] -= h;
        let fp = f(&pp);
        let fm = f(&pm);
        for (r, row) in j.iter_mut().enumerate() {
            row[c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

/// Compare the anchor image of ker(Ts) at identity arrows against the
/// expected polynomial frame: ranks must agree and the two spans must
/// mutually contain each other up to least-squares residual `tol`.
pub fn anchor_frame_check(
    model: &Model,
    expected: &PolyFrame,
    samples: usize,
    seed: u64,
    tol: f64,
) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let obj = model.object_dim();
    let mut max_residual = 0.0f64;
    let mut failure = None;
    let rank_tol = 1e-6;
    for i in 0..samples {
        let mut x = model.sample_object(&mut rng);
        // exercise the degeneracy locus explicitly on a fraction of samples
        if i % 4 == 0 {
            x[0] = 0.0;
        }
        let id = model.identity(&x);
        let js = jacobian(&|g: &[f64]| model.source(g), &id, 1e-6);
        let jt = jacobian(&|g: &[f64]| model.target(g), &id, 1e-6);
        // ker(Ts) as the null space of the Gram matrix JsᵀJs (Ts is a
        // submersion, so the kernel has dimension arrow_dim − obj)
        let gram = DMatrix::from_fn(id.len(), id.len(), |r, c| {
            (0..obj).map(|k| js[k][r] * js[k][c]).sum::<f64>()
        });
        let eig = gram.symmetric_eigen();
        let mut kernel_basis: Vec<Vec<f64>> = Vec::new();
        for (k, lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda.abs() <= rank_tol {
                kernel_basis.push(eig.eigenvectors.column(k).iter().copied().collect());
            }
        }
        let pushed: Vec<Vec<f64>> = kernel_basis
            .iter()
            .map(|v| {
                (0..obj)
                    .map(|r| (0..id.len()).map(|c| jt[r][c] * v[c]).sum())
                    .collect()
            })
            .collect();
        let expected_vecs: Vec<Vec<f64>> = expected
            .fields
            .iter()
            .map(|f| (0..obj).map(|d| f.eval_f64(&[d], &x)).collect())
            .collect();
        let rank = |vectors: &[Vec<f64>]| -> usize {
            if vectors.is_empty() {
                return 0;
            }
            let m = DMatrix::from_fn(vectors.len(), obj, |r, c| vectors[r][c]);
            m.svd(false, false)
                .singular_values
                .iter()
                .filter(|s| **s > rank_tol)
                .count()
        };
        let (rp, re) = (rank(&pushed), rank(&expected_vecs));
        if rp != re {
            failure = Some(format!(
                "rank mismatch at {x:?}: anchor image {rp}, expected frame {re}"
            ));
            max_residual = f64::INFINITY;
            break;
        }
        // mutual containment by least squares
        let residual = span_containment(&pushed, &expected_vecs)
            .max(span_containment(&expected_vecs, &pushed));
        max_residual = max_residual.max(residual);
    }
    let mut report = CheckReport::new("anchor", samples, max_residual, tol);
    if let Some(f) = failure {
        report.pass = false;
        report.failure = Some(f);
    }
    report
}

/// Least-squares residual of expressing each of `targets` in the span of
/// `basis` (all vectors of the same dimension).
fn span_containment(basis: &[Vec<f64>], targets: &[Vec<f64>]) -> f64 {
    if targets.is_empty() {
        return 0.0;
    }
    let dim = targets[0].len();
    let mut worst = 0.0f64;
    for t in targets {
        let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            continue;
        }
        if basis.is_empty() {
            return norm;
        }
        let a = DMatrix::from_fn(dim, basis.len(), |r, c| basis[c][r]);
        let b = nalgebra::DVector::from_fn(dim, |r, _| t[r]);
        let svd = a.clone().svd(true, true);
        let sol = svd.solve(&b, 1e-10).expect("least squares");
        let res = (&a * &sol - &b).norm();
        worst = worst.max(res / norm.max(1.0));
    }
    worst
}

/// m*ω − pr₁*ω − pr₂*ω at sampled composable pairs, via central-difference
/// Jacobians of the three maps out of the composable-pair chart.
pub fn multiplicativity_check(
    model: &Model,
    omega: &TwoForm,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckReport, GroupoidError> {
    let free = composable_free_dim(model)?;
    let arrow = model.arrow_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual = 0.0f64;
    for _ in 0..samples {
        let (g, h) = model.sample_composable(&mut rng);
        let u = pack_composable(model, &g, &h);
        debug_assert_eq!(u.len(), arrow + free);
        let eval_pair = |u: &[f64]| -> (Vec<f64>, Vec<f64>) { unpack_composable(model, u) };
        let m_map = |u: &[f64]| -> Vec<f64> {
            let (g, h) = eval_pair(u);
            model.compose(&g, &h)
        };
        let p1_map = |u: &[f64]| -> Vec<f64> { eval_pair(u).0 };
        let p2_map = |u: &[f64]| -> Vec<f64> { eval_pair(u).1 };
        let jm = jacobian(&m_map, &u, 1e-6);
        let j1 = jacobian(&p1_map, &u, 1e-6);
        let j2 = jacobian(&p2_map, &u, 1e-6);
        let wm = omega.eval(&m_map(&u));
        let w1 = omega.eval(&p1_map(&u));
        let w2 = omega.eval(&p2_map(&u));
        let pull = |j: &Vec<Vec<f64>>, w: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            let dim = u.len();
            let mut out = vec![vec![0.0; dim]; dim];
            for (a, row_a) in j.iter().enumerate() {
                for (b, row_b) in j.iter().enumerate() {
                    let wab = w[a][b];
                    if wab == 0.0 {
                        continue;
                    }
                    for i in 0..dim {
                        for jj in 0..dim {
                            out[i][jj] += row_a[i] * wab * row_b[jj];
                        }
                    }
                }
            }
            out
        };
        let pm = pull(&jm, &wm);
        let pa = pull(&j1, &w1);
        let pb = pull(&j2, &w2);
        for i in 0..u.len() {
            for j in 0..u.len() {
                max_residual = max_residual.max((pm[i][j] - pa[i][j] - pb[i][j]).abs());
            }
        }
    }
    Ok(CheckReport::new("multiplicative", samples, max_residual, tol))
}

fn composable_free_dim(model: &Model) -> Result<usize, GroupoidError> {
    Ok(match model {
        Model::Pair { n } => *n,
        Model::LogPair { n } | Model::SscLogtanLocal { n } | Model::CorruptedLogPair { n } => *n,
        Model::SympPair2d => 2,
    })
}

/// Pack a composable pair into free coordinates (g fully, h's free part).
fn pack_composable(model: &Model, g: &[f64], h: &[f64]) -> Vec<f64> {
    let mut u = g.to_vec();
    match model {
        Model::Pair { n } => u.extend_from_slice(&h[..*n]),
        Model::LogPair { n } | Model::SscLogtanLocal { n } | Model::CorruptedLogPair { n } => {
            u.push(h[0]);
            u.extend_from_slice(&h[2 + (n - 1)..]);
        }
        Model::SympPair2d => {
            u.push(h[0]);
            u.push(h[1]);
        }
    }
    u
}

fn unpack_composable(model: &Model, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let arrow = model.arrow_dim();
    let g = u[..arrow].to_vec();
    let t = model.target(&g);
    let free = &u[arrow..];
    let h = match model {
        Model::Pair { n } => {
            let mut h = free.to_vec();
            h.extend_from_slice(&t[..*n]);
            h
        }
        Model::LogPair { n } | Model::SscLogtanLocal { n } | Model::CorruptedLogPair { n } => {
            let mut h = vec![free[0], t[0]];
            h.extend_from_slice(&t[1..]);
            h.extend_from_slice(&free[1..*n]);
            h
        }
        Model::SympPair2d => vec![free[0], free[1], t[0], t[1]],
    };
    (g, h)
}

/// How a blow-down target carries its Poisson structure for the bracket
/// compatibility check.
pub enum PoissonSide {
    /// Invert this symplectic form pointwise.
    Form(TwoForm),
    /// Use the bivector components directly.
    Bivector(PolyMultivector),
}

impl PoissonSide {
    /// {f, g} for coordinate functions pulled through the Jacobian rows
    /// `row_f`, `row_g` at the point `p`.
    fn bracket(&self, p: &[f64], row_f: &[f64], row_g: &[f64]) -> f64 {
        match self {
            PoissonSide::Form(w) => {
                let pi = invert_antisymmetric4(&w.eval(p));
                let mut acc = 0.0;
                for (i, fi) in row_f.iter().enumerate() {
                    for (j, gj) in row_g.iter().enumerate() {
                        acc += fi * pi[i][j] * gj;
                    }
                }
                acc
            }
            PoissonSide::Bivector(sigma) => {
                let n = sigma.nvars();
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let c = sigma.component_signed(&[i, j]).eval_f64(p);
                        acc += row_f[i] * c * row_g[j];
                    }
                }
                acc
            }
        }
    }
}

/// Verify a base-preserving groupoid morphism at sampled arrows, and
/// optionally the Poisson-map property on coordinate functions.
#[allow(clippy::too_many_arguments)]
pub fn blowdown_check(
    src: &Model,
    dst: &Model,
    map: &dyn Fn(&[f64]) -> Vec<f64>,
    poisson: Option<(&PoissonSide, &PolyMultivector)>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual = 0.0f64;
    for _ in 0..samples {
        let (g, h) = src.sample_composable(&mut rng);
        let fg = map(&g);
        let fh = map(&h);
        max_residual = max_residual.max(max_abs_diff(&dst.source(&fg), &src.source(&g)));
        max_residual = max_residual.max(max_abs_diff(&dst.target(&fg), &src.target(&g)));
        let m_src = map(&src.compose(&g, &h));
        let m_dst = dst.compose(&fg, &fh);
        max_residual = max_residual.max(max_abs_diff(&m_src, &m_dst));
        let x = src.sample_object(&mut rng);
        max_residual = max_residual.max(max_abs_diff(&map(&src.identity(&x)), &dst.identity(&x)));
        max_residual = max_residual.max(max_abs_diff(&map(&src.inverse(&g)), &dst.inverse(&fg)));
        if let Some((src_poisson, dst_bivector)) = poisson {
            let jphi = jacobian(map, &g, 1e-6);
            let fgp = map(&g);
            let n_dst = dst.arrow_dim();
            for a in 0..n_dst {
                for b in a + 1..n_dst {
                    let lhs = src_poisson.bracket(&g, &jphi[a], &jphi[b]);
                    let rhs = dst_bivector.component_signed(&[a, b]).eval_f64(&fgp);
                    max_residual = max_residual.max((lhs - rhs).abs());
                }
            }
        }
    }
    CheckReport::new("blowdown", samples, max_residual, tol)
}
