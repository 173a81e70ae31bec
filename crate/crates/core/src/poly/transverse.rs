//! Degeneracy of the transverse Poisson structure along a coordinate
//! subspace, and the sampled transversality heuristic.

use num_rational::BigRational;

use super::multivector::{modular_vector_field, PolyMultivector};
use super::ring::Poly;
use super::PolyError;

/// Result of the degenerate-transverse-structure test along a coordinate
/// subspace L = {x_s = 0 : s ∈ vanishing}.
#[derive(Debug, Clone)]
pub struct TransverseReport {
    /// The transverse linearization π_N as a bivector in the ambient
    /// coordinates (supported on the conormal directions, linear in them).
    pub pi_n: PolyMultivector,
    /// The contraction vector field v with π_N = v ∧ E when degenerate.
    pub v: PolyMultivector,
    /// π_N − v ∧ E.
    pub residual: PolyMultivector,
    pub degenerate: bool,
}

/// Extract the transverse linearization of `pi` along the coordinate
/// subspace given by the vanishing variables, and test the degeneracy
/// identity π_N = v ∧ E with E the Euler field of the vanishing variables.
///
/// Preconditions checked: L must be a Poisson submanifold, i.e. every
/// component of π pairing a conormal direction with anything vanishes on L.
pub fn degenerate_transverse_check(
    pi: &PolyMultivector,
    vanishing: &[usize],
) -> Result<TransverseReport, PolyError> {
    if pi.degree() != 2 {
        return Err(PolyError::DegreeMismatch {
            expected: 2,
            got: pi.degree(),
        });
    }
    let n = pi.nvars();
    for &s in vanishing {
        if s >= n {
            return Err(PolyError::VariableMismatch {
                expected: n,
                got: s,
            });
        }
    }
    let is_conormal = |i: usize| vanishing.contains(&i);
    let restrict_to_l = |p: &Poly| -> Poly {
        let mut q = p.clone();
        for &s in vanishing {
            q = q.restrict_zero(s);
        }
        q
    };
    // L Poisson: components pairing a conormal direction with anything must
    // vanish on L
    for (idx, comp) in pi.components() {
        if (is_conormal(idx[0]) || is_conormal(idx[1])) && !restrict_to_l(comp).is_zero() {
            return Err(PolyError::NotPoissonSubmanifold {
                component: format!("{:?}", idx),
            });
        }
    }
    // π_N: for conormal pairs a < b, the part of π^{ab} linear in the
    // vanishing variables with coefficients restricted to L
    let mut pi_n = PolyMultivector::zero(n, 2);
    for (idx, comp) in pi.components() {
        let (a, b) = (idx[0], idx[1]);
        if !(is_conormal(a) && is_conormal(b)) {
            continue;
        }
        let mut linear = Poly::zero(n);
        for &s in vanishing {
            let coeff = restrict_to_l(&comp.derivative(s));
            linear = linear.add(&coeff.mul(&Poly::var(n, s)));
        }
        if !linear.is_zero() {
            pi_n.set(&[a, b], linear);
        }
    }
    // v = Z(π_N)/(k−1) for codimension k ≥ 2; the modular field of a linear
    // bivector v∧E is (k−1)v
    let k = vanishing.len();
    let v = if k >= 2 {
        let z = modular_vector_field(&pi_n)?;
        z.scale(&BigRational::new(1.into(), (k as i64 - 1).max(1).into()))
    } else {
        PolyMultivector::zero(n, 1)
    };
    // E = Σ_s x_s ∂_s over the vanishing variables
    let mut euler = PolyMultivector::zero(n, 1);
    for &s in vanishing {
        euler.set(&[s], Poly::var(n, s));
    }
    let residual = pi_n.sub(&v.wedge(&euler));
    let degenerate = residual.is_zero();
    Ok(TransverseReport {
        pi_n,
        v,
        residual,
        degenerate,
    })
}

#[derive(Debug, Clone)]
pub struct TransversalityWarning {
    pub point: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone)]
pub struct TransversalityReport {
    pub ok: bool,
    pub warnings: Vec<TransversalityWarning>,
    pub tolerance: f64,
}

/// Sample `f` and ∇f on a regular grid over the box and flag points where
/// both are simultaneously small (suspected non-transverse vanishing). The
/// certificate is heuristic: a clean pass does not prove transversality.
pub fn transversality_sample_check(
    f: &Poly,
    box_min: &[f64],
    box_max: &[f64],
    grid_n: usize,
) -> Result<TransversalityReport, PolyError> {
    let n = f.nvars();
    if box_min.len() != n || box_max.len() != n {
        return Err(PolyError::VariableMismatch {
            expected: n,
            got: box_min.len(),
        });
    }
    if grid_n < 2 {
        return Err(PolyError::GridTooSmall(grid_n));
    }
    let grad = f.gradient();
    let hessian: Vec<Vec<Poly>> = grad.iter().map(|g| g.gradient()).collect();
    let mut points = Vec::new();
    let mut index = vec![0usize; n];
    loop {
        let point: Vec<f64> = (0..n)
            .map(|i| {
                box_min[i] + (box_max[i] - box_min[i]) * index[i] as f64 / (grid_n - 1) as f64
            })
            .collect();
        points.push(point);
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                break;
            }
            index[i] += 1;
            if index[i] < grid_n {
                break;
            }
            index[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    let cell: f64 = (0..n)
        .map(|i| (box_max[i] - box_min[i]) / (grid_n - 1) as f64)
        .fold(0.0_f64, f64::max);
    let hess_norm = |p: &[f64]| -> f64 {
        hessian
            .iter()
            .flat_map(|row| row.iter())
            .map(|h| h.eval_f64(p).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    // Near a genuinely non-transverse point both f and grad f vanish; a grid
    // point within one cell of it sees |grad f| of order H*cell and |f| of
    // order H*cell^2. The Hessian scale is taken locally so that curves that
    // are merely small do not trip a globally calibrated threshold. A small
    // floor on H catches higher-order degeneracies (e.g. x^3) at the cost of
    // a fixed, documented heuristic.
    let h_global = points.iter().map(|p| hess_norm(p)).fold(0.0_f64, f64::max);
    let mut warnings = Vec::new();
    for point in points {
        let h_eff = hess_norm(&point).max(1e-3 * h_global).max(1e-9);
        let value_tol = h_eff * cell * cell;
        let grad_tol = h_eff * cell;
        let value = f.eval_f64(&point);
        let gnorm = grad
            .iter()
            .map(|g| g.eval_f64(&point).powi(2))
            .sum::<f64>()
            .sqrt();
        if value.abs() <= value_tol && gnorm <= grad_tol {
            warnings.push(TransversalityWarning {
                point,
                value,
                gradient_norm: gnorm,
            });
        }
    }
    Ok(TransversalityReport {
        ok: warnings.is_empty(),
        warnings,
        tolerance: cell,
    })
}
