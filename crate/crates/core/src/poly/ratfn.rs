//! Rational functions as unreduced numerator/denominator pairs.
//!
//! No multivariate gcd: simplification happens opportunistically through
//! exact division, which suffices for the blow-up charts (monomial
//! denominators) used here. A rational function with nonzero denominator
//! reduces to a polynomial exactly when the denominator divides the
//! numerator.

use num_rational::BigRational;

use super::ring::Poly;
use super::PolyError;

#[derive(Debug, Clone)]
pub struct RationalFn {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFn {
    pub fn from_poly(p: Poly) -> Self {
        let nvars = p.nvars();
        RationalFn {
            num: p,
            den: Poly::one(nvars),
        }
    }

    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        RationalFn { num, den }.simplify()
    }

    pub fn zero(nvars: usize) -> Self {
        RationalFn::from_poly(Poly::zero(nvars))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn simplify(self) -> Self {
        if self.num.is_zero() {
            let n = self.num.nvars();
            return RationalFn {
                num: Poly::zero(n),
                den: Poly::one(n),
            };
        }
        if let Some(q) = self.num.div_exact(&self.den) {
            let n = q.nvars();
            return RationalFn {
                num: q,
                den: Poly::one(n),
            };
        }
        self
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        RationalFn::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RationalFn) -> RationalFn {
        RationalFn::new(
            self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn mul(&self, other: &RationalFn) -> RationalFn {
        RationalFn::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    /// Quotient-rule derivative in `var`.
    pub fn derivative(&self, var: usize) -> RationalFn {
        RationalFn::new(
            self.num
                .derivative(var)
                .mul(&self.den)
                .sub(&self.num.mul(&self.den.derivative(var))),
            self.den.mul(&self.den),
        )
    }

    /// Substitute polynomials for the variables.
    pub fn substitute(&self, values: &[Poly]) -> RationalFn {
        RationalFn::new(self.num.substitute(values), self.den.substitute(values))
    }

    /// Exact equality as rational functions (cross-multiplication).
    pub fn equals(&self, other: &RationalFn) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// Reduce to a polynomial; the denominator is reported on failure.
    pub fn to_poly(&self) -> Result<Poly, PolyError> {
        self.num
            .div_exact(&self.den)
            .ok_or_else(|| PolyError::NotLiftable {
                denominator: format!("{}", self.den),
            })
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }

    pub fn eval(&self, point: &[BigRational]) -> Option<BigRational> {
        let d = self.den.eval(point);
        if num_traits::Zero::is_zero(&d) {
            None
        } else {
            Some(self.num.eval(point) / d)
        }
    }
}
