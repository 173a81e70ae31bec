//! Polynomial multivector fields with exact coefficients.
//!
//! Components are stored against strictly increasing index tuples, encoded
//! as bitmasks. The Schouten–Nijenhuis bracket is computed in the odd
//! coordinate formalism: writing P = P(x, ξ) with ξ_i ~ ∂_{x_i},
//!
//!   [P,Q] = P⋆Q − (−1)^{(p−1)(q−1)} Q⋆P,  P⋆Q = Σ_l (∂P/∂ξ_l)(∂Q/∂x_l),
//!
//! where ∂/∂ξ_l is the left graded derivative.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::ratfn::RationalFn;
use super::ring::{Poly, PolyJson};
use super::PolyError;

type Mask = u64;

fn mask_of(indices: &[usize]) -> Mask {
    let mut m = 0;
    for &i in indices {
        m |= 1 << i;
    }
    m
}

fn indices_of(mask: Mask) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Sign of the wedge ξ_A ∧ ξ_B relative to the increasing-order basis of
/// A ∪ B; zero overlap is the caller's responsibility.
fn merge_sign(a: Mask, b: Mask) -> i32 {
    debug_assert_eq!(a & b, 0);
    let mut sign = 1;
    for i in indices_of(b) {
        // count bits of a above position i
        let above = (a >> (i + 1)).count_ones();
        if above % 2 == 1 {
            sign = -sign;
        }
    }
    sign
}

/// Right derivative P ∂⃖/∂ξ_l on the basis element ξ_mask: removes bit `l`
/// with sign (−1)^{#bits above l}. The star product differentiates its first
/// factor from the right.
fn xi_derivative_right(mask: Mask, l: usize) -> Option<(Mask, i32)> {
    if mask >> l & 1 == 0 {
        return None;
    }
    let above = (mask >> (l + 1)).count_ones();
    let sign = if above % 2 == 0 { 1 } else { -1 };
    Some((mask & !(1 << l), sign))
}

#[derive(Clone, PartialEq, Eq)]
pub struct PolyMultivector {
    nvars: usize,
    degree: usize,
    components: BTreeMap<Mask, Poly>,
}

impl fmt::Debug for PolyMultivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(m, p)| {
                let idx: Vec<String> = indices_of(*m).iter().map(|i| format!("d{i}")).collect();
                format!("({p}) {}", idx.join("^"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl PolyMultivector {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        assert!(nvars <= 64);
        PolyMultivector {
            nvars,
            degree,
            components: BTreeMap::new(),
        }
    }

    /// A scalar (degree-0) multivector.
    pub fn scalar(p: Poly) -> Self {
        let nvars = p.nvars();
        let mut out = PolyMultivector::zero(nvars, 0);
        out.set(&[], p);
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Set the component for a strictly increasing index tuple.
    pub fn set(&mut self, indices: &[usize], p: Poly) {
        assert!(indices.windows(2).all(|w| w[0] < w[1]), "indices must increase");
        assert_eq!(indices.len(), self.degree);
        assert!(indices.iter().all(|&i| i < self.nvars));
        assert_eq!(p.nvars(), self.nvars);
        let m = mask_of(indices);
        if p.is_zero() {
            self.components.remove(&m);
        } else {
            self.components.insert(m, p);
        }
    }

    pub fn component(&self, indices: &[usize]) -> Poly {
        self.components
            .get(&mask_of(indices))
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.nvars))
    }

    pub fn components(&self) -> impl Iterator<Item = (Vec<usize>, &Poly)> {
        self.components.iter().map(|(m, p)| (indices_of(*m), p))
    }

    /// Fully antisymmetric component for an arbitrary (repeating allowed)
    /// index tuple.
    pub fn component_signed(&self, indices: &[usize]) -> Poly {
        let mut sorted = indices.to_vec();
        // selection-sort tracking parity
        let mut sign = 1i32;
        for i in 0..sorted.len() {
            for j in (i + 1..sorted.len()).rev() {
                if sorted[j] < sorted[j - 1] {
                    sorted.swap(j, j - 1);
                    sign = -sign;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Poly::zero(self.nvars);
        }
        let base = self.component(&sorted);
        if sign < 0 {
            base.neg()
        } else {
            base
        }
    }

    pub fn add(&self, other: &PolyMultivector) -> PolyMultivector {
        assert_eq!(self.nvars, other.nvars);
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (m, p) in &other.components {
            let sum = out
                .components
                .get(m)
                .map(|q| q.add(p))
                .unwrap_or_else(|| p.clone());
            if sum.is_zero() {
                out.components.remove(m);
            } else {
                out.components.insert(*m, sum);
            }
        }
        out
    }

    pub fn neg(&self) -> PolyMultivector {
        PolyMultivector {
            nvars: self.nvars,
            degree: self.degree,
            components: self
                .components
                .iter()
                .map(|(m, p)| (*m, p.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &PolyMultivector) -> PolyMultivector {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> PolyMultivector {
        let mut out = PolyMultivector::zero(self.nvars, self.degree);
        for (m, p) in &self.components {
            let q = p.scale(c);
            if !q.is_zero() {
                out.components.insert(*m, q);
            }
        }
        out
    }

    /// Multiply every component by a polynomial.
    pub fn mul_poly(&self, f: &Poly) -> PolyMultivector {
        let mut out = PolyMultivector::zero(self.nvars, self.degree);
        for (m, p) in &self.components {
            let q = p.mul(f);
            if !q.is_zero() {
                out.components.insert(*m, q);
            }
        }
        out
    }

    /// Wedge product.
    pub fn wedge(&self, other: &PolyMultivector) -> PolyMultivector {
        assert_eq!(self.nvars, other.nvars);
        let mut out = PolyMultivector::zero(self.nvars, self.degree + other.degree);
        for (ma, pa) in &self.components {
            for (mb, pb) in &other.components {
                if ma & mb != 0 {
                    continue;
                }
                let sign = merge_sign(*ma, *mb);
                let mut prod = pa.mul(pb);
                if sign < 0 {
                    prod = prod.neg();
                }
                let m = ma | mb;
                let sum = out
                    .components
                    .get(&m)
                    .map(|q| q.add(&prod))
                    .unwrap_or(prod);
                if sum.is_zero() {
                    out.components.remove(&m);
                } else {
                    out.components.insert(m, sum);
                }
            }
        }
        out
    }

    /// The star product Σ_l (P ∂⃖/∂ξ_l)(∂Q/∂x_l) of the odd formalism.
    fn star(&self, other: &PolyMultivector) -> PolyMultivector {
        let degree = self.degree + other.degree - 1;
        let mut out = PolyMultivector::zero(self.nvars, degree);
        for l in 0..self.nvars {
            for (ma, pa) in &self.components {
                let Some((ra, sa)) = xi_derivative_right(*ma, l) else {
                    continue;
                };
                for (mb, pb) in &other.components {
                    let db = pb.derivative(l);
                    if db.is_zero() || ra & mb != 0 {
                        continue;
                    }
                    let sign = sa * merge_sign(ra, *mb);
                    let mut prod = pa.mul(&db);
                    if sign < 0 {
                        prod = prod.neg();
                    }
                    let m = ra | mb;
                    let sum = out
                        .components
                        .get(&m)
                        .map(|q| q.add(&prod))
                        .unwrap_or(prod);
                    if sum.is_zero() {
                        out.components.remove(&m);
                    } else {
                        out.components.insert(m, sum);
                    }
                }
            }
        }
        out
    }

    pub fn eval_f64(&self, indices: &[usize], point: &[f64]) -> f64 {
        self.component(indices).eval_f64(point)
    }
}

/// Graded Schouten–Nijenhuis bracket of two multivector fields.
pub fn schouten_bracket(
    p: &PolyMultivector,
    q: &PolyMultivector,
) -> Result<PolyMultivector, PolyError> {
    if p.nvars != q.nvars {
        return Err(PolyError::VariableMismatch {
            expected: p.nvars,
            got: q.nvars,
        });
    }
    if p.degree + q.degree == 0 {
        return Ok(PolyMultivector::zero(p.nvars, 0));
    }
    let pq = p.star(q);
    let qp = q.star(p);
    let sign_exp = (p.degree as i64 - 1) * (q.degree as i64 - 1);
    Ok(if sign_exp % 2 == 0 {
        pq.sub(&qp)
    } else {
        pq.add(&qp)
    })
}

/// Pfaffian of a degree-2 multivector on 2n variables: the coefficient of
/// π^n / n! against ∂_1 ∧ … ∧ ∂_{2n}.
pub fn pfaffian(pi: &PolyMultivector) -> Result<Poly, PolyError> {
    if pi.degree != 2 {
        return Err(PolyError::DegreeMismatch {
            expected: 2,
            got: pi.degree,
        });
    }
    if pi.nvars % 2 != 0 {
        return Err(PolyError::OddVariableCount(pi.nvars));
    }
    let n = pi.nvars / 2;
    let mut power = PolyMultivector::zero(pi.nvars, 0);
    power.set(&[], Poly::one(pi.nvars));
    for _ in 0..n {
        power = power.wedge(pi);
    }
    let top: Vec<usize> = (0..pi.nvars).collect();
    let mut factorial = BigRational::from_integer(1.into());
    for k in 2..=n {
        factorial *= BigRational::from_integer(k.into());
    }
    Ok(power
        .component(&top)
        .scale(&factorial.recip()))
}

/// Modular vector field of a bivector with respect to the Lebesgue volume:
/// Z^i = ∂_k π^{ik}. For π = f ∂x∧∂y this is f_y ∂x − f_x ∂y.
pub fn modular_vector_field(pi: &PolyMultivector) -> Result<PolyMultivector, PolyError> {
    if pi.degree != 2 {
        return Err(PolyError::DegreeMismatch {
            expected: 2,
            got: pi.degree,
        });
    }
    let n = pi.nvars;
    let mut z = PolyMultivector::zero(n, 1);
    for i in 0..n {
        let mut zi = Poly::zero(n);
        for k in 0..n {
            if k == i {
                continue;
            }
            zi = zi.add(&pi.component_signed(&[i, k]).derivative(k));
        }
        if !zi.is_zero() {
            let existing = z.component(&[i]);
            z.set(&[i], existing.add(&zi));
        }
    }
    Ok(z)
}

/// A polynomial chart change with rational inverse: `forward` gives the old
/// coordinates as polynomials in the new ones (x = φ(u)), `inverse` the new
/// coordinates as rational functions of the old (u = ψ(x)).
#[derive(Debug, Clone)]
pub struct RationalChartChange {
    pub forward: Vec<Poly>,
    pub inverse: Vec<RationalFn>,
    pub note: String,
}

impl RationalChartChange {
    /// Builds the chart, checking φ∘ψ = id symbolically.
    pub fn new(
        forward: Vec<Poly>,
        inverse: Vec<RationalFn>,
        note: impl Into<String>,
    ) -> Result<Self, PolyError> {
        let n_old = forward.len();
        let n_new = inverse.len();
        if n_old == 0 || forward.iter().any(|p| p.nvars() != n_new) {
            return Err(PolyError::VariableMismatch {
                expected: n_new,
                got: forward.first().map(|p| p.nvars()).unwrap_or(0),
            });
        }
        // φ(ψ(x)) = x as rational functions of x
        for (i, phi) in forward.iter().enumerate() {
            let mut acc = RationalFn::zero(n_old);
            for (exps, coef) in phi.terms() {
                let mut term = RationalFn::from_poly(Poly::constant(n_old, coef.clone()));
                for (var, &k) in exps.iter().enumerate() {
                    for _ in 0..k {
                        term = term.mul(&inverse[var]);
                    }
                }
                acc = acc.add(&term);
            }
            let xi = RationalFn::from_poly(Poly::var(n_old, i));
            if !acc.equals(&xi) {
                return Err(PolyError::BadChart(format!(
                    "phi_{i}(psi(x)) != x_{i}"
                )));
            }
        }
        Ok(RationalChartChange {
            forward,
            inverse,
            note: note.into(),
        })
    }

    pub fn identity(n: usize) -> Self {
        RationalChartChange {
            forward: (0..n).map(|i| Poly::var(n, i)).collect(),
            inverse: (0..n)
                .map(|i| RationalFn::from_poly(Poly::var(n, i)))
                .collect(),
            note: "identity".into(),
        }
    }

    pub fn old_dim(&self) -> usize {
        self.forward.len()
    }

    pub fn new_dim(&self) -> usize {
        self.inverse.len()
    }
}

/// Transform a multivector by the tensor law through a chart change,
/// requiring the result to clear denominators to polynomials. The component
/// for an increasing tuple A in the new chart is
///
///   Σ_{I increasing} P^I(φ(u)) · det[ ∂ψ_{a_r}/∂x_{i_s} ∘ φ ].
pub fn chart_transform(
    p: &PolyMultivector,
    chart: &RationalChartChange,
) -> Result<PolyMultivector, PolyError> {
    if p.nvars != chart.old_dim() {
        return Err(PolyError::VariableMismatch {
            expected: chart.old_dim(),
            got: p.nvars,
        });
    }
    let n_new = chart.new_dim();
    let k = p.degree;
    // Jacobian entries ∂ψ_a/∂x_i composed with φ, as rational functions in u
    let mut jac: Vec<Vec<RationalFn>> = Vec::with_capacity(n_new);
    for a in 0..n_new {
        let mut row = Vec::with_capacity(p.nvars);
        for i in 0..p.nvars {
            row.push(chart.inverse[a].derivative(i).substitute(&chart.forward));
        }
        jac.push(row);
    }
    let mut out = PolyMultivector::zero(n_new, k);
    let new_tuples = increasing_tuples(n_new, k);
    let old_tuples = increasing_tuples(p.nvars, k);
    for a_tuple in &new_tuples {
        let mut acc = RationalFn::zero(n_new);
        for i_tuple in &old_tuples {
            let comp = p.component(i_tuple);
            if comp.is_zero() {
                continue;
            }
            let comp_u = comp.substitute(&chart.forward);
            let det = minor_det(&jac, a_tuple, i_tuple);
            if det.is_zero() {
                continue;
            }
            acc = acc.add(&det.mul(&RationalFn::from_poly(comp_u)));
        }
        let poly = acc.to_poly()?;
        if !poly.is_zero() {
            out.set(a_tuple, poly);
        }
    }
    Ok(out)
}

fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Determinant of the submatrix jac[rows][cols] by cofactor expansion; the
/// tuples involved have length ≤ 4 in practice.
fn minor_det(jac: &[Vec<RationalFn>], rows: &[usize], cols: &[usize]) -> RationalFn {
    let k = rows.len();
    debug_assert_eq!(k, cols.len());
    if k == 0 {
        let n = jac
            .first()
            .and_then(|r| r.first())
            .map(|f| f.nvars())
            .unwrap_or(0);
        return RationalFn::from_poly(Poly::one(n));
    }
    if k == 1 {
        return jac[rows[0]][cols[0]].clone();
    }
    let n = jac[rows[0]][cols[0]].nvars();
    let mut acc = RationalFn::zero(n);
    for (j, &c) in cols.iter().enumerate() {
        let entry = &jac[rows[0]][c];
        if entry.is_zero() {
            continue;
        }
        let sub_rows: Vec<usize> = rows[1..].to_vec();
        let sub_cols: Vec<usize> = cols
            .iter()
            .enumerate()
            .filter(|&(jj, _)| jj != j)
            .map(|(_, &cc)| cc)
            .collect();
        let minor = minor_det(jac, &sub_rows, &sub_cols);
        let term = entry.mul(&minor);
        acc = if j % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}

/// JSON form of a multivector: the polynomial schema plus an index-tuple key
/// per component.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultivectorJson {
    pub vars: Vec<String>,
    pub degree: usize,
    pub components: Vec<ComponentJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentJson {
    pub index: Vec<usize>,
    pub terms: Vec<super::ring::TermJson>,
}

impl MultivectorJson {
    pub fn to_multivector(&self) -> Result<PolyMultivector, PolyError> {
        let mut out = PolyMultivector::zero(self.vars.len(), self.degree);
        for c in &self.components {
            let pj = PolyJson {
                vars: self.vars.clone(),
                terms: c.terms.clone(),
            };
            out.set(&c.index, pj.to_poly()?);
        }
        Ok(out)
    }

    pub fn from_multivector(p: &PolyMultivector, vars: &[String]) -> Self {
        MultivectorJson {
            vars: vars.to_vec(),
            degree: p.degree(),
            components: p
                .components()
                .map(|(index, poly)| ComponentJson {
                    index,
                    terms: PolyJson::from_poly(poly, vars).terms,
                })
                .collect(),
        }
    }
}
