//! Lie algebroid frames of polynomial vector fields: elementary
//! modification, involutivity certificates, and symbolic rank over the
//! rational-function field.

use num_rational::BigRational;
use num_traits::Zero;

use super::multivector::{schouten_bracket, PolyMultivector};
use super::ring::Poly;
use super::PolyError;

/// An ordered frame of polynomial vector fields with a designated
/// hypersurface variable and modification count.
#[derive(Debug, Clone)]
pub struct PolyFrame {
    pub fields: Vec<PolyMultivector>,
    pub hypersurface_var: usize,
    pub modification_count: usize,
}

impl PolyFrame {
    pub fn new(fields: Vec<PolyMultivector>, hypersurface_var: usize) -> Result<Self, PolyError> {
        let Some(first) = fields.first() else {
            return Err(PolyError::EmptyFrame);
        };
        let nvars = first.nvars();
        for f in &fields {
            if f.degree() != 1 {
                return Err(PolyError::DegreeMismatch {
                    expected: 1,
                    got: f.degree(),
                });
            }
            if f.nvars() != nvars {
                return Err(PolyError::VariableMismatch {
                    expected: nvars,
                    got: f.nvars(),
                });
            }
        }
        let frame = PolyFrame {
            fields,
            hypersurface_var,
            modification_count: 0,
        };
        if frame.rank() < frame.fields.len() {
            return Err(PolyError::DependentFrame);
        }
        Ok(frame)
    }

    pub fn nvars(&self) -> usize {
        self.fields[0].nvars()
    }

    /// Coefficient matrix: row per field, column per coordinate direction.
    pub fn matrix(&self) -> Vec<Vec<Poly>> {
        let n = self.nvars();
        self.fields
            .iter()
            .map(|f| (0..n).map(|i| f.component(&[i])).collect())
            .collect()
    }

    /// Rank over the rational-function field, by fraction-free (Bareiss)
    /// elimination with exact polynomial division.
    pub fn rank(&self) -> usize {
        rank_over_function_field(&self.matrix())
    }

    /// Span equality with another frame away from common zero loci: the
    /// stacked matrix must have the same function-field rank as each frame.
    pub fn same_span(&self, other: &PolyFrame) -> bool {
        let mut stacked = self.matrix();
        stacked.extend(other.matrix());
        let r = rank_over_function_field(&stacked);
        r == self.rank() && r == other.rank()
    }
}

/// Fraction-free Gaussian elimination rank over ℚ(x₁,…,xₙ).
pub fn rank_over_function_field(matrix: &[Vec<Poly>]) -> usize {
    if matrix.is_empty() {
        return 0;
    }
    let rows = matrix.len();
    let cols = matrix[0].len();
    let mut a: Vec<Vec<Poly>> = matrix.to_vec();
    let nvars = a[0].first().map(|p| p.nvars()).unwrap_or(0);
    let mut prev = Poly::one(nvars);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let Some(pivot) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, pivot);
        for r in row + 1..rows {
            for c in col + 1..cols {
                let num = a[row][col].mul(&a[r][c]).sub(&a[r][col].mul(&a[row][c]));
                a[r][c] = num
                    .div_exact(&prev)
                    .expect("Bareiss division is exact");
            }
            a[r][col] = Poly::zero(nvars);
        }
        prev = a[row][col].clone();
        row += 1;
        rank += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Elementary modification: multiply the selected frame slots by the
/// hypersurface coordinate. The unmodified slots are the ones spanning the
/// subalgebroid along {var = 0}; selecting the complement is the caller's
/// responsibility (the worked chains modify one explicit slot at a time).
pub fn modify_slots(frame: &PolyFrame, slots: &[usize], var: usize) -> Result<PolyFrame, PolyError> {
    for &s in slots {
        if s >= frame.fields.len() {
            return Err(PolyError::SlotOutOfRange {
                slot: s,
                len: frame.fields.len(),
            });
        }
    }
    let nvars = frame.nvars();
    let x = Poly::var(nvars, var);
    let fields = frame
        .fields
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if slots.contains(&i) {
                f.mul_poly(&x)
            } else {
                f.clone()
            }
        })
        .collect();
    Ok(PolyFrame {
        fields,
        hypersurface_var: var,
        modification_count: frame.modification_count + 1,
    })
}

/// Elementary modification of the first `l` slots along `var`.
pub fn elementary_modification(
    frame: &PolyFrame,
    l: usize,
    var: usize,
) -> Result<PolyFrame, PolyError> {
    if l > frame.fields.len() {
        return Err(PolyError::SlotOutOfRange {
            slot: l,
            len: frame.fields.len(),
        });
    }
    let slots: Vec<usize> = (0..l).collect();
    modify_slots(frame, &slots, var)
}

/// Outcome of the module-closure check: either every pairwise bracket lies in
/// the module with explicit polynomial coefficient certificates, a witness
/// pair fails outright, or the degree bound was too small to decide.
#[derive(Debug, Clone)]
pub enum Involutivity {
    Closed {
        /// certificates[(i,j)] = coefficients c_k with [X_i, X_j] = Σ c_k X_k
        certificates: Vec<((usize, usize), Vec<Poly>)>,
    },
    Inconclusive {
        pair: (usize, usize),
        degree_bound: u32,
    },
}

/// Check that the frame is closed under the Lie bracket by solving
/// [X_i, X_j] = Σ_k c_k X_k for polynomial coefficients of total degree
/// ≤ `degree_bound`, exactly over ℚ.
pub fn involutivity_check(frame: &PolyFrame, degree_bound: u32) -> Result<Involutivity, PolyError> {
    let max_coeff_degree = frame
        .fields
        .iter()
        .flat_map(|f| f.components().map(|(_, p)| p.total_degree()))
        .max()
        .unwrap_or(0);
    if degree_bound < max_coeff_degree + 1 {
        return Err(PolyError::DegreeBoundTooSmall {
            bound: degree_bound,
            needed: max_coeff_degree + 1,
        });
    }
    let mut certificates = Vec::new();
    for i in 0..frame.fields.len() {
        for j in i + 1..frame.fields.len() {
            let bracket = schouten_bracket(&frame.fields[i], &frame.fields[j])?;
            match solve_module_membership(&bracket, &frame.fields, degree_bound) {
                Some(coeffs) => certificates.push(((i, j), coeffs)),
                None => {
                    return Ok(Involutivity::Inconclusive {
                        pair: (i, j),
                        degree_bound,
                    })
                }
            }
        }
    }
    Ok(Involutivity::Closed { certificates })
}

/// Solve X = Σ_k c_k F_k with deg c_k ≤ bound by exact linear algebra over ℚ
/// on monomial coefficients.
fn solve_module_membership(
    target: &PolyMultivector,
    fields: &[PolyMultivector],
    degree_bound: u32,
) -> Option<Vec<Poly>> {
    let nvars = target.nvars();
    let monomials = monomials_up_to(nvars, degree_bound);
    // unknowns: one rational per (field, monomial)
    let ncols = fields.len() * monomials.len();
    // equations: coefficient of each (component direction, product monomial)
    let mut row_index: std::collections::BTreeMap<(usize, Vec<u32>), usize> = Default::default();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();
    let touch = |key: (usize, Vec<u32>),
                     rows: &mut Vec<Vec<BigRational>>,
                     rhs: &mut Vec<BigRational>,
                     row_index: &mut std::collections::BTreeMap<(usize, Vec<u32>), usize>|
     -> usize {
        *row_index.entry(key).or_insert_with(|| {
            rows.push(vec![BigRational::zero(); ncols]);
            rhs.push(BigRational::zero());
            rows.len() - 1
        })
    };
    for (fi, f) in fields.iter().enumerate() {
        for dir in 0..nvars {
            let comp = f.component(&[dir]);
            for (e, c) in comp.terms() {
                for (mi, m) in monomials.iter().enumerate() {
                    let prod: Vec<u32> = e.iter().zip(m).map(|(a, b)| a + b).collect();
                    let r = touch((dir, prod), &mut rows, &mut rhs, &mut row_index);
                    let col = fi * monomials.len() + mi;
                    rows[r][col] += c.clone();
                }
            }
        }
    }
    for dir in 0..nvars {
        let comp = target.component(&[dir]);
        for (e, c) in comp.terms() {
            let r = touch((dir, e.clone()), &mut rows, &mut rhs, &mut row_index);
            rhs[r] = c.clone();
        }
    }
    let solution = solve_rational_system(&mut rows, &mut rhs)?;
    let coeffs = (0..fields.len())
        .map(|fi| {
            let mut p = Poly::zero(nvars);
            for (mi, m) in monomials.iter().enumerate() {
                let c = &solution[fi * monomials.len() + mi];
                if !c.is_zero() {
                    p = p.add(&Poly::monomial(nvars, m.clone(), c.clone()));
                }
            }
            p
        })
        .collect();
    Some(coeffs)
}

fn monomials_up_to(nvars: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(nvars: usize, pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == nvars {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[pos] = k;
            rec(nvars, pos + 1, left - k, cur, out);
        }
        cur[pos] = 0;
    }
    rec(nvars, 0, bound, &mut cur, &mut out);
    out
}

/// Gaussian elimination over ℚ; returns one solution of A x = b or `None`
/// when the system is inconsistent.
fn solve_rational_system(
    rows: &mut [Vec<BigRational>],
    rhs: &mut [BigRational],
) -> Option<Vec<BigRational>> {
    let nrows = rows.len();
    let ncols = rows.first().map(Vec::len).unwrap_or(0);
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = rows[r][c].clone().recip();
        for cc in c..ncols {
            let v = &rows[r][cc] * &inv;
            rows[r][cc] = v;
        }
        let v = &rhs[r] * &inv;
        rhs[r] = v;
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for cc in c..ncols {
                    let v = &rows[i][cc] - &factor * &rows[r][cc];
                    rows[i][cc] = v;
                }
                let v = &rhs[i] - &factor * &rhs[r];
                rhs[i] = v;
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    // inconsistency: zero row with nonzero rhs
    for i in r..nrows {
        if !rhs[i].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (row, &c) in pivot_cols.iter().enumerate() {
        x[c] = rhs[row].clone();
    }
    Some(x)
}
