//! Integer lattices in row-style Hermite normal form.
//!
//! A [`Lattice`] is a subgroup of ℤⁿ stored as a basis matrix in canonical
//! HNF: row echelon, pivots positive, entries above each pivot reduced into
//! `[0, pivot)`, zero rows dropped. Two lattices are equal iff their stored
//! matrices are identical, which makes HNF the single source of truth for
//! subgroup equality throughout the crate.

use std::fmt;

/// Scalar type for lattice entries. Intermediate products are widened to
/// i128; desk-scale inputs never approach these bounds.
pub type Int = i64;

fn widen_mul(a: Int, b: Int) -> Int {
    let p = (a as i128) * (b as i128);
    Int::try_from(p).expect("lattice arithmetic overflow")
}

fn floor_div(a: Int, b: Int) -> Int {
    debug_assert!(b > 0);
    a.div_euclid(b)
}

/// A sublattice of ℤⁿ, rows = basis vectors, always in canonical HNF.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    n: usize,
    rows: Vec<Vec<Int>>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice{:?}", self.rows)
    }
}

/// Reduce `rows` to canonical row-style HNF in place and drop zero rows.
pub fn hermite_normal_form(mut rows: Vec<Vec<Int>>, n: usize) -> Vec<Vec<Int>> {
    rows.retain(|r| r.iter().any(|&x| x != 0));
    for r in &rows {
        assert_eq!(r.len(), n, "row length mismatch");
    }
    let mut pivot_row = 0;
    for col in 0..n {
        // gcd-eliminate all entries in this column below pivot_row
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..rows.len() {
                if rows[r][col] != 0 {
                    best = match best {
                        None => Some(r),
                        Some(b) if rows[r][col].abs() < rows[b][col].abs() => Some(r),
                        Some(b) => Some(b),
                    };
                }
            }
            let Some(b) = best else { break };
            rows.swap(pivot_row, b);
            let mut others = false;
            let p = rows[pivot_row][col];
            for r in pivot_row + 1..rows.len() {
                if rows[r][col] != 0 {
                    let q = rows[r][col] / p;
                    for c in 0..n {
                        rows[r][c] -= widen_mul(q, rows[pivot_row][c]);
                    }
                    if rows[r][col] != 0 {
                        others = true;
                    }
                }
            }
            if !others {
                break;
            }
        }
        if pivot_row < rows.len() && rows[pivot_row][col] != 0 {
            if rows[pivot_row][col] < 0 {
                for c in 0..n {
                    rows[pivot_row][c] = -rows[pivot_row][c];
                }
            }
            let p = rows[pivot_row][col];
            for r in 0..pivot_row {
                let q = floor_div(rows[r][col], p);
                if q != 0 {
                    for c in 0..n {
                        rows[r][c] -= widen_mul(q, rows[pivot_row][c]);
                    }
                }
            }
            pivot_row += 1;
        }
    }
    rows.truncate(pivot_row);
    rows
}

/// HNF together with a unimodular row transform `u` such that `u * input = hnf`
/// (including the rows of `u` that map onto dropped zero rows — those span the
/// left kernel of the input).
fn hnf_with_transform(input: &[Vec<Int>], n: usize) -> (Vec<Vec<Int>>, Vec<Vec<Int>>, usize) {
    let k = input.len();
    let mut rows: Vec<Vec<Int>> = input.to_vec();
    let mut u: Vec<Vec<Int>> = (0..k)
        .map(|i| (0..k).map(|j| Int::from(i == j)).collect())
        .collect();
    let mut pivot_row = 0;
    for col in 0..n {
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..k {
                if rows[r][col] != 0 {
                    best = match best {
                        None => Some(r),
                        Some(b) if rows[r][col].abs() < rows[b][col].abs() => Some(r),
                        Some(b) => Some(b),
                    };
                }
            }
            let Some(b) = best else { break };
            rows.swap(pivot_row, b);
            u.swap(pivot_row, b);
            let mut others = false;
            let p = rows[pivot_row][col];
            for r in pivot_row + 1..k {
                if rows[r][col] != 0 {
                    let q = rows[r][col] / p;
                    for c in 0..n {
                        rows[r][c] -= widen_mul(q, rows[pivot_row][c]);
                    }
                    for c in 0..k {
                        u[r][c] -= widen_mul(q, u[pivot_row][c]);
                    }
                    if rows[r][col] != 0 {
                        others = true;
                    }
                }
            }
            if !others {
                break;
            }
        }
        if pivot_row < k && rows[pivot_row][col] != 0 {
            if rows[pivot_row][col] < 0 {
                for c in 0..n {
                    rows[pivot_row][c] = -rows[pivot_row][c];
                }
                for c in 0..k {
                    u[pivot_row][c] = -u[pivot_row][c];
                }
            }
            let p = rows[pivot_row][col];
            for r in 0..pivot_row {
                let q = floor_div(rows[r][col], p);
                if q != 0 {
                    for c in 0..n {
                        rows[r][c] -= widen_mul(q, rows[pivot_row][c]);
                    }
                    for c in 0..k {
                        u[r][c] -= widen_mul(q, u[pivot_row][c]);
                    }
                }
            }
            pivot_row += 1;
        }
    }
    (rows, u, pivot_row)
}

impl Lattice {
    /// The zero lattice in ℤⁿ.
    pub fn zero(n: usize) -> Self {
        Lattice { n, rows: vec![] }
    }

    /// All of ℤⁿ.
    pub fn full(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| Int::from(i == j)).collect())
            .collect();
        Lattice { n, rows }
    }

    /// Lattice spanned by the given generators (canonicalized).
    pub fn from_generators(n: usize, gens: &[Vec<Int>]) -> Self {
        Lattice {
            n,
            rows: hermite_normal_form(gens.to_vec(), n),
        }
    }

    /// Diagonal lattice `diag(d)` (zero entries contribute nothing).
    pub fn diagonal(n: usize, diag: &[Int]) -> Self {
        assert_eq!(diag.len(), n);
        let rows: Vec<Vec<Int>> = (0..n)
            .filter(|&i| diag[i] != 0)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { diag[i].abs() } else { 0 })
                    .collect()
            })
            .collect();
        Lattice { n, rows }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Int>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Index of self in ℤⁿ; `None` when rank-deficient (infinite index).
    pub fn index_in_ambient(&self) -> Option<u64> {
        if self.rows.len() < self.n {
            return None;
        }
        // full-rank HNF is upper triangular with pivots on the diagonal
        let mut idx: u64 = 1;
        for (i, row) in self.rows.iter().enumerate() {
            idx = idx.checked_mul(row[i] as u64).expect("index overflow");
        }
        Some(idx)
    }

    /// Membership of a vector, by forward reduction against the HNF basis.
    pub fn contains_vector(&self, v: &[Int]) -> bool {
        assert_eq!(v.len(), self.n);
        self.reduce_vector(v).iter().all(|&x| x == 0)
    }

    /// Reduce `v` modulo the lattice: subtract multiples of basis rows so the
    /// result has entries in `[0, pivot)` on pivot columns. The result is the
    /// canonical coset representative.
    pub fn reduce_vector(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.n);
        let mut v = v.to_vec();
        for row in &self.rows {
            let col = row.iter().position(|&x| x != 0).expect("nonzero row");
            let p = row[col];
            let q = floor_div(v[col], p);
            if q != 0 {
                for c in 0..self.n {
                    v[c] -= widen_mul(q, row[c]);
                }
            }
        }
        v
    }

    /// Containment test `self ⊆ other`.
    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        assert_eq!(self.n, other.n);
        self.rows.iter().all(|r| other.contains_vector(r))
    }

    /// Solve `x · basis = v` over ℤ; returns the coefficient vector when `v`
    /// lies in the lattice spanned by `basis` (not necessarily in HNF).
    pub fn solve_in_span(basis: &[Vec<Int>], n: usize, v: &[Int]) -> Option<Vec<Int>> {
        let k = basis.len();
        if k == 0 {
            return v.iter().all(|&x| x == 0).then(Vec::new);
        }
        let (h, u, rank) = hnf_with_transform(basis, n);
        // forward-substitute v against the HNF rows, tracking coefficients
        let mut v = v.to_vec();
        let mut y = vec![0 as Int; k];
        for (i, row) in h.iter().take(rank).enumerate() {
            let col = row.iter().position(|&x| x != 0).expect("nonzero row");
            if v[col] % row[col] != 0 {
                // may still be reducible by later rows only if they hit col first,
                // impossible in echelon form
                return None;
            }
            let q = v[col] / row[col];
            if q != 0 {
                for c in 0..n {
                    v[c] -= widen_mul(q, row[c]);
                }
            }
            y[i] = q;
        }
        if v.iter().any(|&x| x != 0) {
            return None;
        }
        // x = y · u
        let mut x = vec![0 as Int; k];
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0 {
                for c in 0..k {
                    x[c] += widen_mul(yi, u[i][c]);
                }
            }
        }
        Some(x)
    }

    /// Left kernel of the matrix `rows` (k×n): all x ∈ ℤᵏ with x·rows = 0.
    pub fn left_kernel(rows: &[Vec<Int>], n: usize) -> Lattice {
        let k = rows.len();
        if k == 0 {
            return Lattice::zero(0);
        }
        let (_, u, rank) = hnf_with_transform(rows, n);
        let gens: Vec<Vec<Int>> = u[rank..].to_vec();
        Lattice::from_generators(k, &gens)
    }

    /// Intersection of two lattices in the same ℤⁿ.
    pub fn intersect(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.n, other.n);
        if self.is_zero() || other.is_zero() {
            return Lattice::zero(self.n);
        }
        let mut stacked: Vec<Vec<Int>> = self.rows.clone();
        stacked.extend(other.rows.iter().cloned());
        let kernel = Lattice::left_kernel(&stacked, self.n);
        let k1 = self.rows.len();
        let gens: Vec<Vec<Int>> = kernel
            .basis()
            .iter()
            .map(|z| {
                let mut v = vec![0 as Int; self.n];
                for (i, &zi) in z[..k1].iter().enumerate() {
                    if zi != 0 {
                        for c in 0..self.n {
                            v[c] += widen_mul(zi, self.rows[i][c]);
                        }
                    }
                }
                v
            })
            .collect();
        Lattice::from_generators(self.n, &gens)
    }

    /// Sum (join) of two lattices.
    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.n, other.n);
        let mut gens = self.rows.clone();
        gens.extend(other.rows.iter().cloned());
        Lattice::from_generators(self.n, &gens)
    }

    /// Preimage of `target` under the linear map x ↦ x·f (f is m×n, rows are
    /// images of the source basis vectors): all x ∈ ℤᵐ with x·f ∈ target.
    pub fn preimage(f: &[Vec<Int>], n: usize, target: &Lattice) -> Lattice {
        let m = f.len();
        assert_eq!(n, target.n);
        for r in f {
            assert_eq!(r.len(), n);
        }
        // kernel of [f; basis(target)] stacked, projected to the x part
        let mut stacked: Vec<Vec<Int>> = f.to_vec();
        stacked.extend(target.rows.iter().cloned());
        let kernel = Lattice::left_kernel(&stacked, n);
        let gens: Vec<Vec<Int>> = kernel.basis().iter().map(|z| z[..m].to_vec()).collect();
        Lattice::from_generators(m, &gens)
    }

    /// Image of this lattice under x ↦ x·f (f is n×t).
    pub fn image(&self, f: &[Vec<Int>], t: usize) -> Lattice {
        assert_eq!(f.len(), self.n);
        let gens: Vec<Vec<Int>> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![0 as Int; t];
                for (i, &ri) in r.iter().enumerate() {
                    if ri != 0 {
                        for c in 0..t {
                            v[c] += widen_mul(ri, f[i][c]);
                        }
                    }
                }
                v
            })
            .collect();
        Lattice::from_generators(t, &gens)
    }

    /// All full-rank sublattices of ℤⁿ with index ≤ `max_index`, as HNF
    /// matrices, in deterministic order.
    pub fn enumerate_full_rank(n: usize, max_index: u64) -> Vec<Lattice> {
        if n == 0 {
            return vec![Lattice::zero(0)];
        }
        let mut out = Vec::new();
        let mut diag = vec![1 as Int; n];
        fn rec_diag(
            n: usize,
            pos: usize,
            budget: u64,
            diag: &mut Vec<Int>,
            out: &mut Vec<Lattice>,
        ) {
            if pos == n {
                // fill off-diagonal entries column by column
                let mut mat: Vec<Vec<Int>> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| if i == j { diag[i] } else { 0 })
                            .collect()
                    })
                    .collect();
                fn rec_off(
                    n: usize,
                    diag: &[Int],
                    cells: &[(usize, usize)],
                    idx: usize,
                    mat: &mut Vec<Vec<Int>>,
                    out: &mut Vec<Lattice>,
                ) {
                    if idx == cells.len() {
                        out.push(Lattice {
                            n,
                            rows: mat.clone(),
                        });
                        return;
                    }
                    let (i, j) = cells[idx];
                    for v in 0..diag[j] {
                        mat[i][j] = v;
                        rec_off(n, diag, cells, idx + 1, mat, out);
                    }
                    mat[i][j] = 0;
                }
                let cells: Vec<(usize, usize)> = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(_, j)| diag[j] > 1)
                    .collect();
                rec_off(n, diag, &cells, 0, &mut mat, out);
                return;
            }
            let mut d = 1u64;
            while d <= budget {
                diag[pos] = d as Int;
                rec_diag(n, pos + 1, budget / d, diag, out);
                d += 1;
            }
            diag[pos] = 1;
        }
        rec_diag(n, 0, max_index, &mut diag, &mut out);
        out.sort();
        out
    }
}
