//! Split-family subgroups of mapping-torus groups ℤ ⋉_A ℤⁿ.
//!
//! Multiplication convention: (k,v)·(k′,v′) = (k+k′, A^{k′}v + v′), with the
//! monodromy matrix A acting on column vectors. A split subgroup is generated
//! by (m,w) together with a fiber lattice Λ satisfying AᵐΛ = Λ; general
//! subgroup enumeration is out of scope, these are verification-only values.

use super::lattice::{Int, Lattice};
use super::{FgGroup, GroupError, Subgroup, SubgroupRepr};

fn monodromy(g: &FgGroup) -> Result<(usize, &Vec<Vec<Int>>), GroupError> {
    match g {
        FgGroup::MappingTorus { n, monodromy } => Ok((*n, monodromy)),
        _ => Err(GroupError::InvalidSplitData(
            "ambient group is not a mapping torus".into(),
        )),
    }
}

/// Apply A to a column vector.
fn apply_col(a: &[Vec<Int>], v: &[Int]) -> Vec<Int> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    a[i][j]
                        .checked_mul(v[j])
                        .expect("monodromy arithmetic overflow")
                })
                .sum()
        })
        .collect()
}

fn mat_mul(a: &[Vec<Int>], b: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn mat_identity(n: usize) -> Vec<Vec<Int>> {
    (0..n)
        .map(|i| (0..n).map(|j| Int::from(i == j)).collect())
        .collect()
}

/// Integer inverse of a unimodular matrix, by adjugate (n ≤ 3 suffices for the
/// examples, but the cofactor expansion below works for any n).
fn mat_inverse_unimodular(a: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let n = a.len();
    let d = super::det(a);
    assert!(d.abs() == 1, "matrix is not unimodular");
    let mut inv = vec![vec![0 as Int; n]; n];
    for i in 0..n {
        for j in 0..n {
            // cofactor C_ji
            let minor: Vec<Vec<Int>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| a[r][c])
                        .collect()
                })
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            let m = if n == 1 { 1 } else { super::det(&minor) };
            inv[i][j] = Int::try_from(sign as i128 * m * d).expect("inverse overflow");
        }
    }
    inv
}

/// A^k for k ∈ ℤ.
fn mat_pow(a: &[Vec<Int>], k: Int) -> Vec<Vec<Int>> {
    let n = a.len();
    let base = if k >= 0 {
        a.to_vec()
    } else {
        mat_inverse_unimodular(a)
    };
    let mut out = mat_identity(n);
    for _ in 0..k.abs() {
        out = mat_mul(&out, &base);
    }
    out
}

/// Image A·Λ of a fiber lattice under the column action.
fn apply_to_lattice(a: &[Vec<Int>], l: &Lattice) -> Lattice {
    let gens: Vec<Vec<Int>> = l.basis().iter().map(|v| apply_col(a, v)).collect();
    Lattice::from_generators(l.ambient_dim(), &gens)
}

/// Build the split subgroup ⟨(m,w)⟩·Λ, validating AᵐΛ = Λ; `w` is reduced
/// modulo Λ. `m = 0` forces `w = 0`.
pub fn mt_subgroup(
    g: &FgGroup,
    m: Int,
    w: &[Int],
    fiber_generators: &[Vec<Int>],
) -> Result<Subgroup, GroupError> {
    let (n, a) = monodromy(g)?;
    if m < 0 {
        return Err(GroupError::InvalidSplitData("shift exponent must be >= 0".into()));
    }
    if w.len() != n {
        return Err(GroupError::DimensionMismatch {
            expected: n,
            got: w.len(),
        });
    }
    for v in fiber_generators {
        if v.len() != n {
            return Err(GroupError::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    let fiber = Lattice::from_generators(n, fiber_generators);
    let am = mat_pow(a, m);
    if apply_to_lattice(&am, &fiber) != fiber {
        return Err(GroupError::InvalidSplitData(format!(
            "A^{m} does not preserve the fiber lattice {:?}",
            fiber.basis()
        )));
    }
    let w = if m == 0 {
        if w.iter().any(|&x| x != 0) {
            return Err(GroupError::InvalidSplitData(
                "m = 0 requires a zero shift vector".into(),
            ));
        }
        vec![0; n]
    } else {
        fiber.reduce_vector(w)
    };
    Ok(Subgroup {
        ambient: g.clone(),
        repr: SubgroupRepr::MappingTorus { m, w, fiber },
    })
}

fn split_parts(h: &Subgroup) -> Result<(usize, &Vec<Vec<Int>>, Int, &Vec<Int>, &Lattice), GroupError> {
    let (n, a) = monodromy(&h.ambient)?;
    match &h.repr {
        SubgroupRepr::MappingTorus { m, w, fiber } => Ok((n, a, *m, w, fiber)),
        _ => Err(GroupError::InvalidSplitData(
            "subgroup is not in mapping-torus form".into(),
        )),
    }
}

/// Membership of (k, v) in the split subgroup.
pub fn mt_member(h: &Subgroup, k: Int, v: &[Int]) -> Result<bool, GroupError> {
    let (n, a, m, w, fiber) = split_parts(h)?;
    if v.len() != n {
        return Err(GroupError::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    if m == 0 {
        return Ok(k == 0 && fiber.contains_vector(v));
    }
    if k % m != 0 {
        return Ok(false);
    }
    // (m,w)^j = (jm, s_j(w)), with s_j = (A^{(j-1)m} + ... + I) w for j >= 0
    // and s_{-j} = -A^{-jm} s_j(w).
    let j = k / m;
    let s = shift_sum(a, m, j, w);
    let diff: Vec<Int> = v.iter().zip(&s).map(|(x, y)| x - y).collect();
    Ok(fiber.contains_vector(&diff))
}

fn shift_sum(a: &[Vec<Int>], m: Int, j: Int, w: &[Int]) -> Vec<Int> {
    let n = a.len();
    let am = mat_pow(a, m);
    let mut s = vec![0 as Int; n];
    if j >= 0 {
        let mut p = mat_identity(n);
        for _ in 0..j {
            let pw = apply_col(&p, w);
            for i in 0..n {
                s[i] += pw[i];
            }
            p = mat_mul(&p, &am);
        }
    } else {
        let sj = shift_sum(a, m, -j, w);
        let neg = mat_pow(a, m * j); // A^{jm} with j < 0
        let t = apply_col(&neg, &sj);
        for i in 0..n {
            s[i] = -t[i];
        }
    }
    s
}

/// Normality of the split subgroup in its ambient mapping torus: the fiber
/// lattice must be A-invariant, and for m ≥ 1 additionally
/// (Aᵐ − I)ℤⁿ ⊆ Λ and (A − I)w ∈ Λ.
pub fn mt_is_normal(h: &Subgroup) -> Result<bool, GroupError> {
    let (n, a, m, w, fiber) = split_parts(h)?;
    if apply_to_lattice(a, fiber) != *fiber {
        return Ok(false);
    }
    if m == 0 {
        return Ok(true);
    }
    let am = mat_pow(a, m);
    for j in 0..n {
        let e: Vec<Int> = (0..n).map(|i| Int::from(i == j)).collect();
        let mut col = apply_col(&am, &e);
        col[j] -= 1;
        if !fiber.contains_vector(&col) {
            return Ok(false);
        }
    }
    let mut aw = apply_col(a, w);
    for i in 0..n {
        aw[i] -= w[i];
    }
    Ok(fiber.contains_vector(&aw))
}

/// Normality verdict together with the names of the failed predicates, for
/// report-style consumers.
pub fn normality_report(h: &Subgroup) -> Result<(bool, Vec<String>), GroupError> {
    let (n, a, m, w, fiber) = split_parts(h)?;
    let mut failed = Vec::new();
    if apply_to_lattice(a, fiber) != *fiber {
        failed.push("A does not preserve the fiber lattice".to_string());
    }
    if m > 0 {
        let am = mat_pow(a, m);
        let mut image_ok = true;
        for j in 0..n {
            let e: Vec<Int> = (0..n).map(|i| Int::from(i == j)).collect();
            let mut col = apply_col(&am, &e);
            col[j] -= 1;
            if !fiber.contains_vector(&col) {
                image_ok = false;
            }
        }
        if !image_ok {
            failed.push(format!("(A^{m} - I)Z^{n} is not contained in the fiber lattice"));
        }
        let mut aw = apply_col(a, w);
        for i in 0..n {
            aw[i] -= w[i];
        }
        if !fiber.contains_vector(&aw) {
            failed.push("(A - I)w is not contained in the fiber lattice".to_string());
        }
    }
    Ok((failed.is_empty(), failed))
}

/// The fiber part H ∩ ({0} × ℤⁿ) as a subgroup of ℤⁿ.
pub fn mt_fiber(h: &Subgroup) -> Result<Subgroup, GroupError> {
    let (n, _, _, _, fiber) = split_parts(h)?;
    Ok(Subgroup {
        ambient: FgGroup::free(n),
        repr: SubgroupRepr::Abelian(fiber.clone()),
    })
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Brute-force conjugation oracle used by tests to cross-check
    //! `mt_is_normal` independently of the closed-form predicates.

    use super::*;

    /// Conjugate (k,v) by (l,u): returns (k, A^{-l}((A^k - I)u + ...)) computed
    /// directly from the group law.
    fn conjugate(a: &[Vec<Int>], l: Int, u: &[Int], k: Int, v: &[Int]) -> (Int, Vec<Int>) {
        // (l,u)·(k,v)·(l,u)^{-1}; inverse of (l,u) is (-l, -A^{-l}u)
        let n = a.len();
        // p = (l,u)·(k,v) = (l+k, A^k u + v)
        let ak = mat_pow(a, k);
        let mut p = apply_col(&ak, u);
        for i in 0..n {
            p[i] += v[i];
        }
        // q = p · (-l, -A^{-l}u) = (k, A^{-l} p - A^{-l} u)
        let ail = mat_pow(a, -l);
        let mut q = apply_col(&ail, &p);
        let au = apply_col(&ail, u);
        for i in 0..n {
            q[i] -= au[i];
        }
        (k, q)
    }

    /// Check normality by conjugating the subgroup generators by a set of
    /// ambient generators (and their inverses) and testing membership.
    pub fn is_normal_brute(h: &Subgroup) -> bool {
        let (n, a, m, w, fiber) = split_parts(h).unwrap();
        let mut sub_gens: Vec<(Int, Vec<Int>)> = fiber
            .basis()
            .iter()
            .map(|v| (0, v.clone()))
            .collect();
        if m > 0 {
            sub_gens.push((m, w.clone()));
        }
        let mut amb_gens: Vec<(Int, Vec<Int>)> = vec![(1, vec![0; n]), (-1, vec![0; n])];
        for j in 0..n {
            let e: Vec<Int> = (0..n).map(|i| Int::from(i == j)).collect();
            let ne: Vec<Int> = e.iter().map(|x| -x).collect();
            amb_gens.push((0, e));
            amb_gens.push((0, ne));
        }
        for (l, u) in &amb_gens {
            for (k, v) in &sub_gens {
                let (ck, cv) = conjugate(a, *l, u, *k, v);
                if !mt_member(h, ck, &cv).unwrap() {
                    return false;
                }
            }
        }
        true
    }
}
