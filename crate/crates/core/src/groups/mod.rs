//! Finitely generated abelian groups, restricted mapping-torus groups, and
//! their subgroups in canonical form.
//!
//! Subgroups of an abelian group `ℤʳ ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/dₛ` are represented as
//! integer lattices between the relation lattice `diag(0,…,0,d₁,…,dₛ)` and
//! `ℤ^{r+s}`, stored in Hermite normal form. Equality of subgroups is
//! equality of the stored matrices.
//!
//! Mapping-torus groups `ℤ ⋉_A ℤⁿ` (|det A| = 1) use the multiplication
//! convention `(k,v)·(k′,v′) = (k+k′, A^{k′}v + v′)`, with `A` acting on
//! column vectors. Their subgroups are restricted to the split family
//! generated by `(m,w)` and a fiber lattice `Λ` with `AᵐΛ = Λ`; enumeration
//! of mapping-torus subgroups is deliberately not provided — only membership,
//! normality and fiber extraction.

pub mod lattice;
pub mod mt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lattice::{Int, Lattice};
pub use mt::{mt_fiber, mt_is_normal, mt_member, mt_subgroup};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("generator has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subgroups have different ambient groups")]
    AmbientMismatch,
    #[error("operation requires an abelian ambient group; mapping-torus subgroups are built via mt_subgroup")]
    MappingTorusUnsupported,
    #[error("invalid mapping-torus split data: {0}")]
    InvalidSplitData(String),
    #[error("torsion orders must form a divisor chain of integers >= 2, got {0:?}")]
    InvalidTorsion(Vec<Int>),
    #[error("mapping-torus monodromy must be square with determinant +-1")]
    InvalidMonodromy,
    #[error("homomorphism is incompatible with source torsion: relation {0:?} does not map into the target relations")]
    TorsionIncompatible(Vec<Int>),
    #[error("subgroup lattice must contain the relation lattice")]
    MissingRelations,
    #[error("{0}")]
    Invalid(String),
}

/// A finitely generated group of one of the two shapes used by the
/// classification: abelian, or a restricted polycyclic mapping torus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FgGroup {
    Abelian {
        rank: usize,
        #[serde(default)]
        torsion: Vec<Int>,
    },
    MappingTorus {
        n: usize,
        #[serde(rename = "A")]
        monodromy: Vec<Vec<Int>>,
    },
}

impl FgGroup {
    pub fn abelian(rank: usize, torsion: &[Int]) -> Result<Self, GroupError> {
        let g = FgGroup::Abelian {
            rank,
            torsion: torsion.to_vec(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn free(rank: usize) -> Self {
        FgGroup::Abelian {
            rank,
            torsion: vec![],
        }
    }

    pub fn trivial() -> Self {
        FgGroup::free(0)
    }

    pub fn mapping_torus(monodromy: Vec<Vec<Int>>) -> Result<Self, GroupError> {
        let n = monodromy.len();
        let g = FgGroup::MappingTorus { n, monodromy };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        match self {
            FgGroup::Abelian { torsion, .. } => {
                for w in torsion.windows(2) {
                    if w[1] % w[0] != 0 {
                        return Err(GroupError::InvalidTorsion(torsion.clone()));
                    }
                }
                if torsion.iter().any(|&d| d < 2) {
                    return Err(GroupError::InvalidTorsion(torsion.clone()));
                }
                Ok(())
            }
            FgGroup::MappingTorus { n, monodromy } => {
                if monodromy.len() != *n || monodromy.iter().any(|r| r.len() != *n) {
                    return Err(GroupError::InvalidMonodromy);
                }
                if det(monodromy).abs() != 1 {
                    return Err(GroupError::InvalidMonodromy);
                }
                Ok(())
            }
        }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self, FgGroup::Abelian { .. })
    }

    /// Number of generators of the standard presentation (abelian only).
    pub fn num_generators(&self) -> usize {
        match self {
            FgGroup::Abelian { rank, torsion } => rank + torsion.len(),
            FgGroup::MappingTorus { n, .. } => n + 1,
        }
    }

    /// Presentation of an abelian group as ℤⁿ modulo a relation lattice.
    pub fn presentation(&self) -> Result<Presentation, GroupError> {
        match self {
            FgGroup::Abelian { rank, torsion } => {
                let n = rank + torsion.len();
                let mut diag = vec![0 as Int; n];
                for (i, &d) in torsion.iter().enumerate() {
                    diag[rank + i] = d;
                }
                Ok(Presentation {
                    n,
                    relations: Lattice::diagonal(n, &diag),
                })
            }
            FgGroup::MappingTorus { .. } => Err(GroupError::MappingTorusUnsupported),
        }
    }
}

fn det(m: &[Vec<Int>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    // fraction-free elimination
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a.last().map(|r| r[n - 1]).unwrap_or(1)
}

/// An abelian group presented as ℤⁿ modulo a relation lattice. Used both for
/// the standard presentation of [`FgGroup::Abelian`] and for subgroups viewed
/// as groups in their own basis (half-edge kernels).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub n: usize,
    pub relations: Lattice,
}

impl Presentation {
    /// Canonical subgroup lattice spanned by `gens` together with the
    /// relations.
    pub fn span(&self, gens: &[Vec<Int>]) -> Result<Lattice, GroupError> {
        for g in gens {
            if g.len() != self.n {
                return Err(GroupError::DimensionMismatch {
                    expected: self.n,
                    got: g.len(),
                });
            }
        }
        let mut rows = gens.to_vec();
        rows.extend(self.relations.basis().iter().cloned());
        Ok(Lattice::from_generators(self.n, &rows))
    }

    /// All subgroup lattices of index ≤ `bound`, plus the trivial subgroup
    /// when `include_trivial`. Deterministic order: finite indices first
    /// (by lattice canonical form), trivial last when appended.
    pub fn enumerate_subgroups(&self, bound: u64, include_trivial: bool) -> Vec<Lattice> {
        let mut out: Vec<Lattice> = Lattice::enumerate_full_rank(self.n, bound)
            .into_iter()
            .filter(|l| self.relations.is_sublattice_of(l))
            .collect();
        out.sort_by_key(|l| (l.index_in_ambient(), l.basis().to_vec()));
        if include_trivial && !out.contains(&self.relations) {
            out.push(self.relations.clone());
        }
        out
    }

    /// The trivial subgroup (the relation lattice itself).
    pub fn trivial_subgroup(&self) -> Lattice {
        self.relations.clone()
    }

    pub fn full_subgroup(&self) -> Lattice {
        Lattice::full(self.n)
    }

    /// Index of a subgroup lattice in this group.
    pub fn subgroup_index(&self, l: &Lattice) -> Option<u64> {
        l.index_in_ambient()
    }
}

/// A subgroup in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub ambient: FgGroup,
    pub repr: SubgroupRepr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupRepr {
    /// Lattice between the relation lattice and ℤ^{r+s}.
    Abelian(Lattice),
    /// Split mapping-torus subgroup ⟨(m,w)⟩·Λ with AᵐΛ = Λ; `w` reduced
    /// modulo Λ, and `w = 0` when `m = 0`.
    MappingTorus {
        m: Int,
        w: Vec<Int>,
        fiber: Lattice,
    },
}

impl Subgroup {
    pub fn lattice(&self) -> &Lattice {
        match &self.repr {
            SubgroupRepr::Abelian(l) => l,
            SubgroupRepr::MappingTorus { fiber, .. } => fiber,
        }
    }
}

/// Canonicalize a generating set into a subgroup of an abelian ambient group.
pub fn canonicalize(ambient: &FgGroup, generators: &[Vec<Int>]) -> Result<Subgroup, GroupError> {
    let pres = ambient.presentation()?;
    let lattice = pres.span(generators)?;
    Ok(Subgroup {
        ambient: ambient.clone(),
        repr: SubgroupRepr::Abelian(lattice),
    })
}

/// Construct a subgroup directly from an HNF matrix, validating that it
/// contains the relations and is already canonical.
pub fn subgroup_from_hnf(ambient: &FgGroup, rows: &[Vec<Int>]) -> Result<Subgroup, GroupError> {
    let pres = ambient.presentation()?;
    let lattice = pres.span(rows)?;
    if lattice.basis() != rows {
        return Err(GroupError::Invalid(format!(
            "matrix {:?} is not in canonical HNF (expected {:?})",
            rows,
            lattice.basis()
        )));
    }
    Ok(Subgroup {
        ambient: ambient.clone(),
        repr: SubgroupRepr::Abelian(lattice),
    })
}

/// Index of a subgroup in its ambient group; `None` encodes ∞.
pub fn index(h: &Subgroup) -> Option<u64> {
    match &h.repr {
        SubgroupRepr::Abelian(l) => l.index_in_ambient(),
        SubgroupRepr::MappingTorus { m, fiber, .. } => {
            if *m == 0 {
                None
            } else {
                fiber.index_in_ambient().map(|i| (*m as u64) * i)
            }
        }
    }
}

/// Outcome of comparing two subgroups of the same ambient group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgroupOrder {
    Equal,
    Lt,
    Gt,
    Incomparable,
}

pub fn compare(h1: &Subgroup, h2: &Subgroup) -> Result<SubgroupOrder, GroupError> {
    if h1.ambient != h2.ambient {
        return Err(GroupError::AmbientMismatch);
    }
    let (l1, l2) = match (&h1.repr, &h2.repr) {
        (SubgroupRepr::Abelian(a), SubgroupRepr::Abelian(b)) => (a, b),
        _ => return Err(GroupError::MappingTorusUnsupported),
    };
    let le = l1.is_sublattice_of(l2);
    let ge = l2.is_sublattice_of(l1);
    Ok(match (le, ge) {
        (true, true) => SubgroupOrder::Equal,
        (true, false) => SubgroupOrder::Lt,
        (false, true) => SubgroupOrder::Gt,
        (false, false) => SubgroupOrder::Incomparable,
    })
}

pub fn intersect(h1: &Subgroup, h2: &Subgroup) -> Result<Subgroup, GroupError> {
    if h1.ambient != h2.ambient {
        return Err(GroupError::AmbientMismatch);
    }
    let (l1, l2) = match (&h1.repr, &h2.repr) {
        (SubgroupRepr::Abelian(a), SubgroupRepr::Abelian(b)) => (a, b),
        _ => return Err(GroupError::MappingTorusUnsupported),
    };
    Ok(Subgroup {
        ambient: h1.ambient.clone(),
        repr: SubgroupRepr::Abelian(l1.intersect(l2)),
    })
}

/// A homomorphism between abelian groups, rows = images of source generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homomorphism {
    pub source: FgGroup,
    pub target: FgGroup,
    pub matrix: Vec<Vec<Int>>,
}

impl Homomorphism {
    pub fn new(
        source: FgGroup,
        target: FgGroup,
        matrix: Vec<Vec<Int>>,
    ) -> Result<Self, GroupError> {
        let h = Homomorphism {
            source,
            target,
            matrix,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn identity(group: &FgGroup) -> Result<Self, GroupError> {
        let n = group.presentation()?.n;
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| Int::from(i == j)).collect())
            .collect();
        Homomorphism::new(group.clone(), group.clone(), matrix)
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        let sp = self.source.presentation()?;
        let tp = self.target.presentation()?;
        if self.matrix.len() != sp.n {
            return Err(GroupError::DimensionMismatch {
                expected: sp.n,
                got: self.matrix.len(),
            });
        }
        for row in &self.matrix {
            if row.len() != tp.n {
                return Err(GroupError::DimensionMismatch {
                    expected: tp.n,
                    got: row.len(),
                });
            }
        }
        // torsion compatibility: source relations map into target relations
        for rel in sp.relations.basis() {
            let img = apply_matrix(rel, &self.matrix, tp.n);
            if !tp.relations.contains_vector(&img) {
                return Err(GroupError::TorsionIncompatible(rel.clone()));
            }
        }
        Ok(())
    }

    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        let tn = self.matrix.first().map(|r| r.len()).unwrap_or(0);
        apply_matrix(v, &self.matrix, tn)
    }
}

pub fn apply_matrix(v: &[Int], matrix: &[Vec<Int>], target_dim: usize) -> Vec<Int> {
    assert_eq!(v.len(), matrix.len());
    let mut out = vec![0 as Int; target_dim];
    for (i, &vi) in v.iter().enumerate() {
        if vi != 0 {
            for c in 0..target_dim {
                out[c] += vi
                    .checked_mul(matrix[i][c])
                    .expect("homomorphism arithmetic overflow");
            }
        }
    }
    out
}

/// Exact preimage `{x : f(x) ∈ h}` as a subgroup of the source.
pub fn preimage(f: &Homomorphism, h: &Subgroup) -> Result<Subgroup, GroupError> {
    if h.ambient != f.target {
        return Err(GroupError::AmbientMismatch);
    }
    let sp = f.source.presentation()?;
    let target_lattice = match &h.repr {
        SubgroupRepr::Abelian(l) => l,
        _ => return Err(GroupError::MappingTorusUnsupported),
    };
    let tp = f.target.presentation()?;
    let pre = Lattice::preimage(&f.matrix, tp.n, target_lattice);
    // include the source relations
    let mut gens = pre.basis().to_vec();
    gens.extend(sp.relations.basis().iter().cloned());
    Ok(Subgroup {
        ambient: f.source.clone(),
        repr: SubgroupRepr::Abelian(Lattice::from_generators(sp.n, &gens)),
    })
}

/// Pushforward `f(h)` as a subgroup of the target (includes target relations).
pub fn image(f: &Homomorphism, h: &Subgroup) -> Result<Subgroup, GroupError> {
    if h.ambient != f.source {
        return Err(GroupError::AmbientMismatch);
    }
    let tp = f.target.presentation()?;
    let lattice = match &h.repr {
        SubgroupRepr::Abelian(l) => l,
        _ => return Err(GroupError::MappingTorusUnsupported),
    };
    let img = lattice.image(&f.matrix, tp.n);
    let mut gens = img.basis().to_vec();
    gens.extend(tp.relations.basis().iter().cloned());
    Ok(Subgroup {
        ambient: f.target.clone(),
        repr: SubgroupRepr::Abelian(Lattice::from_generators(tp.n, &gens)),
    })
}

/// All subgroups of an abelian group with index ≤ `bound`, plus the trivial
/// subgroup when flagged. Deterministic order.
pub fn enumerate_subgroups(
    g: &FgGroup,
    bound: u64,
    include_trivial: bool,
) -> Result<Vec<Subgroup>, GroupError> {
    let pres = g.presentation()?;
    Ok(pres
        .enumerate_subgroups(bound, include_trivial)
        .into_iter()
        .map(|lattice| Subgroup {
            ambient: g.clone(),
            repr: SubgroupRepr::Abelian(lattice),
        })
        .collect())
}
