//! Sign meshes: an antipodally symmetric subdivided octahedron for the
//! sphere, and a triangulated grid for a plane box.
//!
//! Sphere vertices keep unnormalized integer coordinates (midpoint = sum):
//! radial projection is a homeomorphism onto S² and sign evaluation of a
//! homogeneous polynomial is scale-invariant, so the combinatorics are exact
//! and the antipodal map is literal negation.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::poly::Poly;

#[derive(Debug, Clone)]
pub struct Mesh {
    /// Vertex positions as exact rational coordinates (dimension 3 for the
    /// sphere, 2 for the plane).
    pub vertices: Vec<Vec<BigRational>>,
    pub triangles: Vec<[usize; 3]>,
    /// Triangle adjacency across shared edges.
    pub neighbors: Vec<Vec<usize>>,
    /// Antipodal vertex involution (sphere meshes only).
    pub antipodal_vertex: Option<Vec<usize>>,
    /// Antipodal triangle involution (sphere meshes only).
    pub antipodal_triangle: Option<Vec<usize>>,
}

fn big(i: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(i))
}

/// Subdivided octahedron with midpoints normalized onto the unit sphere in
/// f64; `depth` quadrisections.
///
/// The f64 coordinates are themselves exact rationals, so sign evaluation
/// stays exact, and negation is bit-exact, so the antipodal involution is a
/// literal index map. Normalizing keeps the mesh quasi-uniform: unnormalized
/// integer midpoints subdivide arcs at mediants, which shrinks the cells
/// next to low-height directions (the axis points and original edge
/// midpoints) only linearly with depth and can merge curve components that
/// pass near them.
pub fn sphere_mesh(depth: usize) -> Mesh {
    // -0.0 and +0.0 must share a key so that negation is an involution
    let canon = |x: f64| if x == 0.0 { 0.0 } else { x };
    let key = |v: [f64; 3]| -> [u64; 3] {
        [
            canon(v[0]).to_bits(),
            canon(v[1]).to_bits(),
            canon(v[2]).to_bits(),
        ]
    };
    let mut coords: Vec<[f64; 3]> = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut index: HashMap<[u64; 3], usize> = coords
        .iter()
        .enumerate()
        .map(|(i, &c)| (key(c), i))
        .collect();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for &sx in &[0usize, 1] {
        for &sy in &[2usize, 3] {
            for &sz in &[4usize, 5] {
                triangles.push([sx, sy, sz]);
            }
        }
    }
    for _ in 0..depth {
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for &[a, b, c] in &triangles {
            let mid = |i: usize, j: usize,
                       coords: &mut Vec<[f64; 3]>,
                       index: &mut HashMap<[u64; 3], usize>|
             -> usize {
                let s = [
                    coords[i][0] + coords[j][0],
                    coords[i][1] + coords[j][1],
                    coords[i][2] + coords[j][2],
                ];
                let n = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
                let m = [canon(s[0] / n), canon(s[1] / n), canon(s[2] / n)];
                *index.entry(key(m)).or_insert_with(|| {
                    coords.push(m);
                    coords.len() - 1
                })
            };
            let ab = mid(a, b, &mut coords, &mut index);
            let bc = mid(b, c, &mut coords, &mut index);
            let ca = mid(c, a, &mut coords, &mut index);
            next.push([a, ab, ca]);
            next.push([ab, b, bc]);
            next.push([ca, bc, c]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }
    let antipodal_vertex: Vec<usize> = coords
        .iter()
        .map(|&[x, y, z]| index[&key([-x, -y, -z])])
        .collect();
    let tri_key = |t: &[usize; 3]| -> [usize; 3] {
        let mut k = *t;
        k.sort_unstable();
        k
    };
    let tri_index: HashMap<[usize; 3], usize> = triangles
        .iter()
        .enumerate()
        .map(|(i, t)| (tri_key(t), i))
        .collect();
    let antipodal_triangle: Vec<usize> = triangles
        .iter()
        .map(|t| {
            let mapped = [
                antipodal_vertex[t[0]],
                antipodal_vertex[t[1]],
                antipodal_vertex[t[2]],
            ];
            tri_index[&tri_key(&mapped)]
        })
        .collect();
    let neighbors = adjacency(&triangles);
    Mesh {
        vertices: coords
            .iter()
            .map(|&[x, y, z]| {
                vec![
                    BigRational::from_float(x).expect("finite coordinate"),
                    BigRational::from_float(y).expect("finite coordinate"),
                    BigRational::from_float(z).expect("finite coordinate"),
                ]
            })
            .collect(),
        triangles,
        neighbors,
        antipodal_vertex: Some(antipodal_vertex),
        antipodal_triangle: Some(antipodal_triangle),
    }
}

/// Triangulated n×n grid over the box [-r, r]², exact rational coordinates.
pub fn plane_mesh(cells: usize, half_width: i64) -> Mesh {
    let n = cells + 1;
    let coord = |i: usize| -> BigRational {
        // -r + 2r * i / cells
        big(-half_width) + big(2 * half_width) * BigRational::new(BigInt::from(i), BigInt::from(cells))
    };
    let mut vertices = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            vertices.push(vec![coord(i), coord(j)]);
        }
    }
    let at = |i: usize, j: usize| j * n + i;
    let mut triangles = Vec::with_capacity(cells * cells * 2);
    for j in 0..cells {
        for i in 0..cells {
            triangles.push([at(i, j), at(i + 1, j), at(i, j + 1)]);
            triangles.push([at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    let neighbors = adjacency(&triangles);
    Mesh {
        vertices,
        triangles,
        neighbors,
        antipodal_vertex: None,
        antipodal_triangle: None,
    }
}

fn adjacency(triangles: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let mut edge_map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            edge_map.entry(key).or_default().push(t);
        }
    }
    let mut neighbors = vec![Vec::new(); triangles.len()];
    for tris in edge_map.values() {
        for &a in tris {
            for &b in tris {
                if a != b {
                    neighbors[a].push(b);
                }
            }
        }
    }
    neighbors
}

/// Exact sign of `f` at every mesh vertex, with deterministic symbolic
/// perturbation at exact zeros: ties are broken by a fixed chain of
/// polynomials G_k (powers of independent linear forms, so at least one is
/// nonzero at any nonzero point, and parity matches `f` on the sphere).
/// Returns the signs and the indices of perturbed vertices.
///
/// Homogeneous mode clears each vertex to an integer vector over a common
/// denominator and evaluates in pure BigInt arithmetic: the sign is scale
/// invariant and integer evaluation avoids per-operation rational
/// normalization on the wide f64-derived denominators.
pub fn vertex_signs(f: &Poly, mesh: &Mesh, homogeneous_degree: Option<u32>) -> (Vec<i8>, Vec<usize>) {
    let nvars = f.nvars();
    let forms: Vec<Vec<i64>> = if nvars == 3 {
        vec![vec![1, 2, 5], vec![2, -1, 3], vec![1, 0, 0]]
    } else {
        vec![vec![1, 2], vec![2, -1], vec![1, 0]]
    };
    let tiebreakers: Vec<Poly> = forms
        .iter()
        .map(|form| {
            let mut l = Poly::zero(nvars);
            for (i, &c) in form.iter().enumerate() {
                l = l.add(&Poly::var(nvars, i).scale(&big(c)));
            }
            match homogeneous_degree {
                Some(d) => l.pow(d),
                // affine mode: affine forms already suffice, append 1 as the
                // final always-nonzero fallback
                None => l,
            }
        })
        .collect();
    let chain: Vec<IntPoly> = std::iter::once(f)
        .chain(tiebreakers.iter())
        .map(IntPoly::from_poly)
        .collect();
    let mut signs = Vec::with_capacity(mesh.vertices.len());
    let mut perturbed = Vec::new();
    for (vi, v) in mesh.vertices.iter().enumerate() {
        let (point, point_f64): (Vec<BigInt>, Vec<f64>) = if homogeneous_degree.is_some() {
            let p = clear_to_integers(v);
            let pf = p.iter().map(bigint_to_f64).collect();
            (p, pf)
        } else {
            (Vec::new(), Vec::new())
        };
        let eval_sign = |p: &IntPoly| -> i8 {
            if homogeneous_degree.is_some() {
                p.sign_at(&point, &point_f64)
            } else {
                rat_sign(&p.poly.eval(v))
            }
        };
        let mut s = eval_sign(&chain[0]);
        if s == 0 {
            perturbed.push(vi);
            for g in &chain[1..] {
                s = eval_sign(g);
                if s != 0 {
                    break;
                }
            }
            if s == 0 {
                // affine fallback: constant positive perturbation
                s = 1;
            }
        }
        signs.push(s);
    }
    (signs, perturbed)
}

/// A polynomial with cleared integer coefficients, for sign evaluation at
/// integer points. Uses a floating-point filter: the f64 value decides the
/// sign when it clears a conservative rounding bound, and only near-zero
/// evaluations fall back to exact BigInt arithmetic.
struct IntPoly {
    poly: Poly,
    terms: Vec<(BigInt, Vec<u32>)>,
    terms_f64: Vec<(f64, Vec<u32>)>,
}

impl IntPoly {
    fn from_poly(f: &Poly) -> Self {
        let mut denom_lcm = BigInt::from(1);
        for (_, c) in f.terms() {
            denom_lcm = num_integer::lcm(denom_lcm, c.denom().clone());
        }
        let terms: Vec<(BigInt, Vec<u32>)> = f
            .terms()
            .map(|(e, c)| (c.numer() * (&denom_lcm / c.denom()), e.clone()))
            .collect();
        let terms_f64 = terms
            .iter()
            .map(|(c, e)| (bigint_to_f64(c), e.clone()))
            .collect();
        IntPoly {
            poly: f.clone(),
            terms,
            terms_f64,
        }
    }

    fn sign_at(&self, point: &[BigInt], point_f64: &[f64]) -> i8 {
        let mut acc = 0.0f64;
        let mut magnitude = 0.0f64;
        for (coef, exps) in &self.terms_f64 {
            let mut t = *coef;
            for (i, &k) in exps.iter().enumerate() {
                t *= point_f64[i].powi(k as i32);
            }
            acc += t;
            magnitude += t.abs();
        }
        // each term carries a handful of rounding steps at 2^-52 relative;
        // 1e-12 over-covers that by two orders of magnitude
        if acc.abs() > magnitude * 1e-12 {
            return if acc > 0.0 { 1 } else { -1 };
        }
        let mut exact = BigInt::from(0);
        for (coef, exps) in &self.terms {
            let mut t = coef.clone();
            for (i, &k) in exps.iter().enumerate() {
                for _ in 0..k {
                    t *= &point[i];
                }
            }
            exact += t;
        }
        match exact.sign() {
            num_bigint::Sign::Plus => 1,
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
        }
    }
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Scale a rational vector to integers over the least common denominator.
fn clear_to_integers(v: &[BigRational]) -> Vec<BigInt> {
    let mut denom_lcm = BigInt::from(1);
    for x in v {
        denom_lcm = num_integer::lcm(denom_lcm, x.denom().clone());
    }
    v.iter()
        .map(|x| x.numer() * (&denom_lcm / x.denom()))
        .collect()
}

fn rat_sign(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Disjoint-set union on `n` items.
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
