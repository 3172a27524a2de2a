//! Independent reference computations for the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use witworld::hermitian::{hermitian_to_vector, CMatrix, HermitianMatrix};
use witworld::steering::{Assemblage, Scenario};
use witworld::GptVector;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ginibre<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    ginibre(d, rng).qr().q()
}

/// `A A† / tr(A A†)`.
pub fn random_density<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    let a = ginibre(d, rng);
    let m = &a * a.adjoint();
    let t = m.trace().re;
    m.unscale(t)
}

pub fn ket_projector(psi: &[Complex64]) -> CMatrix {
    let v = nalgebra::DVector::from_column_slice(psi);
    &v * v.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn min_eig(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()).unscale(2.0);
    h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Transpose of one qubit-sized or larger factor of a bipartite operator
/// on `C^{d1} ⊗ C^{d2}`.
pub fn partial_transpose_first(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1 * d2, d1 * d2, |r, col| {
        let (i, k) = (r / d2, r % d2);
        let (j, l) = (col / d2, col % d2);
        m[(j * d2 + k, i * d2 + l)]
    })
}

/// Traces out the first `d1`-dimensional factor.
pub fn partial_trace_first(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d2, d2, |k, l| (0..d1).map(|i| m[(i * d2 + k, i * d2 + l)]).sum())
}

pub fn op_vector(m: &CMatrix) -> GptVector {
    hermitian_to_vector(&HermitianMatrix::new((m + m.adjoint()).unscale(2.0)).expect("hermitian"))
}

/// Trace norm distance `½‖A − B‖₁` of Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a - b;
    let h = (&d + d.adjoint()).unscale(2.0);
    0.5 * h.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
}

/// Facet normals of the cone over `vertices`, by trying every hyperplane
/// through `D − 1` linearly independent vertices. Normals are scaled to
/// unit Euclidean length.
pub fn brute_force_facets(vertices: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = vertices[0].len();
    if d == 1 {
        return vec![vec![1.0]];
    }
    let m = vertices.len();
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..d - 1).collect();
    loop {
        let sub = DMatrix::from_fn(d - 1, d, |r, col| vertices[idx[r]][col]);
        // null vector of the (D−1)×D system through its square Gram matrix
        let gram = sub.transpose() * &sub;
        let eig = gram.symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        if eig.eigenvalues[order[1]] > 1e-9 {
            let h: DVector<f64> = eig.eigenvectors.column(order[0]).into_owned();
            let vals: Vec<f64> = vertices.iter().map(|v| DVector::from_column_slice(v).dot(&h)).collect();
            let pos = vals.iter().any(|&x| x > 1e-9);
            let neg = vals.iter().any(|&x| x < -1e-9);
            if pos != neg {
                let sign = if pos { 1.0 } else { -1.0 };
                let n: Vec<f64> = h.iter().map(|x| x * sign).collect();
                if !found.iter().any(|f| f.iter().zip(&n).all(|(a, b)| (a - b).abs() < 1e-7)) {
                    found.push(n);
                }
            }
        }
        // next combination
        let mut i = d - 1;
        loop {
            if i == 0 {
                return found;
            }
            i -= 1;
            if idx[i] < m - (d - 1) + i {
                idx[i] += 1;
                for j in i + 1..d - 1 {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn unit_length(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// Same set of directions up to positive scaling.
pub fn same_rays(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    let a: Vec<Vec<f64>> = a.iter().map(|v| unit_length(v)).collect();
    let b: Vec<Vec<f64>> = b.iter().map(|v| unit_length(v)).collect();
    let covers = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter().all(|u| y.iter().any(|w| u.iter().zip(w).all(|(p, q)| (p - q).abs() < 1e-7)))
    };
    a.len() == b.len() && covers(&a, &b) && covers(&b, &a)
}

/// A binary two-party box `p[a][b][x][y]`.
pub type Box2 = [[[[f64; 2]; 2]; 2]; 2];

pub fn correlator(p: &Box2, x: usize, y: usize) -> f64 {
    let mut e = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            e += if a == b { 1.0 } else { -1.0 } * p[a][b][x][y];
        }
    }
    e
}

/// Largest of the eight CHSH expressions.
pub fn max_chsh(p: &Box2) -> f64 {
    let e = [correlator(p, 0, 0), correlator(p, 0, 1), correlator(p, 1, 0), correlator(p, 1, 1)];
    let mut best = f64::NEG_INFINITY;
    for signs in 0..16u32 {
        let s: Vec<f64> = (0..4).map(|i| if signs >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        if s.iter().product::<f64>() < 0.0 {
            best = best.max((0..4).map(|i| s[i] * e[i]).sum());
        }
    }
    best
}

pub fn box_is_ns(p: &Box2, tol: f64) -> bool {
    let total = |x: usize, y: usize| -> f64 { (0..4).map(|ab| p[ab >> 1][ab & 1][x][y]).sum() };
    let alice = |a: usize, x: usize, y: usize| p[a][0][x][y] + p[a][1][x][y];
    let bob = |b: usize, x: usize, y: usize| p[0][b][x][y] + p[1][b][x][y];
    let norm_ok = (0..4).all(|xy| (total(xy >> 1, xy & 1) - total(0, 0)).abs() < tol);
    let a_ok = (0..2).all(|a| (0..2).all(|x| (alice(a, x, 0) - alice(a, x, 1)).abs() < tol));
    let b_ok = (0..2).all(|b| (0..2).all(|y| (bob(b, 0, y) - bob(b, 1, y)).abs() < tol));
    norm_ok && a_ok && b_ok
}

/// Local iff no-signalling and every CHSH expression is at most 2 (for an
/// unnormalized box, at most twice its weight).
pub fn fine_local(p: &Box2, tol: f64) -> bool {
    let w: f64 = (0..4).map(|ab| p[ab >> 1][ab & 1][0][0]).sum();
    box_is_ns(p, tol) && max_chsh(p) <= 2.0 * w + tol
}

pub fn pr_variant(alpha: usize, beta: usize, gamma: usize) -> Box2 {
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    if a ^ b == (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma {
                        p[a][b][x][y] = 0.5;
                    }
                }
            }
        }
    }
    p
}

pub fn deterministic_box(code: usize) -> Box2 {
    let s = [code >> 3 & 1, code >> 2 & 1, code >> 1 & 1, code & 1];
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            p[s[x]][s[2 + y]][x][y] = 1.0;
        }
    }
    p
}

pub fn mix(boxes: &[(f64, Box2)]) -> Box2 {
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for (w, b) in boxes {
        for i in 0..16 {
            let (a, bb, x, y) = (i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1);
            p[a][bb][x][y] += w * b[a][bb][x][y];
        }
    }
    p
}

pub fn random_local_box<R: Rng>(rng: &mut R) -> Box2 {
    let w: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
    let t: f64 = w.iter().sum();
    mix(&(0..16).map(|i| (w[i] / t, deterministic_box(i))).collect::<Vec<_>>())
}

/// `σ_{a1 a2|x1 x2} = U diag_k(q_k p_k(a1 a2|x1 x2)) U†` on `Q_d` with two
/// black-box parties.
pub fn commuting_assemblage(u: &CMatrix, weights: &[f64], boxes: &[Box2]) -> Assemblage {
    let d = weights.len();
    Assemblage::from_fn(Scenario::Multipartite(2), vec![2, 2], vec![2, 2], 1e-9, |i| {
        let diag = CMatrix::from_fn(d, d, |r, s| {
            if r == s {
                c(weights[r] * boxes[r][i.a[0]][i.a[1]][i.x[0]][i.x[1]], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        Ok(op_vector(&(u * diag * u.adjoint())))
    })
    .expect("valid assemblage")
}
