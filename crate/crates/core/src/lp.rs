//! Dense two-phase simplex for feasibility of `A x = b, x ≥ 0`.
//!
//! Pivoting follows Bland's rule, so the method terminates on degenerate
//! problems. Infeasible systems come back with a Farkas certificate.

use nalgebra::{DMatrix, DVector};

/// Default pivot tolerance.
pub const LP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// A nonnegative solution of `A x = b`.
    Feasible(DVector<f64>),
    /// `y` with `Aᵀ y ≥ 0` and `bᵀ y < 0`.
    Infeasible(DVector<f64>),
}

/// Decides feasibility of `A x = b, x ≥ 0`.
pub fn solve_feasibility(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> Feasibility {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m, "right-hand side length");
    if m == 0 {
        return Feasibility::Feasible(DVector::zeros(n));
    }

    // rows flipped so that b ≥ 0, then one artificial per row
    let sign: Vec<f64> = b.iter().map(|&x| if x < 0.0 { -1.0 } else { 1.0 }).collect();
    let cols = n + m;
    let mut t = DMatrix::<f64>::zeros(m + 1, cols + 1);
    for i in 0..m {
        for j in 0..n {
            t[(i, j)] = sign[i] * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, cols)] = sign[i] * b[i];
    }
    // objective row: reduced costs of min Σ artificials
    for j in 0..=cols {
        let s: f64 = (0..m).map(|i| t[(i, j)]).sum();
        t[(m, j)] = if (n..cols).contains(&j) { 0.0 } else { -s };
    }
    let mut basis: Vec<usize> = (n..cols).collect();

    let max_pivots = 50 * (cols + m).max(1) * (cols + m).max(1);
    for _ in 0..max_pivots {
        let Some(enter) = (0..cols).find(|&j| t[(m, j)] < -tol) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let p = t[(i, enter)];
            if p > tol {
                let ratio = t[(i, cols)] / p;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - tol || (ratio <= best + tol && basis[i] < basis[r]) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        // phase-one objective is bounded below, so a pivot row exists
        let Some((r, _)) = leave else { break };
        pivot(&mut t, r, enter);
        basis[r] = enter;
    }

    let infeasibility = -t[(m, cols)];
    if infeasibility > tol.max(tol * b.amax()) {
        // reduced cost of artificial i is 1 - π_i, and y = -π in the
        // original row orientation
        let y = DVector::from_fn(m, |i, _| sign[i] * (t[(m, n + i)] - 1.0));
        return Feasibility::Infeasible(y);
    }
    let mut x = DVector::zeros(n);
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[(i, cols)].max(0.0);
        }
    }
    Feasibility::Feasible(x)
}

fn pivot(t: &mut DMatrix<f64>, r: usize, c: usize) {
    let p = t[(r, c)];
    let width = t.ncols();
    for j in 0..width {
        t[(r, j)] /= p;
    }
    for i in 0..t.nrows() {
        if i != r {
            let f = t[(i, c)];
            if f != 0.0 {
                for j in 0..width {
                    t[(i, j)] -= f * t[(r, j)];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_membership() {
        // x on the probability simplex with x0 = 0.25
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![1.0, 0.25]);
        match solve_feasibility(&a, &b, LP_TOL) {
            Feasibility::Feasible(x) => {
                assert!((&a * &x - &b).amax() < 1e-12);
                assert!(x.iter().all(|&v| v >= 0.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn farkas_certificate() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![1.0, 1.5]);
        match solve_feasibility(&a, &b, LP_TOL) {
            Feasibility::Infeasible(y) => {
                assert!((a.transpose() * &y).iter().all(|&v| v >= -1e-12));
                assert!(b.dot(&y) < -1e-9);
            }
            other => panic!("{other:?}"),
        }
        let neg = DVector::from_vec(vec![-1.0, 0.0]);
        match solve_feasibility(&a, &neg, LP_TOL) {
            Feasibility::Infeasible(y) => {
                assert!((a.transpose() * &y).iter().all(|&v| v >= -1e-12));
                assert!(neg.dot(&y) < 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_and_redundant_rows() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, 1.0, 2.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 1.0, 2.0]);
        assert!(matches!(solve_feasibility(&a, &b, LP_TOL), Feasibility::Feasible(_)));
        let z = DVector::zeros(3);
        assert!(matches!(solve_feasibility(&a, &z, LP_TOL), Feasibility::Feasible(_)));
    }
}
