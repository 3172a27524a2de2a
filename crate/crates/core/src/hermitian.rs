//! Hermitian matrices and the orthonormal Hermitian basis used to
//! vectorize quantum systems.
//!
//! The basis is `B_0 = I/√d` followed by the normalized generalized
//! Gell-Mann matrices: symmetric off-diagonal pairs, then antisymmetric
//! pairs, then the diagonal ones. Every element satisfies
//! `tr(B_i B_j) = δ_ij`, so the Euclidean pairing of coordinate vectors is
//! the Hilbert–Schmidt inner product. For `d = 2` this is
//! `(I, X, Y, Z)/√2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::system::{AtomicSystem, SystemType};
use crate::vector::GptVector;

/// Tolerance on `|m_ij − conj(m_ji)|`.
pub const EPS_HERM: f64 = 1e-10;

pub type CMatrix = DMatrix<Complex64>;

/// A square complex matrix equal to its conjugate transpose within
/// [`EPS_HERM`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidArgument(format!(
                "matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let deviation = hermiticity_defect(&m);
        if deviation > EPS_HERM {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(HermitianMatrix(m))
    }

    /// Wraps the Hermitian part `(m + m†)/2` without checking.
    pub(crate) fn hermitian_part(m: CMatrix) -> Self {
        let adj = m.adjoint();
        HermitianMatrix((m + adj).scale(0.5))
    }

    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let d = re.len();
        if im.len() != d || re.iter().chain(im).any(|r| r.len() != d) {
            return Err(Error::InvalidArgument(
                "real and imaginary parts must be square and equally sized".into(),
            ));
        }
        HermitianMatrix::new(CMatrix::from_fn(d, d, |i, j| c(re[i][j], im[i][j])))
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let zeros = vec![vec![0.0; d]; d];
        HermitianMatrix::from_parts(rows, &zeros)
    }

    pub fn identity(d: usize) -> Self {
        HermitianMatrix(CMatrix::identity(d, d))
    }

    pub fn zeros(d: usize) -> Self {
        HermitianMatrix(CMatrix::zeros(d, d))
    }

    /// `|ψ⟩⟨ψ|` for the given amplitudes (not renormalized).
    pub fn projector(psi: &[Complex64]) -> Self {
        let d = psi.len();
        HermitianMatrix(CMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj()))
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let d = entries.len();
        HermitianMatrix(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c(entries[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Eigenvalues (ascending) with their unit eigenvectors.
    pub fn eigh(&self) -> Vec<(f64, Vec<Complex64>)> {
        let eig = self.0.clone().symmetric_eigen();
        let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..self.dim())
            .map(|k| {
                (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect())
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    }

    pub fn transpose(&self) -> Self {
        HermitianMatrix(self.0.transpose())
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(s))
    }

    pub fn add(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix(&self.0 - &other.0)
    }

    pub fn kron(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix(self.0.kronecker(&other.0))
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        HermitianMatrix::hermitian_part(u * &self.0 * u.adjoint())
    }

    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Partial transpose on tensor factor `which` of a matrix acting on
    /// `⊗_i C^{dims[i]}`.
    pub fn partial_transpose(&self, dims: &[usize], which: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != self.dim() || which >= dims.len() {
            return Err(Error::InvalidArgument(format!(
                "partial transpose on factor {which} of dims {dims:?} for a {}-dimensional matrix",
                self.dim()
            )));
        }
        let split = |mut idx: usize| {
            let mut digits = vec![0; dims.len()];
            for f in (0..dims.len()).rev() {
                digits[f] = idx % dims[f];
                idx /= dims[f];
            }
            digits
        };
        let join = |digits: &[usize]| digits.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d);
        let mut out = CMatrix::zeros(total, total);
        for r in 0..total {
            for col in 0..total {
                let mut rd = split(r);
                let mut cd = split(col);
                std::mem::swap(&mut rd[which], &mut cd[which]);
                out[(join(&rd), join(&cd))] = self.0[(r, col)];
            }
        }
        Ok(HermitianMatrix(out))
    }
}

/// Trace distance `½‖a − b‖₁`.
pub fn trace_distance(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    0.5 * a.sub(b).eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// The orthonormal Hermitian basis of `d × d` matrices described in the
/// module docs.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    basis.push(CMatrix::identity(d, d).scale(1.0 / (d as f64).sqrt()));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = c(r, 0.0);
            m[(k, j)] = c(r, 0.0);
            basis.push(m);
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = c(0.0, -r);
            m[(k, j)] = c(0.0, r);
            basis.push(m);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = c(norm, 0.0);
        }
        m[(l, l)] = c(-(l as f64) * norm, 0.0);
        basis.push(m);
    }
    basis
}

/// `Re tr(a b)` without forming the product.
fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// Coordinates of `m` in the Hermitian basis, as a vector over `Q_d`.
pub fn hermitian_to_vector(m: &HermitianMatrix) -> GptVector {
    let d = m.dim();
    let coeffs = hermitian_basis(d)
        .iter()
        .map(|b| trace_product(b, m.matrix()))
        .collect();
    GptVector::new(SystemType::quantum(d), coeffs).expect("basis has d² elements")
}

/// Inverse of [`hermitian_to_vector`].
pub fn vector_to_hermitian(v: &GptVector) -> Result<HermitianMatrix> {
    match v.system().atoms() {
        [AtomicSystem::Quantum(d)] => {
            let d = *d;
            let mut m = CMatrix::zeros(d, d);
            for (b, &x) in hermitian_basis(d).iter().zip(v.coeffs()) {
                m += b.scale(x);
            }
            Ok(HermitianMatrix::hermitian_part(m))
        }
        _ => Err(Error::WrongSystem {
            expected: "a single quantum atom".into(),
            found: v.system().to_string(),
        }),
    }
}

/// Product basis `B_{i_1} ⊗ … ⊗ B_{i_n}` for an all-quantum composite, in
/// Kronecker coefficient order.
fn product_basis(dims: &[usize]) -> Vec<CMatrix> {
    let mut acc = vec![CMatrix::identity(1, 1)];
    for &d in dims {
        let local = hermitian_basis(d);
        acc = acc
            .iter()
            .flat_map(|a| local.iter().map(move |b| a.kronecker(b)))
            .collect();
    }
    acc
}

/// Coordinates of an operator on `⊗ C^{d_i}` for an all-quantum system.
pub fn operator_to_vector(system: &SystemType, m: &HermitianMatrix) -> Result<GptVector> {
    let dims = system.hilbert_dims().filter(|d| !d.is_empty()).ok_or_else(|| Error::WrongSystem {
        expected: "an all-quantum system".into(),
        found: system.to_string(),
    })?;
    let total: usize = dims.iter().product();
    if total != m.dim() {
        return Err(Error::InvalidArgument(format!(
            "operator of dimension {} does not act on {system}",
            m.dim()
        )));
    }
    let coeffs = product_basis(&dims)
        .iter()
        .map(|b| trace_product(b, m.matrix()))
        .collect();
    GptVector::new(system.clone(), coeffs)
}

/// Inverse of [`operator_to_vector`].
pub fn vector_to_operator(v: &GptVector) -> Result<HermitianMatrix> {
    let dims = v
        .system()
        .hilbert_dims()
        .filter(|d| !d.is_empty())
        .ok_or_else(|| Error::WrongSystem {
            expected: "an all-quantum system".into(),
            found: v.system().to_string(),
        })?;
    let total: usize = dims.iter().product();
    let mut m = CMatrix::zeros(total, total);
    for (b, &x) in product_basis(&dims).iter().zip(v.coeffs()) {
        if x != 0.0 {
            m += b.scale(x);
        }
    }
    Ok(HermitianMatrix::hermitian_part(m))
}
