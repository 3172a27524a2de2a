//! Linear maps between system vector spaces.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atomic::{atomic_state_margin, classical_point, unit_effect};
use crate::compose::{functional_bounds, known_extreme_states, state_check, tensor, effect_check};
use crate::error::{Error, Result};
use crate::hermitian::{
    c, hermitian_to_vector, operator_to_vector, pauli_x, pauli_z, vector_to_hermitian,
    vector_to_operator, CMatrix, HermitianMatrix,
};
use crate::search::{bloch_projector_coeffs, bloch_state, minimize_on_sphere, minimize_pure_state, SearchConfig};
use crate::system::{AtomicSystem, SystemType};
use crate::vector::GptVector;
use crate::verdict::{MembershipVerdict, Witness};

/// A real matrix of shape `dim(codomain) × dim(domain)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapRepr", into = "MapRepr")]
pub struct LinearMap {
    domain: SystemType,
    codomain: SystemType,
    matrix: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    domain: SystemType,
    codomain: SystemType,
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<MapRepr> for LinearMap {
    type Error = Error;

    fn try_from(r: MapRepr) -> Result<Self> {
        let rows = r.matrix.len();
        let cols = r.matrix.first().map_or(0, Vec::len);
        if r.matrix.iter().any(|row| row.len() != cols) {
            return Err(Error::Parse("ragged map matrix".into()));
        }
        let m = DMatrix::from_fn(rows, cols, |i, j| r.matrix[i][j]);
        LinearMap::new(r.domain, r.codomain, m)
    }
}

impl From<LinearMap> for MapRepr {
    fn from(t: LinearMap) -> Self {
        let matrix = (0..t.matrix.nrows())
            .map(|i| t.matrix.row(i).iter().copied().collect())
            .collect();
        MapRepr {
            domain: t.domain,
            codomain: t.codomain,
            matrix,
        }
    }
}

impl LinearMap {
    pub fn new(domain: SystemType, codomain: SystemType, matrix: DMatrix<f64>) -> Result<Self> {
        let (r, c) = (codomain.dimension(), domain.dimension());
        if matrix.shape() != (r, c) {
            return Err(Error::InvalidArgument(format!(
                "matrix of shape {:?} does not map {domain} to {codomain} (need {r}x{c})",
                matrix.shape()
            )));
        }
        Ok(LinearMap {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn identity(system: &SystemType) -> Self {
        let n = system.dimension();
        LinearMap {
            domain: system.clone(),
            codomain: system.clone(),
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Tabulates `f` on the coordinate basis of `domain`.
    pub fn from_fn<F>(domain: &SystemType, codomain: &SystemType, f: F) -> Result<Self>
    where
        F: Fn(&GptVector) -> Result<GptVector>,
    {
        let n = domain.dimension();
        let mut m = DMatrix::zeros(codomain.dimension(), n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let img = f(&GptVector::new(domain.clone(), e)?)?;
            if img.system() != codomain {
                return Err(Error::SystemMismatch {
                    expected: codomain.to_string(),
                    found: img.system().to_string(),
                });
            }
            m.set_column(j, &nalgebra::DVector::from_column_slice(img.coeffs()));
        }
        LinearMap::new(domain.clone(), codomain.clone(), m)
    }

    /// Map between all-quantum systems given by its action on Hermitian
    /// operators.
    pub fn from_operator_fn<F>(domain: &SystemType, codomain: &SystemType, f: F) -> Result<Self>
    where
        F: Fn(&HermitianMatrix) -> HermitianMatrix,
    {
        LinearMap::from_fn(domain, codomain, |v| {
            operator_to_vector(codomain, &f(&vector_to_operator(v)?))
        })
    }

    /// An effect viewed as a map to the trivial system.
    pub fn from_effect(e: &GptVector) -> Self {
        LinearMap {
            domain: e.system().clone(),
            codomain: SystemType::trivial(),
            matrix: DMatrix::from_row_slice(1, e.len(), e.coeffs()),
        }
    }

    /// A state viewed as a preparation from the trivial system.
    pub fn from_state(s: &GptVector) -> Self {
        LinearMap {
            domain: SystemType::trivial(),
            codomain: s.system().clone(),
            matrix: DMatrix::from_column_slice(s.len(), 1, s.coeffs()),
        }
    }

    pub fn domain(&self) -> &SystemType {
        &self.domain
    }

    pub fn codomain(&self) -> &SystemType {
        &self.codomain
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, v: &GptVector) -> Result<GptVector> {
        if v.system() != &self.domain {
            return Err(Error::SystemMismatch {
                expected: self.domain.to_string(),
                found: v.system().to_string(),
            });
        }
        let x = nalgebra::DVector::from_column_slice(v.coeffs());
        GptVector::new(self.codomain.clone(), (&self.matrix * x).as_slice().to_vec())
    }

    pub fn max_abs_diff(&self, other: &LinearMap) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix).amax()
    }
}

/// `t2 ∘ t1`.
pub fn compose_seq(t2: &LinearMap, t1: &LinearMap) -> Result<LinearMap> {
    if t1.codomain != t2.domain {
        return Err(Error::SystemMismatch {
            expected: t2.domain.to_string(),
            found: t1.codomain.to_string(),
        });
    }
    LinearMap::new(t1.domain.clone(), t2.codomain.clone(), &t2.matrix * &t1.matrix)
}

/// `t1 ⊗ t2`, acting side by side.
pub fn compose_par(t1: &LinearMap, t2: &LinearMap) -> LinearMap {
    LinearMap {
        domain: t1.domain.compose(&t2.domain),
        codomain: t1.codomain.compose(&t2.codomain),
        matrix: t1.matrix.kronecker(&t2.matrix),
    }
}

/// Left fold of [`compose_par`].
pub fn compose_par_all(ts: &[LinearMap]) -> LinearMap {
    ts.iter().fold(LinearMap::identity(&SystemType::trivial()), |acc, t| compose_par(&acc, t))
}

/// `ρ ↦ ρᵀ` on `Q_d`.
pub fn transpose_map(d: usize) -> LinearMap {
    let q = SystemType::quantum(d);
    LinearMap::from_operator_fn(&q, &q, HermitianMatrix::transpose).expect("quantum system")
}

/// Universal-NOT `ρ ↦ (tr ρ) I − ρ`. On qubits it sends each pure state to
/// its orthogonal complement.
pub fn unot_map(d: usize) -> LinearMap {
    let q = SystemType::quantum(d);
    LinearMap::from_operator_fn(&q, &q, |r| HermitianMatrix::identity(d).scale(r.trace()).sub(r))
        .expect("quantum system")
}

/// `ρ ↦ (tr ρ) I / d`.
pub fn depolarizing_map(d: usize) -> LinearMap {
    let q = SystemType::quantum(d);
    LinearMap::from_operator_fn(&q, &q, |r| HermitianMatrix::identity(d).scale(r.trace() / d as f64))
        .expect("quantum system")
}

/// `ρ ↦ U ρ U†`.
pub fn unitary_map(u: &CMatrix) -> Result<LinearMap> {
    let d = u.nrows();
    if u.ncols() != d {
        return Err(Error::InvalidArgument("unitary must be square".into()));
    }
    let dev = (u.adjoint() * u - CMatrix::identity(d, d)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if dev > 1e-9 {
        return Err(Error::InvalidArgument(format!("matrix is not unitary (deviation {dev:.3e})")));
    }
    let q = SystemType::quantum(d);
    LinearMap::from_operator_fn(&q, &q, |r| r.conjugate_by(u))
}

/// The map `Classical(v)·A → B` applying `family[x]` on classical input `x`.
pub fn controlled_map(family: &[LinearMap]) -> Result<LinearMap> {
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidArgument("controlled map needs at least one branch".into()))?;
    for f in family {
        if f.domain != first.domain || f.codomain != first.codomain {
            return Err(Error::InvalidArgument(format!(
                "branch maps {} -> {}, expected {} -> {}",
                f.domain, f.codomain, first.domain, first.codomain
            )));
        }
    }
    let v = family.len();
    let da = first.domain.dimension();
    let last = &family[v - 1].matrix;
    let mut m = DMatrix::zeros(first.codomain.dimension(), v * da);
    for (x, f) in family.iter().enumerate() {
        let block = if x + 1 < v { &f.matrix - last } else { last.clone() };
        m.columns_mut(x * da, da).copy_from(&block);
    }
    LinearMap::new(
        SystemType::classical(v).compose(&first.domain),
        first.codomain.clone(),
        m,
    )
}

/// The measurement `A → Classical(v)` with outcome effects `effects`.
pub fn measurement_map(effects: &[GptVector], tol: f64) -> Result<LinearMap> {
    let first = effects
        .first()
        .ok_or_else(|| Error::InvalidArgument("measurement needs at least one outcome".into()))?;
    let sys = first.system().clone();
    let cfg = SearchConfig { tol, ..SearchConfig::default() };
    let mut sum = GptVector::zeros(sys.clone());
    for (i, e) in effects.iter().enumerate() {
        if e.system() != &sys {
            return Err(Error::SystemMismatch {
                expected: sys.to_string(),
                found: e.system().to_string(),
            });
        }
        if effect_check(e, None, &cfg)?.is_rejected() {
            return Err(Error::InvalidArgument(format!("outcome {i} is not a valid effect")));
        }
        sum = sum.add(e)?;
    }
    let u = unit_effect(&sys);
    let dev = sum.max_abs_diff(&u);
    if dev > tol {
        return Err(Error::InvalidArgument(format!(
            "effects do not sum to the unit effect (deviation {dev:.3e})"
        )));
    }
    let v = effects.len();
    let mut m = DMatrix::zeros(v, sys.dimension());
    for (i, e) in effects.iter().take(v - 1).enumerate() {
        m.set_row(i, &nalgebra::RowDVector::from_row_slice(e.coeffs()));
    }
    m.set_row(v - 1, &nalgebra::RowDVector::from_row_slice(u.coeffs()));
    LinearMap::new(sys, SystemType::classical(v), m)
}

fn classical_indexed(states: &[GptVector], codomain: &SystemType) -> Result<LinearMap> {
    let v = states.len();
    let last = states[v - 1].coeffs();
    let mut m = DMatrix::zeros(codomain.dimension(), v);
    for (b, s) in states.iter().enumerate() {
        for (r, &x) in s.coeffs().iter().enumerate() {
            m[(r, b)] = if b + 1 < v { x - last[r] } else { x };
        }
    }
    LinearMap::new(SystemType::classical(v), codomain.clone(), m)
}

/// The preparation `Classical(v) → B` sending point `b` to `states[b]`.
pub fn preparation_map(states: &[GptVector], tol: f64) -> Result<LinearMap> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidArgument("preparation needs at least one state".into()))?;
    let sys = first.system().clone();
    let u = unit_effect(&sys);
    let cfg = SearchConfig { tol, ..SearchConfig::default() };
    for (b, s) in states.iter().enumerate() {
        if s.system() != &sys {
            return Err(Error::SystemMismatch {
                expected: sys.to_string(),
                found: s.system().to_string(),
            });
        }
        let norm = u.inner(s)?;
        if (norm - 1.0).abs() > tol {
            return Err(Error::InvalidArgument(format!("state {b} has normalization {norm}")));
        }
        if state_check(s, &cfg)?.is_rejected() {
            return Err(Error::InvalidArgument(format!("state {b} is outside the state cone")));
        }
    }
    classical_indexed(states, &sys)
}

/// Classical copy `point(i) ↦ point(i) ⊗ point(i)`.
pub fn copy_map(v: usize) -> LinearMap {
    let states: Vec<GptVector> = (0..v)
        .map(|i| {
            let p = classical_point(v, i).expect("in range");
            tensor(&p, &p)
        })
        .collect();
    classical_indexed(&states, &SystemType::classical(v).compose(&SystemType::classical(v)))
        .expect("copy has consistent shape")
}

/// Projective measurement of `Q_d` in the computational basis.
pub fn computational_measurement(d: usize) -> LinearMap {
    let effects: Vec<GptVector> = (0..d)
        .map(|i| {
            let mut diag = vec![0.0; d];
            diag[i] = 1.0;
            hermitian_to_vector(&HermitianMatrix::diagonal(&diag))
        })
        .collect();
    measurement_map(&effects, 1e-12).expect("basis projectors form a measurement")
}

/// Two-outcome projective measurement `{(I ± P)/2}` of a qubit Pauli `P`.
pub fn pauli_measurement(p: &CMatrix) -> Result<LinearMap> {
    let h = HermitianMatrix::new(p.clone())?;
    let id = HermitianMatrix::identity(2);
    let plus = hermitian_to_vector(&id.add(&h).scale(0.5));
    let minus = hermitian_to_vector(&id.sub(&h).scale(0.5));
    measurement_map(&[plus, minus], 1e-9)
}

fn codomain_margin(t: &LinearMap, input: &[f64], cfg: &SearchConfig) -> f64 {
    let x = nalgebra::DVector::from_column_slice(input);
    let out = &t.matrix * x;
    match t.codomain.atoms() {
        [] => out[0],
        [atom] => atomic_state_margin(atom, out.as_slice()).0,
        _ => {
            let v = GptVector::new(t.codomain.clone(), out.as_slice().to_vec()).expect("shape");
            state_check(&v, cfg).map(|r| r.margin()).unwrap_or(f64::NEG_INFINITY)
        }
    }
}

/// Whether `t` maps the domain state cone into the codomain state cone.
///
/// Polytopic domains with known extreme states are checked exactly on
/// them. A qubit domain is searched on a Bloch grid with refinement;
/// larger quantum domains use seeded random restarts and a non-violating
/// outcome is reported as inconclusive.
pub fn positivity_check(t: &LinearMap, cfg: &SearchConfig) -> Result<MembershipVerdict> {
    let exact_codomain = t.codomain.len() <= 1;
    match t.domain.atoms() {
        [AtomicSystem::Quantum(d)] => {
            let d = *d;
            let (value, input, exhaustive) = if d == 2 {
                let best = minimize_on_sphere(|th, ph| codomain_margin(t, &bloch_projector_coeffs(th, ph), cfg), cfg.grid);
                let psi = bloch_state(best.theta, best.phi);
                (best.value, psi.to_vec(), exact_codomain)
            } else {
                let (v, psi) = minimize_pure_state(
                    d,
                    |psi| {
                        let p = hermitian_to_vector(&HermitianMatrix::projector(psi));
                        codomain_margin(t, p.coeffs(), cfg)
                    },
                    cfg,
                );
                (v, psi, d == 1 && exact_codomain)
            };
            verdict_from_search(value, &input, exhaustive, cfg.tol)
        }
        _ => {
            let gens = if t.domain.is_empty() {
                vec![GptVector::scalar(1.0)]
            } else {
                known_extreme_states(&t.domain).ok_or_else(|| {
                    Error::Unsupported(format!("extreme states of {} are not enumerated", t.domain))
                })?
            };
            let mut margin = f64::INFINITY;
            let mut worst: Option<GptVector> = None;
            let mut inconclusive = false;
            for g in &gens {
                let r = state_check(&t.apply(g)?, cfg)?;
                inconclusive |= r.is_inconclusive();
                if r.margin() < margin {
                    margin = r.margin();
                    worst = Some(g.clone());
                }
            }
            Ok(if margin < -cfg.tol {
                MembershipVerdict::Rejected {
                    margin,
                    witness: Witness::State {
                        state: worst.expect("generator recorded"),
                        value: margin,
                    },
                }
            } else if inconclusive {
                MembershipVerdict::InconclusiveAccept {
                    margin,
                    reason: "codomain membership was decided heuristically".into(),
                }
            } else {
                MembershipVerdict::Accepted { margin }
            })
        }
    }
}

fn verdict_from_search(value: f64, psi: &[Complex64], exhaustive: bool, tol: f64) -> Result<MembershipVerdict> {
    if value < -tol {
        return Ok(MembershipVerdict::Rejected {
            margin: value,
            witness: Witness::State {
                state: hermitian_to_vector(&HermitianMatrix::projector(psi)),
                value,
            },
        });
    }
    Ok(if exhaustive {
        MembershipVerdict::Accepted { margin: value }
    } else {
        MembershipVerdict::InconclusiveAccept {
            margin: value,
            reason: "random-restart search over pure inputs is not exhaustive".into(),
        }
    })
}

fn single_quantum(s: &SystemType) -> Result<usize> {
    match s.atoms() {
        [AtomicSystem::Quantum(d)] => Ok(*d),
        _ => Err(Error::WrongSystem {
            expected: "a single quantum atom".into(),
            found: s.to_string(),
        }),
    }
}

/// `Σ_ij |i⟩⟨j| ⊗ T(|i⟩⟨j|)`, with `T` extended complex-linearly.
pub fn choi_matrix(t: &LinearMap) -> Result<HermitianMatrix> {
    let d = single_quantum(&t.domain)?;
    let d2 = single_quantum(&t.codomain)?;
    let image = |h: CMatrix| -> Result<CMatrix> {
        let v = hermitian_to_vector(&HermitianMatrix::new(h)?);
        Ok(vector_to_hermitian(&t.apply(&v)?)?.into_matrix())
    };
    let mut choi = CMatrix::zeros(d * d2, d * d2);
    for i in 0..d {
        for j in 0..d {
            let mut eij = CMatrix::zeros(d, d);
            eij[(i, j)] = c(1.0, 0.0);
            let eji = eij.transpose();
            let h1 = (&eij + &eji).scale(0.5);
            let h2 = (&eij - &eji) * c(0.0, -0.5);
            let block = image(h1)? + image(h2)? * c(0.0, 1.0);
            choi.view_mut((i * d2, j * d2), (d2, d2)).copy_from(&block);
        }
    }
    HermitianMatrix::new(choi)
}

/// Quantum complete positivity through the Choi matrix. Returns the
/// verdict and the minimum Choi eigenvalue.
pub fn quantum_cp_check(t: &LinearMap, tol: f64) -> Result<(MembershipVerdict, f64)> {
    let lam = choi_matrix(t)?.min_eigenvalue();
    let v = if lam >= -tol {
        MembershipVerdict::Accepted { margin: lam }
    } else {
        MembershipVerdict::Rejected {
            margin: lam,
            witness: Witness::Eigenvalue { value: lam },
        }
    };
    Ok((v, lam))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceMode {
    Preserving,
    NonIncreasing,
}

/// `u_B ∘ T = u_A` (preserving) or `u_B ∘ T ≤ u_A` on the domain cone
/// (non-increasing).
pub fn trace_condition_check(t: &LinearMap, mode: TraceMode, cfg: &SearchConfig) -> Result<MembershipVerdict> {
    let ua = unit_effect(&t.domain);
    let ub = nalgebra::DVector::from_column_slice(unit_effect(&t.codomain).coeffs());
    let pulled = t.matrix.transpose() * ub;
    let slack = GptVector::new(
        t.domain.clone(),
        ua.coeffs().iter().zip(pulled.iter()).map(|(a, b)| a - b).collect(),
    )?;
    match mode {
        TraceMode::Preserving => {
            let dev = slack.coeffs().iter().fold(0.0f64, |m, x| m.max(x.abs()));
            Ok(if dev <= cfg.tol {
                MembershipVerdict::Accepted { margin: -dev }
            } else {
                MembershipVerdict::Rejected {
                    margin: -dev,
                    witness: Witness::Condition {
                        description: "unit effect is not preserved".into(),
                        deviation: dev,
                    },
                }
            })
        }
        TraceMode::NonIncreasing => {
            let b = functional_bounds(&slack, cfg)?;
            let (margin, state) = b.lo;
            Ok(if margin < -cfg.tol {
                MembershipVerdict::Rejected {
                    margin,
                    witness: Witness::State {
                        state: state.expect("violating state recorded"),
                        value: margin,
                    },
                }
            } else if b.exhaustive {
                MembershipVerdict::Accepted { margin }
            } else {
                MembershipVerdict::InconclusiveAccept {
                    margin,
                    reason: "normalization bounded only on sampled product states".into(),
                }
            })
        }
    }
}

/// Names accepted by [`builtin_map`].
pub const BUILTIN_MAPS: &[&str] = &[
    "id2",
    "transpose2",
    "unot2",
    "depolarize2",
    "copy2",
    "z-meas2",
    "pauli-meas",
    "ctranspose2",
];

/// Named maps: qubit identity, transpose, universal-NOT and full
/// depolarization; classical bit copy; the Z measurement; the Pauli
/// measurement controlled on a bit (0 ↦ Z, 1 ↦ X); and the controlled
/// transpose.
pub fn builtin_map(name: &str) -> Option<LinearMap> {
    let q2 = SystemType::quantum(2);
    Some(match name {
        "id2" => LinearMap::identity(&q2),
        "transpose2" => transpose_map(2),
        "unot2" => unot_map(2),
        "depolarize2" => depolarizing_map(2),
        "copy2" => copy_map(2),
        "z-meas2" => computational_measurement(2),
        "pauli-meas" => controlled_map(&[
            pauli_measurement(&pauli_z()).ok()?,
            pauli_measurement(&pauli_x()).ok()?,
        ])
        .ok()?,
        "ctranspose2" => controlled_map(&[LinearMap::identity(&q2), transpose_map(2)]).ok()?,
        _ => return None,
    })
}
