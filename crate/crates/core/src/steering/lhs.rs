use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{mixed_radix, AsmIndex, Assemblage, Scenario};
use crate::error::{Error, Result};
use crate::hermitian::{hermitian_to_vector, vector_to_hermitian, CMatrix, HermitianMatrix};
use crate::lp::{solve_feasibility, Feasibility, LP_TOL};
use crate::vector::GptVector;

/// Cap on the number of joint deterministic response functions.
pub const MAX_STRATEGIES: usize = 1_000_000;

/// Shared classical randomness `λ` with weights folded into Bob's local
/// states: `σ_{a|x} = Σ_λ Π_i δ(a_i = λ_i(x_i)) ρ̃_λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LhsModel {
    /// `strategies[λ][i][x]` is party `i`'s outcome on setting `x`.
    pub strategies: Vec<Vec<Vec<usize>>>,
    /// `p(λ) = tr ρ̃_λ`.
    pub weights: Vec<f64>,
    pub local_states: Vec<GptVector>,
}

impl LhsModel {
    /// The assemblage this model produces, shaped like `like`.
    pub fn reconstruct(&self, like: &Assemblage) -> Result<Assemblage> {
        let d = like.bob_dim();
        like.clone_with(|idx| {
            let mut acc = GptVector::zeros(crate::system::SystemType::quantum(d));
            for (lam, rho) in self.strategies.iter().zip(&self.local_states) {
                if idx.a.iter().enumerate().all(|(i, &a)| lam[i][idx.x[i]] == a) {
                    acc = acc.add(rho)?;
                }
            }
            Ok(acc)
        })
    }
}

/// Linear functional `Σ tr(F_{a|x} σ_{a|x})` that is nonnegative on every
/// LHS assemblage and equals `value < 0` on the tested one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteeringInequality {
    /// Operator `F` for each element key.
    pub coefficients: Vec<(String, GptVector)>,
    pub bound: f64,
    pub value: f64,
}

impl SteeringInequality {
    pub fn evaluate(&self, asm: &Assemblage) -> Result<f64> {
        let mut total = 0.0;
        for (key, f) in &self.coefficients {
            let idx: AsmIndex = key.parse()?;
            let e = asm
                .get(&idx)
                .ok_or_else(|| Error::InvalidArgument(format!("assemblage has no element {key}")))?;
            total += f.inner(e)?;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "lhs", rename_all = "kebab-case")]
pub enum LhsOutcome {
    Feasible { model: LhsModel, reconstruction_error: f64 },
    Infeasible { certificate: SteeringInequality },
}

impl LhsOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LhsOutcome::Feasible { .. })
    }

    pub fn model(&self) -> Option<&LhsModel> {
        match self {
            LhsOutcome::Feasible { model, .. } => Some(model),
            _ => None,
        }
    }

    pub fn certificate(&self) -> Option<&SteeringInequality> {
        match self {
            LhsOutcome::Infeasible { certificate } => Some(certificate),
            _ => None,
        }
    }
}

fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b - b * a).iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn off_diagonal(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// A unitary whose columns diagonalize every matrix in `ms`.
fn common_eigenbasis(ms: &[CMatrix], tol: f64) -> Option<CMatrix> {
    let d = ms[0].nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a5);
    for _ in 0..8 {
        let mut h = CMatrix::zeros(d, d);
        for m in ms {
            h += m.scale(rng.random_range(-1.0..1.0));
        }
        let eig = HermitianMatrix::hermitian_part(h).eigh();
        let u = CMatrix::from_fn(d, d, |i, k| eig[k].1[i]);
        let ud = u.adjoint();
        if ms.iter().all(|m| off_diagonal(&(&ud * m * &u)) <= tol) {
            return Some(u);
        }
    }
    None
}

/// LHS feasibility for commuting bipartite or multipartite assemblages.
///
/// The elements are jointly diagonalized, and each common eigenvector
/// gives an independent linear feasibility problem over deterministic
/// response functions. Non-commuting assemblages are unsupported.
pub fn lhs_check(asm: &Assemblage, tol: f64) -> Result<LhsOutcome> {
    if !matches!(asm.scenario(), Scenario::Bipartite | Scenario::Multipartite(_)) {
        return Err(Error::Unsupported(format!(
            "LHS feasibility is implemented for bipartite and multipartite assemblages, not {}",
            asm.scenario()
        )));
    }
    let mats: Vec<CMatrix> = asm
        .elements()
        .iter()
        .map(|e| vector_to_hermitian(e).map(HermitianMatrix::into_matrix))
        .collect::<Result<_>>()?;
    let comm_tol = tol.max(1e-9);
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            if commutator_norm(&mats[i], &mats[j]) > comm_tol {
                return Err(Error::Unsupported(
                    "assemblage elements do not commute; LHS feasibility needs an SDP".into(),
                ));
            }
        }
    }
    let u = common_eigenbasis(&mats, 1e-8).ok_or_else(|| {
        Error::Unsupported("could not find a common eigenbasis for the elements".into())
    })?;
    let d = asm.bob_dim();
    let ud = u.adjoint();
    let diag: Vec<Vec<f64>> = mats.iter().map(|m| {
        let r = &ud * m * &u;
        (0..d).map(|k| r[(k, k)].re).collect()
    }).collect();

    // deterministic strategies, one response function per party
    let parties = asm.outcomes().len();
    let per_party: Vec<Vec<Vec<usize>>> = (0..parties)
        .map(|i| mixed_radix(&vec![asm.outcomes()[i]; asm.alice_settings()[i]]))
        .collect();
    let total = per_party
        .iter()
        .try_fold(1usize, |acc, p| acc.checked_mul(p.len()))
        .filter(|&n| n <= MAX_STRATEGIES)
        .ok_or_else(|| Error::InvalidArgument(format!("more than {MAX_STRATEGIES} deterministic strategies")))?;
    let strategies: Vec<Vec<Vec<usize>>> = mixed_radix(&per_party.iter().map(Vec::len).collect::<Vec<_>>())
        .into_iter()
        .map(|pick| pick.iter().enumerate().map(|(i, &j)| per_party[i][j].clone()).collect())
        .collect();
    debug_assert_eq!(strategies.len(), total);

    let indices = asm.indices();
    let a = DMatrix::from_fn(indices.len(), strategies.len(), |r, l| {
        let idx = &indices[r];
        let hit = idx.a.iter().enumerate().all(|(i, &ai)| strategies[l][i][idx.x[i]] == ai);
        if hit { 1.0 } else { 0.0 }
    });

    let col = |k: usize| -> Vec<Complex64> { (0..d).map(|i| u[(i, k)]).collect() };
    let mut weights = vec![vec![0.0; d]; strategies.len()];
    for k in 0..d {
        let b = DVector::from_fn(indices.len(), |r, _| diag[r][k]);
        match solve_feasibility(&a, &b, LP_TOL) {
            Feasibility::Feasible(w) => {
                for (l, &x) in w.iter().enumerate() {
                    weights[l][k] = x;
                }
            }
            Feasibility::Infeasible(y) => {
                let scale = y.amax().max(f64::MIN_POSITIVE);
                let proj = HermitianMatrix::projector(&col(k));
                let coefficients = indices
                    .iter()
                    .zip(y.iter())
                    .map(|(idx, &c)| (idx.to_string(), hermitian_to_vector(&proj.scale(c / scale))))
                    .collect();
                let value = b.dot(&y) / scale;
                return Ok(LhsOutcome::Infeasible {
                    certificate: SteeringInequality {
                        coefficients,
                        bound: 0.0,
                        value,
                    },
                });
            }
        }
    }

    let mut model = LhsModel {
        strategies: vec![],
        weights: vec![],
        local_states: vec![],
    };
    for (lam, w) in strategies.into_iter().zip(weights) {
        let p: f64 = w.iter().sum();
        if p > 0.0 {
            let mut rho = CMatrix::zeros(d, d);
            for (k, &wk) in w.iter().enumerate() {
                if wk > 0.0 {
                    let v = DVector::from_vec(col(k));
                    rho += (&v * v.adjoint()).scale(wk);
                }
            }
            model.strategies.push(lam);
            model.weights.push(p);
            model.local_states.push(hermitian_to_vector(&HermitianMatrix::hermitian_part(rho)));
        }
    }
    let reconstruction_error = model.reconstruct(asm)?.max_abs_diff(asm);
    Ok(LhsOutcome::Feasible {
        model,
        reconstruction_error,
    })
}

impl Assemblage {
    /// Same shape, elements recomputed by `f`.
    pub(crate) fn clone_with<F>(&self, f: F) -> Result<Assemblage>
    where
        F: FnMut(&AsmIndex) -> Result<GptVector>,
    {
        Assemblage::from_fn(self.scenario(), self.outcomes().to_vec(), self.settings().to_vec(), 1e-9, f)
    }
}
