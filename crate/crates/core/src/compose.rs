//! Max-tensor-product composition.
//!
//! A composite vector is in the state cone iff every product of local
//! dual extreme rays evaluates nonnegatively on it. Polytopic factors
//! contribute a finite ray list; quantum factors contribute rank-1
//! projectors, handled by exact eigenvalues when a single quantum factor
//! remains, a Bloch grid when one of two quantum factors is a qubit, and
//! seeded see-saw restarts otherwise.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atomic::{
    atomic_effect_check, atomic_state_check, effect_cone_rays, state_vertices,
};
use crate::error::{Error, Result};
use crate::hermitian::{
    hermitian_to_vector, vector_to_hermitian, vector_to_operator, HermitianMatrix,
};
use crate::search::{bloch_projector_coeffs, bloch_state, minimize_on_sphere, random_pure_state, SearchConfig};
use crate::system::{AtomicSystem, SystemType};
use crate::vector::{contract, dot, kron, GptVector};
use crate::verdict::{MembershipVerdict, Witness};

/// `v1 ⊗ v2` over the concatenated system.
pub fn tensor(v1: &GptVector, v2: &GptVector) -> GptVector {
    GptVector::new(v1.system().compose(v2.system()), kron(v1.coeffs(), v2.coeffs()))
        .expect("kronecker product has composite dimension")
}

/// Left fold of [`tensor`]; the empty product is the scalar 1.
pub fn tensor_all(vs: &[GptVector]) -> GptVector {
    vs.iter().fold(GptVector::scalar(1.0), |acc, v| tensor(&acc, v))
}

/// A product of local effects, one per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductEffectRay {
    pub factors: Vec<GptVector>,
}

impl ProductEffectRay {
    pub fn to_vector(&self) -> GptVector {
        tensor_all(&self.factors)
    }
}

/// One term `weight · ⊗_j factors[j]` of a separable decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub weight: f64,
    pub factors: Vec<GptVector>,
}

pub type SeparableDecomposition = Vec<SeparableTerm>;

/// Contracts `v` with the effect `e` on the factors listed in `factors`
/// (zero-based, in the order `e` is written over), returning the
/// conditional subnormalized vector on the remaining factors.
pub fn steer(v: &GptVector, e: &GptVector, factors: &[usize]) -> Result<GptVector> {
    let sys = v.system();
    let mut seen = vec![false; sys.len()];
    for &f in factors {
        if f >= sys.len() || seen[f] {
            return Err(Error::InvalidArgument(format!(
                "factor index {f} out of range or repeated for {sys}"
            )));
        }
        seen[f] = true;
    }
    let expected = sys.select(factors)?;
    if e.system() != &expected {
        return Err(Error::SystemMismatch {
            expected: expected.to_string(),
            found: e.system().to_string(),
        });
    }
    let rest: Vec<usize> = (0..sys.len()).filter(|i| !seen[*i]).collect();
    let out_sys = sys.select(&rest)?;
    let coeffs = contract(v.coeffs(), &sys.atom_dims(), factors, e.coeffs());
    GptVector::new(out_sys, coeffs)
}

/// Cone membership for any system: exact for atoms, search-based for
/// composites.
pub fn state_check(v: &GptVector, cfg: &SearchConfig) -> Result<MembershipVerdict> {
    if v.system().is_atomic() {
        atomic_state_check(v, cfg.tol)
    } else {
        composite_state_check(v, cfg)
    }
}

/// Effect validity for any system.
pub fn effect_check(
    e: &GptVector,
    certificate: Option<&SeparableDecomposition>,
    cfg: &SearchConfig,
) -> Result<MembershipVerdict> {
    if e.system().is_atomic() {
        atomic_effect_check(e, cfg.tol)
    } else {
        composite_effect_check(e, certificate, cfg)
    }
}

struct QuantumMin {
    value: f64,
    /// One projector per quantum factor, as Hermitian-basis coordinates.
    projectors: Vec<Vec<f64>>,
    exhaustive: bool,
}

fn projector_coeffs(psi: &[Complex64]) -> Vec<f64> {
    hermitian_to_vector(&HermitianMatrix::projector(psi)).into_coeffs()
}

fn qubit_min_eigenvalue(c: &[f64]) -> f64 {
    let r = (c[1] * c[1] + c[2] * c[2] + c[3] * c[3]).sqrt();
    (c[0] - r) * std::f64::consts::FRAC_1_SQRT_2
}

fn min_eigenpair(coeffs: &[f64], d: usize) -> (f64, Vec<Complex64>) {
    let v = GptVector::new(SystemType::quantum(d), coeffs.to_vec()).expect("shape");
    let h = vector_to_hermitian(&v).expect("quantum");
    h.eigh().swap_remove(0)
}

/// Minimizes `⟨⊗ P_i, w⟩` over rank-1 projectors `P_i`, for a tensor `w`
/// over quantum factors with Hilbert dimensions `dims`.
fn minimize_quantum(w: &[f64], dims: &[usize], cfg: &SearchConfig) -> QuantumMin {
    match dims {
        [] => QuantumMin {
            value: w[0],
            projectors: vec![],
            exhaustive: true,
        },
        [d] => {
            let (value, psi) = min_eigenpair(w, *d);
            QuantumMin {
                value,
                projectors: vec![projector_coeffs(&psi)],
                exhaustive: true,
            }
        }
        [d1, d2] if *d1 == 2 || *d2 == 2 => {
            // grid over the qubit factor, exact eigenvalue on the other
            let grid_axis = if *d1 == 2 { 0 } else { 1 };
            let other = if grid_axis == 0 { *d2 } else { *d1 };
            let sq = [d1 * d1, d2 * d2];
            let reduce = |t: f64, p: f64| -> Vec<f64> {
                contract(w, &sq, &[grid_axis], &bloch_projector_coeffs(t, p))
            };
            let objective = |t: f64, p: f64| {
                let r = reduce(t, p);
                if other == 2 {
                    qubit_min_eigenvalue(&r)
                } else {
                    min_eigenpair(&r, other).0
                }
            };
            let best = minimize_on_sphere(objective, cfg.grid);
            let grid_proj = projector_coeffs(&bloch_state(best.theta, best.phi));
            let (value, psi) = min_eigenpair(&reduce(best.theta, best.phi), other);
            let other_proj = projector_coeffs(&psi);
            let projectors = if grid_axis == 0 {
                vec![grid_proj, other_proj]
            } else {
                vec![other_proj, grid_proj]
            };
            QuantumMin {
                value: value.min(best.value),
                projectors,
                exhaustive: true,
            }
        }
        _ => see_saw(w, dims, cfg),
    }
}

fn see_saw(w: &[f64], dims: &[usize], cfg: &SearchConfig) -> QuantumMin {
    let sq: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let n = dims.len();
    let restarts = cfg.restarts.max(1);
    let runs: Vec<(f64, Vec<Vec<f64>>, usize)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64).wrapping_mul(0x2545_F491_4F6C_DD1D));
            let mut projs: Vec<Vec<f64>> = dims
                .iter()
                .map(|&d| projector_coeffs(&random_pure_state(d, &mut rng)))
                .collect();
            let mut value = f64::INFINITY;
            for _ in 0..200 {
                let before = value;
                for i in 0..n {
                    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                    let e = others
                        .iter()
                        .fold(vec![1.0], |acc, &j| kron(&acc, &projs[j]));
                    let local = contract(w, &sq, &others, &e);
                    let (v, psi) = min_eigenpair(&local, dims[i]);
                    projs[i] = projector_coeffs(&psi);
                    value = v;
                }
                if before - value < 1e-13 {
                    break;
                }
            }
            (value, projs, r)
        })
        .collect();
    let (value, projectors, _) = runs
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)))
        .expect("at least one restart");
    QuantumMin {
        value,
        projectors,
        exhaustive: false,
    }
}

fn cartesian(counts: &[usize]) -> Vec<Vec<usize>> {
    counts.iter().fold(vec![vec![]], |acc, &c| {
        acc.iter()
            .flat_map(|prefix| {
                (0..c).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect()
    })
}

/// Membership of a composite vector in the max-tensor-product cone.
///
/// All-quantum operators that are already positive semidefinite are
/// accepted directly (quantum states lie inside the cone); their margin is
/// the minimum eigenvalue, a lower bound on the product-ray minimum.
pub fn composite_state_check(v: &GptVector, cfg: &SearchConfig) -> Result<MembershipVerdict> {
    let sys = v.system();
    if sys.len() <= 1 {
        return atomic_state_check(v, cfg.tol);
    }
    if sys.is_all_quantum() {
        let lam = vector_to_operator(v)?.min_eigenvalue();
        if lam >= -cfg.tol {
            return Ok(MembershipVerdict::Accepted { margin: lam });
        }
    }

    let atoms = sys.atoms();
    let poly: Vec<usize> = (0..atoms.len()).filter(|&i| atoms[i].is_polytopic()).collect();
    let quant: Vec<usize> = (0..atoms.len()).filter(|&i| atoms[i].is_quantum()).collect();
    let qdims: Vec<usize> = quant
        .iter()
        .map(|&i| match atoms[i] {
            AtomicSystem::Quantum(d) => d,
            _ => unreachable!(),
        })
        .collect();
    let rays: Vec<Vec<GptVector>> = poly
        .iter()
        .map(|&i| effect_cone_rays(&atoms[i]))
        .collect::<Result<_>>()?;
    let dims = sys.atom_dims();

    let mut best: Option<(f64, Vec<usize>, QuantumMin)> = None;
    let mut exhaustive = true;
    for combo in cartesian(&rays.iter().map(Vec::len).collect::<Vec<_>>()) {
        let e = combo
            .iter()
            .enumerate()
            .fold(vec![1.0], |acc, (p, &r)| kron(&acc, rays[p][r].coeffs()));
        let w = contract(v.coeffs(), &dims, &poly, &e);
        let qm = minimize_quantum(&w, &qdims, cfg);
        exhaustive &= qm.exhaustive;
        if best.as_ref().is_none_or(|b| qm.value < b.0) {
            best = Some((qm.value, combo, qm));
        }
    }
    let (margin, combo, qm) = best.expect("at least one ray combination");

    if margin >= -cfg.tol {
        return Ok(if exhaustive {
            MembershipVerdict::Accepted { margin }
        } else {
            MembershipVerdict::InconclusiveAccept {
                margin,
                reason: "see-saw search over quantum factors is not exhaustive".into(),
            }
        });
    }

    let mut factors = Vec::with_capacity(atoms.len());
    let (mut pi, mut qi) = (0, 0);
    for (i, atom) in atoms.iter().enumerate() {
        if atom.is_polytopic() {
            factors.push(rays[pi][combo[pi]].clone());
            pi += 1;
        } else {
            factors.push(GptVector::new(SystemType::atom(*atom), qm.projectors[qi].clone())?);
            qi += 1;
        }
        debug_assert_eq!(factors[i].system(), &SystemType::atom(*atom));
    }
    Ok(MembershipVerdict::Rejected {
        margin,
        witness: Witness::ProductRay {
            ray: ProductEffectRay { factors },
            value: margin,
        },
    })
}

/// Builds the 9-coefficient `B_{2,2}·B_{2,2}` vector reproducing the
/// no-signalling box `p(a, b, x, y)` under the outcome effects.
pub fn gbit_pair_state<F: Fn(usize, usize, usize, usize) -> f64>(p: F) -> GptVector {
    let mut s = vec![0.0; 9];
    for x in 0..2 {
        for y in 0..2 {
            s[x * 3 + y] = p(0, 0, x, y);
        }
        s[x * 3 + 2] = p(0, 0, x, 0) + p(0, 1, x, 0);
    }
    for y in 0..2 {
        s[6 + y] = p(0, 0, 0, y) + p(1, 0, 0, y);
    }
    s[8] = 1.0;
    GptVector::new(SystemType::from_labels(&["B2,2", "B2,2"]).expect("labels"), s)
        .expect("nine coefficients")
}

/// The eight PR-type extreme points `½ δ(a⊕b = xy ⊕ αx ⊕ βy ⊕ γ)` of the
/// `B_{2,2}·B_{2,2}` state space.
pub fn gbit_pair_nonlocal_vertices() -> Vec<GptVector> {
    let mut out = Vec::with_capacity(8);
    for alpha in 0..2 {
        for beta in 0..2 {
            for gamma in 0..2 {
                out.push(gbit_pair_state(|a, b, x, y| {
                    if (a ^ b) == ((x & y) ^ (alpha & x) ^ (beta & y) ^ gamma) {
                        0.5
                    } else {
                        0.0
                    }
                }));
            }
        }
    }
    out
}

/// Complete list of normalized extreme states, for the polytopic
/// composites where it is known: products of vertices when at most one
/// atom is non-classical, plus the PR-type points for `B_{2,2}·B_{2,2}`.
pub fn known_extreme_states(system: &SystemType) -> Option<Vec<GptVector>> {
    if !system.is_polytopic() {
        return None;
    }
    let atoms = system.atoms();
    let gbit = AtomicSystem::Boxworld { n: 2, k: 2 };
    let non_classical = atoms.iter().filter(|a| !a.is_classical()).count();
    let is_gbit_pair = atoms == [gbit, gbit];
    if non_classical > 1 && !is_gbit_pair {
        return None;
    }
    let verts: Vec<Vec<GptVector>> = atoms.iter().map(|a| state_vertices(a).ok()).collect::<Option<_>>()?;
    let mut out: Vec<GptVector> = cartesian(&verts.iter().map(Vec::len).collect::<Vec<_>>())
        .into_iter()
        .map(|combo| {
            tensor_all(&combo.iter().enumerate().map(|(i, &j)| verts[i][j].clone()).collect::<Vec<_>>())
        })
        .map(|v| v.with_system(system.clone()).expect("same dimension"))
        .collect();
    if is_gbit_pair {
        out.extend(gbit_pair_nonlocal_vertices());
    }
    Some(out)
}

fn bounds_verdict(
    lo: (f64, Option<GptVector>),
    hi: (f64, Option<GptVector>),
    tol: f64,
    exhaustive: bool,
    reason: &str,
) -> MembershipVerdict {
    let margin = lo.0.min(1.0 - hi.0);
    if margin >= -tol {
        return if exhaustive {
            MembershipVerdict::Accepted { margin }
        } else {
            MembershipVerdict::InconclusiveAccept {
                margin,
                reason: reason.into(),
            }
        };
    }
    let (value, state) = if lo.0 < 1.0 - hi.0 { (lo.0, lo.1) } else { (hi.0, hi.1) };
    MembershipVerdict::Rejected {
        margin,
        witness: Witness::State {
            state: state.expect("violating state recorded"),
            value,
        },
    }
}

fn track(lo: &mut (f64, Option<GptVector>), hi: &mut (f64, Option<GptVector>), val: f64, s: &GptVector) {
    if val < lo.0 {
        *lo = (val, Some(s.clone()));
    }
    if val > hi.0 {
        *hi = (val, Some(s.clone()));
    }
}

fn check_certificate(
    e: &GptVector,
    cert: &SeparableDecomposition,
    tol: f64,
) -> Result<Option<MembershipVerdict>> {
    let atoms = e.system().atoms();
    let mut total = GptVector::zeros(e.system().clone());
    let mut weight_sum = 0.0;
    let mut margin = f64::INFINITY;
    for term in cert {
        if term.factors.len() != atoms.len()
            || term
                .factors
                .iter()
                .zip(atoms)
                .any(|(f, a)| f.system() != &SystemType::atom(*a))
        {
            return Err(Error::InvalidArgument(format!(
                "decomposition term does not factor over {}",
                e.system()
            )));
        }
        if term.weight < -tol {
            return Ok(None);
        }
        for f in &term.factors {
            let v = atomic_effect_check(f, tol)?;
            if !v.is_accepted() {
                return Ok(None);
            }
            margin = margin.min(v.margin());
        }
        weight_sum += term.weight;
        let prod = tensor_all(&term.factors).with_system(e.system().clone())?;
        total = total.add(&prod.scale(term.weight))?;
    }
    if weight_sum > 1.0 + tol || total.max_abs_diff(e) > tol {
        return Ok(None);
    }
    Ok(Some(MembershipVerdict::Accepted {
        margin: margin.min(1.0 - weight_sum),
    }))
}

/// Extremes of a linear functional over the normalized states seen by a
/// bounding procedure, with the states attaining them.
pub(crate) struct Bounds {
    pub lo: (f64, Option<GptVector>),
    pub hi: (f64, Option<GptVector>),
    pub exhaustive: bool,
}

impl Bounds {
    fn new(exhaustive: bool) -> Self {
        Bounds {
            lo: (f64::INFINITY, None),
            hi: (f64::NEG_INFINITY, None),
            exhaustive,
        }
    }

    fn track(&mut self, val: f64, s: &GptVector) {
        track(&mut self.lo, &mut self.hi, val, s);
    }
}

fn quantum_dim(a: &AtomicSystem) -> usize {
    match *a {
        AtomicSystem::Quantum(d) => d,
        _ => unreachable!("quantum atom expected"),
    }
}

/// Bounds `⟨e, s⟩` over normalized states `s`. Exact for atoms, for
/// composites with known extreme states, and for a single quantum atom
/// next to classical ones; sampled over product states otherwise.
pub(crate) fn functional_bounds(e: &GptVector, cfg: &SearchConfig) -> Result<Bounds> {
    let sys = e.system();
    let atoms = sys.atoms();
    if let [atom] = atoms {
        let mut b = Bounds::new(true);
        if let AtomicSystem::Quantum(_) = atom {
            let eig = vector_to_hermitian(e)?.eigh();
            for (val, psi) in [eig[0].clone(), eig[eig.len() - 1].clone()] {
                b.track(val, &hermitian_to_vector(&HermitianMatrix::projector(&psi)));
            }
        } else {
            for s in state_vertices(atom)? {
                b.track(dot(e.coeffs(), s.coeffs()), &s);
            }
        }
        return Ok(b);
    }
    if atoms.is_empty() {
        let mut b = Bounds::new(true);
        b.track(e.coeffs()[0], &GptVector::scalar(1.0));
        return Ok(b);
    }

    if let Some(states) = known_extreme_states(sys) {
        let mut b = Bounds::new(true);
        for s in &states {
            b.track(dot(e.coeffs(), s.coeffs()), s);
        }
        return Ok(b);
    }

    let non_classical: Vec<usize> = (0..atoms.len()).filter(|&i| !atoms[i].is_classical()).collect();
    let dims = sys.atom_dims();

    if let [q] = non_classical[..] {
        if atoms[q].is_quantum() {
            // classical vertices times the quantum atom: exact per vertex
            let cls: Vec<usize> = (0..atoms.len()).filter(|&i| i != q).collect();
            let verts: Vec<Vec<GptVector>> =
                cls.iter().map(|&i| state_vertices(&atoms[i])).collect::<Result<_>>()?;
            let d = quantum_dim(&atoms[q]);
            let mut b = Bounds::new(true);
            for combo in cartesian(&verts.iter().map(Vec::len).collect::<Vec<_>>()) {
                let pts: Vec<&GptVector> = combo.iter().enumerate().map(|(i, &j)| &verts[i][j]).collect();
                let cv = pts.iter().fold(vec![1.0], |acc, p| kron(&acc, p.coeffs()));
                let local = contract(e.coeffs(), &dims, &cls, &cv);
                let eig = vector_to_hermitian(&GptVector::new(SystemType::atom(atoms[q]), local)?)?.eigh();
                for (val, psi) in [eig[0].clone(), eig[d - 1].clone()] {
                    let proj = hermitian_to_vector(&HermitianMatrix::projector(&psi))
                        .with_system(SystemType::atom(atoms[q]))?;
                    let state = assemble_product(atoms, &cls, &pts, q, &proj, sys)?;
                    b.track(val, &state);
                }
            }
            return Ok(b);
        }
    }

    // polytopic vertex products times sampled pure product states
    let poly: Vec<usize> = (0..atoms.len()).filter(|&i| atoms[i].is_polytopic()).collect();
    let verts: Vec<Vec<GptVector>> = poly.iter().map(|&i| state_vertices(&atoms[i])).collect::<Result<_>>()?;
    let mut rng = cfg.rng();
    let samples = if poly.len() == atoms.len() { 1 } else { cfg.restarts.max(1) };
    let mut b = Bounds::new(false);
    for _ in 0..samples {
        let qstates: Vec<Option<GptVector>> = atoms
            .iter()
            .map(|a| match *a {
                AtomicSystem::Quantum(d) => Some(
                    hermitian_to_vector(&HermitianMatrix::projector(&random_pure_state(d, &mut rng))),
                ),
                _ => None,
            })
            .collect();
        for combo in cartesian(&verts.iter().map(Vec::len).collect::<Vec<_>>()) {
            let mut pi = 0;
            let factors: Vec<GptVector> = (0..atoms.len())
                .map(|i| match &qstates[i] {
                    Some(q) => q.clone(),
                    None => {
                        let v = verts[pi][combo[pi]].clone();
                        pi += 1;
                        v
                    }
                })
                .collect();
            let s = tensor_all(&factors).with_system(sys.clone())?;
            b.track(dot(e.coeffs(), s.coeffs()), &s);
        }
    }
    Ok(b)
}

/// Validity of an effect on a composite system.
///
/// A separable certificate whose weights sum to at most one and whose
/// factors are valid local effects proves validity exactly. Without one,
/// the effect is bounded on generating states: exactly when the extreme
/// states are known (at most one non-classical atom, or two gbits),
/// heuristically from sampled product states otherwise.
pub fn composite_effect_check(
    e: &GptVector,
    certificate: Option<&SeparableDecomposition>,
    cfg: &SearchConfig,
) -> Result<MembershipVerdict> {
    let sys = e.system();
    if sys.len() <= 1 {
        return atomic_effect_check(e, cfg.tol);
    }
    if let Some(cert) = certificate {
        if let Some(v) = check_certificate(e, cert, cfg.tol)? {
            return Ok(v);
        }
    }
    let b = functional_bounds(e, cfg)?;
    Ok(bounds_verdict(
        b.lo,
        b.hi,
        cfg.tol,
        b.exhaustive,
        "effect bounded only on sampled product states",
    ))
}

fn assemble_product(
    atoms: &[AtomicSystem],
    cls: &[usize],
    pts: &[&GptVector],
    q: usize,
    proj: &GptVector,
    sys: &SystemType,
) -> Result<GptVector> {
    let factors: Vec<GptVector> = (0..atoms.len())
        .map(|i| {
            if i == q {
                proj.clone()
            } else {
                let k = cls.iter().position(|&c| c == i).expect("classical index");
                pts[k].clone()
            }
        })
        .collect();
    tensor_all(&factors).with_system(sys.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::{outcome_effect, unit_effect, DEFAULT_TOL};
    use crate::hermitian::{c, operator_to_vector, CMatrix};

    fn b22() -> AtomicSystem {
        AtomicSystem::Boxworld { n: 2, k: 2 }
    }

    fn swap_half() -> GptVector {
        let mut m = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                m[(i * 2 + j, j * 2 + i)] = c(0.5, 0.0);
            }
        }
        operator_to_vector(&SystemType::from_labels(&["Q2", "Q2"]).unwrap(), &HermitianMatrix::new(m).unwrap())
            .unwrap()
    }

    fn fast_cfg() -> SearchConfig {
        SearchConfig::default().with_grid(40)
    }

    #[test]
    fn unit_effects_compose() {
        let a = SystemType::boxworld(2, 2);
        let b = SystemType::quantum(3);
        assert_eq!(
            tensor(&unit_effect(&a), &unit_effect(&b)),
            unit_effect(&a.compose(&b))
        );
        let v = GptVector::new(SystemType::classical(2), vec![0.3, 1.0]).unwrap();
        let t = tensor(&v, &GptVector::scalar(1.0));
        assert_eq!(t, v);
    }

    #[test]
    fn product_of_vertices_is_in_cone() {
        let vs = state_vertices(&b22()).unwrap();
        let p = tensor(&vs[1], &vs[2]);
        assert_eq!(p.len(), 9);
        assert!(composite_state_check(&p, &fast_cfg()).unwrap().is_accepted());
    }

    #[test]
    fn swap_is_block_positive_but_minus_projector_is_not() {
        let v = composite_state_check(&swap_half(), &fast_cfg()).unwrap();
        assert!(v.is_accepted());
        assert!(v.margin().abs() < 1e-7);

        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(-1.0, 0.0);
        let neg = operator_to_vector(&SystemType::from_labels(&["Q2", "Q2"]).unwrap(), &HermitianMatrix::new(m).unwrap())
            .unwrap();
        match composite_state_check(&neg, &fast_cfg()).unwrap() {
            MembershipVerdict::Rejected { margin, witness: Witness::ProductRay { ray, .. } } => {
                assert!((margin + 1.0).abs() < 1e-9);
                assert!((ray.to_vector().inner(&neg).unwrap() + 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn steering_swap_onto_zero() {
        let zero = hermitian_to_vector(&HermitianMatrix::diagonal(&[1.0, 0.0]));
        let out = steer(&swap_half(), &zero, &[1]).unwrap();
        let expect = hermitian_to_vector(&HermitianMatrix::diagonal(&[0.5, 0.0]));
        assert!(out.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn steering_a_product_with_unit_returns_factor() {
        let a = GptVector::new(SystemType::boxworld(2, 2), vec![0.2, 0.7, 1.0]).unwrap();
        let b = hermitian_to_vector(&HermitianMatrix::diagonal(&[0.25, 0.75]));
        let p = tensor(&a, &b);
        let red = steer(&p, &unit_effect(&SystemType::quantum(2)), &[1]).unwrap();
        assert!(red.max_abs_diff(&a) < 1e-15);
        assert!(steer(&p, &a, &[3]).is_err());
        assert!(steer(&p, &a, &[1]).is_err());
    }

    #[test]
    fn gbit_pair_corpus_has_pr_box() {
        let vs = gbit_pair_nonlocal_vertices();
        assert_eq!(vs.len(), 8);
        assert_eq!(vs[0].coeffs(), &[0.5, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 1.0]);
        for v in &vs {
            assert!(composite_state_check(v, &fast_cfg()).unwrap().is_accepted());
        }
        let sys = SystemType::new(vec![b22(), b22()]).unwrap();
        assert_eq!(known_extreme_states(&sys).unwrap().len(), 24);
    }

    #[test]
    fn effect_certificates() {
        let sys = SystemType::new(vec![b22(), b22()]).unwrap();
        let e00 = outcome_effect(&b22(), 0, 0).unwrap();
        let prod = tensor(&e00, &e00);
        let cert = vec![SeparableTerm { weight: 1.0, factors: vec![e00.clone(), e00.clone()] }];
        assert!(composite_effect_check(&prod, Some(&cert), &fast_cfg()).unwrap().is_accepted());
        assert!(composite_effect_check(&unit_effect(&sys), None, &fast_cfg()).unwrap().is_accepted());
        let big = prod.scale(1.5);
        match composite_effect_check(&big, None, &fast_cfg()).unwrap() {
            MembershipVerdict::Rejected { witness: Witness::State { state, value }, .. } => {
                assert!((value - 1.5).abs() < 1e-12);
                assert_eq!(state.coeffs()[0], 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad = vec![SeparableTerm { weight: 1.0, factors: vec![e00] }];
        assert!(composite_effect_check(&prod, Some(&bad), &fast_cfg()).is_err());
    }

    #[test]
    fn quantum_composite_effect_is_heuristic_without_certificate() {
        let sys = SystemType::from_labels(&["Q2", "Q2"]).unwrap();
        let u = unit_effect(&sys);
        let cfg = fast_cfg().with_restarts(20);
        assert!(composite_effect_check(&u, None, &cfg).unwrap().is_inconclusive());
        let cq = SystemType::from_labels(&["C2", "Q2"]).unwrap();
        assert!(composite_effect_check(&unit_effect(&cq), None, &cfg).unwrap().is_accepted());
        let over = unit_effect(&cq).scale(1.2);
        assert!(composite_effect_check(&over, None, &cfg).unwrap().is_rejected());
    }

    #[test]
    fn qutrit_pairs_fall_back_to_see_saw() {
        let sys = SystemType::from_labels(&["Q3", "Q3"]).unwrap();
        // identity minus 2 · (|00⟩⟨00|): negative on a product state
        let mut m = CMatrix::identity(9, 9);
        m[(0, 0)] = c(-1.0, 0.0);
        let v = operator_to_vector(&sys, &HermitianMatrix::new(m).unwrap()).unwrap();
        let cfg = SearchConfig::default().with_restarts(16);
        assert!(composite_state_check(&v, &cfg).unwrap().is_rejected());
        // the swap on two qutrits is block-positive but not PSD
        let mut s = CMatrix::zeros(9, 9);
        for i in 0..3 {
            for j in 0..3 {
                s[(i * 3 + j, j * 3 + i)] = c(1.0, 0.0);
            }
        }
        let w = operator_to_vector(&sys, &HermitianMatrix::new(s).unwrap()).unwrap();
        assert!(composite_state_check(&w, &cfg).unwrap().is_inconclusive());
        let _ = DEFAULT_TOL;
    }
}
