//! Atomic state spaces: unit effects, exact validity tests, vertices and
//! dual extreme rays.
//!
//! Classical `C_v` coordinates hold the weights of outcomes `0..v-1` followed
//! by the normalization; outcome `v-1` is the implicit complement. Boxworld
//! `B_{n,k}` stacks `n` such blocks of `k-1` weights in front of one shared
//! normalization coordinate.

use crate::error::{Error, Result};
use crate::hermitian::vector_to_hermitian;
use crate::system::{AtomicSystem, SystemType};
use crate::vector::{dot, kron, GptVector};
use crate::verdict::{MembershipVerdict, Witness};

/// Default membership tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

fn atomic_unit_coeffs(atom: &AtomicSystem) -> Vec<f64> {
    let n = atom.dimension();
    let mut u = vec![0.0; n];
    match *atom {
        AtomicSystem::Quantum(d) => u[0] = (d as f64).sqrt(),
        _ => u[n - 1] = 1.0,
    }
    u
}

/// Riesz vector of the unit effect; Kronecker product over the atoms.
pub fn unit_effect(system: &SystemType) -> GptVector {
    let coeffs = system
        .atoms()
        .iter()
        .fold(vec![1.0], |acc, a| kron(&acc, &atomic_unit_coeffs(a)));
    GptVector::new(system.clone(), coeffs).expect("unit effect has system dimension")
}

/// Deterministic classical state for outcome `i` of `C_v`.
pub fn classical_point(v: usize, i: usize) -> Result<GptVector> {
    if i >= v {
        return Err(Error::InvalidArgument(format!("outcome {i} out of range for C{v}")));
    }
    let mut coeffs = vec![0.0; v];
    coeffs[v - 1] = 1.0;
    if i < v - 1 {
        coeffs[i] = 1.0;
    }
    GptVector::new(SystemType::classical(v), coeffs)
}

/// Effect reading outcome `i` from `C_v`.
pub fn classical_outcome_effect(v: usize, i: usize) -> Result<GptVector> {
    outcome_effect(&AtomicSystem::Classical(v), 0, i)
}

/// The effect `e_{j|i}` for outcome `j` of measurement `i` on a polytopic
/// atom. A classical atom has the single measurement `0`.
pub fn outcome_effect(atom: &AtomicSystem, measurement: usize, outcome: usize) -> Result<GptVector> {
    let (n, k) = match *atom {
        AtomicSystem::Classical(v) => (1, v),
        AtomicSystem::Boxworld { n, k } => (n, k),
        AtomicSystem::Quantum(_) => {
            return Err(Error::Unsupported(
                "quantum outcome effects are not a finite family".into(),
            ))
        }
    };
    if measurement >= n || outcome >= k {
        return Err(Error::InvalidArgument(format!(
            "outcome {outcome} of measurement {measurement} out of range for {atom}"
        )));
    }
    let dim = atom.dimension();
    let mut e = vec![0.0; dim];
    let block = measurement * (k - 1);
    if outcome < k - 1 {
        e[block + outcome] = 1.0;
    } else {
        e[dim - 1] = 1.0;
        for j in 0..k - 1 {
            e[block + j] = -1.0;
        }
    }
    GptVector::new(SystemType::atom(*atom), e)
}

/// Extreme points of the normalized state space of a polytopic atom.
///
/// Boxworld vertices are listed lexicographically in the outcome
/// assignment, measurement 0 most significant.
pub fn state_vertices(atom: &AtomicSystem) -> Result<Vec<GptVector>> {
    match *atom {
        AtomicSystem::Classical(v) => (0..v).map(|i| classical_point(v, i)).collect(),
        AtomicSystem::Boxworld { n, k } => {
            let dim = atom.dimension();
            let count = k.pow(n as u32);
            let mut out = Vec::with_capacity(count);
            for code in 0..count {
                let mut coeffs = vec![0.0; dim];
                coeffs[dim - 1] = 1.0;
                let mut rest = code;
                for i in (0..n).rev() {
                    let o = rest % k;
                    rest /= k;
                    if o < k - 1 {
                        coeffs[i * (k - 1) + o] = 1.0;
                    }
                }
                out.push(GptVector::new(SystemType::atom(*atom), coeffs)?);
            }
            Ok(out)
        }
        AtomicSystem::Quantum(_) => Err(Error::Unsupported(
            "quantum state spaces have a continuum of extreme points".into(),
        )),
    }
}

/// Extreme rays of the dual of the state cone, i.e. the outcome effects.
///
/// Ordered by measurement, then outcome. A Boxworld atom with no
/// measurements has the unit effect as its only ray.
pub fn effect_cone_rays(atom: &AtomicSystem) -> Result<Vec<GptVector>> {
    let (n, k) = match *atom {
        AtomicSystem::Classical(v) => (1, v),
        AtomicSystem::Boxworld { n, k } => (n, k),
        AtomicSystem::Quantum(_) => {
            return Err(Error::Unsupported(
                "quantum effect rays are the rank-1 projectors; use the composite search".into(),
            ))
        }
    };
    if n == 0 {
        return Ok(vec![unit_effect(&SystemType::atom(*atom))]);
    }
    let mut rays = Vec::with_capacity(n * k);
    for i in 0..n {
        for j in 0..k {
            rays.push(outcome_effect(atom, i, j)?);
        }
    }
    Ok(rays)
}

fn single_atom(v: &GptVector) -> Result<AtomicSystem> {
    match v.system().atoms() {
        [a] => Ok(*a),
        _ => Err(Error::WrongSystem {
            expected: "a single atom".into(),
            found: v.system().to_string(),
        }),
    }
}

fn ray_label(atom: &AtomicSystem, idx: usize) -> String {
    match *atom {
        AtomicSystem::Classical(_) => format!("p({idx}) >= 0"),
        AtomicSystem::Boxworld { n: 0, .. } => "normalization >= 0".into(),
        AtomicSystem::Boxworld { k, .. } => format!("p({}|{}) >= 0", idx % k, idx / k),
        AtomicSystem::Quantum(_) => unreachable!(),
    }
}

/// State-cone margin of a single-atom vector: the minimum eigenvalue for
/// quantum atoms, the minimum outcome weight otherwise.
pub(crate) fn atomic_state_margin(atom: &AtomicSystem, coeffs: &[f64]) -> (f64, usize) {
    match atom {
        AtomicSystem::Quantum(_) => {
            let v = GptVector::new(SystemType::atom(*atom), coeffs.to_vec()).expect("shape");
            (vector_to_hermitian(&v).expect("quantum").min_eigenvalue(), 0)
        }
        _ => {
            let mut best = (f64::INFINITY, 0);
            for (i, r) in effect_cone_rays(atom).expect("polytopic").iter().enumerate() {
                let x = dot(r.coeffs(), coeffs);
                if x < best.0 {
                    best = (x, i);
                }
            }
            best
        }
    }
}

/// Exact membership of a single-atom vector in its state cone.
pub fn atomic_state_check(v: &GptVector, tol: f64) -> Result<MembershipVerdict> {
    let atom = single_atom(v)?;
    let (margin, idx) = atomic_state_margin(&atom, v.coeffs());
    if margin >= -tol {
        return Ok(MembershipVerdict::Accepted { margin });
    }
    let witness = match atom {
        AtomicSystem::Quantum(_) => Witness::Eigenvalue { value: margin },
        _ => Witness::Inequality {
            description: ray_label(&atom, idx),
            value: margin,
        },
    };
    Ok(MembershipVerdict::Rejected { margin, witness })
}

/// Exact validity of a single-atom effect: `0 ≤ e(s) ≤ 1` on all states.
pub fn atomic_effect_check(e: &GptVector, tol: f64) -> Result<MembershipVerdict> {
    let atom = single_atom(e)?;
    let (lo, hi, worst_state) = match atom {
        AtomicSystem::Quantum(_) => {
            let ev = vector_to_hermitian(e)?.eigenvalues();
            (ev[0], *ev.last().expect("nonempty"), None)
        }
        _ => {
            let verts = state_vertices(&atom)?;
            let vals: Vec<f64> = verts.iter().map(|s| dot(e.coeffs(), s.coeffs())).collect();
            let (imin, lo) = vals.iter().copied().enumerate().fold((0, f64::INFINITY), |acc, (i, x)| {
                if x < acc.1 { (i, x) } else { acc }
            });
            let (imax, hi) = vals.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, x)| {
                if x > acc.1 { (i, x) } else { acc }
            });
            let pick = if lo < 1.0 - hi { imin } else { imax };
            (lo, hi, Some(verts[pick].clone()))
        }
    };
    let margin = lo.min(1.0 - hi);
    if margin >= -tol {
        return Ok(MembershipVerdict::Accepted { margin });
    }
    let value = if lo < 1.0 - hi { lo } else { hi };
    let witness = match worst_state {
        Some(state) => Witness::State { state, value },
        None => Witness::Eigenvalue { value },
    };
    Ok(MembershipVerdict::Rejected { margin, witness })
}

/// Relabels a classical `C_v` vector as the isomorphic Boxworld `B_{1,v}`.
pub fn classical_as_boxworld(v: &GptVector) -> Result<GptVector> {
    match single_atom(v)? {
        AtomicSystem::Classical(n) if n >= 2 => v.clone().with_system(SystemType::boxworld(1, n)),
        other => Err(Error::WrongSystem {
            expected: "a classical atom with at least two outcomes".into(),
            found: other.to_string(),
        }),
    }
}

/// Inverse of [`classical_as_boxworld`].
pub fn boxworld_as_classical(v: &GptVector) -> Result<GptVector> {
    match single_atom(v)? {
        AtomicSystem::Boxworld { n: 1, k } => v.clone().with_system(SystemType::classical(k)),
        other => Err(Error::WrongSystem {
            expected: "a single-measurement Boxworld atom".into(),
            found: other.to_string(),
        }),
    }
}
