//! The PR box in `B_{2,2}·B_{2,2}`, the CHSH functional, and one-bit remote
//! state preparation with a controlled universal-NOT.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::atomic::{classical_outcome_effect, outcome_effect, unit_effect};
use crate::compose::{gbit_pair_nonlocal_vertices, steer};
use crate::error::{Error, Result};
use crate::json::matrix_to_json;
use crate::hermitian::{c, hermitian_to_vector, operator_to_vector, trace_distance, vector_to_hermitian, CMatrix, HermitianMatrix};
use crate::search::bloch_state;
use crate::steering::{assemblage_from_realization, Assemblage, BobStage, ControlledMeasurement};
use crate::search::SearchConfig;
use crate::system::{AtomicSystem, SystemType};
use crate::transforms::{
    compose_par, compose_seq, computational_measurement, controlled_map, copy_map, unitary_map, unot_map,
    LinearMap,
};
use crate::vector::GptVector;

/// The PR state with the local measurements that reveal PR correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct PrBoxKit {
    pub s_pr: GptVector,
    /// `alice_effects[x][a]` is `ẽ_{a|x}`.
    pub alice_effects: [[GptVector; 2]; 2],
    pub bob_effects: [[GptVector; 2]; 2],
}

impl Default for PrBoxKit {
    fn default() -> Self {
        PrBoxKit::new()
    }
}

impl PrBoxKit {
    pub fn new() -> Self {
        let gbit = AtomicSystem::Boxworld { n: 2, k: 2 };
        let e = |x, a| outcome_effect(&gbit, x, a).expect("gbit effect");
        let effects = [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]];
        PrBoxKit {
            s_pr: gbit_pair_nonlocal_vertices().swap_remove(0),
            alice_effects: effects.clone(),
            bob_effects: effects,
        }
    }

    /// `M_PR`, Alice's setting-controlled measurement.
    pub fn alice_measurement(&self) -> ControlledMeasurement {
        let rows: Vec<Vec<GptVector>> = self.alice_effects.iter().map(|r| r.to_vec()).collect();
        ControlledMeasurement::from_effects(&rows, 1e-12).expect("valid gbit measurement")
    }

    /// `M'_PR`, Bob's setting-controlled measurement.
    pub fn bob_measurement(&self) -> ControlledMeasurement {
        let rows: Vec<Vec<GptVector>> = self.bob_effects.iter().map(|r| r.to_vec()).collect();
        ControlledMeasurement::from_effects(&rows, 1e-12).expect("valid gbit measurement")
    }
}

/// `⟨ẽ_{a|x} ⊗ ẽ_{b|y}, s_PR⟩`.
pub fn pr_box_probability(kit: &PrBoxKit, a: usize, b: usize, x: usize, y: usize) -> f64 {
    let e = crate::compose::tensor(&kit.alice_effects[x][a], &kit.bob_effects[y][b]);
    e.coeffs().iter().zip(kit.s_pr.coeffs()).map(|(p, q)| p * q).sum()
}

/// `Σ_xy (−1)^{xy} Σ_ab (−1)^{a⊕b} p(ab|xy)` for a binary box.
pub fn chsh_value<F: Fn(usize, usize, usize, usize) -> f64>(p: F, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let mut norm = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    let v = p(a, b, x, y);
                    if v < -tol {
                        return Err(Error::InvalidArgument(format!("p({a}{b}|{x}{y}) = {v} is negative")));
                    }
                    norm += v;
                    let sign = if (a ^ b ^ (x & y)) == 0 { 1.0 } else { -1.0 };
                    total += sign * v;
                }
            }
            if (norm - 1.0).abs() > tol {
                return Err(Error::InvalidArgument(format!("p(··|{x}{y}) sums to {norm}")));
            }
        }
    }
    Ok(total)
}

/// Best CHSH value over the 16 deterministic local strategies, with the
/// strategy `(a(0), a(1), b(0), b(1))` attaining it.
pub fn best_deterministic_chsh() -> (f64, [usize; 4]) {
    let mut best = (f64::NEG_INFINITY, [0; 4]);
    for code in 0..16usize {
        let s = [code >> 3 & 1, code >> 2 & 1, code >> 1 & 1, code & 1];
        let v = chsh_value(
            |a, b, x, y| if a == s[x] && b == s[2 + y] { 1.0 } else { 0.0 },
            0.0,
        )
        .expect("deterministic boxes are normalized");
        if v > best.0 {
            best = (v, s);
        }
    }
    best
}

/// `(|01⟩ − |10⟩)/√2`.
pub fn singlet_ket() -> Vec<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(0.0, 0.0), c(r, 0.0), c(-r, 0.0), c(0.0, 0.0)]
}

/// The singlet as a `Q2·Q2` state.
pub fn singlet() -> GptVector {
    operator_to_vector(&SystemType::from_labels(&["Q2", "Q2"]).expect("labels"), &HermitianMatrix::projector(&singlet_ket()))
        .expect("two qubits")
}

/// `(−ψ̄₁, ψ̄₀)`, orthogonal to `ψ`.
pub fn orthogonal_qubit(psi: &[Complex64]) -> [Complex64; 2] {
    [-psi[1].conj(), psi[0].conj()]
}

/// `U_ψ = |0⟩⟨ψ^⊥| + |1⟩⟨ψ|`.
pub fn u_psi(psi: &[Complex64]) -> CMatrix {
    let perp = orthogonal_qubit(psi);
    CMatrix::from_fn(2, 2, |i, j| if i == 0 { perp[j].conj() } else { psi[j].conj() })
}

fn check_qubit(psi: &[Complex64]) -> Result<()> {
    let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if psi.len() != 2 || (n - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "expected a unit vector in C^2, got {} amplitudes with norm² {n}",
            psi.len()
        )));
    }
    Ok(())
}

/// One measurement outcome of the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct RspBranch {
    pub a: usize,
    pub weight: f64,
    /// Bob's subnormalized state before the correction.
    pub pre_correction: GptVector,
    /// After the controlled universal-NOT.
    pub post_correction: GptVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RspRun {
    pub psi: [Complex64; 2],
    pub branches: Vec<RspBranch>,
    pub output: GptVector,
    pub bits_sent: usize,
    pub trace_distance: f64,
}

impl RspRun {
    /// `{"psi", "branches", "output", "trace_distance", "bits_sent"}` with
    /// operators in matrix form.
    pub fn report_json(&self) -> Value {
        let mat = |v: &GptVector| matrix_to_json(&vector_to_hermitian(v).expect("qubit"));
        let branches: Vec<Value> = self
            .branches
            .iter()
            .map(|b| {
                json!({
                    "a": b.a,
                    "weight": b.weight,
                    "pre_correction": mat(&b.pre_correction),
                    "post_correction": mat(&b.post_correction),
                })
            })
            .collect();
        json!({
            "psi": {
                "re": [self.psi[0].re, self.psi[1].re],
                "im": [self.psi[0].im, self.psi[1].im],
            },
            "branches": branches,
            "output": mat(&self.output),
            "trace_distance": self.trace_distance,
            "bits_sent": self.bits_sent,
        })
    }
}

/// Controlled universal-NOT `Classical(2)·Q2 → Q2`.
pub fn cunot() -> LinearMap {
    controlled_map(&[LinearMap::identity(&SystemType::quantum(2)), unot_map(2)]).expect("same shapes")
}

/// Runs the protocol on a singlet: Alice applies `U_ψ`, measures in the
/// computational basis and sends the bit; Bob applies universal-NOT when
/// the bit is 1.
pub fn rsp_run(psi: &[Complex64]) -> Result<RspRun> {
    check_qubit(psi)?;
    let psi = [psi[0], psi[1]];
    let q2 = SystemType::quantum(2);
    let c2 = SystemType::classical(2);
    let id_q = LinearMap::identity(&q2);
    let shared = singlet();

    let rotated = compose_par(&unitary_map(&u_psi(&psi))?, &id_q).apply(&shared)?;
    let measured = compose_par(&computational_measurement(2), &id_q).apply(&rotated)?;
    // copy the bit so Bob can condition on it and it stays on record
    let keep_bit = compose_seq(
        &compose_par(&LinearMap::identity(&c2), &cunot()),
        &compose_par(&copy_map(2), &id_q),
    )?;
    let corrected = keep_bit.apply(&measured)?;
    let output = steer(&corrected, &unit_effect(&c2), &[0])?;

    let mut branches = Vec::with_capacity(2);
    for a in 0..2 {
        let oa = classical_outcome_effect(2, a)?;
        let pre = steer(&measured, &oa, &[0])?;
        let post = steer(&corrected, &oa, &[0])?;
        branches.push(RspBranch {
            a,
            weight: unit_effect(&q2).inner(&pre)?,
            pre_correction: pre,
            post_correction: post,
        });
    }
    let target = HermitianMatrix::projector(&psi);
    let td = trace_distance(&vector_to_hermitian(&output)?, &target);
    Ok(RspRun {
        psi,
        branches,
        output,
        bits_sent: 1,
        trace_distance: td,
    })
}

/// Alice's controlled measurement on the singlet share: setting `i`
/// measures `{U_ψᵢ† |a⟩⟨a| U_ψᵢ}`.
fn rsp_measurement(grid: &[[Complex64; 2]]) -> Result<ControlledMeasurement> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("the state grid is empty".into()));
    }
    let rows = grid
        .iter()
        .map(|psi| {
            check_qubit(psi)?;
            let perp = orthogonal_qubit(psi);
            Ok(vec![
                hermitian_to_vector(&HermitianMatrix::projector(&perp)),
                hermitian_to_vector(&HermitianMatrix::projector(psi)),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    ControlledMeasurement::from_effects(&rows, 1e-9)
}

/// Bob-with-input assemblage `σ_{a|ψ,y}`: the `a`-branch with universal-NOT
/// applied when `y = 1`.
pub fn rsp_bwi_assemblage(grid: &[[Complex64; 2]]) -> Result<Assemblage> {
    let m = rsp_measurement(grid)?;
    assemblage_from_realization(&singlet(), &[m], &BobStage::WithInput(cunot()), &SearchConfig::default())
}

/// Instrumental assemblage `σ_{a|ψ}`: Alice's bit is copied into Bob's
/// correction, so each element is the corrected branch `½|ψ⟩⟨ψ|`.
pub fn rsp_as_assemblage(grid: &[[Complex64; 2]]) -> Result<Assemblage> {
    let m = rsp_measurement(grid)?;
    assemblage_from_realization(&singlet(), &[m], &BobStage::Instrumental(cunot()), &SearchConfig::default())
}

/// `n` points spread over the Bloch sphere on a golden-angle spiral.
pub fn bloch_grid(n: usize) -> Vec<[Complex64; 2]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            bloch_state(z.acos(), golden * i as f64)
        })
        .collect()
}

/// Largest trace distance between `Σ_a σ_{a|ψ}` and `|ψ⟩⟨ψ|` over the grid.
pub fn rsp_assemblage_deviation(asm: &Assemblage, grid: &[[Complex64; 2]]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (x, psi) in grid.iter().enumerate() {
        let total = asm.element(&[0], &[x], None)?.add(asm.element(&[1], &[x], None)?)?;
        worst = worst.max(trace_distance(&vector_to_hermitian(&total)?, &HermitianMatrix::projector(psi)));
    }
    Ok(worst)
}
