//! Realizations of the post-quantum example assemblages.

use num_complex::Complex64;

use super::{assemblage_from_realization, Assemblage, BobStage, ControlledMeasurement};
use crate::compose::tensor;
use crate::error::{Error, Result};
use crate::hermitian::{c, hermitian_to_vector, operator_to_vector, pauli_x, pauli_y, pauli_z, CMatrix, HermitianMatrix};
use crate::protocols::PrBoxKit;
use crate::search::SearchConfig;
use crate::system::SystemType;
use crate::transforms::{compose_seq, controlled_map, preparation_map, transpose_map, LinearMap};
use crate::vector::GptVector;

/// Names accepted by [`named_assemblage`].
pub const NAMED_ASSEMBLAGES: &[&str] = &["pr-box", "bwi-star", "gleason", "bwi-star-star", "instrumental-star"];

fn ket_projector(b: usize) -> GptVector {
    let mut d = [0.0; 2];
    d[b] = 1.0;
    hermitian_to_vector(&HermitianMatrix::diagonal(&d))
}

/// Two black-box parties share a PR state and Bob holds `I/2`.
pub fn pr_box_assemblage(cfg: &SearchConfig) -> Result<Assemblage> {
    let kit = PrBoxKit::new();
    let shared = tensor(&kit.s_pr, &hermitian_to_vector(&HermitianMatrix::identity(2).scale(0.5)));
    assemblage_from_realization(
        &shared,
        &[kit.alice_measurement(), kit.bob_measurement()],
        &BobStage::None,
        cfg,
    )
}

/// Alice measures her half of a PR state; Bob's device measures the other
/// half with his input and prepares `|b⟩⟨b|` from the outcome.
pub fn bwi_star(cfg: &SearchConfig) -> Result<Assemblage> {
    let kit = PrBoxKit::new();
    let prep = preparation_map(&[ket_projector(0), ket_projector(1)], cfg.tol)?;
    let device = compose_seq(&prep, kit.bob_measurement().map())?;
    assemblage_from_realization(&kit.s_pr, &[kit.alice_measurement()], &BobStage::WithInput(device), cfg)
}

/// Setting-controlled two-outcome measurements `{(I ± P)/2}`.
pub fn pauli_measurements(paulis: &[CMatrix]) -> Result<ControlledMeasurement> {
    let id = HermitianMatrix::identity(2);
    let rows = paulis
        .iter()
        .map(|p| {
            let h = HermitianMatrix::new(p.clone())?;
            Ok(vec![
                hermitian_to_vector(&id.add(&h).scale(0.5)),
                hermitian_to_vector(&id.sub(&h).scale(0.5)),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    ControlledMeasurement::from_effects(&rows, 1e-9)
}

/// Steering from a normalized entanglement witness `witness` under local
/// quantum measurements on all but the last factor.
pub fn gleason(witness: &GptVector, measurements: &[ControlledMeasurement], cfg: &SearchConfig) -> Result<Assemblage> {
    if !witness.system().is_all_quantum() {
        return Err(Error::WrongSystem {
            expected: "an all-quantum composite".into(),
            found: witness.system().to_string(),
        });
    }
    if measurements.iter().any(|m| !m.system().is_all_quantum()) {
        return Err(Error::InvalidArgument("Gleason assemblages use quantum measurements".into()));
    }
    assemblage_from_realization(witness, measurements, &BobStage::None, cfg)
        .map_err(|e| Error::InvalidArgument(format!("invalid witness: {e}")))
}

/// `(|GHZ⟩⟨GHZ|)^{T_A}` on three qubits, normalized and not positive.
pub fn default_gleason_witness() -> GptVector {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut ghz = vec![c(0.0, 0.0); 8];
    ghz[0] = c(r, 0.0);
    ghz[7] = c(r, 0.0);
    let w = HermitianMatrix::projector(&ghz)
        .partial_transpose(&[2, 2, 2], 0)
        .expect("three qubits");
    operator_to_vector(&SystemType::from_labels(&["Q2", "Q2", "Q2"]).expect("labels"), &w).expect("three qubits")
}

fn phi_plus() -> GptVector {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let ket: Vec<Complex64> = vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)];
    operator_to_vector(&SystemType::from_labels(&["Q2", "Q2"]).expect("labels"), &HermitianMatrix::projector(&ket))
        .expect("two qubits")
}

/// Pauli measurements of `Σ_xᵀ` on `|Φ⁺⟩`, which steer Bob to
/// `(I + (−1)^a Σ_x)/4`.
fn sigma_bar_ingredients() -> Result<(GptVector, ControlledMeasurement)> {
    let m = pauli_measurements(&[pauli_x().transpose(), pauli_y().transpose(), pauli_z().transpose()])?;
    Ok((phi_plus(), m))
}

fn controlled_transpose() -> LinearMap {
    controlled_map(&[LinearMap::identity(&SystemType::quantum(2)), transpose_map(2)]).expect("same shapes")
}

/// The quantum assemblage `(I + (−1)^a Σ_x)/4` followed by a transpose
/// controlled on Bob's input.
pub fn bwi_star_star(cfg: &SearchConfig) -> Result<Assemblage> {
    let (shared, m) = sigma_bar_ingredients()?;
    assemblage_from_realization(&shared, &[m], &BobStage::WithInput(controlled_transpose()), cfg)
}

/// As [`bwi_star_star`], with a copy of Alice's outcome wired into the
/// controlled transpose.
pub fn instrumental_star(cfg: &SearchConfig) -> Result<Assemblage> {
    let (shared, m) = sigma_bar_ingredients()?;
    assemblage_from_realization(&shared, &[m], &BobStage::Instrumental(controlled_transpose()), cfg)
}

/// Builds a named example; `gleason` uses [`default_gleason_witness`]
/// with Pauli X and Z measurements for both black-box parties.
pub fn named_assemblage(name: &str, cfg: &SearchConfig) -> Result<Assemblage> {
    match name {
        "pr-box" => pr_box_assemblage(cfg),
        "bwi-star" => bwi_star(cfg),
        "gleason" => {
            let m = pauli_measurements(&[pauli_x(), pauli_z()])?;
            gleason(&default_gleason_witness(), &[m.clone(), m], cfg)
        }
        "bwi-star-star" => bwi_star_star(cfg),
        "instrumental-star" => instrumental_star(cfg),
        _ => Err(Error::InvalidArgument(format!(
            "unknown assemblage {name:?}; expected one of {}",
            NAMED_ASSEMBLAGES.join(", ")
        ))),
    }
}
