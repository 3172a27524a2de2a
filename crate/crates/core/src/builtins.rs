//! Named states and maps addressable as `builtin:<name>`.

use crate::atomic::unit_effect;
use crate::compose::gbit_pair_nonlocal_vertices;
use crate::hermitian::{c, operator_to_vector, CMatrix, HermitianMatrix};
use crate::protocols::singlet;
use crate::steering::default_gleason_witness;
use crate::system::SystemType;
use crate::vector::GptVector;

pub use crate::transforms::{builtin_map, BUILTIN_MAPS};

/// Names accepted by [`builtin_vector`].
pub const BUILTIN_VECTORS: &[&str] = &["s-pr", "swap2", "singlet", "singlet-pt", "ghz-pt", "unit-gbit-pair"];

/// `SWAP/d` on `Qd·Qd`: unit trace, eigenvalues `±1/d`.
pub fn swap_state(d: usize) -> GptVector {
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = c(1.0 / d as f64, 0.0);
        }
    }
    let sys = SystemType::new(vec![crate::AtomicSystem::Quantum(d); 2]).expect("two atoms");
    operator_to_vector(&sys, &HermitianMatrix::new(m).expect("real symmetric")).expect("square operator")
}

/// The singlet with its first factor transposed.
pub fn singlet_partial_transpose() -> GptVector {
    let rho = HermitianMatrix::projector(&crate::protocols::singlet_ket())
        .partial_transpose(&[2, 2], 0)
        .expect("two qubits");
    operator_to_vector(&SystemType::from_labels(&["Q2", "Q2"]).expect("labels"), &rho).expect("two qubits")
}

/// Named states, plus the unit effect of a gbit pair.
pub fn builtin_vector(name: &str) -> Option<GptVector> {
    Some(match name {
        "s-pr" => gbit_pair_nonlocal_vertices().swap_remove(0),
        "swap2" => swap_state(2),
        "singlet" => singlet(),
        "singlet-pt" => singlet_partial_transpose(),
        "ghz-pt" => default_gleason_witness(),
        "unit-gbit-pair" => unit_effect(&SystemType::from_labels(&["B2,2", "B2,2"]).expect("labels")),
        _ => return None,
    })
}
