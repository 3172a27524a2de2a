mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use witworld::atomic::{outcome_effect, state_vertices, unit_effect};
use witworld::compose::{composite_state_check, known_extreme_states, tensor};
use witworld::hermitian::{operator_to_vector, HermitianMatrix};
use witworld::steering::{assemblage_from_realization, ns_check_multipartite, BobStage, ControlledMeasurement};
use witworld::{AtomicSystem, GptVector, SearchConfig, SystemType};

/// Dyadic coefficients keep every product exact.
fn vec_on(label: &str, raw: &[i32]) -> GptVector {
    let sys = SystemType::from_labels(&[label]).unwrap();
    let d = sys.dimension();
    GptVector::new(sys, raw[..d].iter().map(|&k| k as f64 / 8.0).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn tensor_is_associative(
        a in prop::collection::vec(-16i32..16, 4),
        b in prop::collection::vec(-16i32..16, 5),
        c in prop::collection::vec(-16i32..16, 3),
    ) {
        let (a, b, c) = (vec_on("Q2", &a), vec_on("B2,3", &b), vec_on("C3", &c));
        let left = tensor(&tensor(&a, &b), &c);
        let right = tensor(&a, &tensor(&b, &c));
        prop_assert_eq!(left, right);
    }
}

#[test]
fn quantum_states_are_accepted() {
    let cfg = SearchConfig::default().with_grid(60);
    let sys = SystemType::from_labels(&["Q2", "Q2"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let rho = random_density(4, &mut rng);
        let v = operator_to_vector(&sys, &HermitianMatrix::new((&rho + rho.adjoint()).unscale(2.0)).unwrap()).unwrap();
        assert!(composite_state_check(&v, &cfg).unwrap().is_accepted());
    }
}

#[test]
fn entangled_projector_complement_is_rejected() {
    // product states overlap |Φ⁺⟩ by at most ½, so I − 3Φ⁺ bottoms out at −½
    let cfg = SearchConfig::default().with_grid(60);
    let sys = SystemType::from_labels(&["Q2", "Q2"]).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let phi = ket_projector(&[c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]);
    let w = witworld::hermitian::CMatrix::identity(4, 4) - phi.scale(3.0);
    let v = operator_to_vector(&sys, &HermitianMatrix::new(w).unwrap()).unwrap();
    let verdict = composite_state_check(&v, &cfg).unwrap();
    assert!(verdict.is_rejected());
    assert!((verdict.margin() + 0.5).abs() < 1e-6, "{verdict:?}");
}

fn random_measurement<R: Rng>(rng: &mut R) -> ControlledMeasurement {
    let gbit = AtomicSystem::Boxworld { n: 2, k: 2 };
    // each setting coarse-grains a random mixture of the two fiducial measurements
    let rows: Vec<Vec<GptVector>> = (0..2)
        .map(|_| {
            let m = rng.random_range(0..2);
            let flip = rng.random_bool(0.5);
            let (e0, e1) = (outcome_effect(&gbit, m, 0).unwrap(), outcome_effect(&gbit, m, 1).unwrap());
            let noise: f64 = rng.random_range(0.0..0.3);
            let u = unit_effect(&SystemType::atom(gbit)).scale(0.5 * noise);
            let mut a = e0.scale(1.0 - noise).add(&u).unwrap();
            let mut b = e1.scale(1.0 - noise).add(&u).unwrap();
            if flip {
                std::mem::swap(&mut a, &mut b);
            }
            vec![a, b]
        })
        .collect();
    ControlledMeasurement::from_effects(&rows, 1e-9).unwrap()
}

#[test]
fn realization_soundness_on_gbit_pairs_with_a_qubit() {
    let cfg = SearchConfig::default();
    let pair = SystemType::from_labels(&["B2,2", "B2,2"]).unwrap();
    let gens = known_extreme_states(&pair).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let mut shared = GptVector::zeros(SystemType::from_labels(&["B2,2", "B2,2", "Q2"]).unwrap());
        let weights: Vec<f64> = (0..4).map(|_| rng.random()).collect();
        let total: f64 = weights.iter().sum();
        for w in weights {
            let g = &gens[rng.random_range(0..gens.len())];
            let rho = op_vector(&random_density(2, &mut rng));
            shared = shared.add(&tensor(g, &rho).scale(w / total)).unwrap();
        }
        let ms = [random_measurement(&mut rng), random_measurement(&mut rng)];
        let asm = assemblage_from_realization(&shared, &ms, &BobStage::None, &cfg).unwrap();
        for (_, e) in asm.iter() {
            let m = witworld::hermitian::vector_to_operator(e).unwrap();
            assert!(m.min_eigenvalue() >= -1e-12);
        }
        assert!(ns_check_multipartite(&asm, 1e-9).unwrap().is_accepted());
    }
}

#[test]
fn product_vertices_are_known_extreme_states() {
    let sys = SystemType::from_labels(&["C2", "B2,2"]).unwrap();
    let ext = known_extreme_states(&sys).unwrap();
    let c2 = state_vertices(&AtomicSystem::Classical(2)).unwrap();
    let b22 = state_vertices(&AtomicSystem::Boxworld { n: 2, k: 2 }).unwrap();
    assert_eq!(ext.len(), 8);
    for a in &c2 {
        for b in &b22 {
            assert!(ext.contains(&tensor(a, b)));
        }
    }
    assert!(known_extreme_states(&SystemType::from_labels(&["B2,2", "B2,3"]).unwrap()).is_none());
}
