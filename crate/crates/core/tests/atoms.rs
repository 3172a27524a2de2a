mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use witworld::atomic::{atomic_state_check, effect_cone_rays, state_vertices, unit_effect};
use witworld::hermitian::{hermitian_to_vector, vector_to_hermitian, HermitianMatrix};
use witworld::lp::{solve_feasibility, Feasibility};
use witworld::{AtomicSystem, GptVector, SystemType};

fn polytopic_atoms() -> Vec<AtomicSystem> {
    let mut out: Vec<AtomicSystem> = (1..=3).map(AtomicSystem::Classical).collect();
    for n in 1..=3 {
        for k in 1..=3 {
            out.push(AtomicSystem::Boxworld { n, k });
        }
    }
    out
}

#[test]
fn hermitian_round_trip_and_inner_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for d in 2..=4 {
        for _ in 0..1000 {
            let g = ginibre(d, &mut rng);
            let a = HermitianMatrix::new((&g + g.adjoint()).unscale(2.0)).unwrap();
            let back = vector_to_hermitian(&hermitian_to_vector(&a)).unwrap();
            assert!(back.max_abs_diff(&a) < 1e-12);

            let h = ginibre(d, &mut rng);
            let b = HermitianMatrix::new((&h + h.adjoint()).unscale(2.0)).unwrap();
            let tr = (a.matrix() * b.matrix()).trace();
            let inner = hermitian_to_vector(&a).inner(&hermitian_to_vector(&b)).unwrap();
            assert!((inner - tr.re).abs() < 1e-10 && tr.im.abs() < 1e-10);
        }
    }
}

#[test]
fn projector_has_unit_norm() {
    let v = hermitian_to_vector(&HermitianMatrix::diagonal(&[1.0, 0.0]));
    assert!((v.inner(&v).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn vertices_are_normalized() {
    for atom in polytopic_atoms() {
        let u = unit_effect(&SystemType::atom(atom));
        for v in state_vertices(&atom).unwrap() {
            assert!((u.inner(&v).unwrap() - 1.0).abs() < 1e-15, "{atom}");
        }
    }
}

#[test]
fn boxworld_2_3_has_six_rays() {
    let atom = AtomicSystem::Boxworld { n: 2, k: 3 };
    let verts: Vec<Vec<f64>> = state_vertices(&atom).unwrap().iter().map(|v| v.coeffs().to_vec()).collect();
    assert_eq!(verts.len(), 9);
    let facets = brute_force_facets(&verts);
    assert_eq!(facets.len(), 6);
    let rays: Vec<Vec<f64>> = effect_cone_rays(&atom).unwrap().iter().map(|r| r.coeffs().to_vec()).collect();
    assert!(same_rays(&facets, &rays));
}

/// Accepted normalized vectors are mixtures of the listed vertices.
#[test]
fn vertex_completeness_by_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for atom in polytopic_atoms() {
        let verts = state_vertices(&atom).unwrap();
        let dim = atom.dimension();
        let sys = SystemType::atom(atom);
        // constraints: Σ λ_i v_i = s (last row gives Σ λ_i = 1)
        let a = DMatrix::from_fn(dim, verts.len(), |r, col| verts[col].coeffs()[r]);
        let mut accepted = 0;
        for _ in 0..400 {
            let mut coeffs: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.2..1.2)).collect();
            coeffs[dim - 1] = 1.0;
            let s = GptVector::new(sys.clone(), coeffs).unwrap();
            let inside = atomic_state_check(&s, 1e-12).unwrap().is_accepted();
            let lp = solve_feasibility(&a, &DVector::from_column_slice(s.coeffs()), 1e-9);
            match lp {
                Feasibility::Feasible(x) => {
                    assert!(x.iter().all(|&w| w >= -1e-9));
                    let recon = &a * &x;
                    assert!((recon - DVector::from_column_slice(s.coeffs())).amax() < 1e-8);
                    assert!(atomic_state_check(&s, 1e-8).unwrap().is_accepted(), "{atom}");
                }
                Feasibility::Infeasible(y) => {
                    assert!(!inside, "{atom}: accepted vector {:?} not a mixture", s.coeffs());
                    assert!((a.transpose() * &y).min() >= -1e-9);
                    assert!(y.dot(&DVector::from_column_slice(s.coeffs())) < 0.0);
                }
            }
            accepted += usize::from(inside);
        }
        assert!(accepted > 0 || dim > 4, "{atom}: sampler never hit the polytope");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    /// Acceptance agrees with nonnegativity on every dual ray.
    #[test]
    fn duality_on_random_vectors(which in 0usize..12, raw in prop::collection::vec(-1.0f64..1.5, 7)) {
        let atom = polytopic_atoms()[which];
        let dim = atom.dimension();
        let v = GptVector::new(SystemType::atom(atom), raw[..dim].to_vec()).unwrap();
        let tol = 1e-9;
        let by_rays = effect_cone_rays(&atom).unwrap().iter().all(|r| r.inner(&v).unwrap() >= -tol);
        prop_assert_eq!(atomic_state_check(&v, tol).unwrap().is_accepted(), by_rays);
    }
}
