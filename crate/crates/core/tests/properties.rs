mod common;

use std::f64::consts::{PI, TAU};

use einsel_core::centralspin::{CentralSpinModel, ProductEnvironment, TimeGrid};
use einsel_core::kinematics::HaarSampler;
use einsel_core::qcore::{DensityMatrix, PureState, QubitSubset};
use num_complex::Complex64;
use proptest::prelude::*;

/// Random mixed state on `k` qubits: the marginal of a Haar state on `k + extra`.
fn random_density(k: usize, extra: usize, seed: u64) -> DensityMatrix {
    let psi = HaarSampler::new(k + extra, seed).unwrap().sample_at(0);
    psi.partial_trace(&QubitSubset::new(0..k, k + extra).unwrap())
        .unwrap()
}

fn product_env(angles: &[(f64, f64)]) -> ProductEnvironment {
    let spins = angles
        .iter()
        .map(|&(th, ph)| {
            let s = PureState::from_bloch_angles(th, ph);
            (s.amplitudes()[0], s.amplitudes()[1])
        })
        .collect();
    ProductEnvironment::new(spins).unwrap()
}

fn angles(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..PI, 0.0..TAU), n)
}

fn couplings(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5f64..1.5, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_distance_is_a_metric(k in 1usize..=3, extra in 0usize..3, seed in any::<u64>()) {
        let a = random_density(k, extra, seed);
        let b = random_density(k, extra, seed ^ 0x9e37);
        let c = random_density(k, extra, seed.wrapping_add(7));
        let dab = a.trace_distance(&b).unwrap();
        prop_assert!((dab - b.trace_distance(&a).unwrap()).abs() < 1e-12);
        prop_assert!(a.trace_distance(&a).unwrap() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&dab));
        prop_assert!(a.trace_distance(&c).unwrap() <= dab + b.trace_distance(&c).unwrap() + 1e-9);
    }

    #[test]
    fn reduced_states_are_density_matrices(n in 2usize..=7, mask in 1usize..128, seed in any::<u64>()) {
        let keep: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        prop_assume!(!keep.is_empty());
        let psi = HaarSampler::new(n, seed).unwrap().sample_at(0);
        let rho = psi.partial_trace(&QubitSubset::new(keep, n).unwrap()).unwrap();
        prop_assert!(rho.validate().is_ok());
        prop_assert!(rho.hermiticity_error() <= 1e-10);
        prop_assert!((rho.trace().re - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn purity_one_iff_top_eigenvalue_one(k in 1usize..=3, extra in 0usize..3, seed in any::<u64>()) {
        let rho = random_density(k, extra, seed);
        let top = *rho.eigenvalues().last().unwrap();
        let pure = (rho.purity() - 1.0).abs() <= 1e-9;
        prop_assert_eq!(pure, (top - 1.0).abs() <= 1e-9);
        if extra == 0 {
            prop_assert!(pure);
        }
    }

    #[test]
    fn evolution_is_norm_preserving(g in couplings(6), seed in any::<u64>(), t in 0.0f64..200.0) {
        let model = CentralSpinModel::new(g).unwrap();
        let psi = HaarSampler::new(7, seed).unwrap().sample_at(0);
        prop_assert!((model.evolve(&psi, t).unwrap().norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn z_is_conserved_and_pointers_stay_pure(
        g in couplings(5),
        env in angles(5),
        theta in 0.0..PI,
        phi in 0.0..TAU,
    ) {
        let model = CentralSpinModel::new(g).unwrap();
        let env = product_env(&env);
        let grid = TimeGrid::linspace(30.0, 16).unwrap();
        let traj = model
            .bloch_trajectory(&PureState::from_bloch_angles(theta, phi), &env, &grid)
            .unwrap();
        let z0 = traj[0].bloch.z;
        for p in &traj {
            prop_assert!((p.bloch.z - z0).abs() <= 1e-10);
        }
        for pointer in [0.0, PI] {
            let traj = model
                .bloch_trajectory(&PureState::from_bloch_angles(pointer, phi), &env, &grid)
                .unwrap();
            for p in &traj {
                prop_assert!((p.purity - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn coherence_follows_decoherence_factor(
        g in couplings(7),
        env in angles(7),
        theta in 0.0..PI,
        phi in 0.0..TAU,
        t in 0.0f64..50.0,
    ) {
        let model = CentralSpinModel::new(g).unwrap();
        let env = product_env(&env);
        let central = PureState::from_bloch_angles(theta, phi);
        let psi0 = model.initial_state(&central, &env.to_state()).unwrap();
        let rho0 = model.central_state(&psi0).unwrap();
        let rho_t = model.central_state(&model.evolve(&psi0, t).unwrap()).unwrap();
        let r = model.decoherence_factor(&env, t).unwrap();
        prop_assert!(r.norm() <= 1.0 + 1e-12);
        // ρ₀₁(t) = α β* r(t), and the populations do not move
        let (a, b) = (central.amplitudes()[0], central.amplitudes()[1]);
        prop_assert!((rho_t.get(0, 1) - a * b.conj() * r).norm() <= 1e-10);
        prop_assert!((rho_t.get(0, 1).norm() - rho0.get(0, 1).norm() * r.norm()).abs() <= 1e-10);
        prop_assert!((rho_t.get(0, 0) - rho0.get(0, 0)).norm() <= 1e-12);
        prop_assert!((rho_t.get(1, 1) - rho0.get(1, 1)).norm() <= 1e-12);
    }

    #[test]
    fn decoherence_factor_starts_at_one(g in couplings(9), env in angles(9)) {
        let model = CentralSpinModel::new(g).unwrap();
        prop_assert_eq!(
            model.decoherence_factor(&product_env(&env), 0.0).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn unit_couplings_recur_with_period_two_pi(env in angles(6), t in 0.0f64..20.0) {
        let model = CentralSpinModel::new(vec![1.0; 6]).unwrap();
        let env = product_env(&env);
        let r = model.decoherence_factor(&env, t).unwrap();
        let later = model.decoherence_factor(&env, t + TAU).unwrap();
        prop_assert!((r - later).norm() <= 1e-10);
    }
}

#[test]
fn coherence_law_at_twelve_spins() {
    let model = CentralSpinModel::uniform(12, 77).unwrap();
    let env = product_env(
        &(0..12)
            .map(|i| (0.2 * i as f64 + 0.1, 0.5 * i as f64))
            .collect::<Vec<_>>(),
    );
    let central = PureState::from_bloch_angles(1.2, 0.4);
    let psi0 = model.initial_state(&central, &env.to_state()).unwrap();
    let c0 = model.central_state(&psi0).unwrap().get(0, 1).norm();
    for t in [0.5, 2.0, 9.0] {
        let ct = model
            .central_state(&model.evolve(&psi0, t).unwrap())
            .unwrap()
            .get(0, 1)
            .norm();
        let r = model.decoherence_factor(&env, t).unwrap().norm();
        assert!((ct - c0 * r).abs() <= 1e-10);
    }
}

#[test]
fn parallel_trajectory_equals_sequential() {
    let model = CentralSpinModel::uniform(8, 3).unwrap();
    let env = ProductEnvironment::plus_x(8).unwrap();
    let central = PureState::from_bloch_angles(0.9, 2.0);
    let grid = TimeGrid::linspace(12.0, 40).unwrap();
    let par = model.bloch_trajectory(&central, &env, &grid).unwrap();
    let psi0 = model.initial_state(&central, &env.to_state()).unwrap();
    for (p, &t) in par.iter().zip(grid.times()) {
        let rho = model
            .central_state(&model.evolve(&psi0, t).unwrap())
            .unwrap();
        let v = rho.bloch_vector().unwrap();
        assert_eq!((p.t, p.bloch, p.purity), (t, v, rho.purity()));
    }
}
