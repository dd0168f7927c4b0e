use declab_core::dynamics::{incommensurate_model, EnergyModel};
use declab_core::info::branch_mutual_entropy;
use declab_core::rng::{self, tags};
use declab_core::{
    apply_measurement, decoherence_error, mutual_entropy, premeasurement_mixed, reduce, shannon_entropy, tensor,
    verify_inequality, von_neumann_entropy, DensityOperator, HilbertSpace, LogBase, MacroscopicObservable,
    PointerMeasurementModel, SearchOptions, Strategy,
};
use proptest::prelude::*;

fn space(da: usize, dc: usize) -> HilbertSpace {
    HilbertSpace::new(&[("a", da), ("c", dc)]).unwrap()
}

fn random_state(da: usize, dc: usize, rank: usize, seed: u64) -> DensityOperator {
    let mut g = rng::stream_rng(seed, tags::STATES, 0);
    DensityOperator::new(space(da, dc), rng::random_density_matrix(da * dc, rank, &mut g)).unwrap()
}

fn random_model(k: usize, m: usize, seed: u64) -> PointerMeasurementModel {
    let mut g = rng::stream_rng(seed, tags::AMPLITUDES, 0);
    let c = rng::random_amplitudes(k, &mut g);
    let p = rng::random_weights(m, &mut g);
    PointerMeasurementModel::with_random_phases(c, p, &mut g).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn partial_trace_keeps_trace_and_positivity(da in 1usize..4, dc in 1usize..4, rank in 1usize..5, seed in any::<u64>()) {
        let rho = random_state(da, dc, rank.min(da * dc), seed);
        for keep in [["a"], ["c"]] {
            let red = rho.partial_trace(&keep).unwrap();
            prop_assert!((red.trace() - 1.0).abs() < 1e-12);
            prop_assert!(red.eigen().unwrap().values.iter().all(|&v| v > -1e-12));
        }
    }

    #[test]
    fn tensor_then_trace_recovers_factors(seed in any::<u64>()) {
        let mut g = rng::stream_rng(seed, tags::STATES, 1);
        let a = DensityOperator::new(HilbertSpace::new(&[("a", 2)]).unwrap(), rng::random_density_matrix(2, 2, &mut g)).unwrap();
        let c = DensityOperator::new(HilbertSpace::new(&[("c", 3)]).unwrap(), rng::random_density_matrix(3, 2, &mut g)).unwrap();
        let joint = tensor(&a, &c).unwrap();
        let back = joint.partial_trace(&["c"]).unwrap();
        prop_assert!((back.matrix() - c.matrix()).norm() < 1e-12);
        prop_assert!(mutual_entropy(&joint).unwrap() < 1e-9);
    }

    #[test]
    fn entropy_bounds(da in 1usize..4, dc in 1usize..4, rank in 1usize..5, seed in any::<u64>()) {
        let rho = random_state(da, dc, rank.min(da * dc), seed);
        let s = von_neumann_entropy(&rho).unwrap();
        prop_assert!(s >= 0.0 && s <= ((da * dc) as f64).log2() + 1e-9);
        let mi = mutual_entropy(&rho).unwrap();
        prop_assert!(mi >= 0.0 && mi <= 2.0 * (da.min(dc) as f64).log2() + 1e-9);
    }

    #[test]
    fn local_unitaries_leave_mutual_entropy_unchanged(seed in any::<u64>()) {
        let rho = random_state(2, 3, 3, seed);
        let mut g = rng::stream_rng(seed, tags::STATES, 2);
        let u = rng::haar_unitary(2, &mut g).kronecker(&rng::haar_unitary(3, &mut g));
        let moved = rho.conjugate(&u).unwrap();
        prop_assert!((von_neumann_entropy(&moved).unwrap() - von_neumann_entropy(&rho).unwrap()).abs() < 1e-9);
        prop_assert!((mutual_entropy(&moved).unwrap() - mutual_entropy(&rho).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn accessible_never_exceeds_mutual(da in 2usize..4, dc in 2usize..4, rank in 1usize..5, seed in any::<u64>()) {
        let rho = random_state(da, dc, rank, seed);
        let opts = SearchOptions { restarts: 2, seed, ..Default::default() };
        let check = verify_inequality(&rho, Strategy::Hybrid, &opts).unwrap();
        prop_assert!(check.holds, "{check:?}");
    }

    #[test]
    fn reduction_is_idempotent_and_phase_blind(k in 1usize..4, m in 1usize..4, seed in any::<u64>()) {
        let model = random_model(k, m, seed);
        let once = reduce(&apply_measurement(&model)).unwrap();
        let twice = reduce(&once).unwrap();
        let (a, b) = (once.to_dense().unwrap(), twice.to_dense().unwrap());
        prop_assert_eq!(a.matrix(), b.matrix());
        let zeroed = reduce(&apply_measurement(&model.with_phases(vec![vec![0.0; m]; k]).unwrap())).unwrap();
        prop_assert!((once.to_dense().unwrap().matrix() - zeroed.to_dense().unwrap().matrix()).norm() < 1e-12);
    }

    #[test]
    fn diagonal_observables_never_see_coherence(k in 1usize..5, m in 1usize..6, seed in any::<u64>()) {
        let model = random_model(k, m, seed);
        let values: Vec<f64> = (0..k).map(|i| i as f64 - 0.5).collect();
        let obs = MacroscopicObservable::diagonal(&values).unwrap();
        prop_assert!(decoherence_error(&model, &obs).unwrap().abs() < 1e-12);
    }

    #[test]
    fn branch_states_respect_entropy_identities(k in 1usize..5, m in 1usize..9, seed in any::<u64>()) {
        let model = random_model(k, m, seed);
        let hc = shannon_entropy(&model.branch_probabilities()).unwrap();
        let exact = apply_measurement(&model);
        let reduced = reduce(&exact).unwrap();
        prop_assert!((branch_mutual_entropy(&exact, LogBase::Two).unwrap() - 2.0 * hc).abs() < 1e-9);
        prop_assert!((branch_mutual_entropy(&reduced, LogBase::Two).unwrap() - hc).abs() < 1e-9);
        prop_assert!(branch_mutual_entropy(&premeasurement_mixed(&model), LogBase::Two).unwrap().abs() < 1e-12);
    }

    #[test]
    fn evolution_keeps_mutual_entropy(k in 1usize..4, m in 1usize..4, seed in any::<u64>(), t in 0.0f64..500.0) {
        let model = random_model(k, m, seed);
        let mut g = rng::stream_rng(seed, tags::ENERGIES, 0);
        let em = EnergyModel::random(model, 1.0, &mut g).unwrap();
        let s0 = mutual_entropy(&em.evolve(0.0).unwrap().to_dense().unwrap()).unwrap();
        let st = mutual_entropy(&em.evolve(t).unwrap().to_dense().unwrap()).unwrap();
        prop_assert!((s0 - st).abs() < 1e-9);
    }

    #[test]
    fn recurrence_distance_bounds_and_shift(m in 1usize..7, seed in any::<u64>(), t in 0.0f64..1e4, shift in -5.0f64..5.0) {
        let em = incommensurate_model(m, seed, 0).unwrap();
        let d = em.distance_to_initial(t);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((em.shifted(shift).distance_to_initial(t) - d).abs() < 1e-10);
        prop_assert_eq!(em.distance_to_initial(0.0), 0.0);
    }
}
