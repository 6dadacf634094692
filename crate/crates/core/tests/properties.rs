//! Randomized invariants across states, channels and the measures.

use decometry::channels::{
    apply_dephasing, apply_kraus, dephase, is_cptp, projective_povm, random_sio, sio_to_kraus, DephasingChannel,
};
use decometry::coherence::{qfi_dephasing, qfi_local_dephasing};
use decometry::discord::{discord, OptimizerConfig};
use decometry::estimation::classical_fisher_information;
use decometry::linalg;
use decometry::qstate::{
    partial_trace, random_density, random_pure, random_unitary, spectral_decomposition, tensor, BipartiteState,
    Subsystem, Unitary,
};
use proptest::prelude::*;

fn dim() -> impl Strategy<Value = usize> {
    2usize..=4
}

fn strength() -> impl Strategy<Value = f64> {
    0.05f64..=1.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_states_are_valid(d in dim(), seed in any::<u64>(), rank_frac in 0.0f64..1.0) {
        let rank = 1 + (rank_frac * d as f64) as usize;
        let rho = random_density(d, rank.min(d), seed).unwrap();
        prop_assert!((linalg::trace(rho.matrix()).re - 1.0).abs() < 1e-12);
        prop_assert!(spectral_decomposition(&rho).eigenvalues.iter().all(|&l| l >= 0.0));
        prop_assert_eq!(spectral_decomposition(&rho).rank(1e-9), rank.min(d));
    }

    #[test]
    fn partial_trace_undoes_tensor(da in dim(), db in dim(), seed in any::<u64>()) {
        let a = random_density(da, da, seed).unwrap();
        let b = random_density(db, 1, seed ^ 1).unwrap();
        let ab = tensor(&a, &b);
        prop_assert!(partial_trace(&ab, Subsystem::A).distance(&a) < 1e-12);
        prop_assert!(partial_trace(&ab, Subsystem::B).distance(&b) < 1e-12);
    }

    #[test]
    fn sio_kraus_commute_with_full_dephasing(d in dim(), k in 1usize..5, seed in any::<u64>()) {
        let ch = sio_to_kraus(&random_sio(d, k, seed).unwrap());
        prop_assert!(is_cptp(&ch));
        let rho = random_density(d, d, seed ^ 7).unwrap();
        let id = Unitary::identity(d);
        let lhs = dephase(&apply_kraus(&rho, &ch).unwrap(), &id).unwrap();
        let rhs = apply_kraus(&dephase(&rho, &id).unwrap(), &ch).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn dephasing_is_affine_in_p(d in dim(), p in 0.0f64..=1.0, seed in any::<u64>()) {
        let rho = random_density(d, d, seed).unwrap();
        let out = apply_dephasing(&rho, &DephasingChannel::computational(d, p).unwrap()).unwrap();
        let full = dephase(&rho, &Unitary::identity(d)).unwrap();
        let expect = rho.matrix().scale(1.0 - p) + full.matrix().scale(p);
        prop_assert!(linalg::frobenius(&(out.matrix() - expect)) < 1e-13);
    }

    #[test]
    fn coherence_is_basis_covariant(d in dim(), p in strength(), seed in any::<u64>()) {
        let rho = random_density(d, d, seed).unwrap();
        let u = random_unitary(d, seed ^ 3).unwrap();
        let plain = qfi_dephasing(&rho, &DephasingChannel::computational(d, p).unwrap()).unwrap().value;
        let rotated = qfi_dephasing(&rho.conjugate_by(&u).unwrap(), &DephasingChannel::new(p, u).unwrap()).unwrap().value;
        prop_assert!((plain - rotated).abs() <= 1e-8 * plain.max(1.0));
    }

    #[test]
    fn coherence_is_nonnegative_and_vanishes_at_full_dephasing(d in dim(), p in strength(), seed in any::<u64>()) {
        let rho = random_density(d, 1 + (seed % d as u64) as usize, seed).unwrap();
        let ch = DephasingChannel::computational(d, p).unwrap();
        prop_assert!(qfi_dephasing(&rho, &ch).unwrap().value >= 0.0);
        let incoherent = dephase(&rho, &Unitary::identity(d)).unwrap();
        prop_assert!(qfi_dephasing(&incoherent, &ch).unwrap().value <= 1e-12);
    }

    #[test]
    fn classical_fisher_never_exceeds_quantum(d in dim(), p in strength(), seed in any::<u64>()) {
        let rho = random_pure(d, seed).unwrap();
        let ch = DephasingChannel::computational(d, p).unwrap();
        let povm = projective_povm(&random_unitary(d, seed ^ 5).unwrap());
        let cfi = classical_fisher_information(&rho, &ch, &povm).unwrap();
        let qfi = qfi_dephasing(&rho, &ch).unwrap().value;
        prop_assert!(cfi <= qfi + 1e-9, "cfi {} qfi {}", cfi, qfi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn discord_below_computational_basis_value(p in strength(), seed in any::<u64>()) {
        let rho = BipartiteState::new(random_density(4, 4, seed).unwrap(), (2, 2)).unwrap();
        let cfg = OptimizerConfig::default().with_starts(2).with_seed(seed);
        let d = discord(&rho, p, &cfg).unwrap();
        let computational = qfi_local_dephasing(&rho, &DephasingChannel::computational(2, p).unwrap()).unwrap().value;
        prop_assert!(d.value <= computational + 1e-12);
        prop_assert!(d.value >= 0.0);
        let min = d.per_start_values.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(d.value, min);
    }
}
