use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use krauslab::dynamics::{factor_local_unitary, reduced_dynamics, CompositeState};
use krauslab::kraus::{
    apply_channel, closed_form_qubit_kraus, factorable_kraus, general_qubit_kraus, measure_prepare_kraus,
    unitary_remix,
};
use krauslab::linalg::{eigh, expm_hermitian_generator, ComplexMatrix, Subsystem};
use krauslab::random::{density_matrix, density_matrix_of_rank, ginibre, haar_unitary, hermitian};
use krauslab::state::{bloch_to_density, density_to_bloch, validate_density, BlochVector};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bloch() -> impl Strategy<Value = BlochVector> {
    (0.0..=1.0f64, 0.0..=PI, 0.0..TAU).prop_map(|(r, t, p)| BlochVector::new(r, t, p).unwrap())
}

/// Bloch vectors away from the centre, the surface and the poles.
fn generic_bloch() -> impl Strategy<Value = BlochVector> {
    (0.05..0.95f64, 0.05..PI - 0.05, 0.0..TAU).prop_map(|(r, t, p)| BlochVector::new(r, t, p).unwrap())
}

fn angle_close(a: f64, b: f64, tol: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigh_reconstructs(seed: u64, n in 1usize..=8) {
        let h = hermitian(&mut rng(seed), n);
        let e = eigh(&h, 1e-12).unwrap();
        prop_assert!(e.reconstruct().max_diff(&h).unwrap() < 1e-11);
        prop_assert!(e.vectors.unitarity_residual().unwrap() < 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn expm_is_unitary_and_a_group(seed: u64, n in 1usize..=5, s in -4.0..4.0f64, t in -4.0..4.0f64) {
        let h = hermitian(&mut rng(seed), n);
        let us = expm_hermitian_generator(&h, s, 1e-12).unwrap();
        let ut = expm_hermitian_generator(&h, t, 1e-12).unwrap();
        let ust = expm_hermitian_generator(&h, s + t, 1e-12).unwrap();
        prop_assert!(us.unitarity_residual().unwrap() < 1e-11);
        prop_assert!((&us * &ut).max_diff(&ust).unwrap() < 1e-10);
    }

    #[test]
    fn kron_mixed_product(seed: u64, m in 1usize..=3, n in 1usize..=3) {
        let mut r = rng(seed);
        let (a, c) = (ginibre(&mut r, m, m), ginibre(&mut r, m, m));
        let (b, d) = (ginibre(&mut r, n, n), ginibre(&mut r, n, n));
        let lhs = &a.kron(&b) * &c.kron(&d);
        let rhs = (&a * &c).kron(&(&b * &d));
        prop_assert!(lhs.max_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn partial_traces_preserve_trace(seed: u64, di in 1usize..=3, de in 1usize..=3) {
        let rho = density_matrix(&mut rng(seed), di * de);
        for keep in [Subsystem::System, Subsystem::Environment] {
            let part = rho.matrix().partial_trace((di, de), keep).unwrap();
            prop_assert!((part.trace().unwrap() - rho.matrix().trace().unwrap()).norm() < 1e-13);
            prop_assert!(validate_density(&part, 1e-12).is_ok());
        }
    }

    #[test]
    fn bloch_round_trip(b in bloch()) {
        let d = bloch_to_density(&b).unwrap();
        prop_assert!(validate_density(d.matrix(), 1e-12).is_ok());
        let back = density_to_bloch(&d).unwrap();
        prop_assert!((back.r - b.r).abs() < 1e-12);
        let [x, y, z] = back.cartesian();
        let [x0, y0, z0] = b.cartesian();
        prop_assert!((x - x0).abs() < 1e-12 && (y - y0).abs() < 1e-12 && (z - z0).abs() < 1e-12);
        if b.r > 1e-6 && b.theta.sin() > 1e-6 {
            prop_assert!((back.theta - b.theta).abs() < 1e-9);
            prop_assert!(angle_close(back.phi, b.phi, 1e-9));
        }
    }

    #[test]
    fn general_kraus_is_a_channel(b0 in bloch(), bt in bloch()) {
        let (rho0, rhot) = (bloch_to_density(&b0).unwrap(), bloch_to_density(&bt).unwrap());
        let k = general_qubit_kraus(&rho0, &rhot).unwrap();
        prop_assert_eq!(k.len(), 2);
        prop_assert!(k.completeness_residual() < 1e-12);
        prop_assert!(k.apply_matrix(rho0.matrix()).unwrap().max_diff(rhot.matrix()).unwrap() < 1e-12);
        let choi = eigh(&k.choi(), 1e-10).unwrap();
        prop_assert!(choi.min_value() > -1e-12);
    }

    #[test]
    fn closed_form_equals_general(b0 in generic_bloch(), bt in generic_bloch()) {
        let g = general_qubit_kraus(&bloch_to_density(&b0).unwrap(), &bloch_to_density(&bt).unwrap()).unwrap();
        let f = closed_form_qubit_kraus(&b0, &bt).unwrap();
        for (a, b) in g.ops().iter().zip(f.ops()) {
            prop_assert!(a.max_diff(b).unwrap() < 1e-10);
        }
    }

    #[test]
    fn channel_output_is_a_state(b0 in bloch(), bt in bloch(), seed: u64) {
        let k = general_qubit_kraus(&bloch_to_density(&b0).unwrap(), &bloch_to_density(&bt).unwrap()).unwrap();
        let any = density_matrix_of_rank(&mut rng(seed), 2, 1 + (seed % 2) as usize);
        let out = apply_channel(&k, &any).unwrap();
        prop_assert!(validate_density(out.matrix(), 1e-12).is_ok());
    }

    #[test]
    fn remix_keeps_the_channel(b0 in bloch(), bt in bloch(), seed: u64, extra in 0usize..=2) {
        let mut r = rng(seed);
        let (rho0, rhot) = (bloch_to_density(&b0).unwrap(), bloch_to_density(&bt).unwrap());
        let k = general_qubit_kraus(&rho0, &rhot).unwrap();
        let v = haar_unitary(&mut r, k.len() + extra);
        let mixed = unitary_remix(&k, &v).unwrap();
        prop_assert_eq!(mixed.len(), k.len() + extra);
        prop_assert!(mixed.completeness_residual() < 1e-12);
        let probe = density_matrix(&mut r, 2);
        let a = k.apply_matrix(probe.matrix()).unwrap();
        let b = mixed.apply_matrix(probe.matrix()).unwrap();
        prop_assert!(a.max_diff(&b).unwrap() < 1e-12);
    }

    #[test]
    fn factorable_kraus_matches_partial_trace(seed: u64, di in 1usize..=3, de in 1usize..=3) {
        let mut r = rng(seed);
        let u = haar_unitary(&mut r, di * de);
        let (rho_i, rho_e) = (density_matrix(&mut r, di), density_matrix_of_rank(&mut r, de, 1 + (seed as usize) % de));
        let joint = CompositeState::product(&rho_i, &rho_e);
        let exact = u.sandwich(joint.matrix()).unwrap().partial_trace((di, de), Subsystem::System).unwrap();
        let k = factorable_kraus(&u, &rho_e).unwrap();
        prop_assert_eq!(k.len(), de * de);
        prop_assert!(k.completeness_residual() < 1e-12);
        prop_assert!(k.apply_matrix(rho_i.matrix()).unwrap().max_diff(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn measure_prepare_is_constant(seed: u64, d in 1usize..=5) {
        let mut r = rng(seed);
        let (rho0, rhot, other) = (density_matrix(&mut r, d), density_matrix(&mut r, d), density_matrix(&mut r, d));
        let k = measure_prepare_kraus(&rho0, &rhot).unwrap();
        prop_assert!(k.completeness_residual() < 1e-12);
        prop_assert!(k.apply_matrix(other.matrix()).unwrap().max_diff(rhot.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn decomposition_identity(seed: u64, t in -3.0..3.0f64, di in 1usize..=3, de in 1usize..=2) {
        let mut r = rng(seed);
        let s = CompositeState::new(density_matrix(&mut r, di * de), (di, de)).unwrap();
        let h = hermitian(&mut r, di * de);
        let d = reduced_dynamics(&h, &s, t).unwrap();
        prop_assert!(d.decomposition_residual < 1e-12);
        prop_assert!(d.delta_rho.trace().unwrap().norm() < 1e-12);
        prop_assert!(d.delta_rho.hermiticity_residual().unwrap() < 1e-12);
    }

    #[test]
    fn local_unitaries_factor(seed: u64, di in 1usize..=3, de in 1usize..=3) {
        let mut r = rng(seed);
        let (a, b) = (haar_unitary(&mut r, di), haar_unitary(&mut r, de));
        let u = a.kron(&b);
        let (fa, fb) = factor_local_unitary(&u, (di, de), 1e-10).expect("product unitary factors");
        prop_assert!(fa.kron(&fb).max_diff(&u).unwrap() < 1e-10);
        prop_assert!(fa.unitarity_residual().unwrap() < 1e-10);
        prop_assert!(fb.unitarity_residual().unwrap() < 1e-10);
    }

    #[test]
    fn generic_joint_unitaries_do_not_factor(seed: u64) {
        let u = haar_unitary(&mut rng(seed), 4);
        prop_assert!(factor_local_unitary(&u, (2, 2), 1e-10).is_none());
    }
}

#[test]
fn validate_reports_every_violation() {
    let m = ComplexMatrix::from_real_rows(&[[1.5, 0.3], [0.0, -0.2]]);
    let report = validate_density(&m, 1e-10).unwrap_err();
    let text = report.to_string();
    assert!(report.violations.len() >= 3, "{text}");
}
