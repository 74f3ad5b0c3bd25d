//! Randomized invariants of the numerical core.

use std::f64::consts::PI;

use lurcert::bound_search::{minimize_sum_uncertainty, SearchConfig};
use lurcert::lur::{catalog_joint, certify, visibilities_from_state, visibility_to_uncertainty};
use lurcert::random;
use lurcert::spin_ops::{spin_components, stokes_components};
use lurcert::states::{bell_mixture, singlet_state, tensor, white_noise_mixture};
use lurcert::uncertainty::{catalog_bound, component_variances, sum_uncertainty, variance};
use lurcert::{ComplexMatrix, DensityMatrix, RelationKind, SpinQuantum};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.max_abs_diff(b).unwrap() <= tol
}

/// Catalog relations that make sense for dimension `dim`.
fn kinds_for(dim: usize) -> Vec<RelationKind> {
    RelationKind::ALL
        .iter()
        .copied()
        .filter(|k| k.fixed_dim().is_none_or(|d| d == dim))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(seed: u64, dim in 1usize..7) {
        let mut r = rng(seed);
        let [a, b, c] = [(); 3].map(|_| random::ginibre(&mut r, dim));
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        let scale = left.max_abs().max(1.0);
        prop_assert!(close(&left, &right, 1e-12 * scale));
    }

    #[test]
    fn kron_mixed_product(seed: u64, m in 1usize..4, n in 1usize..4) {
        let mut r = rng(seed);
        let (a, c) = (random::ginibre(&mut r, m), random::ginibre(&mut r, m));
        let (b, d) = (random::ginibre(&mut r, n), random::ginibre(&mut r, n));
        let left = a.kron(&b).multiply(&c.kron(&d)).unwrap();
        let right = a.multiply(&c).unwrap().kron(&b.multiply(&d).unwrap());
        prop_assert!(close(&left, &right, 1e-12 * left.max_abs().max(1.0)));
    }

    #[test]
    fn eigen_reconstructs_hermitian(seed: u64, dim in 1usize..12) {
        let a = random::hermitian(&mut rng(seed), dim);
        let eig = a.hermitian_eigen().unwrap();
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(close(&eig.reconstruct(), &a, 1e-10 * a.max_abs().max(1.0)));
        let trace: f64 = eig.values.iter().sum();
        prop_assert!((trace - a.trace().re).abs() < 1e-10 * (dim as f64));
    }

    #[test]
    fn gram_trace_is_nonnegative_real(seed: u64, dim in 1usize..8) {
        let a = random::ginibre(&mut rng(seed), dim);
        let t = a.adjoint().multiply(&a).unwrap().trace();
        prop_assert!(t.re >= 0.0);
        prop_assert!(t.im.abs() < 1e-12 * t.re.max(1.0));
        prop_assert!((t.re - a.frobenius_norm().powi(2)).abs() < 1e-10 * t.re.max(1.0));
    }

    #[test]
    fn catalog_bounds_hold_on_random_states(seed: u64, two_l in 1u32..5) {
        let l = SpinQuantum::from_two_l(two_l);
        let mut r = rng(seed);
        for kind in kinds_for(l.dim()) {
            let relation = catalog_bound(kind, l).unwrap();
            for _ in 0..8 {
                let rho = random::any_state(&mut r, l.dim());
                let total = sum_uncertainty(&rho, &relation.set).unwrap();
                prop_assert!(total >= relation.bound - 1e-10, "{kind}: {total} < {}", relation.bound);
            }
        }
    }

    #[test]
    fn pure_state_spin_identity(seed: u64, two_l in 0u32..6) {
        // For pure states sum_i dL_i^2 = l(l+1) - |<L>|^2.
        let l = SpinQuantum::from_two_l(two_l);
        let psi = random::pure_state(&mut rng(seed), l.dim());
        let set = spin_components(l);
        let rho = psi.to_density(&[l.dim()]);
        let total = sum_uncertainty(&rho, &set).unwrap();
        let mean_sq: f64 = set
            .operators()
            .iter()
            .map(|a| psi.expectation(a).unwrap().powi(2))
            .sum();
        prop_assert!((total - (l.casimir() - mean_sq)).abs() < 1e-10);
    }

    #[test]
    fn variance_is_unitarily_invariant(seed: u64, dim in 1usize..6) {
        let mut r = rng(seed);
        let rho = random::any_state(&mut r, dim);
        let a = random::hermitian(&mut r, dim);
        let u = random::unitary(&mut r, dim);
        let rotated = DensityMatrix::validate(rho.matrix().conjugate_by(&u).unwrap(), &[dim]).unwrap();
        let a_rot = a.conjugate_by(&u).unwrap();
        let a_rot = (&a_rot + &a_rot.adjoint()).scale(0.5);
        let before = variance(&rho, &a).unwrap();
        let after = variance(&rotated, &a_rot).unwrap();
        prop_assert!((before - after).abs() < 1e-10 * before.max(1.0));
    }

    #[test]
    fn white_noise_certificate_is_rotation_invariant(
        p in 0.0f64..=1.0,
        two_l in 1u32..4,
        theta in 0.0f64..PI,
        azimuth in 0.0f64..(2.0 * PI),
    ) {
        // The noisy singlet commutes with U (x) U for any spin rotation U.
        let l = SpinQuantum::from_two_l(two_l);
        let ops = spin_components(l);
        let [lx, ly, lz] = [0, 1, 2].map(|k| ops.operators()[k].clone());
        let axis = &(&lx.scale(theta.sin() * azimuth.cos()) + &ly.scale(theta.sin() * azimuth.sin()))
            + &lz.scale(theta.cos());
        let u = axis.unitary_exp(1.3).unwrap();
        let uu = u.kron(&u);
        let rho = white_noise_mixture(l, p).unwrap();
        let rotated = DensityMatrix::validate(rho.matrix().conjugate_by(&uu).unwrap(), rho.dims()).unwrap();
        let joint = catalog_joint(RelationKind::Spin3, l, l).unwrap();
        let c0 = certify(&rho, &joint).unwrap().relative_violation;
        let c1 = certify(&rotated, &joint).unwrap().relative_violation;
        prop_assert!((c0 - c1).abs() < 1e-10);
    }

    #[test]
    fn white_noise_violation_decreases_with_noise(
        two_l in 1u32..4,
        p in 0.0f64..1.0,
        dp in 0.001f64..0.5,
    ) {
        let l = SpinQuantum::from_two_l(two_l);
        let joint = catalog_joint(RelationKind::Spin3, l, l).unwrap();
        let q = (p + dp).min(1.0);
        let c_p = certify(&white_noise_mixture(l, p).unwrap(), &joint).unwrap().relative_violation;
        let c_q = certify(&white_noise_mixture(l, q).unwrap(), &joint).unwrap().relative_violation;
        prop_assert!(c_q < c_p);
    }

    #[test]
    fn separable_mixtures_are_never_flagged(seed: u64, terms in 1usize..5) {
        let mut r = rng(seed);
        for (kind, two_l) in [
            (RelationKind::Spin3, 2),
            (RelationKind::Stokes3, 1),
            (RelationKind::Stokes2N2, 1),
            (RelationKind::Spin2N3, 2),
        ] {
            let l = SpinQuantum::from_two_l(two_l);
            let n = l.dim();
            let joint = catalog_joint(kind, l, l).unwrap();
            let products: Vec<DensityMatrix> = (0..terms)
                .map(|_| {
                    let a = random::pure_state(&mut r, n);
                    let b = random::pure_state(&mut r, n);
                    DensityMatrix::validate(
                        ComplexMatrix::outer(&tensor(a.amplitudes(), b.amplitudes())),
                        &[n, n],
                    )
                    .unwrap()
                })
                .collect();
            let w = 1.0 / terms as f64;
            let mix: Vec<(f64, &DensityMatrix)> = products.iter().map(|p| (w, p)).collect();
            let rho = DensityMatrix::mixture(&mix).unwrap();
            let cert = certify(&rho, &joint).unwrap();
            prop_assert!(!cert.entangled, "{kind}: C = {}", cert.relative_violation);
        }
    }

    #[test]
    fn visibilities_map_to_joint_uncertainties(w in prop::array::uniform4(0.0f64..1.0)) {
        // Bell mixtures have no local polarization, so dS_i(+)^2 = 2 (1 - V_i).
        let s: f64 = w.iter().sum::<f64>().max(1e-9);
        let [ps, p1, p2, p3] = w.map(|x| x / s);
        let rho = bell_mixture(ps, p1, p2, p3 + (1.0 - ps - p1 - p2 - p3)).unwrap();
        let half = SpinQuantum::from_two_l(1);
        let joint = catalog_joint(RelationKind::Stokes3, half, half).unwrap();
        let cert = certify(&rho, &joint).unwrap();
        let v = visibilities_from_state(&rho).unwrap();
        let mapped = visibility_to_uncertainty(&v, true).unwrap();
        for (a, b) in cert.per_component.iter().zip(&mapped.per_component) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn search_minimum_is_rotation_invariant(seed: u64, two_l in 1u32..3) {
        let set = stokes_components(two_l);
        let u = random::unitary(&mut rng(seed), set.dim());
        let config = SearchConfig { restarts: 16, ..SearchConfig::default() };
        let plain = minimize_sum_uncertainty(&set, &config).unwrap().minimum;
        let rotated = minimize_sum_uncertainty(&set.conjugated(&u).unwrap(), &config).unwrap().minimum;
        prop_assert!((plain - rotated).abs() < 1e-8);
    }
}

#[test]
fn catalog_bounds_hold_on_ten_thousand_states() {
    let mut r = rng(0xb0b);
    for two_l in 1..=4u32 {
        let l = SpinQuantum::from_two_l(two_l);
        let relations: Vec<_> = kinds_for(l.dim())
            .into_iter()
            .map(|k| catalog_bound(k, l).unwrap())
            .collect();
        for _ in 0..2_500 {
            let rho = random::any_state(&mut r, l.dim());
            for rel in &relations {
                let total = sum_uncertainty(&rho, &rel.set).unwrap();
                assert!(total >= rel.bound - 1e-10, "{}: {total}", rel.set.label());
            }
        }
    }
}

#[test]
fn bell_grid_matches_closed_forms() {
    let half = SpinQuantum::from_two_l(1);
    let s3 = catalog_joint(RelationKind::Stokes3, half, half).unwrap();
    let s2 = catalog_joint(RelationKind::Stokes2N2, half, half).unwrap();
    let steps = [0.0, 0.1, 0.2, 0.3, 0.4];
    for &p1 in &steps {
        for &p2 in &steps {
            for &p3 in &steps {
                let ps = 1.0 - p1 - p2 - p3;
                if ps < 0.0 {
                    continue;
                }
                let rho = bell_mixture(ps, p1, p2, p3).unwrap();
                let c3 = certify(&rho, &s3).unwrap().relative_violation;
                let cert2 = certify(&rho, &s2).unwrap();
                let c2 = cert2.relative_violation;
                assert!((cert2.total - 4.0 * (1.0 - ps + p3)).abs() < 1e-12);
                assert!((c3 - (2.0 * ps - 1.0)).abs() < 1e-12);
                assert!((c2 - (2.0 * ps - 1.0 - 2.0 * p3)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn two_component_minimizer_has_expected_magnitudes() {
    let set = spin_components(SpinQuantum::from_two_l(2))
        .select(&[0, 1], "Lx,Ly")
        .unwrap();
    let found = minimize_sum_uncertainty(&set, &SearchConfig::default()).unwrap();
    assert!((found.minimum - 7.0 / 16.0).abs() < 1e-9);
    let mags: Vec<f64> = found.argmin.amplitudes().iter().map(|z| z.norm()).collect();
    let expected = [5f64.sqrt() / 4.0, 6f64.sqrt() / 4.0, 5f64.sqrt() / 4.0];
    for (m, e) in mags.iter().zip(expected) {
        assert!((m - e).abs() < 1e-4, "{mags:?}");
    }
    let lz = spin_components(SpinQuantum::from_two_l(2)).operators()[2].clone();
    assert!(found.argmin.expectation(&lz).unwrap().abs() < 1e-6);
}

#[test]
fn singlet_components_vanish_for_every_spin() {
    for two_l in 1..=5 {
        let l = SpinQuantum::from_two_l(two_l);
        let joint = catalog_joint(RelationKind::Spin3, l, l).unwrap();
        let rho = singlet_state(l).unwrap();
        for v in component_variances_joint(&rho, &joint.joint) {
            assert!(v.abs() < 1e-10);
        }
    }
}

fn component_variances_joint(rho: &DensityMatrix, ops: &[ComplexMatrix]) -> Vec<f64> {
    ops.iter().map(|a| variance(rho, a).unwrap()).collect()
}

#[test]
fn component_variances_sum_to_total() {
    let mut r = rng(3);
    let set = stokes_components(3);
    for _ in 0..50 {
        let rho = random::any_state(&mut r, set.dim());
        let parts: f64 = component_variances(&rho, &set).unwrap().iter().sum();
        assert!((parts - sum_uncertainty(&rho, &set).unwrap()).abs() < 1e-14);
    }
}
