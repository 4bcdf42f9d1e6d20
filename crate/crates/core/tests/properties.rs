use std::f64::consts::PI;

use bendlattice_core::lattice::{pst_profile, LatticeHamiltonian};
use bendlattice_core::mode_solver::{solve_mode, transverse_wavenumber, MatchingCondition, WaveguideSpec};
use bendlattice_core::propagation::{
    evolve, evolve_ode, power_distribution, transfer_with_matrix, AmplitudeVector,
};
use bendlattice_core::spectrum::spectrum_spacings;
use num_complex::Complex64;
use proptest::prelude::*;

fn symmetric_matrix(n: usize, entries: &[f64]) -> LatticeHamiltonian {
    let mut data = vec![0.0; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            data[i * n + j] = entries[k];
            data[j * n + i] = entries[k];
            k += 1;
        }
    }
    LatticeHamiltonian::new(n, data).unwrap()
}

fn random_state(n: usize, parts: &[f64]) -> AmplitudeVector {
    AmplitudeVector::new((0..n).map(|i| Complex64::new(parts[2 * i], parts[2 * i + 1])).collect())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ideal_profile_mirrors_every_site(n in 2usize..16, length_cm in 1.0f64..30.0) {
        let length = length_cm * 1e-2;
        let h = LatticeHamiltonian::tridiagonal(&pst_profile(n, length).unwrap());
        for j in 0..n {
            let out = evolve(&h, length, &AmplitudeVector::localized(n, j)).unwrap();
            let p = power_distribution(&out);
            prop_assert!(p[n - 1 - j] > 1.0 - 1e-8);
        }
        let spectrum = spectrum_spacings(&h).unwrap();
        for s in &spectrum.spacings {
            // π/L in 1/cm to 1e-10
            prop_assert!((s - PI / length).abs() / 100.0 < 1e-10);
        }
    }

    #[test]
    fn evolution_is_unitary(
        n in 2usize..10,
        entries in prop::collection::vec(-50.0f64..50.0, 55),
        parts in prop::collection::vec(-1.0f64..1.0, 20),
        z in 0.0f64..0.2,
    ) {
        let h = symmetric_matrix(n, &entries);
        let a0 = random_state(n, &parts);
        let out = evolve(&h, z, &a0).unwrap();
        prop_assert!((out.norm() - a0.norm()).abs() < 1e-12 * a0.norm().max(1.0));
    }

    #[test]
    fn rk4_agrees_with_spectral(
        n in 2usize..=12,
        entries in prop::collection::vec(-70.0f64..70.0, 78),
        parts in prop::collection::vec(-1.0f64..1.0, 24),
    ) {
        let h = symmetric_matrix(n, &entries);
        let a0 = random_state(n, &parts);
        let norm = a0.norm();
        prop_assume!(norm > 1e-3);
        let a = evolve(&h, 0.1, &a0).unwrap();
        let b = evolve_ode(&h, 0.1, &a0).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            prop_assert!((x - y).norm() < 1e-8 * norm.max(1.0));
        }
        prop_assert!((b.norm() - norm).abs() < 1e-8 * norm);
    }

    #[test]
    fn loss_depends_only_on_coupling_length_product(
        entries in prop::collection::vec(0.0f64..80.0, 15),
        scale in 0.2f64..5.0,
        detuning in -30.0f64..30.0,
    ) {
        let h = symmetric_matrix(5, &entries);
        let scaled = LatticeHamiltonian::new(5, h.as_slice().iter().map(|x| x * scale).collect()).unwrap();
        let a = transfer_with_matrix(&h, 2, 0.1, 0.0, detuning).unwrap();
        let b = transfer_with_matrix(&scaled, 2, 0.1 / scale, 0.0, detuning * scale).unwrap();
        prop_assert!((a.loss - b.loss).abs() < 1e-10);
        prop_assert!((a.powers.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wider_core_lowers_transverse_wavenumber(w in 1.0f64..20.0, grow in 1.01f64..2.0) {
        let k = 2.0 * PI / 800e-9;
        let spec = WaveguideSpec::reference_asymmetric();
        let (ng, ns) = (spec.core_index(), spec.substrate_index());
        let cond = MatchingCondition::default();
        let narrow = transverse_wavenumber(w * 1e-6, k, ng, ns, cond).unwrap();
        let wide = transverse_wavenumber(w * grow * 1e-6, k, ng, ns, cond).unwrap();
        prop_assert!(wide.wavenumber < narrow.wavenumber);
    }

    #[test]
    fn solved_modes_satisfy_dispersion(
        width in 2.0f64..12.0,
        aspect in 0.2f64..1.0,
        dn in 2e-4f64..5e-3,
    ) {
        let spec = WaveguideSpec::new(width * 1e-6, width * aspect * 1e-6, 1.444, dn).unwrap();
        let mode = solve_mode(&spec, 800e-9).unwrap();
        for r in mode.dispersion_residuals() {
            prop_assert!(r.abs() < 1e-10);
        }
        prop_assert!(mode.beta < mode.k * spec.core_index());
        prop_assert!(mode.kx > 0.0 && mode.ky > 0.0 && mode.gamma_x > 0.0 && mode.gamma_y > 0.0);
        prop_assert!((mode.power() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn beta_increases_with_index_change_on_the_guiding_branch() {
    let spec = WaveguideSpec::reference_asymmetric();
    let betas: Vec<f64> = (0..=40)
        .map(|i| {
            let dn = 1e-3 + 1e-4 * i as f64;
            solve_mode(&spec.with_index_change(dn).unwrap(), 800e-9).unwrap().beta
        })
        .collect();
    assert!(betas.windows(2).all(|w| w[1] > w[0]));
}
