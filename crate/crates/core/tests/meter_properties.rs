use ndarray::Array1;
use num_complex::Complex64;
use proptest::prelude::*;
use qnd_core::meter::{couple, pointer_total_variation, readout_noise, readout_pointer, ReadoutResult};
use qnd_core::{dephasing_factor, FockOperatorF64, FockStateF64, GaussianMeasurementF64, MeterConfigF64, Resolution};

fn random_state(parts: &[(f64, f64)]) -> FockStateF64 {
    FockStateF64::from_amplitudes(Array1::from_iter(parts.iter().map(|&(re, im)| Complex64::new(re, im)))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn coupling_is_unitary_and_conserves_the_observable(
        parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12),
        number in any::<bool>(),
        delta in 0.3f64..2.0,
    ) {
        prop_assume!(parts.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3));
        let s = random_state(&parts);
        let obs = if number { FockOperatorF64::number(12) } else { FockOperatorF64::quadrature_x(12) }.unwrap();
        let joint = couple(&s, &obs, Resolution::new(delta).unwrap(), MeterConfigF64::default()).unwrap();
        prop_assert!((joint.norm() - 1.0).abs() < 1e-12, "norm {}", joint.norm());
        let before = s.expectation(&obs).unwrap().re;
        let after = joint.signal_expectation(&obs).unwrap().re;
        prop_assert!((before - after).abs() < 1e-10);
        prop_assert!((s.variance(&obs).unwrap() - joint.signal_variance(&obs).unwrap()).abs() < 1e-10);
    }
}

/// Smallest overlap with the conditioned povm state over outcomes inside the
/// central 99% of readout mass.
fn central_overlap(out: &[ReadoutResult<f64>], state: &FockStateF64, m: &GaussianMeasurementF64) -> f64 {
    let mut cumulative = 0.0;
    let mut worst = 1.0_f64;
    for r in out {
        cumulative += r.weight;
        if !(0.005..=0.995).contains(&cumulative) {
            continue;
        }
        let reference = m.condition(state, r.inferred_a_m).unwrap().conditioned;
        worst = worst.min(r.signal_state.overlap(&reference).unwrap());
    }
    worst
}

#[test]
fn pointer_readout_of_quadrature_matches_povm() {
    let delta = Resolution::new(0.5).unwrap();
    let vac = FockStateF64::vacuum(128).unwrap();
    let x = FockOperatorF64::quadrature_x(128).unwrap();
    let joint = couple(&vac, &x, delta, MeterConfigF64::default()).unwrap();
    assert!(joint.dim_m() >= 128);
    let out = readout_pointer(&joint, delta).unwrap();
    let m = GaussianMeasurementF64::new(&x, delta).unwrap();
    assert!(central_overlap(&out, &vac, &m) >= 1.0 - 1e-4);
    let prepared = m.prepare(&vac).unwrap();
    assert!(pointer_total_variation(&out, |a| m.density_prepared(&prepared, a)) < 2e-3);
}

#[test]
fn pointer_readout_of_photon_number_matches_povm() {
    let delta = Resolution::new(0.3).unwrap();
    let s = FockStateF64::coherent(Complex64::new(3.0, 0.0), 64).unwrap();
    let n = FockOperatorF64::number(64).unwrap();
    let joint = couple(&s, &n, delta, MeterConfigF64::default()).unwrap();
    let out = readout_pointer(&joint, delta).unwrap();
    let m = GaussianMeasurementF64::new(&n, delta).unwrap();
    assert!(central_overlap(&out, &s, &m) >= 1.0 - 1e-4);
    let prepared = m.prepare(&s).unwrap();
    let tv = pointer_total_variation(&out, |a| m.density_prepared(&prepared, a));
    assert!(tv < 2e-3, "total variation {tv}");
}

#[test]
fn coherent_amplitude_decays_by_the_dephasing_factor() {
    let s = FockStateF64::coherent(Complex64::new(3.0, 0.0), 64).unwrap();
    let n = FockOperatorF64::number(64).unwrap();
    let a = FockOperatorF64::annihilation(64).unwrap();
    for d in [0.3, 0.5, 1.0] {
        let delta = Resolution::new(d).unwrap();
        let joint = couple(&s, &n, delta, MeterConfigF64::default()).unwrap();
        let out = joint.signal_expectation(&a).unwrap().norm();
        assert!((out - 3.0 * dephasing_factor(delta)).abs() < 1e-6, "δn={d}: {out}");
    }
}

#[test]
fn quadrature_noise_readout_is_signal_independent() {
    let delta = Resolution::new(0.5).unwrap();
    let x = FockOperatorF64::quadrature_x(48).unwrap();
    let signals = [FockStateF64::vacuum(48).unwrap(), FockStateF64::coherent(Complex64::new(0.0, 1.0), 48).unwrap()];
    let cfg = MeterConfigF64::fixed(256, Complex64::new(0.0, 0.0)).unwrap();
    let mut first: Option<Vec<f64>> = None;
    for s in &signals {
        let joint = couple(s, &x, delta, cfg).unwrap();
        let out = readout_noise(&joint, delta, s, &x).unwrap();
        assert!(out.iter().all(|o| o.predicted_unitary_overlap >= 1.0 - 1e-8));
        let w: Vec<f64> = out.iter().map(|o| o.weight).collect();
        if let Some(r) = &first {
            assert_eq!(r.len(), w.len());
            let tv: f64 = r.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
            assert!(tv < 1e-8, "{tv}");
        } else {
            first = Some(w);
        }
    }
}
