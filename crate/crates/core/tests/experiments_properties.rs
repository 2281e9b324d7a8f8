use num_complex::Complex64;
use qnd_core::experiments::{local_maxima, operator_side_covariance, PhotonNumberQnd, QuadratureQnd};
use qnd_core::meter::{couple, pointer_total_variation, readout_pointer};
use qnd_core::{FockOperatorF64, FockStateF64, GridPolicy, MeterConfigF64, OutcomeGrid, Resolution};

fn photon_number(alpha: f64, delta: f64) -> PhotonNumberQnd<f64> {
    PhotonNumberQnd::new(Complex64::new(alpha, 0.0), Resolution::new(delta).unwrap(), 64, &GridPolicy::Standard)
        .unwrap()
}

fn quadrature(delta: f64) -> QuadratureQnd<f64> {
    QuadratureQnd::new(Resolution::new(delta).unwrap(), 128, &GridPolicy::Standard).unwrap()
}

#[test]
fn halving_the_step_leaves_correlations_unchanged() {
    for (alpha, delta) in [(3.0, 0.1), (3.0, 0.3), (1.0, 0.5), (3.0, 1.0)] {
        let p = photon_number(alpha, delta);
        let coarse = p.quantization_coherence_correlation().unwrap().numeric;
        let fine = p.regridded(p.grid().refined()).quantization_coherence_correlation().unwrap().numeric;
        assert!((coarse - fine).norm() < 1e-7, "α={alpha} δn={delta}: {coarse} vs {fine}");
    }
    for delta in [0.5, 1.0, 2.0] {
        let q = quadrature(delta);
        let coarse = q.field_jump_correlation().unwrap().correlation.numeric;
        let fine = q.regridded(q.grid().refined()).field_jump_correlation().unwrap().correlation.numeric;
        assert!((coarse - fine).norm() < 1e-7, "δx={delta}");
    }
}

#[test]
fn outcome_maxima_sit_at_integers_and_coherence_maxima_near_half_integers() {
    let p = photon_number(3.0, 0.3).regridded(OutcomeGrid::new(5.5, 12.5, 0.01).unwrap());
    let curve = p.curve().unwrap();
    let xs: Vec<f64> = curve.iter().map(|s| s.a_m).collect();
    let dens: Vec<f64> = curve.iter().map(|s| s.density).collect();
    let coh: Vec<f64> = curve.iter().map(|s| s.post_value.norm()).collect();

    let peaks = local_maxima(&xs, &dens);
    assert_eq!(peaks.len(), 7, "{peaks:?}");
    for (k, x) in peaks.iter().enumerate() {
        assert!((x - (6 + k) as f64).abs() <= 0.01, "density peak {x}");
    }

    // roots of d|⟨â⟩_f|/dn_m from 30-digit arithmetic on the closed form
    let exact = [6.477_584_8, 7.489_577_3, 8.500_158_0, 9.509_624_7, 10.518_189_7, 11.526_010_0];
    let peaks = local_maxima(&xs, &coh);
    assert_eq!(peaks.len(), exact.len(), "{peaks:?}");
    for (x, e) in peaks.iter().zip(exact) {
        assert!((x - e).abs() <= 0.01, "coherence peak {x} vs {e}");
    }
    // coherence is larger at half-integer outcomes than at integer ones
    let at = |v: f64| p.post_coherence(v).unwrap().norm();
    for n in 6..12 {
        assert!(at(n as f64 + 0.5) > at(n as f64));
    }
}

#[test]
fn measurement_heats_the_vacuum() {
    for delta in [0.5, 1.0, 2.0] {
        let r = quadrature(delta).field_jump_correlation().unwrap();
        assert!((r.mean_photon_number - 1.0 / (16.0 * delta * delta)).abs() < 1e-6, "δx={delta}");
        assert!((r.correlation.numeric.re - 0.125).abs() < 1e-6, "δx={delta}");
        let unsubtracted = 0.125 + (0.25 + delta * delta) / (16.0 * delta * delta);
        assert!((r.unsubtracted - unsubtracted).abs() < 1e-6, "δx={delta}");
    }
    assert!((operator_side_covariance::<f64>(128).unwrap() - 0.125).abs() < 1e-14);
}

#[test]
fn jump_probability_and_its_asymptote() {
    let q = quadrature(1.0);
    let j = q.jump_total_probability().unwrap();
    assert!((j.numeric - 2f64.sqrt() / 27.0).abs() < 1e-7);
    for delta in [5.0, 8.0, 20.0] {
        let q = QuadratureQnd::new(Resolution::new(delta).unwrap(), 128, &GridPolicy::Standard).unwrap();
        let ratio = q.jump_total_closed() * 16.0 * delta * delta;
        assert!((0.95..=1.0).contains(&ratio), "δx={delta}: {ratio}");
    }
}

#[test]
fn meter_histogram_matches_closed_form_density() {
    let delta = Resolution::new(0.3).unwrap();
    let p = photon_number(3.0, 0.3);
    let s = FockStateF64::coherent(Complex64::new(3.0, 0.0), 64).unwrap();
    let n = FockOperatorF64::number(64).unwrap();
    let joint = couple(&s, &n, delta, MeterConfigF64::default()).unwrap();
    let out = readout_pointer(&joint, delta).unwrap();
    let tv = pointer_total_variation(&out, |a| p.outcome_density(a));
    assert!(tv < 2e-3, "total variation {tv}");
}
