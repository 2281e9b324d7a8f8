use ndarray::Array1;
use num_complex::Complex64;
use proptest::prelude::*;
use qnd_core::{FockOperatorF64, FockStateF64};

fn commutator_block_error(a: &FockOperatorF64, b: &FockOperatorF64, expected: Complex64) -> f64 {
    let dim = a.dim();
    let c = a.commutator(b).unwrap();
    let mut worst = 0.0_f64;
    // the top basis state is excluded: truncation breaks the algebra there
    for i in 0..dim - 1 {
        for j in 0..dim - 1 {
            let target = if i == j { expected } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((c.entries()[[i, j]] - target).norm());
        }
    }
    worst
}

fn unit_vector(parts: &[(f64, f64)]) -> Array1<Complex64> {
    let v = Array1::from_iter(parts.iter().map(|&(re, im)| Complex64::new(re, im)));
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv(|z| z / n)
}

proptest! {
    #[test]
    fn ladder_commutator_is_identity_below_the_cutoff(dim in 2usize..80) {
        let a = FockOperatorF64::annihilation(dim).unwrap();
        let ad = FockOperatorF64::creation(dim).unwrap();
        prop_assert!(commutator_block_error(&a, &ad, Complex64::new(1.0, 0.0)) < 1e-10);
    }

    #[test]
    fn quadrature_commutator_is_half_i(dim in 2usize..80) {
        let x = FockOperatorF64::quadrature_x(dim).unwrap();
        let y = FockOperatorF64::quadrature_y(dim).unwrap();
        prop_assert!(commutator_block_error(&x, &y, Complex64::new(0.0, 0.5)) < 1e-10);
    }

    #[test]
    fn coherent_states_are_normalized(re in -6.0f64..6.0, im in -6.0f64..6.0, extra in 0usize..40) {
        let alpha = Complex64::new(re, im);
        let dim = qnd_core::fock::default_coherent_dim(alpha) + extra;
        let s = FockStateF64::coherent(alpha, dim).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_mean_matches_amplitude(re in -4.0f64..4.0, im in -4.0f64..4.0) {
        let alpha = Complex64::new(re, im);
        let s = FockStateF64::coherent_auto(alpha).unwrap();
        let a = FockOperatorF64::annihilation(s.dim()).unwrap();
        prop_assert!((s.expectation(&a).unwrap() - alpha).norm() < 1e-8);
    }
}

fn eigh_round_trip(op: &FockOperatorF64, vectors: &[Vec<(f64, f64)>]) -> f64 {
    let eig = op.eigh().unwrap();
    let mut worst = 0.0_f64;
    for parts in vectors {
        let v = unit_vector(parts);
        let coeffs = eig.to_eigenbasis(v.view());
        let scaled = Array1::from_iter(coeffs.iter().zip(eig.values()).map(|(c, l)| c * l));
        let via_eigen = eig.from_eigenbasis(scaled.view());
        let direct = op.apply_vec(v.view()).unwrap();
        worst = worst.max((&via_eigen - &direct).iter().fold(0.0, |m, z| m.max(z.norm())));
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1))]

    // one case drawing 100 vectors per operator keeps the decompositions shared
    #[test]
    fn eigh_round_trip_on_random_vectors(
        vectors in prop::collection::vec(prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 48), 100)
    ) {
        for op in [
            FockOperatorF64::number(48).unwrap(),
            FockOperatorF64::quadrature_x(48).unwrap(),
            FockOperatorF64::quadrature_y(48).unwrap(),
        ] {
            let err = eigh_round_trip(&op, &vectors);
            prop_assert!(err < 1e-9, "round-trip error {err:e}");
        }
    }
}

#[test]
fn eigh_round_trip_on_dense_hermitian() {
    let x = FockOperatorF64::quadrature_x(24).unwrap();
    let n = FockOperatorF64::number(24).unwrap();
    // x n + n x is Hermitian and neither diagonal nor tridiagonal
    let op = (&(&x * &n) + &(&n * &x)).into_hermitian().unwrap();
    let op = (&op + &(&x * &x)).into_hermitian().unwrap();
    let vectors: Vec<Vec<(f64, f64)>> = (0..100)
        .map(|k| {
            (0..24).map(|j| (((k * 31 + j * 7) % 13) as f64 - 6.0, ((k * 17 + j * 5) % 11) as f64 - 5.0)).collect()
        })
        .collect();
    assert!(eigh_round_trip(&op, &vectors) < 1e-9);
}

#[test]
fn number_identity_holds_on_interior_block() {
    let dim = 40;
    let x = FockOperatorF64::quadrature_x(dim).unwrap();
    let y = FockOperatorF64::quadrature_y(dim).unwrap();
    let n = FockOperatorF64::number(dim).unwrap();
    let lhs = &(&x * &x) + &(&y * &y);
    for k in 0..dim - 1 {
        for j in 0..dim - 1 {
            let expected = if k == j { n.entries()[[k, k]].re + 0.5 } else { 0.0 };
            assert!((lhs.entries()[[k, j]] - Complex64::new(expected, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn single_precision_operators_agree() {
    let x32 = qnd_core::FockOperatorF32::quadrature_x(32).unwrap();
    let x64 = FockOperatorF64::quadrature_x(32).unwrap();
    let e32 = x32.eigh().unwrap();
    let e64 = x64.eigh().unwrap();
    for (a, b) in e32.values().iter().zip(e64.values()) {
        assert!((*a as f64 - b).abs() < 1e-4);
    }
}
