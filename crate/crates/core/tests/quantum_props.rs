mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use relcrypt::qsmall::{
    epr_distinguisher, epr_test_success, partial_trace, tensor, DensityMatrix, QuantumChannel, Subsystem,
};

const TOL: f64 = 1e-9;

fn gaussianish(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

/// Mixture of up to three random pure states.
fn random_state(r: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let n = r.random_range(1..=3);
    let weights: Vec<f64> = (0..n).map(|_| r.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for w in weights {
        let v = nalgebra::DVector::from_fn(d, |_, _| gaussianish(r));
        let v = &v / Complex64::new(v.norm(), 0.0);
        m += (&v * v.adjoint()) * Complex64::new(w / total, 0.0);
    }
    DensityMatrix::new(m).unwrap()
}

fn random_unitary(r: &mut ChaCha8Rng, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |_, _| gaussianish(r)).qr().q()
}

/// `Σ |tr K|² / d²` for a channel given by Kraus operators.
fn trace_oracle(kraus: &[DMatrix<Complex64>]) -> f64 {
    let d = kraus[0].nrows() as f64;
    kraus.iter().map(|k| k.trace().norm_sqr()).sum::<f64>() / (d * d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replacement_always_gives_inverse_square(seed in any::<u64>(), d in 2usize..=6) {
        let mut r = common::rng(seed);
        let tau = random_state(&mut r, d);
        let s = epr_test_success(&QuantumChannel::replace(d, &tau).unwrap()).unwrap();
        prop_assert!((s - 1.0 / (d * d) as f64).abs() < TOL, "{s}");
        let rep = epr_distinguisher(d, &tau).unwrap();
        prop_assert!((rep.advantage - (1.0 - 1.0 / (d * d) as f64)).abs() < TOL);
    }

    #[test]
    fn unitary_channels_match_the_trace_oracle(seed in any::<u64>(), d in 2usize..=5) {
        let mut r = common::rng(seed);
        let u = random_unitary(&mut r, d);
        let s = epr_test_success(&QuantumChannel::new(d, d, vec![u.clone()]).unwrap()).unwrap();
        prop_assert!((s - trace_oracle(&[u])).abs() < TOL);
    }

    #[test]
    fn success_is_linear_in_the_channel(seed in any::<u64>(), d in 2usize..=4, q in 0.0f64..=1.0) {
        let mut r = common::rng(seed);
        let a = QuantumChannel::new(d, d, vec![random_unitary(&mut r, d)]).unwrap();
        let tau = random_state(&mut r, d);
        let b = QuantumChannel::replace(d, &tau).unwrap();
        let mixed = a.mixture(q, &b).unwrap();
        let (fa, fb) = (epr_test_success(&a).unwrap(), epr_test_success(&b).unwrap());
        prop_assert!((epr_test_success(&mixed).unwrap() - (q * fa + (1.0 - q) * fb)).abs() < TOL);
        let choi = mixed.choi().unwrap();
        let want = a.choi().unwrap().matrix() * Complex64::new(q, 0.0)
            + b.choi().unwrap().matrix() * Complex64::new(1.0 - q, 0.0);
        prop_assert!((choi.matrix() - want).norm() < TOL);
    }

    #[test]
    fn partial_trace_recovers_factors(seed in any::<u64>(), d1 in 1usize..=3, d2 in 1usize..=3) {
        let mut r = common::rng(seed);
        let (a, b) = (random_state(&mut r, d1), random_state(&mut r, d2));
        let ab = tensor(&a, &b).unwrap();
        let ta = partial_trace(&ab, (d1, d2), Subsystem::Second).unwrap();
        let tb = partial_trace(&ab, (d1, d2), Subsystem::First).unwrap();
        prop_assert!((ta.matrix() - a.matrix()).norm() < TOL);
        prop_assert!((tb.matrix() - b.matrix()).norm() < TOL);
    }
}

#[test]
fn identity_and_depolarizing() {
    for d in 2..=8 {
        assert!((epr_test_success(&QuantumChannel::identity(d).unwrap()).unwrap() - 1.0).abs() < TOL);
        let dep = epr_test_success(&QuantumChannel::depolarizing(d).unwrap()).unwrap();
        assert!((dep - 1.0 / (d * d) as f64).abs() < TOL);
    }
}

#[test]
fn reduced_choi_state_is_maximally_mixed() {
    let mut r = common::rng(11);
    for d in 2..=4 {
        let ch = QuantumChannel::new(d, d, vec![random_unitary(&mut r, d)]).unwrap();
        let reduced = partial_trace(&ch.choi().unwrap(), (d, d), Subsystem::First).unwrap();
        let mixed = DensityMatrix::maximally_mixed(d).unwrap();
        assert!((reduced.matrix() - mixed.matrix()).norm() < TOL);
    }
}
