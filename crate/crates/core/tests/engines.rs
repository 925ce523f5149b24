mod common;

use std::f64::consts::FRAC_PI_2;

use cliffscape::circuit::{build_brickwork, random_circuit, random_pauli, sample_clifford, sample_uniform};
use cliffscape::eval::{
    clifford_gradient, clifford_hessian, clifford_mean_sampled, fourier_expand, gradient_shift, hessian_shift,
    mean_over_clifford, Engine, Vqa,
};
use cliffscape::rng::stream;
use cliffscape::{Observable, ParamPoint, StabilizerState};
use common::*;
use proptest::prelude::*;

const CAP: usize = 12;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn engines_agree_with_dense(n in 1usize..=3, m in 1usize..6, seed in any::<u64>()) {
        let circuit = random_circuit(n, m, 5, seed).unwrap();
        let p = random_pauli(n, &mut stream(seed, 9));
        let obs = Observable::single(p.clone()).unwrap();
        let state = StabilizerState::zero(n);
        let vqa = Vqa::new(&circuit, &obs, &state).unwrap();

        let x = sample_uniform(m, seed, 1);
        let dense = zero_state_expectation(&circuit_unitary(&circuit, x.angles()), &p);
        let sv = Engine::Statevector { cap: CAP }.loss(&vqa, &x).unwrap();
        let pp = Engine::PauliProp { cap: 1 << 16 }.loss(&vqa, &x).unwrap();
        prop_assert!((sv - dense).abs() < 1e-10);
        prop_assert!((pp - dense).abs() < 1e-10);

        let c = sample_clifford(m, seed, 2);
        let at_c = c.to_param();
        let cl = Engine::Clifford.loss(&vqa, &at_c).unwrap();
        let sv = Engine::Statevector { cap: CAP }.loss(&vqa, &at_c).unwrap();
        let pp = Engine::PauliProp { cap: 1 << 16 }.loss(&vqa, &at_c).unwrap();
        prop_assert!((cl - sv).abs() < 1e-12 && (cl - pp).abs() < 1e-12);
        prop_assert!(cl == -1.0 || cl == 0.0 || cl == 1.0);
    }

    #[test]
    fn shift_rules_match_finite_differences(seed in any::<u64>()) {
        let circuit = random_circuit(2, 4, 4, seed).unwrap();
        let p = random_pauli(2, &mut stream(seed, 3));
        let obs = Observable::single(p).unwrap();
        let state = StabilizerState::zero(2);
        let vqa = Vqa::new(&circuit, &obs, &state).unwrap();
        let eng = Engine::Statevector { cap: CAP };
        let x = sample_uniform(4, seed, 0);
        let f = |y: &ParamPoint| eng.loss(&vqa, y).unwrap();
        for k in 0..4 {
            let g = gradient_shift(eng, &vqa, &x, k).unwrap();
            for h in [1e-4, 1e-6] {
                let fd = (f(&x.shifted(k, h)) - f(&x.shifted(k, -h))) / (2.0 * h);
                prop_assert!((g - fd).abs() < 1e-6, "k={k} h={h}: {g} vs {fd}");
            }
            for l in 0..4 {
                let hs = hessian_shift(eng, &vqa, &x, k, l).unwrap();
                let h = 1e-4;
                let fd = (f(&x.shifted(k, h).shifted(l, h)) - f(&x.shifted(k, h).shifted(l, -h))
                    - f(&x.shifted(k, -h).shifted(l, h)) + f(&x.shifted(k, -h).shifted(l, -h)))
                    / (4.0 * h * h);
                prop_assert!((hs - fd).abs() < 1e-5, "k={k} l={l}: {hs} vs {fd}");
            }
        }
    }

    #[test]
    fn clifford_derivatives_match_statevector(seed in any::<u64>()) {
        let circuit = random_circuit(3, 5, 6, seed).unwrap();
        let p = random_pauli(3, &mut stream(seed, 4));
        let obs = Observable::single(p).unwrap();
        let state = StabilizerState::zero(3);
        let vqa = Vqa::new(&circuit, &obs, &state).unwrap();
        let c = sample_clifford(5, seed, 0);
        let eng = Engine::Statevector { cap: CAP };
        for k in 0..5 {
            let exact = clifford_gradient(&vqa, &c, k).unwrap();
            prop_assert!((exact - gradient_shift(eng, &vqa, &c.to_param(), k).unwrap()).abs() < 1e-12);
            for l in 0..5 {
                let exact = clifford_hessian(&vqa, &c, k, l).unwrap();
                prop_assert!((exact - hessian_shift(eng, &vqa, &c.to_param(), k, l).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fourier_expansion_reproduces_the_loss(seed in any::<u64>()) {
        let circuit = random_circuit(3, 6, 6, seed).unwrap();
        let p = random_pauli(3, &mut stream(seed, 5));
        let state = StabilizerState::zero(3);
        let e = fourier_expand(&circuit, &state, &p, 1 << 16).unwrap();
        let x = sample_uniform(6, seed, 7);
        let dense = zero_state_expectation(&circuit_unitary(&circuit, x.angles()), &p);
        prop_assert!((e.evaluate(&x) - dense).abs() < 1e-10);
    }
}

#[test]
fn sampled_clifford_mean_is_within_three_sigma() {
    let circuit = build_brickwork(2, 1).unwrap();
    let state = StabilizerState::zero(2);
    for p in all_paulis(2).into_iter().skip(1) {
        let obs = Observable::single(p.clone()).unwrap();
        let vqa = Vqa::new(&circuit, &obs, &state).unwrap();
        let exact = mean_over_clifford(&vqa, 10).unwrap();
        let samples = 4000;
        let est = clifford_mean_sampled(&vqa, samples, 17);
        // values lie in [-1, 1]
        let sigma = (1.0 / samples as f64).sqrt();
        assert!((est - exact).abs() <= 3.0 * sigma, "{p}: {est} vs {exact}");
    }
}

#[test]
fn chebyshev_bound_holds_for_uniform_samples() {
    let circuit = build_brickwork(4, 3).unwrap();
    let state = StabilizerState::zero(4);
    let p: cliffscape::PauliString = "+ZZII".parse().unwrap();
    let e = fourier_expand(&circuit, &state, &p, 1 << 20).unwrap();
    let (mu, var) = (e.constant_term(), e.variance());
    let m = circuit.num_params();
    let samples = 2000;
    let values: Vec<f64> = (0..samples).map(|i| e.evaluate(&sample_uniform(m, 3, i))).collect();
    let empirical_var = values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / samples as f64;
    assert!((empirical_var - var).abs() < 0.25 * var.max(1e-3), "{empirical_var} vs {var}");
    for t in [0.1, 0.2, 0.4] {
        let frac = values.iter().filter(|v| (*v - mu).abs() >= t).count() as f64 / samples as f64;
        assert!(frac <= var / (t * t) + 0.03, "t={t}: {frac} > {}", var / (t * t));
    }
}

#[test]
fn clifford_engine_rejects_off_grid_points() {
    let circuit = build_brickwork(2, 1).unwrap();
    let obs = Observable::single("+ZZ".parse().unwrap()).unwrap();
    let state = StabilizerState::zero(2);
    let vqa = Vqa::new(&circuit, &obs, &state).unwrap();
    let mut a = vec![0.0; circuit.num_params()];
    a[0] = 0.3;
    assert!(Engine::Clifford.loss(&vqa, &ParamPoint::new(a)).is_err());
    a = vec![FRAC_PI_2; circuit.num_params()];
    assert!(Engine::Clifford.loss(&vqa, &ParamPoint::new(a)).is_ok());
}

#[test]
fn statevector_cap_is_reported() {
    let circuit = build_brickwork(4, 1).unwrap();
    let obs = Observable::single("+ZZII".parse().unwrap()).unwrap();
    let state = StabilizerState::zero(4);
    let vqa = Vqa::new(&circuit, &obs, &state).unwrap();
    let err = Engine::Statevector { cap: 3 }.loss(&vqa, &ParamPoint::zeros(circuit.num_params())).unwrap_err();
    assert!(err.is_cap());
}
