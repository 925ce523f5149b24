mod common;

use std::collections::HashSet;
use std::f64::consts::TAU;

use cliffscape::circuit::{build_brickwork, build_fixture, random_circuit, random_pauli, sample_clifford, FixtureKind};
use cliffscape::eval::{final_state, pauli_value_clifford, Engine, Vqa};
use cliffscape::landscape::{
    approximate_lm_check, greedy_siloed_search, independent_remainder, null_directions, SearchBudget, Verdict,
};
use cliffscape::pauli::{enumerate_family, FamilyKind};
use cliffscape::rng::stream;
use cliffscape::{CliffordPoint, Observable, ParamPoint, PauliString, SplitPoint, StabilizerState};
use proptest::prelude::*;
use rand::Rng;

const CAP: usize = 12;

fn value_at(circuit: &cliffscape::ParamCircuit, p: &PauliString, x: &ParamPoint) -> f64 {
    final_state(circuit, &StabilizerState::zero(circuit.num_qubits()), x, CAP).unwrap().expectation(p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn null_directions_leave_the_loss_constant(n in 1usize..=3, m in 1usize..8, seed in any::<u64>()) {
        let circuit = random_circuit(n, m, 6, seed).unwrap();
        let p = random_pauli(n, &mut stream(seed, 1));
        let c = sample_clifford(m, seed, 2);
        let null = null_directions(&circuit, &c, &p).unwrap();
        let split = SplitPoint::new(c.clone(), (0..m).filter(|k| !null.contains(k))).unwrap();
        let reference = pauli_value_clifford(&circuit, &StabilizerState::zero(n), &p, c.quarters()) as f64;
        let mut r = stream(seed, 3);
        for _ in 0..8 {
            let free: Vec<f64> = (0..null.len()).map(|_| r.random_range(0.0..TAU)).collect();
            let x = split.restrict_uniform(&free).unwrap();
            prop_assert!((value_at(&circuit, &p, &x) - reference).abs() < 1e-12);
        }
        if reference != 0.0 {
            for k in (0..m).filter(|k| !null.contains(k)) {
                for d in [1i8, -1] {
                    let moved = c.shifted(k, d);
                    let v = pauli_value_clifford(&circuit, &StabilizerState::zero(n), &p, moved.quarters());
                    prop_assert_ne!(v as f64, reference, "k={} d={}", k, d);
                }
            }
        }
    }
}

/// Brute-force group closure of `gens`, phases dropped.
fn closure(n: usize, gens: &[PauliString]) -> HashSet<String> {
    let strip = |p: &PauliString| PauliString::from_letters(&p.letters(), 0).to_string();
    let mut set = HashSet::from([strip(&PauliString::identity(n))]);
    let mut frontier = vec![PauliString::identity(n)];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q = p.mul(g).unwrap();
            if set.insert(strip(&q)) {
                frontier.push(q);
            }
        }
    }
    set
}

#[test]
fn greedy_search_finds_sound_siloed_minima() {
    for (n, layers, seed) in [(3usize, 4usize, 1u64), (4, 6, 2), (4, 10, 3), (5, 8, 4)] {
        let circuit = build_brickwork(n, layers).unwrap();
        let state = StabilizerState::zero(n);
        let family = enumerate_family(FamilyKind::Weight2All, n).unwrap();
        let budget = SearchBudget::for_family(n, family.len(), seed);
        let cp = greedy_siloed_search(&circuit, &state, &family, &budget).unwrap();
        assert!(!cp.is_empty(), "n={n} layers={layers}: no minimum found");
        assert!(cp.optimized.len() <= n);
        assert!(cp.values.iter().all(|&v| v == -1));
        assert_eq!(cp.basis.rank(), cp.optimized.len());
        for (i, a) in cp.optimized.iter().enumerate() {
            for b in &cp.optimized[i + 1..] {
                assert!(a.commutes(b).unwrap());
            }
        }
        for w in cp.history.windows(2) {
            assert!(w[1].free_before == w[0].free_after && w[1].free_after <= w[1].free_before);
        }
        // every optimized term stays at -1 over the whole free silo
        let mut r = stream(seed, 99);
        for _ in 0..6 {
            let free: Vec<f64> = (0..cp.split.free().len()).map(|_| r.random_range(0.0..TAU)).collect();
            let x = cp.split.restrict_uniform(&free).unwrap();
            for p in &cp.optimized {
                assert!((value_at(&circuit, p, &x) + 1.0).abs() < 1e-12, "{p}");
            }
        }
        // the remainder is exactly the family minus the generated group
        let group = closure(n, &cp.optimized);
        let remainder: HashSet<String> = independent_remainder(&family, &cp).iter().map(|p| p.to_string()).collect();
        for p in &family {
            assert_eq!(remainder.contains(&p.to_string()), !group.contains(&p.to_string()), "{p}");
        }
    }
}

#[test]
fn greedy_search_is_deterministic() {
    let circuit = build_brickwork(4, 8).unwrap();
    let state = StabilizerState::zero(4);
    let family = enumerate_family(FamilyKind::Weight2All, 4).unwrap();
    let budget = SearchBudget::for_family(4, family.len(), 11);
    let a = greedy_siloed_search(&circuit, &state, &family, &budget).unwrap();
    let b = cliffscape::par::with_threads(1, || greedy_siloed_search(&circuit, &state, &family, &budget).unwrap());
    assert_eq!(a, b);
}

fn product_rx(n: usize, extra: &[(f64, &str)]) -> (cliffscape::ParamCircuit, Observable) {
    let (c, o) = build_fixture(FixtureKind::ProductRx, n).unwrap();
    let mut terms = o.terms().to_vec();
    terms.extend(extra.iter().map(|(w, s)| (*w, s.parse().unwrap())));
    (c, Observable::new(terms).unwrap())
}

#[test]
fn approximate_minimum_verdicts() {
    let (c, o) = product_rx(2, &[]);
    let state = StabilizerState::zero(2);
    let vqa = Vqa::new(&c, &o, &state).unwrap();

    // cos(pi) cos(0) = -1, the global minimum
    let min = CliffordPoint::new(vec![2, 0]);
    assert_eq!(Engine::Clifford.loss(&vqa, &min.to_param()).unwrap(), -1.0);
    let r = approximate_lm_check(&vqa, &min, 1e-3, 128).unwrap();
    assert_eq!(r.verdict, Verdict::ZeroApprox);
    assert_eq!(r.max_abs_gradient, 0.0);
    assert!(r.min_hessian_eigenvalue.unwrap() > 0.0);

    // a non-null quarter moved off the minimum
    let r = approximate_lm_check(&vqa, &min.shifted(0, 1), 1e-3, 128).unwrap();
    assert_eq!(r.verdict, Verdict::NotCritical);

    // the maximum has zero gradient but a negative-definite Hessian
    let r = approximate_lm_check(&vqa, &CliffordPoint::zeros(2), 1e-3, 128).unwrap();
    assert_eq!(r.verdict, Verdict::NotCritical);

    // a small tilt makes the minimum only approximately critical
    let (c, o) = product_rx(2, &[(1e-3, "+YI")]);
    let vqa = Vqa::new(&c, &o, &state).unwrap();
    let r = approximate_lm_check(&vqa, &min, 1e-2, 128).unwrap();
    assert!((r.max_abs_gradient - 1e-3).abs() < 1e-15);
    assert_eq!(r.verdict, Verdict::EpsApprox);
    assert_eq!(approximate_lm_check(&vqa, &min, 1e-4, 128).unwrap().verdict, Verdict::NotCritical);

    // without a Hessian the verdict rests on the gradient alone
    let r = approximate_lm_check(&vqa, &min, 1e-2, 0).unwrap();
    assert!(r.min_hessian_eigenvalue.is_none());
    assert_eq!(r.verdict, Verdict::EpsApprox);
    assert!(approximate_lm_check(&vqa, &min, -1.0, 128).is_err());
}

#[test]
fn product_rx_has_no_null_directions() {
    let (c, o) = build_fixture(FixtureKind::ProductRx, 5).unwrap();
    for i in 0..20 {
        let q = sample_clifford(5, 8, i);
        assert!(null_directions(&c, &q, &o.terms()[0].1).unwrap().is_empty());
    }
}

#[test]
fn product_rx_at_all_pi_is_an_extremum() {
    for n in 1..=5 {
        let (c, o) = product_rx(n, &[]);
        let state = StabilizerState::zero(n);
        let vqa = Vqa::new(&c, &o, &state).unwrap();
        let pi = CliffordPoint::new(vec![2; n]);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(Engine::Clifford.loss(&vqa, &pi.to_param()).unwrap(), sign);
        let r = approximate_lm_check(&vqa, &pi, 1e-3, 128).unwrap();
        assert_eq!(r.max_abs_gradient, 0.0);
        // Hessian is -sign times the identity
        assert_eq!(r.min_hessian_eigenvalue.unwrap(), -sign);
        let expected = if n % 2 == 1 { Verdict::ZeroApprox } else { Verdict::NotCritical };
        assert_eq!(r.verdict, expected, "n = {n}");
    }
}
