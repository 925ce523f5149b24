//! Branching Heisenberg propagation of a single Pauli observable.
//!
//! Walking the circuit backwards, a rotation whose generator `G` anticommutes
//! with the current branch `P` splits it into `cos(phi) P + sin(phi) iGP`.
//! Terminal branches are scored against the stabilizer state. Keeping the
//! trigonometric signature of each branch gives the exact Fourier expansion of
//! the loss; collapsing signatures numerically evaluates the loss at a point.

use std::collections::HashMap;
use std::hash::BuildHasherDefault;
use std::collections::hash_map::DefaultHasher;

use crate::circuit::{Op, ParamCircuit, ParamPoint};
use crate::clifford::{conj_gate_in_place, StabilizerState};
use crate::error::{Error, Result};
use crate::pauli::{Observable, PauliString};

/// Default cap on live branches.
pub const DEFAULT_TERM_CAP: usize = 1 << 20;
const PRUNE: f64 = 1e-15;

type DetMap<K, V> = HashMap<K, V, BuildHasherDefault<DefaultHasher>>;

/// Insertion-ordered accumulator keyed by `K`.
struct Accumulator<K> {
    index: DetMap<K, usize>,
    items: Vec<(K, f64)>,
}

impl<K: std::hash::Hash + Eq + Clone> Accumulator<K> {
    fn with_capacity(n: usize) -> Self {
        Accumulator {
            index: DetMap::with_capacity_and_hasher(n, Default::default()),
            items: Vec::with_capacity(n),
        }
    }

    fn add(&mut self, key: K, c: f64) {
        match self.index.get(&key) {
            Some(&i) => self.items[i].1 += c,
            None => {
                self.index.insert(key.clone(), self.items.len());
                self.items.push((key, c));
            }
        }
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn into_items(self) -> Vec<(K, f64)> {
        self.items.into_iter().filter(|(_, c)| c.abs() > PRUNE).collect()
    }
}

/// Strips the sign of a Hermitian branch into its coefficient.
fn normalize(p: PauliString, c: f64) -> (PauliString, f64) {
    match p.real_sign() {
        Some(1) => (p, c),
        Some(_) => (p.negated(), -c),
        None => unreachable!("branches of a Hermitian observable stay Hermitian"),
    }
}

fn branch_i_g_p(generator: &PauliString, p: &PauliString) -> PauliString {
    let mut out = p.clone();
    out.mul_left_assign(generator);
    out.add_phase(1);
    out
}

fn check_inputs(circuit: &ParamCircuit, state: &StabilizerState, p: &PauliString) -> Result<()> {
    if p.num_qubits() != circuit.num_qubits() {
        return Err(Error::SizeMismatch(circuit.num_qubits(), p.num_qubits()));
    }
    if state.num_qubits() != circuit.num_qubits() {
        return Err(Error::SizeMismatch(circuit.num_qubits(), state.num_qubits()));
    }
    if !p.is_hermitian() {
        return Err(Error::NonHermitian(p.to_string()));
    }
    Ok(())
}

/// Loss of a single Hermitian Pauli at an arbitrary point, branches merged by
/// Pauli string.
pub fn eval_pauliprop(
    circuit: &ParamCircuit,
    state: &StabilizerState,
    p: &PauliString,
    point: &ParamPoint,
    cap: usize,
) -> Result<f64> {
    check_inputs(circuit, state, p)?;
    if point.len() != circuit.num_params() {
        return Err(Error::PointLength { expected: circuit.num_params(), got: point.len() });
    }
    let angles = point.angles();
    let mut terms = vec![normalize(p.clone(), 1.0)];
    for op in circuit.ops().iter().rev() {
        match op {
            Op::Gate(g) => {
                for t in terms.iter_mut() {
                    conj_gate_in_place(g, &mut t.0);
                    let (q, c) = normalize(t.0.clone(), t.1);
                    *t = (q, c);
                }
            }
            Op::Rotation { generator, param } => {
                let (s, c) = angles[*param].sin_cos();
                let mut acc = Accumulator::with_capacity(terms.len() * 2);
                for (q, coef) in terms {
                    if q.commutes_with(generator) {
                        acc.add(q, coef);
                    } else {
                        let (r, rc) = normalize(branch_i_g_p(generator, &q), coef * s);
                        acc.add(q, coef * c);
                        acc.add(r, rc);
                    }
                    if acc.len() > cap {
                        return Err(Error::TermCap { terms: acc.len(), cap });
                    }
                }
                terms = acc.into_items();
            }
        }
    }
    let mut total = 0.0;
    for (q, c) in &terms {
        total += c * state.expectation_unchecked(q) as f64;
    }
    Ok(total)
}

/// Trigonometric factor attached to one angle in a Fourier monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigSymbol {
    One,
    Cos,
    Sin,
}

/// A monomial `coefficient * prod_k symbol_k(phi_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierTerm {
    cos_mask: Vec<u64>,
    sin_mask: Vec<u64>,
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Signature {
    cos_mask: Vec<u64>,
    sin_mask: Vec<u64>,
}

impl Signature {
    fn new(m: usize) -> Self {
        let w = m.div_ceil(64);
        Signature { cos_mask: vec![0; w], sin_mask: vec![0; w] }
    }

    fn with(&self, k: usize, sym: TrigSymbol) -> Self {
        let mut s = self.clone();
        let (w, b) = (k / 64, 1u64 << (k % 64));
        match sym {
            TrigSymbol::Cos => s.cos_mask[w] |= b,
            TrigSymbol::Sin => s.sin_mask[w] |= b,
            TrigSymbol::One => {}
        }
        s
    }
}

impl FourierTerm {
    pub fn symbol(&self, k: usize) -> TrigSymbol {
        let (w, b) = (k / 64, 1u64 << (k % 64));
        if self.cos_mask[w] & b != 0 {
            TrigSymbol::Cos
        } else if self.sin_mask[w] & b != 0 {
            TrigSymbol::Sin
        } else {
            TrigSymbol::One
        }
    }

    /// Number of non-constant factors.
    pub fn level(&self) -> usize {
        self.cos_mask
            .iter()
            .chain(&self.sin_mask)
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    fn signature(&self) -> Signature {
        Signature { cos_mask: self.cos_mask.clone(), sin_mask: self.sin_mask.clone() }
    }

    pub fn evaluate(&self, angles: &[f64]) -> f64 {
        let mut v = self.coefficient;
        for (k, &a) in angles.iter().enumerate() {
            match self.symbol(k) {
                TrigSymbol::One => {}
                TrigSymbol::Cos => v *= a.cos(),
                TrigSymbol::Sin => v *= a.sin(),
            }
        }
        v
    }
}

/// Exact multi-angle trigonometric expansion of a loss function.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierExpansion {
    m: usize,
    terms: Vec<FourierTerm>,
}

impl FourierExpansion {
    fn from_accumulator(m: usize, acc: Accumulator<Signature>) -> Self {
        let mut terms: Vec<FourierTerm> = acc
            .into_items()
            .into_iter()
            .map(|(sig, coefficient)| FourierTerm {
                cos_mask: sig.cos_mask,
                sin_mask: sig.sin_mask,
                coefficient,
            })
            .collect();
        terms.sort_by(|a, b| {
            (a.level(), &a.cos_mask, &a.sin_mask).cmp(&(b.level(), &b.cos_mask, &b.sin_mask))
        });
        FourierExpansion { m, terms }
    }

    pub fn num_params(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    /// Coefficient of the all-constant monomial, i.e. the uniform average.
    pub fn constant_term(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.level() == 0)
            .map(|t| t.coefficient)
            .sum()
    }

    pub fn evaluate(&self, point: &ParamPoint) -> f64 {
        crate::par::pairwise_sum(
            &self.terms.iter().map(|t| t.evaluate(point.angles())).collect::<Vec<_>>(),
        )
    }

    /// Term counts indexed by level `0..=m`.
    pub fn level_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.m + 1];
        for t in &self.terms {
            h[t.level()] += 1;
        }
        h
    }

    /// Variance over uniform angles; distinct monomials are orthogonal and
    /// each non-constant factor has mean square 1/2.
    pub fn variance(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.level() > 0)
            .map(|t| t.coefficient * t.coefficient * 0.5f64.powi(t.level() as i32))
            .sum()
    }

    /// Substitutes a fixed value for angle `k`.
    pub fn substitute(&self, k: usize, angle: f64) -> FourierExpansion {
        let mut acc = Accumulator::with_capacity(self.terms.len());
        for t in &self.terms {
            let factor = match t.symbol(k) {
                TrigSymbol::One => 1.0,
                TrigSymbol::Cos => angle.cos(),
                TrigSymbol::Sin => angle.sin(),
            };
            let mut sig = t.signature();
            let (w, b) = (k / 64, !(1u64 << (k % 64)));
            sig.cos_mask[w] &= b;
            sig.sin_mask[w] &= b;
            acc.add(sig, t.coefficient * factor);
        }
        FourierExpansion::from_accumulator(self.m, acc)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &FourierExpansion, b: f64) -> FourierExpansion {
        let mut acc = Accumulator::with_capacity(self.terms.len() + other.terms.len());
        for t in &self.terms {
            acc.add(t.signature(), a * t.coefficient);
        }
        for t in &other.terms {
            acc.add(t.signature(), b * t.coefficient);
        }
        FourierExpansion::from_accumulator(self.m.max(other.m), acc)
    }
}

/// Fourier expansion of a single-Pauli loss. Fails with [`Error::TermCap`]
/// when the number of live branches exceeds `cap`.
pub fn fourier_expand(
    circuit: &ParamCircuit,
    state: &StabilizerState,
    p: &PauliString,
    cap: usize,
) -> Result<FourierExpansion> {
    check_inputs(circuit, state, p)?;
    let m = circuit.num_params();
    let (p0, c0) = normalize(p.clone(), 1.0);
    let mut branches: Vec<(PauliString, Signature, f64)> = vec![(p0, Signature::new(m), c0)];
    for op in circuit.ops().iter().rev() {
        match op {
            Op::Gate(g) => {
                for b in branches.iter_mut() {
                    conj_gate_in_place(g, &mut b.0);
                    let (q, c) = normalize(b.0.clone(), b.2);
                    b.0 = q;
                    b.2 = c;
                }
            }
            Op::Rotation { generator, param } => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                let mut acc: DetMap<(PauliString, Signature), usize> = DetMap::default();
                let mut push = |key: (PauliString, Signature), c: f64, next: &mut Vec<_>| {
                    match acc.get(&key) {
                        Some(&i) => {
                            let slot: &mut (PauliString, Signature, f64) = &mut next[i];
                            slot.2 += c;
                        }
                        None => {
                            acc.insert(key.clone(), next.len());
                            next.push((key.0, key.1, c));
                        }
                    }
                };
                for (q, sig, coef) in branches {
                    if q.commutes_with(generator) {
                        push((q, sig), coef, &mut next);
                    } else {
                        let (r, rc) = normalize(branch_i_g_p(generator, &q), coef);
                        let sin_sig = sig.with(*param, TrigSymbol::Sin);
                        push((q, sig.with(*param, TrigSymbol::Cos)), coef, &mut next);
                        push((r, sin_sig), rc, &mut next);
                    }
                    if next.len() > cap {
                        return Err(Error::TermCap { terms: next.len(), cap });
                    }
                }
                next.retain(|b| b.2.abs() > PRUNE);
                branches = next;
            }
        }
    }
    let mut acc = Accumulator::with_capacity(branches.len());
    for (q, sig, c) in branches {
        let e = state.expectation_unchecked(&q);
        if e != 0 {
            acc.add(sig, c * e as f64);
        }
    }
    Ok(FourierExpansion::from_accumulator(m, acc))
}

/// Fourier expansion of a Pauli-sum loss, term by term.
pub fn fourier_expand_observable(
    circuit: &ParamCircuit,
    state: &StabilizerState,
    o: &Observable,
    cap: usize,
) -> Result<FourierExpansion> {
    let mut total = FourierExpansion { m: circuit.num_params(), terms: Vec::new() };
    for (c, p) in o.terms() {
        let e = fourier_expand(circuit, state, p, cap)?;
        total = total.combine(1.0, &e, *c);
    }
    Ok(total)
}
