//! Heisenberg-picture conjugation through Clifford gates and quarter-turn
//! Pauli rotations, and Pauli expectations in stabilizer states.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Constant Clifford gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    CX(usize, usize),
    CZ(usize, usize),
    Swap(usize, usize),
}

impl CliffordGate {
    pub fn qubits(&self) -> Vec<usize> {
        use CliffordGate::*;
        match *self {
            H(q) | S(q) | Sdg(q) | X(q) | Y(q) | Z(q) => vec![q],
            CX(a, b) | CZ(a, b) | Swap(a, b) => vec![a, b],
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if qs.iter().any(|&q| q >= n) {
            return Err(Error::BadTarget(format!("{self} on {n} qubits")));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::BadTarget(format!("{self} repeats a qubit")));
        }
        Ok(())
    }

    pub fn is_self_inverse(&self) -> bool {
        !matches!(self, CliffordGate::S(_) | CliffordGate::Sdg(_))
    }

    pub fn inverse(&self) -> CliffordGate {
        match *self {
            CliffordGate::S(q) => CliffordGate::Sdg(q),
            CliffordGate::Sdg(q) => CliffordGate::S(q),
            g => g,
        }
    }

    fn mnemonic(&self) -> &'static str {
        use CliffordGate::*;
        match self {
            H(_) => "H",
            S(_) => "S",
            Sdg(_) => "SDG",
            X(_) => "X",
            Y(_) => "Y",
            Z(_) => "Z",
            CX(..) => "CX",
            CZ(..) => "CZ",
            Swap(..) => "SWAP",
        }
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

impl FromStr for CliffordGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let name = parts.next().ok_or_else(|| Error::Parse("empty gate".into()))?;
        let qs = parts
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad qubit index {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let one = |f: fn(usize) -> CliffordGate| match qs.as_slice() {
            [q] => Ok(f(*q)),
            _ => Err(Error::Parse(format!("{name} takes one qubit: {s:?}"))),
        };
        let two = |f: fn(usize, usize) -> CliffordGate| match qs.as_slice() {
            [a, b] => Ok(f(*a, *b)),
            _ => Err(Error::Parse(format!("{name} takes two qubits: {s:?}"))),
        };
        match name {
            "H" => one(CliffordGate::H),
            "S" => one(CliffordGate::S),
            "SDG" => one(CliffordGate::Sdg),
            "X" => one(CliffordGate::X),
            "Y" => one(CliffordGate::Y),
            "Z" => one(CliffordGate::Z),
            "CX" => two(CliffordGate::CX),
            "CZ" => two(CliffordGate::CZ),
            "SWAP" => two(CliffordGate::Swap),
            _ => Err(Error::Parse(format!("unknown gate {name:?}"))),
        }
    }
}

/// In-place `P <- g† P g`. Targets are assumed valid.
pub(crate) fn conj_gate_in_place(g: &CliffordGate, p: &mut PauliString) {
    use CliffordGate::*;
    match *g {
        H(q) => {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            p.set_bits(q, z, x);
            if x && z {
                p.add_phase(2);
            }
        }
        S(q) => {
            if p.x_bit(q) {
                let z = p.z_bit(q);
                p.set_bits(q, true, !z);
                p.add_phase(3);
            }
        }
        Sdg(q) => {
            if p.x_bit(q) {
                let z = p.z_bit(q);
                p.set_bits(q, true, !z);
                p.add_phase(1);
            }
        }
        X(q) => {
            if p.z_bit(q) {
                p.add_phase(2);
            }
        }
        Y(q) => {
            if p.x_bit(q) != p.z_bit(q) {
                p.add_phase(2);
            }
        }
        Z(q) => {
            if p.x_bit(q) {
                p.add_phase(2);
            }
        }
        CX(c, t) => {
            let (xc, zc, xt, zt) = (p.x_bit(c), p.z_bit(c), p.x_bit(t), p.z_bit(t));
            p.set_bits(c, xc, zc ^ zt);
            p.set_bits(t, xt ^ xc, zt);
        }
        CZ(a, b) => {
            let (xa, za, xb, zb) = (p.x_bit(a), p.z_bit(a), p.x_bit(b), p.z_bit(b));
            if xa && xb {
                p.add_phase(2);
            }
            p.set_bits(a, xa, za ^ xb);
            p.set_bits(b, xb, zb ^ xa);
        }
        Swap(a, b) => {
            let (xa, za, xb, zb) = (p.x_bit(a), p.z_bit(a), p.x_bit(b), p.z_bit(b));
            p.set_bits(a, xb, zb);
            p.set_bits(b, xa, za);
        }
    }
}

/// Returns `g† P g`, phase-exact.
pub fn conj_gate(g: &CliffordGate, p: &PauliString) -> Result<PauliString> {
    g.validate(p.num_qubits())?;
    let mut out = p.clone();
    conj_gate_in_place(g, &mut out);
    Ok(out)
}

/// In-place conjugation by a quarter-turn rotation `exp(-i G k pi/4)`.
/// `generator` must be Hermitian with matching size.
#[inline]
pub(crate) fn conj_rotation_in_place(generator: &PauliString, quarters: u8, p: &mut PauliString) {
    if p.commutes_with(generator) {
        return;
    }
    match quarters & 3 {
        0 => {}
        1 => {
            p.mul_left_assign(generator);
            p.add_phase(1);
        }
        2 => p.add_phase(2),
        _ => {
            p.mul_left_assign(generator);
            p.add_phase(3);
        }
    }
}

/// Returns `exp(iG theta/2) P exp(-iG theta/2)` with `theta = k pi/2`.
pub fn conj_rotation_quarter(generator: &PauliString, quarters: u8, p: &PauliString) -> Result<PauliString> {
    if generator.num_qubits() != p.num_qubits() {
        return Err(Error::SizeMismatch(generator.num_qubits(), p.num_qubits()));
    }
    if !generator.is_hermitian() {
        return Err(Error::NonHermitian(generator.to_string()));
    }
    let mut out = p.clone();
    conj_rotation_in_place(generator, quarters, &mut out);
    Ok(out)
}

/// Pure stabilizer state given by n independent commuting generators.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerState {
    n: usize,
    generators: Vec<PauliString>,
    /// Row-reduced generators with their pivot in symplectic index space.
    reduced: Vec<(usize, PauliString)>,
    zero: bool,
}

fn symplectic_bit(p: &PauliString, i: usize) -> bool {
    let n = p.num_qubits();
    if i < n {
        p.x_bit(i)
    } else {
        p.z_bit(i - n)
    }
}

impl StabilizerState {
    /// The computational basis state |0...0>.
    pub fn zero(n: usize) -> Self {
        let gens: Vec<PauliString> = (0..n)
            .map(|q| PauliString::single(n, q, crate::pauli::Letter::Z))
            .collect();
        let mut s = Self::from_generators(n, gens).expect("Z generators are valid");
        s.zero = true;
        s
    }

    pub fn from_generators(n: usize, generators: Vec<PauliString>) -> Result<Self> {
        if generators.len() != n {
            return Err(Error::InvalidArgument(format!(
                "need {n} stabilizer generators, got {}",
                generators.len()
            )));
        }
        for g in &generators {
            if g.num_qubits() != n {
                return Err(Error::SizeMismatch(n, g.num_qubits()));
            }
            if g.real_sign().is_none() {
                return Err(Error::NonHermitian(g.to_string()));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(Error::InvalidArgument(format!(
                        "generators {a} and {b} anticommute"
                    )));
                }
            }
        }
        let mut reduced: Vec<(usize, PauliString)> = Vec::with_capacity(n);
        for g in &generators {
            let mut r = g.clone();
            for (pivot, row) in &reduced {
                if symplectic_bit(&r, *pivot) {
                    r.mul_left_assign(row);
                }
            }
            let pivot = (0..2 * n).find(|&i| symplectic_bit(&r, i)).ok_or_else(|| {
                Error::InvalidArgument("stabilizer generators are dependent".into())
            })?;
            for (_, row) in reduced.iter_mut() {
                if symplectic_bit(row, pivot) {
                    row.mul_left_assign(&r);
                }
            }
            reduced.push((pivot, r));
        }
        let zero = generators
            .iter()
            .enumerate()
            .all(|(q, g)| *g == PauliString::single(n, q, crate::pauli::Letter::Z));
        Ok(StabilizerState { n, generators, reduced, zero })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn is_zero_state(&self) -> bool {
        self.zero
    }

    /// Expectation of a Hermitian Pauli: exactly -1, 0 or +1.
    pub fn expectation(&self, p: &PauliString) -> Result<i8> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch(self.n, p.num_qubits()));
        }
        p.real_sign().ok_or_else(|| Error::NonHermitian(p.to_string()))?;
        Ok(self.expectation_unchecked(p))
    }

    /// Same as [`Self::expectation`] for inputs already known to be valid.
    #[inline]
    pub(crate) fn expectation_unchecked(&self, p: &PauliString) -> i8 {
        if self.zero {
            if !p.is_diagonal() {
                return 0;
            }
            return if p.phase() == 0 { 1 } else { -1 };
        }
        if self.generators.iter().any(|g| !g.commutes_with(p)) {
            return 0;
        }
        let mut r = p.clone();
        for (pivot, row) in &self.reduced {
            if symplectic_bit(&r, *pivot) {
                r.mul_left_assign(row);
            }
        }
        debug_assert!(r.is_identity_up_to_phase());
        if r.phase() == 0 {
            1
        } else {
            -1
        }
    }
}

/// Expectation of `p` in the stabilizer state `s`.
pub fn expectation_stabilizer(s: &StabilizerState, p: &PauliString) -> Result<i8> {
    s.expectation(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn gate_examples() {
        assert_eq!(conj_gate(&CliffordGate::H(0), &p("+X")).unwrap(), p("+Z"));
        assert_eq!(conj_gate(&CliffordGate::CX(0, 1), &p("+XI")).unwrap(), p("+XX"));
        assert_eq!(conj_gate(&CliffordGate::CZ(0, 1), &p("+XI")).unwrap(), p("+XZ"));
        assert_eq!(conj_gate(&CliffordGate::CZ(0, 1), &p("+XX")).unwrap(), p("+YY"));
        assert_eq!(conj_gate(&CliffordGate::S(0), &p("+X")).unwrap(), p("-Y"));
        assert_eq!(conj_gate(&CliffordGate::Sdg(0), &p("+X")).unwrap(), p("+Y"));
        assert_eq!(conj_gate(&CliffordGate::H(0), &p("+Y")).unwrap(), p("-Y"));
    }

    #[test]
    fn bad_targets() {
        assert!(conj_gate(&CliffordGate::CX(0, 0), &p("+XX")).is_err());
        assert!(conj_gate(&CliffordGate::H(2), &p("+XX")).is_err());
    }

    #[test]
    fn rotation_examples() {
        let g = p("+Z");
        assert_eq!(conj_rotation_quarter(&g, 1, &p("+X")).unwrap(), p("-Y"));
        assert_eq!(conj_rotation_quarter(&g, 2, &p("+X")).unwrap(), p("-X"));
        assert_eq!(conj_rotation_quarter(&g, 3, &p("+X")).unwrap(), p("+Y"));
        for k in 0..4 {
            assert_eq!(conj_rotation_quarter(&g, k, &p("-Z")).unwrap(), p("-Z"));
        }
        assert!(conj_rotation_quarter(&p("+iZ"), 1, &p("+X")).is_err());
    }

    #[test]
    fn global_rotation_localizes_observable() {
        let g = p("+XZZZ");
        let o = p("+ZZZZ");
        let out = conj_rotation_quarter(&g, 1, &o).unwrap();
        assert_eq!(out.unsigned(), p("+YIII"));
    }

    #[test]
    fn zero_state_expectations() {
        let s = StabilizerState::zero(3);
        assert_eq!(s.expectation(&p("+ZZI")).unwrap(), 1);
        assert_eq!(s.expectation(&p("+XII")).unwrap(), 0);
        assert_eq!(s.expectation(&p("-ZII")).unwrap(), -1);
        assert!(s.expectation(&p("+iZII")).is_err());
    }

    #[test]
    fn bell_state_expectations() {
        let s = StabilizerState::from_generators(2, vec![p("+XX"), p("+ZZ")]).unwrap();
        assert!(!s.is_zero_state());
        assert_eq!(s.expectation(&p("+XX")).unwrap(), 1);
        assert_eq!(s.expectation(&p("+YY")).unwrap(), -1);
        assert_eq!(s.expectation(&p("+ZI")).unwrap(), 0);
        assert_eq!(s.expectation(&p("-ZZ")).unwrap(), -1);
    }

    #[test]
    fn invalid_generators_rejected() {
        assert!(StabilizerState::from_generators(2, vec![p("+XI"), p("+ZI")]).is_err());
        assert!(StabilizerState::from_generators(2, vec![p("+ZI"), p("-ZI")]).is_err());
        assert!(StabilizerState::from_generators(2, vec![p("+ZI")]).is_err());
    }

    #[test]
    fn gate_text_round_trip() {
        for s in ["H 0", "SDG 3", "CZ 0 1", "SWAP 4 2", "CX 1 0"] {
            assert_eq!(s.parse::<CliffordGate>().unwrap().to_string(), s);
        }
        assert!("CZ 0".parse::<CliffordGate>().is_err());
        assert!("FOO 0".parse::<CliffordGate>().is_err());
    }
}
