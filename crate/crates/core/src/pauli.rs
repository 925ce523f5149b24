//! Phase-tracked Pauli strings in bit-packed symplectic form.
//!
//! A [`PauliString`] stores `i^k * prod_q X_q^{x_q} Z_q^{z_q}` with the X factor
//! written to the left of the Z factor on every qubit. Under this convention
//! `Y = i X Z`, so a string's "display sign" (the scalar in front of its
//! letter form) is `i^(k - #Y)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const NON_IDENTITY: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    fn to_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli operator with an exact global phase `i^k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// Builds `i^sign * letters[0] ⊗ letters[1] ⊗ ...`.
    pub fn from_letters(letters: &[Letter], sign: u8) -> Self {
        let mut p = PauliString::identity(letters.len());
        let mut ys = 0u8;
        for (q, l) in letters.iter().enumerate() {
            let (xb, zb) = l.bits();
            p.set_bits(q, xb, zb);
            if *l == Letter::Y {
                ys = (ys + 1) & 3;
            }
        }
        p.phase = (sign + ys) & 3;
        p
    }

    /// A single-letter Pauli on qubit `q` with sign +1.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        let mut letters = vec![Letter::I; n];
        letters[q] = letter;
        PauliString::from_letters(&letters, 0)
    }

    /// Builds a +1 string with `letter` on every listed qubit.
    pub fn on_qubits(n: usize, qubits: &[usize], letter: Letter) -> Self {
        let mut letters = vec![Letter::I; n];
        for &q in qubits {
            letters[q] = letter;
        }
        PauliString::from_letters(&letters, 0)
    }

    /// Raw constructor from packed words and the canonical phase exponent.
    pub fn from_raw(n: usize, x: Vec<u64>, z: Vec<u64>, phase: u8) -> Result<Self> {
        let w = words_for(n);
        if x.len() != w || z.len() != w {
            return Err(Error::InvalidArgument(format!(
                "expected {w} words for {n} qubits"
            )));
        }
        let mut p = PauliString { n, x, z, phase: phase & 3 };
        p.clear_padding();
        Ok(p)
    }

    fn clear_padding(&mut self) {
        let rem = self.n % WORD;
        if rem != 0 {
            let mask = (1u64 << rem) - 1;
            if let Some(last) = self.x.last_mut() {
                *last &= mask;
            }
            if let Some(last) = self.z.last_mut() {
                *last &= mask;
            }
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Canonical phase exponent `k` in `i^k X^x Z^z`.
    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    #[inline]
    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    #[inline]
    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / WORD] >> (q % WORD) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / WORD] >> (q % WORD) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_bits(&mut self, q: usize, xb: bool, zb: bool) {
        let (w, b) = (q / WORD, 1u64 << (q % WORD));
        if xb {
            self.x[w] |= b;
        } else {
            self.x[w] &= !b;
        }
        if zb {
            self.z[w] |= b;
        } else {
            self.z[w] &= !b;
        }
    }

    #[inline]
    pub(crate) fn add_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) & 3;
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    fn y_count(&self) -> u32 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    /// Exponent `s` of the scalar `i^s` in front of the letter form.
    pub fn sign_exponent(&self) -> u8 {
        ((self.phase as u32 + 4 - (self.y_count() & 3)) & 3) as u8
    }

    /// Hermitian iff the letter-form scalar is real.
    pub fn is_hermitian(&self) -> bool {
        self.sign_exponent().is_multiple_of(2)
    }

    /// Real sign of a Hermitian string, `None` otherwise.
    pub fn real_sign(&self) -> Option<i8> {
        match self.sign_exponent() {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    /// The same operator letters with scalar +1.
    pub fn unsigned(&self) -> PauliString {
        let mut p = self.clone();
        p.phase = (self.y_count() & 3) as u8;
        p
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// True when both strings have the same letters (phases ignored).
    pub fn same_support_letters(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// True when the string is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    pub fn negated(&self) -> PauliString {
        let mut p = self.clone();
        p.add_phase(2);
        p
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.x_bit(q) || self.z_bit(q))
            .collect()
    }

    fn check_size(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            Err(Error::SizeMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    /// Phase-exact product `self * other`.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        self.check_size(other)?;
        let mut out = self.clone();
        out.mul_right_assign(other);
        Ok(out)
    }

    /// `self <- self * other`; sizes must match.
    pub(crate) fn mul_right_assign(&mut self, other: &PauliString) {
        debug_assert_eq!(self.n, other.n);
        let mut swaps = 0u32;
        for (zl, xr) in self.z.iter().zip(&other.x) {
            swaps += (zl & xr).count_ones();
        }
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
        self.phase = ((self.phase as u32 + other.phase as u32 + 2 * (swaps & 1)) & 3) as u8;
    }

    /// `self <- other * self`; sizes must match.
    pub(crate) fn mul_left_assign(&mut self, other: &PauliString) {
        debug_assert_eq!(self.n, other.n);
        let mut swaps = 0u32;
        for (zl, xr) in other.z.iter().zip(&self.x) {
            swaps += (zl & xr).count_ones();
        }
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
        self.phase = ((self.phase as u32 + other.phase as u32 + 2 * (swaps & 1)) & 3) as u8;
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_size(other)?;
        Ok(self.commutes_with(other))
    }

    #[inline]
    pub(crate) fn commutes_with(&self, other: &PauliString) -> bool {
        let mut acc = 0u64;
        for w in 0..self.x.len() {
            acc ^= (self.x[w] & other.z[w]) ^ (other.x[w] & self.z[w]);
        }
        acc.count_ones().is_multiple_of(2)
    }

    /// Concatenated `(x | z)` symplectic vector, phase dropped.
    pub fn symplectic(&self) -> Vec<u64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.z);
        v
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.sign_exponent() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `[+|-][i]LETTERS`, leftmost letter is qubit 0.
    fn from_str(s: &str) -> Result<Self> {
        let mut rest = s;
        let mut sign = 0u8;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            rest = r;
            sign = 2;
        }
        if let Some(r) = rest.strip_prefix('i') {
            rest = r;
            sign = (sign + 1) & 3;
        }
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                other => Err(Error::Parse(format!("bad Pauli letter {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(&letters, sign))
    }
}

/// Real-weighted sum of Hermitian Pauli strings, each stored with sign +1.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl Observable {
    /// Signs of the strings are folded into their coefficients.
    pub fn new(terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let n = terms
            .first()
            .map(|(_, p)| p.num_qubits())
            .ok_or_else(|| Error::InvalidArgument("observable needs at least one term".into()))?;
        let mut out: Vec<(f64, PauliString)> = Vec::with_capacity(terms.len());
        for (c, p) in terms {
            if p.num_qubits() != n {
                return Err(Error::SizeMismatch(n, p.num_qubits()));
            }
            let sign = p.real_sign().ok_or_else(|| Error::NonHermitian(p.to_string()))?;
            let unsigned = p.unsigned();
            if out.iter().any(|(_, q)| q == &unsigned) {
                return Err(Error::InvalidArgument(format!("duplicate term {unsigned}")));
            }
            out.push((c * sign as f64, unsigned));
        }
        Ok(Observable { n, terms: out })
    }

    pub fn single(p: PauliString) -> Result<Self> {
        Observable::new(vec![(1.0, p)])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn label(&self) -> String {
        self.terms
            .iter()
            .map(|(c, p)| format!("{c}*{p}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Reduced GF(2) row basis of symplectic vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticBasis {
    n: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

fn first_set_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
}

#[inline]
fn bit(v: &[u64], i: usize) -> bool {
    v[i / WORD] >> (i % WORD) & 1 == 1
}

impl SymplecticBasis {
    pub fn new(n: usize) -> Self {
        SymplecticBasis { n, rows: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.rows.iter().map(|(_, r)| r.as_slice())
    }

    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        for (pivot, row) in &self.rows {
            if bit(&v, *pivot) {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
        v
    }

    /// Membership of `p` (phase ignored) in the GF(2) span.
    pub fn contains(&self, p: &PauliString) -> bool {
        if p.num_qubits() != self.n {
            return false;
        }
        self.reduce(p.symplectic()).iter().all(|&w| w == 0)
    }

    /// Adds `p` to the basis; returns false when it was already spanned.
    pub fn insert(&mut self, p: &PauliString) -> bool {
        if p.num_qubits() != self.n {
            return false;
        }
        let v = self.reduce(p.symplectic());
        let Some(pivot) = first_set_bit(&v) else {
            return false;
        };
        for (_, row) in self.rows.iter_mut() {
            if bit(row, pivot) {
                for (a, b) in row.iter_mut().zip(&v) {
                    *a ^= b;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }

    pub fn from_paulis<'a>(n: usize, paulis: impl IntoIterator<Item = &'a PauliString>) -> Self {
        let mut b = SymplecticBasis::new(n);
        for p in paulis {
            b.insert(p);
        }
        b
    }
}

/// Observable families used by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Weight-two strings on nearest-neighbour pairs, 9(n-1) elements.
    Weight2Nn,
    /// All weight-two strings, 9n(n-1)/2 elements.
    Weight2All,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Weight2Nn => "weight2_nn",
            FamilyKind::Weight2All => "weight2_all",
        }
    }

    pub fn size(self, n: usize) -> usize {
        match self {
            FamilyKind::Weight2Nn => 9 * n.saturating_sub(1),
            FamilyKind::Weight2All => 9 * n * n.saturating_sub(1) / 2,
        }
    }
}

impl FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weight2_nn" => Ok(FamilyKind::Weight2Nn),
            "weight2_all" => Ok(FamilyKind::Weight2All),
            _ => Err(Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

/// Lists the family in lexicographic (qubit pair, letters X<Y<Z) order.
pub fn enumerate_family(kind: FamilyKind, n: usize) -> Result<Vec<PauliString>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "weight-two families need n >= 2, got {n}"
        )));
    }
    let pairs: Vec<(usize, usize)> = match kind {
        FamilyKind::Weight2Nn => (0..n - 1).map(|a| (a, a + 1)).collect(),
        FamilyKind::Weight2All => (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect(),
    };
    let mut out = Vec::with_capacity(9 * pairs.len());
    for (a, b) in pairs {
        for la in Letter::NON_IDENTITY {
            for lb in Letter::NON_IDENTITY {
                let mut letters = vec![Letter::I; n];
                letters[a] = la;
                letters[b] = lb;
                out.push(PauliString::from_letters(&letters, 0));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn xz_is_minus_i_y() {
        assert_eq!(p("+XI").mul(&p("+ZI")).unwrap(), p("-iYI"));
    }

    #[test]
    fn zz_products() {
        assert_eq!(p("+ZZI").mul(&p("+IZZ")).unwrap(), p("+ZIZ"));
    }

    #[test]
    fn hermitian_squares_to_identity() {
        for s in ["+XYZI", "-YYXZ", "+ZIIZ", "-IIII"] {
            let q = p(s);
            assert!(q.is_hermitian());
            assert_eq!(q.mul(&q).unwrap(), PauliString::identity(4));
        }
    }

    #[test]
    fn size_mismatch_errors() {
        assert_eq!(p("+X").mul(&p("+XX")), Err(Error::SizeMismatch(1, 2)));
        assert!(p("+X").commutes(&p("+XX")).is_err());
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("+X").commutes(&p("+Z")).unwrap());
        assert!(p("+XX").commutes(&p("+ZZ")).unwrap());
        assert!(p("-iXYZ").commutes(&PauliString::identity(3)).unwrap());
    }

    #[test]
    fn weight_and_support() {
        let q = p("+ZXII");
        assert_eq!(q.weight(), 2);
        assert_eq!(q.support(), vec![0, 1]);
        assert_eq!(PauliString::identity(5).weight(), 0);
        let mut letters = vec![Letter::Z; 7];
        letters[0] = Letter::X;
        assert_eq!(PauliString::from_letters(&letters, 0).weight(), 7);
    }

    #[test]
    fn text_round_trip() {
        for s in ["+XIZY", "-iXZ", "+iY", "-IIII", "+"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("+XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn span_examples() {
        let b = SymplecticBasis::from_paulis(3, [&p("+ZZI"), &p("+IZZ")]);
        assert!(b.contains(&p("+ZIZ")));
        assert!(b.contains(&p("-ZIZ")));
        assert!(!b.contains(&p("+XII")));
        assert!(!SymplecticBasis::new(2).contains(&p("+XI")));
        let b = SymplecticBasis::from_paulis(1, [&p("+X")]);
        assert!(!b.contains(&p("+Z")));
    }

    #[test]
    fn insert_reports_membership() {
        let mut b = SymplecticBasis::new(2);
        assert!(b.insert(&p("+XX")));
        assert!(b.insert(&p("+ZZ")));
        assert!(!b.insert(&p("-YY")));
        assert_eq!(b.rank(), 2);
        let before = b.clone();
        assert!(!b.insert(&p("+XX")));
        assert_eq!(b, before);
    }

    #[test]
    fn family_sizes() {
        assert_eq!(enumerate_family(FamilyKind::Weight2Nn, 4).unwrap().len(), 27);
        assert_eq!(enumerate_family(FamilyKind::Weight2All, 4).unwrap().len(), 54);
        assert_eq!(
            enumerate_family(FamilyKind::Weight2Nn, 2).unwrap(),
            enumerate_family(FamilyKind::Weight2All, 2).unwrap()
        );
        for n in 2..=12 {
            for kind in [FamilyKind::Weight2Nn, FamilyKind::Weight2All] {
                let fam = enumerate_family(kind, n).unwrap();
                assert_eq!(fam.len(), kind.size(n));
                assert!(fam.iter().all(|q| q.real_sign() == Some(1) && q.weight() == 2));
            }
        }
        assert!(enumerate_family(FamilyKind::Weight2Nn, 1).is_err());
    }

    #[test]
    fn family_order_is_lexicographic() {
        let fam = enumerate_family(FamilyKind::Weight2All, 3).unwrap();
        assert_eq!(fam[0], p("+XXI"));
        assert_eq!(fam[1], p("+XYI"));
        assert_eq!(fam[8], p("+ZZI"));
        assert_eq!(fam[9], p("+XIX"));
        assert_eq!(fam[26], p("+IZZ"));
    }

    #[test]
    fn observable_folds_signs() {
        let o = Observable::new(vec![(0.5, p("-ZZ")), (2.0, p("+XI"))]).unwrap();
        assert_eq!(o.terms()[0], (-0.5, p("+ZZ")));
        assert!(Observable::new(vec![(1.0, p("+ZZ")), (1.0, p("-ZZ"))]).is_err());
        assert!(Observable::new(vec![(1.0, p("+iZZ"))]).is_err());
        assert!(Observable::new(vec![(1.0, p("+Z")), (1.0, p("+ZZ"))]).is_err());
    }
}
