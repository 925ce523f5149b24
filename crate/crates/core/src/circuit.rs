//! Clifford-VQA circuits, parameter points and the circuit builders used by
//! the experiments.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt::Write as _;

use rand::Rng;

use crate::clifford::{conj_gate_in_place, conj_rotation_in_place, CliffordGate};
use crate::error::{Error, Result};
use crate::pauli::{Letter, Observable, PauliString};
use crate::rng;

/// One circuit instruction, in application order.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Gate(CliffordGate),
    /// `exp(-i generator * phi[param] / 2)`.
    Rotation { generator: PauliString, param: usize },
}

/// Circuit of constant Clifford gates and independent Pauli rotations.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamCircuit {
    n: usize,
    ops: Vec<Op>,
    /// `param_ops[k]` is the position in `ops` of the rotation using parameter `k`.
    param_ops: Vec<usize>,
}

/// Largest parameter count accepted for an n-qubit circuit.
pub fn max_params(n: usize) -> usize {
    64 * n.max(1) * n.max(1)
}

impl ParamCircuit {
    pub fn new(n: usize, ops: Vec<Op>) -> Result<Self> {
        let m = ops.iter().filter(|o| matches!(o, Op::Rotation { .. })).count();
        if m > max_params(n) {
            return Err(Error::InvalidArgument(format!(
                "{m} parameters exceed the cap {} for n = {n}",
                max_params(n)
            )));
        }
        let mut param_ops = vec![usize::MAX; m];
        for (i, op) in ops.iter().enumerate() {
            match op {
                Op::Gate(g) => g.validate(n)?,
                Op::Rotation { generator, param } => {
                    if generator.num_qubits() != n {
                        return Err(Error::SizeMismatch(n, generator.num_qubits()));
                    }
                    if !generator.is_hermitian() {
                        return Err(Error::NonHermitian(generator.to_string()));
                    }
                    if *param >= m || param_ops[*param] != usize::MAX {
                        return Err(Error::InvalidArgument(format!(
                            "parameter index {param} is out of range or reused"
                        )));
                    }
                    param_ops[*param] = i;
                }
            }
        }
        Ok(ParamCircuit { n, ops, param_ops })
    }

    pub fn empty(n: usize) -> Self {
        ParamCircuit { n, ops: Vec::new(), param_ops: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_params(&self) -> usize {
        self.param_ops.len()
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Generator of the rotation driven by parameter `k`.
    pub fn generator(&self, k: usize) -> &PauliString {
        match &self.ops[self.param_ops[k]] {
            Op::Rotation { generator, .. } => generator,
            Op::Gate(_) => unreachable!("param_ops points at rotations"),
        }
    }

    /// Appends another circuit on the same qubits, renumbering its parameters.
    pub fn then(&self, other: &ParamCircuit) -> Result<ParamCircuit> {
        if other.n != self.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        let offset = self.num_params();
        let mut ops = self.ops.clone();
        ops.extend(other.ops.iter().map(|op| match op {
            Op::Rotation { generator, param } => Op::Rotation {
                generator: generator.clone(),
                param: param + offset,
            },
            g => g.clone(),
        }));
        ParamCircuit::new(self.n, ops)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.num_params() {
            Err(Error::PointLength { expected: self.num_params(), got })
        } else {
            Ok(())
        }
    }

    /// Backward sweep `U† P U` at a Clifford point.
    pub fn heisenberg_at_clifford(&self, c: &CliffordPoint, p: &PauliString) -> Result<PauliString> {
        self.check_len(c.len())?;
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch(self.n, p.num_qubits()));
        }
        let mut out = p.clone();
        self.propagate_clifford_in_place(c.quarters(), &mut out);
        Ok(out)
    }

    /// Unchecked backward sweep used on hot paths.
    #[inline]
    pub(crate) fn propagate_clifford_in_place(&self, quarters: &[u8], p: &mut PauliString) {
        for op in self.ops.iter().rev() {
            match op {
                Op::Gate(g) => conj_gate_in_place(g, p),
                Op::Rotation { generator, param } => {
                    conj_rotation_in_place(generator, quarters[*param], p)
                }
            }
        }
    }

    /// Line-oriented text form: a `QUBITS n` header then one op per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("QUBITS {}\n", self.n);
        for op in &self.ops {
            match op {
                Op::Gate(g) => writeln!(s, "{g}").unwrap(),
                Op::Rotation { generator, param } => writeln!(s, "ROT {generator} {param}").unwrap(),
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty circuit text".into()))?;
        let n = header
            .strip_prefix("QUBITS ")
            .and_then(|t| t.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("bad circuit header {header:?}")))?;
        let mut ops = Vec::new();
        for line in lines {
            if let Some(rest) = line.strip_prefix("ROT ") {
                let mut parts = rest.split_whitespace();
                let (Some(gen), Some(idx), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(Error::Parse(format!("bad rotation line {line:?}")));
                };
                let generator: PauliString = gen.parse()?;
                let param = idx
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad parameter index in {line:?}")))?;
                ops.push(Op::Rotation { generator, param });
            } else {
                ops.push(Op::Gate(line.parse()?));
            }
        }
        ParamCircuit::new(n, ops)
    }
}

/// Continuous parameter assignment; angles are kept in `[0, 2pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoint {
    angles: Vec<f64>,
}

impl ParamPoint {
    pub fn new(angles: Vec<f64>) -> Self {
        ParamPoint {
            angles: angles.into_iter().map(|a| a.rem_euclid(TAU)).collect(),
        }
    }

    pub fn zeros(m: usize) -> Self {
        ParamPoint { angles: vec![0.0; m] }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Copy with `delta` added to coordinate `k`.
    pub fn shifted(&self, k: usize, delta: f64) -> ParamPoint {
        let mut angles = self.angles.clone();
        angles[k] = (angles[k] + delta).rem_euclid(TAU);
        ParamPoint { angles }
    }
}

/// Parameter assignment with every angle a multiple of pi/2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordPoint {
    quarters: Vec<u8>,
}

impl CliffordPoint {
    pub fn new(quarters: Vec<u8>) -> Self {
        CliffordPoint {
            quarters: quarters.into_iter().map(|q| q & 3).collect(),
        }
    }

    pub fn zeros(m: usize) -> Self {
        CliffordPoint { quarters: vec![0; m] }
    }

    pub fn quarters(&self) -> &[u8] {
        &self.quarters
    }

    pub fn len(&self) -> usize {
        self.quarters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quarters.is_empty()
    }

    pub fn to_param(&self) -> ParamPoint {
        ParamPoint {
            angles: self.quarters.iter().map(|&q| q as f64 * FRAC_PI_2).collect(),
        }
    }

    /// Recovers the quarter grid from angles within `tol` of it.
    pub fn try_from_param(p: &ParamPoint, tol: f64) -> Result<Self> {
        p.angles
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                let q = (a / FRAC_PI_2).round();
                if (a - q * FRAC_PI_2).abs() <= tol {
                    Ok((q as i64).rem_euclid(4) as u8)
                } else {
                    Err(Error::NotClifford(k))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(CliffordPoint::new)
    }

    /// Copy with `delta` quarter turns added to coordinate `k`.
    pub fn shifted(&self, k: usize, delta: i8) -> CliffordPoint {
        let mut quarters = self.quarters.clone();
        quarters[k] = (quarters[k] as i8 + delta).rem_euclid(4) as u8;
        CliffordPoint { quarters }
    }

    pub fn set(&mut self, k: usize, quarter: u8) {
        self.quarters[k] = quarter & 3;
    }
}

/// Clifford base point with a split of its coordinates into fixed and free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPoint {
    base: CliffordPoint,
    fixed: Vec<usize>,
    free: Vec<usize>,
}

impl SplitPoint {
    /// `fixed` may be unsorted; the free set is its complement.
    pub fn new(base: CliffordPoint, fixed: impl IntoIterator<Item = usize>) -> Result<Self> {
        let m = base.len();
        let mut is_fixed = vec![false; m];
        for k in fixed {
            if k >= m {
                return Err(Error::InvalidArgument(format!("fixed index {k} >= {m}")));
            }
            is_fixed[k] = true;
        }
        let fixed = (0..m).filter(|&k| is_fixed[k]).collect();
        let free = (0..m).filter(|&k| !is_fixed[k]).collect();
        Ok(SplitPoint { base, fixed, free })
    }

    pub fn all_free(base: CliffordPoint) -> Self {
        let free = (0..base.len()).collect();
        SplitPoint { base, fixed: Vec::new(), free }
    }

    pub fn base(&self) -> &CliffordPoint {
        &self.base
    }

    pub fn fixed(&self) -> &[usize] {
        &self.fixed
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    /// Clifford completion: free coordinates overwritten in index order.
    pub fn restrict_clifford(&self, free_values: &[u8]) -> Result<CliffordPoint> {
        if free_values.len() != self.free.len() {
            return Err(Error::PointLength { expected: self.free.len(), got: free_values.len() });
        }
        let mut out = self.base.clone();
        for (&k, &v) in self.free.iter().zip(free_values) {
            out.set(k, v);
        }
        Ok(out)
    }

    /// Continuous completion: fixed coordinates at their Clifford angles.
    pub fn restrict_uniform(&self, free_values: &[f64]) -> Result<ParamPoint> {
        if free_values.len() != self.free.len() {
            return Err(Error::PointLength { expected: self.free.len(), got: free_values.len() });
        }
        let mut angles = self.base.to_param().angles;
        for (&k, &v) in self.free.iter().zip(free_values) {
            angles[k] = v;
        }
        Ok(ParamPoint::new(angles))
    }
}

/// Uniform point on the torus, a pure function of `(seed, index)`.
pub fn sample_uniform(m: usize, seed: u64, index: u64) -> ParamPoint {
    let mut r = rng::stream(seed, index);
    ParamPoint {
        angles: (0..m).map(|_| r.random_range(0.0..TAU)).collect(),
    }
}

/// Uniform Clifford point, a pure function of `(seed, index)`.
pub fn sample_clifford(m: usize, seed: u64, index: u64) -> CliffordPoint {
    let mut r = rng::stream(seed, index);
    CliffordPoint {
        quarters: (0..m).map(|_| r.random_range(0..4u8)).collect(),
    }
}

/// Number of bricks in an `(n, layers)` brickwork.
pub fn brickwork_bricks(n: usize, layers: usize) -> usize {
    layers.div_ceil(2) * (n / 2) + (layers / 2) * (n.saturating_sub(1) / 2)
}

/// Open-boundary brickwork: odd layers pair (0,1),(2,3),..., even layers
/// pair (1,2),(3,4),...; each brick is CZ then RX, RZ on the lower qubit and
/// RX, RZ on the upper qubit.
pub fn build_brickwork(n: usize, layers: usize) -> Result<ParamCircuit> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("brickwork needs n >= 2, got {n}")));
    }
    if layers < 1 {
        return Err(Error::InvalidArgument("brickwork needs at least one layer".into()));
    }
    let mut ops = Vec::with_capacity(6 * brickwork_bricks(n, layers));
    let mut param = 0;
    for layer in 0..layers {
        let start = layer % 2;
        let mut a = start;
        while a + 1 < n {
            ops.push(Op::Gate(CliffordGate::CZ(a, a + 1)));
            for q in [a, a + 1] {
                for letter in [Letter::X, Letter::Z] {
                    ops.push(Op::Rotation {
                        generator: PauliString::single(n, q, letter),
                        param,
                    });
                    param += 1;
                }
            }
            a += 2;
        }
    }
    ParamCircuit::new(n, ops)
}

/// Small circuits with known closed-form landscapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureKind {
    /// RX on every qubit, observable Z...Z; loss is the product of cosines.
    ProductRx,
    /// One brickwork layer, then a global rotation generated by X Z...Z;
    /// observable Z...Z.
    GlobalRotationBp,
}

pub fn build_fixture(kind: FixtureKind, n: usize) -> Result<(ParamCircuit, Observable)> {
    let zs = PauliString::on_qubits(n, &(0..n).collect::<Vec<_>>(), Letter::Z);
    match kind {
        FixtureKind::ProductRx => {
            if n < 1 {
                return Err(Error::InvalidArgument("product_rx needs n >= 1".into()));
            }
            let ops = (0..n)
                .map(|q| Op::Rotation {
                    generator: PauliString::single(n, q, Letter::X),
                    param: q,
                })
                .collect();
            Ok((ParamCircuit::new(n, ops)?, Observable::single(zs)?))
        }
        FixtureKind::GlobalRotationBp => {
            if n < 2 {
                return Err(Error::InvalidArgument("global_rotation_bp needs n >= 2".into()));
            }
            let prefix = build_brickwork(n, 1)?;
            let mut letters = vec![Letter::Z; n];
            letters[0] = Letter::X;
            let mut ops = prefix.ops().to_vec();
            ops.push(Op::Rotation {
                generator: PauliString::from_letters(&letters, 0),
                param: prefix.num_params(),
            });
            Ok((ParamCircuit::new(n, ops)?, Observable::single(zs)?))
        }
    }
}

/// Random Hermitian, non-identity Pauli string with a random sign.
pub fn random_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliString {
    loop {
        let letters: Vec<Letter> = (0..n)
            .map(|_| [Letter::I, Letter::X, Letter::Y, Letter::Z][rng.random_range(0..4)])
            .collect();
        if letters.iter().any(|l| *l != Letter::I) {
            let sign = if rng.random_bool(0.5) { 0 } else { 2 };
            return PauliString::from_letters(&letters, sign);
        }
    }
}

/// Random circuit with `m` rotations and `gates` Clifford gates, shuffled.
pub fn random_circuit(n: usize, m: usize, gates: usize, seed: u64) -> Result<ParamCircuit> {
    if n < 1 {
        return Err(Error::InvalidArgument("random circuits need n >= 1".into()));
    }
    let mut r = rng::stream(seed, 0);
    let total = m + gates;
    let mut kinds: Vec<bool> = (0..total).map(|i| i < m).collect();
    for i in (1..total).rev() {
        let j = r.random_range(0..=i);
        kinds.swap(i, j);
    }
    let mut ops = Vec::with_capacity(total);
    let mut param = 0;
    for is_rot in kinds {
        if is_rot {
            ops.push(Op::Rotation { generator: random_pauli(n, &mut r), param });
            param += 1;
        } else {
            let q = r.random_range(0..n);
            let choice = if n >= 2 { r.random_range(0..9) } else { r.random_range(0..6) };
            let other = if n >= 2 {
                (q + 1 + r.random_range(0..n - 1)) % n
            } else {
                q
            };
            let g = match choice {
                0 => CliffordGate::H(q),
                1 => CliffordGate::S(q),
                2 => CliffordGate::Sdg(q),
                3 => CliffordGate::X(q),
                4 => CliffordGate::Y(q),
                5 => CliffordGate::Z(q),
                6 => CliffordGate::CX(q, other),
                7 => CliffordGate::CZ(q, other),
                _ => CliffordGate::Swap(q, other),
            };
            ops.push(Op::Gate(g));
        }
    }
    ParamCircuit::new(n, ops)
}
