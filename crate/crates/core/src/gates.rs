//! Qudit Clifford gates, circuits, their one-hot tensor encoding, SU(d)
//! variational unitaries and principal-branch fractional powers.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::state::{c, register_dim, root_of_unity, unitarity_error, validation_tol, CMatrix, QuditState, UnitaryOp};

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multiplicative inverse of `q` modulo `d`, if it exists.
pub fn mod_inverse(q: u32, d: u32) -> Option<u32> {
    (1..d).find(|&v| (v as u64 * q as u64) % d as u64 == 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CustomGate {
    pub arity: usize,
    pub mat: Arc<CMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// `H_d = d^{-1/2} sum w^{jk} |j><k|`.
    H,
    /// `S_q = sum |j><jq|`.
    S(u32),
    /// `sum |j><j| (x) |k><k+j|`, i.e. `|a,b> -> |a,b-a>`.
    Cnot,
    Custom(CustomGate),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::H | GateKind::S(_) => 1,
            GateKind::Cnot => 2,
            GateKind::Custom(g) => g.arity,
        }
    }

    pub fn custom(arity: usize, mat: CMatrix) -> Self {
        GateKind::Custom(CustomGate { arity, mat: Arc::new(mat) })
    }
}

pub fn gate_matrix(kind: &GateKind, d: u32) -> Result<UnitaryOp> {
    let du = d as usize;
    match kind {
        GateKind::H => {
            let s = 1.0 / (d as f64).sqrt();
            Ok(UnitaryOp { mat: CMatrix::from_fn(du, du, |j, k| root_of_unity((j * k) as i64, d) * s) })
        }
        GateKind::S(q) => {
            if *q == 0 || *q >= d || gcd(*q, d) != 1 {
                return Err(Error::Gate(format!("S_{q} is not a permutation for d = {d}")));
            }
            Ok(UnitaryOp {
                mat: CMatrix::from_fn(du, du, |j, col| {
                    if col == (j * *q as usize) % du {
                        c(1.0, 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                }),
            })
        }
        GateKind::Cnot => {
            let dim = du * du;
            let mut m = CMatrix::zeros(dim, dim);
            for j in 0..du {
                for k in 0..du {
                    m[(j * du + k, j * du + (k + j) % du)] = c(1.0, 0.0);
                }
            }
            Ok(UnitaryOp { mat: m })
        }
        GateKind::Custom(g) => {
            let dim = register_dim(d, g.arity)?;
            if g.mat.nrows() != dim {
                return Err(Error::Dimension { expected: dim, got: g.mat.nrows() });
            }
            UnitaryOp::new((*g.mat).clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qudits: Vec<usize>,
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub d: u32,
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(d: u32, n: usize) -> Self {
        Self { d, n, gates: Vec::new() }
    }

    /// Position one past the last gate.
    pub fn next_pos(&self) -> usize {
        self.gates.last().map_or(0, |g| g.pos + 1)
    }

    pub fn depth(&self) -> usize {
        self.next_pos()
    }

    fn validate(&self, kind: &GateKind, qudits: &[usize], pos: usize) -> Result<()> {
        if qudits.len() != kind.arity() {
            return Err(Error::Gate(format!("gate expects {} qudits, got {}", kind.arity(), qudits.len())));
        }
        for (i, &q) in qudits.iter().enumerate() {
            if q >= self.n {
                return Err(Error::Target(q));
            }
            if qudits[..i].contains(&q) {
                return Err(Error::DuplicateTarget(q));
            }
        }
        if pos < self.next_pos() {
            return Err(Error::Gate(format!("position {pos} not increasing")));
        }
        if let GateKind::S(q) = kind {
            if *q == 0 || *q >= self.d || gcd(*q, self.d) != 1 {
                return Err(Error::Gate(format!("S_{q} invalid for d = {}", self.d)));
            }
        }
        Ok(())
    }

    pub fn push_at(&mut self, pos: usize, kind: GateKind, qudits: &[usize]) -> Result<()> {
        self.validate(&kind, qudits, pos)?;
        self.gates.push(Gate { kind, qudits: qudits.to_vec(), pos });
        Ok(())
    }

    pub fn push(&mut self, kind: GateKind, qudits: &[usize]) -> Result<()> {
        let pos = self.next_pos();
        self.push_at(pos, kind, qudits)
    }

    pub fn h(mut self, q: usize) -> Self {
        self.push(GateKind::H, &[q]).expect("valid H");
        self
    }

    pub fn s(mut self, power: u32, q: usize) -> Self {
        self.push(GateKind::S(power), &[q]).expect("valid S");
        self
    }

    pub fn cx(mut self, control: usize, target: usize) -> Self {
        self.push(GateKind::Cnot, &[control, target]).expect("valid CNOT");
        self
    }

    /// Runs the circuit on a state.
    pub fn apply(&self, state: &QuditState) -> Result<QuditState> {
        if state.d != self.d || state.n != self.n {
            return Err(Error::Dimension { expected: self.n, got: state.n });
        }
        let mut out = state.clone();
        for g in &self.gates {
            let u = gate_matrix(&g.kind, self.d)?;
            out = out.apply(&u.mat, &g.qudits)?;
        }
        Ok(out)
    }

    /// Same gates shifted onto a larger register through `map`.
    pub fn remap(&self, n: usize, map: &[usize], pos_offset: usize) -> Result<Circuit> {
        let mut out = Circuit::new(self.d, n);
        for g in &self.gates {
            let qs: Vec<usize> = g.qudits.iter().map(|&q| map[q]).collect();
            out.push_at(g.pos + pos_offset, g.kind.clone(), &qs)?;
        }
        Ok(out)
    }

    /// Appends `other`'s gates after this circuit's last position.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        let mut out = self.clone();
        let offset = self.next_pos();
        for g in &other.gates {
            out.push_at(g.pos + offset, g.kind.clone(), &g.qudits)?;
        }
        Ok(out)
    }
}

/// Ordered product of the gates on the full register.
pub fn circuit_unitary(c: &Circuit) -> Result<UnitaryOp> {
    let dim = register_dim(c.d, c.n)?;
    let mut u = CMatrix::identity(dim, dim);
    for g in &c.gates {
        let m = gate_matrix(&g.kind, c.d)?;
        u = crate::state::embed(&m.mat, c.d, c.n, &g.qudits)? * u;
    }
    Ok(UnitaryOp { mat: u })
}

/// Gate-type planes of the one-hot encoding: H, S_q for every q >= 2 coprime
/// with d, CNOT control, CNOT target.
pub fn tensor_planes(d: u32) -> Vec<String> {
    let mut planes = vec!["H".to_string()];
    for q in 2..d {
        if gcd(q, d) == 1 {
            planes.push(format!("S{q}"));
        }
    }
    planes.push("CX-control".into());
    planes.push("CX-target".into());
    planes
}

/// One-hot `(gate type, qudit, position)` tensor, row-major in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitTensor {
    pub planes: usize,
    pub n: usize,
    pub depth: usize,
    pub data: Vec<u8>,
}

impl CircuitTensor {
    pub fn zeros(planes: usize, n: usize, depth: usize) -> Self {
        Self { planes, n, depth, data: vec![0; planes * n * depth] }
    }

    fn idx(&self, plane: usize, qudit: usize, pos: usize) -> usize {
        (plane * self.n + qudit) * self.depth + pos
    }

    pub fn get(&self, plane: usize, qudit: usize, pos: usize) -> u8 {
        self.data[self.idx(plane, qudit, pos)]
    }

    pub fn set(&mut self, plane: usize, qudit: usize, pos: usize) {
        let i = self.idx(plane, qudit, pos);
        self.data[i] = 1;
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&v| v as f64).collect()
    }
}

fn s_plane(d: u32, q: u32) -> Option<usize> {
    (2..d).filter(|&v| gcd(v, d) == 1).position(|v| v == q).map(|p| p + 1)
}

pub fn encode_tensor(c: &Circuit, max_depth: usize) -> Result<CircuitTensor> {
    if c.depth() > max_depth {
        return Err(Error::DepthOverflow { depth: c.depth(), max: max_depth });
    }
    let planes = tensor_planes(c.d).len();
    let mut t = CircuitTensor::zeros(planes, c.n, max_depth);
    for g in &c.gates {
        match &g.kind {
            GateKind::H => t.set(0, g.qudits[0], g.pos),
            GateKind::S(1) => {}
            GateKind::S(q) => t.set(s_plane(c.d, *q).expect("validated power"), g.qudits[0], g.pos),
            GateKind::Cnot => {
                t.set(planes - 2, g.qudits[0], g.pos);
                t.set(planes - 1, g.qudits[1], g.pos);
            }
            GateKind::Custom(_) => return Err(Error::Gate("custom gates have no tensor encoding".into())),
        }
    }
    Ok(t)
}

pub fn decode_tensor(t: &CircuitTensor, d: u32) -> Result<Circuit> {
    let names = tensor_planes(d);
    let planes = names.len();
    if t.planes != planes {
        return Err(Error::Dimension { expected: planes, got: t.planes });
    }
    let mut circuit = Circuit::new(d, t.n);
    for pos in 0..t.depth {
        let mut found: Vec<(usize, usize)> = Vec::new();
        for plane in 0..planes {
            for q in 0..t.n {
                if t.get(plane, q, pos) == 1 {
                    found.push((plane, q));
                }
            }
        }
        match found.as_slice() {
            [] => {}
            [(0, q)] => circuit.push_at(pos, GateKind::H, &[*q])?,
            [(p, q)] if *p < planes - 2 => {
                let power: u32 = names[*p][1..].parse().map_err(|_| Error::Parse(names[*p].clone()))?;
                circuit.push_at(pos, GateKind::S(power), &[*q])?
            }
            [(pc, qc), (pt, qt)] if *pc == planes - 2 && *pt == planes - 1 => {
                circuit.push_at(pos, GateKind::Cnot, &[*qc, *qt])?
            }
            _ => return Err(Error::Parse(format!("ambiguous tensor column {pos}"))),
        }
    }
    Ok(circuit)
}

impl fmt::Display for Circuit {
    /// One gate per line: `pos H q`, `pos S power q`, `pos CX control target`,
    /// `pos U q... : re im re im ...` (row-major entries).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            let qs: Vec<String> = g.qudits.iter().map(|q| q.to_string()).collect();
            match &g.kind {
                GateKind::H => writeln!(f, "{} H {}", g.pos, qs[0])?,
                GateKind::S(p) => writeln!(f, "{} S {} {}", g.pos, p, qs[0])?,
                GateKind::Cnot => writeln!(f, "{} CX {} {}", g.pos, qs[0], qs[1])?,
                GateKind::Custom(cg) => {
                    write!(f, "{} U {} :", g.pos, qs.join(" "))?;
                    for r in 0..cg.mat.nrows() {
                        for col in 0..cg.mat.ncols() {
                            let z = cg.mat[(r, col)];
                            write!(f, " {} {}", z.re, z.im)?;
                        }
                    }
                    writeln!(f)?;
                }
            }
        }
        Ok(())
    }
}

impl Circuit {
    /// Parses the [`Display`] format; `#` starts a comment.
    pub fn parse(d: u32, n: usize, text: &str) -> Result<Circuit> {
        let mut circuit = Circuit::new(d, n);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}: '{line}'", lineno + 1));
            let (head, tail) = match line.split_once(':') {
                Some((h, t)) => (h, Some(t)),
                None => (line, None),
            };
            let toks: Vec<&str> = head.split_whitespace().collect();
            if toks.len() < 3 {
                return Err(err("expected 'pos kind args'"));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| err("expected integer"));
            let pos = num(toks[0])?;
            match toks[1] {
                "H" if toks.len() == 3 => circuit.push_at(pos, GateKind::H, &[num(toks[2])?])?,
                "S" if toks.len() == 4 => circuit.push_at(pos, GateKind::S(num(toks[2])? as u32), &[num(toks[3])?])?,
                "CX" if toks.len() == 4 => circuit.push_at(pos, GateKind::Cnot, &[num(toks[2])?, num(toks[3])?])?,
                "U" => {
                    let qs = toks[2..].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
                    let vals = tail
                        .ok_or_else(|| err("custom gate needs ':' entries"))?
                        .split_whitespace()
                        .map(|v| v.parse::<f64>().map_err(|_| err("expected number")))
                        .collect::<Result<Vec<_>>>()?;
                    let dim = register_dim(d, qs.len())?;
                    if vals.len() != 2 * dim * dim {
                        return Err(err("wrong number of matrix entries"));
                    }
                    let mat = CMatrix::from_fn(dim, dim, |r, col| {
                        let k = 2 * (r * dim + col);
                        c(vals[k], vals[k + 1])
                    });
                    circuit.push_at(pos, GateKind::custom(qs.len(), mat), &qs)?
                }
                _ => return Err(err("unknown gate")),
            }
        }
        Ok(circuit)
    }
}

/// Generalized Gell-Mann basis in the standard order: for each k = 1..d-1 the
/// symmetric and antisymmetric pairs (j, k), j < k, then the k-th diagonal.
/// Gives the Pauli matrices X, Y, Z at d = 2 and lambda_1..lambda_8 at d = 3.
pub fn su_generators(d: u32) -> Vec<CMatrix> {
    let du = d as usize;
    let mut out = Vec::new();
    for k in 1..du {
        for j in 0..k {
            let mut sx = CMatrix::zeros(du, du);
            sx[(j, k)] = c(1.0, 0.0);
            sx[(k, j)] = c(1.0, 0.0);
            let mut sy = CMatrix::zeros(du, du);
            sy[(j, k)] = c(0.0, -1.0);
            sy[(k, j)] = c(0.0, 1.0);
            out.push(sx);
            out.push(sy);
        }
        let norm = (2.0 / (k * (k + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(du, du);
        for l in 0..k {
            diag[(l, l)] = c(norm, 0.0);
        }
        diag[(k, k)] = c(-(k as f64) * norm, 0.0);
        out.push(diag);
    }
    out
}

/// Variational angles, one per SU(d) generator.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalParams {
    pub theta: Vec<f64>,
}

impl VariationalParams {
    pub fn zeros(d: u32) -> Self {
        Self { theta: vec![0.0; (d * d - 1) as usize] }
    }

    pub fn new(d: u32, theta: Vec<f64>) -> Result<Self> {
        let expected = (d * d - 1) as usize;
        if theta.len() != expected {
            return Err(Error::ParamLength { expected, got: theta.len() });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Invalid("non-finite angle".into()));
        }
        Ok(Self { theta })
    }

    /// Angles reduced to `[0, 2 pi)`.
    pub fn reduced(&self) -> Self {
        let tau = 2.0 * std::f64::consts::PI;
        Self { theta: self.theta.iter().map(|t| t.rem_euclid(tau)).collect() }
    }
}

/// `exp(i sum theta_k lambda_k)`, via the Hermitian eigendecomposition.
pub fn su_d_unitary(theta: &[f64], d: u32) -> Result<UnitaryOp> {
    let gens = su_generators(d);
    if theta.len() != gens.len() {
        return Err(Error::ParamLength { expected: gens.len(), got: theta.len() });
    }
    let du = d as usize;
    let mut h = CMatrix::zeros(du, du);
    for (t, g) in theta.iter().zip(&gens) {
        h += g * c(*t, 0.0);
    }
    Ok(UnitaryOp { mat: exp_i_hermitian(&h) })
}

/// `exp(i H)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &CMatrix) -> CMatrix {
    let eig = nalgebra::linalg::SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| c(0.0, l).exp()));
    v * phases * v.adjoint()
}

/// Eigendecomposition of a unitary on the principal branch, for evaluating
/// many fractional powers of the same operator.
#[derive(Debug, Clone)]
pub struct PrincipalLog {
    basis: CMatrix,
    phases: Vec<f64>,
}

impl PrincipalLog {
    pub fn new(u: &UnitaryOp) -> Result<Self> {
        let err = unitarity_error(&u.mat);
        if err > validation_tol() {
            return Err(Error::NotUnitary(err));
        }
        let (basis, t) = nalgebra::linalg::Schur::new(u.mat.clone()).unpack();
        let pi = std::f64::consts::PI;
        let phases = t
            .diagonal()
            .iter()
            .map(|z| {
                let phi = z.arg();
                if phi <= -pi + 1e-12 {
                    pi
                } else {
                    phi
                }
            })
            .collect();
        Ok(Self { basis, phases })
    }

    /// Eigenphases in `(-pi, pi]`.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn power(&self, alpha: f64) -> CMatrix {
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.phases.len(),
            self.phases.iter().map(|phi| c(0.0, alpha * phi).exp()),
        ));
        &self.basis * diag * self.basis.adjoint()
    }
}

/// `u^alpha` on the principal branch: eigenphases in `(-pi, pi]` are scaled by alpha.
pub fn unitary_fractional_power(u: &UnitaryOp, alpha: f64) -> Result<UnitaryOp> {
    Ok(UnitaryOp { mat: PrincipalLog::new(u)?.power(alpha) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliWord;
    use crate::state::max_abs;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        max_abs(&(a - b)) < tol
    }

    /// `G P G^dag` as a Pauli word, if it is one.
    fn conjugate(d: u32, gate: &GateKind, p: &PauliWord) -> PauliWord {
        let g = gate_matrix(gate, d).unwrap().mat;
        PauliWord::from_dense(d, p.n(), &(&g * p.dense() * g.adjoint())).expect("Clifford image")
    }

    #[test]
    fn hadamard_and_cnot_qubit() {
        let h = gate_matrix(&GateKind::H, 2).unwrap().mat;
        let r = 0.5f64.sqrt();
        assert!(close(&h, &CMatrix::from_row_slice(2, 2, &[c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)]), 1e-15));
        let cx = gate_matrix(&GateKind::Cnot, 2).unwrap().mat;
        let expected = [0usize, 1, 3, 2];
        for (col, &row) in expected.iter().enumerate() {
            assert_eq!(cx[(row, col)], c(1.0, 0.0));
        }
    }

    #[test]
    fn gate_map_table_qutrit() {
        let zi = |a: u32, b: u32| PauliWord::from_exponents(3, &[0, 0], &[a, b]).unwrap();
        let xi = |a: u32, b: u32| PauliWord::from_exponents(3, &[a, b], &[0, 0]).unwrap();
        let cx = GateKind::Cnot;
        assert_eq!(conjugate(3, &cx, &zi(0, 1)).phase_free(), zi(1, 1));
        assert_eq!(conjugate(3, &cx, &zi(1, 0)).phase_free(), zi(1, 0));
        assert_eq!(conjugate(3, &cx, &xi(0, 1)).phase_free(), xi(0, 1));
        assert_eq!(conjugate(3, &cx, &xi(1, 0)).phase_free(), xi(1, 2));
        let x = PauliWord::x_on(3, 1, 0);
        let z = PauliWord::z_on(3, 1, 0);
        assert_eq!(conjugate(3, &GateKind::H, &x), z);
        // the table prints X here; the image is X^{d-1}
        assert_eq!(conjugate(3, &GateKind::H, &z), x.pow(2));
        assert_eq!(conjugate(3, &GateKind::S(2), &z), z.pow(2));
        assert_eq!(conjugate(3, &GateKind::S(2), &x).phase_free(), x.pow(2));
    }

    #[test]
    fn every_gate_is_clifford() {
        for d in [2u32, 3] {
            let mut kinds = vec![GateKind::H, GateKind::Cnot];
            if d == 3 {
                kinds.push(GateKind::S(2));
            }
            for kind in &kinds {
                let n = kind.arity();
                for q in 0..n {
                    for (a, b) in [(1, 0), (0, 1), (1, 1)] {
                        let p = PauliWord::single(d, n, q, a, b);
                        let g = gate_matrix(kind, d).unwrap().mat;
                        assert!(PauliWord::from_dense(d, n, &(&g * p.dense() * g.adjoint())).is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn s_power_rejected_when_not_coprime() {
        assert!(gate_matrix(&GateKind::S(2), 4).is_err());
        assert!(gate_matrix(&GateKind::S(0), 3).is_err());
    }

    #[test]
    fn bit_flip_encoder_codewords() {
        let enc = Circuit::new(2, 3).cx(0, 1).cx(0, 2);
        let one = enc.apply(&QuditState::from_digits(2, &[1, 0, 0]).unwrap()).unwrap();
        assert_eq!(one.amps[7], c(1.0, 0.0));
        let zero = enc.apply(&QuditState::from_digits(2, &[0, 0, 0]).unwrap()).unwrap();
        assert_eq!(zero.amps[0], c(1.0, 0.0));
        assert!(close(&circuit_unitary(&Circuit::new(2, 3)).unwrap().mat, &CMatrix::identity(8, 8), 1e-15));
    }

    fn random_circuit(d: u32, n: usize, len: usize, rng: &mut ChaCha8Rng) -> Circuit {
        let mut circ = Circuit::new(d, n);
        let mut pos = 0;
        for _ in 0..len {
            pos += rng.gen_range(0..2);
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            let kind = match rng.gen_range(0..3) {
                0 => GateKind::H,
                1 if d == 3 => GateKind::S(2),
                _ => GateKind::Cnot,
            };
            let qs: Vec<usize> = if kind.arity() == 2 { vec![a, b] } else { vec![a] };
            circ.push_at(pos, kind, &qs).unwrap();
            pos += 1;
        }
        circ
    }

    #[test]
    fn tensor_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..200 {
            let d = 2 + (i % 2) as u32;
            let circ = random_circuit(d, 3, 8, &mut rng);
            let t = encode_tensor(&circ, 20).unwrap();
            assert_eq!(decode_tensor(&t, d).unwrap(), circ);
        }
        let empty = encode_tensor(&Circuit::new(3, 3), 4).unwrap();
        assert!(empty.data.iter().all(|&v| v == 0));
        let one_h = encode_tensor(&Circuit::new(3, 3).h(0), 4).unwrap();
        assert_eq!(one_h.data.iter().filter(|&&v| v == 1).count(), 1);
        assert_eq!(one_h.get(0, 0, 0), 1);
        assert!(matches!(encode_tensor(&random_circuit(2, 3, 8, &mut rng), 2), Err(Error::DepthOverflow { .. })));
    }

    #[test]
    fn random_circuits_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let u = circuit_unitary(&random_circuit(3, 3, 10, &mut rng)).unwrap();
            assert!(unitarity_error(&u.mat) < 1e-12);
        }
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut circ = random_circuit(3, 3, 6, &mut rng);
        let u = su_d_unitary(&[0.3, -0.2, 0.9, 0.1, 0.0, 0.4, 0.5, -0.7], 3).unwrap();
        let pos = circ.next_pos();
        circ.push_at(pos, GateKind::custom(1, u.mat), &[2]).unwrap();
        let text = circ.to_string();
        assert_eq!(Circuit::parse(3, 3, &text).unwrap(), circ);
        assert!(Circuit::parse(3, 3, "0 Q 1").is_err());
        assert!(Circuit::parse(3, 3, "1 H 0\n0 H 1").is_err());
    }

    #[test]
    fn su_d_examples() {
        assert!(close(&su_d_unitary(&[0.0; 3], 2).unwrap().mat, &CMatrix::identity(2, 2), 1e-15));
        let pi2 = std::f64::consts::FRAC_PI_2;
        let u = su_d_unitary(&[pi2, 0.0, 0.0], 2).unwrap().mat;
        let ix = PauliWord::x_on(2, 1, 0).dense() * c(0.0, 1.0);
        assert!(close(&u, &ix, 1e-12));
        assert!(matches!(su_d_unitary(&[0.0; 3], 3), Err(Error::ParamLength { expected: 8, got: 3 })));
        let g = su_generators(3);
        assert_eq!(g.len(), 8);
        // lambda_3 = diag(1, -1, 0), lambda_8 = diag(1, 1, -2)/sqrt 3
        assert!((g[2][(1, 1)] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((g[7][(2, 2)] - c(-2.0 / 3f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((g[3][(0, 2)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fractional_power_endpoints() {
        let zx = PauliWord::z_on(2, 1, 0).dense() * PauliWord::x_on(2, 1, 0).dense().adjoint();
        let u = UnitaryOp::new(zx.clone()).unwrap();
        assert!(close(&unitary_fractional_power(&u, 0.0).unwrap().mat, &CMatrix::identity(2, 2), 1e-10));
        assert!(close(&unitary_fractional_power(&u, 1.0).unwrap().mat, &zx, 1e-10));
        let half = unitary_fractional_power(&u, 0.5).unwrap().mat;
        assert!(unitarity_error(&half) < 1e-10);
        assert!(close(&(&half * &half), &zx, 1e-10));
        let bad = UnitaryOp { mat: CMatrix::identity(2, 2) * c(2.0, 0.0) };
        assert!(unitary_fractional_power(&bad, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn semigroup(theta in proptest::collection::vec(-3.0f64..3.0, 8), a in 0.0f64..0.5, b in 0.0f64..0.5) {
            let u = su_d_unitary(&theta, 3).unwrap();
            let ua = unitary_fractional_power(&u, a).unwrap().mat;
            let ub = unitary_fractional_power(&u, b).unwrap().mat;
            let uab = unitary_fractional_power(&u, a + b).unwrap().mat;
            prop_assert!(close(&(ua * ub), &uab, 1e-9));
        }

        #[test]
        fn su_d_continuity(theta in proptest::collection::vec(-3.0f64..3.0, 8), k in 0usize..8) {
            let eps = 1e-6;
            let u = su_d_unitary(&theta, 3).unwrap().mat;
            let mut t2 = theta.clone();
            t2[k] += eps;
            let v = su_d_unitary(&t2, 3).unwrap().mat;
            prop_assert!(unitarity_error(&u) < 1e-10);
            prop_assert!(max_abs(&(u - v)) < 10.0 * eps);
        }
    }
}
