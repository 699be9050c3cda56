//! Phase-tracked generalized Pauli words in symplectic form.
//!
//! A word is `u^k * X^{x_0} Z^{z_0} (x) ... (x) X^{x_{n-1}} Z^{z_{n-1}}` with the
//! X factor left of the Z factor on every qudit. The phase unit `u` is `i` for
//! d = 2 (and `e^{i pi/d}` for other even d) and `w = e^{2 pi i/d}` for odd d,
//! so `w = u^{m/d}` where `m` is [`phase_order`].

use std::fmt;

use crate::error::{Error, Result};
use crate::state::{c, max_abs, root_of_unity, CMatrix, CVector, QuditState};

/// Order of the phase unit: 2d for even d (4 for qubits), d for odd d.
pub fn phase_order(d: u32) -> u32 {
    if d.is_multiple_of(2) {
        2 * d
    } else {
        d
    }
}

/// Power of the phase unit equal to one factor of `w`.
fn omega_step(d: u32) -> u32 {
    phase_order(d) / d
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    pub d: u32,
    pub x: Vec<u32>,
    pub z: Vec<u32>,
    pub phase: u32,
}

impl PauliWord {
    pub fn new(d: u32, x: Vec<u32>, z: Vec<u32>, phase: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Invalid(format!("qudit dimension {d} < 2")));
        }
        if x.len() != z.len() {
            return Err(Error::Shape);
        }
        let x = x.into_iter().map(|v| v % d).collect();
        let z = z.into_iter().map(|v| v % d).collect();
        Ok(Self { d, x, z, phase: phase % phase_order(d) })
    }

    pub fn identity(d: u32, n: usize) -> Self {
        Self { d, x: vec![0; n], z: vec![0; n], phase: 0 }
    }

    /// `X^a Z^b` on qudit `q`, identity elsewhere.
    pub fn single(d: u32, n: usize, q: usize, a: u32, b: u32) -> Self {
        let mut w = Self::identity(d, n);
        w.x[q] = a % d;
        w.z[q] = b % d;
        w
    }

    pub fn x_on(d: u32, n: usize, q: usize) -> Self {
        Self::single(d, n, q, 1, 0)
    }

    pub fn z_on(d: u32, n: usize, q: usize) -> Self {
        Self::single(d, n, q, 0, 1)
    }

    /// Y on qudit `q`: `i XZ` for qubits, `XZ` for odd d.
    pub fn y_on(d: u32, n: usize, q: usize) -> Self {
        let mut w = Self::single(d, n, q, 1, 1);
        if d == 2 {
            w.phase = 1;
        }
        w
    }

    /// Phase-free word from exponent vectors.
    pub fn from_exponents(d: u32, x: &[u32], z: &[u32]) -> Result<Self> {
        Self::new(d, x.to_vec(), z.to_vec(), 0)
    }

    /// Qubit word from a string over {I, X, Y, Z}, qudit 0 first.
    pub fn from_letters(s: &str) -> Result<Self> {
        let n = s.chars().count();
        let mut w = Self::identity(2, n);
        for (q, ch) in s.chars().enumerate() {
            let f = match ch {
                'I' => Self::identity(2, n),
                'X' => Self::x_on(2, n, q),
                'Y' => Self::y_on(2, n, q),
                'Z' => Self::z_on(2, n, q),
                other => return Err(Error::Parse(format!("unknown Pauli letter '{other}'"))),
            };
            w = w.mul(&f)?;
        }
        Ok(w)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&v| v == 0)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).filter(|(a, b)| **a != 0 || **b != 0).count()
    }

    /// Same operator with phase dropped.
    pub fn phase_free(&self) -> Self {
        Self { phase: 0, ..self.clone() }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.d != other.d || self.n() != other.n() {
            return Err(Error::Shape);
        }
        Ok(())
    }

    /// Product `self * other` using `(X^i Z^j)(X^k Z^l) = w^{jk} X^{i+k} Z^{j+l}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let d = self.d;
        let m = phase_order(d) as u64;
        let cross: u64 = self.z.iter().zip(&other.x).map(|(&j, &k)| j as u64 * k as u64).sum();
        let phase = (self.phase as u64 + other.phase as u64 + omega_step(d) as u64 * (cross % d as u64)) % m;
        let x = self.x.iter().zip(&other.x).map(|(a, b)| (a + b) % d).collect();
        let z = self.z.iter().zip(&other.z).map(|(a, b)| (a + b) % d).collect();
        Ok(Self { d, x, z, phase: phase as u32 })
    }

    pub fn adjoint(&self) -> Self {
        let d = self.d;
        let m = phase_order(d);
        let xz: u64 = self.x.iter().zip(&self.z).map(|(&a, &b)| a as u64 * b as u64).sum();
        let phase = ((m - self.phase) as u64 + omega_step(d) as u64 * (xz % d as u64)) % m as u64;
        Self {
            d,
            x: self.x.iter().map(|&a| (d - a) % d).collect(),
            z: self.z.iter().map(|&b| (d - b) % d).collect(),
            phase: phase as u32,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.d, self.n());
        for _ in 0..k {
            out = out.mul(self).expect("same shape");
        }
        out
    }

    /// Residue `r` with `self * other = w^r other * self`.
    pub fn residue(&self, other: &Self) -> Result<u32> {
        self.check(other)?;
        let d = self.d as i64;
        let r: i64 = (0..self.n())
            .map(|q| self.z[q] as i64 * other.x[q] as i64 - other.z[q] as i64 * self.x[q] as i64)
            .sum();
        Ok(r.rem_euclid(d) as u32)
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        Ok(self.residue(other)? == 0)
    }

    /// Word acting on `n` qudits, placing this word's qudits at `offset`.
    pub fn embed(&self, n: usize, offset: usize) -> Self {
        let mut w = Self::identity(self.d, n);
        w.x[offset..offset + self.n()].copy_from_slice(&self.x);
        w.z[offset..offset + self.n()].copy_from_slice(&self.z);
        w.phase = self.phase;
        w
    }

    /// Tensor product `self (x) other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::Shape);
        }
        let mut x = self.x.clone();
        x.extend(&other.x);
        let mut z = self.z.clone();
        z.extend(&other.z);
        Self::new(self.d, x, z, self.phase + other.phase)
    }

    pub fn phase_value(&self) -> crate::state::C64 {
        root_of_unity(self.phase as i64, phase_order(self.d))
    }

    /// Dense matrix of the word.
    pub fn dense(&self) -> CMatrix {
        let mut out = CMatrix::from_element(1, 1, self.phase_value());
        for q in 0..self.n() {
            out = out.kronecker(&single_dense(self.d, self.x[q], self.z[q]));
        }
        out
    }

    /// Recovers the word from a dense matrix, `None` if it is not a phased Pauli.
    pub fn from_dense(d: u32, n: usize, m: &CMatrix) -> Option<Self> {
        let dim = crate::state::register_dim(d, n).ok()?;
        if m.nrows() != dim || m.ncols() != dim {
            return None;
        }
        let col0 = m.column(0);
        let row = (0..dim).max_by(|&a, &b| col0[a].norm().partial_cmp(&col0[b].norm()).unwrap())?;
        let x: Vec<u32> = crate::state::digits(row, d, n);
        let base = col0[row];
        let mut z = vec![0u32; n];
        for q in 0..n {
            let mut dg = vec![0u32; n];
            dg[q] = 1;
            let col = crate::state::index_of(&dg, d);
            let mut out = dg.clone();
            for (o, xv) in out.iter_mut().zip(&x) {
                *o = (*o + xv) % d;
            }
            let ratio = m[(crate::state::index_of(&out, d), col)] / base;
            z[q] = (0..d).find(|&b| (ratio - root_of_unity(b as i64, d)).norm() < 1e-8)?;
        }
        let word = Self::new(d, x, z, 0).ok()?;
        let dense = word.dense();
        let order = phase_order(d);
        let k = (0..order).find(|&k| (base - root_of_unity(k as i64, order) * dense[(row, 0)]).norm() < 1e-8)?;
        let out = Self { phase: k, ..word };
        if max_abs(&(out.dense() - m)) < 1e-8 {
            Some(out)
        } else {
            None
        }
    }

    /// Applies the word to a state vector without forming the matrix.
    pub fn apply(&self, state: &QuditState) -> Result<QuditState> {
        if state.d != self.d || state.n != self.n() {
            return Err(Error::Shape);
        }
        let amps = self.apply_vec(&state.amps);
        QuditState::new(state.d, state.n, amps)
    }

    pub(crate) fn apply_vec(&self, amps: &CVector) -> CVector {
        let d = self.d as usize;
        let n = self.n();
        let m = phase_order(self.d) as i64;
        let step = omega_step(self.d) as i64;
        let mut out = CVector::zeros(amps.len());
        let mut digits = vec![0usize; n];
        for amp in amps.iter() {
            if *amp == crate::state::C64::default() {
                advance(&mut digits, d);
                continue;
            }
            // Z^z phase from the input digit, then X^x shifts it.
            let mut ph: i64 = self.phase as i64;
            let mut target = 0usize;
            for q in 0..n {
                ph += step * (self.z[q] as i64 * digits[q] as i64);
                target = target * d + (digits[q] + self.x[q] as usize) % d;
            }
            out[target] += amp * root_of_unity(ph.rem_euclid(m), m as u32);
            advance(&mut digits, d);
        }
        out
    }
}

fn advance(digits: &mut [usize], d: usize) {
    for q in (0..digits.len()).rev() {
        digits[q] += 1;
        if digits[q] < d {
            return;
        }
        digits[q] = 0;
    }
}

/// Dense `X^a Z^b` on one qudit.
pub fn single_dense(d: u32, a: u32, b: u32) -> CMatrix {
    let du = d as usize;
    CMatrix::from_fn(du, du, |r, col| {
        if r == (col + a as usize) % du {
            root_of_unity((b as i64) * col as i64, d)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Stabilizer residues of `error`: component j is `r` with `S_j E = w^r E S_j`.
pub fn syndrome_of(error: &PauliWord, stabs: &StabilizerSet) -> Result<Vec<u32>> {
    stabs.generators.iter().map(|s| s.residue(error)).collect()
}

/// A set of pairwise commuting generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerSet {
    pub generators: Vec<PauliWord>,
}

impl StabilizerSet {
    pub fn new(generators: Vec<PauliWord>) -> Result<Self> {
        if let Some(first) = generators.first() {
            for g in &generators {
                first.check(g)?;
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !a.commutes(b)? {
                    return Err(Error::Invalid(format!("generators {a} and {b} do not commute")));
                }
            }
        }
        Ok(Self { generators })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Every product `prod S_i^{a_i}`, in enumeration order.
    pub fn elements(&self) -> Result<Vec<PauliWord>> {
        let k = self.generators.len();
        if k > 8 {
            return Err(Error::TooManyGenerators(k));
        }
        let Some(first) = self.generators.first() else {
            return Ok(Vec::new());
        };
        let d = first.d;
        let mut out = vec![PauliWord::identity(d, first.n())];
        for g in &self.generators {
            let powers: Vec<PauliWord> = (0..d).map(|p| g.pow(p)).collect();
            out = out
                .iter()
                .flat_map(|w| powers.iter().map(move |p| w.mul(p).expect("same shape")))
                .collect();
        }
        Ok(out)
    }

    /// True iff `word` equals some product of generators up to phase.
    pub fn contains(&self, word: &PauliWord) -> Result<bool> {
        if word.is_identity() {
            return Ok(true);
        }
        let target = word.phase_free();
        Ok(self.elements()?.iter().any(|e| e.phase_free() == target))
    }

    /// True iff no generator is a product of the others.
    pub fn is_independent(&self) -> Result<bool> {
        for i in 0..self.len() {
            let mut rest = self.generators.clone();
            let g = rest.remove(i);
            if (StabilizerSet { generators: rest }).contains(&g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same group as `other`, phases ignored.
    pub fn same_group(&self, other: &StabilizerSet) -> Result<bool> {
        let mut a: Vec<PauliWord> = self.elements()?.into_iter().map(|w| w.phase_free()).collect();
        let mut b: Vec<PauliWord> = other.elements()?.into_iter().map(|w| w.phase_free()).collect();
        a.sort();
        a.dedup();
        b.sort();
        b.dedup();
        Ok(a == b)
    }
}

/// Membership of `word` (up to phase) in the group generated by `stabs`.
pub fn in_group(word: &PauliWord, stabs: &StabilizerSet) -> Result<bool> {
    stabs.contains(word)
}

fn phase_symbol(d: u32) -> &'static str {
    if d.is_multiple_of(2) {
        "i"
    } else {
        "ω"
    }
}

impl fmt::Display for PauliWord {
    /// Renders `ω^k X^i Z^j ⊗ ...`; `i^k` is used for the qubit phase unit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != 0 {
            write!(f, "{}^{} ", phase_symbol(self.d), self.phase)?;
        }
        let factors: Vec<String> = (0..self.n())
            .map(|q| {
                let mut parts = Vec::new();
                match self.x[q] {
                    0 => {}
                    1 => parts.push("X".to_string()),
                    a => parts.push(format!("X^{a}")),
                }
                match self.z[q] {
                    0 => {}
                    1 => parts.push("Z".to_string()),
                    b => parts.push(format!("Z^{b}")),
                }
                if parts.is_empty() {
                    "I".to_string()
                } else {
                    parts.join(" ")
                }
            })
            .collect();
        write!(f, "{}", factors.join(" ⊗ "))
    }
}

fn parse_power(tok: &str, base: char) -> Result<u32> {
    let rest = &tok[base.len_utf8()..];
    if rest.is_empty() {
        return Ok(1);
    }
    rest.strip_prefix('^')
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad power in '{tok}'")))
}

impl PauliWord {
    /// Parses the [`Display`](fmt::Display) format. `w`, `ω` and `i` are accepted
    /// as phase symbols, `(x)` as an ASCII tensor sign.
    pub fn parse(d: u32, text: &str) -> Result<Self> {
        let text = text.trim().replace("(x)", "⊗");
        let mut phase = 0u32;
        let mut body = text.as_str();
        let first = body.split_whitespace().next().ok_or_else(|| Error::Parse("empty word".into()))?;
        if let Some(p) = first.strip_prefix("ω^").or_else(|| first.strip_prefix("w^")).or_else(|| first.strip_prefix("i^")) {
            phase = p.parse().map_err(|_| Error::Parse(format!("bad phase '{first}'")))?;
            body = body.trim_start()[first.len()..].trim_start();
        }
        let mut x = Vec::new();
        let mut z = Vec::new();
        for factor in body.split('⊗') {
            let (mut a, mut b) = (0u32, 0u32);
            for tok in factor.split_whitespace() {
                match tok.chars().next() {
                    Some('I') if tok == "I" => {}
                    Some('X') => a = parse_power(tok, 'X')?,
                    Some('Z') => b = parse_power(tok, 'Z')?,
                    _ => return Err(Error::Parse(format!("unexpected token '{tok}'"))),
                }
            }
            if factor.trim().is_empty() {
                return Err(Error::Parse("empty tensor factor".into()));
            }
            if a >= d || b >= d {
                return Err(Error::Parse(format!("exponent out of range in '{}'", factor.trim())));
            }
            x.push(a);
            z.push(b);
        }
        if phase >= phase_order(d) {
            return Err(Error::Parse(format!("phase exponent {phase} out of range")));
        }
        Self::new(d, x, z, phase)
    }
}
