//! Stabilizer codes: logical bases, Knill-Laflamme checks, syndrome
//! measurement, full correction cycles and concatenation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::{circuit_unitary, Circuit, GateKind};
use crate::pauli::{phase_order, syndrome_of, PauliWord, StabilizerSet};
use crate::state::{
    c, digits, register_dim, root_of_unity, sample_index, sample_trajectory, CMatrix, CVector, KrausChannel, QuditState, C64,
};

/// Tolerance of the Knill-Laflamme checks.
pub const KL_TOL: f64 = 1e-8;

/// Stabilizer residues, one per generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome(pub Vec<u32>);

impl Syndrome {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for Syndrome {
    /// Digits run together for d <= 10, comma separated otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&r| r < 10) {
            for r in &self.0 {
                write!(f, "{r}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl FromStr for Syndrome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad syndrome '{s}'"));
        if s.contains(',') {
            s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>().map(Syndrome)
        } else {
            s.chars().map(|ch| ch.to_digit(10).ok_or_else(bad)).collect::<Result<_>>().map(Syndrome)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KlMode {
    /// Codewords orthogonal, every error maps the code space off itself and
    /// distinct errors map it to mutually orthogonal spaces.
    Strict,
    /// `<i|Ea^dag Eb|j> = C_ab delta_ij` for every pair including the identity.
    Degenerate,
    /// Orthogonal codewords and `<i|E|j> = 0`: errors are detected, not corrected.
    Detection,
}

impl fmt::Display for KlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KlMode::Strict => "strict",
            KlMode::Degenerate => "degenerate",
            KlMode::Detection => "detection",
        })
    }
}

impl FromStr for KlMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(KlMode::Strict),
            "degenerate" => Ok(KlMode::Degenerate),
            "detection" => Ok(KlMode::Detection),
            other => Err(Error::Parse(format!("unknown KL mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KlClass {
    pub satisfied: usize,
    pub violated: usize,
    pub max_violation: f64,
}

impl KlClass {
    fn record(&mut self, violation: f64) {
        if violation > KL_TOL {
            self.violated += 1;
        } else {
            self.satisfied += 1;
        }
        self.max_violation = self.max_violation.max(violation);
    }

    pub fn total(&self) -> usize {
        self.satisfied + self.violated
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlReport {
    pub mode: KlMode,
    pub classes: [KlClass; 3],
}

impl KlReport {
    pub fn violations(&self) -> usize {
        self.classes.iter().map(|c| c.violated).sum()
    }

    pub fn total(&self) -> usize {
        self.classes.iter().map(|c| c.total()).sum()
    }

    pub fn max_violation(&self) -> f64 {
        self.classes.iter().map(|c| c.max_violation).fold(0.0, f64::max)
    }

    pub fn all_satisfied(&self) -> bool {
        self.violations() == 0
    }
}

impl fmt::Display for KlReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "KL mode {}", self.mode)?;
        for (i, cl) in self.classes.iter().enumerate() {
            writeln!(
                f,
                "  KL{}: {}/{} satisfied, max violation {:.3e}",
                i + 1,
                cl.satisfied,
                cl.total(),
                cl.max_violation
            )?;
        }
        write!(f, "  total: {} violations of {}", self.violations(), self.total())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    pub name: String,
    pub d: u32,
    pub n: usize,
    pub k: usize,
    pub encoder: Circuit,
    pub stabilizers: StabilizerSet,
    /// Recovery operator per syndrome; empty for detect-only codes.
    pub syndrome_table: BTreeMap<Syndrome, PauliWord>,
    pub correctable: Vec<PauliWord>,
    pub detect_only: bool,
    pub kl_mode: KlMode,
}

impl CodeSpec {
    /// Builds a code whose recovery table inverts the first correctable error
    /// seen for each syndrome. Later errors sharing a syndrome must differ from
    /// it by a stabilizer.
    pub fn new(
        name: &str,
        encoder: Circuit,
        k: usize,
        stabilizers: StabilizerSet,
        correctable: Vec<PauliWord>,
        kl_mode: KlMode,
    ) -> Result<Self> {
        let detect_only = kl_mode == KlMode::Detection;
        let mut table = BTreeMap::new();
        if !detect_only {
            for e in &correctable {
                let s = Syndrome(syndrome_of(e, &stabilizers)?);
                if s.is_trivial() && !stabilizers.contains(e)? {
                    return Err(Error::Invalid(format!("{name}: error {e} is undetectable")));
                }
                match table.get(&s) {
                    None => {
                        table.insert(s, e.adjoint());
                    }
                    Some(r) => {
                        let r: &PauliWord = r;
                        if !stabilizers.contains(&r.mul(e)?)? {
                            return Err(Error::Invalid(format!("{name}: errors share syndrome {s} but differ by a logical")));
                        }
                    }
                }
            }
        }
        Self::from_parts(name, encoder, k, stabilizers, table, correctable, detect_only, kl_mode)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        name: &str,
        encoder: Circuit,
        k: usize,
        stabilizers: StabilizerSet,
        syndrome_table: BTreeMap<Syndrome, PauliWord>,
        correctable: Vec<PauliWord>,
        detect_only: bool,
        kl_mode: KlMode,
    ) -> Result<Self> {
        let (d, n) = (encoder.d, encoder.n);
        if k > n {
            return Err(Error::Invalid(format!("{name}: k = {k} exceeds n = {n}")));
        }
        for w in stabilizers.generators.iter().chain(&correctable).chain(syndrome_table.values()) {
            if w.d != d || w.n() != n {
                return Err(Error::Dimension { expected: n, got: w.n() });
            }
        }
        for s in syndrome_table.keys() {
            if s.0.len() != stabilizers.len() {
                return Err(Error::Dimension { expected: stabilizers.len(), got: s.0.len() });
            }
        }
        Ok(Self {
            name: name.to_string(),
            d,
            n,
            k,
            encoder,
            stabilizers,
            syndrome_table,
            correctable,
            detect_only,
            kl_mode,
        })
    }

    pub fn logical_dim(&self) -> usize {
        (self.d as usize).pow(self.k as u32)
    }

    pub fn syndrome(&self, error: &PauliWord) -> Result<Syndrome> {
        Ok(Syndrome(syndrome_of(error, &self.stabilizers)?))
    }

    /// Encodes a k-qudit logical state.
    pub fn encode(&self, logical: &QuditState) -> Result<QuditState> {
        if logical.d != self.d || logical.n != self.k {
            return Err(Error::Dimension { expected: self.k, got: logical.n });
        }
        let ancilla = QuditState::basis(self.d, self.n - self.k, 0)?;
        self.encoder.apply(&logical.tensor(&ancilla)?)
    }

    /// Recovery for a measured syndrome; the trivial syndrome maps to identity.
    pub fn recovery(&self, s: &Syndrome) -> Result<PauliWord> {
        if s.is_trivial() {
            return Ok(PauliWord::identity(self.d, self.n));
        }
        if self.detect_only {
            return Err(Error::MissingRecovery(s.0.clone()));
        }
        self.syndrome_table.get(s).cloned().ok_or_else(|| Error::MissingRecovery(s.0.clone()))
    }
}

/// Encoded computational basis `U |j> (x) |0...0>`, j = 0..d^k.
pub fn logical_basis(code: &CodeSpec) -> Result<Vec<QuditState>> {
    (0..code.logical_dim())
        .map(|j| code.encode(&QuditState::basis(code.d, code.k, j)?))
        .collect()
}

fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

pub fn check_kl(code: &CodeSpec, errors: &[PauliWord], mode: KlMode) -> Result<KlReport> {
    let basis = logical_basis(code)?;
    for e in errors {
        if e.d != code.d || e.n() != code.n {
            return Err(Error::Dimension { expected: code.n, got: e.n() });
        }
    }
    check_kl_states(&basis, errors, mode)
}

/// Knill-Laflamme conditions for explicit codewords.
pub fn check_kl_states(basis: &[QuditState], errors: &[PauliWord], mode: KlMode) -> Result<KlReport> {
    let kdim = basis.len();
    let mut classes = [KlClass::default(); 3];
    for i in 0..kdim {
        for j in i + 1..kdim {
            classes[0].record(basis[i].inner(&basis[j]).norm());
        }
    }
    let mapped: Vec<Vec<CVector>> = errors.iter().map(|e| basis.iter().map(|s| e.apply_vec(&s.amps)).collect()).collect();
    let plain: Vec<CVector> = basis.iter().map(|s| s.amps.clone()).collect();
    match mode {
        KlMode::Strict | KlMode::Detection => {
            for m in &mapped {
                for a in &plain {
                    for b in m {
                        classes[1].record(inner(a, b).norm());
                    }
                }
            }
            if mode == KlMode::Strict {
                for x in 0..mapped.len() {
                    for y in x + 1..mapped.len() {
                        for a in &mapped[x] {
                            for b in &mapped[y] {
                                classes[2].record(inner(a, b).norm());
                            }
                        }
                    }
                }
            }
        }
        KlMode::Degenerate => {
            let pair = |class: &mut KlClass, left: &[CVector], right: &[CVector]| {
                let c00 = inner(&left[0], &right[0]);
                for (i, a) in left.iter().enumerate() {
                    for (j, b) in right.iter().enumerate() {
                        let v = inner(a, b);
                        class.record(if i == j { (v - c00).norm() } else { v.norm() });
                    }
                }
            };
            for m in &mapped {
                pair(&mut classes[1], &plain, m);
            }
            for x in 0..mapped.len() {
                for y in x + 1..mapped.len() {
                    pair(&mut classes[2], &mapped[x], &mapped[y]);
                }
            }
        }
    }
    Ok(KlReport { mode, classes })
}

/// `S^k psi` for k = 0..d.
fn powers(s: &PauliWord, amps: &CVector) -> Vec<CVector> {
    let mut out = vec![amps.clone()];
    for _ in 1..s.d {
        let next = s.apply_vec(out.last().expect("non-empty"));
        out.push(next);
    }
    out
}

/// Component of `amps` in the `w^r` eigenspace of `s`.
fn eigen_component(s: &PauliWord, pw: &[CVector], r: u32) -> CVector {
    let d = s.d;
    let mut acc = CVector::zeros(pw[0].len());
    for (k, v) in pw.iter().enumerate() {
        acc += v * root_of_unity(-((r as i64) * k as i64), d);
    }
    acc / c(d as f64, 0.0)
}

/// `P_s amps`: the component of `amps` carrying syndrome `s`.
pub fn syndrome_projection(code: &CodeSpec, amps: &CVector, s: &Syndrome) -> CVector {
    let mut v = amps.clone();
    for (g, &r) in code.stabilizers.generators.iter().zip(&s.0) {
        v = eigen_component(g, &powers(g, &v), r);
    }
    v
}

/// Measures every generator in turn, projecting onto the sampled eigenspace.
pub fn measure_syndrome<R: Rng + ?Sized>(state: &QuditState, code: &CodeSpec, rng: &mut R) -> Result<(Syndrome, QuditState)> {
    if state.d != code.d || state.n != code.n {
        return Err(Error::Dimension { expected: code.n, got: state.n });
    }
    let mut amps = state.amps.clone();
    let mut out = Vec::with_capacity(code.stabilizers.len());
    for s in &code.stabilizers.generators {
        let pw = powers(s, &amps);
        let comps: Vec<CVector> = (0..s.d).map(|r| eigen_component(s, &pw, r)).collect();
        let weights: Vec<f64> = comps.iter().map(|v| v.norm_squared()).collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroBranch);
        }
        let r = sample_index(&weights, total, rng);
        if weights[r] <= 0.0 {
            return Err(Error::ZeroBranch);
        }
        amps = &comps[r] / c(weights[r].sqrt(), 0.0);
        out.push(r as u32);
    }
    Ok((Syndrome(out), QuditState::new(code.d, code.n, amps)?))
}

/// Measure, recover and report the fidelity with `reference`.
pub fn correct<R: Rng + ?Sized>(code: &CodeSpec, noisy: &QuditState, reference: &QuditState, rng: &mut R) -> Result<(f64, Syndrome)> {
    let (s, post) = measure_syndrome(noisy, code, rng)?;
    let fixed = code.recovery(&s)?.apply(&post)?;
    Ok((reference.inner(&fixed).norm_sqr(), s))
}

/// Encode, sample the channel, measure, recover. A single-qudit channel acts
/// independently on every qudit; an n-qudit channel acts on the register.
pub fn run_cycle<R: Rng + ?Sized>(
    code: &CodeSpec,
    channel: &KrausChannel,
    logical_in: &QuditState,
    rng: &mut R,
) -> Result<(f64, Syndrome)> {
    let encoded = code.encode(logical_in)?;
    let mut noisy = encoded.clone();
    if channel.dim() == code.d as usize {
        for q in 0..code.n {
            noisy = sample_trajectory(&noisy, channel, &[q], rng)?.0;
        }
    } else if channel.dim() == register_dim(code.d, code.n)? {
        let all: Vec<usize> = (0..code.n).collect();
        noisy = sample_trajectory(&noisy, channel, &all, rng)?.0;
    } else {
        return Err(Error::Dimension { expected: register_dim(code.d, code.n)?, got: channel.dim() });
    }
    correct(code, &noisy, &encoded, rng)
}

/// Cycle with a fixed Pauli error in place of a sampled channel.
pub fn run_cycle_with_error<R: Rng + ?Sized>(
    code: &CodeSpec,
    error: &PauliWord,
    logical_in: &QuditState,
    rng: &mut R,
) -> Result<(f64, Syndrome)> {
    let encoded = code.encode(logical_in)?;
    let noisy = error.apply(&encoded)?;
    correct(code, &noisy, &encoded, rng)
}

/// Every non-identity single-qudit Pauli `X^a Z^b`, qudit-major.
pub fn single_qudit_paulis(d: u32, n: usize) -> Vec<PauliWord> {
    let mut out = Vec::new();
    for q in 0..n {
        for a in 0..d {
            for b in 0..d {
                if a != 0 || b != 0 {
                    let w = if d == 2 && a == 1 && b == 1 { PauliWord::y_on(2, n, q) } else { PauliWord::single(d, n, q, a, b) };
                    out.push(w);
                }
            }
        }
    }
    out
}

const SEARCH_LIMIT: usize = 1 << 20;

/// Phase-free words in order of increasing weight.
fn words_by_weight(d: u32, n: usize) -> Result<Vec<PauliWord>> {
    let count = (d as usize).checked_pow(2 * n as u32).filter(|&v| v <= SEARCH_LIMIT).ok_or(Error::Budget(SEARCH_LIMIT))?;
    let mut words: Vec<PauliWord> = (0..count)
        .map(|idx| {
            let dg = digits(idx, d, 2 * n);
            PauliWord { d, x: dg[..n].to_vec(), z: dg[n..].to_vec(), phase: 0 }
        })
        .collect();
    words.sort_by_key(|w| w.weight());
    Ok(words)
}

/// Phase that turns `word` into an operator with `word |0_L> = |target>`
/// given `word |0_L> = value |target>`.
fn phase_fix(word: &PauliWord, value: C64) -> Option<PauliWord> {
    let m = phase_order(word.d);
    let k = (0..m).find(|&k| (root_of_unity(k as i64, m) * value - c(1.0, 0.0)).norm() < 1e-8)?;
    let mut w = word.clone();
    w.phase = (w.phase + k) % m;
    Some(w)
}

/// Logical `X` and `Z` of a one-qudit code: `X|j_L> = |j+1_L>`, `Z|j_L> = w^j |j_L>`.
pub fn logical_operators(code: &CodeSpec) -> Result<(PauliWord, PauliWord)> {
    if code.k != 1 {
        return Err(Error::Invalid(format!("{}: logical operators need k = 1", code.name)));
    }
    let basis = logical_basis(code)?;
    let d = code.d as usize;
    let mut x_bar = None;
    let mut z_bar = None;
    for w in words_by_weight(code.d, code.n)? {
        if w.is_identity() || !code.stabilizers.generators.iter().all(|s| s.commutes(&w).unwrap_or(false)) {
            continue;
        }
        let images: Vec<CVector> = basis.iter().map(|b| w.apply_vec(&b.amps)).collect();
        if x_bar.is_none() {
            let vals: Vec<C64> = (0..d).map(|j| inner(&basis[(j + 1) % d].amps, &images[j])).collect();
            if vals.iter().all(|v| (v - vals[0]).norm() < 1e-8 && (v.norm() - 1.0).abs() < 1e-8) {
                x_bar = phase_fix(&w, vals[0]);
            }
        }
        if z_bar.is_none() {
            let vals: Vec<C64> = (0..d).map(|j| inner(&basis[j].amps, &images[j]) * root_of_unity(-(j as i64), code.d)).collect();
            if vals.iter().all(|v| (v - vals[0]).norm() < 1e-8 && (v.norm() - 1.0).abs() < 1e-8) {
                z_bar = phase_fix(&w, vals[0]);
            }
        }
        if let (Some(x), Some(z)) = (&x_bar, &z_bar) {
            return Ok((x.clone(), z.clone()));
        }
    }
    Err(Error::Exhausted(format!("{}: no logical Pauli operators found", code.name)))
}

/// `outer` with every physical qudit re-encoded by `inner`.
pub fn concatenate(outer: &CodeSpec, inner: &CodeSpec) -> Result<CodeSpec> {
    if outer.d != inner.d {
        return Err(Error::Invalid(format!("dimension mismatch {} vs {}", outer.d, inner.d)));
    }
    if inner.k != 1 {
        return Err(Error::Invalid(format!("inner code {} must encode one qudit", inner.name)));
    }
    let d = outer.d;
    let (m, no) = (inner.n, outer.n);
    let n = no * m;
    register_dim(d, n)?;
    let (xb, zb) = logical_operators(inner)?;

    let block_starts: Vec<usize> = (0..no).map(|q| q * m).collect();
    let mut encoder = outer.encoder.remap(n, &block_starts, 0)?;
    for b in 0..no {
        let map: Vec<usize> = (0..m).map(|i| b * m + i).collect();
        encoder = encoder.then(&inner.encoder.remap(n, &map, 0)?)?;
    }

    let mut gens = Vec::new();
    for b in 0..no {
        for s in &inner.stabilizers.generators {
            gens.push(s.embed(n, b * m));
        }
    }
    for s in &outer.stabilizers.generators {
        let mut lifted = PauliWord::identity(d, n);
        lifted.phase = s.phase;
        for q in 0..no {
            let local = xb.pow(s.x[q]).mul(&zb.pow(s.z[q]))?;
            lifted = lifted.mul(&local.embed(n, q * m))?;
        }
        gens.push(lifted);
    }
    let stabilizers = StabilizerSet::new(gens)?;

    let mut correctable = Vec::new();
    let mut table: BTreeMap<Syndrome, PauliWord> = BTreeMap::new();
    for e in single_qudit_paulis(d, n) {
        let s = Syndrome(syndrome_of(&e, &stabilizers)?);
        let ok = match table.get(&s) {
            Some(r) => stabilizers.contains(&r.mul(&e)?)?,
            None if s.is_trivial() => stabilizers.contains(&e)?,
            None => {
                table.insert(s, e.adjoint());
                true
            }
        };
        if ok {
            correctable.push(e);
        }
    }
    CodeSpec::from_parts(
        &format!("{}-over-{}", outer.name, inner.name),
        encoder,
        outer.k,
        stabilizers,
        table,
        correctable,
        false,
        KlMode::Degenerate,
    )
}

/// Encoder for a one-qudit code given only its stabilizers: logical operators
/// are searched directly and the resulting codewords are completed to a
/// unitary on the full register.
pub fn encoder_from_stabilizers(d: u32, n: usize, stabilizers: &StabilizerSet) -> Result<Circuit> {
    let dim = register_dim(d, n)?;
    let project = |amps: &CVector| -> CVector {
        let mut v = amps.clone();
        for s in &stabilizers.generators {
            v = eigen_component(s, &powers(s, &v), 0);
        }
        v
    };
    let mut zero = None;
    for idx in 0..dim {
        let v = project(&QuditState::basis(d, n, idx)?.amps);
        if v.norm() > 1e-6 {
            zero = Some(v);
            break;
        }
    }
    let code_vec = zero.ok_or(Error::ZeroBranch)?;

    // logical Z: commutes with the group, outside it, and its powers have
    // nontrivial action on the code space
    let centralizer: Vec<PauliWord> = words_by_weight(d, n)?
        .into_iter()
        .filter(|w| !w.is_identity() && stabilizers.generators.iter().all(|s| s.commutes(w).unwrap_or(false)))
        .filter(|w| !stabilizers.contains(w).unwrap_or(true))
        .collect();
    let z_bar = centralizer.first().cloned().ok_or_else(|| Error::Exhausted("logical Z".into()))?;
    let x_bar = centralizer
        .iter()
        .find(|w| z_bar.residue(w).map(|r| r == 1).unwrap_or(false))
        .cloned()
        .ok_or_else(|| Error::Exhausted("logical X".into()))?;

    // |0_L>: the eigenvector of Z_bar with the eigenvalue reached first.
    let pw = powers(&z_bar, &code_vec);
    let mut zero_l = None;
    for r in 0..phase_order(d) {
        let mut acc = CVector::zeros(dim);
        let m = phase_order(d);
        let mut cur = code_vec.clone();
        for k in 0..d {
            acc += &cur * root_of_unity(-((r as i64) * k as i64), m).powu(1);
            cur = z_bar.apply_vec(&cur);
        }
        let _ = &pw;
        if acc.norm() > 1e-6 {
            zero_l = Some(acc.normalize());
            break;
        }
    }
    let zero_l = zero_l.ok_or(Error::ZeroBranch)?;
    let mut codewords = vec![zero_l];
    for _ in 1..d {
        let next = x_bar.apply_vec(codewords.last().expect("non-empty"));
        codewords.push(next);
    }

    // columns |j,0..0> -> codeword j, remaining columns completed by Gram-Schmidt
    let stride = dim / d as usize;
    let mut cols: Vec<Option<CVector>> = vec![None; dim];
    for (j, w) in codewords.iter().enumerate() {
        cols[j * stride] = Some(w.clone());
    }
    let mut placed: Vec<CVector> = codewords.clone();
    let mut candidates = (0..dim).map(|i| QuditState::basis(d, n, i).map(|s| s.amps));
    for slot in cols.iter_mut().filter(|c| c.is_none()) {
        loop {
            let mut v = candidates.next().ok_or(Error::ZeroBranch)??;
            for p in &placed {
                let proj = p.dotc(&v);
                v -= p * proj;
            }
            if v.norm() > 1e-6 {
                let v = v.normalize();
                placed.push(v.clone());
                *slot = Some(v);
                break;
            }
        }
    }
    let mut u = CMatrix::zeros(dim, dim);
    for (j, col) in cols.into_iter().enumerate() {
        u.set_column(j, &col.expect("filled"));
    }
    let mut circuit = Circuit::new(d, n);
    let all: Vec<usize> = (0..n).collect();
    circuit.push(GateKind::custom(n, u), &all)?;
    Ok(circuit)
}

/// Dense encoder unitary, for tests and diagnostics.
pub fn encoder_unitary(code: &CodeSpec) -> Result<CMatrix> {
    Ok(circuit_unitary(&code.encoder)?.mat)
}
