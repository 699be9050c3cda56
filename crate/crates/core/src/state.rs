//! Dense pure states, density operators, unitaries and Kraus channels.
//!
//! Qudit 0 is the most significant tensor factor: the basis index of
//! `|a_0 a_1 ... a_{n-1}>` is `sum a_q d^(n-1-q)`.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest register we are willing to allocate, in amplitudes (2^20).
pub const MAX_AMPLITUDES: usize = 1 << 20;

const DEFAULT_TOL: f64 = 1e-10;

// zero bits mean "unset"
static VALIDATION_TOL: AtomicU64 = AtomicU64::new(0);

/// Tolerance used by invariant checks (unitarity, completeness, trace).
pub fn validation_tol() -> f64 {
    match VALIDATION_TOL.load(Ordering::Relaxed) {
        0 => DEFAULT_TOL,
        bits => f64::from_bits(bits),
    }
}

pub fn set_validation_tol(tol: f64) {
    VALIDATION_TOL.store(tol.to_bits(), Ordering::Relaxed);
}

/// Largest entry modulus.
pub fn max_abs<'a>(entries: impl IntoIterator<Item = &'a C64>) -> f64 {
    entries.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{2 pi i k / m}`.
pub fn root_of_unity(k: i64, m: u32) -> C64 {
    let m = m as i64;
    let k = k.rem_euclid(m) as f64;
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k / m as f64)
}

pub fn register_dim(d: u32, n: usize) -> Result<usize> {
    let mut dim = 1usize;
    for _ in 0..n {
        dim = dim.checked_mul(d as usize).ok_or(Error::Budget(usize::MAX))?;
        if dim > MAX_AMPLITUDES {
            return Err(Error::Budget(dim));
        }
    }
    Ok(dim)
}

/// Digits of a basis index, qudit 0 first.
pub fn digits(mut index: usize, d: u32, n: usize) -> Vec<u32> {
    let mut out = vec![0; n];
    for q in (0..n).rev() {
        out[q] = (index % d as usize) as u32;
        index /= d as usize;
    }
    out
}

pub fn index_of(digits: &[u32], d: u32) -> usize {
    digits.iter().fold(0usize, |acc, &a| acc * d as usize + a as usize)
}

fn check_targets(n: usize, targets: &[usize]) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::Target(t));
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// Unitary deviation `max |U^dag U - I|`.
pub fn unitarity_error(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let p = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - c(target, 0.0)).norm());
        }
    }
    worst
}

/// Matrix `op` acting on `targets` (in that order), identity elsewhere.
pub fn embed(op: &CMatrix, d: u32, n: usize, targets: &[usize]) -> Result<CMatrix> {
    let dim = register_dim(d, n)?;
    let local = register_dim(d, targets.len())?;
    if op.nrows() != local || op.ncols() != local {
        return Err(Error::Dimension { expected: local, got: op.nrows() });
    }
    check_targets(n, targets)?;
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let cd = digits(col, d, n);
        let lc = index_of(&targets.iter().map(|&t| cd[t]).collect::<Vec<_>>(), d);
        for lr in 0..local {
            let amp = op[(lr, lc)];
            if amp == C64::default() {
                continue;
            }
            let mut rd = cd.clone();
            for (k, v) in digits(lr, d, targets.len()).into_iter().enumerate() {
                rd[targets[k]] = v;
            }
            out[(index_of(&rd, d), col)] += amp;
        }
    }
    Ok(out)
}

/// Applies `op` on `targets` of an amplitude vector in place of a full embedding.
pub fn apply_local(amps: &CVector, d: u32, n: usize, op: &CMatrix, targets: &[usize]) -> Result<CVector> {
    let local = register_dim(d, targets.len())?;
    if op.nrows() != local || op.ncols() != local {
        return Err(Error::Dimension { expected: local, got: op.nrows() });
    }
    check_targets(n, targets)?;
    let strides: Vec<usize> = targets.iter().map(|&t| (d as usize).pow((n - 1 - t) as u32)).collect();
    let offsets: Vec<usize> = (0..local)
        .map(|l| {
            digits(l, d, targets.len())
                .iter()
                .zip(&strides)
                .map(|(&a, &s)| a as usize * s)
                .sum()
        })
        .collect();
    let mut out = CVector::zeros(amps.len());
    let mut buf = vec![C64::default(); local];
    for base in 0..amps.len() {
        // visit each orbit once: bases whose target digits are all zero
        if strides.iter().any(|&s| (base / s) % d as usize != 0) {
            continue;
        }
        for (l, off) in offsets.iter().enumerate() {
            buf[l] = amps[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = C64::default();
            for (l, b) in buf.iter().enumerate() {
                acc += op[(r, l)] * b;
            }
            out[base + off] = acc;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    pub d: u32,
    pub n: usize,
    pub amps: CVector,
}

impl QuditState {
    pub fn new(d: u32, n: usize, amps: CVector) -> Result<Self> {
        if d < 2 {
            return Err(Error::Invalid(format!("qudit dimension {d} < 2")));
        }
        let dim = register_dim(d, n)?;
        if amps.len() != dim {
            return Err(Error::Dimension { expected: dim, got: amps.len() });
        }
        Ok(Self { d, n, amps })
    }

    pub fn basis(d: u32, n: usize, index: usize) -> Result<Self> {
        let dim = register_dim(d, n)?;
        if index >= dim {
            return Err(Error::Dimension { expected: dim, got: index });
        }
        let mut amps = CVector::zeros(dim);
        amps[index] = c(1.0, 0.0);
        Self::new(d, n, amps)
    }

    pub fn from_digits(d: u32, digits: &[u32]) -> Result<Self> {
        Self::basis(d, digits.len(), index_of(digits, d))
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let nrm = self.norm();
        if nrm == 0.0 {
            return Err(Error::ZeroBranch);
        }
        self.amps.unscale_mut(nrm);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QuditState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// Tensor product with `other` placed after `self`.
    pub fn tensor(&self, other: &QuditState) -> Result<QuditState> {
        if self.d != other.d {
            return Err(Error::Dimension { expected: self.d as usize, got: other.d as usize });
        }
        let amps = self.amps.kronecker(&other.amps);
        QuditState::new(self.d, self.n + other.n, amps)
    }

    pub fn apply(&self, op: &CMatrix, targets: &[usize]) -> Result<QuditState> {
        let amps = apply_local(&self.amps, self.d, self.n, op, targets)?;
        QuditState::new(self.d, self.n, amps)
    }

    pub fn density(&self) -> DensityOp {
        DensityOp { d: self.d, n: self.n, mat: &self.amps * self.amps.adjoint() }
    }

    /// Random state drawn from the unitarily invariant measure.
    pub fn random<R: Rng + ?Sized>(d: u32, n: usize, rng: &mut R) -> Result<Self> {
        let dim = register_dim(d, n)?;
        let amps = CVector::from_fn(dim, |_, _| c(gaussian(rng), gaussian(rng)));
        QuditState::new(d, n, amps)?.normalized()
    }
}

/// Standard normal sample via Box-Muller.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    pub mat: CMatrix,
}

impl UnitaryOp {
    pub fn new(mat: CMatrix) -> Result<Self> {
        let err = unitarity_error(&mat);
        if err > validation_tol() {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: CMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint() }
    }
}

/// Embeds `u` on `targets` and applies it; the norm is preserved.
pub fn apply_unitary(state: &QuditState, u: &UnitaryOp, targets: &[usize]) -> Result<QuditState> {
    state.apply(&u.mat, targets)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    pub d: u32,
    pub n: usize,
    pub mat: CMatrix,
}

impl DensityOp {
    pub fn new(d: u32, n: usize, mat: CMatrix) -> Result<Self> {
        let dim = register_dim(d, n)?;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::Dimension { expected: dim, got: mat.nrows() });
        }
        Ok(Self { d, n, mat })
    }

    pub fn maximally_mixed(d: u32, n: usize) -> Result<Self> {
        let dim = register_dim(d, n)?;
        Self::new(d, n, CMatrix::identity(dim, dim).unscale(dim as f64))
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Hermiticity, unit trace and positivity within the validation tolerance.
    pub fn is_valid(&self) -> bool {
        let tol = validation_tol();
        if max_abs(&(self.mat.clone() - self.mat.adjoint())) > tol {
            return false;
        }
        if (self.trace() - c(1.0, 0.0)).norm() > tol {
            return false;
        }
        let herm = (self.mat.clone() + self.mat.adjoint()).unscale(2.0);
        let eig = nalgebra::linalg::SymmetricEigen::new(herm);
        eig.eigenvalues.iter().all(|&l| l >= -tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    pub ops: Vec<CMatrix>,
}

impl KrausChannel {
    /// Validates `sum E^dag E = I`.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let ch = Self { ops };
        let err = ch.completeness_error()?;
        if err > validation_tol() * 10.0 {
            return Err(Error::NotTracePreserving(err));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self { ops: vec![CMatrix::identity(dim, dim)] }
    }

    pub fn dim(&self) -> usize {
        self.ops.first().map_or(0, |m| m.nrows())
    }

    pub fn completeness_error(&self) -> Result<f64> {
        let dim = self.dim();
        if dim == 0 {
            return Err(Error::Invalid("empty channel".into()));
        }
        let mut acc = CMatrix::zeros(dim, dim);
        for e in &self.ops {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::Dimension { expected: dim, got: e.nrows() });
            }
            acc += e.adjoint() * e;
        }
        acc -= CMatrix::identity(dim, dim);
        Ok(max_abs(&acc))
    }
}

/// `sum_k E_k rho E_k^dag` with the channel acting on `targets`.
pub fn apply_channel(rho: &DensityOp, ch: &KrausChannel, targets: &[usize]) -> Result<DensityOp> {
    let mut out = CMatrix::zeros(rho.mat.nrows(), rho.mat.ncols());
    for e in &ch.ops {
        let full = embed(e, rho.d, rho.n, targets)?;
        out += &full * &rho.mat * full.adjoint();
    }
    DensityOp::new(rho.d, rho.n, out)
}

/// Samples one Kraus branch with probability `||E_k psi||^2` and renormalizes.
pub fn sample_trajectory<R: Rng + ?Sized>(
    state: &QuditState,
    ch: &KrausChannel,
    targets: &[usize],
    rng: &mut R,
) -> Result<(QuditState, usize)> {
    let branches: Vec<QuditState> = ch.ops.iter().map(|e| state.apply(e, targets)).collect::<Result<_>>()?;
    let weights: Vec<f64> = branches.iter().map(|b| b.amps.norm_squared()).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroBranch);
    }
    let k = sample_index(&weights, total, rng);
    let chosen = branches.into_iter().nth(k).expect("index in range").normalized()?;
    Ok((chosen, k))
}

pub(crate) fn sample_index<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let mut u = rng.gen::<f64>() * total;
    let mut last = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        last = k;
        if u < w {
            return k;
        }
        u -= w;
    }
    last
}

/// Fidelity of `rho` with a pure target, `<t|rho|t>`.
pub fn fidelity(rho: &DensityOp, target: &QuditState) -> Result<f64> {
    if rho.mat.nrows() != target.dim() {
        return Err(Error::Dimension { expected: rho.mat.nrows(), got: target.dim() });
    }
    let v = &rho.mat * &target.amps;
    Ok(target.amps.dotc(&v).re.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shift(d: u32) -> CMatrix {
        CMatrix::from_fn(d as usize, d as usize, |r, col| {
            if r == (col + 1) % d as usize {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn tolerance_default() {
        assert_eq!(validation_tol(), 1e-10);
    }

    #[test]
    fn identity_leaves_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = QuditState::random(3, 2, &mut rng).unwrap();
        let out = apply_unitary(&s, &UnitaryOp::identity(3), &[1]).unwrap();
        assert!(max_abs(&(out.amps - s.amps)) < 1e-15);
    }

    #[test]
    fn hadamard_on_zero() {
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)])
            .unscale(2f64.sqrt());
        let s = QuditState::basis(2, 1, 0).unwrap();
        let out = apply_unitary(&s, &UnitaryOp::new(h).unwrap(), &[0]).unwrap();
        let r = 0.5f64.sqrt();
        assert!((out.amps[0] - c(r, 0.0)).norm() < 1e-12);
        assert!((out.amps[1] - c(r, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn shift_wraps_qutrit() {
        let s = QuditState::basis(3, 1, 2).unwrap();
        let out = s.apply(&shift(3), &[0]).unwrap();
        assert_eq!(out.amps[0], c(1.0, 0.0));
    }

    #[test]
    fn local_matches_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = QuditState::random(3, 3, &mut rng).unwrap();
        let op = shift(3).kronecker(&shift(3).adjoint());
        let fast = s.apply(&op, &[2, 0]).unwrap();
        let slow = embed(&op, 3, 3, &[2, 0]).unwrap() * &s.amps;
        assert!(max_abs(&(fast.amps - slow)) < 1e-14);
    }

    #[test]
    fn rejects_bad_targets() {
        let s = QuditState::basis(2, 2, 0).unwrap();
        let op = CMatrix::identity(4, 4);
        assert_eq!(s.apply(&op, &[0, 0]), Err(Error::DuplicateTarget(0)));
        assert_eq!(s.apply(&op, &[0, 2]), Err(Error::Target(2)));
        assert!(matches!(s.apply(&op, &[0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn channel_identity_and_flip() {
        let rho = QuditState::basis(2, 1, 0).unwrap().density();
        let same = apply_channel(&rho, &KrausChannel::identity(2), &[0]).unwrap();
        assert_eq!(same, rho);
        let flip = KrausChannel::new(vec![shift(2)]).unwrap();
        let out = apply_channel(&rho, &flip, &[0]).unwrap();
        assert!((out.mat[(1, 1)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn non_tp_channel_rejected() {
        let half = CMatrix::identity(2, 2).unscale(2.0);
        assert!(matches!(KrausChannel::new(vec![half]), Err(Error::NotTracePreserving(_))));
    }

    #[test]
    fn fidelity_examples() {
        let zero = QuditState::basis(2, 1, 0).unwrap();
        let one = QuditState::basis(2, 1, 1).unwrap();
        assert_eq!(fidelity(&zero.density(), &zero).unwrap(), 1.0);
        assert_eq!(fidelity(&zero.density(), &one).unwrap(), 0.0);
        let mixed = DensityOp::maximally_mixed(2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = QuditState::random(2, 1, &mut rng).unwrap();
        assert!((fidelity(&mixed, &t).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sampled_branch_frequency() {
        let r = 0.5f64.sqrt();
        let ch = KrausChannel::new(vec![CMatrix::identity(2, 2).scale(r), shift(2).scale(r)]).unwrap();
        let s = QuditState::basis(2, 1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let shots = 100_000;
        let ones = (0..shots).filter(|_| sample_trajectory(&s, &ch, &[0], &mut rng).unwrap().1 == 1).count();
        assert!((ones as f64 / shots as f64 - 0.5).abs() < 0.01);
        let (_, k) = sample_trajectory(&s, &KrausChannel::identity(2), &[0], &mut rng).unwrap();
        assert_eq!(k, 0);
    }

    #[test]
    fn density_validity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = QuditState::random(3, 2, &mut rng).unwrap();
        assert!(s.density().is_valid());
        let mut bad = s.density();
        bad.mat[(0, 0)] += c(0.5, 0.0);
        assert!(!bad.is_valid());
    }

    #[test]
    fn digits_round_trip() {
        for i in 0..27 {
            assert_eq!(index_of(&digits(i, 3, 3), 3), i);
        }
        assert_eq!(digits(5, 3, 3), vec![0, 1, 2]);
    }
}
