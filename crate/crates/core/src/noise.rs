//! Static Pauli channels and the time-dependent channels whose error branch
//! drifts from X-type to Z-type through a fractional unitary power.

use crate::error::{Error, Result};
use crate::gates::PrincipalLog;
use crate::pauli::{single_dense, PauliWord};
use crate::state::{c, max_abs, register_dim, CMatrix, KrausChannel, UnitaryOp};

/// Drift parameter `sin^2(pi t / tau)`.
pub fn alpha_of(t: f64, tau: f64) -> Result<f64> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::Invalid(format!("noise period must be positive, got {tau}")));
    }
    Ok((std::f64::consts::PI * t / tau).sin().powi(2))
}

/// Independent single-qudit Pauli errors with their probabilities; the
/// identity carries the remaining weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannelSpec {
    pub d: u32,
    pub errors: Vec<(PauliWord, f64)>,
}

impl PauliChannelSpec {
    pub fn new(d: u32, errors: Vec<(PauliWord, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for (w, p) in &errors {
            if w.d != d || w.n() != 1 {
                return Err(Error::Invalid(format!("channel error {w} is not a single-qudit word for d = {d}")));
            }
            if !(0.0..=1.0).contains(p) {
                return Err(Error::Invalid(format!("probability {p} outside [0, 1]")));
            }
            total += p;
        }
        if total > 1.0 + 1e-12 {
            return Err(Error::Invalid(format!("error probabilities sum to {total} > 1")));
        }
        Ok(Self { d, errors })
    }

    pub fn bit_flip(d: u32, p: f64) -> Result<Self> {
        Self::new(d, vec![(PauliWord::x_on(d, 1, 0), p)])
    }

    pub fn phase_flip(d: u32, p: f64) -> Result<Self> {
        Self::new(d, vec![(PauliWord::z_on(d, 1, 0), p)])
    }

    pub fn identity_weight(&self) -> f64 {
        (1.0 - self.errors.iter().map(|(_, p)| p).sum::<f64>()).max(0.0)
    }

    /// Single-qudit Kraus operators; zero-probability branches are dropped.
    pub fn kraus(&self) -> Result<KrausChannel> {
        let du = self.d as usize;
        let mut ops = vec![CMatrix::identity(du, du) * c(self.identity_weight().sqrt(), 0.0)];
        for (w, p) in &self.errors {
            if *p > 0.0 {
                ops.push(w.dense() * c(p.sqrt(), 0.0));
            }
        }
        KrausChannel::new(ops)
    }
}

/// The drifting channel. For qubits the probabilities are `[p]` with error
/// branch `sqrt(p) (Z X^dag)^alpha X`; for qutrits they are `[p1, p2]` with
/// branches `sqrt(p1) (Z X^dag)^alpha X` and `sqrt(p2) (Z^2 X)^alpha X^2`.
#[derive(Debug, Clone)]
pub struct AlphaChannel {
    pub d: u32,
    pub probs: Vec<f64>,
    pub tau: f64,
    branches: Vec<(PrincipalLog, CMatrix)>,
}

impl AlphaChannel {
    pub fn new(d: u32, probs: Vec<f64>, tau: f64) -> Result<Self> {
        let expected = match d {
            2 => 1,
            3 => 2,
            _ => return Err(Error::Invalid(format!("drifting channel defined for d = 2, 3 only, got {d}"))),
        };
        if probs.len() != expected {
            return Err(Error::ParamLength { expected, got: probs.len() });
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || probs.iter().sum::<f64>() >= 1.0 {
            return Err(Error::Invalid(format!("branch probabilities {probs:?} must lie in [0,1] and sum below 1")));
        }
        alpha_of(0.0, tau)?;
        let x = |k| single_dense(d, k, 0);
        let z = |k| single_dense(d, 0, k);
        let mut generators = vec![(&z(1) * x(1).adjoint(), x(1))];
        if d == 3 {
            generators.push((&z(2) * x(1), x(2)));
        }
        let branches = generators
            .into_iter()
            .map(|(g, tail)| Ok((PrincipalLog::new(&UnitaryOp::new(g)?)?, tail)))
            .collect::<Result<_>>()?;
        Ok(Self { d, probs, tau, branches })
    }

    pub fn qubit(p: f64, tau: f64) -> Result<Self> {
        Self::new(2, vec![p], tau)
    }

    /// Qutrit channel with the total error probability split evenly.
    pub fn qutrit_even(p: f64, tau: f64) -> Result<Self> {
        Self::new(3, vec![p / 2.0, p / 2.0], tau)
    }

    pub fn alpha(&self, t: f64) -> f64 {
        alpha_of(t, self.tau).expect("period validated at construction")
    }

    pub fn kraus_at(&self, t: f64) -> KrausChannel {
        self.kraus_at_alpha(self.alpha(t))
    }

    pub fn kraus_at_alpha(&self, alpha: f64) -> KrausChannel {
        let du = self.d as usize;
        let p_id = 1.0 - self.probs.iter().sum::<f64>();
        let mut ops = vec![CMatrix::identity(du, du) * c(p_id.sqrt(), 0.0)];
        for ((log, tail), p) in self.branches.iter().zip(&self.probs) {
            ops.push(log.power(alpha) * tail * c(p.sqrt(), 0.0));
        }
        KrausChannel { ops }
    }
}

/// Choi matrix `sum_k |K_k>><<K_k|`, a phase-insensitive fingerprint of a channel.
pub fn choi(ch: &KrausChannel) -> CMatrix {
    let dim = ch.dim();
    let mut out = CMatrix::zeros(dim * dim, dim * dim);
    for k in &ch.ops {
        let v = CMatrix::from_iterator(dim * dim, 1, k.iter().copied());
        out += &v * v.adjoint();
    }
    out
}

/// Largest entry of the Choi-matrix difference.
pub fn channel_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), got: b.dim() });
    }
    Ok(max_abs(&(choi(a) - choi(b))))
}

/// Independent copies of `per_qudit` on `n` qudits. Branch `i` is the product
/// whose base-k digits (qudit 0 most significant) index the local operators.
pub fn tensor_channel(per_qudit: &KrausChannel, n: usize) -> Result<KrausChannel> {
    if n == 0 {
        return Err(Error::Invalid("tensor channel needs n >= 1".into()));
    }
    let local = per_qudit.dim();
    register_dim(local as u32, n)?;
    let k = per_qudit.ops.len();
    let count = (k as f64).powi(n as i32);
    let budget = 2.0 * 4f64.powi(n as i32);
    if count > budget {
        return Err(Error::KrausBudget(count as usize));
    }
    let mut ops = per_qudit.ops.clone();
    for _ in 1..n {
        ops = ops.iter().flat_map(|a| per_qudit.ops.iter().map(move |b| a.kronecker(b))).collect();
    }
    let out = KrausChannel { ops };
    let err = out.completeness_error()?;
    if err > 1e-9 {
        return Err(Error::NotTracePreserving(err));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliWord;
    use crate::state::{apply_channel, QuditState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pure(d: u32, p: f64, word: &PauliWord) -> KrausChannel {
        let du = d as usize;
        KrausChannel::new(vec![CMatrix::identity(du, du) * c((1.0 - p).sqrt(), 0.0), word.dense() * c(p.sqrt(), 0.0)]).unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_of(0.0, 0.3).unwrap(), 0.0);
        assert!((alpha_of(0.15, 0.3).unwrap() - 1.0).abs() < 1e-15);
        assert!((alpha_of(0.075, 0.3).unwrap() - 0.5).abs() < 1e-12);
        assert!(alpha_of(1.0, 0.0).is_err());
        assert!(alpha_of(1.0, -1.0).is_err());
    }

    #[test]
    fn qubit_endpoints() {
        let ch = AlphaChannel::qubit(0.2, 1.0).unwrap();
        let x = PauliWord::x_on(2, 1, 0);
        let z = PauliWord::z_on(2, 1, 0);
        let start = ch.kraus_at(0.0);
        assert!(max_abs(&(&start.ops[1] - x.dense() * c(0.2f64.sqrt(), 0.0))) < 1e-12);
        assert!(channel_distance(&ch.kraus_at(0.5), &pure(2, 0.2, &z)).unwrap() < 1e-9);
        // branch 1 of the alpha = 0 channel flips |0> to |1>
        let rho = QuditState::basis(2, 1, 0).unwrap().density();
        let flipped = apply_channel(&rho, &KrausChannel { ops: vec![start.ops[1].clone()] }, &[0]).unwrap();
        assert!((flipped.mat[(1, 1)].re - 0.2).abs() < 1e-12);
    }

    #[test]
    fn qutrit_endpoints() {
        let ch = AlphaChannel::new(3, vec![0.1, 0.05], 1.0).unwrap();
        assert_eq!(ch.kraus_at(0.3).ops.len(), 3);
        let x = PauliWord::x_on(3, 1, 0);
        let z = PauliWord::z_on(3, 1, 0);
        let du = 3;
        let expect = |a: &PauliWord, b: &PauliWord| {
            KrausChannel::new(vec![
                CMatrix::identity(du, du) * c(0.85f64.sqrt(), 0.0),
                a.dense() * c(0.1f64.sqrt(), 0.0),
                b.dense() * c(0.05f64.sqrt(), 0.0),
            ])
            .unwrap()
        };
        assert!(channel_distance(&ch.kraus_at(0.0), &expect(&x, &x.pow(2))).unwrap() < 1e-9);
        assert!(channel_distance(&ch.kraus_at(0.5), &expect(&z, &z.pow(2))).unwrap() < 1e-9);
    }

    #[test]
    fn completeness_and_periodicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let chans = [AlphaChannel::qubit(0.3, 0.7).unwrap(), AlphaChannel::new(3, vec![0.2, 0.1], 0.4).unwrap()];
        for ch in &chans {
            for _ in 0..1000 {
                let t = rng.gen_range(-5.0..5.0);
                let k = ch.kraus_at(t);
                assert!(k.completeness_error().unwrap() < 1e-10);
                assert!(channel_distance(&k, &ch.kraus_at(t + ch.tau)).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn invalid_channels() {
        assert!(AlphaChannel::qubit(1.0, 1.0).is_err());
        assert!(AlphaChannel::qubit(0.1, 0.0).is_err());
        assert!(AlphaChannel::new(3, vec![0.6, 0.5], 1.0).is_err());
        assert!(AlphaChannel::new(5, vec![0.1], 1.0).is_err());
        assert!(PauliChannelSpec::new(2, vec![(PauliWord::x_on(2, 1, 0), 0.7), (PauliWord::z_on(2, 1, 0), 0.7)]).is_err());
    }

    #[test]
    fn tensor_bit_flip_weights() {
        let p = 0.1;
        let spec = PauliChannelSpec::bit_flip(2, p).unwrap().kraus().unwrap();
        let one = tensor_channel(&spec, 1).unwrap();
        assert_eq!(one.ops, spec.ops);
        let three = tensor_channel(&spec, 3).unwrap();
        assert_eq!(three.ops.len(), 8);
        // digits 100: X on qubit 0 only
        let w = (three.ops[4].adjoint() * &three.ops[4]).trace().re / 8.0;
        assert!((w - p * (1.0 - p) * (1.0 - p)).abs() < 1e-12);
        let none = tensor_channel(&PauliChannelSpec::bit_flip(2, 0.0).unwrap().kraus().unwrap(), 3).unwrap();
        assert_eq!(none.ops.len(), 1);
        assert!(tensor_channel(&spec, 0).is_err());
    }

    #[test]
    fn tensor_budget() {
        let many = KrausChannel::new((0..9).map(|_| CMatrix::identity(2, 2) * c(1.0 / 3.0, 0.0)).collect()).unwrap();
        assert!(matches!(tensor_channel(&many, 2), Err(Error::KrausBudget(81))));
    }
}
