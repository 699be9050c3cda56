//! Syndrome agent: builds one stabilizer per ancilla by choosing a Pauli
//! (controlled from the ancilla, conjugated by H) on every data qudit.

use rand::RngCore;

use super::{one_hot_into, Env, Step};
use crate::codes::KL_TOL;
use crate::error::{Error, Result};
use crate::pauli::{phase_order, PauliWord, StabilizerSet};
use crate::state::{c, root_of_unity, QuditState};

/// Single-qudit `(x, z)` exponents, every non-identity pair in lexicographic
/// order, then the identity. For qubits: Z, X, Y, I.
pub fn syndrome_actions(d: u32) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).filter(|&p| p != (0, 0)).collect();
    out.push((0, 0));
    out
}

/// Outcome of the four stabilizer-candidate conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateCheck {
    /// The candidate, rephased so that it fixes the codewords, when possible.
    pub word: PauliWord,
    /// Fixes every codeword: `<i|S|j> = delta_ij`.
    pub fixes_codewords: bool,
    /// Has a nonzero residue against at least one correctable error.
    pub detects: bool,
    /// Not already in the group generated by the learned stabilizers.
    pub new: bool,
    /// Commutes with every learned stabilizer.
    pub commutes: bool,
}

impl CandidateCheck {
    pub fn passed(&self) -> bool {
        self.fixes_codewords && self.detects && self.new && self.commutes
    }
}

/// Rephases `word` by the common eigenvalue of the codewords, if there is one.
fn fix_phase(word: &PauliWord, basis: &[QuditState]) -> Option<PauliWord> {
    let images: Vec<_> = basis.iter().map(|s| word.apply_vec(&s.amps)).collect();
    let lambda = basis.first()?.amps.dotc(&images[0]);
    for (i, a) in basis.iter().enumerate() {
        for (j, img) in images.iter().enumerate() {
            let v = a.amps.dotc(img);
            let expect = if i == j { lambda } else { c(0.0, 0.0) };
            if (v - expect).norm() > KL_TOL {
                return None;
            }
        }
    }
    let m = phase_order(word.d);
    let k = (0..m).find(|&k| (root_of_unity(k as i64, m) * lambda - c(1.0, 0.0)).norm() < KL_TOL)?;
    let mut w = word.clone();
    w.phase = (w.phase + k) % m;
    Some(w)
}

pub fn check_candidate(word: &PauliWord, basis: &[QuditState], correctable: &[PauliWord], learned: &[PauliWord]) -> Result<CandidateCheck> {
    let fixed = fix_phase(word, basis);
    let w = fixed.clone().unwrap_or_else(|| word.clone());
    let mut detects = false;
    for e in correctable {
        if w.residue(e)? != 0 {
            detects = true;
            break;
        }
    }
    let mut commutes = true;
    for s in learned {
        if !s.commutes(&w)? {
            commutes = false;
        }
    }
    // the group test needs commuting generators
    let new = if commutes && !learned.is_empty() {
        !StabilizerSet::new(learned.to_vec())?.contains(&w)?
    } else {
        !w.is_identity()
    };
    Ok(CandidateCheck { word: w, fixes_codewords: fixed.is_some(), detects, new, commutes })
}

fn word_from_row(d: u32, row: &[usize], actions: &[(u32, u32)]) -> Result<PauliWord> {
    let x: Vec<u32> = row.iter().map(|&a| actions[a].0).collect();
    let z: Vec<u32> = row.iter().map(|&a| actions[a].1).collect();
    PauliWord::from_exponents(d, &x, &z)
}

fn row_of(word: &PauliWord, actions: &[(u32, u32)]) -> Vec<usize> {
    (0..word.n())
        .map(|q| actions.iter().position(|&p| p == (word.x[q], word.z[q])).expect("complete action set"))
        .collect()
}

/// One ancilla at a time: at step `t` the agent picks the Pauli placed on
/// data qudit `t`. The reward is 1 at the end of the episode iff the
/// resulting word passes all four candidate conditions, 0 otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SyndromeEnv {
    pub d: u32,
    pub n: usize,
    pub rows: usize,
    basis: Vec<QuditState>,
    correctable: Vec<PauliWord>,
    learned: Vec<PauliWord>,
    actions: Vec<(u32, u32)>,
    current: Vec<usize>,
    last: Option<CandidateCheck>,
}

impl SyndromeEnv {
    /// `basis` are the encoded logical basis states; `rows` the number of
    /// ancillas (stabilizers) to learn.
    pub fn new(basis: Vec<QuditState>, rows: usize, correctable: Vec<PauliWord>, learned: Vec<PauliWord>) -> Result<Self> {
        let first = basis.first().ok_or_else(|| Error::Invalid("syndrome agent needs codewords".into()))?;
        let (d, n) = (first.d, first.n);
        if learned.len() >= rows {
            return Err(Error::Invalid(format!("all {rows} stabilizers already learned")));
        }
        Ok(Self { d, n, rows, basis, correctable, learned, actions: syndrome_actions(d), current: Vec::new(), last: None })
    }

    pub fn ancilla(&self) -> usize {
        self.learned.len()
    }

    pub fn learned(&self) -> &[PauliWord] {
        &self.learned
    }

    pub fn actions(&self) -> &[(u32, u32)] {
        &self.actions
    }

    pub fn last_check(&self) -> Option<&CandidateCheck> {
        self.last.as_ref()
    }

    /// Index of the action placing `(x, z)`.
    pub fn action_of(&self, x: u32, z: u32) -> Option<usize> {
        self.actions.iter().position(|&p| p == (x, z))
    }

    /// Freezes `word` as the next stabilizer and moves to the next ancilla.
    pub fn commit(&mut self, word: PauliWord) -> Result<()> {
        if self.learned.len() >= self.rows {
            return Err(Error::Invalid("no ancilla left".into()));
        }
        self.learned.push(word);
        Ok(())
    }

    fn observe(&self) -> Vec<f64> {
        let cats = self.actions.len() + 1;
        let mut obs = vec![0.0; self.rows * self.n * cats];
        for (r, w) in self.learned.iter().enumerate() {
            for (q, a) in row_of(w, &self.actions).into_iter().enumerate() {
                one_hot_into(&mut obs[(r * self.n + q) * cats..], a);
            }
        }
        let r = self.learned.len();
        if r < self.rows {
            for q in 0..self.n {
                let a = self.current.get(q).copied().unwrap_or(self.actions.len());
                one_hot_into(&mut obs[(r * self.n + q) * cats..], a);
            }
        }
        obs
    }
}

impl Env for SyndromeEnv {
    fn obs_dim(&self) -> usize {
        self.rows * self.n * (self.actions.len() + 1)
    }

    fn n_actions(&self) -> usize {
        self.actions.len()
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        if self.learned.len() >= self.rows {
            return Err(Error::Invalid("no ancilla left".into()));
        }
        self.current.clear();
        self.last = None;
        Ok(self.observe())
    }

    fn step(&mut self, action: usize) -> Result<Step> {
        if self.current.len() >= self.n {
            return Err(Error::Invalid("syndrome episode already finished".into()));
        }
        if action >= self.actions.len() {
            return Err(Error::Invalid(format!("syndrome action {action} out of range")));
        }
        self.current.push(action);
        let done = self.current.len() == self.n;
        let mut reward = 0.0;
        if done {
            let w = word_from_row(self.d, &self.current, &self.actions)?;
            let check = check_candidate(&w, &self.basis, &self.correctable, &self.learned)?;
            if check.passed() {
                reward = 1.0;
            }
            self.last = Some(check);
        }
        Ok(Step { obs: self.observe(), reward, done })
    }

    fn solved(&self) -> bool {
        self.last.as_ref().is_some_and(CandidateCheck::passed)
    }

    fn depth(&self) -> usize {
        self.current.iter().filter(|&&a| a + 1 != self.actions.len()).count()
    }
}

/// Single agent for all ancillas: each step picks `(Pauli, ancilla, data
/// qudit)`, for `rows * n` steps. Success requires every row to fix the
/// codewords, the rows to commute and be independent, and every correctable
/// error to have a distinct nontrivial syndrome.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementarySyndromeEnv {
    pub d: u32,
    pub n: usize,
    pub rows: usize,
    pub r_success: f64,
    pub r_failure: f64,
    basis: Vec<QuditState>,
    correctable: Vec<PauliWord>,
    paulis: Vec<(u32, u32)>,
    grid: Vec<usize>,
    t: usize,
    result: Option<Vec<PauliWord>>,
}

impl ElementarySyndromeEnv {
    pub fn new(basis: Vec<QuditState>, rows: usize, correctable: Vec<PauliWord>) -> Result<Self> {
        let first = basis.first().ok_or_else(|| Error::Invalid("syndrome agent needs codewords".into()))?;
        let (d, n) = (first.d, first.n);
        if rows == 0 {
            return Err(Error::Invalid("need at least one ancilla".into()));
        }
        let paulis = syndrome_actions(d);
        let identity = paulis.len() - 1;
        Ok(Self {
            d,
            n,
            rows,
            r_success: 10.0,
            r_failure: -1.0,
            basis,
            correctable,
            paulis,
            grid: vec![identity; rows * n],
            t: 0,
            result: None,
        })
    }

    fn horizon(&self) -> usize {
        self.rows * self.n
    }

    /// Decodes an action into `(pauli index, ancilla, data qudit)`.
    pub fn decode(&self, action: usize) -> (usize, usize, usize) {
        let per_pauli = self.rows * self.n;
        (action / per_pauli, (action % per_pauli) / self.n, action % self.n)
    }

    pub fn encode(&self, pauli: usize, ancilla: usize, qudit: usize) -> usize {
        (pauli * self.rows + ancilla) * self.n + qudit
    }

    pub fn pauli_index(&self, x: u32, z: u32) -> Option<usize> {
        self.paulis.iter().position(|&p| p == (x, z))
    }

    /// Stabilizers found by the last successful episode.
    pub fn result(&self) -> Option<&[PauliWord]> {
        self.result.as_deref()
    }

    fn observe(&self) -> Vec<f64> {
        let cats = self.paulis.len();
        let mut obs = vec![0.0; self.rows * self.n * cats + self.horizon()];
        for (cell, &a) in self.grid.iter().enumerate() {
            one_hot_into(&mut obs[cell * cats..], a);
        }
        if self.t < self.horizon() {
            one_hot_into(&mut obs[self.rows * self.n * cats..], self.t);
        }
        obs
    }

    fn evaluate(&self) -> Result<Option<Vec<PauliWord>>> {
        let mut words = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let w = word_from_row(self.d, &self.grid[r * self.n..(r + 1) * self.n], &self.paulis)?;
            match fix_phase(&w, &self.basis) {
                Some(w) if !w.is_identity() => words.push(w),
                _ => return Ok(None),
            }
        }
        let Ok(set) = StabilizerSet::new(words.clone()) else {
            return Ok(None);
        };
        if !set.is_independent()? {
            return Ok(None);
        }
        let mut seen = Vec::new();
        for e in &self.correctable {
            let s = crate::pauli::syndrome_of(e, &set)?;
            if s.iter().all(|&v| v == 0) || seen.contains(&s) {
                return Ok(None);
            }
            seen.push(s);
        }
        Ok(Some(words))
    }
}

impl Env for ElementarySyndromeEnv {
    fn obs_dim(&self) -> usize {
        self.rows * self.n * self.paulis.len() + self.horizon()
    }

    fn n_actions(&self) -> usize {
        self.paulis.len() * self.rows * self.n
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let identity = self.paulis.len() - 1;
        self.grid.iter_mut().for_each(|g| *g = identity);
        self.t = 0;
        self.result = None;
        Ok(self.observe())
    }

    fn step(&mut self, action: usize) -> Result<Step> {
        if self.t >= self.horizon() {
            return Err(Error::Invalid("syndrome episode already finished".into()));
        }
        if action >= self.n_actions() {
            return Err(Error::Invalid(format!("syndrome action {action} out of range")));
        }
        let (p, r, q) = self.decode(action);
        self.grid[r * self.n + q] = p;
        self.t += 1;
        let done = self.t == self.horizon();
        let mut reward = 0.0;
        if done {
            self.result = self.evaluate()?;
            reward = if self.result.is_some() { self.r_success } else { self.r_failure };
        }
        Ok(Step { obs: self.observe(), reward, done })
    }

    fn solved(&self) -> bool {
        self.result.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::logical_basis;
    use crate::registry::{bit_flip, qutrit_erasure};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zz(a: usize, b: usize) -> PauliWord {
        PauliWord::z_on(2, 3, a).mul(&PauliWord::z_on(2, 3, b)).unwrap()
    }

    fn bit_flip_env(learned: Vec<PauliWord>) -> SyndromeEnv {
        let code = bit_flip().unwrap();
        SyndromeEnv::new(logical_basis(&code).unwrap(), 2, code.correctable.clone(), learned).unwrap()
    }

    fn play(env: &mut SyndromeEnv, word: &PauliWord) -> f64 {
        let mut r = ChaCha8Rng::seed_from_u64(0);
        env.reset(&mut r).unwrap();
        let mut total = 0.0;
        for q in 0..word.n() {
            total += env.step(env.action_of(word.x[q], word.z[q]).unwrap()).unwrap().reward;
        }
        total
    }

    #[test]
    fn action_sets() {
        assert_eq!(syndrome_actions(2), vec![(0, 1), (1, 0), (1, 1), (0, 0)]);
        assert_eq!(syndrome_actions(3).len(), 9);
    }

    #[test]
    fn bit_flip_candidates() {
        let mut env = bit_flip_env(vec![]);
        assert_eq!(play(&mut env, &PauliWord::identity(2, 3)), 0.0);
        assert!(!env.last_check().unwrap().new);
        assert_eq!(play(&mut env, &zz(1, 2)), 1.0);
        assert_eq!(play(&mut env, &PauliWord::x_on(2, 3, 0)), 0.0);
        let mut next = bit_flip_env(vec![zz(1, 2)]);
        assert_eq!(play(&mut next, &zz(1, 2)), 0.0);
        assert!(!next.last_check().unwrap().new);
        assert_eq!(play(&mut next, &zz(0, 1)), 1.0);
        // Z0 Z2 = (Z0 Z1)(Z1 Z2)
        let mut last = bit_flip_env(vec![zz(1, 2)]);
        last.commit(zz(0, 1)).unwrap();
        assert!(last.reset(&mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn checks_rephase_to_fixed_eigenvalue() {
        let code = bit_flip().unwrap();
        let basis = logical_basis(&code).unwrap();
        // -Z0Z1 written with a phase still fixes the codewords after rephasing
        let mut w = zz(0, 1);
        w.phase = 2;
        let chk = check_candidate(&w, &basis, &code.correctable, &[]).unwrap();
        assert!(chk.passed());
        assert_eq!(chk.word.phase, 0);
    }

    #[test]
    fn qutrit_erasure_generators_pass() {
        let code = qutrit_erasure().unwrap();
        let basis = logical_basis(&code).unwrap();
        let mut learned = Vec::new();
        for s in &code.stabilizers.generators {
            let chk = check_candidate(s, &basis, &code.correctable, &learned).unwrap();
            assert!(chk.passed(), "{s}");
            learned.push(chk.word);
        }
    }

    #[test]
    fn elementary_grid() {
        let code = bit_flip().unwrap();
        let mut env = ElementarySyndromeEnv::new(logical_basis(&code).unwrap(), 2, code.correctable.clone()).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(0);
        env.reset(&mut r).unwrap();
        let z = env.pauli_index(0, 1).unwrap();
        let i = env.pauli_index(0, 0).unwrap();
        let plan = [(z, 0, 0), (z, 0, 1), (i, 0, 2), (i, 1, 0), (z, 1, 1), (z, 1, 2)];
        let mut last = None;
        for (p, a, q) in plan {
            let act = env.encode(p, a, q);
            assert_eq!(env.decode(act), (p, a, q));
            last = Some(env.step(act).unwrap());
        }
        let st = last.take().unwrap();
        assert!(st.done && env.solved());
        assert_eq!(st.reward, 10.0);
        // same row twice is not independent
        env.reset(&mut r).unwrap();
        for (p, a, q) in [(z, 0, 0), (z, 0, 1), (i, 0, 2), (z, 1, 0), (z, 1, 1), (i, 1, 2)] {
            last = Some(env.step(env.encode(p, a, q)).unwrap());
        }
        assert_eq!(last.unwrap().reward, -1.0);
    }
}
