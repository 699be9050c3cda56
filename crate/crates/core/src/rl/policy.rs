//! Two-layer softmax policy trained with REINFORCE.

use std::ops::Range;

use rand::{Rng, RngCore};

use super::Env;
use crate::codes::Syndrome;
use crate::error::{Error, Result};
use crate::state::gaussian;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyConfig {
    pub hidden: usize,
    /// Adam step size.
    pub lr: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self { hidden: 64, lr: 3e-3 }
    }
}

/// `logits = W2 tanh(W1 x + b1) + b2`, parameters stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub obs_dim: usize,
    pub hidden: usize,
    pub n_actions: usize,
    pub params: Vec<f64>,
    pub lr: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    steps: u64,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl Policy {
    pub fn new<R: Rng + ?Sized>(obs_dim: usize, n_actions: usize, cfg: PolicyConfig, rng: &mut R) -> Result<Self> {
        if obs_dim == 0 || n_actions == 0 || cfg.hidden == 0 {
            return Err(Error::Invalid("policy dimensions must be positive".into()));
        }
        if !(cfg.lr.is_finite() && cfg.lr > 0.0) {
            return Err(Error::Invalid(format!("learning rate must be positive, got {}", cfg.lr)));
        }
        let h = cfg.hidden;
        let len = h * obs_dim + h + n_actions * h + n_actions;
        let mut params = vec![0.0; len];
        let s1 = 1.0 / (obs_dim as f64).sqrt();
        for w in &mut params[..h * obs_dim] {
            *w = gaussian(rng) * s1;
        }
        // small output weights keep the initial policy close to uniform
        let off = h * obs_dim + h;
        for w in &mut params[off..off + n_actions * h] {
            *w = gaussian(rng) * 0.01 / (h as f64).sqrt();
        }
        Ok(Self { obs_dim, hidden: h, n_actions, params, lr: cfg.lr, m: vec![0.0; len], v: vec![0.0; len], steps: 0 })
    }

    fn layout(&self) -> (usize, usize, usize) {
        let b1 = self.hidden * self.obs_dim;
        let w2 = b1 + self.hidden;
        let b2 = w2 + self.n_actions * self.hidden;
        (b1, w2, b2)
    }

    fn hidden_layer(&self, obs: &[f64]) -> Vec<f64> {
        let (b1, _, _) = self.layout();
        (0..self.hidden)
            .map(|i| {
                let row = &self.params[i * self.obs_dim..(i + 1) * self.obs_dim];
                let s: f64 = row.iter().zip(obs).map(|(w, x)| w * x).sum();
                (s + self.params[b1 + i]).tanh()
            })
            .collect()
    }

    fn logits_from(&self, hid: &[f64]) -> Vec<f64> {
        let (_, w2, b2) = self.layout();
        (0..self.n_actions)
            .map(|a| {
                let row = &self.params[w2 + a * self.hidden..w2 + (a + 1) * self.hidden];
                row.iter().zip(hid).map(|(w, h)| w * h).sum::<f64>() + self.params[b2 + a]
            })
            .collect()
    }

    pub fn logits(&self, obs: &[f64]) -> Vec<f64> {
        self.logits_from(&self.hidden_layer(obs))
    }

    pub fn probs(&self, obs: &[f64]) -> Vec<f64> {
        softmax(&self.logits(obs))
    }

    pub fn sample<R: Rng + ?Sized>(&self, obs: &[f64], rng: &mut R) -> usize {
        sample_index(&self.probs(obs), rng)
    }

    /// Most probable action; ties go to the lowest index.
    pub fn greedy(&self, obs: &[f64]) -> usize {
        argmax(&self.logits(obs))
    }

    /// Adds `weight * grad log pi(action | obs)` to `grad`.
    fn accumulate(&self, obs: &[f64], action: usize, weight: f64, grad: &mut [f64]) {
        let (b1, w2, b2) = self.layout();
        let hid = self.hidden_layer(obs);
        let p = softmax(&self.logits_from(&hid));
        let mut dh = vec![0.0; self.hidden];
        for a in 0..self.n_actions {
            let dl = weight * ((a == action) as u8 as f64 - p[a]);
            if dl == 0.0 {
                continue;
            }
            grad[b2 + a] += dl;
            for i in 0..self.hidden {
                grad[w2 + a * self.hidden + i] += dl * hid[i];
                dh[i] += dl * self.params[w2 + a * self.hidden + i];
            }
        }
        for i in 0..self.hidden {
            let dz = dh[i] * (1.0 - hid[i] * hid[i]);
            if dz == 0.0 {
                continue;
            }
            grad[b1 + i] += dz;
            let row = &mut grad[i * self.obs_dim..(i + 1) * self.obs_dim];
            for (g, x) in row.iter_mut().zip(obs) {
                *g += dz * x;
            }
        }
    }

    /// One Adam ascent step along `grad`.
    fn ascend(&mut self, grad: &[f64]) -> Result<()> {
        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!("policy gradient component {i} is {}", grad[i])));
        }
        self.steps += 1;
        let t = self.steps as i32;
        let c1 = 1.0 - BETA1.powi(t);
        let c2 = 1.0 - BETA2.powi(t);
        for (((w, m), v), g) in self.params.iter_mut().zip(&mut self.m).zip(&mut self.v).zip(grad) {
            *m = BETA1 * *m + (1.0 - BETA1) * g;
            *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            *w += self.lr * (*m / c1) / ((*v / c2).sqrt() + ADAM_EPS);
        }
        Ok(())
    }
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|x| x / z).collect()
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

fn sample_index<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub max_episodes: usize,
    /// Environment-step budget across all episodes.
    pub max_steps: usize,
    /// Decay of the per-timestep moving-average baseline.
    pub baseline_decay: f64,
    /// Check the greedy policy every this many episodes; 0 disables early stop.
    pub eval_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { max_episodes: 20_000, max_steps: 200_000, baseline_decay: 0.9, eval_every: 25 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub episode: usize,
    pub reward: f64,
    pub steps: usize,
    pub depth: usize,
    pub solved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainLog {
    pub episodes: Vec<EpisodeLog>,
    pub env_steps: usize,
    /// The greedy policy solved the task when training stopped.
    pub converged: bool,
}

impl TrainLog {
    /// Order-sensitive FNV-1a hash of every logged value.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        for e in &self.episodes {
            eat(e.episode as u64);
            eat(e.reward.to_bits());
            eat(e.steps as u64);
            eat(e.depth as u64);
            eat(e.solved as u64);
        }
        h
    }
}

/// Runs the greedy policy for one episode; returns (return, solved, steps).
pub fn greedy_rollout<E: Env>(env: &mut E, policy: &Policy, rng: &mut dyn RngCore) -> Result<(f64, bool, usize)> {
    let mut obs = env.reset(rng)?;
    let mut total = 0.0;
    let mut steps = 0;
    loop {
        let st = env.step(policy.greedy(&obs))?;
        total += st.reward;
        steps += 1;
        obs = st.obs;
        if st.done {
            return Ok((total, env.solved(), steps));
        }
    }
}

/// Episodic REINFORCE. Each step is weighted by its return-to-go minus a
/// per-timestep moving-average baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct Reinforce {
    pub baseline_decay: f64,
    baseline: Vec<Option<f64>>,
    episodes: usize,
}

impl Reinforce {
    pub fn new(baseline_decay: f64) -> Self {
        Self { baseline_decay, baseline: Vec::new(), episodes: 0 }
    }

    /// Samples one episode and applies one ascent step.
    pub fn episode<E: Env>(&mut self, env: &mut E, policy: &mut Policy, rng: &mut dyn RngCore) -> Result<EpisodeLog> {
        if env.obs_dim() != policy.obs_dim || env.n_actions() != policy.n_actions {
            return Err(Error::Dimension { expected: policy.obs_dim, got: env.obs_dim() });
        }
        let mut obs = env.reset(rng)?;
        let mut traj: Vec<(Vec<f64>, usize, f64)> = Vec::new();
        loop {
            let a = policy.sample(&obs, rng);
            let st = env.step(a)?;
            traj.push((obs, a, st.reward));
            obs = st.obs;
            if st.done {
                break;
            }
        }
        let mut ret = 0.0;
        let mut returns = vec![0.0; traj.len()];
        for t in (0..traj.len()).rev() {
            ret += traj[t].2;
            returns[t] = ret;
        }
        if self.baseline.len() < traj.len() {
            self.baseline.resize(traj.len(), None);
        }
        let mut grad = vec![0.0; policy.params.len()];
        for (t, (o, a, _)) in traj.iter().enumerate() {
            let b = self.baseline[t].unwrap_or(returns[t]);
            let adv = returns[t] - b;
            if adv != 0.0 {
                policy.accumulate(o, *a, adv, &mut grad);
            }
            self.baseline[t] = Some(self.baseline_decay * b + (1.0 - self.baseline_decay) * returns[t]);
        }
        policy.ascend(&grad)?;
        let log = EpisodeLog {
            episode: self.episodes,
            reward: returns.first().copied().unwrap_or(0.0),
            steps: traj.len(),
            depth: env.depth(),
            solved: env.solved(),
        };
        self.episodes += 1;
        Ok(log)
    }
}

/// Trains until the budget runs out or a greedy rollout solves the task
/// (checked every `eval_every` episodes on a cloned environment, so the
/// training stream is unaffected apart from the shared RNG).
pub fn train_policy<E: Env + Clone>(
    env: &mut E,
    policy: &mut Policy,
    cfg: &TrainConfig,
    rng: &mut dyn RngCore,
) -> Result<TrainLog> {
    if cfg.max_episodes == 0 || cfg.max_steps == 0 {
        return Err(Error::Invalid("training budget must be at least one episode".into()));
    }
    let mut learner = Reinforce::new(cfg.baseline_decay);
    let mut log = TrainLog { episodes: Vec::new(), env_steps: 0, converged: false };
    for episode in 0..cfg.max_episodes {
        if log.env_steps >= cfg.max_steps {
            break;
        }
        let ep = learner.episode(env, policy, rng)?;
        log.env_steps += ep.steps;
        log.episodes.push(ep);
        if cfg.eval_every > 0 && (episode + 1) % cfg.eval_every == 0 {
            let mut probe = env.clone();
            if greedy_rollout(&mut probe, policy, rng)?.1 {
                log.converged = true;
                break;
            }
        }
    }
    Ok(log)
}

/// When a component policy of a [`MixMatch`] is active.
#[derive(Debug, Clone, PartialEq)]
pub enum Activation {
    /// Active for time steps in the range.
    TimeSlice(Range<usize>),
    /// Active when this syndrome was measured.
    Syndrome(Syndrome),
}

/// Context used to select the active component.
#[derive(Debug, Clone, Copy)]
pub enum Context<'a> {
    Time(usize),
    Syndrome(&'a Syndrome),
}

impl Activation {
    fn weight(&self, ctx: Context<'_>) -> bool {
        match (self, ctx) {
            (Activation::TimeSlice(r), Context::Time(t)) => r.contains(&t),
            (Activation::Syndrome(s), Context::Syndrome(m)) => s == m,
            _ => false,
        }
    }

    fn overlaps(&self, other: &Activation) -> bool {
        match (self, other) {
            (Activation::TimeSlice(a), Activation::TimeSlice(b)) => a.start < b.end && b.start < a.end,
            (Activation::Syndrome(a), Activation::Syndrome(b)) => a == b,
            _ => false,
        }
    }
}

/// `pi(a | s, c) = sum_i w_i(c) pi_i(a | s)` with one-hot weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MixMatch {
    pub policies: Vec<Policy>,
    pub activations: Vec<Activation>,
}

pub fn mixmatch_compose(policies: Vec<Policy>, activations: Vec<Activation>) -> Result<MixMatch> {
    if policies.len() != activations.len() || policies.is_empty() {
        return Err(Error::Invalid(format!(
            "{} policies for {} activations",
            policies.len(),
            activations.len()
        )));
    }
    let shape = (policies[0].obs_dim, policies[0].n_actions);
    if policies.iter().any(|p| (p.obs_dim, p.n_actions) != shape) {
        return Err(Error::Invalid("component policies differ in shape".into()));
    }
    for (i, a) in activations.iter().enumerate() {
        for (j, b) in activations.iter().enumerate().skip(i + 1) {
            if a.overlaps(b) {
                return Err(Error::Overlap(format!("activations {i} and {j} overlap")));
            }
        }
    }
    Ok(MixMatch { policies, activations })
}

impl MixMatch {
    pub fn active(&self, ctx: Context<'_>) -> Option<usize> {
        self.activations.iter().position(|a| a.weight(ctx))
    }

    pub fn probs(&self, obs: &[f64], ctx: Context<'_>) -> Result<Vec<f64>> {
        let i = self.active(ctx).ok_or_else(|| Error::Invalid(format!("no component active for {ctx:?}")))?;
        Ok(self.policies[i].probs(obs))
    }

    pub fn greedy(&self, obs: &[f64], ctx: Context<'_>) -> Result<usize> {
        let i = self.active(ctx).ok_or_else(|| Error::Invalid(format!("no component active for {ctx:?}")))?;
        Ok(self.policies[i].greedy(obs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rl::Step;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// One step, reward 1 for action `good`, optional flat reward otherwise.
    #[derive(Clone)]
    struct OneShot {
        good: usize,
        actions: usize,
        reward_good: f64,
        solved: bool,
    }

    impl Env for OneShot {
        fn obs_dim(&self) -> usize {
            1
        }
        fn n_actions(&self) -> usize {
            self.actions
        }
        fn reset(&mut self, _rng: &mut dyn rand::RngCore) -> Result<Vec<f64>> {
            Ok(vec![1.0])
        }
        fn step(&mut self, action: usize) -> Result<Step> {
            self.solved = action == self.good;
            Ok(Step { obs: vec![1.0], reward: if self.solved { self.reward_good } else { 0.0 }, done: true })
        }
        fn solved(&self) -> bool {
            self.solved
        }
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn concentrates_on_rewarding_action() {
        let mut env = OneShot { good: 3, actions: 6, reward_good: 1.0, solved: false };
        let mut r = rng(5);
        let mut pol = Policy::new(1, 6, PolicyConfig::default(), &mut r).unwrap();
        let cfg = TrainConfig { max_episodes: 2000, eval_every: 0, ..Default::default() };
        train_policy(&mut env, &mut pol, &cfg, &mut r).unwrap();
        assert!(pol.probs(&[1.0])[3] >= 0.99, "{:?}", pol.probs(&[1.0]));
    }

    #[test]
    fn zero_reward_leaves_parameters() {
        let mut env = OneShot { good: 0, actions: 4, reward_good: 0.0, solved: false };
        let mut r = rng(9);
        let mut pol = Policy::new(1, 4, PolicyConfig::default(), &mut r).unwrap();
        let before = pol.params.clone();
        let cfg = TrainConfig { max_episodes: 1000, eval_every: 0, ..Default::default() };
        train_policy(&mut env, &mut pol, &cfg, &mut r).unwrap();
        let drift = pol.params.iter().zip(&before).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-2);
    }

    #[test]
    fn training_is_deterministic() {
        let run = |seed| {
            let mut env = OneShot { good: 1, actions: 3, reward_good: 1.0, solved: false };
            let mut r = rng(seed);
            let mut pol = Policy::new(1, 3, PolicyConfig::default(), &mut r).unwrap();
            let cfg = TrainConfig { max_episodes: 300, eval_every: 0, ..Default::default() };
            (train_policy(&mut env, &mut pol, &cfg, &mut r).unwrap().checksum(), pol.params)
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3).0, run(4).0);
    }

    #[test]
    fn early_stop_on_greedy_success() {
        let mut env = OneShot { good: 2, actions: 3, reward_good: 1.0, solved: false };
        let mut r = rng(1);
        let mut pol = Policy::new(1, 3, PolicyConfig::default(), &mut r).unwrap();
        let log = train_policy(&mut env, &mut pol, &TrainConfig::default(), &mut r).unwrap();
        assert!(log.converged);
        assert!(log.episodes.len() < 20_000);
        assert_eq!(pol.greedy(&[1.0]), 2);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut r = rng(2);
        let pol = Policy::new(3, 4, PolicyConfig { hidden: 5, lr: 1e-3 }, &mut r).unwrap();
        let obs = [0.3, -1.0, 0.5];
        let mut grad = vec![0.0; pol.params.len()];
        pol.accumulate(&obs, 2, 1.0, &mut grad);
        for i in [0, 7, 16, 21, 30, pol.params.len() - 1] {
            let mut p = pol.clone();
            p.params[i] += 1e-6;
            let up = p.probs(&obs)[2].ln();
            p.params[i] -= 2e-6;
            let down = p.probs(&obs)[2].ln();
            assert!(((up - down) / 2e-6 - grad[i]).abs() < 1e-6, "param {i}");
        }
    }

    #[test]
    fn mixmatch_selection() {
        let mut r = rng(0);
        let a = Policy::new(2, 3, PolicyConfig::default(), &mut r).unwrap();
        let b = Policy::new(2, 3, PolicyConfig::default(), &mut r).unwrap();
        let single = mixmatch_compose(vec![a.clone()], vec![Activation::TimeSlice(0..usize::MAX)]).unwrap();
        assert_eq!(single.probs(&[0.1, 0.2], Context::Time(7)).unwrap(), a.probs(&[0.1, 0.2]));
        let mm = mixmatch_compose(vec![a.clone(), b.clone()], vec![Activation::TimeSlice(0..3), Activation::TimeSlice(3..6)]).unwrap();
        assert_eq!(mm.active(Context::Time(2)), Some(0));
        assert_eq!(mm.active(Context::Time(3)), Some(1));
        assert!(mm.probs(&[0.0, 0.0], Context::Time(6)).is_err());
        let s01 = Syndrome(vec![0, 1]);
        let rec = mixmatch_compose(
            vec![a.clone(), b.clone()],
            vec![Activation::Syndrome(Syndrome(vec![1, 0])), Activation::Syndrome(s01.clone())],
        )
        .unwrap();
        assert_eq!(rec.active(Context::Syndrome(&s01)), Some(1));
        assert!(matches!(
            mixmatch_compose(vec![a.clone(), b.clone()], vec![Activation::TimeSlice(0..3), Activation::TimeSlice(2..5)]),
            Err(Error::Overlap(_))
        ));
        assert!(matches!(
            mixmatch_compose(vec![a, b], vec![Activation::Syndrome(s01.clone()), Activation::Syndrome(s01)]),
            Err(Error::Overlap(_))
        ));
    }

    proptest! {
        #[test]
        fn probabilities_normalized(seed in 0u64..1000, x in proptest::collection::vec(-5.0f64..5.0, 4)) {
            let mut r = rng(seed);
            let p = Policy::new(4, 7, PolicyConfig { hidden: 8, lr: 1e-2 }, &mut r).unwrap();
            let probs = p.probs(&x);
            prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(p.logits(&x).iter().all(|l| l.is_finite()));
        }
    }
}
