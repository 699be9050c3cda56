use std::hint::black_box;

use adaptqec::brave::{brave_run, retrain, AdaptiveConfig, FidelityMode, LogicalInput, VariationalCode};
use adaptqec::codes::{check_kl, run_cycle_with_error};
use adaptqec::noise::AlphaChannel;
use adaptqec::optim::NelderMead;
use adaptqec::registry::{bit_flip, five_qubit, nine_qutrit};
use adaptqec::regret::regret_simulate;
use adaptqec::rl::{error_set, EncoderEnv, EncoderReward, Env, Policy, PolicyConfig, Reinforce};
use adaptqec::{syndrome_of, PauliWord, QuditState};
use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pauli(c: &mut Criterion) {
    let a = PauliWord::from_exponents(3, &[1, 2, 0, 1, 2, 0, 1, 2, 0], &[0, 1, 2, 2, 1, 0, 0, 1, 2]).unwrap();
    let b = PauliWord::from_exponents(3, &[2, 2, 1, 0, 0, 1, 1, 1, 2], &[1, 0, 0, 2, 2, 1, 0, 2, 1]).unwrap();
    c.bench_function("pauli_mul_9_qutrits", |bch| bch.iter(|| black_box(&a).mul(black_box(&b)).unwrap()));
    let code = nine_qutrit().unwrap();
    c.bench_function("syndrome_9_qutrits", |bch| bch.iter(|| syndrome_of(black_box(&a), &code.stabilizers).unwrap()));
}

fn codes(c: &mut Criterion) {
    let five = five_qubit().unwrap();
    c.bench_function("kl_check_five_qubit", |bch| bch.iter(|| check_kl(&five, &five.correctable, five.kl_mode).unwrap()));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let psi = QuditState::random(2, 1, &mut rng).unwrap();
    let e = PauliWord::y_on(2, 5, 2);
    c.bench_function("correction_cycle_five_qubit", |bch| bch.iter(|| run_cycle_with_error(&five, &e, &psi, &mut rng).unwrap()));
}

fn adaptive(c: &mut Criterion) {
    let code = bit_flip().unwrap();
    let ch = AlphaChannel::qubit(0.1, 0.3).unwrap();
    let vc = VariationalCode::new(code.clone(), &LogicalInput::Plus.state(2, 1).unwrap()).unwrap();
    let kraus = ch.kraus_at_alpha(0.6);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    c.bench_function("exact_cycle_fidelity_qubit", |bch| bch.iter(|| vc.cycle_fidelity(&kraus, FidelityMode::Exact, &mut rng).unwrap()));
    c.bench_function("retrain_qubit", |bch| {
        bch.iter(|| retrain(&vc, &kraus, &NelderMead::default(), FidelityMode::Exact, None, &mut rng).unwrap())
    });
    let cfg = AdaptiveConfig { fs: 60, ..AdaptiveConfig::default() };
    c.bench_function("brave_run_qubit_fs60", |bch| bch.iter(|| brave_run(&code, &ch, &cfg, &mut rng).unwrap()));
    c.bench_function("regret_nu_pi_over_0.1", |bch| {
        bch.iter(|| regret_simulate(0.1, std::f64::consts::PI / 0.1, 0.1, 100.0, 1000).unwrap())
    });
}

fn learning(c: &mut Criterion) {
    let errors = error_set("x", 2, 3).unwrap();
    let mut env = EncoderEnv::new(2, 3, 1, errors, adaptqec::codes::KlMode::Strict, 6, EncoderReward::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut policy = Policy::new(env.obs_dim(), env.n_actions(), PolicyConfig::default(), &mut rng).unwrap();
    let mut learner = Reinforce::new(0.9);
    c.bench_function("encoder_episode_3_qubits", |bch| bch.iter(|| learner.episode(&mut env, &mut policy, &mut rng).unwrap()));
}

criterion_group!(benches, pauli, codes, adaptive, learning);
criterion_main!(benches);
