mod common;

use common::{box_prob, chsh_value, frobenius};
use losekit::channel::{factorize_trivial_output, Direction};
use losekit::games::{chsh_game, score};
use losekit::linalg::{dephase_factor, eigh, partial_trace, reconstruct, tensor, CMatrix};
use losekit::lose::{apply_lose, measurement_process, q_output_to_classical, teleport_left_inverse, LocalComb, LoseOp};
use losekit::process::Process;
use losekit::random::{random_density, random_hermitian, random_isometry, random_local_channel, random_nonsignaling, seeded, SeededRng};
use losekit::types::{partition_encodes, Encodes, PartitionType};
use losekit::verify::random_type;
use losekit::zoo::{self, box_from_distribution, BoxDistribution};
use losekit::{Channel, GlobalType, LocalChannel, Party, SystemType, WireRole};
use proptest::prelude::*;
use rand::Rng;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

/// Kraus operators of a random channel `din → dout` (Stinespring blocks of a
/// random isometry).
fn random_kraus(din: usize, dout: usize, rng: &mut SeededRng) -> Vec<CMatrix> {
    let env = din.div_ceil(dout) + 1;
    let v = random_isometry(din, dout * env, rng);
    (0..env)
        .map(|e| CMatrix::from_fn(dout, din, |o, i| v[(o * env + e, i)]))
        .collect()
}

/// Random POVM with `k` outcomes on a `d`-dimensional system.
fn random_povm(d: usize, k: usize, rng: &mut SeededRng) -> Vec<CMatrix> {
    let v = random_isometry(d, d * k, rng);
    (0..k)
        .map(|o| {
            let block = CMatrix::from_fn(d, d, |i, j| v[(o * d + i, j)]);
            block.adjoint().matmul(&block)
        })
        .collect()
}

struct CombSpec {
    input: SystemType,
    output: SystemType,
    res_in: usize,
    res_out: usize,
    ent: usize,
    mem: usize,
    classical_mem: bool,
}

fn random_comb(s: &CombSpec, rng: &mut SeededRng) -> LocalComb {
    let din = s.input.dim() * s.ent;
    let dout = s.res_in * s.mem;
    let mut pre = random_kraus(din, dout, rng);
    if s.input.is_classical() {
        let d = s.input.dim();
        pre = pre
            .iter()
            .flat_map(|k| (0..d).map(move |x| k.matmul(&tensor(&losekit::linalg::basis_projector(d, x), &CMatrix::identity(s.ent)))))
            .collect();
    }
    if s.classical_mem {
        pre = pre
            .iter()
            .flat_map(|k| (0..s.mem).map(move |m| tensor(&CMatrix::identity(s.res_in), &losekit::linalg::basis_projector(s.mem, m)).matmul(k)))
            .collect();
    }
    let pre = Process::from_kraus(&[("res_in", s.res_in), ("mem", s.mem)], &[("in", s.input.dim()), ("ent", s.ent)], &pre).unwrap();
    let post = if s.output.is_classical() {
        let povm = random_povm(s.res_out * s.mem, s.output.dim(), rng);
        measurement_process("out", &[("res_out", s.res_out), ("mem", s.mem)], &povm).unwrap()
    } else {
        let k = random_kraus(s.res_out * s.mem, s.output.dim(), rng);
        Process::from_kraus(&[("out", s.output.dim())], &[("res_out", s.res_out), ("mem", s.mem)], &k).unwrap()
    };
    LocalComb::new(s.input, s.output, pre, post).unwrap()
}

fn qubit_comb(ent: usize, mem: usize) -> CombSpec {
    let q2 = SystemType::quantum(2);
    CombSpec {
        input: q2,
        output: q2,
        res_in: 2,
        res_out: 2,
        ent,
        mem,
        classical_mem: false,
    }
}

fn random_lose_op(rng: &mut SeededRng) -> LoseOp {
    let alice = random_comb(&qubit_comb(2, 2), rng);
    let bob = random_comb(&qubit_comb(2, 2), rng);
    LoseOp::new(alice, bob, random_density(4, rng)).unwrap()
}

fn qq2() -> GlobalType {
    let q2 = SystemType::quantum(2);
    GlobalType::new(q2, q2, q2, q2)
}

/// Gaussian-integer entries, so every product is exact.
fn random_integer_matrix(d: usize, rng: &mut SeededRng) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| losekit::C64::new(rng.gen_range(-9..=9) as f64, rng.gen_range(-9..=9) as f64))
}

proptest! {
    #![proptest_config(cases(32))]

    #[test]
    fn tensor_is_associative(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4, d3 in 1usize..4) {
        let mut rng = seeded(seed);
        let (a, b, c) = (random_integer_matrix(d1, &mut rng), random_integer_matrix(d2, &mut rng), random_integer_matrix(d3, &mut rng));
        let left = tensor(&tensor(&a, &b), &c);
        let right = tensor(&a, &tensor(&b, &c));
        prop_assert_eq!(left.as_slice(), right.as_slice());
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), d1 in 1usize..5, d2 in 1usize..5) {
        let mut rng = seeded(seed);
        let rho = random_density(d1, &mut rng);
        let sigma = random_hermitian(d2, &mut rng);
        let joint = tensor(&rho, &sigma);
        let keep_second = partial_trace(&joint, &[d1, d2], &[1]).unwrap();
        let keep_first = partial_trace(&joint, &[d1, d2], &[0]).unwrap();
        prop_assert!(keep_second.max_abs_diff(&sigma.scale(rho.trace())) < 1e-12);
        prop_assert!(keep_first.max_abs_diff(&rho.scale(sigma.trace())) < 1e-12);
    }

    #[test]
    fn score_is_linear(seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let mut rng = seeded(seed);
        let g = *chsh_game().gtype();
        let j1 = random_nonsignaling(&g, &mut rng).unwrap();
        let j2 = random_nonsignaling(&g, &mut rng).unwrap();
        let game = chsh_game();
        let mixed = j1.mix(&j2, lambda).unwrap();
        let want = lambda * score(&game, &j1).unwrap() + (1.0 - lambda) * score(&game, &j2).unwrap();
        prop_assert!((score(&game, &mixed).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn teleport_round_trip(seed in any::<u64>(), bob in any::<bool>()) {
        let mut rng = seeded(seed);
        let party = if bob { Party::Bob } else { Party::Alice };
        let g = random_type(&mut rng, party);
        let ch = random_nonsignaling(&g, &mut rng).unwrap();
        let back = teleport_left_inverse(&q_output_to_classical(&ch, party).unwrap(), party).unwrap();
        prop_assert_eq!(back.gtype(), ch.gtype());
        prop_assert!(frobenius(back.choi(), ch.choi()) < 1e-10);
    }

    #[test]
    fn factorization_inverts_product(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let g = random_type(&mut rng, Party::Bob);
        let bob = random_local_channel(g.y, g.b, &mut rng);
        let ch = Channel::product(&LocalChannel::trace(g.x), &bob).unwrap();
        let (_, got) = factorize_trivial_output(&ch).unwrap();
        prop_assert!(got.distance(&bob) < 1e-9);
    }
}

proptest! {
    #![proptest_config(cases(12))]

    #[test]
    fn lose_preserves_nonsignaling(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let ch = random_nonsignaling(&qq2(), &mut rng).unwrap();
        let op = random_lose_op(&mut rng);
        let out = apply_lose(&op, &ch).unwrap();
        prop_assert!(out.is_nonsignaling(Direction::AliceToBob, 1e-9));
        prop_assert!(out.is_nonsignaling(Direction::BobToAlice, 1e-9));
        prop_assert!(out.is_cptp(1e-9));
    }

    #[test]
    fn composition_matches_sequential_application(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let ch = random_nonsignaling(&qq2(), &mut rng).unwrap();
        let op1 = random_lose_op(&mut rng);
        let op2 = random_lose_op(&mut rng);
        let sequential = apply_lose(&op2, &apply_lose(&op1, &ch).unwrap()).unwrap();
        let composed = apply_lose(&op1.then(&op2).unwrap(), &ch).unwrap();
        prop_assert!(frobenius(sequential.choi(), composed.choi()) < 1e-9);
    }

    #[test]
    fn losr_keeps_deterministic_boxes_local(seed in any::<u64>(), f in prop::array::uniform2(0usize..2), g in prop::array::uniform2(0usize..2)) {
        let mut rng = seeded(seed);
        let src = box_from_distribution(&BoxDistribution::deterministic(2, 2, &f, &g).unwrap());
        let c2 = SystemType::classical(2);
        let spec = CombSpec { input: c2, output: c2, res_in: 2, res_out: 2, ent: 2, mem: 2, classical_mem: true };
        let alice = random_comb(&spec, &mut rng);
        let bob = random_comb(&spec, &mut rng);
        // shared randomness: Σ_λ p_λ |λλ⟩⟨λλ|
        let p: f64 = rng.gen();
        let shared = CMatrix::diagonal(&[p.into(), 0.0.into(), 0.0.into(), (1.0 - p).into()]);
        let op = LoseOp::new(alice, bob, shared).unwrap();
        let out = apply_lose(&op, &src).unwrap();
        let dims = out.gtype().choi_dims();
        let s = chsh_value(|a, b, x, y| box_prob(out.choi(), dims, a, b, x, y));
        prop_assert!(s.abs() <= 2.0 + 1e-9, "CHSH {}", s);
    }
}

#[test]
fn eigh_reconstructs_random_hermitian_matrices() {
    let mut rng = seeded(7);
    for i in 0..100 {
        let d = if i < 4 { 256 } else { rng.gen_range(1..=256) };
        let m = random_hermitian(d, &mut rng);
        let (values, vectors) = eigh(&m).unwrap();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
        let err = frobenius(&reconstruct(&values, &vectors), &m);
        assert!(err < 1e-9 * m.frobenius_norm().max(1.0), "dim {} error {}", d, err);
    }
}

#[test]
fn classical_wires_are_dephasing_invariant() {
    for name in ["pr", "phhh", "shsa"] {
        let ch = zoo::named(name, &Default::default()).unwrap();
        let dims = ch.gtype().choi_dims();
        for role in WireRole::ALL {
            if ch.gtype().wire(role).is_classical() {
                let d = dephase_factor(ch.choi(), &dims, role.factor()).unwrap();
                assert_eq!(d.as_slice(), ch.choi().as_slice(), "{} {:?}", name, role);
            }
        }
    }
}

#[test]
fn encoding_table_is_reflexive_and_transitive() {
    let all = PartitionType::all();
    for &t in &all {
        assert_eq!(partition_encodes(t, t), Encodes::Yes, "{}", t);
    }
    for &a in &all {
        for &b in &all {
            for &c in &all {
                if partition_encodes(a, b) == Encodes::Yes && partition_encodes(b, c) == Encodes::Yes {
                    assert_eq!(partition_encodes(a, c), Encodes::Yes, "{} {} {}", a, b, c);
                }
            }
        }
    }
}
