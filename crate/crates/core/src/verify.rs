//! Self-check of the reference results: each check recomputes one claim
//! about the zoo channels and their conversions and reports the measured
//! value next to its threshold.

use std::time::{Duration, Instant};

use crate::channel::{Channel, LocalChannel, CHANNEL_TOL};
use crate::error::{Error, Result};
use crate::games::{chsh_game, eigenstate_condition_check, lhv_bound, ppt_min_eigenvalue, ppt_min_eigenvalue_of, score, Verdict, QUANTUM_CHSH_BOUND};
use crate::io::{named_metadata, ChannelFile};
use crate::linalg::{hadamard, phi_plus, trace_distance, CMatrix, ONE, ZERO};
use crate::lose::{apply_lose, dephase_computational, phhh_to_dfp, phhh_to_shsa, pr_to_phhh, q_output_to_classical, teleport_left_inverse};
use crate::random::{random_local_channel, random_nonsignaling, seeded};
use crate::strategy::optimize_dfp_strategy;
use crate::types::{is_lose_trivial_kinds, GlobalType, Party, SystemKind, SystemType};
use crate::zoo::{self, BoxDistribution, DFP_ALPHA};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub measured: String,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Unitary twisting the BGNP basis in the eigenstate check.
    pub bgnp_ub: CMatrix,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            bgnp_ub: hadamard(),
            seed: 2024,
        }
    }
}

pub const TITLES: [&str; 14] = [
    "PR box CHSH score is 4",
    "CHSH LHV bound is 2, below 2*sqrt(2)",
    "dephased PHHH is the PR box",
    "PR box converts to PHHH",
    "PHHH converts to SHSA (12 steered states)",
    "PHHH converts to DFP(1/6)",
    "PPT: DFP is NPT, measure-and-prepare channels are PPT",
    "DFP strategy lands strictly between 2*sqrt(2) and 4",
    "BGNP eigenstate condition (twisted: violation, untwisted: consistent)",
    "teleportation round trip is the identity",
    "LOSE-trivial types are those with a trivial wire",
    "trivial-output factorization recovers Bob's channel",
    "zoo channels are CPTP and nonsignaling; Bennett basis orthonormal",
    "canonical files round-trip byte for byte",
];

/// Runs every check (in parallel) and returns results in a fixed order.
pub fn run_all(opts: &VerifyOptions) -> Vec<CheckResult> {
    let ids: Vec<usize> = (1..=TITLES.len()).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = ids.iter().map(|&id| s.spawn(move || run_one(id, opts))).collect();
        handles.into_iter().map(|h| h.join().expect("check panicked")).collect()
    })
}

pub fn run_one(id: usize, opts: &VerifyOptions) -> CheckResult {
    let start = Instant::now();
    let outcome = match id {
        1 => check_pr_score(),
        2 => check_lhv(),
        3 => check_dephase_phhh(),
        4 => check_pr_to_phhh(),
        5 => check_shsa(),
        6 => check_dfp(),
        7 => check_ppt(),
        8 => check_dfp_strategy(opts.seed),
        9 => check_eigenstate(&opts.bgnp_ub),
        10 => check_teleport(opts.seed),
        11 => check_trivial_types(),
        12 => check_factorization(opts.seed),
        13 => check_zoo_valid(),
        14 => check_round_trip(),
        _ => Err(Error::Unknown(format!("check {}", id))),
    };
    let (passed, measured) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {}", e)),
    };
    CheckResult {
        id,
        title: TITLES.get(id - 1).copied().unwrap_or("?"),
        passed,
        measured,
        elapsed: start.elapsed(),
    }
}

type Outcome = Result<(bool, String)>;

fn check_pr_score() -> Outcome {
    let s = score(&chsh_game(), &zoo::pr_box())?;
    Ok(((s - 4.0).abs() < 1e-12, format!("score {}", s)))
}

fn check_lhv() -> Outcome {
    let l = lhv_bound(&chsh_game())?;
    Ok((l == 2.0 && l < QUANTUM_CHSH_BOUND && QUANTUM_CHSH_BOUND < 4.0, format!("lhv {}", l)))
}

fn check_dephase_phhh() -> Outcome {
    let d = zoo::distribution_from_box(&dephase_computational(&zoo::phhh())?)?;
    let dev = d.max_abs_diff(&BoxDistribution::pr());
    Ok((dev < 1e-12, format!("max|dp| {:.3e}", dev)))
}

fn check_pr_to_phhh() -> Outcome {
    let dist = apply_lose(&pr_to_phhh(), &zoo::pr_box())?.distance(&zoo::phhh());
    Ok((dist < 1e-10, format!("distance {:.3e}", dist)))
}

/// Bob's subnormalized state for `(a, x, y)` read off an assemblage's Choi
/// operator (Alice's output and both inputs classical).
pub fn steered_state(ch: &Channel, a: usize, x: usize, y: usize) -> CMatrix {
    let [_, nb, nx, ny] = ch.gtype().choi_dims();
    let idx = |b: usize| ((a * nb + b) * nx + x) * ny + y;
    CMatrix::from_fn(nb, nb, |b1, b2| ch.choi()[(idx(b1), idx(b2))])
}

fn check_shsa() -> Outcome {
    let out = apply_lose(&phhh_to_shsa(), &zoo::phhh())?;
    let mut worst: f64 = 0.0;
    for a in 0..2 {
        for x in 0..3 {
            for y in 0..2 {
                let d = trace_distance(&steered_state(&out, a, x, y), &zoo::shsa_state(a, x, y))?;
                worst = worst.max(d);
            }
        }
    }
    Ok((worst < 1e-10, format!("max trace distance {:.3e}", worst)))
}

fn check_dfp() -> Outcome {
    let dist = apply_lose(&phhh_to_dfp(DFP_ALPHA)?, &zoo::phhh())?.distance(&zoo::dfp(DFP_ALPHA)?);
    Ok((dist < 1e-9, format!("distance {:.3e}", dist)))
}

fn check_ppt() -> Outcome {
    let dfp = ppt_min_eigenvalue(&zoo::dfp(DFP_ALPHA)?)?;
    let mut others = vec![
        ("pr", ppt_min_eigenvalue(&zoo::pr_box())?),
        ("phhh", ppt_min_eigenvalue(&zoo::phhh())?),
        ("shsa", ppt_min_eigenvalue(&zoo::shsa())?),
        ("bgnp", ppt_min_eigenvalue(&zoo::bgnp_default())?),
    ];
    others.push(("bennett", ppt_min_eigenvalue_of(&zoo::bennett_type(), &zoo::bennett_choi())?));
    let min_other = others.iter().map(|o| o.1).fold(f64::INFINITY, f64::min);
    Ok((
        dfp < -1e-6 && min_other >= -1e-10,
        format!("dfp {:.6}, min over others {:.3e}", dfp, min_other),
    ))
}

fn check_dfp_strategy(seed: u64) -> Outcome {
    let res = optimize_dfp_strategy(&zoo::dfp(DFP_ALPHA)?, &chsh_game(), seed, 4)?;
    let s = res.score;
    Ok((
        s > QUANTUM_CHSH_BOUND + 1e-3 && s < 4.0 - 1e-3,
        format!("score {:.9}", s),
    ))
}

/// The operator exchanging `|0⟩↔|2⟩` and `|1⟩↔|3⟩`.
pub fn block_swap() -> CMatrix {
    CMatrix::from_fn(4, 4, |i, j| if i == (j + 2) % 4 { ONE } else { ZERO })
}

fn check_eigenstate(ub: &CMatrix) -> Outcome {
    let psi = zoo::embed_blocks(&phi_plus(), zoo::Block::F, zoo::Block::F);
    let s = block_swap();
    let twisted = eigenstate_condition_check(&zoo::bgnp(ub)?, &psi, &s, &s, 1e-9)?;
    let plain = eigenstate_condition_check(&zoo::bgnp(&CMatrix::identity(2))?, &psi, &s, &s, 1e-9)?;
    Ok((
        twisted.verdict == Verdict::Violation && plain.verdict == Verdict::Consistent,
        format!(
            "twisted {} (fidelity {:.3}), untwisted {}",
            twisted.verdict, twisted.fidelities[3], plain.verdict
        ),
    ))
}

/// A random global type with dims ≤ 3 whose `party` output is quantum.
pub fn random_type<R: rand::Rng>(rng: &mut R, party: Party) -> GlobalType {
    let mut wire = |quantum_only: bool| {
        let kind = if quantum_only { 2 } else { rng.gen_range(0..3) };
        let d = rng.gen_range(2..=3);
        match kind {
            0 => SystemType::trivial(),
            1 => SystemType::classical(d),
            _ => SystemType::quantum(d),
        }
    };
    let (x, y) = (wire(false), wire(false));
    let a = wire(party == Party::Alice);
    let b = wire(party == Party::Bob);
    GlobalType::new(x, y, a, b)
}

fn round_trip(ch: &Channel, party: Party) -> Result<f64> {
    let back = teleport_left_inverse(&q_output_to_classical(ch, party)?, party)?;
    if back.gtype() != ch.gtype() {
        return Err(Error::TypeMismatch(format!("recovered type {} vs {}", back.gtype(), ch.gtype())));
    }
    Ok(back.distance(ch))
}

fn check_teleport(seed: u64) -> Outcome {
    let q2 = SystemType::quantum(2);
    let identity = Channel::product(&LocalChannel::identity(q2), &LocalChannel::identity(q2))?;
    let mut worst = round_trip(&zoo::phhh(), Party::Alice)?.max(round_trip(&identity, Party::Bob)?);
    let mut rng = seeded(seed);
    for i in 0..20 {
        let party = if i % 2 == 0 { Party::Alice } else { Party::Bob };
        let g = random_type(&mut rng, party);
        let ch = random_nonsignaling(&g, &mut rng)?;
        worst = worst.max(round_trip(&ch, party)?);
    }
    Ok((worst < 1e-9, format!("max distance {:.3e} over 22 channels", worst)))
}

fn check_trivial_types() -> Outcome {
    let mut agree = 0;
    for x in SystemKind::ALL {
        for y in SystemKind::ALL {
            for a in SystemKind::ALL {
                for b in SystemKind::ALL {
                    let want = [x, y, a, b].contains(&SystemKind::Trivial);
                    if is_lose_trivial_kinds(x, y, a, b) == want {
                        agree += 1;
                    }
                }
            }
        }
    }
    Ok((agree == 81, format!("{}/81 agree", agree)))
}

fn check_factorization(seed: u64) -> Outcome {
    let mut rng = seeded(seed.wrapping_add(12));
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let g = random_type(&mut rng, Party::Bob);
        let x = g.x;
        let bob = random_local_channel(g.y, g.b, &mut rng);
        let ch = Channel::product(&LocalChannel::trace(x), &bob)?;
        let (_, got) = crate::channel::factorize_trivial_output(&ch)?;
        worst = worst.max(got.distance(&bob));
    }
    Ok((worst < 1e-9, format!("max error {:.3e} over 100 channels", worst)))
}

fn check_zoo_valid() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for name in zoo::ZOO_NAMES {
        let (g, choi) = zoo::named_raw(name, &Default::default())?;
        let rep = crate::channel::validate(&g, &choi)?;
        let dev = rep
            .cptp
            .tp_deviation
            .max(-rep.cptp.min_eigenvalue)
            .max(rep.alice_to_bob.deviation)
            .max(rep.bob_to_alice.deviation);
        worst = worst.max(dev);
        if !rep.passes(CHANNEL_TOL) {
            failures.push(format!(
                "{} (A->B {:.3e}, B->A {:.3e})",
                name, rep.alice_to_bob.deviation, rep.bob_to_alice.deviation
            ));
        }
    }
    let basis = zoo::bennett_basis();
    let mut gram_dev: f64 = 0.0;
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            gram_dev = gram_dev.max((u.inner(v) - crate::linalg::r(want)).norm());
        }
    }
    let passed = failures.is_empty() && gram_dev < 1e-12;
    let measured = if failures.is_empty() {
        format!("max deviation {:.3e}, Gram deviation {:.3e}", worst, gram_dev)
    } else {
        format!("failing: {}; Gram deviation {:.3e}", failures.join(", "), gram_dev)
    };
    Ok((passed, measured))
}

fn check_round_trip() -> Outcome {
    let mut bad = Vec::new();
    for name in zoo::ZOO_NAMES {
        let (g, choi) = zoo::named_raw(name, &Default::default())?;
        let f = ChannelFile::new(g, choi, named_metadata(name))?;
        let text = f.to_canonical()?;
        if ChannelFile::parse(&text)?.to_canonical()? != text {
            bad.push(name);
        }
    }
    Ok((bad.is_empty(), format!("{} of {} identical", zoo::ZOO_NAMES.len() - bad.len(), zoo::ZOO_NAMES.len())))
}
