//! Explicit strategies derived from resources, and the one-sided ordering
//! spot-check built on them.
//!
//! The DFP strategy shares `|φ⁺⟩`, feeds each party's input bit into the
//! resource and reads the control qubit of the resource output. On control 1
//! the party reports its data qubit in the computational basis; on control 0
//! it measures its half of `|φ⁺⟩` along an angle chosen per input.

use rand::Rng;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::games::{lhv_bound, score, Game, GameForm};
use crate::linalg::{basis_projector, pauli, phi_plus, tensor_all, CMatrix, ONE, ZERO};
use crate::lose::{apply_lose, dephase_computational, dephase_outputs_to_box, measurement_process, resource_with_pre, LocalComb, LoseOp};
use crate::process::Process;
use crate::random::seeded;
use crate::types::{GlobalType, SystemType};

/// `(I + (−1)^a (cos θ σ₃ + sin θ σ₁))/2`.
pub fn angle_projector(a: usize, theta: f64) -> CMatrix {
    let sign = if a == 0 { 1.0 } else { -1.0 };
    let obs = &pauli(3).scale_real(theta.cos()) + &pauli(1).scale_real(theta.sin());
    (&CMatrix::identity(2) + &obs.scale_real(sign)).scale_real(0.5)
}

/// POVM on `(control, data, input copy, ent)` for angles `thetas[input]`.
fn control_povm(thetas: [f64; 2]) -> Vec<CMatrix> {
    (0..2)
        .map(|a| {
            let mut e = CMatrix::zeros(16, 16);
            for (x, &theta) in thetas.iter().enumerate() {
                let on_one = tensor_all(&[
                    &basis_projector(2, 1),
                    &basis_projector(2, a),
                    &basis_projector(2, x),
                    &CMatrix::identity(2),
                ]);
                let on_zero = tensor_all(&[
                    &basis_projector(2, 0),
                    &CMatrix::identity(2),
                    &basis_projector(2, x),
                    &angle_projector(a, theta),
                ]);
                e = &(&e + &on_one) + &on_zero;
            }
            e
        })
        .collect()
}

fn control_comb(thetas: [f64; 2]) -> Result<LocalComb> {
    // |x⟩|e⟩ → |x⟩_res |x, e⟩_mem
    let iso = CMatrix::from_fn(8, 4, |row, col| {
        let (x, e) = (col / 2, col % 2);
        if row == (x * 2 + x) * 2 + e {
            ONE
        } else {
            ZERO
        }
    });
    let pre = Process::from_kraus(&[("res_in", 2), ("mem", 4)], &[("in", 2), ("ent", 2)], &[iso])?;
    let post = measurement_process("out", &[("res_out", 4), ("mem", 4)], &control_povm(thetas))?;
    let c2 = SystemType::classical(2);
    LocalComb::new(c2, c2, pre, post)
}

/// The strategy operation for angles `[θ_A0, θ_A1, θ_B0, θ_B1]`, turning a
/// qubit-input resource with (control, data) outputs into a binary box.
pub fn dfp_strategy_op(angles: [f64; 4]) -> Result<LoseOp> {
    LoseOp::new(
        control_comb([angles[0], angles[1]])?,
        control_comb([angles[2], angles[3]])?,
        phi_plus().projector(),
    )
}

#[derive(Clone, Debug)]
pub struct StrategyResult {
    pub angles: [f64; 4],
    /// Score predicted by the bilinear model used during the search.
    pub predicted: f64,
    /// Score of the box obtained by applying the operation to the resource.
    pub score: f64,
    pub output: Channel,
}

fn box_type() -> GlobalType {
    let c2 = SystemType::classical(2);
    GlobalType::new(c2, c2, c2, c2)
}

/// Bilinear model: `p(ab|xy) = u(θ_x)ᵀ M[xyab] v(φ_y)` with
/// `u(θ) = (1, cos θ, sin θ)`.
struct Model {
    m: Vec<[[f64; 3]; 3]>,
    weights: Vec<f64>,
}

impl Model {
    fn build(ch: &Channel, game: &Game) -> Result<Self> {
        let weights = match game.form() {
            GameForm::Payoff { .. } => game.to_witness(),
            GameForm::Witness(_) => return Err(Error::TypeMismatch("strategy search needs a payoff game".into())),
        };
        let weights: Vec<f64> = (0..16).map(|i| weights[(i, i)].re).collect();
        let op = dfp_strategy_op([0.0; 4])?;
        let p = resource_with_pre(&op, ch)?;
        let j = p.choi();
        // affine parts of each party's effect: E(θ) = G0 + cos θ G1 + sin θ G2
        let parts = |a: usize| -> [CMatrix; 3] {
            let e0 = &control_povm([0.0, 0.0])[a];
            let epi = &control_povm([std::f64::consts::PI; 2])[a];
            let ehalf = &control_povm([std::f64::consts::FRAC_PI_2; 2])[a];
            let g0 = (e0 + epi).scale_real(0.5);
            let g1 = (e0 - epi).scale_real(0.5);
            let g2 = ehalf - &g0;
            [g0, g1, g2]
        };
        let ga = [parts(0), parts(1)];
        let n = 16;
        let mut m = vec![[[0.0; 3]; 3]; 16];
        for x in 0..2 {
            for y in 0..2 {
                let i = x * 2 + y;
                let rho = |o: usize, o2: usize| j[(o * 4 + i, o2 * 4 + i)];
                for a in 0..2 {
                    for (ia, g) in ga[a].iter().enumerate() {
                        // σ = Tr_A[(G ⊗ I) ρ]
                        let mut sigma = CMatrix::zeros(n, n);
                        for b1 in 0..n {
                            for b2 in 0..n {
                                let mut s = ZERO;
                                for al in 0..n {
                                    for al2 in 0..n {
                                        let gv = g[(al2, al)];
                                        if gv != ZERO {
                                            s += gv * rho(al * n + b1, al2 * n + b2);
                                        }
                                    }
                                }
                                sigma[(b1, b2)] = s;
                            }
                        }
                        for (b, gb) in ga.iter().enumerate() {
                            for (ib, h) in gb.iter().enumerate() {
                                let mut t = ZERO;
                                for u in 0..n {
                                    for v in 0..n {
                                        t += h[(u, v)] * sigma[(v, u)];
                                    }
                                }
                                let k = ((a * 2 + b) * 2 + x) * 2 + y;
                                m[k][ia][ib] = t.re;
                            }
                        }
                    }
                }
            }
        }
        Ok(Model { m, weights })
    }

    fn value(&self, t: &[f64; 4]) -> f64 {
        let u = |th: f64| [1.0, th.cos(), th.sin()];
        let ua = [u(t[0]), u(t[1])];
        let ub = [u(t[2]), u(t[3])];
        let mut s = 0.0;
        for (k, (mk, w)) in self.m.iter().zip(&self.weights).enumerate() {
            if *w == 0.0 {
                continue;
            }
            let (x, y) = ((k >> 1) & 1, k & 1);
            let mut p = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    p += ua[x][i] * mk[i][j] * ub[y][j];
                }
            }
            s += w * p;
        }
        s
    }
}

fn refine(model: &Model, mut t: [f64; 4]) -> ([f64; 4], f64) {
    let mut best = model.value(&t);
    let mut step = std::f64::consts::PI / 8.0;
    while step > 1e-12 {
        let mut improved = false;
        for k in 0..4 {
            for dir in [1.0, -1.0] {
                let mut c = t;
                c[k] += dir * step;
                let v = model.value(&c);
                if v > best + 1e-15 {
                    best = v;
                    t = c;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (t, best)
}

/// Searches the angles of [`dfp_strategy_op`] for the best score in a payoff
/// game on binary boxes: an 8-point grid per angle, coordinate refinement
/// from the best grid points and from `restarts` seeded random starts, then
/// an exact evaluation by applying the operation to `ch`.
pub fn optimize_dfp_strategy(ch: &Channel, game: &Game, seed: u64, restarts: usize) -> Result<StrategyResult> {
    let g = ch.gtype();
    if g.choi_dims() != [4, 4, 2, 2] {
        return Err(Error::TypeMismatch(format!(
            "strategy needs qubit inputs and (control, data) outputs, got {}",
            g
        )));
    }
    if *game.gtype() != box_type() {
        return Err(Error::TypeMismatch(format!("game of type {} is not on binary boxes", game.gtype())));
    }
    let model = Model::build(ch, game)?;
    let grid: Vec<f64> = (0..8).map(|k| k as f64 * std::f64::consts::PI / 4.0).collect();
    let mut scored: Vec<([f64; 4], f64)> = Vec::with_capacity(4096);
    for &a0 in &grid {
        for &a1 in &grid {
            for &b0 in &grid {
                for &b1 in &grid {
                    let t = [a0, a1, b0, b1];
                    scored.push((t, model.value(&t)));
                }
            }
        }
    }
    scored.sort_by(|p, q| q.1.partial_cmp(&p.1).unwrap());
    let mut starts: Vec<[f64; 4]> = scored.iter().take(4).map(|s| s.0).collect();
    let mut rng = seeded(seed);
    for _ in 0..restarts {
        starts.push(std::array::from_fn(|_| rng.gen_range(0.0..std::f64::consts::TAU)));
    }
    let (angles, predicted) = starts
        .into_iter()
        .map(|s| refine(&model, s))
        .fold(([0.0; 4], f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
    let angles = angles.map(|a| a.rem_euclid(std::f64::consts::TAU));
    let output = apply_lose(&dfp_strategy_op(angles)?, ch)?;
    let score = score(game, &output)?;
    Ok(StrategyResult { angles, predicted, score, output })
}

/// Best score found for one resource in one game, with the strategy that
/// achieved it.
#[derive(Clone, Debug)]
pub struct GameScore {
    pub strategy: String,
    pub score: f64,
}

#[derive(Clone, Debug)]
pub struct SpotcheckEntry {
    pub game: String,
    pub r1: Option<GameScore>,
    pub r2: Option<GameScore>,
}

impl SpotcheckEntry {
    /// A strictly higher best score for `r2` refutes `r1 ⪰ r2` (and vice
    /// versa); anything else is inconclusive.
    pub fn conclusion(&self, tol: f64) -> &'static str {
        match (&self.r1, &self.r2) {
            (Some(s1), Some(s2)) if s2.score > s1.score + tol => "refutes r1 >= r2",
            (Some(s1), Some(s2)) if s1.score > s2.score + tol => "refutes r2 >= r1",
            (Some(_), Some(_)) => "no separation (inconclusive)",
            _ => "no strategy of the game's type (inconclusive)",
        }
    }
}

/// Per-game best scores over the implemented strategy set. This is a
/// one-sided check: a reversal of scores refutes convertibility, while
/// agreement proves nothing.
#[derive(Clone, Debug)]
pub struct SpotcheckReport {
    pub entries: Vec<SpotcheckEntry>,
}

/// Strategies of the game's type derivable from `r` by the implemented
/// constructions: `r` itself, its computational-basis dephasing, the DFP
/// strategy where it applies, and deterministic local strategies (free for
/// every resource).
pub fn derived_strategies(r: &Channel, game: &Game, seed: u64) -> Vec<GameScore> {
    let mut out = Vec::new();
    let gt = *game.gtype();
    if *r.gtype() == gt {
        if let Ok(s) = score(game, r) {
            out.push(GameScore { strategy: "resource".into(), score: s });
        }
    }
    if let Ok(b) = dephase_computational(r) {
        if *b.gtype() == gt {
            if let Ok(s) = score(game, &b) {
                out.push(GameScore { strategy: "dephase".into(), score: s });
            }
        }
    }
    let (da, db) = (r.gtype().a.dim(), r.gtype().b.dim());
    if da == 2 && db == 2 {
        let h = crate::linalg::hadamard();
        if let Ok(b) = dephase_outputs_to_box(r, &h, &h) {
            if *b.gtype() == gt {
                if let Ok(s) = score(game, &b) {
                    out.push(GameScore { strategy: "dephase-hadamard".into(), score: s });
                }
            }
        }
    }
    if r.gtype().choi_dims() == [4, 4, 2, 2] && gt == box_type() {
        if let Ok(res) = optimize_dfp_strategy(r, game, seed, 4) {
            out.push(GameScore { strategy: "control-entangled".into(), score: res.score });
        }
    }
    if let Ok(s) = lhv_bound(game) {
        out.push(GameScore { strategy: "local-deterministic".into(), score: s });
    }
    out
}

fn best(scores: Vec<GameScore>) -> Option<GameScore> {
    scores
        .into_iter()
        .fold(None, |acc: Option<GameScore>, s| match acc {
            Some(a) if a.score >= s.score => Some(a),
            _ => Some(s),
        })
}

/// Compares two resources on a list of named games.
pub fn ordering_spotcheck(r1: &Channel, r2: &Channel, games: &[(String, Game)], seed: u64) -> SpotcheckReport {
    let entries = games
        .iter()
        .map(|(name, g)| SpotcheckEntry {
            game: name.clone(),
            r1: best(derived_strategies(r1, g, seed)),
            r2: best(derived_strategies(r2, g, seed)),
        })
        .collect();
    SpotcheckReport { entries }
}
