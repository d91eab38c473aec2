//! Distributed games, the CHSH game and postquantumness witnesses.

use std::fmt;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{partial_transpose_many, CMatrix, Ket};
use crate::types::{GlobalType, SystemType};

/// Tsirelson's bound for the CHSH game in the normalization where the PR
/// box scores 4 and local strategies at most 2.
pub const QUANTUM_CHSH_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Largest number of deterministic strategies [`lhv_bound`] will enumerate.
pub const LHV_STRATEGY_LIMIT: u128 = 1_000_000;

/// Default fidelity slack for [`is_fixed_point`].
pub const FIXED_POINT_TOL: f64 = 1e-9;

/// Condition number above which [`eigenstate_condition_check`] treats an
/// operator as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub enum GameForm {
    /// Hermitian operator on the Choi space; score `Re Tr(W J)`.
    Witness(CMatrix),
    /// Input distribution `μ[x][y]` and payoff `F(a,b,x,y)` flattened with
    /// index `((a·|B| + b)·|X| + x)·|Y| + y`.
    Payoff { input_dist: Vec<Vec<f64>>, payoff: Vec<f64> },
}

/// A linear functional on resources of a fixed global type.
#[derive(Clone, Debug, PartialEq)]
pub struct Game {
    gtype: GlobalType,
    form: GameForm,
}

impl Game {
    pub fn witness(gtype: GlobalType, w: CMatrix) -> Result<Self> {
        let n = gtype.choi_dim();
        if !w.is_square() || w.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "witness {}x{} for type {} (Choi dim {})",
                w.rows(),
                w.cols(),
                gtype,
                n
            )));
        }
        let dev = w.hermiticity_deviation();
        if dev > 1e-12 {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Game { gtype, form: GameForm::Witness(w) })
    }

    pub fn payoff(gtype: GlobalType, input_dist: Vec<Vec<f64>>, payoff: Vec<f64>) -> Result<Self> {
        let [na, nb, nx, ny] = gtype.choi_dims();
        if input_dist.len() != nx || input_dist.iter().any(|row| row.len() != ny) {
            return Err(Error::DimensionMismatch(format!(
                "input distribution must be {}x{}",
                nx, ny
            )));
        }
        if payoff.len() != na * nb * nx * ny {
            return Err(Error::DimensionMismatch(format!(
                "payoff table has {} entries, expected {}",
                payoff.len(),
                na * nb * nx * ny
            )));
        }
        let flat: Vec<f64> = input_dist.iter().flatten().copied().collect();
        if flat.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Invariant {
                quantity: "negative input probability".into(),
                value: flat.iter().copied().fold(0.0, f64::min).abs(),
                tol: 0.0,
            });
        }
        let total: f64 = flat.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invariant {
                quantity: "input distribution normalization defect".into(),
                value: (total - 1.0).abs(),
                tol: 1e-12,
            });
        }
        if payoff.iter().any(|f| !f.is_finite()) {
            return Err(Error::OutOfRange("non-finite payoff".into()));
        }
        Ok(Game {
            gtype,
            form: GameForm::Payoff { input_dist, payoff },
        })
    }

    /// Payoff game from a function `F(a, b, x, y)`.
    pub fn payoff_fn(gtype: GlobalType, input_dist: Vec<Vec<f64>>, f: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let [na, nb, nx, ny] = gtype.choi_dims();
        let mut table = Vec::with_capacity(na * nb * nx * ny);
        for a in 0..na {
            for b in 0..nb {
                for x in 0..nx {
                    for y in 0..ny {
                        table.push(f(a, b, x, y));
                    }
                }
            }
        }
        Game::payoff(gtype, input_dist, table)
    }

    pub fn gtype(&self) -> &GlobalType {
        &self.gtype
    }

    pub fn form(&self) -> &GameForm {
        &self.form
    }

    /// The game as a witness on the Choi space (payoff games become the
    /// diagonal operator `Σ μ(x,y) F(a,b,x,y) |abxy⟩⟨abxy|`).
    pub fn to_witness(&self) -> CMatrix {
        match &self.form {
            GameForm::Witness(w) => w.clone(),
            GameForm::Payoff { .. } => {
                let diag: Vec<_> = self.weights().into_iter().map(crate::linalg::r).collect();
                CMatrix::diagonal(&diag)
            }
        }
    }

    /// `μ(x,y)·F(a,b,x,y)` in Choi-diagonal order (payoff games only).
    fn weights(&self) -> Vec<f64> {
        match &self.form {
            GameForm::Payoff { input_dist, payoff } => {
                let [_, _, nx, ny] = self.gtype.choi_dims();
                payoff
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let (x, y) = ((i / ny) % nx, i % ny);
                        input_dist[x][y] * f
                    })
                    .collect()
            }
            GameForm::Witness(_) => Vec::new(),
        }
    }
}

/// Score of a strategy: `Re Tr(W J)` or `Σ μ(x,y) F(a,b,x,y) p(ab|xy)`.
pub fn score(game: &Game, strategy: &Channel) -> Result<f64> {
    if game.gtype != *strategy.gtype() {
        return Err(Error::TypeMismatch(format!(
            "game of type {} scored on a strategy of type {}",
            game.gtype,
            strategy.gtype()
        )));
    }
    let j = strategy.choi();
    Ok(match &game.form {
        GameForm::Witness(w) => {
            // Re Tr(W J) = Re Σ_ij W_ij J_ji
            let n = j.rows();
            let mut s = 0.0;
            for i in 0..n {
                for k in 0..n {
                    s += (w[(i, k)] * j[(k, i)]).re;
                }
            }
            s
        }
        GameForm::Payoff { .. } => game
            .weights()
            .iter()
            .enumerate()
            .map(|(i, wgt)| wgt * j[(i, i)].re)
            .sum(),
    })
}

/// The CHSH game on boxes with binary inputs and outputs: uniform inputs and
/// payoff `4·(−1)^{a⊕b⊕xy}`.
pub fn chsh_game() -> Game {
    let c2 = SystemType::classical(2);
    let g = GlobalType::new(c2, c2, c2, c2);
    Game::payoff_fn(g, vec![vec![0.25; 2]; 2], |a, b, x, y| {
        if (a ^ b ^ (x & y)) == 0 {
            4.0
        } else {
            -4.0
        }
    })
    .expect("CHSH game")
}

/// Maximum score over deterministic local strategies `a = f(x)`, `b = g(y)`.
pub fn lhv_bound(game: &Game) -> Result<f64> {
    if let GameForm::Witness(_) = game.form {
        return Err(Error::TypeMismatch("LHV bound needs a payoff game".into()));
    }
    let [na, nb, nx, ny] = game.gtype.choi_dims();
    let count = (na as u128)
        .checked_pow(nx as u32)
        .and_then(|p| (nb as u128).checked_pow(ny as u32).and_then(|q| p.checked_mul(q)))
        .unwrap_or(u128::MAX);
    if count > LHV_STRATEGY_LIMIT {
        return Err(Error::TooLarge(count, LHV_STRATEGY_LIMIT));
    }
    let w = game.weights();
    let idx = |a: usize, b: usize, x: usize, y: usize| ((a * nb + b) * nx + x) * ny + y;
    let fa = enumerate_functions(nx, na);
    let gb = enumerate_functions(ny, nb);
    let mut best = f64::NEG_INFINITY;
    for f in &fa {
        for g in &gb {
            let mut s = 0.0;
            for x in 0..nx {
                for y in 0..ny {
                    s += w[idx(f[x], g[y], x, y)];
                }
            }
            best = best.max(s);
        }
    }
    Ok(best)
}

/// All functions `{0..n} → {0..m}` as value tables.
fn enumerate_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Minimum eigenvalue of the Choi operator partially transposed on the input
/// factors. Negative values certify that the channel is not
/// entanglement-breaking.
pub fn ppt_min_eigenvalue(ch: &Channel) -> Result<f64> {
    ppt_min_eigenvalue_of(ch.gtype(), ch.choi())
}

/// [`ppt_min_eigenvalue`] on an unvalidated Choi operator.
pub fn ppt_min_eigenvalue_of(gtype: &GlobalType, choi: &CMatrix) -> Result<f64> {
    let pt = partial_transpose_many(choi, &gtype.choi_dims(), &[2, 3])?;
    pt.min_eigenvalue()
}

/// `⟨ψ|E(|ψ⟩⟨ψ|)|ψ⟩` for a channel whose input and output spaces agree.
pub fn fixed_point_fidelity(ch: &Channel, psi: &Ket) -> Result<f64> {
    let g = ch.gtype();
    if g.input_dim() != g.output_dim() || psi.dim() != g.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "ket of dim {} for a channel {} -> {}",
            psi.dim(),
            g.input_dim(),
            g.output_dim()
        )));
    }
    if !psi.is_normalized(1e-10) {
        return Err(Error::OutOfRange(format!("ket norm {}", psi.norm())));
    }
    let out = ch.apply_ket(psi)?;
    Ok(psi.to_bra().matmul(&out).matmul(&psi.to_column())[(0, 0)].re)
}

/// True iff `⟨ψ|E(|ψ⟩⟨ψ|)|ψ⟩ > 1 − tol`.
pub fn is_fixed_point(ch: &Channel, psi: &Ket, tol: f64) -> Result<bool> {
    Ok(fixed_point_fidelity(ch, psi)? > 1.0 - tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The premise fails, or all four states are fixed points.
    Consistent,
    /// `ψ`, `(A⊗I)ψ`, `(I⊗B)ψ` are fixed points but `(A⊗B)ψ` is not: the
    /// channel cannot be generated by LOSE.
    Violation,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Violation => "violation",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenstateReport {
    pub verdict: Verdict,
    /// Fixed-point fidelities of `ψ`, `(A⊗I)ψ`, `(I⊗B)ψ`, `(A⊗B)ψ`
    /// (normalized).
    pub fidelities: [f64; 4],
}

fn condition_number(m: &CMatrix) -> f64 {
    let sv = m.singular_values();
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Checks the eigenstate condition for LOSE-generated channels: if `ψ`,
/// `(A⊗I)ψ` and `(I⊗B)ψ` are eigenstates then so is `(A⊗B)ψ`, for
/// invertible `A`, `B`.
pub fn eigenstate_condition_check(ch: &Channel, psi: &Ket, a_op: &CMatrix, b_op: &CMatrix, tol: f64) -> Result<EigenstateReport> {
    let g = ch.gtype();
    let (da, db) = (g.x.dim(), g.y.dim());
    if a_op.rows() != da || a_op.cols() != da || b_op.rows() != db || b_op.cols() != db {
        return Err(Error::DimensionMismatch(format!(
            "operators {}x{} and {}x{} for input dims {} and {}",
            a_op.rows(),
            a_op.cols(),
            b_op.rows(),
            b_op.cols(),
            da,
            db
        )));
    }
    for m in [a_op, b_op] {
        let k = condition_number(m);
        if k > CONDITION_LIMIT {
            return Err(Error::Singular { condition: k });
        }
    }
    let ia = CMatrix::identity(da);
    let ib = CMatrix::identity(db);
    let states = [
        psi.clone(),
        crate::linalg::tensor(a_op, &ib).apply(psi).normalized(),
        crate::linalg::tensor(&ia, b_op).apply(psi).normalized(),
        crate::linalg::tensor(a_op, b_op).apply(psi).normalized(),
    ];
    let mut fidelities = [0.0; 4];
    for (f, s) in fidelities.iter_mut().zip(&states) {
        *f = fixed_point_fidelity(ch, s)?;
    }
    let fixed = |f: f64| f > 1.0 - tol;
    let premise = fidelities[..3].iter().all(|&f| fixed(f));
    let verdict = if premise && !fixed(fidelities[3]) {
        Verdict::Violation
    } else {
        Verdict::Consistent
    };
    Ok(EigenstateReport { verdict, fidelities })
}

/// Number of Schmidt coefficients above `1e-10` for `ψ` on `C^{d_A} ⊗ C^{d_B}`.
pub fn schmidt_rank(psi: &Ket, dims: (usize, usize)) -> Result<usize> {
    let (da, db) = dims;
    if psi.dim() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "ket of dim {} for bipartition {}x{}",
            psi.dim(),
            da,
            db
        )));
    }
    let m = CMatrix::from_vec(da, db, psi.amplitudes().to_vec())?;
    Ok(m.singular_values().into_iter().filter(|&s| s > 1e-10).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Channel, LocalChannel};
    use crate::linalg::{bell_state, hadamard, phi_plus};
    use crate::random::{random_ket, seeded};
    use crate::zoo::{self, BoxDistribution};

    fn deterministic_box(f: [usize; 2], g: [usize; 2]) -> Channel {
        zoo::box_from_distribution(&BoxDistribution::deterministic(2, 2, &f, &g).unwrap())
    }

    #[test]
    fn chsh_scores() {
        let game = chsh_game();
        assert_eq!(score(&game, &zoo::pr_box()).unwrap(), 4.0);
        let uniform = zoo::box_from_distribution(&BoxDistribution::uniform(2, 2, 2, 2));
        assert_eq!(score(&game, &uniform).unwrap(), 0.0);
        for v in [0.0, 0.3, 0.7, 1.0] {
            let b = zoo::box_from_distribution(&BoxDistribution::isotropic(v).unwrap());
            assert!((score(&game, &b).unwrap() - 4.0 * v).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_boxes_score_at_most_two() {
        let game = chsh_game();
        for f in 0..4 {
            for g in 0..4 {
                let b = deterministic_box([f & 1, f >> 1], [g & 1, g >> 1]);
                assert!(score(&game, &b).unwrap().abs() <= 2.0 + 1e-12);
            }
        }
    }

    #[test]
    fn lhv_bounds() {
        assert_eq!(lhv_bound(&chsh_game()).unwrap(), 2.0);
        let g = *chsh_game().gtype();
        let constant = Game::payoff_fn(g, vec![vec![0.25; 2]; 2], |_, _, _, _| 1.5).unwrap();
        assert_eq!(lhv_bound(&constant).unwrap(), 1.5);
        let alice_only = Game::payoff_fn(g, vec![vec![0.25; 2]; 2], |a, _, x, _| (a == x) as u8 as f64).unwrap();
        assert_eq!(lhv_bound(&alice_only).unwrap(), 1.0);
        assert!((2.0..4.0).contains(&QUANTUM_CHSH_BOUND) && QUANTUM_CHSH_BOUND > 2.0);
    }

    #[test]
    fn lhv_guard() {
        let big = GlobalType::new(
            SystemType::classical(8),
            SystemType::classical(8),
            SystemType::classical(8),
            SystemType::classical(2),
        );
        let game = Game::payoff_fn(big, vec![vec![1.0 / 64.0; 8]; 8], |_, _, _, _| 0.0).unwrap();
        assert!(matches!(lhv_bound(&game), Err(Error::TooLarge(..))));
    }

    #[test]
    fn zero_payoff_scores_zero() {
        let g = *chsh_game().gtype();
        let zero = Game::payoff_fn(g, vec![vec![0.25; 2]; 2], |_, _, _, _| 0.0).unwrap();
        assert_eq!(score(&zero, &zoo::pr_box()).unwrap(), 0.0);
    }

    #[test]
    fn witness_form_agrees_with_payoff_form() {
        let game = chsh_game();
        let w = Game::witness(*game.gtype(), game.to_witness()).unwrap();
        let b = zoo::box_from_distribution(&BoxDistribution::isotropic(0.4).unwrap());
        assert!((score(&w, &b).unwrap() - score(&game, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn game_validation() {
        let g = *chsh_game().gtype();
        assert!(Game::payoff(g, vec![vec![0.5; 2]; 2], vec![0.0; 16]).is_err());
        assert!(Game::payoff(g, vec![vec![0.25; 2]; 2], vec![0.0; 15]).is_err());
        let mut w = CMatrix::zeros(16, 16);
        w[(0, 1)] = crate::linalg::ONE;
        assert!(matches!(Game::witness(g, w), Err(Error::NotHermitian { .. })));
        assert!(matches!(score(&chsh_game(), &zoo::phhh()), Err(Error::TypeMismatch(_))));
    }

    #[test]
    fn ppt_of_simple_channels() {
        assert!(ppt_min_eigenvalue(&zoo::pr_box()).unwrap() >= -1e-12);
        assert!(ppt_min_eigenvalue(&zoo::phhh()).unwrap() >= -1e-10);
        let q2 = SystemType::quantum(2);
        let id = Channel::product(&LocalChannel::identity(q2), &LocalChannel::identity(q2)).unwrap();
        assert!(ppt_min_eigenvalue(&id).unwrap() < -0.5);
    }

    #[test]
    fn fixed_points_under_dephasing() {
        let deph = Channel::product(&LocalChannel::dephasing(2), &LocalChannel::identity(SystemType::trivial()))
            .unwrap()
            .retyped(GlobalType::new(
                SystemType::quantum(2),
                SystemType::trivial(),
                SystemType::quantum(2),
                SystemType::trivial(),
            ))
            .unwrap();
        assert!(is_fixed_point(&deph, &Ket::basis(2, 1), FIXED_POINT_TOL).unwrap());
        let plus = Ket::from_real(&[1.0, 1.0]).normalized();
        assert!(!is_fixed_point(&deph, &plus, FIXED_POINT_TOL).unwrap());
        assert!(is_fixed_point(&deph, &Ket::basis(3, 0), 1e-9).is_err());
    }

    fn swap_fs() -> CMatrix {
        CMatrix::from_fn(4, 4, |i, j| if i == (j + 2) % 4 { crate::linalg::ONE } else { crate::linalg::ZERO })
    }

    #[test]
    fn bgnp_eigenstate_witness() {
        let psi = zoo::embed_blocks(&phi_plus(), zoo::Block::F, zoo::Block::F);
        let s = swap_fs();
        let rep = eigenstate_condition_check(&zoo::bgnp(&hadamard()).unwrap(), &psi, &s, &s, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::Violation);
        assert!((rep.fidelities[3] - 0.5).abs() < 1e-12);
        let rep = eigenstate_condition_check(&zoo::bgnp(&CMatrix::identity(2)).unwrap(), &psi, &s, &s, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::Consistent);
        for tol in [1e-9, 1e-8, 1e-7, 1e-6] {
            let rep = eigenstate_condition_check(&zoo::bgnp_default(), &psi, &s, &s, tol).unwrap();
            assert_eq!(rep.verdict, Verdict::Violation);
        }
    }

    #[test]
    fn identity_channel_is_consistent() {
        let q2 = SystemType::quantum(2);
        let id = Channel::product(&LocalChannel::identity(q2), &LocalChannel::identity(q2)).unwrap();
        let mut rng = seeded(5);
        let psi = random_ket(4, &mut rng);
        let rep = eigenstate_condition_check(&id, &psi, &hadamard(), &crate::linalg::pauli(1), 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::Consistent);
    }

    #[test]
    fn singular_operators_rejected() {
        let psi = zoo::embed_blocks(&phi_plus(), zoo::Block::F, zoo::Block::F);
        let p = crate::linalg::basis_projector(4, 0);
        let res = eigenstate_condition_check(&zoo::bgnp_default(), &psi, &p, &swap_fs(), 1e-9);
        assert!(matches!(res, Err(Error::Singular { .. })));
    }

    #[test]
    fn schmidt_ranks() {
        assert_eq!(schmidt_rank(&bell_state(0), (2, 2)).unwrap(), 2);
        assert_eq!(schmidt_rank(&Ket::basis(4, 0), (2, 2)).unwrap(), 1);
        assert_eq!(schmidt_rank(&random_ket(9, &mut seeded(9)), (3, 3)).unwrap(), 3);
        assert!(schmidt_rank(&Ket::basis(4, 0), (3, 2)).is_err());
    }
}
