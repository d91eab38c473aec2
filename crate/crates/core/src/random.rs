//! Seeded random states, unitaries and channels for property tests and
//! examples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{Channel, LocalChannel};
use crate::error::Result;
use crate::linalg::{c, dephase_factor, tensor, CMatrix, Ket, C64};
use crate::process::Process;
use crate::types::{GlobalType, SystemType};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unit vector.
pub fn random_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Ket {
    Ket::new((0..d).map(|_| gaussian(rng)).collect()).normalized()
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Full-rank random density matrix (Hilbert–Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    m.scale_real(1.0 / t)
}

/// Orthonormalizes the columns of `m` (Gram–Schmidt, applied twice for
/// stability).
fn orthonormal_columns(m: &CMatrix) -> CMatrix {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v: Vec<C64> = (0..rows).map(|i| m[(i, j)]).collect();
        for _ in 0..2 {
            for u in &q {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        q.push(v.into_iter().map(|z| z / n).collect());
    }
    CMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

/// Haar-random unitary.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    orthonormal_columns(&ginibre(d, d, rng))
}

/// Random isometry `C^din → C^dout` (`dout ≥ din`).
pub fn random_isometry<R: Rng + ?Sized>(din: usize, dout: usize, rng: &mut R) -> CMatrix {
    assert!(dout >= din, "isometry needs dout >= din");
    orthonormal_columns(&ginibre(dout, din, rng))
}

/// Random CPTP map with the given wire types; classical wires are dephased.
pub fn random_local_channel<R: Rng + ?Sized>(input: SystemType, output: SystemType, rng: &mut R) -> LocalChannel {
    let (din, dout) = (input.dim(), output.dim());
    let env = din.div_ceil(dout).max(2);
    let v = random_isometry(din, dout * env, rng);
    let kraus: Vec<CMatrix> = (0..env)
        .map(|e| CMatrix::from_fn(dout, din, |o, i| v[(o * env + e, i)]))
        .collect();
    let mut choi = Process::from_kraus(&[("out", dout)], &[("in", din)], &kraus)
        .expect("dims")
        .into_choi();
    let dims = [dout, din];
    if output.is_classical() {
        choi = dephase_factor(&choi, &dims, 0).expect("dims");
    }
    if input.is_classical() {
        choi = dephase_factor(&choi, &dims, 1).expect("dims");
    }
    LocalChannel::from_choi(input, output, choi).expect("random channel is valid")
}

/// Random nonsignaling channel: a convex mixture of products of local
/// channels and, when outputs allow it, a replacement channel preparing a
/// random (generally entangled) state.
pub fn random_nonsignaling<R: Rng + ?Sized>(gtype: &GlobalType, rng: &mut R) -> Result<Channel> {
    let terms = 3;
    let mut weights: Vec<f64> = (0..=terms).map(|_| rng.gen::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let n = gtype.choi_dim();
    let mut choi = CMatrix::zeros(n, n);
    for w in weights.iter().take(terms) {
        let alice = random_local_channel(gtype.x, gtype.a, rng);
        let bob = random_local_channel(gtype.y, gtype.b, rng);
        let p = Channel::product(&alice, &bob)?;
        choi = &choi + &p.choi().scale_real(*w);
    }
    // replacement by a random joint state: J = ρ_AB ⊗ I_XY
    let (da, db) = (gtype.a.dim(), gtype.b.dim());
    let mut rho = random_density(da * db, rng);
    if gtype.a.is_classical() {
        rho = dephase_factor(&rho, &[da, db], 0)?;
    }
    if gtype.b.is_classical() {
        rho = dephase_factor(&rho, &[da, db], 1)?;
    }
    let replace = tensor(&rho, &CMatrix::identity(gtype.input_dim()));
    choi = &choi + &replace.scale_real(weights[terms]);
    Channel::from_choi(*gtype, choi)
}

/// Random channel of the given type with no nonsignaling guarantee (used to
/// exercise validators).
pub fn random_signaling_choi<R: Rng + ?Sized>(gtype: &GlobalType, rng: &mut R) -> CMatrix {
    let [da, db, dx, dy] = gtype.choi_dims();
    let ch = random_local_channel(
        SystemType::quantum(dx * dy),
        SystemType::quantum(da * db),
        rng,
    );
    // (AB, XY) is already the factor order (A, B, X, Y)
    ch.choi().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Direction;
    use crate::types::WireRole;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = seeded(1);
        for d in 1..6 {
            assert!(random_unitary(d, &mut rng).unitarity_deviation() < 1e-12);
        }
        let v = random_isometry(2, 5, &mut rng);
        assert!(v.adjoint().matmul(&v).max_abs_diff(&CMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn density_matrices_are_states() {
        let mut rng = seeded(2);
        let rho = random_density(4, &mut rng);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!(rho.min_eigenvalue().unwrap() > 0.0);
    }

    #[test]
    fn seeds_reproduce() {
        let a = random_ket(3, &mut seeded(7));
        let b = random_ket(3, &mut seeded(7));
        assert_eq!(a, b);
    }

    #[test]
    fn random_nonsignaling_channels_validate() {
        let mut rng = seeded(3);
        let g = GlobalType::new(
            SystemType::classical(2),
            SystemType::quantum(2),
            SystemType::quantum(2),
            SystemType::classical(3),
        );
        let ch = random_nonsignaling(&g, &mut rng).unwrap();
        assert!(ch.is_nonsignaling(Direction::AliceToBob, 1e-9));
        assert!(ch.is_classical_on_wire(WireRole::X));
        assert!(ch.is_classical_on_wire(WireRole::B));
    }

    #[test]
    fn generic_channels_signal() {
        let mut rng = seeded(4);
        let q2 = SystemType::quantum(2);
        let g = GlobalType::new(q2, q2, q2, q2);
        let choi = random_signaling_choi(&g, &mut rng);
        assert!(Channel::from_choi(g, choi).is_err());
    }
}
