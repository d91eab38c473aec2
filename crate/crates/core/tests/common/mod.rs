//! Independent reference computations used by the integration tests. Nothing
//! here calls into the library's linear algebra; matrices are read through
//! `as_slice` (row-major) and rebuilt by hand.
#![allow(dead_code)]

use losekit::{CMatrix, C64};
use nalgebra::DMatrix;

pub fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn entry(m: &CMatrix, i: usize, j: usize) -> C64 {
    m.as_slice()[i * m.cols() + j]
}

pub fn build(n: usize, f: impl Fn(usize, usize) -> C64) -> CMatrix {
    CMatrix::from_fn(n, n, f)
}

pub fn frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.rows();
    let dm = DMatrix::<C64>::from_row_slice(n, n, m.as_slice());
    let herm = (&dm + dm.adjoint()) * cx(0.5, 0.0);
    herm.symmetric_eigen().eigenvalues.iter().copied().collect()
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigenvalues(m).into_iter().fold(f64::INFINITY, f64::min)
}

pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.rows();
    let d = build(n, |i, j| entry(a, i, j) - entry(b, i, j));
    0.5 * eigenvalues(&d).iter().map(|v| v.abs()).sum::<f64>()
}

/// `E(ρ)` for a Choi operator `J = Σ E(|i⟩⟨j|) ⊗ |i⟩⟨j|` with the output
/// factor first.
pub fn apply_choi(j: &CMatrix, dout: usize, din: usize, rho: &CMatrix) -> CMatrix {
    assert_eq!(j.rows(), dout * din);
    build(dout, |o1, o2| {
        let mut s = cx(0.0, 0.0);
        for i in 0..din {
            for k in 0..din {
                let r = entry(rho, i, k);
                if r != cx(0.0, 0.0) {
                    s += r * entry(j, o1 * din + i, o2 * din + k);
                }
            }
        }
        s
    })
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (n, m) = (a.rows(), b.rows());
    build(n * m, |i, j| entry(a, i / m, j / m) * entry(b, i % m, j % m))
}

/// Traces out the first factor of a `(d1·d2)`-dimensional operator.
pub fn trace_first(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    build(d2, |i, j| (0..d1).map(|k| entry(m, k * d2 + i, k * d2 + j)).sum())
}

/// Traces out the second factor.
pub fn trace_second(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    build(d1, |i, j| (0..d2).map(|k| entry(m, i * d2 + k, j * d2 + k)).sum())
}

/// A spanning set of density matrices: basis projectors and the two
/// superpositions `(|i⟩ + |j⟩)/√2`, `(|i⟩ + i|j⟩)/√2` for each pair.
pub fn spanning_states(d: usize) -> Vec<CMatrix> {
    let mut kets: Vec<Vec<C64>> = Vec::new();
    for i in 0..d {
        let mut v = vec![cx(0.0, 0.0); d];
        v[i] = cx(1.0, 0.0);
        kets.push(v);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            for phase in [cx(h, 0.0), cx(0.0, h)] {
                let mut v = vec![cx(0.0, 0.0); d];
                v[i] = cx(h, 0.0);
                v[j] = phase;
                kets.push(v);
            }
        }
    }
    kets.iter()
        .map(|v| build(d, |i, j| v[i] * v[j].conj()))
        .collect()
}

/// `p(ab|xy)` read from the diagonal of a box's Choi operator.
pub fn box_prob(choi: &CMatrix, dims: [usize; 4], a: usize, b: usize, x: usize, y: usize) -> f64 {
    let [_, nb, nx, ny] = dims;
    let i = ((a * nb + b) * nx + x) * ny + y;
    entry(choi, i, i).re
}

/// `Σ_xy (−1)^{xy} Σ_ab (−1)^{a⊕b} p(ab|xy)` for a two-input two-output box.
pub fn chsh_value(p: impl Fn(usize, usize, usize, usize) -> f64) -> f64 {
    let mut s = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let sign_xy = if x & y == 1 { -1.0 } else { 1.0 };
            for a in 0..2 {
                for b in 0..2 {
                    let sign_ab = if a ^ b == 1 { -1.0 } else { 1.0 };
                    s += sign_xy * sign_ab * p(a, b, x, y);
                }
            }
        }
    }
    s
}

pub fn pr_prob(a: usize, b: usize, x: usize, y: usize) -> f64 {
    if a ^ b == x & y {
        0.5
    } else {
        0.0
    }
}

/// Largest Frobenius spread of one party's reduced output as the other
/// party's input ranges over a spanning set, for each fixed own input.
/// `from_alice` measures Alice→Bob signaling.
pub fn signaling_deviation(choi: &CMatrix, dims: [usize; 4], from_alice: bool) -> f64 {
    let [da, db, dx, dy] = dims;
    let (sender, receiver) = if from_alice { (dx, dy) } else { (dy, dx) };
    let mut worst: f64 = 0.0;
    let sender_states = spanning_states(sender);
    for rho in spanning_states(receiver) {
        let mut first: Option<CMatrix> = None;
        for sigma in &sender_states {
            let input = if from_alice { kron(sigma, &rho) } else { kron(&rho, sigma) };
            let out = apply_choi(choi, da * db, dx * dy, &input);
            let reduced = if from_alice {
                trace_first(&out, da, db)
            } else {
                trace_second(&out, da, db)
            };
            match &first {
                None => first = Some(reduced),
                Some(f) => worst = worst.max(frobenius(f, &reduced)),
            }
        }
    }
    worst
}

/// `‖Tr_out J − I‖_F`.
pub fn tp_deviation(choi: &CMatrix, dout: usize, din: usize) -> f64 {
    let t = trace_first(choi, dout, din);
    let id = build(din, |i, j| if i == j { cx(1.0, 0.0) } else { cx(0.0, 0.0) });
    frobenius(&t, &id)
}

/// Partial transpose of both input factors of a Choi operator ordered
/// `(A, B, X, Y)`.
pub fn transpose_inputs(choi: &CMatrix, dims: [usize; 4]) -> CMatrix {
    let [da, db, dx, dy] = dims;
    let din = dx * dy;
    build(da * db * din, |i, j| {
        let (oi, ii) = (i / din, i % din);
        let (oj, ij) = (j / din, j % din);
        entry(choi, oi * din + ij, oj * din + ii)
    })
}

/// Prints the criterion line and fails the test when `pass` is false. The
/// line goes straight to the process's stderr so it shows even when the test
/// harness captures output.
pub fn report(id: usize, title: &str, pass: bool, measured: &str) {
    use std::io::Write;
    let line = format!(
        "criterion {:>2} {}  {}  [{}]\n",
        id,
        if pass { "PASS" } else { "FAIL" },
        title,
        measured
    );
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    assert!(pass, "criterion {} failed: {} [{}]", id, title, measured);
}
