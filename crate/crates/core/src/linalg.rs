//! Dense complex linear algebra.
//!
//! Matrices are stored row-major. Multi-factor spaces use the convention that
//! the leftmost factor is the slowest-varying index, so for dims `[d0, d1, d2]`
//! the flat index of `(i0, i1, i2)` is `(i0 * d1 + i1) * d2 + i2`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(16) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(16) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds a matrix from real-valued rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n * m);
        for row in rows {
            assert_eq!(row.len(), m, "ragged rows");
            data.extend(row.iter().map(|&x| r(x)));
        }
        CMatrix {
            rows: n,
            cols: m,
            data,
        }
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n * m);
        for row in rows {
            assert_eq!(row.len(), m, "ragged rows");
            data.extend_from_slice(row);
        }
        CMatrix {
            rows: n,
            cols: m,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let row = &mut out[i * m..(i + 1) * m];
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[l * m..(l + 1) * m];
                for (o, &b) in row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        CMatrix {
            rows: n,
            cols: m,
            data: out,
        }
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> CMatrix {
        self.scale(r(s))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖self − other‖_F`; panics on shape mismatch.
    pub fn frobenius_distance(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M − M†|`, or infinity for non-square input.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `max |U†U − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&CMatrix::identity(self.rows))
    }

    pub fn require_unitary(&self, tol: f64) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation > tol {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(())
    }

    /// Kronecker product with `self` as the slow factor.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        let mut out = CMatrix::zeros(r1 * r2, c1 * c2);
        let oc = c1 * c2;
        for i1 in 0..r1 {
            for j1 in 0..c1 {
                let a = self.data[i1 * c1 + j1];
                if a == ZERO {
                    continue;
                }
                for i2 in 0..r2 {
                    let base = (i1 * r2 + i2) * oc + j1 * c2;
                    for j2 in 0..c2 {
                        out.data[base + j2] = a * other.data[i2 * c2 + j2];
                    }
                }
            }
        }
        out
    }

    /// Sets every entry with magnitude below `eps` to exactly zero.
    pub fn chop(&self, eps: f64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|&z| {
                    C64::new(
                        if z.re.abs() < eps { 0.0 } else { z.re },
                        if z.im.abs() < eps { 0.0 } else { z.im },
                    )
                })
                .collect(),
        }
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        assert_eq!(self.cols, v.dim());
        let amps = (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v.amplitudes())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        Ket::new(amps)
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> CMatrix {
        u.matmul(self).matmul(&u.adjoint())
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        let mut sv: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }

    /// Minimum eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = eigh(self)?;
        Ok(vals.first().copied().unwrap_or(0.0))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// A state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    pub fn new(amps: Vec<C64>) -> Self {
        Ket { amps }
    }

    pub fn from_real(amps: &[f64]) -> Self {
        Ket {
            amps: amps.iter().map(|&x| r(x)).collect(),
        }
    }

    /// Computational basis vector `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ket { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.inner(self).re - 1.0).abs() < tol
    }

    pub fn normalized(&self) -> Ket {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        Ket {
            amps: self.amps.iter().map(|z| z / n).collect(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ket { amps }
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &Ket) -> CMatrix {
        CMatrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.amps[i] * other.amps[j].conj()
        })
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> CMatrix {
        self.outer(self)
    }

    pub fn scale(&self, s: C64) -> Ket {
        Ket {
            amps: self.amps.iter().map(|&z| z * s).collect(),
        }
    }

    /// Column matrix view.
    pub fn to_column(&self) -> CMatrix {
        CMatrix::from_vec(self.dim(), 1, self.amps.clone()).expect("column shape")
    }

    /// Row matrix `⟨self|`.
    pub fn to_bra(&self) -> CMatrix {
        CMatrix::from_vec(1, self.dim(), self.amps.iter().map(|z| z.conj()).collect())
            .expect("row shape")
    }
}

impl Add<&Ket> for &Ket {
    type Output = Ket;
    fn add(self, rhs: &Ket) -> Ket {
        assert_eq!(self.dim(), rhs.dim());
        Ket::new(self.amps.iter().zip(&rhs.amps).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Ket> for &Ket {
    type Output = Ket;
    fn sub(self, rhs: &Ket) -> Ket {
        assert_eq!(self.dim(), rhs.dim());
        Ket::new(self.amps.iter().zip(&rhs.amps).map(|(a, b)| a - b).collect())
    }
}

/// Kronecker product `m1 ⊗ m2`, `m1` slow.
pub fn tensor(m1: &CMatrix, m2: &CMatrix) -> CMatrix {
    m1.kron(m2)
}

/// Kronecker product of a list of matrices, leftmost slowest.
pub fn tensor_all(ms: &[&CMatrix]) -> CMatrix {
    ms.iter()
        .fold(CMatrix::identity(1), |acc, m| acc.kron(m))
}

fn check_square_dims(m: &CMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "factor dims {:?} (product {}) vs {}x{} matrix",
            dims,
            total,
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// For a permutation `perm` (output factor `k` is input factor `perm[k]`),
/// returns `map[out_index] = in_index`.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let in_strides = strides(dims);
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let total: usize = dims.iter().product();
    let mut map = vec![0usize; total];
    let mut digits = vec![0usize; dims.len()];
    for slot in map.iter_mut() {
        *slot = digits
            .iter()
            .zip(perm)
            .map(|(&d, &p)| d * in_strides[p])
            .sum();
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < out_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    map
}

fn check_perm(n: usize, perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "permutation {:?} of {} factors",
            perm, n
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::DimensionMismatch(format!("invalid permutation {:?}", perm)));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Reorders the tensor factors of a square operator: factor `k` of the result
/// is factor `perm[k]` of the input.
pub fn permute_factors(m: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    check_square_dims(m, dims)?;
    check_perm(dims.len(), perm)?;
    let map = permutation_map(dims, perm);
    let n = m.rows();
    let mut out = CMatrix::zeros(n, n);
    for (i, &mi) in map.iter().enumerate() {
        for (j, &mj) in map.iter().enumerate() {
            out.data[i * n + j] = m.data[mi * n + mj];
        }
    }
    Ok(out)
}

/// Reorders the tensor factors of a ket.
pub fn permute_ket(v: &Ket, dims: &[usize], perm: &[usize]) -> Result<Ket> {
    let total: usize = dims.iter().product();
    if v.dim() != total {
        return Err(Error::DimensionMismatch(format!(
            "ket of dim {} with factor dims {:?}",
            v.dim(),
            dims
        )));
    }
    check_perm(dims.len(), perm)?;
    let map = permutation_map(dims, perm);
    Ok(Ket::new(map.iter().map(|&k| v.amps[k]).collect()))
}

/// Traces out every factor not listed in `keep`. Kept factors stay in their
/// original relative order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_square_dims(m, dims)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "keep {:?} out of range for {} factors",
            keep,
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let perm: Vec<usize> = kept.iter().chain(&traced).copied().collect();
    let dk: usize = kept.iter().map(|&k| dims[k]).product();
    let dt: usize = traced.iter().map(|&k| dims[k]).product();
    let map = permutation_map(dims, &perm);
    let n = m.rows();
    let mut out = CMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut s = ZERO;
            for t in 0..dt {
                s += m.data[map[a * dt + t] * n + map[b * dt + t]];
            }
            out.data[a * dk + b] = s;
        }
    }
    Ok(out)
}

/// Transposes the named factor in the computational basis.
pub fn partial_transpose(m: &CMatrix, dims: &[usize], factor: usize) -> Result<CMatrix> {
    partial_transpose_many(m, dims, &[factor])
}

/// Transposes every listed factor.
pub fn partial_transpose_many(m: &CMatrix, dims: &[usize], factors: &[usize]) -> Result<CMatrix> {
    check_square_dims(m, dims)?;
    if factors.iter().any(|&f| f >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "factor {:?} out of range for {} factors",
            factors,
            dims.len()
        )));
    }
    let st = strides(dims);
    let n = m.rows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (mut ii, mut jj) = (i, j);
            for &f in factors {
                let di = (i / st[f]) % dims[f];
                let dj = (j / st[f]) % dims[f];
                ii = ii - di * st[f] + dj * st[f];
                jj = jj - dj * st[f] + di * st[f];
            }
            out.data[ii * n + jj] = m.data[i * n + j];
        }
    }
    Ok(out)
}

/// Zeroes all coherences on one factor (computational-basis dephasing
/// conjugation `Σ_k P_k M P_k`).
pub fn dephase_factor(m: &CMatrix, dims: &[usize], factor: usize) -> Result<CMatrix> {
    check_square_dims(m, dims)?;
    if factor >= dims.len() {
        return Err(Error::DimensionMismatch(format!("factor {} out of range", factor)));
    }
    let st = strides(dims);
    let n = m.rows();
    let mut out = m.clone();
    for i in 0..n {
        for j in 0..n {
            if (i / st[factor]) % dims[factor] != (j / st[factor]) % dims[factor] {
                out.data[i * n + j] = ZERO;
            }
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending with
/// matching orthonormal eigenvectors.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, Vec<Ket>)> {
    let deviation = m.hermiticity_deviation();
    let scale = m.data.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if deviation > 1e-10 * scale {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    // symmetrize so the solver sees an exactly Hermitian input
    let herm = CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let eig = herm.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| Ket::new(eig.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    Ok((values, vectors))
}

/// Rebuilds `V Λ V†` from an eigendecomposition.
pub fn reconstruct(values: &[f64], vectors: &[Ket]) -> CMatrix {
    let n = vectors.first().map_or(0, |v| v.dim());
    let mut out = CMatrix::zeros(n, n);
    for (&lam, v) in values.iter().zip(vectors) {
        out = &out + &v.projector().scale_real(lam);
    }
    out
}

/// Unnormalized maximally entangled ket `|Ω_d⟩ = Σ_i |ii⟩`.
pub fn omega(d: usize) -> Ket {
    let mut amps = vec![ZERO; d * d];
    for i in 0..d {
        amps[i * d + i] = ONE;
    }
    Ket::new(amps)
}

/// Generalized Pauli shift `X|j⟩ = |j+1 mod d⟩`.
pub fn shift(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { ONE } else { ZERO })
}

/// Generalized Pauli clock `Z|j⟩ = ω^j |j⟩`.
pub fn clock(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if i == j { root_of_unity(d, i) } else { ZERO })
}

/// `exp(2πi k/d)`, exact at multiples of a quarter turn.
pub fn root_of_unity(d: usize, k: usize) -> C64 {
    let k = k % d;
    if (4 * k).is_multiple_of(d) {
        return [ONE, I, -ONE, -I][4 * k / d];
    }
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64)
}

/// Heisenberg–Weyl unitary `W_k = X^p Z^q` with `k = d·p + q`.
pub fn weyl(d: usize, k: usize) -> CMatrix {
    assert!(k < d * d);
    let (p, q) = (k / d, k % d);
    let x = matrix_power(&shift(d), p);
    let z = matrix_power(&clock(d), q);
    x.matmul(&z)
}

fn matrix_power(m: &CMatrix, e: usize) -> CMatrix {
    (0..e).fold(CMatrix::identity(m.rows()), |acc, _| acc.matmul(m))
}

/// Pauli matrix `σ_k` for `k ∈ {1, 2, 3}`; `σ_0` is the identity.
pub fn pauli(k: usize) -> CMatrix {
    match k {
        0 => CMatrix::identity(2),
        1 => CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        2 => CMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
        3 => CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
        _ => panic!("no Pauli matrix with index {}", k),
    }
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_real_rows(&[&[h, h], &[h, -h]])
}

/// Bell states on two qubits, indexed `(φ⁺, φ⁻, ψ⁺, ψ⁻)`.
pub fn bell_state(index: usize) -> Ket {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match index {
        0 => Ket::from_real(&[h, 0.0, 0.0, h]),
        1 => Ket::from_real(&[h, 0.0, 0.0, -h]),
        2 => Ket::from_real(&[0.0, h, h, 0.0]),
        3 => Ket::from_real(&[0.0, h, -h, 0.0]),
        _ => panic!("no Bell state with index {}", index),
    }
}

pub fn phi_plus() -> Ket {
    bell_state(0)
}

pub fn psi_plus() -> Ket {
    bell_state(2)
}

/// `|k⟩⟨k|` in dimension `d`.
pub fn basis_projector(d: usize, k: usize) -> CMatrix {
    Ket::basis(d, k).projector()
}

/// `½‖A − B‖₁` for Hermitian `A`, `B`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let (vals, _) = eigh(&(a - b))?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        a.max_abs_diff(b) < tol
    }

    #[test]
    fn tensor_identities_and_bit_flip() {
        let id4 = tensor(&CMatrix::identity(2), &CMatrix::identity(2));
        assert_eq!(id4, CMatrix::identity(4));
        let xx = tensor(&pauli(1), &pauli(1));
        let out = xx.apply(&Ket::basis(4, 0));
        assert_eq!(out, Ket::basis(4, 3));
    }

    #[test]
    fn tensor_bell_projector_trace() {
        let m = tensor(&phi_plus().projector(), &CMatrix::identity(2));
        assert!((m.trace() - r(2.0)).norm() < 1e-15);
    }

    #[test]
    fn tensor_left_factor_is_slow() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = CMatrix::identity(2);
        let m = tensor(&a, &b);
        assert_eq!(m[(0, 2)], r(2.0));
        assert_eq!(m[(1, 3)], r(2.0));
        assert_eq!(m[(0, 1)], ZERO);
    }

    #[test]
    fn partial_trace_examples() {
        let rho = phi_plus().projector();
        let a = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert!(approx_eq(&a, &CMatrix::identity(2).scale_real(0.5), 1e-15));

        let r1 = CMatrix::from_real_rows(&[&[0.7, 0.1], &[0.1, 0.3]]);
        let s = CMatrix::from_rows(&[
            &[r(0.2), c(0.0, 0.1), ZERO],
            &[c(0.0, -0.1), r(0.5), ZERO],
            &[ZERO, ZERO, r(0.3)],
        ]);
        let prod = tensor(&r1.scale_real(2.0), &s);
        let b = partial_trace(&prod, &[2, 3], &[1]).unwrap();
        assert!(approx_eq(&b, &s.scale_real(2.0), 1e-14));

        let full = partial_trace(&prod, &[2, 3], &[]).unwrap();
        assert_eq!((full.rows(), full.cols()), (1, 1));
        assert!((full[(0, 0)] - prod.trace()).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = CMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(partial_transpose(&m, &[3], 0).is_err());
    }

    #[test]
    fn partial_transpose_examples() {
        let rho = CMatrix::from_rows(&[&[r(0.6), c(0.1, 0.2)], &[c(0.1, -0.2), r(0.4)]]);
        let sigma = CMatrix::from_rows(&[&[r(0.5), c(0.0, 0.3)], &[c(0.0, -0.3), r(0.5)]]);
        let pt = partial_transpose(&tensor(&rho, &sigma), &[2, 2], 1).unwrap();
        assert!(approx_eq(&pt, &tensor(&rho, &sigma.transpose()), 1e-15));

        let bell = phi_plus().projector();
        let ptb = partial_transpose(&bell, &[2, 2], 1).unwrap();
        let (vals, _) = eigh(&ptb).unwrap();
        assert!((vals[0] + 0.5).abs() < 1e-12);

        let twice = partial_transpose(&ptb, &[2, 2], 1).unwrap();
        assert_eq!(twice, bell);
    }

    #[test]
    fn eigh_examples() {
        let (v, _) = eigh(&pauli(3)).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        let (v, _) = eigh(&CMatrix::identity(5)).unwrap();
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-14));
        let (v, vecs) = eigh(&phi_plus().projector()).unwrap();
        for (got, want) in v.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!(reconstruct(&v, &vecs).max_abs_diff(&phi_plus().projector()) < 1e-13);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn weyl_operators_are_unitary_and_orthogonal() {
        for d in 2..=4 {
            for k in 0..d * d {
                assert!(weyl(d, k).unitarity_deviation() < 1e-12);
                for l in 0..d * d {
                    let t = weyl(d, k).adjoint().matmul(&weyl(d, l)).trace();
                    let want = if k == l { d as f64 } else { 0.0 };
                    assert!((t - r(want)).norm() < 1e-12);
                }
            }
        }
        assert_eq!(weyl(2, 2), pauli(1));
        assert_eq!(weyl(2, 1), pauli(3));
    }

    #[test]
    fn permute_factors_swaps() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = CMatrix::from_real_rows(&[&[5.0, 6.0, 7.0], &[8.0, 9.0, 1.0], &[2.0, 3.0, 4.0]]);
        let ab = tensor(&a, &b);
        let ba = permute_factors(&ab, &[2, 3], &[1, 0]).unwrap();
        assert_eq!(ba, tensor(&b, &a));
        let v = Ket::from_real(&[1.0, 2.0]).tensor(&Ket::from_real(&[3.0, 4.0, 5.0]));
        let w = permute_ket(&v, &[2, 3], &[1, 0]).unwrap();
        assert_eq!(w, Ket::from_real(&[3.0, 4.0, 5.0]).tensor(&Ket::from_real(&[1.0, 2.0])));
    }

    #[test]
    fn dephase_factor_removes_coherence() {
        let plus = Ket::from_real(&[1.0, 1.0]).normalized();
        let m = tensor(&plus.projector(), &plus.projector());
        let d = dephase_factor(&m, &[2, 2], 0).unwrap();
        let want = tensor(&CMatrix::identity(2).scale_real(0.5), &plus.projector());
        assert!(approx_eq(&d, &want, 1e-15));
    }
}
