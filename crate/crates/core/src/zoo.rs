//! Named example resources: boxes, ensemble preparations, assemblages and
//! fully quantum nonsignaling channels.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::channel::{validate, Channel};
use crate::error::{Error, Result};
use crate::linalg::{
    bell_state, hadamard, pauli, r, tensor, tensor_all, basis_projector, CMatrix, Ket, ZERO,
};
use crate::types::{GlobalType, SystemKind, SystemType};

/// Stable identifiers of the zoo channels.
pub const ZOO_NAMES: [&str; 6] = ["pr", "phhh", "shsa", "bgnp", "dfp", "bennett"];

/// Mixing weight of the ensemble-preparation branch in the reference DFP
/// channel.
pub const DFP_ALPHA: f64 = 1.0 / 6.0;

/// Conditional distribution `p(ab|xy)` of a classical resource.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDistribution {
    nx: usize,
    ny: usize,
    na: usize,
    nb: usize,
    /// Flattened with index `((a·nb + b)·nx + x)·ny + y`.
    table: Vec<f64>,
}

/// Tolerance for normalization and nonsignaling of box tables.
pub const BOX_TOL: f64 = 1e-12;

impl BoxDistribution {
    /// Builds a box from `p(a, b, x, y)`, checking normalization,
    /// nonnegativity and nonsignaling.
    pub fn from_fn(nx: usize, ny: usize, na: usize, nb: usize, p: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut table = vec![0.0; na * nb * nx * ny];
        for a in 0..na {
            for b in 0..nb {
                for x in 0..nx {
                    for y in 0..ny {
                        table[((a * nb + b) * nx + x) * ny + y] = p(a, b, x, y);
                    }
                }
            }
        }
        BoxDistribution::new(nx, ny, na, nb, table)
    }

    pub fn new(nx: usize, ny: usize, na: usize, nb: usize, table: Vec<f64>) -> Result<Self> {
        if [nx, ny, na, nb].contains(&0) || table.len() != na * nb * nx * ny {
            return Err(Error::DimensionMismatch(format!(
                "box table of length {} for alphabets |X|={} |Y|={} |A|={} |B|={}",
                table.len(),
                nx,
                ny,
                na,
                nb
            )));
        }
        let d = BoxDistribution { nx, ny, na, nb, table };
        if let Some(&neg) = d.table.iter().find(|&&p| p < -BOX_TOL || !p.is_finite()) {
            return Err(Error::Invariant {
                quantity: "negative probability".into(),
                value: -neg,
                tol: BOX_TOL,
            });
        }
        for x in 0..nx {
            for y in 0..ny {
                let s: f64 = (0..na)
                    .flat_map(|a| (0..nb).map(move |b| (a, b)))
                    .map(|(a, b)| d.p(a, b, x, y))
                    .sum();
                if (s - 1.0).abs() > BOX_TOL {
                    return Err(Error::Invariant {
                        quantity: format!("normalization defect at x={} y={}", x, y),
                        value: (s - 1.0).abs(),
                        tol: BOX_TOL,
                    });
                }
            }
        }
        let dev = d.signaling_deviation();
        if dev > BOX_TOL {
            return Err(Error::Invariant {
                quantity: "box signaling deviation".into(),
                value: dev,
                tol: BOX_TOL,
            });
        }
        Ok(d)
    }

    /// Uniformly random outputs.
    pub fn uniform(nx: usize, ny: usize, na: usize, nb: usize) -> Self {
        let v = 1.0 / (na * nb) as f64;
        BoxDistribution::from_fn(nx, ny, na, nb, |_, _, _, _| v).expect("uniform box")
    }

    /// Deterministic local box `a = f(x)`, `b = g(y)`.
    pub fn deterministic(na: usize, nb: usize, f: &[usize], g: &[usize]) -> Result<Self> {
        BoxDistribution::from_fn(f.len(), g.len(), na, nb, |a, b, x, y| {
            if f[x] == a && g[y] == b {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn pr() -> Self {
        BoxDistribution::from_fn(2, 2, 2, 2, |a, b, x, y| if a ^ b == x & y { 0.5 } else { 0.0 })
            .expect("PR box")
    }

    /// `v·PR + (1−v)·uniform`.
    pub fn isotropic(v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange(format!("visibility {}", v)));
        }
        let pr = BoxDistribution::pr();
        BoxDistribution::from_fn(2, 2, 2, 2, |a, b, x, y| v * pr.p(a, b, x, y) + (1.0 - v) * 0.25)
    }

    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.table[((a * self.nb + b) * self.nx + x) * self.ny + y]
    }

    /// Alphabet sizes `(|X|, |Y|, |A|, |B|)`.
    pub fn sizes(&self) -> (usize, usize, usize, usize) {
        (self.nx, self.ny, self.na, self.nb)
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Largest dependence of either marginal on the other party's input.
    pub fn signaling_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for x in 0..self.nx {
            for a in 0..self.na {
                let m0: f64 = (0..self.nb).map(|b| self.p(a, b, x, 0)).sum();
                for y in 1..self.ny {
                    let m: f64 = (0..self.nb).map(|b| self.p(a, b, x, y)).sum();
                    dev = dev.max((m - m0).abs());
                }
            }
        }
        for y in 0..self.ny {
            for b in 0..self.nb {
                let m0: f64 = (0..self.na).map(|a| self.p(a, b, 0, y)).sum();
                for x in 1..self.nx {
                    let m: f64 = (0..self.na).map(|a| self.p(a, b, x, y)).sum();
                    dev = dev.max((m - m0).abs());
                }
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &BoxDistribution) -> f64 {
        assert_eq!(self.sizes(), other.sizes());
        self.table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn gtype(&self) -> GlobalType {
        let w = |n: usize| {
            if n == 1 {
                SystemType::trivial()
            } else {
                SystemType::classical(n)
            }
        };
        GlobalType::new(w(self.nx), w(self.ny), w(self.na), w(self.nb))
    }
}

/// Classical channel whose Choi matrix is the diagonal table `p(ab|xy)`.
pub fn box_from_distribution(d: &BoxDistribution) -> Channel {
    let diag: Vec<_> = d.table.iter().map(|&p| r(p)).collect();
    Channel::from_choi(d.gtype(), CMatrix::diagonal(&diag)).expect("valid box is a valid channel")
}

/// Reads `p(ab|xy)` off the Choi diagonal of a channel whose wires are all
/// classical (or trivial).
pub fn distribution_from_box(ch: &Channel) -> Result<BoxDistribution> {
    let g = ch.gtype();
    for (name, w) in [("x", g.x), ("y", g.y), ("a", g.a), ("b", g.b)] {
        if w.is_quantum() {
            return Err(Error::TypeMismatch(format!(
                "wire {} is quantum; a box needs classical wires ({})",
                name, g
            )));
        }
    }
    let n = g.choi_dim();
    let table = (0..n).map(|i| ch.choi()[(i, i)].re).collect();
    BoxDistribution::new(g.x.dim(), g.y.dim(), g.a.dim(), g.b.dim(), table)
}

/// The Popescu–Rohrlich box: `p(ab|xy) = 1/2` iff `a ⊕ b = xy`.
pub fn pr_box() -> Channel {
    box_from_distribution(&BoxDistribution::pr())
}

/// `|x⟩⟨x|` on a classical wire.
fn diag_proj(d: usize, k: usize) -> CMatrix {
    basis_projector(d, k)
}

/// Ensemble preparation of type CC→QQ: `|φ⁺⟩` when `xy = 0`, `|ψ⁺⟩` when
/// `xy = 1`.
pub fn phhh() -> Channel {
    let c2 = SystemType::classical(2);
    let q2 = SystemType::quantum(2);
    let g = GlobalType::new(c2, c2, q2, q2);
    let mut choi = CMatrix::zeros(16, 16);
    for x in 0..2 {
        for y in 0..2 {
            let out = if x & y == 0 { bell_state(0) } else { bell_state(2) };
            let term = tensor_all(&[&out.projector(), &diag_proj(2, x), &diag_proj(2, y)]);
            choi = &choi + &term;
        }
    }
    Channel::from_choi(g, choi).expect("PHHH channel")
}

/// `ρ_{a|xy} = ¼ (I + (−1)^a σ_{x+1})^{T^y}` for `x ∈ {0,1,2}`, `a, y ∈ {0,1}`.
pub fn shsa_state(a: usize, x: usize, y: usize) -> CMatrix {
    assert!(a < 2 && x < 3 && y < 2);
    let sign = if a == 0 { 1.0 } else { -1.0 };
    let m = (&CMatrix::identity(2) + &pauli(x + 1).scale_real(sign)).scale_real(0.25);
    if y == 1 {
        m.transpose()
    } else {
        m
    }
}

/// Bob-with-input steering assemblage of type CC→CQ (|X| = 3, |Y| = 2,
/// |A| = 2, Bob's output a qubit).
pub fn shsa() -> Channel {
    let g = GlobalType::new(
        SystemType::classical(3),
        SystemType::classical(2),
        SystemType::classical(2),
        SystemType::quantum(2),
    );
    let mut choi = CMatrix::zeros(g.choi_dim(), g.choi_dim());
    for x in 0..3 {
        for y in 0..2 {
            for a in 0..2 {
                let term = tensor_all(&[
                    &diag_proj(2, a),
                    &shsa_state(a, x, y),
                    &diag_proj(3, x),
                    &diag_proj(2, y),
                ]);
                choi = &choi + &term;
            }
        }
    }
    Channel::from_choi(g, choi).expect("SHSA assemblage")
}

/// Which two-dimensional block of a four-level system: `f` = span{|0⟩,|1⟩},
/// `s` = span{|2⟩,|3⟩}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    F,
    S,
}

impl Block {
    fn offset(self) -> usize {
        match self {
            Block::F => 0,
            Block::S => 2,
        }
    }
}

/// Embeds a two-qubit ket into the (Alice block, Bob block) subspace of two
/// four-level systems.
pub fn embed_blocks(two_qubit: &Ket, alice: Block, bob: Block) -> Ket {
    assert_eq!(two_qubit.dim(), 4);
    let mut amps = vec![ZERO; 16];
    for i in 0..2 {
        for j in 0..2 {
            amps[(alice.offset() + i) * 4 + bob.offset() + j] = two_qubit.amplitudes()[i * 2 + j];
        }
    }
    Ket::new(amps)
}

/// The 16 states of the twisted basis: Bell states on the ff, fs, sf blocks
/// and `(I ⊗ U_B)`-rotated Bell states on the ss block. Order: blocks ff, fs,
/// sf, ss; within a block φ⁺, φ⁻, ψ⁺, ψ⁻.
pub fn bgnp_basis(u_b: &CMatrix) -> Result<Vec<Ket>> {
    if u_b.rows() != 2 || u_b.cols() != 2 {
        return Err(Error::DimensionMismatch("U_B must be 2x2".into()));
    }
    u_b.require_unitary(1e-10)?;
    let rot = tensor(&CMatrix::identity(2), u_b);
    let mut basis = Vec::with_capacity(16);
    for (ba, bb) in [(Block::F, Block::F), (Block::F, Block::S), (Block::S, Block::F), (Block::S, Block::S)] {
        for k in 0..4 {
            let bell = bell_state(k);
            let v = if (ba, bb) == (Block::S, Block::S) {
                rot.apply(&bell)
            } else {
                bell
            };
            basis.push(embed_blocks(&v, ba, bb));
        }
    }
    Ok(basis)
}

/// Channel of type QQ→QQ (all dims 4) that fully dephases in the twisted
/// basis defined by `u_b`.
pub fn bgnp(u_b: &CMatrix) -> Result<Channel> {
    let q4 = SystemType::quantum(4);
    let g = GlobalType::new(q4, q4, q4, q4);
    let kraus: Vec<CMatrix> = bgnp_basis(u_b)?.iter().map(|v| v.projector()).collect();
    Channel::from_kraus(g, &kraus)
}

/// BGNP channel with the default `U_B` = Hadamard.
pub fn bgnp_default() -> Channel {
    bgnp(&hadamard()).expect("Hadamard is unitary")
}

/// Kraus operators of the DFP channel.
///
/// A control register `√(1−α)|00⟩ + √α|11⟩` (one qubit per party) selects
/// between transmitting both input qubits unchanged (control 00) and
/// measuring both inputs in the σ₃ basis, preparing `|φ⁺⟩` on the data
/// outputs and applying σ₁ to Alice's data qubit when both outcomes and the
/// control are 1 (control 11). The measured inputs (or, in the 00 branch,
/// blank measurement slots) and the spare Bell pair (or blank slots) form
/// the environment, so the two branches interfere only where their
/// environments overlap. Each party's output is `(control, data)`.
pub fn dfp_kraus(alpha: f64) -> Result<Vec<CMatrix>> {
    if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(Error::OutOfRange(format!("DFP alpha {} not in [0, 1]", alpha)));
    }
    let w0 = (1.0 - alpha).sqrt();
    let w1 = alpha.sqrt();
    // out index ((cA·2 + dA)·2 + cB)·2 + dB; env index ((mA·2 + mB)·2 + pA)·2 + pB
    let out_idx = |ca: usize, da: usize, cb: usize, db: usize| ((ca * 2 + da) * 2 + cb) * 2 + db;
    let env_idx = |ma: usize, mb: usize, pa: usize, pb: usize| ((ma * 2 + mb) * 2 + pa) * 2 + pb;
    let mut kraus = vec![CMatrix::zeros(16, 4); 16];
    for x in 0..2 {
        for y in 0..2 {
            let input = x * 2 + y;
            // identity branch: environment = blank measurement record, spare |φ⁺⟩
            for p in 0..2 {
                kraus[env_idx(0, 0, p, p)][(out_idx(0, x, 0, y), input)] += r(w0 * FRAC_1_SQRT_2);
            }
            // measure-and-prepare branch: environment = record (x, y), blank spare slots
            let prepared = if x & y == 1 { bell_state(2) } else { bell_state(0) };
            for da in 0..2 {
                for db in 0..2 {
                    let amp = prepared.amplitudes()[da * 2 + db];
                    if amp != ZERO {
                        kraus[env_idx(x, y, 0, 0)][(out_idx(1, da, 1, db), input)] += amp * w1;
                    }
                }
            }
        }
    }
    Ok(kraus)
}

/// DFP channel of type QQ→QQ: qubit inputs, each output a (control, data)
/// pair of qubits (dim 4).
pub fn dfp(alpha: f64) -> Result<Channel> {
    let g = GlobalType::new(
        SystemType::quantum(2),
        SystemType::quantum(2),
        SystemType::quantum(4),
        SystemType::quantum(4),
    );
    let kraus: Vec<CMatrix> = dfp_kraus(alpha)?
        .into_iter()
        .filter(|k| k.frobenius_norm() > 0.0)
        .collect();
    Channel::from_kraus(g, &kraus)
}

/// Unnormalized product states `|α_i⟩ ⊗ |β_i⟩` of the two-qutrit product
/// basis, as `(α_i, β_i)` pairs.
pub fn bennett_factors() -> Vec<(Ket, Ket)> {
    let k = |v: [f64; 3]| Ket::from_real(&v);
    vec![
        (k([0.0, 1.0, 0.0]), k([0.0, 1.0, 0.0])),
        (k([1.0, 0.0, 0.0]), k([1.0, 1.0, 0.0])),
        (k([1.0, 0.0, 0.0]), k([1.0, -1.0, 0.0])),
        (k([0.0, 0.0, 1.0]), k([0.0, 1.0, 1.0])),
        (k([0.0, 0.0, 1.0]), k([0.0, 1.0, -1.0])),
        (k([0.0, 1.0, 1.0]), k([1.0, 0.0, 0.0])),
        (k([0.0, 1.0, -1.0]), k([1.0, 0.0, 0.0])),
        (k([1.0, 1.0, 0.0]), k([0.0, 0.0, 1.0])),
        (k([1.0, -1.0, 0.0]), k([0.0, 0.0, 1.0])),
    ]
}

/// The nine normalized product states.
pub fn bennett_basis() -> Vec<Ket> {
    bennett_factors()
        .iter()
        .map(|(a, b)| a.tensor(b).normalized())
        .collect()
}

pub fn bennett_type() -> GlobalType {
    let q3 = SystemType::quantum(3);
    GlobalType::new(q3, q3, q3, q3)
}

/// Choi matrix of dephasing in the two-qutrit product basis, without any
/// validation.
pub fn bennett_choi() -> CMatrix {
    let kraus: Vec<CMatrix> = bennett_basis().iter().map(|v| v.projector()).collect();
    crate::process::Process::from_kraus(&[("a", 3), ("b", 3)], &[("x", 3), ("y", 3)], &kraus)
        .expect("dims")
        .into_choi()
}

/// Dephasing in the two-qutrit product basis as a validated channel.
///
/// This map is signaling (Alice's choice between `|0⟩` and `|1⟩` switches
/// Bob's effective measurement basis), so validation rejects it and the
/// error reports the signaling deviation. [`bennett_choi`] gives the raw map.
pub fn bennett() -> Result<Channel> {
    Channel::from_choi(bennett_type(), bennett_choi())
}

/// Parses a single-qubit unitary by name: `hadamard`/`h`, `identity`/`i`,
/// `x`, `y`, `z`, or `phase:<radians>`.
pub fn parse_unitary(spec: &str) -> Result<CMatrix> {
    let s = spec.trim().to_ascii_lowercase();
    match s.as_str() {
        "hadamard" | "h" => Ok(hadamard()),
        "identity" | "i" | "id" => Ok(CMatrix::identity(2)),
        "x" => Ok(pauli(1)),
        "y" => Ok(pauli(2)),
        "z" => Ok(pauli(3)),
        _ => {
            if let Some(t) = s.strip_prefix("phase:") {
                let theta: f64 = t
                    .parse()
                    .map_err(|_| Error::Unknown(format!("phase angle '{}'", t)))?;
                Ok(CMatrix::diagonal(&[r(1.0), num_complex::Complex64::from_polar(1.0, theta)]))
            } else {
                Err(Error::Unknown(format!("unitary '{}'", spec)))
            }
        }
    }
}

/// Parameters accepted by [`named`].
#[derive(Clone, Debug, Default)]
pub struct ZooParams {
    pub ub: Option<String>,
    pub alpha: Option<f64>,
}

impl ZooParams {
    /// Parses `k=v` pairs (`ub=...`, `alpha=...`).
    pub fn parse(pairs: &[String]) -> Result<Self> {
        let mut p = ZooParams::default();
        for kv in pairs {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Unknown(format!("parameter '{}' (expected k=v)", kv)))?;
            match k.trim() {
                "ub" | "u_b" => p.ub = Some(v.trim().to_string()),
                "alpha" => {
                    p.alpha = Some(
                        parse_fraction(v.trim())
                            .ok_or_else(|| Error::Unknown(format!("alpha value '{}'", v)))?,
                    )
                }
                other => return Err(Error::Unknown(format!("parameter '{}'", other))),
            }
        }
        Ok(p)
    }
}

/// Parses a decimal or `p/q` fraction.
pub fn parse_fraction(s: &str) -> Option<f64> {
    if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().ok()?;
        let d: f64 = d.trim().parse().ok()?;
        Some(n / d)
    } else {
        s.parse().ok()
    }
}

/// Constructs a zoo channel by identifier. Also accepts the auxiliary boxes
/// `uniform` (uniform CC→CC box) and `isotropic` (with `alpha` as visibility).
pub fn named(name: &str, params: &ZooParams) -> Result<Channel> {
    match name {
        "pr" => Ok(pr_box()),
        "phhh" => Ok(phhh()),
        "shsa" => Ok(shsa()),
        "bgnp" => {
            let u = parse_unitary(params.ub.as_deref().unwrap_or("hadamard"))?;
            bgnp(&u)
        }
        "dfp" => dfp(params.alpha.unwrap_or(DFP_ALPHA)),
        "bennett" => bennett(),
        "uniform" => Ok(box_from_distribution(&BoxDistribution::uniform(2, 2, 2, 2))),
        "isotropic" => Ok(box_from_distribution(&BoxDistribution::isotropic(
            params.alpha.unwrap_or(1.0),
        )?)),
        _ => Err(Error::Unknown(format!("zoo channel '{}'", name))),
    }
}

/// Global type and raw Choi matrix by identifier, bypassing validation (used
/// to inspect maps such as the Bennett dephasing that fail it).
pub fn named_raw(name: &str, params: &ZooParams) -> Result<(GlobalType, CMatrix)> {
    match name {
        "bennett" => Ok((bennett_type(), bennett_choi())),
        _ => named(name, params).map(|ch| (*ch.gtype(), ch.into_choi())),
    }
}

/// Diagnostic summary for a zoo identifier.
pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "pr" => "PR box, CC->CC, p(ab|xy) = 1/2 iff a xor b = xy",
        "phhh" => "PHHH ensemble preparation, CC->QQ, outputs phi+ (xy=0) or psi+ (xy=1)",
        "shsa" => "SHSA Bob-with-input assemblage, CC->CQ, |X|=3",
        "bgnp" => "BGNP twisted-basis dephasing, QQ->QQ dims 4 (param ub, default hadamard)",
        "dfp" => "DFP coherent identity/PHHH mixture, QQ->QQ, outputs (control, data) (param alpha, default 1/6)",
        "bennett" => "dephasing in the two-qutrit product basis, QQ->QQ dims 3 (fails nonsignaling)",
        "uniform" => "uniform CC->CC box (auxiliary)",
        "isotropic" => "isotropic CC->CC box v*PR + (1-v)*uniform (auxiliary, param alpha = v)",
        _ => return None,
    })
}

/// Kinds check used by tests and diagnostics.
pub fn kinds(g: &GlobalType) -> [SystemKind; 4] {
    [g.x.kind(), g.y.kind(), g.a.kind(), g.b.kind()]
}

/// Validation report for the raw Bennett map.
pub fn bennett_report() -> crate::channel::ValidationReport {
    validate(&bennett_type(), &bennett_choi()).expect("dims")
}
