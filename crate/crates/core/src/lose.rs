//! Local operations with shared entanglement, as executable combs.
//!
//! A [`LocalComb`] is a pair of process fragments around one party's share of
//! a resource:
//!
//! ```text
//!   in ─┐            ┌─ res_in ──▶ [resource] ── res_out ─┐          ┌─ out
//!       ├── pre ─────┤                                    ├── post ──┤
//!  ent ─┘            └─ mem ──────────────────────────────┘
//! ```
//!
//! A [`LoseOp`] pairs one comb per party with a shared state on the two `ent`
//! wires. Applying it links all fragments with the resource's Choi operator.

use crate::channel::{classical_deviation, Channel, CLASSICAL_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    omega, permute_factors, r, tensor, weyl, basis_projector, CMatrix, Ket, ONE, ZERO,
};
use crate::process::{Dir, Process, Wire};
use crate::types::{GlobalType, Party, SystemKind, SystemType, WireRole};

/// Tolerance for the CPTP check of comb fragments.
pub const COMB_TOL: f64 = 1e-10;

fn classical_or_trivial(d: usize) -> SystemType {
    if d == 1 {
        SystemType::trivial()
    } else {
        SystemType::classical(d)
    }
}

/// One party's local comb.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalComb {
    input: SystemType,
    output: SystemType,
    /// Wires `in`, `ent` → `res_in`, `mem`.
    pre: Process,
    /// Wires `res_out`, `mem` → `out`.
    post: Process,
}

fn expect_wires(p: &Process, which: &str, want: &[(&str, Dir)]) -> Result<()> {
    let ok = p.wires().len() == want.len()
        && want
            .iter()
            .all(|(n, d)| p.wire(n).map(|w| w.dir == *d).unwrap_or(false));
    if ok {
        Ok(())
    } else {
        let got: Vec<String> = p
            .wires()
            .iter()
            .map(|w| format!("{}({:?},{})", w.name, w.dir, w.dim))
            .collect();
        Err(Error::Wire(format!("{} fragment has wires [{}]", which, got.join(", "))))
    }
}

impl LocalComb {
    pub fn new(input: SystemType, output: SystemType, pre: Process, post: Process) -> Result<Self> {
        expect_wires(&pre, "pre", &[("in", Dir::In), ("ent", Dir::In), ("res_in", Dir::Out), ("mem", Dir::Out)])?;
        expect_wires(&post, "post", &[("res_out", Dir::In), ("mem", Dir::In), ("out", Dir::Out)])?;
        let dim = |p: &Process, n: &str| p.wire(n).unwrap().dim;
        if dim(&pre, "in") != input.dim() || dim(&post, "out") != output.dim() {
            return Err(Error::DimensionMismatch(format!(
                "comb wires in={} out={} vs declared types {} -> {}",
                dim(&pre, "in"),
                dim(&post, "out"),
                input,
                output
            )));
        }
        if dim(&pre, "mem") != dim(&post, "mem") {
            return Err(Error::DimensionMismatch(format!(
                "side memory dim {} (pre) vs {} (post)",
                dim(&pre, "mem"),
                dim(&post, "mem")
            )));
        }
        pre.check_cptp(COMB_TOL)?;
        post.check_cptp(COMB_TOL)?;
        Ok(LocalComb { input, output, pre, post })
    }

    /// Comb from Kraus operators. `pre` maps `in ⊗ ent → res_in ⊗ mem` and
    /// `post` maps `res_out ⊗ mem → out`.
    pub fn from_kraus(
        input: SystemType,
        output: SystemType,
        dims: CombDims,
        pre: &[CMatrix],
        post: &[CMatrix],
    ) -> Result<Self> {
        let pre = Process::from_kraus(
            &[("res_in", dims.res_in), ("mem", dims.mem)],
            &[("in", input.dim()), ("ent", dims.ent)],
            pre,
        )?;
        let post = Process::from_kraus(&[("out", output.dim())], &[("res_out", dims.res_out), ("mem", dims.mem)], post)?;
        LocalComb::new(input, output, pre, post)
    }

    /// Passes the party's input to the resource and the resource's output
    /// back out unchanged.
    pub fn identity(input: SystemType, output: SystemType) -> Self {
        let pre = Process::from_kraus(
            &[("res_in", input.dim()), ("mem", 1)],
            &[("in", input.dim()), ("ent", 1)],
            &[CMatrix::identity(input.dim())],
        )
        .expect("dims");
        let post = Process::from_kraus(
            &[("out", output.dim())],
            &[("res_out", output.dim()), ("mem", 1)],
            &[CMatrix::identity(output.dim())],
        )
        .expect("dims");
        LocalComb { input, output, pre, post }
    }

    /// Ignores the resource: feeds it `|0⟩`, discards its output and the
    /// party input, and prepares `rho`.
    pub fn replace(input: SystemType, output: SystemType, res_in: usize, res_out: usize, rho: &CMatrix) -> Result<Self> {
        if rho.rows() != output.dim() {
            return Err(Error::DimensionMismatch("replacement state vs output".into()));
        }
        let pre = Process::new(
            vec![
                Wire::output("res_in", res_in),
                Wire::output("mem", 1),
                Wire::input("in", input.dim()),
                Wire::input("ent", 1),
            ],
            tensor(&basis_projector(res_in, 0), &CMatrix::identity(input.dim())),
        )?;
        let post = Process::new(
            vec![Wire::output("out", output.dim()), Wire::input("res_out", res_out), Wire::input("mem", 1)],
            tensor(rho, &CMatrix::identity(res_out)),
        )?;
        LocalComb::new(input, output, pre, post)
    }

    pub fn input(&self) -> SystemType {
        self.input
    }

    pub fn output(&self) -> SystemType {
        self.output
    }

    pub fn pre(&self) -> &Process {
        &self.pre
    }

    pub fn post(&self) -> &Process {
        &self.post
    }

    pub fn dims(&self) -> CombDims {
        let d = |p: &Process, n: &str| p.wire(n).unwrap().dim;
        CombDims {
            ent: d(&self.pre, "ent"),
            res_in: d(&self.pre, "res_in"),
            mem: d(&self.pre, "mem"),
            res_out: d(&self.post, "res_out"),
        }
    }

    /// The comb that runs `self` inside `outer`: `outer`'s resource slot is
    /// filled by `self` with its own resource slot left open. Entanglement
    /// and memory wires are merged as (self, outer).
    fn nested_in(&self, outer: &LocalComb) -> Result<LocalComb> {
        let p_in = self
            .pre
            .clone()
            .rename("in", "mid_in")?
            .rename("ent", "ent1")?
            .rename("mem", "mem1")?;
        let p_out = outer
            .pre
            .clone()
            .rename("res_in", "mid_in")?
            .rename("ent", "ent2")?
            .rename("mem", "mem2")?;
        let pre = p_out
            .link(&p_in)?
            .merge(&["ent1", "ent2"], "ent")?
            .merge(&["mem1", "mem2"], "mem")?;
        let q_in = self.post.clone().rename("out", "mid_out")?.rename("mem", "mem1")?;
        let q_out = outer.post.clone().rename("res_out", "mid_out")?.rename("mem", "mem2")?;
        let post = q_in.link(&q_out)?.merge(&["mem1", "mem2"], "mem")?;
        LocalComb::new(outer.input, outer.output, pre, post)
    }
}

/// Dimensions of a comb's internal wires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CombDims {
    pub ent: usize,
    pub res_in: usize,
    pub mem: usize,
    pub res_out: usize,
}

/// A LOSE operation: a local comb per party and a shared state on
/// `(ent_A, ent_B)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoseOp {
    alice: LocalComb,
    bob: LocalComb,
    shared: CMatrix,
}

impl LoseOp {
    pub fn new(alice: LocalComb, bob: LocalComb, shared: CMatrix) -> Result<Self> {
        let n = alice.dims().ent * bob.dims().ent;
        if !shared.is_square() || shared.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "shared state {}x{} for entanglement dims {}x{}",
                shared.rows(),
                shared.cols(),
                alice.dims().ent,
                bob.dims().ent
            )));
        }
        let herm = shared.hermiticity_deviation();
        if herm > COMB_TOL {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let tr = (shared.trace() - ONE).norm();
        if tr > COMB_TOL {
            return Err(Error::Invariant {
                quantity: "shared state trace defect".into(),
                value: tr,
                tol: COMB_TOL,
            });
        }
        let min = shared.min_eigenvalue()?;
        if min < -COMB_TOL {
            return Err(Error::Invariant {
                quantity: "shared state negative eigenvalue".into(),
                value: -min,
                tol: COMB_TOL,
            });
        }
        Ok(LoseOp { alice, bob, shared })
    }

    /// Local combs with no shared entanglement.
    pub fn local(alice: LocalComb, bob: LocalComb) -> Result<Self> {
        let n = alice.dims().ent * bob.dims().ent;
        if n != 1 {
            return Err(Error::DimensionMismatch("local op with entanglement wires".into()));
        }
        LoseOp::new(alice, bob, CMatrix::identity(1))
    }

    /// Identity operation on resources of type `g`.
    pub fn identity(g: &GlobalType) -> Self {
        LoseOp {
            alice: LocalComb::identity(g.x, g.a),
            bob: LocalComb::identity(g.y, g.b),
            shared: CMatrix::identity(1),
        }
    }

    pub fn alice(&self) -> &LocalComb {
        &self.alice
    }

    pub fn bob(&self) -> &LocalComb {
        &self.bob
    }

    pub fn shared(&self) -> &CMatrix {
        &self.shared
    }

    pub fn comb(&self, party: Party) -> &LocalComb {
        match party {
            Party::Alice => &self.alice,
            Party::Bob => &self.bob,
        }
    }

    /// Type of the resources this operation produces.
    pub fn output_type(&self) -> GlobalType {
        GlobalType::new(self.alice.input, self.bob.input, self.alice.output, self.bob.output)
    }

    /// Wire dimensions `[a, b, x, y]` the operation expects of its resource.
    pub fn resource_dims(&self) -> [usize; 4] {
        let (a, b) = (self.alice.dims(), self.bob.dims());
        [a.res_out, b.res_out, a.res_in, b.res_in]
    }

    /// The operation that applies `self` and then `next`.
    pub fn then(&self, next: &LoseOp) -> Result<LoseOp> {
        let t = self.output_type();
        if t.choi_dims() != next.resource_dims() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose: first op produces {}, second expects dims {:?}",
                t,
                next.resource_dims()
            )));
        }
        let alice = self.alice.nested_in(&next.alice)?;
        let bob = self.bob.nested_in(&next.bob)?;
        // shared states on (A1, B1) ⊗ (A2, B2), reordered to (A1 A2, B1 B2)
        let (a1, b1) = (self.alice.dims().ent, self.bob.dims().ent);
        let (a2, b2) = (next.alice.dims().ent, next.bob.dims().ent);
        let joint = tensor(&self.shared, &next.shared);
        let shared = permute_factors(&joint, &[a1, b1, a2, b2], &[0, 2, 1, 3])?;
        LoseOp::new(alice, bob, shared)
    }
}

/// Applies a LOSE operation to a channel, returning the re-validated result.
pub fn apply_lose(op: &LoseOp, ch: &Channel) -> Result<Channel> {
    let want = op.resource_dims();
    let have = ch.gtype().choi_dims();
    if want != have {
        return Err(Error::DimensionMismatch(format!(
            "operation expects resource dims [a,b,x,y]={:?}, channel {} has {:?}",
            want,
            ch.gtype(),
            have
        )));
    }
    let p = link_all(op, ch)?;
    let p = p.reorder(&["A.out", "B.out", "A.in", "B.in"])?;
    Channel::from_choi(op.output_type(), p.into_choi())
}

/// Links the shared state, both combs and the resource into one process
/// with wires `A.in, B.in, A.out, B.out` (in some order).
fn link_all(op: &LoseOp, ch: &Channel) -> Result<Process> {
    let (ea, eb) = (op.alice.dims().ent, op.bob.dims().ent);
    let shared = Process::state(&[("A.ent", ea), ("B.ent", eb)], op.shared.clone())?;
    let res = resource_process(ch)?;
    shared
        .link(&op.alice.pre.clone().prefixed("A."))?
        .link(&op.bob.pre.clone().prefixed("B."))?
        .link(&res)?
        .link(&op.alice.post.clone().prefixed("A."))?
        .link(&op.bob.post.clone().prefixed("B."))
}

fn resource_process(ch: &Channel) -> Result<Process> {
    ch.to_process()
        .rename("a", "A.res_out")?
        .rename("b", "B.res_out")?
        .rename("x", "A.res_in")?
        .rename("y", "B.res_in")
}

/// The pre-fragments, shared state and resource linked together, leaving
/// the post-fragment inputs open: wires `A.res_out, A.mem, B.res_out, B.mem,
/// A.in, B.in` in that order.
pub fn resource_with_pre(op: &LoseOp, ch: &Channel) -> Result<Process> {
    if op.resource_dims() != ch.gtype().choi_dims() {
        return Err(Error::DimensionMismatch("operation vs resource dims".into()));
    }
    let (ea, eb) = (op.alice.dims().ent, op.bob.dims().ent);
    let shared = Process::state(&[("A.ent", ea), ("B.ent", eb)], op.shared.clone())?;
    shared
        .link(&op.alice.pre.clone().prefixed("A."))?
        .link(&op.bob.pre.clone().prefixed("B."))?
        .link(&resource_process(ch)?)?
        .reorder(&["A.res_out", "A.mem", "B.res_out", "B.mem", "A.in", "B.in"])
}

/// Post-fragment that measures its inputs with a POVM `{E_k}` and outputs
/// `|k⟩`. `inputs` lists the wires the POVM acts on, in tensor order.
pub fn measurement_process(out: &str, inputs: &[(&str, usize)], povm: &[CMatrix]) -> Result<Process> {
    let din: usize = inputs.iter().map(|w| w.1).product();
    let k = povm.len();
    let mut choi = CMatrix::zeros(k * din, k * din);
    for (i, e) in povm.iter().enumerate() {
        if e.rows() != din || e.cols() != din {
            return Err(Error::DimensionMismatch("POVM element vs input dims".into()));
        }
        choi = &choi + &tensor(&basis_projector(k, i), &e.transpose());
    }
    let wires = std::iter::once(Wire::output(out, k))
        .chain(inputs.iter().map(|&(n, d)| Wire::input(n, d)))
        .collect();
    Process::new(wires, choi)
}

fn measurement_comb(input: SystemType, output: SystemType, res_out: usize, pre: Process, povm: &[CMatrix]) -> Result<LocalComb> {
    let mem = pre.wire("mem").map(|w| w.dim).unwrap_or(1);
    let post = measurement_process("out", &[("res_out", res_out), ("mem", mem)], povm)?;
    LocalComb::new(input, output, pre, post)
}

/// Rank-one projectors onto the columns of a unitary.
fn basis_povm(u: &CMatrix) -> Result<Vec<CMatrix>> {
    u.require_unitary(1e-10)?;
    let d = u.rows();
    Ok((0..d)
        .map(|k| Ket::new((0..d).map(|i| u[(i, k)]).collect()).projector())
        .collect())
}

/// Comb that dephases a classical/quantum input in the computational basis
/// and measures the resource output in the basis given by the columns of
/// `basis`.
fn dephasing_comb(input: SystemType, output: SystemType, basis: &CMatrix) -> Result<LocalComb> {
    let (din, dout) = (input.dim(), output.dim());
    if basis.rows() != dout || basis.cols() != dout {
        return Err(Error::DimensionMismatch(format!(
            "basis is {}x{} for an output of dim {}",
            basis.rows(),
            basis.cols(),
            dout
        )));
    }
    let kraus: Vec<CMatrix> = (0..din).map(|k| basis_projector(din, k)).collect();
    let pre = Process::from_kraus(&[("res_in", din), ("mem", 1)], &[("in", din), ("ent", 1)], &kraus)?;
    let povm = basis_povm(basis)?;
    measurement_comb(classical_or_trivial(din), classical_or_trivial(dout), dout, pre, &povm)
}

/// Operation measuring each output in the given basis (columns of a unitary)
/// and dephasing each input in the computational basis.
pub fn dephase_op(g: &GlobalType, alice_basis: &CMatrix, bob_basis: &CMatrix) -> Result<LoseOp> {
    LoseOp::local(dephasing_comb(g.x, g.a, alice_basis)?, dephasing_comb(g.y, g.b, bob_basis)?)
}

/// Turns a channel into a box by measuring each party's output in the given
/// basis (columns of a unitary); inputs are fed computational basis states.
pub fn dephase_outputs_to_box(ch: &Channel, alice_basis: &CMatrix, bob_basis: &CMatrix) -> Result<Channel> {
    apply_lose(&dephase_op(ch.gtype(), alice_basis, bob_basis)?, ch)
}

/// [`dephase_outputs_to_box`] in the computational basis on both sides.
pub fn dephase_computational(ch: &Channel) -> Result<Channel> {
    let g = ch.gtype();
    dephase_outputs_to_box(ch, &CMatrix::identity(g.a.dim()), &CMatrix::identity(g.b.dim()))
}

/// Shares `|φ⁺⟩` and flips the shared qubit with σ₁ when the box outputs 1;
/// maps the PR box to the PHHH ensemble preparation.
pub fn pr_to_phhh() -> LoseOp {
    let c2 = SystemType::classical(2);
    let q2 = SystemType::quantum(2);
    let dims = CombDims { ent: 2, res_in: 2, mem: 2, res_out: 2 };
    // pre: |x⟩|e⟩ → |x⟩_res |e⟩_mem
    let pre = [CMatrix::identity(4)];
    // post: K_a = ⟨a|_res ⊗ σ₁^a on the memory
    let post: Vec<CMatrix> = (0..2)
        .map(|a| {
            let flip = weyl(2, 2 * a);
            CMatrix::from_fn(2, 4, |o, col| {
                let (rr, m) = (col / 2, col % 2);
                if rr == a {
                    flip[(o, m)]
                } else {
                    ZERO
                }
            })
        })
        .collect();
    let comb = LocalComb::from_kraus(c2, q2, dims, &pre, &post).expect("valid comb");
    LoseOp::new(comb.clone(), comb, crate::linalg::phi_plus().projector()).expect("valid op")
}

/// Eigenprojector of `(−1)^x σ_{x+1}` with eigenvalue `(−1)^a`.
fn steering_projector(a: usize, x: usize) -> CMatrix {
    let sign = if (a + x).is_multiple_of(2) { 1.0 } else { -1.0 };
    (&CMatrix::identity(2) + &crate::linalg::pauli(x + 1).scale_real(sign)).scale_real(0.5)
}

/// Alice maps `x ∈ {0,1,2}` to `x mod 2` and measures `(−1)^x σ_{x+1}` on
/// her output; Bob passes through. Maps PHHH to the SHSA assemblage.
pub fn phhh_to_shsa() -> LoseOp {
    let c2 = SystemType::classical(2);
    let c3 = SystemType::classical(3);
    let q2 = SystemType::quantum(2);
    // |x⟩ → |x mod 2⟩_res |x⟩_mem
    let iso = CMatrix::from_fn(6, 3, |row, x| {
        let (rr, m) = (row / 3, row % 3);
        if rr == x % 2 && m == x {
            ONE
        } else {
            ZERO
        }
    });
    let pre = Process::from_kraus(&[("res_in", 2), ("mem", 3)], &[("in", 3), ("ent", 1)], &[iso]).expect("dims");
    let povm: Vec<CMatrix> = (0..2)
        .map(|a| {
            let mut e = CMatrix::zeros(6, 6);
            for x in 0..3 {
                e = &e + &tensor(&steering_projector(a, x), &basis_projector(3, x));
            }
            e
        })
        .collect();
    let alice = measurement_comb(c3, c2, 2, pre, &povm).expect("valid comb");
    LoseOp::local(alice, LocalComb::identity(c2, q2)).expect("valid op")
}

/// Shares `√(1−α)|00⟩ + √α|11⟩` as a control pair. On control 0 a party
/// feeds 0 to the resource, stashes its input and later emits `|0⟩|input⟩`,
/// discarding the resource output; on control 1 it feeds its input to the
/// resource and emits `|1⟩|resource output⟩`. Maps PHHH to DFP(α).
pub fn phhh_to_dfp(alpha: f64) -> Result<LoseOp> {
    if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(Error::OutOfRange(format!("alpha {} not in [0, 1]", alpha)));
    }
    let q2 = SystemType::quantum(2);
    let q4 = SystemType::quantum(4);
    let dims = CombDims { ent: 2, res_in: 2, mem: 4, res_out: 2 };
    // pre: (in x, ent c) → (res_in, mem = (c, stash))
    let pre = CMatrix::from_fn(8, 4, |row, col| {
        let (x, c) = (col / 2, col % 2);
        let (rr, mc, ms) = (row / 4, (row / 2) % 2, row % 2);
        let hit = if c == 0 {
            rr == 0 && mc == 0 && ms == x
        } else {
            rr == x && mc == 1 && ms == 0
        };
        if hit {
            ONE
        } else {
            ZERO
        }
    });
    // post: (res_out r, mem (c, s)) → out (c, data), Kraus index = discarded qubit
    let post: Vec<CMatrix> = (0..2)
        .map(|e| {
            CMatrix::from_fn(4, 8, |o, col| {
                let (rr, c, s) = (col / 4, (col / 2) % 2, col % 2);
                let (oc, od) = (o / 2, o % 2);
                let hit = if c == 0 {
                    rr == e && oc == 0 && od == s
                } else {
                    s == e && oc == 1 && od == rr
                };
                if hit {
                    ONE
                } else {
                    ZERO
                }
            })
        })
        .collect();
    let comb = LocalComb::from_kraus(q2, q4, dims, &[pre], &post)?;
    let control = Ket::from_real(&[(1.0 - alpha).sqrt(), 0.0, 0.0, alpha.sqrt()]);
    LoseOp::new(comb.clone(), comb, control.projector())
}

/// Bell basis `(I ⊗ W_k)|Ω_d⟩/√d`, `k = d·p + q`.
pub fn bell_basis(d: usize) -> Vec<Ket> {
    let om = omega(d);
    (0..d * d)
        .map(|k| tensor(&CMatrix::identity(d), &weyl(d, k)).apply(&om).scale(r(1.0 / (d as f64).sqrt())))
        .collect()
}

fn party_types(g: &GlobalType, party: Party) -> (SystemType, SystemType) {
    (g.input_of(party), g.output_of(party))
}

fn with_party(op_party: Party, this: LocalComb, other: LocalComb) -> Result<LoseOp> {
    match op_party {
        Party::Alice => LoseOp::local(this, other),
        Party::Bob => LoseOp::local(other, this),
    }
}

/// Operation behind [`q_output_to_classical`] for resources of type `g`.
pub fn q_output_to_classical_op(g: &GlobalType, party: Party) -> Result<LoseOp> {
    let (inp, out) = party_types(g, party);
    if out.kind() != SystemKind::Quantum {
        return Err(Error::TypeMismatch(format!(
            "{:?}'s output is {} (must be quantum)",
            party, out
        )));
    }
    let (dx, d) = (inp.dim(), out.dim());
    // pre: (x, q) → res_in x, mem q
    let pre = Process::from_kraus(
        &[("res_in", dx), ("mem", d)],
        &[("in", dx * d), ("ent", 1)],
        &[CMatrix::identity(dx * d)],
    )?;
    let povm: Vec<CMatrix> = bell_basis(d).iter().map(|v| v.projector()).collect();
    let this = measurement_comb(SystemType::quantum(dx * d), SystemType::classical(d * d), d, pre, &povm)?;
    let (oi, oo) = party_types(g, party.other());
    with_party(party, this, LocalComb::identity(oi, oo))
}

/// Replaces one party's quantum output (dim `d`) by a Bell measurement of it
/// together with a new quantum input of dim `d`. The party's input becomes
/// `Quantum(d_in·d)` ordered (old input, new input) and its output
/// `Classical(d²)` with outcome `k` for `(I ⊗ W_k)|Ω_d⟩/√d`.
pub fn q_output_to_classical(ch: &Channel, party: Party) -> Result<Channel> {
    apply_lose(&q_output_to_classical_op(ch.gtype(), party)?, ch)
}

/// Operation behind [`teleport_left_inverse`]; `input` is the recovered
/// input type of `party`.
pub fn teleport_left_inverse_op(g: &GlobalType, party: Party, input: SystemType) -> Result<LoseOp> {
    let (merged, out) = party_types(g, party);
    let d = (out.dim() as f64).sqrt().round() as usize;
    if out.kind() != SystemKind::Classical || d * d != out.dim() || d < 2 {
        return Err(Error::TypeMismatch(format!(
            "{:?}'s output {} is not a classical Bell outcome",
            party, out
        )));
    }
    let dx = input.dim();
    if merged.dim() != dx * d {
        return Err(Error::TypeMismatch(format!(
            "{:?}'s input {} does not split as {} x {}",
            party, merged, dx, d
        )));
    }
    // pre: |x⟩ → |x⟩ ⊗ |Ω_d⟩/√d with (x, half 1) to the resource, half 2 kept
    let s = 1.0 / (d as f64).sqrt();
    let iso = CMatrix::from_fn(dx * d * d, dx, |row, col| {
        let (x, h1, h2) = (row / (d * d), (row / d) % d, row % d);
        if x == col && h1 == h2 {
            r(s)
        } else {
            ZERO
        }
    });
    let pre = Process::from_kraus(&[("res_in", dx * d), ("mem", d)], &[("in", dx), ("ent", 1)], &[iso])?;
    // post: outcome k → correction W_k^T on the kept half
    let post: Vec<CMatrix> = (0..d * d)
        .map(|k| {
            let c = weyl(d, k).transpose();
            CMatrix::from_fn(d, d * d * d, |o, col| {
                let (kk, m) = (col / d, col % d);
                if kk == k {
                    c[(o, m)]
                } else {
                    ZERO
                }
            })
        })
        .collect();
    let post = Process::from_kraus(&[("out", d)], &[("res_out", d * d), ("mem", d)], &post)?;
    let this = LocalComb::new(input, SystemType::quantum(d), pre, post)?;
    let (oi, oo) = party_types(g, party.other());
    with_party(party, this, LocalComb::identity(oi, oo))
}

/// Undoes [`q_output_to_classical`] by teleportation: the party prepares
/// `|Ω_d⟩`, feeds one half into the new input and applies the correction
/// `W_k^T` to the other half. The recovered input is trivial if of dim 1,
/// classical if the result is dephasing-invariant on it, quantum otherwise.
pub fn teleport_left_inverse(ch: &Channel, party: Party) -> Result<Channel> {
    let g = ch.gtype();
    let (merged, out) = party_types(g, party);
    let d = (out.dim() as f64).sqrt().round() as usize;
    if d == 0 || merged.dim() % d != 0 {
        return Err(Error::TypeMismatch(format!(
            "{:?}'s input {} is not a multiple of the Bell dimension {}",
            party, merged, d
        )));
    }
    let dx = merged.dim() / d;
    if dx == 1 {
        return apply_lose(&teleport_left_inverse_op(g, party, SystemType::trivial())?, ch);
    }
    let q = apply_lose(&teleport_left_inverse_op(g, party, SystemType::quantum(dx))?, ch)?;
    let role = match party {
        Party::Alice => WireRole::X,
        Party::Bob => WireRole::Y,
    };
    if classical_deviation(q.gtype(), q.choi(), role)? <= CLASSICAL_TOL {
        q.retyped(q.gtype().with_wire(role, SystemType::classical(dx)))
    } else {
        Ok(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Direction, LocalChannel};
    use crate::linalg::{bell_state, hadamard};
    use crate::random::{random_nonsignaling, seeded};
    use crate::zoo;

    #[test]
    fn identity_op_is_identity() {
        for ch in [zoo::pr_box(), zoo::phhh(), zoo::shsa()] {
            let out = apply_lose(&LoseOp::identity(ch.gtype()), &ch).unwrap();
            assert!(out.distance(&ch) < 1e-14);
            assert_eq!(out.gtype(), ch.gtype());
        }
    }

    #[test]
    fn replacing_combs_give_fixed_output() {
        let ch = zoo::phhh();
        let g = ch.gtype();
        let rho0 = basis_projector(2, 0);
        let rho1 = crate::linalg::Ket::from_real(&[0.6, 0.8]).projector();
        let alice = LocalComb::replace(g.x, g.a, 2, 2, &rho0).unwrap();
        let bob = LocalComb::replace(g.y, g.b, 2, 2, &rho1).unwrap();
        let out = apply_lose(&LoseOp::local(alice, bob).unwrap(), &ch).unwrap();
        let want = Channel::product(
            &LocalChannel::replace(g.x, g.a, &rho0).unwrap(),
            &LocalChannel::replace(g.y, g.b, &rho1).unwrap(),
        )
        .unwrap();
        assert!(out.distance(&want) < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let op = pr_to_phhh();
        assert!(matches!(apply_lose(&op, &zoo::shsa()), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn comb_invariants() {
        let q2 = SystemType::quantum(2);
        let dims = CombDims { ent: 1, res_in: 2, mem: 1, res_out: 2 };
        let half = CMatrix::identity(2).scale_real(0.5);
        let bad = LocalComb::from_kraus(q2, q2, dims, &[half], &[CMatrix::identity(2)]);
        assert!(matches!(bad, Err(Error::Invariant { .. })));
        let comb = LocalComb::identity(q2, q2);
        let not_state = CMatrix::identity(1).scale_real(2.0);
        assert!(LoseOp::new(comb.clone(), comb, not_state).is_err());
    }

    #[test]
    fn pr_to_phhh_branches() {
        let out = apply_lose(&pr_to_phhh(), &zoo::pr_box()).unwrap();
        let input = |x: usize, y: usize| tensor(&basis_projector(2, x), &basis_projector(2, y));
        assert!(out.apply(&input(0, 1)).unwrap().max_abs_diff(&bell_state(0).projector()) < 1e-12);
        assert!(out.apply(&input(1, 1)).unwrap().max_abs_diff(&bell_state(2).projector()) < 1e-12);
        assert!(out.distance(&zoo::phhh()) < 1e-10);
    }

    #[test]
    fn phhh_dephases_to_pr() {
        let b = dephase_computational(&zoo::phhh()).unwrap();
        assert!(b.distance(&zoo::pr_box()) < 1e-12);
        let again = dephase_computational(&b).unwrap();
        assert!(again.distance(&b) < 1e-14);
    }

    #[test]
    fn dephasing_rejects_non_unitary_basis() {
        let m = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let res = dephase_outputs_to_box(&zoo::phhh(), &m, &CMatrix::identity(2));
        assert!(matches!(res, Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn phhh_to_shsa_matches() {
        let out = apply_lose(&phhh_to_shsa(), &zoo::phhh()).unwrap();
        assert!(out.distance(&zoo::shsa()) < 1e-10);
    }

    #[test]
    fn phhh_to_dfp_matches() {
        for alpha in [0.0, 1.0 / 6.0, 0.5, 1.0] {
            let out = apply_lose(&phhh_to_dfp(alpha).unwrap(), &zoo::phhh()).unwrap();
            assert!(out.distance(&zoo::dfp(alpha).unwrap()) < 1e-9, "alpha {}", alpha);
        }
        assert!(phhh_to_dfp(1.1).is_err());
    }

    #[test]
    fn bell_basis_is_orthonormal() {
        for d in 2..4 {
            let b = bell_basis(d);
            for (i, u) in b.iter().enumerate() {
                for (j, v) in b.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((u.inner(v) - r(want)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn teleportation_round_trip() {
        let phhh = zoo::phhh();
        let conv = q_output_to_classical(&phhh, Party::Alice).unwrap();
        assert_eq!(conv.gtype().x, SystemType::quantum(4));
        assert_eq!(conv.gtype().a, SystemType::classical(4));
        assert!(conv.is_nonsignaling(Direction::AliceToBob, 1e-9));
        let back = teleport_left_inverse(&conv, Party::Alice).unwrap();
        assert_eq!(back.gtype(), phhh.gtype());
        assert!(back.distance(&phhh) < 1e-10);

        let mut rng = seeded(11);
        let g = GlobalType::new(
            SystemType::trivial(),
            SystemType::quantum(2),
            SystemType::quantum(3),
            SystemType::quantum(2),
        );
        let ch = random_nonsignaling(&g, &mut rng).unwrap();
        let conv = q_output_to_classical(&ch, Party::Bob).unwrap();
        let back = teleport_left_inverse(&conv, Party::Bob).unwrap();
        assert!(back.distance(&ch) < 1e-10);
    }

    #[test]
    fn classical_output_is_rejected() {
        assert!(matches!(q_output_to_classical(&zoo::pr_box(), Party::Alice), Err(Error::TypeMismatch(_))));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let first = pr_to_phhh();
        let second = phhh_to_shsa();
        let composed = first.then(&second).unwrap();
        let seq = apply_lose(&second, &apply_lose(&first, &zoo::pr_box()).unwrap()).unwrap();
        let once = apply_lose(&composed, &zoo::pr_box()).unwrap();
        assert!(seq.distance(&once) < 1e-10);
        assert!(once.distance(&zoo::shsa()) < 1e-10);
    }

    #[test]
    fn hadamard_basis_dephasing_of_phhh() {
        // measuring both halves of φ⁺/ψ⁺ in the Hadamard basis
        let b = dephase_outputs_to_box(&zoo::phhh(), &hadamard(), &hadamard()).unwrap();
        let d = zoo::distribution_from_box(&b).unwrap();
        assert!((d.p(0, 0, 1, 1) - 0.5).abs() < 1e-12);
        assert!((d.p(0, 0, 0, 0) - 0.5).abs() < 1e-12);
    }
}
