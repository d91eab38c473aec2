//! Typed bipartite channels in the Choi representation.
//!
//! The Choi operator is `J(E) = Σ_{ij} E(|i⟩⟨j|) ⊗ |i⟩⟨j|`, unnormalized, with
//! tensor factors ordered `A_out, B_out, X_in, Y_in`. Classical wires are
//! quantum factors on which `J` is invariant under computational-basis
//! dephasing.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{
    dephase_factor, partial_trace, permute_factors, tensor, CMatrix, Ket, C64, ZERO,
};
use crate::process::Process;
use crate::types::{GlobalType, Party, SystemType, WireRole};

/// Tolerance used by constructors for complete positivity, trace preservation
/// and nonsignaling.
pub const CHANNEL_TOL: f64 = 1e-9;
/// Tolerance for the classicality (dephasing-invariance) test.
pub const CLASSICAL_TOL: f64 = 1e-10;

/// Signaling direction. `AliceToBob` asks whether Bob's output can depend on
/// Alice's input `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::AliceToBob => write!(f, "Alice->Bob"),
            Direction::BobToAlice => write!(f, "Bob->Alice"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CptpReport {
    pub min_eigenvalue: f64,
    pub tp_deviation: f64,
    pub hermiticity_deviation: f64,
}

impl CptpReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol && self.tp_deviation <= tol && self.hermiticity_deviation <= tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalingReport {
    pub direction: Direction,
    /// Frobenius norm of the marginal mismatch.
    pub deviation: f64,
}

impl SignalingReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.deviation <= tol
    }
}

/// All structural checks of a candidate channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub cptp: CptpReport,
    pub alice_to_bob: SignalingReport,
    pub bob_to_alice: SignalingReport,
    /// Dephasing deviation for each wire declared classical.
    pub classical: Vec<(WireRole, f64)>,
}

impl ValidationReport {
    /// First violated invariant, if any.
    pub fn first_violation(&self, tol: f64, classical_tol: f64) -> Option<Error> {
        let inv = |quantity: &str, value: f64, tol: f64| Error::Invariant {
            quantity: quantity.to_string(),
            value,
            tol,
        };
        if self.cptp.hermiticity_deviation > tol {
            return Some(inv("Choi hermiticity deviation", self.cptp.hermiticity_deviation, tol));
        }
        if self.cptp.min_eigenvalue < -tol {
            return Some(inv("negative Choi eigenvalue magnitude", -self.cptp.min_eigenvalue, tol));
        }
        if self.cptp.tp_deviation > tol {
            return Some(inv("trace-preservation deviation", self.cptp.tp_deviation, tol));
        }
        if !self.alice_to_bob.passes(tol) {
            return Some(inv("Alice->Bob signaling deviation", self.alice_to_bob.deviation, tol));
        }
        if !self.bob_to_alice.passes(tol) {
            return Some(inv("Bob->Alice signaling deviation", self.bob_to_alice.deviation, tol));
        }
        for &(wire, dev) in &self.classical {
            if dev > classical_tol {
                return Some(inv(&format!("classicality deviation on wire {:?}", wire), dev, classical_tol));
            }
        }
        None
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.first_violation(tol, CLASSICAL_TOL).is_none()
    }
}

fn check_choi_shape(gtype: &GlobalType, choi: &CMatrix) -> Result<()> {
    let n = gtype.choi_dim();
    if !choi.is_square() || choi.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "type {} needs a {}x{} Choi matrix, got {}x{}",
            gtype,
            n,
            n,
            choi.rows(),
            choi.cols()
        )));
    }
    Ok(())
}

/// Complete-positivity and trace-preservation diagnostics.
pub fn cptp_report(gtype: &GlobalType, choi: &CMatrix) -> Result<CptpReport> {
    check_choi_shape(gtype, choi)?;
    let dims = gtype.choi_dims();
    let hermiticity_deviation = choi.hermiticity_deviation();
    let min_eigenvalue = if hermiticity_deviation <= 1e-8 {
        choi.min_eigenvalue()?
    } else {
        f64::NEG_INFINITY
    };
    let reduced = partial_trace(choi, &dims, &[2, 3])?;
    let tp_deviation = reduced.max_abs_diff(&CMatrix::identity(reduced.rows()));
    Ok(CptpReport {
        min_eigenvalue,
        tp_deviation,
        hermiticity_deviation,
    })
}

/// Deviation from nonsignaling in the given direction. For `AliceToBob` this
/// compares `Tr_A J` with `I_X/d_X ⊗ Tr_{A,X} J`.
pub fn signaling_report(gtype: &GlobalType, choi: &CMatrix, direction: Direction) -> Result<SignalingReport> {
    check_choi_shape(gtype, choi)?;
    let dims = gtype.choi_dims();
    // (kept output, kept input, traced output, traced input)
    let (out_keep, in_keep, in_drop) = match direction {
        Direction::AliceToBob => (1, 3, 2),
        Direction::BobToAlice => (0, 2, 3),
    };
    let with_input = partial_trace(choi, &dims, &[out_keep, in_drop.min(in_keep), in_drop.max(in_keep)])?;
    let marginal = partial_trace(choi, &dims, &[out_keep, in_keep])?;
    let d_drop = dims[in_drop];
    let id = CMatrix::identity(d_drop).scale_real(1.0 / d_drop as f64);
    // factors of `with_input` are (out_keep, X, Y) in Choi order
    let expected = match direction {
        // (B, X, Y): insert I_X in the middle
        Direction::AliceToBob => {
            let t = tensor(&marginal, &id); // (B, Y, X)
            permute_factors(&t, &[dims[1], dims[3], dims[2]], &[0, 2, 1])?
        }
        // (A, X, Y): append I_Y
        Direction::BobToAlice => tensor(&marginal, &id),
    };
    Ok(SignalingReport {
        direction,
        deviation: with_input.frobenius_distance(&expected),
    })
}

/// Deviation of `J` from its dephased version on one wire.
pub fn classical_deviation(gtype: &GlobalType, choi: &CMatrix, wire: WireRole) -> Result<f64> {
    check_choi_shape(gtype, choi)?;
    let dephased = dephase_factor(choi, &gtype.choi_dims(), wire.factor())?;
    Ok(choi.max_abs_diff(&dephased))
}

/// Runs every validator on a raw Choi matrix without constructing a channel.
pub fn validate(gtype: &GlobalType, choi: &CMatrix) -> Result<ValidationReport> {
    let cptp = cptp_report(gtype, choi)?;
    let alice_to_bob = signaling_report(gtype, choi, Direction::AliceToBob)?;
    let bob_to_alice = signaling_report(gtype, choi, Direction::BobToAlice)?;
    let classical = WireRole::ALL
        .iter()
        .filter(|&&w| gtype.wire(w).is_classical())
        .map(|&w| classical_deviation(gtype, choi, w).map(|d| (w, d)))
        .collect::<Result<_>>()?;
    Ok(ValidationReport {
        cptp,
        alice_to_bob,
        bob_to_alice,
        classical,
    })
}

/// A validated nonsignaling bipartite channel.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    gtype: GlobalType,
    choi: CMatrix,
}

impl Channel {
    /// Validates and wraps a Choi matrix.
    pub fn from_choi(gtype: GlobalType, choi: CMatrix) -> Result<Self> {
        let report = validate(&gtype, &choi)?;
        if let Some(err) = report.first_violation(CHANNEL_TOL, CLASSICAL_TOL) {
            return Err(err);
        }
        Ok(Channel { gtype, choi })
    }

    /// Channel with Kraus operators acting `X⊗Y → A⊗B`.
    pub fn from_kraus(gtype: GlobalType, kraus: &[CMatrix]) -> Result<Self> {
        let din = gtype.input_dim();
        let mut sum = CMatrix::zeros(din, din);
        for k in kraus {
            if k.rows() != gtype.output_dim() || k.cols() != din {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {}x{} for type {}",
                    k.rows(),
                    k.cols(),
                    gtype
                )));
            }
            sum = &sum + &k.adjoint().matmul(k);
        }
        let deviation = sum.max_abs_diff(&CMatrix::identity(din));
        if deviation > 1e-10 {
            return Err(Error::IncompleteKraus { deviation });
        }
        let p = Process::from_kraus(
            &[("a", gtype.a.dim()), ("b", gtype.b.dim())],
            &[("x", gtype.x.dim()), ("y", gtype.y.dim())],
            kraus,
        )?;
        Channel::from_choi(gtype, p.into_choi())
    }

    /// Reads a channel back from a process with wires named `a, b, x, y`.
    pub fn from_process(gtype: GlobalType, p: &Process) -> Result<Self> {
        let p = p.reorder(&["a", "b", "x", "y"])?;
        Channel::from_choi(gtype, p.into_choi())
    }

    pub fn gtype(&self) -> &GlobalType {
        &self.gtype
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn into_choi(self) -> CMatrix {
        self.choi
    }

    /// The channel as a process with wires `a, b` (outputs) and `x, y`.
    pub fn to_process(&self) -> Process {
        let d = self.gtype.choi_dims();
        Process::new(
            vec![
                crate::process::Wire::output("a", d[0]),
                crate::process::Wire::output("b", d[1]),
                crate::process::Wire::input("x", d[2]),
                crate::process::Wire::input("y", d[3]),
            ],
            self.choi.clone(),
        )
        .expect("validated dims")
    }

    /// Output state for an input density operator on `X⊗Y`.
    pub fn apply(&self, state: &CMatrix) -> Result<CMatrix> {
        let din = self.gtype.input_dim();
        if !state.is_square() || state.rows() != din {
            return Err(Error::DimensionMismatch(format!(
                "input state {}x{} for type {}",
                state.rows(),
                state.cols(),
                self.gtype
            )));
        }
        let tr = state.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 || state.hermiticity_deviation() > 1e-10 {
            return Err(Error::OutOfRange(format!(
                "input state must be Hermitian with unit trace (trace {})",
                tr
            )));
        }
        Ok(self.apply_linear(state))
    }

    /// Action on an arbitrary operator, without state checks.
    pub fn apply_linear(&self, op: &CMatrix) -> CMatrix {
        let din = self.gtype.input_dim();
        let dout = self.gtype.output_dim();
        let n = din * dout;
        let j = self.choi.as_slice();
        CMatrix::from_fn(dout, dout, |o, op_| {
            let mut s = ZERO;
            for i in 0..din {
                for k in 0..din {
                    let rho = op[(i, k)];
                    if rho != ZERO {
                        s += rho * j[(o * din + i) * n + op_ * din + k];
                    }
                }
            }
            s
        })
    }

    /// Output for a pure input state.
    pub fn apply_ket(&self, psi: &Ket) -> Result<CMatrix> {
        self.apply(&psi.projector())
    }

    pub fn cptp_report(&self) -> CptpReport {
        cptp_report(&self.gtype, &self.choi).expect("validated dims")
    }

    pub fn is_cptp(&self, tol: f64) -> bool {
        self.cptp_report().passes(tol)
    }

    pub fn signaling_report(&self, direction: Direction) -> SignalingReport {
        signaling_report(&self.gtype, &self.choi, direction).expect("validated dims")
    }

    pub fn is_nonsignaling(&self, direction: Direction, tol: f64) -> bool {
        self.signaling_report(direction).passes(tol)
    }

    /// Whether `J` is invariant under dephasing of the given wire.
    pub fn is_classical_on_wire(&self, wire: WireRole) -> bool {
        classical_deviation(&self.gtype, &self.choi, wire).expect("validated dims") <= CLASSICAL_TOL
    }

    /// Frobenius distance between Choi matrices (types must agree in dims).
    pub fn distance(&self, other: &Channel) -> f64 {
        self.choi.frobenius_distance(&other.choi)
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &Channel, lambda: f64) -> Result<Channel> {
        if self.gtype != other.gtype {
            return Err(Error::TypeMismatch(format!("{} vs {}", self.gtype, other.gtype)));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::OutOfRange(format!("mixing weight {}", lambda)));
        }
        let choi = &self.choi.scale_real(lambda) + &other.choi.scale_real(1.0 - lambda);
        Channel::from_choi(self.gtype, choi)
    }

    /// Re-labels wire kinds without touching the Choi matrix; dims must agree.
    pub fn retyped(&self, gtype: GlobalType) -> Result<Channel> {
        if gtype.choi_dims() != self.gtype.choi_dims() {
            return Err(Error::TypeMismatch(format!("{} vs {}", gtype, self.gtype)));
        }
        Channel::from_choi(gtype, self.choi.clone())
    }

    /// Product channel `E_A ⊗ E_B`.
    pub fn product(alice: &LocalChannel, bob: &LocalChannel) -> Result<Channel> {
        let gtype = GlobalType::new(alice.input, bob.input, alice.output, bob.output);
        let t = tensor(&alice.choi, &bob.choi); // (A, X, B, Y)
        let choi = permute_factors(
            &t,
            &[alice.output.dim(), alice.input.dim(), bob.output.dim(), bob.input.dim()],
            &[0, 2, 1, 3],
        )?;
        Channel::from_choi(gtype, choi)
    }

    /// Marginal channel of one party (well defined because the channel is
    /// nonsignaling): `Tr_{other out} J / d_{other in}`.
    pub fn marginal(&self, party: Party) -> LocalChannel {
        let dims = self.gtype.choi_dims();
        let (keep, other_in) = match party {
            Party::Alice => ([0, 2], 3),
            Party::Bob => ([1, 3], 2),
        };
        let m = partial_trace(&self.choi, &dims, &keep)
            .expect("validated dims")
            .scale_real(1.0 / dims[other_in] as f64);
        LocalChannel {
            input: self.gtype.input_of(party),
            output: self.gtype.output_of(party),
            choi: m,
        }
    }
}

/// A single-party CPTP map with typed input and output wires. Choi factor
/// order is `(output, input)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalChannel {
    input: SystemType,
    output: SystemType,
    choi: CMatrix,
}

impl LocalChannel {
    pub fn from_choi(input: SystemType, output: SystemType, choi: CMatrix) -> Result<Self> {
        let n = input.dim() * output.dim();
        if !choi.is_square() || choi.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "local channel {} -> {} needs a {}x{} Choi",
                input, output, n, n
            )));
        }
        let p = Process::new(
            vec![
                crate::process::Wire::output("out", output.dim()),
                crate::process::Wire::input("in", input.dim()),
            ],
            choi,
        )?;
        p.check_cptp(CHANNEL_TOL)?;
        let choi = p.into_choi();
        let dims = [output.dim(), input.dim()];
        for (factor, t) in [(0, output), (1, input)] {
            if t.is_classical() {
                let dev = choi.max_abs_diff(&dephase_factor(&choi, &dims, factor)?);
                if dev > CLASSICAL_TOL {
                    return Err(Error::Invariant {
                        quantity: "classicality deviation".into(),
                        value: dev,
                        tol: CLASSICAL_TOL,
                    });
                }
            }
        }
        Ok(LocalChannel { input, output, choi })
    }

    pub fn from_kraus(input: SystemType, output: SystemType, kraus: &[CMatrix]) -> Result<Self> {
        let p = Process::from_kraus(&[("out", output.dim())], &[("in", input.dim())], kraus)?;
        LocalChannel::from_choi(input, output, p.into_choi())
    }

    pub fn identity(t: SystemType) -> Self {
        let choi = crate::linalg::omega(t.dim()).projector();
        let choi = if t.is_classical() {
            dephase_factor(&choi, &[t.dim(), t.dim()], 0).expect("dims")
        } else {
            choi
        };
        LocalChannel {
            input: t,
            output: t,
            choi,
        }
    }

    /// Discards the input: `Tr_X`, with trivial output.
    pub fn trace(input: SystemType) -> Self {
        LocalChannel {
            input,
            output: SystemType::trivial(),
            choi: CMatrix::identity(input.dim()),
        }
    }

    /// Computational-basis dephasing on a quantum wire of dimension `d`.
    pub fn dephasing(d: usize) -> Self {
        let t = SystemType::quantum(d);
        let choi = dephase_factor(&crate::linalg::omega(d).projector(), &[d, d], 0).expect("dims");
        LocalChannel {
            input: t,
            output: t,
            choi,
        }
    }

    /// Discards the input and prepares `rho`.
    pub fn replace(input: SystemType, output: SystemType, rho: &CMatrix) -> Result<Self> {
        LocalChannel::from_choi(input, output, tensor(rho, &CMatrix::identity(input.dim())))
    }

    pub fn input(&self) -> SystemType {
        self.input
    }

    pub fn output(&self) -> SystemType {
        self.output
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn distance(&self, other: &LocalChannel) -> f64 {
        self.choi.frobenius_distance(&other.choi)
    }
}

/// Splits a channel in which one party's output is trivial into
/// `(alice_part, bob_part)` with `ch = alice_part ⊗ bob_part`. The party with
/// the trivial output receives the trace map on its input.
pub fn factorize_trivial_output(ch: &Channel) -> Result<(LocalChannel, LocalChannel)> {
    let g = ch.gtype();
    let (alice, bob) = if g.a.is_trivial() {
        (LocalChannel::trace(g.x), ch.marginal(Party::Bob))
    } else if g.b.is_trivial() {
        (ch.marginal(Party::Alice), LocalChannel::trace(g.y))
    } else {
        return Err(Error::TypeMismatch(format!(
            "factorization needs a trivial output, got {}",
            g
        )));
    };
    let rebuilt_choi = {
        let t = tensor(alice.choi(), bob.choi());
        permute_factors(
            &t,
            &[alice.output.dim(), alice.input.dim(), bob.output.dim(), bob.input.dim()],
            &[0, 2, 1, 3],
        )?
    };
    let err = rebuilt_choi.frobenius_distance(ch.choi());
    if err > CHANNEL_TOL {
        return Err(Error::Invariant {
            quantity: "factorization reconstruction error".into(),
            value: err,
            tol: CHANNEL_TOL,
        });
    }
    let alice = LocalChannel::from_choi(alice.input, alice.output, alice.choi)?;
    let bob = LocalChannel::from_choi(bob.input, bob.output, bob.choi)?;
    Ok((alice, bob))
}
