//! Wire types for bipartite resources and the partition-type encoding table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Trivial,
    Classical,
    Quantum,
}

impl SystemKind {
    pub const ALL: [SystemKind; 3] = [SystemKind::Trivial, SystemKind::Classical, SystemKind::Quantum];

    pub fn letter(self) -> char {
        match self {
            SystemKind::Trivial => 'I',
            SystemKind::Classical => 'C',
            SystemKind::Quantum => 'Q',
        }
    }
}

/// The type of a single wire: its kind together with its dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSystemType", into = "RawSystemType")]
pub struct SystemType {
    kind: SystemKind,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct RawSystemType {
    kind: SystemKind,
    dim: usize,
}

impl TryFrom<RawSystemType> for SystemType {
    type Error = Error;
    fn try_from(raw: RawSystemType) -> Result<Self> {
        SystemType::new(raw.kind, raw.dim)
    }
}

impl From<SystemType> for RawSystemType {
    fn from(t: SystemType) -> Self {
        RawSystemType {
            kind: t.kind,
            dim: t.dim,
        }
    }
}

impl SystemType {
    pub fn new(kind: SystemKind, dim: usize) -> Result<Self> {
        match kind {
            SystemKind::Trivial if dim != 1 => Err(Error::InvalidType(format!(
                "trivial system must have dim 1, got {}",
                dim
            ))),
            SystemKind::Classical | SystemKind::Quantum if dim < 2 => Err(Error::InvalidType(
                format!("{:?} system needs dim >= 2, got {}", kind, dim),
            )),
            _ => Ok(SystemType { kind, dim }),
        }
    }

    pub const fn trivial() -> Self {
        SystemType {
            kind: SystemKind::Trivial,
            dim: 1,
        }
    }

    /// Classical wire; panics if `dim < 2`.
    pub fn classical(dim: usize) -> Self {
        Self::new(SystemKind::Classical, dim).expect("classical dim")
    }

    /// Quantum wire; panics if `dim < 2`.
    pub fn quantum(dim: usize) -> Self {
        Self::new(SystemKind::Quantum, dim).expect("quantum dim")
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_trivial(&self) -> bool {
        self.kind == SystemKind::Trivial
    }

    pub fn is_classical(&self) -> bool {
        self.kind == SystemKind::Classical
    }

    pub fn is_quantum(&self) -> bool {
        self.kind == SystemKind::Quantum
    }
}

impl fmt::Display for SystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SystemKind::Trivial => write!(f, "I"),
            k => write!(f, "{}{}", k.letter(), self.dim),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl std::str::FromStr for Party {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alice" | "a" => Ok(Party::Alice),
            "bob" | "b" => Ok(Party::Bob),
            _ => Err(Error::Unknown(format!("party '{}'", s))),
        }
    }
}

/// Wires of a bipartite channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WireRole {
    /// Alice's output.
    A,
    /// Bob's output.
    B,
    /// Alice's input.
    X,
    /// Bob's input.
    Y,
}

impl WireRole {
    pub const ALL: [WireRole; 4] = [WireRole::A, WireRole::B, WireRole::X, WireRole::Y];

    /// Position of the wire's factor in the Choi matrix (order A, B, X, Y).
    pub fn factor(self) -> usize {
        match self {
            WireRole::A => 0,
            WireRole::B => 1,
            WireRole::X => 2,
            WireRole::Y => 3,
        }
    }
}

/// One party's share of a global type: input kind → output kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartitionType {
    pub input: SystemKind,
    pub output: SystemKind,
}

impl PartitionType {
    pub const fn new(input: SystemKind, output: SystemKind) -> Self {
        PartitionType { input, output }
    }

    /// The nine partition types in table order (II, IC, IQ, CI, CC, CQ, QI, QC, QQ).
    pub fn all() -> Vec<PartitionType> {
        let mut v = Vec::with_capacity(9);
        for i in SystemKind::ALL {
            for o in SystemKind::ALL {
                v.push(PartitionType::new(i, o));
            }
        }
        v
    }

    fn index(self) -> usize {
        3 * (self.input as usize) + self.output as usize
    }

    pub fn has_trivial_side(self) -> bool {
        self.input == SystemKind::Trivial || self.output == SystemKind::Trivial
    }
}

impl fmt::Display for PartitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.input.letter(), self.output.letter())
    }
}

impl std::str::FromStr for PartitionType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<char> = s
            .chars()
            .filter(|c| c.is_ascii_alphabetic())
            .map(|c| c.to_ascii_uppercase())
            .collect();
        let kind = |c: char| match c {
            'I' => Ok(SystemKind::Trivial),
            'C' => Ok(SystemKind::Classical),
            'Q' => Ok(SystemKind::Quantum),
            _ => Err(Error::Unknown(format!("partition type '{}'", s))),
        };
        match letters.as_slice() {
            [i, o] => Ok(PartitionType::new(kind(*i)?, kind(*o)?)),
            _ => Err(Error::Unknown(format!("partition type '{}'", s))),
        }
    }
}

/// Global type of a bipartite resource.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlobalType {
    pub x: SystemType,
    pub y: SystemType,
    pub a: SystemType,
    pub b: SystemType,
}

impl GlobalType {
    pub fn new(x: SystemType, y: SystemType, a: SystemType, b: SystemType) -> Self {
        GlobalType { x, y, a, b }
    }

    pub fn wire(&self, role: WireRole) -> SystemType {
        match role {
            WireRole::A => self.a,
            WireRole::B => self.b,
            WireRole::X => self.x,
            WireRole::Y => self.y,
        }
    }

    pub fn with_wire(mut self, role: WireRole, t: SystemType) -> Self {
        match role {
            WireRole::A => self.a = t,
            WireRole::B => self.b = t,
            WireRole::X => self.x = t,
            WireRole::Y => self.y = t,
        }
        self
    }

    pub fn input_of(&self, party: Party) -> SystemType {
        match party {
            Party::Alice => self.x,
            Party::Bob => self.y,
        }
    }

    pub fn output_of(&self, party: Party) -> SystemType {
        match party {
            Party::Alice => self.a,
            Party::Bob => self.b,
        }
    }

    /// Choi factor dimensions in the order A, B, X, Y.
    pub fn choi_dims(&self) -> [usize; 4] {
        [self.a.dim, self.b.dim, self.x.dim, self.y.dim]
    }

    pub fn choi_dim(&self) -> usize {
        self.choi_dims().iter().product()
    }

    pub fn input_dim(&self) -> usize {
        self.x.dim * self.y.dim
    }

    pub fn output_dim(&self) -> usize {
        self.a.dim * self.b.dim
    }

    /// Alice's share `x → a`.
    pub fn partition_alice(&self) -> PartitionType {
        PartitionType::new(self.x.kind, self.a.kind)
    }

    /// Bob's share `y → b`.
    pub fn partition_bob(&self) -> PartitionType {
        PartitionType::new(self.y.kind, self.b.kind)
    }

    /// Kind signature in the usual `XY→AB` letter notation, e.g. `CC->QQ`.
    pub fn signature(&self) -> String {
        format!(
            "{}{}->{}{}",
            self.x.kind.letter(),
            self.y.kind.letter(),
            self.a.kind.letter(),
            self.b.kind.letter()
        )
    }
}

impl fmt::Display for GlobalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}->{}{}", self.x, self.y, self.a, self.b)
    }
}

/// True iff some wire of the type is trivial. Exactly these bipartite types
/// contain no resources beyond those generated by local operations and shared
/// entanglement.
pub fn is_lose_trivial_type(t: &GlobalType) -> bool {
    [t.x, t.y, t.a, t.b].iter().any(|w| w.is_trivial())
}

/// Kind-level version of [`is_lose_trivial_type`].
pub fn is_lose_trivial_kinds(x: SystemKind, y: SystemKind, a: SystemKind, b: SystemKind) -> bool {
    [x, y, a, b].contains(&SystemKind::Trivial)
}

/// Status of an entry of the partition-type encoding table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encodes {
    Yes,
    No,
    Unknown,
}

use SystemKind::{Classical as C, Quantum as Q};

/// `ENCODING_TABLE[i][j]` answers "does partition type `i` encode partition
/// type `j`", indices in [`PartitionType::all`] order.
///
/// Row by row:
/// - I->I, I->C, I->Q, C->I, Q->I: bottom class. Every resource with a
///   trivial side is free, so these encode each other and nothing above them
///   (a nonfree box cannot be reached from free resources).
/// - C->C: encodes the bottom and itself. Whether it encodes C->Q is open;
///   whether it encodes Q->C or Q->Q is open, and those two answers coincide.
/// - C->Q: encodes the bottom, itself, and C->C (classical output is a special
///   case of a quantum one). Q->C / Q->Q open, answers coincide.
/// - Q->C, Q->Q: top class, encode everything (Q->Q by embedding, Q->C via the
///   Bell-measurement conversion with a teleportation left inverse).
const Y: Encodes = Encodes::Yes;
const N: Encodes = Encodes::No;
const U: Encodes = Encodes::Unknown;
#[rustfmt::skip]
const ENCODING_TABLE: [[Encodes; 9]; 9] = [
    //          II IC IQ CI CC CQ QI QC QQ
    /* II */  [ Y, Y, Y, Y, N, N, Y, N, N ],
    /* IC */  [ Y, Y, Y, Y, N, N, Y, N, N ],
    /* IQ */  [ Y, Y, Y, Y, N, N, Y, N, N ],
    /* CI */  [ Y, Y, Y, Y, N, N, Y, N, N ],
    /* CC */  [ Y, Y, Y, Y, Y, U, Y, U, U ],
    /* CQ */  [ Y, Y, Y, Y, Y, Y, Y, U, U ],
    /* QI */  [ Y, Y, Y, Y, N, N, Y, N, N ],
    /* QC */  [ Y, Y, Y, Y, Y, Y, Y, Y, Y ],
    /* QQ */  [ Y, Y, Y, Y, Y, Y, Y, Y, Y ],
];

/// Whether partition type `t1` encodes (sits above) partition type `t2`.
pub fn partition_encodes(t1: PartitionType, t2: PartitionType) -> Encodes {
    ENCODING_TABLE[t1.index()][t2.index()]
}

/// Pairs of table cells that must share the same answer.
pub fn linked_unknowns() -> [((PartitionType, PartitionType), (PartitionType, PartitionType)); 2] {
    let p = PartitionType::new;
    [
        ((p(C, C), p(Q, C)), (p(C, C), p(Q, Q))),
        ((p(C, Q), p(Q, C)), (p(C, Q), p(Q, Q))),
    ]
}
