//! Numerical workbench for bipartite nonsignaling quantum channels and their
//! conversions under local operations with shared entanglement.

pub mod channel;
pub mod error;
pub mod games;
pub mod io;
pub mod linalg;
pub mod lose;
pub mod process;
pub mod random;
pub mod strategy;
pub mod types;
pub mod verify;
pub mod zoo;

pub use channel::{Channel, Direction, LocalChannel};
pub use error::{Error, Result};
pub use linalg::{CMatrix, Ket, C64};
pub use process::{Process, Wire};
pub use types::{GlobalType, Party, SystemKind, SystemType, WireRole};
