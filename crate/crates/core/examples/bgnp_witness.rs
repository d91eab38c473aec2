//! Eigenstate-condition witness: BGNP with a twisted basis violates it, the
//! untwisted basis does not.

use losekit::games::eigenstate_condition_check;
use losekit::linalg::phi_plus;
use losekit::verify::block_swap;
use losekit::zoo::{self, Block};
use losekit::CMatrix;

fn main() -> losekit::Result<()> {
    let ub = zoo::parse_unitary(&std::env::args().nth(1).unwrap_or_else(|| "hadamard".into()))?;
    let psi = zoo::embed_blocks(&phi_plus(), Block::F, Block::F);
    let s = block_swap();
    for (label, u) in [("twisted", ub), ("untwisted", CMatrix::identity(2))] {
        let rep = eigenstate_condition_check(&zoo::bgnp(&u)?, &psi, &s, &s, 1e-9)?;
        println!("{:<9} {}  fidelities {:.4?}", label, rep.verdict, rep.fidelities);
    }
    Ok(())
}
