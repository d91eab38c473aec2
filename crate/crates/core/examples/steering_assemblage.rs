//! Converts PHHH into the Bob-with-input steering assemblage and prints the
//! twelve steered states.

use losekit::linalg::trace_distance;
use losekit::lose::{apply_lose, phhh_to_shsa};
use losekit::verify::steered_state;
use losekit::zoo;

fn main() -> losekit::Result<()> {
    let out = apply_lose(&phhh_to_shsa(), &zoo::phhh())?;
    println!("result type {}", out.gtype());
    for x in 0..3 {
        for y in 0..2 {
            for a in 0..2 {
                let rho = steered_state(&out, a, x, y);
                let d = trace_distance(&rho, &zoo::shsa_state(a, x, y))?;
                println!(
                    "a={} x={} y={}  [[{:+.3}, {:+.3}], [{:+.3}, {:+.3}]]  trace distance {:.1e}",
                    a, x, y, rho[(0, 0)], rho[(0, 1)], rho[(1, 0)], rho[(1, 1)], d
                );
            }
        }
    }
    Ok(())
}
