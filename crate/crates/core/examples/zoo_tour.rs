//! Builds every named channel, prints its type and validation summary.

use losekit::channel::{validate, CHANNEL_TOL};
use losekit::games::ppt_min_eigenvalue_of;
use losekit::zoo::{self, ZooParams};

fn main() -> losekit::Result<()> {
    for name in zoo::ZOO_NAMES {
        let (g, choi) = zoo::named_raw(name, &ZooParams::default())?;
        let rep = validate(&g, &choi)?;
        let ppt = ppt_min_eigenvalue_of(&g, &choi)?;
        println!(
            "{:<8} {:<14} cptp {:<5} A->B {:.1e}  B->A {:.1e}  ppt min {:+.4}",
            name,
            g.to_string(),
            rep.cptp.passes(CHANNEL_TOL),
            rep.alice_to_bob.deviation,
            rep.bob_to_alice.deviation,
            ppt
        );
    }
    println!("\n{}", zoo::describe("bennett").unwrap_or(""));
    Ok(())
}
