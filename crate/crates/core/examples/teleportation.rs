//! Replaces a quantum output by a classical Bell-measurement record and
//! undoes it with teleportation.

use losekit::lose::{q_output_to_classical, teleport_left_inverse};
use losekit::random::{random_nonsignaling, seeded};
use losekit::verify::random_type;
use losekit::{zoo, Party};

fn main() -> losekit::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut rng = seeded(seed);
    let mut cases = vec![("phhh".to_string(), zoo::phhh(), Party::Alice)];
    for i in 0..4 {
        let party = if i % 2 == 0 { Party::Alice } else { Party::Bob };
        let g = random_type(&mut rng, party);
        cases.push((format!("random #{}", i), random_nonsignaling(&g, &mut rng)?, party));
    }
    for (name, ch, party) in cases {
        let classical = q_output_to_classical(&ch, party)?;
        let back = teleport_left_inverse(&classical, party)?;
        println!(
            "{:<10} {:?}: {} -> {} -> {}  distance {:.1e}",
            name,
            party,
            ch.gtype(),
            classical.gtype(),
            back.gtype(),
            back.distance(&ch)
        );
    }
    Ok(())
}
