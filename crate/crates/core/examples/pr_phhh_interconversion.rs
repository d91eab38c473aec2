//! The PR box and the PHHH ensemble preparation convert into each other.

use losekit::lose::{apply_lose, dephase_computational, pr_to_phhh};
use losekit::zoo::{self, distribution_from_box, BoxDistribution};

fn main() -> losekit::Result<()> {
    let pr = zoo::pr_box();
    let phhh = apply_lose(&pr_to_phhh(), &pr)?;
    println!("PR -> PHHH: type {}, distance to PHHH {:.2e}", phhh.gtype(), phhh.distance(&zoo::phhh()));

    let back = dephase_computational(&zoo::phhh())?;
    let table = distribution_from_box(&back)?;
    println!("PHHH -> box: max |p - p_PR| = {:.2e}", table.max_abs_diff(&BoxDistribution::pr()));
    for x in 0..2 {
        for y in 0..2 {
            let row: Vec<String> = (0..4).map(|ab| format!("{:.2}", table.p(ab / 2, ab % 2, x, y))).collect();
            println!("  x={} y={}  p(00,01,10,11) = {}", x, y, row.join(" "));
        }
    }
    Ok(())
}
