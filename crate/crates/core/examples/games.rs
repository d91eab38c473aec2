//! Scores boxes in CHSH and in a custom payoff game, with brute-force local
//! bounds.

use losekit::games::{chsh_game, lhv_bound, score, Game};
use losekit::zoo::{self, box_from_distribution, BoxDistribution};

fn main() -> losekit::Result<()> {
    let chsh = chsh_game();
    println!("CHSH: local bound {}, PR box {}", lhv_bound(&chsh)?, score(&chsh, &zoo::pr_box())?);
    for v in [0.5, 0.7, 1.0] {
        let b = box_from_distribution(&BoxDistribution::isotropic(v)?);
        println!("  isotropic v={:.1}: {:.4}", v, score(&chsh, &b)?);
    }

    // outputs must agree exactly when x = y, three inputs each
    let uniform = vec![vec![1.0 / 9.0; 3]; 3];
    let g = *zoo::box_from_distribution(&BoxDistribution::uniform(3, 3, 2, 2)).gtype();
    let agree = Game::payoff_fn(g, uniform, |a, b, x, y| if (x == y) == (a == b) { 1.0 } else { 0.0 })?;
    println!("agreement game: local bound {:.4}", lhv_bound(&agree)?);
    Ok(())
}
