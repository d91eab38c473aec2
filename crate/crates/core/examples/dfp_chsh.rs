//! The DFP channel: reached from PHHH, not entanglement-breaking, and scoring
//! strictly between the quantum bound and 4 in CHSH.

use losekit::games::{chsh_game, ppt_min_eigenvalue, QUANTUM_CHSH_BOUND};
use losekit::lose::{apply_lose, phhh_to_dfp};
use losekit::strategy::{optimize_dfp_strategy, ordering_spotcheck};
use losekit::zoo::{self, DFP_ALPHA};

fn main() -> losekit::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2024);
    let dfp = zoo::dfp(DFP_ALPHA)?;
    let converted = apply_lose(&phhh_to_dfp(DFP_ALPHA)?, &zoo::phhh())?;
    println!("PHHH -> DFP distance {:.2e}", converted.distance(&dfp));
    println!("partial transpose min eigenvalue {:.6}", ppt_min_eigenvalue(&dfp)?);

    let res = optimize_dfp_strategy(&dfp, &chsh_game(), seed, 4)?;
    println!(
        "CHSH strategy angles {:.4?}\n  score {:.9} (quantum bound {:.9}, PR 4)",
        res.angles, res.score, QUANTUM_CHSH_BOUND
    );

    let report = ordering_spotcheck(&zoo::phhh(), &dfp, &[("chsh".to_string(), chsh_game())], seed);
    for e in &report.entries {
        let fmt = |g: &Option<losekit::strategy::GameScore>| g.as_ref().map_or("none".to_string(), |g| format!("{:.6} ({})", g.score, g.strategy));
        println!("  {}: phhh {} vs dfp {} -> {}", e.game, fmt(&e.r1), fmt(&e.r2), e.conclusion(1e-9));
    }
    Ok(())
}
