//! Poisson extensions of the smooth corpus against the maximal function.

use tracelab::corpus::smooth_corpus;
use tracelab::grid::{BoundaryGrid, LevelSchedule};
use tracelab::maximal::RadiusLadder;
use tracelab::poisson::{check_maximal_domination, poisson_extend};

fn main() -> tracelab::Result<()> {
    let grid = BoundaryGrid::new(1, 2.0, 0.05)?;
    let levels = LevelSchedule::Geometric { first: 0.05, ratio: 1.25, top: 4.0 }.levels()?;
    let ladder = RadiusLadder::default_for(&grid);
    let fine = RadiusLadder::refined_for(&grid, 2);
    for (i, profile) in smooth_corpus().iter().enumerate() {
        let f = profile.sample(&grid)?;
        let v = poisson_extend(&f, &levels)?;
        let coarse = check_maximal_domination(&v, &f, &ladder)?;
        let refined = check_maximal_domination(&v, &f, &fine)?;
        println!(
            "profile {i}: max(|v| - Mf) = {:+.4} (refined ladder {:+.4})",
            coarse.max_violation, refined.max_violation
        );
    }
    Ok(())
}
