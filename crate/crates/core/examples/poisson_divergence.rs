//! Strip norms of the Poisson extension of slowly decaying data keep growing,
//! while a mean-zero compactly supported profile levels off.

use tracelab::corpus::BoundaryProfile;
use tracelab::grid::BoundaryGrid;
use tracelab::poisson::{divergence_experiment, divergence_floor, strip_growth, StripSetup};

fn main() -> tracelab::Result<()> {
    let heights = [4.0, 8.0, 16.0, 32.0];
    let setup = StripSetup::default();
    let slow = divergence_experiment(0.9, 2.0, 2, &heights, &setup)?;
    for row in &slow.rows {
        println!("(1+|x|)^-0.9  H={:<3} ‖v‖ = {:.4}", row.height, row.strip_norm);
    }
    println!("growth {:.3}, fitted exponent {:.3}", slow.growth_ratio(), slow.fitted_exponent);

    let grid = BoundaryGrid::new(1, setup.half_extent, setup.spacing)?;
    let odd = BoundaryProfile::OddBump { amp: 1.0, radius: 1.0, shift: 1.0 }.sample(&grid)?;
    let control = strip_growth(&odd, 2.0, divergence_floor(2), &heights, setup.levels_per_octave)?;
    println!("odd bump growth {:.3}", control.growth_ratio());
    Ok(())
}
