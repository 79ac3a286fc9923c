//! Fractional seminorm of a Gaussian and of an indicator under refinement.
//!
//! The smooth profile converges; the indicator sits outside `W^{1/2,2}` in
//! one dimension and its discrete seminorm keeps growing.

use tracelab::corpus::BoundaryProfile;
use tracelab::grid::BoundaryGrid;
use tracelab::norms::{gagliardo_seminorm, SeminormParams};

fn main() -> tracelab::Result<()> {
    let params = SeminormParams::trace_space(2.0)?;
    for h in [0.04, 0.02, 0.01] {
        let grid = BoundaryGrid::new(1, 2.0, h)?;
        let smooth = BoundaryProfile::gaussian(1.0, 0.3).sample(&grid)?;
        let jump = BoundaryProfile::Indicator { radius: 0.5 }.sample(&grid)?;
        println!(
            "h={h:<5} gaussian {:.6}  indicator {:.6}",
            gagliardo_seminorm(&smooth, params)?,
            gagliardo_seminorm(&jump, params)?
        );
    }
    Ok(())
}
