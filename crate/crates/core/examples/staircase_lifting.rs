//! Staircase lifting of an indicator, finite and infinite `q`.

use tracelab::corpus::BoundaryProfile;
use tracelab::exponents::LebesgueExponent;
use tracelab::grid::BoundaryGrid;
use tracelab::lift_staircase::{staircase_bounds_check, staircase_extend, ApproximantOptions};

fn main() -> tracelab::Result<()> {
    let grid = BoundaryGrid::new(1, 2.0, 0.01)?;
    let f = BoundaryProfile::Indicator { radius: 0.5 }.sample(&grid)?;
    for q in [LebesgueExponent::Finite(3.0), LebesgueExponent::Infinite] {
        let st = staircase_extend(&f, q, 6, 4, &ApproximantOptions::default())?;
        let rep = staircase_bounds_check(&st)?;
        println!("q = {q:?}: heights {:?}", st.schedule.levels);
        println!("  size {:.4} <= {:.4}", rep.size, rep.size_bound);
        println!("  ‖∂_n u‖₁ {:.4} <= {:.4}", rep.normal_l1, rep.normal_bound);
        for (j, (e, b)) in rep.trace_errors.iter().enumerate() {
            println!("  layer {j}: ‖u(·,t_j) - f‖₁ = {e:.4e} <= {b:.4e}");
        }
        println!("  all bounds hold: {}", rep.all_hold());
    }
    Ok(())
}
