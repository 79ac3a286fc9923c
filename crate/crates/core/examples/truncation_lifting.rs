//! Truncation lifting of a tall Gaussian in three dimensions.

use tracelab::corpus::BoundaryProfile;
use tracelab::exponents::ExponentSet;
use tracelab::grid::BoundaryGrid;
use tracelab::lift_truncation::{
    chief_bound_check, multiplicative_trace_inequality, nonlinear_extend, onset_levels, trace_recovery_check,
};
use tracelab::maximal::{maximal_function, RadiusLadder};
use tracelab::poisson::domination_against;

fn main() -> tracelab::Result<()> {
    let e = ExponentSet::new(3, 2.0, 8.0)?;
    let grid = BoundaryGrid::new(2, 1.5, 0.05)?;
    let f = BoundaryProfile::gaussian(10.0, 0.3).sample(&grid)?;
    let beta = e.beta.unwrap();
    let levels = onset_levels(f.max_abs(), beta, 0.05, 1.25, 4.0)?;
    let ext = nonlinear_extend(&f, e, &levels)?;

    let support = ext.check_support();
    println!("support: {} violations, max x_n|v|^β = {:.4}", support.violations, support.max_on_support);
    let mf = maximal_function(&f, &RadiusLadder::default_for(&grid))?;
    let gap = domination_against(&ext.poisson, &mf).gap();
    let pw = ext.pointwise_bound_against(&mf, 2.0 * gap);
    println!("pointwise bound: excess {:.3e}, tolerance {:.3e}", pw.max_excess, pw.tolerance);
    let chief = chief_bound_check(&ext)?;
    println!("chief bound: {:.4} / {:.4} = {:.4}", chief.lhs, chief.rhs, chief.ratio.unwrap());
    let rec = trace_recovery_check(&ext)?;
    println!("‖u(·,{:.2e}) - f‖₁ = {:.3e}", rec.level, rec.l1_error);
    let m = multiplicative_trace_inequality(&ext.lifting, 2.0, 8.0)?;
    println!("multiplicative: {:.2} <= {:.2} (margin {:.3})", m.lhs, m.rhs, m.margin());
    Ok(())
}
