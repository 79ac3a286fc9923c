//! Replacement traces for the gradient and symmetric gradient, and the
//! Cauchy–Riemann operator as the failing case.

use tracelab::celliptic::{is_c_elliptic, kernel_basis, replacement_trace, DiffOperator, DEFAULT_DEGREE_CAP};
use tracelab::grid::{BoundaryGrid, HalfSpaceField, LevelSchedule};
use tracelab::norms::lp_norm;
use tracelab::profiles::bump;

fn field(components: usize) -> tracelab::Result<HalfSpaceField> {
    let h = 1.0 / 256.0;
    let grid = BoundaryGrid::new(1, 3.0, h)?;
    let levels = LevelSchedule::Uniform { spacing: h, top: 3.0, include_zero: true }.levels()?;
    let mut vals = Vec::new();
    for &t in &levels {
        for i in 0..grid.len() {
            let x = grid.point(i)[0];
            let b = bump(x * x + t * t);
            vals.push(b);
            if components == 2 {
                vals.push(x * b);
            }
        }
    }
    HalfSpaceField::new(grid, levels, components, vals)
}

fn main() -> tracelab::Result<()> {
    for op in [DiffOperator::gradient(2)?, DiffOperator::symmetric_gradient_2d()] {
        let verdict = is_c_elliptic(&op, 2000, 0);
        let basis = kernel_basis(&op, DEFAULT_DEGREE_CAP)?;
        println!(
            "{}: C-elliptic {} (σ_min {:.3}), kernel dims {:?}",
            op.name(),
            verdict.is_elliptic(),
            verdict.min_singular_value(),
            basis.dimensions_by_degree()
        );
        let u = field(op.components())?;
        let boundary = u.level_function(0);
        let run = replacement_trace(&u, &basis, 0, 6)?;
        for l in &run.levels {
            let err = lp_norm(&l.trace.sub(&boundary)?, 1.0)? / lp_norm(&boundary, 1.0)?;
            println!("  j={} cubes={:<4} rel L1 error {err:.3e} sup ratio {:.3}", l.level, l.cube_count, l.linf_ratio);
        }
    }
    let cr = DiffOperator::cauchy_riemann();
    println!("{}: C-elliptic {}", cr.name(), is_c_elliptic(&cr, 2000, 0).is_elliptic());
    match kernel_basis(&cr, DEFAULT_DEGREE_CAP) {
        Err(e) => println!("  {e}"),
        Ok(b) => println!("  unexpected finite kernel of size {}", b.len()),
    }
    Ok(())
}
