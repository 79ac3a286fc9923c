//! Discrete Hardy–Littlewood maximal function.
//!
//! A discrete ball is the set of grid nodes at distance strictly less than the
//! radius from the centre, so the smallest ball of radius `h` is the centre
//! node alone and `Mf >= |f|` holds exactly. Averages divide by the number of
//! included nodes (counting measure), which keeps sublinearity exact.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{BoundaryGrid, BoundaryGridFunction};

/// Increasing list of radii over which the supremum is taken.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusLadder {
    radii: Vec<f64>,
}

impl RadiusLadder {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Empty("radius ladder".into()));
        }
        if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::OutOfRange("radii must be positive and increasing".into()));
        }
        Ok(Self { radii })
    }

    /// Multiples of `h` from `h` to `2L`.
    pub fn default_for(grid: &BoundaryGrid) -> Self {
        Self::refined_for(grid, 1)
    }

    /// Multiples of `h/factor` from `h` to `2L`; a superset of the default ladder.
    pub fn refined_for(grid: &BoundaryGrid, factor: usize) -> Self {
        let factor = factor.max(1);
        let h = grid.spacing();
        let steps = (grid.per_axis() - 1) * factor;
        let radii = (factor..=steps).map(|k| k as f64 * h / factor as f64).collect();
        Self { radii }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

/// Lattice offsets sorted by length, with the number inside each ball.
struct BallTable {
    offsets: Vec<[isize; 2]>,
    cuts: Vec<usize>,
}

impl BallTable {
    fn new(grid: &BoundaryGrid, ladder: &RadiusLadder) -> Self {
        let h = grid.spacing();
        let rmax = *ladder.radii.last().unwrap();
        let reach = ((rmax / h).ceil() as isize).min(grid.per_axis() as isize - 1);
        let second = if grid.dim() == 2 { reach } else { 0 };
        let mut offsets: Vec<([isize; 2], i64)> = Vec::new();
        for b in -second..=second {
            for a in -reach..=reach {
                offsets.push(([a, b], (a * a + b * b) as i64));
            }
        }
        offsets.sort_by_key(|&(o, d2)| (d2, o[1], o[0]));
        // dist < r  <=>  d2 < (r/h)^2, with a tolerance for radii on lattice shells
        let cuts = ladder
            .radii
            .iter()
            .map(|r| {
                let lim = (r / h).powi(2) * (1.0 - 1e-12);
                offsets.partition_point(|&(_, d2)| (d2 as f64) < lim)
            })
            .collect();
        Self {
            offsets: offsets.into_iter().map(|(o, _)| o).collect(),
            cuts,
        }
    }
}

fn shifted(grid: &BoundaryGrid, idx: [usize; 2], off: [isize; 2]) -> Option<usize> {
    let m = grid.per_axis() as isize;
    let a = idx[0] as isize + off[0];
    let b = idx[1] as isize + off[1];
    if a < 0 || a >= m || b < 0 || b >= m {
        return None;
    }
    Some(grid.node_from_multi([a as usize, b as usize]))
}

/// `Mf(x) = max_r avg_{B(x,r)} |f|` over the ladder.
pub fn maximal_function(f: &BoundaryGridFunction, ladder: &RadiusLadder) -> Result<BoundaryGridFunction> {
    let grid = f.grid();
    let table = BallTable::new(grid, ladder);
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|node| {
            let idx = grid.multi_index(node);
            let mut sum = 0.0;
            let mut count = 0usize;
            let mut pos = 0usize;
            let mut best = 0.0f64;
            for &cut in &table.cuts {
                while pos < cut {
                    if let Some(j) = shifted(grid, idx, table.offsets[pos]) {
                        sum += f.magnitude(j);
                        count += 1;
                    }
                    pos += 1;
                }
                if count > 0 {
                    best = best.max(sum / count as f64);
                }
            }
            best
        })
        .collect();
    BoundaryGridFunction::new(grid.clone(), values)
}
