//! Boundary data used by the experiments and the test suites.

use crate::error::Result;
use crate::grid::{sample_boundary, BoundaryGrid, BoundaryGridFunction};
use crate::profiles::{bump, quintic_step};

/// Analytic boundary profiles on `R^{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryProfile {
    /// `amp · exp(-|x - c|² / width²)`.
    Gaussian { amp: f64, width: f64, centre: [f64; 2] },
    /// Indicator of the cube `|x_i| <= radius`.
    Indicator { radius: f64 },
    /// 1 on `|x| <= radius`, quintic ramp to 0 over `ramp`.
    Plateau { radius: f64, ramp: f64 },
    /// `(1 + |x|)^{-alpha}`.
    PowerDecay { alpha: f64 },
    /// `amp · (1 - |x - c|²/radius²)³` on the ball.
    CompactBump { amp: f64, radius: f64, centre: [f64; 2] },
    /// Mean-zero pair: a bump at `+shift e_1` minus one at `-shift e_1`.
    OddBump { amp: f64, radius: f64, shift: f64 },
}

fn dist2(x: &[f64], c: [f64; 2]) -> f64 {
    x.iter().enumerate().map(|(i, v)| (v - c[i]).powi(2)).sum()
}

impl BoundaryProfile {
    pub fn gaussian(amp: f64, width: f64) -> Self {
        Self::Gaussian { amp, width, centre: [0.0; 2] }
    }

    pub fn compact_bump(amp: f64, radius: f64) -> Self {
        Self::CompactBump { amp, radius, centre: [0.0; 2] }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            Self::Gaussian { amp, width, centre } => amp * (-dist2(x, centre) / (width * width)).exp(),
            Self::Indicator { radius } => {
                if x.iter().all(|v| v.abs() <= radius + 1e-12) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Plateau { radius, ramp } => {
                let r = dist2(x, [0.0; 2]).sqrt();
                1.0 - quintic_step((r - radius) / ramp)
            }
            Self::PowerDecay { alpha } => (1.0 + dist2(x, [0.0; 2]).sqrt()).powf(-alpha),
            Self::CompactBump { amp, radius, centre } => amp * bump(dist2(x, centre) / (radius * radius)),
            Self::OddBump { amp, radius, shift } => {
                let plus = bump(dist2(x, [shift, 0.0]) / (radius * radius));
                let minus = bump(dist2(x, [-shift, 0.0]) / (radius * radius));
                amp * (plus - minus)
            }
        }
    }

    pub fn sample(&self, grid: &BoundaryGrid) -> Result<BoundaryGridFunction> {
        sample_boundary(|x| self.eval(x), grid)
    }
}

/// Ten smooth, well-localized profiles for corpus-wide checks.
///
/// Widths suit a truncated boundary of half-extent 1.5 or more.
pub fn smooth_corpus() -> Vec<BoundaryProfile> {
    vec![
        BoundaryProfile::gaussian(1.0, 0.25),
        BoundaryProfile::gaussian(3.0, 0.25),
        BoundaryProfile::gaussian(2.0, 0.2),
        BoundaryProfile::Gaussian { amp: 1.5, width: 0.2, centre: [0.3, -0.2] },
        BoundaryProfile::Gaussian { amp: -2.0, width: 0.25, centre: [-0.25, 0.1] },
        BoundaryProfile::compact_bump(1.0, 0.8),
        BoundaryProfile::compact_bump(3.0, 0.6),
        BoundaryProfile::CompactBump { amp: 2.0, radius: 0.7, centre: [0.2, 0.2] },
        BoundaryProfile::OddBump { amp: 2.0, radius: 0.4, shift: 0.45 },
        BoundaryProfile::Plateau { radius: 0.3, ramp: 0.5 },
    ]
}
