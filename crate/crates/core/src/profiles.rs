//! Scalar profiles shared by the liftings: the smooth cutoff and the
//! compactly supported mollifier.

use rayon::prelude::*;

use crate::error::{out_of_range, Result};
use crate::grid::BoundaryGridFunction;

/// `6x⁵ - 15x⁴ + 10x³` clamped to `[0, 1]`.
#[inline]
pub fn quintic_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

#[inline]
pub fn quintic_step_derivative(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        30.0 * x * x * (1.0 - x) * (1.0 - x)
    }
}

/// `3x² - 2x³` clamped to `[0, 1]`; only C¹, kept as an alternate.
#[inline]
pub fn cubic_step(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutoffProfile {
    #[default]
    Quintic,
    Cubic,
}

impl std::str::FromStr for CutoffProfile {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "quintic" => Ok(Self::Quintic),
            "cubic" => Ok(Self::Cubic),
            other => Err(crate::Error::Config(format!("unknown cutoff profile {other:?}"))),
        }
    }
}

/// Non-increasing cutoff equal to 1 on `[0, 1]` and 0 on `[2, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SmoothCutoff {
    profile: CutoffProfile,
}

impl SmoothCutoff {
    pub fn new(profile: CutoffProfile) -> Self {
        Self { profile }
    }

    pub fn profile(&self) -> CutoffProfile {
        self.profile
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        match self.profile {
            CutoffProfile::Quintic => 1.0 - quintic_step(t - 1.0),
            CutoffProfile::Cubic => 1.0 - cubic_step(t - 1.0),
        }
    }

    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        match self.profile {
            CutoffProfile::Quintic => -quintic_step_derivative(t - 1.0),
            CutoffProfile::Cubic => {
                let x = t - 1.0;
                if x <= 0.0 || x >= 1.0 {
                    0.0
                } else {
                    -6.0 * x * (1.0 - x)
                }
            }
        }
    }

    /// Closed-form `max |η'|`, attained at `t = 3/2`.
    pub fn max_slope(&self) -> f64 {
        match self.profile {
            CutoffProfile::Quintic => 15.0 / 8.0,
            CutoffProfile::Cubic => 1.5,
        }
    }
}

/// The default quintic cutoff.
pub fn smooth_cutoff() -> SmoothCutoff {
    SmoothCutoff::default()
}

/// Unnormalized radial bump `(1 - ρ²)³` on the unit ball.
#[inline]
pub fn bump(rho2: f64) -> f64 {
    if rho2 >= 1.0 {
        0.0
    } else {
        let s = 1.0 - rho2;
        s * s * s
    }
}

/// Discrete mollification at radius `width`.
///
/// Stencil weights are the bump sampled at lattice offsets and renormalized
/// over the nodes that fall inside the grid, so every output is a convex
/// combination of inputs. For `width <= h` only the node itself contributes.
pub fn mollify(f: &BoundaryGridFunction, width: f64) -> Result<BoundaryGridFunction> {
    if !(width >= 0.0 && width.is_finite()) {
        return out_of_range(format!("mollifier width must be finite and >= 0, got {width}"));
    }
    let grid = f.grid();
    let h = grid.spacing();
    let reach = ((width / h).ceil() as isize).min(grid.per_axis() as isize - 1);
    if width <= h || reach == 0 {
        return Ok(f.clone());
    }
    let second = if grid.dim() == 2 { reach } else { 0 };
    let mut stencil = Vec::new();
    for b in -second..=second {
        for a in -reach..=reach {
            let w = bump(((a * a + b * b) as f64) * h * h / (width * width));
            if w > 0.0 {
                stencil.push(([a, b], w));
            }
        }
    }
    let comps = f.components();
    let m = grid.per_axis() as isize;
    let mut out = vec![0.0; grid.len() * comps];
    out.par_chunks_mut(comps).enumerate().for_each(|(i, slot)| {
        let idx = grid.multi_index(i);
        let mut mass = 0.0;
        for &(off, w) in &stencil {
            let a = idx[0] as isize + off[0];
            let b = idx[1] as isize + off[1];
            if a < 0 || a >= m || b < 0 || b >= m {
                continue;
            }
            let j = grid.node_from_multi([a as usize, b as usize]);
            mass += w;
            for (c, s) in slot.iter_mut().enumerate() {
                *s += w * f.node_values(j)[c];
            }
        }
        for s in slot.iter_mut() {
            *s /= mass;
        }
    });
    BoundaryGridFunction::with_components(grid.clone(), comps, out)
}
