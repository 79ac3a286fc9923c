//! Poisson kernel of the upper half-space, the harmonic extension of boundary
//! data, maximal domination checks and the strip-growth experiment for slowly
//! decaying data.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{out_of_range, Result};
use crate::grid::{BoundaryGrid, BoundaryGridFunction, HalfSpaceField, LevelSchedule};
use crate::maximal::{maximal_function, RadiusLadder};
use crate::norms::level_weights;
use crate::reduce::{pairwise_sum, CompensatedSum};

/// `Γ(n/2)` by the recursion `Γ(x+1) = xΓ(x)` from `Γ(1)` or `Γ(1/2)`.
fn gamma_half_integer(n: usize) -> f64 {
    let mut g = if n % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    while 2.0 * x < n as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Normalization `Γ(n/2)/π^{n/2}` making each kernel slice a probability density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonKernelParams {
    pub n: usize,
    pub c_n: f64,
}

impl PoissonKernelParams {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return out_of_range(format!("dimension must be >= 2, got {n}"));
        }
        Ok(Self {
            n,
            c_n: gamma_half_integer(n) / PI.powf(n as f64 / 2.0),
        })
    }
}

/// `c_n x_n / (x_n² + |x'|²)^{n/2}`.
pub fn poisson_kernel(x: &[f64], xn: f64, params: &PoissonKernelParams) -> Result<f64> {
    if !(xn > 0.0) {
        return out_of_range(format!("kernel needs x_n > 0, got {xn}"));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum::<f64>() + xn * xn;
    Ok(params.c_n * xn / r2.powf(params.n as f64 / 2.0))
}

/// Kernel mass of the box `[a,b] (x [c,d])` at height `t`, in closed form.
fn box_mass(dim: usize, t: f64, lo: [f64; 2], hi: [f64; 2]) -> f64 {
    match dim {
        1 => ((hi[0] / t).atan() - (lo[0] / t).atan()) / PI,
        _ => {
            let corner = |x: f64, y: f64| (x * y / (t * (x * x + y * y + t * t).sqrt())).atan();
            (corner(hi[0], hi[1]) - corner(lo[0], hi[1]) - corner(hi[0], lo[1]) + corner(lo[0], lo[1]))
                / (2.0 * PI)
        }
    }
}

/// Quadrature weights by lattice offset: the kernel mass of the cell around
/// each source node. Indexed by `(da + m - 1) + (2m - 1)(db + m - 1)`.
fn offset_weights(grid: &BoundaryGrid, t: f64) -> Vec<f64> {
    let m = grid.per_axis() as isize;
    let h = grid.spacing();
    let span = 2 * m - 1;
    let rows = if grid.dim() == 2 { span } else { 1 };
    let mut w = Vec::with_capacity((span * rows) as usize);
    for b in 0..rows {
        for a in 0..span {
            let da = (a - (m - 1)) as f64 * h;
            let db = if grid.dim() == 2 { (b - (m - 1)) as f64 * h } else { 0.0 };
            w.push(box_mass(
                grid.dim(),
                t,
                [da - 0.5 * h, db - 0.5 * h],
                [da + 0.5 * h, db + 0.5 * h],
            ));
        }
    }
    w
}

/// Dot product with four interleaved accumulators, combined in fixed order.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    for k in 4 * chunks..a.len() {
        acc[0] += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

/// Convolve `f` with the kernel at height `t` (cell-integrated weights).
///
/// The lattice sum is organized by rows: each output row accumulates, over
/// source rows in index order, a 1-D correlation against one row of the
/// offset table. Rows of `f` that vanish are skipped.
pub fn poisson_slice(f: &BoundaryGridFunction, t: f64) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return out_of_range(format!("levels must be positive, got {t}"));
    }
    let grid = f.grid();
    let comps = f.components();
    let m = grid.per_axis();
    let span = 2 * m - 1;
    let rows = if grid.dim() == 2 { m } else { 1 };
    // reversed so that the source index runs forward through the table row
    let weights: Vec<f64> = offset_weights(grid, t)
        .chunks(span)
        .flat_map(|row| row.iter().rev().copied().collect::<Vec<_>>())
        .collect();
    // component-major copies of the source rows
    let planes: Vec<Vec<f64>> = (0..comps)
        .map(|c| (0..grid.len()).map(|j| f.node_values(j)[c]).collect())
        .collect();
    let live: Vec<Vec<usize>> = planes
        .iter()
        .map(|pl| (0..rows).filter(|&b| pl[b * m..(b + 1) * m].iter().any(|&v| v != 0.0)).collect())
        .collect();
    let mut out = vec![0.0; grid.len() * comps];
    out.par_chunks_mut(m * comps).enumerate().for_each(|(bi, row_out)| {
        for c in 0..comps {
            for &bj in &live[c] {
                let db = bi + (m - 1) - bj;
                let table = if grid.dim() == 2 { &weights[db * span..(db + 1) * span] } else { &weights[..] };
                let src = &planes[c][bj * m..(bj + 1) * m];
                for ai in 0..m {
                    // reversed index of offset (ai - aj) is (m - 1 - ai) + aj
                    let start = m - 1 - ai;
                    row_out[ai * comps + c] += dot(&table[start..start + m], src);
                }
            }
        }
    });
    Ok(out)
}

/// Poisson extension `v(·, x_n) = K(·, x_n) * f` at the given levels.
pub fn poisson_extend(f: &BoundaryGridFunction, levels: &[f64]) -> Result<HalfSpaceField> {
    if let Some(&bad) = levels.iter().find(|&&t| !(t > 0.0)) {
        return out_of_range(format!("levels must be positive, got {bad}"));
    }
    let slices = levels
        .iter()
        .map(|&t| poisson_slice(f, t))
        .collect::<Result<Vec<_>>>()?;
    HalfSpaceField::new(
        f.grid().clone(),
        levels.to_vec(),
        f.components(),
        slices.into_iter().flatten().collect(),
    )
}

/// Outcome of comparing `|v|` with `Mf` over all samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationReport {
    /// `max(|v(x', x_n)| - Mf(x'))`; non-positive when domination holds.
    pub max_violation: f64,
    /// `(level index, node)` of the worst sample.
    pub location: (usize, usize),
    pub max_v: f64,
    pub max_mf: f64,
}

impl DominationReport {
    /// Positive part of the violation.
    pub fn gap(&self) -> f64 {
        self.max_violation.max(0.0)
    }
}

/// Compare `|v|` against `Mf` where `Mf` is supplied.
pub fn domination_against(v: &HalfSpaceField, mf: &BoundaryGridFunction) -> DominationReport {
    let nodes = v.grid().len();
    let mut worst = (f64::NEG_INFINITY, (0, 0));
    for k in 0..v.levels().len() {
        for i in 0..nodes {
            let d = v.magnitude(k, i) - mf.value(i);
            if d > worst.0 {
                worst = (d, (k, i));
            }
        }
    }
    DominationReport {
        max_violation: worst.0,
        location: worst.1,
        max_v: v.max_abs(),
        max_mf: mf.max_abs(),
    }
}

/// Check `|v| <= Mf` at every grid point of `v`.
pub fn check_maximal_domination(
    v: &HalfSpaceField,
    f: &BoundaryGridFunction,
    ladder: &RadiusLadder,
) -> Result<DominationReport> {
    let mf = maximal_function(f, ladder)?;
    Ok(domination_against(v, &mf))
}

/// Grid and level resolution for the strip-growth experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct StripSetup {
    pub half_extent: f64,
    pub spacing: f64,
    /// Geometric levels per doubling of `x_n`.
    pub levels_per_octave: usize,
}

impl Default for StripSetup {
    fn default() -> Self {
        Self {
            half_extent: 1024.0,
            spacing: 0.5,
            levels_per_octave: 8,
        }
    }
}

/// One row of a growth table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRow {
    pub height: f64,
    /// `‖v‖_{L^p}` over `x' ∈ [-L, L]^{n-1}`, `x_n ∈ [lower, height]`.
    pub strip_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthTable {
    pub lower: f64,
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `log strip_norm` against `log height`.
    pub fitted_exponent: f64,
}

impl GrowthTable {
    pub fn strictly_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].strip_norm > w[0].strip_norm)
    }

    /// Last over first strip norm.
    pub fn growth_ratio(&self) -> f64 {
        self.rows.last().unwrap().strip_norm / self.rows[0].strip_norm
    }

    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "H,strip_norm,fitted_exponent")?;
        for r in &self.rows {
            writeln!(w, "{},{},{}", r.height, r.strip_norm, self.fitted_exponent)?;
        }
        Ok(())
    }
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// `L^p` norms of the Poisson extension of `f` over strips `[lower, H]`.
///
/// Heights must be reachable from `lower` on the geometric level ladder, i.e.
/// `H / lower` an integer power of two.
pub fn strip_growth(
    f: &BoundaryGridFunction,
    p: f64,
    lower: f64,
    heights: &[f64],
    levels_per_octave: usize,
) -> Result<GrowthTable> {
    if heights.is_empty() || heights.windows(2).any(|w| w[1] <= w[0]) || heights[0] <= lower {
        return out_of_range("heights must be increasing and above the strip floor");
    }
    if !(p >= 1.0) || levels_per_octave == 0 {
        return out_of_range("need p >= 1 and at least one level per octave");
    }
    let top = *heights.last().unwrap();
    let ratio = 2f64.powf(1.0 / levels_per_octave as f64);
    let levels = LevelSchedule::Geometric { first: lower, ratio, top: top * (1.0 + 1e-12) }.levels()?;
    let ends: Vec<usize> = heights
        .iter()
        .map(|&hgt| {
            let octaves = (hgt / lower).log2();
            let k = (octaves * levels_per_octave as f64).round();
            if (octaves - octaves.round()).abs() > 1e-9 || k as usize >= levels.len() {
                out_of_range(format!("height {hgt} is not a power-of-two multiple of {lower}"))
            } else {
                Ok(k as usize)
            }
        })
        .collect::<Result<_>>()?;
    let grid = f.grid();
    let tangential: Vec<f64> = levels
        .iter()
        .map(|&t| {
            let slice = poisson_slice(f, t)?;
            let terms: Vec<f64> = (0..grid.len()).map(|i| grid.weight(i) * slice[i].abs().powf(p)).collect();
            Ok(pairwise_sum(&terms))
        })
        .collect::<Result<_>>()?;
    let rows: Vec<GrowthRow> = heights
        .iter()
        .zip(&ends)
        .map(|(&height, &end)| {
            let lv = &levels[..=end];
            let w = level_weights_interior(lv);
            let mut acc = CompensatedSum::new();
            for (k, wk) in w.iter().enumerate() {
                acc.add(wk * tangential[k]);
            }
            GrowthRow { height, strip_norm: acc.value().powf(1.0 / p) }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.height).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.strip_norm).collect();
    Ok(GrowthTable { lower, fitted_exponent: log_slope(&xs, &ys), rows })
}

/// Trapezoid weights on `[levels[0], levels[last]]` without the floor panel.
fn level_weights_interior(levels: &[f64]) -> Vec<f64> {
    let mut w = level_weights(levels);
    if levels[0] > 0.0 {
        w[0] -= levels[0];
    }
    w
}

/// Strip floor `2^{1/(n-1)}` above which the slowly decaying data provably
/// produces a non-integrable extension.
pub fn divergence_floor(n: usize) -> f64 {
    2f64.powf(1.0 / (n as f64 - 1.0))
}

/// Strip growth for `f(x') = (1 + |x'|)^{-α}` with `(n-1)/p < α <= n/p`.
pub fn divergence_experiment(
    alpha: f64,
    p: f64,
    n: usize,
    heights: &[f64],
    setup: &StripSetup,
) -> Result<GrowthTable> {
    if !(n == 2 || n == 3) {
        return out_of_range(format!("only n in {{2, 3}} is supported, got {n}"));
    }
    let nf = n as f64;
    if !(p >= 1.0 && alpha > (nf - 1.0) / p && alpha <= nf / p) {
        return out_of_range(format!(
            "alpha must lie in ((n-1)/p, n/p] = ({}, {}], got {alpha}",
            (nf - 1.0) / p,
            nf / p
        ));
    }
    let grid = BoundaryGrid::new(n - 1, setup.half_extent, setup.spacing)?;
    let f = crate::grid::sample_boundary(
        |x| (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt()).powf(-alpha),
        &grid,
    )?;
    strip_growth(&f, p, divergence_floor(n), heights, setup.levels_per_octave)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample_boundary;
    use approx::assert_relative_eq;

    #[test]
    fn normalization_constants() {
        assert_relative_eq!(PoissonKernelParams::new(2).unwrap().c_n, 1.0 / PI, max_relative = 1e-15);
        assert_relative_eq!(PoissonKernelParams::new(3).unwrap().c_n, 0.5 / PI, max_relative = 1e-15);
        // Γ(2)/π² and Γ(5/2)/π^{5/2}
        assert_relative_eq!(PoissonKernelParams::new(4).unwrap().c_n, 1.0 / (PI * PI), max_relative = 1e-15);
        assert_relative_eq!(
            PoissonKernelParams::new(5).unwrap().c_n,
            0.75 * PI.sqrt() / PI.powf(2.5),
            max_relative = 1e-14
        );
    }

    #[test]
    fn kernel_examples() {
        let k2 = PoissonKernelParams::new(2).unwrap();
        assert_relative_eq!(poisson_kernel(&[0.0], 1.0, &k2).unwrap(), 1.0 / PI);
        assert!(poisson_kernel(&[0.0], 0.0, &k2).is_err());
        let k3 = PoissonKernelParams::new(3).unwrap();
        let a = poisson_kernel(&[0.3, -0.7], 0.4, &k3).unwrap();
        assert_eq!(a, poisson_kernel(&[-0.3, 0.7], 0.4, &k3).unwrap());
        let lam = 2.5;
        let b = poisson_kernel(&[0.3 * lam, -0.7 * lam], 0.4 * lam, &k3).unwrap();
        assert_relative_eq!(b, lam.powi(-2) * a, max_relative = 1e-13);
    }

    #[test]
    fn cell_masses_sum_to_probability() {
        let g = BoundaryGrid::new(2, 2.0, 0.25).unwrap();
        let w = offset_weights(&g, 0.3);
        let total: f64 = w.iter().sum();
        assert!(total < 1.0 && total > 0.9, "{total}");
        // full lattice of cells on [-4.125, 4.125]^2: mass equals the box mass
        let expect = box_mass(2, 0.3, [-4.125, -4.125], [4.125, 4.125]);
        assert_relative_eq!(total, expect, max_relative = 1e-12);
    }

    #[test]
    fn zero_and_plateau() {
        let g = BoundaryGrid::new(1, 8.0, 0.125).unwrap();
        let z = BoundaryGridFunction::zeros(g.clone());
        let v = poisson_extend(&z, &[0.1, 1.0]).unwrap();
        assert!(v.values().iter().all(|&x| x == 0.0));
        let one = sample_boundary(|_| 1.0, &g).unwrap();
        let v = poisson_extend(&one, &[0.001, 0.01, 0.1]).unwrap();
        let centre = g.locate(&[0.0]).unwrap();
        let errs: Vec<f64> = (0..3).map(|k| 1.0 - v.at(k, centre, 0)).collect();
        assert!(errs[0] < 1e-4 && errs[0] < errs[1] && errs[1] < errs[2], "{errs:?}");
        assert!(poisson_extend(&one, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn positivity_and_sup_bound() {
        let g = BoundaryGrid::new(2, 2.0, 0.125).unwrap();
        let f = sample_boundary(|x| (-4.0 * (x[0] * x[0] + x[1] * x[1])).exp(), &g).unwrap();
        let v = poisson_extend(&f, &[0.01, 0.1, 1.0]).unwrap();
        assert!(v.values().iter().all(|&x| x >= 0.0));
        assert!(v.max_abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn rejects_alpha_outside_window() {
        let s = StripSetup { half_extent: 16.0, spacing: 0.5, levels_per_octave: 2 };
        assert!(divergence_experiment(1.2, 2.0, 2, &[4.0, 8.0], &s).is_err());
        assert!(divergence_experiment(0.5, 2.0, 2, &[4.0, 8.0], &s).is_err());
        assert!(divergence_experiment(0.9, 2.0, 2, &[4.0, 8.0], &s).is_ok());
    }
}
