//! Piecewise-linear "staircase" lifting for `p = 1`.
//!
//! Smooth approximants `f_j -> f` in `L¹` are placed at heights `t_j ↓ 0` and
//! joined linearly in `x_n`. The layer widths shrink fast enough, relative to
//! the size of each `f_j`, for the field to land in `W^{1,1} ∩ L^q`.

use std::io::Write;

use crate::error::{out_of_range, Error, Result};
use crate::exponents::LebesgueExponent;
use crate::grid::{BoundaryGrid, BoundaryGridFunction, HalfSpaceField};
use crate::norms::{boundary_gradient, field_lp_power, lp_norm, lp_power, Quadrature};
use crate::profiles::{mollify, quintic_step};
use crate::reduce::CompensatedSum;

/// Limits for the adaptive approximant search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproximantOptions {
    /// Mollifier radius tried first for `f_1`.
    pub initial_width: f64,
    /// Halvings allowed per member before giving up.
    pub max_halvings: usize,
    pub max_members: usize,
}

impl Default for ApproximantOptions {
    fn default() -> Self {
        Self { initial_width: 0.5, max_halvings: 40, max_members: 30 }
    }
}

/// `f_0 = 0, f_1, …, f_J` with `‖f - f_j‖₁ <= 2^{-j} ‖f‖₁`.
#[derive(Debug, Clone)]
pub struct ApproximatingSequence {
    pub data: BoundaryGridFunction,
    pub members: Vec<BoundaryGridFunction>,
    /// `e_j = ‖f - f_j‖₁`.
    pub errors: Vec<f64>,
    /// Mollifier radius used for each member (0 for `f_0`).
    pub mollifier_widths: Vec<f64>,
    pub data_l1: f64,
}

impl ApproximatingSequence {
    pub fn depth(&self) -> usize {
        self.members.len() - 1
    }
}

/// Tensor cutoff equal to 1 on `|x_a| <= radius` and 0 beyond `radius + ramp`.
fn support_cutoff(grid: &BoundaryGrid, radius: f64, ramp: f64) -> Vec<f64> {
    let dim = grid.dim();
    (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            x[..dim].iter().map(|v| 1.0 - quintic_step((v.abs() - radius) / ramp)).product()
        })
        .collect()
}

/// Mollify and cut off `f` at shrinking radii until each error target is met.
pub fn build_approximants(f: &BoundaryGridFunction, depth: usize, opts: &ApproximantOptions) -> Result<ApproximatingSequence> {
    if depth > opts.max_members {
        return out_of_range(format!("depth {depth} exceeds the configured maximum {}", opts.max_members));
    }
    if f.components() != 1 {
        return out_of_range("staircase lifting takes scalar data");
    }
    let grid = f.grid().clone();
    let total = lp_norm(f, 1.0)?;
    let mut members = vec![BoundaryGridFunction::zeros(grid.clone())];
    let mut errors = vec![total];
    let mut widths = vec![0.0];
    let mut width = opts.initial_width;
    let l = grid.half_extent();
    for j in 1..=depth {
        let target = total * 0.5f64.powi(j as i32);
        let scale = 0.5f64.powi(j as i32);
        let chi = support_cutoff(&grid, l * (1.0 - scale), 0.5 * l * scale);
        let mut found = None;
        let mut achieved = f64::INFINITY;
        for _ in 0..=opts.max_halvings {
            let smooth = mollify(f, width)?;
            let values: Vec<f64> = smooth.values().iter().zip(&chi).map(|(v, c)| v * c).collect();
            let candidate = BoundaryGridFunction::new(grid.clone(), values)?;
            let err = lp_norm(&candidate.sub(f)?, 1.0)?;
            achieved = err;
            if err <= target {
                found = Some((candidate, err));
                break;
            }
            width *= 0.5;
        }
        let (member, err) = found.ok_or(Error::ApproximationTarget { j, achieved, target })?;
        members.push(member);
        errors.push(err);
        widths.push(width);
    }
    Ok(ApproximatingSequence { data: f.clone(), members, errors, mollifier_widths: widths, data_l1: total })
}

/// Layer heights `t_0 > t_1 > … > t_J > 0` and the quantities they come from.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSchedule {
    pub q: LebesgueExponent,
    /// `‖f‖₁^q`, or `‖f‖₁` for `q = ∞`.
    pub scale: f64,
    /// `γ_j = ‖f_j‖_q^q + ‖∇'f_j‖₁` (`‖f_j‖_∞ + ‖∇'f_j‖₁` for `q = ∞`).
    pub gammas: Vec<f64>,
    /// `s_j = t_j - t_{j+1}`, `j < J`.
    pub widths: Vec<f64>,
    /// `t_0, …, t_J`.
    pub levels: Vec<f64>,
}

impl LayerSchedule {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// CSV with columns `j,e_j,gamma_j,s_j,t_j`; `s_J` is left empty.
    pub fn write_csv<W: Write>(&self, errors: &[f64], w: &mut W) -> Result<()> {
        writeln!(w, "j,e_j,gamma_j,s_j,t_j")?;
        for j in 0..self.levels.len() {
            let s = self.widths.get(j).map(|v| v.to_string()).unwrap_or_default();
            writeln!(w, "{j},{},{},{s},{}", errors[j], self.gammas[j], self.levels[j])?;
        }
        Ok(())
    }
}

fn gamma(f: &BoundaryGridFunction, q: LebesgueExponent) -> Result<f64> {
    let size = match q {
        LebesgueExponent::Finite(q) => lp_power(f, q)?,
        LebesgueExponent::Infinite => lp_norm(f, LebesgueExponent::Infinite)?,
    };
    Ok(size + lp_norm(&boundary_gradient(f)?, 1.0)?)
}

/// `s_j = 2^{-j-1} F / (1 + γ_j + γ_{j+1} + F)`.
///
/// The layers below `t_J` are not realized; `t_J` is the tail sum of the same
/// formula with `γ` frozen at `γ_J`, i.e. `2^{-J} F / (1 + 2γ_J + F)`. Heights
/// are suffix sums accumulated with compensation.
pub fn build_schedule(seq: &ApproximatingSequence, q: LebesgueExponent) -> Result<LayerSchedule> {
    if seq.data_l1 == 0.0 {
        return Err(Error::Empty("zero data gives a degenerate schedule".into()));
    }
    let depth = seq.depth();
    let scale = match q {
        LebesgueExponent::Finite(q) => seq.data_l1.powf(q),
        LebesgueExponent::Infinite => seq.data_l1,
    };
    let gammas = seq.members.iter().map(|m| gamma(m, q)).collect::<Result<Vec<_>>>()?;
    let widths: Vec<f64> = (0..depth)
        .map(|j| 0.5f64.powi(j as i32 + 1) * scale / (1.0 + gammas[j] + gammas[j + 1] + scale))
        .collect();
    let tail = 0.5f64.powi(depth as i32) * scale / (1.0 + 2.0 * gammas[depth] + scale);
    let mut levels = vec![0.0; depth + 1];
    let mut acc = CompensatedSum::new();
    acc.add(tail);
    levels[depth] = acc.value();
    for j in (0..depth).rev() {
        acc.add(widths[j]);
        levels[j] = acc.value();
    }
    Ok(LayerSchedule { q, scale, gammas, widths, levels })
}

/// The staircase field sampled on `0`, the layer heights and
/// `subdivisions - 1` interior heights per strip.
#[derive(Debug, Clone)]
pub struct StaircaseField {
    pub schedule: LayerSchedule,
    pub sequence: ApproximatingSequence,
    pub field: HalfSpaceField,
    /// Level index of `t_j` in `field`.
    pub layer_index: Vec<usize>,
}

/// Build the approximants, schedule and field for `q > n/(n-1)` or `q = ∞`.
pub fn staircase_extend(
    f: &BoundaryGridFunction,
    q: impl Into<LebesgueExponent>,
    depth: usize,
    subdivisions: usize,
    opts: &ApproximantOptions,
) -> Result<StaircaseField> {
    let q = q.into();
    let n = f.grid().ambient_dim() as f64;
    if let LebesgueExponent::Finite(qv) = q {
        if !(qv > n / (n - 1.0)) {
            return out_of_range(format!("need q > n/(n-1) = {}, got {qv}", n / (n - 1.0)));
        }
    }
    let seq = build_approximants(f, depth, opts)?;
    let schedule = build_schedule(&seq, q)?;
    staircase_field(seq, schedule, subdivisions)
}

/// Assemble the field from a sequence and schedule.
pub fn staircase_field(seq: ApproximatingSequence, schedule: LayerSchedule, subdivisions: usize) -> Result<StaircaseField> {
    let depth = schedule.depth();
    let subdivisions = subdivisions.max(1);
    let t = &schedule.levels;
    // heights ascending: 0, t_J, interior of strip J-1, t_{J-1}, …, t_0
    let mut levels = vec![0.0, t[depth]];
    let mut layer_index = vec![0usize; depth + 1];
    layer_index[depth] = 1;
    let mut plan: Vec<(usize, f64)> = vec![(depth, 1.0), (depth, 1.0)];
    for j in (0..depth).rev() {
        for k in 1..=subdivisions {
            // weight on f_{j+1}; λ = 0 reproduces f_j at t_j
            let lam = 1.0 - k as f64 / subdivisions as f64;
            let height = if k == subdivisions { t[j] } else { t[j + 1] + (t[j] - t[j + 1]) * (k as f64 / subdivisions as f64) };
            levels.push(height);
            plan.push((j, lam));
        }
        layer_index[j] = levels.len() - 1;
    }
    let grid = seq.data.grid().clone();
    let mut values = Vec::with_capacity(grid.len() * levels.len());
    for &(j, lam) in &plan {
        if lam == 1.0 {
            let idx = if j == depth { depth } else { j + 1 };
            values.extend_from_slice(seq.members[idx].values());
        } else if lam == 0.0 {
            values.extend_from_slice(seq.members[j].values());
        } else {
            let (a, b) = (seq.members[j].values(), seq.members[j + 1].values());
            values.extend(a.iter().zip(b).map(|(x, y)| (1.0 - lam) * x + lam * y));
        }
    }
    let field = HalfSpaceField::new(grid, levels, 1, values)?;
    Ok(StaircaseField { schedule, sequence: seq, field, layer_index })
}

/// Measured quantities against the bounds of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseReport {
    pub data_l1: f64,
    /// `‖u‖_q^q` (finite q) or `‖u‖_∞`.
    pub size: f64,
    /// `(2^q + 1) ‖f‖₁^q`, or `‖f‖_∞` for `q = ∞`.
    pub size_bound: f64,
    /// `‖∂_n u‖₁ = Σ_j ‖f_{j+1} - f_j‖₁`, exact for the piecewise-linear field.
    pub normal_l1: f64,
    pub normal_bound: f64,
    /// `∫|∇'u|` by quadrature over the sampled levels.
    pub tangential_l1: f64,
    /// `F`, which bounds the tangential integral by the choice of widths.
    pub tangential_bound: f64,
    /// `(‖u(·,t_j) - f‖₁, 2^{-j}‖f‖₁)` per layer.
    pub trace_errors: Vec<(f64, f64)>,
    /// Layers where `u(·,t_j)` differs from `f_j` in any bit.
    pub inexact_layers: usize,
}

impl StaircaseReport {
    pub fn all_hold(&self) -> bool {
        self.size <= self.size_bound
            && self.normal_l1 <= self.normal_bound
            && self.tangential_l1 <= self.tangential_bound
            && self.trace_errors.iter().all(|(e, b)| e <= b)
            && self.inexact_layers == 0
    }
}

struct TangentialQuadrature<'a> {
    grad: &'a [BoundaryGridFunction],
    weights: Vec<f64>,
}

impl Quadrature for TangentialQuadrature<'_> {
    fn sample_count(&self) -> usize {
        self.grad.len() * self.grad[0].grid().len()
    }
    fn sample_weight(&self, i: usize) -> f64 {
        let nodes = self.grad[0].grid().len();
        self.weights[i / nodes] * self.grad[0].grid().weight(i % nodes)
    }
    fn sample_magnitude(&self, i: usize) -> f64 {
        let nodes = self.grad[0].grid().len();
        self.grad[i / nodes].magnitude(i % nodes)
    }
}

pub fn staircase_bounds_check(st: &StaircaseField) -> Result<StaircaseReport> {
    let seq = &st.sequence;
    let sched = &st.schedule;
    let total = seq.data_l1;
    let (size, size_bound) = match sched.q {
        LebesgueExponent::Finite(q) => (field_lp_power(&st.field, q)?, (2f64.powf(q) + 1.0) * total.powf(q)),
        LebesgueExponent::Infinite => (st.field.max_abs(), lp_norm(&seq.data, LebesgueExponent::Infinite)?),
    };
    let mut normal = CompensatedSum::new();
    for j in 0..sched.depth() {
        normal.add(lp_norm(&seq.members[j + 1].sub(&seq.members[j])?, 1.0)?);
    }
    let grads = (0..st.field.levels().len())
        .map(|k| boundary_gradient(&st.field.level_function(k)))
        .collect::<Result<Vec<_>>>()?;
    let levels = st.field.levels();
    // no constant panel below t_J: u = f_J there and the panel [0, t_J] is a
    // trapezoid between two equal slices
    let weights = crate::norms::level_weights(levels);
    let tq = TangentialQuadrature { grad: &grads, weights };
    let tangential = crate::reduce::deterministic_sum(tq.sample_count(), |i| tq.sample_weight(i) * tq.sample_magnitude(i));
    let trace_errors = (0..=sched.depth())
        .map(|j| {
            let e = lp_norm(&st.field.level_function(st.layer_index[j]).sub(&seq.data)?, 1.0)?;
            Ok((e, total * 0.5f64.powi(j as i32)))
        })
        .collect::<Result<Vec<_>>>()?;
    let inexact = (0..=sched.depth())
        .filter(|&j| st.field.slice(st.layer_index[j]) != seq.members[j].values())
        .count();
    Ok(StaircaseReport {
        data_l1: total,
        size,
        size_bound,
        normal_l1: normal.value(),
        normal_bound: 3.0 * total,
        tangential_l1: tangential,
        tangential_bound: sched.scale,
        trace_errors,
        inexact_layers: inexact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::BoundaryProfile;

    fn line() -> BoundaryGrid {
        BoundaryGrid::new(1, 4.0, 0.01).unwrap()
    }

    #[test]
    fn zero_data() {
        let z = BoundaryGridFunction::zeros(line());
        let seq = build_approximants(&z, 4, &ApproximantOptions::default()).unwrap();
        assert!(seq.members.iter().all(|m| m.values().iter().all(|&v| v == 0.0)));
        assert!(build_schedule(&seq, 2.0.into()).is_err());
    }

    #[test]
    fn indicator_errors_geometric() {
        let f = BoundaryProfile::Indicator { radius: 1.0 }.sample(&line()).unwrap();
        let seq = build_approximants(&f, 6, &ApproximantOptions::default()).unwrap();
        let l1 = lp_norm(&f, 1.0).unwrap();
        for (j, e) in seq.errors.iter().enumerate() {
            assert!(*e <= l1 * 0.5f64.powi(j as i32));
        }
        assert!(seq.errors[3] <= l1 / 8.0);
    }

    #[test]
    fn schedule_decreasing() {
        let f = BoundaryProfile::Indicator { radius: 1.0 }.sample(&line()).unwrap();
        let seq = build_approximants(&f, 6, &ApproximantOptions::default()).unwrap();
        let s = build_schedule(&seq, 2.0.into()).unwrap();
        assert!(s.levels.windows(2).all(|w| w[1] < w[0]));
        assert!(s.levels[0] <= s.scale);
        for (j, w) in s.widths.iter().enumerate() {
            assert!(*w <= 0.5f64.powi(j as i32 + 1) * s.scale);
        }
    }

    #[test]
    fn rejects_small_q() {
        let f = BoundaryProfile::Indicator { radius: 1.0 }.sample(&line()).unwrap();
        assert!(staircase_extend(&f, 2.0, 3, 2, &ApproximantOptions::default()).is_err());
        assert!(staircase_extend(&f, 2.5, 3, 2, &ApproximantOptions::default()).is_ok());
    }

    #[test]
    fn linf_variant_is_bounded() {
        let f = BoundaryProfile::gaussian(1.5, 0.5).sample(&line()).unwrap();
        let st = staircase_extend(&f, LebesgueExponent::Infinite, 5, 3, &ApproximantOptions::default()).unwrap();
        assert!(st.field.max_abs() <= f.max_abs());
    }
}
