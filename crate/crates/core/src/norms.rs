//! Discrete Lebesgue norms, finite-difference gradients and the fractional
//! Gagliardo seminorm.

use rayon::prelude::*;

use crate::error::{out_of_range, Error, Result};
use crate::exponents::LebesgueExponent;
use crate::grid::{BoundaryGrid, BoundaryGridFunction, HalfSpaceField};
use crate::reduce::{deterministic_max, deterministic_sum, CompensatedSum};

/// Default node cap for the quadratic-cost seminorm kernel.
pub const SEMINORM_NODE_CAP: usize = 4096;

/// Samples that carry quadrature weights.
pub trait Quadrature: Sync {
    fn sample_count(&self) -> usize;
    fn sample_weight(&self, i: usize) -> f64;
    /// Euclidean magnitude of sample `i`.
    fn sample_magnitude(&self, i: usize) -> f64;
}

impl Quadrature for BoundaryGridFunction {
    fn sample_count(&self) -> usize {
        self.grid().len()
    }
    fn sample_weight(&self, i: usize) -> f64 {
        self.grid().weight(i)
    }
    fn sample_magnitude(&self, i: usize) -> f64 {
        self.magnitude(i)
    }
}

/// Weights in `x_n` for a level stack: trapezoid between levels plus a
/// constant panel `[0, l_0]` when the stack does not start at 0.
pub fn level_weights(levels: &[f64]) -> Vec<f64> {
    let k = levels.len();
    let mut w = vec![0.0; k];
    if levels[0] > 0.0 {
        w[0] += levels[0];
    }
    for i in 0..k.saturating_sub(1) {
        let half = 0.5 * (levels[i + 1] - levels[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    w
}

/// A half-space field paired with its precomputed level weights.
struct FieldQuadrature<'a> {
    field: &'a HalfSpaceField,
    level_w: Vec<f64>,
}

impl Quadrature for FieldQuadrature<'_> {
    fn sample_count(&self) -> usize {
        self.field.grid().len() * self.field.levels().len()
    }
    fn sample_weight(&self, i: usize) -> f64 {
        let nodes = self.field.grid().len();
        self.level_w[i / nodes] * self.field.grid().weight(i % nodes)
    }
    fn sample_magnitude(&self, i: usize) -> f64 {
        let nodes = self.field.grid().len();
        self.field.magnitude(i / nodes, i % nodes)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return out_of_range(format!("Lebesgue exponent must be >= 1, got {p}"));
    }
    Ok(())
}

fn power_integral<Q: Quadrature>(u: &Q, p: f64) -> f64 {
    deterministic_sum(u.sample_count(), |i| {
        let m = u.sample_magnitude(i);
        if m == 0.0 {
            0.0
        } else {
            u.sample_weight(i) * m.powf(p)
        }
    })
}

fn sup<Q: Quadrature>(u: &Q) -> f64 {
    deterministic_max(u.sample_count(), |i| u.sample_magnitude(i)).unwrap_or(0.0)
}

/// `∫ |f|^p` by composite trapezoid quadrature.
pub fn lp_power(f: &BoundaryGridFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(power_integral(f, p))
}

/// `‖f‖_p` on the boundary grid; `∞` gives the grid maximum of `|f|`.
pub fn lp_norm(f: &BoundaryGridFunction, p: impl Into<LebesgueExponent>) -> Result<f64> {
    match p.into() {
        LebesgueExponent::Infinite => Ok(sup(f)),
        LebesgueExponent::Finite(p) => Ok(lp_power(f, p)?.powf(1.0 / p)),
    }
}

/// `∫∫ |u|^p` over grid × levels.
pub fn field_lp_power(u: &HalfSpaceField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let q = FieldQuadrature { field: u, level_w: level_weights(u.levels()) };
    Ok(power_integral(&q, p))
}

/// `‖u‖_p` over grid × levels; `∞` gives the sample maximum of `|u|`.
pub fn field_lp_norm(u: &HalfSpaceField, p: impl Into<LebesgueExponent>) -> Result<f64> {
    match p.into() {
        LebesgueExponent::Infinite => Ok(u.max_abs()),
        LebesgueExponent::Finite(p) => Ok(field_lp_power(u, p)?.powf(1.0 / p)),
    }
}

/// `‖u(·, x_n)‖_p` for every level.
pub fn level_norms(u: &HalfSpaceField, p: impl Into<LebesgueExponent>) -> Result<Vec<f64>> {
    let p = p.into();
    (0..u.levels().len())
        .map(|k| lp_norm(&u.level_function(k), p))
        .collect()
}

/// Derivative weights at `x` of the quadratic through three points.
#[inline]
pub fn lagrange_derivative_weights(xs: [f64; 3], x: f64) -> [f64; 3] {
    let [a, b, c] = xs;
    [
        ((x - b) + (x - c)) / ((a - b) * (a - c)),
        ((x - a) + (x - c)) / ((b - a) * (b - c)),
        ((x - a) + (x - b)) / ((c - a) * (c - b)),
    ]
}

/// Derivative along lattice axis `axis` at node with index `k` along it:
/// central in the interior, second-order one-sided at the faces.
#[inline]
fn axis_derivative(
    grid: &BoundaryGrid,
    k: usize,
    sample: impl Fn(usize) -> f64,
) -> f64 {
    let last = grid.per_axis() - 1;
    let h = grid.spacing();
    if k == 0 {
        (-3.0 * sample(0) + 4.0 * sample(1) - sample(2)) / (2.0 * h)
    } else if k == last {
        (3.0 * sample(last) - 4.0 * sample(last - 1) + sample(last - 2)) / (2.0 * h)
    } else {
        (sample(k + 1) - sample(k - 1)) / (2.0 * h)
    }
}

fn tangential_partials(
    grid: &BoundaryGrid,
    values: &[f64],
    components: usize,
    node: usize,
    comp: usize,
    out: &mut [f64],
) {
    let idx = grid.multi_index(node);
    for (axis, slot) in out.iter_mut().enumerate().take(grid.dim()) {
        *slot = axis_derivative(grid, idx[axis], |m| {
            let mut j = idx;
            j[axis] = m;
            values[grid.node_from_multi(j) * components + comp]
        });
    }
}

fn check_nodes(grid: &BoundaryGrid) -> Result<()> {
    if grid.per_axis() < 3 {
        return out_of_range(format!("need >= 3 nodes per axis, got {}", grid.per_axis()));
    }
    Ok(())
}

/// Tangential gradient of a boundary function.
///
/// Output has `dim · components` entries per node, ordered component-major:
/// entry `c·dim + a` is `∂_a f_c`.
pub fn boundary_gradient(f: &BoundaryGridFunction) -> Result<BoundaryGridFunction> {
    let grid = f.grid();
    check_nodes(grid)?;
    let d = grid.dim();
    let comps = f.components();
    let mut out = vec![0.0; grid.len() * d * comps];
    out.par_chunks_mut(d * comps).enumerate().for_each(|(node, chunk)| {
        for c in 0..comps {
            tangential_partials(grid, f.values(), comps, node, c, &mut chunk[c * d..(c + 1) * d]);
        }
    });
    BoundaryGridFunction::with_components(grid.clone(), d * comps, out)
}

/// Finite-difference gradient of a half-space field.
///
/// Tangential derivatives are lattice differences; the normal derivative uses
/// the three-point Lagrange formula on the (possibly non-uniform) levels.
/// Output has `n · components` entries per sample, entry `c·n + a` being
/// `∂_a u_c` with `a = n - 1` the normal direction.
pub fn discrete_gradient(u: &HalfSpaceField) -> Result<HalfSpaceField> {
    let grid = u.grid();
    check_nodes(grid)?;
    let levels = u.levels();
    if levels.len() < 3 {
        return out_of_range(format!("need >= 3 levels, got {}", levels.len()));
    }
    let n = grid.ambient_dim();
    let d = grid.dim();
    let comps = u.components();
    let nodes = grid.len();
    let kmax = levels.len() - 1;
    let mut out = vec![0.0; nodes * levels.len() * n * comps];
    out.par_chunks_mut(nodes * n * comps).enumerate().for_each(|(k, slab)| {
        let slice = u.slice(k);
        let base = k.clamp(1, kmax - 1) - 1;
        let xs = [levels[base], levels[base + 1], levels[base + 2]];
        let w = lagrange_derivative_weights(xs, levels[k]);
        for node in 0..nodes {
            let chunk = &mut slab[node * n * comps..(node + 1) * n * comps];
            for c in 0..comps {
                let row = &mut chunk[c * n..(c + 1) * n];
                tangential_partials(grid, slice, comps, node, c, &mut row[..d]);
                row[d] = (0..3).map(|m| w[m] * u.at(base + m, node, c)).sum();
            }
        }
    });
    HalfSpaceField::new(grid.clone(), levels.to_vec(), n * comps, out)
}

/// `‖∇u‖_p` with the Euclidean norm of the full Jacobian per sample.
pub fn gradient_lp_norm(u: &HalfSpaceField, p: f64) -> Result<f64> {
    field_lp_norm(&discrete_gradient(u)?, p)
}

/// Parameters `(s, p)` of the Gagliardo seminorm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormParams {
    s: f64,
    p: f64,
}

impl SeminormParams {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return out_of_range(format!("smoothness must lie in (0,1), got {s}"));
        }
        check_exponent(p)?;
        Ok(Self { s, p })
    }

    /// Trace-space parameters `(1 - 1/p, p)`.
    pub fn trace_space(p: f64) -> Result<Self> {
        Self::new(1.0 - 1.0 / p, p)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// `[f]_{s,p}^p` with the default node cap.
pub fn gagliardo_power(f: &BoundaryGridFunction, params: SeminormParams) -> Result<f64> {
    gagliardo_power_capped(f, params, SEMINORM_NODE_CAP)
}

/// `Σ_{i≠j} |f_i - f_j|^p |x_i - x_j|^{-(d + sp)} w_i w_j`.
///
/// Rows are summed with compensation in parallel blocks and combined in a
/// fixed order. The singular kernel depends only on the lattice offset, so it
/// is tabulated once.
pub fn gagliardo_power_capped(
    f: &BoundaryGridFunction,
    params: SeminormParams,
    cap: usize,
) -> Result<f64> {
    let grid = f.grid();
    let count = grid.len();
    if count > cap {
        return Err(Error::NodeCap { count, cap });
    }
    let m = grid.per_axis();
    let d = grid.dim();
    let h = grid.spacing();
    let expo = -(d as f64 + params.s * params.p);
    let table: Vec<f64> = (0..m.pow(d as u32))
        .map(|t| {
            let (a, b) = (t % m, t / m);
            let dist2 = ((a * a + b * b) as f64) * h * h;
            if t == 0 {
                0.0
            } else {
                dist2.powf(0.5 * expo)
            }
        })
        .collect();
    let weights = grid.weights();
    let p = params.p;
    let values = f.values();
    let comps = f.components();
    let diff = |i: usize, j: usize| -> f64 {
        if comps == 1 {
            (values[i] - values[j]).abs()
        } else {
            f.node_values(i)
                .iter()
                .zip(f.node_values(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        }
    };
    let row = |i: usize| -> f64 {
        let xi = grid.multi_index(i);
        let mut acc = CompensatedSum::new();
        for j in 0..count {
            if j == i {
                continue;
            }
            let dv = diff(i, j);
            if dv == 0.0 {
                continue;
            }
            let xj = grid.multi_index(j);
            let t = xi[0].abs_diff(xj[0]) + m * xi[1].abs_diff(xj[1]);
            acc.add(dv.powf(p) * table[t] * weights[j]);
        }
        weights[i] * acc.value()
    };
    Ok(deterministic_sum(count, row))
}

/// Gagliardo seminorm `[f]_{s,p}`.
pub fn gagliardo_seminorm(f: &BoundaryGridFunction, params: SeminormParams) -> Result<f64> {
    Ok(gagliardo_power(f, params)?.powf(1.0 / params.p))
}

pub fn gagliardo_seminorm_capped(
    f: &BoundaryGridFunction,
    params: SeminormParams,
    cap: usize,
) -> Result<f64> {
    Ok(gagliardo_power_capped(f, params, cap)?.powf(1.0 / params.p))
}

/// `[f]_{s,p} + ‖f‖_r`.
pub fn intersection_norm(f: &BoundaryGridFunction, s: f64, p: f64, r: impl Into<LebesgueExponent>) -> Result<f64> {
    let semi = gagliardo_seminorm(f, SeminormParams::new(s, p)?)?;
    Ok(semi + lp_norm(f, r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample_boundary, sample_half_space};
    use approx::assert_relative_eq;

    fn line(l: f64, h: f64) -> BoundaryGrid {
        BoundaryGrid::new(1, l, h).unwrap()
    }

    #[test]
    fn zero_and_constant_norms() {
        let g = BoundaryGrid::new(2, 2.0, 0.25).unwrap();
        let z = sample_boundary(|_| 0.0, &g).unwrap();
        assert_eq!(lp_norm(&z, 1.0).unwrap(), 0.0);
        let c = sample_boundary(|_| 3.0, &g).unwrap();
        assert_relative_eq!(lp_norm(&c, 2.0).unwrap(), 3.0 * 4.0, max_relative = 1e-13);
        assert_eq!(lp_norm(&c, LebesgueExponent::Infinite).unwrap(), 3.0);
    }

    #[test]
    fn single_cell_indicator() {
        let g = BoundaryGrid::new(2, 1.0, 0.1).unwrap();
        let f = sample_boundary(|x| if x[0].abs() < 1e-9 && x[1].abs() < 1e-9 { 1.0 } else { 0.0 }, &g).unwrap();
        assert_relative_eq!(lp_norm(&f, 1.0).unwrap(), 0.01, max_relative = 1e-12);
    }

    #[test]
    fn level_weights_cover_span() {
        let w = level_weights(&[0.1, 0.2, 0.4]);
        assert_relative_eq!(w.iter().sum::<f64>(), 0.4, max_relative = 1e-15);
        let w0 = level_weights(&[0.0, 0.5, 1.0]);
        assert_eq!(w0, vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn gradient_of_linear_and_constant() {
        let g = line(1.0, 0.25);
        let levels = [0.1, 0.15, 0.3, 0.7];
        let c = sample_half_space(|_, _| 2.0, &g, &levels).unwrap();
        assert!(discrete_gradient(&c).unwrap().values().iter().all(|&v| v.abs() < 1e-12));
        let u = sample_half_space(|_, t| t, &g, &levels).unwrap();
        let du = discrete_gradient(&u).unwrap();
        for k in 0..levels.len() {
            for i in 0..g.len() {
                assert!(du.at(k, i, 0).abs() < 1e-12);
                assert_relative_eq!(du.at(k, i, 1), 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn gradient_second_order() {
        let errs: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| {
                let g = line(1.0, h);
                let u = sample_half_space(|x, _| x[0].sin(), &g, &[0.1, 0.2, 0.3]).unwrap();
                let du = discrete_gradient(&u).unwrap();
                (0..g.len())
                    .map(|i| (du.at(1, i, 0) - g.point(i)[0].cos()).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 1.8, "order {order}");
        }
    }

    #[test]
    fn too_few_nodes() {
        let g = line(1.0, 0.5);
        let u = sample_half_space(|_, _| 1.0, &g, &[0.1, 0.2]).unwrap();
        assert!(discrete_gradient(&u).is_err());
    }

    fn two_loop(f: &BoundaryGridFunction, s: f64, p: f64) -> f64 {
        let g = f.grid();
        let d = g.dim() as f64;
        let mut total = 0.0;
        for i in 0..g.len() {
            for j in 0..g.len() {
                if i == j {
                    continue;
                }
                let (xi, xj) = (g.point(i), g.point(j));
                let dist = ((xi[0] - xj[0]).powi(2) + (xi[1] - xj[1]).powi(2)).sqrt();
                total += (f.value(i) - f.value(j)).abs().powf(p) / dist.powf(d + s * p) * g.weight(i) * g.weight(j);
            }
        }
        total.powf(1.0 / p)
    }

    #[test]
    fn seminorm_matches_two_loop_on_indicator() {
        let g = line(2.0, 0.25);
        let f = sample_boundary(|x| if (0.0..=1.0).contains(&x[0]) { 1.0 } else { 0.0 }, &g).unwrap();
        let got = gagliardo_seminorm(&f, SeminormParams::new(0.5, 2.0).unwrap()).unwrap();
        assert_relative_eq!(got, two_loop(&f, 0.5, 2.0), max_relative = 1e-12);
    }

    #[test]
    fn seminorm_constant_is_zero_and_cap_enforced() {
        let g = BoundaryGrid::new(2, 1.0, 0.1).unwrap();
        let c = sample_boundary(|_| 5.0, &g).unwrap();
        assert_eq!(gagliardo_seminorm(&c, SeminormParams::new(0.3, 2.0).unwrap()).unwrap(), 0.0);
        let big = BoundaryGrid::new(2, 4.0, 0.05).unwrap();
        let z = BoundaryGridFunction::zeros(big);
        assert!(matches!(
            gagliardo_seminorm(&z, SeminormParams::new(0.5, 2.0).unwrap()),
            Err(Error::NodeCap { .. })
        ));
    }

    #[test]
    fn intersection_norm_is_sum() {
        let g = line(2.0, 0.25);
        let f = sample_boundary(|x| if (0.0..=1.0).contains(&x[0]) { 1.0 } else { 0.0 }, &g).unwrap();
        let total = intersection_norm(&f, 0.5, 2.0, 2.0).unwrap();
        let expected = two_loop(&f, 0.5, 2.0) + lp_norm(&f, 2.0).unwrap();
        assert_relative_eq!(total, expected, max_relative = 1e-12);
        assert_eq!(intersection_norm(&BoundaryGridFunction::zeros(g), 0.5, 2.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SeminormParams::new(1.0, 2.0).is_err());
        assert!(SeminormParams::new(0.5, 0.5).is_err());
    }
}
