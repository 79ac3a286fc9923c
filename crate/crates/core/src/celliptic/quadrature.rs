//! Quadrature over grid nodes inside a cube and the orthogonal projection
//! onto the polynomial kernel.

use super::cover::Cube;
use super::kernel::KernelBasis;
use super::poly::TensorRule;
use crate::error::{out_of_range, Error, Result};
use crate::grid::HalfSpaceField;

/// Minimal node count per axis (Simpson needs two intervals).
pub const MIN_NODES_PER_AXIS: usize = 3;

/// Composite Newton–Cotes weights on the sorted samples `coords` lying in
/// `[a, b]`.
///
/// Both endpoints must be samples and the spacing inside must be uniform.
/// An even interval count uses Simpson's rule; an odd count uses Simpson on
/// all but the last three intervals and the 3/8 rule there. Both are exact
/// for cubics.
pub fn node_rule(coords: &[f64], a: f64, b: f64) -> Result<Vec<(usize, f64)>> {
    let tol = 1e-9 * (b - a).abs().max(1e-300);
    let start = coords.partition_point(|&c| c < a - tol);
    let end = coords.partition_point(|&c| c <= b + tol);
    if start >= end || (coords[start] - a).abs() > tol || (coords[end - 1] - b).abs() > tol {
        return Err(Error::InsufficientSampling(format!("[{a}, {b}] faces are not sample points")));
    }
    let count = end - start;
    if count < MIN_NODES_PER_AXIS {
        return Err(Error::InsufficientSampling(format!(
            "[{a}, {b}] holds {count} samples, need {MIN_NODES_PER_AXIS}"
        )));
    }
    let intervals = count - 1;
    let h = (b - a) / intervals as f64;
    for i in start..end - 1 {
        if ((coords[i + 1] - coords[i]) - h).abs() > 1e-9 * h {
            return Err(Error::InsufficientSampling(format!("non-uniform samples in [{a}, {b}]")));
        }
    }
    let mut w = vec![0.0; count];
    let simpson_intervals = if intervals % 2 == 0 { intervals } else { intervals - 3 };
    for p in (0..simpson_intervals).step_by(2) {
        w[p] += h / 3.0;
        w[p + 1] += 4.0 * h / 3.0;
        w[p + 2] += h / 3.0;
    }
    if intervals % 2 == 1 {
        let o = simpson_intervals;
        for (k, c) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
            w[o + k] += 3.0 * h / 8.0 * c;
        }
    }
    Ok(w.into_iter().enumerate().map(|(i, wi)| (start + i, wi)).collect())
}

/// `Π_Q u` as coefficients against the transported orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub cube: Cube,
    pub coefficients: Vec<f64>,
}

impl Projection {
    /// `Π_Q u (x)`, written into `out` (one entry per component).
    pub fn value(&self, basis: &KernelBasis, x: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        let comps = basis.operator().components();
        basis.eval_on(&self.cube, x, scratch);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, c) in self.coefficients.iter().enumerate() {
            for k in 0..comps {
                out[k] += c * scratch[i * comps + k];
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }
}

/// Scratch length needed by [`Projection::value`].
pub fn scratch_len(basis: &KernelBasis) -> usize {
    basis.len() * basis.operator().components()
}

fn check_field(u: &HalfSpaceField, basis: &KernelBasis) -> Result<()> {
    let op = basis.operator();
    if u.grid().ambient_dim() != op.dim() {
        return out_of_range(format!("field lives in R^{}, operator in R^{}", u.grid().ambient_dim(), op.dim()));
    }
    if u.components() != op.components() {
        return out_of_range(format!("field has {} components, operator expects {}", u.components(), op.components()));
    }
    Ok(())
}

/// `Π_Q u = Σ_i ⟨u, π_i⟩ π_i` with the inner products evaluated by
/// composite Simpson quadrature over the field samples in `Q`.
pub fn project(u: &HalfSpaceField, cube: &Cube, basis: &KernelBasis) -> Result<Projection> {
    check_field(u, basis)?;
    let grid = u.grid();
    let n = cube.dim();
    let axis: Vec<f64> = (0..grid.per_axis()).map(|k| grid.axis_coord(k)).collect();
    let mut rules = Vec::with_capacity(n);
    for a in 0..n - 1 {
        rules.push(node_rule(&axis, cube.lower(a), cube.upper(a))?);
    }
    rules.push(node_rule(u.levels(), cube.lower(n - 1), cube.upper(n - 1))?);

    let comps = basis.operator().components();
    let mut coefficients = vec![0.0; basis.len()];
    let mut vals = vec![0.0; scratch_len(basis)];
    let mut x = vec![0.0; n];
    let tangential = &rules[..n - 1];
    let inner: usize = tangential.iter().map(|r| r.len()).product();
    for &(level, wl) in &rules[n - 1] {
        x[n - 1] = u.levels()[level];
        for flat in 0..inner {
            let mut rem = flat;
            let mut idx = [0usize; 2];
            let mut w = wl;
            for (a, r) in tangential.iter().enumerate() {
                let (k, wk) = r[rem % r.len()];
                rem /= r.len();
                idx[a] = k;
                w *= wk;
                x[a] = axis[k];
            }
            let node = grid.node_from_multi(idx);
            let uv = u.node_values(level, node);
            basis.eval_on(cube, &x, &mut vals);
            for (i, c) in coefficients.iter_mut().enumerate() {
                let dot: f64 = (0..comps).map(|k| uv[k] * vals[i * comps + k]).sum();
                *c += w * dot;
            }
        }
    }
    Ok(Projection { cube: cube.clone(), coefficients })
}

/// `Π_Q f` for a function given in closed form, by a tensor Gauss–Legendre
/// rule on the reference cube.
pub fn project_fn<F>(f: F, cube: &Cube, basis: &KernelBasis, rule: &TensorRule) -> Projection
where
    F: Fn(&[f64], &mut [f64]),
{
    let comps = basis.operator().components();
    let mut coefficients = vec![0.0; basis.len()];
    let mut vals = vec![0.0; scratch_len(basis)];
    let mut fv = vec![0.0; comps];
    let vol = cube.volume();
    for (y, w) in rule.points.iter().zip(&rule.weights) {
        let x = cube.from_reference(y);
        f(&x, &mut fv);
        basis.eval_on(cube, &x, &mut vals);
        for (i, c) in coefficients.iter_mut().enumerate() {
            let dot: f64 = (0..comps).map(|k| fv[k] * vals[i * comps + k]).sum();
            *c += w * vol * dot;
        }
    }
    Projection { cube: cube.clone(), coefficients }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::celliptic::kernel::{kernel_basis, DEFAULT_DEGREE_CAP};
    use crate::celliptic::operator::DiffOperator;
    use crate::grid::{BoundaryGrid, HalfSpaceField, LevelSchedule};

    #[test]
    fn node_rule_exact_for_cubics() {
        let xs: Vec<f64> = (0..=20).map(|k| -1.0 + 0.1 * k as f64).collect();
        for (a, b) in [(-1.0, 1.0), (-0.5, 0.2), (0.0, 0.3)] {
            let r = node_rule(&xs, a, b).unwrap();
            let q: f64 = r.iter().map(|&(i, w)| w * xs[i].powi(3)).sum();
            assert!((q - (b.powi(4) - a.powi(4)) / 4.0).abs() < 1e-13, "{a} {b}");
        }
        assert!(node_rule(&xs, -0.05, 0.3).is_err());
        assert!(node_rule(&xs, 0.0, 0.1).is_err());
    }

    fn field_of<F: Fn(&[f64]) -> Vec<f64>>(f: F, comps: usize, half: f64, h: f64, top: f64) -> HalfSpaceField {
        let grid = BoundaryGrid::new(1, half, h).unwrap();
        let levels = LevelSchedule::Uniform { spacing: h, top, include_zero: true }.levels().unwrap();
        let mut vals = Vec::new();
        for &t in &levels {
            for i in 0..grid.len() {
                vals.extend(f(&[grid.point(i)[0], t]));
            }
        }
        HalfSpaceField::new(grid, levels, comps, vals).unwrap()
    }

    #[test]
    fn gradient_projection_of_coordinate_is_mean() {
        let basis = kernel_basis(&DiffOperator::gradient(2).unwrap(), DEFAULT_DEGREE_CAP).unwrap();
        let u = field_of(|x| vec![x[0]], 1, 1.0, 0.125, 1.0);
        let q = Cube::new(vec![0.5, 0.5], 1.0);
        let p = project(&u, &q, &basis).unwrap();
        let mut s = vec![0.0; 1];
        let mut out = [0.0];
        p.value(&basis, &[0.3, 0.9], &mut s, &mut out);
        assert!((out[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn symmetric_gradient_reproduces_rigid_motion() {
        let basis = kernel_basis(&DiffOperator::symmetric_gradient_2d(), DEFAULT_DEGREE_CAP).unwrap();
        let rigid = |x: &[f64]| vec![0.3 - 0.7 * x[1], -1.1 + 0.7 * x[0]];
        let u = field_of(rigid, 2, 1.0, 0.0625, 1.0);
        let q = Cube::new(vec![0.25, 0.375], 0.5);
        let p = project(&u, &q, &basis).unwrap();
        let mut s = vec![0.0; 6];
        let mut out = [0.0; 2];
        for x in [[0.1, 0.2], [0.4, 0.6], [0.25, 0.375]] {
            p.value(&basis, &x, &mut s, &mut out);
            let e = rigid(&x);
            assert!((out[0] - e[0]).abs() < 1e-12 && (out[1] - e[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn misaligned_cube_is_reported() {
        let basis = kernel_basis(&DiffOperator::gradient(2).unwrap(), DEFAULT_DEGREE_CAP).unwrap();
        let u = field_of(|x| vec![x[0]], 1, 1.0, 0.125, 1.0);
        let q = Cube::new(vec![0.51, 0.5], 1.0);
        assert!(matches!(project(&u, &q, &basis), Err(Error::InsufficientSampling(_))));
        let tiny = Cube::new(vec![0.0625, 0.0625], 0.125);
        assert!(matches!(project(&u, &tiny, &basis), Err(Error::InsufficientSampling(_))));
    }
}
