//! Dyadic cube covers with overlapping cubes of side `1.5·2^{-j}`, the
//! normalized tensor partition of unity subordinate to them, and the
//! boundary-layer localizer.

use crate::error::{out_of_range, Result};
use crate::profiles::{quintic_step, quintic_step_derivative, smooth_cutoff, SmoothCutoff};

/// Half side of a cover cube in units of the lattice spacing `2^{-j}`.
pub const CUBE_HALF_SIDE: f64 = 0.75;

/// Half width of the plateau on which a bump equals 1, same units.
pub const PLATEAU_HALF_WIDTH: f64 = 0.25;

/// Closed axis-parallel cube.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    center: Vec<f64>,
    side: f64,
}

impl Cube {
    pub fn new(center: Vec<f64>, side: f64) -> Self {
        assert!(side > 0.0);
        Self { center, side }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.center[axis] - 0.5 * self.side
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.center[axis] + 0.5 * self.side
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim() as i32)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (0..self.dim()).all(|a| (x[a] - self.center[a]).abs() <= 0.5 * self.side)
    }

    /// Same center, side multiplied by `factor`.
    pub fn dilated(&self, factor: f64) -> Self {
        Self::new(self.center.clone(), self.side * factor)
    }

    pub fn shifted(&self, axis: usize, by: f64) -> Self {
        let mut center = self.center.clone();
        center[axis] += by;
        Self::new(center, self.side)
    }

    /// Affine map onto `[0, 1]^n`.
    pub fn to_reference(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|a| (x[a] - self.lower(a)) / self.side).collect()
    }

    pub fn from_reference(&self, y: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|a| self.lower(a) + y[a] * self.side).collect()
    }

    pub fn intersection_measure(&self, other: &Cube) -> f64 {
        (0..self.dim())
            .map(|a| (self.upper(a).min(other.upper(a)) - self.lower(a).max(other.lower(a))).max(0.0))
            .product()
    }
}

/// Cubes `2^{-j}z + [−0.75·2^{-j}, 0.75·2^{-j}]^n` for the lattice points
/// `z` whose cube meets a bounded box.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeCover {
    level: i32,
    dim: usize,
    indices: Vec<Vec<i64>>,
}

/// Integer range of lattice indices whose cube meets `[lo, hi]`.
fn axis_range(level: i32, lo: f64, hi: f64) -> (i64, i64) {
    let s = 2f64.powi(level);
    let first = (s * lo - CUBE_HALF_SIDE).floor() as i64;
    let last = (s * hi + CUBE_HALF_SIDE).ceil() as i64;
    let meets = |z: i64| z as f64 + CUBE_HALF_SIDE > s * lo && (z as f64) - CUBE_HALF_SIDE < s * hi;
    let first = (first..=last).find(|&z| meets(z)).unwrap_or(first);
    let last = (first..=last).rev().find(|&z| meets(z)).unwrap_or(last);
    (first, last)
}

/// Cover at level `j` of the box `Π_a [lo_a, hi_a]`, lattice indices
/// enumerated with axis 0 fastest.
pub fn build_cover(level: i32, extent: &[(f64, f64)]) -> Result<CubeCover> {
    if extent.is_empty() || extent.iter().any(|&(lo, hi)| !(lo < hi && lo.is_finite() && hi.is_finite())) {
        return out_of_range("cover extent must be a non-empty finite box");
    }
    if !(-30..=30).contains(&level) {
        return out_of_range(format!("cover level {level} outside [-30, 30]"));
    }
    let ranges: Vec<(i64, i64)> = extent.iter().map(|&(lo, hi)| axis_range(level, lo, hi)).collect();
    let mut indices = vec![Vec::new()];
    for &(first, last) in &ranges {
        indices = (first..=last)
            .flat_map(|z| {
                indices.iter().map(move |prefix| {
                    let mut v = prefix.clone();
                    v.push(z);
                    v
                })
            })
            .collect();
    }
    // reorder so axis 0 varies fastest
    indices.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    Ok(CubeCover { level, dim: extent.len(), indices })
}

impl CubeCover {
    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lattice spacing `2^{-j}`.
    pub fn spacing(&self) -> f64 {
        2f64.powi(-self.level)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index(&self, i: usize) -> &[i64] {
        &self.indices[i]
    }

    pub fn indices(&self) -> &[Vec<i64>] {
        &self.indices
    }

    pub fn cube_at(&self, z: &[i64]) -> Cube {
        let s = self.spacing();
        Cube::new(z.iter().map(|&k| k as f64 * s).collect(), 2.0 * CUBE_HALF_SIDE * s)
    }

    pub fn cube(&self, i: usize) -> Cube {
        self.cube_at(&self.indices[i])
    }

    /// The cube moved up by one lattice step in the last coordinate.
    pub fn shifted_cube(&self, i: usize) -> Cube {
        self.cube(i).shifted(self.dim - 1, self.spacing())
    }

    /// Number of cover cubes containing `x`.
    pub fn overlap_count(&self, x: &[f64]) -> usize {
        (0..self.len()).filter(|&i| self.cube(i).contains(x)).count()
    }
}

/// One-dimensional bump in lattice units: 1 on `|y| ≤ 0.25`, 0 for
/// `|y| ≥ 0.75`, quintic in between.
#[inline]
fn bump_1d(y: f64) -> f64 {
    quintic_step((CUBE_HALF_SIDE - y.abs()) / (CUBE_HALF_SIDE - PLATEAU_HALF_WIDTH))
}

#[inline]
fn bump_1d_derivative(y: f64) -> f64 {
    let w = CUBE_HALF_SIDE - PLATEAU_HALF_WIDTH;
    -y.signum() * quintic_step_derivative((CUBE_HALF_SIDE - y.abs()) / w) / w
}

/// `(g, g')` for the normalized profile `g(y) = b(y) / Σ_k b(y − k)`.
fn normalized_1d(y: f64, z: i64) -> (f64, f64) {
    let t = y - z as f64;
    let b = bump_1d(t);
    let db = bump_1d_derivative(t);
    if b == 0.0 && db == 0.0 {
        return (0.0, 0.0);
    }
    let base = y.floor() as i64;
    let (mut s, mut ds) = (0.0, 0.0);
    for k in base - 1..=base + 2 {
        s += bump_1d(y - k as f64);
        ds += bump_1d_derivative(y - k as f64);
    }
    (b / s, (db * s - b * ds) / (s * s))
}

/// `φ_{j,i} = ψ_i / Σ_k ψ_k` with `ψ_i` the tensor bump of cube `i`; the
/// normalizing sum runs over the whole lattice so it factorizes by axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity {
    cover: CubeCover,
}

pub fn build_pou(cover: CubeCover) -> PartitionOfUnity {
    PartitionOfUnity { cover }
}

impl PartitionOfUnity {
    pub fn cover(&self) -> &CubeCover {
        &self.cover
    }

    /// `φ` of the cube with lattice index `z` at `x`.
    pub fn value_at(&self, z: &[i64], x: &[f64]) -> f64 {
        let s = 2f64.powi(self.cover.level);
        z.iter().zip(x).map(|(&k, &xa)| normalized_1d(s * xa, k).0).product()
    }

    pub fn value(&self, i: usize, x: &[f64]) -> f64 {
        self.value_at(self.cover.index(i), x)
    }

    /// `∇φ_{j,i}(x)`.
    pub fn gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let s = 2f64.powi(self.cover.level);
        let z = self.cover.index(i);
        let parts: Vec<(f64, f64)> = z.iter().zip(x).map(|(&k, &xa)| normalized_1d(s * xa, k)).collect();
        for (a, o) in out.iter_mut().enumerate().take(z.len()) {
            *o = s * parts
                .iter()
                .enumerate()
                .map(|(b, &(g, dg))| if a == b { dg } else { g })
                .product::<f64>();
        }
    }

    /// `Σ_i φ_{j,i}(x)` over the cover.
    pub fn sum(&self, x: &[f64]) -> f64 {
        (0..self.cover.len()).map(|i| self.value(i, x)).sum()
    }

    /// `2^{-j} max_i |∇φ_{j,i}(x)|_∞` over the given probe points.
    pub fn scaled_gradient_bound(&self, probes: &[Vec<f64>]) -> f64 {
        let mut g = vec![0.0; self.cover.dim()];
        let mut worst: f64 = 0.0;
        for x in probes {
            for i in 0..self.cover.len() {
                if !self.cover.cube(i).contains(x) {
                    continue;
                }
                self.gradient(i, x, &mut g);
                worst = worst.max(g.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            }
        }
        worst * self.cover.spacing()
    }
}

/// `η_j(x) = η(2^{j+1} x_n)`: equal to 1 for `x_n ≤ 2^{-j-1}` and 0 for
/// `x_n ≥ 2^{-j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Localizer {
    level: i32,
    cutoff: SmoothCutoff,
}

impl Localizer {
    pub fn new(level: i32) -> Self {
        Self { level, cutoff: smooth_cutoff() }
    }

    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn value(&self, xn: f64) -> f64 {
        self.cutoff.value(2f64.powi(self.level + 1) * xn)
    }

    /// `∂_n η_j`.
    pub fn derivative(&self, xn: f64) -> f64 {
        let s = 2f64.powi(self.level + 1);
        s * self.cutoff.derivative(s * xn)
    }

    /// Closed-form `2^{-j} max |∂_n η_j| = 2 max |η'|`.
    pub fn scaled_slope(&self) -> f64 {
        2.0 * self.cutoff.max_slope()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_overlap_is_two_to_the_n() {
        for n in 2..=3 {
            let cover = build_cover(0, &vec![(-3.0, 3.0); n]).unwrap();
            let generic = vec![0.37; n];
            assert_eq!(cover.overlap_count(&generic), 1 << n);
            // at a lattice point only the cube itself
            assert_eq!(cover.overlap_count(&vec![1.0; n]), 1);
        }
    }

    #[test]
    fn adjacent_intersection_closed_form() {
        for n in 2..=3 {
            let cover = build_cover(1, &vec![(-1.0, 1.0); n]).unwrap();
            let z = vec![0i64; n];
            let mut z2 = z.clone();
            z2[0] = 1;
            let m = cover.cube_at(&z).intersection_measure(&cover.cube_at(&z2));
            let expect = 0.5 * 0.5 * (1.5 * 0.5f64).powi(n as i32 - 1);
            assert!((m - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn cover_reaches_box_edges() {
        let cover = build_cover(2, &[(-1.0, 1.0), (0.0, 0.5)]).unwrap();
        for x in [[-1.0, 0.0], [1.0, 0.5], [0.0, 0.25], [-0.999, 0.499]] {
            assert!(cover.overlap_count(&x) >= 1);
        }
        // axis 0 fastest
        assert_eq!(cover.index(1)[1], cover.index(0)[1]);
    }

    #[test]
    fn partition_sums_to_one_and_is_supported() {
        let cover = build_cover(1, &[(-1.0, 1.0), (0.0, 1.0)]).unwrap();
        let pou = build_pou(cover);
        for a in 0..=40 {
            for b in 0..=20 {
                let x = [-1.0 + 0.05 * a as f64, 0.05 * b as f64];
                assert!((pou.sum(&x) - 1.0).abs() < 1e-12, "{x:?}");
                for i in 0..pou.cover().len() {
                    let v = pou.value(i, &x);
                    assert!((0.0..=1.0).contains(&v));
                    if !pou.cover().cube(i).contains(&x) {
                        assert_eq!(v, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn partition_gradient_matches_differences_and_scales() {
        let probes: Vec<Vec<f64>> = (0..50).map(|k| vec![-0.9 + 0.037 * k as f64, 0.013 * k as f64]).collect();
        let mut bounds = Vec::new();
        for j in 0..4 {
            let s = 2f64.powi(-j);
            let pou = build_pou(build_cover(j, &[(-1.0, 1.0), (0.0, 1.0)]).unwrap());
            let scaled: Vec<Vec<f64>> = probes.iter().map(|p| p.iter().map(|v| v * s).collect()).collect();
            bounds.push(pou.scaled_gradient_bound(&scaled));
            let i = pou.cover().len() / 2;
            let x = [0.1 * s, 0.2 * s];
            let mut g = [0.0; 2];
            pou.gradient(i, &x, &mut g);
            let e = 1e-7 * s;
            let fd = (pou.value(i, &[x[0] + e, x[1]]) - pou.value(i, &[x[0] - e, x[1]])) / (2.0 * e);
            assert!((fd - g[0]).abs() < 1e-5 / s);
        }
        for b in &bounds {
            assert!((b - bounds[0]).abs() < 1e-9 * bounds[0]);
        }
    }

    #[test]
    fn localizer_sandwich() {
        for j in 0..5 {
            let eta = Localizer::new(j);
            let s = 2f64.powi(-j);
            for k in 0..=400 {
                let xn = 1.2 * s * k as f64 / 400.0;
                let v = eta.value(xn);
                let lower = if xn < 0.5 * s { 1.0 } else { 0.0 };
                let upper = if xn < s { 1.0 } else { 0.0 };
                assert!(lower <= v && v <= upper, "j={j} xn={xn} v={v}");
                assert!(s * eta.derivative(xn).abs() <= eta.scaled_slope() + 1e-12);
            }
        }
    }
}
