//! Boundary values through local kernel projections.
//!
//! Near the boundary, `u` is replaced by `η_j Σ_i φ_{j,i} Π_{Q'_{j,i}} u`,
//! where `Q'_{j,i}` is the cover cube moved up by one lattice step so that it
//! sits inside the half-space. Restricting to `x_n = 0` and letting `j`
//! grow gives the trace.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cover::{build_cover, build_pou, Cube, CubeCover, Localizer, PartitionOfUnity, CUBE_HALF_SIDE};
use super::kernel::KernelBasis;
use super::poly::TensorRule;
use super::quadrature::{project, project_fn, scratch_len, Projection};
use crate::error::{out_of_range, Error, Result};
use crate::grid::{BoundaryGridFunction, HalfSpaceField};
use crate::norms::{discrete_gradient, field_lp_norm, lp_norm};
use crate::reduce::deterministic_max;

/// Number of finest levels over which sup-ratio stability is measured.
pub const TAIL_LEVELS: usize = 3;

/// Tolerance below which the kept partition weight counts as full.
const COVERAGE_TOL: f64 = 1e-12;

/// Projections for every cube of one level, indexed by lattice point.
struct LevelProjections<'a> {
    basis: &'a KernelBasis,
    pou: PartitionOfUnity,
    localizer: Localizer,
    by_index: HashMap<Vec<i64>, usize>,
    projections: Vec<Option<Projection>>,
}

impl LevelProjections<'_> {
    /// `Σ_i φ_{j,i}(x) Π_{Q'_{j,i}} u(x)` over kept cubes, and the total
    /// partition weight those cubes carry at `x`.
    fn weighted_sum(&self, x: &[f64], scratch: &mut [f64], tmp: &mut [f64], out: &mut [f64]) -> f64 {
        let cover = self.pou.cover();
        let s = 2f64.powi(cover.level());
        let n = x.len();
        out.iter_mut().for_each(|o| *o = 0.0);
        // lattice points whose cube contains x, per axis
        let ranges: Vec<(i64, i64)> = x
            .iter()
            .map(|&xa| {
                let y = s * xa;
                ((y - CUBE_HALF_SIDE).ceil() as i64, (y + CUBE_HALF_SIDE).floor() as i64)
            })
            .collect();
        let mut z: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        let mut weight = 0.0;
        loop {
            if let Some(&i) = self.by_index.get(&z) {
                if let Some(p) = &self.projections[i] {
                    let phi = self.pou.value_at(&z, x);
                    if phi > 0.0 {
                        weight += phi;
                        p.value(self.basis, x, scratch, tmp);
                        out.iter_mut().zip(tmp.iter()).for_each(|(o, t)| *o += phi * t);
                    }
                }
            }
            let mut a = 0;
            loop {
                if a == n {
                    return weight;
                }
                if z[a] < ranges[a].1 {
                    z[a] += 1;
                    break;
                }
                z[a] = ranges[a].0;
                a += 1;
            }
        }
    }
}

/// One level of a replacement-trace run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceLevel {
    pub level: i32,
    /// Cubes meeting the strip whose shifted cube lies in the sampled region.
    pub cube_count: usize,
    /// Cubes dropped because their shifted cube leaves the sampled region.
    pub dropped_cubes: usize,
    /// Dropped cubes on which `u` has nonzero samples; a level with none is
    /// unaffected by the truncation of the sampled region.
    pub support_deficit: usize,
    /// Boundary measure where the kept partition weight falls short of 1.
    pub uncovered_measure: f64,
    /// `T_j^{(2)} u (·, 0)`.
    pub trace: BoundaryGridFunction,
    pub l1_trace_norm: f64,
    /// `‖T_j^{(2)}u(·,0) − T_{j-1}^{(2)}u(·,0)‖₁`, absent at the first level.
    pub l1_increment: Option<f64>,
    /// Sample maximum of `|T_j^{(2)} u|` over the strip `x_n < 2^{-j}`.
    pub strip_sup: f64,
    /// `strip_sup / ‖u‖_∞`, 0 when `u ≡ 0`.
    pub linf_ratio: f64,
}

/// Sequence of replacement traces for consecutive levels.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRun {
    pub levels: Vec<TraceLevel>,
    pub field_sup: f64,
}

impl TraceRun {
    /// The finest iterate, used as the trace candidate.
    pub fn candidate(&self) -> &BoundaryGridFunction {
        &self.levels.last().expect("non-empty run").trace
    }

    /// `j,cube_count,l1_increment,l1_trace_norm,linf_ratio`; the increment
    /// is empty on the first row.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "j,cube_count,l1_increment,l1_trace_norm,linf_ratio")?;
        for l in &self.levels {
            let inc = l.l1_increment.map(|v| v.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{},{}", l.level, l.cube_count, inc, l.l1_trace_norm, l.linf_ratio)?;
        }
        Ok(())
    }
}

/// Whether `u` has a nonzero sample inside `cube`.
fn touches_support(u: &HalfSpaceField, cube: &Cube) -> bool {
    let grid = u.grid();
    let n = grid.ambient_dim();
    (0..u.levels().len())
        .filter(|&k| {
            let t = u.levels()[k];
            t >= cube.lower(n - 1) && t <= cube.upper(n - 1)
        })
        .any(|k| {
            (0..grid.len()).any(|node| {
                let p = grid.point(node);
                (0..n - 1).all(|a| p[a] >= cube.lower(a) && p[a] <= cube.upper(a))
                    && u.node_values(k, node).iter().any(|&v| v != 0.0)
            })
        })
}

struct LevelSetup<'a> {
    projections: LevelProjections<'a>,
    kept: usize,
    dropped: usize,
    support_deficit: usize,
}

fn project_level<'a>(u: &HalfSpaceField, basis: &'a KernelBasis, level: i32) -> Result<LevelSetup<'a>> {
    let grid = u.grid();
    let n = grid.ambient_dim();
    let half = grid.half_extent();
    let levels = u.levels();
    let (bottom, top) = (levels[0], levels[levels.len() - 1]);
    let spacing = 2f64.powi(-level);

    let mut extent = vec![(-half, half); n - 1];
    extent.push((0.0, spacing));
    let cover: CubeCover = build_cover(level, &extent)?;

    let tol = 1e-12 * half.max(top);
    let inside = |q: &Cube| {
        (0..n - 1).all(|a| q.lower(a) >= -half - tol && q.upper(a) <= half + tol)
            && q.lower(n - 1) >= bottom - tol
            && q.upper(n - 1) <= top + tol
    };
    let projections: Vec<Option<Projection>> = (0..cover.len())
        .into_par_iter()
        .map(|i| {
            let q = cover.shifted_cube(i);
            if !inside(&q) {
                return Ok(None);
            }
            project(u, &q, basis).map(Some).map_err(|e| {
                Error::InsufficientSampling(format!("cube {:?} at j={level}: {e}", cover.index(i)))
            })
        })
        .collect::<Result<_>>()?;
    let kept = projections.iter().filter(|p| p.is_some()).count();
    let dropped = projections.len() - kept;
    let support_deficit = (0..cover.len())
        .into_par_iter()
        .filter(|&i| projections[i].is_none() && touches_support(u, &cover.cube(i)))
        .count();
    let by_index = cover.indices().iter().enumerate().map(|(i, z)| (z.clone(), i)).collect();
    let lp = LevelProjections { basis, pou: build_pou(cover), localizer: Localizer::new(level), by_index, projections };
    Ok(LevelSetup { projections: lp, kept, dropped, support_deficit })
}

/// `T_j^{(2)} u (·, 0)` for `j = j_min ..= j_max`, with Cauchy increments and
/// the strip sup ratio.
pub fn replacement_trace(u: &HalfSpaceField, basis: &KernelBasis, j_min: i32, j_max: i32) -> Result<TraceRun> {
    if j_min > j_max {
        return out_of_range(format!("empty level range {j_min}..={j_max}"));
    }
    let op = basis.operator();
    if u.grid().ambient_dim() != op.dim() || u.components() != op.components() {
        return out_of_range("field shape does not match the operator");
    }
    let grid = u.grid();
    let n = grid.ambient_dim();
    let comps = op.components();
    let field_sup = u.max_abs();
    let mut out: Vec<TraceLevel> = Vec::new();
    for level in j_min..=j_max {
        let LevelSetup { projections: lp, kept: cube_count, dropped: dropped_cubes, support_deficit } =
            project_level(u, basis, level)?;

        let rows: Vec<(Vec<f64>, f64)> = (0..grid.len())
            .into_par_iter()
            .map(|node| {
                let p = grid.point(node);
                let mut x = p[..n - 1].to_vec();
                x.push(0.0);
                let mut scratch = vec![0.0; scratch_len(basis)];
                let mut tmp = vec![0.0; comps];
                let mut v = vec![0.0; comps];
                let w = lp.weighted_sum(&x, &mut scratch, &mut tmp, &mut v);
                let short = if w < 1.0 - COVERAGE_TOL { grid.weight(node) } else { 0.0 };
                (v, short)
            })
            .collect();
        let uncovered_measure = rows.iter().map(|r| r.1).sum();
        let values: Vec<f64> = rows.into_iter().flat_map(|r| r.0).collect();
        let trace = BoundaryGridFunction::with_components(grid.clone(), comps, values)?;

        let strip: Vec<usize> = (0..u.levels().len()).filter(|&k| u.levels()[k] < 2f64.powi(-level)).collect();
        let samples = strip.len() * grid.len();
        let strip_sup = deterministic_max(samples, |s| {
            let t = u.levels()[strip[s / grid.len()]];
            let eta = lp.localizer.value(t);
            if eta == 0.0 {
                return 0.0;
            }
            let p = grid.point(s % grid.len());
            let mut x = p[..n - 1].to_vec();
            x.push(t);
            let mut scratch = vec![0.0; scratch_len(basis)];
            let mut tmp = vec![0.0; comps];
            let mut v = vec![0.0; comps];
            lp.weighted_sum(&x, &mut scratch, &mut tmp, &mut v);
            eta * v.iter().map(|c| c * c).sum::<f64>().sqrt()
        })
        .unwrap_or(0.0);

        let l1_trace_norm = lp_norm(&trace, 1.0)?;
        let l1_increment = match out.last() {
            Some(prev) => Some(lp_norm(&trace.sub(&prev.trace)?, 1.0)?),
            None => None,
        };
        let linf_ratio = if field_sup > 0.0 { strip_sup / field_sup } else { 0.0 };
        out.push(TraceLevel {
            level,
            cube_count,
            dropped_cubes,
            support_deficit,
            uncovered_measure,
            trace,
            l1_trace_norm,
            l1_increment,
            strip_sup,
            linf_ratio,
        });
    }
    Ok(TraceRun { levels: out, field_sup })
}

/// `T_j^{(1)} u = (1 − η_j) u`, the part left untouched away from the
/// boundary.
pub fn interior_part(u: &HalfSpaceField, level: i32) -> Result<HalfSpaceField> {
    let eta = Localizer::new(level);
    let nodes = u.grid().len() * u.components();
    let values = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (1.0 - eta.value(u.levels()[i / nodes])) * v)
        .collect();
    HalfSpaceField::new(u.grid().clone(), u.levels().to_vec(), u.components(), values)
}

/// `𝔸u` by finite differences.
pub fn apply_operator(u: &HalfSpaceField, basis: &KernelBasis) -> Result<HalfSpaceField> {
    let op = basis.operator();
    let jac = discrete_gradient(u)?;
    let width = jac.components();
    let m = op.outputs();
    let mut values = vec![0.0; jac.values().len() / width * m];
    values
        .par_chunks_mut(m)
        .zip(jac.values().par_chunks(width))
        .for_each(|(o, j)| op.apply_jacobian(j, o));
    HalfSpaceField::new(u.grid().clone(), u.levels().to_vec(), m, values)
}

/// Scale-dependent constants measured on one cube size.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleConstants {
    pub level: i32,
    pub side: f64,
    /// Smallest `c` with `c^{-1} avg_{3Q}|π| ≤ avg_{Q'}|π| ≤ c avg_{3Q}|π|`
    /// over the sampled kernel elements.
    pub sandwich: f64,
    /// Largest `‖Π_Q u‖_∞ / avg_Q |u|` over the sampled functions.
    pub inverse: f64,
}

/// Report of the trace bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceBoundsReport {
    pub trace_l1: f64,
    pub operator_l1: f64,
    /// `‖trace‖₁ / ‖𝔸u‖₁`, absent when `𝔸u ≡ 0`.
    pub trace_constant: Option<f64>,
    pub linf_ratios: Vec<(i32, f64)>,
    pub linf_constant: f64,
    /// `(max − min) / max` of the sup ratios over the finest
    /// [`TAIL_LEVELS`] levels; coarse cubes smear the data, so the ratio
    /// only settles once cubes are small against its features.
    pub linf_tail_spread: f64,
    pub scales: Vec<ScaleConstants>,
    /// Largest relative deviation of either scale constant from the first
    /// octave.
    pub scale_drift: f64,
    /// `2^{-j} max |∇φ_{j,i}|` over probes, maximized over the run's levels.
    pub partition_slope: f64,
    pub localizer_slope: f64,
}

fn mean_abs<F: Fn(&[f64]) -> f64>(f: F, cube: &Cube, rule: &TensorRule) -> f64 {
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(y, w)| w * f(&cube.from_reference(y)).abs())
        .sum()
}

fn lattice_points(dim: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let total = per_axis.pow(dim as u32);
    (0..total)
        .map(|flat| {
            let mut rem = flat;
            (0..dim)
                .map(|_| {
                    let k = rem % per_axis;
                    rem /= per_axis;
                    k as f64 / (per_axis - 1) as f64
                })
                .collect()
        })
        .collect()
}

/// Random smooth test function on the reference cube: a few seeded cosine
/// modes per component plus a constant.
#[derive(Debug, Clone)]
struct ReferenceWave {
    modes: Vec<(usize, f64, Vec<f64>, f64)>,
    offsets: Vec<f64>,
}

impl ReferenceWave {
    fn draw(rng: &mut ChaCha8Rng, dim: usize, comps: usize) -> Self {
        let modes = (0..3 * comps)
            .map(|m| {
                let freq = (0..dim).map(|_| rng.random_range(0..3) as f64).collect();
                (m % comps, rng.random_range(-1.0..1.0), freq, rng.random_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let offsets = (0..comps).map(|_| rng.random_range(-0.5..0.5)).collect();
        Self { modes, offsets }
    }

    fn eval(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.offsets);
        for (c, amp, freq, phase) in &self.modes {
            let arg: f64 = freq.iter().zip(y).map(|(k, v)| k * v).sum::<f64>() * std::f64::consts::PI + phase;
            out[*c] += amp * arg.cos();
        }
    }
}

/// Norm-equivalence and inverse-estimate constants on boundary cubes of
/// side `1.5·2^{-j}`, `j = 0..octaves`, each octave using the same seeded
/// samples in reference coordinates.
pub fn scale_constants(basis: &KernelBasis, octaves: i32, samples: usize, seed: u64) -> Vec<ScaleConstants> {
    let op = basis.operator();
    let n = op.dim();
    let comps = op.components();
    let rule = TensorRule::new(n, 4, 6);
    let probe = lattice_points(n, 9);
    (0..octaves)
        .map(|level| {
            let spacing = 2f64.powi(-level);
            let q = Cube::new(vec![0.0; n], 2.0 * CUBE_HALF_SIDE * spacing);
            let shifted = q.shifted(n - 1, spacing);
            let triple = q.dilated(3.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut scratch = vec![0.0; scratch_len(basis)];
            let mut val = vec![0.0; comps];

            let mut sandwich: f64 = 1.0;
            for _ in 0..samples {
                let coefficients: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let p = Projection { cube: q.clone(), coefficients };
                let norm = |x: &[f64]| {
                    let mut s = vec![0.0; scratch_len(basis)];
                    let mut v = vec![0.0; comps];
                    p.value(basis, x, &mut s, &mut v);
                    v.iter().map(|c| c * c).sum::<f64>().sqrt()
                };
                let a = mean_abs(&norm, &triple, &rule);
                let b = mean_abs(&norm, &shifted, &rule);
                if a > 0.0 && b > 0.0 {
                    sandwich = sandwich.max(a / b).max(b / a);
                }
            }

            let mut inverse: f64 = 0.0;
            for _ in 0..samples {
                let wave = ReferenceWave::draw(&mut rng, n, comps);
                let f = |x: &[f64], out: &mut [f64]| wave.eval(&shifted.to_reference(x), out);
                let p = project_fn(f, &shifted, basis, &rule);
                let avg = mean_abs(
                    |x| {
                        let mut v = vec![0.0; comps];
                        f(x, &mut v);
                        v.iter().map(|c| c * c).sum::<f64>().sqrt()
                    },
                    &shifted,
                    &rule,
                );
                let sup = probe
                    .iter()
                    .map(|y| {
                        p.value(basis, &shifted.from_reference(y), &mut scratch, &mut val);
                        val.iter().map(|c| c * c).sum::<f64>().sqrt()
                    })
                    .fold(0.0, f64::max);
                if avg > 0.0 {
                    inverse = inverse.max(sup / avg);
                }
            }
            ScaleConstants { level, side: q.side(), sandwich, inverse }
        })
        .collect()
}

/// Options for [`trace_bounds_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsOptions {
    pub octaves: i32,
    pub samples: usize,
    pub seed: u64,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        Self { octaves: 4, samples: 32, seed: 0 }
    }
}

/// Collects the L¹ and L^∞ bounds of a run together with the scaling
/// constants of the kernel norms.
pub fn trace_bounds_check(run: &TraceRun, u: &HalfSpaceField, basis: &KernelBasis, opts: &BoundsOptions) -> Result<TraceBoundsReport> {
    let trace_l1 = lp_norm(run.candidate(), 1.0)?;
    let operator_l1 = field_lp_norm(&apply_operator(u, basis)?, 1.0)?;
    let trace_constant = (operator_l1 > 0.0).then(|| trace_l1 / operator_l1);
    let linf_ratios: Vec<(i32, f64)> = run.levels.iter().map(|l| (l.level, l.linf_ratio)).collect();
    let linf_constant = linf_ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let tail = &linf_ratios[linf_ratios.len().saturating_sub(TAIL_LEVELS)..];
    let tail_max = tail.iter().map(|r| r.1).fold(0.0, f64::max);
    let tail_min = tail.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let linf_tail_spread = if tail_max > 0.0 { (tail_max - tail_min) / tail_max } else { 0.0 };

    let scales = scale_constants(basis, opts.octaves, opts.samples, opts.seed);
    let scale_drift = scales
        .iter()
        .map(|s| {
            let a = (s.sandwich - scales[0].sandwich).abs() / scales[0].sandwich;
            let b = if scales[0].inverse > 0.0 { (s.inverse - scales[0].inverse).abs() / scales[0].inverse } else { 0.0 };
            a.max(b)
        })
        .fold(0.0, f64::max);

    let n = basis.operator().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut partition_slope: f64 = 0.0;
    for l in &run.levels {
        let s = 2f64.powi(-l.level);
        let mut extent = vec![(-2.0 * s, 2.0 * s); n - 1];
        extent.push((0.0, s));
        let pou = build_pou(build_cover(l.level, &extent)?);
        let probes: Vec<Vec<f64>> = (0..64)
            .map(|_| extent.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect())
            .collect();
        partition_slope = partition_slope.max(pou.scaled_gradient_bound(&probes));
    }
    let localizer_slope = Localizer::new(0).scaled_slope();
    Ok(TraceBoundsReport {
        trace_l1,
        operator_l1,
        trace_constant,
        linf_ratios,
        linf_constant,
        linf_tail_spread,
        scales,
        scale_drift,
        partition_slope,
        localizer_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::celliptic::kernel::{kernel_basis, DEFAULT_DEGREE_CAP};
    use crate::celliptic::operator::DiffOperator;
    use crate::grid::{BoundaryGrid, LevelSchedule};

    fn field<F: Fn(f64, f64) -> Vec<f64>>(f: F, comps: usize, half: f64, h: f64, top: f64) -> HalfSpaceField {
        let grid = BoundaryGrid::new(1, half, h).unwrap();
        let levels = LevelSchedule::Uniform { spacing: h, top, include_zero: true }.levels().unwrap();
        let mut vals = Vec::new();
        for &t in &levels {
            for i in 0..grid.len() {
                vals.extend(f(grid.point(i)[0], t));
            }
        }
        HalfSpaceField::new(grid, levels, comps, vals).unwrap()
    }

    #[test]
    fn rigid_motion_is_its_own_trace() {
        let basis = kernel_basis(&DiffOperator::symmetric_gradient_2d(), DEFAULT_DEGREE_CAP).unwrap();
        let rigid = |x: f64, t: f64| vec![0.2 - 0.5 * t, 1.0 + 0.5 * x];
        let u = field(rigid, 2, 2.0, 1.0 / 64.0, 2.0);
        let run = replacement_trace(&u, &basis, 1, 4).unwrap();
        for l in &run.levels {
            for node in 0..l.trace.grid().len() {
                let x = l.trace.grid().point(node)[0];
                // away from the truncated edges
                if x.abs() <= 1.0 {
                    let v = l.trace.node_values(node);
                    let e = rigid(x, 0.0);
                    assert!((v[0] - e[0]).abs() < 1e-10 && (v[1] - e[1]).abs() < 1e-10, "j={} x={x}", l.level);
                }
            }
        }
    }

    #[test]
    fn zero_field_gives_zero_iterates() {
        let basis = kernel_basis(&DiffOperator::gradient(2).unwrap(), DEFAULT_DEGREE_CAP).unwrap();
        let u = field(|_, _| vec![0.0], 1, 1.0, 1.0 / 32.0, 1.0);
        let run = replacement_trace(&u, &basis, 0, 3).unwrap();
        assert!(run.levels.iter().all(|l| l.l1_trace_norm == 0.0 && l.linf_ratio == 0.0));
        let report = trace_bounds_check(&run, &u, &basis, &BoundsOptions { samples: 4, ..Default::default() }).unwrap();
        assert_eq!(report.trace_l1, 0.0);
        assert_eq!(report.trace_constant, None);
    }

    #[test]
    fn scale_constants_are_scale_free() {
        for op in [DiffOperator::gradient(2).unwrap(), DiffOperator::symmetric_gradient_2d()] {
            let basis = kernel_basis(&op, DEFAULT_DEGREE_CAP).unwrap();
            let s = scale_constants(&basis, 4, 8, 5);
            for c in &s {
                assert!(c.sandwich >= 1.0 && c.inverse > 0.0);
                assert!((c.sandwich - s[0].sandwich).abs() < 1e-9 * s[0].sandwich);
                assert!((c.inverse - s[0].inverse).abs() < 1e-9 * s[0].inverse);
            }
        }
    }

    #[test]
    fn insufficient_sampling_names_the_cube() {
        let basis = kernel_basis(&DiffOperator::gradient(2).unwrap(), DEFAULT_DEGREE_CAP).unwrap();
        let u = field(|_, _| vec![1.0], 1, 1.0, 1.0 / 8.0, 1.0);
        match replacement_trace(&u, &basis, 3, 3) {
            Err(Error::InsufficientSampling(msg)) => assert!(msg.contains("j=3")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_layout() {
        let basis = kernel_basis(&DiffOperator::gradient(2).unwrap(), DEFAULT_DEGREE_CAP).unwrap();
        let u = field(|x, t| vec![(-x * x - t * t).exp()], 1, 1.0, 1.0 / 32.0, 1.0);
        let run = replacement_trace(&u, &basis, 1, 2).unwrap();
        let mut buf = Vec::new();
        run.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "j,cube_count,l1_increment,l1_trace_norm,linf_ratio");
        assert!(lines[1].starts_with("1,") && lines[1].split(',').nth(2) == Some(""));
        assert_eq!(lines.len(), 3);
    }
}
