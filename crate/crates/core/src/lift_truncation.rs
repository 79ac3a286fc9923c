//! Nonlinear truncation lifting of boundary data into `W^{1,p} ∩ L^q`.
//!
//! The Poisson extension `v` of `f` is cut off where `x_n |v|^β` exceeds one:
//! `u = η(x_n |v|^β) v`. Near the boundary `u = v`, so the trace is `f`; far
//! from it `|u| <= (2/x_n)^{1/β}`, which buys `L^q` integrability.

use rayon::prelude::*;

use crate::error::{out_of_range, Result};
use crate::exponents::{ExponentSet, LebesgueExponent};
use crate::grid::{BoundaryGridFunction, HalfSpaceField, LevelSchedule};
use crate::maximal::{maximal_function, RadiusLadder};
use crate::norms::{
    field_lp_norm, gagliardo_seminorm_capped, gradient_lp_norm, level_weights, lp_norm, SeminormParams,
    SEMINORM_NODE_CAP,
};
use crate::poisson::poisson_extend;
use crate::profiles::{mollify, SmoothCutoff};

/// A constructed truncation lifting together with its ingredients.
#[derive(Debug, Clone)]
pub struct TruncationExtension {
    pub exponents: ExponentSet,
    pub data: BoundaryGridFunction,
    /// Poisson extension; a level at `x_n = 0` holds `f` itself.
    pub poisson: HalfSpaceField,
    pub lifting: HalfSpaceField,
    pub cutoff: SmoothCutoff,
}

/// Levels `0, t_0, t_0·ratio, …` up to `top` with
/// `t_0 = min(h, 0.25 / sup|f|^β)`.
///
/// Truncation cannot act below `x_n = 1/sup|f|^β`; starting the ladder a
/// factor four under that height keeps the switch-on layer resolved, which
/// the gradient and layer integrals are sensitive to.
pub fn onset_levels(data_sup: f64, beta: f64, h: f64, ratio: f64, top: f64) -> Result<Vec<f64>> {
    if !(data_sup >= 0.0 && beta > 0.0 && h > 0.0) {
        return out_of_range("need sup|f| >= 0, beta > 0 and h > 0");
    }
    let onset = if data_sup > 0.0 { 0.25 / data_sup.powf(beta) } else { f64::INFINITY };
    let mut levels = vec![0.0];
    levels.extend(LevelSchedule::Geometric { first: h.min(onset), ratio, top }.levels()?);
    Ok(levels)
}

/// Build `u = η(x_n |v|^β) v` on the given levels.
///
/// A leading level `0` is allowed and holds the boundary data, which is the
/// limit of both `v` and `u` there.
pub fn nonlinear_extend(f: &BoundaryGridFunction, exponents: ExponentSet, levels: &[f64]) -> Result<TruncationExtension> {
    nonlinear_extend_with(f, exponents, levels, SmoothCutoff::default())
}

pub fn nonlinear_extend_with(
    f: &BoundaryGridFunction,
    exponents: ExponentSet,
    levels: &[f64],
    cutoff: SmoothCutoff,
) -> Result<TruncationExtension> {
    if exponents.q.is_infinite() {
        return out_of_range("q = inf uses the mollifier lifting");
    }
    if levels.is_empty() {
        return out_of_range("no levels");
    }
    let has_zero = levels[0] == 0.0;
    let positive = if has_zero { &levels[1..] } else { levels };
    let mut values = Vec::with_capacity(f.values().len() * levels.len());
    if has_zero {
        values.extend_from_slice(f.values());
    }
    if !positive.is_empty() {
        values.extend_from_slice(poisson_extend(f, positive)?.values());
    }
    let poisson = HalfSpaceField::new(f.grid().clone(), levels.to_vec(), f.components(), values)?;
    from_poisson(f, exponents, poisson, cutoff)
}

/// Lifting from a precomputed extension, so several exponent sets can share
/// one Poisson computation.
pub fn from_poisson(
    f: &BoundaryGridFunction,
    exponents: ExponentSet,
    poisson: HalfSpaceField,
    cutoff: SmoothCutoff,
) -> Result<TruncationExtension> {
    let beta = exponents
        .beta
        .ok_or_else(|| crate::Error::OutOfRange("q = inf uses the mollifier lifting".into()))?;
    if poisson.grid() != f.grid() {
        return out_of_range("extension and data live on different grids");
    }
    let lifting = truncate(&poisson, beta, &cutoff)?;
    Ok(TruncationExtension {
        exponents,
        data: f.clone(),
        poisson,
        lifting,
        cutoff,
    })
}

/// Apply `η(x_n |v|^β)` sample by sample.
pub fn truncate(v: &HalfSpaceField, beta: f64, cutoff: &SmoothCutoff) -> Result<HalfSpaceField> {
    let nodes = v.grid().len();
    let comps = v.components();
    let levels = v.levels();
    let mut out = v.values().to_vec();
    out.par_chunks_mut(nodes * comps).enumerate().for_each(|(k, slab)| {
        let t = levels[k];
        for i in 0..nodes {
            let eta = cutoff.value(t * v.magnitude(k, i).powf(beta));
            for c in 0..comps {
                slab[i * comps + c] *= eta;
            }
        }
    });
    HalfSpaceField::new(v.grid().clone(), levels.to_vec(), comps, out)
}

/// Support condition: `u != 0` only where `x_n |v|^β <= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportReport {
    pub violations: usize,
    /// Largest `x_n |v|^β` among samples where `u != 0`.
    pub max_on_support: f64,
}

/// Pointwise bound `|u| <= min{Mf, (2/x_n)^{1/β}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseReport {
    /// Largest `|u| - min{Mf, (2/x_n)^{1/β}}`; non-positive when the bound holds.
    pub max_excess: f64,
    /// `(level, node)` of the largest excess.
    pub location: (usize, usize),
    pub tolerance: f64,
}

impl PointwiseReport {
    pub fn holds(&self) -> bool {
        self.max_excess <= self.tolerance
    }
}

/// Per-node `x_n`-integral of `|u|^q` against `Mf^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerIntegralReport {
    /// `max_x' ∫|u(x', t)|^q dt / Mf(x')^r` over nodes with `Mf > 0`.
    pub observed_constant: f64,
    /// `2q/r`, the value of `∫ min{M, (2/t)^{1/β}}^q dt / M^r`.
    pub closed_form_constant: f64,
}

impl TruncationExtension {
    fn beta(&self) -> f64 {
        self.exponents.beta.expect("finite q")
    }

    pub fn check_support(&self) -> SupportReport {
        let beta = self.beta();
        let nodes = self.data.grid().len();
        let mut rep = SupportReport { violations: 0, max_on_support: 0.0 };
        for (k, &t) in self.poisson.levels().iter().enumerate() {
            for i in 0..nodes {
                if self.lifting.magnitude(k, i) != 0.0 {
                    let psi = t * self.poisson.magnitude(k, i).powf(beta);
                    rep.max_on_support = rep.max_on_support.max(psi);
                    if psi > 2.0 {
                        rep.violations += 1;
                    }
                }
            }
        }
        rep
    }

    /// Check the pointwise bound against a supplied maximal function.
    pub fn pointwise_bound_against(&self, mf: &BoundaryGridFunction, tolerance: f64) -> PointwiseReport {
        let inv_beta = 1.0 / self.beta();
        let nodes = self.data.grid().len();
        let mut worst = (f64::NEG_INFINITY, (0, 0));
        for (k, &t) in self.lifting.levels().iter().enumerate() {
            let cap = if t > 0.0 { (2.0 / t).powf(inv_beta) } else { f64::INFINITY };
            for i in 0..nodes {
                let bound = mf.value(i).min(cap);
                let excess = self.lifting.magnitude(k, i) - bound;
                if excess > worst.0 {
                    worst = (excess, (k, i));
                }
            }
        }
        PointwiseReport { max_excess: worst.0, location: worst.1, tolerance }
    }

    pub fn pointwise_bound(&self, ladder: &RadiusLadder, tolerance: f64) -> Result<PointwiseReport> {
        let mf = maximal_function(&self.data, ladder)?;
        Ok(self.pointwise_bound_against(&mf, tolerance))
    }

    pub fn layer_integrals(&self, mf: &BoundaryGridFunction) -> Result<LayerIntegralReport> {
        let (q, r, _) = self.exponents.finite_triplet()?;
        let w = level_weights(self.lifting.levels());
        let nodes = self.data.grid().len();
        let observed = (0..nodes)
            .filter(|&i| mf.value(i) > 0.0)
            .map(|i| {
                let integral: f64 = w
                    .iter()
                    .enumerate()
                    .map(|(k, wk)| wk * self.lifting.magnitude(k, i).powf(q))
                    .sum();
                integral / mf.value(i).powf(r)
            })
            .fold(0.0, f64::max);
        Ok(LayerIntegralReport { observed_constant: observed, closed_form_constant: 2.0 * q / r })
    }

    /// Measure of `{x' : u(x', l_0) = 0 != f(x')}` at the lowest positive level `l_0`.
    pub fn collapse_measure(&self) -> f64 {
        let g = self.data.grid();
        let Some(k) = self.lifting.levels().iter().position(|&t| t > 0.0) else {
            return 0.0;
        };
        (0..g.len())
            .filter(|&i| self.lifting.magnitude(k, i) == 0.0 && self.data.magnitude(i) != 0.0)
            .map(|i| g.weight(i))
            .fold(0.0, |a, b| a + b)
    }
}

/// `LHS = ‖u‖_q + ‖∇u‖_p` against `RHS = ‖f‖_r^{r/q} + ‖f‖_r^{r/p} + [f]_{1-1/p,p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiefBoundReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `None` for zero data.
    pub ratio: Option<f64>,
}

pub fn chief_bound_check(ext: &TruncationExtension) -> Result<ChiefBoundReport> {
    chief_bound_check_capped(ext, SEMINORM_NODE_CAP)
}

pub fn chief_bound_check_capped(ext: &TruncationExtension, seminorm_cap: usize) -> Result<ChiefBoundReport> {
    let (q, r, _) = ext.exponents.finite_triplet()?;
    let p = ext.exponents.p;
    let lhs = field_lp_norm(&ext.lifting, q)? + gradient_lp_norm(&ext.lifting, p)?;
    let fr = lp_norm(&ext.data, r)?;
    let semi = gagliardo_seminorm_capped(&ext.data, SeminormParams::trace_space(p)?, seminorm_cap)?;
    let rhs = fr.powf(r / q) + fr.powf(r / p) + semi;
    let ratio = if rhs > 0.0 { Some(lhs / rhs) } else { None };
    Ok(ChiefBoundReport { lhs, rhs, ratio })
}

/// `‖u(·, l_0) - f‖_1` at the lowest positive level `l_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecoveryReport {
    pub level: f64,
    pub l1_error: f64,
}

pub fn trace_recovery_check(ext: &TruncationExtension) -> Result<TraceRecoveryReport> {
    let levels = ext.lifting.levels();
    let k = levels.iter().position(|&t| t > 0.0).ok_or_else(|| crate::Error::Empty("positive levels".into()))?;
    let err = ext.lifting.level_function(k).sub(&ext.data)?;
    Ok(TraceRecoveryReport { level: levels[k], l1_error: lp_norm(&err, 1.0)? })
}

/// `‖u(·,0)‖_r^r <= r ‖∇u‖_p ‖u‖_q^{r-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeReport {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl MultiplicativeReport {
    /// `(rhs - lhs)/rhs`; zero for the trivial case.
    pub fn margin(&self) -> f64 {
        if self.rhs > 0.0 {
            (self.rhs - self.lhs) / self.rhs
        } else {
            0.0
        }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Evaluate both sides of the multiplicative trace inequality. The field must
/// carry a level at `x_n = 0`.
pub fn multiplicative_trace_inequality(u: &HalfSpaceField, p: f64, q: f64) -> Result<MultiplicativeReport> {
    if u.levels()[0] != 0.0 {
        return out_of_range("the field needs a level at x_n = 0");
    }
    let r = crate::exponents::trace_exponent(p, q)?;
    let trace = u.level_function(0);
    let lhs = crate::norms::lp_power(&trace, r)?;
    let rhs = r * gradient_lp_norm(u, p)? * field_lp_norm(u, q)?.powf(r - 1.0);
    Ok(MultiplicativeReport { r, lhs, rhs })
}

/// Continuity of the lifting along mollified data.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    pub widths: Vec<f64>,
    /// `‖u_{k+1} - u_k‖_q + ‖∇(u_{k+1} - u_k)‖_p` for consecutive widths.
    pub differences: Vec<f64>,
}

impl ContinuityReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.differences.windows(2).all(|w| w[1] < w[0])
    }
}

/// Lift `mollify(f, δ_k)` for each width on shared levels and measure
/// successive differences of the liftings.
///
/// Widths at or below the grid spacing return `f` unchanged, so they should
/// stay above it.
pub fn mollified_differences(
    f: &BoundaryGridFunction,
    exponents: ExponentSet,
    widths: &[f64],
    levels: &[f64],
) -> Result<ContinuityReport> {
    if widths.len() < 2 {
        return out_of_range("need at least two mollifier widths");
    }
    let (q, _, _) = exponents.finite_triplet()?;
    let lifts = widths
        .par_iter()
        .map(|&w| Ok(nonlinear_extend(&mollify(f, w)?, exponents, levels)?.lifting))
        .collect::<Result<Vec<_>>>()?;
    let differences = lifts
        .windows(2)
        .map(|pair| {
            let d = pair[1].sub(&pair[0])?;
            Ok(field_lp_norm(&d, q)? + gradient_lp_norm(&d, exponents.p)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuityReport { widths: widths.to_vec(), differences })
}

/// `Ef(x', x_n) = η(x_n) (ψ_{x_n} * f)(x')` for bounded data.
pub fn linf_extend(f: &BoundaryGridFunction, levels: &[f64]) -> Result<HalfSpaceField> {
    linf_extend_with(f, levels, SmoothCutoff::default())
}

pub fn linf_extend_with(f: &BoundaryGridFunction, levels: &[f64], cutoff: SmoothCutoff) -> Result<HalfSpaceField> {
    let mut values = Vec::with_capacity(f.values().len() * levels.len());
    for &t in levels {
        let eta = cutoff.value(t);
        if eta == 0.0 {
            values.extend(std::iter::repeat_n(0.0, f.values().len()));
        } else {
            values.extend(mollify(f, t)?.values().iter().map(|v| eta * v));
        }
    }
    HalfSpaceField::new(f.grid().clone(), levels.to_vec(), f.components(), values)
}

/// Seminorm/`L^r` norms of the trace space for the given exponents.
pub fn trace_space_norm(f: &BoundaryGridFunction, exponents: &ExponentSet, seminorm_cap: usize) -> Result<f64> {
    let semi = gagliardo_seminorm_capped(f, SeminormParams::trace_space(exponents.p)?, seminorm_cap)?;
    let r = match exponents.r {
        LebesgueExponent::Finite(r) => r,
        LebesgueExponent::Infinite => return Ok(semi + lp_norm(f, LebesgueExponent::Infinite)?),
    };
    Ok(semi + lp_norm(f, r)?)
}
