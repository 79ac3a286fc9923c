//! First-order constant-coefficient operators `Σ_a A_a ∂_a` and a sampled
//! test for injectivity of their complex symbol.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{out_of_range, Result};

/// Threshold on the smallest singular value below which a symbol is treated
/// as singular.
pub const SINGULAR_TOL: f64 = 1e-8;

/// Default number of pseudo-random probe frequencies.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// `u ↦ Σ_a A_a ∂_a u` with `A_a` real `outputs × components` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOperator {
    name: String,
    dim: usize,
    components: usize,
    outputs: usize,
    coefficients: Vec<DMatrix<f64>>,
}

impl DiffOperator {
    pub fn new(name: impl Into<String>, coefficients: Vec<DMatrix<f64>>) -> Result<Self> {
        let dim = coefficients.len();
        if dim < 2 {
            return out_of_range(format!("need at least 2 coefficient matrices, got {dim}"));
        }
        let (outputs, components) = coefficients[0].shape();
        if outputs == 0 || components == 0 {
            return out_of_range("coefficient matrices must be non-empty");
        }
        if coefficients.iter().any(|a| a.shape() != (outputs, components)) {
            return out_of_range("coefficient matrices must share one shape");
        }
        if coefficients.iter().flatten().any(|v| !v.is_finite()) {
            return out_of_range("coefficients must be finite");
        }
        Ok(Self { name: name.into(), dim, components, outputs, coefficients })
    }

    /// Full gradient of a scalar field on `R^n`.
    pub fn gradient(n: usize) -> Result<Self> {
        let coefficients = (0..n)
            .map(|a| DMatrix::from_fn(n, 1, |i, _| if i == a { 1.0 } else { 0.0 }))
            .collect();
        Self::new("gradient", coefficients)
    }

    /// Symmetric part of the gradient of a planar vector field:
    /// rows `∂₁u₁`, `(∂₂u₁ + ∂₁u₂)/2`, `∂₂u₂`.
    pub fn symmetric_gradient_2d() -> Self {
        let a1 = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.5, 0.0, 0.0]);
        let a2 = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 0.5, 0.0, 0.0, 1.0]);
        Self::new("symmetric_gradient", vec![a1, a2]).expect("well-formed")
    }

    /// Cauchy–Riemann operator as a real system:
    /// rows `∂₁u₁ − ∂₂u₂`, `∂₂u₁ + ∂₁u₂`.
    pub fn cauchy_riemann() -> Self {
        let a1 = DMatrix::identity(2, 2);
        let a2 = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        Self::new("cauchy_riemann", vec![a1, a2]).expect("well-formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn coefficient(&self, axis: usize) -> &DMatrix<f64> {
        &self.coefficients[axis]
    }

    /// `Σ_a A_a ξ_a` for complex `ξ`.
    pub fn symbol(&self, xi: &[Complex<f64>]) -> DMatrix<Complex<f64>> {
        assert_eq!(xi.len(), self.dim);
        DMatrix::from_fn(self.outputs, self.components, |i, k| {
            self.coefficients
                .iter()
                .zip(xi)
                .map(|(a, &z)| z * a[(i, k)])
                .sum()
        })
    }

    /// Applies the operator to a Jacobian `jac[c·n + a] = ∂_a u_c`.
    pub fn apply_jacobian(&self, jac: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for (i, o) in out.iter_mut().enumerate().take(self.outputs) {
            let mut s = 0.0;
            for (a, m) in self.coefficients.iter().enumerate() {
                for k in 0..self.components {
                    s += m[(i, k)] * jac[k * n + a];
                }
            }
            *o = s;
        }
    }
}

/// Smallest singular value of the symbol at `ξ`; zero when the symbol has
/// more columns than rows.
pub fn min_singular_value(op: &DiffOperator, xi: &[Complex<f64>]) -> f64 {
    let s = op.symbol(xi);
    if op.outputs() < op.components() {
        return 0.0;
    }
    let sv = s.svd(false, false).singular_values;
    sv.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Outcome of the sampled injectivity test.
#[derive(Debug, Clone, PartialEq)]
pub enum Ellipticity {
    /// No probe found a singular symbol.
    LikelyElliptic { min_singular_value: f64 },
    /// The symbol at `witness` has a singular value below [`SINGULAR_TOL`].
    NotElliptic { witness: Vec<Complex<f64>>, singular_value: f64 },
}

impl Ellipticity {
    pub fn is_elliptic(&self) -> bool {
        matches!(self, Ellipticity::LikelyElliptic { .. })
    }

    pub fn min_singular_value(&self) -> f64 {
        match self {
            Ellipticity::LikelyElliptic { min_singular_value } => *min_singular_value,
            Ellipticity::NotElliptic { singular_value, .. } => *singular_value,
        }
    }
}

fn normalized(mut xi: Vec<Complex<f64>>) -> Option<Vec<Complex<f64>>> {
    let norm = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return None;
    }
    xi.iter_mut().for_each(|z| *z /= norm);
    Some(xi)
}

/// Deterministic probes: coordinate axes, `(e_a ± i e_b)` and `(e_a ± e_b)`.
fn structured_probes(n: usize) -> Vec<Vec<Complex<f64>>> {
    let zero = Complex::new(0.0, 0.0);
    let mut out = Vec::new();
    for a in 0..n {
        let mut xi = vec![zero; n];
        xi[a] = Complex::new(1.0, 0.0);
        out.push(xi);
    }
    for a in 0..n {
        for b in a + 1..n {
            for second in [
                Complex::new(0.0, 1.0),
                Complex::new(0.0, -1.0),
                Complex::new(1.0, 0.0),
                Complex::new(-1.0, 0.0),
            ] {
                let mut xi = vec![zero; n];
                xi[a] = Complex::new(1.0, 0.0);
                xi[b] = second;
                out.extend(normalized(xi));
            }
        }
    }
    out
}

/// Samples the complex symbol on the unit sphere of `C^n`.
///
/// Random probes draw real and imaginary parts uniformly from `[-1, 1]` and
/// normalize; each probe is also evaluated at its conjugate.
pub fn is_c_elliptic(op: &DiffOperator, sample_count: usize, seed: u64) -> Ellipticity {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = structured_probes(n);
    while probes.len() < sample_count + structured_probes(n).len() {
        let xi: Vec<Complex<f64>> = (0..n)
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if let Some(xi) = normalized(xi) {
            let conj = xi.iter().map(|z| z.conj()).collect();
            probes.push(xi);
            probes.push(conj);
        }
    }
    let mut best = f64::INFINITY;
    for xi in probes {
        let s = min_singular_value(op, &xi);
        if s < SINGULAR_TOL {
            return Ellipticity::NotElliptic { witness: xi, singular_value: s };
        }
        best = best.min(s);
    }
    Ellipticity::LikelyElliptic { min_singular_value: best }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn gradient_symbol_has_unit_singular_value() {
        for n in 2..=3 {
            let op = DiffOperator::gradient(n).unwrap();
            match is_c_elliptic(&op, 2000, 1) {
                Ellipticity::LikelyElliptic { min_singular_value } => {
                    assert!((min_singular_value - 1.0).abs() < 1e-12)
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn cauchy_riemann_singular_along_isotropic_direction() {
        let op = DiffOperator::cauchy_riemann();
        let s = 0.5f64.sqrt();
        let xi = [c(s, 0.0), c(0.0, s)];
        let m = op.symbol(&xi);
        // null vector (1, -i)/√2
        let v = nalgebra::DVector::from_vec(vec![c(s, 0.0), c(0.0, -s)]);
        assert!((&m * v).norm() < 1e-15);
        match is_c_elliptic(&op, 100, 7) {
            Ellipticity::NotElliptic { witness, singular_value } => {
                assert!(singular_value < SINGULAR_TOL);
                // witness is proportional to (1, ±i)
                assert!((witness[1].norm() - witness[0].norm()).abs() < 1e-12);
                assert!((witness[1] / witness[0]).re.abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn symmetric_gradient_agrees_with_gram_eigenvalue() {
        let op = DiffOperator::symmetric_gradient_2d();
        let verdict = is_c_elliptic(&op, DEFAULT_SAMPLES, 3);
        assert!(verdict.is_elliptic());
        // independent oracle: smallest eigenvalue of the 2x2 Hermitian Gram
        // matrix of the symbol columns, in closed form
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let xi = normalized(vec![
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            ])
            .unwrap();
            let col1 = [xi[0], xi[1] * 0.5, c(0.0, 0.0)];
            let col2 = [c(0.0, 0.0), xi[0] * 0.5, xi[1]];
            let g11: f64 = col1.iter().map(|z| z.norm_sqr()).sum();
            let g22: f64 = col2.iter().map(|z| z.norm_sqr()).sum();
            let g12: Complex<f64> = col1.iter().zip(&col2).map(|(a, b)| a.conj() * b).sum();
            let tr = g11 + g22;
            let det = g11 * g22 - g12.norm_sqr();
            let lam = 0.5 * (tr - (tr * tr - 4.0 * det).max(0.0).sqrt());
            let s = min_singular_value(&op, &xi);
            assert!((s * s - lam).abs() < 1e-12);
            assert!(lam > 0.0);
        }
        assert!(verdict.min_singular_value() > 0.1);
    }

    #[test]
    fn underdetermined_symbol_is_singular() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let b = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
        let op = DiffOperator::new("div", vec![a, b]).unwrap();
        assert!(!is_c_elliptic(&op, 10, 0).is_elliptic());
    }

    #[test]
    fn jacobian_application() {
        let op = DiffOperator::symmetric_gradient_2d();
        // u = (x2, 0): ∂₂u₁ = 1
        let jac = [0.0, 1.0, 0.0, 0.0];
        let mut out = [0.0; 3];
        op.apply_jacobian(&jac, &mut out);
        assert_eq!(out, [0.0, 0.5, 0.0]);
    }
}
