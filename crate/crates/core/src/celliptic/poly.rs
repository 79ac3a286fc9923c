//! Vector-valued polynomials stored as monomial coefficient tables, and
//! Gauss–Legendre rules for integrating them.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use super::operator::DiffOperator;

/// Graded list of exponent vectors `α ∈ N^n` with `|α| ≤ degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialSet {
    dim: usize,
    degree: usize,
    exponents: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

fn compositions(dim: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == dim {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        compositions(dim, total - first, prefix, out);
        prefix.pop();
    }
}

impl MonomialSet {
    pub fn new(dim: usize, degree: usize) -> Self {
        let mut exponents = Vec::new();
        for d in 0..=degree as u32 {
            compositions(dim, d, &mut Vec::with_capacity(dim), &mut exponents);
        }
        let index = exponents.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Self { dim, degree, exponents, index }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn position(&self, alpha: &[u32]) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    /// All monomials evaluated at `y`.
    pub fn evaluate(&self, y: &[f64], out: &mut [f64]) {
        let mut powers = vec![vec![1.0; self.degree + 1]; self.dim];
        for (a, row) in powers.iter_mut().enumerate() {
            for d in 1..=self.degree {
                row[d] = row[d - 1] * y[a];
            }
        }
        for (o, alpha) in out.iter_mut().zip(&self.exponents) {
            *o = alpha
                .iter()
                .enumerate()
                .map(|(a, &e)| powers[a][e as usize])
                .product();
        }
    }
}

/// Matrix of `π ↦ 𝔸π` on coefficient tables.
///
/// Columns are indexed `k·|S| + α` (component `k`, monomial `α`), rows
/// `i·|S| + β` (output `i`, monomial `β`), both over the same monomial set.
pub fn operator_matrix(op: &DiffOperator, monos: &MonomialSet) -> DMatrix<f64> {
    let m = monos.len();
    let mut mat = DMatrix::zeros(op.outputs() * m, op.components() * m);
    for (col_mono, alpha) in monos.exponents().iter().enumerate() {
        for a in 0..op.dim() {
            if alpha[a] == 0 {
                continue;
            }
            let mut beta = alpha.clone();
            beta[a] -= 1;
            let row_mono = monos.position(&beta).expect("lower degree present");
            let factor = alpha[a] as f64;
            let coef = op.coefficient(a);
            for i in 0..op.outputs() {
                for k in 0..op.components() {
                    mat[(i * m + row_mono, k * m + col_mono)] += factor * coef[(i, k)];
                }
            }
        }
    }
    mat
}

/// Largest coefficient of `𝔸π`.
pub fn operator_residual(op: &DiffOperator, monos: &MonomialSet, coeffs: &[f64]) -> f64 {
    let mat = operator_matrix(op, monos);
    let v = nalgebra::DVector::from_column_slice(coeffs);
    (mat * v).amax()
}

/// Gauss–Legendre nodes and weights on `[0, 1]` by the Golub–Welsch
/// eigenvalue method; exact for degree `2·points − 1`.
pub fn gauss_legendre(points: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(points >= 1);
    if points == 1 {
        return (vec![0.5], vec![1.0]);
    }
    let jacobi = DMatrix::from_fn(points, points, |i, j| {
        let k = i.max(j) as f64;
        if i.abs_diff(j) == 1 {
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (eig.eigenvalues[i] + 1.0), v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Tensor Gauss–Legendre rule on `[0, 1]^dim`, optionally composite over
/// `cells` subintervals per axis.
#[derive(Debug, Clone)]
pub struct TensorRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl TensorRule {
    pub fn new(dim: usize, points: usize, cells: usize) -> Self {
        let (x, w) = gauss_legendre(points);
        let cells = cells.max(1);
        let h = 1.0 / cells as f64;
        let mut nodes = Vec::with_capacity(points * cells);
        let mut wts = Vec::with_capacity(points * cells);
        for c in 0..cells {
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push((c as f64 + xi) * h);
                wts.push(wi * h);
            }
        }
        let per = nodes.len();
        let total = per.pow(dim as u32);
        let mut points_out = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut p = Vec::with_capacity(dim);
            let mut wt = 1.0;
            for _ in 0..dim {
                let i = rem % per;
                rem /= per;
                p.push(nodes[i]);
                wt *= wts[i];
            }
            points_out.push(p);
            weights.push(wt);
        }
        Self { points: points_out, weights }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts_are_binomial() {
        // C(n + d, d)
        assert_eq!(MonomialSet::new(2, 0).len(), 1);
        assert_eq!(MonomialSet::new(2, 3).len(), 10);
        assert_eq!(MonomialSet::new(3, 2).len(), 10);
        let s = MonomialSet::new(3, 4);
        assert_eq!(s.len(), 35);
        for (i, e) in s.exponents().iter().enumerate() {
            assert_eq!(s.position(e), Some(i));
        }
    }

    #[test]
    fn gauss_legendre_integrates_monomials_exactly() {
        for pts in 1..8 {
            let (x, w) = gauss_legendre(pts);
            for deg in 0..2 * pts {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((approx - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "pts {pts} deg {deg}");
            }
        }
    }

    #[test]
    fn tensor_rule_volume_and_moment() {
        let r = TensorRule::new(3, 2, 3);
        let vol: f64 = r.weights.iter().sum();
        assert!((vol - 1.0).abs() < 1e-14);
        let m: f64 = r.points.iter().zip(&r.weights).map(|(p, w)| w * p[0] * p[1] * p[2]).sum();
        assert!((m - 0.125).abs() < 1e-15);
    }

    #[test]
    fn gradient_matrix_kills_constants_only() {
        let op = DiffOperator::gradient(2).unwrap();
        let s = MonomialSet::new(2, 1);
        let mat = operator_matrix(&op, &s);
        // x1 -> ∂1 = 1 in output 0 at the constant monomial
        let col = s.position(&[1, 0]).unwrap();
        assert_eq!(mat[(0, col)], 1.0);
        assert_eq!(mat.column(0).amax(), 0.0);
        assert_eq!(operator_residual(&op, &s, &[1.0, 0.0, 0.0]), 0.0);
    }
}
