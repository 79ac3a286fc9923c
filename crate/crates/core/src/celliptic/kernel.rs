//! Polynomial null spaces of an operator, orthonormalized on the unit cube
//! and transported to arbitrary cubes by translation and dilation.

use nalgebra::DMatrix;

use super::cover::Cube;
use super::operator::DiffOperator;
use super::poly::{operator_matrix, operator_residual, MonomialSet, TensorRule};
use crate::error::{Error, Result};

/// Default maximal polynomial degree searched.
pub const DEFAULT_DEGREE_CAP: usize = 4;

/// Relative singular-value threshold for the null space.
const NULL_TOL: f64 = 1e-10;

/// Right null space of `mat` as columns, via the SVD of the zero-padded
/// square matrix (so that all right singular vectors are available).
fn null_space(mat: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let (rows, cols) = mat.shape();
    let size = rows.max(cols);
    let mut square = DMatrix::zeros(size, cols);
    square.view_mut((0, 0), (rows, cols)).copy_from(mat);
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let top = svd.singular_values.max().max(1.0);
    (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= NULL_TOL * top)
        .map(|i| v_t.row(i).iter().copied().collect())
        .collect()
}

/// Dimension of the polynomial kernel of `op` restricted to degree `≤ d`.
pub fn kernel_dimension(op: &DiffOperator, degree: usize) -> usize {
    null_space(&operator_matrix(op, &MonomialSet::new(op.dim(), degree))).len()
}

/// An `L²([0,1]^n)`-orthonormal basis of the polynomial kernel.
///
/// Basis element `i` is stored as a coefficient table with entry
/// `k·|S| + α` for component `k` and monomial `α`.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    operator: DiffOperator,
    monomials: MonomialSet,
    dimensions: Vec<usize>,
    basis: Vec<Vec<f64>>,
}

impl KernelBasis {
    pub fn operator(&self) -> &DiffOperator {
        &self.operator
    }

    pub fn monomials(&self) -> &MonomialSet {
        &self.monomials
    }

    /// Polynomial degree at which the kernel dimension stabilized.
    pub fn degree(&self) -> usize {
        self.monomials.degree()
    }

    /// Kernel dimension at each searched degree.
    pub fn dimensions_by_degree(&self) -> &[usize] {
        &self.dimensions
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn coefficients(&self, i: usize) -> &[f64] {
        &self.basis[i]
    }

    /// Largest coefficient of `𝔸π_i` over the basis.
    pub fn operator_residual(&self) -> f64 {
        self.basis
            .iter()
            .map(|c| operator_residual(&self.operator, &self.monomials, c))
            .fold(0.0, f64::max)
    }

    /// `max |⟨π_i, π_k⟩ − δ_ik|` on the unit cube, by Gauss–Legendre.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.gram(&self.basis);
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for k in 0..self.len() {
                let target = if i == k { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, k)] - target).abs());
            }
        }
        worst
    }

    fn gram(&self, tables: &[Vec<f64>]) -> DMatrix<f64> {
        let n = self.operator.dim();
        let comps = self.operator.components();
        let rule = TensorRule::new(n, self.degree() + 1, 1);
        let m = self.monomials.len();
        let mut mono = vec![0.0; m];
        let mut vals = vec![0.0; tables.len() * comps];
        let mut gram = DMatrix::zeros(tables.len(), tables.len());
        for (y, w) in rule.points.iter().zip(&rule.weights) {
            self.monomials.evaluate(y, &mut mono);
            for (i, t) in tables.iter().enumerate() {
                for k in 0..comps {
                    vals[i * comps + k] = (0..m).map(|a| t[k * m + a] * mono[a]).sum();
                }
            }
            for i in 0..tables.len() {
                for j in 0..tables.len() {
                    let dot: f64 = (0..comps).map(|k| vals[i * comps + k] * vals[j * comps + k]).sum();
                    gram[(i, j)] += w * dot;
                }
            }
        }
        gram
    }

    /// Values of every basis element at reference point `y ∈ [0,1]^n`;
    /// `out[i·N + k]` is component `k` of `π_i`.
    pub fn eval_reference(&self, y: &[f64], out: &mut [f64]) {
        let comps = self.operator.components();
        let m = self.monomials.len();
        let mut mono = vec![0.0; m];
        self.monomials.evaluate(y, &mut mono);
        for (i, t) in self.basis.iter().enumerate() {
            for k in 0..comps {
                out[i * comps + k] = (0..m).map(|a| t[k * m + a] * mono[a]).sum();
            }
        }
    }

    /// Values at `x` of the basis transported to `cube`, which is
    /// orthonormal in `L²(cube)`.
    pub fn eval_on(&self, cube: &Cube, x: &[f64], out: &mut [f64]) {
        let y = cube.to_reference(x);
        self.eval_reference(&y, out);
        let scale = cube.side().powf(-0.5 * self.operator.dim() as f64);
        out.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Searches degrees `0..=degree_cap` for the polynomial kernel of `op`
/// until the dimension repeats at two consecutive degrees, then
/// orthonormalizes the kernel at the first degree of the repeat.
///
/// Fails with [`Error::KernelNotFinite`] when no repeat occurs; this is the
/// expected outcome for operators that are not ℂ-elliptic.
pub fn kernel_basis(op: &DiffOperator, degree_cap: usize) -> Result<KernelBasis> {
    let mut dims = Vec::new();
    for d in 0..=degree_cap {
        dims.push(kernel_dimension(op, d));
        if d > 0 && dims[d] == dims[d - 1] {
            return orthonormal_basis(op, d - 1, dims);
        }
    }
    Err(Error::KernelNotFinite { cap: degree_cap, dims })
}

fn orthonormal_basis(op: &DiffOperator, degree: usize, dimensions: Vec<usize>) -> Result<KernelBasis> {
    let monomials = MonomialSet::new(op.dim(), degree);
    let candidates = null_space(&operator_matrix(op, &monomials));
    let mut out = KernelBasis { operator: op.clone(), monomials, dimensions, basis: Vec::new() };
    if candidates.is_empty() {
        return Ok(out);
    }
    // Gram matrix of the candidates; modified Gram–Schmidt in that metric,
    // two passes for accuracy.
    let mut tables = candidates;
    for _ in 0..2 {
        let mut done: Vec<Vec<f64>> = Vec::with_capacity(tables.len());
        for t in &tables {
            let mut v = t.clone();
            for e in &done {
                let g = out.gram(&[v.clone(), e.clone()]);
                let proj = g[(0, 1)];
                v.iter_mut().zip(e).for_each(|(a, b)| *a -= proj * b);
            }
            let norm = out.gram(std::slice::from_ref(&v))[(0, 0)].sqrt();
            if norm <= NULL_TOL {
                return Err(Error::InsufficientSampling("degenerate kernel candidate".into()));
            }
            v.iter_mut().for_each(|a| *a /= norm);
            done.push(v);
        }
        tables = done;
    }
    out.basis = tables;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rank by Gaussian elimination with partial pivoting.
    fn rank_by_elimination(mut a: DMatrix<f64>) -> usize {
        let (rows, cols) = a.shape();
        let mut rank = 0;
        for c in 0..cols {
            let pivot = (rank..rows).max_by(|&i, &j| a[(i, c)].abs().total_cmp(&a[(j, c)].abs()));
            let Some(p) = pivot else { break };
            if a[(p, c)].abs() < 1e-12 {
                continue;
            }
            a.swap_rows(rank, p);
            for r in rank + 1..rows {
                let f = a[(r, c)] / a[(rank, c)];
                for k in c..cols {
                    a[(r, k)] -= f * a[(rank, k)];
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn dimensions_match_elimination() {
        let ops = [
            DiffOperator::gradient(2).unwrap(),
            DiffOperator::gradient(3).unwrap(),
            DiffOperator::symmetric_gradient_2d(),
            DiffOperator::cauchy_riemann(),
        ];
        for op in &ops {
            for d in 0..=4 {
                let mat = operator_matrix(op, &MonomialSet::new(op.dim(), d));
                let nullity = mat.ncols() - rank_by_elimination(mat);
                assert_eq!(kernel_dimension(op, d), nullity, "{} degree {d}", op.name());
            }
        }
    }

    #[test]
    fn gradient_kernel_is_constants() {
        for n in 2..=3 {
            let b = kernel_basis(&DiffOperator::gradient(n).unwrap(), DEFAULT_DEGREE_CAP).unwrap();
            assert_eq!(b.len(), 1);
            assert_eq!(b.degree(), 0);
            let cube = Cube::new(vec![0.3; n], 0.5);
            let mut v = [0.0];
            b.eval_on(&cube, &vec![0.2; n], &mut v);
            // |Q|^{-1/2}
            assert!((v[0].abs() - 0.5f64.powf(-0.5 * n as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_gradient_kernel_is_rigid_motions() {
        let op = DiffOperator::symmetric_gradient_2d();
        let b = kernel_basis(&op, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(b.dimensions_by_degree(), &[2, 3, 3]);
        assert_eq!(b.degree(), 1);
        assert_eq!(b.len(), 3);
        assert!(b.operator_residual() < 1e-12);
        assert!(b.orthonormality_error() < 1e-12);
    }

    #[test]
    fn cauchy_riemann_kernel_never_stabilizes() {
        match kernel_basis(&DiffOperator::cauchy_riemann(), DEFAULT_DEGREE_CAP) {
            Err(Error::KernelNotFinite { cap, dims }) => {
                assert_eq!(cap, 4);
                assert_eq!(dims, vec![2, 4, 6, 8, 10]);
            }
            other => panic!("{other:?}"),
        }
    }
}
