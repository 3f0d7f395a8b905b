//! Small dense complex linear algebra: null spaces, eigen decomposition,
//! matrix exponential.
//!
//! SVD, complex Schur and LU come from nalgebra; the rest is local.

use nalgebra::{Schur, SVD};
use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ComplexVector, ZERO};
use super::AlgebraError;

/// Default relative threshold for treating a singular value as zero.
pub const DEFAULT_NULL_TOL: f64 = 1e-10;

/// Eigenvalues closer than this (relative to the spectral scale) are treated
/// as one degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let svd = SVD::new(m.to_nalgebra(), false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Orthonormal basis of the numerical null space of a square matrix.
///
/// Right singular vectors whose singular value is at most `tol·‖M‖₂` are
/// returned. The zero matrix yields the full standard-size basis.
pub fn null_space(m: &ComplexMatrix, tol: f64) -> Vec<ComplexVector> {
    assert!(m.is_square(), "null_space expects a square matrix");
    let n = m.cols();
    let svd = SVD::new(m.to_nalgebra(), false, true);
    let v_t = svd.v_t.expect("SVD requested with V");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = tol * sigma_max;
    let mut basis = Vec::new();
    for (idx, &s) in svd.singular_values.iter().enumerate() {
        if s <= threshold {
            // rows of Vᴴ are conjugated right singular vectors
            basis.push((0..n).map(|j| v_t[(idx, j)].conj()).collect());
        }
    }
    basis
}

pub fn eigenvalues(m: &ComplexMatrix) -> Vec<Complex64> {
    assert!(m.is_square(), "eigenvalues expects a square matrix");
    let (_, t) = Schur::new(m.to_nalgebra()).unpack();
    (0..m.rows()).map(|i| t[(i, i)]).collect()
}

pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    assert!(m.is_square(), "determinant expects a square matrix");
    m.to_nalgebra().lu().determinant()
}

pub fn inverse(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    m.to_nalgebra()
        .try_inverse()
        .map(|inv| ComplexMatrix::from_nalgebra(&inv))
}

/// Ratio of extreme singular values; infinite for singular matrices.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// `M = V·diag(λ)·V⁻¹` with unit-norm eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
    pub inverse: ComplexMatrix,
    /// True when at least two eigenvalues fall within [`DEGENERACY_TOL`].
    pub degenerate: bool,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut d = ComplexMatrix::zeros(n, n);
        for (i, &l) in self.values.iter().enumerate() {
            d[(i, i)] = l;
        }
        &(&self.vectors * &d) * &self.inverse
    }

    /// `V·diag(f(λ))·V⁻¹`.
    pub fn apply_function(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        let fl: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        for i in 0..n {
            for k in 0..n {
                let vik = self.vectors[(i, k)] * fl[k];
                if vik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * self.inverse[(k, j)];
                }
            }
        }
        out
    }
}

/// Eigen decomposition of a diagonalizable matrix.
///
/// Eigenvalues come from the complex Schur form; eigenvectors from the null
/// space of `M − λ̄I` for each cluster of (near-)equal eigenvalues. Fails
/// with [`AlgebraError::Defective`] when the eigenvectors do not span.
pub fn eigen_decompose(m: &ComplexMatrix) -> Result<EigenDecomposition, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    let raw = eigenvalues(m);
    let scale = raw.iter().map(|l| l.norm()).fold(m.max_abs(), f64::max);
    let cluster_tol = DEGENERACY_TOL * scale.max(f64::MIN_POSITIVE);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        raw[a]
            .re
            .total_cmp(&raw[b].re)
            .then(raw[a].im.total_cmp(&raw[b].im))
    });
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for idx in order {
        let l = raw[idx];
        match clusters.iter_mut().find(|c| (c[0] - l).norm() <= cluster_tol) {
            Some(c) => c.push(l),
            None => clusters.push(vec![l]),
        }
    }
    let degenerate = clusters.iter().any(|c| c.len() > 1);

    let mut values = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    for cluster in &clusters {
        let mean = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
        let shifted = m - &ComplexMatrix::identity(n).scale(mean);
        let basis = null_space(&shifted, 1e-9);
        if basis.len() != cluster.len() {
            return Err(AlgebraError::Defective {
                eigenvalue: mean,
                algebraic: cluster.len(),
                geometric: basis.len(),
            });
        }
        for v in basis {
            values.push(mean);
            columns.push(v);
        }
    }
    let vectors = ComplexMatrix::from_columns(&columns);
    let inverse = inverse(&vectors).ok_or(AlgebraError::Singular)?;
    Ok(EigenDecomposition {
        values,
        vectors,
        inverse,
        degenerate,
    })
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square(), "expm expects a square matrix");
    let n = m.rows();
    let norm = m.norm();
    // scale so that ‖A/2^s‖ ≤ 1/2; 24 terms then reach below 1e-17
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = m.scale(0.5f64.powi(s));
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=24 {
        term = (&term * &a).scale(1.0 / k as f64);
        result = &result + &term;
        if term.max_abs() < 1e-18 * result.max_abs() {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}
