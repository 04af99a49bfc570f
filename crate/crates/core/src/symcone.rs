//! Symmetric-matrix kernel: eigenvalues, the positive semidefinite cone,
//! operator norms and contractions, PSD square roots, and the Minkowski
//! (light-cone) classification of 2×2 symmetric matrices.
//!
//! Matrices here are small (d ≤ 8), so everything is dense and eigenvalues
//! come from cyclic Jacobi rotations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

/// Default absolute tolerance on eigenvalues for cone-boundary decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

const JACOBI_THRESHOLD: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Real symmetric d×d matrix, stored as its upper triangle in row order.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    upper: Vec<f64>,
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).collect::<Vec<_>>()))
            .finish()
    }
}

fn upper_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidInput(format!("dimension {dim} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} outside 1..={MAX_DIM}");
        SymMatrix { dim, upper: vec![0.0; dim * (dim + 1) / 2] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Builds from the packed upper triangle (row order).
    pub fn from_upper(dim: usize, upper: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if upper.len() != dim * (dim + 1) / 2 {
            return Err(Error::InvalidInput(format!(
                "expected {} upper-triangle entries, got {}",
                dim * (dim + 1) / 2,
                upper.len()
            )));
        }
        Ok(SymMatrix { dim, upper })
    }

    /// Builds from rows, requiring exact symmetry.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidInput("matrix is not square".into()));
            }
            for (j, &x) in row.iter().enumerate() {
                if rows[j][i] != x {
                    return Err(Error::InvalidInput(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[upper_index(self.dim, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        let k = upper_index(self.dim, i, j);
        self.upper[k] = x;
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|x| x.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.svec().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|&x| x == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        SymMatrix { dim: self.dim, upper: self.upper.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, other: &SymMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        SymMatrix {
            dim: self.dim,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Isometric vectorization: off-diagonal entries scaled by √2 so that the
    /// Euclidean inner product of two vectors equals the trace inner product.
    pub fn svec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.upper.len());
        for i in 0..self.dim {
            for j in i..self.dim {
                let x = self.get(i, j);
                out.push(if i == j { x } else { x * std::f64::consts::SQRT_2 });
            }
        }
        out
    }

    pub fn from_svec(dim: usize, v: &[f64]) -> Self {
        let mut m = Self::zeros(dim);
        let mut k = 0;
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, if i == j { v[k] } else { v[k] / std::f64::consts::SQRT_2 });
                k += 1;
            }
        }
        m
    }

    /// Trace inner product ⟨A, B⟩ = tr(AB).
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.svec().iter().zip(other.svec()).map(|(a, b)| a * b).sum()
    }

    pub fn determinant(&self) -> f64 {
        let full = nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j));
        full.determinant()
    }

    /// A · diag(values) · Aᵀ for a column-major orthogonal `vectors`.
    fn from_spectrum(dim: usize, values: &[f64], vectors: &[f64]) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let s = (0..dim).map(|k| vectors[k * dim + i] * values[k] * vectors[k * dim + j]).sum();
                m.set(i, j, s);
            }
        }
        m
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Column-major: eigenvector k occupies `vectors[k*d..(k+1)*d]`.
    pub vectors: Vec<f64>,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> &[f64] {
        let d = self.values.len();
        &self.vectors[k * d..(k + 1) * d]
    }
}

/// Eigenvalues and eigenvectors by cyclic Jacobi rotations.
pub fn eigen_sym(m: &SymMatrix) -> Result<SymEigen> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let d = m.dim;
    let mut a: Vec<f64> = (0..d * d).map(|k| m.get(k / d, k % d)).collect();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if total > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..d)
                .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * d + j] * a[i * d + j])
                .sum::<f64>()
                .sqrt();
            if off <= JACOBI_THRESHOLD * total {
                break;
            }
            for p in 0..d {
                for q in p + 1..d {
                    let apq = a[p * d + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * d + p];
                    let aqq = a[q * d + q];
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..d {
                        let akp = a[k * d + p];
                        let akq = a[k * d + q];
                        a[k * d + p] = c * akp - s * akq;
                        a[k * d + q] = s * akp + c * akq;
                    }
                    for k in 0..d {
                        let apk = a[p * d + k];
                        let aqk = a[q * d + k];
                        a[p * d + k] = c * apk - s * aqk;
                        a[q * d + k] = s * apk + c * aqk;
                    }
                    for k in 0..d {
                        let vkp = v[k * d + p];
                        let vkq = v[k * d + q];
                        v[k * d + p] = c * vkp - s * vkq;
                        v[k * d + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[i * d + i].total_cmp(&a[j * d + j]));
    let values = order.iter().map(|&i| a[i * d + i]).collect();
    let mut vectors = vec![0.0; d * d];
    for (k, &i) in order.iter().enumerate() {
        for r in 0..d {
            vectors[k * d + r] = v[r * d + i];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Ascending eigenvalues.
pub fn eig_sym(m: &SymMatrix) -> Result<Vec<f64>> {
    Ok(eigen_sym(m)?.values)
}

pub fn min_eigenvalue(m: &SymMatrix) -> Result<f64> {
    Ok(eig_sym(m)?[0])
}

/// Position of a symmetric matrix relative to the PSD cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsdStatus {
    PositiveDefinite,
    PositiveSemidefiniteBoundary,
    NotPsd,
}

impl PsdStatus {
    pub fn is_psd(self) -> bool {
        self != PsdStatus::NotPsd
    }
}

pub fn psd_status_of_min(min_eig: f64, tol: f64) -> PsdStatus {
    if min_eig > tol {
        PsdStatus::PositiveDefinite
    } else if min_eig.abs() <= tol {
        PsdStatus::PositiveSemidefiniteBoundary
    } else {
        PsdStatus::NotPsd
    }
}

pub fn psd_status(m: &SymMatrix, tol: f64) -> Result<PsdStatus> {
    if tol < 0.0 {
        return Err(Error::InvalidInput("tolerance must be non-negative".into()));
    }
    Ok(psd_status_of_min(min_eigenvalue(m)?, tol))
}

/// Dense square d×d real matrix with column-major storage.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearMap {
    dim: usize,
    data: Vec<f64>,
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).collect::<Vec<_>>()))
            .finish()
    }
}

impl LinearMap {
    pub fn zeros(dim: usize) -> Self {
        LinearMap { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidInput("matrix is not square".into()));
            }
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    /// Builds from column vectors (e.g. lattice generators).
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let dim = cols.len();
        check_dim(dim)?;
        let mut m = Self::zeros(dim);
        for (j, col) in cols.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::InvalidInput("matrix is not square".into()));
            }
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn from_column_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::InvalidInput("wrong number of matrix entries".into()));
        }
        Ok(LinearMap { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_column_major(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.dim + i]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[j * self.dim + i] = x;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data[j * self.dim..(j + 1) * self.dim].to_vec()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &LinearMap) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, (0..d).map(|k| self.get(i, k) * other.get(k, j)).sum());
            }
        }
        out
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    /// Λ·γ for an integer vector γ.
    pub fn apply_int(&self, g: &[i64]) -> Vec<f64> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j) * g[j] as f64).sum()).collect()
    }

    pub fn add(&self, other: &LinearMap) -> Self {
        LinearMap { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        LinearMap { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_column_slice(self.dim, self.dim, &self.data)
    }

    pub fn determinant(&self) -> f64 {
        self.to_nalgebra().determinant()
    }

    pub fn inverse(&self) -> Option<Self> {
        let inv = self.to_nalgebra().try_inverse()?;
        Some(LinearMap { dim: self.dim, data: inv.as_slice().to_vec() })
    }

    /// Gram matrix MᵀM.
    pub fn gram(&self) -> SymMatrix {
        let d = self.dim;
        let mut g = SymMatrix::zeros(d);
        for i in 0..d {
            for j in i..d {
                g.set(i, j, (0..d).map(|k| self.get(k, i) * self.get(k, j)).sum());
            }
        }
        g
    }

    /// Symmetric part Aᵀ·B + Bᵀ·A.
    pub fn symmetrized_product(a: &LinearMap, b: &LinearMap) -> SymMatrix {
        let d = a.dim;
        let mut g = SymMatrix::zeros(d);
        for i in 0..d {
            for j in i..d {
                let s: f64 = (0..d).map(|k| a.get(k, i) * b.get(k, j) + b.get(k, i) * a.get(k, j)).sum();
                g.set(i, j, s);
            }
        }
        g
    }

    pub fn rotation_2d(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        LinearMap { dim: 2, data: vec![c, s, -s, c] }
    }
}

/// Largest singular value.
pub fn operator_norm(t: &LinearMap) -> f64 {
    let values = eig_sym(&t.gram()).expect("finite linear map");
    values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// ‖T‖ ≤ 1 + tol.
pub fn is_contraction(t: &LinearMap, tol: f64) -> bool {
    operator_norm(t) <= 1.0 + tol
}

/// The unique PSD square root.
pub fn psd_sqrt(m: &SymMatrix) -> Result<SymMatrix> {
    let eig = eigen_sym(m)?;
    let scale = eig.values.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    if psd_status_of_min(eig.values[0], DEFAULT_TOL * scale) == PsdStatus::NotPsd {
        return Err(Error::DomainError(format!(
            "square root of a matrix with eigenvalue {:e}",
            eig.values[0]
        )));
    }
    let roots: Vec<f64> = eig.values.iter().map(|x| x.max(0.0).sqrt()).collect();
    Ok(SymMatrix::from_spectrum(m.dim, &roots, &eig.vectors))
}

/// Causal character of a 2×2 symmetric matrix under the quadratic form
/// det(A) = a₁₁a₂₂ − a₁₂², which has signature (2,1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinkowskiClass {
    FutureTimelike,
    PastTimelike,
    Lightlike,
    Spacelike,
    Zero,
}

const MINKOWSKI_TOL: f64 = 1e-12;

pub fn minkowski_classify(m: &SymMatrix) -> Result<MinkowskiClass> {
    if m.dim() != 2 {
        return Err(Error::DimensionError { expected: 2, got: m.dim() });
    }
    let norm = m.frobenius_norm();
    if norm <= MINKOWSKI_TOL {
        return Ok(MinkowskiClass::Zero);
    }
    let (a11, a12, a22) = (m.get(0, 0), m.get(0, 1), m.get(1, 1));
    let det = a11 * a22 - a12 * a12;
    Ok(if det.abs() <= MINKOWSKI_TOL * norm * norm {
        MinkowskiClass::Lightlike
    } else if det < 0.0 {
        MinkowskiClass::Spacelike
    } else if a11 > 0.0 {
        MinkowskiClass::FutureTimelike
    } else {
        MinkowskiClass::PastTimelike
    })
}
