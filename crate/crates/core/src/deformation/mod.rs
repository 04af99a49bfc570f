//! Infinitesimal and finite deformations of periodic frameworks.
//!
//! Configuration space coordinates are laid out as the `n·d` vertex
//! coordinates (vertex-major) followed by the `d²` lattice entries in
//! column-major order, so Λ_kj sits at `n·d + j·d + k`.

mod cone;
mod integrate;
mod path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use cone::{auxetic_cone, auxetic_cone_seeded, ConeReport, ConeVerdict, DEFAULT_CONE_BUDGET};
pub use integrate::{integrate_trajectory, mechanism_rays, project_to_constraints, Selector};
pub use path::{
    check_expansive, check_path_contraction, check_path_psd, check_volume, ContractionVerdict, DeformationPath,
    ExpansiveVerdict, PsdVerdict, Sample, VolumeVerdict, DEFAULT_DENSITY, PATH_LENGTH_TOL,
};

use crate::framework::{PeriodicFramework, Point};
use crate::symcone::{LinearMap, SymMatrix};

/// Relative threshold on singular values below which a direction counts as
/// part of the kernel.
pub const RANK_TOL: f64 = 1e-9;

/// Singular values between this relative size and [`RANK_TOL`] mark a
/// configuration as numerically close to singular.
const NEAR_SINGULAR: f64 = 1e-6;

/// A velocity of the vertex representatives and of the lattice generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub vertex_vel: Vec<Point>,
    pub lattice_vel: LinearMap,
}

impl TangentVector {
    pub fn zeros(n: usize, d: usize) -> Self {
        TangentVector { vertex_vel: vec![vec![0.0; d]; n], lattice_vel: LinearMap::zeros(d) }
    }

    pub fn from_flat(n: usize, d: usize, x: &[f64]) -> Self {
        let vertex_vel = (0..n).map(|v| x[v * d..(v + 1) * d].to_vec()).collect();
        let lattice_vel = LinearMap::from_column_major(d, x[n * d..n * d + d * d].to_vec())
            .expect("flat tangent has d² lattice entries");
        TangentVector { vertex_vel, lattice_vel }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.vertex_vel.iter().flatten().copied().collect();
        out.extend_from_slice(self.lattice_vel.as_column_major());
        out
    }

    pub fn norm(&self) -> f64 {
        self.to_flat().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        let n = self.vertex_vel.len();
        let d = self.lattice_vel.dim();
        TangentVector::from_flat(n, d, &self.to_flat().iter().map(|x| x * s).collect::<Vec<_>>())
    }
}

fn n_coords(f: &PeriodicFramework) -> usize {
    let d = f.dim();
    d * f.n() + d * d
}

/// Linearized edge-length constraints: one row per edge orbit.
pub fn constraint_jacobian(f: &PeriodicFramework) -> DMatrix<f64> {
    let d = f.dim();
    let n = f.n();
    let mut j = DMatrix::zeros(f.m(), n_coords(f));
    for (row, e) in f.edges().iter().enumerate() {
        let vec = f.edge_vector(e);
        for k in 0..d {
            let w = 2.0 * vec[k];
            j[(row, e.v * d + k)] += w;
            j[(row, e.u * d + k)] -= w;
            for (col, &g) in e.gamma.iter().enumerate() {
                j[(row, n * d + col * d + k)] += w * g as f64;
            }
        }
    }
    j
}

/// Residuals |p(v) + Λγ − p(u)|² − L² for each edge orbit.
pub fn constraint_residuals(f: &PeriodicFramework) -> Vec<f64> {
    f.edges()
        .iter()
        .map(|e| {
            let v = f.edge_vector(e);
            v.iter().map(|x| x * x).sum::<f64>() - e.length * e.length
        })
        .collect()
}

/// Full SVD of a matrix padded with zero rows to at least square shape, so
/// that `V` spans the whole domain.
struct FullSvd {
    singular: Vec<f64>,
    v: DMatrix<f64>,
}

fn full_svd(a: &DMatrix<f64>) -> FullSvd {
    let cols = a.ncols();
    let rows = a.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let singular = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = DMatrix::from_fn(cols, cols, |r, c| v_t[(order[c], r)]);
    FullSvd { singular, v }
}

fn numeric_rank(singular: &[f64]) -> usize {
    let top = singular.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    singular.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Numerical rank of the constraint Jacobian.
pub fn jacobian_rank(f: &PeriodicFramework) -> usize {
    if f.m() == 0 {
        return 0;
    }
    numeric_rank(&full_svd(&constraint_jacobian(f)).singular)
}

/// Infinitesimal isometries: translations, and rotations acting on the
/// positions and the lattice together.
pub fn trivial_motions(f: &PeriodicFramework) -> Vec<TangentVector> {
    let d = f.dim();
    let n = f.n();
    let mut out = Vec::new();
    for k in 0..d {
        let mut t = TangentVector::zeros(n, d);
        for v in t.vertex_vel.iter_mut() {
            v[k] = 1.0;
        }
        out.push(t);
    }
    for a in 0..d {
        for b in a + 1..d {
            let mut rot = LinearMap::zeros(d);
            rot.set(a, b, -1.0);
            rot.set(b, a, 1.0);
            let vertex_vel = f.positions.iter().map(|p| rot.apply(p)).collect();
            out.push(TangentVector { vertex_vel, lattice_vel: rot.mul(&f.lattice) });
        }
    }
    out
}

/// Orthonormal basis of the non-trivial infinitesimal motions.
#[derive(Debug, Clone)]
pub struct TangentSpace {
    pub basis: Vec<TangentVector>,
    /// Set when some singular value of the Jacobian is small but above the
    /// rank threshold, so the kernel dimension is numerically fragile.
    pub near_singular: bool,
}

impl TangentSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Combination Σ cᵢ·basisᵢ.
    pub fn combine(&self, coeffs: &[f64]) -> TangentVector {
        let first = &self.basis[0];
        let n = first.vertex_vel.len();
        let d = first.lattice_vel.dim();
        let mut acc = vec![0.0; n * d + d * d];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            for (a, x) in acc.iter_mut().zip(b.to_flat()) {
                *a += c * x;
            }
        }
        TangentVector::from_flat(n, d, &acc)
    }
}

/// Kernel of the constraint Jacobian, with the infinitesimal isometries
/// projected out through their orthogonal complement.
pub fn tangent_space(f: &PeriodicFramework) -> crate::Result<TangentSpace> {
    f.ensure_valid()?;
    let d = f.dim();
    let n = f.n();
    let cols = n_coords(f);
    let (kernel, near_singular) = if f.m() == 0 {
        (DMatrix::identity(cols, cols), false)
    } else {
        let svd = full_svd(&constraint_jacobian(f));
        let r = numeric_rank(&svd.singular);
        let top = svd.singular[0];
        let fragile = svd.singular.iter().any(|&s| s > RANK_TOL * top && s < NEAR_SINGULAR * top);
        (svd.v.columns(r, cols - r).into_owned(), fragile)
    };

    // Orthonormalize the trivial motions, then remove them from the kernel.
    let trivial = trivial_motions(f);
    let t = DMatrix::from_fn(cols, trivial.len(), |r, c| trivial[c].to_flat()[r]);
    let q = t.clone().qr().q();
    let projected = &kernel - &q * (q.transpose() * &kernel);
    let svd = projected.svd(true, false);
    let u = svd.u.expect("requested U");
    let mut pairs: Vec<(f64, usize)> = svd.singular_values.iter().copied().enumerate().map(|(i, s)| (s, i)).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let expected = kernel.ncols().saturating_sub(trivial.len());
    let basis = pairs
        .iter()
        .take(expected)
        .filter(|(s, _)| *s > 1e-6)
        .map(|&(_, i)| TangentVector::from_flat(n, d, u.column(i).as_slice()))
        .collect();
    Ok(TangentSpace { basis, near_singular })
}

/// dω = Λ̇ᵀΛ + ΛᵀΛ̇.
pub fn gram_differential(f: &PeriodicFramework, t: &TangentVector) -> SymMatrix {
    LinearMap::symmetrized_product(&t.lattice_vel, &f.lattice)
}

/// Matrix whose column i is svec(dω(basisᵢ)).
pub(crate) fn gram_image_matrix(f: &PeriodicFramework, space: &TangentSpace) -> DMatrix<f64> {
    let d = f.dim();
    let s = d * (d + 1) / 2;
    let mut m = DMatrix::zeros(s, space.dim());
    for (c, t) in space.basis.iter().enumerate() {
        let col = gram_differential(f, t).svec();
        m.column_mut(c).copy_from(&DVector::from_vec(col));
    }
    m
}
