//! Feasibility of the infinitesimal auxetic cone.
//!
//! The Gram differential maps the tangent space onto a subspace V of
//! symmetric matrices. A tangent is infinitesimally auxetic when its image is
//! PSD, so the question is how V meets the PSD cone. We maximize the smallest
//! eigenvalue over unit-norm elements of V; when that maximum is not clearly
//! positive, a positive definite element of the orthogonal complement
//! certifies that V meets the cone only at zero.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{gram_differential, gram_image_matrix, tangent_space, TangentSpace, TangentVector, RANK_TOL};
use crate::error::{Error, Result};
use crate::framework::PeriodicFramework;
use crate::symcone::{eigen_sym, psd_status, PsdStatus, SymMatrix};

/// Default iteration budget shared by all starts of the eigenvalue search.
pub const DEFAULT_CONE_BUDGET: usize = 20_000;

const DEFAULT_SEED: u64 = 0x00c0_ffee;
const CIRCLE_SAMPLES: usize = 720;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeVerdict {
    TrivialOnly,
    NontrivialBoundary,
    StrictInterior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub verdict: ConeVerdict,
    pub witness: Option<TangentVector>,
    pub witness_gram_velocity: Option<SymMatrix>,
    pub extremal_rays: Option<Vec<TangentVector>>,
    /// Dimension of the non-trivial tangent space.
    pub tangent_dim: usize,
    /// Dimension of its image under the Gram differential.
    pub image_dim: usize,
    /// Best smallest eigenvalue found over unit-norm elements of the image.
    pub best_value: f64,
    pub near_singular: bool,
}

impl ConeReport {
    pub fn with_rays(mut self, rays: Vec<TangentVector>) -> Self {
        self.extremal_rays = Some(rays);
        self
    }
}

fn combine(basis: &[SymMatrix], x: &[f64]) -> SymMatrix {
    let mut acc = SymMatrix::zeros(basis[0].dim());
    for (b, c) in basis.iter().zip(x) {
        acc = acc.add(&b.scale(*c));
    }
    acc
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|a| *a /= n);
    }
}

/// Smallest eigenvalue of Σ xᵢBᵢ and a supergradient (vᵀBᵢv)ᵢ.
fn min_eig_and_grad(basis: &[SymMatrix], x: &[f64]) -> (f64, Vec<f64>) {
    let e = eigen_sym(&combine(basis, x)).expect("finite combination");
    let v = e.vector(0);
    let d = v.len();
    let grad = basis
        .iter()
        .map(|b| (0..d).map(|i| (0..d).map(|j| v[i] * b.get(i, j) * v[j]).sum::<f64>()).sum())
        .collect();
    (e.values[0], grad)
}

fn min_eig(basis: &[SymMatrix], x: &[f64]) -> f64 {
    eigen_sym(&combine(basis, x)).expect("finite combination").values[0]
}

/// Outcome of maximizing λ_min over the unit sphere of span(basis).
struct Best {
    value: f64,
    coeffs: Vec<f64>,
}

/// Exact treatment of a plane of 2×2 matrices through the binary quadratic
/// form q(x, y) = det(xB₁ + yB₂) = ax² + bxy + cy²: the plane holds a
/// definite matrix iff q is positive somewhere, and that is decided by the
/// discriminant b² − 4ac together with the signs of a and c.
fn plane_of_2x2(basis: &[SymMatrix], tol: f64) -> Best {
    let q = |x: f64, y: f64| combine(basis, &[x, y]).determinant();
    let a = q(1.0, 0.0);
    let c = q(0.0, 1.0);
    let b = q(1.0, 1.0) - a - c;
    let disc = b * b - 4.0 * a * c;
    let scale = (a.abs() + b.abs() + c.abs()).powi(2).max(f64::MIN_POSITIVE);
    // Direction maximizing q on the circle: top eigenvector of [[a, b/2], [b/2, c]].
    let form = SymMatrix::from_upper(2, vec![a, b / 2.0, c]).expect("2x2");
    let e = eigen_sym(&form).expect("finite form");
    let mut coeffs = e.vector(1).to_vec();
    if combine(basis, &coeffs).trace() < 0.0 {
        coeffs.iter_mut().for_each(|x| *x = -*x);
    }
    let positive_somewhere = disc > tol * scale || a > tol * scale.sqrt() || c > tol * scale.sqrt();
    let value = if positive_somewhere {
        min_eig(basis, &coeffs).max(f64::MIN_POSITIVE)
    } else if disc < -tol * scale {
        min_eig(basis, &coeffs).min(-f64::MIN_POSITIVE)
    } else {
        0.0
    };
    Best { value, coeffs }
}

/// Dense scan of the unit circle, refined by golden-section search.
fn circle_scan(basis: &[SymMatrix]) -> Best {
    let at = |t: f64| min_eig(basis, &[t.cos(), t.sin()]);
    let step = std::f64::consts::TAU / CIRCLE_SAMPLES as f64;
    let (mut best_t, mut best_v) = (0.0, f64::NEG_INFINITY);
    for k in 0..CIRCLE_SAMPLES {
        let t = k as f64 * step;
        let v = at(t);
        if v > best_v {
            best_t = t;
            best_v = v;
        }
    }
    let (mut lo, mut hi) = (best_t - step, best_t + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if at(m1) < at(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let t = 0.5 * (lo + hi);
    let v = at(t);
    if v >= best_v {
        Best { value: v, coeffs: vec![t.cos(), t.sin()] }
    } else {
        Best { value: best_v, coeffs: vec![best_t.cos(), best_t.sin()] }
    }
}

/// Projected supergradient ascent on the sphere from several random starts.
fn multistart(basis: &[SymMatrix], starts: usize, budget: usize, rng: &mut ChaCha8Rng) -> Best {
    let k = basis.len();
    let iters = (budget / starts.max(1)).max(100);
    let mut best = Best { value: f64::NEG_INFINITY, coeffs: vec![0.0; k] };
    for _ in 0..starts {
        let mut x: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        normalize(&mut x);
        let mut local_best = (f64::NEG_INFINITY, x.clone());
        for it in 0..iters {
            let (val, g) = min_eig_and_grad(basis, &x);
            if val > local_best.0 {
                local_best = (val, x.clone());
            }
            let radial: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
            let eta = 0.5 / ((it + 1) as f64).sqrt();
            for i in 0..k {
                x[i] += eta * (g[i] - radial * x[i]);
            }
            normalize(&mut x);
        }
        // Strictly greater keeps the earliest start on ties.
        if local_best.0 > best.value {
            best = Best { value: local_best.0, coeffs: local_best.1 };
        }
    }
    best
}

fn search(basis: &[SymMatrix], tol: f64, budget: usize, rng: &mut ChaCha8Rng) -> Best {
    match basis.len() {
        0 => Best { value: f64::NEG_INFINITY, coeffs: vec![] },
        1 => {
            let e = eigen_sym(&basis[0]).expect("finite basis");
            let (lo, hi) = (e.values[0], *e.values.last().unwrap());
            if lo >= -hi {
                Best { value: lo, coeffs: vec![1.0] }
            } else {
                Best { value: -hi, coeffs: vec![-1.0] }
            }
        }
        2 if basis[0].dim() == 2 => plane_of_2x2(basis, tol),
        2 => circle_scan(basis),
        k => multistart(basis, 8 * k, budget, rng),
    }
}

/// Orthonormal splitting of svec space into the image of the Gram
/// differential and its complement, plus the kernel of the map.
struct ImageSplit {
    image: Vec<SymMatrix>,
    complement: Vec<SymMatrix>,
    /// Kernel directions in tangent-basis coordinates.
    kernel: Vec<Vec<f64>>,
    /// Pseudo-inverse, svec → tangent coordinates.
    pinv: DMatrix<f64>,
}

fn split_image(m: &DMatrix<f64>, d: usize) -> ImageSplit {
    let s = m.nrows();
    let k = m.ncols();
    // Padding with zero rows keeps V complete when k > s.
    let mut padded = DMatrix::zeros(s.max(k), k);
    padded.view_mut((0, 0), (s, k)).copy_from(m);
    let svd = padded.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let top = svd.singular_values[order[0]];
    let rank = if top <= 1e-12 {
        0
    } else {
        order.iter().filter(|&&i| svd.singular_values[i] > RANK_TOL * top).count()
    };
    let image_svecs: Vec<Vec<f64>> = order[..rank].iter().map(|&i| u.column(i).as_slice()[..s].to_vec()).collect();
    let image = image_svecs.iter().map(|v| SymMatrix::from_svec(d, v)).collect();
    let kernel = order[rank..].iter().map(|&i| v_t.row(i).iter().copied().collect()).collect();

    // The complement comes from a full SVD of the s×s matrix [image | 0].
    let mut frame = DMatrix::zeros(s, s);
    for (c, v) in image_svecs.iter().enumerate() {
        frame.column_mut(c).copy_from_slice(v);
    }
    let fsvd = frame.svd(true, false);
    let fu = fsvd.u.expect("requested U");
    let complement = (0..s)
        .filter(|&i| fsvd.singular_values[i] < 0.5)
        .map(|i| SymMatrix::from_svec(d, fu.column(i).as_slice()))
        .collect();

    let mut pinv = DMatrix::zeros(k, s);
    for &i in &order[..rank] {
        let sigma = svd.singular_values[i];
        for r in 0..k {
            for c in 0..s {
                pinv[(r, c)] += v_t[(i, r)] * u[(c, i)] / sigma;
            }
        }
    }
    ImageSplit { image, complement, kernel, pinv }
}

fn tangent_from_image(space: &TangentSpace, split: &ImageSplit, target: &SymMatrix) -> TangentVector {
    let y = &split.pinv * nalgebra::DVector::from_vec(target.svec());
    let t = space.combine(y.as_slice());
    let n = t.norm();
    t.scale(1.0 / n)
}

/// [`auxetic_cone_seeded`] with the default seed.
pub fn auxetic_cone(f: &PeriodicFramework, tol: f64, budget: usize) -> Result<ConeReport> {
    auxetic_cone_seeded(f, tol, budget, DEFAULT_SEED)
}

/// Decides whether some non-trivial infinitesimal motion has a PSD (or
/// positive definite) Gram velocity.
///
/// `tol` is relative to the Frobenius norm of the Gram velocity. A witness
/// is re-checked with [`psd_status`] before it is reported; if the search
/// cannot certify any verdict within `budget` iterations the result is
/// [`Error::Undecided`].
pub fn auxetic_cone_seeded(f: &PeriodicFramework, tol: f64, budget: usize, seed: u64) -> Result<ConeReport> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput("tolerance must be non-negative".into()));
    }
    let space = tangent_space(f)?;
    let d = f.dim();
    let mut report = ConeReport {
        verdict: ConeVerdict::TrivialOnly,
        witness: None,
        witness_gram_velocity: None,
        extremal_rays: None,
        tangent_dim: space.dim(),
        image_dim: 0,
        best_value: f64::NEG_INFINITY,
        near_singular: space.near_singular,
    };
    if space.dim() == 0 {
        return Ok(report);
    }
    let m = gram_image_matrix(f, &space);
    let split = split_image(&m, d);
    report.image_dim = split.image.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let finish = |mut report: ConeReport, verdict: ConeVerdict, witness: TangentVector| -> Result<ConeReport> {
        let g = gram_differential(f, &witness);
        // ġ = Λ̇ᵀΛ + ΛᵀΛ̇ can cancel to rounding noise (motions with zero Gram
        // velocity), so the tolerance scales with the size of its terms.
        let frob = |m: &[f64]| m.iter().map(|x| x * x).sum::<f64>().sqrt();
        let terms = 2.0 * frob(f.lattice.as_column_major()) * frob(witness.lattice_vel.as_column_major());
        let status = psd_status(&g, tol * g.frobenius_norm().max(terms).max(f64::MIN_POSITIVE))?;
        let ok = match verdict {
            ConeVerdict::StrictInterior => status == PsdStatus::PositiveDefinite,
            _ => status.is_psd(),
        };
        if !ok {
            return Err(Error::Undecided { best_value: report.best_value });
        }
        report.verdict = verdict;
        report.witness = Some(witness);
        report.witness_gram_velocity = Some(g);
        Ok(report)
    };

    if split.complement.is_empty() && !split.image.is_empty() {
        report.best_value = 1.0 / (d as f64).sqrt();
        let w = tangent_from_image(&space, &split, &SymMatrix::identity(d));
        return finish(report, ConeVerdict::StrictInterior, w);
    }

    let inner = search(&split.image, tol, budget, &mut rng);
    report.best_value = inner.value.max(if split.kernel.is_empty() { f64::NEG_INFINITY } else { 0.0 });
    if inner.value > tol {
        let w = tangent_from_image(&space, &split, &combine(&split.image, &inner.coeffs));
        return finish(report, ConeVerdict::StrictInterior, w);
    }
    if let Some(kdir) = split.kernel.first() {
        let w = space.combine(kdir);
        let n = w.norm();
        return finish(report, ConeVerdict::NontrivialBoundary, w.scale(1.0 / n));
    }
    let outer = search(&split.complement, tol, budget, &mut rng);
    if outer.value > tol {
        return Ok(report);
    }
    if inner.value >= -tol {
        let w = tangent_from_image(&space, &split, &combine(&split.image, &inner.coeffs));
        return finish(report, ConeVerdict::NontrivialBoundary, w);
    }
    Err(Error::Undecided { best_value: inner.value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{catalog, honeycomb_equal_edge, CatalogId, CatalogKind};

    #[test]
    fn pyramid_is_strict_interior() {
        let f = catalog(&CatalogId::new(CatalogKind::Pyramid3D)).unwrap();
        let r = auxetic_cone(&f, 1e-9, DEFAULT_CONE_BUDGET).unwrap();
        assert_eq!(r.verdict, ConeVerdict::StrictInterior);
        assert_eq!((r.tangent_dim, r.image_dim), (4, 4));
        let g = r.witness_gram_velocity.unwrap();
        assert_eq!(psd_status(&g, 0.0).unwrap(), PsdStatus::PositiveDefinite);
    }

    #[test]
    fn honeycomb_acute_and_obtuse() {
        // Equilateral period triangle.
        let f = honeycomb_equal_edge(1.0, 0.5, 1.0).unwrap();
        let r = auxetic_cone(&f, 1e-9, DEFAULT_CONE_BUDGET).unwrap();
        assert_eq!(r.verdict, ConeVerdict::TrivialOnly);
        assert!(r.witness.is_none());
        // Period triangle with a 150° angle.
        let c = (150f64).to_radians().cos();
        let f = honeycomb_equal_edge(1.0, c, 1.0).unwrap();
        let r = auxetic_cone(&f, 1e-9, DEFAULT_CONE_BUDGET).unwrap();
        assert_ne!(r.verdict, ConeVerdict::TrivialOnly);
    }

    #[test]
    fn rigid_framework_is_trivial() {
        let f = PeriodicFramework::from_geometry(
            vec![vec![0.0, 0.0]],
            crate::symcone::LinearMap::identity(2),
            &[(0, 0, vec![1, 0]), (0, 0, vec![0, 1]), (0, 0, vec![1, 1])],
        )
        .unwrap();
        let r = auxetic_cone(&f, 1e-9, DEFAULT_CONE_BUDGET).unwrap();
        assert_eq!((r.verdict, r.tangent_dim), (ConeVerdict::TrivialOnly, 0));
    }

    #[test]
    fn bare_lattice_is_strict_interior() {
        let f = PeriodicFramework::from_geometry(vec![vec![0.0; 3]], crate::symcone::LinearMap::identity(3), &[])
            .unwrap();
        let r = auxetic_cone(&f, 1e-9, DEFAULT_CONE_BUDGET).unwrap();
        assert_eq!(r.verdict, ConeVerdict::StrictInterior);
    }

    #[test]
    fn seeded_search_is_deterministic() {
        let f = catalog(&CatalogId::new(CatalogKind::Cube3D)).unwrap();
        let a = auxetic_cone_seeded(&f, 1e-9, 4000, 7);
        let b = auxetic_cone_seeded(&f, 1e-9, 4000, 7);
        assert_eq!(a, b);
    }
}
