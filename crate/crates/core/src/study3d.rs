//! Closed-form analysis of the four-parameter pyramid framework: its quartic
//! deformation hypersurface in Gram coordinates, the nodes of the auxetic
//! spectrahedron and the rays of the expansive cone.
//!
//! Points are written a = (a11, a22, a33, a13, a23) with a12 = 0.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::symcone::{min_eigenvalue, SymMatrix};

/// Default squared length of the fifth bar.
pub const DEFAULT_R2: f64 = 9.0 / 5.0;
/// Newton tolerance for projection onto the hypersurface.
pub const SURFACE_NEWTON_TOL: f64 = 1e-12;

/// The initial configuration a(0).
pub const A0: [f64; 5] = [1.6, 1.6, 1.6, 0.8, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyPoint {
    pub a: [f64; 5],
    pub r2: f64,
}

impl StudyPoint {
    pub fn new(a: [f64; 5], r2: f64) -> Self {
        StudyPoint { a, r2 }
    }

    pub fn initial() -> Self {
        StudyPoint { a: A0, r2: DEFAULT_R2 }
    }

    /// Reads the coordinates off a 3 × 3 Gram matrix; a12 must vanish.
    pub fn from_gram(g: &SymMatrix, r2: f64) -> Result<Self> {
        if g.dim() != 3 {
            return Err(Error::DimensionError { expected: 3, got: g.dim() });
        }
        let scale = g.frobenius_norm().max(1.0);
        if g.get(0, 1).abs() > 1e-9 * scale {
            return Err(invalid(format!("Gram entry a12 = {} is not zero", g.get(0, 1))));
        }
        Ok(StudyPoint { a: [g.get(0, 0), g.get(1, 1), g.get(2, 2), g.get(0, 2), g.get(1, 2)], r2 })
    }

    fn x(&self) -> f64 {
        let [_, _, a33, a13, a23] = self.a;
        a33 - a13 - a23 + 1.0 - self.r2
    }

    /// det ω with a12 = 0.
    pub fn gram_det(&self) -> f64 {
        let [a11, a22, a33, a13, a23] = self.a;
        a11 * a22 * a33 - a22 * a13 * a13 - a11 * a23 * a23
    }
}

/// Symmetric matrix of a 5-vector in the a12 = 0 slice.
pub fn slice_matrix(v: &[f64; 5]) -> SymMatrix {
    SymMatrix::from_rows(&[vec![v[0], 0.0, v[3]], vec![0.0, v[1], v[4]], vec![v[3], v[4], v[2]]])
        .expect("3 × 3 symmetric")
}

/// a11·a22·X² − Δ·(4 − a11 − a22), where X = a33 − a13 − a23 + 1 − r².
pub fn quartic_f(p: &StudyPoint) -> f64 {
    let [a11, a22, ..] = p.a;
    let x = p.x();
    a11 * a22 * x * x - p.gram_det() * (4.0 - a11 - a22)
}

/// (f11, f22, f33, f13, f23).
pub fn quartic_gradient(p: &StudyPoint) -> [f64; 5] {
    let [a11, a22, a33, a13, a23] = p.a;
    let x = p.x();
    let w = 4.0 - a11 - a22;
    let det = p.gram_det();
    [
        a22 * x * x - (a22 * a33 - a23 * a23) * w + det,
        a11 * x * x - (a11 * a33 - a13 * a13) * w + det,
        2.0 * a11 * a22 * x - a11 * a22 * w,
        -2.0 * a11 * a22 * x + 2.0 * a22 * a13 * w,
        -2.0 * a11 * a22 * x + 2.0 * a11 * a23 * w,
    ]
}

/// A nonzero 5-vector up to positive scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint5 {
    pub v: [f64; 5],
}

impl ProjectivePoint5 {
    pub fn new(v: [f64; 5]) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) || v.iter().all(|&x| x == 0.0) {
            return Err(invalid("projective point needs a finite nonzero vector"));
        }
        Ok(ProjectivePoint5 { v })
    }

    /// Largest-magnitude entry scaled to 1 and first nonzero entry positive.
    pub fn canonical(&self) -> ProjectivePoint5 {
        let big = self.v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let eps = 1e-12 * big;
        let first = self.v.iter().find(|x| x.abs() > eps).copied().unwrap_or(1.0);
        let s = first.signum() / big;
        ProjectivePoint5 { v: self.v.map(|x| if x.abs() > eps { x * s } else { 0.0 }) }
    }

    /// Equality of canonical forms within `tol` per entry.
    pub fn approx_eq(&self, other: &ProjectivePoint5, tol: f64) -> bool {
        let a = self.canonical();
        let b = other.canonical();
        a.v.iter().zip(&b.v).all(|(x, y)| (x - y).abs() <= tol)
    }

    pub fn matrix(&self) -> SymMatrix {
        slice_matrix(&self.v)
    }
}

fn dot5(a: &[f64; 5], b: &[f64; 5]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn radicands(g: &[f64; 5]) -> (f64, f64) {
    let [f11, f22, f33, f13, f23] = *g;
    (f13 * f13 - 4.0 * f11 * f33, f23 * f23 - 4.0 * f22 * f33)
}

fn check_radicands(g: &[f64; 5]) -> Result<(f64, f64)> {
    let (r13, r23) = radicands(g);
    for r in [r13, r23] {
        if r < 0.0 {
            return Err(Error::ComplexNodes { radicand: r });
        }
    }
    Ok((r13.sqrt(), r23.sqrt()))
}

/// Rank-one points of the slice that lie in the tangent hyperplane: the
/// nodes of the Cayley cubic bounding the auxetic spectrahedron.
pub fn cayley_nodes(p: &StudyPoint) -> Result<[ProjectivePoint5; 4]> {
    let g = quartic_gradient(p);
    let [f11, f22, f33, f13, f23] = g;
    let (d13, d23) = check_radicands(&g)?;
    let raw = [
        [-f33 * (d13 - f13), 0.0, f11 * (d13 + f13), -2.0 * f11 * f33, 0.0],
        [-f33 * (d13 + f13), 0.0, f11 * (d13 - f13), 2.0 * f11 * f33, 0.0],
        [0.0, -f33 * (d23 - f23), f22 * (d23 + f23), 0.0, -2.0 * f22 * f33],
        [0.0, -f33 * (d23 + f23), f22 * (d23 - f23), 0.0, 2.0 * f22 * f33],
    ];
    let mut out = [ProjectivePoint5 { v: [0.0; 5] }; 4];
    for (o, r) in out.iter_mut().zip(raw) {
        *o = ProjectivePoint5::new(r)?.canonical();
    }
    Ok(out)
}

/// Gram velocities of the four one-degree-of-freedom mechanisms, in the
/// order free bar to S−1, S+1, S−2, S+2.
pub fn expansive_rays(p: &StudyPoint) -> Result<[ProjectivePoint5; 4]> {
    let g = quartic_gradient(p);
    let [f11, f22, f33, f13, f23] = g;
    check_radicands(&g)?;
    let raw = [
        [-f33, 0.0, f11, 0.0, 0.0],
        [-f33, 0.0, f11 + f13, -f33, 0.0],
        [0.0, -f33, f22, 0.0, 0.0],
        [0.0, -f33, f22 + f23, 0.0, -f33],
    ];
    let mut out = [ProjectivePoint5 { v: [0.0; 5] }; 4];
    for (o, r) in out.iter_mut().zip(raw) {
        // Rays keep their orientation; only the scale is normalized.
        let big = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        *o = ProjectivePoint5::new(r.map(|x| x / big))?;
    }
    Ok(out)
}

/// Newton iteration along the gradient onto f = 0.
pub fn project_to_surface(a: [f64; 5], r2: f64) -> Result<StudyPoint> {
    let mut p = StudyPoint::new(a, r2);
    for _ in 0..60 {
        let f = quartic_f(&p);
        if f.abs() <= SURFACE_NEWTON_TOL {
            return Ok(p);
        }
        let g = quartic_gradient(&p);
        let gg = dot5(&g, &g);
        if !(gg > 0.0) {
            break;
        }
        for (x, gi) in p.a.iter_mut().zip(g) {
            *x -= f / gg * gi;
        }
    }
    Err(invalid("Newton projection onto the quartic did not converge"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub grid_points: usize,
    pub min_grid_eigenvalue: f64,
    pub node_min_eigenvalues: [f64; 4],
    pub random_directions: usize,
    pub outside_spectrahedron: usize,
    /// Sampled directions inside the spectrahedron but outside the tetrahedron.
    pub strict_gap: usize,
}

fn barycentric_grid(density: usize) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for i in 0..=density {
        for j in 0..=density - i {
            for k in 0..=density - i - j {
                let l = density - i - j - k;
                let s = density as f64;
                out.push([i as f64 / s, j as f64 / s, k as f64 / s, l as f64 / s]);
            }
        }
    }
    out
}

/// Compares the expansive tetrahedron with the auxetic spectrahedron in the
/// tangent hyperplane: sampled convex combinations of the rays are positive
/// semidefinite, nodes are rank-one boundary points, and random tangent
/// directions that fail to be positive semidefinite lie outside the
/// tetrahedron.
pub fn cone_inclusion_check(p: &StudyPoint, samples: usize) -> Result<InclusionReport> {
    if samples == 0 {
        return Err(invalid("sample density must be positive"));
    }
    let g = quartic_gradient(p);
    let gnorm = dot5(&g, &g).sqrt();
    let rays = expansive_rays(p)?;
    let nodes = cayley_nodes(p)?;
    for (what, pts) in [("ray", &rays), ("node", &nodes)] {
        for (i, r) in pts.iter().enumerate() {
            let c = dot5(&g, &r.v) / gnorm;
            if c.abs() > 1e-9 {
                return Err(Error::InclusionViolation(format!("{what} {i} leaves the tangent hyperplane by {c:e}")));
            }
        }
    }

    let tol = 1e-9;
    let grid = barycentric_grid(samples);
    let mut min_grid = f64::INFINITY;
    for w in &grid {
        let mut v = [0.0; 5];
        for (wi, r) in w.iter().zip(&rays) {
            for k in 0..5 {
                v[k] += wi * r.v[k];
            }
        }
        let lam = min_eigenvalue(&slice_matrix(&v))?;
        min_grid = min_grid.min(lam);
        if lam < -tol {
            return Err(Error::InclusionViolation(format!("combination {w:?} has eigenvalue {lam:e}")));
        }
    }

    let mut node_eigs = [0.0; 4];
    for (i, n) in nodes.iter().enumerate() {
        let m = n.matrix();
        let lam = crate::symcone::eig_sym(&m)?;
        if lam[0].abs() > tol || lam[1].abs() > tol {
            return Err(Error::InclusionViolation(format!("node {i} is not a rank-one boundary point: {lam:?}")));
        }
        node_eigs[i] = lam[0];
    }

    // Coordinates of tangent directions in the ray basis.
    let basis = DMatrix::from_fn(5, 4, |k, j| rays[j].v[k]);
    let svd = basis.clone().svd(true, true);
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed3d);
    let random_directions = 200 * samples.min(10);
    let mut outside = 0;
    let mut gap = 0;
    for _ in 0..random_directions {
        let mut v: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let c = dot5(&g, &v) / (gnorm * gnorm);
        for k in 0..5 {
            v[k] -= c * g[k];
        }
        let coords = svd
            .solve(&DVector::from_column_slice(&v), 1e-12)
            .map_err(|e| Error::InclusionViolation(format!("ray basis is degenerate: {e}")))?;
        let in_tetra = coords.iter().all(|&x| x >= -1e-12);
        let lam = min_eigenvalue(&slice_matrix(&v))?;
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if lam < -tol * scale {
            outside += 1;
            if in_tetra {
                return Err(Error::InclusionViolation(format!(
                    "direction {v:?} is in the expansive cone but has eigenvalue {lam:e}"
                )));
            }
        } else if !in_tetra {
            gap += 1;
        }
    }

    Ok(InclusionReport {
        grid_points: grid.len(),
        min_grid_eigenvalue: min_grid,
        node_min_eigenvalues: node_eigs,
        random_directions,
        outside_spectrahedron: outside,
        strict_gap: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{catalog, CatalogId, CatalogKind};

    fn pp(v: [f64; 5]) -> ProjectivePoint5 {
        ProjectivePoint5::new(v).unwrap()
    }

    #[test]
    fn initial_point_is_on_the_surface() {
        assert!(quartic_f(&StudyPoint::initial()).abs() < 1e-14);
        let f = catalog(&CatalogId::new(CatalogKind::Pyramid3D)).unwrap();
        let p = StudyPoint::from_gram(&f.gram(), DEFAULT_R2).unwrap();
        assert!(quartic_f(&p).abs() < 1e-12);
    }

    #[test]
    fn off_surface_family_is_positive() {
        for t in [0.1, 0.8, 2.0, 7.5] {
            let f = quartic_f(&StudyPoint::new([4.0, 4.0, t, 0.0, 0.0], DEFAULT_R2));
            let expected = 16.0 * (t - 0.8f64).powi(2) + 64.0 * t;
            assert!((f - expected).abs() < 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn gradient_at_initial_point() {
        let g = quartic_gradient(&StudyPoint::initial());
        let expected = [192.0, 192.0, -768.0, 768.0, 768.0].map(|x| x / 125.0);
        for (a, b) in g.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(pp(g).approx_eq(&pp([1.0, 1.0, -4.0, 4.0, 4.0]), 1e-12));
    }

    #[test]
    fn gradient_matches_differences() {
        let p = StudyPoint::new([1.5, 1.7, 1.62, 0.77, 0.83], 1.8);
        let g = quartic_gradient(&p);
        let h = 1e-6;
        for k in 0..5 {
            let mut plus = p;
            let mut minus = p;
            plus.a[k] += h;
            minus.a[k] -= h;
            let fd = (quartic_f(&plus) - quartic_f(&minus)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-6, "component {k}");
        }
    }

    #[test]
    fn nodes_at_initial_point() {
        let s = 2f64.sqrt();
        let expected = [
            [0.0, 2.0 * (s - 1.0), (s + 1.0) / 2.0, 0.0, 1.0],
            [0.0, 2.0 * (s + 1.0), (s - 1.0) / 2.0, 0.0, -1.0],
            [2.0 * (s - 1.0), 0.0, (s + 1.0) / 2.0, 1.0, 0.0],
            [2.0 * (s + 1.0), 0.0, (s - 1.0) / 2.0, -1.0, 0.0],
        ];
        let nodes = cayley_nodes(&StudyPoint::initial()).unwrap();
        for e in expected {
            assert!(nodes.iter().any(|n| n.approx_eq(&pp(e), 1e-12)), "{e:?}");
        }
        for n in &nodes {
            let lam = crate::symcone::eig_sym(&n.matrix()).unwrap();
            assert!(lam[0].abs() < 1e-12 && lam[1].abs() < 1e-12 && lam[2] > 0.0);
            assert!(dot5(&n.v, &[1.0, 1.0, -4.0, 4.0, 4.0]).abs() < 1e-12);
        }
    }

    #[test]
    fn rays_at_initial_point() {
        let rays = expansive_rays(&StudyPoint::initial()).unwrap();
        let expected = [[4.0, 0.0, 1.0, 0.0, 0.0], [4.0, 0.0, 5.0, 4.0, 0.0], [0.0, 4.0, 1.0, 0.0, 0.0], [0.0, 4.0, 5.0, 0.0, 4.0]];
        for (r, e) in rays.iter().zip(expected) {
            assert!(r.approx_eq(&pp(e), 1e-12));
            assert!(min_eigenvalue(&r.matrix()).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn inclusion_at_initial_point() {
        let rep = cone_inclusion_check(&StudyPoint::initial(), 10).unwrap();
        assert_eq!(rep.grid_points, 286);
        assert!(rep.min_grid_eigenvalue >= -1e-9);
        assert!(rep.outside_spectrahedron > 0);
        assert!(rep.strict_gap > 0);
        let mid = slice_matrix(&[2.0, 2.0, 1.0, 0.0, 0.0]);
        assert!(min_eigenvalue(&mid).unwrap() >= 0.0);
        assert!(min_eigenvalue(&slice_matrix(&[1.0, 1.0, -4.0, 4.0, 4.0])).unwrap() < 0.0);
    }

    #[test]
    fn complex_nodes_reported() {
        // f33 > 0 with f11 large makes the radicand negative.
        let p = StudyPoint::new([1.0, 1.0, 5.0, 0.0, 0.0], DEFAULT_R2);
        let g = quartic_gradient(&p);
        let (r13, _) = radicands(&g);
        assert!(r13 < 0.0);
        assert!(matches!(cayley_nodes(&p), Err(Error::ComplexNodes { .. })));
    }

    #[test]
    fn projection_reaches_surface() {
        let p = project_to_surface([1.62, 1.58, 1.61, 0.81, 0.79], DEFAULT_R2).unwrap();
        assert!(quartic_f(&p).abs() <= SURFACE_NEWTON_TOL);
        assert!(cone_inclusion_check(&p, 6).is_ok());
    }
}
