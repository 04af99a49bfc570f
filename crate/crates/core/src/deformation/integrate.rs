//! Integral curves of direction fields on the deformation space.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::cone::{auxetic_cone, ConeVerdict};
use super::path::{DeformationPath, Sample};
use super::{constraint_jacobian, constraint_residuals, gram_differential, tangent_space, TangentVector};
use crate::error::{invalid, Error, Result};
use crate::framework::{Bar, PairId, PeriodicFramework};
use crate::symcone::LinearMap;

const NEWTON_MAX_ITERS: usize = 25;
const NEWTON_TOL: f64 = 1e-10;
const CONE_TOL: f64 = 1e-9;
/// Eigenvalue-search budget per direction evaluation during integration.
const STEP_CONE_BUDGET: usize = 4_000;

/// How the direction of motion is chosen at each point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Selector {
    /// The witness of the auxetic-cone search (positive definite Gram velocity
    /// when one exists).
    AuxeticWitness,
    /// Weighted sum of one-degree-of-freedom mechanisms. Each mechanism is a
    /// set of extra bars whose insertion leaves a single motion, taken with
    /// non-negative Gram trace rate.
    ConvexCombination { weights: Vec<f64>, mechanisms: Vec<Vec<Bar>> },
    /// The unique motion of a one-degree-of-freedom framework, oriented so the
    /// marked pair moves apart (or, without a pair, so the cell volume grows).
    KernelOneDof { orient: Option<PairId> },
}

fn flat_state(f: &PeriodicFramework) -> Vec<f64> {
    let mut x: Vec<f64> = f.positions.iter().flatten().copied().collect();
    x.extend_from_slice(f.lattice.as_column_major());
    x
}

fn from_state(f: &PeriodicFramework, x: &[f64]) -> PeriodicFramework {
    let d = f.dim();
    let n = f.n();
    let positions = (0..n).map(|v| x[v * d..(v + 1) * d].to_vec()).collect();
    let lattice = LinearMap::from_column_major(d, x[n * d..].to_vec()).expect("flat state has d² lattice entries");
    f.with_geometry(positions, lattice)
}

fn relengthed(f: &PeriodicFramework) -> PeriodicFramework {
    let mut g = f.clone();
    for i in 0..g.m() {
        let len = crate::framework::norm(&g.edge_vector(&g.graph.edges[i]));
        g.graph.edges[i].length = len;
    }
    g
}

fn max_relative_residual(f: &PeriodicFramework) -> f64 {
    constraint_residuals(f)
        .iter()
        .zip(f.edges())
        .map(|(r, e)| r.abs() / (e.length * e.length))
        .fold(0.0, f64::max)
}

/// Damped Gauss-Newton projection back onto the bar-length constraints.
pub fn project_to_constraints(f: &PeriodicFramework) -> Option<PeriodicFramework> {
    let mut cur = f.clone();
    let mut err = max_relative_residual(&cur);
    for _ in 0..NEWTON_MAX_ITERS {
        if err <= NEWTON_TOL {
            return Some(cur);
        }
        let j = constraint_jacobian(&cur);
        let r = DVector::from_vec(constraint_residuals(&cur));
        let step = j.clone().pseudo_inverse(1e-12).ok()? * r;
        let x = flat_state(&cur);
        let mut damping = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - damping * s).collect();
            let next = from_state(&cur, &trial);
            let next_err = max_relative_residual(&next);
            if next_err < err {
                cur = next;
                err = next_err;
                break;
            }
            damping *= 0.5;
            if damping < 1e-4 {
                return None;
            }
        }
    }
    (err <= NEWTON_TOL).then_some(cur)
}

fn pair_rate(f: &PeriodicFramework, t: &TangentVector, pair: &PairId) -> f64 {
    let a = f.point(pair.u, &vec![0; f.dim()]);
    let b = f.point(pair.v, &pair.gamma);
    let va = &t.vertex_vel[pair.u];
    let shift = t.lattice_vel.apply_int(&pair.gamma);
    let vb: Vec<f64> = t.vertex_vel[pair.v].iter().zip(&shift).map(|(x, y)| x + y).collect();
    (0..f.dim()).map(|k| (b[k] - a[k]) * (vb[k] - va[k])).sum()
}

/// d/dτ log|det Λ| = tr(Λ⁻¹Λ̇).
fn volume_rate(f: &PeriodicFramework, t: &TangentVector) -> f64 {
    let inv = f.lattice.inverse().expect("valid lattice");
    let p = inv.mul(&t.lattice_vel);
    (0..f.dim()).map(|i| p.get(i, i)).sum()
}

fn one_dof_motion(f: &PeriodicFramework) -> Result<TangentVector> {
    let space = tangent_space(f)?;
    match space.dim() {
        0 => Err(Error::NoAuxeticDirection),
        1 => Ok(space.basis[0].clone()),
        k => Err(invalid(format!("expected one degree of freedom, found {k}"))),
    }
}

/// Unit tangents of the mechanisms obtained by inserting each set of extra
/// bars, oriented so that the trace of the Gram velocity is non-negative.
pub fn mechanism_rays(f: &PeriodicFramework, mechanisms: &[Vec<Bar>]) -> Result<Vec<TangentVector>> {
    mechanisms
        .iter()
        .map(|bars| {
            let braced = bars.iter().fold(f.clone(), |acc, (u, v, g)| acc.with_bar(*u, *v, g.clone()));
            let t = one_dof_motion(&braced)?;
            Ok(if gram_differential(f, &t).trace() < 0.0 { t.scale(-1.0) } else { t })
        })
        .collect()
}

fn direction(f: &PeriodicFramework, selector: &Selector, previous: Option<&[f64]>) -> Result<Vec<f64>> {
    let t = match selector {
        Selector::AuxeticWitness => {
            let report = auxetic_cone(f, CONE_TOL, STEP_CONE_BUDGET)?;
            match (report.verdict, report.witness, report.witness_gram_velocity) {
                (ConeVerdict::TrivialOnly, _, _) | (_, None, _) | (_, _, None) => {
                    return Err(Error::NoAuxeticDirection)
                }
                // Unit speed in Gram space: τ is arc length of the Gram curve.
                (_, Some(w), Some(g)) if g.frobenius_norm() > 0.0 => {
                    let s = w.scale(1.0 / g.frobenius_norm());
                    return Ok(s.to_flat());
                }
                (_, Some(w), Some(_)) => w,
            }
        }
        Selector::ConvexCombination { weights, mechanisms } => {
            if weights.len() != mechanisms.len() || weights.iter().any(|w| *w < 0.0) {
                return Err(invalid("convex combination needs one non-negative weight per mechanism"));
            }
            let rays = mechanism_rays(f, mechanisms)?;
            let n = f.n();
            let d = f.dim();
            let mut acc = vec![0.0; n * d + d * d];
            for (w, r) in weights.iter().zip(&rays) {
                for (a, x) in acc.iter_mut().zip(r.to_flat()) {
                    *a += w * x;
                }
            }
            TangentVector::from_flat(n, d, &acc)
        }
        Selector::KernelOneDof { orient } => {
            let t = one_dof_motion(f)?;
            let rate = match (orient, previous) {
                (_, Some(prev)) => t.to_flat().iter().zip(prev).map(|(a, b)| a * b).sum(),
                (Some(pair), None) => pair_rate(f, &t, pair),
                (None, None) => volume_rate(f, &t),
            };
            if rate < 0.0 {
                t.scale(-1.0)
            } else {
                t
            }
        }
    };
    let norm = t.norm();
    if !(norm > 0.0) {
        return Err(Error::NoAuxeticDirection);
    }
    Ok(t.to_flat().iter().map(|x| x / norm).collect())
}

/// Integrates the selected direction field with classical RK4 steps of size
/// `h`, projecting back onto the constraints after every step.
pub fn integrate_trajectory(
    f: &PeriodicFramework,
    selector: &Selector,
    steps: usize,
    h: f64,
) -> Result<DeformationPath> {
    f.ensure_valid()?;
    if steps == 0 || !(h > 0.0) || !h.is_finite() {
        return Err(invalid("integration needs at least one step of positive size"));
    }
    if f.dof()? == 0 {
        return Err(Error::NoAuxeticDirection);
    }
    let mut cur = f.clone();
    let mut samples = vec![Sample { tau: 0.0, positions: cur.positions.clone(), lattice: cur.lattice.clone() }];
    let mut prev_dir: Option<Vec<f64>> = None;
    for step in 0..steps {
        let tau = step as f64 * h;
        let x = flat_state(&cur);
        // Stage points sit slightly off the constraint set; the direction field
        // there is that of the framework with bar lengths read off the geometry.
        let eval = |x: &[f64], prev: Option<&[f64]>| direction(&relengthed(&from_state(&cur, x)), selector, prev);
        let advance = |k: &[f64], s: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + s * b).collect() };
        let k1 = eval(&x, prev_dir.as_deref())?;
        let k2 = eval(&advance(&k1, h / 2.0), Some(&k1))?;
        let k3 = eval(&advance(&k2, h / 2.0), Some(&k2))?;
        let k4 = eval(&advance(&k3, h), Some(&k3))?;
        let next: Vec<f64> =
            (0..x.len()).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
        cur = project_to_constraints(&from_state(&cur, &next)).ok_or(Error::StepFailure { tau: tau + h })?;
        prev_dir = Some(k1);
        samples.push(Sample { tau: tau + h, positions: cur.positions.clone(), lattice: cur.lattice.clone() });
    }
    DeformationPath::new(f.clone(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::{check_path_psd, PsdVerdict};
    use crate::framework::{catalog, pyramid_mechanisms, CatalogId, CatalogKind};

    #[test]
    fn pyramid_auxetic_witness_path() {
        let f = catalog(&CatalogId::new(CatalogKind::Pyramid3D)).unwrap();
        let p = integrate_trajectory(&f, &Selector::AuxeticWitness, 50, 1e-2).unwrap();
        assert_eq!(p.len(), 51);
        assert!(check_path_psd(&p, 1e-9).unwrap().is_auxetic());
        assert_ne!(check_path_psd(&p, 1e-9).unwrap(), PsdVerdict::BoundaryAuxetic);
    }

    #[test]
    fn rigid_framework_has_no_direction() {
        let f = PeriodicFramework::from_geometry(
            vec![vec![0.0, 0.0]],
            LinearMap::identity(2),
            &[(0, 0, vec![1, 0]), (0, 0, vec![0, 1]), (0, 0, vec![1, 1])],
        )
        .unwrap();
        assert_eq!(integrate_trajectory(&f, &Selector::AuxeticWitness, 5, 1e-2), Err(Error::NoAuxeticDirection));
    }

    #[test]
    fn mechanisms_of_the_pyramid() {
        let f = catalog(&CatalogId::new(CatalogKind::Pyramid3D)).unwrap();
        let rays = mechanism_rays(&f, &pyramid_mechanisms()).unwrap();
        assert_eq!(rays.len(), 4);
        for r in &rays {
            let g = gram_differential(&f, r);
            assert!(crate::symcone::min_eigenvalue(&g).unwrap() > -1e-9);
        }
        let sel = Selector::ConvexCombination { weights: vec![0.25; 4], mechanisms: pyramid_mechanisms() };
        let p = integrate_trajectory(&f, &sel, 10, 1e-2).unwrap();
        assert!(check_path_psd(&p, 1e-6).unwrap().is_auxetic());
    }

    #[test]
    fn projection_restores_lengths() {
        let f = catalog(&CatalogId::new(CatalogKind::ReentrantHoneycomb)).unwrap();
        let mut x = flat_state(&f);
        x[2] += 1e-3;
        x[5] -= 2e-3;
        let g = project_to_constraints(&from_state(&f, &x)).unwrap();
        assert!(max_relative_residual(&g) <= NEWTON_TOL);
    }
}
