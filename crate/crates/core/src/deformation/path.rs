//! Sampled one-parameter deformations and the four path checks.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::framework::{
    catalog, coset_representatives, relaxed_geometry, silica_gram_derivative, sublattice_relax, CatalogId, CatalogKind,
    PairId, PeriodicFramework, Point,
};
use crate::symcone::{eigen_sym, is_contraction, operator_norm, LinearMap, SymMatrix};

/// Relative tolerance on bar lengths along a path.
pub const PATH_LENGTH_TOL: f64 = 1e-8;

/// Relative slack when comparing consecutive cell volumes.
const VOLUME_TOL: f64 = 1e-10;

/// Default number of samples for closed-form paths.
pub const DEFAULT_DENSITY: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub tau: f64,
    pub positions: Vec<Point>,
    pub lattice: LinearMap,
}

/// A deformation sampled at strictly increasing parameter values.
///
/// `gram_velocities`, when present, holds dω/dτ at every sample in closed
/// form; otherwise tangents are estimated from the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationPath {
    pub framework0: PeriodicFramework,
    pub samples: Vec<Sample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram_velocities: Option<Vec<SymMatrix>>,
}

fn fourth_order<F: Fn(f64) -> Result<SymMatrix>>(g: &F, tau: f64, eps: f64) -> Result<SymMatrix> {
    let p2 = g(tau + 2.0 * eps)?;
    let p1 = g(tau + eps)?;
    let m1 = g(tau - eps)?;
    let m2 = g(tau - 2.0 * eps)?;
    Ok(p1.sub(&m1).scale(8.0).sub(&p2.sub(&m2)).scale(1.0 / (12.0 * eps)))
}

fn uniform_taus(range: (f64, f64), count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(range.1 > range.0) {
        return Err(invalid("a path needs at least 2 samples over an increasing range"));
    }
    Ok((0..count).map(|k| range.0 + (range.1 - range.0) * k as f64 / (count - 1) as f64).collect())
}

impl DeformationPath {
    pub fn new(framework0: PeriodicFramework, samples: Vec<Sample>) -> Result<Self> {
        let p = DeformationPath { framework0, samples, gram_velocities: None };
        p.validate()?;
        Ok(p)
    }

    /// Samples a closed-form generator at `count` evenly spaced parameters.
    /// Gram velocities come from fourth-order differences of the generator
    /// with step one tenth of the sample spacing, so the generator must
    /// accept parameters slightly outside `range`.
    pub fn from_generator<G>(framework0: PeriodicFramework, range: (f64, f64), count: usize, gen: G) -> Result<Self>
    where
        G: Fn(f64) -> Result<(Vec<Point>, LinearMap)>,
    {
        let taus = uniform_taus(range, count)?;
        let eps = (taus[1] - taus[0]) / 10.0;
        let gram_at = |t: f64| gen(t).map(|(_, l)| l.gram());
        let mut samples = Vec::with_capacity(count);
        let mut velocities = Vec::with_capacity(count);
        for &tau in &taus {
            let (positions, lattice) = gen(tau)?;
            samples.push(Sample { tau, positions, lattice });
            velocities.push(fourth_order(&gram_at, tau, eps)?);
        }
        let p = DeformationPath { framework0, samples, gram_velocities: Some(velocities) };
        p.validate()?;
        Ok(p)
    }

    /// A path of bare lattices (one vertex orbit at the origin, no bars).
    pub fn lattice_only(taus: &[f64], lattices: Vec<LinearMap>) -> Result<Self> {
        if taus.len() != lattices.len() || lattices.is_empty() {
            return Err(invalid("one lattice per parameter value is required"));
        }
        let d = lattices[0].dim();
        let f0 = PeriodicFramework::from_geometry(vec![vec![0.0; d]], lattices[0].clone(), &[])?;
        let samples = taus
            .iter()
            .zip(lattices)
            .map(|(&tau, lattice)| Sample { tau, positions: vec![vec![0.0; d]], lattice })
            .collect();
        DeformationPath::new(f0, samples)
    }

    /// Closed-form bare-lattice path τ ↦ Λ(τ).
    pub fn lattice_fn<G>(range: (f64, f64), count: usize, gen: G) -> Result<Self>
    where
        G: Fn(f64) -> LinearMap,
    {
        let l0 = gen(range.0);
        let d = l0.dim();
        let f0 = PeriodicFramework::from_geometry(vec![vec![0.0; d]], l0, &[])?;
        DeformationPath::from_generator(f0, range, count, |t| Ok((vec![vec![0.0; d]], gen(t))))
    }

    /// The quartz or cristobalite tilt path θ(τ) = θ₀ + (θ₁ − θ₀)τ, τ ∈ [0, 1],
    /// with the analytic Gram velocity.
    pub fn silica_tilt(kind: CatalogKind, theta_from: f64, theta_to: f64, count: usize) -> Result<Self> {
        let folds = match kind {
            CatalogKind::QuartzBeta => 3,
            CatalogKind::CristobaliteBeta => 4,
            other => return Err(invalid(format!("{other} has no tilt parameter"))),
        };
        let build = |theta: f64| catalog(&CatalogId::new(kind).with("theta", theta));
        let taus = uniform_taus((0.0, 1.0), count)?;
        let rate = theta_to - theta_from;
        let mut samples = Vec::with_capacity(count);
        let mut velocities = Vec::with_capacity(count);
        for &tau in &taus {
            let theta = theta_from + rate * tau;
            let f = build(theta)?;
            samples.push(Sample { tau, positions: f.positions, lattice: f.lattice });
            velocities.push(silica_gram_derivative(folds, theta).scale(rate));
        }
        let p = DeformationPath { framework0: build(theta_from)?, samples, gram_velocities: Some(velocities) };
        p.validate()?;
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.tau).collect()
    }

    /// The framework realized at sample `i`.
    pub fn framework_at(&self, i: usize) -> PeriodicFramework {
        let s = &self.samples[i];
        self.framework0.with_geometry(s.positions.clone(), s.lattice.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.len() < 2 {
            return Err(invalid("a path needs at least 2 samples"));
        }
        if let Some(v) = &self.gram_velocities {
            if v.len() != self.samples.len() {
                return Err(invalid("one Gram velocity per sample is required"));
            }
        }
        let d = self.framework0.dim();
        let n = self.framework0.n();
        for (i, s) in self.samples.iter().enumerate() {
            if !s.tau.is_finite() || (i > 0 && !(s.tau > self.samples[i - 1].tau)) {
                return Err(invalid(format!("sample {i}: parameter values must increase strictly")));
            }
            if s.lattice.dim() != d || s.positions.len() != n || s.positions.iter().any(|p| p.len() != d) {
                return Err(invalid(format!("sample {i}: geometry does not match the framework")));
            }
            let f = self.framework_at(i);
            for (k, e) in f.edges().iter().enumerate() {
                let actual = crate::framework::norm(&f.edge_vector(e));
                if (actual - e.length).abs() > PATH_LENGTH_TOL * e.length {
                    return Err(invalid(format!(
                        "sample {i}: edge {k} has length {actual} instead of {}",
                        e.length
                    )));
                }
            }
            if s.lattice.determinant().abs() <= 1e-300 || !s.lattice.is_finite() {
                return Err(invalid(format!("sample {i}: singular lattice")));
            }
        }
        Ok(())
    }

    /// The same motion traversed backwards, parametrized by −τ.
    pub fn reversed(&self) -> Self {
        let samples: Vec<Sample> =
            self.samples.iter().rev().map(|s| Sample { tau: -s.tau, ..s.clone() }).collect();
        let framework0 = self.framework_at(self.samples.len() - 1);
        let gram_velocities =
            self.gram_velocities.as_ref().map(|v| v.iter().rev().map(|m| m.scale(-1.0)).collect());
        DeformationPath { framework0, samples, gram_velocities }
    }

    /// The induced path on the framework relaxed to the sublattice `basis`.
    pub fn relaxed(&self, basis: &[Vec<i64>]) -> Result<Self> {
        let framework0 = sublattice_relax(&self.framework0, basis)?;
        let reps = coset_representatives(basis)?;
        let b = LinearMap::from_rows(&basis.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect::<Vec<_>>())?;
        let mut samples = Vec::with_capacity(self.len());
        for s in &self.samples {
            let (positions, lattice) = relaxed_geometry(&s.positions, &s.lattice, basis, &reps)?;
            samples.push(Sample { tau: s.tau, positions, lattice });
        }
        // ω' = Bᵀ ω B, so velocities transform the same way.
        let gram_velocities = self.gram_velocities.as_ref().map(|v| {
            v.iter()
                .map(|m| {
                    let rows = m.to_rows();
                    let full = LinearMap::from_rows(&rows).expect("square");
                    let t = b.transpose().mul(&full).mul(&b);
                    let mut out = SymMatrix::zeros(b.dim());
                    for i in 0..b.dim() {
                        for j in i..b.dim() {
                            out.set(i, j, 0.5 * (t.get(i, j) + t.get(j, i)));
                        }
                    }
                    out
                })
                .collect()
        });
        let p = DeformationPath { framework0, samples, gram_velocities };
        p.validate()?;
        Ok(p)
    }

    /// Gram matrices along the path.
    pub fn grams(&self) -> Vec<SymMatrix> {
        self.samples.iter().map(|s| s.lattice.gram()).collect()
    }

    /// dω/dτ at every sample: the closed form when available, otherwise
    /// three-point differences (one-sided at the ends).
    pub fn gram_velocities(&self) -> Vec<SymMatrix> {
        if let Some(v) = &self.gram_velocities {
            return v.clone();
        }
        let g = self.grams();
        let t = self.taus();
        let n = g.len();
        if n == 2 {
            let v = g[1].sub(&g[0]).scale(1.0 / (t[1] - t[0]));
            return vec![v.clone(), v];
        }
        // Weights of the quadratic interpolant's derivative at node `at`.
        let weights = |i0: usize, at: usize| -> [f64; 3] {
            let x = [t[i0], t[i0 + 1], t[i0 + 2]];
            let z = t[at];
            let mut w = [0.0; 3];
            for a in 0..3 {
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                w[a] = ((z - x[b]) + (z - x[c])) / ((x[a] - x[b]) * (x[a] - x[c]));
            }
            w
        };
        (0..n)
            .map(|i| {
                let i0 = i.saturating_sub(1).min(n - 3);
                let w = weights(i0, i);
                g[i0].scale(w[0]).add(&g[i0 + 1].scale(w[1])).add(&g[i0 + 2].scale(w[2]))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PsdVerdict {
    Auxetic,
    /// Every tangent is PSD but some touch the boundary of the cone.
    BoundaryAuxetic,
    NotAuxetic { tau: f64 },
}

impl PsdVerdict {
    pub fn is_auxetic(&self) -> bool {
        !matches!(self, PsdVerdict::NotAuxetic { .. })
    }
}

/// Tangent test: every Gram velocity must be PSD. The tolerance is applied
/// relative to the size of each velocity (absolute below unit size).
pub fn check_path_psd(p: &DeformationPath, tol: f64) -> Result<PsdVerdict> {
    p.validate()?;
    let mut boundary = false;
    for (s, v) in p.samples.iter().zip(p.gram_velocities()) {
        let scaled = tol * v.frobenius_norm().max(1.0);
        let min = eigen_sym(&v)?.values[0];
        if min < -scaled {
            return Ok(PsdVerdict::NotAuxetic { tau: s.tau });
        }
        if min <= scaled {
            boundary = true;
        }
    }
    Ok(if boundary { PsdVerdict::BoundaryAuxetic } else { PsdVerdict::Auxetic })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ContractionVerdict {
    Auxetic,
    NotAuxetic { tau1: f64, tau2: f64, norm: f64 },
}

impl ContractionVerdict {
    pub fn is_auxetic(&self) -> bool {
        matches!(self, ContractionVerdict::Auxetic)
    }
}

/// Contraction test: for all sampled τ₁ < τ₂, Λ(τ₁)·Λ(τ₂)⁻¹ has norm ≤ 1 + tol.
pub fn check_path_contraction(p: &DeformationPath, tol: f64) -> Result<ContractionVerdict> {
    p.validate()?;
    let inverses: Vec<LinearMap> = p
        .samples
        .iter()
        .map(|s| s.lattice.inverse().ok_or_else(|| invalid(format!("singular lattice at tau = {}", s.tau))))
        .collect::<Result<_>>()?;
    for (i, s1) in p.samples.iter().enumerate() {
        for (j, s2) in p.samples.iter().enumerate().skip(i + 1) {
            let t = s1.lattice.mul(&inverses[j]);
            if !is_contraction(&t, tol) {
                return Ok(ContractionVerdict::NotAuxetic { tau1: s1.tau, tau2: s2.tau, norm: operator_norm(&t) });
            }
        }
    }
    Ok(ContractionVerdict::Auxetic)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExpansiveVerdict {
    Expansive,
    NotExpansive { pair: PairId, tau: f64, before: f64, after: f64 },
}

impl ExpansiveVerdict {
    pub fn is_expansive(&self) -> bool {
        matches!(self, ExpansiveVerdict::Expansive)
    }
}

/// No sampled vertex-pair distance may drop between consecutive samples by
/// more than `tol` (relative above unit distance).
pub fn check_expansive(p: &DeformationPath, radius: u32, tol: f64) -> Result<ExpansiveVerdict> {
    if radius < 1 {
        return Err(invalid("expansiveness needs a translate radius of at least 1"));
    }
    p.validate()?;
    let mut prev = p.framework_at(0).pairwise_distances(radius);
    for i in 1..p.len() {
        let cur = p.framework_at(i).pairwise_distances(radius);
        for ((pair, before), (_, after)) in prev.iter().zip(&cur) {
            if *after < before - tol * before.max(1.0) {
                return Ok(ExpansiveVerdict::NotExpansive {
                    pair: pair.clone(),
                    tau: p.samples[i].tau,
                    before: *before,
                    after: *after,
                });
            }
        }
        prev = cur;
    }
    Ok(ExpansiveVerdict::Expansive)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VolumeVerdict {
    NonDecreasing,
    Violation { tau: f64 },
}

/// |det Λ(τ)| must not decrease between consecutive samples.
pub fn check_volume(p: &DeformationPath) -> Result<VolumeVerdict> {
    p.validate()?;
    let vols: Vec<f64> = p.samples.iter().map(|s| s.lattice.determinant().abs()).collect();
    for i in 1..vols.len() {
        if vols[i] < vols[i - 1] * (1.0 - VOLUME_TOL) {
            return Ok(VolumeVerdict::Violation { tau: p.samples[i].tau });
        }
    }
    Ok(VolumeVerdict::NonDecreasing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn quartz_path_is_auxetic_forward_only() {
        let p = DeformationPath::silica_tilt(CatalogKind::QuartzBeta, FRAC_PI_3, 0.05, DEFAULT_DENSITY).unwrap();
        assert_eq!(check_path_psd(&p, 1e-9).unwrap(), PsdVerdict::Auxetic);
        assert!(!check_path_psd(&p.reversed(), 1e-9).unwrap().is_auxetic());
        assert_eq!(check_volume(&p).unwrap(), VolumeVerdict::NonDecreasing);
    }

    #[test]
    fn cristobalite_path_contracts() {
        let p = DeformationPath::silica_tilt(CatalogKind::CristobaliteBeta, FRAC_PI_3, 0.05, DEFAULT_DENSITY).unwrap();
        assert_eq!(check_path_contraction(&p, 1e-9).unwrap(), ContractionVerdict::Auxetic);
        assert!(!check_path_contraction(&p.reversed(), 1e-9).unwrap().is_auxetic());
    }

    #[test]
    fn constant_path_is_boundary() {
        let p = DeformationPath::lattice_fn((0.0, 1.0), 10, |_| LinearMap::identity(2)).unwrap();
        assert_eq!(check_path_psd(&p, 1e-9).unwrap(), PsdVerdict::BoundaryAuxetic);
        assert_eq!(check_path_contraction(&p, 1e-9).unwrap(), ContractionVerdict::Auxetic);
        assert_eq!(check_expansive(&p, 1, 1e-9).unwrap(), ExpansiveVerdict::Expansive);
    }

    #[test]
    fn stretch_and_squeeze_is_not_auxetic() {
        let p = DeformationPath::lattice_fn((0.0, 0.5), 50, |t| LinearMap::diagonal(&[1.0 + t, 1.0 - t])).unwrap();
        assert!(!check_path_contraction(&p, 1e-9).unwrap().is_auxetic());
        assert!(!check_path_psd(&p, 1e-9).unwrap().is_auxetic());
    }

    #[test]
    fn rotations_are_auxetic() {
        let base = LinearMap::from_rows(&[vec![2.0, 0.5], vec![0.0, 1.0]]).unwrap();
        let p = DeformationPath::lattice_fn((0.0, 2.0), 40, |t| LinearMap::rotation_2d(t).mul(&base)).unwrap();
        assert!(check_path_contraction(&p, 1e-9).unwrap().is_auxetic());
        assert!(check_path_psd(&p, 1e-9).unwrap().is_auxetic());
    }

    #[test]
    fn shrinking_and_shearing_volumes() {
        let shrink = DeformationPath::lattice_fn((0.0, 0.5), 20, |t| LinearMap::identity(2).scale(1.0 - t)).unwrap();
        assert!(matches!(check_volume(&shrink).unwrap(), VolumeVerdict::Violation { .. }));
        let shear =
            DeformationPath::lattice_fn((0.0, 1.0), 20, |t| LinearMap::from_rows(&[vec![1.0, t], vec![0.0, 1.0]]).unwrap())
                .unwrap();
        assert_eq!(check_volume(&shear).unwrap(), VolumeVerdict::NonDecreasing);
        assert!(!check_path_psd(&shear, 1e-9).unwrap().is_auxetic());
    }

    #[test]
    fn sampled_differences_are_second_order() {
        let taus: Vec<f64> = (0..30).map(|k| (k as f64 / 29.0).powf(1.3)).collect();
        let lattices = taus.iter().map(|&t| LinearMap::diagonal(&[1.0 + t * t, 2.0])).collect();
        let p = DeformationPath::lattice_only(&taus, lattices).unwrap();
        for (t, v) in taus.iter().zip(p.gram_velocities()) {
            // d/dt (1 + t²)² = 4t(1 + t²)
            assert!((v.get(0, 0) - 4.0 * t * (1.0 + t * t)).abs() < 2e-2, "{t}");
            assert!(v.get(1, 1).abs() < 1e-12);
        }
    }

    #[test]
    fn non_increasing_parameters_rejected() {
        let l = vec![LinearMap::identity(2), LinearMap::identity(2)];
        assert!(DeformationPath::lattice_only(&[0.0, 0.0], l).is_err());
    }
}
