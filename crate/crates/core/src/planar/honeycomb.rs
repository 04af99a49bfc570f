use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Relative tolerance on the surface residual.
pub const SURFACE_TOL: f64 = 1e-9;

/// A Gram matrix of a planar lattice together with the squared bar length of
/// the equal-edge honeycomb it carries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoneycombPoint {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HoneycombVerdict {
    Nontrivial,
    Boundary,
    TrivialOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriangleClass {
    Acute,
    Right,
    Obtuse,
}

fn check_gram(a11: f64, a12: f64, a22: f64) -> Result<()> {
    if ![a11, a12, a22].iter().all(|x| x.is_finite()) || !(a11 > 0.0 && a22 > 0.0 && a11 * a22 - a12 * a12 > 0.0) {
        return Err(invalid("Gram matrix must be positive definite"));
    }
    Ok(())
}

/// The cubic a11·a22·(a11 + a22 − 2a12) − 4s(a11·a22 − a12²), zero exactly
/// when s is the squared circumradius of the period triangle.
pub fn honeycomb_surface(a11: f64, a12: f64, a22: f64, s: f64) -> Result<f64> {
    check_gram(a11, a12, a22)?;
    Ok(a11 * a22 * (a11 + a22 - 2.0 * a12) - 4.0 * s * (a11 * a22 - a12 * a12))
}

impl HoneycombPoint {
    /// On-surface point for the given Gram entries.
    pub fn from_gram(a11: f64, a12: f64, a22: f64) -> Result<Self> {
        check_gram(a11, a12, a22)?;
        let s = a11 * a22 * (a11 + a22 - 2.0 * a12) / (4.0 * (a11 * a22 - a12 * a12));
        Ok(HoneycombPoint { a11, a12, a22, s })
    }

    /// Residual scaled by the size of its terms.
    pub fn relative_residual(&self) -> Result<f64> {
        let r = honeycomb_surface(self.a11, self.a12, self.a22, self.s)?;
        let t1 = (self.a11 * self.a22 * (self.a11 + self.a22 - 2.0 * self.a12)).abs();
        let t2 = (4.0 * self.s * (self.a11 * self.a22 - self.a12 * self.a12)).abs();
        Ok(r.abs() / t1.max(t2).max(f64::MIN_POSITIVE))
    }

    /// Partial derivatives (∂f/∂a11, ∂f/∂a12, ∂f/∂a22) at fixed s.
    pub fn gradient(&self) -> (f64, f64, f64) {
        let HoneycombPoint { a11, a12, a22, s } = *self;
        let f11 = a22 * (2.0 * a11 + a22 - 2.0 * a12) - 4.0 * s * a22;
        let f12 = -2.0 * a11 * a22 + 8.0 * s * a12;
        let f22 = a11 * (a11 + 2.0 * a22 - 2.0 * a12) - 4.0 * s * a11;
        (f11, f12, f22)
    }

    /// (2f11·f22 − f12²)² − 4f11²·f22².
    pub fn discriminant(&self) -> f64 {
        let (f11, f12, f22) = self.gradient();
        (2.0 * f11 * f22 - f12 * f12).powi(2) - 4.0 * f11 * f11 * f22 * f22
    }
}

/// Whether the tangent plane to the deformation surface meets the interior of
/// the positive semidefinite cone.
pub fn honeycomb_auxetic_test(pt: &HoneycombPoint) -> Result<HoneycombVerdict> {
    if !(pt.s > 0.0) {
        return Err(invalid("squared bar length must be positive"));
    }
    if pt.relative_residual()? > SURFACE_TOL {
        return Err(invalid("point is not on the honeycomb deformation surface"));
    }
    let (f11, f12, f22) = pt.gradient();
    let tol = 1e-9 * (f11 * f11 + f12 * f12 + f22 * f22).powi(2);
    let delta = pt.discriminant();
    Ok(if delta > tol {
        HoneycombVerdict::Nontrivial
    } else if delta < -tol {
        HoneycombVerdict::TrivialOnly
    } else {
        HoneycombVerdict::Boundary
    })
}

/// Shape of the triangle with vertices 0, λ1, λ2 given its Gram entries.
pub fn period_triangle_class(a11: f64, a12: f64, a22: f64, tol: f64) -> Result<TriangleClass> {
    check_gram(a11, a12, a22)?;
    // Cosine numerators at the vertices 0, λ1, λ2.
    let at_origin = a12;
    let at_l1 = a11 - a12;
    let at_l2 = a22 - a12;
    let scale = a11.max(a22);
    let least = at_origin.min(at_l1).min(at_l2) / scale;
    Ok(if least < -tol {
        TriangleClass::Obtuse
    } else if least > tol {
        TriangleClass::Acute
    } else {
        TriangleClass::Right
    })
}
