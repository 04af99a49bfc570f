use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::framework::PeriodicFramework;

/// Slack added to π when deciding whether an angular gap opens a half-plane.
pub const POINTED_TOL: f64 = 1e-9;

/// Unit directions of the bars leaving one vertex representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexStar {
    directions: Vec<[f64; 2]>,
}

fn angle_of(v: [f64; 2]) -> f64 {
    v[1].atan2(v[0]).rem_euclid(TAU)
}

impl VertexStar {
    /// Normalizes the given directions; rejects an empty list, zero vectors
    /// and repeated directions.
    pub fn new(directions: &[[f64; 2]]) -> Result<Self> {
        if directions.is_empty() {
            return Err(invalid("a vertex star needs at least one direction"));
        }
        let mut unit = Vec::with_capacity(directions.len());
        for d in directions {
            let n = d[0].hypot(d[1]);
            if !(n > 0.0) || !n.is_finite() {
                return Err(invalid("vertex star directions must be non-zero and finite"));
            }
            let u = [d[0] / n, d[1] / n];
            if unit.iter().any(|w: &[f64; 2]| (w[0] - u[0]).abs() < 1e-12 && (w[1] - u[1]).abs() < 1e-12) {
                return Err(invalid("repeated direction in vertex star"));
            }
            unit.push(u);
        }
        Ok(VertexStar { directions: unit })
    }

    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        VertexStar::new(&angles.iter().map(|a| [a.cos(), a.sin()]).collect::<Vec<_>>())
    }

    pub fn directions(&self) -> &[[f64; 2]] {
        &self.directions
    }

    /// Direction angles in [0, 2π), ascending.
    pub fn sorted_angles(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self.directions.iter().map(|&d| angle_of(d)).collect();
        a.sort_by(f64::total_cmp);
        a
    }

    /// Largest cyclic gap between consecutive directions.
    pub fn max_gap(&self) -> f64 {
        let a = self.sorted_angles();
        let wrap = a[0] + TAU - a[a.len() - 1];
        a.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max)
    }
}

/// True iff the directions fit in an open half-plane, that is, some gap
/// exceeds π. Exactly opposite directions are not pointed.
pub fn is_pointed(star: &VertexStar) -> bool {
    star.max_gap() > PI + POINTED_TOL
}

/// Bar directions at the representative of vertex orbit `v`, including both
/// ends of bars joining `v` to its own translates. `None` for an isolated
/// vertex.
pub fn vertex_star(f: &PeriodicFramework, v: usize) -> Option<Result<VertexStar>> {
    let mut dirs = Vec::new();
    for e in f.edges() {
        let vec = f.edge_vector(e);
        if e.u == v {
            dirs.push([vec[0], vec[1]]);
        }
        if e.v == v {
            dirs.push([-vec[0], -vec[1]]);
        }
    }
    (!dirs.is_empty()).then(|| VertexStar::new(&dirs))
}

/// Every vertex with at least one bar has a pointed star; a star with
/// coinciding bars counts as not pointed.
pub fn is_framework_pointed(f: &PeriodicFramework) -> bool {
    (0..f.n()).all(|v| match vertex_star(f, v) {
        None => true,
        Some(Ok(star)) => is_pointed(&star),
        Some(Err(_)) => false,
    })
}
