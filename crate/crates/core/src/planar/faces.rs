use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::crossing::is_noncrossing;
use crate::error::{invalid, Result};
use crate::framework::PeriodicFramework;

/// Corners whose angle is below π minus this slack count as convex.
pub const CONVEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corner {
    pub vertex: usize,
    /// Cell of the vertex copy at this corner, relative to the walk start.
    pub offset: Vec<i64>,
    /// Interior angle, measured on the face side.
    pub angle: f64,
}

/// Boundary walk of one face orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceWalk {
    pub corners: Vec<Corner>,
    /// False when the walk returns to its starting bar in a different cell,
    /// that is, the face is an unbounded strip.
    pub closed: bool,
    pub pseudo_triangle: bool,
}

impl FaceWalk {
    pub fn convex_corners(&self) -> usize {
        self.corners.iter().filter(|c| c.angle < PI - CONVEX_TOL).count()
    }

    /// Sum of interior angles minus (k − 2)π; zero for a simple polygon.
    pub fn angle_sum_defect(&self) -> f64 {
        let k = self.corners.len() as f64;
        self.corners.iter().map(|c| c.angle).sum::<f64>() - (k - 2.0) * PI
    }
}

/// A half-bar leaving the representative of `from`, ending at `to` in cell `gamma`.
#[derive(Debug, Clone)]
struct Dart {
    to: usize,
    gamma: [i64; 2],
    angle: f64,
    /// Index of the opposite dart in the star of `to`.
    twin: usize,
}

/// Outgoing half-edge before sorting: (to, gamma, angle, edge index, forward).
type RawDart = (usize, [i64; 2], f64, usize, bool);

fn rotation_system(f: &PeriodicFramework) -> Vec<Vec<Dart>> {
    let n = f.n();
    let mut raw: Vec<Vec<RawDart>> = vec![Vec::new(); n];
    for (i, e) in f.edges().iter().enumerate() {
        let v = f.edge_vector(e);
        let g = [e.gamma[0], e.gamma[1]];
        raw[e.u].push((e.v, g, v[1].atan2(v[0]).rem_euclid(TAU), i, true));
        raw[e.v].push((e.u, [-g[0], -g[1]], (-v[1]).atan2(-v[0]).rem_euclid(TAU), i, false));
    }
    for star in &mut raw {
        star.sort_by(|a, b| a.2.total_cmp(&b.2));
    }
    let locate = |vertex: usize, edge: usize, forward: bool| {
        raw[vertex].iter().position(|d| d.3 == edge && d.4 == forward).expect("every dart has a twin")
    };
    raw.iter()
        .map(|star| {
            star.iter()
                .map(|&(to, gamma, angle, edge, forward)| Dart { to, gamma, angle, twin: locate(to, edge, !forward) })
                .collect()
        })
        .collect()
}

/// Faces of a non-crossing planar framework, one walk per face orbit. Each
/// bar side is used once; the walk turns to the next bar clockwise from the
/// reversed incoming bar, so faces lie to the left of the walk.
pub fn classify_faces(f: &PeriodicFramework) -> Result<Vec<FaceWalk>> {
    if !is_noncrossing(f, 1)? {
        return Err(invalid("faces are defined only for non-crossing frameworks"));
    }
    let rot = rotation_system(f);
    let mut used: Vec<Vec<bool>> = rot.iter().map(|s| vec![false; s.len()]).collect();
    let mut faces = Vec::new();
    for v0 in 0..rot.len() {
        for d0 in 0..rot[v0].len() {
            if used[v0][d0] {
                continue;
            }
            let (mut v, mut d) = (v0, d0);
            let mut offset = [0i64, 0];
            let mut corners = Vec::new();
            loop {
                used[v][d] = true;
                let dart = &rot[v][d];
                offset = [offset[0] + dart.gamma[0], offset[1] + dart.gamma[1]];
                let w = dart.to;
                let back = dart.twin;
                let deg = rot[w].len();
                let next = (back + deg - 1) % deg;
                let angle = if next == back {
                    TAU
                } else {
                    (rot[w][back].angle - rot[w][next].angle).rem_euclid(TAU)
                };
                corners.push(Corner { vertex: w, offset: offset.to_vec(), angle });
                v = w;
                d = next;
                if v == v0 && d == d0 {
                    break;
                }
            }
            let closed = offset == [0, 0];
            // The first corner recorded is the end of the first dart; rotate so
            // the walk starts at its origin.
            corners.rotate_right(1);
            let convex = corners.iter().filter(|c| c.angle < PI - CONVEX_TOL).count();
            faces.push(FaceWalk { corners, closed, pseudo_triangle: closed && convex == 3 });
        }
    }
    Ok(faces)
}

/// n − m + F for the quotient; zero for a cellular drawing on the torus.
pub fn euler_count(f: &PeriodicFramework, faces: &[FaceWalk]) -> i64 {
    f.n() as i64 - f.m() as i64 + faces.len() as i64
}
