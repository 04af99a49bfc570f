//! Ready-made frameworks: the silica tilt models, planar honeycombs, and the
//! two-orbit three-dimensional designs.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{sublattice_relax, Bar, PeriodicFramework};
use crate::error::{invalid, Error, Result};
use crate::symcone::{LinearMap, SymMatrix};

pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CatalogKind {
    QuartzBeta,
    CristobaliteBeta,
    HoneycombEqualEdge,
    ReentrantHoneycomb,
    ReentrantHoneycombRelaxed,
    MissingRibEquivalent,
    Pyramid3D,
    Tetra3D,
    Prism3D,
    Cube3D,
    DoubledPyramid3D,
    DoubledTetra3D,
}

impl CatalogKind {
    pub const ALL: [CatalogKind; 12] = [
        CatalogKind::QuartzBeta,
        CatalogKind::CristobaliteBeta,
        CatalogKind::HoneycombEqualEdge,
        CatalogKind::ReentrantHoneycomb,
        CatalogKind::ReentrantHoneycombRelaxed,
        CatalogKind::MissingRibEquivalent,
        CatalogKind::Pyramid3D,
        CatalogKind::Tetra3D,
        CatalogKind::Prism3D,
        CatalogKind::Cube3D,
        CatalogKind::DoubledPyramid3D,
        CatalogKind::DoubledTetra3D,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CatalogKind::QuartzBeta => "quartz-beta",
            CatalogKind::CristobaliteBeta => "cristobalite-beta",
            CatalogKind::HoneycombEqualEdge => "honeycomb",
            CatalogKind::ReentrantHoneycomb => "reentrant-honeycomb",
            CatalogKind::ReentrantHoneycombRelaxed => "reentrant-honeycomb-relaxed",
            CatalogKind::MissingRibEquivalent => "missing-rib",
            CatalogKind::Pyramid3D => "pyramid3d",
            CatalogKind::Tetra3D => "tetra3d",
            CatalogKind::Prism3D => "prism3d",
            CatalogKind::Cube3D => "cube3d",
            CatalogKind::DoubledPyramid3D => "doubled-pyramid3d",
            CatalogKind::DoubledTetra3D => "doubled-tetra3d",
        }
    }

    /// Parameter names with their defaults.
    pub fn defaults(self) -> Params {
        let p = |pairs: &[(&str, f64)]| pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        match self {
            CatalogKind::QuartzBeta | CatalogKind::CristobaliteBeta => p(&[("theta", 0.0)]),
            CatalogKind::HoneycombEqualEdge => p(&[("a11", 1.0), ("a12", -0.3), ("a22", 1.0)]),
            CatalogKind::ReentrantHoneycomb | CatalogKind::ReentrantHoneycombRelaxed => {
                p(&[("rib", 2.0), ("arm", 1.0), ("angle", -FRAC_PI_6)])
            }
            CatalogKind::MissingRibEquivalent => p(&[("scale", 1.0)]),
            CatalogKind::Pyramid3D => {
                let s = (2.0_f64 / 5.0).sqrt();
                let r = 5f64.sqrt();
                p(&[("a1", s), ("a2", s), ("a3", -1.0 / r), ("b1", s), ("b2", s), ("b3", 2.0 / r)])
            }
            CatalogKind::Tetra3D | CatalogKind::Prism3D | CatalogKind::Cube3D | CatalogKind::DoubledTetra3D => {
                p(&[("scale", 1.0)])
            }
            CatalogKind::DoubledPyramid3D => p(&[("scale", 1.0), ("inner_height", 0.5)]),
        }
    }

    pub fn dim(self) -> usize {
        match self {
            CatalogKind::HoneycombEqualEdge
            | CatalogKind::ReentrantHoneycomb
            | CatalogKind::ReentrantHoneycombRelaxed
            | CatalogKind::MissingRibEquivalent => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for CatalogKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CatalogKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CatalogKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid(format!("unknown catalog entry '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogId {
    pub kind: CatalogKind,
    pub params: Params,
}

impl CatalogId {
    pub fn new(kind: CatalogKind) -> Self {
        CatalogId { kind, params: Params::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Defaults overlaid with the supplied parameters; unknown keys are errors.
    pub fn resolved_params(&self) -> Result<Params> {
        let mut all = self.kind.defaults();
        for (k, v) in &self.params {
            if !all.contains_key(k) {
                return Err(invalid(format!("unknown parameter '{k}' for {}", self.kind)));
            }
            if !v.is_finite() {
                return Err(invalid(format!("parameter '{k}' is not finite")));
            }
            all.insert(k.clone(), *v);
        }
        Ok(all)
    }
}

/// Builds and validates a catalog framework.
pub fn catalog(id: &CatalogId) -> Result<PeriodicFramework> {
    let p = id.resolved_params()?;
    let f = match id.kind {
        CatalogKind::QuartzBeta => helical_tetrahedra(3, tilt(&p)?),
        CatalogKind::CristobaliteBeta => helical_tetrahedra(4, tilt(&p)?),
        CatalogKind::HoneycombEqualEdge => honeycomb_equal_edge(p["a11"], p["a12"], p["a22"]),
        CatalogKind::ReentrantHoneycomb => reentrant_honeycomb(p["rib"], p["arm"], p["angle"]),
        CatalogKind::ReentrantHoneycombRelaxed => {
            let base = reentrant_honeycomb(p["rib"], p["arm"], p["angle"])?;
            sublattice_relax(&base, &[vec![1, 0], vec![0, 2]])
        }
        CatalogKind::MissingRibEquivalent => missing_rib(p["scale"]),
        CatalogKind::Pyramid3D => pyramid(&p),
        CatalogKind::Tetra3D => tetra(p["scale"]),
        CatalogKind::Prism3D => prism(p["scale"]),
        CatalogKind::Cube3D => cube(p["scale"]),
        CatalogKind::DoubledPyramid3D => doubled_pyramid(p["scale"], p["inner_height"]),
        CatalogKind::DoubledTetra3D => doubled_tetra(p["scale"]),
    }?;
    f.ensure_valid()?;
    Ok(f)
}

fn tilt(p: &Params) -> Result<f64> {
    let theta = p["theta"];
    if theta.abs() >= FRAC_PI_2 {
        return Err(invalid("tilt angle must lie in (-pi/2, pi/2)"));
    }
    Ok(theta)
}

/// Closed-form lattice Gram matrix of the quartz (`folds = 3`) or
/// cristobalite (`folds = 4`) tilt model at tilt angle θ.
pub fn silica_gram(folds: usize, theta: f64) -> SymMatrix {
    let c = theta.cos();
    match folds {
        3 => {
            let k = (1.0 + 3f64.sqrt() * c).powi(2);
            let mut g = SymMatrix::zeros(3);
            g.set(0, 0, 4.0 * k);
            g.set(0, 1, -2.0 * k);
            g.set(1, 1, 4.0 * k);
            g.set(2, 2, 36.0 * c * c);
            g
        }
        4 => {
            let k = 8.0 * (1.0 + c).powi(2);
            SymMatrix::diagonal(&[k, k, 64.0 * c * c])
        }
        _ => panic!("silica models have 3 or 4 tetrahedra per turn"),
    }
}

/// dω/dθ of [`silica_gram`].
pub fn silica_gram_derivative(folds: usize, theta: f64) -> SymMatrix {
    let (s, c) = theta.sin_cos();
    match folds {
        3 => {
            let r3 = 3f64.sqrt();
            let dk = -2.0 * (1.0 + r3 * c) * r3 * s;
            let mut g = SymMatrix::zeros(3);
            g.set(0, 0, 4.0 * dk);
            g.set(0, 1, -2.0 * dk);
            g.set(1, 1, 4.0 * dk);
            g.set(2, 2, -72.0 * c * s);
            g
        }
        4 => {
            let dk = -16.0 * (1.0 + c) * s;
            SymMatrix::diagonal(&[dk, dk, -128.0 * c * s])
        }
        _ => panic!("silica models have 3 or 4 tetrahedra per turn"),
    }
}

fn rot_z(angle: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn rot_y(angle: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

fn mat_vec(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Corner-sharing regular tetrahedra (edge 2√2, inscribed in cubes of side 2)
/// stacked in a helix: tetrahedron j is the tilted reference tetrahedron
/// rotated by 2πj/folds about the vertical axis. Corner 1 of tetrahedron j is
/// corner 4 of tetrahedron j+1; after a full turn the chain closes up to the
/// vertical period λ₃.
fn helical_tetrahedra(folds: usize, theta: f64) -> Result<PeriodicFramework> {
    const REF: [[f64; 3]; 4] = [[-1.0, 1.0, -1.0], [1.0, -1.0, -1.0], [1.0, 1.0, 1.0], [-1.0, -1.0, 1.0]];
    let t = rot_y(theta);
    let turn = |j: usize| rot_z(2.0 * PI * j as f64 / folds as f64);
    let local = |j: usize, i: usize| mat_vec(&turn(j), &mat_vec(&t, &REF[i]));

    let mut centers = vec![[0.0; 3]];
    for j in 0..folds - 1 {
        let next = sub3(add3(centers[j], local(j, 0)), local(j + 1, 3));
        centers.push(next);
    }
    let corner = |j: usize, i: usize| add3(centers[j], local(j, i));

    let l1 = sub3(corner(1, 2), corner(0, 1));
    let l2 = mat_vec(&turn(1), &l1);
    let l3 = sub3(corner(folds - 1, 0), corner(0, 3));
    let lattice = LinearMap::from_columns(&[l1.to_vec(), l2.to_vec(), l3.to_vec()])?;

    // Horizontal periods R^j λ₁ in lattice coordinates.
    let horizontal: Vec<[i64; 3]> = match folds {
        3 => vec![[1, 0, 0], [0, 1, 0], [-1, -1, 0]],
        4 => vec![[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]],
        _ => unreachable!(),
    };
    // Orbits: link corners L_j = (j, corner 1), side corners S_j = (j, corner 2).
    let link = |j: usize| j;
    let side = |j: usize| folds + j;
    let corner_orbit = |j: usize, i: usize| -> (usize, [i64; 3]) {
        match i {
            0 => (link(j), [0, 0, 0]),
            1 => (side(j), [0, 0, 0]),
            3 if j > 0 => (link(j - 1), [0, 0, 0]),
            3 => (link(folds - 1), [0, 0, -1]),
            2 if j > 0 => (side(j - 1), horizontal[j - 1]),
            _ => {
                let h = horizontal[folds - 1];
                (side(folds - 1), [h[0], h[1], h[2] - 1])
            }
        }
    };

    let mut positions = vec![vec![]; 2 * folds];
    for j in 0..folds {
        positions[link(j)] = corner(j, 0).to_vec();
        positions[side(j)] = corner(j, 1).to_vec();
    }
    let mut bars = Vec::new();
    for j in 0..folds {
        for a in 0..4 {
            for b in a + 1..4 {
                let (ou, gu) = corner_orbit(j, a);
                let (ov, gv) = corner_orbit(j, b);
                bars.push((ou, ov, (0..3).map(|k| gv[k] - gu[k]).collect()));
            }
        }
    }
    PeriodicFramework::from_geometry(positions, lattice, &bars)
}

/// Equal-bar hexagonal honeycomb: a black vertex at the origin and a white
/// vertex at the circumcenter of the period triangle (0, λ₁, λ₂), given by the
/// Gram entries of the periods.
pub fn honeycomb_equal_edge(a11: f64, a12: f64, a22: f64) -> Result<PeriodicFramework> {
    let det = a11 * a22 - a12 * a12;
    if !(a11 > 0.0 && det > 0.0) {
        return Err(invalid("honeycomb Gram entries must be positive definite"));
    }
    let l1 = vec![a11.sqrt(), 0.0];
    let l2 = vec![a12 / a11.sqrt(), (det / a11).sqrt()];
    let lattice = LinearMap::from_columns(&[l1, l2])?;
    // 2σ·λᵢ = aᵢᵢ, i.e. Λᵀσ = (a11/2, a22/2).
    let inv_t = lattice.transpose().inverse().ok_or_else(|| invalid("singular lattice"))?;
    let sigma = inv_t.apply(&[a11 / 2.0, a22 / 2.0]);
    PeriodicFramework::from_geometry(
        vec![vec![0.0, 0.0], sigma],
        lattice,
        &[(0, 1, vec![0, 0]), (0, 1, vec![-1, 0]), (0, 1, vec![0, -1])],
    )
}

/// Honeycomb with vertical ribs and inclined arms; a negative arm angle gives
/// the re-entrant (bow-tie) cells.
fn reentrant_honeycomb(rib: f64, arm: f64, angle: f64) -> Result<PeriodicFramework> {
    if !(rib > 0.0 && arm > 0.0) {
        return Err(invalid("rib and arm lengths must be positive"));
    }
    let (s, c) = angle.sin_cos();
    let lattice = LinearMap::from_columns(&[vec![2.0 * arm * c, 0.0], vec![arm * c, rib + arm * s]])?;
    PeriodicFramework::from_geometry(
        vec![vec![0.0, 0.0], vec![0.0, rib]],
        lattice,
        &[(0, 1, vec![0, 0]), (0, 1, vec![0, -1]), (0, 1, vec![1, -1])],
    )
}

/// Triangulated unit squares linked by two rib orbits, each rib leaving a
/// corner outside the square's opposite wedge so every vertex stays pointed.
fn missing_rib(scale: f64) -> Result<PeriodicFramework> {
    let s = scale;
    let positions = vec![vec![0.0, 0.0], vec![s, 0.0], vec![s, s], vec![0.0, s]];
    let lattice = LinearMap::from_columns(&[vec![2.0 * s, -0.5 * s], vec![0.5 * s, 2.0 * s]])?;
    let z = vec![0, 0];
    PeriodicFramework::from_geometry(
        positions,
        lattice,
        &[
            (0, 1, z.clone()),
            (1, 2, z.clone()),
            (2, 3, z.clone()),
            (3, 0, z.clone()),
            (0, 2, z.clone()),
            (1, 3, vec![1, 0]),
            (2, 0, vec![0, 1]),
        ],
    )
}

/// Bars of the square-pyramid framework joining A to the translates S ± λ₁,
/// S ± λ₂ of the apex S, in the order (S+λ₁, S−λ₁, S+λ₂, S−λ₂).
pub fn pyramid_mechanism_bars() -> [Bar; 4] {
    [(0, 1, vec![-1, 0, -1]), (0, 1, vec![1, 0, -1]), (0, 1, vec![0, -1, -1]), (0, 1, vec![0, 1, -1])]
}

/// The four one-degree-of-freedom mechanisms of the square-pyramid framework:
/// three of the four bars to S ± λₖ, leaving free in turn the bar to
/// S−λ₁, S+λ₁, S−λ₂ and S+λ₂.
pub fn pyramid_mechanisms() -> Vec<Vec<Bar>> {
    let bars = pyramid_mechanism_bars();
    [1, 0, 3, 2]
        .iter()
        .map(|&free| bars.iter().enumerate().filter(|(i, _)| *i != free).map(|(_, b)| b.clone()).collect())
        .collect()
}

/// Square-pyramid framework: O at the origin, A = α joined to the rectangle
/// O, P = 2α₁e₁, Q, R = 2α₂e₂ by unit bars and to S = β.
fn pyramid(p: &Params) -> Result<PeriodicFramework> {
    let alpha = vec![p["a1"], p["a2"], p["a3"]];
    let beta = vec![p["b1"], p["b2"], p["b3"]];
    let lattice = LinearMap::from_columns(&[vec![2.0 * alpha[0], 0.0, 0.0], vec![0.0, 2.0 * alpha[1], 0.0], beta])?;
    PeriodicFramework::from_geometry(
        vec![vec![0.0; 3], alpha],
        lattice,
        &[
            (0, 1, vec![0, 0, 0]),
            (0, 1, vec![-1, 0, 0]),
            (0, 1, vec![-1, -1, 0]),
            (0, 1, vec![0, -1, 0]),
            (0, 1, vec![0, 0, -1]),
        ],
    )
}

/// Two-orbit design: a black orbit on the lattice points and one white vertex
/// at `white`, barred to the black vertices at the listed periods.
fn star_design(lattice: LinearMap, white: Vec<f64>, blacks: &[[i64; 3]]) -> Result<PeriodicFramework> {
    let bars: Vec<_> = blacks.iter().map(|g| (0, 1, g.iter().map(|x| -x).collect())).collect();
    PeriodicFramework::from_geometry(vec![vec![0.0; 3], white], lattice, &bars)
}

fn regular_tetra_generators(s: f64) -> [Vec<f64>; 3] {
    [
        vec![s, 0.0, 0.0],
        vec![0.5 * s, 3f64.sqrt() / 2.0 * s, 0.0],
        vec![0.5 * s, 3f64.sqrt() / 6.0 * s, (2.0f64 / 3.0).sqrt() * s],
    ]
}

fn centroid(points: &[Vec<f64>], count: f64) -> Vec<f64> {
    (0..3).map(|k| points.iter().map(|p| p[k]).sum::<f64>() / count).collect()
}

fn tetra(s: f64) -> Result<PeriodicFramework> {
    let g = regular_tetra_generators(s);
    let white = centroid(&g, 4.0);
    star_design(LinearMap::from_columns(&g)?, white, &[[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
}

fn prism(s: f64) -> Result<PeriodicFramework> {
    let g = [vec![s, 0.0, 0.0], vec![0.5 * s, 3f64.sqrt() / 2.0 * s, 0.0], vec![0.0, 0.0, s]];
    let white = vec![(g[0][0] + g[1][0]) / 3.0, (g[0][1] + g[1][1]) / 3.0, 0.5 * s];
    star_design(
        LinearMap::from_columns(&g)?,
        white,
        &[[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [0, 1, 1]],
    )
}

fn cube(s: f64) -> Result<PeriodicFramework> {
    let mut blacks = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                blacks.push([x, y, z]);
            }
        }
    }
    star_design(LinearMap::identity(3).scale(s), vec![0.5 * s; 3], &blacks)
}

/// Lattice spanned by the apex-to-base edges of a regular square pyramid.
/// Bars go to the four base corners and to the midpoints of the sides of the
/// doubled base.
fn doubled_pyramid(s: f64, inner_height: f64) -> Result<PeriodicFramework> {
    if !(inner_height > 0.0 && inner_height < 1.0) {
        return Err(invalid("inner_height must lie in (0, 1)"));
    }
    let h = s / 2f64.sqrt();
    let u1 = vec![-0.5 * s, -0.5 * s, h];
    let u2 = vec![0.5 * s, -0.5 * s, h];
    let u4 = vec![-0.5 * s, 0.5 * s, h];
    let white = vec![0.0, 0.0, inner_height * h];
    star_design(
        LinearMap::from_columns(&[u1, u2, u4])?,
        white,
        &[[1, 0, 0], [0, 1, 0], [-1, 1, 1], [0, 0, 1], [1, 1, 0], [-1, 2, 1], [-1, 1, 2], [1, 0, 1]],
    )
}

fn doubled_tetra(s: f64) -> Result<PeriodicFramework> {
    let g = regular_tetra_generators(s);
    let white = centroid(&g, 4.0);
    star_design(
        LinearMap::from_columns(&g)?,
        white,
        &[[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0, 1, 1], [1, 0, 1]],
    )
}
