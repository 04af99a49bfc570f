//! d-periodic bar-and-joint frameworks.
//!
//! A framework is stored through its quotient: one representative position per
//! vertex orbit, a lattice basis Λ whose columns are the images of the period
//! generators, and edge orbits `(u, v, γ)` meaning a bar from the
//! representative of `u` to the translate of `v` by Λγ.

mod catalog;
mod relax;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use catalog::{catalog, CatalogId, CatalogKind, Params};
pub use catalog::{
    honeycomb_equal_edge, pyramid_mechanism_bars, pyramid_mechanisms, silica_gram, silica_gram_derivative,
};
pub(crate) use relax::relaxed_geometry;
pub use relax::{coset_representatives, sublattice_relax};

use crate::error::{invalid, Error, Result};
use crate::symcone::{LinearMap, SymMatrix, MAX_DIM};

/// Relative tolerance on bar lengths for a static framework.
pub const LENGTH_TOL: f64 = 1e-9;

pub type Point = Vec<f64>;

/// A bar given combinatorially as `(u, v, γ)`.
pub type Bar = (usize, usize, Vec<i64>);

/// One orbit of edges: a bar from vertex orbit `u` (cell 0) to vertex orbit
/// `v` translated by the period `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeOrbit {
    pub u: usize,
    pub v: usize,
    pub gamma: Vec<i64>,
    pub length: f64,
}

pub(crate) fn lex_positive(g: &[i64]) -> bool {
    g.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

impl EdgeOrbit {
    /// Builds an edge orbit in canonical orientation: `u ≤ v`, and a
    /// lexicographically positive γ when `u == v`.
    pub fn new(u: usize, v: usize, gamma: Vec<i64>, length: f64) -> Self {
        let flip = u > v || (u == v && !lex_positive(&gamma) && gamma.iter().any(|&x| x != 0));
        if flip {
            EdgeOrbit { u: v, v: u, gamma: gamma.iter().map(|x| -x).collect(), length }
        } else {
            EdgeOrbit { u, v, gamma, length }
        }
    }

    /// Same bar, orientation reversed. Not canonical in general.
    pub fn reversed(&self) -> Self {
        EdgeOrbit { u: self.v, v: self.u, gamma: self.gamma.iter().map(|x| -x).collect(), length: self.length }
    }

    /// Combinatorial key `(u, v, γ)` used for equality and ordering.
    pub fn key(&self) -> (usize, usize, Vec<i64>) {
        (self.u, self.v, self.gamma.clone())
    }

    pub fn same_bar(&self, other: &EdgeOrbit) -> bool {
        self.key() == other.key() || self.reversed().key() == other.key()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientGraph {
    pub dim: usize,
    pub n_vertex_orbits: usize,
    pub edges: Vec<EdgeOrbit>,
}

/// A failed framework invariant, as reported by [`PeriodicFramework::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DimensionMismatch(String),
    NonFinite(String),
    DegenerateLattice,
    VertexOutOfRange { edge: usize },
    SelfLoop { edge: usize },
    NonPositiveLength { edge: usize },
    DuplicateEdge { edge: usize, first: usize },
    EdgeLengthMismatch { edge: usize, expected: f64, actual: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Violation::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Violation::DegenerateLattice => write!(f, "lattice basis is singular"),
            Violation::VertexOutOfRange { edge } => write!(f, "edge {edge} references a missing vertex orbit"),
            Violation::SelfLoop { edge } => write!(f, "edge {edge} joins a vertex to itself"),
            Violation::NonPositiveLength { edge } => write!(f, "edge {edge} has non-positive length"),
            Violation::DuplicateEdge { edge, first } => write!(f, "edge {edge} duplicates edge {first}"),
            Violation::EdgeLengthMismatch { edge, expected, actual } => {
                write!(f, "edge {edge} has length {actual} but bar length is {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicFramework {
    pub graph: QuotientGraph,
    pub positions: Vec<Point>,
    pub lattice: LinearMap,
}

/// A pair of vertices `(u at cell 0, v at cell γ)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairId {
    pub u: usize,
    pub v: usize,
    pub gamma: Vec<i64>,
}

impl fmt::Display for PairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} -> {} @ {:?})", self.u, self.v, self.gamma)
    }
}

/// All integer vectors of length `dim` with every entry in `-radius..=radius`,
/// in lexicographic order.
pub fn int_box(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * (2 * radius as usize + 1));
        for prefix in &out {
            for x in -radius..=radius {
                let mut g = prefix.clone();
                g.push(x);
                next.push(g);
            }
        }
        out = next;
    }
    out
}

impl PeriodicFramework {
    /// Creates a framework, filling each bar length from the geometry.
    pub fn from_geometry(
        positions: Vec<Point>,
        lattice: LinearMap,
        bars: &[Bar],
    ) -> Result<Self> {
        let dim = lattice.dim();
        if positions.iter().any(|p| p.len() != dim) {
            return Err(invalid("position dimension does not match lattice"));
        }
        let mut f = PeriodicFramework {
            graph: QuotientGraph { dim, n_vertex_orbits: positions.len(), edges: Vec::new() },
            positions,
            lattice,
        };
        for (u, v, g) in bars {
            if *u >= f.n() || *v >= f.n() || g.len() != dim {
                return Err(invalid(format!("bar ({u}, {v}, {g:?}) is malformed")));
            }
            let e = EdgeOrbit::new(*u, *v, g.clone(), 0.0);
            let len = norm(&f.edge_vector(&e));
            f.graph.edges.push(EdgeOrbit { length: len, ..e });
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.graph.dim
    }

    pub fn n(&self) -> usize {
        self.graph.n_vertex_orbits
    }

    pub fn m(&self) -> usize {
        self.graph.edges.len()
    }

    pub fn edges(&self) -> &[EdgeOrbit] {
        &self.graph.edges
    }

    /// Position of vertex orbit `v` translated by γ.
    pub fn point(&self, v: usize, gamma: &[i64]) -> Point {
        let t = self.lattice.apply_int(gamma);
        self.positions[v].iter().zip(t).map(|(a, b)| a + b).collect()
    }

    /// p(v) + Λγ − p(u).
    pub fn edge_vector(&self, e: &EdgeOrbit) -> Vec<f64> {
        let t = self.lattice.apply_int(&e.gamma);
        (0..self.dim()).map(|k| self.positions[e.v][k] + t[k] - self.positions[e.u][k]).collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let d = self.dim();
        let mut out = Vec::new();
        if d == 0 || d > MAX_DIM || self.lattice.dim() != d {
            out.push(Violation::DimensionMismatch("lattice".into()));
            return out;
        }
        if self.positions.len() != self.n() {
            out.push(Violation::DimensionMismatch("vertex count".into()));
            return out;
        }
        if self.positions.iter().any(|p| p.len() != d) {
            out.push(Violation::DimensionMismatch("positions".into()));
            return out;
        }
        if !self.lattice.is_finite() || self.positions.iter().flatten().any(|x| !x.is_finite()) {
            out.push(Violation::NonFinite("geometry".into()));
            return out;
        }
        let det = self.lattice.determinant();
        let scale = self.lattice.as_column_major().iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        if det.abs() <= 1e-12 * scale.powi(d as i32) || scale == 0.0 {
            out.push(Violation::DegenerateLattice);
        }
        for (i, e) in self.edges().iter().enumerate() {
            if e.gamma.len() != d {
                out.push(Violation::DimensionMismatch(format!("edge {i} period")));
                continue;
            }
            if e.u >= self.n() || e.v >= self.n() {
                out.push(Violation::VertexOutOfRange { edge: i });
                continue;
            }
            if e.u == e.v && e.gamma.iter().all(|&x| x == 0) {
                out.push(Violation::SelfLoop { edge: i });
                continue;
            }
            if !(e.length > 0.0) {
                out.push(Violation::NonPositiveLength { edge: i });
                continue;
            }
            if let Some(first) = self.edges()[..i].iter().position(|f| f.same_bar(e)) {
                out.push(Violation::DuplicateEdge { edge: i, first });
            }
            let actual = norm(&self.edge_vector(e));
            if (actual - e.length).abs() > LENGTH_TOL * e.length {
                out.push(Violation::EdgeLengthMismatch { edge: i, expected: e.length, actual });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
            Err(Error::InvalidInput(format!("invalid framework: {}", msgs.join("; "))))
        }
    }

    /// Gram matrix ΛᵀΛ of the lattice generators.
    pub fn gram(&self) -> SymMatrix {
        self.lattice.gram()
    }

    /// Dimension of the local deformation space modulo Euclidean isometries,
    /// assuming a smooth point: dn + d² − rank(J) − d(d+1)/2.
    pub fn dof(&self) -> Result<usize> {
        self.ensure_valid()?;
        let d = self.dim();
        let rank = crate::deformation::jacobian_rank(self);
        let total = d * self.n() + d * d;
        Ok(total.saturating_sub(rank + d * (d + 1) / 2))
    }

    /// Distances between `u` (cell 0) and `v` translated by γ, for `u ≤ v`,
    /// every γ with ‖γ‖∞ ≤ radius, skipping the zero pair `(u, u, 0)`.
    /// Ordered lexicographically in `(u, v, γ)`.
    pub fn pairwise_distances(&self, radius: u32) -> Vec<(PairId, f64)> {
        let cells = int_box(self.dim(), radius as i64);
        let mut out = Vec::new();
        for u in 0..self.n() {
            for v in u..self.n() {
                for g in &cells {
                    if u == v && g.iter().all(|&x| x == 0) {
                        continue;
                    }
                    let a = &self.positions[u];
                    let b = self.point(v, g);
                    let dist = norm(&b.iter().zip(a).map(|(x, y)| x - y).collect::<Vec<_>>());
                    out.push((PairId { u, v, gamma: g.clone() }, dist));
                }
            }
        }
        out
    }

    /// Same framework with new geometry (positions and lattice), keeping the
    /// combinatorics and bar lengths.
    pub fn with_geometry(&self, positions: Vec<Point>, lattice: LinearMap) -> Self {
        PeriodicFramework { graph: self.graph.clone(), positions, lattice }
    }

    /// Canonical combinatorial signature: sorted edge keys.
    pub fn edge_signature(&self) -> Vec<(usize, usize, Vec<i64>)> {
        let mut keys: Vec<_> = self.edges().iter().map(|e| EdgeOrbit::new(e.u, e.v, e.gamma.clone(), 0.0).key()).collect();
        keys.sort();
        keys
    }

    /// Adds a bar whose length is read off the current geometry.
    pub fn with_bar(&self, u: usize, v: usize, gamma: Vec<i64>) -> Self {
        let e = EdgeOrbit::new(u, v, gamma, 0.0);
        let len = norm(&self.edge_vector(&e));
        let mut f = self.clone();
        f.graph.edges.push(EdgeOrbit { length: len, ..e });
        f
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_single() -> PeriodicFramework {
        PeriodicFramework::from_geometry(vec![vec![0.0, 0.0]], LinearMap::identity(2), &[]).unwrap()
    }

    #[test]
    fn edge_canonical_orientation() {
        let e = EdgeOrbit::new(2, 1, vec![1, -1], 1.0);
        assert_eq!((e.u, e.v, e.gamma.clone()), (1, 2, vec![-1, 1]));
        let e = EdgeOrbit::new(0, 0, vec![0, -1], 1.0);
        assert_eq!(e.gamma, vec![0, 1]);
        let e = EdgeOrbit::new(0, 0, vec![-1, 3], 1.0);
        assert_eq!(e.gamma, vec![1, -3]);
    }

    #[test]
    fn degenerate_lattice_is_reported() {
        let mut f = square_single();
        f.lattice = LinearMap::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(f.validate(), vec![Violation::DegenerateLattice]);
    }

    #[test]
    fn mismatched_length_is_reported() {
        let mut f = PeriodicFramework::from_geometry(
            vec![vec![0.0, 0.0], vec![0.5, 0.0]],
            LinearMap::identity(2),
            &[(0, 1, vec![0, 0]), (0, 1, vec![-1, 0])],
        )
        .unwrap();
        assert!(f.validate().is_empty());
        f.graph.edges[1].length *= 1.1;
        assert!(matches!(f.validate()[..], [Violation::EdgeLengthMismatch { edge: 1, .. }]));
    }

    #[test]
    fn self_loop_and_range_violations() {
        let mut f = square_single();
        f.graph.edges.push(EdgeOrbit { u: 0, v: 0, gamma: vec![0, 0], length: 1.0 });
        f.graph.edges.push(EdgeOrbit { u: 0, v: 3, gamma: vec![1, 0], length: 1.0 });
        assert_eq!(f.validate(), vec![Violation::SelfLoop { edge: 0 }, Violation::VertexOutOfRange { edge: 1 }]);
    }

    #[test]
    fn pairwise_distances_single_orbit() {
        let f = square_single();
        assert!(f.pairwise_distances(0).is_empty());
        let d = f.pairwise_distances(1);
        assert_eq!(d.len(), 8);
        let ones = d.iter().filter(|(_, x)| (x - 1.0).abs() < 1e-15).count();
        let diag = d.iter().filter(|(_, x)| (x - 2f64.sqrt()).abs() < 1e-15).count();
        assert_eq!((ones, diag), (4, 4));
        let keys: Vec<_> = d.iter().map(|(p, _)| p.clone()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn int_box_counts() {
        assert_eq!(int_box(2, 1).len(), 9);
        assert_eq!(int_box(3, 2).len(), 125);
        assert_eq!(int_box(2, 0), vec![vec![0, 0]]);
    }
}
