//! Relaxing periodicity to a finite-index sublattice.

use std::collections::BTreeSet;

use super::{EdgeOrbit, PeriodicFramework, Point};
use crate::error::{invalid, Result};
use crate::symcone::LinearMap;

/// Determinant of a square integer matrix by fraction-free elimination.
fn int_det(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Integer sublattice generated by the columns of `basis` (given as rows).
struct Sublattice {
    basis: Vec<Vec<i64>>,
    adjugate: Vec<Vec<i128>>,
    det: i128,
}

impl Sublattice {
    fn new(basis: &[Vec<i64>]) -> Result<Self> {
        let d = basis.len();
        if d == 0 || basis.iter().any(|r| r.len() != d) {
            return Err(invalid("sublattice basis must be a square matrix"));
        }
        let det = int_det(basis);
        if det == 0 {
            return Err(invalid("sublattice basis is singular"));
        }
        let mut adjugate = vec![vec![0i128; d]; d];
        if d == 1 {
            adjugate[0][0] = 1;
        } else {
            for i in 0..d {
                for j in 0..d {
                    let minor: Vec<Vec<i64>> = (0..d)
                        .filter(|&r| r != i)
                        .map(|r| (0..d).filter(|&c| c != j).map(|c| basis[r][c]).collect())
                        .collect();
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    adjugate[j][i] = sign * int_det(&minor);
                }
            }
        }
        Ok(Sublattice { basis: basis.to_vec(), adjugate, det })
    }

    fn index(&self) -> usize {
        self.det.unsigned_abs() as usize
    }

    /// Splits `w = c + Bδ` with `B⁻¹c ∈ [0, 1)^d`; returns `(c, δ)`.
    fn reduce(&self, w: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let d = w.len();
        let (num_sign, den) = if self.det > 0 { (1, self.det) } else { (-1, -self.det) };
        let delta: Vec<i64> = (0..d)
            .map(|k| {
                let num: i128 = (0..d).map(|j| self.adjugate[k][j] * w[j] as i128).sum::<i128>() * num_sign;
                num.div_euclid(den) as i64
            })
            .collect();
        let c = (0..d).map(|k| w[k] - (0..d).map(|j| self.basis[k][j] * delta[j]).sum::<i64>()).collect();
        (c, delta)
    }

    fn representatives(&self) -> Vec<Vec<i64>> {
        let d = self.basis.len();
        let bounds: Vec<i64> = self.basis.iter().map(|r| r.iter().map(|x| x.abs()).sum()).collect();
        let mut reps = BTreeSet::new();
        let mut w = bounds.iter().map(|b| -b).collect::<Vec<_>>();
        loop {
            reps.insert(self.reduce(&w).0);
            if reps.len() == self.index() {
                break;
            }
            let mut k = 0;
            while k < d {
                if w[k] < bounds[k] {
                    w[k] += 1;
                    break;
                }
                w[k] = -bounds[k];
                k += 1;
            }
            if k == d {
                break;
            }
        }
        // Zero coset first, then lexicographic.
        let zero = vec![0; d];
        let mut out = vec![zero.clone()];
        out.extend(reps.into_iter().filter(|c| *c != zero));
        out
    }
}

/// Representatives of Z^d modulo the sublattice spanned by the columns of
/// `basis` (passed row by row), zero coset first.
pub fn coset_representatives(basis: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    Ok(Sublattice::new(basis)?.representatives())
}

/// Positions and lattice of the relaxed framework for the given geometry.
/// Vertex orbit `v` in coset `i` gets index `i·n + v`.
pub(crate) fn relaxed_geometry(
    positions: &[Point],
    lattice: &LinearMap,
    basis: &[Vec<i64>],
    reps: &[Vec<i64>],
) -> Result<(Vec<Point>, LinearMap)> {
    let d = lattice.dim();
    let mut out = Vec::with_capacity(positions.len() * reps.len());
    for c in reps {
        let shift = lattice.apply_int(c);
        for p in positions {
            out.push(p.iter().zip(&shift).map(|(a, b)| a + b).collect());
        }
    }
    let b = LinearMap::from_rows(&basis.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect::<Vec<_>>())?;
    debug_assert_eq!(b.dim(), d);
    Ok((out, lattice.mul(&b)))
}

/// The same infinite framework seen with the coarser period lattice Λ·B.
///
/// `basis` is an integer d×d matrix given row by row; its columns are the new
/// period generators in coordinates of the old ones.
pub fn sublattice_relax(f: &PeriodicFramework, basis: &[Vec<i64>]) -> Result<PeriodicFramework> {
    let d = f.dim();
    if basis.len() != d {
        return Err(invalid(format!("sublattice basis must be {d}x{d}")));
    }
    let sub = Sublattice::new(basis)?;
    let reps = sub.representatives();
    let n = f.n();
    let (positions, lattice) = relaxed_geometry(&f.positions, &f.lattice, basis, &reps)?;
    let mut edges = Vec::with_capacity(f.m() * reps.len());
    for (i, c) in reps.iter().enumerate() {
        for e in f.edges() {
            let w: Vec<i64> = c.iter().zip(&e.gamma).map(|(a, b)| a + b).collect();
            let (target, delta) = sub.reduce(&w);
            let j = reps.iter().position(|r| *r == target).expect("reduced vector is a representative");
            edges.push(EdgeOrbit::new(i * n + e.u, j * n + e.v, delta, e.length));
        }
    }
    Ok(PeriodicFramework {
        graph: super::QuotientGraph { dim: d, n_vertex_orbits: n * reps.len(), edges },
        positions,
        lattice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{catalog, CatalogId, CatalogKind};

    #[test]
    fn determinant_and_cosets() {
        assert_eq!(int_det(&[vec![2, 1], vec![1, 3]]), 5);
        assert_eq!(int_det(&[vec![0, 1], vec![1, 0]]), -1);
        let reps = coset_representatives(&[vec![2, 1], vec![0, 3]]).unwrap();
        assert_eq!(reps.len(), 6);
        assert_eq!(reps[0], vec![0, 0]);
        assert!(coset_representatives(&[vec![1, 2], vec![2, 4]]).is_err());
    }

    #[test]
    fn reentrant_relaxed_counts() {
        let f = catalog(&CatalogId::new(CatalogKind::ReentrantHoneycomb)).unwrap();
        let r = sublattice_relax(&f, &[vec![1, 0], vec![0, 2]]).unwrap();
        assert_eq!((r.n(), r.m()), (4, 6));
        assert!(r.is_valid());
    }

    #[test]
    fn cube_relaxed_counts() {
        let f = catalog(&CatalogId::new(CatalogKind::Cube3D)).unwrap();
        let r = sublattice_relax(&f, &[vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!((r.n(), r.m()), (4, 16));
        assert!(r.is_valid());
    }

    #[test]
    fn identity_basis_is_a_no_op() {
        let f = catalog(&CatalogId::new(CatalogKind::HoneycombEqualEdge)).unwrap();
        let r = sublattice_relax(&f, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(r.edge_signature(), f.edge_signature());
        assert_eq!(r.positions, f.positions);
    }

    #[test]
    fn point_set_is_unchanged() {
        let f = catalog(&CatalogId::new(CatalogKind::HoneycombEqualEdge)).unwrap();
        let r = sublattice_relax(&f, &[vec![1, 1], vec![-1, 1]]).unwrap();
        for i in 0..r.n() {
            let p = &r.positions[i];
            // Every relaxed vertex is some old vertex translated by an old period.
            let found = (0..f.n()).any(|v| {
                crate::framework::int_box(2, 2).iter().any(|g| {
                    let q = f.point(v, g);
                    q.iter().zip(p).all(|(a, b)| (a - b).abs() < 1e-12)
                })
            });
            assert!(found);
        }
        assert!(r.is_valid());
    }
}
