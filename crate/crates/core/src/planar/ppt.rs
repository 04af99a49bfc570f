use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::crossing::{edge_conflicts, is_noncrossing};
use super::faces::classify_faces;
use super::star::{is_framework_pointed, is_pointed, vertex_star};
use crate::error::{invalid, Error, Result};
use crate::framework::{int_box, norm, Bar, EdgeOrbit, PeriodicFramework};
use crate::symcone::LinearMap;

/// Initial bound on ‖γ‖∞ for candidate bars.
pub const DEFAULT_CANDIDATE_RADIUS: u32 = 2;
/// Largest bound tried before the generator gives up.
pub const MAX_CANDIDATE_RADIUS: u32 = 4;

/// Periodic pointed pseudo-triangulation test: non-crossing, pointed at every
/// vertex, every face a pseudo-triangle and m = 2n. False for d ≠ 2.
pub fn is_ppt(f: &PeriodicFramework) -> bool {
    if f.dim() != 2 || f.m() != 2 * f.n() || !f.is_valid() {
        return false;
    }
    if !matches!(is_noncrossing(f, 1), Ok(true)) || !is_framework_pointed(f) {
        return false;
    }
    match classify_faces(f) {
        Ok(faces) => faces.iter().all(|face| face.pseudo_triangle),
        Err(_) => false,
    }
}

/// All bars with ‖γ‖∞ ≤ radius that `f` does not already contain, in
/// canonical form and deterministic order.
pub fn candidate_bars(f: &PeriodicFramework, radius: u32) -> Vec<Bar> {
    let present: BTreeSet<_> = f.edge_signature().into_iter().collect();
    let mut out = BTreeSet::new();
    for u in 0..f.n() {
        for v in u..f.n() {
            for g in int_box(2, radius as i64) {
                if u == v && g.iter().all(|&x| x == 0) {
                    continue;
                }
                let key = EdgeOrbit::new(u, v, g, 0.0).key();
                if !present.contains(&key) {
                    out.insert(key);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Whether inserting the bar keeps `f` pointed at both ends and free of
/// crossings.
pub fn is_insertable(f: &PeriodicFramework, bar: &Bar) -> bool {
    let e = EdgeOrbit::new(bar.0, bar.1, bar.2.clone(), 0.0);
    if f.edges().iter().any(|o| o.same_bar(&e)) {
        return false;
    }
    let len = norm(&f.edge_vector(&e));
    if !(len > 1e-12) {
        return false;
    }
    let g = f.with_bar(bar.0, bar.1, bar.2.clone());
    let pointed_at = |v: usize| matches!(vertex_star(&g, v), Some(Ok(s)) if is_pointed(&s));
    if !pointed_at(e.u) || !pointed_at(e.v) {
        return false;
    }
    !edge_conflicts(f, &EdgeOrbit { length: len, ..e }, 1)
}

fn check_points(lattice: &LinearMap, points: &[Vec<f64>]) -> Result<LinearMap> {
    if lattice.dim() != 2 {
        return Err(Error::DimensionError { expected: 2, got: lattice.dim() });
    }
    let inv = lattice.inverse().ok_or_else(|| invalid("lattice basis is singular"))?;
    if points.is_empty() {
        return Err(invalid("at least one point is required"));
    }
    let frac: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            if p.len() != 2 {
                return Err(Error::DimensionError { expected: 2, got: p.len() });
            }
            Ok(inv.apply(p))
        })
        .collect::<Result<_>>()?;
    for i in 0..frac.len() {
        for j in 0..i {
            let same = (0..2).all(|k| {
                let d = frac[i][k] - frac[j][k];
                (d - d.round()).abs() < 1e-9
            });
            if same {
                return Err(invalid(format!("points {j} and {i} coincide modulo the lattice")));
            }
        }
    }
    Ok(inv)
}

/// Random insertion of bars until none can be added, starting from the bars
/// already present in `f`. The candidate radius grows from 2 to 4 when the
/// pool is exhausted early.
pub fn complete_ppt(f: &PeriodicFramework, seed: u64) -> Result<PeriodicFramework> {
    check_points(&f.lattice, &f.positions)?;
    if !matches!(is_noncrossing(f, 1), Ok(true)) || !is_framework_pointed(f) {
        return Err(invalid("the starting framework must be pointed and non-crossing"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = f.clone();
    let target = 2 * cur.n();
    let mut radius = DEFAULT_CANDIDATE_RADIUS;
    loop {
        let mut pool = candidate_bars(&cur, radius);
        pool.shuffle(&mut rng);
        if let Some(bar) = pool.into_iter().find(|b| is_insertable(&cur, b)) {
            cur = cur.with_bar(bar.0, bar.1, bar.2);
            continue;
        }
        if cur.m() == target {
            return Ok(cur);
        }
        if cur.m() > target {
            return Err(invalid(format!("generator inserted {} bars, more than 2n = {target}", cur.m())));
        }
        if radius >= MAX_CANDIDATE_RADIUS {
            return Err(Error::GeneratorStalled { edges: cur.m(), target });
        }
        radius += 1;
    }
}

/// Random periodic pointed pseudo-triangulation on the given points.
pub fn generate_ppt(lattice: &LinearMap, points: &[Vec<f64>], seed: u64) -> Result<PeriodicFramework> {
    check_points(lattice, points)?;
    let f = PeriodicFramework::from_geometry(points.to_vec(), lattice.clone(), &[])?;
    complete_ppt(&f, seed)
}

/// Random pseudo-triangulation on `n` vertex orbits placed at uniform
/// fractional coordinates in the unit cell. The same seed drives the point
/// placement and the bar insertion order.
pub fn random_ppt(lattice: &LinearMap, n: usize, seed: u64) -> Result<PeriodicFramework> {
    if lattice.dim() != 2 {
        return Err(Error::DimensionError { expected: 2, got: lattice.dim() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n).map(|_| lattice.apply(&[rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])).collect();
    generate_ppt(lattice, &points, rng.gen())
}

/// All completions of `f` to a pseudo-triangulation using bars with
/// ‖γ‖∞ ≤ `candidate_radius`. Complete only up to that radius.
pub fn enumerate_refinements(f: &PeriodicFramework, candidate_radius: u32) -> Result<Vec<PeriodicFramework>> {
    if f.dim() != 2 {
        return Err(Error::DimensionError { expected: 2, got: f.dim() });
    }
    if !is_noncrossing(f, 1)? || !is_framework_pointed(f) {
        return Err(invalid("refinements need a pointed non-crossing framework"));
    }
    // Insertability only shrinks as bars are added, so every candidate that
    // can ever be used is insertable now, and increasing-index search visits
    // each bar set once.
    let pool: Vec<Bar> = candidate_bars(f, candidate_radius).into_iter().filter(|b| is_insertable(f, b)).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    search(f, &pool, 0, &mut seen, &mut out);
    Ok(out)
}

fn search(
    cur: &PeriodicFramework,
    pool: &[Bar],
    start: usize,
    seen: &mut BTreeSet<Vec<(usize, usize, Vec<i64>)>>,
    out: &mut Vec<PeriodicFramework>,
) {
    let insertable: Vec<usize> = (0..pool.len()).filter(|&i| is_insertable(cur, &pool[i])).collect();
    if insertable.is_empty() {
        if is_ppt(cur) && seen.insert(cur.edge_signature()) {
            out.push(cur.clone());
        }
        return;
    }
    for i in insertable.into_iter().filter(|&i| i >= start) {
        let b = &pool[i];
        search(&cur.with_bar(b.0, b.1, b.2.clone()), pool, i + 1, seen, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{catalog, CatalogId, CatalogKind};

    #[test]
    fn generated_frameworks_are_ppts() {
        let points = vec![vec![0.13, 0.21], vec![0.58, 0.37], vec![0.31, 0.74]];
        for seed in 0..5 {
            let f = generate_ppt(&LinearMap::identity(2), &points, seed).unwrap();
            assert_eq!(f.m(), 6);
            assert!(is_ppt(&f));
            assert_eq!(f.dof().unwrap(), 1);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let points = vec![vec![0.13, 0.21], vec![0.58, 0.37]];
        let a = generate_ppt(&LinearMap::identity(2), &points, 9).unwrap();
        let b = generate_ppt(&LinearMap::identity(2), &points, 9).unwrap();
        assert_eq!(a.edge_signature(), b.edge_signature());
    }

    #[test]
    fn single_orbit_cannot_be_pointed() {
        let r = generate_ppt(&LinearMap::identity(2), &[vec![0.0, 0.0]], 1);
        assert_eq!(r, Err(Error::GeneratorStalled { edges: 0, target: 2 }));
    }

    #[test]
    fn coincident_points_rejected() {
        assert!(generate_ppt(&LinearMap::identity(2), &[vec![0.1, 0.1], vec![1.1, 0.1]], 0).is_err());
    }

    #[test]
    fn reentrant_completions() {
        let f = catalog(&CatalogId::new(CatalogKind::ReentrantHoneycomb)).unwrap();
        assert!(!is_ppt(&f));
        let refs = enumerate_refinements(&f, 2).unwrap();
        assert_eq!(refs.len(), 2);
        for r in &refs {
            assert!(is_ppt(r));
            assert_eq!(r.m(), 4);
        }
        for seed in 0..4 {
            let g = complete_ppt(&f, seed).unwrap();
            assert!(refs.iter().any(|r| r.edge_signature() == g.edge_signature()));
        }
    }

    #[test]
    fn relaxed_reentrant_completions() {
        let f = catalog(&CatalogId::new(CatalogKind::ReentrantHoneycombRelaxed)).unwrap();
        let refs = enumerate_refinements(&f, 2).unwrap();
        assert_eq!(refs.len(), 4);
    }

    #[test]
    fn ppt_refines_only_to_itself() {
        let points = vec![vec![0.13, 0.21], vec![0.58, 0.37]];
        let f = generate_ppt(&LinearMap::identity(2), &points, 3).unwrap();
        let refs = enumerate_refinements(&f, 2).unwrap();
        assert_eq!(refs.len(), 1);
        assert_eq!(refs[0].edge_signature(), f.edge_signature());
    }
}
