use crate::error::{Error, Result};
use crate::framework::{EdgeOrbit, PeriodicFramework};

type P2 = [f64; 2];

/// A bar representative as a segment in the plane.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub a: P2,
    pub b: P2,
}

fn sub(p: P2, q: P2) -> P2 {
    [p[0] - q[0], p[1] - q[1]]
}

fn cross(p: P2, q: P2) -> f64 {
    p[0] * q[1] - p[1] * q[0]
}

fn dot(p: P2, q: P2) -> f64 {
    p[0] * q[0] + p[1] * q[1]
}

fn same_point(p: P2, q: P2, eps: f64) -> bool {
    (p[0] - q[0]).abs() <= eps && (p[1] - q[1]).abs() <= eps
}

/// Sign of the turn a → b → c with a tolerance relative to the lengths.
fn orient(a: P2, b: P2, c: P2, eps: f64) -> i8 {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let v = cross(ab, ac);
    let scale = ab[0].hypot(ab[1]) * ac[0].hypot(ac[1]);
    if v.abs() <= eps * scale.max(f64::MIN_POSITIVE) {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// For a point `c` known to be collinear with segment ab: lies within it.
fn on_segment(a: P2, b: P2, c: P2, eps: f64) -> bool {
    let ab = sub(b, a);
    let t = dot(sub(c, a), ab) / dot(ab, ab);
    t >= -eps && t <= 1.0 + eps
}

/// Whether two segments meet anywhere other than at a single shared endpoint
/// where they leave in different directions.
pub(crate) fn segments_conflict(s: &Segment, t: &Segment) -> bool {
    let scale = [s.a, s.b, t.a, t.b].iter().map(|p| p[0].abs().max(p[1].abs())).fold(1.0, f64::max);
    let eps_pt = 1e-9 * scale;
    let eps = 1e-12;
    let shared: Vec<(P2, P2, P2)> = [(s.a, s.b), (s.b, s.a)]
        .iter()
        .flat_map(|&(p, p_other)| {
            [(t.a, t.b), (t.b, t.a)]
                .into_iter()
                .filter(move |&(q, _)| same_point(p, q, eps_pt))
                .map(move |(_, q_other)| (p, p_other, q_other))
        })
        .collect();
    match shared.len() {
        0 => {}
        1 => {
            // Common endpoint: a conflict only if the bars overlap along a ray.
            let (p, x, y) = shared[0];
            let dx = sub(x, p);
            let dy = sub(y, p);
            return orient(p, x, y, eps) == 0 && dot(dx, dy) > 0.0;
        }
        _ => return true,
    }
    let o1 = orient(s.a, s.b, t.a, eps);
    let o2 = orient(s.a, s.b, t.b, eps);
    let o3 = orient(t.a, t.b, s.a, eps);
    let o4 = orient(t.a, t.b, s.b, eps);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(s.a, s.b, t.a, eps))
        || (o2 == 0 && on_segment(s.a, s.b, t.b, eps))
        || (o3 == 0 && on_segment(t.a, t.b, s.a, eps))
        || (o4 == 0 && on_segment(t.a, t.b, s.b, eps))
}

fn p2(v: &[f64]) -> P2 {
    [v[0], v[1]]
}

pub(crate) fn segment_of(f: &PeriodicFramework, e: &EdgeOrbit, shift: &[i64]) -> Segment {
    let g: Vec<i64> = e.gamma.iter().zip(shift).map(|(a, b)| a + b).collect();
    Segment { a: p2(&f.point(e.u, shift)), b: p2(&f.point(e.v, &g)) }
}

/// Bounds in lattice coordinates of the segment of `e` at zero shift.
fn lattice_box(f: &PeriodicFramework, inv: &crate::symcone::LinearMap, e: &EdgeOrbit) -> ([f64; 2], [f64; 2]) {
    let s = segment_of(f, e, &[0, 0]);
    let a = inv.apply(&s.a);
    let b = inv.apply(&s.b);
    ([a[0].min(b[0]), a[1].min(b[1])], [a[0].max(b[0]), a[1].max(b[1])])
}

/// Integer shifts δ for which the translate of `t` by Λδ may meet `s`, plus
/// every shift with ‖δ‖∞ ≤ radius.
fn candidate_shifts(
    f: &PeriodicFramework,
    inv: &crate::symcone::LinearMap,
    s: &EdgeOrbit,
    t: &EdgeOrbit,
    radius: i64,
) -> Vec<[i64; 2]> {
    let (slo, shi) = lattice_box(f, inv, s);
    let (tlo, thi) = lattice_box(f, inv, t);
    let lo = |k: usize| (slo[k] - thi[k] - 1e-6).ceil() as i64;
    let hi = |k: usize| (shi[k] - tlo[k] + 1e-6).floor() as i64;
    let mut out = Vec::new();
    for x in lo(0).min(-radius)..=hi(0).max(radius) {
        for y in lo(1).min(-radius)..=hi(1).max(radius) {
            let in_box = x >= lo(0) && x <= hi(0) && y >= lo(1) && y <= hi(1);
            if in_box || (x.abs() <= radius && y.abs() <= radius) {
                out.push([x, y]);
            }
        }
    }
    out
}

fn require_planar(f: &PeriodicFramework) -> Result<()> {
    if f.dim() != 2 {
        return Err(Error::DimensionError { expected: 2, got: f.dim() });
    }
    Ok(())
}

/// Whether bar `e` (not yet part of `f`) would meet any bar of `f`, or any
/// translate of itself, away from shared endpoints.
pub(crate) fn edge_conflicts(f: &PeriodicFramework, e: &EdgeOrbit, radius: i64) -> bool {
    let Some(inv) = f.lattice.inverse() else { return true };
    let base = segment_of(f, e, &[0, 0]);
    let hit = |other: &EdgeOrbit, skip_zero: bool| {
        candidate_shifts(f, &inv, e, other, radius).into_iter().any(|d| {
            if skip_zero && d == [0, 0] {
                return false;
            }
            segments_conflict(&base, &segment_of(f, other, &d))
        })
    };
    f.edges().iter().any(|o| hit(o, false)) || hit(e, true)
}

/// True iff no two bar representatives meet except at shared endpoints.
/// Every translate that could reach a bar is examined, which includes all
/// shifts with ‖δ‖∞ ≤ `radius`.
pub fn is_noncrossing(f: &PeriodicFramework, radius: u32) -> Result<bool> {
    require_planar(f)?;
    let Some(inv) = f.lattice.inverse() else { return Ok(false) };
    let edges = f.edges();
    for (i, e) in edges.iter().enumerate() {
        let base = segment_of(f, e, &[0, 0]);
        for (j, o) in edges.iter().enumerate().skip(i) {
            for d in candidate_shifts(f, &inv, e, o, radius as i64) {
                if i == j && d == [0, 0] {
                    continue;
                }
                if segments_conflict(&base, &segment_of(f, o, &d)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
