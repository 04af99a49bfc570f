//! Drawings of frameworks: SVG for planar ones and an OBJ line set for
//! frameworks in space.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{invalid, Error, Result};
use crate::framework::{int_box, PeriodicFramework};

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const DRAWING_SIZE: f64 = 480.0;
const MARGIN: f64 = 20.0;

/// Six-decimal fixed notation without negative zero.
fn fx(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn translates(dim: usize, copies: usize) -> Vec<Vec<i64>> {
    let k = copies as i64;
    int_box(dim, k).into_iter().filter(|g| g.iter().all(|&x| (0..k).contains(&x))).collect()
}

fn shifted(g: &[i64], d: &[i64]) -> Vec<i64> {
    g.iter().zip(d).map(|(a, b)| a + b).collect()
}

/// SVG 1.1 drawing of `copies × copies` translates of the unit cell. Each
/// translate is one `<g>` holding its bars then its vertex disks, colored by
/// vertex orbit; the base cell is outlined.
pub fn render_svg(f: &PeriodicFramework, copies: usize) -> Result<String> {
    if f.dim() != 2 {
        return Err(Error::DimensionError { expected: 2, got: f.dim() });
    }
    if copies == 0 {
        return Err(invalid("at least one copy is required"));
    }
    let cells = translates(2, copies);
    let mut segments = Vec::new();
    let mut disks = Vec::new();
    for d in &cells {
        let segs: Vec<(Vec<f64>, Vec<f64>)> =
            f.edges().iter().map(|e| (f.point(e.u, d), f.point(e.v, &shifted(&e.gamma, d)))).collect();
        let pts: Vec<Vec<f64>> = (0..f.n()).map(|v| f.point(v, d)).collect();
        segments.push(segs);
        disks.push(pts);
    }
    let outline: Vec<Vec<f64>> = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]].iter().map(|c| f.lattice.apply(c)).collect();

    let all = segments.iter().flatten().flat_map(|(a, b)| [a, b]).chain(disks.iter().flatten()).chain(outline.iter());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let scale = if span > 0.0 { DRAWING_SIZE / span } else { 100.0 };
    let width = (hi[0] - lo[0]) * scale + 2.0 * MARGIN;
    let height = (hi[1] - lo[1]) * scale + 2.0 * MARGIN;
    let map = |p: &[f64]| ((p[0] - lo[0]) * scale + MARGIN, (hi[1] - p[1]) * scale + MARGIN);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = fx(width),
        h = fx(height)
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>", fx(width), fx(height));
    let pts: Vec<String> = outline.iter().map(|p| {
        let (x, y) = map(p);
        format!("{},{}", fx(x), fx(y))
    }).collect();
    let _ = writeln!(
        s,
        "<polygon points=\"{}\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>",
        pts.join(" ")
    );
    for ((d, segs), pts) in cells.iter().zip(&segments).zip(&disks) {
        let _ = writeln!(s, "<g id=\"cell_{}_{}\">", d[0], d[1]);
        for (a, b) in segs {
            let (x1, y1) = map(a);
            let (x2, y2) = map(b);
            let _ = writeln!(
                s,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"2\"/>",
                fx(x1),
                fx(y1),
                fx(x2),
                fx(y2)
            );
        }
        for (v, p) in pts.iter().enumerate() {
            let (x, y) = map(p);
            let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{}\"/>", fx(x), fx(y), PALETTE[v % PALETTE.len()]);
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// OBJ line set of `copies^d` translates: `v` records for vertex copies
/// (three coordinates, padded with zeros below d = 3) and one `l` record per
/// bar copy.
pub fn export_obj(f: &PeriodicFramework, copies: usize) -> Result<String> {
    let d = f.dim();
    if d > 3 {
        return Err(Error::DimensionError { expected: 3, got: d });
    }
    if copies == 0 {
        return Err(invalid("at least one copy is required"));
    }
    let mut ids: BTreeMap<(Vec<i64>, usize), usize> = BTreeMap::new();
    let mut order: Vec<Vec<f64>> = Vec::new();
    let mut id_of = |v: usize, cell: Vec<i64>| {
        let next = ids.len() + 1;
        *ids.entry((cell.clone(), v)).or_insert_with(|| {
            order.push(f.point(v, &cell));
            next
        })
    };
    let cells = translates(d, copies);
    for c in &cells {
        for v in 0..f.n() {
            id_of(v, c.clone());
        }
    }
    let mut lines = Vec::new();
    for c in &cells {
        for e in f.edges() {
            let a = id_of(e.u, c.clone());
            let b = id_of(e.v, shifted(&e.gamma, c));
            lines.push((a, b));
        }
    }
    let mut s = String::from("# periodic framework line set\n");
    for p in &order {
        let coord = |k: usize| fx(p.get(k).copied().unwrap_or(0.0));
        let _ = writeln!(s, "v {} {} {}", coord(0), coord(1), coord(2));
    }
    for (a, b) in lines {
        let _ = writeln!(s, "l {a} {b}");
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{catalog, CatalogId, CatalogKind};
    use crate::symcone::LinearMap;

    fn count(s: &str, tag: &str) -> usize {
        s.matches(tag).count()
    }

    #[test]
    fn reentrant_two_copies() {
        let f = catalog(&CatalogId::new(CatalogKind::ReentrantHoneycomb)).unwrap();
        let svg = render_svg(&f, 2).unwrap();
        assert_eq!(count(&svg, "<circle"), 8);
        assert_eq!(count(&svg, "<line"), 12);
        assert_eq!(count(&svg, "<g "), 4);
        assert_eq!(count(&svg, "<polygon"), 1);
        assert_eq!(count(&svg, "fill=\"#1f77b4\""), 4);
        assert_eq!(count(&svg, "fill=\"#d62728\""), 4);
        assert_eq!(svg, render_svg(&f, 2).unwrap());
    }

    #[test]
    fn bare_vertices_draw_disks_only() {
        let f = PeriodicFramework::from_geometry(vec![vec![0.2, 0.3]], LinearMap::identity(2), &[]).unwrap();
        let svg = render_svg(&f, 1).unwrap();
        assert_eq!(count(&svg, "<circle"), 1);
        assert_eq!(count(&svg, "<line"), 0);
        assert_eq!(count(&svg, "<rect"), 1);
    }

    #[test]
    fn svg_needs_the_plane() {
        let f = catalog(&CatalogId::new(CatalogKind::Pyramid3D)).unwrap();
        assert!(matches!(render_svg(&f, 1), Err(Error::DimensionError { .. })));
    }

    #[test]
    fn obj_line_set() {
        let f = catalog(&CatalogId::new(CatalogKind::Pyramid3D)).unwrap();
        let obj = export_obj(&f, 1).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), f.m());
        assert!(obj.lines().filter(|l| l.starts_with("v ")).count() >= f.n());
    }

    #[test]
    fn no_negative_zero() {
        assert_eq!(fx(-0.0000001), "0.000000");
        assert_eq!(fx(-1.5), "-1.500000");
    }
}
