//! Browser bindings: each exported function returns a JSON object with an
//! `svg` drawing (when there is one) and a plain-text `report`.

use std::fmt::Write;

use auxetica::deformation::{auxetic_cone, DEFAULT_CONE_BUDGET};
use auxetica::framework::{catalog, CatalogId, CatalogKind, PeriodicFramework};
use auxetica::planar::{is_ppt, random_ppt};
use auxetica::render::render_svg;
use auxetica::study3d::{cayley_nodes, cone_inclusion_check, expansive_rays, quartic_f, StudyPoint, A0, DEFAULT_R2};
use auxetica::symcone::LinearMap;
use wasm_bindgen::prelude::*;

const CONE_TOL: f64 = 1e-9;

fn fmt(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn response(svg: Option<&str>, report: &str) -> String {
    match svg {
        Some(svg) => format!("{{\"svg\":{},\"report\":{}}}", json_string(svg), json_string(report)),
        None => format!("{{\"report\":{}}}", json_string(report)),
    }
}

fn cone_report(f: &PeriodicFramework, out: &mut String) {
    match auxetic_cone(f, CONE_TOL, DEFAULT_CONE_BUDGET) {
        Ok(r) => {
            let _ = writeln!(out, "degrees of freedom: {}", r.tangent_dim);
            let _ = writeln!(out, "auxetic cone: {:?}", r.verdict);
            let _ = writeln!(out, "best smallest eigenvalue: {}", fmt(r.best_value));
        }
        Err(e) => {
            let _ = writeln!(out, "auxetic cone: {e}");
        }
    }
}

/// Draws a planar catalog framework and decides its auxetic cone.
/// `params` is a comma-separated list of `key=value` overrides.
pub fn catalog_view(id: &str, params: &str, copies: usize) -> Result<String, String> {
    let kind: CatalogKind = id.parse().map_err(|e: auxetica::Error| e.to_string())?;
    let mut cid = CatalogId::new(kind);
    for kv in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("parameter `{kv}` must be key=value"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("parameter `{k}` needs a number"))?;
        cid = cid.with(k.trim(), v);
    }
    let f = catalog(&cid).map_err(|e| e.to_string())?;
    let svg = render_svg(&f, copies).map_err(|e| e.to_string())?;
    let mut report = String::new();
    let _ = writeln!(report, "{}: {} vertex orbits, {} edge orbits", kind, f.n(), f.m());
    cone_report(&f, &mut report);
    Ok(response(Some(&svg), &report))
}

/// Generates a random pseudo-triangulation on a lattice given as
/// `x1,y1,x2,y2` and draws it.
pub fn ppt_view(lattice: &str, n: usize, seed: u64, copies: usize) -> Result<String, String> {
    let v: Vec<f64> = lattice
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("`{x}` is not a number")))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err("the lattice needs four numbers x1,y1,x2,y2".into());
    }
    let l = LinearMap::from_columns(&[v[0..2].to_vec(), v[2..4].to_vec()]).map_err(|e| e.to_string())?;
    let f = random_ppt(&l, n, seed).map_err(|e| e.to_string())?;
    let svg = render_svg(&f, copies).map_err(|e| e.to_string())?;
    let mut report = String::new();
    let _ = writeln!(report, "{} vertex orbits, {} edge orbits", f.n(), f.m());
    let _ = writeln!(report, "pseudo-triangulation: {}", is_ppt(&f));
    cone_report(&f, &mut report);
    Ok(response(Some(&svg), &report))
}

/// Quartic value, nodes, rays and the cone comparison at a point of the
/// four-parameter pyramid family; an empty string means the initial point.
pub fn study3d_view(at: &str, samples: usize) -> Result<String, String> {
    let a: [f64; 5] = if at.trim().is_empty() {
        A0
    } else {
        let v: Vec<f64> = at
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| format!("`{x}` is not a number")))
            .collect::<Result<_, _>>()?;
        v.try_into().map_err(|_| "the point needs five numbers".to_string())?
    };
    let p = StudyPoint::new(a, DEFAULT_R2);
    let mut report = String::new();
    let _ = writeln!(report, "f = {}", fmt(quartic_f(&p)));
    let row = |v: &[f64; 5]| v.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(" : ");
    for (i, n) in cayley_nodes(&p).map_err(|e| e.to_string())?.iter().enumerate() {
        let _ = writeln!(report, "node {}: ({})", i + 1, row(&n.v));
    }
    for (i, r) in expansive_rays(&p).map_err(|e| e.to_string())?.iter().enumerate() {
        let _ = writeln!(report, "ray {}: ({})", i + 1, row(&r.v));
    }
    match cone_inclusion_check(&p, samples) {
        Ok(r) => {
            let _ = writeln!(report, "expansive cone inside auxetic cone: yes");
            let _ = writeln!(report, "sampled auxetic but not expansive: {} of {}", r.strict_gap, r.random_directions);
        }
        Err(e) => {
            let _ = writeln!(report, "expansive cone inside auxetic cone: no ({e})");
        }
    }
    Ok(response(None, &report))
}

#[wasm_bindgen(js_name = catalogView)]
pub fn catalog_view_js(id: &str, params: &str, copies: usize) -> Result<String, JsValue> {
    catalog_view(id, params, copies).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = pptView)]
pub fn ppt_view_js(lattice: &str, n: usize, seed: u64, copies: usize) -> Result<String, JsValue> {
    ppt_view(lattice, n, seed, copies).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = study3dView)]
pub fn study3d_view_js(at: &str, samples: usize) -> Result<String, JsValue> {
    study3d_view(at, samples).map_err(|e| JsValue::from_str(&e))
}
