//! Command-line front end for the `auxetica` library.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use auxetica::deformation::{
    auxetic_cone_seeded, check_expansive, check_path_contraction, check_path_psd, check_volume, integrate_trajectory,
    tangent_space, ConeVerdict, ContractionVerdict, DeformationPath, ExpansiveVerdict, PsdVerdict, Selector,
    VolumeVerdict, DEFAULT_CONE_BUDGET,
};
use auxetica::framework::{catalog, pyramid_mechanisms, Bar, CatalogId, CatalogKind, PairId, PeriodicFramework};
use auxetica::io::{
    framework_to_string, gram_trace_csv, parse_framework, parse_gram_trace, parse_path, path_to_string, FormatError,
    ParseMode,
};
use auxetica::planar::{enumerate_refinements, random_ppt, DEFAULT_CANDIDATE_RADIUS};
use auxetica::render::{export_obj, render_svg};
use auxetica::study3d::{cayley_nodes, cone_inclusion_check, expansive_rays, quartic_f, quartic_gradient, ProjectivePoint5, StudyPoint, A0, DEFAULT_R2};
use auxetica::symcone::LinearMap;
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

/// Environment variable consulted when a randomized command gets no `--seed`.
pub const SEED_ENV: &str = "AUXETICA_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Analysis(#[from] auxetica::Error),
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Analysis(auxetica::Error::Undecided { .. }) => 3,
            _ => 2,
        }
    }
}

/// What a successful command concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Positive,
    Negative,
}

#[derive(Debug, Parser)]
#[command(name = "auxetica", version, about = "Auxetic and expansive analysis of periodic frameworks")]
pub struct Cli {
    /// Exit with status 1 when an analysis verdict is negative.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Reject unknown fields in input files instead of warning.
    #[arg(long, global = true)]
    pub strict_format: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CheckMode {
    Psd,
    Contraction,
    Expansive,
    Volume,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SelectorKind {
    /// Follow the auxetic-cone witness.
    Witness,
    /// Fixed combination of one-dof mechanisms.
    Convex,
    /// The single motion of a one-dof framework.
    OneDof,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summary of a framework file: counts, degrees of freedom, validation.
    Info { file: PathBuf },
    /// Write a catalog framework.
    Catalog {
        id: String,
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write a tilt path of quartz or cristobalite.
    SilicaPath {
        id: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a framework has an auxetic infinitesimal deformation.
    AuxeticCone {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_CONE_BUDGET)]
        budget: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Test path files (or Gram-trace CSV files).
    CheckPath {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = CheckMode::Psd)]
        mode: CheckMode,
        /// Tolerance of the verdict; the auxetic threshold for integrated paths.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 2)]
        radius: u32,
    },
    /// Integrate a deformation trajectory.
    Integrate {
        file: PathBuf,
        #[arg(long, value_enum)]
        selector: SelectorKind,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        h: f64,
        /// Mechanism weights for the convex selector, comma separated.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        /// Extra bars of one mechanism, `u:v:g1,g2[/u:v:...]`; repeat per mechanism.
        #[arg(long = "mechanism")]
        mechanisms: Vec<String>,
        /// Use the four pyramid mechanisms.
        #[arg(long)]
        pyramid_mechanisms: bool,
        /// Pair `u:v:g1,g2` whose distance the one-dof motion increases.
        #[arg(long)]
        orient: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Random periodic pointed pseudo-triangulation.
    GenPpt {
        /// Lattice generators as `x1,y1,x2,y2`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1,0,0,1")]
        lattice: Vec<f64>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Completions of a planar framework to pseudo-triangulations.
    Refinements {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CANDIDATE_RADIUS)]
        radius: u32,
        /// Directory receiving one framework file per refinement.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// The four-parameter pyramid study: quartic, nodes, rays and cone check.
    Study3d {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        at: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_R2)]
        r2: f64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Draw a framework: SVG for d = 2, OBJ line set otherwise.
    Render {
        file: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        obj: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// CSV trace of the Gram curve of a path.
    GramTrace {
        file: PathBuf,
        #[arg(long)]
        csv: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write_out(path: &Option<PathBuf>, text: &str, stdout: &mut String) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            stdout.push_str(text);
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn mode(cli: &Cli) -> ParseMode {
    if cli.strict_format {
        ParseMode::Strict
    } else {
        ParseMode::Lenient
    }
}

struct Ctx<'a> {
    mode: ParseMode,
    stdout: &'a mut String,
    stderr: &'a mut String,
}

impl Ctx<'_> {
    fn load_framework(&mut self, path: &Path) -> Result<PeriodicFramework, CliError> {
        let text = read(path)?;
        let loaded =
            parse_framework(&text, self.mode).map_err(|source| CliError::Format { path: path.display().to_string(), source })?;
        for w in loaded.warnings {
            let _ = writeln!(self.stderr, "warning: {}: {w}", path.display());
        }
        Ok(loaded.value)
    }

    fn load_path(&mut self, path: &Path) -> Result<DeformationPath, CliError> {
        let text = read(path)?;
        let fmt_err = |source| CliError::Format { path: path.display().to_string(), source };
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            return parse_gram_trace(&text).map_err(fmt_err);
        }
        let loaded = parse_path(&text, self.mode).map_err(fmt_err)?;
        for w in loaded.warnings {
            let _ = writeln!(self.stderr, "warning: {}: {w}", path.display());
        }
        Ok(loaded.value)
    }
}

/// Fixed-point rendering with negative zero printed as zero.
pub fn num(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn vec_text(v: &[f64], decimals: usize) -> String {
    v.iter().map(|x| num(*x, decimals)).collect::<Vec<_>>().join(", ")
}

fn projective_text(p: &ProjectivePoint5) -> String {
    format!("({})", p.v.iter().map(|x| num(*x, 10)).collect::<Vec<_>>().join(" : "))
}

fn seed_or_env(seed: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        Err(_) => Err(CliError::Usage(format!("a seed is required: pass --seed or set {SEED_ENV}"))),
    }
}

fn parse_gamma(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| CliError::Usage(format!("`{x}` is not an integer period entry"))))
        .collect()
}

fn parse_bar(s: &str) -> Result<Bar, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [u, v, g] = parts.as_slice() else {
        return Err(CliError::Usage(format!("bar `{s}` must look like u:v:g1,g2")));
    };
    let idx = |x: &str| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("`{x}` is not a vertex index")));
    Ok((idx(u)?, idx(v)?, parse_gamma(g)?))
}

fn parse_params(items: &[String]) -> Result<Vec<(String, f64)>, CliError> {
    items
        .iter()
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Usage(format!("parameter `{kv}` must be K=V")))?;
            let v = v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("parameter `{k}` needs a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn catalog_kind(id: &str) -> Result<CatalogKind, CliError> {
    id.parse::<CatalogKind>().map_err(CliError::from)
}

fn verdict_outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Positive
    } else {
        Outcome::Negative
    }
}

/// Parses `args` (including the program name), runs the command, collects
/// standard output and diagnostics, and returns the process exit status.
pub fn run(args: &[String], stdout: &mut String, stderr: &mut String) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                stderr.push_str(&text);
                2
            } else {
                stdout.push_str(&text);
                0
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(Outcome::Negative) if cli.strict => 1,
        Ok(_) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut String, stderr: &mut String) -> Result<Outcome, CliError> {
    let mut ctx = Ctx { mode: mode(cli), stdout, stderr };
    match &cli.command {
        Command::Info { file } => info(&mut ctx, file),
        Command::Catalog { id, params, out } => {
            let mut cid = CatalogId::new(catalog_kind(id)?);
            for (k, v) in parse_params(params)? {
                cid = cid.with(&k, v);
            }
            let f = catalog(&cid)?;
            let mut meta = BTreeMap::new();
            meta.insert("catalog".to_string(), cid.kind.name().to_string());
            for (k, v) in cid.resolved_params()? {
                meta.insert(format!("param.{k}"), format!("{v}"));
            }
            write_out(out, &framework_to_string(&f, &meta), ctx.stdout)?;
            Ok(Outcome::Positive)
        }
        Command::SilicaPath { id, from, to, samples, out } => {
            let kind = catalog_kind(id)?;
            let p = DeformationPath::silica_tilt(kind, *from, *to, *samples)?;
            let mut meta = BTreeMap::new();
            meta.insert("catalog".to_string(), kind.name().to_string());
            meta.insert("theta_from".to_string(), format!("{from}"));
            meta.insert("theta_to".to_string(), format!("{to}"));
            write_out(out, &path_to_string(&p, &meta), ctx.stdout)?;
            Ok(Outcome::Positive)
        }
        Command::AuxeticCone { file, tol, budget, seed } => {
            let f = ctx.load_framework(file)?;
            let seed = seed.unwrap_or(0x00c0_ffee);
            let report = auxetic_cone_seeded(&f, *tol, *budget, seed)?;
            let out = &mut *ctx.stdout;
            let _ = writeln!(out, "verdict: {:?}", report.verdict);
            let _ = writeln!(out, "tangent_dim: {}", report.tangent_dim);
            let _ = writeln!(out, "image_dim: {}", report.image_dim);
            let _ = writeln!(out, "best_min_eigenvalue: {}", num(report.best_value, 12));
            let _ = writeln!(out, "near_singular: {}", report.near_singular);
            if let Some(g) = &report.witness_gram_velocity {
                for (i, row) in g.to_rows().iter().enumerate() {
                    let _ = writeln!(out, "witness_gram_velocity[{i}]: {}", vec_text(row, 12));
                }
            }
            if let Some(w) = &report.witness {
                let _ = writeln!(out, "witness: {}", vec_text(&w.to_flat(), 12));
            }
            Ok(verdict_outcome(report.verdict != ConeVerdict::TrivialOnly))
        }
        Command::CheckPath { files, mode, tol, radius } => {
            let mut all_ok = true;
            for file in files {
                let p = ctx.load_path(file)?;
                let (ok, text) = match mode {
                    CheckMode::Psd => match check_path_psd(&p, *tol)? {
                        PsdVerdict::Auxetic => (true, "Auxetic".to_string()),
                        PsdVerdict::BoundaryAuxetic => (true, "BoundaryAuxetic".to_string()),
                        PsdVerdict::NotAuxetic { tau } => (false, format!("NotAuxetic tau={}", num(tau, 9))),
                    },
                    CheckMode::Contraction => match check_path_contraction(&p, *tol)? {
                        ContractionVerdict::Auxetic => (true, "Auxetic".to_string()),
                        ContractionVerdict::NotAuxetic { tau1, tau2, norm } => (
                            false,
                            format!("NotAuxetic tau1={} tau2={} norm={}", num(tau1, 9), num(tau2, 9), num(norm, 12)),
                        ),
                    },
                    CheckMode::Expansive => match check_expansive(&p, *radius, *tol)? {
                        ExpansiveVerdict::Expansive => (true, "Expansive".to_string()),
                        ExpansiveVerdict::NotExpansive { pair, tau, before, after } => (
                            false,
                            format!("NotExpansive pair={pair} tau={} before={} after={}", num(tau, 9), num(before, 12), num(after, 12)),
                        ),
                    },
                    CheckMode::Volume => match check_volume(&p)? {
                        VolumeVerdict::NonDecreasing => (true, "NonDecreasing".to_string()),
                        VolumeVerdict::Violation { tau } => (false, format!("Violation tau={}", num(tau, 9))),
                    },
                };
                all_ok &= ok;
                let _ = writeln!(ctx.stdout, "{}: {text}", file.display());
            }
            Ok(verdict_outcome(all_ok))
        }
        Command::Integrate { file, selector, steps, h, weights, mechanisms, pyramid_mechanisms: pyr, orient, out } => {
            let f = ctx.load_framework(file)?;
            let sel = match selector {
                SelectorKind::Witness => Selector::AuxeticWitness,
                SelectorKind::Convex => {
                    let mechs: Vec<Vec<Bar>> = if *pyr {
                        pyramid_mechanisms()
                    } else {
                        mechanisms.iter().map(|m| m.split('/').map(parse_bar).collect()).collect::<Result<_, _>>()?
                    };
                    if mechs.is_empty() {
                        return Err(CliError::Usage("the convex selector needs --mechanism or --pyramid-mechanisms".into()));
                    }
                    let weights = if weights.is_empty() { vec![1.0 / mechs.len() as f64; mechs.len()] } else { weights.clone() };
                    Selector::ConvexCombination { weights, mechanisms: mechs }
                }
                SelectorKind::OneDof => {
                    let orient = orient
                        .as_deref()
                        .map(|s| parse_bar(s).map(|(u, v, gamma)| PairId { u, v, gamma }))
                        .transpose()?;
                    Selector::KernelOneDof { orient }
                }
            };
            let p = integrate_trajectory(&f, &sel, *steps, *h)?;
            write_out(out, &path_to_string(&p, &BTreeMap::new()), ctx.stdout)?;
            Ok(Outcome::Positive)
        }
        Command::GenPpt { lattice, n, seed, out } => {
            let seed = seed_or_env(*seed)?;
            if lattice.len() != 4 {
                return Err(CliError::Usage("--lattice takes four numbers x1,y1,x2,y2".into()));
            }
            let l = LinearMap::from_columns(&[lattice[0..2].to_vec(), lattice[2..4].to_vec()])?;
            let f = random_ppt(&l, *n, seed)?;
            let mut meta = BTreeMap::new();
            meta.insert("seed".to_string(), seed.to_string());
            write_out(out, &framework_to_string(&f, &meta), ctx.stdout)?;
            Ok(Outcome::Positive)
        }
        Command::Refinements { file, radius, out_dir } => {
            let f = ctx.load_framework(file)?;
            let refs = enumerate_refinements(&f, *radius)?;
            let _ = writeln!(ctx.stdout, "refinements: {} (complete up to radius {radius})", refs.len());
            let base: Vec<_> = f.edge_signature();
            for (i, r) in refs.iter().enumerate() {
                let added: Vec<String> = r
                    .edge_signature()
                    .into_iter()
                    .filter(|k| !base.contains(k))
                    .map(|(u, v, g)| format!("{u}:{v}:{}", g.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                let _ = writeln!(ctx.stdout, "refinement {i}: added {}", added.join(" "));
                if let Some(dir) = out_dir {
                    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
                    write_file(&dir.join(format!("refinement_{i}.json")), &framework_to_string(r, &BTreeMap::new()))?;
                }
            }
            Ok(verdict_outcome(!refs.is_empty()))
        }
        Command::Study3d { at, r2, samples } => study3d(&mut ctx, at.as_deref(), *r2, *samples),
        Command::Render { file, svg, obj, copies } => {
            let f = ctx.load_framework(file)?;
            if svg.is_none() && obj.is_none() {
                return Err(CliError::Usage("render needs --svg or --obj".into()));
            }
            if let Some(p) = svg {
                write_file(p, &render_svg(&f, *copies)?)?;
            }
            if let Some(p) = obj {
                write_file(p, &export_obj(&f, *copies)?)?;
            }
            Ok(Outcome::Positive)
        }
        Command::GramTrace { file, csv } => {
            let p = ctx.load_path(file)?;
            write_file(csv, &gram_trace_csv(&p)?)?;
            Ok(Outcome::Positive)
        }
    }
}

fn info(ctx: &mut Ctx<'_>, file: &Path) -> Result<Outcome, CliError> {
    let f = ctx.load_framework(file)?;
    let out = &mut *ctx.stdout;
    let _ = writeln!(out, "dim: {}", f.dim());
    let _ = writeln!(out, "vertex_orbits: {}", f.n());
    let _ = writeln!(out, "edge_orbits: {}", f.m());
    let violations = f.validate();
    let _ = writeln!(out, "valid: {}", violations.is_empty());
    for v in &violations {
        let _ = writeln!(out, "violation: {v}");
    }
    if violations.is_empty() {
        let space = tangent_space(&f)?;
        let _ = writeln!(out, "dof: {}", space.dim());
        let _ = writeln!(out, "near_singular: {}", space.near_singular);
    }
    Ok(verdict_outcome(violations.is_empty()))
}

fn study3d(ctx: &mut Ctx<'_>, at: Option<&[f64]>, r2: f64, samples: usize) -> Result<Outcome, CliError> {
    let a: [f64; 5] = match at {
        None => A0,
        Some(v) => v.try_into().map_err(|_| CliError::Usage("--at takes five numbers a11,a22,a33,a13,a23".into()))?,
    };
    let p = StudyPoint::new(a, r2);
    let out = &mut *ctx.stdout;
    let _ = writeln!(out, "point: ({})", vec_text(&p.a, 10));
    let _ = writeln!(out, "r2: {}", num(r2, 10));
    let _ = writeln!(out, "f: {}", num(quartic_f(&p), 12));
    let g = quartic_gradient(&p);
    let _ = writeln!(out, "gradient: ({})", vec_text(&g, 10));
    let ratio = ProjectivePoint5::new(g)?;
    let big = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let small = g.iter().filter(|x| x.abs() > 1e-12 * big).fold(f64::INFINITY, |m, x| m.min(x.abs()));
    let _ = writeln!(out, "gradient_ratio: ({})", ratio.v.iter().map(|x| num(x / small, 6)).collect::<Vec<_>>().join(" : "));
    for (i, node) in cayley_nodes(&p)?.iter().enumerate() {
        let _ = writeln!(out, "node {}: {}", i + 1, projective_text(node));
    }
    for (i, ray) in expansive_rays(&p)?.iter().enumerate() {
        let _ = writeln!(out, "ray {}: {}", i + 1, projective_text(ray));
    }
    match cone_inclusion_check(&p, samples) {
        Ok(rep) => {
            let _ = writeln!(out, "inclusion: pass");
            let _ = writeln!(out, "grid_points: {}", rep.grid_points);
            let _ = writeln!(out, "min_grid_eigenvalue: {}", num(rep.min_grid_eigenvalue, 10));
            let _ = writeln!(out, "random_directions: {}", rep.random_directions);
            let _ = writeln!(out, "outside_spectrahedron: {}", rep.outside_spectrahedron);
            let _ = writeln!(out, "auxetic_not_expansive: {}", rep.strict_gap);
            Ok(Outcome::Positive)
        }
        Err(auxetica::Error::InclusionViolation(msg)) => {
            let _ = writeln!(out, "inclusion: fail ({msg})");
            Ok(Outcome::Negative)
        }
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_has_no_negative_zero() {
        assert_eq!(num(-1e-13, 6), "0.000000");
        assert_eq!(num(-0.5, 2), "-0.50");
    }

    #[test]
    fn bar_syntax() {
        assert_eq!(parse_bar("0:1:1,-1").unwrap(), (0, 1, vec![1, -1]));
        assert!(matches!(parse_bar("0:1"), Err(CliError::Usage(_))));
        assert!(matches!(parse_bar("0:x:1,0"), Err(CliError::Usage(_))));
    }

    #[test]
    fn params_need_key_and_number() {
        assert_eq!(parse_params(&["a=1.5".into()]).unwrap(), vec![("a".to_string(), 1.5)]);
        assert!(parse_params(&["a".into()]).is_err());
        assert!(parse_params(&["a=b".into()]).is_err());
    }

    #[test]
    fn undecided_maps_to_three() {
        let e = CliError::Analysis(auxetica::Error::Undecided { best_value: 0.0 });
        assert_eq!(e.exit_code(), 3);
        assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
    }

    #[test]
    fn run_collects_output() {
        let (mut out, mut err) = (String::new(), String::new());
        let code = run(&["auxetica".into(), "study3d".into(), "--samples".into(), "4".into()], &mut out, &mut err);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("inclusion: pass"));
    }
}
