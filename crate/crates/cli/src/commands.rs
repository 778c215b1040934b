use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use sldisk::complex::{
    convexity, find_key_or_twinkey, natural_edges, roof, verify_finding, Convexity, DiskShape, KeyError, KeyFinding,
    KeyKind,
};
use sldisk::corpus::corpus;
use sldisk::exact::parse_rational;
use sldisk::extension::{embedding_verdict, extend, is_vertical, obstructive_simplices, vertical_extend, ExtendError};
use sldisk::io::{disk_from_json, disk_to_json, from_json, to_json};
use sldisk::polytope::{
    fiber_polytopes, perturb_parameters, projection_equality_check, sample_embeddings, sample_fiber_parameters,
    FiberError, FiberSetup,
};
use sldisk::reduction::{check_reduced, reduce, ReductionError};
use sldisk::{Rational, SLDisk, SLMap};

use crate::report::RunReport;
use crate::svg::{render_svg, Annotations};
use crate::CliError;

fn load_disk(r: &mut RunReport, path: &Path) -> Result<SLDisk, CliError> {
    let text = r.read_input(path)?;
    disk_from_json(&text).map_err(|e| CliError::from_io(path, e))
}

fn load_map(r: &mut RunReport, path: &Path) -> Result<SLMap, CliError> {
    let text = r.read_input(path)?;
    from_json(&text).map_err(|e| CliError::from_io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn witness<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

/// Records the validation result; false when the disk is unusable.
fn validated(r: &mut RunReport, d: &SLDisk) -> bool {
    let v = d.validate();
    if v.is_valid() {
        r.pass("validate", "valid");
        true
    } else {
        r.fail("validate", v.to_string(), witness(&v.violations));
        r.status = r.status.max(2);
        false
    }
}

fn fmt_edges(edges: &[(usize, usize)]) -> String {
    let parts: Vec<String> = edges.iter().map(|(a, b)| format!("({a},{b})")).collect();
    format!("[{}]", parts.join(","))
}

fn fmt_key(k: &KeyFinding) -> String {
    let tris: Vec<String> = k
        .triangles
        .iter()
        .map(|t| format!("({},{},{})", t[0], t[1], t[2]))
        .collect();
    match k.kind {
        KeyKind::Key => format!("key={}", tris[0]),
        KeyKind::TwinKey => format!("twin-key={}", tris.join(",")),
    }
}

pub fn check(path: &Path, r: &mut RunReport) -> Result<(), CliError> {
    let d = load_disk(r, path)?;
    if !validated(r, &d) {
        r.summary = "invalid".into();
        return Ok(());
    }
    let mut parts = vec!["valid".to_string()];
    let conv = match convexity(&d.boundary_circle()) {
        Convexity::StrictlyConvex => "strictly convex",
        Convexity::Convex => "convex",
        Convexity::NotConvex => "not convex",
    };
    r.pass("convexity", conv);
    parts.push(conv.into());

    let roof = roof(&d).ok();
    match &roof {
        Some(rf) => {
            r.pass("trv", "transverse to the verticals");
            r.pass("roof", format!("{:?}", rf.vertices));
            parts.push("TrV".into());
        }
        None => {
            r.pass("trv", "not transverse to the verticals");
            parts.push("not TrV".into());
        }
    }

    let spanning = d.spanning_simplices();
    r.pass("spanning_simplices", fmt_edges(&spanning));
    if spanning.is_empty() {
        parts.push("simple".into());
    } else {
        parts.push(format!("not simple, spanning={}", fmt_edges(&spanning)));
    }

    if roof.is_some() && spanning.is_empty() && d.triangles().len() > 1 {
        match find_key_or_twinkey(&d) {
            Ok(k) if verify_finding(&d, &k) => {
                let s = fmt_key(&k);
                r.pass("find_key_or_twinkey", s.clone());
                parts.push(s);
            }
            Ok(k) => {
                r.fail(
                    "find_key_or_twinkey",
                    "finding does not satisfy the definition",
                    witness(&k),
                );
                r.status = 3;
            }
            Err(e @ KeyError::NoKeyFound) => {
                r.fail(
                    "find_key_or_twinkey",
                    e.to_string(),
                    json!({ "roof": roof.map(|x| x.vertices) }),
                );
                r.status = 3;
            }
            Err(e) => {
                r.fail("find_key_or_twinkey", e.to_string(), json!(null));
                r.status = 3;
            }
        }
    }
    r.summary = parts.join(", ");
    Ok(())
}

pub fn reduce_cmd(path: &Path, edge: usize, out: &Path, r: &mut RunReport) -> Result<(), CliError> {
    let d = load_disk(r, path)?;
    if !validated(r, &d) {
        return Ok(());
    }
    let rf = match reduce(&d, edge) {
        Ok(rf) => rf,
        Err(e) => {
            let code = match e {
                ReductionError::NotConvex | ReductionError::NotNaturalEdge(_) => 2,
                _ => 3,
            };
            let runs = natural_edges(&d.boundary_circle()).len();
            r.fail("reduce", e.to_string(), json!({ "edge": edge, "natural_edges": runs }));
            r.status = code;
            r.summary = e.to_string();
            return Ok(());
        }
    };
    let circle = rf.disk.boundary_circle();
    let runs = natural_edges(&circle);
    match check_reduced(&circle.points, &runs[edge]) {
        Ok(()) => r.pass("reduced_form", "base edge [0,1]x{0}, rest in (0,1)xR+"),
        Err(msg) => {
            r.fail("reduced_form", msg, json!({ "boundary": circle.points }));
            r.status = 3;
        }
    }
    let inv = rf.map.inverse();
    let bad = d
        .used_vertices()
        .into_iter()
        .find(|&v| inv.apply(rf.disk.point(v)).ok().as_ref() != Some(d.point(v)));
    match bad {
        None => r.pass("round_trip", "inverse map fixes every vertex"),
        Some(v) => {
            r.fail("round_trip", format!("vertex {v} not restored"), json!({ "vertex": v }));
            r.status = 3;
        }
    }
    if r.all_passed() {
        write(out, &to_json(&rf))?;
        r.summary = format!("reduced on natural edge {edge}, wrote {}", out.display());
    } else {
        r.summary = "reduction failed verification; nothing written".into();
    }
    Ok(())
}

fn extend_error_code(e: &ExtendError) -> u8 {
    if e.is_precondition() {
        2
    } else {
        3
    }
}

fn extend_witness(e: &ExtendError) -> Value {
    match e {
        ExtendError::Obstructive(edges) => json!({ "obstructive": edges }),
        ExtendError::NotVertical(v) | ExtendError::MissingImage(v) => json!({ "vertex": v }),
        other => json!({ "error": other.to_string() }),
    }
}

/// Extends and verifies one instance. Returns the verified map, or records
/// the failure in `r` and returns `None`.
fn extend_verified(d: &SLDisk, f: &SLMap, vertical: bool, r: &mut RunReport, prefix: &str) -> Option<SLMap> {
    let name = |s: &str| format!("{prefix}{s}");
    let result = if vertical { vertical_extend(d, f) } else { extend(d, f) };
    let m = match result {
        Ok(m) => m,
        Err(e) => {
            r.fail(name("extend"), e.to_string(), extend_witness(&e));
            r.status = r.status.max(extend_error_code(&e));
            return None;
        }
    };
    r.pass(name("extend"), format!("{} vertex images", m.len()));
    let verdict = embedding_verdict(d, &m);
    if verdict.is_embedding() {
        r.pass(name("is_embedding"), "oracle verified");
    } else {
        r.fail(name("is_embedding"), "oracle rejected the extension", witness(&verdict));
        r.status = 3;
    }
    let first_off = d.boundary().iter().copied().find(|&v| m.get(v) != f.get(v));
    match first_off {
        None => r.pass(name("boundary_agreement"), "exact"),
        Some(v) => {
            r.fail(
                name("boundary_agreement"),
                format!("vertex {v} moved"),
                json!({ "vertex": v }),
            );
            r.status = 3;
        }
    }
    if vertical {
        if is_vertical(d, &m) {
            r.pass(name("vertical"), "every x-coordinate kept");
        } else {
            r.fail(name("vertical"), "an x-coordinate changed", witness(&m));
            r.status = 3;
        }
    }
    let ok = verdict.is_embedding() && first_off.is_none() && (!vertical || is_vertical(d, &m));
    ok.then_some(m)
}

pub struct ExtendArgs<'a> {
    pub disk: &'a Path,
    pub map: &'a Path,
    pub out: &'a Path,
    pub vertical: bool,
    pub svg: Option<&'a Path>,
}

pub fn extend_cmd(a: ExtendArgs<'_>, r: &mut RunReport) -> Result<(), CliError> {
    let d = load_disk(r, a.disk)?;
    let f = load_map(r, a.map)?;
    if !validated(r, &d) {
        return Ok(());
    }
    let Some(m) = extend_verified(&d, &f, a.vertical, r, "") else {
        r.summary = match r.checks.iter().find(|c| !c.pass) {
            Some(c) => format!("not extended: {}", c.detail.clone().unwrap_or_default()),
            None => "not extended".into(),
        };
        return Ok(());
    };
    write(a.out, &to_json(&m))?;
    if let Some(prefix) = a.svg {
        let notes = Annotations::default();
        write(&with_suffix(prefix, "-before.svg"), &render_svg(&d, None, &notes))?;
        write(&with_suffix(prefix, "-after.svg"), &render_svg(&d, Some(&m), &notes))?;
    }
    r.summary = format!("extended and verified, wrote {}", a.out.display());
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

/// Disk files in a corpus directory, sorted by name. Files ending in
/// `.map.json` are boundary maps for the disk of the same stem.
fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.ends_with(".json") && !name.ends_with(".map.json")
        })
        .collect();
    files.sort();
    Ok(files)
}

fn stem(p: &Path) -> String {
    let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
    name.trim_end_matches(".json").to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CaseResult {
    Verified,
    Rejected,
    Failed,
}

fn merge(r: &mut RunReport, mut sub: RunReport) {
    r.inputs.append(&mut sub.inputs);
    r.checks.append(&mut sub.checks);
}

pub fn extend_corpus(dir: &Path, vertical: bool, out: Option<&Path>, r: &mut RunReport) -> Result<(), CliError> {
    let files = corpus_files(dir)?;
    type Case = (RunReport, CaseResult, Option<SLMap>);
    let results: Vec<Result<Case, CliError>> = files
        .par_iter()
        .map(|path| {
            let name = stem(path);
            let mut sub = RunReport::new(Vec::new());
            let d = load_disk(&mut sub, path)?;
            let map_path = dir.join(format!("{name}.map.json"));
            let f = if map_path.exists() {
                load_map(&mut sub, &map_path)?
            } else {
                SLMap::boundary_identity(&d)
            };
            if !d.validate().is_valid() {
                sub.fail(
                    format!("{name}: validate"),
                    d.validate().to_string(),
                    witness(&d.validate().violations),
                );
                return Ok((sub, CaseResult::Rejected, None));
            }
            let m = extend_verified(&d, &f, vertical, &mut sub, &format!("{name}: "));
            let outcome = match (&m, sub.status) {
                (Some(_), _) => CaseResult::Verified,
                (None, 2) => CaseResult::Rejected,
                _ => CaseResult::Failed,
            };
            Ok((sub, outcome, m))
        })
        .collect();
    let mut counts = BTreeMap::new();
    for (path, res) in files.iter().zip(results) {
        let (sub, outcome, m) = res?;
        *counts.entry(format!("{outcome:?}")).or_insert(0usize) += 1;
        if outcome == CaseResult::Failed {
            r.status = 3;
        }
        if let (Some(dir), Some(m)) = (out, m) {
            write(&dir.join(format!("{}.ext.json", stem(path))), &to_json(&m))?;
        }
        merge(r, sub);
    }
    let get = |k: &str| counts.get(k).copied().unwrap_or(0);
    let (v, rej, fail) = (get("Verified"), get("Rejected"), get("Failed"));
    let line = format!(
        "{v} verified, {rej} rejected by preconditions, {fail} failed, of {}",
        files.len()
    );
    if fail == 0 {
        r.pass("corpus", line.clone());
    } else {
        r.fail("corpus", line.clone(), json!({ "failed": fail }));
    }
    r.summary = line;
    Ok(())
}

pub fn check_obstructive(disk: &Path, map: &Path, r: &mut RunReport) -> Result<(), CliError> {
    let d = load_disk(r, disk)?;
    let f = load_map(r, map)?;
    if !validated(r, &d) {
        return Ok(());
    }
    if let Some(&v) = d.boundary().iter().find(|&&v| f.get(v).is_none()) {
        r.fail(
            "boundary_map",
            format!("no image for vertex {v}"),
            json!({ "vertex": v }),
        );
        r.status = 2;
        r.summary = format!("boundary map misses vertex {v}");
        return Ok(());
    }
    let obs = obstructive_simplices(&d, &f);
    if obs.is_empty() {
        r.pass("obstructive", "[]");
        r.summary = "not obstructive".into();
    } else {
        r.fail("obstructive", fmt_edges(&obs), json!({ "obstructive": obs }));
        r.status = 2;
        r.summary = format!("obstructive={}", fmt_edges(&obs));
    }
    Ok(())
}

/// Uses the disk as given when it is already in reduced form over an
/// interior apex, otherwise the first natural edge that yields one.
fn fiber_setup(d: &SLDisk) -> Result<FiberSetup, FiberError> {
    match FiberSetup::new(d) {
        Ok(s) => Ok(s),
        Err(first) => {
            let runs = natural_edges(&d.boundary_circle()).len();
            (0..runs)
                .find_map(|mu| FiberSetup::new(&reduce(d, mu).ok()?.disk).ok())
                .ok_or(first)
        }
    }
}

fn fmt_dim(d: Option<usize>) -> String {
    d.map_or_else(|| "empty".into(), |d| d.to_string())
}

pub fn fiber(disk: &Path, xs: &[String], y: &str, out: Option<&Path>, r: &mut RunReport) -> Result<(), CliError> {
    let d = load_disk(r, disk)?;
    let x: Vec<Rational> = xs
        .iter()
        .map(|s| parse_rational(s).map_err(|e| CliError::Parse(format!("x value {s:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    let y = parse_rational(y).map_err(|e| CliError::Parse(format!("y value {y:?}: {e}")))?;
    if !validated(r, &d) {
        return Ok(());
    }
    let fp = match FiberSetup::new(&d).and_then(|s| Ok((fiber_polytopes(&s, &x, &y)?, s.m()))) {
        Ok(v) => v,
        Err(e) => {
            r.fail("fiber_polytopes", e.to_string(), json!({ "x": xs, "y": y.to_string() }));
            r.status = 2;
            r.summary = e.to_string();
            return Ok(());
        }
    };
    let (fp, m) = fp;
    let c = fp.check();
    let [a, b, l] = c.dimensions;
    r.summary = format!(
        "dim(F)={}, dim(F^{{>={y}}})={}, dim(F^{{{y}}})={}",
        fmt_dim(a),
        fmt_dim(b),
        fmt_dim(l)
    );
    if c.as_expected(m) {
        r.pass(
            "fiber_structure",
            format!("dimensions ({m},{m},{}), only the first unbounded", m - 1),
        );
    } else {
        r.fail("fiber_structure", "unexpected fiber structure", witness(&c));
        r.status = 3;
    }
    if let Some(out) = out {
        write(out, &to_json(&fp))?;
    }
    Ok(())
}

fn projection_one(name: &str, d: &SLDisk, samples: usize, seed: u64, r: &mut RunReport) -> CaseResult {
    if !d.validate().is_valid() {
        r.fail(
            format!("{name}: validate"),
            d.validate().to_string(),
            witness(&d.validate().violations),
        );
        return CaseResult::Rejected;
    }
    let setup = match fiber_setup(d) {
        Ok(s) => s,
        Err(e) => {
            r.fail(format!("{name}: setup"), e.to_string(), json!(null));
            return CaseResult::Rejected;
        }
    };
    let m = setup.m();
    let xs = sample_fiber_parameters(&setup, samples, seed);
    for x in xs.iter().step_by((samples / 10).max(1)).take(10) {
        for y in [Rational::from_integer(0.into()), Rational::from_integer((-1).into())] {
            let ok = fiber_polytopes(&setup, x, &y).map(|f| f.check().as_expected(m));
            if ok != Ok(true) {
                let x: Vec<String> = x.iter().map(|v| v.to_string()).collect();
                r.fail(
                    format!("{name}: fiber_structure"),
                    "unexpected fiber",
                    json!({ "x": x, "y": y.to_string() }),
                );
                return CaseResult::Failed;
            }
        }
    }
    let mut all = xs.clone();
    all.extend(perturb_parameters(&xs, seed ^ 1));
    let zero = Rational::from_integer(0.into());
    let minus_one = Rational::from_integer((-1).into());
    match projection_equality_check(&setup, &zero, &minus_one, &all) {
        Ok(rep) if rep.disagreements.is_empty() => {
            r.pass(
                format!("{name}: projection_equality"),
                format!("m={m}, {} points ({} inside), disagreements=0", rep.samples, rep.inside),
            );
            CaseResult::Verified
        }
        Ok(rep) => {
            r.fail(
                format!("{name}: projection_equality"),
                format!("disagreements={}", rep.disagreements.len()),
                witness(&rep.disagreements[0]),
            );
            CaseResult::Failed
        }
        Err(e) => {
            r.fail(format!("{name}: projection_equality"), e.to_string(), json!(null));
            CaseResult::Failed
        }
    }
}

pub fn projection(disk: &Path, samples: usize, seed: u64, r: &mut RunReport) -> Result<(), CliError> {
    let d = load_disk(r, disk)?;
    let outcome = projection_one(&stem(disk), &d, samples, seed, r);
    r.status = match outcome {
        CaseResult::Verified => 0,
        CaseResult::Rejected => 2,
        CaseResult::Failed => 3,
    };
    r.summary = match outcome {
        CaseResult::Verified => "disagreements=0".into(),
        _ => r
            .checks
            .iter()
            .rev()
            .find(|c| !c.pass)
            .and_then(|c| c.detail.clone())
            .unwrap_or_default(),
    };
    Ok(())
}

pub fn projection_corpus(
    dir: &Path,
    samples: usize,
    seed: u64,
    max_interior: usize,
    r: &mut RunReport,
) -> Result<(), CliError> {
    let files = corpus_files(dir)?;
    let results: Vec<Result<(RunReport, CaseResult), CliError>> = files
        .par_iter()
        .map(|path| {
            let mut sub = RunReport::new(Vec::new());
            let d = load_disk(&mut sub, path)?;
            if d.interior_vertices().len() > max_interior {
                return Ok((sub, CaseResult::Rejected));
            }
            let outcome = projection_one(&stem(path), &d, samples, seed, &mut sub);
            // Disks without a usable reduced form are skipped, not failures.
            if outcome == CaseResult::Rejected {
                sub.checks.clear();
            }
            Ok((sub, outcome))
        })
        .collect();
    let (mut checked, mut skipped, mut failed) = (0, 0, 0);
    for res in results {
        let (sub, outcome) = res?;
        match outcome {
            CaseResult::Verified => checked += 1,
            CaseResult::Rejected => skipped += 1,
            CaseResult::Failed => failed += 1,
        }
        merge(r, sub);
    }
    let line = format!("{checked} disks with zero disagreements, {failed} failed, {skipped} skipped");
    if failed == 0 {
        r.pass("corpus", line.clone());
    } else {
        r.fail("corpus", line.clone(), json!({ "failed": failed }));
        r.status = 3;
    }
    r.summary = line;
    Ok(())
}

#[derive(Serialize)]
struct SampleSummary {
    seed: u64,
    count: usize,
    files: Vec<String>,
}

pub fn sample(
    disk: &Path,
    map: Option<&Path>,
    n: usize,
    seed: u64,
    out: &Path,
    r: &mut RunReport,
) -> Result<(), CliError> {
    let d = load_disk(r, disk)?;
    let f = match map {
        Some(p) => load_map(r, p)?,
        None => SLMap::boundary_identity(&d),
    };
    if !validated(r, &d) {
        return Ok(());
    }
    let maps = match sample_embeddings(&d, &f, n, seed) {
        Ok(m) => m,
        Err(e) => {
            r.fail("sample_embeddings", e.to_string(), extend_witness(&e));
            r.status = extend_error_code(&e);
            r.summary = e.to_string();
            return Ok(());
        }
    };
    if let Some((i, v)) = maps
        .iter()
        .enumerate()
        .map(|(i, m)| (i, embedding_verdict(&d, m)))
        .find(|(_, v)| !v.is_embedding())
    {
        r.fail(
            "is_embedding",
            format!("sample {i} rejected by the oracle"),
            witness(&v),
        );
        r.status = 3;
        r.summary = "sampling produced a non-embedding; nothing written".into();
        return Ok(());
    }
    r.pass("is_embedding", format!("all {} samples oracle verified", maps.len()));
    let mut files = Vec::new();
    for (i, m) in maps.iter().enumerate() {
        let name = format!("sample-{i:04}.json");
        write(&out.join(&name), &to_json(m))?;
        files.push(name);
    }
    let summary = SampleSummary { seed, count: n, files };
    write(&out.join("summary.json"), &to_json(&summary))?;
    r.summary = format!("{n} embeddings written to {}", out.display());
    Ok(())
}

pub fn render(
    disk: &Path,
    map: Option<&Path>,
    out: Option<&Path>,
    r: &mut RunReport,
) -> Result<Option<String>, CliError> {
    let d = load_disk(r, disk)?;
    let m = match map {
        Some(p) => Some(load_map(r, p)?),
        None => None,
    };
    if !validated(r, &d) {
        return Ok(None);
    }
    let mut notes = Annotations::default();
    if let Ok(rf) = roof(&d) {
        notes.roof = Some(rf.vertices);
        notes.key = find_key_or_twinkey(&d).ok();
    }
    if let Some(m) = &m {
        if m.is_total_on(d.boundary()) {
            notes.obstructive = obstructive_simplices(&d, m);
        }
    }
    let svg = render_svg(&d, m.as_ref(), &notes);
    r.pass("render", format!("{} triangles", d.triangles().len()));
    match out {
        Some(p) => {
            write(p, &svg)?;
            r.summary = format!("wrote {}", p.display());
            Ok(None)
        }
        None => Ok(Some(svg)),
    }
}

pub fn generate(seed: u64, count: usize, out: &Path, r: &mut RunReport) -> Result<(), CliError> {
    let cases = corpus(
        seed,
        count,
        &[DiskShape::StrictlyConvex, DiskShape::Convex, DiskShape::TrV],
    );
    for c in &cases {
        write(&out.join(format!("{}.json", c.name)), &disk_to_json(&c.disk))?;
    }
    r.pass("generate", format!("{} disks", cases.len()));
    r.summary = format!("{} disks written to {}", cases.len(), out.display());
    Ok(())
}
