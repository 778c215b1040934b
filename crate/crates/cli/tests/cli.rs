use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sldisk::complex::fixtures::{fan, square_diagonal};
use sldisk::exact::{rat, Point};
use sldisk::extension::is_embedding;
use sldisk::io::{disk_from_json, disk_to_json, from_json, to_json};
use sldisk::{SLDisk, SLMap};
use tempfile::TempDir;

fn sldisk(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sldisk"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn put_disk(dir: &Path, name: &str, d: &SLDisk) {
    put(dir, name, &disk_to_json(d));
}

fn put_map(dir: &Path, name: &str, m: &SLMap) {
    put(dir, name, &to_json(m));
}

#[test]
fn check_classifies_the_fan() {
    let t = TempDir::new().unwrap();
    put_disk(t.path(), "fan.json", &fan());
    let o = sldisk(&["check", "fan.json"], t.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("valid, strictly convex, TrV, simple, key=(2,3,4)"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn check_reports_spanning_edges() {
    let t = TempDir::new().unwrap();
    put_disk(t.path(), "sq.json", &square_diagonal());
    let o = sldisk(&["check", "sq.json"], t.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not simple, spanning=[(0,2)]"));
}

#[test]
fn malformed_input_is_a_parse_error() {
    let t = TempDir::new().unwrap();
    put(t.path(), "bad.json", "{\"vertices\": [\n  {\"x\": \"1/0\"");
    let o = sldisk(&["check", "bad.json"], t.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    let t = TempDir::new().unwrap();
    assert_eq!(sldisk(&["frobnicate"], t.path()).status.code(), Some(1));
    assert_eq!(sldisk(&["check", "missing.json"], t.path()).status.code(), Some(1));
}

#[test]
fn invalid_disk_is_a_precondition_failure() {
    let t = TempDir::new().unwrap();
    // Clockwise triangle.
    put(
        t.path(),
        "cw.json",
        r#"{"vertices":[{"x":"0","y":"0"},{"x":"0","y":"1"},{"x":"1","y":"0"}],"triangles":[[0,1,2]]}"#,
    );
    let o = sldisk(&["check", "cw.json", "--report", "r.json"], t.path());
    assert_eq!(o.status.code(), Some(2));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(t.path().join("r.json")).unwrap()).unwrap();
    let failed: Vec<_> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| !c["witness"].is_null()));
}

#[test]
fn extend_writes_a_verified_map() {
    let t = TempDir::new().unwrap();
    let d = fan();
    put_disk(t.path(), "fan.json", &d);
    let mut f = SLMap::boundary_identity(&d);
    f.insert(2, Point::rat(3, 2, 2, 1));
    put_map(t.path(), "f.json", &f);
    let o = sldisk(
        &[
            "extend", "fan.json", "f.json", "--out", "ext.json", "--svg", "fig", "--report", "r.json",
        ],
        t.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let m: SLMap = from_json(&std::fs::read_to_string(t.path().join("ext.json")).unwrap()).unwrap();
    assert!(is_embedding(&d, &m));
    assert_eq!(m.restrict_to_boundary(&d), f);
    assert!(t.path().join("fig-before.svg").exists() && t.path().join("fig-after.svg").exists());
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(t.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "is_embedding" && c["pass"] == true));
}

fn flattened_square() -> SLMap {
    let d = square_diagonal();
    let mut f = SLMap::boundary_identity(&d);
    f.insert(1, Point::new(rat(1, 2), rat(1, 2)));
    f
}

#[test]
fn obstructive_input_exits_two_and_writes_nothing() {
    let t = TempDir::new().unwrap();
    put_disk(t.path(), "sq.json", &square_diagonal());
    put_map(t.path(), "f.json", &flattened_square());
    let o = sldisk(&["extend", "sq.json", "f.json", "--out", "ext.json"], t.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stdout(&o).contains("obstructive spanning edges [(0, 2)]"),
        "{}",
        stdout(&o)
    );
    assert!(!t.path().join("ext.json").exists());
    let o = sldisk(&["check-obstructive", "sq.json", "f.json"], t.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("obstructive=[(0,2)]"));
}

#[test]
fn vertical_extension_keeps_x() {
    let t = TempDir::new().unwrap();
    let (d, v) = sldisk::complex::fixtures::one_sided_obstruction();
    put_disk(t.path(), "d.json", &d);
    put_map(t.path(), "v.json", &v);
    let o = sldisk(&["vertical-extend", "d.json", "v.json", "--out", "ext.json"], t.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let m: SLMap = from_json(&std::fs::read_to_string(t.path().join("ext.json")).unwrap()).unwrap();
    assert!(is_embedding(&d, &m));
    assert!(d.used_vertices().iter().all(|&u| m.at(u).x == d.point(u).x));
}

#[test]
fn reduce_round_trips_and_rejects_non_convex() {
    let t = TempDir::new().unwrap();
    put_disk(t.path(), "fan.json", &fan());
    let o = sldisk(&["reduce", "fan.json", "0", "--out", "red.json"], t.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(t.path().join("red.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let disk = disk_from_json(&v["disk"].to_string()).unwrap();
    let base = disk.boundary_edges();
    assert!(base
        .iter()
        .any(|&(a, b)| disk.point(a) == &Point::int(0, 0) && disk.point(b) == &Point::int(1, 0)));

    let dart = SLDisk::new(
        vec![Point::int(0, 0), Point::int(2, 1), Point::int(4, 0), Point::int(2, 3)],
        vec![[0, 1, 3], [1, 2, 3]],
    )
    .unwrap();
    put_disk(t.path(), "dart.json", &dart);
    let o = sldisk(&["reduce", "dart.json", "0", "--out", "x.json"], t.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("not convex"));
}

#[test]
fn fan_fiber_dimensions() {
    let t = TempDir::new().unwrap();
    let reduced = SLDisk::new(
        vec![
            Point::int(0, 0),
            Point::int(1, 0),
            Point::rat(3, 4, 1, 2),
            Point::rat(1, 4, 1, 2),
            Point::rat(1, 2, 1, 3),
        ],
        vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
    )
    .unwrap();
    put_disk(t.path(), "rfan.json", &reduced);
    let o = sldisk(&["fiber", "rfan.json", "--x", "1/2", "--y", "-1/2"], t.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(
        stdout(&o).contains("dim(F)=1, dim(F^{>=-1/2})=1, dim(F^{-1/2})=0"),
        "{}",
        stdout(&o)
    );
    let o = sldisk(&["fiber", "rfan.json", "--x", "2", "--y", "0"], t.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn projection_check_on_the_fan() {
    let t = TempDir::new().unwrap();
    put_disk(t.path(), "fan.json", &fan());
    let o = sldisk(&["lemma6-check", "fan.json", "--samples", "40"], t.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("disagreements=0"));
}

#[test]
fn sample_is_deterministic_and_verified() {
    let t = TempDir::new().unwrap();
    let d = fan();
    put_disk(t.path(), "fan.json", &d);
    for out in ["a", "b"] {
        let o = sldisk(
            &["sample", "fan.json", "--n", "10", "--seed", "7", "--out", out],
            t.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    for i in 0..10 {
        let name = format!("sample-{i:04}.json");
        let a = std::fs::read_to_string(t.path().join("a").join(&name)).unwrap();
        let b = std::fs::read_to_string(t.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b);
        let m: SLMap = from_json(&a).unwrap();
        assert!(is_embedding(&d, &m));
    }
    let summary = std::fs::read_to_string(t.path().join("a/summary.json")).unwrap();
    assert_eq!(
        summary,
        std::fs::read_to_string(t.path().join("b/summary.json")).unwrap()
    );
}

#[test]
fn corpus_mode_is_deterministic() {
    let t = TempDir::new().unwrap();
    let o = sldisk(
        &["generate", "--seed", "5", "--count", "4", "--out", "corpus"],
        t.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<_> = std::fs::read_dir(t.path().join("corpus")).unwrap().collect();
    assert_eq!(names.len(), 12);
    put_map(t.path(), "corpus/strict-000.map.json", &{
        let d = disk_from_json(&std::fs::read_to_string(t.path().join("corpus/strict-000.json")).unwrap()).unwrap();
        SLMap::boundary_identity(&d)
    });
    let run = |report: &str| {
        let o = sldisk(&["extend", "--corpus", "corpus", "--report", report], t.path());
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("0 failed, of 12"), "{}", stdout(&o));
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(t.path().join(report)).unwrap()).unwrap();
        v["elapsed_ms"] = 0.into();
        v["command"] = serde_json::Value::Null;
        v
    };
    assert_eq!(run("r1.json"), run("r2.json"));

    let o = sldisk(&["lemma6-check", "--corpus", "corpus", "--samples", "30"], t.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn render_is_deterministic() {
    let t = TempDir::new().unwrap();
    put_disk(t.path(), "fan.json", &fan());
    let a = stdout(&sldisk(&["render", "fan.json"], t.path()));
    let b = stdout(&sldisk(&["render", "fan.json"], t.path()));
    assert_eq!(a, b);
    assert!(a.starts_with("<svg"));
    // Four triangles, the boundary, and the key triangle highlighted.
    assert_eq!(a.matches("<polygon").count(), 5);
    assert_eq!(a.matches("#f4c542").count(), 1);
    assert_eq!(a.matches("<polyline").count(), 1);

    put_disk(t.path(), "sq.json", &square_diagonal());
    put_map(t.path(), "f.json", &flattened_square());
    let o = sldisk(&["render", "sq.json", "--map", "f.json", "--out", "sq.svg"], t.path());
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(t.path().join("sq.svg")).unwrap();
    assert_eq!(svg.matches("<line").count(), 1);
}
