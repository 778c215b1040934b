//! Deterministic SVG figures. Coordinates are exact up to this point and are
//! rounded to six decimals only when written.

use std::fmt::Write;

use sldisk::complex::{Edge, KeyFinding, Tri};
use sldisk::exact::{to_f64, Point, Rational};
use sldisk::{SLDisk, SLMap};

#[derive(Debug, Clone, Default)]
pub struct Annotations {
    pub roof: Option<Vec<usize>>,
    pub key: Option<KeyFinding>,
    pub obstructive: Vec<Edge>,
}

fn num(r: &Rational) -> String {
    let s = format!("{:.6}", to_f64(r));
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// SVG coordinates: `y` is flipped so the figure reads the usual way up.
fn xy(p: &Point) -> String {
    format!("{},{}", num(&p.x), num(&-p.y.clone()))
}

pub fn render_svg(d: &SLDisk, map: Option<&SLMap>, notes: &Annotations) -> String {
    let at = |v: usize| -> Point {
        map.and_then(|m| m.get(v).cloned())
            .unwrap_or_else(|| d.point(v).clone())
    };
    let used = d.used_vertices();
    let pts: Vec<Point> = used.iter().map(|&v| at(v)).collect();
    let min_x = pts.iter().map(|p| p.x.clone()).min().unwrap_or_default();
    let max_x = pts.iter().map(|p| p.x.clone()).max().unwrap_or_default();
    let min_y = pts.iter().map(|p| -p.y.clone()).min().unwrap_or_default();
    let max_y = pts.iter().map(|p| -p.y.clone()).max().unwrap_or_default();
    let (w, h) = (&max_x - &min_x, &max_y - &min_y);
    let margin_x = &w / Rational::from_integer(20.into());
    let margin_y = &h / Rational::from_integer(20.into());
    let width = &w + &margin_x * Rational::from_integer(2.into());
    let height = &h + &margin_y * Rational::from_integer(2.into());
    let stroke = width.clone().max(height.clone()) / Rational::from_integer(400.into());

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        num(&(&min_x - &margin_x)),
        num(&(&min_y - &margin_y)),
        num(&width),
        num(&height)
    );
    let key_tris: Vec<Tri> = notes.key.as_ref().map(|k| k.triangles.clone()).unwrap_or_default();
    for t in d.triangles() {
        let fill = if key_tris.contains(t) { "#f4c542" } else { "#dbe7f3" };
        let _ = writeln!(
            s,
            r##"  <polygon points="{} {} {}" fill="{fill}" stroke="#5b7fa6" stroke-width="{}"/>"##,
            xy(&at(t[0])),
            xy(&at(t[1])),
            xy(&at(t[2])),
            num(&stroke)
        );
    }
    let boundary: Vec<String> = d.boundary().iter().map(|&v| xy(&at(v))).collect();
    let _ = writeln!(
        s,
        r##"  <polygon points="{}" fill="none" stroke="#1b2a3a" stroke-width="{}"/>"##,
        boundary.join(" "),
        num(&(&stroke * Rational::from_integer(2.into())))
    );
    if let Some(roof) = &notes.roof {
        let line: Vec<String> = roof.iter().map(|&v| xy(&at(v))).collect();
        let _ = writeln!(
            s,
            r##"  <polyline points="{}" fill="none" stroke="#2e8b57" stroke-width="{}"/>"##,
            line.join(" "),
            num(&(&stroke * Rational::from_integer(3.into())))
        );
    }
    for &(a, b) in &notes.obstructive {
        let _ = writeln!(
            s,
            r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c0392b" stroke-width="{}"/>"##,
            num(&at(a).x),
            num(&-at(a).y),
            num(&at(b).x),
            num(&-at(b).y),
            num(&(&stroke * Rational::from_integer(3.into())))
        );
    }
    for (&v, p) in used.iter().zip(&pts) {
        let _ = writeln!(
            s,
            r#"  <circle cx="{}" cy="{}" r="{}" fill="{}"><title>{v}</title></circle>"#,
            num(&p.x),
            num(&-p.y.clone()),
            num(&(&stroke * Rational::from_integer(3.into()))),
            if d.is_boundary_vertex(v) { "#1b2a3a" } else { "#8e44ad" }
        );
    }
    s.push_str("</svg>\n");
    s
}
