//! Artifact writers: CSV (header row, `.` decimal, 17 significant digits),
//! JSON (UTF-8, keys sorted), and a minimal SVG emitter for scatter, hull,
//! and polyline figures. All output is deterministic: no timestamps, fixed
//! float formatting, and key order independent of construction order.

use rotor_core::{ConvexPolygon, Vec2};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

/// 17 significant digits — enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a CSV with a header row.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)
}

/// Serialize any value to JSON with sorted keys (serde_json maps are
/// BTree-backed, so converting through `Value` sorts object keys).
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let value = serde_json::to_value(value).map_err(io::Error::other)?;
    let mut text = serde_json::to_string_pretty(&value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Fixed-size SVG canvas mapping a data bounding box to 640×640 pixels.
pub struct Svg {
    body: String,
    min: Vec2,
    scale: f64,
    size: f64,
}

impl Svg {
    const SIZE: f64 = 640.0;
    const PAD: f64 = 24.0;

    /// Create a canvas covering the data range `lo..hi` (per axis).
    pub fn new(lo: Vec2, hi: Vec2) -> Svg {
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
        Svg {
            body: String::new(),
            min: lo,
            scale: (Self::SIZE - 2.0 * Self::PAD) / span,
            size: Self::SIZE,
        }
    }

    /// Canvas sized to cover every listed point, with 5% slack.
    pub fn covering<'a>(point_sets: impl IntoIterator<Item = &'a [Vec2]>) -> Svg {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for set in point_sets {
            for p in set {
                lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
        if !lo.is_finite() || !hi.is_finite() {
            lo = Vec2::new(-1.0, -1.0);
            hi = Vec2::new(1.0, 1.0);
        }
        let slack = 0.05 * ((hi.x - lo.x).max(hi.y - lo.y).max(1e-6));
        Svg::new(lo - Vec2::new(slack, slack), hi + Vec2::new(slack, slack))
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        // y flips: SVG grows downward
        (
            Self::PAD + (p.x - self.min.x) * self.scale,
            self.size - Self::PAD - (p.y - self.min.y) * self.scale,
        )
    }

    pub fn scatter(&mut self, points: &[Vec2], radius: f64, color: &str) {
        // cap the element count; large clouds are subsampled evenly
        let stride = points.len().div_ceil(2000).max(1);
        for p in points.iter().step_by(stride) {
            let (x, y) = self.map(*p);
            let _ = writeln!(
                self.body,
                r#"  <circle cx="{x:.2}" cy="{y:.2}" r="{radius}" fill="{color}" fill-opacity="0.5"/>"#
            );
        }
    }

    pub fn polygon(&mut self, poly: &ConvexPolygon, color: &str) {
        if poly.is_empty() {
            return;
        }
        let pts: String = poly
            .vertices()
            .iter()
            .map(|&v| {
                let (x, y) = self.map(v);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            self.body,
            r#"  <polygon points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
        );
    }

    pub fn polyline(&mut self, points: &[Vec2], color: &str) {
        if points.is_empty() {
            return;
        }
        let stride = points.len().div_ceil(4000).max(1);
        let pts: String = points
            .iter()
            .step_by(stride)
            .map(|&v| {
                let (x, y) = self.map(v);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            self.body,
            r#"  <polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.0"/>"#
        );
    }

    pub fn marker(&mut self, p: Vec2, color: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(
            self.body,
            r#"  <circle cx="{x:.2}" cy="{y:.2}" r="4" fill="none" stroke="{color}" stroke-width="2"/>"#
        );
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut doc = format!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">
  <rect width="{s}" height="{s}" fill="white"/>
"#,
            s = self.size
        );
        doc.push_str(&self.body);
        doc.push_str("</svg>\n");
        fs::write(path, doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.25), "2.5000000000000000e-1");
        assert_eq!(fmt_f64(1.0 / 3.0), "3.3333333333333331e-1");
        // round-trips
        let v: f64 = fmt_f64(std::f64::consts::PI).parse().unwrap();
        assert_eq!(v, std::f64::consts::PI);
    }

    #[test]
    fn json_keys_sorted() {
        #[derive(Serialize)]
        struct Zed {
            zebra: u32,
            apple: u32,
            mango: u32,
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        write_json(
            &path,
            &Zed {
                zebra: 1,
                apple: 2,
                mango: 3,
            },
        )
        .unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let a = text.find("apple").unwrap();
        let m = text.find("mango").unwrap();
        let z = text.find("zebra").unwrap();
        assert!(a < m && m < z);
    }
}
