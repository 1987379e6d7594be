//! Polygon files and JSON output with 17 significant digits.
//!
//! A polygon file is `{"vertices": [[x, y], ...]}` in counterclockwise order.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};
use thiserror::Error;

use crate::error::Error;
use crate::geometry::{signed_area, ConvexPolygon, Vec2};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },

    #[error("{origin}: line {line}, column {column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },

    #[error("{origin}: {source}")]
    Polygon { origin: String, source: Error },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonFile {
    vertices: Vec<[f64; 2]>,
}

/// Parse polygon JSON. Clockwise input is rejected rather than reordered.
pub fn parse_polygon(text: &str, origin: &str) -> Result<ConvexPolygon, InputError> {
    let file: PolygonFile = serde_json::from_str(text).map_err(|e| InputError::Parse {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let pts: Vec<Vec2> = file.vertices.iter().map(|&[x, y]| Vec2::new(x, y)).collect();
    let polygon_err = |source| InputError::Polygon { origin: origin.to_string(), source };
    if pts.len() >= 3 && signed_area(&pts) < 0.0 {
        return Err(polygon_err(Error::InvalidPolygon("vertices are in clockwise order".into())));
    }
    ConvexPolygon::new(pts).map_err(polygon_err)
}

pub fn read_polygon(path: &Path) -> Result<ConvexPolygon, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Read { path: path.to_path_buf(), source })?;
    parse_polygon(&text, &path.display().to_string())
}

/// Polygon JSON; the stored polygon is already counterclockwise.
pub fn polygon_to_json(p: &ConvexPolygon) -> String {
    let file = PolygonFile { vertices: p.vertices().iter().map(|v| [v.x, v.y]).collect() };
    to_json_string(&file)
}

/// `x` with 17 significant digits: positional notation for moderate
/// exponents, scientific otherwise. Non-finite values have no JSON form.
pub fn format_f64(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() });
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e')? + 1..].parse().ok()?;
    if (-5..17).contains(&exp) {
        let prec = (16 - exp) as usize;
        let s = format!("{x:.prec$}");
        Some(if s.contains('.') { s } else { s + ".0" })
    } else {
        Some(sci)
    }
}

/// Pretty-printed JSON whose floats carry 17 significant digits.
pub struct PreciseFormatter {
    inner: PrettyFormatter<'static>,
}

impl Default for PreciseFormatter {
    fn default() -> Self {
        PreciseFormatter { inner: PrettyFormatter::with_indent(b"  ") }
    }
}

impl Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        match format_f64(value) {
            Some(s) => writer.write_all(s.as_bytes()),
            None => writer.write_all(b"null"),
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(writer: W, value: &T) -> serde_json::Result<()> {
    let mut ser = Serializer::with_formatter(writer, PreciseFormatter::default());
    value.serialize(&mut ser)
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    write_json(&mut buf, value).expect("serializing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}
