//! JSON and CSV output.
//!
//! Floats are written with 17 significant digits in scientific notation;
//! non-finite values become `null`.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::error::{Error, Result};
use crate::functionals::GapReport;
use crate::scalar_analysis::HChain;

pub const GAP_CSV_HEADER: &str = "label,p,theta,lhs,rhs,gap,holds";
pub const SCALAR_CSV_HEADER: &str = "p,s,h,h1,h2,h2_prime";

/// `v` with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

struct SigDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SigDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SigDigits(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::Format(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

/// One row per report under [`GAP_CSV_HEADER`]; `p` and `theta` are empty
/// for reports without exponents.
pub fn gap_csv(reports: &[GapReport<f64>]) -> String {
    let mut out = format!("{GAP_CSV_HEADER}\n");
    for r in reports {
        let (p, theta) = match &r.exponents {
            Some(e) => (format_f64(e.p()), format_f64(e.theta())),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{p},{theta},{},{},{},{}\n",
            r.label,
            format_f64(r.lhs),
            format_f64(r.rhs),
            format_f64(r.gap),
            r.holds
        ));
    }
    out
}

/// Rows `(p, s, chain)` under [`SCALAR_CSV_HEADER`].
pub fn scalar_csv(rows: &[(f64, f64, HChain)]) -> String {
    let mut out = format!("{SCALAR_CSV_HEADER}\n");
    for (p, s, c) in rows {
        let cells = [*p, *s, c.h, c.h1, c.h2, c.h2_prime].map(format_f64);
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
