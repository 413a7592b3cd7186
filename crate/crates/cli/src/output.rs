//! Machine-readable output: JSON and CSV with 17 significant digits.
//!
//! Every floating-point number is written as `d.dddddddddddddddde±x`, which
//! round-trips an `f64` exactly and does not depend on the shortest-repr
//! algorithm of the platform.

use std::io::{self, Write};

use dirac_halfplane::edge::Spectrum;
use dirac_halfplane::scattering::TracePoint;
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

/// Formats one `f64` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// `serde_json` formatter writing floats through [`fmt_f64`], pretty-printed
/// with two-space indentation.
#[derive(Debug, Default)]
pub struct FixedDigits {
    indent: usize,
    has_value: bool,
}

impl FixedDigits {
    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

/// Serialises `value` as pretty JSON with 17-digit floats and a trailing
/// newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, FixedDigits::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Spectrum as CSV with columns `kx,omega,branch_id,kind`.
///
/// Edge rows have `kind = edge` and the branch index; the band boundary is
/// written as rows with `kind = band_upper` / `band_lower` and an empty
/// `branch_id`.
pub fn spectrum_csv(spec: &Spectrum) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kx", "omega", "branch_id", "kind"])?;
    for row in spec.rows() {
        w.write_record([fmt_f64(row.kx), fmt_f64(row.omega), row.branch_id.to_string(), "edge".into()])?;
    }
    for &(kx, edge) in &spec.band {
        w.write_record([fmt_f64(kx), fmt_f64(edge), String::new(), "band_upper".into()])?;
    }
    for &(kx, edge) in &spec.band {
        w.write_record([fmt_f64(kx), fmt_f64(-edge), String::new(), "band_lower".into()])?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Winding trace as CSV with columns `t,kx,kappa,re_s,im_s,cumulative_arg`;
/// the cumulative argument is in units of full turns.
pub fn trace_csv(trace: &[TracePoint]) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "kx", "kappa", "re_s", "im_s", "cumulative_arg"])?;
    for t in trace {
        w.write_record([t.t, t.kx, t.kappa, t.value.re, t.value.im, t.cumulative].map(fmt_f64))?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits_and_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = fmt_f64(v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_is_valid_and_exact() {
        #[derive(Serialize)]
        struct T {
            x: f64,
            v: Vec<f64>,
            n: i64,
            e: Vec<i32>,
        }
        let out = to_json(&T { x: 0.1, v: vec![1.0, -1e-20], n: 3, e: vec![] }).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
        assert_eq!(back["n"].as_i64(), Some(3));
        assert_eq!(back["e"], serde_json::json!([]));
    }

    #[test]
    fn non_finite_values_become_null() {
        let s = String::from_utf8(to_json(&[f64::NAN, 1.0]).unwrap()).unwrap();
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(back[0].is_null());
    }
}
