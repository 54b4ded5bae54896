//! Plain-text curve records.
//!
//! ```text
//! # msflow curve
//! N 64
//! container_radius 1
//! c <k> <re> <im>      one complex Fourier coefficient of z = x + iy per line
//! ```

use std::fmt::Write as _;

use rustfft::num_complex::Complex64;

use super::{Container, CurveSpec, GeometryError, ReferenceCurve};
use crate::spectral::wavenumber;

/// Serialize a curve and its container as a coefficient table.
pub fn write_curve(curve: &ReferenceCurve, container: &Container) -> String {
    let mut out = String::new();
    let n = curve.len();
    writeln!(out, "# msflow curve").unwrap();
    writeln!(out, "N {n}").unwrap();
    writeln!(out, "container_radius {:?}", container.radius()).unwrap();
    for (idx, c) in curve.coefficients().iter().enumerate() {
        writeln!(out, "c {} {:?} {:?}", wavenumber(idx, n), c.re, c.im).unwrap();
    }
    out
}

/// Parsed header and coefficient lines; shared with the height-field format.
pub(crate) struct CurveRecord {
    pub n: usize,
    pub container: Container,
    pub coeffs: Vec<(i64, Complex64)>,
}

fn bad(line: usize, msg: &str) -> GeometryError {
    GeometryError::InvalidSpec(format!("line {}: {msg}", line + 1))
}

pub(crate) fn parse_record<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    mut extra: impl FnMut(usize, &[&str]) -> Result<bool, GeometryError>,
) -> Result<CurveRecord, GeometryError> {
    let mut n = None;
    let mut radius = None;
    let mut coeffs = Vec::new();
    for (no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |i: usize| -> Result<f64, GeometryError> {
            fields.get(i).ok_or_else(|| bad(no, "missing field"))?.parse::<f64>().map_err(|e| bad(no, &e.to_string()))
        };
        match fields[0] {
            "N" => n = Some(num(1)? as usize),
            "container_radius" => radius = Some(num(1)?),
            "c" => {
                let k = fields.get(1).ok_or_else(|| bad(no, "missing mode"))?;
                let k: i64 = k.parse().map_err(|_| bad(no, "mode must be an integer"))?;
                coeffs.push((k, Complex64::new(num(2)?, num(3)?)));
            }
            _ => {
                if !extra(no, &fields)? {
                    return Err(bad(no, &format!("unknown record '{}'", fields[0])));
                }
            }
        }
    }
    let n = n.ok_or_else(|| GeometryError::InvalidSpec("missing 'N' header".into()))?;
    let container = Container::disk(radius.ok_or_else(|| GeometryError::InvalidSpec("missing 'container_radius' header".into()))?)?;
    Ok(CurveRecord { n, container, coeffs })
}

pub fn read_curve(text: &str) -> Result<(ReferenceCurve, Container), GeometryError> {
    let rec = parse_record(text.lines().enumerate(), |_, _| Ok(false))?;
    let curve = ReferenceCurve::build(&CurveSpec::Coefficients(rec.coeffs), rec.n, &rec.container)?;
    Ok((curve, rec.container))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn ellipse_roundtrip() {
        let boxed = Container::disk(1.5).unwrap();
        let spec = CurveSpec::Ellipse { center: Point::new(0.1, -0.2), semi_axes: (0.5, 0.4) };
        let c = ReferenceCurve::build(&spec, 64, &boxed).unwrap();
        let text = write_curve(&c, &boxed);
        let (back, cont) = read_curve(&text).unwrap();
        assert_eq!(cont, boxed);
        for (p, q) in c.points().iter().zip(back.points()) {
            assert!((p - q).norm() < 1e-15);
        }
    }

    #[test]
    fn missing_header_is_reported() {
        let err = read_curve("N 16\nc 1 0.3 0\n").unwrap_err();
        assert!(err.to_string().contains("container_radius"));
    }
}
