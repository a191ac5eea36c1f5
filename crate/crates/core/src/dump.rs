//! Plain-text field dump.
//!
//! ```text
//! # q1 64 0.0000000000000000e0 1.5625000000000000e3 rad/m
//! # q2 64 0.0000000000000000e0 1.5625000000000000e3 rad/m
//! 0 0 1.2345678901234567e-3 -4.5000000000000001e-5
//! ```
//!
//! One header line per axis (`label n center step unit`), then one row per
//! sample in row-major order: the index tuple, the real part and the
//! imaginary part, both with 17 significant digits.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Result, SpdcError};
use crate::field::{Axis, AxisLabel, ComplexField, RealField};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_header(out: &mut String, axes: &[Axis]) {
    for ax in axes {
        let _ = writeln!(
            out,
            "# {} {} {} {} {}",
            ax.label(),
            ax.len(),
            fmt_f64(ax.center()),
            fmt_f64(ax.step()),
            ax.unit()
        );
    }
}

fn write_index(out: &mut String, mut flat: usize, axes: &[Axis]) {
    let mut idx = vec![0; axes.len()];
    for (d, ax) in axes.iter().enumerate().rev() {
        idx[d] = flat % ax.len();
        flat /= ax.len();
    }
    for i in idx {
        let _ = write!(out, "{i} ");
    }
}

pub fn write_dump(field: &ComplexField) -> String {
    let mut out = String::new();
    write_header(&mut out, field.axes());
    for (flat, v) in field.data().iter().enumerate() {
        write_index(&mut out, flat, field.axes());
        let _ = writeln!(out, "{} {}", fmt_f64(v.re), fmt_f64(v.im));
    }
    out
}

/// Same layout as [`write_dump`] with a single value column.
pub fn write_real_dump(field: &RealField) -> String {
    let mut out = String::new();
    write_header(&mut out, field.axes());
    for (flat, v) in field.data().iter().enumerate() {
        write_index(&mut out, flat, field.axes());
        let _ = writeln!(out, "{}", fmt_f64(*v));
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> SpdcError {
    SpdcError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_dump(text: &str) -> Result<ComplexField> {
    let mut axes = Vec::new();
    let mut data = Vec::new();
    let mut expected_flat = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            if !data.is_empty() {
                return Err(parse_err(line_no, "axis header after sample rows"));
            }
            let toks: Vec<&str> = header.split_whitespace().collect();
            if toks.len() != 5 {
                return Err(parse_err(line_no, "axis header needs 'label n center step unit'"));
            }
            let label: AxisLabel = toks[0].parse().map_err(|e: SpdcError| parse_err(line_no, e.to_string()))?;
            let n: usize = toks[1].parse().map_err(|_| parse_err(line_no, "bad axis length"))?;
            let center: f64 = toks[2].parse().map_err(|_| parse_err(line_no, "bad axis center"))?;
            let step: f64 = toks[3].parse().map_err(|_| parse_err(line_no, "bad axis step"))?;
            if toks[4] != label.unit() {
                return Err(parse_err(
                    line_no,
                    format!("unit '{}' does not match axis {label} ({})", toks[4], label.unit()),
                ));
            }
            axes.push(Axis::new(label, n, center, step).map_err(|e| parse_err(line_no, e.to_string()))?);
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != axes.len() + 2 {
            return Err(parse_err(
                line_no,
                format!("expected {} columns, found {}", axes.len() + 2, toks.len()),
            ));
        }
        let mut flat = 0usize;
        for (ax, tok) in axes.iter().zip(&toks) {
            let i: usize = tok.parse().map_err(|_| parse_err(line_no, "bad index"))?;
            if i >= ax.len() {
                return Err(parse_err(line_no, format!("index {i} out of range for axis {}", ax.label())));
            }
            flat = flat * ax.len() + i;
        }
        if flat != expected_flat {
            return Err(parse_err(line_no, "sample rows are not in row-major order"));
        }
        expected_flat += 1;
        let re: f64 = toks[axes.len()].parse().map_err(|_| parse_err(line_no, "bad real part"))?;
        let im: f64 = toks[axes.len() + 1].parse().map_err(|_| parse_err(line_no, "bad imaginary part"))?;
        data.push(Complex64::new(re, im));
    }
    Ok(ComplexField::new(axes, data)?.with_normalized_flag())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_rows_have_documented_layout() {
        let ax = Axis::new(AxisLabel::W1, 2, 1.0, 0.5).unwrap();
        let f = ComplexField::new(vec![ax], vec![Complex64::new(1.0, -2.0), Complex64::new(0.1, 0.0)]).unwrap();
        let text = write_dump(&f);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# w1 2 1.0000000000000000e0 5.0000000000000000e-1 rad/s");
        assert_eq!(lines[1], "0 1.0000000000000000e0 -2.0000000000000000e0");
        assert_eq!(lines[2], "1 1.0000000000000001e-1 0.0000000000000000e0");
    }

    #[test]
    fn malformed_dumps_are_rejected_with_line_numbers() {
        let bad_unit = "# q1 2 0 1 rad/s\n0 1 0\n1 1 0\n";
        assert!(matches!(parse_dump(bad_unit), Err(SpdcError::Parse { line: 1, .. })));
        let out_of_order = "# q1 2 0 1 rad/m\n1 1 0\n0 1 0\n";
        assert!(matches!(parse_dump(out_of_order), Err(SpdcError::Parse { line: 2, .. })));
        let short = "# q1 3 0 1 rad/m\n0 1 0\n1 1 0\n";
        assert!(parse_dump(short).is_err());
    }

    proptest! {
        #[test]
        fn dump_round_trips_bit_exactly(
            vals in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::ZERO, 12),
            center in -1e15f64..1e15,
        ) {
            let a = Axis::new(AxisLabel::Q1, 3, center, 1.25e3).unwrap();
            let b = Axis::new(AxisLabel::Q2, 2, 0.0, 7.5e2).unwrap();
            let data: Vec<Complex64> = (0..6).map(|i| Complex64::new(vals[2 * i], vals[2 * i + 1])).collect();
            let f = ComplexField::new(vec![a, b], data).unwrap();
            let back = parse_dump(&write_dump(&f)).unwrap();
            prop_assert_eq!(back.axes(), f.axes());
            for (x, y) in back.data().iter().zip(f.data()) {
                prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }
}
