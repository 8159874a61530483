//! Tab-separated estimate tables.
//!
//! Rows are `end_pos<TAB>value[<TAB>norm]`, preceded by one header row whose
//! first field is `end_pos`. Numbers use 12 significant digits.

use std::io::{BufRead, Write};
use std::path::Path;

use streamdist::AlignmentEstimate;

use crate::error::{CliError, CliResult};

/// `%.12g`-style formatting.
pub fn fmt_sig(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp).max(0) as usize, v);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One parsed row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub end_pos: usize,
    pub value: f64,
    pub norm: Option<f64>,
}

impl From<&AlignmentEstimate> for Row {
    fn from(e: &AlignmentEstimate) -> Self {
        Row {
            end_pos: e.end_pos,
            value: e.estimate,
            norm: e.converted_norm,
        }
    }
}

pub fn write_header(out: &mut impl Write, with_norm: bool) -> std::io::Result<()> {
    if with_norm {
        writeln!(out, "end_pos\tvalue\tnorm")
    } else {
        writeln!(out, "end_pos\tvalue")
    }
}

pub fn write_row(out: &mut impl Write, row: &Row) -> std::io::Result<()> {
    match row.norm {
        Some(n) => writeln!(out, "{}\t{}\t{}", row.end_pos, fmt_sig(row.value), fmt_sig(n)),
        None => writeln!(out, "{}\t{}", row.end_pos, fmt_sig(row.value)),
    }
}

/// Full table as bytes.
pub fn render(rows: &[Row], with_norm: bool) -> Vec<u8> {
    let mut out = Vec::new();
    write_header(&mut out, with_norm).expect("writing to a Vec");
    for r in rows {
        write_row(&mut out, r).expect("writing to a Vec");
    }
    out
}

pub fn read_rows(path: &Path, input: impl BufRead) -> CliResult<Vec<Row>> {
    let mut rows = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| CliError::io(path, e))?;
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') || line.starts_with("end_pos") {
            continue;
        }
        let mut fields = line.split('\t');
        let bad = |what: &str| CliError::parse(path, line_no, format!("bad {what} in {line:?}"));
        let end_pos = fields
            .next()
            .and_then(|f| f.parse::<usize>().ok())
            .ok_or_else(|| bad("end position"))?;
        let value = fields
            .next()
            .and_then(|f| f.parse::<f64>().ok())
            .ok_or_else(|| bad("value"))?;
        let norm = match fields.next() {
            Some(f) => Some(f.parse::<f64>().map_err(|_| bad("norm"))?),
            None => None,
        };
        if fields.next().is_some() {
            return Err(bad("column count"));
        }
        rows.push(Row { end_pos, value, norm });
    }
    Ok(rows)
}

pub fn read_rows_file(path: &Path) -> CliResult<Vec<Row>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_rows(path, std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(12.0), "12");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(2.0 / 3.0 * 1e4), "6666.66666667");
        assert_eq!(fmt_sig(1234567890123456.0), "1.23456789012e+15");
        assert_eq!(fmt_sig(0.00001234), "1.234e-05");
        assert_eq!(fmt_sig(0.0001234), "0.0001234");
        assert_eq!(fmt_sig(-2.5), "-2.5");
    }

    #[test]
    fn rows_round_trip() {
        let rows = vec![
            Row { end_pos: 4, value: 2.0, norm: Some(2f64.sqrt()) },
            Row { end_pos: 5, value: 0.1, norm: Some(0.1f64.sqrt()) },
        ];
        let bytes = render(&rows, true);
        let back = read_rows(Path::new("mem"), &bytes[..]).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.end_pos, b.end_pos);
            assert!((a.value - b.value).abs() <= 1e-11 * a.value.abs());
        }
    }

    #[test]
    fn missing_norm_column_is_accepted() {
        let rows = read_rows(Path::new("mem"), &b"end_pos\tvalue\n3\t1\n"[..]).unwrap();
        assert_eq!(rows, vec![Row { end_pos: 3, value: 1.0, norm: None }]);
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = read_rows(Path::new("mem"), &b"end_pos\tvalue\n3\t1\n4\tx\n"[..]).unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }));
    }
}
