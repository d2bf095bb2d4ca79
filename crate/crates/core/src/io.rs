//! Dataset CSV files.
//!
//! A header `x,y`, then one record per line. Lines starting with `#` are
//! comments, fields may be decimal or scientific, and LF or CRLF endings are
//! both accepted. Values are written with 17 significant digits, which
//! round-trips every binary64 value exactly.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::estimators::Dataset;
use crate::kinematics::Scale;

/// Observations with the 1-based file line of each record.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvPairs {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lines: Vec<u64>,
}

/// Data lines of the file with their 1-based physical line numbers. Blank
/// and `#` lines are dropped here, so record `k` of the reader is entry `k`.
struct Lines {
    numbers: Vec<u64>,
    text: String,
}

impl Lines {
    fn new(raw: &str) -> Self {
        let mut numbers = Vec::new();
        let mut text = String::new();
        for (i, line) in raw.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            numbers.push(i as u64 + 1);
            text.push_str(line);
            text.push('\n');
        }
        Lines { numbers, text }
    }

    fn of_record(&self, record: u64) -> u64 {
        self.numbers.get(record as usize).copied().unwrap_or(0)
    }

    fn error(&self, e: csv::Error) -> Error {
        let line = e.position().map_or(0, |p| self.of_record(p.record()));
        let message = match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => format!("expected {expected_len} fields, found {len}"),
            _ => e.to_string(),
        };
        Error::Parse { line, message }
    }
}

fn parse_field(field: &str, name: &str, line: u64) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("{name} value `{field}` is not a number"),
    })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse {
            line,
            message: format!("{name} value `{field}` is not finite"),
        })
    }
}

pub fn read_pairs<R: Read>(mut reader: R) -> Result<CsvPairs> {
    let mut raw = String::new();
    reader.read_to_string(&mut raw).map_err(|e| Error::Parse {
        line: 0,
        message: format!("reading CSV: {e}"),
    })?;
    let lines = Lines::new(&raw);
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(lines.text.as_bytes());
    let header = csv.headers().map_err(|e| lines.error(e))?.clone();
    if header.len() != 2 || &header[0] != "x" || &header[1] != "y" {
        return Err(Error::Parse {
            line: lines.of_record(0),
            message: format!(
                "header must be `x,y`, found `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut pairs = CsvPairs {
        x: Vec::new(),
        y: Vec::new(),
        lines: Vec::new(),
    };
    for record in csv.records() {
        let record = record.map_err(|e| lines.error(e))?;
        let line = record.position().map_or(0, |p| lines.of_record(p.record()));
        pairs.x.push(parse_field(&record[0], "x", line)?);
        pairs.y.push(parse_field(&record[1], "y", line)?);
        pairs.lines.push(line);
    }
    Ok(pairs)
}

/// Reads a dataset, bounded by `c` when given. Errors about a particular
/// observation name its file line.
pub fn read_dataset<R: Read>(reader: R, c: Option<Scale>) -> Result<Dataset> {
    let CsvPairs { x, y, lines } = read_pairs(reader)?;
    let built = match c {
        Some(c) => Dataset::new(x, y, c),
        None => Dataset::unbounded(x, y),
    };
    built.map_err(|e| match e {
        Error::AtRow { row, source } => Error::Parse {
            line: lines.get(row - 1).copied().unwrap_or(0),
            message: source.to_string(),
        },
        other => other,
    })
}

pub fn write_pairs<W: Write>(writer: W, x: &[f64], y: &[f64]) -> Result<()> {
    let io = |e: csv::Error| Error::Numeric(format!("writing CSV: {e}"));
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["x", "y"]).map_err(io)?;
    for (a, b) in x.iter().zip(y) {
        csv.write_record([format!("{a:.16e}"), format!("{b:.16e}")])
            .map_err(io)?;
    }
    csv.flush()
        .map_err(|e| Error::Numeric(format!("writing CSV: {e}")))
}

pub fn write_dataset<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    write_pairs(writer, data.x(), data.y())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_comments_crlf_and_scientific() {
        let text = "# generated\r\nx,y\r\n-2e-1,-0.1\r\n# mid comment\r\n\r\n0.3, 1E2\r\n";
        let p = read_pairs(text.as_bytes()).unwrap();
        assert_eq!(p.x, vec![-0.2, 0.3]);
        assert_eq!(p.y, vec![-0.1, 100.0]);
        assert_eq!(p.lines, vec![3, 6]);
    }

    #[test]
    fn errors_name_the_line() {
        let bad = "x,y\n0.1,2\n0.2,abc\n";
        assert!(matches!(read_pairs(bad.as_bytes()), Err(Error::Parse { line: 3, .. })));
        let ragged = "x,y\n0.1,2,3\n";
        assert!(matches!(read_pairs(ragged.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let nan = "x,y\n0.1,NaN\n";
        assert!(matches!(read_pairs(nan.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let header = "a,b\n0.1,2\n";
        assert!(matches!(read_pairs(header.as_bytes()), Err(Error::Parse { .. })));
        let out = "# note\nx,y\n0.1,1\n1.5,2\n";
        let c = Scale::new(1.0).unwrap();
        match read_dataset(out.as_bytes(), Some(c)) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("1.5"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_file_is_insufficient() {
        let c = Scale::new(1.0).unwrap();
        assert!(matches!(
            read_dataset("x,y\n".as_bytes(), Some(c)),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn round_trip_is_exact() {
        let x = vec![0.1, -1.0 / 3.0, 5e-324, -0.0, 0.999_999_999_999_999_9];
        let y = vec![1e300, -2.5, std::f64::consts::PI, 7.0, -1e-300];
        let mut buf = Vec::new();
        write_pairs(&mut buf, &x, &y).unwrap();
        let p = read_pairs(buf.as_slice()).unwrap();
        for (a, b) in p.x.iter().zip(&x).chain(p.y.iter().zip(&y)) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
