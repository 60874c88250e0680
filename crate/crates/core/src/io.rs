//! Plain-text point files: one point per line, whitespace-separated
//! coordinates (integer, decimal or `p/q`), `#` starts a comment, blank
//! lines are skipped. The dimension comes from the first data line.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geometry::{Pattern, PointSet};
use crate::scalar::{parse_scalar, Scalar};

/// Coordinate rows in file order.
pub fn read_rows(reader: impl BufRead) -> Result<Vec<Vec<Scalar>>> {
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let data = line.split('#').next().unwrap_or_default();
        if data.trim().is_empty() {
            continue;
        }
        let row = data
            .split_whitespace()
            .map(|t| parse_scalar(t).map_err(|source| Error::Parse { line: i + 1, source }))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Arity {
                    line: i + 1,
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Reads and deduplicates a point set; indices follow data-line order.
pub fn read_points(reader: impl BufRead) -> Result<PointSet> {
    PointSet::normalize(read_rows(reader)?)
}

pub fn read_pattern(reader: impl BufRead) -> Result<Pattern> {
    let rows = read_rows(reader)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    Pattern::new(rows)
}

/// Writes one point per line in input-index order.
pub fn write_points(mut out: impl Write, points: &PointSet) -> std::io::Result<()> {
    for p in points.points() {
        let row: Vec<String> = p.coords.iter().map(Scalar::to_string).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_decimals_and_fractions() {
        let text = "# header\n0 0\n\n1.5 -2/3  # trailing\n  7 8\n0 0\n";
        let set = read_points(text.as_bytes()).unwrap();
        assert_eq!(set.dim(), 2);
        assert_eq!(set.len(), 3);
        assert_eq!(set.coords(1), &[Scalar::ratio(3, 2), Scalar::ratio(-2, 3)]);
        assert_eq!(set.provenance(0), &[0, 3]);
    }

    #[test]
    fn errors_name_the_line() {
        let err = read_points("1 2\n3 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_points("1 2\n\n3 4 5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Arity { line: 3, expected: 2, found: 3 }));
        assert!(matches!(read_points("# nothing\n".as_bytes()), Err(Error::EmptyInput)));
        assert!(matches!(read_points("7/0\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn round_trip() {
        let set = PointSet::from_ints(&[[3, -1], [0, 2]]).unwrap();
        let mut buf = Vec::new();
        write_points(&mut buf, &set).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "3 -1\n0 2\n");
        assert_eq!(read_points(buf.as_slice()).unwrap(), set);
    }

    #[test]
    fn patterns_are_validated() {
        assert!(read_pattern("0 0\n1 0\n0 1\n".as_bytes()).is_ok());
        assert!(matches!(read_pattern("0 0\n1 1\n2 2\n".as_bytes()), Err(Error::InvalidPattern(_))));
    }
}
