//! Comma-separated decision matrices.
//!
//! ```text
//! id,delay,bandwidth
//! #direction,cost,benefit
//! N1,12.5,40
//! N2,8,25
//! ```
//!
//! The `#direction` row is optional; attributes default to benefit. Blank
//! lines are ignored. Line and column numbers in errors are 1-based.

use std::path::Path;

use crate::decision::{AttributeSpec, DecisionMatrix, Direction};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const DIRECTION_MARKER: &str = "#direction";

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_matrix<T: Scalar>(text: &str) -> Result<DecisionMatrix<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut header: Option<Vec<String>> = None;
    let mut directions: Option<Vec<Direction>> = None;
    let mut ids = Vec::new();
    let mut rows: Vec<Vec<T>> = Vec::new();

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(line, 0, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let Some(names) = &header else {
            if record.len() < 2 {
                return Err(parse_error(line, 1, "header needs an id column and at least one attribute"));
            }
            let names: Vec<String> = record.iter().skip(1).map(str::to_string).collect();
            if let Some(c) = names.iter().position(String::is_empty) {
                return Err(parse_error(line, c + 2, "empty attribute name"));
            }
            header = Some(names);
            continue;
        };
        let n = names.len();
        if record.len() != n + 1 {
            return Err(parse_error(
                line,
                record.len().min(n + 1) + 1,
                format!("expected {} fields, found {}", n + 1, record.len()),
            ));
        }
        if &record[0] == DIRECTION_MARKER {
            if directions.is_some() || !rows.is_empty() {
                return Err(parse_error(line, 1, "direction row must directly follow the header"));
            }
            let dirs = record
                .iter()
                .skip(1)
                .enumerate()
                .map(|(c, s)| s.parse::<Direction>().map_err(|e| parse_error(line, c + 2, e)))
                .collect::<Result<Vec<_>>>()?;
            directions = Some(dirs);
            continue;
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(parse_error(line, 1, "empty node id"));
        }
        if ids.contains(&id) {
            return Err(parse_error(line, 1, format!("duplicate node id `{id}`")));
        }
        let mut row = Vec::with_capacity(n);
        for (c, cell) in record.iter().skip(1).enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_error(line, c + 2, format!("`{cell}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_error(line, c + 2, format!("`{cell}` is not finite")));
            }
            row.push(T::lit(v));
        }
        ids.push(id);
        rows.push(row);
    }

    let names = header.ok_or_else(|| parse_error(1, 1, "missing header row"))?;
    if rows.is_empty() {
        return Err(parse_error(0, 0, "no data rows"));
    }
    let directions = directions.unwrap_or_else(|| vec![Direction::Benefit; names.len()]);
    let attrs = names
        .into_iter()
        .zip(directions)
        .map(|(name, direction)| AttributeSpec { name, direction })
        .collect();
    DecisionMatrix::new(ids, attrs, rows)
}

pub fn read_matrix<T: Scalar>(path: impl AsRef<Path>) -> Result<DecisionMatrix<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix(&text)
}

/// Renders a matrix; the direction row is written only when some attribute
/// is a cost.
pub fn format_matrix<T: Scalar>(matrix: &DecisionMatrix<T>) -> String {
    let mut out = String::from("id");
    for a in matrix.attributes() {
        out.push(',');
        out.push_str(&a.name);
    }
    out.push('\n');
    if matrix.attributes().iter().any(|a| a.direction == Direction::Cost) {
        out.push_str(DIRECTION_MARKER);
        for a in matrix.attributes() {
            out.push_str(match a.direction {
                Direction::Benefit => ",benefit",
                Direction::Cost => ",cost",
            });
        }
        out.push('\n');
    }
    for (j, id) in matrix.node_ids().iter().enumerate() {
        out.push_str(id);
        for v in matrix.row(j) {
            out.push_str(&format!(",{}", v.as_f64()));
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix<T: Scalar>(path: impl AsRef<Path>, matrix: &DecisionMatrix<T>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_matrix(matrix))
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_directions() {
        let m: DecisionMatrix<f64> = parse_matrix("id,delay,bw\n#direction,cost,benefit\nA,2,40\n\nB,4,25\n").unwrap();
        assert_eq!(m.node_ids(), ["A", "B"]);
        assert_eq!(m.attributes()[0].direction, Direction::Cost);
        assert_eq!(m.row(1), [4.0, 25.0]);
    }

    #[test]
    fn round_trips() {
        let m: DecisionMatrix<f64> = parse_matrix("id,a,b\n#direction,benefit,cost\nx,0.1,3\ny,0.30000000000000004,7\n").unwrap();
        assert_eq!(parse_matrix::<f64>(&format_matrix(&m)).unwrap(), m);
        let plain = DecisionMatrix::from_rows(vec![vec![0.5]]).unwrap();
        assert_eq!(format_matrix(&plain), "id,P1\nN1,0.5\n");
    }

    #[test]
    fn errors_name_line_and_column() {
        let e = parse_matrix::<f64>("id,a,b\nN1,1,x\n").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 2,
                column: 3,
                message: "`x` is not a number".into()
            }
        );
        let e = parse_matrix::<f64>("id,a,b\nN1,1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_matrix::<f64>("id,a\nN1,1\nN1,2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, column: 1, .. }));
        let e = parse_matrix::<f64>("id,a\n#direction,up\nN1,1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 2, .. }));
        assert!(parse_matrix::<f64>("id,a\n").is_err());
        assert!(parse_matrix::<f64>("id,a\nN1,inf\n").is_err());
    }
}
