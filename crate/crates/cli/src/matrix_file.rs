//! Plain-text matrices: the dimension `n` on the first line, then `n` rows
//! of `n` whitespace-separated numbers. Blank lines and `#` comments are
//! ignored.

use std::path::Path;

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatrixFileError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>, MatrixFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or(MatrixFileError::Parse { line: 1, message: "empty file".into() })?;
    let n: usize = header.parse().map_err(|_| MatrixFileError::Parse {
        line: first,
        message: format!("expected the dimension, got `{header}`"),
    })?;
    if n == 0 {
        return Err(MatrixFileError::Parse { line: first, message: "dimension must be positive".into() });
    }
    let mut data = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (line, row) in lines {
        let values = row
            .split_whitespace()
            .map(|t| t.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| MatrixFileError::Parse { line, message: "entries must be finite numbers".into() })?;
        if values.len() != n {
            return Err(MatrixFileError::Parse {
                line,
                message: format!("expected {n} entries, found {}", values.len()),
            });
        }
        rows += 1;
        if rows > n {
            return Err(MatrixFileError::RowCount { expected: n, found: rows });
        }
        data.extend(values);
    }
    if rows != n {
        return Err(MatrixFileError::RowCount { expected: n, found: rows });
    }
    Ok(DMatrix::from_row_slice(n, n, &data))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>, MatrixFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| MatrixFileError::Io { path: path.display().to_string(), source })?;
    parse_matrix(&text)
}

/// Inverse of [`parse_matrix`], with 17 significant digits.
pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut out = format!("{}\n", m.nrows());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| crate::report::fmt_num(m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.1, -3.5e-7]);
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn comments_and_blank_lines() {
        let m = parse_matrix("# pair\n2\n\n1 0 # first\n0 -1\n").unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
    }

    #[test]
    fn malformed_files() {
        assert!(matches!(parse_matrix("2\n1 0\n"), Err(MatrixFileError::RowCount { expected: 2, found: 1 })));
        assert!(matches!(parse_matrix("2\n1 0 0\n0 1\n"), Err(MatrixFileError::Parse { line: 2, .. })));
        assert!(matches!(parse_matrix("two\n"), Err(MatrixFileError::Parse { line: 1, .. })));
        assert!(matches!(parse_matrix("1\nnan\n"), Err(MatrixFileError::Parse { .. })));
        assert!(matches!(parse_matrix("1\n1\n2\n"), Err(MatrixFileError::RowCount { .. })));
        assert!(parse_matrix("").is_err());
    }
}
