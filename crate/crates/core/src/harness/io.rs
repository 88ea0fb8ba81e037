//! Plain-text matrix and potential files.
//!
//! Matrix files start with a `dim upper_dim` header line, followed by `dim`
//! rows of `dim` whitespace-separated entries written as `re+imj` (or
//! `re-imj`). Both parts use the shortest decimal that round-trips, so a
//! save/load cycle is bit-exact. Lines whose first non-blank character is `#`
//! are comments; blank lines are ignored.
//!
//! Tabulated potential files hold one real number per line.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::dirac::{CMatrix, Grading, GradedMatrix};
use crate::error::{FwError, Result};

/// Hermiticity tolerance applied when loading explicit Hamiltonians.
pub const LOAD_HERMITIAN_TOL: f64 = 1e-10;

pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}j", z.re, sign, z.im.abs())
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> FwError {
    FwError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses `re+imj` / `re-imj`.
pub fn parse_complex(token: &str, line: usize, column: usize) -> Result<Complex64> {
    let body = token
        .strip_suffix('j')
        .ok_or_else(|| parse_error(line, column, format!("entry `{token}` must end in `j`")))?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(|| parse_error(line, column, format!("entry `{token}` has no imaginary part")))?;
    let (re_str, im_str) = body.split_at(split);
    let bad = |what: &str| parse_error(line, column, format!("invalid {what} part in `{token}`"));
    let re: f64 = re_str.parse().map_err(|_| bad("real"))?;
    let im: f64 = im_str.parse().map_err(|_| bad("imaginary"))?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(parse_error(line, column, format!("non-finite entry `{token}`")));
    }
    Ok(Complex64::new(re, im))
}

pub fn format_matrix(m: &GradedMatrix) -> String {
    let g = m.grading();
    let mut out = String::new();
    writeln!(out, "{} {}", g.dim(), g.upper_dim()).unwrap();
    for i in 0..g.dim() {
        let row: Vec<String> = (0..g.dim())
            .map(|j| format_complex(m.entries()[(i, j)]))
            .collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

/// Data lines with their 1-based line numbers; comments and blanks dropped.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let t = l.trim_start();
        (!t.is_empty() && !t.starts_with('#')).then_some((k + 1, l))
    })
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace().map(move |tok| {
        let offset = tok.as_ptr() as usize - line.as_ptr() as usize;
        (line[..offset].chars().count() + 1, tok)
    })
}

/// Parses a matrix file without checking Hermiticity.
pub fn parse_matrix(text: &str) -> Result<GradedMatrix> {
    let mut lines = data_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_error(1, 1, "missing `dim upper_dim` header"))?;
    let fields: Vec<(usize, &str)> = tokens(header).collect();
    if fields.len() != 2 {
        return Err(parse_error(hline, 1, "header must be `dim upper_dim`"));
    }
    let int = |(col, tok): (usize, &str)| {
        tok.parse::<usize>()
            .map_err(|_| parse_error(hline, col, format!("`{tok}` is not a nonnegative integer")))
    };
    let dim = int(fields[0])?;
    let upper = int(fields[1])?;
    let grading = Grading::new(dim, upper).map_err(|e| parse_error(hline, 1, e.to_string()))?;

    let mut entries = CMatrix::zeros(dim, dim);
    let mut rows = 0;
    for (lineno, line) in lines {
        if rows == dim {
            return Err(parse_error(lineno, 1, format!("more than {dim} matrix rows")));
        }
        let mut count = 0;
        for (col, tok) in tokens(line) {
            if count == dim {
                return Err(parse_error(lineno, col, format!("row has more than {dim} entries")));
            }
            entries[(rows, count)] = parse_complex(tok, lineno, col)?;
            count += 1;
        }
        if count != dim {
            return Err(parse_error(
                lineno,
                line.chars().count() + 1,
                format!("row has {count} entries, expected {dim}"),
            ));
        }
        rows += 1;
    }
    if rows != dim {
        let last = text.lines().count();
        return Err(parse_error(last + 1, 1, format!("found {rows} matrix rows, expected {dim}")));
    }
    GradedMatrix::new(grading, entries)
}

/// Reads a matrix file and checks that it holds a Hermitian matrix.
pub fn load_explicit_matrix(path: impl AsRef<Path>) -> Result<GradedMatrix> {
    let text = fs::read_to_string(path)?;
    let m = parse_matrix(&text)?;
    let residual = m.hermiticity_residual();
    if residual > LOAD_HERMITIAN_TOL {
        return Err(FwError::NonHermitianInput { residual });
    }
    Ok(m)
}

pub fn save_matrix(path: impl AsRef<Path>, m: &GradedMatrix) -> Result<()> {
    write_atomic(path, format_matrix(m).as_bytes())
}

/// One real value per line.
pub fn parse_tabulated_potential(text: &str) -> Result<Vec<f64>> {
    data_lines(text)
        .map(|(lineno, line)| {
            let t = line.trim();
            let col = line.len() - line.trim_start().len() + 1;
            match t.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_error(lineno, col, format!("`{t}` is not a finite real number"))),
            }
        })
        .collect()
}

pub fn load_tabulated_potential(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_tabulated_potential(&fs::read_to_string(path)?)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| FwError::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::make_beta;

    #[test]
    fn complex_tokens() {
        let z = parse_complex("1.5-2e-3j", 1, 1).unwrap();
        assert_eq!(z, Complex64::new(1.5, -2e-3));
        let z = parse_complex("-1E+5+0.25j", 1, 1).unwrap();
        assert_eq!(z, Complex64::new(-1e5, 0.25));
        assert!(parse_complex("1.5", 1, 1).is_err());
        assert!(parse_complex("abc+1j", 1, 1).is_err());
        assert!(parse_complex("NaN+0j", 1, 1).is_err());
    }

    #[test]
    fn negative_zero_survives() {
        let z = Complex64::new(-0.0, -0.0);
        let back = parse_complex(&format_complex(z), 1, 1).unwrap();
        assert!(back.re.is_sign_negative() && back.im.is_sign_negative());
    }

    #[test]
    fn beta_file() {
        let text = "# beta for one site\n2 1\n1.0+0.0j 0.0+0.0j\n0.0+0.0j -1.0+0.0j\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m, make_beta(Grading::equal_blocks(1)));
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn mismatched_header_is_a_parse_error() {
        let text = "4 2\n1.0+0.0j 0.0+0.0j\n0.0+0.0j -1.0+0.0j\n";
        match parse_matrix(text) {
            Err(FwError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse_matrix("3 1\n"), Err(FwError::Parse { line: 1, .. })));
        assert!(matches!(parse_matrix("2\n"), Err(FwError::Parse { line: 1, .. })));
        assert!(matches!(parse_matrix(""), Err(FwError::Parse { .. })));
    }

    #[test]
    fn bad_entry_reports_column() {
        let text = "2 1\n1.0+0.0j 0.0+0.0j\n0.0+0.0j  oops\n";
        match parse_matrix(text) {
            Err(FwError::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 11);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn tabulated_values() {
        let v = parse_tabulated_potential("# V(x)\n0.5\n\n-1e-3\n").unwrap();
        assert_eq!(v, vec![0.5, -1e-3]);
        assert!(matches!(
            parse_tabulated_potential("0.5\nx\n"),
            Err(FwError::Parse { line: 2, .. })
        ));
    }
}
