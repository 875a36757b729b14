//! Matrix Market coordinate files (real or complex, general or symmetric).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str) -> Result<(Field, Symmetry)> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(1, "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`"));
    }
    if tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported object/format `{} {}`", tokens[1], tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(parse_err(1, format!("unsupported field `{other}`"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry `{other}`"))),
    };
    Ok((field, symmetry))
}

fn number(tok: Option<&str>, line: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing value"))?;
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("invalid number `{tok}`")))
}

fn index(tok: Option<&str>, line: usize, bound: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing index"))?;
    let i: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid index `{tok}`")))?;
    if i == 0 || i > bound {
        return Err(parse_err(line, format!("index {i} out of range 1..={bound}")));
    }
    Ok(i - 1)
}

/// Parse Matrix Market text into a dense square matrix.
pub fn parse_matrix_market(text: &str) -> Result<CMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (field, symmetry) = parse_header(header)?;

    let mut size: Option<(usize, usize, usize)> = None;
    let mut m = CMatrix::zeros(0, 0);
    let mut seen = 0usize;
    for (ln, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match size {
            None => {
                let rows = number(toks.next(), ln)? as usize;
                let cols = number(toks.next(), ln)? as usize;
                let nnz = number(toks.next(), ln)? as usize;
                if toks.next().is_some() {
                    return Err(parse_err(ln, "size line has extra tokens"));
                }
                if rows == 0 || cols == 0 {
                    return Err(parse_err(ln, "matrix has a zero dimension"));
                }
                if rows != cols {
                    return Err(Error::Dimension(format!("matrix is {rows}x{cols}, expected square")));
                }
                size = Some((rows, cols, nnz));
                m = CMatrix::zeros(rows, cols);
            }
            Some((rows, cols, nnz)) => {
                if seen == nnz {
                    return Err(parse_err(ln, format!("more than the declared {nnz} entries")));
                }
                let i = index(toks.next(), ln, rows)?;
                let j = index(toks.next(), ln, cols)?;
                let re = number(toks.next(), ln)?;
                let im = match field {
                    Field::Real => 0.0,
                    Field::Complex => number(toks.next(), ln)?,
                };
                if toks.next().is_some() {
                    return Err(parse_err(ln, "entry line has extra tokens"));
                }
                let z = c64(re, im);
                m[(i, j)] += z;
                if symmetry == Symmetry::Symmetric && i != j {
                    m[(j, i)] += z;
                }
                seen += 1;
            }
        }
    }
    let (_, _, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if seen != nnz {
        return Err(parse_err(
            text.lines().count(),
            format!("declared {nnz} entries, found {seen}"),
        ));
    }
    Ok(m)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CMatrix> {
    parse_matrix_market(&std::fs::read_to_string(path)?)
}

/// Coordinate/general writer; emits `real` when every entry is real.
pub fn format_matrix_market(m: &CMatrix) -> String {
    let is_real = m.iter().all(|z| z.im == 0.0);
    let zero = C64::new(0.0, 0.0);
    let nnz = m.iter().filter(|&&z| z != zero).count();
    let mut out = String::new();
    let field = if is_real { "real" } else { "complex" };
    let _ = writeln!(out, "%%MatrixMarket matrix coordinate {field} general");
    let _ = writeln!(out, "{} {} {}", m.nrows(), m.ncols(), nnz);
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if z == zero {
                continue;
            }
            if is_real {
                let _ = writeln!(out, "{} {} {:e}", i + 1, j + 1, z.re);
            } else {
                let _ = writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, z.re, z.im);
            }
        }
    }
    out
}

pub fn write_matrix_market(m: &CMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_matrix_market(m))?;
    Ok(())
}
