//! Text formats: Matrix Market coordinate files, plain vectors, permutation and
//! block-diagonal listings.
//!
//! Block listing, one block per line, indices 0-based in permuted order:
//!
//! ```text
//! 1 i v
//! 2 i j v11 v12 v22
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::factors::{BlockDiagonal, PivotBlock, UnitLowerTriangular};
use crate::matrix::SymmetricSparseMatrix;
use crate::permutation::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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

/// Reads a real (or integer) coordinate Matrix Market file. `symmetric` files have
/// their stored triangle mirrored; `general` files must already be symmetric.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<SymmetricSparseMatrix> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(
            1,
            "expected '%%MatrixMarket matrix coordinate real <symmetry>'",
        ));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported format '{}'", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field '{}'", tokens[3])));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(line_no, "expected 'rows cols entries'"));
                }
                let rows: usize = parse_field(fields[0], line_no)?;
                let cols: usize = parse_field(fields[1], line_no)?;
                let entries: usize = parse_field(fields[2], line_no)?;
                if rows != cols {
                    return Err(parse_err(
                        line_no,
                        format!("matrix is {rows}×{cols}, not square"),
                    ));
                }
                size = Some((rows, entries));
                triplets.reserve(entries);
            }
            Some((n, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err(line_no, "expected 'row col value'"));
                }
                let i: usize = parse_field(fields[0], line_no)?;
                let j: usize = parse_field(fields[1], line_no)?;
                let v: f64 = parse_field(fields[2], line_no)?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(
                        line_no,
                        format!("index ({i}, {j}) outside 1..={n}"),
                    ));
                }
                let (i, j) = (i - 1, j - 1);
                let key = match symmetry {
                    Symmetry::General => (i, j),
                    Symmetry::Symmetric => (i.max(j), i.min(j)),
                };
                triplets.push((key.0, key.1, v));
            }
        }
    }
    let (n, entries) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if triplets.len() != entries {
        return Err(parse_err(
            0,
            format!(
                "size line announces {entries} entries but {} were read",
                triplets.len()
            ),
        ));
    }
    SymmetricSparseMatrix::from_triplets(n, triplets)
}

fn parse_field<T: std::str::FromStr>(field: &str, line: usize) -> Result<T> {
    field
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse '{field}'")))
}

pub fn read_matrix_market_file(path: impl AsRef<Path>) -> Result<SymmetricSparseMatrix> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

/// Writes the lower triangle with the `symmetric` qualifier.
pub fn write_matrix_market<W: Write>(mut w: W, m: &SymmetricSparseMatrix) -> Result<()> {
    let lower: Vec<(usize, usize, f64)> = m.lower_triplets().collect();
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{} {} {}", m.n(), m.n(), lower.len())?;
    for (i, j, v) in lower {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

pub fn write_matrix_market_file(path: impl AsRef<Path>, m: &SymmetricSparseMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market(&mut w, m)?;
    w.flush()?;
    Ok(())
}

/// Writes `L` (unit diagonal included) as a `general` coordinate file.
pub fn write_lower_factor<W: Write>(mut w: W, l: &UnitLowerTriangular) -> Result<()> {
    let n = l.n();
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", n, n, l.nnz_with_diagonal())?;
    for j in 0..n {
        writeln!(w, "{} {} {:e}", j + 1, j + 1, 1.0)?;
        for &(r, v) in l.column(j) {
            writeln!(w, "{} {} {:e}", r + 1, j + 1, v)?;
        }
    }
    Ok(())
}

pub fn write_blocks<W: Write>(mut w: W, b: &BlockDiagonal) -> Result<()> {
    for (k, block) in b.with_offsets() {
        match *block {
            PivotBlock::Scalar(v) => writeln!(w, "1 {k} {v:e}")?,
            PivotBlock::TwoByTwo { b11, b12, b22, .. } => {
                writeln!(w, "2 {k} {} {b11:e} {b12:e} {b22:e}", k + 1)?
            }
        }
    }
    Ok(())
}

pub fn read_blocks<R: BufRead>(reader: R) -> Result<BlockDiagonal> {
    let mut blocks = BlockDiagonal::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let offset = blocks.dim();
        let expect_index = |field: &str, want: usize| -> Result<()> {
            let got: usize = parse_field(field, line_no)?;
            if got != want {
                return Err(parse_err(
                    line_no,
                    format!("expected block index {want}, found {got}"),
                ));
            }
            Ok(())
        };
        match (fields[0], fields.len()) {
            ("1", 3) => {
                expect_index(fields[1], offset)?;
                blocks.push(PivotBlock::Scalar(parse_field(fields[2], line_no)?));
            }
            ("2", 6) => {
                expect_index(fields[1], offset)?;
                expect_index(fields[2], offset + 1)?;
                blocks.push(PivotBlock::two_by_two(
                    parse_field(fields[3], line_no)?,
                    parse_field(fields[4], line_no)?,
                    parse_field(fields[5], line_no)?,
                ));
            }
            _ => {
                return Err(parse_err(
                    line_no,
                    "expected '1 i v' or '2 i j v11 v12 v22'",
                ))
            }
        }
    }
    Ok(blocks)
}

/// One original index per line: line `k` holds the original index eliminated at
/// position `k`.
pub fn write_permutation<W: Write>(mut w: W, p: &Permutation) -> Result<()> {
    for &i in p.inverse() {
        writeln!(w, "{i}")?;
    }
    Ok(())
}

pub fn read_permutation<R: BufRead>(reader: R) -> Result<Permutation> {
    let order: Vec<usize> = read_values(reader)?;
    Permutation::from_order(order)
}

/// Plain-text vector, one value per line. Blank lines and lines starting with `#` or
/// `%` are skipped.
pub fn read_vector<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    read_values(reader)
}

pub fn read_vector_file(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    read_vector(BufReader::new(File::open(path)?))
}

pub fn write_vector<W: Write>(mut w: W, v: &[f64]) -> Result<()> {
    for x in v {
        writeln!(w, "{x:e}")?;
    }
    Ok(())
}

fn read_values<T: std::str::FromStr, R: BufRead>(reader: R) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        out.push(parse_field(t, idx + 1)?);
    }
    Ok(out)
}
