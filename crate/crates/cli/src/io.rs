//! Matrix ingestion and export: CSV, the NBMF binary format, and P5 PGM
//! image directories.
//!
//! Binary layout: magic `NBMF`, format version u16 = 1, rows u32, cols u32,
//! then rows×cols little-endian f64 values in row-major order (integers are
//! little-endian too). PGM directories are read in lexicographic filename
//! order; each image becomes one matrix column of greyscale values scaled to
//! [0,1] by the image's maxval.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nbmf_core::matrix::{BinaryMatrix, DenseMatrix};

use crate::error::{CliError, CliResult};

pub const BINARY_MAGIC: &[u8; 4] = b"NBMF";
pub const BINARY_VERSION: u16 = 1;

/// Supported input encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Binary,
    PgmDir,
}

impl InputFormat {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(InputFormat::Csv),
            "binary" => Ok(InputFormat::Binary),
            "pgm-dir" => Ok(InputFormat::PgmDir),
            other => Err(CliError::config(format!(
                "unknown format '{other}' (expected csv, binary, or pgm-dir)"
            ))),
        }
    }
}

/// Reads a matrix in the requested format. `transpose` flips the pgm-dir
/// orientation (images as rows instead of columns) and transposes the other
/// formats as loaded.
pub fn ingest(path: &Path, format: InputFormat, transpose: bool) -> CliResult<DenseMatrix> {
    let matrix = match format {
        InputFormat::Csv => read_csv(path)?,
        InputFormat::Binary => read_binary(path)?,
        InputFormat::PgmDir => read_pgm_dir(path)?,
    };
    Ok(if transpose { matrix.transpose() } else { matrix })
}

pub fn read_csv(path: &Path) -> CliResult<DenseMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col_no, field) in line.split(',').enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| {
                CliError::data(format!(
                    "{}: line {}, field {}: cannot parse '{}' as a number",
                    path.display(),
                    line_no + 1,
                    col_no + 1,
                    field.trim()
                ))
            })?;
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::data(format!(
                    "{}: line {} has {} fields but line 1 has {}",
                    path.display(),
                    line_no + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::data(format!("{}: no rows", path.display())));
    }
    let (r, c) = (rows.len(), rows[0].len());
    DenseMatrix::from_vec(r, c, rows.into_iter().flatten().collect())
        .map_err(|e| CliError::data(e.to_string()))
}

pub fn write_csv(path: &Path, matrix: &DenseMatrix) -> CliResult<()> {
    let mut out = String::new();
    for i in 0..matrix.rows() {
        let row: Vec<String> = matrix.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn read_binary(path: &Path) -> CliResult<DenseMatrix> {
    let mut file = fs::File::open(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut buf = Vec::new();
    file.read_to_end(&mut buf)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let fail = |offset: usize, what: &str| {
        CliError::data(format!(
            "{}: offset {offset}: {what}",
            path.display()
        ))
    };
    if buf.len() < 14 {
        return Err(fail(buf.len(), "truncated header"));
    }
    if &buf[0..4] != BINARY_MAGIC {
        return Err(fail(0, "bad magic (expected NBMF)"));
    }
    let version = u16::from_le_bytes([buf[4], buf[5]]);
    if version != BINARY_VERSION {
        return Err(fail(4, &format!("unsupported version {version}")));
    }
    let rows = u32::from_le_bytes([buf[6], buf[7], buf[8], buf[9]]) as usize;
    let cols = u32::from_le_bytes([buf[10], buf[11], buf[12], buf[13]]) as usize;
    let expected = 14 + rows * cols * 8;
    if buf.len() != expected {
        return Err(fail(
            buf.len().min(expected),
            &format!("expected {expected} bytes for {rows}x{cols}, got {}", buf.len()),
        ));
    }
    let values: Vec<f64> = buf[14..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    DenseMatrix::from_vec(rows, cols, values).map_err(|e| CliError::data(e.to_string()))
}

pub fn write_binary(path: &Path, matrix: &DenseMatrix) -> CliResult<()> {
    let mut out = Vec::with_capacity(14 + matrix.values().len() * 8);
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&BINARY_VERSION.to_le_bytes());
    out.extend_from_slice(&(matrix.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(matrix.cols() as u32).to_le_bytes());
    for v in matrix.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut file = fs::File::create(path)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    file.write_all(&out)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

/// Writes a binary factor through the same container, with bits as 0.0/1.0.
pub fn write_binary_matrix(path: &Path, matrix: &BinaryMatrix) -> CliResult<()> {
    let values: Vec<f64> = matrix.bits().iter().map(|&b| f64::from(b)).collect();
    let dense = DenseMatrix::from_vec(matrix.rows(), matrix.cols(), values)
        .map_err(|e| CliError::runtime(e.to_string()))?;
    write_binary(path, &dense)
}

struct Pgm {
    width: usize,
    height: usize,
    /// Pixels scaled to [0,1], row-major.
    pixels: Vec<f64>,
}

fn read_pgm(path: &Path) -> CliResult<Pgm> {
    let buf = fs::read(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let fail = |offset: usize, what: &str| {
        CliError::data(format!("{}: offset {offset}: {what}", path.display()))
    };
    if buf.len() < 2 || &buf[0..2] != b"P5" {
        return Err(fail(0, "not a P5 PGM"));
    }
    // Header tokens may be separated by whitespace and '#' comments.
    let mut pos = 2;
    let mut tokens = Vec::with_capacity(3);
    while tokens.len() < 3 {
        while pos < buf.len() && (buf[pos].is_ascii_whitespace() || buf[pos] == b'#') {
            if buf[pos] == b'#' {
                while pos < buf.len() && buf[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < buf.len() && !buf[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(fail(start, "truncated header"));
        }
        let token = std::str::from_utf8(&buf[start..pos])
            .map_err(|_| fail(start, "non-ASCII header token"))?;
        let value: usize = token
            .parse()
            .map_err(|_| fail(start, &format!("bad header token '{token}'")))?;
        tokens.push(value);
    }
    if pos >= buf.len() {
        return Err(fail(pos, "missing pixel data"));
    }
    pos += 1; // single whitespace after maxval
    let (width, height, maxval) = (tokens[0], tokens[1], tokens[2]);
    if width == 0 || height == 0 {
        return Err(fail(2, "zero image dimension"));
    }
    if maxval == 0 || maxval > 65_535 {
        return Err(fail(2, &format!("maxval {maxval} out of range")));
    }
    let count = width * height;
    let data = &buf[pos..];
    let pixels: Vec<f64> = if maxval < 256 {
        if data.len() != count {
            return Err(fail(pos, &format!("expected {count} pixel bytes, got {}", data.len())));
        }
        data.iter().map(|&b| f64::from(b) / maxval as f64).collect()
    } else {
        if data.len() != 2 * count {
            return Err(fail(
                pos,
                &format!("expected {} pixel bytes, got {}", 2 * count, data.len()),
            ));
        }
        data.chunks_exact(2)
            .map(|c| f64::from(u16::from_be_bytes([c[0], c[1]])) / maxval as f64)
            .collect()
    };
    Ok(Pgm {
        width,
        height,
        pixels,
    })
}

/// Loads every `.pgm` in a directory (lexicographic filename order) and
/// flattens each image into one matrix column.
pub fn read_pgm_dir(dir: &Path) -> CliResult<DenseMatrix> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .map(|e| e.eq_ignore_ascii_case("pgm"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort_by_key(|p| p.file_name().map(|n| n.to_owned()));
    if paths.is_empty() {
        return Err(CliError::data(format!(
            "{}: no .pgm files found",
            dir.display()
        )));
    }

    let first = read_pgm(&paths[0])?;
    let pixels_per_image = first.width * first.height;
    let mut columns = vec![first.pixels];
    for path in &paths[1..] {
        let img = read_pgm(path)?;
        if img.width != first.width || img.height != first.height {
            return Err(CliError::data(format!(
                "{}: image is {}x{} but {} is {}x{}",
                path.display(),
                img.width,
                img.height,
                paths[0].display(),
                first.width,
                first.height
            )));
        }
        columns.push(img.pixels);
    }

    let m = columns.len();
    let mut values = vec![0.0; pixels_per_image * m];
    for (j, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            values[i * m + j] = v;
        }
    }
    DenseMatrix::from_vec(pixels_per_image, m, values).map_err(|e| CliError::data(e.to_string()))
}

/// FNV-1a content fingerprint of raw bytes.
pub fn fingerprint_bytes(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325_u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Fingerprint of an input path: file bytes, or for a directory the
/// (filename, bytes) stream of its `.pgm` files in lexicographic order.
pub fn fingerprint_input(path: &Path) -> CliResult<u64> {
    if path.is_dir() {
        let entries = fs::read_dir(path)
            .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
        let mut paths: Vec<_> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .map(|e| e.eq_ignore_ascii_case("pgm"))
                    .unwrap_or(false)
            })
            .collect();
        paths.sort_by_key(|p| p.file_name().map(|n| n.to_owned()));
        let mut stream = Vec::new();
        for p in paths {
            if let Some(name) = p.file_name() {
                stream.extend_from_slice(name.to_string_lossy().as_bytes());
            }
            let bytes = fs::read(&p)
                .map_err(|e| CliError::data(format!("cannot read {}: {e}", p.display())))?;
            stream.extend_from_slice(&bytes);
        }
        Ok(fingerprint_bytes(&stream))
    } else {
        let bytes = fs::read(path)
            .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
        Ok(fingerprint_bytes(&bytes))
    }
}
