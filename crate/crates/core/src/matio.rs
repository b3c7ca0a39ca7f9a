//! Matrix Market ingestion, the `(A + A*)/2` symmetrization used for the
//! symmetric experiments, and deterministic synthetic test models.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::dense::{re, DenseMatrix, Scalar, ZERO};
use crate::error::{Error, Result};
use crate::rng;

/// Largest dimension expanded to dense storage.
pub const MAX_DENSE_DIM: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtxFormat {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtxField {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtxSymmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

/// Parsed `%%MatrixMarket matrix <format> <field> <symmetry>` banner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MtxHeader {
    pub format: MtxFormat,
    pub field: MtxField,
    pub symmetry: MtxSymmetry,
}

#[derive(Debug, Error, PartialEq)]
pub enum MtxError {
    #[error("line {line}: malformed banner: {reason}")]
    Banner { line: usize, reason: String },
    #[error("line {line}: unsupported {what}")]
    Unsupported { line: usize, what: String },
    #[error("line {line}: malformed size line")]
    SizeLine { line: usize },
    #[error("line {line}: dimension {dim} exceeds the dense limit of {MAX_DENSE_DIM}")]
    TooLarge { line: usize, dim: usize },
    #[error("line {line}: invalid entry: {reason}")]
    Entry { line: usize, reason: String },
    #[error("line {line}: index ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    IndexOutOfRange {
        line: usize,
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("line {line}: duplicate entry ({row}, {col})")]
    DuplicateEntry { line: usize, row: usize, col: usize },
    #[error("line {line}: truncated body, expected {expected} entries but found {found}")]
    Truncated {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: data after the last expected entry")]
    TrailingData { line: usize },
    #[error("input is not valid UTF-8")]
    Encoding,
}

fn parse_banner(line_no: usize, line: &str) -> Result<MtxHeader, MtxError> {
    let banner = |reason: &str| MtxError::Banner {
        line: line_no,
        reason: reason.to_string(),
    };
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(banner("expected '%%MatrixMarket'"));
    }
    if tokens.len() != 5 {
        return Err(banner("expected 'matrix <format> <field> <symmetry>'"));
    }
    let unsupported = |what: String| MtxError::Unsupported {
        line: line_no,
        what,
    };
    if tokens[1] != "matrix" {
        return Err(unsupported(format!("object '{}'", tokens[1])));
    }
    let format = match tokens[2].as_str() {
        "coordinate" => MtxFormat::Coordinate,
        "array" => MtxFormat::Array,
        other => return Err(unsupported(format!("format '{other}'"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" => MtxField::Real,
        "complex" => MtxField::Complex,
        "integer" => MtxField::Integer,
        "pattern" => return Err(unsupported("field 'pattern'".into())),
        other => return Err(unsupported(format!("field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => MtxSymmetry::General,
        "symmetric" => MtxSymmetry::Symmetric,
        "skew-symmetric" => MtxSymmetry::SkewSymmetric,
        "hermitian" => MtxSymmetry::Hermitian,
        other => return Err(unsupported(format!("symmetry '{other}'"))),
    };
    if symmetry == MtxSymmetry::Hermitian && field != MtxField::Complex {
        return Err(unsupported("hermitian symmetry without complex field".into()));
    }
    if format == MtxFormat::Array && symmetry == MtxSymmetry::Hermitian {
        return Err(unsupported("array format with hermitian symmetry".into()));
    }
    Ok(MtxHeader {
        format,
        field,
        symmetry,
    })
}

fn parse_value(line_no: usize, tokens: &[&str], field: MtxField) -> Result<Scalar, MtxError> {
    let num = |s: &str| {
        s.parse::<f64>().map_err(|_| MtxError::Entry {
            line: line_no,
            reason: format!("'{s}' is not a number"),
        })
    };
    let want = if field == MtxField::Complex { 2 } else { 1 };
    if tokens.len() != want {
        return Err(MtxError::Entry {
            line: line_no,
            reason: format!("expected {want} value(s), found {}", tokens.len()),
        });
    }
    Ok(match field {
        MtxField::Complex => Scalar::new(num(tokens[0])?, num(tokens[1])?),
        _ => re(num(tokens[0])?),
    })
}

/// Places `v` at `(i, j)` and its mirror as required by the symmetry,
/// rejecting duplicates.
struct Assembler {
    a: DenseMatrix,
    seen: Vec<bool>,
    symmetry: MtxSymmetry,
}

impl Assembler {
    fn set(&mut self, line: usize, i: usize, j: usize, v: Scalar) -> Result<(), MtxError> {
        let rows = self.a.rows();
        let mut put = |r: usize, c: usize, val: Scalar, a: &mut DenseMatrix| {
            let k = c * rows + r;
            if self.seen[k] {
                return Err(MtxError::DuplicateEntry {
                    line,
                    row: i + 1,
                    col: j + 1,
                });
            }
            self.seen[k] = true;
            a[(r, c)] = val;
            Ok(())
        };
        match self.symmetry {
            MtxSymmetry::General => put(i, j, v, &mut self.a),
            MtxSymmetry::Symmetric => {
                put(i, j, v, &mut self.a)?;
                if i != j {
                    put(j, i, v, &mut self.a)?;
                }
                Ok(())
            }
            MtxSymmetry::SkewSymmetric => {
                if i == j {
                    return Err(MtxError::Entry {
                        line,
                        reason: "diagonal entry in a skew-symmetric matrix".into(),
                    });
                }
                put(i, j, v, &mut self.a)?;
                put(j, i, -v, &mut self.a)
            }
            MtxSymmetry::Hermitian => {
                if i == j && v.im != 0.0 {
                    return Err(MtxError::Entry {
                        line,
                        reason: "non-real diagonal entry in a hermitian matrix".into(),
                    });
                }
                put(i, j, v, &mut self.a)?;
                if i != j {
                    put(j, i, v.conj(), &mut self.a)?;
                }
                Ok(())
            }
        }
    }
}

/// Parses Matrix Market text into a dense matrix. Symmetric storage is
/// mirrored to full storage; the Hermitian flag is set when the result is
/// Hermitian.
pub fn parse_matrix_market(text: &[u8]) -> Result<(DenseMatrix, MtxHeader), MtxError> {
    let text = std::str::from_utf8(text).map_err(|_| MtxError::Encoding)?;
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (banner_no, banner) = lines.next().ok_or(MtxError::Banner {
        line: 1,
        reason: "empty input".into(),
    })?;
    let header = parse_banner(banner_no, banner)?;

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_no, size_line) = body.next().ok_or(MtxError::SizeLine {
        line: banner_no + 1,
    })?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| MtxError::SizeLine { line: size_no })?;
    let want_len = match header.format {
        MtxFormat::Coordinate => 3,
        MtxFormat::Array => 2,
    };
    if dims.len() != want_len || dims[0] == 0 || dims[1] == 0 {
        return Err(MtxError::SizeLine { line: size_no });
    }
    let (rows, cols) = (dims[0], dims[1]);
    for &d in &dims[..2] {
        if d > MAX_DENSE_DIM {
            return Err(MtxError::TooLarge {
                line: size_no,
                dim: d,
            });
        }
    }
    if header.symmetry != MtxSymmetry::General && rows != cols {
        return Err(MtxError::Unsupported {
            line: size_no,
            what: "non-square matrix with symmetric storage".into(),
        });
    }

    let mut asm = Assembler {
        a: DenseMatrix::zeros(rows, cols),
        seen: vec![false; rows * cols],
        symmetry: header.symmetry,
    };

    let mut last_line = size_no;
    match header.format {
        MtxFormat::Coordinate => {
            let nnz = dims[2];
            let mut found = 0;
            for (no, line) in body.by_ref() {
                last_line = no;
                if found == nnz {
                    return Err(MtxError::TrailingData { line: no });
                }
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if tokens.len() < 2 {
                    return Err(MtxError::Entry {
                        line: no,
                        reason: "missing row/column index".into(),
                    });
                }
                let idx = |s: &str| {
                    s.parse::<usize>().map_err(|_| MtxError::Entry {
                        line: no,
                        reason: format!("'{s}' is not a valid index"),
                    })
                };
                let (i, j) = (idx(tokens[0])?, idx(tokens[1])?);
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(MtxError::IndexOutOfRange {
                        line: no,
                        row: i,
                        col: j,
                        rows,
                        cols,
                    });
                }
                let v = parse_value(no, &tokens[2..], header.field)?;
                asm.set(no, i - 1, j - 1, v)?;
                found += 1;
            }
            if found != nnz {
                return Err(MtxError::Truncated {
                    line: last_line,
                    expected: nnz,
                    found,
                });
            }
        }
        MtxFormat::Array => {
            let positions: Vec<(usize, usize)> = match header.symmetry {
                MtxSymmetry::General => (0..cols)
                    .flat_map(|j| (0..rows).map(move |i| (i, j)))
                    .collect(),
                MtxSymmetry::Symmetric | MtxSymmetry::Hermitian => (0..cols)
                    .flat_map(|j| (j..rows).map(move |i| (i, j)))
                    .collect(),
                MtxSymmetry::SkewSymmetric => (0..cols)
                    .flat_map(|j| (j + 1..rows).map(move |i| (i, j)))
                    .collect(),
            };
            let mut found = 0;
            for (no, line) in body.by_ref() {
                last_line = no;
                let Some(&(i, j)) = positions.get(found) else {
                    return Err(MtxError::TrailingData { line: no });
                };
                let tokens: Vec<&str> = line.split_whitespace().collect();
                let v = parse_value(no, &tokens, header.field)?;
                asm.set(no, i, j, v)?;
                found += 1;
            }
            if found != positions.len() {
                return Err(MtxError::Truncated {
                    line: last_line,
                    expected: positions.len(),
                    found,
                });
            }
        }
    }

    let a = asm.a.detect_hermitian();
    Ok((a, header))
}

pub fn read_matrix_market(path: &Path) -> Result<(DenseMatrix, MtxHeader)> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        context: format!("reading {}", path.display()),
        source,
    })?;
    Ok(parse_matrix_market(&bytes)?)
}

/// Serializes as `coordinate complex general`, listing every nonzero with
/// shortest round-trip formatting.
pub fn to_matrix_market(a: &DenseMatrix) -> String {
    let mut entries = Vec::new();
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            let v = a[(i, j)];
            if v != ZERO {
                entries.push(format!("{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im));
            }
        }
    }
    let mut out = String::from("%%MatrixMarket matrix coordinate complex general\n");
    out.push_str(&format!("{} {} {}\n", a.rows(), a.cols(), entries.len()));
    for e in entries {
        out.push_str(&e);
        out.push('\n');
    }
    out
}

/// `(A + A*)/2`, flagged Hermitian.
pub fn symmetrize(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::dims(
            "symmetrize",
            format!("{}x{} is not square", a.rows(), a.cols()),
        ));
    }
    let s = DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        (a[(i, j)] + a[(j, i)].conj()) * 0.5
    });
    s.with_hermitian()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Laplace1d,
    Laplace2d,
    ConvDiff2d,
    Random,
    Tridiag,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Laplace1d => "laplace1d",
            ModelKind::Laplace2d => "laplace2d",
            ModelKind::ConvDiff2d => "convdiff2d",
            ModelKind::Random => "random",
            ModelKind::Tridiag => "tridiag",
        }
    }

    fn param_count(self) -> usize {
        match self {
            ModelKind::ConvDiff2d => 1,
            ModelKind::Tridiag => 3,
            _ => 0,
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "laplace1d" => ModelKind::Laplace1d,
            "laplace2d" => ModelKind::Laplace2d,
            "convdiff2d" => ModelKind::ConvDiff2d,
            "random" => ModelKind::Random,
            "tridiag" => ModelKind::Tridiag,
            other => return Err(Error::InvalidModel(format!("unknown model '{other}'"))),
        })
    }
}

/// A synthetic model: `name:n[:p1,p2,...]` on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n: usize,
    pub params: Vec<f64>,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, n: usize, params: Vec<f64>) -> Self {
        Self { kind, n, params }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.name(), self.n)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(f64::to_string).collect();
            write!(f, ":{}", ps.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.splitn(3, ':');
        let kind: ModelKind = parts.next().unwrap_or_default().parse()?;
        let n = parts
            .next()
            .ok_or_else(|| Error::InvalidModel(format!("'{s}' is missing the dimension")))?
            .parse::<usize>()
            .map_err(|_| Error::InvalidModel(format!("'{s}' has an invalid dimension")))?;
        let params = match parts.next() {
            Some(p) => p
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidModel(format!("invalid parameter '{x}'")))
                })
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        Ok(Self { kind, n, params })
    }
}

fn grid_side(n: usize) -> Result<usize> {
    let m = (n as f64).sqrt().round() as usize;
    if m * m != n {
        return Err(Error::InvalidModel(format!(
            "2-D models need a perfect-square dimension, got {n}"
        )));
    }
    Ok(m)
}

/// 5-point operator on an `m x m` grid plus upwind convection `gamma`.
fn grid_operator(m: usize, gamma: f64) -> DenseMatrix {
    let n = m * m;
    let mut a = DenseMatrix::zeros(n, n);
    for jy in 0..m {
        for ix in 0..m {
            let k = ix + m * jy;
            a[(k, k)] = re(4.0 + 2.0 * gamma);
            if ix > 0 {
                a[(k, k - 1)] = re(-1.0 - gamma);
            }
            if ix + 1 < m {
                a[(k, k + 1)] = re(-1.0);
            }
            if jy > 0 {
                a[(k, k - m)] = re(-1.0 - gamma);
            }
            if jy + 1 < m {
                a[(k, k + m)] = re(-1.0);
            }
        }
    }
    a
}

fn tridiagonal(n: usize, sub: f64, diag: f64, sup: f64) -> DenseMatrix {
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = re(diag);
        if i > 0 {
            a[(i, i - 1)] = re(sub);
        }
        if i + 1 < n {
            a[(i, i + 1)] = re(sup);
        }
    }
    a
}

/// Deterministic synthetic model for `(spec, seed)`.
pub fn gen_model(spec: &ModelSpec, seed: u64) -> Result<DenseMatrix> {
    let n = spec.n;
    if !(2..=MAX_DENSE_DIM).contains(&n) {
        return Err(Error::InvalidModel(format!(
            "dimension {n} outside [2, {MAX_DENSE_DIM}]"
        )));
    }
    if spec.params.len() != spec.kind.param_count() {
        return Err(Error::InvalidModel(format!(
            "{} takes {} parameter(s), got {}",
            spec.kind.name(),
            spec.kind.param_count(),
            spec.params.len()
        )));
    }
    let a = match spec.kind {
        ModelKind::Laplace1d => tridiagonal(n, -1.0, 2.0, -1.0),
        ModelKind::Laplace2d => grid_operator(grid_side(n)?, 0.0),
        ModelKind::ConvDiff2d => grid_operator(grid_side(n)?, spec.params[0]),
        ModelKind::Tridiag => tridiagonal(n, spec.params[0], spec.params[1], spec.params[2]),
        ModelKind::Random => {
            let mut s = rng::seeded(seed);
            DenseMatrix::from_fn(n, n, |_, _| re(rng::uniform_pm1(&mut s)))
        }
    };
    Ok(a.detect_hermitian())
}
