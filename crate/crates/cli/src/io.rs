//! Matrix files: JSON objects or whitespace-delimited text.
//!
//! JSON: `{"rows", "cols", "row_split"?, "col_split"?, "data"}` where `data`
//! is a list of rows. Entries are numbers or strings such as `"-2/15"`.
//! Text: one row per line, optionally preceded by `# split r c`; other
//! lines starting with `#` are comments.

use std::fmt;
use std::str::FromStr;

use blockpinv_core::{BlockMatrix, Matrix, Rational, Scalar};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;

/// Parse or shape problem, located by line or JSON field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub location: String,
    pub message: String,
}

impl InputError {
    fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// Scalars that can be read from a matrix file.
pub trait Entry: Scalar {
    fn parse_entry(text: &str) -> Option<Self>;
}

impl Entry for f64 {
    fn parse_entry(text: &str) -> Option<Self> {
        if let Some((p, q)) = text.split_once('/') {
            let p = f64::from_str(p.trim()).ok()?;
            let q = f64::from_str(q.trim()).ok()?;
            return (q != 0.0).then(|| p / q).filter(|v| v.is_finite());
        }
        f64::from_str(text.trim()).ok().filter(|v| v.is_finite())
    }
}

impl Entry for Rational {
    fn parse_entry(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((p, q)) = text.split_once('/') {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            return (q != BigInt::from(0)).then(|| Rational::new(p, q));
        }
        parse_decimal(text)
    }
}

/// Exact value of a decimal literal such as `-1.25e-3`.
fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], i64::from_str(&text[i + 1..]).ok()?),
        None => (text, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if !frac.chars().all(|c| c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let digits = if digits == "-" || digits == "+" || digits.is_empty() {
        return None;
    } else {
        digits
    };
    let value = BigInt::from_str(&digits).ok()?;
    let scale = exp - frac.len() as i64;
    if scale.unsigned_abs() > 4096 {
        return None;
    }
    let pow = BigInt::from(10).pow(scale.unsigned_abs() as u32);
    Some(if scale >= 0 {
        Rational::from_integer(value * pow)
    } else {
        Rational::new(value, pow)
    })
}

/// A matrix with optional block splits, as stored in a file.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile<T: Scalar> {
    pub matrix: Matrix<T>,
    pub split: Option<(usize, usize)>,
}

impl<T: Scalar> MatrixFile<T> {
    pub fn block(&self, location: &str) -> Result<BlockMatrix<T>, InputError> {
        let (r, c) = self
            .split
            .ok_or_else(|| InputError::new(location, "no block split given (row_split/col_split or '# split r c')"))?;
        BlockMatrix::new(self.matrix.clone(), r, c).map_err(|e| InputError::new(location, e.to_string()))
    }
}

pub fn parse<T: Entry>(source: &str, text: &str) -> Result<MatrixFile<T>, InputError> {
    if text.trim_start().starts_with('{') {
        parse_json(source, text)
    } else {
        parse_text(source, text)
    }
}

fn parse_json<T: Entry>(source: &str, text: &str) -> Result<MatrixFile<T>, InputError> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        InputError::new(format!("{source}:{}:{}", e.line(), e.column()), e.to_string())
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| InputError::new(source, "top level must be an object"))?;
    let field = |name: &str| InputError::new(format!("{source}: field '{name}'"), "");
    let dim = |name: &str, required: bool| -> Result<Option<usize>, InputError> {
        match obj.get(name) {
            None | Some(Value::Null) if !required => Ok(None),
            None => Err(InputError { message: "missing".into(), ..field(name) }),
            Some(v) => v
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| InputError { message: format!("expected a non-negative integer, found {v}"), ..field(name) }),
        }
    };
    let rows = dim("rows", true)?.unwrap_or_default();
    let cols = dim("cols", true)?.unwrap_or_default();
    let split = match (dim("row_split", false)?, dim("col_split", false)?) {
        (Some(r), Some(c)) => Some((r, c)),
        (None, None) => None,
        _ => {
            return Err(InputError::new(
                format!("{source}: field 'row_split'/'col_split'"),
                "give both splits or neither",
            ))
        }
    };
    let data = obj
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| InputError { message: "missing or not an array of rows".into(), ..field("data") })?;
    if data.len() != rows {
        return Err(InputError {
            message: format!("{} rows given, header says {rows}", data.len()),
            ..field("data")
        });
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in data.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| InputError::new(format!("{source}: data[{i}]"), "row must be an array"))?;
        if row.len() != cols {
            return Err(InputError::new(
                format!("{source}: data[{i}]"),
                format!("{} entries given, header says {cols}", row.len()),
            ));
        }
        for (j, v) in row.iter().enumerate() {
            let literal = match v {
                Value::Number(n) => n.to_string(),
                Value::String(s) => s.clone(),
                other => {
                    return Err(InputError::new(
                        format!("{source}: data[{i}][{j}]"),
                        format!("expected a number or \"p/q\" string, found {other}"),
                    ))
                }
            };
            entries.push(entry::<T>(&literal, || format!("{source}: data[{i}][{j}]"))?);
        }
    }
    finish(source, rows, cols, entries, split)
}

fn parse_text<T: Entry>(source: &str, text: &str) -> Result<MatrixFile<T>, InputError> {
    let mut split = None;
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut cols = None;
    for (k, line) in text.lines().enumerate() {
        let at = || format!("{source}:{}", k + 1);
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            let words: Vec<&str> = comment.split_whitespace().collect();
            if words.first() == Some(&"split") {
                let nums: Option<Vec<usize>> = words[1..].iter().map(|w| w.parse().ok()).collect();
                match nums.as_deref() {
                    Some(&[r, c]) => split = Some((r, c)),
                    _ => return Err(InputError::new(at(), "expected '# split <rows> <cols>'")),
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .enumerate()
            .map(|(j, w)| entry::<T>(w, || format!("{}, column {}", at(), j + 1)))
            .collect::<Result<Vec<T>, _>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(InputError::new(at(), format!("{} entries, earlier rows have {c}", row.len())))
            }
            _ => {}
        }
        rows.push(row);
    }
    let n_rows = rows.len();
    let n_cols = cols.unwrap_or(0);
    finish(source, n_rows, n_cols, rows.into_iter().flatten().collect(), split)
}

fn entry<T: Entry>(literal: &str, at: impl Fn() -> String) -> Result<T, InputError> {
    T::parse_entry(literal).ok_or_else(|| {
        InputError::new(at(), format!("cannot read '{literal}' as a {} entry", T::BACKEND))
    })
}

fn finish<T: Entry>(
    source: &str,
    rows: usize,
    cols: usize,
    data: Vec<T>,
    split: Option<(usize, usize)>,
) -> Result<MatrixFile<T>, InputError> {
    let matrix = Matrix::new(rows, cols, data).map_err(|e| InputError::new(source, e.to_string()))?;
    if let Some((r, c)) = split {
        if r > rows || c > cols {
            return Err(InputError::new(
                source,
                format!("split ({r}, {c}) outside a {rows}x{cols} matrix"),
            ));
        }
    }
    Ok(MatrixFile { matrix, split })
}

/// JSON form of a matrix file, as written by `gen` and the JSON reports.
#[derive(Serialize)]
#[serde(bound(serialize = ""))]
pub struct FileOut<'a, T: Scalar> {
    #[serde(flatten)]
    pub matrix: &'a Matrix<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row_split: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col_split: Option<usize>,
}

impl<'a, T: Scalar> FileOut<'a, T> {
    pub fn plain(matrix: &'a Matrix<T>) -> Self {
        Self {
            matrix,
            row_split: None,
            col_split: None,
        }
    }

    pub fn block(mb: &'a BlockMatrix<T>) -> Self {
        Self {
            matrix: mb.whole(),
            row_split: Some(mb.row_split()),
            col_split: Some(mb.col_split()),
        }
    }
}

/// Matrix file text with one data row per line.
pub fn file_text<T: Scalar>(out: &FileOut<'_, T>) -> String {
    let v = serde_json::to_value(out).expect("serializable");
    let mut text = format!("{{\n  \"rows\": {},\n  \"cols\": {},\n", v["rows"], v["cols"]);
    if let (Some(r), Some(c)) = (out.row_split, out.col_split) {
        text += &format!("  \"row_split\": {r},\n  \"col_split\": {c},\n");
    }
    let rows: Vec<String> = v["data"]
        .as_array()
        .expect("rows")
        .iter()
        .map(|r| format!("    {r}"))
        .collect();
    text + &format!("  \"data\": [\n{}\n  ]\n}}\n", rows.join(",\n"))
}
