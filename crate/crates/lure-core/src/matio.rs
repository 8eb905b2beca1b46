//! Plain-text matrix files: blocks of `NAME ROWS COLS` headers followed
//! by row-major whitespace-separated entries. Blank lines and `#`
//! comments are ignored.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::RMat;

/// Parses every named matrix block in the input.
pub fn parse_matrices(text: &str) -> Result<BTreeMap<String, RMat>> {
    let mut tokens: Vec<&str> = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        tokens.extend(line.split_whitespace());
    }
    let mut out = BTreeMap::new();
    let mut i = 0;
    while i < tokens.len() {
        let name = tokens[i];
        if name.parse::<f64>().is_ok() {
            return Err(Error::Parse(format!("expected a matrix name, found number {name}")));
        }
        let rows: usize = tokens
            .get(i + 1)
            .ok_or_else(|| Error::Parse(format!("missing row count for {name}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad row count for {name}")))?;
        let cols: usize = tokens
            .get(i + 2)
            .ok_or_else(|| Error::Parse(format!("missing column count for {name}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad column count for {name}")))?;
        let n = rows * cols;
        let data_tokens = tokens
            .get(i + 3..i + 3 + n)
            .ok_or_else(|| Error::Parse(format!("{name}: expected {n} entries")))?;
        let mut data = Vec::with_capacity(n);
        for tok in data_tokens {
            data.push(
                tok.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("{name}: bad entry {tok}")))?,
            );
        }
        if out.insert(name.to_string(), RMat::from_row_slice(rows, cols, &data)).is_some() {
            return Err(Error::Parse(format!("duplicate matrix {name}")));
        }
        i += 3 + n;
    }
    Ok(out)
}

/// Fetches a required matrix by name.
pub fn require<'a>(map: &'a BTreeMap<String, RMat>, name: &str) -> Result<&'a RMat> {
    map.get(name)
        .ok_or_else(|| Error::Parse(format!("matrix {name} not found in file")))
}

/// Renders one matrix block in the file format.
pub fn format_matrix(name: &str, mat: &RMat) -> String {
    let mut out = format!("{name} {} {}\n", mat.nrows(), mat.ncols());
    for i in 0..mat.nrows() {
        let row: Vec<String> = (0..mat.ncols()).map(|j| format!("{:.17e}", mat[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
