use std::fmt::Write as _;

use nalgebra_sparse::io::load_coo_from_matrix_market_str;
use num_complex::Complex64;

use super::{QlaError, SparseMatrix};

/// Parses a Matrix Market coordinate file (`real`, `integer` or `complex`;
/// `general`, `symmetric` or `hermitian`) into a square sparse matrix.
pub fn read_matrix_market(text: &str) -> Result<SparseMatrix, QlaError> {
    let header = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("").to_ascii_lowercase();
    let parse_err = |e: nalgebra_sparse::io::MatrixMarketError| QlaError::Parse(e.to_string());
    let (rows, cols, trip): (usize, usize, Vec<(usize, usize, Complex64)>) = if header.contains(" complex") {
        let coo = load_coo_from_matrix_market_str::<Complex64>(text).map_err(parse_err)?;
        (coo.nrows(), coo.ncols(), coo.triplet_iter().map(|(i, j, v)| (i, j, *v)).collect())
    } else {
        let coo = load_coo_from_matrix_market_str::<f64>(text).map_err(parse_err)?;
        (coo.nrows(), coo.ncols(), coo.triplet_iter().map(|(i, j, v)| (i, j, Complex64::new(*v, 0.0))).collect())
    };
    if rows != cols {
        return Err(QlaError::Invalid(format!("{rows}x{cols} matrix is not square")));
    }
    SparseMatrix::from_triplets(rows, trip)
}

/// Writes a `complex general` coordinate file.
pub fn write_matrix_market(m: &SparseMatrix) -> String {
    let mut s = String::from("%%MatrixMarket matrix coordinate complex general\n");
    let _ = writeln!(s, "{} {} {}", m.dim(), m.dim(), m.nnz());
    for (i, j, v) in m.triplets() {
        let _ = writeln!(s, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im);
    }
    s
}

/// One entry per line: `re` or `re im`. Blank lines and `%`/`#` comments
/// are skipped.
pub fn read_vector(text: &str) -> Result<Vec<Complex64>, QlaError> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%') && !l.starts_with('#'))
        .map(|(k, l)| {
            let nums = l
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| QlaError::Parse(format!("line {}: {e}", k + 1)))?;
            match nums[..] {
                [re] => Ok(Complex64::new(re, 0.0)),
                [re, im] => Ok(Complex64::new(re, im)),
                _ => Err(QlaError::Parse(format!("line {}: expected 1 or 2 numbers", k + 1))),
            }
        })
        .collect()
}

pub fn write_vector(v: &[Complex64]) -> String {
    v.iter().map(|x| format!("{:e} {:e}\n", x.re, x.im)).collect()
}
