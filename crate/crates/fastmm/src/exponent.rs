//! Matrix-multiplication exponent arithmetic.
//!
//! A rank-r bilinear (or trilinear) algorithm for MM(m, k, n) yields the
//! exponent 3 * log_{mkn}(r); for m = k = n this is the familiar log_n(r).
//! The border-rank route through the two-product APA decomposition yields
//! 3 * log_{mkn}(0.5 * (mkn + mk + kn)).

use crate::error::{Error, Result};

/// Exponent implied by a rank-r algorithm for MM(m, k, n).
pub fn exponent_from_rank(m: usize, k: usize, n: usize, r: usize) -> Result<f64> {
    if m * k * n < 2 {
        return Err(Error::UndefinedLogBase);
    }
    if r < 1 {
        return Err(Error::RangeViolation("rank must be positive".into()));
    }
    Ok(3.0 * (r as f64).ln() / ((m * k * n) as f64).ln())
}

/// Exponent implied by the border-rank mkn + mk + kn APA decomposition of
/// the two disjoint products for shape (m, k, n).
pub fn apa_exponent(m: usize, k: usize, n: usize) -> Result<f64> {
    if m * k * n < 2 {
        return Err(Error::UndefinedLogBase);
    }
    let border = 0.5 * ((m * k * n + m * k + k * n) as f64);
    Ok(3.0 * border.ln() / ((m * k * n) as f64).ln())
}
