//! Mixing bounds for the shuffles, evaluated exactly as stated.

use crate::error::{Error, Result};

fn check(n: u64, q: u64, r: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("group order must be at least 1".into()));
    }
    if q < 1 || q > n {
        return Err(Error::Domain(format!(
            "need 1 <= q <= N, got q = {q}, N = {n}"
        )));
    }
    if r < 1 {
        return Err(Error::Domain("need r >= 1 rounds".into()));
    }
    Ok(())
}

fn base(n: u64, q: u64) -> f64 {
    (q + n) as f64 / (2 * n) as f64
}

/// `2N^{3/2}/(r+2) · ((q+N)/(2N))^{r/2+1}`, for `r` Scoot-or-Not rounds
/// against `q` non-adaptive queries.
pub fn sc_mixing_bound(n: u64, q: u64, r: u64) -> Result<f64> {
    check(n, q, r)?;
    let nf = n as f64;
    let rf = r as f64;
    Ok(2.0 * nf.powf(1.5) / (rf + 2.0) * base(n, q).powf(rf / 2.0 + 1.0))
}

/// `4N^{3/2}/(r+2) · ((q+N)/(2N))^{r/2+1}`, the adaptive bound for the
/// 2r-round shuffle.
pub fn sc_cca_bound(n: u64, q: u64, r: u64) -> Result<f64> {
    check(n, q, r)?;
    let nf = n as f64;
    let rf = r as f64;
    Ok(4.0 * nf.powf(1.5) / (rf + 2.0) * base(n, q).powf(rf / 2.0 + 1.0))
}

/// `8N^{3/2}/(r+4) · ((q+N)/(2N))^{r/4+1}`, the summary form.
pub fn sc_summary_bound(n: u64, q: u64, r: u64) -> Result<f64> {
    check(n, q, r)?;
    let nf = n as f64;
    let rf = r as f64;
    Ok(8.0 * nf.powf(1.5) / (rf + 4.0) * base(n, q).powf(rf / 4.0 + 1.0))
}
