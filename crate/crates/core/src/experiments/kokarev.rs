//! The surface bound `σ₁ · L(∂M) ≤ 8π(γ + 1)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use super::sweep::{run_sweep, SweepParams, SweepRow};
use crate::spectrum::fmt_float;
use crate::warped_assembler::steklov_boundary_length;
use crate::{Error, Result};

/// Relative slack allowed above the bound.
pub const SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct KokarevReport {
    pub sigma1: f64,
    pub boundary_length: f64,
    pub genus: usize,
    pub product: f64,
    pub bound: f64,
    /// `product / bound`.
    pub ratio: f64,
    pub passed: bool,
}

pub fn kokarev_check(sigma1: f64, boundary_length: f64, genus: usize) -> KokarevReport {
    let product = sigma1 * boundary_length;
    let bound = 8.0 * PI * (genus as f64 + 1.0);
    KokarevReport {
        sigma1,
        boundary_length,
        genus,
        product,
        bound,
        ratio: product / bound,
        passed: product <= bound * (1.0 + SLACK),
    }
}

/// Runs a surface sweep (`n = k = 1`) and checks every row.
pub fn kokarev_sweep(params: &SweepParams, genus: usize) -> Result<Vec<(SweepRow, KokarevReport)>> {
    if params.n != 1 || params.k != 1 {
        return Err(Error::Domain(format!(
            "the surface bound needs n = k = 1, got n = {}, k = {}",
            params.n, params.k
        )));
    }
    let rows = run_sweep(params)?;
    rows.into_iter()
        .map(|row| {
            let length = steklov_boundary_length(&params.metric_for(row.epsilon)?)?;
            let report = kokarev_check(row.sigma1, length, genus);
            Ok((row, report))
        })
        .collect()
}

pub const KOKAREV_HEADER: &str = "epsilon,sigma1,boundary_length,product,bound,ratio,passed";

pub fn kokarev_csv(rows: &[(Option<f64>, KokarevReport)]) -> String {
    let mut out = format!("{KOKAREV_HEADER}\n");
    for (eps, r) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            eps.map(fmt_float).unwrap_or_default(),
            fmt_float(r.sigma1),
            fmt_float(r.boundary_length),
            fmt_float(r.product),
            fmt_float(r.bound),
            fmt_float(r.ratio),
            r.passed
        );
    }
    out
}
