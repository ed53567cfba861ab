use complex_ou::quadrature::diagnose;
use complex_ou::Result;
use serde_json::json;

use super::worst;
use crate::report::{Output, ReportEnvelope};
use crate::QuadCmd;

pub fn run(cmd: QuadCmd, tol: Option<f64>) -> Result<Output> {
    match cmd {
        QuadCmd::Selftest { orders } => selftest(&orders, tol).map(Output::Report),
    }
}

/// The residual is the worst of the weight-sum error and the moment errors
/// inside the exactness range.
pub fn selftest(orders: &[usize], tol: Option<f64>) -> Result<ReportEnvelope> {
    let diags = orders.iter().map(|&k| diagnose(k)).collect::<Result<Vec<_>>>()?;
    let max = diags.iter().fold(0.0, |acc, d| {
        [d.weight_sum_error, d.max_moment_rel_error, d.max_odd_moment_scaled_error]
            .into_iter()
            .fold(acc, worst)
    });
    Ok(ReportEnvelope::new("quad selftest", json!({"orders": orders}), serde_json::to_value(&diags)?)
        .residual(max, tol.unwrap_or(1e-12)))
}
