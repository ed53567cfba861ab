pub mod hermite;
pub mod operator;
pub mod quad;
pub mod sde;
pub mod semigroup;

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

use complex_ou::{Result, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::ReportEnvelope;

/// Angles swept by `verify-all`.
const THETAS: [f64; 6] = [0.0, FRAC_PI_6, FRAC_PI_4, -FRAC_PI_4, 0.49 * PI, -0.49 * PI];

pub fn c64_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::new(rng.random_range(-radius..radius), rng.random_range(-radius..radius))
}

/// `NaN`-aware running maximum.
pub fn worst(acc: f64, r: f64) -> f64 {
    if r <= acc {
        acc
    } else {
        r
    }
}

pub fn verify_all(tol: Option<f64>) -> Result<ReportEnvelope> {
    let mut reports = vec![
        hermite::orthonormality(10, None, tol)?,
        hermite::transform_report(16, tol)?,
        hermite::roundtrip(12, tol)?,
        quad::selftest(&[2, 4, 8, 12, 16, 24, 32, 64, 128], tol)?,
    ];
    for &th in &THETAS {
        reports.push(operator::eigen_sweep(th, 10, tol)?);
        reports.push(operator::chain_rule(th, 3, 100, 1, tol)?);
        reports.push(operator::normality(th, 10, tol)?);
        reports.push(semigroup::invariance(th, 1.0, 8, 5, 1, tol)?);
        reports.push(semigroup::ergodic(th, 6, &[2.0, 5.0, 10.0], 5, 1)?);
    }
    for &th in &[FRAC_PI_4, -FRAC_PI_4, PI / 3.0, -PI / 3.0] {
        for &t in &[0.1, 1.0, 3.0] {
            reports.push(semigroup::verify_normal(th, t, 5, 2, 1, tol)?);
        }
    }
    reports.push(sde::stationarity(FRAC_PI_4, 200_000, 0, None)?);

    let pass = reports.iter().all(|r| r.pass);
    let max_residual = reports.iter().filter_map(|r| r.max_residual).fold(0.0, worst);
    let results: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "command": r.command,
                "inputs": r.inputs,
                "max_residual": r.max_residual,
                "tolerance": r.tolerance,
                "pass": r.pass,
            })
        })
        .collect();
    let mut env = ReportEnvelope::new("verify-all", json!({}), Value::Array(results)).pass(pass);
    env.max_residual = Some(max_residual);
    Ok(env)
}
