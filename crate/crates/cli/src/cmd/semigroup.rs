use std::fs;
use std::io::Read;
use std::path::Path;

use complex_ou::coeffs::CoeffsDocument;
use complex_ou::quadrature::gauss_hermite_rule;
use complex_ou::semigroup::{
    ergodic_envelope, ergodic_limit_residual, invariance_residual, normality_commutator, semigroup_spectral,
};
use complex_ou::{
    Error, Execution, GeneratorParams, Poly, PropagatorParams, QuadratureRule, Result, SpectralCoeffs,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{c64_json, random_point, worst};
use crate::report::{Output, ReportEnvelope};
use crate::SemigroupCmd;

/// Nested Mehler quadrature costs `K⁴` per ordering.
const MAX_NESTED_ORDER: usize = 24;

pub fn run(cmd: SemigroupCmd, tol: Option<f64>) -> Result<Output> {
    let env = match cmd {
        SemigroupCmd::Apply { theta, t, input, output } => apply(theta, t, &input, output.as_deref())?,
        SemigroupCmd::VerifyNormal {
            theta,
            t,
            degree,
            points,
            seed,
        } => verify_normal(theta, t, degree, points, seed, tol)?,
        SemigroupCmd::Invariance {
            theta,
            t,
            degree,
            samples,
            seed,
        } => invariance(theta, t, degree, samples, seed, tol)?,
        SemigroupCmd::Ergodic {
            theta,
            degree,
            times,
            samples,
            seed,
        } => ergodic(theta, degree, &times, samples, seed)?,
    };
    Ok(Output::Report(env))
}

fn read_input(path: &Path) -> Result<String> {
    let io_err = |e: std::io::Error| Error::InvalidConfig(format!("{}: {e}", path.display()));
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

pub fn apply(theta: f64, t: f64, input: &Path, output: Option<&Path>) -> Result<ReportEnvelope> {
    let p = PropagatorParams::new(GeneratorParams::new(theta)?, t)?;
    let doc: CoeffsDocument = serde_json::from_str(&read_input(input)?)?;
    let evolved = semigroup_spectral(p, &SpectralCoeffs::from_document(&doc)).to_document(Some(theta));
    if let Some(path) = output {
        let text = complex_ou::io::to_json_string(&evolved)? + "\n";
        fs::write(path, text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    }
    let inputs = json!({"theta": theta, "t": t, "input": input.display().to_string()});
    Ok(ReportEnvelope::new("semigroup apply", inputs, serde_json::to_value(&evolved)?))
}

pub fn verify_normal(
    theta: f64,
    t: f64,
    degree: u32,
    points: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<ReportEnvelope> {
    let p = PropagatorParams::new(GeneratorParams::new(theta)?, t)?;
    let order = degree as usize / 2 + 2;
    if order > MAX_NESTED_ORDER {
        return Err(Error::InvalidOrder(order));
    }
    let rule = gauss_hermite_rule(order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = Vec::new();
    let mut max = 0.0;
    for a in 0..=degree as i32 {
        for b in 0..=(degree as i32 - a) {
            for _ in 0..points {
                let x = random_point(&mut rng, 2.0);
                let v = normality_commutator(p, |u| u.powi(a) * u.conj().powi(b), x, &rule, Execution::default());
                let r = v.relative_residual();
                max = worst(max, r);
                grid.push(json!({
                    "a": a, "b": b, "x": c64_json(x),
                    "lhs": c64_json(v.lhs), "rhs": c64_json(v.rhs), "fused": c64_json(v.fused),
                    "residual": r,
                }));
            }
        }
    }
    let inputs = json!({"theta": theta, "t": t, "degree": degree, "points": points, "order": order});
    let results = json!({"max_residual": max, "grid": grid});
    Ok(ReportEnvelope::new("semigroup verify-normal", inputs, results)
        .residual(max, tol.unwrap_or(1e-8))
        .seed(seed))
}

pub fn invariance(
    theta: f64,
    t: f64,
    degree: u32,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<ReportEnvelope> {
    let p = PropagatorParams::new(GeneratorParams::new(theta)?, t)?;
    let rule = QuadratureRule::for_degree(degree as usize)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max = 0.0;
    for _ in 0..samples {
        let phi = Poly::random(&mut rng, degree, 0.5);
        max = worst(max, invariance_residual(p, |u| phi.eval(u), &rule, Execution::default()));
    }
    let inputs = json!({"theta": theta, "t": t, "degree": degree, "samples": samples});
    Ok(ReportEnvelope::new("semigroup invariance", inputs, json!({}))
        .residual(max, tol.unwrap_or(1e-9))
        .seed(seed))
}

/// `|P_t φ(x) − ∫ φ dγ|` against `C e^{−d t cos θ}`. The envelope is attained
/// by single-mode inputs, so the comparison allows roundoff slack.
pub fn ergodic(theta: f64, degree: u32, times: &[f64], samples: usize, seed: u64) -> Result<ReportEnvelope> {
    let params = GeneratorParams::new(theta)?;
    let rule = QuadratureRule::for_degree(degree as usize)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut pass = true;
    for _ in 0..samples {
        let phi = Poly::random(&mut rng, degree, 0.5);
        let coeffs = SpectralCoeffs::from_poly(&phi)?;
        let x = random_point(&mut rng, 2.0);
        for &t in times {
            let r = ergodic_limit_residual(params, |u| phi.eval(u), x, t, &rule, Execution::default())?;
            let env = ergodic_envelope(params, &coeffs, x, t)?;
            let ok = r <= env.bound * (1.0 + 1e-9) + 1e-13;
            pass &= ok;
            rows.push(json!({"t": t, "x": c64_json(x), "residual": r, "envelope": env, "ok": ok}));
        }
    }
    let inputs = json!({"theta": theta, "degree": degree, "times": times, "samples": samples});
    Ok(ReportEnvelope::new("semigroup ergodic", inputs, json!(rows)).pass(pass).seed(seed))
}
