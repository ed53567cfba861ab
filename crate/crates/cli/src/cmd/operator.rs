use complex_ou::expr::parse_poly;
use complex_ou::hermite::complex_hermite;
use complex_ou::operator::{
    apply_generator_spectral, apply_generator_wirtinger, carre_du_champ, carre_du_champ_via_generator,
    diffusion_chain_rule,
};
use complex_ou::{GeneratorParams, MultiPoly, Poly, Result, SpectralCoeffs};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{c64_json, worst};
use crate::report::{Output, ReportEnvelope};
use crate::OperatorCmd;

pub fn run(cmd: OperatorCmd, tol: Option<f64>) -> Result<Output> {
    let env = match cmd {
        OperatorCmd::Eigen { theta, m, n } => eigen(theta, m, n, tol)?,
        OperatorCmd::Gamma { phi, psi, theta } => gamma(&phi, &psi, theta, tol)?,
        OperatorCmd::ChainRule {
            theta,
            degree,
            samples,
            seed,
        } => chain_rule(theta, degree, samples, seed, tol)?,
        OperatorCmd::Apply { theta, phi } => apply(theta, &phi, tol)?,
        OperatorCmd::Normality { theta, degree } => normality(theta, degree, tol)?,
    };
    Ok(Output::Report(env))
}

/// `max |L J − λ J|` over coefficients, relative to the larger of `‖λJ‖`, `‖J‖`.
fn eigen_residual(params: GeneratorParams, m: u32, n: u32) -> Result<f64> {
    let j = complex_hermite(m as usize, n as usize)?;
    let target = j.scale(params.eigenvalue(m, n));
    let lj = apply_generator_wirtinger(params, &j);
    Ok(lj.max_abs_diff(&target) / target.max_abs_coeff().max(j.max_abs_coeff()))
}

pub fn eigen(theta: f64, m: u32, n: u32, tol: Option<f64>) -> Result<ReportEnvelope> {
    let params = GeneratorParams::new(theta)?;
    let residual = eigen_residual(params, m, n)?;
    let results = json!({"eigenvalue": c64_json(params.eigenvalue(m, n))});
    Ok(ReportEnvelope::new("operator eigen", json!({"theta": theta, "m": m, "n": n}), results)
        .residual(residual, tol.unwrap_or(1e-9)))
}

pub fn eigen_sweep(theta: f64, max_degree: u32, tol: Option<f64>) -> Result<ReportEnvelope> {
    let params = GeneratorParams::new(theta)?;
    let mut max = 0.0;
    for d in 0..=max_degree {
        for m in 0..=d {
            max = worst(max, eigen_residual(params, m, d - m)?);
        }
    }
    Ok(
        ReportEnvelope::new("operator eigen", json!({"theta": theta, "max_degree": max_degree}), json!({}))
            .residual(max, tol.unwrap_or(1e-9)),
    )
}

pub fn gamma(phi: &str, psi: &str, theta: f64, tol: Option<f64>) -> Result<ReportEnvelope> {
    let params = GeneratorParams::new(theta)?;
    let (p, q) = (parse_poly(phi)?, parse_poly(psi)?);
    let g = carre_du_champ(&p, &q);
    let via = carre_du_champ_via_generator(params, &p, &q);
    let residual = g.max_abs_diff(&via) / (1.0 + g.max_abs_coeff());
    let inputs = json!({"phi": phi, "psi": psi, "theta": theta});
    let results = json!({"gamma": serde_json::to_value(&g)?});
    Ok(ReportEnvelope::new("operator gamma", inputs, results).residual(residual, tol.unwrap_or(1e-10)))
}

/// Random `F` with one or two slots and random `φ_i`, all of degree at most
/// `degree`. The residual is normalized by `1 + ‖LHS‖`.
pub fn chain_rule(theta: f64, degree: u32, samples: usize, seed: u64, tol: Option<f64>) -> Result<ReportEnvelope> {
    let params = GeneratorParams::new(theta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max = 0.0;
    for k in 0..samples {
        let slots = 1 + k % 2;
        let f = MultiPoly::random(&mut rng, slots, degree, 0.5);
        let phis: Vec<Poly> = (0..slots).map(|_| Poly::random(&mut rng, degree, 0.6)).collect();
        let rep = diffusion_chain_rule(params, &f, &phis)?;
        max = worst(max, rep.residual / (1.0 + rep.lhs_scale));
    }
    let inputs = json!({"theta": theta, "degree": degree, "samples": samples});
    Ok(ReportEnvelope::new("operator chain-rule", inputs, json!({}))
        .residual(max, tol.unwrap_or(1e-9))
        .seed(seed))
}

/// `L φ` by Wirtinger derivatives, cross-checked against the spectral form.
pub fn apply(theta: f64, phi: &str, tol: Option<f64>) -> Result<ReportEnvelope> {
    let params = GeneratorParams::new(theta)?;
    let p = parse_poly(phi)?;
    let lp = apply_generator_wirtinger(params, &p);
    let spectral = apply_generator_spectral(params, &SpectralCoeffs::from_poly(&p)?).synthesize()?;
    let residual = lp.max_abs_diff(&spectral) / (1.0 + lp.max_abs_coeff());
    let results = json!({"result": serde_json::to_value(&lp)?});
    Ok(ReportEnvelope::new("operator apply", json!({"theta": theta, "phi": phi}), results)
        .residual(residual, tol.unwrap_or(1e-9)))
}

/// `L L* J = L* L J` on each `J_{m,n}`, both sides through Wirtinger
/// derivatives.
pub fn normality(theta: f64, degree: u32, tol: Option<f64>) -> Result<ReportEnvelope> {
    let params = GeneratorParams::new(theta)?;
    let adj = params.adjoint();
    let mut max = 0.0;
    for d in 0..=degree {
        for m in 0..=d {
            let j = complex_hermite(m as usize, (d - m) as usize)?;
            let a = apply_generator_wirtinger(params, &apply_generator_wirtinger(adj, &j));
            let b = apply_generator_wirtinger(adj, &apply_generator_wirtinger(params, &j));
            max = worst(max, a.max_abs_diff(&b) / (1.0 + a.max_abs_coeff()));
        }
    }
    Ok(
        ReportEnvelope::new("operator normality", json!({"theta": theta, "degree": degree}), json!({}))
            .residual(max, tol.unwrap_or(1e-9)),
    )
}
