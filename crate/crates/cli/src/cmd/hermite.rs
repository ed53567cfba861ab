use complex_ou::hermite::{
    build_basis_transform, complex_hermite, complex_hermite_via_creation, orthonormality_defect,
};
use complex_ou::quadrature::gauss_hermite_rule;
use complex_ou::{Execution, Poly, Result, SpectralCoeffs, C64};
use serde_json::json;

use super::worst;
use crate::report::{Output, ReportEnvelope};
use crate::HermiteCmd;

pub fn run(cmd: HermiteCmd, tol: Option<f64>) -> Result<Output> {
    match cmd {
        HermiteCmd::Show { m, n } => {
            let p = complex_hermite(m, n)?;
            let env = ReportEnvelope::new("hermite show", json!({"m": m, "n": n}), serde_json::to_value(&p)?);
            Ok(Output::Report(env))
        }
        HermiteCmd::Orthonormality { max_degree, order } => orthonormality(max_degree, order, tol).map(Output::Report),
        HermiteCmd::Transform { degree, csv: true } => {
            let t = build_basis_transform(degree)?;
            let defect = transform_defect(&t);
            Ok(Output::Raw {
                text: t.forward_csv(),
                pass: defect <= tol.unwrap_or(1e-10),
            })
        }
        HermiteCmd::Transform { degree, csv: false } => transform_report(degree, tol).map(Output::Report),
        HermiteCmd::Roundtrip { max_degree } => roundtrip(max_degree, tol).map(Output::Report),
    }
}

pub fn orthonormality(max_degree: usize, order: Option<usize>, tol: Option<f64>) -> Result<ReportEnvelope> {
    let order = order.unwrap_or((max_degree + 2).max(12));
    let rule = gauss_hermite_rule(order)?;
    let defect = orthonormality_defect(max_degree, &rule, Execution::default())?;
    let inputs = json!({"max_degree": max_degree, "order": order});
    let results = json!({"max_abs_gram_error": defect});
    Ok(ReportEnvelope::new("hermite orthonormality", inputs, results).residual(defect, tol.unwrap_or(1e-9)))
}

fn transform_defect(t: &complex_ou::hermite::BasisTransform) -> f64 {
    [t.inverse_defect(), t.forward_unitarity_defect(), t.inverse_unitarity_defect()]
        .into_iter()
        .fold(0.0, worst)
}

pub fn transform_report(degree: usize, tol: Option<f64>) -> Result<ReportEnvelope> {
    let mut max = 0.0;
    let mut last = None;
    // Every degree up to the requested one, so the residual covers the range.
    for l in 0..=degree {
        let t = build_basis_transform(l)?;
        max = worst(max, transform_defect(&t));
        last = Some(t);
    }
    let t = last.expect("degree range is nonempty");
    let results = json!({
        "transform": t.to_document(),
        "inverse_defect": t.inverse_defect(),
        "forward_unitarity_defect": t.forward_unitarity_defect(),
        "inverse_unitarity_defect": t.inverse_unitarity_defect(),
    });
    Ok(ReportEnvelope::new("hermite transform", json!({"degree": degree}), results).residual(max, tol.unwrap_or(1e-10)))
}

/// Creation route vs explicit formula, and `z^a z̄^b → coefficients → z^a z̄^b`
/// relative to the largest Hermite coefficient.
pub fn roundtrip(max_degree: usize, tol: Option<f64>) -> Result<ReportEnvelope> {
    let mut route = 0.0;
    let mut synth = 0.0;
    for d in 0..=max_degree {
        for m in 0..=d {
            let a = complex_hermite(m, d - m)?;
            let b = complex_hermite_via_creation(m, d - m)?;
            route = worst(route, a.max_abs_diff(&b) / a.max_abs_coeff());
            let mono = Poly::monomial(m as u32, (d - m) as u32, C64::new(1.0, 0.0));
            let coeffs = SpectralCoeffs::from_poly(&mono)?;
            let scale = coeffs.iter().map(|(_, c)| c.norm()).fold(1.0, f64::max);
            synth = worst(synth, coeffs.synthesize()?.max_abs_diff(&mono) / scale);
        }
    }
    let results = json!({
        "max_route_relative_difference": route,
        "max_monomial_roundtrip_relative_error": synth,
    });
    Ok(ReportEnvelope::new("hermite roundtrip", json!({"max_degree": max_degree}), results)
        .residual(worst(route, synth), tol.unwrap_or(1e-10)))
}
