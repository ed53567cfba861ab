//! The Ornstein–Uhlenbeck semigroup `P_t = e^{t L_θ}`.
//!
//! Two independent realisations are provided:
//!
//! * spectral: `b_{m,n} ↦ e^{λ_{m,n} t} b_{m,n}` on a `J`-expansion;
//! * Mehler: `P_t φ(x) = ∫ φ(e^{−e^{iθ}t} x + √(1 − e^{−2t cos θ}) y) dγ(y)`,
//!   evaluated by tensor Gauss–Hermite quadrature.
//!
//! The complex Gaussian `y = y₁ + i y₂` has independent unit-variance parts,
//! so `E|y|² = 2`; the noise factor `√(1 − e^{−2t cos θ})` multiplies that
//! variable as-is.

use serde::Serialize;

use crate::operator::eigenvalue;
use crate::{Error, Execution, GeneratorParams, MultiPoly, QuadratureRule, Result, SpectralCoeffs, C64};

/// `(θ, t)` together with the derived constants of the Mehler map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagatorParams {
    params: GeneratorParams,
    t: f64,
    /// `e^{−t cos θ}`
    decay: f64,
    /// `e^{−e^{iθ} t}`
    #[serde(skip)]
    contraction: C64,
    /// `√(1 − e^{−2t cos θ})`
    noise: f64,
}

impl PropagatorParams {
    pub fn new(params: GeneratorParams, t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidTime(t));
        }
        let decay = (-t * params.cos()).exp();
        Ok(Self {
            params,
            t,
            decay,
            contraction: (-params.drift() * t).exp(),
            noise: (-(-2.0 * t * params.cos()).exp_m1()).sqrt(),
        })
    }

    pub fn params(&self) -> GeneratorParams {
        self.params
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn contraction(&self) -> C64 {
        self.contraction
    }

    pub fn noise_scale(&self) -> f64 {
        self.noise
    }

    pub fn adjoint(&self) -> Self {
        adjoint_semigroup(*self)
    }
}

/// `P_t*` = the semigroup at `−θ`, same `t`.
pub fn adjoint_semigroup(p: PropagatorParams) -> PropagatorParams {
    PropagatorParams::new(p.params.adjoint(), p.t).expect("validated inputs stay valid")
}

/// `b_{m,n} ↦ e^{λ_{m,n} t} b_{m,n}`.
pub fn semigroup_spectral(p: PropagatorParams, f: &SpectralCoeffs) -> SpectralCoeffs {
    if p.t == 0.0 {
        return f.clone();
    }
    f.map_diagonal(|m, n| (eigenvalue(p.params, m, n) * p.t).exp())
}

/// Mehler integral at one point.
pub fn semigroup_mehler<F>(p: PropagatorParams, phi: F, x: C64, rule: &QuadratureRule, exec: Execution) -> C64
where
    F: Fn(C64) -> C64 + Sync + Send,
{
    if p.t == 0.0 {
        return phi(x);
    }
    let centre = p.contraction * x;
    rule.integrate_gamma(|y| phi(centre + y * p.noise), exec)
}

/// `P_t P_t* φ(x)`, `P_t* P_t φ(x)` and the single-integral form
/// `∫ φ(e^{−2t cos θ} x + √(1 − e^{−4t cos θ}) y) dγ(y)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormalityValues {
    #[serde(serialize_with = "ser_c64")]
    pub lhs: C64,
    #[serde(serialize_with = "ser_c64")]
    pub rhs: C64,
    #[serde(serialize_with = "ser_c64")]
    pub fused: C64,
}

impl NormalityValues {
    /// `max(|lhs − rhs|, |lhs − fused|) / (1 + |lhs|)`.
    pub fn relative_residual(&self) -> f64 {
        (self.lhs - self.rhs).norm().max((self.lhs - self.fused).norm()) / (1.0 + self.lhs.norm())
    }
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Nested Mehler quadrature in both orders plus the fused form. The same
/// rule serves both levels, so `K⁴` integrand evaluations per ordering.
pub fn normality_commutator<F>(
    p: PropagatorParams,
    phi: F,
    x: C64,
    rule: &QuadratureRule,
    exec: Execution,
) -> NormalityValues
where
    F: Fn(C64) -> C64 + Sync + Send,
{
    let adj = p.adjoint();
    let inner = |q: PropagatorParams| {
        let phi = &phi;
        move |u: C64| semigroup_mehler(q, phi, u, rule, Execution::Serial)
    };
    let lhs = semigroup_mehler(p, inner(adj), x, rule, exec);
    let rhs = semigroup_mehler(adj, inner(p), x, rule, exec);

    let c = p.params.cos();
    let shrink = (-2.0 * p.t * c).exp();
    let spread = (-(-4.0 * p.t * c).exp_m1()).sqrt();
    let fused = rule.integrate_gamma(|y| phi(x * shrink + y * spread), exec);
    NormalityValues { lhs, rhs, fused }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InvarianceReport {
    /// `∫ P_t φ dγ`
    #[serde(serialize_with = "ser_c64")]
    pub evolved_mean: C64,
    /// `∫ φ dγ`
    #[serde(serialize_with = "ser_c64")]
    pub mean: C64,
    pub residual: f64,
}

/// `|∫ P_t φ dγ − ∫ φ dγ|`, the outer integral by quadrature over Mehler
/// values.
pub fn invariance_check<F>(p: PropagatorParams, phi: F, rule: &QuadratureRule, exec: Execution) -> InvarianceReport
where
    F: Fn(C64) -> C64 + Sync + Send,
{
    let evolved_mean = rule.integrate_gamma(|x| semigroup_mehler(p, &phi, x, rule, Execution::Serial), exec);
    let mean = rule.integrate_gamma(&phi, exec);
    InvarianceReport {
        evolved_mean,
        mean,
        residual: (evolved_mean - mean).norm(),
    }
}

pub fn invariance_residual<F>(p: PropagatorParams, phi: F, rule: &QuadratureRule, exec: Execution) -> f64
where
    F: Fn(C64) -> C64 + Sync + Send,
{
    invariance_check(p, phi, rule, exec).residual
}

/// `|P_t φ(x) − ∫ φ dγ|` at a (large) time `t`.
pub fn ergodic_limit_residual<F>(
    params: GeneratorParams,
    phi: F,
    x: C64,
    t_large: f64,
    rule: &QuadratureRule,
    exec: Execution,
) -> Result<f64>
where
    F: Fn(C64) -> C64 + Sync + Send,
{
    if !(t_large > 0.0) {
        return Err(Error::InvalidTime(t_large));
    }
    let p = PropagatorParams::new(params, t_large)?;
    let evolved = semigroup_mehler(p, &phi, x, rule, exec);
    let mean = rule.integrate_gamma(&phi, exec);
    Ok((evolved - mean).norm())
}

/// Decay envelope `C e^{−d t cos θ}` for `|P_t φ(x) − ∫ φ dγ|`, where `d` is
/// the smallest nonzero total degree in the expansion and
/// `C = Σ_{(m,n) ≠ (0,0)} |b_{m,n}| |J_{m,n}(x)|`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErgodicEnvelope {
    pub min_degree: Option<u32>,
    pub constant: f64,
    pub bound: f64,
}

pub fn ergodic_envelope(
    params: GeneratorParams,
    coeffs: &SpectralCoeffs,
    x: C64,
    t: f64,
) -> Result<ErgodicEnvelope> {
    let mut constant = 0.0;
    let mut min_degree: Option<u32> = None;
    for ((m, n), b) in coeffs.iter() {
        if m + n == 0 {
            continue;
        }
        constant += b.norm() * crate::hermite::complex_hermite(m as usize, n as usize)?.eval(x).norm();
        min_degree = Some(min_degree.map_or(m + n, |d| d.min(m + n)));
    }
    let bound = match min_degree {
        Some(d) => constant * (-(d as f64) * t * params.cos()).exp(),
        None => 0.0,
    };
    Ok(ErgodicEnvelope {
        min_degree,
        constant,
        bound,
    })
}

/// The 2×2 unitary
/// `M = [[e^{−αt}, s], [−s, e^{−ᾱt}]]`, `α = e^{iθ}`, `s = √(1 − e^{−2t cos θ})`.
pub fn mixing_matrix(p: PropagatorParams) -> [[C64; 2]; 2] {
    let s = C64::new(p.noise, 0.0);
    [[p.contraction, s], [-s, p.contraction.conj()]]
}

/// `|E F(M(z₁, z₂)) − E F(z₁, z₂)|` for independent `z₁, z₂ ~ γ` and a
/// two-slot polynomial `F`, both by four-dimensional quadrature.
pub fn mixing_invariance_defect(
    p: PropagatorParams,
    f: &MultiPoly,
    rule: &QuadratureRule,
    exec: Execution,
) -> Result<f64> {
    if f.slots() != 2 {
        return Err(Error::SlotMismatch {
            expected: 2,
            got: f.slots(),
        });
    }
    let m = mixing_matrix(p);
    let ev = |a: C64, b: C64| f.eval(&[a, b]).expect("two slots");
    let mixed = rule.integrate_gamma(
        |z1| {
            rule.integrate_gamma(
                |z2| ev(m[0][0] * z1 + m[0][1] * z2, m[1][0] * z1 + m[1][1] * z2),
                Execution::Serial,
            )
        },
        exec,
    );
    let direct = rule.integrate_gamma(|z1| rule.integrate_gamma(|z2| ev(z1, z2), Execution::Serial), exec);
    Ok((mixed - direct).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::complex_hermite;
    use crate::Poly;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, LN_2};

    const EX: Execution = Execution::Serial;

    fn gauss_rule(k: usize) -> QuadratureRule {
        crate::quadrature::gauss_hermite_rule(k).unwrap()
    }

    fn prop(theta: f64, t: f64) -> PropagatorParams {
        PropagatorParams::new(GeneratorParams::new(theta).unwrap(), t).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn time_validation() {
        let g = GeneratorParams::new(0.1).unwrap();
        assert!(matches!(PropagatorParams::new(g, -1e-3), Err(Error::InvalidTime(_))));
        assert!(PropagatorParams::new(g, f64::INFINITY).is_err());
        let p0 = PropagatorParams::new(g, 0.0).unwrap();
        assert_eq!(p0.decay(), 1.0);
        assert_eq!(p0.noise_scale(), 0.0);
    }

    #[test]
    fn spectral_examples() {
        let f = SpectralCoeffs::from_pairs([((2, 1), c(0.3, 1.0)), ((0, 4), c(-2.0, 0.5))]);
        assert_eq!(semigroup_spectral(prop(0.4, 0.0), &f), f);
        let one = SpectralCoeffs::single(0, 0, c(1.0, 0.0));
        assert_eq!(semigroup_spectral(prop(1.1, 7.5), &one), one);
        let g = semigroup_spectral(prop(0.0, LN_2), &SpectralCoeffs::single(1, 0, c(1.0, 0.0)));
        assert!((g.get(1, 0) - 0.5).norm() < 1e-15);
    }

    #[test]
    fn mehler_examples() {
        let rule = gauss_rule(6);
        for (th, t, x) in [(0.3, 1.0, c(1.0, 2.0)), (-1.0, 0.2, c(-0.5, 0.0))] {
            let v = semigroup_mehler(prop(th, t), |_| c(1.0, 0.0), x, &rule, EX);
            assert!((v - 1.0).norm() < 1e-14);
        }
        let j11 = complex_hermite(1, 1).unwrap();
        let v = semigroup_mehler(prop(FRAC_PI_4, 1.0), |w| j11.eval(w), c(1.0, 1.0), &rule, EX);
        assert!(v.norm() < 1e-14);
        for (th, t, x) in [(0.0, 1.0, c(1.0, 0.0)), (0.9, 0.3, c(-2.0, 0.7)), (-1.3, 2.0, c(0.1, 0.1))] {
            let v = semigroup_mehler(prop(th, t), |w| w, x, &rule, EX);
            let exact = (-C64::from_polar(1.0, th) * t).exp() * x;
            assert!((v - exact).norm() < 1e-14);
        }
    }

    #[test]
    fn adjoint_examples() {
        let p = prop(0.0, 1.0);
        assert_eq!(adjoint_semigroup(p), p);
        let p = prop(0.6, 2.0);
        assert_eq!(adjoint_semigroup(adjoint_semigroup(p)), p);
        assert_eq!(adjoint_semigroup(p).params().theta(), -0.6);
    }

    #[test]
    fn normality_examples() {
        let rule = gauss_rule(4);
        let one = normality_commutator(prop(0.5, 1.0), |_| c(1.0, 0.0), c(0.3, 0.3), &rule, EX);
        for v in [one.lhs, one.rhs, one.fused] {
            assert!((v - 1.0).norm() < 1e-13);
        }

        let (th, t) = (FRAC_PI_4, 0.5);
        let vals = normality_commutator(prop(th, t), |w| c(w.norm_sqr(), 0.0), c(0.0, 0.0), &rule, EX);
        let expected = 2.0 * (1.0 - (-4.0 * t * th.cos()).exp());
        for v in [vals.lhs, vals.rhs, vals.fused] {
            assert!((v - expected).norm() < 1e-13, "{v} vs {expected}");
        }

        // θ = 0: P_t P_t = P_{2t}
        let phi = Poly::from_terms([(2, 1, c(1.0, -0.5)), (0, 3, c(0.2, 0.0)), (1, 0, c(1.0, 1.0))]);
        let x = c(0.7, -0.4);
        let vals = normality_commutator(prop(0.0, 0.8), |w| phi.eval(w), x, &rule, EX);
        let direct = semigroup_mehler(prop(0.0, 1.6), |w| phi.eval(w), x, &rule, EX);
        assert!((vals.lhs - direct).norm() < 1e-12 * (1.0 + direct.norm()));
    }

    #[test]
    fn invariance_examples() {
        let rule = gauss_rule(8);
        let j22 = complex_hermite(2, 2).unwrap();
        for (th, t) in [(0.0, 1.0), (1.0, 0.3)] {
            let rep = invariance_check(prop(th, t), |w| j22.eval(w), &rule, EX);
            assert!(rep.residual < 1e-12 && rep.mean.norm() < 1e-12);
        }
        let rep = invariance_check(prop(FRAC_PI_6, 1.0), |w| c(w.norm_sqr(), 0.0), &rule, EX);
        assert!(rep.residual < 1e-12);
        assert!((rep.mean - 2.0).norm() < 1e-12 && (rep.evolved_mean - 2.0).norm() < 1e-12);
        assert!(invariance_residual(prop(0.2, 3.0), |_| c(1.0, 0.0), &rule, EX) < 1e-14);
    }

    #[test]
    fn ergodic_examples() {
        let rule = gauss_rule(6);
        let g0 = GeneratorParams::new(0.0).unwrap();
        for t in [0.5, 3.0] {
            let r = ergodic_limit_residual(g0, |_| c(3.0, -1.0), c(2.0, 1.0), t, &rule, EX).unwrap();
            assert!(r < 1e-14);
        }
        let j10 = complex_hermite(1, 0).unwrap();
        for t in [0.5, 2.0, 5.0] {
            let r = ergodic_limit_residual(g0, |w| j10.eval(w), c(1.0, 0.0), t, &rule, EX).unwrap();
            let expected = (-t).exp() / 2f64.sqrt();
            assert!((r - expected).abs() < 1e-14);
        }
        let g = GeneratorParams::new(FRAC_PI_4).unwrap();
        let r = ergodic_limit_residual(g, |w| c(w.norm_sqr(), 0.0), c(2.0, 0.0), 10.0, &rule, EX).unwrap();
        assert!(r <= 1e-5);
        let env = ergodic_envelope(g, &crate::hermite::monomial_to_hermite(1, 1).unwrap(), c(2.0, 0.0), 10.0).unwrap();
        assert_eq!(env.min_degree, Some(2));
        assert!(r <= env.bound * (1.0 + 1e-9));
        assert!(ergodic_limit_residual(g, |w| w, c(1.0, 0.0), 0.0, &rule, EX).is_err());
    }

    #[test]
    fn mixing_matrix_is_unitary() {
        let m = mixing_matrix(prop(0.9, 0.7));
        for i in 0..2 {
            for j in 0..2 {
                let dot = m[i][0] * m[j][0].conj() + m[i][1] * m[j][1].conj();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((dot - target).norm() < 1e-15);
            }
        }
    }
}
