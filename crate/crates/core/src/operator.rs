//! The generator `L_θ` in differential (Wirtinger) and spectral form, its
//! adjoint, the carré du champ `Γ`, and the diffusion chain rule.
//!
//! Eigenvalues: `L_θ J_{m,n} = λ_{m,n} J_{m,n}` with
//! `λ_{m,n} = −[(m+n) cos θ + i (m−n) sin θ]`, and `L_θ* = L_{−θ}`.

use serde::Serialize;

use crate::{Error, MultiPoly, Poly, Result, SpectralCoeffs, C64};

/// Largest accepted `|θ|`; `cos θ` stays bounded away from zero.
pub const THETA_LIMIT: f64 = 0.499999 * std::f64::consts::PI;

/// The angle `θ` defining `L_θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorParams {
    theta: f64,
}

impl GeneratorParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta.abs() > THETA_LIMIT {
            return Err(Error::InvalidTheta(theta));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn cos(&self) -> f64 {
        self.theta.cos()
    }

    pub fn sin(&self) -> f64 {
        self.theta.sin()
    }

    /// `e^{iθ}`, the drift coefficient of the SDE.
    pub fn drift(&self) -> C64 {
        C64::from_polar(1.0, self.theta)
    }

    pub fn eigenvalue(&self, m: u32, n: u32) -> C64 {
        eigenvalue(*self, m, n)
    }

    pub fn adjoint(&self) -> Self {
        adjoint_params(*self)
    }
}

/// `λ_{m,n} = −[(m+n) cos θ + i (m−n) sin θ]`.
pub fn eigenvalue(params: GeneratorParams, m: u32, n: u32) -> C64 {
    let (m, n) = (m as f64, n as f64);
    -C64::new((m + n) * params.cos(), (m - n) * params.sin())
}

/// `θ ↦ −θ`.
pub fn adjoint_params(params: GeneratorParams) -> GeneratorParams {
    GeneratorParams {
        theta: -params.theta,
    }
}

/// `4 cos θ ∂z∂z̄ φ − e^{iθ} z ∂z φ − e^{−iθ} z̄ ∂z̄ φ`, exact on polynomials.
pub fn apply_generator_wirtinger(params: GeneratorParams, phi: &Poly) -> Poly {
    let dz = phi.wirtinger_dz();
    let dzbar = phi.wirtinger_dzbar();
    let laplacian = dz.wirtinger_dzbar().scale(C64::new(4.0 * params.cos(), 0.0));
    let drift = params.drift();
    let radial = Poly::monomial(1, 0, drift) * &dz;
    let radial_bar = Poly::monomial(0, 1, drift.conj()) * &dzbar;
    &(&laplacian - &radial) - &radial_bar
}

/// `b_{m,n} ↦ λ_{m,n} b_{m,n}`.
pub fn apply_generator_spectral(params: GeneratorParams, f: &SpectralCoeffs) -> SpectralCoeffs {
    f.map_diagonal(|m, n| eigenvalue(params, m, n))
}

/// `Σ (m² + n² + 2mn cos 2θ) |b_{m,n}|²`, which equals `‖L_θ f‖²`.
pub fn domain_seminorm_sq(params: GeneratorParams, f: &SpectralCoeffs) -> f64 {
    let c2 = (2.0 * params.theta).cos();
    crate::sum::sum_f64(f.iter().map(|((m, n), b)| {
        let (m, n) = (m as f64, n as f64);
        (m * m + n * n + 2.0 * m * n * c2) * b.norm_sqr()
    }))
}

/// `Γ(φ, ψ) = 2[∂zφ · conj(∂zψ) + ∂z̄φ · conj(∂z̄ψ)]`.
///
/// Linear in `φ`, conjugate-linear in `ψ`, and independent of `θ`.
pub fn carre_du_champ(phi: &Poly, psi: &Poly) -> Poly {
    let a = phi.wirtinger_dz() * psi.wirtinger_dz().conjugate();
    let b = phi.wirtinger_dzbar() * psi.wirtinger_dzbar().conjugate();
    (a + b).scale(C64::new(2.0, 0.0))
}

/// `Γ(φ, ψ) = (1/2cos θ)[L_θ(φψ̄) − φ L_θ(ψ̄) − ψ̄ L_θ(φ)]`.
pub fn carre_du_champ_via_generator(params: GeneratorParams, phi: &Poly, psi: &Poly) -> Poly {
    let psi_bar = psi.conjugate();
    let l = |p: &Poly| apply_generator_wirtinger(params, p);
    let whole = l(&(phi * &psi_bar));
    let parts = phi * &l(&psi_bar) + &psi_bar * &l(phi);
    (whole - parts).scale(C64::new(1.0 / (2.0 * params.cos()), 0.0))
}

/// Both sides of the diffusion chain rule and their discrepancy.
#[derive(Debug, Clone)]
pub struct ChainRuleReport {
    /// `L_θ(F ∘ φ)` computed on the composed polynomial.
    pub lhs: Poly,
    /// The Γ/first-order expansion.
    pub rhs: Poly,
    /// Largest coefficient magnitude of `lhs − rhs`.
    pub residual: f64,
    /// Largest coefficient magnitude of `lhs`.
    pub lhs_scale: f64,
}

impl ChainRuleReport {
    /// `residual <= tol · (1 + ‖lhs‖)`.
    pub fn within(&self, tol: f64) -> bool {
        self.residual <= tol * (1.0 + self.lhs_scale)
    }
}

/// Evaluates
///
/// ```text
/// L(F∘φ) = cos θ Σ_ij [ Γ(φ_i, φ̄_j) ∂²F/∂w_i∂w_j + Γ(φ̄_i, φ_j) ∂²F/∂w̄_i∂w̄_j
///                      + 2 Γ(φ_i, φ_j) ∂²F/∂w_i∂w̄_j ] ∘ φ
///          + Σ_i [ L φ_i ∂F/∂w_i + L φ̄_i ∂F/∂w̄_i ] ∘ φ
/// ```
///
/// with both sides computed as exact polynomials.
pub fn diffusion_chain_rule(
    params: GeneratorParams,
    f: &MultiPoly,
    phis: &[Poly],
) -> Result<ChainRuleReport> {
    let n = f.slots();
    if phis.len() != n {
        return Err(Error::SlotMismatch {
            expected: n,
            got: phis.len(),
        });
    }
    let l = |p: &Poly| apply_generator_wirtinger(params, p);
    let lhs = l(&f.compose(phis)?);

    let conj: Vec<Poly> = phis.iter().map(Poly::conjugate).collect();
    let cos = C64::new(params.cos(), 0.0);
    let mut rhs = Poly::zero();
    for i in 0..n {
        for j in 0..n {
            let fww = f.d_w(i).d_w(j).compose(phis)?;
            let fbb = f.d_wbar(i).d_wbar(j).compose(phis)?;
            let fwb = f.d_w(i).d_wbar(j).compose(phis)?;
            let second = carre_du_champ(&phis[i], &conj[j]) * &fww
                + carre_du_champ(&conj[i], &phis[j]) * &fbb
                + (carre_du_champ(&phis[i], &phis[j]) * &fwb).scale(C64::new(2.0, 0.0));
            rhs = rhs + second.scale(cos);
        }
        let fw = f.d_w(i).compose(phis)?;
        let fb = f.d_wbar(i).compose(phis)?;
        rhs = rhs + l(&phis[i]) * &fw + l(&conj[i]) * &fb;
    }
    let residual = lhs.max_abs_diff(&rhs);
    let lhs_scale = lhs.max_abs_coeff();
    Ok(ChainRuleReport {
        lhs,
        rhs,
        residual,
        lhs_scale,
    })
}

/// Max-coefficient residual of the diffusion chain rule.
pub fn diffusion_chain_rule_residual(
    params: GeneratorParams,
    f: &MultiPoly,
    phis: &[Poly],
) -> Result<f64> {
    Ok(diffusion_chain_rule(params, f, phis)?.residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::complex_hermite;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

    fn p(theta: f64) -> GeneratorParams {
        GeneratorParams::new(theta).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn theta_validation() {
        assert!(GeneratorParams::new(0.49 * PI).is_ok());
        assert!(GeneratorParams::new(-0.499999 * PI).is_ok());
        assert!(matches!(GeneratorParams::new(0.5 * PI), Err(Error::InvalidTheta(_))));
        assert!(GeneratorParams::new(-2.0).is_err());
        assert!(GeneratorParams::new(f64::NAN).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue(p(0.0), 2, 1), c(-3.0, 0.0));
        for th in [0.0, 0.3, -1.2] {
            assert_eq!(eigenvalue(p(th), 0, 0), c(0.0, 0.0));
        }
        let l = eigenvalue(p(FRAC_PI_4), 1, 0);
        let h = 2f64.sqrt() / 2.0;
        assert!((l - c(-h, -h)).norm() < 1e-15);
        assert!((l + C64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-15);
    }

    #[test]
    fn wirtinger_examples() {
        for th in [0.0, 0.7, -1.3] {
            assert!(apply_generator_wirtinger(p(th), &Poly::one()).is_zero());
        }
        let zz = Poly::monomial(1, 1, c(1.0, 0.0));
        let got = apply_generator_wirtinger(p(0.0), &zz);
        let expected = Poly::from_terms([(0, 0, c(4.0, 0.0)), (1, 1, c(-2.0, 0.0))]);
        assert!(got.max_abs_diff(&expected) < 1e-15);
        for th in [0.0, 0.4, -1.1] {
            let j11 = complex_hermite(1, 1).unwrap();
            let got = apply_generator_wirtinger(p(th), &j11);
            let expected = j11.scale(c(-2.0 * th.cos(), 0.0));
            assert!(got.max_abs_diff(&expected) < 1e-14);
        }
    }

    #[test]
    fn spectral_examples() {
        let one = SpectralCoeffs::single(0, 0, c(1.0, 0.0));
        assert!(apply_generator_spectral(p(0.3), &one).is_empty());
        let f = SpectralCoeffs::single(2, 1, c(1.0, 0.0));
        assert_eq!(apply_generator_spectral(p(0.0), &f).get(2, 1), c(-3.0, 0.0));
        let f = SpectralCoeffs::from_pairs([((1, 0), c(1.0, 0.0)), ((0, 1), c(1.0, 0.0))]);
        let g = apply_generator_spectral(p(FRAC_PI_6), &f);
        assert!((g.get(1, 0) + C64::from_polar(1.0, FRAC_PI_6)).norm() < 1e-15);
        assert!((g.get(0, 1) + C64::from_polar(1.0, -FRAC_PI_6)).norm() < 1e-15);
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(adjoint_params(p(0.0)).theta(), 0.0);
        assert_eq!(adjoint_params(p(FRAC_PI_4)).theta(), -FRAC_PI_4);
        let q = p(0.77);
        assert_eq!(adjoint_params(adjoint_params(q)), q);
    }

    #[test]
    fn seminorm_examples() {
        assert_eq!(domain_seminorm_sq(p(0.3), &SpectralCoeffs::single(0, 0, c(5.0, 1.0))), 0.0);
        assert!((domain_seminorm_sq(p(0.0), &SpectralCoeffs::single(1, 1, c(1.0, 0.0))) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_examples() {
        let z = Poly::z();
        assert_eq!(carre_du_champ(&z, &z), Poly::constant(c(2.0, 0.0)));
        let j10 = complex_hermite(1, 0).unwrap();
        let g = carre_du_champ(&j10, &j10);
        assert!(g.max_abs_diff(&Poly::one()) < 1e-15);
        assert!(carre_du_champ(&z, &Poly::zbar()).is_zero());
    }

    #[test]
    fn gamma_generator_route_examples() {
        for th in [0.0, 0.5, -1.0] {
            let z = Poly::z();
            let g = carre_du_champ_via_generator(p(th), &z, &z);
            assert!(g.max_abs_diff(&Poly::constant(c(2.0, 0.0))) < 1e-14);
        }
    }

    #[test]
    fn chain_rule_examples() {
        let w = MultiPoly::var(1, 0);
        let j21 = complex_hermite(2, 1).unwrap();
        assert!(diffusion_chain_rule_residual(p(0.4), &w, &[j21]).unwrap() < 1e-13);

        let wwbar = MultiPoly::var(1, 0).mul(&MultiPoly::var_conj(1, 0));
        let rep = diffusion_chain_rule(p(0.0), &wwbar, &[Poly::z()]).unwrap();
        let expected = Poly::from_terms([(0, 0, c(4.0, 0.0)), (1, 1, c(-2.0, 0.0))]);
        assert!(rep.lhs.max_abs_diff(&expected) < 1e-14);
        assert!(rep.rhs.max_abs_diff(&expected) < 1e-14);

        let w2 = MultiPoly::var(1, 0).mul(&MultiPoly::var(1, 0));
        let rep = diffusion_chain_rule(p(FRAC_PI_4), &w2, &[complex_hermite(1, 0).unwrap()]).unwrap();
        assert!(rep.within(1e-9));
    }

    #[test]
    fn chain_rule_rejects_arity_mismatch() {
        let f = MultiPoly::var(2, 0);
        assert!(diffusion_chain_rule(p(0.1), &f, &[Poly::z()]).is_err());
    }
}
