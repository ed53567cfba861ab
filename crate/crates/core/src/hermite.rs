//! Real and complex Hermite polynomials and the basis changes between them.
//!
//! Conventions:
//!
//! * `H_n(x) = ((−1)^n/√n!) e^{x²/2} dⁿ/dxⁿ e^{−x²/2}`, orthonormal for the
//!   standard one-dimensional Gaussian; leading coefficient `1/√n!`.
//! * `J_{m,n}` is orthonormal in `L²(γ)` and has bidegree `(m, n)` in
//!   `(z, z̄)`. It is produced by a closed-form sum ([`complex_hermite`]) and,
//!   independently, by iterating the creation operators
//!   `∂*φ = −∂z̄φ + (z/2)φ`, `∂̄*φ = −∂zφ + (z̄/2)φ` on the constant `1`
//!   ([`complex_hermite_via_creation`]).
//!
//! Factorial-bearing normalisations are accumulated in log space, so every
//! routine stays finite up to `m + n = 64`.

use serde::{Deserialize, Serialize};

use crate::special::{binomial, binomial_signed, i_pow, ln_factorial};
use crate::{Error, Poly, QuadratureRule, Result, SpectralCoeffs, C64};

/// Largest total degree handled by the closed-form routines.
pub const MAX_DEGREE: usize = 64;
/// Largest total degree accepted by the creation-operator route.
pub const MAX_CREATION_DEGREE: usize = 32;
/// Largest level `ℓ` accepted by [`build_basis_transform`].
pub const MAX_TRANSFORM_DEGREE: usize = 16;

fn check(what: &'static str, value: usize, max: usize) -> Result<()> {
    if value > max {
        Err(Error::DegreeOutOfRange { what, value, max })
    } else {
        Ok(())
    }
}

const LN_2: f64 = std::f64::consts::LN_2;

/// Univariate real Hermite polynomial in the normalised convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealHermite {
    pub n: usize,
    /// `coeffs[k]` multiplies `x^k`.
    pub coeffs: Vec<f64>,
}

impl RealHermite {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Substitutes a polynomial in `(z, z̄)` for `x`.
    pub fn compose_with(&self, x: &Poly) -> Poly {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| &(&acc * x) + &Poly::constant(C64::new(c, 0.0)))
    }
}

/// `H_n` from `H_{k+1} = (x H_k − √k H_{k−1}) / √(k+1)`.
pub fn real_hermite(n: usize) -> Result<RealHermite> {
    check("n", n, MAX_DEGREE)?;
    let mut prev = vec![1.0];
    if n == 0 {
        return Ok(RealHermite { n, coeffs: prev });
    }
    let mut cur = vec![0.0, 1.0];
    for k in 1..n {
        let mut next = vec![0.0; k + 2];
        for (j, &c) in cur.iter().enumerate() {
            next[j + 1] += c;
        }
        let sk = (k as f64).sqrt();
        for (j, &c) in prev.iter().enumerate() {
            next[j] -= sk * c;
        }
        let norm = ((k + 1) as f64).sqrt();
        next.iter_mut().for_each(|c| *c /= norm);
        prev = cur;
        cur = next;
    }
    Ok(RealHermite { n, coeffs: cur })
}

/// `J_{m,n} = (m! n! 2^{m+n})^{−1/2} Σ_{r ≤ m∧n} (−1)^r r! 2^r C(m,r) C(n,r) z^{m−r} z̄^{n−r}`.
pub fn complex_hermite(m: usize, n: usize) -> Result<Poly> {
    check("m + n", m + n, MAX_DEGREE)?;
    let ln_norm = -0.5 * (ln_factorial(m) + ln_factorial(n) + (m + n) as f64 * LN_2);
    let terms = (0..=m.min(n)).map(|r| {
        let ln_mag = ln_norm
            + ln_factorial(r)
            + r as f64 * LN_2
            + (binomial(m, r) as f64).ln()
            + (binomial(n, r) as f64).ln();
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        ((m - r) as u32, (n - r) as u32, C64::new(sign * ln_mag.exp(), 0.0))
    });
    Ok(Poly::from_terms(terms))
}

fn creation(p: &Poly) -> Poly {
    // ∂*φ = −∂z̄ φ + (z/2) φ
    let half_z = Poly::monomial(1, 0, C64::new(0.5, 0.0));
    &(&half_z * p) - &p.wirtinger_dzbar()
}

fn creation_bar(p: &Poly) -> Poly {
    // ∂̄*φ = −∂z φ + (z̄/2) φ
    let half_zbar = Poly::monomial(0, 1, C64::new(0.5, 0.0));
    &(&half_zbar * p) - &p.wirtinger_dz()
}

/// `J_{m,n} = √(2^{m+n}/(m! n!)) (∂*)^m (∂̄*)^n 1`.
pub fn complex_hermite_via_creation(m: usize, n: usize) -> Result<Poly> {
    check("m + n", m + n, MAX_CREATION_DEGREE)?;
    let mut p = Poly::one();
    for _ in 0..n {
        p = creation_bar(&p);
    }
    for _ in 0..m {
        p = creation(&p);
    }
    let scale = (0.5 * ((m + n) as f64 * LN_2 - ln_factorial(m) - ln_factorial(n))).exp();
    Ok(p.scale(C64::new(scale, 0.0)))
}

/// `z^m z̄^n = Σ_{k ≤ m∧n} C(m,k) C(n,k) k! √((m−k)! (n−k)! 2^{m+n}) J_{m−k,n−k}`.
pub fn monomial_to_hermite(m: usize, n: usize) -> Result<SpectralCoeffs> {
    check("m + n", m + n, MAX_DEGREE)?;
    Ok(SpectralCoeffs::from_pairs((0..=m.min(n)).map(|k| {
        let ln_mag = (binomial(m, k) as f64).ln()
            + (binomial(n, k) as f64).ln()
            + ln_factorial(k)
            + 0.5 * (ln_factorial(m - k) + ln_factorial(n - k) + (m + n) as f64 * LN_2);
        (((m - k) as u32, (n - k) as u32), C64::new(ln_mag.exp(), 0.0))
    })))
}

/// Change of basis on the degree-`ℓ` subspace between
/// `{H_k(x) H_{ℓ−k}(y)}_{k=0..ℓ}` and `{J_{m,ℓ−m}}_{m=0..ℓ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTransform {
    pub degree: usize,
    /// `forward[m][k]`: coefficient of `H_k(x) H_{ℓ−k}(y)` in `J_{m,ℓ−m}`.
    pub forward: Vec<Vec<C64>>,
    /// `inverse[k][m]`: coefficient of `J_{m,ℓ−m}` in `H_k(x) H_{ℓ−k}(y)`.
    pub inverse: Vec<Vec<C64>>,
}

/// Builds both directions from their closed forms. The inverse is *not* the
/// numerical inverse of the forward matrix; `C(a, b) = 0` whenever `b` lies
/// outside `0..=a`.
pub fn build_basis_transform(degree: usize) -> Result<BasisTransform> {
    check("degree", degree, MAX_TRANSFORM_DEGREE)?;
    let l = degree;
    let lf = |k: usize| ln_factorial(k);

    let forward = (0..=l)
        .map(|m| {
            (0..=l)
                .map(|k| {
                    let inner: i64 = (0..=k)
                        .map(|r| {
                            let s = k - r;
                            let sign = if (l as i64 - m as i64 - s as i64).rem_euclid(2) == 0 {
                                1
                            } else {
                                -1
                            };
                            sign * (binomial_signed(m as i64, r as i64)
                                * binomial_signed((l - m) as i64, s as i64))
                                as i64
                        })
                        .sum();
                    let mag = (0.5 * (lf(k) + lf(l - k) - l as f64 * LN_2 - lf(m) - lf(l - m))).exp();
                    i_pow(l - k) * (mag * inner as f64)
                })
                .collect()
        })
        .collect();

    let inverse = (0..=l)
        .map(|k| {
            (0..=l)
                .map(|m| {
                    let inner: i64 = (0..=m)
                        .map(|r| {
                            let s = m - r;
                            let sign = if s % 2 == 0 { 1 } else { -1 };
                            sign * (binomial_signed(k as i64, r as i64)
                                * binomial_signed((l - k) as i64, s as i64))
                                as i64
                        })
                        .sum();
                    let mag = (0.5 * (lf(m) + lf(l - m) - l as f64 * LN_2 - lf(k) - lf(l - k))).exp();
                    i_pow(l - k) * (mag * inner as f64)
                })
                .collect()
        })
        .collect();

    Ok(BasisTransform {
        degree,
        forward,
        inverse,
    })
}

fn mat_mul(a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = a.len();
    let p = b[0].len();
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| crate::sum::sum_c64((0..b.len()).map(|k| a[i][k] * b[k][j])))
                .collect()
        })
        .collect()
}

fn adjoint(a: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = a.len();
    let p = a[0].len();
    (0..p).map(|j| (0..n).map(|i| a[i][j].conj()).collect()).collect()
}

fn identity_defect(a: &[Vec<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

impl BasisTransform {
    /// `max |forward · inverse − I|`.
    pub fn inverse_defect(&self) -> f64 {
        identity_defect(&mat_mul(&self.forward, &self.inverse))
            .max(identity_defect(&mat_mul(&self.inverse, &self.forward)))
    }

    /// `max |M M^H − I|` for the forward matrix.
    pub fn forward_unitarity_defect(&self) -> f64 {
        identity_defect(&mat_mul(&self.forward, &adjoint(&self.forward)))
    }

    /// `max |M M^H − I|` for the inverse matrix.
    pub fn inverse_unitarity_defect(&self) -> f64 {
        identity_defect(&mat_mul(&self.inverse, &adjoint(&self.inverse)))
    }

    /// CSV layout: one row per `m`, one column per `k`, cells `re,im` pairs
    /// flattened as `re_k0,im_k0,re_k1,im_k1,…`.
    pub fn forward_csv(&self) -> String {
        let mut out = String::from("m");
        for k in 0..=self.degree {
            out.push_str(&format!(",re_k{k},im_k{k}"));
        }
        out.push('\n');
        for (m, row) in self.forward.iter().enumerate() {
            out.push_str(&m.to_string());
            for c in row {
                out.push(',');
                out.push_str(&crate::io::fmt_f64(c.re));
                out.push(',');
                out.push_str(&crate::io::fmt_f64(c.im));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_document(&self) -> TransformDocument {
        let conv = |m: &Vec<Vec<C64>>| {
            m.iter()
                .map(|row| row.iter().map(|c| ComplexEntry { re: c.re, im: c.im }).collect())
                .collect()
        };
        TransformDocument {
            degree: self.degree,
            forward: conv(&self.forward),
            inverse: conv(&self.inverse),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

/// JSON form of a [`BasisTransform`]; `forward` is row-per-`m`, `inverse`
/// row-per-`k`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TransformDocument {
    pub degree: usize,
    pub forward: Vec<Vec<ComplexEntry>>,
    pub inverse: Vec<Vec<ComplexEntry>>,
}

/// `H_k(x) H_j(y)` written as a polynomial in `(z, z̄)` through
/// `x = (z + z̄)/2`, `y = (z − z̄)/(2i)`.
pub fn hermite_product_poly(k: usize, j: usize) -> Result<Poly> {
    let x = Poly::from_terms([(1, 0, C64::new(0.5, 0.0)), (0, 1, C64::new(0.5, 0.0))]);
    let y = Poly::from_terms([(1, 0, C64::new(0.0, -0.5)), (0, 1, C64::new(0.0, 0.5))]);
    Ok(&real_hermite(k)?.compose_with(&x) * &real_hermite(j)?.compose_with(&y))
}

/// `max |⟨J_{m,n}, J_{p,q}⟩_γ − δ|` over all `m + n, p + q <= max_degree`.
pub fn orthonormality_defect(
    max_degree: usize,
    rule: &QuadratureRule,
    exec: crate::Execution,
) -> Result<f64> {
    let indices: Vec<(usize, usize)> = (0..=max_degree)
        .flat_map(|d| (0..=d).map(move |m| (m, d - m)))
        .collect();
    let polys = indices
        .iter()
        .map(|&(m, n)| complex_hermite(m, n))
        .collect::<Result<Vec<_>>>()?;
    let nodes = rule.tensor_nodes();
    // values[i][node]
    let values: Vec<Vec<C64>> = exec.map_slice(&polys, |p| nodes.iter().map(|&(w, _)| p.eval(w)).collect());
    let weights: Vec<f64> = nodes.iter().map(|&(_, wt)| wt).collect();
    let row_defects = exec.map_indexed(indices.len(), |i| {
        let mut worst = 0.0f64;
        for j in 0..=i {
            let ip = crate::sum::sum_c64(
                (0..weights.len()).map(|q| values[i][q] * values[j][q].conj() * weights[q]),
            );
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((ip - target).norm());
        }
        worst
    });
    Ok(row_defects.into_iter().fold(0.0, f64::max))
}
