//! Gauss–Hermite integration against the standard planar Gaussian
//! `dγ = (1/2π) e^{−(x²+y²)/2} dx dy`.
//!
//! Rules use the probabilist weight `e^{−x²/2}/√(2π)` (unit variance per
//! coordinate) and are tensorised over `(x, y)`. Nodes come from the
//! eigenvalues of the symmetric Jacobi matrix, polished by Newton steps on
//! the orthonormal recurrence; weights are Christoffel numbers
//! `1 / Σ_{k<K} H_k(x_i)²`.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;
use serde::Serialize;

use crate::sum::{sum_c64, sum_f64, ComplexSum};
use crate::{hermite, Error, Execution, Result, SpectralCoeffs, C64};

pub const MAX_ORDER: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Orthonormal Hermite values `(H_{K−1}(x), H_K(x))` and `Σ_{k<K} H_k(x)²`.
fn orthonormal_tail(k_max: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sumsq = 0.0;
    for k in 0..k_max {
        sumsq += cur * cur;
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (prev, cur, sumsq)
}

/// `K`-point rule exact for univariate polynomials of degree `<= 2K − 1`.
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidOrder(order));
    }
    let k = order;
    let jacobi = DMatrix::from_fn(k, k, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));

    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (pkm1, pk, _) = orthonormal_tail(k, *x);
            let step = pk / ((k as f64).sqrt() * pkm1);
            *x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
    }
    // Exact reflection symmetry about the origin.
    for i in 0..k / 2 {
        let x = 0.5 * (nodes[k - 1 - i] - nodes[i]);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }

    let mut weights: Vec<f64> = nodes.iter().map(|&x| 1.0 / orthonormal_tail(k, x).2).collect();
    for i in 0..k / 2 {
        let w = 0.5 * (weights[i] + weights[k - 1 - i]);
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    let total = sum_f64(weights.iter().copied());
    weights.iter_mut().for_each(|w| *w /= total);

    Ok(QuadratureRule {
        order,
        nodes,
        weights,
    })
}

impl QuadratureRule {
    /// Default rule for projections up to total degree `max_total_degree`:
    /// `K = max_total_degree + 2`.
    pub fn for_degree(max_total_degree: usize) -> Result<Self> {
        gauss_hermite_rule(max_total_degree + 2)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// All `K²` planar nodes `x_i + i y_j` with product weights, row-major in `i`.
    pub fn tensor_nodes(&self) -> Vec<(C64, f64)> {
        let mut out = Vec::with_capacity(self.order * self.order);
        for (&x, &wx) in self.nodes.iter().zip(&self.weights) {
            for (&y, &wy) in self.nodes.iter().zip(&self.weights) {
                out.push((C64::new(x, y), wx * wy));
            }
        }
        out
    }

    /// `∫ g dN(0,1)` on the real line.
    pub fn integrate_1d<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        sum_f64(self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)))
    }

    /// `∫ f dγ = Σ_ij w_i w_j f(x_i + i y_j)`; rows are summed independently
    /// (possibly in parallel) and combined in row order.
    pub fn integrate_gamma<F>(&self, f: F, exec: Execution) -> C64
    where
        F: Fn(C64) -> C64 + Sync + Send,
    {
        let rows = exec.map_indexed(self.order, |i| {
            let x = self.nodes[i];
            let mut row = ComplexSum::new();
            for (&y, &wy) in self.nodes.iter().zip(&self.weights) {
                row.add(f(C64::new(x, y)) * wy);
            }
            row.value() * self.weights[i]
        });
        sum_c64(rows)
    }

    /// `⟨f, g⟩ = ∫ f · conj(g) dγ`.
    pub fn inner_product<F, G>(&self, f: F, g: G, exec: Execution) -> C64
    where
        F: Fn(C64) -> C64 + Sync + Send,
        G: Fn(C64) -> C64 + Sync + Send,
    {
        self.integrate_gamma(|w| f(w) * g(w).conj(), exec)
    }

    /// `b_{m,n} = ⟨f, J_{m,n}⟩` for every `m + n <= max_total_degree`.
    /// Exact for polynomial `f` when the rule integrates the products exactly.
    pub fn project<F>(&self, f: F, max_total_degree: usize, exec: Execution) -> Result<SpectralCoeffs>
    where
        F: Fn(C64) -> C64 + Sync + Send,
    {
        let nodes = self.tensor_nodes();
        let values: Vec<Vec<C64>> = exec.map_indexed(self.order, |i| {
            (0..self.order).map(|j| f(nodes[i * self.order + j].0)).collect()
        });
        let indices: Vec<(usize, usize)> = (0..=max_total_degree)
            .flat_map(|d| (0..=d).map(move |m| (m, d - m)))
            .collect();
        let polys = indices
            .iter()
            .map(|&(m, n)| hermite::complex_hermite(m, n))
            .collect::<Result<Vec<_>>>()?;
        let coeffs = exec.map_slice(&polys, |p| {
            let rows = (0..self.order).map(|i| {
                let mut row = ComplexSum::new();
                for j in 0..self.order {
                    let (w, _) = nodes[i * self.order + j];
                    row.add(values[i][j] * p.eval(w).conj() * self.weights[j]);
                }
                row.value() * self.weights[i]
            });
            sum_c64(rows)
        });
        Ok(SpectralCoeffs::from_pairs(
            indices
                .into_iter()
                .map(|(m, n)| (m as u32, n as u32))
                .zip(coeffs),
        ))
    }
}

/// Exactness diagnostics for one rule. Moments are compared in scaled form,
/// `Σ w sgn(x)^k e^{k ln|x| − ln E|x|^k}`, so nothing overflows at high order.
#[derive(Debug, Clone, Serialize)]
pub struct RuleDiagnostics {
    pub order: usize,
    /// `|Σ w − 1|`.
    pub weight_sum_error: f64,
    /// Largest relative error on the even moments `E[x^{2j}] = (2j−1)!!`,
    /// `2j <= 2K − 2`.
    pub max_moment_rel_error: f64,
    /// Largest `|Σ w x^k| / E|x|^k` over odd `k <= 2K − 1`.
    pub max_odd_moment_scaled_error: f64,
    /// Relative error on `E[x^{2K}]`, the first moment the rule cannot
    /// reproduce; nonzero by construction.
    pub beyond_exactness_rel_error: f64,
}

/// `ln E|x|^k = (k/2) ln 2 + ln Γ((k+1)/2) − ½ ln π` for `x ~ N(0, 1)`.
fn ln_abs_moment(k: usize) -> f64 {
    let k = k as f64;
    0.5 * k * std::f64::consts::LN_2 + ln_gamma(0.5 * (k + 1.0)) - 0.5 * std::f64::consts::PI.ln()
}

/// `Σ w x^k / E|x|^k`.
fn scaled_moment(rule: &QuadratureRule, k: usize) -> f64 {
    if k == 0 {
        return sum_f64(rule.weights.iter().copied());
    }
    let ln_scale = ln_abs_moment(k);
    sum_f64(rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| {
        let sign = if x < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        sign * w * (k as f64 * x.abs().ln() - ln_scale).exp()
    }))
}

pub fn diagnose(order: usize) -> Result<RuleDiagnostics> {
    let rule = gauss_hermite_rule(order)?;
    let mut max_rel = 0.0f64;
    let mut max_odd = 0.0f64;
    // `!(e <= max)` keeps a NaN from being dropped by a plain `max`.
    let track = |acc: &mut f64, e: f64| {
        if !(e <= *acc) {
            *acc = e;
        }
    };
    for k in 0..2 * order {
        let q = scaled_moment(&rule, k);
        if k % 2 == 0 {
            track(&mut max_rel, (q - 1.0).abs());
        } else {
            track(&mut max_odd, q.abs());
        }
    }
    Ok(RuleDiagnostics {
        order,
        weight_sum_error: (sum_f64(rule.weights.iter().copied()) - 1.0).abs(),
        max_moment_rel_error: max_rel,
        max_odd_moment_scaled_error: max_odd,
        beyond_exactness_rel_error: (scaled_moment(&rule, 2 * order) - 1.0).abs(),
    })
}
