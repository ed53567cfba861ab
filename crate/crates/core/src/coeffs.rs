//! Finitely supported expansions `f = Σ b_{m,n} J_{m,n}` in the complex
//! Hermite basis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{hermite, Poly, Result, C64};

/// Sparse map `(m, n) → b_{m,n}`. Exact zeros are not stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralCoeffs {
    coeffs: BTreeMap<(u32, u32), C64>,
}

impl SpectralCoeffs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = ((u32, u32), C64)>>(pairs: I) -> Self {
        let mut out = Self::new();
        for ((m, n), c) in pairs {
            out.add(m, n, c);
        }
        out
    }

    pub fn single(m: u32, n: u32, c: C64) -> Self {
        Self::from_pairs([((m, n), c)])
    }

    pub fn add(&mut self, m: u32, n: u32, c: C64) {
        if c.re == 0.0 && c.im == 0.0 {
            return;
        }
        let v = self.coeffs.entry((m, n)).or_default();
        *v += c;
        if v.re == 0.0 && v.im == 0.0 {
            self.coeffs.remove(&(m, n));
        }
    }

    pub fn get(&self, m: u32, n: u32) -> C64 {
        self.coeffs.get(&(m, n)).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), C64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `m + n` in the support, `None` when empty.
    pub fn max_total_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|&(m, n)| m + n).max()
    }

    /// Applies `b_{m,n} ↦ g(m, n) b_{m,n}`.
    pub fn map_diagonal<F: Fn(u32, u32) -> C64>(&self, g: F) -> Self {
        Self::from_pairs(self.iter().map(|((m, n), b)| ((m, n), g(m, n) * b)))
    }

    /// `Σ |b_{m,n}|²`, i.e. the squared `L²(γ)` norm by Parseval.
    pub fn norm_sq(&self) -> f64 {
        crate::sum::sum_f64(self.coeffs.values().map(|c| c.norm_sqr()))
    }

    /// `max |b − b'|` over the union of both supports.
    pub fn max_abs_diff(&self, other: &SpectralCoeffs) -> f64 {
        let mut diff = self.clone();
        for (k, v) in other.iter() {
            diff.add(k.0, k.1, -v);
        }
        diff.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops entries with `|b| <= eps`.
    pub fn prune(&self, eps: f64) -> Self {
        Self::from_pairs(self.iter().filter(|(_, c)| c.norm() > eps))
    }

    /// The polynomial `Σ b_{m,n} J_{m,n}`.
    pub fn synthesize(&self) -> Result<Poly> {
        let mut out = Poly::zero();
        for ((m, n), b) in self.iter() {
            out = out + hermite::complex_hermite(m as usize, n as usize)?.scale(b);
        }
        Ok(out)
    }

    /// Exact expansion of a polynomial in the `J` basis, term by term through
    /// [`hermite::monomial_to_hermite`].
    pub fn from_poly(p: &Poly) -> Result<Self> {
        let mut out = Self::new();
        for (a, b, c) in p.terms() {
            for ((m, n), v) in hermite::monomial_to_hermite(a as usize, b as usize)?.iter() {
                out.add(m, n, c * v);
            }
        }
        Ok(out)
    }

    /// Entries in the JSON order: ascending `m + n`, then ascending `m`.
    pub fn sorted_entries(&self) -> Vec<((u32, u32), C64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by_key(|&((m, n), _)| (m + n, m));
        v
    }

    pub fn to_document(&self, theta: Option<f64>) -> CoeffsDocument {
        CoeffsDocument {
            theta,
            coeffs: self
                .sorted_entries()
                .into_iter()
                .map(|((m, n), c)| CoeffEntry {
                    m,
                    n,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &CoeffsDocument) -> Self {
        Self::from_pairs(doc.coeffs.iter().map(|e| ((e.m, e.n), C64::new(e.re, e.im))))
    }
}

/// Wire form `{"theta": …, "coeffs": [{"m","n","re","im"}, …]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoeffsDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub coeffs: Vec<CoeffEntry>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct CoeffEntry {
    pub m: u32,
    pub n: u32,
    pub re: f64,
    pub im: f64,
}
