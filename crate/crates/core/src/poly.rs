//! Sparse polynomials over the formal commuting pair `(z, z̄)`.
//!
//! A [`Poly`] stores `Σ c_{a,b} z^a z̄^b` as a sorted map from exponent pairs
//! to complex coefficients. Terms whose coefficient is exactly zero are never
//! stored, so structural equality is polynomial equality. The Wirtinger
//! derivatives act as formal differentiation in one variable with the other
//! held constant, which is exact on polynomials.
//!
//! [`MultiPoly`] is the multi-slot analogue in `(w_1..w_n, w̄_1..w̄_n)` used as
//! the outer function `F` in compositions `F ∘ (φ_1, …, φ_n)`.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

fn is_exact_zero(c: C64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

/// Polynomial in `z` and `z̄` with complex coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), C64>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, 0, c)
    }

    /// `c z^a z̄^b`.
    pub fn monomial(a: u32, b: u32, c: C64) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    pub fn z() -> Self {
        Self::monomial(1, 0, C64::new(1.0, 0.0))
    }

    pub fn zbar() -> Self {
        Self::monomial(0, 1, C64::new(1.0, 0.0))
    }

    /// Builds a polynomial from `(a, b, c)` triples; repeated exponents add up.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32, C64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (a, b, c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    /// Adds `c z^a z̄^b` in place, keeping the canonical form.
    pub fn add_term(&mut self, a: u32, b: u32, c: C64) {
        if is_exact_zero(c) {
            return;
        }
        let slot = self.terms.entry((a, b)).or_insert(ZERO);
        *slot += c;
        if is_exact_zero(*slot) {
            self.terms.remove(&(a, b));
        }
    }

    /// Stored terms in ascending `(a, b)` order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, C64)> + '_ {
        self.terms.iter().map(|(&(a, b), &c)| (a, b, c))
    }

    pub fn coeff(&self, a: u32, b: u32) -> C64 {
        self.terms.get(&(a, b)).copied().unwrap_or(ZERO)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree `max(a + b)`, or `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|&(a, b)| (a + b) as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_terms(self.terms().map(|(a, b, v)| (a, b, v * c)))
    }

    /// Formal `∂/∂z`: `c z^a z̄^b ↦ a c z^{a−1} z̄^b`.
    pub fn wirtinger_dz(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(a, _, _)| a > 0)
                .map(|(a, b, c)| (a - 1, b, c * a as f64)),
        )
    }

    /// Formal `∂/∂z̄`: `c z^a z̄^b ↦ b c z^a z̄^{b−1}`.
    pub fn wirtinger_dzbar(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(_, b, _)| b > 0)
                .map(|(a, b, c)| (a, b - 1, c * b as f64)),
        )
    }

    /// The pointwise complex conjugate: swaps exponents and conjugates
    /// coefficients.
    pub fn conjugate(&self) -> Self {
        Self::from_terms(self.terms().map(|(a, b, c)| (b, a, c.conj())))
    }

    /// Evaluates at `z = w`, `z̄ = conj(w)` by nested sparse Horner schemes
    /// (inner in `z̄`, outer in `z`).
    pub fn eval(&self, w: C64) -> C64 {
        let wb = w.conj();
        // Rows of constant `a`, each a sparse Horner scheme in z̄, visited
        // from the highest `a` down.
        let mut rows: Vec<(u32, C64)> = Vec::new();
        let mut current: Option<(u32, u32, C64)> = None; // (a, last b, partial)
        for (&(a, b), &c) in self.terms.iter().rev() {
            current = match current {
                Some((ra, pb, acc)) if ra == a => Some((a, b, acc * wb.powu(pb - b) + c)),
                Some((ra, pb, acc)) => {
                    rows.push((ra, acc * wb.powu(pb)));
                    Some((a, b, c))
                }
                None => Some((a, b, c)),
            };
        }
        if let Some((ra, pb, acc)) = current {
            rows.push((ra, acc * wb.powu(pb)));
        }
        let mut acc = ZERO;
        let mut prev_a: Option<u32> = None;
        for (a, row) in rows {
            if let Some(pa) = prev_a {
                acc *= w.powu(pa - a);
            }
            acc += row;
            prev_a = Some(a);
        }
        if let Some(pa) = prev_a {
            acc *= w.powu(pa);
        }
        acc
    }

    /// Copy without terms of magnitude `<= eps`. Display only; the algebra
    /// itself never prunes.
    pub fn prune(&self, eps: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > eps)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |coeff(self − other)|`.
    pub fn max_abs_diff(&self, other: &Poly) -> f64 {
        (self - other).max_abs_coeff()
    }

    /// Realises `F ∘ φ` for a one-slot `F`; `w̄` is replaced by `conj(φ)`.
    pub fn compose(f: &MultiPoly, phi: &Poly) -> Result<Poly> {
        f.compose(std::slice::from_ref(phi))
    }

    /// Random polynomial of total degree at most `max_degree`: each monomial
    /// is kept with probability `density` and given a standard complex normal
    /// coefficient.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_degree: u32, density: f64) -> Self {
        let mut p = Self::zero();
        for d in 0..=max_degree {
            for a in 0..=d {
                if rng.random::<f64>() < density {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    p.add_term(a, d - a, C64::new(re, im));
                }
            }
        }
        p
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (a, b, c) in rhs.terms() {
            out.add_term(a, b, c);
        }
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (a, b, c) in rhs.terms() {
            out.add_term(a, b, -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut acc: BTreeMap<(u32, u32), C64> = BTreeMap::new();
        for (&(a1, b1), &c1) in &self.terms {
            for (&(a2, b2), &c2) in &rhs.terms {
                *acc.entry((a1 + a2, b1 + b2)).or_insert(ZERO) += c1 * c2;
            }
        }
        acc.retain(|_, c| !is_exact_zero(*c));
        Poly { terms: acc }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// One entry of the polynomial JSON array.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct PolyTerm {
    a: u32,
    b: u32,
    re: f64,
    im: f64,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<PolyTerm> = self
            .terms()
            .map(|(a, b, c)| PolyTerm {
                a,
                b,
                re: c.re,
                im: c.im,
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<PolyTerm>::deserialize(d)?;
        Ok(Poly::from_terms(
            terms.into_iter().map(|t| (t.a, t.b, C64::new(t.re, t.im))),
        ))
    }
}

/// Polynomial in `n` complex slots and their conjugates.
///
/// Exponent vectors have length `2n`: positions `0..n` hold the powers of
/// `w_i`, positions `n..2n` those of `w̄_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    slots: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl MultiPoly {
    pub fn zero(slots: usize) -> Self {
        Self {
            slots,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(slots: usize, c: C64) -> Self {
        let mut p = Self::zero(slots);
        p.add_term(vec![0; 2 * slots], c);
        p
    }

    /// The coordinate `w_i`.
    pub fn var(slots: usize, i: usize) -> Self {
        let mut e = vec![0; 2 * slots];
        e[i] = 1;
        let mut p = Self::zero(slots);
        p.add_term(e, C64::new(1.0, 0.0));
        p
    }

    /// The conjugate coordinate `w̄_i`.
    pub fn var_conj(slots: usize, i: usize) -> Self {
        let mut e = vec![0; 2 * slots];
        e[slots + i] = 1;
        let mut p = Self::zero(slots);
        p.add_term(e, C64::new(1.0, 0.0));
        p
    }

    /// Reads a one-slot polynomial from a [`Poly`], renaming `z → w`.
    pub fn from_poly(p: &Poly) -> Self {
        let mut out = Self::zero(1);
        for (a, b, c) in p.terms() {
            out.add_term(vec![a, b], c);
        }
        out
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: C64) {
        assert_eq!(exps.len(), 2 * self.slots, "exponent vector length");
        if is_exact_zero(c) {
            return;
        }
        let slot = self.terms.entry(exps.clone()).or_insert(ZERO);
        *slot += c;
        if is_exact_zero(*slot) {
            self.terms.remove(&exps);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], C64)> + '_ {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>() as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.slots, other.slots);
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.to_vec(), c);
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.slots, other.slots);
        let mut out = Self::zero(self.slots);
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> MultiPoly {
        let mut out = Self::zero(self.slots);
        for (e, v) in self.terms() {
            out.add_term(e.to_vec(), v * c);
        }
        out
    }

    fn partial(&self, pos: usize) -> MultiPoly {
        let mut out = Self::zero(self.slots);
        for (e, c) in self.terms() {
            if e[pos] > 0 {
                let mut e2 = e.to_vec();
                e2[pos] -= 1;
                out.add_term(e2, c * e[pos] as f64);
            }
        }
        out
    }

    /// Formal `∂F/∂w_i`.
    pub fn d_w(&self, i: usize) -> MultiPoly {
        self.partial(i)
    }

    /// Formal `∂F/∂w̄_i`.
    pub fn d_wbar(&self, i: usize) -> MultiPoly {
        self.partial(self.slots + i)
    }

    /// Evaluates at `w_i = args[i]`, `w̄_i = conj(args[i])`.
    pub fn eval(&self, args: &[C64]) -> Result<C64> {
        if args.len() != self.slots {
            return Err(Error::SlotMismatch {
                expected: self.slots,
                got: args.len(),
            });
        }
        let n = self.slots;
        let mut acc = crate::sum::ComplexSum::new();
        for (e, c) in self.terms() {
            let mut v = c;
            for i in 0..n {
                v *= args[i].powu(e[i]) * args[i].conj().powu(e[n + i]);
            }
            acc.add(v);
        }
        Ok(acc.value())
    }

    /// Exact composition `F ∘ (φ_1, …, φ_n)`: `w_i ↦ φ_i`, `w̄_i ↦ conj(φ_i)`.
    pub fn compose(&self, phis: &[Poly]) -> Result<Poly> {
        if phis.len() != self.slots {
            return Err(Error::SlotMismatch {
                expected: self.slots,
                got: phis.len(),
            });
        }
        let n = self.slots;
        let bases: Vec<Poly> = phis
            .iter()
            .cloned()
            .chain(phis.iter().map(Poly::conjugate))
            .collect();
        let mut cache: HashMap<(usize, u32), Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (e, c) in self.terms() {
            let mut term = Poly::constant(c);
            for (pos, &k) in e.iter().enumerate().take(2 * n) {
                if k == 0 {
                    continue;
                }
                let power = power_cached(&mut cache, &bases, pos, k);
                term = &term * &power;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Random polynomial of total degree at most `max_degree` in `2n` variables.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        slots: usize,
        max_degree: u32,
        density: f64,
    ) -> Self {
        let mut out = Self::zero(slots);
        let mut exps = vec![0u32; 2 * slots];
        random_fill(rng, &mut out, &mut exps, 0, max_degree, density);
        out
    }
}

fn random_fill<R: Rng + ?Sized>(
    rng: &mut R,
    out: &mut MultiPoly,
    exps: &mut Vec<u32>,
    pos: usize,
    budget: u32,
    density: f64,
) {
    if pos == exps.len() {
        if rng.random::<f64>() < density {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            out.add_term(exps.clone(), C64::new(re, im));
        }
        return;
    }
    for k in 0..=budget {
        exps[pos] = k;
        random_fill(rng, out, exps, pos + 1, budget - k, density);
    }
    exps[pos] = 0;
}

fn power_cached(cache: &mut HashMap<(usize, u32), Poly>, bases: &[Poly], pos: usize, k: u32) -> Poly {
    if let Some(p) = cache.get(&(pos, k)) {
        return p.clone();
    }
    let p = if k == 1 {
        bases[pos].clone()
    } else {
        let prev = power_cached(cache, bases, pos, k - 1);
        &prev * &bases[pos]
    };
    cache.insert((pos, k), p.clone());
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn j10() -> Poly {
        Poly::monomial(1, 0, c(1.0 / 2f64.sqrt(), 0.0))
    }

    fn j11() -> Poly {
        Poly::from_terms([(1, 1, c(0.5, 0.0)), (0, 0, c(-1.0, 0.0))])
    }

    #[test]
    fn add_examples() {
        let p = Poly::z() + Poly::zbar();
        assert_eq!(p.coeff(1, 0), c(1.0, 0.0));
        assert_eq!(p.coeff(0, 1), c(1.0, 0.0));
        assert_eq!(&p + &Poly::zero(), p);
        let cancelled = Poly::z() - Poly::z();
        assert!(cancelled.is_zero());
        assert_eq!(cancelled.len(), 0);
        assert_eq!(cancelled.degree(), -1);
    }

    #[test]
    fn mul_examples() {
        let p = Poly::z() * Poly::zbar();
        assert_eq!(p, Poly::monomial(1, 1, c(1.0, 0.0)));
        let one = Poly::one();
        let q = (Poly::z() + &one) * (Poly::z() - &one);
        assert_eq!(q, Poly::from_terms([(2, 0, c(1.0, 0.0)), (0, 0, c(-1.0, 0.0))]));
        let j01 = j10().conjugate();
        let prod = &j10() * &j01;
        assert!((prod.coeff(1, 1) - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(prod.len(), 1);
    }

    #[test]
    fn wirtinger_examples() {
        let p = Poly::monomial(2, 1, c(1.0, 0.0));
        assert_eq!(p.wirtinger_dz(), Poly::monomial(1, 1, c(2.0, 0.0)));
        assert!(Poly::monomial(0, 3, c(1.0, 0.0)).wirtinger_dz().is_zero());
        assert_eq!(j11().wirtinger_dz(), Poly::monomial(0, 1, c(0.5, 0.0)));

        assert_eq!(Poly::monomial(1, 1, c(1.0, 0.0)).wirtinger_dzbar(), Poly::z());
        assert!(Poly::monomial(2, 0, c(1.0, 0.0)).wirtinger_dzbar().is_zero());
        assert_eq!(j11().wirtinger_dzbar(), Poly::monomial(1, 0, c(0.5, 0.0)));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(Poly::z().conjugate(), Poly::zbar());
        let p = Poly::monomial(1, 1, c(0.0, 1.0));
        assert_eq!(p.conjugate(), Poly::monomial(1, 1, c(0.0, -1.0)));
    }

    #[test]
    fn eval_examples() {
        let p = Poly::monomial(1, 1, c(1.0, 0.0));
        assert!((p.eval(c(1.0, 1.0)) - c(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(Poly::one().eval(c(3.0, -7.0)), c(1.0, 0.0));
        assert!((j11().eval(c(2.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(Poly::zero().eval(c(1.0, 2.0)), c(0.0, 0.0));
    }

    #[test]
    fn eval_matches_naive_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = Poly::random(&mut rng, 7, 0.6);
            let w = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * 3.0;
            let naive: C64 = p
                .terms()
                .map(|(a, b, k)| k * w.powu(a) * w.conj().powu(b))
                .sum();
            let got = p.eval(w);
            assert!((got - naive).norm() <= 1e-12 * (1.0 + naive.norm()));
        }
    }

    #[test]
    fn compose_examples() {
        let w2 = MultiPoly::var(1, 0).mul(&MultiPoly::var(1, 0));
        assert_eq!(Poly::compose(&w2, &Poly::z()).unwrap(), Poly::monomial(2, 0, c(1.0, 0.0)));

        let wwbar = MultiPoly::var(1, 0).mul(&MultiPoly::var_conj(1, 0));
        assert_eq!(
            Poly::compose(&wwbar, &Poly::z()).unwrap(),
            Poly::monomial(1, 1, c(1.0, 0.0))
        );
        let got = Poly::compose(&wwbar, &j10()).unwrap();
        assert!((got.coeff(1, 1) - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(got.len(), 1);
    }

    #[test]
    fn compose_rejects_wrong_arity() {
        let f = MultiPoly::var(2, 1);
        assert!(matches!(
            f.compose(&[Poly::z()]),
            Err(Error::SlotMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn compose_agrees_with_pointwise_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let f = MultiPoly::random(&mut rng, 2, 3, 0.4);
            let phis = [Poly::random(&mut rng, 3, 0.6), Poly::random(&mut rng, 3, 0.6)];
            let composed = f.compose(&phis).unwrap();
            let w = c(0.3, -0.8);
            let direct = f.eval(&[phis[0].eval(w), phis[1].eval(w)]).unwrap();
            assert!((composed.eval(w) - direct).norm() <= 1e-10 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn multipoly_partials() {
        // F = w1^2 w̄2 → ∂F/∂w1 = 2 w1 w̄2, ∂F/∂w̄2 = w1^2
        let mut f = MultiPoly::zero(2);
        f.add_term(vec![2, 0, 0, 1], c(1.0, 0.0));
        let mut d1 = MultiPoly::zero(2);
        d1.add_term(vec![1, 0, 0, 1], c(2.0, 0.0));
        assert_eq!(f.d_w(0), d1);
        let mut d2 = MultiPoly::zero(2);
        d2.add_term(vec![2, 0, 0, 0], c(1.0, 0.0));
        assert_eq!(f.d_wbar(1), d2);
        assert!(f.d_w(1).is_zero());
    }

    #[test]
    fn prune_is_display_only() {
        let p = Poly::from_terms([(0, 0, c(1e-20, 0.0)), (1, 0, c(1.0, 0.0))]);
        assert_eq!(p.len(), 2);
        assert_eq!(p.prune(1e-12), Poly::z());
    }

    #[test]
    fn json_is_sorted_and_byte_stable() {
        let p = Poly::from_terms([(1, 1, c(0.5, 0.0)), (0, 0, c(-1.0, 0.25))]);
        let s = crate::io::to_json_string(&p).unwrap();
        assert_eq!(
            s,
            r#"[{"a":0,"b":0,"re":-1.0000000000000000e0,"im":2.5000000000000000e-1},{"a":1,"b":1,"re":5.0000000000000000e-1,"im":0.0000000000000000e0}]"#
        );
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
