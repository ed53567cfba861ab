use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

use complex_ou::hermite::complex_hermite;
use complex_ou::operator::{
    apply_generator_spectral, apply_generator_wirtinger, carre_du_champ, carre_du_champ_via_generator,
    diffusion_chain_rule, domain_seminorm_sq, eigenvalue,
};
use complex_ou::quadrature::gauss_hermite_rule;
use complex_ou::{Execution, GeneratorParams, MultiPoly, Poly, QuadratureRule, SpectralCoeffs, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const THETAS: [f64; 7] = [0.0, FRAC_PI_6, -FRAC_PI_6, FRAC_PI_4, -FRAC_PI_4, 0.49 * PI, -0.49 * PI];

fn g(theta: f64) -> GeneratorParams {
    GeneratorParams::new(theta).unwrap()
}

fn random_coeffs(rng: &mut ChaCha8Rng, max_degree: u32) -> SpectralCoeffs {
    let mut c = SpectralCoeffs::new();
    for d in 0..=max_degree {
        for m in 0..=d {
            if rng.random::<f64>() < 0.5 {
                c.add(m, d - m, C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            }
        }
    }
    c
}

#[test]
fn eigenrelation_on_hermite_basis() {
    for &th in &THETAS {
        for d in 0..=10usize {
            for m in 0..=d {
                let j = complex_hermite(m, d - m).unwrap();
                let lj = apply_generator_wirtinger(g(th), &j);
                let target = j.scale(eigenvalue(g(th), m as u32, (d - m) as u32));
                let scale = target.max_abs_coeff().max(j.max_abs_coeff());
                assert!(lj.max_abs_diff(&target) <= 1e-9 * scale, "theta={th} ({m},{})", d - m);
            }
        }
    }
}

#[test]
fn spectral_and_differential_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let rule = QuadratureRule::for_degree(8).unwrap();
    for &th in &THETAS {
        let f = random_coeffs(&mut rng, 8);
        let lf = apply_generator_wirtinger(g(th), &f.synthesize().unwrap());
        let projected = rule.project(|w| lf.eval(w), 8, Execution::default()).unwrap();
        let spectral = apply_generator_spectral(g(th), &f);
        assert!(projected.max_abs_diff(&spectral) <= 1e-8, "theta={th}");
    }
}

#[test]
fn generator_is_normal_on_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for &th in &THETAS {
        let f = random_coeffs(&mut rng, 12);
        let p = g(th);
        let star_then = apply_generator_spectral(p, &apply_generator_spectral(p.adjoint(), &f));
        let then_star = apply_generator_spectral(p.adjoint(), &apply_generator_spectral(p, &f));
        let c2 = (2.0 * th).cos();
        let direct = f.map_diagonal(|m, n| {
            let (m, n) = (m as f64, n as f64);
            C64::new(m * m + n * n + 2.0 * m * n * c2, 0.0)
        });
        let scale = 1.0 + direct.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
        assert!(star_then.max_abs_diff(&then_star) <= 1e-14 * scale);
        assert!(star_then.max_abs_diff(&direct) <= 1e-13 * scale);

        let seminorm = domain_seminorm_sq(p, &f);
        let norm = apply_generator_spectral(p, &f).norm_sq();
        assert!((seminorm - norm).abs() <= 1e-12 * norm.max(1e-300));
    }
}

#[test]
fn seminorm_equivalence_is_theta_independent() {
    for &th in &THETAS {
        let c = th.cos();
        let c2 = (2.0 * th).cos();
        for m in 0..=30u32 {
            for n in 0..=30u32 {
                let (mf, nf) = (m as f64, n as f64);
                let w = mf * mf + nf * nf + 2.0 * mf * nf * c2;
                let s = (mf + nf) * (mf + nf);
                assert!(c * c * s <= w * (1.0 + 1e-14) + 1e-12 && w <= s * (1.0 + 1e-14) + 1e-12);
            }
        }
    }
}

#[test]
fn generator_is_not_symmetric_for_nonzero_theta() {
    let rule = gauss_hermite_rule(4).unwrap();
    let j10 = complex_hermite(1, 0).unwrap();
    for &th in &THETAS {
        let lj = apply_generator_wirtinger(g(th), &j10);
        let a = rule.inner_product(|w| lj.eval(w), |w| j10.eval(w), Execution::Serial);
        let b = rule.inner_product(|w| j10.eval(w), |w| lj.eval(w), Execution::Serial);
        if th == 0.0 {
            assert!((a - b).norm() < 1e-14);
        } else {
            assert!((a - b).norm() > 0.5 * th.sin().abs(), "theta={th}");
            assert!((a - eigenvalue(g(th), 1, 0)).norm() < 1e-13);
        }
    }
}

#[test]
fn gamma_routes_agree_and_gamma_is_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..200 {
        let th = THETAS[k % THETAS.len()];
        let phi = Poly::random(&mut rng, 6, 0.5);
        let psi = Poly::random(&mut rng, 6, 0.5);
        let a = carre_du_champ(&phi, &psi);
        let b = carre_du_champ_via_generator(g(th), &phi, &psi);
        let scale = 1.0 + a.max_abs_coeff();
        assert!(a.max_abs_diff(&b) <= 1e-10 * scale, "pair {k}, theta={th}");
    }
    for _ in 0..20 {
        let phi = Poly::random(&mut rng, 6, 0.6);
        let gamma = carre_du_champ(&phi, &phi);
        for _ in 0..1000 {
            let w = C64::new(rng.random::<f64>() * 6.0 - 3.0, rng.random::<f64>() * 6.0 - 3.0);
            let v = gamma.eval(w);
            assert!(v.re >= -1e-12, "{v}");
            assert!(v.im.abs() <= 1e-9 * (1.0 + v.re.abs()));
        }
    }
}

#[test]
fn gamma_is_sesquilinear() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let a = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let (p1, p2, q) = (
            Poly::random(&mut rng, 5, 0.5),
            Poly::random(&mut rng, 5, 0.5),
            Poly::random(&mut rng, 5, 0.5),
        );
        let lhs = carre_du_champ(&(p1.scale(a) + &p2), &q);
        let rhs = carre_du_champ(&p1, &q).scale(a) + carre_du_champ(&p2, &q);
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + lhs.max_abs_coeff()));
        let lhs = carre_du_champ(&q, &(p1.scale(a) + &p2));
        let rhs = carre_du_champ(&q, &p1).scale(a.conj()) + carre_du_champ(&q, &p2);
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + lhs.max_abs_coeff()));
    }
}

#[test]
fn chain_rule_on_random_compositions() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for k in 0..100 {
        let th = THETAS[k % THETAS.len()];
        let slots = 1 + k % 2;
        let f = MultiPoly::random(&mut rng, slots, 3, 0.4);
        let phis: Vec<Poly> = (0..slots).map(|_| Poly::random(&mut rng, 3, 0.6)).collect();
        let rep = diffusion_chain_rule(g(th), &f, &phis).unwrap();
        assert!(rep.within(1e-9), "case {k}: residual {} scale {}", rep.residual, rep.lhs_scale);
    }
}
