//! Monte Carlo simulation of `dZ = −e^{iθ} Z dt + √(2 cos θ) dζ`, with
//! `ζ = B₁ + i B₂` a complex Brownian motion.
//!
//! Two schemes:
//!
//! * exact transition sampling, `Z_{t+Δ} = e^{−e^{iθ}Δ} Z_t + √(1 − e^{−2Δ cos θ}) W`;
//! * explicit Euler–Maruyama, `Z ← Z − e^{iθ} Z dt + √(2 cos θ) √dt W`.
//!
//! In both, `W = N(0,1) + i N(0,1)` with independent unit-variance parts, so
//! `E|W|² = 2`.
//!
//! Each path draws from its own ChaCha8 stream `(seed, path_index)`, so an
//! ensemble is bit-reproducible and independent of how paths are scheduled
//! across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::sum::{sum_c64, sum_f64};
use crate::{Error, Execution, GeneratorParams, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scheme {
    Exact,
    Euler { dt: f64 },
}

/// Simulation request. `t_grid[0]` is the start time, where every path sits
/// at `x0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub params: GeneratorParams,
    #[serde(serialize_with = "ser_c64")]
    pub x0: C64,
    pub t_grid: Vec<f64>,
    pub n_paths: usize,
    pub seed: u64,
    pub scheme: Scheme,
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl SimConfig {
    pub fn new(
        params: GeneratorParams,
        x0: C64,
        t_grid: Vec<f64>,
        n_paths: usize,
        seed: u64,
        scheme: Scheme,
    ) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if t_grid.is_empty() {
            return bad("time grid is empty");
        }
        if !t_grid.iter().all(|t| t.is_finite()) || t_grid[0] < 0.0 {
            return bad("time grid must be finite and start at t >= 0");
        }
        if t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("time grid must be strictly increasing");
        }
        if n_paths == 0 {
            return bad("n_paths must be positive");
        }
        if !x0.re.is_finite() || !x0.im.is_finite() {
            return bad("x0 must be finite");
        }
        if let Scheme::Euler { dt } = scheme {
            if !(dt > 0.0) || !dt.is_finite() {
                return bad("dt must be positive");
            }
        }
        Ok(Self {
            params,
            x0,
            t_grid,
            n_paths,
            seed,
            scheme,
        })
    }
}

/// Simulated states, `n_paths × t_grid.len()`, row-major by path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub config: SimConfig,
    states: Vec<C64>,
}

impl PathEnsemble {
    pub fn n_times(&self) -> usize {
        self.config.t_grid.len()
    }

    pub fn state(&self, path: usize, t_index: usize) -> C64 {
        self.states[path * self.n_times() + t_index]
    }

    pub fn path(&self, path: usize) -> &[C64] {
        let n = self.n_times();
        &self.states[path * n..(path + 1) * n]
    }

    /// All path values at one grid time.
    pub fn at_time(&self, t_index: usize) -> Vec<C64> {
        (0..self.config.n_paths).map(|p| self.state(p, t_index)).collect()
    }

    /// `path_id,t,re,im` rows, floats with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("path_id,t,re,im\n");
        for p in 0..self.config.n_paths {
            for (k, &t) in self.config.t_grid.iter().enumerate() {
                let z = self.state(p, k);
                out.push_str(&format!(
                    "{p},{},{},{}\n",
                    crate::io::fmt_f64(t),
                    crate::io::fmt_f64(z.re),
                    crate::io::fmt_f64(z.im)
                ));
            }
        }
        out
    }
}

/// Standard complex normal with `E|W|² = 2`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Per-path generator: ChaCha8 keyed by `seed`, stream `path`.
pub fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// One exact transition over a gap `dt >= 0` driven by `w` (`E|w|² = 2`).
pub fn exact_step(params: GeneratorParams, z: C64, dt: f64, w: C64) -> C64 {
    if dt == 0.0 {
        return z;
    }
    let contraction = (-params.drift() * dt).exp();
    let noise = (-(-2.0 * dt * params.cos()).exp_m1()).sqrt();
    contraction * z + w * noise
}

pub fn sample_exact(config: &SimConfig) -> Result<PathEnsemble> {
    sample_exact_with(config, Execution::default())
}

pub fn sample_exact_with(config: &SimConfig, exec: Execution) -> Result<PathEnsemble> {
    if config.scheme != Scheme::Exact {
        return Err(Error::InvalidConfig("sample_exact needs scheme = exact".into()));
    }
    let params = config.params;
    let grid = &config.t_grid;
    let gaps: Vec<(C64, f64)> = grid
        .windows(2)
        .map(|w| {
            let dt = w[1] - w[0];
            (
                (-params.drift() * dt).exp(),
                (-(-2.0 * dt * params.cos()).exp_m1()).sqrt(),
            )
        })
        .collect();
    let rows = exec.map_indexed(config.n_paths, |p| {
        let mut rng = path_rng(config.seed, p);
        let mut row = Vec::with_capacity(grid.len());
        let mut z = config.x0;
        row.push(z);
        for &(contraction, noise) in &gaps {
            z = contraction * z + complex_normal(&mut rng) * noise;
            row.push(z);
        }
        row
    });
    Ok(PathEnsemble {
        config: config.clone(),
        states: rows.into_iter().flatten().collect(),
    })
}

/// One explicit Euler step `z − e^{iθ} z dt + √(2 cos θ) dζ`, where `dζ` is
/// the complex Brownian increment over `dt` (`E|dζ|² = 2 dt`).
pub fn euler_step(params: GeneratorParams, z: C64, dt: f64, dzeta: C64) -> C64 {
    z - params.drift() * z * dt + dzeta * (2.0 * params.cos()).sqrt()
}

fn euler_steps(grid: &[f64], dt: f64) -> Result<Vec<usize>> {
    grid.windows(2)
        .map(|w| {
            let gap = w[1] - w[0];
            let n = (gap / dt).round();
            if n < 1.0 || (n * dt - gap).abs() > 1e-12 * gap.max(1.0) {
                Err(Error::IncompatibleStep { dt, gap })
            } else {
                Ok(n as usize)
            }
        })
        .collect()
}

fn euler_paths(config: &SimConfig, dt: f64, noise_scale: f64, exec: Execution) -> Result<PathEnsemble> {
    let steps = euler_steps(&config.t_grid, dt)?;
    let params = config.params;
    let increment = dt.sqrt() * noise_scale;
    let rows = exec.map_indexed(config.n_paths, |p| {
        let mut rng = path_rng(config.seed, p);
        let mut row = Vec::with_capacity(config.t_grid.len());
        let mut z = config.x0;
        row.push(z);
        for &n in &steps {
            for _ in 0..n {
                z = euler_step(params, z, dt, complex_normal(&mut rng) * increment);
            }
            row.push(z);
        }
        row
    });
    Ok(PathEnsemble {
        config: config.clone(),
        states: rows.into_iter().flatten().collect(),
    })
}

pub fn sample_euler(config: &SimConfig) -> Result<PathEnsemble> {
    sample_euler_with(config, Execution::default())
}

pub fn sample_euler_with(config: &SimConfig, exec: Execution) -> Result<PathEnsemble> {
    match config.scheme {
        Scheme::Euler { dt } => euler_paths(config, dt, 1.0, exec),
        Scheme::Exact => Err(Error::InvalidConfig("sample_euler needs scheme = euler".into())),
    }
}

/// Dispatches on `config.scheme`.
pub fn simulate(config: &SimConfig, exec: Execution) -> Result<PathEnsemble> {
    match config.scheme {
        Scheme::Exact => sample_exact_with(config, exec),
        Scheme::Euler { .. } => sample_euler_with(config, exec),
    }
}

/// Monte Carlo mean with its standard error `√(Σ|v − mean|² / (n(n−1)))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    #[serde(serialize_with = "ser_c64")]
    pub mean: C64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_samples(values: &[C64]) -> Self {
        let n = values.len() as f64;
        let mean = sum_c64(values.iter().copied()) / n;
        let stderr = if values.len() < 2 {
            f64::INFINITY
        } else {
            (sum_f64(values.iter().map(|v| (v - mean).norm_sqr())) / (n * (n - 1.0))).sqrt()
        };
        Self { mean, stderr }
    }

    /// `|mean − target| <= k · stderr`.
    pub fn within(&self, target: C64, k: f64) -> bool {
        (self.mean - target).norm() <= k * self.stderr
    }
}

/// `P_t φ(x0) ≈ mean of φ(Z_t)` over the ensemble.
pub fn estimate_pt<F>(ensemble: &PathEnsemble, phi: F, t_index: usize) -> Result<Estimate>
where
    F: Fn(C64) -> C64,
{
    if t_index >= ensemble.n_times() {
        return Err(Error::InvalidConfig(format!(
            "t_index {t_index} out of range for {} grid points",
            ensemble.n_times()
        )));
    }
    let values: Vec<C64> = (0..ensemble.config.n_paths)
        .map(|p| phi(ensemble.state(p, t_index)))
        .collect();
    Ok(Estimate::from_samples(&values))
}

/// `E Z_t = e^{−e^{iθ}t} x0`.
pub fn exact_mean(params: GeneratorParams, x0: C64, t: f64) -> C64 {
    (-params.drift() * t).exp() * x0
}

/// `E|Z_t − E Z_t|² = 2(1 − e^{−2t cos θ})`.
pub fn exact_variance(params: GeneratorParams, t: f64) -> f64 {
    -2.0 * (-2.0 * t * params.cos()).exp_m1()
}

/// `E|Z_t|²` of the exact process.
pub fn exact_second_moment(params: GeneratorParams, x0: C64, t: f64) -> f64 {
    exact_mean(params, x0, t).norm_sqr() + exact_variance(params, t)
}

/// `E|Z_N|²` of the Euler chain after `N = t/dt` steps, in closed form:
/// `ρ^N |x0|² + 4 cos θ dt Σ_{k<N} ρ^k` with `ρ = |1 − e^{iθ} dt|²`.
pub fn euler_second_moment(params: GeneratorParams, x0: C64, t: f64, dt: f64) -> f64 {
    let n = (t / dt).round() as i32;
    let rho = (C64::new(1.0, 0.0) - params.drift() * dt).norm_sqr();
    let geometric = if rho == 1.0 {
        n as f64
    } else {
        (1.0 - rho.powi(n)) / (1.0 - rho)
    };
    rho.powi(n) * x0.norm_sqr() + 4.0 * params.cos() * dt * geometric
}

/// First and second moment summary at one grid time.
#[derive(Debug, Clone, Serialize)]
pub struct TimeSummary {
    pub t: f64,
    pub mean: Estimate,
    /// Sample `E|Z − mean|²` with its standard error.
    pub variance: f64,
    pub variance_stderr: f64,
    #[serde(serialize_with = "ser_c64")]
    pub expected_mean: C64,
    pub expected_variance: f64,
    pub mean_ok: bool,
    pub variance_ok: bool,
}

/// Moments at every grid time compared against the exact law within
/// `k_se` standard errors. Time offsets are measured from `t_grid[0]`.
pub fn summarize(ensemble: &PathEnsemble, k_se: f64) -> Vec<TimeSummary> {
    let cfg = &ensemble.config;
    let t0 = cfg.t_grid[0];
    (0..ensemble.n_times())
        .map(|k| {
            let zs = ensemble.at_time(k);
            let mean = Estimate::from_samples(&zs);
            let dev: Vec<C64> = zs
                .iter()
                .map(|z| C64::new((z - mean.mean).norm_sqr(), 0.0))
                .collect();
            let var = Estimate::from_samples(&dev);
            let elapsed = cfg.t_grid[k] - t0;
            let expected_mean = exact_mean(cfg.params, cfg.x0, elapsed);
            let expected_variance = exact_variance(cfg.params, elapsed);
            let n = zs.len() as f64;
            // Bessel-corrected variance estimate.
            let variance = var.mean.re * n / (n - 1.0).max(1.0);
            TimeSummary {
                t: cfg.t_grid[k],
                mean_ok: mean.within(expected_mean, k_se) || mean.stderr == 0.0 && mean.mean == expected_mean,
                variance_ok: (variance - expected_variance).abs() <= k_se * var.stderr
                    || var.stderr == 0.0 && variance.abs() < 1e-300,
                mean,
                variance,
                variance_stderr: var.stderr,
                expected_mean,
                expected_variance,
            }
        })
        .collect()
}

/// One-sample Kolmogorov–Smirnov statistic against `N(0, 1)`.
pub fn ks_statistic_standard_normal(samples: &[f64]) -> f64 {
    let normal = Normal::standard();
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Burn-in time with `e^{−t cos θ} = 10⁻⁶`.
pub fn default_burn_in(params: GeneratorParams) -> f64 {
    1e6f64.ln() / params.cos()
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentCheck {
    pub name: &'static str,
    pub estimate: Estimate,
    #[serde(serialize_with = "ser_c64")]
    pub target: C64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarityReport {
    pub theta: f64,
    pub n_paths: usize,
    pub t_burn: f64,
    pub seed: u64,
    pub moments: Vec<MomentCheck>,
    pub ks_re: f64,
    pub ks_im: f64,
    /// `1.63 / √n`, the 1% critical value.
    pub ks_threshold: f64,
    pub pass: bool,
}

/// Runs the exact sampler from `x0 = 0` for `t_burn` and compares the
/// empirical law with `γ`: `E z = 0`, `E z² = 0`, `E|z|² = 2` within 4
/// standard errors, and KS distance of real and imaginary parts to `N(0,1)`.
pub fn stationarity_check(
    params: GeneratorParams,
    n_paths: usize,
    t_burn: f64,
    seed: u64,
    exec: Execution,
) -> Result<StationarityReport> {
    if !((-t_burn * params.cos()).exp() <= 1e-6 * (1.0 + 1e-12)) {
        return Err(Error::InvalidConfig(format!(
            "t_burn = {t_burn} leaves e^(-t cos theta) above 1e-6"
        )));
    }
    let cfg = SimConfig::new(params, C64::new(0.0, 0.0), vec![0.0, t_burn], n_paths, seed, Scheme::Exact)?;
    let ens = sample_exact_with(&cfg, exec)?;
    let zs = ens.at_time(1);
    let zero = C64::new(0.0, 0.0);
    let checks: [(&'static str, fn(C64) -> C64, C64); 3] = [
        ("E[z]", |z| z, zero),
        ("E[z^2]", |z| z * z, zero),
        ("E[|z|^2]", |z| C64::new(z.norm_sqr(), 0.0), C64::new(2.0, 0.0)),
    ];
    let moments: Vec<MomentCheck> = checks
        .iter()
        .map(|&(name, f, target)| {
            let vals: Vec<C64> = zs.iter().map(|&z| f(z)).collect();
            let estimate = Estimate::from_samples(&vals);
            MomentCheck {
                name,
                estimate,
                target,
                ok: estimate.within(target, 4.0),
            }
        })
        .collect();
    let re: Vec<f64> = zs.iter().map(|z| z.re).collect();
    let im: Vec<f64> = zs.iter().map(|z| z.im).collect();
    let ks_re = ks_statistic_standard_normal(&re);
    let ks_im = ks_statistic_standard_normal(&im);
    let ks_threshold = 1.63 / (n_paths as f64).sqrt();
    let pass = moments.iter().all(|m| m.ok) && ks_re <= ks_threshold && ks_im <= ks_threshold;
    Ok(StationarityReport {
        theta: params.theta(),
        n_paths,
        t_burn,
        seed,
        moments,
        ks_re,
        ks_im,
        ks_threshold,
        pass,
    })
}
