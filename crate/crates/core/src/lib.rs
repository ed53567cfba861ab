//! Numerical toolkit for the one-dimensional complex Ornstein–Uhlenbeck
//! operator
//!
//! ```text
//! L_θ = 4 cos θ ∂z∂z̄ − e^{iθ} z ∂z − e^{−iθ} z̄ ∂z̄,   θ ∈ (−π/2, π/2)
//! ```
//!
//! acting on `L²(γ)`, where `γ` is the standard planar Gaussian
//! `(1/2π) e^{−(x²+y²)/2} dx dy` (each real coordinate has unit variance, so
//! `E|z|² = 2`).
//!
//! The crate provides
//!
//! * [`poly`]: sparse polynomials in the formal pair `(z, z̄)` with Wirtinger
//!   derivatives, plus multi-slot polynomials used for composition;
//! * [`hermite`]: real and complex Hermite polynomials built by independent
//!   routes, and the basis changes between them;
//! * [`operator`]: the generator in differential and spectral form, its
//!   adjoint, the carré du champ and the diffusion chain rule;
//! * [`quadrature`]: tensorised Gauss–Hermite integration against `γ`;
//! * [`semigroup`]: the semigroup as spectral multiplier and as Mehler
//!   integral, with adjoint/normality/invariance/ergodicity checks;
//! * [`sde`]: Monte Carlo simulation of `dZ = −e^{iθ} Z dt + √(2 cos θ) dζ`.
//!
//! Data-parallel loops go through [`exec::Execution`]; with the default
//! `parallel` feature they run on rayon, otherwise sequentially. Both paths
//! produce identical results.

pub mod coeffs;
pub mod error;
pub mod exec;
pub mod expr;
pub mod hermite;
pub mod io;
pub mod operator;
pub mod poly;
pub mod quadrature;
pub mod sde;
pub mod semigroup;
mod special;
pub mod sum;

pub use coeffs::SpectralCoeffs;
pub use error::{Error, Result};
pub use exec::Execution;
pub use hermite::{BasisTransform, RealHermite};
pub use operator::GeneratorParams;
pub use poly::{MultiPoly, Poly};
pub use quadrature::QuadratureRule;
pub use sde::{PathEnsemble, Scheme, SimConfig};
pub use semigroup::PropagatorParams;



/// Complex double used for every coefficient and evaluation point.
pub type C64 = num_complex::Complex64;
