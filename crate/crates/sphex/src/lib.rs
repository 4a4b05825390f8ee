//! Excursion probabilities of Gaussian random fields on the N-sphere.
//!
//! `sphex` computes analytic approximations to `P{ sup_{x in T} X(x) >= u }`
//! for centered Gaussian fields `X` on the unit sphere `S^N` and validates
//! them by exact Monte Carlo simulation:
//!
//! * non-smooth, locally isotropic fields (`C = 1 - c d^alpha (1 + o(1))`,
//!   `alpha < 2`) get the Pickands-type tail
//!   `c^{N/alpha} Area(T) H_alpha u^{2N/alpha} Psi(u)`
//!   ([`approx::pickands_sphere`]);
//! * smooth isotropic fields (finite second spectral moment `C'`) get the
//!   expected-Euler-characteristic approximation
//!   `sum_j (C')^{j/2} L_j rho_j(u)` with super-exponentially small error
//!   ([`approx::eec_sphere`]);
//! * the standardized spherical fractional Brownian motion gets its own
//!   pole-weighted formula ([`approx::sfbm_pickands`]).
//!
//! Covariance models live in [`covariance`], sphere geometry and
//! Lipschitz-Killing curvatures in [`geometry`], Pickands' constant (exact
//! at `alpha = 2` and Monte Carlo elsewhere) in [`pickands`], and the
//! simulation engine (point sets, exact Gaussian sampling, empirical
//! excursion probabilities, triangulated Euler characteristics) in [`mcsim`].
//!
//! # Quick start
//!
//! The canonical field `X(x) = <x, xi>` has supremum `||xi||`, so its
//! excursion probability is a chi tail, and the Euler characteristic
//! approximation reproduces it exactly:
//!
//! ```
//! use sphex::{approx, specialfn};
//!
//! let u = 2.5;
//! let approximation = approx::eec_sphere(1.0, 2, u).unwrap();
//! let exact = specialfn::chi_tail(3, u).unwrap();
//! assert!((approximation.value - exact).abs() < 1e-12 * exact);
//! ```
//!
//! A Monte Carlo cross-check of the same quantity:
//!
//! ```
//! use sphex::covariance::CovarianceModel;
//! use sphex::mcsim::{empirical_excursion, PointSet, Scheme};
//!
//! let points = PointSet::generate(Scheme::Fibonacci, 512, 2, 0).unwrap();
//! let est = empirical_excursion(&CovarianceModel::Canonical, &points, 2.5, 2000, 42).unwrap();
//! let exact = sphex::specialfn::chi_tail(3, 2.5).unwrap();
//! assert!((est.estimate - exact).abs() < 4.0 * est.std_error + 0.01);
//! ```

// validation guards are written as negations (`!(c > 0.0)`) on purpose:
// they must reject NaN parameters, which `c <= 0.0` would let through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod covariance;
mod error;
pub mod geometry;
pub mod linalg;
pub mod mcsim;
pub mod pickands;
pub mod quad;
pub mod specialfn;

pub use error::{Error, Result};
