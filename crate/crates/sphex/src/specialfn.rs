//! Scalar special functions: ultraspherical (Gegenbauer) and Chebyshev
//! polynomials, Hermite polynomials, the Gaussian tail factor, Euler
//! characteristic densities, unit-sphere areas and chi tail probabilities.
//!
//! Everything here is pure and total on its stated domain. Arguments that are
//! cosines of angles are accepted in `[-1, 1]` with a clamp band of `1e-12` to
//! absorb round-off from inner products of unit vectors.

use crate::error::{Error, Result};

/// Width of the tolerance band around [-1, 1] within which cosine arguments
/// are clamped instead of rejected.
pub const UNIT_CLAMP: f64 = 1e-12;

/// Clamps `t` to [-1, 1], rejecting values outside the tolerance band.
pub fn clamp_unit(t: f64) -> Result<f64> {
    if t.abs() <= 1.0 {
        Ok(t)
    } else if t.abs() <= 1.0 + UNIT_CLAMP {
        Ok(t.signum())
    } else {
        Err(Error::invalid(format!(
            "argument {t} outside [-1, 1] beyond the {UNIT_CLAMP:e} clamp band"
        )))
    }
}

/// Evaluates the ultraspherical polynomial `P_n^lambda(t)` for `lambda > 0`
/// by the ascending three-term recurrence
/// `n P_n = 2 (n + lambda - 1) t P_{n-1} - (n + 2 lambda - 2) P_{n-2}`,
/// which is stable on [-1, 1].
///
/// `lambda = 0` is the Chebyshev branch; use [`chebyshev`] for it.
pub fn gegenbauer(n: u32, lambda: f64, t: f64) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::invalid(format!(
            "gegenbauer requires lambda > 0, got {lambda}; use chebyshev for lambda = 0"
        )));
    }
    let t = clamp_unit(t)?;
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * lambda * t;
    for k in 2..=n {
        let k = f64::from(k);
        let next = (2.0 * (k + lambda - 1.0) * t * cur - (k + 2.0 * lambda - 2.0) * prev) / k;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Chebyshev polynomial of the first kind, `T_n(t) = cos(n arccos t)`.
pub fn chebyshev(n: u32, t: f64) -> Result<f64> {
    let t = clamp_unit(t)?;
    Ok((f64::from(n) * t.acos()).cos())
}

/// Unified evaluation of `P_n^lambda` including the `lambda = 0` Chebyshev
/// branch used on the circle.
pub fn ultraspherical(n: u32, lambda: f64, t: f64) -> Result<f64> {
    if lambda == 0.0 {
        chebyshev(n, t)
    } else {
        gegenbauer(n, lambda, t)
    }
}

/// Value of `P_n^lambda` at `t = 1`: the binomial `C(n + 2 lambda - 1, n)`
/// for `lambda > 0` and `1` for `lambda = 0`. Computed through log-gamma so
/// degrees up to 10^4 do not overflow.
pub fn gegenbauer_at_one(n: u32, lambda: f64) -> f64 {
    if lambda == 0.0 || n == 0 {
        return 1.0;
    }
    let n = f64::from(n);
    let a = 2.0 * lambda;
    // C(n + a - 1, n) = Gamma(n + a) / (Gamma(n + 1) Gamma(a))
    (libm::lgamma(n + a) - libm::lgamma(n + 1.0) - libm::lgamma(a)).exp()
}

/// Derivative of the ultraspherical polynomial:
/// `d/dt P_n^lambda = 2 lambda P_{n-1}^{lambda+1}` for `lambda > 0` and
/// `d/dt P_n^0 = n P_{n-1}^1`. Returns 0 for `n = 0`.
pub fn gegenbauer_derivative(n: u32, lambda: f64, t: f64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    if lambda == 0.0 {
        Ok(f64::from(n) * gegenbauer(n - 1, 1.0, t)?)
    } else {
        Ok(2.0 * lambda * gegenbauer(n - 1, lambda + 1.0, t)?)
    }
}

/// Hermite polynomial `H_j` (probabilists' convention), by the recurrence
/// `H_{j+1}(u) = u H_j(u) - j H_{j-1}(u)`.
pub fn hermite(j: u32, u: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = u;
    for k in 1..j {
        let next = u * cur - f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Gaussian tail factor `Psi(u) = exp(-u^2/2) / (sqrt(2 pi) u)` for `u > 0`.
pub fn gauss_tail_psi(u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::invalid(format!("gauss_tail_psi requires u > 0, got {u}")));
    }
    Ok((-0.5 * u * u).exp() / ((2.0 * std::f64::consts::PI).sqrt() * u))
}

/// Standard Gaussian upper tail `1 - Phi(u)`, via the complementary error
/// function for full relative accuracy out to `u ~ 8` and beyond.
pub fn gaussian_upper_tail(u: f64) -> f64 {
    0.5 * libm::erfc(u / std::f64::consts::SQRT_2)
}

/// Euler characteristic density `rho_j(u)`:
/// `rho_0(u) = 1 - Phi(u)` and
/// `rho_j(u) = (2 pi)^{-(j+1)/2} H_{j-1}(u) exp(-u^2/2)` for `j >= 1`.
pub fn ec_density(j: u32, u: f64) -> f64 {
    if j == 0 {
        return gaussian_upper_tail(u);
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    two_pi.powf(-0.5 * f64::from(j + 1)) * hermite(j - 1, u) * (-0.5 * u * u).exp()
}

/// Spherical area of the j-dimensional unit sphere,
/// `omega_j = 2 pi^{(j+1)/2} / Gamma((j+1)/2)`.
pub fn sphere_area(j: u32) -> f64 {
    let half = 0.5 * f64::from(j + 1);
    2.0 * std::f64::consts::PI.powf(half) / libm::tgamma(half)
}

/// Tail probability `P(||xi|| >= u)` for a standard Gaussian vector in R^k,
/// i.e. the regularized upper incomplete gamma `Q(k/2, u^2/2)`.
///
/// Computed by the ascending recurrence
/// `Q(a + 1, x) = Q(a, x) + x^a e^{-x} / Gamma(a + 1)`
/// starting from `Q(1/2, x) = erfc(sqrt(x))` or `Q(1, x) = e^{-x}`.
/// All terms are positive, so the sum is accurate to a few ulp even in the
/// far tail.
pub fn chi_tail(k: u32, u: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("chi_tail requires k >= 1"));
    }
    if !(u >= 0.0) {
        return Err(Error::invalid(format!("chi_tail requires u >= 0, got {u}")));
    }
    let x = 0.5 * u * u;
    let ex = (-x).exp();
    let (mut q, mut a, mut term) = if k % 2 == 1 {
        // Q(1/2, x) = erfc(sqrt(x)); first correction term has a = 1/2.
        let t = x.sqrt() * ex * 2.0 / std::f64::consts::PI.sqrt();
        (libm::erfc(x.sqrt()), 0.5, t)
    } else {
        (ex, 1.0, x * ex)
    };
    while a + 1.0 <= 0.5 * f64::from(k) {
        q += term;
        a += 1.0;
        term *= x / (a + 1.0);
    }
    Ok(q.min(1.0))
}
