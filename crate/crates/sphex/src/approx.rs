//! Analytic approximations to the excursion probability
//! `P{ sup_{x in T} X(x) >= u }` as `u -> infinity`.
//!
//! Three routes are implemented:
//!
//! * [`pickands_sphere`]: for locally isotropic fields with expansion
//!   `C = 1 - c d^alpha (1 + o(1))`:
//!   `c^{N/alpha} Area(T) H_alpha u^{2N/alpha} Psi(u)`,
//!   where `H_alpha` is Pickands' constant and
//!   `Psi(u) = exp(-u^2/2) / (sqrt(2 pi) u)`.
//! * [`sfbm_pickands`]: the standardized spherical fractional Brownian
//!   motion, whose local scale varies with the polar angle:
//!   `u^{N/beta} Psi(u) 2^{-N/(2 beta)} H_{2 beta}
//!    \int_D theta_1^{-N} prod sin^{N-i} theta_i  d theta`
//!   over a coordinate box `D` excluding the pole.
//! * [`eec_sphere`] / [`eec_domain`]: the expected Euler characteristic of
//!   the excursion set for smooth isotropic fields:
//!   `sum_j (C')^{j/2} L_j rho_j(u)`, with super-exponentially small error.
//!
//! All of these are `u -> infinity` statements: results record a validity
//! floor (`u = 1`) below which the formula values may be negative or
//! meaningless. Error orders are carried as metadata strings and never
//! estimated numerically.

use serde::{Deserialize, Serialize};

use crate::covariance::LocalExpansion;
use crate::error::{Error, Result};
use crate::geometry::{LkCurvatures, SphericalDomain};
use crate::quad;
use crate::specialfn::{ec_density, gauss_tail_psi};

/// Level below which the asymptotic formulas are annotated as unreliable.
pub const VALIDITY_FLOOR: f64 = 1.0;

/// Which approximation produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxMethod {
    Pickands,
    Sfbm,
    Eec,
}

/// How the recorded terms combine into the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermRule {
    Product,
    Sum,
}

/// One recorded factor or summand of an approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub value: f64,
}

/// Value of an excursion-probability approximation with its per-term
/// breakdown and the metadata needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub level: f64,
    pub value: f64,
    pub method: ApproxMethod,
    pub terms: Vec<Term>,
    pub term_rule: TermRule,
    pub validity_floor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local: Option<LocalExpansion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cprime: Option<f64>,
    pub domain: String,
    pub error_order: String,
}

impl ApproxResult {
    /// Recombines the recorded terms; equals `value` to `1e-12` relative.
    pub fn recombine(&self) -> f64 {
        match self.term_rule {
            TermRule::Product => self.terms.iter().map(|t| t.value).product(),
            TermRule::Sum => self.terms.iter().map(|t| t.value).sum(),
        }
    }
}

fn require_positive_level(u: f64) -> Result<()> {
    if u > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("approximation level u = {u} must be > 0")))
    }
}

/// Pickands-type approximation for a locally isotropic field over a domain
/// `T` of finite spherical area:
/// `c^{N/alpha} Area(T) H_alpha u^{2N/alpha} Psi(u)`.
///
/// `pickands_constant` must be supplied by the caller: it is `pi^{-N/2}`
/// for `alpha = 2` ([`crate::pickands::known`]) and otherwise comes from the
/// literature or the Monte Carlo estimator in [`crate::pickands`].
pub fn pickands_sphere(
    local: &LocalExpansion,
    domain: &SphericalDomain,
    u: f64,
    pickands_constant: f64,
) -> Result<ApproxResult> {
    require_positive_level(u)?;
    if !(pickands_constant > 0.0) {
        return Err(Error::invalid(format!(
            "Pickands constant must be positive, got {pickands_constant}"
        )));
    }
    let n = f64::from(domain.dimension());
    let area = domain.area();
    if !area.is_finite() {
        return Err(Error::invalid("domain area must be finite"));
    }
    let terms = vec![
        Term { label: "c^(N/alpha)".into(), value: local.c.powf(n / local.alpha) },
        Term { label: "area".into(), value: area },
        Term { label: "pickands_constant".into(), value: pickands_constant },
        Term { label: "u^(2N/alpha)".into(), value: u.powf(2.0 * n / local.alpha) },
        Term { label: "gauss_tail_psi".into(), value: gauss_tail_psi(u)? },
    ];
    let value = terms.iter().map(|t| t.value).product();
    Ok(ApproxResult {
        level: u,
        value,
        method: ApproxMethod::Pickands,
        terms,
        term_rule: TermRule::Product,
        validity_floor: VALIDITY_FLOOR,
        local: Some(*local),
        cprime: None,
        domain: format!("{domain:?}"),
        error_order: "value * (1 + o(1)) as u -> infinity".into(),
    })
}

/// The coordinate-box integral
/// `int_D theta_1^{-N} prod_{i=1}^{N-1} sin^{N-i} theta_i  d theta`
/// appearing in the standardized-SFBM approximation. Public so the closed
/// form and the quadrature can be cross-checked independently.
pub fn sfbm_domain_integral(domain: &SphericalDomain) -> Result<f64> {
    let SphericalDomain::CoordinateBox { dimension, bounds } = domain else {
        return Err(Error::mismatch(
            "the sfbm approximation needs a coordinate-box domain",
        ));
    };
    let n = *dimension;
    let (lo1, hi1) = bounds[0];
    if lo1 <= 0.0 {
        return Err(Error::mismatch(
            "sfbm domain must exclude the pole: the first coordinate must start above 0",
        ));
    }
    if n == 1 && hi1 >= 2.0 * std::f64::consts::PI {
        return Err(Error::mismatch(
            "sfbm domain must exclude the pole: the circle box must end below 2 pi",
        ));
    }
    let mut integral = if n == 1 {
        // closed form: int 1/theta = log
        (hi1 / lo1).ln()
    } else {
        let power = n as i32 - 1;
        quad::integrate_adaptive(
            &|t: f64| t.powi(-(n as i32)) * t.sin().powi(power),
            lo1,
            hi1,
            1e-10,
        )
    };
    for (i, &(lo, hi)) in bounds.iter().enumerate().skip(1) {
        let power = (n as usize - 1 - i) as i32;
        integral *= if power == 0 {
            hi - lo
        } else {
            quad::integrate_adaptive(&|t: f64| t.sin().powi(power), lo, hi, 1e-10)
        };
    }
    Ok(integral)
}

/// Excursion approximation for the standardized spherical fractional
/// Brownian motion with index `beta` over a coordinate box excluding the
/// pole:
/// `u^{N/beta} Psi(u) 2^{-N/(2 beta)} H_{2 beta} * integral`.
pub fn sfbm_pickands(
    beta: f64,
    domain: &SphericalDomain,
    u: f64,
    pickands_constant: f64,
) -> Result<ApproxResult> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::invalid(format!("sfbm needs beta in (0, 1/2], got {beta}")));
    }
    require_positive_level(u)?;
    if !(pickands_constant > 0.0) {
        return Err(Error::invalid(format!(
            "Pickands constant must be positive, got {pickands_constant}"
        )));
    }
    let integral = sfbm_domain_integral(domain)?;
    let n = f64::from(domain.dimension());
    let terms = vec![
        Term { label: "u^(N/beta)".into(), value: u.powf(n / beta) },
        Term { label: "gauss_tail_psi".into(), value: gauss_tail_psi(u)? },
        Term { label: "2^(-N/(2 beta))".into(), value: 2.0f64.powf(-n / (2.0 * beta)) },
        Term { label: "pickands_constant".into(), value: pickands_constant },
        Term { label: "domain_integral".into(), value: integral },
    ];
    let value = terms.iter().map(|t| t.value).product();
    Ok(ApproxResult {
        level: u,
        value,
        method: ApproxMethod::Sfbm,
        terms,
        term_rule: TermRule::Product,
        validity_floor: VALIDITY_FLOOR,
        local: None,
        cprime: None,
        domain: format!("{domain:?}"),
        error_order: "value * (1 + o(1)) as u -> infinity".into(),
    })
}

/// Expected-Euler-characteristic approximation over a domain with known
/// Lipschitz-Killing curvatures:
/// `sum_{j=0}^{k} (C')^{j/2} L_j rho_j(u)`.
pub fn eec_domain(cprime: f64, lk: &LkCurvatures, u: f64) -> Result<ApproxResult> {
    if !(cprime > 0.0) || !cprime.is_finite() {
        return Err(Error::mismatch(format!(
            "the Euler characteristic approximation needs finite C' > 0 (got {cprime}); \
             non-smooth models go through pickands_sphere"
        )));
    }
    let terms: Vec<Term> = lk
        .0
        .iter()
        .enumerate()
        .map(|(j, &l)| Term {
            label: format!("j={j}"),
            value: if l == 0.0 {
                0.0
            } else {
                cprime.powf(0.5 * j as f64) * l * ec_density(j as u32, u)
            },
        })
        .collect();
    let value = terms.iter().map(|t| t.value).sum();
    Ok(ApproxResult {
        level: u,
        value,
        method: ApproxMethod::Eec,
        terms,
        term_rule: TermRule::Sum,
        validity_floor: VALIDITY_FLOOR,
        local: None,
        cprime: Some(cprime),
        domain: format!("lk={:?}", lk.0),
        error_order: "o(exp(-u^2/2 - alpha_0 u^2)) for an unspecified alpha_0 > 0".into(),
    })
}

/// Expected-Euler-characteristic approximation over the whole sphere `S^N`.
pub fn eec_sphere(cprime: f64, dimension: u32, u: f64) -> Result<ApproxResult> {
    let lk = crate::geometry::lk_sphere(dimension);
    let mut result = eec_domain(cprime, &lk, u)?;
    result.domain = format!("FullSphere {{ dimension: {dimension} }}");
    Ok(result)
}

/// Direct evaluation of the locally isotropic approximation over a
/// coordinate box through the anisotropy determinant:
/// `u^{2N/alpha} Psi(u) H_alpha int_D |det M_theta| d theta`,
/// where `|det M_theta| = c^{N/alpha} prod sin^{N-i} theta_i`.
///
/// Integrated over the full coordinate ranges this reproduces
/// [`pickands_sphere`] on the full sphere; the integral is computed by
/// quadrature rather than through [`SphericalDomain::area`], so the two
/// routes are independent.
pub fn chan_lai_box(
    local: &LocalExpansion,
    domain: &SphericalDomain,
    u: f64,
    pickands_constant: f64,
) -> Result<ApproxResult> {
    require_positive_level(u)?;
    let SphericalDomain::CoordinateBox { dimension, bounds } = domain else {
        return Err(Error::mismatch("chan_lai_box needs a coordinate-box domain"));
    };
    if !(pickands_constant > 0.0) {
        return Err(Error::invalid(format!(
            "Pickands constant must be positive, got {pickands_constant}"
        )));
    }
    let n = *dimension;
    let mut det_integral = local.c.powf(f64::from(n) / local.alpha);
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        let power = (n as usize - 1 - i) as i32;
        det_integral *= if power == 0 {
            hi - lo
        } else {
            quad::integrate_adaptive(&|t: f64| t.sin().powi(power), lo, hi, 1e-10)
        };
    }
    let terms = vec![
        Term { label: "u^(2N/alpha)".into(), value: u.powf(2.0 * f64::from(n) / local.alpha) },
        Term { label: "gauss_tail_psi".into(), value: gauss_tail_psi(u)? },
        Term { label: "pickands_constant".into(), value: pickands_constant },
        Term { label: "det_integral".into(), value: det_integral },
    ];
    let value = terms.iter().map(|t| t.value).product();
    Ok(ApproxResult {
        level: u,
        value,
        method: ApproxMethod::Pickands,
        terms,
        term_rule: TermRule::Product,
        validity_floor: VALIDITY_FLOOR,
        local: Some(*local),
        cprime: None,
        domain: format!("{domain:?}"),
        error_order: "value * (1 + o(1)) as u -> infinity".into(),
    })
}
