//! Spherical coordinates and distances, parameter-set domains with areas,
//! anisotropy scaling matrices, and Lipschitz-Killing curvatures of the
//! N-sphere and preset subsets.
//!
//! Points on the N-sphere are addressed either by their spherical coordinates
//! `theta = (theta_1, ..., theta_N)` with `theta_i` in `[0, pi]` for `i < N`
//! and `theta_N` in `[0, 2 pi)`, or by their embedding as unit vectors in
//! `R^{N+1}`:
//!
//! ```text
//! x_1 = cos theta_1
//! x_2 = sin theta_1 cos theta_2
//! ...
//! x_{N+1} = sin theta_1 ... sin theta_{N-1} sin theta_N
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::specialfn::sphere_area;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// A point on the N-sphere in spherical coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalPoint {
    theta: Vec<f64>,
}

impl SphericalPoint {
    /// Validates coordinate ranges: all but the last angle in `[0, pi]`,
    /// the last in `[0, 2 pi)`.
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::invalid("a spherical point needs at least one coordinate"));
        }
        let n = theta.len();
        for (i, &t) in theta.iter().enumerate() {
            if i + 1 < n {
                if !(0.0..=std::f64::consts::PI).contains(&t) {
                    return Err(Error::invalid(format!(
                        "coordinate theta_{} = {t} outside [0, pi]",
                        i + 1
                    )));
                }
            } else if !(0.0..TAU).contains(&t) {
                return Err(Error::invalid(format!(
                    "coordinate theta_{n} = {t} outside [0, 2 pi)"
                )));
            }
        }
        Ok(SphericalPoint { theta })
    }

    /// The pole `o` with all coordinates zero, embedding to `(1, 0, ..., 0)`.
    pub fn pole(dimension: u32) -> Self {
        SphericalPoint { theta: vec![0.0; dimension as usize] }
    }

    pub fn dimension(&self) -> u32 {
        self.theta.len() as u32
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.theta
    }

    /// Embeds the point as a unit vector in `R^{N+1}`.
    pub fn embed(&self) -> Vec<f64> {
        let n = self.theta.len();
        let mut out = Vec::with_capacity(n + 1);
        let mut sin_prod = 1.0;
        for &t in &self.theta {
            out.push(sin_prod * t.cos());
            sin_prod *= t.sin();
        }
        out.push(sin_prod);
        out
    }
}

/// Spherical distance `d(x, y) = arccos <x, y>` between unit vectors,
/// with the inner product clamped to [-1, 1] against round-off.
pub fn spherical_distance(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    dot.clamp(-1.0, 1.0).acos()
}

/// Both sides of the local distance expansion: the exact squared distance
/// `d^2(x, y)` and the quadratic form
/// `sum_j (prod_{i<j} sin^2 theta_i) (phi_j - theta_j)^2`,
/// whose ratio tends to 1 as the points approach each other.
///
/// The difference in the last (periodic) coordinate is reduced modulo
/// `2 pi` into `(-pi, pi]` before squaring, so separations across the
/// `0 = 2 pi` seam stay small.
pub fn distance_expansion(theta: &SphericalPoint, phi: &SphericalPoint) -> Result<(f64, f64)> {
    if theta.dimension() != phi.dimension() {
        return Err(Error::invalid("points must have the same dimension"));
    }
    let d = spherical_distance(&theta.embed(), &phi.embed());
    let n = theta.theta.len();
    let mut quad_form = 0.0;
    let mut weight = 1.0;
    for j in 0..n {
        let mut diff = phi.theta[j] - theta.theta[j];
        if j + 1 == n {
            diff = diff.rem_euclid(TAU);
            if diff > std::f64::consts::PI {
                diff -= TAU;
            }
        }
        quad_form += weight * diff * diff;
        weight *= theta.theta[j].sin().powi(2);
    }
    Ok((d * d, quad_form))
}

/// Diagonal of the anisotropy scaling matrix
/// `M_theta = c^{1/alpha} diag(1, sin theta_1, ..., prod sin theta_i)`,
/// the local rescaling that turns the coordinate metric into the spherical
/// one. For `N = 1` this is the single scalar `c^{1/alpha}`.
///
/// Degenerate (zero-determinant) values at the poles are valid outputs.
pub fn anisotropy_matrix(theta: &SphericalPoint, c: f64, alpha: f64) -> Vec<f64> {
    let scale = c.powf(1.0 / alpha);
    let n = theta.theta.len();
    let mut diag = Vec::with_capacity(n);
    let mut sin_prod = 1.0;
    for i in 0..n {
        diag.push(scale * sin_prod);
        sin_prod *= theta.theta[i].sin();
    }
    diag
}

/// Determinant of a diagonal matrix given as its diagonal.
pub fn diagonal_determinant(diag: &[f64]) -> f64 {
    diag.iter().product()
}

/// Lipschitz-Killing curvatures `L_0, ..., L_k` of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LkCurvatures(pub Vec<f64>);

impl LkCurvatures {
    pub fn order(&self) -> usize {
        self.0.len() - 1
    }
}

/// Lipschitz-Killing curvatures of the N-sphere:
/// `L_j = 2 C(N, j) omega_N / omega_{N-j}` when `N - j` is even, else 0.
pub fn lk_sphere(dimension: u32) -> LkCurvatures {
    let n = dimension;
    let values = (0..=n)
        .map(|j| {
            if (n - j).is_multiple_of(2) {
                let binom = (libm::lgamma(f64::from(n) + 1.0)
                    - libm::lgamma(f64::from(j) + 1.0)
                    - libm::lgamma(f64::from(n - j) + 1.0))
                .exp();
                2.0 * binom.round() * sphere_area(n) / sphere_area(n - j)
            } else {
                0.0
            }
        })
        .collect();
    LkCurvatures(values)
}

/// A parameter set on the N-sphere over which excursion probabilities are
/// approximated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SphericalDomain {
    /// The whole sphere `S^N`.
    FullSphere { dimension: u32 },
    /// A box in spherical coordinates: per-axis closed intervals.
    CoordinateBox { dimension: u32, bounds: Vec<(f64, f64)> },
    /// A spherical cap of the given angular radius.
    Cap { dimension: u32, center: Option<SphericalPoint>, radius: f64 },
    /// A semisphere of dimension `k` (curvature presets exist for k = 1, 2).
    Semisphere { dimension: u32 },
    /// A user-described domain carrying its area and, optionally, its
    /// Lipschitz-Killing curvatures.
    Custom { dimension: u32, area: f64, lk: Option<Vec<f64>> },
}

impl SphericalDomain {
    pub fn full_sphere(dimension: u32) -> Result<Self> {
        require_dim(dimension)?;
        Ok(SphericalDomain::FullSphere { dimension })
    }

    /// A coordinate box; `bounds[i] = (lo, hi)` with the first `N - 1` axes
    /// within `[0, pi]` and the last within `[0, 2 pi]`.
    pub fn coordinate_box(dimension: u32, bounds: Vec<(f64, f64)>) -> Result<Self> {
        require_dim(dimension)?;
        if bounds.len() != dimension as usize {
            return Err(Error::invalid(format!(
                "expected {dimension} bounds, got {}",
                bounds.len()
            )));
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            let max = if i + 1 == bounds.len() { TAU } else { std::f64::consts::PI };
            if !(lo <= hi && lo >= 0.0 && hi <= max + 1e-12) {
                return Err(Error::invalid(format!(
                    "box bounds ({lo}, {hi}) invalid for axis {} (range [0, {max}])",
                    i + 1
                )));
            }
        }
        Ok(SphericalDomain::CoordinateBox { dimension, bounds })
    }

    pub fn cap(dimension: u32, center: Option<SphericalPoint>, radius: f64) -> Result<Self> {
        require_dim(dimension)?;
        if !(radius > 0.0 && radius < std::f64::consts::PI) {
            return Err(Error::invalid(format!("cap radius {radius} outside (0, pi)")));
        }
        if let Some(c) = &center {
            if c.dimension() != dimension {
                return Err(Error::invalid("cap center dimension mismatch"));
            }
        }
        Ok(SphericalDomain::Cap { dimension, center, radius })
    }

    pub fn semisphere(dimension: u32) -> Result<Self> {
        require_dim(dimension)?;
        Ok(SphericalDomain::Semisphere { dimension })
    }

    pub fn custom(dimension: u32, area: f64, lk: Option<Vec<f64>>) -> Result<Self> {
        require_dim(dimension)?;
        if !(area >= 0.0 && area.is_finite()) {
            return Err(Error::invalid(format!("custom domain area {area} must be finite and >= 0")));
        }
        Ok(SphericalDomain::Custom { dimension, area, lk })
    }

    pub fn dimension(&self) -> u32 {
        match self {
            SphericalDomain::FullSphere { dimension }
            | SphericalDomain::CoordinateBox { dimension, .. }
            | SphericalDomain::Cap { dimension, .. }
            | SphericalDomain::Semisphere { dimension }
            | SphericalDomain::Custom { dimension, .. } => *dimension,
        }
    }

    /// Spherical area (k-volume). Boxes and caps are integrated with the
    /// spherical area element `prod sin^{N-i} theta_i d theta` by composite
    /// Gauss-Legendre quadrature (64 panels per axis).
    pub fn area(&self) -> f64 {
        match self {
            SphericalDomain::FullSphere { dimension } => sphere_area(*dimension),
            SphericalDomain::CoordinateBox { dimension, bounds } => {
                let n = *dimension;
                let mut area = 1.0;
                for (i, &(lo, hi)) in bounds.iter().enumerate() {
                    let power = (n as usize - 1 - i) as i32;
                    if power == 0 {
                        area *= hi - lo;
                    } else {
                        area *= quad::integrate(&|t: f64| t.sin().powi(power), lo, hi, 64);
                    }
                }
                area
            }
            SphericalDomain::Cap { dimension, radius, .. } => {
                let n = *dimension;
                let rim = sphere_area(n - 1);
                if n == 1 {
                    2.0 * radius
                } else {
                    rim * quad::integrate(&|t: f64| t.sin().powi(n as i32 - 1), 0.0, *radius, 64)
                }
            }
            SphericalDomain::Semisphere { dimension } => 0.5 * sphere_area(*dimension),
            SphericalDomain::Custom { area, .. } => *area,
        }
    }

    /// Lipschitz-Killing curvatures. Presets exist for the full sphere and
    /// for semispheres of dimension one (`(1, pi)`) and two (`(1, pi, 2 pi)`);
    /// custom domains pass their user-supplied vector through. Boxes and
    /// caps have no Steiner-formula implementation here and are rejected.
    pub fn lk_curvatures(&self) -> Result<LkCurvatures> {
        match self {
            SphericalDomain::FullSphere { dimension } => Ok(lk_sphere(*dimension)),
            SphericalDomain::Semisphere { dimension } => match dimension {
                1 => Ok(LkCurvatures(vec![1.0, std::f64::consts::PI])),
                2 => Ok(LkCurvatures(vec![1.0, std::f64::consts::PI, TAU])),
                k => Err(Error::mismatch(format!(
                    "no curvature preset for a semisphere of dimension {k}; supply a custom domain"
                ))),
            },
            SphericalDomain::Custom { lk: Some(values), .. } => Ok(LkCurvatures(values.clone())),
            other => Err(Error::mismatch(format!(
                "no Lipschitz-Killing curvatures available for {other:?}; supply them via a custom domain"
            ))),
        }
    }
}

fn require_dim(dimension: u32) -> Result<()> {
    if dimension == 0 {
        Err(Error::invalid("sphere dimension must be >= 1"))
    } else {
        Ok(())
    }
}
