//! Monte Carlo validation engine: spherical point sets, exact Gaussian
//! sampling on them from any covariance model, empirical excursion
//! probabilities, and the mean Euler characteristic of excursion sets on a
//! triangulated 2-sphere.
//!
//! # Randomness and reproducibility
//!
//! All sampling is driven by ChaCha8, a counter-based stream cipher RNG that
//! produces identical output on every platform. A run is addressed by a
//! master seed; replicate `r` draws from its own generator seeded with
//! [`replicate_seed`]`(master, r)` (a SplitMix64 hash of the master seed and
//! the replicate index). Replicates are therefore independent streams that
//! can be evaluated serially or in parallel in any order, and a `(model,
//! point set, seed)` triple fully determines every sample.

mod hull;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::covariance::{CovarianceModel, SmoothnessClass};
use crate::error::{Error, Result};
use crate::linalg::{pivoted_cholesky, PivotedFactor, SymmetricKernel};

pub use hull::hull_triangulation;

/// Dense factorization is O(n^3); beyond this many points the cost and
/// memory stop being desk-scale and requests are rejected.
pub const MAX_POINTS: usize = 8192;

/// Replicates are processed in fixed-size batches so the factor-times-noise
/// product runs as a matrix-matrix multiply; the batch size is fixed to keep
/// results bit-identical regardless of replicate count.
const SAMPLE_BATCH: usize = 64;

/// Derives the seed of replicate `index` from the master seed:
/// a SplitMix64 finalizer applied to `master XOR (index + 1) * GOLDEN`.
pub fn replicate_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ (index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Point placement schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Golden-angle spiral; S^2 only. Deterministic, quasi-uniform.
    Fibonacci,
    /// Equally spaced angles on S^1, a latitude/longitude grid on S^2.
    LatLong,
    /// Independent uniform points (normalized Gaussians), seeded.
    UniformRandom,
}

/// A finite set of unit vectors on `S^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dimension: u32,
    count: usize,
    /// Flat row-major coordinates, `count * (dimension + 1)` entries.
    coords: Vec<f64>,
    pub scheme: String,
}

impl PointSet {
    /// Builds a point set from embedded unit vectors (checked to `1e-12`),
    /// rejecting duplicates.
    pub fn from_unit_vectors(dimension: u32, coords: Vec<f64>) -> Result<Self> {
        let stride = dimension as usize + 1;
        if coords.is_empty() || !coords.len().is_multiple_of(stride) {
            return Err(Error::invalid("coordinate buffer length must be a multiple of N + 1"));
        }
        let count = coords.len() / stride;
        if count < 2 {
            return Err(Error::invalid("a point set needs at least 2 points"));
        }
        for i in 0..count {
            let norm: f64 = coords[i * stride..(i + 1) * stride].iter().map(|x| x * x).sum();
            if !((norm.sqrt() - 1.0).abs() <= 1e-12) {
                return Err(Error::invalid(format!(
                    "point {i} has norm {} (must be 1 within 1e-12)",
                    norm.sqrt()
                )));
            }
        }
        let set = PointSet { dimension, count, coords, scheme: "custom".into() };
        set.check_no_duplicates()?;
        Ok(set)
    }

    /// Generates a point set. `seed` matters only for
    /// [`Scheme::UniformRandom`]; the other schemes are deterministic.
    pub fn generate(scheme: Scheme, count: usize, dimension: u32, seed: u64) -> Result<Self> {
        if count < 2 {
            return Err(Error::invalid("a point set needs at least 2 points"));
        }
        if dimension == 0 {
            return Err(Error::invalid("sphere dimension must be >= 1"));
        }
        let mut set = match scheme {
            Scheme::Fibonacci => {
                if dimension != 2 {
                    return Err(Error::invalid(
                        "the fibonacci scheme is defined on S^2 only",
                    ));
                }
                let golden_angle = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
                let mut coords = Vec::with_capacity(count * 3);
                for k in 0..count {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden_angle * k as f64;
                    // embedding order (cos theta1, sin theta1 cos theta2, ...)
                    coords.extend_from_slice(&[z, r * phi.cos(), r * phi.sin()]);
                }
                PointSet { dimension, count, coords, scheme: "fibonacci".into() }
            }
            Scheme::LatLong => match dimension {
                1 => {
                    let mut coords = Vec::with_capacity(count * 2);
                    for k in 0..count {
                        let t = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                        coords.extend_from_slice(&[t.cos(), t.sin()]);
                    }
                    PointSet { dimension, count, coords, scheme: "latlong".into() }
                }
                2 => {
                    let rows = ((count as f64 / 2.0).sqrt().round() as usize).max(2);
                    let cols = count.div_ceil(rows);
                    let mut coords = Vec::with_capacity(count * 3);
                    'outer: for i in 0..rows {
                        let theta = std::f64::consts::PI * (i as f64 + 0.5) / rows as f64;
                        for j in 0..cols {
                            if coords.len() / 3 == count {
                                break 'outer;
                            }
                            let phi = 2.0 * std::f64::consts::PI * j as f64 / cols as f64;
                            coords.extend_from_slice(&[
                                theta.cos(),
                                theta.sin() * phi.cos(),
                                theta.sin() * phi.sin(),
                            ]);
                        }
                    }
                    PointSet { dimension, count, coords, scheme: "latlong".into() }
                }
                n => {
                    return Err(Error::invalid(format!(
                        "the latlong scheme supports N = 1 and N = 2, not N = {n}"
                    )))
                }
            },
            Scheme::UniformRandom => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let stride = dimension as usize + 1;
                let mut coords = Vec::with_capacity(count * stride);
                for _ in 0..count {
                    loop {
                        let v: Vec<f64> =
                            (0..stride).map(|_| StandardNormal.sample(&mut rng)).collect();
                        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                        if norm > 1e-6 {
                            coords.extend(v.into_iter().map(|x| x / norm));
                            break;
                        }
                    }
                }
                PointSet { dimension, count, coords, scheme: "uniform-random".into() }
            }
        };
        set.scheme = format!("{}({count})", set.scheme);
        set.check_no_duplicates()?;
        Ok(set)
    }

    fn check_no_duplicates(&self) -> Result<()> {
        let stride = self.stride();
        let mut order: Vec<usize> = (0..self.count).collect();
        order.sort_unstable_by(|&i, &j| {
            self.coords[i * stride..(i + 1) * stride]
                .partial_cmp(&self.coords[j * stride..(j + 1) * stride])
                .unwrap()
        });
        for w in order.windows(2) {
            let a = &self.coords[w[0] * stride..(w[0] + 1) * stride];
            let b = &self.coords[w[1] * stride..(w[1] + 1) * stride];
            if a == b {
                return Err(Error::invalid(format!(
                    "duplicate points at indices {} and {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    fn stride(&self) -> usize {
        self.dimension as usize + 1
    }

    /// Embedded coordinates of point `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        let s = self.stride();
        &self.coords[i * s..(i + 1) * s]
    }

    /// The point set restricted to `indices` (used for nested-grid studies).
    pub fn restrict(&self, indices: &[usize]) -> Result<PointSet> {
        let s = self.stride();
        let mut coords = Vec::with_capacity(indices.len() * s);
        for &i in indices {
            if i >= self.count {
                return Err(Error::invalid(format!("index {i} out of range")));
            }
            coords.extend_from_slice(self.point(i));
        }
        PointSet::from_unit_vectors(self.dimension, coords)
    }

    /// Concatenation of two point sets on the same sphere.
    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        if self.dimension != other.dimension {
            return Err(Error::invalid("point sets live on different spheres"));
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        PointSet::from_unit_vectors(self.dimension, coords)
    }

    /// Smallest pairwise angular distance; O(n^2), meant for diagnostics
    /// and tests.
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.count {
            for j in (i + 1)..self.count {
                let d = crate::geometry::spherical_distance(self.point(i), self.point(j));
                min = min.min(d);
            }
        }
        min
    }
}

/// Full covariance matrix `C(x_i, x_j)` of a model over a point set.
/// Symmetric, positive semidefinite, unit diagonal for normalized models.
pub fn covariance_matrix(model: &CovarianceModel, points: &PointSet) -> Result<DMatrix<f64>> {
    let n = points.len();
    let dim = points.dimension();
    model.check_dimension(dim)?;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = model.between(points.point(i), points.point(j), dim)?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Column oracle over a model and point set, so the pivoted factorization
/// touches only the columns it pivots on (low-rank models never build the
/// full matrix).
struct ModelKernel<'a> {
    model: &'a CovarianceModel,
    points: &'a PointSet,
}

impl SymmetricKernel for ModelKernel<'_> {
    fn dim(&self) -> usize {
        self.points.len()
    }

    fn diagonal(&self, out: &mut [f64]) {
        let dim = self.points.dimension();
        for (i, v) in out.iter_mut().enumerate() {
            let p = self.points.point(i);
            *v = self.model.between(p, p, dim).expect("validated at sampler construction");
        }
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        let dim = self.points.dimension();
        let pj = self.points.point(j);
        for (i, v) in out.iter_mut().enumerate() {
            *v = self
                .model
                .between(self.points.point(i), pj, dim)
                .expect("validated at sampler construction");
        }
    }
}

/// One exact multivariate Gaussian realization of a field on a point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub values: Vec<f64>,
    pub seed: u64,
    pub model: String,
}

/// Factorization cache for repeated sampling of one `(model, point set)`
/// pair: the covariance is factored once at construction, every draw then
/// costs `rank` standard normals and one matrix-vector product.
pub struct FieldSampler {
    factor: PivotedFactor,
    model_id: String,
    count: usize,
}

impl FieldSampler {
    pub fn new(model: &CovarianceModel, points: &PointSet) -> Result<Self> {
        if points.len() > MAX_POINTS {
            return Err(Error::invalid(format!(
                "point count {} exceeds the dense-factorization cap of {MAX_POINTS}; \
                 use fewer points or split the study",
                points.len()
            )));
        }
        let dim = points.dimension();
        model.check_dimension(dim)?;
        // surface pole violations (standardized SFBM) before factorization
        if matches!(model, CovarianceModel::Sfbm { .. }) {
            for i in 0..points.len() {
                let p = points.point(i);
                model.between(p, p, dim)?;
            }
        }
        let kernel = ModelKernel { model, points };
        let factor = pivoted_cholesky(&kernel)?;
        Ok(FieldSampler { factor, model_id: model.id(), count: points.len() })
    }

    /// Numerical rank of the covariance factor.
    pub fn rank(&self) -> usize {
        self.factor.rank
    }

    /// Diagonal jitter the factorization needed (normally 0).
    pub fn jitter(&self) -> f64 {
        self.factor.jitter
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    /// Draws the realizations for `seeds`, one column per seed.
    ///
    /// Contract (stable, relied on by envelope consumers): the draw for one
    /// seed consumes exactly `rank()` standard normals, in order, from a
    /// `ChaCha8Rng` seeded with that value; the realization is the factor
    /// times that normal vector.
    pub fn sample_batch(&self, seeds: &[u64]) -> DMatrix<f64> {
        let rank = self.factor.rank;
        let mut g = DMatrix::zeros(rank, seeds.len());
        for (c, &seed) in seeds.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for r in 0..rank {
                g[(r, c)] = StandardNormal.sample(&mut rng);
            }
        }
        &self.factor.factor * g
    }

    /// One realization for one seed.
    pub fn sample_values(&self, seed: u64) -> Vec<f64> {
        let m = self.sample_batch(&[seed]);
        m.column(0).iter().cloned().collect()
    }

    /// Streams replicate realizations `0..replicates` for a master seed,
    /// calling `consume(replicate_index, values)` in index order. Processing
    /// happens in fixed batches so the result is independent of the
    /// replicate count's alignment.
    pub fn for_each_replicate<F: FnMut(u64, &[f64])>(
        &self,
        master_seed: u64,
        replicates: u64,
        mut consume: F,
    ) {
        let mut index = 0u64;
        let mut seeds = Vec::with_capacity(SAMPLE_BATCH);
        while index < replicates {
            seeds.clear();
            let batch = SAMPLE_BATCH.min((replicates - index) as usize);
            for b in 0..batch {
                seeds.push(replicate_seed(master_seed, index + b as u64));
            }
            let values = self.sample_batch(&seeds);
            for b in 0..batch {
                let col: Vec<f64> = values.column(b).iter().cloned().collect();
                consume(index + b as u64, &col);
            }
            index += batch as u64;
        }
    }

    /// Number of points the sampler draws values for.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// Draws a single exact field realization (factors the covariance, draws
/// once). For replicate loops build a [`FieldSampler`] instead so the
/// factorization is reused.
pub fn sample_field(model: &CovarianceModel, points: &PointSet, seed: u64) -> Result<FieldSample> {
    let sampler = FieldSampler::new(model, points)?;
    Ok(FieldSample { values: sampler.sample_values(seed), seed, model: sampler.model_id.clone() })
}

/// What an [`ExcursionEstimate`] estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    SupProbability,
    MeanEulerCharacteristic,
}

/// Monte Carlo estimate of an excursion quantity with its uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionEstimate {
    pub level: f64,
    pub kind: EstimateKind,
    pub estimate: f64,
    pub std_error: f64,
    pub replicates: u64,
    pub note: String,
}

/// Per-replicate statistic (a supremum or an Euler characteristic).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub index: u64,
    pub seed: u64,
    pub value: f64,
}

fn discretization_note(model: &CovarianceModel, points: usize, dimension: u32) -> String {
    let severe = model
        .smoothness(dimension)
        .ok()
        .and_then(|s| if s.class == SmoothnessClass::NotSmooth { s.local } else { None })
        .map(|l| l.alpha < 2.0)
        .unwrap_or(false);
    let mut note = format!(
        "supremum over {points} grid points underestimates the continuous supremum \
         (downward bias)"
    );
    if severe {
        note.push_str("; severe for local exponent alpha < 2: treat comparisons as trend-only");
    }
    note
}

/// Per-replicate grid suprema of the field over a point set (optionally
/// restricted to an index subset, which realizes nested-grid couplings:
/// sampling on the superset and restricting).
pub fn replicate_suprema(
    model: &CovarianceModel,
    points: &PointSet,
    subset: Option<&[usize]>,
    replicates: u64,
    master_seed: u64,
) -> Result<Vec<ReplicateRecord>> {
    if replicates < 1 {
        return Err(Error::invalid("need at least 1 replicate"));
    }
    if let Some(idx) = subset {
        if let Some(&bad) = idx.iter().find(|&&i| i >= points.len()) {
            return Err(Error::invalid(format!("subset index {bad} out of range")));
        }
    }
    let sampler = FieldSampler::new(model, points)?;
    let mut records = Vec::with_capacity(replicates as usize);
    sampler.for_each_replicate(master_seed, replicates, |index, values| {
        let sup = match subset {
            Some(idx) => idx.iter().map(|&i| values[i]).fold(f64::NEG_INFINITY, f64::max),
            None => values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        };
        records.push(ReplicateRecord {
            index,
            seed: replicate_seed(master_seed, index),
            value: sup,
        });
    });
    Ok(records)
}

/// Turns supremum records into an excursion-probability estimate at level
/// `u`. The uncertainty is the Wilson 95% half-width divided by 1.96, a
/// standard-error surrogate that stays positive at empirical 0 and 1.
pub fn excursion_estimate_at(records: &[ReplicateRecord], u: f64, note: String) -> ExcursionEstimate {
    let n = records.len() as f64;
    let hits = records.iter().filter(|r| r.value >= u).count() as f64;
    let p = hits / n;
    let z = 1.959_963_984_540_054; // 97.5% normal quantile
    let z2 = z * z;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ExcursionEstimate {
        level: u,
        kind: EstimateKind::SupProbability,
        estimate: p,
        std_error: half / z,
        replicates: records.len() as u64,
        note,
    }
}

/// Empirical excursion probability `P{ sup over the point set >= u }`.
pub fn empirical_excursion(
    model: &CovarianceModel,
    points: &PointSet,
    u: f64,
    replicates: u64,
    master_seed: u64,
) -> Result<ExcursionEstimate> {
    if replicates < 100 {
        return Err(Error::invalid(format!(
            "need at least 100 replicates, got {replicates}"
        )));
    }
    let records = replicate_suprema(model, points, None, replicates, master_seed)?;
    let note = discretization_note(model, points.len(), points.dimension());
    Ok(excursion_estimate_at(&records, u, note))
}

/// A triangulated closed surface over a point set on S^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereTriangulation {
    points: PointSet,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
}

impl SphereTriangulation {
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }
}

/// Convex-hull triangulation of an arbitrary point set on S^2.
pub fn convex_hull_triangulation(points: PointSet) -> Result<SphereTriangulation> {
    if points.dimension() != 2 {
        return Err(Error::invalid("triangulation is implemented for S^2 only"));
    }
    let pts: Vec<[f64; 3]> = (0..points.len())
        .map(|i| {
            let p = points.point(i);
            [p[0], p[1], p[2]]
        })
        .collect();
    let (faces, edges) = hull::hull_triangulation(&pts)?;
    Ok(SphereTriangulation { points, edges, faces })
}

/// Convex-hull triangulation of a fibonacci point set with `count >= 12`
/// vertices.
pub fn triangulate_sphere(count: usize) -> Result<SphereTriangulation> {
    if count < 12 {
        return Err(Error::invalid(format!("triangulation needs at least 12 points, got {count}")));
    }
    convex_hull_triangulation(PointSet::generate(Scheme::Fibonacci, count, 2, 0)?)
}

/// Euler characteristic of the excursion set at level `u`, computed on the
/// simplicial subcomplex induced by the vertices with `value >= u` (a
/// simplex is included iff all its vertices qualify):
/// `chi = #V - #E + #F` over qualifying simplices.
pub fn euler_characteristic(tri: &SphereTriangulation, values: &[f64], u: f64) -> Result<i64> {
    if values.len() != tri.points.len() {
        return Err(Error::invalid(format!(
            "got {} values for {} vertices",
            values.len(),
            tri.points.len()
        )));
    }
    let inside = |i: usize| values[i] >= u;
    let v = (0..values.len()).filter(|&i| inside(i)).count() as i64;
    let e = tri.edges.iter().filter(|e| inside(e[0]) && inside(e[1])).count() as i64;
    let f = tri
        .faces
        .iter()
        .filter(|f| inside(f[0]) && inside(f[1]) && inside(f[2]))
        .count() as i64;
    Ok(v - e + f)
}

/// Per-replicate Euler characteristics of the excursion set at level `u`
/// for a smooth model on a triangulated S^2.
pub fn replicate_euler_characteristics(
    model: &CovarianceModel,
    tri: &SphereTriangulation,
    u: f64,
    replicates: u64,
    master_seed: u64,
) -> Result<Vec<ReplicateRecord>> {
    let report = model.smoothness(tri.points.dimension())?;
    if report.cprime.is_none() {
        return Err(Error::mismatch(
            "mean Euler characteristic needs a smooth model (finite C'); \
             this model is non-smooth",
        ));
    }
    let sampler = FieldSampler::new(model, &tri.points)?;
    let mut records = Vec::with_capacity(replicates as usize);
    let mut failure = None;
    sampler.for_each_replicate(master_seed, replicates, |index, values| {
        match euler_characteristic(tri, values, u) {
            Ok(chi) => records.push(ReplicateRecord {
                index,
                seed: replicate_seed(master_seed, index),
                value: chi as f64,
            }),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(records)
}

/// Sample mean and standard error of `chi(A_u)` over replicates.
pub fn mean_euler_characteristic(
    model: &CovarianceModel,
    tri: &SphereTriangulation,
    u: f64,
    replicates: u64,
    master_seed: u64,
) -> Result<ExcursionEstimate> {
    if replicates < 100 {
        return Err(Error::invalid(format!(
            "need at least 100 replicates, got {replicates}"
        )));
    }
    let records = replicate_euler_characteristics(model, tri, u, replicates, master_seed)?;
    Ok(mean_estimate_from(&records, u, tri.vertex_count()))
}

/// Mean/standard-error reduction of Euler characteristic records.
pub fn mean_estimate_from(records: &[ReplicateRecord], u: f64, vertices: usize) -> ExcursionEstimate {
    let n = records.len() as f64;
    let mean = records.iter().map(|r| r.value).sum::<f64>() / n;
    let var = records.iter().map(|r| (r.value - mean).powi(2)).sum::<f64>() / (n - 1.0);
    ExcursionEstimate {
        level: u,
        kind: EstimateKind::MeanEulerCharacteristic,
        estimate: mean,
        std_error: (var / n).sqrt(),
        replicates: records.len() as u64,
        note: format!(
            "simplicial Euler characteristic on a {vertices}-vertex mesh; \
             excursion components smaller than the mesh are missed"
        ),
    }
}
