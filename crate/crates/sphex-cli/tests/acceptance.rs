//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `--nocapture`; always printed on failure).
//!
//! Every tolerance is pinned here. The suites are deterministic: all
//! randomness derives from fixed master seeds.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use sphex::approx::{eec_sphere, pickands_sphere};
use sphex::covariance::{CovarianceModel, LocalExpansion};
use sphex::geometry::SphericalDomain;
use sphex::linalg::pivoted_cholesky;
use sphex::mcsim::{
    mean_euler_characteristic, replicate_seed, triangulate_sphere, FieldSampler, PointSet, Scheme,
};
use sphex::pickands;
use sphex::specialfn::chi_tail;

const MASTER_SEED: u64 = 20260808;
const PI: f64 = std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn report(criterion: &str, pass: bool, details: &str) {
    println!(
        "acceptance {criterion}: {} ({details})",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// Criterion 1: the Euler characteristic approximation is exact for the
/// canonical fields: it equals the chi tail with 2 (on S^1) and 3 (on S^2)
/// degrees of freedom to 1e-12 relative at 50 levels in [0.5, 8].
#[test]
fn criterion_1_eec_exactness_for_canonical_fields() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..50 {
        let u = 0.5 + 7.5 * f64::from(k) / 49.0;
        let r1 = rel(eec_sphere(1.0, 1, u).unwrap().value, chi_tail(2, u).unwrap());
        let r2 = rel(eec_sphere(1.0, 2, u).unwrap().value, chi_tail(3, u).unwrap());
        worst = worst.max(r1).max(r2);
    }
    let pass = worst <= 1e-12;
    report(
        "criterion 1 (EC-heuristic exactness)",
        pass,
        &format!("worst relative deviation {worst:.3e} (tolerance 1e-12), {:.2?}", start.elapsed()),
    );
    assert!(pass, "worst relative deviation {worst:e} exceeds 1e-12");
}

/// Criterion 2: mean Euler characteristic of canonical excursion sets on a
/// 4096-vertex fibonacci triangulation of S^2, 10^4 replicates, levels 1.5
/// and 2.0: sample mean within 3 standard errors of 2 rho_0 + 4 pi rho_2;
/// repeating on 8192 vertices must not increase the absolute deviation.
#[test]
fn criterion_2_mean_euler_characteristic() {
    let start = Instant::now();
    let model = CovarianceModel::Canonical;
    let tri_coarse = triangulate_sphere(4096).unwrap();
    let tri_fine = triangulate_sphere(8192).unwrap();
    let mut pass = true;
    let mut lines = Vec::new();
    for u in [1.5, 2.0] {
        let analytic = eec_sphere(1.0, 2, u).unwrap().value;
        let coarse = mean_euler_characteristic(&model, &tri_coarse, u, 10_000, MASTER_SEED).unwrap();
        let fine = mean_euler_characteristic(&model, &tri_fine, u, 10_000, MASTER_SEED).unwrap();
        let dev_coarse = (coarse.estimate - analytic).abs();
        let dev_fine = (fine.estimate - analytic).abs();
        let within = dev_coarse <= 3.0 * coarse.std_error;
        let no_increase = dev_fine <= dev_coarse;
        pass &= within && no_increase;
        lines.push(format!(
            "u={u}: analytic {analytic:.5}, mesh4096 {:.5} (se {:.5}, dev {:.2e}, within-3se {within}), \
             mesh8192 {:.5} (dev {:.2e}, no-increase {no_increase})",
            coarse.estimate, coarse.std_error, dev_coarse, fine.estimate, dev_fine
        ));
    }
    report(
        "criterion 2 (mean Euler characteristic)",
        pass,
        &format!("{}; {:.2?}", lines.join(" | "), start.elapsed()),
    );
    assert!(pass, "{}", lines.join("\n"));
}

/// Criterion 3: empirical excursion probability of the canonical field on
/// S^2 at u = 2 with 4096 fibonacci points and 2 * 10^4 replicates lies in
/// [chi3_tail - 3 sigma - b, chi3_tail + 3 sigma], where b is the
/// empirically measured discretization bias at 4096 points and the bias
/// must shrink by at least 30% when doubling 2048 -> 4096.
///
/// The bias is measured replicate-by-replicate against the exact continuum
/// supremum of the canonical field (the norm of its coefficient vector),
/// with both point sets evaluated on the same realizations (one sample on
/// the union, restricted to each subset).
#[test]
fn criterion_3_excursion_probability_smooth() {
    let start = Instant::now();
    let u = 2.0;
    let replicates = 20_000u64; // the pinned headline run
    let bias_replicates = 200_000u64; // the bias study extends the same stream
    let model = CovarianceModel::Canonical;
    let fine = PointSet::generate(Scheme::Fibonacci, 4096, 2, 0).unwrap();
    let coarse = PointSet::generate(Scheme::Fibonacci, 2048, 2, 0).unwrap();
    let union = fine.union(&coarse).unwrap();

    // one sampling pass on the union; replicate r restricted to the first
    // 4096 indices is exactly the 4096-point run, to the last 2048 the
    // 2048-point run, with common realizations
    let sampler = FieldSampler::new(&model, &union).unwrap();
    assert_eq!(sampler.rank(), 3);
    let mut hits_fine_headline = 0u64;
    let mut bias_fine = 0.0f64;
    let mut bias_coarse = 0.0f64;
    sampler.for_each_replicate(MASTER_SEED, bias_replicates, |r, values| {
        let sup_fine = values[..4096].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sup_coarse = values[4096..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // continuum supremum of the realization: the canonical field sampled
        // through a rank-3 factor is <x, xi> with ||xi|| = ||g||, g being the
        // three standard normals of the replicate's stream
        let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(MASTER_SEED, r));
        let g: [f64; 3] = [
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        ];
        let continuum = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        assert!(sup_fine <= continuum + 1e-12, "grid sup exceeds the continuum sup");
        let cont_hit = continuum >= u;
        let fine_hit = sup_fine >= u;
        let coarse_hit = sup_coarse >= u;
        bias_fine += f64::from(u8::from(cont_hit)) - f64::from(u8::from(fine_hit));
        bias_coarse += f64::from(u8::from(cont_hit)) - f64::from(u8::from(coarse_hit));
        if r < replicates {
            hits_fine_headline += u64::from(fine_hit);
        }
    });
    bias_fine /= bias_replicates as f64;
    bias_coarse /= bias_replicates as f64;

    let n = replicates as f64;
    let estimate = hits_fine_headline as f64 / n;
    let analytic = chi_tail(3, u).unwrap();
    let sigma = (estimate * (1.0 - estimate) / n).sqrt();

    let in_interval =
        estimate >= analytic - 3.0 * sigma - bias_fine && estimate <= analytic + 3.0 * sigma;
    let shrink = bias_fine <= 0.7 * bias_coarse;
    let pass = in_interval && shrink;
    report(
        "criterion 3 (smooth excursion validation)",
        pass,
        &format!(
            "estimate {estimate:.5} vs analytic {analytic:.5} (sigma {sigma:.5}), \
             bias4096 {bias_fine:.2e}, bias2048 {bias_coarse:.2e} (at {bias_replicates} reps), \
             shrink-by-30% {shrink}, interval {in_interval}; {:.2?}",
            start.elapsed()
        ),
    );
    assert!(
        pass,
        "estimate {estimate} analytic {analytic} sigma {sigma} bias_fine {bias_fine} \
         bias_coarse {bias_coarse}"
    );
}

/// Criterion 4: the Pickands approximation is the leading term of the Euler
/// characteristic approximation for the canonical field on S^2: their ratio
/// stays within 5/u^2 of 1 on u in [4, 8].
#[test]
fn criterion_4_pickands_is_the_leading_eec_term() {
    let start = Instant::now();
    let local = LocalExpansion { c: 0.5, alpha: 2.0 };
    let domain = SphericalDomain::full_sphere(2).unwrap();
    let h2 = pickands::known(2.0, 2).unwrap();
    let mut worst = 0.0f64;
    let mut pass = true;
    for k in 0..=40 {
        let u = 4.0 + 4.0 * f64::from(k) / 40.0;
        let p = pickands_sphere(&local, &domain, u, h2).unwrap().value;
        let e = eec_sphere(1.0, 2, u).unwrap().value;
        let dev = (p / e - 1.0).abs();
        let bound = 5.0 / (u * u);
        worst = worst.max(dev * u * u / 5.0);
        pass &= dev <= bound;
    }
    report(
        "criterion 4 (leading-order consistency)",
        pass,
        &format!(
            "worst |ratio - 1| as a fraction of 5/u^2: {worst:.3} on u in [4, 8]; {:.2?}",
            start.elapsed()
        ),
    );
    assert!(pass);
}

/// Criterion 5: the Pickands-constant machinery at alpha = 2.
///
/// Structural part: the drifted-field covariance 2sv on the K = 8,
/// step 0.05 grid factors to rank one with reconstruction error below
/// 1e-10.
///
/// Estimator part, as specified: K = 8, step 0.05, 10^4 replicates must
/// land within 20% of pi^{-1/2} and below it. The estimator is the plain
/// average of (e^M - 1)/K, which is unbiased for every K at alpha = 2 but
/// whose variance at K = 8 is driven by Gaussian draws near sqrt(2) K + 2
/// that 10^4 replicates essentially never contain, so realized estimates
/// concentrate near 25% of the target. The assertion is kept as specified
/// and the measured value is printed.
#[test]
fn criterion_5_pickands_estimator() {
    let start = Instant::now();
    let h2 = pickands::known(2.0, 1).unwrap();

    // structural rank-1 test at 1e-10
    let positions: Vec<f64> = (0..=160).map(|i| i as f64 * 0.05).collect();
    let n = positions.len();
    let cov = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        pickands::drifted_covariance(2.0, positions[i], positions[j])
    });
    let factor = pivoted_cholesky(&cov).unwrap();
    let residual = (&cov - &factor.factor * factor.factor.transpose()).abs().max();
    let structural = factor.rank == 1 && residual <= 1e-10 * cov.abs().max();

    let est = pickands::estimate(2.0, 8.0, 0.05, 10_000, MASTER_SEED).unwrap();
    let below = est.estimate < h2;
    let within = (est.estimate - h2).abs() <= 0.2 * h2;
    let pass = structural && below && within;
    report(
        "criterion 5 (Pickands-constant estimator)",
        pass,
        &format!(
            "rank {} (residual {residual:.2e}) structural {structural}; estimate {:.4} \
             (se {:.4}) vs pi^-1/2 = {h2:.4}: below {below}, within-20% {within}; {:.2?}",
            factor.rank, est.estimate, est.std_error, start.elapsed()
        ),
    );
    assert!(structural, "rank {} residual {residual:e}", factor.rank);
    assert!(below, "estimate {} not below {h2}", est.estimate);
    assert!(
        within,
        "estimate {} outside 20% of {h2}; the naive estimator cannot reach the band at K = 8 \
         (see the repository notes on estimator variance)",
        est.estimate
    );
}

/// Criterion 6: non-smooth trend check. For the powered exponential with
/// c = 1, alpha = 1 on the circle, the ratio of the empirical excursion
/// probability (4096-point grid) to the Pickands approximation at
/// u in {2.5, 3.0} is positive and finite, and moves monotonically toward
/// 1 as the grid doubles 1024 -> 2048 -> 4096. No absolute tolerance:
/// grid-sup bias dominates for alpha < 2.
#[test]
fn criterion_6_non_smooth_trend() {
    let start = Instant::now();
    let replicates = 10_000u64;
    let model = CovarianceModel::powered_exponential(1.0, 1.0).unwrap();
    let local = LocalExpansion { c: 1.0, alpha: 1.0 };
    let circle = SphericalDomain::full_sphere(1).unwrap();
    let h1 = 1.0; // exact literature value of Pickands' constant at alpha = 1
    let points = PointSet::generate(Scheme::LatLong, 4096, 1, 0).unwrap();
    let subsets: Vec<Vec<usize>> = vec![
        (0..4096).step_by(4).collect(),
        (0..4096).step_by(2).collect(),
        (0..4096).collect(),
    ];

    // one factorization and one sampling pass; all subset suprema and both
    // levels are read off the same realizations (nested grids, so the
    // suprema are ordered replicate by replicate)
    let sampler = FieldSampler::new(&model, &points).unwrap();
    let levels = [2.5, 3.0];
    let mut hits = [[0u64; 3]; 2];
    sampler.for_each_replicate(MASTER_SEED, replicates, |_, values| {
        let mut sups = [f64::NEG_INFINITY; 3];
        for (s, subset) in subsets.iter().enumerate() {
            for &i in subset {
                sups[s] = sups[s].max(values[i]);
            }
        }
        assert!(sups[0] <= sups[1] && sups[1] <= sups[2]);
        for (l, &u) in levels.iter().enumerate() {
            for s in 0..3 {
                hits[l][s] += u64::from(sups[s] >= u);
            }
        }
    });

    let mut pass = true;
    let mut lines = Vec::new();
    for (l, &u) in levels.iter().enumerate() {
        let analytic = pickands_sphere(&local, &circle, u, h1).unwrap().value;
        let ratios: Vec<f64> = (0..3)
            .map(|s| hits[l][s] as f64 / replicates as f64 / analytic)
            .collect();
        let positive = ratios.iter().all(|r| r.is_finite() && *r > 0.0);
        let toward_one = (ratios[0] - 1.0).abs() >= (ratios[1] - 1.0).abs()
            && (ratios[1] - 1.0).abs() >= (ratios[2] - 1.0).abs();
        pass &= positive && toward_one;
        lines.push(format!(
            "u={u}: ratios {:.4} -> {:.4} -> {:.4} (positive {positive}, toward-1 {toward_one})",
            ratios[0], ratios[1], ratios[2]
        ));
    }
    report(
        "criterion 6 (non-smooth trend)",
        pass,
        &format!("{}; {:.2?}", lines.join(" | "), start.elapsed()),
    );
    assert!(pass, "{}", lines.join("\n"));
}

/// Criterion 7: identity suites. Compact reruns of the polynomial, distance,
/// quadrature and dual-route identities at their stated tolerances (the
/// `identities` test target of the library crate carries the exhaustive
/// versions).
#[test]
fn criterion_7_identity_suites() {
    use sphex::approx::{chan_lai_box, sfbm_domain_integral};
    use sphex::covariance::{schoenberg_from_monomial, MonomialSeries};
    use sphex::geometry::{distance_expansion, SphericalPoint};
    use sphex::specialfn::{
        gegenbauer, gegenbauer_at_one, gegenbauer_derivative, hermite, ultraspherical,
    };

    let start = Instant::now();

    // derivative identity vs central finite differences at 1e-7
    for n in 1..=20u32 {
        for lambda in [0.0, 0.5, 1.0, 2.0] {
            for t in [-0.7, -0.2, 0.3, 0.8] {
                let h = 1e-6;
                let fd = (ultraspherical(n, lambda, t + h).unwrap()
                    - ultraspherical(n, lambda, t - h).unwrap())
                    / (2.0 * h);
                let an = gegenbauer_derivative(n, lambda, t).unwrap();
                let scale = an.abs().max(gegenbauer_at_one(n, lambda.max(1.0)));
                assert!((fd - an).abs() <= 1e-7 * scale, "derivative n={n} lambda={lambda} t={t}");
            }
        }
    }

    // value at one vs the binomial at 1e-12, and boundedness
    for n in 0..=30u32 {
        for lambda in [0.5, 1.0, 1.5, 2.0] {
            let closed = gegenbauer_at_one(n, lambda);
            assert!(rel(gegenbauer(n, lambda, 1.0).unwrap(), closed) < 1e-12);
            for k in 0..=20 {
                let t = -1.0 + 2.0 * f64::from(k) / 20.0;
                assert!(gegenbauer(n, lambda, t).unwrap().abs() <= closed * (1.0 + 1e-10) + 1e-12);
            }
        }
    }

    // distance expansion ratio within 1e-3 at offsets of norm 1e-3
    {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let theta = vec![rng.random_range(0.2..PI - 0.2), rng.random_range(0.2..PI - 0.2)];
            let d = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
            let norm = (d[0] * d[0] + d[1] * d[1]).sqrt();
            let phi = vec![theta[0] + d[0] / norm * 1e-3, theta[1] + d[1] / norm * 1e-3];
            let (lhs, rhs) = distance_expansion(
                &SphericalPoint::new(theta).unwrap(),
                &SphericalPoint::new(phi).unwrap(),
            )
            .unwrap();
            assert!((lhs / rhs - 1.0).abs() <= 1e-3, "ratio {}", lhs / rhs);
        }
    }

    // Hermite symbolic equivalence up to order 8
    {
        let mut q: Vec<f64> = vec![1.0];
        for j in 0..=8u32 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            for k in 0..=10 {
                let u = -3.0 + 6.0 * f64::from(k) / 10.0;
                let symbolic = sign * q.iter().rev().fold(0.0, |acc, &c| acc * u + c);
                assert!((hermite(j, u) - symbolic).abs() <= 1e-12 * symbolic.abs().max(1.0));
            }
            let mut next = vec![0.0; q.len() + 1];
            for (k, &c) in q.iter().enumerate() {
                if k > 0 {
                    next[k - 1] += k as f64 * c;
                }
                next[k + 1] -= c;
            }
            q = next;
        }
    }

    // SFBM circle integral: closed form log vs quadrature at 1e-10
    {
        let domain = SphericalDomain::coordinate_box(1, vec![(0.4, 2.2)]).unwrap();
        let closed = sfbm_domain_integral(&domain).unwrap();
        let quadrature = sphex::quad::integrate_adaptive(&|t: f64| 1.0 / t, 0.4, 2.2, 1e-12);
        assert!(rel(closed, quadrature) < 1e-10);
    }

    // full-range box route equals the sphere route at 1e-10
    for dim in [1u32, 2, 3] {
        let mut bounds = vec![(0.0, PI); dim as usize];
        bounds[dim as usize - 1] = (0.0, 2.0 * PI);
        let boxd = SphericalDomain::coordinate_box(dim, bounds).unwrap();
        let sphere = SphericalDomain::full_sphere(dim).unwrap();
        let local = LocalExpansion { c: 0.8, alpha: 1.5 };
        let a = chan_lai_box(&local, &boxd, 2.5, 1.0).unwrap().value;
        let b = pickands_sphere(&local, &sphere, 2.5, 1.0).unwrap().value;
        assert!(rel(a, b) < 1e-10, "N={dim}");
    }

    // C' dual-route agreement at 1e-10
    for dim in [1u32, 2, 3, 4] {
        let mono = MonomialSeries::new(vec![0.1, 0.3, 0.25, 0.2, 0.1, 0.05]).unwrap();
        let direct = CovarianceModel::Monomial(mono.clone())
            .smoothness(dim)
            .unwrap()
            .cprime
            .unwrap();
        let series = schoenberg_from_monomial(&mono, dim).unwrap().into_series().unwrap();
        let via = CovarianceModel::Schoenberg(series).smoothness(dim).unwrap().cprime.unwrap();
        assert!(rel(direct, via) < 1e-10, "dim {dim}");
    }

    report(
        "criterion 7 (identity suites)",
        true,
        &format!("all identities within stated tolerances; {:.2?}", start.elapsed()),
    );
}

/// Criterion 8: a simulate run repeated with the same seed produces an
/// identical canonical payload digest.
#[test]
fn criterion_8_reproducibility() {
    let start = Instant::now();
    let dir = std::env::temp_dir().join("sphex-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let model_path = dir.join("canonical.json");
    std::fs::write(&model_path, r#"{"version": 1, "kind": "canonical", "dimension": 2}"#)
        .unwrap();
    let out_a = dir.join("run-a.json");
    let out_b = dir.join("run-b.json");

    for out in [&out_a, &out_b] {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_sphex"))
            .args([
                "simulate",
                "--model",
                model_path.to_str().unwrap(),
                "--levels",
                "1.5,2.5",
                "--points",
                "256",
                "--scheme",
                "fibonacci",
                "--replicates",
                "500",
                "--seed",
                "99",
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }

    let digest = |path: &std::path::Path| -> String {
        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        doc["provenance"]["payload_digest"].as_str().unwrap().to_string()
    };
    let (da, db) = (digest(&out_a), digest(&out_b));
    let pass = da == db;
    report(
        "criterion 8 (reproducibility)",
        pass,
        &format!("digest {da} == {db}: {pass}; {:.2?}", start.elapsed()),
    );
    assert_eq!(da, db);
}
