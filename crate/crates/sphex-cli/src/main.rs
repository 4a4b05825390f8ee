//! `sphex`: excursion probabilities of Gaussian random fields on spheres.
//!
//! Subcommands: `approx` (analytic approximations), `simulate` (Monte Carlo
//! excursion probabilities), `validate` (analytic vs Monte Carlo report),
//! `pickands` (Pickands' constant), `curvatures` (Lipschitz-Killing
//! curvatures of a domain).
//!
//! Exit codes: 0 success, 2 input/validation error, 3 method/model mismatch,
//! 4 numerical failure.

mod envelope;
mod spec;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use sphex::approx::{self, ApproxResult};
use sphex::covariance::CovarianceModel;
use sphex::geometry::SphericalDomain;
use sphex::mcsim::{self, excursion_estimate_at, mean_estimate_from, PointSet, Scheme};
use sphex::pickands;

use envelope::{emit, emit_csv, Envelope};
use spec::{DomainSpec, ModelSpecFile};

/// Error with the process exit code it maps to.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }
}

impl From<sphex::Error> for CliError {
    fn from(e: sphex::Error) -> Self {
        let code = match &e {
            sphex::Error::InvalidInput(_) => 2,
            sphex::Error::MethodMismatch(_) => 3,
            sphex::Error::Numerical(_) => 4,
        };
        CliError { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "sphex", version, about = "Excursion probabilities of Gaussian fields on spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic excursion-probability approximations.
    Approx {
        /// Model specification file (JSON, schema v1).
        #[arg(long)]
        model: String,
        /// Domain spec: inline JSON or @file.
        #[arg(long, default_value = r#"{"kind": "sphere"}"#)]
        domain: String,
        /// Levels u, comma separated.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<f64>,
        /// auto, pickands, eec or sfbm.
        #[arg(long, default_value = "auto")]
        method: String,
        /// Pickands constant H_alpha for routes that need one (alpha != 2).
        #[arg(long)]
        pickands_const: Option<f64>,
        #[arg(long)]
        out: Option<String>,
        /// json or csv.
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Monte Carlo estimation of P{sup >= u} on a spherical point set.
    Simulate {
        #[arg(long)]
        model: String,
        #[arg(long, value_delimiter = ',')]
        levels: Vec<f64>,
        /// Number of points.
        #[arg(long, default_value_t = 4096)]
        points: usize,
        /// fibonacci, latlong or uniform-random.
        #[arg(long, default_value = "fibonacci")]
        scheme: String,
        #[arg(long)]
        replicates: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, default_value = "json")]
        format: String,
        /// Write replicate-level data (replicate, seed, statistic, level) here.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Analytic-vs-Monte-Carlo comparison report.
    Validate {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = r#"{"kind": "sphere"}"#)]
        domain: String,
        #[arg(long, value_delimiter = ',')]
        levels: Vec<f64>,
        #[arg(long)]
        replicates: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4096)]
        points: usize,
        #[arg(long, default_value = "fibonacci")]
        scheme: String,
        #[arg(long)]
        pickands_const: Option<f64>,
        #[arg(long)]
        out: Option<String>,
        /// Plot data (u, analytic, empirical, ci_lo, ci_hi) as CSV.
        #[arg(long)]
        plot_csv: Option<String>,
    },
    /// Pickands' constant: exact at alpha = 2, Monte Carlo otherwise.
    Pickands {
        #[arg(long)]
        alpha: f64,
        /// Grid box [0, K].
        #[arg(long, default_value_t = 8.0)]
        box_size: f64,
        /// Grid step (must divide the box size).
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 10_000)]
        replicates: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sphere dimension N in H_alpha = pi^{-N/2} (with --exact).
        #[arg(long, default_value_t = 1)]
        dimension: u32,
        /// Return the exact value instead of simulating.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Lipschitz-Killing curvatures of a domain.
    Curvatures {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, default_value = "json")]
        format: String,
    },
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sphex: {}", e.message);
            std::process::ExitCode::from(e.code)
        }
    }
}

fn parse_levels(levels: &[f64]) -> Result<Vec<f64>, CliError> {
    if levels.is_empty() {
        return Err(CliError::input("at least one level is required (--levels)"));
    }
    if let Some(bad) = levels.iter().find(|u| !u.is_finite()) {
        return Err(CliError::input(format!("levels must be finite, got {bad}")));
    }
    Ok(levels.to_vec())
}

fn parse_scheme(name: &str) -> Result<Scheme, CliError> {
    match name {
        "fibonacci" => Ok(Scheme::Fibonacci),
        "latlong" => Ok(Scheme::LatLong),
        "uniform-random" => Ok(Scheme::UniformRandom),
        other => Err(CliError::input(format!(
            "unknown scheme '{other}' (expected fibonacci, latlong or uniform-random)"
        ))),
    }
}

/// Loads and validates a model file; returns the normalized model, its
/// dimension and any diagnostics (e.g. a rescaling notice).
fn load_model(path: &str) -> Result<(CovarianceModel, u32, Vec<String>, ModelSpecFile), CliError> {
    let file = ModelSpecFile::load(path)?;
    let model = file.build()?;
    let report = model.validate(file.dimension).map_err(CliError::from)?;
    let (model, _) = model.normalized();
    Ok((model, file.dimension, report.diagnostics, file))
}

enum Route {
    Eec,
    Pickands,
    Sfbm,
}

fn resolve_route(method: &str, model: &CovarianceModel, dimension: u32) -> Result<Route, CliError> {
    match method {
        "eec" => Ok(Route::Eec),
        "pickands" => Ok(Route::Pickands),
        "sfbm" => Ok(Route::Sfbm),
        "auto" => {
            if matches!(model, CovarianceModel::Sfbm { .. }) {
                return Ok(Route::Sfbm);
            }
            let report = model.smoothness(dimension).map_err(CliError::from)?;
            match report.cprime {
                Some(cp) if cp > 0.0 => Ok(Route::Eec),
                _ => Ok(Route::Pickands),
            }
        }
        other => Err(CliError::input(format!(
            "unknown method '{other}' (expected auto, pickands, eec or sfbm)"
        ))),
    }
}

/// One analytic approximation at one level, on the resolved route.
fn approximate(
    route: &Route,
    model: &CovarianceModel,
    dimension: u32,
    domain: &SphericalDomain,
    u: f64,
    pickands_const: Option<f64>,
) -> Result<ApproxResult, CliError> {
    match route {
        Route::Eec => {
            let report = model.smoothness(dimension).map_err(CliError::from)?;
            let cprime = report.cprime.unwrap_or(f64::INFINITY);
            match domain {
                SphericalDomain::FullSphere { dimension } => {
                    approx::eec_sphere(cprime, *dimension, u).map_err(CliError::from)
                }
                other => {
                    let lk = other.lk_curvatures().map_err(CliError::from)?;
                    approx::eec_domain(cprime, &lk, u).map_err(CliError::from)
                }
            }
        }
        Route::Pickands => {
            let local = model.local_expansion(dimension).map_err(CliError::from)?;
            let constant = match pickands_const {
                Some(h) => h,
                None => pickands::known(local.alpha, dimension).ok_or_else(|| {
                    CliError::input(format!(
                        "no exact Pickands constant for alpha = {}; pass --pickands-const \
                         (estimate one with `sphex pickands --alpha {}`)",
                        local.alpha, local.alpha
                    ))
                })?,
            };
            approx::pickands_sphere(&local, domain, u, constant).map_err(CliError::from)
        }
        Route::Sfbm => {
            let CovarianceModel::Sfbm { beta } = model else {
                return Err(CliError::mismatch(
                    "the sfbm method applies to sfbm models only",
                ));
            };
            let constant = pickands_const.ok_or_else(|| {
                CliError::input(format!(
                    "the sfbm route needs H_{} via --pickands-const \
                     (estimate it with `sphex pickands --alpha {}`)",
                    2.0 * beta,
                    2.0 * beta
                ))
            })?;
            approx::sfbm_pickands(*beta, domain, u, constant).map_err(CliError::from)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Approx { model, domain, levels, method, pickands_const, out, format } => {
            let levels = parse_levels(&levels)?;
            let (cov, dimension, diagnostics, file) = load_model(&model)?;
            let domain_spec = DomainSpec::parse(&domain)?;
            let dom = domain_spec.build(Some(dimension))?;
            let route = resolve_route(&method, &cov, dimension)?;
            let results: Vec<ApproxResult> = levels
                .iter()
                .map(|&u| approximate(&route, &cov, dimension, &dom, u, pickands_const))
                .collect::<Result<_, _>>()?;
            let config = json!({
                "model": file,
                "domain": domain_spec,
                "levels": levels,
                "method": method,
                "pickands_const": pickands_const,
            });
            let doc = Envelope {
                command: "approx",
                config,
                results: serde_json::to_value(&results).expect("serializable"),
                diagnostics,
                seed: None,
            }
            .render();
            match format.as_str() {
                "json" => emit(&doc, out.as_deref()),
                "csv" => {
                    let rows: Vec<String> = results
                        .iter()
                        .map(|r| format!("{},{:?},{}", r.level, r.method, r.value))
                        .collect();
                    emit_csv("u,method,value", &rows, out.as_deref())
                }
                other => Err(CliError::input(format!("unknown format '{other}'"))),
            }
        }

        Command::Simulate { model, levels, points, scheme, replicates, seed, out, format, csv } => {
            let levels = parse_levels(&levels)?;
            if replicates == 0 {
                return Err(CliError::input("replicates must be >= 1"));
            }
            let (cov, dimension, diagnostics, file) = load_model(&model)?;
            let scheme_kind = parse_scheme(&scheme)?;
            let set = PointSet::generate(scheme_kind, points, dimension, seed)
                .map_err(CliError::from)?;
            let records = mcsim::replicate_suprema(&cov, &set, None, replicates, seed)
                .map_err(CliError::from)?;
            let note = format!(
                "grid supremum over {points} points; downward discretization bias not corrected"
            );
            let estimates: Vec<_> =
                levels.iter().map(|&u| excursion_estimate_at(&records, u, note.clone())).collect();
            if let Some(path) = csv {
                let rows: Vec<String> = records
                    .iter()
                    .map(|r| format!("{},{},{},", r.index, r.seed, r.value))
                    .collect();
                emit_csv("replicate,seed,statistic,level", &rows, Some(&path))?;
            }
            let config = json!({
                "model": file,
                "levels": levels,
                "points": points,
                "scheme": scheme,
                "replicates": replicates,
                "seed": seed,
            });
            let doc = Envelope {
                command: "simulate",
                config,
                results: serde_json::to_value(&estimates).expect("serializable"),
                diagnostics,
                seed: Some(seed),
            }
            .render();
            match format.as_str() {
                "json" => emit(&doc, out.as_deref()),
                "csv" => {
                    let rows: Vec<String> = estimates
                        .iter()
                        .map(|e| format!("{},{},{}", e.level, e.estimate, e.std_error))
                        .collect();
                    emit_csv("u,estimate,std_error", &rows, out.as_deref())
                }
                other => Err(CliError::input(format!("unknown format '{other}'"))),
            }
        }

        Command::Validate {
            model,
            domain,
            levels,
            replicates,
            seed,
            points,
            scheme,
            pickands_const,
            out,
            plot_csv,
        } => {
            let levels = parse_levels(&levels)?;
            if replicates == 0 {
                return Err(CliError::input("replicates must be >= 1"));
            }
            let (cov, dimension, mut diagnostics, file) = load_model(&model)?;
            let domain_spec = DomainSpec::parse(&domain)?;
            let dom = domain_spec.build(Some(dimension))?;
            let route = resolve_route("auto", &cov, dimension)?;
            let scheme_kind = parse_scheme(&scheme)?;

            // Monte Carlo side: supremum over a point set covering the domain.
            // Point sets cover the full sphere; restrict comparisons to
            // full-sphere domains where the two sides match.
            if !matches!(dom, SphericalDomain::FullSphere { .. }) {
                diagnostics.push(
                    "validation samples the full sphere; analytic values for sub-domains are \
                     reported against full-sphere suprema"
                        .to_string(),
                );
            }
            let set = PointSet::generate(scheme_kind, points, dimension, seed)
                .map_err(CliError::from)?;
            let sup_records = mcsim::replicate_suprema(&cov, &set, None, replicates, seed)
                .map_err(CliError::from)?;

            let smooth = cov
                .smoothness(dimension)
                .map_err(CliError::from)?
                .cprime
                .map(|c| c > 0.0)
                .unwrap_or(false);
            let trend_note = if smooth {
                ""
            } else {
                "; non-smooth model: grid-sup bias is severe, comparison is trend-only"
            };

            // Euler characteristic comparison on a fibonacci triangulation of
            // S^2 for smooth models: the analytic side is exactly E[chi].
            let ec_side = if smooth
                && dimension == 2
                && matches!(dom, SphericalDomain::FullSphere { .. })
                && scheme_kind == Scheme::Fibonacci
            {
                let tri =
                    mcsim::convex_hull_triangulation(set.clone()).map_err(CliError::from)?;
                let mut per_level = Vec::new();
                for &u in &levels {
                    let recs =
                        mcsim::replicate_euler_characteristics(&cov, &tri, u, replicates, seed)
                            .map_err(CliError::from)?;
                    per_level.push(mean_estimate_from(&recs, u, tri.vertex_count()));
                }
                Some(per_level)
            } else {
                None
            };

            let mut rows = Vec::new();
            let mut plot_rows = Vec::new();
            for (i, &u) in levels.iter().enumerate() {
                let analytic = approximate(&route, &cov, dimension, &dom, u, pickands_const)?;
                let sup_est = excursion_estimate_at(
                    &sup_records,
                    u,
                    format!("grid sup over {points} points{trend_note}"),
                );
                let z_sup = (sup_est.estimate - analytic.value)
                    / sup_est.std_error.max(f64::MIN_POSITIVE);
                rows.push(json!({
                    "u": u,
                    "kind": "sup-probability",
                    "analytic": analytic.value,
                    "mc_estimate": sup_est.estimate,
                    "mc_std_error": sup_est.std_error,
                    "z": z_sup,
                    "note": sup_est.note,
                }));
                plot_rows.push(format!(
                    "{},{},{},{},{}",
                    u,
                    analytic.value,
                    sup_est.estimate,
                    sup_est.estimate - 1.96 * sup_est.std_error,
                    sup_est.estimate + 1.96 * sup_est.std_error
                ));
                if let Some(ec) = &ec_side {
                    let est = &ec[i];
                    let z = (est.estimate - analytic.value)
                        / est.std_error.max(f64::MIN_POSITIVE);
                    rows.push(json!({
                        "u": u,
                        "kind": "mean-euler-characteristic",
                        "analytic": analytic.value,
                        "mc_estimate": est.estimate,
                        "mc_std_error": est.std_error,
                        "z": z,
                        "note": est.note,
                    }));
                }
            }

            if let Some(path) = plot_csv {
                emit_csv("u,analytic,empirical,ci_lo,ci_hi", &plot_rows, Some(&path))?;
            }
            let config = json!({
                "model": file,
                "domain": domain_spec,
                "levels": levels,
                "replicates": replicates,
                "seed": seed,
                "points": points,
                "scheme": scheme,
                "pickands_const": pickands_const,
            });
            let doc = Envelope {
                command: "validate",
                config,
                results: Value::Array(rows),
                diagnostics,
                seed: Some(seed),
            }
            .render();
            emit(&doc, out.as_deref())
        }

        Command::Pickands {
            alpha,
            box_size,
            step,
            replicates,
            seed,
            dimension,
            exact,
            out,
        } => {
            if !(alpha > 0.0 && alpha <= 2.0) {
                return Err(CliError::input(format!("alpha = {alpha} outside (0, 2]")));
            }
            let (results, used_seed) = if exact {
                let value = pickands::known(alpha, dimension).ok_or_else(|| {
                    CliError::input(format!(
                        "no exact Pickands constant is known for alpha = {alpha}; \
                         drop --exact to estimate"
                    ))
                })?;
                (json!([{ "kind": "exact", "alpha": alpha, "dimension": dimension, "value": value }]), None)
            } else {
                let est = pickands::estimate(alpha, box_size, step, replicates, seed)
                    .map_err(CliError::from)?;
                (serde_json::to_value(vec![est]).expect("serializable"), Some(seed))
            };
            let config = json!({
                "alpha": alpha,
                "box_size": box_size,
                "step": step,
                "replicates": replicates,
                "seed": seed,
                "dimension": dimension,
                "exact": exact,
            });
            let doc = Envelope {
                command: "pickands",
                config,
                results,
                diagnostics: if exact {
                    vec![]
                } else {
                    vec![
                        "grid and finite-box truncation both bias the estimate downward".into(),
                    ]
                },
                seed: used_seed,
            }
            .render();
            emit(&doc, out.as_deref())
        }

        Command::Curvatures { domain, out, format } => {
            let domain_spec = DomainSpec::parse(&domain)?;
            let dom = domain_spec.build(None)?;
            let lk = dom.lk_curvatures().map_err(CliError::from)?;
            let config = json!({ "domain": domain_spec });
            let doc = Envelope {
                command: "curvatures",
                config,
                results: serde_json::to_value(&lk).expect("serializable"),
                diagnostics: vec![],
                seed: None,
            }
            .render();
            match format.as_str() {
                "json" => emit(&doc, out.as_deref()),
                "csv" => {
                    let rows: Vec<String> =
                        lk.0.iter().enumerate().map(|(j, v)| format!("{j},{v}")).collect();
                    emit_csv("j,lk", &rows, out.as_deref())
                }
                other => Err(CliError::input(format!("unknown format '{other}'"))),
            }
        }
    }
}
