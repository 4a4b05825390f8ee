//! Monte Carlo validation: exact sampling of the canonical field on a
//! fibonacci point set, empirical excursion probabilities, and the mean
//! Euler characteristic of excursion sets against the analytic value.

use sphex::approx::eec_sphere;
use sphex::covariance::CovarianceModel;
use sphex::mcsim::{
    empirical_excursion, mean_euler_characteristic, triangulate_sphere, PointSet, Scheme,
};
use sphex::specialfn::chi_tail;

fn main() {
    let model = CovarianceModel::Canonical;
    let points = PointSet::generate(Scheme::Fibonacci, 1024, 2, 0).unwrap();

    println!("empirical P(sup >= u) on 1024 points, 4000 replicates:");
    for u in [1.5, 2.0, 2.5] {
        let est = empirical_excursion(&model, &points, u, 4000, 42).unwrap();
        let exact = chi_tail(3, u).unwrap();
        println!(
            "  u = {u}: {:.4} +- {:.4}   (continuum value {:.4})",
            est.estimate, est.std_error, exact
        );
    }

    let tri = triangulate_sphere(1024).unwrap();
    println!(
        "mesh: V = {}, E = {}, F = {}, V - E + F = {}",
        tri.vertex_count(),
        tri.edge_count(),
        tri.face_count(),
        tri.vertex_count() as i64 - tri.edge_count() as i64 + tri.face_count() as i64
    );
    println!("mean Euler characteristic of the excursion set:");
    for u in [1.5, 2.0] {
        let est = mean_euler_characteristic(&model, &tri, u, 4000, 42).unwrap();
        let analytic = eec_sphere(1.0, 2, u).unwrap().value;
        println!(
            "  u = {u}: {:.4} +- {:.4}   (analytic E[chi] {:.4})",
            est.estimate, est.std_error, analytic
        );
    }
}
