//! Classifying covariance models: smoothness, the second-spectral-moment
//! constant C', and the local expansion C = 1 - c d^alpha (1 + o(1)).

use sphex::covariance::{CovarianceModel, MonomialSeries, SchoenbergSeries};

fn main() {
    let models = vec![
        CovarianceModel::Canonical,
        CovarianceModel::ArccosLinear,
        CovarianceModel::powered_exponential(1.0, 1.0).unwrap(),
        CovarianceModel::sine(1.0, 1.5).unwrap(),
        CovarianceModel::Schoenberg(SchoenbergSeries::new(2, vec![0.0, 0.6, 0.4]).unwrap()),
        CovarianceModel::Monomial(MonomialSeries::new(vec![0.25, 0.5, 0.25]).unwrap()),
        CovarianceModel::sfbm(0.25).unwrap(),
    ];

    for model in models {
        let (model, variance) = model.normalized();
        let report = model.smoothness(2).unwrap();
        print!("{:<32} class {:?}", model.id(), report.class);
        if variance != 1.0 {
            print!(" (rescaled by 1/{variance})");
        }
        match report.cprime {
            Some(cp) => print!(", C' = {cp:.6}"),
            None => print!(", C' infinite"),
        }
        match model.local_expansion(2) {
            Ok(le) => println!(", local 1 - {:.4} d^{}", le.c, le.alpha),
            Err(_) => println!(", no single local expansion"),
        }
    }
}
