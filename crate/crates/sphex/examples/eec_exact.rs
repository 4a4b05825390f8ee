//! The expected-Euler-characteristic approximation is exact for the
//! canonical field: on S^1 it reproduces the chi tail with 2 degrees of
//! freedom, on S^2 with 3.

use sphex::approx::eec_sphere;
use sphex::specialfn::chi_tail;

fn main() {
    println!("{:>5} {:>14} {:>14} {:>10}", "u", "eec(S^2)", "chi3 tail", "rel diff");
    for u in [1.0, 2.0, 3.0, 4.0, 6.0, 8.0] {
        let approx = eec_sphere(1.0, 2, u).unwrap();
        let exact = chi_tail(3, u).unwrap();
        println!(
            "{u:>5} {:>14.6e} {exact:>14.6e} {:>10.1e}",
            approx.value,
            (approx.value - exact).abs() / exact
        );
    }

    // the per-term breakdown: j = 0 (tail), j = 1 (zero on S^2), j = 2
    let r = eec_sphere(1.0, 2, 2.0).unwrap();
    for term in &r.terms {
        println!("term {}: {:.6}", term.label, term.value);
    }
}
