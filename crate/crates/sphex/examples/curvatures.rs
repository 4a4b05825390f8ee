//! Lipschitz-Killing curvatures of spheres and preset subsets, and the
//! Euler characteristic approximation over a sub-domain.

use sphex::approx::eec_domain;
use sphex::geometry::{lk_sphere, SphericalDomain};

fn main() {
    for n in 1..=4 {
        println!("L(S^{n}) = {:?}", lk_sphere(n).0);
    }

    let half_circle = SphericalDomain::semisphere(1).unwrap();
    let half_sphere = SphericalDomain::semisphere(2).unwrap();
    println!("L(semisphere dim 1) = {:?}", half_circle.lk_curvatures().unwrap().0);
    println!("L(semisphere dim 2) = {:?}", half_sphere.lk_curvatures().unwrap().0);

    // excursion probability of a unit-C' smooth field over the half sphere
    for u in [2.0, 3.0, 4.0] {
        let r = eec_domain(1.0, &half_sphere.lk_curvatures().unwrap(), u).unwrap();
        println!("P(sup over semisphere >= {u}) ~ {:.6e}", r.value);
    }

    // areas come from the same machinery
    println!("area of a polar cap of radius 1 on S^2: {:.6}",
        SphericalDomain::cap(2, None, 1.0).unwrap().area());
}
