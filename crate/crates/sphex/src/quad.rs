//! One-dimensional Gauss-Legendre quadrature used for spherical areas and the
//! domain integrals of the approximation formulas.

/// Nodes of the 8-point Gauss-Legendre rule on [-1, 1] (positive half).
const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

/// Weights matching [`GL8_NODES`].
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss-Legendre rule with `panels` equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            acc += w * (f(mid + half * x) + f(mid - half * x));
        }
        total += acc * half;
    }
    total
}

/// Adaptive variant: doubles the panel count until two successive composite
/// rules agree to `rel_tol` (or an absolute floor for integrals near zero).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let mut panels = 8;
    let mut prev = integrate(f, a, b, panels);
    for _ in 0..12 {
        panels *= 2;
        let next = integrate(f, a, b, panels);
        if (next - prev).abs() <= rel_tol * next.abs().max(1e-300) + 1e-15 {
            return next;
        }
        prev = next;
    }
    prev
}
