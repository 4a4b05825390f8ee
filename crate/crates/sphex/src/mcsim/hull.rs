//! Convex hull triangulation of point sets on the unit 2-sphere.
//!
//! Every point of a spherical point set is extreme, so the hull of the set
//! is a closed genus-0 triangulated surface whose vertex set is exactly the
//! input: the spherical Delaunay triangulation. The construction is the
//! classic incremental algorithm: keep an oriented face list, find the faces
//! visible from the next point, delete them and fan the horizon.

use crate::error::{Error, Result};

/// Faces as outward-oriented index triples plus the undirected edge list.
pub type Triangulation = (Vec<[usize; 3]>, Vec<[usize; 2]>);

/// Visibility threshold for the signed volume test. Face triangles of a
/// well-spread n-point set have determinants around `(4 pi / n)^2`, far
/// above this.
const VISIBILITY_EPS: f64 = 1e-12;

#[derive(Clone, Copy)]
struct Face {
    v: [usize; 3],
    alive: bool,
}

fn sub(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Signed volume of the tetrahedron (a, b, c, p); positive when `p` is on
/// the outward side of the oriented face (a, b, c).
fn orient(points: &[[f64; 3]], f: &[usize; 3], p: usize) -> f64 {
    let a = &points[f[0]];
    det3(
        sub(&points[f[1]], a),
        sub(&points[f[2]], a),
        sub(&points[p], a),
    )
}

/// Triangulates the hull of `points` (unit vectors in R^3, at least 4, in
/// general position). Returns faces as index triples oriented outward and
/// the undirected edge list.
pub fn hull_triangulation(points: &[[f64; 3]]) -> Result<Triangulation> {
    let n = points.len();
    if n < 4 {
        return Err(Error::invalid(format!("hull needs at least 4 points, got {n}")));
    }

    // initial tetrahedron: spread-out quadruple in general position
    let p0 = 0;
    let p1 = (1..n)
        .max_by(|&i, &j| {
            let di: f64 = sub(&points[i], &points[p0]).iter().map(|x| x * x).sum();
            let dj: f64 = sub(&points[j], &points[p0]).iter().map(|x| x * x).sum();
            di.partial_cmp(&dj).unwrap()
        })
        .unwrap();
    let p2 = (0..n)
        .filter(|&i| i != p0 && i != p1)
        .max_by(|&i, &j| {
            let cr = |k: usize| {
                let u = sub(&points[p1], &points[p0]);
                let v = sub(&points[k], &points[p0]);
                let c = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                c.iter().map(|x| x * x).sum::<f64>()
            };
            cr(i).partial_cmp(&cr(j)).unwrap()
        })
        .ok_or_else(|| Error::invalid("degenerate point set"))?;
    let p3 = (0..n)
        .filter(|&i| i != p0 && i != p1 && i != p2)
        .max_by(|&i, &j| {
            let vi = orient(points, &[p0, p1, p2], i).abs();
            let vj = orient(points, &[p0, p1, p2], j).abs();
            vi.partial_cmp(&vj).unwrap()
        })
        .ok_or_else(|| Error::invalid("degenerate point set"))?;
    if orient(points, &[p0, p1, p2], p3).abs() <= VISIBILITY_EPS {
        return Err(Error::numerical("initial tetrahedron is numerically flat"));
    }

    let mut faces: Vec<Face> = Vec::with_capacity(2 * n);
    let (a, b, c, d) = if orient(points, &[p0, p1, p2], p3) < 0.0 {
        (p0, p1, p2, p3)
    } else {
        (p0, p2, p1, p3)
    };
    // oriented so that d (and the origin) lie inside
    for f in [[a, b, c], [a, c, d], [c, b, d], [b, a, d]] {
        faces.push(Face { v: f, alive: true });
    }

    let used = [p0, p1, p2, p3];
    for p in 0..n {
        if used.contains(&p) {
            continue;
        }
        let mut visible: Vec<usize> = Vec::new();
        for (fi, f) in faces.iter().enumerate() {
            if f.alive && orient(points, &f.v, p) > VISIBILITY_EPS {
                visible.push(fi);
            }
        }
        if visible.is_empty() {
            return Err(Error::numerical(format!(
                "point {p} sees no hull face; the point set is degenerate (duplicate or \
                 numerically interior point)"
            )));
        }
        // horizon: directed edges of visible faces whose opposite directed
        // edge belongs to no visible face
        use std::collections::HashSet;
        let mut directed: HashSet<(usize, usize)> = HashSet::new();
        for &fi in &visible {
            let [v0, v1, v2] = faces[fi].v;
            for e in [(v0, v1), (v1, v2), (v2, v0)] {
                directed.insert(e);
            }
        }
        let mut horizon: Vec<(usize, usize)> = directed
            .iter()
            .filter(|&&(x, y)| !directed.contains(&(y, x)))
            .cloned()
            .collect();
        horizon.sort_unstable(); // deterministic face order
        for &fi in &visible {
            faces[fi].alive = false;
        }
        for (x, y) in horizon {
            faces.push(Face { v: [x, y, p], alive: true });
        }
    }

    let final_faces: Vec<[usize; 3]> = faces.iter().filter(|f| f.alive).map(|f| f.v).collect();

    // edges, with the two-faces-per-edge manifold check
    use std::collections::HashMap;
    let mut edge_count: HashMap<[usize; 2], u32> = HashMap::new();
    for f in &final_faces {
        for (x, y) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            let key = if x < y { [x, y] } else { [y, x] };
            *edge_count.entry(key).or_insert(0) += 1;
        }
    }
    if let Some((e, &c)) = edge_count.iter().find(|(_, &c)| c != 2) {
        return Err(Error::numerical(format!(
            "edge {e:?} borders {c} faces; hull construction failed"
        )));
    }
    let mut edges: Vec<[usize; 2]> = edge_count.into_keys().collect();
    edges.sort_unstable();

    let v = n as i64;
    let e = edges.len() as i64;
    let f = final_faces.len() as i64;
    if v - e + f != 2 {
        return Err(Error::numerical(format!(
            "Euler formula violated: V={v} E={e} F={f}"
        )));
    }
    Ok((final_faces, edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn icosahedron() -> Vec<[f64; 3]> {
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let norm = (1.0 + phi * phi).sqrt();
        let mut pts = Vec::new();
        for &(a, b) in &[(1.0, phi), (1.0, -phi), (-1.0, phi), (-1.0, -phi)] {
            pts.push([0.0, a / norm, b / norm]);
            pts.push([a / norm, b / norm, 0.0]);
            pts.push([b / norm, 0.0, a / norm]);
        }
        pts
    }

    #[test]
    fn icosahedron_counts() {
        let pts = icosahedron();
        let (faces, edges) = hull_triangulation(&pts).unwrap();
        assert_eq!(pts.len(), 12);
        assert_eq!(edges.len(), 30);
        assert_eq!(faces.len(), 20);
    }

    #[test]
    fn tetrahedron_counts() {
        let s = 1.0 / 3.0f64.sqrt();
        let pts = vec![
            [s, s, s],
            [s, -s, -s],
            [-s, s, -s],
            [-s, -s, s],
        ];
        let (faces, edges) = hull_triangulation(&pts).unwrap();
        assert_eq!(faces.len(), 4);
        assert_eq!(edges.len(), 6);
    }

    #[test]
    fn faces_are_oriented_outward() {
        let pts = icosahedron();
        let (faces, _) = hull_triangulation(&pts).unwrap();
        for f in &faces {
            // origin strictly inside: det(a, b, c) > 0
            let d = det3(
                [pts[f[0]][0], pts[f[0]][1], pts[f[0]][2]],
                [pts[f[1]][0], pts[f[1]][1], pts[f[1]][2]],
                [pts[f[2]][0], pts[f[2]][1], pts[f[2]][2]],
            );
            assert!(d > 0.0, "face {f:?} has determinant {d}");
        }
    }

    #[test]
    fn too_few_points_rejected() {
        let pts = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(hull_triangulation(&pts).is_err());
    }
}
