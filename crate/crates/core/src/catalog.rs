//! Small named triangulations.

use crate::simplicial::{SimplicialComplex, Vertex};

/// Boundary of the (n+1)-simplex, an n-sphere on n+2 vertices.
pub fn sphere(n: usize) -> SimplicialComplex {
    SimplicialComplex::boundary_of_simplex(n + 1)
}

/// The 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7.
pub fn torus7() -> SimplicialComplex {
    let t = |i: Vertex, a: Vertex, b: Vertex| vec![i, (i + a) % 7, (i + b) % 7];
    SimplicialComplex::new((0..7).flat_map(|i| [t(i, 1, 3), t(i, 2, 3)]))
}

/// The 6-vertex real projective plane.
pub fn rp2() -> SimplicialComplex {
    SimplicialComplex::new(vec![
        vec![0, 1, 2],
        vec![0, 2, 3],
        vec![0, 3, 4],
        vec![0, 4, 5],
        vec![0, 1, 5],
        vec![1, 2, 4],
        vec![2, 3, 5],
        vec![1, 3, 4],
        vec![2, 4, 5],
        vec![1, 3, 5],
    ])
}

pub fn by_name(name: &str) -> Option<SimplicialComplex> {
    match name {
        "torus7" => Some(torus7()),
        "rp2" => Some(rp2()),
        _ => name
            .strip_prefix('s')
            .and_then(|d| d.parse().ok())
            .filter(|&d| d <= 12)
            .map(sphere),
    }
}
