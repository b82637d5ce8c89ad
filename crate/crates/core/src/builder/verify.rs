//! Checks that a complex is a homology 4-sphere bounding a given 5-complex.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{homology_all, HomologyGroup};
use crate::simplicial::{Simplex, SimplicialComplex, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// A witness of the failure, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub dim: isize,
    pub f_vector: Vec<u64>,
    pub euler_characteristic: i64,
    pub homology: Vec<HomologyGroup>,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: &str, failure: Option<String>) -> Check {
    Check {
        name: name.to_string(),
        passed: failure.is_none(),
        certificate: failure,
    }
}

/// Homology of a d-sphere: ℤ in degrees 0 and d, nothing else.
pub fn is_sphere_homology(h: &[HomologyGroup], d: usize) -> bool {
    h.len() == d + 1
        && h.iter()
            .enumerate()
            .all(|(i, g)| g.torsion.is_empty() && g.betti == usize::from(i == 0 || i == d))
}

fn link_failure(k: &SimplicialComplex, v: Vertex, d: usize) -> Option<String> {
    let l = match k.link(&Simplex::from([v])) {
        Ok(l) => l,
        Err(e) => return Some(format!("vertex {v}: {e}")),
    };
    if let Err(e) = l.pseudomanifold_check() {
        return Some(format!("link of vertex {v}: {e}"));
    }
    if l.euler_characteristic() != 0 {
        return Some(format!(
            "link of vertex {v}: Euler characteristic {}",
            l.euler_characteristic()
        ));
    }
    let h = homology_all(&l);
    if !is_sphere_homology(&h, d - 1) {
        let shown: Vec<String> = h.iter().map(|g| g.to_string()).collect();
        return Some(format!(
            "link of vertex {v}: homology ({})",
            shown.join(", ")
        ));
    }
    None
}

/// Runs the full battery on a candidate homology 4-sphere. When `ball` is
/// given, also checks that every vertex of it lies on `k`.
pub fn verify_homology_sphere(
    k: &SimplicialComplex,
    ball: Option<&SimplicialComplex>,
) -> VerifyReport {
    let d = 4usize;
    let mut checks = Vec::new();
    checks.push(check(
        "pure",
        (!k.is_pure() || k.dim() != d as isize)
            .then(|| format!("dimension {} (pure: {})", k.dim(), k.is_pure())),
    ));
    checks.push(check(
        "closed pseudomanifold",
        k.pseudomanifold_check().err().map(|e| e.to_string()),
    ));
    let comps = k.connected_components().len();
    checks.push(check(
        "connected",
        (comps != 1).then(|| format!("{comps} components")),
    ));
    let verts: Vec<Vertex> = k.vertex_support().into_iter().collect();
    for dd in 0..=k.dim().max(0) as usize {
        k.faces(dd);
    }
    let bad_link = verts.par_iter().find_map_first(|&v| link_failure(k, v, d));
    checks.push(check("vertex links are homology 3-spheres", bad_link));
    let homology = homology_all(k);
    let shown: Vec<String> = homology.iter().map(|g| g.to_string()).collect();
    checks.push(check(
        "homology of S^4",
        (!is_sphere_homology(&homology, d)).then(|| format!("({})", shown.join(", "))),
    ));
    let chi = k.euler_characteristic();
    checks.push(check(
        "Euler characteristic 2",
        (chi != 2).then(|| chi.to_string()),
    ));
    if let Some(b) = ball {
        let support = k.vertex_support();
        let interior: Vec<Vertex> = b
            .vertex_support()
            .into_iter()
            .filter(|v| !support.contains(v))
            .collect();
        checks.push(check(
            "every vertex on the boundary",
            interior
                .first()
                .map(|v| format!("vertex {v} and {} more are interior", interior.len() - 1)),
        ));
    }
    VerifyReport {
        dim: k.dim(),
        f_vector: k.f_vector().0,
        euler_characteristic: chi,
        homology,
        checks,
    }
}
