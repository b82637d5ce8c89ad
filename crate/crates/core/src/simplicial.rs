//! Facet-list simplicial complexes with lazily cached face lattices.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{AkError, Result};

pub type Vertex = u32;

/// A simplex stored as a strictly increasing list of vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Simplex(Vec<Vertex>);

impl Simplex {
    pub fn new<I: IntoIterator<Item = Vertex>>(vertices: I) -> Self {
        let mut v: Vec<Vertex> = vertices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Simplex(v)
    }

    /// Wraps a vector that the caller guarantees to be strictly increasing.
    pub fn from_sorted(v: Vec<Vertex>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Simplex(v)
    }

    pub fn empty() -> Self {
        Simplex(Vec::new())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// True when every vertex of `self` is a vertex of `other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for v in &self.0 {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn is_disjoint(&self, other: &Simplex) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    /// The face obtained by deleting the vertex at position `j`.
    pub fn without_index(&self, j: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(j);
        Simplex(v)
    }

    pub fn without(&self, x: Vertex) -> Simplex {
        Simplex(self.0.iter().copied().filter(|&v| v != x).collect())
    }

    pub fn with(&self, x: Vertex) -> Simplex {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&x) {
            v.insert(pos, x);
        }
        Simplex(v)
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        let mut v: Vec<Vertex> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        Simplex(v)
    }

    pub fn minus(&self, other: &Simplex) -> Simplex {
        Simplex(
            self.0
                .iter()
                .copied()
                .filter(|v| !other.contains(*v))
                .collect(),
        )
    }

    /// All faces with exactly `k` vertices, in lexicographic order.
    pub fn faces_of_size(&self, k: usize) -> impl Iterator<Item = Simplex> + '_ {
        self.0.iter().copied().combinations(k).map(Simplex)
    }

    /// Codimension-one faces, ordered by the deleted position.
    pub fn boundary(&self) -> Vec<Simplex> {
        (0..self.len()).map(|j| self.without_index(j)).collect()
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(" "))
    }
}

impl From<Vec<Vertex>> for Simplex {
    fn from(v: Vec<Vertex>) -> Self {
        Simplex::new(v)
    }
}

impl<const N: usize> From<[Vertex; N]> for Simplex {
    fn from(v: [Vertex; N]) -> Self {
        Simplex::new(v)
    }
}

/// Face counts per dimension; index i counts the i-faces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct FVector(pub Vec<u64>);

impl FVector {
    pub fn euler_characteristic(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.iter().join(" "))
    }
}

/// Why a complex fails to be a closed pseudomanifold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PseudomanifoldFailure {
    Empty,
    NotPure { facet: Simplex, expected_dim: usize },
    RidgeDegree { ridge: Simplex, facets: usize },
    Disconnected { components: usize },
}

impl fmt::Display for PseudomanifoldFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "empty complex"),
            Self::NotPure {
                facet,
                expected_dim,
            } => {
                write!(f, "facet {facet} is not of dimension {expected_dim}")
            }
            Self::RidgeDegree { ridge, facets } => {
                write!(f, "ridge {ridge} lies in {facets} facets")
            }
            Self::Disconnected { components } => {
                write!(f, "facet graph has {components} components")
            }
        }
    }
}

/// An immutable simplicial complex stored by its facets.
///
/// Face lists per dimension are built on first use and cached; the caches are
/// `OnceLock`s, so a complex can be shared across threads.
#[derive(Clone, Default)]
pub struct SimplicialComplex {
    facets: Vec<Simplex>,
    dim: isize,
    faces: Vec<OnceLock<Vec<Simplex>>>,
    vertex_stars: OnceLock<HashMap<Vertex, Vec<usize>>>,
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialComplex")
            .field("dim", &self.dim)
            .field("facets", &self.facets)
            .finish()
    }
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.facets == other.facets
    }
}

impl Eq for SimplicialComplex {}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::from_maximal(Vec::new())
    }

    /// Builds a complex from arbitrary simplices, keeping only the maximal ones.
    pub fn new<I, S>(simplices: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Simplex>,
    {
        let mut all: Vec<Simplex> = simplices
            .into_iter()
            .map(Into::into)
            .filter(|s| !s.is_empty())
            .collect();
        all.sort_unstable();
        all.dedup();
        let uniform = all.windows(2).all(|w| w[0].len() == w[1].len());
        if uniform {
            return Self::from_maximal(all);
        }
        all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let mut covered: HashSet<Simplex> = HashSet::new();
        let mut kept = Vec::new();
        for s in all {
            if covered.contains(&s) {
                continue;
            }
            for k in 1..s.len() {
                for f in s.faces_of_size(k) {
                    covered.insert(f);
                }
            }
            kept.push(s);
        }
        Self::from_maximal(kept)
    }

    /// Wraps simplices already known to be pairwise non-nested.
    pub fn from_maximal(mut facets: Vec<Simplex>) -> Self {
        facets.retain(|s| !s.is_empty());
        facets.sort_unstable();
        facets.dedup();
        let dim = facets.iter().map(|s| s.dim()).max().unwrap_or(-1);
        let faces = (0..dim + 1).map(|_| OnceLock::new()).collect();
        SimplicialComplex {
            facets,
            dim,
            faces,
            vertex_stars: OnceLock::new(),
        }
    }

    /// The full simplex on the given vertices.
    pub fn simplex<I: IntoIterator<Item = Vertex>>(vertices: I) -> Self {
        Self::from_maximal(vec![Simplex::new(vertices)])
    }

    /// Boundary of the simplex on vertices `0..=n`.
    pub fn boundary_of_simplex(n: usize) -> Self {
        let s = Simplex::new(0..=n as Vertex);
        Self::from_maximal(s.boundary())
    }

    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    /// Maximal facet dimension; −1 for the empty complex.
    pub fn dim(&self) -> isize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn is_pure(&self) -> bool {
        self.facets.iter().all(|s| s.dim() == self.dim)
    }

    /// Sorted list of all faces of dimension `d`.
    pub fn faces(&self, d: usize) -> &[Simplex] {
        if d as isize > self.dim {
            return &[];
        }
        self.faces[d].get_or_init(|| {
            let k = d + 1;
            let mut out: Vec<Simplex> = if d as isize == self.dim && self.is_pure() {
                self.facets.clone()
            } else {
                self.facets
                    .iter()
                    .filter(|s| s.len() >= k)
                    .flat_map(|s| s.faces_of_size(k))
                    .collect()
            };
            out.sort_unstable();
            out.dedup();
            out
        })
    }

    /// Position of `s` in `faces(dim s)`.
    pub fn face_position(&self, s: &Simplex) -> Option<usize> {
        if s.is_empty() || s.dim() > self.dim {
            return None;
        }
        self.faces(s.dim() as usize).binary_search(s).ok()
    }

    pub fn contains_face(&self, s: &Simplex) -> bool {
        if s.is_empty() {
            return !self.is_empty();
        }
        match s.vertices().first() {
            Some(&v) => self
                .facets_containing_vertex(v)
                .iter()
                .any(|&i| s.is_face_of(&self.facets[i])),
            None => false,
        }
    }

    fn vertex_stars(&self) -> &HashMap<Vertex, Vec<usize>> {
        self.vertex_stars.get_or_init(|| {
            let mut m: HashMap<Vertex, Vec<usize>> = HashMap::new();
            for (i, s) in self.facets.iter().enumerate() {
                for &v in s.vertices() {
                    m.entry(v).or_default().push(i);
                }
            }
            m
        })
    }

    /// Indices into `facets()` of the facets containing `v`.
    pub fn facets_containing_vertex(&self, v: Vertex) -> &[usize] {
        self.vertex_stars()
            .get(&v)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Facets that contain the face `s`.
    pub fn facets_containing(&self, s: &Simplex) -> Vec<&Simplex> {
        match s.vertices().first() {
            Some(&v) => self
                .facets_containing_vertex(v)
                .iter()
                .map(|&i| &self.facets[i])
                .filter(|f| s.is_face_of(f))
                .collect(),
            None => self.facets.iter().collect(),
        }
    }

    pub fn vertex_support(&self) -> BTreeSet<Vertex> {
        self.facets
            .iter()
            .flat_map(|s| s.vertices().iter().copied())
            .collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_stars().len()
    }

    pub fn f_vector(&self) -> FVector {
        if self.dim < 0 {
            return FVector::default();
        }
        FVector(
            (0..=self.dim as usize)
                .map(|d| self.faces(d).len() as u64)
                .collect(),
        )
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().euler_characteristic()
    }

    /// `{τ : τ ∩ σ = ∅, τ ∪ σ ∈ K}`.
    pub fn link(&self, sigma: &Simplex) -> Result<SimplicialComplex> {
        let cofaces = self.facets_containing(sigma);
        if cofaces.is_empty() {
            return Err(AkError::NotAFace(sigma.clone()));
        }
        Ok(Self::from_maximal(
            cofaces.into_iter().map(|f| f.minus(sigma)).collect(),
        ))
    }

    /// Closed star: the facets containing `sigma`.
    pub fn star(&self, sigma: &Simplex) -> Result<SimplicialComplex> {
        let cofaces = self.facets_containing(sigma);
        if cofaces.is_empty() {
            return Err(AkError::NotAFace(sigma.clone()));
        }
        Ok(Self::from_maximal(cofaces.into_iter().cloned().collect()))
    }

    fn require_pure(&self) -> Result<usize> {
        if let Some(bad) = self.facets.iter().find(|s| s.dim() != self.dim) {
            return Err(AkError::NotPure(
                bad.clone(),
                bad.len() - 1,
                self.dim as usize,
            ));
        }
        Ok(self.dim.max(0) as usize)
    }

    /// Number of facets containing each ridge.
    fn ridge_counts(&self) -> HashMap<Simplex, Vec<usize>> {
        let mut m: HashMap<Simplex, Vec<usize>> = HashMap::new();
        for (i, s) in self.facets.iter().enumerate() {
            for r in s.boundary() {
                m.entry(r).or_default().push(i);
            }
        }
        m
    }

    /// The (d−1)-faces of a pure d-complex that lie in exactly one facet.
    pub fn boundary_complex(&self) -> Result<SimplicialComplex> {
        if self.is_empty() {
            return Ok(Self::empty());
        }
        self.require_pure()?;
        let free: Vec<Simplex> = self
            .ridge_counts()
            .into_iter()
            .filter(|(r, v)| v.len() == 1 && !r.is_empty())
            .map(|(r, _)| r)
            .collect();
        Ok(Self::from_maximal(free))
    }

    /// Checks the closed pseudomanifold property, returning a certificate on failure.
    pub fn pseudomanifold_check(&self) -> std::result::Result<(), PseudomanifoldFailure> {
        if self.is_empty() {
            return Err(PseudomanifoldFailure::Empty);
        }
        if let Some(bad) = self.facets.iter().find(|s| s.dim() != self.dim) {
            return Err(PseudomanifoldFailure::NotPure {
                facet: bad.clone(),
                expected_dim: self.dim as usize,
            });
        }
        let ridges = self.ridge_counts();
        let mut bad: Vec<(&Simplex, usize)> = ridges
            .iter()
            .filter(|(_, v)| v.len() != 2)
            .map(|(r, v)| (r, v.len()))
            .collect();
        if !bad.is_empty() {
            bad.sort();
            return Err(PseudomanifoldFailure::RidgeDegree {
                ridge: bad[0].0.clone(),
                facets: bad[0].1,
            });
        }
        let mut uf = UnionFind::new(self.facets.len());
        for v in ridges.values() {
            uf.union(v[0], v[1]);
        }
        let comps = uf.count();
        if comps != 1 {
            return Err(PseudomanifoldFailure::Disconnected { components: comps });
        }
        Ok(())
    }

    pub fn is_closed_pseudomanifold(&self) -> bool {
        self.pseudomanifold_check().is_ok()
    }

    /// Components of the underlying space, each as its own complex.
    pub fn connected_components(&self) -> Vec<SimplicialComplex> {
        let verts: Vec<Vertex> = self.vertex_support().into_iter().collect();
        let index: HashMap<Vertex, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(verts.len());
        for s in &self.facets {
            let first = index[&s.vertices()[0]];
            for v in &s.vertices()[1..] {
                uf.union(first, index[v]);
            }
        }
        let mut groups: Vec<Vec<Simplex>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for s in &self.facets {
            let root = uf.find(index[&s.vertices()[0]]);
            let g = *slot.entry(root).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(s.clone());
        }
        groups.into_iter().map(Self::from_maximal).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// Applies a vertex relabeling; the map must be injective on the support.
    pub fn relabel<F: Fn(Vertex) -> Vertex>(&self, f: F) -> SimplicialComplex {
        Self::from_maximal(
            self.facets
                .iter()
                .map(|s| Simplex::new(s.vertices().iter().map(|&v| f(v))))
                .collect(),
        )
    }

    /// All faces of dimension at most `k`, as a complex.
    pub fn skeleton(&self, k: usize) -> SimplicialComplex {
        if self.dim <= k as isize {
            return self.clone();
        }
        Self::new(self.facets.iter().flat_map(|s| {
            if s.dim() <= k as isize {
                vec![s.clone()]
            } else {
                s.faces_of_size(k + 1).collect()
            }
        }))
    }

    /// Subcomplex generated by the facets satisfying `keep`.
    pub fn filter_facets<F: Fn(&Simplex) -> bool>(&self, keep: F) -> SimplicialComplex {
        Self::from_maximal(self.facets.iter().filter(|s| keep(s)).cloned().collect())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    pub(crate) fn count(&mut self) -> usize {
        (0..self.parent.len())
            .filter(|&i| self.find(i) == i)
            .count()
    }
}
