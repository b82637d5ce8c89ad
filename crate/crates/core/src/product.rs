//! Staircase products, interval products, cones and simplicial mapping cylinders.

use std::collections::{BTreeSet, HashMap};

use crate::error::{AkError, Result};
use crate::simplicial::{Simplex, SimplicialComplex, Vertex};

/// A complex together with a total order on its vertices.
#[derive(Clone, Debug)]
pub struct OrderedComplex {
    pub complex: SimplicialComplex,
    order: Vec<Vertex>,
    rank: HashMap<Vertex, usize>,
}

impl OrderedComplex {
    pub fn new(complex: SimplicialComplex, order: Vec<Vertex>) -> Result<Self> {
        let support = complex.vertex_support();
        let listed: BTreeSet<Vertex> = order.iter().copied().collect();
        if listed.len() != order.len() || listed != support {
            return Err(AkError::BadOrder);
        }
        let rank = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        Ok(OrderedComplex {
            complex,
            order,
            rank,
        })
    }

    /// Orders vertices by id.
    pub fn natural(complex: SimplicialComplex) -> Self {
        let order: Vec<Vertex> = complex.vertex_support().into_iter().collect();
        let rank = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        OrderedComplex {
            complex,
            order,
            rank,
        }
    }

    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    pub fn rank(&self, v: Vertex) -> usize {
        self.rank[&v]
    }

    /// Vertices of `s` listed in this complex's order.
    pub fn sorted(&self, s: &Simplex) -> Vec<Vertex> {
        let mut v = s.vertices().to_vec();
        v.sort_by_key(|x| self.rank[x]);
        v
    }
}

/// A product complex; vertex `i` of the product stands for `pairs[i]`.
#[derive(Clone, Debug)]
pub struct Product {
    pub complex: OrderedComplex,
    pub pairs: Vec<(Vertex, Vertex)>,
    index: HashMap<(Vertex, Vertex), Vertex>,
}

impl Product {
    pub fn vertex(&self, v: Vertex, w: Vertex) -> Option<Vertex> {
        self.index.get(&(v, w)).copied()
    }
}

/// Monotone lattice paths from (0,0) to (m,n), as lists of grid points.
pub fn staircase_paths(m: usize, n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut path = vec![(0, 0)];
    fn rec(m: usize, n: usize, path: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let (i, j) = *path.last().unwrap();
        if i == m && j == n {
            out.push(path.clone());
            return;
        }
        if i < m {
            path.push((i + 1, j));
            rec(m, n, path, out);
            path.pop();
        }
        if j < n {
            path.push((i, j + 1));
            rec(m, n, path, out);
            path.pop();
        }
    }
    rec(m, n, &mut path, &mut out);
    out
}

/// Staircase triangulation of K × L; product vertices are numbered from 0 in
/// lexicographic pair order.
pub fn staircase_product(k: &OrderedComplex, l: &OrderedComplex) -> Product {
    let nl = l.order.len();
    let pairs: Vec<(Vertex, Vertex)> = k
        .order
        .iter()
        .flat_map(|&v| l.order.iter().map(move |&w| (v, w)))
        .collect();
    let id = |a: usize, b: usize| (a * nl + b) as Vertex;
    let mut path_cache: HashMap<(usize, usize), Vec<Vec<(usize, usize)>>> = HashMap::new();
    let mut facets = Vec::new();
    for s in k.complex.facets() {
        let sv: Vec<usize> = k.sorted(s).iter().map(|v| k.rank[v]).collect();
        for t in l.complex.facets() {
            let tv: Vec<usize> = l.sorted(t).iter().map(|v| l.rank[v]).collect();
            let paths = path_cache
                .entry((sv.len() - 1, tv.len() - 1))
                .or_insert_with(|| staircase_paths(sv.len() - 1, tv.len() - 1));
            for p in paths.iter() {
                facets.push(Simplex::from_sorted(
                    p.iter().map(|&(i, j)| id(sv[i], tv[j])).collect(),
                ));
            }
        }
    }
    let complex = SimplicialComplex::from_maximal(facets);
    let order: Vec<Vertex> = (0..pairs.len() as Vertex)
        .filter(|v| !complex.facets_containing_vertex(*v).is_empty())
        .collect();
    let index = pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as Vertex))
        .collect();
    Product {
        complex: OrderedComplex::new(complex, order).expect("product order covers support"),
        pairs,
        index,
    }
}

/// K × I together with the embeddings of the two end copies.
#[derive(Clone, Debug)]
pub struct IntervalProduct {
    pub product: Product,
    pub end0: HashMap<Vertex, Vertex>,
    pub end1: HashMap<Vertex, Vertex>,
}

pub fn product_with_interval(k: &OrderedComplex) -> IntervalProduct {
    let interval = OrderedComplex::natural(SimplicialComplex::simplex([0, 1]));
    let product = staircase_product(k, &interval);
    let end = |t: Vertex| {
        k.order
            .iter()
            .map(|&v| (v, product.vertex(v, t).unwrap()))
            .collect()
    };
    IntervalProduct {
        end0: end(0),
        end1: end(1),
        product,
    }
}

/// Cone with a fresh apex.
pub fn cone(k: &SimplicialComplex, apex: Vertex) -> Result<SimplicialComplex> {
    if !k.facets_containing_vertex(apex).is_empty() {
        return Err(AkError::ApexCollision(apex));
    }
    if k.is_empty() {
        return Ok(SimplicialComplex::simplex([apex]));
    }
    Ok(SimplicialComplex::from_maximal(
        k.facets().iter().map(|s| s.with(apex)).collect(),
    ))
}

/// Simplicial mapping cylinder of `f: K → L`.
///
/// K's vertices come before L's. Each simplex v₀<…<vₙ of K contributes the
/// collapsed staircase simplices {v₀..vᵢ} ∪ f{vᵢ..vₙ}. When `f` is monotone
/// for the two orders this is the classical construction.
pub fn mapping_cylinder(
    k: &OrderedComplex,
    l: &OrderedComplex,
    f: &HashMap<Vertex, Vertex>,
) -> Result<OrderedComplex> {
    for v in k.order() {
        if l.rank.contains_key(v) {
            return Err(AkError::OverlappingVertices(*v));
        }
    }
    let mut out: Vec<Simplex> = l.complex.facets().to_vec();
    for s in k.complex.facets() {
        let sv = k.sorted(s);
        let mut image = Vec::with_capacity(sv.len());
        for v in &sv {
            image.push(*f.get(v).ok_or(AkError::UnmappedVertex(*v))?);
        }
        let img = Simplex::new(image.iter().copied());
        if !l.complex.contains_face(&img) {
            return Err(AkError::NotSimplicial(s.clone()));
        }
        for i in 0..sv.len() {
            out.push(Simplex::new(
                sv[..=i].iter().chain(image[i..].iter()).copied(),
            ));
        }
    }
    let complex = SimplicialComplex::new(out);
    let order = k.order().iter().chain(l.order()).copied().collect();
    OrderedComplex::new(complex, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::homology_all;

    fn simplex(n: u32) -> OrderedComplex {
        OrderedComplex::natural(SimplicialComplex::simplex(0..=n))
    }

    fn binomial(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
    }

    #[test]
    fn small_products() {
        let e = simplex(1);
        assert_eq!(
            staircase_product(&e, &e).complex.complex.f_vector().0,
            vec![4, 5, 2]
        );
        let p = staircase_product(&simplex(2), &e);
        assert_eq!(p.complex.complex.num_facets(), 3);
        assert_eq!(p.complex.complex.num_vertices(), 6);
        for m in 0..=4 {
            for n in 0..=4 {
                let p = staircase_product(&simplex(m), &simplex(n));
                assert_eq!(
                    p.complex.complex.num_facets() as u64,
                    binomial((m + n) as u64, n as u64)
                );
            }
        }
    }

    #[test]
    fn induced_triangulations_agree() {
        let k = OrderedComplex::natural(SimplicialComplex::new(vec![vec![0, 1, 2], vec![1, 2, 3]]));
        let p = staircase_product(&k, &simplex(1));
        let shared: Vec<Vertex> = [1, 2]
            .iter()
            .flat_map(|&v| [0, 1].map(|t| p.vertex(v, t).unwrap()))
            .collect();
        let from = |facet: &Simplex| -> BTreeSet<Simplex> {
            let cell = cell_vertices(&p, facet);
            p.complex
                .complex
                .facets()
                .iter()
                .filter(|s| s.vertices().iter().all(|v| cell.contains(v)))
                .flat_map(|s| s.faces_of_size(3))
                .filter(|t| t.vertices().iter().all(|v| shared.contains(v)))
                .collect()
        };
        let a = from(&Simplex::from([0, 1, 2]));
        let b = from(&Simplex::from([1, 2, 3]));
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
    }

    fn cell_vertices(p: &Product, s: &Simplex) -> Vec<Vertex> {
        p.pairs
            .iter()
            .enumerate()
            .filter(|(_, (v, _))| s.contains(*v))
            .map(|(i, _)| i as Vertex)
            .collect()
    }

    #[test]
    fn prism_boundary_identity() {
        let k = simplex(3);
        let ip = product_with_interval(&k);
        let prod = &ip.product.complex.complex;
        let bd = prod.boundary_complex().unwrap();
        let dk = k.complex.boundary_complex().unwrap();
        let dk_ord = OrderedComplex::natural(dk);
        let side = product_with_interval(&dk_ord);
        let mut expected: Vec<Simplex> = Vec::new();
        for s in k.complex.facets() {
            expected.push(Simplex::new(s.vertices().iter().map(|v| ip.end0[v])));
            expected.push(Simplex::new(s.vertices().iter().map(|v| ip.end1[v])));
        }
        for s in side.product.complex.complex.facets() {
            expected.push(Simplex::new(s.vertices().iter().map(|&v| {
                let (a, t) = side.product.pairs[v as usize];
                ip.product.vertex(a, t).unwrap()
            })));
        }
        assert_eq!(bd, SimplicialComplex::new(expected));
    }

    #[test]
    fn cones() {
        let s = SimplicialComplex::boundary_of_simplex(3);
        let c = cone(&s, 10).unwrap();
        assert_eq!((c.num_vertices(), c.num_facets()), (5, 4));
        assert_eq!(c.euler_characteristic(), 1);
        assert!(cone(&s, 0).is_err());
        assert_eq!(
            cone(&SimplicialComplex::empty(), 3).unwrap().f_vector().0,
            vec![1]
        );
    }

    #[test]
    fn cylinders() {
        let k = OrderedComplex::natural(SimplicialComplex::simplex([0, 1]));
        let pt = OrderedComplex::natural(SimplicialComplex::simplex([5]));
        let f: HashMap<Vertex, Vertex> = [(0, 5), (1, 5)].into();
        let m = mapping_cylinder(&k, &pt, &f).unwrap();
        assert_eq!(m.complex.facets(), &[Simplex::from([0, 1, 5])]);

        let c3 = OrderedComplex::natural(SimplicialComplex::boundary_of_simplex(2));
        let f: HashMap<Vertex, Vertex> = [(0, 5), (1, 5), (2, 5)].into();
        let d = mapping_cylinder(&c3, &pt, &f).unwrap();
        assert_eq!(d.complex.num_vertices(), 4);
        assert_eq!(d.complex.euler_characteristic(), 1);
        assert!(homology_all(&d.complex)[1].is_trivial());

        let copy = OrderedComplex::natural(SimplicialComplex::simplex([10, 11, 12]));
        let f: HashMap<Vertex, Vertex> = [(0, 10), (1, 11), (2, 12)].into();
        let tri = OrderedComplex::natural(SimplicialComplex::simplex([0, 1, 2]));
        let prism = mapping_cylinder(&tri, &copy, &f).unwrap();
        assert_eq!(prism.complex.num_facets(), 3);
        assert_eq!(prism.complex.num_vertices(), 6);

        let bad: HashMap<Vertex, Vertex> = [(0, 10), (1, 11), (2, 13)].into();
        let target =
            OrderedComplex::natural(SimplicialComplex::new(vec![vec![10, 11], vec![12, 13]]));
        assert!(mapping_cylinder(&tri, &target, &bad).is_err());
    }
}
