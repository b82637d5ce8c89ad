//! Edge-path presentations of the fundamental group, Tietze simplification
//! and abelianization.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::builder::words::{relator_words, Generator};
use crate::error::{AkError, Result};
use crate::linalg::{invariant_factors, HomologyGroup, SparseIntMatrix};
use crate::simplicial::{Simplex, SimplicialComplex, Vertex};

/// A letter is `g + 1` for generator g and `-(g + 1)` for its inverse.
pub type Word = Vec<i32>;

fn letter(g: usize, inverse: bool) -> i32 {
    let x = g as i32 + 1;
    if inverse {
        -x
    } else {
        x
    }
}

fn gen_of(l: i32) -> usize {
    (l.unsigned_abs() - 1) as usize
}

pub fn invert(w: &[i32]) -> Word {
    w.iter().rev().map(|l| -l).collect()
}

pub fn free_reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn cyclic_reduce(w: &[i32]) -> Word {
    let w = free_reduce(w);
    let (mut i, mut j) = (0, w.len());
    while j - i >= 2 && w[i] == -w[j - 1] {
        i += 1;
        j -= 1;
    }
    w[i..j].to_vec()
}

/// Smallest rotation of the word or of its inverse.
fn canonical(w: &[i32]) -> Word {
    let inv = invert(w);
    (0..w.len())
        .flat_map(|k| {
            let a: Word = w[k..].iter().chain(&w[..k]).copied().collect();
            let b: Word = inv[k..].iter().chain(&inv[..k]).copied().collect();
            [a, b]
        })
        .min()
        .unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    /// Relators written with single-letter names: lower case is a generator,
    /// upper case its inverse.
    pub fn from_letters(generators: &[char], relators: &[&str]) -> Result<Self> {
        let index: HashMap<char, usize> = generators
            .iter()
            .enumerate()
            .map(|(i, c)| (*c, i))
            .collect();
        let relators = relators
            .iter()
            .map(|r| {
                r.chars()
                    .map(|c| {
                        let g = index.get(&c.to_ascii_lowercase()).ok_or_else(|| {
                            AkError::Construction(format!("unknown generator `{c}`"))
                        })?;
                        Ok(letter(*g, c.is_ascii_uppercase()))
                    })
                    .collect::<Result<Word>>()
            })
            .collect::<Result<_>>()?;
        Ok(GroupPresentation {
            generators: generators.iter().map(|c| c.to_string()).collect(),
            relators,
        })
    }

    /// ⟨x, y | xyxYXY, xʳY^(r−1)⟩.
    pub fn akbulut_kirby(r: usize) -> Result<Self> {
        let (blue, red) = relator_words(r)?;
        let word = |w: &crate::builder::words::RelatorWord| -> Word {
            w.letters()
                .iter()
                .map(|l| letter(if l.gen == Generator::X { 0 } else { 1 }, l.inverse))
                .collect()
        };
        Ok(GroupPresentation {
            generators: vec!["x".into(), "y".into()],
            relators: vec![word(&blue), word(&red)],
        })
    }

    pub fn relator_length(&self) -> usize {
        self.relators.iter().map(|r| r.len()).sum()
    }

    fn name(&self, l: i32) -> String {
        let n = &self.generators[gen_of(l)];
        if l > 0 {
            n.clone()
        } else {
            let mut c = n.chars();
            match c.next() {
                Some(f) => f.to_uppercase().chain(c).collect(),
                None => n.clone(),
            }
        }
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens:")?;
        for g in &self.generators {
            write!(f, " {g}")?;
        }
        writeln!(f)?;
        for r in &self.relators {
            write!(f, "rel:")?;
            for &l in r {
                write!(f, " {}", self.name(l))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// One generator per edge outside a BFS spanning tree (from the smallest
/// vertex, neighbours in increasing order), one relator per triangle.
pub fn edge_path_presentation(k: &SimplicialComplex) -> Result<GroupPresentation> {
    let verts: Vec<Vertex> = k.vertex_support().into_iter().collect();
    let Some(&root) = verts.first() else {
        return Err(AkError::Disconnected);
    };
    let mut nbrs: HashMap<Vertex, BTreeSet<Vertex>> = HashMap::new();
    let edges: &[Simplex] = if k.dim() >= 1 { k.faces(1) } else { &[] };
    for e in edges {
        let (a, b) = (e.vertices()[0], e.vertices()[1]);
        nbrs.entry(a).or_default().insert(b);
        nbrs.entry(b).or_default().insert(a);
    }
    let mut tree: HashSet<(Vertex, Vertex)> = HashSet::new();
    let mut seen: HashSet<Vertex> = HashSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in nbrs.get(&v).into_iter().flatten() {
            if seen.insert(w) {
                tree.insert((v.min(w), v.max(w)));
                queue.push_back(w);
            }
        }
    }
    if seen.len() != verts.len() {
        return Err(AkError::Disconnected);
    }
    let mut generators = Vec::new();
    let mut gen_of_edge: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    for e in edges {
        let key = (e.vertices()[0], e.vertices()[1]);
        if !tree.contains(&key) {
            gen_of_edge.insert(key, generators.len());
            generators.push(format!("x{}", generators.len()));
        }
    }
    let path =
        |a: Vertex, b: Vertex, inverse: bool| gen_of_edge.get(&(a, b)).map(|&g| letter(g, inverse));
    let triangles: &[Simplex] = if k.dim() >= 2 { k.faces(2) } else { &[] };
    let relators = triangles
        .iter()
        .map(|t| {
            let [a, b, c] = [t.vertices()[0], t.vertices()[1], t.vertices()[2]];
            [path(a, b, false), path(b, c, false), path(a, c, true)]
                .into_iter()
                .flatten()
                .collect()
        })
        .collect();
    Ok(GroupPresentation {
        generators,
        relators,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TietzeStats {
    pub eliminated: usize,
    pub dropped_trivial: usize,
    pub dropped_duplicates: usize,
}

/// Free and cyclic reduction, removal of trivial and duplicate relators, and
/// elimination of generators that occur exactly once in some relator, up to
/// `budget` eliminations.
pub fn tietze_simplify(p: &GroupPresentation, budget: usize) -> (GroupPresentation, TietzeStats) {
    let mut stats = TietzeStats::default();
    let n = p.generators.len();
    let mut rels: Vec<Option<Word>> = p.relators.iter().map(|r| Some(cyclic_reduce(r))).collect();
    let mut occ: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    for (i, r) in rels.iter().enumerate() {
        for &l in r.as_ref().unwrap() {
            occ[gen_of(l)].insert(i);
        }
    }
    let mut alive = vec![true; n];
    // Relators sorted by length for picking the shortest eliminable one.
    let mut by_len: BTreeSet<(usize, usize)> = rels
        .iter()
        .enumerate()
        .map(|(i, r)| (r.as_ref().unwrap().len(), i))
        .collect();
    let drop = |i: usize,
                rels: &mut Vec<Option<Word>>,
                occ: &mut Vec<HashSet<usize>>,
                by_len: &mut BTreeSet<(usize, usize)>| {
        if let Some(r) = rels[i].take() {
            by_len.remove(&(r.len(), i));
            for &l in &r {
                occ[gen_of(l)].remove(&i);
            }
        }
    };
    for i in 0..rels.len() {
        if rels[i].as_ref().is_some_and(|r| r.is_empty()) {
            drop(i, &mut rels, &mut occ, &mut by_len);
            stats.dropped_trivial += 1;
        }
    }
    while stats.eliminated < budget {
        let mut choice = None;
        for &(_, i) in &by_len {
            let r = rels[i].as_ref().unwrap();
            let mut count: HashMap<usize, usize> = HashMap::new();
            for &l in r {
                *count.entry(gen_of(l)).or_insert(0) += 1;
            }
            let best = count
                .iter()
                .filter(|(_, c)| **c == 1)
                .map(|(g, _)| (occ[*g].len(), *g))
                .min();
            if let Some((_, g)) = best {
                choice = Some((i, g));
                break;
            }
        }
        let Some((i, g)) = choice else { break };
        let r = rels[i].clone().unwrap();
        let pos = r.iter().position(|&l| gen_of(l) == g).unwrap();
        let rotated: Word = r[pos..].iter().chain(&r[..pos]).copied().collect();
        // rotated = g^ε u, so g = u⁻¹ when ε = +1 and g = u when ε = −1.
        let u = &rotated[1..];
        let image: Word = if rotated[0] > 0 {
            invert(u)
        } else {
            u.to_vec()
        };
        let image_inv = invert(&image);
        drop(i, &mut rels, &mut occ, &mut by_len);
        let targets: Vec<usize> = occ[g].iter().copied().collect();
        for j in targets {
            let old = rels[j].clone().unwrap();
            drop(j, &mut rels, &mut occ, &mut by_len);
            let mut w = Vec::with_capacity(old.len() + image.len());
            for &l in &old {
                if gen_of(l) == g {
                    w.extend(if l > 0 { &image } else { &image_inv });
                } else {
                    w.push(l);
                }
            }
            let w = cyclic_reduce(&w);
            if w.is_empty() {
                stats.dropped_trivial += 1;
                continue;
            }
            for &l in &w {
                occ[gen_of(l)].insert(j);
            }
            by_len.insert((w.len(), j));
            rels[j] = Some(w);
        }
        alive[g] = false;
        stats.eliminated += 1;
    }
    let renumber: HashMap<usize, usize> = (0..n)
        .filter(|&g| alive[g])
        .enumerate()
        .map(|(new, old)| (old, new))
        .collect();
    let mut seen = HashSet::new();
    let mut relators = Vec::new();
    for r in rels.into_iter().flatten() {
        let w: Word = r
            .iter()
            .map(|&l| letter(renumber[&gen_of(l)], l < 0))
            .collect();
        if seen.insert(canonical(&w)) {
            relators.push(w);
        } else {
            stats.dropped_duplicates += 1;
        }
    }
    let generators = (0..n)
        .filter(|&g| alive[g])
        .map(|g| p.generators[g].clone())
        .collect();
    (
        GroupPresentation {
            generators,
            relators,
        },
        stats,
    )
}

/// Generator-by-relator matrix of exponent sums.
pub fn exponent_matrix(p: &GroupPresentation) -> SparseIntMatrix {
    let columns = p
        .relators
        .iter()
        .map(|r| {
            let mut sums: std::collections::BTreeMap<usize, i64> = Default::default();
            for &l in r {
                *sums.entry(gen_of(l)).or_insert(0) += l.signum() as i64;
            }
            sums.into_iter()
                .filter(|(_, s)| *s != 0)
                .map(|(g, s)| (g, BigInt::from(s)))
                .collect()
        })
        .collect();
    SparseIntMatrix::from_columns(p.generators.len(), columns)
}

/// The abelianized group ℤ^gens / (relator exponent sums).
pub fn abelianization(p: &GroupPresentation) -> HomologyGroup {
    let factors = invariant_factors(&exponent_matrix(p));
    HomologyGroup {
        betti: p.generators.len() - factors.len(),
        torsion: factors
            .into_iter()
            .filter(|f| *f > BigInt::from(1))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn reductions() {
        assert_eq!(free_reduce(&[1, 2, -2, -1, 3]), vec![3]);
        assert_eq!(cyclic_reduce(&[-1, 2, 3, 1]), vec![2, 3]);
        assert_eq!(canonical(&[2, 1]), canonical(&[-1, -2]));
    }

    #[test]
    fn circle_and_disk() {
        let circle = SimplicialComplex::new(vec![vec![0, 1], vec![1, 2], vec![0, 2]]);
        let p = edge_path_presentation(&circle).unwrap();
        assert_eq!((p.generators.len(), p.relators.len()), (1, 0));
        assert_eq!(abelianization(&p), HomologyGroup::free(1));
        let disk = SimplicialComplex::simplex(0..3);
        let (q, _) = tietze_simplify(&edge_path_presentation(&disk).unwrap(), 100);
        assert!(q.generators.is_empty() && q.relators.is_empty());
    }

    #[test]
    fn torus() {
        let k = catalog::torus7();
        let p = edge_path_presentation(&k).unwrap();
        assert_eq!(p.generators.len(), 21 - 7 + 1);
        assert_eq!(p.relators.len(), 14);
        assert_eq!(abelianization(&p), HomologyGroup::free(2));
        let (q, _) = tietze_simplify(&p, 1000);
        assert_eq!(abelianization(&q), HomologyGroup::free(2));
        assert_eq!(q.generators.len(), 2);
    }

    #[test]
    fn projective_plane() {
        let p = edge_path_presentation(&catalog::rp2()).unwrap();
        let (q, _) = tietze_simplify(&p, 1000);
        let h = abelianization(&q);
        assert_eq!(
            h,
            HomologyGroup {
                betti: 0,
                torsion: vec![BigInt::from(2)]
            }
        );
        assert_eq!(q.generators.len(), 1);
    }

    #[test]
    fn small_presentations() {
        let p = GroupPresentation::from_letters(&['x'], &["x"]).unwrap();
        let (q, _) = tietze_simplify(&p, 10);
        assert!(q.generators.is_empty() && q.relators.is_empty());
        let p = GroupPresentation::from_letters(&['x', 'y'], &["xyxY", "y"]).unwrap();
        let (q, _) = tietze_simplify(&p, 10);
        assert_eq!(q.to_string(), "gens: x\nrel: x x\n");
        let free = GroupPresentation::from_letters(&['x', 'y'], &[]).unwrap();
        assert_eq!(abelianization(&free), HomologyGroup::free(2));
    }

    #[test]
    fn akbulut_kirby_groups_are_perfect() {
        for r in 3..=10 {
            let p = GroupPresentation::akbulut_kirby(r).unwrap();
            assert!(abelianization(&p).is_trivial());
        }
        assert_eq!(
            GroupPresentation::akbulut_kirby(3).unwrap().to_string(),
            "gens: x y\nrel: x y x Y X Y\nrel: x x x Y Y\n"
        );
    }
}
