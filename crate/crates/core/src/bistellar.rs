//! Bistellar moves on closed pseudomanifolds and an annealing reduction
//! toward the boundary of a simplex.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AkError, Result};
use crate::linalg::{homology_all, HomologyGroup};
use crate::simplicial::{Simplex, SimplicialComplex, Vertex};

/// Replaces `face * ∂coface` by `∂face * coface`. The face has dimension i
/// and the coface d − i; for i = d the coface is a single fresh vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BistellarMove {
    pub face: Simplex,
    pub coface: Simplex,
}

impl BistellarMove {
    /// Dimension of the face removed by the move.
    pub fn index(&self) -> usize {
        self.face.len() - 1
    }

    pub fn inverse(&self) -> BistellarMove {
        BistellarMove {
            face: self.coface.clone(),
            coface: self.face.clone(),
        }
    }

    /// Change in the number of facets.
    pub fn facet_delta(&self) -> isize {
        self.face.len() as isize - self.coface.len() as isize
    }
}

impl fmt::Display for BistellarMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.face, self.coface)
    }
}

/// Mutable closed pseudomanifold with a vertex → facets index.
#[derive(Clone, Debug)]
pub struct Triangulation {
    dim: usize,
    facets: HashSet<Simplex>,
    star: HashMap<Vertex, HashSet<Simplex>>,
    next_vertex: Vertex,
}

impl Triangulation {
    pub fn new(k: &SimplicialComplex) -> Result<Self> {
        if let Err(e) = k.pseudomanifold_check() {
            return Err(AkError::Construction(format!(
                "not a closed pseudomanifold: {e}"
            )));
        }
        let mut t = Triangulation {
            dim: k.dim() as usize,
            facets: HashSet::new(),
            star: HashMap::new(),
            next_vertex: k.vertex_support().iter().max().map_or(0, |v| v + 1),
        };
        for f in k.facets() {
            t.insert(f.clone());
        }
        Ok(t)
    }

    fn insert(&mut self, f: Simplex) {
        for &v in f.vertices() {
            self.star.entry(v).or_default().insert(f.clone());
        }
        self.facets.insert(f);
    }

    fn remove(&mut self, f: &Simplex) {
        for v in f.vertices() {
            let s = self.star.get_mut(v).unwrap();
            s.remove(f);
            if s.is_empty() {
                self.star.remove(v);
            }
        }
        self.facets.remove(f);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.star.len()
    }

    pub fn to_complex(&self) -> SimplicialComplex {
        SimplicialComplex::from_maximal(self.facets.iter().cloned().collect())
    }

    fn facets_containing(&self, s: &Simplex) -> Vec<&Simplex> {
        let Some(first) = s.vertices().first() else {
            return self.facets.iter().collect();
        };
        self.star
            .get(first)
            .map(|fs| fs.iter().filter(|f| s.is_face_of(f)).collect())
            .unwrap_or_default()
    }

    fn contains_face(&self, s: &Simplex) -> bool {
        let Some(first) = s.vertices().first() else {
            return true;
        };
        self.star
            .get(first)
            .is_some_and(|fs| fs.iter().any(|f| s.is_face_of(f)))
    }

    /// The move on `face` if its link is the boundary of a simplex that is not
    /// already a face.
    pub fn move_at(&self, face: &Simplex) -> Option<BistellarMove> {
        let i = face.len() - 1;
        let around = self.facets_containing(face);
        if i == self.dim {
            return (around.len() == 1).then(|| BistellarMove {
                face: face.clone(),
                coface: Simplex::from([self.next_vertex]),
            });
        }
        if around.len() != self.dim - i + 1 {
            return None;
        }
        let coface = Simplex::new(
            around
                .iter()
                .flat_map(|f| f.minus(face).into_vec())
                .collect::<BTreeSet<_>>(),
        );
        if coface.len() != self.dim - i + 1 || self.contains_face(&coface) {
            return None;
        }
        Some(BistellarMove {
            face: face.clone(),
            coface,
        })
    }

    /// All admissible moves removing a face of dimension `i`, in a fixed order.
    pub fn admissible_moves(&self, i: usize) -> Vec<BistellarMove> {
        if i > self.dim {
            return Vec::new();
        }
        let mut faces: BTreeSet<Simplex> = BTreeSet::new();
        for f in &self.facets {
            faces.extend(f.faces_of_size(i + 1));
        }
        faces.iter().filter_map(|s| self.move_at(s)).collect()
    }

    pub fn is_admissible(&self, m: &BistellarMove) -> bool {
        if m.face.len() + m.coface.len() != self.dim + 2 {
            return false;
        }
        match self.move_at(&m.face) {
            Some(found) if m.face.len() == self.dim + 1 => {
                m.coface.len() == 1
                    && !self.star.contains_key(&m.coface.vertices()[0])
                    && found.face == m.face
            }
            Some(found) => found == *m,
            None => false,
        }
    }

    pub fn apply(&mut self, m: &BistellarMove) -> Result<()> {
        if !self.is_admissible(m) {
            return Err(AkError::InadmissibleMove(m.to_string()));
        }
        for v in m.coface.vertices() {
            let f = m.face.union(&Simplex::new(
                m.coface.vertices().iter().copied().filter(|w| w != v),
            ));
            self.remove(&f);
        }
        if m.coface.len() == 1 {
            self.remove(&m.face);
        }
        for v in m.face.vertices() {
            let f = m.coface.union(&Simplex::new(
                m.face.vertices().iter().copied().filter(|w| w != v),
            ));
            self.insert(f);
        }
        if let Some(&v) = m.coface.vertices().iter().max() {
            self.next_vertex = self.next_vertex.max(v + 1);
        }
        Ok(())
    }
}

pub fn admissible_moves(k: &SimplicialComplex, i: usize) -> Result<Vec<BistellarMove>> {
    Ok(Triangulation::new(k)?.admissible_moves(i))
}

pub fn apply_move(k: &SimplicialComplex, m: &BistellarMove) -> Result<SimplicialComplex> {
    let mut t = Triangulation::new(k)?;
    t.apply(m)?;
    Ok(t.to_complex())
}

/// Probability of taking a non-lowering move, decaying geometrically from
/// `start` by `ratio` per step down to `floor`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub start: f64,
    pub ratio: f64,
    pub floor: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            start: 0.1,
            ratio: 0.999,
            floor: 0.01,
        }
    }
}

impl Schedule {
    pub fn temperature(&self, step: usize) -> f64 {
        (self.start * self.ratio.powi(step.min(i32::MAX as usize) as i32)).max(self.floor)
    }
}

impl FromStr for Schedule {
    type Err = AkError;

    /// `g:ratio,floor` or `g:start,ratio,floor`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || AkError::Construction(format!("bad schedule `{s}`, expected g:ratio,floor"));
        let body = s.strip_prefix("g:").ok_or_else(bad)?;
        let nums: Vec<f64> = body
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let sched = match nums[..] {
            [ratio, floor] => Schedule {
                ratio,
                floor,
                ..Schedule::default()
            },
            [start, ratio, floor] => Schedule {
                start,
                ratio,
                floor,
            },
            _ => return Err(bad()),
        };
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(unit(sched.start) && unit(sched.ratio) && unit(sched.floor)) {
            return Err(bad());
        }
        Ok(sched)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReduceOptions {
    pub budget: usize,
    pub seed: u64,
    pub schedule: Schedule,
    /// Recompute homology every this many moves and fail on a change.
    pub check_every: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReduceOutcome {
    pub success: bool,
    pub moves: usize,
    pub trace: Vec<BistellarMove>,
    pub initial_f_vector: Vec<u64>,
    pub final_f_vector: Vec<u64>,
    pub best_f_vector: Vec<u64>,
    pub homology_checks: usize,
    #[serde(skip)]
    pub best: SimplicialComplex,
}

fn is_simplex_boundary(t: &Triangulation) -> bool {
    t.num_vertices() == t.dim + 2 && t.num_facets() == t.dim + 2
}

/// Annealing walk: a lowering move whenever one exists, except with
/// probability equal to the temperature; otherwise a neutral move, or a
/// raising one when no neutral move exists or with probability equal to the
/// temperature. Stops on reaching the boundary of a simplex.
pub fn reduce(k: &SimplicialComplex, opts: &ReduceOptions) -> Result<ReduceOutcome> {
    let mut t = Triangulation::new(k)?;
    let d = t.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let reference: Option<Vec<HomologyGroup>> = opts.check_every.map(|_| homology_all(k));
    let initial_f_vector = k.f_vector().0;
    let mut best = k.clone();
    let mut best_size = t.num_facets();
    let mut trace = Vec::new();
    let mut homology_checks = 0;
    let mut step = 0;
    while !is_simplex_boundary(&t) && step < opts.budget {
        let temp = opts.schedule.temperature(step);
        let (mut lower, mut neutral, mut raise) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..=d {
            let class = match (2 * i).cmp(&d) {
                std::cmp::Ordering::Less => &mut lower,
                std::cmp::Ordering::Equal => &mut neutral,
                std::cmp::Ordering::Greater => &mut raise,
            };
            class.extend(t.admissible_moves(i));
        }
        let pick =
            |v: &Vec<BistellarMove>, rng: &mut ChaCha8Rng| v[rng.gen_range(0..v.len())].clone();
        let heat = rng.gen::<f64>() < temp;
        let m = if !lower.is_empty() && !heat {
            pick(&lower, &mut rng)
        } else if !neutral.is_empty() && (raise.is_empty() || !heat) {
            pick(&neutral, &mut rng)
        } else if !raise.is_empty() {
            pick(&raise, &mut rng)
        } else if !lower.is_empty() {
            pick(&lower, &mut rng)
        } else {
            break;
        };
        t.apply(&m)?;
        trace.push(m);
        step += 1;
        if t.num_facets() < best_size {
            best_size = t.num_facets();
            best = t.to_complex();
        }
        if let (Some(every), Some(h0)) = (opts.check_every, &reference) {
            if step % every == 0 {
                homology_checks += 1;
                if homology_all(&t.to_complex()) != *h0 {
                    return Err(AkError::Construction(format!(
                        "homology changed after move {step}"
                    )));
                }
            }
        }
    }
    let current = t.to_complex();
    let success = is_simplex_boundary(&t)
        && is_isomorphic(&current, &SimplicialComplex::boundary_of_simplex(d + 1));
    if success {
        best = current.clone();
    }
    Ok(ReduceOutcome {
        success,
        moves: step,
        trace,
        initial_f_vector,
        final_f_vector: current.f_vector().0,
        best_f_vector: best.f_vector().0,
        homology_checks,
        best,
    })
}

/// Replays a move trace from `k`.
pub fn replay(k: &SimplicialComplex, trace: &[BistellarMove]) -> Result<SimplicialComplex> {
    let mut t = Triangulation::new(k)?;
    for m in trace {
        t.apply(m)?;
    }
    Ok(t.to_complex())
}

/// `n` random raising moves, used to scramble a triangulation.
pub fn random_raising_moves(
    k: &SimplicialComplex,
    n: usize,
    seed: u64,
) -> Result<(SimplicialComplex, Vec<BistellarMove>)> {
    let mut t = Triangulation::new(k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Vec::new();
    for _ in 0..n {
        let moves: Vec<BistellarMove> = (t.dim.div_ceil(2)..=t.dim)
            .filter(|&i| 2 * i > t.dim)
            .flat_map(|i| t.admissible_moves(i))
            .collect();
        let m = moves[rng.gen_range(0..moves.len())].clone();
        t.apply(&m)?;
        trace.push(m);
    }
    Ok((t.to_complex(), trace))
}

/// Isomorphism test by backtracking over vertex bijections, with candidates
/// restricted to vertices of equal degree.
pub fn is_isomorphic(a: &SimplicialComplex, b: &SimplicialComplex) -> bool {
    if a.f_vector() != b.f_vector() {
        return false;
    }
    let degree = |k: &SimplicialComplex| -> HashMap<Vertex, usize> {
        k.vertex_support()
            .into_iter()
            .map(|v| (v, k.facets_containing_vertex(v).len()))
            .collect()
    };
    let (da, db) = (degree(a), degree(b));
    let mut sa: Vec<usize> = da.values().copied().collect();
    let mut sb: Vec<usize> = db.values().copied().collect();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    let mut va: Vec<Vertex> = da.keys().copied().collect();
    va.sort_by_key(|v| (da[v], *v));
    let bset: HashSet<&Simplex> = b.facets().iter().collect();
    fn extend(
        i: usize,
        va: &[Vertex],
        a: &SimplicialComplex,
        da: &HashMap<Vertex, usize>,
        db: &HashMap<Vertex, usize>,
        bset: &HashSet<&Simplex>,
        map: &mut HashMap<Vertex, Vertex>,
        used: &mut HashSet<Vertex>,
    ) -> bool {
        if i == va.len() {
            return true;
        }
        let v = va[i];
        let mut cands: Vec<Vertex> = db
            .iter()
            .filter(|(w, d)| **d == da[&v] && !used.contains(*w))
            .map(|(w, _)| *w)
            .collect();
        cands.sort_unstable();
        for w in cands {
            map.insert(v, w);
            let ok = a.facets_containing_vertex(v).iter().all(|&fi| {
                let f = &a.facets()[fi];
                match f
                    .vertices()
                    .iter()
                    .map(|x| map.get(x).copied())
                    .collect::<Option<Vec<_>>>()
                {
                    Some(img) => bset.contains(&Simplex::new(img)),
                    None => true,
                }
            });
            if ok {
                used.insert(w);
                if extend(i + 1, va, a, da, db, bset, map, used) {
                    return true;
                }
                used.remove(&w);
            }
            map.remove(&v);
        }
        false
    }
    extend(
        0,
        &va,
        a,
        &da,
        &db,
        &bset,
        &mut HashMap::new(),
        &mut HashSet::new(),
    )
}
