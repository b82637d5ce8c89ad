//! Random discrete Morse theory: collapse free faces at random, delete a
//! random top face when stuck, and count the deletions per dimension.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AkError, Result};
use crate::simplicial::SimplicialComplex;

/// Critical cells per dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MorseVector(pub Vec<u64>);

impl MorseVector {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

impl fmt::Display for MorseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The face lattice of a complex with boundary incidences, built once and
/// shared by all runs. Faces are numbered dimension by dimension.
pub struct FaceIndex {
    offsets: Vec<usize>,
    /// Boundary faces of every face of dimension ≥ 1, `dim + 1` per face.
    boundary: Vec<u32>,
    boundary_start: Vec<usize>,
    cofaces: Vec<u32>,
    coface_start: Vec<usize>,
    coface_list: Vec<u32>,
}

impl FaceIndex {
    pub fn new(k: &SimplicialComplex) -> Self {
        let dims = (k.dim() + 1).max(0) as usize;
        let mut offsets = vec![0];
        for d in 0..dims {
            offsets.push(offsets[d] + k.faces(d).len());
        }
        let n = *offsets.last().unwrap();
        let mut boundary = Vec::new();
        let mut boundary_start = Vec::with_capacity(n + 1);
        let mut cofaces = vec![0u32; n];
        for d in 0..offsets.len() - 1 {
            let faces = k.faces(d);
            let per: Vec<Vec<u32>> = faces
                .par_iter()
                .map(|s| {
                    if d == 0 {
                        return Vec::new();
                    }
                    s.boundary()
                        .iter()
                        .map(|b| (offsets[d - 1] + k.face_position(b).expect("face closed")) as u32)
                        .collect()
                })
                .collect();
            for bs in per {
                boundary_start.push(boundary.len());
                for &b in &bs {
                    cofaces[b as usize] += 1;
                }
                boundary.extend(bs);
            }
        }
        boundary_start.push(boundary.len());
        let mut coface_start = vec![0usize; n + 1];
        for f in 0..n {
            coface_start[f + 1] = coface_start[f] + cofaces[f] as usize;
        }
        let mut fill = coface_start.clone();
        let mut coface_list = vec![0u32; boundary.len()];
        for f in 0..n {
            for &b in &boundary[boundary_start[f]..boundary_start[f + 1]] {
                coface_list[fill[b as usize]] = f as u32;
                fill[b as usize] += 1;
            }
        }
        FaceIndex {
            offsets,
            boundary,
            boundary_start,
            cofaces,
            coface_start,
            coface_list,
        }
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim_count(&self) -> usize {
        self.offsets.len() - 1
    }

    fn dim_of(&self, face: usize) -> usize {
        self.offsets.partition_point(|&o| o <= face) - 1
    }

    fn boundary_of(&self, face: usize) -> &[u32] {
        &self.boundary[self.boundary_start[face]..self.boundary_start[face + 1]]
    }

    fn cofaces_of(&self, face: usize) -> &[u32] {
        &self.coface_list[self.coface_start[face]..self.coface_start[face + 1]]
    }
}

/// A set of face ids with O(1) insert, remove and uniform sampling.
struct IndexedSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl IndexedSet {
    fn new(n: usize) -> Self {
        IndexedSet {
            items: Vec::new(),
            pos: vec![ABSENT; n],
        }
    }

    fn insert(&mut self, x: u32) {
        if self.pos[x as usize] == ABSENT {
            self.pos[x as usize] = self.items.len() as u32;
            self.items.push(x);
        }
    }

    fn remove(&mut self, x: u32) {
        let p = self.pos[x as usize];
        if p != ABSENT {
            let last = self.items.pop().unwrap();
            if last != x {
                self.items[p as usize] = last;
                self.pos[last as usize] = p;
            }
            self.pos[x as usize] = ABSENT;
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Option<u32> {
        (!self.items.is_empty()).then(|| self.items[rng.gen_range(0..self.items.len())])
    }
}

/// One run of the heuristic on a prebuilt face index.
pub fn random_morse_indexed(index: &FaceIndex, seed: u64) -> MorseVector {
    let n = index.len();
    let dims = index.dim_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = index.cofaces.clone();
    let mut free = IndexedSet::new(n);
    let mut live: Vec<IndexedSet> = (0..dims).map(|_| IndexedSet::new(n)).collect();
    for f in 0..n {
        live[index.dim_of(f)].insert(f as u32);
        if count[f] == 1 {
            free.insert(f as u32);
        }
    }
    let mut critical = vec![0u64; dims];
    let mut top = dims;
    let remove =
        |f: u32, count: &mut Vec<u32>, free: &mut IndexedSet, live: &mut Vec<IndexedSet>| {
            free.remove(f);
            live[index.dim_of(f as usize)].remove(f);
            for &b in index.boundary_of(f as usize) {
                count[b as usize] -= 1;
                match count[b as usize] {
                    1 => free.insert(b),
                    0 => free.remove(b),
                    _ => {}
                }
            }
        };
    loop {
        if let Some(sigma) = free.sample(&mut rng) {
            let d = index.dim_of(sigma as usize);
            let tau = *index
                .cofaces_of(sigma as usize)
                .iter()
                .find(|&&t| live[d + 1].pos[t as usize] != ABSENT)
                .expect("free face has a live coface");
            remove(tau, &mut count, &mut free, &mut live);
            remove(sigma, &mut count, &mut free, &mut live);
            continue;
        }
        while top > 0 && live[top - 1].items.is_empty() {
            top -= 1;
        }
        if top == 0 {
            break;
        }
        let f = live[top - 1].sample(&mut rng).unwrap();
        critical[top - 1] += 1;
        remove(f, &mut count, &mut free, &mut live);
    }
    MorseVector(critical)
}

pub fn random_morse(k: &SimplicialComplex, seed: u64) -> Result<MorseVector> {
    if k.is_empty() {
        return Err(AkError::Construction(
            "random Morse needs a nonempty complex".into(),
        ));
    }
    Ok(random_morse_indexed(&FaceIndex::new(k), seed))
}

/// Seed of run `index` under `master`: two rounds of SplitMix64 mixing.
pub fn run_seed(master: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(master) ^ index)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseRunStats {
    pub runs: usize,
    pub master_seed: u64,
    pub vectors: Vec<MorseVector>,
    /// Sum of critical cells over all runs; the mean is this over `runs`.
    pub total_critical: u64,
    pub mean_critical: f64,
    /// Vector (as text) → number of runs producing it.
    pub histogram: BTreeMap<String, usize>,
    pub best: MorseVector,
    pub best_count: usize,
}

impl MorseRunStats {
    fn from_vectors(master_seed: u64, vectors: Vec<MorseVector>) -> Self {
        let total_critical: u64 = vectors.iter().map(|v| v.total()).sum();
        let mut histogram = BTreeMap::new();
        for v in &vectors {
            *histogram.entry(v.to_string()).or_insert(0) += 1;
        }
        let best = vectors
            .iter()
            .min_by(|a, b| a.total().cmp(&b.total()).then(a.cmp(b)))
            .unwrap()
            .clone();
        let best_count = vectors.iter().filter(|v| **v == best).count();
        MorseRunStats {
            runs: vectors.len(),
            master_seed,
            mean_critical: total_critical as f64 / vectors.len() as f64,
            total_critical,
            histogram,
            best,
            best_count,
            vectors,
        }
    }
}

/// `runs` independent runs spread over `workers` threads (0 means the
/// global pool). The result does not depend on `workers`.
pub fn morse_experiment(
    k: &SimplicialComplex,
    runs: usize,
    master_seed: u64,
    workers: usize,
) -> Result<MorseRunStats> {
    if runs == 0 {
        return Err(AkError::Construction("at least one run is needed".into()));
    }
    if k.is_empty() {
        return Err(AkError::Construction(
            "random Morse needs a nonempty complex".into(),
        ));
    }
    let index = FaceIndex::new(k);
    let work = || -> Vec<MorseVector> {
        (0..runs as u64)
            .into_par_iter()
            .map(|i| random_morse_indexed(&index, run_seed(master_seed, i)))
            .collect()
    };
    let vectors = if workers == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| AkError::Construction(e.to_string()))?
            .install(work)
    };
    Ok(MorseRunStats::from_vectors(master_seed, vectors))
}
