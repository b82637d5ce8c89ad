//! The genus-2 handlebody carrying the blue and red relator curves.
//!
//! Each foot of a 1-handle is a strip of triangles ("teeth") separated by
//! rectangles. A relator curve crosses a handle through a triangular prism
//! joining a tooth on one foot to the mirrored tooth on the other foot, and
//! runs through the ball as a prism joining consecutive teeth. All ball
//! strands except two lie on the boundary sphere of a core ball without
//! crossing; the complementary regions are filled by membranes and the core is
//! a cone. Each of the two remaining strands passes over one other strand and
//! sits on a pillow: a cone glued onto the core along a disk. That makes three
//! cone fills in total.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::words::{relator_words, Generator, Letter, RelatorWord, StrandRegion};
use crate::error::{AkError, Result};
use crate::linalg::homology_all;
use crate::product::OrderedComplex;
use crate::simplicial::{Simplex, SimplicialComplex, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionTag {
    Ball,
    HandleX,
    HandleY,
    BlueTorus,
    RedTorus,
    Buffer,
    Membrane,
    ConeFill,
    Handle2Blue,
    Handle2Red,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Blue,
    Red,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::Blue, Color::Red];

    pub fn torus_tag(self) -> RegionTag {
        match self {
            Color::Blue => RegionTag::BlueTorus,
            Color::Red => RegionTag::RedTorus,
        }
    }

    pub fn handle_tag(self) -> RegionTag {
        match self {
            Color::Blue => RegionTag::Handle2Blue,
            Color::Red => RegionTag::Handle2Red,
        }
    }
}

/// One prism block of a relator curve, in word order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainBlock {
    pub position: usize,
    pub region: StrandRegion,
    pub facets: Vec<Simplex>,
}

/// A complex whose facets carry region tags, plus the two relator chains.
#[derive(Clone, Debug)]
pub struct LabeledComplex {
    pub complex: OrderedComplex,
    pub tags: HashMap<Simplex, RegionTag>,
    pub blue_chain: Vec<ChainBlock>,
    pub red_chain: Vec<ChainBlock>,
    /// Cross-section label (0, 1 or 2) of every torus vertex.
    pub section_labels: HashMap<Vertex, u8>,
}

impl LabeledComplex {
    pub fn chain(&self, color: Color) -> &[ChainBlock] {
        match color {
            Color::Blue => &self.blue_chain,
            Color::Red => &self.red_chain,
        }
    }

    pub fn tag_counts(&self) -> BTreeMap<RegionTag, usize> {
        let mut m = BTreeMap::new();
        for t in self.tags.values() {
            *m.entry(*t).or_insert(0) += 1;
        }
        m
    }

    pub fn facets_tagged(&self, tag: RegionTag) -> SimplicialComplex {
        self.complex
            .complex
            .filter_facets(|s| self.tags.get(s) == Some(&tag))
    }

    pub fn torus(&self, color: Color) -> SimplicialComplex {
        self.facets_tagged(color.torus_tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandlebodyStats {
    pub blue_word: String,
    pub red_word: String,
    pub blue_strands: usize,
    pub red_strands: usize,
    pub x_slots: usize,
    pub y_slots: usize,
    pub x_buffers: usize,
    pub y_buffers: usize,
    pub planar_ball_strands: usize,
    pub crossing_ball_strands: usize,
    pub membranes: usize,
    pub membrane_centres: usize,
    pub pillow_centres: usize,
    pub cone_fills: usize,
    pub f_vector: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct Handlebody {
    pub labeled: LabeledComplex,
    pub stats: HandlebodyStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Foot {
    XA,
    XB,
    YA,
    YB,
}

impl Foot {
    fn of(gen: Generator, a_side: bool) -> Foot {
        match (gen, a_side) {
            (Generator::X, true) => Foot::XA,
            (Generator::X, false) => Foot::XB,
            (Generator::Y, true) => Foot::YA,
            (Generator::Y, false) => Foot::YB,
        }
    }
}

/// A cross-section triangle on a handle foot: left base, right base, apex.
#[derive(Clone, Copy, Debug)]
struct Tooth {
    foot: Foot,
    index: usize,
    l: Vertex,
    r: Vertex,
    a: Vertex,
}

#[derive(Clone, Copy, Debug)]
struct Rung {
    from: usize,
    to: usize,
    color: Color,
    position: usize,
    crossing: bool,
}

struct Curve {
    color: Color,
    word: RelatorWord,
    /// Tooth id of every cross-section, in curve order.
    sections: Vec<usize>,
}

/// One entry of a handle's slot order: a blue letter (by its index in the
/// blue word) or the whole block of red letters on that handle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Unit {
    Blue(usize),
    Red,
}

/// Order of the strands across each handle and the ball strands that pass
/// over another strand. A crossing strand is named by its colour and the
/// index of the letter it leaves; red indices count from the end of the
/// x block (0 leaves the last x, 1 leaves the last Y).
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct LayoutSpec {
    pub x: [Unit; 4],
    pub y: [Unit; 4],
    pub x_red_ascending: bool,
    pub y_red_ascending: bool,
    pub crossing: Vec<(Color, usize)>,
}

pub(crate) fn layout() -> LayoutSpec {
    LayoutSpec {
        x: [Unit::Blue(0), Unit::Red, Unit::Blue(2), Unit::Blue(4)],
        y: [Unit::Blue(5), Unit::Red, Unit::Blue(3), Unit::Blue(1)],
        x_red_ascending: false,
        y_red_ascending: true,
        crossing: vec![(Color::Red, 0), (Color::Red, 1)],
    }
}

/// Slot of every letter of `word` on its handle.
fn letter_slots(
    plan: &LayoutSpec,
    color: Color,
    word: &RelatorWord,
    red_counts: [usize; 2],
) -> Vec<usize> {
    let mut slots = vec![usize::MAX; word.len()];
    for (gen, units, asc) in [
        (Generator::X, &plan.x, plan.x_red_ascending),
        (Generator::Y, &plan.y, plan.y_red_ascending),
    ] {
        let mut next = 0;
        for u in units {
            match (u, color) {
                (Unit::Blue(i), Color::Blue) => {
                    slots[*i] = next;
                    next += 1;
                }
                (Unit::Blue(_), Color::Red) => next += 1,
                (Unit::Red, Color::Red) => {
                    let mut idx: Vec<usize> = (0..word.len())
                        .filter(|&i| word.letters()[i].gen == gen)
                        .collect();
                    if !asc {
                        idx.reverse();
                    }
                    for i in idx {
                        slots[i] = next;
                        next += 1;
                    }
                }
                (Unit::Red, Color::Blue) => next += red_counts[gen as usize],
            }
        }
    }
    slots
}

struct Builder {
    next: Vertex,
    m_x: usize,
    m_y: usize,
    teeth: Vec<Tooth>,
    at: HashMap<(Foot, usize), usize>,
    curves: Vec<Curve>,
    rungs: Vec<Rung>,
    rung_of_tooth: HashMap<usize, usize>,
    edges: HashSet<(Vertex, Vertex)>,
    tets: Vec<(Simplex, RegionTag)>,
    blocks: HashMap<Color, Vec<ChainBlock>>,
    membrane_centres: usize,
    pillow_centres: usize,
}

#[derive(Clone, Debug)]
struct Polygon {
    verts: Vec<Vertex>,
    tris: Vec<Simplex>,
    kind: PolyKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PolyKind {
    Rect,
    DQuad,
    RQuad,
    Tooth,
    Membrane,
}

fn edge(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    (a.min(b), a.max(b))
}

/// Fan from the smallest vertex, i.e. the pulling triangulation of a polygon.
fn fan_min(poly: &[Vertex]) -> Vec<Simplex> {
    let n = poly.len();
    let p = (0..n).min_by_key(|&i| poly[i]).unwrap();
    (1..n - 1)
        .map(|k| Simplex::from([poly[p], poly[(p + k) % n], poly[(p + k + 1) % n]]))
        .collect()
}

/// Pulling triangulation of a convex 3-cell from its smallest vertex.
fn pull_cell(faces: &[Vec<Vertex>]) -> Vec<Simplex> {
    let m = faces.iter().flatten().copied().min().unwrap();
    faces
        .iter()
        .filter(|f| !f.contains(&m))
        .flat_map(|f| fan_min(f))
        .map(|t| t.with(m))
        .collect()
}

fn tri_prism(b: [Vertex; 3], t: [Vertex; 3]) -> Vec<Simplex> {
    let mut faces = vec![b.to_vec(), t.to_vec()];
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        faces.push(vec![b[i], b[j], t[j], t[i]]);
    }
    pull_cell(&faces)
}

fn quad_prism(b: [Vertex; 4], t: [Vertex; 4]) -> Vec<Simplex> {
    let mut faces = vec![b.to_vec(), t.to_vec()];
    for i in 0..4 {
        let j = (i + 1) % 4;
        faces.push(vec![b[i], b[j], t[j], t[i]]);
    }
    pull_cell(&faces)
}

impl Builder {
    fn fresh(&mut self) -> Vertex {
        let v = self.next;
        self.next += 1;
        v
    }

    fn m(&self, gen: Generator) -> usize {
        match gen {
            Generator::X => self.m_x,
            Generator::Y => self.m_y,
        }
    }

    fn foot_len(&self, foot: Foot) -> usize {
        match foot {
            Foot::XA | Foot::XB => self.m_x,
            Foot::YA | Foot::YB => self.m_y,
        }
    }

    fn tooth(&self, foot: Foot, index: usize) -> Tooth {
        self.teeth[self.at[&(foot, index)]]
    }

    fn new(r: usize, plan: &LayoutSpec) -> Result<Self> {
        let (blue, red) = relator_words(r)?;
        let m_x = r + 3;
        let m_y = r + 2;
        let mut b = Builder {
            next: 0,
            m_x,
            m_y,
            teeth: Vec::new(),
            at: HashMap::new(),
            curves: Vec::new(),
            rungs: Vec::new(),
            rung_of_tooth: HashMap::new(),
            edges: HashSet::new(),
            tets: Vec::new(),
            blocks: HashMap::new(),
            membrane_centres: 0,
            pillow_centres: 0,
        };
        for (color, word) in [(Color::Blue, blue), (Color::Red, red)] {
            let slots = letter_slots(plan, color, &word, [r, r - 1]);
            let mut sections = Vec::new();
            for (l, &slot) in word.letters().iter().zip(&slots) {
                let m = b.m(l.gen);
                let p = slot;
                let a_end = (Foot::of(l.gen, true), p);
                let b_end = (Foot::of(l.gen, false), m - 1 - p);
                let (entry, exit) = if l.inverse {
                    (b_end, a_end)
                } else {
                    (a_end, b_end)
                };
                for (foot, index) in [entry, exit] {
                    if b.at.contains_key(&(foot, index)) {
                        return Err(AkError::Construction(format!(
                            "slot clash on {foot:?}:{index}"
                        )));
                    }
                    b.at.insert((foot, index), b.teeth.len());
                    sections.push(b.teeth.len());
                    b.teeth.push(Tooth {
                        foot,
                        index,
                        l: 0,
                        r: 0,
                        a: 0,
                    });
                }
            }
            b.curves.push(Curve {
                color,
                word,
                sections,
            });
        }
        for foot in [Foot::XA, Foot::XB, Foot::YA, Foot::YB] {
            for i in 0..b.foot_len(foot) {
                if !b.at.contains_key(&(foot, i)) {
                    return Err(AkError::Construction(format!("empty slot {foot:?}:{i}")));
                }
            }
        }
        // Label-major allocation: every label-0 vertex precedes every label-1
        // vertex, which precedes every label-2 vertex. Cross-section k has
        // labels (L, R, A) = (0, 1, 2) for even k and (1, 0, 2) for odd k.
        for label in 0..3u8 {
            for c in 0..b.curves.len() {
                for k in 0..b.curves[c].sections.len() {
                    let t = b.curves[c].sections[k];
                    let v = b.fresh();
                    let tooth = &mut b.teeth[t];
                    match (label, k % 2) {
                        (0, 0) | (1, 1) => tooth.l = v,
                        (1, 0) | (0, 1) => tooth.r = v,
                        _ => tooth.a = v,
                    }
                }
            }
        }
        for curve in &b.curves {
            let n = curve.word.len();
            for i in 0..n {
                let crossing = plan.crossing.iter().any(|&(c, j)| {
                    c == curve.color
                        && match c {
                            Color::Blue => j == i,
                            Color::Red => (j == 0 && i + 1 == r) || (j == 1 && i + 1 == n),
                        }
                });
                b.rungs.push(Rung {
                    from: curve.sections[2 * i + 1],
                    to: curve.sections[(2 * i + 2) % (2 * n)],
                    color: curve.color,
                    position: 2 * i + 1,
                    crossing,
                });
            }
        }
        for (i, rung) in b.rungs.iter().enumerate() {
            if !rung.crossing {
                b.rung_of_tooth.insert(rung.from, i);
                b.rung_of_tooth.insert(rung.to, i);
            } else {
                for t in [rung.from, rung.to] {
                    let tooth = b.teeth[t];
                    if tooth.index == 0 || tooth.index + 1 == b.foot_len(tooth.foot) {
                        return Err(AkError::Construction(
                            "crossing strand at a strip end".into(),
                        ));
                    }
                }
            }
        }
        Ok(b)
    }

    fn push_block(
        &mut self,
        color: Color,
        position: usize,
        region: StrandRegion,
        tets: Vec<Simplex>,
    ) {
        for t in &tets {
            self.tets.push((t.clone(), color.torus_tag()));
        }
        self.blocks.entry(color).or_default().push(ChainBlock {
            position,
            region,
            facets: tets,
        });
    }

    fn build_handles(&mut self) {
        for ci in 0..self.curves.len() {
            let color = self.curves[ci].color;
            let letters: Vec<Letter> = self.curves[ci].word.letters().to_vec();
            for (i, l) in letters.iter().enumerate() {
                let (s0, s1) = (
                    self.curves[ci].sections[2 * i],
                    self.curves[ci].sections[2 * i + 1],
                );
                let (ta, tb) = if l.inverse { (s1, s0) } else { (s0, s1) };
                let (a, b) = (self.teeth[ta], self.teeth[tb]);
                let region = match l.gen {
                    Generator::X => StrandRegion::HandleX,
                    Generator::Y => StrandRegion::HandleY,
                };
                self.push_block(
                    color,
                    2 * i,
                    region,
                    tri_prism([a.l, a.r, a.a], [b.r, b.l, b.a]),
                );
            }
        }
        for gen in [Generator::X, Generator::Y] {
            let m = self.m(gen);
            let tag = match gen {
                Generator::X => RegionTag::HandleX,
                Generator::Y => RegionTag::HandleY,
            };
            for i in 0..m - 1 {
                let (a0, a1) = (
                    self.tooth(Foot::of(gen, true), i),
                    self.tooth(Foot::of(gen, true), i + 1),
                );
                let (b0, b1) = (
                    self.tooth(Foot::of(gen, false), m - 1 - i),
                    self.tooth(Foot::of(gen, false), m - 2 - i),
                );
                for t in quad_prism([a0.r, a0.a, a1.a, a1.l], [b0.l, b0.a, b1.a, b1.r]) {
                    self.tets.push((t, tag));
                }
            }
        }
    }

    fn build_rung_prisms(&mut self) {
        for k in 0..self.rungs.len() {
            let rung = self.rungs[k];
            let (p, q) = (self.teeth[rung.from], self.teeth[rung.to]);
            self.push_block(
                rung.color,
                rung.position,
                StrandRegion::Ball,
                tri_prism([p.l, p.r, p.a], [q.r, q.l, q.a]),
            );
        }
    }

    fn register_edges(&mut self) {
        for (t, _) in &self.tets {
            let v = t.vertices();
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    self.edges.insert((v[i], v[j]));
                }
            }
        }
    }

    /// Triangulates a membrane polygon: a fan from its smallest vertex when
    /// that adds no edge already present, otherwise a cone from a fresh centre.
    fn membrane(&mut self, poly: &[Vertex], pillow: bool) -> Vec<Simplex> {
        let n = poly.len();
        if n == 3 {
            return vec![Simplex::new(poly.iter().copied())];
        }
        let p = (0..n).min_by_key(|&i| poly[i]).unwrap();
        let chords: Vec<(Vertex, Vertex)> = (2..n - 1)
            .map(|k| edge(poly[p], poly[(p + k) % n]))
            .collect();
        if chords.iter().all(|e| !self.edges.contains(e)) {
            self.edges.extend(chords);
            return fan_min(poly);
        }
        let c = self.fresh();
        if pillow {
            self.pillow_centres += 1;
        } else {
            self.membrane_centres += 1;
        }
        for &v in poly {
            self.edges.insert(edge(v, c));
        }
        (0..n)
            .map(|i| Simplex::from([c, poly[i], poly[(i + 1) % n]]))
            .collect()
    }

    fn rquad(&self, k: usize) -> Vec<Vertex> {
        let (p, q) = (self.teeth[self.rungs[k].from], self.teeth[self.rungs[k].to]);
        vec![p.l, p.r, q.l, q.r]
    }

    fn dquads(&self, k: usize) -> [Vec<Vertex>; 2] {
        let (p, q) = (self.teeth[self.rungs[k].from], self.teeth[self.rungs[k].to]);
        [vec![p.a, p.l, q.r, q.a], vec![p.a, p.r, q.l, q.a]]
    }

    /// Boundary walks of the complementary regions of the planar strands.
    fn trace_membranes(&self) -> Result<Vec<Vec<Vertex>>> {
        let partner = |t: usize| -> usize {
            let r = self.rungs[self.rung_of_tooth[&t]];
            if r.from == t {
                r.to
            } else {
                r.from
            }
        };
        let mut used: HashSet<usize> = HashSet::new();
        let mut faces = Vec::new();
        let mut starts: Vec<usize> = self.rung_of_tooth.keys().copied().collect();
        starts.sort_unstable();
        for start in starts {
            if used.contains(&start) {
                continue;
            }
            let mut seq = Vec::new();
            let mut x = start;
            loop {
                used.insert(x);
                // Leave tooth x along its rail from R, arriving at L of the partner.
                seq.push(self.teeth[x].r);
                let mut j = partner(x);
                x = loop {
                    let t = self.teeth[j];
                    seq.push(t.l);
                    let m = self.foot_len(t.foot);
                    let prev = if t.index > 0 {
                        self.at[&(t.foot, t.index - 1)]
                    } else {
                        seq.extend((0..m).map(|i| self.tooth(t.foot, i).a));
                        self.at[&(t.foot, m - 1)]
                    };
                    if self.rung_of_tooth.contains_key(&prev) {
                        break prev;
                    }
                    // A tooth without a planar strand is walked around.
                    let p = self.teeth[prev];
                    seq.push(p.r);
                    seq.push(p.a);
                    j = prev;
                };
                if x == start {
                    break;
                }
                if used.contains(&x) {
                    return Err(AkError::Construction(
                        "membrane walk re-entered a rail".into(),
                    ));
                }
            }
            let mut seen = HashSet::new();
            if !seq.iter().all(|v| seen.insert(*v)) {
                return Err(AkError::Construction(
                    "membrane boundary repeats a vertex".into(),
                ));
            }
            faces.push(seq);
        }
        Ok(faces)
    }
}

/// Cyclic boundary of a union of polygons forming a disk.
fn disk_boundary(polys: &[&Polygon]) -> Result<Vec<Vertex>> {
    let mut count: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    for p in polys {
        let n = p.verts.len();
        for i in 0..n {
            *count
                .entry(edge(p.verts[i], p.verts[(i + 1) % n]))
                .or_insert(0) += 1;
        }
    }
    let mut adj: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    for (&(a, b), &c) in &count {
        if c == 1 {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
    }
    if adj.values().any(|v| v.len() != 2) {
        return Err(AkError::Construction("pillow base is not a disk".into()));
    }
    let start = *adj.keys().min().unwrap();
    let mut cycle = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0];
    while cur != start {
        cycle.push(cur);
        let nb = &adj[&cur];
        let nxt = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = nxt;
    }
    if cycle.len() != adj.len() {
        return Err(AkError::Construction(
            "pillow base boundary is not one cycle".into(),
        ));
    }
    Ok(cycle)
}

fn has_path(poly: &[Vertex], a: Vertex, b: Vertex, c: Vertex) -> bool {
    let n = poly.len();
    (0..n).any(|i| {
        let (x, y, z) = (poly[i], poly[(i + 1) % n], poly[(i + 2) % n]);
        (x, y, z) == (a, b, c) || (x, y, z) == (c, b, a)
    })
}

fn shares_edge(p: &Polygon, q: &Polygon) -> bool {
    let es = |v: &[Vertex]| -> HashSet<(Vertex, Vertex)> {
        (0..v.len())
            .map(|i| edge(v[i], v[(i + 1) % v.len()]))
            .collect()
    };
    !es(&p.verts).is_disjoint(&es(&q.verts))
}

pub fn build_handlebody(r: usize) -> Result<Handlebody> {
    build_with_layout(r, &layout())
}

pub(crate) fn build_with_layout(r: usize, plan: &LayoutSpec) -> Result<Handlebody> {
    let mut b = Builder::new(r, plan)?;
    let (blue, red) = relator_words(r)?;
    b.build_handles();
    b.build_rung_prisms();
    b.register_edges();

    // The core sphere: foot rectangles, strand quads and membranes.
    let mut surface: Vec<Polygon> = Vec::new();
    for foot in [Foot::XA, Foot::XB, Foot::YA, Foot::YB] {
        for i in 0..b.foot_len(foot) - 1 {
            let (t0, t1) = (b.tooth(foot, i), b.tooth(foot, i + 1));
            let verts = vec![t0.r, t0.a, t1.a, t1.l];
            surface.push(Polygon {
                tris: fan_min(&verts),
                verts,
                kind: PolyKind::Rect,
            });
        }
    }
    let planar: Vec<usize> = (0..b.rungs.len())
        .filter(|&k| !b.rungs[k].crossing)
        .collect();
    let crossing: Vec<usize> = (0..b.rungs.len())
        .filter(|&k| b.rungs[k].crossing)
        .collect();
    for &k in &planar {
        for q in b.dquads(k) {
            surface.push(Polygon {
                tris: fan_min(&q),
                verts: q,
                kind: PolyKind::DQuad,
            });
        }
    }
    let walks = b.trace_membranes()?;
    let membranes = walks.len();
    // Euler check for the planar strand map on the four feet.
    if 4 + membranes != 2 + planar.len() {
        return Err(AkError::Construction(format!(
            "strand map is not planar: {} strands, {} regions",
            planar.len(),
            membranes
        )));
    }
    for w in walks {
        let tris = b.membrane(&w, false);
        surface.push(Polygon {
            verts: w,
            tris,
            kind: PolyKind::Membrane,
        });
    }
    let core =
        SimplicialComplex::from_maximal(surface.iter().flat_map(|p| p.tris.clone()).collect());
    check_sphere(&core, "core sphere")?;
    let apex = b.fresh();
    for p in &surface {
        let tag = match p.kind {
            PolyKind::Rect => RegionTag::Buffer,
            PolyKind::Membrane => RegionTag::Membrane,
            _ => RegionTag::Ball,
        };
        for t in &p.tris {
            b.tets.push((t.with(apex), tag));
        }
    }
    // Planar strands now expose their rail quads and end triangles.
    let expose = |b: &Builder, surface: &mut Vec<Polygon>, k: usize| {
        surface
            .retain(|p| !(p.kind == PolyKind::DQuad && b.dquads(k).iter().any(|q| q == &p.verts)));
        let q = b.rquad(k);
        surface.push(Polygon {
            tris: fan_min(&q),
            verts: q,
            kind: PolyKind::RQuad,
        });
        for t in [b.rungs[k].from, b.rungs[k].to] {
            let t = b.teeth[t];
            let v = vec![t.l, t.r, t.a];
            surface.push(Polygon {
                tris: fan_min(&v),
                verts: v,
                kind: PolyKind::Tooth,
            });
        }
    };
    for &k in &planar {
        expose(&b, &mut surface, k);
    }
    for &k in &crossing {
        let (w, e) = (b.teeth[b.rungs[k].from], b.teeth[b.rungs[k].to]);
        let find = |t: &Tooth| {
            surface
                .iter()
                .position(|p| p.kind == PolyKind::Membrane && has_path(&p.verts, t.r, t.a, t.l))
                .ok_or_else(|| AkError::Construction("no membrane around a crossing tooth".into()))
        };
        let (fw, fe) = (find(&w)?, find(&e)?);
        if fw == fe {
            return Err(AkError::Construction(
                "crossing strand ends share a membrane".into(),
            ));
        }
        let under: Vec<usize> = (0..surface.len())
            .filter(|&i| {
                surface[i].kind == PolyKind::RQuad
                    && shares_edge(&surface[i], &surface[fw])
                    && shares_edge(&surface[i], &surface[fe])
            })
            .collect();
        if under.len() != 1 {
            return Err(AkError::Construction(format!(
                "crossing strand passes over {} strands",
                under.len()
            )));
        }
        let base = [&surface[fw], &surface[under[0]], &surface[fe]];
        let cycle = disk_boundary(&base)?;
        // Split the base boundary at the two apexes into the two side arcs.
        let n = cycle.len();
        let s = cycle.iter().position(|&v| v == w.a).unwrap();
        let rot: Vec<Vertex> = (0..n).map(|i| cycle[(s + i) % n]).collect();
        let ea = rot
            .iter()
            .position(|&v| v == e.a)
            .ok_or_else(|| AkError::Construction("apex missing".into()))?;
        let arc1 = rot[1..ea].to_vec();
        let arc2: Vec<Vertex> = rot[ea + 1..].to_vec();
        let ok = |arc: &[Vertex]| {
            let (x, y) = (arc[0], *arc.last().unwrap());
            (x == w.l && y == e.r)
                || (x == w.r && y == e.l)
                || (x == e.r && y == w.l)
                || (x == e.l && y == w.r)
        };
        if arc1.len() < 2 || arc2.len() < 2 || !ok(&arc1) || !ok(&arc2) {
            return Err(AkError::Construction(
                "pillow sides do not match the strand orientation".into(),
            ));
        }
        let mut caps = Vec::new();
        for arc in [arc1, arc2] {
            let tris = b.membrane(&arc, true);
            caps.push(Polygon {
                verts: arc,
                tris,
                kind: PolyKind::Membrane,
            });
        }
        let top: Vec<Simplex> = b.dquads(k).iter().flat_map(|q| fan_min(q)).collect();
        let pillow = SimplicialComplex::from_maximal(
            base.iter()
                .flat_map(|p| p.tris.clone())
                .chain(caps.iter().flat_map(|p| p.tris.clone()))
                .chain(top)
                .collect(),
        );
        check_sphere(&pillow, "pillow boundary")?;
        let apex = b.fresh();
        for t in pillow.facets() {
            b.tets.push((t.with(apex), RegionTag::ConeFill));
        }
        let mut drop = [fw, fe, under[0]];
        drop.sort_unstable();
        for i in drop.iter().rev() {
            surface.remove(*i);
        }
        surface.extend(caps);
        expose(&b, &mut surface, k);
    }

    let tags: HashMap<Simplex, RegionTag> = b.tets.iter().cloned().collect();
    if tags.len() != b.tets.len() {
        return Err(AkError::Construction("duplicate tetrahedron".into()));
    }
    let complex = SimplicialComplex::from_maximal(b.tets.iter().map(|(t, _)| t.clone()).collect());
    let order: Vec<Vertex> = (0..b.next).collect();
    let complex = OrderedComplex::new(complex, order)?;
    let mut section_labels = HashMap::new();
    for curve in &b.curves {
        for (k, &t) in curve.sections.iter().enumerate() {
            let t = b.teeth[t];
            let (l, rr) = if k % 2 == 0 { (0, 1) } else { (1, 0) };
            section_labels.insert(t.l, l);
            section_labels.insert(t.r, rr);
            section_labels.insert(t.a, 2);
        }
    }
    let mut chain = |c: Color| {
        let mut v = b.blocks.remove(&c).unwrap_or_default();
        v.sort_by_key(|blk| blk.position);
        v
    };
    let (blue_chain, red_chain) = (chain(Color::Blue), chain(Color::Red));
    let stats = HandlebodyStats {
        blue_word: blue.to_string(),
        red_word: red.to_string(),
        blue_strands: blue_chain.len(),
        red_strands: red_chain.len(),
        x_slots: b.m_x,
        y_slots: b.m_y,
        x_buffers: b.m_x - 1,
        y_buffers: b.m_y - 1,
        planar_ball_strands: planar.len(),
        crossing_ball_strands: crossing.len(),
        membranes,
        membrane_centres: b.membrane_centres,
        pillow_centres: b.pillow_centres,
        cone_fills: 1 + crossing.len(),
        f_vector: complex.complex.f_vector().0,
    };
    Ok(Handlebody {
        labeled: LabeledComplex {
            complex,
            tags,
            blue_chain,
            red_chain,
            section_labels,
        },
        stats,
    })
}

fn check_sphere(k: &SimplicialComplex, what: &str) -> Result<()> {
    if let Err(e) = k.pseudomanifold_check() {
        return Err(AkError::Construction(format!("{what}: {e}")));
    }
    if k.euler_characteristic() != 2 {
        return Err(AkError::Construction(format!(
            "{what}: Euler characteristic {}",
            k.euler_characteristic()
        )));
    }
    for v in k.vertex_support() {
        let l = k.link(&Simplex::from([v]))?;
        if !l.is_closed_pseudomanifold() || l.euler_characteristic() != 0 {
            return Err(AkError::Construction(format!(
                "{what}: link of {v} is not a circle"
            )));
        }
    }
    Ok(())
}

/// Checks that a pure 3-complex is a manifold with boundary whose homology is
/// that of a genus-2 handlebody.
pub fn verify_handlebody(h: &SimplicialComplex) -> Result<()> {
    if h.dim() != 3 || !h.is_pure() {
        return Err(AkError::Construction(
            "handlebody is not a pure 3-complex".into(),
        ));
    }
    for v in h.vertex_support() {
        let l = h.link(&Simplex::from([v]))?;
        let chi = l.euler_characteristic();
        let bd = l.boundary_complex()?;
        let ok = if bd.is_empty() {
            l.is_closed_pseudomanifold() && chi == 2
        } else {
            chi == 1
                && bd.is_closed_pseudomanifold()
                && bd.euler_characteristic() == 0
                && l.is_connected()
        };
        let ridge_ok = {
            let mut cnt: HashMap<Simplex, usize> = HashMap::new();
            for f in l.facets() {
                for e in f.boundary() {
                    *cnt.entry(e).or_insert(0) += 1;
                }
            }
            cnt.values().all(|&c| c <= 2)
        };
        if !ok || !ridge_ok {
            return Err(AkError::Construction(format!(
                "vertex {v} has a non-ball link"
            )));
        }
    }
    let hom = homology_all(h);
    let betti: Vec<usize> = hom.iter().map(|g| g.betti).collect();
    if betti != vec![1, 2, 0, 0] || hom.iter().any(|g| !g.torsion.is_empty()) {
        return Err(AkError::Construction(format!(
            "handlebody homology {betti:?}"
        )));
    }
    let bd = h.boundary_complex()?;
    if !bd.is_closed_pseudomanifold() || bd.euler_characteristic() != -2 {
        return Err(AkError::Construction(
            "handlebody boundary is not a genus-2 surface".into(),
        ));
    }
    Ok(())
}
