//! From the handlebody to the 4-sphere: two interval products, two 2-handles
//! and the boundary.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::handlebody::{
    build_handlebody, ChainBlock, Color, HandlebodyStats, LabeledComplex, RegionTag,
};
use crate::error::{AkError, Result};
use crate::product::{mapping_cylinder, product_with_interval, staircase_paths, OrderedComplex};
use crate::simplicial::{Simplex, SimplicialComplex, Vertex};

/// Label of the apex of the 2-handle core simplex.
pub const HANDLE_APEX_LABEL: u8 = 3;

/// H × I × I. Facets inherit the tag of the tetrahedron below them. The
/// chains are the solid 4-tori T × I × {1} on the boundary, and
/// `section_labels` is their attaching map onto the core simplex of a
/// 2-handle: the cross-section label on T × {0} × {1}, and 3 on T × {1} × {1}.
pub fn lift_to_five(h: &LabeledComplex) -> Result<LabeledComplex> {
    if h.complex.complex.dim() != 3 {
        return Err(AkError::Construction(
            "lift expects a 3-dimensional handlebody".into(),
        ));
    }
    let p1 = product_with_interval(&h.complex);
    let p2 = product_with_interval(&p1.product.complex);
    let lift = |v: Vertex, s: Vertex, t: Vertex| -> Vertex {
        let a = p1.product.vertex(v, s).expect("vertex of H");
        p2.product.vertex(a, t).expect("vertex of H x I")
    };
    let (pairs1, pairs2) = (&p1.product.pairs, &p2.product.pairs);
    let mut tags = HashMap::new();
    for f in p2.product.complex.complex.facets() {
        let base = Simplex::new(
            f.vertices()
                .iter()
                .map(|&w| pairs1[pairs2[w as usize].0 as usize].0),
        );
        let tag = *h
            .tags
            .get(&base)
            .ok_or_else(|| AkError::Construction(format!("product facet {f} lies over {base}")))?;
        tags.insert(f.clone(), tag);
    }
    let lift_chain = |chain: &[ChainBlock]| -> Vec<ChainBlock> {
        chain
            .iter()
            .map(|blk| {
                let facets = blk
                    .facets
                    .iter()
                    .flat_map(|t| {
                        let v = t.vertices();
                        staircase_paths(v.len() - 1, 1).into_iter().map(|p| {
                            Simplex::new(p.iter().map(|&(i, s)| lift(v[i], s as Vertex, 1)))
                        })
                    })
                    .collect();
                ChainBlock {
                    position: blk.position,
                    region: blk.region,
                    facets,
                }
            })
            .collect()
    };
    let mut section_labels = HashMap::new();
    for (&v, &label) in &h.section_labels {
        section_labels.insert(lift(v, 0, 1), label);
        section_labels.insert(lift(v, 1, 1), HANDLE_APEX_LABEL);
    }
    Ok(LabeledComplex {
        complex: p2.product.complex.clone(),
        tags,
        blue_chain: lift_chain(&h.blue_chain),
        red_chain: lift_chain(&h.red_chain),
        section_labels,
    })
}

/// The attaching solid torus of one colour, as a complex.
pub fn attaching_torus(w: &LabeledComplex, color: Color) -> Result<SimplicialComplex> {
    let chain = w.chain(color);
    if chain.is_empty() {
        return Err(AkError::MissingTorus(match color {
            Color::Blue => "blue",
            Color::Red => "red",
        }));
    }
    Ok(SimplicialComplex::from_maximal(
        chain
            .iter()
            .flat_map(|b| b.facets.iter().cloned())
            .collect(),
    ))
}

/// Glues one 2-handle per torus: the mapping cylinder of the attaching map
/// onto a fresh 3-simplex. The chains and labels of `w` are kept.
pub fn glue_two_handles(w: &LabeledComplex) -> Result<LabeledComplex> {
    let mut next = w.complex.order().iter().max().map_or(0, |v| v + 1);
    let mut facets: Vec<Simplex> = w.complex.complex.facets().to_vec();
    let mut tags = w.tags.clone();
    let mut order = w.complex.order().to_vec();
    for color in Color::ALL {
        let torus = attaching_torus(w, color)?;
        let bd = w.complex.complex.boundary_complex()?;
        if let Some(f) = torus.facets().iter().find(|f| !bd.contains_face(f)) {
            return Err(AkError::Construction(format!(
                "attaching torus facet {f} is not on the boundary"
            )));
        }
        if !torus.boundary_complex()?.is_closed_pseudomanifold() || !torus.is_connected() {
            return Err(AkError::Construction(
                "attaching region is not a closed chain".into(),
            ));
        }
        let core: Vec<Vertex> = (next..next + 4).collect();
        next += 4;
        let mut f = HashMap::new();
        for v in torus.vertex_support() {
            let label = *w.section_labels.get(&v).ok_or(AkError::UnmappedVertex(v))?;
            f.insert(v, core[label as usize]);
        }
        let k_order: Vec<Vertex> = w
            .complex
            .order()
            .iter()
            .copied()
            .filter(|v| f.contains_key(v))
            .collect();
        let k = OrderedComplex::new(torus, k_order)?;
        let l = OrderedComplex::natural(SimplicialComplex::simplex(core.iter().copied()));
        let cyl = mapping_cylinder(&k, &l, &f)?;
        for s in cyl.complex.facets() {
            if s.len() != 6 {
                return Err(AkError::Construction(format!(
                    "2-handle simplex {s} is not 5-dimensional"
                )));
            }
            tags.insert(s.clone(), color.handle_tag());
            facets.push(s.clone());
        }
        order.extend(&core);
    }
    let complex = SimplicialComplex::from_maximal(facets);
    if tags.len() != complex.num_facets() {
        return Err(AkError::Construction(
            "2-handle overlaps the lifted handlebody".into(),
        ));
    }
    Ok(LabeledComplex {
        complex: OrderedComplex::new(complex, order)?,
        tags,
        blue_chain: w.blue_chain.clone(),
        red_chain: w.red_chain.clone(),
        section_labels: w.section_labels.clone(),
    })
}

/// Every stage of the construction for one r.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub r: usize,
    pub handlebody: LabeledComplex,
    pub handlebody_stats: HandlebodyStats,
    pub lifted: LabeledComplex,
    pub glued: LabeledComplex,
    pub sphere: SimplicialComplex,
}

impl Pipeline {
    pub fn run(r: usize) -> Result<Pipeline> {
        let h = build_handlebody(r)?;
        let lifted = lift_to_five(&h.labeled)?;
        let glued = glue_two_handles(&lifted)?;
        let sphere = glued.complex.complex.boundary_complex()?;
        Ok(Pipeline {
            r,
            handlebody: h.labeled,
            handlebody_stats: h.stats,
            lifted,
            glued,
            sphere,
        })
    }

    pub fn stats(&self) -> PipelineStats {
        let stage = |name: &str, k: &LabeledComplex| StageStats {
            stage: name.to_string(),
            f_vector: k.complex.complex.f_vector().0,
            tags: k.tag_counts(),
        };
        PipelineStats {
            r: self.r,
            handlebody: self.handlebody_stats.clone(),
            stages: vec![
                stage("handlebody", &self.handlebody),
                stage("lifted", &self.lifted),
                stage("glued", &self.glued),
            ],
            sphere_f_vector: self.sphere.f_vector().0,
            deviation: deviation_table(self.r, &self.sphere.f_vector().0),
        }
    }
}

pub fn akbulut_kirby_sphere(r: usize) -> Result<SimplicialComplex> {
    Ok(Pipeline::run(r)?.sphere)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageStats {
    pub stage: String,
    pub f_vector: Vec<u64>,
    pub tags: BTreeMap<RegionTag, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineStats {
    pub r: usize,
    pub handlebody: HandlebodyStats,
    pub stages: Vec<StageStats>,
    pub sphere_f_vector: Vec<u64>,
    pub deviation: Vec<DeviationRow>,
}

/// Published face numbers of the r-th sphere.
pub fn reference_f_vector(r: usize) -> [u64; 5] {
    let r = r as u64;
    [
        176 + 64 * r,
        2390 + 1120 * r,
        7820 + 3840 * r,
        9340 + 4640 * r,
        3736 + 1856 * r,
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub dim: usize,
    pub built: u64,
    pub reference: u64,
    /// (built − reference) / reference.
    pub relative: f64,
}

pub fn deviation_table(r: usize, f: &[u64]) -> Vec<DeviationRow> {
    reference_f_vector(r)
        .iter()
        .enumerate()
        .map(|(dim, &reference)| {
            let built = f.get(dim).copied().unwrap_or(0);
            DeviationRow {
                dim,
                built,
                reference,
                relative: (built as f64 - reference as f64) / reference as f64,
            }
        })
        .collect()
}
