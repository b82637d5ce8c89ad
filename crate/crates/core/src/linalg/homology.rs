use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::boundary_matrix;
use super::snf::invariant_factors;
use crate::error::{AkError, Result};
use crate::simplicial::SimplicialComplex;

/// A finitely generated abelian group ℤ^betti ⊕ ⊕ ℤ/tᵢ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct HomologyGroup {
    pub betti: usize,
    #[serde(with = "bigint_list")]
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn free(betti: usize) -> Self {
        HomologyGroup {
            betti,
            torsion: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }

    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion
            .iter()
            .map(|t| u64::try_from(t).unwrap_or(u64::MAX))
            .collect()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".into()),
            b => parts.push(format!("Z^{b}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

mod bigint_list {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Num {
        Small(u64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|b| {
                u64::try_from(b)
                    .map(Num::Small)
                    .unwrap_or_else(|_| Num::Big(b.to_string()))
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Num>::deserialize(d)?
            .into_iter()
            .map(|n| match n {
                Num::Small(x) => Ok(BigInt::from(x)),
                Num::Big(s) => s.parse().map_err(serde::de::Error::custom),
            })
            .collect()
    }
}

/// Ranks and invariant factors of every boundary map ∂₁..∂_d, computed in parallel.
fn boundary_factors(k: &SimplicialComplex) -> Vec<Vec<BigInt>> {
    let d = k.dim().max(0) as usize;
    for i in 0..=d {
        k.faces(i);
    }
    (1..=d)
        .into_par_iter()
        .map(|i| invariant_factors(&boundary_matrix(k, i).unwrap()))
        .collect()
}

fn assemble(k: &SimplicialComplex, factors: &[Vec<BigInt>], i: usize) -> HomologyGroup {
    let f_i = k.faces(i).len();
    let rank_out = if i == 0 { 0 } else { factors[i - 1].len() };
    let (rank_in, torsion) = match factors.get(i) {
        Some(f) => (
            f.len(),
            f.iter()
                .filter(|x| *x > &BigInt::from(1))
                .cloned()
                .collect(),
        ),
        None => (0, Vec::new()),
    };
    HomologyGroup {
        betti: f_i - rank_out - rank_in,
        torsion,
    }
}

/// Unreduced integral homology in dimension `i`.
pub fn homology(k: &SimplicialComplex, i: usize) -> Result<HomologyGroup> {
    if i as isize > k.dim() {
        return Err(AkError::DimensionOutOfRange(i, k.dim()));
    }
    let d = k.dim() as usize;
    let maps: Vec<usize> = [i, i + 1]
        .into_iter()
        .filter(|&j| j >= 1 && j <= d)
        .collect();
    let mut factors = vec![Vec::new(); d];
    let computed: Vec<(usize, Vec<BigInt>)> = maps
        .into_par_iter()
        .map(|j| (j, invariant_factors(&boundary_matrix(k, j).unwrap())))
        .collect();
    for (j, f) in computed {
        factors[j - 1] = f;
    }
    Ok(assemble(k, &factors, i))
}

/// Unreduced integral homology in every dimension `0..=dim K`.
pub fn homology_all(k: &SimplicialComplex) -> Vec<HomologyGroup> {
    if k.is_empty() {
        return Vec::new();
    }
    let factors = boundary_factors(k);
    (0..=k.dim() as usize)
        .map(|i| assemble(k, &factors, i))
        .collect()
}

pub fn betti_numbers(h: &[HomologyGroup]) -> Vec<usize> {
    h.iter().map(|g| g.betti).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::SimplicialComplex;

    #[test]
    fn sphere() {
        let h = homology_all(&SimplicialComplex::boundary_of_simplex(5));
        assert_eq!(betti_numbers(&h), vec![1, 0, 0, 0, 1]);
        assert!(h.iter().all(|g| g.torsion.is_empty()));
    }

    #[test]
    fn projective_plane() {
        let k = crate::catalog::rp2();
        assert!(k.is_closed_pseudomanifold());
        let h = homology_all(&k);
        assert_eq!(h[0], HomologyGroup::free(1));
        assert_eq!(
            h[1],
            HomologyGroup {
                betti: 0,
                torsion: vec![BigInt::from(2)]
            }
        );
        assert!(h[2].is_trivial());
        assert_eq!(homology(&k, 1).unwrap(), h[1]);
        assert_eq!(h[1].to_string(), "Z/2");
    }

    #[test]
    fn serde_round_trip() {
        let g = HomologyGroup {
            betti: 2,
            torsion: vec![BigInt::from(3)],
        };
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"betti":2,"torsion":[3]}"#);
        assert_eq!(serde_json::from_str::<HomologyGroup>(&s).unwrap(), g);
    }
}
