use std::fmt::Write as _;
use std::io::BufRead;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{AkError, Result};
use crate::simplicial::SimplicialComplex;

/// Sparse matrix with arbitrary-precision integer entries, stored by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, BigInt)>>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.columns[i].push((i, BigInt::one()));
        }
        m
    }

    pub fn from_dense<T: Into<BigInt> + Clone>(data: &[Vec<T>]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (i, row) in data.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone().into());
            }
        }
        m
    }

    /// Builds a matrix from already sorted, duplicate-free columns.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, BigInt)>>) -> Self {
        debug_assert!(columns.iter().all(|c| c.windows(2).all(|w| w[0].0 < w[1].0)
            && c.iter().all(|(r, v)| *r < rows && !v.is_zero())));
        SparseIntMatrix {
            rows,
            cols: columns.len(),
            columns,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, BigInt)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        match self.columns[j].binary_search_by_key(&i, |e| e.0) {
            Ok(p) => self.columns[j][p].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        let col = &mut self.columns[j];
        match col.binary_search_by_key(&i, |e| e.0) {
            Ok(p) if v.is_zero() => {
                col.remove(p);
            }
            Ok(p) => col[p].1 = v,
            Err(_) if v.is_zero() => {}
            Err(p) => col.insert(p, (i, v)),
        }
    }

    /// Nonzero entries in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, v)| (*i, j, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> Self {
        let mut cols = vec![Vec::new(); self.rows];
        for (i, j, v) in self.entries() {
            cols[i].push((j, v.clone()));
        }
        SparseIntMatrix {
            rows: self.cols,
            cols: self.rows,
            columns: cols,
        }
    }

    pub fn mul(&self, other: &SparseIntMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Vec::with_capacity(other.cols);
        for col in &other.columns {
            let mut acc: std::collections::BTreeMap<usize, BigInt> = Default::default();
            for (k, b) in col {
                for (i, a) in &self.columns[*k] {
                    *acc.entry(*i).or_insert_with(BigInt::zero) += a * b;
                }
            }
            out.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        }
        SparseIntMatrix {
            rows: self.rows,
            cols: other.cols,
            columns: out,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (i, j, v) in self.entries() {
            d[i][j] = v.clone();
        }
        d
    }

    /// Coordinate dump: a `% rows cols nnz` header and one `row col value` line per entry.
    pub fn dump(&self) -> String {
        let mut s = format!("% {} {} {}\n", self.rows, self.cols, self.nnz());
        for (i, j, v) in self.entries() {
            writeln!(s, "{i} {j} {v}").unwrap();
        }
        s
    }

    pub fn parse_dump<R: BufRead>(r: R) -> Result<Self> {
        let mut m: Option<SparseIntMatrix> = None;
        for (no, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| AkError::Parse {
                line: no + 1,
                msg: msg.to_string(),
            };
            let parts: Vec<&str> = line.trim_start_matches('%').split_whitespace().collect();
            if line.starts_with('%') {
                if m.is_some() {
                    continue;
                }
                if parts.len() != 3 {
                    return Err(err("expected `% rows cols nnz`"));
                }
                let n: Vec<usize> = parts
                    .iter()
                    .map(|p| p.parse().map_err(|_| err("bad header")))
                    .collect::<Result<_>>()?;
                m = Some(Self::zeros(n[0], n[1]));
                continue;
            }
            let mat = m.as_mut().ok_or_else(|| err("entry before header"))?;
            if parts.len() != 3 {
                return Err(err("expected `row col value`"));
            }
            let i: usize = parts[0].parse().map_err(|_| err("bad row"))?;
            let j: usize = parts[1].parse().map_err(|_| err("bad col"))?;
            let v: BigInt = parts[2].parse().map_err(|_| err("bad value"))?;
            if i >= mat.rows || j >= mat.cols {
                return Err(err("index out of range"));
            }
            mat.set(i, j, v);
        }
        m.ok_or(AkError::Parse {
            line: 0,
            msg: "missing header".into(),
        })
    }
}

/// Matrix of ∂ᵢ: Cᵢ → Cᵢ₋₁ with rows and columns in lexicographic face order.
///
/// Deleting the vertex at position j contributes the sign (−1)ʲ.
pub fn boundary_matrix(k: &SimplicialComplex, i: usize) -> Result<SparseIntMatrix> {
    if i == 0 || i as isize > k.dim() {
        return Err(AkError::DimensionOutOfRange(i, k.dim()));
    }
    let rows = k.faces(i - 1);
    let cols = k.faces(i);
    let columns = cols
        .iter()
        .map(|s| {
            let mut c: Vec<(usize, BigInt)> = (0..s.len())
                .map(|j| {
                    let r = rows
                        .binary_search(&s.without_index(j))
                        .expect("face lattice is closed under faces");
                    (
                        r,
                        if j % 2 == 0 {
                            BigInt::one()
                        } else {
                            -BigInt::one()
                        },
                    )
                })
                .collect();
            c.sort_by_key(|e| e.0);
            c
        })
        .collect();
    Ok(SparseIntMatrix::from_columns(rows.len(), columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::SimplicialComplex;

    #[test]
    fn edge_and_triangle() {
        let e = SimplicialComplex::simplex([0, 1]);
        let m = boundary_matrix(&e, 1).unwrap();
        assert_eq!(
            m.to_dense(),
            vec![vec![BigInt::from(-1)], vec![BigInt::from(1)]]
        );
        let t = SimplicialComplex::simplex([0, 1, 2]);
        let m = boundary_matrix(&t, 2).unwrap();
        let col: Vec<i64> = m
            .to_dense()
            .iter()
            .map(|r| i64::try_from(&r[0]).unwrap())
            .collect();
        assert_eq!(col, vec![1, -1, 1]);
        assert!(boundary_matrix(&t, 3).is_err());
        assert!(boundary_matrix(&t, 0).is_err());
    }

    #[test]
    fn chain_complex() {
        let k = SimplicialComplex::boundary_of_simplex(5);
        for i in 1..4 {
            let a = boundary_matrix(&k, i).unwrap();
            let b = boundary_matrix(&k, i + 1).unwrap();
            assert!(a.mul(&b).is_zero());
        }
    }

    #[test]
    fn dump_round_trip() {
        let m = SparseIntMatrix::from_dense(&[vec![0i64, 3], vec![-7, 0], vec![0, 0]]);
        let d = m.dump();
        assert!(d.starts_with("% 3 2 2\n"));
        assert_eq!(SparseIntMatrix::parse_dump(d.as_bytes()).unwrap(), m);
        assert_eq!(m.transpose().transpose(), m);
    }
}
