//! Smith normal form over the integers.
//!
//! Invariant factors are computed by sparse elimination on unit pivots
//! (cheapest column first, shortest row within it), followed by a dense
//! minimal-pivot reduction of whatever survives. The sparse phase runs on
//! checked `i64` arithmetic and restarts in `BigInt` on overflow.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::SparseIntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// Invariant factors d₁ | d₂ | … | d_k, all positive.
    pub diag: Vec<BigInt>,
    pub rank: usize,
    /// `U` and `V` with `U·A·V = D`, present only when requested.
    pub transforms: Option<(Vec<Vec<BigInt>>, Vec<Vec<BigInt>>)>,
}

impl SmithForm {
    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn has_divisibility_chain(&self) -> bool {
        self.diag.iter().all(|d| d.is_positive())
            && self.diag.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
    }
}

pub fn smith_normal_form(a: &SparseIntMatrix) -> SmithForm {
    let diag = invariant_factors(a);
    SmithForm {
        rank: diag.len(),
        diag,
        transforms: None,
    }
}

pub fn smith_normal_form_with_transforms(a: &SparseIntMatrix) -> SmithForm {
    let (diag, u, v) = dense_snf(a.to_dense(), true);
    SmithForm {
        rank: diag.len(),
        diag,
        transforms: Some((u, v)),
    }
}

/// Invariant factors of `a` in divisibility order.
pub fn invariant_factors(a: &SparseIntMatrix) -> Vec<BigInt> {
    match eliminate::<i64>(a) {
        Some(r) => r,
        None => eliminate::<BigInt>(a).expect("bigint elimination cannot overflow"),
    }
}

/// Rank of `a` over ℚ (equal to the number of invariant factors).
pub fn rank(a: &SparseIntMatrix) -> usize {
    invariant_factors(a).len()
}

trait Coeff: Clone + PartialEq + Sized {
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn is_zero_c(&self) -> bool;
    fn is_unit(&self) -> bool;
    /// `a − f·b`, or `None` on overflow.
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Option<Self>;
    fn mul_c(a: &Self, b: &Self) -> Option<Self>;
}

impl Coeff for i64 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_zero_c(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Option<Self> {
        a.checked_sub(f.checked_mul(*b)?)
    }
    fn mul_c(a: &Self, b: &Self) -> Option<Self> {
        a.checked_mul(*b)
    }
}

impl Coeff for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Option<Self> {
        Some(a - f * b)
    }
    fn mul_c(a: &Self, b: &Self) -> Option<Self> {
        Some(a * b)
    }
}

type Row<T> = Vec<(u32, T)>;

fn remove_from(list: &mut Vec<u32>, x: u32) {
    if let Some(p) = list.iter().position(|&y| y == x) {
        list.swap_remove(p);
    }
}

fn eliminate<T: Coeff>(a: &SparseIntMatrix) -> Option<Vec<BigInt>> {
    let (nr, nc) = (a.rows(), a.cols());
    let mut rows: Vec<Row<T>> = vec![Vec::new(); nr];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); nc];
    for (i, j, v) in a.entries() {
        rows[i].push((j as u32, T::from_big(v)?));
        col_rows[j].push(i as u32);
    }
    for r in rows.iter_mut() {
        r.sort_by_key(|e| e.0);
    }
    let mut units = 0usize;
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> = (0..nc)
        .filter(|&j| !col_rows[j].is_empty())
        .map(|j| Reverse((col_rows[j].len(), j as u32)))
        .collect();
    let mut deferred: Vec<u32> = Vec::new();
    loop {
        while let Some(Reverse((len, c))) = heap.pop() {
            let cu = c as usize;
            let cur = col_rows[cu].len();
            if cur == 0 {
                continue;
            }
            if cur != len {
                heap.push(Reverse((cur, c)));
                continue;
            }
            let pivot = col_rows[cu]
                .iter()
                .copied()
                .filter(|&r| {
                    let row = &rows[r as usize];
                    let p = row.binary_search_by_key(&c, |e| e.0).unwrap();
                    row[p].1.is_unit()
                })
                .min_by_key(|&r| (rows[r as usize].len(), r));
            let Some(p) = pivot else {
                deferred.push(c);
                continue;
            };
            let prow = std::mem::take(&mut rows[p as usize]);
            let u = prow[prow.binary_search_by_key(&c, |e| e.0).unwrap()]
                .1
                .clone();
            let others: Vec<u32> = col_rows[cu].iter().copied().filter(|&r| r != p).collect();
            for r in others {
                let row = std::mem::take(&mut rows[r as usize]);
                let a_rc = &row[row.binary_search_by_key(&c, |e| e.0).unwrap()].1;
                // u = ±1, so u⁻¹ = u.
                let f = T::mul_c(a_rc, &u)?;
                let mut merged: Row<T> = Vec::with_capacity(row.len() + prow.len());
                let (mut i, mut k) = (0, 0);
                while i < row.len() || k < prow.len() {
                    let ci = row.get(i).map_or(u32::MAX, |e| e.0);
                    let ck = prow.get(k).map_or(u32::MAX, |e| e.0);
                    if ci < ck {
                        merged.push(row[i].clone());
                        i += 1;
                    } else if ck < ci {
                        let v = T::sub_mul(&zero_like::<T>(), &f, &prow[k].1)?;
                        col_rows[ck as usize].push(r);
                        merged.push((ck, v));
                        k += 1;
                    } else {
                        let v = T::sub_mul(&row[i].1, &f, &prow[k].1)?;
                        if v.is_zero_c() {
                            remove_from(&mut col_rows[ci as usize], r);
                        } else {
                            merged.push((ci, v));
                        }
                        i += 1;
                        k += 1;
                    }
                }
                rows[r as usize] = merged;
            }
            for (j, _) in &prow {
                remove_from(&mut col_rows[*j as usize], p);
            }
            for (j, _) in &prow {
                let l = col_rows[*j as usize].len();
                if l > 0 && *j != c {
                    heap.push(Reverse((l, *j)));
                }
            }
            units += 1;
        }
        // Fill-in may have created new units in columns skipped earlier.
        deferred.sort_unstable();
        deferred.dedup();
        let retry: Vec<u32> = deferred
            .drain(..)
            .filter(|&c| {
                col_rows[c as usize].iter().any(|&r| {
                    let row = &rows[r as usize];
                    row[row.binary_search_by_key(&c, |e| e.0).unwrap()]
                        .1
                        .is_unit()
                })
            })
            .collect();
        if retry.is_empty() {
            break;
        }
        for c in (0..nc as u32).filter(|&c| !col_rows[c as usize].is_empty()) {
            heap.push(Reverse((col_rows[c as usize].len(), c)));
        }
    }
    let live_rows: Vec<usize> = (0..nr).filter(|&r| !rows[r].is_empty()).collect();
    let mut live_cols: Vec<u32> = live_rows
        .iter()
        .flat_map(|&r| rows[r].iter().map(|e| e.0))
        .collect();
    live_cols.sort_unstable();
    live_cols.dedup();
    let mut dense = vec![vec![BigInt::zero(); live_cols.len()]; live_rows.len()];
    for (ri, &r) in live_rows.iter().enumerate() {
        for (c, v) in &rows[r] {
            let ci = live_cols.binary_search(c).unwrap();
            dense[ri][ci] = v.to_big();
        }
    }
    let (tail, _, _) = dense_snf(dense, false);
    let mut diag = vec![BigInt::one(); units];
    diag.extend(tail);
    diag.sort();
    Some(diag)
}

fn zero_like<T: Coeff>() -> T {
    T::from_big(&BigInt::zero()).unwrap()
}

/// Dense reduction with minimal-absolute-value pivots and gcd fixes.
///
/// Returns the invariant factors and, when `track` is set, `U` and `V` with
/// `U·A·V` diagonal.
pub(crate) fn dense_snf(
    mut a: Vec<Vec<BigInt>>,
    track: bool,
) -> (Vec<BigInt>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let ident = |k: usize| -> Vec<Vec<BigInt>> {
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        if i == j {
                            BigInt::one()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let (mut u, mut v) = if track {
        (ident(m), ident(n))
    } else {
        (Vec::new(), Vec::new())
    };

    // row_i += f·row_k
    let row_add =
        |a: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, i: usize, k: usize, f: &BigInt| {
            for j in 0..a[i].len() {
                if !a[k][j].is_zero() {
                    let d = f * &a[k][j];
                    a[i][j] += d;
                }
            }
            if track {
                for j in 0..u[i].len() {
                    if !u[k][j].is_zero() {
                        let d = f * &u[k][j];
                        u[i][j] += d;
                    }
                }
            }
        };
    // col_j += f·col_k
    let col_add =
        |a: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>, j: usize, k: usize, f: &BigInt| {
            for row in a.iter_mut() {
                if !row[k].is_zero() {
                    let d = f * &row[k];
                    row[j] += d;
                }
            }
            if track {
                for row in v.iter_mut() {
                    if !row[k].is_zero() {
                        let d = f * &row[k];
                        row[j] += d;
                    }
                }
            }
        };
    let swap_cols = |a: &mut Vec<Vec<BigInt>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    };

    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        if track {
            u.swap(t, bi);
        }
        swap_cols(&mut a, t, bj);
        if track {
            swap_cols(&mut v, t, bj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    row_add(&mut a, &mut u, i, t, &-q);
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    col_add(&mut a, &mut v, j, t, &-q);
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // Bring the smallest remainder to the pivot position.
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..m {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[bi][bj].abs() {
                        bi = i;
                        bj = t;
                    }
                }
                for j in t + 1..n {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[bi][bj].abs() {
                        bi = t;
                        bj = j;
                    }
                }
                if bi != t {
                    a.swap(t, bi);
                    if track {
                        u.swap(t, bi);
                    }
                }
                if bj != t {
                    swap_cols(&mut a, t, bj);
                    if track {
                        swap_cols(&mut v, t, bj);
                    }
                }
                continue;
            }
            let p = a[t][t].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&a[i][j] % &p).is_zero()));
            match bad {
                Some(i) => row_add(&mut a, &mut u, t, i, &BigInt::one()),
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            if track {
                for x in u[t].iter_mut() {
                    *x = -x.clone();
                }
            }
        }
        diag.push(a[t][t].clone());
        t += 1;
    }
    (diag, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(d: &[&[i64]]) -> SparseIntMatrix {
        SparseIntMatrix::from_dense(&d.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|x| x.to_i64().unwrap()).collect()
    }

    #[test]
    fn small_examples() {
        assert_eq!(
            ints(&smith_normal_form(&m(&[&[2, 4], &[6, 8]])).diag),
            vec![2, 4]
        );
        assert_eq!(
            ints(&smith_normal_form(&SparseIntMatrix::identity(5)).diag),
            vec![1; 5]
        );
        for r in 3..12i64 {
            let s = smith_normal_form(&m(&[&[1, -1], &[r, 1 - r]]));
            assert_eq!(ints(&s.diag), vec![1, 1]);
        }
        assert_eq!(
            ints(&smith_normal_form(&m(&[&[2, 0], &[0, 3]])).diag),
            vec![1, 6]
        );
        assert_eq!(smith_normal_form(&SparseIntMatrix::zeros(3, 4)).rank, 0);
    }

    #[test]
    fn transforms_reproduce_diagonal() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form_with_transforms(&a);
        assert_eq!(ints(&s.diag), vec![2, 6, 12]);
        let (u, v) = s.transforms.unwrap();
        let d = SparseIntMatrix::from_dense(&u)
            .mul(&a)
            .mul(&SparseIntMatrix::from_dense(&v));
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j {
                    s.diag[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(d.get(i, j), want);
            }
        }
    }

    #[test]
    fn sparse_and_dense_agree() {
        let a = m(&[&[3, 1, 0, 2], &[0, 2, 4, 0], &[6, 0, 2, 2]]);
        let s1 = smith_normal_form(&a).diag;
        let s2 = smith_normal_form_with_transforms(&a).diag;
        assert_eq!(s1, s2);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 2;
        let a = m(&[&[1, big], &[big, 1]]);
        let s = smith_normal_form(&a);
        let det = BigInt::one() - BigInt::from(big) * BigInt::from(big);
        assert_eq!(s.diag, vec![BigInt::one(), det.abs()]);
    }
}
