use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::nerve::{ChainComplex, SparseMatrix};
use crate::error::{Error, Result};

/// `ℤ^rank ⊕ ⊕ ℤ/t` for the listed torsion divisors (each > 1, in
/// divisibility order).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn zero() -> HomologyGroup {
        HomologyGroup { rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> HomologyGroup {
        HomologyGroup { rank, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 { "Z".to_string() } else { format!("Z^{}", self.rank) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// Rank and nontrivial invariant factors of an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithSummary {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

type Column = Vec<(usize, i64)>;

fn low(col: &Column) -> Option<(usize, i64)> {
    col.last().copied()
}

/// `a + k·b` on sorted sparse columns.
fn axpy(a: &Column, k: i64, b: &Column) -> Result<Column> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, k.checked_mul(b[j].1).ok_or(Error::ArithmeticOverflow)?));
            j += 1;
        } else {
            let v = k
                .checked_mul(b[j].1)
                .and_then(|x| x.checked_add(a[i].1))
                .ok_or(Error::ArithmeticOverflow)?;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

/// `(g, x, y)` with `g = gcd(a, b) = x·a + y·b` and `g > 0`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1, mut s0, mut s1, mut t0, mut t1) = (a, b, 1i64, 0i64, 0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// `x·a + y·b` on sorted sparse columns.
fn combine(x: i64, a: &Column, y: i64, b: &Column) -> Result<Column> {
    let scaled: Column = a
        .iter()
        .map(|&(r, v)| v.checked_mul(x).map(|w| (r, w)).ok_or(Error::ArithmeticOverflow))
        .collect::<Result<_>>()?;
    let mut out = axpy(&scaled, y, b)?;
    out.retain(|e| e.1 != 0);
    Ok(out)
}

/// Smith summary of a sparse matrix.
///
/// Columns are brought to column echelon form left to right with
/// unimodular column operations: each new column is reduced against the
/// pivot sharing its lowest row, and when the pivot's entry does not divide
/// the new one the two are replaced by their gcd combination and a column
/// with a higher low. Pivots whose entry is a unit are then used to clear
/// their rows from the others, and what remains, supported on the
/// non-unit pivot rows, goes to a dense Smith normal form.
/// `stop_at_rank` ends the scan once that many unit pivots are found.
pub fn smith_summary(m: &SparseMatrix, stop_at_rank: Option<usize>) -> Result<SmithSummary> {
    let mut pivots: HashMap<usize, Column> = HashMap::new();
    let mut units = 0usize;
    for col in &m.columns {
        if stop_at_rank.is_some_and(|r| units >= r) {
            break;
        }
        let mut c = col.clone();
        while let Some((row, v)) = low(&c) {
            let Some(p) = pivots.get_mut(&row) else {
                if v.abs() == 1 {
                    units += 1;
                }
                pivots.insert(row, c);
                break;
            };
            let a = p.last().unwrap().1;
            if v % a == 0 {
                c = axpy(&c, -(v / a), p)?;
            } else {
                let (g, x, y) = ext_gcd(a, v);
                let new_p = combine(x, p, y, &c)?;
                c = combine(a / g, &c, -(v / g), p)?;
                if g == 1 {
                    units += 1;
                }
                *p = new_p;
            }
        }
    }
    let (pivots, deferred): (HashMap<usize, Column>, Vec<Column>) = {
        let mut unit = HashMap::new();
        let mut other = Vec::new();
        for (row, c) in pivots {
            if c.last().unwrap().1.abs() == 1 {
                unit.insert(row, c);
            } else {
                other.push((row, c));
            }
        }
        other.sort_by_key(|e| e.0);
        (unit, other.into_iter().map(|e| e.1).collect())
    };
    let units = pivots.len();
    if stop_at_rank.is_some_and(|r| units >= r) {
        return Ok(SmithSummary { rank: units, torsion: Vec::new() });
    }
    // clear pivot rows from deferred columns, highest row first
    let mut residual: Vec<Column> = Vec::with_capacity(deferred.len());
    for mut c in deferred {
        let mut idx = c.len();
        while idx > 0 {
            idx -= 1;
            let (row, v) = c[idx];
            if let Some(p) = pivots.get(&row) {
                let pv = p.last().unwrap().1;
                c = axpy(&c, -v * pv, p)?;
                idx = c.partition_point(|e| e.0 < row);
            }
        }
        if !c.is_empty() {
            residual.push(c);
        }
    }
    let mut rows: Vec<usize> = residual.iter().flatten().map(|e| e.0).collect();
    rows.sort_unstable();
    rows.dedup();
    let row_pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut dense = vec![vec![0i128; residual.len()]; rows.len()];
    for (j, c) in residual.iter().enumerate() {
        for &(r, v) in c {
            dense[row_pos[&r]][j] = v as i128;
        }
    }
    log::trace!("smith: {} unit pivots, residual {}x{}", units, rows.len(), residual.len());
    let factors = dense_invariant_factors(dense)?;
    let rank = units + factors.len();
    let torsion = factors
        .into_iter()
        .filter(|&d| d > 1)
        .map(|d| u64::try_from(d).map_err(|_| Error::ArithmeticOverflow))
        .collect::<Result<Vec<_>>>()?;
    Ok(SmithSummary { rank, torsion })
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Nonzero invariant factors of a dense matrix, in divisibility order.
pub fn dense_invariant_factors(mut a: Vec<Vec<i128>>) -> Result<Vec<i128>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut changed = false;
            for i in t + 1..rows {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        a[i][j] = a[i][j].checked_sub(q.checked_mul(a[t][j]).ok_or(Error::ArithmeticOverflow)?).ok_or(Error::ArithmeticOverflow)?;
                    }
                }
                if a[i][t] != 0 {
                    changed = true;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] = row[j].checked_sub(q.checked_mul(row[t]).ok_or(Error::ArithmeticOverflow)?).ok_or(Error::ArithmeticOverflow)?;
                    }
                }
                if a[t][j] != 0 {
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            // a smaller remainder is left in row or column t; bring it to the corner
            let mut best = (t, t);
            for i in t..rows {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    // turn the diagonal into a divisibility chain
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = gcd(diag[i], diag[j]);
            let l = (diag[i] / g).checked_mul(diag[j]).ok_or(Error::ArithmeticOverflow)?;
            diag[i] = g;
            diag[j] = l;
        }
    }
    Ok(diag)
}

/// Integral homology in degrees `0..=truncate_at`.
pub fn homology(k: &ChainComplex) -> Result<Vec<HomologyGroup>> {
    let top = k.truncate_at.min(k.top_degree());
    let mut out = Vec::with_capacity(top + 1);
    // rank of ∂_d for the current degree
    let mut rank_here = 0usize;
    for d in 0..=top {
        let kernel = k.ranks[d] - rank_here;
        let (rank_next, torsion) = if d < k.top_degree() {
            let s = smith_summary(&k.boundaries[d + 1], Some(kernel))?;
            (s.rank, s.torsion)
        } else {
            (0, Vec::new())
        };
        out.push(HomologyGroup { rank: kernel - rank_next, torsion });
        rank_here = rank_next;
    }
    Ok(out)
}

/// Whether reduced homology vanishes in all computed degrees.
pub fn is_acyclic(h: &[HomologyGroup]) -> bool {
    h.first().is_some_and(|h0| *h0 == HomologyGroup::free(1)) && h[1..].iter().all(HomologyGroup::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catkit::category::FiniteCategory;
    use crate::catkit::nerve::nerve;
    use crate::config::Caps;
    use proptest::prelude::*;

    fn h(rank: usize, torsion: &[u64]) -> HomologyGroup {
        HomologyGroup { rank, torsion: torsion.to_vec() }
    }

    #[test]
    fn zero_complex() {
        let k = ChainComplex::new(vec![0, 0], vec![SparseMatrix::zero(0, 0)]).unwrap();
        assert_eq!(homology(&k).unwrap(), vec![h(0, &[]), h(0, &[])]);
    }

    #[test]
    fn circle() {
        // two vertices, two edges a -> b
        let d1 = SparseMatrix::from_dense(&[vec![-1, -1], vec![1, 1]]);
        let k = ChainComplex::new(vec![2, 2], vec![d1]).unwrap();
        assert_eq!(homology(&k).unwrap(), vec![h(1, &[]), h(1, &[])]);
    }

    #[test]
    fn two_torsion() {
        let d1 = SparseMatrix::from_dense(&[vec![2]]);
        let k = ChainComplex::new(vec![1, 1], vec![d1]).unwrap();
        assert_eq!(homology(&k).unwrap(), vec![h(0, &[2]), h(0, &[])]);
    }

    #[test]
    fn point_and_tree() {
        let k = nerve(&FiniteCategory::point(), 3, &Caps::default()).unwrap();
        assert_eq!(homology(&k).unwrap(), vec![h(1, &[]), h(0, &[]), h(0, &[]), h(0, &[])]);
        let tree = FiniteCategory::poset("a<b, a<c", 3, |x, y| x == y || x == 0);
        let k = nerve(&tree, 2, &Caps::default()).unwrap();
        assert!(is_acyclic(&homology(&k).unwrap()));
    }

    #[test]
    fn initial_object_is_acyclic() {
        let c = FiniteCategory::poset("divisors of 12", 6, |a, b| {
            let d = [1, 2, 3, 4, 6, 12];
            d[b] % d[a] == 0
        });
        let k = nerve(&c, 4, &Caps::default()).unwrap();
        assert!(k.check_d_squared().unwrap());
        assert!(is_acyclic(&homology(&k).unwrap()));
    }

    #[test]
    fn cyclic_group_nerve() {
        // BC3: H_1 = Z/3, H_2 = 0, H_3 = Z/3
        let c = FiniteCategory::build("C3", 1, vec![0; 3], vec![0; 3], vec![0], |g, f| Some((g + f) % 3)).unwrap();
        let k = nerve(&c, 3, &Caps::default()).unwrap();
        assert_eq!(homology(&k).unwrap(), vec![h(1, &[]), h(0, &[3]), h(0, &[]), h(0, &[3])]);
    }

    #[test]
    fn klein_four_nerve() {
        // BV4 = RP∞ × RP∞: H_1 = (Z/2)^2, H_2 = Z/2
        let c = FiniteCategory::build("V4", 1, vec![0; 4], vec![0; 4], vec![0], |g, f| Some(g ^ f)).unwrap();
        let k = nerve(&c, 2, &Caps::default()).unwrap();
        assert_eq!(homology(&k).unwrap(), vec![h(1, &[]), h(0, &[2, 2]), h(0, &[2])]);
    }

    #[test]
    fn dense_snf_examples() {
        assert_eq!(dense_invariant_factors(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).unwrap(), vec![2, 6, 12]);
        assert_eq!(dense_invariant_factors(vec![vec![4, 0], vec![0, 6]]).unwrap(), vec![2, 12]);
        assert_eq!(dense_invariant_factors(vec![vec![0, 0]]).unwrap(), Vec::<i128>::new());
    }

    proptest! {
        #[test]
        fn sparse_and_dense_agree(entries in proptest::collection::vec(-3i64..4, 20)) {
            let m: Vec<Vec<i64>> = entries.chunks(5).map(|r| r.to_vec()).collect();
            let sparse = smith_summary(&SparseMatrix::from_dense(&m), None).unwrap();
            let dense = dense_invariant_factors(m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()).unwrap();
            prop_assert_eq!(sparse.rank, dense.len());
            let tors: Vec<u64> = dense.into_iter().filter(|&d| d > 1).map(|d| d as u64).collect();
            prop_assert_eq!(sparse.torsion, tors);
        }
    }
}
