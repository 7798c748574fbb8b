use rayon::prelude::*;

use super::category::{FiniteCategory, MorId};
use crate::config::Caps;
use crate::error::{Error, Result};

/// Sparse integer matrix stored by columns; each column is sorted by row.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix { rows, columns: vec![Vec::new(); cols] }
    }

    pub fn from_dense(m: &[Vec<i64>]) -> SparseMatrix {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let columns = (0..cols)
            .map(|j| (0..rows).filter(|&i| m[i][j] != 0).map(|i| (i, m[i][j])).collect())
            .collect();
        SparseMatrix { rows, columns }
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// `self · other`, or `None` on overflow.
    pub fn mul(&self, other: &SparseMatrix) -> Option<SparseMatrix> {
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc: std::collections::BTreeMap<usize, i64> = Default::default();
                for &(k, b) in col {
                    for &(i, a) in &self.columns[k] {
                        let e = acc.entry(i).or_insert(0);
                        *e = e.checked_add(a.checked_mul(b)?)?;
                    }
                }
                Some(acc.into_iter().filter(|&(_, v)| v != 0).collect())
            })
            .collect::<Option<Vec<_>>>()?;
        Some(SparseMatrix { rows: self.rows, columns })
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }
}

/// A bounded chain complex of free abelian groups. `boundaries[d]` maps
/// degree `d` to degree `d - 1`; `boundaries[0]` is the zero map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    pub ranks: Vec<usize>,
    pub boundaries: Vec<SparseMatrix>,
    /// Homology is meaningful through this degree; the complex carries one
    /// more degree so the top boundary is known.
    pub truncate_at: usize,
}

impl ChainComplex {
    /// A complex from explicit boundary matrices `∂_1, ∂_2, …`.
    pub fn new(ranks: Vec<usize>, higher: Vec<SparseMatrix>) -> Result<ChainComplex> {
        if ranks.is_empty() || higher.len() + 1 != ranks.len() {
            return Err(Error::InvalidInput("one boundary per positive degree is required".into()));
        }
        for (d, m) in higher.iter().enumerate() {
            if m.rows != ranks[d] || m.cols() != ranks[d + 1] {
                return Err(Error::InvalidInput(format!("boundary in degree {} has the wrong shape", d + 1)));
            }
        }
        let mut boundaries = vec![SparseMatrix::zero(0, ranks[0])];
        boundaries.extend(higher);
        let truncate_at = ranks.len() - 1;
        Ok(ChainComplex { ranks, boundaries, truncate_at })
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    /// Checks `∂_d ∘ ∂_{d+1} = 0` in every degree.
    pub fn check_d_squared(&self) -> Result<bool> {
        for d in 1..self.top_degree() {
            let prod = self.boundaries[d]
                .mul(&self.boundaries[d + 1])
                .ok_or(Error::ArithmeticOverflow)?;
            if !prod.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Number of normalized chains of each length `0..=top`.
pub fn chain_counts(c: &FiniteCategory, top: usize) -> Vec<u128> {
    // ending[o] = chains of the current length ending at o
    let mut ending: Vec<u128> = vec![1; c.n_objects()];
    let mut counts = vec![c.n_objects() as u128];
    for _ in 1..=top {
        let mut next = vec![0u128; c.n_objects()];
        for m in 0..c.n_morphisms() {
            if !c.is_identity(m) {
                next[c.tgt(m)] = next[c.tgt(m)].saturating_add(ending[c.src(m)]);
            }
        }
        counts.push(next.iter().fold(0u128, |a, &b| a.saturating_add(b)));
        ending = next;
    }
    counts
}

/// Chains of one length in lexicographic order, flat with stride `len`.
struct Chains {
    len: usize,
    flat: Vec<u32>,
    keys: Vec<u128>,
}

impl Chains {
    fn count(&self) -> usize {
        if self.len == 0 {
            self.flat.len()
        } else {
            self.flat.len() / self.len
        }
    }

    fn get(&self, i: usize) -> &[u32] {
        &self.flat[i * self.len..(i + 1) * self.len]
    }

    fn index_of(&self, key: u128) -> usize {
        self.keys.binary_search(&key).expect("face of a chain is a chain")
    }
}

fn key_of(chain: impl Iterator<Item = MorId>, base: u128) -> u128 {
    chain.fold(0u128, |k, m| k * base + m as u128)
}

fn enumerate_chains(c: &FiniteCategory, non_id_out: &[Vec<MorId>], len: usize) -> Chains {
    let base = c.n_morphisms() as u128;
    let mut flat = Vec::new();
    let mut stack: Vec<MorId> = Vec::with_capacity(len);
    fn dfs(non_id_out: &[Vec<MorId>], c: &FiniteCategory, len: usize, stack: &mut Vec<MorId>, flat: &mut Vec<u32>) {
        if stack.len() == len {
            flat.extend(stack.iter().map(|&m| m as u32));
            return;
        }
        let next: &[MorId] = &non_id_out[c.tgt(*stack.last().unwrap())];
        for &m in next {
            stack.push(m);
            dfs(non_id_out, c, len, stack, flat);
            stack.pop();
        }
    }
    let mut first: Vec<MorId> = (0..c.n_morphisms()).filter(|&m| !c.is_identity(m)).collect();
    first.sort_unstable();
    for m in first {
        stack.push(m);
        dfs(non_id_out, c, len, &mut stack, &mut flat);
        stack.pop();
    }
    let keys: Vec<u128> = flat.chunks(len).map(|ch| key_of(ch.iter().map(|&m| m as MorId), base)).collect();
    debug_assert!(keys.windows(2).all(|w| w[0] < w[1]));
    Chains { len, flat, keys }
}

/// The normalized chain complex of the nerve, built through degree
/// `dmax + 1` so that homology is exact through `dmax`.
pub fn nerve(c: &FiniteCategory, dmax: usize, caps: &Caps) -> Result<ChainComplex> {
    if dmax > caps.dmax {
        return Err(Error::DepthExceeded { requested: dmax, depth: caps.dmax });
    }
    let top = dmax + 1;
    let counts = chain_counts(c, top);
    let total = counts.iter().copied().max().unwrap_or(0);
    if total > caps.nerve_chains {
        return Err(Error::NerveSizeExceeded { count: total, cap: caps.nerve_chains });
    }
    let base = c.n_morphisms() as u128;
    if base > 1 && (top as u32) * (128 - base.leading_zeros()) > 127 {
        return Err(Error::NerveSizeExceeded { count: total, cap: caps.nerve_chains });
    }
    let non_id_out: Vec<Vec<MorId>> = (0..c.n_objects())
        .map(|o| c.out(o).iter().copied().filter(|&m| !c.is_identity(m)).collect())
        .collect();
    let levels: Vec<Chains> = (1..=top).map(|len| enumerate_chains(c, &non_id_out, len)).collect();
    let mut ranks = vec![c.n_objects()];
    ranks.extend(levels.iter().map(Chains::count));
    for (d, &r) in ranks.iter().enumerate() {
        debug_assert_eq!(r as u128, counts[d]);
    }
    let mut higher = Vec::with_capacity(top);
    // degree 1: ∂f = tgt - src
    let d1 = SparseMatrix {
        rows: c.n_objects(),
        columns: (0..levels[0].count())
            .map(|i| {
                let f = levels[0].get(i)[0] as MorId;
                let (s, t) = (c.src(f), c.tgt(f));
                if s == t {
                    vec![]
                } else if s < t {
                    vec![(s, -1), (t, 1)]
                } else {
                    vec![(t, 1), (s, -1)]
                }
            })
            .collect(),
    };
    higher.push(d1);
    for d in 2..=top {
        let (lower, here) = (&levels[d - 2], &levels[d - 1]);
        let columns: Vec<Vec<(usize, i64)>> = (0..here.count())
            .into_par_iter()
            .map(|i| {
                let ch = here.get(i);
                let mut col: Vec<(usize, i64)> = Vec::with_capacity(d + 1);
                let mut face = Vec::with_capacity(d - 1);
                for j in 0..=d {
                    face.clear();
                    match j {
                        0 => face.extend(ch[1..].iter().map(|&m| m as MorId)),
                        _ if j == d => face.extend(ch[..d - 1].iter().map(|&m| m as MorId)),
                        _ => {
                            let comp = c.compose(ch[j] as MorId, ch[j - 1] as MorId);
                            if c.is_identity(comp) {
                                continue;
                            }
                            face.extend(ch[..j - 1].iter().map(|&m| m as MorId));
                            face.push(comp);
                            face.extend(ch[j + 1..].iter().map(|&m| m as MorId));
                        }
                    }
                    let row = lower.index_of(key_of(face.iter().copied(), base));
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    col.push((row, sign));
                }
                col.sort_unstable_by_key(|e| e.0);
                let mut merged: Vec<(usize, i64)> = Vec::with_capacity(col.len());
                for (r, v) in col {
                    match merged.last_mut() {
                        Some(last) if last.0 == r => last.1 += v,
                        _ => merged.push((r, v)),
                    }
                }
                merged.retain(|e| e.1 != 0);
                merged
            })
            .collect();
        higher.push(SparseMatrix { rows: lower.count(), columns });
    }
    log::debug!("nerve of {}: chain ranks {:?}", c.name(), ranks);
    let mut k = ChainComplex::new(ranks, higher)?;
    k.truncate_at = dmax;
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_enumeration() {
        let c = FiniteCategory::poset("chain4", 4, |a, b| a <= b);
        // chains of length d in a 4-element total order: C(4, d+1)
        assert_eq!(chain_counts(&c, 4), vec![4, 6, 4, 1, 0]);
        let k = nerve(&c, 3, &Caps::default()).unwrap();
        assert_eq!(k.ranks, vec![4, 6, 4, 1, 0]);
        assert!(k.check_d_squared().unwrap());
    }

    #[test]
    fn group_category_has_d_squared_zero() {
        let c = FiniteCategory::build("C3", 1, vec![0; 3], vec![0; 3], vec![0], |g, f| Some((g + f) % 3)).unwrap();
        let k = nerve(&c, 3, &Caps::default()).unwrap();
        assert_eq!(k.ranks, vec![1, 2, 4, 8, 16]);
        assert!(k.check_d_squared().unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let c = FiniteCategory::build("C3", 1, vec![0; 3], vec![0; 3], vec![0], |g, f| Some((g + f) % 3)).unwrap();
        let caps = Caps { nerve_chains: 10, ..Caps::default() };
        assert!(matches!(nerve(&c, 3, &caps), Err(Error::NerveSizeExceeded { .. })));
        assert!(matches!(nerve(&c, 9, &Caps::default()), Err(Error::DepthExceeded { .. })));
    }
}
