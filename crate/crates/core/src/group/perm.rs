//! Permutations in disjoint-cycle notation.

use crate::error::{Error, Result};

/// A permutation of `0..degree`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Image of a 0-based point.
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Pads with fixed points up to `degree`.
    pub fn extended(&self, degree: usize) -> Perm {
        let mut v = self.0.clone();
        v.extend(self.0.len() as u32..degree as u32);
        Perm(v)
    }

    /// Parses 1-based disjoint-cycle notation such as `"(1 2)(3 4)"` or `"()"`.
    pub fn parse_cycles(text: &str) -> Result<Perm> {
        let bad = |why: &str| Error::InvalidPermutation(format!("{text:?}: {why}"));
        let mut cycles: Vec<Vec<u32>> = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(bad("expected '('"));
            }
            let close = rest.find(')').ok_or_else(|| bad("unbalanced parenthesis"))?;
            let body = &rest[1..close];
            let mut cycle = Vec::new();
            for tok in body.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                let point: u32 = tok.parse().map_err(|_| bad("non-integer point"))?;
                if point == 0 {
                    return Err(bad("points are 1-based"));
                }
                cycle.push(point - 1);
            }
            cycles.push(cycle);
            rest = rest[close + 1..].trim_start();
        }
        let degree = cycles.iter().flatten().map(|&x| x as usize + 1).max().unwrap_or(0);
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut seen = vec![false; degree];
        for cycle in &cycles {
            for &x in cycle {
                if std::mem::replace(&mut seen[x as usize], true) {
                    return Err(bad("cycles are not disjoint"));
                }
            }
            for (i, &x) in cycle.iter().enumerate() {
                images[x as usize] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Perm(images))
    }

    /// 1-based disjoint-cycle notation, fixed points omitted.
    pub fn to_cycles(&self) -> String {
        let mut seen = vec![false; self.0.len()];
        let mut out = String::new();
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push((x + 1).to_string());
                x = self.0[x] as usize;
            }
            out.push('(');
            out.push_str(&cycle.join(" "));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}
