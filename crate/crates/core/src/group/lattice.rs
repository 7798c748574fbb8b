use std::collections::{HashMap, HashSet};

use super::{Elem, FiniteGroup, Subgroup};
use crate::config::Caps;
use crate::error::{Error, Result};

/// The subgroup generated by `generators`, by breadth-first closure.
pub fn generate_subgroup(g: &FiniteGroup, generators: &[Elem]) -> Subgroup {
    let mut seen = vec![false; g.order()];
    let mut out = vec![g.identity()];
    seen[g.identity() as usize] = true;
    let mut head = 0;
    while head < out.len() {
        let x = out[head];
        for &s in generators {
            let y = g.mul(x, s);
            if !seen[y as usize] {
                seen[y as usize] = true;
                out.push(y);
            }
        }
        head += 1;
    }
    Subgroup::from_unsorted(out)
}

/// Every subgroup of a group, in canonical order, with an index.
#[derive(Debug, Clone)]
pub struct SubgroupLattice {
    subgroups: Vec<Subgroup>,
    index: HashMap<Subgroup, usize>,
}

impl SubgroupLattice {
    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn get(&self, id: usize) -> &Subgroup {
        &self.subgroups[id]
    }

    /// Canonical id of a subgroup, if it belongs to the lattice.
    pub fn id_of(&self, sub: &Subgroup) -> Option<usize> {
        self.index.get(sub).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Subgroup)> {
        self.subgroups.iter().enumerate()
    }
}

/// All subgroups of `within` (a subgroup of `g`), each once, sorted
/// canonically.
///
/// Every subgroup is a join of cyclic subgroups, so we close the set of
/// cyclic subgroups under joins with one more cyclic subgroup.
pub fn subgroup_lattice(g: &FiniteGroup, within: &Subgroup, caps: &Caps) -> Result<SubgroupLattice> {
    if within.order() > caps.lattice {
        return Err(Error::LatticeCapExceeded { order: within.order(), cap: caps.lattice });
    }
    let mut cyclic: Vec<(Elem, Subgroup)> = Vec::new();
    let mut seen_cyclic = HashSet::new();
    for &x in within.elements() {
        let c = generate_subgroup(g, &[x]);
        if seen_cyclic.insert(c.clone()) {
            cyclic.push((x, c));
        }
    }
    let trivial = g.trivial_subgroup();
    let mut found: HashMap<Subgroup, Vec<Elem>> = HashMap::from([(trivial.clone(), Vec::new())]);
    let mut frontier = vec![trivial];
    while let Some(h) = frontier.pop() {
        let gens = found[&h].clone();
        for (x, c) in &cyclic {
            if c.is_subset_of(&h) {
                continue;
            }
            let mut next_gens = gens.clone();
            next_gens.push(*x);
            let joined = generate_subgroup(g, &next_gens);
            if !found.contains_key(&joined) {
                found.insert(joined.clone(), next_gens);
                frontier.push(joined);
            }
        }
    }
    let mut subgroups: Vec<Subgroup> = found.into_keys().collect();
    subgroups.sort();
    let index = subgroups.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    Ok(SubgroupLattice { subgroups, index })
}
