//! Fusion systems over a finite p-subgroup `S` of an ambient group.
//!
//! Subgroups of `S` are addressed by their id in the canonical subgroup
//! lattice of `S`. Morphism sets are stored extensionally: `Hom_F(P,Q)` is
//! a sorted list of injective maps, compared pointwise.

mod classify;
mod saturation;

pub use classify::{
    classify, f_conjugacy_classes, is_centric, is_fully_centralized, is_fully_normalized, is_radical,
    out_f, FClass, OutF, SubgroupClassification,
};
pub use saturation::{check_fusion_axioms, check_saturation, n_phi, AxiomIII, FusionAxiomReport, SaturationReport};

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::group::{
    centralizer_in, is_p_power, is_prime, normalizer_in, subgroup_lattice, sylow_p, Elem, FiniteGroup, GroupMono,
    Subgroup, SubgroupLattice,
};

/// How a fusion system was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FusionProvenance {
    /// `F_S(G)` for the ambient group.
    Group,
    /// Generated by explicitly listed isomorphisms together with `Hom_S`.
    HandSpecified,
    /// The normalizer subsystem `N_F(P)` of another fusion system.
    Normalizer { of: Subgroup },
}

/// A fusion system over `S ⊆ G`.
#[derive(Debug, Clone)]
pub struct FusionSystem {
    group: Arc<FiniteGroup>,
    s: Subgroup,
    p: u64,
    lattice: SubgroupLattice,
    homs: Vec<Vec<GroupMono>>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    provenance: FusionProvenance,
    caps: Caps,
}

/// `F_S(G)` at the prime `p`, with `S` the canonical Sylow subgroup.
pub fn fusion_from_group(g: Arc<FiniteGroup>, p: u64, caps: &Caps) -> Result<FusionSystem> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let s = sylow_p(&g, p);
    let lattice = subgroup_lattice(&g, &s, caps)?;
    let isos: Vec<HashMap<usize, HashSet<Vec<Elem>>>> = lattice
        .subgroups()
        .par_iter()
        .map(|sub| {
            let mut out: HashMap<usize, HashSet<Vec<Elem>>> = HashMap::new();
            for x in g.elements() {
                let images: Vec<Elem> = sub.elements().iter().map(|&y| g.conj(x, y)).collect();
                if images.iter().all(|&y| s.contains(y)) {
                    let rid = lattice
                        .id_of(&Subgroup::from_unsorted(images.clone()))
                        .expect("a conjugate inside S is in the lattice of S");
                    out.entry(rid).or_default().insert(images);
                }
            }
            out
        })
        .collect();
    Ok(FusionSystem::from_isos(g, s, p, lattice, isos, FusionProvenance::Group, *caps))
}

impl FusionSystem {
    /// The smallest fusion system over `s` containing `Hom_S` and the given
    /// monomorphisms: closure under composition, inverses and restriction.
    pub fn generated_by(
        g: Arc<FiniteGroup>,
        s: Subgroup,
        p: u64,
        generators: &[GroupMono],
        caps: &Caps,
    ) -> Result<FusionSystem> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if !s.is_subgroup_of_group(&g) || !is_p_power(s.order() as u64, p) {
            return Err(Error::InvalidInput("S must be a p-subgroup of the ambient group".into()));
        }
        let lattice = subgroup_lattice(&g, &s, caps)?;
        let n = lattice.len();
        let id = |sub: &Subgroup| lattice.id_of(sub);
        let mut isos: Vec<HashMap<usize, HashSet<Vec<Elem>>>> = vec![HashMap::new(); n];
        let mut work: Vec<(usize, usize, Vec<Elem>)> = Vec::new();
        for (pid, sub) in lattice.iter() {
            for &x in s.elements() {
                let images: Vec<Elem> = sub.elements().iter().map(|&y| g.conj(x, y)).collect();
                let rid = id(&Subgroup::from_unsorted(images.clone())).unwrap();
                work.push((pid, rid, images));
            }
        }
        for phi in generators {
            if !phi.is_injective_hom(&g) {
                return Err(Error::InvalidInput("generator is not an injective homomorphism".into()));
            }
            let (Some(pid), Some(rid)) = (id(&phi.source), id(&phi.image())) else {
                return Err(Error::InvalidInput("generator is not between subgroups of S".into()));
            };
            work.push((pid, rid, phi.images.clone()));
        }
        while let Some((pid, rid, images)) = work.pop() {
            if !isos[pid].entry(rid).or_default().insert(images.clone()) {
                continue;
            }
            let src = lattice.get(pid).clone();
            let phi = GroupMono::new(src.clone(), lattice.get(rid).clone(), images);
            let inv = phi.inverse();
            work.push((rid, pid, inv.images.clone()));
            for (&tid, set) in &isos[rid] {
                for next in set {
                    let psi = GroupMono::new(lattice.get(rid).clone(), lattice.get(tid).clone(), next.clone());
                    work.push((pid, tid, psi.after(&phi).images));
                }
            }
            for (uid, map) in isos.iter().enumerate() {
                if let Some(set) = map.get(&pid) {
                    for prev in set {
                        let chi = GroupMono::new(lattice.get(uid).clone(), src.clone(), prev.clone());
                        work.push((uid, rid, phi.after(&chi).images));
                    }
                }
            }
            for (qid, q) in lattice.iter() {
                if q.order() < src.order() && q.is_subset_of(&src) {
                    let res = phi.restrict(q);
                    work.push((qid, id(&res.image()).unwrap(), res.images));
                }
            }
        }
        Ok(FusionSystem::from_isos(g, s, p, lattice, isos, FusionProvenance::HandSpecified, *caps))
    }

    fn from_isos(
        g: Arc<FiniteGroup>,
        s: Subgroup,
        p: u64,
        lattice: SubgroupLattice,
        isos: Vec<HashMap<usize, HashSet<Vec<Elem>>>>,
        provenance: FusionProvenance,
        caps: Caps,
    ) -> FusionSystem {
        let n = lattice.len();
        let supergroups: Vec<Vec<usize>> = lattice
            .subgroups()
            .iter()
            .map(|r| (0..n).filter(|&q| r.is_subset_of(lattice.get(q))).collect())
            .collect();
        let mut homs: Vec<Vec<GroupMono>> = vec![Vec::new(); n * n];
        for (pid, map) in isos.iter().enumerate() {
            for (&rid, set) in map {
                for &qid in &supergroups[rid] {
                    let slot = &mut homs[pid * n + qid];
                    for images in set {
                        slot.push(GroupMono::new(lattice.get(pid).clone(), lattice.get(qid).clone(), images.clone()));
                    }
                }
            }
        }
        for slot in &mut homs {
            slot.sort();
        }
        Self::assemble(g, s, p, lattice, homs, provenance, caps)
    }

    /// Wraps explicitly computed hom sets (sorted per pair, indexed `P·n + Q`).
    pub(crate) fn from_hom_sets(
        g: Arc<FiniteGroup>,
        s: Subgroup,
        p: u64,
        lattice: SubgroupLattice,
        mut homs: Vec<Vec<GroupMono>>,
        provenance: FusionProvenance,
        caps: Caps,
    ) -> FusionSystem {
        for slot in &mut homs {
            slot.sort();
            slot.dedup();
        }
        Self::assemble(g, s, p, lattice, homs, provenance, caps)
    }

    fn assemble(
        g: Arc<FiniteGroup>,
        s: Subgroup,
        p: u64,
        lattice: SubgroupLattice,
        homs: Vec<Vec<GroupMono>>,
        provenance: FusionProvenance,
        caps: Caps,
    ) -> FusionSystem {
        let n = lattice.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for a in 0..n {
            if class_of[a] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = (a..n)
                .filter(|&b| lattice.get(b).order() == lattice.get(a).order() && !homs[a * n + b].is_empty())
                .collect();
            for &b in &members {
                class_of[b] = classes.len();
            }
            classes.push(members);
        }
        FusionSystem { group: g, s, p, lattice, homs, class_of, classes, provenance, caps }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn s(&self) -> &Subgroup {
        &self.s
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub fn provenance(&self) -> &FusionProvenance {
        &self.provenance
    }

    pub fn lattice(&self) -> &SubgroupLattice {
        &self.lattice
    }

    pub fn n_subgroups(&self) -> usize {
        self.lattice.len()
    }

    pub fn subgroup(&self, id: usize) -> &Subgroup {
        self.lattice.get(id)
    }

    pub fn id_of(&self, sub: &Subgroup) -> Option<usize> {
        self.lattice.id_of(sub)
    }

    /// Lattice id of a subgroup, or `NotContained`.
    pub fn require_id(&self, sub: &Subgroup) -> Result<usize> {
        self.id_of(sub).ok_or_else(|| Error::NotContained(format!("{sub:?}")))
    }

    pub fn s_id(&self) -> usize {
        self.lattice.len() - 1
    }

    /// `Hom_F(P,Q)`, sorted.
    pub fn homs(&self, p: usize, q: usize) -> &[GroupMono] {
        &self.homs[p * self.lattice.len() + q]
    }

    /// `Aut_F(P)`.
    pub fn auts(&self, p: usize) -> &[GroupMono] {
        self.homs(p, p)
    }

    /// Whether a map is a morphism of `F` (compared pointwise).
    pub fn contains(&self, phi: &GroupMono) -> bool {
        match (self.id_of(&phi.source), self.id_of(&phi.target)) {
            (Some(p), Some(q)) => self.homs(p, q).binary_search(phi).is_ok(),
            _ => false,
        }
    }

    /// Index of the F-conjugacy class of a subgroup.
    pub fn class_of(&self, id: usize) -> usize {
        self.class_of[id]
    }

    /// F-conjugacy classes as lists of lattice ids, ordered by least member.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn f_conjugate(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    /// `N_S(P)`.
    pub fn normalizer_in_s(&self, p: &Subgroup) -> Subgroup {
        normalizer_in(&self.group, &self.s, p)
    }

    /// `C_S(P)`.
    pub fn centralizer_in_s(&self, p: &Subgroup) -> Subgroup {
        centralizer_in(&self.group, &self.s, p)
    }

    /// `Hom_S(P,Q)` as a deduplicated sorted list.
    pub fn homs_s(&self, p: usize, q: usize) -> Vec<GroupMono> {
        let (ps, qs) = (self.subgroup(p), self.subgroup(q));
        let mut out: Vec<GroupMono> = self
            .s
            .elements()
            .iter()
            .map(|&x| GroupMono::conjugation(&self.group, x, ps, qs))
            .filter(|m| m.images.iter().all(|&y| qs.contains(y)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// `Aut_S(P)` as a set of image lists.
    pub fn aut_s_images(&self, p: &Subgroup) -> HashSet<Vec<Elem>> {
        self.normalizer_in_s(p)
            .elements()
            .iter()
            .map(|&x| p.elements().iter().map(|&y| self.group.conj(x, y)).collect())
            .collect()
    }

    /// Total number of stored morphisms.
    pub fn morphism_count(&self) -> usize {
        self.homs.iter().map(Vec::len).sum()
    }

    /// Sub-lattice ids of the subgroups containing `p`.
    pub fn supergroups(&self, p: usize) -> Vec<usize> {
        let sub = self.subgroup(p);
        (0..self.n_subgroups()).filter(|&q| sub.is_subset_of(self.subgroup(q))).collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::group::Perm;

    pub(crate) fn group(gens: &[&str]) -> Arc<FiniteGroup> {
        let gens: Vec<Perm> = gens.iter().map(|g| Perm::parse_cycles(g).unwrap()).collect();
        Arc::new(FiniteGroup::from_permutations(&gens, &Caps::default()).unwrap())
    }

    pub(crate) fn s4_fusion() -> FusionSystem {
        fusion_from_group(group(&["(1 2)", "(1 2 3 4)"]), 2, &Caps::default()).unwrap()
    }

    #[test]
    fn abelian_group_gives_inclusions() {
        let g = group(&["(1 2)", "(3 4)"]);
        let f = fusion_from_group(g, 2, &Caps::default()).unwrap();
        for p in 0..f.n_subgroups() {
            for q in 0..f.n_subgroups() {
                let homs = f.homs(p, q);
                if f.subgroup(p).is_subset_of(f.subgroup(q)) {
                    assert_eq!(homs.len(), 1);
                    assert_eq!(homs[0].images, f.subgroup(p).elements());
                } else {
                    assert!(homs.is_empty());
                }
            }
        }
    }

    #[test]
    fn p_group_fusion_is_conjugation() {
        let f = fusion_from_group(group(&["(1 2 3 4)", "(1 3)"]), 2, &Caps::default()).unwrap();
        for p in 0..f.n_subgroups() {
            for q in 0..f.n_subgroups() {
                assert_eq!(f.homs(p, q), f.homs_s(p, q).as_slice());
            }
        }
    }

    #[test]
    fn s4_klein_fours() {
        let f = s4_fusion();
        let g = f.group().clone();
        let v4: Vec<usize> = (0..f.n_subgroups())
            .filter(|&i| f.subgroup(i).order() == 4 && f.subgroup(i).elements().iter().all(|&x| g.elem_order(x) <= 2))
            .collect();
        assert_eq!(v4.len(), 2);
        assert!(!f.f_conjugate(v4[0], v4[1]));
        let normal = v4
            .iter()
            .copied()
            .find(|&i| crate::group::is_normal_in(&g, f.subgroup(i), &g.whole()))
            .unwrap();
        assert_eq!(f.auts(normal).len(), 6);
    }

    #[test]
    fn non_prime_rejected() {
        assert!(fusion_from_group(group(&["(1 2)"]), 4, &Caps::default()).is_err());
    }

    #[test]
    fn generated_by_group_conjugations_matches_group_fusion() {
        let f = s4_fusion();
        let g = f.group().clone();
        // generators: conjugation by every element of S4 on every subgroup of S it maps into S
        let mut gens = Vec::new();
        for (pid, sub) in f.lattice().iter() {
            for q in 0..f.n_subgroups() {
                if f.subgroup(q).order() == sub.order() {
                    gens.extend(f.homs(pid, q).iter().cloned());
                }
            }
        }
        let h = FusionSystem::generated_by(g, f.s().clone(), 2, &gens, &Caps::default()).unwrap();
        for p in 0..f.n_subgroups() {
            for q in 0..f.n_subgroups() {
                assert_eq!(f.homs(p, q), h.homs(p, q));
            }
        }
    }
}
