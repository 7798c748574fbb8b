use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::FusionSystem;
use crate::error::{Error, Result};
use crate::group::{big_o_p, Elem, FiniteGroup, GroupMono, Subgroup};

/// Per-subgroup classification record (schema `fusion-v1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupClassification {
    pub subgroup_id: usize,
    pub order: usize,
    pub elements: Vec<Elem>,
    pub fully_normalized: bool,
    pub fully_centralized: bool,
    pub centric: bool,
    pub radical: bool,
    pub f_conjugacy_class_id: usize,
    pub out_f_order: usize,
}

/// An F-conjugacy class with its canonical representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FClass {
    pub id: usize,
    pub members: Vec<usize>,
    /// Canonically least fully normalized member.
    pub representative: usize,
}

/// F-conjugacy classes, each represented by its least fully normalized member.
pub fn f_conjugacy_classes(f: &FusionSystem) -> Vec<FClass> {
    f.classes()
        .iter()
        .enumerate()
        .map(|(id, members)| FClass {
            id,
            members: members.clone(),
            representative: *members
                .iter()
                .find(|&&m| is_fully_normalized(f, m))
                .expect("every class has a fully normalized member"),
        })
        .collect()
}

/// `|N_S(P)|` is maximal in the F-class of `P`.
pub fn is_fully_normalized(f: &FusionSystem, p: usize) -> bool {
    let size = |q: usize| f.normalizer_in_s(f.subgroup(q)).size();
    let mine = size(p);
    f.classes()[f.class_of(p)].iter().all(|&q| size(q) <= mine)
}

/// `|C_S(P)|` is maximal in the F-class of `P`.
pub fn is_fully_centralized(f: &FusionSystem, p: usize) -> bool {
    let size = |q: usize| f.centralizer_in_s(f.subgroup(q)).size();
    let mine = size(p);
    f.classes()[f.class_of(p)].iter().all(|&q| size(q) <= mine)
}

/// `C_S(Q) ⊆ Q` for every F-conjugate `Q` of `P`.
pub fn is_centric(f: &FusionSystem, p: usize) -> bool {
    f.classes()[f.class_of(p)]
        .iter()
        .all(|&q| f.centralizer_in_s(f.subgroup(q)).is_subset_of(f.subgroup(q)))
}

/// `Out_F(P) = Aut_F(P)/Inn(P)` as a concrete table group.
#[derive(Debug, Clone)]
pub struct OutF {
    pub subgroup: Subgroup,
    pub group: FiniteGroup,
    /// Canonical (least) representative automorphism of each class.
    pub reps: Vec<GroupMono>,
    class: HashMap<Vec<Elem>, Elem>,
}

impl OutF {
    /// Class of an automorphism of `P` in `Out_F(P)`.
    pub fn class_of(&self, alpha: &GroupMono) -> Option<Elem> {
        self.class.get(&alpha.images).copied()
    }

    /// `c(x)`: the class of conjugation by `x ∈ N_S(P)`.
    pub fn c(&self, g: &FiniteGroup, x: Elem) -> Option<Elem> {
        let images: Vec<Elem> = self.subgroup.elements().iter().map(|&y| g.conj(x, y)).collect();
        self.class.get(&images).copied()
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Image of a subgroup of `N_S(P)` under `c`, as a subgroup of `Out_F(P)`.
    pub fn image_of(&self, g: &FiniteGroup, sub: &Subgroup) -> Subgroup {
        Subgroup::from_unsorted(sub.elements().iter().map(|&x| self.c(g, x).expect("x normalizes P")).collect())
    }
}

pub fn out_f(f: &FusionSystem, p: usize) -> Result<OutF> {
    let sub = f.subgroup(p).clone();
    if sub.order() > f.caps().aut {
        return Err(Error::AutCapExceeded { order: sub.order(), cap: f.caps().aut });
    }
    let g = f.group();
    let mut inner: Vec<GroupMono> = sub
        .elements()
        .iter()
        .map(|&x| GroupMono::conjugation(g, x, &sub, &sub))
        .collect();
    inner.sort();
    inner.dedup();
    let auts = f.auts(p);
    let mut class: HashMap<Vec<Elem>, Elem> = HashMap::new();
    let mut reps: Vec<GroupMono> = Vec::new();
    for a in auts {
        if class.contains_key(&a.images) {
            continue;
        }
        let id = reps.len() as Elem;
        for i in &inner {
            class.insert(a.after(i).images, id);
        }
        reps.push(a.clone());
    }
    if class.len() != auts.len() {
        return Err(Error::AxiomViolation(format!(
            "Aut_F of {sub:?} is not a union of Inn-cosets"
        )));
    }
    let table: Vec<Vec<Elem>> = reps
        .iter()
        .map(|a| reps.iter().map(|b| class[&a.after(b).images]).collect())
        .collect();
    let group = FiniteGroup::from_table(&table)?;
    Ok(OutF { subgroup: sub, group, reps, class })
}

/// `O_p(Out_F(P)) = 1`, computed on the class representative.
pub fn is_radical(f: &FusionSystem, p: usize) -> Result<bool> {
    let rep = f_conjugacy_classes(f)[f.class_of(p)].representative;
    let out = out_f(f, rep)?;
    Ok(big_o_p(&out.group, f.prime()).is_trivial())
}

/// Classification of every subgroup of `S`, with class-invariance of the
/// centric and radical flags asserted.
pub fn classify(f: &FusionSystem) -> Result<Vec<SubgroupClassification>> {
    let classes = f_conjugacy_classes(f);
    let mut radical_of_class = Vec::with_capacity(classes.len());
    let mut out_order_of_class = Vec::with_capacity(classes.len());
    for c in &classes {
        let mut flags = Vec::new();
        for &m in &c.members {
            let out = out_f(f, m)?;
            flags.push((big_o_p(&out.group, f.prime()).is_trivial(), out.order()));
        }
        if flags.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::AxiomViolation(format!("Out_F varies over class {}", c.id)));
        }
        radical_of_class.push(flags[0].0);
        out_order_of_class.push(flags[0].1);
    }
    let mut out = Vec::with_capacity(f.n_subgroups());
    for (id, sub) in f.lattice().iter() {
        let cls = f.class_of(id);
        out.push(SubgroupClassification {
            subgroup_id: id,
            order: sub.order(),
            elements: sub.elements().to_vec(),
            fully_normalized: is_fully_normalized(f, id),
            fully_centralized: is_fully_centralized(f, id),
            centric: is_centric(f, id),
            radical: radical_of_class[cls],
            f_conjugacy_class_id: cls,
            out_f_order: out_order_of_class[cls],
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Caps;
    use crate::fusion::fusion_from_group;
    use crate::fusion::tests::{group, s4_fusion};

    fn find(f: &FusionSystem, pred: impl Fn(&Subgroup) -> bool) -> Vec<usize> {
        (0..f.n_subgroups()).filter(|&i| pred(f.subgroup(i))).collect()
    }

    #[test]
    fn s4_classification() {
        let f = s4_fusion();
        let g = f.group().clone();
        let involutions_only = |s: &Subgroup| s.elements().iter().all(|&x| g.elem_order(x) <= 2);
        let c4 = find(&f, |s| s.order() == 4 && !involutions_only(s))[0];
        let v4 = find(&f, |s| s.order() == 4 && involutions_only(s));
        let normal = *v4.iter().find(|&&i| crate::group::is_normal_in(&g, f.subgroup(i), &g.whole())).unwrap();
        let other = *v4.iter().find(|&&i| i != normal).unwrap();
        let s = f.s_id();
        assert!(is_centric(&f, c4) && !is_radical(&f, c4).unwrap());
        assert!(is_centric(&f, normal) && is_radical(&f, normal).unwrap());
        assert!(is_centric(&f, other) && !is_radical(&f, other).unwrap());
        assert!(is_centric(&f, s) && is_radical(&f, s).unwrap());
        assert_eq!(out_f(&f, normal).unwrap().order(), 6);
        assert_eq!(out_f(&f, c4).unwrap().order(), 2);
        assert!(is_fully_normalized(&f, other));
        assert!(is_fully_normalized(&f, s));
        let z = find(&f, |x| x.order() == 2 && x.is_subset_of(&crate::group::center(&g, f.s())))[0];
        assert!(!is_centric(&f, z));
    }

    #[test]
    fn s4_order_two_classes() {
        let f = s4_fusion();
        let twos: std::collections::BTreeSet<usize> =
            find(&f, |s| s.order() == 2).into_iter().map(|i| f.class_of(i)).collect();
        // transpositions and double transpositions
        assert_eq!(twos.len(), 2);
        // one order-2 class has a member with strictly smaller normalizer
        let not_fn = find(&f, |s| s.order() == 2).into_iter().filter(|&i| !is_fully_normalized(&f, i)).count();
        assert!(not_fn > 0);
    }

    #[test]
    fn p_group_classes_are_s_classes() {
        let g = group(&["(1 2 3 4)", "(1 3)"]);
        let f = fusion_from_group(g.clone(), 2, &Caps::default()).unwrap();
        for a in 0..f.n_subgroups() {
            for b in 0..f.n_subgroups() {
                let conj = g.elements().any(|x| f.subgroup(a).conjugate(&g, x) == *f.subgroup(b));
                assert_eq!(f.f_conjugate(a, b), conj);
            }
        }
        assert_eq!(f_conjugacy_classes(&f)[0].members, vec![0]);
    }

    #[test]
    fn abelian_only_s_is_centric() {
        let f = fusion_from_group(group(&["(1 2)", "(3 4)", "(5 6)"]), 2, &Caps::default()).unwrap();
        let rows = classify(&f).unwrap();
        let centric: Vec<usize> = rows.iter().filter(|r| r.centric).map(|r| r.subgroup_id).collect();
        assert_eq!(centric, vec![f.s_id()]);
    }

    #[test]
    fn flags_constant_on_classes() {
        let f = s4_fusion();
        let rows = classify(&f).unwrap();
        for a in &rows {
            for b in &rows {
                if a.f_conjugacy_class_id == b.f_conjugacy_class_id {
                    assert_eq!((a.centric, a.radical, a.out_f_order), (b.centric, b.radical, b.out_f_order));
                }
            }
        }
    }
}
