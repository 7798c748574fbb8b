use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LinkingSystem;
use crate::catkit::MorId;
use crate::group::{center, GroupMono};

/// Outcome of the exhaustive axiom check.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkingAxiomReport {
    pub pairs_checked: usize,
    pub morphisms_checked: usize,
    pub failures: Vec<String>,
}

impl LinkingAxiomReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

const MAX_FAILURES: usize = 32;

/// Checks that `π` is a functor, axioms (A), (B), (C), that the inclusions
/// form a compatible lift of the subgroup poset, and that every morphism is
/// a monomorphism and an epimorphism.
pub fn check_linking_axioms(l: &LinkingSystem) -> LinkingAxiomReport {
    let g = l.group().clone();
    let f = l.fusion().clone();
    let n = l.n_objects();
    let mut failures: Vec<String> = Vec::new();

    // π is a functor over the objects
    let functor_failures: Vec<String> = (0..l.n_morphisms())
        .into_par_iter()
        .flat_map_iter(|m| {
            let mut out = Vec::new();
            let (a, b) = (l.src(m), l.tgt(m));
            let phi = l.projection(m);
            if phi.source != *l.object_subgroup(a) || phi.target != *l.object_subgroup(b) {
                out.push(format!("π({m}) has the wrong endpoints"));
                return out;
            }
            for &h in l.cat().out(b) {
                if *l.projection(l.compose(h, m)) != l.projection(h).after(phi) {
                    out.push(format!("π does not preserve the composite {h}∘{m}"));
                    break;
                }
            }
            out
        })
        .collect();
    failures.extend(functor_failures);
    for o in 0..n {
        if !l.projection(l.identity(o)).is_identity_map() {
            failures.push(format!("π(id) is not the identity on object {o}"));
        }
    }

    // (A): free action of Z(P), fibres of size |Z(P)|, onto Hom_F(P,Q)
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let a_failures: Vec<String> = pairs
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            let mut out = Vec::new();
            let pa = l.object_subgroup(a);
            let z = center(&g, pa);
            let homs_f: HashSet<&GroupMono> =
                f.homs(l.object_subgroup_id(a), l.object_subgroup_id(b)).iter().collect();
            let homs_l = l.hom(a, b);
            let mut images: HashSet<&GroupMono> = HashSet::new();
            for &m in homs_l {
                let phi = l.projection(m);
                if !homs_f.contains(phi) {
                    out.push(format!("π({m}) is not in Hom_F({a},{b})"));
                }
                images.insert(phi);
                let orbit: HashSet<MorId> = z.elements().iter().map(|&x| l.compose(m, l.delta(a, x))).collect();
                if orbit.len() != z.order() {
                    out.push(format!("Z(P) does not act freely on {m}"));
                }
                if orbit.iter().any(|&k| l.projection(k) != phi) {
                    out.push(format!("Z(P)-orbit of {m} leaves its fibre"));
                }
            }
            if images.len() != homs_f.len() {
                out.push(format!("π: Hom_L({a},{b}) → Hom_F is not onto"));
            }
            if homs_l.len() != z.order() * homs_f.len() {
                out.push(format!("|Hom_L({a},{b})| = {} ≠ |Z(P)|·|Hom_F| = {}", homs_l.len(), z.order() * homs_f.len()));
            }
            out
        })
        .collect();
    failures.extend(a_failures);

    // (B) and (C), and injectivity of δ
    let bc_failures: Vec<String> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut out = Vec::new();
            let pa = l.object_subgroup(a);
            let mut seen = HashSet::new();
            for &x in pa.elements() {
                let d = l.delta(a, x);
                if l.src(d) != a || l.tgt(d) != a {
                    out.push(format!("δ_{a}({x}) is not an automorphism"));
                    continue;
                }
                seen.insert(d);
                if *l.projection(d) != GroupMono::conjugation(&g, x, pa, pa) {
                    out.push(format!("(B): π(δ_{a}({x})) ≠ c_{x}"));
                }
                for &y in pa.elements() {
                    if l.compose(l.delta(a, x), l.delta(a, y)) != l.delta(a, g.mul(x, y)) {
                        out.push(format!("δ_{a} is not a homomorphism at ({x},{y})"));
                    }
                }
                for &m in l.cat().out(a) {
                    let b = l.tgt(m);
                    let lhs = l.compose(m, d);
                    let rhs = l.compose(l.delta(b, l.projection(m).apply(x)), m);
                    if lhs != rhs {
                        out.push(format!("(C) fails for {m} at {x}"));
                    }
                }
            }
            if seen.len() != pa.order() {
                out.push(format!("δ_{a} is not injective"));
            }
            out
        })
        .collect();
    failures.extend(bc_failures);

    // inclusions
    for a in 0..n {
        for b in 0..n {
            let contained = l.object_subgroup(a).is_subset_of(l.object_subgroup(b));
            match (contained, l.inclusion(a, b)) {
                (true, None) => failures.push(format!("missing inclusion {a} ⊆ {b}")),
                (false, Some(_)) => failures.push(format!("inclusion {a} → {b} between non-nested objects")),
                (true, Some(m)) => {
                    if l.src(m) != a || l.tgt(m) != b {
                        failures.push(format!("ι_{a}^{b} has the wrong endpoints"));
                    } else if *l.projection(m) != GroupMono::inclusion(l.object_subgroup(a), l.object_subgroup(b)) {
                        failures.push(format!("π(ι_{a}^{b}) is not the inclusion"));
                    }
                }
                (false, None) => {}
            }
        }
        if l.inclusion(a, a) != Some(l.identity(a)) {
            failures.push(format!("ι_{a}^{a} is not the identity"));
        }
    }
    if failures.is_empty() {
        for (&(a, b), &ab) in l.inclusions() {
            for c in 0..n {
                if let (Some(bc), Some(ac)) = (l.inclusion(b, c), l.inclusion(a, c)) {
                    if l.compose(bc, ab) != ac {
                        failures.push(format!("ι_{b}^{c}∘ι_{a}^{b} ≠ ι_{a}^{c}"));
                    }
                }
            }
        }
    }

    // mono and epi by exhaustive cancellation
    let cancel_failures: Vec<String> = (0..l.n_morphisms())
        .into_par_iter()
        .flat_map_iter(|m| {
            let mut out = Vec::new();
            let (a, b) = (l.src(m), l.tgt(m));
            for x in 0..n {
                let post: HashSet<MorId> = l.hom(x, a).iter().map(|&h| l.compose(m, h)).collect();
                if post.len() != l.hom(x, a).len() {
                    out.push(format!("{m} is not a monomorphism"));
                    break;
                }
                let pre: HashSet<MorId> = l.hom(b, x).iter().map(|&h| l.compose(h, m)).collect();
                if pre.len() != l.hom(b, x).len() {
                    out.push(format!("{m} is not an epimorphism"));
                    break;
                }
            }
            out
        })
        .collect();
    failures.extend(cancel_failures);

    failures.truncate(MAX_FAILURES);
    LinkingAxiomReport { pairs_checked: n * n, morphisms_checked: l.n_morphisms(), failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linking::tests::{linking, s4_linking};

    #[test]
    fn group_models_pass() {
        assert!(check_linking_axioms(&s4_linking()).ok());
        let a5 = linking(&["(1 2 3)", "(3 4 5)"], 2);
        assert_eq!(a5.n_objects(), 1);
        assert!(check_linking_axioms(&a5).ok());
        let s3c3 = linking(&["(1 2 3)", "(1 2)", "(4 5 6)"], 3);
        assert!(check_linking_axioms(&s3c3).ok());
    }

    #[test]
    fn corrupted_delta_is_caught() {
        let mut l = s4_linking();
        // swap δ of two elements of an object of order 4
        let o = l.objects().find(|&o| l.object_subgroup(o).order() == 4).unwrap();
        l.delta[o].swap(1, 2);
        let rep = check_linking_axioms(&l);
        assert!(!rep.ok());
    }

    #[test]
    fn corrupted_inclusion_is_caught() {
        let mut l = s4_linking();
        let mut keys: Vec<(usize, usize)> = l.inclusions.keys().copied().filter(|&(a, b)| a != b).collect();
        keys.sort();
        let (a, b) = keys[0];
        let other = *l.hom(a, b).iter().find(|&&m| !l.projection(m).is_identity_map()).unwrap();
        l.inclusions.insert((a, b), other);
        assert!(!check_linking_axioms(&l).ok());
    }
}
