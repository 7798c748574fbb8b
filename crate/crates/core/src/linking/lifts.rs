use std::collections::HashMap;

use super::LinkingSystem;
use crate::catkit::{MorId, ObjId};
use crate::error::{Error, Result};
use crate::group::GroupMono;

fn unique(candidates: Vec<MorId>, what: &str) -> Result<MorId> {
    match candidates.as_slice() {
        [m] => Ok(*m),
        [] => Err(Error::NoLift(what.to_string())),
        _ => Err(Error::NonUniqueLift(format!("{what}: {} candidates", candidates.len()))),
    }
}

impl LinkingSystem {
    /// A compatible system of inclusions: `ι_P^S` is the least lift of the
    /// inclusion into `S`, and `ι_P^Q` is the unique factor of `ι_P^S`
    /// through `ι_Q^S` over the inclusion. Any choice of the `ι_P^S`
    /// determines a compatible system, so taking each one least gives the
    /// least system.
    pub(crate) fn choose_inclusions(&self) -> Result<HashMap<(ObjId, ObjId), MorId>> {
        let f = self.fusion();
        let top = self
            .object_of_id(f.s_id())
            .ok_or_else(|| Error::PreconditionViolated("S must be an object".into()))?;
        let s = f.s().clone();
        let mut to_top = Vec::with_capacity(self.n_objects());
        for o in self.objects() {
            let incl = GroupMono::inclusion(self.object_subgroup(o), &s);
            let least = self
                .lifts_of(&incl)
                .iter()
                .copied()
                .min()
                .ok_or_else(|| Error::NoLift(format!("inclusion of object {o} into S")))?;
            to_top.push(least);
        }
        let mut out = HashMap::new();
        for a in self.objects() {
            for b in self.objects() {
                let (pa, pb) = (self.object_subgroup(a), self.object_subgroup(b));
                if !pa.is_subset_of(pb) {
                    continue;
                }
                let m = if a == b {
                    self.identity(a)
                } else if b == top {
                    to_top[a]
                } else {
                    self.lift_factor(to_top[b], to_top[a], &GroupMono::inclusion(pa, pb))?
                };
                out.insert((a, b), m);
            }
        }
        Ok(out)
    }

    /// The unique `φ̃` over `φ: P → Q` with `ψ̃∘φ̃ = ψφ̃`, where `ψ̃: Q → R`
    /// and `ψφ̃: P → R`.
    pub fn lift_factor(&self, psi: MorId, psi_phi: MorId, phi: &GroupMono) -> Result<MorId> {
        let (q, p) = (self.src(psi), self.src(psi_phi));
        if self.tgt(psi) != self.tgt(psi_phi)
            || phi.source != *self.object_subgroup(p)
            || phi.target != *self.object_subgroup(q)
        {
            return Err(Error::PreconditionViolated("lift_factor: endpoints do not align".into()));
        }
        if self.projection(psi).after(phi) != *self.projection(psi_phi) {
            return Err(Error::PreconditionViolated("lift_factor: π(ψ̃)∘φ ≠ π(ψφ̃)".into()));
        }
        let candidates = self.lifts_of(phi).iter().copied().filter(|&x| self.compose(psi, x) == psi_phi).collect();
        unique(candidates, "lift_factor")
    }

    /// The unique `φ̄: P → R` with `ι_R^Q∘φ̄ = φ`, for an object `R` with
    /// `π(φ)(P) ⊆ R ⊆ Q`.
    pub fn corestrict_to(&self, m: MorId, r: ObjId) -> Result<MorId> {
        let q = self.tgt(m);
        let incl = self
            .inclusion(r, q)
            .ok_or_else(|| Error::PreconditionViolated(format!("object {r} is not inside the target of {m}")))?;
        let phi = self.projection(m);
        let rs = self.object_subgroup(r);
        if !phi.images.iter().all(|&y| rs.contains(y)) {
            return Err(Error::PreconditionViolated(format!("image of {m} is not inside object {r}")));
        }
        let bar = phi.with_target(rs);
        let candidates = self.lifts_of(&bar).iter().copied().filter(|&x| self.compose(incl, x) == m).collect();
        unique(candidates, "corestriction")
    }

    /// Corestriction onto `P_φ = π(φ)(P)`, with `P_φ`'s object.
    pub fn corestrict(&self, m: MorId) -> Result<(MorId, ObjId)> {
        let image = self.projection(m).image();
        let r = self.require_object(&image)?;
        Ok((self.corestrict_to(m, r)?, r))
    }

    /// `φ̃|_A: A → B`, the unique lift with `ι_B^{Q}∘φ̃|_A = φ̃∘ι_A^{P}`.
    pub fn restrict(&self, m: MorId, a: ObjId, b: ObjId) -> Result<MorId> {
        let incl = self
            .inclusion(a, self.src(m))
            .ok_or_else(|| Error::PreconditionViolated(format!("object {a} is not inside the source of {m}")))?;
        self.corestrict_to(self.compose(m, incl), b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linking::tests::s4_linking;
    use crate::linking::LinkingSystem;

    fn obj(l: &LinkingSystem, order: usize, cyclic: bool) -> ObjId {
        l.objects()
            .find(|&o| {
                let s = l.object_subgroup(o);
                s.order() == order
                    && (order != 4 || s.elements().iter().any(|&x| l.group().elem_order(x) == 4) == cyclic)
            })
            .unwrap()
    }

    #[test]
    fn generic_inclusions_agree_with_cosets() {
        let l = s4_linking();
        let generic = l.choose_inclusions().unwrap();
        assert_eq!(&generic, l.inclusions());
    }

    #[test]
    fn trivial_lifts() {
        let l = s4_linking();
        for m in 0..l.n_morphisms() {
            let (a, b) = (l.src(m), l.tgt(m));
            assert_eq!(l.lift_factor(l.identity(b), m, l.projection(m)).unwrap(), m);
            if l.projection(m).image() == *l.object_subgroup(b) {
                assert_eq!(l.corestrict(m).unwrap(), (m, b));
            }
            let _ = a;
        }
        for (&(a, b), &i) in l.inclusions() {
            assert_eq!(l.corestrict(i).unwrap(), (l.identity(a), a));
            assert_eq!(l.lift_factor(i, i, &GroupMono::identity(l.object_subgroup(a))).unwrap(), l.identity(a));
            assert_eq!(l.restrict(l.identity(b), a, b).unwrap(), i);
        }
    }

    #[test]
    fn twisted_inclusion_corestricts_to_delta() {
        let l = s4_linking();
        let c4 = obj(&l, 4, true);
        let d8 = obj(&l, 8, false);
        let z = l.object_subgroup(c4).elements().to_vec();
        for x in z {
            let m = l.compose(l.inclusion(c4, d8).unwrap(), l.delta(c4, x));
            assert_eq!(l.corestrict(m).unwrap(), (l.delta(c4, x), c4));
        }
    }

    #[test]
    fn restriction_of_d8_automorphisms() {
        let l = s4_linking();
        let c4 = obj(&l, 4, true);
        let d8 = obj(&l, 8, false);
        for &m in l.hom(d8, d8) {
            let r = l.restrict(m, c4, c4).unwrap();
            assert_eq!(l.src(r), c4);
            assert_eq!(*l.projection(r), l.projection(m).restrict(l.object_subgroup(c4)).with_target(l.object_subgroup(c4)));
            assert!(l.is_isomorphism(r));
            assert_eq!(l.compose(l.inclusion(c4, d8).unwrap(), r), l.compose(m, l.inclusion(c4, d8).unwrap()));
        }
    }

    #[test]
    fn lift_factor_through_klein_four() {
        let l = s4_linking();
        let v = obj(&l, 4, false);
        let d8 = obj(&l, 8, false);
        let iv = l.inclusion(v, d8).unwrap();
        for &m in l.hom(v, d8) {
            if l.projection(m).image() != *l.object_subgroup(v) {
                continue;
            }
            let phi = l.projection(m).with_target(l.object_subgroup(v));
            let x = l.lift_factor(iv, m, &phi).unwrap();
            assert_eq!(l.compose(iv, x), m);
        }
    }

    #[test]
    fn misaligned_inputs_are_rejected() {
        let l = s4_linking();
        let c4 = obj(&l, 4, true);
        let d8 = obj(&l, 8, false);
        assert!(matches!(l.restrict(l.identity(c4), d8, d8), Err(Error::PreconditionViolated(_))));
        let i = l.inclusion(c4, d8).unwrap();
        assert!(matches!(
            l.lift_factor(i, i, &GroupMono::identity(l.object_subgroup(d8))),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
