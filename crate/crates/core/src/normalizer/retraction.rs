use std::sync::Arc;

use rayon::prelude::*;

use super::NormalizerLinking;
use crate::catkit::{
    check_functor, check_natural, equivalence_from_zigzag, full_subcategory_non_isos, CheckRecord,
    EquivalenceCertificate, Functor, Link, LinkKind, MorId, NaturalTransformation, ObjId, UnderSubcategory,
    Undercategory,
};
use crate::error::{Error, Result};
use crate::group::{normalizer_in, Elem, GroupMono, Subgroup};

/// The choices made at one object `φ: P → Q` of `P↓L`, and what they
/// determine. Morphism ids refer to `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractionEntry {
    /// `φ` itself.
    pub arrow: MorId,
    /// `P_φ = π(φ)(P)`.
    pub p_phi: Subgroup,
    /// `f_φ: N_S(P_φ) → N_S(P)`, sending `P_φ` onto `P`.
    pub f_phi: GroupMono,
    /// The chosen lift `F_φ`.
    pub lift: MorId,
    /// `Q_f = f_φ(N_Q(P_φ))`.
    pub q_f: Subgroup,
    /// `F̄_φ: N_Q(P_φ) → Q_f`.
    pub lift_bar: MorId,
    /// `r(φ): P → Q_f`.
    pub r: MorId,
    /// `η(φ): Q_f → Q`.
    pub eta: MorId,
    /// The object `r(φ)` of `P↓N_L(P)`.
    pub r_object: ObjId,
}

/// `r: P↓L → P↓N_L(P)`, the inclusion `i` back, and `η: i∘r ⇒ Id`.
#[derive(Debug, Clone)]
pub struct Retraction {
    pub nl: Arc<NormalizerLinking>,
    pub under_l: Undercategory,
    pub under_n: Undercategory,
    pub entries: Vec<RetractionEntry>,
    /// `β̂: Q_f → Q′_f` in `L` for each morphism `β` of `P↓L`.
    pub beta_hat: Vec<MorId>,
    pub r: Functor,
    pub i: Functor,
    pub eta: NaturalTransformation,
}

fn violation(msg: String) -> Error {
    Error::AxiomViolation(msg)
}

/// Runs the construction on every object and morphism of `P↓L`.
///
/// `f_φ` is the least morphism of `F` that carries `P_φ` onto `P` (the
/// identity when `P_φ = P`) and `F_φ` is its least lift.
pub fn build_retraction(nl: &Arc<NormalizerLinking>) -> Result<Retraction> {
    let l = &nl.base;
    let f = l.fusion();
    let g = l.group();
    let p = nl.p().clone();
    let p_obj = l.require_object(&p)?;
    let p_obj_n = nl.p_object()?;
    let nsp = f.normalizer_in_s(&p);
    let nsp_obj = l.require_object(&nsp)?;
    let nsp_id = f.require_id(&nsp)?;
    let under_l = Undercategory::new(l.cat(), p_obj, format!("P↓L, P = {:?}", p.elements()));
    let under_n = Undercategory::new(nl.cat(), p_obj_n, format!("P↓N_L(P), P = {:?}", p.elements()));
    let incl = |a: ObjId, b: ObjId| {
        l.inclusion(a, b).ok_or_else(|| Error::PreconditionViolated(format!("no inclusion {a} → {b}")))
    };

    let entries: Vec<RetractionEntry> = under_l
        .object_arrow
        .par_iter()
        .map(|&phi| -> Result<RetractionEntry> {
            let q_obj = l.tgt(phi);
            let q = l.object_subgroup(q_obj);
            let (bar, pphi_obj) = l.corestrict(phi)?;
            let pphi = l.object_subgroup(pphi_obj).clone();
            let nspphi = f.normalizer_in_s(&pphi);
            let nspphi_obj = l.require_object(&nspphi)?;
            let (f_phi, lift) = if pphi == p {
                (GroupMono::identity(&nsp), l.identity(nsp_obj))
            } else {
                let f_phi = f
                    .homs(f.require_id(&nspphi)?, nsp_id)
                    .iter()
                    .find(|h| h.restrict(&pphi).image() == p)
                    .ok_or_else(|| {
                        Error::ExtensionNotFound(format!("no f_φ: N_S({:?}) → N_S(P) onto P", pphi.elements()))
                    })?
                    .clone();
                let lift = *l
                    .lifts_of(&f_phi)
                    .iter()
                    .min()
                    .ok_or_else(|| Error::NoLift(format!("f_φ on {:?}", nspphi.elements())))?;
                (f_phi, lift)
            };
            let a = normalizer_in(g, q, &pphi);
            let a_obj = l.require_object(&a)?;
            let q_f = Subgroup::from_unsorted(a.elements().iter().map(|&x| f_phi.apply(x)).collect());
            let qf_obj = l.require_object(&q_f)?;
            let lift_bar = l.corestrict_to(l.compose(lift, incl(a_obj, nspphi_obj)?), qf_obj)?;
            let lift_bar2 = l.corestrict_to(l.compose(lift, incl(pphi_obj, nspphi_obj)?), p_obj)?;
            let r = l.compose(incl(p_obj, qf_obj)?, l.compose(lift_bar2, bar));
            let inv = l
                .cat()
                .inverse(lift_bar)
                .ok_or_else(|| violation(format!("F̄ of {phi} is not an isomorphism")))?;
            let eta = l.compose(incl(a_obj, q_obj)?, inv);
            if l.compose(eta, r) != phi {
                return Err(violation(format!("η(φ)∘r(φ) ≠ φ at {phi}")));
            }
            let qf_n = nl.linking.require_object(&q_f)?;
            let rn = nl
                .lookup(p_obj_n, qf_n, r)
                .ok_or_else(|| violation(format!("r({phi}) is not a morphism of N_L(P)")))?;
            let r_object = under_n.object(rn).expect("every morphism out of P is an object of P↓N_L(P)");
            Ok(RetractionEntry { arrow: phi, p_phi: pphi, f_phi, lift, q_f, lift_bar, r, eta, r_object })
        })
        .collect::<Result<_>>()?;

    // β̂ is F̄′∘β̄∘F̄⁻¹, unique with β̂∘F̄ = F̄′∘β̄ and an arrow of P↓N_L(P)
    let uc = under_l.cat.clone();
    let hats: Vec<(MorId, MorId)> = (0..uc.n_morphisms())
        .into_par_iter()
        .map(|m| -> Result<(MorId, MorId)> {
            let (e, e2) = (&entries[uc.src(m)], &entries[uc.tgt(m)]);
            let beta = under_l.morphism_arrow[m];
            let (a_obj, a2_obj) = (l.src(e.lift_bar), l.src(e2.lift_bar));
            let beta_bar = l.corestrict_to(l.compose(beta, incl(a_obj, l.tgt(e.arrow))?), a2_obj)?;
            let rhs = l.compose(e2.lift_bar, beta_bar);
            let inv = l.cat().inverse(e.lift_bar).expect("checked above");
            let hat = l.compose(rhs, inv);
            let (qf, qf2) = (l.tgt(e.lift_bar), l.tgt(e2.lift_bar));
            let solutions = l.hom(qf, qf2).iter().filter(|&&x| l.compose(x, e.lift_bar) == rhs).count();
            if solutions != 1 {
                return Err(Error::NonUniqueLift(format!("β̂ for morphism {m}: {solutions} solutions")));
            }
            if l.compose(hat, e.r) != e2.r {
                return Err(violation(format!("β̂∘r(φ) ≠ r(φ′) for morphism {m}")));
            }
            let (qf_n, qf2_n) = (nl.linking.require_object(&e.q_f)?, nl.linking.require_object(&e2.q_f)?);
            let hat_n = nl
                .lookup(qf_n, qf2_n, hat)
                .ok_or_else(|| violation(format!("β̂ for morphism {m} is not in N_L(P)")))?;
            let image = under_n.morphism(e.r_object, hat_n).expect("β̂ starts at r(φ)");
            Ok((hat, image))
        })
        .collect::<Result<_>>()?;
    let beta_hat: Vec<MorId> = hats.iter().map(|h| h.0).collect();

    let r = Functor::new(
        "r",
        &under_l.cat,
        &under_n.cat,
        entries.iter().map(|e| e.r_object).collect(),
        hats.iter().map(|h| h.1).collect(),
    )?;
    let i_obj: Vec<ObjId> = under_n
        .object_arrow
        .iter()
        .map(|&a| under_l.object(nl.base_morphism(a)).expect("N_L(P) morphisms out of P are morphisms of L"))
        .collect();
    let i_mor: Vec<MorId> = (0..under_n.cat.n_morphisms())
        .map(|m| {
            under_l
                .morphism(i_obj[under_n.cat.src(m)], nl.base_morphism(under_n.morphism_arrow[m]))
                .expect("the underlying arrow starts at the image object")
        })
        .collect();
    let i = Functor::new("i", &under_n.cat, &under_l.cat, i_obj, i_mor)?;
    let components = entries
        .iter()
        .enumerate()
        .map(|(a, e)| {
            let m = under_l.morphism(i.obj_map[e.r_object], e.eta).expect("η(φ) starts at the target of r(φ)");
            if uc.tgt(m) != a {
                return Err(violation(format!("η({a}) does not end at φ")));
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    let ir = i.after(&r)?;
    let eta = NaturalTransformation { name: "η".into(), from: ir, to: Functor::identity(&under_l.cat), components };
    Ok(Retraction { nl: nl.clone(), under_l, under_n, entries, beta_hat, r, i, eta })
}

/// The equivalence `|P↓≇L| ≃ |P↓′N_L(P)|` and the checks behind it.
#[derive(Debug, Clone)]
pub struct RetractionEquivalence {
    /// `P↓≇L`.
    pub non_iso_l: UnderSubcategory,
    /// `P↓′N_L(P)`.
    pub non_iso_n: UnderSubcategory,
    /// Checks on the whole undercategories.
    pub full_checks: Vec<CheckRecord>,
    pub certificate: EquivalenceCertificate,
}

fn record(out: &mut Vec<CheckRecord>, check: &str, checked: usize, passed: bool) -> Result<()> {
    out.push(CheckRecord { check: check.into(), checked, passed });
    if passed {
        Ok(())
    } else {
        Err(Error::InvalidLink(format!("retraction: {check}")))
    }
}

/// Checks `r` and `η` on all of `P↓L` and restricts them to the
/// non-isomorphisms, where they form a retract link.
pub fn verify_retraction_equivalence(ret: &Retraction) -> Result<RetractionEquivalence> {
    let mut full = Vec::new();
    let rep = check_functor(&ret.r);
    record(&mut full, "r is a functor", rep.checked, rep.ok())?;
    let rep = check_functor(&ret.i);
    record(&mut full, "i is a functor", rep.checked, rep.ok())?;
    record(&mut full, "r∘i = Id", ret.under_n.cat.n_morphisms(), ret.r.after(&ret.i)?.is_identity())?;
    let rep = check_natural(&ret.eta);
    record(&mut full, "η is natural", rep.checked, rep.ok())?;
    let l = &ret.nl.base;
    let p_order = ret.nl.p().order();
    let keeps = ret.entries.iter().all(|e| l.is_isomorphism(e.arrow) || e.q_f.order() > p_order);
    record(&mut full, "r preserves non-isomorphisms", ret.entries.len(), keeps)?;

    let non_iso_l = full_subcategory_non_isos(&ret.under_l, ret.under_l.cat.name().replace("P↓L", "P↓≇L"));
    let non_iso_n = full_subcategory_non_isos(&ret.under_n, ret.under_n.cat.name().replace("P↓N_L", "P↓′N_L"));
    let r = ret.r.restrict("r", &non_iso_l.sub, &non_iso_n.sub)?;
    let i = ret.i.restrict("i", &non_iso_n.sub, &non_iso_l.sub)?;
    let ir = i.after(&r)?;
    let id = Functor::identity(non_iso_l.cat());
    let eta = ret.eta.restrict("η", &non_iso_l.sub, &non_iso_l.sub, &ir, &id)?;
    let link = Link::new(
        "retraction onto the normalizer",
        non_iso_l.cat(),
        non_iso_n.cat(),
        LinkKind::Retract { inclusion: i, retraction: r, transformation: eta },
    )
    .with_note("P", format!("{:?}", ret.nl.p().elements()))
    .with_note("choices", choice_summary(ret));
    let certificate = equivalence_from_zigzag(vec![link])?
        .with_metadata("statement", "|P↓≇L| ≃ |P↓′N_L(P)| via (i, r, η)")
        .with_metadata("statement_source", "reconstructed from the proof");
    Ok(RetractionEquivalence { non_iso_l, non_iso_n, full_checks: full, certificate })
}

/// `f_φ` per object, for replay.
fn choice_summary(ret: &Retraction) -> String {
    let parts: Vec<String> = ret
        .entries
        .iter()
        .filter(|e| !e.f_phi.is_identity_map())
        .map(|e| {
            let images: Vec<(Elem, Elem)> =
                e.f_phi.source.elements().iter().copied().zip(e.f_phi.images.iter().copied()).collect();
            format!("{}: {:?}", e.arrow, images)
        })
        .collect();
    parts.join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linking::tests::s4_linking;
    use crate::linking::LinkingSystem;
    use crate::normalizer::normalizer_linking;
    use crate::normalizer::tests::find;

    fn retraction(l: &Arc<LinkingSystem>, p: &Subgroup) -> Retraction {
        let nl = Arc::new(normalizer_linking(l, p).unwrap());
        build_retraction(&nl).unwrap()
    }

    #[test]
    fn s4_retractions_are_certified() {
        let l = Arc::new(s4_linking());
        let f = l.fusion().clone();
        for p in [find(&f, 4, true, false), find(&f, 4, false, false)] {
            let ret = retraction(&l, &p);
            let eq = verify_retraction_equivalence(&ret).unwrap();
            assert!(eq.certificate.is_valid());
            assert!(eq.full_checks.iter().all(|c| c.passed));
            assert!(eq.non_iso_l.cat().n_objects() > 0);
        }
    }

    #[test]
    fn remark_cases() {
        let l = Arc::new(s4_linking());
        let f = l.fusion().clone();
        let g = l.group().clone();
        let c4 = find(&f, 4, true, false);
        let ret = retraction(&l, &c4);
        let p_obj = l.require_object(&c4).unwrap();
        for e in &ret.entries {
            let q = l.object_subgroup(l.tgt(e.arrow));
            if l.projection(e.arrow).image() == c4 {
                assert!(e.f_phi.is_identity_map());
                assert_eq!(e.q_f, normalizer_in(&g, q, &c4));
            }
        }
        for (&(a, b), &incl) in l.inclusions() {
            if a != p_obj {
                continue;
            }
            let e = ret.entries.iter().find(|e| e.arrow == incl).unwrap();
            let q = l.object_subgroup(b);
            let nq = normalizer_in(&g, q, &c4);
            assert_eq!(e.r, l.inclusion(p_obj, l.require_object(&nq).unwrap()).unwrap());
        }
    }

    #[test]
    fn r_fixes_normalizer_morphisms() {
        let l = Arc::new(s4_linking());
        let f = l.fusion().clone();
        let v = find(&f, 4, false, false);
        let ret = retraction(&l, &v);
        let nl = &ret.nl;
        for a in 0..ret.under_n.cat.n_objects() {
            let base = nl.base_morphism(ret.under_n.object_arrow[a]);
            let e = ret.entries.iter().find(|e| e.arrow == base).unwrap();
            assert_eq!(e.r, base);
            assert_eq!(e.r_object, a);
        }
    }

    #[test]
    fn top_subgroup_gives_empty_categories() {
        let l = Arc::new(s4_linking());
        let s = l.fusion().s().clone();
        let ret = retraction(&l, &s);
        let eq = verify_retraction_equivalence(&ret).unwrap();
        assert_eq!(eq.non_iso_l.cat().n_objects(), 0);
        assert_eq!(eq.non_iso_n.cat().n_objects(), 0);
        assert!(eq.certificate.is_valid());
    }

    #[test]
    fn corrupted_transformation_is_rejected() {
        let l = Arc::new(s4_linking());
        let f = l.fusion().clone();
        let c4 = find(&f, 4, true, false);
        let mut ret = retraction(&l, &c4);
        // replace one component by another morphism with the same source
        let uc = ret.under_l.cat.clone();
        let (a, other) = (0..uc.n_objects())
            .find_map(|a| {
                let k = ret.eta.components[a];
                uc.out(uc.src(k)).iter().find(|&&m| m != k).map(|&m| (a, m))
            })
            .unwrap();
        ret.eta.components[a] = other;
        assert!(verify_retraction_equivalence(&ret).is_err());
    }
}
