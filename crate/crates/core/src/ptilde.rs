//! The overgroup `P̃` of a fully normalized `P` over which every
//! `F`-automorphism of `P` extends, the unique extension of normalizer
//! morphisms to it, and the equivalence `P↓′N_L(P) ≃ P̃↓N_L(P)`.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::catkit::{
    equivalence_from_zigzag, CheckRecord, EquivalenceCertificate, Functor, Link, LinkKind, MorId,
    NaturalTransformation, UnderSubcategory, Undercategory,
};
use crate::error::{Error, Result};
use crate::fusion::{is_centric, is_fully_normalized, out_f, FusionSystem};
use crate::group::{big_o_p, center, is_normal_in, Elem, GroupMono, Subgroup};
use crate::normalizer::NormalizerLinking;

/// `N_α = {y ∈ N_S(P) : α∘c_y∘α⁻¹ ∈ Aut_S(P)}`.
pub fn n_alpha(f: &FusionSystem, p: &Subgroup, alpha: &GroupMono) -> Subgroup {
    let g = f.group();
    let aut_s = f.aut_s_images(p);
    let inv = alpha.inverse();
    let elems = f
        .normalizer_in_s(p)
        .elements()
        .iter()
        .copied()
        .filter(|&y| {
            let twisted: Vec<Elem> = p.elements().iter().map(|&x| alpha.apply(g.conj(y, inv.apply(x)))).collect();
            aut_s.contains(&twisted)
        })
        .collect();
    Subgroup::from_sorted(elems)
}

#[derive(Debug, Clone)]
pub struct PTildeData {
    pub p: Subgroup,
    /// `N_α` for each `α ∈ Aut_F(P)`, in the order of `Aut_F(P)`.
    pub n_alpha: Vec<(GroupMono, Subgroup)>,
    pub p_tilde: Subgroup,
    /// `c(P̃) ⊆ Out_F(P)`.
    pub out_image: Subgroup,
    /// `O_p(Out_F(P))`, computed independently of `P̃`.
    pub o_p: Subgroup,
    pub out_order: usize,
}

impl PTildeData {
    pub fn n_of(&self, alpha: &GroupMono) -> Option<&Subgroup> {
        self.n_alpha.iter().find(|(a, _)| a == alpha).map(|(_, n)| n)
    }
}

fn violated(msg: String) -> Error {
    Error::AxiomViolation(msg)
}

/// `P̃ = ⋂_α N_α`, with `P ◁ P̃ ◁ N_S(P)` and `C_S(P) ⊆ P̃` asserted.
pub fn p_tilde(f: &FusionSystem, p: &Subgroup) -> Result<PTildeData> {
    let pid = f.require_id(p)?;
    if !is_fully_normalized(f, pid) {
        return Err(Error::NotFullyNormalized(format!("{:?}", p.elements())));
    }
    let g = f.group();
    let nsp = f.normalizer_in_s(p);
    let csp = f.centralizer_in_s(p);
    let floor = p.product(&csp, g);
    let n_alpha: Vec<(GroupMono, Subgroup)> =
        f.auts(pid).par_iter().map(|a| (a.clone(), n_alpha(f, p, a))).collect();
    let mut pt = nsp.clone();
    for (a, n) in &n_alpha {
        if f.id_of(n).is_none() {
            return Err(violated(format!("N_α is not a subgroup for α = {:?}", a.images)));
        }
        if !floor.is_subset_of(n) {
            return Err(violated(format!("N_α does not contain P·C_S(P) for α = {:?}", a.images)));
        }
        pt = pt.intersection(n);
    }
    if !p.is_subset_of(&pt) || !is_normal_in(g, p, &pt) || !is_normal_in(g, &pt, &nsp) {
        return Err(violated("P ◁ P̃ ◁ N_S(P) fails".into()));
    }
    if !csp.is_subset_of(&pt) {
        return Err(violated("C_S(P) ⊄ P̃".into()));
    }
    let out = out_f(f, pid)?;
    let out_image = out.image_of(g, &pt);
    let o_p = big_o_p(&out.group, f.prime());
    Ok(PTildeData { p: p.clone(), n_alpha, p_tilde: pt, out_image, o_p, out_order: out.order() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpIdentification {
    pub c_image: Vec<Elem>,
    pub o_p: Vec<Elem>,
    pub radical: bool,
    pub proper: bool,
    pub passed: bool,
}

/// Compares `c(P̃)` with `O_p(Out_F(P))`, and checks that `P̃ ⊋ P` when
/// `P` is not radical.
pub fn verify_op_identification(data: &PTildeData) -> OpIdentification {
    let radical = data.o_p.is_trivial();
    let proper = data.p_tilde.order() > data.p.order();
    let equal = data.out_image == data.o_p;
    OpIdentification {
        c_image: data.out_image.elements().to_vec(),
        o_p: data.o_p.elements().to_vec(),
        radical,
        proper,
        passed: equal && (radical || proper),
    }
}

fn check(out: &mut Vec<CheckRecord>, name: &str, checked: usize, passed: bool) {
    out.push(CheckRecord { check: name.into(), checked, passed });
}

/// The structural lemmas around `N_α`, checked exhaustively: the
/// conjugation identity for extensions, containment of extension domains
/// in `N_α`, uniqueness of extensions up to `c_z` with `z ∈ Z(P)`, that
/// extensions over `N_α` preserve `P̃`, and `x·N_α·x⁻¹ = N_{α∘c_{x⁻¹}}`.
pub fn verify_ptilde_lemmas(f: &FusionSystem, data: &PTildeData) -> Result<Vec<CheckRecord>> {
    let g = f.group();
    let p = &data.p;
    let sid = f.s_id();
    let nsp = f.normalizer_in_s(p);
    let zp = center(g, p);
    let centric = is_centric(f, f.require_id(p)?);
    let mut out = Vec::new();

    // every extension to some P ⊆ Q ⊆ N_S(P)
    let domains: Vec<usize> = (0..f.n_subgroups())
        .filter(|&q| p.is_subset_of(f.subgroup(q)) && f.subgroup(q).is_subset_of(&nsp))
        .collect();
    let (mut conj_ok, mut conj_n) = (true, 0);
    let (mut dom_ok, mut dom_n) = (true, 0);
    let mut by_alpha: HashMap<(Vec<Elem>, usize), Vec<&GroupMono>> = HashMap::new();
    for &q in &domains {
        let qs = f.subgroup(q);
        for h in f.homs(q, sid) {
            let alpha = h.restrict(p);
            if alpha.image() != *p {
                continue;
            }
            let alpha = alpha.with_target(p);
            let n = data.n_of(&alpha).ok_or_else(|| violated("restriction is not in Aut_F(P)".into()))?;
            dom_n += 1;
            dom_ok &= qs.is_subset_of(n);
            let inv = alpha.inverse();
            for &y in qs.elements() {
                conj_n += 1;
                let hy = h.apply(y);
                conj_ok &= p.elements().iter().all(|&x| alpha.apply(g.conj(y, inv.apply(x))) == g.conj(hy, x));
            }
            by_alpha.entry((alpha.images.clone(), q)).or_default().push(h);
        }
    }
    check(&mut out, "α∘c_y∘α⁻¹ = c_{α̃(y)}", conj_n, conj_ok);
    check(&mut out, "extension domains lie in N_α", dom_n, dom_ok);

    if centric {
        let (mut ok, mut n) = (true, 0);
        for exts in by_alpha.values() {
            for a in exts {
                for b in exts {
                    n += 1;
                    ok &= zp.elements().iter().any(|&z| {
                        let cz = GroupMono::conjugation(g, z, &a.source, &a.source);
                        a.after(&cz) == **b
                    });
                }
            }
        }
        check(&mut out, "extensions agree up to c_z, z ∈ Z(P)", n, ok);
    }

    let (mut img_ok, mut img_n) = (true, 0);
    for (alpha, n) in &data.n_alpha {
        let nid = f.require_id(n)?;
        let exts: Vec<&GroupMono> = f.homs(nid, sid).iter().filter(|h| h.restrict(p).images == alpha.images).collect();
        if exts.is_empty() {
            return Err(Error::ExtensionNotFound(format!("α = {:?} does not extend over N_α", alpha.images)));
        }
        for h in exts {
            img_n += 1;
            img_ok &= Subgroup::from_unsorted(data.p_tilde.elements().iter().map(|&y| h.apply(y)).collect())
                == data.p_tilde;
        }
    }
    check(&mut out, "α̃(P̃) = P̃", img_n, img_ok);

    let (mut cj_ok, mut cj_n) = (true, 0);
    for (alpha, n) in &data.n_alpha {
        for &x in nsp.elements() {
            cj_n += 1;
            let cx = GroupMono::conjugation(g, g.inv(x), p, p);
            let twisted = alpha.after(&cx);
            cj_ok &= data.n_of(&twisted).is_some_and(|m| n.conjugate(g, x) == *m);
        }
    }
    check(&mut out, "x·N_α·x⁻¹ = N_{α∘c_{x⁻¹}}", cj_n, cj_ok);
    Ok(out)
}

/// How `φ̂` was found, for replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    /// `φ` in `N_L(P)`.
    pub phi: MorId,
    /// `φ̂: P̃·Q → P̃·Q′` in `N_L(P)`.
    pub hat: MorId,
    /// `f_α` after the `Z(P)` correction.
    pub f_alpha: GroupMono,
    pub z: Elem,
    pub x: Elem,
}

/// The unique `φ̂ ∈ Hom_{N_L(P)}(P̃·Q, P̃·Q′)` with `φ̂|_Q = φ`, for a
/// morphism `φ: Q → Q′` of `N_L(P)` with `P ⊆ Q ∩ Q′`.
pub fn extend_to_ptilde(nl: &NormalizerLinking, data: &PTildeData, phi: MorId) -> Result<Extension> {
    let n = &nl.linking;
    let f = nl.base.fusion();
    let g = f.group();
    let p = &data.p;
    let (q_obj, q2_obj) = (n.src(phi), n.tgt(phi));
    let (q, q2) = (n.object_subgroup(q_obj).clone(), n.object_subgroup(q2_obj).clone());
    if !p.is_subset_of(&q) || !p.is_subset_of(&q2) {
        return Err(Error::PreconditionViolated(format!("morphism {phi} does not join P-containing objects")));
    }
    if !is_centric(f, f.require_id(p)?) {
        return Err(Error::PreconditionViolated("P is not F-centric".into()));
    }
    let pq = data.p_tilde.product(&q, g);
    let pq2 = data.p_tilde.product(&q2, g);
    let pi = n.projection(phi);
    let alpha = pi.restrict(p);

    let f_alpha = f
        .homs(f.require_id(&pq)?, f.s_id())
        .iter()
        .find(|h| h.restrict(p).images == alpha.images)
        .ok_or_else(|| Error::ExtensionNotFound(format!("α does not extend over P̃·Q for morphism {phi}")))?
        .clone();
    let zp = center(g, p);
    let (z, f_alpha) = zp
        .elements()
        .iter()
        .find_map(|&z| {
            let corrected = f_alpha.after(&GroupMono::conjugation(g, g.inv(z), &pq, &pq));
            (corrected.restrict(&q).images == pi.images).then_some((z, corrected))
        })
        .ok_or_else(|| Error::ExtensionNotFound(format!("no z ∈ Z(P) aligns f_α with morphism {phi}")))?;
    let pt_image = Subgroup::from_unsorted(data.p_tilde.elements().iter().map(|&y| f_alpha.apply(y)).collect());
    if pt_image != data.p_tilde || !f_alpha.image().is_subset_of(&pq2) {
        return Err(violated(format!("f_α for morphism {phi} does not map P̃·Q into P̃·Q′ preserving P̃")));
    }
    let f_alpha = f_alpha.with_target(&pq2);
    let (pq_obj, pq2_obj) = (n.require_object(&pq)?, n.require_object(&pq2)?);
    let tilde = *n
        .lifts_of(&f_alpha)
        .iter()
        .min()
        .ok_or_else(|| Error::NoLift(format!("f_α for morphism {phi}")))?;
    let incl = |a, b| n.inclusion(a, b).ok_or_else(|| violated(format!("missing inclusion {a} → {b}")));
    let (iq, iq2) = (incl(q_obj, pq_obj)?, incl(q2_obj, pq2_obj)?);
    let target = n.compose(iq2, phi);
    let zq = center(g, &q);
    let x = *zq
        .elements()
        .iter()
        .find(|&&x| n.compose(n.compose(tilde, n.delta(pq_obj, x)), iq) == target)
        .ok_or_else(|| Error::ExtensionNotFound(format!("no x ∈ Z(Q) corrects the lift of morphism {phi}")))?;
    let hat = n.compose(tilde, n.delta(pq_obj, x));
    let solutions = n.hom(pq_obj, pq2_obj).iter().filter(|&&h| n.compose(h, iq) == target).count();
    if solutions != 1 {
        return Err(Error::NonUniqueLift(format!("{solutions} extensions of morphism {phi}")));
    }
    Ok(Extension { phi, hat, f_alpha, z, x })
}

/// Extends every morphism of `N_L(P)` between objects containing `P`.
pub fn extend_all(nl: &NormalizerLinking, data: &PTildeData) -> Result<HashMap<MorId, Extension>> {
    let n = &nl.linking;
    let p = &data.p;
    (0..n.n_morphisms())
        .into_par_iter()
        .filter(|&m| p.is_subset_of(n.object_subgroup(n.src(m))) && p.is_subset_of(n.object_subgroup(n.tgt(m))))
        .map(|m| extend_to_ptilde(nl, data, m).map(|e| (m, e)))
        .collect()
}

/// The zigzag `P↓′N_L(P) ⇄ P̃↓N_L(P) → *`.
#[derive(Debug, Clone)]
pub struct PTildeEquivalence {
    pub data: PTildeData,
    /// `P̃↓N_L(P)`.
    pub under: Undercategory,
    /// Object `id_{P̃}` of `P̃↓N_L(P)`.
    pub initial: usize,
    pub extensions: HashMap<MorId, Extension>,
    pub certificate: EquivalenceCertificate,
}

/// Builds `F: φ ↦ φ̂`, `G = (–)∘ι_P^{P̃}`, `ν: Id ⇒ GF` with components
/// `ι_Q^{P̃·Q}`, and `Id ⇒ FG` with the same components, then checks them
/// together with the initial object `id_{P̃}`.
///
/// `non_iso` must be `P↓′N_L(P)`, as produced by the retraction step, so
/// that the certificates join.
pub fn verify_ptilde_equivalence(nl: &Arc<NormalizerLinking>, non_iso: &UnderSubcategory) -> Result<PTildeEquivalence> {
    let f = nl.base.fusion();
    let p = nl.p().clone();
    let pid = f.require_id(&p)?;
    if !is_fully_normalized(f, pid) {
        return Err(Error::HypothesisViolated(format!("{:?} is not fully normalized", p.elements())));
    }
    if !is_centric(f, pid) {
        return Err(Error::HypothesisViolated(format!("{:?} is not F-centric", p.elements())));
    }
    let data = p_tilde(f, &p)?;
    if data.o_p.is_trivial() {
        return Err(Error::HypothesisViolated(format!("{:?} is F-radical", p.elements())));
    }
    let n = &nl.linking;
    let g = f.group();
    let p_obj = nl.p_object()?;
    let pt_obj = n.require_object(&data.p_tilde)?;
    let iota = n.inclusion(p_obj, pt_obj).ok_or_else(|| violated("missing ι_P^{P̃}".into()))?;
    let under = Undercategory::new(nl.cat(), pt_obj, format!("P̃↓N_L(P), P = {:?}", p.elements()));
    let extensions = extend_all(nl, &data)?;
    let hat = |m: MorId| -> Result<MorId> {
        extensions.get(&m).map(|e| e.hat).ok_or_else(|| violated(format!("morphism {m} was not extended")))
    };
    let to_pq = |q_obj| -> Result<MorId> {
        let pq = data.p_tilde.product(n.object_subgroup(q_obj), g);
        let pq_obj = n.require_object(&pq)?;
        n.inclusion(q_obj, pq_obj).ok_or_else(|| violated(format!("missing ι_Q^{{P̃·Q}} at object {q_obj}")))
    };
    let c = non_iso.cat().clone();
    let d = under.cat.clone();

    let f_obj: Vec<usize> = non_iso
        .object_arrow
        .iter()
        .map(|&phi| under.object(hat(phi)?).ok_or_else(|| violated("φ̂ does not start at P̃".into())))
        .collect::<Result<_>>()?;
    let f_mor: Vec<MorId> = (0..c.n_morphisms())
        .map(|m| {
            let beta = non_iso.morphism_arrow[m];
            under.morphism(f_obj[c.src(m)], hat(beta)?).ok_or_else(|| violated("β̂ does not compose with φ̂".into()))
        })
        .collect::<Result<_>>()?;
    let func_f = Functor::new("F", &c, &d, f_obj, f_mor)?;

    let g_obj: Vec<usize> = under
        .object_arrow
        .iter()
        .map(|&psi| {
            non_iso.object(n.compose(psi, iota)).ok_or_else(|| {
                Error::InvalidLink(format!("ψ∘ι_P^{{P̃}} is an isomorphism for ψ = {psi}, so G leaves P↓′N_L(P)"))
            })
        })
        .collect::<Result<_>>()?;
    let g_mor: Vec<MorId> = (0..d.n_morphisms())
        .map(|m| {
            non_iso
                .morphism(g_obj[d.src(m)], under.morphism_arrow[m])
                .ok_or_else(|| violated("G is undefined on a morphism".into()))
        })
        .collect::<Result<_>>()?;
    let func_g = Functor::new("G", &d, &c, g_obj, g_mor)?;

    let gf = func_g.after(&func_f)?;
    let unit_components: Vec<MorId> = (0..c.n_objects())
        .map(|a| {
            let arrow = to_pq(n.tgt(non_iso.object_arrow[a]))?;
            non_iso.morphism(a, arrow).ok_or_else(|| violated("ν(φ) does not leave φ".into()))
        })
        .collect::<Result<_>>()?;
    let unit = NaturalTransformation {
        name: "ν".into(),
        from: Functor::identity(&c),
        to: gf,
        components: unit_components,
    };
    let fg = func_f.after(&func_g)?;
    let counit_components: Vec<MorId> = (0..d.n_objects())
        .map(|b| {
            let arrow = to_pq(n.tgt(under.object_arrow[b]))?;
            under.morphism(b, arrow).ok_or_else(|| violated("Id ⇒ FG does not leave ψ".into()))
        })
        .collect::<Result<_>>()?;
    let counit = NaturalTransformation {
        name: "Id ⇒ FG".into(),
        from: Functor::identity(&d),
        to: fg,
        components: counit_components,
    };
    let initial = under.object(n.identity(pt_obj)).expect("identity of P̃ is an object");
    let mutual = Link::new("extension to P̃", &c, &d, LinkKind::Mutual { f: func_f, g: func_g, unit, counit })
        .with_note("P", format!("{:?}", p.elements()))
        .with_note("P̃", format!("{:?}", data.p_tilde.elements()))
        .with_note("corrections", correction_summary(&extensions));
    let point = Link::initial_object("id of P̃ is initial", &d, initial);
    let certificate = equivalence_from_zigzag(vec![mutual, point])?
        .with_metadata("statement", "|P↓′N_L(P)| ≃ |P̃↓N_L(P)| for P fully normalized, centric, not radical")
        .with_metadata("statement_source", "reconstructed from the proof");
    Ok(PTildeEquivalence { data, under, initial, extensions, certificate })
}

/// `(φ, z, x)` for every extension with a nontrivial correction.
fn correction_summary(ext: &HashMap<MorId, Extension>) -> String {
    let mut v: Vec<&Extension> = ext.values().collect();
    v.sort_by_key(|e| e.phi);
    v.iter().map(|e| format!("{}:{}:{}", e.phi, e.z, e.x)).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::tests::s4_fusion;
    use crate::linking::tests::s4_linking;
    use crate::normalizer::tests::find;
    use crate::normalizer::{build_retraction, normalizer_linking, verify_retraction_equivalence};

    fn brute_n_alpha(f: &FusionSystem, p: &Subgroup, alpha: &GroupMono) -> Subgroup {
        let g = f.group();
        let aut_s: Vec<GroupMono> = f
            .normalizer_in_s(p)
            .elements()
            .iter()
            .map(|&s| GroupMono::conjugation(g, s, p, p))
            .collect();
        let keep = f.s().elements().iter().copied().filter(|&y| {
            let cy = GroupMono::conjugation(g, y, p, p);
            cy.is_injective_hom(g) && cy.image() == *p && aut_s.contains(&alpha.after(&cy).after(&alpha.inverse()))
        });
        Subgroup::from_unsorted(keep.collect())
    }

    #[test]
    fn n_alpha_examples() {
        let f = s4_fusion();
        let g = f.group().clone();
        let v = find(&f, 4, false, true);
        let vid = f.require_id(&v).unwrap();
        let nsv = f.normalizer_in_s(&v);
        assert_eq!(n_alpha(&f, &v, &GroupMono::identity(&v)), nsv);
        for &s in nsv.elements() {
            assert_eq!(n_alpha(&f, &v, &GroupMono::conjugation(&g, s, &v, &v)), nsv);
        }
        let order3: Vec<&GroupMono> = f
            .auts(vid)
            .iter()
            .filter(|a| a.after(a).after(a).is_identity_map() && !a.is_identity_map())
            .collect();
        assert_eq!(order3.len(), 2);
        for a in order3 {
            let n = n_alpha(&f, &v, a);
            assert_eq!(n, brute_n_alpha(&f, &v, a));
            assert_eq!(n, v);
        }
    }

    #[test]
    fn p_tilde_examples() {
        let f = s4_fusion();
        let c4 = find(&f, 4, true, false);
        let d = p_tilde(&f, &c4).unwrap();
        assert_eq!(d.p_tilde, *f.s());
        assert_eq!(d.out_order, 2);
        let v = find(&f, 4, false, true);
        let d = p_tilde(&f, &v).unwrap();
        assert_eq!(d.p_tilde, v);
        let d = p_tilde(&f, f.s()).unwrap();
        assert_eq!(d.p_tilde, *f.s());
    }

    #[test]
    fn op_identification_on_s4() {
        let f = s4_fusion();
        for p in [find(&f, 4, true, false), find(&f, 4, false, true), f.s().clone()] {
            let d = p_tilde(&f, &p).unwrap();
            let r = verify_op_identification(&d);
            assert!(r.passed, "{r:?}");
        }
        let c4 = verify_op_identification(&p_tilde(&f, &find(&f, 4, true, false)).unwrap());
        assert!(!c4.radical && c4.proper && c4.o_p.len() == 2);
        let v = verify_op_identification(&p_tilde(&f, &find(&f, 4, false, true)).unwrap());
        assert!(v.radical && !v.proper && v.c_image.len() == 1);
    }

    #[test]
    fn lemmas_hold_on_s4() {
        let f = s4_fusion();
        for id in 0..f.n_subgroups() {
            if !is_fully_normalized(&f, id) {
                continue;
            }
            let d = p_tilde(&f, f.subgroup(id)).unwrap();
            let checks = verify_ptilde_lemmas(&f, &d).unwrap();
            assert!(checks.iter().all(|c| c.passed), "{:?}: {checks:?}", f.subgroup(id));
        }
    }

    #[test]
    fn non_fully_normalized_is_rejected() {
        let f = s4_fusion();
        let bad = (0..f.n_subgroups()).find(|&i| !is_fully_normalized(&f, i)).unwrap();
        assert!(matches!(p_tilde(&f, f.subgroup(bad)), Err(Error::NotFullyNormalized(_))));
    }

    fn c4_setup() -> (Arc<NormalizerLinking>, PTildeData) {
        let l = Arc::new(s4_linking());
        let c4 = find(l.fusion(), 4, true, false);
        let nl = Arc::new(normalizer_linking(&l, &c4).unwrap());
        let d = p_tilde(l.fusion(), &c4).unwrap();
        (nl, d)
    }

    #[test]
    fn trivial_extensions() {
        let (nl, d) = c4_setup();
        let n = &nl.linking;
        let g = nl.base.group().clone();
        for o in n.objects() {
            let q = n.object_subgroup(o);
            if !d.p.is_subset_of(q) {
                continue;
            }
            let pq = n.require_object(&d.p_tilde.product(q, &g)).unwrap();
            assert_eq!(extend_to_ptilde(&nl, &d, n.identity(o)).unwrap().hat, n.identity(pq));
        }
        for (&(a, b), &i) in n.inclusions() {
            let (qa, qb) = (n.object_subgroup(a), n.object_subgroup(b));
            if !d.p.is_subset_of(qa) {
                continue;
            }
            let pa = n.require_object(&d.p_tilde.product(qa, &g)).unwrap();
            let pb = n.require_object(&d.p_tilde.product(qb, &g)).unwrap();
            assert_eq!(extend_to_ptilde(&nl, &d, i).unwrap().hat, n.inclusion(pa, pb).unwrap());
        }
    }

    #[test]
    fn automorphisms_of_c4_extend_to_d8() {
        let (nl, d) = c4_setup();
        let n = &nl.linking;
        let po = nl.p_object().unwrap();
        let so = n.require_object(&d.p_tilde).unwrap();
        let nontrivial: Vec<MorId> =
            n.hom(po, po).iter().copied().filter(|&m| !n.projection(m).is_identity_map()).collect();
        assert!(!nontrivial.is_empty());
        for m in nontrivial {
            let e = extend_to_ptilde(&nl, &d, m).unwrap();
            assert_eq!((n.src(e.hat), n.tgt(e.hat)), (so, so));
            assert_eq!(n.projection(e.hat).restrict(&d.p).images, n.projection(m).images);
        }
        let outside = n.objects().find(|&o| !d.p.is_subset_of(n.object_subgroup(o))).unwrap();
        assert!(matches!(extend_to_ptilde(&nl, &d, n.identity(outside)), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn c4_equivalence_is_certified() {
        let (nl, _) = c4_setup();
        let ret = build_retraction(&nl).unwrap();
        let eq = verify_retraction_equivalence(&ret).unwrap();
        let pt = verify_ptilde_equivalence(&nl, &eq.non_iso_n).unwrap();
        assert!(pt.certificate.is_valid());
        let whole = eq.certificate.then(pt.certificate.clone()).unwrap();
        assert_eq!(whole.links.len(), 3);
        assert!(whole.is_valid());
    }

    #[test]
    fn radical_p_is_rejected() {
        let l = Arc::new(s4_linking());
        let v = find(l.fusion(), 4, false, true);
        let nl = Arc::new(normalizer_linking(&l, &v).unwrap());
        let ret = build_retraction(&nl).unwrap();
        let eq = verify_retraction_equivalence(&ret).unwrap();
        assert!(matches!(verify_ptilde_equivalence(&nl, &eq.non_iso_n), Err(Error::HypothesisViolated(_))));
    }
}
