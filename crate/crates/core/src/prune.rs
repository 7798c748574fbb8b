//! Pruning `L•` down to `L^H` one conjugacy class at a time, with a
//! certificate that each undercategory `P↓L_i` is contractible.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catkit::{
    equivalence_from_zigzag, full_subcategory_non_isos, homology, is_acyclic, nerve, CheckRecord,
    EquivalenceCertificate, FiniteCategory, Functor, HomologyGroup, Link, LinkKind, MorId, NaturalTransformation,
    ObjId, Subcategory, UnderSubcategory, Undercategory,
};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::fusion::{
    check_saturation, f_conjugacy_classes, is_centric, is_fully_normalized, is_radical, out_f, FusionSystem,
};
use crate::group::{generate_subgroup, Perm, SizePair, Subgroup};
use crate::linking::{check_linking_axioms, LinkingSystem};
use crate::normalizer::{build_retraction, normalizer_linking, verify_retraction_equivalence};
use crate::ptilde::{p_tilde, verify_op_identification, verify_ptilde_equivalence, verify_ptilde_lemmas, OpIdentification};
use crate::tower::{validate_bullet, BulletOracle, BulletValidation};

/// What the theorem statement is taken to require of `H`.
pub const COLLECTION_HYPOTHESIS: &str =
    "H is closed under F-conjugacy and lies between the F-centric F-radical subgroups and the F-centric subgroups";

/// Lattice ids of the `F`-centric `F`-radical subgroups.
pub fn centric_radical_collection(f: &FusionSystem) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for id in 0..f.n_subgroups() {
        if is_centric(f, id) && is_radical(f, id)? {
            out.push(id);
        }
    }
    Ok(out)
}

/// Checks `H` against [`COLLECTION_HYPOTHESIS`]; returns it sorted.
pub fn validate_collection(f: &FusionSystem, h: &[usize]) -> Result<Vec<usize>> {
    let set: HashSet<usize> = h.iter().copied().collect();
    for &id in &set {
        if id >= f.n_subgroups() {
            return Err(Error::InvalidInput(format!("subgroup id {id} out of range")));
        }
        if let Some(&q) = f.classes()[f.class_of(id)].iter().find(|q| !set.contains(q)) {
            return Err(Error::HNotClosed(format!(
                "{:?} is in H but its conjugate {:?} is not",
                f.subgroup(id).elements(),
                f.subgroup(q).elements()
            )));
        }
        if !is_centric(f, id) {
            return Err(Error::PreconditionViolated(format!("{:?} in H is not F-centric", f.subgroup(id).elements())));
        }
    }
    for class in f_conjugacy_classes(f) {
        let rep = class.representative;
        if is_centric(f, rep) && is_radical(f, rep)? && !set.contains(&rep) {
            return Err(Error::HMissingRadicals(format!("{:?}", f.subgroup(rep).elements())));
        }
    }
    let mut v: Vec<usize> = set.into_iter().collect();
    v.sort_unstable();
    Ok(v)
}

/// A collection as written in a file: subgroups by generators, in cycle
/// notation for permutation groups or by element index otherwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionSpec {
    pub subgroups: Vec<Vec<GeneratorSpec>>,
    /// Add every `F`-conjugate of the listed subgroups.
    #[serde(default)]
    pub close_under_conjugacy: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Index(u32),
    Cycles(String),
}

impl CollectionSpec {
    pub fn resolve(&self, f: &FusionSystem) -> Result<Vec<usize>> {
        let g = f.group();
        let mut ids = Vec::new();
        for gens in &self.subgroups {
            let elems = gens
                .iter()
                .map(|x| match x {
                    GeneratorSpec::Index(i) if (*i as usize) < g.order() => Ok(*i),
                    GeneratorSpec::Index(i) => Err(Error::InvalidInput(format!("element {i} out of range"))),
                    GeneratorSpec::Cycles(c) => g
                        .element_of_permutation(&Perm::parse_cycles(c)?)
                        .ok_or_else(|| Error::InvalidInput(format!("{c} is not in the group"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let sub = generate_subgroup(g, &elems);
            let id = f
                .id_of(&sub)
                .ok_or_else(|| Error::NotContained(format!("{:?} is not a subgroup of S", sub.elements())))?;
            if self.close_under_conjugacy {
                ids.extend(f.classes()[f.class_of(id)].iter().copied());
            } else {
                ids.push(id);
            }
        }
        ids.sort_unstable();
        ids.dedup();
        Ok(ids)
    }
}

/// `L•` together with the equivalences `|L| ≃ |L•|` and `|L^H| ≃ |L^{H•}|`.
#[derive(Debug, Clone)]
pub struct BulletReduction {
    pub oracle: String,
    pub validation: BulletValidation,
    /// `P ↦ P•` on objects of `L`.
    pub object_map: Vec<ObjId>,
    /// `φ ↦ φ•` on morphisms of `L`; empty when the oracle is the identity.
    pub morphism_map: Vec<MorId>,
    /// `L•` as a full subcategory of `L`, or `None` when `L• = L`.
    pub bullet: Option<Subcategory>,
    pub objects: Vec<ObjId>,
    pub certificate: EquivalenceCertificate,
    pub h_certificate: EquivalenceCertificate,
}

impl BulletReduction {
    pub fn is_identity(&self) -> bool {
        self.bullet.is_none()
    }
}

fn local_morphisms(sub: &Subcategory) -> HashMap<MorId, MorId> {
    sub.morphisms.iter().enumerate().map(|(i, &m)| (m, i)).collect()
}

/// `big ⇄ small` through `i`, `r = (–)•` and `Id ⇒ i∘r` with components
/// `ι_P^{P•}`.
fn bullet_retract(name: &str, l: &LinkingSystem, big: &Subcategory, small: &Subcategory, red: &BulletReduction) -> Result<Link> {
    let (big_m, small_m) = (local_morphisms(big), local_morphisms(small));
    let lost = |what: String| Error::InvalidLink(format!("{name}: {what}"));
    let r_obj = big
        .objects
        .iter()
        .map(|&o| small.local_object(red.object_map[o]).ok_or_else(|| lost(format!("object {o}• is missing"))))
        .collect::<Result<Vec<_>>>()?;
    let r_mor = big
        .morphisms
        .iter()
        .map(|&m| small_m.get(&red.morphism_map[m]).copied().ok_or_else(|| lost(format!("morphism {m}• is missing"))))
        .collect::<Result<Vec<_>>>()?;
    let i_obj = small
        .objects
        .iter()
        .map(|&o| big.local_object(o).ok_or_else(|| lost(format!("object {o} is not in the larger category"))))
        .collect::<Result<Vec<_>>>()?;
    let i_mor = small.morphisms.iter().map(|m| big_m[m]).collect();
    let r = Functor::new("(–)•", &big.cat, &small.cat, r_obj, r_mor)?;
    let i = Functor::new("inclusion", &small.cat, &big.cat, i_obj, i_mor)?;
    let components = big
        .objects
        .iter()
        .map(|&o| {
            let m = l.inclusion(o, red.object_map[o]).ok_or_else(|| lost(format!("no ι for object {o}")))?;
            Ok(big_m[&m])
        })
        .collect::<Result<Vec<_>>>()?;
    let ir = i.after(&r)?;
    let eta = NaturalTransformation { name: "ι_P^{P•}".into(), from: Functor::identity(&big.cat), to: ir, components };
    Ok(Link::new(name, &big.cat, &small.cat, LinkKind::Retract { inclusion: i, retraction: r, transformation: eta }))
}

/// Validates the oracle on `F` and builds `L•`. For the identity oracle
/// both certificates are identities.
pub fn reduce_to_bullet(l: &LinkingSystem, h: &[usize], oracle: &dyn BulletOracle) -> Result<BulletReduction> {
    let f = l.fusion();
    let validation = validate_bullet(f, oracle)?;
    if let Some(c) = validation.checks.iter().find(|c| !c.passed) {
        return Err(Error::HypothesisViolated(format!(
            "bullet oracle {} fails {}: {}",
            oracle.name(),
            c.property,
            c.witnesses.join(", ")
        )));
    }
    let object_map = l
        .objects()
        .map(|o| {
            let b = oracle.apply(f, l.object_subgroup_id(o));
            l.object_of_id(b).ok_or_else(|| Error::TargetNotObject(format!("{:?}", f.subgroup(b).elements())))
        })
        .collect::<Result<Vec<_>>>()?;
    let objects: Vec<ObjId> = l.objects().filter(|&o| object_map[o] == o).collect();
    let h_objects: Vec<ObjId> = h.iter().filter_map(|&id| l.object_of_id(id)).collect();
    if let Some(&o) = h_objects.iter().find(|&&o| !h_objects.contains(&object_map[o])) {
        return Err(Error::PreconditionViolated(format!("H is not closed under (–)• at {:?}", l.object_subgroup(o).elements())));
    }
    let lh = l.full_subcategory(&h_objects, "L^H");
    if objects.len() == l.n_objects() {
        let certificate = equivalence_from_zigzag(vec![Link::identity("L = L•", l.cat())])?;
        let h_certificate = equivalence_from_zigzag(vec![Link::identity("L^H = L^{H•}", &lh.cat)])?;
        return Ok(BulletReduction {
            oracle: oracle.name().into(),
            validation,
            object_map,
            morphism_map: Vec::new(),
            bullet: None,
            objects,
            certificate,
            h_certificate,
        });
    }
    // φ• is the unique morphism with φ•∘ι_P^{P•} = ι_Q^{Q•}∘φ
    let morphism_map = (0..l.n_morphisms())
        .into_par_iter()
        .map(|m| {
            let (a, b) = (l.src(m), l.tgt(m));
            let (ab, bb) = (object_map[a], object_map[b]);
            let (ia, ib) = (l.inclusion(a, ab).expect("P ⊆ P•"), l.inclusion(b, bb).expect("Q ⊆ Q•"));
            let target = l.compose(ib, m);
            let found: Vec<MorId> = l.hom(ab, bb).iter().copied().filter(|&x| l.compose(x, ia) == target).collect();
            match found.as_slice() {
                [x] => Ok(*x),
                [] => Err(Error::NoLift(format!("(–)• on morphism {m}"))),
                _ => Err(Error::NonUniqueLift(format!("(–)• on morphism {m}"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let sub = l.full_subcategory(&objects, "L•");
    let lhb_objects: Vec<ObjId> = h_objects.iter().copied().filter(|&o| object_map[o] == o).collect();
    let lhb = l.full_subcategory(&lhb_objects, "L^{H•}");
    let whole = l.full_subcategory(&l.objects().collect::<Vec<_>>(), l.cat().name().to_string());
    let mut red = BulletReduction {
        oracle: oracle.name().into(),
        validation,
        object_map,
        morphism_map,
        bullet: Some(sub.clone()),
        objects,
        certificate: EquivalenceCertificate::identity(),
        h_certificate: EquivalenceCertificate::identity(),
    };
    red.certificate = equivalence_from_zigzag(vec![bullet_retract("L ⇄ L•", l, &whole, &sub, &red)?])?;
    red.h_certificate = equivalence_from_zigzag(vec![bullet_retract("L^H ⇄ L^{H•}", l, &lh, &lhb, &red)?])?;
    Ok(red)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PruneStep {
    pub class_id: usize,
    /// Lattice id of the fully normalized representative `P_i`.
    pub representative: usize,
    pub elements: Vec<u32>,
    pub size: SizePair,
}

/// `L^H = L_0 ⊊ L_1 ⊊ … ⊊ L_n = L•`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneSequence {
    /// `H•`, as lattice ids.
    pub collection: Vec<usize>,
    pub steps: Vec<PruneStep>,
    /// Objects of `L_i` (ids in `L`), for `i = 0..=n`.
    pub objects: Vec<Vec<ObjId>>,
}

impl PruneSequence {
    fn from_steps(l: &LinkingSystem, collection: Vec<usize>, steps: Vec<PruneStep>, bullet_objects: &[ObjId]) -> Result<Self> {
        let f = l.fusion();
        if steps.windows(2).any(|w| w[0].size < w[1].size) {
            return Err(Error::PreconditionViolated("pruning order must have non-increasing sizes".into()));
        }
        let mut current: Vec<ObjId> =
            collection.iter().filter_map(|&id| l.object_of_id(id)).filter(|o| bullet_objects.contains(o)).collect();
        current.sort_unstable();
        let mut objects = vec![current.clone()];
        for s in &steps {
            let class: Vec<ObjId> = f.classes()[s.class_id].iter().filter_map(|&id| l.object_of_id(id)).collect();
            if class.iter().any(|o| current.contains(o) || !bullet_objects.contains(o)) {
                return Err(Error::PreconditionViolated(format!("class {} cannot be added at this step", s.class_id)));
            }
            current.extend(class);
            current.sort_unstable();
            objects.push(current.clone());
        }
        if current != bullet_objects {
            return Err(Error::PreconditionViolated("the sequence does not end at L•".into()));
        }
        Ok(PruneSequence { collection, steps, objects })
    }

    /// The same classes pruned in another order; `order[k]` is the old
    /// index of the new `k`-th step.
    pub fn reordered(&self, l: &LinkingSystem, order: &[usize], bullet_objects: &[ObjId]) -> Result<Self> {
        let mut seen = order.to_vec();
        seen.sort_unstable();
        if seen != (0..self.steps.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidInput("not a permutation of the steps".into()));
        }
        let steps = order.iter().map(|&k| self.steps[k].clone()).collect();
        Self::from_steps(l, self.collection.clone(), steps, bullet_objects)
    }
}

/// Classes of `L•` outside `H`, largest first, ties broken by the
/// canonical order of the representatives.
pub fn build_prune_sequence(l: &LinkingSystem, h: &[usize], bullet: &BulletReduction) -> Result<PruneSequence> {
    let f = l.fusion();
    let h = validate_collection(f, h)?;
    let in_bullet: HashSet<usize> = bullet.objects.iter().map(|&o| l.object_subgroup_id(o)).collect();
    let collection: Vec<usize> = h.iter().copied().filter(|id| in_bullet.contains(id)).collect();
    let mut steps: Vec<PruneStep> = f_conjugacy_classes(f)
        .into_iter()
        .filter(|c| in_bullet.contains(&c.representative) && !collection.contains(&c.representative))
        .map(|c| {
            let sub = f.subgroup(c.representative);
            PruneStep { class_id: c.id, representative: c.representative, elements: sub.elements().to_vec(), size: sub.size() }
        })
        .collect();
    steps.sort_by(|a, b| b.size.cmp(&a.size).then_with(|| f.subgroup(a.representative).cmp(f.subgroup(b.representative))));
    PruneSequence::from_steps(l, collection, steps, &bullet.objects)
}

#[derive(Debug, Clone)]
pub struct StepCertificate {
    pub step: usize,
    pub representative: Subgroup,
    pub p_tilde: Subgroup,
    /// Objects of `P↓L_i`, each checked to satisfy `|R| > |P|`.
    pub under_objects: usize,
    pub retraction_checks: Vec<CheckRecord>,
    pub lemma_checks: Vec<CheckRecord>,
    pub op: OpIdentification,
    /// `id_{P̃}` as an object of `P̃↓N_L(P)`.
    pub initial_object: ObjId,
    /// `P↓L_i ≅ P↓≇L• ~ P↓≇L ~ P↓′N_L(P) ~ P̃↓N_L(P) ~ *`.
    pub certificate: EquivalenceCertificate,
    /// Homology of `|P↓L_i|` through the requested degree.
    pub homology: Option<Vec<HomologyGroup>>,
    /// `P↓L_i` itself.
    pub under: Arc<FiniteCategory>,
}

impl StepCertificate {
    pub fn is_valid(&self) -> bool {
        self.certificate.is_valid()
            && self.op.passed
            && self.lemma_checks.iter().chain(&self.retraction_checks).all(|c| c.passed)
            && self.homology.as_ref().is_none_or(|h| is_acyclic(h))
    }
}

/// Isomorphism between two full subcategories of one undercategory with
/// the same objects.
fn same_objects_iso(name: &str, a: &UnderSubcategory, b: &UnderSubcategory) -> Result<Link> {
    let map = |from: &UnderSubcategory, to: &UnderSubcategory, fname: &str| -> Result<Functor> {
        let to_m = local_morphisms(&to.sub);
        let obj = from
            .sub
            .objects
            .iter()
            .map(|&o| to.sub.local_object(o).ok_or_else(|| Error::InvalidLink(format!("{name}: object sets differ"))))
            .collect::<Result<Vec<_>>>()?;
        let mor = from.sub.morphisms.iter().map(|m| to_m[m]).collect();
        Functor::new(fname, from.cat(), to.cat(), obj, mor)
    };
    let forward = map(a, b, "forward")?;
    let backward = map(b, a, "backward")?;
    Ok(Link::new(name, a.cat(), b.cat(), LinkKind::Isomorphism { forward, backward }))
}

/// `P↓≇L• ⇄ P↓≇L` via `φ ↦ ι_Q^{Q•}∘φ` and `Id ⇒ i∘r` with components
/// `ι_Q^{Q•}`.
fn under_bullet_retract(
    l: &LinkingSystem,
    red: &BulletReduction,
    sub: &Subcategory,
    small: &UnderSubcategory,
    big: &UnderSubcategory,
) -> Result<Link> {
    let sub_m = local_morphisms(sub);
    let lost = |what: String| Error::InvalidLink(format!("bullet link: {what}"));
    let (bc, sc) = (big.cat().clone(), small.cat().clone());
    let r_obj = big
        .object_arrow
        .iter()
        .map(|&phi| {
            let q = l.tgt(phi);
            let to_bullet = l.compose(l.inclusion(q, red.object_map[q]).expect("Q ⊆ Q•"), phi);
            small.object(sub_m[&to_bullet]).ok_or_else(|| lost(format!("ι∘φ leaves P↓≇L• for arrow {phi}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let r_mor = (0..bc.n_morphisms())
        .map(|m| {
            let beta = red.morphism_map[big.morphism_arrow[m]];
            small.morphism(r_obj[bc.src(m)], sub_m[&beta]).ok_or_else(|| lost(format!("β• for morphism {m}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let i_obj = small
        .object_arrow
        .iter()
        .map(|&a| big.object(sub.morphisms[a]).ok_or_else(|| lost(format!("arrow {a} of L• is not in P↓≇L"))))
        .collect::<Result<Vec<_>>>()?;
    let i_mor = (0..sc.n_morphisms())
        .map(|m| {
            big.morphism(i_obj[sc.src(m)], sub.morphisms[small.morphism_arrow[m]])
                .ok_or_else(|| lost(format!("morphism {m} of P↓≇L•")))
        })
        .collect::<Result<Vec<_>>>()?;
    let r = Functor::new("(–)•", &bc, &sc, r_obj, r_mor)?;
    let i = Functor::new("inclusion", &sc, &bc, i_obj, i_mor)?;
    let components = big
        .object_arrow
        .iter()
        .enumerate()
        .map(|(a, &phi)| {
            let q = l.tgt(phi);
            big.morphism(a, l.inclusion(q, red.object_map[q]).expect("Q ⊆ Q•")).ok_or_else(|| lost("ι_Q^{Q•}".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let ir = i.after(&r)?;
    let eta = NaturalTransformation { name: "ι_Q^{Q•}".into(), from: Functor::identity(&bc), to: ir, components };
    Ok(Link::new("bullet", &bc, &sc, LinkKind::Retract { inclusion: i, retraction: r, transformation: eta }))
}

/// Certifies that `|P_{i+1}↓L_i|` is contractible.
pub fn verify_step(
    l: &Arc<LinkingSystem>,
    red: &BulletReduction,
    seq: &PruneSequence,
    step: usize,
    homology_degree: Option<usize>,
    caps: &Caps,
) -> Result<StepCertificate> {
    let f = l.fusion();
    let s = seq.steps.get(step).ok_or_else(|| Error::InvalidInput(format!("no step {step}")))?;
    let p = f.subgroup(s.representative).clone();
    let pid = s.representative;
    if !is_fully_normalized(f, pid) {
        return Err(Error::HypothesisViolated(format!("{:?} is not fully normalized", p.elements())));
    }
    let p_obj = l.require_object(&p)?;
    let nl = Arc::new(normalizer_linking(l, &p)?);
    let ret = build_retraction(&nl)?;
    let req = verify_retraction_equivalence(&ret)?;

    // P↓L• and its non-isomorphisms, and the link to P↓≇L
    let (under_b, non_iso_b, sub, bullet_link) = match &red.bullet {
        None => {
            let link = Link::identity("bullet (identity)", req.non_iso_l.cat());
            (ret.under_l.clone(), req.non_iso_l.clone(), None, link)
        }
        Some(sub) => {
            let local = sub.local_object(p_obj).ok_or_else(|| Error::PreconditionViolated("P is not in L•".into()))?;
            let under = Undercategory::new(&sub.cat, local, format!("P↓L•, P = {:?}", p.elements()));
            let non_iso = full_subcategory_non_isos(&under, format!("P↓≇L•, P = {:?}", p.elements()));
            let link = under_bullet_retract(l, red, sub, &non_iso, &req.non_iso_l)?;
            (under, non_iso, Some(sub), link)
        }
    };
    let to_l = |o: ObjId| sub.map_or(o, |s| s.objects[o]);
    let li: HashSet<ObjId> = seq.objects[step].iter().copied().collect();
    let in_li: Vec<ObjId> =
        (0..under_b.cat.n_objects()).filter(|&a| li.contains(&to_l(under_b.object_target(a)))).collect();
    let p_size = p.size();
    for &a in &in_li {
        let r = l.object_subgroup(to_l(under_b.object_target(a)));
        if r.size() <= p_size {
            return Err(Error::InvalidLink(format!("object {a} of P↓L_i has |R| ≤ |P|")));
        }
    }
    let under_i = UnderSubcategory::new(&under_b, &in_li, format!("P↓L_{step}, P = {:?}", p.elements()));
    let iso = same_objects_iso("P↓L_i ≅ P↓≇L•", &under_i, &non_iso_b)?;

    let pt = verify_ptilde_equivalence(&nl, &req.non_iso_n)?;
    let lemma_checks = verify_ptilde_lemmas(f, &pt.data)?;
    let op = verify_op_identification(&pt.data);

    let mut links = vec![iso, bullet_link];
    links.extend(req.certificate.links.iter().cloned());
    links.extend(pt.certificate.links.iter().cloned());
    let mut certificate = equivalence_from_zigzag(links)?
        .with_metadata("representative", format!("{:?}", p.elements()))
        .with_metadata("P̃", format!("{:?}", pt.data.p_tilde.elements()));
    for (k, v) in req.certificate.metadata.iter() {
        certificate.metadata.insert(format!("retraction.{k}"), v.clone());
    }
    for (k, v) in pt.certificate.metadata.iter() {
        certificate.metadata.insert(format!("extension.{k}"), v.clone());
    }
    let homology = match homology_degree {
        Some(d) => Some(homology(&nerve(under_i.cat(), d, caps)?)?),
        None => None,
    };
    Ok(StepCertificate {
        step,
        representative: p,
        p_tilde: pt.data.p_tilde.clone(),
        under_objects: in_li.len(),
        retraction_checks: req.full_checks.clone(),
        lemma_checks,
        op,
        initial_object: pt.initial,
        certificate,
        homology,
        under: under_i.cat().clone(),
    })
}

/// Degree-wise integral homology of the nerves being compared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyCrossCheck {
    pub dmax: usize,
    /// `(name, H_0, …, H_dmax)`.
    pub nerves: Vec<(String, Vec<HomologyGroup>)>,
    pub equal: bool,
}

/// Homology of each category through `dmax`, compared degree-wise.
pub fn homology_cross_check(cats: &[(&str, &FiniteCategory)], dmax: usize, caps: &Caps) -> Result<HomologyCrossCheck> {
    let nerves = cats
        .par_iter()
        .map(|(name, c)| Ok((name.to_string(), homology(&nerve(c, dmax, caps)?)?)))
        .collect::<Result<Vec<_>>>()?;
    let equal = nerves.windows(2).all(|w| w[0].1 == w[1].1);
    Ok(HomologyCrossCheck { dmax, nerves, equal })
}

#[derive(Debug, Clone)]
pub struct TheoremOptions {
    /// `H`; the centric-radical subgroups when `None`.
    pub collection: Option<Vec<usize>>,
    pub dmax: usize,
    /// Degree through which each `P↓L_i` is checked to be acyclic.
    pub step_homology: Option<usize>,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        TheoremOptions { collection: None, dmax: 3, step_homology: Some(3) }
    }
}

#[derive(Debug, Clone)]
pub struct TheoremCertificate {
    pub prime: u64,
    pub group_order: usize,
    pub s: Subgroup,
    pub collection: Vec<Subgroup>,
    pub bullet: BulletReduction,
    pub sequence: PruneSequence,
    pub steps: Vec<StepCertificate>,
    pub homology: HomologyCrossCheck,
    pub metadata: BTreeMap<String, String>,
}

impl TheoremCertificate {
    pub fn is_valid(&self) -> bool {
        self.bullet.certificate.is_valid()
            && self.bullet.h_certificate.is_valid()
            && self.steps.len() == self.sequence.steps.len()
            && self.steps.iter().all(StepCertificate::is_valid)
            && self.homology.equal
    }

    /// Description of the first failure, if any.
    pub fn first_failure(&self) -> Option<String> {
        if !self.bullet.certificate.is_valid() || !self.bullet.h_certificate.is_valid() {
            return Some("bullet reduction".into());
        }
        if let Some(s) = self.steps.iter().find(|s| !s.is_valid()) {
            return Some(format!("step {} at {:?}", s.step, s.representative.elements()));
        }
        if !self.homology.equal {
            let degrees: Vec<String> = self.homology.nerves.iter().map(|(n, h)| format!("{n}: {h:?}")).collect();
            return Some(format!("homology mismatch: {}", degrees.join("; ")));
        }
        None
    }
}

/// The full certificate that `|L^H| ≃ |L|`: hypotheses on the inputs, the
/// reduction to `L•`, one step per pruned class, and the homology
/// cross-check of `L^H`, `L•` and `L`.
pub fn verify_theorem(l: &Arc<LinkingSystem>, oracle: &dyn BulletOracle, opts: &TheoremOptions) -> Result<TheoremCertificate> {
    let f = l.fusion();
    let sat = check_saturation(f)?;
    if !sat.is_saturated() {
        return Err(Error::HypothesisViolated(format!("F is not saturated: {:?}", sat.failures.first())));
    }
    let axioms = check_linking_axioms(l);
    if !axioms.ok() {
        return Err(Error::HypothesisViolated("L fails the linking axioms".into()));
    }
    let h = match &opts.collection {
        Some(h) => validate_collection(f, h)?,
        None => centric_radical_collection(f)?,
    };
    let red = reduce_to_bullet(l, &h, oracle)?;
    let seq = build_prune_sequence(l, &h, &red)?;
    verify_sequence(l, red, seq, opts)
}

/// [`verify_theorem`] for a given bullet reduction and pruning order.
pub fn verify_sequence(
    l: &Arc<LinkingSystem>,
    red: BulletReduction,
    seq: PruneSequence,
    opts: &TheoremOptions,
) -> Result<TheoremCertificate> {
    let f = l.fusion();
    let caps = *f.caps();
    let (steps, cross) = rayon::join(
        || {
            (0..seq.steps.len())
                .into_par_iter()
                .map(|i| verify_step(l, &red, &seq, i, opts.step_homology, &caps))
                .collect::<Result<Vec<_>>>()
        },
        || -> Result<HomologyCrossCheck> {
            let lh = l.full_subcategory(&seq.objects[0], "L^H");
            let mut cats: Vec<(&str, &FiniteCategory)> = vec![("L^H", &lh.cat)];
            if let Some(b) = &red.bullet {
                cats.push(("L•", &b.cat));
            }
            cats.push(("L", l.cat()));
            homology_cross_check(&cats, opts.dmax, &caps)
        },
    );
    let steps = steps?;
    let homology = cross?;
    for s in &steps {
        log::info!("step {} at {:?}: valid = {}", s.step, s.representative.elements(), s.is_valid());
    }
    let mut metadata = BTreeMap::new();
    metadata.insert("collection_hypothesis".into(), COLLECTION_HYPOTHESIS.into());
    metadata.insert("statement_source".into(), "theorem statement reconstructed from the proof and the abstract".into());
    metadata.insert("quillen_theorem_a".into(), "trusted; its hypotheses are certified per step".into());
    Ok(TheoremCertificate {
        prime: f.prime(),
        group_order: f.group().order(),
        s: f.s().clone(),
        collection: seq.collection.iter().map(|&id| f.subgroup(id).clone()).collect(),
        bullet: red,
        sequence: seq,
        steps,
        homology,
        metadata,
    })
}

/// One row per `F`-conjugacy class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassRow {
    pub class_id: usize,
    pub representative: Vec<u32>,
    pub order: usize,
    pub members: usize,
    pub fully_normalized: usize,
    pub centric: bool,
    pub radical: bool,
    pub out_f_order: usize,
    pub p_tilde: Vec<u32>,
}

pub fn classify_report(f: &FusionSystem) -> Result<Vec<ClassRow>> {
    f_conjugacy_classes(f)
        .par_iter()
        .map(|c| {
            let rep = c.representative;
            let sub = f.subgroup(rep);
            Ok(ClassRow {
                class_id: c.id,
                representative: sub.elements().to_vec(),
                order: sub.order(),
                members: c.members.len(),
                fully_normalized: c.members.iter().filter(|&&m| is_fully_normalized(f, m)).count(),
                centric: is_centric(f, rep),
                radical: is_radical(f, rep)?,
                out_f_order: out_f(f, rep)?.order(),
                p_tilde: p_tilde(f, sub)?.p_tilde.elements().to_vec(),
            })
        })
        .collect()
}

/// Plain-text rendering of [`classify_report`].
pub fn class_table_text(rows: &[ClassRow]) -> String {
    let mut out = String::from("class  order  members  f.n.  centric  radical  |Out_F|  |P~|  representative\n");
    for r in rows {
        out.push_str(&format!(
            "{:>5}  {:>5}  {:>7}  {:>4}  {:>7}  {:>7}  {:>7}  {:>4}  {:?}\n",
            r.class_id,
            r.order,
            r.members,
            r.fully_normalized,
            if r.centric { "yes" } else { "no" },
            if r.radical { "yes" } else { "no" },
            r.out_f_order,
            r.p_tilde.len(),
            r.representative
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::tests::s4_fusion;
    use crate::linking::tests::s4_linking;
    use crate::normalizer::tests::find;
    use crate::tower::{IdentityBullet, TableBullet};

    fn s4() -> Arc<LinkingSystem> {
        Arc::new(s4_linking())
    }

    #[test]
    fn s4_collection_and_sequence() {
        let l = s4();
        let f = l.fusion();
        let h = centric_radical_collection(f).unwrap();
        let mut orders: Vec<usize> = h.iter().map(|&i| f.subgroup(i).order()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![4, 8]);
        let red = reduce_to_bullet(&l, &h, &IdentityBullet).unwrap();
        assert!(red.is_identity() && red.certificate.is_valid());
        let seq = build_prune_sequence(&l, &h, &red).unwrap();
        assert_eq!(seq.steps.len(), 2);
        let c4 = find(f, 4, true, false);
        let v = find(f, 4, false, false);
        let reps: Vec<&Subgroup> = seq.steps.iter().map(|s| f.subgroup(s.representative)).collect();
        assert!(reps.contains(&&c4) && reps.contains(&&v));
        assert!(reps[0] < reps[1]);
        assert_eq!(seq.objects.last().unwrap().len(), l.n_objects());
    }

    #[test]
    fn all_centrics_prune_nothing() {
        let l = s4();
        let f = l.fusion();
        let all: Vec<usize> = (0..f.n_subgroups()).filter(|&i| is_centric(f, i)).collect();
        let red = reduce_to_bullet(&l, &all, &IdentityBullet).unwrap();
        assert!(build_prune_sequence(&l, &all, &red).unwrap().steps.is_empty());
    }

    #[test]
    fn bad_collections_are_rejected() {
        let l = s4();
        let f = l.fusion();
        let h = centric_radical_collection(f).unwrap();
        let without_s: Vec<usize> = h.iter().copied().filter(|&i| i != f.s_id()).collect();
        assert!(matches!(validate_collection(f, &without_s), Err(Error::HMissingRadicals(_))));
        // one member of a class with several members inside S
        let v = (0..f.n_subgroups()).find(|&i| f.classes()[f.class_of(i)].len() > 1).unwrap();
        let mut partial = h.clone();
        partial.push(v);
        assert!(matches!(validate_collection(f, &partial), Err(Error::HNotClosed(_))));
        let mut whole_class = h.clone();
        whole_class.extend(f.classes()[f.class_of(v)].iter().copied());
        assert!(matches!(validate_collection(f, &whole_class), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn s4_steps_are_certified() {
        let l = s4();
        let opts = TheoremOptions { dmax: 2, step_homology: Some(2), ..Default::default() };
        let cert = verify_theorem(&l, &IdentityBullet, &opts).unwrap();
        assert!(cert.is_valid(), "{:?}", cert.first_failure());
        assert_eq!(cert.steps.len(), 2);
        for s in &cert.steps {
            assert_eq!(s.certificate.links.len(), 5);
            assert!(is_acyclic(s.homology.as_ref().unwrap()));
        }
        assert!(cert.homology.equal);
    }

    #[test]
    fn pruning_order_does_not_matter() {
        let l = s4();
        let f = l.fusion();
        let h = centric_radical_collection(f).unwrap();
        let red = reduce_to_bullet(&l, &h, &IdentityBullet).unwrap();
        let seq = build_prune_sequence(&l, &h, &red).unwrap();
        let swapped = seq.reordered(&l, &[1, 0], &red.objects).unwrap();
        assert_ne!(swapped, seq);
        let opts = TheoremOptions { dmax: 1, step_homology: None, ..TheoremOptions::default() };
        assert!(verify_sequence(&l, red, swapped, &opts).unwrap().is_valid());
    }

    /// `C4• = D8` and `V• = D8` for the non-normal Klein four; identity
    /// elsewhere.
    fn collapsing_table(f: &FusionSystem) -> TableBullet {
        let s = f.s().clone();
        let mut table = HashMap::new();
        table.insert(find(f, 4, true, false), s.clone());
        table.insert(find(f, 4, false, false), s);
        TableBullet { name: "collapse onto centric radicals".into(), table }
    }

    #[test]
    fn table_bullet_gives_retract_certificates() {
        let l = s4();
        let f = l.fusion();
        let oracle = collapsing_table(f);
        let h = centric_radical_collection(f).unwrap();
        let red = reduce_to_bullet(&l, &h, &oracle).unwrap();
        assert!(!red.is_identity());
        assert_eq!(red.objects.len(), 2);
        assert_eq!(red.certificate.links[0].kind.label(), "retract");
        assert!(red.certificate.is_valid() && red.h_certificate.is_valid());
        let seq = build_prune_sequence(&l, &h, &red).unwrap();
        assert!(seq.steps.is_empty());
    }

    #[test]
    fn broken_oracle_is_rejected() {
        let l = s4();
        let f = l.fusion();
        let mut table = HashMap::new();
        table.insert(f.subgroup(0).clone(), find(f, 4, true, false));
        table.insert(find(f, 4, true, false), f.s().clone());
        let bad = TableBullet { name: "bad".into(), table };
        let err = reduce_to_bullet(&l, &[], &bad).unwrap_err();
        assert!(matches!(&err, Error::HypothesisViolated(m) if m.contains("idempotent")), "{err}");
    }

    #[test]
    fn s4_classification_rows() {
        let f = s4_fusion();
        let rows = classify_report(&f).unwrap();
        let cr: Vec<usize> = rows.iter().filter(|r| r.centric && r.radical).map(|r| r.order).collect();
        assert_eq!(cr.len(), 2);
        let c4 = rows.iter().find(|r| r.order == 4 && r.centric && !r.radical && r.out_f_order == 2).unwrap();
        assert_eq!(c4.p_tilde.len(), 8);
        assert!(class_table_text(&rows).lines().count() == rows.len() + 1);
    }

    #[test]
    fn step_identity_bullet_link_first() {
        let l = s4();
        let cert = verify_theorem(&l, &IdentityBullet, &TheoremOptions { dmax: 1, step_homology: None, ..Default::default() }).unwrap();
        for s in &cert.steps {
            let kinds: Vec<&str> = s.certificate.links.iter().map(|k| k.kind.label()).collect();
            assert_eq!(kinds, ["isomorphism", "identity", "retract", "mutual", "initial-object"]);
        }
    }
}
