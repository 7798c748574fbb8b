//! Centric linking systems.
//!
//! A [`LinkingSystem`] is a finite category whose objects are the centric
//! subgroups of a fusion system, together with the projection of every
//! morphism to the fusion system, the distinguished monomorphisms `δ_P`
//! and a compatible choice of inclusions.

mod axioms;
mod lifts;

pub use axioms::{check_linking_axioms, LinkingAxiomReport};

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::catkit::{FiniteCategory, MorId, ObjId, Subcategory};
use crate::error::{Error, Result};
use crate::fusion::{is_centric, FusionProvenance, FusionSystem};
use crate::group::{center, centralizer, Elem, FiniteGroup, GroupMono, Subgroup};

/// What distinguishes a morphism beyond its endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MorphismToken {
    /// The coset `g·C′_G(P)`, by its least element.
    Coset { rep: Elem },
    /// A morphism of another linking system.
    Derived { base: MorId },
    /// An opaque label.
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkingModel {
    /// `L_S(G)`, morphisms are transporter cosets.
    Group,
    /// `N_L(P)` inside another linking system.
    Normalizer { of: Subgroup },
    /// Explicit tables.
    HandSpecified,
}

/// A centric linking system over a fusion system.
#[derive(Debug, Clone)]
pub struct LinkingSystem {
    fusion: Arc<FusionSystem>,
    cat: Arc<FiniteCategory>,
    object_subgroup: Vec<usize>,
    object_of: HashMap<usize, ObjId>,
    projection: Vec<GroupMono>,
    fiber: HashMap<GroupMono, Vec<MorId>>,
    delta: Vec<Vec<MorId>>,
    inclusions: HashMap<(ObjId, ObjId), MorId>,
    tokens: Vec<MorphismToken>,
    model: LinkingModel,
}

/// Parts of a linking system before validation.
#[derive(Debug, Clone)]
pub struct LinkingParts {
    pub fusion: Arc<FusionSystem>,
    pub cat: FiniteCategory,
    /// Lattice id (in `fusion`) of each object.
    pub object_subgroup: Vec<usize>,
    pub projection: Vec<GroupMono>,
    /// `δ_P(x)` for the sorted elements `x` of each object.
    pub delta: Vec<Vec<MorId>>,
    /// Distinguished inclusions; found by search when absent.
    pub inclusions: Option<HashMap<(ObjId, ObjId), MorId>>,
    pub tokens: Vec<MorphismToken>,
    pub model: LinkingModel,
}

impl LinkingSystem {
    /// Assembles a linking system and checks every axiom.
    pub fn from_parts(parts: LinkingParts) -> Result<LinkingSystem> {
        let l = Self::assemble(parts)?;
        let report = check_linking_axioms(&l);
        if !report.ok() {
            return Err(Error::AxiomViolation(report.failures.join("; ")));
        }
        Ok(l)
    }

    fn assemble(parts: LinkingParts) -> Result<LinkingSystem> {
        let LinkingParts { fusion, cat, object_subgroup, projection, delta, inclusions, tokens, model } = parts;
        let n = cat.n_morphisms();
        if object_subgroup.len() != cat.n_objects() || projection.len() != n || tokens.len() != n {
            return Err(Error::InvalidInput("linking system tables do not match the category".into()));
        }
        if delta.len() != cat.n_objects() {
            return Err(Error::InvalidInput("one δ table per object is required".into()));
        }
        for (o, &sid) in object_subgroup.iter().enumerate() {
            if sid >= fusion.n_subgroups() {
                return Err(Error::NotContained(format!("object {o}")));
            }
            if !is_centric(&fusion, sid) {
                return Err(Error::NonCentricObject(format!("{:?}", fusion.subgroup(sid))));
            }
            if delta[o].len() != fusion.subgroup(sid).order() {
                return Err(Error::InvalidInput(format!("δ table of object {o} has the wrong length")));
            }
        }
        let object_of = object_subgroup.iter().enumerate().map(|(o, &s)| (s, o)).collect();
        let mut fiber: HashMap<GroupMono, Vec<MorId>> = HashMap::new();
        for (m, phi) in projection.iter().enumerate() {
            fiber.entry(phi.clone()).or_default().push(m);
        }
        let mut l = LinkingSystem {
            fusion,
            cat: Arc::new(cat),
            object_subgroup,
            object_of,
            projection,
            fiber,
            delta,
            inclusions: HashMap::new(),
            tokens,
            model,
        };
        l.inclusions = match inclusions {
            Some(map) => map,
            None => l.choose_inclusions()?,
        };
        Ok(l)
    }

    pub fn fusion(&self) -> &Arc<FusionSystem> {
        &self.fusion
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.fusion.group()
    }

    pub fn cat(&self) -> &Arc<FiniteCategory> {
        &self.cat
    }

    pub fn model(&self) -> &LinkingModel {
        &self.model
    }

    pub fn n_objects(&self) -> usize {
        self.cat.n_objects()
    }

    pub fn n_morphisms(&self) -> usize {
        self.cat.n_morphisms()
    }

    /// Lattice id of an object.
    pub fn object_subgroup_id(&self, o: ObjId) -> usize {
        self.object_subgroup[o]
    }

    pub fn object_subgroup(&self, o: ObjId) -> &Subgroup {
        self.fusion.subgroup(self.object_subgroup[o])
    }

    /// Object for a lattice id.
    pub fn object_of_id(&self, sid: usize) -> Option<ObjId> {
        self.object_of.get(&sid).copied()
    }

    pub fn object_of(&self, sub: &Subgroup) -> Option<ObjId> {
        self.fusion.id_of(sub).and_then(|id| self.object_of_id(id))
    }

    /// Object for a subgroup, or `TargetNotObject`.
    pub fn require_object(&self, sub: &Subgroup) -> Result<ObjId> {
        self.object_of(sub).ok_or_else(|| Error::TargetNotObject(format!("{sub:?}")))
    }

    pub fn src(&self, m: MorId) -> ObjId {
        self.cat.src(m)
    }

    pub fn tgt(&self, m: MorId) -> ObjId {
        self.cat.tgt(m)
    }

    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        self.cat.compose(g, f)
    }

    pub fn identity(&self, o: ObjId) -> MorId {
        self.cat.identity(o)
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> &[MorId] {
        self.cat.hom(a, b)
    }

    /// `π(m)`.
    pub fn projection(&self, m: MorId) -> &GroupMono {
        &self.projection[m]
    }

    pub fn token(&self, m: MorId) -> &MorphismToken {
        &self.tokens[m]
    }

    /// All lifts of a fusion morphism, sorted.
    pub fn lifts_of(&self, phi: &GroupMono) -> &[MorId] {
        self.fiber.get(phi).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `δ_P(x)` for `x ∈ P`.
    pub fn delta(&self, o: ObjId, x: Elem) -> MorId {
        let pos = self.object_subgroup(o).position(x).expect("δ applied outside its object");
        self.delta[o][pos]
    }

    /// `ι_P^Q` when `P ⊆ Q`.
    pub fn inclusion(&self, p: ObjId, q: ObjId) -> Option<MorId> {
        self.inclusions.get(&(p, q)).copied()
    }

    pub fn inclusions(&self) -> &HashMap<(ObjId, ObjId), MorId> {
        &self.inclusions
    }

    /// Objects in increasing lattice order.
    pub fn objects(&self) -> std::ops::Range<ObjId> {
        0..self.n_objects()
    }

    /// The full subcategory on the listed objects.
    pub fn full_subcategory(&self, objects: &[ObjId], name: impl Into<String>) -> Subcategory {
        Subcategory::full(&self.cat, objects, name)
    }

    /// Whether `m` is an isomorphism; by the axioms this holds exactly when
    /// `π(m)` is onto its target.
    pub fn is_isomorphism(&self, m: MorId) -> bool {
        self.cat.is_isomorphism(m)
    }
}

/// The linking system `L_S(G)` of a fusion system realized by its group.
///
/// Morphisms `P → Q` are the cosets `g·C′_G(P)` of `g` with `gPg⁻¹ ⊆ Q`,
/// where `C′_G(P)` is the `p′`-part of `C_G(P) = Z(P) × C′_G(P)`.
pub fn linking_from_group(f: Arc<FusionSystem>) -> Result<LinkingSystem> {
    if *f.provenance() != FusionProvenance::Group {
        return Err(Error::PreconditionViolated("the coset model needs F = F_S(G)".into()));
    }
    let g = f.group().clone();
    let p = f.prime();
    let objects: Vec<usize> = (0..f.n_subgroups()).filter(|&id| is_centric(&f, id)).collect();
    log::debug!("linking system: {} centric objects", objects.len());
    // per object: coset representative of every element
    let reps: Vec<Vec<Elem>> = objects
        .par_iter()
        .map(|&sid| coset_reps(&g, f.subgroup(sid), p))
        .collect::<Result<Vec<_>>>()?;
    let n_obj = objects.len();
    let rows: Vec<Vec<(ObjId, Elem)>> = (0..n_obj)
        .into_par_iter()
        .map(|a| {
            let pa = f.subgroup(objects[a]);
            let mut distinct: Vec<Elem> = reps[a].clone();
            distinct.sort_unstable();
            distinct.dedup();
            let images: Vec<Vec<Elem>> =
                distinct.iter().map(|&x| pa.elements().iter().map(|&y| g.conj(x, y)).collect()).collect();
            let mut out = Vec::new();
            for (b, &qid) in objects.iter().enumerate() {
                let q = f.subgroup(qid);
                for (i, &x) in distinct.iter().enumerate() {
                    if images[i].iter().all(|&y| q.contains(y)) {
                        out.push((b, x));
                    }
                }
            }
            out
        })
        .collect();
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    let mut tokens = Vec::new();
    let mut projection = Vec::new();
    let mut index: HashMap<(ObjId, ObjId, Elem), MorId> = HashMap::new();
    for (a, row) in rows.iter().enumerate() {
        for &(b, x) in row {
            index.insert((a, b, x), src.len());
            src.push(a);
            tgt.push(b);
            tokens.push(MorphismToken::Coset { rep: x });
            projection.push(GroupMono::conjugation(&g, x, f.subgroup(objects[a]), f.subgroup(objects[b])));
        }
    }
    let e = g.identity();
    let identity: Vec<MorId> = (0..n_obj).map(|a| index[&(a, a, reps[a][e as usize])]).collect();
    let delta: Vec<Vec<MorId>> = (0..n_obj)
        .map(|a| f.subgroup(objects[a]).elements().iter().map(|&x| index[&(a, a, reps[a][x as usize])]).collect())
        .collect();
    let mut inclusions = HashMap::new();
    for a in 0..n_obj {
        for b in 0..n_obj {
            if f.subgroup(objects[a]).is_subset_of(f.subgroup(objects[b])) {
                inclusions.insert((a, b), index[&(a, b, reps[a][e as usize])]);
            }
        }
    }
    let (s2, t2, tok) = (&src, &tgt, &tokens);
    let cat = FiniteCategory::build(format!("L_S(G), p = {p}"), n_obj, src.clone(), tgt.clone(), identity, |h, k| {
        let (MorphismToken::Coset { rep: x }, MorphismToken::Coset { rep: y }) = (&tok[k], &tok[h]) else {
            return None;
        };
        let a = s2[k];
        index.get(&(a, t2[h], reps[a][g.mul(*y, *x) as usize])).copied()
    })?;
    log::debug!("linking system: {} morphisms", cat.n_morphisms());
    LinkingSystem::from_parts(LinkingParts {
        fusion: f.clone(),
        cat,
        object_subgroup: objects,
        projection,
        delta,
        inclusions: Some(inclusions),
        tokens,
        model: LinkingModel::Group,
    })
}

/// `rep[g]` = least element of `g·C′_G(P)`.
fn coset_reps(g: &FiniteGroup, p_sub: &Subgroup, p: u64) -> Result<Vec<Elem>> {
    let c = centralizer(g, p_sub);
    let z = center(g, p_sub);
    let c_prime: Vec<Elem> = c.elements().iter().copied().filter(|&x| !(g.elem_order(x) as u64).is_multiple_of(p)).collect();
    let closed = c_prime.iter().all(|&x| c_prime.iter().all(|&y| c_prime.binary_search(&g.mul(x, y)).is_ok()));
    if !closed || c_prime.len() * z.order() != c.order() {
        return Err(Error::NonCentricObject(format!("{p_sub:?}: C_G(P) is not Z(P) × C′_G(P)")));
    }
    let mut rep = vec![Elem::MAX; g.order()];
    for x in g.elements() {
        if rep[x as usize] != Elem::MAX {
            continue;
        }
        let coset: Vec<Elem> = c_prime.iter().map(|&c| g.mul(x, c)).collect();
        let least = *coset.iter().min().unwrap();
        for y in coset {
            rep[y as usize] = least;
        }
    }
    Ok(rep)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::config::Caps;
    use crate::fusion::fusion_from_group;
    use crate::fusion::tests::group;

    pub(crate) fn linking(gens: &[&str], p: u64) -> LinkingSystem {
        let f = fusion_from_group(group(gens), p, &Caps::default()).unwrap();
        linking_from_group(Arc::new(f)).unwrap()
    }

    pub(crate) fn s4_linking() -> LinkingSystem {
        linking(&["(1 2)", "(1 2 3 4)"], 2)
    }

    #[test]
    fn s4_counts() {
        let l = s4_linking();
        let orders: Vec<usize> = l.objects().map(|o| l.object_subgroup(o).order()).collect();
        assert_eq!(l.n_objects(), 4);
        assert_eq!(l.n_morphisms(), 88);
        assert_eq!(orders.iter().filter(|&&o| o == 4).count(), 3);
        let d8 = l.objects().find(|&o| l.object_subgroup(o).order() == 8).unwrap();
        assert_eq!(l.hom(d8, d8).len(), 8);
    }

    #[test]
    fn hom_sizes_match_fusion() {
        let l = s4_linking();
        let f = l.fusion().clone();
        for a in l.objects() {
            for b in l.objects() {
                let z = center(l.group(), l.object_subgroup(a)).order();
                let nf = f.homs(l.object_subgroup_id(a), l.object_subgroup_id(b)).len();
                assert_eq!(l.hom(a, b).len(), z * nf);
            }
        }
    }

    #[test]
    fn p_group_has_trivial_complement() {
        let l = linking(&["(1 2 3 4)", "(1 3)"], 2);
        for m in 0..l.n_morphisms() {
            let MorphismToken::Coset { rep } = l.token(m) else { panic!() };
            assert!(l.fusion().s().contains(*rep));
        }
    }

    #[test]
    fn rejects_hand_specified_fusion() {
        let g = group(&["(1 2)", "(3 4)"]);
        let f = FusionSystem::generated_by(g.clone(), g.whole(), 2, &[], &Caps::default()).unwrap();
        assert!(matches!(linking_from_group(Arc::new(f)), Err(Error::PreconditionViolated(_))));
    }
}
