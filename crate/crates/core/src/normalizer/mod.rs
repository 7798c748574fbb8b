//! Normalizer subsystems `N_F(P)` and `N_L(P)`, and the retraction of
//! `P↓L` onto `P↓N_L(P)`.

mod retraction;

pub use retraction::{build_retraction, verify_retraction_equivalence, Retraction, RetractionEntry, RetractionEquivalence};

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::catkit::{FiniteCategory, MorId, ObjId};
use crate::error::{Error, Result};
use crate::fusion::{is_centric, is_fully_normalized, FusionProvenance, FusionSystem};
use crate::group::{subgroup_lattice, GroupMono, Subgroup};
use crate::linking::{LinkingModel, LinkingParts, LinkingSystem, MorphismToken};

/// `N_F(P)` over `N_S(P)`, with a witness `φ′: QP → RP` for each morphism.
#[derive(Debug, Clone)]
pub struct NormalizerFusion {
    pub base: Arc<FusionSystem>,
    pub p: Subgroup,
    pub fusion: Arc<FusionSystem>,
    witnesses: HashMap<GroupMono, GroupMono>,
}

impl NormalizerFusion {
    /// The least `φ′ ∈ Hom_F(QP, RP)` with `φ′|_Q = φ` and `φ′(P) = P`.
    pub fn witness(&self, phi: &GroupMono) -> Option<&GroupMono> {
        self.witnesses.get(phi)
    }
}

fn require_fully_normalized(f: &FusionSystem, p: &Subgroup) -> Result<usize> {
    let pid = f.id_of(p).ok_or_else(|| Error::NotContained(format!("{p:?}")))?;
    if !is_fully_normalized(f, pid) {
        return Err(Error::NotFullyNormalized(format!("{p:?}")));
    }
    Ok(pid)
}

fn fixes(phi: &GroupMono, p: &Subgroup) -> bool {
    p.elements().iter().all(|&x| p.contains(phi.apply(x)))
}

/// Builds `N_F(P)` by running over the candidate witnesses `φ′: QP → RP`
/// with `φ′(P) = P`.
pub fn normalizer_fusion(f: &Arc<FusionSystem>, p: &Subgroup) -> Result<NormalizerFusion> {
    require_fully_normalized(f, p)?;
    let g = f.group().clone();
    let nsp = f.normalizer_in_s(p);
    let lattice = subgroup_lattice(&g, &nsp, f.caps())?;
    let n = lattice.len();
    let with_p: Vec<usize> = lattice
        .subgroups()
        .iter()
        .map(|q| f.require_id(&q.product(p, &g)))
        .collect::<Result<_>>()?;
    let rows: Vec<(Vec<Vec<GroupMono>>, Vec<(GroupMono, GroupMono)>)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let q = lattice.get(a);
            let mut homs = vec![Vec::new(); n];
            let mut witnesses = Vec::new();
            for b in 0..n {
                let r = lattice.get(b);
                for w in f.homs(with_p[a], with_p[b]) {
                    if !fixes(w, p) {
                        continue;
                    }
                    let phi = w.restrict(q);
                    if !phi.images.iter().all(|&y| r.contains(y)) {
                        continue;
                    }
                    let phi = phi.with_target(r);
                    // homs are sorted, so the first witness seen is the least
                    if !homs[b].contains(&phi) {
                        homs[b].push(phi.clone());
                        witnesses.push((phi, w.clone()));
                    }
                }
            }
            (homs, witnesses)
        })
        .collect();
    let mut homs = Vec::with_capacity(n * n);
    let mut witnesses = HashMap::new();
    for (row, wit) in rows {
        homs.extend(row);
        witnesses.extend(wit);
    }
    let fusion = FusionSystem::from_hom_sets(
        g,
        nsp,
        f.prime(),
        lattice,
        homs,
        FusionProvenance::Normalizer { of: p.clone() },
        *f.caps(),
    );
    Ok(NormalizerFusion { base: f.clone(), p: p.clone(), fusion: Arc::new(fusion), witnesses })
}

/// `N_L(P)`: objects are the `N_F(P)`-centric subgroups `Q`, and a
/// morphism `Q → R` is a morphism `QP → RP` of `L` that sends `P` to `P`
/// and restricts to a morphism of `N_F(P)`.
#[derive(Debug, Clone)]
pub struct NormalizerLinking {
    pub base: Arc<LinkingSystem>,
    pub nf: NormalizerFusion,
    pub linking: Arc<LinkingSystem>,
    base_object: Vec<ObjId>,
    base_morphism: Vec<MorId>,
    index: HashMap<(ObjId, ObjId, MorId), MorId>,
}

impl NormalizerLinking {
    pub fn p(&self) -> &Subgroup {
        &self.nf.p
    }

    /// Object of `L` underlying an object `Q`, namely `QP`.
    pub fn base_object(&self, o: ObjId) -> ObjId {
        self.base_object[o]
    }

    /// Morphism of `L` underlying a morphism of `N_L(P)`.
    pub fn base_morphism(&self, m: MorId) -> MorId {
        self.base_morphism[m]
    }

    /// The morphism `a → b` of `N_L(P)` over a morphism of `L`.
    pub fn lookup(&self, a: ObjId, b: ObjId, base: MorId) -> Option<MorId> {
        self.index.get(&(a, b, base)).copied()
    }

    pub fn cat(&self) -> &Arc<FiniteCategory> {
        self.linking.cat()
    }

    /// The object of `N_L(P)` for `P` itself.
    pub fn p_object(&self) -> Result<ObjId> {
        self.linking.require_object(&self.nf.p)
    }
}

/// Builds `N_L(P)` inside `L` and checks it against the linking axioms
/// over `N_F(P)`.
pub fn normalizer_linking(l: &Arc<LinkingSystem>, p: &Subgroup) -> Result<NormalizerLinking> {
    let nf = normalizer_fusion(l.fusion(), p)?;
    let nfs = nf.fusion.clone();
    let g = l.group().clone();
    let objects: Vec<usize> = (0..nfs.n_subgroups()).filter(|&id| is_centric(&nfs, id)).collect();
    let base_object: Vec<ObjId> = objects
        .iter()
        .map(|&id| l.require_object(&nfs.subgroup(id).product(p, &g)))
        .collect::<Result<_>>()?;
    let n_obj = objects.len();
    let rows: Vec<Vec<(ObjId, MorId, GroupMono)>> = (0..n_obj)
        .into_par_iter()
        .map(|a| {
            let q = nfs.subgroup(objects[a]);
            let mut out = Vec::new();
            for b in 0..n_obj {
                let r = nfs.subgroup(objects[b]);
                let homs = nfs.homs(objects[a], objects[b]);
                for &m in l.hom(base_object[a], base_object[b]) {
                    let phi = l.projection(m);
                    if !fixes(phi, p) {
                        continue;
                    }
                    let res = phi.restrict(q);
                    if !res.images.iter().all(|&y| r.contains(y)) {
                        continue;
                    }
                    let res = res.with_target(r);
                    if homs.binary_search(&res).is_ok() {
                        out.push((b, m, res));
                    }
                }
            }
            out
        })
        .collect();
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    let mut base_morphism = Vec::new();
    let mut projection = Vec::new();
    let mut index = HashMap::new();
    for (a, row) in rows.into_iter().enumerate() {
        for (b, m, phi) in row {
            index.insert((a, b, m), src.len());
            src.push(a);
            tgt.push(b);
            base_morphism.push(m);
            projection.push(phi);
        }
    }
    let missing = |what: &str| Error::AxiomViolation(format!("N_L(P) is missing {what}"));
    let identity = (0..n_obj)
        .map(|a| index.get(&(a, a, l.identity(base_object[a]))).copied().ok_or_else(|| missing("an identity")))
        .collect::<Result<Vec<_>>>()?;
    let delta = (0..n_obj)
        .map(|a| {
            nfs.subgroup(objects[a])
                .elements()
                .iter()
                .map(|&x| index.get(&(a, a, l.delta(base_object[a], x))).copied().ok_or_else(|| missing("δ")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut inclusions = HashMap::new();
    for a in 0..n_obj {
        for b in 0..n_obj {
            if nfs.subgroup(objects[a]).is_subset_of(nfs.subgroup(objects[b])) {
                let base = l
                    .inclusion(base_object[a], base_object[b])
                    .ok_or_else(|| missing("an inclusion of L"))?;
                inclusions.insert((a, b), *index.get(&(a, b, base)).ok_or_else(|| missing("an inclusion"))?);
            }
        }
    }
    let tokens = base_morphism.iter().map(|&m| MorphismToken::Derived { base: m }).collect();
    let (s2, t2, bm) = (&src, &tgt, &base_morphism);
    let cat = FiniteCategory::build(
        format!("N_L({:?})", p.elements()),
        n_obj,
        src.clone(),
        tgt.clone(),
        identity,
        |h, k| index.get(&(s2[k], t2[h], l.compose(bm[h], bm[k]))).copied(),
    )?;
    let linking = LinkingSystem::from_parts(LinkingParts {
        fusion: nfs,
        cat,
        object_subgroup: objects,
        projection,
        delta,
        inclusions: Some(inclusions),
        tokens,
        model: LinkingModel::Normalizer { of: p.clone() },
    })?;
    let nl = NormalizerLinking { base: l.clone(), nf, linking: Arc::new(linking), base_object, base_morphism, index };
    check_p_is_normal(&nl)?;
    Ok(nl)
}

/// Every morphism out of `P` in `N_L(P)` has a target containing `P` as a
/// normal subgroup and sends `P` onto `P`.
fn check_p_is_normal(nl: &NormalizerLinking) -> Result<()> {
    let l = &nl.linking;
    let p = nl.p();
    let Some(po) = l.object_of(p) else {
        return Ok(());
    };
    let g = l.group();
    for &m in l.cat().out(po) {
        let q = l.object_subgroup(l.tgt(m));
        let phi = l.projection(m);
        if !p.is_subset_of(q) || !crate::group::is_normal_in(g, p, q) || phi.image() != *p {
            return Err(Error::AxiomViolation(format!("morphism {m} out of P does not normalize P")));
        }
    }
    Ok(())
}
