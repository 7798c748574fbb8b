use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::category::{FiniteCategory, LawReport, MorId, ObjId, Subcategory};
use crate::error::{Error, Result};

/// A functor stored as object and morphism tables.
#[derive(Debug, Clone)]
pub struct Functor {
    pub name: String,
    pub source: Arc<FiniteCategory>,
    pub target: Arc<FiniteCategory>,
    pub obj_map: Vec<ObjId>,
    pub mor_map: Vec<MorId>,
}

impl Functor {
    pub fn new(
        name: impl Into<String>,
        source: &Arc<FiniteCategory>,
        target: &Arc<FiniteCategory>,
        obj_map: Vec<ObjId>,
        mor_map: Vec<MorId>,
    ) -> Result<Functor> {
        let name = name.into();
        if obj_map.len() != source.n_objects() || mor_map.len() != source.n_morphisms() {
            return Err(Error::InvalidInput(format!("{name}: table sizes do not match the source")));
        }
        if obj_map.iter().any(|&o| o >= target.n_objects()) || mor_map.iter().any(|&m| m >= target.n_morphisms()) {
            return Err(Error::InvalidInput(format!("{name}: table entry outside the target")));
        }
        Ok(Functor { name, source: source.clone(), target: target.clone(), obj_map, mor_map })
    }

    pub fn identity(c: &Arc<FiniteCategory>) -> Functor {
        Functor {
            name: format!("Id[{}]", c.name()),
            source: c.clone(),
            target: c.clone(),
            obj_map: (0..c.n_objects()).collect(),
            mor_map: (0..c.n_morphisms()).collect(),
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Functor) -> Result<Functor> {
        if !Arc::ptr_eq(&first.target, &self.source) {
            return Err(Error::InvalidLink(format!("{} cannot follow {}", self.name, first.name)));
        }
        Ok(Functor {
            name: format!("{}∘{}", self.name, first.name),
            source: first.source.clone(),
            target: self.target.clone(),
            obj_map: first.obj_map.iter().map(|&o| self.obj_map[o]).collect(),
            mor_map: first.mor_map.iter().map(|&m| self.mor_map[m]).collect(),
        })
    }

    /// Same categories and same tables.
    pub fn same_as(&self, other: &Functor) -> bool {
        Arc::ptr_eq(&self.source, &other.source)
            && Arc::ptr_eq(&self.target, &other.target)
            && self.obj_map == other.obj_map
            && self.mor_map == other.mor_map
    }

    pub fn is_identity(&self) -> bool {
        Arc::ptr_eq(&self.source, &self.target)
            && self.obj_map.iter().enumerate().all(|(i, &o)| i == o)
            && self.mor_map.iter().enumerate().all(|(i, &m)| i == m)
    }

    /// Bijective on objects and morphisms.
    pub fn is_bijective(&self) -> bool {
        let mut objs = self.obj_map.clone();
        objs.sort_unstable();
        objs.dedup();
        let mut mors = self.mor_map.clone();
        mors.sort_unstable();
        mors.dedup();
        objs.len() == self.target.n_objects()
            && objs.len() == self.source.n_objects()
            && mors.len() == self.target.n_morphisms()
            && mors.len() == self.source.n_morphisms()
    }
}

fn local_maps(sub: &Subcategory) -> (HashMap<ObjId, ObjId>, HashMap<MorId, MorId>) {
    (
        sub.objects.iter().enumerate().map(|(i, &o)| (o, i)).collect(),
        sub.morphisms.iter().enumerate().map(|(i, &m)| (m, i)).collect(),
    )
}

impl Functor {
    /// The restriction to full subcategories of the source and target.
    /// Fails if an image leaves `target`.
    pub fn restrict(&self, name: impl Into<String>, source: &Subcategory, target: &Subcategory) -> Result<Functor> {
        let name = name.into();
        if !Arc::ptr_eq(&source.parent, &self.source) || !Arc::ptr_eq(&target.parent, &self.target) {
            return Err(Error::InvalidLink(format!("{name}: subcategories of the wrong categories")));
        }
        let (objs, mors) = local_maps(target);
        let obj_map = source
            .objects
            .iter()
            .map(|&o| objs.get(&self.obj_map[o]).copied())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidLink(format!("{name}: an object leaves the target subcategory")))?;
        let mor_map = source
            .morphisms
            .iter()
            .map(|&m| mors.get(&self.mor_map[m]).copied())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidLink(format!("{name}: a morphism leaves the target subcategory")))?;
        Functor::new(name, &source.cat, &target.cat, obj_map, mor_map)
    }
}

/// Exhaustive check of the functor laws: sources, targets, identities and
/// composition.
pub fn check_functor(f: &Functor) -> LawReport {
    let c = &f.source;
    let d = &f.target;
    let mut report = LawReport::default();
    for o in 0..c.n_objects() {
        report.checked += 1;
        if f.mor_map[c.identity(o)] != d.identity(f.obj_map[o]) {
            report.fail("identity not preserved", vec![o]);
        }
    }
    let parts: Vec<LawReport> = (0..c.n_morphisms())
        .into_par_iter()
        .map(|m| {
            let mut r = LawReport::default();
            r.checked += 1;
            let fm = f.mor_map[m];
            if d.src(fm) != f.obj_map[c.src(m)] || d.tgt(fm) != f.obj_map[c.tgt(m)] {
                r.fail("endpoints not preserved", vec![m]);
                return r;
            }
            for &g in c.out(c.tgt(m)) {
                r.checked += 1;
                let fg = f.mor_map[g];
                if d.tgt(fm) != d.src(fg) || f.mor_map[c.compose(g, m)] != d.compose(fg, fm) {
                    r.fail("composition not preserved", vec![m, g]);
                }
            }
            r
        })
        .collect();
    for p in parts {
        report.merge(p);
    }
    report
}

/// A natural transformation `from ⇒ to` between functors `C → D`, stored as
/// one component per object of `C`.
#[derive(Debug, Clone)]
pub struct NaturalTransformation {
    pub name: String,
    pub from: Functor,
    pub to: Functor,
    pub components: Vec<MorId>,
}

impl NaturalTransformation {
    pub fn identity(f: &Functor) -> NaturalTransformation {
        NaturalTransformation {
            name: format!("id[{}]", f.name),
            from: f.clone(),
            to: f.clone(),
            components: f.obj_map.iter().map(|&o| f.target.identity(o)).collect(),
        }
    }
}

impl NaturalTransformation {
    /// The restriction to full subcategories, between restricted functors.
    pub fn restrict(
        &self,
        name: impl Into<String>,
        source: &Subcategory,
        target: &Subcategory,
        from: &Functor,
        to: &Functor,
    ) -> Result<NaturalTransformation> {
        let name = name.into();
        let (_, mors) = local_maps(target);
        let components = source
            .objects
            .iter()
            .map(|&o| mors.get(&self.components[o]).copied())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidLink(format!("{name}: a component leaves the target subcategory")))?;
        Ok(NaturalTransformation { name, from: from.clone(), to: to.clone(), components })
    }
}

/// Exhaustive naturality check: every component has the right endpoints
/// and `to(m)∘η_X = η_Y∘from(m)` for every `m: X → Y`.
pub fn check_natural(eta: &NaturalTransformation) -> LawReport {
    let mut report = LawReport::default();
    let (f, g) = (&eta.from, &eta.to);
    if !Arc::ptr_eq(&f.source, &g.source) || !Arc::ptr_eq(&f.target, &g.target) {
        report.fail("functors have different endpoints", vec![]);
        return report;
    }
    let c = &f.source;
    let d = &f.target;
    if eta.components.len() != c.n_objects() {
        report.fail("wrong number of components", vec![eta.components.len()]);
        return report;
    }
    for o in 0..c.n_objects() {
        report.checked += 1;
        let k = eta.components[o];
        if k >= d.n_morphisms() || d.src(k) != f.obj_map[o] || d.tgt(k) != g.obj_map[o] {
            report.fail("component has wrong endpoints", vec![o]);
        }
    }
    if !report.ok() {
        return report;
    }
    let parts: Vec<LawReport> = (0..c.n_morphisms())
        .into_par_iter()
        .map(|m| {
            let mut r = LawReport::default();
            r.checked += 1;
            let (x, y) = (c.src(m), c.tgt(m));
            let lhs = d.compose(g.mor_map[m], eta.components[x]);
            let rhs = d.compose(eta.components[y], f.mor_map[m]);
            if lhs != rhs {
                r.fail("naturality square does not commute", vec![m, x, y]);
            }
            r
        })
        .collect();
    for p in parts {
        report.merge(p);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Arc<FiniteCategory> {
        Arc::new(FiniteCategory::poset(format!("chain{n}"), n, |a, b| a <= b))
    }

    #[test]
    fn identity_functor_and_transformation_pass() {
        let c = chain(3);
        let id = Functor::identity(&c);
        assert!(check_functor(&id).ok());
        assert!(check_natural(&NaturalTransformation::identity(&id)).ok());
    }

    #[test]
    fn collapse_to_top_is_natural_from_identity() {
        let c = chain(3);
        let top = 2;
        let obj_map = vec![top; 3];
        let mor_map = vec![c.identity(top); c.n_morphisms()];
        let k = Functor::new("const", &c, &c, obj_map, mor_map).unwrap();
        assert!(check_functor(&k).ok());
        let comps = (0..3).map(|o| c.hom(o, top)[0]).collect();
        let eta = NaturalTransformation { name: "to top".into(), from: Functor::identity(&c), to: k, components: comps };
        assert!(check_natural(&eta).ok());
    }

    #[test]
    fn corrupted_component_is_caught() {
        // C2 acting on one object; a component that is not central breaks naturality
        let c = Arc::new(
            FiniteCategory::build("S3", 1, vec![0; 6], vec![0; 6], vec![0], |g, f| {
                // S3 as permutations of 3 points, indexed 0..6
                let perms = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
                let comp: Vec<usize> = (0..3).map(|i| perms[g][perms[f][i]]).collect();
                perms.iter().position(|p| p.as_slice() == comp.as_slice())
            })
            .unwrap(),
        );
        let id = Functor::identity(&c);
        let good = NaturalTransformation { name: "id".into(), from: id.clone(), to: id.clone(), components: vec![0] };
        assert!(check_natural(&good).ok());
        let bad = NaturalTransformation { name: "bad".into(), from: id.clone(), to: id, components: vec![1] };
        let r = check_natural(&bad);
        assert!(!r.ok());
        assert_eq!(r.failures[0].law, "naturality square does not commute");
    }

    #[test]
    fn broken_functor_is_caught() {
        let c = chain(2);
        let mut bad = Functor::identity(&c);
        let swap = c.hom(0, 0)[0];
        bad.mor_map[c.hom(0, 1)[0]] = swap;
        assert!(!check_functor(&bad).ok());
    }
}
