use std::collections::HashMap;
use std::sync::Arc;

use super::category::{FiniteCategory, MorId, ObjId, Subcategory};

/// The coslice `X↓C`: objects are morphisms `X → Q` of `C`, morphisms are
/// commuting triangles, recorded by their arrow between the targets.
#[derive(Debug, Clone)]
pub struct Undercategory {
    pub cat: Arc<FiniteCategory>,
    pub parent: Arc<FiniteCategory>,
    pub base: ObjId,
    /// The morphism of `C` underlying each object.
    pub object_arrow: Vec<MorId>,
    /// The morphism of `C` underlying each morphism.
    pub morphism_arrow: Vec<MorId>,
    object_of_arrow: HashMap<MorId, ObjId>,
    first_morphism: Vec<MorId>,
}

impl Undercategory {
    pub fn new(parent: &Arc<FiniteCategory>, base: ObjId, name: impl Into<String>) -> Undercategory {
        let object_arrow: Vec<MorId> = parent.out(base).to_vec();
        let object_of_arrow: HashMap<MorId, ObjId> =
            object_arrow.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        let mut morphism_arrow = Vec::new();
        let mut first_morphism = Vec::with_capacity(object_arrow.len());
        for (a, &f) in object_arrow.iter().enumerate() {
            first_morphism.push(src.len());
            for &beta in parent.out(parent.tgt(f)) {
                src.push(a);
                tgt.push(object_of_arrow[&parent.compose(beta, f)]);
                morphism_arrow.push(beta);
            }
        }
        // morphisms out of object a are (a, β) for β out of tgt(f_a), in parent order
        let identity = object_arrow
            .iter()
            .enumerate()
            .map(|(a, &f)| {
                let t = parent.tgt(f);
                first_morphism[a] + parent.out(t).iter().position(|&m| m == parent.identity(t)).unwrap()
            })
            .collect();
        let p = parent.clone();
        let (ma, fm, oa) = (&morphism_arrow, &first_morphism, &object_arrow);
        let cat = FiniteCategory::build(name, object_arrow.len(), src.clone(), tgt, identity, |g, f| {
            let a = src[f];
            let arrow = p.compose(ma[g], ma[f]);
            let t = p.tgt(oa[a]);
            p.out(t).binary_search(&arrow).ok().map(|i| fm[a] + i)
        })
        .expect("undercategory composition is well defined");
        Undercategory {
            cat: Arc::new(cat),
            parent: parent.clone(),
            base,
            object_arrow,
            morphism_arrow,
            object_of_arrow,
            first_morphism,
        }
    }

    /// The object whose underlying morphism is `arrow`.
    pub fn object(&self, arrow: MorId) -> Option<ObjId> {
        self.object_of_arrow.get(&arrow).copied()
    }

    /// The morphism out of object `a` whose underlying arrow is `beta`.
    pub fn morphism(&self, a: ObjId, beta: MorId) -> Option<MorId> {
        let t = self.parent.tgt(self.object_arrow[a]);
        self.parent.out(t).binary_search(&beta).ok().map(|i| self.first_morphism[a] + i)
    }

    /// Objects whose underlying morphism is not an isomorphism of `C`.
    pub fn non_iso_objects(&self) -> Vec<ObjId> {
        (0..self.object_arrow.len())
            .filter(|&a| !self.parent.is_isomorphism(self.object_arrow[a]))
            .collect()
    }

    /// Target in `C` of the object `a`.
    pub fn object_target(&self, a: ObjId) -> ObjId {
        self.parent.tgt(self.object_arrow[a])
    }
}

/// A full subcategory of an undercategory, keeping the underlying arrows.
#[derive(Debug, Clone)]
pub struct UnderSubcategory {
    pub sub: Subcategory,
    pub object_arrow: Vec<MorId>,
    pub morphism_arrow: Vec<MorId>,
    object_of_arrow: HashMap<MorId, ObjId>,
    morphism_of: HashMap<(ObjId, MorId), MorId>,
}

impl UnderSubcategory {
    pub fn new(under: &Undercategory, objects: &[ObjId], name: impl Into<String>) -> UnderSubcategory {
        let sub = Subcategory::full(&under.cat, objects, name);
        let object_arrow: Vec<MorId> = objects.iter().map(|&o| under.object_arrow[o]).collect();
        let morphism_arrow: Vec<MorId> = sub.morphisms.iter().map(|&m| under.morphism_arrow[m]).collect();
        let object_of_arrow = object_arrow.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let morphism_of = (0..sub.cat.n_morphisms())
            .map(|m| ((sub.cat.src(m), morphism_arrow[m]), m))
            .collect();
        UnderSubcategory { sub, object_arrow, morphism_arrow, object_of_arrow, morphism_of }
    }

    /// The whole undercategory, viewed as a subcategory of itself.
    pub fn whole(under: &Undercategory) -> UnderSubcategory {
        let all: Vec<ObjId> = (0..under.cat.n_objects()).collect();
        UnderSubcategory::new(under, &all, under.cat.name().to_string())
    }

    pub fn cat(&self) -> &Arc<FiniteCategory> {
        &self.sub.cat
    }

    pub fn object(&self, arrow: MorId) -> Option<ObjId> {
        self.object_of_arrow.get(&arrow).copied()
    }

    pub fn morphism(&self, a: ObjId, beta: MorId) -> Option<MorId> {
        self.morphism_of.get(&(a, beta)).copied()
    }
}

/// `X↓≇C`: the full subcategory of `X↓C` on objects that are not
/// isomorphisms, found by two-sided inverse search.
pub fn full_subcategory_non_isos(under: &Undercategory, name: impl Into<String>) -> UnderSubcategory {
    UnderSubcategory::new(under, &under.non_iso_objects(), name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_object_undercategory_is_isomorphic() {
        let c = Arc::new(FiniteCategory::poset("v", 3, |a, b| a == b || a == 0));
        let u = Undercategory::new(&c, 0, "0/v");
        assert_eq!(u.cat.n_objects(), 3);
        assert_eq!(u.cat.n_morphisms(), c.n_morphisms());
        assert!(u.cat.check_laws().ok());
        let non = full_subcategory_non_isos(&u, "non-iso");
        assert_eq!(non.cat().n_objects(), 2);
    }

    #[test]
    fn all_isos_give_empty() {
        let c = Arc::new(
            FiniteCategory::build("C2", 1, vec![0, 0], vec![0, 0], vec![0], |g, f| Some(g ^ f)).unwrap(),
        );
        let u = Undercategory::new(&c, 0, "C2/");
        assert_eq!(u.cat.n_objects(), 2);
        // the two objects are isomorphic via the nontrivial element
        assert!(u.cat.check_laws().ok());
        assert_eq!(full_subcategory_non_isos(&u, "none").cat().n_objects(), 0);
    }

    #[test]
    fn identity_is_initial_in_undercategory() {
        let c = Arc::new(FiniteCategory::poset("chain", 4, |a, b| a <= b));
        let u = Undercategory::new(&c, 1, "1/chain");
        let id_obj = u.object(c.identity(1)).unwrap();
        assert!(u.cat.is_initial(id_obj));
        assert_eq!(u.morphism(id_obj, c.hom(1, 3)[0]).map(|m| u.cat.tgt(m)), u.object(c.hom(1, 3)[0]));
    }
}
