use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ObjId = usize;
pub type MorId = usize;

/// A finite category with a precomputed composition table.
///
/// Morphisms out of each object are kept sorted by id. For a morphism `f`
/// the composites `g∘f` with every `g` out of `tgt(f)` are stored
/// contiguously, so composition is a single lookup.
#[derive(Debug, Clone)]
pub struct FiniteCategory {
    name: String,
    n_objects: usize,
    src: Vec<ObjId>,
    tgt: Vec<ObjId>,
    identity: Vec<MorId>,
    is_identity: Vec<bool>,
    out: Vec<Vec<MorId>>,
    pos_in_out: Vec<u32>,
    comp_offset: Vec<usize>,
    comp: Vec<MorId>,
    hom: HashMap<(ObjId, ObjId), Vec<MorId>>,
}

/// One failed law with the ids that witness it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawFailure {
    pub law: String,
    pub witness: Vec<usize>,
}

/// Result of an exhaustive law check.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub checked: usize,
    pub failures: Vec<LawFailure>,
}

impl LawReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub(crate) fn fail(&mut self, law: &str, witness: Vec<usize>) {
        // keep reports small; the first few witnesses are enough
        if self.failures.len() < 16 {
            self.failures.push(LawFailure { law: law.to_string(), witness });
        }
    }

    pub(crate) fn merge(&mut self, other: LawReport) {
        self.checked += other.checked;
        for f in other.failures {
            self.fail(&f.law, f.witness);
        }
    }

    /// Turns the first failure into an `InvalidLink` error.
    pub fn into_result(self, context: &str) -> Result<()> {
        match self.failures.first() {
            None => Ok(()),
            Some(f) => Err(Error::InvalidLink(format!("{context}: {} at {:?}", f.law, f.witness))),
        }
    }
}

impl FiniteCategory {
    /// Builds a category from source/target lists, identities per object and
    /// a composition rule `compose(g, f) = g∘f`, called on every composable
    /// pair. Composites are checked for the right source and target; the
    /// remaining laws are checked by [`FiniteCategory::check_laws`].
    pub fn build(
        name: impl Into<String>,
        n_objects: usize,
        src: Vec<ObjId>,
        tgt: Vec<ObjId>,
        identity: Vec<MorId>,
        compose: impl Fn(MorId, MorId) -> Option<MorId> + Sync,
    ) -> Result<FiniteCategory> {
        let name = name.into();
        let n = src.len();
        if tgt.len() != n || identity.len() != n_objects {
            return Err(Error::InvalidInput(format!("{name}: inconsistent category data")));
        }
        if src.iter().chain(&tgt).any(|&o| o >= n_objects) || identity.iter().any(|&m| m >= n) {
            return Err(Error::InvalidInput(format!("{name}: id out of range")));
        }
        for (o, &m) in identity.iter().enumerate() {
            if src[m] != o || tgt[m] != o {
                return Err(Error::InvalidInput(format!("{name}: identity of object {o} is not an endomorphism")));
            }
        }
        let mut out = vec![Vec::new(); n_objects];
        let mut hom: HashMap<(ObjId, ObjId), Vec<MorId>> = HashMap::new();
        for m in 0..n {
            out[src[m]].push(m);
            hom.entry((src[m], tgt[m])).or_default().push(m);
        }
        let mut pos_in_out = vec![0u32; n];
        for list in &out {
            for (i, &m) in list.iter().enumerate() {
                pos_in_out[m] = i as u32;
            }
        }
        let mut comp_offset = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for m in 0..n {
            comp_offset.push(total);
            total += out[tgt[m]].len();
        }
        comp_offset.push(total);
        let rows: Vec<Result<Vec<MorId>>> = (0..n)
            .into_par_iter()
            .map(|f| {
                out[tgt[f]]
                    .iter()
                    .map(|&g| {
                        let h = compose(g, f).ok_or_else(|| {
                            Error::InvalidInput(format!("{name}: composite of {g} after {f} undefined"))
                        })?;
                        if h >= n || src[h] != src[f] || tgt[h] != tgt[g] {
                            return Err(Error::InvalidInput(format!(
                                "{name}: composite of {g} after {f} has wrong endpoints"
                            )));
                        }
                        Ok(h)
                    })
                    .collect()
            })
            .collect();
        let mut comp = Vec::with_capacity(total);
        for r in rows {
            comp.extend(r?);
        }
        let mut is_identity = vec![false; n];
        for &m in &identity {
            is_identity[m] = true;
        }
        Ok(FiniteCategory {
            name,
            n_objects,
            src,
            tgt,
            identity,
            is_identity,
            out,
            pos_in_out,
            comp_offset,
            comp,
            hom,
        })
    }

    /// The category with one object and one morphism.
    pub fn point() -> FiniteCategory {
        FiniteCategory::build("point", 1, vec![0], vec![0], vec![0], |_, _| Some(0)).expect("point is valid")
    }

    /// The empty category.
    pub fn empty(name: impl Into<String>) -> FiniteCategory {
        FiniteCategory::build(name, 0, vec![], vec![], vec![], |_, _| None).expect("empty is valid")
    }

    /// A finite poset as a category; `leq(a, b)` must be a partial order.
    pub fn poset(name: impl Into<String>, n: usize, leq: impl Fn(usize, usize) -> bool) -> FiniteCategory {
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        let mut index = HashMap::new();
        for a in 0..n {
            for b in 0..n {
                if leq(a, b) {
                    index.insert((a, b), src.len());
                    src.push(a);
                    tgt.push(b);
                }
            }
        }
        let identity = (0..n).map(|a| index[&(a, a)]).collect();
        let (s2, t2) = (src.clone(), tgt.clone());
        FiniteCategory::build(name, n, src, tgt, identity, |g, f| index.get(&(s2[f], t2[g])).copied())
            .expect("poset composition is well defined")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_morphisms(&self) -> usize {
        self.src.len()
    }

    #[inline]
    pub fn src(&self, m: MorId) -> ObjId {
        self.src[m]
    }

    #[inline]
    pub fn tgt(&self, m: MorId) -> ObjId {
        self.tgt[m]
    }

    #[inline]
    pub fn identity(&self, o: ObjId) -> MorId {
        self.identity[o]
    }

    #[inline]
    pub fn is_identity(&self, m: MorId) -> bool {
        self.is_identity[m]
    }

    /// Morphisms with source `o`, sorted.
    #[inline]
    pub fn out(&self, o: ObjId) -> &[MorId] {
        &self.out[o]
    }

    /// `Hom(a, b)`, sorted.
    pub fn hom(&self, a: ObjId, b: ObjId) -> &[MorId] {
        self.hom.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `g∘f`; panics unless `tgt(f) = src(g)`.
    #[inline]
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        debug_assert_eq!(self.tgt[f], self.src[g], "{}: {g} after {f} not composable", self.name);
        self.comp[self.comp_offset[f] + self.pos_in_out[g] as usize]
    }

    pub fn try_compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        (self.tgt[f] == self.src[g]).then(|| self.compose(g, f))
    }

    /// Two-sided inverse, if any.
    pub fn inverse(&self, m: MorId) -> Option<MorId> {
        let (a, b) = (self.src[m], self.tgt[m]);
        self.hom(b, a)
            .iter()
            .copied()
            .find(|&g| self.compose(g, m) == self.identity[a] && self.compose(m, g) == self.identity[b])
    }

    pub fn is_isomorphism(&self, m: MorId) -> bool {
        self.inverse(m).is_some()
    }

    /// Identity and associativity laws on every composable tuple.
    pub fn check_laws(&self) -> LawReport {
        let n = self.n_morphisms();
        let parts: Vec<LawReport> = (0..n)
            .into_par_iter()
            .map(|f| {
                let mut r = LawReport::default();
                r.checked += 2;
                if self.compose(self.identity[self.tgt[f]], f) != f {
                    r.fail("left identity", vec![f]);
                }
                if self.compose(f, self.identity[self.src[f]]) != f {
                    r.fail("right identity", vec![f]);
                }
                for &g in self.out(self.tgt[f]) {
                    let gf = self.compose(g, f);
                    for &h in self.out(self.tgt[g]) {
                        r.checked += 1;
                        if self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                            r.fail("associativity", vec![f, g, h]);
                        }
                    }
                }
                r
            })
            .collect();
        let mut report = LawReport::default();
        for p in parts {
            report.merge(p);
        }
        report
    }

    /// Whether `o` is initial: exactly one morphism to every object.
    pub fn is_initial(&self, o: ObjId) -> bool {
        (0..self.n_objects).all(|b| self.hom(o, b).len() == 1)
    }

    /// Renames the category.
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn into_arc(self) -> Arc<Self> {
        Arc::new(self)
    }
}

/// A full subcategory together with its ids in the parent.
#[derive(Debug, Clone)]
pub struct Subcategory {
    pub cat: Arc<FiniteCategory>,
    pub parent: Arc<FiniteCategory>,
    /// Parent id of each object.
    pub objects: Vec<ObjId>,
    /// Parent id of each morphism.
    pub morphisms: Vec<MorId>,
}

impl Subcategory {
    /// The full subcategory on the listed parent objects (in that order).
    pub fn full(parent: &Arc<FiniteCategory>, objects: &[ObjId], name: impl Into<String>) -> Subcategory {
        let mut local = vec![usize::MAX; parent.n_objects()];
        for (i, &o) in objects.iter().enumerate() {
            local[o] = i;
        }
        let mut morphisms = Vec::new();
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        for (i, &o) in objects.iter().enumerate() {
            for &m in parent.out(o) {
                let t = local[parent.tgt(m)];
                if t != usize::MAX {
                    morphisms.push(m);
                    src.push(i);
                    tgt.push(t);
                }
            }
        }
        let back: HashMap<MorId, MorId> = morphisms.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let identity = objects.iter().map(|&o| back[&parent.identity(o)]).collect();
        let cat = FiniteCategory::build(name, objects.len(), src, tgt, identity, |g, f| {
            back.get(&parent.compose(morphisms[g], morphisms[f])).copied()
        })
        .expect("a full subcategory is closed under composition");
        Subcategory { cat: Arc::new(cat), parent: parent.clone(), objects: objects.to_vec(), morphisms }
    }

    /// Local id of a parent object, if present.
    pub fn local_object(&self, parent_obj: ObjId) -> Option<ObjId> {
        self.objects.iter().position(|&o| o == parent_obj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_laws() {
        let c = FiniteCategory::poset("divisors of 12", 6, |a, b| {
            let d = [1, 2, 3, 4, 6, 12];
            d[b] % d[a] == 0
        });
        assert!(c.check_laws().ok());
        assert!(c.is_initial(0));
        assert!(!c.is_initial(1));
        assert_eq!(c.hom(1, 3).len(), 1);
        assert!(c.hom(3, 1).is_empty());
    }

    #[test]
    fn group_as_category() {
        // C3 as a one-object category
        let c = FiniteCategory::build("C3", 1, vec![0; 3], vec![0; 3], vec![0], |g, f| Some((g + f) % 3)).unwrap();
        assert!(c.check_laws().ok());
        assert!((0..3).all(|m| c.is_isomorphism(m)));
        assert_eq!(c.inverse(1), Some(2));
    }

    #[test]
    fn broken_associativity_detected() {
        // a non-associative "composition" on one object
        let c = FiniteCategory::build("bad", 1, vec![0; 3], vec![0; 3], vec![0], |g, f| {
            Some(match (g, f) {
                (0, x) | (x, 0) => x,
                (1, 1) => 2,
                (1, 2) | (2, 1) => 0,
                _ => 2,
            })
        })
        .unwrap();
        let r = c.check_laws();
        assert!(!r.ok());
        assert_eq!(r.failures[0].law, "associativity");
    }

    #[test]
    fn full_subcategory_of_poset() {
        let c = Arc::new(FiniteCategory::poset("chain", 4, |a, b| a <= b));
        let sub = Subcategory::full(&c, &[1, 3], "ends");
        assert_eq!(sub.cat.n_objects(), 2);
        assert_eq!(sub.cat.n_morphisms(), 3);
        assert!(sub.cat.check_laws().ok());
    }
}
