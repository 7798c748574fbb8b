use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::category::{FiniteCategory, LawReport, ObjId};
use super::functor::{check_functor, check_natural, Functor, NaturalTransformation};
use crate::error::{Error, Result};

/// How one link of a zigzag is witnessed.
#[derive(Debug, Clone)]
pub enum LinkKind {
    /// `left` and `right` are the same category.
    Identity,
    /// Mutually inverse functors.
    Isomorphism { forward: Functor, backward: Functor },
    /// `inclusion: D → C` and `retraction: C → D` with `r∘i = Id_D`, and a
    /// natural transformation between `i∘r` and `Id_C` in either direction.
    Retract { inclusion: Functor, retraction: Functor, transformation: NaturalTransformation },
    /// `F: C → D`, `G: D → C`, a natural transformation between `Id_C` and
    /// `GF` and one between `Id_D` and `FG`, each in either direction.
    Mutual { f: Functor, g: Functor, unit: NaturalTransformation, counit: NaturalTransformation },
    /// `left` has an initial object and `right` is the point.
    InitialObject { object: ObjId },
}

impl LinkKind {
    pub fn label(&self) -> &'static str {
        match self {
            LinkKind::Identity => "identity",
            LinkKind::Isomorphism { .. } => "isomorphism",
            LinkKind::Retract { .. } => "retract",
            LinkKind::Mutual { .. } => "mutual",
            LinkKind::InitialObject { .. } => "initial-object",
        }
    }
}

/// One step of a zigzag between `left` and `right`.
#[derive(Debug, Clone)]
pub struct Link {
    pub name: String,
    pub left: Arc<FiniteCategory>,
    pub right: Arc<FiniteCategory>,
    pub kind: LinkKind,
    pub notes: BTreeMap<String, String>,
}

impl Link {
    pub fn new(name: impl Into<String>, left: &Arc<FiniteCategory>, right: &Arc<FiniteCategory>, kind: LinkKind) -> Link {
        Link { name: name.into(), left: left.clone(), right: right.clone(), kind, notes: BTreeMap::new() }
    }

    pub fn identity(name: impl Into<String>, c: &Arc<FiniteCategory>) -> Link {
        Link::new(name, c, c, LinkKind::Identity)
    }

    /// Link from a category with an initial object to a fresh point.
    pub fn initial_object(name: impl Into<String>, c: &Arc<FiniteCategory>, object: ObjId) -> Link {
        Link::new(name, c, &FiniteCategory::point().into_arc(), LinkKind::InitialObject { object })
    }

    pub fn with_note(mut self, key: &str, value: impl Into<String>) -> Link {
        self.notes.insert(key.to_string(), value.into());
        self
    }
}

/// Outcome of one exhaustive check inside a link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub checked: usize,
    pub passed: bool,
}

fn joins(f: &Functor, a: &Arc<FiniteCategory>, b: &Arc<FiniteCategory>) -> bool {
    Arc::ptr_eq(&f.source, a) && Arc::ptr_eq(&f.target, b)
}

/// Whether `eta` runs between `x` and `y` in some direction.
fn between(eta: &NaturalTransformation, x: &Functor, y: &Functor) -> bool {
    (eta.from.same_as(x) && eta.to.same_as(y)) || (eta.from.same_as(y) && eta.to.same_as(x))
}

fn record(records: &mut Vec<CheckRecord>, check: &str, report: LawReport, link: &str) -> Result<()> {
    records.push(CheckRecord { check: check.into(), checked: report.checked, passed: report.ok() });
    report.into_result(&format!("{link}: {check}"))
}

fn require(records: &mut Vec<CheckRecord>, check: &str, ok: bool, link: &str) -> Result<()> {
    records.push(CheckRecord { check: check.into(), checked: 1, passed: ok });
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidLink(format!("{link}: {check} fails")))
    }
}

/// Checks one link exhaustively.
pub fn check_link(link: &Link) -> Result<Vec<CheckRecord>> {
    let (c, d) = (&link.left, &link.right);
    let name = link.name.as_str();
    let mut rec = Vec::new();
    match &link.kind {
        LinkKind::Identity => {
            require(&mut rec, "left and right coincide", Arc::ptr_eq(c, d), name)?;
        }
        LinkKind::Isomorphism { forward, backward } => {
            require(&mut rec, "functor endpoints", joins(forward, c, d) && joins(backward, d, c), name)?;
            record(&mut rec, "forward is a functor", check_functor(forward), name)?;
            record(&mut rec, "backward is a functor", check_functor(backward), name)?;
            require(&mut rec, "backward∘forward = Id", backward.after(forward)?.is_identity(), name)?;
            require(&mut rec, "forward∘backward = Id", forward.after(backward)?.is_identity(), name)?;
        }
        LinkKind::Retract { inclusion, retraction, transformation } => {
            // the retract may sit on either side of the link
            let (big, small) = if joins(inclusion, d, c) { (c, d) } else { (d, c) };
            require(
                &mut rec,
                "functor endpoints",
                joins(inclusion, small, big) && joins(retraction, big, small),
                name,
            )?;
            record(&mut rec, "inclusion is a functor", check_functor(inclusion), name)?;
            record(&mut rec, "retraction is a functor", check_functor(retraction), name)?;
            require(&mut rec, "r∘i = Id", retraction.after(inclusion)?.is_identity(), name)?;
            let ir = inclusion.after(retraction)?;
            require(
                &mut rec,
                "transformation joins i∘r and Id",
                between(transformation, &ir, &Functor::identity(big)),
                name,
            )?;
            record(&mut rec, "naturality", check_natural(transformation), name)?;
        }
        LinkKind::Mutual { f, g, unit, counit } => {
            require(&mut rec, "functor endpoints", joins(f, c, d) && joins(g, d, c), name)?;
            record(&mut rec, "F is a functor", check_functor(f), name)?;
            record(&mut rec, "G is a functor", check_functor(g), name)?;
            require(&mut rec, "unit joins Id and GF", between(unit, &Functor::identity(c), &g.after(f)?), name)?;
            require(&mut rec, "counit joins Id and FG", between(counit, &Functor::identity(d), &f.after(g)?), name)?;
            record(&mut rec, "unit naturality", check_natural(unit), name)?;
            record(&mut rec, "counit naturality", check_natural(counit), name)?;
        }
        LinkKind::InitialObject { object } => {
            require(&mut rec, "right is a point", d.n_objects() == 1 && d.n_morphisms() == 1, name)?;
            require(&mut rec, "object is initial", *object < c.n_objects() && c.is_initial(*object), name)?;
        }
    }
    Ok(rec)
}

/// A machine-checked zigzag of links, each inducing a homotopy
/// equivalence of nerves.
#[derive(Debug, Clone)]
pub struct EquivalenceCertificate {
    pub links: Vec<Link>,
    pub checks: Vec<Vec<CheckRecord>>,
    pub metadata: BTreeMap<String, String>,
}

/// Validates every link and the joins between consecutive links.
pub fn equivalence_from_zigzag(links: Vec<Link>) -> Result<EquivalenceCertificate> {
    for w in links.windows(2) {
        if !Arc::ptr_eq(&w[0].right, &w[1].left) {
            return Err(Error::InvalidLink(format!(
                "{} ends at {} but {} starts at {}",
                w[0].name,
                w[0].right.name(),
                w[1].name,
                w[1].left.name()
            )));
        }
    }
    let checks = links.iter().map(check_link).collect::<Result<Vec<_>>>()?;
    Ok(EquivalenceCertificate { links, checks, metadata: BTreeMap::new() })
}

impl EquivalenceCertificate {
    /// The empty zigzag.
    pub fn identity() -> EquivalenceCertificate {
        EquivalenceCertificate { links: Vec::new(), checks: Vec::new(), metadata: BTreeMap::new() }
    }

    pub fn left(&self) -> Option<&Arc<FiniteCategory>> {
        self.links.first().map(|l| &l.left)
    }

    pub fn right(&self) -> Option<&Arc<FiniteCategory>> {
        self.links.last().map(|l| &l.right)
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    /// Concatenates certificates whose endpoints meet.
    pub fn then(self, next: EquivalenceCertificate) -> Result<EquivalenceCertificate> {
        let mut metadata = self.metadata;
        metadata.extend(next.metadata);
        let mut links = self.links;
        links.extend(next.links);
        let mut cert = equivalence_from_zigzag(links)?;
        cert.metadata = metadata;
        Ok(cert)
    }

    /// Re-runs every check.
    pub fn recheck(&self) -> Result<()> {
        equivalence_from_zigzag(self.links.clone()).map(|_| ())
    }

    pub fn is_valid(&self) -> bool {
        self.checks.len() == self.links.len() && self.checks.iter().flatten().all(|c| c.passed)
    }

    /// The cert-v1 document (without timestamp).
    pub fn to_json(&self) -> Value {
        let links: Vec<Value> = self
            .links
            .iter()
            .zip(&self.checks)
            .map(|(l, checks)| {
                let (functors, transformations): (Vec<&Functor>, Vec<&NaturalTransformation>) = match &l.kind {
                    LinkKind::Identity | LinkKind::InitialObject { .. } => (vec![], vec![]),
                    LinkKind::Isomorphism { forward, backward } => (vec![forward, backward], vec![]),
                    LinkKind::Retract { inclusion, retraction, transformation } => {
                        (vec![inclusion, retraction], vec![transformation])
                    }
                    LinkKind::Mutual { f, g, unit, counit } => (vec![f, g], vec![unit, counit]),
                };
                let mut v = json!({
                    "name": l.name,
                    "kind": l.kind.label(),
                    "left": category_json(&l.left),
                    "right": category_json(&l.right),
                    "functors": functors.iter().map(|f| json!({
                        "name": f.name,
                        "source": f.source.name(),
                        "target": f.target.name(),
                        "object_map": f.obj_map,
                        "morphism_map": f.mor_map,
                    })).collect::<Vec<_>>(),
                    "transformations": transformations.iter().map(|t| json!({
                        "name": t.name,
                        "from": t.from.name,
                        "to": t.to.name,
                        "components": t.components,
                    })).collect::<Vec<_>>(),
                    "checks": checks,
                    "notes": l.notes,
                });
                if let LinkKind::InitialObject { object } = l.kind {
                    v["initial_object"] = json!(object);
                }
                v
            })
            .collect();
        json!({
            "schema": "cert-v1",
            "valid": self.is_valid(),
            "left": self.left().map(|c| category_json(c)),
            "right": self.right().map(|c| category_json(c)),
            "links": links,
            "metadata": self.metadata,
        })
    }
}

fn category_json(c: &FiniteCategory) -> Value {
    json!({ "name": c.name(), "objects": c.n_objects(), "morphisms": c.n_morphisms() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Arc<FiniteCategory> {
        FiniteCategory::poset(format!("chain{n}"), n, |a, b| a <= b).into_arc()
    }

    #[test]
    fn empty_chain_is_identity() {
        let cert = equivalence_from_zigzag(vec![]).unwrap();
        assert!(cert.is_valid());
        assert!(cert.left().is_none());
        assert_eq!(cert.to_json()["schema"], "cert-v1");
    }

    #[test]
    fn poset_onto_initial_object() {
        let c = chain(3);
        let cert = equivalence_from_zigzag(vec![Link::initial_object("bottom", &c, 0)]).unwrap();
        assert!(cert.is_valid());
        assert!(equivalence_from_zigzag(vec![Link::initial_object("middle", &c, 1)]).is_err());
    }

    #[test]
    fn retract_onto_top() {
        // the top of a chain, with i∘r ⇒ Id replaced by Id ⇒ i∘r
        let c = chain(3);
        let pt = FiniteCategory::point().into_arc();
        let i = Functor::new("i", &pt, &c, vec![2], vec![c.identity(2)]).unwrap();
        let r = Functor::new("r", &c, &pt, vec![0; 3], vec![0; c.n_morphisms()]).unwrap();
        let ir = i.after(&r).unwrap();
        let comps = (0..3).map(|o| c.hom(o, 2)[0]).collect();
        let eta = NaturalTransformation { name: "to top".into(), from: Functor::identity(&c), to: ir, components: comps };
        let link = Link::new("retract", &c, &pt, LinkKind::Retract { inclusion: i, retraction: r, transformation: eta });
        let cert = equivalence_from_zigzag(vec![link]).unwrap();
        assert!(cert.is_valid());
        let js = cert.to_json();
        assert_eq!(js["links"][0]["kind"], "retract");
    }

    #[test]
    fn broken_links_are_rejected() {
        let c = chain(2);
        let d = chain(2);
        assert!(matches!(
            equivalence_from_zigzag(vec![Link::new("x", &c, &d, LinkKind::Identity)]),
            Err(Error::InvalidLink(_))
        ));
        let a = Link::identity("a", &c);
        let b = Link::identity("b", &d);
        assert!(equivalence_from_zigzag(vec![a, b]).is_err());
        // swapping the two objects is not a functor on a chain
        let bad = Functor::new("swap", &c, &c, vec![1, 0], vec![c.identity(1), c.identity(0), c.hom(0, 1)[0]]);
        if let Ok(bad) = bad {
            let link = Link::new("iso", &c, &c, LinkKind::Isomorphism { forward: bad.clone(), backward: bad });
            assert!(equivalence_from_zigzag(vec![link]).is_err());
        }
    }
}
