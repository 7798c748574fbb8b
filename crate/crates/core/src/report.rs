//! JSON reports. Schemas: `fusion-v1`, `linking-v1`, `theorem-v1` and
//! `homology-v1`; certificates serialize themselves as `cert-v1`.
//!
//! Every report is a pure function of its input. A timestamp is added only
//! by [`stamp`], so reports compare byte for byte without it.

use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::catkit::HomologyGroup;
use crate::error::Result;
use crate::fusion::{check_saturation, classify, FusionSystem};
use crate::linking::{check_linking_axioms, LinkingSystem};
use crate::prune::{classify_report, StepCertificate, TheoremCertificate, COLLECTION_HYPOTHESIS};

pub const FUSION_SCHEMA: &str = "fusion-v1";
pub const LINKING_SCHEMA: &str = "linking-v1";
pub const THEOREM_SCHEMA: &str = "theorem-v1";
pub const HOMOLOGY_SCHEMA: &str = "homology-v1";

/// Adds `generated_unix` (seconds) to a report object.
pub fn stamp(report: &mut Value) {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    if let Some(obj) = report.as_object_mut() {
        obj.insert("generated_unix".into(), json!(secs));
    }
}

fn header(f: &FusionSystem, schema: &str) -> Value {
    json!({
        "schema": schema,
        "prime": f.prime(),
        "group_order": f.group().order(),
        "sylow": f.s().elements(),
    })
}

/// One classification record per subgroup of `S`, indexed by lattice id,
/// followed by one row per F-class.
pub fn fusion_report(f: &FusionSystem) -> Result<Value> {
    let mut v = header(f, FUSION_SCHEMA);
    v["subgroups"] = json!(classify(f)?);
    v["classes"] = json!(classify_report(f)?);
    Ok(v)
}

/// Objects, nonempty hom-set cardinalities and the axiom reports.
pub fn linking_report(l: &LinkingSystem) -> Result<Value> {
    let f = l.fusion();
    let mut v = header(f, LINKING_SCHEMA);
    let objects: Vec<Value> = (0..l.n_objects())
        .map(|o| {
            json!({
                "object": o,
                "subgroup_id": l.object_subgroup_id(o),
                "order": l.object_subgroup(o).order(),
            })
        })
        .collect();
    let mut homs = Vec::new();
    for a in 0..l.n_objects() {
        for b in 0..l.n_objects() {
            let n = l.hom(a, b).len();
            if n > 0 {
                homs.push(json!([a, b, n]));
            }
        }
    }
    v["objects"] = json!(objects);
    v["morphisms"] = json!(l.n_morphisms());
    v["hom_cardinalities"] = json!(homs);
    let sat = check_saturation(f)?;
    let ax = check_linking_axioms(l);
    v["saturation"] = json!(sat);
    v["axioms"] = json!(ax);
    v["valid"] = json!(sat.is_saturated() && ax.ok());
    Ok(v)
}

fn step_json(s: &StepCertificate) -> Value {
    json!({
        "step": s.step,
        "representative": s.representative.elements(),
        "p_tilde": s.p_tilde.elements(),
        "under_objects": s.under_objects,
        "initial_object": s.initial_object,
        "op_identification": s.op,
        "retraction_checks": s.retraction_checks,
        "lemma_checks": s.lemma_checks,
        "homology": s.homology,
        "certificate": s.certificate.to_json(),
        "valid": s.is_valid(),
    })
}

pub fn theorem_report(c: &TheoremCertificate) -> Value {
    let b = &c.bullet;
    json!({
        "schema": THEOREM_SCHEMA,
        "prime": c.prime,
        "group_order": c.group_order,
        "sylow": c.s.elements(),
        "hypothesis": COLLECTION_HYPOTHESIS,
        "collection": c.collection.iter().map(|h| h.elements()).collect::<Vec<_>>(),
        "bullet": {
            "oracle": b.oracle,
            "identity": b.is_identity(),
            "validation": b.validation,
            "object_map": b.object_map,
            "certificate": b.certificate.to_json(),
            "collection_certificate": b.h_certificate.to_json(),
        },
        "sequence": {
            "collection": c.sequence.collection,
            "steps": c.sequence.steps,
            "level_objects": c.sequence.objects.iter().map(Vec::len).collect::<Vec<_>>(),
        },
        "steps": c.steps.iter().map(step_json).collect::<Vec<_>>(),
        "homology": c.homology,
        "metadata": c.metadata,
        "valid": c.is_valid(),
        "first_failure": c.first_failure(),
    })
}

/// Homology of named nerves through `dmax`.
pub fn homology_report(prime: u64, dmax: usize, nerves: &[(String, Vec<HomologyGroup>)]) -> Value {
    let equal = nerves.windows(2).all(|w| w[0].1 == w[1].1);
    json!({
        "schema": HOMOLOGY_SCHEMA,
        "prime": prime,
        "dmax": dmax,
        "nerves": nerves.iter().map(|(n, h)| json!({ "name": n, "homology": h })).collect::<Vec<_>>(),
        "equal": equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::tests::s4_fusion;
    use crate::linking::tests::s4_linking;

    #[test]
    fn fusion_report_lists_every_subgroup() {
        let f = s4_fusion();
        let v = fusion_report(&f).unwrap();
        assert_eq!(v["schema"], FUSION_SCHEMA);
        assert_eq!(v["subgroups"].as_array().unwrap().len(), f.n_subgroups());
        let cr = v["classes"].as_array().unwrap().iter().filter(|r| r["centric"] == true && r["radical"] == true).count();
        assert_eq!(cr, 2);
        assert!(v.get("generated_unix").is_none());
    }

    #[test]
    fn linking_report_counts_morphisms() {
        let l = s4_linking();
        let v = linking_report(&l).unwrap();
        let total: u64 = v["hom_cardinalities"].as_array().unwrap().iter().map(|t| t[2].as_u64().unwrap()).sum();
        assert_eq!(total as usize, l.n_morphisms());
        assert_eq!(v["valid"], true);
    }

    #[test]
    fn stamping_adds_one_field() {
        let mut v = json!({ "schema": "x" });
        stamp(&mut v);
        assert_eq!(v.as_object().unwrap().len(), 2);
    }
}
