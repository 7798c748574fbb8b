use serde::{Deserialize, Serialize};

use super::{Elem, FiniteGroup, Perm};
use crate::config::Caps;
use crate::error::{Error, Result};

/// JSON group description: exactly one of a multiplication table or a list
/// of permutation generators in 1-based cycle notation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<Elem>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutations: Option<Vec<String>>,
}

impl GroupSpec {
    pub fn build(&self, caps: &Caps) -> Result<FiniteGroup> {
        match (&self.table, &self.permutations) {
            (Some(t), None) => {
                if t.len() > caps.order {
                    return Err(Error::OrderCapExceeded { cap: caps.order });
                }
                FiniteGroup::from_table(t)
            }
            (None, Some(gens)) => {
                let gens = gens.iter().map(|s| Perm::parse_cycles(s)).collect::<Result<Vec<_>>>()?;
                FiniteGroup::from_permutations(&gens, caps)
            }
            _ => Err(Error::InvalidInput(
                "group JSON needs exactly one of \"table\" or \"permutations\"".into(),
            )),
        }
    }
}

/// Parses and builds a group from its JSON description.
pub fn group_from_json(text: &str, caps: &Caps) -> Result<FiniteGroup> {
    let spec: GroupSpec =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("group JSON: {e}")))?;
    spec.build(caps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_forms() {
        let caps = Caps::default();
        let g = group_from_json(r#"{"permutations": ["(1 2)", "(1 2 3 4)"]}"#, &caps).unwrap();
        assert_eq!(g.order(), 24);
        let c2 = group_from_json(r#"{"table": [[0,1],[1,0]]}"#, &caps).unwrap();
        assert_eq!(c2.order(), 2);
        let t = group_from_json(r#"{"permutations": []}"#, &caps).unwrap();
        assert_eq!(t.order(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        let caps = Caps::default();
        assert!(matches!(group_from_json("{", &caps), Err(Error::InvalidInput(_))));
        assert!(matches!(group_from_json("{}", &caps), Err(Error::InvalidInput(_))));
        assert!(matches!(
            group_from_json(r#"{"permutations": ["(1 2"]}"#, &caps),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            group_from_json(r#"{"table": [[0,1],[1,1]]}"#, &caps),
            Err(Error::InvalidInput(_))
        ));
    }
}
