use std::collections::HashSet;

use super::{generate_subgroup, Elem, FiniteGroup, GroupMono, Subgroup};
use crate::config::Caps;
use crate::error::{Error, Result};

/// An automorphism of a subgroup, tagged inner or outer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    pub map: GroupMono,
    pub inner: bool,
}

/// A short generating set: repeatedly add the element of largest order
/// (least index on ties) not yet in the span.
pub(crate) fn small_generating_set(g: &FiniteGroup, p: &Subgroup) -> Vec<Elem> {
    let mut by_order: Vec<Elem> = p.elements().to_vec();
    by_order.sort_by_key(|&x| (std::cmp::Reverse(g.elem_order(x)), x));
    let mut gens = Vec::new();
    let mut span = g.trivial_subgroup();
    for x in by_order {
        if span.order() == p.order() {
            break;
        }
        if !span.contains(x) {
            gens.push(x);
            span = generate_subgroup(g, &gens);
        }
    }
    gens
}

/// Spanning tree of `⟨gens⟩`: each entry is (element, parent position, generator index),
/// with the identity first.
fn word_tree(g: &FiniteGroup, gens: &[Elem]) -> Vec<(Elem, usize, usize)> {
    let mut seen = HashSet::from([g.identity()]);
    let mut out = vec![(g.identity(), 0, 0)];
    let mut head = 0;
    while head < out.len() {
        let x = out[head].0;
        for (j, &s) in gens.iter().enumerate() {
            let y = g.mul(x, s);
            if seen.insert(y) {
                out.push((y, head, j));
            }
        }
        head += 1;
    }
    out
}

/// Extends generator images along a word tree, then checks the
/// homomorphism property `f(x·s) = f(x)·f(s)` and injectivity.
fn extend_images(g: &FiniteGroup, tree: &[(Elem, usize, usize)], gens: &[Elem], images: &[Elem]) -> Option<Vec<(Elem, Elem)>> {
    let mut f: Vec<Elem> = Vec::with_capacity(tree.len());
    for (i, &(_, parent, j)) in tree.iter().enumerate() {
        f.push(if i == 0 { g.identity() } else { g.mul(f[parent], images[j]) });
    }
    let pairs: Vec<(Elem, Elem)> = tree.iter().map(|t| t.0).zip(f.iter().copied()).collect();
    let mut lookup: Vec<(Elem, Elem)> = pairs.clone();
    lookup.sort_unstable();
    let fx = |x: Elem| lookup.binary_search_by_key(&x, |t| t.0).ok().map(|i| lookup[i].1);
    for &(x, y) in &pairs {
        for (j, &s) in gens.iter().enumerate() {
            if fx(g.mul(x, s))? != g.mul(y, images[j]) {
                return None;
            }
        }
    }
    let distinct: HashSet<Elem> = f.iter().copied().collect();
    (distinct.len() == f.len()).then_some(lookup)
}

/// Every automorphism of `p`, sorted by image list, with inner ones flagged.
pub fn automorphism_group(g: &FiniteGroup, p: &Subgroup, caps: &Caps) -> Result<Vec<Automorphism>> {
    if p.order() > caps.aut {
        return Err(Error::AutCapExceeded { order: p.order(), cap: caps.aut });
    }
    let gens = small_generating_set(g, p);
    let trees: Vec<Vec<(Elem, usize, usize)>> = (0..=gens.len()).map(|k| word_tree(g, &gens[..k])).collect();
    let mut found = Vec::new();
    let mut images = Vec::new();
    search(g, p, &gens, &trees, &mut images, &mut found);
    let inner: HashSet<Vec<Elem>> = p
        .elements()
        .iter()
        .map(|&x| p.elements().iter().map(|&y| g.conj(x, y)).collect())
        .collect();
    let mut out: Vec<Automorphism> = found
        .into_iter()
        .map(|imgs| {
            let inner = inner.contains(&imgs);
            Automorphism { map: GroupMono::new(p.clone(), p.clone(), imgs), inner }
        })
        .collect();
    out.sort_by(|a, b| a.map.images.cmp(&b.map.images));
    Ok(out)
}

fn search(
    g: &FiniteGroup,
    p: &Subgroup,
    gens: &[Elem],
    trees: &[Vec<(Elem, usize, usize)>],
    images: &mut Vec<Elem>,
    found: &mut Vec<Vec<Elem>>,
) {
    let k = images.len();
    if k == gens.len() {
        let table = extend_images(g, &trees[k], gens, images).expect("checked at previous level");
        if table.len() == p.order() {
            found.push(table.into_iter().map(|(_, y)| y).collect());
        }
        return;
    }
    let want = g.elem_order(gens[k]);
    for &y in p.elements() {
        if g.elem_order(y) != want {
            continue;
        }
        images.push(y);
        if extend_images(g, &trees[k + 1], &gens[..k + 1], images).is_some() {
            search(g, p, gens, trees, images, found);
        }
        images.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::tests::perms;

    fn count(gens: &[&str]) -> (usize, usize) {
        let g = perms(gens);
        let auts = automorphism_group(&g, &g.whole(), &Caps::default()).unwrap();
        for a in &auts {
            assert!(a.map.is_injective_hom(&g));
        }
        (auts.len(), auts.iter().filter(|a| a.inner).count())
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(count(&["(1 2 3 4)"]), (2, 1));
        assert_eq!(count(&["(1 2)(3 4)", "(1 3)(2 4)"]), (6, 1));
        assert_eq!(count(&[]), (1, 1));
        assert_eq!(count(&["(1 2 3 4)", "(1 3)"]), (8, 4));
        // Q8 as a regular permutation group
        assert_eq!(count(&["(1 2 4 7)(3 6 8 5)", "(1 3 4 8)(2 5 7 6)"]), (24, 4));
        // S3 is complete
        assert_eq!(count(&["(1 2)", "(1 2 3)"]), (6, 6));
    }

    #[test]
    fn automorphisms_form_a_group() {
        let g = perms(&["(1 2 3 4)", "(1 3)"]);
        let auts = automorphism_group(&g, &g.whole(), &Caps::default()).unwrap();
        let maps: HashSet<GroupMono> = auts.iter().map(|a| a.map.clone()).collect();
        for a in &auts {
            for b in &auts {
                assert!(maps.contains(&a.map.after(&b.map)));
            }
        }
    }

    #[test]
    fn aut_cap() {
        let g = perms(&["(1 2 3 4)", "(1 3)"]);
        let caps = Caps { aut: 4, ..Caps::default() };
        assert_eq!(
            automorphism_group(&g, &g.whole(), &caps).unwrap_err(),
            Error::AutCapExceeded { order: 8, cap: 4 }
        );
    }
}
