use super::{p_part, Elem, FiniteGroup, Subgroup};

/// `N_H(P) = {h ∈ H : hPh⁻¹ = P}`.
pub fn normalizer_in(g: &FiniteGroup, h: &Subgroup, p: &Subgroup) -> Subgroup {
    transporter(g, h, p, p)
}

/// `N_G(P)` over the whole group.
pub fn normalizer(g: &FiniteGroup, p: &Subgroup) -> Subgroup {
    normalizer_in(g, &g.whole(), p)
}

/// `{h ∈ H : hPh⁻¹ ⊆ Q}`.
pub fn transporter(g: &FiniteGroup, h: &Subgroup, p: &Subgroup, q: &Subgroup) -> Subgroup {
    Subgroup::from_sorted(
        h.elements()
            .iter()
            .copied()
            .filter(|&x| p.elements().iter().all(|&y| q.contains(g.conj(x, y))))
            .collect(),
    )
}

/// `C_H(P)`.
pub fn centralizer_in(g: &FiniteGroup, h: &Subgroup, p: &Subgroup) -> Subgroup {
    Subgroup::from_sorted(
        h.elements()
            .iter()
            .copied()
            .filter(|&x| p.elements().iter().all(|&y| g.mul(x, y) == g.mul(y, x)))
            .collect(),
    )
}

pub fn centralizer(g: &FiniteGroup, p: &Subgroup) -> Subgroup {
    centralizer_in(g, &g.whole(), p)
}

/// `Z(P)`.
pub fn center(g: &FiniteGroup, p: &Subgroup) -> Subgroup {
    centralizer_in(g, p, p)
}

/// Whether `P ◁ H` (assumes `P ⊆ H`).
pub fn is_normal_in(g: &FiniteGroup, p: &Subgroup, h: &Subgroup) -> bool {
    h.elements()
        .iter()
        .all(|&x| p.elements().iter().all(|&y| p.contains(g.conj(x, y))))
}

/// The canonically least Sylow `p`-subgroup of `g`.
///
/// One Sylow subgroup is grown from the trivial group: while `P` is not
/// Sylow, `p` divides `|N(P)/P|`, so some `x ∈ N(P) \ P` has `x^p ∈ P`.
/// All Sylow subgroups are conjugate, so the least conjugate of the result
/// is the least Sylow subgroup.
pub fn sylow_p(g: &FiniteGroup, p: u64) -> Subgroup {
    let target = p_part(g.order() as u64, p) as usize;
    let mut cur = g.trivial_subgroup();
    while cur.order() < target {
        let n = normalizer(g, &cur);
        let x = n
            .elements()
            .iter()
            .copied()
            .find(|&x| !cur.contains(x) && cur.contains(pow(g, x, p)))
            .expect("a p-subgroup below Sylow order has a p-element in its normalizer quotient");
        let mut elems = Vec::with_capacity(cur.order() * p as usize);
        let mut xk = g.identity();
        for _ in 0..p {
            elems.extend(cur.elements().iter().map(|&y| g.mul(y, xk)));
            xk = g.mul(xk, x);
        }
        cur = Subgroup::from_unsorted(elems);
    }
    g.elements().map(|x| cur.conjugate(g, x)).min().unwrap_or(cur)
}

/// `O_p(G)`: the intersection of all Sylow `p`-subgroups.
pub fn big_o_p(g: &FiniteGroup, p: u64) -> Subgroup {
    let s = sylow_p(g, p);
    let mut out = s.clone();
    for x in g.elements() {
        if out.is_trivial() {
            break;
        }
        out = out.intersection(&s.conjugate(g, x));
    }
    debug_assert!(is_normal_in(g, &out, &g.whole()));
    out
}

pub fn pow(g: &FiniteGroup, x: Elem, k: u64) -> Elem {
    let mut acc = g.identity();
    for _ in 0..k {
        acc = g.mul(acc, x);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Caps;
    use crate::group::tests::perms;
    use crate::group::{is_p_power, subgroup_lattice};

    #[test]
    fn normalizer_and_centralizer_examples() {
        let d8 = perms(&["(1 2 3 4)", "(1 3)"]);
        let whole = d8.whole();
        assert_eq!(normalizer(&d8, &whole), whole);
        assert_eq!(centralizer(&d8, &whole), center(&d8, &whole));
        assert_eq!(center(&d8, &whole).order(), 2);
        let c4 = crate::group::generate_subgroup(&d8, &[1]);
        assert_eq!(c4.order(), 4);
        assert_eq!(normalizer(&d8, &c4), whole);
        let c8 = perms(&["(1 2 3 4 5 6 7 8)"]);
        let l = subgroup_lattice(&c8, &c8.whole(), &Caps::default()).unwrap();
        for s in l.subgroups() {
            assert_eq!(centralizer(&c8, s), c8.whole());
        }
    }

    #[test]
    fn sylow_examples() {
        let s4 = perms(&["(1 2)", "(1 2 3 4)"]);
        let s = sylow_p(&s4, 2);
        assert_eq!(s.order(), 8);
        assert!(s.is_subgroup_of_group(&s4));
        assert_eq!(sylow_p(&s4, 5), s4.trivial_subgroup());
        let d8 = perms(&["(1 2 3 4)", "(1 3)"]);
        assert_eq!(sylow_p(&d8, 2), d8.whole());
        // least among all Sylow subgroups in the lattice
        let l = subgroup_lattice(&s4, &s4.whole(), &Caps::default()).unwrap();
        let first = l.subgroups().iter().find(|h| h.order() == 8).unwrap();
        assert_eq!(&s, first);
    }

    #[test]
    fn op_examples() {
        let s3 = perms(&["(1 2)", "(1 2 3)"]);
        assert!(big_o_p(&s3, 2).is_trivial());
        assert_eq!(big_o_p(&s3, 3).order(), 3);
        let d8 = perms(&["(1 2 3 4)", "(1 3)"]);
        assert_eq!(big_o_p(&d8, 2), d8.whole());
        let s4 = perms(&["(1 2)", "(1 2 3 4)"]);
        let o2 = big_o_p(&s4, 2);
        assert_eq!(o2.order(), 4);
        assert!(o2.elements().iter().all(|&x| s4.elem_order(x) <= 2));
    }

    #[test]
    fn op_agrees_with_largest_normal_p_subgroup() {
        for gens in [&["(1 2)", "(1 2 3 4)"][..], &["(1 2 3)", "(3 4 5)"], &["(1 2)(3 4)", "(1 3)"]] {
            let g = perms(gens);
            let whole = g.whole();
            let l = subgroup_lattice(&g, &whole, &Caps::default()).unwrap();
            for p in [2, 3, 5] {
                let o = big_o_p(&g, p);
                let brute = l
                    .subgroups()
                    .iter()
                    .filter(|h| is_p_power(h.order() as u64, p) && is_normal_in(&g, h, &whole))
                    .max_by_key(|h| h.order())
                    .unwrap();
                assert_eq!(&o, brute);
                let syl: Vec<&Subgroup> =
                    l.subgroups().iter().filter(|h| h.order() as u64 == p_part(g.order() as u64, p)).collect();
                assert!(syl.iter().all(|s| o.is_subset_of(s)));
            }
        }
    }

    #[test]
    fn invariants_on_s4_lattice() {
        let s4 = perms(&["(1 2)", "(1 2 3 4)"]);
        let whole = s4.whole();
        let l = subgroup_lattice(&s4, &whole, &Caps::default()).unwrap();
        for p in l.subgroups() {
            assert!(p.is_subset_of(&normalizer(&s4, p)));
            assert_eq!(centralizer_in(&s4, &whole, p).intersection(p), center(&s4, p));
        }
    }
}
