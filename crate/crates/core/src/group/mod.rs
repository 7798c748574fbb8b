//! Exact finite group arithmetic on dense element indices.
//!
//! A [`FiniteGroup`] numbers its elements `0..order`. Groups up to
//! [`TABLE_LIMIT`](crate::config::TABLE_LIMIT) carry a full multiplication
//! table; larger ones multiply through their generating representation.

mod aut;
mod io;
mod lattice;
mod ops;
mod perm;

pub use aut::{automorphism_group, Automorphism};
pub use io::{group_from_json, GroupSpec};
pub use lattice::{generate_subgroup, subgroup_lattice, SubgroupLattice};
pub use ops::{big_o_p, center, centralizer, centralizer_in, is_normal_in, normalizer, normalizer_in, pow, sylow_p, transporter};
pub use perm::Perm;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::{Caps, TABLE_LIMIT};
use crate::error::{Error, Result};

/// Index of a group element.
pub type Elem = u32;

/// Where a group's multiplication came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Table,
    Permutations { degree: usize, generators: Vec<Perm> },
    Tower { p: u64, rank: usize, level: usize },
    Quotient,
}

type MulFn = dyn Fn(Elem, Elem) -> Elem + Send + Sync;

#[derive(Clone)]
enum Repr {
    Table(Arc<[Elem]>),
    Func(Arc<MulFn>),
}

/// A finite group with elements `0..order`.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    identity: Elem,
    inverse: Vec<Elem>,
    elem_order: Vec<u32>,
    repr: Repr,
    provenance: Provenance,
    perms: Option<Arc<[Perm]>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl FiniteGroup {
    /// Builds a group from a full table (`table[i][j]` = index of `g_i·g_j`),
    /// checking every group axiom.
    pub fn from_table(rows: &[Vec<Elem>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty multiplication table".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("multiplication table is not square".into()));
        }
        if rows.iter().flatten().any(|&x| x as usize >= n) {
            return Err(Error::InvalidInput("table entry out of range".into()));
        }
        let flat: Vec<Elem> = rows.iter().flatten().copied().collect();
        let identity = (0..n)
            .find(|&e| (0..n).all(|j| flat[e * n + j] as usize == j && flat[j * n + e] as usize == j))
            .ok_or_else(|| Error::InvalidInput("no two-sided identity".into()))? as Elem;
        for a in 0..n {
            for b in 0..n {
                let ab = flat[a * n + b] as usize;
                for c in 0..n {
                    if flat[ab * n + c] != flat[a * n + flat[b * n + c] as usize] {
                        return Err(Error::InvalidInput(format!(
                            "multiplication is not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| flat[a * n + b] == identity && flat[b * n + a] == identity)
                .ok_or_else(|| Error::InvalidInput(format!("element {a} has no inverse")))?;
            inverse[a] = inv as Elem;
        }
        Ok(Self::assemble(n, identity, inverse, Repr::Table(flat.into()), Provenance::Table, None))
    }

    /// Builds a group from a multiplication closure that is already known
    /// to satisfy the axioms (used for towers and quotients).
    pub(crate) fn from_fn(
        order: usize,
        identity: Elem,
        mul: Arc<MulFn>,
        provenance: Provenance,
    ) -> Self {
        let mut inverse = vec![Elem::MAX; order];
        for a in 0..order as Elem {
            if inverse[a as usize] != Elem::MAX {
                continue;
            }
            // walk powers of a to find its inverse
            let mut x = a;
            loop {
                let next = mul(x, a);
                if next == identity {
                    inverse[a as usize] = x;
                    inverse[x as usize] = a;
                    break;
                }
                x = next;
            }
        }
        let repr = if order <= TABLE_LIMIT {
            let mut flat = Vec::with_capacity(order * order);
            for a in 0..order as Elem {
                for b in 0..order as Elem {
                    flat.push(mul(a, b));
                }
            }
            Repr::Table(flat.into())
        } else {
            Repr::Func(mul)
        };
        Self::assemble(order, identity, inverse, repr, provenance, None)
    }

    fn assemble(
        order: usize,
        identity: Elem,
        inverse: Vec<Elem>,
        repr: Repr,
        provenance: Provenance,
        perms: Option<Arc<[Perm]>>,
    ) -> Self {
        let mut g = FiniteGroup {
            order,
            identity,
            inverse,
            elem_order: Vec::new(),
            repr,
            provenance,
            perms,
        };
        g.elem_order = (0..order as Elem)
            .map(|a| {
                let mut k = 1;
                let mut x = a;
                while x != identity {
                    x = g.mul(x, a);
                    k += 1;
                }
                k
            })
            .collect();
        g
    }

    /// The group generated by permutations of a common point set, indexed
    /// by breadth-first closure from the identity with generators in input
    /// order.
    pub fn from_permutations(generators: &[Perm], caps: &Caps) -> Result<Self> {
        let degree = generators.iter().map(Perm::degree).max().unwrap_or(0);
        let gens: Vec<Perm> = generators.iter().map(|g| g.extended(degree)).collect();
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index: HashMap<Perm, Elem> = HashMap::from([(id, 0)]);
        let mut head = 0;
        while head < elements.len() {
            for g in &gens {
                let next = elements[head].compose(g);
                if !index.contains_key(&next) {
                    if elements.len() >= caps.order {
                        return Err(Error::OrderCapExceeded { cap: caps.order });
                    }
                    index.insert(next.clone(), elements.len() as Elem);
                    elements.push(next);
                }
            }
            head += 1;
        }
        let n = elements.len();
        let inverse: Vec<Elem> = elements.iter().map(|x| index[&x.inverse()]).collect();
        let provenance = Provenance::Permutations { degree, generators: gens };
        let repr = if n <= TABLE_LIMIT {
            let mut flat = Vec::with_capacity(n * n);
            for a in &elements {
                for b in &elements {
                    flat.push(index[&a.compose(b)]);
                }
            }
            Repr::Table(flat.into())
        } else {
            let elems: Arc<[Perm]> = elements.clone().into();
            let index = Arc::new(index);
            Repr::Func(Arc::new(move |a, b| index[&elems[a as usize].compose(&elems[b as usize])]))
        };
        Ok(Self::assemble(n, 0, inverse, repr, provenance, Some(elements.into())))
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        Self::from_table(&[vec![0]]).expect("trivial table is valid")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.repr {
            Repr::Table(t) => t[a as usize * self.order + b as usize],
            Repr::Func(f) => f(a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverse[a as usize]
    }

    /// `g·x·g⁻¹`.
    #[inline]
    pub fn conj(&self, g: Elem, x: Elem) -> Elem {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn elem_order(&self, a: Elem) -> u32 {
        self.elem_order[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order as Elem
    }

    /// The permutation behind an element, when built from permutations.
    pub fn permutation(&self, a: Elem) -> Option<&Perm> {
        self.perms.as_ref().map(|p| &p[a as usize])
    }

    /// Looks an element up by its permutation.
    pub fn element_of_permutation(&self, perm: &Perm) -> Option<Elem> {
        let perms = self.perms.as_ref()?;
        let degree = perms.first().map(Perm::degree).unwrap_or(0);
        if perm.degree() > degree {
            return None;
        }
        let perm = perm.extended(degree);
        perms.iter().position(|p| *p == perm).map(|i| i as Elem)
    }

    /// The whole group as a subgroup of itself.
    pub fn whole(&self) -> Subgroup {
        Subgroup::from_sorted((0..self.order as Elem).collect())
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted(vec![self.identity])
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Dense multiplication table, materialized on demand.
    pub fn table(&self) -> Vec<Vec<Elem>> {
        (0..self.order as Elem)
            .map(|a| (0..self.order as Elem).map(|b| self.mul(a, b)).collect())
            .collect()
    }
}

/// A subgroup, stored as the sorted list of its element indices in the
/// parent group. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: Arc<[Elem]>,
}

impl Subgroup {
    /// Wraps an already sorted, deduplicated element list.
    pub fn from_sorted(elements: Vec<Elem>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        Subgroup { elements: elements.into() }
    }

    pub fn from_unsorted(mut elements: Vec<Elem>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        Self::from_sorted(elements)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Position of an element in the sorted list.
    #[inline]
    pub fn position(&self, x: Elem) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.order() <= other.order() && self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Subgroup::from_sorted(self.elements.iter().copied().filter(|&x| other.contains(x)).collect())
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// Checks closure under products and inverses inside `g`.
    pub fn is_subgroup_of_group(&self, g: &FiniteGroup) -> bool {
        !self.elements.is_empty()
            && self.elements.iter().all(|&x| (x as usize) < g.order())
            && self.contains(g.identity())
            && self.elements.iter().all(|&a| {
                self.contains(g.inv(a)) && self.elements.iter().all(|&b| self.contains(g.mul(a, b)))
            })
    }

    /// `g·H·g⁻¹`.
    pub fn conjugate(&self, group: &FiniteGroup, g: Elem) -> Subgroup {
        Subgroup::from_unsorted(self.elements.iter().map(|&x| group.conj(g, x)).collect())
    }

    /// The product set `H·K`, which is a subgroup when one normalizes the other.
    pub fn product(&self, other: &Subgroup, group: &FiniteGroup) -> Subgroup {
        let mut v = Vec::with_capacity(self.order() * other.order());
        for &a in self.elements.iter() {
            for &b in other.elements() {
                v.push(group.mul(a, b));
            }
        }
        Subgroup::from_unsorted(v)
    }

    /// Size in the lexicographic order on (rank, component order).
    pub fn size(&self) -> SizePair {
        SizePair::finite(self.order() as u64)
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by order, then lexicographically by element list.
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.elements.cmp(&other.elements))
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", &*self.elements)
    }
}

/// An injective homomorphism between subgroups of a common group, stored
/// as the images of the source's sorted elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupMono {
    pub source: Subgroup,
    pub target: Subgroup,
    pub images: Vec<Elem>,
}

impl GroupMono {
    pub fn new(source: Subgroup, target: Subgroup, images: Vec<Elem>) -> Self {
        GroupMono { source, target, images }
    }

    pub fn identity(sub: &Subgroup) -> Self {
        Self::inclusion(sub, sub)
    }

    pub fn inclusion(source: &Subgroup, target: &Subgroup) -> Self {
        GroupMono::new(source.clone(), target.clone(), source.elements().to_vec())
    }

    /// Conjugation `x ↦ gxg⁻¹` from `source` into `target`.
    pub fn conjugation(group: &FiniteGroup, g: Elem, source: &Subgroup, target: &Subgroup) -> Self {
        let images = source.elements().iter().map(|&x| group.conj(g, x)).collect();
        GroupMono::new(source.clone(), target.clone(), images)
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.images[self.source.position(x).expect("element outside morphism source")]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &GroupMono) -> GroupMono {
        GroupMono::new(
            first.source.clone(),
            self.target.clone(),
            first.images.iter().map(|&y| self.apply(y)).collect(),
        )
    }

    pub fn image(&self) -> Subgroup {
        Subgroup::from_unsorted(self.images.clone())
    }

    /// Restriction to a subgroup of the source.
    pub fn restrict(&self, sub: &Subgroup) -> GroupMono {
        GroupMono::new(sub.clone(), self.target.clone(), sub.elements().iter().map(|&x| self.apply(x)).collect())
    }

    /// Same map with a different target.
    pub fn with_target(&self, target: &Subgroup) -> GroupMono {
        GroupMono::new(self.source.clone(), target.clone(), self.images.clone())
    }

    /// The inverse of the corestriction onto the image.
    pub fn inverse(&self) -> GroupMono {
        let image = self.image();
        let mut images = vec![0; image.order()];
        for (i, &y) in self.images.iter().enumerate() {
            images[image.position(y).unwrap()] = self.source.elements()[i];
        }
        GroupMono::new(image, self.source.clone(), images)
    }

    pub fn is_injective_hom(&self, group: &FiniteGroup) -> bool {
        let src = self.source.elements();
        if self.images.len() != src.len() || !self.images.iter().all(|&y| self.target.contains(y)) {
            return false;
        }
        let mut sorted = self.images.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != src.len() {
            return false;
        }
        src.iter().enumerate().all(|(i, &a)| {
            src.iter()
                .enumerate()
                .all(|(j, &b)| self.apply(group.mul(a, b)) == group.mul(self.images[i], self.images[j]))
        })
    }

    pub fn is_identity_map(&self) -> bool {
        self.images.as_slice() == self.source.elements()
    }
}

/// Size of a discrete p-toral group: (rank, order of the component group),
/// compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SizePair {
    pub rank: u32,
    pub component_order: u64,
}

impl SizePair {
    pub fn new(rank: u32, component_order: u64) -> Self {
        SizePair { rank, component_order }
    }

    pub fn finite(order: u64) -> Self {
        SizePair { rank: 0, component_order: order }
    }
}

/// Largest power of `p` dividing `n`.
pub fn p_part(n: u64, p: u64) -> u64 {
    let mut n = n;
    let mut out = 1;
    while n.is_multiple_of(p) {
        n /= p;
        out *= p;
    }
    out
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub fn is_p_power(n: u64, p: u64) -> bool {
    p_part(n, p) == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn perms(gens: &[&str]) -> FiniteGroup {
        let gens: Vec<Perm> = gens.iter().map(|g| Perm::parse_cycles(g).unwrap()).collect();
        FiniteGroup::from_permutations(&gens, &Caps::default()).unwrap()
    }

    #[test]
    fn symmetric_group_closure() {
        let s4 = perms(&["(1 2)", "(1 2 3 4)"]);
        assert_eq!(s4.order(), 24);
        let d8 = perms(&["(1 2 3 4)", "(1 3)"]);
        assert_eq!(d8.order(), 8);
        assert_eq!(FiniteGroup::from_permutations(&[], &Caps::default()).unwrap().order(), 1);
    }

    #[test]
    fn order_cap_is_an_error() {
        let caps = Caps { order: 10, ..Caps::default() };
        let gens = [Perm::parse_cycles("(1 2)").unwrap(), Perm::parse_cycles("(1 2 3 4)").unwrap()];
        assert_eq!(
            FiniteGroup::from_permutations(&gens, &caps).unwrap_err(),
            Error::OrderCapExceeded { cap: 10 }
        );
    }

    #[test]
    fn table_agrees_with_permutation_composition() {
        let s4 = perms(&["(1 2)", "(1 2 3 4)"]);
        for a in s4.elements() {
            for b in s4.elements() {
                let pa = s4.permutation(a).unwrap();
                let pb = s4.permutation(b).unwrap();
                assert_eq!(s4.permutation(s4.mul(a, b)).unwrap(), &pa.compose(pb));
            }
        }
    }

    #[test]
    fn table_round_trip_and_axiom_checks() {
        let d8 = perms(&["(1 2 3 4)", "(1 3)"]);
        let t = FiniteGroup::from_table(&d8.table()).unwrap();
        assert_eq!(t.order(), 8);
        assert!(FiniteGroup::from_table(&[vec![0, 0], vec![0, 0]]).is_err());
        assert!(FiniteGroup::from_table(&[vec![0, 1]]).is_err());
    }

    #[test]
    fn large_groups_multiply_without_table() {
        // S7 has order 5040 > TABLE_LIMIT
        let s7 = perms(&["(1 2)", "(1 2 3 4 5 6 7)"]);
        assert_eq!(s7.order(), 5040);
        let a = 17;
        assert_eq!(s7.mul(a, s7.inv(a)), s7.identity());
    }

    #[test]
    fn mono_composition_and_inverse() {
        let d8 = perms(&["(1 2 3 4)", "(1 3)"]);
        let g = d8.whole();
        let c = GroupMono::conjugation(&d8, 1, &g, &g);
        assert!(c.is_injective_hom(&d8));
        let id = c.after(&c.inverse());
        assert!(id.is_identity_map());
    }

    proptest! {
        #[test]
        fn size_pair_order_is_lexicographic(a in 0u32..3, b in 1u64..50, c in 0u32..3, d in 1u64..50) {
            let x = SizePair::new(a, b);
            let y = SizePair::new(c, d);
            prop_assert_eq!(x <= y, a < c || (a == c && b <= d));
            prop_assert_eq!(SizePair::finite(b) <= SizePair::finite(d), b <= d);
        }

        #[test]
        fn mono_composition_is_associative(i in 0u32..24, j in 0u32..24, k in 0u32..24) {
            let s4 = perms(&["(1 2)", "(1 2 3 4)"]);
            let g = s4.whole();
            let (a, b, c) = (
                GroupMono::conjugation(&s4, i, &g, &g),
                GroupMono::conjugation(&s4, j, &g, &g),
                GroupMono::conjugation(&s4, k, &g, &g),
            );
            prop_assert_eq!(a.after(&b).after(&c), a.after(&b.after(&c)));
            prop_assert!(a.after(&b).is_injective_hom(&s4));
            prop_assert_eq!(a.after(&GroupMono::identity(&g)), a.clone());
        }
    }
}
