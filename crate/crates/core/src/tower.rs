//! Discrete p-toral groups as towers of finite truncations.
//!
//! A tower over `π0` with an integral action on `ℤ^k` has levels
//! `S[n] = (ℤ/p^n)^k ⋊ π0`, embedded into each other by `v ↦ p·v`. The
//! union is `(ℤ/p^∞)^k ⋊ π0`. Everything here happens at a fixed level.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::fusion::{classify, fusion_from_group, FusionSystem};
use crate::group::{is_p_power, is_prime, pow, Elem, FiniteGroup, GroupMono, GroupSpec, Provenance, SizePair, Subgroup};

/// JSON tower description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    pub p: u64,
    pub rank: usize,
    pub pi0: GroupSpec,
    /// One `rank × rank` integer matrix per generator of `π0`.
    pub action: Vec<Vec<Vec<i64>>>,
    pub depth: usize,
    /// Generators of `π0` as element indices. Required for table input;
    /// permutation input defaults to its listed generators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Elem>>,
}

/// A reduced fraction `num/den` in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    fn reduced(num: u64, den: u64) -> Self {
        let g = gcd(num, den);
        Fraction { num: num / g, den: den / g }
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// A tower of finite truncations `S[0] ⊆ S[1] ⊆ … ⊆ S[depth]`.
#[derive(Clone)]
pub struct TowerGroup {
    p: u64,
    rank: usize,
    depth: usize,
    pi0: Arc<FiniteGroup>,
    /// `action[h]` is the matrix of `h`, row-major, reduced mod `p^depth`.
    action: Arc<Vec<Vec<u64>>>,
    levels: Vec<Arc<FiniteGroup>>,
}

impl fmt::Debug for TowerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TowerGroup")
            .field("p", &self.p)
            .field("rank", &self.rank)
            .field("depth", &self.depth)
            .field("pi0_order", &self.pi0.order())
            .finish()
    }
}

fn checked_pow(p: u64, e: usize) -> Result<u64> {
    p.checked_pow(e as u32).ok_or(Error::ArithmeticOverflow)
}

fn mat_mul(a: &[u64], b: &[u64], k: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; k * k];
    for i in 0..k {
        for j in 0..k {
            let mut s: u128 = 0;
            for t in 0..k {
                s += a[i * k + t] as u128 * b[t * k + j] as u128;
            }
            out[i * k + j] = (s % m as u128) as u64;
        }
    }
    out
}

fn mat_identity(k: usize) -> Vec<u64> {
    let mut out = vec![0; k * k];
    for i in 0..k {
        out[i * k + i] = 1;
    }
    out
}

/// Determinant mod a prime by Gaussian elimination.
fn det_mod_p(a: &[u64], k: usize, p: u64) -> u64 {
    let mut m: Vec<u64> = a.iter().map(|x| x % p).collect();
    let mut det = 1u64;
    for c in 0..k {
        let Some(r) = (c..k).find(|&r| m[r * k + c] != 0) else {
            return 0;
        };
        if r != c {
            for j in 0..k {
                m.swap(r * k + j, c * k + j);
            }
            det = (p - det) % p;
        }
        let piv = m[c * k + c];
        det = det * piv % p;
        let inv = pow_mod(piv, p - 2, p);
        for r in c + 1..k {
            let factor = m[r * k + c] * inv % p;
            for j in c..k {
                m[r * k + j] = (m[r * k + j] + p * p - factor * m[c * k + j] % p) % p;
            }
        }
    }
    det
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl TowerGroup {
    pub fn from_spec(spec: &TowerSpec, caps: &Caps) -> Result<Self> {
        let p = spec.p;
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let pi0 = spec.pi0.build(caps)?;
        if !is_p_power(pi0.order() as u64, p) {
            return Err(Error::InvalidInput(format!("π0 of order {} is not a {p}-group", pi0.order())));
        }
        let generators: Vec<Elem> = match (&spec.generators, pi0.provenance()) {
            (Some(g), _) => g.clone(),
            (None, Provenance::Permutations { generators, .. }) => generators
                .iter()
                .map(|g| pi0.element_of_permutation(g).expect("generator lies in its closure"))
                .collect(),
            (None, _) => {
                return Err(Error::InvalidInput("tower JSON with a table π0 needs \"generators\"".into()));
            }
        };
        if generators.iter().any(|&g| g as usize >= pi0.order()) {
            return Err(Error::InvalidInput("π0 generator index out of range".into()));
        }
        if spec.action.len() != generators.len() {
            return Err(Error::InvalidInput(format!(
                "{} action matrices for {} generators",
                spec.action.len(),
                generators.len()
            )));
        }
        let k = spec.rank;
        let modulus = checked_pow(p, spec.depth.max(1))?;
        let mut gen_mats = Vec::with_capacity(generators.len());
        for m in &spec.action {
            if m.len() != k || m.iter().any(|r| r.len() != k) {
                return Err(Error::InvalidInput(format!("action matrices must be {k}×{k}")));
            }
            let flat: Vec<u64> =
                m.iter().flatten().map(|&x| x.rem_euclid(modulus as i64) as u64).collect();
            if k > 0 && det_mod_p(&flat, k, p) == 0 {
                return Err(Error::InvalidInput("action matrix is not invertible mod p".into()));
            }
            gen_mats.push(flat);
        }
        // A(s·h) = A(s)A(h), by breadth-first search from the identity
        let n0 = pi0.order();
        let mut action: Vec<Option<Vec<u64>>> = vec![None; n0];
        action[pi0.identity() as usize] = Some(mat_identity(k));
        let mut queue = VecDeque::from([pi0.identity()]);
        while let Some(h) = queue.pop_front() {
            let ah = action[h as usize].clone().expect("visited");
            for (s, ms) in generators.iter().zip(&gen_mats) {
                let sh = pi0.mul(*s, h);
                if action[sh as usize].is_none() {
                    action[sh as usize] = Some(mat_mul(ms, &ah, k, modulus));
                    queue.push_back(sh);
                }
            }
        }
        if action.iter().any(Option::is_none) {
            return Err(Error::InvalidInput("generators do not generate π0".into()));
        }
        let action: Vec<Vec<u64>> = action.into_iter().map(Option::unwrap).collect();
        for h in pi0.elements() {
            for (s, ms) in generators.iter().zip(&gen_mats) {
                if action[pi0.mul(*s, h) as usize] != mat_mul(ms, &action[h as usize], k, modulus) {
                    return Err(Error::InvalidInput("action does not define a homomorphism π0 → GL_k".into()));
                }
            }
        }
        let top = checked_pow(p, spec.depth * k)?
            .checked_mul(n0 as u64)
            .ok_or(Error::ArithmeticOverflow)?;
        if top > caps.order as u64 {
            return Err(Error::OrderCapExceeded { cap: caps.order });
        }
        let mut tower = TowerGroup {
            p,
            rank: k,
            depth: spec.depth,
            pi0: Arc::new(pi0),
            action: Arc::new(action),
            levels: Vec::new(),
        };
        tower.levels = (0..=spec.depth).map(|n| Arc::new(tower.build_level(n))).collect();
        Ok(tower)
    }

    pub fn from_json(text: &str, caps: &Caps) -> Result<Self> {
        let spec: TowerSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("tower JSON: {e}")))?;
        Self::from_spec(&spec, caps)
    }

    fn build_level(&self, n: usize) -> FiniteGroup {
        let (p, k) = (self.p, self.rank);
        let q = p.pow(n as u32);
        let torus = q.pow(k as u32);
        let pi0 = self.pi0.clone();
        let action = self.action.clone();
        let order = torus as usize * pi0.order();
        let identity = (pi0.identity() as u64 * torus) as Elem;
        let mul = move |a: Elem, b: Elem| -> Elem {
            let (a, b) = (a as u64, b as u64);
            let (ha, hb) = (a / torus, b / torus);
            let (mut va, mut vb) = (a % torus, b % torus);
            let mut v = vec![0u64; k];
            let mut w = vec![0u64; k];
            for i in 0..k {
                v[i] = va % q;
                va /= q;
                w[i] = vb % q;
                vb /= q;
            }
            let m = &action[ha as usize];
            let mut out = 0u64;
            for i in (0..k).rev() {
                let mut s = v[i] as u128;
                for j in 0..k {
                    s += (m[i * k + j] % q) as u128 * w[j] as u128;
                }
                out = out * q + (s % q as u128) as u64;
            }
            (pi0.mul(ha as Elem, hb as Elem) as u64 * torus + out) as Elem
        };
        FiniteGroup::from_fn(order, identity, Arc::new(mul), Provenance::Tower { p, rank: k, level: n })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn component_group(&self) -> &Arc<FiniteGroup> {
        &self.pi0
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n > self.depth {
            Err(Error::DepthExceeded { requested: n, depth: self.depth })
        } else {
            Ok(())
        }
    }

    fn torus_size(&self, n: usize) -> u64 {
        self.p.pow((n * self.rank) as u32)
    }

    /// The finite group `S[n]`.
    pub fn truncate(&self, n: usize) -> Result<Arc<FiniteGroup>> {
        self.check_level(n)?;
        Ok(self.levels[n].clone())
    }

    /// The embedding `S[n] → S[n+1]`, `(v, h) ↦ (p·v, h)`.
    pub fn embed(&self, n: usize, x: Elem) -> Result<Elem> {
        self.check_level(n + 1)?;
        let (t, t1) = (self.torus_size(n), self.torus_size(n + 1));
        let q = self.p.pow(n as u32);
        let (h, mut v) = (x as u64 / t, x as u64 % t);
        let mut out = 0u64;
        let mut scale = 1u64;
        for _ in 0..self.rank {
            out += (v % q) * self.p * scale;
            scale *= q * self.p;
            v /= q;
        }
        Ok((h * t1 + out) as Elem)
    }

    /// The embedding `S[n] → S[m]` for `n ≤ m`.
    pub fn embed_into(&self, n: usize, m: usize, x: Elem) -> Result<Elem> {
        self.check_level(m)?;
        let mut x = x;
        for l in n..m {
            x = self.embed(l, x)?;
        }
        Ok(x)
    }

    pub fn embed_subgroup(&self, n: usize, sub: &Subgroup) -> Result<Subgroup> {
        let images = sub.elements().iter().map(|&x| self.embed(n, x)).collect::<Result<Vec<_>>>()?;
        Ok(Subgroup::from_unsorted(images))
    }

    /// Image of `x ∈ S[n]` in `π0`.
    pub fn project(&self, n: usize, x: Elem) -> Result<Elem> {
        self.check_level(n)?;
        Ok((x as u64 / self.torus_size(n)) as Elem)
    }

    /// The torus coordinates of `x ∈ S[n]` as reduced fractions mod 1.
    pub fn torus_coordinates(&self, n: usize, x: Elem) -> Result<Vec<Fraction>> {
        self.check_level(n)?;
        let q = self.p.pow(n as u32);
        let mut v = x as u64 % self.torus_size(n);
        let mut out = Vec::with_capacity(self.rank);
        for _ in 0..self.rank {
            out.push(Fraction::reduced(v % q, q));
            v /= q;
        }
        Ok(out)
    }

    /// The element of `S[n]` with the given torus coordinates and `π0` part.
    pub fn element(&self, n: usize, coords: &[Fraction], h: Elem) -> Result<Elem> {
        self.check_level(n)?;
        let q = self.p.pow(n as u32);
        if coords.len() != self.rank || h as usize >= self.pi0.order() {
            return Err(Error::InvalidInput("coordinates do not match the tower".into()));
        }
        let mut out = 0u64;
        for c in coords.iter().rev() {
            if c.den == 0 || !q.is_multiple_of(c.den) || c.num >= c.den {
                return Err(Error::InvalidInput(format!("{c} is not a level-{n} torus coordinate")));
            }
            out = out * q + c.num * (q / c.den);
        }
        Ok((h as u64 * self.torus_size(n) + out) as Elem)
    }

    /// The torus part `T[n] ≅ (ℤ/p^n)^k` of `S[n]`.
    pub fn torus_part(&self, n: usize) -> Result<Subgroup> {
        self.check_level(n)?;
        let t = self.torus_size(n);
        let base = self.pi0.identity() as u64 * t;
        Ok(Subgroup::from_sorted((base..base + t).map(|x| x as Elem).collect()))
    }

    /// Size of a subgroup of `S[n]`: the rank is the number of cyclic
    /// factors of `P ∩ T[n]` of full exponent `p^n`, and the component order
    /// is what remains of `|P|`.
    pub fn size_pair(&self, n: usize, sub: &Subgroup) -> Result<SizePair> {
        let g = self.truncate(n)?;
        if n == 0 || self.rank == 0 {
            return Ok(SizePair::finite(sub.order() as u64));
        }
        let t = self.torus_part(n)?;
        let e = self.p.pow(n as u32 - 1);
        let top: HashSet<Elem> =
            sub.elements().iter().filter(|&&x| t.contains(x)).map(|&x| pow(&g, x, e)).collect();
        let mut rank = 0u32;
        while self.p.pow(rank) < top.len() as u64 {
            rank += 1;
        }
        Ok(SizePair::new(rank, sub.order() as u64 / self.p.pow(rank * n as u32)))
    }

    /// The fusion system `F_{S[n]}(S[n])` at a level.
    pub fn fusion(&self, n: usize, caps: &Caps) -> Result<FusionSystem> {
        fusion_from_group(self.truncate(n)?, self.p, caps)
    }
}

/// An assignment `P ↦ P•` on the subgroups of one level, standing in for
/// the bullet functor.
pub trait BulletOracle: Send + Sync {
    fn name(&self) -> &str;

    /// Lattice id of `P•`.
    fn apply(&self, f: &FusionSystem, p: usize) -> usize;

    /// `φ•: P• → Q•` extending `φ: P → Q`. The default searches
    /// `Hom_F(P•, Q•)` for the least extension.
    fn lift(&self, f: &FusionSystem, phi: &GroupMono) -> Option<GroupMono> {
        let p = f.id_of(&phi.source)?;
        let q = f.id_of(&phi.target)?;
        let (pb, qb) = (self.apply(f, p), self.apply(f, q));
        f.homs(pb, qb)
            .iter()
            .find(|psi| phi.source.elements().iter().zip(&phi.images).all(|(&x, &y)| psi.apply(x) == y))
            .cloned()
    }
}

/// `P• = P`. This is the bullet functor of a finite `S`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityBullet;

impl BulletOracle for IdentityBullet {
    fn name(&self) -> &str {
        "identity"
    }

    fn apply(&self, _f: &FusionSystem, p: usize) -> usize {
        p
    }

    fn lift(&self, _f: &FusionSystem, phi: &GroupMono) -> Option<GroupMono> {
        Some(phi.clone())
    }
}

/// `P• = S` for every `P`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantTop;

impl BulletOracle for ConstantTop {
    fn name(&self) -> &str {
        "constant-top"
    }

    fn apply(&self, f: &FusionSystem, _p: usize) -> usize {
        f.s_id()
    }
}

/// An explicit assignment on subgroups; unlisted subgroups are fixed.
#[derive(Debug, Clone, Default)]
pub struct TableBullet {
    pub name: String,
    pub table: HashMap<Subgroup, Subgroup>,
}

impl BulletOracle for TableBullet {
    fn name(&self) -> &str {
        &self.name
    }

    fn apply(&self, f: &FusionSystem, p: usize) -> usize {
        self.table.get(f.subgroup(p)).and_then(|q| f.id_of(q)).unwrap_or(p)
    }
}

/// One validated property with its first witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BulletCheck {
    pub property: String,
    pub passed: bool,
    pub checked: usize,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BulletValidation {
    pub oracle: String,
    pub level: usize,
    pub checks: Vec<BulletCheck>,
}

impl BulletValidation {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed(&self, property: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.property == property).map(|c| c.passed)
    }
}

const MAX_WITNESSES: usize = 8;

fn check(property: &str, checked: usize, witnesses: Vec<String>) -> BulletCheck {
    let passed = witnesses.is_empty();
    let mut witnesses = witnesses;
    witnesses.truncate(MAX_WITNESSES);
    BulletCheck { property: property.into(), passed, checked, witnesses }
}

pub const IDEMPOTENT: &str = "idempotent";
pub const CONTAINS: &str = "contains P";
pub const EQUIVARIANT: &str = "conjugation equivariant";
pub const CLOSED: &str = "image closed under F-conjugacy";
pub const LIFTS: &str = "morphisms lift";
pub const FIXES_CENTRIC_RADICALS: &str = "fixes centric-radicals";
pub const FINITELY_MANY: &str = "finitely many image classes";

fn fmt_sub(s: &Subgroup) -> String {
    format!("{:?}", s.elements())
}

/// The level-local properties of an oracle on a fusion system.
pub fn validate_bullet(f: &FusionSystem, oracle: &dyn BulletOracle) -> Result<BulletValidation> {
    let n = f.n_subgroups();
    let g = f.group();
    let img: Vec<usize> = (0..n).map(|p| oracle.apply(f, p)).collect();
    let mut checks = Vec::new();

    let w = (0..n).filter(|&p| img[img[p]] != img[p]).map(|p| fmt_sub(f.subgroup(p))).collect();
    checks.push(check(IDEMPOTENT, n, w));

    let w = (0..n)
        .filter(|&p| !f.subgroup(p).is_subset_of(f.subgroup(img[p])))
        .map(|p| fmt_sub(f.subgroup(p)))
        .collect();
    checks.push(check(CONTAINS, n, w));

    let s = f.s();
    let mut w = Vec::new();
    let mut count = 0;
    for p in 0..n {
        for &x in s.elements() {
            count += 1;
            let conj = f.require_id(&f.subgroup(p).conjugate(g, x))?;
            if *f.subgroup(img[conj]) != f.subgroup(img[p]).conjugate(g, x) {
                w.push(format!("{} by {x}", fmt_sub(f.subgroup(p))));
                break;
            }
        }
    }
    checks.push(check(EQUIVARIANT, count, w));

    let in_image: HashSet<usize> = img.iter().copied().collect();
    let w = in_image
        .iter()
        .filter(|&&q| f.classes()[f.class_of(q)].iter().any(|r| !in_image.contains(r)))
        .map(|&q| fmt_sub(f.subgroup(q)))
        .collect();
    checks.push(check(CLOSED, in_image.len(), w));

    let mut w = Vec::new();
    let mut count = 0;
    for p in 0..n {
        for q in 0..n {
            for phi in f.homs(p, q) {
                count += 1;
                match oracle.lift(f, phi) {
                    Some(psi)
                        if psi.source == *f.subgroup(img[p])
                            && psi.target == *f.subgroup(img[q])
                            && f.contains(&psi) => {}
                    _ => w.push(format!("{} → {}", fmt_sub(f.subgroup(p)), fmt_sub(f.subgroup(q)))),
                }
            }
        }
    }
    checks.push(check(LIFTS, count, w));

    let cls = classify(f)?;
    let w = cls
        .iter()
        .filter(|c| c.centric && c.radical && img[c.subgroup_id] != c.subgroup_id)
        .map(|c| fmt_sub(f.subgroup(c.subgroup_id)))
        .collect();
    checks.push(check(FIXES_CENTRIC_RADICALS, cls.iter().filter(|c| c.centric && c.radical).count(), w));

    Ok(BulletValidation { oracle: oracle.name().into(), level: 0, checks })
}

/// Number of `S`-conjugacy classes among the oracle's images.
pub fn image_class_count(f: &FusionSystem, oracle: &dyn BulletOracle) -> Result<usize> {
    let g = f.group();
    let images: HashSet<usize> = (0..f.n_subgroups()).map(|p| oracle.apply(f, p)).collect();
    let mut seen: HashSet<usize> = HashSet::new();
    let mut classes = 0;
    let mut sorted: Vec<usize> = images.into_iter().collect();
    sorted.sort();
    for q in sorted {
        if seen.contains(&q) {
            continue;
        }
        classes += 1;
        for &x in f.s().elements() {
            seen.insert(f.require_id(&f.subgroup(q).conjugate(g, x))?);
        }
    }
    Ok(classes)
}

/// Validates an oracle at level `n` of a tower, on `F_{S[n]}(S[n])`.
///
/// "Finitely many classes" cannot be decided at one level. It is reported
/// as passing when the number of image classes at level `n` equals the
/// number at level `n - 1`, i.e. when the count has stabilized.
pub fn validate_bullet_oracle(
    tower: &TowerGroup,
    oracle: &dyn BulletOracle,
    n: usize,
    caps: &Caps,
) -> Result<BulletValidation> {
    let f = tower.fusion(n, caps)?;
    let mut report = validate_bullet(&f, oracle)?;
    report.level = n;
    let here = image_class_count(&f, oracle)?;
    let w = if n == 0 || tower.rank() == 0 {
        Vec::new()
    } else {
        let before = image_class_count(&tower.fusion(n - 1, caps)?, oracle)?;
        if before == here {
            Vec::new()
        } else {
            vec![format!("{before} image classes at level {} but {here} at level {n}", n - 1)]
        }
    };
    report.checks.push(check(FINITELY_MANY, here, w));
    Ok(report)
}

/// Level-independent invariants of an F-class: order, the multiset of
/// element orders, and the centric and radical flags.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassKey {
    pub order: usize,
    pub element_orders: Vec<u32>,
    pub centric: bool,
    pub radical: bool,
}

/// Multiset of class keys at a level, restricted to classes of order at
/// most `max_order`.
pub fn class_table(f: &FusionSystem, max_order: usize) -> Result<BTreeMap<ClassKey, usize>> {
    let g = f.group();
    let cls = classify(f)?;
    let mut out = BTreeMap::new();
    let mut seen = HashSet::new();
    for c in cls.iter().filter(|c| c.order <= max_order) {
        if !seen.insert(c.f_conjugacy_class_id) {
            continue;
        }
        let mut element_orders: Vec<u32> = c.elements.iter().map(|&x| g.elem_order(x)).collect();
        element_orders.sort();
        let key = ClassKey { order: c.order, element_orders, centric: c.centric, radical: c.radical };
        *out.entry(key).or_insert(0) += 1;
    }
    Ok(out)
}
