//! Finite subgroups of GL2(Z/MZ) held by explicit enumeration.
//!
//! Matrices are stored as four residues below 2^16, which lets every element
//! be packed into a single `u64` key for hashing. Groups are closed under
//! multiplication with Dimino's coset extension, so adding one generator to
//! a group H costs O(|<H, g>| * #generators) products.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::residues::{inv_mod, ModInt};

/// Largest supported modulus; four residues then fit in one `u64`.
pub const MAX_MODULUS: u64 = 65_535;

/// Default cap on the number of elements of any enumerated group.
pub const DEFAULT_SIZE_CAP: usize = 2_000_000;

/// Largest modulus for which `find_conjugator` enumerates GL2(Z/MZ).
pub const CONJUGACY_MODULUS_CAP: u64 = 16;

static SIZE_CAP: AtomicUsize = AtomicUsize::new(0);

/// Current element cap; read once from `MAXAB_SIZE_CAP` if set.
pub fn size_cap() -> usize {
    let v = SIZE_CAP.load(Ordering::Relaxed);
    if v != 0 {
        return v;
    }
    let cap = std::env::var("MAXAB_SIZE_CAP")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_SIZE_CAP);
    SIZE_CAP.store(cap, Ordering::Relaxed);
    cap
}

/// Override the element cap for the rest of the process.
pub fn set_size_cap(cap: usize) {
    SIZE_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// A 2x2 matrix over Z/MZ, entries in row-major order (e11, e12, e21, e22).
///
/// The derived ordering is lexicographic on the entries, which is the
/// canonical element order used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    e: [u32; 4],
    m: u32,
}

impl Mat2 {
    /// Build a matrix from integer entries reduced modulo `modulus`.
    pub fn new(entries: [i64; 4], modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        let r = |x: i64| x.rem_euclid(modulus as i64) as u32;
        Ok(Mat2 { e: [r(entries[0]), r(entries[1]), r(entries[2]), r(entries[3])], m: modulus as u32 })
    }

    /// Build a matrix from four residues sharing one modulus.
    pub fn from_residues(entries: [ModInt; 4]) -> Result<Self> {
        let m = entries[0].modulus();
        for x in &entries[1..] {
            if x.modulus() != m {
                return Err(Error::ModulusMismatch { left: m, right: x.modulus() });
            }
        }
        check_modulus(m)?;
        Ok(Mat2 { e: entries.map(|x| x.value() as u32), m: m as u32 })
    }

    /// The identity matrix.
    pub fn identity(modulus: u64) -> Result<Self> {
        Self::new([1, 0, 0, 1], modulus)
    }

    /// The scalar matrix c*I.
    pub fn scalar(c: i64, modulus: u64) -> Result<Self> {
        Self::new([c, 0, 0, c], modulus)
    }

    /// The modulus M.
    pub fn modulus(&self) -> u64 {
        self.m as u64
    }

    /// Entries as least nonnegative representatives (e11, e12, e21, e22).
    pub fn entries(&self) -> [u64; 4] {
        self.e.map(|x| x as u64)
    }

    /// Entry (row, col) with 0-based indices.
    pub fn entry(&self, row: usize, col: usize) -> ModInt {
        ModInt::new(self.e[2 * row + col] as i128, self.m as u64).expect("modulus is positive")
    }

    /// Determinant as a residue.
    pub fn det(&self) -> u64 {
        let m = self.m as u64;
        let [a, b, c, d] = self.entries();
        (a * d % m + m - b * c % m) % m
    }

    /// Whether the determinant is a unit.
    pub fn is_invertible(&self) -> bool {
        num_integer::gcd(self.det(), self.m as u64) == 1
    }

    /// Whether the matrix is the identity.
    pub fn is_identity(&self) -> bool {
        let one = 1 % self.m;
        self.e == [one, 0, 0, one]
    }

    /// Packed key, injective for a fixed modulus.
    pub fn key(&self) -> u64 {
        let [a, b, c, d] = self.entries();
        (a << 48) | (b << 32) | (c << 16) | d
    }

    /// Product with a modulus check.
    pub fn mul(&self, other: &Mat2) -> Result<Mat2> {
        if self.m != other.m {
            return Err(Error::ModulusMismatch { left: self.m as u64, right: other.m as u64 });
        }
        Ok(self.mul_same(other))
    }

    /// Product of two matrices known to share a modulus.
    #[inline]
    pub(crate) fn mul_same(&self, o: &Mat2) -> Mat2 {
        let m = self.m as u64;
        let [a, b, c, d] = self.entries();
        let [x, y, z, w] = o.entries();
        Mat2 {
            e: [
                ((a * x + b * z) % m) as u32,
                ((a * y + b * w) % m) as u32,
                ((c * x + d * z) % m) as u32,
                ((c * y + d * w) % m) as u32,
            ],
            m: self.m,
        }
    }

    /// Inverse, or `Singular` when the determinant is not a unit.
    pub fn inverse(&self) -> Result<Mat2> {
        let m = self.m as u64;
        let dinv = inv_mod(self.det() as i128, m).map_err(|_| Error::Singular { modulus: m })?;
        let [a, b, c, d] = self.entries();
        let f = |x: u64| (x * dinv % m) as u32;
        Ok(Mat2 { e: [f(d), f((m - b) % m), f((m - c) % m), f(a)], m: self.m })
    }

    /// Non-negative power.
    pub fn pow(&self, mut e: u64) -> Mat2 {
        let mut acc = Mat2 { e: [1 % self.m, 0, 0, 1 % self.m], m: self.m };
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_same(&base);
            }
            base = base.mul_same(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of an invertible matrix.
    pub fn order(&self) -> Result<u64> {
        if !self.is_invertible() {
            return Err(Error::Singular { modulus: self.m as u64 });
        }
        let mut x = *self;
        let mut k = 1;
        while !x.is_identity() {
            x = x.mul_same(self);
            k += 1;
        }
        Ok(k)
    }

    /// Commutator a b a^{-1} b^{-1}.
    pub fn commutator(a: &Mat2, b: &Mat2) -> Result<Mat2> {
        let ai = a.inverse()?;
        let bi = b.inverse()?;
        Ok(a.mul(b)?.mul_same(&ai).mul_same(&bi))
    }

    /// Conjugate u * self * u^{-1}.
    pub fn conjugate_by(&self, u: &Mat2) -> Result<Mat2> {
        let ui = u.inverse()?;
        Ok(u.mul(self)?.mul_same(&ui))
    }

    /// Reduction to a divisor of the modulus.
    pub fn reduce(&self, target: u64) -> Result<Mat2> {
        if target == 0 || self.m as u64 % target != 0 {
            return Err(Error::BadTarget { target, modulus: self.m as u64 });
        }
        Ok(Mat2 { e: self.e.map(|x| x % target as u32), m: target as u32 })
    }

    /// Whether the matrix is congruent to the identity modulo `target`.
    pub fn is_identity_mod(&self, target: u64) -> bool {
        self.reduce(target).map(|r| r.is_identity()).unwrap_or(false)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.e[0], self.e[1], self.e[2], self.e[3])
    }
}

fn check_modulus(m: u64) -> Result<()> {
    if m == 0 || m > MAX_MODULUS {
        return Err(Error::BadModulus(m));
    }
    Ok(())
}

/// Incrementally closed group under construction.
struct Builder {
    modulus: u64,
    elems: Vec<Mat2>,
    set: FxHashSet<u64>,
    gens: Vec<Mat2>,
    cap: usize,
}

impl Builder {
    fn trivial(modulus: u64) -> Result<Self> {
        let id = Mat2::identity(modulus)?;
        let mut set = FxHashSet::default();
        set.insert(id.key());
        Ok(Builder { modulus, elems: vec![id], set, gens: Vec::new(), cap: size_cap() })
    }

    fn contains(&self, g: &Mat2) -> bool {
        self.set.contains(&g.key())
    }

    fn push(&mut self, x: Mat2) -> Result<bool> {
        if self.set.insert(x.key()) {
            self.elems.push(x);
            if self.elems.len() > self.cap {
                return Err(Error::SizeLimitExceeded { cap: self.cap });
            }
            return Ok(true);
        }
        Ok(false)
    }

    /// Replace the current group H by <H, g> (Dimino's algorithm).
    fn extend(&mut self, g: Mat2) -> Result<()> {
        if self.contains(&g) {
            return Ok(());
        }
        self.gens.push(g);
        let h_len = self.elems.len();
        let mut reps: Vec<Mat2> = vec![self.elems[0]];
        let add_coset = |b: &mut Builder, r: Mat2| -> Result<()> {
            for i in 0..h_len {
                let x = b.elems[i].mul_same(&r);
                b.push(x)?;
            }
            Ok(())
        };
        add_coset(self, g)?;
        reps.push(g);
        let mut i = 0;
        while i < reps.len() {
            let r = reps[i];
            for s in 0..self.gens.len() {
                let y = r.mul_same(&self.gens[s]);
                if !self.contains(&y) {
                    add_coset(self, y)?;
                    reps.push(y);
                }
            }
            i += 1;
        }
        Ok(())
    }

    fn finish(mut self) -> FiniteMatGroup {
        self.elems.sort_unstable();
        FiniteMatGroup { modulus: self.modulus, generators: self.gens, elements: self.elems, index: self.set }
    }
}

/// A finite subgroup of GL2(Z/MZ) with its elements in canonical order.
#[derive(Debug, Clone)]
pub struct FiniteMatGroup {
    modulus: u64,
    generators: Vec<Mat2>,
    elements: Vec<Mat2>,
    index: FxHashSet<u64>,
}

impl PartialEq for FiniteMatGroup {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.elements == other.elements
    }
}

impl Eq for FiniteMatGroup {}

impl FiniteMatGroup {
    /// The subgroup generated by `gens`; the empty list gives the trivial group.
    pub fn generated_by(gens: &[Mat2], modulus: u64) -> Result<Self> {
        let mut b = Builder::trivial(modulus)?;
        for g in gens {
            if g.modulus() != modulus {
                return Err(Error::ModulusMismatch { left: modulus, right: g.modulus() });
            }
            if !g.is_invertible() {
                return Err(Error::Singular { modulus });
            }
        }
        for g in gens {
            b.extend(*g)?;
        }
        Ok(b.finish())
    }

    /// Build a group from a set of matrices already known to be closed.
    ///
    /// Generators are chosen greedily in canonical order. Returns
    /// `NotSubgroup` when the greedy closure disagrees with the given set.
    pub fn from_closed_set(mut elems: Vec<Mat2>, modulus: u64) -> Result<Self> {
        elems.sort_unstable();
        elems.dedup();
        let mut b = Builder::trivial(modulus)?;
        for x in &elems {
            if x.modulus() != modulus {
                return Err(Error::ModulusMismatch { left: modulus, right: x.modulus() });
            }
            if !b.contains(x) {
                b.extend(*x)?;
            }
        }
        if b.elems.len() != elems.len() {
            return Err(Error::NotSubgroup);
        }
        Ok(b.finish())
    }

    /// The modulus M.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Number of elements.
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    /// Generators in the order they were adjoined.
    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    /// Elements in canonical order.
    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    /// Membership test.
    pub fn contains(&self, g: &Mat2) -> bool {
        g.modulus() == self.modulus && self.index.contains(&g.key())
    }

    /// Whether all generators commute pairwise.
    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        g.iter().all(|a| g.iter().all(|b| a.mul_same(b) == b.mul_same(a)))
    }

    /// Whether `self` is a subset of `other`.
    pub fn is_subgroup_of(&self, other: &FiniteMatGroup) -> bool {
        self.modulus == other.modulus && self.elements.iter().all(|x| other.contains(x))
    }

    /// A generating set chosen greedily from the elements in canonical order.
    pub fn small_generating_set(&self) -> Vec<Mat2> {
        let mut b = Builder::trivial(self.modulus).expect("modulus already validated");
        for x in &self.elements {
            if !b.contains(x) {
                b.extend(*x).expect("subset of an existing group");
            }
        }
        b.gens
    }
}

/// The commutator subgroup, as the normal closure of generator commutators.
pub fn derived_subgroup(g: &FiniteMatGroup) -> Result<FiniteMatGroup> {
    let gens = g.generators();
    let inverses: Vec<Mat2> = gens.iter().map(|x| x.inverse()).collect::<Result<_>>()?;
    let mut b = Builder::trivial(g.modulus)?;
    for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            let c = gens[i].mul_same(&gens[j]).mul_same(&inverses[i]).mul_same(&inverses[j]);
            b.extend(c)?;
        }
    }
    let mut k = 0;
    while k < b.gens.len() {
        let h = b.gens[k];
        for (x, xi) in gens.iter().zip(&inverses) {
            let c = x.mul_same(&h).mul_same(xi);
            b.extend(c)?;
        }
        k += 1;
    }
    Ok(b.finish())
}

/// The commutator subgroup from all pairs of elements; quadratic in |G|.
pub fn derived_subgroup_all_pairs(g: &FiniteMatGroup) -> Result<FiniteMatGroup> {
    let mut b = Builder::trivial(g.modulus)?;
    let inv: Vec<Mat2> = g.elements.iter().map(|x| x.inverse()).collect::<Result<_>>()?;
    for (x, xi) in g.elements.iter().zip(&inv) {
        for (y, yi) in g.elements.iter().zip(&inv) {
            let c = x.mul_same(y).mul_same(xi).mul_same(yi);
            b.extend(c)?;
        }
    }
    Ok(b.finish())
}

/// |G / [G, G]|.
pub fn abelianization_order(g: &FiniteMatGroup) -> Result<u64> {
    Ok(g.order() / derived_subgroup(g)?.order())
}

/// Image of G under reduction modulo `target`.
pub fn reduce_group(g: &FiniteMatGroup, target: u64) -> Result<FiniteMatGroup> {
    if target < 2 || g.modulus % target != 0 {
        return Err(Error::BadTarget { target, modulus: g.modulus });
    }
    let mut set = FxHashSet::default();
    let mut elems = Vec::new();
    for x in &g.elements {
        let r = x.reduce(target)?;
        if set.insert(r.key()) {
            elems.push(r);
        }
    }
    elems.sort_unstable();
    let mut gens: Vec<Mat2> = Vec::new();
    for x in &g.generators {
        let r = x.reduce(target)?;
        if !r.is_identity() && !gens.contains(&r) {
            gens.push(r);
        }
    }
    Ok(FiniteMatGroup { modulus: target, generators: gens, elements: elems, index: set })
}

/// Kernel of reduction G -> G mod `target`, as a subgroup of G.
pub fn kernel_of_reduction(g: &FiniteMatGroup, target: u64) -> Result<FiniteMatGroup> {
    if target < 1 || g.modulus % target != 0 {
        return Err(Error::BadTarget { target, modulus: g.modulus });
    }
    let elems: Vec<Mat2> = g.elements.iter().copied().filter(|x| x.is_identity_mod(target)).collect();
    FiniteMatGroup::from_closed_set(elems, g.modulus)
}

/// [G : H] for a subgroup H of G.
pub fn subgroup_index(h: &FiniteMatGroup, g: &FiniteMatGroup) -> Result<u64> {
    if !h.is_subgroup_of(g) {
        return Err(Error::NotSubgroup);
    }
    Ok(g.order() / h.order())
}

/// All elements of GL2(Z/MZ) in canonical order.
pub fn gl2_elements(modulus: u64) -> Result<Vec<Mat2>> {
    check_modulus(modulus)?;
    let m = modulus as i64;
    let total = (modulus as u128).pow(4);
    if total > size_cap() as u128 * 4 {
        return Err(Error::SizeLimitExceeded { cap: size_cap() });
    }
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let x = Mat2::new([a, b, c, d], modulus)?;
                    if x.is_invertible() {
                        out.push(x);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Whether u G u^{-1} = H, checked on every element.
pub fn conjugates_onto(u: &Mat2, g: &FiniteMatGroup, h: &FiniteMatGroup) -> Result<bool> {
    if g.order() != h.order() {
        return Ok(false);
    }
    for x in g.elements() {
        if !h.contains(&x.conjugate_by(u)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Search GL2(Z/MZ) for U with U G U^{-1} = H; the first hit in canonical order.
pub fn find_conjugator(g: &FiniteMatGroup, h: &FiniteMatGroup) -> Result<Option<Mat2>> {
    find_conjugator_capped(g, h, CONJUGACY_MODULUS_CAP)
}

/// As [`find_conjugator`] with an explicit cap on the modulus.
pub fn find_conjugator_capped(g: &FiniteMatGroup, h: &FiniteMatGroup, max_modulus: u64) -> Result<Option<Mat2>> {
    if g.modulus != h.modulus {
        return Err(Error::ModulusMismatch { left: g.modulus, right: h.modulus });
    }
    if g.modulus > max_modulus {
        return Err(Error::SizeLimitExceeded { cap: max_modulus as usize });
    }
    if g.order() != h.order() {
        return Ok(None);
    }
    let gens = g.small_generating_set();
    for u in gl2_elements(g.modulus)? {
        let ui = u.inverse()?;
        // Conjugation is injective, so generators landing in H and equal
        // orders give u G u^{-1} = H.
        if gens.iter().all(|x| h.contains(&u.mul_same(x).mul_same(&ui))) {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(e: [i64; 4], n: u64) -> Mat2 {
        Mat2::new(e, n).unwrap()
    }

    #[test]
    fn inverse_and_det() {
        let a = m([2, 1, 1, 1], 9);
        let ai = a.inverse().unwrap();
        assert!(a.mul(&ai).unwrap().is_identity());
        assert!(matches!(m([2, 0, 0, 3], 6).inverse(), Err(Error::Singular { .. })));
    }

    #[test]
    fn gl2_orders() {
        // |GL2(Z/2)| = 6, |GL2(Z/4)| = 96, |GL2(Z/3)| = 48.
        assert_eq!(gl2_elements(2).unwrap().len(), 6);
        assert_eq!(gl2_elements(4).unwrap().len(), 96);
        assert_eq!(gl2_elements(3).unwrap().len(), 48);
        let g = FiniteMatGroup::generated_by(&[m([1, 1, 0, 1], 3), m([0, 1, 2, 0], 3), m([2, 0, 0, 1], 3)], 3).unwrap();
        assert_eq!(g.order(), 48);
        // SL2(F3)' is the quaternion group; GL2(F3)' = SL2(F3) of order 24.
        assert_eq!(derived_subgroup(&g).unwrap().order(), 24);
    }

    #[test]
    fn singular_generator_rejected() {
        let r = FiniteMatGroup::generated_by(&[m([1, 0, 0, 0], 5)], 5);
        assert!(matches!(r, Err(Error::Singular { .. })));
    }

    #[test]
    fn size_cap_is_enforced() {
        let mut b = Builder::trivial(7).unwrap();
        b.cap = 10;
        let r = b.extend(m([1, 1, 0, 1], 7)).and_then(|_| b.extend(m([3, 0, 0, 1], 7)));
        assert!(matches!(r, Err(Error::SizeLimitExceeded { cap: 10 })));
    }

    #[test]
    fn reduction_and_kernel() {
        let gens = [m([1, 1, 0, 1], 9), m([2, 0, 0, 1], 9), m([1, 0, 1, 1], 9)];
        let g = FiniteMatGroup::generated_by(&gens, 9).unwrap();
        let r = reduce_group(&g, 3).unwrap();
        let k = kernel_of_reduction(&g, 3).unwrap();
        assert_eq!(r.order() * k.order(), g.order());
        assert!(matches!(reduce_group(&g, 2), Err(Error::BadTarget { .. })));
    }

    fn gen_strategy(modulus: u64) -> impl Strategy<Value = Vec<Mat2>> {
        let mm = modulus as i64;
        proptest::collection::vec(proptest::array::uniform4(0..mm), 1..4).prop_map(move |v| {
            v.into_iter().map(|e| Mat2::new(e, modulus).unwrap()).filter(|x| x.is_invertible()).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn closure_is_closed_and_lagrange(gens in gen_strategy(8)) {
            let g = FiniteMatGroup::generated_by(&gens, 8).unwrap();
            for x in g.elements().iter().take(64) {
                for y in g.elements().iter().take(64) {
                    prop_assert!(g.contains(&x.mul_same(y)));
                }
            }
            prop_assert_eq!(1536 % g.order(), 0);
        }

        #[test]
        fn derived_matches_all_pairs(gens in gen_strategy(6)) {
            let g = FiniteMatGroup::generated_by(&gens, 6).unwrap();
            prop_assume!(g.order() <= 2000);
            let d1 = derived_subgroup(&g).unwrap();
            let d2 = derived_subgroup_all_pairs(&g).unwrap();
            prop_assert_eq!(d1, d2);
        }

        #[test]
        fn reduction_is_surjective_homomorphism(gens in gen_strategy(9)) {
            let g = FiniteMatGroup::generated_by(&gens, 9).unwrap();
            let r = reduce_group(&g, 3).unwrap();
            let regen = FiniteMatGroup::generated_by(
                &gens.iter().map(|x| x.reduce(3).unwrap()).collect::<Vec<_>>(), 3).unwrap();
            prop_assert_eq!(&r, &regen);
            let k = kernel_of_reduction(&g, 3).unwrap();
            prop_assert_eq!(r.order() * k.order(), g.order());
        }

        #[test]
        fn greedy_generators_regenerate(gens in gen_strategy(5)) {
            let g = FiniteMatGroup::generated_by(&gens, 5).unwrap();
            let s = g.small_generating_set();
            let h = FiniteMatGroup::generated_by(&s, 5).unwrap();
            prop_assert_eq!(h, g);
        }
    }
}
