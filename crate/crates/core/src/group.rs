//! Iterated wreath products over base `Z`.
//!
//! Elements of `G ≀ Z` are pairs `(f, a)` of a finitely supported lamp
//! configuration `f: Z -> G` and a base shift `a`. The lamp group `G` is
//! abstracted by the [`Lamp`] trait, instantiated at `i64` (so
//! `WreathElement<i64>` is `Z ≀ Z`) and at `WreathElement<i64>` itself
//! (so `WreathElement<WreathElement<i64>>` is `(Z ≀ Z) ≀ Z`).
//!
//! All values are immutable and canonical: a lamp map never stores an
//! identity value, so structural equality is group equality.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

/// Value group of the lamps. `compose` is the group operation.
pub trait Lamp: Clone + Ord + core::fmt::Debug {
    fn identity() -> Self;
    fn is_identity(&self) -> bool;
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
}

impl Lamp for i64 {
    fn identity() -> Self {
        0
    }
    fn is_identity(&self) -> bool {
        *self == 0
    }
    fn compose(&self, other: &Self) -> Self {
        self + other
    }
    fn inverse(&self) -> Self {
        -self
    }
}

/// A finitely supported function `Z -> L` in canonical form: no entry is
/// the identity of `L`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct FinSuppMap<L: Lamp> {
    entries: BTreeMap<i64, L>,
}

impl<L: Lamp> Default for FinSuppMap<L> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<L: Lamp> FinSuppMap<L> {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// The delta function: value `b` at position `v`, identity elsewhere.
    pub fn delta(v: i64, b: L) -> Self {
        let mut entries = BTreeMap::new();
        if !b.is_identity() {
            entries.insert(v, b);
        }
        Self { entries }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, L)>) -> Self {
        let mut map = Self::empty();
        for (v, b) in pairs {
            map.set(v, b);
        }
        map
    }

    /// Overwrites the value at `v`, dropping it if it is the identity.
    pub fn set(&mut self, v: i64, b: L) {
        if b.is_identity() {
            self.entries.remove(&v);
        } else {
            self.entries.insert(v, b);
        }
    }

    pub fn get(&self, v: i64) -> L {
        self.entries.get(&v).cloned().unwrap_or_else(L::identity)
    }

    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Pointwise composition `(f·g)(x) = f(x)·g(x)`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&v, b) in &other.entries {
            let merged = out.get(v).compose(b);
            out.set(v, merged);
        }
        out
    }

    pub fn inverse(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|(&v, b)| (v, b.inverse()))
                .collect(),
        }
    }

    /// The shift action `a(f)(x) = f(x - a)`: support moves by `+a`.
    pub fn act(&self, a: i64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|(&v, b)| (v + a, b.clone()))
                .collect(),
        }
    }

    /// Delta decomposition `f = δ^{b_1}_{v_1} ⋯ δ^{b_k}_{v_k}` with
    /// strictly increasing positions and no identity values.
    pub fn decompose_deltas(&self) -> Vec<(i64, L)> {
        self.entries.iter().map(|(&v, b)| (v, b.clone())).collect()
    }
}

/// The element `(f, a)` of `L ≀ Z`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct WreathElement<L: Lamp> {
    pub lamps: FinSuppMap<L>,
    pub shift: i64,
}

impl<L: Lamp> WreathElement<L> {
    pub fn new(lamps: FinSuppMap<L>, shift: i64) -> Self {
        Self { lamps, shift }
    }

    pub fn identity() -> Self {
        Self::new(FinSuppMap::empty(), 0)
    }

    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.lamps.is_identity()
    }

    /// Pure base shift `(e, a)`.
    pub fn shift_by(a: i64) -> Self {
        Self::new(FinSuppMap::empty(), a)
    }

    /// Single lamp `(δ_v^b, 0)`.
    pub fn lamp(v: i64, b: L) -> Self {
        Self::new(FinSuppMap::delta(v, b), 0)
    }

    /// The group law `(f, a)(g, b) = (f · a(g), a + b)`.
    pub fn multiply(&self, other: &Self) -> Self {
        Self::new(
            self.lamps.compose(&other.lamps.act(self.shift)),
            self.shift + other.shift,
        )
    }

    /// `(f, a)^{-1} = ((-a)(f^{-1}), -a)`.
    pub fn invert(&self) -> Self {
        Self::new(self.lamps.inverse().act(-self.shift), -self.shift)
    }
}

impl Lamp for WreathElement<i64> {
    fn identity() -> Self {
        WreathElement::identity()
    }
    fn is_identity(&self) -> bool {
        WreathElement::is_identity(self)
    }
    fn compose(&self, other: &Self) -> Self {
        self.multiply(other)
    }
    fn inverse(&self) -> Self {
        self.invert()
    }
}

/// An element of the direct product `(Z ≀ Z)^m`, componentwise group law.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ProductElement {
    pub coordinates: Vec<WreathElement<i64>>,
}

impl ProductElement {
    pub fn new(coordinates: Vec<WreathElement<i64>>) -> Self {
        Self { coordinates }
    }

    pub fn identity(m: usize) -> Self {
        Self::new((0..m).map(|_| WreathElement::identity()).collect())
    }

    pub fn arity(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_identity(&self) -> bool {
        self.coordinates.iter().all(|x| x.is_identity())
    }

    pub fn multiply(&self, other: &Self) -> Self {
        debug_assert_eq!(self.arity(), other.arity());
        Self::new(
            self.coordinates
                .iter()
                .zip(&other.coordinates)
                .map(|(a, b)| a.multiply(b))
                .collect(),
        )
    }

    pub fn invert(&self) -> Self {
        Self::new(self.coordinates.iter().map(|x| x.invert()).collect())
    }
}

/// Labeled generators; the identity is never a generator.
#[derive(Clone, Debug)]
pub struct GeneratorSet<E> {
    gens: Vec<(String, E)>,
}

impl<E: Clone + PartialEq> GeneratorSet<E> {
    /// Drops any identity entries.
    pub fn new(gens: Vec<(String, E)>, identity: &E) -> Self {
        Self {
            gens: gens.into_iter().filter(|(_, g)| g != identity).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, E)> {
        self.gens.iter()
    }

    pub fn elements(&self) -> Vec<E> {
        self.gens.iter().map(|(_, g)| g.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
}

/// The standard generating set of `Z ≀ Z`:
/// `(δ_0^{±1}, 0)` and `(e, ±1)`.
pub fn lamplighter_generators() -> Vec<WreathElement<i64>> {
    alloc::vec![
        WreathElement::lamp(0, 1),
        WreathElement::lamp(0, -1),
        WreathElement::shift_by(1),
        WreathElement::shift_by(-1),
    ]
}

/// Generators of `(Z ≀ Z) ≀ Z`: one lamp generator `(δ_0^s, 0)` per
/// generator `s` of the inner `Z ≀ Z`, plus the base shifts.
pub fn iterated_lamplighter_generators() -> Vec<WreathElement<WreathElement<i64>>> {
    let mut gens: Vec<WreathElement<WreathElement<i64>>> = lamplighter_generators()
        .into_iter()
        .map(|s| WreathElement::lamp(0, s))
        .collect();
    gens.push(WreathElement::shift_by(1));
    gens.push(WreathElement::shift_by(-1));
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zwz(lamps: &[(i64, i64)], shift: i64) -> WreathElement<i64> {
        WreathElement::new(FinSuppMap::from_pairs(lamps.iter().copied()), shift)
    }

    #[test]
    fn identity_is_neutral() {
        let x = zwz(&[(2, 3), (-1, 1)], 4);
        let e = WreathElement::identity();
        assert_eq!(e.multiply(&x), x);
        assert_eq!(x.multiply(&e), x);
    }

    #[test]
    fn product_of_generators() {
        // (δ_0^1, 0)·(e, 1) = (δ_0^1, 1)
        let lamp = zwz(&[(0, 1)], 0);
        let shift = zwz(&[], 1);
        assert_eq!(lamp.multiply(&shift), zwz(&[(0, 1)], 1));
        // (e, 1)·(δ_0^1, 0) = (δ_1^1, 1): the shift acts first.
        assert_eq!(shift.multiply(&lamp), zwz(&[(1, 1)], 1));
    }

    #[test]
    fn action_moves_support() {
        let f = FinSuppMap::delta(1, 5i64);
        assert_eq!(f.act(0), f);
        assert_eq!(f.act(2), FinSuppMap::delta(3, 5));
        let g = FinSuppMap::from_pairs([(0, 1i64), (3, 2)]);
        assert_eq!(g.act(-1), FinSuppMap::from_pairs([(-1, 1i64), (2, 2)]));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(zwz(&[], 3).invert(), zwz(&[], -3));
        assert_eq!(
            WreathElement::<i64>::identity().invert(),
            WreathElement::identity()
        );
        // Brute-force cross-check below (brute_force_inverse) pins this one.
        assert_eq!(zwz(&[(2, 5)], 1).invert(), zwz(&[(1, -5)], -1));
    }

    /// Independent oracle: solve (f,a)(g,b) = (e,0) by exhausting small
    /// supports and values.
    fn brute_force_inverse(x: &WreathElement<i64>) -> WreathElement<i64> {
        let b = -x.shift;
        for v0 in -4i64..=4 {
            for w0 in -8i64..=8 {
                for v1 in -4i64..=4 {
                    for w1 in -8i64..=8 {
                        let mut g = FinSuppMap::empty();
                        g.set(v0, w0);
                        if v1 != v0 {
                            g.set(v1, w1);
                        }
                        let cand = WreathElement::new(g, b);
                        if x.multiply(&cand).is_identity() {
                            return cand;
                        }
                    }
                }
            }
        }
        panic!("no inverse found in search window for {x:?}");
    }

    #[test]
    fn inverse_matches_brute_force() {
        for x in [
            zwz(&[(2, 5)], 1),
            zwz(&[(0, 1), (3, -2)], 2),
            zwz(&[(-2, 7)], -3),
        ] {
            assert_eq!(x.invert(), brute_force_inverse(&x));
        }
    }

    #[test]
    fn delta_decomposition_reconstructs() {
        assert!(FinSuppMap::<i64>::empty().decompose_deltas().is_empty());
        assert_eq!(FinSuppMap::delta(2, 3i64).decompose_deltas(), vec![(2, 3)]);

        let f = FinSuppMap::from_pairs([(-1, 2i64), (3, 1)]);
        let deltas = f.decompose_deltas();
        assert_eq!(deltas, vec![(-1, 2), (3, 1)]);
        // positions strictly increasing, product reconstructs
        let mut rebuilt = FinSuppMap::empty();
        for (v, b) in &deltas {
            rebuilt = rebuilt.compose(&FinSuppMap::delta(*v, *b));
        }
        assert_eq!(rebuilt, f);
    }

    fn arb_zwz() -> impl Strategy<Value = WreathElement<i64>> {
        (
            proptest::collection::btree_map(-10i64..=10, -10i64..=10, 0..4),
            -10i64..=10,
        )
            .prop_map(|(m, s)| WreathElement::new(FinSuppMap::from_pairs(m), s))
    }

    proptest! {
        #[test]
        fn associativity(x in arb_zwz(), y in arb_zwz(), z in arb_zwz()) {
            prop_assert_eq!(x.multiply(&y).multiply(&z), x.multiply(&y.multiply(&z)));
        }

        #[test]
        fn inverse_law(x in arb_zwz()) {
            prop_assert!(x.multiply(&x.invert()).is_identity());
            prop_assert!(x.invert().multiply(&x).is_identity());
        }

        #[test]
        fn action_is_additive(x in arb_zwz(), a in -10i64..=10, b in -10i64..=10) {
            prop_assert_eq!(x.lamps.act(a).act(b), x.lamps.act(a + b));
        }

        #[test]
        fn action_is_homomorphism(x in arb_zwz(), y in arb_zwz(), a in -10i64..=10) {
            prop_assert_eq!(
                x.lamps.compose(&y.lamps).act(a),
                x.lamps.act(a).compose(&y.lamps.act(a))
            );
        }
    }

    fn arb_nested() -> impl Strategy<Value = WreathElement<WreathElement<i64>>> {
        (
            proptest::collection::btree_map(-4i64..=4, arb_zwz(), 0..3),
            -5i64..=5,
        )
            .prop_map(|(m, s)| WreathElement::new(FinSuppMap::from_pairs(m), s))
    }

    proptest! {
        #[test]
        fn nested_group_laws(x in arb_nested(), y in arb_nested(), z in arb_nested()) {
            prop_assert_eq!(x.multiply(&y).multiply(&z), x.multiply(&y.multiply(&z)));
            prop_assert!(x.multiply(&x.invert()).is_identity());
        }
    }

    #[test]
    fn generator_set_rejects_identity() {
        let gens = GeneratorSet::new(
            alloc::vec![
                ("a".into(), WreathElement::<i64>::lamp(0, 1)),
                ("e".into(), WreathElement::identity()),
            ],
            &WreathElement::identity(),
        );
        assert_eq!(gens.len(), 1);
    }
}
