//! Word lengths via Parry's tour formula, and an independent BFS oracle
//! over the Cayley graph.
//!
//! The word length of `x = (f, v)` in `G ≀ Z` with the standard
//! generators is the length of the shortest walk on `Z` that starts at
//! 0, visits every lamp position, and ends at `v`, plus the lengths of
//! the lamp values. The tour length is computed as the minimum of the
//! two extreme-first tours; tests validate it against exhaustive
//! visit-order search (this is the adoption gate for the closed form).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::group::{
    iterated_lamplighter_generators, lamplighter_generators, Lamp, ProductElement, WreathElement,
};

/// A tour of the line: start at 0, visit every element of `visit`, stop
/// at `end`.
#[derive(Clone, Debug)]
pub struct LineTour {
    pub visit: Vec<i64>,
    pub end: i64,
}

/// Length of the optimal line tour. Minimum of the left-extreme-first
/// and right-extreme-first walks; either one is optimal.
pub fn line_path_length(visit: &[i64], end: i64) -> u64 {
    let lo = visit.iter().copied().chain([0, end]).min().unwrap();
    let hi = visit.iter().copied().chain([0, end]).max().unwrap();
    // 0 -> lo -> hi -> end versus 0 -> hi -> lo -> end
    let left_first = (0 - lo) + (hi - lo) + (hi - end);
    let right_first = (hi - 0) + (hi - lo) + (end - lo);
    left_first.min(right_first) as u64
}

/// Shortest loop based at 0 visiting every element of `visit`.
pub fn line_loop_length(visit: &[i64]) -> u64 {
    line_path_length(visit, 0)
}

/// Lamp groups carrying their own word length.
pub trait LampLength: Lamp {
    fn word_length(&self) -> u64;
}

impl LampLength for i64 {
    fn word_length(&self) -> u64 {
        self.unsigned_abs()
    }
}

impl LampLength for WreathElement<i64> {
    fn word_length(&self) -> u64 {
        word_length(self)
    }
}

/// Parry word length `|x| = |p(x)| + Σ_k |b_k|` for `x = (f, v)`.
pub fn word_length<L: LampLength>(x: &WreathElement<L>) -> u64 {
    let support: Vec<i64> = x.lamps.support().collect();
    let lamps: u64 = x
        .lamps
        .decompose_deltas()
        .iter()
        .map(|(_, b)| b.word_length())
        .sum();
    line_path_length(&support, x.shift) + lamps
}

/// Word length on a direct product with the union generating set:
/// the sum of factor lengths.
pub fn word_length_product(x: &ProductElement) -> u64 {
    x.coordinates.iter().map(word_length).sum()
}

/// A finitely generated group presented by identity, generator moves and
/// multiplication, enough for Cayley-graph BFS.
pub trait CayleyGroup {
    type Elem: Clone + Ord + core::fmt::Debug;
    fn identity(&self) -> Self::Elem;
    /// Closed under inversion.
    fn generators(&self) -> Vec<Self::Elem>;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

/// `Z` with generators ±1.
pub struct ZGroup;

impl CayleyGroup for ZGroup {
    type Elem = i64;
    fn identity(&self) -> i64 {
        0
    }
    fn generators(&self) -> Vec<i64> {
        alloc::vec![1, -1]
    }
    fn multiply(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }
}

/// `Z ≀ Z` with the standard generators.
pub struct LamplighterGroup;

impl CayleyGroup for LamplighterGroup {
    type Elem = WreathElement<i64>;
    fn identity(&self) -> Self::Elem {
        WreathElement::identity()
    }
    fn generators(&self) -> Vec<Self::Elem> {
        lamplighter_generators()
    }
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.multiply(b)
    }
}

/// `(Z ≀ Z) ≀ Z`.
pub struct IteratedLamplighterGroup;

impl CayleyGroup for IteratedLamplighterGroup {
    type Elem = WreathElement<WreathElement<i64>>;
    fn identity(&self) -> Self::Elem {
        WreathElement::identity()
    }
    fn generators(&self) -> Vec<Self::Elem> {
        iterated_lamplighter_generators()
    }
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.multiply(b)
    }
}

/// `(Z ≀ Z)^m` with the disjoint union of the factor generating sets.
pub struct ProductLamplighterGroup {
    pub arity: usize,
}

impl CayleyGroup for ProductLamplighterGroup {
    type Elem = ProductElement;
    fn identity(&self) -> Self::Elem {
        ProductElement::identity(self.arity)
    }
    fn generators(&self) -> Vec<Self::Elem> {
        let mut gens = Vec::new();
        for i in 0..self.arity {
            for s in lamplighter_generators() {
                let mut e = ProductElement::identity(self.arity);
                e.coordinates[i] = s;
                gens.push(e);
            }
        }
        gens
    }
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.multiply(b)
    }
}

/// Materialized ball of the word metric: exact shortest word lengths for
/// every element within `radius`.
#[derive(Clone, Debug)]
pub struct BallTable<E: Ord> {
    pub radius: u32,
    pub lengths: BTreeMap<E, u32>,
}

impl<E: Ord> BallTable<E> {
    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = &E> {
        self.lengths.keys()
    }

    /// Ball sizes `|B(0)|, |B(1)|, …, |B(radius)|`.
    pub fn growth_series(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0usize; self.radius as usize + 1];
        for &l in self.lengths.values() {
            sizes[l as usize] += 1;
        }
        for i in 1..sizes.len() {
            sizes[i] += sizes[i - 1];
        }
        sizes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetExceeded {
    pub limit: usize,
}

impl core::fmt::Display for BudgetExceeded {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "ball enumeration exceeded budget of {} elements", self.limit)
    }
}

/// Breadth-first search of the Cayley graph out to `radius`, right
/// multiplication by generators. `budget` caps the number of distinct
/// elements (ball sizes grow exponentially for the wreath products).
pub fn bfs_ball<G: CayleyGroup>(
    group: &G,
    radius: u32,
    budget: usize,
) -> Result<BallTable<G::Elem>, BudgetExceeded> {
    let gens = group.generators();
    let mut lengths = BTreeMap::new();
    lengths.insert(group.identity(), 0u32);
    let mut frontier = alloc::vec![group.identity()];
    for depth in 1..=radius {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &gens {
                let y = group.multiply(x, s);
                if !lengths.contains_key(&y) {
                    if lengths.len() >= budget {
                        return Err(BudgetExceeded { limit: budget });
                    }
                    lengths.insert(y.clone(), depth);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    Ok(BallTable { radius, lengths })
}

/// Ball sizes by radius, straight from BFS.
pub fn growth_series<G: CayleyGroup>(
    group: &G,
    radius: u32,
    budget: usize,
) -> Result<Vec<usize>, BudgetExceeded> {
    Ok(bfs_ball(group, radius, budget)?.growth_series())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FinSuppMap;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn zwz(lamps: &[(i64, i64)], shift: i64) -> WreathElement<i64> {
        WreathElement::new(FinSuppMap::from_pairs(lamps.iter().copied()), shift)
    }

    /// Exhaustive oracle: walk through every ordering of the visit set.
    fn tour_oracle(visit: &[i64], end: i64) -> u64 {
        if visit.is_empty() {
            return end.unsigned_abs();
        }
        visit
            .iter()
            .permutations(visit.len())
            .map(|order| {
                let mut pos = 0i64;
                let mut total = 0u64;
                for &v in order {
                    total += pos.abs_diff(v);
                    pos = v;
                }
                total + pos.abs_diff(end)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn tour_examples() {
        assert_eq!(line_path_length(&[], 5), 5);
        assert_eq!(line_path_length(&[-2, 1], 1), 5);
        assert_eq!(line_path_length(&[2], 0), 4);
        assert_eq!(line_loop_length(&[]), 0);
        assert_eq!(line_loop_length(&[2]), 4);
        assert_eq!(line_loop_length(&[-1, 3]), 8);
    }

    proptest! {
        // Adoption gate for the two-tour formula.
        #[test]
        fn tour_matches_exhaustive_search(
            visit in proptest::collection::btree_set(-10i64..=10, 0..6),
            end in -10i64..=10,
        ) {
            let visit: Vec<i64> = visit.into_iter().collect();
            prop_assert_eq!(line_path_length(&visit, end), tour_oracle(&visit, end));
        }

        #[test]
        fn loop_is_path_ending_at_zero(
            visit in proptest::collection::btree_set(-10i64..=10, 0..6),
        ) {
            let visit: Vec<i64> = visit.into_iter().collect();
            prop_assert_eq!(line_loop_length(&visit), line_path_length(&visit, 0));
        }
    }

    #[test]
    fn word_length_examples() {
        assert_eq!(word_length(&WreathElement::<i64>::identity()), 0);
        assert_eq!(word_length(&zwz(&[(2, 3)], 0)), 7);
        assert_eq!(word_length(&zwz(&[(-2, 1), (1, 1)], 1)), 7);
    }

    #[test]
    fn product_length_is_sum() {
        let x = ProductElement::new(vec![zwz(&[], 3), zwz(&[], -2)]);
        assert_eq!(word_length_product(&x), 5);
        let y = ProductElement::new(vec![zwz(&[(0, 1)], 0), zwz(&[], 1)]);
        assert_eq!(word_length_product(&y), 2);
        assert_eq!(word_length_product(&ProductElement::identity(2)), 0);
    }

    #[test]
    fn small_balls() {
        let table = bfs_ball(&LamplighterGroup, 0, 10).unwrap();
        assert_eq!(table.len(), 1);
        let table = bfs_ball(&LamplighterGroup, 1, 10).unwrap();
        assert_eq!(table.len(), 5);
        assert_eq!(table.growth_series(), vec![1, 5]);
        assert_eq!(growth_series(&ZGroup, 3, 100).unwrap(), vec![1, 3, 5, 7]);
    }

    #[test]
    fn budget_is_enforced() {
        let res = bfs_ball(&LamplighterGroup, 4, 10);
        assert!(matches!(res, Err(BudgetExceeded { limit: 10 })));
    }

    #[test]
    fn parry_matches_bfs_radius_4() {
        let table = bfs_ball(&LamplighterGroup, 4, 1_000_000).unwrap();
        for (x, &len) in &table.lengths {
            assert_eq!(word_length(x), len as u64, "mismatch at {x:?}");
        }
    }

    /// Cancelling deltas never reach the canonical form, so the support
    /// passed to the tour is exactly the honest visit set.
    #[test]
    fn cancelling_lamps_drop_from_tour() {
        // build (δ_5^1, 0)·(δ_5^{-1}, 0)·(e, 1): lamp at 5 cancels
        let x = zwz(&[(5, 1)], 0)
            .multiply(&zwz(&[(5, -1)], 0))
            .multiply(&zwz(&[], 1));
        assert_eq!(x, zwz(&[], 1));
        assert_eq!(word_length(&x), 1);
    }

    #[test]
    fn nested_parry_matches_bfs_radius_3() {
        let table = bfs_ball(&IteratedLamplighterGroup, 3, 1_000_000).unwrap();
        for (x, &len) in &table.lengths {
            assert_eq!(word_length(x), len as u64, "mismatch at {x:?}");
        }
    }

    fn arb_zwz() -> impl Strategy<Value = WreathElement<i64>> {
        (
            proptest::collection::btree_map(-6i64..=6, -4i64..=4, 0..3),
            -6i64..=6,
        )
            .prop_map(|(m, s)| WreathElement::new(FinSuppMap::from_pairs(m), s))
    }

    proptest! {
        #[test]
        fn metric_axioms(x in arb_zwz(), y in arb_zwz(), z in arb_zwz()) {
            let d = |a: &WreathElement<i64>, b: &WreathElement<i64>| {
                word_length(&a.invert().multiply(b))
            };
            prop_assert_eq!(d(&x, &y), d(&y, &x));
            prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
            prop_assert_eq!(d(&x, &y) == 0, x == y);
        }

        #[test]
        fn left_invariance(k in arb_zwz(), x in arb_zwz(), y in arb_zwz()) {
            let d = |a: &WreathElement<i64>, b: &WreathElement<i64>| {
                word_length(&a.invert().multiply(b))
            };
            prop_assert_eq!(d(&k.multiply(&x), &k.multiply(&y)), d(&x, &y));
        }
    }
}
