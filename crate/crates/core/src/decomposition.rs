//! Decomposition witnesses and their finite-depth recursive trees.
//!
//! A [`DecompositionWitness`] records a scale-r two-family decomposition
//! `X = X_0 ∪ X_1` with each family an r-disjoint union of pieces. A
//! [`WitnessTree`] closes that recursively: each node decomposes every
//! space of the current family, the child tree certifies the produced
//! pieces, and a leaf asserts a uniform diameter bound. A verified tree
//! of depth n is a certificate of membership in D_n for the root family;
//! re-running it per requested scale is the finite-scale stand-in for
//! membership in D_ω.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::group::{Lamp, WreathElement};
use crate::metric::{
    diam, r_disjoint_violation, FiniteMetricSpace, MetricError, MetricFamily, Piece,
};
use crate::ratio::{format_rational, Rational};

/// One scale-r decomposition of one space into two r-disjoint families.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionWitness {
    pub scale: Rational,
    pub family0: Vec<Piece>,
    pub family1: Vec<Piece>,
}

impl DecompositionWitness {
    /// All nonempty pieces, family 0 first. This order defines the local
    /// indexing of the child family in a [`WitnessTree`].
    pub fn produced_pieces(&self) -> Vec<&Piece> {
        self.family0
            .iter()
            .chain(self.family1.iter())
            .filter(|p| !p.is_empty())
            .collect()
    }
}

/// Finite-depth certificate over a metric family.
#[derive(Clone, Debug, PartialEq)]
pub enum WitnessTree {
    /// Asserts every space of the current family has diameter <= bound.
    Leaf { bound: Rational },
    /// One witness per space of the current family; the child tree runs
    /// on the family of all produced pieces, in
    /// [`DecompositionWitness::produced_pieces`] order per space.
    Node {
        witnesses: Vec<DecompositionWitness>,
        child: Box<WitnessTree>,
    },
}

impl WitnessTree {
    pub fn depth(&self) -> usize {
        match self {
            WitnessTree::Leaf { .. } => 0,
            WitnessTree::Node { child, .. } => 1 + child.depth(),
        }
    }
}

/// A single named verification step.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Conjunction of per-check results, with failure witnesses.
#[derive(Clone, Debug, Default)]
pub struct WitnessReport {
    pub checks: Vec<Check>,
}

impl WitnessReport {
    pub fn verdict(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: String, pass: bool, detail: String) {
        self.checks.push(Check { name, pass, detail });
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// Checks that `w` decomposes `space`: coverage by family0 ∪ family1 and
/// r-disjointness of each family. Failures carry the offending point or
/// pair of pieces.
pub fn verify_witness(
    space: &FiniteMetricSpace,
    w: &DecompositionWitness,
) -> Result<WitnessReport, MetricError> {
    verify_witness_named(space, w, "")
}

fn verify_witness_named(
    space: &FiniteMetricSpace,
    w: &DecompositionWitness,
    prefix: &str,
) -> Result<WitnessReport, MetricError> {
    for p in w.family0.iter().chain(&w.family1) {
        if let Some(&i) = p.members().iter().find(|&&i| i >= space.len()) {
            return Err(MetricError::DanglingIndex { index: i });
        }
    }
    let mut report = WitnessReport::default();
    let uncovered = (0..space.len())
        .find(|&x| !w.family0.iter().chain(&w.family1).any(|p| p.contains(x)));
    report.push(
        format!("{prefix}coverage"),
        uncovered.is_none(),
        match uncovered {
            Some(x) => format!("point {x} ({}) lies in no piece", space.label(x)),
            None => "all points covered".into(),
        },
    );
    for (idx, family) in [&w.family0, &w.family1].into_iter().enumerate() {
        let violation = r_disjoint_violation(space, family, w.scale)?;
        report.push(
            format!("{prefix}family{idx}-disjoint"),
            violation.is_none(),
            match violation {
                Some((i, j)) => format!(
                    "pieces {i} and {j} are closer than r = {}",
                    format_rational(&w.scale)
                ),
                None => format!("all pairs at distance >= {}", format_rational(&w.scale)),
            },
        );
    }
    Ok(report)
}

/// Recursively verifies a tree over a family: every node witness on its
/// space, then the child tree on the induced pieces; leaves check the
/// diameter bound on every space.
pub fn verify_tree(family: &MetricFamily, tree: &WitnessTree) -> Result<WitnessReport, MetricError> {
    verify_tree_at(family, tree, 0)
}

fn verify_tree_at(
    family: &MetricFamily,
    tree: &WitnessTree,
    depth: usize,
) -> Result<WitnessReport, MetricError> {
    let mut report = WitnessReport::default();
    match tree {
        WitnessTree::Leaf { bound } => {
            for (k, space) in family.spaces.iter().enumerate() {
                let d = if space.is_empty() {
                    Rational::from_integer(0)
                } else {
                    diam(space, &Piece::new((0..space.len()).collect()))?
                };
                report.push(
                    format!("depth{depth}/space{k}/leaf-bound"),
                    d <= *bound,
                    format!(
                        "diam = {}, bound = {}",
                        format_rational(&d),
                        format_rational(bound)
                    ),
                );
            }
        }
        WitnessTree::Node { witnesses, child } => {
            if witnesses.len() != family.spaces.len() {
                report.push(
                    format!("depth{depth}/arity"),
                    false,
                    format!(
                        "{} witnesses for {} spaces",
                        witnesses.len(),
                        family.spaces.len()
                    ),
                );
                return Ok(report);
            }
            let mut children = Vec::new();
            for (k, (space, w)) in family.spaces.iter().zip(witnesses).enumerate() {
                let sub = verify_witness_named(space, w, &format!("depth{depth}/space{k}/"))?;
                report.checks.extend(sub.checks);
                for piece in w.produced_pieces() {
                    children.push(space.induced(piece.members()));
                }
            }
            let sub = verify_tree_at(&MetricFamily::new(children), child, depth + 1)?;
            report.checks.extend(sub.checks);
        }
    }
    Ok(report)
}

/// Strip decomposition of integer data along a 1-Lipschitz coordinate:
/// point i with coordinate c falls into block `floor(c / 2r)`, even
/// blocks to family 0, odd to family 1. Blocks of the same family are
/// separated by an intervening block of width 2r, so each family is
/// r-disjoint whenever the coordinate is 1-Lipschitz for the metric;
/// every block has coordinate-diameter < 2r.
pub fn strip_decomposition(coords: &[i64], r: Rational) -> DecompositionWitness {
    assert!(r > Rational::from_integer(0), "scale must be positive");
    let width = Rational::from_integer(2) * r;
    let mut blocks: alloc::collections::BTreeMap<i64, Vec<usize>> =
        alloc::collections::BTreeMap::new();
    for (i, &c) in coords.iter().enumerate() {
        let block = (Rational::from_integer(c) / width).floor().to_integer();
        blocks.entry(block).or_default().push(i);
    }
    let mut family0 = Vec::new();
    let mut family1 = Vec::new();
    for (block, members) in blocks {
        let piece = Piece::new(members);
        if block.rem_euclid(2) == 0 {
            family0.push(piece);
        } else {
            family1.push(piece);
        }
    }
    DecompositionWitness {
        scale: r,
        family0,
        family1,
    }
}

/// The standard asdim-1 witness for an integer segment: point i is the
/// integer `coords[i]`, intervals `[2r·k, 2r·(k+1))` alternate between
/// the two families.
pub fn strategy_z(coords: &[i64], r: Rational) -> DecompositionWitness {
    strip_decomposition(coords, r)
}

/// Depth-1 tree for an integer segment: strip witness, then the uniform
/// bound 2r on the pieces.
pub fn strategy_z_tree(coords: &[i64], r: Rational) -> WitnessTree {
    WitnessTree::Node {
        witnesses: alloc::vec![strategy_z(coords, r)],
        child: Box::new(WitnessTree::Leaf {
            bound: Rational::from_integer(2) * r,
        }),
    }
}

/// The l1 product of two spaces; point `(i, j)` has index `i·|B| + j`.
pub fn product_space(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> FiniteMetricSpace {
    let mut labels = Vec::with_capacity(a.len() * b.len());
    let mut dist = Vec::with_capacity(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            labels.push(format!("{}|{}", a.label(i), b.label(j)));
        }
    }
    for i in 0..a.len() {
        for j in 0..b.len() {
            let mut row = Vec::with_capacity(a.len() * b.len());
            for k in 0..a.len() {
                for l in 0..b.len() {
                    row.push(a.dist(i, k) + b.dist(j, l));
                }
            }
            dist.push(row);
        }
    }
    FiniteMetricSpace::new(labels, dist).expect("l1 product of metrics is a metric")
}

/// Product tree: first decompose along the A side (pieces are `P × B`),
/// then along B inside each leaf-level A piece. Depth adds, leaf bounds
/// add (l1 metric). `a_sizes` are the point counts of the spaces the
/// A tree applies to (the singleton `[|A|]` at the root); `b_size` is
/// `|B|`.
pub fn strategy_product(
    ta: &WitnessTree,
    a_sizes: &[usize],
    tb: &WitnessTree,
    b_size: usize,
) -> WitnessTree {
    match ta {
        WitnessTree::Node { witnesses, child } => {
            debug_assert_eq!(witnesses.len(), a_sizes.len());
            let lifted = witnesses
                .iter()
                .map(|w| lift_a_witness(w, b_size))
                .collect();
            let child_sizes: Vec<usize> = witnesses
                .iter()
                .flat_map(|w| w.produced_pieces().into_iter().map(|p| p.len()))
                .collect();
            WitnessTree::Node {
                witnesses: lifted,
                child: Box::new(strategy_product(child, &child_sizes, tb, b_size)),
            }
        }
        WitnessTree::Leaf { bound } => lift_b_tree(tb, a_sizes, &[b_size], *bound),
    }
}

fn lift_a_witness(w: &DecompositionWitness, b_size: usize) -> DecompositionWitness {
    let lift = |pieces: &[Piece]| {
        pieces
            .iter()
            .map(|p| {
                Piece::new(
                    p.members()
                        .iter()
                        .flat_map(|&x| (0..b_size).map(move |y| x * b_size + y))
                        .collect(),
                )
            })
            .collect()
    };
    DecompositionWitness {
        scale: w.scale,
        family0: lift(&w.family0),
        family1: lift(&w.family1),
    }
}

fn lift_b_tree(
    tb: &WitnessTree,
    a_sizes: &[usize],
    b_sizes: &[usize],
    a_bound: Rational,
) -> WitnessTree {
    match tb {
        WitnessTree::Leaf { bound } => WitnessTree::Leaf {
            bound: a_bound + *bound,
        },
        WitnessTree::Node { witnesses, child } => {
            debug_assert_eq!(witnesses.len(), b_sizes.len());
            let mut lifted = Vec::new();
            for &n in a_sizes {
                for (w, &m) in witnesses.iter().zip(b_sizes) {
                    lifted.push(lift_b_witness(w, n, m));
                }
            }
            let child_b_sizes: Vec<usize> = witnesses
                .iter()
                .flat_map(|w| w.produced_pieces().into_iter().map(|p| p.len()))
                .collect();
            // child family stays ordered A-major over the B child family,
            // so the A-side sizes carry through unchanged
            WitnessTree::Node {
                witnesses: lifted,
                child: Box::new(lift_b_tree(child, a_sizes, &child_b_sizes, a_bound)),
            }
        }
    }
}

fn lift_b_witness(w: &DecompositionWitness, a_size: usize, b_size: usize) -> DecompositionWitness {
    let lift = |pieces: &[Piece]| {
        pieces
            .iter()
            .map(|p| {
                Piece::new(
                    (0..a_size)
                        .flat_map(|x| p.members().iter().map(move |&y| x * b_size + y))
                        .collect(),
                )
            })
            .collect()
    };
    DecompositionWitness {
        scale: w.scale,
        family0: lift(&w.family0),
        family1: lift(&w.family1),
    }
}

/// Left translation of a family of group subsets: `gX = {gh | h ∈ X}`.
/// Left invariance of the word metric makes this an isometry piece by
/// piece, so any witness transports verbatim.
pub fn translate_family<L: Lamp>(
    g: &WreathElement<L>,
    family: &[Vec<WreathElement<L>>],
) -> Vec<Vec<WreathElement<L>>> {
    family
        .iter()
        .map(|piece| piece.iter().map(|h| g.multiply(h)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::line_space;
    use crate::ratio::{rat, rat_int};

    fn coords(lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).collect()
    }

    #[test]
    fn single_piece_witness_passes() {
        let z = line_space(0, 9);
        let w = DecompositionWitness {
            scale: rat_int(100),
            family0: alloc::vec![Piece::new((0..10).collect())],
            family1: alloc::vec![],
        };
        assert!(verify_witness(&z, &w).unwrap().verdict());
    }

    #[test]
    fn strategy_z_passes_and_mutation_fails() {
        let z = line_space(0, 20);
        let w = strategy_z(&coords(0, 20), rat_int(3));
        assert!(verify_witness(&z, &w).unwrap().verdict());
        // family0 holds [0,6) and [12,18): widen the first to touch 6
        let mut bad = w.clone();
        let mut members = bad.family0[0].members().to_vec();
        members.push(11);
        bad.family0[0] = Piece::new(members);
        let report = verify_witness(&z, &bad).unwrap();
        assert!(!report.verdict());
        assert!(report.first_failure().unwrap().name.contains("family0"));
    }

    #[test]
    fn strategy_z_geometry() {
        // unclipped same-family gap is exactly 2r, piece diameter <= 2r-1
        let z = line_space(0, 47);
        let r = rat_int(3);
        let w = strategy_z(&coords(0, 47), r);
        for fam in [&w.family0, &w.family1] {
            for i in 0..fam.len() {
                assert!(diam(&z, &fam[i]).unwrap() <= rat_int(2) * r - rat_int(1));
                for j in (i + 1)..fam.len() {
                    let d = crate::metric::set_distance(&z, &fam[i], &fam[j]).unwrap();
                    assert!(d >= rat_int(2) * r);
                }
            }
        }
    }

    #[test]
    fn strategy_z_singleton_segment() {
        let w = strategy_z(&[0], rat(1, 2));
        assert_eq!(w.produced_pieces().len(), 1);
        let z = line_space(0, 0);
        assert!(verify_witness(&z, &w).unwrap().verdict());
    }

    #[test]
    fn uncovered_point_is_reported() {
        let z = line_space(0, 4);
        let w = DecompositionWitness {
            scale: rat_int(1),
            family0: alloc::vec![Piece::new(alloc::vec![0, 1, 2, 3])],
            family1: alloc::vec![],
        };
        let report = verify_witness(&z, &w).unwrap();
        assert!(!report.verdict());
        assert!(report.first_failure().unwrap().detail.contains("point 4"));
    }

    #[test]
    fn leaf_tree_on_singletons() {
        let fam = MetricFamily::new(alloc::vec![line_space(3, 3), line_space(7, 7)]);
        let tree = WitnessTree::Leaf { bound: rat_int(0) };
        assert!(verify_tree(&fam, &tree).unwrap().verdict());
    }

    #[test]
    fn depth1_tree_on_segment() {
        let fam = MetricFamily::new(alloc::vec![line_space(0, 100)]);
        for r in 1..=16i64 {
            let tree = strategy_z_tree(&coords(0, 100), rat_int(r));
            assert_eq!(tree.depth(), 1);
            assert!(
                verify_tree(&fam, &tree).unwrap().verdict(),
                "r = {r} should verify"
            );
        }
    }

    #[test]
    fn witness_verifies_at_smaller_scales() {
        let z = line_space(0, 40);
        let w = strategy_z(&coords(0, 40), rat_int(4));
        for num in 1..=8 {
            let mut smaller = w.clone();
            smaller.scale = rat(num, 2);
            assert!(verify_witness(&z, &smaller).unwrap().verdict());
        }
    }

    #[test]
    fn product_tree_depth_and_verdict() {
        let a = line_space(0, 30);
        let b = line_space(0, 30);
        let p = product_space(&a, &b);
        let ta = strategy_z_tree(&coords(0, 30), rat_int(4));
        let tb = strategy_z_tree(&coords(0, 30), rat_int(4));
        let tree = strategy_product(&ta, &[a.len()], &tb, b.len());
        assert_eq!(tree.depth(), ta.depth() + tb.depth());
        let fam = MetricFamily::new(alloc::vec![p]);
        let report = verify_tree(&fam, &tree).unwrap();
        assert!(report.verdict(), "{:?}", report.first_failure());
    }

    #[test]
    fn product_with_single_point_keeps_bounds() {
        let a = line_space(0, 12);
        let b = line_space(5, 5);
        let p = product_space(&a, &b);
        let ta = strategy_z_tree(&coords(0, 12), rat_int(2));
        let tb = WitnessTree::Leaf { bound: rat_int(0) };
        let tree = strategy_product(&ta, &[a.len()], &tb, 1);
        assert_eq!(tree.depth(), ta.depth());
        assert!(verify_tree(&MetricFamily::new(alloc::vec![p]), &tree)
            .unwrap()
            .verdict());
        // leaf bound is unchanged: 2r + 0
        fn leaf_bound(t: &WitnessTree) -> Rational {
            match t {
                WitnessTree::Leaf { bound } => *bound,
                WitnessTree::Node { child, .. } => leaf_bound(child),
            }
        }
        assert_eq!(leaf_bound(&tree), rat_int(4));
    }

    #[test]
    fn leaf_times_leaf_adds_bounds() {
        let tree = strategy_product(
            &WitnessTree::Leaf { bound: rat_int(3) },
            &[4],
            &WitnessTree::Leaf { bound: rat_int(5) },
            4,
        );
        assert_eq!(tree, WitnessTree::Leaf { bound: rat_int(8) });
    }

    #[test]
    fn translation_preserves_distances() {
        use crate::group::FinSuppMap;
        use crate::wordmetric::word_length;
        let g = WreathElement::new(FinSuppMap::from_pairs([(1, 2i64)]), 5);
        let piece: Vec<WreathElement<i64>> = (0..6)
            .map(|k| WreathElement::new(FinSuppMap::from_pairs([(k, 1i64)]), k))
            .collect();
        let translated = translate_family(&g, &[piece.clone()]);
        for i in 0..piece.len() {
            for j in 0..piece.len() {
                let d = |a: &WreathElement<i64>, b: &WreathElement<i64>| {
                    word_length(&a.invert().multiply(b))
                };
                assert_eq!(d(&piece[i], &piece[j]), d(&translated[0][i], &translated[0][j]));
            }
        }
        let e = WreathElement::identity();
        assert_eq!(translate_family(&e, &[piece.clone()]), alloc::vec![piece]);
    }
}
