//! Finite metric spaces with exact rational distances, pieces, covers
//! and the scalar cover statistics: diameter, inter-set distance,
//! r-disjointness, multiplicity, d-multiplicity, Lebesgue number,
//! neighborhoods and coarse-map envelope checks.
//!
//! Conventions, fixed once for the whole crate: balls `B_d(x)` are
//! closed (`d(x, y) <= d`), neighborhoods `N_r` are strict (`< r`)
//! unless asked otherwise, and the Lebesgue number is the smallest
//! diameter of a subset contained in no piece (infinite when a piece is
//! the whole space). Under that reading, "every set of diameter <= t
//! fits in a piece" holds exactly when `L > t`.

use alloc::vec::Vec;
use alloc::{format, string::String, vec};

use crate::ratio::{Rational, SplitMix64};
use crate::wordmetric::{BudgetExceeded, CayleyGroup};
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricError {
    ShapeMismatch,
    NonzeroDiagonal { index: usize },
    NotSymmetric { i: usize, j: usize },
    NotPositive { i: usize, j: usize },
    TriangleViolation { i: usize, j: usize, k: usize },
    EmptyPiece,
    DanglingIndex { index: usize },
    NotACover { uncovered: usize },
    BudgetExceeded { limit: usize },
}

impl core::fmt::Display for MetricError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MetricError::ShapeMismatch => write!(f, "distance table is not square"),
            MetricError::NonzeroDiagonal { index } => {
                write!(f, "d(x,x) != 0 at point {index}")
            }
            MetricError::NotSymmetric { i, j } => write!(f, "d({i},{j}) != d({j},{i})"),
            MetricError::NotPositive { i, j } => {
                write!(f, "d({i},{j}) <= 0 for distinct points")
            }
            MetricError::TriangleViolation { i, j, k } => {
                write!(f, "triangle inequality fails on ({i},{j},{k})")
            }
            MetricError::EmptyPiece => write!(f, "operation undefined on an empty piece"),
            MetricError::DanglingIndex { index } => {
                write!(f, "piece references point {index} outside the space")
            }
            MetricError::NotACover { uncovered } => {
                write!(f, "point {uncovered} is not covered by any piece")
            }
            MetricError::BudgetExceeded { limit } => {
                write!(f, "construction exceeded budget of {limit} points")
            }
        }
    }
}

impl From<BudgetExceeded> for MetricError {
    fn from(e: BudgetExceeded) -> Self {
        MetricError::BudgetExceeded { limit: e.limit }
    }
}

/// Exhaustive triangle checking up to this size; deterministic sampling
/// beyond it.
const EXHAUSTIVE_TRIPLES_LIMIT: usize = 128;
const SAMPLED_TRIPLES: usize = 400_000;

/// A finite metric space: labeled points and an exact distance table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
}

impl FiniteMetricSpace {
    /// Validates the metric axioms. Triangle inequality is checked on
    /// all triples up to [`EXHAUSTIVE_TRIPLES_LIMIT`] points and on a
    /// deterministic sample beyond that.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let n = labels.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(MetricError::ShapeMismatch);
        }
        for i in 0..n {
            if !dist[i][i].is_zero() {
                return Err(MetricError::NonzeroDiagonal { index: i });
            }
            for j in (i + 1)..n {
                if dist[i][j] != dist[j][i] {
                    return Err(MetricError::NotSymmetric { i, j });
                }
                if dist[i][j] <= Rational::zero() {
                    return Err(MetricError::NotPositive { i, j });
                }
            }
        }
        let check = |i: usize, j: usize, k: usize| -> Result<(), MetricError> {
            if dist[i][k] > dist[i][j] + dist[j][k] {
                Err(MetricError::TriangleViolation { i, j, k })
            } else {
                Ok(())
            }
        };
        if n <= EXHAUSTIVE_TRIPLES_LIMIT {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        check(i, j, k)?;
                    }
                }
            }
        } else {
            let mut rng = SplitMix64::new(0xC0A45E_u64);
            for _ in 0..SAMPLED_TRIPLES {
                check(rng.below(n), rng.below(n), rng.below(n))?;
            }
        }
        Ok(Self { labels, dist })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, i: usize, j: usize) -> Rational {
        self.dist[i][j]
    }

    pub fn dist_table(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    /// Subspace on `members` with the induced metric.
    pub fn induced(&self, members: &[usize]) -> FiniteMetricSpace {
        let labels = members.iter().map(|&i| self.labels[i].clone()).collect();
        let dist = members
            .iter()
            .map(|&i| members.iter().map(|&j| self.dist[i][j]).collect())
            .collect();
        // induced tables inherit the axioms
        FiniteMetricSpace { labels, dist }
    }

    /// Every distinct pairwise distance, ascending.
    pub fn realized_distances(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                out.push(self.dist[i][j]);
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// A subset of a space's points, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    members: Vec<usize>,
}

impl Piece {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn contains_all(&self, other: &[usize]) -> bool {
        other.iter().all(|&i| self.contains(i))
    }

    fn check_in(&self, space: &FiniteMetricSpace) -> Result<(), MetricError> {
        match self.members.iter().find(|&&i| i >= space.len()) {
            Some(&i) => Err(MetricError::DanglingIndex { index: i }),
            None => Ok(()),
        }
    }
}

/// An indexed family of pieces over one space. Whether it must cover the
/// space is checked on demand; some families are not covers by
/// themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub pieces: Vec<Piece>,
}

impl Cover {
    pub fn new(pieces: Vec<Piece>) -> Self {
        Self { pieces }
    }

    pub fn check_in(&self, space: &FiniteMetricSpace) -> Result<(), MetricError> {
        for p in &self.pieces {
            p.check_in(space)?;
        }
        Ok(())
    }

    pub fn check_covers(&self, space: &FiniteMetricSpace) -> Result<(), MetricError> {
        self.check_in(space)?;
        for x in 0..space.len() {
            if !self.pieces.iter().any(|p| p.contains(x)) {
                return Err(MetricError::NotACover { uncovered: x });
            }
        }
        Ok(())
    }
}

/// A list of finite metric spaces.
#[derive(Clone, Debug)]
pub struct MetricFamily {
    pub spaces: Vec<FiniteMetricSpace>,
}

impl MetricFamily {
    pub fn new(spaces: Vec<FiniteMetricSpace>) -> Self {
        Self { spaces }
    }
}

/// `diam U = max d(x, y)` over pairs of `U`; zero on singletons.
pub fn diam(space: &FiniteMetricSpace, piece: &Piece) -> Result<Rational, MetricError> {
    piece.check_in(space)?;
    if piece.is_empty() {
        return Err(MetricError::EmptyPiece);
    }
    let mut best = Rational::zero();
    for (a, &i) in piece.members.iter().enumerate() {
        for &j in &piece.members[a + 1..] {
            best = best.max(space.dist(i, j));
        }
    }
    Ok(best)
}

/// `d(U, V) = min d(x, y)` over cross pairs.
pub fn set_distance(
    space: &FiniteMetricSpace,
    u: &Piece,
    v: &Piece,
) -> Result<Rational, MetricError> {
    u.check_in(space)?;
    v.check_in(space)?;
    if u.is_empty() || v.is_empty() {
        return Err(MetricError::EmptyPiece);
    }
    let mut best: Option<Rational> = None;
    for &i in &u.members {
        for &j in &v.members {
            let d = space.dist(i, j);
            best = Some(match best {
                Some(b) => b.min(d),
                None => d,
            });
        }
    }
    Ok(best.unwrap())
}

/// Distance from a single point to a piece.
pub fn point_set_distance(
    space: &FiniteMetricSpace,
    x: usize,
    v: &Piece,
) -> Result<Rational, MetricError> {
    set_distance(space, &Piece::new(vec![x]), v)
}

/// True iff all distinct pairs of (nonempty) pieces are at distance >= r.
pub fn is_r_disjoint(
    space: &FiniteMetricSpace,
    family: &[Piece],
    r: Rational,
) -> Result<bool, MetricError> {
    match r_disjoint_violation(space, family, r)? {
        Some(_) => Ok(false),
        None => Ok(true),
    }
}

/// First violating pair of pieces, if any.
pub fn r_disjoint_violation(
    space: &FiniteMetricSpace,
    family: &[Piece],
    r: Rational,
) -> Result<Option<(usize, usize)>, MetricError> {
    for i in 0..family.len() {
        if family[i].is_empty() {
            continue;
        }
        for j in (i + 1)..family.len() {
            if family[j].is_empty() {
                continue;
            }
            if set_distance(space, &family[i], &family[j])? < r {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// Maximal number of pieces sharing a common point.
pub fn multiplicity(space: &FiniteMetricSpace, cover: &Cover) -> Result<usize, MetricError> {
    cover.check_in(space)?;
    Ok((0..space.len())
        .map(|x| cover.pieces.iter().filter(|p| p.contains(x)).count())
        .max()
        .unwrap_or(0))
}

/// Largest number of pieces met by a closed ball `B_d(x)`.
pub fn d_multiplicity(
    space: &FiniteMetricSpace,
    cover: &Cover,
    d: Rational,
) -> Result<usize, MetricError> {
    cover.check_in(space)?;
    Ok((0..space.len())
        .map(|x| {
            cover
                .pieces
                .iter()
                .filter(|p| {
                    !p.is_empty()
                        && point_set_distance(space, x, p).expect("nonempty checked") <= d
                })
                .count()
        })
        .max()
        .unwrap_or(0))
}

/// The Lebesgue number of a cover on a finite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lebesgue {
    Finite(Rational),
    Infinite,
}

impl Lebesgue {
    pub fn exceeds(&self, t: Rational) -> bool {
        match self {
            Lebesgue::Infinite => true,
            Lebesgue::Finite(v) => *v > t,
        }
    }

    pub fn at_least(&self, t: Rational) -> bool {
        match self {
            Lebesgue::Infinite => true,
            Lebesgue::Finite(v) => *v >= t,
        }
    }
}

/// Smallest diameter of a subset contained in no piece; `Infinite` when
/// every subset (in particular the whole space) fits in some piece.
///
/// Computed by scanning threshold graphs at each realized distance and
/// enumerating their maximal cliques: every set of diameter <= t is a
/// clique of the threshold graph at t, and containment of all maximal
/// cliques implies containment of all cliques. Exponential in the worst
/// case; inputs are desk-scale by contract.
pub fn lebesgue_number(space: &FiniteMetricSpace, cover: &Cover) -> Result<Lebesgue, MetricError> {
    cover.check_covers(space)?;
    let n = space.len();
    let whole = Piece::new((0..n).collect());
    if cover.pieces.iter().any(|p| p == &whole) {
        return Ok(Lebesgue::Infinite);
    }
    for t in space.realized_distances() {
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                adj[i][j] = i != j && space.dist(i, j) <= t;
            }
        }
        for clique in maximal_cliques(&adj) {
            if !cover.pieces.iter().any(|p| p.contains_all(&clique)) {
                return Ok(Lebesgue::Finite(t));
            }
        }
    }
    Ok(Lebesgue::Infinite)
}

/// Bron–Kerbosch with pivoting over an adjacency matrix. Cliques are
/// returned as sorted index lists.
pub fn maximal_cliques(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut out = Vec::new();
    let mut r = Vec::new();
    let p: Vec<usize> = (0..n).collect();
    let x = Vec::new();
    bron_kerbosch(adj, &mut r, p, x, &mut out);
    out
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: &mut Vec<usize>,
    p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        let mut clique = r.clone();
        clique.sort_unstable();
        out.push(clique);
        return;
    }
    // pivot: vertex of P ∪ X with most neighbors in P
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .unwrap();
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    let mut p = p;
    for v in candidates {
        r.push(v);
        let next_p: Vec<usize> = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let next_x: Vec<usize> = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r, next_p, next_x, out);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// `{x : d(x, V) < radius}` when `strict`, `<=` otherwise.
pub fn enlarge(
    space: &FiniteMetricSpace,
    v: &Piece,
    radius: Rational,
    strict: bool,
) -> Result<Piece, MetricError> {
    v.check_in(space)?;
    if v.is_empty() {
        return Err(MetricError::EmptyPiece);
    }
    let members = (0..space.len())
        .filter(|&x| {
            let d = point_set_distance(space, x, v).expect("nonempty");
            if strict {
                d < radius
            } else {
                d <= radius
            }
        })
        .collect();
    Ok(Piece::new(members))
}

/// Non-decreasing staircase on the nonnegative rationals, given by
/// breakpoints plus a final slope past the last breakpoint. A positive
/// final slope encodes properness (the function is unbounded).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Staircase {
    breakpoints: Vec<(Rational, Rational)>,
    final_slope: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeError {
    Empty,
    NotSorted,
    NotMonotone,
    NegativeSlope,
}

impl core::fmt::Display for EnvelopeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EnvelopeError::Empty => write!(f, "staircase needs at least one breakpoint"),
            EnvelopeError::NotSorted => write!(f, "breakpoints must be strictly increasing"),
            EnvelopeError::NotMonotone => write!(f, "staircase values must be non-decreasing"),
            EnvelopeError::NegativeSlope => write!(f, "final slope must be nonnegative"),
        }
    }
}

impl Staircase {
    pub fn new(
        breakpoints: Vec<(Rational, Rational)>,
        final_slope: Rational,
    ) -> Result<Self, EnvelopeError> {
        if breakpoints.is_empty() {
            return Err(EnvelopeError::Empty);
        }
        for w in breakpoints.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(EnvelopeError::NotSorted);
            }
            if w[0].1 > w[1].1 {
                return Err(EnvelopeError::NotMonotone);
            }
        }
        if final_slope < Rational::zero() {
            return Err(EnvelopeError::NegativeSlope);
        }
        Ok(Self {
            breakpoints,
            final_slope,
        })
    }

    /// The identity staircase `t ↦ t` (unit slope from zero).
    pub fn identity() -> Self {
        Self::new(vec![(Rational::zero(), Rational::zero())], Rational::from_integer(1)).unwrap()
    }

    pub fn is_proper(&self) -> bool {
        self.final_slope > Rational::zero()
    }

    pub fn value(&self, t: Rational) -> Rational {
        let (last_t, last_v) = *self.breakpoints.last().unwrap();
        if t >= last_t {
            return last_v + self.final_slope * (t - last_t);
        }
        let mut v = self.breakpoints[0].1;
        for &(bt, bv) in &self.breakpoints {
            if bt <= t {
                v = bv;
            } else {
                break;
            }
        }
        v
    }
}

/// Upper envelope `theta` and lower proper envelope `delta` of a coarse
/// embedding.
#[derive(Clone, Debug)]
pub struct CoarseEnvelope {
    pub theta: Staircase,
    pub delta: Staircase,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeViolation {
    pub pair: usize,
    pub source: Rational,
    pub target: Rational,
    pub upper_ok: bool,
    pub lower_ok: bool,
}

#[derive(Clone, Debug)]
pub struct CoarseMapReport {
    pub checked: usize,
    pub violations: Vec<EnvelopeViolation>,
}

impl CoarseMapReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `delta(d(x,y)) <= d(f(x),f(y)) <= theta(d(x,y))` on a sampled
/// map graph, given as (source distance, target distance) pairs.
pub fn verify_coarse_map(pairs: &[(Rational, Rational)], env: &CoarseEnvelope) -> CoarseMapReport {
    let mut violations = Vec::new();
    for (k, &(ds, dt)) in pairs.iter().enumerate() {
        let upper_ok = dt <= env.theta.value(ds);
        let lower_ok = dt >= env.delta.value(ds);
        if !(upper_ok && lower_ok) {
            violations.push(EnvelopeViolation {
                pair: k,
                source: ds,
                target: dt,
                upper_ok,
                lower_ok,
            });
        }
    }
    CoarseMapReport {
        checked: pairs.len(),
        violations,
    }
}

/// The integer segment `[lo, hi]` with the line metric.
pub fn line_space(lo: i64, hi: i64) -> FiniteMetricSpace {
    assert!(lo <= hi);
    let points: Vec<i64> = (lo..=hi).collect();
    integer_point_space(&points.iter().map(|&x| vec![x]).collect::<Vec<_>>(), &[1])
}

/// A `w × h` integer grid with the l1 metric.
pub fn grid_space(w: usize, h: usize) -> FiniteMetricSpace {
    let mut points = Vec::new();
    for x in 0..w as i64 {
        for y in 0..h as i64 {
            points.push(vec![x, y]);
        }
    }
    integer_point_space(&points, &[1, 1])
}

/// Space of integer vectors with the weighted l1 metric
/// `d(g, h) = Σ weight_n · |g_n - h_n|`.
pub fn integer_point_space(points: &[Vec<i64>], weights: &[i64]) -> FiniteMetricSpace {
    let labels = points
        .iter()
        .map(|p| {
            let coords: Vec<String> = p.iter().map(|c| format!("{c}")).collect();
            format!("({})", coords.join(","))
        })
        .collect();
    let dist = points
        .iter()
        .map(|p| {
            points
                .iter()
                .map(|q| {
                    let sum: i64 = p
                        .iter()
                        .zip(q)
                        .zip(weights)
                        .map(|((a, b), w)| w * (a - b).abs())
                        .sum();
                    Rational::from_integer(sum)
                })
                .collect()
        })
        .collect();
    // a weighted l1 metric satisfies the axioms by construction
    FiniteMetricSpace {
        labels,
        dist,
    }
}

/// All integer vectors supported on `[1, max_index]` with entries in
/// `[-value_bound, value_bound]`, metric `d_1(g, h) = Σ n·|g_n - h_n|`.
/// Returns the space together with the vectors backing each point.
pub fn weighted_direct_sum_space(
    max_index: usize,
    value_bound: i64,
    budget: usize,
) -> Result<(FiniteMetricSpace, Vec<Vec<i64>>), MetricError> {
    assert!(max_index >= 1 && value_bound >= 1);
    let per_coord = 2 * value_bound as usize + 1;
    let mut count: usize = 1;
    for _ in 0..max_index {
        count = count
            .checked_mul(per_coord)
            .filter(|&c| c <= budget)
            .ok_or(MetricError::BudgetExceeded { limit: budget })?;
    }
    let mut points: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..max_index {
        let mut next = Vec::with_capacity(points.len() * per_coord);
        for p in &points {
            for v in -value_bound..=value_bound {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        points = next;
    }
    let weights: Vec<i64> = (1..=max_index as i64).collect();
    Ok((integer_point_space(&points, &weights), points))
}

/// Ball of a group as a metric space: points from BFS, distances
/// `d(g, h) = length(g^{-1} h)` (the induced metric, which may exceed
/// the ball radius). Returns the elements backing each point, in order.
pub fn ball_space<G: CayleyGroup>(
    group: &G,
    radius: u32,
    budget: usize,
    distance: impl Fn(&G::Elem, &G::Elem) -> u64,
    label: impl Fn(&G::Elem) -> String,
) -> Result<(FiniteMetricSpace, Vec<G::Elem>), MetricError> {
    let table = crate::wordmetric::bfs_ball(group, radius, budget)?;
    let elements: Vec<G::Elem> = table.lengths.keys().cloned().collect();
    let labels = elements.iter().map(&label).collect();
    let dist = elements
        .iter()
        .map(|g| {
            elements
                .iter()
                .map(|h| Rational::from_integer(distance(g, h) as i64))
                .collect()
        })
        .collect();
    // left-invariant word metrics satisfy the axioms by construction
    Ok((FiniteMetricSpace { labels, dist }, elements))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{rat, rat_int};

    fn piece(members: &[usize]) -> Piece {
        Piece::new(members.to_vec())
    }

    #[test]
    fn axioms_are_enforced() {
        let bad = FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![rat_int(0), rat_int(1), rat_int(5)],
                vec![rat_int(1), rat_int(0), rat_int(1)],
                vec![rat_int(5), rat_int(1), rat_int(0)],
            ],
        );
        assert_eq!(
            bad,
            Err(MetricError::TriangleViolation { i: 0, j: 1, k: 2 })
        );
        assert!(FiniteMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![rat_int(0), rat_int(2)], vec![rat_int(2), rat_int(0)]],
        )
        .is_ok());
    }

    #[test]
    fn diam_and_set_distance() {
        let z = line_space(0, 9);
        assert_eq!(diam(&z, &piece(&[3])).unwrap(), rat_int(0));
        assert_eq!(diam(&z, &piece(&[0, 1, 2])).unwrap(), rat_int(2));
        assert_eq!(
            set_distance(&z, &piece(&[0, 1]), &piece(&[4, 9])).unwrap(),
            rat_int(3)
        );
        assert_eq!(
            set_distance(&z, &piece(&[0, 5]), &piece(&[5])).unwrap(),
            rat_int(0)
        );
        assert_eq!(diam(&z, &piece(&[])), Err(MetricError::EmptyPiece));
    }

    #[test]
    fn euclidean_squared_example() {
        // {(0,0), (3,4)} with the distance-5 table
        let space = FiniteMetricSpace::new(
            vec!["(0,0)".into(), "(3,4)".into()],
            vec![vec![rat_int(0), rat_int(5)], vec![rat_int(5), rat_int(0)]],
        )
        .unwrap();
        assert_eq!(diam(&space, &piece(&[0, 1])).unwrap(), rat_int(5));
    }

    #[test]
    fn r_disjointness() {
        let z = line_space(0, 9);
        let fam = [piece(&[0, 1]), piece(&[4, 5])];
        assert!(is_r_disjoint(&z, &fam, rat_int(3)).unwrap());
        assert!(!is_r_disjoint(&z, &fam, rat_int(4)).unwrap());
        assert!(is_r_disjoint(&z, &fam[..1], rat_int(100)).unwrap());
    }

    #[test]
    fn multiplicity_examples() {
        let z = line_space(0, 5);
        let partition = Cover::new(vec![piece(&[0, 1, 2]), piece(&[3, 4, 5])]);
        assert_eq!(multiplicity(&z, &partition).unwrap(), 1);
        let overlap = Cover::new(vec![piece(&[0, 1, 2]), piece(&[2, 3, 4])]);
        assert_eq!(multiplicity(&z, &overlap).unwrap(), 2);
        let chain = Cover::new(vec![
            piece(&[0, 1, 2, 3]),
            piece(&[1, 2, 3, 4]),
            piece(&[2, 3, 4, 5]),
        ]);
        assert_eq!(multiplicity(&z, &chain).unwrap(), 3);
    }

    #[test]
    fn d_multiplicity_examples() {
        let z = line_space(0, 9);
        let cover = Cover::new(vec![piece(&[0, 1]), piece(&[4, 5])]);
        assert_eq!(d_multiplicity(&z, &cover, rat_int(2)).unwrap(), 2);
        assert_eq!(d_multiplicity(&z, &cover, rat_int(1)).unwrap(), 1);
        // closed-ball convention: d = 0 matches multiplicity
        let overlap = Cover::new(vec![piece(&[0, 1, 2]), piece(&[2, 3])]);
        assert_eq!(
            d_multiplicity(&z, &overlap, rat_int(0)).unwrap(),
            multiplicity(&z, &overlap).unwrap()
        );
    }

    #[test]
    fn enlarge_examples() {
        let z = line_space(0, 9);
        let v = piece(&[2, 3]);
        assert_eq!(enlarge(&z, &v, rat_int(0), false).unwrap(), v);
        assert_eq!(
            enlarge(&z, &v, rat_int(2), true).unwrap(),
            piece(&[1, 2, 3, 4])
        );
        assert_eq!(
            enlarge(&z, &v, rat_int(2), false).unwrap(),
            piece(&[0, 1, 2, 3, 4, 5])
        );
    }

    #[test]
    fn lebesgue_whole_space_is_infinite() {
        let z = line_space(0, 4);
        let cover = Cover::new(vec![piece(&[0, 1, 2, 3, 4])]);
        assert_eq!(lebesgue_number(&z, &cover).unwrap(), Lebesgue::Infinite);
    }

    /// Ground-truth oracle: every nonempty subset, smallest failing
    /// diameter.
    fn lebesgue_oracle(space: &FiniteMetricSpace, cover: &Cover) -> Lebesgue {
        let n = space.len();
        assert!(n <= 16);
        let mut best: Option<Rational> = None;
        for mask in 1u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if cover.pieces.iter().any(|p| p.contains_all(&subset)) {
                continue;
            }
            let d = diam(space, &Piece::new(subset)).unwrap();
            best = Some(match best {
                Some(b) => b.min(d),
                None => d,
            });
        }
        match best {
            Some(d) => Lebesgue::Finite(d),
            None => Lebesgue::Infinite,
        }
    }

    #[test]
    fn lebesgue_matches_subset_oracle() {
        let z = line_space(0, 4);
        let cover = Cover::new(vec![piece(&[0, 1, 2]), piece(&[2, 3, 4])]);
        let l = lebesgue_number(&z, &cover).unwrap();
        assert_eq!(l, lebesgue_oracle(&z, &cover));
        // the set {1, 3} has diameter 2 and fits in neither piece
        assert_eq!(l, Lebesgue::Finite(rat_int(2)));

        let z6 = line_space(0, 5);
        let cover6 = Cover::new(vec![piece(&[0, 1, 2, 3]), piece(&[2, 3, 4, 5])]);
        assert_eq!(
            lebesgue_number(&z6, &cover6).unwrap(),
            lebesgue_oracle(&z6, &cover6)
        );
    }

    #[test]
    fn lebesgue_exceeds_matches_fitting() {
        // L > t iff every subset of diameter <= t fits in a piece
        let z = line_space(0, 6);
        let cover = Cover::new(vec![piece(&[0, 1, 2, 3]), piece(&[3, 4, 5, 6])]);
        let l = lebesgue_number(&z, &cover).unwrap();
        for t in 0..7 {
            let t = rat_int(t);
            let fits = (1u32..(1 << 7)).all(|mask| {
                let subset: Vec<usize> = (0..7).filter(|&i| mask & (1 << i) != 0).collect();
                let p = Piece::new(subset);
                diam(&z, &p).unwrap() > t || cover.pieces.iter().any(|q| q.contains_all(p.members()))
            });
            assert_eq!(l.exceeds(t), fits, "at t = {t}");
        }
    }

    #[test]
    fn weighted_sum_space_example() {
        let (space, points) = weighted_direct_sum_space(1, 1, 100).unwrap();
        assert_eq!(space.len(), 3);
        let g = points.iter().position(|p| p == &vec![-1]).unwrap();
        let h = points.iter().position(|p| p == &vec![1]).unwrap();
        assert_eq!(space.dist(g, h), rat_int(2));

        let (space2, points2) = weighted_direct_sum_space(2, 1, 100).unwrap();
        assert_eq!(space2.len(), 9);
        let g = points2.iter().position(|p| p == &vec![1, 0]).unwrap();
        let h = points2.iter().position(|p| p == &vec![0, 1]).unwrap();
        // d_1 = 1·1 + 2·1 = 3
        assert_eq!(space2.dist(g, h), rat_int(3));
    }

    #[test]
    fn staircase_envelopes() {
        let env = CoarseEnvelope {
            theta: Staircase::identity(),
            delta: Staircase::identity(),
        };
        // identity map passes
        let pairs: Vec<(Rational, Rational)> =
            (0..5).map(|d| (rat_int(d), rat_int(d))).collect();
        assert!(verify_coarse_map(&pairs, &env).pass());
        // doubling map fails the upper envelope at any distance >= 1
        let doubled: Vec<(Rational, Rational)> =
            (1..5).map(|d| (rat_int(d), rat_int(2 * d))).collect();
        let report = verify_coarse_map(&doubled, &env);
        assert!(!report.pass());
        assert!(report.violations.iter().all(|v| !v.upper_ok && v.lower_ok));
        // staircase value lookup
        let s = Staircase::new(vec![(rat_int(0), rat_int(1)), (rat_int(2), rat_int(4))], rat(1, 2))
            .unwrap();
        assert_eq!(s.value(rat_int(1)), rat_int(1));
        assert_eq!(s.value(rat_int(2)), rat_int(4));
        assert_eq!(s.value(rat_int(4)), rat_int(5));
    }

    #[test]
    fn ball_space_radius_zero() {
        use crate::wordmetric::{word_length, LamplighterGroup};
        let (space, elems) = ball_space(
            &LamplighterGroup,
            0,
            10,
            |g, h| word_length(&g.invert().multiply(h)),
            |e| format!("{e:?}"),
        )
        .unwrap();
        assert_eq!(space.len(), 1);
        assert_eq!(elems.len(), 1);
    }
}
