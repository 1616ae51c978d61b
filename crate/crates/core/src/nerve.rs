//! Nerves of multiplicity-2 covers, uniform 1-complex geometry, the
//! partition-of-unity map with its certified Lipschitz bound, barycentric
//! subdivision with star predicates, and the six cover transforms
//! connecting the five equivalent descriptions of complexity-ω spaces.
//!
//! All geometry in the ambient simplex is exact: only squared l2
//! distances are ever computed, so every certified inequality is a
//! rational comparison.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::metric::{
    d_multiplicity, diam, enlarge, is_r_disjoint, lebesgue_number, multiplicity,
    point_set_distance, r_disjoint_violation, Cover, FiniteMetricSpace, Lebesgue, MetricError,
    Piece,
};
use crate::ratio::{format_rational, Rational};
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
pub enum NerveError {
    Metric(MetricError),
    /// A 2-simplex would be needed: three pieces share a point.
    MultiplicityTooHigh { found: usize },
    /// The partition-of-unity formula divides by distances to
    /// complements; a piece equal to the whole space has none.
    PieceEqualsSpace { piece: usize },
    /// A stated precondition of a transform does not hold.
    Precondition { what: String },
    /// An output contract was violated (only reachable through a broken
    /// external oracle or map sample).
    Contract { what: String },
}

impl From<MetricError> for NerveError {
    fn from(e: MetricError) -> Self {
        NerveError::Metric(e)
    }
}

impl core::fmt::Display for NerveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NerveError::Metric(e) => write!(f, "{e}"),
            NerveError::MultiplicityTooHigh { found } => {
                write!(f, "cover multiplicity {found} > 2: nerve is not 1-dimensional")
            }
            NerveError::PieceEqualsSpace { piece } => {
                write!(f, "piece {piece} equals the whole space")
            }
            NerveError::Precondition { what } => write!(f, "precondition violated: {what}"),
            NerveError::Contract { what } => write!(f, "contract violated: {what}"),
        }
    }
}

/// A 1-dimensional uniform simplicial complex: vertices sit at
/// orthonormal basis elements of l2, edges are unit simplices between
/// them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformComplex1 {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl UniformComplex1 {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = edges
            .into_iter()
            .map(|(a, b)| {
                assert!(a != b, "no loops in a simplicial complex");
                assert!(a < vertex_count && b < vertex_count);
                (a.min(b), a.max(b))
            })
            .collect();
        Self {
            vertex_count,
            edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// A point of a 1-complex: a vertex, or an interior point of an edge
/// with barycentric coordinate `t ∈ (0, 1)` measured towards `hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexPoint {
    Vertex(usize),
    Edge { lo: usize, hi: usize, t: Rational },
}

impl ComplexPoint {
    /// Canonical constructor: `t ∈ {0, 1}` collapses to a vertex.
    pub fn on_edge(a: usize, b: usize, t_towards_b: Rational) -> Self {
        assert!(t_towards_b >= Rational::zero() && t_towards_b <= Rational::from_integer(1));
        assert!(a != b);
        let (lo, hi, t) = if a < b {
            (a, b, t_towards_b)
        } else {
            (b, a, Rational::from_integer(1) - t_towards_b)
        };
        if t.is_zero() {
            ComplexPoint::Vertex(lo)
        } else if t == Rational::from_integer(1) {
            ComplexPoint::Vertex(hi)
        } else {
            ComplexPoint::Edge { lo, hi, t }
        }
    }

    /// Coordinates in the ambient simplex, vertex index -> weight.
    pub fn coords(&self) -> BTreeMap<usize, Rational> {
        match self {
            ComplexPoint::Vertex(v) => BTreeMap::from([(*v, Rational::from_integer(1))]),
            ComplexPoint::Edge { lo, hi, t } => {
                BTreeMap::from([(*lo, Rational::from_integer(1) - t), (*hi, *t)])
            }
        }
    }
}

/// Exact squared l2 distance between two points of the same complex.
pub fn complex_distance_sq(p: &ComplexPoint, q: &ComplexPoint) -> Rational {
    let a = p.coords();
    let b = q.coords();
    let keys: BTreeSet<usize> = a.keys().chain(b.keys()).copied().collect();
    keys.into_iter()
        .map(|k| {
            let d = a.get(&k).copied().unwrap_or_else(Rational::zero)
                - b.get(&k).copied().unwrap_or_else(Rational::zero);
            d * d
        })
        .sum()
}

/// Nerve of a multiplicity-<=2 cover: one vertex per piece, an edge per
/// intersecting pair. Empty pieces become isolated vertices.
pub fn nerve(space: &FiniteMetricSpace, cover: &Cover) -> Result<UniformComplex1, NerveError> {
    let m = multiplicity(space, cover)?;
    if m > 2 {
        return Err(NerveError::MultiplicityTooHigh { found: m });
    }
    let mut edges = BTreeSet::new();
    for i in 0..cover.pieces.len() {
        for j in (i + 1)..cover.pieces.len() {
            let meet = cover.pieces[i]
                .members()
                .iter()
                .any(|&x| cover.pieces[j].contains(x));
            if meet {
                edges.insert((i, j));
            }
        }
    }
    Ok(UniformComplex1::new(cover.pieces.len(), edges))
}

/// The map `φ_W(x) = d(x, X−W) / Σ_V d(x, X−V)`, stored as one sparse
/// rational vector per point. Entries are positive exactly on the pieces
/// containing the point, sum to 1, and have support of size <= 2.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionOfUnity {
    piece_count: usize,
    values: Vec<Vec<(usize, Rational)>>,
}

impl PartitionOfUnity {
    pub fn piece_count(&self) -> usize {
        self.piece_count
    }

    pub fn point_count(&self) -> usize {
        self.values.len()
    }

    /// Sparse value vector at point `x` (only positive entries).
    pub fn values_at(&self, x: usize) -> &[(usize, Rational)] {
        &self.values[x]
    }

    /// The image of point `x` as a point of the nerve.
    pub fn image(&self, x: usize) -> ComplexPoint {
        match self.values[x].as_slice() {
            [(v, _)] => ComplexPoint::Vertex(*v),
            [(a, _), (b, tb)] => ComplexPoint::on_edge(*a, *b, if a < b { *tb } else { panic!() }),
            other => panic!("support size {} out of range", other.len()),
        }
    }

    /// `φ^{-1}(st W)`: the points with positive `W` coordinate (open
    /// stars in the nerve).
    pub fn star_preimage(&self, w: usize) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&x| self.values[x].iter().any(|&(v, _)| v == w))
            .collect()
    }
}

/// Builds the partition of unity for a cover with multiplicity <= 2,
/// none of whose pieces is the whole space.
pub fn phi_map(
    space: &FiniteMetricSpace,
    cover: &Cover,
) -> Result<PartitionOfUnity, NerveError> {
    cover.check_covers(space)?;
    let m = multiplicity(space, cover)?;
    if m > 2 {
        return Err(NerveError::MultiplicityTooHigh { found: m });
    }
    let complements: Vec<Piece> = cover
        .pieces
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let c = Piece::new((0..space.len()).filter(|&x| !p.contains(x)).collect());
            if c.is_empty() {
                Err(NerveError::PieceEqualsSpace { piece: k })
            } else {
                Ok(c)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut values = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        let dists: Vec<Rational> = complements
            .iter()
            .map(|c| point_set_distance(space, x, c).expect("complement nonempty"))
            .collect();
        let total: Rational = dists.iter().copied().sum();
        debug_assert!(total > Rational::zero());
        let entries: Vec<(usize, Rational)> = dists
            .iter()
            .enumerate()
            .filter(|(_, d)| **d > Rational::zero())
            .map(|(k, d)| (k, *d / total))
            .collect();
        values.push(entries);
    }
    Ok(PartitionOfUnity {
        piece_count: cover.pieces.len(),
        values,
    })
}

#[derive(Clone, Debug)]
pub struct LipschitzReport {
    pub pairs_checked: usize,
    /// max over pairs of `‖φ(x)−φ(y)‖² / d(x,y)²`.
    pub max_ratio_sq: Rational,
    /// `400 / λ²`.
    pub bound_sq: Rational,
    pub pass: bool,
}

/// Certifies `‖φ(x)−φ(y)‖² <= (400/λ²)·d(x,y)²` over all point pairs.
/// Preconditions: `L(cover) > λ` and multiplicity <= 2.
pub fn lipschitz_bound_check(
    space: &FiniteMetricSpace,
    cover: &Cover,
    pou: &PartitionOfUnity,
    lambda: Rational,
) -> Result<LipschitzReport, NerveError> {
    if lambda <= Rational::zero() {
        return Err(NerveError::Precondition {
            what: "lambda must be positive".into(),
        });
    }
    if !lebesgue_number(space, cover)?.exceeds(lambda) {
        return Err(NerveError::Precondition {
            what: format!("Lebesgue number must exceed lambda = {}", format_rational(&lambda)),
        });
    }
    let m = multiplicity(space, cover)?;
    if m > 2 {
        return Err(NerveError::MultiplicityTooHigh { found: m });
    }
    let bound_sq = Rational::from_integer(400) / (lambda * lambda);
    let mut max_ratio_sq = Rational::zero();
    let mut pairs_checked = 0;
    for x in 0..space.len() {
        for y in (x + 1)..space.len() {
            let num = complex_distance_sq(&pou.image(x), &pou.image(y));
            let den = space.dist(x, y) * space.dist(x, y);
            let ratio = num / den;
            max_ratio_sq = max_ratio_sq.max(ratio);
            pairs_checked += 1;
        }
    }
    Ok(LipschitzReport {
        pairs_checked,
        max_ratio_sq,
        bound_sq,
        pass: max_ratio_sq <= bound_sq,
    })
}

/// A vertex of the `level`-th barycentric subdivision of a 1-complex:
/// an original vertex, or the point `num / 2^level` of the way along a
/// base edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DerivedVertex {
    Vertex(usize),
    OnEdge { lo: usize, hi: usize, num: u32 },
}

/// Provenance of a derived vertex within the subdivision tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// A vertex of the base complex (the barycenter of a 0-simplex).
    Original,
    /// Introduced as an edge barycenter at the given subdivision step.
    Barycenter { step: u32 },
}

/// The `level`-fold barycentric subdivision of a 1-complex; each base
/// edge splits into `2^level` equal segments.
#[derive(Clone, Debug)]
pub struct SubdividedComplex {
    pub base: UniformComplex1,
    pub level: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubdivisionError {
    pub times: u32,
}

impl core::fmt::Display for SubdivisionError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "subdivision level {} unsupported (expected 1 or 2)", self.times)
    }
}

pub fn barycentric_subdivide(
    base: &UniformComplex1,
    times: u32,
) -> Result<SubdividedComplex, SubdivisionError> {
    if times == 0 || times > 2 {
        return Err(SubdivisionError { times });
    }
    Ok(SubdividedComplex {
        base: base.clone(),
        level: times,
    })
}

impl SubdividedComplex {
    pub fn segments_per_edge(&self) -> u32 {
        1 << self.level
    }

    pub fn derived_vertices(&self) -> Vec<DerivedVertex> {
        let mut out: Vec<DerivedVertex> =
            (0..self.base.vertex_count()).map(DerivedVertex::Vertex).collect();
        for (lo, hi) in self.base.edges() {
            for num in 1..self.segments_per_edge() {
                out.push(DerivedVertex::OnEdge { lo, hi, num });
            }
        }
        out
    }

    pub fn provenance(&self, v: &DerivedVertex) -> Provenance {
        match v {
            DerivedVertex::Vertex(_) => Provenance::Original,
            DerivedVertex::OnEdge { num, .. } => {
                // reduce num/2^level: the step is level minus the number
                // of trailing halvings
                let mut num = *num;
                let mut step = self.level;
                while num % 2 == 0 {
                    num /= 2;
                    step -= 1;
                }
                Provenance::Barycenter { step }
            }
        }
    }

    fn position(&self, v: &DerivedVertex) -> Rational {
        match v {
            DerivedVertex::Vertex(_) => Rational::zero(),
            DerivedVertex::OnEdge { num, .. } => {
                Rational::new(*num as i64, self.segments_per_edge() as i64)
            }
        }
    }

    /// Membership of a point in the star of a derived vertex: the set of
    /// points whose carrier simplex in the subdivision contains `v`.
    /// `closed = false` gives the open star, `closed = true` its closure.
    pub fn star_contains(&self, v: &DerivedVertex, p: &ComplexPoint, closed: bool) -> bool {
        let h = Rational::new(1, self.segments_per_edge() as i64);
        let within = |d: Rational| if closed { d <= h } else { d < h };
        match (v, p) {
            (DerivedVertex::Vertex(u), ComplexPoint::Vertex(w)) => u == w,
            (DerivedVertex::Vertex(u), ComplexPoint::Edge { lo, hi, t }) => {
                if u == lo {
                    within(*t)
                } else if u == hi {
                    within(Rational::from_integer(1) - t)
                } else {
                    false
                }
            }
            (DerivedVertex::OnEdge { lo, hi, .. }, ComplexPoint::Vertex(w)) => {
                let pos = self.position(v);
                if w == lo {
                    within(pos)
                } else if w == hi {
                    within(Rational::from_integer(1) - pos)
                } else {
                    false
                }
            }
            (
                DerivedVertex::OnEdge { lo, hi, .. },
                ComplexPoint::Edge {
                    lo: plo,
                    hi: phi,
                    t,
                },
            ) => {
                if lo != plo || hi != phi {
                    return false;
                }
                let pos = self.position(v);
                let d = if *t >= pos { *t - pos } else { pos - *t };
                within(d)
            }
        }
    }
}

/// Squared separation of closed stars (in the second subdivision) of two
/// distinct barycenters of `dim`-simplices of a uniform 1-complex, over
/// all configurations. The worst case for dimension 0 is a pair of
/// adjacent vertices; for dimension 1 a pair of edges sharing a vertex.
/// Derived in tests by exact minimization over segment pairs.
pub fn disjointness_constant_sq(dim: usize) -> Rational {
    match dim {
        0 => Rational::new(1, 2),
        1 => Rational::new(1, 8),
        _ => panic!("uniform 1-complexes have simplices of dimension 0 and 1 only"),
    }
}

/// (1)⇒(2): the union of two r-disjoint covering families has
/// d-multiplicity <= 2 whenever r > 2d.
pub fn transform_t12(
    space: &FiniteMetricSpace,
    family0: &[Piece],
    family1: &[Piece],
    r: Rational,
    d: Rational,
) -> Result<Cover, NerveError> {
    if r <= Rational::from_integer(2) * d {
        return Err(NerveError::Precondition {
            what: format!(
                "need r > 2d, got r = {}, d = {}",
                format_rational(&r),
                format_rational(&d)
            ),
        });
    }
    for (idx, fam) in [family0, family1].into_iter().enumerate() {
        if !is_r_disjoint(space, fam, r)? {
            return Err(NerveError::Precondition {
                what: format!("family{idx} is not {}-disjoint", format_rational(&r)),
            });
        }
    }
    let cover = Cover::new(
        family0
            .iter()
            .chain(family1)
            .filter(|p| !p.is_empty())
            .cloned()
            .collect(),
    );
    cover.check_covers(space)?;
    let dm = d_multiplicity(space, &cover, d)?;
    if dm > 2 {
        return Err(NerveError::Contract {
            what: format!("d-multiplicity {dm} > 2"),
        });
    }
    Ok(cover)
}

/// (2)⇒(3): strict 2λ-neighborhoods of a cover with 2λ-multiplicity <= 2
/// yield multiplicity <= 2 and Lebesgue number > λ.
pub fn transform_t23(
    space: &FiniteMetricSpace,
    cover: &Cover,
    lambda: Rational,
) -> Result<Cover, NerveError> {
    if lambda <= Rational::zero() {
        return Err(NerveError::Precondition {
            what: "lambda must be positive".into(),
        });
    }
    let two_lambda = Rational::from_integer(2) * lambda;
    let dm = d_multiplicity(space, cover, two_lambda)?;
    if dm > 2 {
        return Err(NerveError::Precondition {
            what: format!("2λ-multiplicity is {dm} > 2"),
        });
    }
    cover.check_covers(space)?;
    let enlarged = Cover::new(
        cover
            .pieces
            .iter()
            .filter(|p| !p.is_empty())
            .map(|p| enlarge(space, p, two_lambda, true))
            .collect::<Result<_, _>>()?,
    );
    let m = multiplicity(space, &enlarged)?;
    if m > 2 {
        return Err(NerveError::Contract {
            what: format!("enlarged multiplicity {m} > 2"),
        });
    }
    if !lebesgue_number(space, &enlarged)?.exceeds(lambda) {
        return Err(NerveError::Contract {
            what: "enlarged Lebesgue number does not exceed lambda".into(),
        });
    }
    Ok(enlarged)
}

/// (3)⇒(4): nerve plus partition of unity, with the star preimage
/// identity and the 20/λ Lipschitz bound certified exactly (in squares).
pub fn transform_t34(
    space: &FiniteMetricSpace,
    cover: &Cover,
    lambda: Rational,
) -> Result<(UniformComplex1, PartitionOfUnity, LipschitzReport), NerveError> {
    let complex = nerve(space, cover)?;
    let pou = phi_map(space, cover)?;
    // φ^{-1}(st W) = W, pointwise
    for (w, piece) in cover.pieces.iter().enumerate() {
        if pou.star_preimage(w) != piece.members() {
            return Err(NerveError::Contract {
                what: format!("star preimage of vertex {w} differs from piece {w}"),
            });
        }
    }
    let report = lipschitz_bound_check(space, cover, &pou, lambda)?;
    if !report.pass {
        return Err(NerveError::Contract {
            what: format!(
                "squared Lipschitz ratio {} exceeds 400/λ² = {}",
                format_rational(&report.max_ratio_sq),
                format_rational(&report.bound_sq)
            ),
        });
    }
    Ok((complex, pou, report))
}

/// (4)⇒(1): preimages of the second-subdivision barycenter stars of an
/// (c/r)-Lipschitz map are two r-disjoint families covering the space.
/// Closed stars are used so that coverage is exact on rational points;
/// the disjointness constants are for closed stars as well.
pub fn transform_t41(
    space: &FiniteMetricSpace,
    complex: &UniformComplex1,
    pou: &PartitionOfUnity,
    r: Rational,
) -> Result<(Vec<Piece>, Vec<Piece>), NerveError> {
    if r <= Rational::zero() {
        return Err(NerveError::Precondition {
            what: "r must be positive".into(),
        });
    }
    let c_sq = disjointness_constant_sq(0).min(disjointness_constant_sq(1));
    let eps_sq = c_sq / (r * r);
    for x in 0..space.len() {
        for y in (x + 1)..space.len() {
            let num = complex_distance_sq(&pou.image(x), &pou.image(y));
            let den = space.dist(x, y) * space.dist(x, y);
            if num > eps_sq * den {
                return Err(NerveError::Precondition {
                    what: format!(
                        "map is not (c/r)-Lipschitz at pair ({x},{y}): ratio² = {}",
                        format_rational(&(num / den))
                    ),
                });
            }
        }
    }
    let beta2 = barycentric_subdivide(complex, 2).expect("level 2 supported");
    let mut family0 = Vec::new();
    for v in 0..complex.vertex_count() {
        let dv = DerivedVertex::Vertex(v);
        let members: Vec<usize> = (0..space.len())
            .filter(|&x| beta2.star_contains(&dv, &pou.image(x), true))
            .collect();
        if !members.is_empty() {
            family0.push(Piece::new(members));
        }
    }
    let mut family1 = Vec::new();
    for (lo, hi) in complex.edges() {
        let dv = DerivedVertex::OnEdge { lo, hi, num: 2 };
        let members: Vec<usize> = (0..space.len())
            .filter(|&x| beta2.star_contains(&dv, &pou.image(x), true))
            .collect();
        if !members.is_empty() {
            family1.push(Piece::new(members));
        }
    }
    let union = Cover::new(family0.iter().chain(&family1).cloned().collect());
    union.check_covers(space)?;
    for (idx, fam) in [&family0, &family1].into_iter().enumerate() {
        if let Some((i, j)) = r_disjoint_violation(space, fam, r)? {
            return Err(NerveError::Contract {
                what: format!("family{idx} pieces {i},{j} closer than r"),
            });
        }
    }
    Ok((family0, family1))
}

/// (1)⇒(5): closed B-neighborhoods of r-disjoint families (r > 2B)
/// refine any cover of diameter <= B into a multiplicity-<=2 cover.
pub fn transform_t15(
    space: &FiniteMetricSpace,
    bounded_cover: &Cover,
    family0: &[Piece],
    family1: &[Piece],
    r: Rational,
) -> Result<Cover, NerveError> {
    bounded_cover.check_covers(space)?;
    let mut bound = Rational::zero();
    for p in &bounded_cover.pieces {
        if !p.is_empty() {
            bound = bound.max(diam(space, p)?);
        }
    }
    if r <= Rational::from_integer(2) * bound {
        return Err(NerveError::Precondition {
            what: format!(
                "need r > 2B, got r = {}, B = {}",
                format_rational(&r),
                format_rational(&bound)
            ),
        });
    }
    for (idx, fam) in [family0, family1].into_iter().enumerate() {
        if !is_r_disjoint(space, fam, r)? {
            return Err(NerveError::Precondition {
                what: format!("family{idx} is not r-disjoint"),
            });
        }
    }
    Cover::new(family0.iter().chain(family1).cloned().collect()).check_covers(space)?;
    let enlarged = Cover::new(
        family0
            .iter()
            .chain(family1)
            .filter(|p| !p.is_empty())
            .map(|p| enlarge(space, p, bound, false))
            .collect::<Result<_, _>>()?,
    );
    let m = multiplicity(space, &enlarged)?;
    if m > 2 {
        return Err(NerveError::Contract {
            what: format!("multiplicity {m} > 2"),
        });
    }
    for (k, v) in bounded_cover.pieces.iter().enumerate() {
        if v.is_empty() {
            continue;
        }
        if !enlarged.pieces.iter().any(|u| u.contains_all(v.members())) {
            return Err(NerveError::Contract {
                what: format!("piece {k} of the bounded cover is contained in no output piece"),
            });
        }
    }
    Ok(enlarged)
}

/// (5)⇒(3): feed the λ-ball cover to a refinement oracle and certify its
/// answer: multiplicity <= 2, refinement by the balls, Lebesgue number
/// >= λ. (This implementation certifies the containment direction of
/// the Lebesgue claim.)
pub fn transform_t53(
    space: &FiniteMetricSpace,
    lambda: Rational,
    refinement_oracle: impl FnOnce(&FiniteMetricSpace, &Cover) -> Cover,
) -> Result<Cover, NerveError> {
    if lambda <= Rational::zero() {
        return Err(NerveError::Precondition {
            what: "lambda must be positive".into(),
        });
    }
    let balls = Cover::new(
        (0..space.len())
            .map(|x| {
                enlarge(space, &Piece::new(alloc::vec![x]), lambda, false).expect("nonempty")
            })
            .collect(),
    );
    let out = refinement_oracle(space, &balls);
    out.check_covers(space)
        .map_err(|e| NerveError::Contract {
            what: format!("oracle output: {e}"),
        })?;
    let m = multiplicity(space, &out)?;
    if m > 2 {
        return Err(NerveError::Contract {
            what: format!("oracle output multiplicity {m} > 2"),
        });
    }
    for (x, ball) in balls.pieces.iter().enumerate() {
        if !out.pieces.iter().any(|u| u.contains_all(ball.members())) {
            return Err(NerveError::Contract {
                what: format!("ball around point {x} is contained in no output piece"),
            });
        }
    }
    if !lebesgue_number(space, &out)?.at_least(lambda) {
        return Err(NerveError::Contract {
            what: "output Lebesgue number below lambda".into(),
        });
    }
    Ok(out)
}

/// Convenience: the denominator `Σ_W d(x, X−W)` of the φ formula at a
/// point; the proof needs it >= λ/2 whenever `L(cover) > λ`.
pub fn phi_denominator(
    space: &FiniteMetricSpace,
    cover: &Cover,
    x: usize,
) -> Result<Rational, NerveError> {
    let mut total = Rational::zero();
    for (k, p) in cover.pieces.iter().enumerate() {
        let c = Piece::new((0..space.len()).filter(|&y| !p.contains(y)).collect());
        if c.is_empty() {
            return Err(NerveError::PieceEqualsSpace { piece: k });
        }
        total += point_set_distance(space, x, &c)?;
    }
    Ok(total)
}

/// Bundled run of T12 → T23 → T34 → T41 with per-step certificates.
#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub d_multiplicity_after_t12: usize,
    pub multiplicity_after_t23: usize,
    pub lebesgue_after_t23: Lebesgue,
    pub lipschitz: LipschitzReport,
    pub family0_pieces: usize,
    pub family1_pieces: usize,
    pub output_scale: Rational,
}

/// Runs the full constructive loop starting from strip families: the
/// output scale for T41 is chosen as the exact value `√(c²λ²/400)`
/// honoring the certified squared-Lipschitz bound (only its square is
/// ever used).
pub fn pipeline_t12_t23_t34_t41(
    space: &FiniteMetricSpace,
    family0: &[Piece],
    family1: &[Piece],
    r: Rational,
    d: Rational,
    lambda: Rational,
) -> Result<(Vec<Piece>, Vec<Piece>, PipelineReport), NerveError> {
    let cover = transform_t12(space, family0, family1, r, d)?;
    let d_mult = d_multiplicity(space, &cover, d)?;
    let enlarged = transform_t23(space, &cover, lambda)?;
    let m = multiplicity(space, &enlarged)?;
    let lebesgue = lebesgue_number(space, &enlarged)?;
    let (complex, pou, lipschitz) = transform_t34(space, &enlarged, lambda)?;
    // largest rational scale whose square stays within the certified
    // Lipschitz budget: r_out² = c²λ²/400 works since ratio² <= 400/λ²
    let c_sq = disjointness_constant_sq(0).min(disjointness_constant_sq(1));
    let r_out = best_rational_sqrt_below(c_sq * lambda * lambda / Rational::from_integer(400));
    let (out0, out1) = transform_t41(space, &complex, &pou, r_out)?;
    let report = PipelineReport {
        d_multiplicity_after_t12: d_mult,
        multiplicity_after_t23: m,
        lebesgue_after_t23: lebesgue,
        lipschitz,
        family0_pieces: out0.len(),
        family1_pieces: out1.len(),
        output_scale: r_out,
    };
    Ok((out0, out1, report))
}

/// Largest rational of the form k/120 with square <= s. Exactness is not
/// needed here: any r with r² <= s certifies against the squared bound.
fn best_rational_sqrt_below(s: Rational) -> Rational {
    let den = Rational::from_integer(120);
    let mut lo = 0i64;
    let mut hi = 1i64;
    while Rational::new(hi, 120) * Rational::new(hi, 120) <= s {
        hi *= 2;
    }
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if Rational::new(mid, 120) * Rational::new(mid, 120) <= s {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Rational::from_integer(lo) / den
}

// re-export used by pipeline consumers
pub use crate::metric::Lebesgue as LebesgueNumber;
