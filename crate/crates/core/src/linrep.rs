//! Exact 2×2 matrix representation of the lamplighter group over the
//! ring of integer Laurent polynomials, with homomorphism, determinant
//! and injectivity checkers, plus the specialization demonstrating why a
//! formal variable (and not an integer sample) is required.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::group::WreathElement;

/// An integer Laurent polynomial, exponent -> nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    /// `c · t^e` (zero coefficient gives the zero polynomial).
    pub fn monomial(exp: i64, coeff: i64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert(exp, coeff);
        }
        Self { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    fn add_term(&mut self, exp: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(exp).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, &c)| (e, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// Evaluation at a rational point `t = num/den` is avoided; instead
    /// the specialized integer value at an integer t (t != 0). Negative
    /// exponents require exact divisibility, so evaluate as a rational:
    /// here we only ever need |t| >= 1 integer samples, returned as an
    /// exact rational.
    pub fn eval(&self, t: crate::Rational) -> crate::Rational {
        use num_traits::{One, Zero};
        let mut acc = crate::Rational::zero();
        for (e, c) in self.terms() {
            let mut pow = crate::Rational::one();
            if e >= 0 {
                for _ in 0..e {
                    pow *= t;
                }
            } else {
                for _ in 0..(-e) {
                    pow /= t;
                }
            }
            acc += crate::Rational::from_integer(c) * pow;
        }
        acc
    }
}

/// A 2×2 matrix over the Laurent ring, row-major.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RepMatrix {
    pub entries: [[LaurentPoly; 2]; 2],
}

impl RepMatrix {
    pub fn identity() -> Self {
        Self {
            entries: [
                [LaurentPoly::one(), LaurentPoly::zero()],
                [LaurentPoly::zero(), LaurentPoly::one()],
            ],
        }
    }

    pub fn new(entries: [[LaurentPoly; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = [
            [LaurentPoly::zero(), LaurentPoly::zero()],
            [LaurentPoly::zero(), LaurentPoly::zero()],
        ];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for k in 0..2 {
                    *cell = cell.add(&self.entries[i][k].mul(&other.entries[k][j]));
                }
            }
        }
        Self { entries: out }
    }

    pub fn det(&self) -> LaurentPoly {
        self.entries[0][0]
            .mul(&self.entries[1][1])
            .sub(&self.entries[0][1].mul(&self.entries[1][0]))
    }

    /// Inverse for matrices with determinant `t^n`: adjugate times
    /// `t^{-n}`. Panics if the determinant is not a unit monomial.
    pub fn inverse(&self) -> Self {
        let det = self.det();
        let mut it = det.terms();
        let (exp, coeff) = it.next().expect("nonzero determinant");
        assert!(
            it.next().is_none() && (coeff == 1 || coeff == -1),
            "determinant is not a unit in the Laurent ring"
        );
        let scale = LaurentPoly::monomial(-exp, coeff);
        Self {
            entries: [
                [
                    self.entries[1][1].mul(&scale),
                    self.entries[0][1].neg().mul(&scale),
                ],
                [
                    self.entries[1][0].neg().mul(&scale),
                    self.entries[0][0].mul(&scale),
                ],
            ],
        }
    }

    /// Entry-wise rational specialization at `t`.
    pub fn eval(&self, t: crate::Rational) -> [[crate::Rational; 2]; 2] {
        [
            [self.entries[0][0].eval(t), self.entries[0][1].eval(t)],
            [self.entries[1][0].eval(t), self.entries[1][1].eval(t)],
        ]
    }
}

/// `ψ(f, n) = [[1, 0], [Σ_k f(k)·t^k, t^n]]`: a faithful representation
/// of Z≀Z by upper-unitriangular-column matrices over Z[t, t^{-1}].
pub fn psi(g: &WreathElement<i64>) -> RepMatrix {
    let lamp_poly = LaurentPoly::from_terms(g.lamps.decompose_deltas());
    RepMatrix::new([
        [LaurentPoly::one(), LaurentPoly::zero()],
        [lamp_poly, LaurentPoly::monomial(g.shift, 1)],
    ])
}

/// Block-diagonal matrices: one ψ block per coordinate, representing a
/// finite direct power of the lamplighter group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockMatrix {
    pub blocks: Vec<RepMatrix>,
}

impl BlockMatrix {
    pub fn identity(arity: usize) -> Self {
        Self {
            blocks: (0..arity).map(|_| RepMatrix::identity()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.blocks.len(), other.blocks.len());
        Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.mul(b))
                .collect(),
        }
    }
}

/// `ψ̃`: coordinate-wise ψ on a product of lamplighter groups.
pub fn psi_tilde(g: &crate::group::ProductElement) -> BlockMatrix {
    BlockMatrix {
        blocks: g.coordinates.iter().map(psi).collect(),
    }
}

/// Report of a sampled homomorphism check `ψ(xy) = ψ(x)ψ(y)`.
#[derive(Clone, Debug)]
pub struct HomomorphismReport {
    pub pairs_checked: usize,
    pub failures: usize,
}

pub fn homomorphism_check<'a>(
    pairs: impl IntoIterator<Item = (&'a WreathElement<i64>, &'a WreathElement<i64>)>,
) -> HomomorphismReport {
    let mut checked = 0;
    let mut failures = 0;
    for (x, y) in pairs {
        checked += 1;
        if psi(&x.multiply(y)) != psi(x).mul(&psi(y)) {
            failures += 1;
        }
    }
    HomomorphismReport {
        pairs_checked: checked,
        failures,
    }
}

/// Report of an injectivity sweep over a set of elements: any two
/// distinct elements mapping to the same matrix is a collision.
#[derive(Clone, Debug)]
pub struct InjectivityReport {
    pub elements_checked: usize,
    pub collisions: Vec<(WreathElement<i64>, WreathElement<i64>)>,
}

impl InjectivityReport {
    pub fn injective(&self) -> bool {
        self.collisions.is_empty()
    }
}

pub fn injectivity_check<'a>(
    elements: impl IntoIterator<Item = &'a WreathElement<i64>>,
) -> InjectivityReport {
    let mut seen: BTreeMap<RepMatrix, WreathElement<i64>> = BTreeMap::new();
    let mut collisions = Vec::new();
    let mut count = 0;
    for g in elements {
        count += 1;
        match seen.get(&psi(g)) {
            Some(prev) if prev != g => collisions.push((prev.clone(), g.clone())),
            Some(_) => {}
            None => {
                seen.insert(psi(g), g.clone());
            }
        }
    }
    InjectivityReport {
        elements_checked: count,
        collisions,
    }
}

/// Injectivity of the specialization t := t0 over a set of elements:
/// returns the first colliding pair, if any. The formal variable is
/// needed precisely because small specializations collide; `t0 = 1`
/// identifies every lamp position.
pub fn specialization_collision<'a>(
    elements: impl IntoIterator<Item = &'a WreathElement<i64>>,
    t0: crate::Rational,
) -> Option<(WreathElement<i64>, WreathElement<i64>)> {
    let mut seen: BTreeMap<Vec<crate::Rational>, WreathElement<i64>> = BTreeMap::new();
    for g in elements {
        let m = psi(g).eval(t0);
        let key = alloc::vec![m[0][0], m[0][1], m[1][0], m[1][1]];
        match seen.get(&key) {
            Some(prev) if prev != g => return Some((prev.clone(), g.clone())),
            _ => {
                seen.insert(key, g.clone());
            }
        }
    }
    None
}
