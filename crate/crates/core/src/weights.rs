// SPDX-License-Identifier: Apache-2.0

//! Local vertex weights: the six-vertex R-matrix, the triangular boundary
//! K-matrix and the generalized L-operator, together with exact checkers for
//! the Yang-Baxter, reflection and RLL relations.
//!
//! Matrix elements follow `<γ|<δ| X |α>|β>`: the ket indices `(α, β)` are the
//! incoming spins on the first and second tensor factor, the bra indices
//! `(γ, δ)` the outgoing ones.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("site parameters violate the free-fermion constraints: c*d + a*f = {cd_af}, t*c*d + b*e = {tcd_be}")]
    ConstraintViolation { cd_af: Box<Scalar>, tcd_be: Box<Scalar> },
}

/// Spin on one tensor factor; `Up` is `|0>` and `Down` is `|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Up = 0,
    Down = 1,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn bit(self) -> usize {
        self as usize
    }

    pub fn from_bit(bit: usize) -> Spin {
        if bit & 1 == 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }
}

/// Parameters of the bulk R-matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RParams {
    pub t: Scalar,
}

impl RParams {
    pub fn new(t: Scalar) -> Self {
        RParams { t }
    }
}

/// Parameters of the triangular boundary K-matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KParams {
    pub a: Scalar,
    pub b: Scalar,
    #[serde(skip, default)]
    upper_right: Scalar,
}

impl KParams {
    pub fn new(a: Scalar, b: Scalar) -> Self {
        KParams { a, b, upper_right: Scalar::zero() }
    }

    /// Copy with a nonzero `<0|K|1>` entry. This leaves the triangular family
    /// and only exists to build corrupted weights for negative controls.
    pub fn with_upper_right(&self, entry: Scalar) -> Self {
        KParams { upper_right: entry, ..self.clone() }
    }

    pub fn is_triangular(&self) -> bool {
        self.upper_right.is_zero()
    }
}

/// One site's six couplings of the generalized L-operator.
///
/// Values built through [`LSiteParams::new`] or [`LSiteParams::solve`] satisfy
/// `c*d + a*f = 0` and `t*c*d + b*e = 0` for the `t` they were checked against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LSiteParams {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
    pub e: Scalar,
    pub f: Scalar,
}

impl LSiteParams {
    pub fn new(
        a: Scalar,
        b: Scalar,
        c: Scalar,
        d: Scalar,
        e: Scalar,
        f: Scalar,
        r: &RParams,
    ) -> Result<Self, WeightError> {
        let site = LSiteParams { a, b, c, d, e, f };
        site.validate(r)?;
        Ok(site)
    }

    /// No constraint check. Downstream code treats such values as untrusted.
    pub fn new_unchecked(a: Scalar, b: Scalar, c: Scalar, d: Scalar, e: Scalar, f: Scalar) -> Self {
        LSiteParams { a, b, c, d, e, f }
    }

    /// Solves the two constraints for `f` and `e` given nonzero `a` and `b`.
    pub fn solve(a: Scalar, b: Scalar, c: Scalar, d: Scalar, r: &RParams) -> Result<Self, WeightError> {
        let cd = &c * &d;
        let f = (-&cd).checked_div(&a)?;
        let e = (-(&r.t * &cd)).checked_div(&b)?;
        Ok(LSiteParams { a, b, c, d, e, f })
    }

    /// The couplings that turn the L-operator into the R-matrix.
    pub fn six_vertex(r: &RParams) -> Self {
        LSiteParams {
            a: Scalar::one(),
            b: -&r.t,
            c: Scalar::one(),
            d: Scalar::one(),
            e: Scalar::one(),
            f: Scalar::from_int(-1),
        }
    }

    fn residuals(&self, r: &RParams) -> (Scalar, Scalar) {
        let cd = &self.c * &self.d;
        let cd_af = &cd + &self.a * &self.f;
        let tcd_be = &r.t * &cd + &self.b * &self.e;
        (cd_af, tcd_be)
    }

    pub fn validate(&self, r: &RParams) -> Result<(), WeightError> {
        let (cd_af, tcd_be) = self.residuals(r);
        if cd_af.is_zero() && tcd_be.is_zero() {
            Ok(())
        } else {
            Err(WeightError::ConstraintViolation { cd_af: Box::new(cd_af), tcd_be: Box::new(tcd_be) })
        }
    }

    pub fn is_valid_for(&self, r: &RParams) -> bool {
        self.validate(r).is_ok()
    }
}

fn conserves(gamma: Spin, delta: Spin, alpha: Spin, beta: Spin) -> bool {
    alpha.bit() + beta.bit() == gamma.bit() + delta.bit()
}

/// `<γ|<δ| R(u, w) |α>|β>`.
pub fn r_element(gamma: Spin, delta: Spin, alpha: Spin, beta: Spin, u: &Scalar, w: &Scalar, p: &RParams) -> Scalar {
    use Spin::*;
    let t = &p.t;
    match (gamma, delta, alpha, beta) {
        (Up, Up, Up, Up) | (Down, Down, Down, Down) => u - t * w,
        (Up, Down, Up, Down) => t * (u - w),
        (Up, Down, Down, Up) => (Scalar::one() - t) * u,
        (Down, Up, Up, Down) => (Scalar::one() - t) * w,
        (Down, Up, Down, Up) => u - w,
        _ => {
            debug_assert!(!conserves(gamma, delta, alpha, beta));
            Scalar::zero()
        }
    }
}

/// `<γ| K(u) |α>`. Needs `u != 0`.
pub fn k_element(gamma: Spin, alpha: Spin, u: &Scalar, p: &KParams) -> Result<Scalar, WeightError> {
    let u_inv = u.inv()?;
    Ok(match (gamma, alpha) {
        (Spin::Up, Spin::Up) => &p.b * u - &p.a,
        (Spin::Up, Spin::Down) => p.upper_right.clone(),
        (Spin::Down, Spin::Down) => &p.b * &u_inv - &p.a,
        (Spin::Down, Spin::Up) => u - &u_inv,
    })
}

/// `<γ|<δ| L(u, w) |α>|β>` with the first factor auxiliary and the second the site.
#[allow(clippy::too_many_arguments)]
pub fn l_element(
    gamma: Spin,
    delta: Spin,
    alpha: Spin,
    beta: Spin,
    u: &Scalar,
    w: &Scalar,
    s: &LSiteParams,
    p: &RParams,
) -> Scalar {
    use Spin::*;
    let t = &p.t;
    let one_minus_t = Scalar::one() - t;
    match (gamma, delta, alpha, beta) {
        (Up, Up, Up, Up) => &s.a * u + &s.b * w,
        (Up, Down, Up, Down) => &s.a * t * u + &s.b * w,
        (Up, Down, Down, Up) => one_minus_t * &s.c * u,
        (Down, Up, Up, Down) => one_minus_t * &s.d * w,
        (Down, Up, Down, Up) => &s.e * u + &s.f * w,
        (Down, Down, Down, Down) => &s.e * u + t * &s.f * w,
        _ => Scalar::zero(),
    }
}

/// A 4x4 operator on two tensor factors. Row index `2γ + δ`, column `2α + β`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairOp {
    entries: [[Scalar; 4]; 4],
}

impl PairOp {
    pub fn from_fn(mut f: impl FnMut(Spin, Spin, Spin, Spin) -> Scalar) -> Self {
        let entries = std::array::from_fn(|row| {
            std::array::from_fn(|col| {
                f(Spin::from_bit(row >> 1), Spin::from_bit(row), Spin::from_bit(col >> 1), Spin::from_bit(col))
            })
        });
        PairOp { entries }
    }

    pub fn identity() -> Self {
        Self::from_fn(|g, d, a, b| if g == a && d == b { Scalar::one() } else { Scalar::zero() })
    }

    pub fn get(&self, gamma: Spin, delta: Spin, alpha: Spin, beta: Spin) -> &Scalar {
        &self.entries[2 * gamma.bit() + delta.bit()][2 * alpha.bit() + beta.bit()]
    }

    pub fn rows(&self) -> &[[Scalar; 4]; 4] {
        &self.entries
    }

    /// The same operator with the roles of the two factors exchanged.
    pub fn swapped(&self) -> Self {
        Self::from_fn(|g, d, a, b| self.get(d, g, b, a).clone())
    }
}

/// A 2x2 operator on one tensor factor. Row index `γ`, column `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteOp {
    entries: [[Scalar; 2]; 2],
}

impl SiteOp {
    pub fn from_fn(mut f: impl FnMut(Spin, Spin) -> Scalar) -> Self {
        let entries = std::array::from_fn(|row| std::array::from_fn(|col| f(Spin::from_bit(row), Spin::from_bit(col))));
        SiteOp { entries }
    }

    pub fn get(&self, gamma: Spin, alpha: Spin) -> &Scalar {
        &self.entries[gamma.bit()][alpha.bit()]
    }

    pub fn rows(&self) -> &[[Scalar; 2]; 2] {
        &self.entries
    }
}

pub fn r_matrix(u: &Scalar, w: &Scalar, p: &RParams) -> PairOp {
    PairOp::from_fn(|g, d, a, b| r_element(g, d, a, b, u, w, p))
}

pub fn k_matrix(u: &Scalar, p: &KParams) -> Result<SiteOp, WeightError> {
    // Entries are infallible once u is known to be invertible.
    u.inv()?;
    Ok(SiteOp::from_fn(|g, a| k_element(g, a, u, p).expect("u checked nonzero")))
}

pub fn l_matrix(u: &Scalar, w: &Scalar, s: &LSiteParams, p: &RParams) -> PairOp {
    PairOp::from_fn(|g, d, a, b| l_element(g, d, a, b, u, w, s, p))
}

/// Dense operator on `k` tensor factors; basis index bits are the spins with
/// factor 0 as the most significant bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseOp {
    factors: usize,
    data: Vec<Scalar>,
}

impl DenseOp {
    pub fn identity(factors: usize) -> Self {
        let dim = 1 << factors;
        let mut data = vec![Scalar::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Scalar::one();
        }
        DenseOp { factors, data }
    }

    pub fn dim(&self) -> usize {
        1 << self.factors
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.data[row * self.dim() + col]
    }

    fn shift(&self, factor: usize) -> usize {
        self.factors - 1 - factor
    }

    /// `op` acting on factors `first` and `second` (in that order), identity elsewhere.
    pub fn embed_pair(factors: usize, first: usize, second: usize, op: &PairOp) -> Self {
        assert!(first < factors && second < factors && first != second);
        let dim = 1 << factors;
        let mut out = DenseOp { factors, data: vec![Scalar::zero(); dim * dim] };
        let (sa, sb) = (out.shift(first), out.shift(second));
        for col in 0..dim {
            let alpha = (col >> sa) & 1;
            let beta = (col >> sb) & 1;
            let rest = col & !(1 << sa) & !(1 << sb);
            for gamma in 0..2 {
                for delta in 0..2 {
                    let value = &op.rows()[2 * gamma + delta][2 * alpha + beta];
                    if value.is_zero() {
                        continue;
                    }
                    let row = rest | (gamma << sa) | (delta << sb);
                    out.data[row * dim + col] = value.clone();
                }
            }
        }
        out
    }

    pub fn embed_site(factors: usize, site: usize, op: &SiteOp) -> Self {
        assert!(site < factors);
        let dim = 1 << factors;
        let mut out = DenseOp { factors, data: vec![Scalar::zero(); dim * dim] };
        let shift = out.shift(site);
        for col in 0..dim {
            let alpha = (col >> shift) & 1;
            let rest = col & !(1 << shift);
            for gamma in 0..2 {
                let value = &op.rows()[gamma][alpha];
                if !value.is_zero() {
                    out.data[(rest | (gamma << shift)) * dim + col] = value.clone();
                }
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &DenseOp) -> DenseOp {
        assert_eq!(self.factors, rhs.factors);
        let dim = self.dim();
        let mut data = vec![Scalar::zero(); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let lhs = self.get(i, k);
                if lhs.is_zero() {
                    continue;
                }
                for j in 0..dim {
                    let r = rhs.get(k, j);
                    if !r.is_zero() {
                        data[i * dim + j] += lhs * r;
                    }
                }
            }
        }
        DenseOp { factors: self.factors, data }
    }

    /// Left-to-right operator product `ops[0] * ops[1] * ...`.
    pub fn product<'a>(ops: impl IntoIterator<Item = &'a DenseOp>) -> DenseOp {
        let mut iter = ops.into_iter();
        let first = iter.next().expect("empty product").clone();
        iter.fold(first, |acc, op| acc.matmul(op))
    }

    /// First `(row, col)` at which the two operators differ.
    pub fn first_difference(&self, other: &DenseOp) -> Option<(usize, usize)> {
        let dim = self.dim();
        self.data
            .iter()
            .zip(&other.data)
            .position(|(a, b)| a != b)
            .map(|i| (i / dim, i % dim))
    }
}

/// Both sides of the Yang-Baxter relation on factors `(a, b, c)`, with one
/// parameter record per R-factor: `[ab, ac, bc]`.
pub fn yang_baxter_sides(u: &Scalar, v: &Scalar, w: &Scalar, params: [&RParams; 3]) -> (DenseOp, DenseOp) {
    let r_ab = DenseOp::embed_pair(3, 0, 1, &r_matrix(u, v, params[0]));
    let r_ac = DenseOp::embed_pair(3, 0, 2, &r_matrix(u, w, params[1]));
    let r_bc = DenseOp::embed_pair(3, 1, 2, &r_matrix(v, w, params[2]));
    let lhs = DenseOp::product([&r_ab, &r_ac, &r_bc]);
    let rhs = DenseOp::product([&r_bc, &r_ac, &r_ab]);
    (lhs, rhs)
}

/// `R_ab(u,v) R_ac(u,w) R_bc(v,w) == R_bc(v,w) R_ac(u,w) R_ab(u,v)`, entrywise.
pub fn check_yang_baxter(u: &Scalar, v: &Scalar, w: &Scalar, p: &RParams) -> bool {
    let (lhs, rhs) = yang_baxter_sides(u, v, w, [p, p, p]);
    lhs == rhs
}

/// Both sides of the reflection equation on factors `(a, b)`, with the
/// one-argument R-matrix read as `R(x) = R(x, 1)`.
pub fn reflection_sides(
    u: &Scalar,
    w: &Scalar,
    p: &RParams,
    k: &KParams,
) -> Result<(DenseOp, DenseOp), WeightError> {
    let one = Scalar::one();
    let ratio = u.checked_div(w)?;
    let prod = u * w;
    let k_a = DenseOp::embed_site(2, 0, &k_matrix(w, k)?);
    let k_b = DenseOp::embed_site(2, 1, &k_matrix(u, k)?);
    let r_ba = |x: &Scalar| DenseOp::embed_pair(2, 1, 0, &r_matrix(x, &one, p));
    let r_ab = |x: &Scalar| DenseOp::embed_pair(2, 0, 1, &r_matrix(x, &one, p));
    let lhs = DenseOp::product([&r_ba(&ratio), &k_b, &r_ab(&prod), &k_a]);
    let rhs = DenseOp::product([&k_a, &r_ba(&prod), &k_b, &r_ab(&ratio)]);
    Ok((lhs, rhs))
}

/// `R_ba(u/w) K_b(u) R_ab(uw) K_a(w) == K_a(w) R_ba(uw) K_b(u) R_ab(u/w)`.
pub fn check_reflection(u: &Scalar, w: &Scalar, p: &RParams, k: &KParams) -> Result<bool, WeightError> {
    let (lhs, rhs) = reflection_sides(u, w, p, k)?;
    Ok(lhs == rhs)
}

/// Both sides of the RLL relation on factors `(a, b, j)`.
pub fn rll_sides(u1: &Scalar, u2: &Scalar, w: &Scalar, s: &LSiteParams, p: &RParams) -> (DenseOp, DenseOp) {
    let r_ab = DenseOp::embed_pair(3, 0, 1, &r_matrix(u1, u2, p));
    let l_aj = DenseOp::embed_pair(3, 0, 2, &l_matrix(u1, w, s, p));
    let l_bj = DenseOp::embed_pair(3, 1, 2, &l_matrix(u2, w, s, p));
    let lhs = DenseOp::product([&r_ab, &l_aj, &l_bj]);
    let rhs = DenseOp::product([&l_bj, &l_aj, &r_ab]);
    (lhs, rhs)
}

/// `R_ab(u1,u2) L_aj(u1,w) L_bj(u2,w) == L_bj(u2,w) L_aj(u1,w) R_ab(u1,u2)`.
///
/// Accepts unchecked site parameters so that constraint violations show up
/// as a failed relation rather than a construction error.
pub fn check_rll(u1: &Scalar, u2: &Scalar, w: &Scalar, s: &LSiteParams, p: &RParams) -> bool {
    let (lhs, rhs) = rll_sides(u1, u2, w, s, p);
    lhs == rhs
}
