// SPDX-License-Identifier: Apache-2.0

//! Closed-form symmetric functions for the wavefunctions.
//!
//! * [`f_triangular`]: the permutation sum for the triangular boundary.
//! * [`of_ordinary`]: the permutation sum for B-operator states.
//! * [`of_homogeneous`]: the homogeneous-limit rewriting of `of_ordinary`.
//! * [`grothendieck`]: the β-Grothendieck polynomial as a ratio of determinants.
//!
//! Permutation sums enumerate `S_n` in lexicographic order. Their factors are
//! tabulated per variable first, so each summand is a handful of lookups.

use std::sync::atomic::{AtomicUsize, Ordering};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::SpinConfig;
use crate::scalar::{Scalar, ScalarError};
use crate::weights::{KParams, LSiteParams, RParams, WeightError};

pub const DEFAULT_PERMUTATION_CAP: usize = 9;
/// Sums over at least this many variables are split across worker threads.
const PARALLEL_THRESHOLD: usize = 7;

static PERMUTATION_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_PERMUTATION_CAP);

/// Largest `n` accepted by the `S_n` sums.
pub fn permutation_cap() -> usize {
    PERMUTATION_CAP.load(Ordering::Relaxed)
}

pub fn set_permutation_cap(cap: usize) {
    PERMUTATION_CAP.store(cap, Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymfunError {
    #[error("variables {first} and {second} coincide")]
    CoincidentVariables { first: usize, second: usize },
    #[error("{n} variables exceed the permutation cap {cap}")]
    TooManyVariables { n: usize, cap: usize },
    #[error("{down} down spins but only {rows} rows")]
    DownSpinsExceedRows { down: usize, rows: usize },
    #[error("partition does not fit the frame: {0}")]
    FrameViolation(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

fn check_distinct(values: &[Scalar]) -> Result<(), SymfunError> {
    for (second, value) in values.iter().enumerate() {
        if let Some(first) = values[..second].iter().position(|v| v == value) {
            return Err(SymfunError::CoincidentVariables { first, second });
        }
    }
    Ok(())
}

fn check_cap(n: usize) -> Result<(), SymfunError> {
    let cap = permutation_cap();
    if n > cap {
        return Err(SymfunError::TooManyVariables { n, cap });
    }
    Ok(())
}

/// `Σ_{σ ∈ S_n} summand(σ)`, with `σ` given as the image list `[σ(1), ..., σ(n)]`
/// (zero-based). Addition is exact, so the split across threads does not
/// change the result.
fn permutation_sum<F>(n: usize, summand: F) -> Result<Scalar, SymfunError>
where
    F: Fn(&[usize]) -> Result<Scalar, SymfunError> + Sync,
{
    if n < PARALLEL_THRESHOLD {
        let mut total = Scalar::zero();
        for sigma in (0..n).permutations(n) {
            total += summand(&sigma)?;
        }
        return Ok(total);
    }
    let partials: Vec<Scalar> = (0..n)
        .into_par_iter()
        .map(|head| {
            let rest: Vec<usize> = (0..n).filter(|&i| i != head).collect();
            let mut sigma = Vec::with_capacity(n);
            let mut total = Scalar::zero();
            for tail in rest.into_iter().permutations(n - 1) {
                sigma.clear();
                sigma.push(head);
                sigma.extend(tail);
                total += summand(&sigma)?;
            }
            Ok(total)
        })
        .collect::<Result<_, SymfunError>>()?;
    Ok(partials.into_iter().sum())
}

/// Per-variable factor tables for the triangular sum.
struct TriangularTables {
    /// `tail[i][x] = Π_{k=x+1}^{N} (u_i - t w_k)` for `x = 0..=N`.
    tail: Vec<Vec<Scalar>>,
    /// `head[i][x] = Π_{k=1}^{x-1} (u_i - w_k)` for `x = 1..=N` (index `x`).
    head: Vec<Vec<Scalar>>,
    /// `(1 - t)(u_i^2 - 1)`.
    boundary_down: Vec<Scalar>,
    /// `B u_i - A`.
    boundary_up: Vec<Scalar>,
    /// `(t u_i - u_j)(u_i u_j - 1)`.
    cross_num: Vec<Vec<Scalar>>,
    /// `u_i - u_j`.
    cross_den: Vec<Vec<Scalar>>,
    /// `u_i u_j - t`.
    free_pair: Vec<Vec<Scalar>>,
}

impl TriangularTables {
    fn new(r: &RParams, k: &KParams, u: &[Scalar], w: &[Scalar]) -> Self {
        let t = &r.t;
        let one = Scalar::one();
        let big_n = w.len();
        let tail = u
            .iter()
            .map(|ui| {
                let mut row = vec![Scalar::one(); big_n + 1];
                for x in (0..big_n).rev() {
                    row[x] = &row[x + 1] * (ui - t * &w[x]);
                }
                row
            })
            .collect();
        let head = u
            .iter()
            .map(|ui| {
                let mut row = vec![Scalar::one(); big_n + 1];
                for x in 2..=big_n {
                    row[x] = &row[x - 1] * (ui - &w[x - 2]);
                }
                row
            })
            .collect();
        let pair_table = |f: &dyn Fn(&Scalar, &Scalar) -> Scalar| -> Vec<Vec<Scalar>> {
            u.iter().map(|a| u.iter().map(|b| f(a, b)).collect()).collect()
        };
        TriangularTables {
            tail,
            head,
            boundary_down: u.iter().map(|ui| (&one - t) * (ui * ui - &one)).collect(),
            boundary_up: u.iter().map(|ui| &k.b * ui - &k.a).collect(),
            cross_num: pair_table(&|a, b| (t * a - b) * (a * b - &one)),
            cross_den: pair_table(&|a, b| a - b),
            free_pair: pair_table(&|a, b| a * b - t),
        }
    }
}

fn validate_triangular(u: &[Scalar], w: &[Scalar], x: &SpinConfig) -> Result<(), SymfunError> {
    if x.sites() != w.len() {
        return Err(SymfunError::SizeMismatch(format!(
            "configuration on {} sites with {} column parameters",
            x.sites(),
            w.len()
        )));
    }
    if x.down_count() > u.len() {
        return Err(SymfunError::DownSpinsExceedRows { down: x.down_count(), rows: u.len() });
    }
    check_cap(u.len())?;
    check_distinct(u)
}

/// The permutation sum of the triangular symmetric function without the
/// `1/(n-m)!` normalization.
pub(crate) fn f_triangular_unnormalized(
    r: &RParams,
    k: &KParams,
    u: &[Scalar],
    w: &[Scalar],
    x: &SpinConfig,
) -> Result<Scalar, SymfunError> {
    validate_triangular(u, w, x)?;
    let n = u.len();
    let m = x.down_count();
    let xs = x.positions();
    let tables = TriangularTables::new(r, k, u, w);

    permutation_sum(n, |sigma| {
        let mut num = Scalar::one();
        let mut den = Scalar::one();
        for (j, &sj) in sigma[..m].iter().enumerate() {
            num *= &tables.tail[sj][xs[j]];
            num *= &tables.head[sj][xs[j]];
            num *= &tables.boundary_down[sj];
            for &sk in &sigma[j + 1..m] {
                num *= &tables.cross_num[sj][sk];
                den *= &tables.cross_den[sj][sk];
            }
        }
        for (j, &sj) in sigma.iter().enumerate().skip(m) {
            num *= &tables.tail[sj][0];
            num *= &tables.boundary_up[sj];
            for &sk in &sigma[..m] {
                num *= &tables.cross_num[sj][sk];
                den *= &tables.cross_den[sj][sk];
            }
            for &sk in &sigma[j + 1..] {
                num *= &tables.free_pair[sj][sk];
            }
        }
        Ok(num.checked_div(&den)?)
    })
}

/// The triangular-boundary symmetric function `F_{N,n,m}(u | w | x)`.
///
/// Requires `m <= n` and pairwise-distinct `u`; the `u_j` may be zero.
pub fn f_triangular(
    r: &RParams,
    k: &KParams,
    u: &[Scalar],
    w: &[Scalar],
    x: &SpinConfig,
) -> Result<Scalar, SymfunError> {
    let sum = f_triangular_unnormalized(r, k, u, w, x)?;
    Ok(sum.checked_div(&Scalar::factorial(u.len() - x.down_count()))?)
}

/// The symmetric function `OF_{N,n}(u | w | x)` for B-operator states.
pub fn of_ordinary(
    r: &RParams,
    sites: &[LSiteParams],
    u: &[Scalar],
    w: &[Scalar],
    x: &SpinConfig,
) -> Result<Scalar, SymfunError> {
    let big_n = w.len();
    let n = u.len();
    if sites.len() != big_n || x.sites() != big_n {
        return Err(SymfunError::SizeMismatch(format!(
            "{} sites, {} column parameters, configuration on {} sites",
            sites.len(),
            big_n,
            x.sites()
        )));
    }
    if x.down_count() != n {
        return Err(SymfunError::SizeMismatch(format!(
            "{} down spins for {} variables",
            x.down_count(),
            n
        )));
    }
    for site in sites {
        site.validate(r)?;
    }
    check_cap(n)?;
    check_distinct(u)?;

    let t = &r.t;
    let one_minus_t = Scalar::one() - t;
    let xs = x.positions();
    // tail[i][x] = Π_{k=x+1}^{N} (a_k u_i + b_k w_k); head[i][x] = Π_{k=1}^{x-1} (e_k u_i + f_k w_k).
    let tail: Vec<Vec<Scalar>> = u
        .iter()
        .map(|ui| {
            let mut row = vec![Scalar::one(); big_n + 1];
            for x in (0..big_n).rev() {
                row[x] = &row[x + 1] * (&sites[x].a * ui + &sites[x].b * &w[x]);
            }
            row
        })
        .collect();
    let head: Vec<Vec<Scalar>> = u
        .iter()
        .map(|ui| {
            let mut row = vec![Scalar::one(); big_n + 1];
            for x in 2..=big_n {
                row[x] = &row[x - 1] * (&sites[x - 2].e * ui + &sites[x - 2].f * &w[x - 2]);
            }
            row
        })
        .collect();

    permutation_sum(n, |sigma| {
        let mut num = Scalar::one();
        let mut den = Scalar::one();
        for (j, &sj) in sigma.iter().enumerate() {
            let uj = &u[sj];
            num *= &tail[sj][xs[j]];
            num *= &head[sj][xs[j]];
            num *= &one_minus_t * &sites[xs[j] - 1].c * uj;
            for &sk in &sigma[j + 1..] {
                num *= t * uj - &u[sk];
                den *= uj - &u[sk];
            }
        }
        Ok(num.checked_div(&den)?)
    })
}

/// `OF` with all `w_j = 1` and the couplings `a = 1, b = tβ, c = d = 1,
/// e = -1/β, f = -1`, in its rewritten form: a common product times a sum
/// over `S_n` of inversion ratios and `x`-powers.
pub fn of_homogeneous(r: &RParams, beta: &Scalar, u: &[Scalar], sites: usize, x: &SpinConfig) -> Result<Scalar, SymfunError> {
    let n = u.len();
    if x.sites() != sites || x.down_count() != n {
        return Err(SymfunError::SizeMismatch(format!(
            "configuration {:?} on {} sites for {} variables on {} sites",
            x.positions(),
            x.sites(),
            n,
            sites
        )));
    }
    check_cap(n)?;
    check_distinct(u)?;
    let t = &r.t;
    let one = Scalar::one();
    let beta_inv = beta.inv()?;
    let t_beta = t * beta;

    let mut prefactor = Scalar::one();
    for ui in u {
        let num = (&one - t) * ui * (ui + &t_beta).pow(sites as i64)?;
        let den = -(&beta_inv * ui) - &one;
        prefactor *= num.checked_div(&den)?;
    }
    for (j, uj) in u.iter().enumerate() {
        for uk in &u[j + 1..] {
            prefactor *= (t * uj - uk).checked_div(&(uj - uk))?;
        }
    }
    // ratio[i] = (-u_i/β - 1) / (u_i + tβ)
    let ratio: Vec<Scalar> = u
        .iter()
        .map(|ui| (-(&beta_inv * ui) - &one).checked_div(&(ui + &t_beta)))
        .collect::<Result<_, _>>()?;
    let xs = x.positions();
    let sum = permutation_sum(n, |sigma| {
        let mut num = Scalar::one();
        let mut den = Scalar::one();
        for j in 0..n {
            for k in j + 1..n {
                if sigma[j] > sigma[k] {
                    let (hi, lo) = (&u[sigma[j]], &u[sigma[k]]);
                    num *= lo - t * hi;
                    den *= t * lo - hi;
                }
            }
            num *= ratio[sigma[j]].pow(xs[j] as i64)?;
        }
        Ok(num.checked_div(&den)?)
    })?;
    Ok(prefactor * sum)
}

/// Young diagram `N - n >= λ_1 >= ... >= λ_n >= 0` in an `(N - n) x n` frame.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<usize>,
    sites: usize,
}

impl Partition {
    pub fn new(parts: Vec<usize>, sites: usize) -> Result<Self, SymfunError> {
        let n = parts.len();
        if n > sites {
            return Err(SymfunError::FrameViolation(format!("{n} parts on {sites} sites")));
        }
        if parts.windows(2).any(|p| p[0] < p[1]) {
            return Err(SymfunError::FrameViolation(format!("{parts:?} is not weakly decreasing")));
        }
        if parts.first().is_some_and(|&first| first > sites - n) {
            return Err(SymfunError::FrameViolation(format!(
                "{parts:?} exceeds width {}",
                sites - n
            )));
        }
        Ok(Partition { parts, sites })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn rows(&self) -> usize {
        self.parts.len()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Every partition with `n` parts in the `(N - n) x n` frame.
    pub fn all_in_frame(sites: usize, n: usize) -> Vec<Partition> {
        SpinConfig::all(sites, n).iter().map(x_to_lambda).collect()
    }
}

/// `λ_j = x_{n-j+1} - n + j - 1`.
pub fn x_to_lambda(x: &SpinConfig) -> Partition {
    let n = x.down_count();
    let xs = x.positions();
    let parts = (1..=n).map(|j| xs[n - j] + j - 1 - n).collect();
    Partition { parts, sites: x.sites() }
}

/// Inverse of [`x_to_lambda`]: `x_i = λ_{n-i+1} + i`.
pub fn lambda_to_x(lambda: &Partition) -> SpinConfig {
    let n = lambda.rows();
    let positions = (1..=n).map(|i| lambda.parts[n - i] + i).collect();
    SpinConfig::new(lambda.sites, positions).expect("partition in frame maps to a valid configuration")
}

/// Variables of a Grothendieck polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrothendieckPoint {
    z: Vec<Scalar>,
    beta: Scalar,
}

impl GrothendieckPoint {
    pub fn new(z: Vec<Scalar>, beta: Scalar) -> Result<Self, SymfunError> {
        check_distinct(&z)?;
        if beta.is_zero() {
            return Err(ScalarError::DivisionByZero.into());
        }
        Ok(GrothendieckPoint { z, beta })
    }

    pub fn z(&self) -> &[Scalar] {
        &self.z
    }

    pub fn beta(&self) -> &Scalar {
        &self.beta
    }
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn determinant(mut matrix: Vec<Vec<Scalar>>) -> Scalar {
    let n = matrix.len();
    assert!(matrix.iter().all(|row| row.len() == n), "square matrix expected");
    if n == 0 {
        return Scalar::one();
    }
    let mut sign_flip = false;
    let mut prev = Scalar::one();
    for i in 0..n - 1 {
        if matrix[i][i].is_zero() {
            match (i + 1..n).find(|&r| !matrix[r][i].is_zero()) {
                Some(r) => {
                    matrix.swap(i, r);
                    sign_flip = !sign_flip;
                }
                None => return Scalar::zero(),
            }
        }
        for j in i + 1..n {
            for k in i + 1..n {
                let value = &matrix[j][k] * &matrix[i][i] - &matrix[j][i] * &matrix[i][k];
                matrix[j][k] = value.checked_div(&prev).expect("Bareiss pivots are nonzero");
            }
        }
        prev = matrix[i][i].clone();
    }
    let det = matrix[n - 1][n - 1].clone();
    if sign_flip {
        -det
    } else {
        det
    }
}

/// `G_λ(z; β) = det(z_j^{λ_k + n - k} (1 + β z_j)^{k - 1}) / Π_{j<k} (z_j - z_k)`.
pub fn grothendieck(lambda: &Partition, point: &GrothendieckPoint) -> Result<Scalar, SymfunError> {
    let n = lambda.rows();
    if point.z.len() != n {
        return Err(SymfunError::SizeMismatch(format!(
            "{} variables for a partition with {} parts",
            point.z.len(),
            n
        )));
    }
    let one = Scalar::one();
    let mut matrix = Vec::with_capacity(n);
    for zj in &point.z {
        let deform = &one + &point.beta * zj;
        let row = (1..=n)
            .map(|k| Ok(zj.pow((lambda.parts[k - 1] + n - k) as i64)? * deform.pow(k as i64 - 1)?))
            .collect::<Result<Vec<_>, ScalarError>>()?;
        matrix.push(row);
    }
    let mut vandermonde = Scalar::one();
    for (j, zj) in point.z.iter().enumerate() {
        for zk in &point.z[j + 1..] {
            vandermonde *= zj - zk;
        }
    }
    Ok(determinant(matrix).checked_div(&vandermonde)?)
}

/// Inputs that turn `OF` into a Grothendieck polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrothendieckSpecialization {
    pub sites: Vec<LSiteParams>,
    /// All ones.
    pub w: Vec<Scalar>,
    /// `z_j = -1/β - 1/u_j`.
    pub z: Vec<Scalar>,
    /// `(-β)^{-n(n-1)/2} Π_j u_j^N`.
    pub prefactor: Scalar,
}

/// Site couplings `a = 1, b = tβ, c = d = 1, e = -1/β, f = -1` on `N` sites with
/// `w = 1`, the variable map `u ↦ z` and the prefactor relating `OF` at `t = 0`
/// to `G_λ(z; β)`. Sites are validated against `r`.
pub fn grothendieck_specialization(
    sites: usize,
    beta: &Scalar,
    u: &[Scalar],
    r: &RParams,
) -> Result<GrothendieckSpecialization, SymfunError> {
    let n = u.len();
    let beta_inv = beta.inv()?;
    let site = LSiteParams::new(
        Scalar::one(),
        &r.t * beta,
        Scalar::one(),
        Scalar::one(),
        -&beta_inv,
        Scalar::from_int(-1),
        r,
    )?;
    let z = u
        .iter()
        .map(|ui| Ok(-&beta_inv - ui.inv()?))
        .collect::<Result<Vec<_>, ScalarError>>()?;
    let mut prefactor = (-beta).pow(-((n * n.saturating_sub(1) / 2) as i64))?;
    for ui in u {
        prefactor *= ui.pow(sites as i64)?;
    }
    Ok(GrothendieckSpecialization {
        sites: vec![site; sites],
        w: vec![Scalar::one(); sites],
        z,
        prefactor,
    })
}
