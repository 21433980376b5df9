// SPDX-License-Identifier: Apache-2.0

//! Brute-force lattice contraction.
//!
//! States live in dense, bit-indexed amplitude vectors. Local R, K and L
//! operators are applied one at a time, in the order the monodromy products
//! act on a ket, and wavefunctions are read off as single amplitudes. Nothing
//! here knows about the closed-form symmetric functions; this is the oracle
//! they are checked against.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::weights::{k_matrix, l_matrix, r_matrix, LSiteParams, PairOp, KParams, RParams, SiteOp, WeightError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("site index {index} out of range for {sites} sites")]
    IndexOutOfRange { index: usize, sites: usize },
    #[error("two-site operator needs distinct sites, got {0} twice")]
    SameSite(usize),
    #[error("invalid spin configuration: {0}")]
    InvalidConfig(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
}

impl From<crate::scalar::ScalarError> for LatticeError {
    fn from(err: crate::scalar::ScalarError) -> Self {
        LatticeError::Weight(err.into())
    }
}

/// Dense amplitudes over `2^sites` basis states. Bit `sites - 1 - k` of a
/// basis index is the spin on factor `k`, so factor 0 is the most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockVector {
    sites: usize,
    amplitudes: Vec<Scalar>,
}

impl FockVector {
    /// All spins up, amplitude one.
    pub fn vacuum(sites: usize) -> Self {
        Self::basis(sites, 0)
    }

    pub fn basis(sites: usize, index: usize) -> Self {
        let mut amplitudes = vec![Scalar::zero(); 1 << sites];
        amplitudes[index] = Scalar::one();
        FockVector { sites, amplitudes }
    }

    pub fn from_amplitudes(sites: usize, amplitudes: Vec<Scalar>) -> Result<Self, LatticeError> {
        if amplitudes.len() != 1 << sites {
            return Err(LatticeError::SizeMismatch(format!(
                "{} amplitudes for {} sites",
                amplitudes.len(),
                sites
            )));
        }
        Ok(FockVector { sites, amplitudes })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn amplitudes(&self) -> &[Scalar] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> &Scalar {
        &self.amplitudes[index]
    }

    fn shift(&self, site: usize) -> Result<usize, LatticeError> {
        if site >= self.sites {
            return Err(LatticeError::IndexOutOfRange { index: site, sites: self.sites });
        }
        Ok(self.sites - 1 - site)
    }

    /// Applies `op` to factors `(first, second)` in place.
    pub fn apply_pair(&mut self, op: &PairOp, first: usize, second: usize) -> Result<(), LatticeError> {
        if first == second {
            return Err(LatticeError::SameSite(first));
        }
        let (sa, sb) = (self.shift(first)?, self.shift(second)?);
        let (ma, mb) = (1usize << sa, 1usize << sb);
        let rows = op.rows();
        for base in 0..self.amplitudes.len() {
            if base & (ma | mb) != 0 {
                continue;
            }
            let slots = [base, base | mb, base | ma, base | ma | mb];
            if slots.iter().all(|&i| self.amplitudes[i].is_zero()) {
                continue;
            }
            let input: [Scalar; 4] = slots.map(|i| std::mem::take(&mut self.amplitudes[i]));
            for (row, &slot) in slots.iter().enumerate() {
                let mut acc = Scalar::zero();
                for (coeff, value) in rows[row].iter().zip(&input) {
                    if !coeff.is_zero() && !value.is_zero() {
                        acc += coeff * value;
                    }
                }
                self.amplitudes[slot] = acc;
            }
        }
        Ok(())
    }

    pub fn apply_site(&mut self, op: &SiteOp, site: usize) -> Result<(), LatticeError> {
        let mask = 1usize << self.shift(site)?;
        let rows = op.rows();
        for base in 0..self.amplitudes.len() {
            if base & mask != 0 {
                continue;
            }
            let up = std::mem::take(&mut self.amplitudes[base]);
            let down = std::mem::take(&mut self.amplitudes[base | mask]);
            self.amplitudes[base] = &rows[0][0] * &up + &rows[0][1] * &down;
            self.amplitudes[base | mask] = &rows[1][0] * &up + &rows[1][1] * &down;
        }
        Ok(())
    }

    /// Contracts the leading `count` factors with `<0|`, keeping the rest.
    pub fn project_leading_up(&self, count: usize) -> FockVector {
        assert!(count <= self.sites);
        let rest = self.sites - count;
        FockVector { sites: rest, amplitudes: self.amplitudes[..1 << rest].to_vec() }
    }

    /// Indices of nonzero amplitudes.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.amplitudes.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, _)| i)
    }
}

/// `op` applied at `(site_a, site_b)` of a copy of `v`.
pub fn apply_two_site(op: &PairOp, site_a: usize, site_b: usize, v: &FockVector) -> Result<FockVector, LatticeError> {
    let mut out = v.clone();
    out.apply_pair(op, site_a, site_b)?;
    Ok(out)
}

/// Down-spin positions `1 <= x_1 < ... < x_m <= N` on an `N`-site row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinConfig {
    sites: usize,
    positions: Vec<usize>,
}

impl SpinConfig {
    pub fn new(sites: usize, positions: Vec<usize>) -> Result<Self, LatticeError> {
        if let Some(&bad) = positions.iter().find(|&&x| x == 0 || x > sites) {
            return Err(LatticeError::InvalidConfig(format!("position {bad} outside 1..={sites}")));
        }
        if positions.windows(2).any(|pair| pair[0] >= pair[1]) {
            return Err(LatticeError::InvalidConfig(format!(
                "positions {positions:?} are not strictly increasing"
            )));
        }
        Ok(SpinConfig { sites, positions })
    }

    pub fn empty(sites: usize) -> Self {
        SpinConfig { sites, positions: Vec::new() }
    }

    /// `x = (1, 2, ..., m)` on `m` sites.
    pub fn packed(m: usize) -> Self {
        SpinConfig { sites: m, positions: (1..=m).collect() }
    }

    /// Every configuration with `down` spins on `sites` sites, in lexicographic order.
    pub fn all(sites: usize, down: usize) -> Vec<SpinConfig> {
        use itertools::Itertools;
        (1..=sites)
            .combinations(down)
            .map(|positions| SpinConfig { sites, positions })
            .collect()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn down_count(&self) -> usize {
        self.positions.len()
    }

    pub fn last(&self) -> Option<usize> {
        self.positions.last().copied()
    }

    /// Whether the last down spin sits on the last site.
    pub fn ends_at_boundary(&self) -> bool {
        self.last() == Some(self.sites)
    }

    /// Drops the last site, which must not carry a down spin.
    pub fn without_last_site(&self) -> Result<Self, LatticeError> {
        if self.sites == 0 || self.ends_at_boundary() {
            return Err(LatticeError::InvalidConfig("last site carries a down spin".into()));
        }
        Ok(SpinConfig { sites: self.sites - 1, positions: self.positions.clone() })
    }

    /// Drops the last site together with its down spin.
    pub fn without_last_spin(&self) -> Result<Self, LatticeError> {
        if !self.ends_at_boundary() {
            return Err(LatticeError::InvalidConfig("last site carries no down spin".into()));
        }
        let mut positions = self.positions.clone();
        positions.pop();
        Ok(SpinConfig { sites: self.sites - 1, positions })
    }

    /// Basis index in an `N`-site [`FockVector`] (site 1 most significant).
    pub fn basis_index(&self) -> usize {
        self.positions.iter().fold(0, |acc, &x| acc | 1 << (self.sites - x))
    }

    pub fn from_basis_index(sites: usize, index: usize) -> Self {
        let positions = (1..=sites).filter(|&x| index >> (sites - x) & 1 == 1).collect();
        SpinConfig { sites, positions }
    }
}

/// Rows of R-matrices with a triangular K-matrix at the boundary, one row per
/// `u_j`, crossing `N` columns carrying `w_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangularModel {
    pub r: RParams,
    pub k: KParams,
    u: Vec<Scalar>,
    w: Vec<Scalar>,
}

impl TriangularModel {
    /// Every `u_j` must be nonzero since the K-matrix contains `u^{-1}`.
    /// Empty `u` or `w` lists are accepted as degenerate lattices.
    pub fn new(r: RParams, k: KParams, u: Vec<Scalar>, w: Vec<Scalar>) -> Result<Self, LatticeError> {
        if u.iter().any(Scalar::is_zero) {
            return Err(LatticeError::Weight(crate::scalar::ScalarError::DivisionByZero.into()));
        }
        Ok(TriangularModel { r, k, u, w })
    }

    pub fn u(&self) -> &[Scalar] {
        &self.u
    }

    pub fn w(&self) -> &[Scalar] {
        &self.w
    }

    /// `n`, the number of rows.
    pub fn rows(&self) -> usize {
        self.u.len()
    }

    /// `N`, the number of quantum sites.
    pub fn sites(&self) -> usize {
        self.w.len()
    }

    pub fn with_u(&self, u: Vec<Scalar>) -> Result<Self, LatticeError> {
        Self::new(self.r.clone(), self.k.clone(), u, self.w.clone())
    }

    pub fn with_w(&self, w: Vec<Scalar>) -> Self {
        TriangularModel { w, ..self.clone() }
    }

    /// Contracts all rows on the full `n + N` factor space, before projecting
    /// the auxiliary factors. Factor order: `-n, ..., -1, 1, ..., N`.
    pub fn contract(&self) -> Result<FockVector, LatticeError> {
        let n = self.rows();
        let big_n = self.sites();
        let aux = |j: usize| n - j;
        let site = |k: usize| n + k - 1;
        let one = Scalar::one();

        let mut state = FockVector::vacuum(n + big_n);
        // T_n acts first on the vacuum, T_1 last.
        for j in (1..=n).rev() {
            let u_j = &self.u[j - 1];
            state.apply_site(&k_matrix(u_j, &self.k)?, aux(j))?;
            for k in (1..j).rev() {
                let arg = u_j * &self.u[k - 1];
                state.apply_pair(&r_matrix(&arg, &one, &self.r), aux(j), aux(k))?;
            }
            for k in 1..=big_n {
                state.apply_pair(&r_matrix(u_j, &self.w[k - 1], &self.r), aux(j), site(k))?;
            }
        }
        Ok(state)
    }
}

/// The state vector on the `N` quantum sites after projecting every auxiliary
/// factor onto `<0|`.
pub fn triangular_state_vector(model: &TriangularModel) -> Result<FockVector, LatticeError> {
    Ok(model.contract()?.project_leading_up(model.rows()))
}

/// Amplitude of the triangular state vector at down spins exactly at `x`.
pub fn wavefunction_triangular(model: &TriangularModel, x: &SpinConfig) -> Result<Scalar, LatticeError> {
    if x.sites() != model.sites() {
        return Err(LatticeError::SizeMismatch(format!(
            "configuration on {} sites, model has {}",
            x.sites(),
            model.sites()
        )));
    }
    let state = triangular_state_vector(model)?;
    Ok(state.amplitude(x.basis_index()).clone())
}

/// Pairing of the full contraction with `<0^n 1^N|`: every auxiliary spin up,
/// every quantum spin down.
pub fn domain_wall_z(model: &TriangularModel) -> Result<Scalar, LatticeError> {
    let full = model.contract()?;
    let all_down = (1usize << model.sites()) - 1;
    Ok(full.amplitude(all_down).clone())
}

/// Rows of L-operators with per-site couplings; states are built with
/// B-operators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinaryModel {
    pub r: RParams,
    sites: Vec<LSiteParams>,
    u: Vec<Scalar>,
    w: Vec<Scalar>,
}

impl OrdinaryModel {
    pub fn new(r: RParams, sites: Vec<LSiteParams>, u: Vec<Scalar>, w: Vec<Scalar>) -> Result<Self, LatticeError> {
        if sites.len() != w.len() {
            return Err(LatticeError::SizeMismatch(format!(
                "{} site parameter sets for {} columns",
                sites.len(),
                w.len()
            )));
        }
        if u.len() > w.len() {
            return Err(LatticeError::SizeMismatch(format!(
                "{} B-operators on {} sites",
                u.len(),
                w.len()
            )));
        }
        for site in &sites {
            site.validate(&r)?;
        }
        Ok(OrdinaryModel { r, sites, u, w })
    }

    /// Like [`OrdinaryModel::new`] but accepts couplings that violate the
    /// site constraints. Used for negative controls.
    pub fn new_unvalidated(
        r: RParams,
        sites: Vec<LSiteParams>,
        u: Vec<Scalar>,
        w: Vec<Scalar>,
    ) -> Result<Self, LatticeError> {
        let valid = sites.iter().map(|_| LSiteParams::six_vertex(&r)).collect();
        let mut model = Self::new(r, valid, u, w)?;
        model.sites = sites;
        Ok(model)
    }

    pub fn site_params(&self) -> &[LSiteParams] {
        &self.sites
    }

    pub fn u(&self) -> &[Scalar] {
        &self.u
    }

    pub fn w(&self) -> &[Scalar] {
        &self.w
    }

    pub fn rows(&self) -> usize {
        self.u.len()
    }

    pub fn sites(&self) -> usize {
        self.w.len()
    }

    pub fn with_u(&self, u: Vec<Scalar>) -> Result<Self, LatticeError> {
        Self::new(self.r.clone(), self.sites.clone(), u, self.w.clone())
    }

    pub fn with_w(&self, w: Vec<Scalar>) -> Self {
        OrdinaryModel { w, ..self.clone() }
    }

    /// The first `count` columns only.
    pub fn truncated(&self, count: usize, u: Vec<Scalar>) -> Result<Self, LatticeError> {
        Self::new(self.r.clone(), self.sites[..count].to_vec(), u, self.w[..count].to_vec())
    }
}

/// `B(u) |state>`, where `B(u)` is the `<0|..|1>` auxiliary element of
/// `L_{aN}(u, w_N) ... L_{a1}(u, w_1)`.
pub fn apply_b_operator(model: &OrdinaryModel, u: &Scalar, state: &FockVector) -> Result<FockVector, LatticeError> {
    let big_n = model.sites();
    if state.sites() != big_n {
        return Err(LatticeError::SizeMismatch(format!(
            "state on {} sites, model has {}",
            state.sites(),
            big_n
        )));
    }
    // Auxiliary space is factor 0, prepared in |1>.
    let mut amplitudes = vec![Scalar::zero(); 1 << big_n];
    amplitudes.extend_from_slice(state.amplitudes());
    let mut extended = FockVector { sites: big_n + 1, amplitudes };
    for k in 1..=big_n {
        let op = l_matrix(u, &model.w[k - 1], &model.sites[k - 1], &model.r);
        extended.apply_pair(&op, 0, k)?;
    }
    Ok(extended.project_leading_up(1))
}

/// `B(u_1) ... B(u_n) |Ω>`.
pub fn ordinary_state_vector(model: &OrdinaryModel) -> Result<FockVector, LatticeError> {
    let mut state = FockVector::vacuum(model.sites());
    for u in model.u.iter().rev() {
        state = apply_b_operator(model, u, &state)?;
    }
    Ok(state)
}

/// `<x| B(u_1) ... B(u_n) |Ω>`; zero whenever `|x| != n`.
pub fn ordinary_wavefunction(model: &OrdinaryModel, x: &SpinConfig) -> Result<Scalar, LatticeError> {
    if x.sites() != model.sites() {
        return Err(LatticeError::SizeMismatch(format!(
            "configuration on {} sites, model has {}",
            x.sites(),
            model.sites()
        )));
    }
    Ok(ordinary_state_vector(model)?.amplitude(x.basis_index()).clone())
}
