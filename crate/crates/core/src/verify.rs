// SPDX-License-Identifier: Apache-2.0

//! Seeded, exact verification suites.
//!
//! A suite walks a grid of cells `(N, n, m, x)`, draws a random rational
//! parameter point per cell and trial, and compares both sides of every
//! identity exactly. Each cell gets its own generator derived from the sweep
//! seed and the cell coordinates, so results do not depend on scheduling.
//! Failures are reported with a witness instead of aborting the sweep.

use std::collections::BTreeMap;
use std::fmt::Display;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{
    domain_wall_z, ordinary_state_vector, triangular_state_vector, FockVector, OrdinaryModel, SpinConfig,
    TriangularModel,
};
use crate::scalar::{interpolate_degree, random_distinct, random_scalar, Scalar, UnivariateSample};
use crate::symfun::{
    f_triangular, f_triangular_unnormalized, grothendieck, grothendieck_specialization, of_homogeneous, of_ordinary,
    x_to_lambda, GrothendieckPoint,
};
use crate::weights::{reflection_sides, rll_sides, yang_baxter_sides, DenseOp, KParams, LSiteParams, RParams};

/// Largest `n + N` accepted by the triangular sweeps.
pub const MAX_FACTORS: usize = 16;
pub const DEFAULT_SEED: u64 = 7;
pub const ALGEBRAIC_TRIALS: usize = 100;

const DEGREE_NOTE: &str = "polynomial behaviour in w_N is certified on the sampled grid only";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("empty range {min}..={max} for {what}")]
    EmptyRange { what: &'static str, min: usize, max: usize },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("n + N = {0} exceeds {MAX_FACTORS}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

impl SizeRange {
    pub fn new(min: usize, max: usize) -> Self {
        SizeRange { min, max }
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.min..=self.max
    }
}

/// Which down-spin counts a sweep visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DownPolicy {
    /// Every `m` in `0..=min(n, N)`.
    All,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub sites: SizeRange,
    pub rows: SizeRange,
    pub down: DownPolicy,
    pub trials: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn new(sites: SizeRange, rows: SizeRange, down: DownPolicy, trials: usize, seed: u64) -> Result<Self, VerifyError> {
        let spec = SweepSpec { sites, rows, down, trials, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        for (what, range) in [("N", self.sites), ("n", self.rows)] {
            if range.min == 0 || range.min > range.max {
                return Err(VerifyError::EmptyRange { what, min: range.min, max: range.max });
            }
        }
        if self.trials == 0 {
            return Err(VerifyError::NoTrials);
        }
        if self.sites.max + self.rows.max > MAX_FACTORS {
            return Err(VerifyError::TooLarge(self.sites.max + self.rows.max));
        }
        Ok(())
    }

    pub fn triangular_default(seed: u64) -> Self {
        SweepSpec { sites: SizeRange::new(1, 4), rows: SizeRange::new(1, 4), down: DownPolicy::All, trials: 5, seed }
    }

    pub fn ordinary_default(seed: u64) -> Self {
        SweepSpec { sites: SizeRange::new(1, 5), rows: SizeRange::new(1, 3), down: DownPolicy::All, trials: 5, seed }
    }

    pub fn grothendieck_default(seed: u64) -> Self {
        SweepSpec { sites: SizeRange::new(1, 5), rows: SizeRange::new(1, 3), down: DownPolicy::All, trials: 3, seed }
    }

    fn down_counts(&self, rows: usize, sites: usize) -> Vec<usize> {
        let top = rows.min(sites);
        match self.down {
            DownPolicy::All => (0..=top).collect(),
            DownPolicy::Fixed(m) if m <= top => vec![m],
            DownPolicy::Fixed(_) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(Scalar),
    List(Vec<Scalar>),
}

impl From<Scalar> for ParamValue {
    fn from(value: Scalar) -> Self {
        ParamValue::Scalar(value)
    }
}

impl From<Vec<Scalar>> for ParamValue {
    fn from(values: Vec<Scalar>) -> Self {
        ParamValue::List(values)
    }
}

pub type ParamPoint = BTreeMap<String, ParamValue>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Witness {
    pub left: String,
    pub right: String,
}

/// Outcome of one check on one cell over all its trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckReport {
    pub check_id: String,
    #[serde(rename = "N")]
    pub sites: usize,
    #[serde(rename = "n")]
    pub rows: usize,
    #[serde(rename = "m")]
    pub down: usize,
    pub x: Vec<usize>,
    /// The failing point if there is one, otherwise the first trial's point.
    pub params_used: ParamPoint,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Deliberate corruptions used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// K-matrix with upper-right entry 1.
    NonTriangularK,
    /// Triangular formula without its `1/(n-m)!` factor.
    DropFactorialPrefactor,
    /// Site couplings with `f` drawn freely instead of solved.
    UnconstrainedSites,
}

#[derive(Debug, Clone)]
struct Cell {
    sites: usize,
    rows: usize,
    down: usize,
    config: SpinConfig,
}

impl Cell {
    fn of(rows: usize, config: SpinConfig) -> Self {
        Cell { sites: config.sites(), rows, down: config.down_count(), config }
    }

    fn bare(sites: usize, rows: usize, down: usize) -> Self {
        Cell { sites, rows, down, config: SpinConfig::empty(0) }
    }
}

fn cell_rng(seed: u64, family: &str, cell: &Cell, trial: usize) -> ChaCha8Rng {
    let key = format!(
        "{family}|{}|{}|{}|{:?}|{trial}",
        cell.sites,
        cell.rows,
        cell.down,
        cell.config.positions()
    );
    // FNV-1a, stable across platforms and releases.
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in key.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ hash)
}

fn err<E: Display>(e: E) -> String {
    e.to_string()
}

fn show<T: Display>(value: &Result<T, String>) -> String {
    match value {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

struct Tally {
    check_id: &'static str,
    trials: usize,
    failures: usize,
    params: Option<ParamPoint>,
    witness: Option<Witness>,
    note: Option<&'static str>,
}

/// Per-cell accumulator of check outcomes.
struct CellRun {
    cell: Cell,
    required: usize,
    tallies: Vec<Tally>,
}

impl CellRun {
    fn new(cell: Cell, required: usize) -> Self {
        CellRun { cell, required, tallies: Vec::new() }
    }

    fn tally(&mut self, check_id: &'static str) -> &mut Tally {
        let index = match self.tallies.iter().position(|t| t.check_id == check_id) {
            Some(index) => index,
            None => {
                self.tallies.push(Tally { check_id, trials: 0, failures: 0, params: None, witness: None, note: None });
                self.tallies.len() - 1
            }
        };
        &mut self.tallies[index]
    }

    fn record<T: PartialEq + Display>(
        &mut self,
        check_id: &'static str,
        params: &ParamPoint,
        left: Result<T, String>,
        right: Result<T, String>,
    ) -> bool {
        let equal = matches!((&left, &right), (Ok(l), Ok(r)) if l == r);
        let tally = self.tally(check_id);
        tally.trials += 1;
        if tally.params.is_none() {
            tally.params = Some(params.clone());
        }
        if !equal {
            tally.failures += 1;
            if tally.witness.is_none() {
                tally.params = Some(params.clone());
                tally.witness = Some(Witness { left: show(&left), right: show(&right) });
            }
        }
        equal
    }

    fn note(&mut self, check_id: &'static str, note: &'static str) {
        self.tally(check_id).note = Some(note);
    }

    fn finish(self) -> Vec<CheckReport> {
        let cell = self.cell;
        let required = self.required;
        self.tallies
            .into_iter()
            .map(|tally| {
                let passed = tally.failures == 0 && tally.trials >= required;
                let witness = match tally.witness {
                    None if !passed => Some(Witness {
                        left: format!("{} trials", tally.trials),
                        right: format!("{required} required"),
                    }),
                    other => other,
                };
                CheckReport {
                    check_id: tally.check_id.to_string(),
                    sites: cell.sites,
                    rows: cell.rows,
                    down: cell.down,
                    x: cell.config.positions().to_vec(),
                    params_used: tally.params.unwrap_or_default(),
                    passed,
                    witness,
                    trials: tally.trials,
                    note: tally.note.map(str::to_string),
                }
            })
            .collect()
    }
}

fn sort_reports(reports: &mut [CheckReport]) {
    reports.sort_by(|a, b| {
        (&a.check_id, a.sites, a.rows, a.down, &a.x).cmp(&(&b.check_id, b.sites, b.rows, b.down, &b.x))
    });
}

fn run_cells(cells: Vec<Cell>, run: impl Fn(Cell) -> Vec<CheckReport> + Sync + Send) -> Vec<CheckReport> {
    let mut reports: Vec<CheckReport> = cells.into_par_iter().flat_map_iter(run).collect();
    sort_reports(&mut reports);
    reports
}

/// Whether every report passed.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

fn generic_t(rng: &mut ChaCha8Rng) -> Result<Scalar, String> {
    random_scalar(rng, &[Scalar::zero(), Scalar::one(), Scalar::from_int(-1)]).map_err(err)
}

fn nonzero(rng: &mut ChaCha8Rng) -> Result<Scalar, String> {
    random_scalar(rng, &[]).map_err(err)
}

fn dense_witness(left: &DenseOp, right: &DenseOp) -> (Result<String, String>, Result<String, String>) {
    match left.first_difference(right) {
        None => (Ok("equal".into()), Ok("equal".into())),
        Some((row, col)) => (
            Ok(format!("[{row},{col}] {}", left.get(row, col))),
            Ok(format!("[{row},{col}] {}", right.get(row, col))),
        ),
    }
}

/// All cells `(N, n, m, x)` of one `(N, n)`. They share one parameter point
/// per trial, so a single contraction serves every `x`.
struct Block {
    sites: usize,
    rows: usize,
    runs: Vec<CellRun>,
}

impl Block {
    fn new(sites: usize, rows: usize, configs: Vec<SpinConfig>, trials: usize) -> Self {
        let runs = configs.into_iter().map(|x| CellRun::new(Cell::of(rows, x), trials)).collect();
        Block { sites, rows, runs }
    }

    fn rng(&self, seed: u64, family: &str, trial: usize) -> ChaCha8Rng {
        cell_rng(seed, family, &Cell::bare(self.sites, self.rows, 0), trial)
    }

    fn any(&self, pred: impl Fn(&SpinConfig) -> bool) -> bool {
        self.runs.iter().any(|run| pred(&run.cell.config))
    }

    /// Records `check(x)` for every cell where it returns a pair of sides.
    fn record_each<T: PartialEq + Display>(
        &mut self,
        check_id: &'static str,
        params: &ParamPoint,
        check: impl Fn(&SpinConfig) -> Option<(Result<T, String>, Result<T, String>)>,
    ) {
        for run in &mut self.runs {
            if let Some((left, right)) = check(&run.cell.config) {
                run.record(check_id, params, left, right);
            }
        }
    }

    fn sampling_failure(&mut self, e: String) {
        self.record_each::<Scalar>("sampling", &ParamPoint::new(), |_| Some((Err(e.clone()), Ok(Scalar::zero()))));
    }

    fn note(&mut self, check_id: &'static str, note: &'static str) {
        for run in &mut self.runs {
            run.note(check_id, note);
        }
    }

    fn finish(self) -> Vec<CheckReport> {
        self.runs.into_iter().flat_map(CellRun::finish).collect()
    }
}

fn run_blocks(blocks: Vec<Block>, run: impl Fn(Block) -> Vec<CheckReport> + Sync + Send) -> Vec<CheckReport> {
    let mut reports: Vec<CheckReport> = blocks.into_par_iter().flat_map_iter(run).collect();
    sort_reports(&mut reports);
    reports
}

type Amplitudes = Result<FockVector, String>;

fn amp(vector: &Amplitudes, x: &SpinConfig) -> Result<Scalar, String> {
    match vector {
        Ok(v) if v.sites() == x.sites() => Ok(v.amplitude(x.basis_index()).clone()),
        Ok(v) => Err(format!("configuration on {} sites, vector on {}", x.sites(), v.sites())),
        Err(e) => Err(e.clone()),
    }
}

fn triangular_vector(model: &TriangularModel) -> Amplitudes {
    triangular_state_vector(model).map_err(err)
}

fn ordinary_vector(model: &OrdinaryModel) -> Amplitudes {
    ordinary_state_vector(model).map_err(err)
}

/// Degree in `w_N`: `n - 1` if the last down spin sits on site `N`, else `n`.
fn expected_degree(x: &SpinConfig, rows: usize) -> i64 {
    if x.ends_at_boundary() {
        rows as i64 - 1
    } else {
        rows as i64
    }
}

/// State vectors at `rows + 2` distinct values of the last column parameter.
fn last_column_samples(
    rng: &mut ChaCha8Rng,
    rows: usize,
    w: &[Scalar],
    eval: impl Fn(Vec<Scalar>) -> Amplitudes,
) -> Result<Vec<(Scalar, FockVector)>, String> {
    let samples = random_distinct(rng, rows + 2, &[]).map_err(err)?;
    samples
        .into_iter()
        .map(|wn| {
            let mut shifted = w.to_vec();
            *shifted.last_mut().expect("at least one column") = wn.clone();
            Ok((wn, eval(shifted)?))
        })
        .collect()
}

fn degree_of(samples: &Result<Vec<(Scalar, FockVector)>, String>, x: &SpinConfig, rows: usize) -> Result<i64, String> {
    let samples = samples.as_ref().map_err(Clone::clone)?;
    let points = samples.iter().map(|(wn, v)| (wn.clone(), v.amplitude(x.basis_index()).clone())).collect();
    let sample = UnivariateSample::new(points).map_err(err)?;
    interpolate_degree(&sample, rows).map_err(err)
}

fn sample_abscissae(samples: &Result<Vec<(Scalar, FockVector)>, String>) -> Vec<Scalar> {
    samples.as_ref().map(|s| s.iter().map(|(wn, _)| wn.clone()).collect()).unwrap_or_default()
}

/// State vectors after each adjacent transposition of `u`.
fn transposed_vectors(u: &[Scalar], eval: impl Fn(Vec<Scalar>) -> Amplitudes) -> Vec<Amplitudes> {
    (0..u.len().saturating_sub(1))
        .map(|i| {
            let mut swapped = u.to_vec();
            swapped.swap(i, i + 1);
            eval(swapped)
        })
        .collect()
}

/// The first transposed amplitude differing from the base one, or the base
/// amplitude twice.
fn symmetry_pair(
    base: &Amplitudes,
    swapped: &[Amplitudes],
    x: &SpinConfig,
) -> (Result<Scalar, String>, Result<Scalar, String>) {
    let reference = amp(base, x);
    for vector in swapped {
        let value = amp(vector, x);
        if value != reference {
            return (reference, value);
        }
    }
    (reference.clone(), reference)
}

struct TriangularPoint {
    model: TriangularModel,
    params: ParamPoint,
}

fn sample_triangular(rng: &mut ChaCha8Rng, rows: usize, sites: usize, fault: Fault) -> Result<TriangularPoint, String> {
    let t = generic_t(rng)?;
    let a = nonzero(rng)?;
    let b = nonzero(rng)?;
    let u = random_distinct(rng, rows, &[Scalar::zero(), Scalar::one(), Scalar::from_int(-1)]).map_err(err)?;
    let t_inv = t.inv().map_err(err)?;
    let special: Vec<Scalar> = u.iter().map(|uj| uj * &t_inv).collect();
    let w = random_distinct(rng, sites, &special).map_err(err)?;

    let mut params = ParamPoint::new();
    params.insert("t".into(), t.clone().into());
    params.insert("A".into(), a.clone().into());
    params.insert("B".into(), b.clone().into());
    params.insert("u".into(), u.clone().into());
    params.insert("w".into(), w.clone().into());
    let mut k = KParams::new(a, b);
    if fault == Fault::NonTriangularK {
        k = k.with_upper_right(Scalar::one());
        params.insert("K_upper_right".into(), Scalar::one().into());
    }
    let model = TriangularModel::new(RParams::new(t), k, u, w).map_err(err)?;
    Ok(TriangularPoint { model, params })
}

fn triangular_blocks(spec: &SweepSpec) -> Vec<Block> {
    let mut blocks = Vec::new();
    for sites in spec.sites.iter() {
        for rows in spec.rows.iter() {
            let configs: Vec<SpinConfig> =
                spec.down_counts(rows, sites).into_iter().flat_map(|m| SpinConfig::all(sites, m)).collect();
            if !configs.is_empty() {
                blocks.push(Block::new(sites, rows, configs, spec.trials));
            }
        }
    }
    blocks
}

fn triangular_properties_block(mut block: Block, spec: &SweepSpec, fault: Fault) -> Vec<CheckReport> {
    let (rows, sites) = (block.rows, block.sites);
    for trial in 0..spec.trials {
        let mut rng = block.rng(spec.seed, "triangular-properties", trial);
        let point = match sample_triangular(&mut rng, rows, sites, fault) {
            Ok(point) => point,
            Err(e) => {
                block.sampling_failure(e);
                continue;
            }
        };
        let model = &point.model;
        let (r, k) = (&model.r, &model.k);
        let t = &r.t;
        let one = Scalar::one();
        let u = model.u().to_vec();
        let w = model.w().to_vec();
        let un = &u[rows - 1];
        let base = triangular_vector(model);

        let samples = last_column_samples(&mut rng, rows, &w, |w2| triangular_vector(&model.with_w(w2)));
        let mut degree_params = point.params.clone();
        degree_params.insert("w_N_samples".into(), sample_abscissae(&samples).into());
        block.record_each("triangular.degree", &degree_params, |x| {
            Some((degree_of(&samples, x, rows), Ok(expected_degree(x, rows))))
        });
        block.note("triangular.degree", DEGREE_NOTE);

        let swapped =
            transposed_vectors(&u, |u2| model.with_u(u2).map_err(err).and_then(|m| triangular_vector(&m)));
        block.record_each("triangular.symmetry", &point.params, |x| Some(symmetry_pair(&base, &swapped, x)));

        // Vector at w_N = u_n / t, shared by the recursion and the N = 1 evaluation.
        let w_special = un.checked_div(t).map_err(err).map(|wn| {
            let mut ws = w.clone();
            ws[sites - 1] = wn;
            ws
        });
        let mut special_params = point.params.clone();
        if let Ok(ws) = &w_special {
            special_params.insert("w".into(), ws.clone().into());
        }
        let special = w_special.clone().and_then(|ws| triangular_vector(&model.with_w(ws)));

        if block.any(SpinConfig::ends_at_boundary) {
            let mut prefactor = &one - t;
            for uj in &u[..rows - 1] {
                prefactor *= t * uj - un;
            }
            for uj in &u {
                prefactor *= uj * un - &one;
            }
            for wk in &w[..sites - 1] {
                prefactor *= un - wk;
            }
            let sub = TriangularModel::new(r.clone(), k.clone(), u[..rows - 1].to_vec(), w[..sites - 1].to_vec())
                .map_err(err)
                .and_then(|m| triangular_vector(&m));
            block.record_each("triangular.recursion", &special_params, |x| {
                x.ends_at_boundary().then(|| {
                    let rhs = x.without_last_spin().map_err(err).and_then(|xs| Ok(&prefactor * amp(&sub, &xs)?));
                    (amp(&special, x), rhs)
                })
            });
        }

        if block.any(|x| !x.ends_at_boundary()) {
            let factor: Scalar = u.iter().map(|uj| uj - t * &w[sites - 1]).product();
            let sub = TriangularModel::new(r.clone(), k.clone(), u.clone(), w[..sites - 1].to_vec())
                .map_err(err)
                .and_then(|m| triangular_vector(&m));
            block.record_each("triangular.factorization", &point.params, |x| {
                (!x.ends_at_boundary()).then(|| {
                    let rhs = x.without_last_site().map_err(err).and_then(|xs| Ok(&factor * amp(&sub, &xs)?));
                    (amp(&base, x), rhs)
                })
            });
        }

        if sites == 1 {
            let mut single_down = &one - t;
            for (j, uj) in u[..rows - 1].iter().enumerate() {
                single_down *= (t * uj - un) * (&k.b * uj - &k.a);
                for ul in &u[j + 1..rows - 1] {
                    single_down *= uj * ul - t;
                }
            }
            for uj in &u {
                single_down *= uj * un - &one;
            }
            block.record_each("triangular.initial-single-down", &special_params, |x| {
                (x.down_count() == 1).then(|| (amp(&special, x), Ok(single_down.clone())))
            });

            let mut no_down = Scalar::one();
            for (j, uj) in u.iter().enumerate() {
                no_down *= (&k.b * uj - &k.a) * (uj - t * &w[0]);
                for ul in &u[j + 1..] {
                    no_down *= uj * ul - t;
                }
            }
            block.record_each("triangular.initial-no-down", &point.params, |x| {
                (x.down_count() == 0).then(|| (amp(&base, x), Ok(no_down.clone())))
            });
        }
    }
    block.finish()
}

/// Degree in `w_N`, symmetry in `u`, the recursion at `w_N = u_n / t`, the
/// factorization when `x_m < N`, and the `N = 1` evaluations, all against the
/// lattice contraction.
pub fn verify_triangular_properties(spec: &SweepSpec) -> Result<Vec<CheckReport>, VerifyError> {
    verify_triangular_properties_with(spec, Fault::None)
}

pub fn verify_triangular_properties_with(spec: &SweepSpec, fault: Fault) -> Result<Vec<CheckReport>, VerifyError> {
    spec.validate()?;
    Ok(run_blocks(triangular_blocks(spec), |block| triangular_properties_block(block, spec, fault)))
}

fn triangular_formula_block(mut block: Block, spec: &SweepSpec, fault: Fault) -> Vec<CheckReport> {
    let (rows, sites) = (block.rows, block.sites);
    for trial in 0..spec.trials {
        let mut rng = block.rng(spec.seed, "triangular-formula", trial);
        let point = match sample_triangular(&mut rng, rows, sites, fault) {
            Ok(point) => point,
            Err(e) => {
                block.sampling_failure(e);
                continue;
            }
        };
        let model = &point.model;
        let base = triangular_vector(model);
        block.record_each("triangular.formula", &point.params, |x| {
            let formula = if fault == Fault::DropFactorialPrefactor {
                f_triangular_unnormalized(&model.r, &model.k, model.u(), model.w(), x)
            } else {
                f_triangular(&model.r, &model.k, model.u(), model.w(), x)
            };
            Some((amp(&base, x), formula.map_err(err)))
        });
        if block.any(|x| x.down_count() == sites) {
            let dw = domain_wall_z(model).map_err(err);
            block.record_each("triangular.domain-wall", &point.params, |x| {
                (x.down_count() == sites).then(|| (dw.clone(), amp(&base, x)))
            });
        }
    }
    block.finish()
}

/// Lattice contraction against the permutation-sum formula for every
/// configuration with `m <= n`, and the domain-wall special case `N = m`.
pub fn verify_triangular_formula(spec: &SweepSpec) -> Result<Vec<CheckReport>, VerifyError> {
    verify_triangular_formula_with(spec, Fault::None)
}

pub fn verify_triangular_formula_with(spec: &SweepSpec, fault: Fault) -> Result<Vec<CheckReport>, VerifyError> {
    spec.validate()?;
    Ok(run_blocks(triangular_blocks(spec), |block| triangular_formula_block(block, spec, fault)))
}

struct OrdinaryPoint {
    model: OrdinaryModel,
    params: ParamPoint,
}

fn sample_sites(rng: &mut ChaCha8Rng, count: usize, r: &RParams, fault: Fault) -> Result<Vec<LSiteParams>, String> {
    (0..count)
        .map(|_| {
            let (a, b, c, d) = (nonzero(rng)?, nonzero(rng)?, nonzero(rng)?, nonzero(rng)?);
            let solved = LSiteParams::solve(a, b, c, d, r).map_err(err)?;
            if fault != Fault::UnconstrainedSites {
                return Ok(solved);
            }
            let f = random_scalar(rng, std::slice::from_ref(&solved.f)).map_err(err)?;
            Ok(LSiteParams::new_unchecked(solved.a, solved.b, solved.c, solved.d, solved.e, f))
        })
        .collect()
}

fn site_params(params: &mut ParamPoint, sites: &[LSiteParams]) {
    let column = |f: fn(&LSiteParams) -> &Scalar| sites.iter().map(f).cloned().collect::<Vec<_>>();
    params.insert("a".into(), column(|s| &s.a).into());
    params.insert("b".into(), column(|s| &s.b).into());
    params.insert("c".into(), column(|s| &s.c).into());
    params.insert("d".into(), column(|s| &s.d).into());
    params.insert("e".into(), column(|s| &s.e).into());
    params.insert("f".into(), column(|s| &s.f).into());
}

fn sample_ordinary(rng: &mut ChaCha8Rng, rows: usize, sites: usize, fault: Fault) -> Result<OrdinaryPoint, String> {
    let t = generic_t(rng)?;
    let r = RParams::new(t.clone());
    let site_list = sample_sites(rng, sites, &r, fault)?;
    let u = random_distinct(rng, rows, &[Scalar::zero()]).map_err(err)?;
    let last = &site_list[sites - 1];
    let special = (-(&last.a * &u[rows - 1])).checked_div(&last.b).map_err(err)?;
    let w = random_distinct(rng, sites, &[special]).map_err(err)?;

    let mut params = ParamPoint::new();
    params.insert("t".into(), t.into());
    params.insert("u".into(), u.clone().into());
    params.insert("w".into(), w.clone().into());
    site_params(&mut params, &site_list);
    let model = if fault == Fault::UnconstrainedSites {
        OrdinaryModel::new_unvalidated(r, site_list, u, w).map_err(err)?
    } else {
        OrdinaryModel::new(r, site_list, u, w).map_err(err)?
    };
    Ok(OrdinaryPoint { model, params })
}

fn ordinary_blocks(spec: &SweepSpec) -> Vec<Block> {
    let mut blocks = Vec::new();
    for sites in spec.sites.iter() {
        for rows in spec.rows.iter().filter(|&rows| rows <= sites) {
            if matches!(spec.down, DownPolicy::Fixed(m) if m != rows) {
                continue;
            }
            blocks.push(Block::new(sites, rows, SpinConfig::all(sites, rows), spec.trials));
        }
    }
    blocks
}

/// RLL for every site at a random pair of spectral parameters, as the two
/// sides of the first mismatch or `equal` twice.
fn rll_gate(rng: &mut ChaCha8Rng, model: &OrdinaryModel) -> (Result<String, String>, Result<String, String>) {
    for (site, wk) in model.site_params().iter().zip(model.w()) {
        let outcome = match random_distinct(rng, 2, &[]) {
            Ok(u) => {
                let (lhs, rhs) = rll_sides(&u[0], &u[1], wk, site, &model.r);
                dense_witness(&lhs, &rhs)
            }
            Err(e) => (Err(err(e)), Ok(String::new())),
        };
        if outcome.0 != outcome.1 {
            return outcome;
        }
    }
    (Ok("equal".into()), Ok("equal".into()))
}

/// Runs `checks` per trial behind the RLL gate. Once the gate fails, only the
/// gate reports are kept.
fn ordinary_trials(
    mut block: Block,
    spec: &SweepSpec,
    fault: Fault,
    family: &'static str,
    mut checks: impl FnMut(&mut Block, &mut ChaCha8Rng, &OrdinaryPoint),
) -> Vec<CheckReport> {
    for trial in 0..spec.trials {
        let mut rng = block.rng(spec.seed, family, trial);
        let point = match sample_ordinary(&mut rng, block.rows, block.sites, fault) {
            Ok(point) => point,
            Err(e) => {
                block.sampling_failure(e);
                continue;
            }
        };
        let gate = rll_gate(&mut rng, &point.model);
        let open = gate.0 == gate.1;
        block.record_each("ordinary.rll-gate", &point.params, |_| Some(gate.clone()));
        if !open {
            for run in &mut block.runs {
                run.tallies.retain(|t| t.check_id == "ordinary.rll-gate");
                run.required = run.tallies[0].trials;
            }
            return block.finish();
        }
        checks(&mut block, &mut rng, &point);
    }
    block.finish()
}

fn ordinary_properties_block(block: Block, spec: &SweepSpec, fault: Fault) -> Vec<CheckReport> {
    let (rows, sites) = (block.rows, block.sites);
    ordinary_trials(block, spec, fault, "ordinary-properties", |block, rng, point| {
        let model = &point.model;
        let t = &model.r.t;
        let one = Scalar::one();
        let u = model.u().to_vec();
        let w = model.w().to_vec();
        let un = &u[rows - 1];
        let last = &model.site_params()[sites - 1];
        let base = ordinary_vector(model);

        let samples = last_column_samples(rng, rows, &w, |w2| ordinary_vector(&model.with_w(w2)));
        let mut degree_params = point.params.clone();
        degree_params.insert("w_N_samples".into(), sample_abscissae(&samples).into());
        block.record_each("ordinary.degree", &degree_params, |x| {
            Some((degree_of(&samples, x, rows), Ok(expected_degree(x, rows))))
        });
        block.note("ordinary.degree", DEGREE_NOTE);

        let swapped = transposed_vectors(&u, |u2| model.with_u(u2).map_err(err).and_then(|m| ordinary_vector(&m)));
        block.record_each("ordinary.symmetry", &point.params, |x| Some(symmetry_pair(&base, &swapped, x)));

        if block.any(SpinConfig::ends_at_boundary) {
            let w_special = (-(&last.a * un)).checked_div(&last.b).map_err(err).map(|wn| {
                let mut ws = w.clone();
                ws[sites - 1] = wn;
                ws
            });
            let mut params = point.params.clone();
            if let Ok(ws) = &w_special {
                params.insert("w".into(), ws.clone().into());
            }
            let special = w_special.and_then(|ws| ordinary_vector(&model.with_w(ws)));
            let mut prefactor = (&one - t) * &last.c * un;
            for uj in &u[..rows - 1] {
                prefactor *= &last.a * (t * uj - un);
            }
            for (site, wk) in model.site_params()[..sites - 1].iter().zip(&w) {
                prefactor *= &site.e * un + &site.f * wk;
            }
            let sub = model.truncated(sites - 1, u[..rows - 1].to_vec()).map_err(err).and_then(|m| ordinary_vector(&m));
            block.record_each("ordinary.recursion", &params, |x| {
                x.ends_at_boundary().then(|| {
                    let rhs = x.without_last_spin().map_err(err).and_then(|xs| Ok(&prefactor * amp(&sub, &xs)?));
                    (amp(&special, x), rhs)
                })
            });
        }

        if block.any(|x| !x.ends_at_boundary()) {
            let factor: Scalar = u.iter().map(|uj| &last.a * uj + &last.b * &w[sites - 1]).product();
            let sub = model.truncated(sites - 1, u.clone()).map_err(err).and_then(|m| ordinary_vector(&m));
            block.record_each("ordinary.factorization", &point.params, |x| {
                (!x.ends_at_boundary()).then(|| {
                    let rhs = x.without_last_site().map_err(err).and_then(|xs| Ok(&factor * amp(&sub, &xs)?));
                    (amp(&base, x), rhs)
                })
            });
        }

        if sites == 1 && rows == 1 {
            let expected = (&one - t) * &last.c * &u[0];
            block.record_each("ordinary.initial", &point.params, |x| Some((amp(&base, x), Ok(expected.clone()))));
        }
    })
}

/// Degree, symmetry, recursion at `w_N = -a_N u_n / b_N`, factorization and
/// the single-site value for B-operator states, behind an RLL gate on the
/// sampled site couplings.
pub fn verify_ordinary_properties(spec: &SweepSpec) -> Result<Vec<CheckReport>, VerifyError> {
    verify_ordinary_properties_with(spec, Fault::None)
}

pub fn verify_ordinary_properties_with(spec: &SweepSpec, fault: Fault) -> Result<Vec<CheckReport>, VerifyError> {
    spec.validate()?;
    Ok(run_blocks(ordinary_blocks(spec), |block| ordinary_properties_block(block, spec, fault)))
}

fn ordinary_formula_block(block: Block, spec: &SweepSpec, fault: Fault) -> Vec<CheckReport> {
    ordinary_trials(block, spec, fault, "ordinary-formula", |block, _rng, point| {
        let model = &point.model;
        let base = ordinary_vector(model);
        block.record_each("ordinary.formula", &point.params, |x| {
            let formula = of_ordinary(&model.r, model.site_params(), model.u(), model.w(), x).map_err(err);
            Some((amp(&base, x), formula))
        });

        let reversed: Vec<Scalar> = model.u().iter().rev().cloned().collect();
        let commuted = model.with_u(reversed).map_err(err).and_then(|m| ordinary_vector(&m));
        block.record_each("ordinary.b-commute", &point.params, |x| Some((amp(&commuted, x), amp(&base, x))));

        let six_vertex = vec![LSiteParams::six_vertex(&model.r); model.sites()];
        let lattice = OrdinaryModel::new(model.r.clone(), six_vertex.clone(), model.u().to_vec(), model.w().to_vec())
            .map_err(err)
            .and_then(|m| ordinary_vector(&m));
        let mut params = point.params.clone();
        site_params(&mut params, &six_vertex);
        block.record_each("ordinary.formula-six-vertex", &params, |x| {
            let formula = of_ordinary(&model.r, &six_vertex, model.u(), model.w(), x).map_err(err);
            Some((amp(&lattice, x), formula))
        });
    })
}

/// Lattice B-operator states against the permutation-sum formula, the
/// six-vertex couplings as a special case, and commutativity of B.
pub fn verify_ordinary_formula(spec: &SweepSpec) -> Result<Vec<CheckReport>, VerifyError> {
    verify_ordinary_formula_with(spec, Fault::None)
}

pub fn verify_ordinary_formula_with(spec: &SweepSpec, fault: Fault) -> Result<Vec<CheckReport>, VerifyError> {
    spec.validate()?;
    Ok(run_blocks(ordinary_blocks(spec), |block| ordinary_formula_block(block, spec, fault)))
}

fn grothendieck_block(mut block: Block, spec: &SweepSpec, beta: Option<&Scalar>) -> Vec<CheckReport> {
    let (rows, sites) = (block.rows, block.sites);
    for trial in 0..spec.trials {
        let mut rng = block.rng(spec.seed, "grothendieck", trial);
        let draw = (|| {
            let beta = match beta {
                Some(beta) => beta.clone(),
                None => nonzero(&mut rng)?,
            };
            let t = generic_t(&mut rng)?;
            let avoid = [Scalar::zero(), -&beta, -(&t * &beta)];
            let u = random_distinct(&mut rng, rows, &avoid).map_err(err)?;
            Ok::<_, String>((beta, t, u))
        })();
        let (beta, t, u) = match draw {
            Ok(draw) => draw,
            Err(e) => {
                block.sampling_failure(e);
                continue;
            }
        };
        let mut params = ParamPoint::new();
        params.insert("beta".into(), beta.clone().into());
        params.insert("u".into(), u.clone().into());

        let r0 = RParams::new(Scalar::zero());
        match grothendieck_specialization(sites, &beta, &u, &r0) {
            Ok(special) => {
                params.insert("z".into(), special.z.clone().into());
                let lattice = OrdinaryModel::new(r0.clone(), special.sites.clone(), u.clone(), special.w.clone())
                    .map_err(err)
                    .and_then(|m| ordinary_vector(&m));
                let polynomial = |x: &SpinConfig| {
                    GrothendieckPoint::new(special.z.clone(), beta.clone())
                        .and_then(|p| grothendieck(&x_to_lambda(x), &p))
                        .map(|g| &special.prefactor * g)
                        .map_err(err)
                };
                block.record_each("grothendieck.correspondence", &params, |x| {
                    let of = of_ordinary(&r0, &special.sites, &u, &special.w, x).map_err(err);
                    Some((of, polynomial(x)))
                });
                block.record_each("grothendieck.lattice", &params, |x| Some((amp(&lattice, x), polynomial(x))));
            }
            Err(e) => {
                let e = err(e);
                for check_id in ["grothendieck.correspondence", "grothendieck.lattice"] {
                    block.record_each::<Scalar>(check_id, &params, |_| Some((Err(e.clone()), Ok(Scalar::zero()))));
                }
            }
        }

        let rt = RParams::new(t.clone());
        params.remove("z");
        params.insert("t".into(), t.into());
        let special = grothendieck_specialization(sites, &beta, &u, &rt).map_err(err);
        block.record_each("grothendieck.homogeneous-limit", &params, |x| {
            let of = special
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|s| of_ordinary(&rt, &s.sites, &u, &s.w, x).map_err(err));
            Some((of, of_homogeneous(&rt, &beta, &u, sites, x).map_err(err)))
        });
    }
    block.finish()
}

/// At `t = 0` with the Grothendieck couplings and `w = 1`, the B-operator
/// amplitudes equal `(-β)^{-n(n-1)/2} Π u_j^N G_λ(z; β)` with
/// `z_j = -1/β - 1/u_j`; also checks the homogeneous rewriting at generic `t`.
/// `beta = None` draws a fresh β per trial.
pub fn verify_grothendieck_correspondence(
    spec: &SweepSpec,
    beta: Option<&Scalar>,
) -> Result<Vec<CheckReport>, VerifyError> {
    spec.validate()?;
    Ok(run_blocks(ordinary_blocks(spec), |block| grothendieck_block(block, spec, beta)))
}

/// Yang-Baxter, reflection and RLL relations as dense operator identities at
/// `trials` random points each.
pub fn verify_algebraic_relations(trials: usize, seed: u64) -> Result<Vec<CheckReport>, VerifyError> {
    verify_algebraic_relations_with(trials, seed, Fault::None)
}

pub fn verify_algebraic_relations_with(trials: usize, seed: u64, fault: Fault) -> Result<Vec<CheckReport>, VerifyError> {
    if trials == 0 {
        return Err(VerifyError::NoTrials);
    }
    let cell = Cell::bare(0, 0, 0);
    let outcomes: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = cell_rng(seed, "algebraic", &cell, trial);
            let mut rows = Vec::new();

            let ybe = (|| {
                let t = generic_t(&mut rng)?;
                let uvw = random_distinct(&mut rng, 3, &[]).map_err(err)?;
                let r = RParams::new(t.clone());
                let (lhs, rhs) = yang_baxter_sides(&uvw[0], &uvw[1], &uvw[2], [&r, &r, &r]);
                let mut params = ParamPoint::new();
                params.insert("t".into(), t.into());
                params.insert("u,v,w".into(), uvw.into());
                Ok::<_, String>((params, dense_witness(&lhs, &rhs)))
            })();
            rows.push(("weights.yang-baxter", ybe));

            let reflection = (|| {
                let t = generic_t(&mut rng)?;
                let uw = random_distinct(&mut rng, 2, &[]).map_err(err)?;
                let (a, b) = (nonzero(&mut rng)?, nonzero(&mut rng)?);
                let mut params = ParamPoint::new();
                params.insert("t".into(), t.clone().into());
                params.insert("A".into(), a.clone().into());
                params.insert("B".into(), b.clone().into());
                params.insert("u,w".into(), uw.clone().into());
                let mut k = KParams::new(a, b);
                if fault == Fault::NonTriangularK {
                    k = k.with_upper_right(Scalar::one());
                    params.insert("K_upper_right".into(), Scalar::one().into());
                }
                let (lhs, rhs) = reflection_sides(&uw[0], &uw[1], &RParams::new(t), &k).map_err(err)?;
                Ok((params, dense_witness(&lhs, &rhs)))
            })();
            rows.push(("weights.reflection", reflection));

            let rll = (|| {
                let t = generic_t(&mut rng)?;
                let r = RParams::new(t.clone());
                let site = sample_sites(&mut rng, 1, &r, fault)?.remove(0);
                let uuw = random_distinct(&mut rng, 3, &[]).map_err(err)?;
                let mut params = ParamPoint::new();
                params.insert("t".into(), t.into());
                params.insert("u1,u2,w".into(), uuw.clone().into());
                site_params(&mut params, std::slice::from_ref(&site));
                let (lhs, rhs) = rll_sides(&uuw[0], &uuw[1], &uuw[2], &site, &r);
                Ok((params, dense_witness(&lhs, &rhs)))
            })();
            rows.push(("weights.rll", rll));
            rows
        })
        .collect();

    let mut run = CellRun::new(cell, trials);
    for rows in outcomes {
        for (check_id, outcome) in rows {
            match outcome {
                Ok((params, (left, right))) => {
                    run.record(check_id, &params, left, right);
                }
                Err(e) => {
                    run.record::<String>(check_id, &ParamPoint::new(), Err(e), Ok(String::new()));
                }
            }
        }
    }
    let mut reports = run.finish();
    sort_reports(&mut reports);
    Ok(reports)
}

/// Product rearrangements used inside the proofs, each as a standalone
/// identity at random points: the recursion prefactor and the `w_N` pull-out
/// for the triangular sum, the telescoping ratio and the pull-out for the
/// ordinary sum.
pub fn verify_proof_identities(spec: &SweepSpec) -> Result<Vec<CheckReport>, VerifyError> {
    spec.validate()?;
    let mut cells = Vec::new();
    for rows in spec.rows.iter() {
        for down in 0..=rows {
            cells.push(Cell::bare(0, rows, down));
        }
    }
    Ok(run_cells(cells, |cell| proof_identities_cell(cell, spec)))
}

fn proof_identities_cell(cell: Cell, spec: &SweepSpec) -> Vec<CheckReport> {
    let (n, m) = (cell.rows, cell.down);
    let mut run = CellRun::new(cell.clone(), spec.trials);
    for trial in 0..spec.trials {
        let mut rng = cell_rng(spec.seed, "identities", &cell, trial);
        let draw = (|| {
            let t = generic_t(&mut rng)?;
            let u = random_distinct(&mut rng, n, &[Scalar::zero()]).map_err(err)?;
            let wn = nonzero(&mut rng)?;
            let (a, b) = (nonzero(&mut rng)?, nonzero(&mut rng)?);
            Ok::<_, String>((t, u, wn, a, b))
        })();
        let (t, u, wn, a, b) = match draw {
            Ok(draw) => draw,
            Err(e) => {
                run.record::<Scalar>("sampling", &ParamPoint::new(), Err(e), Ok(Scalar::zero()));
                continue;
            }
        };
        let one = Scalar::one();
        let un = &u[n - 1];
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(&mut rng);
        let mut sigma_head: Vec<usize> = (0..n - 1).collect();
        sigma_head.shuffle(&mut rng);

        let mut params = ParamPoint::new();
        params.insert("t".into(), t.clone().into());
        params.insert("u".into(), u.clone().into());
        params.insert("w_N".into(), wn.clone().into());
        params.insert("a_N".into(), a.clone().into());
        params.insert("b_N".into(), b.clone().into());
        params.insert(
            "sigma".into(),
            sigma.iter().map(|&s| Scalar::from_int(s as i64 + 1)).collect::<Vec<_>>().into(),
        );

        if m >= 1 {
            // Positions 1..m-1 and m+1..n carry a permutation of 1..n-1.
            let positions: Vec<usize> = (1..=n).filter(|&j| j != m).collect();
            let mut lhs = Scalar::one();
            for (_, &s) in positions.iter().zip(&sigma_head) {
                lhs *= (&t * &u[s] - un) * (&u[s] * un - &one);
            }
            let mut rhs = Scalar::one();
            for uj in &u[..n - 1] {
                rhs *= (&t * uj - un) * (uj * un - &one);
            }
            run.record("identity.recursion-prefactor", &params, Ok(lhs), Ok(rhs));
        }

        let pull = |j: usize| &u[sigma[j]] - &t * &wn;
        let lhs: Scalar = (0..m).map(pull).product::<Scalar>() * (m..n).map(pull).product::<Scalar>();
        let rhs: Scalar = u.iter().map(|uj| uj - &t * &wn).product();
        run.record("identity.pullout-triangular", &params, Ok(lhs), Ok(rhs));

        if m == n {
            let lhs = sigma_head
                .iter()
                .map(|&s| {
                    let ratio = (&t * &u[s] - un).checked_div(&(&u[s] - un))?;
                    Ok(ratio * &a * (&u[s] - un))
                })
                .collect::<Result<Vec<_>, crate::scalar::ScalarError>>()
                .map(|factors| factors.into_iter().product::<Scalar>())
                .map_err(err);
            let rhs: Scalar = u[..n - 1].iter().map(|uj| &a * (&t * uj - un)).product();
            run.record("identity.telescoping-ratio", &params, lhs, Ok(rhs));

            let lhs: Scalar = sigma.iter().map(|&s| &a * &u[s] + &b * &wn).product();
            let rhs: Scalar = u.iter().map(|uj| &a * uj + &b * &wn).product();
            run.record("identity.pullout-ordinary", &params, Ok(lhs), Ok(rhs));
        }
    }
    run.finish()
}

/// The sweeps run by a bare `verify`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyPlan {
    pub triangular: SweepSpec,
    pub ordinary: SweepSpec,
    pub grothendieck: SweepSpec,
    #[serde(default)]
    pub beta: Option<Scalar>,
    pub algebraic_trials: usize,
    pub algebraic_seed: u64,
}

impl VerifyPlan {
    pub fn acceptance(seed: u64) -> Self {
        VerifyPlan {
            triangular: SweepSpec::triangular_default(seed),
            ordinary: SweepSpec::ordinary_default(seed),
            grothendieck: SweepSpec::grothendieck_default(seed),
            beta: None,
            algebraic_trials: ALGEBRAIC_TRIALS,
            algebraic_seed: seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.triangular.seed = seed;
        self.ordinary.seed = seed;
        self.grothendieck.seed = seed;
        self.algebraic_seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.triangular.trials = trials;
        self.ordinary.trials = trials;
        self.grothendieck.trials = trials;
        self
    }

    pub fn with_max_rows(mut self, rows: usize) -> Self {
        for spec in [&mut self.triangular, &mut self.ordinary, &mut self.grothendieck] {
            spec.rows.max = rows;
        }
        self
    }

    pub fn with_max_sites(mut self, sites: usize) -> Self {
        for spec in [&mut self.triangular, &mut self.ordinary, &mut self.grothendieck] {
            spec.sites.max = sites;
        }
        self
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        self.triangular.validate()?;
        self.ordinary.validate()?;
        self.grothendieck.validate()?;
        if self.algebraic_trials == 0 {
            return Err(VerifyError::NoTrials);
        }
        Ok(())
    }
}

impl Default for VerifyPlan {
    fn default() -> Self {
        VerifyPlan::acceptance(DEFAULT_SEED)
    }
}

/// Runs every suite of `plan`; reports are sorted by check id, then cell.
pub fn verify_all(plan: &VerifyPlan) -> Result<Vec<CheckReport>, VerifyError> {
    verify_all_with(plan, Fault::None)
}

/// [`verify_all`] with `fault` injected into every suite it applies to.
pub fn verify_all_with(plan: &VerifyPlan, fault: Fault) -> Result<Vec<CheckReport>, VerifyError> {
    plan.validate()?;
    let mut reports =
        verify_algebraic_relations_with(plan.algebraic_trials, plan.algebraic_seed, fault)?;
    reports.extend(verify_triangular_properties_with(&plan.triangular, fault)?);
    reports.extend(verify_triangular_formula_with(&plan.triangular, fault)?);
    reports.extend(verify_proof_identities(&plan.triangular)?);
    reports.extend(verify_ordinary_properties_with(&plan.ordinary, fault)?);
    reports.extend(verify_ordinary_formula_with(&plan.ordinary, fault)?);
    reports.extend(verify_grothendieck_correspondence(
        &plan.grothendieck,
        plan.beta.as_ref(),
    )?);
    sort_reports(&mut reports);
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SweepSpec {
        SweepSpec::new(SizeRange::new(1, 2), SizeRange::new(1, 2), DownPolicy::All, 2, seed).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::new(SizeRange::new(2, 1), SizeRange::new(1, 1), DownPolicy::All, 1, 0).is_err());
        assert!(SweepSpec::new(SizeRange::new(0, 1), SizeRange::new(1, 1), DownPolicy::All, 1, 0).is_err());
        assert!(SweepSpec::new(SizeRange::new(1, 1), SizeRange::new(1, 1), DownPolicy::All, 0, 0).is_err());
        assert!(SweepSpec::new(SizeRange::new(1, 10), SizeRange::new(1, 7), DownPolicy::All, 1, 0).is_err());
    }

    #[test]
    fn small_triangular_sweeps_pass() {
        let reports = verify_triangular_properties(&small(3)).unwrap();
        assert!(all_passed(&reports), "{reports:#?}");
        let reports = verify_triangular_formula(&small(3)).unwrap();
        assert!(all_passed(&reports), "{reports:#?}");
        assert!(reports.iter().any(|r| r.check_id == "triangular.domain-wall"));
    }

    #[test]
    fn small_ordinary_sweeps_pass() {
        let spec = SweepSpec::new(SizeRange::new(1, 3), SizeRange::new(1, 2), DownPolicy::All, 2, 5).unwrap();
        let reports = verify_ordinary_properties(&spec).unwrap();
        assert!(all_passed(&reports), "{reports:#?}");
        assert!(reports.iter().any(|r| r.check_id == "ordinary.initial"));
        let reports = verify_ordinary_formula(&spec).unwrap();
        assert!(all_passed(&reports), "{reports:#?}");
    }

    #[test]
    fn fixed_down_policy_limits_cells() {
        let spec = SweepSpec::new(SizeRange::new(2, 2), SizeRange::new(2, 2), DownPolicy::Fixed(1), 1, 0).unwrap();
        let reports = verify_triangular_formula(&spec).unwrap();
        assert!(reports.iter().all(|r| r.down == 1));
        assert_eq!(reports.len(), 2);
    }

    #[test]
    fn failed_reports_carry_witnesses() {
        let reports = verify_triangular_formula_with(&small(1), Fault::DropFactorialPrefactor).unwrap();
        assert!(!all_passed(&reports));
        assert!(reports.iter().filter(|r| !r.passed).all(|r| r.witness.is_some()));
    }

    #[test]
    fn reports_are_sorted_and_reproducible() {
        let a = verify_proof_identities(&small(11)).unwrap();
        let b = verify_proof_identities(&small(11)).unwrap();
        assert_eq!(a, b);
        assert!(all_passed(&a));
        let keys: Vec<_> = a.iter().map(|r| (r.check_id.clone(), r.rows, r.down)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn report_round_trips_through_json() {
        let reports = verify_algebraic_relations(3, 2).unwrap();
        let json = serde_json::to_string(&reports).unwrap();
        let back: Vec<CheckReport> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, reports);
    }
}
