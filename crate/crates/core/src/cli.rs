// SPDX-License-Identifier: Apache-2.0

//! Command-line surface: point evaluations and verification sweeps.
//!
//! Parameter points come from a JSON config with scalars written as `"p/q"`
//! strings. Exit status is 0 on success, 1 when any check fails and 2 on
//! configuration or evaluation errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{
    ordinary_wavefunction, wavefunction_triangular, OrdinaryModel, SpinConfig, TriangularModel,
};
use crate::scalar::Scalar;
use crate::symfun::{
    f_triangular, grothendieck, of_ordinary, set_permutation_cap, GrothendieckPoint, Partition,
};
use crate::verify::{all_passed, verify_all_with, CheckReport, Fault, VerifyPlan, DEFAULT_SEED};
use crate::weights::{KParams, LSiteParams, RParams};

pub const THREADS_ENV: &str = "VERTEXION_THREADS";
pub const DEFAULT_REPORT: &str = "vertexion-report.json";

#[derive(Debug, Parser)]
#[command(name = "vertexion", version, about = "Exact six-vertex wavefunctions and their symmetric functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config with the parameter point or sweep plan.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; `verify` also writes a CSV summary next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Largest number of rows n in the sweeps.
    #[arg(long = "max-n", global = true)]
    pub max_rows: Option<usize>,
    /// Largest number of sites N in the sweeps.
    #[arg(long = "max-N", global = true)]
    pub max_sites: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Triangular wavefunction: lattice contraction and formula side by side.
    EvalW,
    /// Triangular symmetric function, with the lattice value alongside.
    EvalF,
    /// B-operator wavefunction from the lattice.
    EvalOw,
    /// B-operator symmetric function.
    EvalOf,
    /// Grothendieck polynomial.
    EvalGroth,
    /// Run the verification sweeps.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::EvalW => "eval-w",
            Command::EvalF => "eval-f",
            Command::EvalOw => "eval-ow",
            Command::EvalOf => "eval-of",
            Command::EvalGroth => "eval-groth",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{failed} of {total} checks failed")]
    CheckFailure { failed: usize, total: usize },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailure { .. } => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Parameters of a triangular lattice; `N = w.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangularInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub t: Scalar,
    #[serde(rename = "A")]
    pub a: Scalar,
    #[serde(rename = "B")]
    pub b: Scalar,
    pub u: Vec<Scalar>,
    pub w: Vec<Scalar>,
    pub x: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation_cap: Option<usize>,
}

/// Site couplings; `a, b, c, d` default to 1 and a missing `e` or `f` is
/// solved from the site constraints.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Scalar>,
}

impl SiteInput {
    fn resolve(&self, r: &RParams) -> Result<LSiteParams, CliError> {
        let or_one = |v: &Option<Scalar>| v.clone().unwrap_or_else(Scalar::one);
        let solved = LSiteParams::solve(or_one(&self.a), or_one(&self.b), or_one(&self.c), or_one(&self.d), r)
            .map_err(config_err)?;
        let e = self.e.clone().unwrap_or(solved.e);
        let f = self.f.clone().unwrap_or(solved.f);
        LSiteParams::new(solved.a, solved.b, solved.c, solved.d, e, f, r).map_err(config_err)
    }
}

/// Parameters of a B-operator lattice; `N = sites.len()`, `w` defaults to ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrdinaryInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub t: Scalar,
    pub sites: Vec<SiteInput>,
    pub u: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Scalar>>,
    pub x: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation_cap: Option<usize>,
}

/// `G_λ(z; β)` with `z` given directly or through `z_j = -1/β - 1/u_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrothendieckInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub beta: Scalar,
    pub lambda: Vec<usize>,
    /// Frame width is `N - n`.
    #[serde(rename = "N")]
    pub sites: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Scalar>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<VerifyPlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, rename = "max_n", skip_serializing_if = "Option::is_none")]
    pub max_rows: Option<usize>,
    #[serde(default, rename = "max_N", skip_serializing_if = "Option::is_none")]
    pub max_sites: Option<usize>,
    #[serde(default)]
    pub fault: Fault,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation_cap: Option<usize>,
}

/// Parses JSON, pointing at the offending field on failure.
pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::Config(format!("at `{}`: {}", e.path(), e.inner())))
}

fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn check_command(found: &Option<String>, expected: Command) -> Result<(), CliError> {
    match found {
        Some(name) if name != expected.name() => Err(CliError::Config(format!(
            "at `command`: config is for `{name}`, invoked as `{}`",
            expected.name()
        ))),
        _ => Ok(()),
    }
}

fn degenerate_t_warning(t: &Scalar) {
    if t.is_one() {
        eprintln!("warning: t = 1 is a degenerate point");
    }
}

fn triangular_parts(input: &TriangularInput) -> Result<(TriangularModel, SpinConfig), CliError> {
    let x = SpinConfig::new(input.w.len(), input.x.clone()).map_err(config_err)?;
    let model = TriangularModel::new(
        RParams::new(input.t.clone()),
        KParams::new(input.a.clone(), input.b.clone()),
        input.u.clone(),
        input.w.clone(),
    )
    .map_err(config_err)?;
    if let Some(cap) = input.permutation_cap {
        set_permutation_cap(cap);
    }
    Ok((model, x))
}

/// `oracle=<lattice> formula=<symmetric function>`; the formula side is
/// reported as unavailable when `m > n`.
pub fn eval_w(input: &TriangularInput) -> Result<String, CliError> {
    let (model, x) = triangular_parts(input)?;
    degenerate_t_warning(&input.t);
    let oracle = wavefunction_triangular(&model, &x).map_err(config_err)?;
    let formula = match f_triangular(&model.r, &model.k, model.u(), model.w(), &x) {
        Ok(value) => value.to_string(),
        Err(e) => format!("unavailable ({e})"),
    };
    Ok(format!("oracle={oracle} formula={formula}"))
}

/// Like [`eval_w`], but a formula error is a config error.
pub fn eval_f(input: &TriangularInput) -> Result<String, CliError> {
    let (model, x) = triangular_parts(input)?;
    degenerate_t_warning(&input.t);
    let formula = f_triangular(&model.r, &model.k, model.u(), model.w(), &x).map_err(config_err)?;
    let oracle = wavefunction_triangular(&model, &x).map_err(config_err)?;
    Ok(format!("oracle={oracle} formula={formula}"))
}

fn ordinary_parts(input: &OrdinaryInput) -> Result<(OrdinaryModel, SpinConfig), CliError> {
    let r = RParams::new(input.t.clone());
    let sites = input.sites.iter().map(|s| s.resolve(&r)).collect::<Result<Vec<_>, _>>()?;
    let w = input.w.clone().unwrap_or_else(|| vec![Scalar::one(); sites.len()]);
    let x = SpinConfig::new(w.len(), input.x.clone()).map_err(config_err)?;
    let model = OrdinaryModel::new(r, sites, input.u.clone(), w).map_err(config_err)?;
    if let Some(cap) = input.permutation_cap {
        set_permutation_cap(cap);
    }
    Ok((model, x))
}

pub fn eval_ow(input: &OrdinaryInput) -> Result<String, CliError> {
    let (model, x) = ordinary_parts(input)?;
    degenerate_t_warning(&input.t);
    Ok(ordinary_wavefunction(&model, &x).map_err(config_err)?.to_string())
}

pub fn eval_of(input: &OrdinaryInput) -> Result<String, CliError> {
    let (model, x) = ordinary_parts(input)?;
    degenerate_t_warning(&input.t);
    let value = of_ordinary(&model.r, model.site_params(), model.u(), model.w(), &x).map_err(config_err)?;
    Ok(value.to_string())
}

pub fn eval_groth(input: &GrothendieckInput) -> Result<String, CliError> {
    let lambda = Partition::new(input.lambda.clone(), input.sites).map_err(config_err)?;
    let z = match (&input.z, &input.u) {
        (Some(z), None) => z.clone(),
        (None, Some(u)) => {
            let beta_inv = input.beta.inv().map_err(config_err)?;
            u.iter()
                .map(|uj| Ok(-&beta_inv - uj.inv()?))
                .collect::<Result<Vec<_>, crate::scalar::ScalarError>>()
                .map_err(config_err)?
        }
        _ => return Err(CliError::Config("exactly one of `z` and `u` is required".into())),
    };
    let point = GrothendieckPoint::new(z, input.beta.clone()).map_err(config_err)?;
    Ok(grothendieck(&lambda, &point).map_err(config_err)?.to_string())
}

/// Fixed CSV summary: `check_id,N,n,m,x,trials,passed` with `x` dash-joined.
pub fn reports_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("check_id,N,n,m,x,trials,passed\n");
    for r in reports {
        let x = r.x.iter().map(usize::to_string).collect::<Vec<_>>().join("-");
        writeln!(out, "{},{},{},{},{},{},{}", r.check_id, r.sites, r.rows, r.down, x, r.trials, r.passed)
            .expect("writing to a String cannot fail");
    }
    out
}

pub fn reports_json(reports: &[CheckReport]) -> String {
    let mut json = serde_json::to_string_pretty(reports).expect("reports serialize");
    json.push('\n');
    json
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Runs the sweeps and writes `<out>` (JSON) and `<out>.csv`. Returns the
/// summary line, or `CheckFailure` after writing when any check failed.
fn run_verify(cli: &Cli, input: VerifyInput) -> Result<String, CliError> {
    check_command(&input.command, Command::Verify)?;
    let seed = cli.seed.or(input.seed);
    let mut plan = input.plan.unwrap_or_else(|| VerifyPlan::acceptance(seed.unwrap_or(DEFAULT_SEED)));
    if let Some(seed) = seed {
        plan = plan.with_seed(seed);
    }
    if let Some(trials) = cli.trials.or(input.trials) {
        plan = plan.with_trials(trials);
    }
    if let Some(rows) = cli.max_rows.or(input.max_rows) {
        plan = plan.with_max_rows(rows);
    }
    if let Some(sites) = cli.max_sites.or(input.max_sites) {
        plan = plan.with_max_sites(sites);
    }
    if let Some(cap) = input.permutation_cap {
        set_permutation_cap(cap);
    }
    let reports = verify_all_with(&plan, input.fault).map_err(config_err)?;

    let out = cli.out.clone().or(input.out).unwrap_or_else(|| PathBuf::from(DEFAULT_REPORT));
    write_file(&out, &reports_json(&reports))?;
    write_file(&out.with_extension("csv"), &reports_csv(&reports))?;

    let failed = reports.iter().filter(|r| !r.passed).count();
    if !all_passed(&reports) {
        for r in reports.iter().filter(|r| !r.passed) {
            eprintln!("FAIL {} N={} n={} m={} x={:?}", r.check_id, r.sites, r.rows, r.down, r.x);
        }
        return Err(CliError::CheckFailure { failed, total: reports.len() });
    }
    Ok(format!("{} checks passed; report written to {}", reports.len(), out.display()))
}

fn required_config<T: DeserializeOwned>(cli: &Cli) -> Result<T, CliError> {
    match &cli.config {
        Some(path) => load_config(path),
        None => Err(CliError::Config(format!("`{}` needs --config <path>", cli.command.name()))),
    }
}

/// Runs one invocation and returns what goes to stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let output = match cli.command {
        Command::EvalW | Command::EvalF => {
            let input: TriangularInput = required_config(cli)?;
            check_command(&input.command, cli.command)?;
            if cli.command == Command::EvalW {
                eval_w(&input)?
            } else {
                eval_f(&input)?
            }
        }
        Command::EvalOw | Command::EvalOf => {
            let input: OrdinaryInput = required_config(cli)?;
            check_command(&input.command, cli.command)?;
            if cli.command == Command::EvalOw {
                eval_ow(&input)?
            } else {
                eval_of(&input)?
            }
        }
        Command::EvalGroth => {
            let input: GrothendieckInput = required_config(cli)?;
            check_command(&input.command, cli.command)?;
            eval_groth(&input)?
        }
        Command::Verify => {
            let input = match &cli.config {
                Some(path) => load_config(path)?,
                None => VerifyInput::default(),
            };
            return run_verify(cli, input);
        }
    };
    if let Some(path) = &cli.out {
        write_file(path, &format!("{output}\n"))?;
    }
    Ok(output)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(config_err)
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = configure_threads().and_then(|()| run(&cli));
    match result {
        Ok(output) => {
            println!("{output}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_of_value() {
        let input: OrdinaryInput =
            parse_config(r#"{"t": "1/2", "sites": [{"c": "3/2"}], "u": ["4"], "x": [1]}"#).unwrap();
        assert_eq!(eval_of(&input).unwrap(), "3");
        assert_eq!(eval_ow(&input).unwrap(), "3");
    }

    #[test]
    fn decimal_scalar_is_rejected_with_path() {
        let err = parse_config::<OrdinaryInput>(r#"{"t": "1.5", "sites": [], "u": [], "x": []}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("at `t`"), "{err}");
        let err =
            parse_config::<TriangularInput>(r#"{"t": "1", "A": "1", "B": "2", "u": ["1/2", "0.5"], "w": [], "x": []}"#)
                .unwrap_err();
        assert!(err.to_string().contains("u[1]"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = parse_config::<GrothendieckInput>(r#"{"beta": "1", "lambda": [], "N": 1, "gamma": 2}"#).unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");
    }

    #[test]
    fn triangular_sides_agree() {
        let input: TriangularInput = parse_config(
            r#"{"t": "2/3", "A": "3", "B": "-1/2", "u": ["2", "-5/4"], "w": ["9/5", "1/7"], "x": [2]}"#,
        )
        .unwrap();
        let line = eval_w(&input).unwrap();
        let (oracle, formula) = line.split_once(' ').unwrap();
        assert_eq!(oracle.trim_start_matches("oracle="), formula.trim_start_matches("formula="));
    }

    #[test]
    fn too_many_down_spins_has_no_formula() {
        let input: TriangularInput =
            parse_config(r#"{"t": "2", "A": "1", "B": "3", "u": ["5"], "w": ["7", "11"], "x": [1, 2]}"#).unwrap();
        assert!(eval_w(&input).unwrap().contains("formula=unavailable"));
        assert_eq!(eval_f(&input).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn grothendieck_needs_one_variable_source() {
        let both: GrothendieckInput =
            parse_config(r#"{"beta": "2", "lambda": [1], "N": 2, "z": ["3"], "u": ["3"]}"#).unwrap();
        assert!(eval_groth(&both).is_err());
        let z: GrothendieckInput = parse_config(r#"{"beta": "2", "lambda": [1], "N": 2, "z": ["3"]}"#).unwrap();
        assert_eq!(eval_groth(&z).unwrap(), "3");
    }

    #[test]
    fn mismatched_command_is_rejected() {
        let input: OrdinaryInput =
            parse_config(r#"{"command": "eval-w", "t": "1/2", "sites": [{}], "u": ["4"], "x": [1]}"#).unwrap();
        assert!(check_command(&input.command, Command::EvalOf).is_err());
    }

    #[test]
    fn csv_layout() {
        let report = CheckReport {
            check_id: "triangular.formula".into(),
            sites: 3,
            rows: 2,
            down: 2,
            x: vec![1, 3],
            params_used: Default::default(),
            passed: true,
            witness: None,
            trials: 5,
            note: None,
        };
        assert_eq!(
            reports_csv(&[report]),
            "check_id,N,n,m,x,trials,passed\ntriangular.formula,3,2,2,1-3,5,true\n"
        );
    }
}
